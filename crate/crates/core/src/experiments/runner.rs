use std::time::Instant;

use log::info;
use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentId, Method, ProfileKind, SweepVariable};
use super::table::ResultTable;
use super::ExperimentError;
use crate::ensemble::{momentum_average, photon_average, EnsembleResult, MomentumDistribution};
use crate::error::{EnsembleError, PropagatorError, ScatteringError};
use crate::model::{photon_weights, ModeProfile, PhotonStatistics};
use crate::propagator::{
    self, collapse_time_estimate, edge_mass, init_packet, observables, probability_right,
    AutoConfig, Diagnostic, Grid1D, PropagationConfig, SplitOperator,
};
use crate::scattering::{meza_dressed, sech_dressed, BareCoefficients};

/// Environment variable holding the worker-thread count for sweeps.
pub const WORKERS_ENV: &str = "MAZER_WORKERS";

/// Worker threads requested through [`WORKERS_ENV`], if set and valid.
pub fn worker_count() -> Option<usize> {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n| n > 0)
}

fn in_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T, ExperimentError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_count() {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| ExperimentError::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Runs one experiment and returns its table.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultTable, ExperimentError> {
    let start = Instant::now();
    let diagnostics = basic_checks(config);
    if let Some(d) = diagnostics.first() {
        return Err(ExperimentError::Config(format!("{}: {}", d.rule, d.message)));
    }
    let mut table = match config.id {
        ExperimentId::Fig7 => snapshot_experiment(config)?,
        ExperimentId::Fig8 => time_series_experiment(config)?,
        ExperimentId::Fig6 => propagator_sweep(config)?,
        ExperimentId::Custom if config.method == Method::Propagator => propagator_sweep(config)?,
        _ => analytic_sweep(config)?,
    };
    if let Some((i, j)) = table.first_non_finite() {
        return Err(ExperimentError::Convergence {
            point: format!("row {i}"),
            message: format!("non-finite value in column {}", table.columns[j]),
            partial: None,
        });
    }
    let mut meta = vec![
        ("experiment".to_string(), config.id.name().to_string()),
        ("description".to_string(), config.id.description().to_string()),
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("config".to_string(), config.to_json()),
    ];
    meta.append(&mut table.metadata);
    meta.push(("runtime_seconds".to_string(), format!("{:.3}", start.elapsed().as_secs_f64())));
    table.metadata = meta;
    Ok(table)
}

/// Reports violated invariants without running.
pub fn validate_config(config: &ExperimentConfig) -> Vec<Diagnostic> {
    let mut out = basic_checks(config);
    if !out.is_empty() || config.method != Method::Propagator {
        return out;
    }
    for (label, profile, k0, detuning) in propagator_points(config) {
        let profile = match profile {
            Ok(p) => p,
            Err(e) => {
                out.push(Diagnostic { rule: "profile", message: format!("{label}: {e}") });
                continue;
            }
        };
        match propagation_config(config, profile, k0, detuning) {
            Ok(pc) => out.extend(pc.validate().into_iter().map(|d| Diagnostic {
                rule: d.rule,
                message: format!("{label}: {}", d.message),
            })),
            Err(e) => out.push(Diagnostic { rule: "setup", message: format!("{label}: {e}") }),
        }
    }
    out
}

fn basic_checks(c: &ExperimentConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |rule: &'static str, message: String| out.push(Diagnostic { rule, message });
    if !(c.lambda0.is_finite() && c.lambda0 >= 0.0) {
        push("parameter", format!("lambda0 must be finite and non-negative, got {}", c.lambda0));
    }
    if !(c.length.is_finite() && c.length > 0.0) {
        push("parameter", format!("length must be positive, got {}", c.length));
    }
    if !(c.k0.is_finite() && c.k0 > 0.0) {
        push("parameter", format!("k0 must be positive, got {}", c.k0));
    }
    let sweeps = !matches!(c.id, ExperimentId::Fig7 | ExperimentId::Fig8);
    if sweeps {
        if c.sweep.points == 0 {
            push("sweep", "sweep needs at least one point".into());
        }
        if c.sweep.values().iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            push("sweep", format!("sweep values must be positive, got [{}, {}]", c.sweep.start, c.sweep.stop));
        }
        if c.sweep.stop < c.sweep.start {
            push("sweep", "sweep must be ascending".into());
        }
    }
    match c.method {
        Method::Analytic => {
            if c.profile == ProfileKind::Gaussian {
                push("method", "no closed form for the Gaussian profile; use method propagator".into());
            }
            if c.dk_fractions.is_empty() || c.fields.is_empty() {
                push("curves", "need at least one momentum spread and one field state".into());
            }
            if c.dk_fractions.iter().any(|f| !(f.is_finite() && *f >= 0.0)) {
                push("momentum", "momentum spreads must be non-negative".into());
            }
            for f in &c.fields {
                if let PhotonStatistics::Coherent(m) | PhotonStatistics::Thermal(m) = f {
                    if !(m.is_finite() && *m >= 0.0) {
                        push("photon", format!("mean photon number must be non-negative, got {m}"));
                    }
                }
            }
            if !(c.quadrature_tol.is_finite() && c.quadrature_tol > 0.0) {
                push("quadrature", "quadrature tolerance must be positive".into());
            }
        }
        Method::Propagator => {
            if c.detunings.is_empty() || c.detunings.iter().any(|d| !d.is_finite()) {
                push("detuning", "need at least one finite detuning".into());
            }
            if !(c.packet_width.is_finite() && c.packet_width > 0.0) {
                push("packet", format!("packet width must be positive, got {}", c.packet_width));
            }
            if c.id == ExperimentId::Fig7 {
                if c.lengths.is_empty() || c.lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
                    push("lengths", "need positive mode lengths".into());
                }
                let mut sorted = c.snapshot_times.clone();
                sorted.sort_by(f64::total_cmp);
                if c.snapshot_times.is_empty() || sorted != c.snapshot_times || sorted[0] < 0.0 {
                    push("snapshots", "snapshot times must be non-negative and ascending".into());
                }
            }
        }
    }
    out
}

type PointSpec = (String, Result<ModeProfile, crate::error::ModelError>, f64, f64);

fn propagator_points(c: &ExperimentConfig) -> Vec<PointSpec> {
    let lengths = match c.id {
        ExperimentId::Fig7 => c.lengths.clone(),
        ExperimentId::Fig8 => vec![c.length],
        _ => Vec::new(),
    };
    let mut out = Vec::new();
    if !lengths.is_empty() {
        for &l in &lengths {
            for &d in &c.detunings {
                out.push((format!("L={l} detuning={d}"), c.profile.build(c.lambda0, l), c.k0, d));
            }
        }
        return out;
    }
    for x in c.sweep.values() {
        let (k0, l) = sweep_point(c, x);
        for &d in &c.detunings {
            out.push((format!("k0={k0} L={l} detuning={d}"), c.profile.build(c.lambda0, l), k0, d));
        }
    }
    out
}

fn sweep_point(c: &ExperimentConfig, x: f64) -> (f64, f64) {
    match c.sweep.variable {
        SweepVariable::K0 => (x, c.length),
        SweepVariable::Length => (c.k0, x),
    }
}

fn sweep_column(c: &ExperimentConfig) -> &'static str {
    match c.sweep.variable {
        SweepVariable::K0 => "k0",
        SweepVariable::Length => "L",
    }
}

/// Propagation setup for one point, honouring explicit grid and time
/// controls.
pub fn propagation_config(
    c: &ExperimentConfig,
    profile: ModeProfile,
    k0: f64,
    detuning: f64,
) -> Result<PropagationConfig, PropagatorError> {
    let ctl = &c.propagation;
    let auto = AutoConfig {
        t_max: ctl.t_max,
        launch_widths: ctl.launch_widths,
        reach_sigmas: ctl.reach_sigmas,
        sample_interval: ctl.sample_interval,
        termination: ctl.termination,
        ..AutoConfig::new(profile, k0, c.packet_width, detuning)
    };
    let mut pc = auto.build()?;
    if let Some(z0) = ctl.z0 {
        pc.z0 = z0;
    }
    if let Some(v) = ctl.z_min {
        pc.z_min = v;
    }
    if let Some(v) = ctl.z_max {
        pc.z_max = v;
    }
    if let Some(v) = ctl.points {
        pc.points = v;
    }
    if let Some(dt) = ctl.dt {
        pc.dt = dt;
        pc.sample_stride = ((ctl.sample_interval / dt).round() as usize).max(1);
    }
    Ok(pc)
}

fn coefficient(profile: ProfileKind, lambda0: f64, length: f64, n: u32, k: f64) -> Result<BareCoefficients, ScatteringError> {
    let d = match profile {
        ProfileKind::Meza => meza_dressed(k, n, lambda0, length)?,
        ProfileKind::Sech => sech_dressed(k, n, lambda0, length)?,
        ProfileKind::Gaussian => {
            return Err(ScatteringError::InvalidParameter("no closed form for the Gaussian profile".into()))
        }
    };
    Ok(d.to_bare())
}

fn curve_labels(c: &ExperimentConfig) -> Vec<String> {
    let mut labels = Vec::new();
    for field in &c.fields {
        let field_label = match field {
            PhotonStatistics::Vacuum => "vacuum".to_string(),
            PhotonStatistics::Coherent(m) => format!("coherent{m}"),
            PhotonStatistics::Thermal(m) => format!("thermal{m}"),
        };
        for f in &c.dk_fractions {
            labels.push(format!("dk{f}_{field_label}"));
        }
    }
    labels
}

fn analytic_sweep(c: &ExperimentConfig) -> Result<ResultTable, ExperimentError> {
    let dists = c
        .fields
        .iter()
        .map(|&f| photon_weights(f, c.photon_truncation))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| ExperimentError::Config(e.to_string()))?;
    let mut columns = vec![sweep_column(c).to_string()];
    for label in curve_labels(c) {
        columns.push(format!("P_trans_{label}"));
        columns.push(format!("S_{label}"));
    }
    let xs = c.sweep.values();
    info!("{}: {} analytic sweep points", c.id, xs.len());
    let rows: Vec<Result<Vec<f64>, (String, EnsembleError)>> = in_pool(|| {
        xs.par_iter()
            .map(|&x| {
                let (k0, length) = sweep_point(c, x);
                let mut row = vec![x];
                for dist in &dists {
                    for &frac in &c.dk_fractions {
                        let md = MomentumDistribution::new(k0, frac * k0)
                            .map_err(|e| (format!("k0={k0} L={length}"), e))?;
                        let res: EnsembleResult = photon_average(
                            |n| {
                                momentum_average(
                                    |k| coefficient(c.profile, c.lambda0, length, n, k),
                                    &md,
                                    c.quadrature_tol,
                                )
                            },
                            dist,
                        )
                        .map_err(|e| (format!("k0={k0} L={length} dk={}", frac * k0), e))?;
                        row.push(res.transmission());
                        row.push(res.entropy());
                    }
                }
                Ok(row)
            })
            .collect()
    })?;
    collect_rows(columns, rows, |e| {
        matches!(
            e,
            EnsembleError::QuadratureNotConverged { .. }
                | EnsembleError::Scattering(ScatteringError::UnitarityDefect(_))
        )
    })
}

fn collect_rows<E: std::fmt::Display>(
    columns: Vec<String>,
    rows: Vec<Result<Vec<f64>, (String, E)>>,
    is_convergence: impl Fn(&E) -> bool,
) -> Result<ResultTable, ExperimentError> {
    let mut table = ResultTable::new(columns);
    for row in rows {
        match row {
            Ok(r) => table.push_row(r),
            Err((point, e)) => {
                if is_convergence(&e) {
                    return Err(ExperimentError::Convergence {
                        point,
                        message: e.to_string(),
                        partial: Some(Box::new(table)),
                    });
                }
                return Err(ExperimentError::Config(format!("{point}: {e}")));
            }
        }
    }
    Ok(table)
}

fn propagator_failure(e: &PropagatorError) -> bool {
    matches!(
        e,
        PropagatorError::NotConverged(_) | PropagatorError::BoundaryContamination { .. }
    )
}

fn propagator_sweep(c: &ExperimentConfig) -> Result<ResultTable, ExperimentError> {
    let mut columns = vec![sweep_column(c).to_string()];
    for d in &c.detunings {
        columns.push(format!("P_trans_D{d}"));
        columns.push(format!("S_D{d}"));
    }
    let xs = c.sweep.values();
    let jobs: Vec<(usize, f64, f64, f64)> = xs
        .iter()
        .enumerate()
        .flat_map(|(i, &x)| c.detunings.iter().map(move |&d| (i, x, d)))
        .map(|(i, x, d)| {
            let (k0, _) = sweep_point(c, x);
            (i, x, k0, d)
        })
        .collect();
    info!("{}: {} propagator runs", c.id, jobs.len());
    let results: Vec<Result<(f64, f64), (String, PropagatorError)>> = in_pool(|| {
        jobs.par_iter()
            .map(|&(_, x, k0, d)| {
                let (_, length) = sweep_point(c, x);
                let label = format!("k0={k0} L={length} detuning={d}");
                let run = || -> Result<(f64, f64), PropagatorError> {
                    let profile = c.profile.build(c.lambda0, length)?;
                    let pc = propagation_config(c, profile, k0, d)?;
                    let r = propagator::propagate(&pc)?;
                    let p = r.transmission()?;
                    info!("{label}: P_trans = {p:.6} at t = {:.1}", r.time);
                    Ok((p, observables(&r.packet).s))
                };
                run().map_err(|e| (label, e))
            })
            .collect()
    })?;
    let per_row = c.detunings.len();
    let rows = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let mut row = vec![x];
            for r in &results[i * per_row..(i + 1) * per_row] {
                let (p, s) = r.as_ref().map_err(|(l, e)| (l.clone(), e.clone()))?;
                row.push(*p);
                row.push(*s);
            }
            Ok(row)
        })
        .collect();
    collect_rows(columns, rows, propagator_failure)
}

// (t, density_e, density_g, P_right, forbidden-region peak density)
type SnapshotSample = (f64, Vec<f64>, Vec<f64>, f64, f64);

/// Density snapshots for several mode lengths on a shared grid.
fn snapshot_experiment(c: &ExperimentConfig) -> Result<ResultTable, ExperimentError> {
    let detuning = c.detunings.first().copied().unwrap_or(0.0);
    let t_end = c.snapshot_times.last().copied().unwrap_or(0.0);
    let configs = c
        .lengths
        .iter()
        .map(|&l| {
            let profile = c.profile.build(c.lambda0, l).map_err(PropagatorError::from)?;
            let mut local = c.clone();
            local.propagation.t_max = Some(c.propagation.t_max.unwrap_or(t_end).max(t_end));
            propagation_config(&local, profile, c.k0, detuning)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| ExperimentError::Config(e.to_string()))?;
    // shared grid: widest extent, finest spacing, earliest launch
    let z_lo = configs.iter().map(|p| p.z_min).fold(f64::INFINITY, f64::min);
    let z_hi = configs.iter().map(|p| p.z_max).fold(f64::NEG_INFINITY, f64::max);
    let dz = configs
        .iter()
        .map(|p| (p.z_max - p.z_min) / p.points as f64)
        .fold(f64::INFINITY, f64::min);
    let grid = if c.propagation.points.is_some() || c.propagation.z_min.is_some() || c.propagation.z_max.is_some() {
        configs[0].grid()
    } else {
        Grid1D::covering(z_lo, z_hi, dz)
    }
    .map_err(|e| ExperimentError::Config(e.to_string()))?;
    let z0 = configs.iter().map(|p| p.z0).fold(f64::INFINITY, f64::min);
    let dt = configs.iter().map(|p| p.dt).fold(f64::INFINITY, f64::min);
    let guard = configs[0].boundary;

    let runs: Vec<Result<Vec<SnapshotSample>, (String, PropagatorError)>> = in_pool(|| {
        configs
            .par_iter()
            .zip(&c.lengths)
            .map(|(pc, &l)| {
                let label = format!("L={l}");
                let run = || -> Result<Vec<SnapshotSample>, PropagatorError> {
                    let mut packet = init_packet(&grid, z0, c.packet_width, c.k0, pc.channel)?;
                    let mut op = SplitOperator::new(&grid, &pc.profile, 0, detuning, dt);
                    let mut steps_done = 0usize;
                    let mut out = Vec::new();
                    for &t in &c.snapshot_times {
                        let target = (t / dt).round() as usize;
                        op.step_many(&mut packet, target - steps_done);
                        steps_done = target;
                        let time = steps_done as f64 * dt;
                        if let Some(g) = guard {
                            let m = edge_mass(&packet, g.fraction);
                            if m > g.tolerance {
                                return Err(PropagatorError::BoundaryContamination { time, mass: m });
                            }
                        }
                        let de = packet.psi_e.iter().map(|v| v.norm_sqr()).collect();
                        let dg = packet.psi_g.iter().map(|v| v.norm_sqr()).collect();
                        let forbidden = forbidden_peak(&packet, &pc.profile, c.k0, detuning);
                        out.push((time, de, dg, probability_right(&packet), forbidden));
                    }
                    Ok(out)
                };
                run().map_err(|e| (label, e))
            })
            .collect()
    })?;
    let mut columns = vec!["t".to_string(), "z".to_string()];
    for l in &c.lengths {
        columns.push(format!("density_e_L{l}"));
        columns.push(format!("density_g_L{l}"));
    }
    let mut snaps = Vec::new();
    for r in runs {
        match r {
            Ok(s) => snaps.push(s),
            Err((point, e)) => {
                let partial = Some(Box::new(ResultTable::new(columns.clone())));
                return Err(if propagator_failure(&e) {
                    ExperimentError::Convergence { point, message: e.to_string(), partial }
                } else {
                    ExperimentError::Config(format!("{point}: {e}"))
                });
            }
        }
    }
    let mut table = ResultTable::new(columns);
    for (j, &l) in c.lengths.iter().enumerate() {
        let summary: Vec<String> = snaps[j]
            .iter()
            .map(|(t, _, _, pr, peak)| format!("t={t} P_right={pr:.6e} forbidden_peak_density={peak:.6e}"))
            .collect();
        table.push_meta(format!("summary_L{l}"), summary.join("; "));
    }
    for (s, &t) in c.snapshot_times.iter().enumerate() {
        let time = snaps[0][s].0;
        debug_assert!((time - t).abs() <= dt);
        for i in 0..grid.n {
            let mut row = vec![time, grid.z(i)];
            for run in &snaps {
                row.push(run[s].1[i]);
                row.push(run[s].2[i]);
            }
            table.push_row(row);
        }
    }
    Ok(table)
}

/// Peak total density where the repulsive dressed potential exceeds the
/// incident kinetic energy.
pub(crate) fn forbidden_peak(
    packet: &propagator::TwoChannelWavePacket,
    profile: &ModeProfile,
    k0: f64,
    detuning: f64,
) -> f64 {
    let energy = 0.5 * k0 * k0 + 0.5 * detuning;
    let grid = packet.grid;
    let n = packet.n;
    (0..grid.n)
        .filter(|&i| crate::model::rabi_frequency(profile.eval(grid.z(i)), n, detuning) > energy)
        .map(|i| packet.psi_e[i].norm_sqr() + packet.psi_g[i].norm_sqr())
        .fold(0.0, f64::max)
}

fn time_series_experiment(c: &ExperimentConfig) -> Result<ResultTable, ExperimentError> {
    let detuning = c.detunings.first().copied().unwrap_or(0.0);
    let profile = c
        .profile
        .build(c.lambda0, c.length)
        .map_err(|e| ExperimentError::Config(e.to_string()))?;
    let pc = propagation_config(c, profile.clone(), c.k0, detuning)
        .map_err(|e| ExperimentError::Config(e.to_string()))?;
    let result = propagator::propagate(&pc).map_err(|e| {
        let point = format!("L={} k0={} detuning={detuning}", c.length, c.k0);
        if propagator_failure(&e) {
            ExperimentError::Convergence { point, message: e.to_string(), partial: None }
        } else {
            ExperimentError::Config(format!("{point}: {e}"))
        }
    })?;
    let s = &result.series;
    let mut table = ResultTable::new(
        ["t", "W", "S", "envelope", "norm", "P_right", "packet_center"]
            .iter()
            .map(|c| c.to_string())
            .collect(),
    );
    if let Ok(phase) = collapse_time_estimate(&profile, c.packet_width, c.k0) {
        table.push_meta("collapse_phase_estimate", format!("{phase:.6}"));
    }
    table.push_meta("launch_z0", format!("{}", pc.z0));
    for i in 0..s.len() {
        let center = pc.z0 + c.k0 * s.t[i];
        table.push_row(vec![s.t[i], s.w[i], s.s[i], s.envelope[i], s.norm[i], s.p_right[i], center]);
    }
    Ok(table)
}
