//! Split-operator wave-packet dynamics of the two-channel atom-cavity system
//! for arbitrary mode profiles and detunings.

mod grid;
mod observables;
mod packet;
mod split;

use std::f64::consts::PI;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

pub use grid::{Grid1D, MIN_POINTS};
pub use observables::{
    bloch_length, collapse_time_estimate, edge_mass, observables, probability_left,
    probability_right, region_mass, region_peak_density, transmission_from_packet, Observables,
};
pub use packet::{gaussian_tail_outside, init_packet, Channel, TwoChannelWavePacket, TAIL_TOLERANCE};
pub use split::{step, SplitOperator};

use crate::error::PropagatorError;
use crate::model::{rabi_frequency, ModeProfile};
use crate::output::format_row;

/// Coupling ratio `lambda(z0) / lambda0` below which the launch point counts
/// as outside the interaction region.
pub const LAUNCH_COUPLING_RATIO: f64 = 1e-8;
/// Maximum `dt * omega_max`.
pub const RABI_PHASE_LIMIT: f64 = 0.05;
/// Maximum `dt * k_max^2 / 2`.
pub const KINETIC_PHASE_LIMIT: f64 = 0.5;
/// Grid points per shortest de Broglie wavelength.
pub const POINTS_PER_WAVELENGTH: f64 = 8.0;
/// Grid points per profile length scale.
pub const POINTS_PER_PROFILE_LENGTH: f64 = 4.0;

/// Resolution requirements of a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionLimits {
    /// Largest local momentum reached by the packet (launch spread of six
    /// standard deviations plus the energy released by coupling and detuning).
    pub k_max: f64,
    /// Peak generalized Rabi frequency.
    pub omega_max: f64,
    pub dz_max: f64,
    pub dt_max: f64,
}

impl ResolutionLimits {
    pub fn new(profile: &ModeProfile, n: u32, detuning: f64, k0: f64, packet_width: f64) -> Self {
        let sigma_k = 0.5 / packet_width;
        let k_launch = k0.abs() + 6.0 * sigma_k;
        let omega_max = rabi_frequency(profile.lambda0(), n, detuning);
        let k_max = (k_launch * k_launch + detuning.abs() + 2.0 * omega_max).sqrt();
        let dz_max = (2.0 * PI / (POINTS_PER_WAVELENGTH * k_max))
            .min(profile.length_scale() / POINTS_PER_PROFILE_LENGTH);
        let rabi_dt = if omega_max > 0.0 {
            RABI_PHASE_LIMIT / omega_max
        } else {
            f64::INFINITY
        };
        let dt_max = rabi_dt.min(2.0 * KINETIC_PHASE_LIMIT / (k_max * k_max));
        Self {
            k_max,
            omega_max,
            dz_max,
            dt_max,
        }
    }
}

/// Stopping rule standing in for `t -> infinity`: the interaction region is
/// (nearly) empty and the transmitted mass has stopped changing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Termination {
    /// Region is `lambda(z) > region_rel * lambda0`.
    pub region_rel: f64,
    /// Maximum mass left in the region.
    pub region_tol: f64,
    /// Maximum `|dP_right/dt|`.
    pub stationarity_tol: f64,
    /// Time between checks.
    pub check_interval: f64,
    /// Earliest time the predicate may fire; before the packet has reached
    /// the region an empty region and a constant `P_right` mean nothing.
    #[serde(default)]
    pub min_time: f64,
}

impl Default for Termination {
    fn default() -> Self {
        Self {
            region_rel: 1e-6,
            region_tol: 1e-6,
            stationarity_tol: 1e-8,
            check_interval: 10.0,
            min_time: 0.0,
        }
    }
}

/// Edge-mass guard against wrap-around on the periodic grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryGuard {
    /// Fraction of the grid at each end.
    pub fraction: f64,
    pub tolerance: f64,
}

impl Default for BoundaryGuard {
    fn default() -> Self {
        Self {
            fraction: 0.05,
            tolerance: 1e-6,
        }
    }
}

/// Complete description of one propagation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagationConfig {
    pub profile: ModeProfile,
    /// Manifold index.
    pub n: u32,
    pub detuning: f64,
    pub k0: f64,
    pub packet_width: f64,
    pub z0: f64,
    pub channel: Channel,
    pub z_min: f64,
    pub z_max: f64,
    pub points: usize,
    pub dt: f64,
    pub t_max: f64,
    /// Steps between time-series samples.
    pub sample_stride: usize,
    /// Steps between density snapshots; zero disables them.
    pub snapshot_stride: usize,
    pub termination: Option<Termination>,
    pub boundary: Option<BoundaryGuard>,
}

/// Inputs from which [`PropagationConfig`] derives grid, step and launch.
#[derive(Debug, Clone, PartialEq)]
pub struct AutoConfig {
    pub profile: ModeProfile,
    pub n: u32,
    pub detuning: f64,
    pub k0: f64,
    pub packet_width: f64,
    pub channel: Channel,
    /// Horizon; `None` picks twice the crossing time at `k0`.
    pub t_max: Option<f64>,
    /// Launch distance from the interaction region in packet widths.
    pub launch_widths: f64,
    /// Fastest launch momentum, in momentum standard deviations above `k0`,
    /// that must stay clear of the grid edges up to `t_max`.
    pub reach_sigmas: f64,
    /// Target time between series samples.
    pub sample_interval: f64,
    pub termination: Option<Termination>,
}

impl AutoConfig {
    pub fn new(profile: ModeProfile, k0: f64, packet_width: f64, detuning: f64) -> Self {
        Self {
            profile,
            n: 0,
            detuning,
            k0,
            packet_width,
            channel: Channel::Excited,
            t_max: None,
            launch_widths: 6.0,
            reach_sigmas: 5.0,
            sample_interval: 1.0,
            termination: Some(Termination::default()),
        }
    }

    pub fn build(&self) -> Result<PropagationConfig, PropagatorError> {
        self.profile.validate()?;
        let (k0, width) = (self.k0, self.packet_width);
        if !(k0.is_finite() && k0 > 0.0 && width.is_finite() && width > 0.0) {
            return Err(PropagatorError::InvalidConfig(format!(
                "automatic setup needs positive k0 and packet width (k0 = {k0}, dz = {width})"
            )));
        }
        if !self.detuning.is_finite() {
            return Err(PropagatorError::InvalidConfig("detuning must be finite".into()));
        }
        let limits = ResolutionLimits::new(&self.profile, self.n, self.detuning, k0, width);
        let (lo, hi) = self.profile.interaction_interval(LAUNCH_COUPLING_RATIO);
        let z0 = lo.min(0.0) - self.launch_widths * width;
        let crossing = (hi.max(0.0) - z0) + self.launch_widths * width;
        let t_max = self.t_max.unwrap_or(2.0 * crossing / k0);
        if !(t_max.is_finite() && t_max >= 0.0) {
            return Err(PropagatorError::InvalidConfig(format!("bad horizon {t_max}")));
        }
        let k_fast = k0 + self.reach_sigmas * 0.5 / width;
        let k_out = (k_fast * k_fast + 2.0 * self.detuning.abs()).sqrt();
        let reach = k_out * t_max;
        let margin = 6.0 * width;
        let right = (hi.max(0.0) + margin).max(z0 + reach + margin);
        let left = (z0 - margin).min(-(reach + z0) - margin);
        // edge bands of 5% on both sides stay clear
        let pad = 0.05 / 0.9 * (right - left);
        let grid = Grid1D::covering(left - pad, right + pad, limits.dz_max)?;
        let steps = (t_max / limits.dt_max).ceil().max(1.0);
        let dt = if t_max > 0.0 { t_max / steps } else { limits.dt_max };
        let sample_stride = ((self.sample_interval / dt).round() as usize).max(1);
        Ok(PropagationConfig {
            profile: self.profile.clone(),
            n: self.n,
            detuning: self.detuning,
            k0,
            packet_width: width,
            z0,
            channel: self.channel,
            z_min: grid.z_min,
            z_max: grid.z_max,
            points: grid.n,
            dt,
            t_max,
            sample_stride,
            snapshot_stride: 0,
            termination: self.termination.map(|t| Termination {
                min_time: t.min_time.max(crossing / k0),
                ..t
            }),
            boundary: Some(BoundaryGuard::default()),
        })
    }
}

/// A violated resolution, stability or placement rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub rule: &'static str,
    pub message: String,
}

impl PropagationConfig {
    pub fn grid(&self) -> Result<Grid1D, PropagatorError> {
        Grid1D::new(self.z_min, self.z_max, self.points)
    }

    pub fn limits(&self) -> ResolutionLimits {
        ResolutionLimits::new(&self.profile, self.n, self.detuning, self.k0, self.packet_width)
    }

    pub fn total_steps(&self) -> usize {
        if self.t_max <= 0.0 {
            0
        } else {
            (self.t_max / self.dt - 1e-9).ceil() as usize
        }
    }

    /// Checks every rule without running; an empty list means the run is
    /// expected to be accurate.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut push = |rule: &'static str, message: String| out.push(Diagnostic { rule, message });
        if let Err(e) = self.profile.validate() {
            push("profile", e.to_string());
            return out;
        }
        let grid = match self.grid() {
            Ok(g) => g,
            Err(e) => {
                push("grid", e.to_string());
                return out;
            }
        };
        if !(self.dt.is_finite() && self.dt > 0.0) {
            push("time-step", format!("time step must be positive, got {}", self.dt));
            return out;
        }
        if !(self.t_max.is_finite() && self.t_max >= 0.0) {
            push("horizon", format!("horizon must be non-negative, got {}", self.t_max));
        }
        if !(self.packet_width.is_finite() && self.packet_width > 0.0) {
            push("packet", format!("packet width must be positive, got {}", self.packet_width));
            return out;
        }
        if self.sample_stride == 0 {
            push("sampling", "sample stride must be at least one step".into());
        }
        let lim = self.limits();
        if self.dt * lim.omega_max > RABI_PHASE_LIMIT {
            push(
                "stability-rabi",
                format!(
                    "dt * omega_max = {:.3e} exceeds {RABI_PHASE_LIMIT}; use dt <= {:.6e}",
                    self.dt * lim.omega_max,
                    RABI_PHASE_LIMIT / lim.omega_max
                ),
            );
        }
        if 0.5 * self.dt * lim.k_max * lim.k_max > KINETIC_PHASE_LIMIT {
            push(
                "stability-kinetic",
                format!(
                    "dt * k_max^2 / 2 = {:.3e} exceeds {KINETIC_PHASE_LIMIT} for k_max = {:.6e}; use dt <= {:.6e}",
                    0.5 * self.dt * lim.k_max * lim.k_max,
                    lim.k_max,
                    2.0 * KINETIC_PHASE_LIMIT / (lim.k_max * lim.k_max)
                ),
            );
        }
        let dz = grid.dz();
        let wavelength_dz = 2.0 * PI / (POINTS_PER_WAVELENGTH * lim.k_max);
        if dz > wavelength_dz {
            push(
                "resolution-wavelength",
                format!("dz = {dz:.4e} exceeds {wavelength_dz:.4e} for k_max = {:.4e}", lim.k_max),
            );
        }
        let profile_dz = self.profile.length_scale() / POINTS_PER_PROFILE_LENGTH;
        if dz > profile_dz {
            push(
                "resolution-profile",
                format!("dz = {dz:.4e} exceeds profile length / {POINTS_PER_PROFILE_LENGTH} = {profile_dz:.4e}"),
            );
        }
        let lambda0 = self.profile.lambda0();
        if lambda0 > 0.0 && self.profile.eval(self.z0) / lambda0 >= LAUNCH_COUPLING_RATIO {
            push(
                "placement-coupling",
                format!(
                    "coupling at launch z0 = {} is {:.3e} of its peak (must be below {LAUNCH_COUPLING_RATIO:e})",
                    self.z0,
                    self.profile.eval(self.z0) / lambda0
                ),
            );
        }
        if self.packet_width >= self.z0.abs() / 3.0 {
            push(
                "placement-width",
                format!(
                    "packet width {} is not below |z0| / 3 = {}",
                    self.packet_width,
                    self.z0.abs() / 3.0
                ),
            );
        }
        let tail = gaussian_tail_outside(&grid, self.z0, self.packet_width);
        if tail > TAIL_TOLERANCE {
            push("placement-grid", format!("{tail:.3e} of the packet starts outside the grid"));
        }
        out
    }
}

/// Samples of internal-state and spatial observables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeSeries {
    pub t: Vec<f64>,
    pub w: Vec<f64>,
    pub s: Vec<f64>,
    pub norm: Vec<f64>,
    pub p_right: Vec<f64>,
    pub p_left: Vec<f64>,
    /// Bloch vector length, the envelope of the inversion oscillation.
    pub envelope: Vec<f64>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    fn record(&mut self, t: f64, packet: &TwoChannelWavePacket) {
        let obs = observables(packet);
        let right = probability_right(packet);
        let left = probability_left(packet);
        self.t.push(t);
        self.w.push(obs.w);
        self.s.push(obs.s);
        self.norm.push(obs.p_e + obs.p_g);
        self.p_right.push(right);
        self.p_left.push(left);
        self.envelope.push(bloch_length(packet));
    }

    /// CSV with columns `t,W,S,norm,P_right`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "t,W,S,norm,P_right")?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{}",
                format_row(&[self.t[i], self.w[i], self.s[i], self.norm[i], self.p_right[i]])
            )?;
        }
        Ok(())
    }
}

/// Channel densities at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub density_e: Vec<f64>,
    pub density_g: Vec<f64>,
}

impl Snapshot {
    pub fn of(t: f64, packet: &TwoChannelWavePacket) -> Self {
        Self {
            t,
            density_e: packet.psi_e.iter().map(|c| c.norm_sqr()).collect(),
            density_g: packet.psi_g.iter().map(|c| c.norm_sqr()).collect(),
        }
    }
}

/// CSV with columns `t,z,density_e,density_g`, one block per snapshot.
pub fn write_snapshots_csv<W: Write>(grid: &Grid1D, snapshots: &[Snapshot], out: &mut W) -> io::Result<()> {
    writeln!(out, "t,z,density_e,density_g")?;
    for snap in snapshots {
        for i in 0..grid.n {
            writeln!(
                out,
                "{}",
                format_row(&[snap.t, grid.z(i), snap.density_e[i], snap.density_g[i]])
            )?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Status {
    /// Termination predicate fired at this time.
    Converged(f64),
    /// Ran to the horizon.
    Horizon,
}

#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub packet: TwoChannelWavePacket,
    pub series: TimeSeries,
    pub snapshots: Vec<Snapshot>,
    pub status: Status,
    pub time: f64,
    pub steps: usize,
}

impl PropagationResult {
    /// Asymptotic transmission; an error unless the termination predicate
    /// fired.
    pub fn transmission(&self) -> Result<f64, PropagatorError> {
        match self.status {
            Status::Converged(_) => Ok(transmission_from_packet(&self.packet)),
            Status::Horizon => Err(PropagatorError::NotConverged(self.time)),
        }
    }
}

/// Launches the configured packet and evolves it.
pub fn propagate(config: &PropagationConfig) -> Result<PropagationResult, PropagatorError> {
    let grid = config.grid()?;
    let packet = init_packet(&grid, config.z0, config.packet_width, config.k0, config.channel)?
        .with_manifold(config.n);
    propagate_packet(config, packet)
}

/// Evolves a given packet under the configured dynamics.
pub fn propagate_packet(
    config: &PropagationConfig,
    mut packet: TwoChannelWavePacket,
) -> Result<PropagationResult, PropagatorError> {
    let grid = config.grid()?;
    if packet.grid != grid {
        return Err(PropagatorError::InvalidConfig("packet grid differs from config grid".into()));
    }
    if !(config.dt.is_finite() && config.dt > 0.0) {
        return Err(PropagatorError::InvalidConfig(format!("time step must be positive, got {}", config.dt)));
    }
    if !(config.t_max.is_finite() && config.t_max >= 0.0) {
        return Err(PropagatorError::InvalidConfig(format!("horizon must be non-negative, got {}", config.t_max)));
    }
    config.profile.validate()?;
    let total = config.total_steps();
    let sample_stride = config.sample_stride.max(1);
    let check_stride = config
        .termination
        .map(|t| ((t.check_interval / config.dt).round() as usize).max(1))
        .unwrap_or(usize::MAX);
    let mut op = SplitOperator::new(&grid, &config.profile, packet.n, config.detuning, config.dt);
    let mut series = TimeSeries::default();
    let mut snapshots = Vec::new();
    series.record(0.0, &packet);
    if config.snapshot_stride > 0 {
        snapshots.push(Snapshot::of(0.0, &packet));
    }
    let mut done = 0usize;
    let mut status = Status::Horizon;
    let mut last_check: Option<(f64, f64)> = None;
    while done < total {
        let mut next = (done / sample_stride + 1) * sample_stride;
        if let Some(q) = done.checked_div(config.snapshot_stride) {
            next = next.min((q + 1) * config.snapshot_stride);
        }
        if check_stride != usize::MAX {
            next = next.min((done / check_stride + 1) * check_stride);
        }
        let chunk = next.min(total) - done;
        op.step_many(&mut packet, chunk);
        done += chunk;
        let t = done as f64 * config.dt;
        let last = done == total;
        if done.is_multiple_of(sample_stride) || last {
            series.record(t, &packet);
        }
        if config.snapshot_stride > 0 && (done.is_multiple_of(config.snapshot_stride) || last) {
            snapshots.push(Snapshot::of(t, &packet));
        }
        let checking = done.is_multiple_of(check_stride) || last;
        if checking || (config.termination.is_none() && done.is_multiple_of(sample_stride)) {
            if let Some(guard) = config.boundary {
                let mass = edge_mass(&packet, guard.fraction);
                if mass > guard.tolerance {
                    return Err(PropagatorError::BoundaryContamination { time: t, mass });
                }
            }
        }
        if let (Some(term), true) = (config.termination, checking) {
            let right = probability_right(&packet);
            let region = region_mass(&packet, &config.profile, term.region_rel);
            if let Some((t_prev, right_prev)) = last_check {
                let rate = (right - right_prev).abs() / (t - t_prev);
                if t >= term.min_time && region < term.region_tol && rate < term.stationarity_tol {
                    status = Status::Converged(t);
                    if !last && !done.is_multiple_of(sample_stride) {
                        series.record(t, &packet);
                    }
                    break;
                }
            }
            last_check = Some((t, right));
        }
    }
    Ok(PropagationResult {
        packet,
        series,
        snapshots,
        status,
        time: done as f64 * config.dt,
        steps: done,
    })
}

#[cfg(test)]
mod tests;
