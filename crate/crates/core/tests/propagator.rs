use mazer::model::ModeProfile;
use mazer::propagator::{
    init_packet, observables, propagate, AutoConfig, Channel, Grid1D, SplitOperator, Status,
    TwoChannelWavePacket,
};

fn inside_meza(lambda0: f64, points: usize) -> (Grid1D, ModeProfile) {
    // grid lies entirely inside a very long flat mode
    let grid = Grid1D::new(100.0, 200.0, points).unwrap();
    (grid, ModeProfile::meza(lambda0, 1000.0).unwrap())
}

fn fidelity(a: &TwoChannelWavePacket, b: &TwoChannelWavePacket) -> f64 {
    a.overlap(b).norm_sqr()
}

#[test]
fn uniform_coupling_gives_vacuum_rabi_oscillation() {
    let lambda0 = 0.7;
    let (grid, profile) = inside_meza(lambda0, 1024);
    let mut packet = init_packet(&grid, 150.0, 5.0, 0.3, Channel::Excited).unwrap();
    let dt = 0.01;
    let mut op = SplitOperator::new(&grid, &profile, 0, 0.0, dt);
    for step in 1..=400 {
        op.step(&mut packet);
        let t = step as f64 * dt;
        let w = observables(&packet).w;
        assert!((w - (2.0 * lambda0 * t).cos()).abs() < 1e-10, "t = {t}: W = {w}");
    }
}

#[test]
fn higher_manifold_rabi_frequency_scales() {
    let lambda0 = 0.5;
    let n = 3;
    let (grid, profile) = inside_meza(lambda0, 1024);
    let mut packet = init_packet(&grid, 150.0, 5.0, 0.0, Channel::Excited).unwrap().with_manifold(n);
    let dt = 0.005;
    let mut op = SplitOperator::new(&grid, &profile, n, 0.0, dt);
    op.step_many(&mut packet, 300);
    let t = 300.0 * dt;
    let expected = (2.0 * lambda0 * 2.0 * t).cos();
    assert!((observables(&packet).w - expected).abs() < 1e-10);
}

#[test]
fn large_detuning_freezes_internal_state() {
    let (grid, profile) = inside_meza(0.1, 1024);
    let mut packet = init_packet(&grid, 150.0, 5.0, 0.2, Channel::Excited).unwrap();
    let mut op = SplitOperator::new(&grid, &profile, 0, 50.0, 1e-3);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        op.step_many(&mut packet, 10);
        worst = worst.max(observables(&packet).p_g);
    }
    assert!(worst < 1e-3, "ground population reached {worst}");
    assert!(worst > 0.0);
}

#[test]
fn backward_steps_undo_forward_steps() {
    let profile = ModeProfile::gaussian(1.0, 2.0).unwrap();
    let grid = Grid1D::centered(80.0, 1024).unwrap();
    let start = init_packet(&grid, -10.0, 3.0, 1.5, Channel::Excited).unwrap();
    let mut packet = start.clone();
    SplitOperator::new(&grid, &profile, 0, 0.3, 0.02).step_many(&mut packet, 500);
    assert!(fidelity(&packet, &start) < 0.9);
    SplitOperator::new(&grid, &profile, 0, 0.3, -0.02).step_many(&mut packet, 500);
    assert!(fidelity(&packet, &start) > 1.0 - 1e-12);
}

fn run_to(dt: f64, t: f64, grid: &Grid1D) -> TwoChannelWavePacket {
    let profile = ModeProfile::gaussian(1.0, 2.0).unwrap();
    let mut packet = init_packet(grid, -8.0, 2.0, 2.0, Channel::Excited).unwrap();
    let steps = (t / dt).round() as usize;
    SplitOperator::new(grid, &profile, 0, 0.1, dt).step_many(&mut packet, steps);
    packet
}

fn distance(a: &TwoChannelWavePacket, b: &TwoChannelWavePacket) -> f64 {
    let dz = a.grid.dz();
    a.psi_e
        .iter()
        .zip(&b.psi_e)
        .chain(a.psi_g.iter().zip(&b.psi_g))
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .mul_add(dz, 0.0)
        .sqrt()
}

#[test]
fn time_step_error_is_second_order() {
    let grid = Grid1D::centered(80.0, 1024).unwrap();
    let t = 8.0;
    let reference = run_to(0.0025, t, &grid);
    let e1 = distance(&run_to(0.04, t, &grid), &reference);
    let e2 = distance(&run_to(0.02, t, &grid), &reference);
    let e3 = distance(&run_to(0.01, t, &grid), &reference);
    let order_a = (e1 / e2).log2();
    let order_b = (e2 / e3).log2();
    assert!((order_a - 2.0).abs() < 0.15, "observed order {order_a}");
    assert!((order_b - 2.0).abs() < 0.15, "observed order {order_b}");
}

#[test]
fn refining_the_grid_leaves_observables_unchanged() {
    let t = 6.0;
    let coarse = run_to(0.005, t, &Grid1D::centered(80.0, 1024).unwrap());
    let fine = run_to(0.005, t, &Grid1D::centered(80.0, 4096).unwrap());
    let (a, b) = (observables(&coarse), observables(&fine));
    assert!((a.w - b.w).abs() < 1e-9);
    assert!((coarse.mean_position() - fine.mean_position()).abs() < 1e-9);
}

#[test]
fn zero_coupling_transmits_everything() {
    let profile = ModeProfile::gaussian(0.0, 2.0).unwrap();
    let config = AutoConfig::new(profile, 1.0, 5.0, 0.0).build().unwrap();
    let result = propagate(&config).unwrap();
    assert!(matches!(result.status, Status::Converged(_)));
    let p = result.transmission().unwrap();
    assert!((p - 1.0).abs() < 1e-8, "P = {p}");
    assert!(observables(&result.packet).w > 1.0 - 1e-12);
}

#[test]
fn fast_atoms_pass_the_cavity() {
    let profile = ModeProfile::gaussian(1.0, 10.0).unwrap();
    let config = AutoConfig::new(profile, 6.0, 10.0, 0.0).build().unwrap();
    let result = propagate(&config).unwrap();
    let p = result.transmission().unwrap();
    assert!(p > 0.99, "P = {p}");
    let last = result.series.norm.last().copied().unwrap();
    assert!((last - 1.0).abs() < 1e-10);
}

#[test]
fn slow_atoms_are_reflected_by_a_strong_field() {
    let profile = ModeProfile::gaussian(1.0, 3.0).unwrap();
    let config = AutoConfig::new(profile, 0.3, 15.0, 0.0).build().unwrap();
    assert!(config.validate().is_empty(), "{:?}", config.validate());
    let result = propagate(&config).unwrap();
    let Status::Converged(t) = result.status else { panic!("no convergence") };
    let arrival = -config.z0 / config.k0;
    assert!(t > arrival, "stopped at {t} before arrival at {arrival}");
    let p = result.transmission().unwrap();
    assert!(p > 0.3 && p < 0.7, "P = {p}");
}
