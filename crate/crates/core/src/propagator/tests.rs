use super::*;
use approx::assert_abs_diff_eq;

fn fig8_like() -> PropagationConfig {
    AutoConfig {
        termination: None,
        ..AutoConfig::new(ModeProfile::gaussian(1.0, 10.0).unwrap(), 6.0, 10.0, 0.0)
    }
    .build()
    .unwrap()
}

#[test]
fn auto_config_passes_validation() {
    let c = fig8_like();
    assert!(c.validate().is_empty(), "{:?}", c.validate());
    assert!(c.z0 < 0.0 && c.packet_width < c.z0.abs() / 3.0);
}

#[test]
fn zero_duration_returns_initial_packet() {
    let mut c = fig8_like();
    c.t_max = 0.0;
    let initial = init_packet(&c.grid().unwrap(), c.z0, c.packet_width, c.k0, c.channel).unwrap();
    let r = propagate(&c).unwrap();
    assert_eq!(r.steps, 0);
    assert_eq!(r.packet, initial);
    assert_eq!(r.series.len(), 1);
}

#[test]
fn wide_packet_triggers_placement_diagnostic() {
    let mut c = fig8_like();
    c.packet_width = c.z0.abs() / 2.0;
    let d = c.validate();
    assert!(d.iter().any(|d| d.rule == "placement-width"), "{d:?}");
}

#[test]
fn coarse_time_step_diagnostic_suggests_bound() {
    let mut c = fig8_like();
    c.dt = 0.2;
    let d = c.validate();
    let kinetic = d.iter().find(|d| d.rule == "stability-kinetic").expect("kinetic diagnostic");
    let lim = c.limits();
    let suggested = 1.0 / (lim.k_max * lim.k_max);
    assert!(kinetic.message.contains(&format!("{suggested:.6e}")), "{}", kinetic.message);
}

#[test]
fn launch_inside_coupling_is_flagged() {
    let mut c = fig8_like();
    c.z0 = -5.0;
    assert!(c.validate().iter().any(|d| d.rule == "placement-coupling"));
}

#[test]
fn time_series_tracks_norm_split() {
    let mut c = fig8_like();
    c.t_max = 5.0;
    let r = propagate(&c).unwrap();
    for i in 0..r.series.len() {
        assert_abs_diff_eq!(r.series.p_left[i] + r.series.p_right[i], r.series.norm[i], epsilon = 1e-13);
        assert_abs_diff_eq!(r.series.norm[i], 1.0, epsilon = 1e-10);
    }
    assert_eq!(r.transmission(), Err(PropagatorError::NotConverged(r.time)));
}
