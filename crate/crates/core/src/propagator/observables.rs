use super::packet::TwoChannelWavePacket;
use crate::error::PropagatorError;
use crate::model::ModeProfile;
use crate::scattering::binary_entropy;

/// Internal-state observables of a packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    /// Inversion `P_e - P_g`.
    pub w: f64,
    /// Atom-field entanglement entropy in bits.
    pub s: f64,
    pub p_e: f64,
    pub p_g: f64,
}

pub fn observables(packet: &TwoChannelWavePacket) -> Observables {
    let (p_e, p_g) = packet.channel_norms();
    let total = p_e + p_g;
    let s = if total > 0.0 {
        binary_entropy((p_e / total).clamp(0.0, 1.0))
    } else {
        0.0
    };
    Observables {
        w: p_e - p_g,
        s,
        p_e,
        p_g,
    }
}

/// Mass at `z > 0`.
pub fn probability_right(packet: &TwoChannelWavePacket) -> f64 {
    mass_where(packet, |z| z > 0.0)
}

/// Mass at `z <= 0`.
pub fn probability_left(packet: &TwoChannelWavePacket) -> f64 {
    mass_where(packet, |z| z <= 0.0)
}

/// Transmitted probability: mass at `z > 0`. Meaningful once the packet has
/// left the interaction region.
pub fn transmission_from_packet(packet: &TwoChannelWavePacket) -> f64 {
    probability_right(packet).clamp(0.0, 1.0)
}

/// Mass where `lambda(z) > rel * lambda0`.
pub fn region_mass(packet: &TwoChannelWavePacket, profile: &ModeProfile, rel: f64) -> f64 {
    let threshold = rel * profile.lambda0();
    mass_where(packet, |z| profile.eval(z) > threshold)
}

/// Mass in the outer `fraction` of the grid at each end.
pub fn edge_mass(packet: &TwoChannelWavePacket, fraction: f64) -> f64 {
    let m = packet.grid.edge_points(fraction);
    let n = packet.grid.n;
    let sum: f64 = (0..m)
        .chain(n - m..n)
        .map(|i| packet.psi_e[i].norm_sqr() + packet.psi_g[i].norm_sqr())
        .sum();
    sum * packet.grid.dz()
}

/// Largest total density where `lambda(z) > rel * lambda0`.
pub fn region_peak_density(packet: &TwoChannelWavePacket, profile: &ModeProfile, rel: f64) -> f64 {
    let threshold = rel * profile.lambda0();
    packet
        .density()
        .into_iter()
        .enumerate()
        .filter(|&(i, _)| profile.eval(packet.grid.z(i)) > threshold)
        .map(|(_, rho)| rho)
        .fold(0.0, f64::max)
}

/// Length of the internal Bloch vector, `sqrt(W^2 + |2 <e|g>|^2)`.
///
/// It bounds the amplitude of the inversion oscillation: 1 for a pure
/// internal state, shrinking as different parts of the packet dephase.
pub fn bloch_length(packet: &TwoChannelWavePacket) -> f64 {
    let (p_e, p_g) = packet.channel_norms();
    let w = p_e - p_g;
    (w * w + packet.coherence().norm_sqr()).sqrt()
}

fn mass_where<F: Fn(f64) -> bool>(packet: &TwoChannelWavePacket, keep: F) -> f64 {
    let grid = packet.grid;
    let sum: f64 = (0..grid.n)
        .filter(|&i| keep(grid.z(i)))
        .map(|i| packet.psi_e[i].norm_sqr() + packet.psi_g[i].norm_sqr())
        .sum();
    sum * grid.dz()
}

/// Dephasing phase `[lambda(0) - lambda(-dz)] * L / (2 k0)` accumulated
/// across a packet of width `dz` during the entry half of the traversal.
/// Values of order `pi` signal a collapse of the Rabi oscillation.
pub fn collapse_time_estimate(
    profile: &ModeProfile,
    packet_width: f64,
    k0: f64,
) -> Result<f64, PropagatorError> {
    let waist = match profile {
        ModeProfile::Gaussian { waist, .. } | ModeProfile::Sech { waist, .. } => *waist,
        _ => return Err(PropagatorError::UnsupportedProfile),
    };
    if !(packet_width >= 0.0 && packet_width < waist) {
        return Err(PropagatorError::PacketTooWide {
            width: packet_width,
            waist,
        });
    }
    if !(k0.is_finite() && k0 > 0.0) {
        return Err(PropagatorError::InvalidConfig(format!(
            "collapse estimate needs positive momentum, got {k0}"
        )));
    }
    let spread = profile.eval(0.0) - profile.eval(-packet_width);
    Ok(spread * waist / (2.0 * k0))
}
