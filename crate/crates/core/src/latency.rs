//! Displacement from inter-packet timing.
//!
//! Under a constant motor velocity `v`, the gap between two packet arrivals
//! stands in for the distance travelled: `dx ≈ v · Δt · (cos θ, sin θ, 0)`.

use crate::error::{Error, Result};
use crate::types::{Displacement, LatencyParams, SpikePacket};

/// Earliest global spike time of the packet, `None` for a silent packet.
pub fn arrival_time(packet: &SpikePacket) -> Option<f64> {
    packet
        .iter()
        .map(|(_, t)| t)
        .min_by(f64::total_cmp)
        .map(|offset| packet.arrival() + offset)
}

/// Interval between the arrivals of two packets, if both fired.
pub fn inter_packet_interval(prev: &SpikePacket, cur: &SpikePacket) -> Option<f64> {
    Some(arrival_time(cur)? - arrival_time(prev)?)
}

pub fn decode_displacement(
    delta_t: f64,
    motor_direction: f64,
    params: &LatencyParams,
) -> Result<Displacement> {
    if delta_t < 0.0 {
        return Err(Error::NegativeInterval(delta_t));
    }
    if !delta_t.is_finite() || !motor_direction.is_finite() {
        return Err(Error::param(
            "delta_t",
            "interval and direction must be finite",
        ));
    }
    let dist = params.assumed_velocity() * delta_t;
    Ok(Displacement {
        dx: dist * motor_direction.cos(),
        dy: dist * motor_direction.sin(),
        dz: 0.0,
    })
}
