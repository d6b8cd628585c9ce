use serde::{Deserialize, Serialize};

use crate::energy::ChipsetProfile;
use crate::error::{Error, Result};
use crate::types::NodeId;

pub const MAX_PAYLOAD_BYTES: u32 = 127;
pub const MAX_EXTRA_PAYLOAD_BITS: u32 = 1023;
pub const DEFAULT_HEADER_BYTES: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Upstream,
    Downstream,
    Broadcast,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Upstream => "upstream",
            Direction::Downstream => "downstream",
            Direction::Broadcast => "broadcast",
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One MAC frame as generated by its source.
#[derive(Debug, Clone, PartialEq)]
pub struct Packet {
    pub src: NodeId,
    pub origin_zone: u32,
    pub direction: Direction,
    pub header_bytes: u32,
    pub payload_bytes: u32,
    pub extra_payload_bits: u32,
    pub created_at: f64,
}

impl Packet {
    /// Checks the payload bounds.
    pub fn validate(&self) -> Result<()> {
        check_payload(self.payload_bytes, self.extra_payload_bits)
    }
}

pub(crate) fn check_payload(payload_bytes: u32, extra_payload_bits: u32) -> Result<()> {
    if payload_bytes > MAX_PAYLOAD_BYTES {
        return Err(Error::InvalidArgument(format!(
            "payload of {payload_bytes} bytes exceeds {MAX_PAYLOAD_BYTES}"
        )));
    }
    if extra_payload_bits > MAX_EXTRA_PAYLOAD_BITS {
        return Err(Error::InvalidArgument(format!(
            "extra payload of {extra_payload_bits} bits exceeds {MAX_EXTRA_PAYLOAD_BITS}"
        )));
    }
    Ok(())
}

/// On-air size: preamble, header and payload bytes, plus the extra payload bits.
pub fn packet_bits(pkt: &Packet, profile: &ChipsetProfile) -> u64 {
    frame_bits(
        profile.preamble_bits(),
        pkt.header_bytes,
        pkt.payload_bytes,
        pkt.extra_payload_bits,
    )
}

pub(crate) fn frame_bits(preamble: u32, header: u32, payload: u32, extra: u32) -> u64 {
    u64::from(preamble) + 8 * (u64::from(header) + u64::from(payload)) + u64::from(extra)
}

/// Seconds on air at the profile's bitrate.
pub fn airtime(bits: u64, profile: &ChipsetProfile) -> f64 {
    bits as f64 / profile.bitrate_bps()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile() -> ChipsetProfile {
        ChipsetProfile::new("p", 3.0, [10.0, 5.0, 4.0, 0.0], 19_200.0, 32).unwrap()
    }

    fn pkt(payload: u32, extra: u32) -> Packet {
        Packet {
            src: NodeId(1),
            origin_zone: 1,
            direction: Direction::Upstream,
            header_bytes: 16,
            payload_bytes: payload,
            extra_payload_bits: extra,
            created_at: 0.0,
        }
    }

    #[test]
    fn bit_counts() {
        assert_eq!(packet_bits(&pkt(0, 0), &profile()), 160);
        assert_eq!(packet_bits(&pkt(127, 1023), &profile()), 2199);
    }

    #[test]
    fn extra_bits_add_exactly() {
        let base = packet_bits(&pkt(20, 0), &profile());
        for k in [1, 7, 128, 1023] {
            assert_eq!(packet_bits(&pkt(20, k), &profile()), base + u64::from(k));
        }
    }

    #[test]
    fn payload_bounds() {
        assert!(pkt(127, 1023).validate().is_ok());
        assert!(pkt(128, 0).validate().is_err());
        assert!(pkt(0, 1024).validate().is_err());
    }

    /// Decimal expansion of `num / den` by schoolbook long division.
    fn long_division(mut num: u64, den: u64, digits: usize) -> String {
        let mut out = format!("{}.", num / den);
        num %= den;
        for _ in 0..digits {
            if num == 0 {
                break;
            }
            num *= 10;
            out.push(char::from(b'0' + (num / den) as u8));
            num %= den;
        }
        out
    }

    #[test]
    fn airtime_values() {
        let p = profile();
        assert_eq!(airtime(19_200, &p), 1.0);
        assert_eq!(airtime(0, &p), 0.0);

        let exact = long_division(2199, 19_200, 30);
        assert_eq!(exact, "0.11453125");
        let expected: f64 = exact.parse().unwrap();
        assert!((airtime(2199, &p) - expected).abs() <= f64::EPSILON * expected);
    }
}
