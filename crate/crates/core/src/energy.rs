//! Radio states, chipset electrical profiles and per-node energy bookkeeping.
//!
//! Only the radio is accounted for. A node's energy is the integral of
//! `supply_voltage * current(state)` over the time spent in each state.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RadioState {
    Transmit,
    Receive,
    Listen,
    Sleep,
}

impl RadioState {
    pub const ALL: [RadioState; 4] = [
        RadioState::Transmit,
        RadioState::Receive,
        RadioState::Listen,
        RadioState::Sleep,
    ];

    pub const fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for RadioState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            RadioState::Transmit => "transmit",
            RadioState::Receive => "receive",
            RadioState::Listen => "listen",
            RadioState::Sleep => "sleep",
        };
        f.write_str(name)
    }
}

/// Electrical and framing parameters of one radio chipset.
#[derive(Debug, Clone, PartialEq)]
pub struct ChipsetProfile {
    name: String,
    supply_voltage: f64,
    current_ma: [f64; 4],
    bitrate_bps: f64,
    preamble_bits: u32,
}

impl ChipsetProfile {
    /// Builds a profile, checking `0 <= sleep < listen <= receive <= transmit`
    /// and a positive bitrate.
    pub fn new(
        name: impl Into<String>,
        supply_voltage: f64,
        current_ma: [f64; 4],
        bitrate_bps: f64,
        preamble_bits: u32,
    ) -> Result<Self> {
        let name = name.into();
        let invalid = |msg: String| Error::InvalidArgument(format!("chipset {name}: {msg}"));
        if !(supply_voltage > 0.0 && supply_voltage.is_finite()) {
            return Err(invalid(format!("supply voltage {supply_voltage} must be positive")));
        }
        if current_ma.iter().any(|i| !(i.is_finite() && *i >= 0.0)) {
            return Err(invalid("currents must be finite and non-negative".into()));
        }
        let [tx, rx, listen, sleep] = current_ma;
        if !(sleep < listen && listen <= rx && rx <= tx) {
            return Err(invalid(format!(
                "currents must satisfy sleep < listen <= receive <= transmit \
                 (got {sleep} / {listen} / {rx} / {tx} mA)"
            )));
        }
        if !(bitrate_bps > 0.0 && bitrate_bps.is_finite()) {
            return Err(invalid(format!("bitrate {bitrate_bps} must be positive")));
        }
        Ok(ChipsetProfile {
            name,
            supply_voltage,
            current_ma,
            bitrate_bps,
            preamble_bits,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn supply_voltage(&self) -> f64 {
        self.supply_voltage
    }

    pub fn current_ma(&self, state: RadioState) -> f64 {
        self.current_ma[state.index()]
    }

    pub fn bitrate_bps(&self) -> f64 {
        self.bitrate_bps
    }

    pub fn preamble_bits(&self) -> u32 {
        self.preamble_bits
    }

    /// True if every state draws strictly less current than in `other`
    /// at the same voltage.
    pub fn dominated_by(&self, other: &ChipsetProfile) -> bool {
        self.supply_voltage == other.supply_voltage
            && RadioState::ALL
                .iter()
                .all(|&s| self.current_ma(s) < other.current_ma(s))
    }
}

/// Instantaneous power in watts.
pub fn power_draw(profile: &ChipsetProfile, state: RadioState) -> f64 {
    profile.supply_voltage * profile.current_ma(state) / 1000.0
}

/// Time spent in each radio state and the energy that time cost.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyAccount {
    state_durations: [f64; 4],
    energy_joules: f64,
}

impl EnergyAccount {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn accumulate(
        &mut self,
        state: RadioState,
        duration_s: f64,
        profile: &ChipsetProfile,
    ) -> Result<()> {
        if duration_s.is_nan() || duration_s < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "duration must be non-negative, got {duration_s}"
            )));
        }
        self.add(state, duration_s, profile);
        Ok(())
    }

    /// Unchecked accumulation for the simulator hot path, where durations
    /// are non-negative by construction.
    #[inline]
    pub(crate) fn add(&mut self, state: RadioState, duration_s: f64, profile: &ChipsetProfile) {
        debug_assert!(duration_s >= 0.0);
        self.state_durations[state.index()] += duration_s;
        self.energy_joules += power_draw(profile, state) * duration_s;
    }

    pub fn duration(&self, state: RadioState) -> f64 {
        self.state_durations[state.index()]
    }

    pub fn energy_joules(&self) -> f64 {
        self.energy_joules
    }

    pub fn elapsed(&self) -> f64 {
        self.state_durations.iter().sum()
    }

    /// Energy recomputed from the state durations alone.
    pub fn energy_from_durations(&self, profile: &ChipsetProfile) -> f64 {
        RadioState::ALL
            .iter()
            .map(|&s| power_draw(profile, s) * self.duration(s))
            .sum()
    }
}
