//! Chipset profile files.
//!
//! A profile file is TOML with one `[[chipset]]` table per radio:
//!
//! ```toml
//! [[chipset]]
//! name = "TR1001"
//! voltage_v = 3.0
//! i_tx_ma = 12.0
//! i_rx_ma = 3.8
//! i_listen_ma = 3.8
//! i_sleep_ma = 0.0007
//! bitrate_bps = 19200
//! preamble_bits = 32
//! ```

use serde::Deserialize;

use crate::energy::ChipsetProfile;
use crate::error::{Error, Result};

const DEFAULT_PROFILES: &str = include_str!("../data/chipsets.toml");

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileFile {
    chipset: Vec<ProfileRecord>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileRecord {
    name: String,
    voltage_v: f64,
    i_tx_ma: f64,
    i_rx_ma: f64,
    i_listen_ma: f64,
    i_sleep_ma: f64,
    bitrate_bps: f64,
    preamble_bits: u32,
}

impl TryFrom<ProfileRecord> for ChipsetProfile {
    type Error = Error;

    fn try_from(r: ProfileRecord) -> Result<Self> {
        ChipsetProfile::new(
            r.name,
            r.voltage_v,
            [r.i_tx_ma, r.i_rx_ma, r.i_listen_ma, r.i_sleep_ma],
            r.bitrate_bps,
            r.preamble_bits,
        )
    }
}

/// Parses a profile file. `origin` names the source in error messages.
pub fn parse_profiles(text: &str, origin: &str) -> Result<Vec<ChipsetProfile>> {
    let file: ProfileFile = toml::from_str(text).map_err(|e| Error::Data {
        path: origin.to_string(),
        message: e.to_string(),
    })?;
    let profiles = file
        .chipset
        .into_iter()
        .map(ChipsetProfile::try_from)
        .collect::<Result<Vec<_>>>()?;
    for (i, p) in profiles.iter().enumerate() {
        if profiles[..i].iter().any(|q| q.name() == p.name()) {
            return Err(Error::Data {
                path: origin.to_string(),
                message: format!("duplicate chipset name {}", p.name()),
            });
        }
    }
    Ok(profiles)
}

/// The shipped TR1001, CC1000 and CC1010 profiles.
pub fn default_profiles() -> Vec<ChipsetProfile> {
    parse_profiles(DEFAULT_PROFILES, "built-in chipsets.toml").expect("built-in profiles are valid")
}

pub fn find_profile<'a>(profiles: &'a [ChipsetProfile], name: &str) -> Option<&'a ChipsetProfile> {
    profiles
        .iter()
        .find(|p| p.name().eq_ignore_ascii_case(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::RadioState;

    #[test]
    fn defaults_are_strictly_ordered_by_current() {
        let p = default_profiles();
        let names: Vec<_> = p.iter().map(|p| p.name()).collect();
        assert_eq!(names, ["TR1001", "CC1000", "CC1010"]);
        assert!(p[0].dominated_by(&p[1]));
        assert!(p[1].dominated_by(&p[2]));
        for w in p.windows(2) {
            assert_eq!(w[0].bitrate_bps(), w[1].bitrate_bps());
            assert_eq!(w[0].preamble_bits(), w[1].preamble_bits());
        }
        assert_eq!(p[0].bitrate_bps(), 19_200.0);
        assert_eq!(p[0].preamble_bits(), 32);
    }

    #[test]
    fn lookup_is_case_insensitive() {
        let p = default_profiles();
        assert_eq!(find_profile(&p, "cc1000").unwrap().name(), "CC1000");
        assert!(find_profile(&p, "nRF24").is_none());
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let base = "[[chipset]]\nname = \"a\"\nvoltage_v = 3.0\ni_tx_ma = 5.0\ni_rx_ma = 4.0\n\
                    i_listen_ma = 3.0\ni_sleep_ma = 0.1\nbitrate_bps = 1000\npreamble_bits = 8\n";
        let p = parse_profiles(base, "t").unwrap();
        assert_eq!(p[0].current_ma(RadioState::Listen), 3.0);

        assert!(parse_profiles(&format!("{base}colour = 1\n"), "t").is_err());
        assert!(parse_profiles(&base.replace("0.1", "3.5"), "t").is_err());
        assert!(parse_profiles(&format!("{base}{base}"), "t").is_err());
        assert!(parse_profiles("[[chipset]]\nname = \"a\"\n", "t").is_err());
    }
}
