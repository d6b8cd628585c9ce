//! Experiment configuration files.
//!
//! One `key = value` pair per line; `#` starts a comment. List values are
//! comma separated. Every key is optional:
//!
//! | key | default | meaning |
//! |---|---|---|
//! | `tables` | all six | table kinds |
//! | `deployments` | `random, grid` | deployment kinds |
//! | `chipsets` | `TR1001, CC1000, CC1010` | profile names |
//! | `extra_payload_bits` | `0, 128, ..., 896, 1023` | payload grid in bits |
//! | `seeds` | `1, ..., 7` | experiment seeds |
//! | `duration_s` | `1200` | simulated time per run |
//! | `node_count` | `50` | nodes including the gateway |
//! | `area_width_cm`, `area_height_cm` | `800`, `500` | sensing field |
//! | `range_cm` | `150` | communication range |
//! | `gateway` | `corner` | `corner` or `center` |
//! | `exclude_unreachable` | `false` | drop unreachable nodes instead of redeploying |
//! | `deployment_attempts` | `100` | random draws tried until one is connected |
//! | `slot_s` | `0.1` | slot length |
//! | `report_interval_s` | `10` | per-node report period, or `none` |
//! | `downstream_interval_s` | `none` | gateway packet period, or `none` |
//! | `payload_bytes`, `header_bytes` | `16`, `16` | fixed packet parts |
//! | `contention_window` | `16` | backoff window in micro-slots |
//! | `micro_slot_s` | `0.001` | backoff unit |
//! | `max_retries` | `5` | per-hop retries before a drop |
//! | `queue_capacity` | `32` | packets per node queue |
//! | `chipset_file` | built in | TOML profile file, relative to the config |

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::chipset::{default_profiles, find_profile, parse_profiles};
use crate::deployment::{DeploymentKind, GatewayPlacement};
use crate::energy::ChipsetProfile;
use crate::error::{Error, Result};
use crate::packet::{airtime, frame_bits, MAX_EXTRA_PAYLOAD_BITS, MAX_PAYLOAD_BYTES};
use crate::scheduling::TableKind;
use crate::sim::{CsmaConfig, TrafficConfig, DEFAULT_DURATION_S, DEFAULT_QUEUE_CAPACITY, DEFAULT_SLOT_S};
use crate::types::Area;

pub const DEFAULT_NODE_COUNT: usize = 50;
pub const DEFAULT_RANGE_CM: f64 = 150.0;
pub const DEFAULT_DEPLOYMENT_ATTEMPTS: u32 = 100;
pub const DEFAULT_PAYLOAD_GRID: [u32; 9] = [0, 128, 256, 384, 512, 640, 768, 896, 1023];

const KEYS: &[&str] = &[
    "tables",
    "deployments",
    "chipsets",
    "extra_payload_bits",
    "seeds",
    "duration_s",
    "node_count",
    "area_width_cm",
    "area_height_cm",
    "range_cm",
    "gateway",
    "exclude_unreachable",
    "deployment_attempts",
    "slot_s",
    "report_interval_s",
    "downstream_interval_s",
    "payload_bytes",
    "header_bytes",
    "contention_window",
    "micro_slot_s",
    "max_retries",
    "queue_capacity",
    "chipset_file",
];

/// Everything a sweep needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub tables: Vec<TableKind>,
    pub deployments: Vec<DeploymentKind>,
    pub chipsets: Vec<String>,
    pub extra_payload_bits: Vec<u32>,
    pub seeds: Vec<u64>,
    pub duration_s: f64,
    pub node_count: usize,
    pub area: Area,
    pub range_cm: f64,
    pub gateway: GatewayPlacement,
    pub exclude_unreachable: bool,
    pub deployment_attempts: u32,
    pub slot_s: f64,
    /// Per-run traffic; `extra_payload_bits` is set from the grid.
    pub traffic: TrafficConfig,
    pub csma: CsmaConfig,
    pub queue_capacity: usize,
    pub chipset_file: Option<PathBuf>,
    pub profiles: Vec<ChipsetProfile>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        let profiles = default_profiles();
        ExperimentSpec {
            tables: TableKind::ALL.to_vec(),
            deployments: DeploymentKind::ALL.to_vec(),
            chipsets: profiles.iter().map(|p| p.name().to_string()).collect(),
            extra_payload_bits: DEFAULT_PAYLOAD_GRID.to_vec(),
            seeds: (1..=7).collect(),
            duration_s: DEFAULT_DURATION_S,
            node_count: DEFAULT_NODE_COUNT,
            area: Area::default(),
            range_cm: DEFAULT_RANGE_CM,
            gateway: GatewayPlacement::Corner,
            exclude_unreachable: false,
            deployment_attempts: DEFAULT_DEPLOYMENT_ATTEMPTS,
            slot_s: DEFAULT_SLOT_S,
            traffic: TrafficConfig::default(),
            csma: CsmaConfig::default(),
            queue_capacity: DEFAULT_QUEUE_CAPACITY,
            chipset_file: None,
            profiles,
        }
    }
}

impl ExperimentSpec {
    /// Number of runs, one per dataset row.
    pub fn run_count(&self) -> usize {
        self.tables.len()
            * self.deployments.len()
            * self.chipsets.len()
            * self.extra_payload_bits.len()
            * self.seeds.len()
    }

    pub fn profile(&self, name: &str) -> Option<&ChipsetProfile> {
        find_profile(&self.profiles, name)
    }

    /// Checks the constraints that span several keys.
    pub fn validate(&self) -> Result<()> {
        for name in &self.chipsets {
            if self.profile(name).is_none() {
                return Err(Error::Scenario(format!("unknown chipset {name}")));
            }
        }
        let Some(&max_extra) = self.extra_payload_bits.iter().max() else {
            return Err(Error::Scenario("empty payload grid".into()));
        };
        let window = f64::from(self.csma.contention_window) * self.csma.micro_slot_s;
        if window > self.slot_s {
            return Err(Error::Scenario(format!(
                "contention window of {window} s does not fit a {} s slot",
                self.slot_s
            )));
        }
        for name in &self.chipsets {
            let p = self.profile(name).expect("checked above");
            let bits = frame_bits(
                p.preamble_bits(),
                self.traffic.header_bytes,
                self.traffic.payload_bytes,
                max_extra,
            );
            let end = f64::from(self.csma.contention_window - 1) * self.csma.micro_slot_s
                + airtime(bits, p);
            if end > self.slot_s {
                return Err(Error::Scenario(format!(
                    "{name}: a {bits}-bit frame after the longest backoff ends at {end:.6} s, past the {} s slot",
                    self.slot_s
                )));
            }
        }
        let slots = (self.duration_s / self.slot_s).round();
        if (slots * self.slot_s - self.duration_s).abs() > 1e-9 * self.duration_s {
            return Err(Error::Scenario(format!(
                "duration_s {} is not a whole number of {} s slots",
                self.duration_s, self.slot_s
            )));
        }
        Ok(())
    }
}

struct Line<'a> {
    no: usize,
    key: &'a str,
    value: &'a str,
}

impl Line<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Config {
            line: self.no,
            key: self.key.to_string(),
            message: message.into(),
        }
    }

    fn parse<T: FromStr>(&self, what: &str) -> Result<T> {
        self.value
            .parse()
            .map_err(|_| self.err(format!("expected {what}, got {:?}", self.value)))
    }

    fn list<T>(&self, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
        let items: Vec<T> = self
            .value
            .split(',')
            .map(str::trim)
            .map(|s| {
                if s.is_empty() {
                    Err(self.err("empty list item"))
                } else {
                    item(s).map_err(|e| match e {
                        Error::Config { .. } => e,
                        other => self.err(other.to_string()),
                    })
                }
            })
            .collect::<Result<_>>()?;
        if items.is_empty() {
            return Err(self.err("list must not be empty"));
        }
        Ok(items)
    }

    fn positive(&self) -> Result<f64> {
        let v: f64 = self.parse("a number")?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(self.err(format!("must be positive, got {v}")));
        }
        Ok(v)
    }

    fn interval(&self) -> Result<Option<f64>> {
        if self.value.eq_ignore_ascii_case("none") {
            Ok(None)
        } else {
            self.positive().map(Some)
        }
    }

    fn at_least(&self, min: u64) -> Result<u64> {
        let v: u64 = self.parse("a non-negative integer")?;
        if v < min {
            return Err(self.err(format!("must be at least {min}, got {v}")));
        }
        Ok(v)
    }

    fn at_most(&self, max: u64) -> Result<u64> {
        let v: u64 = self.parse("a non-negative integer")?;
        if v > max {
            return Err(self.err(format!("must be at most {max}, got {v}")));
        }
        Ok(v)
    }
}

/// Parses configuration text. A `chipset_file` is recorded but not read;
/// use [`load_config`] to resolve it.
pub fn parse_config(text: &str) -> Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::default();
    let mut seen: Vec<&str> = Vec::new();
    let (mut width, mut height) = (spec.area.width_cm(), spec.area.height_cm());
    let mut area_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Config {
                line: no,
                key: content.to_string(),
                message: "expected `key = value`".into(),
            });
        };
        let line = Line {
            no,
            key: key.trim(),
            value: value.trim(),
        };
        let Some(&key) = KEYS.iter().find(|&&k| k == line.key) else {
            return Err(line.err("unknown key"));
        };
        if seen.contains(&key) {
            return Err(line.err("key given more than once"));
        }
        seen.push(key);

        match key {
            "tables" => spec.tables = line.list(TableKind::from_str)?,
            "deployments" => spec.deployments = line.list(DeploymentKind::from_str)?,
            "chipsets" => spec.chipsets = line.list(|s| Ok(s.to_string()))?,
            "extra_payload_bits" => {
                spec.extra_payload_bits = line.list(|s| {
                    let v: u32 = s.parse().map_err(|_| line.err(format!("expected bits, got {s:?}")))?;
                    if v > MAX_EXTRA_PAYLOAD_BITS {
                        return Err(line.err(format!("{v} exceeds {MAX_EXTRA_PAYLOAD_BITS}")));
                    }
                    Ok(v)
                })?
            }
            "seeds" => {
                spec.seeds = line.list(|s| {
                    s.parse()
                        .map_err(|_| line.err(format!("expected an integer seed, got {s:?}")))
                })?
            }
            "duration_s" => spec.duration_s = line.positive()?,
            "node_count" => {
                spec.node_count = usize::try_from(line.at_least(2)?)
                    .map_err(|_| line.err("too large"))?
            }
            "area_width_cm" => {
                width = line.positive()?;
                area_line = no;
            }
            "area_height_cm" => {
                height = line.positive()?;
                area_line = no;
            }
            "range_cm" => spec.range_cm = line.positive()?,
            "gateway" => spec.gateway = line.value.parse().map_err(|e: Error| line.err(e.to_string()))?,
            "exclude_unreachable" => spec.exclude_unreachable = line.parse("true or false")?,
            "deployment_attempts" => {
                spec.deployment_attempts = u32::try_from(line.at_least(1)?)
                    .map_err(|_| line.err("too large"))?
            }
            "slot_s" => spec.slot_s = line.positive()?,
            "report_interval_s" => spec.traffic.report_interval_s = line.interval()?,
            "downstream_interval_s" => spec.traffic.downstream_interval_s = line.interval()?,
            "payload_bytes" => spec.traffic.payload_bytes = line.at_most(u64::from(MAX_PAYLOAD_BYTES))? as u32,
            "header_bytes" => spec.traffic.header_bytes = line.at_most(u64::from(u16::MAX))? as u32,
            "contention_window" => {
                spec.csma.contention_window = u32::try_from(line.at_least(1)?)
                    .map_err(|_| line.err("too large"))?
            }
            "micro_slot_s" => spec.csma.micro_slot_s = line.positive()?,
            "max_retries" => {
                spec.csma.max_retries = u32::try_from(line.at_least(0)?)
                    .map_err(|_| line.err("too large"))?
            }
            "queue_capacity" => {
                spec.queue_capacity = usize::try_from(line.at_least(1)?)
                    .map_err(|_| line.err("too large"))?
            }
            "chipset_file" => spec.chipset_file = Some(PathBuf::from(line.value)),
            _ => unreachable!("key list and match arms agree"),
        }
    }
    spec.area = Area::new(width, height).map_err(|e| Error::Config {
        line: area_line,
        key: "area".into(),
        message: e.to_string(),
    })?;
    if spec.chipset_file.is_none() {
        spec.validate()?;
    }
    Ok(spec)
}

/// Reads and parses a config file, loading its `chipset_file` if any.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut spec = parse_config(&text)?;
    if let Some(file) = &spec.chipset_file {
        let resolved = path.parent().unwrap_or(Path::new(".")).join(file);
        let text = std::fs::read_to_string(&resolved).map_err(|e| Error::io(&resolved, e))?;
        spec.profiles = parse_profiles(&text, &resolved.display().to_string())?;
        spec.chipset_file = Some(resolved);
        spec.validate()?;
    }
    Ok(spec)
}
