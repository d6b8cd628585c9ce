use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column order of the dataset CSV. This header is a stable contract.
pub const CSV_HEADER: &str = "table,deployment,chipset,extra_payload_bits,seed,total_energy_j,delivered,generated,collisions,mean_latency_frames,dropped";

/// One simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub table: String,
    pub deployment: String,
    pub chipset: String,
    pub extra_payload_bits: u32,
    pub seed: u64,
    pub total_energy_j: f64,
    pub delivered: u64,
    pub generated: u64,
    pub collisions: u64,
    pub mean_latency_frames: f64,
    pub dropped: u64,
}

/// Rows in sweep order: table, deployment, chipset, payload, then seed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub rows: Vec<Row>,
}

impl Dataset {
    pub fn write_csv_to(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if self.rows.is_empty() {
            w.write_record(CSV_HEADER.split(','))
                .map_err(|e| Error::csv("<dataset>", e))?;
        }
        for r in &self.rows {
            w.serialize(r).map_err(|e| Error::csv("<dataset>", e))?;
        }
        w.flush().map_err(|e| Error::io("<dataset>", e))
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv_from(input: impl Read, origin: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers().map_err(|e| Error::csv(origin, e))?;
        let found = header.iter().collect::<Vec<_>>().join(",");
        if found != CSV_HEADER {
            return Err(Error::Data {
                path: origin.to_string(),
                message: format!("unexpected header {found:?}"),
            });
        }
        let rows = r
            .deserialize()
            .collect::<std::result::Result<Vec<Row>, _>>()
            .map_err(|e| Error::csv(origin, e))?;
        Ok(Dataset { rows })
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv_from(file, &path.display().to_string())
    }
}

/// Seed statistics of one `(table, deployment, chipset, payload)` point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub table: String,
    pub deployment: String,
    pub chipset: String,
    pub extra_payload_bits: u32,
    pub runs: usize,
    pub mean_energy_j: f64,
    pub stddev_energy_j: f64,
}

/// Mean and sample standard deviation of `values`; the deviation of a single
/// value is 0.
pub fn mean_stddev(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Groups rows by configuration, in order of first appearance.
pub fn summarize(data: &Dataset) -> Vec<SummaryRow> {
    let mut order: Vec<(&str, &str, &str, u32)> = Vec::new();
    let mut groups: BTreeMap<(&str, &str, &str, u32), Vec<f64>> = BTreeMap::new();
    for r in &data.rows {
        let key = (r.table.as_str(), r.deployment.as_str(), r.chipset.as_str(), r.extra_payload_bits);
        groups
            .entry(key)
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(r.total_energy_j);
    }
    order
        .into_iter()
        .map(|key| {
            let values = &groups[&key];
            let (mean, sd) = mean_stddev(values);
            SummaryRow {
                table: key.0.to_string(),
                deployment: key.1.to_string(),
                chipset: key.2.to_string(),
                extra_payload_bits: key.3,
                runs: values.len(),
                mean_energy_j: mean,
                stddev_energy_j: sd,
            }
        })
        .collect()
}

pub fn write_summary_csv(summary: &[SummaryRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    for r in summary {
        w.serialize(r).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
