use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::config::ExperimentSpec;
use super::dataset::SummaryRow;
use super::sweep::build_topology;

/// File name of the series for one chart.
pub fn series_file_name(table: &str, deployment: &str) -> String {
    format!("{table}_{deployment}.dat")
}

fn push_unique<T: PartialEq + Copy>(v: &mut Vec<T>, x: T) {
    if !v.contains(&x) {
        v.push(x);
    }
}

/// Writes one whitespace-separated file per `(table, deployment)`: the extra
/// payload in the first column, then mean and standard deviation of total
/// energy for each chipset. Returns the paths in chart order.
pub fn emit_plot_series(summary: &[SummaryRow], out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let mut charts: Vec<(&str, &str)> = Vec::new();
    for r in summary {
        push_unique(&mut charts, (r.table.as_str(), r.deployment.as_str()));
    }
    let mut paths = Vec::with_capacity(charts.len());
    for (table, deployment) in charts {
        let rows: Vec<&SummaryRow> = summary
            .iter()
            .filter(|r| r.table == table && r.deployment == deployment)
            .collect();
        let mut chipsets: Vec<&str> = Vec::new();
        let mut payloads: Vec<u32> = Vec::new();
        for r in &rows {
            push_unique(&mut chipsets, r.chipset.as_str());
            push_unique(&mut payloads, r.extra_payload_bits);
        }
        payloads.sort_unstable();

        let mut text = format!("# table={table} deployment={deployment} total energy in joules\n# extra_payload_bits");
        for c in &chipsets {
            write!(text, " {c}_mean {c}_stddev").expect("string write");
        }
        text.push('\n');
        for bits in payloads {
            write!(text, "{bits}").expect("string write");
            for c in &chipsets {
                match rows.iter().find(|r| r.chipset == *c && r.extra_payload_bits == bits) {
                    Some(r) => write!(text, " {} {}", r.mean_energy_j, r.stddev_energy_j),
                    None => write!(text, " nan nan"),
                }
                .expect("string write");
            }
            text.push('\n');
        }
        let path = out_dir.join(series_file_name(table, deployment));
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}

/// Writes the placement and topology of every `(deployment, seed)` of a spec
/// as `topology_<deployment>_seed<seed>.txt`.
pub fn write_topology_dumps(spec: &ExperimentSpec, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut paths = Vec::new();
    for &kind in &spec.deployments {
        for &seed in &spec.seeds {
            let (d, t) = build_topology(spec, kind, seed)?;
            let path = out_dir.join(format!("topology_{kind}_seed{seed}.txt"));
            let text = format!("{}{}", d.to_placement_file(), t.dump());
            std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
            paths.push(path);
        }
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(table: &str, chipset: &str, bits: u32, mean: f64) -> SummaryRow {
        SummaryRow {
            table: table.into(),
            deployment: "grid".into(),
            chipset: chipset.into(),
            extra_payload_bits: bits,
            runs: 7,
            mean_energy_j: mean,
            stddev_energy_j: mean / 10.0,
        }
    }

    #[test]
    fn one_file_per_chart_with_a_column_pair_per_chipset() {
        let dir = tempfile::tempdir().unwrap();
        let summary = vec![
            s("x", "A", 1023, 2.5),
            s("x", "A", 0, 1.0),
            s("x", "B", 0, 3.0),
            s("x", "B", 1023, 0.1 + 0.2),
            s("v", "A", 0, 9.0),
        ];
        let paths = emit_plot_series(&summary, dir.path()).unwrap();
        let names: Vec<_> = paths.iter().map(|p| p.file_name().unwrap().to_str().unwrap()).collect();
        assert_eq!(names, ["x_grid.dat", "v_grid.dat"]);
        let text = std::fs::read_to_string(&paths[0]).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "# extra_payload_bits A_mean A_stddev B_mean B_stddev");
        assert_eq!(lines[2], "0 1 0.1 3 0.3");
        let last: Vec<f64> = lines[3].split_whitespace().map(|v| v.parse().unwrap()).collect();
        assert_eq!(last, [1023.0, 2.5, 0.25, 0.1 + 0.2, (0.1 + 0.2) / 10.0]);
    }
}
