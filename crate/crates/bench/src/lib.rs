//! Shared fixtures for the criterion benchmarks.

use wsn_sched_core::*;

/// The default 50-node field of `kind`, connected at 150 cm.
pub fn field(kind: DeploymentKind) -> Topology {
    let spec = ExperimentSpec::default();
    harness::build_topology(&spec, kind, 1)
        .expect("default fields connect")
        .1
}

/// One default-traffic run of `duration_s` seconds.
pub fn scenario(table: TableKind, deployment: DeploymentKind, duration_s: f64) -> Scenario {
    let profile = find_profile(&default_profiles(), "CC1000")
        .expect("built-in chipset")
        .clone();
    let mut sc = Scenario::new(field(deployment), build_table(table), profile, 1);
    sc.duration_s = duration_s;
    sc
}
