use rayon::prelude::*;

use crate::deployment::{deploy_grid_with, deploy_random_with, Deployment, DeploymentKind};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, name_key};
use crate::scheduling::{build_table, TableKind};
use crate::sim::{run, Event, RunResult, Scenario, Simulation};
use crate::topology::{Topology, UnreachablePolicy};

use super::config::ExperimentSpec;
use super::dataset::{Dataset, Row};

/// Position seed of a random deployment for one experiment seed and attempt.
pub fn deployment_seed(seed: u64, kind: DeploymentKind, attempt: u32) -> u64 {
    derive_seed(&[seed, name_key(kind.name()), u64::from(attempt)])
}

/// Simulation seed of one run. Chipset and payload are left out so that runs
/// differing only in those share one timeline.
pub fn run_seed(seed: u64, kind: DeploymentKind, table: TableKind) -> u64 {
    derive_seed(&[seed, name_key(kind.name()), name_key(table.name())])
}

/// Places the nodes for `(kind, seed)` and builds the topology.
///
/// Random fields are redrawn until connected unless unreachable nodes are to
/// be excluded, in which case the first draw is kept.
pub fn build_topology(spec: &ExperimentSpec, kind: DeploymentKind, seed: u64) -> Result<(Deployment, Topology)> {
    let policy = if spec.exclude_unreachable {
        UnreachablePolicy::Exclude
    } else {
        UnreachablePolicy::Error
    };
    match kind {
        DeploymentKind::Grid => {
            let d = deploy_grid_with(spec.node_count, spec.area, spec.gateway)?;
            let t = Topology::build(&d, spec.range_cm, policy)?;
            Ok((d, t))
        }
        DeploymentKind::Random => {
            let attempts = if spec.exclude_unreachable {
                1
            } else {
                spec.deployment_attempts
            };
            let mut last = None;
            for attempt in 0..attempts {
                let d = deploy_random_with(
                    spec.node_count,
                    spec.area,
                    deployment_seed(seed, kind, attempt),
                    spec.gateway,
                )?;
                match Topology::build(&d, spec.range_cm, policy) {
                    Ok(t) => return Ok((d, t)),
                    Err(e @ Error::DisconnectedTopology { .. }) => last = Some(e),
                    Err(e) => return Err(e),
                }
            }
            Err(last.expect("at least one attempt"))
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Tuple {
    table: usize,
    deployment: usize,
    chipset: usize,
    payload: usize,
    seed: usize,
}

fn tuples(spec: &ExperimentSpec) -> Vec<Tuple> {
    let mut out = Vec::with_capacity(spec.run_count());
    for table in 0..spec.tables.len() {
        for deployment in 0..spec.deployments.len() {
            for chipset in 0..spec.chipsets.len() {
                for payload in 0..spec.extra_payload_bits.len() {
                    for seed in 0..spec.seeds.len() {
                        out.push(Tuple {
                            table,
                            deployment,
                            chipset,
                            payload,
                            seed,
                        });
                    }
                }
            }
        }
    }
    out
}

fn scenario(spec: &ExperimentSpec, tu: Tuple, topology: &Topology) -> Scenario {
    let kind = spec.tables[tu.table];
    let deployment = spec.deployments[tu.deployment];
    let seed = spec.seeds[tu.seed];
    let profile = spec
        .profile(&spec.chipsets[tu.chipset])
        .expect("chipsets validated")
        .clone();
    let mut sc = Scenario::new(
        topology.clone(),
        build_table(kind),
        profile,
        run_seed(seed, deployment, kind),
    );
    sc.traffic = spec.traffic.clone();
    sc.traffic.extra_payload_bits = spec.extra_payload_bits[tu.payload];
    sc.duration_s = spec.duration_s;
    sc.slot_s = spec.slot_s;
    sc.csma = spec.csma.clone();
    sc.queue_capacity = spec.queue_capacity;
    sc
}

fn describe(spec: &ExperimentSpec, tu: Tuple) -> String {
    format!(
        "table={} deployment={} chipset={} extra_payload_bits={} seed={}",
        spec.tables[tu.table],
        spec.deployments[tu.deployment],
        spec.chipsets[tu.chipset],
        spec.extra_payload_bits[tu.payload],
        spec.seeds[tu.seed]
    )
}

fn row(spec: &ExperimentSpec, tu: Tuple, r: &RunResult) -> Row {
    Row {
        table: spec.tables[tu.table].name().to_string(),
        deployment: spec.deployments[tu.deployment].name().to_string(),
        chipset: spec.chipsets[tu.chipset].clone(),
        extra_payload_bits: spec.extra_payload_bits[tu.payload],
        seed: spec.seeds[tu.seed],
        total_energy_j: r.total_energy_j,
        delivered: r.packets_delivered,
        generated: r.packets_generated,
        collisions: r.collisions,
        mean_latency_frames: r.mean_upstream_latency_frames,
        dropped: r.dropped,
    }
}

/// Topologies indexed by `[deployment][seed]`.
fn topologies(spec: &ExperimentSpec) -> Result<Vec<Vec<Topology>>> {
    spec.deployments
        .iter()
        .map(|&kind| {
            spec.seeds
                .iter()
                .map(|&seed| {
                    build_topology(spec, kind, seed)
                        .map(|(_, t)| t)
                        .map_err(|e| Error::Sweep {
                            tuple: format!("deployment={kind} seed={seed}"),
                            source: Box::new(e),
                        })
                })
                .collect()
        })
        .collect()
}

/// Runs every configuration and seed of `spec` on `jobs` worker threads.
/// The result does not depend on `jobs`.
pub fn run_sweep(spec: &ExperimentSpec, jobs: usize) -> Result<Dataset> {
    run_sweep_inspect(spec, jobs, |_, _| {})
}

/// [`run_sweep`] that also hands every finished run to `inspect`, in no
/// particular order when `jobs > 1`.
pub fn run_sweep_inspect<F>(spec: &ExperimentSpec, jobs: usize, inspect: F) -> Result<Dataset>
where
    F: Fn(&Row, &RunResult) + Sync,
{
    spec.validate()?;
    let topos = topologies(spec)?;
    let work = tuples(spec);
    let one = |tu: &Tuple| -> Result<Row> {
        let sc = scenario(spec, *tu, &topos[tu.deployment][tu.seed]);
        let r = run(&sc).map_err(|e| Error::Sweep {
            tuple: describe(spec, *tu),
            source: Box::new(e),
        })?;
        let out = row(spec, *tu, &r);
        inspect(&out, &r);
        Ok(out)
    };
    let rows = if jobs <= 1 {
        work.iter().map(one).collect::<Result<Vec<_>>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot start {jobs} workers: {e}")))?;
        pool.install(|| work.par_iter().map(one).collect::<Result<Vec<_>>>())?
    };
    Ok(Dataset { rows })
}

/// Runs the single configuration of `spec` with the event log enabled.
pub fn run_logged(spec: &ExperimentSpec) -> Result<(Row, Vec<Event>)> {
    spec.validate()?;
    if spec.run_count() != 1 {
        return Err(Error::InvalidArgument(format!(
            "an event log needs a config with exactly one run, this one has {}",
            spec.run_count()
        )));
    }
    let topos = topologies(spec)?;
    let tu = tuples(spec)[0];
    let sc = scenario(spec, tu, &topos[0][0]);
    let mut sim = Simulation::new(&sc)?.with_event_log();
    sim.run_to_end();
    let events = sim.events().to_vec();
    let r = sim.finish();
    Ok((row(spec, tu, &r), events))
}
