//! Browser bindings. Every export takes plain numbers and strings and
//! returns a JSON string; errors come back as thrown strings.

use hda::analysis::{choose_alpha, response_at};
use hda::experiment::{ExperimentConfig, Mode, AUTO_ALPHA_CANDIDATES};
use hda::load_model::{declustering_row, DeclusteringBase, DeclusteringRow};
use hda::workload::{WorkloadClass, WorkloadConfig};
use hda::{run_experiment, run_once, Policy, PolicyKind};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn config(workload: &str, mode: &str, beta: f64, seed: u64) -> Result<ExperimentConfig, String> {
    let class =
        WorkloadClass::parse(workload).ok_or_else(|| format!("unknown workload '{workload}'"))?;
    let mode = Mode::parse(mode).ok_or_else(|| format!("unknown mode '{mode}'"))?;
    let mut c = ExperimentConfig {
        workload: WorkloadConfig {
            seed,
            ..WorkloadConfig::for_class(class)
        },
        mode,
        ..ExperimentConfig::default()
    };
    c.policies.iter_mut().for_each(|p| p.beta = beta);
    c.validate().map_err(|e| e.to_string())?;
    Ok(c)
}

#[derive(Serialize)]
struct Vd {
    va: u64,
    raid_level: u8,
    disk: usize,
    bandwidth: f64,
    capacity: f64,
}

#[derive(Serialize)]
struct Snapshot {
    policy: &'static str,
    r1: u64,
    r5: u64,
    failure: Option<String>,
    bandwidth: Vec<f64>,
    capacity: Vec<f64>,
    vds: Vec<Vd>,
}

/// Fills the array from one request stream with one policy.
pub fn allocation_snapshot(
    workload: &str,
    mode: &str,
    policy: &str,
    beta: f64,
    seed: u64,
) -> Result<String, String> {
    let kind = PolicyKind::parse(policy).ok_or_else(|| {
        format!(
            "unknown policy '{policy}'; valid policies: {}",
            PolicyKind::valid_names()
        )
    })?;
    let c = config(workload, mode, beta, seed)?;
    let run = run_once(&c, &Policy::new(kind).with_beta(beta), seed).map_err(|e| e.to_string())?;
    let vds = run
        .state
        .placements()
        .iter()
        .flat_map(|p| {
            p.vds.iter().map(move |vd| Vd {
                va: p.va_index,
                raid_level: p.raid_level.number(),
                disk: vd.disk,
                bandwidth: vd.peak_bandwidth(),
                capacity: vd.capacity,
            })
        })
        .collect();
    let snap = Snapshot {
        policy: kind.name(),
        r1: run.r1,
        r5: run.r5,
        failure: run.failure.map(|f| f.reason.to_string()),
        bandwidth: run.state.peak_bandwidth(),
        capacity: run.state.capacity_utilization().to_vec(),
        vds,
    };
    serde_json::to_string(&snap).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct PolicyRow {
    policy: &'static str,
    best: usize,
    r1: f64,
    r5: f64,
    total: f64,
    bandwidth: f64,
    capacity: f64,
}

/// Mean allocations of every policy over `iterations` streams.
pub fn compare_policies(
    workload: &str,
    mode: &str,
    beta: f64,
    iterations: usize,
    seed: u64,
) -> Result<String, String> {
    let mut c = config(workload, mode, beta, seed)?;
    c.iterations = iterations.clamp(1, 500);
    let report = run_experiment(&c).map_err(|e| e.to_string())?;
    let rows: Vec<PolicyRow> = report
        .policies
        .iter()
        .map(|p| PolicyRow {
            policy: p.policy.kind.name(),
            best: p.best_count,
            r1: p.mean_r1,
            r5: p.mean_r5,
            total: p.mean_total,
            bandwidth: p.bandwidth_mean,
            capacity: p.capacity_mean,
        })
        .collect();
    serde_json::to_string(&rows).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Curves {
    rows: Vec<DeclusteringRow>,
    disk_gamma: f64,
    chosen_alpha: Option<f64>,
    /// (utilization, response / service time)
    mm1: Vec<(f64, f64)>,
}

/// Clustered RAID5 tradeoff for one VA, and the M/M/1 curve.
pub fn declustering(data_gb: f64, bandwidth: f64, width: usize) -> Result<String, String> {
    if !(data_gb > 0.0 && bandwidth > 0.0) || width < 2 {
        return Err("need data_gb > 0, bandwidth > 0 and width >= 2".into());
    }
    let base = DeclusteringBase {
        data_gb,
        normal_bandwidth: bandwidth,
        width,
    };
    let disk_gamma = ExperimentConfig::default().disk.capacity_bandwidth_ratio();
    let mm1 = (0..95)
        .map(|i| {
            let rho = i as f64 / 100.0;
            (rho, response_at(rho, 1.0).expect("rho < 1"))
        })
        .collect();
    let curves = Curves {
        rows: AUTO_ALPHA_CANDIDATES
            .iter()
            .map(|&a| declustering_row(&base, a))
            .collect(),
        disk_gamma,
        chosen_alpha: choose_alpha(disk_gamma, &base, &AUTO_ALPHA_CANDIDATES),
        mm1,
    };
    serde_json::to_string(&curves).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = allocationSnapshot)]
pub fn allocation_snapshot_js(
    workload: &str,
    mode: &str,
    policy: &str,
    beta: f64,
    seed: u32,
) -> Result<String, JsValue> {
    allocation_snapshot(workload, mode, policy, beta, seed.into())
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = comparePolicies)]
pub fn compare_policies_js(
    workload: &str,
    mode: &str,
    beta: f64,
    iterations: u32,
    seed: u32,
) -> Result<String, JsValue> {
    compare_policies(workload, mode, beta, iterations as usize, seed.into())
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = declustering)]
pub fn declustering_js(data_gb: f64, bandwidth: f64, width: u32) -> Result<String, JsValue> {
    declustering(data_gb, bandwidth, width as usize).map_err(|e| JsValue::from_str(&e))
}
