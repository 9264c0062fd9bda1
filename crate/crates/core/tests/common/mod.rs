#![allow(dead_code)]

use hda::allocator::{f1, ArrayState, Policy, PolicyKind, VaDemand};
use hda::disk_model::DiskSpec;
use hda::experiment::{iteration_seed, run_experiment, run_once, ExperimentConfig};
use hda::load_model::{AccessMix, RaidLevel};
use hda::workload::policy_rng;

pub fn disks(n: usize) -> Vec<DiskSpec> {
    vec![
        DiskSpec {
            count: n,
            ..DiskSpec::IBM_18ES
        };
        n
    ]
}

/// A demand costing `bw` bandwidth utilization per VD on an 18ES.
pub fn demand(width: usize, bw: f64, cap_gb: f64) -> VaDemand {
    let x_sr = DiskSpec::IBM_18ES.service_times().x_sr_ms;
    VaDemand {
        va_index: 0,
        raid_level: RaidLevel::Raid5,
        width,
        mix_per_vd: AccessMix {
            sr: bw * 1000.0 / x_sr,
            ..AccessMix::default()
        },
        capacity_per_vd_gb: cap_gb,
        period_scaling: vec![1.0],
    }
}

pub fn state_with(utils: &[(f64, f64)]) -> ArrayState {
    let mut s = ArrayState::new(&disks(utils.len()), 1);
    for (d, &(bw, cap)) in utils.iter().enumerate() {
        s.set_utilization(d, bw, cap);
    }
    s
}

/// Every run of every policy leaves each disk strictly under both limits
/// and puts the VDs of a VA on distinct disks.
pub fn check_packing(config: &ExperimentConfig, seed: u64) -> Result<(), String> {
    let disks = config.disks().map_err(|e| e.to_string())?;
    for policy in &config.policies {
        let run = run_once(config, policy, seed).map_err(|e| e.to_string())?;
        let s = &run.state;
        for p in 0..s.periods() {
            if let Some(u) = s
                .bandwidth_utilization(p)
                .iter()
                .find(|&&u| u >= s.bandwidth_limit())
            {
                return Err(format!("{policy}: bandwidth {u} in period {p}"));
            }
        }
        if let Some(u) = s.capacity_utilization().iter().find(|&&u| u >= 1.0) {
            return Err(format!("{policy}: capacity {u}"));
        }
        for placement in s.placements() {
            let mut d = placement.disks();
            d.sort_unstable();
            d.dedup();
            if d.len() != placement.vds.len() {
                return Err(format!("{policy}: VA {} reuses a disk", placement.va_index));
            }
        }
        // the failed request at the end must not have left any trace
        let replayed = ArrayState::replay(
            &disks,
            s.periods(),
            config.reserved_bandwidth,
            s.placements(),
        );
        for p in 0..s.periods() {
            if replayed.bandwidth_utilization(p) != s.bandwidth_utilization(p) {
                return Err(format!(
                    "{policy}: replayed bandwidth differs in period {p}"
                ));
            }
        }
        if replayed.capacity_utilization() != s.capacity_utilization() {
            return Err(format!("{policy}: replayed capacity differs"));
        }
    }
    Ok(())
}

/// A request that cannot fit leaves the state untouched.
pub fn check_rollback(state: &ArrayState, d: &VaDemand, kind: PolicyKind) -> Result<(), String> {
    let mut s = state.clone();
    let failure = s.try_place(d, &Policy::new(kind), &mut policy_rng(0)).err();
    match failure {
        Some(f) if s != *state => Err(format!("{kind}: state changed after {f}")),
        _ => Ok(()),
    }
}

/// Per-disk means from the placement log match the state's own vectors.
pub fn check_bookkeeping(config: &ExperimentConfig, seed: u64) -> Result<(), String> {
    let disks = config.disks().map_err(|e| e.to_string())?;
    for policy in &config.policies {
        let run = run_once(config, policy, seed).map_err(|e| e.to_string())?;
        let n = disks.len();
        let mut cap = vec![0.0; n];
        let mut peak_sum = 0.0;
        for row in run.state.placement_rows() {
            cap[row.disk] += row.cap_demand_gb / disks[row.disk].capacity_gb;
            peak_sum += row.bw_demand;
        }
        let cap_mean: f64 = cap.iter().sum::<f64>() / n as f64;
        let state_cap_mean: f64 = run.state.capacity_utilization().iter().sum::<f64>() / n as f64;
        if (cap_mean - state_cap_mean).abs() > 1e-9 {
            return Err(format!(
                "{policy}: capacity mean {cap_mean} vs {state_cap_mean}"
            ));
        }
        // with a single period the peak is the only period
        if run.state.periods() == 1 {
            let state_sum: f64 = run.state.bandwidth_utilization(0).iter().sum();
            if (peak_sum - state_sum).abs() > 1e-9 {
                return Err(format!("{policy}: bandwidth sum {peak_sum} vs {state_sum}"));
            }
        }
    }
    Ok(())
}

/// Two reports from the same config print identically.
pub fn check_replay_determinism(config: &ExperimentConfig) -> Result<(), String> {
    let a = run_experiment(config).map_err(|e| e.to_string())?;
    let b = run_experiment(config).map_err(|e| e.to_string())?;
    if format!("{a:?}") != format!("{b:?}") {
        return Err("reports differ between identical runs".into());
    }
    Ok(())
}

/// Every policy in an iteration consumes the same request sequence: cap all
/// runs at the shortest one and compare the hashes of what they drew.
pub fn check_common_random_numbers(
    config: &ExperimentConfig,
    iterations: u64,
) -> Result<(), String> {
    for j in 0..iterations {
        let seed = iteration_seed(config.workload.seed, j);
        let mut shortest = u64::MAX;
        for policy in &config.policies {
            let run = run_once(config, policy, seed).map_err(|e| e.to_string())?;
            shortest = shortest.min(run.requests);
        }
        let capped = ExperimentConfig {
            max_requests: shortest,
            ..config.clone()
        };
        let hashes: Vec<u64> = capped
            .policies
            .iter()
            .map(|p| run_once(&capped, p, seed).map(|r| r.request_hash))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        if hashes.windows(2).any(|w| w[0] != w[1]) {
            return Err(format!("iteration {j}: request hashes differ {hashes:?}"));
        }
    }
    Ok(())
}

/// Brute force over single disks: Min-F1 places a single VD iff some disk
/// can take it, and lands on a disk achieving the smallest F1.
pub fn check_oracle_single(utils: &[(f64, f64)], d: &VaDemand) -> Result<(), String> {
    let state = state_with(utils);
    let n = utils.len();
    let mut best = f64::INFINITY;
    let mut any = false;
    for disk in 0..n {
        let (bw, cap) = utils[disk];
        let add_bw = d
            .mix_per_vd
            .utilization(&DiskSpec::IBM_18ES.service_times());
        let add_cap = d.capacity_per_vd_gb / DiskSpec::IBM_18ES.capacity_gb;
        if bw + add_bw < 1.0 && cap + add_cap < 1.0 {
            any = true;
            let mut b: Vec<f64> = utils.iter().map(|u| u.0).collect();
            let mut c: Vec<f64> = utils.iter().map(|u| u.1).collect();
            b[disk] += add_bw;
            c[disk] += add_cap;
            best = best.min(f1(&b, &c, 1.0));
        }
    }
    let mut s = state.clone();
    match s.try_place(d, &Policy::new(PolicyKind::MinF1), &mut policy_rng(0)) {
        Ok(_) if !any => Err("placed where no disk fits".into()),
        Err(_) if any => Err("refused although a disk fits".into()),
        Err(_) => Ok(()),
        Ok(_) => {
            let got = s.objective_f1(1.0);
            if (got - best).abs() > 1e-12 {
                Err(format!("F1 {got} but enumeration reaches {best}"))
            } else {
                Ok(())
            }
        }
    }
}

/// Greedy Min-F1 succeeds on a two-VD request exactly when some pair of
/// distinct disks can take it.
pub fn check_oracle_pair(utils: &[(f64, f64)], d: &VaDemand) -> Result<(), String> {
    let state = state_with(utils);
    let n = utils.len();
    let add_bw = d
        .mix_per_vd
        .utilization(&DiskSpec::IBM_18ES.service_times());
    let add_cap = d.capacity_per_vd_gb / DiskSpec::IBM_18ES.capacity_gb;
    let fits = |i: usize| utils[i].0 + add_bw < 1.0 && utils[i].1 + add_cap < 1.0;
    let feasible_pair = (0..n).any(|a| (a + 1..n).any(|b| fits(a) && fits(b)));
    let mut s = state.clone();
    let placed = s
        .try_place(d, &Policy::new(PolicyKind::MinF1), &mut policy_rng(0))
        .is_ok();
    if placed == feasible_pair {
        Ok(())
    } else {
        Err(format!(
            "greedy placed={placed}, enumeration feasible={feasible_pair}"
        ))
    }
}
