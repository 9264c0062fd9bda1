//! Per-disk utilization bookkeeping and VD placement policies.
//!
//! A disk is a two-dimensional bin: bandwidth utilization (tracked per load
//! period) and capacity utilization. A VA is placed all-or-nothing with each
//! of its VDs on a distinct disk, and every disk must stay strictly below
//! its bandwidth limit in every period and strictly below full capacity.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::disk_model::{DiskSpec, ServiceTimes};
use crate::load_model::{AccessMix, RaidLevel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PolicyKind {
    RoundRobin,
    Random,
    FirstFit,
    BestFit,
    WorstFit,
    MinF1,
    MinF2,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 7] = [
        PolicyKind::MinF1,
        PolicyKind::MinF2,
        PolicyKind::WorstFit,
        PolicyKind::BestFit,
        PolicyKind::RoundRobin,
        PolicyKind::FirstFit,
        PolicyKind::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::RoundRobin => "round-robin",
            PolicyKind::Random => "random",
            PolicyKind::FirstFit => "first-fit",
            PolicyKind::BestFit => "best-fit",
            PolicyKind::WorstFit => "worst-fit",
            PolicyKind::MinF1 => "min-f1",
            PolicyKind::MinF2 => "min-f2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        Self::ALL.into_iter().find(|k| {
            k.name().replace('-', "") == key || (key == "rr" && *k == PolicyKind::RoundRobin)
        })
    }

    pub fn valid_names() -> String {
        Self::ALL
            .iter()
            .map(|k| k.name())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What Best-Fit treats as "fullest".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BestFitRule {
    /// Highest bandwidth utilization.
    #[default]
    Bandwidth,
    /// Highest of bandwidth and capacity utilization.
    Combined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Policy {
    pub kind: PolicyKind,
    /// Capacity emphasis for Min-F1 / Min-F2.
    pub beta: f64,
    pub best_fit: BestFitRule,
}

impl Policy {
    pub fn new(kind: PolicyKind) -> Self {
        Self {
            kind,
            beta: 1.0,
            best_fit: BestFitRule::Bandwidth,
        }
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn uses_beta(&self) -> bool {
        matches!(self.kind, PolicyKind::MinF1 | PolicyKind::MinF2)
    }

    pub fn all() -> Vec<Policy> {
        PolicyKind::ALL.iter().map(|&k| Policy::new(k)).collect()
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind.fmt(f)
    }
}

/// Per-VD demand of one VA, before it is priced against a particular disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VaDemand {
    pub va_index: u64,
    pub raid_level: RaidLevel,
    pub width: usize,
    pub mix_per_vd: AccessMix,
    pub capacity_per_vd_gb: f64,
    /// Multiplier on `mix_per_vd` for each period.
    pub period_scaling: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VdPlacement {
    pub disk: usize,
    /// Bandwidth utilization added in each period.
    pub bandwidth: Vec<f64>,
    /// Capacity utilization added (fraction of the disk).
    pub capacity: f64,
    pub capacity_gb: f64,
}

impl VdPlacement {
    pub fn peak_bandwidth(&self) -> f64 {
        self.bandwidth.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub va_index: u64,
    pub raid_level: RaidLevel,
    pub vds: Vec<VdPlacement>,
}

impl Placement {
    pub fn disks(&self) -> Vec<usize> {
        self.vds.iter().map(|v| v.disk).collect()
    }
}

/// One row of the exported placement log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementRow {
    pub va_index: u64,
    pub raid_level: u8,
    pub disk: usize,
    pub bw_demand: f64,
    pub cap_demand_gb: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FailureReason {
    Bandwidth,
    Capacity,
    InsufficientDistinctDisks,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureReason::Bandwidth => "bandwidth",
            FailureReason::Capacity => "capacity",
            FailureReason::InsufficientDistinctDisks => "insufficient_distinct_disks",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("VA {va_index} could not be placed: {reason}")]
pub struct AllocationFailure {
    pub va_index: u64,
    pub reason: FailureReason,
}

#[derive(Debug, Clone)]
struct DiskDemand {
    bandwidth: Vec<f64>,
    capacity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrayState {
    capacities_gb: Vec<f64>,
    service_times: Vec<ServiceTimes>,
    bandwidth_limit: f64,
    /// `[period][disk]`
    u_bw: Vec<Vec<f64>>,
    u_cap: Vec<f64>,
    placements: Vec<Placement>,
    rr_cursor: usize,
}

impl ArrayState {
    /// Empty array of the given disks tracking `periods` load periods.
    pub fn new(disks: &[DiskSpec], periods: usize) -> Self {
        let n = disks.len();
        Self {
            capacities_gb: disks.iter().map(|d| d.capacity_gb).collect(),
            service_times: disks.iter().map(|d| d.service_times()).collect(),
            bandwidth_limit: 1.0,
            u_bw: vec![vec![0.0; n]; periods.max(1)],
            u_cap: vec![0.0; n],
            placements: Vec::new(),
            rr_cursor: 0,
        }
    }

    /// Holds back `fraction` of every disk's bandwidth (e.g. for sequential I/O).
    pub fn with_reserved_bandwidth(mut self, fraction: f64) -> Self {
        self.bandwidth_limit = 1.0 - fraction;
        self
    }

    /// Rebuilds the utilization vectors from a placement log.
    pub fn replay(disks: &[DiskSpec], periods: usize, reserved: f64, log: &[Placement]) -> Self {
        let mut state = Self::new(disks, periods).with_reserved_bandwidth(reserved);
        for p in log {
            state.commit(p.clone());
        }
        state
    }

    pub fn n_disks(&self) -> usize {
        self.u_cap.len()
    }

    pub fn periods(&self) -> usize {
        self.u_bw.len()
    }

    pub fn bandwidth_limit(&self) -> f64 {
        self.bandwidth_limit
    }

    pub fn bandwidth_utilization(&self, period: usize) -> &[f64] {
        &self.u_bw[period]
    }

    /// Per-disk bandwidth utilization in that disk's busiest period.
    pub fn peak_bandwidth(&self) -> Vec<f64> {
        (0..self.n_disks())
            .map(|n| self.u_bw.iter().map(|p| p[n]).fold(0.0, f64::max))
            .collect()
    }

    pub fn capacity_utilization(&self) -> &[f64] {
        &self.u_cap
    }

    pub fn placements(&self) -> &[Placement] {
        &self.placements
    }

    pub fn rr_cursor(&self) -> usize {
        self.rr_cursor
    }

    pub fn set_rr_cursor(&mut self, cursor: usize) {
        self.rr_cursor = cursor % self.n_disks().max(1);
    }

    /// Overwrites the utilization of one disk; for constructing scenarios.
    pub fn set_utilization(&mut self, disk: usize, bandwidth: f64, capacity: f64) {
        for period in &mut self.u_bw {
            period[disk] = bandwidth;
        }
        self.u_cap[disk] = capacity;
    }

    pub fn placement_rows(&self) -> Vec<PlacementRow> {
        self.placements
            .iter()
            .flat_map(|p| {
                p.vds.iter().map(move |vd| PlacementRow {
                    va_index: p.va_index,
                    raid_level: p.raid_level.number(),
                    disk: vd.disk,
                    bw_demand: vd.peak_bandwidth(),
                    cap_demand_gb: vd.capacity_gb,
                })
            })
            .collect()
    }

    /// `max_n max(U^x_n, β U^c_n)`
    pub fn objective_f1(&self, beta: f64) -> f64 {
        f1(&self.peak_bandwidth(), &self.u_cap, beta)
    }

    /// `Var(U^x) + β Var(U^c)`, population variances over all disks.
    pub fn objective_f2(&self, beta: f64) -> f64 {
        f2(&self.peak_bandwidth(), &self.u_cap, beta)
    }

    fn demand_on(&self, disk: usize, demand: &VaDemand) -> DiskDemand {
        let base = demand.mix_per_vd.utilization(&self.service_times[disk]);
        let bandwidth = (0..self.periods())
            .map(|p| base * demand.period_scaling.get(p).copied().unwrap_or(1.0))
            .collect();
        DiskDemand {
            bandwidth,
            capacity: demand.capacity_per_vd_gb / self.capacities_gb[disk],
        }
    }

    fn check(&self, disk: usize, d: &DiskDemand) -> Result<(), FailureReason> {
        let bw_ok = self
            .u_bw
            .iter()
            .zip(&d.bandwidth)
            .all(|(period, add)| period[disk] + add < self.bandwidth_limit);
        if !bw_ok {
            return Err(FailureReason::Bandwidth);
        }
        if self.u_cap[disk] + d.capacity >= 1.0 {
            return Err(FailureReason::Capacity);
        }
        Ok(())
    }

    /// Places all VDs of `demand` or nothing.
    ///
    /// `rng` is only consulted by the Random policy.
    pub fn try_place<R: Rng + ?Sized>(
        &mut self,
        demand: &VaDemand,
        policy: &Policy,
        rng: &mut R,
    ) -> Result<&Placement, AllocationFailure> {
        let n = self.n_disks();
        let w = demand.width;
        let fail = |reason| AllocationFailure {
            va_index: demand.va_index,
            reason,
        };
        if w == 0 || w > n {
            return Err(fail(FailureReason::InsufficientDistinctDisks));
        }
        let per_disk: Vec<DiskDemand> = (0..n).map(|d| self.demand_on(d, demand)).collect();
        let checks: Vec<Result<(), FailureReason>> =
            (0..n).map(|d| self.check(d, &per_disk[d])).collect();

        let chosen = match policy.kind {
            PolicyKind::RoundRobin => {
                let set: Vec<usize> = (0..w).map(|i| (self.rr_cursor + i) % n).collect();
                all_feasible(&set, &checks).map_err(fail)?;
                set
            }
            PolicyKind::Random => {
                let set = rand::seq::index::sample(rng, n, w).into_vec();
                all_feasible(&set, &checks).map_err(fail)?;
                set
            }
            kind => {
                let feasible: Vec<usize> = (0..n).filter(|&d| checks[d].is_ok()).collect();
                if feasible.len() < w {
                    return Err(fail(dominant_reason(checks.iter())));
                }
                match kind {
                    PolicyKind::FirstFit => feasible[..w].to_vec(),
                    PolicyKind::BestFit | PolicyKind::WorstFit => {
                        self.rank_by_fullness(feasible, w, policy)
                    }
                    _ => self.greedy(&feasible, &per_disk, w, policy),
                }
            }
        };

        let placement = Placement {
            va_index: demand.va_index,
            raid_level: demand.raid_level,
            vds: chosen
                .iter()
                .map(|&d| VdPlacement {
                    disk: d,
                    bandwidth: per_disk[d].bandwidth.clone(),
                    capacity: per_disk[d].capacity,
                    capacity_gb: demand.capacity_per_vd_gb,
                })
                .collect(),
        };
        if policy.kind == PolicyKind::RoundRobin {
            self.rr_cursor = (self.rr_cursor + w) % n;
        }
        self.commit(placement);
        Ok(self.placements.last().expect("just pushed"))
    }

    fn commit(&mut self, placement: Placement) {
        for vd in &placement.vds {
            for (period, add) in self.u_bw.iter_mut().zip(&vd.bandwidth) {
                period[vd.disk] += add;
            }
            self.u_cap[vd.disk] += vd.capacity;
        }
        self.placements.push(placement);
    }

    fn rank_by_fullness(&self, mut feasible: Vec<usize>, w: usize, policy: &Policy) -> Vec<usize> {
        let peak = self.peak_bandwidth();
        let fullness = |d: usize| match (policy.kind, policy.best_fit) {
            (PolicyKind::BestFit, BestFitRule::Combined) => peak[d].max(self.u_cap[d]),
            _ => peak[d],
        };
        // stable sort keeps lower indices first among equals
        if policy.kind == PolicyKind::BestFit {
            feasible.sort_by(|&a, &b| fullness(b).total_cmp(&fullness(a)));
        } else {
            feasible.sort_by(|&a, &b| fullness(a).total_cmp(&fullness(b)));
        }
        feasible.truncate(w);
        feasible
    }

    /// One VD at a time onto the unused feasible disk that minimizes the
    /// objective after placement.
    fn greedy(
        &self,
        feasible: &[usize],
        per_disk: &[DiskDemand],
        w: usize,
        policy: &Policy,
    ) -> Vec<usize> {
        let mut bw = self.peak_bandwidth();
        let mut cap = self.u_cap.clone();
        let mut used = vec![false; self.n_disks()];
        let mut chosen = Vec::with_capacity(w);
        for _ in 0..w {
            let mut best: Option<(usize, f64, f64, f64, f64)> = None;
            for &d in feasible.iter().filter(|&&d| !used[d]) {
                let new_bw = self
                    .u_bw
                    .iter()
                    .zip(&per_disk[d].bandwidth)
                    .map(|(p, add)| p[d] + add)
                    .fold(0.0, f64::max);
                let new_cap = cap[d] + per_disk[d].capacity;
                let (old_bw, old_cap) = (bw[d], cap[d]);
                bw[d] = new_bw;
                cap[d] = new_cap;
                let score = match policy.kind {
                    PolicyKind::MinF1 => f1(&bw, &cap, policy.beta),
                    _ => f2(&bw, &cap, policy.beta),
                };
                // F1 ignores every disk below the maximum, so equal scores
                // fall back to the candidate's own post-placement term
                let local = new_bw.max(policy.beta * new_cap);
                bw[d] = old_bw;
                cap[d] = old_cap;
                if best.is_none_or(|(_, s, l, _, _)| score < s || (score == s && local < l)) {
                    best = Some((d, score, local, new_bw, new_cap));
                }
            }
            let (d, _, _, new_bw, new_cap) = best.expect("feasible set has at least w disks");
            used[d] = true;
            bw[d] = new_bw;
            cap[d] = new_cap;
            chosen.push(d);
        }
        chosen
    }
}

fn all_feasible(set: &[usize], checks: &[Result<(), FailureReason>]) -> Result<(), FailureReason> {
    if set.iter().all(|&d| checks[d].is_ok()) {
        Ok(())
    } else {
        Err(dominant_reason(set.iter().map(|&d| &checks[d])))
    }
}

/// The constraint that rejected the most disks; bandwidth wins ties.
fn dominant_reason<'a>(
    checks: impl Iterator<Item = &'a Result<(), FailureReason>>,
) -> FailureReason {
    let (mut bw, mut cap) = (0usize, 0usize);
    for c in checks {
        match c {
            Err(FailureReason::Bandwidth) => bw += 1,
            Err(FailureReason::Capacity) => cap += 1,
            _ => {}
        }
    }
    if cap > bw {
        FailureReason::Capacity
    } else {
        FailureReason::Bandwidth
    }
}

pub fn f1(bandwidth: &[f64], capacity: &[f64], beta: f64) -> f64 {
    bandwidth
        .iter()
        .zip(capacity)
        .map(|(&x, &c)| x.max(beta * c))
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn f2(bandwidth: &[f64], capacity: &[f64], beta: f64) -> f64 {
    variance(bandwidth) + beta * variance(capacity)
}

/// Population variance.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
}
