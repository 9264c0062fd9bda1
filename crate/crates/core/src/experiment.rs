//! FCFS allocation runs, repeated over iterations and policies with common
//! random numbers, plus one-dimensional parameter sweeps.

use std::hash::{DefaultHasher, Hash, Hasher};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::allocator::{AllocationFailure, ArrayState, FailureReason, Policy, VaDemand};
use crate::disk_model::{expand_disks, DiskOverride, DiskSpec, SpecError};
use crate::load_model::{
    load_profile, normal_mix, select_width, ArrayGeometry, DeclusteringBase, LoadError, RaidLevel,
    UpdateMethod, VaLoad,
};
use crate::workload::{policy_rng, RequestStream, VaRequest, WorkloadConfig, WorkloadError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error(transparent)]
    Disk(#[from] SpecError),
    #[error(transparent)]
    Workload(#[from] WorkloadError),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("iterations must be at least 1")]
    Iterations,
    #[error("no policies selected")]
    NoPolicies,
    #[error("degraded mode needs at least 3 disks, got {0}")]
    DegradedNeedsDisks(usize),
    #[error("{name} must be in (0, 1], got {value}")]
    Threshold { name: &'static str, value: f64 },
    #[error("beta must be finite and non-negative, got {0}")]
    Beta(f64),
    #[error("declustering ratio must be in (0, 1], got {0}")]
    Alpha(f64),
    #[error("reserved bandwidth must be in [0, 1), got {0}")]
    Reserved(f64),
    #[error("sweep needs at least one value")]
    EmptySweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Mode {
    Normal,
    #[default]
    Degraded,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "normal" => Some(Mode::Normal),
            "degraded" => Some(Mode::Degraded),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Normal => "normal",
            Mode::Degraded => "degraded",
        }
    }
}

/// Parity group layout for RAID5 VAs.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum Clustering {
    /// Parity group spans the whole VA.
    #[default]
    Off,
    /// `G = 1 + alpha (W - 1)`, kept within `[2, W]`.
    FixedAlpha(f64),
    /// Per VA, the candidate ratio whose capacity/bandwidth ratio is
    /// closest to the disk's.
    AutoCbr,
}

pub const AUTO_ALPHA_CANDIDATES: [f64; 8] = [0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum WidthRule {
    /// Larger of the bandwidth- and capacity-driven widths.
    #[default]
    Computed,
    /// Every RAID5 VA spans all disks.
    FullArray,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum StopRule {
    #[default]
    FirstFailure,
    /// Keep drawing after a failure; stop after this many failures.
    SkipFailures(u32),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub workload: WorkloadConfig,
    pub disk: DiskSpec,
    pub overrides: Vec<DiskOverride>,
    pub policies: Vec<Policy>,
    pub mode: Mode,
    pub iterations: usize,
    /// Per-VD bandwidth utilization cap used for width selection.
    pub rho_max: f64,
    /// Per-VD capacity cap as a fraction of one base disk's capacity.
    pub v_max_fraction: f64,
    pub update_method: UpdateMethod,
    pub clustering: Clustering,
    pub width_rule: WidthRule,
    pub stop_rule: StopRule,
    /// Bandwidth held back on every disk.
    pub reserved_bandwidth: f64,
    /// Safety cap on requests per run.
    pub max_requests: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            workload: WorkloadConfig::default(),
            disk: DiskSpec::IBM_18ES,
            overrides: Vec::new(),
            policies: Policy::all(),
            mode: Mode::Degraded,
            iterations: 100,
            rho_max: 0.05,
            v_max_fraction: 0.02,
            update_method: UpdateMethod::B,
            clustering: Clustering::Off,
            width_rule: WidthRule::Computed,
            stop_rule: StopRule::FirstFailure,
            reserved_bandwidth: 0.0,
            max_requests: 1_000_000,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let disks = self.disks()?;
        self.workload.validate()?;
        if self.iterations == 0 {
            return Err(ConfigError::Iterations);
        }
        if self.policies.is_empty() {
            return Err(ConfigError::NoPolicies);
        }
        if self.mode == Mode::Degraded && disks.len() < 3 {
            return Err(ConfigError::DegradedNeedsDisks(disks.len()));
        }
        for (name, value) in [
            ("rho_max", self.rho_max),
            ("v_max_fraction", self.v_max_fraction),
        ] {
            if !(value > 0.0 && value <= 1.0) {
                return Err(ConfigError::Threshold { name, value });
            }
        }
        for p in &self.policies {
            if !(p.beta.is_finite() && p.beta >= 0.0) {
                return Err(ConfigError::Beta(p.beta));
            }
        }
        if let Clustering::FixedAlpha(a) = self.clustering {
            if !(a > 0.0 && a <= 1.0) {
                return Err(ConfigError::Alpha(a));
            }
        }
        if !(self.reserved_bandwidth >= 0.0 && self.reserved_bandwidth < 1.0) {
            return Err(ConfigError::Reserved(self.reserved_bandwidth));
        }
        Ok(())
    }

    pub fn disks(&self) -> Result<Vec<DiskSpec>, SpecError> {
        expand_disks(&self.disk, &self.overrides)
    }

    pub fn v_max_gb(&self) -> f64 {
        self.v_max_fraction * self.disk.capacity_gb
    }

    /// Per-VD demand of a request under this configuration.
    ///
    /// Widths and clustering are sized against the base disk model.
    pub fn demand_for(&self, req: &VaRequest, disks: &[DiskSpec]) -> Result<VaDemand, LoadError> {
        let n = disks.len();
        let st = self.disk.service_times();
        let load = VaLoad {
            arrival_rate: req.arrival_rate,
            read_fraction: req.read_fraction,
        };
        let geometry = match req.raid_level {
            RaidLevel::Raid1 => ArrayGeometry::mirrored(),
            level => {
                let k = level.check_disks().unwrap_or(0);
                let width = match self.width_rule {
                    WidthRule::FullArray => n,
                    WidthRule::Computed => {
                        // the normal-mode total does not depend on the width
                        let probe = ArrayGeometry::striped(level, n.max(k + 1));
                        let rho_total =
                            normal_mix(load, &probe, self.update_method)?.utilization(&st);
                        select_width(rho_total, req.size_gb, self.rho_max, self.v_max_gb(), n, k)
                    }
                };
                self.raid5_geometry(level, width, req)
            }
        };
        let profile = load_profile(
            load,
            req.size_gb,
            &st,
            geometry,
            self.update_method,
            req.period_scaling(),
        )?;
        let mix = match self.mode {
            Mode::Normal => profile.normal_mix_per_vd,
            Mode::Degraded => profile
                .degraded_mix_per_vd
                .ok_or(LoadError::NoDegradedModel(req.raid_level))?,
        };
        Ok(VaDemand {
            va_index: req.index,
            raid_level: req.raid_level,
            width: geometry.width,
            mix_per_vd: mix,
            capacity_per_vd_gb: profile.capacity_per_vd_gb,
            period_scaling: profile.period_scaling,
        })
    }

    fn raid5_geometry(&self, level: RaidLevel, width: usize, req: &VaRequest) -> ArrayGeometry {
        if level != RaidLevel::Raid5 || width < 3 {
            return ArrayGeometry::striped(level, width);
        }
        let alpha = match self.clustering {
            Clustering::Off => return ArrayGeometry::striped(level, width),
            Clustering::FixedAlpha(a) => a,
            Clustering::AutoCbr => {
                let base = DeclusteringBase {
                    data_gb: req.size_gb,
                    normal_bandwidth: req.arrival_rate,
                    width,
                };
                let candidates: Vec<f64> = AUTO_ALPHA_CANDIDATES
                    .into_iter()
                    .filter(|&a| 1.0 + a * (width as f64 - 1.0) >= 2.0)
                    .collect();
                crate::analysis::choose_alpha(
                    self.disk.capacity_bandwidth_ratio(),
                    &base,
                    &candidates,
                )
                .unwrap_or(1.0)
            }
        };
        let g = (1.0 + alpha * (width as f64 - 1.0)).clamp(2.0, width as f64);
        ArrayGeometry {
            level,
            width,
            parity_group: g,
        }
    }
}

/// Outcome of one FCFS allocation run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub r1: u64,
    pub r5: u64,
    /// The failure that ended the run (the last one under skip-and-continue).
    pub failure: Option<AllocationFailure>,
    pub failures: u32,
    pub state: ArrayState,
    /// Requests drawn from the stream, including failed ones.
    pub requests: u64,
    /// Hash of every request drawn, for common-random-numbers checks.
    pub request_hash: u64,
}

impl RunResult {
    pub fn total(&self) -> u64 {
        self.r1 + self.r5
    }
}

fn hash_request(h: &mut DefaultHasher, r: &VaRequest) {
    r.index.hash(h);
    r.raid_level.number().hash(h);
    r.size_gb.to_bits().hash(h);
    r.arrival_rate.to_bits().hash(h);
    for p in &r.period_rates {
        p.to_bits().hash(h);
    }
}

/// Seed for iteration `j`, read at a fixed offset of a dedicated ChaCha
/// stream keyed by the master seed.
pub fn iteration_seed(master: u64, j: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(2);
    rng.set_word_pos(2 * j as u128);
    rng.next_u64()
}

/// One run of `policy` on the request stream seeded by `seed`.
pub fn run_once(
    config: &ExperimentConfig,
    policy: &Policy,
    seed: u64,
) -> Result<RunResult, ConfigError> {
    let disks = config.disks()?;
    let mut stream = RequestStream::with_seed(&config.workload, seed)?;
    let mut rng = policy_rng(seed);
    let mut state = ArrayState::new(&disks, config.workload.periods.len())
        .with_reserved_bandwidth(config.reserved_bandwidth);
    let mut hasher = DefaultHasher::new();
    let (mut r1, mut r5, mut failures, mut requests) = (0u64, 0u64, 0u32, 0u64);
    let mut last_failure = None;
    let allowed_failures = match config.stop_rule {
        StopRule::FirstFailure => 1,
        StopRule::SkipFailures(n) => n.max(1),
    };

    while requests < config.max_requests {
        let req = stream.next_request();
        requests += 1;
        hash_request(&mut hasher, &req);
        let demand = config.demand_for(&req, &disks)?;
        match state.try_place(&demand, policy, &mut rng) {
            Ok(_) if req.raid_level == RaidLevel::Raid1 => r1 += 1,
            Ok(_) => r5 += 1,
            Err(f) => {
                failures += 1;
                last_failure = Some(f);
                if failures >= allowed_failures {
                    break;
                }
            }
        }
    }

    Ok(RunResult {
        r1,
        r5,
        failure: last_failure,
        failures,
        state,
        requests,
        request_hash: hasher.finish(),
    })
}

/// What survives of a run after aggregation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub iteration: usize,
    pub policy: usize,
    pub r1: u64,
    pub r5: u64,
    pub failure: Option<FailureReason>,
    pub request_hash: u64,
    pub peak_bandwidth: Vec<f64>,
    pub capacity: Vec<f64>,
}

impl RunSummary {
    pub fn total(&self) -> u64 {
        self.r1 + self.r5
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FailureCounts {
    pub bandwidth: usize,
    pub capacity: usize,
    pub distinct_disks: usize,
}

impl FailureCounts {
    fn add(&mut self, reason: FailureReason) {
        match reason {
            FailureReason::Bandwidth => self.bandwidth += 1,
            FailureReason::Capacity => self.capacity += 1,
            FailureReason::InsufficientDistinctDisks => self.distinct_disks += 1,
        }
    }

    /// The resource that ran out most often; bandwidth wins ties.
    pub fn dominant(&self) -> Option<FailureReason> {
        if self.bandwidth + self.capacity + self.distinct_disks == 0 {
            None
        } else if self.capacity > self.bandwidth {
            Some(FailureReason::Capacity)
        } else if self.bandwidth > 0 || self.distinct_disks == 0 {
            Some(FailureReason::Bandwidth)
        } else {
            Some(FailureReason::InsufficientDistinctDisks)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySummary {
    pub policy: Policy,
    pub mean_r1: f64,
    pub mean_r5: f64,
    pub mean_total: f64,
    /// Iterations in which this policy reached the maximum total (ties count).
    pub best_count: usize,
    pub bandwidth_mean: f64,
    pub bandwidth_std: f64,
    pub capacity_mean: f64,
    pub capacity_std: f64,
    pub failures: FailureCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub iterations: usize,
    pub policies: Vec<PolicySummary>,
    pub runs: Vec<RunSummary>,
}

impl ExperimentReport {
    pub fn summary(&self, kind: crate::allocator::PolicyKind) -> Option<&PolicySummary> {
        self.policies.iter().find(|p| p.policy.kind == kind)
    }
}

fn mean_std(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = xs.collect();
    if v.is_empty() {
        return (0.0, 0.0);
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    (mean, crate::allocator::variance(&v).sqrt())
}

fn run_job(
    config: &ExperimentConfig,
    master: u64,
    iteration: usize,
    policy: usize,
) -> Result<RunSummary, ConfigError> {
    let seed = iteration_seed(master, iteration as u64);
    let run = run_once(config, &config.policies[policy], seed)?;
    Ok(RunSummary {
        iteration,
        policy,
        r1: run.r1,
        r5: run.r5,
        failure: run.failure.map(|f| f.reason),
        request_hash: run.request_hash,
        peak_bandwidth: run.state.peak_bandwidth(),
        capacity: run.state.capacity_utilization().to_vec(),
    })
}

/// All policies over all iterations; iteration `j` feeds every policy the
/// same request sequence.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, ConfigError> {
    config.validate()?;
    let master = config.workload.seed;
    let jobs: Vec<(usize, usize)> = (0..config.iterations)
        .flat_map(|j| (0..config.policies.len()).map(move |p| (j, p)))
        .collect();

    #[cfg(feature = "parallel")]
    let runs: Result<Vec<RunSummary>, ConfigError> = {
        use rayon::prelude::*;
        jobs.par_iter()
            .map(|&(j, p)| run_job(config, master, j, p))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let runs: Result<Vec<RunSummary>, ConfigError> = jobs
        .iter()
        .map(|&(j, p)| run_job(config, master, j, p))
        .collect();

    // collect keeps job order, so the merge is (iteration, policy) ordered
    let runs = runs?;
    Ok(aggregate(config, runs))
}

fn aggregate(config: &ExperimentConfig, runs: Vec<RunSummary>) -> ExperimentReport {
    let iterations = config.iterations;
    let np = config.policies.len();
    let mut best = vec![0usize; np];
    for j in 0..iterations {
        let row = &runs[j * np..(j + 1) * np];
        let max = row.iter().map(RunSummary::total).max().unwrap_or(0);
        for r in row.iter().filter(|r| r.total() == max) {
            best[r.policy] += 1;
        }
    }
    let policies = (0..np)
        .map(|p| {
            let mine: Vec<&RunSummary> = runs.iter().filter(|r| r.policy == p).collect();
            let n = mine.len() as f64;
            let mean_r1 = mine.iter().map(|r| r.r1 as f64).sum::<f64>() / n;
            let mean_r5 = mine.iter().map(|r| r.r5 as f64).sum::<f64>() / n;
            let (bandwidth_mean, bandwidth_std) =
                mean_std(mine.iter().flat_map(|r| r.peak_bandwidth.iter().copied()));
            let (capacity_mean, capacity_std) =
                mean_std(mine.iter().flat_map(|r| r.capacity.iter().copied()));
            let mut failures = FailureCounts::default();
            for reason in mine.iter().filter_map(|r| r.failure) {
                failures.add(reason);
            }
            PolicySummary {
                policy: config.policies[p],
                mean_r1,
                mean_r5,
                mean_total: mean_r1 + mean_r5,
                best_count: best[p],
                bandwidth_mean,
                bandwidth_std,
                capacity_mean,
                capacity_std,
                failures,
            }
        })
        .collect();
    ExperimentReport {
        iterations,
        policies,
        runs,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepDimension {
    Beta,
    RhoMax,
    /// Values are fractions of one disk's capacity.
    VMax,
    Alpha,
}

impl SweepDimension {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "beta" => Some(Self::Beta),
            "rhomax" => Some(Self::RhoMax),
            "vmax" => Some(Self::VMax),
            "alpha" => Some(Self::Alpha),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Beta => "beta",
            Self::RhoMax => "rho_max",
            Self::VMax => "v_max",
            Self::Alpha => "alpha",
        }
    }

    pub fn apply(self, config: &mut ExperimentConfig, value: f64) {
        match self {
            Self::Beta => config.policies.iter_mut().for_each(|p| p.beta = value),
            Self::RhoMax => config.rho_max = value,
            Self::VMax => config.v_max_fraction = value,
            Self::Alpha => config.clustering = Clustering::FixedAlpha(value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub report: ExperimentReport,
    /// Resource that stopped most runs in this row.
    pub bound: Option<FailureReason>,
}

impl SweepRow {
    /// "(b)" or "(c)" for the resource that ran out first.
    pub fn bound_tag(&self) -> &'static str {
        match self.bound {
            Some(FailureReason::Bandwidth) => "(b)",
            Some(FailureReason::Capacity) => "(c)",
            _ => "",
        }
    }
}

pub fn sweep(
    config: &ExperimentConfig,
    dimension: SweepDimension,
    values: &[f64],
) -> Result<Vec<SweepRow>, ConfigError> {
    if values.is_empty() {
        return Err(ConfigError::EmptySweep);
    }
    values
        .iter()
        .map(|&value| {
            let mut cfg = config.clone();
            dimension.apply(&mut cfg, value);
            let report = run_experiment(&cfg)?;
            let mut counts = FailureCounts::default();
            for reason in report.runs.iter().filter_map(|r| r.failure) {
                counts.add(reason);
            }
            Ok(SweepRow {
                value,
                bound: counts.dominant(),
                report,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocator::PolicyKind;
    use crate::workload::SizeDistribution;

    fn quick(kinds: &[PolicyKind], iterations: usize) -> ExperimentConfig {
        ExperimentConfig {
            policies: kinds.iter().map(|&k| Policy::new(k)).collect(),
            iterations,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn mirrored_pair_fits_once() {
        // 10 ms reads; 80 acc/s per VA is 0.4 per VD normally, 0.8 degraded
        let disk = DiskSpec {
            capacity_gb: 100.0,
            seek_ms: 4.0,
            rotation_ms: 10.0,
            settle_ms: 0.0,
            transfer_ms: 1.0,
            count: 3,
        };
        let workload = WorkloadConfig {
            f1: 1.0,
            mean_size_r1_gb: 1.0,
            kappa5: 8.0,
            size_distribution: SizeDistribution::Fixed,
            ..WorkloadConfig::default()
        };
        let cfg = ExperimentConfig {
            disk,
            workload,
            ..quick(&[PolicyKind::FirstFit], 1)
        };
        let normal = ExperimentConfig {
            mode: Mode::Normal,
            disk: DiskSpec { count: 2, ..disk },
            ..cfg.clone()
        };
        let two = ExperimentConfig {
            disk: DiskSpec { count: 2, ..disk },
            ..cfg.clone()
        };
        assert!(matches!(
            two.validate(),
            Err(ConfigError::DegradedNeedsDisks(2))
        ));
        // one mirrored VA on a two-disk array: degraded demand 0.8 leaves no room
        let run = run_once(&normal, &cfg.policies[0], 0).unwrap();
        assert_eq!(run.r1, 2);
        let mut degraded_two = two;
        degraded_two.mode = Mode::Degraded;
        let run = run_once(&degraded_two, &cfg.policies[0], 0).unwrap();
        assert_eq!(run.total(), 1);
        assert_eq!(run.failure.unwrap().reason, FailureReason::Bandwidth);
    }

    #[test]
    fn tiny_disks_hold_nothing() {
        let cfg = ExperimentConfig {
            disk: DiskSpec {
                capacity_gb: 1e-6,
                ..DiskSpec::IBM_18ES
            },
            ..quick(&[PolicyKind::MinF1], 1)
        };
        let run = run_once(&cfg, &cfg.policies[0], 3).unwrap();
        assert_eq!(run.total(), 0);
        assert_eq!(run.failure.unwrap().reason, FailureReason::Capacity);
    }

    #[test]
    fn single_policy_is_always_best() {
        let report = run_experiment(&quick(&[PolicyKind::MinF2], 4)).unwrap();
        assert_eq!(report.policies[0].best_count, 4);
    }

    #[test]
    fn identical_policies_tie() {
        let report =
            run_experiment(&quick(&[PolicyKind::WorstFit, PolicyKind::WorstFit], 3)).unwrap();
        assert_eq!(report.policies[0].mean_total, report.policies[1].mean_total);
        assert_eq!(report.policies[0].best_count, 3);
        assert_eq!(report.policies[1].best_count, 3);
    }

    #[test]
    fn totals_add_up_and_best_covers_iterations() {
        let report = run_experiment(&quick(&PolicyKind::ALL, 3)).unwrap();
        let best: usize = report.policies.iter().map(|p| p.best_count).sum();
        assert!(best >= 3);
        for p in &report.policies {
            assert!((p.mean_total - p.mean_r1 - p.mean_r5).abs() < 1e-12);
        }
    }

    #[test]
    fn iteration_seeds_differ() {
        let seeds: std::collections::HashSet<u64> =
            (0..100).map(|j| iteration_seed(7, j)).collect();
        assert_eq!(seeds.len(), 100);
        assert_eq!(iteration_seed(7, 5), iteration_seed(7, 5));
    }

    #[test]
    fn skip_and_continue_places_at_least_as_many() {
        let base = quick(&[PolicyKind::FirstFit], 1);
        let skip = ExperimentConfig {
            stop_rule: StopRule::SkipFailures(20),
            ..base.clone()
        };
        let a = run_once(&base, &base.policies[0], 11).unwrap();
        let b = run_once(&skip, &skip.policies[0], 11).unwrap();
        assert!(b.total() >= a.total());
        assert_eq!(b.failures, 20);
    }

    #[test]
    fn full_array_width() {
        let cfg = ExperimentConfig {
            width_rule: WidthRule::FullArray,
            clustering: Clustering::FixedAlpha(0.5),
            ..ExperimentConfig::default()
        };
        let disks = cfg.disks().unwrap();
        let req = RequestStream::new(&WorkloadConfig {
            f1: 0.0,
            ..cfg.workload.clone()
        })
        .unwrap()
        .next_request();
        let d = cfg.demand_for(&req, &disks).unwrap();
        assert_eq!(d.width, 12);
    }

    #[test]
    fn sweep_rejects_empty_values() {
        assert!(matches!(
            sweep(&quick(&[PolicyKind::MinF1], 1), SweepDimension::Beta, &[]),
            Err(ConfigError::EmptySweep)
        ));
    }

    #[test]
    fn validation() {
        let cfg = ExperimentConfig {
            iterations: 0,
            ..ExperimentConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(ConfigError::Iterations)));
        let cfg = ExperimentConfig {
            rho_max: 0.0,
            ..ExperimentConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(ConfigError::Threshold { .. })));
        let cfg = ExperimentConfig {
            policies: vec![],
            ..ExperimentConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(ConfigError::NoPolicies)));
    }
}
