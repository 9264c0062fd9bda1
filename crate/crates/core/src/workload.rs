//! Synthetic FCFS stream of VA allocation requests.
//!
//! Randomness comes from ChaCha8 seeded with [`SeedableRng::seed_from_u64`],
//! on stream 0. The allocator's Random policy draws from stream 1 of the same
//! key (see [`policy_rng`]) so that it never perturbs the request sequence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::load_model::RaidLevel;

const REQUEST_STREAM: u64 = 0;
const POLICY_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorkloadError {
    #[error("{name} must lie in [0, 1], got {value}")]
    Fraction { name: &'static str, value: f64 },
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("period multipliers must be non-empty, start at 1 and lie in (0, 1]")]
    Periods,
}

/// Per-GB access intensity presets for RAID5 VAs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WorkloadClass {
    BandwidthBound,
    Balanced,
    CapacityBound,
}

impl WorkloadClass {
    pub const ALL: [WorkloadClass; 3] = [
        WorkloadClass::BandwidthBound,
        WorkloadClass::Balanced,
        WorkloadClass::CapacityBound,
    ];

    /// κ5 in accesses per second per GB.
    pub fn kappa5(self) -> f64 {
        match self {
            WorkloadClass::BandwidthBound => 8.5,
            WorkloadClass::Balanced => 3.3,
            WorkloadClass::CapacityBound => 2.1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WorkloadClass::BandwidthBound => "bandwidth",
            WorkloadClass::Balanced => "balanced",
            WorkloadClass::CapacityBound => "capacity",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "bandwidth" | "bandwidth-bound" => Some(WorkloadClass::BandwidthBound),
            "balanced" => Some(WorkloadClass::Balanced),
            "capacity" | "capacity-bound" => Some(WorkloadClass::CapacityBound),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SizeDistribution {
    #[default]
    Exponential,
    /// Every VA of a level has exactly the level's mean size.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadConfig {
    /// Fraction of RAID1 requests.
    pub f1: f64,
    pub mean_size_r1_gb: f64,
    pub mean_size_r5_gb: f64,
    /// RAID5 accesses per second per GB.
    pub kappa5: f64,
    /// κ1 / κ5.
    pub kappa_ratio: f64,
    pub read_fraction: f64,
    /// Load shape across periods relative to a VA's own peak.
    pub periods: Vec<f64>,
    pub strip_kb: u32,
    pub size_distribution: SizeDistribution,
    pub seed: u64,
}

impl Default for WorkloadConfig {
    fn default() -> Self {
        Self::for_class(WorkloadClass::BandwidthBound)
    }
}

impl WorkloadConfig {
    pub fn for_class(class: WorkloadClass) -> Self {
        Self {
            f1: 0.25,
            mean_size_r1_gb: 0.25,
            mean_size_r5_gb: 0.75,
            kappa5: class.kappa5(),
            kappa_ratio: 10.0,
            read_fraction: 1.0,
            periods: vec![1.0],
            strip_kb: 256,
            size_distribution: SizeDistribution::Exponential,
            seed: 0,
        }
    }

    pub fn kappa(&self, level: RaidLevel) -> f64 {
        match level {
            RaidLevel::Raid1 => self.kappa5 * self.kappa_ratio,
            _ => self.kappa5,
        }
    }

    pub fn granule_gb(&self) -> f64 {
        self.strip_kb as f64 / (1024.0 * 1024.0)
    }

    pub fn validate(&self) -> Result<(), WorkloadError> {
        for (name, value) in [("f1", self.f1), ("read_fraction", self.read_fraction)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(WorkloadError::Fraction { name, value });
            }
        }
        for (name, value) in [
            ("mean_size_r1_gb", self.mean_size_r1_gb),
            ("mean_size_r5_gb", self.mean_size_r5_gb),
            ("kappa5", self.kappa5),
            ("kappa_ratio", self.kappa_ratio),
            ("strip_kb", self.strip_kb as f64),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(WorkloadError::NonPositive { name, value });
            }
        }
        let ok =
            self.periods.first() == Some(&1.0) && self.periods.iter().all(|&m| m > 0.0 && m <= 1.0);
        if !ok {
            return Err(WorkloadError::Periods);
        }
        Ok(())
    }
}

/// One allocation request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VaRequest {
    pub index: u64,
    pub raid_level: RaidLevel,
    /// Nonredundant size, a whole number of strips.
    pub size_gb: f64,
    /// Peak accesses per second, κ_ℓ · size.
    pub arrival_rate: f64,
    pub read_fraction: f64,
    /// Arrival rate in each period. VA `i` peaks in period `i mod P`.
    pub period_rates: Vec<f64>,
}

impl VaRequest {
    /// Period multipliers relative to the peak rate.
    pub fn period_scaling(&self) -> Vec<f64> {
        if self.arrival_rate == 0.0 {
            return vec![1.0; self.period_rates.len()];
        }
        self.period_rates
            .iter()
            .map(|r| r / self.arrival_rate)
            .collect()
    }
}

/// `u <= f1` selects RAID1.
pub fn level_for(u: f64, f1: f64) -> RaidLevel {
    if u <= f1 {
        RaidLevel::Raid1
    } else {
        RaidLevel::Raid5
    }
}

/// Rounds `size_gb` up to a positive whole number of granules.
pub fn round_up_to_granule(size_gb: f64, granule_gb: f64) -> f64 {
    let n = (size_gb / granule_gb).ceil().max(1.0);
    n * granule_gb
}

/// Generator for the Random placement policy tied to the same seed.
pub fn policy_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(POLICY_STREAM);
    rng
}

/// Unbounded, replayable request sequence.
#[derive(Debug, Clone)]
pub struct RequestStream {
    config: WorkloadConfig,
    rng: ChaCha8Rng,
    size_r1: Exp<f64>,
    size_r5: Exp<f64>,
    next_index: u64,
}

impl RequestStream {
    pub fn new(config: &WorkloadConfig) -> Result<Self, WorkloadError> {
        Self::with_seed(config, config.seed)
    }

    pub fn with_seed(config: &WorkloadConfig, seed: u64) -> Result<Self, WorkloadError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(REQUEST_STREAM);
        Ok(Self {
            config: config.clone(),
            rng,
            size_r1: Exp::new(1.0 / config.mean_size_r1_gb).expect("validated mean"),
            size_r5: Exp::new(1.0 / config.mean_size_r5_gb).expect("validated mean"),
            next_index: 0,
        })
    }

    pub fn next_request(&mut self) -> VaRequest {
        let cfg = &self.config;
        let u: f64 = self.rng.random();
        let level = level_for(u, cfg.f1);
        let (dist, mean) = match level {
            RaidLevel::Raid1 => (&self.size_r1, cfg.mean_size_r1_gb),
            _ => (&self.size_r5, cfg.mean_size_r5_gb),
        };
        let raw = match cfg.size_distribution {
            SizeDistribution::Exponential => dist.sample(&mut self.rng),
            SizeDistribution::Fixed => mean,
        };
        let size_gb = round_up_to_granule(raw, cfg.granule_gb());
        let arrival_rate = cfg.kappa(level) * size_gb;
        let index = self.next_index;
        self.next_index += 1;

        let p = cfg.periods.len();
        let shift = (index % p as u64) as usize;
        let period_rates = (0..p)
            .map(|period| arrival_rate * cfg.periods[(period + p - shift) % p])
            .collect();

        VaRequest {
            index,
            raid_level: level,
            size_gb,
            arrival_rate,
            read_fraction: cfg.read_fraction,
            period_rates,
        }
    }
}

impl Iterator for RequestStream {
    type Item = VaRequest;

    fn next(&mut self) -> Option<VaRequest> {
        Some(self.next_request())
    }
}
