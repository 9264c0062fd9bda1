//! Closed-form models: M/M/1 response times for partitioned versus shared
//! disks, a degraded mirrored layout, small-failure-probability
//! reliability, and declustering ratio selection.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::load_model::{declustering_row, DeclusteringBase};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum AnalysisError {
    #[error("queue saturated: utilization {0} >= 1")]
    Saturated(f64),
    #[error("{0} must be non-negative")]
    Negative(&'static str),
    #[error("partition size {n} must be between 1 and {total} - 1")]
    Partition { n: usize, total: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mm1Input {
    /// Arrivals per second.
    pub arrival_rate: f64,
    /// Mean service time in ms.
    pub service_time_ms: f64,
}

impl Mm1Input {
    pub fn utilization(&self) -> f64 {
        self.arrival_rate * self.service_time_ms / 1000.0
    }
}

/// `x / (1 - rho)` in ms.
pub fn mm1_response(input: Mm1Input) -> Result<f64, AnalysisError> {
    response_at(input.utilization(), input.service_time_ms)
}

/// Response time at utilization `rho` for mean service time `x_ms`.
pub fn response_at(rho: f64, x_ms: f64) -> Result<f64, AnalysisError> {
    if rho < 0.0 {
        return Err(AnalysisError::Negative("utilization"));
    }
    if rho >= 1.0 {
        return Err(AnalysisError::Saturated(rho));
    }
    Ok(x_ms / (1.0 - rho))
}

/// Response times under dedicated (C1) and shared (C2) disk partitioning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionComparison {
    pub rho_c1_r1: f64,
    pub rho_c1_r5: f64,
    pub rho_c2: f64,
    /// Utilization seen by RAID1 requests when they get preemptive priority.
    pub rho_c2_priority: f64,
    pub r_c1_r1: f64,
    pub r_c1_r5: f64,
    pub r_c2: f64,
    pub r_c2_priority_r1: f64,
    pub r_c2_priority_r5: f64,
}

/// `n` of `total` disks dedicated to RAID1 in C1; all disks shared in C2.
///
/// Rates are accesses per second arriving at the disk level.
pub fn compare_configs(
    lambda_r1: f64,
    lambda_r5: f64,
    total: usize,
    n: usize,
    x_ms: f64,
) -> Result<PartitionComparison, AnalysisError> {
    if lambda_r1 < 0.0 || lambda_r5 < 0.0 {
        return Err(AnalysisError::Negative("arrival rate"));
    }
    if n == 0 || n >= total {
        return Err(AnalysisError::Partition { n, total });
    }
    let x = x_ms / 1000.0;
    let rho_c1_r1 = lambda_r1 / n as f64 * x;
    let rho_c1_r5 = lambda_r5 / (total - n) as f64 * x;
    let rho_c2 = (lambda_r1 + lambda_r5) / total as f64 * x;
    let rho_c2_priority = lambda_r1 / total as f64 * x;
    let r_c2_priority_r1 = response_at(rho_c2_priority, x_ms)?;
    // low class of a two-class preemptive M/M/1 with equal service times
    let r_c2_priority_r5 = response_at(rho_c2, x_ms)? / (1.0 - rho_c2_priority);
    Ok(PartitionComparison {
        rho_c1_r1,
        rho_c1_r5,
        rho_c2,
        rho_c2_priority,
        r_c1_r1: response_at(rho_c1_r1, x_ms)?,
        r_c1_r5: response_at(rho_c1_r5, x_ms)?,
        r_c2: response_at(rho_c2, x_ms)?,
        r_c2_priority_r1,
        r_c2_priority_r5,
    })
}

/// Eight disks holding twelve mirrored VAs, three VDs per disk, disk 3 failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegradedExample {
    pub rho_vd: f64,
    /// Normal-mode response time, in units of the service time.
    pub normal: f64,
    /// Response time of each surviving disk (disks 1, 2, 4..8).
    pub disk_response: Vec<(usize, f64)>,
    /// Throughput weight of each surviving disk relative to normal load.
    pub disk_weight: Vec<(usize, f64)>,
    /// Request-weighted mean response time over surviving disks.
    pub degraded: f64,
    /// Mean response of the VAs touched by the failure.
    pub va_response: Vec<(String, f64)>,
}

/// Responses are in units of the disk service time.
pub fn degraded_response_example(rho_vd: f64) -> Result<DegradedExample, AnalysisError> {
    let r = response_at(3.0 * rho_vd, 1.0)?;
    // disk 2 takes all of E; disk 4 all of B and I
    let r2 = response_at(4.0 * rho_vd, 1.0)?;
    let r4 = response_at(5.0 * rho_vd, 1.0)?;
    let survivors = [1, 2, 4, 5, 6, 7, 8];
    let response = |d: usize| match d {
        2 => r2,
        4 => r4,
        _ => r,
    };
    let weight = |d: usize| match d {
        2 => 4.0 / 3.0,
        4 => 5.0 / 3.0,
        _ => 1.0,
    };
    let total_weight: f64 = survivors.iter().map(|&d| weight(d)).sum();
    let degraded = survivors
        .iter()
        .map(|&d| weight(d) * response(d))
        .sum::<f64>()
        / total_weight;
    Ok(DegradedExample {
        rho_vd,
        normal: r,
        disk_response: survivors.iter().map(|&d| (d, response(d))).collect(),
        disk_weight: survivors.iter().map(|&d| (d, weight(d))).collect(),
        degraded,
        va_response: vec![
            ("A".to_string(), (r + r2) / 2.0),
            ("L".to_string(), (r + r2) / 2.0),
            ("E".to_string(), r2),
            ("B".to_string(), r4),
            ("I".to_string(), r4),
            ("F".to_string(), (r + r4) / 2.0),
        ],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReliabilityConfig {
    /// One RAID1 pair and a six-wide RAID5 on separate disks.
    C1,
    /// Four RAID1 pairs and an eight-wide RAID5 sharing all disks.
    C2,
    Raid1Pairs(u32),
    Raid5Width(u32),
}

/// Probability that no data is lost when each disk survives with probability `r`.
pub fn reliability(r: f64, config: ReliabilityConfig) -> f64 {
    let pairs = |p: u32| (1.0 - (1.0 - r).powi(2)).powi(p as i32);
    let raid5 = |w: u32| r.powi(w as i32) + w as f64 * (1.0 - r) * r.powi(w as i32 - 1);
    match config {
        ReliabilityConfig::C1 => pairs(1) * raid5(6),
        ReliabilityConfig::C2 => pairs(4) * raid5(8),
        ReliabilityConfig::Raid1Pairs(p) => pairs(p),
        ReliabilityConfig::Raid5Width(w) => raid5(w),
    }
}

/// `(1 - R) / eps^2` at `r = 1 - eps`.
pub fn unreliability_coefficient(eps: f64, config: ReliabilityConfig) -> f64 {
    (1.0 - reliability(1.0 - eps, config)) / (eps * eps)
}

/// The candidate whose declustered capacity/bandwidth ratio is nearest
/// `gamma_d`; earlier candidates win ties.
pub fn choose_alpha(gamma_d: f64, base: &DeclusteringBase, candidates: &[f64]) -> Option<f64> {
    let mut best: Option<(f64, f64)> = None;
    for &a in candidates {
        let gap = (declustering_row(base, a).gamma - gamma_d).abs();
        if best.is_none_or(|(_, g)| gap < g) {
            best = Some((a, gap));
        }
    }
    best.map(|(a, _)| a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk_model::DiskSpec;

    #[test]
    fn mm1_examples() {
        let x = 11.49;
        assert_eq!(response_at(0.8, x).unwrap(), x / (1.0 - 0.8));
        assert!((response_at(0.8, 1.0).unwrap() - 5.0).abs() < 1e-12);
        assert!((response_at(0.2, 1.0).unwrap() - 1.25).abs() < 1e-12);
        let idle = Mm1Input {
            arrival_rate: 0.0,
            service_time_ms: x,
        };
        assert_eq!(mm1_response(idle).unwrap(), x);
        assert!(matches!(
            response_at(1.0, x),
            Err(AnalysisError::Saturated(_))
        ));
    }

    #[test]
    fn mm1_increasing() {
        let mut prev = 0.0;
        for i in 0..1000 {
            let r = response_at(i as f64 / 1000.0, 1.0).unwrap();
            assert!(r > prev);
            prev = r;
        }
    }

    #[test]
    fn shared_disks_help_mirrored_traffic() {
        // N = 8, n = 2: sharing wins for RAID1 when Λ5 < (N/2 - 1) Λ1
        let mut seed = 0x9e37_79b9_u64;
        for _ in 0..200 {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let l1 = 1.0 + (seed >> 40) as f64 / (1u64 << 24) as f64 * 100.0;
            let frac = (seed & 0xffff) as f64 / 65536.0;
            let l5 = frac * 3.0 * l1;
            let c = compare_configs(l1, l5, 8, 2, 0.001).unwrap();
            assert!(c.r_c2 < c.r_c1_r1, "l1={l1} l5={l5}");
        }
        let c = compare_configs(160.0, 0.0, 8, 2, 10.0).unwrap();
        assert!((c.rho_c1_r1 - 0.8).abs() < 1e-12);
        assert!((c.rho_c2_priority - 0.2).abs() < 1e-12);
    }

    #[test]
    fn symmetric_split_matches_sharing() {
        let c = compare_configs(40.0, 40.0, 8, 4, 10.0).unwrap();
        assert!((c.r_c1_r1 - c.r_c2).abs() < 1e-12);
        assert!((c.r_c1_r5 - c.r_c2).abs() < 1e-12);
    }

    #[test]
    fn degraded_example() {
        let e = degraded_response_example(0.1).unwrap();
        assert!((e.normal - 10.0 / 7.0).abs() < 1e-12);
        // hand computation: (5 * 10/7 + 4/3 * 10/6 + 5/3 * 2) / 8
        let expected = (5.0 * 10.0 / 7.0 + 4.0 / 3.0 * 10.0 / 6.0 + 5.0 / 3.0 * 2.0) / 8.0;
        assert!((e.degraded - expected).abs() < 1e-12);
        let idle = degraded_response_example(0.0).unwrap();
        assert!((idle.degraded - 1.0).abs() < 1e-12);
        assert!(degraded_response_example(0.2).is_err());
    }

    #[test]
    fn reliability_coefficients() {
        for config in [ReliabilityConfig::C1, ReliabilityConfig::C2] {
            assert_eq!(reliability(1.0, config), 1.0);
        }
        let c1 = unreliability_coefficient(1e-4, ReliabilityConfig::C1);
        let c2 = unreliability_coefficient(1e-4, ReliabilityConfig::C2);
        assert!((c1 / 16.0 - 1.0).abs() < 0.01, "{c1}");
        assert!((c2 / 32.0 - 1.0).abs() < 0.01, "{c2}");
        let fine = unreliability_coefficient(1e-6, ReliabilityConfig::C2);
        assert!((fine - 32.0).abs() < (c2 - 32.0).abs());
        let coarse = unreliability_coefficient(1e-2, ReliabilityConfig::C1);
        assert!((coarse - 16.0).abs() > (c1 - 16.0).abs());
    }

    #[test]
    fn separate_disks_are_more_reliable() {
        for i in 0..=1000 {
            let r = i as f64 / 1000.0;
            assert!(
                reliability(r, ReliabilityConfig::C1)
                    >= reliability(r, ReliabilityConfig::C2) - 1e-15
            );
        }
    }

    #[test]
    fn alpha_nearest_disk_ratio() {
        let gamma_d = DiskSpec::IBM_18ES.capacity_bandwidth_ratio();
        let all = [0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0];
        assert_eq!(
            choose_alpha(gamma_d, &DeclusteringBase::REFERENCE, &all),
            Some(0.25)
        );
        assert_eq!(
            choose_alpha(0.057, &DeclusteringBase::REFERENCE, &[0.125, 1.0]),
            Some(1.0)
        );
        assert_eq!(
            choose_alpha(5.0, &DeclusteringBase::REFERENCE, &[0.5]),
            Some(0.5)
        );
        assert_eq!(choose_alpha(5.0, &DeclusteringBase::REFERENCE, &[]), None);
    }
}
