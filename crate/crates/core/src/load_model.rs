//! Per-VD bandwidth and capacity demands of a virtual array.
//!
//! Loads are first expressed as an [`AccessMix`] (single reads, single
//! writes and read-modify-writes per second) and only turned into a
//! utilization against the [`ServiceTimes`] of a concrete disk. That keeps
//! heterogeneous arrays exact: the same VD costs more on a slower drive.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::disk_model::ServiceTimes;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LoadError {
    #[error("array width {width} is too small (need at least {min})")]
    Width { width: usize, min: usize },
    #[error("parity group {group} must lie in [2, width = {width}]")]
    ParityGroup { group: f64, width: usize },
    #[error("no degraded-mode load model for {0}")]
    NoDegradedModel(RaidLevel),
    #[error("unknown update method {0:?} (expected A, B, C or D)")]
    UnknownMethod(String),
    #[error("unknown RAID level {0:?}")]
    UnknownLevel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RaidLevel {
    Raid0,
    Raid1,
    Raid5,
    Raid6,
    Raid7,
}

impl RaidLevel {
    /// Check blocks per stripe for the parity levels; `None` for mirroring.
    pub fn check_disks(self) -> Option<usize> {
        match self {
            RaidLevel::Raid0 => Some(0),
            RaidLevel::Raid1 => None,
            RaidLevel::Raid5 => Some(1),
            RaidLevel::Raid6 => Some(2),
            RaidLevel::Raid7 => Some(3),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            RaidLevel::Raid0 => 0,
            RaidLevel::Raid1 => 1,
            RaidLevel::Raid5 => 5,
            RaidLevel::Raid6 => 6,
            RaidLevel::Raid7 => 7,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        Some(match n {
            0 => RaidLevel::Raid0,
            1 => RaidLevel::Raid1,
            5 => RaidLevel::Raid5,
            6 => RaidLevel::Raid6,
            7 => RaidLevel::Raid7,
            _ => return None,
        })
    }
}

impl fmt::Display for RaidLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RAID{}", self.number())
    }
}

/// How small writes update check blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum UpdateMethod {
    /// Controller reads old data and check blocks, then writes them back.
    A,
    /// Disks XOR in place and rewrite after one rotation.
    #[default]
    B,
    /// Controller computes the differences; same disk cost as B.
    C,
    /// Composite read/write head, RMW costs a single write.
    D,
}

impl std::str::FromStr for UpdateMethod {
    type Err = LoadError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(UpdateMethod::A),
            "B" => Ok(UpdateMethod::B),
            "C" => Ok(UpdateMethod::C),
            "D" => Ok(UpdateMethod::D),
            _ => Err(LoadError::UnknownMethod(s.to_string())),
        }
    }
}

/// Disk accesses per second, split by access type.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AccessMix {
    pub sr: f64,
    pub sw: f64,
    pub rmw: f64,
}

impl AccessMix {
    pub fn utilization(&self, st: &ServiceTimes) -> f64 {
        st.utilization(self.sr, self.sw, self.rmw)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            sr: self.sr * factor,
            sw: self.sw * factor,
            rmw: self.rmw * factor,
        }
    }

    pub fn total_rate(&self) -> f64 {
        self.sr + self.sw + self.rmw
    }
}

impl std::ops::Add for AccessMix {
    type Output = AccessMix;

    fn add(self, rhs: Self) -> Self {
        Self {
            sr: self.sr + rhs.sr,
            sw: self.sw + rhs.sw,
            rmw: self.rmw + rhs.rmw,
        }
    }
}

/// Layout of one virtual array across its VDs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    pub level: RaidLevel,
    pub width: usize,
    /// Strips covered by one parity strip; equals `width` unless clustered.
    /// May be fractional when derived from a declustering ratio.
    pub parity_group: f64,
}

impl ArrayGeometry {
    pub fn mirrored() -> Self {
        Self {
            level: RaidLevel::Raid1,
            width: 2,
            parity_group: 2.0,
        }
    }

    pub fn striped(level: RaidLevel, width: usize) -> Self {
        Self {
            level,
            width,
            parity_group: width as f64,
        }
    }

    /// Clustered layout with `G = 1 + alpha (W - 1)`.
    pub fn clustered(width: usize, alpha: f64) -> Self {
        Self {
            level: RaidLevel::Raid5,
            width,
            parity_group: 1.0 + alpha * (width as f64 - 1.0),
        }
    }

    pub fn check_disks(&self) -> usize {
        self.level.check_disks().unwrap_or(0)
    }

    /// Declustering ratio `(G - 1) / (W - 1)`.
    pub fn alpha(&self) -> f64 {
        if self.width <= 1 {
            return 1.0;
        }
        (self.parity_group - 1.0) / (self.width as f64 - 1.0)
    }

    pub fn is_clustered(&self) -> bool {
        self.level == RaidLevel::Raid5 && self.parity_group < self.width as f64
    }

    fn validate(&self) -> Result<(), LoadError> {
        let min = match self.level {
            RaidLevel::Raid1 => 2,
            l => l.check_disks().unwrap_or(0) + 1,
        };
        if self.width < min || (self.level == RaidLevel::Raid1 && self.width != 2) {
            return Err(LoadError::Width {
                width: self.width,
                min,
            });
        }
        if self.level == RaidLevel::Raid5
            && !(self.parity_group >= 2.0 && self.parity_group <= self.width as f64)
        {
            return Err(LoadError::ParityGroup {
                group: self.parity_group,
                width: self.width,
            });
        }
        Ok(())
    }
}

/// The request attributes the load equations need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VaLoad {
    pub arrival_rate: f64,
    pub read_fraction: f64,
}

impl VaLoad {
    fn write_fraction(&self) -> f64 {
        1.0 - self.read_fraction
    }
}

/// Array-wide access mix in normal mode (the numerator of ρ′).
pub fn normal_mix(
    load: VaLoad,
    geom: &ArrayGeometry,
    method: UpdateMethod,
) -> Result<AccessMix, LoadError> {
    geom.validate()?;
    let lambda = load.arrival_rate;
    let fr = load.read_fraction;
    let fw = load.write_fraction();
    let mix = match geom.level {
        RaidLevel::Raid0 => AccessMix {
            sr: lambda * fr,
            sw: lambda * fw,
            rmw: 0.0,
        },
        RaidLevel::Raid1 => AccessMix {
            sr: lambda * fr,
            sw: 2.0 * lambda * fw,
            rmw: 0.0,
        },
        level => {
            let copies = (level.check_disks().unwrap_or(0) + 1) as f64;
            let writes = lambda * copies * fw;
            let reads = AccessMix {
                sr: lambda * fr,
                ..AccessMix::default()
            };
            reads
                + match method {
                    UpdateMethod::A => AccessMix {
                        sr: writes,
                        sw: writes,
                        rmw: 0.0,
                    },
                    UpdateMethod::B | UpdateMethod::C => AccessMix {
                        rmw: writes,
                        ..AccessMix::default()
                    },
                    UpdateMethod::D => AccessMix {
                        sw: writes,
                        ..AccessMix::default()
                    },
                }
        }
    };
    Ok(mix)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalLoad {
    /// ρ′: utilization summed over all VDs.
    pub rho_total: f64,
    /// ρ: utilization of one VD.
    pub rho_per_vd: f64,
}

pub fn normal_load(
    load: VaLoad,
    st: &ServiceTimes,
    geom: &ArrayGeometry,
    method: UpdateMethod,
) -> Result<NormalLoad, LoadError> {
    let rho_total = normal_mix(load, geom, method)?.utilization(st);
    Ok(NormalLoad {
        rho_total,
        rho_per_vd: rho_total / geom.width as f64,
    })
}

/// Access mix charged to every VD with one disk of the array failed.
///
/// Every VD is charged because it is not known which disk will fail.
pub fn degraded_mix(load: VaLoad, geom: &ArrayGeometry) -> Result<AccessMix, LoadError> {
    geom.validate()?;
    let fr = load.read_fraction;
    let fw = load.write_fraction();
    match geom.level {
        // the survivor takes all reads; writes are unchanged
        RaidLevel::Raid1 => Ok(AccessMix {
            sr: load.arrival_rate * fr,
            sw: load.arrival_rate * fw,
            rmw: 0.0,
        }),
        RaidLevel::Raid5 => {
            let w = geom.width as f64;
            let g = geom.parity_group;
            let lambda = load.arrival_rate / w;
            let read_sr = lambda * fr * (1.0 + geom.alpha());
            let per_write = lambda * fw / (w - 1.0);
            Ok(AccessMix {
                sr: read_sr + per_write * (g - 2.0),
                sw: per_write * 2.0,
                rmw: per_write * 2.0 * (w - 2.0),
            })
        }
        level => Err(LoadError::NoDegradedModel(level)),
    }
}

pub fn degraded_load(
    load: VaLoad,
    st: &ServiceTimes,
    geom: &ArrayGeometry,
) -> Result<f64, LoadError> {
    Ok(degraded_mix(load, geom)?.utilization(st))
}

/// Space occupied by a VA of nonredundant size `size_gb`, check data included.
pub fn effective_size(size_gb: f64, geom: &ArrayGeometry) -> Result<f64, LoadError> {
    geom.validate()?;
    Ok(match geom.level {
        RaidLevel::Raid1 => 2.0 * size_gb,
        _ if geom.is_clustered() => size_gb * (1.0 + 1.0 / geom.parity_group),
        _ => {
            let w = geom.width as f64;
            size_gb * w / (w - geom.check_disks() as f64)
        }
    })
}

// Ratios such as 0.15 / 0.05 land a hair off integers.
const CEIL_SLACK: f64 = 1e-9;

fn ceil_count(x: f64) -> usize {
    (x - CEIL_SLACK).ceil().max(0.0) as usize
}

/// Width of a striped VA: the larger of the bandwidth-driven and
/// capacity-driven widths, capped at the array size.
pub fn select_width(
    rho_total: f64,
    size_gb: f64,
    rho_max: f64,
    v_max_gb: f64,
    n_disks: usize,
    k: usize,
) -> usize {
    let bandwidth = ceil_count(rho_total / rho_max);
    let capacity = ceil_count(size_gb / v_max_gb) + k;
    bandwidth.max(capacity).min(n_disks)
}

/// Inputs for the clustered RAID5 capacity/bandwidth tradeoff of one VA
/// with read-only traffic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeclusteringBase {
    /// Nonredundant data in the VA (GB).
    pub data_gb: f64,
    /// Accesses per second the VA receives in normal mode.
    pub normal_bandwidth: f64,
    pub width: usize,
}

impl DeclusteringBase {
    /// A 0.87 GB, twelve-wide RAID5 VA at 7.61 acc/s.
    pub const REFERENCE: DeclusteringBase = DeclusteringBase {
        data_gb: 0.8,
        normal_bandwidth: 7.61,
        width: 12,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeclusteringRow {
    pub alpha: f64,
    pub parity_group: f64,
    pub capacity_gb: f64,
    /// Degraded-mode bandwidth in acc/s.
    pub bandwidth: f64,
    /// Capacity/bandwidth ratio γ_c.
    pub gamma: f64,
}

impl DeclusteringRow {
    /// Parity group size as printed in reports.
    pub fn parity_group_rounded(&self) -> usize {
        self.parity_group.round() as usize
    }
}

pub fn declustering_row(base: &DeclusteringBase, alpha: f64) -> DeclusteringRow {
    let parity_group = 1.0 + alpha * (base.width as f64 - 1.0);
    let capacity_gb = base.data_gb * (1.0 + 1.0 / parity_group);
    let bandwidth = base.normal_bandwidth * (1.0 + alpha);
    DeclusteringRow {
        alpha,
        parity_group,
        capacity_gb,
        bandwidth,
        gamma: capacity_gb / bandwidth,
    }
}

/// Everything the allocator needs to know about one VA's demand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadProfile {
    pub geometry: ArrayGeometry,
    pub rho_total_normal: f64,
    pub rho_per_vd_normal: f64,
    pub rho_per_vd_degraded: f64,
    pub normal_mix_per_vd: AccessMix,
    /// `None` for levels without a degraded model (RAID0, RAID6/7).
    pub degraded_mix_per_vd: Option<AccessMix>,
    pub effective_size_gb: f64,
    pub capacity_per_vd_gb: f64,
    /// Load multiplier for each period, peak first.
    pub period_scaling: Vec<f64>,
}

pub fn load_profile(
    load: VaLoad,
    size_gb: f64,
    st: &ServiceTimes,
    geom: ArrayGeometry,
    method: UpdateMethod,
    period_scaling: Vec<f64>,
) -> Result<LoadProfile, LoadError> {
    let w = geom.width as f64;
    let normal_total = normal_mix(load, &geom, method)?;
    let normal_mix_per_vd = normal_total.scaled(1.0 / w);
    let degraded_mix_per_vd = match degraded_mix(load, &geom) {
        Ok(m) => Some(m),
        Err(LoadError::NoDegradedModel(_)) => None,
        Err(e) => return Err(e),
    };
    let rho_total_normal = normal_total.utilization(st);
    let effective_size_gb = effective_size(size_gb, &geom)?;
    Ok(LoadProfile {
        geometry: geom,
        rho_total_normal,
        rho_per_vd_normal: rho_total_normal / w,
        rho_per_vd_degraded: degraded_mix_per_vd.map_or(f64::NAN, |m| m.utilization(st)),
        normal_mix_per_vd,
        degraded_mix_per_vd,
        effective_size_gb,
        capacity_per_vd_gb: effective_size_gb / w,
        period_scaling,
    })
}
