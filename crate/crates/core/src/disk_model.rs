//! Physical disk constants and the service times derived from them.
//!
//! Times are milliseconds, rates are accesses per second and sizes are GB.
//! Nothing outside this module converts between them except through
//! [`ServiceTimes::utilization`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("disk capacity must be positive, got {0} GB")]
    Capacity(f64),
    #[error("{field} must be a finite non-negative time, got {value} ms")]
    Time { field: &'static str, value: f64 },
    #[error("single-read time must be positive")]
    ZeroReadTime,
    #[error("disk count must be at least 1")]
    NoDisks,
    #[error("disk override index {index} is out of range for {count} disks")]
    OverrideIndex { index: usize, count: usize },
}

/// Constants of one drive model plus the number of such drives in the array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskSpec {
    pub capacity_gb: f64,
    pub seek_ms: f64,
    /// Full rotation time.
    pub rotation_ms: f64,
    /// Head settling time charged to writes.
    pub settle_ms: f64,
    /// Mean transfer time of one small block, averaged over zones.
    pub transfer_ms: f64,
    pub count: usize,
}

impl DiskSpec {
    /// IBM DNES-309170W ("18ES"), twelve drives.
    pub const IBM_18ES: DiskSpec = DiskSpec {
        capacity_gb: 9.17,
        seek_ms: 7.16,
        rotation_ms: 8.33,
        settle_ms: 0.14,
        transfer_ms: 0.16,
        count: 12,
    };

    pub fn preset(name: &str) -> Option<DiskSpec> {
        match name {
            "ibm-18es" => Some(Self::IBM_18ES),
            _ => None,
        }
    }

    pub const PRESETS: &'static [&'static str] = &["ibm-18es"];

    pub fn validate(&self) -> Result<(), SpecError> {
        if !(self.capacity_gb.is_finite() && self.capacity_gb > 0.0) {
            return Err(SpecError::Capacity(self.capacity_gb));
        }
        for (field, value) in [
            ("seek_ms", self.seek_ms),
            ("rotation_ms", self.rotation_ms),
            ("settle_ms", self.settle_ms),
            ("transfer_ms", self.transfer_ms),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(SpecError::Time { field, value });
            }
        }
        if self.service_times().x_sr_ms <= 0.0 {
            return Err(SpecError::ZeroReadTime);
        }
        if self.count == 0 {
            return Err(SpecError::NoDisks);
        }
        Ok(())
    }

    /// Seek plus half a rotation plus transfer for a read; writes add the
    /// settle time and read-modify-write adds a full rotation.
    pub fn service_times(&self) -> ServiceTimes {
        let x_sr_ms = self.seek_ms + self.rotation_ms / 2.0 + self.transfer_ms;
        ServiceTimes::new(x_sr_ms, self.settle_ms, self.rotation_ms)
    }

    /// Small random reads per second one drive sustains.
    pub fn max_bandwidth(&self) -> f64 {
        self.service_times().max_bandwidth()
    }

    /// GB of capacity per access/s of bandwidth (γ_d).
    pub fn capacity_bandwidth_ratio(&self) -> f64 {
        self.capacity_gb / self.max_bandwidth()
    }
}

/// Replaces the drive model at one position of an otherwise uniform array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskOverride {
    pub index: usize,
    pub spec: DiskSpec,
}

/// Expands `base` into one spec per physical disk, applying overrides.
///
/// The `count` field of each override is ignored; the array size always
/// comes from `base.count`.
pub fn expand_disks(
    base: &DiskSpec,
    overrides: &[DiskOverride],
) -> Result<Vec<DiskSpec>, SpecError> {
    base.validate()?;
    let mut disks = vec![*base; base.count];
    for o in overrides {
        if o.index >= base.count {
            return Err(SpecError::OverrideIndex {
                index: o.index,
                count: base.count,
            });
        }
        let spec = DiskSpec { count: 1, ..o.spec };
        spec.validate()?;
        disks[o.index] = spec;
    }
    Ok(disks)
}

/// Mean single-read, single-write and read-modify-write times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServiceTimes {
    pub x_sr_ms: f64,
    pub x_sw_ms: f64,
    pub x_rmw_ms: f64,
}

impl ServiceTimes {
    pub fn new(x_sr_ms: f64, settle_ms: f64, rotation_ms: f64) -> Self {
        Self {
            x_sr_ms,
            x_sw_ms: x_sr_ms + settle_ms,
            x_rmw_ms: x_sr_ms + rotation_ms,
        }
    }

    pub fn max_bandwidth(&self) -> f64 {
        1000.0 / self.x_sr_ms
    }

    /// Utilization from access rates (acc/s) of each kind.
    pub fn utilization(&self, sr_rate: f64, sw_rate: f64, rmw_rate: f64) -> f64 {
        (sr_rate * self.x_sr_ms + sw_rate * self.x_sw_ms + rmw_rate * self.x_rmw_ms) / 1000.0
    }
}
