//! TOML run configuration layered over a named preset.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use hda::allocator::{BestFitRule, Policy, PolicyKind};
use hda::disk_model::{DiskOverride, DiskSpec};
use hda::experiment::{Clustering, ExperimentConfig, Mode, StopRule, WidthRule};
use hda::workload::{SizeDistribution, WorkloadClass, WorkloadConfig};
use serde::Deserialize;

pub const PRESETS: &[(&str, &str)] = &[
    (
        "default",
        "12 x IBM 18ES, RAID5:RAID1 = 3:1, reads only, degraded mode, all policies",
    ),
    (
        "raid5-only",
        "RAID5 requests only, Min-F1; for rho_max / v_max sweeps",
    ),
    (
        "full-width",
        "RAID5 only across all disks, Min-F1; for declustering sweeps",
    ),
];

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let base = ExperimentConfig::default();
    let min_f1_raid5 = || {
        let mut c = base.clone();
        c.workload.f1 = 0.0;
        c.policies = vec![Policy::new(PolicyKind::MinF1)];
        c
    };
    match name {
        "default" => Ok(base),
        "raid5-only" => Ok(min_f1_raid5()),
        "full-width" => {
            let mut c = min_f1_raid5();
            c.width_rule = WidthRule::FullArray;
            c.clustering = Clustering::FixedAlpha(0.25);
            Ok(c)
        }
        other => bail!(
            "unknown preset '{other}'; valid presets: {}",
            PRESETS.iter().map(|p| p.0).collect::<Vec<_>>().join(", ")
        ),
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskSection {
    /// Only meaningful inside `[[override]]`.
    pub index: Option<usize>,
    pub preset: Option<String>,
    pub capacity_gb: Option<f64>,
    pub seek_ms: Option<f64>,
    pub rotation_ms: Option<f64>,
    pub settle_ms: Option<f64>,
    pub transfer_ms: Option<f64>,
    pub count: Option<usize>,
}

impl DiskSection {
    fn apply(&self, base: DiskSpec) -> Result<DiskSpec> {
        let mut d = match &self.preset {
            Some(name) => DiskSpec::preset(name).ok_or_else(|| {
                anyhow!(
                    "unknown disk preset '{name}'; valid: {}",
                    DiskSpec::PRESETS.join(", ")
                )
            })?,
            None => base,
        };
        set(&mut d.capacity_gb, self.capacity_gb);
        set(&mut d.seek_ms, self.seek_ms);
        set(&mut d.rotation_ms, self.rotation_ms);
        set(&mut d.settle_ms, self.settle_ms);
        set(&mut d.transfer_ms, self.transfer_ms);
        set(&mut d.count, self.count);
        Ok(d)
    }
}

/// Every key is optional; unset keys keep the preset's value.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub iterations: Option<usize>,
    pub mode: Option<String>,
    pub workload: Option<String>,
    pub policies: Option<Vec<String>>,
    pub beta: Option<f64>,
    pub best_fit: Option<String>,
    pub rho_max: Option<f64>,
    pub v_max: Option<f64>,
    pub update_method: Option<String>,
    /// "off", "auto-cbr", or a declustering ratio.
    pub clustering: Option<toml::Value>,
    pub width_rule: Option<String>,
    pub skip_failures: Option<u32>,
    pub reserved_bandwidth: Option<f64>,
    pub max_requests: Option<u64>,
    pub f1: Option<f64>,
    pub read_fraction: Option<f64>,
    pub kappa5: Option<f64>,
    pub kappa_ratio: Option<f64>,
    pub mean_size_r1_gb: Option<f64>,
    pub mean_size_r5_gb: Option<f64>,
    pub periods: Option<Vec<f64>>,
    pub strip_kb: Option<u32>,
    pub size_distribution: Option<String>,
    pub disk: Option<DiskSection>,
    #[serde(default, rename = "override")]
    pub overrides: Vec<DiskSection>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

pub fn load_file(path: &Path) -> Result<FileConfig> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn parse_policies(names: &[String]) -> Result<Vec<PolicyKind>> {
    names
        .iter()
        .map(|n| {
            PolicyKind::parse(n).ok_or_else(|| {
                anyhow!(
                    "unknown policy '{n}'; valid policies: {}",
                    PolicyKind::valid_names()
                )
            })
        })
        .collect()
}

pub fn parse_workload(name: &str) -> Result<WorkloadClass> {
    WorkloadClass::parse(name)
        .ok_or_else(|| anyhow!("unknown workload '{name}'; valid: bandwidth, balanced, capacity"))
}

pub fn parse_mode(name: &str) -> Result<Mode> {
    Mode::parse(name).ok_or_else(|| anyhow!("unknown mode '{name}'; valid: normal, degraded"))
}

impl FileConfig {
    /// Builds the experiment config: preset first, then this file.
    pub fn resolve(&self, fallback_preset: &str) -> Result<ExperimentConfig> {
        let mut c = preset(self.preset.as_deref().unwrap_or(fallback_preset))?;
        self.apply(&mut c)?;
        Ok(c)
    }

    pub fn apply(&self, c: &mut ExperimentConfig) -> Result<()> {
        if let Some(w) = &self.workload {
            let class = parse_workload(w)?;
            c.workload.kappa5 = WorkloadConfig::for_class(class).kappa5;
        }
        let w = &mut c.workload;
        set(&mut w.seed, self.seed);
        set(&mut w.f1, self.f1);
        set(&mut w.read_fraction, self.read_fraction);
        set(&mut w.kappa5, self.kappa5);
        set(&mut w.kappa_ratio, self.kappa_ratio);
        set(&mut w.mean_size_r1_gb, self.mean_size_r1_gb);
        set(&mut w.mean_size_r5_gb, self.mean_size_r5_gb);
        set(&mut w.periods, self.periods.clone());
        set(&mut w.strip_kb, self.strip_kb);
        if let Some(d) = &self.size_distribution {
            w.size_distribution = match d.as_str() {
                "exponential" => SizeDistribution::Exponential,
                "fixed" => SizeDistribution::Fixed,
                other => bail!("unknown size_distribution '{other}'; valid: exponential, fixed"),
            };
        }

        set(&mut c.iterations, self.iterations);
        if let Some(m) = &self.mode {
            c.mode = parse_mode(m)?;
        }
        if let Some(p) = &self.policies {
            c.policies = parse_policies(p)?.into_iter().map(Policy::new).collect();
        }
        if let Some(rule) = &self.best_fit {
            let rule = match rule.as_str() {
                "bandwidth" => BestFitRule::Bandwidth,
                "combined" => BestFitRule::Combined,
                other => bail!("unknown best_fit '{other}'; valid: bandwidth, combined"),
            };
            c.policies.iter_mut().for_each(|p| p.best_fit = rule);
        }
        if let Some(beta) = self.beta {
            c.policies.iter_mut().for_each(|p| p.beta = beta);
        }
        set(&mut c.rho_max, self.rho_max);
        set(&mut c.v_max_fraction, self.v_max);
        if let Some(m) = &self.update_method {
            c.update_method = m
                .parse()
                .map_err(|_| anyhow!("unknown update_method '{m}'; valid: A, B, C, D"))?;
        }
        if let Some(v) = &self.clustering {
            c.clustering = match v {
                toml::Value::String(s) if s == "off" => Clustering::Off,
                toml::Value::String(s) if s == "auto-cbr" => Clustering::AutoCbr,
                toml::Value::Float(a) => Clustering::FixedAlpha(*a),
                toml::Value::Integer(a) => Clustering::FixedAlpha(*a as f64),
                other => bail!("clustering must be \"off\", \"auto-cbr\" or a ratio, got {other}"),
            };
        }
        if let Some(r) = &self.width_rule {
            c.width_rule = match r.as_str() {
                "computed" => WidthRule::Computed,
                "full" => WidthRule::FullArray,
                other => bail!("unknown width_rule '{other}'; valid: computed, full"),
            };
        }
        if let Some(n) = self.skip_failures {
            c.stop_rule = if n == 0 {
                StopRule::FirstFailure
            } else {
                StopRule::SkipFailures(n)
            };
        }
        set(&mut c.reserved_bandwidth, self.reserved_bandwidth);
        set(&mut c.max_requests, self.max_requests);
        if let Some(d) = &self.disk {
            if d.index.is_some() {
                bail!("[disk] takes no index; use [[override]] for single positions");
            }
            c.disk = d.apply(c.disk)?;
        }
        for o in &self.overrides {
            let index = o
                .index
                .ok_or_else(|| anyhow!("[[override]] needs an index"))?;
            c.overrides.push(DiskOverride {
                index,
                spec: o.apply(c.disk)?,
            });
        }
        Ok(())
    }
}
