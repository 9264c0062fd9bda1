//! Run manifests and report files. Every file starts with the manifest hash.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use hda::experiment::{ExperimentConfig, ExperimentReport, SweepDimension, SweepRow};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Command {
    Experiment,
    Sweep {
        dimension: SweepDimension,
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub outputs: Vec<String>,
    pub hash: String,
}

#[derive(Serialize)]
struct Hashed<'a> {
    tool: &'a str,
    version: &'a str,
    command: &'a Command,
    config: &'a ExperimentConfig,
}

impl RunManifest {
    pub fn new(command: Command, config: ExperimentConfig) -> Self {
        let tool = "hda".to_string();
        let version = env!("CARGO_PKG_VERSION").to_string();
        let hashed = Hashed {
            tool: &tool,
            version: &version,
            command: &command,
            config: &config,
        };
        let bytes = serde_json::to_vec(&hashed).expect("config serializes");
        let hash = format!("{:x}", Sha256::digest(&bytes));
        Self {
            tool,
            version,
            command,
            seed: config.workload.seed,
            config,
            outputs: Vec::new(),
            hash,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

pub struct OutputDir {
    dir: PathBuf,
    manifest: RunManifest,
}

impl OutputDir {
    pub fn create(dir: &Path, manifest: RunManifest) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            manifest,
        })
    }

    fn open(&mut self, name: &str) -> Result<File> {
        let path = self.dir.join(name);
        let mut f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        writeln!(f, "# manifest {}", self.manifest.hash)?;
        self.manifest.outputs.push(name.to_string());
        Ok(f)
    }

    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let f = self.open(name)?;
        let mut w = csv::Writer::from_writer(f);
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let mut f = self.open(name)?;
        f.write_all(body.as_bytes())?;
        Ok(())
    }

    pub fn finish(self) -> Result<PathBuf> {
        let path = self.dir.join("manifest.json");
        let json = serde_json::to_string_pretty(&self.manifest)?;
        fs::write(&path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

#[derive(Serialize)]
pub struct SummaryRow {
    pub policy: String,
    pub beta: f64,
    pub best: usize,
    pub r1: f64,
    pub r5: f64,
    pub total: f64,
    pub bandwidth_mean: f64,
    pub bandwidth_std: f64,
    pub capacity_mean: f64,
    pub capacity_std: f64,
    pub failed_bandwidth: usize,
    pub failed_capacity: usize,
    pub failed_width: usize,
}

pub fn summary_rows(report: &ExperimentReport) -> Vec<SummaryRow> {
    report
        .policies
        .iter()
        .map(|p| SummaryRow {
            policy: p.policy.kind.name().to_string(),
            beta: p.policy.beta,
            best: p.best_count,
            r1: p.mean_r1,
            r5: p.mean_r5,
            total: p.mean_total,
            bandwidth_mean: p.bandwidth_mean,
            bandwidth_std: p.bandwidth_std,
            capacity_mean: p.capacity_mean,
            capacity_std: p.capacity_std,
            failed_bandwidth: p.failures.bandwidth,
            failed_capacity: p.failures.capacity,
            failed_width: p.failures.distinct_disks,
        })
        .collect()
}

#[derive(Serialize)]
pub struct RunRow {
    pub iteration: usize,
    pub policy: String,
    pub r1: u64,
    pub r5: u64,
    pub total: u64,
    pub failure: String,
}

pub fn run_rows(config: &ExperimentConfig, report: &ExperimentReport) -> Vec<RunRow> {
    report
        .runs
        .iter()
        .map(|r| RunRow {
            iteration: r.iteration,
            policy: config.policies[r.policy].kind.name().to_string(),
            r1: r.r1,
            r5: r.r5,
            total: r.total(),
            failure: r.failure.map(|f| f.to_string()).unwrap_or_default(),
        })
        .collect()
}

/// Best / R1 / R5 / R1&R5 per policy, then utilization as percentages.
pub fn summary_table(report: &ExperimentReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<12} {:>5} {:>7} {:>7} {:>7}   {:>6} {:>5} {:>6} {:>5}",
        "method", "Best", "R1", "R5", "R1&R5", "bw%", "std", "cap%", "std"
    );
    for p in &report.policies {
        let _ = writeln!(
            s,
            "{:<12} {:>5} {:>7.1} {:>7.1} {:>7.1}   {:>6.1} {:>5.1} {:>6.1} {:>5.1}",
            p.policy.kind.name(),
            p.best_count,
            p.mean_r1,
            p.mean_r5,
            p.mean_total,
            100.0 * p.bandwidth_mean,
            100.0 * p.bandwidth_std,
            100.0 * p.capacity_mean,
            100.0 * p.capacity_std,
        );
    }
    s
}

#[derive(Serialize)]
pub struct SweepCsvRow {
    pub dimension: String,
    pub value: f64,
    pub policy: String,
    pub best: usize,
    pub r1: f64,
    pub r5: f64,
    pub total: f64,
    pub bound: String,
}

pub fn sweep_rows(dimension: SweepDimension, rows: &[SweepRow]) -> Vec<SweepCsvRow> {
    rows.iter()
        .flat_map(|row| {
            row.report.policies.iter().map(move |p| SweepCsvRow {
                dimension: dimension.name().to_string(),
                value: row.value,
                policy: p.policy.kind.name().to_string(),
                best: p.best_count,
                r1: p.mean_r1,
                r5: p.mean_r5,
                total: p.mean_total,
                bound: row.bound.map(|b| b.to_string()).unwrap_or_default(),
            })
        })
        .collect()
}

/// One row per swept value, mean totals per policy, tagged with the
/// resource that ran out first.
pub fn sweep_table(dimension: SweepDimension, rows: &[SweepRow]) -> String {
    let mut s = String::new();
    let Some(first) = rows.first() else {
        return s;
    };
    let _ = write!(s, "{:<8}", dimension.name());
    for p in &first.report.policies {
        let _ = write!(s, " {:>14}", p.policy.kind.name());
    }
    s.push('\n');
    for row in rows {
        let _ = write!(s, "{:<8}", row.value);
        for p in &row.report.policies {
            let cell = format!("{:.1} {}", p.mean_total, row.bound_tag());
            let _ = write!(s, " {:>14}", cell.trim_end());
        }
        s.push('\n');
    }
    s
}
