mod config;
mod output;

use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hda::analysis::{self, Mm1Input, ReliabilityConfig};
use hda::experiment::{
    self, ExperimentConfig, ExperimentReport, SweepDimension, AUTO_ALPHA_CANDIDATES,
};
use hda::load_model::{declustering_row, DeclusteringBase};
use hda::{run_experiment, RequestStream};
use serde::Serialize;

use output::{Command, OutputDir, RunManifest};

#[derive(Parser)]
#[command(
    name = "hda",
    version,
    about = "Virtual array allocation on heterogeneous disk arrays"
)]
struct Cli {
    /// Directory for result files.
    #[arg(long, global = true, env = "HDA_OUT_DIR", default_value = "hda-out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every policy over many request streams and tabulate allocations.
    Experiment(RunArgs),
    /// Repeat the experiment over a list of values for one parameter.
    Sweep {
        #[arg(value_parser = parse_dimension)]
        dimension: SweepDimension,
        /// Comma-separated values, e.g. 0.1,0.05,0.025
        #[arg(value_delimiter = ',', num_args = 1.., required = true)]
        values: Vec<f64>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Closed-form models.
    Analyze {
        #[command(subcommand)]
        model: Model,
    },
    /// Print the first requests of a stream as CSV.
    DumpStream {
        #[arg(long, default_value_t = 20)]
        count: u64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Repeat the run recorded in a manifest.json.
    Rerun { manifest: PathBuf },
    /// List configuration presets.
    Presets,
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    /// TOML file layered over the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    iterations: Option<usize>,
    /// normal or degraded
    #[arg(long)]
    mode: Option<String>,
    /// bandwidth, balanced or capacity
    #[arg(long)]
    workload: Option<String>,
    /// Comma-separated policy names.
    #[arg(long, value_delimiter = ',')]
    policies: Option<Vec<String>>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    rho_max: Option<f64>,
    /// Per-VD size limit as a fraction of one disk.
    #[arg(long)]
    v_max: Option<f64>,
}

#[derive(Subcommand)]
enum Model {
    /// M/M/1 response time.
    Mm1 {
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 1.0)]
        service_ms: f64,
    },
    /// Dedicated versus shared disks for RAID1 and RAID5 traffic.
    Compare {
        #[arg(long, default_value_t = 100.0)]
        lambda_r1: f64,
        #[arg(long, default_value_t = 300.0)]
        lambda_r5: f64,
        #[arg(long, default_value_t = 12)]
        disks: usize,
        /// Disks dedicated to RAID1 in the partitioned layout.
        #[arg(long, default_value_t = 3)]
        raid1_disks: usize,
        #[arg(long, default_value_t = 10.0)]
        service_ms: f64,
    },
    /// Eight mirrored disks with one failure.
    Degraded {
        #[arg(long, default_value_t = 0.1)]
        rho_vd: f64,
    },
    /// Data loss coefficients for small disk failure probability.
    Reliability {
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = Layout::All)]
        layout: Layout,
    },
    /// Capacity/bandwidth tradeoff of clustered RAID5.
    Declustering {
        #[arg(long, default_value_t = DeclusteringBase::REFERENCE.data_gb)]
        data_gb: f64,
        #[arg(long, default_value_t = DeclusteringBase::REFERENCE.normal_bandwidth)]
        bandwidth: f64,
        #[arg(long, default_value_t = DeclusteringBase::REFERENCE.width)]
        width: usize,
    },
    /// Service times and limits of the configured disk.
    Disk(RunArgs),
}

#[derive(ValueEnum, Clone, Copy)]
enum Layout {
    All,
    C1,
    C2,
}

fn parse_dimension(s: &str) -> Result<SweepDimension, String> {
    SweepDimension::parse(s)
        .ok_or_else(|| format!("unknown dimension '{s}'; valid: beta, rho-max, v-max, alpha"))
}

impl RunArgs {
    fn resolve(&self, fallback_preset: &str) -> Result<ExperimentConfig> {
        let mut file = match &self.config {
            Some(path) => config::load_file(path)?,
            None => config::FileConfig::default(),
        };
        if self.preset.is_some() {
            file.preset = self.preset.clone();
        }
        let mut c = file.resolve(fallback_preset)?;
        let cli = config::FileConfig {
            seed: self.seed,
            iterations: self.iterations,
            mode: self.mode.clone(),
            workload: self.workload.clone(),
            policies: self.policies.clone(),
            beta: self.beta,
            rho_max: self.rho_max,
            v_max: self.v_max,
            ..Default::default()
        };
        cli.apply(&mut c)?;
        c.validate()?;
        Ok(c)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Cmd::Experiment(run) => experiment_cmd(run.resolve("default")?, &cli.out),
        Cmd::Sweep {
            dimension,
            values,
            run,
        } => {
            let fallback = if dimension == SweepDimension::Alpha {
                "full-width"
            } else {
                "raid5-only"
            };
            sweep_cmd(run.resolve(fallback)?, dimension, values, &cli.out)
        }
        Cmd::Analyze { model } => analyze(model),
        Cmd::DumpStream { count, run } => dump_stream(&run.resolve("default")?, count),
        Cmd::Rerun { manifest } => {
            let m = RunManifest::load(&manifest)?;
            m.config.validate()?;
            match m.command {
                Command::Experiment => experiment_cmd(m.config, &cli.out),
                Command::Sweep { dimension, values } => {
                    sweep_cmd(m.config, dimension, values, &cli.out)
                }
            }
        }
        Cmd::Presets => {
            for (name, what) in config::PRESETS {
                println!("{name:<12} {what}");
            }
            Ok(())
        }
    }
}

fn experiment_cmd(config: ExperimentConfig, out: &Path) -> Result<()> {
    let report: ExperimentReport = run_experiment(&config)?;
    let table = output::summary_table(&report);
    let manifest = RunManifest::new(Command::Experiment, config.clone());
    let mut dir = OutputDir::create(out, manifest)?;
    dir.csv("summary.csv", &output::summary_rows(&report))?;
    dir.csv("runs.csv", &output::run_rows(&config, &report))?;
    dir.text("summary.txt", &table)?;
    let path = dir.finish()?;
    print!("{table}");
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn sweep_cmd(
    config: ExperimentConfig,
    dimension: SweepDimension,
    values: Vec<f64>,
    out: &Path,
) -> Result<()> {
    let rows = experiment::sweep(&config, dimension, &values)?;
    let table = output::sweep_table(dimension, &rows);
    let manifest = RunManifest::new(Command::Sweep { dimension, values }, config);
    let mut dir = OutputDir::create(out, manifest)?;
    dir.csv("sweep.csv", &output::sweep_rows(dimension, &rows))?;
    dir.text("sweep.txt", &table)?;
    let path = dir.finish()?;
    print!("{table}");
    eprintln!("wrote {}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct StreamRow {
    index: u64,
    raid_level: u8,
    size_gb: f64,
    arrival_rate: f64,
    read_fraction: f64,
    width: usize,
    vd_utilization: f64,
    vd_capacity_gb: f64,
}

fn dump_stream(config: &ExperimentConfig, count: u64) -> Result<()> {
    let disks = config.disks()?;
    let st = config.disk.service_times();
    let mut stream = RequestStream::new(&config.workload)?;
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    for _ in 0..count {
        let req = stream.next_request();
        let d = config.demand_for(&req, &disks)?;
        w.serialize(StreamRow {
            index: req.index,
            raid_level: req.raid_level.number(),
            size_gb: req.size_gb,
            arrival_rate: req.arrival_rate,
            read_fraction: req.read_fraction,
            width: d.width,
            vd_utilization: d.mix_per_vd.utilization(&st),
            vd_capacity_gb: d.capacity_per_vd_gb,
        })?;
    }
    w.flush()?;
    Ok(())
}

fn analyze(model: Model) -> Result<()> {
    match model {
        Model::Mm1 { rho, service_ms } => {
            let r = analysis::response_at(rho, service_ms)?;
            println!(
                "rho {rho}  service {service_ms} ms  response {r:.4} ms  ({:.4} x service)",
                r / service_ms
            );
            let arrival = rho / service_ms * 1000.0;
            let check = analysis::mm1_response(Mm1Input {
                arrival_rate: arrival,
                service_time_ms: service_ms,
            })?;
            debug_assert!((check - r).abs() < 1e-9 * r.max(1.0));
        }
        Model::Compare {
            lambda_r1,
            lambda_r5,
            disks,
            raid1_disks,
            service_ms,
        } => {
            let c =
                analysis::compare_configs(lambda_r1, lambda_r5, disks, raid1_disks, service_ms)?;
            println!("{:<28} {:>8} {:>12}", "layout", "rho", "response ms");
            println!(
                "{:<28} {:>8.3} {:>12.3}",
                "dedicated, RAID1", c.rho_c1_r1, c.r_c1_r1
            );
            println!(
                "{:<28} {:>8.3} {:>12.3}",
                "dedicated, RAID5", c.rho_c1_r5, c.r_c1_r5
            );
            println!("{:<28} {:>8.3} {:>12.3}", "shared, FCFS", c.rho_c2, c.r_c2);
            println!(
                "{:<28} {:>8.3} {:>12.3}",
                "shared, RAID1 priority", c.rho_c2_priority, c.r_c2_priority_r1
            );
            println!(
                "{:<28} {:>8.3} {:>12.3}",
                "shared, RAID5 behind RAID1", c.rho_c2, c.r_c2_priority_r5
            );
        }
        Model::Degraded { rho_vd } => {
            let e = analysis::degraded_response_example(rho_vd)?;
            println!("per-VD utilization {rho_vd}; times in units of the service time");
            println!("normal response {:.4}", e.normal);
            println!("{:>5} {:>8} {:>10}", "disk", "weight", "response");
            for ((d, w), (_, r)) in e.disk_weight.iter().zip(&e.disk_response) {
                println!("{d:>5} {w:>8.3} {r:>10.4}");
            }
            println!("degraded mean response {:.4}", e.degraded);
            for (va, r) in &e.va_response {
                println!("VA {va} {r:.4}");
            }
        }
        Model::Reliability { epsilon, layout } => {
            let layouts: &[(&str, ReliabilityConfig)] = match layout {
                Layout::All => &[("C1", ReliabilityConfig::C1), ("C2", ReliabilityConfig::C2)],
                Layout::C1 => &[("C1", ReliabilityConfig::C1)],
                Layout::C2 => &[("C2", ReliabilityConfig::C2)],
            };
            if !(epsilon > 0.0 && epsilon < 1.0) {
                bail!("epsilon must be in (0, 1), got {epsilon}");
            }
            println!(
                "{:<6} {:>14} {:>14}",
                "layout", "reliability", "(1-R)/eps^2"
            );
            for (name, cfg) in layouts {
                let r = analysis::reliability(1.0 - epsilon, *cfg);
                println!(
                    "{name:<6} {r:>14.10} {:>14.4}",
                    analysis::unreliability_coefficient(epsilon, *cfg)
                );
            }
        }
        Model::Declustering {
            data_gb,
            bandwidth,
            width,
        } => {
            if width < 2 {
                bail!("width must be at least 2");
            }
            let base = DeclusteringBase {
                data_gb,
                normal_bandwidth: bandwidth,
                width,
            };
            let gamma_d = ExperimentConfig::default().disk.capacity_bandwidth_ratio();
            println!(
                "{:>6} {:>5} {:>9} {:>10} {:>7}",
                "alpha", "G", "cap GB", "bw acc/s", "gamma"
            );
            for a in AUTO_ALPHA_CANDIDATES {
                let r = declustering_row(&base, a);
                println!(
                    "{:>6} {:>5} {:>9.2} {:>10.2} {:>7.3}",
                    a,
                    r.parity_group_rounded(),
                    r.capacity_gb,
                    r.bandwidth,
                    r.gamma
                );
            }
            let chosen = analysis::choose_alpha(gamma_d, &base, &AUTO_ALPHA_CANDIDATES);
            println!(
                "disk gamma {gamma_d:.4}; closest alpha {}",
                chosen.map_or("none".into(), |a| a.to_string())
            );
        }
        Model::Disk(run) => {
            let c = run.resolve("default")?;
            for (i, d) in c.disks()?.iter().enumerate() {
                let st = d.service_times();
                println!(
                    "disk {i:>2}: {:.2} GB  SR {:.3} ms  SW {:.3} ms  RMW {:.3} ms  max {:.2} acc/s  gamma {:.4}",
                    d.capacity_gb,
                    st.x_sr_ms,
                    st.x_sw_ms,
                    st.x_rmw_ms,
                    d.max_bandwidth(),
                    d.capacity_bandwidth_ratio()
                );
            }
        }
    }
    Ok(())
}
