//! Exit criteria. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any failed. Runs without the libtest harness so PASS lines are not
//! swallowed by output capture.

mod common;

use hda::allocator::{Policy, PolicyKind};
use hda::analysis::{
    degraded_response_example, response_at, unreliability_coefficient, ReliabilityConfig,
};
use hda::disk_model::DiskSpec;
use hda::experiment::{run_experiment, sweep, ExperimentConfig, Mode, SweepDimension, WidthRule};
use hda::load_model::{
    declustering_row, normal_load, ArrayGeometry, DeclusteringBase, RaidLevel, UpdateMethod, VaLoad,
};
use hda::workload::{WorkloadClass, WorkloadConfig};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use std::process::ExitCode;
use std::sync::atomic::{AtomicU32, Ordering};

static FAILED: AtomicU32 = AtomicU32::new(0);

fn verdict(n: u32, name: &str, checks: Vec<(String, bool)>) {
    let failed: Vec<&String> = checks.iter().filter(|c| !c.1).map(|c| &c.0).collect();
    let detail: Vec<&str> = checks.iter().map(|c| c.0.as_str()).collect();
    if failed.is_empty() {
        println!("PASS criterion {n} ({name}): {}", detail.join("; "));
    } else {
        println!("FAIL criterion {n} ({name}): {}", detail.join("; "));
        println!("    failing checks: {failed:?}");
        FAILED.fetch_add(1, Ordering::SeqCst);
    }
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn min_f1(config: ExperimentConfig) -> ExperimentConfig {
    let beta = config.policies.first().map_or(1.0, |p| p.beta);
    ExperimentConfig {
        policies: vec![Policy::new(PolicyKind::MinF1).with_beta(beta)],
        ..config
    }
}

fn class_config(class: WorkloadClass) -> ExperimentConfig {
    ExperimentConfig {
        workload: WorkloadConfig::for_class(class),
        mode: Mode::Degraded,
        ..ExperimentConfig::default()
    }
}

fn mean_total(config: &ExperimentConfig) -> f64 {
    run_experiment(config).unwrap().policies[0].mean_total
}

fn criterion_1_service_times() {
    let d = DiskSpec::preset("ibm-18es").unwrap();
    let st = d.service_times();
    verdict(
        1,
        "service times",
        vec![
            (
                format!("x_SR={:.3}", st.x_sr_ms),
                within(st.x_sr_ms, 11.49, 0.01),
            ),
            (
                format!("x_RMW={:.3}", st.x_rmw_ms),
                within(st.x_rmw_ms, 19.82, 0.01),
            ),
            (
                format!("max bw={:.2}", d.max_bandwidth()),
                within(d.max_bandwidth(), 87.0, 0.5),
            ),
            (
                format!("gamma_d={:.4}", d.capacity_bandwidth_ratio()),
                within(d.capacity_bandwidth_ratio(), 0.105, 0.001),
            ),
        ],
    );
}

fn criterion_2_declustering_table() {
    // alpha, capacity, bandwidth, gamma
    let table = [
        (0.125, 1.14, 8.56, 0.133),
        (0.25, 1.01, 9.51, 0.106),
        (0.375, 0.96, 10.46, 0.091),
        (0.5, 0.92, 11.42, 0.081),
        (0.625, 0.90, 12.37, 0.073),
        (0.75, 0.89, 13.32, 0.067),
        (0.875, 0.88, 14.27, 0.061),
        (1.0, 0.87, 15.22, 0.057),
    ];
    let checks = table
        .iter()
        .map(|&(alpha, cap, bw, gamma)| {
            let row = declustering_row(&DeclusteringBase::REFERENCE, alpha);
            let ok = within(row.capacity_gb, cap, 0.01)
                && within(row.bandwidth, bw, 0.01)
                && within(row.gamma, gamma, 0.01);
            (
                format!(
                    "a={alpha}: {:.3}/{:.3}/{:.4}",
                    row.capacity_gb, row.bandwidth, row.gamma
                ),
                ok,
            )
        })
        .collect();
    verdict(2, "declustering table", checks);
}

fn criterion_3_analytic_examples() {
    let x = DiskSpec::IBM_18ES.service_times().x_sr_ms;
    let r = response_at(0.8, x).unwrap();
    let degraded = degraded_response_example(0.1).unwrap().degraded;
    let c1 = unreliability_coefficient(1e-4, ReliabilityConfig::C1);
    let c2 = unreliability_coefficient(1e-4, ReliabilityConfig::C2);
    verdict(
        3,
        "analytic examples",
        vec![
            (
                format!("R(0.8)/x={}", r / x),
                r == 5.0 * x || within(r / x, 5.0, 1e-12),
            ),
            (
                format!("degraded R'/x={degraded:.4} (want [1.50, 1.51])"),
                (1.50..=1.51).contains(&degraded),
            ),
            (
                format!("C1 coefficient={c1:.3}"),
                within(c1 / 16.0, 1.0, 0.01),
            ),
            (
                format!("C2 coefficient={c2:.3}"),
                within(c2 / 32.0, 1.0, 0.01),
            ),
        ],
    );
}

fn criterion_4_policy_ordering() {
    let targets = [
        (WorkloadClass::BandwidthBound, 95.2),
        (WorkloadClass::Balanced, 112.8),
        (WorkloadClass::CapacityBound, 139.5),
    ];
    let mut checks = Vec::new();
    for (class, target) in targets {
        let report = run_experiment(&class_config(class)).unwrap();
        let t = |k| report.summary(k).unwrap().mean_total;
        let (f1, f2, wf, bf) = (
            t(PolicyKind::MinF1),
            t(PolicyKind::MinF2),
            t(PolicyKind::WorstFit),
            t(PolicyKind::BestFit),
        );
        let (rr, ff, rnd) = (
            t(PolicyKind::RoundRobin),
            t(PolicyKind::FirstFit),
            t(PolicyKind::Random),
        );
        checks.push((
            format!(
                "{}: F1 {f1:.1} >= F2 {f2:.1} >= WF {wf:.1} >= BF {bf:.1}",
                class.name()
            ),
            f1 >= f2 && f2 >= wf && wf >= bf,
        ));
        checks.push((
            format!(
                "{}: F1 >= RR {rr:.1}, FF {ff:.1}, Rand {rnd:.1}",
                class.name()
            ),
            f1 >= rr && f1 >= ff && f1 >= rnd,
        ));
        checks.push((
            format!("{}: F1 {f1:.1} vs {target} +-15%", class.name()),
            (f1 - target).abs() <= 0.15 * target,
        ));
    }
    verdict(4, "policy ordering", checks);
}

fn criterion_5_normal_vs_degraded() {
    let degraded = min_f1(class_config(WorkloadClass::BandwidthBound));
    let normal = ExperimentConfig {
        mode: Mode::Normal,
        ..degraded.clone()
    };
    let (n, d) = (mean_total(&normal), mean_total(&degraded));
    let ratio = n / d;
    verdict(
        5,
        "normal vs degraded",
        vec![(
            format!("normal {n:.1} / degraded {d:.1} = {ratio:.3} (want [1.7, 2.3])"),
            (1.7..=2.3).contains(&ratio),
        )],
    );
}

fn criterion_6_beta_sensitivity() {
    let base = min_f1(class_config(WorkloadClass::CapacityBound));
    let rows = sweep(&base, SweepDimension::Beta, &[0.0, 1.0, 2.0]).unwrap();
    let t: Vec<f64> = rows
        .iter()
        .map(|r| r.report.policies[0].mean_total)
        .collect();
    verdict(
        6,
        "beta sensitivity",
        vec![
            (
                format!("beta 1 {:.1} vs beta 0 {:.1}", t[1], t[0]),
                t[1] >= 1.08 * t[0],
            ),
            (
                format!("beta 2 {:.1} vs beta 1 {:.1}", t[2], t[1]),
                (t[2] - t[1]).abs() < 0.02 * t[1],
            ),
        ],
    );
}

fn raid5_only(class: WorkloadClass) -> ExperimentConfig {
    let mut c = min_f1(class_config(class));
    c.workload.f1 = 0.0;
    c.workload.read_fraction = 1.0;
    c
}

fn criterion_7_rho_max_insensitivity() {
    let rhos = [0.1, 0.05, 0.025];
    let totals = |class| -> Vec<f64> {
        sweep(&raid5_only(class), SweepDimension::RhoMax, &rhos)
            .unwrap()
            .iter()
            .map(|r| r.report.policies[0].mean_total)
            .collect()
    };
    let cap = totals(WorkloadClass::CapacityBound);
    let bal = totals(WorkloadClass::Balanced);
    verdict(
        7,
        "rho_max insensitivity",
        vec![
            (
                format!("capacity-bound {cap:?}"),
                cap.windows(2).all(|w| w[0] == w[1]),
            ),
            (
                format!("balanced {bal:?}"),
                bal.windows(2).all(|w| w[0] <= w[1]),
            ),
        ],
    );
}

fn criterion_8_alpha_sweep() {
    let config = ExperimentConfig {
        width_rule: WidthRule::FullArray,
        ..raid5_only(WorkloadClass::BandwidthBound)
    };
    let rows = sweep(&config, SweepDimension::Alpha, &[0.25, 0.5, 0.75]).unwrap();
    let t: Vec<f64> = rows
        .iter()
        .map(|r| r.report.policies[0].mean_total)
        .collect();
    let tags: Vec<&str> = rows.iter().map(|r| r.bound_tag()).collect();
    verdict(
        8,
        "alpha sweep",
        vec![(format!("totals {t:?} {tags:?}"), t[0] > t[1] && t[1] > t[2])],
    );
}

fn run_props<S: Strategy>(
    strategy: S,
    cases: u32,
    test: impl Fn(S::Value) -> Result<(), String>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&strategy, |v| test(v).map_err(TestCaseError::fail))
        .map_err(|e| e.to_string())
}

fn criterion_9_property_suites() {
    let mut checks = Vec::new();
    let mut record = |name: &str, r: Result<(), String>| {
        let ok = r.is_ok();
        checks.push((
            format!("{name}: {}", r.err().unwrap_or_else(|| "ok".into())),
            ok,
        ));
    };

    let packing = run_props(
        (0usize..3, any::<u64>(), prop::bool::ANY),
        24,
        |(class, seed, normal)| {
            let mut c = class_config(WorkloadClass::ALL[class]);
            if normal {
                c.mode = Mode::Normal;
            }
            c.workload.periods = vec![1.0, 0.6];
            common::check_packing(&c, seed)
        },
    );
    record("packing", packing);

    let utils = prop::collection::vec((0.0..0.99f64, 0.0..0.99f64), 1..=5);
    let rollback = run_props(
        (
            utils.clone(),
            1usize..=5,
            0.0..0.6f64,
            0.0..9.0f64,
            0usize..7,
        ),
        256,
        |(u, w, bw, cap, k)| {
            common::check_rollback(
                &common::state_with(&u),
                &common::demand(w, bw, cap),
                PolicyKind::ALL[k],
            )
        },
    );
    record("rollback", rollback);

    let base = ExperimentConfig {
        iterations: 5,
        ..ExperimentConfig::default()
    };
    record(
        "replay determinism",
        common::check_replay_determinism(&base),
    );
    record(
        "common random numbers",
        common::check_common_random_numbers(&base, 5),
    );
    record(
        "bookkeeping",
        run_props(any::<u64>(), 8, |seed| {
            common::check_bookkeeping(&base, seed)
        }),
    );

    // constructed so that RMW = SR + SW
    let d = DiskSpec {
        capacity_gb: 9.0,
        seek_ms: 3.0,
        rotation_ms: 9.0,
        settle_ms: 0.5,
        transfer_ms: 1.0,
        count: 12,
    };
    let identity = run_props(
        (0.1..200.0f64, 0.0..=1.0f64, 2usize..=12),
        256,
        |(rate, fr, w)| {
            let st = d.service_times();
            let load = VaLoad {
                arrival_rate: rate,
                read_fraction: fr,
            };
            let g = ArrayGeometry::striped(RaidLevel::Raid5, w);
            let a = normal_load(load, &st, &g, UpdateMethod::A)
                .unwrap()
                .rho_total;
            let b = normal_load(load, &st, &g, UpdateMethod::B)
                .unwrap()
                .rho_total;
            if (a - b).abs() <= 1e-9 * a.max(1.0) {
                Ok(())
            } else {
                Err(format!("method A {a} vs B {b}"))
            }
        },
    );
    record("method A = B", identity);

    let oracle = run_props(
        (utils.clone(), 0.0..0.6f64, 0.0..4.0f64),
        512,
        |(u, bw, cap)| common::check_oracle_single(&u, &common::demand(1, bw, cap)),
    );
    record("oracle W=1", oracle);
    let oracle2 = run_props((utils, 0.0..0.6f64, 0.0..4.0f64), 512, |(u, bw, cap)| {
        common::check_oracle_pair(&u, &common::demand(2, bw, cap))
    });
    record("oracle W=2", oracle2);

    verdict(9, "property suites", checks);
}

fn main() -> ExitCode {
    criterion_1_service_times();
    criterion_2_declustering_table();
    criterion_3_analytic_examples();
    criterion_4_policy_ordering();
    criterion_5_normal_vs_degraded();
    criterion_6_beta_sensitivity();
    criterion_7_rho_max_insensitivity();
    criterion_8_alpha_sweep();
    criterion_9_property_suites();
    let failed = FAILED.load(Ordering::SeqCst);
    println!("{} of {} criteria passed", 9 - failed, 9);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
