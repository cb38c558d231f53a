//! Acceptance gate: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines as
//! they complete. The Monte Carlo criteria take a few minutes total.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use bullwhip::analytics::{self, ModelParams};
use bullwhip::cli;
use bullwhip::simulator::{self, SimulationConfig};
use bullwhip::stats::replication_stats;
use bullwhip::stochastic::{DistributionSpec, Role};

fn report(criterion: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("acceptance {criterion}: PASS");
    } else {
        println!("acceptance {criterion}: FAIL");
        for f in &failures {
            println!("  {f}");
        }
        panic!("{criterion}: {} check(s) failed", failures.len());
    }
}

/// Moments used in the published tables: mu_D=2, sigma_D=1 (cv 0.5), mu_L=3,
/// sigma_L=2.
fn table_params(n: u32, m: u32) -> ModelParams<f64> {
    ModelParams {
        mean_demand: 2.0,
        var_demand: 1.0,
        mean_lead_time: 3.0,
        var_lead_time: 4.0,
        demand_window: n,
        lead_time_window: m,
    }
}

/// The demand/lead-time laws realizing the table moments: normal(2,1) demand and
/// the two-point integer lead-time law {1,5} with mean 3 and variance 4.
fn table_config(n: u32, m: u32) -> SimulationConfig {
    SimulationConfig {
        demand: DistributionSpec::Normal { mean: 2.0, sd: 1.0 },
        lead_time: DistributionSpec::Empirical {
            values: vec![1, 5],
            probs: vec![0.5, 0.5],
        },
        n,
        m,
        ..SimulationConfig::default()
    }
}

fn random_params(rng: &mut ChaCha12Rng) -> ModelParams<f64> {
    ModelParams {
        mean_demand: rng.gen_range(0.5..10.0),
        var_demand: rng.gen_range(0.01..25.0),
        mean_lead_time: rng.gen_range(1.0..10.0),
        var_lead_time: rng.gen_range(0.0..25.0),
        demand_window: rng.gen_range(1..=100),
        lead_time_window: rng.gen_range(1..=100),
    }
}

/// All 48 published rows, frozen as printed: (m, BM1, BM2, BM) at 5 decimals,
/// for demand windows n = 5, 10, 20, 30.
const PUBLISHED_TABLES: [(u32, [(u32, &str, &str, &str); 12]); 4] = [
    (5, [
        (1, "1.60000", "32.00000", "36.52000"),
        (3, "0.24888", "3.55555", "6.72444"),
        (5, "0.11520", "1.28000", "4.31520"),
        (10, "0.04480", "0.32000", "3.28480"),
        (15, "0.02702", "0.14222", "3.08924"),
        (20, "0.01920", "0.08000", "3.01920"),
        (25, "0.01484", "0.05120", "2.98604"),
        (30, "0.01208", "0.03555", "2.96764"),
        (35, "0.01018", "0.02612", "2.95631"),
        (40, "0.00880", "0.02000", "2.94880"),
        (45, "0.00774", "0.01580", "2.94354"),
        (50, "0.00691", "0.01280", "2.93971"),
    ]),
    (10, [
        (1, "0.80000", "32.00000", "34.58000"),
        (3, "0.10666", "3.55555", "5.44222"),
        (5, "0.04480", "1.28000", "3.10480"),
        (10, "0.01520", "0.32000", "2.11520"),
        (15, "0.00853", "0.14222", "1.93075"),
        (20, "0.00580", "0.08000", "1.86580"),
        (25, "0.00435", "0.05120", "1.83555"),
        (30, "0.00346", "0.03555", "1.81902"),
        (35, "0.00287", "0.02612", "1.80899"),
        (40, "0.00245", "0.02000", "1.80245"),
        (45, "0.00213", "0.01580", "1.79793"),
        (50, "0.00188", "0.01280", "1.79468"),
    ]),
    (20, [
        (1, "0.40000", "32.00000", "33.74500"),
        (3, "0.04888", "3.55555", "4.94944"),
        (5, "0.01920", "1.28000", "2.64420"),
        (10, "0.00580", "0.32000", "1.67080"),
        (15, "0.00302", "0.14222", "1.49024"),
        (20, "0.00195", "0.08000", "1.42695"),
        (25, "0.00140", "0.05120", "1.39760"),
        (30, "0.00108", "0.03555", "1.38164"),
        (35, "0.00088", "0.02612", "1.37200"),
        (40, "0.00073", "0.02000", "1.36573"),
        (45, "0.00063", "0.01580", "1.36143"),
        (50, "0.00055", "0.01280", "1.35835"),
    ]),
    (30, [
        (1, "0.26666", "32.00000", "33.48666"),
        (3, "0.03160", "3.55555", "4.80716"),
        (5, "0.01208", "1.28000", "2.51208"),
        (10, "0.00346", "0.32000", "1.54346"),
        (15, "0.00173", "0.14222", "1.36396"),
        (20, "0.00108", "0.08000", "1.30108"),
        (25, "0.00076", "0.05120", "1.27196"),
        (30, "0.00058", "0.03555", "1.25613"),
        (35, "0.00046", "0.02612", "1.24658"),
        (40, "0.00038", "0.02000", "1.24038"),
        (45, "0.00032", "0.01580", "1.23612"),
        (50, "0.00028", "0.01280", "1.23308"),
    ]),
];

#[test]
fn criterion_1_table_reproduction() {
    let mut failures = Vec::new();
    for (id, (n, rows)) in PUBLISHED_TABLES.iter().enumerate() {
        let csv = cli::cmd_table(id as u8 + 1).expect("table command");
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("m,BM1,BM2,BM"));
        let body: Vec<&str> = lines.collect();
        if body.len() != rows.len() {
            failures.push(format!("table {} has {} rows, want {}", id + 1, body.len(), rows.len()));
            continue;
        }
        for (line, (m, bm1, bm2, bm)) in body.iter().zip(rows) {
            // Exact printed match is stronger than the 5e-6 absolute tolerance.
            let want = format!("{m},{bm1},{bm2},{bm}");
            if *line != want {
                failures.push(format!("table {} (n={n}): got {line:?}, want {want:?}", id + 1));
            }
            let cells: Vec<f64> = line.split(',').skip(1).map(|c| c.parse().unwrap()).collect();
            for (got, want) in cells.iter().zip([bm1, bm2, bm]) {
                let want: f64 = want.parse().unwrap();
                if (got - want).abs() >= 5e-6 {
                    failures.push(format!("table {} m={m}: {got} vs {want}", id + 1));
                }
            }
        }
    }
    report("criterion 1 (table reproduction, 48 rows)", failures);
}

#[test]
fn criterion_2_measure_matches_order_variance() {
    let mut rng = ChaCha12Rng::seed_from_u64(0x5EED_0002);
    let mut failures = Vec::new();
    for i in 0..1000 {
        let p = random_params(&mut rng);
        let bm = analytics::bullwhip_measure(&p).unwrap().bm;
        let var_q = analytics::order_variance(&p).unwrap();
        let rel = (bm * p.var_demand - var_q).abs() / var_q;
        if rel > 1e-12 {
            failures.push(format!("set {i}: relative gap {rel:e} for {p:?}"));
        }
    }
    report("criterion 2 (BM * var_D == Var q on 1000 random sets)", failures);
}

#[test]
fn criterion_3_monte_carlo_grid() {
    let demand_windows = [5u32, 10, 20, 30];
    let lead_windows = [1u32, 3, 5, 10, 20, 50];
    let mut failures = Vec::new();
    let mut misses = 0;
    let mut cell = 0u64;
    for n in demand_windows {
        for m in lead_windows {
            let warmup = (n.max(m) as u64 + 30).max(40);
            let config = SimulationConfig {
                horizon: warmup + 1_000_000,
                warmup: Some(warmup),
                replications: 32,
                seed: 9_000 + 100 * cell,
                ..table_config(n, m)
            };
            cell += 1;
            let report = simulator::run(&config).unwrap();
            let analytic = report.analytic.unwrap().bm;
            let gap = (report.bullwhip.mean - analytic).abs();
            if gap > 3.0 * report.bullwhip.std_error {
                misses += 1;
                failures.push(format!(
                    "n={n} m={m}: empirical {} vs analytic {analytic} (se {})",
                    report.bullwhip.mean, report.bullwhip.std_error
                ));
            }
        }
    }
    // One 3-sigma excursion out of 24 cells is statistically tolerable.
    if misses <= 1 {
        failures.clear();
    }
    report("criterion 3 (Monte Carlo BM on 4x6 grid, >= 23/24 within 3 SE)", failures);
}

#[test]
fn criterion_4_forecast_error_variance() {
    let config = SimulationConfig {
        horizon: 200_000,
        replications: 16,
        seed: 44,
        ..table_config(5, 5)
    };
    let report_ = simulator::run(&config).unwrap();
    let expected = report_.analytic_forecast_error_var.unwrap();
    let mut failures = Vec::new();
    if (expected - 24.16).abs() > 1e-12 {
        failures.push(format!("closed form {expected} != 24.16"));
    }
    let gap = (report_.forecast_error_var.mean - expected).abs();
    if gap > 3.0 * report_.forecast_error_var.std_error {
        failures.push(format!(
            "empirical {} vs {expected} (se {})",
            report_.forecast_error_var.mean, report_.forecast_error_var.std_error
        ));
    }
    report("criterion 4 (forecast-error variance 24.16 within 3 SE)", failures);
}

#[test]
fn criterion_5_deterministic_lead_times() {
    let mut failures = Vec::new();
    for (lead, n) in [(1u32, 5u32), (2, 4), (3, 10)] {
        let config = SimulationConfig {
            lead_time: DistributionSpec::Constant { value: lead as f64 },
            n,
            horizon: 200_000,
            replications: 8,
            seed: 50 + lead as u64,
            ..table_config(n, 5)
        };
        let report_ = simulator::run(&config).unwrap();
        let expected: f64 = analytics::bm_deterministic(lead, n).unwrap();
        let rel = (report_.bullwhip.mean - expected).abs() / expected;
        if rel > 0.02 {
            failures.push(format!(
                "L={lead} n={n}: simulated {} vs {expected} (rel {rel})",
                report_.bullwhip.mean
            ));
        }
    }
    // sigma_L = 0 collapses the general measure to the classical form for any m.
    for m in 1..=60 {
        for n in [1u32, 2, 5, 17, 40] {
            for lead in [1u32, 2, 3, 7] {
                let mut p = table_params(n, m);
                p.mean_lead_time = lead as f64;
                p.var_lead_time = 0.0;
                let general = analytics::bullwhip_measure(&p).unwrap().bm;
                let classical: f64 = analytics::bm_deterministic(lead, n).unwrap();
                if general != classical {
                    failures.push(format!("m={m} n={n} L={lead}: {general} != {classical}"));
                }
            }
        }
    }
    report("criterion 5 (deterministic special case)", failures);
}

#[test]
fn criterion_6_limits_and_monotonicity() {
    let mut failures = Vec::new();
    let mut p = table_params(5, 1_000_000);
    let bm = analytics::bullwhip_measure(&p).unwrap().bm;
    let limit: f64 = analytics::bm_limit_m_inf(&p).unwrap();
    if (bm - limit).abs() > 1e-4 {
        failures.push(format!("m limit: {bm} vs {limit}"));
    }
    p = table_params(1_000_000, 5);
    let bm = analytics::bullwhip_measure(&p).unwrap().bm;
    let limit: f64 = analytics::bm_limit_n_inf(&p).unwrap();
    if (bm - limit).abs() > 1e-4 {
        failures.push(format!("n limit: {bm} vs {limit}"));
    }

    let mut rng = ChaCha12Rng::seed_from_u64(0x5EED_0006);
    for i in 0..1000 {
        let base = random_params(&mut rng);
        let bm = analytics::bullwhip_measure(&base).unwrap().bm;
        let mut wider_m = base;
        wider_m.lead_time_window += 1;
        let bm_m = analytics::bullwhip_measure(&wider_m).unwrap().bm;
        let mut wider_n = base;
        wider_n.demand_window += 1;
        let bm_n = analytics::bullwhip_measure(&wider_n).unwrap().bm;
        let strict = base.var_lead_time > 0.0;
        let ok_m = if strict { bm_m < bm } else { bm_m <= bm };
        // Widening n always strictly helps: the deterministic terms depend on n.
        if !ok_m || !(bm_n < bm) {
            failures.push(format!("set {i}: bm {bm}, m+1 {bm_m}, n+1 {bm_n} for {base:?}"));
        }
    }
    report("criterion 6 (limits within 1e-4; monotone decrease in m and n)", failures);
}

#[test]
fn criterion_7_structural_invariants() {
    let mut failures = Vec::new();

    // z-invariance: bit-identical orders across z under a fixed seed.
    let base = SimulationConfig {
        horizon: 3_000,
        replications: 1,
        seed: 77,
        ..table_config(5, 5)
    };
    let mut with_z = base.clone();
    with_z.z = 3.0;
    let ta = simulator::run_trace(&base, 0).unwrap();
    let tb = simulator::run_trace(&with_z, 0).unwrap();
    let identical = ta.len() == tb.len()
        && ta
            .iter()
            .zip(&tb)
            .all(|(a, b)| a.order_qty.map(f64::to_bits) == b.order_qty.map(f64::to_bits));
    if !identical {
        failures.push("order sequence changed with z".to_string());
    }

    // Telescoping identity: q_t equals its expansion in the raw demand and
    // lead-time sequences, period by period.
    let (n, m) = (base.n as usize, base.m as usize);
    let (demand_handle, lead_handle) = simulator::replication_streams(&base, 0);
    // d[k] is the demand generated in period k (observed one period later);
    // lead[k] is the lead time of the order placed in period k+1.
    let d = demand_handle
        .sample_sequence(Role::Demand, base.horizon as usize + 1)
        .unwrap();
    let lead = lead_handle
        .sample_sequence(Role::LeadTime, base.horizon as usize)
        .unwrap();
    let l = |k: usize| lead[k - 1];
    let mut checked = 0u64;
    for row in &ta {
        let t = row.period as usize;
        let Some(q) = row.order_qty else { continue };
        if t < m + 2 || t < n + 2 {
            continue;
        }
        let sum_l: f64 = (1..=m).map(|i| l(t - i)).sum();
        let sum_d: f64 = (1..=n).map(|i| d[t - i]).sum();
        let dl = l(t - m - 1) - l(t - 1);
        let dd = d[t - n - 1] - d[t - 1];
        let mn = (m * n) as f64;
        let expanded = -dd * sum_l / mn - dl * sum_d / mn - dl * dd / mn + d[t - 1];
        if (q - expanded).abs() > 1e-10 {
            failures.push(format!("period {t}: q {q} vs expansion {expanded}"));
        }
        checked += 1;
    }
    if checked < 2_000 {
        failures.push(format!("only {checked} periods checked"));
    }

    // Mean order within 4 SE of mean demand.
    let config = SimulationConfig {
        horizon: 100_000,
        replications: 16,
        seed: 78,
        ..table_config(5, 5)
    };
    let report_ = simulator::run(&config).unwrap();
    let means: Vec<f64> = report_.replications.iter().map(|s| s.mean_order).collect();
    let stats = replication_stats(&means, 0.95);
    if (stats.mean - 2.0).abs() > 4.0 * stats.std_error {
        failures.push(format!("mean order {} +- {}", stats.mean, stats.std_error));
    }

    // Lagged (bounded) lead-time forecasting leaves the measure unchanged.
    let mut bounded = config.clone();
    bounded.bounded = true;
    let rb = simulator::run(&bounded).unwrap();
    let se = (report_.bullwhip.std_error.powi(2) + rb.bullwhip.std_error.powi(2)).sqrt();
    if (report_.bullwhip.mean - rb.bullwhip.mean).abs() > 3.0 * se {
        failures.push(format!(
            "bounded {} vs unbounded {} (combined se {se})",
            rb.bullwhip.mean, report_.bullwhip.mean
        ));
    }

    report("criterion 7 (z-invariance, telescoping, mean order, bounded mode)", failures);
}

#[test]
fn criterion_8_byte_identical_reruns() {
    let bin = env!("CARGO_BIN_EXE_bullwhip");
    let dir = tempfile::tempdir().unwrap();
    let mut failures = Vec::new();

    let run_twice = |label: &str, args: &dyn Fn(&std::path::Path) -> Vec<String>| -> Option<String> {
        let mut outputs = Vec::new();
        for i in 0..2 {
            let out = dir.path().join(format!("{label}-{i}.csv"));
            let status = std::process::Command::new(bin)
                .args(args(&out))
                .output()
                .expect("spawn binary");
            if !status.status.success() {
                return Some(format!(
                    "{label}: exit {:?}: {}",
                    status.status.code(),
                    String::from_utf8_lossy(&status.stderr)
                ));
            }
            outputs.push(std::fs::read(&out).expect("read output"));
        }
        if outputs[0] != outputs[1] {
            return Some(format!("{label}: reruns differ"));
        }
        None
    };

    let checks: Vec<(&str, Box<dyn Fn(&std::path::Path) -> Vec<String>>)> = vec![
        (
            "table",
            Box::new(|out: &std::path::Path| {
                vec!["table".into(), "--id".into(), "2".into(), "--out".into(), out.display().to_string()]
            }),
        ),
        (
            "sweep",
            Box::new(|out: &std::path::Path| {
                vec![
                    "sweep".into(),
                    "--axis".into(),
                    "m=1:20:20".into(),
                    "--out".into(),
                    out.display().to_string(),
                ]
            }),
        ),
        (
            "simulate",
            Box::new(|out: &std::path::Path| {
                vec![
                    "simulate".into(),
                    "--horizon".into(),
                    "5000".into(),
                    "--reps".into(),
                    "4".into(),
                    "--seed".into(),
                    "12".into(),
                    "--out".into(),
                    out.display().to_string(),
                ]
            }),
        ),
    ];
    for (label, args) in &checks {
        if let Some(f) = run_twice(label, args) {
            failures.push(f);
        }
    }
    report("criterion 8 (byte-identical CSV across reruns)", failures);
}
