use std::process::{Command, ExitCode};
use std::time::Instant;

use lstat_lab::harness::{self, RunOptions};
use lstat_lab::lstat::{self, l_statistic_integral, l_statistic_sum, quantile_sup_identity};
use lstat_lab::processes::{
    check_condition4, ergodic_average, markov_phi_bound, Condition4Verdict,
};
use lstat_lab::rng::CounterRng;
use lstat_lab::{
    compose_h, ConvergenceReport, DistributionModel, EmpiricalQuantile, ExperimentConfig, Kernel,
    PhiBound, RealFn, TransitionMatrix, WeightVector,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn config(json: &str) -> ExperimentConfig {
    ExperimentConfig::from_json_str(json).expect("valid config")
}

fn with_p(cfg: &ExperimentConfig, p: f64) -> ExperimentConfig {
    let mut c = cfg.clone();
    c.p = p;
    c
}

fn run(cfg: &ExperimentConfig) -> ConvergenceReport {
    harness::run_experiment(cfg).expect("experiment runs")
}

fn triangular_config() -> ExperimentConfig {
    config(
        r#"{
        "process": {"name": "iid_uniform"},
        "distribution": {"name": "uniform"},
        "kernel": {"name": "identity"},
        "weights": {"scheme": "triangular_example"},
        "n_grid": [1000000],
        "replications": 20,
        "base_seed": 20240611
    }"#,
    )
}

fn chain_config() -> ExperimentConfig {
    config(
        r#"{
        "process": {"name": "markov", "P": [[0.7, 0.3], [0.3, 0.7]]},
        "distribution": {"name": "exponential", "rate": 1.0},
        "kernel": {"name": "identity"},
        "weights": {"scheme": "triangular_example"},
        "n_grid": [1000, 10000, 100000],
        "replications": 20,
        "base_seed": 7
    }"#,
    )
}

fn rotation_config() -> ExperimentConfig {
    config(
        r#"{
        "process": {"name": "rotation"},
        "distribution": {"name": "uniform"},
        "kernel": {"name": "identity"},
        "weights": {"scheme": "triangular_example"},
        "n_grid": [1000, 10000, 100000],
        "replications": 10,
        "base_seed": 11
    }"#,
    )
}

/// μₙ for the triangular weights and `H(t) = t`, from the closed form of the
/// weights and `∫ t dt = (2i − 1) / (2n²)` on cell `i`.
fn triangular_identity_mu(n: usize) -> f64 {
    let k = (n as f64).sqrt().floor() as usize;
    let delta = 1.0 / (n as f64).sqrt();
    (1..=n)
        .map(|i| {
            let j = (i - 1) % (2 * k) + 1;
            let c = if j <= k {
                (j - 1) as f64
            } else {
                (2 * k - j) as f64
            } * delta;
            c * (2 * i - 1) as f64 / (2.0 * (n * n) as f64)
        })
        .sum()
}

fn ac1(report: &ConvergenceReport, elapsed: f64) -> Outcome {
    let oracle = triangular_identity_mu(1_000_000);
    let mu = report.rows[0].mu_n;
    let near = report
        .rows
        .iter()
        .filter(|r| (r.l_n - 0.25).abs() <= 0.02)
        .count();
    let mu_ok = (mu - 0.25).abs() <= 1e-3 && (mu - oracle).abs() <= 1e-9;
    check(
        mu_ok && near >= 19 && report.rows.len() == 20 && elapsed < 30.0,
        format!("mu_n = {mu:.9} (closed form {oracle:.9}), L_n within 0.02 of 1/4 in {near}/20, {elapsed:.1} s"),
    )
}

fn random_distribution(rng: &mut CounterRng) -> DistributionModel {
    match rng.next_u64() % 4 {
        0 => DistributionModel::Uniform {
            lower: -1.0 + rng.next_f64(),
            upper: 1.0 + 2.0 * rng.next_f64(),
        },
        1 => DistributionModel::exponential(0.2 + 3.0 * rng.next_f64()),
        2 => DistributionModel::Normal {
            mean: 4.0 * rng.next_f64() - 2.0,
            sd: 0.1 + 2.0 * rng.next_f64(),
        },
        _ => DistributionModel::two_point(
            -1.0 - rng.next_f64(),
            1.0 + rng.next_f64(),
            0.05 + 0.9 * rng.next_f64(),
        ),
    }
}

fn random_kernel(rng: &mut CounterRng) -> Kernel {
    match rng.next_u64() % 7 {
        0 => Kernel::Identity,
        1 => Kernel::Square,
        2 => Kernel::Cube,
        3 => Kernel::Abs,
        4 => Kernel::Cos {
            frequency: 0.5 + 3.0 * rng.next_f64(),
        },
        5 => Kernel::Indicator {
            threshold: rng.next_f64() - 0.5,
        },
        _ => Kernel::Exp,
    }
}

fn uniform_sample(rng: &mut CounterRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.next_f64()).collect()
}

fn ac2() -> Outcome {
    let mut rng = CounterRng::from_seed(2, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = 1 + (rng.next_u64() % 50) as usize;
        let dist = random_distribution(&mut rng);
        let kernel = random_kernel(&mut rng);
        let c: Vec<f64> = (0..n).map(|_| 4.0 * rng.next_f64() - 1.0).collect();
        let w = WeightVector::new(c.clone()).map_err(|e| e.to_string())?;
        let u = uniform_sample(&mut rng, n);
        let x: Vec<f64> = u.iter().map(|&t| dist.quantile_unchecked(t)).collect();
        let h = compose_h(&kernel, &dist);
        let g = EmpiricalQuantile::new(u).map_err(|e| e.to_string())?;
        let sum = l_statistic_sum(&w, &kernel, &x).map_err(|e| e.to_string())?;
        let integral = l_statistic_integral(&w, &h, &g).map_err(|e| e.to_string())?;
        // Relative to the magnitude of the summands, so that cancellation
        // between signed weights does not inflate the ratio.
        let scale = g
            .base()
            .sorted()
            .iter()
            .zip(&c)
            .map(|(&t, &ci)| (ci * h.eval(t)).abs())
            .sum::<f64>()
            / n as f64;
        if scale > 0.0 {
            worst = worst.max((sum - integral).abs() / scale);
        } else if sum != integral {
            return Err(format!(
                "zero-scale instance disagrees: {sum} vs {integral}"
            ));
        }
    }
    check(
        worst <= 1e-12,
        format!("1000 instances, worst relative difference {worst:.2e}"),
    )
}

fn ac3(reports: &[(&str, ConvergenceReport)]) -> Outcome {
    let mut rows = 0;
    let mut worst = f64::NEG_INFINITY;
    for (_, report) in reports {
        for r in &report.rows {
            rows += 1;
            worst = worst.max(r.gap - r.holder_bound);
        }
    }
    let names: Vec<&str> = reports.iter().map(|(n, _)| *n).collect();
    check(
        worst <= 1e-9,
        format!("{rows} rows over {names:?}, max(gap - holder_bound) = {worst:.3e}"),
    )
}

fn ac4() -> Outcome {
    let mut rng = CounterRng::from_seed(4, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = 1 + (rng.next_u64() % 100) as usize;
        let mut u = uniform_sample(&mut rng, n);
        let g = EmpiricalQuantile::new(u.clone()).map_err(|e| e.to_string())?;
        let s = quantile_sup_identity(&g);
        u.sort_by(f64::total_cmp);
        let nf = n as f64;
        let oracle = u
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                (x - i as f64 / nf)
                    .abs()
                    .max(((i + 1) as f64 / nf - x).abs())
            })
            .fold(0.0, f64::max);
        worst = worst
            .max((s.lhs - s.rhs).abs())
            .max((s.lhs - oracle).abs())
            .max((s.rhs - oracle).abs());
    }
    check(
        worst <= 1e-12,
        format!("1000 samples, worst |lhs - rhs| or oracle difference {worst:.2e}"),
    )
}

fn ac5() -> Outcome {
    let mut rng = CounterRng::from_seed(5, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = 1 + (rng.next_u64() % 200) as usize;
        let dist = random_distribution(&mut rng);
        let kernel = random_kernel(&mut rng);
        let p = [1.0, 1.5, 2.0, 3.0][(rng.next_u64() % 4) as usize];
        let clip = 0.2 + 2.0 * rng.next_f64();
        let h = compose_h(&kernel, &dist);
        let h_eps = |t: f64| h.eval(t).clamp(-clip, clip);
        let u = uniform_sample(&mut rng, n);
        let g = EmpiricalQuantile::new(u.clone()).map_err(|e| e.to_string())?;
        let cells = lstat::cellwise_lp_distance(&h, &h_eps, &g, p);
        let avg = ergodic_average(&|t: f64| (h.eval(t) - h_eps(t)).abs().powf(p), &u)
            .map_err(|e| e.to_string())?;
        worst = worst.max((cells - avg).abs() / avg.abs().max(1.0));
    }
    check(
        worst <= 1e-12,
        format!("200 instances, worst difference {worst:.2e}"),
    )
}

/// Worst single-state conditional deviation `max_x max_B |P(Xₙ ∈ B | X₀ = x) − π(B)|`,
/// by enumerating every path and every target set.
fn brute_force_phi(a: f64, b: f64, n: usize) -> f64 {
    let p = [[1.0 - a, a], [b, 1.0 - b]];
    let pi = [b / (a + b), a / (a + b)];
    let mut worst: f64 = 0.0;
    for x in 0..2 {
        let mut reach = [0.0; 2];
        for path in 0..(1usize << n) {
            let mut prob = 1.0;
            let mut state = x;
            for step in 0..n {
                let next = (path >> step) & 1;
                prob *= p[state][next];
                state = next;
            }
            reach[state] += prob;
        }
        for set in 0..4usize {
            let dev: f64 = (0..2)
                .filter(|y| set >> y & 1 == 1)
                .map(|y| reach[y] - pi[y])
                .sum();
            worst = worst.max(dev.abs());
        }
    }
    worst
}

fn ac6() -> Outcome {
    let mut rng = CounterRng::from_seed(6, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let a = 0.02 + 0.96 * rng.next_f64();
        let b = 0.02 + 0.96 * rng.next_f64();
        let p = TransitionMatrix::two_state(a, b).map_err(|e| e.to_string())?;
        for n in 1..=5 {
            let phi = markov_phi_bound(&p, n).map_err(|e| e.to_string())?;
            worst = worst.max((phi - brute_force_phi(a, b, n)).abs());
        }
    }
    let mut worst_sym: f64 = 0.0;
    for _ in 0..10 {
        let a = 0.02 + 0.96 * rng.next_f64();
        let p = TransitionMatrix::two_state(a, a).map_err(|e| e.to_string())?;
        for n in 1..=5 {
            let phi = markov_phi_bound(&p, n).map_err(|e| e.to_string())?;
            worst_sym = worst_sym.max((phi - 0.5 * (1.0 - 2.0 * a).abs().powi(n as i32)).abs());
        }
    }
    check(
        worst <= 1e-12 && worst_sym <= 1e-12,
        format!("brute force worst {worst:.2e}, symmetric closed form worst {worst_sym:.2e}"),
    )
}

fn ac7() -> Outcome {
    let c = 3.0;
    let geo = check_condition4(&PhiBound::Geometric { c, rho: 0.4 });
    let direct: f64 = (1..64)
        .map(|k| (c * 0.4f64.powf(2f64.powi(k))).sqrt().min(1.0))
        .sum();
    let geo_ok = geo.verdict == Condition4Verdict::Holds
        && geo
            .partial_sum_bound
            .is_some_and(|s| s.is_finite() && s >= direct - 1e-12);
    let unit = check_condition4(&PhiBound::Geometric { c, rho: 1.0 });
    let zero = check_condition4(&PhiBound::ZeroBeyond { m: 5 });
    check(
        geo_ok && unit.verdict == Condition4Verdict::Fails && zero.verdict == Condition4Verdict::Holds,
        format!(
            "geometric(rho = 0.4): {:?} bound {:?} (direct sum {direct:.6}); geometric(rho = 1): {:?}; zero beyond 5: {:?}",
            geo.verdict, geo.partial_sum_bound, unit.verdict, zero.verdict
        ),
    )
}

fn ac8() -> Outcome {
    let gc = harness::run_gc_sweep(&chain_config(), None).map_err(|e| e.to_string())?;
    let first = gc.medians.first().expect("grid").1;
    let last = gc.medians.last().expect("grid").1;
    check(
        last < 0.02 && last < first,
        format!("median KS by n: {:?}", gc.medians),
    )
}

fn ac9(report: &ConvergenceReport) -> Outcome {
    let m: Vec<f64> = report.summaries.iter().map(|s| s.median_gap).collect();
    let monotone = m.windows(2).all(|w| w[1] <= 1.1 * w[0]);
    let last = *m.last().expect("grid");
    check(monotone && last < 0.03, format!("median gap by n: {m:?}"))
}

fn ac10(report: &ConvergenceReport) -> Outcome {
    let v = harness::verify_slln(report, report.config.tolerances.verdict_gap);
    let c4 = &report.mixing.condition4;
    check(
        v.consistent && c4.verdict != Condition4Verdict::Holds,
        format!(
            "slln consistent = {}, dyadic mixing-rate verdict = {:?}",
            v.consistent, c4.verdict
        ),
    )
}

fn ac11() -> Outcome {
    let mut cfg = chain_config();
    cfg.n_grid = vec![100, 1000, 5000];
    cfg.replications = 12;
    let bytes = |threads| {
        let report = harness::run_experiment_with(
            &cfg,
            &RunOptions {
                threads: Some(threads),
                debug_dump: None,
            },
        )
        .expect("experiment runs");
        harness::csv_bytes(&report.rows).expect("csv")
    };
    let one = bytes(1);
    let library_same = one == bytes(1) && one == bytes(8);

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg_path = dir.path().join("exp.json");
    std::fs::write(
        &cfg_path,
        serde_json::to_string(&cfg).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for (k, threads) in ["1", "8", "8"].iter().enumerate() {
        let out = dir.path().join(format!("report{k}.csv"));
        let output = Command::new(env!("CARGO_BIN_EXE_lstat-lab"))
            .args(["run", "--config"])
            .arg(&cfg_path)
            .arg("--out")
            .arg(&out)
            .env(harness::THREADS_ENV, threads)
            .output()
            .map_err(|e| e.to_string())?;
        if output.status.code() == Some(1) {
            return Err(format!(
                "cli run failed: {}",
                String::from_utf8_lossy(&output.stderr)
            ));
        }
        outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    let cli_same = outputs.iter().all(|o| *o == one);
    check(
        library_same && cli_same,
        format!("{} CSV bytes; library threads 1/1/8 identical = {library_same}, cli threads 1/8/8 identical = {cli_same}", one.len()),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(&str, Outcome)> = Vec::new();

    let start = Instant::now();
    let triangular = run(&triangular_config());
    results.push((
        "AC1 triangular weights, iid uniform, n = 10^6",
        ac1(&triangular, start.elapsed().as_secs_f64()),
    ));
    results.push(("AC2 two-path equality", ac2()));

    let chain = run(&chain_config());
    let rotation = run(&rotation_config());
    let hoelder_runs = vec![
        ("triangular p=1", run(&with_p(&triangular_config(), 1.0))),
        ("triangular p=2", triangular.clone()),
        ("chain p=1", run(&with_p(&chain_config(), 1.0))),
        ("chain p=2", chain.clone()),
        ("rotation p=1", run(&with_p(&rotation_config(), 1.0))),
        ("rotation p=2", rotation.clone()),
    ];
    results.push(("AC3 per-row Hoelder bound", ac3(&hoelder_runs)));
    results.push(("AC4 quantile sup identity", ac4()));
    results.push(("AC5 ergodic-average identity", ac5()));
    results.push(("AC6 Markov phi oracle", ac6()));
    results.push(("AC7 dyadic mixing-rate checker", ac7()));
    results.push(("AC8 Glivenko-Cantelli under mixing", ac8()));
    results.push(("AC9 SLLN under mixing", ac9(&chain)));
    results.push(("AC10 ergodic non-mixing path", ac10(&rotation)));
    results.push(("AC11 reproducibility", ac11()));

    let mut failed = Vec::new();
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                println!("FAIL {name}: {detail}");
                failed.push(*name);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: {} criteria passed", results.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
