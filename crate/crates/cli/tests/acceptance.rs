//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run a subset with `cargo test --test acceptance -- 3 5`.

use std::io::Write as _;
use std::process::Command;
use std::time::Instant;

use stableprod::bridge::{time_reversal, BridgeSpec};
use stableprod::estimators::{
    estimate_sup_curves, fit_exponent, sandwich_check, BernoulliEstimate, Curve, ExponentFit,
    SimConfig,
};
use stableprod::paths::{first_entrance_time, simulate_path, sup_product, ProductEnsemble};
use stableprod::rng::substream;
use stableprod::StabilityIndex;
use stableprod_cli::args::{
    BridgeCheckArgs, Format, GtimeArgs, MellinArgs, OutputArgs, PassageArgs, PersistArgs,
    RunConfig, UnitsArg, XyArgs,
};
use stableprod_cli::commands;

const SEED: u64 = 42;
const K: f64 = 3.0;

struct Verdict {
    pass: bool,
    lines: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Verdict {
            pass: true,
            lines: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.pass &= ok;
        self.lines
            .push(format!("{} {line}", if ok { "ok  " } else { "MISS" }));
    }

    fn note(&mut self, line: String) {
        self.lines.push(format!("     {line}"));
    }
}

fn output() -> OutputArgs {
    OutputArgs {
        out: None,
        format: Format::Csv,
        workers: 0,
    }
}

fn run(alpha: f64, steps: usize, samples: u64) -> RunConfig {
    RunConfig {
        alpha,
        steps,
        samples,
        seed: SEED,
        units: UnitsArg::Standard,
        output: output(),
    }
}

/// Wilson half-width divided by its quantile.
fn wilson_se(e: &BernoulliEstimate) -> f64 {
    (e.ci_high - e.ci_low) / (2.0 * e.z)
}

fn phi(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

fn fmt_fit(f: &ExponentFit) -> String {
    format!(
        "theta {:.4} (se {:.4}), beta {:.4} (se {:.4}), r2 {:.4}",
        f.theta, f.stderr_theta, f.beta, f.stderr_beta, f.r_squared
    )
}

fn rescale(curve: &Curve, factor: f64) -> Curve {
    curve.iter().map(|(s, e)| (s / factor, *e)).collect()
}

fn criterion_1() -> Verdict {
    let mut v = Verdict::new();
    let args = PersistArgs {
        run: run(2.0, 8192, 1_000_000),
        n: 1,
        eps: vec![0.5, 0.25, 0.1],
        refine: true,
    };
    let o = commands::persist(&args).expect("persist runs");
    for r in &o.rows {
        let oracle = 2.0 * phi(r.threshold) - 1.0;
        let se = wilson_se(&r.estimate);
        let dev = r.estimate.p_hat - oracle;
        let rf = r.refinement.as_ref().expect("refinement requested");
        // bias ~ c √dt, so the gap to 2 × steps is (1 - 1/√2) of it
        let extrapolated = rf.gap() / (1.0 - std::f64::consts::FRAC_1_SQRT_2) / oracle;
        v.check(
            dev >= -K * se && dev <= K * se + 0.03 * oracle,
            format!(
                "eps {}: p_hat {:.5} vs 2Φ(ε)-1 = {oracle:.5}, excess {:+.2}% (allowed 3·se {:.2}% + 3%)",
                r.threshold,
                r.estimate.p_hat,
                100.0 * dev / oracle,
                100.0 * K * se / oracle
            ),
        );
        v.check(
            rf.consistent_direction(K),
            format!(
                "eps {}: refinement {} -> {} steps: {:.5} -> {:.5}, gap {:+.2}%, √dt-extrapolated bias {:+.2}%",
                r.threshold,
                rf.coarse_steps,
                rf.fine_steps,
                rf.coarse.p_hat,
                rf.fine.p_hat,
                100.0 * rf.gap() / oracle,
                100.0 * extrapolated
            ),
        );
    }
    v
}

fn dyadic(from: i32, to: i32) -> Vec<f64> {
    (from..=to).map(|j| 2f64.powi(-j)).collect()
}

/// Criteria 2 and 4 share one α = 1, n = 2 ensemble.
fn criteria_2_and_4() -> (Verdict, Verdict) {
    let cfg = SimConfig::new(StabilityIndex::CAUCHY, 2, 4096, 1_000_000, SEED);
    let eps = dyadic(1, 6);
    let xs = [1e2, 1e3, 1e4];
    let (persist, tail) = estimate_sup_curves(&cfg, &eps, &xs).expect("simulation runs");

    let mut v2 = Verdict::new();
    for (e, est) in &persist {
        v2.note(format!(
            "eps {e}: p_hat {:.5} ({} of {})",
            est.p_hat, est.successes, est.trials
        ));
    }
    let pure = fit_exponent(&persist, false).expect("fit");
    let with_log = fit_exponent(&persist, true).expect("fit");
    v2.check(
        (0.35..=0.65).contains(&pure.theta),
        format!("pure power fit: {} in [0.35, 0.65]", fmt_fit(&pure)),
    );
    v2.note(format!(
        "with ln|ln ε| term (diagnostic): {}",
        fmt_fit(&with_log)
    ));

    let mut v4 = Verdict::new();
    let ratios: Vec<f64> = tail.iter().map(|(x, e)| e.p_hat * x / x.ln()).collect();
    for ((x, e), r) in tail.iter().zip(&ratios) {
        v4.note(format!(
            "x {x}: p_hat {:.4e} ({} hits), p·x/ln x = {r:.4}",
            e.p_hat, e.successes
        ));
    }
    let spread = ratios.iter().cloned().fold(f64::MIN, f64::max)
        / ratios.iter().cloned().fold(f64::MAX, f64::min);
    v4.check(spread <= 2.0, format!("max/min ratio {spread:.3} <= 2"));
    (v2, v4)
}

/// Criteria 3 and 5 share one α = 2, n = 2 ensemble. Thresholds are in
/// standard Brownian units; the simulated product is twice as large.
fn criteria_3_and_5() -> (Verdict, Verdict) {
    let cfg = SimConfig::new(StabilityIndex::BROWNIAN, 2, 4096, 1_000_000, SEED);
    let eps = dyadic(1, 6);
    let xs = [2.0, 3.0, 4.0];
    let native = |v: &[f64]| v.iter().map(|s| 2.0 * s).collect::<Vec<_>>();
    let (persist, tail) =
        estimate_sup_curves(&cfg, &native(&eps), &native(&xs)).expect("simulation runs");
    let persist = rescale(&persist, 2.0);
    let tail = rescale(&tail, 2.0);

    let mut v3 = Verdict::new();
    for (e, est) in &persist {
        v3.note(format!(
            "eps {e}: p_hat {:.5} ({} of {})",
            est.p_hat, est.successes, est.trials
        ));
    }
    let pure = fit_exponent(&persist, false).expect("fit");
    let with_log = fit_exponent(&persist, true).expect("fit");
    v3.check(
        (0.8..=1.2).contains(&pure.theta),
        format!("pure power fit: {} in [0.8, 1.2]", fmt_fit(&pure)),
    );
    v3.note(format!(
        "with ln|ln ε| term (beta diagnostic): {}",
        fmt_fit(&with_log)
    ));

    let mut v5 = Verdict::new();
    let ratios: Vec<f64> = tail
        .iter()
        .map(|(x, e)| e.p_hat / (x.powf(-0.5) * (-x).exp()))
        .collect();
    for ((x, e), r) in tail.iter().zip(&ratios) {
        v5.note(format!(
            "x {x}: p_hat {:.4e} ({} hits), ratio to x^-1/2 e^-x = {r:.4}",
            e.p_hat, e.successes
        ));
    }
    let spread = ratios.iter().cloned().fold(f64::MIN, f64::max)
        / ratios.iter().cloned().fold(f64::MAX, f64::min);
    v5.check(spread <= 2.0, format!("max/min ratio {spread:.3} <= 2"));
    (v3, v5)
}

fn criterion_6() -> Verdict {
    let mut v = Verdict::new();
    // dt = 2^-10 on a horizon of 16
    let args = PassageArgs {
        run: run(2.0, 16_384, 100_000),
        start: 1.0,
        t: vec![1.0, 4.0, 16.0],
        horizon: None,
    };
    let o = commands::passage(&args).expect("passage runs");
    for r in &o.rows {
        let oracle = 2.0 * phi(1.0 / r.threshold.sqrt()) - 1.0;
        let margin = r.grid_oracle.expect("α = 2 has a grid oracle");
        let se = wilson_se(&r.estimate);
        let p = r.estimate.p_hat;
        v.check(
            p >= oracle - K * se && p <= margin + K * se,
            format!(
                "t {}: p_hat {p:.5}, 2Φ(1/√t)-1 = {oracle:.5}, grid-shifted {margin:.5}, se {se:.5}",
                r.threshold
            ),
        );
    }
    let times: Vec<f64> = (2..=8).map(|j| 2f64.powi(j)).collect();
    let args = PassageArgs {
        run: run(1.0, 4096, 100_000),
        start: 1.0,
        t: times,
        horizon: None,
    };
    let o = commands::passage(&args).expect("passage runs");
    let fit = o.fit.expect("enough times for a fit");
    v.check(
        (-0.6..=-0.4).contains(&fit.theta),
        format!("α=1 survival exponent {} in [-0.6, -0.4]", fmt_fit(&fit)),
    );
    v
}

fn criterion_7() -> Verdict {
    let mut v = Verdict::new();
    let edges = (-10..=-2).map(|j| 2f64.powi(j)).collect::<Vec<_>>();
    for (alpha, steps) in [(2.0, 65_536), (1.0, 4096)] {
        let args = GtimeArgs {
            run: run(alpha, steps, 100_000),
            r: vec![0.25, 0.5],
            edges: edges.clone(),
        };
        let o = commands::gtime(&args).expect("gtime runs");
        v.check(
            (-0.6..=-0.4).contains(&o.density.slope),
            format!(
                "α={alpha}, {steps} steps: density slope {:.4} (se {:.4}) in [-0.6, -0.4]",
                o.density.slope, o.density.stderr
            ),
        );
        if alpha == 2.0 {
            for c in &o.cdf {
                let oracle = 2.0 / std::f64::consts::PI * c.r.sqrt().asin();
                let se = wilson_se(&c.estimate);
                v.check(
                    (c.estimate.p_hat - oracle).abs() <= K * se,
                    format!(
                        "α=2 P(g1 ≤ {}) = {:.5} vs arcsine {oracle:.5}, z {:+.2}",
                        c.r,
                        c.estimate.p_hat,
                        (c.estimate.p_hat - oracle) / se
                    ),
                );
            }
        }
    }
    v
}

fn mellin_oracle(nu: f64, n: u32) -> f64 {
    let one = 2f64.powf(nu / 2.0) * libm::tgamma((nu + 1.0) / 2.0) / std::f64::consts::PI.sqrt();
    one.powi(n as i32)
}

fn criterion_8() -> Verdict {
    let mut v = Verdict::new();
    let args = MellinArgs {
        nu: vec![0.5, 1.0, 2.0],
        n: vec![1, 2, 3],
        samples: 1_000_000,
        seed: SEED,
        output: output(),
    };
    for r in commands::mellin(&args).expect("mellin runs") {
        let oracle = mellin_oracle(r.nu, r.n);
        let z = r.monte_carlo.z_score(r.exact);
        v.check(
            (r.exact - oracle).abs() <= 1e-12 * oracle && z.abs() <= K,
            format!(
                "ν {} n {}: exact {:.8} (Γ oracle {oracle:.8}), MC {:.6} ± {:.6}, z {z:+.2}",
                r.nu, r.n, r.exact, r.monte_carlo.mean, r.monte_carlo.stderr
            ),
        );
    }
    for (nu, n) in [(0.0, 1), (0.0, 2), (0.0, 3), (2.0, 2)] {
        let exact = stableprod::analytics::mellin_abs_normal_product(nu, n).expect("finite");
        v.check(
            (exact - 1.0).abs() <= 1e-12,
            format!("ν {nu} n {n}: exact {exact:.15} = 1"),
        );
    }
    v
}

fn criterion_9() -> Verdict {
    let mut v = Verdict::new();
    let mut worst: f64 = 0.0;
    for k in 0..=60 {
        let z = 10f64.powf(k as f64 / 10.0);
        let exact = stableprod::analytics::pareto_product_tail(z, 1.0).expect("z ≥ 1");
        worst = worst.max((exact - (1.0 + z.ln()) / z).abs());
    }
    v.check(
        worst <= 1e-9,
        format!("max |P(XY ≥ z) - (1 + ln z)/z| over z in [1, 1e6] = {worst:.2e} <= 1e-9"),
    );
    let args = XyArgs {
        nu: 1.0,
        z: vec![std::f64::consts::E, 10.0, 1e6],
        samples: 1_000_000,
        seed: SEED,
        output: output(),
    };
    let rows = commands::xy_check(&args).expect("xy-check runs");
    for r in &rows[..2] {
        let se = wilson_se(&r.estimate);
        v.check(
            (r.estimate.p_hat - r.exact).abs() <= K * se,
            format!(
                "z {:.4}: MC {:.5} vs exact {:.5}, z-score {:+.2}",
                r.z,
                r.estimate.p_hat,
                r.exact,
                (r.estimate.p_hat - r.exact) / se
            ),
        );
    }
    let ratio = rows[2].asymptote_ratio.expect("z > 1");
    v.check(
        (ratio - 1.0).abs() <= 0.01,
        format!("z 1e6: P(XY ≥ z)·z/ln z = {ratio:.5}, target ν = 1 within 1% (exact value is ν + 1/ln z)"),
    );
    v
}

fn criterion_10() -> Verdict {
    let mut v = Verdict::new();
    for alpha in [2.0, 1.0] {
        let args = BridgeCheckArgs {
            run: run(alpha, 4096, 100_000),
            pairs: 10_000,
            a_bin: 0.1,
            bridge_steps: 16,
        };
        let o = commands::bridge_check(&args).expect("bridge-check runs");
        let bin = if alpha == 2.0 {
            "all samples".to_string()
        } else {
            format!("|a| in [0.1, 0.2), {} of {} in bin", o.in_bin, o.collected)
        };
        v.note(format!(
            "α={alpha}: {bin}, {} used, bridge acceptance {:.4}",
            o.used, o.bridge_acceptance_rate
        ));
        let i = &o.independence;
        v.check(
            i.pass,
            format!(
                "α={alpha} independence KS {:.4} < {:.4} (p {:.3})",
                i.statistic, i.critical_1pct, i.p_value
            ),
        );
        let m = o.midpoint_marginal();
        v.check(
            m.pass,
            format!(
                "α={alpha} u=1/2 marginal vs bridge KS {:.4} < {:.4} (p {:.3})",
                m.statistic, m.critical_1pct, m.p_value
            ),
        );
        let c = &o.counterexample;
        v.check(
            !c.pass,
            format!(
                "α={alpha} dependent counterexample rejected, KS {:.4} >= {:.4}",
                c.statistic, c.critical_1pct
            ),
        );
    }
    v
}

fn criterion_11() -> Verdict {
    let mut v = Verdict::new();

    let eps = dyadic(0, 8);
    let xs = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
    let mut monotone = true;
    for (alpha, n) in [(2.0, 1), (2.0, 2), (1.0, 2), (1.5, 3)] {
        let cfg = SimConfig::new(StabilityIndex::new(alpha).unwrap(), n, 256, 20_000, SEED);
        let (p, t) = estimate_sup_curves(&cfg, &eps, &xs).expect("simulation runs");
        // eps decreasing: counts must not increase; x increasing: likewise
        monotone &= p.windows(2).all(|w| w[1].1.successes <= w[0].1.successes);
        monotone &= t.windows(2).all(|w| w[1].1.successes <= w[0].1.successes);
    }
    v.check(
        monotone,
        "common-random-number curves are monotone in the threshold (4 configurations)".into(),
    );

    let mut violations = 0;
    for (alpha, n) in [(2.0, 2), (1.0, 2), (0.8, 3)] {
        let cfg = SimConfig::new(StabilityIndex::new(alpha).unwrap(), n, 256, 20_000, SEED);
        let s = sandwich_check(&cfg, 1.0).expect("simulation runs");
        violations += s.lower_violations;
        if !s.lower_holds() {
            violations += 1;
        }
    }
    v.check(
        violations == 0,
        format!("S_n ≥ ∏Z_1 on every ensemble: {violations} violations"),
    );

    let mut mismatches = 0;
    let levels = [0.01, 0.1, 0.5, 1.0, 3.0];
    for (alpha, n) in [(2.0, 2), (1.0, 2), (1.5, 3)] {
        let a = StabilityIndex::new(alpha).unwrap();
        for i in 0..2000 {
            let e = ProductEnsemble::simulate(&mut substream(SEED, i), a, n, 1.0, 128).unwrap();
            let s = sup_product(&e);
            for &x in &levels {
                if (s >= x) != first_entrance_time(&e, x).is_some() {
                    mismatches += 1;
                }
            }
        }
    }
    v.check(
        mismatches == 0,
        format!("{{S_n ≥ x}} = {{R(x) ≤ 1}} path by path: {mismatches} mismatches"),
    );

    let mut broken = 0;
    for i in 0..500 {
        let mut s = substream(SEED, i);
        let p = simulate_path(&mut s, StabilityIndex::new(1.3).unwrap(), 0.0, 1.0, 64).unwrap();
        let spec = BridgeSpec::new(StabilityIndex::BROWNIAN, 1.0, 0.3, -1.1, 64).unwrap();
        let b = stableprod::bridge::sample_brownian_bridge(&mut s, &spec).unwrap();
        for path in [p, b] {
            if time_reversal(&time_reversal(&path)) != path {
                broken += 1;
            }
        }
    }
    v.check(
        broken == 0,
        format!("reversal is an involution on 1000 paths: {broken} failures"),
    );

    let bin = env!("CARGO_BIN_EXE_stableprod");
    let cases: [&[&str]; 4] = [
        &[
            "persist",
            "--alpha",
            "1.5",
            "--n",
            "2",
            "--samples",
            "5000",
            "--steps",
            "128",
            "--refine",
        ],
        &[
            "tails",
            "--alpha",
            "1",
            "--n",
            "2",
            "--x",
            "2,10,50",
            "--samples",
            "5000",
            "--steps",
            "128",
            "--format",
            "json",
        ],
        &[
            "gtime",
            "--alpha",
            "1.2",
            "--samples",
            "5000",
            "--steps",
            "2048",
        ],
        &[
            "bridge-check",
            "--alpha",
            "2",
            "--samples",
            "12000",
            "--steps",
            "256",
        ],
    ];
    for case in cases {
        let outputs: Vec<Vec<u8>> = ["1", "3", "0"]
            .iter()
            .map(|w| {
                let out = Command::new(bin)
                    .args(case)
                    .args(["--workers", w])
                    .output()
                    .expect("binary runs");
                assert!(
                    out.status.success(),
                    "{case:?}: {}",
                    String::from_utf8_lossy(&out.stderr)
                );
                out.stdout
            })
            .collect();
        let same = outputs.windows(2).all(|w| w[0] == w[1]);
        v.check(
            same,
            format!(
                "`{}` output identical for --workers 1, 3, 0 ({} bytes)",
                case[0],
                outputs[0].len()
            ),
        );
    }
    v
}

fn report(id: u32, title: &str, v: Verdict, started: Instant) -> bool {
    let mut out = std::io::stdout().lock();
    writeln!(
        out,
        "{} criterion {id}: {title} [{:.0}s]",
        if v.pass { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64()
    )
    .unwrap();
    for line in &v.lines {
        writeln!(out, "      {line}").unwrap();
    }
    out.flush().unwrap();
    v.pass
}

fn main() {
    let selected: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let want = |id: u32| selected.is_empty() || selected.contains(&id);
    let mut results = Vec::new();
    let mut record =
        |id: u32, title: &str, v: Verdict, t: Instant| results.push((id, report(id, title, v, t)));

    const TITLES: [&str; 11] = [
        "α=2, n=1 persistence against 2Φ(ε)-1",
        "α=1, n=2 persistence exponent",
        "α=2, n=2 persistence exponent",
        "α=1, n=2 large deviations",
        "α=2, n=2 large-deviation shape",
        "first passage below zero",
        "last sign change g1",
        "Mellin transform of ∏|N_i|",
        "Pareto product tail",
        "pre-g1 path is an independent bridge",
        "exact structural invariants",
    ];
    let title = |id: u32| TITLES[id as usize - 1];

    let t = Instant::now();
    if want(1) {
        record(1, title(1), criterion_1(), t);
    }
    let t = Instant::now();
    if want(2) || want(4) {
        let (v2, v4) = criteria_2_and_4();
        if want(2) {
            record(2, title(2), v2, t);
        }
        if want(4) {
            record(4, title(4), v4, t);
        }
    }
    let t = Instant::now();
    if want(3) || want(5) {
        let (v3, v5) = criteria_3_and_5();
        if want(3) {
            record(3, title(3), v3, t);
        }
        if want(5) {
            record(5, title(5), v5, t);
        }
    }
    let rest: [(u32, fn() -> Verdict); 6] = [
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    for (id, f) in rest {
        if want(id) {
            let t = Instant::now();
            record(id, title(id), f(), t);
        }
    }

    results.sort();
    let failed: Vec<u32> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    println!(
        "acceptance: {} of {} criteria passed",
        results.len() - failed.len(),
        results.len()
    );
    if !failed.is_empty() {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
