//! One function per subcommand. Each validates its arguments, runs the
//! experiment and returns a typed outcome; [`Table`] rendering is separate so
//! tests can inspect the numbers directly.

use serde::Serialize;
use serde_json::{json, Value};
use stableprod::analytics::{
    arcsine_cdf, bm_survival, brownian_sup_cdf, grid_barrier_shift, mellin_abs_normal_product,
    pareto_product_tail, TailAsymptote,
};
use stableprod::bridge::{lemma_check, LemmaConfig, LemmaReport, ENDPOINT_BIN_WIDTH};
use stableprod::estimators::fit::MIN_FIT_POINTS;
use stableprod::estimators::{
    empirical_cdf, estimate_persistence, estimate_survival, estimate_upper_tail, fit_density_slope,
    fit_exponent, mellin_moment_mc, pareto_product_tail_mc, refine_curve, require_nonzero,
    sample_last_sign_changes, BernoulliEstimate, Curve, DensitySlope, ExponentFit, Functional,
    MeanEstimate, PathConfig, RefinementReport, SimConfig,
};
use stableprod::ks::KsReport;
use stableprod::units::Units;
use stableprod::StabilityIndex;

use crate::args::{
    BridgeCheckArgs, GtimeArgs, MellinArgs, PassageArgs, PersistArgs, ReportArgs, RunConfig,
    TailsArgs, XyArgs,
};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Table};

fn positive_list(flag: &str, values: &[f64]) -> CliResult<()> {
    if values.is_empty() {
        return Err(CliError::Config(format!(
            "--{flag} needs at least one value"
        )));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(CliError::Config(format!(
            "--{flag}: {v} is not a positive number"
        )));
    }
    Ok(())
}

fn sim_config(run: &RunConfig, n: usize) -> CliResult<SimConfig> {
    run.validate()?;
    if n == 0 {
        return Err(CliError::Config("--n must be at least 1".into()));
    }
    let cfg = SimConfig::new(run.index()?, n, run.steps, run.samples, run.seed)
        .with_workers(run.output.workers());
    cfg.validate()?;
    Ok(cfg)
}

/// Native threshold for an `n`-fold product and the same threshold in
/// standard Brownian units (they differ only for α = 2).
fn product_thresholds(run: &RunConfig, alpha: StabilityIndex, n: usize, x: f64) -> (f64, f64) {
    let native = run.units().to_native_product(alpha, n, x);
    let standard = native / Units::Standard.to_native_product(alpha, n, 1.0);
    (native, standard)
}

/// Fits that fail for lack of points are skipped; other failures abort.
fn optional_fit(curve: &Curve, log_term: bool) -> CliResult<Option<ExponentFit>> {
    if curve.len() < MIN_FIT_POINTS {
        return Ok(None);
    }
    if log_term && curve.iter().any(|(s, _)| *s == 1.0) {
        return Ok(None);
    }
    Ok(Some(fit_exponent(curve, log_term)?))
}

fn refinements(
    cfg: &SimConfig,
    functional: Functional,
    native: &Curve,
    refine: bool,
) -> CliResult<Vec<Option<RefinementReport>>> {
    if !refine {
        return Ok(vec![None; native.len()]);
    }
    Ok(refine_curve(cfg, functional, native)?
        .into_iter()
        .map(Some)
        .collect())
}

fn in_user_units(native: &Curve, user: &[f64]) -> Curve {
    user.iter()
        .zip(native)
        .map(|(&u, (_, e))| (u, *e))
        .collect()
}

fn estimate_cells(e: &BernoulliEstimate) -> Vec<Cell> {
    vec![
        e.p_hat.into(),
        e.ci_low.into(),
        e.ci_high.into(),
        e.stderr().into(),
        e.successes.into(),
        e.trials.into(),
    ]
}

fn refinement_cells(r: &Option<RefinementReport>) -> Vec<Cell> {
    match r {
        Some(r) => vec![r.fine.p_hat.into(), r.gap().into(), r.relative_gap().into()],
        None => vec![Cell::Missing, Cell::Missing, Cell::Missing],
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdRow {
    /// Threshold in the units given on the command line.
    pub threshold: f64,
    pub native_threshold: f64,
    pub estimate: BernoulliEstimate,
    /// Closed form where one exists.
    pub oracle: Option<f64>,
    /// Closed form at the grid-shifted barrier, i.e. the first-order grid
    /// prediction.
    pub grid_oracle: Option<f64>,
    /// Estimate divided by the large-deviation shape.
    pub shape_ratio: Option<f64>,
    pub refinement: Option<RefinementReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PersistOutcome {
    pub rows: Vec<ThresholdRow>,
    /// `ln p ~ θ ln ε`.
    pub fit: Option<ExponentFit>,
    /// `ln p ~ θ ln ε + β ln|ln ε|`.
    pub fit_log: Option<ExponentFit>,
}

impl PersistOutcome {
    pub fn curve(&self) -> Curve {
        self.rows
            .iter()
            .map(|r| (r.threshold, r.estimate))
            .collect()
    }
}

pub fn persist(args: &PersistArgs) -> CliResult<PersistOutcome> {
    let cfg = sim_config(&args.run, args.n)?;
    positive_list("eps", &args.eps)?;
    let alpha = cfg.alpha;
    let thresholds: Vec<(f64, f64)> = args
        .eps
        .iter()
        .map(|&e| product_thresholds(&args.run, alpha, args.n, e))
        .collect();
    let native: Vec<f64> = thresholds.iter().map(|t| t.0).collect();

    let curve = estimate_persistence(&cfg, &native)?;
    require_nonzero(&curve)?;
    let refined = refinements(&cfg, Functional::Persistence, &curve, args.refine)?;
    let user = in_user_units(&curve, &args.eps);
    let has_oracle = alpha.is_brownian() && args.n == 1;
    let shift = grid_barrier_shift(1.0 / cfg.steps as f64);
    let rows = args
        .eps
        .iter()
        .zip(&thresholds)
        .zip(curve.iter().zip(refined))
        .map(
            |((&eps, &(native, standard)), ((_, est), refinement))| ThresholdRow {
                threshold: eps,
                native_threshold: native,
                estimate: *est,
                oracle: has_oracle.then(|| brownian_sup_cdf(standard)),
                grid_oracle: has_oracle.then(|| brownian_sup_cdf(standard + shift)),
                shape_ratio: None,
                refinement,
            },
        )
        .collect();
    Ok(PersistOutcome {
        rows,
        fit: optional_fit(&user, false)?,
        fit_log: optional_fit(&user, true)?,
    })
}

fn threshold_table(
    command: &'static str,
    config: &impl Serialize,
    name: &'static str,
    rows: &[ThresholdRow],
) -> Table {
    let mut t = Table::new(
        command,
        config,
        vec![
            name,
            "p_hat",
            "ci_low",
            "ci_high",
            "stderr",
            "successes",
            "trials",
            "oracle",
            "grid_oracle",
            "shape_ratio",
            "p_hat_2x_steps",
            "refinement_gap",
            "refinement_rel_gap",
        ],
    );
    for r in rows {
        let mut cells = vec![r.threshold.into()];
        cells.extend(estimate_cells(&r.estimate));
        cells.push(r.oracle.into());
        cells.push(r.grid_oracle.into());
        cells.push(r.shape_ratio.into());
        cells.extend(refinement_cells(&r.refinement));
        t.push(cells);
    }
    t
}

pub fn persist_table(args: &PersistArgs, o: &PersistOutcome) -> Table {
    let mut t = threshold_table("persist", args, "eps", &o.rows);
    t.summary = json!({ "fit": o.fit, "fit_with_log_term": o.fit_log });
    t
}

#[derive(Debug, Clone, Serialize)]
pub struct TailsOutcome {
    pub rows: Vec<ThresholdRow>,
    pub shape: TailAsymptote,
    /// Largest over smallest shape ratio.
    pub ratio_spread: Option<f64>,
    pub fit: Option<ExponentFit>,
}

pub fn tails(args: &TailsArgs) -> CliResult<TailsOutcome> {
    let cfg = sim_config(&args.run, args.n)?;
    positive_list("x", &args.x)?;
    let alpha = cfg.alpha;
    let shape = TailAsymptote::for_process(args.n as u32, alpha);
    let thresholds: Vec<(f64, f64)> = args
        .x
        .iter()
        .map(|&x| product_thresholds(&args.run, alpha, args.n, x))
        .collect();
    let native: Vec<f64> = thresholds.iter().map(|t| t.0).collect();

    let curve = estimate_upper_tail(&cfg, &native)?;
    require_nonzero(&curve)?;
    let refined = refinements(&cfg, Functional::UpperTail, &curve, args.refine)?;
    let rows: Vec<ThresholdRow> = args
        .x
        .iter()
        .zip(&thresholds)
        .zip(curve.iter().zip(refined))
        .map(|((&x, &(native, standard)), ((_, est), refinement))| {
            let at = if alpha.is_brownian() { standard } else { x };
            ThresholdRow {
                threshold: x,
                native_threshold: native,
                estimate: *est,
                oracle: None,
                grid_oracle: None,
                shape_ratio: shape.eval(at).ok().map(|s| est.p_hat / s),
                refinement,
            }
        })
        .collect();
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.shape_ratio).collect();
    let ratio_spread = (ratios.len() >= 2).then(|| {
        let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
        hi / lo
    });
    let user = in_user_units(&curve, &args.x);
    Ok(TailsOutcome {
        rows,
        shape,
        ratio_spread,
        fit: optional_fit(&user, false)?,
    })
}

pub fn tails_table(args: &TailsArgs, o: &TailsOutcome) -> Table {
    let mut t = threshold_table("tails", args, "x", &o.rows);
    t.summary = json!({ "shape": o.shape, "ratio_spread": o.ratio_spread, "fit": o.fit });
    t
}

#[derive(Debug, Clone, Serialize)]
pub struct CdfPoint {
    pub r: f64,
    pub estimate: BernoulliEstimate,
    /// Arcsine law, α = 2 only.
    pub oracle: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GtimeOutcome {
    pub density: DensitySlope,
    pub cdf: Vec<CdfPoint>,
    /// Paths with no sign change on the grid (`g_1 = 0`).
    pub no_sign_change: u64,
}

pub fn gtime(args: &GtimeArgs) -> CliResult<GtimeOutcome> {
    args.run.validate()?;
    if let Some(r) = args.r.iter().find(|r| !(0.0..=1.0).contains(*r)) {
        return Err(CliError::Config(format!("--r: {r} is outside [0, 1]")));
    }
    positive_list("edges", &args.edges)?;
    if args.edges.windows(2).any(|w| w[1] <= w[0]) || args.edges.last() > Some(&1.0) {
        return Err(CliError::Config(
            "--edges must increase and stay within (0, 1]".into(),
        ));
    }
    if args.edges.len() < MIN_FIT_POINTS + 1 {
        return Err(CliError::Config(format!(
            "--edges needs at least {} values",
            MIN_FIT_POINTS + 1
        )));
    }
    let alpha = args.run.index()?;
    let cfg = PathConfig::new(alpha, 1.0, args.run.steps, args.run.samples, args.run.seed)
        .with_workers(args.run.output.workers());
    let g = sample_last_sign_changes(&cfg)?;
    let density = fit_density_slope(&g, &args.edges)?;
    let cdf = args
        .r
        .iter()
        .map(|&r| {
            Ok(CdfPoint {
                r,
                estimate: empirical_cdf(&g, r)?,
                oracle: if alpha.is_brownian() {
                    Some(arcsine_cdf(r)?)
                } else {
                    None
                },
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(GtimeOutcome {
        density,
        cdf,
        no_sign_change: g.iter().filter(|&&v| v == 0.0).count() as u64,
    })
}

pub fn gtime_table(args: &GtimeArgs, o: &GtimeOutcome) -> Table {
    let mut t = Table::new(
        "gtime",
        args,
        vec![
            "kind",
            "low",
            "high",
            "p_hat",
            "ci_low",
            "ci_high",
            "stderr",
            "successes",
            "trials",
            "density",
            "oracle",
        ],
    );
    for b in &o.density.bins {
        let mut cells = vec!["bin".into(), b.low.into(), b.high.into()];
        cells.extend(estimate_cells(&b.mass));
        cells.push(b.density.into());
        cells.push(Cell::Missing);
        t.push(cells);
    }
    for c in &o.cdf {
        let mut cells = vec!["cdf".into(), 0.0.into(), c.r.into()];
        cells.extend(estimate_cells(&c.estimate));
        cells.push(Cell::Missing);
        cells.push(c.oracle.into());
        t.push(cells);
    }
    t.summary = json!({
        "density_slope": o.density.slope,
        "density_slope_stderr": o.density.stderr,
        "r_squared": o.density.r_squared,
        "no_sign_change": o.no_sign_change,
    });
    t
}

#[derive(Debug, Clone, Serialize)]
pub struct PassageOutcome {
    pub horizon: f64,
    pub rows: Vec<ThresholdRow>,
    /// Survival exponent: `ln P(T_0 ≥ t) ~ θ ln t`.
    pub fit: Option<ExponentFit>,
}

pub fn passage(args: &PassageArgs) -> CliResult<PassageOutcome> {
    args.run.validate()?;
    positive_list("t", &args.t)?;
    if !(args.start > 0.0) || !args.start.is_finite() {
        return Err(CliError::Config(format!(
            "--start: {} is not positive",
            args.start
        )));
    }
    let horizon = args.horizon();
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(CliError::Config(format!(
            "--horizon: {horizon} is not positive"
        )));
    }
    let alpha = args.run.index()?;
    let units = args.run.units();
    let start_native = units.to_native_position(alpha, args.start);
    let start_standard = Units::Standard.from_native_position(alpha, start_native);
    let cfg = PathConfig::new(
        alpha,
        horizon,
        args.run.steps,
        args.run.samples,
        args.run.seed,
    )
    .with_workers(args.run.output.workers());
    let curve = estimate_survival(&cfg, start_native, &args.t)?;
    let shift = grid_barrier_shift(horizon / args.run.steps as f64);
    let rows = curve
        .iter()
        .map(|&(t, estimate)| {
            let brownian = alpha.is_brownian();
            Ok(ThresholdRow {
                threshold: t,
                native_threshold: t,
                estimate,
                oracle: if brownian {
                    Some(bm_survival(start_standard, t)?)
                } else {
                    None
                },
                grid_oracle: if brownian {
                    Some(bm_survival(start_standard + shift, t)?)
                } else {
                    None
                },
                shape_ratio: None,
                refinement: None,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let fit = if curve.iter().all(|(_, e)| e.successes > 0) {
        optional_fit(&curve, false)?
    } else {
        None
    };
    Ok(PassageOutcome { horizon, rows, fit })
}

pub fn passage_table(args: &PassageArgs, o: &PassageOutcome) -> Table {
    let mut t = threshold_table("passage", args, "t", &o.rows);
    t.summary = json!({ "horizon": o.horizon, "survival_fit": o.fit });
    t
}

pub fn bridge_check(args: &BridgeCheckArgs) -> CliResult<LemmaReport> {
    args.run.validate()?;
    if args.run.steps < 2 {
        return Err(CliError::Config("--steps must be at least 2".into()));
    }
    if !(args.a_bin >= 0.0) || !args.a_bin.is_finite() {
        return Err(CliError::Config(format!(
            "--a-bin: {} is not a valid bin edge",
            args.a_bin
        )));
    }
    let cfg = LemmaConfig {
        alpha: args.run.index()?,
        steps: args.run.steps,
        samples: args.run.samples,
        seed: args.run.seed,
        pairs: args.pairs,
        endpoint_bin: (args.a_bin, args.a_bin + ENDPOINT_BIN_WIDTH),
        bridge_steps: args.bridge_steps,
        workers: args.run.output.workers(),
    };
    Ok(lemma_check(&cfg)?)
}

pub fn bridge_table(args: &BridgeCheckArgs, o: &LemmaReport) -> Table {
    let mut t = Table::new(
        "bridge-check",
        args,
        vec![
            "test",
            "u",
            "statistic",
            "critical_1pct",
            "p_value",
            "pass",
            "n1",
            "n2",
        ],
    );
    let mut push = |name: &str, u: Option<f64>, k: &KsReport| {
        t.push(vec![
            name.into(),
            u.into(),
            k.statistic.into(),
            k.critical_1pct.into(),
            k.p_value.into(),
            k.pass.into(),
            k.n1.into(),
            k.n2.into(),
        ])
    };
    push("independence", Some(0.5), &o.independence);
    for (u, k) in &o.marginals {
        push("bridge_marginal", Some(*u), k);
    }
    push("dependent_counterexample", None, &o.counterexample);
    t.summary = json!({
        "collected": o.collected,
        "in_bin": o.in_bin,
        "used": o.used,
        "bridge_attempts": o.bridge_attempts,
        "bridge_acceptance_rate": o.bridge_acceptance_rate,
    });
    t
}

#[derive(Debug, Clone, Serialize)]
pub struct MellinRow {
    pub nu: f64,
    pub n: u32,
    pub exact: f64,
    pub monte_carlo: MeanEstimate,
}

pub fn mellin(args: &MellinArgs) -> CliResult<Vec<MellinRow>> {
    args.output.validate()?;
    if args.nu.is_empty() || args.n.is_empty() {
        return Err(CliError::Config(
            "--nu and --n need at least one value".into(),
        ));
    }
    if let Some(nu) = args.nu.iter().find(|v| !(**v > -1.0) || !v.is_finite()) {
        return Err(CliError::Config(format!("--nu: {nu} must exceed -1")));
    }
    if args.n.contains(&0) {
        return Err(CliError::Config("--n values must be at least 1".into()));
    }
    if args.samples < 2 {
        return Err(CliError::Config("--samples must be at least 2".into()));
    }
    let mut rows = Vec::new();
    for &nu in &args.nu {
        for &n in &args.n {
            rows.push(MellinRow {
                nu,
                n,
                exact: mellin_abs_normal_product(nu, n)?,
                monte_carlo: mellin_moment_mc(
                    nu,
                    n,
                    args.samples,
                    args.seed,
                    args.output.workers(),
                )?,
            });
        }
    }
    Ok(rows)
}

pub fn mellin_table(args: &MellinArgs, rows: &[MellinRow]) -> Table {
    let mut t = Table::new(
        "mellin",
        args,
        vec![
            "nu",
            "n",
            "exact",
            "mc_mean",
            "mc_stderr",
            "z_score",
            "samples",
        ],
    );
    for r in rows {
        let z = if r.monte_carlo.stderr > 0.0 {
            Some(r.monte_carlo.z_score(r.exact))
        } else {
            None
        };
        t.push(vec![
            r.nu.into(),
            (r.n as u64).into(),
            r.exact.into(),
            r.monte_carlo.mean.into(),
            r.monte_carlo.stderr.into(),
            z.into(),
            r.monte_carlo.samples.into(),
        ]);
    }
    t
}

#[derive(Debug, Clone, Serialize)]
pub struct XyRow {
    pub z: f64,
    pub exact: f64,
    pub estimate: BernoulliEstimate,
    /// `P(XY ≥ z) z^ν / ln z`, whose limit is ν.
    pub asymptote_ratio: Option<f64>,
}

pub fn xy_check(args: &XyArgs) -> CliResult<Vec<XyRow>> {
    args.output.validate()?;
    if !(args.nu > 0.0) || !args.nu.is_finite() {
        return Err(CliError::Config(format!(
            "--nu: {} is not positive",
            args.nu
        )));
    }
    if args.z.is_empty() {
        return Err(CliError::Config("--z needs at least one value".into()));
    }
    if let Some(z) = args.z.iter().find(|z| !(**z >= 1.0) || !z.is_finite()) {
        return Err(CliError::Config(format!("--z: {z} is below 1")));
    }
    if args.samples == 0 {
        return Err(CliError::Config("--samples must be positive".into()));
    }
    let mc = pareto_product_tail_mc(
        args.nu,
        &args.z,
        args.samples,
        args.seed,
        args.output.workers(),
    )?;
    mc.iter()
        .map(|&(z, estimate)| {
            let exact = pareto_product_tail(z, args.nu)?;
            Ok(XyRow {
                z,
                exact,
                estimate,
                asymptote_ratio: (z > 1.0).then(|| exact * z.powf(args.nu) / z.ln()),
            })
        })
        .collect()
}

pub fn xy_table(args: &XyArgs, rows: &[XyRow]) -> Table {
    let mut t = Table::new(
        "xy-check",
        args,
        vec![
            "z",
            "exact",
            "p_hat",
            "ci_low",
            "ci_high",
            "stderr",
            "successes",
            "trials",
            "asymptote_ratio",
        ],
    );
    for r in rows {
        let mut cells = vec![r.z.into(), r.exact.into()];
        cells.extend(estimate_cells(&r.estimate));
        cells.push(r.asymptote_ratio.into());
        t.push(cells);
    }
    t
}

/// Runs every experiment with the report's budget and default thresholds,
/// returning each section's summary (or its error).
pub fn report(args: &ReportArgs) -> CliResult<Vec<(&'static str, Value)>> {
    let run = &args.run;
    sim_config(run, args.n)?;
    let brownian = run.index()?.is_brownian();
    let section = |r: CliResult<Value>| -> Value {
        r.unwrap_or_else(|e| json!({ "error": { "kind": e.kind(), "message": e.to_string() } }))
    };
    let mut out = Vec::new();

    let p = PersistArgs {
        run: run.clone(),
        n: args.n,
        eps: vec![0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625],
        refine: false,
    };
    out.push((
        "persist",
        section(persist(&p).map(|o| persist_table(&p, &o).summary)),
    ));

    let x = if brownian {
        vec![2.0, 3.0, 4.0]
    } else {
        vec![10.0, 100.0, 1000.0]
    };
    let tl = TailsArgs {
        run: run.clone(),
        n: args.n,
        x,
        refine: false,
    };
    out.push((
        "tails",
        section(tails(&tl).map(|o| tails_table(&tl, &o).summary)),
    ));

    let g = GtimeArgs {
        run: run.clone(),
        r: vec![0.25, 0.5],
        edges: (-10..=-2).map(|j| 2f64.powi(j)).collect(),
    };
    out.push((
        "gtime",
        section(gtime(&g).map(|o| gtime_table(&g, &o).summary)),
    ));

    let ps = PassageArgs {
        run: run.clone(),
        start: 1.0,
        t: if brownian {
            vec![1.0, 4.0, 16.0]
        } else {
            (2..=8).map(|j| 2f64.powi(j)).collect()
        },
        horizon: None,
    };
    out.push((
        "passage",
        section(passage(&ps).map(|o| passage_table(&ps, &o).summary)),
    ));

    let b = BridgeCheckArgs {
        run: run.clone(),
        pairs: 10_000,
        a_bin: 0.1,
        bridge_steps: 16,
    };
    out.push((
        "bridge-check",
        section(bridge_check(&b).map(|o| {
            json!({
                "independence": o.independence,
                "midpoint_marginal": o.midpoint_marginal(),
                "counterexample": o.counterexample,
                "used": o.used,
            })
        })),
    ));

    let m = MellinArgs {
        nu: vec![0.5, 1.0, 2.0],
        n: vec![1, 2, 3],
        samples: run.samples,
        seed: run.seed,
        output: run.output.clone(),
    };
    out.push((
        "mellin",
        section(mellin(&m).map(|rows| {
            let worst = rows
                .iter()
                .filter(|r| r.monte_carlo.stderr > 0.0)
                .map(|r| r.monte_carlo.z_score(r.exact).abs())
                .fold(0.0, f64::max);
            json!({ "max_abs_z_score": worst })
        })),
    ));

    let xy = XyArgs {
        nu: 1.0,
        z: vec![std::f64::consts::E, 10.0, 1e6],
        samples: run.samples,
        seed: run.seed,
        output: run.output.clone(),
    };
    out.push(("xy-check", section(xy_check(&xy).map(|rows| json!(rows)))));
    Ok(out)
}

pub fn report_table(args: &ReportArgs, sections: &[(&'static str, Value)]) -> Table {
    let mut t = Table::new("report", args, vec!["section", "summary"]);
    for (name, value) in sections {
        t.push(vec![(*name).into(), Cell::Text(value.to_string())]);
    }
    t.summary = Value::Object(
        sections
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect(),
    );
    t
}
