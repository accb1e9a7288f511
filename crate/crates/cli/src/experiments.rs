//! Named experiments: each takes string parameters and returns records
//! whose `params` are canonical, so any record can be re-run on its own.

use std::time::Instant;

use num_bigint::BigUint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tmlod_core::digits::{sum_of_digits_big, truncated_digit_sum, twofold_digit_sum, TruncationWindow};
use tmlod_core::farey::{
    exceptions_census, farey_approx, farey_bracket, q_divisibility_measure, spaced_points_divisibility_count,
    CensusMode, ExceptionParams,
};
use tmlod_core::gowers::{
    build_graph, contraction_check, decay_rate, gowers_bruteforce, recursion_value, OffsetFamily,
};
use tmlod_core::lod::{
    ap_signed_prefix_extremes, lod_error_total_with_modulus, modulus_bound, ps_frequency_checkpoints, s0_beatty,
    s0_discrete, AStrategy, BetaStrategy, LOD_DEFAULT_BUDGET, S0_BEATTY_DEFAULT_BUDGET, S0_DEFAULT_BUDGET,
};
use tmlod_core::metrics::{box_count, carry_census, discrepancy, mean_discrepancy_sum, vdc_check, BoxQuery, MeanMode};
use tmlod_core::Rational;

use crate::error::CliError;
use crate::record::{format_f64, ExperimentRecord, Params, Status};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x7a3e_5eed;

/// Generic budget for experiments without a tuned default.
pub const GENERIC_BUDGET: f64 = 1e11;

pub const EXPERIMENTS: &[&str] = &[
    "digits",
    "farey.approx",
    "farey.census",
    "farey.exceptions",
    "discrepancy",
    "box",
    "carry",
    "vdc",
    "lod.total",
    "lod.ap",
    "lod.s0",
    "lod.beatty-s0",
    "gowers.brute",
    "gowers.recursion",
    "gowers.graph",
    "gowers.contract",
    "pshapiro",
];

/// Settings shared by every point of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunContext {
    /// Overrides each experiment's default budget.
    pub budget: Option<f64>,
    pub seed: u64,
    /// Record wall-clock times; off by default so output is reproducible.
    pub timing: bool,
}

impl Default for RunContext {
    fn default() -> Self {
        RunContext { budget: None, seed: DEFAULT_SEED, timing: false }
    }
}

impl RunContext {
    fn budget(&self, default: f64) -> f64 {
        self.budget.unwrap_or(default)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn reject_unknown(p: &Params, allowed: &[&str]) -> Result<(), CliError> {
    match p.keys().find(|k| !allowed.contains(k)) {
        Some(k) => Err(usage(format!("unknown parameter `{k}` (expected one of {})", allowed.join(", ")))),
        None => Ok(()),
    }
}

/// Runs one parameter point. A budget overrun yields a single skipped record.
pub fn run_point(experiment: &str, params: &Params, ctx: &RunContext) -> Result<Vec<ExperimentRecord>, CliError> {
    let start = Instant::now();
    let result = dispatch(experiment, params, ctx);
    let elapsed = if ctx.timing { start.elapsed().as_millis() as u64 } else { 0 };
    match result {
        Ok(mut records) => {
            for r in &mut records {
                r.wall_time_ms = elapsed;
            }
            Ok(records)
        }
        Err(CliError::Budget(msg)) => Ok(vec![ExperimentRecord::new(experiment, params.clone())
            .metric("reason", msg)
            .with_status(Status::Skipped)]),
        Err(e) => Err(e),
    }
}

fn dispatch(experiment: &str, p: &Params, ctx: &RunContext) -> Result<Vec<ExperimentRecord>, CliError> {
    let one = |r: Result<ExperimentRecord, CliError>| r.map(|r| vec![r]);
    match experiment {
        "digits" => one(digits(p)),
        "farey.approx" => one(farey_approx_point(p)),
        "farey.census" => one(farey_census(p)),
        "farey.exceptions" => one(farey_exceptions(p, ctx)),
        "discrepancy" => one(discrepancy_point(p)),
        "box" => one(box_point(p)),
        "carry" => one(carry_point(p)),
        "vdc" => one(vdc_point(p, ctx)),
        "lod.total" => lod_total(p, ctx),
        "lod.ap" => one(lod_ap(p)),
        "lod.s0" => one(lod_s0(p, ctx)),
        "lod.beatty-s0" => one(lod_beatty_s0(p, ctx)),
        "gowers.brute" => one(gowers_value(p, ctx, true)),
        "gowers.recursion" => one(gowers_value(p, ctx, false)),
        "gowers.graph" => one(gowers_graph(p)),
        "gowers.contract" => one(gowers_contract(p)),
        "pshapiro" => pshapiro(p),
        other => Err(usage(format!("unknown experiment `{other}` (known: {})", EXPERIMENTS.join(", ")))),
    }
}

fn digits(p: &Params) -> Result<ExperimentRecord, CliError> {
    reject_unknown(p, &["n", "base", "lambda", "mu"])?;
    let n: BigUint = p.req("n")?;
    let base: u64 = p.or("base", 2)?;
    let lambda: Option<u32> = p.opt("lambda")?;
    let mu: Option<u32> = p.opt("mu")?;
    let mut params = Params::new().with("n", &n).with("base", base);
    let sum = sum_of_digits_big(&n, base)?;
    let binary = sum_of_digits_big(&n, 2)?;
    let mut rec = ExperimentRecord::new("digits", Params::new()).exact(sum).metric("t", binary % 2);
    if lambda.is_some() || mu.is_some() {
        let n128: u128 = n.to_string().parse().map_err(|_| usage("truncated digit sums need n < 2^128"))?;
        let lambda = lambda.ok_or_else(|| usage("`mu` needs `lambda`"))?;
        params.set("lambda", lambda);
        rec = rec.metric("s_lambda", truncated_digit_sum(n128, lambda));
        if let Some(mu) = mu {
            params.set("mu", mu);
            rec = rec.metric("s_mu_lambda", twofold_digit_sum(n128, TruncationWindow::new(mu, lambda)?));
        }
    }
    rec.params = params;
    Ok(rec)
}

fn farey_approx_point(p: &Params) -> Result<ExperimentRecord, CliError> {
    reject_unknown(p, &["alpha", "order"])?;
    let alpha: Rational = p.req("alpha")?;
    let order: u64 = p.req("order")?;
    let ap = farey_approx(&alpha, order)?;
    let (lo, hi) = farey_bracket(&alpha, order)?;
    let err = (&alpha * &Rational::from_integer(ap.q) - Rational::from_integer(ap.p.clone())).abs();
    let status = if ap.verify(&alpha) { Status::Ok } else { Status::Violated };
    Ok(ExperimentRecord::new("farey.approx", Params::new().with("alpha", &alpha).with("order", order))
        .exact(ap.as_rational())
        .metric("p", &ap.p)
        .metric("q", ap.q)
        .metric("error", err)
        .metric("left", lo)
        .metric("right", hi)
        .with_status(status))
}

fn farey_census(p: &Params) -> Result<ExperimentRecord, CliError> {
    reject_unknown(p, &["kind", "order", "gamma", "grid", "points"])?;
    let kind = p.get("kind").unwrap_or("measure");
    let order: u64 = p.req("order")?;
    let gamma: u32 = p.req("gamma")?;
    match kind {
        "measure" => {
            let grid: u64 = p.or("grid", 4096)?;
            let m = q_divisibility_measure(order, gamma, grid)?;
            let params = Params::new().with("kind", kind).with("order", order).with("gamma", gamma).with("grid", grid);
            Ok(ExperimentRecord::new("farey.census", params)
                .exact(m.exact)
                .metric("sampled", m.sampled)
                .metric("bound_shape", m.bound))
        }
        "spaced" => {
            let points: u64 = p.req("points")?;
            if points == 0 {
                return Err(usage("`points` must be >= 1"));
            }
            let xs: Vec<Rational> = (0..points).map(|j| Rational::new(j, points)).collect::<Result<_, _>>()?;
            let delta = Rational::new(1, points)?;
            let c = spaced_points_divisibility_count(&xs, &delta, order, gamma)?;
            let params =
                Params::new().with("kind", kind).with("order", order).with("gamma", gamma).with("points", points);
            Ok(ExperimentRecord::new("farey.census", params).exact(c.count).metric("bound_shape", c.bound))
        }
        other => Err(usage(format!("unknown census kind `{other}`; use measure or spaced"))),
    }
}

fn farey_exceptions(p: &Params, ctx: &RunContext) -> Result<ExperimentRecord, CliError> {
    reject_unknown(p, &["lambda", "mu", "sigma", "gamma", "m", "mode", "grid_bits"])?;
    let params = ExceptionParams {
        lambda: p.req("lambda")?,
        mu: p.req("mu")?,
        sigma: p.req("sigma")?,
        gamma: p.req("gamma")?,
        m: p.or("m", 2)?,
    };
    let mut canon = Params::new()
        .with("lambda", params.lambda)
        .with("mu", params.mu)
        .with("sigma", params.sigma)
        .with("gamma", params.gamma)
        .with("m", params.m);
    let mode = match p.get("mode").unwrap_or("discrete") {
        "discrete" => CensusMode::Discrete,
        "continuous" => {
            let grid_bits: u32 = p.or("grid_bits", 2 * params.sigma + 2)?;
            canon.set("grid_bits", grid_bits);
            CensusMode::ContinuousSampled { grid_bits }
        }
        other => return Err(usage(format!("unknown census mode `{other}`; use discrete or continuous"))),
    };
    canon.set("mode", if mode == CensusMode::Discrete { "discrete" } else { "continuous" });
    let res = exceptions_census(params, mode, ctx.budget(GENERIC_BUDGET))?;
    Ok(ExperimentRecord::new("farey.exceptions", canon)
        .exact(res.count)
        .metric("measure", res.measure)
        .metric("normalized", res.normalized))
}

fn discrepancy_point(p: &Params) -> Result<ExperimentRecord, CliError> {
    reject_unknown(p, &["kind", "alpha", "n", "mu", "grid"])?;
    let n: u64 = p.req("n")?;
    match p.get("kind").unwrap_or("single") {
        "single" => {
            let alpha: Rational = p.req("alpha")?;
            let d = discrepancy(&alpha, n)?;
            Ok(ExperimentRecord::new("discrepancy", Params::new().with("kind", "single").with("alpha", &alpha).with("n", n))
                .exact(&d)
                .metric("n_times_d", Rational::from_integer(n) * d))
        }
        "mean" => {
            let mu: u32 = p.req("mu")?;
            let grid: Option<u64> = p.opt("grid")?;
            let mut canon = Params::new().with("kind", "mean").with("mu", mu).with("n", n);
            let mode = match grid {
                Some(g) => {
                    canon.set("grid", g);
                    MeanMode::ContinuousSampled { grid: g }
                }
                None => MeanMode::Discrete,
            };
            let m = mean_discrepancy_sum(mu, n, mode)?;
            Ok(ExperimentRecord::new("discrepancy", canon)
                .exact(m.value)
                .metric("bound_shape", format_f64(m.bound_shape)))
        }
        other => Err(usage(format!("unknown discrepancy kind `{other}`; use single or mean"))),
    }
}

fn box_point(p: &Params) -> Result<ExperimentRecord, CliError> {
    reject_unknown(p, &["start", "end", "alpha", "beta", "t", "t_count", "k", "k_count"])?;
    let q = BoxQuery {
        j_start: p.or("start", 0)?,
        j_end: p.req("end")?,
        alpha: p.req("alpha")?,
        beta: p.or("beta", Rational::zero())?,
        t: p.req("t")?,
        t_count: p.req("t_count")?,
        k: p.req("k")?,
        k_count: p.req("k_count")?,
    };
    let res = box_count(&q)?;
    let params = Params::new()
        .with("start", q.j_start)
        .with("end", q.j_end)
        .with("alpha", &q.alpha)
        .with("beta", &q.beta)
        .with("t", q.t)
        .with("t_count", q.t_count)
        .with("k", q.k)
        .with("k_count", q.k_count);
    Ok(ExperimentRecord::new("box", params)
        .exact(res.count)
        .metric("predicted", res.predicted)
        .metric("residual", res.residual)
        .metric("error_scale", res.error_scale))
}

fn carry_point(p: &Params) -> Result<ExperimentRecord, CliError> {
    reject_unknown(p, &["start", "end", "r", "alpha", "beta", "lambda"])?;
    let start: u64 = p.or("start", 0)?;
    let end: u64 = p.req("end")?;
    let r: u64 = p.req("r")?;
    let alpha: Rational = p.req("alpha")?;
    let beta: Rational = p.or("beta", Rational::zero())?;
    let lambda: u32 = p.req("lambda")?;
    let res = carry_census(start, end, r, &alpha, &beta, lambda)?;
    let params = Params::new()
        .with("start", start)
        .with("end", end)
        .with("r", r)
        .with("alpha", &alpha)
        .with("beta", &beta)
        .with("lambda", lambda);
    Ok(ExperimentRecord::new("carry", params).exact(res.count).metric("bound", res.bound))
}

fn vdc_point(p: &Params, ctx: &RunContext) -> Result<ExperimentRecord, CliError> {
    reject_unknown(p, &["n", "k", "r", "instances"])?;
    let n: usize = p.req("n")?;
    let k: usize = p.req("k")?;
    let r: usize = p.req("r")?;
    let instances: u64 = p.or("instances", 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut worst = 0.0f64;
    let mut violations = 0u64;
    for _ in 0..instances {
        let z: Vec<Complex64> = (0..n)
            .map(|_| Complex64::from_polar(rng.gen_range(0.0..=1.0f64).sqrt(), rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        let res = vdc_check(&z, k, r)?;
        if !res.ok {
            violations += 1;
        }
        if res.rhs > 0.0 {
            worst = worst.max(res.lhs / res.rhs);
        }
    }
    let params = Params::new().with("n", n).with("k", k).with("r", r).with("instances", instances);
    let status = if violations == 0 { Status::Ok } else { Status::Violated };
    Ok(ExperimentRecord::new("vdc", params)
        .decimal(worst)
        .metric("violations", violations)
        .with_seed(ctx.seed)
        .with_status(status))
}

fn lod_total(p: &Params, ctx: &RunContext) -> Result<Vec<ExperimentRecord>, CliError> {
    reject_unknown(p, &["x", "theta", "d_max", "per_d"])?;
    let x: u64 = p.req("x")?;
    let mut params = Params::new().with("x", x);
    let d_max = match (p.opt::<f64>("theta")?, p.opt::<u64>("d_max")?) {
        (Some(theta), None) => {
            if !(theta > 0.0 && theta <= 1.0) {
                return Err(usage(format!("theta must lie in (0, 1], got {theta}")));
            }
            params.set("theta", p.get("theta").expect("present"));
            modulus_bound(x, theta)
        }
        (None, Some(d)) => {
            params.set("d_max", d);
            d
        }
        (None, None) => return Err(usage("give one of `theta` or `d_max`")),
        (Some(_), Some(_)) => return Err(usage("`theta` and `d_max` are exclusive")),
    };
    let per_d: bool = p.or("per_d", false)?;
    let s = lod_error_total_with_modulus(x, d_max, ctx.budget(LOD_DEFAULT_BUDGET))?;
    let mut out = vec![ExperimentRecord::new("lod.total", params)
        .exact(&s.total)
        .metric("d_max", s.d_max)
        .metric("total_decimal", format_f64(s.total.to_f64()))];
    if per_d {
        out.extend(s.per_d.iter().map(|w| {
            ExperimentRecord::new("lod.ap", Params::new().with("x", x).with("d", w.d))
                .exact(&w.max_dev)
                .metric("a", w.a)
                .metric("arg_y", w.arg_y)
                .metric("arg_z", w.arg_z)
        }));
    }
    Ok(out)
}

fn lod_ap(p: &Params) -> Result<ExperimentRecord, CliError> {
    reject_unknown(p, &["x", "d", "a"])?;
    let x: u64 = p.req("x")?;
    let d: u64 = p.req("d")?;
    if d == 0 {
        return Err(usage("`d` must be >= 1"));
    }
    let mut params = Params::new().with("x", x).with("d", d);
    let best = match p.opt::<u64>("a")? {
        Some(a) => {
            params.set("a", a);
            ap_signed_prefix_extremes(d, a, x)?
        }
        None => {
            let mut best = ap_signed_prefix_extremes(d, 0, x)?;
            for a in 1..d {
                let s = ap_signed_prefix_extremes(d, a, x)?;
                if s.max_dev > best.max_dev {
                    best = s;
                }
            }
            best
        }
    };
    Ok(ExperimentRecord::new("lod.ap", params)
        .exact(&best.max_dev)
        .metric("a", best.a)
        .metric("arg_y", best.arg_y)
        .metric("arg_z", best.arg_z))
}

fn lod_s0(p: &Params, ctx: &RunContext) -> Result<ExperimentRecord, CliError> {
    reject_unknown(p, &["n", "d_lo", "d_hi", "xi", "strategy", "cap"])?;
    let n: u64 = p.req("n")?;
    let d_lo: u64 = p.or("d_lo", n)?;
    let d_hi: u64 = p.or("d_hi", 2 * d_lo)?;
    let xi: f64 = p.or("xi", 0.0)?;
    let mut params = Params::new().with("n", n).with("d_lo", d_lo).with("d_hi", d_hi).with("xi", format_f64(xi));
    let strategy = match p.get("strategy").unwrap_or("structured") {
        "structured" => AStrategy::Structured,
        "capped" => AStrategy::ExhaustiveCapped { cap: p.req("cap")? },
        other => return Err(usage(format!("unknown a-strategy `{other}`; use structured or capped"))),
    };
    match strategy {
        AStrategy::Structured => params.set("strategy", "structured"),
        AStrategy::ExhaustiveCapped { cap } => params.set("strategy", "capped").set("cap", cap),
    };
    let res = s0_discrete(n, d_lo, d_hi, xi, strategy, ctx.budget(S0_DEFAULT_BUDGET))?;
    let scale = n as f64 * d_lo as f64;
    let rec = ExperimentRecord::new("lod.s0", params);
    let rec = match res.exact {
        Some(v) => rec.exact(v),
        None => rec.decimal(res.value),
    };
    Ok(rec.metric("normalized", format_f64(res.value / scale)).metric(
        "lower_bound_only",
        matches!(strategy, AStrategy::ExhaustiveCapped { .. }),
    ))
}

fn lod_beatty_s0(p: &Params, ctx: &RunContext) -> Result<ExperimentRecord, CliError> {
    reject_unknown(p, &["n", "d", "xi", "alpha_grid", "beta", "beta_grid"])?;
    let n: u64 = p.req("n")?;
    let d: Rational = p.req("d")?;
    let xi: f64 = p.or("xi", 0.0)?;
    let alpha_grid: u64 = p.or("alpha_grid", 16)?;
    let mut params = Params::new()
        .with("n", n)
        .with("d", &d)
        .with("xi", format_f64(xi))
        .with("alpha_grid", alpha_grid);
    let strategy = match p.get("beta").unwrap_or("breakpoints") {
        "breakpoints" => BetaStrategy::Breakpoints,
        "grid" => BetaStrategy::Grid { grid: p.req("beta_grid")? },
        other => return Err(usage(format!("unknown beta strategy `{other}`; use breakpoints or grid"))),
    };
    match strategy {
        BetaStrategy::Breakpoints => params.set("beta", "breakpoints"),
        BetaStrategy::Grid { grid } => params.set("beta", "grid").set("beta_grid", grid),
    };
    let res = s0_beatty(n, &d, xi, alpha_grid, strategy, ctx.budget(S0_BEATTY_DEFAULT_BUDGET))?;
    let rec = ExperimentRecord::new("lod.beatty-s0", params);
    let rec = match &res.exact {
        Some(v) => rec.exact(v),
        None => rec.decimal(res.value),
    };
    Ok(rec
        .metric("normalized", format_f64(res.value / (n as f64 * d.to_f64())))
        .metric("lower_bound_only", matches!(strategy, BetaStrategy::Grid { .. })))
}

/// Parses `a0,a1,...` into a family of `2^m` offsets.
fn family(p: &Params, m: u32) -> Result<OffsetFamily, CliError> {
    match p.get("a") {
        None => Ok(OffsetFamily::zero(m)?),
        Some(s) => {
            let entries = s
                .trim_matches(|c| c == '[' || c == ']')
                .split([',', ';'])
                .map(|t| t.trim().parse::<i64>().map_err(|_| usage(format!("bad offset family {s:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(OffsetFamily::new(m, entries)?)
        }
    }
}

fn family_text(a: &OffsetFamily) -> String {
    a.entries().iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

fn gowers_value(p: &Params, ctx: &RunContext, brute: bool) -> Result<ExperimentRecord, CliError> {
    reject_unknown(p, &["m", "rho", "a"])?;
    let m: u32 = p.req("m")?;
    let rho: u32 = p.req("rho")?;
    let a = family(p, m)?;
    let params = Params::new().with("m", m).with("rho", rho).with("a", family_text(&a));
    let (name, v) = if brute {
        ("gowers.brute", gowers_bruteforce(m, rho, &a, ctx.budget(GENERIC_BUDGET))?)
    } else {
        let g = build_graph(m)?;
        ("gowers.recursion", recursion_value(rho, &a, &g)?)
    };
    Ok(ExperimentRecord::new(name, params).exact(&v).metric("decimal", format_f64(v.to_f64())))
}

fn gowers_graph(p: &Params) -> Result<ExperimentRecord, CliError> {
    reject_unknown(p, &["m"])?;
    let m: u32 = p.req("m")?;
    let g = build_graph(m)?;
    let edges: usize = (0..g.len()).map(|i| g.row(i).len()).sum();
    let z = g.zero_index();
    Ok(ExperimentRecord::new("gowers.graph", Params::new().with("m", m))
        .exact(g.len())
        .metric("edges", edges)
        .metric("loop_weight", g.weight(z, z)))
}

fn gowers_contract(p: &Params) -> Result<ExperimentRecord, CliError> {
    reject_unknown(p, &["m", "k_max"])?;
    let m: u32 = p.req("m")?;
    let k_max: u32 = p.or("k_max", tmlod_core::gowers::DEFAULT_K_MAX)?;
    let g = build_graph(m)?;
    let c = contraction_check(&g, k_max)?;
    let params = Params::new().with("m", m).with("k_max", k_max);
    let rec = ExperimentRecord::new("gowers.contract", params).exact(&c.c_star);
    Ok(match c.k_star {
        Some(k) => {
            let eta = decay_rate(k, &c.c_star)?;
            rec.metric("k_star", k).metric("c_star", &c.c_star).metric("eta", format_f64(eta))
        }
        None => rec
            .metric("k_star", "none")
            .metric("c_star", &c.c_star)
            .metric("eta", "none")
            .with_status(Status::Violated),
    })
}

fn pshapiro(p: &Params) -> Result<Vec<ExperimentRecord>, CliError> {
    reject_unknown(p, &["c", "n"])?;
    let c: Rational = p.req("c")?;
    let raw = p.get("n").ok_or_else(|| usage("missing parameter `n`"))?;
    let mut ns = raw
        .split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|_| usage(format!("bad checkpoint list {raw:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    ns.sort_unstable();
    ns.dedup();
    let runs = ps_frequency_checkpoints(&c, &ns)?;
    Ok(runs
        .into_iter()
        .map(|r| {
            let status = if r.exclusions == 0 { Status::Ok } else { Status::Violated };
            ExperimentRecord::new("pshapiro", Params::new().with("c", &c).with("n", r.n))
                .exact(&r.deviation)
                .metric("zeros", r.zeros)
                .metric("freq0", &r.freq0)
                .metric("deviation_decimal", format_f64(r.deviation.to_f64()))
                .metric("exclusions", r.exclusions)
                .with_status(status)
        })
        .collect())
}
