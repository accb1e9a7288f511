//! Argument parsing and the top-level command runner.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;
use crate::experiments::{run_point, RunContext, DEFAULT_SEED};
use crate::record::{read_records, write_records, ExperimentRecord, Format, Params, Status};
use crate::sweep::{sweep, SweepConfig};

#[derive(Debug, Parser)]
#[command(name = "tmlod", version, about = "Exact experiments on the Thue-Morse sequence, Farey dissections and Gowers-type sums")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Output file; `.json` implies JSON. Records go to stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// csv or json.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Worker threads.
    #[arg(long, global = true, env = "TMLOD_THREADS")]
    pub threads: Option<usize>,
    /// Work limit overriding each experiment's default.
    #[arg(long, global = true)]
    pub budget: Option<f64>,
    /// Seed for randomized experiments.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Fill `wall_time_ms` (makes output run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Digit sums s_q(n), s_lambda(n), s_{mu,lambda}(n) and t(n).
    Digits(DigitsArgs),
    /// Farey dissection and divisibility censuses.
    #[command(subcommand)]
    Farey(FareyCmd),
    /// Extreme discrepancy of {n alpha}, or its mean over a grid of alpha.
    Discrepancy(DiscrepancyArgs),
    /// Box count for floor(n alpha + beta).
    Box(BoxArgs),
    /// Carry census comparing s and s_lambda on shifted Beatty values.
    Carry(CarryArgs),
    /// Random van der Corput inequality checks.
    Vdc(VdcArgs),
    /// Level-of-distribution error sums and S_0 maxima.
    #[command(subcommand)]
    Lod(LodCmd),
    /// Gowers-type sums, their recursion graph and contraction.
    #[command(subcommand)]
    Gowers(GowersCmd),
    /// Frequency of t(floor(n^c)) = 0.
    Pshapiro(PsArgs),
    /// Cartesian parameter sweep from a key=value config.
    Sweep(SweepArgs),
    /// Re-runs every record of a CSV/JSON file and compares.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct DigitsArgs {
    #[arg(long)]
    pub n: String,
    #[arg(long)]
    pub base: Option<u64>,
    #[arg(long)]
    pub lambda: Option<u32>,
    #[arg(long)]
    pub mu: Option<u32>,
}

#[derive(Debug, Subcommand)]
pub enum FareyCmd {
    /// p_Q(alpha)/q_Q(alpha) with its bracket.
    Approx {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        order: u64,
    },
    /// Measure of {x : 2^gamma | q_K(x)}, or the count on spaced points.
    Census {
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        order: u64,
        #[arg(long)]
        gamma: u32,
        #[arg(long)]
        grid: Option<u64>,
        #[arg(long)]
        points: Option<u64>,
    },
    /// Number of alpha < 2^lambda with 2^(3 gamma) dividing some p_i.
    Exceptions {
        #[arg(long)]
        lambda: u32,
        #[arg(long)]
        mu: u32,
        #[arg(long)]
        sigma: u32,
        #[arg(long)]
        gamma: u32,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        grid_bits: Option<u32>,
    },
}

#[derive(Debug, Args)]
pub struct DiscrepancyArgs {
    /// single or mean.
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub mu: Option<u32>,
    #[arg(long)]
    pub grid: Option<u64>,
}

#[derive(Debug, Args)]
pub struct BoxArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub end: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long)]
    pub t: u64,
    #[arg(long)]
    pub t_count: u64,
    #[arg(long)]
    pub k: u64,
    #[arg(long)]
    pub k_count: u64,
}

#[derive(Debug, Args)]
pub struct CarryArgs {
    #[arg(long)]
    pub start: Option<u64>,
    #[arg(long)]
    pub end: u64,
    #[arg(long)]
    pub r: u64,
    #[arg(long)]
    pub alpha: String,
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub lambda: u32,
}

#[derive(Debug, Args)]
pub struct VdcArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub instances: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum LodCmd {
    /// Sum over d <= D of the worst progression deviation up to x.
    Total {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        d_max: Option<u64>,
        /// Also emit one row per modulus.
        #[arg(long)]
        per_d: bool,
    },
    /// Worst progression deviation for a single modulus.
    Ap {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        a: Option<u64>,
    },
    /// Discrete S_0 over d in [d_lo, d_hi).
    S0 {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d_lo: Option<u64>,
        #[arg(long)]
        d_hi: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<f64>,
        /// structured or capped.
        #[arg(long)]
        strategy: Option<String>,
        #[arg(long)]
        cap: Option<u64>,
    },
    /// S_0 for Beatty sequences, integrated over alpha in [D, 2D].
    BeattyS0 {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d: String,
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<f64>,
        #[arg(long)]
        alpha_grid: Option<u64>,
        /// breakpoints or grid.
        #[arg(long)]
        beta: Option<String>,
        #[arg(long)]
        beta_grid: Option<u64>,
    },
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub rho: u32,
    /// Offsets a_eps as a comma list of length 2^m; zero family if absent.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum GowersCmd {
    /// A_rho(a) by direct summation.
    Brute(FamilyArgs),
    /// A_rho(a) through the graph recursion.
    Recursion(FamilyArgs),
    /// Vertex and edge counts; optional adjacency listing.
    Graph {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        adjacency: Option<String>,
    },
    /// Smallest contracting path length k* with c* and the decay rate.
    Contract {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        k_max: Option<u32>,
    },
}

#[derive(Debug, Args)]
pub struct PsArgs {
    /// Exponent as a rational or finite decimal.
    #[arg(long)]
    pub c: String,
    /// Checkpoints, comma separated.
    #[arg(long)]
    pub n: String,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// key=value config file.
    #[arg(long)]
    pub config: Option<String>,
    /// Extra `key=value` settings applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub input: String,
}

fn put<T: ToString>(p: &mut Params, key: &str, v: &Option<T>) {
    if let Some(v) = v {
        p.set(key, v.to_string());
    }
}

/// Experiment name and parameters for a single-point subcommand.
fn point_of(cmd: &Command) -> Option<(&'static str, Params)> {
    let mut p = Params::new();
    let name = match cmd {
        Command::Digits(a) => {
            p.set("n", &a.n);
            put(&mut p, "base", &a.base);
            put(&mut p, "lambda", &a.lambda);
            put(&mut p, "mu", &a.mu);
            "digits"
        }
        Command::Farey(FareyCmd::Approx { alpha, order }) => {
            p.set("alpha", alpha).set("order", order);
            "farey.approx"
        }
        Command::Farey(FareyCmd::Census { kind, order, gamma, grid, points }) => {
            put(&mut p, "kind", kind);
            p.set("order", order).set("gamma", gamma);
            put(&mut p, "grid", grid);
            put(&mut p, "points", points);
            "farey.census"
        }
        Command::Farey(FareyCmd::Exceptions { lambda, mu, sigma, gamma, m, mode, grid_bits }) => {
            p.set("lambda", lambda).set("mu", mu).set("sigma", sigma).set("gamma", gamma);
            put(&mut p, "m", m);
            put(&mut p, "mode", mode);
            put(&mut p, "grid_bits", grid_bits);
            "farey.exceptions"
        }
        Command::Discrepancy(a) => {
            put(&mut p, "kind", &a.kind);
            put(&mut p, "alpha", &a.alpha);
            p.set("n", a.n);
            put(&mut p, "mu", &a.mu);
            put(&mut p, "grid", &a.grid);
            "discrepancy"
        }
        Command::Box(a) => {
            put(&mut p, "start", &a.start);
            p.set("end", a.end).set("alpha", &a.alpha);
            put(&mut p, "beta", &a.beta);
            p.set("t", a.t).set("t_count", a.t_count).set("k", a.k).set("k_count", a.k_count);
            "box"
        }
        Command::Carry(a) => {
            put(&mut p, "start", &a.start);
            p.set("end", a.end).set("r", a.r).set("alpha", &a.alpha);
            put(&mut p, "beta", &a.beta);
            p.set("lambda", a.lambda);
            "carry"
        }
        Command::Vdc(a) => {
            p.set("n", a.n).set("k", a.k).set("r", a.r);
            put(&mut p, "instances", &a.instances);
            "vdc"
        }
        Command::Lod(LodCmd::Total { x, theta, d_max, per_d }) => {
            p.set("x", x);
            put(&mut p, "theta", theta);
            put(&mut p, "d_max", d_max);
            if *per_d {
                p.set("per_d", true);
            }
            "lod.total"
        }
        Command::Lod(LodCmd::Ap { x, d, a }) => {
            p.set("x", x).set("d", d);
            put(&mut p, "a", a);
            "lod.ap"
        }
        Command::Lod(LodCmd::S0 { n, d_lo, d_hi, xi, strategy, cap }) => {
            p.set("n", n);
            put(&mut p, "d_lo", d_lo);
            put(&mut p, "d_hi", d_hi);
            put(&mut p, "xi", xi);
            put(&mut p, "strategy", strategy);
            put(&mut p, "cap", cap);
            "lod.s0"
        }
        Command::Lod(LodCmd::BeattyS0 { n, d, xi, alpha_grid, beta, beta_grid }) => {
            p.set("n", n).set("d", d);
            put(&mut p, "xi", xi);
            put(&mut p, "alpha_grid", alpha_grid);
            put(&mut p, "beta", beta);
            put(&mut p, "beta_grid", beta_grid);
            "lod.beatty-s0"
        }
        Command::Gowers(GowersCmd::Brute(a)) | Command::Gowers(GowersCmd::Recursion(a)) => {
            p.set("m", a.m).set("rho", a.rho);
            put(&mut p, "a", &a.a);
            if matches!(cmd, Command::Gowers(GowersCmd::Brute(_))) {
                "gowers.brute"
            } else {
                "gowers.recursion"
            }
        }
        Command::Gowers(GowersCmd::Graph { m, .. }) => {
            p.set("m", m);
            "gowers.graph"
        }
        Command::Gowers(GowersCmd::Contract { m, k_max }) => {
            p.set("m", m);
            put(&mut p, "k_max", k_max);
            "gowers.contract"
        }
        Command::Pshapiro(a) => {
            p.set("c", &a.c).set("n", &a.n);
            "pshapiro"
        }
        Command::Sweep(_) | Command::Replay(_) => return None,
    };
    Some((name, p))
}

fn emit(records: &[ExperimentRecord], out: Option<&str>, format: Format) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_records(records, format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_records(records, format, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn summary(label: &str, records: &[ExperimentRecord], out: Option<&str>, seed: Option<u64>) -> String {
    let count = |s: Status| records.iter().filter(|r| r.status == s).count();
    let mut line = format!(
        "{label}: {} record(s), {} ok, {} skipped, {} violated",
        records.len(),
        count(Status::Ok),
        count(Status::Skipped),
        count(Status::Violated)
    );
    if let Some(first) = records.first().filter(|r| r.status == Status::Ok) {
        line.push_str(&format!("; value {}", first.value));
    }
    if let Some(s) = seed {
        line.push_str(&format!("; seed {s}"));
    }
    if let Some(path) = out {
        line.push_str(&format!("; wrote {path}"));
    }
    line
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    let g = &cli.global;
    let format_flag: Option<Format> = g.format.as_deref().map(str::parse).transpose()?;
    if g.threads == Some(0) {
        return Err(CliError::Usage("--threads must be >= 1".into()));
    }
    if let Some(b) = g.budget {
        if !(b > 0.0) {
            return Err(CliError::Usage("--budget must be positive".into()));
        }
    }
    let (label, records, out, seed) = match &cli.command {
        Command::Sweep(args) => {
            let mut cfg = match &args.config {
                Some(path) => SweepConfig::parse(&fs::read_to_string(path)?)?,
                None => SweepConfig::new(""),
            };
            for kv in &args.set {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
                cfg.set(k, v)?;
            }
            if g.out.is_some() {
                cfg.out = g.out.clone();
            }
            if format_flag.is_some() {
                cfg.format = format_flag;
            }
            if g.threads.is_some() {
                cfg.threads = g.threads;
            }
            if g.budget.is_some() {
                cfg.budget = g.budget;
            }
            if let Some(s) = g.seed {
                cfg.seed = s;
            }
            cfg.timing |= g.timing;
            let records = sweep(&cfg)?;
            let format = cfg.format.unwrap_or_else(|| cfg.out.as_deref().map(Format::from_path).unwrap_or(Format::Csv));
            emit(&records, cfg.out.as_deref(), format)?;
            (format!("sweep {}", cfg.experiment), records, cfg.out.clone(), Some(cfg.seed))
        }
        Command::Replay(args) => {
            let format = format_flag.unwrap_or_else(|| Format::from_path(&args.input));
            let records = read_records(File::open(&args.input)?, format)?;
            let ctx = RunContext { budget: g.budget, seed: g.seed.unwrap_or(DEFAULT_SEED), timing: false };
            let mut mismatches = 0;
            for r in records.iter().filter(|r| !r.experiment.ends_with(".slope") && r.status != Status::Skipped) {
                let ctx = RunContext { seed: r.seed.unwrap_or(ctx.seed), ..ctx };
                let again = run_point(&r.experiment, &r.params, &ctx)?;
                let mut expect = r.clone();
                expect.wall_time_ms = 0;
                if !again.contains(&expect) {
                    mismatches += 1;
                    eprintln!("mismatch: {} {:?}", r.experiment, r.params);
                }
            }
            println!("replay {}: {} record(s), {mismatches} mismatch(es)", args.input, records.len());
            return Ok(if mismatches == 0 { 0 } else { 1 });
        }
        cmd => {
            let (name, params) = point_of(cmd).expect("single-point command");
            let seed = g.seed.unwrap_or(DEFAULT_SEED);
            let ctx = RunContext { budget: g.budget, seed, timing: g.timing };
            let records = match g.threads {
                Some(t) => rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?
                    .install(|| run_point(name, &params, &ctx))?,
                None => run_point(name, &params, &ctx)?,
            };
            if let Command::Gowers(GowersCmd::Graph { m, adjacency: Some(path) }) = cmd {
                fs::write(path, tmlod_core::gowers::build_graph(*m)?.export_adjacency())?;
            }
            let format = format_flag.unwrap_or_else(|| g.out.as_deref().map(Format::from_path).unwrap_or(Format::Csv));
            emit(&records, g.out.as_deref(), format)?;
            let shown_seed = records.iter().find_map(|r| r.seed);
            (name.to_string(), records, g.out.clone(), shown_seed)
        }
    };
    let line = summary(&label, &records, out.as_deref(), seed);
    if out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(if records.iter().any(|r| r.status == Status::Violated) { 1 } else { 0 })
}

/// Parses `argv` (including the program name) and runs it. Returns the
/// process exit code: 0 success, 1 invariant violation or runtime failure,
/// 2 usage error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("tmlod: {e}");
            if e.exit_code() == 2 {
                eprintln!("run `tmlod --help` for usage");
            }
            e.exit_code()
        }
    }
}
