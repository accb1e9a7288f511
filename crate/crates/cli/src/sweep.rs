//! Parameter sweeps over cartesian grids.

use std::str::FromStr;

use rayon::prelude::*;
use tmlod_core::lod::slope_fit;

use crate::error::CliError;
use crate::experiments::{run_point, RunContext, DEFAULT_SEED};
use crate::record::{format_f64, ExperimentRecord, Format, Params, Status};

/// Values of one swept parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    List(Vec<String>),
    /// `start, start*factor, ...` up to `end`.
    Geometric { start: f64, end: f64, factor: f64, values: Vec<String> },
}

impl Grid {
    pub fn values(&self) -> &[String] {
        match self {
            Grid::List(v) => v,
            Grid::Geometric { values, .. } => values,
        }
    }

    pub fn is_geometric(&self) -> bool {
        matches!(self, Grid::Geometric { .. })
    }
}

fn integral(x: f64) -> bool {
    x.fract() == 0.0 && x.abs() < 9.0e15
}

impl FromStr for Grid {
    type Err = CliError;

    /// `a,b,c` or `geom:start:end:factor`.
    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = |why: &str| CliError::Usage(format!("bad grid {s:?}: {why}"));
        if let Some(rest) = s.strip_prefix("geom:") {
            let parts: Vec<f64> = rest
                .split(':')
                .map(|t| t.trim().parse::<f64>().map_err(|_| bad("expected numbers")))
                .collect::<Result<_, _>>()?;
            let [start, end, factor] = parts[..] else {
                return Err(bad("expected geom:start:end:factor"));
            };
            if !(start > 0.0 && end >= start && factor > 1.0) {
                return Err(bad("need 0 < start <= end and factor > 1"));
            }
            let ints = integral(start) && integral(factor);
            let mut values = Vec::new();
            let mut x = start;
            let mut i = 0i32;
            while x <= end * (1.0 + 1e-12) {
                values.push(if ints { format!("{}", x as u64) } else { format_f64(x) });
                i += 1;
                x = if ints { x * factor } else { start * factor.powi(i) };
                if values.len() > 10_000 {
                    return Err(bad("more than 10000 points"));
                }
            }
            return Ok(Grid::Geometric { start, end, factor, values });
        }
        let values: Vec<String> = s.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect();
        if values.is_empty() {
            return Err(bad("empty grid"));
        }
        Ok(Grid::List(values))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub experiment: String,
    /// In declaration order; the first key varies slowest.
    pub grids: Vec<(String, Grid)>,
    pub out: Option<String>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub budget: Option<f64>,
    pub seed: u64,
    pub timing: bool,
}

impl SweepConfig {
    pub fn new(experiment: &str) -> Self {
        SweepConfig {
            experiment: experiment.to_string(),
            grids: Vec::new(),
            out: None,
            format: None,
            threads: None,
            budget: None,
            seed: DEFAULT_SEED,
            timing: false,
        }
    }

    /// Applies one `key=value` setting; unknown keys become grids.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = key.trim();
        let value = value.trim();
        let num_err = |what: &str| CliError::Usage(format!("bad {what} {value:?}"));
        match key {
            "experiment" => self.experiment = value.to_string(),
            "out" => self.out = Some(value.to_string()),
            "format" => self.format = Some(value.parse()?),
            "threads" => self.threads = Some(value.parse().map_err(|_| num_err("thread count"))?),
            "budget" => self.budget = Some(value.parse().map_err(|_| num_err("budget"))?),
            "seed" => self.seed = value.parse().map_err(|_| num_err("seed"))?,
            "timing" => self.timing = value.parse().map_err(|_| num_err("timing flag"))?,
            "" => return Err(CliError::Usage("empty key in config".into())),
            _ => {
                let grid: Grid = value.parse()?;
                match self.grids.iter_mut().find(|(k, _)| k == key) {
                    Some(slot) => slot.1 = grid,
                    None => self.grids.push((key.to_string(), grid)),
                }
            }
        }
        Ok(())
    }

    /// Reads `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = SweepConfig::new("");
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.experiment.is_empty() {
            return Err(CliError::Usage("sweep needs `experiment`".into()));
        }
        if self.grids.iter().any(|(_, g)| g.values().is_empty()) {
            return Err(CliError::Usage("every grid must be nonempty".into()));
        }
        if let Some(b) = self.budget {
            if !(b > 0.0) {
                return Err(CliError::Usage("budget must be positive".into()));
            }
        }
        if self.threads == Some(0) {
            return Err(CliError::Usage("threads must be >= 1".into()));
        }
        Ok(())
    }

    /// Grid points in lexicographic order.
    pub fn points(&self) -> Vec<Params> {
        let mut points = vec![Params::new()];
        for (key, grid) in &self.grids {
            points = points
                .into_iter()
                .flat_map(|p| grid.values().iter().map(move |v| p.clone().with(key, v)))
                .collect();
        }
        points
    }

    pub fn context(&self) -> RunContext {
        RunContext { budget: self.budget, seed: self.seed, timing: self.timing }
    }
}

/// Evaluates every point, then appends slope rows. Output order depends
/// only on the grid, never on scheduling.
pub fn sweep(cfg: &SweepConfig) -> Result<Vec<ExperimentRecord>, CliError> {
    cfg.validate()?;
    let ctx = cfg.context();
    let points = cfg.points();
    let run = || -> Result<Vec<Vec<ExperimentRecord>>, CliError> {
        points.par_iter().map(|p| run_point(&cfg.experiment, p, &ctx)).collect()
    };
    let results = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    let grid_rows: Vec<(Params, Vec<ExperimentRecord>)> = points.into_iter().zip(results).collect();
    let mut out: Vec<ExperimentRecord> = grid_rows.iter().flat_map(|(_, r)| r.iter().cloned()).collect();
    out.extend(slope_rows(cfg, &grid_rows)?);
    Ok(out)
}

/// One slope row per setting of the other parameters, when exactly one
/// parameter runs over a geometric range.
fn slope_rows(cfg: &SweepConfig, rows: &[(Params, Vec<ExperimentRecord>)]) -> Result<Vec<ExperimentRecord>, CliError> {
    let geometric: Vec<&str> = cfg.grids.iter().filter(|(_, g)| g.is_geometric()).map(|(k, _)| k.as_str()).collect();
    let [var] = geometric[..] else {
        return Ok(Vec::new());
    };
    let others: Vec<&str> = cfg.grids.iter().map(|(k, _)| k.as_str()).filter(|k| *k != var).collect();
    let mut groups: Vec<(Params, Vec<(f64, f64)>)> = Vec::new();
    for (point, records) in rows {
        let key: Params = others.iter().map(|k| (k.to_string(), point.get(k).unwrap_or("").to_string())).collect();
        let Some(head) = records.first() else { continue };
        let x: f64 = point.get(var).and_then(|v| v.parse().ok()).unwrap_or(f64::NAN);
        let idx = match groups.iter().position(|(k, _)| *k == key) {
            Some(i) => i,
            None => {
                groups.push((key, Vec::new()));
                groups.len() - 1
            }
        };
        if head.status == Status::Ok {
            if let Some(y) = head.value_f64() {
                if x > 0.0 && y > 0.0 {
                    groups[idx].1.push((x, y));
                }
            }
        }
    }
    let mut out = Vec::new();
    for (key, pts) in groups {
        let mut params = Params::new().with("variable", var);
        for (k, v) in key.iter() {
            params.set(k, v);
        }
        params.set("points", pts.len());
        let rec = ExperimentRecord::new(&format!("{}.slope", cfg.experiment), params);
        if pts.len() < 2 {
            out.push(rec.metric("reason", "fewer than 2 positive points").with_status(Status::Skipped));
            continue;
        }
        let fit = slope_fit(&pts)?;
        out.push(
            rec.decimal(fit.slope)
                .metric("intercept", format_f64(fit.intercept))
                .metric("residual", format_f64(fit.residual)),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_grid_integers() {
        let g: Grid = "geom:16:256:4".parse().unwrap();
        assert_eq!(g.values(), ["16", "64", "256"]);
        let g: Grid = "geom:1:2:1.5".parse().unwrap();
        assert_eq!(g.values(), ["1.0", "1.5"]);
    }

    #[test]
    fn config_parses_and_orders_points() {
        let cfg = SweepConfig::parse("experiment = carry\n# note\nr = 1,2\nlambda=3,4\nend=100\nalpha=7/3\n").unwrap();
        let pts = cfg.points();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[1].get("r"), Some("1"));
        assert_eq!(pts[1].get("lambda"), Some("4"));
        assert_eq!(pts[2].get("r"), Some("2"));
    }

    #[test]
    fn bad_config_is_usage_error() {
        assert_eq!(SweepConfig::parse("just words").unwrap_err().exit_code(), 2);
        assert_eq!(SweepConfig::parse("x = geom:4:2:2").unwrap_err().exit_code(), 2);
        assert!(SweepConfig::parse("budget = 0\nexperiment = digits").unwrap().validate().is_err());
    }

    #[test]
    fn slope_row_for_geometric_lod() {
        let cfg = SweepConfig::parse("experiment = lod.total\nx = geom:256:4096:4\ntheta = 0.5").unwrap();
        let rows = sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 4);
        let last = rows.last().unwrap();
        assert_eq!(last.experiment, "lod.total.slope");
        assert_eq!(last.params.get("variable"), Some("x"));
        assert_eq!(last.params.get("points"), Some("3"));
        assert!(last.value_f64().unwrap() < 1.0);
    }

    #[test]
    fn single_point_grid() {
        let cfg = SweepConfig::parse("experiment = gowers.graph\nm = 2").unwrap();
        assert_eq!(sweep(&cfg).unwrap().len(), 1);
    }
}
