//! Experiment records and their CSV/JSON persistence.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::error::CliError;

/// Insertion-ordered string map.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Params(Vec<(String, String)>);

impl Params {
    pub fn new() -> Self {
        Params(Vec::new())
    }

    /// Sets `key`, replacing an earlier value in place.
    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        let value = value.to_string();
        match self.0.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.0.push((key.to_string(), value)),
        }
        self
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.set(key, value);
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.get(key).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(k, _)| k.as_str())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses a required value.
    pub fn req<T: FromStr>(&self, key: &str) -> Result<T, CliError>
    where
        T::Err: fmt::Display,
    {
        let raw = self.get(key).ok_or_else(|| CliError::Usage(format!("missing parameter `{key}`")))?;
        raw.parse()
            .map_err(|e| CliError::Usage(format!("bad value {raw:?} for `{key}`: {e}")))
    }

    /// Parses an optional value.
    pub fn opt<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(_) => self.req(key).map(Some),
        }
    }

    pub fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: fmt::Display,
    {
        Ok(self.opt(key)?.unwrap_or(default))
    }

    fn to_json(&self) -> Value {
        Value::Object(self.iter().map(|(k, v)| (k.to_string(), Value::String(v.to_string()))).collect())
    }

    fn from_json(v: &Value, what: &str) -> Result<Self, CliError> {
        let obj = v.as_object().ok_or_else(|| CliError::Format(format!("`{what}` must be an object")))?;
        let mut p = Params::new();
        for (k, v) in obj {
            let s = v.as_str().ok_or_else(|| CliError::Format(format!("`{what}.{k}` must be a string")))?;
            p.set(k, s);
        }
        Ok(p)
    }
}

impl FromIterator<(String, String)> for Params {
    fn from_iter<I: IntoIterator<Item = (String, String)>>(iter: I) -> Self {
        let mut p = Params::new();
        for (k, v) in iter {
            p.set(&k, v);
        }
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Budget exceeded; no value was computed.
    Skipped,
    /// A checked inequality failed.
    Violated,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Skipped => "skipped",
            Status::Violated => "violated",
        }
    }
}

impl FromStr for Status {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "ok" => Ok(Status::Ok),
            "skipped" => Ok(Status::Skipped),
            "violated" => Ok(Status::Violated),
            _ => Err(CliError::Format(format!("unknown status {s:?}"))),
        }
    }
}

/// One evaluated parameter point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub params: Params,
    /// Decimal text, or an exact `num/den` / `num/2^k` / integer string.
    pub value: String,
    pub exact: bool,
    /// Secondary outputs of the same computation.
    pub metrics: Params,
    pub wall_time_ms: u64,
    pub seed: Option<u64>,
    pub status: Status,
}

impl ExperimentRecord {
    pub fn new(experiment: &str, params: Params) -> Self {
        ExperimentRecord {
            experiment: experiment.to_string(),
            params,
            value: String::new(),
            exact: false,
            metrics: Params::new(),
            wall_time_ms: 0,
            seed: None,
            status: Status::Ok,
        }
    }

    pub fn exact(mut self, value: impl ToString) -> Self {
        self.value = value.to_string();
        self.exact = true;
        self
    }

    pub fn decimal(mut self, value: f64) -> Self {
        self.value = format_f64(value);
        self.exact = false;
        self
    }

    pub fn metric(mut self, key: &str, value: impl ToString) -> Self {
        self.metrics.set(key, value);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    /// The value as a float, if it parses as decimal or exact text.
    pub fn value_f64(&self) -> Option<f64> {
        parse_number(&self.value)
    }
}

/// Shortest round-tripping decimal form.
pub fn format_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Reads `num/den`, `num/2^k`, integers and decimals as `f64`.
pub fn parse_number(s: &str) -> Option<f64> {
    if let Ok(d) = s.parse::<tmlod_core::DyadicRational>() {
        return Some(d.to_f64());
    }
    if let Ok(r) = s.parse::<tmlod_core::Rational>() {
        return Some(r.to_f64());
    }
    s.parse::<f64>().ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// `.json` selects JSON; everything else is CSV.
    pub fn from_path(path: &str) -> Format {
        if path.to_ascii_lowercase().ends_with(".json") {
            Format::Json
        } else {
            Format::Csv
        }
    }
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Usage(format!("unknown format {s:?}; use csv or json"))),
        }
    }
}

const METRIC_PREFIX: &str = "out.";
const TAIL: [&str; 3] = ["wall_time_ms", "seed", "status"];

fn union_keys<'a>(sets: impl Iterator<Item = &'a Params>) -> Vec<String> {
    let mut keys: Vec<String> = Vec::new();
    for p in sets {
        for k in p.keys() {
            if !keys.iter().any(|x| x == k) {
                keys.push(k.to_string());
            }
        }
    }
    keys
}

/// Header row, then one row per record. Parameters become columns between
/// `experiment` and `value`; metrics follow `exact` with an `out.` prefix.
pub fn write_csv<W: Write>(records: &[ExperimentRecord], out: W) -> Result<(), CliError> {
    let params = union_keys(records.iter().map(|r| &r.params));
    let metrics = union_keys(records.iter().map(|r| &r.metrics));
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let mut header = vec!["experiment".to_string()];
    header.extend(params.iter().cloned());
    header.push("value".into());
    header.push("exact".into());
    header.extend(metrics.iter().map(|m| format!("{METRIC_PREFIX}{m}")));
    header.extend(TAIL.iter().map(|s| s.to_string()));
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![r.experiment.clone()];
        row.extend(params.iter().map(|k| r.params.get(k).unwrap_or("").to_string()));
        row.push(r.value.clone());
        row.push(r.exact.to_string());
        row.extend(metrics.iter().map(|k| r.metrics.get(k).unwrap_or("").to_string()));
        row.push(r.wall_time_ms.to_string());
        row.push(r.seed.map(|s| s.to_string()).unwrap_or_default());
        row.push(r.status.as_str().to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ExperimentRecord>, CliError> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    let pos = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Format(format!("missing column `{name}`")))
    };
    let (exp_col, value_col, exact_col) = (pos("experiment")?, pos("value")?, pos("exact")?);
    let (time_col, seed_col, status_col) = (pos(TAIL[0])?, pos(TAIL[1])?, pos(TAIL[2])?);
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let cell = |i: usize| row.get(i).unwrap_or("");
        let mut params = Params::new();
        for i in exp_col + 1..value_col {
            if !cell(i).is_empty() {
                params.set(&header[i], cell(i));
            }
        }
        let mut metrics = Params::new();
        for i in exact_col + 1..time_col {
            if !cell(i).is_empty() {
                let key = header[i].strip_prefix(METRIC_PREFIX).unwrap_or(&header[i]);
                metrics.set(key, cell(i));
            }
        }
        let num = |i: usize, what: &str| -> Result<u64, CliError> {
            cell(i).parse().map_err(|_| CliError::Format(format!("bad {what} {:?}", cell(i))))
        };
        out.push(ExperimentRecord {
            experiment: cell(exp_col).to_string(),
            params,
            value: cell(value_col).to_string(),
            exact: cell(exact_col) == "true",
            metrics,
            wall_time_ms: num(time_col, "wall_time_ms")?,
            seed: if cell(seed_col).is_empty() { None } else { Some(num(seed_col, "seed")?) },
            status: cell(status_col).parse()?,
        });
    }
    Ok(out)
}

fn record_to_json(r: &ExperimentRecord) -> Value {
    let mut m = Map::new();
    m.insert("experiment".into(), Value::String(r.experiment.clone()));
    m.insert("params".into(), r.params.to_json());
    m.insert("value".into(), Value::String(r.value.clone()));
    m.insert("exact".into(), Value::Bool(r.exact));
    m.insert("metrics".into(), r.metrics.to_json());
    m.insert("wall_time_ms".into(), Value::from(r.wall_time_ms));
    m.insert("seed".into(), r.seed.map(Value::from).unwrap_or(Value::Null));
    m.insert("status".into(), Value::String(r.status.as_str().into()));
    Value::Object(m)
}

/// Pretty-printed array with a trailing newline.
pub fn write_json<W: Write>(records: &[ExperimentRecord], mut out: W) -> Result<(), CliError> {
    let arr = Value::Array(records.iter().map(record_to_json).collect());
    serde_json::to_writer_pretty(&mut out, &arr)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_json<R: Read>(input: R) -> Result<Vec<ExperimentRecord>, CliError> {
    let v: Value = serde_json::from_reader(input)?;
    let arr = v.as_array().ok_or_else(|| CliError::Format("expected a JSON array".into()))?;
    arr.iter()
        .map(|item| {
            let field = |k: &str| item.get(k).ok_or_else(|| CliError::Format(format!("missing field `{k}`")));
            let text = |k: &str| -> Result<String, CliError> {
                field(k)?
                    .as_str()
                    .map(str::to_string)
                    .ok_or_else(|| CliError::Format(format!("`{k}` must be a string")))
            };
            Ok(ExperimentRecord {
                experiment: text("experiment")?,
                params: Params::from_json(field("params")?, "params")?,
                value: text("value")?,
                exact: field("exact")?.as_bool().ok_or_else(|| CliError::Format("`exact` must be a bool".into()))?,
                metrics: Params::from_json(field("metrics")?, "metrics")?,
                wall_time_ms: field("wall_time_ms")?
                    .as_u64()
                    .ok_or_else(|| CliError::Format("`wall_time_ms` must be an integer".into()))?,
                seed: match field("seed")? {
                    Value::Null => None,
                    s => Some(s.as_u64().ok_or_else(|| CliError::Format("`seed` must be an integer".into()))?),
                },
                status: text("status")?.parse()?,
            })
        })
        .collect()
}

pub fn write_records<W: Write>(records: &[ExperimentRecord], format: Format, out: W) -> Result<(), CliError> {
    match format {
        Format::Csv => write_csv(records, out),
        Format::Json => write_json(records, out),
    }
}

pub fn read_records<R: Read>(input: R, format: Format) -> Result<Vec<ExperimentRecord>, CliError> {
    match format {
        Format::Csv => read_csv(input),
        Format::Json => read_json(input),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<ExperimentRecord> {
        vec![
            ExperimentRecord::new("lod.total", Params::new().with("x", 64).with("theta", "0.5"))
                .exact("15199/560")
                .metric("d_max", 8),
            ExperimentRecord::new("gowers.recursion", Params::new().with("m", 2).with("a", "0,0,0,1"))
                .exact("-1/2^4")
                .with_seed(7),
            ExperimentRecord::new("vdc", Params::new().with("n", 3)).decimal(0.1 + 0.2).with_status(Status::Violated),
        ]
    }

    #[test]
    fn csv_round_trip() {
        let mut buf = Vec::new();
        write_csv(&sample(), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("experiment,x,theta,m,a,n,value,exact,out.d_max,wall_time_ms,seed,status\n"));
        assert!(!text.contains('\r'));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), sample());
    }

    #[test]
    fn json_round_trip() {
        let mut buf = Vec::new();
        write_json(&sample(), &mut buf).unwrap();
        assert_eq!(read_json(buf.as_slice()).unwrap(), sample());
    }

    #[test]
    fn floats_survive_text() {
        let r = ExperimentRecord::new("t", Params::new()).decimal(0.1 + 0.2);
        assert_eq!(r.value_f64(), Some(0.1 + 0.2));
        assert_eq!(parse_number("-3/2^2"), Some(-0.75));
        assert_eq!(parse_number("1/3"), Some(1.0 / 3.0));
    }

    #[test]
    fn params_keep_order_and_replace() {
        let mut p = Params::new().with("b", 1).with("a", 2);
        p.set("b", 3);
        assert_eq!(p.iter().collect::<Vec<_>>(), vec![("b", "3"), ("a", "2")]);
        assert!(p.req::<u32>("c").is_err());
        assert!(p.req::<u32>("b").is_ok());
    }
}
