//! CSV tables and JSON summaries.
//!
//! Floats are written with 17 significant digits in scientific notation so
//! they round-trip exactly; `+∞` is written as `inf`. Every CSV starts with
//! `# ` comment lines carrying the tool version, the seed and the full
//! configuration, followed by the header row.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

pub fn format_float(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.16e}")
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Float(v) => f.write_str(&format_float(*v)),
            Cell::Text(s) => f.write_str(s),
            Cell::Bool(b) => f.write_str(if *b { "1" } else { "0" }),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, provenance: &Provenance) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# stablematch {VERSION}");
        let _ = writeln!(out, "# seed={}", provenance.seed);
        let _ = writeln!(out, "# config={}", provenance.config);
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// What every output file records about the run that produced it.
#[derive(Clone, Debug)]
pub struct Provenance {
    pub seed: u64,
    /// Full configuration as a JSON object.
    pub config: Value,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub se: Option<f64>,
    pub ci: Option<(f64, f64)>,
    pub count: Option<u64>,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate {
            value,
            se: None,
            ci: None,
            count: None,
        }
    }

    pub fn with_se(value: f64, se: f64, count: usize) -> Self {
        let half = stablematch_core::stats::Z_95 * se;
        Estimate {
            value,
            se: Some(se),
            ci: Some((value - half, value + half)),
            count: Some(count as u64),
        }
    }

    pub fn with_ci(value: f64, ci: (f64, f64), count: usize) -> Self {
        Estimate {
            value,
            se: None,
            ci: Some(ci),
            count: Some(count as u64),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Verdict {
    pub statistic: f64,
    pub threshold: String,
    pub pass: bool,
}

/// Summary of one run.
#[derive(Clone, Debug, Default)]
pub struct Summary {
    pub estimates: BTreeMap<String, Estimate>,
    pub verdicts: BTreeMap<String, Verdict>,
    pub notes: Vec<String>,
}

impl Summary {
    pub fn estimate(&mut self, name: impl Into<String>, e: Estimate) {
        self.estimates.insert(name.into(), e);
    }

    pub fn verdict(&mut self, name: impl Into<String>, statistic: f64, threshold: impl Into<String>, pass: bool) {
        self.verdicts.insert(
            name.into(),
            Verdict {
                statistic,
                threshold: threshold.into(),
                pass,
            },
        );
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.values().all(|v| v.pass)
    }

    pub fn render_json(&self, provenance: &Provenance, runtime_seconds: Option<f64>) -> String {
        // Non-finite numbers are not valid JSON; write them as strings.
        fn num(x: f64) -> Value {
            if x.is_finite() {
                json!(x)
            } else {
                json!(format_float(x))
            }
        }
        let estimates: serde_json::Map<String, Value> = self
            .estimates
            .iter()
            .map(|(k, e)| {
                let mut o = serde_json::Map::new();
                o.insert("value".into(), num(e.value));
                o.insert("se".into(), e.se.map(num).unwrap_or(Value::Null));
                o.insert(
                    "ci".into(),
                    e.ci.map(|(a, b)| json!([num(a), num(b)])).unwrap_or(Value::Null),
                );
                if let Some(c) = e.count {
                    o.insert("count".into(), json!(c));
                }
                (k.clone(), Value::Object(o))
            })
            .collect();
        let verdicts: serde_json::Map<String, Value> = self
            .verdicts
            .iter()
            .map(|(k, v)| {
                (
                    k.clone(),
                    json!({ "statistic": num(v.statistic), "threshold": v.threshold, "pass": v.pass }),
                )
            })
            .collect();
        let mut root = serde_json::Map::new();
        root.insert(
            "config".into(),
            json!({ "version": VERSION, "seed": provenance.seed, "settings": provenance.config }),
        );
        root.insert("estimates".into(), Value::Object(estimates));
        root.insert("verdicts".into(), Value::Object(verdicts));
        if !self.notes.is_empty() {
            root.insert("notes".into(), json!(self.notes));
        }
        if let Some(t) = runtime_seconds {
            root.insert("runtime_seconds".into(), json!(t));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("serializable");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats() {
        assert_eq!(format_float(f64::INFINITY), "inf");
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(format_float(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["replicate", "x", "flag"]);
        t.push(vec![0usize.into(), f64::INFINITY.into(), true.into()]);
        let p = Provenance {
            seed: 7,
            config: json!({"n": 3}),
        };
        let s = t.render(&p);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], format!("# stablematch {VERSION}"));
        assert_eq!(lines[1], "# seed=7");
        assert_eq!(lines[2], "# config={\"n\":3}");
        assert_eq!(lines[3], "replicate,x,flag");
        assert_eq!(lines[4], "0,inf,1");
    }

    #[test]
    fn json_layout() {
        let mut s = Summary::default();
        s.estimate("mean", Estimate::with_se(1.0, 0.1, 10));
        s.verdict("ok", 0.5, "< 1", true);
        let p = Provenance {
            seed: 1,
            config: json!({}),
        };
        let v: Value = serde_json::from_str(&s.render_json(&p, None)).unwrap();
        assert_eq!(v["config"]["seed"], 1);
        assert_eq!(v["estimates"]["mean"]["value"], 1.0);
        assert_eq!(v["verdicts"]["ok"]["pass"], true);
        assert!(v.get("runtime_seconds").is_none());
    }
}
