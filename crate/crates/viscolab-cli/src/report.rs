//! Report bundle assembly: pass/fail indicators, a deterministic JSON
//! summary, a separate timing file (wall-clock numbers are the one
//! non-reproducible output), CSV tables, and console lines.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use serde_json::{Map, Value};

#[derive(Debug, Clone)]
pub struct Indicator {
    pub name: String,
    pub value: f64,
    pub requirement: String,
    pub pass: bool,
}

impl Indicator {
    pub fn lt(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            requirement: format!("< {limit:.3e}"),
            pass: value < limit,
        }
    }

    pub fn gt(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            requirement: format!("> {limit:.3e}"),
            pass: value > limit,
        }
    }

    pub fn within(name: &str, value: f64, center: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            value,
            requirement: format!("= {center} within {tol:.3e}"),
            pass: (value - center).abs() <= tol,
        }
    }

    pub fn check(name: &str, pass: bool, requirement: &str) -> Self {
        Self {
            name: name.into(),
            value: if pass { 1.0 } else { 0.0 },
            requirement: requirement.into(),
            pass,
        }
    }
}

pub struct Report {
    pub kind: &'static str,
    pub resolution: (usize, usize),
    pub seed: u64,
    indicators: Vec<Indicator>,
    scalars: BTreeMap<String, f64>,
    timings: BTreeMap<String, f64>,
    timing_indicators: Vec<Indicator>,
}

impl Report {
    pub fn new(kind: &'static str, resolution: (usize, usize), seed: u64) -> Self {
        Self {
            kind,
            resolution,
            seed,
            indicators: Vec::new(),
            scalars: BTreeMap::new(),
            timings: BTreeMap::new(),
            timing_indicators: Vec::new(),
        }
    }

    pub fn push(&mut self, i: Indicator) {
        self.indicators.push(i);
    }

    pub fn scalar(&mut self, name: &str, value: f64) {
        self.scalars.insert(name.into(), value);
    }

    /// Records a wall-clock measurement, optionally bounded by a budget that
    /// participates in the overall verdict.
    pub fn timing(&mut self, name: &str, seconds: f64, budget: Option<f64>) {
        self.timings.insert(name.into(), seconds);
        if let Some(limit) = budget {
            self.timing_indicators
                .push(Indicator::lt(&format!("{name}_seconds"), seconds, limit));
        }
    }

    pub fn pass(&self) -> bool {
        self.indicators.iter().all(|i| i.pass) && self.timing_indicators.iter().all(|i| i.pass)
    }

    fn indicator_json(i: &Indicator) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), Value::from(i.name.clone()));
        m.insert("pass".into(), Value::from(i.pass));
        m.insert("requirement".into(), Value::from(i.requirement.clone()));
        m.insert("value".into(), Value::from(i.value));
        Value::Object(m)
    }

    /// Writes `summary.json` (byte-identical across runs with the same
    /// config and seed) and `timings.json` (wall-clock seconds and budget
    /// verdicts, excluded from the determinism contract).
    pub fn write(&self, out: &Path) -> io::Result<()> {
        fs::create_dir_all(out)?;

        let mut root = Map::new();
        root.insert("schema".into(), Value::from(1));
        root.insert("kind".into(), Value::from(self.kind));
        root.insert(
            "resolution".into(),
            Value::from(vec![self.resolution.0 as u64, self.resolution.1 as u64]),
        );
        root.insert("seed".into(), Value::from(self.seed));
        root.insert(
            "indicators".into(),
            Value::from(
                self.indicators
                    .iter()
                    .map(Self::indicator_json)
                    .collect::<Vec<_>>(),
            ),
        );
        let mut scal = Map::new();
        for (k, v) in &self.scalars {
            scal.insert(k.clone(), Value::from(*v));
        }
        root.insert("scalars".into(), Value::Object(scal));
        root.insert(
            "pass".into(),
            Value::from(self.indicators.iter().all(|i| i.pass)),
        );
        fs::write(
            out.join("summary.json"),
            serde_json::to_string_pretty(&Value::Object(root)).unwrap() + "\n",
        )?;

        let mut troot = Map::new();
        let mut tm = Map::new();
        for (k, v) in &self.timings {
            tm.insert(k.clone(), Value::from(*v));
        }
        troot.insert("seconds".into(), Value::Object(tm));
        troot.insert(
            "indicators".into(),
            Value::from(
                self.timing_indicators
                    .iter()
                    .map(Self::indicator_json)
                    .collect::<Vec<_>>(),
            ),
        );
        troot.insert(
            "pass".into(),
            Value::from(self.timing_indicators.iter().all(|i| i.pass)),
        );
        fs::write(
            out.join("timings.json"),
            serde_json::to_string_pretty(&Value::Object(troot)).unwrap() + "\n",
        )?;
        Ok(())
    }

    pub fn print(&self) {
        println!(
            "kind: {}  resolution: {}x{}  seed: {}",
            self.kind, self.resolution.0, self.resolution.1, self.seed
        );
        for i in self.indicators.iter().chain(&self.timing_indicators) {
            println!(
                "  [{}] {} = {:.6e}  (want {})",
                if i.pass { "PASS" } else { "FAIL" },
                i.name,
                i.value,
                i.requirement
            );
        }
        println!("result: {}", if self.pass() { "PASS" } else { "FAIL" });
    }
}

/// Writes a CSV table; the caller provides preformatted data lines.
pub fn write_table(path: &Path, header: &str, lines: &[String]) -> io::Result<()> {
    let mut s = String::with_capacity(header.len() + 1 + lines.iter().map(|l| l.len() + 1).sum::<usize>());
    s.push_str(header);
    s.push('\n');
    for l in lines {
        s.push_str(l);
        s.push('\n');
    }
    fs::write(path, s)
}
