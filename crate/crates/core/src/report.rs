//! Structured verification reports and their text encoding.
//!
//! The encoding is one `key: value` per line with nesting by two-space
//! indentation and a fixed key order, so identical reports are
//! byte-identical. Floats are written in shortest round-trip exponent form.

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Unknown => "unknown",
        })
    }
}

impl FromStr for Verdict {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pass" => Ok(Verdict::Pass),
            "fail" => Ok(Verdict::Fail),
            "unknown" => Ok(Verdict::Unknown),
            _ => Err(Error::Parse(format!("unknown verdict `{s}`"))),
        }
    }
}

/// How a check's value is compared with its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `value <= threshold` (residuals).
    AtMost,
    /// `value >= threshold` (slacks, witness strengths).
    AtLeast,
}

impl Relation {
    fn as_str(self) -> &'static str {
        match self {
            Relation::AtMost => "le",
            Relation::AtLeast => "ge",
        }
    }
}

impl FromStr for Relation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "le" => Ok(Relation::AtMost),
            "ge" => Ok(Relation::AtLeast),
            _ => Err(Error::Parse(format!("unknown relation `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, threshold: f64) -> Self {
        let passed = match relation {
            Relation::AtMost => value <= threshold,
            Relation::AtLeast => value >= threshold,
        };
        Check {
            name: one_line(name.into()),
            value,
            relation,
            threshold,
            passed,
        }
    }
}

/// Elements (in the element text format) that exhibit a check's outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub label: String,
    pub value: f64,
    pub elements: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub suite: String,
    pub model: String,
    pub seed: u64,
    pub trials: u64,
    pub verdict: Verdict,
    pub max_residual: f64,
    pub config: Vec<(String, String)>,
    pub checks: Vec<Check>,
    pub witnesses: Vec<Witness>,
    pub notes: Vec<String>,
    /// Only written when timing was requested; keeps default output
    /// reproducible byte for byte.
    pub wall_time_ms: Option<u64>,
}

fn one_line(s: String) -> String {
    if s.contains('\n') {
        s.replace('\n', " ")
    } else {
        s
    }
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>, model: impl Into<String>) -> Self {
        VerificationReport {
            suite: one_line(suite.into()),
            model: one_line(model.into()),
            seed: 0,
            trials: 0,
            verdict: Verdict::Pass,
            max_residual: 0.0,
            config: Vec::new(),
            checks: Vec::new(),
            witnesses: Vec::new(),
            notes: Vec::new(),
            wall_time_ms: None,
        }
    }

    pub fn with_seed(mut self, seed: u64, trials: u64) -> Self {
        self.seed = seed;
        self.trials = trials;
        self
    }

    pub fn config(&mut self, key: impl Into<String>, value: impl ToString) {
        self.config
            .push((one_line(key.into()), one_line(value.to_string())));
    }

    pub fn push(&mut self, check: Check) -> &Check {
        self.checks.push(check);
        self.checks.last().unwrap()
    }

    pub fn check_le(&mut self, name: impl Into<String>, value: f64, threshold: f64) -> bool {
        self.push(Check::new(name, value, Relation::AtMost, threshold))
            .passed
    }

    pub fn check_ge(&mut self, name: impl Into<String>, value: f64, threshold: f64) -> bool {
        self.push(Check::new(name, value, Relation::AtLeast, threshold))
            .passed
    }

    pub fn witness(&mut self, label: impl Into<String>, value: f64, elements: Vec<String>) {
        self.witnesses.push(Witness {
            label: one_line(label.into()),
            value,
            elements: elements.into_iter().map(one_line).collect(),
        });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(one_line(note.into()));
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Recomputes `max_residual` and the verdict from the checks. A failing
    /// report always carries a witness: failing checks without an explicit
    /// one get a value-only witness.
    pub fn finalize(&mut self) {
        self.max_residual = self
            .checks
            .iter()
            .filter(|c| c.relation == Relation::AtMost)
            .fold(0.0, |m: f64, c| if c.value.is_nan() { f64::NAN } else { m.max(c.value) });
        let failed: Vec<Check> = self.checks.iter().filter(|c| !c.passed).cloned().collect();
        if failed.is_empty() {
            if self.verdict == Verdict::Fail {
                self.verdict = Verdict::Pass;
            }
            return;
        }
        self.verdict = Verdict::Fail;
        if self.witnesses.is_empty() {
            for c in failed {
                self.witness(format!("check {}", c.name), c.value, Vec::new());
            }
        }
    }

    /// Marks the report inconclusive unless it already failed.
    pub fn mark_unknown(&mut self) {
        if self.verdict != Verdict::Fail {
            self.verdict = Verdict::Unknown;
        }
    }

    /// Folds another report's checks, witnesses and notes into this one,
    /// prefixing names with the other report's suite.
    pub fn absorb(&mut self, other: VerificationReport) {
        let prefix = other.suite.clone();
        for mut c in other.checks {
            c.name = format!("{prefix}/{}", c.name);
            self.checks.push(c);
        }
        for mut w in other.witnesses {
            w.label = format!("{prefix}/{}", w.label);
            self.witnesses.push(w);
        }
        for n in other.notes {
            self.notes.push(format!("{prefix}: {n}"));
        }
        if other.verdict == Verdict::Unknown {
            self.mark_unknown();
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "suite: {}", self.suite);
        let _ = writeln!(s, "model: {}", self.model);
        let _ = writeln!(s, "seed: {}", self.seed);
        let _ = writeln!(s, "trials: {}", self.trials);
        let _ = writeln!(s, "verdict: {}", self.verdict);
        let _ = writeln!(s, "max_residual: {:e}", self.max_residual);
        s.push_str("config:\n");
        for (k, v) in &self.config {
            let _ = writeln!(s, "  {k}: {v}");
        }
        s.push_str("checks:\n");
        for c in &self.checks {
            let _ = writeln!(s, "  - name: {}", c.name);
            let _ = writeln!(s, "    value: {:e}", c.value);
            let _ = writeln!(s, "    relation: {}", c.relation.as_str());
            let _ = writeln!(s, "    threshold: {:e}", c.threshold);
            let _ = writeln!(s, "    passed: {}", c.passed);
        }
        s.push_str("witnesses:\n");
        for w in &self.witnesses {
            let _ = writeln!(s, "  - label: {}", w.label);
            let _ = writeln!(s, "    value: {:e}", w.value);
            s.push_str("    elements:\n");
            for e in &w.elements {
                let _ = writeln!(s, "      - {e}");
            }
        }
        s.push_str("notes:\n");
        for n in &self.notes {
            let _ = writeln!(s, "  - {n}");
        }
        if let Some(ms) = self.wall_time_ms {
            let _ = writeln!(s, "wall_time_ms: {ms}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Parser::new(text).parse()
    }

    /// Writes the text encoding to `path`.
    pub fn emit(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_text())
    }
}

struct Parser<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            lines: text.lines().collect(),
            pos: 0,
        }
    }

    fn err<T>(&self, msg: impl fmt::Display) -> Result<T> {
        Err(Error::Parse(format!("report line {}: {msg}", self.pos + 1)))
    }

    fn peek(&self) -> Option<&'a str> {
        self.lines.get(self.pos).copied()
    }

    /// Consumes `<indent><key>: <value>` and returns the value.
    fn field(&mut self, indent: &str, key: &str) -> Result<&'a str> {
        let Some(line) = self.peek() else {
            return self.err(format!("expected `{key}`, found end of input"));
        };
        let prefix = format!("{indent}{key}:");
        match line.strip_prefix(&prefix) {
            Some(rest) => {
                self.pos += 1;
                Ok(rest.strip_prefix(' ').unwrap_or(rest))
            }
            None => self.err(format!("expected `{key}`, found `{line}`")),
        }
    }

    fn num<T: FromStr>(&self, s: &str) -> Result<T> {
        match s.parse() {
            Ok(v) => Ok(v),
            Err(_) => self.err(format!("invalid number `{s}`")),
        }
    }

    /// Consumes `<indent>- <rest>` if present.
    fn item(&mut self, indent: &str) -> Option<&'a str> {
        let line = self.peek()?;
        let rest = line.strip_prefix(indent)?.strip_prefix("- ")?;
        self.pos += 1;
        Some(rest)
    }

    fn parse(mut self) -> Result<VerificationReport> {
        let mut r = VerificationReport::new(self.field("", "suite")?, self.field("", "model")?);
        let seed = self.field("", "seed")?;
        r.seed = self.num(seed)?;
        let trials = self.field("", "trials")?;
        r.trials = self.num(trials)?;
        r.verdict = self.field("", "verdict")?.parse()?;
        let mr = self.field("", "max_residual")?;
        r.max_residual = self.num(mr)?;

        self.field("", "config")?;
        while let Some(line) = self.peek() {
            let Some(rest) = line.strip_prefix("  ") else { break };
            let Some((k, v)) = rest.split_once(": ") else {
                return self.err("malformed config entry");
            };
            r.config.push((k.to_string(), v.to_string()));
            self.pos += 1;
        }

        self.field("", "checks")?;
        while let Some(name) = self.item("  ") {
            let name = match name.strip_prefix("name: ") {
                Some(n) => n.to_string(),
                None => return self.err("expected `name`"),
            };
            let value = self.field("    ", "value")?;
            let value = self.num(value)?;
            let relation = self.field("    ", "relation")?.parse()?;
            let threshold = self.field("    ", "threshold")?;
            let threshold = self.num(threshold)?;
            let passed = self.field("    ", "passed")?;
            let passed = self.num(passed)?;
            r.checks.push(Check {
                name,
                value,
                relation,
                threshold,
                passed,
            });
        }

        self.field("", "witnesses")?;
        while let Some(label) = self.item("  ") {
            let label = match label.strip_prefix("label: ") {
                Some(l) => l.to_string(),
                None => return self.err("expected `label`"),
            };
            let value = self.field("    ", "value")?;
            let value = self.num(value)?;
            self.field("    ", "elements")?;
            let mut elements = Vec::new();
            while let Some(e) = self.item("      ") {
                elements.push(e.to_string());
            }
            r.witnesses.push(Witness {
                label,
                value,
                elements,
            });
        }

        self.field("", "notes")?;
        while let Some(n) = self.item("  ") {
            r.notes.push(n.to_string());
        }

        if self.peek().is_some() {
            let ms = self.field("", "wall_time_ms")?;
            r.wall_time_ms = Some(self.num(ms)?);
        }
        if let Some(line) = self.peek() {
            return self.err(format!("unexpected trailing line `{line}`"));
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> VerificationReport {
        let mut r = VerificationReport::new("jb-condition", "spin:3:2").with_seed(7, 100);
        r.config("threshold", 0.01);
        r.check_le("eq7", 0.0818, 1e-9);
        r.check_ge("slack", 0.5, -1e-9);
        r.witness("pair", 0.1637, vec!["spin p 3.0 alpha 0.5 y 0.25 0.25".into()]);
        r.note("ascent init: y normalised in the primal norm");
        r.finalize();
        r
    }

    #[test]
    fn failing_check_sets_verdict() {
        let r = sample();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.max_residual, 0.0818);
    }

    #[test]
    fn fail_without_witness_gets_one() {
        let mut r = VerificationReport::new("x", "matrix:2");
        r.check_le("r", 1.0, 0.5);
        r.finalize();
        assert_eq!(r.witnesses.len(), 1);
    }

    #[test]
    fn text_round_trip() {
        let mut r = sample();
        assert_eq!(VerificationReport::from_text(&r.to_text()).unwrap(), r);
        r.wall_time_ms = Some(12);
        assert_eq!(VerificationReport::from_text(&r.to_text()).unwrap(), r);
        assert!(r.to_text().ends_with('\n'));
    }

    #[test]
    fn rejects_garbage() {
        assert!(VerificationReport::from_text("suite: a\nmodel b\n").is_err());
        let mut text = sample().to_text();
        text.push_str("extra: 1\n");
        assert!(VerificationReport::from_text(&text).is_err());
    }

    proptest! {
        #[test]
        fn floats_round_trip(values in proptest::collection::vec(any::<f64>(), 1..6), seed in any::<u64>()) {
            let mut r = VerificationReport::new("p", "matrix:3").with_seed(seed, 3);
            for (i, v) in values.iter().enumerate() {
                r.check_le(format!("c{i}"), *v, 1e-9);
            }
            r.finalize();
            let back = VerificationReport::from_text(&r.to_text()).unwrap();
            prop_assert_eq!(back.to_text(), r.to_text());
        }
    }
}
