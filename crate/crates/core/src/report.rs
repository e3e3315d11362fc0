//! JSON reports: per-check records, summary counts, and a serializer that
//! writes every float with 17 significant digits so values round-trip.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::Result;
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "==")]
    Equal,
}

/// One check: `measured relation bound`. `residual` is the signed margin
/// (`measured − bound` for `<=`, `bound − measured` for `>=`,
/// `|measured − bound|` for `==`); the check passes when it is `≤ 0` (or `0`
/// for equality).
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub measured: f64,
    pub relation: Relation,
    pub bound: f64,
    pub residual: f64,
}

impl CheckRecord {
    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        let ok = measured <= bound;
        Self::new(name, ok, measured, Relation::AtMost, bound, measured - bound)
    }

    pub fn at_least(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        let ok = measured >= bound;
        Self::new(name, ok, measured, Relation::AtLeast, bound, bound - measured)
    }

    /// Exact equality, used for integers.
    pub fn equal(name: impl Into<String>, measured: f64, expected: f64) -> Self {
        let ok = measured == expected;
        Self::new(name, ok, measured, Relation::Equal, expected, (measured - expected).abs())
    }

    /// `measured ∈ [lo, hi]`, recorded as two checks.
    pub fn within(name: &str, measured: f64, lo: f64, hi: f64) -> [Self; 2] {
        [
            Self::at_least(format!("{name}.lower"), measured, lo),
            Self::at_most(format!("{name}.upper"), measured, hi),
        ]
    }

    fn new(name: impl Into<String>, ok: bool, measured: f64, relation: Relation, bound: f64, residual: f64) -> Self {
        Self {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            measured,
            relation,
            bound,
            residual,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: serde_json::Value,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
    pub results: serde_json::Value,
}

impl Report {
    pub fn new(command: impl Into<String>, config: serde_json::Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            config,
            checks: Vec::new(),
            summary: Summary {
                total: 0,
                passed: 0,
                failed: 0,
            },
            results: serde_json::Value::Null,
        }
    }

    pub fn push(&mut self, check: CheckRecord) {
        self.summary.total += 1;
        if check.passed() {
            self.summary.passed += 1;
        } else {
            self.summary.failed += 1;
        }
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = CheckRecord>) {
        for c in checks {
            self.push(c);
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut text = self.to_json()?;
        text.push('\n');
        std::fs::write(dir.join("report.json"), text)?;
        Ok(())
    }
}

/// Pretty JSON with floats written as `{:.16e}`; non-finite values become `null`.
struct SigFigFormatter {
    inner: PrettyFormatter<'static>,
}

impl Formatter for SigFigFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(w, "{value:.16e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Serializes any value with the 17-significant-digit float format.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let fmt = SigFigFormatter {
        inner: PrettyFormatter::with_indent(b"  "),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serializer emits UTF-8"))
}

/// CSV with header `t,eig_1,...,eig_n`; rows shorter than the widest are padded with empty cells.
pub fn curve_csv(rows: &[(f64, Vec<f64>)]) -> String {
    let width = rows.iter().map(|r| r.1.len()).max().unwrap_or(0);
    let mut out = String::from("t");
    for i in 1..=width {
        out.push_str(&format!(",eig_{i}"));
    }
    out.push('\n');
    for (t, eig) in rows {
        out.push_str(&format!("{t:.16e}"));
        for i in 0..width {
            out.push(',');
            if let Some(v) = eig.get(i) {
                out.push_str(&format!("{v:.16e}"));
            }
        }
        out.push('\n');
    }
    out
}
