use std::fmt::Write as _;

use fefferman_core::checks::Check;
use serde_json::{json, Map, Value};

use crate::config::{Format, SuiteConfig};

pub const SCHEMA: &str = "1";

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub name: String,
    pub pass: bool,
    /// Informational entries are reported but do not decide the exit code.
    pub gating: bool,
    pub detail: String,
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
}

impl Entry {
    pub fn exact(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Entry { name: name.into(), pass, gating: true, detail: detail.into(), value: None, tolerance: None }
    }

    /// Passes iff `value <= tol`. NaN fails.
    pub fn below(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Entry {
            name: name.into(),
            pass: value <= tol,
            gating: true,
            detail: String::new(),
            value: Some(value),
            tolerance: Some(tol),
        }
    }

    pub fn info(mut self) -> Self {
        self.gating = false;
        self
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), json!(self.name));
        m.insert("pass".into(), json!(self.pass));
        m.insert("gating".into(), json!(self.gating));
        if let Some(v) = self.value {
            m.insert("value".into(), finite_or_string(v));
        }
        if let Some(t) = self.tolerance {
            m.insert("tolerance".into(), json!(t));
        }
        if !self.detail.is_empty() {
            m.insert("detail".into(), json!(self.detail));
        }
        Value::Object(m)
    }
}

impl From<Check> for Entry {
    fn from(c: Check) -> Self {
        Entry::exact(c.name, c.pass, c.detail)
    }
}

/// serde_json maps non-finite floats to null; keep them visible instead.
pub fn finite_or_string(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(format!("{v}"))
    }
}

#[derive(Clone, Debug, Default)]
pub struct Section {
    pub name: String,
    pub entries: Vec<Entry>,
    pub data: Map<String, Value>,
}

impl Section {
    pub fn new(name: impl Into<String>) -> Self {
        Section { name: name.into(), ..Default::default() }
    }

    pub fn push(&mut self, e: Entry) -> &mut Self {
        self.entries.push(e);
        self
    }

    pub fn extend(&mut self, es: impl IntoIterator<Item = Entry>) -> &mut Self {
        self.entries.extend(es);
        self
    }

    pub fn data(&mut self, key: &str, v: Value) -> &mut Self {
        self.data.insert(key.into(), v);
        self
    }

    pub fn passed(&self) -> bool {
        self.entries.iter().filter(|e| e.gating).all(|e| e.pass)
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub suite: String,
    pub config: Map<String, Value>,
    pub tolerances: Vec<(String, f64)>,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn new(cfg: &SuiteConfig) -> Self {
        let mut config = Map::new();
        config.insert("n".into(), json!(cfg.n));
        config.insert("seed".into(), json!(cfg.seed));
        config.insert("samples".into(), json!(cfg.samples));
        Report {
            suite: cfg.suite.clone(),
            config,
            tolerances: cfg.tolerances.iter().map(|(k, v)| (k.to_string(), v)).collect(),
            sections: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, v: Value) -> &mut Self {
        self.config.insert(key.into(), v);
        self
    }

    pub fn passed(&self) -> bool {
        self.sections.iter().all(|s| s.passed())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Section, &Entry)> {
        self.sections.iter().flat_map(|s| s.entries.iter().map(move |e| (s, e)))
    }

    pub fn find(&self, name: &str) -> Option<&Entry> {
        self.entries().map(|(_, e)| e).find(|e| e.name == name)
    }

    pub fn failures(&self) -> Vec<String> {
        self.entries()
            .filter(|(_, e)| e.gating && !e.pass)
            .map(|(s, e)| format!("{} / {}", s.name, e.name))
            .collect()
    }

    pub fn to_json_value(&self) -> Value {
        let total = self.entries().count();
        let failed = self.entries().filter(|(_, e)| !e.pass).count();
        let gating_failed = self.entries().filter(|(_, e)| e.gating && !e.pass).count();
        let tol: Map<String, Value> = self.tolerances.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let sections: Vec<Value> = self
            .sections
            .iter()
            .map(|s| {
                let mut m = Map::new();
                m.insert("name".into(), json!(s.name));
                m.insert("pass".into(), json!(s.passed()));
                m.insert("checks".into(), Value::Array(s.entries.iter().map(Entry::to_json).collect()));
                if !s.data.is_empty() {
                    m.insert("data".into(), Value::Object(s.data.clone()));
                }
                Value::Object(m)
            })
            .collect();
        json!({
            "schema": SCHEMA,
            "suite": self.suite,
            "config": Value::Object(self.config.clone()),
            "tolerances": Value::Object(tol),
            "sections": sections,
            "summary": {
                "checks": total,
                "failed": failed,
                "gating_failed": gating_failed,
                "pass": self.passed(),
            },
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("report values serialize");
        s.push('\n');
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "# {} report: {}\n", self.suite, verdict);
        let cfg: Vec<String> = self.config.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        let _ = writeln!(out, "Configuration: {}\n", cfg.join(", "));
        for s in &self.sections {
            let _ = writeln!(out, "## {}\n", s.name);
            if !s.entries.is_empty() {
                let _ = writeln!(out, "| check | result | value | tolerance | detail |");
                let _ = writeln!(out, "|---|---|---|---|---|");
                for e in &s.entries {
                    let result = match (e.pass, e.gating) {
                        (true, _) => "pass",
                        (false, true) => "FAIL",
                        (false, false) => "fail (informational)",
                    };
                    let value = e.value.map(|v| format!("{v:.3e}")).unwrap_or_else(|| "exact".into());
                    let tol = e.tolerance.map(|v| format!("{v:.0e}")).unwrap_or_default();
                    let _ = writeln!(out, "| {} | {} | {} | {} | {} |", md(&e.name), result, value, tol, md(&e.detail));
                }
                out.push('\n');
            }
            for (k, v) in &s.data {
                markdown_data(&mut out, k, v);
            }
        }
        let _ = writeln!(out, "Tolerances: {}", {
            let t: Vec<String> = self.tolerances.iter().map(|(k, v)| format!("{k}={v:e}")).collect();
            t.join(", ")
        });
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Markdown => self.to_markdown(),
        }
    }
}

fn md(s: &str) -> String {
    s.replace('|', "\\|").replace('\n', " ")
}

/// Arrays of flat objects become tables; everything else is shown inline.
fn markdown_data(out: &mut String, key: &str, v: &Value) {
    if let Value::Array(rows) = v {
        if let Some(Value::Object(first)) = rows.first() {
            let cols: Vec<&String> = first.keys().collect();
            if rows.iter().all(|r| r.as_object().is_some_and(|o| o.values().all(|x| !x.is_array() && !x.is_object()))) {
                let _ = writeln!(out, "**{key}**\n");
                let _ = writeln!(out, "| {} |", cols.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(" | "));
                let _ = writeln!(out, "|{}", "---|".repeat(cols.len()));
                for r in rows {
                    let o = r.as_object().expect("checked above");
                    let cells: Vec<String> = cols.iter().map(|c| o.get(*c).map(cell).unwrap_or_default()).collect();
                    let _ = writeln!(out, "| {} |", cells.join(" | "));
                }
                out.push('\n');
                return;
            }
        }
    }
    let _ = writeln!(out, "**{key}**: `{}`\n", v);
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => md(s),
        other => other.to_string(),
    }
}
