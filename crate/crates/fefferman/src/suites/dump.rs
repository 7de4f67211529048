use fefferman_core::lie::{build_co, build_cr, build_qc, GradedLieAlgebra};
use fefferman_core::scalar::fmt_q;
use serde_json::{json, Value};

use crate::report::{Report, Section};
use crate::{SuiteConfig, SuiteError, SuiteResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgebraKind {
    Qc,
    Cr,
    Co,
}

impl std::str::FromStr for AlgebraKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "qc" => Ok(AlgebraKind::Qc),
            "cr" => Ok(AlgebraKind::Cr),
            "co" => Ok(AlgebraKind::Co),
            o => Err(format!("unknown algebra '{o}' (expected qc, cr or co)")),
        }
    }
}

/// The tower member of the given kind for qc parameter n.
pub fn algebra(kind: AlgebraKind, n: usize) -> SuiteResult<GradedLieAlgebra> {
    if n == 0 {
        return Err(SuiteError("dump needs n >= 1".into()));
    }
    Ok(match kind {
        AlgebraKind::Qc => build_qc(n)?,
        AlgebraKind::Cr => build_cr(2 * n + 1, 1)?,
        AlgebraKind::Co => build_co(4 * n + 3, 3)?,
    })
}

/// Labels, degrees, brackets [e_i, e_j] = Σ c^k e_k for i < j, and the
/// Killing form, all as exact fraction strings.
pub fn algebra_json(g: &GradedLieAlgebra) -> Value {
    let basis: Vec<Value> =
        (0..g.dim()).map(|i| json!({"index": i, "label": g.label(i), "degree": g.degree(i)})).collect();
    let mut brackets = Vec::new();
    for i in 0..g.dim() {
        for j in i + 1..g.dim() {
            for (k, c) in g.structure_constants(i, j) {
                brackets.push(json!([i, j, k, fmt_q(c)]));
            }
        }
    }
    let mut killing = Vec::new();
    for (i, row) in g.killing_gram().iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            if j >= i && *c != fefferman_core::scalar::q(0) {
                killing.push(json!([i, j, fmt_q(c)]));
            }
        }
    }
    let grading: Vec<Value> = g
        .grading_element()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != fefferman_core::scalar::q(0))
        .map(|(i, c)| json!([i, fmt_q(c)]))
        .collect();
    json!({
        "name": g.name(),
        "family": format!("{:?}", g.family()),
        "dim": g.dim(),
        "depth": g.depth(),
        "ambient_dim": g.ambient(),
        "basis": basis,
        "brackets": brackets,
        "killing": killing,
        "grading_element": grading,
    })
}

pub fn run(cfg: &SuiteConfig, kind: AlgebraKind) -> SuiteResult<Report> {
    let g = algebra(kind, cfg.n)?;
    let mut report = Report::new(cfg);
    report.param("algebra", json!(format!("{kind:?}").to_lowercase()));
    let mut s = Section::new(g.name().to_string());
    s.data("algebra", algebra_json(&g));
    report.sections.push(s);
    Ok(report)
}
