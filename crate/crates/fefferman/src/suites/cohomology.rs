use fefferman_core::cohomology::{Cochain, HarmonicReport, KostantComplex};
use fefferman_core::lie::{build_qc, qc_tower, GradedLieAlgebra};
use fefferman_core::scalar::qr;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{progress, trial_rng};
use crate::report::{Entry, Report, Section};
use crate::{SuiteConfig, SuiteError, SuiteResult};

pub fn run(cfg: &SuiteConfig) -> SuiteResult<Report> {
    if !(1..=3).contains(&cfg.n) {
        return Err(SuiteError(format!("cohomology needs n in 1..=3, got {}", cfg.n)));
    }
    let n = cfg.n;
    let alg = build_qc(n)?;
    let cx = KostantComplex::new(&alg)?;
    let mut report = Report::new(cfg);
    report.param("algebra", json!(alg.name())).param("dim", json!(alg.dim()));

    let h1 = harmonic(&cx, 1);
    let mut s1 = Section::new("H1");
    let nonzero: Vec<(i32, usize)> =
        h1.blocks.iter().filter(|b| b.homogeneity >= 0 && b.dim > 0).map(|b| (b.homogeneity, b.dim)).collect();
    s1.push(Entry::exact(
        "H1_l = 0 for all l >= 0",
        nonzero.is_empty(),
        format!("nonzero blocks {nonzero:?}; total dim over all l {}", h1.total_dim()),
    ));
    s1.data("blocks", block_table(&h1));
    report.sections.push(s1);

    let h2 = harmonic(&cx, 2);
    let mut s2 = Section::new("H2");
    let (d1, d2) = (h2.dim_at(1), h2.dim_at(2));
    if n == 1 {
        s2.push(Entry::exact("H2 homogeneity-1 block is nonzero", d1 > 0, format!("dim {d1}")));
    } else {
        s2.push(Entry::exact("H2 homogeneity-1 block is zero", d1 == 0, format!("dim {d1}")));
        s2.push(Entry::exact("H2 homogeneity-2 block is nonzero", d2 > 0, format!("dim {d2}")));
        let b2 = h2.blocks.iter().find(|b| b.homogeneity == 2);
        let contained = b2.is_some_and(|b| b.contained_in_l2g0);
        s2.push(Entry::exact("homogeneity-2 harmonics lie in L2(g-1)* (x) g0", contained, ""));
        let bracket = cx.bracket_tensor_id_matrix();
        let killed = b2.is_some_and(|b| {
            b.basis.iter().all(|h| {
                let w = cx.to_wedge(&Cochain { degree: 2, coeffs: h.clone() });
                Cochain { degree: 1, coeffs: bracket.apply(&w.coeffs) }.is_zero()
            })
        });
        s2.push(Entry::exact("homogeneity-2 harmonics are annihilated by [ , ] (x) id", killed, ""));
    }
    let positive: Vec<i32> = h2.blocks.iter().filter(|b| b.homogeneity > 0 && b.dim > 0).map(|b| b.homogeneity).collect();
    s2.push(
        Entry::exact("positive homogeneities carrying harmonic curvature", true, format!("{positive:?}")).info(),
    );
    s2.data("blocks", block_table(&h2));
    report.sections.push(s2);

    let mut hodge = Section::new("Hodge decomposition");
    for deg in [1, 2] {
        progress(format_args!("Hodge check in degree {deg}"));
        let h = cx.hodge_check(deg);
        let (dim, im_d, ker, im_c) = h.totals();
        hodge.push(Entry::exact(
            format!("C{deg} = im d + ker box + im codiff"),
            h.ok(),
            format!("{dim} = {im_d} + {ker} + {im_c}"),
        ));
        let rows: Vec<Value> = h
            .blocks
            .iter()
            .map(|b| {
                json!({"degree": deg, "homogeneity": b.homogeneity, "block": b.block_dim, "im_d": b.im_d,
                       "ker_box": b.ker_box, "im_codiff": b.im_codiff, "ok": b.ok()})
            })
            .collect();
        hodge.data(&format!("degree {deg}"), Value::Array(rows));
    }
    report.sections.push(hodge);

    report.sections.push(codifferential_section(cfg)?);
    Ok(report)
}

pub const CROSS_COCHAINS: usize = 50;
const DENSITY: f64 = 0.3;

/// Both codifferential formulas on random 2-cochains, and the squares of
/// the differential and codifferential, for every algebra of the tower.
fn codifferential_section(cfg: &SuiteConfig) -> SuiteResult<Section> {
    let mut s = Section::new("codifferential");
    let algs: Vec<GradedLieAlgebra> = if cfg.n <= 2 { qc_tower(cfg.n)?.into() } else { vec![build_qc(cfg.n)?] };
    for (k, alg) in algs.iter().enumerate() {
        progress(format_args!("codifferential formulas on {}", alg.name()));
        let cx = KostantComplex::new(alg)?;
        let agree = (0..CROSS_COCHAINS as u64)
            .into_par_iter()
            .filter(|&i| {
                let mut rng = trial_rng(cfg.seed, ((k as u64 + 8) << 32) + i);
                let phi = cx.random_cochain(2, None, DENSITY, &mut rng);
                let (p1, p2) = cx.codifferential_minus(&phi);
                p1.sub(&p2.scale(&qr(1, 2))) == cx.codifferential_wedge(&phi)
            })
            .count();
        let name = alg.name();
        s.push(Entry::exact(
            format!("{name}: g- formula equals wedge formula"),
            agree == CROSS_COCHAINS,
            format!("{agree}/{CROSS_COCHAINS} cochains"),
        ));
        let d: Vec<_> = (0..3).map(|n| cx.differential_matrix(n)).collect();
        let c: Vec<_> = (1..4).map(|n| cx.codifferential_matrix(n)).collect();
        let dd = d[1].mul(&d[0]).is_zero() && d[2].mul(&d[1]).is_zero();
        let cc = c[0].mul(&c[1]).is_zero() && c[1].mul(&c[2]).is_zero();
        s.push(Entry::exact(format!("{name}: d o d = 0 on C0 and C1"), dd, ""));
        s.push(Entry::exact(format!("{name}: codiff o codiff = 0 on C2 and C3"), cc, ""));
    }
    Ok(s)
}

fn harmonic(cx: &KostantComplex<'_>, degree: usize) -> HarmonicReport {
    let total = cx.homogeneities(degree).len();
    let mut done = 0;
    cx.harmonic_report_with(degree, |b| {
        done += 1;
        progress(format_args!(
            "H{degree}: block {done}/{total} (l = {}, size {}) -> dim {}",
            b.homogeneity, b.block_dim, b.dim
        ));
    })
}

fn block_table(h: &HarmonicReport) -> Value {
    Value::Array(
        h.blocks
            .iter()
            .map(|b| {
                json!({"homogeneity": b.homogeneity, "block": b.block_dim, "dim": b.dim,
                       "in_L2_g0": b.contained_in_l2g0})
            })
            .collect(),
    )
}
