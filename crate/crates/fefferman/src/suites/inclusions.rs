use fefferman_core::checks::Check;
use fefferman_core::cohomology::KostantComplex;
use fefferman_core::inclusions::{
    display_checks, reversal_control, scaling_checks, trace_pairing_checks, CochainInducer, GradedInclusion,
    IdentityChecker, Tower,
};
use fefferman_core::lie::qc_tower;
use fefferman_core::scalar::fmt_q;
use fefferman_core::transfer::{inverse_normality, normality_transfer, TowerComplexes};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{progress, trial_rng};
use crate::report::{Entry, Report, Section};
use crate::{SuiteConfig, SuiteError, SuiteResult};

#[derive(Clone, Debug)]
pub struct InclusionOptions {
    pub seeds: usize,
    pub negative_controls: bool,
    pub displays: bool,
    /// Random combinations of the normality solution space to re-check.
    pub combos: usize,
}

impl Default for InclusionOptions {
    fn default() -> Self {
        InclusionOptions { seeds: 100, negative_controls: false, displays: false, combos: 50 }
    }
}

const DENSITY: f64 = 0.3;

fn prefixed(phi: &GradedInclusion<'_>, checks: Vec<Check>) -> Vec<Entry> {
    checks
        .into_iter()
        .map(|c| {
            let mut e = Entry::from(c);
            e.name = format!("{}: {}", phi.name(), e.name);
            e
        })
        .collect()
}

pub fn run(cfg: &SuiteConfig, opts: &InclusionOptions) -> SuiteResult<Report> {
    if !(1..=2).contains(&cfg.n) {
        return Err(SuiteError(format!("inclusions needs n in 1..=2, got {}", cfg.n)));
    }
    let algs = qc_tower(cfg.n)?;
    let tower = Tower::new(&algs)?;
    let mut report = Report::new(cfg);
    report
        .param("seeds", json!(opts.seeds))
        .param("negative_controls", json!(opts.negative_controls))
        .param("displays", json!(opts.displays))
        .param("combos", json!(opts.combos));

    progress(format_args!("structural conditions"));
    let mut st = Section::new("structural conditions");
    let mut constants = Vec::new();
    for phi in [&tower.qc_cr, &tower.cr_co, &tower.qc_co] {
        st.extend(prefixed(phi, phi.structural_checks()?));
        constants.push(json!({"inclusion": phi.name(), "c": fmt_q(&phi.killing_constant()?)}));
    }
    st.push(Entry::exact("composition qc->cr->co equals the direct embedding", tower.composition_coherent()?, ""));
    for phi in [&tower.qc_cr, &tower.cr_co] {
        st.extend(prefixed(phi, phi.pairing_checks()?));
    }
    let pi = tower.qc.index_of("p.i").ok_or_else(|| SuiteError("qc basis has no p.i".into()))?;
    st.extend(prefixed(&tower.qc_cr, tower.qc_cr.second_identity_hypotheses(pi)));
    st.data("killing_constants", Value::Array(constants));
    report.sections.push(st);

    let cs = [KostantComplex::new(&algs[0])?, KostantComplex::new(&algs[1])?, KostantComplex::new(&algs[2])?];
    let to_cr = CochainInducer::new(&tower.qc_cr, &cs[0], &cs[1])?;
    let cr_co = CochainInducer::new(&tower.cr_co, &cs[1], &cs[2])?;
    let to_co = CochainInducer::new(&tower.qc_co, &cs[0], &cs[2])?;

    let mut ids = Section::new("codifferential identities");
    let mut complements = Vec::new();
    for (k, (ind, src)) in [(&to_cr, &cs[0]), (&cr_co, &cs[1])].into_iter().enumerate() {
        let phi = ind.inclusion();
        let s = phi.source();
        complements.push(json!({
            "inclusion": phi.name(),
            "complement": ind.complement().iter().map(|&u| s.label(u)).collect::<Vec<_>>(),
        }));
        let xs: Vec<usize> = if k == 0 {
            vec![pi]
        } else {
            s.minus_indices()
                .into_iter()
                .filter(|&x| phi.second_identity_hypotheses(x).iter().all(|c| c.pass))
                .collect()
        };
        progress(format_args!("{}: {} seeded cochains", phi.name(), opts.seeds));
        let chk = IdentityChecker::new(ind);
        let stream = (k as u64) << 32;
        let results: Vec<[bool; 4]> = (0..opts.seeds)
            .into_par_iter()
            .map(|i| {
                let mut rng = trial_rng(cfg.seed, stream + i as u64);
                let kappa = src.random_cochain(2, None, DENSITY, &mut rng);
                let kt = ind.induce(&kappa);
                let first = chk.first_identity(&kappa);
                let second = xs.iter().all(|&x| {
                    let r = chk.second_identity(&kappa, x);
                    r.lhs_eq_mid && r.mid_eq_rhs
                });
                let round = ind.restrict(&kt).as_ref() == Some(&kappa);
                [first, second, round, ind.kills_parabolic(&kt)]
            })
            .collect();
        let count = |j: usize| results.iter().filter(|r| r[j]).count();
        let n = opts.seeds;
        let name = phi.name();
        ids.push(Entry::exact(format!("{name}: first identity"), count(0) == n, format!("{}/{n} cochains", count(0))));
        let at: Vec<&str> = xs.iter().map(|&x| s.label(x)).collect();
        if xs.is_empty() {
            ids.push(
                Entry::exact(format!("{name}: second identity"), true, "hypotheses hold for no basis element of g-")
                    .info(),
            );
        } else {
            ids.push(Entry::exact(
                format!("{name}: second identity"),
                count(1) == n,
                format!("{}/{n} cochains at X in {at:?}", count(1)),
            ));
        }
        ids.push(Entry::exact(
            format!("{name}: induced cochain restricts back"),
            count(2) == n,
            format!("{}/{n}", count(2)),
        ));
        ids.push(Entry::exact(
            format!("{name}: induced cochain vanishes on phi_-(p)"),
            count(3) == n,
            format!("{}/{n}", count(3)),
        ));
    }
    ids.data("complements", Value::Array(complements));
    report.sections.push(ids);

    progress(format_args!("normality transfer"));
    let cx = TowerComplexes { qc: &cs[0], cr: &cs[1], co: &cs[2], to_cr: &to_cr, to_co: &to_co };
    let mut rng = trial_rng(cfg.seed, 1 << 40);
    let fwd = normality_transfer(&tower, &cx, opts.combos, &mut rng);
    let mut nt = Section::new("normality transfer");
    nt.extend(fwd.checks().into_iter().map(Entry::from));
    let fwd_total: usize = fwd.solutions.iter().map(|s| s.1).sum();
    nt.push(Entry::exact("solution space is nonzero", fwd_total > 0, format!("dim {fwd_total}")));
    progress(format_args!("inverse normality"));
    let inv = inverse_normality(&tower, &cx)?;
    nt.extend(inv.checks().into_iter().map(Entry::from));
    let inv_total: usize = inv.solutions.iter().map(|s| s.1).sum();
    nt.push(Entry::exact(
        "both directions describe spaces of equal dimension",
        inv_total == fwd_total,
        format!("{fwd_total} and {inv_total}"),
    ));
    nt.data("solutions", pairs(&fwd.solutions));
    nt.data("inverse_solutions", pairs(&inv.solutions));
    nt.data("S_by_degree", pairs(&fwd.s_by_degree));
    report.sections.push(nt);

    let mut tp = Section::new("trace pairings and scaling");
    tp.extend(trace_pairing_checks(&tower).into_iter().map(Entry::from));
    for phi in [&tower.qc_cr, &tower.cr_co] {
        tp.extend(scaling_checks(phi).into_iter().map(Entry::from));
    }
    report.sections.push(tp);

    if opts.negative_controls {
        progress(format_args!("negative controls"));
        report.sections.push(controls(cfg, opts, &tower, &cs, &to_cr)?);
    }
    if opts.displays {
        let mut d = Section::new("displayed image matrices");
        d.extend(display_checks(&tower).into_iter().map(Entry::from));
        report.sections.push(d);
    }
    Ok(report)
}

fn pairs(v: &[(i32, usize)]) -> Value {
    Value::Array(v.iter().map(|(l, d)| json!({"l": l, "dim": d})).collect())
}

/// Each entry passes when the control is caught.
fn controls(
    cfg: &SuiteConfig,
    opts: &InclusionOptions,
    tower: &Tower<'_>,
    cs: &[KostantComplex<'_>; 3],
    to_cr: &CochainInducer<'_>,
) -> SuiteResult<Section> {
    let mut s = Section::new("negative controls");
    for phi in [&tower.qc_cr, &tower.cr_co] {
        s.push(reversal_control(phi)?.into());
    }
    let trials = opts.seeds.clamp(1, 20);
    let mut generic = 0;
    for i in 0..trials {
        let mut rng = trial_rng(cfg.seed, (3 << 32) + i as u64);
        let r = cs[1].random_cochain(2, None, DENSITY, &mut rng);
        if !r.is_zero() && !to_cr.kills_parabolic(&r) {
            generic += 1;
        }
    }
    s.push(Entry::exact(
        "generic cr cochains do not vanish on phi_-(p)",
        generic == trials,
        format!("{generic}/{trials} detected"),
    ));
    // p.j fails the degree hypothesis of the second identity
    let qc = tower.qc;
    let pj = qc.index_of("p.j").ok_or_else(|| SuiteError("qc basis has no p.j".into()))?;
    let hyp_fail = tower.qc_cr.second_identity_hypotheses(pj).iter().any(|c| !c.pass);
    let chk = IdentityChecker::new(to_cr);
    let mut broken = 0;
    for i in 0..trials {
        let mut rng = trial_rng(cfg.seed, (4 << 32) + i as u64);
        let kappa = cs[0].random_cochain(2, None, DENSITY, &mut rng);
        let r = chk.second_identity(&kappa, pj);
        if !(r.lhs_eq_mid && r.mid_eq_rhs) {
            broken += 1;
        }
    }
    s.push(Entry::exact(
        "second identity at p.j (hypotheses violated) fails",
        hyp_fail && broken > 0,
        format!("hypotheses violated: {hyp_fail}; identity broken on {broken}/{trials} cochains"),
    ));
    Ok(s)
}
