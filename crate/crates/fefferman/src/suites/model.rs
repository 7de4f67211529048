use fefferman_core::conformal::{
    beta_normalized, felipe_conditions, max_abs_of, random_conformal_factor, second_derivative_residual,
    sparling_invariants, tractor_derivative, tractor_split, trace_contraction_check, MetricChart, PointGeometry,
    SparlingPoint, SparlingReport, VectorFieldOnChart,
};
use fefferman_core::models::{
    fefferman_metric, heisenberg_qc, quadric_model, sigma_on_fields, sp1_fundamental_fields, QuadricModel,
    SigmaConvention,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::progress;
use crate::report::{finite_or_string, Entry, Report, Section};
use crate::{SuiteConfig, SuiteError, SuiteResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelMetric {
    Quadric,
    Heisenberg,
}

impl std::str::FromStr for ModelMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quadric" => Ok(ModelMetric::Quadric),
            "heisenberg" => Ok(ModelMetric::Heisenberg),
            o => Err(format!("unknown model metric '{o}' (expected quadric or heisenberg)")),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ModelOptions {
    /// None runs both models.
    pub metric: Option<ModelMetric>,
    pub rescale_seed: Option<u64>,
}

const RESCALE_AMPLITUDE: f64 = 0.3;

pub fn run(cfg: &SuiteConfig, opts: &ModelOptions) -> SuiteResult<Report> {
    if cfg.n == 0 {
        return Err(SuiteError("model needs n >= 1".into()));
    }
    if cfg.samples == 0 {
        return Err(SuiteError("model needs at least one sample point".into()));
    }
    let mut report = Report::new(cfg);
    report.param("metric", json!(opts.metric.map(|m| format!("{m:?}").to_lowercase())));
    report.param("rescale_seed", json!(opts.rescale_seed));
    if opts.metric != Some(ModelMetric::Heisenberg) {
        let model = quadric_model(cfg.n);
        let pts = model.chart.sample_points(cfg.seed, cfg.samples)?;
        progress(format_args!("quadric: {} points on {}", pts.len(), model.chart.label));
        report.sections.push(quadric(cfg, &model, &pts)?);
        if let Some(seed) = opts.rescale_seed {
            progress(format_args!("quadric: conformal rescaling, seed {seed}"));
            report.sections.push(rescaling(cfg, &model, &pts, seed)?);
        }
    }
    if opts.metric != Some(ModelMetric::Quadric) {
        progress(format_args!("heisenberg fefferman metric"));
        report.sections.extend(heisenberg(cfg)?);
    }
    Ok(report)
}

#[derive(Default)]
struct PointQuadric {
    null: f64,
    orthogonal: f64,
    killing: f64,
    k_weyl: f64,
    k_cotton: f64,
    trace_contraction: f64,
    tractor: f64,
    second_derivative: f64,
    skew: f64,
    felipe: f64,
    weyl: f64,
}

fn quadric_point(cfg: &SuiteConfig, chart: &MetricChart, ks: &[VectorFieldOnChart], p: &[f64]) -> SuiteResult<PointQuadric> {
    let geom = PointGeometry::new(chart, p)?;
    let v: Vec<Vec<f64>> = ks.iter().map(|k| k.at(p)).collect::<Result<_, _>>()?;
    let mut r = PointQuadric {
        null: geom.inner(&v[0], &v[0]).abs().max(geom.inner(&v[1], &v[1]).abs()),
        orthogonal: geom.inner(&v[0], &v[1]).abs(),
        weyl: max_abs_of(&geom.weyl()),
        ..Default::default()
    };
    for k in ks {
        let (res, lambda) = geom.conformal_killing(k)?;
        r.killing = r.killing.max(max_abs_of(&res)).max(lambda.abs());
        let s = tractor_split(&geom, k, cfg.tol("killing"))?;
        let tc = trace_contraction_check(&geom, &s, cfg.tol("killing"))?;
        r.k_weyl = r.k_weyl.max(tc.k_weyl);
        r.k_cotton = r.k_cotton.max(tc.k_cotton);
        r.trace_contraction = r.trace_contraction.max(tc.weyl.max(tc.cotton));
        r.skew = r.skew.max(s.skew_residual(&geom));
        for e in &geom.frame.vectors {
            r.tractor = r.tractor.max(tractor_derivative(&geom, &s, e).max_abs());
        }
        r.second_derivative = r.second_derivative.max(second_derivative_residual(&geom, k)?);
        let sn = beta_normalized(&s, s.beta(&geom))?;
        r.felipe = r.felipe.max(felipe_conditions(&geom, &sn).max_residual());
    }
    Ok(r)
}

fn sparling_at(cfg: &SuiteConfig, chart: &MetricChart, model: &QuadricModel, pts: &[Vec<f64>]) -> SuiteResult<SparlingReport> {
    let tol = cfg.tol("killing");
    let per: Vec<SparlingPoint> = pts
        .par_iter()
        .map(|p| -> SuiteResult<SparlingPoint> {
            let r = sparling_invariants(chart, &model.k[0], &model.k[1], std::slice::from_ref(p), tol)?;
            r.points.into_iter().next().ok_or_else(|| SuiteError("empty Sparling report".into()))
        })
        .collect::<Result<_, _>>()?;
    Ok(SparlingReport::from_points(per))
}

fn quadric(cfg: &SuiteConfig, model: &QuadricModel, pts: &[Vec<f64>]) -> SuiteResult<Section> {
    let chart = &model.chart;
    let ks = &model.k[..2];
    let per: Vec<PointQuadric> = pts.par_iter().map(|p| quadric_point(cfg, chart, ks, p)).collect::<Result<_, _>>()?;
    let worst = |f: fn(&PointQuadric) -> f64| per.iter().map(f).fold(0.0, f64::max);
    let sp = sparling_at(cfg, chart, model, pts)?;
    let model_k3: Vec<Vec<f64>> = pts.iter().map(|p| model.k[2].at(p)).collect::<Result<_, _>>()?;
    let (scale, k3_dev) = sp.k3_against(&model_k3);

    let mut s = Section::new(format!("quadric model, n = {}", model.n));
    s.push(Entry::below("k1, k2 light-like", worst(|r| r.null), cfg.tol("null")));
    s.push(Entry::below("k1, k2 orthogonal", worst(|r| r.orthogonal), cfg.tol("null")));
    s.push(Entry::below("k1, k2 Killing", worst(|r| r.killing), cfg.tol("killing")));
    s.push(Entry::below("k_i contracted into Weyl", worst(|r| r.k_weyl), cfg.tol("contraction")));
    s.push(Entry::below("k_i contracted into Cotton", worst(|r| r.k_cotton), cfg.tol("contraction")));
    s.push(Entry::below("trace of nabla k against Weyl and Cotton", worst(|r| r.trace_contraction), cfg.tol("contraction")));
    s.push(Entry::below("chi", sp.chi.max_abs(), cfg.tol("chi")));
    for i in 0..3 {
        s.push(
            Entry::exact(
                format!("beta_{} negative", i + 1),
                sp.beta[i].max < 0.0,
                format!("range [{:.12}, {:.12}]", sp.beta[i].min, sp.beta[i].max),
            ),
        );
        s.push(Entry::below(format!("beta_{} constant (stddev)", i + 1), sp.beta[i].stddev, cfg.tol("beta_spread")));
    }
    s.push(Entry::below("beta_1 beta_2 + beta_3", sp.product_residual, cfg.tol("beta_product")));
    s.push(
        Entry::below("k3 proportional to the third rotation field", k3_dev, cfg.tol("k3"))
            .detail(format!("global scale {scale:.12}")),
    );
    s.push(Entry::below("adjoint tractor derivative rows", worst(|r| r.tractor), cfg.tol("tractor")));
    s.push(Entry::below("second covariant derivative of k", worst(|r| r.second_derivative), cfg.tol("tractor")));
    s.push(Entry::below("K skew", worst(|r| r.skew), cfg.tol("tractor")));
    s.push(Entry::below("Felipe conditions after beta-normalization", worst(|r| r.felipe), cfg.tol("felipe")));
    s.push(Entry::below("Weyl tensor", worst(|r| r.weyl), cfg.tol("weyl_model")));
    s.push(Entry::below("alpha_3 against div k3", sp.lambda3_mismatch, cfg.tol("tractor")).info());
    s.data("points", json!(pts.len()));
    s.data("k3_scale", finite_or_string(scale));
    s.data(
        "beta",
        Value::Array(
            sp.beta
                .iter()
                .enumerate()
                .map(|(i, b)| json!({"i": i + 1, "mean": b.mean, "stddev": b.stddev, "min": b.min, "max": b.max}))
                .collect(),
        ),
    );
    Ok(s)
}

fn rescaling(cfg: &SuiteConfig, model: &QuadricModel, pts: &[Vec<f64>], seed: u64) -> SuiteResult<Section> {
    let phi = random_conformal_factor(model.chart.dim, RESCALE_AMPLITUDE, seed);
    let resc = model.chart.rescaled(&phi);
    let a = sparling_at(cfg, &model.chart, model, pts)?;
    let b = sparling_at(cfg, &resc, model, pts)?;
    let mut dchi = 0.0f64;
    let mut dbeta = 0.0f64;
    for (x, y) in a.points.iter().zip(&b.points) {
        dchi = dchi.max((x.chi - y.chi).abs());
        for i in 0..3 {
            dbeta = dbeta.max((x.beta[i] - y.beta[i]).abs());
        }
    }
    let mut s = Section::new(format!("conformal rescaling, seed {seed}"));
    s.push(Entry::below("chi unchanged", dchi, cfg.tol("rescale")).detail(phi.label.clone()));
    s.push(Entry::below("beta unchanged", dbeta, cfg.tol("rescale")));
    s.push(Entry::below("chi after rescaling", b.chi.max_abs(), cfg.tol("chi")));
    Ok(s)
}

struct FeffermanPoint {
    signature: (usize, usize),
    weyl: f64,
    null: f64,
    killing: f64,
    sigma_left: f64,
    sigma_right: f64,
    qc: f64,
}

fn heisenberg(cfg: &SuiteConfig) -> SuiteResult<Vec<Section>> {
    let n = cfg.n;
    let qc = heisenberg_qc(n);
    let expected = (4 * n + 3, 3);
    let mut sections = Vec::new();
    let mut verdicts = Vec::new();
    for conv in [SigmaConvention::MaurerCartan, SigmaConvention::AdjointRotated] {
        let fd = fefferman_metric(&qc, conv, qc.scal);
        let ks = sp1_fundamental_fields(&fd);
        let pts = fd.chart.sample_points(cfg.seed, cfg.samples)?;
        let per: Vec<FeffermanPoint> = pts
            .par_iter()
            .map(|p| -> SuiteResult<FeffermanPoint> {
                let geom = PointGeometry::new(&fd.chart, p)?;
                let (mut null, mut killing) = (0.0f64, 0.0f64);
                for k in &ks {
                    let v = k.at(p)?;
                    null = null.max(geom.inner(&v, &v).abs());
                    let (res, lambda) = geom.conformal_killing(k)?;
                    killing = killing.max(max_abs_of(&res)).max(lambda.abs());
                }
                let (left, right) = sigma_on_fields(&fd, p)?;
                let delta = |m: [[f64; 3]; 3]| {
                    let mut w = 0.0f64;
                    for (s, row) in m.iter().enumerate() {
                        for (r, x) in row.iter().enumerate() {
                            w = w.max((x - if r == s { 1.0 } else { 0.0 }).abs());
                        }
                    }
                    w
                };
                Ok(FeffermanPoint {
                    signature: fd.chart.signature_at(p)?,
                    weyl: max_abs_of(&geom.weyl()),
                    null,
                    killing,
                    sigma_left: delta(left),
                    sigma_right: delta(right),
                    qc: qc.check_invariants(&p[..qc.dim])?.max_residual(),
                })
            })
            .collect::<Result<_, _>>()?;
        let worst = |f: fn(&FeffermanPoint) -> f64| per.iter().map(f).fold(0.0, f64::max);
        let bad_sig: Vec<(usize, usize)> = per.iter().map(|r| r.signature).filter(|s| *s != expected).collect();
        let mut s = Section::new(format!("Heisenberg Fefferman metric, n = {n}, sigma {}", conv.name()));
        let entries = vec![
            Entry::exact(
                format!("signature {expected:?} at all points"),
                bad_sig.is_empty(),
                format!("{} of {} points differ {:?}", bad_sig.len(), per.len(), bad_sig.first()),
            ),
            Entry::below("Weyl tensor", worst(|r| r.weyl), cfg.tol("weyl_fefferman")),
            Entry::below("vertical fields light-like", worst(|r| r.null), cfg.tol("vertical")),
            Entry::below("vertical fields Killing", worst(|r| r.killing), cfg.tol("vertical")),
        ];
        let ok = entries.iter().all(|e| e.pass);
        verdicts.push((conv, ok));
        s.extend(entries.into_iter().map(Entry::info));
        s.push(Entry::below("qc structure of the base", worst(|r| r.qc), cfg.tol("qc_structure")));
        s.push(Entry::below("Maurer-Cartan sigma on vertical fields = delta", worst(|r| r.sigma_left), cfg.tol("vertical")).info());
        s.push(Entry::below("right-invariant sigma on vertical fields = delta", worst(|r| r.sigma_right), cfg.tol("vertical")).info());
        s.data("scal", json!(fd.scal));
        sections.push(s);
    }
    let primary = verdicts[0].1;
    let fallback = verdicts[1].1;
    let adopted = if primary {
        "maurer-cartan"
    } else if fallback {
        "adjoint-rotated (fallback)"
    } else {
        "none"
    };
    let mut v = Section::new("sigma convention");
    v.push(Entry::exact(
        "Fefferman metric conformally flat with light-like Killing vertical fields",
        primary || fallback,
        format!("primary {}, fallback {}", pass_word(primary), pass_word(fallback)),
    ));
    v.data("adopted", json!(adopted));
    sections.push(v);
    Ok(sections)
}

fn pass_word(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "fail"
    }
}
