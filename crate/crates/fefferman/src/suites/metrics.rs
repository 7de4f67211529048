use fefferman_core::conformal::{
    curvature_suite, flat_chart, max_abs_of, random_conformal_factor, random_polynomial_chart, round_sphere_chart,
    weyl_divergence_residual, PointGeometry,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::progress;
use crate::report::{finite_or_string, Entry, Report, Section};
use crate::{SuiteConfig, SuiteError, SuiteResult};

#[derive(Clone, Debug)]
pub struct MetricOptions {
    pub dim: usize,
    pub count: usize,
    pub degree: usize,
    pub amplitude: f64,
}

impl Default for MetricOptions {
    fn default() -> Self {
        MetricOptions { dim: 4, count: 10, degree: 4, amplitude: 0.3 }
    }
}

const FACTOR_AMPLITUDE: f64 = 0.4;

struct MetricResult {
    seed: u64,
    divergence: f64,
    fitted: Option<f64>,
    weyl_trace: f64,
    schouten: f64,
    covariance: f64,
}

pub fn run(cfg: &SuiteConfig, opts: &MetricOptions) -> SuiteResult<Report> {
    let m = opts.dim;
    if m < 3 {
        return Err(SuiteError(format!("random-metrics needs dim >= 3, got {m}")));
    }
    if opts.count == 0 || cfg.samples == 0 {
        return Err(SuiteError("random-metrics needs at least one metric and one point".into()));
    }
    let mut report = Report::new(cfg);
    report
        .param("dim", json!(m))
        .param("count", json!(opts.count))
        .param("degree", json!(opts.degree))
        .param("amplitude", json!(opts.amplitude));
    progress(format_args!("{} random metrics in dimension {m}", opts.count));

    let results: Vec<MetricResult> = (0..opts.count as u64)
        .into_par_iter()
        .map(|i| -> SuiteResult<MetricResult> {
            let seed = cfg.seed.wrapping_add(i);
            let chart = random_polynomial_chart(m, 0, opts.degree, opts.amplitude, seed);
            let pts = chart.sample_points(seed, cfg.samples)?;
            let div = weyl_divergence_residual(&chart, &pts)?;
            let phi = random_conformal_factor(m, FACTOR_AMPLITUDE, seed);
            let resc = chart.rescaled(&phi);
            let (mut weyl_trace, mut schouten, mut covariance) = (0.0f64, 0.0f64, 0.0f64);
            for p in &pts {
                let g = PointGeometry::new(&chart, p)?;
                weyl_trace = weyl_trace.max(g.weyl_trace());
                schouten = schouten.max(g.schouten_residual());
                let w2 = PointGeometry::new(&resc, p)?.weyl();
                let e2 = (2.0 * phi.at(p)?).exp();
                for (a, b) in g.weyl().iter().zip(&w2) {
                    covariance = covariance.max((e2 * a - b).abs());
                }
            }
            Ok(MetricResult { seed, divergence: div.residual, fitted: div.fitted_constant, weyl_trace, schouten, covariance })
        })
        .collect::<Result<_, _>>()?;
    let worst = |f: fn(&MetricResult) -> f64| results.iter().map(f).fold(0.0, f64::max);
    let expected = 3.0 - m as f64;
    let fit_dev = results.iter().map(|r| r.fitted.map_or(f64::INFINITY, |c| (c - expected).abs())).fold(0.0, f64::max);

    let mut s = Section::new(format!("random degree-{} metrics, dim {m}", opts.degree));
    s.push(Entry::below(format!("divergence of Weyl = ({expected}) Cotton"), worst(|r| r.divergence), cfg.tol("divergence")));
    s.push(Entry::below("fitted constant against 3 - m", fit_dev, cfg.tol("divergence")).info());
    s.push(Entry::below("Weyl trace-free", worst(|r| r.weyl_trace), cfg.tol("weyl_trace")));
    s.push(Entry::below("Weyl conformally covariant", worst(|r| r.covariance), cfg.tol("covariance")));
    s.push(Entry::below("Schouten back-substitution", worst(|r| r.schouten), cfg.tol("schouten")));
    s.data(
        "metrics",
        Value::Array(
            results
                .iter()
                .map(|r| {
                    json!({"seed": r.seed, "divergence": r.divergence,
                           "fitted": r.fitted.map_or(Value::Null, finite_or_string),
                           "weyl_trace": r.weyl_trace, "covariance": r.covariance, "schouten": r.schouten})
                })
                .collect(),
        ),
    );
    report.sections.push(s);

    let mut refs = Section::new("reference metrics");
    let sphere = round_sphere_chart(m);
    let mut dev = 0.0f64;
    for p in sphere.sample_points(cfg.seed, cfg.samples)? {
        let g = PointGeometry::new(&sphere, &p)?;
        for (a, b) in g.schouten().iter().zip(g.metric()) {
            dev = dev.max((a + 0.5 * b).abs());
        }
    }
    refs.push(Entry::below("unit sphere Schouten = -g/2", dev, cfg.tol("sphere")));
    let flat = flat_chart(m, 0, 1.0);
    let mut worst_flat = 0.0f64;
    let fpts = flat.sample_points(cfg.seed, cfg.samples)?;
    for p in &fpts {
        let c = curvature_suite(&flat, p)?;
        for v in [&c.christoffel, &c.riemann, &c.ricci, &c.schouten, &c.weyl, &c.cotton] {
            worst_flat = worst_flat.max(max_abs_of(v));
        }
        worst_flat = worst_flat.max(c.scalar.abs());
    }
    let fd = weyl_divergence_residual(&flat, &fpts)?;
    worst_flat = worst_flat.max(fd.divergence_norm).max(fd.cotton_norm);
    refs.push(Entry::below("flat metric curvature", worst_flat, cfg.tol("flat")));
    report.sections.push(refs);
    Ok(report)
}
