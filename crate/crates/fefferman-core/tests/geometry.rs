use fefferman_core::conformal::{
    beta_normalized, felipe_conditions, invert, max_abs_of, random_conformal_factor, random_linear_map,
    random_polynomial_chart, round_sphere_chart, sparling_invariants, tractor_split, weyl_divergence_residual,
    MetricChart, PointGeometry,
};
use fefferman_core::models::{
    fefferman_metric, heisenberg_qc, quadric_model, sp1_fundamental_fields, weyl_size, SigmaConvention,
};

const KILLING_TOL: f64 = 1e-9;

fn mat_vec(a: &[f64], v: &[f64]) -> Vec<f64> {
    let m = v.len();
    (0..m).map(|i| (0..m).map(|j| a[i * m + j] * v[j]).sum()).collect()
}

fn weyl_covariance(chart: &MetricChart, seed: u64) -> f64 {
    let phi = random_conformal_factor(chart.dim, 0.4, seed);
    let resc = chart.rescaled(&phi);
    let mut worst = 0.0f64;
    for p in chart.sample_points(seed, 3).unwrap() {
        let w = PointGeometry::new(chart, &p).unwrap().weyl();
        let w2 = PointGeometry::new(&resc, &p).unwrap().weyl();
        let e2 = (2.0 * phi.at(&p).unwrap()).exp();
        worst = worst.max(w.iter().zip(&w2).map(|(a, b)| (e2 * a - b).abs()).fold(0.0, f64::max));
    }
    worst
}

#[test]
fn weyl_is_conformally_covariant_in_dims_4_and_6() {
    for (p, q) in [(4, 0), (3, 1), (6, 0), (4, 2)] {
        for seed in 0..2 {
            let chart = random_polynomial_chart(p, q, 4, 0.3, seed);
            let dev = weyl_covariance(&chart, seed + 11);
            assert!(dev < 1e-7, "signature ({p},{q}) seed {seed}: {dev}");
        }
    }
}

#[test]
fn weyl_divergence_constant_is_three_minus_dimension() {
    for m in [4usize, 5, 6] {
        let chart = random_polynomial_chart(m, 0, 4, 0.3, m as u64);
        let pts = chart.sample_points(1, 3).unwrap();
        let r = weyl_divergence_residual(&chart, &pts).unwrap();
        assert!(r.residual < 1e-6, "m = {m}: {}", r.residual);
        let c = r.fitted_constant.expect("Cotton is nonzero on a random metric");
        assert!((c - (3.0 - m as f64)).abs() < 1e-6, "m = {m}: fitted {c}");
    }
}

#[test]
fn unit_sphere_schouten_is_minus_half_the_metric() {
    for m in [3usize, 4, 7] {
        let s = round_sphere_chart(m);
        for p in s.sample_points(2, 4).unwrap() {
            let g = PointGeometry::new(&s, &p).unwrap();
            let dev = g.schouten().iter().zip(g.metric()).map(|(a, b)| (a + 0.5 * b).abs()).fold(0.0, f64::max);
            assert!(dev < 1e-9, "S^{m}: {dev}");
            assert!(max_abs_of(&g.weyl()) < 1e-9);
        }
    }
}

#[test]
fn curvature_scalars_do_not_depend_on_the_chart() {
    let chart = random_polynomial_chart(3, 1, 3, 0.3, 21);
    let a = random_linear_map(4, 5);
    let ainv = invert(&a, 4).unwrap();
    let pulled = chart.linear_pullback(&a);
    for p in chart.sample_points(4, 3).unwrap() {
        let y = mat_vec(&ainv, &p);
        let g1 = PointGeometry::new(&chart, &p).unwrap();
        let g2 = PointGeometry::new(&pulled, &y).unwrap();
        assert!((g1.scalar() - g2.scalar()).abs() < 1e-9 * (1.0 + g1.scalar().abs()));
        let wnorm = |g: &PointGeometry| {
            let m = g.m;
            let w = g.riemann_lowered();
            let h = g.metric_inverse();
            let mut s = 0.0;
            for i in 0..m.pow(4) {
                let ix = [i / m.pow(3), (i / m.pow(2)) % m, (i / m) % m, i % m];
                for j in 0..m.pow(4) {
                    let jx = [j / m.pow(3), (j / m.pow(2)) % m, (j / m) % m, j % m];
                    s += (0..4).map(|k| h[ix[k] * m + jx[k]]).product::<f64>() * w[i] * w[j];
                }
            }
            s
        };
        assert!((wnorm(&g1) - wnorm(&g2)).abs() < 1e-8 * (1.0 + wnorm(&g1).abs()));
    }
}

#[test]
fn quadric_rotation_fields() {
    let model = quadric_model(1);
    let pts = model.chart.sample_points(5, 4).unwrap();
    for p in &pts {
        let g = PointGeometry::new(&model.chart, p).unwrap();
        assert_eq!(model.chart.signature_at(p).unwrap(), (7, 3));
        assert!(max_abs_of(&g.weyl()) < 1e-8);
        let v: Vec<Vec<f64>> = model.k.iter().map(|k| k.at(p).unwrap()).collect();
        for i in 0..3 {
            assert!(g.inner(&v[i], &v[i]).abs() < 1e-10);
            for j in 0..i {
                assert!(g.inner(&v[i], &v[j]).abs() < 1e-10);
            }
            let (res, lambda) = g.conformal_killing(&model.k[i]).unwrap();
            assert!(max_abs_of(&res) < KILLING_TOL && lambda.abs() < KILLING_TOL);
        }
    }
}

/// On unit spheres β₁ = β₂ = −1 and k₃ is the third rotation field itself.
#[test]
fn quadric_sparling_invariants() {
    let model = quadric_model(1);
    let pts = model.chart.sample_points(6, 5).unwrap();
    let r = sparling_invariants(&model.chart, &model.k[0], &model.k[1], &pts, KILLING_TOL).unwrap();
    assert!(r.chi.max_abs() < 1e-9);
    for b in &r.beta {
        assert!((b.mean + 1.0).abs() < 1e-9 && b.stddev < 1e-7, "{b:?}");
    }
    assert!(r.product_residual < 1e-8);
    let model_k3: Vec<Vec<f64>> = pts.iter().map(|p| model.k[2].at(p).unwrap()).collect();
    let (scale, dev) = r.k3_against(&model_k3);
    assert!((scale - 1.0).abs() < 1e-9 && dev < 1e-8, "{scale} {dev}");
}

#[test]
fn sparling_invariants_survive_rescaling() {
    let model = quadric_model(1);
    let pts = model.chart.sample_points(7, 3).unwrap();
    let phi = random_conformal_factor(model.chart.dim, 0.3, 7);
    let resc = model.chart.rescaled(&phi);
    let a = sparling_invariants(&model.chart, &model.k[0], &model.k[1], &pts, KILLING_TOL).unwrap();
    let b = sparling_invariants(&resc, &model.k[0], &model.k[1], &pts, KILLING_TOL).unwrap();
    for (x, y) in a.points.iter().zip(&b.points) {
        assert!((x.chi - y.chi).abs() < 1e-7);
        for i in 0..3 {
            assert!((x.beta[i] - y.beta[i]).abs() < 1e-7, "{} {}", x.beta[i], y.beta[i]);
        }
    }
}

#[test]
fn felipe_conditions_and_their_scaling_control() {
    let model = quadric_model(1);
    for p in model.chart.sample_points(8, 3).unwrap() {
        let g = PointGeometry::new(&model.chart, &p).unwrap();
        let s = tractor_split(&g, &model.k[0], KILLING_TOL).unwrap();
        let sn = beta_normalized(&s, s.beta(&g)).unwrap();
        let ok = felipe_conditions(&g, &sn);
        assert!(ok.max_residual() < 1e-8, "{ok:?}");
        // doubling s quadruples γ(k) + α²
        let bad = felipe_conditions(&g, &sn.scaled(2.0));
        assert!((bad.normalization + 4.0).abs() < 1e-8, "{}", bad.normalization);
        assert!(bad.max_residual() > 1.0);
    }
}

#[test]
fn heisenberg_qc_structure() {
    for n in [1, 2] {
        let qc = heisenberg_qc(n);
        let chart = fefferman_metric(&qc, SigmaConvention::AdjointRotated, qc.scal).chart;
        for p in chart.sample_points(9, 4).unwrap() {
            let r = qc.check_invariants(&p[..qc.dim]).unwrap();
            assert!(r.max_residual() < 1e-10, "n = {n}: {r:?}");
        }
    }
}

#[test]
fn heisenberg_fefferman_metric() {
    let qc = heisenberg_qc(1);
    let fd = fefferman_metric(&qc, SigmaConvention::AdjointRotated, qc.scal);
    let pts = fd.chart.sample_points(10, 5).unwrap();
    assert!(weyl_size(&fd.chart, &pts).unwrap() < 1e-6);
    let ks = sp1_fundamental_fields(&fd);
    for p in &pts {
        assert_eq!(fd.chart.signature_at(p).unwrap(), (7, 3));
        let g = PointGeometry::new(&fd.chart, p).unwrap();
        for k in &ks {
            let v = k.at(p).unwrap();
            assert!(g.inner(&v, &v).abs() < 1e-8);
            let (res, lambda) = g.conformal_killing(k).unwrap();
            assert!(max_abs_of(&res).max(lambda.abs()) < 1e-8);
        }
    }
    let primary = fefferman_metric(&qc, SigmaConvention::MaurerCartan, qc.scal);
    assert!(weyl_size(&primary.chart, &pts).unwrap() > 1.0);
}
