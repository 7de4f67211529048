use fefferman_core::cohomology::KostantComplex;
use fefferman_core::inclusions::Tower;
use fefferman_core::jet::{jet_eval, Jet, JetError};
use fefferman_core::lie::{build_co, build_cr, build_qc, qc_tower, GradedLieAlgebra};
use fefferman_core::linalg::{kernel_basis, rank};
use fefferman_core::matrix::{realify_c, realify_h, Matrix};
use fefferman_core::scalar::{q, Complex, Quaternion, Scalar, Q};
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

fn quat() -> impl Strategy<Value = Quaternion> {
    (-5i64..=5, -5i64..=5, -5i64..=5, -5i64..=5).prop_map(|(a, b, c, d)| Quaternion::from_ints(a, b, c, d))
}

fn qmat(n: usize) -> impl Strategy<Value = Matrix<Quaternion>> {
    prop::collection::vec(quat(), n * n).prop_map(move |v| Matrix::from_fn(n, n, |r, c| v[r * n + c].clone()))
}

fn rmat(rows: usize, cols: usize) -> impl Strategy<Value = Matrix<Q>> {
    prop::collection::vec(-3i64..=3, rows * cols).prop_map(move |v| Matrix::from_fn(rows, cols, |r, c| q(v[r * cols + c])))
}

fn qc1() -> &'static GradedLieAlgebra {
    static G: OnceLock<GradedLieAlgebra> = OnceLock::new();
    G.get_or_init(|| build_qc(1).unwrap())
}

fn tower1() -> &'static [GradedLieAlgebra; 3] {
    static T: OnceLock<[GradedLieAlgebra; 3]> = OnceLock::new();
    T.get_or_init(|| qc_tower(1).unwrap())
}

fn element(g: &GradedLieAlgebra, coeffs: &[i64]) -> Vec<Q> {
    (0..g.dim()).map(|i| q(coeffs[i % coeffs.len()] * ((i as i64 % 3) - 1))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quaternion_norm_is_multiplicative(a in quat(), b in quat()) {
        prop_assert_eq!(a.mul(&b).norm2(), a.norm2() * b.norm2());
    }

    #[test]
    fn quaternion_conjugation_reverses_products(a in quat(), b in quat()) {
        prop_assert_eq!(a.mul(&b).conj(), b.conj().mul(&a.conj()));
        prop_assert_eq!(a.mul(&a.conj()), Quaternion::new(a.norm2(), q(0), q(0), q(0)));
    }

    #[test]
    fn quaternion_matrices_associate(a in qmat(3), b in qmat(3), c in qmat(3)) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn real_trace_is_cyclic(a in rmat(4, 4), b in rmat(4, 4)) {
        prop_assert_eq!(a.mul(&b).trace(), b.mul(&a).trace());
    }

    #[test]
    fn realification_is_a_homomorphism(a in qmat(2), b in qmat(2)) {
        let r = |m: &Matrix<Quaternion>| realify_c(&realify_h(m));
        prop_assert_eq!(r(&a.mul(&b)), r(&a).mul(&r(&b)));
        prop_assert_eq!(r(&a.add(&b)), r(&a).add(&r(&b)));
        prop_assert_eq!(realify_h(&a.adjoint()), realify_h(&a).adjoint());
    }

    #[test]
    fn complex_realification_is_a_homomorphism(v in prop::collection::vec(-4i64..=4, 16)) {
        let z = |k: usize| Complex::new(q(v[k]), q(v[k + 8]));
        let a = Matrix::from_fn(2, 2, |r, c| z(2 * r + c));
        let b = Matrix::from_fn(2, 2, |r, c| z(4 + 2 * r + c));
        prop_assert_eq!(realify_c(&a.mul(&b)), realify_c(&a).mul(&realify_c(&b)));
    }

    #[test]
    fn kernel_basis_is_a_kernel_of_the_right_size(m in rmat(4, 6)) {
        let ker = kernel_basis(&m);
        prop_assert_eq!(ker.len() + rank(&m), 6);
        for v in &ker {
            let col = Matrix::from_fn(6, 1, |r, _| v[r].clone());
            prop_assert!(m.mul(&col).is_zero());
        }
        let k = Matrix::from_fn(6, ker.len(), |r, c| ker[c][r].clone());
        prop_assert_eq!(rank(&k), ker.len());
    }

    #[test]
    fn jacobi_identity_holds(a in prop::collection::vec(-3i64..=3, 5), b in prop::collection::vec(-3i64..=3, 6),
                             c in prop::collection::vec(-3i64..=3, 7)) {
        let g = qc1();
        let (x, y, z) = (element(g, &a), element(g, &b), element(g, &c));
        let t1 = g.bracket(&x, &g.bracket(&y, &z));
        let t2 = g.bracket(&y, &g.bracket(&z, &x));
        let t3 = g.bracket(&z, &g.bracket(&x, &y));
        prop_assert!(t1.iter().zip(&t2).zip(&t3).all(|((u, v), w)| (u + v + w).is_zero()));
    }

    #[test]
    fn brackets_add_degrees(i in 0usize..21, j in 0usize..21) {
        let g = qc1();
        for (k, _) in g.structure_constants(i, j) {
            prop_assert_eq!(g.degree(*k), g.degree(i) + g.degree(j));
        }
    }

    #[test]
    fn killing_form_pairs_opposite_degrees(i in 0usize..21, j in 0usize..21) {
        let g = qc1();
        if g.degree(i) + g.degree(j) != 0 {
            prop_assert!(g.killing_gram()[i][j].is_zero());
        }
        prop_assert_eq!(&g.killing_gram()[i][j], &g.killing_gram()[j][i]);
    }

    #[test]
    fn inclusions_are_homomorphisms(a in prop::collection::vec(-3i64..=3, 4), b in prop::collection::vec(-3i64..=3, 5)) {
        let algs = tower1();
        let tower = Tower::new(algs).unwrap();
        for phi in [&tower.qc_cr, &tower.cr_co, &tower.qc_co] {
            let s = phi.source();
            let (x, y) = (element(s, &a), element(s, &b));
            prop_assert_eq!(phi.apply(&s.bracket(&x, &y)), phi.target().bracket(&phi.apply(&x), &phi.apply(&y)));
        }
        let x = element(&algs[0], &a);
        prop_assert_eq!(tower.cr_co.apply(&tower.qc_cr.apply(&x)), tower.qc_co.apply(&x));
        prop_assert_eq!(tower.qc_cr.preimage(&tower.qc_cr.apply(&x)), Some(x));
    }
}

fn smooth(x: &[Jet]) -> Result<Jet, JetError> {
    let a = x[0].mul_jet(&x[1]).sin();
    let b = x[2].scale(0.7).add_const(0.2).exp();
    let c = x[0].mul_jet(&x[0]).add_const(1.5).sqrt()?;
    Ok(&(&a * &b) + &c.recip()?.mul_jet(&x[1]))
}

fn value(p: &[f64]) -> f64 {
    jet_eval(smooth, p, 0).unwrap().value()
}

fn shifted(p: &[f64], i: usize, h: f64) -> Vec<f64> {
    let mut v = p.to_vec();
    v[i] += h;
    v
}

/// Fourth-order central difference of ∂_i f.
fn fd1(f: &dyn Fn(&[f64]) -> f64, p: &[f64], i: usize, h: f64) -> f64 {
    let at = |k: f64| f(&shifted(p, i, k * h));
    (-at(2.0) + 8.0 * at(1.0) - 8.0 * at(-1.0) + at(-2.0)) / (12.0 * h)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jet_derivatives_match_finite_differences(p in prop::collection::vec(-0.8f64..0.8, 3)) {
        let jet = jet_eval(smooth, &p, 3).unwrap();
        let h = 1e-2;
        for i in 0..3 {
            let mut a = [0u8; 3];
            a[i] = 1;
            prop_assert!(close(jet.partial(&a), fd1(&value, &p, i, h)));
            for j in 0..3 {
                let mut ab = a;
                ab[j] += 1;
                let dj = |x: &[f64]| {
                    let mut e = [0u8; 3];
                    e[j] = 1;
                    jet_eval(smooth, x, 1).unwrap().partial(&e)
                };
                prop_assert!(close(jet.partial(&ab), fd1(&dj, &p, i, h)));
            }
        }
    }

    #[test]
    fn jet_product_rule(p in prop::collection::vec(-1.0f64..1.0, 2)) {
        let f = |x: &[Jet]| Ok::<_, JetError>(x[0].sin().mul_jet(&x[1].add_const(2.0)));
        let g = |x: &[Jet]| Ok::<_, JetError>(x[0].mul_jet(&x[1]).exp());
        let fg = jet_eval(|x| Ok(&f(x)? * &g(x)?), &p, 3).unwrap();
        let (jf, jg) = (jet_eval(f, &p, 3).unwrap(), jet_eval(g, &p, 3).unwrap());
        for var in 0..2 {
            let lhs = fg.deriv(var);
            let rhs = &(&jf.deriv(var) * &jg.truncate(2)) + &(&jf.truncate(2) * &jg.deriv(var));
            for (a, b) in lhs.coefficients().iter().zip(rhs.coefficients()) {
                prop_assert!(close(*a, *b));
            }
        }
    }

    #[test]
    fn jet_chain_rule(p in prop::collection::vec(-1.0f64..1.0, 2)) {
        let inner = |x: &[Jet]| Ok::<_, JetError>(&x[0].mul_jet(&x[0]) + &x[1].scale(0.5));
        let composed = jet_eval(|x| Ok(inner(x)?.sin()), &p, 3).unwrap();
        let u = jet_eval(inner, &p, 3).unwrap();
        let cosu = u.value().cos();
        for var in 0..2 {
            let mut e = [0u8; 2];
            e[var] = 1;
            prop_assert!(close(composed.partial(&e), cosu * u.partial(&e)));
            let fd = fd1(&|x: &[f64]| jet_eval(|y| Ok(inner(y)?.sin()), x, 0).unwrap().value(), &p, var, 1e-2);
            prop_assert!(close(composed.partial(&e), fd));
        }
    }
}

#[test]
fn qc_dimension_formula() {
    for n in 1..=3 {
        let g = build_qc(n).unwrap();
        assert_eq!(g.dim(), (n + 2) * (2 * n + 5));
        assert_eq!(g.indices_of_degree(-2).len(), 3);
        assert_eq!(g.indices_of_degree(-1).len(), 4 * n);
        assert_eq!(g.depth(), 2);
    }
    for (p, r) in [(3, 1), (2, 0), (5, 1)] {
        let big = p + r + 2;
        assert_eq!(build_cr(p, r).unwrap().dim(), big * big - 1);
        assert_eq!(build_co(p, r).unwrap().dim(), big * (big - 1) / 2);
    }
}

#[test]
fn dual_basis_is_dual_for_the_killing_form() {
    for g in tower1() {
        let minus = g.minus_indices();
        let cx = KostantComplex::new(g).unwrap();
        for a in 0..minus.len() {
            let d = cx.dual(a);
            assert!((0..g.dim()).all(|i| d[i].is_zero() || g.degree(i) == -g.degree(minus[a])), "{}", g.name());
            for (b, &j) in minus.iter().enumerate() {
                let want = if a == b { q(1) } else { q(0) };
                assert_eq!(g.killing(&g.basis_vector(j), cx.dual(a)), want, "{}", g.name());
            }
        }
    }
}

#[test]
fn differential_and_codifferential_square_to_zero() {
    for g in tower1() {
        let cx = KostantComplex::new(g).unwrap();
        assert!(cx.differential_matrix(1).mul(&cx.differential_matrix(0)).is_zero(), "{}", g.name());
        assert!(cx.differential_matrix(2).mul(&cx.differential_matrix(1)).is_zero(), "{}", g.name());
        assert!(cx.codifferential_matrix(1).mul(&cx.codifferential_matrix(2)).is_zero(), "{}", g.name());
        assert!(cx.codifferential_matrix(2).mul(&cx.codifferential_matrix(3)).is_zero(), "{}", g.name());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn laplacian_preserves_homogeneity(seed in any::<u64>(), l in 0i32..=6) {
        let cx = KostantComplex::new(qc1()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = cx.random_cochain(2, Some(l), 0.2, &mut rng);
        let box_phi = cx.differential(&cx.codifferential_wedge(&phi)).add(&cx.codifferential_wedge(&cx.differential(&phi)));
        for (h, part) in cx.homogeneous_parts(&box_phi) {
            prop_assert!(h == l || part.is_zero());
        }
    }

    #[test]
    fn codifferential_formulas_agree(seed in any::<u64>()) {
        let cx = KostantComplex::new(qc1()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = cx.random_cochain(2, None, 0.3, &mut rng);
        let (p1, p2) = cx.codifferential_minus(&phi);
        let half = fefferman_core::scalar::qr(1, 2);
        prop_assert_eq!(p1.sub(&p2.scale(&half)), cx.codifferential_wedge(&phi));
    }
}
