//! Frozen values, each reached by a second route that does not share code
//! with the library computation.

use std::collections::BTreeMap;

use fefferman_core::cohomology::KostantComplex;
use fefferman_core::inclusions::{CochainInducer, Tower};
use fefferman_core::lie::{build_qc, qc_tower, smat_mul, GradedLieAlgebra};
use fefferman_core::scalar::{q, qr, Q};
use fefferman_core::transfer::{inverse_normality, normality_transfer, TowerComplexes};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// dim H^k_l as (cocycles − coboundaries) in the homogeneity block l.
fn cohomology_by_cocycles(cx: &KostantComplex<'_>, k: usize) -> BTreeMap<i32, usize> {
    let dk = cx.differential_matrix(k);
    let dprev = (k > 0).then(|| cx.differential_matrix(k - 1));
    let mut out = BTreeMap::new();
    for l in cx.homogeneities(k) {
        let cols = cx.block(k, l);
        let rows = cx.block(k + 1, l);
        let cocycles = cols.len() - dk.restrict(&rows, &cols).expect("d preserves homogeneity").rank();
        let exact = dprev.as_ref().map_or(0, |d| d.restrict(&cols, &cx.block(k - 1, l)).unwrap().rank());
        out.insert(l, cocycles - exact);
    }
    out
}

fn harmonic_dims(cx: &KostantComplex<'_>, k: usize) -> BTreeMap<i32, usize> {
    cx.harmonic_report(k).blocks.iter().map(|b| (b.homogeneity, b.dim)).collect()
}

fn nonzero(m: &BTreeMap<i32, usize>) -> Vec<(i32, usize)> {
    m.iter().filter(|(_, &d)| d > 0).map(|(&l, &d)| (l, d)).collect()
}

#[test]
fn harmonic_dimensions_n1() {
    let g = build_qc(1).unwrap();
    let cx = KostantComplex::new(&g).unwrap();
    for k in [1, 2] {
        assert_eq!(harmonic_dims(&cx, k), cohomology_by_cocycles(&cx, k), "degree {k}");
    }
    assert_eq!(nonzero(&harmonic_dims(&cx, 1)), vec![(-1, 8)]);
    assert_eq!(nonzero(&harmonic_dims(&cx, 2)), vec![(1, 12), (2, 5)]);
}

#[test]
fn harmonic_dimensions_n2() {
    let g = build_qc(2).unwrap();
    let cx = KostantComplex::new(&g).unwrap();
    let h2 = harmonic_dims(&cx, 2);
    assert_eq!(h2, cohomology_by_cocycles(&cx, 2));
    assert_eq!(nonzero(&h2), vec![(0, 25), (2, 35)]);
    let h1 = harmonic_dims(&cx, 1);
    assert_eq!(h1, cohomology_by_cocycles(&cx, 1));
    assert!(h1.iter().all(|(&l, &d)| l < 0 || d == 0));
}

#[test]
fn hodge_totals_n1() {
    let g = build_qc(1).unwrap();
    let cx = KostantComplex::new(&g).unwrap();
    assert_eq!(cx.hodge_check(1).totals(), (147, 18, 8, 121));
    assert_eq!(cx.hodge_check(2).totals(), (441, 121, 17, 303));
    // ker d on C1 is im d plus the harmonics
    let c1 = cx.dim_cochains(1);
    assert_eq!(cx.differential_matrix(1).rank(), c1 - 18 - 8);
}

fn real_trace(g: &GradedLieAlgebra, x: &[Q], y: &[Q]) -> Q {
    let m = g.ambient();
    smat_mul(&g.matrix_of(x), &g.matrix_of(y), m).iter().filter(|(k, _)| k / m == k % m).map(|(_, v)| v.clone()).sum()
}

/// Killing form = κ · tr_R on the real ambient representation, with the
/// classical constants κ = m+1 for sp(m), N for su(N), N−2 for so(N).
#[test]
fn killing_form_is_a_trace_form() {
    for n in [1usize, 2] {
        let algs = qc_tower(n).unwrap();
        let kappa = [q(n as i64 + 3), q(2 * n as i64 + 4), q(4 * n as i64 + 6)];
        for (g, k) in algs.iter().zip(&kappa) {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for _ in 0..6 {
                let x: Vec<Q> = (0..g.dim()).map(|_| q(rand::Rng::gen_range(&mut rng, -2..=2))).collect();
                let y: Vec<Q> = (0..g.dim()).map(|_| q(rand::Rng::gen_range(&mut rng, -2..=2))).collect();
                assert_eq!(g.killing(&x, &y), k * real_trace(g, &x, &y), "{}", g.name());
            }
        }
    }
}

#[test]
fn killing_constants() {
    for n in [1i64, 2] {
        let algs = qc_tower(n as usize).unwrap();
        let tower = Tower::new(&algs).unwrap();
        let a = qr(n + 3, 2 * (n + 2));
        let b = qr(n + 2, 2 * n + 3);
        assert_eq!(tower.qc_cr.killing_constant().unwrap(), a);
        assert_eq!(tower.cr_co.killing_constant().unwrap(), b);
        assert_eq!(tower.qc_co.killing_constant().unwrap(), &a * &b);
    }
    let algs = qc_tower(1).unwrap();
    let tower = Tower::new(&algs).unwrap();
    assert_eq!(tower.qc_cr.killing_constant().unwrap(), qr(2, 3));
    assert_eq!(tower.cr_co.killing_constant().unwrap(), qr(3, 5));
}

/// B(E, E) = tr(ad E)² = Σ d²·dim g_d, and φ(E) pairs with Ẽ as Ẽ does.
fn grading_norm(g: &GradedLieAlgebra) -> i64 {
    (0..g.dim()).map(|i| (g.degree(i) * g.degree(i)) as i64).sum()
}

#[test]
fn scaling_constants() {
    for n in [1i64, 2] {
        let algs = qc_tower(n as usize).unwrap();
        let tower = Tower::new(&algs).unwrap();
        let [qc, cr, co] = &algs;
        for phi in [&tower.qc_cr, &tower.cr_co] {
            let c = phi.scaling_constant(phi.target().grading_element()).unwrap();
            assert_eq!(c, qr(grading_norm(phi.source()), grading_norm(phi.target())));
        }
        assert_eq!(qr(grading_norm(qc), grading_norm(cr)), qr(n + 3, n + 2));
        assert_eq!(qr(grading_norm(cr), grading_norm(co)), qr(2 * (n + 2), 2 * n + 3));
    }
}

#[test]
fn grading_element_acts_by_degree() {
    for g in qc_tower(1).unwrap().iter() {
        let e = g.grading_element();
        for i in 0..g.dim() {
            let br = g.bracket(e, &g.basis_vector(i));
            let want: Vec<Q> = g.basis_vector(i).iter().map(|v| v * q(g.degree(i) as i64)).collect();
            assert_eq!(br, want, "{} {}", g.name(), g.label(i));
        }
        assert!(g.killing_gram().iter().flatten().any(|v| !v.is_zero()));
    }
}

#[test]
fn normality_solution_space_n1() {
    let algs = qc_tower(1).unwrap();
    let tower = Tower::new(&algs).unwrap();
    let cs = [
        KostantComplex::new(&algs[0]).unwrap(),
        KostantComplex::new(&algs[1]).unwrap(),
        KostantComplex::new(&algs[2]).unwrap(),
    ];
    let to_cr = CochainInducer::new(&tower.qc_cr, &cs[0], &cs[1]).unwrap();
    let to_co = CochainInducer::new(&tower.qc_co, &cs[0], &cs[2]).unwrap();
    let cx = TowerComplexes { qc: &cs[0], cr: &cs[1], co: &cs[2], to_cr: &to_cr, to_co: &to_co };
    let fwd = normality_transfer(&tower, &cx, 5, &mut ChaCha8Rng::seed_from_u64(3));
    let inv = inverse_normality(&tower, &cx).unwrap();
    let total = |v: &[(i32, usize)]| v.iter().map(|s| s.1).sum::<usize>();
    assert_eq!(total(&fwd.solutions), 161);
    assert_eq!(total(&inv.solutions), 161);
    assert_eq!(inv.without_traces, 182);
    assert!(fwd.checks().iter().all(|c| c.pass));
    assert!(inv.checks().iter().all(|c| c.pass));
}
