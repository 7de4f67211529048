//! Normality of curvature cochains across the tower: solution spaces of the
//! codifferential conditions and their images under cochain induction.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Zero;
use rand::Rng;

use crate::checks::Check;
use crate::cohomology::{Cochain, KostantComplex};
use crate::inclusions::{CochainInducer, InclusionError, Tower};
use crate::lie::GradedLieAlgebra;
use crate::linalg::{inverse, rank_of, svec_from_dense, SAcc, SVec, SparseMatrix};
use crate::matrix::Matrix;
use crate::scalar::{q, qr, Q};

/// The three complexes of a tower and the two inducers out of g^qc.
pub struct TowerComplexes<'b> {
    pub qc: &'b KostantComplex<'b>,
    pub cr: &'b KostantComplex<'b>,
    pub co: &'b KostantComplex<'b>,
    pub to_cr: &'b CochainInducer<'b>,
    pub to_co: &'b CochainInducer<'b>,
}

fn random_q<R: Rng>(rng: &mut R) -> Q {
    qr(rng.gen_range(-4..=4), rng.gen_range(1..=3))
}

fn columns_of(m: &SparseMatrix) -> Vec<SVec> {
    m.transpose().rows
}

fn kernel_on(cols: &[SVec], nrows: usize, idx: &[usize]) -> Vec<SVec> {
    let sel: Vec<SVec> = idx.iter().map(|&i| cols[i].clone()).collect();
    SparseMatrix::from_columns(nrows, &sel)
        .kernel()
        .into_iter()
        .map(|k| k.into_iter().map(|(c, x)| (idx[c], x)).collect())
        .collect()
}

fn same_span(dim: usize, a: &[Vec<Q>], b: &[Vec<Q>]) -> bool {
    let ra: Vec<SVec> = a.iter().map(|v| svec_from_dense(v)).collect();
    let rb: Vec<SVec> = b.iter().map(|v| svec_from_dense(v)).collect();
    let mut both = ra.clone();
    both.extend(rb.iter().cloned());
    let (x, y, z) = (rank_of(dim, &ra), rank_of(dim, &rb), rank_of(dim, &both));
    x == y && y == z
}

#[derive(Clone, Debug)]
pub struct NormalityTransfer {
    /// dim of S = φ⁻¹(p^co) in each qc degree.
    pub s_by_degree: Vec<(i32, usize)>,
    pub s_dim: usize,
    pub s_expected: usize,
    pub s_graded: bool,
    pub centralizer_match: bool,
    /// dim of {κ ∈ C²(g₋, S) : δ*κ = 0} per homogeneity.
    pub solutions: Vec<(i32, usize)>,
    pub basis_closed_cr: bool,
    pub basis_closed_co: bool,
    pub combos_closed: bool,
    pub control_detected: bool,
}

impl NormalityTransfer {
    pub fn checks(&self) -> Vec<Check> {
        let total: usize = self.solutions.iter().map(|s| s.1).sum();
        alloc::vec![
            Check::new(
                "S = phi^-1(p^co) graded, expected dimension",
                self.s_graded && self.s_dim == self.s_expected,
                format!("dim {} (expected {}), by degree {:?}", self.s_dim, self.s_expected, self.s_by_degree),
            ),
            Check::new("S_0 = R E + centralizer of g-2 in g0", self.centralizer_match, ""),
            Check::new(
                "normal S-valued cochains induce normal cr cochains",
                self.basis_closed_cr,
                format!("solution dim {} by homogeneity {:?}", total, self.solutions),
            ),
            Check::new("normal S-valued cochains induce normal co cochains", self.basis_closed_co, ""),
            Check::new("random combinations stay normal", self.combos_closed, ""),
            Check::new("negative control: g0-valued cochain detected", self.control_detected, ""),
        ]
    }
}

/// Basis vectors grouped by degree.
pub type GradedSpan = Vec<(i32, Vec<Vec<Q>>)>;

/// S, computed degree by degree.
pub fn parabolic_preimage(tower: &Tower<'_>) -> (GradedSpan, bool) {
    let by_degree = tower.qc_co.preimage_of_parabolic_by_degree();
    let total: usize = by_degree.iter().map(|(_, v)| v.len()).sum();
    (by_degree, total == tower.qc_co.preimage_of_parabolic().len())
}

pub fn normality_transfer<R: Rng>(
    tower: &Tower<'_>,
    cx: &TowerComplexes<'_>,
    combos: usize,
    rng: &mut R,
) -> NormalityTransfer {
    let qc = tower.qc;
    let n = tower.n;
    let d = qc.dim();
    let (by_degree, s_graded) = parabolic_preimage(tower);
    let s_by_degree: Vec<(i32, usize)> = by_degree.iter().map(|(k, v)| (*k, v.len())).collect();
    let s_basis: Vec<(i32, Vec<Q>)> =
        by_degree.iter().flat_map(|(k, vs)| vs.iter().map(move |v| (*k, v.clone()))).collect();
    let s_dim = s_basis.len();
    let s_expected = 1 + n * (2 * n + 1) + qc.plus_indices().len();

    let g_m2: Vec<Vec<Q>> = qc.indices_of_degree(-2).iter().map(|&i| qc.basis_vector(i)).collect();
    let mut cent = qc.centralizer_in_degree(0, &g_m2);
    let e_in_cent = same_span(d, &cent, &{
        let mut c = cent.clone();
        c.push(qc.grading_element().to_vec());
        c
    });
    cent.push(qc.grading_element().to_vec());
    let s0: Vec<Vec<Q>> = s_basis.iter().filter(|(k, _)| *k == 0).map(|(_, v)| v.clone()).collect();
    let centralizer_match = !e_in_cent && same_span(d, &cent, &s0);

    let (m1, m2) = cx.qc.codifferential_parts_matrices();
    let c1 = columns_of(&m1);
    let c2 = columns_of(&m2);
    let off = m1.nrows;
    let tuples = cx.qc.tuples(2).to_vec();
    let minus = cx.qc.minus().to_vec();
    let mut vars: Vec<(usize, usize, i32)> = Vec::new();
    for (ti, t) in tuples.iter().enumerate() {
        let dt: i32 = t.iter().map(|&a| qc.degree(minus[a])).sum();
        for (si, (k, _)) in s_basis.iter().enumerate() {
            vars.push((ti, si, k - dt));
        }
    }
    let cols: Vec<SVec> = vars
        .iter()
        .map(|&(ti, si, _)| {
            let mut acc = SAcc::new();
            for (v, x) in s_basis[si].1.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                acc.add_svec(x, &c1[ti * d + v]);
                let shifted: SVec = c2[ti * d + v].iter().map(|(r, y)| (r + off, y.clone())).collect();
                acc.add_svec(x, &shifted);
            }
            acc.finish()
        })
        .collect();
    let mut ls: Vec<i32> = vars.iter().map(|v| v.2).collect();
    ls.sort();
    ls.dedup();
    let mut solutions = Vec::new();
    let mut basis: Vec<Cochain> = Vec::new();
    for &l in &ls {
        let idx: Vec<usize> = (0..vars.len()).filter(|&i| vars[i].2 == l).collect();
        let ker = kernel_on(&cols, off + m2.nrows, &idx);
        solutions.push((l, ker.len()));
        for k in ker {
            let mut c = cx.qc.zero(2);
            for (i, y) in k {
                let (ti, si, _) = vars[i];
                for (v, x) in s_basis[si].1.iter().enumerate() {
                    if !x.is_zero() {
                        c.coeffs[ti * d + v] += &y * x;
                    }
                }
            }
            basis.push(c);
        }
    }

    let dcr = cx.cr.codifferential_matrix(2);
    let dco = cx.co.codifferential_matrix(2);
    let closed = |k: &Cochain, ind: &CochainInducer<'_>, dm: &SparseMatrix| {
        dm.apply(&ind.induce(k).coeffs).iter().all(|x| x.is_zero())
    };
    let basis_closed_cr = basis.iter().all(|k| closed(k, cx.to_cr, &dcr));
    let basis_closed_co = basis.iter().all(|k| closed(k, cx.to_co, &dco));
    let mut combos_closed = true;
    if !basis.is_empty() {
        for _ in 0..combos {
            let mut c = cx.qc.zero(2);
            for b in &basis {
                c = c.add(&b.scale(&random_q(rng)));
            }
            combos_closed &= closed(&c, cx.to_cr, &dcr) && closed(&c, cx.to_co, &dco);
        }
    }

    let g0_idx = qc.indices_of_degree(0);
    let mut ctl = cx.qc.zero(2);
    for ti in 0..tuples.len() {
        for &v in &g0_idx {
            if rng.gen_bool(0.5) {
                ctl.coeffs[ti * d + v] = q(rng.gen_range(1..=3));
            }
        }
    }
    let part1_nonzero = m1.apply(&ctl.coeffs).iter().any(|x| !x.is_zero());
    let control_detected = part1_nonzero && !closed(&ctl, cx.to_cr, &dcr);

    NormalityTransfer {
        s_by_degree,
        s_dim,
        s_expected,
        s_graded,
        centralizer_match,
        solutions,
        basis_closed_cr,
        basis_closed_co,
        combos_closed,
        control_detected,
    }
}

/// Complex structures on g₋₁ and the metric they share.
#[derive(Clone, Debug)]
pub struct LeviData {
    /// Positions (in the g₋ list of the complex) of the g₋₁ basis.
    pub positions: Vec<usize>,
    /// Each structure as a matrix on g₋₁ coordinates (column = image).
    pub structures: Vec<Matrix<Q>>,
    pub metric: Matrix<Q>,
    pub metric_inverse: Matrix<Q>,
}

fn restricted_ad(alg: &GradedLieAlgebra, cx: &KostantComplex<'_>, pos: &[usize], y: &[Q]) -> Matrix<Q> {
    let minus = cx.minus();
    let mut m = Matrix::<Q>::zeros(pos.len(), pos.len());
    for (c, &a) in pos.iter().enumerate() {
        let img = alg.bracket(y, &alg.basis_vector(minus[a]));
        for (r, &b) in pos.iter().enumerate() {
            m.set(r, c, img[minus[b]].clone());
        }
    }
    m
}

fn square_is_minus_one(m: &Matrix<Q>) -> bool {
    m.mul(m) == Matrix::<Q>::identity(m.rows).neg()
}

/// Metric G(X, Y) = coefficient of `reeb` in [I X, Y].
fn levi_metric(
    alg: &GradedLieAlgebra,
    cx: &KostantComplex<'_>,
    pos: &[usize],
    structure: &Matrix<Q>,
    reeb: usize,
) -> Matrix<Q> {
    let minus = cx.minus();
    Matrix::from_fn(pos.len(), pos.len(), |a, b| {
        let mut ix = alg.zero();
        for (r, &p) in pos.iter().enumerate() {
            ix[minus[p]] = structure.get(r, a).clone();
        }
        alg.bracket(&ix, &alg.basis_vector(minus[pos[b]]))[reeb].clone()
    })
}

/// I_s = ad(a.s) on g^qc₋₁ with the metric G from [I₁X, Y]. Checks that each
/// I_s squares to −1 and that the three metrics [I_s X, Y]_s coincide.
pub fn qc_levi_data(qc: &GradedLieAlgebra, cx: &KostantComplex<'_>) -> Result<LeviData, String> {
    let minus = cx.minus();
    let pos: Vec<usize> = (0..minus.len()).filter(|&a| qc.degree(minus[a]) == -1).collect();
    let mut structures = Vec::new();
    let mut metrics = Vec::new();
    for s in ["i", "j", "k"] {
        let a = qc.index_of(&format!("a.{s}")).ok_or("missing a.u")?;
        let m = restricted_ad(qc, cx, &pos, &qc.basis_vector(a));
        if !square_is_minus_one(&m) {
            return Err(format!("ad(a.{s}) does not square to -1 on g-1"));
        }
        let reeb = qc.index_of(&format!("p.{s}")).ok_or("missing p.u")?;
        metrics.push(levi_metric(qc, cx, &pos, &m, reeb));
        structures.push(m);
    }
    if metrics[1] != metrics[0] || metrics[2] != metrics[0] {
        return Err("the three Levi metrics differ".into());
    }
    let g = metrics.swap_remove(0);
    if g.transpose() != g {
        return Err("Levi metric is not symmetric".into());
    }
    let gi = inverse(&g).ok_or("Levi metric is degenerate")?;
    Ok(LeviData { positions: pos, structures, metric: g, metric_inverse: gi })
}

/// J on g^cr₋₁ from the center of g^cr₀, normalized so that J² = −1, with the
/// metric from [J X, Y].
pub fn cr_levi_data(cr: &GradedLieAlgebra, cx: &KostantComplex<'_>) -> Result<LeviData, String> {
    let minus = cx.minus();
    let pos: Vec<usize> = (0..minus.len()).filter(|&a| cr.degree(minus[a]) == -1).collect();
    let g0: Vec<Vec<Q>> = cr.indices_of_degree(0).iter().map(|&i| cr.basis_vector(i)).collect();
    let center = cr.centralizer_in_degree(0, &g0);
    let m2 = cr.indices_of_degree(-2);
    let e2 = cr.basis_vector(m2[0]);
    // Y = Σ c_k center_k with [Y, g₋₂] = 0
    let rows: Vec<SVec> = (0..cr.dim())
        .map(|r| {
            let v: Vec<Q> = center.iter().map(|z| cr.bracket(z, &e2)[r].clone()).collect();
            svec_from_dense(&v)
        })
        .collect();
    let ker = SparseMatrix { nrows: rows.len(), ncols: center.len(), rows }.kernel();
    if ker.len() != 1 {
        return Err(format!("expected one central direction killing g-2, found {}", ker.len()));
    }
    let mut y = cr.zero();
    for (k, c) in &ker[0] {
        for (o, v) in y.iter_mut().zip(&center[*k]) {
            *o += c * v;
        }
    }
    let m = restricted_ad(cr, cx, &pos, &y);
    let sq = m.mul(&m);
    let mu = sq.get(0, 0).clone();
    if sq != Matrix::<Q>::identity(m.rows).scale(&mu) || mu >= Q::zero() {
        return Err("central element does not act as a complex structure".into());
    }
    let root = rational_sqrt(&-mu).ok_or("normalization is irrational")?;
    let j = m.scale(&(Q::from_integer(1.into()) / root));
    let g = levi_metric(cr, cx, &pos, &j, m2[0]);
    if g.transpose() != g {
        return Err("cr Levi metric is not symmetric".into());
    }
    let gi = inverse(&g).ok_or("cr Levi metric is degenerate")?;
    debug_assert!(square_is_minus_one(&j));
    Ok(LeviData { positions: pos, structures: alloc::vec![j], metric: g, metric_inverse: gi })
}

fn rational_sqrt(x: &Q) -> Option<Q> {
    let (n, d) = (x.numer(), x.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(Q::new(rn, rd))
    } else {
        None
    }
}

/// Rows expressing Σ_{a,b} G^{ab} κ(I e_a, e_b) = 0 in every coordinate of g.
pub fn trace_constraints(cx: &KostantComplex<'_>, levi: &LeviData, structure: &Matrix<Q>) -> SparseMatrix {
    let d = cx.algebra().dim();
    // W = I·G⁻¹, coefficient of (x, y) is W_xy − W_yx
    let w = structure.mul(&levi.metric_inverse);
    let pos = &levi.positions;
    let mut rows: Vec<SAcc> = (0..d).map(|_| SAcc::new()).collect();
    for (ti, t) in cx.tuples(2).iter().enumerate() {
        let (Some(x), Some(y)) = (pos.iter().position(|&p| p == t[0]), pos.iter().position(|&p| p == t[1])) else {
            continue;
        };
        let c = w.get(x, y) - w.get(y, x);
        if c.is_zero() {
            continue;
        }
        for (v, row) in rows.iter_mut().enumerate() {
            row.add(ti * d + v, c.clone());
        }
    }
    SparseMatrix { nrows: d, ncols: cx.dim_cochains(2), rows: rows.into_iter().map(|r| r.finish()).collect() }
}

#[derive(Clone, Debug)]
pub struct InverseNormality {
    pub unknowns: usize,
    pub solutions: Vec<(i32, usize)>,
    pub qc_normal: bool,
    pub cr_normal: bool,
    pub without_traces: usize,
    pub control_detected: bool,
}

impl InverseNormality {
    pub fn checks(&self) -> Vec<Check> {
        let total: usize = self.solutions.iter().map(|s| s.1).sum();
        alloc::vec![
            Check::new(
                "co-normal cochains with vanishing traces are qc-normal",
                self.qc_normal,
                format!("{} unknowns, solution dim {} by homogeneity {:?}", self.unknowns, total, self.solutions),
            ),
            Check::new("the same cochains are cr-normal", self.cr_normal, ""),
            Check::new(
                "negative control: dropping the trace conditions breaks qc-normality",
                self.control_detected,
                format!("solution dim without traces {}", self.without_traces),
            ),
        ]
    }
}

pub fn inverse_normality(tower: &Tower<'_>, cx: &TowerComplexes<'_>) -> Result<InverseNormality, InclusionError> {
    let dco = cx.co.codifferential_matrix(2);
    let a_co = dco.mul(cx.to_co.transfer());
    let qlevi = qc_levi_data(tower.qc, cx.qc).map_err(|_| InclusionError::WrongFamily)?;
    let clevi = cr_levi_data(tower.cr, cx.cr).map_err(|_| InclusionError::WrongFamily)?;
    let mut traces = SparseMatrix::zero(0, cx.qc.dim_cochains(2));
    for s in &qlevi.structures {
        traces = traces.stack(&trace_constraints(cx.qc, &qlevi, s));
    }
    let cr_trace = trace_constraints(cx.cr, &clevi, &clevi.structures[0]).mul(cx.to_cr.transfer());
    traces = traces.stack(&cr_trace);

    let with = a_co.stack(&traces);
    let cols_with = columns_of(&with);
    let cols_without = columns_of(&a_co);
    let (m1, m2) = cx.qc.codifferential_parts_matrices();
    let dcr = cx.cr.codifferential_matrix(2);
    let nq = cx.qc.dim_cochains(2);
    let ls = cx.qc.homogeneities(2);
    let mut solutions = Vec::new();
    let mut qc_normal = true;
    let mut cr_normal = true;
    let mut without_traces = 0;
    let mut control_detected = false;
    let is_qc_normal = |c: &[Q]| {
        m1.apply(c).iter().all(|x| x.is_zero()) && m2.apply(c).iter().all(|x| x.is_zero())
    };
    for &l in &ls {
        let idx = cx.qc.block(2, l);
        let ker = kernel_on(&cols_with, with.nrows, &idx);
        solutions.push((l, ker.len()));
        for k in &ker {
            let c = crate::linalg::svec_to_dense(k, nq);
            qc_normal &= is_qc_normal(&c);
            let kt = cx.to_cr.induce(&Cochain { degree: 2, coeffs: c });
            cr_normal &= dcr.apply(&kt.coeffs).iter().all(|x| x.is_zero());
        }
        let loose = kernel_on(&cols_without, a_co.nrows, &idx);
        without_traces += loose.len();
        for k in &loose {
            if !is_qc_normal(&crate::linalg::svec_to_dense(k, nq)) {
                control_detected = true;
            }
        }
    }
    Ok(InverseNormality { unknowns: nq, solutions, qc_normal, cr_normal, without_traces, control_detected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::all_pass;
    use crate::lie::qc_tower;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn normality_both_directions_n1() {
        let algs = qc_tower(1).unwrap();
        let t = Tower::new(&algs).unwrap();
        let cs = [
            KostantComplex::new(&algs[0]).unwrap(),
            KostantComplex::new(&algs[1]).unwrap(),
            KostantComplex::new(&algs[2]).unwrap(),
        ];
        let to_cr = CochainInducer::new(&t.qc_cr, &cs[0], &cs[1]).unwrap();
        let to_co = CochainInducer::new(&t.qc_co, &cs[0], &cs[2]).unwrap();
        let cx = TowerComplexes { qc: &cs[0], cr: &cs[1], co: &cs[2], to_cr: &to_cr, to_co: &to_co };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let fwd = normality_transfer(&t, &cx, 5, &mut rng);
        assert!(all_pass(&fwd.checks()), "{:?}", fwd.checks());
        assert_eq!(fwd.s_by_degree, alloc::vec![(-2, 0), (-1, 0), (0, 4), (1, 4), (2, 3)]);
        let inv = inverse_normality(&t, &cx).unwrap();
        assert!(all_pass(&inv.checks()), "{:?}", inv.checks());
        let total = |v: &[(i32, usize)]| v.iter().map(|x| x.1).sum::<usize>();
        assert!(total(&fwd.solutions) > 0);
        // two independent descriptions of the same space
        assert_eq!(total(&fwd.solutions), total(&inv.solutions));
        assert!(inv.without_traces > total(&inv.solutions));
    }

    #[test]
    fn levi_structures() {
        let algs = qc_tower(1).unwrap();
        let q = KostantComplex::new(&algs[0]).unwrap();
        let l = qc_levi_data(&algs[0], &q).unwrap();
        assert_eq!(l.structures.len(), 3);
        let (i, j, k) = (&l.structures[0], &l.structures[1], &l.structures[2]);
        // quaternion relations up to the orientation of the triple
        let ij = i.mul(j);
        assert!(ij == *k || ij == k.neg());
        let c = KostantComplex::new(&algs[1]).unwrap();
        let lc = cr_levi_data(&algs[1], &c).unwrap();
        assert_eq!(lc.structures[0].mul(&lc.structures[0]), Matrix::<Q>::identity(8).neg());
    }
}
