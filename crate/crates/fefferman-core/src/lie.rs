//! Graded matrix Lie algebras sp(n+1,1), su(p+1,q+1), so(p+1,q+1) with exact
//! structure constants and Killing forms.
//!
//! Every algebra is stored in a real ambient representation: quaternionic
//! matrices pass through ι_C ∘ ι_H, complex ones through ι_C. The Killing form
//! is trace(ad ∘ ad) on the abstract basis, never a matrix trace.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};


use crate::linalg::{inverse, kernel_sparse, svec_from_dense, Coordinatizer, SAcc, SVec, SparseMatrix};
use crate::matrix::{realify_c, realify_h, Matrix};
use crate::scalar::{q, Complex, Q, Quaternion, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// sp(n+1,1)
    Qc { n: usize },
    /// su(p+1,q+1)
    Cr { p: usize, q: usize },
    /// so(p+1,q+1)
    Co { p: usize, q: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LieError {
    /// A commutator of basis matrices left the span of the basis.
    NotClosed { i: usize, j: usize },
    /// The pairing between g₋ and p₊ is singular.
    SingularPairing,
    /// A basis matrix fails the defining equation of the algebra.
    NotInAlgebra { label: String },
}

impl fmt::Display for LieError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LieError::NotClosed { i, j } => write!(f, "bracket of basis elements {i} and {j} leaves the span"),
            LieError::SingularPairing => write!(f, "Killing pairing of g_- with p_+ is singular"),
            LieError::NotInAlgebra { label } => write!(f, "basis matrix {label} is not in the algebra"),
        }
    }
}

impl core::error::Error for LieError {}

/// Flattened sparse real matrix: index r·n + c.
pub type SMat = SVec;

pub fn smat_mul(a: &SMat, b: &SMat, n: usize) -> SMat {
    let mut brow: BTreeMap<usize, Vec<(usize, &Q)>> = BTreeMap::new();
    for (k, x) in b {
        brow.entry(k / n).or_default().push((k % n, x));
    }
    let mut acc = SAcc::new();
    for (k, x) in a {
        let (r, m) = (k / n, k % n);
        if let Some(row) = brow.get(&m) {
            for (c, y) in row {
                acc.add(r * n + c, x * *y);
            }
        }
    }
    acc.finish()
}

pub fn smat_commutator(a: &SMat, b: &SMat, n: usize) -> SMat {
    let ab = smat_mul(a, b, n);
    let ba = smat_mul(b, a, n);
    crate::linalg::svec_axpy(&ab, &-Q::one(), &ba)
}

pub fn smat_from_dense(m: &Matrix<Q>) -> SMat {
    svec_from_dense(&m.data)
}

pub fn smat_to_dense(a: &SMat, n: usize) -> Matrix<Q> {
    let mut m = Matrix::<Q>::zeros(n, n);
    for (k, x) in a {
        m.set(k / n, k % n, x.clone());
    }
    m
}

/// P·A·Pᵗ for a permutation P given by `perm[new] = old`.
pub fn smat_permute(a: &SMat, perm: &[usize], n: usize) -> SMat {
    let mut inv = alloc::vec![0usize; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let mut out: Vec<(usize, Q)> = a.iter().map(|(k, x)| (inv[k / n] * n + inv[k % n], x.clone())).collect();
    out.sort_by_key(|e| e.0);
    out
}

#[derive(Clone, Debug)]
pub struct GradedLieAlgebra {
    name: String,
    family: Family,
    depth: i32,
    ambient: usize,
    labels: Vec<String>,
    degrees: Vec<i32>,
    matrices: Vec<SMat>,
    brackets: Vec<Vec<SVec>>,
    killing: Vec<Vec<Q>>,
    grading: Vec<Q>,
    coord: Coordinatizer,
}

/// Basis of g₋ together with its Killing-dual basis of p₊.
#[derive(Clone, Debug)]
pub struct DualBasisPair {
    pub minus: Vec<usize>,
    /// e^β as coordinates in the full algebra, aligned with `minus`.
    pub plus: Vec<Vec<Q>>,
}

impl GradedLieAlgebra {
    /// Assemble an algebra from homogeneous basis matrices. Basis order is kept
    /// after a stable sort by degree.
    pub fn from_matrices(
        name: String,
        family: Family,
        depth: i32,
        ambient: usize,
        mut basis: Vec<(String, i32, SMat)>,
        grading_matrix: SMat,
    ) -> Result<Self, LieError> {
        basis.sort_by_key(|b| b.1);
        let labels: Vec<String> = basis.iter().map(|b| b.0.clone()).collect();
        let degrees: Vec<i32> = basis.iter().map(|b| b.1).collect();
        let matrices: Vec<SMat> = basis.into_iter().map(|b| b.2).collect();
        let coord = Coordinatizer::new(matrices.clone());
        let dim = matrices.len();
        let mut brackets = alloc::vec![alloc::vec![Vec::new(); dim]; dim];
        for i in 0..dim {
            for j in (i + 1)..dim {
                let c = smat_commutator(&matrices[i], &matrices[j], ambient);
                let x = coord.coords(&c).ok_or(LieError::NotClosed { i, j })?;
                let sv = svec_from_dense(&x);
                brackets[j][i] = sv.iter().map(|(k, v)| (*k, -v)).collect();
                brackets[i][j] = sv;
            }
        }
        let grading = coord.coords(&grading_matrix).ok_or(LieError::NotInAlgebra { label: "E".into() })?;
        let mut alg = GradedLieAlgebra {
            name,
            family,
            depth,
            ambient,
            labels,
            degrees,
            matrices,
            brackets,
            killing: Vec::new(),
            grading,
            coord,
        };
        alg.killing = alg.compute_killing();
        Ok(alg)
    }

    fn compute_killing(&self) -> Vec<Vec<Q>> {
        let dim = self.dim();
        let mut b = alloc::vec![alloc::vec![Q::zero(); dim]; dim];
        for i in 0..dim {
            for j in i..dim {
                let mut s = Q::zero();
                for k in 0..dim {
                    for (l, x) in &self.brackets[i][k] {
                        if let Ok(p) = self.brackets[j][*l].binary_search_by_key(&k, |e| e.0) {
                            s += x * &self.brackets[j][*l][p].1;
                        }
                    }
                }
                b[i][j] = s.clone();
                b[j][i] = s;
            }
        }
        b
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn depth(&self) -> i32 {
        self.depth
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.degrees[i]
    }

    pub fn basis_matrix(&self, i: usize) -> &SMat {
        &self.matrices[i]
    }

    pub fn killing_gram(&self) -> &[Vec<Q>] {
        &self.killing
    }

    pub fn grading_element(&self) -> &[Q] {
        &self.grading
    }

    pub fn indices_of_degree(&self, d: i32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degrees[i] == d).collect()
    }

    pub fn minus_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degrees[i] < 0).collect()
    }

    pub fn plus_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degrees[i] > 0).collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Q> {
        let mut v = alloc::vec![Q::zero(); self.dim()];
        v[i] = Q::one();
        v
    }

    pub fn zero(&self) -> Vec<Q> {
        alloc::vec![Q::zero(); self.dim()]
    }

    /// Exact structure constants: [e_i, e_j] = Σ c_ij^m e_m.
    pub fn structure_constants(&self, i: usize, j: usize) -> &SVec {
        &self.brackets[i][j]
    }

    pub fn bracket(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let mut out = self.zero();
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() || i == j {
                    continue;
                }
                let ab = a * b;
                for (m, c) in &self.brackets[i][j] {
                    out[*m] += &ab * c;
                }
            }
        }
        out
    }

    /// ad(x) as a sparse matrix acting on coordinate vectors.
    pub fn ad(&self, x: &[Q]) -> SparseMatrix {
        let dim = self.dim();
        let mut rows: Vec<SAcc> = (0..dim).map(|_| SAcc::new()).collect();
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for j in 0..dim {
                for (m, c) in &self.brackets[i][j] {
                    rows[*m].add(j, a * c);
                }
            }
        }
        SparseMatrix { nrows: dim, ncols: dim, rows: rows.into_iter().map(|r| r.finish()).collect() }
    }

    pub fn killing(&self, x: &[Q], y: &[Q]) -> Q {
        let mut s = Q::zero();
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let k = &self.killing[i][j];
                if !k.is_zero() {
                    s += a * b * k;
                }
            }
        }
        s
    }

    /// Degree-d component of x.
    pub fn component(&self, x: &[Q], d: i32) -> Vec<Q> {
        x.iter()
            .enumerate()
            .map(|(i, v)| if self.degrees[i] == d { v.clone() } else { Q::zero() })
            .collect()
    }

    /// g₋ component.
    pub fn minus_part(&self, x: &[Q]) -> Vec<Q> {
        x.iter()
            .enumerate()
            .map(|(i, v)| if self.degrees[i] < 0 { v.clone() } else { Q::zero() })
            .collect()
    }

    pub fn matrix_of(&self, x: &[Q]) -> SMat {
        let mut acc = SAcc::new();
        for (i, a) in x.iter().enumerate() {
            if !a.is_zero() {
                acc.add_svec(a, &self.matrices[i]);
            }
        }
        acc.finish()
    }

    /// Coordinates of an ambient matrix, or None if it is not in the algebra.
    pub fn coords_of_matrix(&self, m: &SMat) -> Option<Vec<Q>> {
        self.coord.coords(m)
    }

    pub fn dual_basis(&self) -> Result<DualBasisPair, LieError> {
        self.dual_basis_for(&self.minus_indices())
    }

    /// Killing-dual basis of p₊ for the given ordering of the g₋ basis.
    pub fn dual_basis_for(&self, minus: &[usize]) -> Result<DualBasisPair, LieError> {
        let plus = self.plus_indices();
        assert_eq!(plus.len(), minus.len(), "dim p_+ must equal dim g_-");
        let m = Matrix::from_fn(minus.len(), plus.len(), |a, p| self.killing[minus[a]][plus[p]].clone());
        let inv = inverse(&m).ok_or(LieError::SingularPairing)?;
        let duals = (0..minus.len())
            .map(|b| {
                let mut v = self.zero();
                for (p, &pi) in plus.iter().enumerate() {
                    v[pi] = inv.get(p, b).clone();
                }
                v
            })
            .collect();
        Ok(DualBasisPair { minus: minus.to_vec(), plus: duals })
    }

    /// Basis of {X ∈ g_degree : [Z, X] = 0 for all Z in `source`}.
    pub fn centralizer_in_degree(&self, degree: i32, source: &[Vec<Q>]) -> Vec<Vec<Q>> {
        let idx = self.indices_of_degree(degree);
        let mut eqs: Vec<SAcc> = Vec::new();
        for z in source {
            let mut per_out: Vec<SAcc> = (0..self.dim()).map(|_| SAcc::new()).collect();
            for (col, &k) in idx.iter().enumerate() {
                let e = self.basis_vector(k);
                let b = self.bracket(z, &e);
                for (m, c) in b.iter().enumerate() {
                    if !c.is_zero() {
                        per_out[m].add(col, c.clone());
                    }
                }
            }
            eqs.extend(per_out);
        }
        let rows: Vec<SVec> = eqs.into_iter().map(|a| a.finish()).filter(|r| !r.is_empty()).collect();
        kernel_sparse(idx.len(), &rows)
            .into_iter()
            .map(|kv| {
                let mut v = self.zero();
                for (col, x) in kv {
                    v[idx[col]] = x;
                }
                v
            })
            .collect()
    }
}

/// Witt involution σ for Q_{p+1,q+1} on N = p+q+2 coordinates.
pub fn witt_sigma(p: usize, qq: usize) -> Vec<usize> {
    let n = p + qq + 2;
    (0..n)
        .map(|a| if a <= qq || a >= n - 1 - qq { n - 1 - a } else { a })
        .collect()
}

/// Grading weights: +1 on the first coordinate, −1 on the last.
fn witt_weight(a: usize, n: usize) -> i32 {
    if a == 0 {
        1
    } else if a == n - 1 {
        -1
    } else {
        0
    }
}

const UNIT_NAMES: [&str; 4] = ["1", "i", "j", "k"];

fn quat_real(m: &Matrix<Quaternion>) -> SMat {
    smat_from_dense(&realify_c(&realify_h(m)))
}

/// The matrix form of sp(n+1,1) with blocks (a, A₀, p, q, x, z) on H^{n+2}.
pub struct QcParams {
    pub a: Quaternion,
    pub a0: Matrix<Quaternion>,
    pub p: Quaternion,
    pub q: Quaternion,
    pub x: Vec<Quaternion>,
    pub z: Vec<Quaternion>,
}

impl QcParams {
    pub fn zero(n: usize) -> Self {
        QcParams {
            a: Quaternion::zero_el(),
            a0: Matrix::zeros(n, n),
            p: Quaternion::zero_el(),
            q: Quaternion::zero_el(),
            x: alloc::vec![Quaternion::zero_el(); n],
            z: alloc::vec![Quaternion::zero_el(); n],
        }
    }

    /// [[−ā, z, q], [x̄, A₀, −z̄ᵗ], [p̄, −xᵗ, a]]
    pub fn matrix(&self) -> Matrix<Quaternion> {
        let n = self.x.len();
        let last = n + 1;
        let mut m = Matrix::<Quaternion>::zeros(n + 2, n + 2);
        m.set(0, 0, self.a.conj().neg());
        m.set(last, last, self.a.clone());
        m.set(0, last, self.q.clone());
        m.set(last, 0, self.p.conj());
        for k in 0..n {
            m.set(0, 1 + k, self.z[k].clone());
            m.set(1 + k, last, self.z[k].conj().neg());
            m.set(1 + k, 0, self.x[k].conj());
            m.set(last, 1 + k, self.x[k].neg());
            for l in 0..n {
                m.set(1 + k, 1 + l, self.a0.get(k, l).clone());
            }
        }
        m
    }
}

/// Q_{p+1,q+1} as a real symmetric matrix.
pub fn witt_form(p: usize, qq: usize) -> Matrix<Q> {
    let s = witt_sigma(p, qq);
    let n = s.len();
    Matrix::from_fn(n, n, |r, c| if s[r] == c { q(1) } else { q(0) })
}

/// g^qc = sp(n+1,1).
pub fn build_qc(n: usize) -> Result<GradedLieAlgebra, LieError> {
    assert!(n >= 1);
    let mut basis: Vec<(String, i32, Matrix<Quaternion>)> = Vec::new();
    for s in 1..4 {
        let mut pr = QcParams::zero(n);
        pr.p = Quaternion::unit(s);
        basis.push((format!("p.{}", UNIT_NAMES[s]), -2, pr.matrix()));
    }
    for k in 0..n {
        for s in 0..4 {
            let mut pr = QcParams::zero(n);
            pr.x[k] = Quaternion::unit(s);
            basis.push((format!("x{}.{}", k + 1, UNIT_NAMES[s]), -1, pr.matrix()));
        }
    }
    let mut pe = QcParams::zero(n);
    pe.a = Quaternion::from_ints(-1, 0, 0, 0);
    let grading = pe.matrix();
    basis.push(("E".into(), 0, grading.clone()));
    for s in 1..4 {
        let mut pr = QcParams::zero(n);
        pr.a = Quaternion::unit(s);
        basis.push((format!("a.{}", UNIT_NAMES[s]), 0, pr.matrix()));
    }
    for k in 0..n {
        for l in k..n {
            let units: &[usize] = if k == l { &[1, 2, 3] } else { &[0, 1, 2, 3] };
            for &s in units {
                let mut pr = QcParams::zero(n);
                let u = Quaternion::unit(s);
                pr.a0.set(k, l, u.clone());
                if k != l {
                    pr.a0.set(l, k, u.conj().neg());
                }
                basis.push((format!("A{}{}.{}", k + 1, l + 1, UNIT_NAMES[s]), 0, pr.matrix()));
            }
        }
    }
    for k in 0..n {
        for s in 0..4 {
            let mut pr = QcParams::zero(n);
            pr.z[k] = Quaternion::unit(s);
            basis.push((format!("z{}.{}", k + 1, UNIT_NAMES[s]), 1, pr.matrix()));
        }
    }
    for s in 1..4 {
        let mut pr = QcParams::zero(n);
        pr.q = Quaternion::unit(s);
        basis.push((format!("q.{}", UNIT_NAMES[s]), 2, pr.matrix()));
    }
    let qf = witt_form(n, 0).map_into(|x| Quaternion::from_q(x.clone()));
    for (label, _, m) in &basis {
        if !m.mul(&qf).add(&qf.mul(&m.adjoint())).is_zero() {
            return Err(LieError::NotInAlgebra { label: label.clone() });
        }
    }
    let ambient = 4 * (n + 2);
    let basis = basis.into_iter().map(|(l, d, m)| (l, d, quat_real(&m))).collect();
    GradedLieAlgebra::from_matrices(
        format!("sp({},1)", n + 1),
        Family::Qc { n },
        2,
        ambient,
        basis,
        quat_real(&grading),
    )
}

/// g^cr = su(p+1,q+1), graded by the stabilizer of C·e₀.
pub fn build_cr(p: usize, qq: usize) -> Result<GradedLieAlgebra, LieError> {
    assert!(p >= qq);
    let sigma = witt_sigma(p, qq);
    let n = sigma.len();
    let qf = witt_form(p, qq);
    let cz = |re: Q, im: Q| Complex::new(re, im);
    // A = B·Q with B anti-hermitian
    let from_b = |b: &Matrix<Complex>| b.mul(&qf.map_into(|x| Complex::from_q(x.clone())));
    let mut basis: Vec<(String, i32, Matrix<Complex>)> = Vec::new();
    let mut traced: Vec<(String, Matrix<Complex>, Q)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let deg = witt_weight(i, n) + witt_weight(j, n);
            let mut b = Matrix::<Complex>::zeros(n, n);
            b.set(i, j, cz(q(1), q(0)));
            b.set(j, i, cz(q(-1), q(0)));
            basis.push((format!("re({},{})", i, j), deg, from_b(&b)));
            let mut b = Matrix::<Complex>::zeros(n, n);
            b.set(i, j, cz(q(0), q(1)));
            b.set(j, i, cz(q(0), q(1)));
            let a = from_b(&b);
            if sigma[i] == j {
                traced.push((format!("im({},{})", i, j), a, q(2)));
            } else {
                basis.push((format!("im({},{})", i, j), deg, a));
            }
        }
    }
    for i in 0..n {
        let mut b = Matrix::<Complex>::zeros(n, n);
        b.set(i, i, cz(q(0), q(1)));
        let a = from_b(&b);
        if sigma[i] == i {
            traced.push((format!("im({})", i), a, q(1)));
        } else {
            basis.push((format!("im({})", i), 2 * witt_weight(i, n), a));
        }
    }
    for w in traced.windows(2) {
        let (l0, h0, t0) = &w[0];
        let (l1, h1, t1) = &w[1];
        let m = if t0 > t1 { t0.clone() } else { t1.clone() };
        let a = h0.scale(&(t1 / &m)).sub(&h1.scale(&(t0 / &m)));
        basis.push((format!("tf[{}-{}]", l0, l1), 0, a));
    }
    let mut e = Matrix::<Complex>::zeros(n, n);
    e.set(0, 0, Complex::one_el());
    e.set(n - 1, n - 1, Complex::one_el().neg());
    let basis = basis.into_iter().map(|(l, d, m)| (l, d, smat_from_dense(&realify_c(&m)))).collect();
    GradedLieAlgebra::from_matrices(
        format!("su({},{})", p + 1, qq + 1),
        Family::Cr { p, q: qq },
        2,
        2 * n,
        basis,
        smat_from_dense(&realify_c(&e)),
    )
}

/// g^co = so(p+1,q+1), |1|-graded by the stabilizer of R·e₀.
pub fn build_co(p: usize, qq: usize) -> Result<GradedLieAlgebra, LieError> {
    assert!(p >= qq);
    let sigma = witt_sigma(p, qq);
    let n = sigma.len();
    let qf = witt_form(p, qq);
    let mut basis: Vec<(String, i32, SMat)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let deg = witt_weight(i, n) + witt_weight(j, n);
            let mut b = Matrix::<Q>::zeros(n, n);
            b.set(i, j, q(1));
            b.set(j, i, q(-1));
            basis.push((format!("({},{})", i, j), deg, smat_from_dense(&b.mul(&qf))));
        }
    }
    let mut e = Matrix::<Q>::zeros(n, n);
    e.set(0, 0, q(1));
    e.set(n - 1, n - 1, q(-1));
    GradedLieAlgebra::from_matrices(
        format!("so({},{})", p + 1, qq + 1),
        Family::Co { p, q: qq },
        1,
        n,
        basis,
        smat_from_dense(&e),
    )
}

/// The three algebras of the qc Fefferman tower for parameter n.
pub fn qc_tower(n: usize) -> Result<[GradedLieAlgebra; 3], LieError> {
    Ok([build_qc(n)?, build_cr(2 * n + 1, 1)?, build_co(4 * n + 3, 3)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rank;

    fn check_grading(g: &GradedLieAlgebra) {
        let e = g.grading_element().to_vec();
        for i in 0..g.dim() {
            let b = g.bracket(&e, &g.basis_vector(i));
            let want: Vec<Q> = g.basis_vector(i).iter().map(|x| x * q(g.degree(i) as i64)).collect();
            assert_eq!(b, want, "{} {}", g.name(), g.label(i));
        }
    }

    fn check_killing(g: &GradedLieAlgebra) {
        let k = g.killing_gram();
        for i in 0..g.dim() {
            for j in 0..g.dim() {
                if g.degree(i) + g.degree(j) != 0 {
                    assert!(k[i][j].is_zero());
                }
            }
        }
        let m = Matrix::from_fn(g.dim(), g.dim(), |i, j| k[i][j].clone());
        assert_eq!(rank(&m), g.dim());
    }

    #[test]
    fn dimensions_n1() {
        let [qc, cr, co] = qc_tower(1).unwrap();
        assert_eq!((qc.dim(), cr.dim(), co.dim()), (21, 35, 66));
        assert_eq!(qc.indices_of_degree(-2).len(), 3);
        assert_eq!(qc.indices_of_degree(-1).len(), 4);
        assert_eq!(cr.indices_of_degree(-2).len(), 1);
        assert_eq!(cr.indices_of_degree(-1).len(), 8);
        assert_eq!(co.indices_of_degree(-1).len(), 10);
        assert_eq!(co.indices_of_degree(-2).len(), 0);
        for g in [&qc, &cr, &co] {
            check_grading(g);
            check_killing(g);
        }
    }

    #[test]
    fn dual_basis_pairs() {
        let g = build_qc(1).unwrap();
        let d = g.dual_basis().unwrap();
        for (a, &ea) in d.minus.iter().enumerate() {
            for (b, eb) in d.plus.iter().enumerate() {
                let v = g.killing(&g.basis_vector(ea), eb);
                assert_eq!(v, if a == b { q(1) } else { q(0) });
            }
        }
    }

    #[test]
    fn centralizer_of_g_minus2_in_g0() {
        let g = build_qc(1).unwrap();
        let src: Vec<Vec<Q>> = g.indices_of_degree(-2).iter().map(|&i| g.basis_vector(i)).collect();
        // sp(n) ⊕ nothing from sp(1) or E
        assert_eq!(g.centralizer_in_degree(0, &src).len(), 3);
    }
}
