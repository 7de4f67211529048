//! Lie algebra cohomology H*(g₋, g): the cochain complex, both codifferential
//! formulas, the Kostant Laplacian and its harmonic spaces.
//!
//! A basis cochain of C^n is a pair (t, v): t a strictly increasing n-tuple
//! of positions in the g₋ basis and v an index into the full basis of g. The
//! cochain e_t ⊗ e_v takes the value e_v on (e_{t_1}, …, e_{t_n}).
//!
//! The wedge picture Λⁿp₊ ⊗ g uses the same index set with e^{t_1} ∧ … ∧ e^{t_n}
//! ⊗ e_v. Translating the wedge boundary into the g₋ picture multiplies each
//! functional e_α* by [`WEDGE_SIGN`], i.e. e_α* ↔ −e^α.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_traits::{One, Zero};
use rand::Rng;

use crate::lie::{DualBasisPair, GradedLieAlgebra, LieError};
use crate::linalg::{svec_from_dense, Echelon, SAcc, SVec, SparseMatrix};
use crate::scalar::{q, qr, Q};

/// Sign s of the identification e_α* ↔ s·e^α between the two pictures.
pub const WEDGE_SIGN: i64 = -1;

#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    pub degree: usize,
    pub coeffs: Vec<Q>,
}

impl Cochain {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Cochain) -> Cochain {
        assert_eq!(self.degree, o.degree);
        Cochain { degree: self.degree, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, s: &Q) -> Cochain {
        Cochain { degree: self.degree, coeffs: self.coeffs.iter().map(|a| a * s).collect() }
    }

    pub fn sub(&self, o: &Cochain) -> Cochain {
        self.add(&o.scale(&q(-1)))
    }
}

/// One homogeneity block of ker □.
#[derive(Clone, Debug)]
pub struct HarmonicBlock {
    pub degree: usize,
    pub homogeneity: i32,
    pub block_dim: usize,
    pub dim: usize,
    pub basis: Vec<Vec<Q>>,
    pub contained_in_l2g0: bool,
}

#[derive(Clone, Debug)]
pub struct HarmonicReport {
    pub degree: usize,
    pub blocks: Vec<HarmonicBlock>,
}

impl HarmonicReport {
    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).sum()
    }

    pub fn dim_at(&self, l: i32) -> usize {
        self.blocks.iter().find(|b| b.homogeneity == l).map_or(0, |b| b.dim)
    }
}

#[derive(Clone, Debug)]
pub struct HodgeBlock {
    pub homogeneity: i32,
    pub block_dim: usize,
    pub im_d: usize,
    pub ker_box: usize,
    pub im_codiff: usize,
    pub stacked_rank: usize,
}

impl HodgeBlock {
    pub fn ok(&self) -> bool {
        self.im_d + self.ker_box + self.im_codiff == self.block_dim && self.stacked_rank == self.block_dim
    }
}

#[derive(Clone, Debug)]
pub struct HodgeReport {
    pub degree: usize,
    pub blocks: Vec<HodgeBlock>,
}

impl HodgeReport {
    pub fn ok(&self) -> bool {
        self.blocks.iter().all(|b| b.ok())
    }

    pub fn totals(&self) -> (usize, usize, usize, usize) {
        self.blocks.iter().fold((0, 0, 0, 0), |acc, b| {
            (acc.0 + b.block_dim, acc.1 + b.im_d, acc.2 + b.ker_box, acc.3 + b.im_codiff)
        })
    }
}

/// Sort a tuple, returning the permutation sign, or None on a repeated entry.
pub fn sort_with_sign(mut v: Vec<usize>) -> Option<(Vec<usize>, i64)> {
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, sign))
    }
}

fn increasing_tuples(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(start: usize, m: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for a in start..m {
            cur.push(a);
            rec(a + 1, m, n, cur, out);
            cur.pop();
        }
    }
    rec(0, m, n, &mut cur, &mut out);
    out
}

fn sign_of(k: usize) -> Q {
    if k.is_multiple_of(2) {
        q(1)
    } else {
        q(-1)
    }
}

pub struct KostantComplex<'a> {
    alg: &'a GradedLieAlgebra,
    minus: Vec<usize>,
    pos: Vec<Option<usize>>,
    duals: Vec<Vec<Q>>,
    /// [e^α, e_v] as sparse algebra coordinates.
    dual_ad: Vec<Vec<SVec>>,
    /// [e^a, e^b] expanded in the dual basis {e^m}, for a < b.
    dual_brackets: BTreeMap<(usize, usize), SVec>,
    tuples: Vec<Vec<Vec<usize>>>,
    index: Vec<BTreeMap<Vec<usize>, usize>>,
}

impl<'a> KostantComplex<'a> {
    pub fn new(alg: &'a GradedLieAlgebra) -> Result<Self, LieError> {
        let DualBasisPair { minus, plus } = alg.dual_basis()?;
        let mut pos = alloc::vec![None; alg.dim()];
        for (a, &i) in minus.iter().enumerate() {
            pos[i] = Some(a);
        }
        let dual_ad = plus
            .iter()
            .map(|z| (0..alg.dim()).map(|v| svec_from_dense(&alg.bracket(z, &alg.basis_vector(v)))).collect())
            .collect();
        let mut dual_brackets = BTreeMap::new();
        for a in 0..minus.len() {
            for b in (a + 1)..minus.len() {
                let br = alg.bracket(&plus[a], &plus[b]);
                let c: Vec<Q> = minus.iter().map(|&m| alg.killing(&alg.basis_vector(m), &br)).collect();
                dual_brackets.insert((a, b), svec_from_dense(&c));
            }
        }
        let mut tuples = Vec::new();
        let mut index = Vec::new();
        for n in 0..=3 {
            let t = increasing_tuples(minus.len(), n);
            index.push(t.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect());
            tuples.push(t);
        }
        Ok(KostantComplex { alg, minus, pos, duals: plus, dual_ad, dual_brackets, tuples, index })
    }

    pub fn algebra(&self) -> &GradedLieAlgebra {
        self.alg
    }

    pub fn minus(&self) -> &[usize] {
        &self.minus
    }

    /// e^α as algebra coordinates.
    pub fn dual(&self, a: usize) -> &[Q] {
        &self.duals[a]
    }

    pub fn tuples(&self, n: usize) -> &[Vec<usize>] {
        &self.tuples[n]
    }

    pub fn dim_cochains(&self, n: usize) -> usize {
        self.tuples[n].len() * self.alg.dim()
    }

    pub fn zero(&self, n: usize) -> Cochain {
        Cochain { degree: n, coeffs: alloc::vec![Q::zero(); self.dim_cochains(n)] }
    }

    pub fn basis_index(&self, t: &[usize], v: usize) -> usize {
        self.index[t.len()][t] * self.alg.dim() + v
    }

    /// (tuple, value index) of a basis cochain.
    pub fn basis_element(&self, n: usize, idx: usize) -> (&[usize], usize) {
        let d = self.alg.dim();
        (&self.tuples[n][idx / d], idx % d)
    }

    pub fn homogeneity(&self, n: usize, idx: usize) -> i32 {
        let (t, v) = self.basis_element(n, idx);
        self.alg.degree(v) - t.iter().map(|&a| self.alg.degree(self.minus[a])).sum::<i32>()
    }

    pub fn homogeneities(&self, n: usize) -> Vec<i32> {
        let s: BTreeSet<i32> = (0..self.dim_cochains(n)).map(|i| self.homogeneity(n, i)).collect();
        s.into_iter().collect()
    }

    pub fn block(&self, n: usize, l: i32) -> Vec<usize> {
        (0..self.dim_cochains(n)).filter(|&i| self.homogeneity(n, i) == l).collect()
    }

    pub fn homogeneous_parts(&self, phi: &Cochain) -> BTreeMap<i32, Cochain> {
        let mut out: BTreeMap<i32, Cochain> = BTreeMap::new();
        for (i, c) in phi.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let l = self.homogeneity(phi.degree, i);
            out.entry(l).or_insert_with(|| self.zero(phi.degree)).coeffs[i] = c.clone();
        }
        out
    }

    /// Cochain whose coefficients are small random integers, optionally
    /// restricted to one homogeneity.
    pub fn random_cochain<R: Rng>(&self, n: usize, l: Option<i32>, density: f64, rng: &mut R) -> Cochain {
        let mut c = self.zero(n);
        for i in 0..c.coeffs.len() {
            if l.is_some_and(|l| self.homogeneity(n, i) != l) {
                continue;
            }
            if rng.gen_bool(density) {
                c.coeffs[i] = q(rng.gen_range(-3..=3));
            }
        }
        c
    }

    fn value_of(&self, phi: &Cochain, t: &[usize]) -> Vec<Q> {
        let d = self.alg.dim();
        let mut out = alloc::vec![Q::zero(); d];
        if let Some((s, sign)) = sort_with_sign(t.to_vec()) {
            let base = self.index[t.len()][&s] * d;
            for v in 0..d {
                out[v] = &phi.coeffs[base + v] * q(sign);
            }
        }
        out
    }

    /// g₋ coordinates (positions α) of the g₋ component of x.
    pub fn minus_coords(&self, x: &[Q]) -> Vec<Q> {
        self.minus.iter().map(|&i| x[i].clone()).collect()
    }

    /// φ(x₁, …, x_n) for arbitrary x_i, using only their g₋ components.
    pub fn eval(&self, phi: &Cochain, args: &[&[Q]]) -> Vec<Q> {
        assert_eq!(args.len(), phi.degree);
        let coords: Vec<Vec<Q>> = args.iter().map(|x| self.minus_coords(x)).collect();
        let mut out = self.alg.zero();
        let m = self.minus.len();
        let mut idx = alloc::vec![0usize; phi.degree];
        loop {
            let mut w = Q::one();
            for (k, &a) in idx.iter().enumerate() {
                w *= &coords[k][a];
                if w.is_zero() {
                    break;
                }
            }
            if !w.is_zero() {
                for (o, v) in out.iter_mut().zip(self.value_of(phi, &idx)) {
                    *o += &w * v;
                }
            }
            let mut k = phi.degree;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < m {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    /// Matrix of ∂: C^n → C^{n+1}, n ≤ 2.
    pub fn differential_matrix(&self, n: usize) -> SparseMatrix {
        assert!(n <= 2);
        let d = self.alg.dim();
        let mut rows: Vec<SAcc> = (0..self.dim_cochains(n + 1)).map(|_| SAcc::new()).collect();
        for (ti, tt) in self.tuples[n + 1].iter().enumerate() {
            for i in 0..=n {
                let mut rest = tt.clone();
                let xi = rest.remove(i);
                let src = self.index[n][&rest] * d;
                let s = sign_of(i);
                for v in 0..d {
                    for (w, c) in self.alg.structure_constants(self.minus[xi], v) {
                        rows[ti * d + w].add(src + v, &s * c);
                    }
                }
            }
            for i in 0..=n {
                for j in (i + 1)..=n {
                    let s = sign_of(i + j);
                    for (m, c) in self.alg.structure_constants(self.minus[tt[i]], self.minus[tt[j]]) {
                        let a = self.pos[*m].expect("g_- is a subalgebra");
                        let mut args = alloc::vec![a];
                        args.extend(tt.iter().enumerate().filter(|&(k, _)| k != i && k != j).map(|(_, &x)| x));
                        if let Some((sorted, sg)) = sort_with_sign(args) {
                            let src = self.index[n][&sorted] * d;
                            let coef = &s * c * q(sg);
                            for v in 0..d {
                                rows[ti * d + v].add(src + v, coef.clone());
                            }
                        }
                    }
                }
            }
        }
        SparseMatrix {
            nrows: self.dim_cochains(n + 1),
            ncols: self.dim_cochains(n),
            rows: rows.into_iter().map(|r| r.finish()).collect(),
        }
    }

    /// Matrix of the boundary Λⁿp₊ ⊗ g → Λⁿ⁻¹p₊ ⊗ g in wedge coordinates:
    /// Z₁∧…∧Z_n ⊗ A ↦ Σ_i (−1)^i Z₁∧…Ẑ_i…∧Z_n ⊗ [Z_i, A]
    ///              + Σ_{i<j} (−1)^{i+j} [Z_i, Z_j]∧Z₁∧…Ẑ_i…Ẑ_j…∧Z_n ⊗ A,
    /// with i, j counted from 1.
    pub fn wedge_boundary_matrix(&self, n: usize) -> SparseMatrix {
        assert!((1..=3).contains(&n));
        let d = self.alg.dim();
        let mut rows: Vec<SAcc> = (0..self.dim_cochains(n - 1)).map(|_| SAcc::new()).collect();
        for (ti, tt) in self.tuples[n].iter().enumerate() {
            for i in 0..n {
                let mut rest = tt.clone();
                let zi = rest.remove(i);
                let dst = self.index[n - 1][&rest] * d;
                let s = sign_of(i + 1);
                for v in 0..d {
                    for (w, c) in &self.dual_ad[zi][v] {
                        rows[dst + w].add(ti * d + v, &s * c);
                    }
                }
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    let s = sign_of(i + j);
                    for (m, c) in &self.dual_brackets[&(tt[i], tt[j])] {
                        let mut args = alloc::vec![*m];
                        args.extend(tt.iter().enumerate().filter(|&(k, _)| k != i && k != j).map(|(_, &x)| x));
                        if let Some((sorted, sg)) = sort_with_sign(args) {
                            let dst = self.index[n - 1][&sorted] * d;
                            let coef = &s * c * q(sg);
                            for v in 0..d {
                                rows[dst + v].add(ti * d + v, coef.clone());
                            }
                        }
                    }
                }
            }
        }
        SparseMatrix {
            nrows: self.dim_cochains(n - 1),
            ncols: self.dim_cochains(n),
            rows: rows.into_iter().map(|r| r.finish()).collect(),
        }
    }

    /// δ*: C^n → C^{n−1} in the g₋ picture, n ∈ {1, 2, 3}.
    pub fn codifferential_matrix(&self, n: usize) -> SparseMatrix {
        let mut m = self.wedge_boundary_matrix(n);
        let s = q(WEDGE_SIGN);
        for r in &mut m.rows {
            for e in r.iter_mut() {
                e.1 *= &s;
            }
        }
        m
    }

    /// g₋-picture cochain to wedge coordinates.
    pub fn to_wedge(&self, phi: &Cochain) -> Cochain {
        phi.scale(&q(WEDGE_SIGN.pow(phi.degree as u32)))
    }

    pub fn from_wedge(&self, w: &Cochain) -> Cochain {
        w.scale(&q(WEDGE_SIGN.pow(w.degree as u32)))
    }

    fn apply(&self, m: &SparseMatrix, phi: &Cochain, degree: usize) -> Cochain {
        Cochain { degree, coeffs: m.apply(&phi.coeffs) }
    }

    pub fn differential(&self, phi: &Cochain) -> Cochain {
        self.apply(&self.differential_matrix(phi.degree), phi, phi.degree + 1)
    }

    /// δ* via the wedge picture.
    pub fn codifferential_wedge(&self, phi: &Cochain) -> Cochain {
        self.apply(&self.codifferential_matrix(phi.degree), phi, phi.degree - 1)
    }

    /// The two parts of δ* on C²: part1(X) = Σ_α [φ(X,e_α), e^α],
    /// part2(X) = Σ_α φ([X,e^α]₋, e_α), with δ* = part1 − ½ part2.
    pub fn codifferential_minus(&self, phi: &Cochain) -> (Cochain, Cochain) {
        assert_eq!(phi.degree, 2);
        let d = self.alg.dim();
        let mut p1 = self.zero(1);
        let mut p2 = self.zero(1);
        for b in 0..self.minus.len() {
            let x = self.alg.basis_vector(self.minus[b]);
            let (v1, v2) = self.codifferential_parts_at(phi, &x);
            p1.coeffs[b * d..(b + 1) * d].clone_from_slice(&v1);
            p2.coeffs[b * d..(b + 1) * d].clone_from_slice(&v2);
        }
        (p1, p2)
    }

    /// (part1(X), part2(X)) for any X; part1 sees only X₋, and the bracket in
    /// part2 is projected to g₋ before φ is applied.
    pub fn codifferential_parts_at(&self, phi: &Cochain, x: &[Q]) -> (Vec<Q>, Vec<Q>) {
        let mut p1 = self.alg.zero();
        let mut p2 = self.alg.zero();
        for a in 0..self.minus.len() {
            let ea = self.alg.basis_vector(self.minus[a]);
            let val = self.eval(phi, &[x, &ea]);
            if val.iter().any(|c| !c.is_zero()) {
                for (o, v) in p1.iter_mut().zip(self.alg.bracket(&val, &self.duals[a])) {
                    *o += v;
                }
            }
            let br = self.alg.minus_part(&self.alg.bracket(x, &self.duals[a]));
            if br.iter().any(|c| !c.is_zero()) {
                for (o, v) in p2.iter_mut().zip(self.eval(phi, &[&br, &ea])) {
                    *o += v;
                }
            }
        }
        (p1, p2)
    }

    /// Matrices of part1 and part2 as maps C² → C¹.
    pub fn codifferential_parts_matrices(&self) -> (SparseMatrix, SparseMatrix) {
        let d = self.alg.dim();
        let m = self.minus.len();
        // [e_β, e^α]₋ in g₋ positions
        let mut mixed: Vec<Vec<SVec>> = Vec::with_capacity(m);
        for b in 0..m {
            let eb = self.alg.basis_vector(self.minus[b]);
            mixed.push(
                (0..m)
                    .map(|a| svec_from_dense(&self.minus_coords(&self.alg.bracket(&eb, &self.duals[a]))))
                    .collect(),
            );
        }
        let mut r1: Vec<SAcc> = (0..self.dim_cochains(1)).map(|_| SAcc::new()).collect();
        let mut r2: Vec<SAcc> = (0..self.dim_cochains(1)).map(|_| SAcc::new()).collect();
        for (ti, tt) in self.tuples[2].iter().enumerate() {
            let (a, b) = (tt[0], tt[1]);
            for v in 0..d {
                let col = ti * d + v;
                for (w, c) in &self.dual_ad[b][v] {
                    r1[a * d + w].add(col, -c);
                }
                for (w, c) in &self.dual_ad[a][v] {
                    r1[b * d + w].add(col, c.clone());
                }
            }
            for beta in 0..m {
                let mut coef = Q::zero();
                if let Ok(p) = mixed[beta][b].binary_search_by_key(&a, |e| e.0) {
                    coef += &mixed[beta][b][p].1;
                }
                if let Ok(p) = mixed[beta][a].binary_search_by_key(&b, |e| e.0) {
                    coef -= &mixed[beta][a][p].1;
                }
                if !coef.is_zero() {
                    for v in 0..d {
                        r2[beta * d + v].add(ti * d + v, coef.clone());
                    }
                }
            }
        }
        let mk = |rows: Vec<SAcc>| SparseMatrix {
            nrows: self.dim_cochains(1),
            ncols: self.dim_cochains(2),
            rows: rows.into_iter().map(|r| r.finish()).collect(),
        };
        (mk(r1), mk(r2))
    }

    /// δ* φ evaluated at X by the two-part formula.
    pub fn codifferential_at(&self, phi: &Cochain, x: &[Q]) -> Vec<Q> {
        let (a, b) = self.codifferential_parts_at(phi, x);
        a.iter().zip(&b).map(|(u, v)| u - v * qr(1, 2)).collect()
    }

    /// [ , ] ⊗ id : Λ²p₊ ⊗ g → p₊ ⊗ g in wedge coordinates.
    pub fn bracket_tensor_id_matrix(&self) -> SparseMatrix {
        let d = self.alg.dim();
        let mut rows: Vec<SAcc> = (0..self.dim_cochains(1)).map(|_| SAcc::new()).collect();
        for (ti, tt) in self.tuples[2].iter().enumerate() {
            for (m, c) in &self.dual_brackets[&(tt[0], tt[1])] {
                for v in 0..d {
                    rows[m * d + v].add(ti * d + v, c.clone());
                }
            }
        }
        SparseMatrix {
            nrows: self.dim_cochains(1),
            ncols: self.dim_cochains(2),
            rows: rows.into_iter().map(|r| r.finish()).collect(),
        }
    }

    /// Apply [ , ] ⊗ id to a wedge-picture 2-cochain.
    pub fn bracket_tensor_id(&self, w: &Cochain) -> Cochain {
        self.apply(&self.bracket_tensor_id_matrix(), w, 1)
    }

    fn select_columns(m: &SparseMatrix, cols: &[usize]) -> SparseMatrix {
        let mut map = BTreeMap::new();
        for (k, &c) in cols.iter().enumerate() {
            map.insert(c, k);
        }
        SparseMatrix {
            nrows: m.nrows,
            ncols: cols.len(),
            rows: m
                .rows
                .iter()
                .map(|r| r.iter().filter_map(|(c, x)| map.get(c).map(|&k| (k, x.clone()))).collect())
                .collect(),
        }
    }

    fn select_rows(m: &SparseMatrix, rows: &[usize]) -> SparseMatrix {
        SparseMatrix { nrows: rows.len(), ncols: m.ncols, rows: rows.iter().map(|&r| m.rows[r].clone()).collect() }
    }

    /// □ = ∂δ* + δ*∂ restricted to the homogeneity-l block of C^n, in block
    /// coordinates.
    pub fn laplacian_block(&self, n: usize, l: i32) -> (Vec<usize>, SparseMatrix) {
        let ops = LaplacianOps::new(self, n);
        let blk = self.block(n, l);
        let m = ops.block(&blk);
        (blk, m)
    }

    pub fn harmonic_space(&self, n: usize, l: i32) -> HarmonicBlock {
        let ops = LaplacianOps::new(self, n);
        self.harmonic_with(&ops, n, l)
    }

    fn harmonic_with(&self, ops: &LaplacianOps, n: usize, l: i32) -> HarmonicBlock {
        let blk = self.block(n, l);
        let lap = ops.block(&blk);
        let ker = lap.kernel();
        let basis: Vec<Vec<Q>> = ker
            .into_iter()
            .map(|kv| {
                let mut v = alloc::vec![Q::zero(); self.dim_cochains(n)];
                for (k, x) in kv {
                    v[blk[k]] = x;
                }
                v
            })
            .collect();
        let contained = basis.iter().all(|v| {
            v.iter().enumerate().all(|(i, c)| c.is_zero() || self.in_l2g0(n, i))
        });
        HarmonicBlock { degree: n, homogeneity: l, block_dim: blk.len(), dim: basis.len(), basis, contained_in_l2g0: contained }
    }

    fn in_l2g0(&self, n: usize, i: usize) -> bool {
        let (t, v) = self.basis_element(n, i);
        self.alg.degree(v) == 0 && t.iter().all(|&a| self.alg.degree(self.minus[a]) == -1)
    }

    pub fn harmonic_report(&self, n: usize) -> HarmonicReport {
        self.harmonic_report_with(n, |_| {})
    }

    /// As `harmonic_report`, calling `done` after each block.
    pub fn harmonic_report_with(&self, n: usize, mut done: impl FnMut(&HarmonicBlock)) -> HarmonicReport {
        let ops = LaplacianOps::new(self, n);
        let mut blocks = Vec::new();
        for l in self.homogeneities(n) {
            let b = self.harmonic_with(&ops, n, l);
            done(&b);
            blocks.push(b);
        }
        HarmonicReport { degree: n, blocks }
    }

    /// im ∂ ⊕ ker □ ⊕ im δ* = C^n, checked per homogeneity block by ranks.
    pub fn hodge_check(&self, n: usize) -> HodgeReport {
        assert!((1..=2).contains(&n));
        let ops = LaplacianOps::new(self, n);
        let mut blocks = Vec::new();
        for l in self.homogeneities(n) {
            let blk = self.block(n, l);
            let mut local = BTreeMap::new();
            for (k, &i) in blk.iter().enumerate() {
                local.insert(i, k);
            }
            let to_local = |v: &SVec| -> SVec { v.iter().map(|(i, x)| (local[i], x.clone())).collect() };
            // image of ∂ from the same homogeneity in C^{n−1}
            let src = self.block(n - 1, l);
            let d_cols = Self::select_columns(&ops.d_prev, &src).transpose();
            let im_d: Vec<SVec> = d_cols.rows.iter().filter(|r| !r.is_empty()).map(&to_local).collect();
            let srcn = self.block(n + 1, l);
            let c_cols = Self::select_columns(&ops.codiff_next, &srcn).transpose();
            let im_c: Vec<SVec> = c_cols.rows.iter().filter(|r| !r.is_empty()).map(&to_local).collect();
            let ker = ops.block(&blk).kernel();
            let rank = |vs: &[SVec]| {
                let mut e = Echelon::new(blk.len());
                for v in vs {
                    e.insert(v);
                }
                e.rank()
            };
            let (r1, r2, r3) = (rank(&im_d), ker.len(), rank(&im_c));
            let mut all = im_d.clone();
            all.extend(ker);
            all.extend(im_c);
            blocks.push(HodgeBlock {
                homogeneity: l,
                block_dim: blk.len(),
                im_d: r1,
                ker_box: r2,
                im_codiff: r3,
                stacked_rank: rank(&all),
            });
        }
        HodgeReport { degree: n, blocks }
    }

    /// Basis of ker ∂ ∩ ker δ* on one homogeneity block of C^n.
    pub fn cocycle_cocycle_kernel(&self, n: usize, l: i32) -> Vec<SVec> {
        let ops = LaplacianOps::new(self, n);
        let blk = self.block(n, l);
        let a = Self::select_columns(&ops.d_n, &blk);
        let b = Self::select_columns(&ops.codiff_n, &blk);
        let rows: Vec<SVec> = a.rows.into_iter().chain(b.rows).filter(|r| !r.is_empty()).collect();
        crate::linalg::kernel_sparse(blk.len(), &rows)
    }
}

struct LaplacianOps {
    d_prev: SparseMatrix,
    codiff_n: SparseMatrix,
    d_n: SparseMatrix,
    codiff_next: SparseMatrix,
}

impl LaplacianOps {
    fn new(c: &KostantComplex<'_>, n: usize) -> Self {
        assert!((1..=2).contains(&n));
        LaplacianOps {
            d_prev: c.differential_matrix(n - 1),
            codiff_n: c.codifferential_matrix(n),
            d_n: c.differential_matrix(n),
            codiff_next: c.codifferential_matrix(n + 1),
        }
    }

    fn block(&self, blk: &[usize]) -> SparseMatrix {
        let a = KostantComplex::select_columns(&self.codiff_n, blk);
        let a = self.d_prev.mul(&a);
        let b = KostantComplex::select_columns(&self.d_n, blk);
        let b = self.codiff_next.mul(&b);
        let sum = a.add(&b);
        KostantComplex::select_rows(&sum, blk)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{build_co, build_qc};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn formulas_agree_qc1() {
        let g = build_qc(1).unwrap();
        let c = KostantComplex::new(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let phi = c.random_cochain(2, None, 0.05, &mut rng);
            let (p1, p2) = c.codifferential_minus(&phi);
            let gminus = p1.sub(&p2.scale(&qr(1, 2)));
            let wedge = c.codifferential_wedge(&phi);
            assert_eq!(gminus, wedge);
            let bt = c.from_wedge(&c.bracket_tensor_id(&c.to_wedge(&phi)));
            assert_eq!(p2, bt.scale(&q(2)));
            let (m1, m2) = c.codifferential_parts_matrices();
            assert_eq!(m1.apply(&phi.coeffs), p1.coeffs);
            assert_eq!(m2.apply(&phi.coeffs), p2.coeffs);
        }
    }

    #[test]
    fn squares_vanish() {
        let g = build_qc(1).unwrap();
        let c = KostantComplex::new(&g).unwrap();
        let d0 = c.differential_matrix(0);
        let d1 = c.differential_matrix(1);
        let d2 = c.differential_matrix(2);
        assert!(d1.mul(&d0).is_zero());
        assert!(d2.mul(&d1).is_zero());
        let c2 = c.codifferential_matrix(2);
        let c3 = c.codifferential_matrix(3);
        assert!(c.codifferential_matrix(1).mul(&c2).is_zero());
        assert!(c2.mul(&c3).is_zero());
    }

    #[test]
    fn harmonic_qc1() {
        let g = build_qc(1).unwrap();
        let c = KostantComplex::new(&g).unwrap();
        let h1 = c.harmonic_report(1);
        assert!(h1.blocks.iter().filter(|b| b.homogeneity >= 0).all(|b| b.dim == 0));
        let h2 = c.harmonic_report(2);
        assert!(h2.dim_at(1) > 0);
        assert!(c.hodge_check(1).ok());
        assert!(c.hodge_check(2).ok());
    }

    #[test]
    fn e_differential_sign() {
        let g = build_co(3, 1).unwrap();
        let c = KostantComplex::new(&g).unwrap();
        let e = Cochain { degree: 0, coeffs: g.grading_element().to_vec() };
        let de = c.differential(&e);
        let x = g.basis_vector(c.minus()[0]);
        let want: Vec<Q> = x.iter().map(|v| v * q(-g.degree(c.minus()[0]) as i64)).collect();
        assert_eq!(c.eval(&de, &[&x]), want);
    }
}

#[cfg(test)]
mod slow {
    use super::*;
    use crate::lie::build_qc;

    #[test]
    #[ignore]
    fn harmonic_qc2_timing() {
        let g = build_qc(2).unwrap();
        let c = KostantComplex::new(&g).unwrap();
        for l in c.homogeneities(2) {
            let t = std::time::Instant::now();
            let h = c.harmonic_space(2, l);
            std::println!("l={} block={} dim={} l2g0={} {:?}", l, h.block_dim, h.dim, h.contained_in_l2g0, t.elapsed());
        }
    }
}
