//! Exact linear algebra: sparse fraction-free elimination over Z, kernels,
//! ranks, coordinates in a basis, and small dense inverses.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::Matrix;
use crate::scalar::Q;

/// Sparse rational vector: strictly increasing indices, no stored zeros.
pub type SVec = Vec<(usize, Q)>;

pub fn svec_from_dense(v: &[Q]) -> SVec {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

pub fn svec_to_dense(v: &SVec, n: usize) -> Vec<Q> {
    let mut out = alloc::vec![Q::zero(); n];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

/// a + s·b
pub fn svec_axpy(a: &SVec, s: &Q, b: &SVec) -> SVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, s * &b[j].1));
            j += 1;
        } else {
            let v = &a[i].1 + s * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn svec_scale(a: &SVec, s: &Q) -> SVec {
    if s.is_zero() {
        return Vec::new();
    }
    a.iter().map(|(i, x)| (*i, x * s)).collect()
}

/// Accumulator for building sparse vectors out of many scattered terms.
#[derive(Default, Clone, Debug)]
pub struct SAcc(pub BTreeMap<usize, Q>);

impl SAcc {
    pub fn new() -> Self {
        SAcc(BTreeMap::new())
    }
    pub fn add(&mut self, i: usize, x: Q) {
        if x.is_zero() {
            return;
        }
        let e = self.0.entry(i).or_insert_with(Q::zero);
        *e += x;
    }
    pub fn add_svec(&mut self, s: &Q, v: &SVec) {
        for (i, x) in v {
            self.add(*i, s * x);
        }
    }
    pub fn finish(self) -> SVec {
        self.0.into_iter().filter(|(_, x)| !x.is_zero()).collect()
    }
}

#[derive(Clone, Debug)]
struct IRow {
    idx: Vec<usize>,
    val: Vec<BigInt>,
}

impl IRow {
    /// Clear denominators and divide out the content; leading entry positive.
    fn from_rational(v: &[(usize, Q)]) -> IRow {
        let mut l = BigInt::one();
        for (_, x) in v {
            if !x.is_zero() {
                l = l.lcm(x.denom());
            }
        }
        let mut idx = Vec::with_capacity(v.len());
        let mut val = Vec::with_capacity(v.len());
        for (i, x) in v {
            if !x.is_zero() {
                idx.push(*i);
                val.push(x.numer() * (&l / x.denom()));
            }
        }
        let mut r = IRow { idx, val };
        r.normalize();
        r
    }

    fn normalize(&mut self) {
        if self.val.is_empty() {
            return;
        }
        let mut g = BigInt::zero();
        for x in &self.val {
            g = g.gcd(x);
            if g.is_one() {
                break;
            }
        }
        if self.val[0].is_negative() {
            g = -g;
        }
        if !g.is_one() {
            for x in self.val.iter_mut() {
                *x = &*x / &g;
            }
        }
    }

    fn lead(&self) -> Option<usize> {
        self.idx.first().copied()
    }

    fn get(&self, col: usize) -> Option<&BigInt> {
        self.idx.binary_search(&col).ok().map(|p| &self.val[p])
    }

    /// self ← a·self − b·other
    fn combine(&mut self, a: &BigInt, b: &BigInt, other: &IRow) {
        let mut idx = Vec::with_capacity(self.idx.len() + other.idx.len());
        let mut val = Vec::with_capacity(self.idx.len() + other.idx.len());
        let (mut i, mut j) = (0, 0);
        while i < self.idx.len() || j < other.idx.len() {
            if j >= other.idx.len() || (i < self.idx.len() && self.idx[i] < other.idx[j]) {
                idx.push(self.idx[i]);
                val.push(a * &self.val[i]);
                i += 1;
            } else if i >= self.idx.len() || other.idx[j] < self.idx[i] {
                idx.push(other.idx[j]);
                val.push(-(b * &other.val[j]));
                j += 1;
            } else {
                let v = a * &self.val[i] - b * &other.val[j];
                if !v.is_zero() {
                    idx.push(self.idx[i]);
                    val.push(v);
                }
                i += 1;
                j += 1;
            }
        }
        self.idx = idx;
        self.val = val;
        self.normalize();
    }

    /// Eliminate column `col` of self using `piv` whose leading column is `col`.
    fn eliminate(&mut self, col: usize, piv: &IRow) {
        let b = match self.get(col) {
            Some(b) => b.clone(),
            None => return,
        };
        let a = &piv.val[0];
        let g = a.gcd(&b);
        let (a, b) = (a / &g, b / &g);
        self.combine(&a, &b, piv);
    }
}

/// Incremental row echelon form over Z with primitive rows.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<IRow>,
    pivots: BTreeMap<usize, usize>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, rows: Vec::new(), pivots: BTreeMap::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        self.pivots.keys().copied().collect()
    }

    fn reduce(&self, mut r: IRow) -> IRow {
        while let Some(c) = r.lead() {
            match self.pivots.get(&c) {
                Some(&p) => r.eliminate(c, &self.rows[p]),
                None => break,
            }
        }
        r
    }

    /// Add a row; returns whether it was independent of the rows so far.
    pub fn insert(&mut self, v: &[(usize, Q)]) -> bool {
        let r = self.reduce(IRow::from_rational(v));
        match r.lead() {
            Some(c) => {
                debug_assert!(c < self.ncols);
                self.pivots.insert(c, self.rows.len());
                self.rows.push(r);
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, v: &[(usize, Q)]) -> bool {
        self.reduce(IRow::from_rational(v)).lead().is_none()
    }

    /// Fully reduced rows (RREF up to row scaling), ordered by pivot column.
    fn rref(&self) -> Vec<IRow> {
        let order: Vec<(usize, usize)> = self.pivots.iter().map(|(c, r)| (*c, *r)).collect();
        let mut done: BTreeMap<usize, IRow> = BTreeMap::new();
        for &(c, r) in order.iter().rev() {
            let mut row = self.rows[r].clone();
            let cols: Vec<usize> = row.idx.iter().copied().filter(|k| *k > c && done.contains_key(k)).collect();
            for k in cols {
                let piv = &done[&k];
                row.eliminate(k, piv);
            }
            done.insert(c, row);
        }
        done.into_values().collect()
    }

    /// Basis of {x : R x = 0} where R is the row space collected so far.
    pub fn kernel(&self) -> Vec<SVec> {
        let rows = self.rref();
        let pivset: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(i, r)| (r.idx[0], i)).collect();
        // column -> rows mentioning it as a free entry
        let mut by_free: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, r) in rows.iter().enumerate() {
            for &k in &r.idx[1..] {
                by_free.entry(k).or_default().push(i);
            }
        }
        let mut out = Vec::new();
        for f in 0..self.ncols {
            if pivset.contains_key(&f) {
                continue;
            }
            let users = by_free.get(&f).cloned().unwrap_or_default();
            let mut d = BigInt::one();
            for &i in &users {
                d = d.lcm(&rows[i].val[0]);
            }
            let mut entries: Vec<(usize, BigInt)> = Vec::with_capacity(users.len() + 1);
            entries.push((f, d.clone()));
            for &i in &users {
                let r = &rows[i];
                let a = r.get(f).unwrap();
                entries.push((r.idx[0], -(a * &d) / &r.val[0]));
            }
            entries.sort_by_key(|e| e.0);
            let mut g = BigInt::zero();
            for (_, x) in &entries {
                g = g.gcd(x);
            }
            out.push(
                entries
                    .into_iter()
                    .map(|(i, x)| (i, Q::from_integer(x / &g)))
                    .collect(),
            );
        }
        out
    }
}

pub fn rank_of(ncols: usize, rows: &[SVec]) -> usize {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Null space of the system whose equations are `rows` (each a sparse row over `ncols` unknowns).
pub fn kernel_sparse(ncols: usize, rows: &[SVec]) -> Vec<SVec> {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert(r);
    }
    e.kernel()
}

/// Exact null-space basis of a rational matrix; empty iff the matrix is injective.
pub fn kernel_basis(m: &Matrix<Q>) -> Vec<Vec<Q>> {
    let rows: Vec<SVec> = (0..m.rows)
        .map(|r| svec_from_dense(&m.data[r * m.cols..(r + 1) * m.cols]))
        .collect();
    kernel_sparse(m.cols, &rows)
        .iter()
        .map(|v| svec_to_dense(v, m.cols))
        .collect()
}

pub fn rank(m: &Matrix<Q>) -> usize {
    let rows: Vec<SVec> = (0..m.rows)
        .map(|r| svec_from_dense(&m.data[r * m.cols..(r + 1) * m.cols]))
        .collect();
    rank_of(m.cols, &rows)
}

/// Gauss–Jordan inverse over Q.
pub fn inverse(m: &Matrix<Q>) -> Option<Matrix<Q>> {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    let mut a = m.clone();
    let mut inv = Matrix::<Q>::identity(n);
    for col in 0..n {
        let p = (col..n).find(|&r| !a.get(r, col).is_zero())?;
        if p != col {
            for c in 0..n {
                a.data.swap(p * n + c, col * n + c);
                inv.data.swap(p * n + c, col * n + c);
            }
        }
        let s = a.get(col, col).recip();
        for c in 0..n {
            let x = a.get(col, c) * &s;
            a.set(col, c, x);
            let y = inv.get(col, c) * &s;
            inv.set(col, c, y);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a.get(r, col).clone();
            if f.is_zero() {
                continue;
            }
            for c in 0..n {
                let x = a.get(r, c) - &f * a.get(col, c);
                a.set(r, c, x);
                let y = inv.get(r, c) - &f * inv.get(col, c);
                inv.set(r, c, y);
            }
        }
    }
    Some(inv)
}

/// Coordinates with respect to a fixed list of independent sparse vectors.
#[derive(Clone, Debug)]
pub struct Coordinatizer {
    dim: usize,
    basis: Vec<SVec>,
    // RREF rows normalised to leading 1, each with the combination of basis vectors producing it
    rows: Vec<(usize, SVec, SVec)>,
}

impl Coordinatizer {
    /// Panics if the vectors are dependent.
    pub fn new(basis: Vec<SVec>) -> Self {
        let dim = basis.len();
        let mut rows: Vec<(usize, SVec, SVec)> = Vec::new();
        for (k, b) in basis.iter().enumerate() {
            let mut v = b.clone();
            let mut t: SVec = alloc::vec![(k, Q::one())];
            for (c, rv, rt) in rows.iter() {
                if let Ok(p) = v.binary_search_by_key(c, |e| e.0) {
                    let s = -v[p].1.clone();
                    v = svec_axpy(&v, &s, rv);
                    t = svec_axpy(&t, &s, rt);
                }
            }
            let (lead, lv) = match v.first() {
                Some((c, x)) => (*c, x.clone()),
                None => panic!("dependent basis vector {}", k),
            };
            let inv = lv.recip();
            let v = svec_scale(&v, &inv);
            let t = svec_scale(&t, &inv);
            for (_, rv, rt) in rows.iter_mut() {
                if let Ok(p) = rv.binary_search_by_key(&lead, |e| e.0) {
                    let s = -rv[p].1.clone();
                    *rv = svec_axpy(rv, &s, &v);
                    *rt = svec_axpy(rt, &s, &t);
                }
            }
            rows.push((lead, v, t));
        }
        Coordinatizer { dim, basis, rows }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coordinates of `v`, or None if `v` is outside the span.
    pub fn coords(&self, v: &SVec) -> Option<Vec<Q>> {
        let mut acc = SAcc::new();
        for (c, _, t) in &self.rows {
            if let Ok(p) = v.binary_search_by_key(c, |e| e.0) {
                acc.add_svec(&v[p].1, t);
            }
        }
        let coords = svec_to_dense(&acc.finish(), self.dim);
        let mut rec = SAcc::new();
        for (k, x) in coords.iter().enumerate() {
            if !x.is_zero() {
                rec.add_svec(x, &self.basis[k]);
            }
        }
        if rec.finish() == *v {
            Some(coords)
        } else {
            None
        }
    }
}

/// Sparse matrix stored by rows.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub rows: Vec<SVec>,
}

impl SparseMatrix {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        SparseMatrix { nrows, ncols, rows: alloc::vec![Vec::new(); nrows] }
    }

    pub fn from_columns(nrows: usize, cols: &[SVec]) -> Self {
        let mut rows: Vec<SVec> = alloc::vec![Vec::new(); nrows];
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c {
                rows[*i].push((j, x.clone()));
            }
        }
        SparseMatrix { nrows, ncols: cols.len(), rows }
    }

    /// Rows of `self` followed by rows of `o`.
    pub fn stack(&self, o: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols, o.ncols);
        let mut rows = self.rows.clone();
        rows.extend(o.rows.iter().cloned());
        SparseMatrix { nrows: self.nrows + o.nrows, ncols: self.ncols, rows }
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        self.rows
            .iter()
            .map(|r| {
                let mut s = Q::zero();
                for (j, x) in r {
                    if !v[*j].is_zero() {
                        s += x * &v[*j];
                    }
                }
                s
            })
            .collect()
    }

    pub fn apply_sparse(&self, v: &SVec) -> SVec {
        let dense = svec_to_dense(v, self.ncols);
        svec_from_dense(&self.apply(&dense))
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut cols: Vec<SVec> = alloc::vec![Vec::new(); self.ncols];
        for (i, r) in self.rows.iter().enumerate() {
            for (j, x) in r {
                cols[*j].push((i, x.clone()));
            }
        }
        SparseMatrix { nrows: self.ncols, ncols: self.nrows, rows: cols }
    }

    pub fn mul(&self, o: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols, o.nrows);
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut acc = SAcc::new();
                for (k, x) in r {
                    acc.add_svec(x, &o.rows[*k]);
                }
                acc.finish()
            })
            .collect();
        SparseMatrix { nrows: self.nrows, ncols: o.ncols, rows }
    }

    pub fn add(&self, o: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.nrows, self.ncols), (o.nrows, o.ncols));
        let rows = self.rows.iter().zip(&o.rows).map(|(a, b)| svec_axpy(a, &Q::one(), b)).collect();
        SparseMatrix { nrows: self.nrows, ncols: self.ncols, rows }
    }

    /// Restriction to the given row and column index sets (in the given order).
    /// Returns None if an entry would be dropped from a kept row.
    pub fn restrict(&self, row_ids: &[usize], col_ids: &[usize]) -> Option<SparseMatrix> {
        let mut pos = BTreeMap::new();
        for (k, c) in col_ids.iter().enumerate() {
            pos.insert(*c, k);
        }
        let mut rows = Vec::with_capacity(row_ids.len());
        for &r in row_ids {
            let mut out = Vec::new();
            for (j, x) in &self.rows[r] {
                out.push((*pos.get(j)?, x.clone()));
            }
            out.sort_by_key(|e| e.0);
            rows.push(out);
        }
        Some(SparseMatrix { nrows: row_ids.len(), ncols: col_ids.len(), rows })
    }

    pub fn rank(&self) -> usize {
        rank_of(self.ncols, &self.rows)
    }

    pub fn kernel(&self) -> Vec<SVec> {
        kernel_sparse(self.ncols, &self.rows)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }
}
