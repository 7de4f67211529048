//! Dense exact matrices and the realification maps ι_H, ι_C.
//!
//! Quaternionic matrices act on column vectors from the left; a column vector
//! is a right H-module coordinate. Every construction in the crate uses this
//! one convention.

use alloc::vec::Vec;

use crate::scalar::{Complex, Q, Quaternion, Scalar, ScalarKind};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: alloc::vec![T::zero_el(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one_el());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero_el())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.rows, o.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero_el() {
                    continue;
                }
                for c in 0..o.cols {
                    let b = o.get(k, c);
                    if b.is_zero_el() {
                        continue;
                    }
                    let v = out.get(r, c).add(&a.mul(b));
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|x| x.neg())
    }

    pub fn scale(&self, s: &Q) -> Self {
        self.map(|x| x.scale(s))
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn map_into<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    /// Entrywise conjugate.
    pub fn conj(&self) -> Self {
        self.map(|x| x.conj())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn trace(&self) -> T {
        let mut t = T::zero_el();
        for i in 0..self.rows.min(self.cols) {
            t = t.add(self.get(i, i));
        }
        t
    }

    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    /// Copy `block` into `self` with its top-left corner at (r0, c0).
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.get(r, c).clone());
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |r, c| self.get(r0 + r, c0 + c).clone())
    }
}

/// ι_H: U + jV ↦ [[U, −V̄], [V, Ū]].
pub fn realify_h(m: &Matrix<Quaternion>) -> Matrix<Complex> {
    let (n, k) = (m.rows, m.cols);
    let mut out = Matrix::<Complex>::zeros(2 * n, 2 * k);
    for r in 0..n {
        for c in 0..k {
            let (u, v) = m.get(r, c).split_uv();
            out.set(r, c, u.clone());
            out.set(r, k + c, v.conj().neg());
            out.set(n + r, c, v);
            out.set(n + r, k + c, u.conj());
        }
    }
    out
}

/// ι_C: A + iB ↦ [[A, −B], [B, A]].
pub fn realify_c(m: &Matrix<Complex>) -> Matrix<Q> {
    let (n, k) = (m.rows, m.cols);
    let mut out = Matrix::<Q>::zeros(2 * n, 2 * k);
    for r in 0..n {
        for c in 0..k {
            let z = m.get(r, c);
            out.set(r, c, z.re.clone());
            out.set(r, k + c, -&z.im);
            out.set(n + r, c, z.im.clone());
            out.set(n + r, k + c, z.re.clone());
        }
    }
    out
}

/// Matrix with entries of one homogeneous scalar kind.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactMatrix {
    Rational(Matrix<Q>),
    Complex(Matrix<Complex>),
    Quaternion(Matrix<Quaternion>),
}

impl ExactMatrix {
    pub fn kind(&self) -> ScalarKind {
        match self {
            ExactMatrix::Rational(_) => ScalarKind::Rational,
            ExactMatrix::Complex(_) => ScalarKind::Complex,
            ExactMatrix::Quaternion(_) => ScalarKind::Quaternion,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            ExactMatrix::Rational(m) => (m.rows, m.cols),
            ExactMatrix::Complex(m) => (m.rows, m.cols),
            ExactMatrix::Quaternion(m) => (m.rows, m.cols),
        }
    }

    /// Push down to a real matrix through ι_H and ι_C as needed.
    pub fn to_real(&self) -> Matrix<Q> {
        match self {
            ExactMatrix::Rational(m) => m.clone(),
            ExactMatrix::Complex(m) => realify_c(m),
            ExactMatrix::Quaternion(m) => realify_c(&realify_h(m)),
        }
    }
}
