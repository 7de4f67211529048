//! Truncated multivariate Taylor series ("jets") in f64.
//!
//! A jet stores the Taylor coefficients c_α = ∂^α f / α! at a point for all
//! multi-indices |α| ≤ order. Monomials are sorted by total degree, so a jet
//! of lower order is a prefix of the coefficient list. Differentiation lowers
//! the order by one; products keep the smaller order.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JetError {
    /// Reciprocal of a jet whose value vanishes.
    Pole { value: f64 },
    /// sqrt or ln outside its smooth domain.
    Branch { value: f64 },
}

impl fmt::Display for JetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JetError::Pole { value } => write!(f, "pole: reciprocal of {value}"),
            JetError::Branch { value } => write!(f, "branch point: argument {value}"),
        }
    }
}

impl core::error::Error for JetError {}

#[derive(Debug)]
pub struct JetSpace {
    nvars: usize,
    order: usize,
    monos: Vec<Vec<u8>>,
    // number of monomials of degree ≤ k, for k = 0..=order
    prefix: Vec<usize>,
    // (i, j, k): mono_i * mono_j = mono_k, sorted by degree of k
    mul: Vec<(u32, u32, u32)>,
    // mul entries with result degree ≤ k
    mul_prefix: Vec<usize>,
    deriv: Vec<Vec<(u32, u32, f64)>>,
    index: BTreeMap<Vec<u8>, usize>,
}

impl JetSpace {
    pub fn new(nvars: usize, order: usize) -> Arc<JetSpace> {
        let mut monos: Vec<Vec<u8>> = Vec::new();
        let mut prefix = Vec::new();
        for deg in 0..=order {
            let mut cur = alloc::vec![0u8; nvars];
            gen_degree(nvars, deg, 0, &mut cur, &mut monos);
            prefix.push(monos.len());
        }
        let index: BTreeMap<Vec<u8>, usize> =
            monos.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let degree = |m: &Vec<u8>| m.iter().map(|&e| e as usize).sum::<usize>();
        let mut mul = Vec::new();
        for (i, a) in monos.iter().enumerate() {
            let da = degree(a);
            for (j, b) in monos.iter().enumerate() {
                if da + degree(b) > order {
                    continue;
                }
                let s: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                mul.push((i as u32, j as u32, index[&s] as u32));
            }
        }
        mul.sort_by_key(|&(_, _, k)| (degree(&monos[k as usize]), k));
        let mut mul_prefix = alloc::vec![0usize; order + 1];
        for d in 0..=order {
            mul_prefix[d] = mul.iter().filter(|&&(_, _, k)| degree(&monos[k as usize]) <= d).count();
        }
        let mut deriv = Vec::with_capacity(nvars);
        for v in 0..nvars {
            let mut t = Vec::new();
            for (i, m) in monos.iter().enumerate() {
                if m[v] > 0 {
                    let mut d = m.clone();
                    d[v] -= 1;
                    t.push((i as u32, index[&d] as u32, m[v] as f64));
                }
            }
            deriv.push(t);
        }
        Arc::new(JetSpace { nvars, order, monos, prefix, mul, mul_prefix, deriv, index })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self, order: usize) -> usize {
        self.prefix[order]
    }

    pub fn monomial(&self, i: usize) -> &[u8] {
        &self.monos[i]
    }

    pub fn index_of(&self, alpha: &[u8]) -> Option<usize> {
        self.index.get(alpha).copied()
    }
}

fn gen_degree(nvars: usize, deg: usize, pos: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if pos + 1 == nvars || nvars == 0 {
        if nvars > 0 {
            cur[pos] = deg as u8;
            out.push(cur.clone());
            cur[pos] = 0;
        } else if deg == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for e in (0..=deg).rev() {
        cur[pos] = e as u8;
        gen_degree(nvars, deg - e, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

#[derive(Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    order: usize,
    c: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet").field("order", &self.order).field("c", &self.c).finish()
    }
}

impl Jet {
    pub fn constant(space: &Arc<JetSpace>, v: f64) -> Jet {
        let order = space.order;
        let mut c = alloc::vec![0.0; space.len(order)];
        c[0] = v;
        Jet { space: space.clone(), order, c }
    }

    pub fn zero(space: &Arc<JetSpace>, order: usize) -> Jet {
        let order = order.min(space.order);
        Jet { space: space.clone(), order, c: alloc::vec![0.0; space.len(order)] }
    }

    /// The coordinate function x_var expanded at `value`.
    pub fn variable(space: &Arc<JetSpace>, var: usize, value: f64) -> Jet {
        let mut j = Jet::constant(space, value);
        if space.order >= 1 {
            let mut e = alloc::vec![0u8; space.nvars];
            e[var] = 1;
            j.c[space.index[&e]] = 1.0;
        }
        j
    }

    pub fn from_coefficients(space: &Arc<JetSpace>, order: usize, c: Vec<f64>) -> Jet {
        assert_eq!(c.len(), space.len(order));
        Jet { space: space.clone(), order, c }
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    /// Taylor coefficient of the multi-index α (zero beyond the order).
    pub fn coefficient(&self, alpha: &[u8]) -> f64 {
        match self.space.index.get(alpha) {
            Some(&i) if i < self.c.len() => self.c[i],
            _ => 0.0,
        }
    }

    /// ∂^α f at the expansion point.
    pub fn partial(&self, alpha: &[u8]) -> f64 {
        let mut fact = 1.0;
        for &e in alpha {
            for k in 2..=e {
                fact *= k as f64;
            }
        }
        self.coefficient(alpha) * fact
    }

    /// First derivatives at the point.
    pub fn gradient(&self) -> Vec<f64> {
        (0..self.space.nvars)
            .map(|v| {
                let mut e = alloc::vec![0u8; self.space.nvars];
                e[v] = 1;
                self.coefficient(&e)
            })
            .collect()
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order);
        Jet { space: self.space.clone(), order, c: self.c[..self.space.len(order)].to_vec() }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet { space: self.space.clone(), order: self.order, c: self.c.iter().map(|x| x * s).collect() }
    }

    pub fn add_const(&self, s: f64) -> Jet {
        let mut j = self.clone();
        j.c[0] += s;
        j
    }

    /// ∂f/∂x_var, one order lower.
    pub fn deriv(&self, var: usize) -> Jet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let order = self.order - 1;
        let n = self.space.len(order);
        let mut c = alloc::vec![0.0; n];
        for &(src, dst, f) in &self.space.deriv[var] {
            let (src, dst) = (src as usize, dst as usize);
            if src < self.c.len() && dst < n {
                c[dst] += f * self.c[src];
            }
        }
        Jet { space: self.space.clone(), order, c }
    }

    fn binary(&self, o: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        let order = self.order.min(o.order);
        let n = self.space.len(order);
        let c = (0..n).map(|i| f(self.c[i], o.c[i])).collect();
        Jet { space: self.space.clone(), order, c }
    }

    pub fn mul_jet(&self, o: &Jet) -> Jet {
        let order = self.order.min(o.order);
        let n = self.space.len(order);
        let mut c = alloc::vec![0.0; n];
        for &(i, j, k) in &self.space.mul[..self.space.mul_prefix[order]] {
            let (a, b) = (self.c[i as usize], o.c[j as usize]);
            if a != 0.0 && b != 0.0 {
                c[k as usize] += a * b;
            }
        }
        Jet { space: self.space.clone(), order, c }
    }

    /// self += a·b, truncated to the smallest of the three orders.
    pub fn add_mul(&mut self, a: &Jet, b: &Jet) {
        let order = self.order.min(a.order).min(b.order);
        if order < self.order {
            self.c.truncate(self.space.len(order));
            self.order = order;
        }
        for &(i, j, k) in &self.space.mul[..self.space.mul_prefix[order]] {
            let (x, y) = (a.c[i as usize], b.c[j as usize]);
            if x != 0.0 && y != 0.0 {
                self.c[k as usize] += x * y;
            }
        }
    }

    /// self += s·a, truncated to the smaller order.
    pub fn add_scaled(&mut self, s: f64, a: &Jet) {
        let order = self.order.min(a.order);
        if order < self.order {
            self.c.truncate(self.space.len(order));
            self.order = order;
        }
        for (x, y) in self.c.iter_mut().zip(&a.c) {
            *x += s * y;
        }
    }

    /// Σ t_k (f − f(0))^k, the composition with a univariate Taylor polynomial.
    pub fn compose(&self, t: &[f64]) -> Jet {
        let mut h = self.clone();
        h.c[0] = 0.0;
        let d = self.order.min(t.len().saturating_sub(1));
        let mut r = Jet::constant(&self.space, t[d]).truncate(self.order);
        for k in (0..d).rev() {
            r = r.mul_jet(&h).add_const(t[k]);
        }
        r
    }

    pub fn recip(&self) -> Result<Jet, JetError> {
        let a = self.value();
        if a == 0.0 || !a.is_finite() {
            return Err(JetError::Pole { value: a });
        }
        let mut t = Vec::with_capacity(self.order + 1);
        let mut p = 1.0 / a;
        for _ in 0..=self.order {
            t.push(p);
            p *= -1.0 / a;
        }
        Ok(self.compose(&t))
    }

    pub fn div(&self, o: &Jet) -> Result<Jet, JetError> {
        Ok(self.mul_jet(&o.recip()?))
    }

    pub fn sqrt(&self) -> Result<Jet, JetError> {
        let a = self.value();
        if a <= 0.0 || !a.is_finite() {
            return Err(JetError::Branch { value: a });
        }
        let mut t = Vec::with_capacity(self.order + 1);
        let mut binom = 1.0;
        let mut pw = libm::sqrt(a);
        for k in 0..=self.order {
            t.push(binom * pw);
            binom *= (0.5 - k as f64) / (k as f64 + 1.0);
            pw /= a;
        }
        Ok(self.compose(&t))
    }

    pub fn exp(&self) -> Jet {
        let e = libm::exp(self.value());
        let mut t = Vec::with_capacity(self.order + 1);
        let mut f = 1.0;
        for k in 0..=self.order {
            if k > 0 {
                f *= k as f64;
            }
            t.push(e / f);
        }
        self.compose(&t)
    }

    pub fn ln(&self) -> Result<Jet, JetError> {
        let a = self.value();
        if a <= 0.0 || !a.is_finite() {
            return Err(JetError::Branch { value: a });
        }
        let mut t = alloc::vec![libm::log(a)];
        for k in 1..=self.order {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            t.push(sign / (k as f64 * libm::pow(a, k as f64)));
        }
        Ok(self.compose(&t))
    }

    fn trig(&self, phase: usize) -> Jet {
        let (s, c) = (libm::sin(self.value()), libm::cos(self.value()));
        let cycle = [s, c, -s, -c];
        let mut t = Vec::with_capacity(self.order + 1);
        let mut f = 1.0;
        for k in 0..=self.order {
            if k > 0 {
                f *= k as f64;
            }
            t.push(cycle[(k + phase) % 4] / f);
        }
        self.compose(&t)
    }

    pub fn sin(&self) -> Jet {
        self.trig(0)
    }

    pub fn cos(&self) -> Jet {
        self.trig(1)
    }

    pub fn powi(&self, n: u32) -> Jet {
        let mut r = Jet::constant(&self.space, 1.0).truncate(self.order);
        for _ in 0..n {
            r = r.mul_jet(self);
        }
        r
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        self.binary(o, |a, b| a + b)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        self.binary(o, |a, b| a - b)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        self.mul_jet(o)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

/// Expand a scalar field built from jet arithmetic at `point` to the given order.
pub fn jet_eval<F>(f: F, point: &[f64], order: usize) -> Result<Jet, JetError>
where
    F: Fn(&[Jet]) -> Result<Jet, JetError>,
{
    let space = JetSpace::new(point.len(), order);
    let vars: Vec<Jet> = point.iter().enumerate().map(|(i, &p)| Jet::variable(&space, i, p)).collect();
    f(&vars)
}

/// Coordinate jets x_i expanded at `point` in a shared space.
pub fn coordinate_jets(space: &Arc<JetSpace>, point: &[f64]) -> Vec<Jet> {
    point.iter().enumerate().map(|(i, &p)| Jet::variable(space, i, p)).collect()
}
