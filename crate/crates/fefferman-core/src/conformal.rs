//! Pseudo-Riemannian and conformal tensor calculus on coordinate charts,
//! evaluated pointwise through jets.
//!
//! Conventions, in one place:
//!
//! * R^a_{bcd} = ∂_cΓ^a_{db} − ∂_dΓ^a_{cb} + Γ^a_{ce}Γ^e_{db} − Γ^a_{de}Γ^e_{cb}, the
//!   components of R(∂_c, ∂_d)∂_b; R_{abcd} = f_{ae}R^e_{bcd}; Ric_{bd} = R^a_{bad}.
//! * P solves Ric + (m−2)P + tr(P)f = 0, so the unit sphere has P = −f/2.
//! * W = R + P ⊙ f with (h ⊙ f)_{abcd} = h_{ac}f_{bd} + h_{bd}f_{ac} − h_{ad}f_{bc} − h_{bc}f_{ad};
//!   W(u,v,w,x) = W_{abcd}u^a v^b w^c x^d.
//! * Cot(u,v,w) = (∇_vP)(u,w) − (∇_uP)(v,w).
//! * (a ∧ b)(x) = f(b,x)a − f(a,x)b.
//! * For a vector field k: α = (1/m) div k, K_{ab} = ½(∂_a k_b − ∂_b k_a) with
//!   K(u)_b = u^a K_{ab}, and γ = P(k) − dα.
//!
//! Flat index layout: a rank-r tensor with all indices in 0..m is stored
//! row-major, first index slowest.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::jet::{coordinate_jets, Jet, JetError, JetSpace};

pub type FieldFn = Arc<dyn Fn(&[Jet]) -> Result<Vec<Jet>, JetError> + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(&[Jet]) -> Result<Jet, JetError> + Send + Sync>;

/// Jet order used for metrics and vector fields: enough for ∇W, ∇P, ∇γ and ∇K.
pub const JET_ORDER: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum ConformalError {
    Jet(JetError),
    Degenerate { det: f64 },
    Signature { expected: (usize, usize), found: (usize, usize) },
    DegenerateFrame,
    NotConformalKilling { residual: f64 },
    Precondition(String),
    Shape { expected: usize, found: usize },
    Dimension(usize),
    Sampling { wanted: usize, found: usize },
}

impl fmt::Display for ConformalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConformalError::Jet(e) => write!(f, "jet evaluation failed: {e}"),
            ConformalError::Degenerate { det } => write!(f, "degenerate metric: |det| = {det:e}"),
            ConformalError::Signature { expected, found } => {
                write!(f, "signature {found:?}, expected {expected:?}")
            }
            ConformalError::DegenerateFrame => write!(f, "no pseudo-orthonormal frame: degenerate pivot"),
            ConformalError::NotConformalKilling { residual } => {
                write!(f, "not a conformal Killing field: residual {residual:e}")
            }
            ConformalError::Precondition(c) => write!(f, "precondition violated: {c}"),
            ConformalError::Shape { expected, found } => {
                write!(f, "field has {found} components, expected {expected}")
            }
            ConformalError::Dimension(m) => write!(f, "dimension {m} too small for conformal curvature"),
            ConformalError::Sampling { wanted, found } => {
                write!(f, "only {found} of {wanted} sample points usable")
            }
        }
    }
}

impl core::error::Error for ConformalError {}

impl From<JetError> for ConformalError {
    fn from(e: JetError) -> Self {
        ConformalError::Jet(e)
    }
}

// ---------------------------------------------------------------------------
// domains, fields, charts

#[derive(Clone, Debug)]
pub enum Domain {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    /// Cartesian product over consecutive coordinate blocks.
    Product(Vec<Domain>),
    /// Image of `base` under the linear map y = map·x.
    Linear { base: Box<Domain>, map: Vec<f64> },
}

impl Domain {
    pub fn cube(dim: usize, half_width: f64) -> Domain {
        Domain::Box { lo: alloc::vec![-half_width; dim], hi: alloc::vec![half_width; dim] }
    }

    pub fn ball(dim: usize, radius: f64) -> Domain {
        Domain::Ball { center: alloc::vec![0.0; dim], radius }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Box { lo, .. } => lo.len(),
            Domain::Ball { center, .. } => center.len(),
            Domain::Product(parts) => parts.iter().map(Domain::dim).sum(),
            Domain::Linear { base, .. } => base.dim(),
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            Domain::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| rng.gen_range(*a..*b)).collect(),
            Domain::Ball { center, radius } => {
                let d = center.len();
                let dir: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let norm = libm::sqrt(dir.iter().map(|x| x * x).sum::<f64>()).max(1e-300);
                let r = radius * libm::pow(rng.gen::<f64>(), 1.0 / d as f64);
                center.iter().zip(&dir).map(|(c, x)| c + r * x / norm).collect()
            }
            Domain::Product(parts) => parts.iter().flat_map(|p| p.sample(rng)).collect(),
            Domain::Linear { base, map } => mat_vec(map, &base.sample(rng)),
        }
    }
}

#[derive(Clone)]
pub struct ScalarField {
    pub label: String,
    f: ScalarFn,
}

impl ScalarField {
    pub fn new(label: impl Into<String>, f: impl Fn(&[Jet]) -> Result<Jet, JetError> + Send + Sync + 'static) -> Self {
        ScalarField { label: label.into(), f: Arc::new(f) }
    }

    pub fn eval(&self, x: &[Jet]) -> Result<Jet, JetError> {
        (self.f)(x)
    }

    pub fn at(&self, point: &[f64]) -> Result<f64, JetError> {
        let space = JetSpace::new(point.len(), 0);
        Ok(self.eval(&coordinate_jets(&space, point))?.value())
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarField({})", self.label)
    }
}

#[derive(Clone)]
pub struct VectorFieldOnChart {
    pub label: String,
    components: FieldFn,
}

impl VectorFieldOnChart {
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(&[Jet]) -> Result<Vec<Jet>, JetError> + Send + Sync + 'static,
    ) -> Self {
        VectorFieldOnChart { label: label.into(), components: Arc::new(f) }
    }

    pub fn eval(&self, x: &[Jet]) -> Result<Vec<Jet>, ConformalError> {
        let v = (self.components)(x)?;
        if v.len() != x.len() {
            return Err(ConformalError::Shape { expected: x.len(), found: v.len() });
        }
        Ok(v)
    }

    pub fn at(&self, point: &[f64]) -> Result<Vec<f64>, ConformalError> {
        let space = JetSpace::new(point.len(), 0);
        Ok(self.eval(&coordinate_jets(&space, point))?.iter().map(Jet::value).collect())
    }

    pub fn scaled(&self, s: f64) -> Self {
        let inner = self.components.clone();
        VectorFieldOnChart {
            label: format!("{}·{}", s, self.label),
            components: Arc::new(move |x| Ok(inner(x)?.iter().map(|c| c.scale(s)).collect())),
        }
    }

    /// The same field in coordinates y with x = A·y.
    pub fn linear_pullback(&self, a: &[f64]) -> Self {
        let m = libm::sqrt(a.len() as f64) as usize;
        let ainv = invert(a, m).expect("singular coordinate change");
        let a = a.to_vec();
        let inner = self.components.clone();
        VectorFieldOnChart {
            label: format!("{} (linear chart)", self.label),
            components: Arc::new(move |y| {
                let x = linear_jets(&a, y);
                let k = inner(&x)?;
                Ok(linear_jets(&ainv, &k))
            }),
        }
    }
}

impl fmt::Debug for VectorFieldOnChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorFieldOnChart({})", self.label)
    }
}

#[derive(Clone)]
pub struct MetricChart {
    pub label: String,
    pub dim: usize,
    pub signature: (usize, usize),
    pub domain: Domain,
    metric: FieldFn,
}

impl fmt::Debug for MetricChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricChart")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("signature", &self.signature)
            .finish()
    }
}

impl MetricChart {
    /// `metric` returns the m×m symmetric matrix of jets, row-major.
    pub fn new(
        label: impl Into<String>,
        signature: (usize, usize),
        domain: Domain,
        metric: impl Fn(&[Jet]) -> Result<Vec<Jet>, JetError> + Send + Sync + 'static,
    ) -> Self {
        let dim = signature.0 + signature.1;
        assert_eq!(domain.dim(), dim, "domain dimension differs from signature");
        MetricChart { label: label.into(), dim, signature, domain, metric: Arc::new(metric) }
    }

    pub fn metric_jets(&self, x: &[Jet]) -> Result<Vec<Jet>, ConformalError> {
        let g = (self.metric)(x)?;
        if g.len() != self.dim * self.dim {
            return Err(ConformalError::Shape { expected: self.dim * self.dim, found: g.len() });
        }
        Ok(g)
    }

    pub fn metric_at(&self, point: &[f64]) -> Result<Vec<f64>, ConformalError> {
        let space = JetSpace::new(self.dim, 0);
        Ok(self.metric_jets(&coordinate_jets(&space, point))?.iter().map(Jet::value).collect())
    }

    pub fn signature_at(&self, point: &[f64]) -> Result<(usize, usize), ConformalError> {
        let g = self.metric_at(point)?;
        let det = determinant(&g, self.dim);
        if det.abs() < 1e-12 {
            return Err(ConformalError::Degenerate { det });
        }
        Ok(inertia(&g, self.dim, 1e-10))
    }

    pub fn check_signature(&self, point: &[f64]) -> Result<(), ConformalError> {
        let found = self.signature_at(point)?;
        if found != self.signature {
            return Err(ConformalError::Signature { expected: self.signature, found });
        }
        Ok(())
    }

    /// Seeded sample points; a draw whose metric cannot be evaluated or has
    /// no pseudo-orthonormal frame is replaced by a fresh draw.
    pub fn sample_points(&self, seed: u64, count: usize) -> Result<Vec<Vec<f64>>, ConformalError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0;
        while out.len() < count && attempts < 50 * count + 50 {
            attempts += 1;
            let p = self.domain.sample(&mut rng);
            let ok = self.metric_at(&p).is_ok_and(|g| {
                g.iter().all(|x| x.is_finite()) && pseudo_orthonormal_frame(&g, self.dim).is_ok()
            });
            if ok {
                out.push(p);
            }
        }
        if out.len() < count {
            return Err(ConformalError::Sampling { wanted: count, found: out.len() });
        }
        Ok(out)
    }

    /// e^{2φ}·f.
    pub fn rescaled(&self, phi: &ScalarField) -> MetricChart {
        let inner = self.metric.clone();
        let phi = phi.clone();
        MetricChart {
            label: format!("exp(2·{})·{}", phi.label, self.label),
            dim: self.dim,
            signature: self.signature,
            domain: self.domain.clone(),
            metric: Arc::new(move |x| {
                let w = phi.eval(x)?.scale(2.0).exp();
                Ok(inner(x)?.iter().map(|g| g * &w).collect())
            }),
        }
    }

    /// The same metric in coordinates y with x = A·y.
    pub fn linear_pullback(&self, a: &[f64]) -> MetricChart {
        let m = self.dim;
        assert_eq!(a.len(), m * m);
        let ainv = invert(a, m).expect("singular coordinate change");
        let a_owned = a.to_vec();
        let inner = self.metric.clone();
        MetricChart {
            label: format!("{} (linear chart)", self.label),
            dim: m,
            signature: self.signature,
            domain: Domain::Linear { base: Box::new(self.domain.clone()), map: ainv },
            metric: Arc::new(move |y| {
                let x = linear_jets(&a_owned, y);
                let g = inner(&x)?;
                let space = y[0].space().clone();
                let mut out = Vec::with_capacity(m * m);
                for i in 0..m {
                    for j in 0..m {
                        let mut s = Jet::zero(&space, y[0].order());
                        for k in 0..m {
                            for l in 0..m {
                                let c = a_owned[k * m + i] * a_owned[l * m + j];
                                if c != 0.0 {
                                    s.add_scaled(c, &g[k * m + l]);
                                }
                            }
                        }
                        out.push(s);
                    }
                }
                Ok(out)
            }),
        }
    }
}

fn linear_jets(a: &[f64], x: &[Jet]) -> Vec<Jet> {
    let m = x.len();
    let order = x.iter().map(Jet::order).min().unwrap_or(0);
    (0..m)
        .map(|i| {
            let mut s = Jet::zero(x[0].space(), order);
            for j in 0..m {
                if a[i * m + j] != 0.0 {
                    s.add_scaled(a[i * m + j], &x[j]);
                }
            }
            s
        })
        .collect()
}

// ---------------------------------------------------------------------------
// small dense f64 helpers

fn mat_vec(a: &[f64], x: &[f64]) -> Vec<f64> {
    let m = x.len();
    (0..a.len() / m).map(|i| (0..m).map(|j| a[i * m + j] * x[j]).sum()).collect()
}

pub fn determinant(a: &[f64], m: usize) -> f64 {
    let mut a = a.to_vec();
    let mut det = 1.0;
    for c in 0..m {
        let p = (c..m).max_by(|&i, &j| a[i * m + c].abs().total_cmp(&a[j * m + c].abs())).unwrap();
        if a[p * m + c] == 0.0 {
            return 0.0;
        }
        if p != c {
            for k in 0..m {
                a.swap(p * m + k, c * m + k);
            }
            det = -det;
        }
        let piv = a[c * m + c];
        det *= piv;
        for r in c + 1..m {
            let f = a[r * m + c] / piv;
            if f != 0.0 {
                for k in c..m {
                    a[r * m + k] -= f * a[c * m + k];
                }
            }
        }
    }
    det
}

pub fn invert(a: &[f64], m: usize) -> Option<Vec<f64>> {
    let mut a = a.to_vec();
    let mut inv = alloc::vec![0.0; m * m];
    for i in 0..m {
        inv[i * m + i] = 1.0;
    }
    for c in 0..m {
        let p = (c..m).max_by(|&i, &j| a[i * m + c].abs().total_cmp(&a[j * m + c].abs()))?;
        if a[p * m + c].abs() < 1e-300 {
            return None;
        }
        for k in 0..m {
            a.swap(p * m + k, c * m + k);
            inv.swap(p * m + k, c * m + k);
        }
        let piv = a[c * m + c];
        for k in 0..m {
            a[c * m + k] /= piv;
            inv[c * m + k] /= piv;
        }
        for r in 0..m {
            if r != c {
                let f = a[r * m + c];
                if f != 0.0 {
                    for k in 0..m {
                        a[r * m + k] -= f * a[c * m + k];
                        inv[r * m + k] -= f * inv[c * m + k];
                    }
                }
            }
        }
    }
    Some(inv)
}

/// Characteristic polynomial coefficients c_0..c_m (c_m = 1) by Faddeev–LeVerrier.
pub fn characteristic_polynomial(a: &[f64], m: usize) -> Vec<f64> {
    let mut c = alloc::vec![0.0; m + 1];
    c[m] = 1.0;
    let mut mk = alloc::vec![0.0; m * m];
    for k in 1..=m {
        // M_k = A·M_{k−1} + c_{m−k+1}·I
        let mut next = alloc::vec![0.0; m * m];
        for i in 0..m {
            for l in 0..m {
                let a_il = a[i * m + l];
                if a_il != 0.0 {
                    for j in 0..m {
                        next[i * m + j] += a_il * mk[l * m + j];
                    }
                }
            }
            next[i * m + i] += c[m - k + 1];
        }
        mk = next;
        let mut tr = 0.0;
        for i in 0..m {
            for l in 0..m {
                tr += a[i * m + l] * mk[l * m + i];
            }
        }
        c[m - k] = -tr / k as f64;
    }
    c
}

/// (positive, negative) eigenvalue counts of a symmetric matrix from the sign
/// changes of its characteristic polynomial (Descartes' rule is exact for
/// real-rooted polynomials). Coefficients below `tol` relative to the
/// largest one count as zero.
pub fn inertia(g: &[f64], m: usize, tol: f64) -> (usize, usize) {
    let scale = g.iter().fold(0.0f64, |s, x| s.max(x.abs())).max(1e-300);
    let a: Vec<f64> = g.iter().map(|x| x / scale).collect();
    let c = characteristic_polynomial(&a, m);
    let big = c.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    let changes = |flip: bool| {
        let mut last = 0.0f64;
        let mut n = 0;
        for (i, &x) in c.iter().enumerate() {
            if x.abs() <= tol * big {
                continue;
            }
            let x = if flip && i % 2 == 1 { -x } else { x };
            if last != 0.0 && (x > 0.0) != (last > 0.0) {
                n += 1;
            }
            last = x;
        }
        n
    };
    (changes(false), changes(true))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub vectors: Vec<Vec<f64>>,
    pub eps: Vec<f64>,
}

impl Frame {
    pub fn signature(&self) -> (usize, usize) {
        let p = self.eps.iter().filter(|&&e| e > 0.0).count();
        (p, self.eps.len() - p)
    }
}

fn bilinear(g: &[f64], u: &[f64], v: &[f64]) -> f64 {
    let m = u.len();
    let mut s = 0.0;
    for a in 0..m {
        if u[a] == 0.0 {
            continue;
        }
        for b in 0..m {
            s += g[a * m + b] * u[a] * v[b];
        }
    }
    s
}

/// Gram–Schmidt on the coordinate frame, pivoting on |f(v,v)| > 1e−8.
pub fn pseudo_orthonormal_frame(g: &[f64], m: usize) -> Result<Frame, ConformalError> {
    let mut pool: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut e = alloc::vec![0.0; m];
            e[i] = 1.0;
            e
        })
        .collect();
    let mut vectors = Vec::with_capacity(m);
    let mut eps = Vec::with_capacity(m);
    for _ in 0..m {
        let (best, norm) = pool
            .iter()
            .enumerate()
            .map(|(i, v)| (i, bilinear(g, v, v)))
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .ok_or(ConformalError::DegenerateFrame)?;
        if norm.abs() <= 1e-8 {
            return Err(ConformalError::DegenerateFrame);
        }
        let e = norm.signum();
        let s = 1.0 / libm::sqrt(norm.abs());
        let v: Vec<f64> = pool.swap_remove(best).iter().map(|x| x * s).collect();
        for w in pool.iter_mut() {
            let c = e * bilinear(g, &v, w);
            for (wi, vi) in w.iter_mut().zip(&v) {
                *wi -= c * vi;
            }
        }
        vectors.push(v);
        eps.push(e);
    }
    Ok(Frame { vectors, eps })
}

// ---------------------------------------------------------------------------
// jet matrix helpers

pub fn jet_inverse(a: &[Jet], m: usize) -> Result<Vec<Jet>, ConformalError> {
    let space = a[0].space().clone();
    let order = a.iter().map(Jet::order).min().unwrap();
    let mut a: Vec<Jet> = a.to_vec();
    let mut inv: Vec<Jet> = (0..m * m)
        .map(|i| {
            let mut z = Jet::zero(&space, order);
            if i / m == i % m {
                z = z.add_const(1.0);
            }
            z
        })
        .collect();
    for c in 0..m {
        let p = (c..m).max_by(|&i, &j| a[i * m + c].value().abs().total_cmp(&a[j * m + c].value().abs())).unwrap();
        for k in 0..m {
            a.swap(p * m + k, c * m + k);
            inv.swap(p * m + k, c * m + k);
        }
        let r = a[c * m + c].recip()?;
        for k in 0..m {
            a[c * m + k] = &a[c * m + k] * &r;
            inv[c * m + k] = &inv[c * m + k] * &r;
        }
        for row in 0..m {
            if row == c {
                continue;
            }
            let f = a[row * m + c].clone();
            if f.max_abs() == 0.0 {
                continue;
            }
            let f = -&f;
            for k in 0..m {
                let (pa, pi) = (a[c * m + k].clone(), inv[c * m + k].clone());
                a[row * m + k].add_mul(&f, &pa);
                inv[row * m + k].add_mul(&f, &pi);
            }
        }
    }
    Ok(inv)
}

fn values(j: &[Jet]) -> Vec<f64> {
    j.iter().map(Jet::value).collect()
}

pub fn max_abs_of(v: &[f64]) -> f64 {
    max_abs(v)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |s, x| s.max(x.abs()))
}

// ---------------------------------------------------------------------------
// curvature at a point

/// Metric jets and curvature jets at one point of a chart.
pub struct PointGeometry {
    pub m: usize,
    pub point: Vec<f64>,
    pub frame: Frame,
    x: Vec<Jet>,
    g: Vec<Jet>,
    ginv: Vec<Jet>,
    gamma: Vec<Jet>,
    riem: Vec<Jet>,
    riem_low: Vec<Jet>,
    ric: Vec<Jet>,
    scal: Jet,
    schouten: Vec<Jet>,
    weyl: Vec<Jet>,
    gv: Vec<f64>,
    ginv_v: Vec<f64>,
    gamma_v: Vec<f64>,
    schouten_v: Vec<f64>,
    nabla_p: Vec<f64>,
}

impl PointGeometry {
    pub fn new(chart: &MetricChart, point: &[f64]) -> Result<Self, ConformalError> {
        let space = JetSpace::new(chart.dim, JET_ORDER);
        Self::with_space(chart, &space, point)
    }

    /// As [`PointGeometry::new`], reusing a jet space of order ≥ 3 in `chart.dim` variables.
    pub fn with_space(chart: &MetricChart, space: &Arc<JetSpace>, point: &[f64]) -> Result<Self, ConformalError> {
        let m = chart.dim;
        if m < 3 {
            return Err(ConformalError::Dimension(m));
        }
        let x = coordinate_jets(space, point);
        let g: Vec<Jet> = chart.metric_jets(&x)?.iter().map(|j| j.truncate(JET_ORDER)).collect();
        let gv = values(&g);
        let det = determinant(&gv, m);
        if det.abs() < 1e-12 || !det.is_finite() {
            return Err(ConformalError::Degenerate { det });
        }
        let frame = pseudo_orthonormal_frame(&gv, m)?;
        let g2: Vec<Jet> = g.iter().map(|j| j.truncate(2)).collect();
        let ginv = jet_inverse(&g2, m)?;
        let zero = |o: usize| Jet::zero(space, o);
        let i2 = |a: usize, b: usize| a * m + b;
        let i3 = |a: usize, b: usize, c: usize| (a * m + b) * m + c;
        let i4 = |a: usize, b: usize, c: usize, d: usize| ((a * m + b) * m + c) * m + d;

        // dg[c][ab] = ∂_c g_ab, order 2
        let dg: Vec<Vec<Jet>> = (0..m).map(|c| g.iter().map(|j| j.deriv(c)).collect()).collect();
        // first kind Γ_{dbc}
        let mut gamma1 = Vec::with_capacity(m * m * m);
        for d in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let s = &(&dg[b][i2(d, c)] + &dg[c][i2(d, b)]) - &dg[d][i2(b, c)];
                    gamma1.push(s.scale(0.5));
                }
            }
        }
        let mut gamma: Vec<Jet> = Vec::with_capacity(m * m * m);
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    if c < b {
                        let sym: Jet = gamma[i3(a, c, b)].clone();
                        gamma.push(sym);
                        continue;
                    }
                    let mut s = zero(2);
                    for d in 0..m {
                        s.add_mul(&ginv[i2(a, d)], &gamma1[i3(d, b, c)]);
                    }
                    gamma.push(s);
                }
            }
        }
        let gamma1o: Vec<Jet> = gamma.iter().map(|j| j.truncate(1)).collect();
        let dgamma: Vec<Vec<Jet>> = (0..m).map(|e| gamma.iter().map(|j| j.deriv(e)).collect()).collect();

        let mut riem = alloc::vec![zero(1); m * m * m * m];
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in c + 1..m {
                        let mut s = &dgamma[c][i3(a, d, b)] - &dgamma[d][i3(a, c, b)];
                        for e in 0..m {
                            s.add_mul(&gamma1o[i3(a, c, e)], &gamma1o[i3(e, d, b)]);
                            s.add_mul(&(-&gamma1o[i3(a, d, e)]), &gamma1o[i3(e, c, b)]);
                        }
                        riem[i4(a, b, d, c)] = -&s;
                        riem[i4(a, b, c, d)] = s;
                    }
                }
            }
        }
        let g1: Vec<Jet> = g.iter().map(|j| j.truncate(1)).collect();
        let ginv1: Vec<Jet> = ginv.iter().map(|j| j.truncate(1)).collect();
        let mut riem_low = alloc::vec![zero(1); m * m * m * m];
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in c + 1..m {
                        let mut s = zero(1);
                        for e in 0..m {
                            s.add_mul(&g1[i2(a, e)], &riem[i4(e, b, c, d)]);
                        }
                        riem_low[i4(a, b, d, c)] = -&s;
                        riem_low[i4(a, b, c, d)] = s;
                    }
                }
            }
        }
        let mut ric = Vec::with_capacity(m * m);
        for b in 0..m {
            for d in 0..m {
                let mut s = zero(1);
                for a in 0..m {
                    s.add_scaled(1.0, &riem[i4(a, b, a, d)]);
                }
                ric.push(s);
            }
        }
        let mut scal = zero(1);
        for i in 0..m * m {
            scal.add_mul(&ginv1[i], &ric[i]);
        }
        let mf = m as f64;
        let sc = scal.scale(1.0 / (2.0 * (mf - 1.0)));
        let schouten: Vec<Jet> =
            (0..m * m).map(|i| (&ric[i] - &(&sc * &g1[i])).scale(-1.0 / (mf - 2.0))).collect();
        let mut weyl = Vec::with_capacity(m * m * m * m);
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        let mut w = riem_low[i4(a, b, c, d)].clone();
                        w.add_mul(&schouten[i2(a, c)], &g1[i2(b, d)]);
                        w.add_mul(&schouten[i2(b, d)], &g1[i2(a, c)]);
                        w.add_mul(&(-&schouten[i2(a, d)]), &g1[i2(b, c)]);
                        w.add_mul(&(-&schouten[i2(b, c)]), &g1[i2(a, d)]);
                        weyl.push(w);
                    }
                }
            }
        }
        let ginv_v = values(&ginv);
        let gamma_v = values(&gamma);
        let schouten_v = values(&schouten);
        // ∇_e P_ac at [e][a][c]
        let mut nabla_p = alloc::vec![0.0; m * m * m];
        for e in 0..m {
            for a in 0..m {
                for c in 0..m {
                    let mut s = schouten[i2(a, c)].deriv(e).value();
                    for f in 0..m {
                        s -= gamma_v[i3(f, e, a)] * schouten_v[i2(f, c)] + gamma_v[i3(f, e, c)] * schouten_v[i2(a, f)];
                    }
                    nabla_p[i3(e, a, c)] = s;
                }
            }
        }
        Ok(PointGeometry {
            m,
            point: point.to_vec(),
            frame,
            x,
            g,
            ginv,
            gamma,
            riem,
            riem_low,
            ric,
            scal,
            schouten,
            weyl,
            gv,
            ginv_v,
            gamma_v,
            schouten_v,
            nabla_p,
        })
    }

    pub fn coordinates(&self) -> &[Jet] {
        &self.x
    }

    pub fn metric(&self) -> &[f64] {
        &self.gv
    }

    pub fn metric_inverse(&self) -> &[f64] {
        &self.ginv_v
    }

    pub fn christoffel(&self) -> &[f64] {
        &self.gamma_v
    }

    pub fn riemann(&self) -> Vec<f64> {
        values(&self.riem)
    }

    pub fn riemann_lowered(&self) -> Vec<f64> {
        values(&self.riem_low)
    }

    pub fn ricci(&self) -> Vec<f64> {
        values(&self.ric)
    }

    pub fn scalar(&self) -> f64 {
        self.scal.value()
    }

    pub fn schouten(&self) -> &[f64] {
        &self.schouten_v
    }

    pub fn weyl(&self) -> Vec<f64> {
        values(&self.weyl)
    }

    /// ∇_e P_ac, indexed [e][a][c].
    pub fn nabla_schouten(&self) -> &[f64] {
        &self.nabla_p
    }

    /// C_abc with Cot(u,v,w) = u^a v^b w^c C_abc.
    pub fn cotton(&self) -> Vec<f64> {
        let m = self.m;
        let np = &self.nabla_p;
        let mut c = alloc::vec![0.0; m * m * m];
        for a in 0..m {
            for b in 0..m {
                for w in 0..m {
                    c[(a * m + b) * m + w] = np[(b * m + a) * m + w] - np[(a * m + b) * m + w];
                }
            }
        }
        c
    }

    /// ∇_e W_abcd, indexed [e][a][b][c][d].
    pub fn nabla_weyl(&self) -> Vec<f64> {
        let m = self.m;
        let m4 = m * m * m * m;
        let wv = self.weyl();
        let gam = &self.gamma_v;
        let mut out = alloc::vec![0.0; m * m4];
        for e in 0..m {
            for idx in 0..m4 {
                let (a, b, c, d) = (idx / (m * m * m), (idx / (m * m)) % m, (idx / m) % m, idx % m);
                let mut s = self.weyl[idx].deriv(e).value();
                for f in 0..m {
                    let ge = |x: usize| gam[(f * m + e) * m + x];
                    s -= ge(a) * wv[((f * m + b) * m + c) * m + d]
                        + ge(b) * wv[((a * m + f) * m + c) * m + d]
                        + ge(c) * wv[((a * m + b) * m + f) * m + d]
                        + ge(d) * wv[((a * m + b) * m + c) * m + f];
                }
                out[e * m4 + idx] = s;
            }
        }
        out
    }

    pub fn lower(&self, v: &[f64]) -> Vec<f64> {
        mat_vec(&self.gv, v)
    }

    pub fn raise(&self, w: &[f64]) -> Vec<f64> {
        mat_vec(&self.ginv_v, w)
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        bilinear(&self.gv, u, v)
    }

    pub fn schouten_form(&self, u: &[f64], v: &[f64]) -> f64 {
        bilinear(&self.schouten_v, u, v)
    }

    /// Residual of Ric + (m−2)P + tr(P)f = 0.
    pub fn schouten_residual(&self) -> f64 {
        let m = self.m;
        let ric = self.ricci();
        let tr: f64 = (0..m * m).map(|i| self.ginv_v[i] * self.schouten_v[i]).sum();
        (0..m * m)
            .map(|i| (ric[i] + (m as f64 - 2.0) * self.schouten_v[i] + tr * self.gv[i]).abs())
            .fold(0.0, f64::max)
    }

    /// Largest f-trace of W over any pair of slots.
    pub fn weyl_trace(&self) -> f64 {
        let m = self.m;
        let w = self.weyl();
        let at = |i: [usize; 4]| w[((i[0] * m + i[1]) * m + i[2]) * m + i[3]];
        let mut worst = 0.0f64;
        for (s, t) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
            let free: Vec<usize> = (0..4).filter(|&k| k != s && k != t).collect();
            for p in 0..m {
                for q in 0..m {
                    let mut sum = 0.0;
                    for a in 0..m {
                        for b in 0..m {
                            let mut idx = [0usize; 4];
                            idx[s] = a;
                            idx[t] = b;
                            idx[free[0]] = p;
                            idx[free[1]] = q;
                            sum += self.ginv_v[a * m + b] * at(idx);
                        }
                    }
                    worst = worst.max(sum.abs());
                }
            }
        }
        worst
    }

    /// D(u,v,w) = Σ_i ε_i (∇_{e_i}W)(u,v,w,e_i) as D_abc, over the frame.
    pub fn weyl_divergence(&self) -> Vec<f64> {
        let m = self.m;
        let nw = self.nabla_weyl();
        let m4 = m * m * m * m;
        let mut h = alloc::vec![0.0; m * m];
        for (v, e) in self.frame.vectors.iter().zip(&self.frame.eps) {
            for i in 0..m {
                for j in 0..m {
                    h[i * m + j] += e * v[i] * v[j];
                }
            }
        }
        let mut out = alloc::vec![0.0; m * m * m];
        for abc in 0..m * m * m {
            let mut s = 0.0;
            for e in 0..m {
                for d in 0..m {
                    let c = h[e * m + d];
                    if c != 0.0 {
                        s += c * nw[e * m4 + abc * m + d];
                    }
                }
            }
            out[abc] = s;
        }
        out
    }

    fn field(&self, k: &VectorFieldOnChart) -> Result<FieldJets, ConformalError> {
        let m = self.m;
        let kj: Vec<Jet> = k.eval(&self.x)?.iter().map(|j| j.truncate(JET_ORDER)).collect();
        let space = self.x[0].space().clone();
        let mut nabla = Vec::with_capacity(m * m);
        for a in 0..m {
            for b in 0..m {
                let mut s = kj[a].deriv(b);
                for c in 0..m {
                    s.add_mul(&self.gamma[(a * m + b) * m + c], &kj[c]);
                }
                nabla.push(s);
            }
        }
        let mut div = Jet::zero(&space, 2);
        for a in 0..m {
            div.add_scaled(1.0, &nabla[a * m + a]);
        }
        let alpha = div.scale(1.0 / m as f64);
        let mut lie = Vec::with_capacity(m * m);
        for a in 0..m {
            for b in 0..m {
                let mut s = Jet::zero(&space, 2);
                for c in 0..m {
                    s.add_mul(&kj[c], &self.g[a * m + b].deriv(c));
                    s.add_mul(&self.g[c * m + b], &kj[c].deriv(a));
                    s.add_mul(&self.g[a * m + c], &kj[c].deriv(b));
                }
                s.add_mul(&alpha.scale(-2.0), &self.g[a * m + b]);
                lie.push(s);
            }
        }
        let mut flat = Vec::with_capacity(m);
        for b in 0..m {
            let mut s = Jet::zero(&space, JET_ORDER);
            for c in 0..m {
                s.add_mul(&self.g[b * m + c], &kj[c]);
            }
            flat.push(s);
        }
        let mut kform = Vec::with_capacity(m * m);
        for a in 0..m {
            for b in 0..m {
                kform.push((&flat[b].deriv(a) - &flat[a].deriv(b)).scale(0.5));
            }
        }
        Ok(FieldJets { k: kj, nabla, alpha, lie, kform })
    }

    /// (L_k f − λf, λ) at the point, λ = (2/m) div k.
    pub fn conformal_killing(&self, k: &VectorFieldOnChart) -> Result<(Vec<f64>, f64), ConformalError> {
        let fj = self.field(k)?;
        Ok((values(&fj.lie), 2.0 * fj.alpha.value()))
    }

    /// Raise the first index of a (0,2)-form: K(u)^c = f^{cb} u^a K_ab.
    fn apply_form(&self, kform: &[f64], u: &[f64]) -> Vec<f64> {
        let m = self.m;
        let low: Vec<f64> = (0..m).map(|b| (0..m).map(|a| u[a] * kform[a * m + b]).sum()).collect();
        self.raise(&low)
    }
}

struct FieldJets {
    k: Vec<Jet>,
    // ∇_b k^a at [a][b]
    nabla: Vec<Jet>,
    alpha: Jet,
    lie: Vec<Jet>,
    kform: Vec<Jet>,
}

// ---------------------------------------------------------------------------
// operations on charts

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureSuite {
    pub christoffel: Vec<f64>,
    pub riemann: Vec<f64>,
    pub ricci: Vec<f64>,
    pub scalar: f64,
    pub schouten: Vec<f64>,
    pub weyl: Vec<f64>,
    pub cotton: Vec<f64>,
}

pub fn curvature_suite(chart: &MetricChart, point: &[f64]) -> Result<CurvatureSuite, ConformalError> {
    let g = PointGeometry::new(chart, point)?;
    Ok(CurvatureSuite {
        christoffel: g.christoffel().to_vec(),
        riemann: g.riemann(),
        ricci: g.ricci(),
        scalar: g.scalar(),
        schouten: g.schouten().to_vec(),
        weyl: g.weyl(),
        cotton: g.cotton(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeylDivergenceReport {
    pub dim: usize,
    pub points: usize,
    pub expected_constant: f64,
    /// Least-squares c in div W = c·Cot; None when Cot vanishes everywhere.
    pub fitted_constant: Option<f64>,
    pub residual: f64,
    pub divergence_norm: f64,
    pub cotton_norm: f64,
}

impl WeylDivergenceReport {
    pub fn pass(&self, tol: f64) -> bool {
        self.residual < tol
            && self.fitted_constant.is_none_or(|c| (c - self.expected_constant).abs() < 1e-4)
    }
}

pub fn weyl_divergence_residual(chart: &MetricChart, points: &[Vec<f64>]) -> Result<WeylDivergenceReport, ConformalError> {
    let m = chart.dim;
    let space = JetSpace::new(m, JET_ORDER);
    let expected = 3.0 - m as f64;
    let (mut dc, mut cc) = (0.0, 0.0);
    let (mut residual, mut dn, mut cn) = (0.0f64, 0.0f64, 0.0f64);
    for p in points {
        let geom = PointGeometry::with_space(chart, &space, p)?;
        let d = geom.weyl_divergence();
        let c = geom.cotton();
        let scale = max_abs(&d).max(max_abs(&c) * expected.abs()).max(1.0);
        for (x, y) in d.iter().zip(&c) {
            dc += x * y;
            cc += y * y;
            residual = residual.max((x - expected * y).abs() / scale);
        }
        dn = dn.max(max_abs(&d));
        cn = cn.max(max_abs(&c));
    }
    Ok(WeylDivergenceReport {
        dim: m,
        points: points.len(),
        expected_constant: expected,
        fitted_constant: if cc > 1e-20 { Some(dc / cc) } else { None },
        residual,
        divergence_norm: dn,
        cotton_norm: cn,
    })
}

pub fn conformal_killing_residual(
    chart: &MetricChart,
    k: &VectorFieldOnChart,
    point: &[f64],
) -> Result<(Vec<f64>, f64), ConformalError> {
    PointGeometry::new(chart, point)?.conformal_killing(k)
}

/// The splitting (γ, α, K, k) of a conformal Killing field at a point.
#[derive(Clone, Debug)]
pub struct TractorDecomposition {
    pub point: Vec<f64>,
    pub gamma: Vec<f64>,
    pub alpha: f64,
    /// K_ab with K(u)_b = u^a K_ab.
    pub k_form: Vec<f64>,
    pub kfield: Vec<f64>,
    pub killing_residual: f64,
    gamma_j: Vec<Jet>,
    alpha_j: Jet,
    kform_j: Vec<Jet>,
    k_j: Vec<Jet>,
}

impl TractorDecomposition {
    pub fn scaled(&self, s: f64) -> Self {
        let sc = |v: &[f64]| v.iter().map(|x| x * s).collect::<Vec<f64>>();
        let scj = |v: &[Jet]| v.iter().map(|x| x.scale(s)).collect::<Vec<Jet>>();
        TractorDecomposition {
            point: self.point.clone(),
            gamma: sc(&self.gamma),
            alpha: self.alpha * s,
            k_form: sc(&self.k_form),
            kfield: sc(&self.kfield),
            killing_residual: self.killing_residual * s.abs(),
            gamma_j: scj(&self.gamma_j),
            alpha_j: self.alpha_j.scale(s),
            kform_j: scj(&self.kform_j),
            k_j: scj(&self.k_j),
        }
    }

    /// k(α) = dα(k).
    pub fn k_alpha(&self) -> f64 {
        self.alpha_j.gradient().iter().zip(&self.kfield).map(|(a, b)| a * b).sum()
    }

    /// β = P(k,k) + α² − k(α).
    pub fn beta(&self, geom: &PointGeometry) -> f64 {
        geom.schouten_form(&self.kfield, &self.kfield) + self.alpha * self.alpha - self.k_alpha()
    }

    /// K applied to a vector.
    pub fn apply(&self, geom: &PointGeometry, u: &[f64]) -> Vec<f64> {
        geom.apply_form(&self.k_form, u)
    }

    /// max |f(Ku,v) + f(u,Kv)| over frame vectors.
    pub fn skew_residual(&self, geom: &PointGeometry) -> f64 {
        let mut worst = 0.0f64;
        for u in &geom.frame.vectors {
            let ku = self.apply(geom, u);
            for v in &geom.frame.vectors {
                let kv = self.apply(geom, v);
                worst = worst.max((geom.inner(&ku, v) + geom.inner(u, &kv)).abs());
            }
        }
        worst
    }
}

pub fn tractor_split(
    geom: &PointGeometry,
    k: &VectorFieldOnChart,
    tol: f64,
) -> Result<TractorDecomposition, ConformalError> {
    let m = geom.m;
    let fj = geom.field(k)?;
    let residual = max_abs(&values(&fj.lie));
    if residual > tol {
        return Err(ConformalError::NotConformalKilling { residual });
    }
    let mut gamma_j = Vec::with_capacity(m);
    for a in 0..m {
        let mut s = fj.alpha.deriv(a).scale(-1.0);
        for b in 0..m {
            s.add_mul(&geom.schouten[a * m + b], &fj.k[b]);
        }
        gamma_j.push(s);
    }
    Ok(TractorDecomposition {
        point: geom.point.clone(),
        gamma: values(&gamma_j),
        alpha: fj.alpha.value(),
        k_form: values(&fj.kform),
        kfield: values(&fj.k),
        killing_residual: residual,
        gamma_j,
        alpha_j: fj.alpha,
        kform_j: fj.kform,
        k_j: fj.k,
    })
}

/// The four rows of the adjoint tractor derivative along v.
#[derive(Debug, Clone, PartialEq)]
pub struct TractorRows {
    /// ∇_vγ + αP(v) + P(v)∘K, a one-form.
    pub row1: Vec<f64>,
    /// −γ(v) − v(α) + P(v,k).
    pub row2: f64,
    /// v∧γ + ∇_vK − k∧P(v), lowered: entry (x,y) is f(row3(x), y).
    pub row3: Vec<f64>,
    /// −αv − K(v) + ∇_v k, a vector.
    pub row4: Vec<f64>,
}

impl TractorRows {
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.row1).max(self.row2.abs()).max(max_abs(&self.row3)).max(max_abs(&self.row4))
    }

    pub fn row_norms(&self) -> [f64; 4] {
        [max_abs(&self.row1), self.row2.abs(), max_abs(&self.row3), max_abs(&self.row4)]
    }
}

pub fn tractor_derivative(geom: &PointGeometry, s: &TractorDecomposition, v: &[f64]) -> TractorRows {
    let m = geom.m;
    let gam = geom.christoffel();
    let p = geom.schouten();
    let ga = |a: usize, b: usize, c: usize| gam[(a * m + b) * m + c];
    let vlow = geom.lower(v);
    let klow = geom.lower(&s.kfield);
    let pv: Vec<f64> = (0..m).map(|c| (0..m).map(|e| v[e] * p[e * m + c]).sum()).collect();

    // ∇_vγ
    let mut nabla_gamma = alloc::vec![0.0; m];
    for c in 0..m {
        let mut t = 0.0;
        for e in 0..m {
            if v[e] == 0.0 {
                continue;
            }
            let mut d = s.gamma_j[c].deriv(e).value();
            for f in 0..m {
                d -= ga(f, e, c) * s.gamma[f];
            }
            t += v[e] * d;
        }
        nabla_gamma[c] = t;
    }
    let mut row1 = alloc::vec![0.0; m];
    for c in 0..m {
        let mut ec = alloc::vec![0.0; m];
        ec[c] = 1.0;
        let kec = s.apply(geom, &ec);
        let pvk: f64 = (0..m).map(|f| pv[f] * kec[f]).sum();
        row1[c] = nabla_gamma[c] + s.alpha * pv[c] + pvk;
    }

    let dalpha = s.alpha_j.gradient();
    let v_alpha: f64 = (0..m).map(|e| v[e] * dalpha[e]).sum();
    let gamma_v: f64 = (0..m).map(|e| v[e] * s.gamma[e]).sum();
    let pvk: f64 = (0..m).map(|e| pv[e] * s.kfield[e]).sum();
    let row2 = -gamma_v - v_alpha + pvk;

    let mut row3 = alloc::vec![0.0; m * m];
    for x in 0..m {
        for y in 0..m {
            let mut nk = 0.0;
            for e in 0..m {
                if v[e] == 0.0 {
                    continue;
                }
                let mut d = s.kform_j[x * m + y].deriv(e).value();
                for f in 0..m {
                    d -= ga(f, e, x) * s.k_form[f * m + y] + ga(f, e, y) * s.k_form[x * m + f];
                }
                nk += v[e] * d;
            }
            let wedge1 = s.gamma[x] * vlow[y] - vlow[x] * s.gamma[y];
            let wedge2 = pv[x] * klow[y] - klow[x] * pv[y];
            row3[x * m + y] = wedge1 + nk - wedge2;
        }
    }

    let kv = s.apply(geom, v);
    let mut row4 = alloc::vec![0.0; m];
    for a in 0..m {
        let mut nk = 0.0;
        for e in 0..m {
            if v[e] == 0.0 {
                continue;
            }
            let mut d = s.k_j[a].deriv(e).value();
            for f in 0..m {
                d += ga(a, e, f) * s.kfield[f];
            }
            nk += v[e] * d;
        }
        row4[a] = -s.alpha * v[a] - kv[a] + nk;
    }
    TractorRows { row1, row2, row3, row4 }
}

/// max over frame pairs of |∇_u∇_v k − ∇_{∇_u v}k − (k∧P(u))(v) + (u∧P(k))(v)|.
pub fn second_derivative_residual(geom: &PointGeometry, k: &VectorFieldOnChart) -> Result<f64, ConformalError> {
    let m = geom.m;
    let fj = geom.field(k)?;
    let gam = geom.christoffel();
    let nk = values(&fj.nabla);
    let kv = values(&fj.k);
    // ∇_e(∇k)^a_b at [e][a][b]
    let mut hess = alloc::vec![0.0; m * m * m];
    for e in 0..m {
        for a in 0..m {
            for b in 0..m {
                let mut d = fj.nabla[a * m + b].deriv(e).value();
                for c in 0..m {
                    d += gam[(a * m + e) * m + c] * nk[c * m + b] - gam[(c * m + e) * m + b] * nk[a * m + c];
                }
                hess[(e * m + a) * m + b] = d;
            }
        }
    }
    let pk: Vec<f64> = geom.raise(&(0..m).map(|c| geom.schouten_form(&kv, &unit(m, c))).collect::<Vec<_>>());
    let mut worst = 0.0f64;
    for u in &geom.frame.vectors {
        let pu: Vec<f64> = geom.raise(&(0..m).map(|c| geom.schouten_form(u, &unit(m, c))).collect::<Vec<_>>());
        for v in &geom.frame.vectors {
            let (puv, fkv) = (geom.schouten_form(u, v), geom.inner(&kv, v));
            let (pkv, fuv) = (geom.schouten_form(&kv, v), geom.inner(u, v));
            for a in 0..m {
                let mut lhs = 0.0;
                for e in 0..m {
                    for b in 0..m {
                        lhs += u[e] * v[b] * hess[(e * m + a) * m + b];
                    }
                }
                let rhs = (puv * kv[a] - fkv * pu[a]) - (pkv * u[a] - fuv * pk[a]);
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    Ok(worst)
}

fn unit(m: usize, i: usize) -> Vec<f64> {
    let mut e = alloc::vec![0.0; m];
    e[i] = 1.0;
    e
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stats {
    pub mean: f64,
    pub stddev: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    pub fn of(xs: &[f64]) -> Stats {
        let n = xs.len().max(1) as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        Stats {
            mean,
            stddev: libm::sqrt(var),
            min: xs.iter().copied().fold(f64::INFINITY, f64::min),
            max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.min.abs().max(self.max.abs())
    }

    /// stddev < 1e−7·(1 + |mean|).
    pub fn is_constant(&self) -> bool {
        self.stddev < 1e-7 * (1.0 + self.mean.abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparlingPoint {
    pub point: Vec<f64>,
    pub chi: f64,
    pub beta: [f64; 3],
    pub alpha3: f64,
    /// |2α₃ − (2/m) div k₃|.
    pub lambda3_mismatch: f64,
    pub k3: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparlingReport {
    pub points: Vec<SparlingPoint>,
    pub chi: Stats,
    pub beta: [Stats; 3],
    pub alpha3: Stats,
    /// max |β₁β₂ + β₃|.
    pub product_residual: f64,
    pub lambda3_mismatch: f64,
}

impl SparlingReport {
    pub fn from_points(points: Vec<SparlingPoint>) -> Self {
        let col = |f: &dyn Fn(&SparlingPoint) -> f64| Stats::of(&points.iter().map(f).collect::<Vec<_>>());
        let chi = col(&|p| p.chi);
        let beta = [col(&|p| p.beta[0]), col(&|p| p.beta[1]), col(&|p| p.beta[2])];
        let alpha3 = col(&|p| p.alpha3);
        let product_residual = points.iter().map(|p| (p.beta[0] * p.beta[1] + p.beta[2]).abs()).fold(0.0, f64::max);
        let lambda3_mismatch = points.iter().map(|p| p.lambda3_mismatch).fold(0.0, f64::max);
        SparlingReport { points, chi, beta, alpha3, product_residual, lambda3_mismatch }
    }

    /// Best single scale s with k₃ ≈ s·model, and the remaining max deviation.
    pub fn k3_against(&self, model: &[Vec<f64>]) -> (f64, f64) {
        let (mut num, mut den) = (0.0, 0.0);
        for (p, q) in self.points.iter().zip(model) {
            for (a, b) in p.k3.iter().zip(q) {
                num += a * b;
                den += b * b;
            }
        }
        let s = if den > 0.0 { num / den } else { 0.0 };
        let mut worst = 0.0f64;
        for (p, q) in self.points.iter().zip(model) {
            for (a, b) in p.k3.iter().zip(q) {
                worst = worst.max((a - s * b).abs());
            }
        }
        (s, worst)
    }
}

pub fn sparling_invariants(
    chart: &MetricChart,
    k1: &VectorFieldOnChart,
    k2: &VectorFieldOnChart,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<SparlingReport, ConformalError> {
    let m = chart.dim;
    let space = JetSpace::new(m, JET_ORDER);
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        let geom = PointGeometry::with_space(chart, &space, p)?;
        let f1 = geom.field(k1)?;
        let f2 = geom.field(k2)?;
        for (name, fj) in [(&k1.label, &f1), (&k2.label, &f2)] {
            let r = max_abs(&values(&fj.lie));
            if r > tol {
                return Err(ConformalError::Precondition(format!("{name} conformal Killing (residual {r:e})")));
            }
        }
        let (v1, v2) = (values(&f1.k), values(&f2.k));
        for (name, x) in [
            (format!("{} light-like", k1.label), geom.inner(&v1, &v1)),
            (format!("{} light-like", k2.label), geom.inner(&v2, &v2)),
            (format!("{} ⟂ {}", k1.label, k2.label), geom.inner(&v1, &v2)),
        ] {
            if x.abs() > tol {
                return Err(ConformalError::Precondition(format!("{name} (|f| = {:e})", x.abs())));
            }
        }
        let (a1, a2) = (f1.alpha.value(), f2.alpha.value());
        let (d1, d2) = (f1.alpha.gradient(), f2.alpha.gradient());
        let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
        let chi = geom.schouten_form(&v1, &v2) + a1 * a2 - 0.5 * dot(&v1, &d2) - 0.5 * dot(&v2, &d1);
        let b1 = geom.schouten_form(&v1, &v1) + a1 * a1 - dot(&v1, &d1);
        let b2 = geom.schouten_form(&v2, &v2) + a2 * a2 - dot(&v2, &d2);

        // k₃ = K₁(k₂) − α₂k₁ as a jet field of order 2
        let mut low = Vec::with_capacity(m);
        for b in 0..m {
            let mut s = Jet::zero(&space, 2);
            for c in 0..m {
                s.add_mul(&f2.k[c], &f1.kform[c * m + b]);
            }
            low.push(s);
        }
        let mut k3 = Vec::with_capacity(m);
        for a in 0..m {
            let mut s = Jet::zero(&space, 2);
            for b in 0..m {
                s.add_mul(&geom.ginv[a * m + b], &low[b]);
            }
            s.add_mul(&f2.alpha.scale(-1.0), &f1.k[a]);
            k3.push(s);
        }
        // α₃ = ½(k₂(α₁) − k₁(α₂)) as an order-1 jet
        let mut alpha3 = Jet::zero(&space, 1);
        for a in 0..m {
            alpha3.add_mul(&f2.k[a], &f1.alpha.deriv(a));
            alpha3.add_mul(&f1.k[a].scale(-1.0), &f2.alpha.deriv(a));
        }
        let alpha3 = alpha3.scale(0.5);
        let v3 = values(&k3);
        let b3 = geom.schouten_form(&v3, &v3) + alpha3.value() * alpha3.value() - dot(&v3, &alpha3.gradient());
        let mut div3 = 0.0;
        for a in 0..m {
            div3 += k3[a].deriv(a).value();
            for c in 0..m {
                div3 += geom.gamma_v[(a * m + a) * m + c] * v3[c];
            }
        }
        out.push(SparlingPoint {
            point: p.clone(),
            chi,
            beta: [b1, b2, b3],
            alpha3: alpha3.value(),
            lambda3_mismatch: (2.0 * alpha3.value() - 2.0 * div3 / m as f64).abs(),
            k3: v3,
        });
    }
    Ok(SparlingReport::from_points(out))
}

/// k ↦ k/√(−β), so that β = −1 afterwards.
pub fn beta_normalized(s: &TractorDecomposition, beta: f64) -> Result<TractorDecomposition, ConformalError> {
    if beta.is_nan() || beta >= 0.0 {
        return Err(ConformalError::Precondition(format!("β < 0 (β = {beta})")));
    }
    Ok(s.scaled(1.0 / libm::sqrt(-beta)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FelipeReport {
    /// |K(k) − αk|
    pub eigen_k: f64,
    /// |K(−γ♯) − α(−γ♯)|
    pub eigen_gamma: f64,
    /// γ(k) + α², expected −1
    pub normalization: f64,
    /// |K² + Id| on the complement of span(k, γ♯)
    pub complex_structure: f64,
    /// |f(k,k)|
    pub lightlike: f64,
}

impl FelipeReport {
    pub fn max_residual(&self) -> f64 {
        self.eigen_k.max(self.eigen_gamma).max((self.normalization + 1.0).abs()).max(self.complex_structure)
    }
}

pub fn felipe_conditions(geom: &PointGeometry, s: &TractorDecomposition) -> FelipeReport {
    let m = geom.m;
    let k = &s.kfield;
    let gsharp: Vec<f64> = geom.raise(&s.gamma).iter().map(|x| -x).collect();
    let diff = |a: &[f64], b: &[f64], c: f64| a.iter().zip(b).map(|(x, y)| (x - c * y).abs()).fold(0.0, f64::max);
    let eigen_k = diff(&s.apply(geom, k), k, s.alpha);
    let eigen_gamma = diff(&s.apply(geom, &gsharp), &gsharp, s.alpha);
    let normalization = s.gamma.iter().zip(k).map(|(a, b)| a * b).sum::<f64>() + s.alpha * s.alpha;

    // f-orthogonal projection onto span(k, γ♯)^⟂
    let span = [k.clone(), gsharp.clone()];
    let gram = [
        geom.inner(&span[0], &span[0]),
        geom.inner(&span[0], &span[1]),
        geom.inner(&span[1], &span[0]),
        geom.inner(&span[1], &span[1]),
    ];
    let mut complex_structure = f64::INFINITY;
    if let Some(gi) = invert(&gram, 2) {
        complex_structure = 0.0;
        for i in 0..m {
            let mut x = unit(m, i);
            let r = [geom.inner(&span[0], &x), geom.inner(&span[1], &x)];
            for a in 0..2 {
                let c = gi[a * 2] * r[0] + gi[a * 2 + 1] * r[1];
                for (xi, si) in x.iter_mut().zip(&span[a]) {
                    *xi -= c * si;
                }
            }
            let kkx = s.apply(geom, &s.apply(geom, &x));
            complex_structure = complex_structure.max(diff(&kkx, &x, -1.0));
        }
    }
    FelipeReport {
        eigen_k,
        eigen_gamma,
        normalization,
        complex_structure,
        lightlike: geom.inner(k, k).abs(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceContraction {
    /// max_{u,v} |Σ ε_a W(∇_{e_a}k, e_a, u, v)|
    pub weyl: f64,
    /// max_u |Σ ε_a Cot(∇_{e_a}k, e_a, u)|
    pub cotton: f64,
    /// max |W(k,·,·,·)|
    pub k_weyl: f64,
    /// max |Cot(k,·,·)|
    pub k_cotton: f64,
}

impl TraceContraction {
    pub fn max_abs(&self) -> f64 {
        self.weyl.max(self.cotton).max(self.k_weyl).max(self.k_cotton)
    }
}

pub fn trace_contraction_check(
    geom: &PointGeometry,
    s: &TractorDecomposition,
    alpha_tol: f64,
) -> Result<TraceContraction, ConformalError> {
    if s.alpha.abs() > alpha_tol {
        return Err(ConformalError::Precondition(format!("α = 0 (|α| = {:e})", s.alpha.abs())));
    }
    let m = geom.m;
    let w = geom.weyl();
    let c = geom.cotton();
    let w4 = |a: &[f64], b: &[f64], u: &[f64], v: &[f64]| {
        let mut t = 0.0;
        for i in 0..m {
            if a[i] == 0.0 {
                continue;
            }
            for j in 0..m {
                if b[j] == 0.0 {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        t += w[((i * m + j) * m + k) * m + l] * a[i] * b[j] * u[k] * v[l];
                    }
                }
            }
        }
        t
    };
    let c3 = |a: &[f64], b: &[f64], u: &[f64]| {
        let mut t = 0.0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    t += c[(i * m + j) * m + k] * a[i] * b[j] * u[k];
                }
            }
        }
        t
    };
    let fr = &geom.frame;
    let nk: Vec<Vec<f64>> = fr
        .vectors
        .iter()
        .map(|e| {
            let ke = s.apply(geom, e);
            ke.iter().zip(e).map(|(x, y)| x + s.alpha * y).collect()
        })
        .collect();
    let (mut weyl, mut cotton, mut k_weyl, mut k_cotton) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for u in &fr.vectors {
        let mut tc = 0.0;
        for (i, e) in fr.vectors.iter().enumerate() {
            tc += fr.eps[i] * c3(&nk[i], e, u);
        }
        cotton = cotton.max(tc.abs());
        for v in &fr.vectors {
            let mut tw = 0.0;
            for (i, e) in fr.vectors.iter().enumerate() {
                tw += fr.eps[i] * w4(&nk[i], e, u, v);
            }
            weyl = weyl.max(tw.abs());
            k_cotton = k_cotton.max(c3(&s.kfield, u, v).abs());
            for x in &fr.vectors {
                k_weyl = k_weyl.max(w4(&s.kfield, u, v, x).abs());
            }
        }
    }
    Ok(TraceContraction { weyl, cotton, k_weyl, k_cotton })
}

// ---------------------------------------------------------------------------
// reference charts

pub fn flat_chart(p: usize, q: usize, half_width: f64) -> MetricChart {
    let m = p + q;
    MetricChart::new(format!("flat R^({p},{q})"), (p, q), Domain::cube(m, half_width), move |x| {
        let space = x[0].space();
        let o = x[0].order();
        Ok((0..m * m)
            .map(|i| {
                let z = Jet::zero(space, o);
                if i / m != i % m {
                    z
                } else if i / m < p {
                    z.add_const(1.0)
                } else {
                    z.add_const(-1.0)
                }
            })
            .collect())
    })
}

/// Unit round sphere S^m in stereographic coordinates: 4/(1+|x|²)²·δ.
pub fn round_sphere_chart(m: usize) -> MetricChart {
    MetricChart::new(format!("S^{m} stereographic"), (m, 0), Domain::ball(m, 0.9), move |x| {
        let space = x[0].space();
        let mut r2 = Jet::zero(space, x[0].order()).add_const(1.0);
        for xi in x {
            r2.add_mul(xi, xi);
        }
        let c = r2.powi(2).recip()?.scale(4.0);
        let z = Jet::zero(space, x[0].order());
        Ok((0..m * m).map(|i| if i / m == i % m { c.clone() } else { z.clone() }).collect())
    })
}

fn monomials(dim: usize, max_degree: usize) -> Vec<Vec<u8>> {
    fn rec(dim: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == dim {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.push(e as u8);
            rec(dim, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, max_degree, &mut Vec::new(), &mut out);
    out.retain(|a| a.iter().any(|&e| e > 0));
    out.sort_by_key(|a| a.iter().map(|&e| e as usize).sum::<usize>());
    out
}

/// η + Σ_α c_α x^α with seeded coefficients, 1 ≤ |α| ≤ degree, entries of
/// size `amplitude` per degree; coordinates in [−½, ½]^m.
pub fn random_polynomial_chart(p: usize, q: usize, degree: usize, amplitude: f64, seed: u64) -> MetricChart {
    let m = p + q;
    let monos = monomials(m, degree);
    let mut per_degree = alloc::vec![0usize; degree + 1];
    for a in &monos {
        per_degree[a.iter().map(|&e| e as usize).sum::<usize>()] += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = alloc::vec![alloc::vec![0.0; monos.len()]; m * m];
    for i in 0..m {
        for j in i..m {
            for (k, a) in monos.iter().enumerate() {
                let d = a.iter().map(|&e| e as usize).sum::<usize>();
                let c = amplitude * rng.gen_range(-1.0..1.0) / libm::sqrt(per_degree[d] as f64);
                coeffs[i * m + j][k] = c;
                coeffs[j * m + i][k] = c;
            }
        }
    }
    MetricChart::new(
        format!("random degree-{degree} metric, signature ({p},{q}), seed {seed}"),
        (p, q),
        Domain::cube(m, 0.5),
        move |x| {
            let space = x[0].space();
            let o = x[0].order();
            let mono: Vec<Jet> = monos
                .iter()
                .map(|a| {
                    let mut t = Jet::zero(space, o).add_const(1.0);
                    for (xi, &e) in x.iter().zip(a) {
                        for _ in 0..e {
                            t = &t * xi;
                        }
                    }
                    t
                })
                .collect();
            Ok((0..m * m)
                .map(|i| {
                    let mut s = Jet::zero(space, o);
                    if i / m == i % m {
                        s = s.add_const(if i / m < p { 1.0 } else { -1.0 });
                    }
                    for (c, t) in coeffs[i].iter().zip(&mono) {
                        s.add_scaled(*c, t);
                    }
                    s
                })
                .collect())
        },
    )
}

/// φ = Σ_j a_j sin(b_j·x + c_j) with seeded coefficients.
pub fn random_conformal_factor(dim: usize, amplitude: f64, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms: Vec<(f64, Vec<f64>, f64)> = (0..3)
        .map(|_| {
            (
                amplitude * rng.gen_range(-1.0..1.0),
                (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                rng.gen_range(0.0..core::f64::consts::TAU),
            )
        })
        .collect();
    ScalarField::new(format!("φ[seed {seed}]"), move |x| {
        let mut s = Jet::zero(x[0].space(), x[0].order());
        for (a, b, c) in &terms {
            let mut arg = Jet::zero(x[0].space(), x[0].order()).add_const(*c);
            for (xi, bi) in x.iter().zip(b) {
                arg.add_scaled(*bi, xi);
            }
            s.add_scaled(*a, &arg.sin());
        }
        Ok(s)
    })
}

/// Seeded random linear coordinate change, well conditioned.
pub fn random_linear_map(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dim * dim)
        .map(|i| (if i / dim == i % dim { 1.0 } else { 0.0 }) + 0.3 * rng.gen_range(-1.0..1.0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation_r3() -> VectorFieldOnChart {
        VectorFieldOnChart::new("rotation", |x| {
            let z = Jet::zero(x[0].space(), x[0].order());
            Ok(alloc::vec![-&x[1], x[0].clone(), z])
        })
    }

    #[test]
    fn flat_is_flat() {
        let chart = flat_chart(3, 2, 1.0);
        let pts = chart.sample_points(1, 3).unwrap();
        for p in &pts {
            let s = curvature_suite(&chart, p).unwrap();
            for v in [&s.christoffel, &s.riemann, &s.ricci, &s.schouten, &s.weyl, &s.cotton] {
                assert!(max_abs(v) < 1e-12);
            }
            assert_eq!(chart.signature_at(p).unwrap(), (3, 2));
        }
        let r = weyl_divergence_residual(&chart, &pts).unwrap();
        assert!(r.residual < 1e-12 && r.fitted_constant.is_none());
    }

    #[test]
    fn sphere_schouten_is_minus_half_metric() {
        // Ric = (m−1)g and (m−1)g + (m−2)P + tr(P)g = 0 give P = −g/2.
        for m in [3, 4, 5] {
            let chart = round_sphere_chart(m);
            for p in chart.sample_points(2, 4).unwrap() {
                let geom = PointGeometry::new(&chart, &p).unwrap();
                let g = geom.metric();
                let dev = geom.schouten().iter().zip(g).map(|(a, b)| (a + 0.5 * b).abs()).fold(0.0, f64::max);
                assert!(dev < 1e-9, "m={m}: {dev}");
                assert!(geom.schouten_residual() < 1e-10);
                assert!(max_abs(&geom.weyl()) < 1e-9);
            }
        }
    }

    #[test]
    fn killing_and_dilation() {
        let chart = flat_chart(3, 0, 1.0);
        let p = [0.3, -0.2, 0.5];
        let (res, lambda) = conformal_killing_residual(&chart, &rotation_r3(), &p).unwrap();
        assert!(max_abs(&res) < 1e-14 && lambda.abs() < 1e-14);

        // x∂x on dx² is conformal with λ = 2; the line is padded to dimension 3.
        let dil = VectorFieldOnChart::new("dilation", |x| Ok(x.to_vec()));
        let (res, lambda) = conformal_killing_residual(&chart, &dil, &p).unwrap();
        assert!(max_abs(&res) < 1e-14);
        assert!((lambda - 2.0).abs() < 1e-14);

        let geom = PointGeometry::new(&chart, &p).unwrap();
        let t = VectorFieldOnChart::new("translation", |x| {
            let z = Jet::zero(x[0].space(), x[0].order());
            Ok(alloc::vec![z.add_const(1.0), z.clone(), z])
        });
        let s = tractor_split(&geom, &t, 1e-12).unwrap();
        assert!(max_abs(&s.k_form) < 1e-14 && max_abs(&s.gamma) < 1e-14);
        for v in &geom.frame.vectors {
            assert!(tractor_derivative(&geom, &s, v).max_abs() < 1e-12);
        }
        let s = tractor_split(&geom, &rotation_r3(), 1e-12).unwrap();
        assert_eq!(s.alpha, 0.0);
        assert!(s.skew_residual(&geom) < 1e-14);
        let tc = trace_contraction_check(&geom, &s, 1e-12).unwrap();
        assert_eq!(tc.max_abs(), 0.0);
    }

    #[test]
    fn non_killing_field_is_rejected_and_row4_sees_it() {
        let chart = flat_chart(4, 0, 1.0);
        let geom = PointGeometry::new(&chart, &[0.1, 0.2, -0.3, 0.4]).unwrap();
        let f = VectorFieldOnChart::new("shear", |x| {
            let z = Jet::zero(x[0].space(), x[0].order());
            Ok(alloc::vec![&x[1] * &x[1], z.clone(), z.clone(), z])
        });
        assert!(matches!(tractor_split(&geom, &f, 1e-9), Err(ConformalError::NotConformalKilling { .. })));

        // Row 4 is the trace-free symmetric part of ∇k: half the conformal Killing residual.
        let (res, _) = geom.conformal_killing(&f).unwrap();
        assert!(max_abs(&res) > 0.1);
        let s = tractor_split(&geom, &f, f64::INFINITY).unwrap();
        for v in &geom.frame.vectors {
            let row4 = geom.lower(&tractor_derivative(&geom, &s, v).row4);
            for b in 0..4 {
                let half: f64 = (0..4).map(|a| 0.5 * res[a * 4 + b] * v[a]).sum();
                assert!((row4[b] - half).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn random_metric_identities() {
        for seed in 0..3 {
            let chart = random_polynomial_chart(4, 0, 4, 0.3, seed);
            let pts = chart.sample_points(seed, 3).unwrap();
            let r = weyl_divergence_residual(&chart, &pts).unwrap();
            assert!(r.residual < 1e-6, "{r:?}");
            let c = r.fitted_constant.unwrap();
            assert!((c + 1.0).abs() < 1e-6, "fitted {c}");
            for p in &pts {
                let g = PointGeometry::new(&chart, p).unwrap();
                assert!(g.schouten_residual() < 1e-10);
                assert!(g.weyl_trace() < 1e-9);
            }
        }
    }

    #[test]
    fn divergence_constant_tracks_dimension() {
        for (p, q) in [(5, 0), (3, 3)] {
            let chart = random_polynomial_chart(p, q, 3, 0.2, 11);
            let pts = chart.sample_points(5, 2).unwrap();
            let r = weyl_divergence_residual(&chart, &pts).unwrap();
            let m = (p + q) as f64;
            assert!((r.fitted_constant.unwrap() - (3.0 - m)).abs() < 1e-6, "{r:?}");
        }
    }

    #[test]
    fn weyl_covariance_and_chart_independence() {
        let chart = random_polynomial_chart(3, 1, 3, 0.3, 4);
        let phi = random_conformal_factor(4, 0.4, 9);
        let resc = chart.rescaled(&phi);
        for p in chart.sample_points(3, 2).unwrap() {
            let w = PointGeometry::new(&chart, &p).unwrap().weyl();
            let w2 = PointGeometry::new(&resc, &p).unwrap().weyl();
            let e2 = libm::exp(2.0 * phi.at(&p).unwrap());
            let dev = w.iter().zip(&w2).map(|(a, b)| (e2 * a - b).abs()).fold(0.0, f64::max);
            assert!(dev < 1e-7, "{dev}");
        }
        let a = random_linear_map(4, 8);
        let ainv = invert(&a, 4).unwrap();
        let pulled = chart.linear_pullback(&a);
        for p in chart.sample_points(6, 2).unwrap() {
            let y = mat_vec(&ainv, &p);
            let g1 = PointGeometry::new(&chart, &p).unwrap();
            let g2 = PointGeometry::new(&pulled, &y).unwrap();
            assert!((g1.scalar() - g2.scalar()).abs() < 1e-9);
            let norm = |g: &PointGeometry| {
                let d = g.weyl_divergence();
                let c = g.cotton();
                let m = g.m;
                let mut s = 0.0;
                // |Cot|² through the inverse metric
                for i in 0..m * m * m {
                    for j in 0..m * m * m {
                        let (a1, b1, c1) = (i / (m * m), (i / m) % m, i % m);
                        let (a2, b2, c2) = (j / (m * m), (j / m) % m, j % m);
                        let h = g.metric_inverse();
                        s += h[a1 * m + a2] * h[b1 * m + b2] * h[c1 * m + c2] * c[i] * (c[j] + d[j]);
                    }
                }
                s
            };
            assert!((norm(&g1) - norm(&g2)).abs() < 1e-9 * (1.0 + norm(&g1).abs()));
        }
    }

    #[test]
    fn inertia_matches_frame() {
        let chart = random_polynomial_chart(4, 2, 2, 0.2, 3);
        for p in chart.sample_points(0, 5).unwrap() {
            let g = chart.metric_at(&p).unwrap();
            let f = pseudo_orthonormal_frame(&g, 6).unwrap();
            assert_eq!(f.signature(), (4, 2));
            assert_eq!(inertia(&g, 6, 1e-10), (4, 2));
        }
    }
}
