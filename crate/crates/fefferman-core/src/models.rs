//! Model geometries: the quadric S^{4n+3} × S³, the quaternionic Heisenberg
//! group with its flat qc structure, and the Fefferman metric over it.
//!
//! Quaternions are stored as (re, i, j, k). A point of Hⁿ is n consecutive
//! quaternions, and I_s acts on Hⁿ by left multiplication with i, j, k.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::conformal::{
    jet_inverse, max_abs_of, ConformalError, Domain, MetricChart, PointGeometry, VectorFieldOnChart,
};
use crate::jet::{coordinate_jets, Jet, JetError, JetSpace};

/// Left multiplication by i, j, k on R⁴ = H: (L_s)_{ab} = e_a-component of u_s·e_b.
pub fn left_mult(s: usize) -> [[f64; 4]; 4] {
    let mut m = [[0.0; 4]; 4];
    for b in 0..4 {
        let mut e = [0.0; 4];
        e[b] = 1.0;
        let mut u = [0.0; 4];
        u[s + 1] = 1.0;
        let r = qmul(&u, &e);
        for a in 0..4 {
            m[a][b] = r[a];
        }
    }
    m
}

pub fn qmul(p: &[f64; 4], q: &[f64; 4]) -> [f64; 4] {
    [
        p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
        p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
        p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
        p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0],
    ]
}

fn qmul_jets(p: &[Jet], q: &[Jet]) -> [Jet; 4] {
    let t = |a: &Jet, b: &Jet| a * b;
    [
        &(&(&t(&p[0], &q[0]) - &t(&p[1], &q[1])) - &t(&p[2], &q[2])) - &t(&p[3], &q[3]),
        &(&(&t(&p[0], &q[1]) + &t(&p[1], &q[0])) + &t(&p[2], &q[3])) - &t(&p[3], &q[2]),
        &(&(&t(&p[0], &q[2]) - &t(&p[1], &q[3])) + &t(&p[2], &q[0])) + &t(&p[3], &q[1]),
        &(&(&t(&p[0], &q[3]) + &t(&p[1], &q[2])) - &t(&p[2], &q[1])) + &t(&p[3], &q[0]),
    ]
}

fn conj_jets(q: &[Jet]) -> [Jet; 4] {
    [q[0].clone(), -&q[1], -&q[2], -&q[3]]
}

fn zero_like(x: &[Jet]) -> Jet {
    Jet::zero(x[0].space(), x.iter().map(Jet::order).min().unwrap_or(0))
}

/// Point of the unit sphere over a graph chart: (√(1 − |u|²), u).
fn sphere_point(u: &[Jet]) -> Result<Vec<Jet>, JetError> {
    let mut r = zero_like(u).add_const(1.0);
    for x in u {
        r.add_mul(&(-x), x);
    }
    let mut p = Vec::with_capacity(u.len() + 1);
    p.push(r.sqrt()?);
    p.extend(u.iter().cloned());
    Ok(p)
}

/// Round metric of the unit sphere in graph coordinates: δ + u uᵀ/(1 − |u|²).
fn sphere_metric(u: &[Jet]) -> Result<Vec<Jet>, JetError> {
    let d = u.len();
    let mut r = zero_like(u).add_const(1.0);
    for x in u {
        r.add_mul(&(-x), x);
    }
    let inv = r.recip()?;
    let mut g = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let mut e = &(&u[a] * &u[b]) * &inv;
            if a == b {
                e = e.add_const(1.0);
            }
            g.push(e);
        }
    }
    Ok(g)
}

/// u_s·v on each quaternion of v.
fn left_action(s: usize, v: &[Jet]) -> Vec<Jet> {
    let l = left_mult(s);
    let mut out = Vec::with_capacity(v.len());
    for block in v.chunks(4) {
        for a in 0..4 {
            let mut c = zero_like(block);
            for b in 0..4 {
                if l[a][b] != 0.0 {
                    c.add_scaled(l[a][b], &block[b]);
                }
            }
            out.push(c);
        }
    }
    out
}

/// The quadric chart with its three rotation fields.
#[derive(Clone, Debug)]
pub struct QuadricModel {
    pub n: usize,
    pub chart: MetricChart,
    pub k: [VectorFieldOnChart; 3],
}

/// S^{4n+3} × S³ with f = g_round ⊕ (−g_round) in graph coordinates
/// (first real coordinate eliminated on each factor), and k_s generated by
/// v ↦ u_s·v on H^{n+1} × H.
pub fn quadric_model(n: usize) -> QuadricModel {
    assert!(n >= 1);
    let d1 = 4 * n + 3;
    let m = d1 + 3;
    let domain = Domain::Product(alloc::vec![Domain::ball(d1, 0.9), Domain::ball(3, 0.9)]);
    let chart = MetricChart::new(format!("quadric S^{d1} x S^3"), (d1, 3), domain, move |x| {
        let g1 = sphere_metric(&x[..d1])?;
        let g2 = sphere_metric(&x[d1..])?;
        let mut g = alloc::vec![zero_like(x); m * m];
        for a in 0..d1 {
            for b in 0..d1 {
                g[a * m + b] = g1[a * d1 + b].clone();
            }
        }
        for a in 0..3 {
            for b in 0..3 {
                g[(d1 + a) * m + d1 + b] = -&g2[a * 3 + b];
            }
        }
        Ok(g)
    });
    let field = |s: usize| {
        VectorFieldOnChart::new(format!("k{}", s + 1), move |x: &[Jet]| {
            let v = sphere_point(&x[..d1])?;
            let w = sphere_point(&x[d1..])?;
            let mut out: Vec<Jet> = left_action(s, &v)[1..].to_vec();
            out.extend_from_slice(&left_action(s, &w)[1..]);
            Ok(out)
        })
    };
    QuadricModel { n, chart, k: [field(0), field(1), field(2)] }
}

// ---------------------------------------------------------------------------
// quaternionic Heisenberg group

pub type FormsFn = Arc<dyn Fn(&[Jet]) -> Result<Vec<Vec<Jet>>, JetError> + Send + Sync>;

/// A qc structure on a chart of dimension 4n+3.
#[derive(Clone)]
pub struct QcData {
    pub n: usize,
    pub dim: usize,
    /// η¹, η², η³ as one-forms (components in chart coordinates).
    pub eta: FormsFn,
    /// A frame X_1..X_{4n} of D = ker η.
    pub horizontal: FormsFn,
    /// ξ_1, ξ_2, ξ_3.
    pub reeb: FormsFn,
    /// I_s on D in the horizontal frame: I_s X_a = Σ_b (I_s)_{ba} X_b.
    pub structures: [Vec<f64>; 3],
    /// Horizontal metric in the horizontal frame.
    pub metric: Vec<f64>,
    pub scal: f64,
    pub domain: Domain,
}

impl core::fmt::Debug for QcData {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "QcData(n = {}, scal = {})", self.n, self.scal)
    }
}

/// Im(H) × Hⁿ with coordinates (t, x), η^s = dt_s + Σ_b (I_s x)_b dx_b.
pub fn heisenberg_qc(n: usize) -> QcData {
    assert!(n >= 1);
    let d = 4 * n;
    let dim = d + 3;
    let structures = [0, 1, 2].map(|s| {
        let l = left_mult(s);
        let mut m = alloc::vec![0.0; d * d];
        for blk in 0..n {
            for a in 0..4 {
                for b in 0..4 {
                    m[(4 * blk + a) * d + 4 * blk + b] = l[a][b];
                }
            }
        }
        m
    });
    let eta: FormsFn = Arc::new(move |x: &[Jet]| {
        let ix: Vec<Vec<Jet>> = (0..3).map(|s| left_action(s, &x[3..])).collect();
        Ok((0..3)
            .map(|s| {
                let mut w = alloc::vec![zero_like(x); dim];
                w[s] = w[s].add_const(1.0);
                w[3..3 + d].clone_from_slice(&ix[s][..d]);
                w
            })
            .collect())
    });
    let horizontal: FormsFn = Arc::new(move |x: &[Jet]| {
        let ix: Vec<Vec<Jet>> = (0..3).map(|s| left_action(s, &x[3..])).collect();
        Ok((0..d)
            .map(|a| {
                let mut v = alloc::vec![zero_like(x); dim];
                v[3 + a] = v[3 + a].add_const(1.0);
                for s in 0..3 {
                    v[s] = -&ix[s][a];
                }
                v
            })
            .collect())
    });
    let reeb: FormsFn = Arc::new(move |x: &[Jet]| {
        Ok((0..3)
            .map(|s| {
                let mut v = alloc::vec![zero_like(x); dim];
                v[s] = v[s].add_const(1.0);
                v
            })
            .collect())
    });
    let mut metric = alloc::vec![0.0; d * d];
    for a in 0..d {
        metric[a * d + a] = 1.0;
    }
    QcData {
        n,
        dim,
        eta,
        horizontal,
        reeb,
        structures,
        metric,
        scal: 0.0,
        domain: Domain::cube(dim, 1.0),
    }
}

/// Group law making η left invariant: (t, x)·(t', x') = (t + t' + (xᵀ I_s x')_s, x + x').
pub fn heisenberg_product(n: usize, p: &[f64], q: &[f64]) -> Vec<f64> {
    let d = 4 * n;
    let mut out = alloc::vec![0.0; d + 3];
    for s in 0..3 {
        let l = left_mult(s);
        let mut b = 0.0;
        for blk in 0..n {
            for a in 0..4 {
                for c in 0..4 {
                    b += p[3 + 4 * blk + a] * l[a][c] * q[3 + 4 * blk + c];
                }
            }
        }
        out[s] = p[s] + q[s] + b;
    }
    for a in 0..d {
        out[3 + a] = p[3 + a] + q[3 + a];
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct QcInvariants {
    /// max |η^r(ξ_s) − δ_rs|
    pub reeb_duality: f64,
    /// max |dη^r(ξ_s, X) + dη^s(ξ_r, X)| over the horizontal frame
    pub reeb_antisymmetry: f64,
    /// max |2g(I_s X_a, X_b) − dη^s(X_a, X_b)|
    pub levi: f64,
    /// max |I₁I₂ − I₃|, |I_s² + 1|
    pub quaternionic: f64,
    /// max |η^s(X_a)|
    pub horizontality: f64,
    /// max |[X_a, X_b] − 2Σ_s (I_s)_{ab} ξ_s|
    pub bracket: f64,
}

impl QcInvariants {
    pub fn max_residual(&self) -> f64 {
        self.reeb_duality
            .max(self.reeb_antisymmetry)
            .max(self.levi)
            .max(self.quaternionic)
            .max(self.horizontality)
            .max(self.bracket)
    }
}

impl QcData {
    pub fn check_invariants(&self, point: &[f64]) -> Result<QcInvariants, ConformalError> {
        let d = 4 * self.n;
        let space = JetSpace::new(self.dim, 2);
        let x = coordinate_jets(&space, point);
        let eta = (self.eta)(&x)?;
        let hor = (self.horizontal)(&x)?;
        let reeb = (self.reeb)(&x)?;
        let val = |v: &[Jet]| v.iter().map(Jet::value).collect::<Vec<f64>>();
        let pair = |w: &[Jet], v: &[f64]| w.iter().zip(v).map(|(a, b)| a.value() * b).sum::<f64>();
        let deta: Vec<Vec<f64>> = eta
            .iter()
            .map(|w| {
                let m = self.dim;
                let mut out = alloc::vec![0.0; m * m];
                for a in 0..m {
                    for b in 0..m {
                        out[a * m + b] = w[b].deriv(a).value() - w[a].deriv(b).value();
                    }
                }
                out
            })
            .collect();
        let two = |f: &[f64], u: &[f64], v: &[f64]| {
            let m = u.len();
            let mut s = 0.0;
            for a in 0..m {
                for b in 0..m {
                    s += f[a * m + b] * u[a] * v[b];
                }
            }
            s
        };
        let hv: Vec<Vec<f64>> = hor.iter().map(|v| val(v)).collect();
        let rv: Vec<Vec<f64>> = reeb.iter().map(|v| val(v)).collect();
        let mut r = QcInvariants {
            reeb_duality: 0.0,
            reeb_antisymmetry: 0.0,
            levi: 0.0,
            quaternionic: 0.0,
            horizontality: 0.0,
            bracket: 0.0,
        };
        for s in 0..3 {
            for q in 0..3 {
                let want = if s == q { 1.0 } else { 0.0 };
                r.reeb_duality = r.reeb_duality.max((pair(&eta[q], &rv[s]) - want).abs());
                for x in &hv {
                    let t = two(&deta[q], &rv[s], x) + two(&deta[s], &rv[q], x);
                    r.reeb_antisymmetry = r.reeb_antisymmetry.max(t.abs());
                }
            }
            for x in &hv {
                r.horizontality = r.horizontality.max(pair(&eta[s], x).abs());
            }
            let is = &self.structures[s];
            for a in 0..d {
                for b in 0..d {
                    // g(I_s X_a, X_b) = Σ_c (I_s)_{ca} g_{cb}
                    let g: f64 = (0..d).map(|c| is[c * d + a] * self.metric[c * d + b]).sum();
                    let t = 2.0 * g - two(&deta[s], &hv[a], &hv[b]);
                    r.levi = r.levi.max(t.abs());
                }
            }
        }
        let mul = |a: &[f64], b: &[f64]| {
            let mut c = alloc::vec![0.0; d * d];
            for i in 0..d {
                for k in 0..d {
                    for j in 0..d {
                        c[i * d + j] += a[i * d + k] * b[k * d + j];
                    }
                }
            }
            c
        };
        let i12 = mul(&self.structures[0], &self.structures[1]);
        for (a, b) in i12.iter().zip(&self.structures[2]) {
            r.quaternionic = r.quaternionic.max((a - b).abs());
        }
        for s in 0..3 {
            let sq = mul(&self.structures[s], &self.structures[s]);
            for i in 0..d * d {
                let id = if i / d == i % d { 1.0 } else { 0.0 };
                r.quaternionic = r.quaternionic.max((sq[i] + id).abs());
            }
        }
        // [X_a, X_b]^c = X_a^e ∂_e X_b^c − X_b^e ∂_e X_a^c
        for a in 0..d {
            for b in 0..d {
                for c in 0..self.dim {
                    let mut br = 0.0;
                    for e in 0..self.dim {
                        br += hv[a][e] * hor[b][c].deriv(e).value() - hv[b][e] * hor[a][c].deriv(e).value();
                    }
                    let mut want = 0.0;
                    for s in 0..3 {
                        want += 2.0 * self.structures[s][a * d + b] * rv[s][c];
                    }
                    r.bracket = r.bracket.max((br - want).abs());
                }
            }
        }
        Ok(r)
    }
}

// ---------------------------------------------------------------------------
// Fefferman metric

/// How η and σ are paired along the Sp(1) fiber.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigmaConvention {
    /// σ^s = components of the left Maurer–Cartan form q⁻¹dq, paired with η^s.
    MaurerCartan,
    /// σ as above, paired with η rotated by the adjoint action of q⁻¹,
    /// which equals pairing η^s with the components of dq·q⁻¹.
    AdjointRotated,
}

impl SigmaConvention {
    pub fn name(self) -> &'static str {
        match self {
            SigmaConvention::MaurerCartan => "maurer-cartan",
            SigmaConvention::AdjointRotated => "adjoint-rotated",
        }
    }
}

#[derive(Clone, Debug)]
pub struct FeffermanData {
    pub qc: QcData,
    pub convention: SigmaConvention,
    pub scal: f64,
    /// Coordinates (base coordinates, y) with fiber point q = (√(1 − |y|²), y).
    pub chart: MetricChart,
}

/// f = ḡ − 2Σ_s η^s ⊙ (σ^s + scal/(32n(n+2))·η^s) on base × Sp(1), with
/// a ⊙ b = ½(a⊗b + b⊗a) and ḡ the horizontal metric extended by zero on ξ.
pub fn fefferman_metric(qc: &QcData, convention: SigmaConvention, scal: f64) -> FeffermanData {
    let n = qc.n;
    let base = qc.dim;
    let m = base + 3;
    let corr = scal / (32.0 * n as f64 * (n as f64 + 2.0));
    let eta = qc.eta.clone();
    let hor_metric = qc.metric.clone();
    let d = 4 * n;
    let hor = qc.horizontal.clone();
    let reeb = qc.reeb.clone();
    let domain = Domain::Product(alloc::vec![qc.domain.clone(), Domain::ball(3, 0.9)]);
    let chart = MetricChart::new(
        format!("Fefferman metric over Heisenberg n={n} ({})", convention.name()),
        (4 * n + 3, 3),
        domain,
        move |x: &[Jet]| {
            let zero = zero_like(x);
            let eta_b = eta(&x[..base])?;
            let q = sphere_point(&x[base..])?;
            let q0inv = q[0].recip()?;
            // dq as quaternion-valued one-form: dq[c] = ∂_c q
            let dq: Vec<[Jet; 4]> = (0..m)
                .map(|c| {
                    let mut col: [Jet; 4] = core::array::from_fn(|_| zero.clone());
                    if c >= base {
                        for a in 0..4 {
                            // ∂q/∂y_j: real part via the chain rule, imaginary parts δ
                            col[a] = if a == 0 {
                                (-&x[c]).mul_jet(&q0inv)
                            } else if a == c - base + 1 {
                                zero.add_const(1.0)
                            } else {
                                zero.clone()
                            };
                        }
                    }
                    col
                })
                .collect();
            let qc_ = conj_jets(&q);
            let sigma: Vec<[Jet; 4]> = dq.iter().map(|c| qmul_jets(&qc_, c)).collect();
            // η extended to the total space
            let mut eta_t: Vec<Vec<Jet>> = eta_b
                .into_iter()
                .map(|mut w| {
                    w.truncate(base);
                    w.extend((0..3).map(|_| zero.clone()));
                    w
                })
                .collect();
            if convention == SigmaConvention::AdjointRotated {
                // (Ad_{q⁻¹}η)^s = Σ_r R_{rs} η^r with R_{rs} the r-component of q e_s q̄
                let mut rot = alloc::vec![zero.clone(); 9];
                for s in 0..3 {
                    let mut e: [Jet; 4] = core::array::from_fn(|_| zero.clone());
                    e[s + 1] = zero.add_const(1.0);
                    let qe = qmul_jets(&q, &e);
                    let qeq = qmul_jets(&qe, &qc_);
                    for r in 0..3 {
                        rot[r * 3 + s] = qeq[r + 1].clone();
                    }
                }
                eta_t = (0..3)
                    .map(|s| {
                        (0..m)
                            .map(|c| {
                                let mut v = zero.clone();
                                for r in 0..3 {
                                    v.add_mul(&rot[r * 3 + s], &eta_t[r][c]);
                                }
                                v
                            })
                            .collect()
                    })
                    .collect();
            }
            // ḡ = Σ g_ab θ^a θ^b with θ the coframe dual to (X_a, ξ_s)
            let mut frame = alloc::vec![zero.clone(); base * base];
            for (col, v) in hor(&x[..base])?.iter().chain(reeb(&x[..base])?.iter()).enumerate() {
                for i in 0..base {
                    frame[i * base + col] = v[i].clone();
                }
            }
            let theta = jet_inverse(&frame, base).map_err(|_| JetError::Pole { value: 0.0 })?;
            let mut f = alloc::vec![zero.clone(); m * m];
            for a in 0..d {
                for b in 0..d {
                    let gab = hor_metric[a * d + b];
                    if gab == 0.0 {
                        continue;
                    }
                    for i in 0..base {
                        for j in 0..base {
                            f[i * m + j].add_mul(&theta[a * base + i].scale(gab), &theta[b * base + j]);
                        }
                    }
                }
            }
            for s in 0..3 {
                for i in 0..m {
                    for j in 0..m {
                        let mut t = &eta_t[s][i] * &sigma[j][s + 1];
                        t.add_mul(&sigma[i][s + 1], &eta_t[s][j]);
                        t.add_mul(&eta_t[s][i].scale(2.0 * corr), &eta_t[s][j]);
                        f[i * m + j] = &f[i * m + j] - &t;
                    }
                }
            }
            Ok(f)
        },
    );
    FeffermanData { qc: qc.clone(), convention, scal, chart }
}

/// Generators of the right Sp(1) action q ↦ q·u_r on the fiber coordinates.
pub fn sp1_fundamental_fields(fd: &FeffermanData) -> [VectorFieldOnChart; 3] {
    let base = fd.qc.dim;
    [0, 1, 2].map(|r| {
        VectorFieldOnChart::new(format!("vertical k{}", r + 1), move |x: &[Jet]| {
            let zero = zero_like(x);
            let q = sphere_point(&x[base..])?;
            let mut u: [Jet; 4] = core::array::from_fn(|_| zero.clone());
            u[r + 1] = zero.add_const(1.0);
            let qu = qmul_jets(&q, &u);
            let mut out = alloc::vec![zero.clone(); base];
            out.extend(qu[1..].iter().cloned());
            Ok(out)
        })
    })
}

pub type Mat3 = [[f64; 3]; 3];

/// σ^s(k_r) at a point, for the plain Maurer–Cartan σ and for dq·q⁻¹.
pub fn sigma_on_fields(fd: &FeffermanData, point: &[f64]) -> Result<(Mat3, Mat3), ConformalError> {
    let base = fd.qc.dim;
    let y = &point[base..];
    let r2: f64 = y.iter().map(|v| v * v).sum();
    let q = [libm::sqrt(1.0 - r2), y[0], y[1], y[2]];
    let qbar = [q[0], -q[1], -q[2], -q[3]];
    let mut left = [[0.0; 3]; 3];
    let mut right = [[0.0; 3]; 3];
    for r in 0..3 {
        let mut u = [0.0; 4];
        u[r + 1] = 1.0;
        // dq(k_r) = q·u_r
        let dq = qmul(&q, &u);
        let l = qmul(&qbar, &dq);
        let rr = qmul(&dq, &qbar);
        for s in 0..3 {
            left[s][r] = l[s + 1];
            right[s][r] = rr[s + 1];
        }
    }
    Ok((left, right))
}

/// max over sample points of the Weyl tensor size of a chart.
pub fn weyl_size(chart: &MetricChart, points: &[Vec<f64>]) -> Result<f64, ConformalError> {
    let space = JetSpace::new(chart.dim, crate::conformal::JET_ORDER);
    let mut worst = 0.0f64;
    for p in points {
        let g = PointGeometry::with_space(chart, &space, p)?;
        worst = worst.max(max_abs_of(&g.weyl()));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn left_mult_is_quaternionic() {
        let (i, j, k) = (left_mult(0), left_mult(1), left_mult(2));
        let mul = |a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]| {
            let mut c = [[0.0; 4]; 4];
            for r in 0..4 {
                for s in 0..4 {
                    for t in 0..4 {
                        c[r][s] += a[r][t] * b[t][s];
                    }
                }
            }
            c
        };
        assert_eq!(mul(&i, &j), k);
        assert_eq!(mul(&j, &i).map(|r| r.map(|x| -x)), k);
    }

    #[test]
    fn heisenberg_invariants_and_left_invariance() {
        for n in [1, 2] {
            let qc = heisenberg_qc(n);
            let mut rng_pts = Vec::new();
            for s in 0..5 {
                let mut p = alloc::vec![0.0; qc.dim];
                for (i, v) in p.iter_mut().enumerate() {
                    *v = libm::sin((s * 31 + i * 7) as f64) * 0.8;
                }
                rng_pts.push(p);
            }
            for p in &rng_pts {
                let inv = qc.check_invariants(p).unwrap();
                assert!(inv.max_residual() < 1e-12, "{inv:?}");
            }
            // L_h^*η = η: the pullback of η by x ↦ h·x agrees with η.
            let h = &rng_pts[0];
            let p = &rng_pts[1];
            let space = JetSpace::new(qc.dim, 1);
            let xj = coordinate_jets(&space, p);
            let hp = heisenberg_product(n, h, p);
            let eta_at_hp = (qc.eta)(&coordinate_jets(&JetSpace::new(qc.dim, 0), &hp)).unwrap();
            // Jacobian of left translation by h, column by column
            let eps = 1e-6;
            for s in 0..3 {
                for c in 0..qc.dim {
                    let mut pp = p.clone();
                    pp[c] += eps;
                    let mut pm = p.clone();
                    pm[c] -= eps;
                    let (a, b) = (heisenberg_product(n, h, &pp), heisenberg_product(n, h, &pm));
                    let pulled: f64 =
                        (0..qc.dim).map(|e| eta_at_hp[s][e].value() * (a[e] - b[e]) / (2.0 * eps)).sum();
                    let direct = (qc.eta)(&xj).unwrap()[s][c].value();
                    assert!((pulled - direct).abs() < 1e-8, "s={s} c={c}: {pulled} vs {direct}");
                }
            }
        }
    }

    #[test]
    fn quadric_fields_are_null_orthogonal_killing() {
        let model = quadric_model(1);
        let pts = model.chart.sample_points(3, 4).unwrap();
        for p in &pts {
            let geom = PointGeometry::new(&model.chart, p).unwrap();
            let ks: Vec<Vec<f64>> = model.k.iter().map(|k| k.at(p).unwrap()).collect();
            for a in 0..3 {
                assert!(geom.inner(&ks[a], &ks[a]).abs() < 1e-12);
                for b in a + 1..3 {
                    assert!(geom.inner(&ks[a], &ks[b]).abs() < 1e-12);
                }
                let (res, lambda) = geom.conformal_killing(&model.k[a]).unwrap();
                assert!(max_abs_of(&res) < 1e-10 && lambda.abs() < 1e-10);
            }
            assert!(max_abs_of(&geom.weyl()) < 1e-9);
        }
    }

    #[test]
    fn sigma_convention_arbiter() {
        let qc = heisenberg_qc(1);
        let pts_for = |fd: &FeffermanData| fd.chart.sample_points(17, 3).unwrap();
        let mc = fefferman_metric(&qc, SigmaConvention::MaurerCartan, 0.0);
        let ad = fefferman_metric(&qc, SigmaConvention::AdjointRotated, 0.0);
        let w_mc = weyl_size(&mc.chart, &pts_for(&mc)).unwrap();
        let w_ad = weyl_size(&ad.chart, &pts_for(&ad)).unwrap();
        assert!(w_mc > 1.0, "{w_mc}");
        assert!(w_ad < 1e-8, "{w_ad}");
        for p in pts_for(&ad) {
            assert_eq!(ad.chart.signature_at(&p).unwrap(), (7, 3));
        }
    }
}
