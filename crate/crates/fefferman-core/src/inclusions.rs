//! The graded inclusions g^qc ⊂ g^cr ⊂ g^co, their structural properties, and
//! the correspondence between cochains of the three algebras.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::checks::Check;
use crate::cohomology::{Cochain, KostantComplex};
use crate::lie::{smat_permute, DualBasisPair, Family, GradedLieAlgebra, LieError};
use crate::linalg::{inverse, rank_of, svec_from_dense, Coordinatizer, Echelon, SAcc, SVec, SparseMatrix};
use crate::matrix::Matrix;
use crate::scalar::{fmt_q, q, Complex, Q, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InclusionError {
    /// The image of a basis element is not in the target algebra.
    NotInTarget { label: String },
    /// B = c·B̃∘φ fails for every c.
    InconsistentKilling { a: String, b: String },
    /// The algebras do not have the shapes the construction expects.
    WrongFamily,
    /// φ₋(p) and φ₋(g₋) together do not span g̃₋.
    NotTransitive,
    Lie(LieError),
}

impl fmt::Display for InclusionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InclusionError::NotInTarget { label } => write!(f, "image of {label} is not in the target algebra"),
            InclusionError::InconsistentKilling { a, b } => {
                write!(f, "Killing forms are not proportional on the pair ({a}, {b})")
            }
            InclusionError::WrongFamily => write!(f, "algebras do not form a qc, cr, co tower"),
            InclusionError::NotTransitive => write!(f, "phi_-(g) does not span the target g_-"),
            InclusionError::Lie(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for InclusionError {}

impl From<LieError> for InclusionError {
    fn from(e: LieError) -> Self {
        InclusionError::Lie(e)
    }
}

/// Real ambient permutation (perm[new] = old) realizing g^qc ⊂ g^cr.
pub fn ambient_perm_qc_cr(n: usize) -> Vec<usize> {
    let nn = n + 2;
    let mut c = Vec::with_capacity(2 * nn);
    c.push(0);
    c.push(nn);
    c.extend((0..n).map(|a| 1 + a));
    c.extend((0..n).map(|a| nn + 1 + a));
    c.push(nn + n + 1);
    c.push(n + 1);
    let m = c.len();
    let mut r = c.clone();
    r.extend(c.iter().map(|&x| m + x));
    r
}

/// Real ambient permutation (perm[new] = old) realizing g^cr ⊂ g^co, where the
/// complex dimension of the cr ambient is `m`.
pub fn ambient_perm_cr_co(m: usize) -> Vec<usize> {
    let (re, im) = (|a: usize| a, |a: usize| m + a);
    let mut p = alloc::vec![re(0), im(0), re(1), im(1)];
    p.extend((2..m - 2).map(re));
    p.extend((2..m - 2).map(im));
    p.extend([im(m - 2), re(m - 2), im(m - 1), re(m - 1)]);
    p
}

#[derive(Clone, Debug)]
pub struct GradedInclusion<'a> {
    name: String,
    source: &'a GradedLieAlgebra,
    target: &'a GradedLieAlgebra,
    images: Vec<Vec<Q>>,
    coord: Coordinatizer,
}

impl<'a> GradedInclusion<'a> {
    pub fn from_images(
        name: impl Into<String>,
        source: &'a GradedLieAlgebra,
        target: &'a GradedLieAlgebra,
        images: Vec<Vec<Q>>,
    ) -> Self {
        assert_eq!(images.len(), source.dim());
        let coord = Coordinatizer::new(images.iter().map(|v| svec_from_dense(v)).collect());
        GradedInclusion { name: name.into(), source, target, images, coord }
    }

    /// φ(X) = P·X·Pᵗ on the real ambient matrices.
    pub fn from_ambient_permutation(
        name: impl Into<String>,
        source: &'a GradedLieAlgebra,
        target: &'a GradedLieAlgebra,
        perm: &[usize],
    ) -> Result<Self, InclusionError> {
        if source.ambient() != perm.len() || target.ambient() != perm.len() {
            return Err(InclusionError::WrongFamily);
        }
        let mut images = Vec::with_capacity(source.dim());
        for i in 0..source.dim() {
            let m = smat_permute(source.basis_matrix(i), perm, perm.len());
            let v = target
                .coords_of_matrix(&m)
                .ok_or_else(|| InclusionError::NotInTarget { label: source.label(i).into() })?;
            images.push(v);
        }
        Ok(Self::from_images(name, source, target, images))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &'a GradedLieAlgebra {
        self.source
    }

    pub fn target(&self) -> &'a GradedLieAlgebra {
        self.target
    }

    pub fn image(&self, i: usize) -> &[Q] {
        &self.images[i]
    }

    pub fn apply(&self, x: &[Q]) -> Vec<Q> {
        assert_eq!(x.len(), self.images.len());
        let mut out = self.target.zero();
        for (a, img) in x.iter().zip(&self.images) {
            if a.is_zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(img) {
                if !v.is_zero() {
                    *o += a * v;
                }
            }
        }
        out
    }

    /// Degree-d component of φ(x) in the target grading.
    pub fn component(&self, x: &[Q], d: i32) -> Vec<Q> {
        self.target.component(&self.apply(x), d)
    }

    pub fn minus_part(&self, x: &[Q]) -> Vec<Q> {
        self.target.minus_part(&self.apply(x))
    }

    pub fn plus_part(&self, x: &[Q]) -> Vec<Q> {
        let y = self.apply(x);
        y.iter()
            .enumerate()
            .map(|(i, v)| if self.target.degree(i) > 0 { v.clone() } else { Q::zero() })
            .collect()
    }

    /// Target degrees occurring in φ(e_i).
    pub fn degree_split(&self, i: usize) -> Vec<i32> {
        let mut d: Vec<i32> = self.images[i]
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(k, _)| self.target.degree(k))
            .collect();
        d.sort();
        d.dedup();
        d
    }

    /// x with φ(x) = y, if y ∈ φ(g).
    pub fn preimage(&self, y: &[Q]) -> Option<Vec<Q>> {
        self.coord.coords(&svec_from_dense(y))
    }

    /// `then ∘ self`.
    pub fn compose(&self, then: &GradedInclusion<'a>, name: impl Into<String>) -> GradedInclusion<'a> {
        assert!(core::ptr::eq(self.target, then.source));
        let images = self.images.iter().map(|v| then.apply(v)).collect();
        Self::from_images(name, self.source, then.target, images)
    }

    /// The constant c with B = c·B̃∘φ.
    pub fn killing_constant(&self) -> Result<Q, InclusionError> {
        let mut c: Option<Q> = None;
        let gram = self.source.killing_gram();
        for i in 0..self.source.dim() {
            for j in i..self.source.dim() {
                let bt = self.target.killing(&self.images[i], &self.images[j]);
                let bs = &gram[i][j];
                let err = || InclusionError::InconsistentKilling {
                    a: self.source.label(i).into(),
                    b: self.source.label(j).into(),
                };
                if bt.is_zero() {
                    if !bs.is_zero() {
                        return Err(err());
                    }
                    continue;
                }
                let r = bs / &bt;
                match &c {
                    None => c = Some(r),
                    Some(c0) if *c0 != r => return Err(err()),
                    _ => {}
                }
            }
        }
        c.ok_or(InclusionError::InconsistentKilling { a: String::new(), b: String::new() })
    }

    /// φ₋(e_i) as a sparse target vector.
    pub fn minus_image(&self, i: usize) -> SVec {
        svec_from_dense(&self.target.minus_part(&self.images[i]))
    }

    /// {X ∈ g : φ(X) ∈ p̃} as coordinate vectors.
    pub fn preimage_of_parabolic(&self) -> Vec<Vec<Q>> {
        let cols: Vec<SVec> = (0..self.source.dim()).map(|i| self.minus_image(i)).collect();
        SparseMatrix::from_columns(self.target.dim(), &cols)
            .kernel()
            .into_iter()
            .map(|k| crate::linalg::svec_to_dense(&k, self.source.dim()))
            .collect()
    }

    /// Graded version: the same subspace computed degree by degree.
    pub fn preimage_of_parabolic_by_degree(&self) -> Vec<(i32, Vec<Vec<Q>>)> {
        let mut out = Vec::new();
        for d in -self.source.depth()..=self.source.depth() {
            let idx = self.source.indices_of_degree(d);
            let cols: Vec<SVec> = idx.iter().map(|&i| self.minus_image(i)).collect();
            let ker = SparseMatrix::from_columns(self.target.dim(), &cols).kernel();
            let vecs = ker
                .into_iter()
                .map(|k| {
                    let mut v = self.source.zero();
                    for (c, x) in k {
                        v[idx[c]] = x;
                    }
                    v
                })
                .collect();
            out.push((d, vecs));
        }
        out
    }

    pub fn is_homomorphism(&self) -> Result<(), (usize, usize)> {
        let s = self.source;
        for i in 0..s.dim() {
            for j in (i + 1)..s.dim() {
                let lhs = self.apply(&svec_dense(s.structure_constants(i, j), s.dim()));
                let rhs = self.target.bracket(&self.images[i], &self.images[j]);
                if lhs != rhs {
                    return Err((i, j));
                }
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        let rows: Vec<SVec> = self.images.iter().map(|v| svec_from_dense(v)).collect();
        rank_of(self.target.dim(), &rows)
    }

    /// Structural conditions required of a Fefferman-type inclusion.
    pub fn structural_checks(&self) -> Result<Vec<Check>, InclusionError> {
        let s = self.source;
        let t = self.target;
        let mut out = Vec::new();
        match self.is_homomorphism() {
            Ok(()) => out.push(Check::new("homomorphism", true, "all basis brackets preserved")),
            Err((i, j)) => out.push(Check::new(
                "homomorphism",
                false,
                format!("[{}, {}] not preserved", s.label(i), s.label(j)),
            )),
        }
        let r = self.rank();
        out.push(Check::new("injective", r == s.dim(), format!("rank {} of {}", r, s.dim())));

        let mut rows: Vec<SVec> = self.images.iter().map(|v| svec_from_dense(v)).collect();
        rows.extend(t.indices_of_degree(0).iter().chain(&t.plus_indices()).map(|&k| alloc::vec![(k, Q::one())]));
        let span = rank_of(t.dim(), &rows);
        out.push(Check::new(
            "transitive: phi(g) + p~ = g~",
            span == t.dim(),
            format!("span {} of {}", span, t.dim()),
        ));

        let pre = self.preimage_of_parabolic();
        let in_p = pre.iter().all(|v| s.minus_part(v).iter().all(|c| c.is_zero()));
        out.push(Check::new(
            "phi^-1(p~) in p",
            in_p,
            format!("dim phi^-1(p~) = {}, dim p = {}", pre.len(), s.dim() - s.minus_indices().len()),
        ));

        let plus_ok = s.plus_indices().iter().all(|&i| self.minus_image(i).is_empty());
        out.push(Check::new("phi(p+) in p~", plus_ok, ""));

        let g0 = s.indices_of_degree(0);
        let cols: Vec<SVec> = g0.iter().map(|&i| self.minus_image(i)).collect();
        let k0 = SparseMatrix::from_columns(t.dim(), &cols).kernel();
        let g0_ok = k0.iter().all(|k| {
            let mut v = s.zero();
            for (c, x) in k {
                v[g0[*c]] = x.clone();
            }
            let img = self.apply(&v);
            img.iter().enumerate().all(|(m, x)| x.is_zero() || t.degree(m) == 0)
        });
        out.push(Check::new("phi(g0) cap p~ in g~0", g0_ok, format!("dim = {}", k0.len())));

        let mut ech = Echelon::new(t.dim());
        for &i in &s.minus_indices() {
            ech.insert(&self.minus_image(i));
        }
        let r_minus = ech.rank();
        let r_g0 = rank_of(t.dim(), &cols);
        for c in &cols {
            ech.insert(c);
        }
        let direct = ech.rank() == r_minus + r_g0 && r_minus == s.minus_indices().len();
        out.push(Check::new(
            "phi_-(g-) and phi_-(g0) independent",
            direct,
            format!("ranks {} + {} -> {}", r_minus, r_g0, ech.rank()),
        ));

        let c = self.killing_constant()?;
        out.push(Check::new("Killing proportional", true, format!("B = {} B~ o phi", fmt_q(&c))));
        Ok(out)
    }

    /// The compatibility conditions on p₊ and g₀, checked on the Killing-dual
    /// basis of p₊.
    pub fn pairing_checks(&self) -> Result<Vec<Check>, InclusionError> {
        let s = self.source;
        let t = self.target;
        let DualBasisPair { minus, plus } = s.dual_basis()?;
        let phi0 = |x: &[Q]| self.component(x, 0);
        let mut group_zero = Vec::new();
        let mut group_pair = Vec::new();
        let mut bad = Vec::new();
        for (a, z) in plus.iter().enumerate() {
            let z0 = phi0(z);
            if z0.iter().all(|c| c.is_zero()) {
                group_zero.push(a);
                continue;
            }
            let zp = self.plus_part(z);
            let ok = minus.iter().all(|&x| {
                let ex = s.basis_vector(x);
                t.killing(&self.minus_part(&ex), &zp) == t.killing(&phi0(&ex), &z0)
            });
            if ok {
                group_pair.push(a);
            } else {
                bad.push(String::from(s.label(minus[a])));
            }
        }
        let mut out = Vec::new();
        out.push(Check::new(
            "p+ dual basis: phi0(Z) = 0 or pairing identity",
            bad.is_empty(),
            format!("{} with phi0 = 0, {} with identity, failing: {:?}", group_zero.len(), group_pair.len(), bad),
        ));
        let mut cross_ok = true;
        for &i in &group_zero {
            for &j in &group_pair {
                let xi = s.basis_vector(minus[i]);
                let xj = s.basis_vector(minus[j]);
                if !t.killing(&self.minus_part(&xi), &self.plus_part(&plus[j])).is_zero()
                    || !t.killing(&self.minus_part(&xj), &self.plus_part(&plus[i])).is_zero()
                {
                    cross_ok = false;
                }
            }
        }
        out.push(Check::new("cross pairings between the two groups vanish", cross_ok, ""));
        let mut g0_ok = true;
        for &a in &s.indices_of_degree(0) {
            let ea = s.basis_vector(a);
            let (am, a0) = (self.minus_part(&ea), phi0(&ea));
            for z in &plus {
                if !t.killing(&am, &self.plus_part(z)).is_zero() || !t.killing(&a0, &phi0(z)).is_zero() {
                    g0_ok = false;
                }
            }
        }
        out.push(Check::new("g0 pairings vanish", g0_ok, ""));
        Ok(out)
    }

    /// Hypotheses of the second codifferential identity at the basis element x.
    pub fn second_identity_hypotheses(&self, x: usize) -> Vec<Check> {
        let s = self.source;
        let t = self.target;
        let i = -s.degree(x);
        let ex = s.basis_vector(x);
        let split = self.degree_split(x);
        let mut out = Vec::new();
        out.push(Check::new(
            format!("phi({}) in degrees -{} and 0", s.label(x), i),
            split.iter().all(|&d| d == -i || d == 0),
            format!("degrees {:?}", split),
        ));
        let xm = self.component(&ex, -i);
        let comm = s.plus_indices().iter().all(|&z| {
            let z0 = self.component(&s.basis_vector(z), 0);
            t.bracket(&xm, &z0).iter().all(|c| c.is_zero())
        });
        out.push(Check::new("[phi_-i(X), phi0(Z)] = 0 on p+", comm, ""));
        for j in 1..i {
            let idx = s.indices_of_degree(j);
            let rows: Vec<SVec> = idx.iter().map(|&z| svec_from_dense(&self.component(&s.basis_vector(z), 0))).collect();
            let r = rank_of(t.dim(), &rows);
            out.push(Check::new(
                format!("phi0 injective on g{}", j),
                r == idx.len(),
                format!("rank {} of {}", r, idx.len()),
            ));
        }
        out
    }

    /// B(E, X) = c'·B̃(Ẽ, φX) for every X, with Ẽ the given target element.
    pub fn scaling_constant(&self, e_target: &[Q]) -> Option<Q> {
        let s = self.source;
        let e = s.grading_element();
        let mut c: Option<Q> = None;
        for i in 0..s.dim() {
            let ei = s.basis_vector(i);
            let b = s.killing(e, &ei);
            let bt = self.target.killing(e_target, &self.images[i]);
            if bt.is_zero() {
                if !b.is_zero() {
                    return None;
                }
                continue;
            }
            let r = b / bt;
            match &c {
                None => c = Some(r),
                Some(c0) if *c0 != r => return None,
                _ => {}
            }
        }
        c
    }
}

fn svec_dense(v: &SVec, n: usize) -> Vec<Q> {
    crate::linalg::svec_to_dense(v, n)
}

/// φ^cr_qc.
pub fn build_phi_qc_cr<'a>(
    qc: &'a GradedLieAlgebra,
    cr: &'a GradedLieAlgebra,
) -> Result<GradedInclusion<'a>, InclusionError> {
    let n = match (qc.family(), cr.family()) {
        (Family::Qc { n }, Family::Cr { p, q }) if p == 2 * n + 1 && q == 1 => n,
        _ => return Err(InclusionError::WrongFamily),
    };
    GradedInclusion::from_ambient_permutation("qc->cr", qc, cr, &ambient_perm_qc_cr(n))
}

/// φ^co_cr.
pub fn build_phi_cr_co<'a>(
    cr: &'a GradedLieAlgebra,
    co: &'a GradedLieAlgebra,
) -> Result<GradedInclusion<'a>, InclusionError> {
    let m = match (cr.family(), co.family()) {
        (Family::Cr { p, q }, Family::Co { p: pp, q: qq }) if pp == 2 * p + 1 && qq == 2 * q + 1 => p + q + 2,
        _ => return Err(InclusionError::WrongFamily),
    };
    GradedInclusion::from_ambient_permutation("cr->co", cr, co, &ambient_perm_cr_co(m))
}

/// φ^co_qc from the composite ambient permutation, built without composing.
pub fn build_phi_qc_co_direct<'a>(
    qc: &'a GradedLieAlgebra,
    co: &'a GradedLieAlgebra,
) -> Result<GradedInclusion<'a>, InclusionError> {
    let n = match (qc.family(), co.family()) {
        (Family::Qc { n }, Family::Co { p, q }) if p == 4 * n + 3 && q == 3 => n,
        _ => return Err(InclusionError::WrongFamily),
    };
    let p1 = ambient_perm_qc_cr(n);
    let p2 = ambient_perm_cr_co(2 * n + 4);
    let perm: Vec<usize> = p2.iter().map(|&k| p1[k]).collect();
    GradedInclusion::from_ambient_permutation("qc->co (direct)", qc, co, &perm)
}

/// The three algebras and the inclusions between them.
pub struct Tower<'a> {
    pub n: usize,
    pub qc: &'a GradedLieAlgebra,
    pub cr: &'a GradedLieAlgebra,
    pub co: &'a GradedLieAlgebra,
    pub qc_cr: GradedInclusion<'a>,
    pub cr_co: GradedInclusion<'a>,
    pub qc_co: GradedInclusion<'a>,
}

impl<'a> Tower<'a> {
    pub fn new(algs: &'a [GradedLieAlgebra; 3]) -> Result<Self, InclusionError> {
        let n = match algs[0].family() {
            Family::Qc { n } => n,
            _ => return Err(InclusionError::WrongFamily),
        };
        let qc_cr = build_phi_qc_cr(&algs[0], &algs[1])?;
        let cr_co = build_phi_cr_co(&algs[1], &algs[2])?;
        let qc_co = qc_cr.compose(&cr_co, "qc->co");
        Ok(Tower { n, qc: &algs[0], cr: &algs[1], co: &algs[2], qc_cr, cr_co, qc_co })
    }

    pub fn composition_coherent(&self) -> Result<bool, InclusionError> {
        let direct = build_phi_qc_co_direct(self.qc, self.co)?;
        Ok((0..self.qc.dim()).all(|i| direct.image(i) == self.qc_co.image(i)))
    }
}

/// Grading-reversing involution of an algebra: conjugation by the ambient
/// permutation exchanging the two null directions.
pub fn reversal_involution<'a>(alg: &'a GradedLieAlgebra) -> Result<GradedInclusion<'a>, InclusionError> {
    let perm: Vec<usize> = match alg.family() {
        Family::Qc { n } => {
            let nn = n + 2;
            let h: Vec<usize> = (0..nn).map(|k| if k == 0 { nn - 1 } else if k == nn - 1 { 0 } else { k }).collect();
            (0..4).flat_map(|b| h.iter().map(move |&k| b * nn + k)).collect()
        }
        Family::Cr { p, q } => {
            let m = p + q + 2;
            let h: Vec<usize> = (0..m).map(|k| if k == 0 { m - 1 } else if k == m - 1 { 0 } else { k }).collect();
            (0..2).flat_map(|b| h.iter().map(move |&k| b * m + k)).collect()
        }
        Family::Co { p, q } => {
            let m = p + q + 2;
            (0..m).map(|k| if k == 0 { m - 1 } else if k == m - 1 { 0 } else { k }).collect()
        }
    };
    GradedInclusion::from_ambient_permutation("reversal", alg, alg, &perm)
}

/// Correspondence between C²(g₋, g) and cochains on g̃₋ killing φ₋(p).
pub struct CochainInducer<'b> {
    phi: &'b GradedInclusion<'b>,
    src: &'b KostantComplex<'b>,
    tgt: &'b KostantComplex<'b>,
    complement: Vec<usize>,
    /// L(ẽ_β) in source g₋ positions, for each target g₋ position β.
    lift: Vec<Vec<Q>>,
    transfer: SparseMatrix,
    constant: Q,
    gram_inv: Matrix<Q>,
}

impl<'b> CochainInducer<'b> {
    pub fn new(
        phi: &'b GradedInclusion<'b>,
        src: &'b KostantComplex<'b>,
        tgt: &'b KostantComplex<'b>,
    ) -> Result<Self, InclusionError> {
        let s = phi.source();
        let ms = src.minus().len();
        let mt = tgt.minus().len();
        let mut ech = Echelon::new(mt);
        let mut cols: Vec<Vec<Q>> = Vec::new();
        for &i in src.minus() {
            let v = tgt.minus_coords(phi.image(i));
            if !ech.insert(&svec_from_dense(&v)) {
                return Err(InclusionError::NotTransitive);
            }
            cols.push(v);
        }
        let mut complement = Vec::new();
        for &a in s.indices_of_degree(0).iter().chain(&s.plus_indices()) {
            if ech.rank() == mt {
                break;
            }
            let v = tgt.minus_coords(phi.image(a));
            if ech.insert(&svec_from_dense(&v)) {
                complement.push(a);
                cols.push(v);
            }
        }
        if ech.rank() != mt {
            return Err(InclusionError::NotTransitive);
        }
        let m = Matrix::from_fn(mt, mt, |r, c| cols[c][r].clone());
        let inv = inverse(&m).ok_or(InclusionError::NotTransitive)?;
        let lift: Vec<Vec<Q>> = (0..mt).map(|b| (0..ms).map(|a| inv.get(a, b).clone()).collect()).collect();
        let transfer = Self::transfer_matrix(phi, src, tgt, &lift);
        let constant = phi.killing_constant()?;
        let gram = s.killing_gram();
        let gm = Matrix::from_fn(s.dim(), s.dim(), |r, c| gram[r][c].clone());
        let gram_inv = inverse(&gm).ok_or(LieError::SingularPairing)?;
        Ok(CochainInducer { phi, src, tgt, complement, lift, transfer, constant, gram_inv })
    }

    fn transfer_matrix(
        phi: &GradedInclusion<'_>,
        src: &KostantComplex<'_>,
        tgt: &KostantComplex<'_>,
        lift: &[Vec<Q>],
    ) -> SparseMatrix {
        let ds = phi.source().dim();
        let dt = phi.target().dim();
        let imgs: Vec<SVec> = (0..ds).map(|v| svec_from_dense(phi.image(v))).collect();
        let mut rows: Vec<SAcc> = (0..tgt.dim_cochains(2)).map(|_| SAcc::new()).collect();
        for (ti, tt) in tgt.tuples(2).iter().enumerate() {
            let (lb, lg) = (&lift[tt[0]], &lift[tt[1]]);
            for (si, st) in src.tuples(2).iter().enumerate() {
                let (a, b) = (st[0], st[1]);
                let coef = &lb[a] * &lg[b] - &lb[b] * &lg[a];
                if coef.is_zero() {
                    continue;
                }
                for (v, img) in imgs.iter().enumerate() {
                    for (w, c) in img {
                        rows[ti * dt + w].add(si * ds + v, &coef * c);
                    }
                }
            }
        }
        SparseMatrix {
            nrows: tgt.dim_cochains(2),
            ncols: src.dim_cochains(2),
            rows: rows.into_iter().map(|r| r.finish()).collect(),
        }
    }

    pub fn inclusion(&self) -> &GradedInclusion<'b> {
        self.phi
    }

    /// Source g₀ (and p₊ if needed) elements whose φ₋ complete φ₋(g₋).
    pub fn complement(&self) -> &[usize] {
        &self.complement
    }

    pub fn killing_constant(&self) -> &Q {
        &self.constant
    }

    /// L(ẽ_β) in source g₋ positions.
    pub fn lift(&self, beta: usize) -> &[Q] {
        &self.lift[beta]
    }

    /// C²(g₋, g) → C²(g̃₋, g̃).
    pub fn transfer(&self) -> &SparseMatrix {
        &self.transfer
    }

    /// κ̃ = φ∘κ∘(L × L).
    pub fn induce(&self, kappa: &Cochain) -> Cochain {
        Cochain { degree: 2, coeffs: self.transfer.apply(&kappa.coeffs) }
    }

    /// κ with φ∘κ = κ̃∘φ₋, or None if κ̃ leaves φ(g).
    pub fn restrict(&self, kt: &Cochain) -> Option<Cochain> {
        let ds = self.phi.source().dim();
        let mut out = self.src.zero(2);
        let mins: Vec<Vec<Q>> = self.src.minus().iter().map(|&i| self.phi.target().minus_part(self.phi.image(i))).collect();
        for (si, st) in self.src.tuples(2).iter().enumerate() {
            let val = self.tgt.eval(kt, &[&mins[st[0]], &mins[st[1]]]);
            let pre = self.phi.preimage(&val)?;
            out.coeffs[si * ds..(si + 1) * ds].clone_from_slice(&pre);
        }
        Some(out)
    }

    /// Whether κ̃ vanishes whenever one argument lies in φ₋(p).
    pub fn kills_parabolic(&self, kt: &Cochain) -> bool {
        let s = self.phi.source();
        let ps: Vec<usize> = (0..s.dim()).filter(|&i| s.degree(i) >= 0).collect();
        ps.iter().all(|&a| {
            let pa = self.phi.target().minus_part(self.phi.image(a));
            self.tgt.minus().iter().all(|&b| {
                let eb = self.phi.target().basis_vector(b);
                self.tgt.eval(kt, &[&pa, &eb]).iter().all(|c| c.is_zero())
            })
        })
    }

    /// y with B̃(φe_i, φy) = B̃(φe_i, w) for all i, returned as φ(y).
    pub fn project_to_image(&self, w: &[Q]) -> Vec<Q> {
        let s = self.phi.source();
        let b: Vec<Q> = (0..s.dim()).map(|i| self.phi.target().killing(self.phi.image(i), w)).collect();
        let y: Vec<Q> = (0..s.dim())
            .map(|r| {
                let mut acc = Q::zero();
                for (c, bc) in b.iter().enumerate() {
                    if !bc.is_zero() {
                        acc += self.gram_inv.get(r, c) * bc;
                    }
                }
                acc * &self.constant
            })
            .collect();
        self.phi.apply(&y)
    }
}

/// Part matrices of both complexes, kept together for repeated identity checks.
pub struct IdentityChecker<'b> {
    ind: &'b CochainInducer<'b>,
    src_parts: (SparseMatrix, SparseMatrix),
    tgt_parts: (SparseMatrix, SparseMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SecondIdentity {
    pub lhs_eq_mid: bool,
    pub mid_eq_rhs: bool,
}

impl<'b> IdentityChecker<'b> {
    pub fn new(ind: &'b CochainInducer<'b>) -> Self {
        IdentityChecker {
            ind,
            src_parts: ind.src.codifferential_parts_matrices(),
            tgt_parts: ind.tgt.codifferential_parts_matrices(),
        }
    }

    fn slice(c1: &[Q], d: usize, coords: &[Q]) -> Vec<Q> {
        let mut out = alloc::vec![Q::zero(); d];
        for (a, x) in coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(&c1[a * d..(a + 1) * d]) {
                *o += x * v;
            }
        }
        out
    }

    /// c·φ((δ*κ)₁(e_α)) = pr_φ(g)((δ̃*κ̃)₁(φ₋e_α)) for every α.
    pub fn first_identity(&self, kappa: &Cochain) -> bool {
        let ind = self.ind;
        let phi = ind.phi;
        let (ds, dt) = (phi.source().dim(), phi.target().dim());
        let kt = ind.induce(kappa);
        let s1 = self.src_parts.0.apply(&kappa.coeffs);
        let t1 = self.tgt_parts.0.apply(&kt.coeffs);
        ind.src.minus().iter().enumerate().all(|(a, &i)| {
            let lhs: Vec<Q> = phi.apply(&s1[a * ds..(a + 1) * ds]).iter().map(|x| x * &ind.constant).collect();
            let w = Self::slice(&t1, dt, &ind.tgt.minus_coords(phi.image(i)));
            lhs == ind.project_to_image(&w)
        })
    }

    /// 2c·φ((δ*κ)₂(X)) = (δ̃*κ̃)₂(φX) = (δ̃*κ̃)₂(φ₋ᵢX) at the basis element x.
    pub fn second_identity(&self, kappa: &Cochain, x: usize) -> SecondIdentity {
        let ind = self.ind;
        let phi = ind.phi;
        let s = phi.source();
        let (ds, dt) = (s.dim(), phi.target().dim());
        let a = ind.src.minus().iter().position(|&m| m == x).expect("x must lie in g_-");
        let kt = ind.induce(kappa);
        let s2 = self.src_parts.1.apply(&kappa.coeffs);
        let two_c = &ind.constant * q(2);
        let lhs: Vec<Q> = phi.apply(&s2[a * ds..(a + 1) * ds]).iter().map(|v| v * &two_c).collect();
        let mid = ind.tgt.codifferential_parts_at(&kt, phi.image(x)).1;
        let t2 = self.tgt_parts.1.apply(&kt.coeffs);
        let xi = phi.component(&s.basis_vector(x), s.degree(x));
        let rhs = Self::slice(&t2, dt, &ind.tgt.minus_coords(&xi));
        SecondIdentity { lhs_eq_mid: lhs == mid, mid_eq_rhs: mid == rhs }
    }
}

/// The real ambient matrix of a cr element as a complex matrix.
pub fn cr_complex_matrix(cr: &GradedLieAlgebra, x: &[Q]) -> Matrix<Complex> {
    let m = cr.ambient() / 2;
    let real = crate::lie::smat_to_dense(&cr.matrix_of(x), cr.ambient());
    Matrix::from_fn(m, m, |r, c| Complex::new(real.get(r, c).clone(), real.get(m + r, c).clone()))
}

/// Whether a complex matrix lies in su(Q) for the Witt form of the cr algebra.
pub fn in_su(cr: &GradedLieAlgebra, a: &Matrix<Complex>) -> bool {
    let (p, qq) = match cr.family() {
        Family::Cr { p, q } => (p, q),
        _ => return false,
    };
    let qf = crate::lie::witt_form(p, qq).map_into(|x| Complex::from_q(x.clone()));
    a.mul(&qf).add(&qf.mul(&a.adjoint())).is_zero() && a.trace().is_zero_el()
}

/// Complex image of a qc element under φ^cr_qc together with the two
/// entries (u, v) of the quaternion w = u + jv at a given qc matrix slot.
fn qc_entry(qc: &GradedLieAlgebra, x: &[Q], r: usize, c: usize) -> (Complex, Complex) {
    let nn = qc.ambient() / 4;
    let real = crate::lie::smat_to_dense(&qc.matrix_of(x), qc.ambient());
    let z = |rr: usize, cc: usize| Complex::new(real.get(rr, cc).clone(), real.get(2 * nn + rr, cc).clone());
    (z(r, c), z(nn + r, c))
}

/// Compare the images of g₋₂ and g₋₁ basis elements with the closed-form
/// block matrices for q = a + jb and x = u + jv.
pub fn display_checks(tower: &Tower<'_>) -> Vec<Check> {
    let qc = tower.qc;
    let cr = tower.cr;
    let n = tower.n;
    let nn = n + 2;
    let m = 2 * nn;
    let mut out = Vec::new();

    let mut q_ok = true;
    let mut q_split_ok = true;
    for &i in &qc.indices_of_degree(-2) {
        let ei = qc.basis_vector(i);
        let img = cr_complex_matrix(cr, tower.qc_cr.image(i));
        let (a, b) = qc_entry(qc, &ei, n + 1, 0);
        let mut d = Matrix::<Complex>::zeros(m, m);
        d.set(nn + n, 0, b.clone());
        d.set(nn + n, 1, a.conj());
        d.set(nn + n + 1, 0, a.clone());
        d.set(nn + n + 1, 1, b.conj().neg());
        q_ok &= d == img;
        let split = tower.qc_cr.degree_split(i);
        let want: &[i32] = if a.is_zero_el() { &[-1] } else { &[-2, 0] };
        q_split_ok &= split == want;
    }
    out.push(Check::new("display: image of q = a + jb", q_ok, "closed form matches every basis element"));
    out.push(Check::new("display: i splits into degrees -2, 0 and j, k lie in degree -1", q_split_ok, ""));

    let mut entries_ok = true;
    let mut display_in_su = true;
    let mut mismatch = 0usize;
    for &i in &qc.indices_of_degree(-1) {
        let ei = qc.basis_vector(i);
        let img = cr_complex_matrix(cr, tower.qc_cr.image(i));
        let mut d = Matrix::<Complex>::zeros(m, m);
        for k in 0..n {
            let (u, v) = qc_entry(qc, &ei, 1 + k, 0);
            d.set(2 + k, 0, u.clone());
            d.set(2 + k, 1, v.conj().neg());
            d.set(nn + k, 0, v.clone());
            d.set(nn + k, 1, u.conj());
            d.set(nn + n, 2 + k, v.neg());
            d.set(nn + n + 1, 2 + k, u.conj().neg());
            d.set(nn + n, nn + k, u.neg());
            d.set(nn + n + 1, nn + k, v.conj());
        }
        entries_ok &= d == img;
        display_in_su &= in_su(cr, &d);
        mismatch += d.data.iter().zip(&img.data).filter(|(x, y)| x != y).count();
    }
    out.push(Check::new(
        "display: image of x = u + jv",
        entries_ok,
        format!(
            "{} mismatched entries over the g-1 basis; closed form in su(Q): {}",
            mismatch, display_in_su
        ),
    ));

    let (pi, qi) = (qc.index_of("p.i"), qc.index_of("q.i"));
    if let (Some(pi), Some(qi)) = (pi, qi) {
        let t = cr;
        let f = &tower.qc_cr;
        let (ep, eq) = (qc.basis_vector(pi), qc.basis_vector(qi));
        let lhs = t.killing(&f.component(&ep, -2), &f.component(&eq, 2));
        let rhs = t.killing(&f.component(&ep, 0), &f.component(&eq, 0));
        out.push(Check::new(
            "B~(phi-2(i), phi2(i)) = B~(phi0(i), phi0(i))",
            lhs == rhs,
            format!("{} vs {}", fmt_q(&lhs), fmt_q(&rhs)),
        ));
    }
    out
}

/// Values of the trace pairing tr(D·φ₋(x)·D·φ₋(y)ᵗ) on qc elements, with
/// D the Witt form of g^co with its first null pair replaced by the identity.
pub fn trace_pairing(tower: &Tower<'_>, x: &[Q], y: &[Q]) -> Q {
    let co = tower.co;
    let mm = co.ambient();
    let dmat = |a: usize| -> (usize, Q) {
        if a == 0 || a == mm - 1 {
            (a, q(1))
        } else if a <= 3 || a >= mm - 4 {
            (mm - 1 - a, q(1))
        } else {
            (a, q(1))
        }
    };
    let ax = crate::lie::smat_to_dense(&co.matrix_of(&tower.qc_co.minus_part(x)), mm);
    let ay = crate::lie::smat_to_dense(&co.matrix_of(&tower.qc_co.minus_part(y)), mm);
    let mut s = Q::zero();
    for a in 0..mm {
        let (sa, da) = dmat(a);
        for b in 0..mm {
            let (sb, db) = dmat(b);
            let v = ax.get(sa, b);
            if v.is_zero() {
                continue;
            }
            let w = ay.get(a, sb);
            if !w.is_zero() {
                s += &da * &db * v * w;
            }
        }
    }
    s
}

/// tr_R(x∘ȳᵗ) for g₋₁ elements: the real part of the trace of ι_H(x ȳᵗ),
/// which is 2·Re Σ x_k ȳ_k.
pub fn real_trace(qc: &GradedLieAlgebra, x: &[Q], y: &[Q]) -> Q {
    let n = qc.ambient() / 4 - 2;
    let mut s = Q::zero();
    for k in 0..n {
        let (u1, v1) = qc_entry(qc, x, 1 + k, 0);
        let (u2, v2) = qc_entry(qc, y, 1 + k, 0);
        s += &u1.re * &u2.re + &u1.im * &u2.im + &v1.re * &v2.re + &v1.im * &v2.im;
    }
    s * q(2)
}

/// The pairing identities on g₋₁ ∪ g₋₂ ∪ {a.i, a.j, a.k}: tr_R on g₋₁, −2 on
/// the pairs (p.u, a.u), zero otherwise.
pub fn trace_pairing_checks(tower: &Tower<'_>) -> Vec<Check> {
    let qc = tower.qc;
    let mut set: Vec<usize> = qc.indices_of_degree(-2);
    set.extend(qc.indices_of_degree(-1));
    for u in ["i", "j", "k"] {
        if let Some(a) = qc.index_of(&format!("a.{u}")) {
            set.push(a);
        }
    }
    let mut x_ok = true;
    let mut reeb_ok = true;
    let mut rest_ok = true;
    let mut minus_two = 0;
    for &a in &set {
        for &b in &set {
            let (ea, eb) = (qc.basis_vector(a), qc.basis_vector(b));
            let v = trace_pairing(tower, &ea, &eb);
            let (la, lb) = (qc.label(a), qc.label(b));
            if qc.degree(a) == -1 && qc.degree(b) == -1 {
                x_ok &= v == real_trace(qc, &ea, &eb);
            } else if (la.starts_with("p.") && lb.starts_with("a.") && la[2..] == lb[2..])
                || (la.starts_with("a.") && lb.starts_with("p.") && la[2..] == lb[2..])
            {
                reeb_ok &= v == q(-2);
                minus_two += 1;
            } else {
                rest_ok &= v.is_zero();
            }
        }
    }
    alloc::vec![
        Check::new("trace pairing on g-1 equals tr_R(x ybar^t)", x_ok, ""),
        Check::new("trace pairing (i,I) = (j,J) = (k,K) = -2", reeb_ok && minus_two == 6, ""),
        Check::new("all other trace pairings vanish", rest_ok, ""),
    ]
}

/// Scaling compatibility B(E, X) = c'·B̃(Ẽ, φX), with a control that replaces
/// Ẽ by Ẽ plus a non-central element of g̃₀.
pub fn scaling_checks(phi: &GradedInclusion<'_>) -> Vec<Check> {
    let t = phi.target();
    let e = t.grading_element().to_vec();
    let c = phi.scaling_constant(&e);
    let g0: Vec<usize> = t.indices_of_degree(0);
    let noncentral = g0.iter().copied().find(|&y| {
        let ey = t.basis_vector(y);
        g0.iter().any(|&z| t.bracket(&ey, &t.basis_vector(z)).iter().any(|x| !x.is_zero()))
    });
    let control = noncentral.map(|y| {
        let mut e2 = e.clone();
        e2[y] += Q::one();
        phi.scaling_constant(&e2).is_none()
    });
    alloc::vec![
        Check::new(
            format!("{}: B(E, X) = c' B~(E~, phi X)", phi.name()),
            c.is_some(),
            c.map(|c| format!("c' = {}", fmt_q(&c))).unwrap_or_default(),
        ),
        Check::new(
            format!("{}: negative control with non-central E~ fails", phi.name()),
            control == Some(true),
            "",
        ),
    ]
}

/// φ∘θ for the grading-reversing involution θ of the source must violate the
/// structural conditions.
pub fn reversal_control(phi: &GradedInclusion<'_>) -> Result<Check, InclusionError> {
    let theta = reversal_involution(phi.source())?;
    let bad = theta.compose(phi, "reversed");
    let checks = bad.structural_checks()?;
    let failed: Vec<String> = checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect();
    Ok(Check::new(
        format!("{}: negative control with grading-reversing involution fails", phi.name()),
        !failed.is_empty(),
        format!("failing: {:?}", failed),
    ))
}

/// The sparse matrix rows of the map x ↦ φ₋(x) restricted to the given source
/// indices, used to decide whether a set of images spans g̃₋.
pub fn minus_images(phi: &GradedInclusion<'_>, idx: &[usize]) -> Vec<SVec> {
    idx.iter().map(|&i| phi.minus_image(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::all_pass;
    use crate::lie::qc_tower;
    use crate::scalar::qr;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn names_failing(c: &[Check]) -> Vec<String> {
        c.iter().filter(|c| !c.pass).map(|c| format!("{}: {}", c.name, c.detail)).collect()
    }

    #[test]
    fn structure_n1() {
        let algs = qc_tower(1).unwrap();
        let t = Tower::new(&algs).unwrap();
        assert!(t.composition_coherent().unwrap());
        for phi in [&t.qc_cr, &t.cr_co, &t.qc_co] {
            let c = phi.structural_checks().unwrap();
            assert!(all_pass(&c), "{}: {:?}", phi.name(), names_failing(&c));
        }
        for phi in [&t.qc_cr, &t.cr_co] {
            let c = phi.pairing_checks().unwrap();
            assert!(all_pass(&c), "{}: {:?}", phi.name(), names_failing(&c));
            assert!(reversal_control(phi).unwrap().pass);
        }
        let pi = algs[0].index_of("p.i").unwrap();
        assert!(all_pass(&t.qc_cr.second_identity_hypotheses(pi)));
    }

    #[test]
    fn killing_constants() {
        // B_sp(m) = 2(m+1)·tr_C, B_su(N) = 2N·tr_C, B_so(M) = (M−2)·tr_R
        for n in 1..=2i64 {
            let algs = qc_tower(n as usize).unwrap();
            let t = Tower::new(&algs).unwrap();
            let c1 = qr(n + 3, 2 * (n + 2));
            let c2 = qr(n + 2, 2 * n + 3);
            assert_eq!(t.qc_cr.killing_constant().unwrap(), c1);
            assert_eq!(t.cr_co.killing_constant().unwrap(), c2);
            assert_eq!(t.qc_co.killing_constant().unwrap(), &c1 * &c2);
        }
    }

    #[test]
    fn displays_and_pairings() {
        let algs = qc_tower(1).unwrap();
        let t = Tower::new(&algs).unwrap();
        let d = display_checks(&t);
        let get = |name: &str| d.iter().find(|c| c.name.starts_with(name)).unwrap().clone();
        assert!(get("display: image of q").pass);
        assert!(get("display: i splits").pass);
        assert!(get("B~(phi-2(i)").pass);
        let x = get("display: image of x");
        assert!(!x.pass);
        assert!(x.detail.starts_with("4 mismatched"));
        assert!(x.detail.ends_with("in su(Q): false"));
        assert!(all_pass(&trace_pairing_checks(&t)));
        for phi in [&t.qc_cr, &t.cr_co] {
            assert!(all_pass(&scaling_checks(phi)));
        }
    }

    #[test]
    fn complement_and_round_trip() {
        let algs = qc_tower(1).unwrap();
        let t = Tower::new(&algs).unwrap();
        let cs = [
            KostantComplex::new(&algs[0]).unwrap(),
            KostantComplex::new(&algs[1]).unwrap(),
            KostantComplex::new(&algs[2]).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (phi, a, b, cdim) in [(&t.qc_cr, 0, 1, 2), (&t.cr_co, 1, 2, 1), (&t.qc_co, 0, 2, 3)] {
            let ind = CochainInducer::new(phi, &cs[a], &cs[b]).unwrap();
            assert_eq!(ind.complement().len(), cdim);
            assert!(ind.complement().iter().all(|&u| phi.source().degree(u) == 0));
            let chk = IdentityChecker::new(&ind);
            for _ in 0..10 {
                let k = cs[a].random_cochain(2, None, 0.3, &mut rng);
                let kt = ind.induce(&k);
                assert_eq!(ind.restrict(&kt), Some(k.clone()));
                assert!(ind.kills_parabolic(&kt));
                assert!(chk.first_identity(&k));
            }
        }
        let ind = CochainInducer::new(&t.qc_cr, &cs[0], &cs[1]).unwrap();
        let chk = IdentityChecker::new(&ind);
        let pi = algs[0].index_of("p.i").unwrap();
        for _ in 0..10 {
            let k = cs[0].random_cochain(2, None, 0.3, &mut rng);
            assert_eq!(chk.second_identity(&k, pi), SecondIdentity { lhs_eq_mid: true, mid_eq_rhs: true });
        }
    }

    #[test]
    fn first_identity_detects_perturbed_projection() {
        let algs = qc_tower(1).unwrap();
        let t = Tower::new(&algs).unwrap();
        let cs = [KostantComplex::new(&algs[0]).unwrap(), KostantComplex::new(&algs[1]).unwrap()];
        let ind = CochainInducer::new(&t.qc_cr, &cs[0], &cs[1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let k = cs[0].random_cochain(2, None, 0.5, &mut rng);
        let (p1, _) = cs[0].codifferential_parts_matrices();
        let s1 = p1.apply(&k.coeffs);
        assert!(s1.iter().any(|x| !x.is_zero()));
        // the identity fixes the constant: 2c instead of c breaks it
        let kt = ind.induce(&k);
        let (t1, _) = cs[1].codifferential_parts_matrices();
        let t1v = t1.apply(&kt.coeffs);
        let d = algs[0].dim();
        let dt = algs[1].dim();
        let mut differs = false;
        for (a, &i) in cs[0].minus().iter().enumerate() {
            let lhs: Vec<Q> = t.qc_cr.apply(&s1[a * d..(a + 1) * d]).iter().map(|x| x * ind.killing_constant() * q(2)).collect();
            let coords = cs[1].minus_coords(t.qc_cr.image(i));
            let mut w = alloc::vec![Q::zero(); dt];
            for (b, x) in coords.iter().enumerate() {
                for (o, v) in w.iter_mut().zip(&t1v[b * dt..(b + 1) * dt]) {
                    *o += x * v;
                }
            }
            differs |= lhs != ind.project_to_image(&w);
        }
        assert!(differs);
    }
}
