//! Conic systems {x ∈ K : ℳ(x) = b} and their lowering to one matrix block plus one
//! nonnegative block.
//!
//! Points of `Edm(n)` are represented in reduced Gram coordinates (order n−1), and
//! EDM functionals are given on distance matrices and pulled back with `edm_lower`.

use num_traits::Zero;

use crate::cones::lindenstrauss::edm_lower;
use crate::cones::{ConeDesc, Element, FaceRep};
use crate::numerics::{exact_rank, numeric_rank, to_f64, Mat, RatMat, Rational};

use super::FacialError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Exact rational arithmetic; only polyhedral cones.
    Exact,
    Float,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConicSystem {
    pub cone: ConeDesc,
    /// One functional per constraint, shaped like an element of the cone's space.
    pub constraints: Vec<Element>,
    pub b: Vec<Rational>,
    pub mode: Mode,
    /// A feasible point known to the caller. Float reductions cut its range exactly.
    pub known_point: Option<Element>,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Part {
    Matrix { order: usize, edm: bool },
    Linear { offset: usize, len: usize },
}

/// Block structure of a supported cone.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Layout {
    pub parts: Vec<Part>,
    pub product: bool,
    pub order: usize,
    pub lin_len: usize,
}

impl Layout {
    pub fn of(cone: &ConeDesc) -> Result<Self, FacialError> {
        cone.validate()?;
        let (list, product) = match cone {
            ConeDesc::Product(parts) => (parts.clone(), true),
            ConeDesc::Fig1 => return Err(FacialError::Invalid("the non-exposed fixture cone has no linear-system form".into())),
            other => (vec![other.clone()], false),
        };
        let mut parts = Vec::new();
        let (mut order, mut lin_len) = (0, 0);
        let mut matrices = 0;
        for c in &list {
            match c {
                ConeDesc::Orthant(n) => {
                    parts.push(Part::Linear { offset: lin_len, len: *n });
                    lin_len += n;
                }
                ConeDesc::Psd(n) | ConeDesc::Edm(n) => {
                    matrices += 1;
                    order = c.psd_order().unwrap();
                    parts.push(Part::Matrix { order: *n - usize::from(matches!(c, ConeDesc::Edm(_))), edm: matches!(c, ConeDesc::Edm(_)) });
                }
                _ => return Err(FacialError::Invalid("nested products and fixtures are not supported in systems".into())),
            }
        }
        if matrices > 1 {
            return Err(FacialError::Invalid("at most one PSD/EDM block per product cone".into()));
        }
        Ok(Layout { parts, product, order, lin_len })
    }

    fn split<'a>(&self, e: &'a Element) -> Result<Vec<&'a Element>, FacialError> {
        match (self.product, e) {
            (true, Element::Product(items)) if items.len() == self.parts.len() => Ok(items.iter().collect()),
            (false, Element::Product(_)) | (true, _) => Err(FacialError::Invalid("element does not match the product structure".into())),
            (false, other) => Ok(vec![other]),
        }
    }

    /// (matrix block, nonnegative block) of a functional or point.
    pub fn lower(&self, e: &Element, is_functional: bool) -> Result<(Mat, Vec<f64>), FacialError> {
        let items = self.split(e)?;
        let mut w = Mat::zeros(self.order, self.order);
        let mut z = vec![0.0; self.lin_len];
        for (part, item) in self.parts.iter().zip(items) {
            match (part, item) {
                (Part::Matrix { order, edm }, Element::Matrix(m)) => {
                    let want = if *edm && is_functional { order + 1 } else { *order };
                    if m.shape() != (want, want) {
                        return Err(FacialError::Invalid(format!("matrix of shape {:?}, expected order {want}", m.shape())));
                    }
                    if m.symmetry_residual() > 1e-12 {
                        return Err(FacialError::Invalid("matrix functional is not symmetric".into()));
                    }
                    w = if *edm && is_functional { edm_lower(&m.symmetrize()) } else { m.symmetrize() };
                }
                (Part::Linear { offset, len }, Element::Vector(v)) if v.len() == *len => {
                    z[*offset..offset + len].copy_from_slice(v);
                }
                (Part::Linear { offset, len }, Element::Exact(v)) if v.len() == *len => {
                    for (k, x) in v.iter().enumerate() {
                        z[offset + k] = to_f64(x);
                    }
                }
                _ => return Err(FacialError::Invalid("element part does not match its cone block".into())),
            }
        }
        Ok((w, z))
    }

    /// Exact nonnegative-block coordinates; only for polyhedral layouts.
    pub fn lower_exact(&self, e: &Element) -> Result<Vec<Rational>, FacialError> {
        let items = self.split(e)?;
        let mut z = vec![Rational::zero(); self.lin_len];
        for (part, item) in self.parts.iter().zip(items) {
            match (part, item) {
                (Part::Linear { offset, len }, Element::Exact(v)) if v.len() == *len => {
                    z[*offset..offset + len].clone_from_slice(v);
                }
                _ => return Err(FacialError::Invalid("exact mode needs exact vectors on orthant blocks".into())),
            }
        }
        Ok(z)
    }

    /// Assemble an element (of the cone's dual-space coordinates) from its blocks.
    pub fn assemble(&self, w: &Mat, z: &[f64]) -> Element {
        let items: Vec<Element> = self
            .parts
            .iter()
            .map(|p| match p {
                Part::Matrix { .. } => Element::Matrix(w.clone()),
                Part::Linear { offset, len } => Element::Vector(z[*offset..offset + len].to_vec()),
            })
            .collect();
        self.wrap(items)
    }

    pub fn assemble_exact(&self, z: &[Rational]) -> Element {
        let items: Vec<Element> = self
            .parts
            .iter()
            .map(|p| match p {
                Part::Matrix { .. } => unreachable!("exact layouts are polyhedral"),
                Part::Linear { offset, len } => Element::Exact(z[*offset..offset + len].to_vec()),
            })
            .collect();
        self.wrap(items)
    }

    fn wrap(&self, mut items: Vec<Element>) -> Element {
        if self.product {
            Element::Product(items)
        } else {
            items.pop().expect("layout has one part")
        }
    }

    /// (face basis of the matrix block, support in the nonnegative block).
    pub fn face_parts(&self, face: &FaceRep) -> Result<(Mat, Vec<usize>), FacialError> {
        let items: Vec<&FaceRep> = match (self.product, face) {
            (true, FaceRep::Product(items)) if items.len() == self.parts.len() => items.iter().collect(),
            (false, f) if !matches!(f, FaceRep::Product(_)) => vec![f],
            _ => return Err(FacialError::Invalid("face does not match the cone structure".into())),
        };
        let mut basis = Mat::zeros(0, 0);
        let mut support = Vec::new();
        for (part, item) in self.parts.iter().zip(items) {
            match (part, item) {
                (Part::Matrix { order, .. }, FaceRep::Psd { basis: v }) if v.rows() == *order => basis = v.clone(),
                (Part::Linear { offset, len }, FaceRep::Orthant { n, support: s }) if n == len => {
                    support.extend(s.iter().map(|k| k + offset));
                }
                _ => return Err(FacialError::Invalid("face part does not match its cone block".into())),
            }
        }
        Ok((basis, support))
    }
}

/// Constraint data in block form.
#[derive(Clone, Debug)]
pub(crate) struct Lowered {
    pub layout: Layout,
    pub mats: Vec<Mat>,
    pub lins: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub point: Option<(Mat, Vec<f64>)>,
}

impl Lowered {
    pub fn m(&self) -> usize {
        self.mats.len()
    }

    /// ℳ*(v) in block form.
    pub fn adjoint(&self, v: &[f64]) -> (Mat, Vec<f64>) {
        let mut w = Mat::zeros(self.layout.order, self.layout.order);
        let mut z = vec![0.0; self.layout.lin_len];
        for (i, &vi) in v.iter().enumerate() {
            if vi != 0.0 {
                w = &w + &self.mats[i].scale(&vi);
                for (zk, a) in z.iter_mut().zip(&self.lins[i]) {
                    *zk += vi * a;
                }
            }
        }
        (w.symmetrize(), z)
    }
}

impl ConicSystem {
    pub fn new(cone: ConeDesc, constraints: Vec<Element>, b: Vec<Rational>, mode: Mode) -> Result<Self, FacialError> {
        let sys = ConicSystem { cone, constraints, b, mode, known_point: None };
        sys.check()?;
        Ok(sys)
    }

    /// Float-mode system with a floating right-hand side.
    pub fn float(cone: ConeDesc, constraints: Vec<Element>, b: &[f64]) -> Result<Self, FacialError> {
        let b = b
            .iter()
            .map(|x| Rational::from_float(*x).ok_or_else(|| FacialError::Invalid(format!("non-finite right-hand side {x}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(cone, constraints, b, Mode::Float)
    }

    /// Attach a feasible point; it must lie in the cone and satisfy ℳ(x) = b.
    pub fn with_known_point(mut self, x: Element) -> Result<Self, FacialError> {
        if self.mode != Mode::Float {
            return Err(FacialError::Invalid("known points are only used in float mode".into()));
        }
        let layout = self.layout()?;
        let (w, z) = layout.lower(&x, false)?;
        let scale = 1.0 + w.max_abs() + z.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let lmin = if w.rows() > 0 { crate::numerics::lambda_min(&w) } else { 0.0 };
        if lmin < -1e-9 * scale || z.iter().any(|v| *v < -1e-12 * scale) {
            return Err(FacialError::Invalid("known point is not in the cone".into()));
        }
        let b = self.b_f64();
        let resid = self.apply(&x)?.iter().zip(&b).fold(0.0f64, |a, (l, r)| a.max((l - r).abs()));
        let bscale = 1.0 + b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if resid > 1e-9 * bscale {
            return Err(FacialError::Invalid(format!("known point violates the constraints by {resid:e}")));
        }
        self.known_point = Some(x);
        Ok(self)
    }

    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    pub fn b_f64(&self) -> Vec<f64> {
        self.b.iter().map(to_f64).collect()
    }

    pub(crate) fn layout(&self) -> Result<Layout, FacialError> {
        Layout::of(&self.cone)
    }

    /// Shapes, mode restrictions, and linear independence of the functionals.
    pub fn check(&self) -> Result<(), FacialError> {
        let layout = self.layout()?;
        if self.b.len() != self.constraints.len() {
            return Err(FacialError::Invalid(format!(
                "{} constraints but right-hand side of length {}",
                self.constraints.len(),
                self.b.len()
            )));
        }
        match self.mode {
            Mode::Exact => {
                if !self.cone.is_polyhedral() {
                    return Err(FacialError::Invalid("exact mode is only available for orthant cones".into()));
                }
                let rows = self.exact_matrix()?;
                if exact_rank(&rows) < self.m() {
                    return Err(FacialError::Invalid("constraint functionals are linearly dependent".into()));
                }
            }
            Mode::Float => {
                let low = self.lowered()?;
                if self.m() > 0 {
                    let dim = layout.order * (layout.order + 1) / 2 + layout.lin_len;
                    let phi = Mat::from_fn(self.m(), dim, |i, k| {
                        let sv = low.mats[i].svec();
                        if k < sv.len() {
                            sv[k]
                        } else {
                            low.lins[i][k - sv.len()]
                        }
                    });
                    if numeric_rank(&phi, 1e-10) < self.m() {
                        return Err(FacialError::Invalid("constraint functionals are linearly dependent".into()));
                    }
                }
            }
        }
        Ok(())
    }

    pub(crate) fn lowered(&self) -> Result<Lowered, FacialError> {
        let layout = self.layout()?;
        let mut mats = Vec::with_capacity(self.m());
        let mut lins = Vec::with_capacity(self.m());
        for c in &self.constraints {
            let (w, z) = layout.lower(c, true)?;
            mats.push(w);
            lins.push(z);
        }
        let point = match &self.known_point {
            Some(x) => Some(layout.lower(x, false)?),
            None => None,
        };
        Ok(Lowered { layout, mats, lins, b: self.b_f64(), point })
    }

    /// Constraint rows as an exact m × p matrix (polyhedral cones only).
    pub(crate) fn exact_matrix(&self) -> Result<RatMat, FacialError> {
        let layout = self.layout()?;
        let rows: Vec<Vec<Rational>> = self.constraints.iter().map(|c| layout.lower_exact(c)).collect::<Result<_, _>>()?;
        Ok(if rows.is_empty() { RatMat::zeros(0, layout.lin_len) } else { RatMat::from_rows(&rows) })
    }

    /// ℳ*(v) as an element of the cone's coordinates (reduced for EDM blocks).
    pub fn adjoint(&self, v: &Element) -> Result<Element, FacialError> {
        let layout = self.layout()?;
        match v {
            Element::Exact(coeffs) if self.mode == Mode::Exact => {
                check_len(coeffs.len(), self.m())?;
                let a = self.exact_matrix()?;
                let z: Vec<Rational> = (0..layout.lin_len)
                    .map(|k| coeffs.iter().enumerate().fold(Rational::zero(), |acc, (i, c)| acc + c * &a[(i, k)]))
                    .collect();
                Ok(layout.assemble_exact(&z))
            }
            Element::Vector(coeffs) => {
                check_len(coeffs.len(), self.m())?;
                let (w, z) = self.lowered()?.adjoint(coeffs);
                Ok(layout.assemble(&w, &z))
            }
            _ => Err(FacialError::Invalid("multiplier must be a vector (exact in exact mode)".into())),
        }
    }

    /// ℳ(x) for a point x of the cone (float).
    pub fn apply(&self, x: &Element) -> Result<Vec<f64>, FacialError> {
        let low = self.lowered()?;
        let (w, z) = low.layout.lower(x, false)?;
        Ok((0..self.m()).map(|i| low.mats[i].inner(&w) + crate::numerics::dot(&low.lins[i], &z)).collect())
    }
}

fn check_len(got: usize, want: usize) -> Result<(), FacialError> {
    if got != want {
        return Err(FacialError::Invalid(format!("multiplier of length {got}, expected {want}")));
    }
    Ok(())
}
