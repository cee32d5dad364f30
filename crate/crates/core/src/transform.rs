//! Point transformations and exact pushforward of vector fields.
//!
//! Only three moves are supported: an x-shear with a y-dependent offset, an
//! affine change of y, and the swap of x and y. Each is invertible in closed
//! form and keeps coefficients inside the exponential-polynomial ring (up to
//! the documented `RingEscape` cases).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraSpan;
use crate::coeffring::{ExpMonomial, ExpPoly, RingError, Var};
use crate::fields::VectorField;
use crate::scalar::GaussianRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("invalid transform parameters: {0}")]
    InvalidParameters(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum PointTransform {
    /// `x̃ = αx + f(y)`, `ỹ = y`.
    ShearX { alpha: GaussianRational, f: ExpPoly },
    /// `x̃ = x`, `ỹ = βy + c`.
    AffineY { beta: GaussianRational, c: GaussianRational },
    /// `x̃ = y`, `ỹ = x`.
    Swap,
}

impl PointTransform {
    pub fn shear(f: ExpPoly) -> Self {
        PointTransform::ShearX {
            alpha: GaussianRational::one(),
            f,
        }
    }

    pub fn scale_y(beta: GaussianRational) -> Self {
        PointTransform::AffineY {
            beta,
            c: GaussianRational::zero(),
        }
    }

    pub fn validate(&self) -> Result<(), TransformError> {
        match self {
            PointTransform::ShearX { alpha, f } => {
                if alpha.is_zero() {
                    return Err(TransformError::InvalidParameters("ShearX needs alpha != 0".into()));
                }
                if !f.is_y_only() {
                    return Err(TransformError::InvalidParameters(format!("ShearX offset {f} depends on x")));
                }
            }
            PointTransform::AffineY { beta, .. } if beta.is_zero() => {
                return Err(TransformError::InvalidParameters("AffineY needs beta != 0".into()));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn inverse(&self) -> PointTransform {
        match self {
            PointTransform::ShearX { alpha, f } => {
                let inv = alpha.inv().expect("validated alpha");
                PointTransform::ShearX {
                    f: f.scale(&-&inv),
                    alpha: inv,
                }
            }
            PointTransform::AffineY { beta, c } => {
                let inv = beta.inv().expect("validated beta");
                PointTransform::AffineY {
                    c: -(c * &inv),
                    beta: inv,
                }
            }
            PointTransform::Swap => PointTransform::Swap,
        }
    }

    /// The field `v` written in the new coordinates.
    pub fn pushforward(&self, v: &VectorField) -> Result<VectorField, TransformError> {
        self.validate()?;
        Ok(match self {
            PointTransform::ShearX { alpha, f } => {
                // ∂x = α∂x̃ and ∂y = ∂ỹ + f'(ỹ)∂x̃
                let p = v.p.scale(alpha).add(&f.diff(Var::Y).mul(&v.q));
                VectorField::new(p.substitute_x_affine(alpha, f)?, v.q.substitute_x_affine(alpha, f)?)
            }
            PointTransform::AffineY { beta, c } => VectorField::new(
                v.p.substitute_y_affine(beta, c)?,
                v.q.scale(beta).substitute_y_affine(beta, c)?,
            ),
            PointTransform::Swap => v.swap_vars(),
        })
    }
}

impl fmt::Display for PointTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointTransform::ShearX { alpha, f: g } => write!(f, "ShearX{{alpha={alpha}, f={g}}}"),
            PointTransform::AffineY { beta, c } => write!(f, "AffineY{{beta={beta}, c={c}}}"),
            PointTransform::Swap => f.write_str("Swap"),
        }
    }
}

/// Transforms applied left to right.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TransformChain(pub Vec<PointTransform>);

impl TransformChain {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn then(mut self, t: PointTransform) -> Self {
        self.0.push(t);
        self
    }

    pub fn extend(mut self, other: TransformChain) -> Self {
        self.0.extend(other.0);
        self
    }

    pub fn inverse(&self) -> Self {
        TransformChain(self.0.iter().rev().map(PointTransform::inverse).collect())
    }

    pub fn validate(&self) -> Result<(), TransformError> {
        self.0.iter().try_for_each(PointTransform::validate)
    }

    pub fn pushforward(&self, v: &VectorField) -> Result<VectorField, TransformError> {
        self.0.iter().try_fold(v.clone(), |acc, t| t.pushforward(&acc))
    }
}

impl From<PointTransform> for TransformChain {
    fn from(t: PointTransform) -> Self {
        TransformChain(vec![t])
    }
}

impl fmt::Display for TransformChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("identity");
        }
        for (k, t) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ; ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

pub fn pushforward(t: &TransformChain, v: &VectorField) -> Result<VectorField, TransformError> {
    t.pushforward(v)
}

/// Pushes every basis element forward, keeping basis order.
pub fn pushforward_algebra(t: &TransformChain, g: &AlgebraSpan) -> Result<AlgebraSpan, TransformError> {
    let pushed = g.basis().iter().map(|v| t.pushforward(v)).collect::<Result<Vec<_>, _>>()?;
    let s = AlgebraSpan::span_of(&pushed);
    debug_assert_eq!(s.dim(), g.dim(), "point transforms are invertible");
    Ok(s)
}

/// An antiderivative in y with zero integration constant.
///
/// `∫ y^b e^{μy} dy = e^{μy} Σ_j (-1)^j b!/(b-j)! y^{b-j} / μ^{j+1}` for μ ≠ 0.
pub fn solve_antiderivative(h: &ExpPoly) -> Result<ExpPoly, RingError> {
    if !h.is_y_only() {
        return Err(RingError::NotYOnly(h.to_string()));
    }
    let mut out = ExpPoly::zero();
    for (m, c) in h.terms() {
        let b = m.ydeg;
        if m.yfreq.is_zero() {
            let k = GaussianRational::from_int(b as i64 + 1);
            out = out.add(&ExpPoly::term(c / &k, ExpMonomial::poly(0, b + 1)));
            continue;
        }
        let mu_inv = m.yfreq.inv().expect("nonzero frequency");
        let mut coef = c * &mu_inv;
        for j in 0..=b {
            let mono = ExpMonomial::new(0, b - j, GaussianRational::zero(), m.yfreq.clone());
            out = out.add(&ExpPoly::term(coef.clone(), mono));
            // next coefficient: multiply by -(b-j)/μ
            coef = &(&coef * &GaussianRational::from_int(-((b - j) as i64))) * &mu_inv;
        }
    }
    Ok(out)
}
