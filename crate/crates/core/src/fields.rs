//! Planar vector fields `P ∂x + Q ∂y` and their Lie bracket.

use std::fmt;

use crate::coeffring::{ExpPoly, Var};
use crate::scalar::GaussianRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("field {0} is not triangular: its ∂y-coefficient depends on x")]
    NotTriangular(String),
}

#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct VectorField {
    /// ∂x-component.
    pub p: ExpPoly,
    /// ∂y-component.
    pub q: ExpPoly,
}

impl VectorField {
    pub fn new(p: ExpPoly, q: ExpPoly) -> Self {
        Self { p, q }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn dx() -> Self {
        Self::new(ExpPoly::one(), ExpPoly::zero())
    }

    pub fn dy() -> Self {
        Self::new(ExpPoly::zero(), ExpPoly::one())
    }

    /// `f ∂x`.
    pub fn along_x(f: ExpPoly) -> Self {
        Self::new(f, ExpPoly::zero())
    }

    /// `f ∂y`.
    pub fn along_y(f: ExpPoly) -> Self {
        Self::new(ExpPoly::zero(), f)
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.p.add(&o.p), self.q.add(&o.q))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.p.sub(&o.p), self.q.sub(&o.q))
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        Self::new(self.p.scale(s), self.q.scale(s))
    }

    /// Multiply both components by a function.
    pub fn mul_fn(&self, f: &ExpPoly) -> Self {
        Self::new(self.p.mul(f), self.q.mul(f))
    }

    /// Apply the field as a derivation: `P ∂f/∂x + Q ∂f/∂y`.
    pub fn apply(&self, f: &ExpPoly) -> ExpPoly {
        self.p.mul(&f.diff(Var::X)).add(&self.q.mul(&f.diff(Var::Y)))
    }

    /// `[self, w] = self(w) - w(self)` componentwise.
    pub fn bracket(&self, w: &VectorField) -> VectorField {
        VectorField::new(
            self.apply(&w.p).sub(&w.apply(&self.p)),
            self.apply(&w.q).sub(&w.apply(&self.q)),
        )
    }

    /// True iff the ∂y-coefficient depends on y alone.
    pub fn is_triangular(&self) -> bool {
        self.q.is_y_only()
    }

    /// The homomorphism Π: `ξ(x,y)∂x + η(y)∂y ↦ η(y) d/dy`.
    pub fn project_y(&self) -> Result<ExpPoly, FieldError> {
        if self.is_triangular() {
            Ok(self.q.clone())
        } else {
            Err(FieldError::NotTriangular(self.to_string()))
        }
    }

    /// Exchange the roles of x and y in both coordinates and components.
    pub fn swap_vars(&self) -> Self {
        Self::new(self.q.swap_vars(), self.p.swap_vars())
    }
}

/// Bracket of one-dimensional fields `f d/dy` and `g d/dy`: `f g' - g f'`.
pub fn bracket_1d(f: &ExpPoly, g: &ExpPoly) -> ExpPoly {
    f.mul(&g.diff(Var::Y)).sub(&g.mul(&f.diff(Var::Y)))
}

impl serde::Serialize for VectorField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&crate::expr::print_field(self))
    }
}

impl<'de> serde::Deserialize<'de> for VectorField {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        crate::expr::parse_field(&s).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::expr::print_field(self))
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
