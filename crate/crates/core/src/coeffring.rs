//! The coefficient ring: finite sums of `c * x^a * y^b * exp(λx + μy)` over Q(i).
//!
//! Distinct monomials are linearly independent functions, so a sparse map with
//! no zero coefficients is a canonical form and equality of maps decides
//! equality of functions.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::Zero;

use crate::scalar::GaussianRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RingError {
    #[error("substitution into exp({0}) leaves the exponential-polynomial ring")]
    RingEscape(String),
    #[error("expected a function of y alone, got {0}")]
    NotYOnly(String),
    #[error("scale factor must be nonzero")]
    ZeroScale,
}

/// `x^xdeg * y^ydeg * exp(xfreq*x + yfreq*y)`.
///
/// Field order gives the canonical term order: lexicographic on
/// `(xdeg, ydeg, xfreq, yfreq)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExpMonomial {
    pub xdeg: u32,
    pub ydeg: u32,
    pub xfreq: GaussianRational,
    pub yfreq: GaussianRational,
}

impl ExpMonomial {
    pub fn one() -> Self {
        Self::new(0, 0, GaussianRational::zero(), GaussianRational::zero())
    }

    pub fn new(xdeg: u32, ydeg: u32, xfreq: GaussianRational, yfreq: GaussianRational) -> Self {
        Self {
            xdeg,
            ydeg,
            xfreq,
            yfreq,
        }
    }

    pub fn poly(xdeg: u32, ydeg: u32) -> Self {
        Self::new(xdeg, ydeg, GaussianRational::zero(), GaussianRational::zero())
    }

    pub fn is_one(&self) -> bool {
        self.xdeg == 0 && self.ydeg == 0 && self.xfreq.is_zero() && self.yfreq.is_zero()
    }

    /// No dependence on x at all.
    pub fn is_y_only(&self) -> bool {
        self.xdeg == 0 && self.xfreq.is_zero()
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            xdeg: self.xdeg + o.xdeg,
            ydeg: self.ydeg + o.ydeg,
            xfreq: &self.xfreq + &o.xfreq,
            yfreq: &self.yfreq + &o.yfreq,
        }
    }

    fn swap_vars(&self) -> Self {
        Self::new(self.ydeg, self.xdeg, self.yfreq.clone(), self.xfreq.clone())
    }
}

/// An exponential-polynomial in x and y with Gaussian-rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct ExpPoly {
    terms: BTreeMap<ExpMonomial, GaussianRational>,
}

impl ExpPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::term(c, ExpMonomial::one())
    }

    pub fn term(c: GaussianRational, m: ExpMonomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn monomial(m: ExpMonomial) -> Self {
        Self::term(GaussianRational::one(), m)
    }

    pub fn x() -> Self {
        Self::monomial(ExpMonomial::poly(1, 0))
    }

    pub fn y() -> Self {
        Self::monomial(ExpMonomial::poly(0, 1))
    }

    /// `y^n`.
    pub fn y_pow(n: u32) -> Self {
        Self::monomial(ExpMonomial::poly(0, n))
    }

    /// `y^n * exp(mu*y)`.
    pub fn y_pow_exp(n: u32, mu: GaussianRational) -> Self {
        Self::monomial(ExpMonomial::new(0, n, GaussianRational::zero(), mu))
    }

    /// Build from `(coefficient, monomial)` pairs, merging duplicates.
    pub fn from_terms<I: IntoIterator<Item = (GaussianRational, ExpMonomial)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (c, m) in it {
            p.add_term(m, &c);
        }
        p
    }

    fn add_term(&mut self, m: ExpMonomial, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExpMonomial, &GaussianRational)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &ExpMonomial) -> GaussianRational {
        self.terms.get(m).cloned().unwrap_or_else(GaussianRational::zero)
    }

    /// The constant value if this is a constant (including zero).
    pub fn as_constant(&self) -> Option<GaussianRational> {
        match self.terms.len() {
            0 => Some(GaussianRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_y_only(&self) -> bool {
        self.terms.keys().all(ExpMonomial::is_y_only)
    }

    /// Highest power of y appearing in any term.
    pub fn max_ydeg(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.ydeg).max()
    }

    pub fn add(&self, q: &ExpPoly) -> ExpPoly {
        let mut r = self.clone();
        for (m, c) in &q.terms {
            r.add_term(m.clone(), c);
        }
        r
    }

    pub fn sub(&self, q: &ExpPoly) -> ExpPoly {
        let mut r = self.clone();
        for (m, c) in &q.terms {
            r.add_term(m.clone(), &-c);
        }
        r
    }

    pub fn neg(&self) -> ExpPoly {
        self.scale(&GaussianRational::from_int(-1))
    }

    pub fn scale(&self, s: &GaussianRational) -> ExpPoly {
        if s.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, q: &ExpPoly) -> ExpPoly {
        let mut r = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &q.terms {
                r.add_term(m1.mul(m2), &(c1 * c2));
            }
        }
        r
    }

    /// Multiply every term by a single monomial.
    pub fn mul_monomial(&self, m: &ExpMonomial) -> ExpPoly {
        Self {
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> ExpPoly {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact partial derivative.
    pub fn diff(&self, var: Var) -> ExpPoly {
        let mut r = Self::zero();
        for (m, c) in &self.terms {
            let (deg, freq) = match var {
                Var::X => (m.xdeg, &m.xfreq),
                Var::Y => (m.ydeg, &m.yfreq),
            };
            if deg > 0 {
                let mut lowered = m.clone();
                match var {
                    Var::X => lowered.xdeg -= 1,
                    Var::Y => lowered.ydeg -= 1,
                }
                r.add_term(lowered, &(c * &GaussianRational::from_int(deg as i64)));
            }
            if !freq.is_zero() {
                r.add_term(m.clone(), &(c * freq));
            }
        }
        r
    }

    /// Replace x by `(x - f(y)) / alpha`.
    ///
    /// Fails with `RingEscape` when some term has a nonzero x-frequency.
    pub fn substitute_x_affine(&self, alpha: &GaussianRational, f: &ExpPoly) -> Result<ExpPoly, RingError> {
        let inv = alpha.inv().ok_or(RingError::ZeroScale)?;
        if !f.is_y_only() {
            return Err(RingError::NotYOnly(f.to_string()));
        }
        if let Some((m, _)) = self.terms.iter().find(|(m, _)| !m.xfreq.is_zero()) {
            return Err(RingError::RingEscape(format!("{}*x", m.xfreq)));
        }
        let base = ExpPoly::x().sub(f).scale(&inv);
        let mut powers = vec![ExpPoly::one()];
        let mut r = ExpPoly::zero();
        for (m, c) in &self.terms {
            while powers.len() <= m.xdeg as usize {
                let next = powers.last().unwrap().mul(&base);
                powers.push(next);
            }
            let rest = ExpMonomial::new(0, m.ydeg, GaussianRational::zero(), m.yfreq.clone());
            r = r.add(&powers[m.xdeg as usize].mul_monomial(&rest).scale(c));
        }
        Ok(r)
    }

    /// Replace y by `(y - c) / beta`.
    ///
    /// Exponentials in y pick up the factor `exp(-μc/β)`, which is not a
    /// Gaussian rational unless `μc = 0`; such terms are a `RingEscape`.
    pub fn substitute_y_affine(&self, beta: &GaussianRational, c: &GaussianRational) -> Result<ExpPoly, RingError> {
        let inv = beta.inv().ok_or(RingError::ZeroScale)?;
        if !c.is_zero() {
            if let Some((m, _)) = self.terms.iter().find(|(m, _)| !m.yfreq.is_zero()) {
                return Err(RingError::RingEscape(format!("{}*y", m.yfreq)));
            }
        }
        let base = ExpPoly::y().sub(&ExpPoly::constant(c.clone())).scale(&inv);
        let mut powers = vec![ExpPoly::one()];
        let mut r = ExpPoly::zero();
        for (m, coef) in &self.terms {
            while powers.len() <= m.ydeg as usize {
                let next = powers.last().unwrap().mul(&base);
                powers.push(next);
            }
            let rest = ExpMonomial::new(m.xdeg, 0, m.xfreq.clone(), &m.yfreq * &inv);
            r = r.add(&powers[m.ydeg as usize].mul_monomial(&rest).scale(coef));
        }
        Ok(r)
    }

    /// Exchange the roles of x and y.
    pub fn swap_vars(&self) -> ExpPoly {
        Self {
            terms: self.terms.iter().map(|(m, c)| (m.swap_vars(), c.clone())).collect(),
        }
    }

    /// Approximate floating-point value at a point. Only meant for numeric
    /// cross-checks in tests; every decision in the library is exact.
    pub fn eval(&self, x0: &GaussianRational, y0: &GaussianRational) -> Complex64 {
        let (x, y) = (x0.to_complex64(), y0.to_complex64());
        let mut acc = Complex64::zero();
        for (m, c) in &self.terms {
            let e = (m.xfreq.to_complex64() * x + m.yfreq.to_complex64() * y).exp();
            acc += c.to_complex64() * x.powu(m.xdeg) * y.powu(m.ydeg) * e;
        }
        acc
    }
}

impl fmt::Debug for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Canonical text form understood by [`crate::expr::parse_function`].
impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::expr::print_function(self))
    }
}

impl serde::Serialize for ExpPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for ExpPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        crate::expr::parse_function(&s).map_err(serde::de::Error::custom)
    }
}

macro_rules! poly_binop {
    ($tr:ident, $m:ident) => {
        impl<'a> $tr<&'a ExpPoly> for &'a ExpPoly {
            type Output = ExpPoly;
            fn $m(self, o: &ExpPoly) -> ExpPoly {
                ExpPoly::$m(self, o)
            }
        }
    };
}
poly_binop!(Add, add);
poly_binop!(Sub, sub);
poly_binop!(Mul, mul);

impl Neg for &ExpPoly {
    type Output = ExpPoly;
    fn neg(self) -> ExpPoly {
        ExpPoly::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    fn e(mu: i64) -> ExpPoly {
        ExpPoly::y_pow_exp(0, q(mu))
    }

    #[test]
    fn add_examples() {
        let y = ExpPoly::y();
        assert!(y.add(&y.neg()).is_zero());
        let s = y.add(&ExpPoly::y_pow(2));
        assert_eq!(s.len(), 2);
        assert_eq!(s.coeff(&ExpMonomial::poly(0, 1)), q(1));
        assert_eq!(s.coeff(&ExpMonomial::poly(0, 2)), q(1));
        let x = ExpPoly::x();
        assert_eq!(x.add(&y).add(&x.sub(&y)), x.scale(&q(2)));
    }

    #[test]
    fn mul_examples() {
        let y = ExpPoly::y();
        assert_eq!(y.mul(&y), ExpPoly::y_pow(2));
        assert_eq!(e(2).mul(&e(-2)), ExpPoly::one());
        let ye = ExpPoly::y_pow_exp(1, q(1));
        assert_eq!(ye.mul(&ye), ExpPoly::y_pow_exp(2, q(2)));
    }

    #[test]
    fn diff_examples() {
        assert_eq!(ExpPoly::y_pow(5).diff(Var::Y), ExpPoly::y_pow(4).scale(&q(5)));
        assert_eq!(e(2).diff(Var::Y), e(2).scale(&q(2)));
        let p = ExpPoly::y_pow_exp(2, q(2));
        let expected = ExpPoly::y_pow_exp(1, q(2)).scale(&q(2)).add(&p.scale(&q(2)));
        assert_eq!(p.diff(Var::Y), expected);
        assert!(ExpPoly::y().diff(Var::X).is_zero());
    }

    #[test]
    fn substitute_examples() {
        let f = ExpPoly::y_pow(3).add(&e(1));
        assert_eq!(
            ExpPoly::x().substitute_x_affine(&q(1), &f).unwrap(),
            ExpPoly::x().sub(&f)
        );
        let x2 = ExpPoly::x().pow(2);
        let expected = x2
            .sub(&ExpPoly::x().mul(&ExpPoly::y()).scale(&q(2)))
            .add(&ExpPoly::y_pow(2));
        assert_eq!(x2.substitute_x_affine(&q(1), &ExpPoly::y()).unwrap(), expected);
        let ex = ExpPoly::monomial(ExpMonomial::new(0, 0, q(1), q(0)));
        assert!(matches!(
            ex.substitute_x_affine(&q(1), &ExpPoly::y()),
            Err(RingError::RingEscape(_))
        ));
        assert!(matches!(
            ExpPoly::x().substitute_x_affine(&q(0), &ExpPoly::y()),
            Err(RingError::ZeroScale)
        ));
    }

    #[test]
    fn substitute_y_affine_scaling() {
        // y -> y/2 turns exp(2y) into exp(y)
        let r = e(2).substitute_y_affine(&q(2), &q(0)).unwrap();
        assert_eq!(r, e(1));
        // translation of a polynomial
        let r = ExpPoly::y_pow(2).substitute_y_affine(&q(1), &q(1)).unwrap();
        let expected = ExpPoly::y_pow(2).sub(&ExpPoly::y().scale(&q(2))).add(&ExpPoly::one());
        assert_eq!(r, expected);
        assert!(e(1).substitute_y_affine(&q(1), &q(1)).is_err());
    }

    #[test]
    fn eval_examples() {
        let z = GaussianRational::zero();
        assert_eq!(ExpPoly::zero().eval(&q(5), &q(7)), Complex64::zero());
        assert!((ExpPoly::y_pow(2).eval(&z, &q(3)) - Complex64::new(9.0, 0.0)).norm() < 1e-12);
        let s = ExpPoly::x().add(&ExpPoly::y());
        assert!((s.eval(&q(1), &q(2)) - Complex64::new(3.0, 0.0)).norm() < 1e-12);
    }

    mod props {
        use super::*;
        use crate::testgen::{function, scalar};
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(96))]

            #[test]
            fn ring_axioms(a in function(), b in function(), c in function()) {
                prop_assert_eq!(a.add(&b), b.add(&a));
                prop_assert_eq!(a.mul(&b), b.mul(&a));
                prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
                prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
                prop_assert!(a.sub(&a).is_zero());
                prop_assert_eq!(a.mul(&ExpPoly::one()), a.clone());
            }

            #[test]
            fn derivations(a in function(), b in function()) {
                for v in [Var::X, Var::Y] {
                    prop_assert_eq!(a.mul(&b).diff(v), a.diff(v).mul(&b).add(&a.mul(&b.diff(v))));
                    prop_assert_eq!(a.add(&b).diff(v), a.diff(v).add(&b.diff(v)));
                }
            }

            #[test]
            fn scaling_is_linear(a in function(), s in scalar(), t in scalar()) {
                prop_assert_eq!(a.scale(&s).scale(&t), a.scale(&(&s * &t)));
                prop_assert_eq!(a.scale(&s).add(&a.scale(&t)), a.scale(&(&s + &t)));
            }

            #[test]
            fn canonical_form_has_no_zero_terms(a in function(), b in function()) {
                prop_assert!(a.mul(&b).sub(&b.mul(&a)).terms().next().is_none());
                prop_assert!(a.add(&b).terms().all(|(_, c)| !c.is_zero()));
            }
        }
    }
}
