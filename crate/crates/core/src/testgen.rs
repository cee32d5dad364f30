//! Proptest strategies shared by the unit tests.

use proptest::prelude::*;

use crate::coeffring::{ExpMonomial, ExpPoly};
use crate::fields::VectorField;
use crate::scalar::GaussianRational;
use crate::transform::PointTransform;

pub fn scalar() -> impl Strategy<Value = GaussianRational> {
    (-6i64..=6, 1i64..=4, -3i64..=3, 1i64..=3).prop_map(|(a, b, c, d)| GaussianRational::complex(a, b, c, d))
}

pub fn nonzero_scalar() -> impl Strategy<Value = GaussianRational> {
    scalar().prop_filter("nonzero", |s| !s.is_zero())
}

fn freq() -> impl Strategy<Value = GaussianRational> {
    prop_oneof![
        3 => Just(GaussianRational::zero()),
        1 => (-2i64..=2).prop_map(GaussianRational::from_int),
        1 => (-2i64..=2, -1i64..=1).prop_map(|(a, b)| GaussianRational::complex(a, 1, b, 1)),
    ]
}

fn monomial(with_x: bool, with_xfreq: bool) -> impl Strategy<Value = ExpMonomial> {
    let xd = if with_x { 0u32..=2 } else { 0u32..=0 };
    (xd, 0u32..=3, freq(), freq()).prop_map(move |(a, b, xf, yf)| {
        let xf = if with_xfreq { xf } else { GaussianRational::zero() };
        ExpMonomial::new(a, b, xf, yf)
    })
}

fn poly_from(m: impl Strategy<Value = ExpMonomial>) -> impl Strategy<Value = ExpPoly> {
    prop::collection::vec((scalar(), m), 0..4).prop_map(ExpPoly::from_terms)
}

/// General element of the ring, x-exponentials included.
pub fn function() -> impl Strategy<Value = ExpPoly> {
    poly_from(monomial(true, true))
}

/// Element without x-exponentials (so x-shears stay in the ring).
pub fn shearable_function() -> impl Strategy<Value = ExpPoly> {
    poly_from(monomial(true, false))
}

pub fn y_function() -> impl Strategy<Value = ExpPoly> {
    poly_from(monomial(false, false))
}

pub fn field() -> impl Strategy<Value = VectorField> {
    (shearable_function(), shearable_function()).prop_map(|(p, q)| VectorField::new(p, q))
}

pub fn transform() -> impl Strategy<Value = PointTransform> {
    prop_oneof![
        (nonzero_scalar(), y_function()).prop_map(|(alpha, f)| PointTransform::ShearX { alpha, f }),
        (nonzero_scalar(), prop_oneof![Just(GaussianRational::zero()), scalar()])
            .prop_map(|(beta, c)| PointTransform::AffineY { beta, c }),
        Just(PointTransform::Swap),
    ]
}
