//! Exact spectral analysis of `ad X` restricted to an invariant subspace.
//!
//! Eigenvalues are searched in Q(i) only. The characteristic polynomial is
//! reduced to its square-free part and rescaled so that every Q(i) root becomes
//! a Gaussian integer dividing the constant term. Candidates come from a
//! floating point root finder (rounded to the lattice) and from an exhaustive
//! divisor walk when the constant term is small; every candidate is verified
//! by exact evaluation before it is used.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraSpan;
use crate::fields::VectorField;
use crate::linalg::Matrix;
use crate::scalar::GaussianRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpectralError {
    #[error("target is not invariant: [X, e_{index}] = {witness} lies outside it")]
    NotInvariant { index: usize, witness: String },
    #[error("characteristic polynomial has the factor {factor} with no root in Q(i)")]
    IrrationalSpectrum { factor: String },
    #[error("generalized eigenvector {field} for eigenvalue {eigenvalue} is not of the expected form")]
    FormMismatch { eigenvalue: GaussianRational, field: String },
}

/// The operator whose conjugacy class decides the expected eigenfunction shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    /// `∂y`: eigenfunctions `e^{λy} P(y) ∂x`.
    Dy,
    /// `x∂x + ∂y`: eigenfunctions `e^{(λ+1)y} P(y) ∂x`.
    XDxPlusDy,
}

impl OperatorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OperatorKind::Dy => "Dy",
            OperatorKind::XDxPlusDy => "xDx+Dy",
        }
    }
}

/// Matrix of `ad X` on a subspace; column j holds the coordinates of `[X, e_j]`.
#[derive(Debug, Clone)]
pub struct AdMatrix {
    pub operator: VectorField,
    pub target: AlgebraSpan,
    pub m: Matrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenBlock {
    pub eigenvalue: GaussianRational,
    pub multiplicity: usize,
    /// Coordinate vectors (in the target basis) spanning the generalized eigenspace.
    pub basis: Vec<Vec<GaussianRational>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpectralData {
    /// Sorted by eigenvalue in (re, im) order.
    pub blocks: Vec<EigenBlock>,
}

impl SpectralData {
    /// The `(λ, n_λ)` pairs.
    pub fn spectrum(&self) -> Vec<(GaussianRational, usize)> {
        self.blocks.iter().map(|b| (b.eigenvalue.clone(), b.multiplicity)).collect()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.blocks.iter().map(|b| b.multiplicity).sum()
    }

    /// All generalized eigenvectors, block after block.
    pub fn change_of_basis(&self, dim: usize) -> Matrix {
        let cols: Vec<Vec<GaussianRational>> =
            self.blocks.iter().flat_map(|b| b.basis.iter().cloned()).collect();
        Matrix::from_columns(dim, &cols)
    }
}

pub fn ad_matrix(x: &VectorField, target: &AlgebraSpan) -> Result<AdMatrix, SpectralError> {
    let mut cols = Vec::with_capacity(target.dim());
    for (j, e) in target.basis().iter().enumerate() {
        let b = x.bracket(e);
        let c = target.member(&b).ok_or_else(|| SpectralError::NotInvariant {
            index: j,
            witness: b.to_string(),
        })?;
        cols.push(c);
    }
    Ok(AdMatrix {
        operator: x.clone(),
        target: target.clone(),
        m: Matrix::from_columns(target.dim(), &cols),
    })
}

/// Univariate polynomial over Q(i), coefficients from low to high degree.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly(pub Vec<GaussianRational>);

impl Poly {
    fn trimmed(mut c: Vec<GaussianRational>) -> Self {
        while c.last().is_some_and(GaussianRational::is_zero) {
            c.pop();
        }
        Poly(c)
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, t: &GaussianRational) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for c in self.0.iter().rev() {
            acc = &(&acc * t) + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        Poly::trimmed(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &GaussianRational::from_int(k as i64))
                .collect(),
        )
    }

    pub fn monic(&self) -> Poly {
        match self.0.last() {
            None => self.clone(),
            Some(l) => {
                let inv = l.inv().expect("nonzero leading coefficient");
                Poly(self.0.iter().map(|c| c * &inv).collect())
            }
        }
    }

    /// Quotient and remainder of Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead_inv = d.0[dd].inv().unwrap();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (Poly(vec![]), Poly::trimmed(r));
        }
        let mut q = vec![GaussianRational::zero(); r.len() - dd];
        for k in (dd..r.len()).rev() {
            let c = &r[k] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.0.iter().enumerate() {
                let t = &c * dj;
                r[k - dd + j] -= &t;
            }
            q[k - dd] = c;
        }
        r.truncate(dd);
        (Poly::trimmed(q), Poly::trimmed(r))
    }

    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Product of the distinct irreducible factors, monic.
    pub fn square_free(&self) -> Poly {
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => "t".into(),
                _ => format!("t^{k}"),
            };
            let cs = if c.is_real() || c.re().is_zero() {
                c.to_string()
            } else {
                format!("({c})")
            };
            let (neg, body) = match cs.strip_prefix('-') {
                Some(rest) if !cs.starts_with('(') => (true, rest.to_string()),
                _ => (false, cs),
            };
            let term = match (body.as_str(), mono.is_empty()) {
                (_, true) => body,
                ("1", false) => mono,
                (_, false) => format!("{body}*{mono}"),
            };
            match (first, neg) {
                (true, true) => write!(f, "-{term}")?,
                (true, false) => write!(f, "{term}")?,
                (false, true) => write!(f, " - {term}")?,
                (false, false) => write!(f, " + {term}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `det(tI - m)` by the Faddeev–LeVerrier recursion.
pub fn characteristic_polynomial(m: &Matrix) -> Poly {
    assert!(m.is_square());
    let n = m.rows();
    let mut c = vec![GaussianRational::zero(); n + 1];
    c[n] = GaussianRational::one();
    let mut mk = Matrix::zeros(n, n);
    for k in 1..=n {
        let mut next = m.mul(&mk);
        for d in 0..n {
            next[(d, d)] += &c[n - k + 1];
        }
        mk = next;
        let tr = m.mul(&mk).trace();
        c[n - k] = -(&tr / &GaussianRational::from_int(k as i64));
    }
    Poly::trimmed(c)
}

/// A root of `p` in Q(i), if one exists and is found by the search.
fn find_root(p: &Poly) -> Option<GaussianRational> {
    let n = p.degree()?;
    if n == 0 {
        return None;
    }
    let p = p.monic();
    if p.0[0].is_zero() {
        return Some(GaussianRational::zero());
    }
    // t = s/D turns p into a monic polynomial over Z[i]
    let mut d = BigInt::one();
    for c in &p.0 {
        d = d.lcm(&c.denom_lcm());
    }
    let dq = GaussianRational::from_rational(BigRational::from_integer(d.clone()));
    let check = |s: &GaussianRational| -> Option<GaussianRational> {
        let t = s / &dq;
        p.eval(&t).is_zero().then_some(t)
    };

    for z in numeric_roots(&p) {
        let zs = z * d.to_f64().unwrap_or(f64::INFINITY);
        if !zs.re.is_finite() || !zs.im.is_finite() || zs.norm() > 1e15 {
            continue;
        }
        let (r0, i0) = (zs.re.round() as i64, zs.im.round() as i64);
        for dr in -1..=1 {
            for di in -1..=1 {
                let s = GaussianRational::new(
                    BigRational::from_integer(BigInt::from(r0 + dr)),
                    BigRational::from_integer(BigInt::from(i0 + di)),
                );
                if let Some(t) = check(&s) {
                    return Some(t);
                }
            }
        }
    }

    // Exhaustive walk over Gaussian integers whose norm divides N(b0).
    let b0 = &p.0[0] * &dq.pow(n as u32);
    let norm = b0.norm();
    debug_assert!(norm.is_integer());
    let norm = norm.to_integer();
    if norm.bits() > 40 {
        return None;
    }
    let nn = norm.to_u64().unwrap();
    for dv in (1..=nn.sqrt()).flat_map(|a| [a, nn / a]).filter(|a| nn.is_multiple_of(*a)) {
        let mut u = 0u64;
        while u * u <= dv {
            let rest = dv - u * u;
            let v = rest.sqrt();
            if v * v == rest {
                for (su, sv) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
                    let s = GaussianRational::new(
                        BigRational::from_integer(BigInt::from(su * u as i64)),
                        BigRational::from_integer(BigInt::from(sv * v as i64)),
                    );
                    if let Some(t) = check(&s) {
                        return Some(t);
                    }
                }
            }
            u += 1;
        }
    }
    None
}

/// Durand–Kerner iteration on a monic polynomial in floating point.
fn numeric_roots(p: &Poly) -> Vec<Complex64> {
    let n = p.degree().unwrap_or(0);
    if n == 0 {
        return vec![];
    }
    let c: Vec<Complex64> = p.0.iter().map(GaussianRational::to_complex64).collect();
    let eval = |z: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |a, ci| a * z + ci);
    let bound = 1.0 + c[..n].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * bound.min(1e6)).collect();
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for k in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != k {
                    den *= z[k] - z[j];
                }
            }
            if den.norm() == 0.0 {
                den = Complex64::new(1e-12, 0.0);
            }
            let step = eval(z[k]) / den;
            z[k] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 {
            break;
        }
    }
    z
}

/// All Q(i) roots of `p` (without multiplicity) and the leftover monic factor
/// that has none, of degree zero when `p` splits completely.
pub fn gaussian_roots(p: &Poly) -> (Vec<GaussianRational>, Poly) {
    let mut rest = p.square_free();
    let mut roots = Vec::new();
    while rest.degree().unwrap_or(0) > 0 {
        match find_root(&rest) {
            Some(r) => {
                let lin = Poly(vec![-&r, GaussianRational::one()]);
                rest = rest.div_rem(&lin).0;
                roots.push(r);
            }
            None => break,
        }
    }
    roots.sort();
    (roots, rest)
}

pub fn spectral_decompose(ad: &AdMatrix) -> Result<SpectralData, SpectralError> {
    decompose_matrix(&ad.m)
}

/// How many times `t − λ` divides `p`.
fn root_multiplicity(p: &Poly, lam: &GaussianRational) -> usize {
    let lin = Poly(vec![-lam, GaussianRational::one()]);
    let mut cur = p.clone();
    let mut k = 0;
    loop {
        let (quo, rem) = cur.div_rem(&lin);
        if !rem.is_zero() || cur.degree().unwrap_or(0) == 0 {
            return k;
        }
        cur = quo;
        k += 1;
    }
}

/// Generalized eigenspace decomposition of a square matrix over Q(i).
pub fn decompose_matrix(m: &Matrix) -> Result<SpectralData, SpectralError> {
    let n = m.rows();
    if n == 0 {
        return Ok(SpectralData::default());
    }
    let chi = characteristic_polynomial(m);
    let (roots, rest) = gaussian_roots(&chi);
    if rest.degree().unwrap_or(0) > 0 {
        return Err(SpectralError::IrrationalSpectrum { factor: rest.to_string() });
    }
    let blocks = roots
        .into_iter()
        .map(|lam| {
            let basis = m.sub_scalar(&lam).pow(root_multiplicity(&chi, &lam)).kernel();
            EigenBlock {
                eigenvalue: lam,
                multiplicity: basis.len(),
                basis,
            }
        })
        .collect();
    Ok(SpectralData { blocks })
}

/// Checks every generalized eigenvector is `e^{μy} P(y) ∂x` with `deg P < n_λ`,
/// where `μ = λ` for `∂y` and `μ = λ + 1` for `x∂x + ∂y`.
pub fn eigenfunction_form(
    d: &SpectralData,
    target: &AlgebraSpan,
    kind: OperatorKind,
) -> Result<Vec<(GaussianRational, usize)>, SpectralError> {
    for b in &d.blocks {
        let mu = match kind {
            OperatorKind::Dy => b.eigenvalue.clone(),
            OperatorKind::XDxPlusDy => &b.eigenvalue + &GaussianRational::one(),
        };
        for v in &b.basis {
            let f = target.combine(v);
            let ok = f.q.is_zero()
                && f.p.terms().all(|(m, _)| {
                    m.xdeg == 0 && m.xfreq.is_zero() && m.yfreq == mu && (m.ydeg as usize) < b.multiplicity
                });
            if !ok {
                return Err(SpectralError::FormMismatch {
                    eigenvalue: b.eigenvalue.clone(),
                    field: f.to_string(),
                });
            }
        }
    }
    Ok(d.spectrum())
}
