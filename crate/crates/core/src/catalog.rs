//! Canonical families and their generators.
//!
//! Each family lists the explicit basis of its normal form. `normal_form`
//! picks a unique representative among parameter values that describe the
//! same algebra up to the supported point transformations, and `audit`
//! reports instances whose printed form is equivalent to another family.

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraSpan;
use crate::classify::{InvariantFingerprint, SpectralSummary};
use crate::coeffring::{ExpMonomial, ExpPoly};
use crate::fields::VectorField;
use crate::linalg::Matrix;
use crate::scalar::GaussianRational;
use crate::spectral::OperatorKind;
use crate::transform::{pushforward_algebra, solve_antiderivative, PointTransform, TransformChain};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CatalogError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, CatalogError> {
    Err(CatalogError::InvalidParameters(msg.into()))
}

/// One block `V(λ)` of the abelian ideal: `e^{λy} P(y) ∂x` with `deg P < multiplicity`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpectralPair {
    pub lambda: GaussianRational,
    pub multiplicity: usize,
}

impl SpectralPair {
    pub fn new(lambda: GaussianRational, multiplicity: usize) -> Self {
        Self { lambda, multiplicity }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum CanonicalFamily {
    /// Abelian with generic rank 1. No finer normal form is assigned.
    AbelianRank1,
    /// `⟨∂x, ∂y⟩`.
    AbelianRank2,
    /// `⟨∂y, ∂x, y∂x, …, y^N ∂x⟩`.
    NilpotentNonAbelian {
        #[serde(rename = "N")]
        n: u32,
    },
    /// `⟨x∂x, y∂y, ∂x, ∂y, y∂x, …, y^k ∂x⟩`.
    NonAbelianDerivedFull { k: u32 },
    /// `⟨a x∂x + y∂y, ∂x, ∂y, y∂x, …, y^k ∂x⟩`.
    NonAbelianDerivedLine { k: u32, a: GaussianRational },
    /// Extensions of the translations `⟨∂x, ∂y⟩`.
    Rank2Abelian {
        subtype: u8,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<GaussianRational>,
    },
    /// `⟨x∂x⟩ + ⟨φ_1 ∂x, …, φ_n ∂x⟩` with `φ_1 = 1`.
    Rank1Solvable { spectrum: Vec<ExpPoly> },
    /// `⟨h, …⟩` where `h = Σ V(λ)` over the pairs in `s`.
    SpectralType {
        variant: u8,
        s: Vec<SpectralPair>,
        #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
        n: Option<u32>,
    },
}

impl CanonicalFamily {
    pub fn name(&self) -> &'static str {
        match self {
            CanonicalFamily::AbelianRank1 => "AbelianRank1",
            CanonicalFamily::AbelianRank2 => "AbelianRank2",
            CanonicalFamily::NilpotentNonAbelian { .. } => "NilpotentNonAbelian",
            CanonicalFamily::NonAbelianDerivedFull { .. } => "NonAbelianDerivedFull",
            CanonicalFamily::NonAbelianDerivedLine { .. } => "NonAbelianDerivedLine",
            CanonicalFamily::Rank2Abelian { .. } => "Rank2Abelian",
            CanonicalFamily::Rank1Solvable { .. } => "Rank1Solvable",
            CanonicalFamily::SpectralType { .. } => "SpectralType",
        }
    }

    /// Convenience constructor taking `(λ, n_λ)` pairs; `N` is derived.
    pub fn spectral(variant: u8, s: &[(GaussianRational, usize)]) -> Self {
        CanonicalFamily::SpectralType {
            variant,
            s: s.iter().map(|(l, m)| SpectralPair::new(l.clone(), *m)).collect(),
            n: None,
        }
    }
}

fn q(n: i64) -> GaussianRational {
    GaussianRational::from_int(n)
}

fn ypx(j: u32) -> VectorField {
    VectorField::along_x(ExpPoly::y_pow(j))
}

fn xdx() -> VectorField {
    VectorField::along_x(ExpPoly::x())
}

fn ydy() -> VectorField {
    VectorField::along_y(ExpPoly::y())
}

fn x_dx_plus_dy() -> VectorField {
    VectorField::new(ExpPoly::x(), ExpPoly::one())
}

/// `y∂x − x∂y`.
fn rotation() -> VectorField {
    VectorField::new(ExpPoly::y(), ExpPoly::x().neg())
}

fn multiplicity_of(s: &[SpectralPair], lambda: &GaussianRational) -> usize {
    s.iter().find(|p| &p.lambda == lambda).map_or(0, |p| p.multiplicity)
}

/// The exponent whose block is the null space of the distinguished operator.
fn null_exponent(variant: u8) -> GaussianRational {
    if variant <= 3 {
        q(0)
    } else {
        q(1)
    }
}

/// Fields spanning `h`, block by block in ascending λ and degree.
pub fn h_basis(s: &[SpectralPair]) -> Vec<VectorField> {
    let mut pairs = s.to_vec();
    pairs.sort();
    pairs
        .iter()
        .flat_map(|p| (0..p.multiplicity as u32).map(move |j| VectorField::along_x(ExpPoly::y_pow_exp(j, p.lambda.clone()))))
        .collect()
}

fn check_spectral(variant: u8, s: &[SpectralPair], n: Option<u32>) -> Result<u32, CatalogError> {
    if !(1..=6).contains(&variant) {
        return invalid(format!("spectral variant must be 1..6, got {variant}"));
    }
    if s.is_empty() {
        return invalid("S must be non-empty");
    }
    if s.iter().any(|p| p.multiplicity == 0) {
        return invalid("multiplicities must be positive");
    }
    let mut ls: Vec<_> = s.iter().map(|p| &p.lambda).collect();
    ls.sort();
    if ls.windows(2).any(|w| w[0] == w[1]) {
        return invalid("eigenvalues in S must be distinct");
    }
    let null = multiplicity_of(s, &null_exponent(variant)) as u32;
    match variant {
        1 if null > 0 => return invalid("variant 1 requires 0 not in S"),
        4 if null > 0 => return invalid("variant 4 requires the operator to have no zero eigenvalue (1 not in S)"),
        6 if null == 0 => return invalid("variant 6 requires N > 0 (1 in S)"),
        _ => {}
    }
    let wants_n = matches!(variant, 3 | 5 | 6);
    match (wants_n, n) {
        (true, Some(given)) if given != null => {
            invalid(format!("N must equal the multiplicity of the null eigenvalue ({null}), got {given}"))
        }
        (false, Some(_)) => invalid(format!("variant {variant} takes no N")),
        _ => Ok(null),
    }
}

/// Checks the side conditions of `fam`.
pub fn validate(fam: &CanonicalFamily) -> Result<(), CatalogError> {
    match fam {
        CanonicalFamily::AbelianRank1 | CanonicalFamily::AbelianRank2 => Ok(()),
        CanonicalFamily::NilpotentNonAbelian { n } if *n == 0 => invalid("N must be >= 1"),
        CanonicalFamily::NonAbelianDerivedFull { k } if *k == 0 => invalid("k must be >= 1"),
        CanonicalFamily::NonAbelianDerivedLine { k, a } => {
            if *k == 0 {
                return invalid("k must be >= 1");
            }
            if a.is_zero() || *a == q(*k as i64) {
                return invalid(format!("a must differ from 0 and k = {k}, got {a}"));
            }
            Ok(())
        }
        CanonicalFamily::Rank2Abelian { subtype, lambda } => match (subtype, lambda) {
            (1 | 2, None) => Ok(()),
            (3, Some(l)) if !l.is_zero() => Ok(()),
            (3, Some(_)) => invalid("type 3 requires lambda != 0 so that g' = <Dx, Dy>"),
            (4, Some(l)) if l.is_real() => Ok(()),
            (4, Some(_)) => invalid("type 4 is a real form and requires real lambda"),
            (1 | 2, Some(_)) => invalid(format!("type {subtype} takes no lambda")),
            (3 | 4, None) => invalid(format!("type {subtype} requires lambda")),
            _ => invalid(format!("Rank2Abelian subtype must be 1..4, got {subtype}")),
        },
        CanonicalFamily::Rank1Solvable { spectrum } => {
            if !spectrum.first().and_then(ExpPoly::as_constant).is_some_and(|c| c.is_one()) {
                return invalid("the first spectrum function must be 1");
            }
            if let Some(f) = spectrum.iter().find(|f| !f.is_y_only()) {
                return invalid(format!("spectrum function {f} depends on x"));
            }
            let fields: Vec<_> = spectrum.iter().cloned().map(VectorField::along_x).collect();
            if AlgebraSpan::span_of(&fields).dim() != spectrum.len() {
                return invalid("spectrum functions must be linearly independent");
            }
            Ok(())
        }
        CanonicalFamily::SpectralType { variant, s, n } => check_spectral(*variant, s, *n).map(|_| ()),
        _ => Ok(()),
    }
}

/// The explicit basis of the normal form, in the order the families list it.
pub fn generate_basis(fam: &CanonicalFamily) -> Result<Vec<VectorField>, CatalogError> {
    validate(fam)?;
    Ok(match fam {
        CanonicalFamily::AbelianRank1 => return invalid("AbelianRank1 has no canonical basis"),
        CanonicalFamily::AbelianRank2 => vec![VectorField::dx(), VectorField::dy()],
        CanonicalFamily::NilpotentNonAbelian { n } => {
            let mut b = vec![VectorField::dy()];
            b.extend((0..=*n).map(ypx));
            b
        }
        CanonicalFamily::NonAbelianDerivedFull { k } => {
            let mut b = vec![xdx(), ydy(), VectorField::dx(), VectorField::dy()];
            b.extend((1..=*k).map(ypx));
            b
        }
        CanonicalFamily::NonAbelianDerivedLine { k, a } => {
            let mut b = vec![xdx().scale(a).add(&ydy()), VectorField::dx(), VectorField::dy()];
            b.extend((1..=*k).map(ypx));
            b
        }
        CanonicalFamily::Rank2Abelian { subtype, lambda } => {
            let mut b = match (subtype, lambda) {
                (1, _) => vec![xdx(), ydy()],
                (2, _) => vec![xdx().add(&ydy()), rotation()],
                (3, Some(l)) => vec![xdx().add(&ydy().scale(l))],
                (4, Some(l)) => vec![xdx().add(&ydy()).scale(l).add(&rotation())],
                _ => unreachable!("validated"),
            };
            b.extend([VectorField::dx(), VectorField::dy()]);
            b
        }
        CanonicalFamily::Rank1Solvable { spectrum } => {
            let mut b = vec![xdx()];
            b.extend(spectrum.iter().cloned().map(VectorField::along_x));
            b
        }
        CanonicalFamily::SpectralType { variant, s, n } => {
            let big_n = check_spectral(*variant, s, *n)?;
            let mut b = h_basis(s);
            let e_n = || VectorField::along_x(ExpPoly::y_pow_exp(big_n, q(1)));
            match variant {
                1 => b.push(VectorField::dy()),
                2 => b.extend([VectorField::dy(), xdx()]),
                3 => b.extend([VectorField::dy(), ypx(big_n)]),
                4 => b.push(x_dx_plus_dy()),
                5 => b.extend([x_dx_plus_dy(), e_n()]),
                6 => b.extend([x_dx_plus_dy(), xdx().add(&e_n())]),
                _ => unreachable!("validated"),
            }
            b
        }
    })
}

/// The normal-form algebra. Closure is verified before returning.
pub fn generate(fam: &CanonicalFamily) -> Result<AlgebraSpan, CatalogError> {
    let basis = generate_basis(fam)?;
    let g = AlgebraSpan::make_span(&basis).map_err(|e| CatalogError::InvalidParameters(e.to_string()))?;
    if g.dim() != basis.len() {
        return invalid(format!("{} generators are linearly dependent", fam.name()));
    }
    if let Err(e) = g.verify_closure() {
        return invalid(format!("generated algebra is not closed: {e}"));
    }
    Ok(g)
}

/// Canonical representative of `S` up to a common nonzero scale: among the
/// rescalings that send some nonzero λ to 1, the lexicographically smallest
/// sorted list.
pub fn normalize_scale(s: &[SpectralPair]) -> Vec<SpectralPair> {
    let sorted = |c: &GaussianRational| {
        let mut v: Vec<SpectralPair> = s.iter().map(|p| SpectralPair::new(&p.lambda * c, p.multiplicity)).collect();
        v.sort();
        v
    };
    s.iter()
        .filter_map(|p| p.lambda.inv())
        .map(|c| sorted(&c))
        .min()
        .unwrap_or_else(|| sorted(&GaussianRational::one()))
}

/// `λ ~ 1/λ`: keep the one of modulus at most 1, the smaller in (re, im) order on ties.
fn normalize_type3(l: &GaussianRational) -> GaussianRational {
    let inv = l.inv().expect("validated nonzero");
    match l.norm().cmp(&BigRational::one()) {
        std::cmp::Ordering::Less => l.clone(),
        std::cmp::Ordering::Greater => inv,
        std::cmp::Ordering::Equal => l.clone().min(inv),
    }
}

/// Canonical basis of a space of y-only functions: reduced echelon form with
/// the constant 1 as the leading column and the rest in monomial order.
pub fn canonical_function_basis(funcs: &[ExpPoly]) -> Vec<ExpPoly> {
    let mut monos: Vec<ExpMonomial> = funcs.iter().flat_map(|f| f.terms().map(|(m, _)| m.clone())).collect();
    monos.sort();
    monos.dedup();
    if let Some(k) = monos.iter().position(ExpMonomial::is_one) {
        let one = monos.remove(k);
        monos.insert(0, one);
    }
    if monos.is_empty() {
        return vec![];
    }
    let rows: Vec<Vec<GaussianRational>> = funcs.iter().map(|f| monos.iter().map(|m| f.coeff(m)).collect()).collect();
    let mut m = Matrix::from_rows(rows);
    let piv = m.rref_in_place();
    (0..piv.len())
        .map(|r| ExpPoly::from_terms(monos.iter().enumerate().map(|(j, mono)| (m[(r, j)].clone(), mono.clone()))))
        .collect()
}

/// Normalized spectrum of `⟨x∂x⟩ + ⟨φ ∂x⟩`: divide by each unit `e^{μy}` in the
/// span (a change `x̃ = e^{-μy} x`) and keep the smallest canonical basis.
/// `None` when the span contains no unit.
pub fn canonical_rank1_spectrum(funcs: &[ExpPoly]) -> Option<Vec<ExpPoly>> {
    let span = AlgebraSpan::span_of(&funcs.iter().cloned().map(VectorField::along_x).collect::<Vec<_>>());
    let mut units: Vec<ExpMonomial> = funcs
        .iter()
        .flat_map(|f| f.terms().map(|(m, _)| m.clone()))
        .filter(|m| m.xdeg == 0 && m.ydeg == 0 && m.xfreq.is_zero())
        .collect();
    units.sort();
    units.dedup();
    units
        .into_iter()
        .filter(|u| span.contains(&VectorField::along_x(ExpPoly::monomial(u.clone()))))
        .map(|u| {
            let inv = ExpMonomial::new(0, 0, q(0), -&u.yfreq);
            let divided: Vec<ExpPoly> = funcs.iter().map(|f| f.mul_monomial(&inv)).collect();
            canonical_function_basis(&divided)
        })
        .min()
}

/// The unique representative of the parameter class of `fam`.
pub fn normal_form(fam: &CanonicalFamily) -> Result<CanonicalFamily, CatalogError> {
    validate(fam)?;
    Ok(match fam {
        CanonicalFamily::NonAbelianDerivedLine { k: 1, a } => {
            // the two non-central eigenvalues of ad X on the Heisenberg ideal can be swapped
            let other = a / &(a - &q(1));
            CanonicalFamily::NonAbelianDerivedLine {
                k: 1,
                a: a.clone().min(other),
            }
        }
        CanonicalFamily::Rank2Abelian { subtype: 3, lambda: Some(l) } => CanonicalFamily::Rank2Abelian {
            subtype: 3,
            lambda: Some(normalize_type3(l)),
        },
        CanonicalFamily::Rank2Abelian { subtype: 4, lambda: Some(l) } => CanonicalFamily::Rank2Abelian {
            subtype: 4,
            lambda: Some(if l.re().is_negative() { -l } else { l.clone() }),
        },
        CanonicalFamily::Rank1Solvable { spectrum } => CanonicalFamily::Rank1Solvable {
            spectrum: canonical_rank1_spectrum(spectrum).expect("validated spectrum contains 1"),
        },
        CanonicalFamily::SpectralType { variant, s, n } => {
            let big_n = check_spectral(*variant, s, *n)?;
            let s = if *variant <= 3 {
                normalize_scale(s)
            } else {
                let mut v = s.clone();
                v.sort();
                v
            };
            CanonicalFamily::SpectralType {
                variant: *variant,
                s,
                n: matches!(variant, 3 | 5 | 6).then_some(big_n),
            }
        }
        other => other.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiagnosticKind {
    /// The printed form is equivalent to another family by an explicit transform.
    RedundantVariant,
    /// The printed form is nilpotent and belongs to the nilpotent family.
    CollapsesToNilpotent,
    /// The brute-force derived algebra differs from the printed one.
    DerivedMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogDiagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
    /// Family the classifier is expected to report instead.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equivalent: Option<CanonicalFamily>,
    /// Verified transform onto the equivalent family's normal form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<TransformChain>,
}

/// The ideal each family declares to be its derived algebra, when it names one.
pub fn printed_derived(fam: &CanonicalFamily) -> Result<Option<AlgebraSpan>, CatalogError> {
    validate(fam)?;
    let fields = match fam {
        CanonicalFamily::NilpotentNonAbelian { n } => (0..*n).map(ypx).collect(),
        CanonicalFamily::NonAbelianDerivedFull { k } | CanonicalFamily::NonAbelianDerivedLine { k, .. } => {
            let mut b = vec![VectorField::dx(), VectorField::dy()];
            b.extend((1..=*k).map(ypx));
            b
        }
        CanonicalFamily::Rank2Abelian { .. } => vec![VectorField::dx(), VectorField::dy()],
        CanonicalFamily::Rank1Solvable { spectrum } => spectrum.iter().cloned().map(VectorField::along_x).collect(),
        CanonicalFamily::SpectralType { s, .. } => h_basis(s),
        CanonicalFamily::AbelianRank2 => vec![],
        CanonicalFamily::AbelianRank1 => return Ok(None),
    };
    Ok(Some(AlgebraSpan::span_of(&fields)))
}

/// Checks the family against its own claims and reports printed forms that
/// are redundant or degenerate.
pub fn audit(fam: &CanonicalFamily) -> Result<Vec<CatalogDiagnostic>, CatalogError> {
    let g = generate(fam)?;
    let mut out = Vec::new();
    if let Some(h) = printed_derived(fam)? {
        let d = g.derived();
        if !d.same_span(&h) {
            out.push(CatalogDiagnostic {
                kind: DiagnosticKind::DerivedMismatch,
                message: format!("derived algebra has dimension {} but the printed ideal has dimension {}", d.dim(), h.dim()),
                equivalent: None,
                witness: None,
            });
        }
    }
    if let CanonicalFamily::SpectralType { variant, s, .. } = fam {
        let null = multiplicity_of(s, &null_exponent(*variant));
        let all_null = s.iter().all(|p| p.lambda == null_exponent(*variant));
        if all_null && matches!(variant, 3 | 5) {
            out.push(CatalogDiagnostic {
                kind: DiagnosticKind::CollapsesToNilpotent,
                message: format!("every eigenvalue of the distinguished operator is zero, so variant {variant} is nilpotent"),
                equivalent: Some(CanonicalFamily::NilpotentNonAbelian { n: null as u32 }),
                witness: None,
            });
        }
        if *variant == 6 {
            // x̃ = x + K(y) with K' = y^N e^y sends ∂y − y^N e^y ∂x to ∂ỹ and
            // x∂x + y^N e^y ∂x to x̃∂x̃ modulo h
            let k = solve_antiderivative(&ExpPoly::y_pow_exp(null as u32, q(1))).expect("y-only");
            let mut chain = TransformChain::from(PointTransform::shear(k));
            let target = normal_form(&CanonicalFamily::SpectralType { variant: 2, s: s.clone(), n: None })?;
            if let CanonicalFamily::SpectralType { s: normal_s, .. } = &target {
                // ỹ = βy sends the exponent λ to λ/β
                let beta = s.iter().map(|p| &p.lambda).find(|l| {
                    l.inv().is_some_and(|c| {
                        let mut v: Vec<SpectralPair> = s.iter().map(|p| SpectralPair::new(&p.lambda * &c, p.multiplicity)).collect();
                        v.sort();
                        &v == normal_s
                    })
                });
                if let Some(beta) = beta.filter(|b| !b.is_one()) {
                    chain = chain.then(PointTransform::scale_y(beta.clone()));
                }
            }
            let pushed = pushforward_algebra(&chain, &g).map_err(|e| CatalogError::InvalidParameters(e.to_string()))?;
            let verified = pushed.same_span(&generate(&target)?);
            out.push(CatalogDiagnostic {
                kind: DiagnosticKind::RedundantVariant,
                message: if verified {
                    "variant 6 contains the ∂y-type element ∂y − y^N e^y ∂x and is equivalent to variant 2 with the same S".into()
                } else {
                    "variant 6 contains a ∂y-type element but the shear onto variant 2 failed to verify".into()
                },
                equivalent: Some(target),
                witness: verified.then_some(chain),
            });
        }
    }
    Ok(out)
}

/// The family `classify(generate(fam))` should return, already in normal form.
pub fn predicted_classification(fam: &CanonicalFamily) -> Result<CanonicalFamily, CatalogError> {
    for d in audit(fam)? {
        if let Some(eq) = d.equivalent {
            return normal_form(&eq);
        }
    }
    normal_form(fam)
}

fn lower_tail(top: usize, bottom: usize) -> Vec<usize> {
    (bottom..top).rev().collect()
}

/// The predicted fingerprint of `generate(fam)`.
pub fn expected_invariants(fam: &CanonicalFamily) -> Result<InvariantFingerprint, CatalogError> {
    if matches!(fam, CanonicalFamily::AbelianRank1) {
        return invalid("AbelianRank1 has no fixed dimension");
    }
    normal_form_invariants(&predicted_classification(fam)?)
}

/// Fingerprint of a family that is already its own predicted classification.
pub(crate) fn normal_form_invariants(fam: &CanonicalFamily) -> Result<InvariantFingerprint, CatalogError> {
    if matches!(fam, CanonicalFamily::AbelianRank1) {
        return invalid("AbelianRank1 has no fixed dimension");
    }
    validate(fam)?;
    let fam = fam.clone();
    let mut fp = InvariantFingerprint {
        is_solvable: true,
        derived_abelian: true,
        rank: 2,
        derived_rank: 1,
        ..InvariantFingerprint::default()
    };
    match &fam {
        CanonicalFamily::AbelianRank2 => {
            fp.dim = 2;
            fp.derived_dims = vec![2, 0];
            fp.lower_central_dims = vec![2, 0];
            fp.is_abelian = true;
            fp.is_nilpotent = true;
            fp.center_dim = 2;
            fp.derived_rank = 0;
            fp.quotient_dim = 2;
        }
        CanonicalFamily::NilpotentNonAbelian { n } => {
            let n = *n as usize;
            fp.dim = n + 2;
            fp.derived_dims = vec![n + 2, n, 0];
            fp.lower_central_dims = vec![n + 2];
            fp.lower_central_dims.extend(lower_tail(n + 1, 0));
            fp.is_nilpotent = true;
            fp.center_dim = 1;
            fp.quotient_dim = 2;
        }
        CanonicalFamily::NonAbelianDerivedFull { k } | CanonicalFamily::NonAbelianDerivedLine { k, .. } => {
            let k = *k as usize;
            let q_dim = if matches!(fam, CanonicalFamily::NonAbelianDerivedFull { .. }) { 2 } else { 1 };
            fp.dim = k + 2 + q_dim;
            fp.derived_dims = vec![fp.dim, k + 2, k, 0];
            fp.lower_central_dims = vec![fp.dim, k + 2];
            fp.derived_rank = 2;
            fp.derived_abelian = false;
            fp.quotient_dim = q_dim;
        }
        CanonicalFamily::Rank2Abelian { subtype, .. } => {
            let q_dim = if *subtype <= 2 { 2 } else { 1 };
            fp.dim = 2 + q_dim;
            fp.derived_dims = vec![fp.dim, 2, 0];
            fp.lower_central_dims = vec![fp.dim, 2];
            fp.derived_rank = 2;
            fp.quotient_dim = q_dim;
        }
        CanonicalFamily::Rank1Solvable { spectrum } => {
            let n = spectrum.len();
            fp.dim = n + 1;
            fp.derived_dims = vec![n + 1, n, 0];
            fp.lower_central_dims = vec![n + 1, n];
            fp.rank = 1;
            fp.quotient_dim = 1;
        }
        CanonicalFamily::SpectralType { variant, s, n } => {
            let h: usize = s.iter().map(|p| p.multiplicity).sum();
            let q_dim = if matches!(variant, 1 | 4) { 1 } else { 2 };
            fp.dim = h + q_dim;
            fp.derived_dims = vec![fp.dim, h, 0];
            fp.lower_central_dims = vec![fp.dim, h];
            if matches!(variant, 3 | 5) {
                let big_n = n.unwrap_or(0) as usize;
                fp.lower_central_dims.extend(lower_tail(h, h - big_n));
                fp.center_dim = 1;
            }
            if *variant == 2 && h == 1 {
                // λ∂y + x∂x (∂y when λ = 0) acts trivially on the one-dimensional ideal
                fp.center_dim = 1;
            }
            fp.quotient_dim = q_dim;
            fp.spectral = Some(SpectralSummary {
                operator: if *variant <= 3 { OperatorKind::Dy } else { OperatorKind::XDxPlusDy },
                spectrum: s.clone(),
            });
        }
        CanonicalFamily::AbelianRank1 => unreachable!("rejected above"),
    }
    Ok(fp)
}
