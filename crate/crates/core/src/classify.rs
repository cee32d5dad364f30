//! Invariant fingerprints and the classification decision tree.
//!
//! `classify` works on any basis of a closed span and never changes
//! coordinates except for trying the swapped presentation when the derived
//! algebra points along ∂y. `canonicalize_triangular` additionally constructs
//! an explicit transform chain onto the normal form for triangular inputs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::algebra::{rank_of_fields, AlgebraError, AlgebraSpan};
use crate::catalog::{
    canonical_rank1_spectrum, generate, normal_form_invariants, normal_form, normalize_scale, CanonicalFamily, SpectralPair,
};
use crate::coeffring::{ExpMonomial, ExpPoly, RingError};
use crate::fields::VectorField;
use crate::linalg::Matrix;
use crate::scalar::GaussianRational;
use crate::spectral::{ad_matrix, decompose_matrix, eigenfunction_form, OperatorKind, SpectralError};
use crate::transform::{pushforward_algebra, solve_antiderivative, PointTransform, TransformChain, TransformError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub operator: OperatorKind,
    pub spectrum: Vec<SpectralPair>,
}

/// Basis-independent data computed from a closed span.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantFingerprint {
    pub dim: usize,
    pub derived_dims: Vec<usize>,
    pub lower_central_dims: Vec<usize>,
    pub is_abelian: bool,
    pub is_nilpotent: bool,
    pub is_solvable: bool,
    pub center_dim: usize,
    pub rank: usize,
    pub derived_rank: usize,
    pub derived_abelian: bool,
    /// `dim g − dim g'`.
    pub quotient_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub family: CanonicalFamily,
    pub fingerprint: InvariantFingerprint,
    /// Chain sending the input span onto the canonical basis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<TransformChain>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonical_basis: Option<Vec<VectorField>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassifyError {
    #[error(transparent)]
    NotClosed(#[from] AlgebraError),
    #[error("algebra is not solvable: derived series dimensions {derived_dims:?} do not reach 0")]
    NotSolvable { derived_dims: Vec<usize> },
    #[error("spectrum is not in Q(i): irreducible factor {factor}")]
    IrrationalSpectrum { factor: String },
    #[error("no canonical form matches: {reason}")]
    UnclassifiableForm {
        reason: String,
        fingerprint: Box<InvariantFingerprint>,
    },
    #[error("field {0} is not triangular")]
    NotTriangular(String),
    #[error("normalization out of scope: {step}")]
    NormalizationOutOfScope { step: String },
    #[error(transparent)]
    Transform(#[from] TransformError),
}

impl ClassifyError {
    /// Process exit status used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            ClassifyError::NotClosed(_) => 2,
            ClassifyError::NotSolvable { .. } => 4,
            ClassifyError::IrrationalSpectrum { .. } => 5,
            ClassifyError::Transform(TransformError::InvalidParameters(_)) => 7,
            _ => 6,
        }
    }
}

impl From<RingError> for ClassifyError {
    fn from(e: RingError) -> Self {
        ClassifyError::Transform(TransformError::Ring(e))
    }
}

impl From<SpectralError> for ClassifyError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::IrrationalSpectrum { factor } => ClassifyError::IrrationalSpectrum { factor },
            other => ClassifyError::NormalizationOutOfScope { step: other.to_string() },
        }
    }
}

fn unclassifiable<T>(reason: impl Into<String>, fp: &InvariantFingerprint) -> Result<T, ClassifyError> {
    Err(ClassifyError::UnclassifiableForm {
        reason: reason.into(),
        fingerprint: Box::new(fp.clone()),
    })
}

fn out_of_scope<T>(step: impl Into<String>) -> Result<T, ClassifyError> {
    Err(ClassifyError::NormalizationOutOfScope { step: step.into() })
}

fn q(n: i64) -> GaussianRational {
    GaussianRational::from_int(n)
}

fn x_mono() -> ExpMonomial {
    ExpMonomial::poly(1, 0)
}

/// Splits `P` as `a·x + H(y)`.
fn p_parts(p: &ExpPoly) -> Option<(GaussianRational, ExpPoly)> {
    let a = p.coeff(&x_mono());
    let h = p.sub(&ExpPoly::term(a.clone(), x_mono()));
    h.is_y_only().then_some((a, h))
}

/// Splits a field as `(a·x + H(y))∂x + b∂y` with constant `b`.
fn affine_parts(v: &VectorField) -> Option<(GaussianRational, ExpPoly, GaussianRational)> {
    let b = v.q.as_constant()?;
    let (a, h) = p_parts(&v.p)?;
    Some((a, h, b))
}

fn conj_poly(f: &ExpPoly) -> ExpPoly {
    ExpPoly::from_terms(
        f.terms()
            .map(|(m, c)| (c.conj(), ExpMonomial::new(m.xdeg, m.ydeg, m.xfreq.conj(), m.yfreq.conj()))),
    )
}

fn conj_field(v: &VectorField) -> VectorField {
    VectorField::new(conj_poly(&v.p), conj_poly(&v.q))
}

/// A basis of real fields when the span is closed under conjugation.
fn real_basis(s: &AlgebraSpan) -> Option<Vec<VectorField>> {
    let half = GaussianRational::ratio(1, 2);
    let minus_half_i = GaussianRational::complex(0, 1, -1, 2);
    let mut cands = Vec::new();
    for v in s.basis() {
        let c = conj_field(v);
        if !s.contains(&c) {
            return None;
        }
        cands.push(v.add(&c).scale(&half));
        cands.push(v.sub(&c).scale(&minus_half_i));
    }
    let mut out: Vec<VectorField> = Vec::new();
    for c in cands {
        if c.is_zero() {
            continue;
        }
        let mut trial = out.clone();
        trial.push(c);
        if AlgebraSpan::span_of(&trial).dim() == trial.len() {
            out = trial;
        }
    }
    Some(out)
}

/// Coordinates of `w` in the span of `fields`, when it lies there.
fn coords_in(fields: &[VectorField], w: &VectorField) -> Option<Vec<GaussianRational>> {
    AlgebraSpan::make_span(fields).ok()?.member(w)
}

/// How the abelian ideal of a rank-two algebra is acted on.
#[derive(Debug, Clone)]
struct SpectralAnalysis {
    kind: OperatorKind,
    /// Some element of `ker Π` acts with a nonzero `x∂x` part.
    tie_break: bool,
    /// Exponents of the eigenfunctions in the coordinates reached by the
    /// scalings below, with multiplicities.
    exponents: Vec<SpectralPair>,
    null_multiplicity: u32,
}

fn analyze_spectral_presentation(g: &AlgebraSpan, gp: &AlgebraSpan) -> Result<Option<SpectralAnalysis>, ClassifyError> {
    let along_x = |v: &VectorField| v.q.is_zero() && v.p.is_y_only();
    if !gp.basis().iter().all(along_x) {
        return Ok(None);
    }
    let mut parts = Vec::with_capacity(g.dim());
    for v in g.basis() {
        match affine_parts(v) {
            Some(p) => parts.push(p),
            None => return Ok(None),
        }
    }
    let Some(xi) = parts.iter().position(|(_, _, b)| !b.is_zero()) else {
        return Ok(None);
    };
    let (a_x, _, b_x) = parts[xi].clone();
    let mut x = g.basis()[xi].clone();
    let mut a_cur = a_x.clone();
    let mut tie_break = false;
    for (j, (a_j, _, b_j)) in parts.iter().enumerate() {
        if j == xi {
            continue;
        }
        let ratio = b_j / &b_x;
        let a_z = a_j - &(&ratio * &a_x);
        if !a_z.is_zero() {
            let z = g.basis()[j].sub(&g.basis()[xi].scale(&ratio));
            x = x.sub(&z.scale(&(&a_cur / &a_z)));
            a_cur = q(0);
            tie_break = true;
            break;
        }
    }
    let (kind, x_norm, target) = if a_cur.is_zero() {
        let b_inv = b_x.inv().expect("nonzero");
        (OperatorKind::Dy, x.scale(&b_inv), gp.clone())
    } else {
        // ỹ = (a/b) y turns X/a into x∂x + ∂ỹ plus ∂x terms
        let t = TransformChain::from(PointTransform::scale_y(&a_cur / &b_x));
        let xa = x.scale(&a_cur.inv().expect("nonzero"));
        let xt = t.pushforward(&xa)?;
        let tt = pushforward_algebra(&t, gp)?;
        (OperatorKind::XDxPlusDy, xt, tt)
    };
    let ad = ad_matrix(&x_norm, &target)?;
    let data = decompose_matrix(&ad.m)?;
    let Ok(forms) = eigenfunction_form(&data, &target, kind) else {
        return Ok(None);
    };
    let shift = if kind == OperatorKind::Dy { q(0) } else { q(1) };
    let mut exponents: Vec<SpectralPair> = forms.into_iter().map(|(l, m)| SpectralPair::new(&l + &shift, m)).collect();
    exponents.sort();
    let null_multiplicity = exponents.iter().find(|p| p.lambda == shift).map_or(0, |p| p.multiplicity as u32);
    Ok(Some(SpectralAnalysis {
        kind,
        tie_break,
        exponents,
        null_multiplicity,
    }))
}

/// Runs the spectral analysis on the given presentation or on its swap.
fn analyze_spectral(g: &AlgebraSpan, gp: &AlgebraSpan) -> Result<Option<SpectralAnalysis>, ClassifyError> {
    if let Some(a) = analyze_spectral_presentation(g, gp)? {
        return Ok(Some(a));
    }
    let sw = TransformChain::from(PointTransform::Swap);
    analyze_spectral_presentation(&pushforward_algebra(&sw, g)?, &pushforward_algebra(&sw, gp)?)
}

fn summary_of(a: &SpectralAnalysis) -> SpectralSummary {
    SpectralSummary {
        operator: a.kind,
        spectrum: if a.kind == OperatorKind::Dy {
            normalize_scale(&a.exponents)
        } else {
            a.exponents.clone()
        },
    }
}

fn fingerprint_inner(g: &AlgebraSpan) -> Result<(InvariantFingerprint, AlgebraSpan, Option<SpectralAnalysis>), ClassifyError> {
    g.verify_closure()?;
    let derived = g.derived_series();
    let derived_dims: Vec<usize> = derived.iter().map(AlgebraSpan::dim).collect();
    let is_solvable = derived_dims.last() == Some(&0);
    let gp = derived.get(1).cloned().unwrap_or_else(AlgebraSpan::zero);
    let lower_central_dims = g.lower_central_dims();
    let mut fp = InvariantFingerprint {
        dim: g.dim(),
        is_abelian: gp.dim() == 0,
        is_nilpotent: lower_central_dims.last() == Some(&0),
        lower_central_dims,
        is_solvable,
        center_dim: g.center()?.dim(),
        rank: g.rank(),
        derived_rank: rank_of_fields(gp.basis()),
        derived_abelian: gp.is_abelian(),
        quotient_dim: g.dim() - gp.dim(),
        derived_dims,
        spectral: None,
    };
    let mut analysis = None;
    if is_solvable && !fp.is_nilpotent && fp.rank == 2 && fp.derived_abelian && fp.derived_rank == 1 {
        analysis = analyze_spectral(g, &gp)?;
        fp.spectral = analysis.as_ref().map(summary_of);
    }
    Ok((fp, gp, analysis))
}

/// The invariant fingerprint of a closed span. The spectral summary is only
/// filled for solvable, non-nilpotent rank-two algebras whose derived algebra
/// is abelian of rank one.
pub fn fingerprint(g: &AlgebraSpan) -> Result<InvariantFingerprint, ClassifyError> {
    fingerprint_inner(g).map(|(fp, _, _)| fp)
}

fn first_outside(g: &AlgebraSpan, sub: &AlgebraSpan) -> VectorField {
    g.basis().iter().find(|v| !sub.contains(v)).cloned().expect("proper subspace")
}

/// Eigenvalue of `ad x` on the vector `e`, relative to the subspace `modulo`.
fn relative_eigenvalue(x: &VectorField, e: &VectorField, modulo: &[VectorField]) -> Option<GaussianRational> {
    let mut fields = modulo.to_vec();
    fields.push(e.clone());
    let c = coords_in(&fields, &x.bracket(e))?;
    c.last().cloned()
}

/// Centralizer of `sub` inside the closed span `within`.
fn centralizer(sub: &AlgebraSpan, within: &AlgebraSpan) -> Result<AlgebraSpan, ClassifyError> {
    let sc = within.verify_closure()?.clone();
    let n = within.dim();
    let sub_coords: Vec<Vec<GaussianRational>> = sub.basis().iter().map(|h| within.member(h).expect("subspace")).collect();
    let mut rows = Vec::new();
    for h in &sub_coords {
        for k in 0..n {
            rows.push(
                (0..n)
                    .map(|i| {
                        let mut s = q(0);
                        for (l, hl) in h.iter().enumerate() {
                            s += &(hl * sc.get(i, l, k));
                        }
                        s
                    })
                    .collect(),
            );
        }
    }
    if rows.is_empty() {
        return Ok(within.clone());
    }
    let kernel = Matrix::from_rows(rows).kernel();
    Ok(AlgebraSpan::span_of(&kernel.iter().map(|a| within.combine(a)).collect::<Vec<_>>()))
}

fn classify_line(g: &AlgebraSpan, gp: &AlgebraSpan, fp: &InvariantFingerprint) -> Result<CanonicalFamily, ClassifyError> {
    let k = gp.dim() as i64 - 2;
    if k < 1 {
        return unclassifiable("derived algebra too small for the line family", fp);
    }
    let x = first_outside(g, gp);
    let z = gp.center()?;
    if z.dim() != 1 {
        return unclassifiable(format!("center of the derived algebra has dimension {}", z.dim()), fp);
    }
    let zf = z.basis()[0].clone();
    let Some(c_z) = relative_eigenvalue(&x, &zf, &[]) else {
        return unclassifiable("ad X does not preserve the center of the derived algebra", fp);
    };
    let a = if k >= 2 {
        let a_span = centralizer(&gp.derived(), gp)?;
        if a_span.dim() + 1 != gp.dim() {
            return unclassifiable("centralizer of the second derived algebra has the wrong codimension", fp);
        }
        let e = first_outside(gp, &a_span);
        match relative_eigenvalue(&x, &e, a_span.basis()) {
            Some(mu) if !mu.is_zero() => &c_z / &mu,
            _ => return unclassifiable("ad X acts trivially modulo the centralizer", fp),
        }
    } else {
        let m = ad_matrix(&x, gp)?.m;
        let data = decompose_matrix(&m)?;
        let mut eig: Vec<GaussianRational> =
            data.blocks.iter().flat_map(|b| std::iter::repeat_n(b.eigenvalue.clone(), b.multiplicity)).collect();
        let Some(pos) = eig.iter().position(|e| *e == c_z) else {
            return unclassifiable("central eigenvalue missing from the spectrum", fp);
        };
        eig.remove(pos);
        match eig.iter().find(|e| !e.is_zero()) {
            Some(mu) => &c_z / mu,
            None => return unclassifiable("ad X is nilpotent on the Heisenberg ideal", fp),
        }
    };
    Ok(CanonicalFamily::NonAbelianDerivedLine { k: k as u32, a })
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let sq = |n: &BigInt| {
        let s = n.sqrt();
        (&s * &s == *n).then_some(s)
    };
    Some(BigRational::new(sq(r.numer())?, sq(r.denom())?))
}

fn disc(m: &Matrix) -> GaussianRational {
    let tr = m.trace();
    let det = &(&m[(0, 0)] * &m[(1, 1)]) - &(&m[(0, 1)] * &m[(1, 0)]);
    &(&tr * &tr) - &(&q(4) * &det)
}

fn is_scalar(m: &Matrix) -> bool {
    m[(0, 1)].is_zero() && m[(1, 0)].is_zero() && m[(0, 0)] == m[(1, 1)]
}

fn traceless(m: &Matrix) -> Matrix {
    m.sub_scalar(&(&m.trace() * &GaussianRational::ratio(1, 2)))
}

fn classify_rank2_abelian(g: &AlgebraSpan, gp: &AlgebraSpan, fp: &InvariantFingerprint) -> Result<CanonicalFamily, ClassifyError> {
    // Over the reals types 2 and 4 are distinct from 1 and 3, so a real
    // presentation is analysed with real bases.
    let (gp_basis, g_basis) = match (real_basis(gp), real_basis(g)) {
        (Some(a), Some(b)) => (a, b),
        _ => (gp.basis().to_vec(), g.basis().to_vec()),
    };
    let real = real_basis(g).is_some();
    let gp_real = AlgebraSpan::make_span(&gp_basis)?;
    let mut complements: Vec<VectorField> = Vec::new();
    for v in &g_basis {
        let mut trial = gp_basis.clone();
        trial.extend(complements.iter().cloned());
        trial.push(v.clone());
        if AlgebraSpan::span_of(&trial).dim() == trial.len() {
            complements.push(v.clone());
        }
    }
    let mats = complements
        .iter()
        .map(|y| ad_matrix(y, &gp_real).map(|a| a.m))
        .collect::<Result<Vec<_>, _>>()?;
    match mats.len() {
        2 => {
            let Some(n) = mats.iter().map(traceless).find(|m| !m.is_zero()) else {
                return unclassifiable("the quotient acts by scalars only", fp);
            };
            let d = disc(&n);
            if d.is_zero() {
                return unclassifiable("the quotient acts through a nilpotent Jordan block", fp);
            }
            let subtype = if real && d.is_real() && d.re().is_negative() { 2 } else { 1 };
            Ok(CanonicalFamily::Rank2Abelian { subtype, lambda: None })
        }
        1 => {
            let m = &mats[0];
            if is_scalar(m) {
                return Ok(CanonicalFamily::Rank2Abelian { subtype: 3, lambda: Some(q(1)) });
            }
            let d = disc(m);
            if d.is_zero() {
                return unclassifiable("ad X on the translations is a nontrivial Jordan block", fp);
            }
            let all_real = (0..2).all(|i| (0..2).all(|j| m[(i, j)].is_real()));
            if real && all_real && d.re().is_negative() {
                let tr = m.trace();
                let det = &(&m[(0, 0)] * &m[(1, 1)]) - &(&m[(0, 1)] * &m[(1, 0)]);
                let l2 = &(&tr * &tr) / &(&(&q(4) * &det) - &(&tr * &tr));
                return match rational_sqrt(l2.re()) {
                    Some(l) => Ok(CanonicalFamily::Rank2Abelian {
                        subtype: 4,
                        lambda: Some(GaussianRational::from_rational(l)),
                    }),
                    None => Err(ClassifyError::IrrationalSpectrum { factor: format!("t^2 - {l2}") }),
                };
            }
            let data = decompose_matrix(m)?;
            let e: Vec<_> = data.blocks.iter().map(|b| b.eigenvalue.clone()).collect();
            if e.len() != 2 || e[0].is_zero() || e[1].is_zero() {
                return unclassifiable("ad X is singular on the translations", fp);
            }
            Ok(CanonicalFamily::Rank2Abelian {
                subtype: 3,
                lambda: Some(&e[1] / &e[0]),
            })
        }
        _ => unclassifiable("quotient by the derived algebra has dimension other than 1 or 2", fp),
    }
}

fn classify_rank1(g: &AlgebraSpan, gp: &AlgebraSpan, fp: &InvariantFingerprint) -> Result<CanonicalFamily, ClassifyError> {
    let try_funcs = |gp: &AlgebraSpan| -> Option<Vec<ExpPoly>> {
        gp.basis().iter().map(|v| (v.q.is_zero() && v.p.is_y_only()).then(|| v.p.clone())).collect()
    };
    let funcs = match try_funcs(gp) {
        Some(f) => f,
        None => {
            let sw = TransformChain::from(PointTransform::Swap);
            match try_funcs(&pushforward_algebra(&sw, gp)?) {
                Some(f) => f,
                None => return unclassifiable("derived algebra is not of the form φ(y)∂x", fp),
            }
        }
    };
    let _ = g;
    match canonical_rank1_spectrum(&funcs) {
        Some(spectrum) => Ok(CanonicalFamily::Rank1Solvable { spectrum }),
        None => unclassifiable("derived algebra contains no unit e^{μy}∂x", fp),
    }
}

fn decide(g: &AlgebraSpan) -> Result<(CanonicalFamily, InvariantFingerprint), ClassifyError> {
    let (fp, gp, analysis) = fingerprint_inner(g)?;
    if !fp.is_solvable {
        return Err(ClassifyError::NotSolvable {
            derived_dims: fp.derived_dims,
        });
    }
    let fam = if fp.is_abelian {
        match (fp.rank, fp.dim) {
            (2, 2) => CanonicalFamily::AbelianRank2,
            (1, _) => return Ok((CanonicalFamily::AbelianRank1, fp)),
            _ => return unclassifiable("abelian algebra of rank 2 with more than two generators", &fp),
        }
    } else if fp.is_nilpotent {
        if fp.dim < 3 {
            return unclassifiable("nilpotent algebra too small", &fp);
        }
        CanonicalFamily::NilpotentNonAbelian { n: fp.dim as u32 - 2 }
    } else if !fp.derived_abelian {
        match fp.quotient_dim {
            2 if gp.dim() >= 3 => CanonicalFamily::NonAbelianDerivedFull { k: gp.dim() as u32 - 2 },
            1 => classify_line(g, &gp, &fp)?,
            _ => return unclassifiable("non-abelian derived algebra with unexpected quotient", &fp),
        }
    } else if fp.derived_rank == 2 {
        classify_rank2_abelian(g, &gp, &fp)?
    } else if fp.rank == 1 {
        classify_rank1(g, &gp, &fp)?
    } else {
        let Some(a) = analysis else {
            return unclassifiable("no presentation with the derived algebra along ∂x and a distinguished operator", &fp);
        };
        let variant = match (fp.quotient_dim, a.kind, a.tie_break) {
            (1, OperatorKind::Dy, _) => 1,
            (1, OperatorKind::XDxPlusDy, _) => 4,
            (2, OperatorKind::Dy, true) => 2,
            (2, OperatorKind::Dy, false) => 3,
            (2, OperatorKind::XDxPlusDy, _) => 5,
            _ => return unclassifiable("quotient by the derived algebra is too large", &fp),
        };
        CanonicalFamily::SpectralType {
            variant,
            s: a.exponents,
            n: matches!(variant, 3 | 5).then_some(a.null_multiplicity),
        }
    };
    let fam = match normal_form(&fam) {
        Ok(f) => f,
        Err(e) => return unclassifiable(format!("{} parameters rejected: {e}", fam.name()), &fp),
    };
    match normal_form_invariants(&fam) {
        Ok(want) if want == fp => Ok((fam, fp)),
        Ok(_) => unclassifiable(format!("invariants differ from those of {}", fam.name()), &fp),
        Err(e) => unclassifiable(e.to_string(), &fp),
    }
}

/// Classifies a closed span into one normal-form family.
pub fn classify(g: &AlgebraSpan) -> Result<ClassificationRecord, ClassifyError> {
    let (family, fingerprint) = decide(g)?;
    let canonical_basis = generate(&family).ok().map(|c| c.basis().to_vec());
    Ok(ClassificationRecord {
        family,
        fingerprint,
        witness: None,
        canonical_basis,
    })
}

struct Normalizer {
    chain: TransformChain,
    cur: AlgebraSpan,
}

impl Normalizer {
    fn apply(&mut self, t: PointTransform) -> Result<(), ClassifyError> {
        let identity = match &t {
            PointTransform::ShearX { alpha, f } => alpha.is_one() && f.is_zero(),
            PointTransform::AffineY { beta, c } => beta.is_one() && c.is_zero(),
            PointTransform::Swap => false,
        };
        if identity {
            return Ok(());
        }
        self.cur = pushforward_algebra(&TransformChain::from(t.clone()), &self.cur)?;
        self.chain = std::mem::take(&mut self.chain).then(t);
        Ok(())
    }

    fn push(&self, v: &VectorField, since: usize) -> Result<VectorField, ClassifyError> {
        Ok(TransformChain(self.chain.0[since..].to_vec()).pushforward(v)?)
    }
}

fn affine_eta(eta: &ExpPoly) -> Option<(GaussianRational, GaussianRational)> {
    let ok = eta
        .terms()
        .all(|(m, _)| m.xdeg == 0 && m.xfreq.is_zero() && m.yfreq.is_zero() && m.ydeg <= 1);
    ok.then(|| (eta.coeff(&ExpMonomial::one()), eta.coeff(&ExpMonomial::poly(0, 1))))
}

fn normalize_constant_projection(n: &mut Normalizer) -> Result<(), ClassifyError> {
    let g = n.cur.clone();
    let parts: Vec<_> = g.basis().iter().map(affine_parts).collect::<Option<Vec<_>>>().map_or_else(
        || out_of_scope("an element is not of the form (a x + H(y))∂x + b∂y"),
        Ok,
    )?;
    let xi = parts.iter().position(|(_, _, b)| !b.is_zero()).expect("projection is nonzero");
    let (a_x, _, b_x) = parts[xi].clone();
    let mut x = g.basis()[xi].clone();
    let mut z_elem = None;
    for (j, (a_j, _, b_j)) in parts.iter().enumerate() {
        let ratio = b_j / &b_x;
        let a_z = a_j - &(&ratio * &a_x);
        if j != xi && !a_z.is_zero() {
            let z = g.basis()[j].sub(&g.basis()[xi].scale(&ratio));
            x = x.sub(&z.scale(&(&a_x / &a_z)));
            z_elem = Some(z);
            break;
        }
    }
    let (a, _, b) = affine_parts(&x).expect("combination keeps the form");
    let start = n.chain.0.len();
    if a.is_zero() {
        if !b.is_one() {
            n.apply(PointTransform::scale_y(b.inv().expect("nonzero")))?;
        }
        let xt = n.push(&x, start)?;
        let k = solve_antiderivative(&xt.p)?.neg();
        n.apply(PointTransform::shear(k))?;
        if let Some(z) = z_elem {
            let zt = n.push(&z, start)?;
            let (lam, gz) = p_parts(&zt.p).expect("shears keep the form");
            n.apply(PointTransform::shear(gz.scale(&lam.inv().expect("nonzero"))))?;
        }
    } else {
        let beta = &a / &b;
        if !beta.is_one() {
            n.apply(PointTransform::scale_y(beta))?;
        }
        let xt = n.push(&x, start)?.scale(&a.inv().expect("nonzero"));
        let (_, h) = p_parts(&xt.p).expect("scaling keeps the form");
        // x̃ = x + K with K' − K = −h, solved by K = e^y F and F' = −e^{−y} h
        let e_minus = ExpMonomial::new(0, 0, q(0), q(-1));
        let f = solve_antiderivative(&h.mul_monomial(&e_minus).neg())?;
        let k = f.mul_monomial(&ExpMonomial::new(0, 0, q(0), q(1)));
        n.apply(PointTransform::shear(k))?;
    }
    Ok(())
}

fn normalize_affine_projection(n: &mut Normalizer) -> Result<(), ClassifyError> {
    let g = n.cur.clone();
    let etas: Vec<(GaussianRational, GaussianRational)> =
        g.basis().iter().map(|v| affine_eta(&v.q).expect("checked")).collect();
    let rows = vec![
        etas.iter().map(|e| e.0.clone()).collect::<Vec<_>>(),
        etas.iter().map(|e| e.1.clone()).collect::<Vec<_>>(),
    ];
    let kernel = Matrix::from_rows(rows).kernel();
    let z = kernel
        .iter()
        .map(|c| g.combine(c))
        .find_map(|v| p_parts(&v.p).filter(|(a, _)| !a.is_zero()).map(|(a, _)| (v, a)));
    let ei = etas.iter().position(|e| !e.1.is_zero()).expect("projection has rank two");
    let mut e = g.basis()[ei].scale(&etas[ei].1.inv().expect("nonzero"));
    if let Some((zv, a_z)) = &z {
        let Some((a_e, _)) = p_parts(&e.p) else {
            return out_of_scope("∂x-component is not affine in x");
        };
        e = e.sub(&zv.scale(&(&a_e / a_z)));
    }
    let c0 = affine_eta(&e.q).expect("checked").0;
    let start = n.chain.0.len();
    if !c0.is_zero() {
        n.apply(PointTransform::AffineY { beta: q(1), c: c0 })?;
    }
    let et = n.push(&e, start)?;
    let Some((a, h)) = p_parts(&et.p) else {
        return out_of_scope("∂x-component is not affine in x");
    };
    let mut k = ExpPoly::zero();
    for (m, c) in h.terms() {
        if !m.yfreq.is_zero() {
            return out_of_scope("y∂y-type element carries exponential terms");
        }
        let j = q(m.ydeg as i64);
        if j == a {
            if !n.cur.contains(&VectorField::along_x(ExpPoly::y_pow(m.ydeg))) {
                return out_of_scope(format!("resonant term y^{}∂x cannot be removed", m.ydeg));
            }
            continue;
        }
        k = k.add(&ExpPoly::term(c / &(&a - &j), m.clone()));
    }
    if !k.is_zero() {
        n.apply(PointTransform::shear(k))?;
    }
    Ok(())
}

fn normalize_linear_part(n: &mut Normalizer) -> Result<(), ClassifyError> {
    let x = n
        .cur
        .basis()
        .iter()
        .find_map(|v| p_parts(&v.p).filter(|(a, _)| !a.is_zero()))
        .map_or_else(|| out_of_scope("no element with a nonzero x∂x part"), Ok)?;
    let (a, h) = x;
    if !h.is_zero() {
        n.apply(PointTransform::shear(h.scale(&a.inv().expect("nonzero"))))?;
    }
    Ok(())
}

/// Rescales y so the exponents of a ∂y-type spectral algebra match the normal form.
fn fix_spectral_scale(n: &mut Normalizer, target: &[SpectralPair]) -> Result<bool, ClassifyError> {
    let gp = n.cur.derived();
    let Some(a) = analyze_spectral_presentation(&n.cur, &gp)? else {
        return Ok(false);
    };
    for p in &a.exponents {
        let Some(c) = p.lambda.inv() else { continue };
        let mut scaled: Vec<SpectralPair> =
            a.exponents.iter().map(|e| SpectralPair::new(&e.lambda * &c, e.multiplicity)).collect();
        scaled.sort();
        if scaled == target {
            n.apply(PointTransform::scale_y(p.lambda.clone()))?;
            return Ok(true);
        }
    }
    Ok(false)
}

/// Classifies a triangular algebra and builds a transform chain onto its normal form.
pub fn canonicalize_triangular(g: &AlgebraSpan) -> Result<ClassificationRecord, ClassifyError> {
    let record = classify(g)?;
    if let Some(v) = g.basis().iter().find(|v| !v.is_triangular()) {
        return Err(ClassifyError::NotTriangular(v.to_string()));
    }
    let Ok(canonical) = generate(&record.family) else {
        return out_of_scope(format!("{} has no canonical basis", record.family.name()));
    };
    let mut etas = Vec::new();
    for v in g.basis() {
        if affine_eta(&v.q).is_none() {
            return out_of_scope(format!("projection {} is not affine in y", v.q));
        }
        etas.push(VectorField::along_y(v.q.clone()));
    }
    let pi = AlgebraSpan::span_of(&etas);
    let mut n = Normalizer {
        chain: TransformChain::identity(),
        cur: g.clone(),
    };
    match pi.dim() {
        0 => normalize_linear_part(&mut n)?,
        1 => {
            if pi.basis().iter().any(|e| !affine_eta(&e.q).expect("checked").1.is_zero()) {
                return out_of_scope("projection spanned by a non-constant field needs a non-affine change of y");
            }
            normalize_constant_projection(&mut n)?;
        }
        _ => normalize_affine_projection(&mut n)?,
    }
    let matches = |n: &Normalizer| n.cur.same_span(&canonical);
    if !matches(&n) {
        if let CanonicalFamily::SpectralType { variant: 1..=3, s, .. } = &record.family {
            fix_spectral_scale(&mut n, s)?;
        }
    }
    if !matches(&n) {
        let mut swapped = Normalizer {
            chain: n.chain.clone(),
            cur: n.cur.clone(),
        };
        swapped.apply(PointTransform::Swap)?;
        if matches(&swapped) {
            n = swapped;
        }
    }
    if !matches(&n) {
        return out_of_scope("normalized algebra differs from the canonical form");
    }
    debug_assert!(pushforward_algebra(&n.chain, g).is_ok_and(|p| p.same_span(&canonical)));
    Ok(ClassificationRecord {
        witness: Some(n.chain),
        ..record
    })
}
