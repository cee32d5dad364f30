//! Finite-dimensional spans of vector fields and their structural invariants.
//!
//! Fields are flattened into exact coordinate vectors indexed by
//! `(component, monomial)`. Every membership test and series computation
//! reduces to exact Gaussian elimination over Q(i), so nothing in this module
//! uses a numeric tolerance.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use crate::coeffring::ExpMonomial;
use crate::fields::VectorField;
use crate::linalg::Matrix;
use crate::scalar::GaussianRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("span is empty: every input field is zero")]
    EmptySpan,
    #[error("not closed: [e{}, e{}] = {witness} is outside the span", .i + 1, .j + 1)]
    NotClosed { i: usize, j: usize, witness: VectorField },
}

/// Flattening coordinate: component (0 = ∂x, 1 = ∂y) and monomial.
pub type CoordKey = (u8, ExpMonomial);

fn flatten(v: &VectorField) -> impl Iterator<Item = (CoordKey, &GaussianRational)> {
    v.p.terms()
        .map(|(m, c)| ((0u8, m.clone()), c))
        .chain(v.q.terms().map(|(m, c)| ((1u8, m.clone()), c)))
}

/// Exact structure constants: `[e_i, e_j] = Σ_k c[i][j][k] e_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureConstants {
    c: Vec<Vec<Vec<GaussianRational>>>,
}

impl StructureConstants {
    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &GaussianRational {
        &self.c[i][j][k]
    }

    /// Coordinates of `[e_i, e_j]`.
    pub fn bracket_coords(&self, i: usize, j: usize) -> &[GaussianRational] {
        &self.c[i][j]
    }

    /// Bracket of two coordinate vectors.
    pub fn bracket(&self, a: &[GaussianRational], b: &[GaussianRational]) -> Vec<GaussianRational> {
        let n = self.dim();
        let mut out = vec![GaussianRational::zero(); n];
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[j].is_zero() || i == j {
                    continue;
                }
                let s = &a[i] * &b[j];
                for (o, c) in out.iter_mut().zip(&self.c[i][j]) {
                    if !c.is_zero() {
                        *o += &(&s * c);
                    }
                }
            }
        }
        out
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| self.c[i][j][k] == -&self.c[j][i][k])))
    }

    pub fn satisfies_jacobi(&self) -> bool {
        let n = self.dim();
        let unit = |i: usize| {
            let mut v = vec![GaussianRational::zero(); n];
            v[i] = GaussianRational::one();
            v
        };
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let (a, b, c) = (unit(i), unit(j), unit(k));
                    let t1 = self.bracket(&a, &self.bracket(&b, &c));
                    let t2 = self.bracket(&b, &self.bracket(&c, &a));
                    let t3 = self.bracket(&c, &self.bracket(&a, &b));
                    if t1.iter().zip(&t2).zip(&t3).any(|((x, y), z)| !(&(x + y) + z).is_zero()) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn as_nested(&self) -> &Vec<Vec<Vec<GaussianRational>>> {
        &self.c
    }
}

/// A linearly independent list of vector fields.
#[derive(Clone)]
pub struct AlgebraSpan {
    basis: Vec<VectorField>,
    keys: Vec<CoordKey>,
    /// Reduced row echelon form of the flattened basis.
    reduced: Matrix,
    pivots: Vec<usize>,
    /// `transform * flattened_basis = reduced`.
    transform: Matrix,
    closure: OnceLock<Result<StructureConstants, AlgebraError>>,
}

impl PartialEq for AlgebraSpan {
    fn eq(&self, o: &Self) -> bool {
        self.basis == o.basis
    }
}

impl Eq for AlgebraSpan {}

impl fmt::Debug for AlgebraSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("⟨")?;
        for (k, v) in self.basis.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("⟩")
    }
}

impl AlgebraSpan {
    /// Maximal linearly independent subset of `fields`, greedy in input order.
    pub fn make_span(fields: &[VectorField]) -> Result<Self, AlgebraError> {
        let s = Self::span_of(fields);
        if s.dim() == 0 {
            Err(AlgebraError::EmptySpan)
        } else {
            Ok(s)
        }
    }

    /// Like [`make_span`](Self::make_span) but allows the zero space.
    pub fn span_of(fields: &[VectorField]) -> Self {
        let mut keys: BTreeMap<CoordKey, usize> = BTreeMap::new();
        for v in fields {
            for (k, _) in flatten(v) {
                let n = keys.len();
                keys.entry(k).or_insert(n);
            }
        }
        // column order follows the sorted key order
        let sorted: Vec<CoordKey> = keys.keys().cloned().collect();
        let index: BTreeMap<&CoordKey, usize> = sorted.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let m = sorted.len();

        let mut chosen: Vec<VectorField> = Vec::new();
        let mut rows: Vec<Vec<GaussianRational>> = Vec::new();
        // incremental echelon: (pivot column, row normalized to 1 at the pivot)
        let mut echelon: Vec<(usize, Vec<GaussianRational>)> = Vec::new();
        for v in fields {
            let mut row = vec![GaussianRational::zero(); m];
            for (k, c) in flatten(v) {
                row[index[&k]] = c.clone();
            }
            let mut red = row.clone();
            for (p, e) in &echelon {
                if red[*p].is_zero() {
                    continue;
                }
                let f = red[*p].clone();
                for (x, y) in red.iter_mut().zip(e) {
                    if !y.is_zero() {
                        *x -= &(&f * y);
                    }
                }
            }
            let Some(p) = red.iter().position(|c| !c.is_zero()) else {
                continue;
            };
            let inv = red[p].inv().unwrap();
            for x in red.iter_mut() {
                *x = &*x * &inv;
            }
            echelon.push((p, red));
            rows.push(row);
            chosen.push(v.clone());
        }
        Self::from_independent(chosen, sorted, rows)
    }

    fn from_independent(
        basis: Vec<VectorField>,
        keys: Vec<CoordKey>,
        rows: Vec<Vec<GaussianRational>>,
    ) -> Self {
        let k = basis.len();
        let m = keys.len();
        // [B | I] -> [R | T]
        let mut aug = Matrix::zeros(k, m + k);
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                aug[(i, j)] = v.clone();
            }
            aug[(i, m + i)] = GaussianRational::one();
        }
        let all_pivots = aug.rref_in_place();
        let pivots: Vec<usize> = all_pivots.into_iter().filter(|&c| c < m).collect();
        debug_assert_eq!(pivots.len(), k);
        let mut reduced = Matrix::zeros(k, m);
        let mut transform = Matrix::zeros(k, k);
        for i in 0..k {
            for j in 0..m {
                reduced[(i, j)] = aug[(i, j)].clone();
            }
            for j in 0..k {
                transform[(i, j)] = aug[(i, m + j)].clone();
            }
        }
        Self {
            basis,
            keys,
            reduced,
            pivots,
            transform,
            closure: OnceLock::new(),
        }
    }

    pub fn zero() -> Self {
        Self::span_of(&[])
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[VectorField] {
        &self.basis
    }

    /// The flattening coordinates, sorted.
    pub fn coordinate_map(&self) -> &[CoordKey] {
        &self.keys
    }

    /// Exact coordinates of `v` in the basis, or `None` if `v` is outside the span.
    pub fn member(&self, v: &VectorField) -> Option<Vec<GaussianRational>> {
        let k = self.dim();
        if v.is_zero() {
            return Some(vec![GaussianRational::zero(); k]);
        }
        let mut vec = vec![GaussianRational::zero(); self.keys.len()];
        for (key, c) in flatten(v) {
            let j = self.keys.binary_search(&key).ok()?;
            vec[j] = c.clone();
        }
        let r: Vec<GaussianRational> = self.pivots.iter().map(|&p| vec[p].clone()).collect();
        // residual must vanish
        for (i, ri) in r.iter().enumerate() {
            if ri.is_zero() {
                continue;
            }
            for (j, x) in vec.iter_mut().enumerate() {
                let a = &self.reduced[(i, j)];
                if !a.is_zero() {
                    *x -= &(ri * a);
                }
            }
        }
        if !vec.iter().all(GaussianRational::is_zero) {
            return None;
        }
        let mut coords = vec![GaussianRational::zero(); k];
        for (i, ri) in r.iter().enumerate() {
            if ri.is_zero() {
                continue;
            }
            for (j, c) in coords.iter_mut().enumerate() {
                let t = &self.transform[(i, j)];
                if !t.is_zero() {
                    *c += &(ri * t);
                }
            }
        }
        Some(coords)
    }

    pub fn contains(&self, v: &VectorField) -> bool {
        self.member(v).is_some()
    }

    /// Linear combination of the basis.
    pub fn combine(&self, coords: &[GaussianRational]) -> VectorField {
        assert_eq!(coords.len(), self.dim());
        let mut acc = VectorField::zero();
        for (c, e) in coords.iter().zip(&self.basis) {
            if !c.is_zero() {
                acc = acc.add(&e.scale(c));
            }
        }
        acc
    }

    pub fn contains_span(&self, other: &AlgebraSpan) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    /// Equality as subspaces, independent of basis.
    pub fn same_span(&self, other: &AlgebraSpan) -> bool {
        self.dim() == other.dim() && self.contains_span(other)
    }

    /// Checks every pairwise bracket lies in the span and returns the
    /// structure constants. The result is cached.
    pub fn verify_closure(&self) -> Result<&StructureConstants, AlgebraError> {
        self.closure
            .get_or_init(|| self.compute_structure_constants())
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn is_closed(&self) -> bool {
        self.verify_closure().is_ok()
    }

    fn compute_structure_constants(&self) -> Result<StructureConstants, AlgebraError> {
        let n = self.dim();
        let mut c = vec![vec![vec![GaussianRational::zero(); n]; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let b = self.basis[i].bracket(&self.basis[j]);
                let coords = self.member(&b).ok_or(AlgebraError::NotClosed { i, j, witness: b })?;
                c[j][i] = coords.iter().map(|x| -x).collect();
                c[i][j] = coords;
            }
        }
        Ok(StructureConstants { c })
    }

    /// Span of `[a, b]` over basis elements of `self` and `other`.
    pub fn bracket_span(&self, other: &AlgebraSpan) -> AlgebraSpan {
        let mut out = Vec::new();
        for a in &self.basis {
            for b in &other.basis {
                let v = a.bracket(b);
                if !v.is_zero() {
                    out.push(v);
                }
            }
        }
        AlgebraSpan::span_of(&out)
    }

    /// `[g, g]`.
    pub fn derived(&self) -> AlgebraSpan {
        let mut out = Vec::new();
        for i in 0..self.dim() {
            for j in (i + 1)..self.dim() {
                let v = self.basis[i].bracket(&self.basis[j]);
                if !v.is_zero() {
                    out.push(v);
                }
            }
        }
        AlgebraSpan::span_of(&out)
    }

    /// `g, g', g'', …` stopping at zero or when the dimension repeats.
    pub fn derived_series(&self) -> Vec<AlgebraSpan> {
        match self.verify_closure() {
            Ok(sc) => self.series_in_coordinates(sc, false),
            Err(_) => iterate_series(self.clone(), |s| s.derived()),
        }
    }

    /// `g, [g,g], [g,[g,g]], …` stopping at zero or when the dimension repeats.
    pub fn lower_central_series(&self) -> Vec<AlgebraSpan> {
        match self.verify_closure() {
            Ok(sc) => self.series_in_coordinates(sc, true),
            Err(_) => iterate_series(self.clone(), |s| self.bracket_span(s)),
        }
    }

    /// Dimensions along the lower central series, without building the terms.
    pub fn lower_central_dims(&self) -> Vec<usize> {
        match self.verify_closure() {
            Ok(sc) => series_coordinates(sc, self.dim(), true).iter().map(Vec::len).collect(),
            Err(_) => self.lower_central_series().iter().map(AlgebraSpan::dim).collect(),
        }
    }

    fn series_in_coordinates(&self, sc: &StructureConstants, lower: bool) -> Vec<AlgebraSpan> {
        let terms = series_coordinates(sc, self.dim(), lower);
        let mut out = vec![self.clone()];
        for t in &terms[1..] {
            let fields: Vec<VectorField> = t.iter().map(|c| self.combine(c)).collect();
            out.push(AlgebraSpan::span_of(&fields));
        }
        out
    }

    pub fn is_abelian(&self) -> bool {
        self.derived().dim() == 0
    }

    pub fn is_solvable(&self) -> bool {
        self.derived_series().last().is_some_and(|s| s.dim() == 0)
    }

    pub fn is_nilpotent(&self) -> bool {
        self.lower_central_dims().last() == Some(&0)
    }

    /// Kernel of the joint adjoint action. Requires closure.
    pub fn center(&self) -> Result<AlgebraSpan, AlgebraError> {
        let sc = self.verify_closure()?;
        let n = self.dim();
        // rows indexed by (j, k), columns by i: Σ_i a_i c[i][j][k] = 0
        let mut rows = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in 0..n {
                rows.push((0..n).map(|i| sc.get(i, j, k).clone()).collect::<Vec<_>>());
            }
        }
        if n == 0 {
            return Ok(AlgebraSpan::zero());
        }
        let kernel = Matrix::from_rows(rows).kernel();
        let fields: Vec<VectorField> = kernel.iter().map(|a| self.combine(a)).collect();
        Ok(AlgebraSpan::span_of(&fields))
    }

    /// Dimension of the generic orbit, decided by exact 2×2 minors.
    pub fn rank(&self) -> usize {
        rank_of_fields(&self.basis)
    }
}

/// Generic pointwise rank of a family of fields: 0, 1 or 2.
pub fn rank_of_fields(fields: &[VectorField]) -> usize {
    for (i, v) in fields.iter().enumerate() {
        for w in &fields[i + 1..] {
            if !v.p.mul(&w.q).sub(&w.p.mul(&v.q)).is_zero() {
                return 2;
            }
        }
    }
    if fields.iter().any(|v| !v.is_zero()) {
        1
    } else {
        0
    }
}

/// Coordinate bases of the derived (or lower central) series of a closed span,
/// starting from the unit basis. Brackets are visited in the same order as the
/// field-level versions and selected greedily, so every term has the basis
/// they would produce.
fn series_coordinates(sc: &StructureConstants, n: usize, lower: bool) -> Vec<Vec<Vec<GaussianRational>>> {
    let unit: Vec<Vec<GaussianRational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { GaussianRational::one() } else { GaussianRational::zero() }).collect())
        .collect();
    let mut out = vec![unit.clone()];
    loop {
        let cur = out.last().unwrap();
        if cur.is_empty() {
            break;
        }
        let mut brackets = Vec::new();
        if lower {
            for a in &unit {
                brackets.extend(cur.iter().map(|b| sc.bracket(a, b)));
            }
        } else {
            for i in 0..cur.len() {
                brackets.extend(cur[i + 1..].iter().map(|b| sc.bracket(&cur[i], b)));
            }
        }
        let next = greedy_independent(brackets);
        if next.len() == cur.len() {
            break;
        }
        out.push(next);
    }
    out
}

/// The vectors of `rows` that are independent of the ones before them.
fn greedy_independent(rows: Vec<Vec<GaussianRational>>) -> Vec<Vec<GaussianRational>> {
    let mut echelon: Vec<(usize, Vec<GaussianRational>)> = Vec::new();
    let mut kept = Vec::new();
    for row in rows {
        let mut red = row.clone();
        for (p, e) in &echelon {
            if red[*p].is_zero() {
                continue;
            }
            let f = red[*p].clone();
            for (x, y) in red.iter_mut().zip(e) {
                if !y.is_zero() {
                    *x -= &(&f * y);
                }
            }
        }
        let Some(p) = red.iter().position(|c| !c.is_zero()) else {
            continue;
        };
        let inv = red[p].inv().expect("nonzero pivot");
        for x in red.iter_mut() {
            *x = &*x * &inv;
        }
        echelon.push((p, red));
        kept.push(row);
    }
    kept
}

fn iterate_series(start: AlgebraSpan, step: impl Fn(&AlgebraSpan) -> AlgebraSpan) -> Vec<AlgebraSpan> {
    let mut out = vec![start];
    loop {
        let last = out.last().unwrap();
        if last.dim() == 0 {
            break;
        }
        let next = step(last);
        if next.dim() == last.dim() {
            break;
        }
        out.push(next);
    }
    out
}
