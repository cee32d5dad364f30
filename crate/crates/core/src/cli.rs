//! Command-line front end.
//!
//! Every command builds a [`Report`]. The human-readable rendering and the
//! JSON rendering carry the same information, and the process exit status is
//! stored in the report as well.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraError, AlgebraSpan};
use crate::catalog::{audit, generate_basis, predicted_classification, CanonicalFamily, CatalogError, SpectralPair};
use crate::classify::{canonicalize_triangular, classify, fingerprint, ClassificationRecord, ClassifyError, InvariantFingerprint};
use crate::coeffring::ExpPoly;
use crate::expr::{parse_algebra_file, parse_function, print_field, ParseError, ParseErrorKind};
use crate::fields::VectorField;
use crate::scalar::GaussianRational;
use crate::transform::{pushforward, PointTransform, TransformChain, TransformError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_CLOSED: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_NOT_SOLVABLE: i32 = 4;
pub const EXIT_IRRATIONAL: i32 = 5;
pub const EXIT_UNCLASSIFIABLE: i32 = 6;
pub const EXIT_INVALID_PARAMETERS: i32 = 7;

/// Environment variable seeding the randomized part of `catalog --verify`.
pub const SEED_VAR: &str = "PLANAR_LIE_SEED";

#[derive(Debug, Parser)]
#[command(name = "planar-lie", version, about = "Exact Lie algebras of planar vector fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report the invariants and bracket table of a closed algebra file.
    Analyze {
        path: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Classify an algebra file into a normal-form family.
    Classify {
        path: PathBuf,
        #[arg(long)]
        json: bool,
        /// Also construct a transform chain onto the canonical basis.
        #[arg(long)]
        witness: bool,
    },
    /// Write the canonical algebra of a family, e.g. `catalog spectral variant=3 S=0:2`.
    Catalog {
        family: String,
        /// Parameters as KEY=VALUE.
        params: Vec<String>,
        /// Write the algebra file here instead of standard output.
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Classify the emitted algebra, and a randomly sheared copy, and compare.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        json: bool,
    },
    /// Apply a serialized transform chain to every field of an algebra file.
    Transform {
        path: PathBuf,
        /// JSON chain, or `@file` to read it from a file.
        #[arg(long)]
        chain: String,
        #[arg(long)]
        emit: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

/// One nonzero entry of the bracket table: `[e_i, e_j] = Σ coords_k e_k` (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub coords: Vec<GaussianRational>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub kind: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
    /// Offending bracket, 1-based.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equivalent: Option<CanonicalFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<TransformChain>,
}

impl Diagnostic {
    fn new(kind: &str, message: impl Into<String>) -> Self {
        Self {
            kind: kind.into(),
            message: message.into(),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub status: String,
    pub exit_code: i32,
    /// The parsed input fields, printed canonically.
    pub input: Vec<String>,
    /// The independent subset used as basis `e1, e2, …`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<InvariantFingerprint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brackets: Option<Vec<BracketEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<ClassificationRecord>,
    /// Fields produced by `catalog` and `transform`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<Vec<String>>,
    pub diagnostics: Vec<Diagnostic>,
    pub elapsed_us: u64,
}

impl Report {
    fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            status: "ok".into(),
            ..Self::default()
        }
    }

    fn fail(&mut self, status: &str, code: i32, d: Diagnostic) {
        self.status = status.into();
        self.exit_code = code;
        self.diagnostics.push(d);
    }

    fn fail_classify(&mut self, e: &ClassifyError) {
        let (status, d) = match e {
            ClassifyError::NotClosed(a) => return self.fail_algebra(a),
            ClassifyError::NotSolvable { .. } => ("NotSolvable", Diagnostic::new("NotSolvable", e.to_string())),
            ClassifyError::IrrationalSpectrum { factor } => {
                let mut d = Diagnostic::new("IrrationalSpectrum", e.to_string());
                d.factor = Some(factor.clone());
                ("IrrationalSpectrum", d)
            }
            ClassifyError::Transform(TransformError::InvalidParameters(_)) => {
                ("InvalidParameters", Diagnostic::new("InvalidParameters", e.to_string()))
            }
            _ => ("UnclassifiableForm", Diagnostic::new("UnclassifiableForm", e.to_string())),
        };
        if let ClassifyError::UnclassifiableForm { fingerprint, .. } = e {
            self.fingerprint.get_or_insert_with(|| (**fingerprint).clone());
        }
        self.fail(status, e.exit_code(), d);
    }

    fn fail_algebra(&mut self, e: &AlgebraError) {
        match e {
            AlgebraError::EmptySpan => self.fail("EmptyInput", EXIT_PARSE, Diagnostic::new("EmptyInput", e.to_string())),
            AlgebraError::NotClosed { i, j, witness } => {
                let mut d = Diagnostic::new("NotClosed", e.to_string());
                d.pair = Some([i + 1, j + 1]);
                d.witness = Some(print_field(witness));
                self.fail("NotClosed", EXIT_NOT_CLOSED, d);
            }
        }
    }

    fn fail_parse(&mut self, e: &ParseError) {
        let kind = if e.kind == ParseErrorKind::EmptyInput { "EmptyInput" } else { "ParseError" };
        let mut d = Diagnostic::new(kind, e.to_string());
        d.line = Some(e.line);
        d.column = Some(e.column);
        self.fail(kind, EXIT_PARSE, d);
    }

    fn fail_invalid(&mut self, msg: impl Into<String>) {
        self.fail("InvalidParameters", EXIT_INVALID_PARAMETERS, Diagnostic::new("InvalidParameters", msg));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}: {} (exit {})", self.command, self.status, self.exit_code);
        if let Some(b) = &self.basis {
            let _ = writeln!(s, "basis:");
            for (k, f) in b.iter().enumerate() {
                let _ = writeln!(s, "  e{} = {f}", k + 1);
            }
        }
        if let Some(fp) = &self.fingerprint {
            let _ = writeln!(s, "invariants:");
            let _ = writeln!(s, "  dim {}  rank {}  center dim {}", fp.dim, fp.rank, fp.center_dim);
            let _ = writeln!(s, "  derived series dims {:?}", fp.derived_dims);
            let _ = writeln!(s, "  lower central series dims {:?}", fp.lower_central_dims);
            let _ = writeln!(
                s,
                "  abelian {}  nilpotent {}  solvable {}",
                fp.is_abelian, fp.is_nilpotent, fp.is_solvable
            );
            if let Some(sp) = &fp.spectral {
                let _ = writeln!(s, "  operator {}  S = {}", sp.operator.as_str(), format_s(&sp.spectrum));
            }
        }
        if let Some(br) = &self.brackets {
            let _ = writeln!(s, "brackets:");
            for b in br {
                let _ = writeln!(s, "  [e{}, e{}] = {}", b.i, b.j, format_combination(&b.coords));
            }
        }
        if let Some(c) = &self.classification {
            let _ = writeln!(s, "family: {}", serde_json::to_string(&c.family).expect("serializes"));
            if let Some(w) = &c.witness {
                let _ = writeln!(s, "witness: {w}");
            }
            if let Some(b) = &c.canonical_basis {
                let text: Vec<String> = b.iter().map(print_field).collect();
                let _ = writeln!(s, "canonical basis: {}", text.join(", "));
            }
        }
        if let Some(o) = &self.output {
            let _ = writeln!(s, "output:");
            for f in o {
                let _ = writeln!(s, "  {f}");
            }
        }
        for d in &self.diagnostics {
            let _ = writeln!(s, "{}: {}", d.kind, d.message);
            if let Some(w) = &d.witness {
                let _ = writeln!(s, "  witness: {w}");
            }
            if let Some(c) = &d.chain {
                let _ = writeln!(s, "  chain: {c}");
            }
        }
        s
    }
}

fn format_s(s: &[SpectralPair]) -> String {
    let parts: Vec<String> = s.iter().map(|p| format!("{}:{}", p.lambda, p.multiplicity)).collect();
    parts.join(",")
}

fn format_combination(coords: &[GaussianRational]) -> String {
    let terms: Vec<String> = coords
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| if c.is_one() { format!("e{}", k + 1) } else { format!("({c})*e{}", k + 1) })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// Parses an algebra file and records the echo; `None` means the report already holds the failure.
fn load(report: &mut Report, path: &Path) -> Option<Vec<VectorField>> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            report.fail("ParseError", EXIT_PARSE, Diagnostic::new("ParseError", format!("{}: {e}", path.display())));
            return None;
        }
    };
    load_text(report, &text)
}

fn load_text(report: &mut Report, text: &str) -> Option<Vec<VectorField>> {
    match parse_algebra_file(text) {
        Ok(fields) if fields.is_empty() => {
            report.fail("EmptyInput", EXIT_PARSE, Diagnostic::new("EmptyInput", "the algebra file contains no fields"));
            None
        }
        Ok(fields) => {
            report.input = fields.iter().map(print_field).collect();
            Some(fields)
        }
        Err(e) => {
            report.fail_parse(&e);
            None
        }
    }
}

/// Spans the fields and checks closure, recording the basis.
fn closed_span(report: &mut Report, fields: &[VectorField]) -> Option<AlgebraSpan> {
    let g = match AlgebraSpan::make_span(fields) {
        Ok(g) => g,
        Err(e) => {
            report.fail_algebra(&e);
            return None;
        }
    };
    report.basis = Some(g.basis().iter().map(print_field).collect());
    if let Err(e) = g.verify_closure() {
        report.fail_algebra(&e);
        return None;
    }
    Some(g)
}

pub fn cmd_analyze(path: &Path) -> Report {
    let mut r = Report::new("analyze");
    if let Some(fields) = load(&mut r, path) {
        analyze_fields(&mut r, &fields);
    }
    r
}

fn analyze_fields(r: &mut Report, fields: &[VectorField]) {
    let Some(g) = closed_span(r, fields) else { return };
    let sc = g.verify_closure().expect("checked");
    let n = g.dim();
    let mut brackets = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let coords = sc.bracket_coords(i, j);
            if coords.iter().any(|c| !c.is_zero()) {
                brackets.push(BracketEntry { i: i + 1, j: j + 1, coords: coords.to_vec() });
            }
        }
    }
    r.brackets = Some(brackets);
    match fingerprint(&g) {
        Ok(fp) => r.fingerprint = Some(fp),
        Err(e) => r.fail_classify(&e),
    }
}

pub fn cmd_classify(path: &Path, witness: bool) -> Report {
    let mut r = Report::new("classify");
    if let Some(fields) = load(&mut r, path) {
        classify_fields(&mut r, &fields, witness);
    }
    r
}

fn classify_fields(r: &mut Report, fields: &[VectorField], witness: bool) {
    let Some(g) = closed_span(r, fields) else { return };
    let record = match classify(&g) {
        Ok(rec) => rec,
        Err(e) => return r.fail_classify(&e),
    };
    r.fingerprint = Some(record.fingerprint.clone());
    r.classification = Some(record);
    if witness {
        match canonicalize_triangular(&g) {
            Ok(rec) => r.classification = Some(rec),
            Err(e) => {
                let kind = match e {
                    ClassifyError::NotTriangular(_) => "NotTriangular",
                    _ => "NormalizationOutOfScope",
                };
                r.diagnostics.push(Diagnostic::new(kind, e.to_string()));
            }
        }
    }
}

fn parse_s(text: &str) -> Result<Vec<SpectralPair>, String> {
    text.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (l, m) = p.rsplit_once(':').ok_or_else(|| format!("S entry {p:?} is not lambda:multiplicity"))?;
            let lambda: GaussianRational = l.trim().parse().map_err(|_| format!("bad eigenvalue {l:?}"))?;
            let multiplicity: usize = m.trim().parse().map_err(|_| format!("bad multiplicity {m:?}"))?;
            Ok(SpectralPair::new(lambda, multiplicity))
        })
        .collect()
}

/// Parses `FAMILY KEY=VALUE…` into a family value (side conditions are checked later).
pub fn parse_family(name: &str, params: &[String]) -> Result<CanonicalFamily, String> {
    let mut kv = std::collections::BTreeMap::new();
    for p in params {
        let (k, v) = p.split_once('=').ok_or_else(|| format!("parameter {p:?} is not KEY=VALUE"))?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    let mut take = |k: &str| kv.remove(k);
    let int = |v: Option<String>, k: &str| -> Result<u32, String> {
        v.ok_or_else(|| format!("missing parameter {k}"))?.parse().map_err(|_| format!("{k} must be a non-negative integer"))
    };
    let scalar = |v: String, k: &str| -> Result<GaussianRational, String> { v.parse().map_err(|_| format!("{k} must be a Gaussian rational")) };
    let fam = match name.to_ascii_lowercase().replace('_', "-").as_str() {
        "abelian-rank1" | "abelianrank1" => CanonicalFamily::AbelianRank1,
        "abelian-rank2" | "abelianrank2" | "abelian" => CanonicalFamily::AbelianRank2,
        "nilpotent" | "nilpotentnonabelian" => CanonicalFamily::NilpotentNonAbelian { n: int(take("N"), "N")? },
        "nonabelian-full" | "nonabelianderivedfull" => CanonicalFamily::NonAbelianDerivedFull { k: int(take("k"), "k")? },
        "nonabelian-line" | "nonabelianderivedline" => CanonicalFamily::NonAbelianDerivedLine {
            k: int(take("k"), "k")?,
            a: scalar(take("a").ok_or("missing parameter a")?, "a")?,
        },
        "rank2-abelian" | "rank2abelian" => CanonicalFamily::Rank2Abelian {
            subtype: int(take("type"), "type")? as u8,
            lambda: take("lambda").map(|v| scalar(v, "lambda")).transpose()?,
        },
        "rank1-solvable" | "rank1solvable" => CanonicalFamily::Rank1Solvable {
            spectrum: take("spectrum")
                .ok_or("missing parameter spectrum")?
                .split(';')
                .map(|f| parse_function(f.trim()).map_err(|e| format!("spectrum function {f:?}: {e}")))
                .collect::<Result<Vec<ExpPoly>, _>>()?,
        },
        "spectral" | "spectraltype" => CanonicalFamily::SpectralType {
            variant: int(take("variant"), "variant")? as u8,
            s: parse_s(&take("S").ok_or("missing parameter S")?)?,
            n: take("N").map(|v| v.parse().map_err(|_| "N must be a non-negative integer".to_string())).transpose()?,
        },
        other => return Err(format!("unknown family {other:?}")),
    };
    if let Some(k) = kv.keys().next() {
        return Err(format!("unexpected parameter {k}"));
    }
    Ok(fam)
}

fn algebra_text(header: &str, fields: &[String]) -> String {
    let mut s = format!("# {header}\n");
    for f in fields {
        s.push_str(f);
        s.push('\n');
    }
    s
}

fn write_output(r: &mut Report, path: &Path, text: &str) {
    if let Err(e) = std::fs::write(path, text) {
        r.fail("IoError", EXIT_PARSE, Diagnostic::new("IoError", format!("{}: {e}", path.display())));
    }
}

/// Seed for randomized self-checks, from the environment when set.
pub fn seed_from_env() -> u64 {
    std::env::var(SEED_VAR).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(0)
}

/// A real x-shear with a polynomial offset, drawn from `rng`.
pub fn random_real_shear(rng: &mut impl Rng) -> PointTransform {
    let alphas = [(1, 1), (-1, 1), (2, 1), (1, 2), (-3, 2)];
    let (an, ad) = alphas[rng.gen_range(0..alphas.len())];
    let f = ExpPoly::from_terms((0..=3u32).map(|d| {
        (GaussianRational::from_int(rng.gen_range(-3..=3)), crate::coeffring::ExpMonomial::poly(0, d))
    }));
    PointTransform::ShearX {
        alpha: GaussianRational::ratio(an, ad),
        f,
    }
}

pub fn cmd_catalog(family: &str, params: &[String], emit: Option<&Path>, verify: bool) -> Report {
    let mut r = Report::new("catalog");
    r.input = std::iter::once(family.to_string()).chain(params.iter().cloned()).collect();
    let fam = match parse_family(family, params) {
        Ok(f) => f,
        Err(e) => {
            r.fail_invalid(e);
            return r;
        }
    };
    let basis = match generate_basis(&fam) {
        Ok(b) => b,
        Err(CatalogError::InvalidParameters(e)) => {
            r.fail_invalid(e);
            return r;
        }
    };
    let fields: Vec<String> = basis.iter().map(print_field).collect();
    let header = serde_json::to_string(&fam).expect("serializes");
    let text = algebra_text(&header, &fields);
    r.output = Some(fields);
    if let Some(p) = emit {
        write_output(&mut r, p, &text);
    }
    if let Ok(diags) = audit(&fam) {
        for d in diags {
            let mut diag = Diagnostic::new(&format!("{:?}", d.kind), d.message);
            diag.equivalent = d.equivalent;
            diag.chain = d.witness;
            r.diagnostics.push(diag);
        }
    }
    if verify {
        verify_round_trip(&mut r, &fam, &text);
    }
    r
}

fn verify_round_trip(r: &mut Report, fam: &CanonicalFamily, text: &str) {
    let mut inner = Report::new("classify");
    let Some(fields) = load_text(&mut inner, text) else {
        r.fail("VerifyFailed", EXIT_UNCLASSIFIABLE, Diagnostic::new("VerifyFailed", "emitted file does not parse"));
        return;
    };
    classify_fields(&mut inner, &fields, false);
    let expected = match predicted_classification(fam) {
        Ok(f) => f,
        Err(CatalogError::InvalidParameters(e)) => return r.fail_invalid(e),
    };
    let got = inner.classification.as_ref().map(|c| c.family.clone());
    if matches!(fam, CanonicalFamily::AbelianRank1) {
        return;
    }
    if got.as_ref() != Some(&expected) {
        let msg = format!("emitted algebra classifies as {got:?}, expected {expected:?}");
        r.fail("VerifyFailed", EXIT_UNCLASSIFIABLE, Diagnostic::new("VerifyFailed", msg));
        return;
    }
    let seed = seed_from_env();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chain = TransformChain(vec![random_real_shear(&mut rng)]);
    let pushed: Result<Vec<VectorField>, _> = fields.iter().map(|v| pushforward(&chain, v)).collect();
    let mut sheared = Report::new("classify");
    if let Ok(p) = pushed {
        classify_fields(&mut sheared, &p, false);
    }
    let got = sheared.classification.map(|c| c.family);
    if got.as_ref() != Some(&expected) {
        let mut d = Diagnostic::new("VerifyFailed", format!("sheared copy (seed {seed}) classifies as {got:?}"));
        d.chain = Some(chain);
        r.fail("VerifyFailed", EXIT_UNCLASSIFIABLE, d);
        return;
    }
    let mut d = Diagnostic::new("Verified", format!("round trip recovers the family; sheared copy with seed {seed} agrees"));
    d.equivalent = Some(expected);
    d.chain = Some(chain);
    r.diagnostics.push(d);
}

fn read_chain(arg: &str) -> Result<TransformChain, String> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?,
        None => arg.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| format!("transform chain: {e}"))
}

pub fn cmd_transform(path: &Path, chain: &str, emit: Option<&Path>) -> Report {
    let mut r = Report::new("transform");
    let chain = match read_chain(chain) {
        Ok(c) => c,
        Err(e) => {
            r.fail_invalid(e);
            return r;
        }
    };
    let Some(fields) = load(&mut r, path) else { return r };
    if let Err(e) = chain.validate() {
        r.fail_invalid(e.to_string());
        return r;
    }
    let mut out = Vec::with_capacity(fields.len());
    for v in &fields {
        match pushforward(&chain, v) {
            Ok(w) => out.push(print_field(&w)),
            Err(e) => {
                r.fail_invalid(e.to_string());
                return r;
            }
        }
    }
    if let Some(p) = emit {
        write_output(&mut r, p, &algebra_text(&format!("pushed forward by {chain}"), &out));
    }
    r.output = Some(out);
    let mut d = Diagnostic::new("Chain", format!("applied {} transform(s)", chain.0.len()));
    d.chain = Some(chain);
    r.diagnostics.push(d);
    r
}

/// Runs a parsed command line and returns the report and the rendered output.
pub fn run(cli: &Cli) -> (Report, String) {
    let start = Instant::now();
    let (mut report, json) = match &cli.command {
        Command::Analyze { path, json } => (cmd_analyze(path), *json),
        Command::Classify { path, json, witness } => (cmd_classify(path, *witness), *json),
        Command::Catalog { family, params, emit, verify, json } => {
            (cmd_catalog(family, params, emit.as_deref(), *verify), *json)
        }
        Command::Transform { path, chain, emit, json } => (cmd_transform(path, chain, emit.as_deref()), *json),
    };
    report.elapsed_us = start.elapsed().as_micros() as u64;
    let rendered = if json {
        report.to_json()
    } else if matches!(cli.command, Command::Catalog { emit: None, json: false, .. } | Command::Transform { emit: None, json: false, .. })
        && report.exit_code == EXIT_OK
    {
        // plain catalog/transform output is itself an algebra file
        let header = report.diagnostics.iter().map(|d| format!("# {}: {}\n", d.kind, d.message)).collect::<String>();
        format!("{header}{}", report.output.clone().unwrap_or_default().join("\n") + "\n")
    } else {
        report.render_text()
    };
    (report, rendered)
}
