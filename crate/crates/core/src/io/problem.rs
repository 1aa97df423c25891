//! Problem files: JSON documents whose polynomials and matrix entries are
//! strings in the expression grammar.

use std::path::Path;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::parse::{parse_poly, parse_scalar, ParseError};
use crate::exactalg::{check_field, Context, Polynomial, Scalar, ScalarMatrix};
use crate::groups::{close_group, FiniteGroup, GroupError, OrthMatrix, SubspaceBasis};
use crate::invariants::{InvariantError, Mib, MibEntry};
use crate::parametrize::{ParametrizeError, SubspaceSpec};

const SPOT_CHECKS: usize = 10;
const SPOT_SEED: u64 = 0x5eed;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("schema violation at `{path}`: {msg}")]
    Schema { path: String, msg: String },
    #[error("`{field}`: {source}")]
    Parse { field: String, source: ParseError },
    #[error("`{field}`: {msg}")]
    Invalid { field: String, msg: String },
    #[error("`{field}`: group closure exceeded {cap} elements")]
    CapExceeded { field: String, cap: usize },
}

impl ProblemError {
    fn invalid(field: impl Into<String>, msg: impl Into<String>) -> Self {
        ProblemError::Invalid { field: field.into(), msg: msg.into() }
    }

    /// The JSON path or field the error refers to, if any.
    pub fn field(&self) -> Option<&str> {
        match self {
            ProblemError::Io { .. } => None,
            ProblemError::Schema { path, .. } => Some(path),
            ProblemError::Parse { field, .. }
            | ProblemError::Invalid { field, .. }
            | ProblemError::CapExceeded { field, .. } => Some(field),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    name: String,
    #[serde(default)]
    description: Option<String>,
    #[serde(rename = "field_D")]
    field_d: u32,
    x_vars: Vec<String>,
    mib: Vec<RawEntry>,
    #[serde(default)]
    relations: Vec<String>,
    #[serde(default)]
    group: Option<RawGroup>,
    #[serde(default)]
    candidate_factors: Vec<String>,
    #[serde(default)]
    strata_jobs: Vec<RawJob>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    name: String,
    degree: u32,
    expr: String,
}

type RawMatrix = Vec<Vec<String>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    generators: Vec<RawMatrix>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJob {
    #[serde(default)]
    name: Option<String>,
    subspace: RawSubspace,
    #[serde(default)]
    v_vars: Option<Vec<String>>,
    lambda_mib: Vec<RawEntry>,
    #[serde(default)]
    annotations: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSubspace {
    #[serde(default)]
    generators: Option<Vec<RawMatrix>>,
    /// 1-based coordinate indices.
    #[serde(default)]
    zero_coords: Option<Vec<usize>>,
    /// Orthonormal basis vectors, one per row.
    #[serde(default)]
    basis: Option<RawMatrix>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StratumJob {
    pub name: String,
    pub subspace: SubspaceSpec,
    pub basis: SubspaceBasis,
    pub lambda_mib: Mib,
    pub annotations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub name: String,
    pub description: Option<String>,
    pub field_d: u32,
    pub mib: Mib,
    /// In the p-context.
    pub relations: Vec<Polynomial>,
    pub group_generators: Vec<OrthMatrix>,
    /// In the p-context.
    pub candidate_factors: Vec<Polynomial>,
    pub strata_jobs: Vec<StratumJob>,
    /// SHA-256 of the source bytes, hex.
    pub digest: String,
}

impl ProblemSpec {
    pub fn x_vars(&self) -> &Context {
        self.mib.vars()
    }

    pub fn p_vars(&self) -> &Context {
        self.mib.p_context()
    }

    pub fn group(&self, cap: usize) -> Result<Option<FiniteGroup>, GroupError> {
        if self.group_generators.is_empty() {
            return Ok(None);
        }
        close_group(&self.group_generators, cap).map(Some)
    }

    pub fn job(&self, k: usize) -> Option<&StratumJob> {
        self.strata_jobs.get(k)
    }
}

pub fn load_problem(path: impl AsRef<Path>) -> Result<ProblemSpec, ProblemError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| ProblemError::Io { path: path.display().to_string(), source })?;
    parse_problem(&bytes)
}

/// Parses and validates a problem document.
pub fn parse_problem(bytes: &[u8]) -> Result<ProblemSpec, ProblemError> {
    let digest = format!("{:x}", Sha256::digest(bytes));
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let raw: RawProblem = serde_path_to_error::deserialize(de).map_err(|e| ProblemError::Schema {
        path: e.path().to_string(),
        msg: e.inner().to_string(),
    })?;
    build(raw, digest)
}

fn unique_names(field: &str, names: &[String]) -> Result<(), ProblemError> {
    for (i, n) in names.iter().enumerate() {
        if n.is_empty() || !n.chars().all(|c| c.is_alphanumeric() || c == '_') || n.starts_with(|c: char| c.is_ascii_digit())
        {
            return Err(ProblemError::invalid(format!("{field}[{i}]"), format!("`{n}` is not an identifier")));
        }
        if n == "rt" {
            return Err(ProblemError::invalid(format!("{field}[{i}]"), "`rt` is reserved"));
        }
        if names[..i].contains(n) {
            return Err(ProblemError::invalid(format!("{field}[{i}]"), format!("duplicate name `{n}`")));
        }
    }
    Ok(())
}

fn poly(field: String, expr: &str, ctx: &Context, d: u32) -> Result<Polynomial, ProblemError> {
    parse_poly(expr, ctx, d).map_err(|source| ProblemError::Parse { field, source })
}

fn build_mib(field: &str, entries: &[RawEntry], ctx: &Context, d: u32) -> Result<Mib, ProblemError> {
    let names: Vec<String> = entries.iter().map(|e| e.name.clone()).collect();
    unique_names(field, &names)?;
    let mut out = Vec::with_capacity(entries.len());
    for (i, e) in entries.iter().enumerate() {
        let p = poly(format!("{field}[{i}].expr"), &e.expr, ctx, d)?;
        out.push(MibEntry { name: e.name.clone(), degree: e.degree, poly: p });
    }
    Mib::new(ctx, out).map_err(|err| {
        let at = |name: &str| entries.iter().position(|e| e.name == name).unwrap_or(0);
        match err {
            InvariantError::NonHomogeneous { name, degree } => ProblemError::invalid(
                format!("{field}[{}]", at(&name)),
                format!("entry `{name}` is not homogeneous of degree {degree}"),
            ),
            InvariantError::Degenerate(name) => ProblemError::invalid(
                format!("{field}[{}]", at(&name)),
                format!("entry `{name}` is zero or has degree 0"),
            ),
            other => ProblemError::invalid(field, other.to_string()),
        }
    })
}

fn matrix(field: &str, rows: &RawMatrix, n: usize, d: u32) -> Result<ScalarMatrix, ProblemError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(ProblemError::invalid(field, format!("expected a {n}x{n} matrix")));
    }
    let mut out = Vec::with_capacity(n);
    for (i, r) in rows.iter().enumerate() {
        let mut row = Vec::with_capacity(n);
        for (j, s) in r.iter().enumerate() {
            let v = parse_scalar(s, d)
                .map_err(|source| ProblemError::Parse { field: format!("{field}[{i}][{j}]"), source })?;
            row.push(v);
        }
        out.push(row);
    }
    ScalarMatrix::from_rows(out).map_err(|e| ProblemError::invalid(field, e.to_string()))
}

fn orth_list(field: &str, raw: &[RawMatrix], n: usize, d: u32) -> Result<Vec<OrthMatrix>, ProblemError> {
    raw.iter()
        .enumerate()
        .map(|(k, m)| {
            let f = format!("{field}[{k}]");
            let m = matrix(&f, m, n, d)?;
            OrthMatrix::new(m).map_err(|e| ProblemError::invalid(f, e.to_string()))
        })
        .collect()
}

fn small_rational(rng: &mut ChaCha8Rng) -> Scalar {
    let num: i64 = rng.gen_range(-7..=7);
    let den: i64 = rng.gen_range(1..=5);
    Scalar::from_rational(BigRational::new(num.into(), den.into()))
}

/// Relations are first evaluated at a few seeded rational points, which
/// rejects most wrong relations cheaply, then checked exactly.
fn check_relations(mib: &Mib, relations: &[Polynomial]) -> Result<(), ProblemError> {
    let n = mib.vars().arity();
    let mut rng = ChaCha8Rng::seed_from_u64(SPOT_SEED);
    let points: Vec<Vec<Scalar>> = (0..SPOT_CHECKS).map(|_| (0..n).map(|_| small_rational(&mut rng)).collect()).collect();
    let images: Vec<Vec<Scalar>> = points.iter().map(|x| mib.eval(x)).collect();
    for (i, f) in relations.iter().enumerate() {
        let field = format!("relations[{i}]");
        if let Some(k) = images.iter().position(|p| !f.eval(p).is_zero()) {
            return Err(ProblemError::invalid(
                field,
                format!("does not vanish at spot-check point {}", render_point(&points[k])),
            ));
        }
        let composed = mib.compose(f).map_err(|e| ProblemError::invalid(field.clone(), e.to_string()))?;
        if !composed.is_zero() {
            return Err(ProblemError::invalid(field, "does not vanish identically on the basis"));
        }
    }
    Ok(())
}

fn render_point(x: &[Scalar]) -> String {
    let parts: Vec<String> = x.iter().map(Scalar::to_string).collect();
    format!("({})", parts.join(", "))
}

fn build_job(k: usize, raw: &RawJob, x_vars: &Context, d: u32) -> Result<StratumJob, ProblemError> {
    let base = format!("strata_jobs[{k}]");
    let n = x_vars.arity();
    let s = &raw.subspace;
    let given = [s.generators.is_some(), s.zero_coords.is_some(), s.basis.is_some()];
    if given.iter().filter(|&&b| b).count() != 1 {
        return Err(ProblemError::invalid(
            format!("{base}.subspace"),
            "exactly one of `generators`, `zero_coords`, `basis` is required",
        ));
    }
    let spec = if let Some(g) = &s.generators {
        let gens = orth_list(&format!("{base}.subspace.generators"), g, n, d)?;
        if gens.is_empty() {
            return Err(ProblemError::invalid(format!("{base}.subspace.generators"), "empty generator list"));
        }
        SubspaceSpec::Generators(gens)
    } else if let Some(z) = &s.zero_coords {
        let mut zero = Vec::with_capacity(z.len());
        for (i, &c) in z.iter().enumerate() {
            if c == 0 || c > n {
                return Err(ProblemError::invalid(
                    format!("{base}.subspace.zero_coords[{i}]"),
                    format!("coordinate {c} outside 1..={n}"),
                ));
            }
            zero.push(c - 1);
        }
        SubspaceSpec::ZeroCoords(zero)
    } else {
        let rows = s.basis.as_ref().expect("checked above");
        let f = format!("{base}.subspace.basis");
        let mut vectors = Vec::with_capacity(rows.len());
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(ProblemError::invalid(format!("{f}[{i}]"), format!("expected {n} entries")));
            }
            let v = r
                .iter()
                .enumerate()
                .map(|(j, e)| {
                    parse_scalar(e, d).map_err(|source| ProblemError::Parse { field: format!("{f}[{i}][{j}]"), source })
                })
                .collect::<Result<Vec<_>, _>>()?;
            vectors.push(v);
        }
        let labels = (1..=vectors.len()).map(|i| format!("v{i}")).collect();
        let b = SubspaceBasis::new(n, vectors, labels).map_err(|e| ProblemError::invalid(f, e.to_string()))?;
        SubspaceSpec::Basis(b)
    };
    let mut basis = spec.resolve(x_vars).map_err(|e| match e.root() {
        ParametrizeError::Group(GroupError::CapExceeded(cap)) => {
            ProblemError::CapExceeded { field: format!("{base}.subspace"), cap: *cap }
        }
        _ => ProblemError::invalid(format!("{base}.subspace"), e.to_string()),
    })?;
    if let Some(v) = &raw.v_vars {
        unique_names(&format!("{base}.v_vars"), v)?;
        basis = basis
            .with_labels(v.clone())
            .map_err(|_| ProblemError::invalid(format!("{base}.v_vars"), "one name per subspace dimension required"))?;
    }
    let lambda_mib = build_mib(&format!("{base}.lambda_mib"), &raw.lambda_mib, &basis.context(), d)?;
    Ok(StratumJob {
        name: raw.name.clone().unwrap_or_else(|| format!("job {k}")),
        subspace: spec,
        basis,
        lambda_mib,
        annotations: raw.annotations.clone(),
    })
}

fn build(raw: RawProblem, digest: String) -> Result<ProblemSpec, ProblemError> {
    let d = raw.field_d;
    check_field(d).map_err(|e| ProblemError::invalid("field_D", e.to_string()))?;
    if raw.x_vars.is_empty() {
        return Err(ProblemError::invalid("x_vars", "at least one variable is required"));
    }
    unique_names("x_vars", &raw.x_vars)?;
    let x_ctx = Context::new(&raw.x_vars);
    if raw.mib.is_empty() {
        return Err(ProblemError::invalid("mib", "at least one basis element is required"));
    }
    let mib = build_mib("mib", &raw.mib, &x_ctx, d)?;
    let p_ctx = mib.p_context().clone();
    if let Some(clash) = p_ctx.names().iter().find(|n| x_ctx.index_of(n).is_some()) {
        return Err(ProblemError::invalid("mib", format!("basis name `{clash}` is also a coordinate name")));
    }
    let relations = raw
        .relations
        .iter()
        .enumerate()
        .map(|(i, s)| poly(format!("relations[{i}]"), s, &p_ctx, d))
        .collect::<Result<Vec<_>, _>>()?;
    check_relations(&mib, &relations)?;
    let group_generators = match &raw.group {
        Some(g) => orth_list("group.generators", &g.generators, x_ctx.arity(), d)?,
        None => Vec::new(),
    };
    let candidate_factors = raw
        .candidate_factors
        .iter()
        .enumerate()
        .map(|(i, s)| poly(format!("candidate_factors[{i}]"), s, &p_ctx, d))
        .collect::<Result<Vec<_>, _>>()?;
    let strata_jobs = raw
        .strata_jobs
        .iter()
        .enumerate()
        .map(|(k, j)| build_job(k, j, &x_ctx, d))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProblemSpec {
        name: raw.name,
        description: raw.description,
        field_d: d,
        mib,
        relations,
        group_generators,
        candidate_factors,
        strata_jobs,
        digest,
    })
}
