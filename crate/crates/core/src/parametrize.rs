//! Parametrization of a stratum through the invariants of the induced group
//! on a fixed-point subspace: `p|_V = φ∘λ`, `Λ̂`, `J`, the factorization
//! check and the region `Δ`.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::exactalg::{combinations, AlgebraError, Context, PolyMatrix, Polynomial, Scalar};
use crate::groups::{close_group, fix_subspace, GroupError, OrthMatrix, SubspaceBasis};
use crate::invariants::{find_relations, pmatrix, Decomposer, Decomposition, InvariantError, Mib, PHatMatrix, Relation};
use crate::strata::{numeric_rank, sample_box, FloatMatrix, SampleBox, StrataError, DEFAULT_TOL};

/// Bound on the order of groups closed from generators.
pub const GROUP_CAP: usize = 4096;
pub const THREADS_ENV: &str = "ORBITSTRATA_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Subspace,
    Restrict,
    Phi,
    LambdaHat,
    Jacobian,
    Factorization,
    Relations,
    Delta,
    Coregularity,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Subspace => "subspace",
            Stage::Restrict => "restrict_mib",
            Stage::Phi => "compute_phi",
            Stage::LambdaHat => "lambda_pmatrix",
            Stage::Jacobian => "jacobian",
            Stage::Factorization => "verify_factorization",
            Stage::Relations => "verify_relations_on_phi",
            Stage::Delta => "delta_region",
            Stage::Coregularity => "coregularity",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParametrizeError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("the lambda basis does not generate the restriction of {name}")]
    LambdaNotGenerating { index: usize, name: String },
    #[error("lambda basis variables {found:?} do not match subspace coordinates {expected:?}")]
    ContextMismatch { expected: Vec<String>, found: Vec<String> },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("factorization identity fails at entries {0:?}")]
    FactorizationFailed(Vec<(usize, usize)>),
    #[error("no sample fell inside the region")]
    EmptySample,
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Strata(#[from] StrataError),
    #[error("{stage}: {source}")]
    Stage { stage: Stage, source: Box<ParametrizeError> },
}

impl ParametrizeError {
    pub fn stage(&self) -> Option<Stage> {
        match self {
            ParametrizeError::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }

    /// The error underneath any stage tag.
    pub fn root(&self) -> &ParametrizeError {
        match self {
            ParametrizeError::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T, ParametrizeError>;
}

impl<T, E: Into<ParametrizeError>> AtStage<T> for Result<T, E> {
    fn at(self, stage: Stage) -> Result<T, ParametrizeError> {
        self.map_err(|e| ParametrizeError::Stage { stage, source: Box::new(e.into()) })
    }
}

/// How a fixed-point subspace is given.
#[derive(Clone, Debug, PartialEq)]
pub enum SubspaceSpec {
    /// Generators of `H`; `V = Fix(H)`.
    Generators(Vec<OrthMatrix>),
    /// 0-based coordinates set to zero.
    ZeroCoords(Vec<usize>),
    Basis(SubspaceBasis),
}

impl SubspaceSpec {
    /// Coordinate-aligned results are labelled after the ambient variables.
    pub fn resolve(&self, x_vars: &Context) -> Result<SubspaceBasis, ParametrizeError> {
        let n = x_vars.arity();
        let basis = match self {
            SubspaceSpec::Generators(gens) => {
                if gens.iter().any(|g| g.dim() != n) {
                    return Err(GroupError::SizeMismatch.into());
                }
                let h = close_group(gens, GROUP_CAP)?;
                fix_subspace(&h)?.label_from_ambient(x_vars.names())
            }
            SubspaceSpec::ZeroCoords(zero) => {
                if zero.iter().any(|&i| i >= n) {
                    return Err(ParametrizeError::Dimension(format!("zero coordinate out of range 0..{n}")));
                }
                SubspaceBasis::coordinate(n, zero, x_vars.names())
            }
            SubspaceSpec::Basis(b) => {
                if b.ambient_dim() != n {
                    return Err(GroupError::SizeMismatch.into());
                }
                b.clone()
            }
        };
        Ok(basis)
    }
}

/// `p_a(B·v)` for each basis element, in the subspace coordinates.
pub fn restrict_mib(mib: &Mib, v: &SubspaceBasis) -> Result<Vec<Polynomial>, ParametrizeError> {
    if v.ambient_dim() != mib.vars().arity() {
        return Err(GroupError::SizeMismatch.into());
    }
    let vctx = v.context();
    let images: Vec<Polynomial> = (0..v.ambient_dim())
        .map(|i| {
            let mut x = Polynomial::zero(&vctx);
            for (k, b) in v.vectors().iter().enumerate() {
                if !b[i].is_zero() {
                    x = &x + &Polynomial::var(&vctx, k).scale(&b[i]);
                }
            }
            x
        })
        .collect();
    mib.polys()
        .iter()
        .map(|p| Ok(p.compose(&images, &vctx)?))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Phi {
    /// One entry per basis element, in the λ-context.
    pub components: Vec<Polynomial>,
    /// Indices whose decomposition was not unique.
    pub nonunique: Vec<usize>,
}

/// Writes each restricted invariant as a polynomial in the λ-basis.
pub fn compute_phi(p_restricted: &[Polynomial], lambda_mib: &Mib) -> Result<Phi, ParametrizeError> {
    compute_phi_named(p_restricted, None, lambda_mib)
}

fn compute_phi_named(
    p_restricted: &[Polynomial],
    names: Option<&[String]>,
    lambda_mib: &Mib,
) -> Result<Phi, ParametrizeError> {
    let mut dec = Decomposer::new(lambda_mib);
    let mut components = Vec::with_capacity(p_restricted.len());
    let mut nonunique = Vec::new();
    for (a, p) in p_restricted.iter().enumerate() {
        match dec.decompose(p)? {
            Decomposition::Unique(f) => components.push(f),
            Decomposition::NonUnique { solution, .. } => {
                nonunique.push(a);
                components.push(solution);
            }
            Decomposition::NotInRing { .. } => {
                let name = names.map_or_else(|| format!("p{}", a + 1), |n| n[a].clone());
                return Err(ParametrizeError::LambdaNotGenerating { index: a, name });
            }
        }
    }
    Ok(Phi { components, nonunique })
}

/// `Λ̂`: the P̂-matrix of the λ-basis.
pub fn lambda_pmatrix(lambda_mib: &Mib) -> Result<PHatMatrix, ParametrizeError> {
    Ok(pmatrix(lambda_mib)?)
}

/// `l × q` matrix with `J[α][a] = ∂φ_a/∂λ_α`.
pub fn jacobian(phi: &[Polynomial], lambda_ctx: &Context) -> PolyMatrix {
    let l = lambda_ctx.arity();
    let rows = (0..l)
        .map(|alpha| phi.iter().map(|f| f.diff_index(alpha)).collect())
        .collect();
    if phi.is_empty() {
        return PolyMatrix::zeros(lambda_ctx, l, 0);
    }
    PolyMatrix::from_rows(lambda_ctx, rows).expect("rows share the λ-context")
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorizationReport {
    pub holds: bool,
    /// `(a, b)` with `a <= b` where `P̂(φ)` and `JᵀΛ̂J` differ.
    pub mismatches: Vec<(usize, usize)>,
}

/// Compares `P̂(φ(λ))` with `J(λ)ᵀ Λ̂(λ) J(λ)` entry by entry.
pub fn verify_factorization(
    phat: &PHatMatrix,
    phi: &[Polynomial],
    lambda_hat: &PolyMatrix,
    jac: &PolyMatrix,
) -> Result<FactorizationReport, ParametrizeError> {
    let q = phat.size();
    let l = lambda_hat.rows();
    if phi.len() != q || jac.rows() != l || jac.cols() != q || lambda_hat.cols() != l {
        return Err(ParametrizeError::Dimension(format!(
            "P̂ is {q}x{q}, φ has {} entries, Λ̂ is {l}x{}, J is {}x{}",
            phi.len(),
            lambda_hat.cols(),
            jac.rows(),
            jac.cols()
        )));
    }
    let lctx = lambda_hat.context();
    let rhs = jac.transpose().mul(lambda_hat)?.mul(jac)?;
    let mut mismatches = Vec::new();
    for a in 0..q {
        for b in a..q {
            let lhs = phat.mat.get(a, b).compose(phi, lctx)?;
            if &lhs != rhs.get(a, b) || rhs.get(a, b) != rhs.get(b, a) {
                mismatches.push((a, b));
            }
        }
    }
    Ok(FactorizationReport { holds: mismatches.is_empty(), mismatches })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelationReport {
    pub all_vanish: bool,
    /// `F_A∘φ` for each input, in order.
    pub residuals: Vec<Polynomial>,
}

pub fn verify_relations_on_phi(
    relations: &[Polynomial],
    phi: &[Polynomial],
    lambda_ctx: &Context,
) -> Result<RelationReport, ParametrizeError> {
    let residuals = relations
        .iter()
        .map(|f| Ok(f.compose(phi, lambda_ctx)?))
        .collect::<Result<Vec<_>, ParametrizeError>>()?;
    Ok(RelationReport { all_vanish: residuals.iter().all(Polynomial::is_zero), residuals })
}

/// `Δ = {λ | Λ̂(λ) > 0, rank J(λ) = l}` as certificates: leading principal
/// minors of `Λ̂` must be positive and the `l × l` minors of `J` must not all
/// vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionDescription {
    pub strict: Vec<Polynomial>,
    pub rank_minors: Vec<Polynomial>,
    pub dim: usize,
}

impl RegionDescription {
    /// Every strict inequality is positive and, for `tol > 0`, exceeds `tol`.
    pub fn contains(&self, point: &[Scalar], tol: f64) -> bool {
        self.strict.iter().all(|f| {
            let v = f.eval(point);
            v.signum() == std::cmp::Ordering::Greater && (tol <= 0.0 || v.to_f64() > tol)
        })
    }

    /// Some Jacobian minor is a nonzero constant, so the rank condition holds
    /// everywhere.
    pub fn rank_everywhere(&self) -> bool {
        self.rank_minors.iter().any(|m| m.is_constant() && !m.is_zero())
    }

    /// The strict inequalities are all positive constants.
    pub fn is_unbounded(&self) -> bool {
        self.strict
            .iter()
            .all(|f| f.constant_value().is_some_and(|c| c.signum() == std::cmp::Ordering::Greater))
    }
}

pub fn delta_region(lambda_hat: &PolyMatrix, jac: &PolyMatrix) -> Result<RegionDescription, ParametrizeError> {
    let l = lambda_hat.rows();
    if lambda_hat.cols() != l || jac.rows() != l {
        return Err(ParametrizeError::Dimension(format!(
            "Λ̂ is {l}x{}, J has {} rows",
            lambda_hat.cols(),
            jac.rows()
        )));
    }
    let ctx = lambda_hat.context();
    if l == 0 {
        return Ok(RegionDescription { strict: Vec::new(), rank_minors: vec![Polynomial::one(ctx)], dim: 0 });
    }
    let strict = lambda_hat.leading_principal_minors()?;
    let rows: Vec<usize> = (0..l).collect();
    let rank_minors = combinations(jac.cols(), l)
        .into_iter()
        .map(|cols| jac.submatrix(&rows, &cols).det())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RegionDescription { strict, rank_minors, dim: l })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub tested: usize,
    pub in_region: usize,
    pub min_rank: usize,
    pub required_rank: usize,
    /// In-region points where the numeric rank of `J` is below `l`, sorted.
    pub rank_deficient_points: Vec<Vec<f64>>,
    /// Rank `l` is certified everywhere by a constant minor.
    pub exact_support: bool,
}

impl ProbeReport {
    pub fn full_rank(&self) -> bool {
        self.rank_deficient_points.is_empty() && self.min_rank == self.required_rank
    }
}

/// Worker count for sampling: `ORBITSTRATA_THREADS`, else all cores.
pub fn probe_threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Seeded sampling of the box; points inside the region have the numeric
/// rank of `J` checked.
pub fn connectivity_probe(
    region: &RegionDescription,
    jac: &PolyMatrix,
    bx: &SampleBox,
    samples: usize,
    seed: u64,
) -> Result<ProbeReport, ParametrizeError> {
    if bx.dim() != region.dim || jac.rows() != region.dim {
        return Err(ParametrizeError::Dimension(format!(
            "box has {} intervals, region dimension {}, J has {} rows",
            bx.dim(),
            region.dim,
            jac.rows()
        )));
    }
    let points = sample_box(bx, samples, seed);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(probe_threads())
        .build()
        .map_err(|e| ParametrizeError::Algebra(AlgebraError::Internal(e.to_string())))?;
    let ranks: Vec<Option<Result<usize, StrataError>>> = pool.install(|| {
        points
            .par_iter()
            .map(|pt| {
                region.contains(pt, DEFAULT_TOL).then(|| {
                    let m = FloatMatrix::from_exact(&jac.eval(pt), false)?;
                    numeric_rank(&m, DEFAULT_TOL)
                })
            })
            .collect()
    });
    let mut in_region = 0;
    let mut min_rank = usize::MAX;
    let mut deficient = Vec::new();
    for (pt, r) in points.iter().zip(ranks) {
        let Some(r) = r else { continue };
        let r = r?;
        in_region += 1;
        min_rank = min_rank.min(r);
        if r < region.dim {
            deficient.push(pt.iter().map(Scalar::to_f64).collect::<Vec<f64>>());
        }
    }
    if in_region == 0 {
        return Err(ParametrizeError::EmptySample);
    }
    deficient.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(ProbeReport {
        tested: samples,
        in_region,
        min_rank,
        required_rank: region.dim,
        rank_deficient_points: deficient,
        exact_support: region.rank_everywhere(),
    })
}

/// The ambient data a stratum is parametrized against.
#[derive(Clone, Copy, Debug)]
pub struct StratumInputs<'a> {
    pub mib: &'a Mib,
    pub phat: &'a PHatMatrix,
    pub relations: &'a [Polynomial],
    pub candidate_factors: &'a [Polynomial],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Parametrization {
    pub subspace: SubspaceBasis,
    pub lambda_mib: Mib,
    pub restricted: Vec<Polynomial>,
    pub phi: Phi,
    pub lambda_hat: PHatMatrix,
    pub jac: PolyMatrix,
    pub delta: RegionDescription,
    pub factorization: FactorizationReport,
    pub relations_on_phi: RelationReport,
    /// Candidate factors composed with `φ`.
    pub factors_on_phi: RelationReport,
    pub coregular_k: bool,
    pub lambda_relations: Vec<Relation>,
    pub relation_bound: u32,
    pub diagnostics: Vec<String>,
}

impl Parametrization {
    pub fn lambda_context(&self) -> &Context {
        self.lambda_mib.p_context()
    }
}

/// Runs the full pipeline. The λ-basis must live on the subspace
/// coordinates. Fails when the factorization identity does not hold.
pub fn parametrize_stratum(
    inputs: StratumInputs<'_>,
    subspace: &SubspaceBasis,
    lambda_mib: &Mib,
) -> Result<Parametrization, ParametrizeError> {
    let mut diagnostics = Vec::new();
    let vctx = subspace.context();
    if lambda_mib.vars() != &vctx {
        return Err(ParametrizeError::ContextMismatch {
            expected: vctx.names().to_vec(),
            found: lambda_mib.vars().names().to_vec(),
        })
        .at(Stage::Restrict);
    }
    let restricted = restrict_mib(inputs.mib, subspace).at(Stage::Restrict)?;
    let names: Vec<String> = inputs.mib.entries().iter().map(|e| e.name.clone()).collect();
    let phi = compute_phi_named(&restricted, Some(&names), lambda_mib).at(Stage::Phi)?;
    if !phi.nonunique.is_empty() {
        diagnostics.push(format!(
            "phi components {:?} are not unique; a deterministic representative was used",
            phi.nonunique.iter().map(|&a| &names[a]).collect::<Vec<_>>()
        ));
    }
    let lambda_hat = lambda_pmatrix(lambda_mib).at(Stage::LambdaHat)?;
    let lctx = lambda_mib.p_context();
    let jac = jacobian(&phi.components, lctx);
    let factorization =
        verify_factorization(inputs.phat, &phi.components, &lambda_hat.mat, &jac).at(Stage::Factorization)?;
    if !factorization.holds {
        return Err(ParametrizeError::FactorizationFailed(factorization.mismatches)).at(Stage::Factorization);
    }
    let relations_on_phi =
        verify_relations_on_phi(inputs.relations, &phi.components, lctx).at(Stage::Relations)?;
    if !relations_on_phi.all_vanish {
        diagnostics.push("some relations do not vanish on phi".to_string());
    }
    let factors_on_phi =
        verify_relations_on_phi(inputs.candidate_factors, &phi.components, lctx).at(Stage::Relations)?;
    let delta = delta_region(&lambda_hat.mat, &jac).at(Stage::Delta)?;
    let relation_bound = 2 * lambda_mib.degrees().into_iter().max().unwrap_or(0);
    let lambda_relations = find_relations(lambda_mib, relation_bound);
    let coregular_k = lambda_relations.is_empty();
    if !coregular_k {
        diagnostics.push(format!(
            "{} relation(s) among lambda up to weighted degree {relation_bound}; the parametrization may not be global",
            lambda_relations.len()
        ));
    }
    if delta.rank_everywhere() {
        diagnostics.push("a Jacobian minor is a nonzero constant; rank l holds everywhere".to_string());
    }
    Ok(Parametrization {
        subspace: subspace.clone(),
        lambda_mib: lambda_mib.clone(),
        restricted,
        phi,
        lambda_hat,
        jac,
        delta,
        factorization,
        relations_on_phi,
        factors_on_phi,
        coregular_k,
        lambda_relations,
        relation_bound,
        diagnostics,
    })
}
