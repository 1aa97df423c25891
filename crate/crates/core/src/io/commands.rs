//! Command implementations behind the CLI and the C API. Each produces a
//! [`Report`] and a status; hard failures are [`CommandError`]s.

use std::time::Instant;

use serde_json::{json, Value};
use thiserror::Error;

use super::parse::parse_scalar;
use super::problem::{ProblemError, ProblemSpec, StratumJob};
use super::report::{matrix_json, poly_json, poly_list_json, scalar_with_text, Report};
use crate::exactalg::Scalar;
use crate::groups::GroupError;
use crate::invariants::{find_relations, pmatrix, InvariantError, PHatMatrix};
use crate::parametrize::{
    connectivity_probe, parametrize_stratum, ParametrizeError, Parametrization, StratumInputs,
};
use crate::strata::{classify_point_x, SampleBox, StrataError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandStatus {
    Ok,
    VerificationFailed,
}

impl CommandStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            CommandStatus::Ok => 0,
            CommandStatus::VerificationFailed => 1,
        }
    }

    fn and(self, ok: bool) -> Self {
        if ok {
            self
        } else {
            CommandStatus::VerificationFailed
        }
    }
}

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    CapExceeded(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Problem(ProblemError::CapExceeded { .. }) | CommandError::CapExceeded(_) => 3,
            CommandError::Problem(_) | CommandError::Input(_) => 2,
        }
    }
}

impl From<InvariantError> for CommandError {
    fn from(e: InvariantError) -> Self {
        CommandError::Input(e.to_string())
    }
}

impl From<StrataError> for CommandError {
    fn from(e: StrataError) -> Self {
        match e {
            StrataError::NoConvergence(_) => CommandError::CapExceeded(e.to_string()),
            e => CommandError::Input(e.to_string()),
        }
    }
}

impl From<ParametrizeError> for CommandError {
    fn from(e: ParametrizeError) -> Self {
        match e.root() {
            ParametrizeError::Group(GroupError::CapExceeded(_))
            | ParametrizeError::Strata(StrataError::NoConvergence(_)) => CommandError::CapExceeded(e.to_string()),
            _ => CommandError::Input(e.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub timings: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { timings: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommandOutput {
    pub report: Report,
    pub status: CommandStatus,
}

struct Clock {
    enabled: bool,
    last: Instant,
}

impl Clock {
    fn new(opts: RunOptions) -> Self {
        Clock { enabled: opts.timings, last: Instant::now() }
    }

    fn lap(&mut self, report: &mut Report, phase: &str) {
        let now = Instant::now();
        if self.enabled {
            report.timings.insert(format!("{phase}_ms"), (now - self.last).as_secs_f64() * 1e3);
        }
        self.last = now;
    }
}

/// Comma-separated coordinates, each a constant expression (`1/2`, `rt`).
pub fn parse_point(s: &str, d: u32, n: usize) -> Result<Vec<Scalar>, CommandError> {
    let x = s
        .split(',')
        .enumerate()
        .map(|(i, t)| parse_scalar(t.trim(), d).map_err(|e| CommandError::Input(format!("coordinate {}: {e}", i + 1))))
        .collect::<Result<Vec<_>, _>>()?;
    if x.len() != n {
        return Err(CommandError::Input(format!("point has {} coordinates, expected {n}", x.len())));
    }
    Ok(x)
}

/// `lo:hi,lo:hi,...`; a single interval is repeated over every dimension.
pub fn parse_box(s: &str, dim: usize) -> Result<SampleBox, CommandError> {
    let parse_one = |t: &str| -> Result<(f64, f64), CommandError> {
        let bad = || CommandError::Input(format!("interval `{t}` is not of the form lo:hi"));
        let (lo, hi) = t.trim().split_once(':').ok_or_else(bad)?;
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(bad());
        }
        Ok((lo, hi))
    };
    let parts = s.split(',').map(parse_one).collect::<Result<Vec<_>, _>>()?;
    match parts.len() {
        1 => Ok(SampleBox(vec![parts[0]; dim])),
        k if k == dim => Ok(SampleBox(parts)),
        k => Err(CommandError::Input(format!("box has {k} intervals, expected {dim}"))),
    }
}

fn pairs_1based(v: &[(usize, usize)]) -> Value {
    json!(v.iter().map(|&(a, b)| [a + 1, b + 1]).collect::<Vec<_>>())
}

fn job(problem: &ProblemSpec, k: usize) -> Result<&StratumJob, CommandError> {
    problem.job(k).ok_or_else(|| {
        CommandError::Input(format!("job {k} does not exist ({} strata jobs)", problem.strata_jobs.len()))
    })
}

pub fn run_pmatrix(problem: &ProblemSpec, opts: RunOptions) -> Result<CommandOutput, CommandError> {
    let mut report = Report::new("pmatrix", &problem.digest);
    let mut clock = Clock::new(opts);
    let phat = pmatrix(&problem.mib)?;
    clock.lap(&mut report, "pmatrix");
    let q = phat.size();
    let grading = phat.grading_violations();
    let euler_applicable = problem.mib.starts_with_norm();
    let euler_failures = if euler_applicable { phat.euler_row_failures() } else { Vec::new() };
    let names = problem.p_vars().names();
    let mut entries = Vec::new();
    for a in 0..q {
        for b in a..q {
            entries.push(json!({
                "entry": [a + 1, b + 1],
                "label": format!("P{}{}", a + 1, b + 1),
                "poly": poly_json(phat.mat.get(a, b)),
            }));
        }
    }
    if !phat.nonunique.is_empty() {
        report.diagnostics.push("some entries have no unique expression; a deterministic representative was used".into());
    }
    if !euler_applicable {
        report.diagnostics.push(format!("first basis element `{}` is not the squared norm; Euler row check skipped", names[0]));
    }
    report.results = json!({
        "q": q,
        "degrees": phat.degrees,
        "variables": names,
        "matrix": matrix_json(&phat.mat),
        "entries": entries,
        "nonunique": pairs_1based(&phat.nonunique),
        "grading_violations": pairs_1based(&grading),
        "euler_row": {
            "applicable": euler_applicable,
            "failures": euler_failures.iter().map(|a| a + 1).collect::<Vec<_>>(),
        },
    });
    let status = CommandStatus::Ok.and(grading.is_empty() && euler_failures.is_empty());
    Ok(CommandOutput { report, status })
}

pub fn run_relations(problem: &ProblemSpec, max_degree: u32, opts: RunOptions) -> Result<CommandOutput, CommandError> {
    let mut report = Report::new("relations", &problem.digest);
    let mut clock = Clock::new(opts);
    let rels = find_relations(&problem.mib, max_degree);
    clock.lap(&mut report, "search");
    report.diagnostics.push(format!("search is complete up to weighted degree {max_degree} only"));
    report.results = json!({
        "max_degree": max_degree,
        "count": rels.len(),
        "coregular_up_to_bound": rels.is_empty(),
        "relations": rels.iter().map(|r| json!({
            "weighted_degree": r.weighted_degree,
            "poly": poly_json(&r.poly),
        })).collect::<Vec<_>>(),
    });
    Ok(CommandOutput { report, status: CommandStatus::Ok })
}

fn inputs<'a>(problem: &'a ProblemSpec, phat: &'a PHatMatrix) -> StratumInputs<'a> {
    StratumInputs {
        mib: &problem.mib,
        phat,
        relations: &problem.relations,
        candidate_factors: &problem.candidate_factors,
    }
}

/// JSON form of a parametrization, shared by `stratum` and the C API.
pub fn parametrization_json(k: usize, job: &StratumJob, par: &Parametrization) -> Value {
    let basis: Vec<Vec<String>> = par
        .subspace
        .vectors()
        .iter()
        .map(|v| v.iter().map(Scalar::to_string).collect())
        .collect();
    let zero_coords: Option<Vec<usize>> = par.subspace.coordinate_axes().map(|axes| {
        (0..par.subspace.ambient_dim()).filter(|i| !axes.contains(i)).map(|i| i + 1).collect()
    });
    json!({
        "job": k,
        "name": job.name,
        "subspace": {
            "dim": par.subspace.dim(),
            "labels": par.subspace.labels(),
            "basis": basis,
            "zero_coords": zero_coords,
        },
        "lambda_mib": par.lambda_mib.entries().iter().map(|e| json!({
            "name": e.name,
            "degree": e.degree,
            "poly": poly_json(&e.poly),
        })).collect::<Vec<_>>(),
        "restricted": poly_list_json(&par.restricted),
        "phi": poly_list_json(&par.phi.components),
        "phi_nonunique": par.phi.nonunique.iter().map(|a| a + 1).collect::<Vec<_>>(),
        "lambda_hat": matrix_json(&par.lambda_hat.mat),
        "jacobian": matrix_json(&par.jac),
        "factorization": {
            "holds": par.factorization.holds,
            "mismatches": pairs_1based(&par.factorization.mismatches),
        },
        "relations_on_phi": {
            "all_vanish": par.relations_on_phi.all_vanish,
            "residuals": poly_list_json(&par.relations_on_phi.residuals),
        },
        "candidate_factors_on_phi": {
            "all_vanish": par.factors_on_phi.all_vanish,
            "residuals": poly_list_json(&par.factors_on_phi.residuals),
        },
        "delta": {
            "dim": par.delta.dim,
            "strict_inequalities": poly_list_json(&par.delta.strict),
            "rank_minors": poly_list_json(&par.delta.rank_minors),
            "unbounded": par.delta.is_unbounded(),
            "rank_everywhere": par.delta.rank_everywhere(),
        },
        "coregular_k": par.coregular_k,
        "lambda_relation_bound": par.relation_bound,
        "lambda_relations": par.lambda_relations.iter().map(|r| json!({
            "weighted_degree": r.weighted_degree,
            "poly": poly_json(&r.poly),
        })).collect::<Vec<_>>(),
    })
}

/// Runs the pipeline for job `k`. A factorization failure is returned as a
/// verification failure with the mismatching entries, not as an error.
pub fn run_stratum(problem: &ProblemSpec, k: usize, opts: RunOptions) -> Result<CommandOutput, CommandError> {
    let mut report = Report::new("stratum", &problem.digest);
    let mut clock = Clock::new(opts);
    let job = job(problem, k)?;
    let phat = pmatrix(&problem.mib)?;
    clock.lap(&mut report, "pmatrix");
    let par = match parametrize_stratum(inputs(problem, &phat), &job.basis, &job.lambda_mib) {
        Ok(p) => p,
        Err(e) => match e.root() {
            ParametrizeError::FactorizationFailed(m) => {
                clock.lap(&mut report, "parametrize");
                report.diagnostics.push(e.to_string());
                report.results = json!({
                    "job": k,
                    "name": job.name,
                    "factorization": { "holds": false, "mismatches": pairs_1based(m) },
                });
                return Ok(CommandOutput { report, status: CommandStatus::VerificationFailed });
            }
            _ => return Err(e.into()),
        },
    };
    clock.lap(&mut report, "parametrize");
    report.diagnostics.extend(par.diagnostics.iter().cloned());
    for a in &job.annotations {
        report.diagnostics.push(format!("annotation (not verified): {a}"));
    }
    report.results = parametrization_json(k, job, &par);
    let status = CommandStatus::Ok.and(par.factorization.holds && par.relations_on_phi.all_vanish);
    Ok(CommandOutput { report, status })
}

/// Divisibility of `det P̂` by each candidate factor and the checks of
/// every strata job.
pub fn run_verify(problem: &ProblemSpec, opts: RunOptions) -> Result<CommandOutput, CommandError> {
    let mut report = Report::new("verify", &problem.digest);
    let mut clock = Clock::new(opts);
    let phat = pmatrix(&problem.mib)?;
    clock.lap(&mut report, "pmatrix");
    let det = phat.mat.det().map_err(|e| CommandError::Input(e.to_string()))?;
    clock.lap(&mut report, "determinant");
    let mut ok = !det.is_zero();
    if det.is_zero() {
        report.diagnostics.push("det P̂ vanishes identically".into());
    }
    let mut factors = Vec::new();
    for (i, f) in problem.candidate_factors.iter().enumerate() {
        let quotient = det.div_exact(f).map_err(|e| CommandError::Input(e.to_string()))?;
        let divides = quotient.as_ref().is_some_and(|q| !q.is_zero());
        ok &= divides;
        factors.push(json!({
            "index": i,
            "factor": poly_json(f),
            "divides": divides,
            "quotient": quotient.as_ref().map(poly_json),
        }));
    }
    clock.lap(&mut report, "divisibility");
    let mut jobs = Vec::new();
    for (k, j) in problem.strata_jobs.iter().enumerate() {
        match parametrize_stratum(inputs(problem, &phat), &j.basis, &j.lambda_mib) {
            Ok(par) => {
                ok &= par.factorization.holds && par.relations_on_phi.all_vanish;
                jobs.push(json!({
                    "job": k,
                    "name": j.name,
                    "factorization_holds": true,
                    "relations_vanish": par.relations_on_phi.all_vanish,
                    "candidate_factors_vanish": par.factors_on_phi.residuals.iter().map(|r| r.is_zero()).collect::<Vec<_>>(),
                    "coregular_k": par.coregular_k,
                }));
            }
            Err(e) if matches!(e.root(), ParametrizeError::FactorizationFailed(_)) => {
                ok = false;
                report.diagnostics.push(format!("job {k}: {e}"));
                jobs.push(json!({ "job": k, "name": j.name, "factorization_holds": false }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    clock.lap(&mut report, "strata_jobs");
    report.results = json!({
        "det": poly_json(&det),
        "det_terms": det.num_terms(),
        "candidate_factors": factors,
        "strata_jobs": jobs,
    });
    Ok(CommandOutput { report, status: CommandStatus::Ok.and(ok) })
}

pub fn run_classify(problem: &ProblemSpec, x: &[Scalar], tol: f64, opts: RunOptions) -> Result<CommandOutput, CommandError> {
    let mut report = Report::new("classify", &problem.digest);
    let mut clock = Clock::new(opts);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CommandError::Input(format!("tolerance must be positive, got {tol}")));
    }
    let c = classify_point_x(x, &problem.mib, tol)?;
    clock.lap(&mut report, "classify");
    report.results = json!({
        "x": x.iter().map(Scalar::to_string).collect::<Vec<_>>(),
        "p": c.p.iter().map(scalar_with_text).collect::<Vec<_>>(),
        "rank": c.signature.rank,
        "psd": c.signature.psd,
        "eigenvalues": c.signature.eigenvalues,
        "tolerance": c.signature.tolerance,
    });
    Ok(CommandOutput { report, status: CommandStatus::Ok })
}

pub fn run_probe(
    problem: &ProblemSpec,
    k: usize,
    bx: &SampleBox,
    samples: usize,
    seed: u64,
    opts: RunOptions,
) -> Result<CommandOutput, CommandError> {
    let mut report = Report::new("probe", &problem.digest);
    let mut clock = Clock::new(opts);
    if samples == 0 {
        return Err(CommandError::Input("samples must be positive".into()));
    }
    let job = job(problem, k)?;
    let phat = pmatrix(&problem.mib)?;
    let par = parametrize_stratum(inputs(problem, &phat), &job.basis, &job.lambda_mib)?;
    clock.lap(&mut report, "parametrize");
    let probe = connectivity_probe(&par.delta, &par.jac, bx, samples, seed)?;
    clock.lap(&mut report, "probe");
    if probe.exact_support {
        report.diagnostics.push("a Jacobian minor is a nonzero constant; rank holds everywhere".into());
    }
    report.diagnostics.push("sampling supports, but does not prove, connectivity".into());
    report.results = json!({
        "job": k,
        "seed": seed,
        "box": bx.0.iter().map(|&(lo, hi)| [lo, hi]).collect::<Vec<_>>(),
        "tested": probe.tested,
        "in_region": probe.in_region,
        "min_rank": probe.min_rank,
        "required_rank": probe.required_rank,
        "full_rank": probe.full_rank(),
        "exact_support": probe.exact_support,
        "rank_deficient_points": probe.rank_deficient_points,
    });
    Ok(CommandOutput { report, status: CommandStatus::Ok.and(probe.full_rank()) })
}
