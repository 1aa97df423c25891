mod common;

use common::{fixture, load};
use orbitstrata::exactalg::{Context, PolyMatrix, Polynomial};
use orbitstrata::invariants::pmatrix;
use orbitstrata::io::commands::{run_pmatrix, run_stratum, run_verify, RunOptions};
use orbitstrata::io::{parse_poly, parse_problem, render_poly};
use orbitstrata::parametrize::{lambda_pmatrix, parametrize_stratum, StratumInputs};

const ALL: [&str; 4] = ["o3_r8.json", "z2_minus_identity.json", "z2_reflection.json", "dihedral6.json"];

fn matrix(ctx: &Context, d: u32, rows: &[&[&str]]) -> PolyMatrix {
    let rows = rows.iter().map(|r| r.iter().map(|e| parse_poly(e, ctx, d).unwrap()).collect()).collect();
    PolyMatrix::from_rows(ctx, rows).unwrap()
}

fn assert_entries(m: &PolyMatrix, expected: &PolyMatrix) {
    assert_eq!((m.rows(), m.cols()), (expected.rows(), expected.cols()));
    assert_eq!(m.entries(), expected.entries());
}

fn poly(s: &str, ctx: &Context, d: u32) -> Polynomial {
    parse_poly(s, ctx, d).unwrap()
}

#[test]
fn every_fixture_loads_deterministically() {
    for name in ALL {
        let a = load(name);
        let b = parse_problem(&std::fs::read(fixture(name)).unwrap()).unwrap();
        assert_eq!(a, b, "{name}");
        assert_eq!(a.digest.len(), 64);
    }
}

#[test]
fn reports_without_timings_are_byte_identical() {
    let opts = RunOptions { timings: false };
    for name in ALL {
        let p = load(name);
        let a = run_pmatrix(&p, opts).unwrap().report.to_json_pretty();
        let b = run_pmatrix(&load(name), opts).unwrap().report.to_json_pretty();
        assert_eq!(a, b, "{name}");
        assert!(a.contains("\"timings\": {}"));
    }
}

#[test]
fn o3_dimensions() {
    let p = load("o3_r8.json");
    assert_eq!(p.mib.len(), 5);
    assert_eq!(p.mib.degrees(), vec![2, 2, 3, 3, 4]);
    let job = p.job(0).unwrap();
    assert_eq!(job.basis.dim(), 5);
    assert_eq!(job.lambda_mib.len(), 4);
    assert_eq!(job.lambda_mib.degrees(), vec![1, 2, 2, 3]);
}

#[test]
fn z2_minus_identity_pmatrix_and_det() {
    let p = load("z2_minus_identity.json");
    let ctx = p.p_vars().clone();
    // Gradients (2x, 0), (y, x), (0, 2y).
    let expected = matrix(
        &ctx,
        0,
        &[&["4*p1", "2*p2", "0"], &["2*p2", "p1 + p3", "2*p2"], &["0", "2*p2", "4*p3"]],
    );
    let phat = pmatrix(&p.mib).unwrap();
    assert_entries(&phat.mat, &expected);
    let det = phat.mat.det().unwrap();
    let oracle = &poly("16*(p1 + p3)", &ctx, 0) * &poly("p1*p3 - p2^2", &ctx, 0);
    assert_eq!(det, oracle);
    let out = run_verify(&p, RunOptions { timings: false }).unwrap();
    assert_eq!(out.status.exit_code(), 0);
}

#[test]
fn dihedral_pmatrix_and_det() {
    let p = load("dihedral6.json");
    let ctx = p.p_vars().clone();
    let phat = pmatrix(&p.mib).unwrap();
    assert_entries(&phat.mat, &matrix(&ctx, 3, &[&["4*p1", "6*p2"], &["6*p2", "9*p1^2"]]));
    assert_eq!(phat.mat.det().unwrap(), poly("36*p1^3 - 36*p2^2", &ctx, 3));
    assert_eq!(p.group(4096).unwrap().unwrap().order(), 6);
}

#[test]
fn dihedral_mirror_stratum() {
    let p = load("dihedral6.json");
    let phat = pmatrix(&p.mib).unwrap();
    let job = p.job(0).unwrap();
    let inputs = StratumInputs { mib: &p.mib, phat: &phat, relations: &p.relations, candidate_factors: &p.candidate_factors };
    let par = parametrize_stratum(inputs, &job.basis, &job.lambda_mib).unwrap();
    let rendered: Vec<String> = par.phi.components.iter().map(render_poly).collect();
    assert_eq!(rendered, ["l1^2", "l1^3"]);
    assert!(par.factorization.holds);
    assert!(par.factors_on_phi.residuals.iter().all(Polynomial::is_zero));
    assert!(par.delta.is_unbounded());
    assert!(!par.delta.rank_everywhere());
}

#[test]
fn z2_reflection_pmatrix() {
    let p = load("z2_reflection.json");
    let phat = pmatrix(&p.mib).unwrap();
    assert_entries(&phat.mat, &matrix(p.p_vars(), 0, &[&["1", "0"], &["0", "4*p2"]]));
}

#[test]
fn lambda_hat_independent_of_lambda1_sign() {
    let path = fixture("o3_r8.json");
    let mut doc: serde_json::Value = serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap();
    let entry = &mut doc["strata_jobs"][0]["lambda_mib"][0]["expr"];
    let flipped = format!("-({})", entry.as_str().unwrap());
    *entry = serde_json::Value::String(flipped);
    let q = parse_problem(serde_json::to_string(&doc).unwrap().as_bytes()).unwrap();
    let p = load("o3_r8.json");
    let a = lambda_pmatrix(&p.job(0).unwrap().lambda_mib).unwrap();
    let b = lambda_pmatrix(&q.job(0).unwrap().lambda_mib).unwrap();
    assert_eq!(a.mat, b.mat);

    // φ changes only by the substitution l1 -> -l1.
    let opts = RunOptions { timings: false };
    let pa = run_stratum(&p, 0, opts).unwrap().report.results;
    let pb = run_stratum(&q, 0, opts).unwrap().report.results;
    assert_eq!(pa["lambda_hat"], pb["lambda_hat"]);
    assert_ne!(pa["phi"], pb["phi"]);
    let lctx = Context::new(&["l1", "l2", "l3", "l4"]);
    let sigma: Vec<Polynomial> = ["-l1", "l2", "l3", "l4"].iter().map(|s| poly(s, &lctx, 3)).collect();
    for (x, y) in pa["phi"].as_array().unwrap().iter().zip(pb["phi"].as_array().unwrap()) {
        let fx = poly(x["text"].as_str().unwrap(), &lctx, 3);
        let fy = poly(y["text"].as_str().unwrap(), &lctx, 3);
        assert_eq!(fx.compose(&sigma, &lctx).unwrap(), fy);
    }
}
