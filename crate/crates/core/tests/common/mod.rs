//! Seeded property suites shared by the `properties` and `acceptance` tests.

#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use orbitstrata::exactalg::{solve_linear, Context, LinearSolution, Monomial, PolyMatrix, Polynomial, Scalar, ScalarMatrix};
use orbitstrata::groups::{FiniteGroup, SubspaceBasis};
use orbitstrata::invariants::{gradient_gram, pmatrix, Mib, PHatMatrix};
use orbitstrata::io::{load_problem, parse_poly, render_poly, ProblemSpec};
use orbitstrata::parametrize::{compute_phi, delta_region, jacobian, lambda_pmatrix, restrict_mib, RegionDescription, GROUP_CAP};
use orbitstrata::strata::{minor_sums, sym_eigen, FloatMatrix, PointClassifier, DEFAULT_TOL};

pub const CASES: u32 = 1000;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn load(name: &str) -> ProblemSpec {
    load_problem(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub struct Outcome {
    pub name: &'static str,
    pub cases: u32,
    pub elapsed: Duration,
    pub failure: Option<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn assert_passed(&self) {
        if let Some(f) = &self.failure {
            panic!("{}: {f}", self.name);
        }
    }
}

fn run<S, F>(name: &'static str, seed: u8, strategy: S, test: F) -> Outcome
where
    S: Strategy,
    S::Value: std::fmt::Debug,
    F: Fn(S::Value) -> Result<(), TestCaseError>,
{
    let config = Config { cases: CASES, failure_persistence: None, max_shrink_iters: 64, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]));
    let start = Instant::now();
    let failure = runner.run(&strategy, test).err().map(|e| e.to_string());
    Outcome { name, cases: CASES, elapsed: start.elapsed(), failure }
}

// Strategies.

fn ratio(max: i64, den: i64) -> impl Strategy<Value = Scalar> {
    (-max..=max, 1..=den).prop_map(|(n, d)| Scalar::from_ratio(n, d))
}

fn scalar(d: u32) -> impl Strategy<Value = Scalar> {
    (ratio(9, 6), ratio(9, 6)).prop_map(move |(a, b)| {
        if d == 0 {
            a
        } else {
            &a + &(&b * &Scalar::sqrt_of(d).unwrap())
        }
    })
}

fn nonzero_scalar(d: u32) -> impl Strategy<Value = Scalar> {
    scalar(d).prop_filter("nonzero", |s| !s.is_zero())
}

fn poly(ctx: Context, d: u32, max_terms: usize, max_exp: u32) -> impl Strategy<Value = Polynomial> {
    let n = ctx.arity();
    prop::collection::vec((prop::collection::vec(0..=max_exp, n), scalar(d)), 0..=max_terms).prop_map(move |terms| {
        Polynomial::from_terms(&ctx, terms.into_iter().map(|(e, c)| (Monomial::from_exponents(e), c)))
    })
}

fn field() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![0u32, 2, 3, 5])
}

const NAMES: [&str; 8] = ["x", "y", "z", "u", "p1", "l2", "a_b", "t0"];

fn context() -> impl Strategy<Value = Context> {
    prop::sample::subsequence(NAMES.to_vec(), 1..=4).prop_map(|n| Context::new(&n))
}

fn xyz() -> Context {
    Context::new(&["x", "y", "z"])
}

fn rational_point(n: usize) -> impl Strategy<Value = Vec<Scalar>> {
    prop::collection::vec(ratio(4, 3), n)
}

// Shared fixture data.

pub struct O3 {
    pub spec: ProblemSpec,
    pub phat: PHatMatrix,
    pub gram: PolyMatrix,
    pub minor_sums: Vec<Polynomial>,
    pub basis: SubspaceBasis,
    pub lambda_mib: Mib,
    pub phi: Vec<Polynomial>,
    pub lambda_hat: PHatMatrix,
    pub region: RegionDescription,
}

pub fn o3() -> &'static O3 {
    static CELL: OnceLock<O3> = OnceLock::new();
    CELL.get_or_init(|| {
        let spec = load("o3_r8.json");
        let phat = pmatrix(&spec.mib).unwrap();
        let gram = gradient_gram(&spec.mib);
        let minor_sums = minor_sums(&phat.mat).unwrap();
        let job = spec.job(0).unwrap();
        let restricted = restrict_mib(&spec.mib, &job.basis).unwrap();
        let phi = compute_phi(&restricted, &job.lambda_mib).unwrap().components;
        let lambda_hat = lambda_pmatrix(&job.lambda_mib).unwrap();
        let jac = jacobian(&phi, job.lambda_mib.p_context());
        let region = delta_region(&lambda_hat.mat, &jac).unwrap();
        O3 {
            basis: job.basis.clone(),
            lambda_mib: job.lambda_mib.clone(),
            spec,
            phat,
            gram,
            minor_sums,
            phi,
            lambda_hat,
            region,
        }
    })
}

fn o3_classifier() -> &'static PointClassifier<'static> {
    static CELL: OnceLock<PointClassifier<'static>> = OnceLock::new();
    CELL.get_or_init(|| PointClassifier::new(&o3().spec.mib))
}

fn float(m: &ScalarMatrix) -> FloatMatrix {
    FloatMatrix::from_exact(m, true).unwrap()
}

fn eigen(m: &ScalarMatrix) -> Vec<f64> {
    sym_eigen(&float(m), 1e-14).unwrap()
}

fn scale(eigs: &[f64]) -> f64 {
    eigs.iter().fold(1.0f64, |m, x| m.max(x.abs()))
}

// Suites.

pub fn ring_laws() -> Outcome {
    let s = field().prop_flat_map(|d| {
        let p = || poly(xyz(), d, 4, 2);
        (p(), p(), p())
    });
    run("exactalg ring laws", 1, s, |(f, g, h)| {
        prop_assert_eq!(&(&f + &g) * &h, &(&f * &h) + &(&g * &h));
        prop_assert_eq!(&f * &g, &g * &f);
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert!((&f + &(-&f)).is_zero());
        Ok(())
    })
}

pub fn substitution_laws() -> Outcome {
    let target = Context::new(&["s", "t"]);
    let s = field().prop_flat_map(move |d| {
        let images = prop::collection::vec(poly(target.clone(), d, 3, 2), 3);
        (poly(xyz(), d, 3, 2), poly(xyz(), d, 3, 2), images)
    });
    run("substitution distributes", 2, s, |(f, g, images)| {
        let target = images[0].context().clone();
        let c = |p: &Polynomial| p.compose(&images, &target).unwrap();
        prop_assert_eq!(c(&(&f + &g)), &c(&f) + &c(&g));
        prop_assert_eq!(c(&(&f * &g)), &c(&f) * &c(&g));
        Ok(())
    })
}

pub fn leibniz() -> Outcome {
    let s = field().prop_flat_map(|d| (poly(xyz(), d, 4, 3), poly(xyz(), d, 4, 3), 0usize..3));
    run("Leibniz rule", 3, s, |(f, g, i)| {
        let lhs = (&f * &g).diff_index(i);
        let rhs = &(&f * &g.diff_index(i)) + &(&g * &f.diff_index(i));
        prop_assert_eq!(lhs, rhs);
        Ok(())
    })
}

pub fn division_round_trip() -> Outcome {
    let s = field().prop_flat_map(|d| {
        (poly(xyz(), d, 4, 2), poly(xyz(), d, 3, 2).prop_filter("nonzero divisor", |g| !g.is_zero()))
    });
    run("exact division round trip", 4, s, |(f, g)| {
        let prod = &f * &g;
        let q = prod.div_exact(&g).unwrap();
        prop_assert_eq!(q.as_ref(), Some(&f));
        if let Some(q) = (&prod + &Polynomial::one(g.context())).div_exact(&g).unwrap() {
            prop_assert_eq!(&q * &g, &prod + &Polynomial::one(g.context()));
        }
        Ok(())
    })
}

pub fn scalar_field_laws() -> Outcome {
    let s = field().prop_flat_map(|d| (scalar(d), scalar(d), nonzero_scalar(d)));
    run("scalar field laws", 5, s, |(a, b, c)| {
        prop_assert_eq!(a.normalized().normalized(), a.normalized());
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a * &c) / &c, a.clone());
        prop_assert_eq!((&a * &b).norm(), a.norm() * b.norm());
        prop_assert!((&c * &c.inv().unwrap()).is_one());
        Ok(())
    })
}

pub fn determinant_agreement() -> Outcome {
    let ctx = Context::new(&["x", "y"]);
    let s = (1usize..=4).prop_flat_map(move |n| prop::collection::vec(poly(ctx.clone(), 3, 2, 1), n * n));
    run("Bareiss agrees with cofactor expansion", 6, s, |entries| {
        let n = (entries.len() as f64).sqrt() as usize;
        let ctx = entries[0].context().clone();
        let rows = entries.chunks(n).map(|r| r.to_vec()).collect();
        let m = PolyMatrix::from_rows(&ctx, rows).unwrap();
        prop_assert_eq!(m.det_cofactor().unwrap(), m.det_bareiss().unwrap());
        Ok(())
    })
}

pub fn linear_solve() -> Outcome {
    let s = (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
        (prop::collection::vec(prop::collection::vec(ratio(3, 2), c), r), prop::collection::vec(ratio(3, 2), r))
    });
    run("solve_linear solutions are exact", 7, s, |(rows, b)| {
        let a = ScalarMatrix::from_rows(rows).unwrap();
        if let LinearSolution::Solved { particular, nullspace } = solve_linear(&a, &b).unwrap() {
            prop_assert_eq!(a.mul_vec(&particular), b.clone());
            for v in &nullspace {
                prop_assert!(a.mul_vec(v).iter().all(Scalar::is_zero));
            }
            prop_assert_eq!(nullspace.len() + a.rank(), a.cols());
        } else {
            prop_assert!(a.rank() < a.rows());
        }
        Ok(())
    })
}

pub fn parse_render_round_trip() -> Outcome {
    let s = (context(), field()).prop_flat_map(|(ctx, d)| (poly(ctx, d, 5, 3), Just(d)));
    run("parse/render round trip", 8, s, |(f, d)| {
        let text = render_poly(&f);
        let back = parse_poly(&text, f.context(), d).map_err(|e| TestCaseError::fail(format!("`{text}`: {e}")))?;
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(render_poly(&back), text);
        Ok(())
    })
}

pub fn phat_psd_on_image() -> Outcome {
    let o3 = o3();
    run("P̂ is PSD on the orbit-map image", 9, rational_point(8), |x| {
        let p = o3.spec.mib.eval(&x);
        let at_p = o3.phat.mat.eval(&p);
        prop_assert_eq!(&at_p, &o3.gram.eval(&x));
        let eigs = eigen(&at_p);
        prop_assert!(eigs[0] > -1e-9 * scale(&eigs), "eigenvalues {:?}", eigs);
        Ok(())
    })
}

pub fn eigen_trace_det() -> Outcome {
    let s = (1usize..=8).prop_flat_map(|n| prop::collection::vec(-5i64..=5, n * (n + 1) / 2).prop_map(move |u| (n, u)));
    run("eigenvalue sum and product", 10, s, |(n, upper)| {
        let mut m = vec![vec![0i64; n]; n];
        let mut it = upper.into_iter();
        for i in 0..n {
            for j in i..n {
                let v = it.next().unwrap();
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        let exact = ScalarMatrix::from_rows(m.iter().map(|r| r.iter().map(|&v| Scalar::from_int(v)).collect()).collect()).unwrap();
        let eigs = eigen(&exact);
        let ctx = Context::empty();
        let pm = PolyMatrix::from_rows(
            &ctx,
            (0..n).map(|i| (0..n).map(|j| Polynomial::constant(&ctx, exact.get(i, j).clone())).collect()).collect(),
        )
        .unwrap();
        let det = pm.det().unwrap().constant_value().unwrap_or_else(Scalar::zero).to_f64();
        let trace: i64 = (0..n).map(|i| m[i][i]).sum();
        let sum: f64 = eigs.iter().sum();
        let prod: f64 = eigs.iter().product();
        let abs_sum: f64 = eigs.iter().map(|x| x.abs()).sum();
        let abs_prod: f64 = eigs.iter().map(|x| x.abs().max(1.0)).product();
        prop_assert!((sum - trace as f64).abs() <= 1e-8 * abs_sum.max(1.0), "sum {} trace {}", sum, trace);
        prop_assert!((prod - det).abs() <= 1e-8 * abs_prod, "product {} det {}", prod, det);
        Ok(())
    })
}

pub fn minor_sums_match_eigenvalues() -> Outcome {
    let o3 = o3();
    run("minor sums are elementary symmetric functions", 11, rational_point(8), |x| {
        let p = o3.spec.mib.eval(&x);
        let eigs = eigen(&o3.phat.mat.eval(&p));
        let q = eigs.len();
        // e[i] = i-th elementary symmetric function, e_abs for |λ|.
        let mut e = vec![0.0f64; q + 1];
        let mut e_abs = vec![0.0f64; q + 1];
        e[0] = 1.0;
        e_abs[0] = 1.0;
        for &l in &eigs {
            for i in (1..=q).rev() {
                e[i] += l * e[i - 1];
                e_abs[i] += l.abs() * e_abs[i - 1];
            }
        }
        for (i, m) in o3.minor_sums.iter().enumerate() {
            let exact = m.eval(&p).to_f64();
            // Rounding in one eigenvalue perturbs e_k by about λ_max · e_{k-1}(|λ|).
            let bound = 1e-6 * e_abs[i + 1].max(scale(&eigs) * e_abs[i]).max(exact.abs()).max(1.0);
            prop_assert!((exact - e[i + 1]).abs() <= bound, "M_{} = {} vs {}", i + 1, exact, e[i + 1]);
        }
        Ok(())
    })
}

fn word(g: &FiniteGroup, w: &[usize]) -> orbitstrata::groups::OrthMatrix {
    let gens = g.generators();
    w.iter()
        .fold(orbitstrata::groups::OrthMatrix::identity(g.dim()), |acc, &i| gens[i % gens.len()].compose(&acc))
}

pub fn dihedral_closure() -> Outcome {
    let g = load("dihedral6.json").group(GROUP_CAP).unwrap().unwrap();
    assert_eq!(g.order(), 6);
    assert!(g.check_axioms());
    let w = || prop::collection::vec(0usize..2, 0..12);
    run("dihedral group closure", 12, (w(), w()), move |(u, v)| {
        let (a, b) = (word(&g, &u), word(&g, &v));
        prop_assert!(g.contains(&a));
        prop_assert!(g.contains(&a.compose(&b)));
        prop_assert!(g.contains(&a.inverse()));
        prop_assert!(a.compose(&a.inverse()).matrix().is_identity());
        prop_assert!(g.contains(&a.conjugate(&b)));
        Ok(())
    })
}

pub fn classify_orbit_invariance() -> Outcome {
    let spec = load("dihedral6.json");
    let g = spec.group(GROUP_CAP).unwrap().unwrap();
    let mib = spec.mib.clone();
    let pt = prop_oneof![
        rational_point(2),
        ratio(4, 3).prop_map(|a| vec![a, Scalar::zero()]),
        Just(vec![Scalar::zero(), Scalar::zero()]),
    ];
    run("classification rank is constant on orbits", 13, (pt, 0usize..6), move |(x, k)| {
        let classifier = PointClassifier::new(&mib);
        let gx = g.elements()[k].apply(&x);
        let r = classifier.classify(&x, DEFAULT_TOL).unwrap().signature.rank;
        let rg = classifier.classify(&gx, DEFAULT_TOL).unwrap().signature.rank;
        prop_assert_eq!(r, rg);
        Ok(())
    })
}

pub fn phi_consistency() -> Outcome {
    let o3 = o3();
    run("p restricted to V equals φ∘λ", 14, rational_point(5), |v| {
        let x = o3.basis.embed(&v);
        let p = o3.spec.mib.eval(&x);
        let lambda = o3.lambda_mib.eval(&v);
        let phi: Vec<Scalar> = o3.phi.iter().map(|f| f.eval(&lambda)).collect();
        prop_assert_eq!(p, phi);
        Ok(())
    })
}

fn grid_point(n: usize) -> impl Strategy<Value = Vec<Scalar>> {
    prop::collection::vec((-32i64..=32).prop_map(|k| Scalar::from_ratio(k, 16)), n)
}

pub fn delta_soundness() -> Outcome {
    let o3 = o3();
    run("Δ agrees with positive definiteness of Λ̂", 15, grid_point(4), |lambda| {
        let eigs = eigen(&o3.lambda_hat.mat.eval(&lambda));
        if o3.region.contains(&lambda, 0.0) {
            prop_assert!(eigs[0] > 0.0, "inside Δ but eigenvalues {:?}", eigs);
        } else {
            prop_assert!(eigs[0] <= 1e-9 * scale(&eigs), "outside Δ but eigenvalues {:?}", eigs);
        }
        Ok(())
    })
}

pub fn rank_coherence() -> Outcome {
    let o3 = o3();
    run("rank on the stratum equals l", 16, rational_point(5), |v| {
        let lambda = o3.lambda_mib.eval(&v);
        if o3.region.contains(&lambda, DEFAULT_TOL) {
            let x = o3.basis.embed(&v);
            let rank = o3_classifier().classify(&x, DEFAULT_TOL).unwrap().signature.rank;
            prop_assert_eq!(rank, o3.lambda_mib.len());
        }
        Ok(())
    })
}

/// The suites timed by the acceptance run.
pub fn acceptance_suites() -> Vec<fn() -> Outcome> {
    vec![
        ring_laws,
        substitution_laws,
        leibniz,
        division_round_trip,
        scalar_field_laws,
        parse_render_round_trip,
        phat_psd_on_image,
        eigen_trace_det,
        dihedral_closure,
    ]
}
