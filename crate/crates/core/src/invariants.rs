//! Integrity bases: the P̂-matrix, decomposition of invariants over a basis
//! and degree-bounded relation search.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::exactalg::{
    nullspace, rref, solve_linear, AlgebraError, Context, LinearSolution, Monomial, PolyMatrix,
    Polynomial, Scalar, ScalarMatrix,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("basis element `{name}` is not homogeneous of declared degree {degree}")]
    NonHomogeneous { name: String, degree: u32 },
    #[error("basis element `{0}` is zero or has degree 0")]
    Degenerate(String),
    #[error("duplicate basis element name `{0}`")]
    DuplicateName(String),
    #[error("gradient product ({0},{1}) is not in the ring generated by the basis")]
    NotAnInvariantBasis(usize, usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MibEntry {
    pub name: String,
    pub degree: u32,
    pub poly: Polynomial,
}

/// An ordered integrity basis `p_1..p_q` on a variable context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mib {
    vars: Context,
    p_ctx: Context,
    entries: Vec<MibEntry>,
}

impl Mib {
    /// Validates names, degrees and homogeneity.
    pub fn new(vars: &Context, entries: Vec<MibEntry>) -> Result<Self, InvariantError> {
        for (i, e) in entries.iter().enumerate() {
            if entries[..i].iter().any(|f| f.name == e.name) {
                return Err(InvariantError::DuplicateName(e.name.clone()));
            }
            if e.poly.context() != vars {
                return Err(AlgebraError::ContextMismatch.into());
            }
            if e.poly.is_zero() || e.degree == 0 {
                return Err(InvariantError::Degenerate(e.name.clone()));
            }
            if !e.poly.is_homogeneous_of(e.degree) {
                return Err(InvariantError::NonHomogeneous { name: e.name.clone(), degree: e.degree });
            }
        }
        let names: Vec<&str> = entries.iter().map(|e| e.name.as_str()).collect();
        Ok(Mib { vars: vars.clone(), p_ctx: Context::new(&names), entries })
    }

    pub fn vars(&self) -> &Context {
        &self.vars
    }

    /// Context whose variables are the basis elements themselves.
    pub fn p_context(&self) -> &Context {
        &self.p_ctx
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[MibEntry] {
        &self.entries
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.entries.iter().map(|e| e.degree).collect()
    }

    pub fn polys(&self) -> Vec<Polynomial> {
        self.entries.iter().map(|e| e.poly.clone()).collect()
    }

    pub fn eval(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.entries.iter().map(|e| e.poly.eval(x)).collect()
    }

    /// `f ∘ p` for `f` in the p-context.
    pub fn compose(&self, f: &Polynomial) -> Result<Polynomial, AlgebraError> {
        f.compose(&self.polys(), &self.vars)
    }

    /// True when the first element is `Σ_j x_j²`.
    pub fn starts_with_norm(&self) -> bool {
        let Some(first) = self.entries.first() else { return false };
        let n = self.vars.arity();
        let norm = Polynomial::from_terms(
            &self.vars,
            (0..n).map(|i| {
                let mut e = vec![0; n];
                e[i] = 2;
                (Monomial::from_exponents(e), Scalar::one())
            }),
        );
        first.poly == norm
    }
}

/// Every exponent vector of weighted degree `target` (weights > 0), in
/// descending graded lex order. Sub-enumerations are memoized.
pub fn weighted_monomials(weights: &[u32], target: u32) -> Vec<Monomial> {
    fn rec(
        weights: &[u32],
        i: usize,
        rest: u32,
        memo: &mut HashMap<(usize, u32), Vec<Vec<u32>>>,
    ) -> Vec<Vec<u32>> {
        if i == weights.len() {
            return if rest == 0 { vec![vec![]] } else { vec![] };
        }
        if let Some(v) = memo.get(&(i, rest)) {
            return v.clone();
        }
        let mut out = Vec::new();
        for e in 0..=rest / weights[i] {
            for mut tail in rec(weights, i + 1, rest - e * weights[i], memo) {
                tail.insert(0, e);
                out.push(tail);
            }
        }
        memo.insert((i, rest), out.clone());
        out
    }
    assert!(weights.iter().all(|&w| w > 0), "weights must be positive");
    let mut memo = HashMap::new();
    let mut v: Vec<Monomial> = rec(weights, 0, target, &mut memo)
        .into_iter()
        .map(Monomial::from_exponents)
        .collect();
    v.sort_by(|a, b| b.cmp(a));
    v
}

/// Expands p-monomials into x-polynomials, caching every product built.
struct Expander<'a> {
    mib: &'a Mib,
    cache: HashMap<Monomial, Polynomial>,
}

impl<'a> Expander<'a> {
    fn new(mib: &'a Mib) -> Self {
        Expander { mib, cache: HashMap::new() }
    }

    fn expand(&mut self, m: &Monomial) -> Polynomial {
        if let Some(p) = self.cache.get(m) {
            return p.clone();
        }
        let p = match m.exponents().iter().position(|&e| e > 0) {
            None => Polynomial::one(self.mib.vars()),
            Some(i) => {
                let mut e = m.exponents().to_vec();
                e[i] -= 1;
                let rest = self.expand(&Monomial::from_exponents(e));
                &rest * &self.mib.entries[i].poly
            }
        };
        self.cache.insert(m.clone(), p.clone());
        p
    }

    /// Matrix whose column `k` holds the x-coefficients of `monos[k]`; the
    /// row index also covers every monomial of `extra`.
    fn coefficient_system(
        &mut self,
        monos: &[Monomial],
        extra: Option<&Polynomial>,
    ) -> (ScalarMatrix, BTreeMap<Monomial, usize>) {
        let expansions: Vec<Polynomial> = monos.iter().map(|m| self.expand(m)).collect();
        let mut rows: BTreeMap<Monomial, usize> = BTreeMap::new();
        for p in expansions.iter().chain(extra) {
            for (m, _) in p.terms() {
                let k = rows.len();
                rows.entry(m.clone()).or_insert(k);
            }
        }
        let mut a = ScalarMatrix::zeros(rows.len(), monos.len());
        for (j, p) in expansions.iter().enumerate() {
            for (m, c) in p.terms() {
                a.set(rows[m], j, c.clone());
            }
        }
        (a, rows)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decomposition {
    Unique(Polynomial),
    /// Several preimages exist; `solution` has free coordinates set to zero
    /// and `syzygies` spans the differences (relations among the basis).
    NonUnique { solution: Polynomial, syzygies: Vec<Polynomial> },
    /// The polynomial is not in the ring generated by the basis; `degree` is
    /// the first homogeneous component that fails.
    NotInRing { degree: u32 },
}

impl Decomposition {
    pub fn polynomial(&self) -> Option<&Polynomial> {
        match self {
            Decomposition::Unique(p) | Decomposition::NonUnique { solution: p, .. } => Some(p),
            Decomposition::NotInRing { .. } => None,
        }
    }
}

/// Reusable decomposition engine for one basis.
pub struct Decomposer<'a> {
    mib: &'a Mib,
    weights: Vec<u32>,
    expander: Expander<'a>,
}

impl<'a> Decomposer<'a> {
    pub fn new(mib: &'a Mib) -> Self {
        Decomposer { mib, weights: mib.degrees(), expander: Expander::new(mib) }
    }

    /// Writes `q` as a polynomial in the basis, one homogeneous component
    /// at a time, by matching coefficients.
    pub fn decompose(&mut self, q: &Polynomial) -> Result<Decomposition, InvariantError> {
        if q.context() != self.mib.vars() {
            return Err(AlgebraError::ContextMismatch.into());
        }
        let pctx = self.mib.p_context().clone();
        let mut solution = Polynomial::zero(&pctx);
        let mut syzygies = Vec::new();
        for (deg, comp) in q.homogeneous_components() {
            let monos = weighted_monomials(&self.weights, deg);
            if monos.is_empty() {
                return Ok(Decomposition::NotInRing { degree: deg });
            }
            let (a, rows) = self.expander.coefficient_system(&monos, Some(&comp));
            let mut b = vec![Scalar::zero(); rows.len()];
            for (m, c) in comp.terms() {
                b[rows[m]] = c.clone();
            }
            match solve_linear(&a, &b)? {
                LinearSolution::Inconsistent => return Ok(Decomposition::NotInRing { degree: deg }),
                LinearSolution::Solved { particular, nullspace } => {
                    solution = &solution
                        + &Polynomial::from_terms(&pctx, monos.iter().cloned().zip(particular));
                    for v in nullspace {
                        syzygies.push(Polynomial::from_terms(&pctx, monos.iter().cloned().zip(v)));
                    }
                }
            }
        }
        Ok(if syzygies.is_empty() {
            Decomposition::Unique(solution)
        } else {
            Decomposition::NonUnique { solution, syzygies }
        })
    }
}

pub fn decompose_invariant(q: &Polynomial, mib: &Mib) -> Result<Decomposition, InvariantError> {
    Decomposer::new(mib).decompose(q)
}

/// `Σ_j ∂_j p_a ∂_j p_b` as a symmetric matrix of x-polynomials.
pub fn gradient_gram(mib: &Mib) -> PolyMatrix {
    let n = mib.vars().arity();
    let grads: Vec<Vec<Polynomial>> = mib
        .entries()
        .iter()
        .map(|e| (0..n).map(|j| e.poly.diff_index(j)).collect())
        .collect();
    PolyMatrix::symmetric_from_fn(mib.vars(), mib.len(), |a, b| {
        Ok(grads[a]
            .iter()
            .zip(&grads[b])
            .fold(Polynomial::zero(mib.vars()), |acc, (u, v)| &acc + &(u * v)))
    })
    .expect("gram entries share the basis context")
}

/// The P̂-matrix of a basis, in the p-context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PHatMatrix {
    pub mat: PolyMatrix,
    pub degrees: Vec<u32>,
    /// Entries whose decomposition was not unique; the deterministic
    /// representative was used.
    pub nonunique: Vec<(usize, usize)>,
}

impl PHatMatrix {
    pub fn context(&self) -> &Context {
        self.mat.context()
    }

    pub fn size(&self) -> usize {
        self.mat.rows()
    }

    /// Entry positions `(a, b)` that are not weighted-homogeneous of degree
    /// `d_a + d_b − 2`. Zero entries are accepted.
    pub fn grading_violations(&self) -> Vec<(usize, usize)> {
        let q = self.size();
        let mut out = Vec::new();
        for a in 0..q {
            for b in a..q {
                let e = self.mat.get(a, b);
                if e.is_zero() {
                    continue;
                }
                let want = self.degrees[a] + self.degrees[b];
                match e.weighted_homogeneous_degree(&self.degrees) {
                    Some(w) if w + 2 == want => {}
                    _ => out.push((a, b)),
                }
            }
        }
        out
    }

    /// Rows of the form `P̂_{1a} = 2 d_a p_a` (Euler's identity when the first
    /// basis element is the squared norm). Returns the failing columns.
    pub fn euler_row_failures(&self) -> Vec<usize> {
        let ctx = self.context();
        (0..self.size())
            .filter(|&a| {
                let expect = Polynomial::var(ctx, a).scale(&Scalar::from_int(2 * self.degrees[a] as i64));
                self.mat.get(0, a) != &expect
            })
            .collect()
    }
}

pub fn pmatrix(mib: &Mib) -> Result<PHatMatrix, InvariantError> {
    let gram = gradient_gram(mib);
    let mut dec = Decomposer::new(mib);
    let q = mib.len();
    let mut upper = HashMap::new();
    let mut nonunique = Vec::new();
    for a in 0..q {
        for b in a..q {
            let p = match dec.decompose(gram.get(a, b))? {
                Decomposition::Unique(p) => p,
                Decomposition::NonUnique { solution, .. } => {
                    nonunique.push((a, b));
                    solution
                }
                Decomposition::NotInRing { .. } => return Err(InvariantError::NotAnInvariantBasis(a, b)),
            };
            upper.insert((a, b), p);
        }
    }
    let mat = PolyMatrix::symmetric_from_fn(mib.p_context(), q, |a, b| Ok(upper[&(a, b)].clone()))?;
    Ok(PHatMatrix { mat, degrees: mib.degrees(), nonunique })
}

/// A polynomial relation `F(p) = 0` holding identically on the basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub poly: Polynomial,
    pub weighted_degree: u32,
}

impl Relation {
    pub fn holds_on(&self, mib: &Mib) -> Result<bool, AlgebraError> {
        Ok(mib.compose(&self.poly)?.is_zero())
    }
}

/// Relations of weighted degree up to `max_weighted_degree` that are not
/// multiples of relations found at lower degree. Each is monic in its
/// graded-lex leading term. An empty result means no relation up to the
/// bound; nothing is claimed beyond it.
pub fn find_relations(mib: &Mib, max_weighted_degree: u32) -> Vec<Relation> {
    let weights = mib.degrees();
    let Some(&min_d) = weights.iter().min() else { return Vec::new() };
    let pctx = mib.p_context().clone();
    let mut expander = Expander::new(mib);
    let mut found: Vec<Relation> = Vec::new();
    for m in min_d..=max_weighted_degree {
        let monos = weighted_monomials(&weights, m);
        if monos.len() < 2 {
            continue;
        }
        let col: HashMap<&Monomial, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let (a, _) = expander.coefficient_system(&monos, None);
        let kernel = nullspace(&a);
        if kernel.is_empty() {
            continue;
        }
        // Multiples of earlier relations span the part already known.
        let mut ideal_rows = Vec::new();
        for r in &found {
            for mu in weighted_monomials(&weights, m - r.weighted_degree) {
                let prod = &Polynomial::monomial(&pctx, mu, Scalar::one()) * &r.poly;
                let mut v = vec![Scalar::zero(); monos.len()];
                for (t, c) in prod.terms() {
                    v[col[t]] = c.clone();
                }
                ideal_rows.push(v);
            }
        }
        let (ideal, ideal_pivots) = if ideal_rows.is_empty() {
            (ScalarMatrix::zeros(0, monos.len()), Vec::new())
        } else {
            rref(&ScalarMatrix::from_rows(ideal_rows).expect("uniform rows"))
        };
        let residues: Vec<Vec<Scalar>> = kernel
            .into_iter()
            .map(|mut v| {
                for (row, &c) in ideal_pivots.iter().enumerate() {
                    if v[c].is_zero() {
                        continue;
                    }
                    let f = v[c].clone();
                    for (j, x) in v.iter_mut().enumerate() {
                        let y = ideal.get(row, j);
                        if !y.is_zero() {
                            *x = &*x - &(&f * y);
                        }
                    }
                }
                v
            })
            .collect();
        let (red, pivots) = rref(&ScalarMatrix::from_rows(residues).expect("uniform rows"));
        for row in 0..pivots.len() {
            let poly = Polynomial::from_terms(
                &pctx,
                monos.iter().cloned().zip(red.row(row).iter().cloned()),
            );
            found.push(Relation { poly, weighted_degree: m });
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_poly;

    pub(crate) fn mib_from(vars: &[&str], entries: &[(&str, u32, &str)], d: u32) -> Mib {
        let ctx = Context::new(vars);
        let e = entries
            .iter()
            .map(|(n, deg, s)| MibEntry {
                name: n.to_string(),
                degree: *deg,
                poly: parse_poly(s, &ctx, d).unwrap(),
            })
            .collect();
        Mib::new(&ctx, e).unwrap()
    }

    fn quadratics() -> Mib {
        mib_from(&["x", "y"], &[("p1", 2, "x^2"), ("p2", 2, "x*y"), ("p3", 2, "y^2")], 0)
    }

    fn pp(s: &str, m: &Mib) -> Polynomial {
        parse_poly(s, m.p_context(), 3).unwrap()
    }

    #[test]
    fn enumeration_is_complete_and_ordered() {
        let ms = weighted_monomials(&[2, 2, 3, 3, 4], 6);
        assert!(ms.iter().all(|m| m.weighted_degree(&[2, 2, 3, 3, 4]) == 6));
        // p1^3, p1^2 p2, p1 p2^2, p2^3, p3^2, p3 p4, p4^2, p1 p5, p2 p5
        assert_eq!(ms.len(), 9);
        assert!(ms.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(weighted_monomials(&[2], 3), vec![]);
        assert_eq!(weighted_monomials(&[2, 3], 0).len(), 1);
    }

    #[test]
    fn validation() {
        let ctx = Context::new(&["x", "y"]);
        let bad = MibEntry { name: "p".into(), degree: 2, poly: parse_poly("x^2 + y", &ctx, 0).unwrap() };
        assert_eq!(
            Mib::new(&ctx, vec![bad]),
            Err(InvariantError::NonHomogeneous { name: "p".into(), degree: 2 })
        );
        let a = MibEntry { name: "p".into(), degree: 1, poly: parse_poly("x", &ctx, 0).unwrap() };
        assert_eq!(
            Mib::new(&ctx, vec![a.clone(), a]),
            Err(InvariantError::DuplicateName("p".into()))
        );
    }

    #[test]
    fn gram_of_reflection_basis() {
        let mib = mib_from(&["x", "y"], &[("p1", 1, "x"), ("p2", 2, "y^2")], 0);
        let g = gradient_gram(&mib);
        let c = mib.vars();
        assert_eq!(g.get(0, 0), &parse_poly("1", c, 0).unwrap());
        assert!(g.get(0, 1).is_zero());
        assert_eq!(g.get(1, 1), &parse_poly("4*y^2", c, 0).unwrap());
    }

    #[test]
    fn gram_of_norm() {
        let mib = mib_from(&["a", "b", "c"], &[("p1", 2, "a^2+b^2+c^2")], 0);
        let g = gradient_gram(&mib);
        assert_eq!(g.get(0, 0), &parse_poly("4*(a^2+b^2+c^2)", mib.vars(), 0).unwrap());
        let ph = pmatrix(&mib).unwrap();
        assert_eq!(ph.mat.get(0, 0), &pp("4*p1", &mib));
        assert!(mib.starts_with_norm());
        assert!(ph.euler_row_failures().is_empty());
    }

    #[test]
    fn decomposition_outcomes() {
        let mib = quadratics();
        let q = parse_poly("x^2*y^2", mib.vars(), 0).unwrap();
        match decompose_invariant(&q, &mib).unwrap() {
            Decomposition::NonUnique { solution, syzygies } => {
                assert_eq!(syzygies.len(), 1);
                assert_eq!(mib.compose(&solution).unwrap(), q);
                assert!(mib.compose(&syzygies[0]).unwrap().is_zero());
            }
            other => panic!("expected NonUnique, got {other:?}"),
        }
        let sq = mib_from(&["x"], &[("p1", 2, "x^2")], 0);
        let x = parse_poly("x", sq.vars(), 0).unwrap();
        assert_eq!(decompose_invariant(&x, &sq).unwrap(), Decomposition::NotInRing { degree: 1 });
        let c = parse_poly("3 + x^4", sq.vars(), 0).unwrap();
        assert_eq!(decompose_invariant(&c, &sq).unwrap(), Decomposition::Unique(pp("3 + p1^2", &sq)));
    }

    #[test]
    fn pmatrix_of_quadratics() {
        let mib = quadratics();
        let ph = pmatrix(&mib).unwrap();
        let expect = [
            ["4*p1", "2*p2", "0"],
            ["2*p2", "p1 + p3", "2*p2"],
            ["0", "2*p2", "4*p3"],
        ];
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(ph.mat.get(a, b), &pp(expect[a][b], &mib), "entry {a},{b}");
            }
        }
        assert!(ph.grading_violations().is_empty());
        let det = ph.mat.det().unwrap();
        assert_eq!(det, pp("16*(p1 + p3)*(p1*p3 - p2^2)", &mib));
        let q = det.div_exact(&pp("p1*p3 - p2^2", &mib)).unwrap().unwrap();
        assert_eq!(q, pp("16*(p1 + p3)", &mib));
    }

    #[test]
    fn relation_search() {
        let mib = quadratics();
        let rels = find_relations(&mib, 4);
        assert_eq!(rels.len(), 1);
        assert_eq!(rels[0].poly, pp("p1*p3 - p2^2", &mib));
        assert_eq!(rels[0].weighted_degree, 4);
        assert!(rels[0].holds_on(&mib).unwrap());
        // Degree-6 multiples are generated by the degree-4 relation.
        assert_eq!(find_relations(&mib, 8).len(), 1);
        let sq = mib_from(&["x"], &[("p1", 2, "x^2")], 0);
        assert!(find_relations(&sq, 12).is_empty());
    }

    #[test]
    fn not_an_invariant_basis() {
        // |grad x^3|^2 = 9x^4 is not a multiple of (x^2+y^2)^2.
        let bad = mib_from(&["x", "y"], &[("p1", 2, "x^2 + y^2"), ("p2", 3, "x^3")], 0);
        assert_eq!(pmatrix(&bad), Err(InvariantError::NotAnInvariantBasis(1, 1)));
    }
}
