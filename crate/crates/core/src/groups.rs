//! Finite orthogonal matrix groups: closure, fixed-point subspaces,
//! isotropy subgroups, stabilizers and the induced action on a fixed space.

use std::collections::{HashSet, VecDeque};

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::exactalg::{dot, nullspace, AlgebraError, Context, Scalar, ScalarMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("matrix is not orthogonal")]
    NotOrthogonal,
    #[error("generators have inconsistent sizes")]
    SizeMismatch,
    #[error("no generators supplied")]
    NoGenerators,
    #[error("group closure exceeded {0} elements")]
    CapExceeded(usize),
    #[error("an element has infinite order (trace {0} is not an algebraic integer)")]
    InfiniteOrder(String),
    #[error("fixed space has no orthonormal basis over the coefficient field")]
    NonRationalBasis,
    #[error("not a subgroup of the ambient group")]
    NotASubgroup,
    #[error("subspace is not stable under the group")]
    NotStable,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Exactly orthogonal matrix (`MᵀM = I`).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct OrthMatrix(ScalarMatrix);

impl OrthMatrix {
    pub fn new(m: ScalarMatrix) -> Result<Self, GroupError> {
        if m.is_orthogonal() {
            Ok(OrthMatrix(m))
        } else {
            Err(GroupError::NotOrthogonal)
        }
    }

    pub fn identity(n: usize) -> Self {
        OrthMatrix(ScalarMatrix::identity(n))
    }

    pub fn diag(signs: &[i64]) -> Result<Self, GroupError> {
        let mut m = ScalarMatrix::zeros(signs.len(), signs.len());
        for (i, &s) in signs.iter().enumerate() {
            m.set(i, i, Scalar::from_int(s));
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ScalarMatrix {
        &self.0
    }

    pub fn compose(&self, other: &OrthMatrix) -> OrthMatrix {
        OrthMatrix(self.0.mul(&other.0).expect("same dimension"))
    }

    pub fn inverse(&self) -> OrthMatrix {
        OrthMatrix(self.0.transpose())
    }

    pub fn apply(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.0.mul_vec(x)
    }

    pub fn trace(&self) -> Scalar {
        (0..self.dim()).fold(Scalar::zero(), |acc, i| &acc + self.0.get(i, i))
    }

    /// `g h g⁻¹`.
    pub fn conjugate(&self, h: &OrthMatrix) -> OrthMatrix {
        self.compose(h).compose(&self.inverse())
    }
}

/// A finite group of orthogonal matrices with a deterministic element order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    dim: usize,
    elements: Vec<OrthMatrix>,
    generators: Vec<usize>,
}

impl FiniteGroup {
    pub fn trivial(n: usize) -> Self {
        FiniteGroup { dim: n, elements: vec![OrthMatrix::identity(n)], generators: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[OrthMatrix] {
        &self.elements
    }

    pub fn generator_indices(&self) -> &[usize] {
        &self.generators
    }

    pub fn generators(&self) -> Vec<&OrthMatrix> {
        self.generators.iter().map(|&i| &self.elements[i]).collect()
    }

    pub fn contains(&self, g: &OrthMatrix) -> bool {
        self.elements.contains(g)
    }

    pub fn is_subgroup_of(&self, other: &FiniteGroup) -> bool {
        self.dim == other.dim && self.elements.iter().all(|h| other.contains(h))
    }

    fn element_set(&self) -> HashSet<&OrthMatrix> {
        self.elements.iter().collect()
    }

    /// Exhaustive check of identity, closure and inverses.
    pub fn check_axioms(&self) -> bool {
        let set = self.element_set();
        set.len() == self.elements.len()
            && set.contains(&OrthMatrix::identity(self.dim))
            && self.elements.iter().all(|g| set.contains(&g.inverse()))
            && self
                .elements
                .iter()
                .all(|g| self.elements.iter().all(|h| set.contains(&g.compose(h))))
    }

    /// Subgroup from a list of elements known to be closed; every element
    /// is recorded as a generator.
    fn from_closed(dim: usize, elements: Vec<OrthMatrix>) -> Self {
        let generators = (0..elements.len()).collect();
        FiniteGroup { dim, elements, generators }
    }
}

/// Breadth-first closure. Elements appear in discovery order starting from
/// the identity; each dequeued element is multiplied by the generators in
/// the order given.
pub fn close_group(generators: &[OrthMatrix], cap: usize) -> Result<FiniteGroup, GroupError> {
    let check_order = |e: &OrthMatrix| {
        let t = e.trace();
        if is_algebraic_integer(&t) {
            Ok(())
        } else {
            Err(GroupError::InfiniteOrder(t.to_string()))
        }
    };
    let first = generators.first().ok_or(GroupError::NoGenerators)?;
    let n = first.dim();
    if generators.iter().any(|g| g.dim() != n) {
        return Err(GroupError::SizeMismatch);
    }
    let id = OrthMatrix::identity(n);
    let mut elements = vec![id.clone()];
    let mut seen: HashSet<OrthMatrix> = HashSet::from([id]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in generators {
            let e = g.compose(&elements[i]);
            if seen.insert(e.clone()) {
                check_order(&e)?;
                if elements.len() >= cap {
                    return Err(GroupError::CapExceeded(cap));
                }
                elements.push(e);
                queue.push_back(elements.len() - 1);
            }
        }
    }
    let gen_idx = generators
        .iter()
        .map(|g| elements.iter().position(|e| e == g).expect("generator in closure"))
        .collect();
    Ok(FiniteGroup { dim: n, elements, generators: gen_idx })
}

/// `a + b√D` is integral iff it is an integer (b = 0) or its minimal
/// polynomial `x² - 2a x + (a² - D b²)` has integer coefficients.
fn is_algebraic_integer(s: &Scalar) -> bool {
    let (a, b) = (s.rational_part(), s.radical_part());
    if b.is_zero() {
        return a.is_integer();
    }
    let two = BigRational::from_integer(2.into());
    let d = BigRational::from_integer(s.field().into());
    (&two * a).is_integer() && (a * a - d * b * b).is_integer()
}

/// Orthonormal basis of a linear subspace of `R^n`, with coordinate labels
/// for the induced variables on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    n: usize,
    vectors: Vec<Vec<Scalar>>,
    labels: Vec<String>,
}

impl SubspaceBasis {
    /// Checks exact orthonormality.
    pub fn new(n: usize, vectors: Vec<Vec<Scalar>>, labels: Vec<String>) -> Result<Self, GroupError> {
        if vectors.iter().any(|v| v.len() != n) || labels.len() != vectors.len() {
            return Err(GroupError::SizeMismatch);
        }
        for (i, u) in vectors.iter().enumerate() {
            for (j, v) in vectors.iter().enumerate() {
                let d = dot(u, v);
                let ok = if i == j { d.is_one() } else { d.is_zero() };
                if !ok {
                    return Err(GroupError::NonRationalBasis);
                }
            }
        }
        Ok(SubspaceBasis { n, vectors, labels })
    }

    /// Span of the coordinate axes not listed in `zero` (0-based).
    pub fn coordinate(n: usize, zero: &[usize], names: &[String]) -> Self {
        let keep: Vec<usize> = (0..n).filter(|i| !zero.contains(i)).collect();
        let vectors = keep
            .iter()
            .map(|&i| {
                let mut v = vec![Scalar::zero(); n];
                v[i] = Scalar::one();
                v
            })
            .collect();
        let labels = keep.iter().map(|&i| names[i].clone()).collect();
        SubspaceBasis { n, vectors, labels }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<Scalar>] {
        &self.vectors
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn context(&self) -> Context {
        Context::new(&self.labels)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, GroupError> {
        if labels.len() != self.vectors.len() {
            return Err(GroupError::SizeMismatch);
        }
        self.labels = labels;
        Ok(self)
    }

    /// Index of the coordinate axis each basis vector equals, if all do.
    pub fn coordinate_axes(&self) -> Option<Vec<usize>> {
        self.vectors
            .iter()
            .map(|v| {
                let nz: Vec<usize> = (0..self.n).filter(|&i| !v[i].is_zero()).collect();
                (nz.len() == 1 && v[nz[0]].is_one()).then(|| nz[0])
            })
            .collect()
    }

    /// Relabels coordinate-aligned bases after the ambient variables.
    pub fn label_from_ambient(self, names: &[String]) -> Self {
        match self.coordinate_axes() {
            Some(axes) => {
                let labels = axes.iter().map(|&i| names[i].clone()).collect();
                SubspaceBasis { labels, ..self }
            }
            None => self,
        }
    }

    /// `n × ν` matrix with the basis vectors as columns.
    pub fn matrix(&self) -> ScalarMatrix {
        ScalarMatrix::from_columns(&self.vectors, self.n)
    }

    pub fn embed(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.dim());
        let mut x = vec![Scalar::zero(); self.n];
        for (c, b) in v.iter().zip(&self.vectors) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi = &*xi + &(c * bi);
            }
        }
        x
    }
}

/// Gram–Schmidt inside `Q(√d)`; fails when a norm has no square root there.
fn orthonormalize(vs: Vec<Vec<Scalar>>, d: u32) -> Result<Vec<Vec<Scalar>>, GroupError> {
    let mut out: Vec<Vec<Scalar>> = Vec::new();
    for mut v in vs {
        for u in &out {
            let c = dot(&v, u);
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi = &*vi - &(&c * ui);
            }
        }
        let nrm = dot(&v, &v);
        let root = nrm.sqrt_in_field(d).ok_or(GroupError::NonRationalBasis)?;
        let inv = root.inv()?;
        out.push(v.iter().map(|x| x * &inv).collect());
    }
    Ok(out)
}

fn group_field(h: &FiniteGroup) -> u32 {
    h.elements
        .iter()
        .flat_map(|g| g.matrix().entries().iter().map(Scalar::field))
        .max()
        .unwrap_or(0)
}

/// `{x | h x = x for all h ∈ H}`, computed from the generators (all elements
/// when none are recorded) and orthonormalized.
pub fn fix_subspace(h: &FiniteGroup) -> Result<SubspaceBasis, GroupError> {
    let n = h.dim();
    let gens: Vec<&OrthMatrix> = if h.generators.is_empty() {
        h.elements.iter().collect()
    } else {
        h.generators()
    };
    let id = ScalarMatrix::identity(n);
    let mut stacked = Vec::new();
    for g in gens {
        let diff = g.matrix().sub(&id);
        for i in 0..n {
            stacked.push(diff.row(i).to_vec());
        }
    }
    let basis = if stacked.is_empty() {
        (0..n)
            .map(|i| {
                let mut v = vec![Scalar::zero(); n];
                v[i] = Scalar::one();
                v
            })
            .collect()
    } else {
        nullspace(&ScalarMatrix::from_rows(stacked)?)
    };
    let vectors = orthonormalize(basis, group_field(h))?;
    let labels = (1..=vectors.len()).map(|i| format!("v{i}")).collect();
    Ok(SubspaceBasis { n, vectors, labels })
}

/// `{g ∈ G | g x = x}`.
pub fn isotropy_at(g: &FiniteGroup, x: &[Scalar]) -> FiniteGroup {
    let elems = g.elements.iter().filter(|e| e.apply(x) == x).cloned().collect();
    FiniteGroup::from_closed(g.dim, elems)
}

/// `{g ∈ G | g H g⁻¹ = H}`.
pub fn stabilizer(g: &FiniteGroup, h: &FiniteGroup) -> Result<FiniteGroup, GroupError> {
    if !h.is_subgroup_of(g) {
        return Err(GroupError::NotASubgroup);
    }
    let hset = h.element_set();
    let elems = g
        .elements
        .iter()
        .filter(|s| h.elements.iter().all(|e| hset.contains(&s.conjugate(e))))
        .cloned()
        .collect();
    Ok(FiniteGroup::from_closed(g.dim, elems))
}

/// Restriction `Bᵀ s B` of every element of `stab` to `V`, duplicates removed
/// (the image is the quotient `stab / H` acting on `R^ν`).
pub fn induced_action(
    stab: &FiniteGroup,
    h: &FiniteGroup,
    v: &SubspaceBasis,
) -> Result<FiniteGroup, GroupError> {
    if !h.is_subgroup_of(stab) {
        return Err(GroupError::NotASubgroup);
    }
    let b = v.matrix();
    let bt = b.transpose();
    let mut seen = HashSet::new();
    let mut elems = Vec::new();
    for s in &stab.elements {
        let sb = s.matrix().mul(&b)?;
        let r = bt.mul(&sb)?;
        if b.mul(&r)? != sb {
            return Err(GroupError::NotStable);
        }
        let r = OrthMatrix(r);
        if seen.insert(r.clone()) {
            elems.push(r);
        }
    }
    Ok(FiniteGroup::from_closed(v.dim(), elems))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbitTypeOrder {
    /// Some conjugate of `H` is contained in `K`.
    pub leq: bool,
    /// `leq` and `|H| < |K|`.
    pub strict: bool,
}

pub fn orbit_type_leq(
    h: &FiniteGroup,
    k: &FiniteGroup,
    g: &FiniteGroup,
) -> Result<OrbitTypeOrder, GroupError> {
    if !h.is_subgroup_of(g) || !k.is_subgroup_of(g) {
        return Err(GroupError::NotASubgroup);
    }
    let kset = k.element_set();
    let leq = h.order() <= k.order()
        && g.elements.iter().any(|c| h.elements.iter().all(|e| kset.contains(&c.conjugate(e))));
    Ok(OrbitTypeOrder { leq, strict: leq && h.order() < k.order() })
}
