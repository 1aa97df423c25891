//! Sparse multivariate polynomials over [`Scalar`] with a named-variable
//! context. Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose order
//! is graded lexicographic; iteration in reverse yields the canonical
//! (descending) term order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::{AlgebraError, Scalar};

/// Exponent vector, one entry per context variable.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    pub fn var(arity: usize, i: usize) -> Self {
        let mut e = vec![0; arity];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exponents(e: Vec<u32>) -> Self {
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn weighted_degree(&self, weights: &[u32]) -> u32 {
        self.0.iter().zip(weights).map(|(e, w)| e * w).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`; caller guarantees divisibility.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

/// Graded lexicographic: total degree first, then the first differing
/// exponent (larger exponent on an earlier variable is larger).
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Ordered list of variable names shared between polynomials.
#[derive(Clone)]
pub struct Context(Arc<[String]>);

impl Context {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        Context(names.iter().map(|s| s.as_ref().to_string()).collect())
    }

    pub fn empty() -> Self {
        Context(Arc::from(Vec::<String>::new()))
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }
}

impl PartialEq for Context {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Context {}

impl fmt::Debug for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    ctx: Context,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Polynomial {
    pub fn zero(ctx: &Context) -> Self {
        Polynomial { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ctx: &Context, c: Scalar) -> Self {
        let mut p = Self::zero(ctx);
        p.add_term(Monomial::one(ctx.arity()), c);
        p
    }

    pub fn one(ctx: &Context) -> Self {
        Self::constant(ctx, Scalar::one())
    }

    pub fn var(ctx: &Context, i: usize) -> Self {
        let mut p = Self::zero(ctx);
        p.add_term(Monomial::var(ctx.arity(), i), Scalar::one());
        p
    }

    pub fn var_named(ctx: &Context, name: &str) -> Result<Self, AlgebraError> {
        let i = ctx
            .index_of(name)
            .ok_or_else(|| AlgebraError::UnknownVariable(name.to_string()))?;
        Ok(Self::var(ctx, i))
    }

    pub fn monomial(ctx: &Context, m: Monomial, c: Scalar) -> Self {
        assert_eq!(m.arity(), ctx.arity(), "monomial arity");
        let mut p = Self::zero(ctx);
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I>(ctx: &Context, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Scalar)>,
    {
        let mut p = Self::zero(ctx);
        for (m, c) in terms {
            assert_eq!(m.arity(), ctx.arity(), "monomial arity");
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c·m` in place, keeping the no-zero-coefficient invariant.
    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = &*v + &c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical (descending graded lex) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        if self.is_zero() {
            Some(Scalar::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn is_homogeneous_of(&self, degree: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == degree)
    }

    /// Weighted degree if every term shares one, `None` for mixed or zero.
    pub fn weighted_homogeneous_degree(&self, weights: &[u32]) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.weighted_degree(weights));
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    /// Splits into homogeneous components keyed by total degree.
    pub fn homogeneous_components(&self) -> BTreeMap<u32, Polynomial> {
        let mut out: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree())
                .or_insert_with(|| Polynomial::zero(&self.ctx))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    fn check_ctx(&self, other: &Polynomial) -> Result<(), AlgebraError> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(AlgebraError::ContextMismatch)
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial, AlgebraError> {
        self.check_ctx(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial, AlgebraError> {
        self.check_ctx(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, AlgebraError> {
        self.check_ctx(other)?;
        let mut out = Polynomial::zero(&self.ctx);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.checked_mul(c2)?);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Scalar) -> Polynomial {
        if s.is_zero() {
            return Polynomial::zero(&self.ctx);
        }
        Polynomial {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(&self.ctx);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative with respect to a named variable.
    pub fn diff(&self, var: &str) -> Result<Polynomial, AlgebraError> {
        let i = self
            .ctx
            .index_of(var)
            .ok_or_else(|| AlgebraError::UnknownVariable(var.to_string()))?;
        Ok(self.diff_index(i))
    }

    pub fn diff_index(&self, i: usize) -> Polynomial {
        let mut out = Polynomial::zero(&self.ctx);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            out.add_term(m2, c * &Scalar::from_int(e as i64));
        }
        out
    }

    /// Composition: variable `i` of `self` is replaced by `images[i]`. All
    /// images must share one (target) context.
    pub fn compose(&self, images: &[Polynomial], target: &Context) -> Result<Polynomial, AlgebraError> {
        if images.len() != self.ctx.arity() {
            return Err(AlgebraError::IncompleteAssignment(format!(
                "{} images for {} variables",
                images.len(),
                self.ctx.arity()
            )));
        }
        if images.iter().any(|p| p.ctx != *target) {
            return Err(AlgebraError::ContextMismatch);
        }
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|_| vec![Polynomial::one(target)])
            .collect();
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e as usize];
                if t.is_zero() {
                    break;
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Substitution by variable name. Every variable of `self` must be
    /// assigned; the assigned polynomials share the target context.
    pub fn subst(
        &self,
        assignment: &HashMap<String, Polynomial>,
        target: &Context,
    ) -> Result<Polynomial, AlgebraError> {
        let images = self
            .ctx
            .names()
            .iter()
            .map(|n| {
                assignment
                    .get(n)
                    .cloned()
                    .ok_or_else(|| AlgebraError::IncompleteAssignment(n.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.compose(&images, target)
    }

    /// Re-expresses the polynomial in another context whose names include
    /// every variable that actually occurs.
    pub fn rename_into(&self, target: &Context) -> Result<Polynomial, AlgebraError> {
        let map: Vec<Option<usize>> = self.ctx.names().iter().map(|n| target.index_of(n)).collect();
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0; target.arity()];
            for (i, &k) in m.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let j = map[i].ok_or_else(|| AlgebraError::UnknownVariable(self.ctx.names()[i].clone()))?;
                e[j] += k;
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Exact quotient `self / g`, or `None` when `g` does not divide `self`.
    ///
    /// Single-divisor division under graded lex: a singleton is a Gröbner
    /// basis of the ideal it generates, so a zero remainder is equivalent to
    /// divisibility.
    pub fn div_exact(&self, g: &Polynomial) -> Result<Option<Polynomial>, AlgebraError> {
        self.check_ctx(g)?;
        let (glm, glc) = match g.leading_term() {
            Some((m, c)) => (m.clone(), c.clone()),
            None => return Err(AlgebraError::ZeroDivisor),
        };
        let ginv = glc.inv()?;
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(&self.ctx);
        while let Some((m, c)) = rem.leading_term() {
            if !glm.divides(m) {
                return Ok(None);
            }
            let qm = glm.quotient_of(m);
            let qc = c * &ginv;
            let t = Polynomial::monomial(&self.ctx, qm.clone(), qc.clone());
            rem = &rem - &(&t * g);
            quot.add_term(qm, qc);
        }
        Ok(Some(quot))
    }

    /// Exact evaluation at a point of `Q(√d)`.
    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.ctx.arity(), "evaluation point arity");
        let mut acc = Scalar::zero();
        let mut cache: HashMap<(usize, u32), Scalar> = HashMap::new();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = cache.entry((i, e)).or_insert_with(|| point[i].pow(e));
                t = &t * &*pw;
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Floating-point evaluation; used only where the input point is itself
    /// a double (orbit-space membership of numeric p-points).
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.ctx.arity(), "evaluation point arity");
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .enumerate()
                    .fold(c.to_f64(), |acc, (i, &e)| acc * point[i].powi(e as i32))
            })
            .sum()
    }

    /// Multiplies by a nonzero scalar so that the leading coefficient is 1.
    pub fn monic(&self) -> Polynomial {
        match self.leading_term() {
            Some((_, c)) => self.scale(&c.inv().expect("nonzero leading coefficient")),
            None => self.clone(),
        }
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::io::render_poly(self))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::io::render_poly(self))
    }
}

macro_rules! poly_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                self.$checked(rhs).unwrap_or_else(|e| panic!("polynomial arithmetic: {e}"))
            }
        }
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
    };
}

poly_binop!(Add, add, checked_add);
poly_binop!(Sub, sub, checked_sub);
poly_binop!(Mul, mul, checked_mul);

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&Scalar::from_int(-1))
    }
}
