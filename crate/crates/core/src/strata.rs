//! Numeric layer: symmetric eigenvalues, tolerance-based rank, point
//! classification, orbit-space membership and region sampling.
//!
//! Polynomials are always evaluated exactly in `Q(√D)` and converted to
//! doubles once, except where the input point is itself given in floating
//! point.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exactalg::{combinations, AlgebraError, PolyMatrix, Polynomial, Scalar, ScalarMatrix};
use crate::invariants::{gradient_gram, Mib, PHatMatrix};
use crate::parametrize::RegionDescription;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StrataError {
    #[error("matrix is not flagged symmetric")]
    NotSymmetric,
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("Jacobi iteration did not converge in {0} sweeps")]
    NoConvergence(usize),
    #[error("matrix is {0}x{1}, not square")]
    NotSquare(usize, usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FloatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    symmetric: bool,
}

impl FloatMatrix {
    pub fn from_rows(rows: &[Vec<f64>], symmetric: bool) -> Result<Self, StrataError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(StrataError::Dimension { expected: c, got: 0 });
        }
        let mut m = FloatMatrix { rows: r, cols: c, data: rows.concat(), symmetric: false };
        if symmetric {
            m.symmetrize()?;
        }
        m.check_finite()?;
        Ok(m)
    }

    /// Converts an exact matrix; with `symmetric` the upper triangle is
    /// mirrored so the result is symmetric bit for bit.
    pub fn from_exact(m: &ScalarMatrix, symmetric: bool) -> Result<Self, StrataError> {
        let data = m.entries().iter().map(Scalar::to_f64).collect();
        let mut f = FloatMatrix { rows: m.rows(), cols: m.cols(), data, symmetric: false };
        if symmetric {
            f.symmetrize()?;
        }
        f.check_finite()?;
        Ok(f)
    }

    fn symmetrize(&mut self) -> Result<(), StrataError> {
        if self.rows != self.cols {
            return Err(StrataError::NotSquare(self.rows, self.cols));
        }
        for i in 0..self.rows {
            for j in 0..i {
                self.data[i * self.cols + j] = self.data[j * self.cols + i];
            }
        }
        self.symmetric = true;
        Ok(())
    }

    fn check_finite(&self) -> Result<(), StrataError> {
        if self.data.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(StrataError::NonFinite)
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// `M Mᵀ`, symmetric.
    pub fn gram_rows(&self) -> FloatMatrix {
        let n = self.rows;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v: f64 = (0..self.cols).map(|k| self.get(i, k) * self.get(j, k)).sum();
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        FloatMatrix { rows: n, cols: n, data, symmetric: true }
    }
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// `tol` times the Frobenius norm of the input. Eigenvalues ascending.
pub fn sym_eigen(s: &FloatMatrix, tol: f64) -> Result<Vec<f64>, StrataError> {
    if !s.symmetric {
        return Err(StrataError::NotSymmetric);
    }
    let n = s.rows;
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| s.get(i, j)).collect()).collect();
    let norm = s.data.iter().map(|x| x * x).sum::<f64>().sqrt();
    let off = |a: &Vec<Vec<f64>>| -> f64 {
        let mut acc = 0.0;
        for (i, row) in a.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i != j {
                    acc += x * x;
                }
            }
        }
        acc.sqrt()
    };
    for _ in 0..=MAX_SWEEPS {
        let o = off(&a);
        if o == 0.0 || o <= tol * norm {
            let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
            eig.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
            return Ok(eig);
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - sn * akq;
                    row[q] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - sn * aqk;
                    a[q][k] = sn * apk + c * aqk;
                }
                a[p][q] = 0.0;
                a[q][p] = 0.0;
            }
        }
    }
    Err(StrataError::NoConvergence(MAX_SWEEPS))
}

#[derive(Clone, Debug, PartialEq)]
pub struct StratumSignature {
    pub rank: usize,
    pub psd: bool,
    pub eigenvalues: Vec<f64>,
    pub tolerance: f64,
}

impl StratumSignature {
    /// An eigenvalue counts toward the rank when it exceeds
    /// `tol · max(1, max |λ|)`; PSD when none is below minus that threshold.
    pub fn from_eigenvalues(eigenvalues: Vec<f64>, tol: f64) -> Self {
        let scale = eigenvalues.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let thr = tol * scale;
        let rank = eigenvalues.iter().filter(|&&x| x > thr).count();
        let psd = eigenvalues.iter().all(|&x| x > -thr);
        StratumSignature { rank, psd, eigenvalues, tolerance: tol }
    }

    pub fn min_eigenvalue(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }
}

pub fn signature(m: &FloatMatrix, tol: f64) -> Result<StratumSignature, StrataError> {
    let eig = sym_eigen(m, 1e-14)?;
    Ok(StratumSignature::from_eigenvalues(eig, tol))
}

/// Rank of a rectangular matrix through the eigenvalues of `M Mᵀ`
/// (or `MᵀM`, whichever is smaller), with the same threshold rule.
pub fn numeric_rank(m: &FloatMatrix, tol: f64) -> Result<usize, StrataError> {
    let g = if m.rows <= m.cols {
        m.gram_rows()
    } else {
        let t = FloatMatrix {
            rows: m.cols,
            cols: m.rows,
            data: (0..m.cols).flat_map(|j| (0..m.rows).map(move |i| (i, j))).map(|(i, j)| m.get(i, j)).collect(),
            symmetric: false,
        };
        t.gram_rows()
    };
    Ok(signature(&g, tol)?.rank)
}

/// `M_1..M_q`: sums of all principal minors of each order.
pub fn minor_sums(m: &PolyMatrix) -> Result<Vec<Polynomial>, StrataError> {
    if m.rows() != m.cols() {
        return Err(StrataError::NotSquare(m.rows(), m.cols()));
    }
    let q = m.rows();
    (1..=q)
        .map(|i| {
            let mut acc = Polynomial::zero(m.context());
            for idx in combinations(q, i) {
                acc = &acc + &m.submatrix(&idx, &idx).det()?;
            }
            Ok(acc)
        })
        .collect()
}

/// Whether `M_i(p) > 0` (strict) or `M_i(p) >= 0` for `i = 1..=k`.
pub fn minor_sum_conditions(sums: &[Polynomial], point: &[Scalar], k: usize, strict: bool) -> bool {
    sums.iter().take(k).all(|s| match s.eval(point).signum() {
        Ordering::Greater => true,
        Ordering::Equal => !strict,
        Ordering::Less => false,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub p: Vec<Scalar>,
    pub signature: StratumSignature,
}

/// Gradient Gram matrix of a basis, kept for repeated classification.
pub struct PointClassifier<'a> {
    mib: &'a Mib,
    gram: PolyMatrix,
}

impl<'a> PointClassifier<'a> {
    pub fn new(mib: &'a Mib) -> Self {
        PointClassifier { mib, gram: gradient_gram(mib) }
    }

    pub fn classify(&self, x: &[Scalar], tol: f64) -> Result<Classification, StrataError> {
        let n = self.mib.vars().arity();
        if x.len() != n {
            return Err(StrataError::Dimension { expected: n, got: x.len() });
        }
        let exact = self.gram.eval(x);
        let sig = signature(&FloatMatrix::from_exact(&exact, true)?, tol)?;
        Ok(Classification { p: self.mib.eval(x), signature: sig })
    }

    pub fn gram(&self) -> &PolyMatrix {
        &self.gram
    }
}

pub fn classify_point_x(x: &[Scalar], mib: &Mib, tol: f64) -> Result<Classification, StrataError> {
    PointClassifier::new(mib).classify(x, tol)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MembershipTolerance {
    /// Bound on `|F_A(p)|` for the relations.
    pub variety: f64,
    /// PSD and rank threshold for P̂(p).
    pub psd: f64,
}

impl Default for MembershipTolerance {
    fn default() -> Self {
        MembershipTolerance { variety: 1e-9, psd: DEFAULT_TOL }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Membership {
    pub member: bool,
    pub rank: usize,
    pub min_eigenvalue: f64,
    pub relation_residuals: Vec<f64>,
}

/// Whether a numeric point `p` lies in the image of the orbit map:
/// relations vanish and `P̂(p)` is positive semidefinite.
pub fn orbit_space_membership(
    p_point: &[f64],
    phat: &PHatMatrix,
    relations: &[Polynomial],
    tol: MembershipTolerance,
) -> Result<Membership, StrataError> {
    let q = phat.size();
    if p_point.len() != q {
        return Err(StrataError::Dimension { expected: q, got: p_point.len() });
    }
    let rows: Vec<Vec<f64>> = (0..q)
        .map(|a| (0..q).map(|b| phat.mat.get(a, b).eval_f64(p_point)).collect())
        .collect();
    let sig = signature(&FloatMatrix::from_rows(&rows, true)?, tol.psd)?;
    let residuals: Vec<f64> = relations.iter().map(|f| f.eval_f64(p_point)).collect();
    let on_variety = residuals.iter().all(|r| r.abs() < tol.variety);
    let min_eig = sig.min_eigenvalue().unwrap_or(0.0);
    Ok(Membership {
        member: on_variety && sig.psd,
        rank: sig.rank,
        min_eigenvalue: min_eig,
        relation_residuals: residuals,
    })
}

/// Axis-aligned sampling box, one `[lo, hi]` per coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBox(pub Vec<(f64, f64)>);

impl SampleBox {
    pub fn uniform(dim: usize, lo: f64, hi: f64) -> Self {
        SampleBox(vec![(lo, hi); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Seeded uniform points of the box with dyadic rational coordinates
/// (53-bit resolution), so that they can be evaluated exactly.
pub fn sample_box(b: &SampleBox, n: usize, seed: u64) -> Vec<Vec<Scalar>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = BigRational::from_integer(num_bigint::BigInt::one() << 53);
    let bounds: Vec<(BigRational, BigRational)> = b
        .0
        .iter()
        .map(|&(lo, hi)| {
            let lo = BigRational::from_float(lo).unwrap_or_else(BigRational::zero);
            let hi = BigRational::from_float(hi).unwrap_or_else(BigRational::zero);
            (lo.clone(), hi - lo)
        })
        .collect();
    (0..n)
        .map(|_| {
            bounds
                .iter()
                .map(|(lo, width)| {
                    let u: u64 = rng.gen::<u64>() >> 11;
                    let t = BigRational::from_integer(u.into()) / &scale;
                    Scalar::from_rational(lo + width * t)
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionSample {
    pub tested: usize,
    pub points: Vec<Vec<Scalar>>,
    /// No sample satisfied the region's inequalities.
    pub empty: bool,
}

/// Seeded samples of the box kept when every strict inequality of the
/// region evaluates above `tol`.
pub fn sample_region(
    region: &RegionDescription,
    b: &SampleBox,
    n: usize,
    seed: u64,
    tol: f64,
) -> Result<RegionSample, StrataError> {
    if b.dim() != region.dim {
        return Err(StrataError::Dimension { expected: region.dim, got: b.dim() });
    }
    let points: Vec<Vec<Scalar>> = sample_box(b, n, seed)
        .into_iter()
        .filter(|pt| region.contains(pt, tol))
        .collect();
    let empty = points.is_empty();
    Ok(RegionSample { tested: n, points, empty })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fm(rows: &[&[f64]]) -> FloatMatrix {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        FloatMatrix::from_rows(&rows, true).unwrap()
    }

    #[test]
    fn diagonal_and_swap() {
        let e = sym_eigen(&fm(&[&[3.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 2.0]]), 1e-12).unwrap();
        assert_eq!(e, vec![1.0, 2.0, 3.0]);
        let e = sym_eigen(&fm(&[&[0.0, 1.0], &[1.0, 0.0]]), 1e-12).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lambda_hat_at_sample_point() {
        // Λ̂ at λ = (0, 1, 1, 0): blocks [1], [4], [[4, 4], [4, 20]].
        let m = fm(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 4.0, 0.0, 0.0],
            &[0.0, 0.0, 4.0, 4.0],
            &[0.0, 0.0, 4.0, 20.0],
        ]);
        let e = sym_eigen(&m, 1e-12).unwrap();
        let r80 = 80f64.sqrt();
        let want = [1.0, 12.0 - r80, 4.0, 12.0 + r80];
        let mut want = want.to_vec();
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in e.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12, "{e:?}");
        }
        // trace and determinant of the 2x2 block
        assert!(((12.0 - r80) + (12.0 + r80) - 24.0f64).abs() < 1e-12);
        assert!(((12.0 - r80) * (12.0 + r80) - 64.0f64).abs() < 1e-9);
    }

    #[test]
    fn requires_symmetric_flag() {
        let m = FloatMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]], false).unwrap();
        assert_eq!(sym_eigen(&m, 1e-12), Err(StrataError::NotSymmetric));
    }

    #[test]
    fn signature_thresholds() {
        let s = StratumSignature::from_eigenvalues(vec![-1e-12, 1e-11, 5.0], 1e-9);
        assert_eq!(s.rank, 1);
        assert!(s.psd);
        let s = StratumSignature::from_eigenvalues(vec![-1.0, 2.0], 1e-9);
        assert!(!s.psd);
        let s = StratumSignature::from_eigenvalues(vec![0.0, 0.0], 1e-9);
        assert_eq!(s.rank, 0);
    }

    #[test]
    fn rectangular_rank() {
        let m = FloatMatrix::from_rows(&[vec![1.0, 0.0]], false).unwrap();
        assert_eq!(numeric_rank(&m, 1e-9).unwrap(), 1);
        let m = FloatMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![0.0, 0.0]], false).unwrap();
        assert_eq!(numeric_rank(&m, 1e-9).unwrap(), 1);
    }

    #[test]
    fn sampling_is_deterministic_and_in_box() {
        let b = SampleBox::uniform(3, -2.0, 2.0);
        let a = sample_box(&b, 50, 7);
        assert_eq!(a, sample_box(&b, 50, 7));
        assert_ne!(a, sample_box(&b, 50, 8));
        for p in &a {
            for x in p {
                let v = x.to_f64();
                assert!((-2.0..2.0).contains(&v));
            }
        }
    }
}
