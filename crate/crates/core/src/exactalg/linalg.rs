//! Dense matrices over [`Scalar`] and exact linear solving.

use std::cmp::Ordering;

use super::{AlgebraError, Scalar};

/// Row-major dense matrix of exact scalars.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ScalarMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl ScalarMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ScalarMatrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self, AlgebraError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(AlgebraError::Shape("ragged rows".into()));
        }
        Ok(ScalarMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_columns(cols: &[Vec<Scalar>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &ScalarMatrix) -> Result<ScalarMatrix, AlgebraError> {
        if self.cols != other.rows {
            return Err(AlgebraError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j) + &(a * b);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Scalar::zero(), |acc, (a, b)| acc + &(a * b))
            })
            .collect()
    }

    pub fn sub(&self, other: &ScalarMatrix) -> ScalarMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ScalarMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j { v.is_one() } else { v.is_zero() }
                })
            })
    }

    /// `MᵀM = I`, exactly.
    pub fn is_orthogonal(&self) -> bool {
        self.rows == self.cols
            && self.transpose().mul(self).map(|m| m.is_identity()).unwrap_or(false)
    }

    /// Lexicographic comparison of the row-major entries (structural order).
    pub fn cmp_entries(&self, other: &Self) -> Ordering {
        (self.rows, self.cols).cmp(&(other.rows, other.cols)).then_with(|| {
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.cmp_structural(b))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        })
    }

    pub fn rank(&self) -> usize {
        rref(self).1.len()
    }
}

/// Reduced row echelon form and pivot columns. Pivot = first nonzero entry
/// at or below the current row, scanning columns left to right.
pub fn rref(m: &ScalarMatrix) -> (ScalarMatrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..a.cols {
                a.data.swap(p * a.cols + j, r * a.cols + j);
            }
        }
        let inv = a.get(r, c).inv().expect("nonzero pivot");
        for j in c..a.cols {
            let v = a.get(r, j) * &inv;
            a.set(r, j, v);
        }
        for i in 0..a.rows {
            if i == r || a.get(i, c).is_zero() {
                continue;
            }
            let f = a.get(i, c).clone();
            for j in c..a.cols {
                if a.get(r, j).is_zero() {
                    continue;
                }
                let v = a.get(i, j) - &(&f * a.get(r, j));
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    Solved {
        /// Free variables set to zero.
        particular: Vec<Scalar>,
        /// One vector per free column, in column order.
        nullspace: Vec<Vec<Scalar>>,
    },
    Inconsistent,
}

/// Solves `A·x = b` exactly.
pub fn solve_linear(a: &ScalarMatrix, b: &[Scalar]) -> Result<LinearSolution, AlgebraError> {
    if b.len() != a.rows {
        return Err(AlgebraError::Shape(format!(
            "rhs length {} for {} rows",
            b.len(),
            a.rows
        )));
    }
    let n = a.cols;
    let mut aug = ScalarMatrix::zeros(a.rows, n + 1);
    for i in 0..a.rows {
        for j in 0..n {
            aug.set(i, j, a.get(i, j).clone());
        }
        aug.set(i, n, b[i].clone());
    }
    let (red, pivots) = rref(&aug);
    if pivots.last() == Some(&n) {
        return Ok(LinearSolution::Inconsistent);
    }
    let mut particular = vec![Scalar::zero(); n];
    for (row, &c) in pivots.iter().enumerate() {
        particular[c] = red.get(row, n).clone();
    }
    let mut nullspace = Vec::new();
    for f in (0..n).filter(|j| !pivots.contains(j)) {
        let mut v = vec![Scalar::zero(); n];
        v[f] = Scalar::one();
        for (row, &c) in pivots.iter().enumerate() {
            v[c] = -red.get(row, f);
        }
        nullspace.push(v);
    }
    Ok(LinearSolution::Solved { particular, nullspace })
}

/// Basis of `{x | A·x = 0}`.
pub fn nullspace(a: &ScalarMatrix) -> Vec<Vec<Scalar>> {
    match solve_linear(a, &vec![Scalar::zero(); a.rows]) {
        Ok(LinearSolution::Solved { nullspace, .. }) => nullspace,
        _ => unreachable!("homogeneous systems are consistent"),
    }
}

pub fn dot(u: &[Scalar], v: &[Scalar]) -> Scalar {
    u.iter().zip(v).fold(Scalar::zero(), |acc, (a, b)| acc + &(a * b))
}
