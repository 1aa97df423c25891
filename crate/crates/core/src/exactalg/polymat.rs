//! Matrices of polynomials sharing one context.

use super::{AlgebraError, Context, Polynomial, Scalar, ScalarMatrix};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    ctx: Context,
    entries: Vec<Polynomial>,
    symmetric: bool,
}

impl PolyMatrix {
    pub fn zeros(ctx: &Context, rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            ctx: ctx.clone(),
            entries: vec![Polynomial::zero(ctx); rows * cols],
            symmetric: false,
        }
    }

    pub fn from_rows(ctx: &Context, rows: Vec<Vec<Polynomial>>) -> Result<Self, AlgebraError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(AlgebraError::Shape("ragged rows".into()));
        }
        let entries: Vec<Polynomial> = rows.into_iter().flatten().collect();
        if entries.iter().any(|p| p.context() != ctx) {
            return Err(AlgebraError::ContextMismatch);
        }
        Ok(PolyMatrix { rows: r, cols: c, ctx: ctx.clone(), entries, symmetric: false })
    }

    /// Builds a symmetric matrix from its upper triangle `f(i, j)`, `i <= j`.
    pub fn symmetric_from_fn<F>(ctx: &Context, n: usize, mut f: F) -> Result<Self, AlgebraError>
    where
        F: FnMut(usize, usize) -> Result<Polynomial, AlgebraError>,
    {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            for j in i..n {
                let p = f(i, j)?;
                if p.context() != ctx {
                    return Err(AlgebraError::ContextMismatch);
                }
                m.entries[i * n + j] = p.clone();
                m.entries[j * n + i] = p;
            }
        }
        m.symmetric = true;
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Re-derives the symmetric flag from the entries.
    pub fn check_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.cols + j]
    }

    /// Sets an entry; on a symmetric matrix the mirrored entry is set too.
    pub fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        assert!(p.context() == &self.ctx, "entry context");
        if self.symmetric {
            self.entries[j * self.cols + i] = p.clone();
        }
        self.entries[i * self.cols + j] = p;
    }

    pub fn entries(&self) -> &[Polynomial] {
        &self.entries
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut t = Self::zeros(&self.ctx, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t.symmetric = self.symmetric;
        t
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix, AlgebraError> {
        if self.cols != other.rows {
            return Err(AlgebraError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.ctx != other.ctx {
            return Err(AlgebraError::ContextMismatch);
        }
        let mut out = Self::zeros(&self.ctx, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Polynomial::zero(&self.ctx);
                for k in 0..self.cols {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = &acc + &(a * b);
                }
                out.entries[i * other.cols + j] = acc;
            }
        }
        Ok(out)
    }

    /// Applies `f` to every entry, moving to the context `ctx`.
    pub fn map<F>(&self, ctx: &Context, mut f: F) -> Result<PolyMatrix, AlgebraError>
    where
        F: FnMut(&Polynomial) -> Result<Polynomial, AlgebraError>,
    {
        let entries = self.entries.iter().map(&mut f).collect::<Result<Vec<_>, _>>()?;
        if entries.iter().any(|p| p.context() != ctx) {
            return Err(AlgebraError::ContextMismatch);
        }
        Ok(PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            ctx: ctx.clone(),
            entries,
            symmetric: self.symmetric,
        })
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        let mut m = Self::zeros(&self.ctx, rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.entries[a * cols.len() + b] = self.get(i, j).clone();
            }
        }
        m.symmetric = self.symmetric && rows == cols;
        m
    }

    pub fn eval(&self, point: &[Scalar]) -> ScalarMatrix {
        let mut m = ScalarMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.symmetric && j < i {
                    let v = m.get(j, i).clone();
                    m.set(i, j, v);
                } else {
                    m.set(i, j, self.get(i, j).eval(point));
                }
            }
        }
        m
    }

    /// Exact determinant: Laplace expansion up to 4×4, fraction-free
    /// (Bareiss) elimination beyond.
    pub fn det(&self) -> Result<Polynomial, AlgebraError> {
        if self.rows != self.cols {
            return Err(AlgebraError::NotSquare(self.rows, self.cols));
        }
        if self.rows <= 4 {
            self.det_cofactor()
        } else {
            self.det_bareiss()
        }
    }

    /// Laplace expansion along the first row.
    pub fn det_cofactor(&self) -> Result<Polynomial, AlgebraError> {
        if self.rows != self.cols {
            return Err(AlgebraError::NotSquare(self.rows, self.cols));
        }
        let idx: Vec<usize> = (0..self.rows).collect();
        Ok(self.laplace(&idx, &idx))
    }

    fn laplace(&self, rows: &[usize], cols: &[usize]) -> Polynomial {
        match rows.len() {
            0 => Polynomial::one(&self.ctx),
            1 => self.get(rows[0], cols[0]).clone(),
            2 => {
                &(self.get(rows[0], cols[0]) * self.get(rows[1], cols[1]))
                    - &(self.get(rows[0], cols[1]) * self.get(rows[1], cols[0]))
            }
            _ => {
                let r0 = rows[0];
                let rest = &rows[1..];
                let mut acc = Polynomial::zero(&self.ctx);
                for (k, &c) in cols.iter().enumerate() {
                    let e = self.get(r0, c);
                    if e.is_zero() {
                        continue;
                    }
                    let sub: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                    let t = e * &self.laplace(rest, &sub);
                    acc = if k % 2 == 0 { &acc + &t } else { &acc - &t };
                }
                acc
            }
        }
    }

    /// Bareiss elimination. Each step divides exactly by the previous pivot.
    pub fn det_bareiss(&self) -> Result<Polynomial, AlgebraError> {
        if self.rows != self.cols {
            return Err(AlgebraError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Polynomial::one(&self.ctx));
        }
        let mut a: Vec<Vec<Polynomial>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let mut prev = Polynomial::one(&self.ctx);
        let mut negate = false;
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(p) => {
                        a.swap(k, p);
                        negate = !negate;
                    }
                    None => return Ok(Polynomial::zero(&self.ctx)),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = num
                        .div_exact(&prev)?
                        .ok_or_else(|| AlgebraError::Internal("Bareiss division not exact".into()))?;
                }
                a[i][k] = Polynomial::zero(&self.ctx);
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        Ok(if negate { -&d } else { d })
    }

    /// Leading principal minors of orders `1..=n`.
    pub fn leading_principal_minors(&self) -> Result<Vec<Polynomial>, AlgebraError> {
        if self.rows != self.cols {
            return Err(AlgebraError::NotSquare(self.rows, self.cols));
        }
        (1..=self.rows)
            .map(|k| {
                let idx: Vec<usize> = (0..k).collect();
                self.submatrix(&idx, &idx).det()
            })
            .collect()
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}
