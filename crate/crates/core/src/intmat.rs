//! Small dense integer and rational matrices.
//!
//! Everything here is sized for root-datum work (dimensions below ten), so the
//! algorithms favour clarity over asymptotics.

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

pub type Rational = Ratio<i64>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<i64>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, &x) in col.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "row length mismatch");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, x);
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: i64) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> Vec<i64> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.data[idx] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in apply");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: i64) {
        if k == 0 {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(src, j);
            self.data[dst * self.cols + j] += k * v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: i64) {
        if k == 0 {
            return;
        }
        for i in 0..self.rows {
            let v = self.get(i, src);
            self.data[i * self.cols + dst] += k * v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self.data[i * self.cols + j] *= -1;
        }
    }
}

/// Smith normal form `U * A * V = D` with unimodular `U`, `V`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMat,
    pub v: IntMat,
    /// Diagonal entries `d_0 | d_1 | ...`, one per nonzero invariant factor.
    pub diagonal: Vec<i64>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }
}

pub fn smith_normal_form(a: &IntMat) -> Smith {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMat::identity(m);
    let mut v = IntMat::identity(n);
    let mut diagonal = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                let x = d.get(i, j);
                if x != 0 && best.map_or(true, |(bi, bj)| x.abs() < d.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        let mut dirty = false;
        for i in t + 1..m {
            let q = d.get(i, t) / d.get(t, t);
            d.add_row(i, t, -q);
            u.add_row(i, t, -q);
            if d.get(i, t) != 0 {
                dirty = true;
            }
        }
        for j in t + 1..n {
            let q = d.get(t, j) / d.get(t, t);
            d.add_col(j, t, -q);
            v.add_col(j, t, -q);
            if d.get(t, j) != 0 {
                dirty = true;
            }
        }
        if dirty {
            continue;
        }
        // divisibility of the trailing block
        let p = d.get(t, t);
        let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| d.get(i, j) % p != 0));
        if let Some(i) = offender {
            d.add_row(t, i, 1);
            u.add_row(t, i, 1);
            continue;
        }
        if p < 0 {
            d.negate_row(t);
            u.negate_row(t);
        }
        diagonal.push(d.get(t, t));
        t += 1;
    }
    Smith { u, v, diagonal }
}

/// Columns form a basis of the integer kernel `{x : A x = 0}`.
pub fn integer_kernel(a: &IntMat) -> IntMat {
    let s = smith_normal_form(a);
    let r = s.rank();
    let cols: Vec<Vec<i64>> = (r..a.cols).map(|j| s.v.column(j)).collect();
    IntMat::from_columns(a.cols, &cols)
}

/// Integer solution of `A x = b`, if one exists.
pub fn solve_integer(a: &IntMat, b: &[i64]) -> Option<Vec<i64>> {
    let s = smith_normal_form(a);
    let ub = s.u.apply(b);
    let mut y = vec![0i64; a.cols];
    for (i, &di) in s.diagonal.iter().enumerate() {
        if ub[i] % di != 0 {
            return None;
        }
        y[i] = ub[i] / di;
    }
    if ub[s.rank()..].iter().any(|&x| x != 0) {
        return None;
    }
    Some(s.v.apply(&y))
}

/// Row-style Hermite normal form of the lattice spanned by `rows`; zero rows dropped.
pub fn row_hermite(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let mut m = IntMat::from_rows(rows);
    let (nr, nc) = (m.rows, m.cols);
    let mut pivot_row = 0;
    for j in 0..nc {
        if pivot_row == nr {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in pivot_row..nr {
                let x = m.get(i, j);
                if x != 0 && best.map_or(true, |b| x.abs() < m.get(b, j).abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            m.swap_rows(pivot_row, b);
            let p = m.get(pivot_row, j);
            let mut done = true;
            for i in pivot_row + 1..nr {
                let q = m.get(i, j) / p;
                m.add_row(i, pivot_row, -q);
                if m.get(i, j) != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if m.get(pivot_row, j) == 0 {
            continue;
        }
        if m.get(pivot_row, j) < 0 {
            m.negate_row(pivot_row);
        }
        let p = m.get(pivot_row, j);
        for i in 0..pivot_row {
            let q = m.get(i, j).div_euclid(p);
            m.add_row(i, pivot_row, -q);
        }
        pivot_row += 1;
    }
    m.to_rows().into_iter().take(pivot_row).collect()
}

/// Rational solution of `A x = b` where the columns of `A` are linearly independent.
pub fn solve_rational(a: &IntMat, b: &[i64]) -> Option<Vec<Rational>> {
    let (m, n) = (a.rows, a.cols);
    let mut aug: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut row: Vec<Rational> = (0..n).map(|j| Rational::from_integer(a.get(i, j))).collect();
            row.push(Rational::from_integer(b[i]));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| !aug[i][c].is_zero()) else { continue };
        aug.swap(r, p);
        let inv = Rational::one() / aug[r][c];
        for x in aug[r].iter_mut() {
            *x *= inv;
        }
        for i in 0..m {
            if i != r && !aug[i][c].is_zero() {
                let f = aug[i][c];
                for k in 0..=n {
                    let sub = f * aug[r][k];
                    aug[i][k] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if aug[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = aug[row][n];
    }
    Some(x)
}

/// Rank over the rationals.
pub fn rational_rank(a: &IntMat) -> usize {
    let mut rows: Vec<Vec<Rational>> = a
        .to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(Rational::from_integer).collect())
        .collect();
    let mut rank = 0;
    for c in 0..a.cols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(rank, p);
        for i in rank + 1..rows.len() {
            if !rows[i][c].is_zero() {
                let f = rows[i][c] / rows[rank][c];
                for k in c..a.cols {
                    let sub = f * rows[rank][k];
                    rows[i][k] -= sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn is_nonneg(x: &Rational) -> bool {
    !x.is_negative()
}
