//! Dense linear algebra over a prime field.
//!
//! Matrices are row-major `Vec<u64>` of canonical residues. Everything here
//! is deterministic: pivot choice in `rref` always takes the first nonzero
//! entry scanning down the column, so kernels and solutions are reproducible
//! across runs.

use crate::field::PrimeField;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<u64>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<u64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, f: PrimeField, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "shape mismatch in mat mul");
        let mut out = Mat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = f.add(out[(i, j)], f.mul(a, other[(k, j)]));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, f: PrimeField, v: &[u64]) -> Vec<u64> {
        assert_eq!(self.cols, v.len(), "shape mismatch in mat-vec mul");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }

    pub fn scale(&self, f: PrimeField, c: u64) -> Mat {
        let mut out = self.clone();
        for x in &mut out.data {
            *x = f.mul(*x, c);
        }
        out
    }

    pub fn add(&self, f: PrimeField, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (x, &y) in out.data.iter_mut().zip(&other.data) {
            *x = f.add(*x, y);
        }
        out
    }

    /// Stack vertically: `self` on top of `other`.
    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Mat { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Stack horizontally: `self` on the left of `other`.
    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let mut out = Mat::zero(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            out.data[i * out.cols..i * out.cols + self.cols].copy_from_slice(self.row(i));
            out.data[i * out.cols + self.cols..(i + 1) * out.cols].copy_from_slice(other.row(i));
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    /// Row-reduce in place to reduced row echelon form; returns the pivot
    /// columns in order.
    pub fn rref_in_place(&mut self, f: PrimeField) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self[(i, col)] != 0) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = f.inv(self[(r, col)]).expect("pivot is nonzero");
            for j in col..self.cols {
                self[(r, j)] = f.mul(self[(r, j)], inv);
            }
            for i in 0..self.rows {
                if i == r || self[(i, col)] == 0 {
                    continue;
                }
                let c = self[(i, col)];
                for j in col..self.cols {
                    let t = f.mul(c, self[(r, j)]);
                    self[(i, j)] = f.sub(self[(i, j)], t);
                }
            }
            pivots.push(col);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, f: PrimeField) -> usize {
        let mut m = self.clone();
        m.rref_in_place(f).len()
    }

    /// Basis of the right kernel, as rows of the returned matrix. The basis
    /// is the standard one indexed by free columns (unit at the free column,
    /// back-filled pivot coordinates), so it is canonical.
    pub fn kernel(&self, f: PrimeField) -> Mat {
        let mut m = self.clone();
        let pivots = m.rref_in_place(f);
        let mut pivot_of_col = vec![usize::MAX; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            pivot_of_col[c] = r;
        }
        let free: Vec<usize> =
            (0..self.cols).filter(|c| pivot_of_col[*c] == usize::MAX).collect();
        let mut out = Mat::zero(free.len(), self.cols);
        for (k, &fc) in free.iter().enumerate() {
            out[(k, fc)] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                out[(k, pc)] = f.neg(m[(r, fc)]);
            }
        }
        out
    }

    /// Solve `self * x = b` for one `x`, if consistent.
    pub fn solve(&self, f: PrimeField, b: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(self.rows, b.len(), "rhs length mismatch");
        let rhs = Mat { rows: self.rows, cols: 1, data: b.to_vec() };
        let mut aug = self.hstack(&rhs);
        let pivots = aug.rref_in_place(f);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0u64; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug[(r, self.cols)];
        }
        Some(x)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }
}

/// An incrementally built row space: rows are absorbed one at a time and
/// kept forward-reduced, so rank growth can be tested deterministically.
pub struct RowSpan {
    field: PrimeField,
    rows: Vec<(usize, Vec<u64>)>,
}

impl RowSpan {
    pub fn new(field: PrimeField) -> Self {
        RowSpan { field, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `row` against the stored rows and absorb what remains.
    /// Returns true when the row enlarged the span. Stored rows are kept
    /// mutually reduced (zero at every other stored pivot), so one pass
    /// suffices.
    pub fn absorb(&mut self, row: &[u64]) -> bool {
        let f = self.field;
        let mut v = row.to_vec();
        for (p, r) in &self.rows {
            let c = v[*p];
            if c == 0 {
                continue;
            }
            for (x, y) in v.iter_mut().zip(r) {
                *x = f.sub(*x, f.mul(c, *y));
            }
        }
        let Some(p) = v.iter().position(|&c| c != 0) else {
            return false;
        };
        let inv = f.inv(v[p]).expect("leading coefficient is nonzero");
        for x in v.iter_mut() {
            *x = f.mul(*x, inv);
        }
        for (_, r) in self.rows.iter_mut() {
            let c = r[p];
            if c == 0 {
                continue;
            }
            for (x, y) in r.iter_mut().zip(&v) {
                *x = f.sub(*x, f.mul(c, *y));
            }
        }
        self.rows.push((p, v));
        true
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = u64;
    fn index(&self, (i, j): (usize, usize)) -> &u64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut u64 {
        &mut self.data[i * self.cols + j]
    }
}
