//! Band matrices and their LU factorization with partial pivoting.

use crate::error::{Error, Result};

/// Square matrix with `kl` sub- and `ku` super-diagonals, stored row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self {
            n,
            kl,
            ku,
            data: vec![0.0; n * (kl + ku + 1)],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.n || j >= self.n || j + self.kl < i || j > i + self.ku {
            None
        } else {
            Some(i * (self.kl + self.ku + 1) + j + self.kl - i)
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Adds `value` at `(i, j)`; panics outside the band, which is an assembly bug.
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("({i}, {j}) outside the band"));
        self.data[s] += value;
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("({i}, {j}) outside the band"));
        self.data[s] = value;
    }

    pub fn clear_row(&mut self, i: usize) {
        let w = self.kl + self.ku + 1;
        self.data[i * w..(i + 1) * w]
            .iter_mut()
            .for_each(|v| *v = 0.0);
    }

    /// Zeroes column `j` outside the diagonal, turning `x_j` into a decoupled boundary unknown.
    pub fn isolate(&mut self, j: usize) {
        for i in j.saturating_sub(self.ku)..(j + self.kl + 1).min(self.n) {
            if i != j {
                self.set(i, j, 0.0);
            }
        }
    }

    fn columns(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.kl)..(i + self.ku + 1).min(self.n)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.columns(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for (i, xi) in x.iter().enumerate().take(self.n) {
            for j in self.columns(i) {
                y[j] += self.get(i, j) * xi;
            }
        }
        y
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            data: self.data.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    /// Largest absolute entry of `self - other`; both must share size and bandwidths.
    pub fn max_entry_difference(&self, other: &BandMatrix) -> f64 {
        assert_eq!((self.n, self.kl, self.ku), (other.n, other.kl, other.ku));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn factorize(&self) -> Result<BandLu> {
        BandLu::new(self)
    }
}

/// `P A = L U` in the interchange-then-eliminate form of banded Gaussian elimination.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    /// Row `i` of `U`, columns `i ..= i + kl + ku`.
    upper: Vec<Vec<f64>>,
    /// Multipliers of step `i` for rows `i+1 ..= i+kl`.
    lower: Vec<Vec<f64>>,
    pivots: Vec<usize>,
}

impl BandLu {
    fn new(a: &BandMatrix) -> Result<Self> {
        let (n, kl, ku) = (a.n, a.kl, a.ku);
        let width = 2 * kl + ku + 1;
        // Each working row carries its starting column; rows are re-based as elimination advances.
        let mut rows: Vec<(usize, Vec<f64>)> = (0..n)
            .map(|i| {
                let start = i.saturating_sub(kl);
                let mut row = vec![0.0; width];
                for j in a.columns(i) {
                    row[j - start] = a.get(i, j);
                }
                (start, row)
            })
            .collect();
        let scale = a
            .data
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        let mut lower = Vec::with_capacity(n);
        let mut pivots = Vec::with_capacity(n);

        for i in 0..n {
            let last = (i + kl).min(n - 1);
            for row in rows.iter_mut().take(last + 1).skip(i) {
                rebase(row, i);
            }
            let p = (i..=last)
                .max_by(|&x, &y| rows[x].1[0].abs().total_cmp(&rows[y].1[0].abs()))
                .expect("non-empty range");
            let pivot = rows[p].1[0];
            if pivot.abs() <= 1e-14 * scale {
                return Err(Error::Singular(i));
            }
            rows.swap(i, p);
            pivots.push(p);
            let mut mult = Vec::with_capacity(last - i);
            let (head, tail) = rows.split_at_mut(i + 1);
            let prow = &head[i].1;
            for (_, row) in tail.iter_mut().take(last - i) {
                let f = row[0] / pivot;
                mult.push(f);
                if f != 0.0 {
                    for (r, pv) in row.iter_mut().zip(prow).skip(1) {
                        *r -= f * pv;
                    }
                }
                row[0] = 0.0;
            }
            lower.push(mult);
        }
        let upper = rows.into_iter().map(|(_, mut r)| {
            r.truncate(kl + ku + 1);
            r
        });
        Ok(Self {
            n,
            upper: upper.collect(),
            lower,
            pivots,
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut y = b.to_vec();
        for i in 0..self.n {
            y.swap(i, self.pivots[i]);
            let yi = y[i];
            for (off, f) in self.lower[i].iter().enumerate() {
                y[i + 1 + off] -= f * yi;
            }
        }
        for i in (0..self.n).rev() {
            let row = &self.upper[i];
            let mut s = y[i];
            for (off, u) in row.iter().enumerate().skip(1) {
                if i + off < self.n {
                    s -= u * y[i + off];
                }
            }
            y[i] = s / row[0];
        }
        y
    }

    /// Solves `A^T x = b` with the same factors.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let mut z = b.to_vec();
        // U^T is lower triangular: forward substitution by columns of U.
        for i in 0..self.n {
            let row = &self.upper[i];
            z[i] /= row[0];
            let zi = z[i];
            for (off, u) in row.iter().enumerate().skip(1) {
                if i + off < self.n {
                    z[i + off] -= u * zi;
                }
            }
        }
        for i in (0..self.n).rev() {
            let mut s = z[i];
            for (off, f) in self.lower[i].iter().enumerate() {
                s -= f * z[i + 1 + off];
            }
            z[i] = s;
            z.swap(i, self.pivots[i]);
        }
        z
    }
}

fn rebase(row: &mut (usize, Vec<f64>), start: usize) {
    let shift = start - row.0;
    if shift > 0 {
        row.1.rotate_left(shift);
        let w = row.1.len();
        row.1[w - shift..].iter_mut().for_each(|v| *v = 0.0);
        row.0 = start;
    }
}
