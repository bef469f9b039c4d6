//! Complex banded LU with partial pivoting.
//!
//! Row `i` stores columns `i - kl ..= i + ku + kl`; the extra `kl` columns on
//! the right hold fill-in created by row interchanges, as in LAPACK `gbtrf`.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<Complex64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![Complex64::new(0.0, 0.0); n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn slot(&self, row: usize, col: usize) -> usize {
        let offset = col as isize - row as isize + self.kl as isize;
        assert!(
            offset >= 0 && (offset as usize) < self.width,
            "entry ({row}, {col}) outside the band"
        );
        row * self.width + offset as usize
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let lo = row.saturating_sub(self.kl);
        if col < lo || col > row + self.ku + self.kl {
            return Complex64::new(0.0, 0.0);
        }
        self.data[self.slot(row, col)]
    }

    /// Adds `value` to entry `(row, col)`; the column must lie in the declared
    /// band `row - kl ..= row + ku`.
    pub fn add(&mut self, row: usize, col: usize, value: Complex64) {
        assert!(
            col + self.kl >= row && col <= row + self.ku,
            "entry ({row}, {col}) outside the band"
        );
        let s = self.slot(row, col);
        self.data[s] += value;
    }

    /// Matrix-vector product, used for residual checks.
    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku + self.kl).min(self.n - 1);
                (lo..=hi).map(|c| self.get(i, c) * x[c]).sum()
            })
            .collect()
    }

    /// Solves `A x = b` in place. Returns `x` and the ratio of the largest to
    /// the smallest pivot modulus as a cheap conditioning indicator.
    pub fn solve(mut self, mut b: Vec<Complex64>) -> Result<(Vec<Complex64>, f64)> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let span = self.ku + self.kl;
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        if scale == 0.0 {
            return Err(Error::SingularSystem {
                condition: f64::INFINITY,
            });
        }
        let (mut pmax, mut pmin) = (0.0f64, f64::INFINITY);

        for i in 0..n {
            let last_row = (i + self.kl).min(n - 1);
            let last_col = (i + span).min(n - 1);
            let mut p = i;
            let mut best = self.get(i, i).norm();
            for r in i + 1..=last_row {
                let v = self.get(r, i).norm();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best <= f64::EPSILON * scale * 1e-3 {
                return Err(Error::SingularSystem {
                    condition: f64::INFINITY,
                });
            }
            pmax = pmax.max(best);
            pmin = pmin.min(best);
            if p != i {
                for c in i..=last_col {
                    let (a, bb) = (self.slot(i, c), self.slot(p, c));
                    self.data.swap(a, bb);
                }
                b.swap(i, p);
            }
            let pivot = self.get(i, i);
            for r in i + 1..=last_row {
                let sr = self.slot(r, i);
                let f = self.data[sr] / pivot;
                if f == Complex64::new(0.0, 0.0) {
                    continue;
                }
                self.data[sr] = Complex64::new(0.0, 0.0);
                for c in i + 1..=last_col {
                    let upper = self.data[self.slot(i, c)];
                    let s = self.slot(r, c);
                    self.data[s] -= f * upper;
                }
                let bi = b[i];
                b[r] -= f * bi;
            }
        }

        for i in (0..n).rev() {
            let last_col = (i + span).min(n - 1);
            let mut acc = b[i];
            for (c, bc) in b.iter().enumerate().take(last_col + 1).skip(i + 1) {
                acc -= self.data[self.slot(i, c)] * bc;
            }
            b[i] = acc / self.data[self.slot(i, i)];
        }
        Ok((b, pmax / pmin))
    }
}
