//! LDLᵀ factorization of symmetric positive-definite pentadiagonal matrices.

use crate::error::{Error, Result};

/// Symmetric matrix with two off-diagonals, stored by diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct Pentadiagonal {
    pub d0: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

impl Pentadiagonal {
    pub fn zeros(m: usize) -> Self {
        Self {
            d0: vec![0.0; m],
            d1: vec![0.0; m.saturating_sub(1)],
            d2: vec![0.0; m.saturating_sub(2)],
        }
    }

    pub fn dim(&self) -> usize {
        self.d0.len()
    }

    /// Adds `value` to entries `(i, j)` and `(j, i)`; `|i - j| <= 2`.
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        match hi - lo {
            0 => self.d0[lo] += value,
            1 => self.d1[lo] += value,
            2 => self.d2[lo] += value,
            _ => panic!("entry ({i}, {j}) outside the band"),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        match hi - lo {
            0 => self.d0[lo],
            1 => self.d1[lo],
            2 => self.d2[lo],
            _ => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let m = self.dim();
        let mut y: Vec<f64> = self.d0.iter().zip(x).map(|(a, b)| a * b).collect();
        for i in 0..m.saturating_sub(1) {
            y[i] += self.d1[i] * x[i + 1];
            y[i + 1] += self.d1[i] * x[i];
        }
        for i in 0..m.saturating_sub(2) {
            y[i] += self.d2[i] * x[i + 2];
            y[i + 2] += self.d2[i] * x[i];
        }
        y
    }

    /// Principal submatrix on rows/columns `start..end`.
    pub fn sub(&self, start: usize, end: usize) -> Self {
        let m = end - start;
        Self {
            d0: self.d0[start..end].to_vec(),
            d1: self.d1[start..start + m.saturating_sub(1)].to_vec(),
            d2: self.d2[start..start + m.saturating_sub(2)].to_vec(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LdlFactor {
    d: Vec<f64>,
    l1: Vec<f64>,
    l2: Vec<f64>,
}

impl LdlFactor {
    pub fn new(a: &Pentadiagonal) -> Result<Self> {
        let m = a.dim();
        let mut d = vec![0.0; m];
        let mut l1 = vec![0.0; m.saturating_sub(1)];
        let mut l2 = vec![0.0; m.saturating_sub(2)];
        for i in 0..m {
            let mut di = a.d0[i];
            if i >= 1 {
                di -= l1[i - 1] * l1[i - 1] * d[i - 1];
            }
            if i >= 2 {
                di -= l2[i - 2] * l2[i - 2] * d[i - 2];
            }
            if !(di > 0.0) {
                return Err(Error::NotPositiveDefinite(i));
            }
            d[i] = di;
            if i + 1 < m {
                let mut s = a.d1[i];
                if i >= 1 {
                    s -= l2[i - 1] * l1[i - 1] * d[i - 1];
                }
                l1[i] = s / di;
            }
            if i + 2 < m {
                l2[i] = a.d2[i] / di;
            }
        }
        Ok(Self { d, l1, l2 })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let m = self.d.len();
        let mut x = b.to_vec();
        for i in 0..m {
            if i >= 1 {
                x[i] -= self.l1[i - 1] * x[i - 1];
            }
            if i >= 2 {
                x[i] -= self.l2[i - 2] * x[i - 2];
            }
        }
        for i in 0..m {
            x[i] /= self.d[i];
        }
        for i in (0..m).rev() {
            if i + 1 < m {
                x[i] -= self.l1[i] * x[i + 1];
            }
            if i + 2 < m {
                x[i] -= self.l2[i] * x[i + 2];
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_spd_system() {
        let m = 40;
        let mut a = Pentadiagonal::zeros(m);
        for i in 0..m {
            a.add(i, i, 6.0 + i as f64 * 0.1);
            if i + 1 < m {
                a.add(i, i + 1, -2.0);
            }
            if i + 2 < m {
                a.add(i, i + 2, 0.5);
            }
        }
        let x: Vec<f64> = (0..m).map(|i| (i as f64 * 0.3).sin()).collect();
        let b = a.mul_vec(&x);
        let sol = LdlFactor::new(&a).unwrap().solve(&b);
        for (s, e) in sol.iter().zip(&x) {
            assert!((s - e).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_indefinite() {
        let mut a = Pentadiagonal::zeros(3);
        a.add(0, 0, 1.0);
        a.add(1, 1, -1.0);
        a.add(2, 2, 1.0);
        assert_eq!(LdlFactor::new(&a).unwrap_err(), Error::NotPositiveDefinite(1));
    }
}
