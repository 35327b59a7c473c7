use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Symmetric band matrix, optionally with cyclic (periodic) wrap-around.
///
/// Entry `(i, j)` is stored once, in row `r` at offset `d <= bandwidth`
/// such that `j = r + d` (mod `dim` when cyclic). For cyclic storage the
/// shorter way around the cycle is used, ties going to the smaller row.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBandMatrix {
    dim: usize,
    bandwidth: usize,
    cyclic: bool,
    data: Vec<f64>,
}

impl SymBandMatrix {
    pub fn zeros(dim: usize, bandwidth: usize, cyclic: bool) -> Self {
        Self {
            dim,
            bandwidth,
            cyclic,
            data: vec![0.0; dim * (bandwidth + 1)],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, 0, false);
        for i in 0..dim {
            m.add(i, i, 1.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let n = self.dim;
        let (row, d) = if self.cyclic {
            let fwd = (j + n - i % n) % n;
            let back = (n - fwd) % n;
            if fwd < back || (fwd == back && i <= j) {
                (i, fwd)
            } else {
                (j, back)
            }
        } else if i <= j {
            (i, j - i)
        } else {
            (j, i - j)
        };
        (d <= self.bandwidth).then_some(row * (self.bandwidth + 1) + d)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Adds `v` to entry `(i, j)` (and therefore to `(j, i)`).
    ///
    /// # Panics
    /// If the entry lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside band {}", self.bandwidth));
        self.data[s] += v;
    }

    /// Stored entries as `(row, column, value)`, each unordered pair once.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let w = self.bandwidth + 1;
        (0..self.dim).flat_map(move |r| {
            (0..w).filter_map(move |d| {
                let c = if self.cyclic {
                    (r + d) % self.dim
                } else {
                    r + d
                };
                if c >= self.dim || self.slot(r, c) != Some(r * w + d) {
                    return None;
                }
                Some((r, c, self.data[r * w + d]))
            })
        })
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        for (r, c, v) in self.entries() {
            y[r] += v * x[c];
            if r != c {
                y[c] += v * x[r];
            }
        }
        y
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.matvec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] += v;
            if r != c {
                m[(c, r)] += v;
            }
        }
        m
    }

    /// Max absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Band Cholesky factorization test; cyclic matrices are factored densely.
    pub fn is_positive_definite(&self) -> bool {
        if self.cyclic {
            return self.to_dense().cholesky().is_some();
        }
        let n = self.dim;
        let b = self.bandwidth;
        // lower factor in band layout: l[i][k] = L(i, i - k)
        let mut l = vec![vec![0.0; b + 1]; n];
        for i in 0..n {
            for k in (0..=b.min(i)).rev() {
                let j = i - k;
                let mut s = self.get(i, j);
                for m in 1..=b {
                    if m + k > b || m > j {
                        break;
                    }
                    s -= l[i][k + m] * l[j][m];
                }
                if k == 0 {
                    if s.is_nan() || s <= 0.0 {
                        return false;
                    }
                    l[i][0] = s.sqrt();
                } else {
                    l[i][k] = s / l[j][0];
                }
            }
        }
        true
    }

    /// Principal submatrix obtained by deleting the listed indices.
    pub fn remove(&self, drop: &[usize]) -> Result<Self> {
        if self.cyclic {
            return Err(Error::Configuration(
                "cannot remove rows from a cyclic band matrix".into(),
            ));
        }
        let keep: Vec<usize> = (0..self.dim).filter(|i| !drop.contains(i)).collect();
        let mut map = vec![usize::MAX; self.dim];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut out = Self::zeros(keep.len(), self.bandwidth, false);
        for (r, c, v) in self.entries() {
            if map[r] != usize::MAX && map[c] != usize::MAX {
                out.add(map[r], map[c], v);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense_sym(n: usize, b: usize, cyclic: bool, seed: &[f64]) -> (SymBandMatrix, DMatrix<f64>) {
        let mut m = SymBandMatrix::zeros(n, b, cyclic);
        let mut d = DMatrix::zeros(n, n);
        let mut k = 0;
        for i in 0..n {
            for off in 0..=b {
                let j = if cyclic { (i + off) % n } else { i + off };
                if j >= n {
                    continue;
                }
                let v = seed[k % seed.len()];
                k += 1;
                m.add(i, j, v);
                d[(i, j)] += v;
                if i != j {
                    d[(j, i)] += v;
                }
            }
        }
        (m, d)
    }

    #[test]
    fn cyclic_small_dimensions_accumulate_images() {
        // n = 3, bandwidth 2: offsets +2 and -1 are the same entry
        let mut m = SymBandMatrix::zeros(3, 2, true);
        m.add(0, 2, 1.0);
        m.add(2, 0, 2.0);
        m.add(1, 0, 0.5);
        assert_eq!(m.get(0, 2), 3.0);
        assert_eq!(m.get(2, 0), 3.0);
        let d = m.to_dense();
        assert_eq!(d[(0, 2)], 3.0);
        assert_eq!(d[(2, 0)], 3.0);
        assert_eq!(d[(0, 1)], 0.5);
    }

    #[test]
    fn band_cholesky_agrees_with_dense() {
        let mut m = SymBandMatrix::zeros(6, 2, false);
        for i in 0..6 {
            m.add(i, i, 4.0);
            if i + 1 < 6 {
                m.add(i, i + 1, -1.0);
            }
            if i + 2 < 6 {
                m.add(i, i + 2, 0.5);
            }
        }
        assert!(m.is_positive_definite());
        let mut bad = m.clone();
        bad.add(3, 3, -10.0);
        assert!(!bad.is_positive_definite());
        assert!(bad.to_dense().cholesky().is_none());
    }

    #[test]
    fn remove_boundary_rows() {
        let (m, d) = dense_sym(6, 2, false, &[1.0, 2.0, 3.0, 4.0, 5.0]);
        let r = m.remove(&[0, 5]).unwrap();
        let rd = r.to_dense();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(rd[(i, j)], d[(i + 1, j + 1)]);
            }
        }
    }

    proptest! {
        #[test]
        fn matvec_matches_dense(n in 3usize..12, cyclic: bool, seed in prop::collection::vec(-2.0f64..2.0, 1..20),
                                x in prop::collection::vec(-1.0f64..1.0, 12)) {
            let (m, d) = dense_sym(n, 2, cyclic, &seed);
            let x = &x[..n];
            let y = m.matvec(x);
            let yd = &d * nalgebra::DVector::from_column_slice(x);
            for i in 0..n {
                prop_assert!((y[i] - yd[i]).abs() < 1e-12);
            }
            prop_assert_eq!(m.to_dense(), d);
        }
    }
}
