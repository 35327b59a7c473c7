use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    Sine,
    Cosine,
    Sine2d,
}

/// An exact eigenpair of `-Δu = λu` on the unit interval or square.
///
/// Dirichlet modes are `√2 sin(jπx)` and `2 sin(jπx) sin(kπy)`; periodic 1D
/// modes are `√2 cos(2πjx)` and `√2 sin(2πjx)`. All have unit L² norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactMode {
    pub j: usize,
    /// Second index in 2D; 0 in 1D.
    pub k: usize,
    pub lambda: f64,
    /// Wave number multiplying `πx`.
    freq: f64,
    shape: Shape,
}

impl ExactMode {
    fn dirichlet(j: usize) -> Self {
        let f = j as f64 * PI;
        Self {
            j,
            k: 0,
            lambda: f * f,
            freq: f,
            shape: Shape::Sine,
        }
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        match self.shape {
            Shape::Sine => SQRT_2 * (self.freq * x).sin(),
            Shape::Cosine => SQRT_2 * (self.freq * x).cos(),
            Shape::Sine2d => 2.0 * (self.j as f64 * PI * x).sin() * (self.k as f64 * PI * y).sin(),
        }
    }

    pub fn grad(&self, x: f64, y: f64) -> [f64; 2] {
        match self.shape {
            Shape::Sine => [SQRT_2 * self.freq * (self.freq * x).cos(), 0.0],
            Shape::Cosine => [-SQRT_2 * self.freq * (self.freq * x).sin(), 0.0],
            Shape::Sine2d => {
                let (a, b) = (self.j as f64 * PI, self.k as f64 * PI);
                [
                    2.0 * a * (a * x).cos() * (b * y).sin(),
                    2.0 * b * (a * x).sin() * (b * y).cos(),
                ]
            }
        }
    }
}

/// The `count` smallest Dirichlet eigenpairs in 1D or 2D, ascending, with
/// ties in lexicographic `(j, k)` order.
pub fn exact_spectrum(dim: usize, count: usize) -> Result<Vec<ExactMode>> {
    if count == 0 {
        return Err(Error::InvalidParameter(
            "mode count must be at least 1".into(),
        ));
    }
    match dim {
        1 => Ok((1..=count).map(ExactMode::dirichlet).collect()),
        2 => {
            // radius enclosing comfortably more than `count` lattice points
            let r = ((8.0 * (count as f64 + 4.0) / PI).sqrt()).ceil() as usize + 2;
            let mut v: Vec<(usize, usize, usize)> = (1..=r)
                .flat_map(|j| (1..=r).map(move |k| (j * j + k * k, j, k)))
                .filter(|&(s, _, _)| s <= r * r)
                .collect();
            v.sort_unstable();
            Ok(v.into_iter()
                .take(count)
                .map(|(s, j, k)| ExactMode {
                    j,
                    k,
                    lambda: s as f64 * PI * PI,
                    freq: 0.0,
                    shape: Shape::Sine2d,
                })
                .collect())
        }
        d => Err(Error::InvalidParameter(format!(
            "dimension must be 1 or 2, got {d}"
        ))),
    }
}

/// The `count` smallest nonzero periodic eigenpairs on the unit interval.
/// Each wave number contributes a cosine and a sine mode, in that order.
pub fn periodic_spectrum(count: usize) -> Vec<ExactMode> {
    (1..)
        .flat_map(|m: usize| {
            let f = 2.0 * PI * m as f64;
            [Shape::Cosine, Shape::Sine].map(|shape| ExactMode {
                j: m,
                k: 0,
                lambda: f * f,
                freq: f,
                shape,
            })
        })
        .take(count)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;

    #[test]
    fn spectrum_examples() {
        let one = exact_spectrum(1, 3).unwrap();
        assert!((one[0].lambda - 9.869604401089358).abs() < 1e-12);
        let two = exact_spectrum(2, 6).unwrap();
        assert!((two[0].lambda - 19.739208802178716).abs() < 1e-12);
        let labels: Vec<_> = two.iter().map(|m| (m.j, m.k)).collect();
        assert_eq!(labels, [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3), (3, 1)]);
        assert_eq!(two[1].lambda, two[2].lambda);
        assert!(exact_spectrum(3, 1).is_err() && exact_spectrum(1, 0).is_err());
    }

    #[test]
    fn two_d_enumeration_is_complete() {
        let got = exact_spectrum(2, 500).unwrap();
        let mut brute: Vec<usize> = (1..60)
            .flat_map(|j| (1..60).map(move |k| j * j + k * k))
            .collect();
        brute.sort_unstable();
        for (m, s) in got.iter().zip(brute) {
            assert!((m.lambda - s as f64 * PI * PI).abs() < 1e-9);
        }
    }

    #[test]
    fn modes_are_normalized_eigenfunctions() {
        let g5 = gauss_legendre(5).unwrap();
        let cells = 64;
        let integrate = |f: &dyn Fn(f64) -> f64| {
            (0..cells)
                .map(|c| g5.integrate(f, c as f64 / cells as f64, (c + 1) as f64 / cells as f64))
                .sum::<f64>()
        };
        let mut modes = exact_spectrum(1, 3).unwrap();
        modes.extend(periodic_spectrum(4));
        for m in &modes {
            assert!((integrate(&|x| m.value(x, 0.0).powi(2)) - 1.0).abs() < 1e-12);
            let g = integrate(&|x| m.grad(x, 0.0)[0].powi(2));
            assert!((g / m.lambda - 1.0).abs() < 1e-12);
        }
        let p = periodic_spectrum(3);
        assert_eq!((p[0].j, p[1].j, p[2].j), (1, 1, 2));
    }
}
