//! Discrete dispersion relation of the uniform quadratic stencil.
//!
//! A Bloch wave `U_j = exp(i j μh)` solves the stencil equation when
//!
//! ```text
//! K0 - 2 K1 cos(μh) + 2 K2 cos(2μh) = Λ² (M0 + 2 M1 cos(μh) + 2 M2 cos(2μh)),   Λ = ωh.
//! ```
//!
//! The relation is solved for `d = 1 - cos(μh)` rather than `cos(μh)`, which
//! keeps full relative accuracy in `μh - Λ` for small `Λ`.

use crate::assembly::Stencil;
use crate::error::{Error, Result};
use crate::fit::loglog_fit;
use crate::quadrature::QuadratureRule;

pub const LADDER_MIN: f64 = 1e-2;
pub const LADDER_MAX: f64 = 2e-1;
pub const LADDER_MIN_POINTS: usize = 6;
pub const DEFAULT_LADDER_POINTS: usize = 8;
/// Errors at or below this level are treated as round-off and not fitted.
pub const ROUNDOFF_FLOOR: f64 = 1e-14;
pub const MIN_USABLE_POINTS: usize = 4;

/// Leading coefficients of `μh - Λ = T3 Λ³ + T5 Λ⁵ + ...`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesCoefficients {
    pub t3: f64,
    pub t5: f64,
}

/// Series coefficients for a rule used for both stiffness and mass, given
/// as raw node and weight lists of any length.
pub fn series_from_points(nodes: &[f64], weights: &[f64]) -> SeriesCoefficients {
    let (mut w_sum, mut a, mut b) = (0.0, 0.0, 0.0);
    for (&n, &w) in nodes.iter().zip(weights) {
        let n2 = n * n;
        w_sum += w;
        a += (6.0 * n2 - 6.0 * n + 1.0) * w;
        b += (180.0 * n2 * n2 - 360.0 * n2 * n + 120.0 * n2 + 60.0 * n - 17.0) * w;
    }
    SeriesCoefficients {
        t3: a / (12.0 * w_sum),
        t5: (5.0 * a * a + w_sum * b) / (1440.0 * w_sum * w_sum),
    }
}

pub fn series_coefficients(rule: &QuadratureRule) -> SeriesCoefficients {
    series_from_points(rule.nodes(), rule.weights())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionSample {
    pub lambda: f64,
    pub mu_h: f64,
}

impl DispersionSample {
    /// `μh - Λ`.
    pub fn error(&self) -> f64 {
        self.mu_h - self.lambda
    }

    pub fn abs_error(&self) -> f64 {
        self.error().abs()
    }
}

/// Frequency at which the acoustic branch reaches `μh = π`; beyond it the
/// relation has no real wavenumber. Infinite if the branch never closes.
pub fn cutoff(st: &Stencil) -> f64 {
    let num = st.k0 + 2.0 * st.k1 + 2.0 * st.k2;
    let den = st.m0 - 2.0 * st.m1 + 2.0 * st.m2;
    if den > 0.0 && num >= 0.0 {
        (num / den).sqrt()
    } else {
        f64::INFINITY
    }
}

/// Solves the dispersion relation for the acoustic branch at `Λ = lambda`.
pub fn solve_dispersion(st: &Stencil, lambda: f64) -> Result<DispersionSample> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::Domain {
            value: lambda,
            domain: "Lambda > 0",
        });
    }
    let l2 = lambda * lambda;
    let a = st.k2 - l2 * st.m2;
    let b = st.k1 + l2 * st.m1;
    let mut k_sum = st.stiffness_row_sum();
    if k_sum.abs() <= 1e-13 * st.k0.abs() {
        k_sum = 0.0;
    }
    // 4A d² + (2B - 8A) d + (row sums) = 0
    let qa = 4.0 * a;
    let qb = 2.0 * b - 8.0 * a;
    let qc = k_sum - l2 * st.mass_row_sum();

    let stop = || Error::StopBand {
        lambda,
        cutoff: cutoff(st),
    };
    let roots: Vec<f64> = if qa == 0.0 {
        if qb == 0.0 {
            return Err(stop());
        }
        vec![-qc / qb]
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            return Err(stop());
        }
        // stable pairing: q / qa is the large root, qc / q the small one
        let q = -0.5 * (qb + qb.signum() * disc.sqrt());
        if q == 0.0 {
            vec![0.0]
        } else {
            vec![q / qa, qc / q]
        }
    };

    let target = 2.0 * (0.5 * lambda).sin().powi(2);
    let best = roots
        .into_iter()
        .map(|d| if d < 0.0 && d > -1e-15 { 0.0 } else { d })
        .filter(|d| (0.0..=2.0).contains(d))
        .min_by(|x, y| {
            (x - target)
                .abs()
                .total_cmp(&(y - target).abs())
                .then(x.total_cmp(y))
        })
        .ok_or_else(stop)?;
    Ok(DispersionSample {
        lambda,
        mu_h: 2.0 * (0.5 * best).sqrt().asin(),
    })
}

/// `count` geometrically spaced values from `lo` to `hi` inclusive.
pub fn geometric_ladder(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !lo.is_finite() || !hi.is_finite() || lo <= 0.0 || hi <= lo || count < 2 {
        return Err(Error::InvalidParameter(format!(
            "ladder needs 0 < lo < hi and at least 2 points (got {lo}, {hi}, {count})"
        )));
    }
    let ratio = (hi / lo).powf(1.0 / (count - 1) as f64);
    let mut v: Vec<f64> = (0..count).map(|i| lo * ratio.powi(i as i32)).collect();
    v[count - 1] = hi;
    Ok(v)
}

/// Eight points from 1e-2 to 2e-1.
pub fn default_ladder() -> Vec<f64> {
    geometric_ladder(LADDER_MIN, LADDER_MAX, DEFAULT_LADDER_POINTS).expect("valid constants")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorOrderFit {
    pub order: f64,
    pub coefficient: f64,
    /// Ladder values that passed the round-off filter.
    pub used: Vec<f64>,
}

/// Fits `|μh - Λ| ≈ C Λ^order` over the ladder.
pub fn fit_error_order(st: &Stencil, ladder: &[f64]) -> Result<ErrorOrderFit> {
    if ladder.len() < LADDER_MIN_POINTS {
        return Err(Error::InvalidParameter(format!(
            "ladder needs at least {LADDER_MIN_POINTS} points, got {}",
            ladder.len()
        )));
    }
    let slack = 1e-12;
    if let Some(&bad) = ladder
        .iter()
        .find(|&&l| !(l >= LADDER_MIN * (1.0 - slack) && l <= LADDER_MAX * (1.0 + slack)))
    {
        return Err(Error::Domain {
            value: bad,
            domain: "[1e-2, 2e-1]",
        });
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &l in ladder {
        let e = solve_dispersion(st, l)?.abs_error();
        if e > ROUNDOFF_FLOOR {
            xs.push(l);
            ys.push(e);
        }
    }
    if xs.len() < MIN_USABLE_POINTS {
        return Err(Error::InsufficientData {
            usable: xs.len(),
            required: MIN_USABLE_POINTS,
        });
    }
    let f = loglog_fit(&xs, &ys)?;
    Ok(ErrorOrderFit {
        order: f.slope,
        coefficient: f.coefficient(),
        used: xs,
    })
}
