//! Newton solution of the algebraic systems whose roots are the
//! dispersion-minimizing rules.

use nalgebra::{DMatrix, DVector};

use super::{pattern_residuals, Anchor, QuadratureRule, RuleKind};
use crate::dispersion::series_from_points;
use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 50;
pub const RESIDUAL_TOLERANCE: f64 = 1e-13;

/// Seed `(n1, n2, w1, w2)` near the first closed-form two-point solution.
pub const DEFAULT_NQ2_SEED: [f64; 4] = [0.46, 0.97, 0.62, 0.38];
/// Seed `(n1, n2, w1, w2, w3)` near the right-anchored 2.5-point rule.
pub const DEFAULT_G25_SEED: [f64; 5] = [0.06, 0.54, 0.23, 0.62, 0.15];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivationTarget {
    /// Two free nodes and weights: T5 = 0 plus the three C0 cubic pattern
    /// conditions (T3 = 0 is implied and omitted).
    Nq2,
    /// Two free nodes, three weights and one node pinned to the anchor:
    /// T5 = 0 plus exactness on 1, t, t^2, t^3.
    G25(Anchor),
}

impl DerivationTarget {
    pub fn unknowns(self) -> usize {
        match self {
            DerivationTarget::Nq2 => 4,
            DerivationTarget::G25(_) => 5,
        }
    }
}

impl std::str::FromStr for DerivationTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nq2" => Ok(DerivationTarget::Nq2),
            "g25" | "g25-right" => Ok(DerivationTarget::G25(Anchor::Right)),
            "g25-left" => Ok(DerivationTarget::G25(Anchor::Left)),
            other => Err(Error::InvalidParameter(format!(
                "unknown derivation target '{other}' (expected nq2, g25, g25-left)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DerivationSystem {
    target: DerivationTarget,
}

impl DerivationSystem {
    pub fn new(target: DerivationTarget) -> Self {
        Self { target }
    }

    pub fn target(&self) -> DerivationTarget {
        self.target
    }

    fn split(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        match self.target {
            DerivationTarget::Nq2 => (vec![x[0], x[1]], vec![x[2], x[3]]),
            DerivationTarget::G25(anchor) => {
                let pin = match anchor {
                    Anchor::Right => 1.0,
                    Anchor::Left => 0.0,
                };
                (vec![x[0], x[1], pin], vec![x[2], x[3], x[4]])
            }
        }
    }

    fn check_arity(&self, x: &[f64]) -> Result<()> {
        let k = self.target.unknowns();
        if x.len() != k {
            return Err(Error::InvalidParameter(format!(
                "expected {k} unknowns, got {}",
                x.len()
            )));
        }
        Ok(())
    }

    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        let (n, w) = self.split(x);
        let t5 = series_from_points(&n, &w).t5;
        match self.target {
            DerivationTarget::Nq2 => {
                let p = pattern_residuals(&n, &w);
                vec![t5, p[0], p[1], p[2]]
            }
            DerivationTarget::G25(_) => {
                let mut r = vec![t5];
                for k in 0..4 {
                    let m: f64 = n.iter().zip(&w).map(|(&ni, &wi)| wi * ni.powi(k)).sum();
                    r.push(m - 1.0 / (k as f64 + 1.0));
                }
                r
            }
        }
    }

    /// Analytic Jacobian of [`residual`](Self::residual).
    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let (n, w) = self.split(x);
        let free_nodes = 2;
        let k = self.target.unknowns();
        let mut jac = DMatrix::zeros(k, k);

        let a: Vec<f64> = n.iter().map(|&t| 6.0 * t * t - 6.0 * t + 1.0).collect();
        let b: Vec<f64> = n
            .iter()
            .map(|&t| 180.0 * t.powi(4) - 360.0 * t.powi(3) + 120.0 * t * t + 60.0 * t - 17.0)
            .collect();
        let wsum: f64 = w.iter().sum();
        let asum: f64 = a.iter().zip(&w).map(|(ai, wi)| ai * wi).sum();
        let bsum: f64 = b.iter().zip(&w).map(|(bi, wi)| bi * wi).sum();
        let num = 5.0 * asum * asum + wsum * bsum;

        for i in 0..free_nodes {
            let t = n[i];
            let da = 12.0 * t - 6.0;
            let db = 720.0 * t.powi(3) - 1080.0 * t * t + 240.0 * t + 60.0;
            jac[(0, i)] = (10.0 * asum * da + wsum * db) * w[i] / (1440.0 * wsum * wsum);
        }
        for i in 0..w.len() {
            let dnum = 10.0 * asum * a[i] + bsum + wsum * b[i];
            jac[(0, free_nodes + i)] = (dnum * wsum - 2.0 * num) / (1440.0 * wsum * wsum * wsum);
        }

        match self.target {
            DerivationTarget::Nq2 => {
                for i in 0..2 {
                    let (t, m) = (n[i], 1.0 - n[i]);
                    jac[(1, i)] = 3.0 * m * (1.0 - 3.0 * t) * w[i];
                    jac[(2, i)] = (6.0 * t - 9.0 * t * t) * w[i];
                    jac[(3, i)] = (3.0 * t * t - 3.0 * m * m) * w[i];
                    jac[(1, 2 + i)] = 3.0 * t * m * m;
                    jac[(2, 2 + i)] = 3.0 * t * t * m;
                    jac[(3, 2 + i)] = t * t * t + m * m * m;
                }
            }
            DerivationTarget::G25(_) => {
                for row in 0..4 {
                    let p = row as i32;
                    for i in 0..free_nodes {
                        jac[(1 + row, i)] = if p == 0 {
                            0.0
                        } else {
                            p as f64 * w[i] * n[i].powi(p - 1)
                        };
                    }
                    for i in 0..3 {
                        jac[(1 + row, free_nodes + i)] = n[i].powi(p);
                    }
                }
            }
        }
        jac
    }

    fn rule_at(&self, x: &[f64]) -> Result<QuadratureRule> {
        let (n, w) = self.split(x);
        QuadratureRule::new(n, w, RuleKind::Derived)
    }
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, r| m.max(r.abs()))
}

#[derive(Debug, Clone)]
pub struct Derivation {
    pub rule: QuadratureRule,
    /// Converged unknown vector in the system's labelled order.
    pub unknowns: Vec<f64>,
    pub iterations: usize,
    /// Max-norm residual before each iteration and after the last one.
    pub history: Vec<f64>,
}

/// Damped Newton iteration from a single seed.
pub fn newton(system: &DerivationSystem, seed: &[f64]) -> Result<Derivation> {
    system.check_arity(seed)?;
    let mut x = seed.to_vec();
    let mut r = system.residual(&x);
    let mut norm = max_norm(&r);
    let mut history = vec![norm];

    for it in 0..MAX_ITERATIONS {
        if norm <= RESIDUAL_TOLERANCE {
            let rule = system.rule_at(&x)?;
            return Ok(Derivation {
                rule,
                unknowns: x,
                iterations: it,
                history,
            });
        }
        let jac = system.jacobian(&x);
        let rhs = DVector::from_vec(r.clone());
        let step = jac
            .lu()
            .solve(&rhs)
            .filter(|s| s.iter().all(|v| v.is_finite()))
            .ok_or(Error::SingularSystem { iteration: it })?;

        let mut alpha = 1.0;
        loop {
            let trial: Vec<f64> = x
                .iter()
                .zip(step.iter())
                .map(|(xi, si)| xi - alpha * si)
                .collect();
            let tr = system.residual(&trial);
            let tn = max_norm(&tr);
            if tn < norm || alpha < 1.0 / 1024.0 {
                x = trial;
                r = tr;
                norm = tn;
                break;
            }
            alpha *= 0.5;
        }
        history.push(norm);
    }

    if norm <= RESIDUAL_TOLERANCE {
        let rule = system.rule_at(&x)?;
        return Ok(Derivation {
            rule,
            unknowns: x,
            iterations: MAX_ITERATIONS,
            history,
        });
    }
    Err(Error::DerivationFailed {
        iterations: MAX_ITERATIONS,
        residual: norm,
    })
}

/// Solves the derivation system for `target` from `seed`.
///
/// For the two-point target a failed start falls back to seeds drawn from
/// the one-parameter family of C0-cubic-exact rules (see [`family_seeds`]).
pub fn derive_rule(target: DerivationTarget, seed: &[f64]) -> Result<Derivation> {
    let system = DerivationSystem::new(target);
    let first = newton(&system, seed);
    match (&first, target) {
        (
            Err(Error::DerivationFailed { .. }) | Err(Error::SingularSystem { .. }),
            DerivationTarget::Nq2,
        ) => {
            for s in family_seeds() {
                if let Ok(d) = newton(&system, &s) {
                    log::info!("two-point derivation recovered from a family seed");
                    return Ok(d);
                }
            }
            first
        }
        _ => first,
    }
}

/// Members of the one-parameter family of two-point rules exact on the C0
/// cubic pattern, ordered by |T5|, as `(n1, n2, w1, w2)` seeds.
///
/// The family is parameterized by `n1`: with `P(t) = t (1 - t)` the pattern
/// conditions reduce to `w1 + w2 = 1`, `sum w P = 1/6` and
/// `sum w P (2n - 1) = 0`, leaving a scalar equation for `n2`.
pub fn family_seeds() -> Vec<[f64; 4]> {
    const STEPS: usize = 200;
    const SUB: usize = 400;
    let p = |t: f64| t * (1.0 - t);
    let mut members: Vec<([f64; 4], f64)> = Vec::new();

    for i in 1..STEPS {
        let n1 = i as f64 / STEPS as f64;
        let p1 = p(n1);
        let g = |n2: f64| {
            let p2 = p(n2);
            (1.0 / 6.0 - p2) * p1 * (2.0 * n1 - 1.0) + (p1 - 1.0 / 6.0) * p2 * (2.0 * n2 - 1.0)
        };
        for j in 0..SUB {
            let (mut lo, mut hi) = (j as f64 / SUB as f64, (j + 1) as f64 / SUB as f64);
            let (mut glo, ghi) = (g(lo), g(hi));
            if glo * ghi > 0.0 {
                continue;
            }
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let gm = g(mid);
                if glo * gm <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    glo = gm;
                }
            }
            let n2 = 0.5 * (lo + hi);
            let p2 = p(n2);
            if (p1 - p2).abs() < 1e-6 {
                continue;
            }
            let w1 = (1.0 / 6.0 - p2) / (p1 - p2);
            let w2 = 1.0 - w1;
            let t5 = series_from_points(&[n1, n2], &[w1, w2]).t5;
            members.push(([n1, n2, w1, w2], t5.abs()));
        }
    }

    members.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut seeds: Vec<[f64; 4]> = Vec::new();
    for (m, _) in members {
        let distinct = seeds.iter().all(|s| {
            s.iter()
                .zip(&m)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
                > 0.05
        });
        if distinct {
            seeds.push(m);
        }
        if seeds.len() == 8 {
            break;
        }
    }
    seeds
}
