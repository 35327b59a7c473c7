//! Quadrature rules on the reference interval [0, 1].
//!
//! The catalog holds the classical Gauss-Legendre and Gauss-Lobatto rules,
//! the two-point dispersion-minimizing rule `NQ2` (four equivalent
//! parameterizations), the 2.5-point rule `G2.5` with one node on an element
//! endpoint, and blends of any two rules.

mod catalog;
mod derive;

pub use catalog::{g25, gauss_legendre, gauss_lobatto, nq2, nq2_unknowns};
pub use derive::{
    derive_rule, family_seeds, Derivation, DerivationSystem, DerivationTarget, DEFAULT_G25_SEED,
    DEFAULT_NQ2_SEED,
};

use crate::error::{Error, Result};

/// Absolute tolerance below which two blended nodes are merged.
pub const MERGE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Anchor {
    /// Fixed node at the right endpoint (n3 = 1).
    Right,
    /// Mirror image with the fixed node at the left endpoint.
    Left,
}

impl Anchor {
    pub fn mirrored(self) -> Self {
        match self {
            Anchor::Right => Anchor::Left,
            Anchor::Left => Anchor::Right,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RuleKind {
    GaussLegendre(usize),
    GaussLobatto(usize),
    Nq2(u8),
    G25(Anchor),
    Blend,
    Derived,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    kind: RuleKind,
}

impl QuadratureRule {
    /// Builds a rule from node/weight pairs in any order; nodes are sorted
    /// and must be distinct and lie in [0, 1].
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>, kind: RuleKind) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "rule needs matching non-empty node/weight lists ({} vs {})",
                nodes.len(),
                weights.len()
            )));
        }
        let mut pairs: Vec<(f64, f64)> = nodes.into_iter().zip(weights).collect();
        if pairs
            .iter()
            .any(|&(n, w)| !n.is_finite() || !w.is_finite() || !(0.0..=1.0).contains(&n))
        {
            return Err(Error::InvalidParameter(
                "quadrature nodes must be finite and lie in [0, 1]".into(),
            ));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if pairs.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidParameter(
                "quadrature nodes must be distinct".into(),
            ));
        }
        let (nodes, weights) = pairs.into_iter().unzip();
        Ok(Self {
            nodes,
            weights,
            kind,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn pairs(&self) -> impl DoubleEndedIterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Mirror image under t -> 1 - t.
    pub fn reflected(&self) -> Self {
        let kind = match self.kind {
            RuleKind::G25(a) => RuleKind::G25(a.mirrored()),
            k => k,
        };
        let (nodes, weights): (Vec<_>, Vec<_>) =
            self.pairs().rev().map(|(n, w)| (1.0 - n, w)).unzip();
        Self {
            nodes,
            weights,
            kind,
        }
    }

    /// Approximates the integral of `f` over [a, b] through the affine map
    /// of the reference interval (Jacobian `b - a`).
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let h = b - a;
        self.pairs().map(|(n, w)| w * h * f(a + n * h)).sum()
    }

    /// Sum of w_i n_i^k.
    pub fn moment(&self, k: u32) -> f64 {
        self.pairs().map(|(n, w)| w * n.powi(k as i32)).sum()
    }

    /// Error of the rule on t^k over [0, 1].
    pub fn monomial_error(&self, k: u32) -> f64 {
        self.moment(k) - 1.0 / (k as f64 + 1.0)
    }

    /// Highest degree d such that every monomial up to d is integrated to
    /// within `tol`.
    pub fn exactness_degree(&self, tol: f64) -> Option<u32> {
        let mut d = None;
        for k in 0..64 {
            if self.monomial_error(k).abs() > tol {
                break;
            }
            d = Some(k);
        }
        d
    }

    /// Residuals of the three exactness conditions of the repeating C0 cubic
    /// pattern on a uniform mesh (B1, B2 and B0 + B3 Bernstein integrals).
    pub fn pattern_residuals(&self) -> [f64; 3] {
        pattern_residuals(&self.nodes, &self.weights)
    }

    /// Error on t^3. For rules exact on the C0 cubic pattern the element
    /// error of any cubic g is `cubic_defect() * (g(1) - g(0))`, which
    /// telescopes across interior elements.
    pub fn cubic_defect(&self) -> f64 {
        self.monomial_error(3)
    }
}

pub(crate) fn pattern_residuals(nodes: &[f64], weights: &[f64]) -> [f64; 3] {
    let mut r = [-0.25, -0.25, -0.5];
    for (&n, &w) in nodes.iter().zip(weights) {
        let m = 1.0 - n;
        r[0] += 3.0 * n * m * m * w;
        r[1] += 3.0 * n * n * m * w;
        r[2] += (n * n * n + m * m * m) * w;
    }
    r
}

/// Weighted union `tau * a + (1 - tau) * b`; nodes closer than
/// [`MERGE_TOLERANCE`] are merged. `tau` is not restricted to [0, 1].
pub fn blend(a: &QuadratureRule, b: &QuadratureRule, tau: f64) -> QuadratureRule {
    if tau == 1.0 {
        return a.clone();
    }
    if tau == 0.0 {
        return b.clone();
    }
    let mut pts: Vec<(f64, f64)> = a
        .pairs()
        .map(|(n, w)| (n, tau * w))
        .chain(b.pairs().map(|(n, w)| (n, (1.0 - tau) * w)))
        .collect();
    pts.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for (n, w) in pts {
        match merged.last_mut() {
            Some(last) if (n - last.0).abs() <= MERGE_TOLERANCE => last.1 += w,
            _ => merged.push((n, w)),
        }
    }
    let (nodes, weights) = merged.into_iter().unzip();
    QuadratureRule {
        nodes,
        weights,
        kind: RuleKind::Blend,
    }
}
