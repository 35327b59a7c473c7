use super::band::SymBandMatrix;
use crate::error::{Error, Result};
use crate::quadrature::{blend, QuadratureRule};

/// Tolerance on row-to-row deviation when reading a stencil off assembled
/// periodic matrices.
pub const TRANSLATION_TOLERANCE: f64 = 1e-12;

/// Per-element dimensionless coefficients of the uniform-mesh stencil.
///
/// Stiffness row times `h` reads `(K2, -K1, K0, -K1, K2)`; mass row over `h`
/// reads `(M2, M1, M0, M1, M2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
}

/// Element matrices of the three uniform quadratic pieces on [0, 1].
fn local_matrices(rule: &QuadratureRule) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let mut k = [[0.0; 3]; 3];
    let mut m = [[0.0; 3]; 3];
    for (t, w) in rule.pairs() {
        let v = [
            0.5 * (1.0 - t) * (1.0 - t),
            0.5 * (-2.0 * t * t + 2.0 * t + 1.0),
            0.5 * t * t,
        ];
        let d = [t - 1.0, 1.0 - 2.0 * t, t];
        for a in 0..3 {
            for b in 0..3 {
                k[a][b] += w * d[a] * d[b];
                m[a][b] += w * v[a] * v[b];
            }
        }
    }
    (k, m)
}

impl Stencil {
    /// Stencil of a uniform periodic mesh whose stiffness and mass integrals
    /// use the given rules on every element.
    pub fn from_rules(stiffness: &QuadratureRule, mass: &QuadratureRule) -> Self {
        let (k, _) = local_matrices(stiffness);
        let (_, m) = local_matrices(mass);
        Self {
            k0: k[0][0] + k[1][1] + k[2][2],
            k1: -(k[0][1] + k[1][2]),
            k2: k[0][2],
            m0: m[0][0] + m[1][1] + m[2][2],
            m1: m[0][1] + m[1][2],
            m2: m[0][2],
        }
    }

    pub fn from_rule(rule: &QuadratureRule) -> Self {
        Self::from_rules(rule, rule)
    }

    /// K0 - 2 K1 + 2 K2; zero for any consistent stiffness stencil.
    pub fn stiffness_row_sum(&self) -> f64 {
        self.k0 - 2.0 * self.k1 + 2.0 * self.k2
    }

    /// M0 + 2 M1 + 2 M2; one whenever the mass rule integrates constants.
    pub fn mass_row_sum(&self) -> f64 {
        self.m0 + 2.0 * self.m1 + 2.0 * self.m2
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.k0, self.k1, self.k2, self.m0, self.m1, self.m2]
    }

    pub fn max_abs_diff(&self, other: &Stencil) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Reads the stencil from matrices assembled on a uniform periodic mesh with
/// element size `h`, checking that every row carries the same pattern.
pub fn extract_stencil(k: &SymBandMatrix, m: &SymBandMatrix, h: f64) -> Result<Stencil> {
    if !k.is_cyclic() || !m.is_cyclic() {
        return Err(Error::StencilUndefined(
            "stencil extraction needs matrices from a periodic mesh".into(),
        ));
    }
    let n = k.dim();
    if n < 5 || m.dim() != n {
        return Err(Error::StencilUndefined(format!(
            "stencil extraction needs at least 5 elements, got {n}"
        )));
    }
    let row = |i: usize| {
        let kr = [
            k.get(i, i) * h,
            -k.get(i, (i + 1) % n) * h,
            k.get(i, (i + 2) % n) * h,
        ];
        let mr = [
            m.get(i, i) / h,
            m.get(i, (i + 1) % n) / h,
            m.get(i, (i + 2) % n) / h,
        ];
        Stencil {
            k0: kr[0],
            k1: kr[1],
            k2: kr[2],
            m0: mr[0],
            m1: mr[1],
            m2: mr[2],
        }
    };
    let first = row(0);
    let mut deviation: f64 = 0.0;
    for i in 1..n {
        deviation = deviation.max(row(i).max_abs_diff(&first));
    }
    if deviation > TRANSLATION_TOLERANCE {
        return Err(Error::Inconsistent { deviation });
    }
    Ok(first)
}

/// Blend weight `tau` for which `blend(a, b, tau)` reproduces `target.m2`.
///
/// Found by a secant iteration on the M2 coefficient (linear in `tau`, so
/// the iteration terminates after one or two steps).
pub fn blend_parameter(a: &QuadratureRule, b: &QuadratureRule, target: &Stencil) -> Result<f64> {
    let f = |tau: f64| {
        let r = blend(a, b, tau);
        Stencil::from_rule(&r).m2 - target.m2
    };
    let (mut x0, mut x1) = (0.0, 1.0);
    let (mut f0, mut f1) = (f(x0), f(x1));
    for iteration in 0..50 {
        if f1.abs() <= 1e-15 {
            return Ok(x1);
        }
        let slope = f1 - f0;
        if slope == 0.0 {
            return Err(Error::SingularSystem { iteration });
        }
        let x2 = x1 - f1 * (x1 - x0) / slope;
        (x0, f0) = (x1, f1);
        x1 = x2;
        f1 = f(x1);
    }
    Err(Error::DerivationFailed {
        iterations: 50,
        residual: f1.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{g25, gauss_legendre, gauss_lobatto, nq2, Anchor};
    use proptest::prelude::*;

    /// Two-point-style closed forms generalized to m-node sums.
    fn closed_form(r: &QuadratureRule) -> Stencil {
        let s = |f: &dyn Fn(f64) -> f64| r.pairs().map(|(n, w)| f(n) * w).sum::<f64>();
        Stencil {
            k0: s(&|n| 2.0 * (3.0 * n * n - 3.0 * n + 1.0)),
            k1: s(&|n| (1.0 - 2.0 * n).powi(2)),
            k2: s(&|n| (n - 1.0) * n),
            m0: 0.5 * s(&|n| 3.0 * n.powi(4) - 6.0 * n.powi(3) + 3.0 * n * n + 1.0),
            m1: 0.25 * s(&|n| -4.0 * n.powi(4) + 8.0 * n.powi(3) - 4.0 * n * n + 1.0),
            m2: 0.25 * s(&|n| (n - 1.0).powi(2) * n * n),
        }
    }

    #[test]
    fn element_matrices_match_closed_forms() {
        let mut rules = vec![g25(Anchor::Right), g25(Anchor::Left)];
        rules.extend((1..=5).map(|m| gauss_legendre(m).unwrap()));
        rules.extend((2..=5).map(|m| gauss_lobatto(m).unwrap()));
        rules.extend((1..=4).map(|v| nq2(v).unwrap()));
        for r in &rules {
            let d = Stencil::from_rule(r).max_abs_diff(&closed_form(r));
            assert!(d < 1e-14, "{:?}: {d}", r.kind());
        }
    }

    #[test]
    fn full_integration_values() {
        // exact integrals of uniform quadratic B-spline products
        let s = Stencil::from_rule(&gauss_legendre(3).unwrap());
        let want = [
            1.0,
            1.0 / 3.0,
            -1.0 / 6.0,
            66.0 / 120.0,
            26.0 / 120.0,
            1.0 / 120.0,
        ];
        for (a, b) in s.as_array().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn nq2_blend_parameter_is_two() {
        let g3 = gauss_legendre(3).unwrap();
        let g2 = gauss_legendre(2).unwrap();
        let target = Stencil::from_rule(&nq2(1).unwrap());
        let tau = blend_parameter(&g3, &g2, &target).unwrap();
        assert!((tau - 2.0).abs() < 1e-12);
        let s = Stencil::from_rule(&blend(&g3, &g2, tau));
        assert!(s.max_abs_diff(&target) < 1e-13);
    }

    proptest! {
        #[test]
        fn row_sums_hold_for_blends(tau in -3.0f64..3.0, a in 1usize..=5, b in 2usize..=5) {
            let r = blend(&gauss_legendre(a).unwrap(), &gauss_lobatto(b).unwrap(), tau);
            let s = Stencil::from_rule(&r);
            prop_assert!(s.stiffness_row_sum().abs() < 1e-12);
            prop_assert!((s.mass_row_sum() - 1.0).abs() < 1e-12);
        }
    }
}
