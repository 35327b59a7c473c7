// Tabulated digits are kept as published even past f64 precision.
#![allow(clippy::excessive_precision)]

use super::{Anchor, QuadratureRule, RuleKind};
use crate::error::{Error, Result};

struct Table {
    nodes: &'static [f64],
    weights: &'static [f64],
}

// Reference interval [0, 1]; weights sum to 1.
const GAUSS: [Table; 5] = [
    Table {
        nodes: &[0.5],
        weights: &[1.0],
    },
    Table {
        nodes: &[0.211324865405187117745, 0.788675134594812882255],
        weights: &[0.5, 0.5],
    },
    Table {
        nodes: &[0.112701665379258311482, 0.5, 0.887298334620741688518],
        weights: &[
            0.277777777777777777778,
            0.444444444444444444444,
            0.277777777777777777778,
        ],
    },
    Table {
        nodes: &[
            0.069431844202973712388,
            0.330009478207571867599,
            0.669990521792428132401,
            0.930568155797026287612,
        ],
        weights: &[
            0.173927422568726928687,
            0.326072577431273071313,
            0.326072577431273071313,
            0.173927422568726928687,
        ],
    },
    Table {
        nodes: &[
            0.0469100770306680036012,
            0.230765344947158454482,
            0.5,
            0.769234655052841545518,
            0.953089922969331996399,
        ],
        weights: &[
            0.118463442528094543757,
            0.239314335249683234021,
            0.284444444444444444444,
            0.239314335249683234021,
            0.118463442528094543757,
        ],
    },
];

const LOBATTO: [Table; 4] = [
    Table {
        nodes: &[0.0, 1.0],
        weights: &[0.5, 0.5],
    },
    Table {
        nodes: &[0.0, 0.5, 1.0],
        weights: &[
            0.166666666666666666667,
            0.666666666666666666667,
            0.166666666666666666667,
        ],
    },
    Table {
        nodes: &[0.0, 0.276393202250021030359, 0.723606797749978969641, 1.0],
        weights: &[
            0.0833333333333333333333,
            0.416666666666666666667,
            0.416666666666666666667,
            0.0833333333333333333333,
        ],
    },
    Table {
        nodes: &[
            0.0,
            0.172673164646011428101,
            0.5,
            0.827326835353988571899,
            1.0,
        ],
        weights: &[
            0.05,
            0.272222222222222222222,
            0.355555555555555555556,
            0.272222222222222222222,
            0.05,
        ],
    },
];

fn from_table(t: &Table, kind: RuleKind) -> QuadratureRule {
    QuadratureRule {
        nodes: t.nodes.to_vec(),
        weights: t.weights.to_vec(),
        kind,
    }
}

/// m-point Gauss-Legendre rule, exact for polynomials of degree 2m - 1.
pub fn gauss_legendre(m: usize) -> Result<QuadratureRule> {
    match m {
        1..=5 => Ok(from_table(&GAUSS[m - 1], RuleKind::GaussLegendre(m))),
        _ => Err(Error::UnsupportedOrder {
            family: "Gauss-Legendre",
            order: m,
            supported: "1..=5",
        }),
    }
}

/// m-point Gauss-Lobatto rule, exact for polynomials of degree 2m - 3.
pub fn gauss_lobatto(m: usize) -> Result<QuadratureRule> {
    match m {
        2..=5 => Ok(from_table(&LOBATTO[m - 2], RuleKind::GaussLobatto(m))),
        _ => Err(Error::UnsupportedOrder {
            family: "Gauss-Lobatto",
            order: m,
            supported: "2..=5",
        }),
    }
}

/// Unknown vector `(n1, n2, w1, w2)` of the two-point rule in the labelled
/// order of the four closed-form solutions.
///
/// Variants 1 and 2 are mirror images; variants 3 and 4 carry the same
/// node/weight pairs as 1 and 2 with the labels exchanged, which are the
/// remaining real solutions of the derivation system.
pub fn nq2_unknowns(variant: u8) -> Result<[f64; 4]> {
    let s266 = 266f64.sqrt();
    // 33 - 2√266 without cancellation
    let a = 25.0 / (33.0 + 2.0 * s266);
    let n_inner = (5.0 - (a / 3.0).sqrt()) / 10.0;
    let n_outer = (75.0 - 3f64.sqrt() * a.powf(1.5) + 66.0 * (3.0 * a).sqrt()) / 150.0;
    let w_big = (133.0 + 2.0 * s266) / 266.0;
    let w_small = (133.0 - 2.0 * s266) / 266.0;
    let sol1 = [n_inner, n_outer, w_big, w_small];
    let sol2 = [1.0 - n_inner, 1.0 - n_outer, w_big, w_small];
    match variant {
        1 => Ok(sol1),
        2 => Ok(sol2),
        3 => Ok([sol1[1], sol1[0], sol1[3], sol1[2]]),
        4 => Ok([sol2[1], sol2[0], sol2[3], sol2[2]]),
        v => Err(Error::InvalidParameter(format!(
            "NQ2 variant must be 1..=4, got {v}"
        ))),
    }
}

/// Two-point dispersion-minimizing rule for C1 quadratic spaces.
pub fn nq2(variant: u8) -> Result<QuadratureRule> {
    let [n1, n2, w1, w2] = nq2_unknowns(variant)?;
    QuadratureRule::new(vec![n1, n2], vec![w1, w2], RuleKind::Nq2(variant))
}

/// 2.5-point rule, exact on discontinuous cubics, with one node on an
/// element endpoint.
pub fn g25(anchor: Anchor) -> QuadratureRule {
    let s51 = 51f64.sqrt();
    let right = QuadratureRule {
        nodes: vec![(9.0 - s51) / 30.0, (9.0 + s51) / 30.0, 1.0],
        weights: vec![
            (79.0 + 12.0 * (9.0 - s51)) / 442.0,
            (295.0 - 12.0 * (9.0 - s51)) / 442.0,
            2.0 / 13.0,
        ],
        kind: RuleKind::G25(Anchor::Right),
    };
    match anchor {
        Anchor::Right => right,
        Anchor::Left => right.reflected(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact monomial moments 1/(k+1) are the oracle for every rule here.
    fn exact_through(rule: &QuadratureRule, d: u32, tol: f64) -> bool {
        (0..=d).all(|k| rule.monomial_error(k).abs() <= tol)
    }

    #[test]
    fn gauss_examples() {
        let g2 = gauss_legendre(2).unwrap();
        let n = (1.0 - 1.0 / 3f64.sqrt()) / 2.0;
        assert!((g2.nodes()[0] - n).abs() < 1e-16);
        assert!((g2.nodes()[1] - (1.0 - n)).abs() < 1e-16);
        assert_eq!(g2.weights(), &[0.5, 0.5]);
        let g3 = gauss_legendre(3).unwrap();
        for (w, e) in g3
            .weights()
            .iter()
            .zip([5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0])
        {
            assert!((w - e).abs() < 1e-16);
        }
        let g1 = gauss_legendre(1).unwrap();
        assert_eq!((g1.nodes(), g1.weights()), (&[0.5][..], &[1.0][..]));
        assert!(gauss_legendre(0).is_err());
        assert!(matches!(
            gauss_legendre(6),
            Err(Error::UnsupportedOrder { .. })
        ));
    }

    #[test]
    fn lobatto_examples() {
        let l3 = gauss_lobatto(3).unwrap();
        assert_eq!(l3.nodes(), &[0.0, 0.5, 1.0]);
        assert!((l3.weights()[1] - 2.0 / 3.0).abs() < 1e-16);
        let l2 = gauss_lobatto(2).unwrap();
        assert_eq!(
            (l2.nodes(), l2.weights()),
            (&[0.0, 1.0][..], &[0.5, 0.5][..])
        );
        assert!(l3.monomial_error(3).abs() < 1e-16);
        assert!(l3.monomial_error(4).abs() > 1e-3);
        assert!(gauss_lobatto(1).is_err() && gauss_lobatto(6).is_err());
    }

    #[test]
    fn exactness_ladder() {
        for m in 1..=5 {
            let g = gauss_legendre(m).unwrap();
            let d = 2 * m as u32 - 1;
            assert!(exact_through(&g, d, 1e-14), "G{m}");
            assert!(g.monomial_error(d + 1).abs() > 1e-8, "G{m}");
        }
        for m in 2..=5 {
            let l = gauss_lobatto(m).unwrap();
            let d = 2 * m as u32 - 3;
            assert!(exact_through(&l, d, 1e-14), "L{m}");
            assert!(l.monomial_error(d + 1).abs() > 1e-8, "L{m}");
        }
    }

    #[test]
    fn nq2_values() {
        let [n1, n2, w1, w2] = nq2_unknowns(1).unwrap();
        assert!((w1 + w2 - 1.0).abs() < 1e-16);
        // 40-digit evaluation of the closed forms
        assert!((n1 - 0.46436354210457035).abs() < 1e-15);
        assert!((n2 - 0.967685837789287).abs() < 1e-15);
        assert!((w1 - 0.62262786789699316).abs() < 1e-15);
        assert!((w2 - 0.37737213210300684).abs() < 1e-15);
        assert!(nq2(5).is_err() && nq2(0).is_err());
        for v in 1..=4 {
            let r = nq2(v).unwrap();
            assert!(r.weights().iter().all(|&w| w > 0.0));
            assert!((r.weight_sum() - 1.0).abs() < 1e-15);
        }
        assert_eq!(nq2(3).unwrap().nodes(), nq2(1).unwrap().nodes());
    }

    #[test]
    fn g25_values() {
        let r = g25(Anchor::Right);
        let want_n = [0.06195238571523833, 0.5380476142847617, 1.0];
        let want_w = [
            0.22919198836535249,
            0.61696185778849367,
            0.15384615384615385,
        ];
        for i in 0..3 {
            assert!((r.nodes()[i] - want_n[i]).abs() < 1e-15);
            assert!((r.weights()[i] - want_w[i]).abs() < 1e-15);
        }
        assert!((r.weight_sum() - 1.0).abs() < 1e-15);
        assert!(exact_through(&r, 3, 1e-14));
        assert!(r.monomial_error(4).abs() > 1e-4);
        let l = g25(Anchor::Left);
        assert_eq!(l.nodes()[0], 0.0);
        assert!(exact_through(&l, 3, 1e-14));
        // both orientations share the quartic error 1/180
        assert!((r.monomial_error(4) - 1.0 / 180.0).abs() < 1e-15);
        assert!((l.monomial_error(4) - 1.0 / 180.0).abs() < 1e-15);
    }
}
