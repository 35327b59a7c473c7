use nalgebra::{DMatrix, DVector};

use super::exact::{exact_spectrum, periodic_spectrum, ExactMode};
use super::EigenPair;
use crate::assembly::Boundary;
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::spline::BSplineSpace;

/// Relative eigenvalue gap below which exact modes form one cluster.
pub const CLUSTER_TOLERANCE: f64 = 1e-8;

/// Least captured fraction `‖P u‖²` of an exact mode by its matched
/// discrete subspace before the match is rejected.
const MIN_CAPTURE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct ModeError {
    pub mode_j: usize,
    /// Second mode index in 2D; 0 in 1D.
    pub mode_k: usize,
    pub lambda_h: f64,
    pub lambda_exact: f64,
    pub ev_rel_err: f64,
    pub ef_l2_err: f64,
    pub ef_energy_scaled: f64,
}

impl ModeError {
    fn new(mode: &ExactMode, lambda_h: f64, l2_sq: f64, energy_sq: f64) -> Self {
        Self {
            mode_j: mode.j,
            mode_k: mode.k,
            lambda_h,
            lambda_exact: mode.lambda,
            ev_rel_err: (lambda_h - mode.lambda) / mode.lambda,
            ef_l2_err: l2_sq.max(0.0).sqrt(),
            ef_energy_scaled: (energy_sq.max(0.0) / mode.lambda).sqrt(),
        }
    }
}

/// Per-mode errors in ascending order of the exact eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenReport {
    pub modes: Vec<ModeError>,
}

struct RefPoint {
    x: [f64; 2],
    weight: f64,
    /// (unknown index, value, gradient)
    terms: Vec<(usize, f64, [f64; 2])>,
}

/// Five-point Gauss reference quadrature over every element, with basis
/// functions indexed by unknown (boundary functions dropped for Dirichlet).
struct ReferenceGrid {
    points: Vec<RefPoint>,
}

impl ReferenceGrid {
    fn one_d(space: &BSplineSpace, bc: Boundary) -> Result<Self> {
        let g5 = gauss_legendre(5)?;
        let dofs = space.dof_count();
        let mut points = Vec::new();
        for e in 0..space.n_elements() {
            let (a, b) = space.element_interval(e);
            for (t, w) in g5.pairs() {
                let x = a + t * (b - a);
                let be = space.eval_on_element(e, x);
                let terms = be
                    .indices
                    .iter()
                    .zip(&be.values)
                    .zip(&be.derivs)
                    .filter_map(|((&g, &v), &d)| match bc {
                        Boundary::Periodic => Some((g, v, [d, 0.0])),
                        Boundary::Dirichlet if g == 0 || g == dofs - 1 => None,
                        Boundary::Dirichlet => Some((g - 1, v, [d, 0.0])),
                    })
                    .collect();
                points.push(RefPoint {
                    x: [x, 0.0],
                    weight: w * (b - a),
                    terms,
                });
            }
        }
        Ok(Self { points })
    }

    fn two_d(space: &BSplineSpace, bc: Boundary, n1d: usize) -> Result<Self> {
        let line = Self::one_d(space, bc)?;
        let mut points = Vec::with_capacity(line.points.len().pow(2));
        for px in &line.points {
            for py in &line.points {
                let mut terms = Vec::with_capacity(px.terms.len() * py.terms.len());
                for &(i, vi, di) in &px.terms {
                    for &(l, vl, dl) in &py.terms {
                        terms.push((i * n1d + l, vi * vl, [di[0] * vl, vi * dl[0]]));
                    }
                }
                points.push(RefPoint {
                    x: [px.x[0], py.x[0]],
                    weight: px.weight * py.weight,
                    terms,
                });
            }
        }
        Ok(Self { points })
    }

    fn field(p: &RefPoint, c: &[f64]) -> (f64, [f64; 2]) {
        let mut u = 0.0;
        let mut g = [0.0; 2];
        for &(i, v, d) in &p.terms {
            u += c[i] * v;
            g[0] += c[i] * d[0];
            g[1] += c[i] * d[1];
        }
        (u, g)
    }

    /// `(‖v - f‖², ‖∇(v - f)‖², (∇v, ∇f))`.
    fn measure(&self, c: &[f64], f: &ExactMode) -> (f64, f64, f64) {
        let (mut l2, mut en, mut cross) = (0.0, 0.0, 0.0);
        for p in &self.points {
            let (u, g) = Self::field(p, c);
            let fu = f.value(p.x[0], p.x[1]);
            let fg = f.grad(p.x[0], p.x[1]);
            l2 += p.weight * (u - fu).powi(2);
            en += p.weight * ((g[0] - fg[0]).powi(2) + (g[1] - fg[1]).powi(2));
            cross += p.weight * (g[0] * fg[0] + g[1] * fg[1]);
        }
        (l2, en, cross)
    }

    /// Unit-norm combinations of `vectors` that best approximate each exact
    /// mode of a cluster (L² projection onto their span, then normalized).
    /// For a single vector this is normalization plus sign alignment.
    fn project(&self, vectors: &[&[f64]], modes: &[ExactMode]) -> Result<Vec<Vec<f64>>> {
        let s = vectors.len();
        let mut gram = DMatrix::zeros(s, s);
        let mut rhs = DMatrix::zeros(s, modes.len());
        for p in &self.points {
            let vals: Vec<f64> = vectors.iter().map(|c| Self::field(p, c).0).collect();
            for a in 0..s {
                for b in 0..s {
                    gram[(a, b)] += p.weight * vals[a] * vals[b];
                }
                for (e, m) in modes.iter().enumerate() {
                    rhs[(a, e)] += p.weight * vals[a] * m.value(p.x[0], p.x[1]);
                }
            }
        }
        let chol = gram
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Pairing("discrete modes are linearly dependent".into()))?;
        let coef = chol.solve(&rhs);
        let mut out = Vec::with_capacity(modes.len());
        for (e, m) in modes.iter().enumerate() {
            let c: DVector<f64> = coef.column(e).into();
            let captured = c.dot(&rhs.column(e));
            if captured < MIN_CAPTURE {
                return Err(Error::Pairing(format!(
                    "exact mode ({}, {}) is not represented by the matched discrete modes (captured fraction {captured:.3})",
                    m.j, m.k
                )));
            }
            let scale = 1.0 / c.dot(&(&gram * &c)).sqrt();
            let len = vectors[0].len();
            let mut v = vec![0.0; len];
            for (a, vec) in vectors.iter().enumerate() {
                for (slot, x) in v.iter_mut().zip(vec.iter()) {
                    *slot += scale * c[a] * x;
                }
            }
            out.push(v);
        }
        Ok(out)
    }
}

fn clusters(modes: &[ExactMode]) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=modes.len() {
        if i == modes.len()
            || (modes[i].lambda - modes[start].lambda).abs()
                > CLUSTER_TOLERANCE * modes[start].lambda
        {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Errors of the first `count` modes against the exact spectrum.
///
/// Discrete pairs are matched to exact modes by position in the ascending
/// spectrum (skipping the constant mode for periodic conditions). Degenerate
/// exact eigenvalues are handled by projecting onto the span of the matched
/// discrete cluster. Eigenfunction norms use five-point Gauss integration
/// on every element.
pub fn error_report(
    pairs: &[EigenPair],
    space: &BSplineSpace,
    bc: Boundary,
    dim: usize,
    count: usize,
) -> Result<EigenReport> {
    let (exact, offset) = match (bc, dim) {
        (Boundary::Dirichlet, _) => (exact_spectrum(dim, count)?, 0),
        (Boundary::Periodic, 1) => (periodic_spectrum(count), 1),
        (Boundary::Periodic, _) => {
            return Err(Error::Configuration(
                "error reports with periodic conditions are available in 1D only".into(),
            ))
        }
    };
    if pairs.len() < exact.len() + offset {
        return Err(Error::Pairing(format!(
            "{} modes requested but only {} discrete pairs available",
            exact.len(),
            pairs.len() - offset.min(pairs.len())
        )));
    }
    let grid = match dim {
        1 => ReferenceGrid::one_d(space, bc)?,
        _ => {
            let n1d = (pairs[0].vector.len() as f64).sqrt().round() as usize;
            if n1d * n1d != pairs[0].vector.len() {
                return Err(Error::Pairing(
                    "2D vectors must come from a square tensor grid".into(),
                ));
            }
            ReferenceGrid::two_d(space, bc, n1d)?
        }
    };
    let mut modes = Vec::with_capacity(exact.len());
    for range in clusters(&exact) {
        let vectors: Vec<&[f64]> = range
            .clone()
            .map(|i| pairs[i + offset].vector.as_slice())
            .collect();
        let fitted = grid.project(&vectors, &exact[range.clone()])?;
        for (i, v) in range.zip(fitted) {
            let (l2, en, _) = grid.measure(&v, &exact[i]);
            modes.push(ModeError::new(
                &exact[i],
                pairs[i + offset].lambda_h,
                l2,
                en,
            ));
        }
    }
    Ok(EigenReport { modes })
}

/// 2D Dirichlet errors of the tensor-product operator from its 1D pairs.
///
/// The discrete eigenfunction of mode `(j, k)` is the product of the 1D
/// eigenfunctions `j` and `k`, so its errors follow from 1D quantities:
/// with `e` the 1D L² error, `E` the 1D H¹-seminorm error and
/// `s = (v', f')`, the 2D squared errors are
/// `e_j² + e_k² - e_j² e_k² / 2` and `E_j² + s_j e_k² + E_k² + s_k e_j²`.
pub fn tensor_error_report(
    pairs1d: &[EigenPair],
    space: &BSplineSpace,
    count: usize,
) -> Result<EigenReport> {
    if space.is_periodic() {
        return Err(Error::Configuration(
            "the tensor error report needs Dirichlet conditions".into(),
        ));
    }
    let exact2d = exact_spectrum(2, count)?;
    let needed = exact2d.iter().map(|m| m.j.max(m.k)).max().unwrap_or(0);
    if needed > pairs1d.len() {
        return Err(Error::Pairing(format!(
            "2D modes need 1D mode {needed} but only {} 1D pairs are available",
            pairs1d.len()
        )));
    }
    let grid = ReferenceGrid::one_d(space, Boundary::Dirichlet)?;
    let exact1d = exact_spectrum(1, needed)?;
    let mut one = Vec::with_capacity(needed);
    for (p, m) in pairs1d.iter().zip(&exact1d) {
        let v = grid.project(&[p.vector.as_slice()], std::slice::from_ref(m))?;
        one.push(grid.measure(&v[0], m));
    }
    let modes = exact2d
        .iter()
        .map(|m| {
            let (ej, ej1, sj) = one[m.j - 1];
            let (ek, ek1, sk) = one[m.k - 1];
            let lambda_h = pairs1d[m.j - 1].lambda_h + pairs1d[m.k - 1].lambda_h;
            let l2 = ej + ek - 0.5 * ej * ek;
            let en = ej1 + sj * ek + ek1 + sk * ej;
            ModeError::new(m, lambda_h, l2, en)
        })
        .collect();
    Ok(EigenReport { modes })
}
