//! Knot vectors and B-spline bases on the unit interval.
//!
//! Three mesh families are supported: open knot vectors on uniform or
//! geometrically stretched meshes, and a uniform periodic family whose
//! basis is indexed modulo the element count.

use crate::error::{Error, Result};

/// Polynomial degree of the C1 quadratic spaces used throughout the crate.
pub const QUADRATIC: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeshFamily {
    OpenUniform,
    OpenStretched,
    PeriodicUniform,
}

impl MeshFamily {
    pub fn is_periodic(self) -> bool {
        matches!(self, MeshFamily::PeriodicUniform)
    }

    pub fn name(self) -> &'static str {
        match self {
            MeshFamily::OpenUniform => "open-uniform",
            MeshFamily::OpenStretched => "open-stretched",
            MeshFamily::PeriodicUniform => "periodic-uniform",
        }
    }
}

impl std::str::FromStr for MeshFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "open-uniform" | "uniform" => Ok(MeshFamily::OpenUniform),
            "open-stretched" | "stretched" => Ok(MeshFamily::OpenStretched),
            "periodic-uniform" | "periodic" => Ok(MeshFamily::PeriodicUniform),
            other => Err(Error::InvalidParameter(format!(
                "unknown mesh family '{other}'"
            ))),
        }
    }
}

/// Knot vector of length `n + 2p + 1`.
///
/// For open families the first and last knots are repeated `p + 1` times.
/// The periodic family stores the uniform grid extended by `p` knots on each
/// side of [0, 1]; element `e` is the span `[t[p + e], t[p + e + 1]]` in
/// both layouts.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    knots: Vec<f64>,
    degree: usize,
    family: MeshFamily,
    n_elements: usize,
}

impl KnotVector {
    /// Quadratic knot vector for the given family.
    ///
    /// `stretch` is the ratio between consecutive element widths and is
    /// only read by [`MeshFamily::OpenStretched`]; the smallest element sits
    /// at x = 0.
    pub fn build(family: MeshFamily, n: usize, stretch: f64) -> Result<Self> {
        Self::with_degree(family, n, stretch, QUADRATIC)
    }

    pub fn with_degree(family: MeshFamily, n: usize, stretch: f64, degree: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidMesh(format!(
                "need at least 3 elements, got {n}"
            )));
        }
        if degree == 0 {
            return Err(Error::InvalidParameter("degree must be at least 1".into()));
        }
        if !stretch.is_finite() || stretch < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "stretch factor must be >= 1, got {stretch}"
            )));
        }
        if family.is_periodic() && n <= degree {
            return Err(Error::InvalidMesh(format!(
                "periodic space of degree {degree} needs more than {degree} elements"
            )));
        }

        let p = degree;
        let breaks = match family {
            MeshFamily::OpenStretched => stretched_breaks(n, stretch),
            _ => (0..=n).map(|i| i as f64 / n as f64).collect::<Vec<_>>(),
        };

        let knots = if family.is_periodic() {
            let n_f = n as f64;
            (0..n + 2 * p + 1)
                .map(|i| (i as f64 - p as f64) / n_f)
                .collect()
        } else {
            let mut k = Vec::with_capacity(n + 2 * p + 1);
            k.extend(std::iter::repeat_n(0.0, p));
            k.extend_from_slice(&breaks);
            k.extend(std::iter::repeat_n(1.0, p));
            k
        };

        Ok(Self {
            knots,
            degree,
            family,
            n_elements: n,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn family(&self) -> MeshFamily {
        self.family
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    /// Element boundaries `x_0 = 0 < x_1 < ... < x_n = 1`.
    pub fn breakpoints(&self) -> &[f64] {
        &self.knots[self.degree..=self.degree + self.n_elements]
    }
}

fn stretched_breaks(n: usize, ratio: f64) -> Vec<f64> {
    if ratio == 1.0 {
        return (0..=n).map(|i| i as f64 / n as f64).collect();
    }
    // h0 * (r^n - 1) / (r - 1) = 1
    let h0 = (ratio - 1.0) / (ratio.powi(n as i32) - 1.0);
    let mut breaks = Vec::with_capacity(n + 1);
    let mut x = 0.0;
    let mut h = h0;
    breaks.push(0.0);
    for _ in 1..n {
        x += h;
        breaks.push(x);
        h *= ratio;
    }
    breaks.push(1.0);
    breaks
}

/// Basis values and first derivatives of the `p + 1` functions active on
/// one element.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisEval {
    pub element: usize,
    /// Global basis indices (reduced modulo the dof count for periodic spaces).
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementRange {
    pub a: f64,
    pub b: f64,
    pub active: Vec<usize>,
}

impl ElementRange {
    pub fn width(&self) -> f64 {
        self.b - self.a
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BSplineSpace {
    knots: KnotVector,
    dof_count: usize,
}

impl BSplineSpace {
    pub fn new(knots: KnotVector) -> Self {
        let n = knots.n_elements();
        let dof_count = if knots.family().is_periodic() {
            n
        } else {
            n + knots.degree()
        };
        Self { knots, dof_count }
    }

    /// Shorthand for a quadratic space of the given family.
    pub fn quadratic(family: MeshFamily, n: usize, stretch: f64) -> Result<Self> {
        Ok(Self::new(KnotVector::build(family, n, stretch)?))
    }

    pub fn knot_vector(&self) -> &KnotVector {
        &self.knots
    }

    pub fn degree(&self) -> usize {
        self.knots.degree()
    }

    pub fn n_elements(&self) -> usize {
        self.knots.n_elements()
    }

    pub fn dof_count(&self) -> usize {
        self.dof_count
    }

    pub fn family(&self) -> MeshFamily {
        self.knots.family()
    }

    pub fn is_periodic(&self) -> bool {
        self.family().is_periodic()
    }

    /// Largest element width.
    pub fn mesh_size(&self) -> f64 {
        self.knots
            .breakpoints()
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    pub fn element_interval(&self, e: usize) -> (f64, f64) {
        let p = self.degree();
        let t = self.knots.knots();
        (t[p + e], t[p + e + 1])
    }

    /// Global indices of the functions active on element `e`.
    pub fn active_indices(&self, e: usize) -> Vec<usize> {
        let p = self.degree();
        (e..=e + p)
            .map(|i| {
                if self.is_periodic() {
                    i % self.dof_count
                } else {
                    i
                }
            })
            .collect()
    }

    /// Element containing `x`; knots belong to the element on their right,
    /// except x = 1 which belongs to the last element.
    pub fn locate(&self, x: f64) -> Result<usize> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain {
                value: x,
                domain: "[0, 1]",
            });
        }
        let breaks = self.knots.breakpoints();
        let n = self.n_elements();
        let e = breaks.partition_point(|&b| b <= x).saturating_sub(1);
        Ok(e.min(n - 1))
    }

    pub fn element_ranges(&self) -> Vec<ElementRange> {
        (0..self.n_elements())
            .map(|e| {
                let (a, b) = self.element_interval(e);
                ElementRange {
                    a,
                    b,
                    active: self.active_indices(e),
                }
            })
            .collect()
    }

    pub fn eval_basis(&self, x: f64) -> Result<BasisEval> {
        let e = self.locate(x)?;
        Ok(self.eval_on_element(e, x))
    }

    /// Evaluates the polynomial pieces of element `e` at `x` (which may be
    /// an endpoint of the element; no range check is performed).
    pub fn eval_on_element(&self, e: usize, x: f64) -> BasisEval {
        let p = self.degree();
        let t = self.knots.knots();
        let span = p + e;

        // Cox-de Boor triangle; level k holds N_{span-k+r, k} for r = 0..=k.
        let mut level = vec![1.0];
        let mut below = Vec::new();
        for k in 1..=p {
            let mut next = vec![0.0; k + 1];
            for (r, slot) in next.iter_mut().enumerate() {
                let i = span + r - k;
                let mut v = 0.0;
                if r >= 1 {
                    let den = t[i + k] - t[i];
                    if den > 0.0 {
                        v += (x - t[i]) / den * level[r - 1];
                    }
                }
                if r < k {
                    let den = t[i + k + 1] - t[i + 1];
                    if den > 0.0 {
                        v += (t[i + k + 1] - x) / den * level[r];
                    }
                }
                *slot = v;
            }
            below = std::mem::replace(&mut level, next);
        }

        let derivs = (0..=p)
            .map(|r| {
                if p == 0 {
                    return 0.0;
                }
                let i = span + r - p;
                let mut d = 0.0;
                if r >= 1 {
                    let den = t[i + p] - t[i];
                    if den > 0.0 {
                        d += below[r - 1] / den;
                    }
                }
                if r < p {
                    let den = t[i + p + 1] - t[i + 1];
                    if den > 0.0 {
                        d -= below[r] / den;
                    }
                }
                p as f64 * d
            })
            .collect();

        BasisEval {
            element: e,
            indices: self.active_indices(e),
            values: level,
            derivs,
        }
    }

    /// Value and derivative of the spline with full coefficient vector
    /// `coeffs` (length `dof_count`) at `x` on element `e`.
    ///
    /// The derivative is formed from coefficient differences, so it keeps
    /// full relative accuracy for smooth fields on fine meshes.
    pub fn eval_field(&self, coeffs: &[f64], e: usize, x: f64) -> (f64, f64) {
        let b = self.eval_on_element(e, x);
        field_from_basis(&b, coeffs)
    }
}

pub(crate) fn field_from_basis(b: &BasisEval, coeffs: &[f64]) -> (f64, f64) {
    let reference = coeffs[b.indices[b.indices.len() / 2]];
    let mut u = 0.0;
    let mut du = 0.0;
    for ((&i, &v), &d) in b.indices.iter().zip(&b.values).zip(&b.derivs) {
        u += coeffs[i] * v;
        du += (coeffs[i] - reference) * d;
    }
    (u, du)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn open_uniform_knots() {
        let kv = KnotVector::build(MeshFamily::OpenUniform, 4, 1.0).unwrap();
        assert_eq!(kv.knots(), &[0.0, 0.0, 0.0, 0.25, 0.5, 0.75, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn stretched_two_elements() {
        // n = 2 is below the mesh minimum; exercise the progression directly.
        let b = stretched_breaks(2, 1.05);
        assert!((b[1] - 1.0 / 2.05).abs() < 1e-15);
        let kv = KnotVector::build(MeshFamily::OpenStretched, 5, 1.05).unwrap();
        let br = kv.breakpoints();
        let h: Vec<f64> = br.windows(2).map(|w| w[1] - w[0]).collect();
        for w in h.windows(2) {
            assert!((w[1] / w[0] - 1.05).abs() < 1e-12);
        }
        assert_eq!(*br.last().unwrap(), 1.0);
    }

    #[test]
    fn periodic_layout() {
        let s = BSplineSpace::quadratic(MeshFamily::PeriodicUniform, 8, 1.0).unwrap();
        assert_eq!(s.dof_count(), 8);
        let r = s.element_ranges();
        assert_eq!(r.len(), 8);
        for e in &r {
            assert!((e.width() - 0.125).abs() < 1e-15);
        }
        assert_eq!(r[7].active, vec![7, 0, 1]);
    }

    #[test]
    fn open_ranges() {
        let s = BSplineSpace::quadratic(MeshFamily::OpenUniform, 4, 1.0).unwrap();
        let r = s.element_ranges();
        assert_eq!(r.len(), 4);
        assert_eq!((r[0].a, r[0].b), (0.0, 0.25));
        assert_eq!(r[0].active, vec![0, 1, 2]);
        assert_eq!(s.dof_count(), 6);
    }

    #[test]
    fn build_errors() {
        assert!(matches!(
            KnotVector::build(MeshFamily::OpenUniform, 2, 1.0),
            Err(Error::InvalidMesh(_))
        ));
        assert!(matches!(
            KnotVector::build(MeshFamily::OpenStretched, 8, 0.9),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn uniform_pieces() {
        let s = BSplineSpace::quadratic(MeshFamily::PeriodicUniform, 8, 1.0).unwrap();
        let h = 0.125;
        for &t in &[0.0, 0.3, 0.77] {
            let x = 3.0 * h + t * h;
            let b = s.eval_on_element(3, x);
            let want = [
                (1.0 - t) * (1.0 - t) / 2.0,
                (-2.0 * t * t + 2.0 * t + 1.0) / 2.0,
                t * t / 2.0,
            ];
            let dwant = [-(1.0 - t) / h, (1.0 - 2.0 * t) / h, t / h];
            for r in 0..3 {
                assert!((b.values[r] - want[r]).abs() < 1e-14);
                assert!((b.derivs[r] - dwant[r]).abs() < 1e-12);
            }
        }
        let b = s.eval_basis(3.0 * h).unwrap();
        assert_eq!(b.element, 3);
        assert!((b.values[0] - 0.5).abs() < 1e-15 && (b.values[1] - 0.5).abs() < 1e-15);
        assert!(b.values[2].abs() < 1e-15);
    }

    #[test]
    fn domain_and_tie_breaking() {
        let s = BSplineSpace::quadratic(MeshFamily::OpenUniform, 4, 1.0).unwrap();
        assert!(matches!(s.eval_basis(1.5), Err(Error::Domain { .. })));
        assert!(s.eval_basis(-1e-9).is_err());
        assert_eq!(s.locate(0.25).unwrap(), 1);
        assert_eq!(s.locate(1.0).unwrap(), 3);
        assert_eq!(s.locate(0.0).unwrap(), 0);
    }

    #[test]
    fn boundary_derivatives_nonzero() {
        for fam in [MeshFamily::OpenUniform, MeshFamily::OpenStretched] {
            let s = BSplineSpace::quadratic(fam, 10, 1.07).unwrap();
            let l = s.eval_basis(0.0).unwrap();
            assert!(l.derivs[0].abs() > 1.0 && l.derivs[1].abs() > 1.0);
            let r = s.eval_basis(1.0).unwrap();
            assert!(r.derivs[1].abs() > 1.0 && r.derivs[2].abs() > 1.0);
        }
    }

    #[test]
    fn interior_integrals_equal_h() {
        // interior functions on a uniform mesh integrate to h (5-point Gauss, exact here)
        let g5 = crate::quadrature::gauss_legendre(5).unwrap();
        let n = 10;
        let s = BSplineSpace::quadratic(MeshFamily::OpenUniform, n, 1.0).unwrap();
        let mut integral = vec![0.0; s.dof_count()];
        for e in 0..n {
            let (a, b) = s.element_interval(e);
            for (&t, &w) in g5.nodes().iter().zip(g5.weights()) {
                let ev = s.eval_on_element(e, a + t * (b - a));
                for (&i, &v) in ev.indices.iter().zip(&ev.values) {
                    integral[i] += w * (b - a) * v;
                }
            }
        }
        for v in &integral[2..n] {
            assert!((v - 0.1).abs() < 1e-15);
        }
        let total: f64 = integral.iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    fn families() -> impl Strategy<Value = (MeshFamily, usize, f64)> {
        (
            prop_oneof![
                Just(MeshFamily::OpenUniform),
                Just(MeshFamily::OpenStretched),
                Just(MeshFamily::PeriodicUniform)
            ],
            3usize..40,
            1.0f64..1.1,
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn partition_of_unity((fam, n, r) in families(), x in 0.0f64..=1.0) {
            let s = BSplineSpace::quadratic(fam, n, r).unwrap();
            let b = s.eval_basis(x).unwrap();
            prop_assert_eq!(b.values.len(), 3);
            let sum: f64 = b.values.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-14);
            prop_assert!(b.values.iter().all(|&v| v >= 0.0));
            let dsum: f64 = b.derivs.iter().sum();
            let scale: f64 = b.derivs.iter().map(|d| d.abs()).sum();
            prop_assert!(dsum.abs() <= 1e-13 * scale.max(1.0));
        }
    }
}
