//! Stiffness and mass assembly under configurable quadrature policies.

mod band;
mod stencil;
mod tensor;

pub use band::SymBandMatrix;
pub use stencil::{blend_parameter, extract_stencil, Stencil, TRANSLATION_TOLERANCE};
pub use tensor::{TensorOperator2d, MATERIALIZE_CAP};

use crate::error::{Error, Result};
use crate::quadrature::{blend, g25, gauss_legendre, nq2, Anchor, QuadratureRule, RuleKind};
use crate::spline::{field_from_basis, BSplineSpace, BasisEval, MeshFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Dirichlet,
    Periodic,
}

impl Boundary {
    pub fn name(self) -> &'static str {
        match self {
            Boundary::Dirichlet => "dirichlet",
            Boundary::Periodic => "periodic",
        }
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dirichlet" => Ok(Boundary::Dirichlet),
            "periodic" => Ok(Boundary::Periodic),
            other => Err(Error::Configuration(format!(
                "unknown boundary condition '{other}' (expected dirichlet or periodic)"
            ))),
        }
    }
}

/// Rules for the stiffness and mass integrals, which may differ.
#[derive(Debug, Clone, PartialEq)]
pub struct RulePair {
    pub stiffness: QuadratureRule,
    pub mass: QuadratureRule,
}

impl RulePair {
    pub fn same(rule: QuadratureRule) -> Self {
        Self {
            stiffness: rule.clone(),
            mass: rule,
        }
    }

    pub fn stencil(&self) -> Stencil {
        Stencil::from_rules(&self.stiffness, &self.mass)
    }

    fn uses_nq2(&self) -> bool {
        matches!(self.stiffness.kind(), RuleKind::Nq2(_))
            || matches!(self.mass.kind(), RuleKind::Nq2(_))
    }
}

/// Where the endpoint node of the boundary-element rule sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryAnchor {
    /// On the domain boundary (left-anchored rule on the first element).
    #[default]
    Domain,
    /// On the interface with the neighbouring interior element.
    Interface,
}

impl std::str::FromStr for BoundaryAnchor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "domain" => Ok(BoundaryAnchor::Domain),
            "interface" => Ok(BoundaryAnchor::Interface),
            other => Err(Error::Configuration(format!(
                "unknown boundary anchor '{other}' (expected domain or interface)"
            ))),
        }
    }
}

/// Options for the boundary-element treatment of open meshes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryOptions {
    pub anchor: BoundaryAnchor,
    /// Adds the point weights that cancel the end terms left by an interior
    /// rule that is exact only on the repeating cubic pattern.
    pub interface_correction: bool,
}

impl Default for BoundaryOptions {
    fn default() -> Self {
        Self {
            anchor: BoundaryAnchor::Domain,
            interface_correction: true,
        }
    }
}

/// Rules for the first and last element of an open mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryRules {
    pub first: RulePair,
    pub last: RulePair,
    pub interface_correction: bool,
}

impl BoundaryRules {
    /// 2.5-point rules on both boundary elements.
    pub fn g25(options: BoundaryOptions) -> Self {
        let (first, last) = match options.anchor {
            BoundaryAnchor::Domain => (Anchor::Left, Anchor::Right),
            BoundaryAnchor::Interface => (Anchor::Right, Anchor::Left),
        };
        Self {
            first: RulePair::same(g25(first)),
            last: RulePair::same(g25(last)),
            interface_correction: options.interface_correction,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraturePolicy {
    pub interior: RulePair,
    pub boundary: Option<BoundaryRules>,
}

impl QuadraturePolicy {
    pub fn uniform(rule: QuadratureRule) -> Self {
        Self {
            interior: RulePair::same(rule),
            boundary: None,
        }
    }
}

/// Named policies used by the command-line front end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    FullG3,
    ReducedG2,
    Nq2,
    G25,
    Nq2G25Boundary,
    BlendG3G2,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::FullG3,
        Preset::ReducedG2,
        Preset::Nq2,
        Preset::G25,
        Preset::Nq2G25Boundary,
        Preset::BlendG3G2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::FullG3 => "full-g3",
            Preset::ReducedG2 => "g2",
            Preset::Nq2 => "nq2",
            Preset::G25 => "g25",
            Preset::Nq2G25Boundary => "nq2-g25-boundary",
            Preset::BlendG3G2 => "blend-g3-g2",
        }
    }

    /// Optimal weight of the three-point Gauss rule in its blend with the
    /// two-point rule.
    pub fn optimal_blend_tau() -> Result<f64> {
        let target = Stencil::from_rule(&nq2(1)?);
        blend_parameter(&gauss_legendre(3)?, &gauss_legendre(2)?, &target)
    }

    /// Interior rule of the preset.
    pub fn interior_rule(self) -> Result<QuadratureRule> {
        Ok(match self {
            Preset::FullG3 => gauss_legendre(3)?,
            Preset::ReducedG2 => gauss_legendre(2)?,
            Preset::Nq2 | Preset::Nq2G25Boundary => nq2(1)?,
            Preset::G25 => g25(Anchor::Right),
            Preset::BlendG3G2 => blend(
                &gauss_legendre(3)?,
                &gauss_legendre(2)?,
                Self::optimal_blend_tau()?,
            ),
        })
    }

    /// Uniform-periodic stencil of the preset.
    pub fn stencil(self) -> Result<Stencil> {
        Ok(Stencil::from_rule(&self.interior_rule()?))
    }

    /// Resolves the preset for a mesh that is periodic or not. Plain `nq2`
    /// on an open mesh is upgraded to 2.5-point boundary elements.
    pub fn policy(self, periodic: bool, options: BoundaryOptions) -> Result<QuadraturePolicy> {
        let mut policy = QuadraturePolicy::uniform(self.interior_rule()?);
        let wants_boundary = match self {
            Preset::Nq2G25Boundary => true,
            Preset::Nq2 if !periodic => {
                log::info!(
                    "preset nq2 on an open mesh: using 2.5-point rules on the boundary elements"
                );
                true
            }
            _ => false,
        };
        if wants_boundary && !periodic {
            policy.boundary = Some(BoundaryRules::g25(options));
        }
        Ok(policy)
    }
}

impl std::fmt::Display for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == key)
            .ok_or_else(|| {
                let names: Vec<_> = Preset::ALL.iter().map(|p| p.name()).collect();
                Error::Configuration(format!(
                    "unknown preset '{s}' (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// A weighted evaluation point of an assembled bilinear form. The weight
/// already includes the element Jacobian.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadPoint {
    pub x: f64,
    pub weight: f64,
    pub basis: BasisEval,
}

/// Assembled 1D system together with the quadrature points that define it.
#[derive(Debug, Clone)]
pub struct Discretization {
    space: BSplineSpace,
    bc: Boundary,
    k: SymBandMatrix,
    m: SymBandMatrix,
    stiffness_points: Vec<QuadPoint>,
    mass_points: Vec<QuadPoint>,
    free: Vec<usize>,
}

impl Discretization {
    pub fn space(&self) -> &BSplineSpace {
        &self.space
    }

    pub fn boundary(&self) -> Boundary {
        self.bc
    }

    pub fn stiffness(&self) -> &SymBandMatrix {
        &self.k
    }

    pub fn mass(&self) -> &SymBandMatrix {
        &self.m
    }

    /// Number of unknowns after boundary conditions.
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// Global basis index of each unknown.
    pub fn free_dofs(&self) -> &[usize] {
        &self.free
    }

    pub fn stiffness_points(&self) -> &[QuadPoint] {
        &self.stiffness_points
    }

    pub fn mass_points(&self) -> &[QuadPoint] {
        &self.mass_points
    }

    /// Full coefficient vector (length `dof_count`) from a reduced one.
    pub fn expand(&self, reduced: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.space.dof_count()];
        for (&g, &v) in self.free.iter().zip(reduced) {
            full[g] = v;
        }
        full
    }

    /// The quadrature forms `(a(u, u), b(u, u))` evaluated pointwise.
    ///
    /// Equal to `(uᵀKu, uᵀMu)` in exact arithmetic, but free of the
    /// cancellation in the matrix products for smooth fields on fine meshes.
    pub fn forms(&self, reduced: &[f64]) -> (f64, f64) {
        let c = self.expand(reduced);
        let a = self
            .stiffness_points
            .iter()
            .map(|p| {
                let (_, du) = field_from_basis(&p.basis, &c);
                p.weight * du * du
            })
            .sum();
        let b = self
            .mass_points
            .iter()
            .map(|p| {
                let (u, _) = field_from_basis(&p.basis, &c);
                p.weight * u * u
            })
            .sum();
        (a, b)
    }

    pub fn rayleigh_quotient(&self, reduced: &[f64]) -> f64 {
        let (a, b) = self.forms(reduced);
        a / b
    }
}

fn push_rule(points: &mut Vec<QuadPoint>, space: &BSplineSpace, e: usize, rule: &QuadratureRule) {
    let (a, b) = space.element_interval(e);
    let h = b - a;
    for (t, w) in rule.pairs() {
        let x = a + t * h;
        points.push(QuadPoint {
            x,
            weight: w * h,
            basis: space.eval_on_element(e, x),
        });
    }
}

fn scatter(points: &[QuadPoint], dofs: usize, cyclic: bool, derivative: bool) -> SymBandMatrix {
    let mut mat = SymBandMatrix::zeros(dofs, 2, cyclic);
    for p in points {
        let f = if derivative {
            &p.basis.derivs
        } else {
            &p.basis.values
        };
        let idx = &p.basis.indices;
        for a in 0..idx.len() {
            for b in a..idx.len() {
                mat.add(idx[a], idx[b], p.weight * f[a] * f[b]);
            }
        }
    }
    mat
}

/// Assembles stiffness and mass matrices of a quadratic space.
///
/// Dirichlet conditions remove the first and last basis functions. On open
/// meshes the policy's boundary rules, when present, replace the interior
/// rule on the first and last element.
pub fn assemble_1d(
    space: &BSplineSpace,
    policy: &QuadraturePolicy,
    bc: Boundary,
) -> Result<Discretization> {
    let periodic = space.is_periodic();
    match (bc, periodic) {
        (Boundary::Periodic, false) => {
            return Err(Error::Configuration(
                "periodic boundary conditions need the periodic-uniform mesh family".into(),
            ))
        }
        (Boundary::Dirichlet, true) => {
            return Err(Error::Configuration(
                "Dirichlet boundary conditions need an open mesh family".into(),
            ))
        }
        _ => {}
    }
    if space.degree() != 2 {
        return Err(Error::Configuration(format!(
            "assembly supports quadratic spaces only, got degree {}",
            space.degree()
        )));
    }
    if policy.interior.uses_nq2() {
        if space.family() == MeshFamily::OpenStretched {
            return Err(Error::PolicyInvalid(
                "the two-point rule needs a uniform mesh".into(),
            ));
        }
        if !periodic && policy.boundary.is_none() {
            return Err(Error::PolicyInvalid(
                "the two-point interior rule needs a boundary rule on open meshes".into(),
            ));
        }
    }

    let n = space.n_elements();
    let boundary = if periodic {
        None
    } else {
        policy.boundary.as_ref()
    };
    let mut kp = Vec::new();
    let mut mp = Vec::new();
    for e in 0..n {
        let pair = match boundary {
            Some(b) if e == 0 => &b.first,
            Some(b) if e == n - 1 => &b.last,
            _ => &policy.interior,
        };
        push_rule(&mut kp, space, e, &pair.stiffness);
        push_rule(&mut mp, space, e, &pair.mass);
    }
    if boundary.is_some_and(|b| b.interface_correction) && n >= 3 {
        let interior = &policy.interior;
        for (points, rule) in [(&mut kp, &interior.stiffness), (&mut mp, &interior.mass)] {
            let beta = rule.cubic_defect();
            if beta.abs() <= 1e-15 {
                continue;
            }
            let (x1, x2) = space.element_interval(1);
            let (y1, y2) = space.element_interval(n - 2);
            points.push(QuadPoint {
                x: x1,
                weight: beta * (x2 - x1),
                basis: space.eval_on_element(0, x1),
            });
            points.push(QuadPoint {
                x: y2,
                weight: -beta * (y2 - y1),
                basis: space.eval_on_element(n - 1, y2),
            });
        }
    }

    let dofs = space.dof_count();
    let mut k = scatter(&kp, dofs, periodic, true);
    let mut m = scatter(&mp, dofs, periodic, false);
    let free: Vec<usize> = match bc {
        Boundary::Periodic => (0..dofs).collect(),
        Boundary::Dirichlet => (1..dofs - 1).collect(),
    };
    if bc == Boundary::Dirichlet {
        k = k.remove(&[0, dofs - 1])?;
        m = m.remove(&[0, dofs - 1])?;
    }
    if !m.is_positive_definite() {
        return Err(Error::PolicyInvalid(
            "assembled mass matrix is not positive definite".into(),
        ));
    }
    Ok(Discretization {
        space: space.clone(),
        bc,
        k,
        m,
        stiffness_points: kp,
        mass_points: mp,
        free,
    })
}

/// Assembles a named preset on a freshly built mesh.
pub fn assemble_preset(
    preset: Preset,
    family: MeshFamily,
    n: usize,
    stretch: f64,
    bc: Boundary,
    options: BoundaryOptions,
) -> Result<Discretization> {
    let space = BSplineSpace::quadratic(family, n, stretch)?;
    let policy = preset.policy(space.is_periodic(), options)?;
    assemble_1d(&space, &policy, bc)
}
