use nalgebra::DMatrix;

use super::band::SymBandMatrix;
use crate::error::{Error, Result};

/// Largest 2D dimension that may be materialized densely.
pub const MATERIALIZE_CAP: usize = 10_000;

/// Tensor-product operators `K2 = K⊗M + M⊗K` and `M2 = M⊗M` built from one
/// 1D pair used in both directions. Unknown `(i, j)` has flat index
/// `i * n + j`, with `i` the x-direction index.
#[derive(Debug, Clone)]
pub struct TensorOperator2d {
    k: SymBandMatrix,
    m: SymBandMatrix,
}

impl TensorOperator2d {
    pub fn new(k: SymBandMatrix, m: SymBandMatrix) -> Result<Self> {
        if k.dim() != m.dim() {
            return Err(Error::Configuration(format!(
                "1D stiffness and mass dimensions differ ({} vs {})",
                k.dim(),
                m.dim()
            )));
        }
        Ok(Self { k, m })
    }

    pub fn dim_1d(&self) -> usize {
        self.k.dim()
    }

    pub fn dim(&self) -> usize {
        self.k.dim() * self.k.dim()
    }

    /// Dense `(K2, M2)`.
    pub fn materialize(&self) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let dim = self.dim();
        if dim > MATERIALIZE_CAP {
            return Err(Error::TooLarge {
                dim,
                cap: MATERIALIZE_CAP,
            });
        }
        let k = self.k.to_dense();
        let m = self.m.to_dense();
        Ok((k.kronecker(&m) + m.kronecker(&k), m.kronecker(&m)))
    }

    /// `(A ⊗ B) x` for a row-major flat `x`.
    fn kron_apply(a: &SymBandMatrix, b: &SymBandMatrix, x: &[f64]) -> Vec<f64> {
        let n = a.dim();
        // rows of the n x n array X are x-direction slices
        let mut tmp = vec![0.0; n * n];
        for i in 0..n {
            let row = b.matvec(&x[i * n..(i + 1) * n]);
            tmp[i * n..(i + 1) * n].copy_from_slice(&row);
        }
        let mut out = vec![0.0; n * n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            for i in 0..n {
                col[i] = tmp[i * n + j];
            }
            for (i, v) in a.matvec(&col).into_iter().enumerate() {
                out[i * n + j] = v;
            }
        }
        out
    }

    pub fn apply_stiffness(&self, x: &[f64]) -> Vec<f64> {
        let a = Self::kron_apply(&self.k, &self.m, x);
        let b = Self::kron_apply(&self.m, &self.k, x);
        a.into_iter().zip(b).map(|(p, q)| p + q).collect()
    }

    pub fn apply_mass(&self, x: &[f64]) -> Vec<f64> {
        Self::kron_apply(&self.m, &self.m, x)
    }

    pub fn rayleigh_quotient(&self, x: &[f64]) -> f64 {
        let dot = |y: Vec<f64>| y.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        dot(self.apply_stiffness(x)) / dot(self.apply_mass(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_1d, Boundary, QuadraturePolicy};
    use crate::quadrature::gauss_legendre;
    use crate::spline::{BSplineSpace, MeshFamily};
    use nalgebra::DVector;

    fn op(family: MeshFamily, n: usize, bc: Boundary) -> TensorOperator2d {
        let s = BSplineSpace::quadratic(family, n, 1.0).unwrap();
        let d = assemble_1d(
            &s,
            &QuadraturePolicy::uniform(gauss_legendre(3).unwrap()),
            bc,
        )
        .unwrap();
        TensorOperator2d::new(d.stiffness().clone(), d.mass().clone()).unwrap()
    }

    #[test]
    fn dimension_and_implicit_apply() {
        let t = op(MeshFamily::OpenUniform, 4, Boundary::Dirichlet);
        assert_eq!(t.dim(), 16);
        let (k, m) = t.materialize().unwrap();
        let x: Vec<f64> = (0..16).map(|i| (i as f64 * 0.7).cos()).collect();
        let xv = DVector::from_column_slice(&x);
        let kd = &k * &xv;
        let md = &m * &xv;
        for (i, v) in t.apply_stiffness(&x).iter().enumerate() {
            assert!((v - kd[i]).abs() < 1e-12);
        }
        for (i, v) in t.apply_mass(&x).iter().enumerate() {
            assert!((v - md[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn constants_in_periodic_kernel() {
        let t = op(MeshFamily::PeriodicUniform, 6, Boundary::Periodic);
        let y = t.apply_stiffness(&vec![1.0; 36]);
        assert!(y.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn materialize_cap() {
        let t = op(MeshFamily::OpenUniform, 101, Boundary::Dirichlet);
        assert!(matches!(t.materialize(), Err(Error::TooLarge { .. })));
    }
}
