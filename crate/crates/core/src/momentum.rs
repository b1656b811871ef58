//! Symmetry algebras, their action on phase space and the momentum map
//! `J_ξ = Θ(X_ξ₍₁₎) = −τ̂(X_ξ) + Â(X_ξ)`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix5, Rotation3, Unit};

use crate::dynamics::{theta, PhaseStructure};
use crate::fields::{central_diff_vec4, fd_step, SpacetimeModel};
use crate::forms;
use crate::phase::{fd_steps, FD_STEP};
use crate::motion::Trajectory;
use crate::phase::PhasePoint;
use crate::symmetry::{
    holonomic_lift, special_gradient, AffineField, Commutator, MinusPotentialOf, SpecialPhaseFunction, VectorField,
};
use crate::{Error, Mat3, Mat4, Result, Vec3, Vec4, Vec7};

/// A diffeomorphism of the chart.
pub trait PointMap: Send + Sync {
    fn apply(&self, x: &Vec4) -> Result<Vec4>;

    /// `A[(λ, μ)] = ∂_μ φ^λ`.
    fn jacobian(&self, x: &Vec4) -> Result<Mat4> {
        central_diff_vec4(|y| self.apply(y), x, fd_step(x))
    }
}

/// `x ↦ L x + s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub linear: Mat4,
    pub shift: Vec4,
}

impl AffineMap {
    /// Time-`t` flow of an affine vector field.
    pub fn flow_of(field: &AffineField, t: f64) -> Self {
        let mut a = Matrix5::<f64>::zeros();
        a.fixed_view_mut::<4, 4>(0, 0).copy_from(&field.linear);
        a.fixed_view_mut::<4, 1>(0, 4).copy_from(&field.constant);
        let e = (a * t).exp();
        AffineMap { linear: e.fixed_view::<4, 4>(0, 0).into_owned(), shift: e.fixed_view::<4, 1>(0, 4).into_owned() }
    }
}

impl PointMap for AffineMap {
    fn apply(&self, x: &Vec4) -> Result<Vec4> {
        Ok(self.linear * x + self.shift)
    }

    fn jacobian(&self, _x: &Vec4) -> Result<Mat4> {
        Ok(self.linear)
    }
}

/// Rotation `R` of the angular part of a chart `(t, r, θ, φ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalRotationMap {
    pub rotation: Mat3,
}

impl SphericalRotationMap {
    pub fn about_axis(axis: Vec3, angle: f64) -> Self {
        let r = Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle);
        SphericalRotationMap { rotation: *r.matrix() }
    }
}

fn unit_vector(th: f64, ph: f64) -> Vec3 {
    Vec3::new(th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos())
}

impl PointMap for SphericalRotationMap {
    fn apply(&self, x: &Vec4) -> Result<Vec4> {
        let n = self.rotation * unit_vector(x[2], x[3]);
        Ok(Vec4::new(x[0], x[1], n[2].clamp(-1.0, 1.0).acos(), n[1].atan2(n[0])))
    }

    fn jacobian(&self, x: &Vec4) -> Result<Mat4> {
        let (th, ph) = (x[2], x[3]);
        let dth = Vec3::new(th.cos() * ph.cos(), th.cos() * ph.sin(), -th.sin());
        let dph = Vec3::new(-th.sin() * ph.sin(), th.sin() * ph.cos(), 0.0);
        let n = self.rotation * unit_vector(th, ph);
        let rho2 = n[0] * n[0] + n[1] * n[1];
        if rho2 < 1e-24 {
            return Err(Error::ChartDomain { x: (*x).into(), reason: "image on the polar axis".into() });
        }
        let st = rho2.sqrt();
        let mut a = Mat4::zeros();
        a[(0, 0)] = 1.0;
        a[(1, 1)] = 1.0;
        for (col, d) in [(2usize, dth), (3usize, dph)] {
            let dn = self.rotation * d;
            a[(2, col)] = -dn[2] / st;
            a[(3, col)] = (n[0] * dn[1] - n[1] * dn[0]) / rho2;
        }
        Ok(a)
    }
}

/// Prolonged action on phase space:
/// `x' = φ(x)`, `x'ⁱ₀ = (Aⁱ₀ + Aⁱⱼ xʲ₀)/(A⁰₀ + A⁰ⱼ xʲ₀)` with `A = Dφ(x)`.
pub fn prolong_action(model: &SpacetimeModel, map: &dyn PointMap, p: &PhasePoint) -> Result<PhasePoint> {
    let a = map.jacobian(&p.x)?;
    let y = a * p.dbar0();
    if y[0].abs() < 1e-12 {
        return Err(Error::DegenerateDenominator { value: y[0] });
    }
    let x = map.apply(&p.x)?;
    PhasePoint::new(model, x, Vec3::new(y[1] / y[0], y[2] / y[0], y[3] / y[0]))
}

/// A finite-dimensional algebra of vector fields with its structure constants.
#[derive(Clone)]
pub struct SymmetryAlgebra {
    pub basis: Vec<SpecialPhaseFunction>,
    /// `structure[i][j][k] = c^k_{ij}` with `[X_i, X_j] = c^k_{ij} X_k`.
    pub structure: Vec<Vec<Vec<f64>>>,
    /// Largest residual of the fitted commutators at the verification probes.
    pub closure_residual: f64,
}

fn basis_matrix(basis: &[SpecialPhaseFunction], probes: &[Vec4]) -> Result<DMatrix<f64>> {
    let n = basis.len();
    let mut b = DMatrix::zeros(4 * probes.len(), n);
    for (pi, x) in probes.iter().enumerate() {
        for (k, f) in basis.iter().enumerate() {
            let v = f.field.value(x)?;
            for r in 0..4 {
                b[(4 * pi + r, k)] = v[r];
            }
        }
    }
    Ok(b)
}

fn least_squares(b: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    b.clone()
        .svd(true, true)
        .solve(rhs, 1e-12)
        .map_err(|e| Error::InvalidArgument(format!("least squares failed: {e}")))
}

impl SymmetryAlgebra {
    /// Fits the structure constants on `fit_probes` and checks them on `check_probes`.
    pub fn new(basis: Vec<SpecialPhaseFunction>, fit_probes: &[Vec4], check_probes: &[Vec4]) -> Result<Self> {
        let n = basis.len();
        let b = basis_matrix(&basis, fit_probes)?;
        let mut structure = vec![vec![vec![0.0; n]; n]; n];
        let mut closure_residual: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let comm = Commutator { a: basis[i].field.clone(), b: basis[j].field.clone() };
                let mut rhs = DVector::zeros(4 * fit_probes.len());
                for (pi, x) in fit_probes.iter().enumerate() {
                    let v = comm.value(x)?;
                    for r in 0..4 {
                        rhs[4 * pi + r] = v[r];
                    }
                }
                let c = least_squares(&b, &rhs)?;
                for k in 0..n {
                    let ck = if c[k].abs() < 1e-12 { 0.0 } else { c[k] };
                    structure[i][j][k] = ck;
                    structure[j][i][k] = -ck;
                }
                for x in check_probes {
                    let mut fit = Vec4::zeros();
                    for k in 0..n {
                        fit += basis[k].field.value(x)? * structure[i][j][k];
                    }
                    closure_residual = closure_residual.max((comm.value(x)? - fit).amax());
                }
            }
        }
        Ok(SymmetryAlgebra { basis, structure, closure_residual })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn names(&self) -> Vec<String> {
        self.basis.iter().map(|f| f.name.clone()).collect()
    }

    /// `C[(i, j)] = c^j_{a i}`, the matrix of `[X_a, ·]` acting on coefficient rows.
    pub fn ad(&self, a: usize) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.structure[a][i][j])
    }

    /// `M` with `(Fl_t^{X_a})* X_i = Σ_k M[(i, k)] X_k`, from the structure constants.
    pub fn coadjoint_of_flow(&self, a: usize, t: f64) -> DMatrix<f64> {
        (self.ad(a) * t).exp()
    }

    /// `M` with `φ* X_i = Σ_k M[(i, k)] X_k`, fitted from the pulled-back fields at `probes`.
    pub fn coadjoint_fitted(&self, map: &dyn PointMap, probes: &[Vec4]) -> Result<DMatrix<f64>> {
        let n = self.dim();
        let b = basis_matrix(&self.basis, probes)?;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            let mut rhs = DVector::zeros(4 * probes.len());
            for (pi, x) in probes.iter().enumerate() {
                let a = map.jacobian(x)?;
                let ainv = a.try_inverse().ok_or(Error::SingularMetric { x: (*x).into() })?;
                let v = ainv * self.basis[i].field.value(&map.apply(x)?)?;
                for r in 0..4 {
                    rhs[4 * pi + r] = v[r];
                }
            }
            let c = least_squares(&b, &rhs)?;
            for k in 0..n {
                m[(i, k)] = c[k];
            }
        }
        Ok(m)
    }
}

/// A group element: its action on the chart and on momentum values.
#[derive(Clone)]
pub struct GroupElement {
    pub map: Arc<dyn PointMap>,
    pub coadjoint: DMatrix<f64>,
}

/// Basis special function for the momentum map: `(X, −Â(X))`, so that `f = −J`.
pub fn momentum_function(model: &SpacetimeModel, field: Arc<dyn VectorField>, name: &str) -> SpecialPhaseFunction {
    SpecialPhaseFunction::new(name, field.clone(), Arc::new(MinusPotentialOf { model: model.clone(), field }))
}

/// `J_ξ(p) = Θ_p(X_ξ₍₁₎)` for each basis element.
pub fn momentum_map(model: &SpacetimeModel, algebra: &SymmetryAlgebra, p: &PhasePoint) -> Result<DVector<f64>> {
    let t = theta(model, p)?;
    let mut out = DVector::zeros(algebra.dim());
    for (i, f) in algebra.basis.iter().enumerate() {
        out[i] = t.dot(&holonomic_lift(f.field.as_ref(), p)?);
    }
    Ok(out)
}

/// `dJ_ξ`, assembled analytically.
pub fn momentum_differential(model: &SpacetimeModel, field: Arc<dyn VectorField>, p: &PhasePoint) -> Result<Vec7> {
    let f = momentum_function(model, field, "J");
    Ok(-special_gradient(model, &f, p)?)
}

/// `dJ_ξ` by central differences.
pub fn momentum_differential_fd(model: &SpacetimeModel, field: &dyn VectorField, p: &PhasePoint) -> Result<Vec7> {
    let q = p.to_vec7();
    forms::gradient_fd(
        |y| {
            let pp = PhasePoint::from_vec7(y);
            Ok(theta(model, &pp)?.dot(&holonomic_lift(field, &pp)?))
        },
        &q,
        &fd_steps(model, p, FD_STEP)?,
    )
}

/// `‖i_{X₍₁₎} Ω + dJ‖`.
pub fn momentum_residual(model: &SpacetimeModel, field: Arc<dyn VectorField>, p: &PhasePoint) -> Result<f64> {
    let s = PhaseStructure::new(model, p)?;
    let lift = holonomic_lift(field.as_ref(), p)?;
    let dj = momentum_differential(model, field, p)?;
    Ok((s.omega_flat(&lift) + dj).amax())
}

/// `‖J(g·p) − M J(p)‖`.
pub fn equivariance_residual(
    model: &SpacetimeModel,
    algebra: &SymmetryAlgebra,
    g: &GroupElement,
    p: &PhasePoint,
) -> Result<f64> {
    let gp = prolong_action(model, g.map.as_ref(), p)?;
    let lhs = momentum_map(model, algebra, &gp)?;
    let rhs = &g.coadjoint * momentum_map(model, algebra, p)?;
    Ok((lhs - rhs).amax())
}

/// Per charge, `max_k |J(p_k) − J(p_0)| / max(1, |J(p_0)|)` along a trajectory.
pub fn charge_drift(model: &SpacetimeModel, algebra: &SymmetryAlgebra, traj: &Trajectory) -> Result<DVector<f64>> {
    let j0 = momentum_map(model, algebra, &traj.points[0])?;
    let mut drift = DVector::zeros(algebra.dim());
    for p in &traj.points[1..] {
        let j = momentum_map(model, algebra, p)?;
        for i in 0..algebra.dim() {
            drift[i] = f64::max(drift[i], (j[i] - j0[i]).abs() / j0[i].abs().max(1.0));
        }
    }
    Ok(drift)
}
