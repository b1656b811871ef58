//! Reference spacetimes with closed-form derivatives and their Killing algebras.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::dynamics::{ChartObserver, Observer};
use crate::fields::{Constants, EmField, MetricField, SpacetimeModel};
use crate::momentum::SymmetryAlgebra;
use crate::sampling::PointSampler;
use crate::symmetry::{AffineField, AffineScalar, InverseRadius, SpecialPhaseFunction, VectorField};
use crate::{Error, Mat4, Result, Vec4};

/// Flat metric `diag(−1, 1, 1, 1)` in inertial coordinates.
#[derive(Debug, Clone, Copy, Default)]
pub struct MinkowskiMetric;

impl MetricField for MinkowskiMetric {
    fn components(&self, _x: &Vec4) -> Result<Mat4> {
        Ok(Mat4::from_diagonal(&Vec4::new(-1.0, 1.0, 1.0, 1.0)))
    }

    fn derivatives(&self, _x: &Vec4) -> Result<[Mat4; 4]> {
        Ok([Mat4::zeros(); 4])
    }

    fn second_derivatives(&self, _x: &Vec4) -> Result<[[Mat4; 4]; 4]> {
        Ok([[Mat4::zeros(); 4]; 4])
    }

    fn analytic_derivatives(&self) -> bool {
        true
    }
}

/// Reissner–Nordström metric in `(t, r, θ, φ)`:
/// `−f dt² + f⁻¹ dr² + r² dΩ²`, `f = 1 − k_s/r + k_q²/r²`.
#[derive(Debug, Clone, Copy)]
pub struct ReissnerNordstromMetric {
    pub k_s: f64,
    pub k_q: f64,
}

/// Points with `|sin θ|` below this are outside the chart.
pub const POLAR_MARGIN: f64 = 1e-6;

impl ReissnerNordstromMetric {
    /// Outer horizon radius, or 0 without a horizon.
    pub fn r_plus(&self) -> f64 {
        let d = self.k_s * self.k_s - 4.0 * self.k_q * self.k_q;
        if d < 0.0 {
            0.0
        } else {
            0.5 * (self.k_s + d.sqrt())
        }
    }

    fn f(&self, r: f64) -> (f64, f64, f64) {
        let (ks, q2) = (self.k_s, self.k_q * self.k_q);
        let f = 1.0 - ks / r + q2 / (r * r);
        let f1 = ks / (r * r) - 2.0 * q2 / (r * r * r);
        let f2 = -2.0 * ks / (r * r * r) + 6.0 * q2 / (r * r * r * r);
        (f, f1, f2)
    }
}

impl MetricField for ReissnerNordstromMetric {
    fn components(&self, x: &Vec4) -> Result<Mat4> {
        let (r, th) = (x[1], x[2]);
        let (f, _, _) = self.f(r);
        let s = th.sin();
        Ok(Mat4::from_diagonal(&Vec4::new(-f, 1.0 / f, r * r, r * r * s * s)))
    }

    fn derivatives(&self, x: &Vec4) -> Result<[Mat4; 4]> {
        let (r, th) = (x[1], x[2]);
        let (f, f1, _) = self.f(r);
        let (s, c) = (th.sin(), th.cos());
        let mut out = [Mat4::zeros(); 4];
        out[1] = Mat4::from_diagonal(&Vec4::new(-f1, -f1 / (f * f), 2.0 * r, 2.0 * r * s * s));
        out[2][(3, 3)] = 2.0 * r * r * s * c;
        Ok(out)
    }

    fn second_derivatives(&self, x: &Vec4) -> Result<[[Mat4; 4]; 4]> {
        let (r, th) = (x[1], x[2]);
        let (f, f1, f2) = self.f(r);
        let (s, c) = (th.sin(), th.cos());
        let mut out = [[Mat4::zeros(); 4]; 4];
        out[1][1] = Mat4::from_diagonal(&Vec4::new(-f2, (2.0 * f1 * f1 - f * f2) / (f * f * f), 2.0, 2.0 * s * s));
        out[1][2][(3, 3)] = 4.0 * r * s * c;
        out[2][1][(3, 3)] = 4.0 * r * s * c;
        out[2][2][(3, 3)] = 2.0 * r * r * (2.0 * th).cos();
        Ok(out)
    }

    fn check_domain(&self, x: &Vec4) -> Result<()> {
        let rp = self.r_plus();
        if !(x[1] > rp) || !(x[1] > 0.0) {
            return Err(Error::ChartDomain { x: (*x).into(), reason: format!("r must exceed {rp}") });
        }
        if !(x[2].sin() > POLAR_MARGIN) {
            return Err(Error::ChartDomain { x: (*x).into(), reason: "θ must lie off the polar axis".into() });
        }
        Ok(())
    }

    fn chart_margin(&self, x: &Vec4) -> f64 {
        (x[1] - self.r_plus()).min(x[2].sin() - POLAR_MARGIN)
    }

    fn analytic_derivatives(&self) -> bool {
        true
    }
}

/// Coulomb potential `A = −(1/r) dt` of the central charge.
#[derive(Debug, Clone, Copy, Default)]
pub struct CoulombField;

impl EmField for CoulombField {
    fn field(&self, x: &Vec4) -> Result<Mat4> {
        let e = 1.0 / (x[1] * x[1]);
        let mut f = Mat4::zeros();
        f[(1, 0)] = e;
        f[(0, 1)] = -e;
        Ok(f)
    }

    fn field_derivatives(&self, x: &Vec4) -> Result<[Mat4; 4]> {
        let d = -2.0 / (x[1] * x[1] * x[1]);
        let mut out = [Mat4::zeros(); 4];
        out[1][(1, 0)] = d;
        out[1][(0, 1)] = -d;
        Ok(out)
    }

    fn has_potential(&self) -> bool {
        true
    }

    fn potential(&self, x: &Vec4) -> Result<Vec4> {
        Ok(Vec4::new(-1.0 / x[1], 0.0, 0.0, 0.0))
    }

    fn potential_jacobian(&self, x: &Vec4) -> Result<Mat4> {
        let mut j = Mat4::zeros();
        j[(0, 1)] = 1.0 / (x[1] * x[1]);
        Ok(j)
    }
}

/// Rotation generators of the round sphere in `(t, r, θ, φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphericalRotation {
    /// `sin φ ∂_θ + cot θ cos φ ∂_φ`.
    L1,
    /// `cos φ ∂_θ − cot θ sin φ ∂_φ`.
    L2,
    /// `∂_φ`.
    L3,
}

impl VectorField for SphericalRotation {
    fn value(&self, x: &Vec4) -> Result<Vec4> {
        let (th, ph) = (x[2], x[3]);
        let cot = th.cos() / th.sin();
        Ok(match self {
            SphericalRotation::L1 => Vec4::new(0.0, 0.0, ph.sin(), cot * ph.cos()),
            SphericalRotation::L2 => Vec4::new(0.0, 0.0, ph.cos(), -cot * ph.sin()),
            SphericalRotation::L3 => Vec4::new(0.0, 0.0, 0.0, 1.0),
        })
    }

    fn jacobian(&self, x: &Vec4) -> Result<Mat4> {
        let (th, ph) = (x[2], x[3]);
        let (s, c) = (th.sin(), th.cos());
        let cot = c / s;
        let mut j = Mat4::zeros();
        match self {
            SphericalRotation::L1 => {
                j[(2, 3)] = ph.cos();
                j[(3, 2)] = -ph.cos() / (s * s);
                j[(3, 3)] = -cot * ph.sin();
            }
            SphericalRotation::L2 => {
                j[(2, 3)] = -ph.sin();
                j[(3, 2)] = ph.sin() / (s * s);
                j[(3, 3)] = -cot * ph.cos();
            }
            SphericalRotation::L3 => {}
        }
        Ok(j)
    }

    fn hessian(&self, x: &Vec4) -> Result<[Mat4; 4]> {
        let (th, ph) = (x[2], x[3]);
        let (s, c) = (th.sin(), th.cos());
        let cot = c / s;
        let mut h = [Mat4::zeros(); 4];
        let (a, b) = match self {
            SphericalRotation::L1 => (ph.sin(), ph.cos()),
            SphericalRotation::L2 => (ph.cos(), -ph.sin()),
            SphericalRotation::L3 => return Ok(h),
        };
        // X² = a(φ), X³ = cot θ · b(φ) with a'' = −a, b'' = −b.
        let db = match self {
            SphericalRotation::L1 => -ph.sin(),
            _ => -ph.cos(),
        };
        h[2][(3, 3)] = -a;
        h[3][(2, 2)] = 2.0 * c / (s * s * s) * b;
        h[3][(2, 3)] = -db / (s * s);
        h[3][(3, 2)] = -db / (s * s);
        h[3][(3, 3)] = -cot * b;
        Ok(h)
    }
}

/// Catalog entry kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CatalogKind {
    Minkowski,
    ReissnerNordstrom { k_s: f64, k_q: f64, q0: f64 },
}

/// A reference model with its chart, Killing algebra and observer.
#[derive(Clone)]
pub struct CatalogModel {
    pub kind: CatalogKind,
    pub model: SpacetimeModel,
    pub algebra: SymmetryAlgebra,
    pub observer: Arc<dyn Observer>,
    /// Outer horizon radius for Reissner–Nordström, 0 otherwise.
    pub r_plus: f64,
}

impl CatalogModel {
    /// Random chart position suitable for probing.
    pub fn sample_position(&self, s: &mut PointSampler) -> Vec4 {
        match self.kind {
            CatalogKind::Minkowski => {
                Vec4::new(s.uniform(-5.0, 5.0), s.uniform(-5.0, 5.0), s.uniform(-5.0, 5.0), s.uniform(-5.0, 5.0))
            }
            CatalogKind::ReissnerNordstrom { .. } => {
                let rmin = (1.5 * self.r_plus).max(self.r_plus + 1.0).max(1.0);
                Vec4::new(s.uniform(-5.0, 5.0), s.uniform(rmin, 30.0), s.uniform(0.3, PI - 0.3), s.uniform(-PI, PI))
            }
        }
    }

    /// `n` random timelike probe points.
    pub fn sample_points(&self, seed: u64, n: usize) -> Result<Vec<crate::phase::PhasePoint>> {
        let mut s = PointSampler::new(seed);
        s.points(&self.model, n, |s| self.sample_position(s))
    }

    /// Index of the basis element with the given name.
    pub fn basis_index(&self, name: &str) -> Option<usize> {
        self.algebra.basis.iter().position(|f| f.name == name)
    }
}

fn fixed_probes(kind: &CatalogKind, r_plus: f64) -> (Vec<Vec4>, Vec<Vec4>) {
    match kind {
        CatalogKind::Minkowski => (
            vec![
                Vec4::new(0.3, -1.2, 0.7, 2.1),
                Vec4::new(-1.5, 0.4, 1.9, -0.8),
                Vec4::new(2.2, 1.1, -0.6, 0.5),
                Vec4::new(0.9, -0.3, -1.4, 1.6),
            ],
            vec![Vec4::new(1.7, 0.2, -2.3, 0.9), Vec4::new(-0.4, 2.6, 1.3, -1.1)],
        ),
        CatalogKind::ReissnerNordstrom { .. } => {
            let r0 = (1.5 * r_plus).max(r_plus + 1.0).max(1.0);
            (
                vec![
                    Vec4::new(0.3, r0 + 2.1, 0.7, 0.4),
                    Vec4::new(-1.5, r0 + 5.3, 1.9, -2.2),
                    Vec4::new(2.2, r0 + 0.8, 1.2, 1.3),
                    Vec4::new(0.9, r0 + 9.1, 2.4, 2.9),
                ],
                vec![Vec4::new(1.7, r0 + 3.3, 1.1, -0.6), Vec4::new(-0.4, r0 + 7.7, 0.5, 2.0)],
            )
        }
    }
}

/// Minkowski spacetime without field and its Poincaré algebra
/// `P0..P3, J23, J31, J12, K1..K3`.
pub fn minkowski(constants: Constants) -> Result<CatalogModel> {
    let model = SpacetimeModel::new("minkowski", Arc::new(MinkowskiMetric), constants)?;
    let mut basis = Vec::new();
    for k in 0..4 {
        basis.push(SpecialPhaseFunction::pure(format!("P{k}"), Arc::new(AffineField::translation(k))));
    }
    for (name, a, b) in [("J23", 2, 3), ("J31", 3, 1), ("J12", 1, 2)] {
        basis.push(SpecialPhaseFunction::pure(name, Arc::new(AffineField::rotation(a, b))));
    }
    for k in 1..4 {
        basis.push(SpecialPhaseFunction::pure(format!("K{k}"), Arc::new(AffineField::boost(k))));
    }
    let kind = CatalogKind::Minkowski;
    let (fit, check) = fixed_probes(&kind, 0.0);
    let algebra = SymmetryAlgebra::new(basis, &fit, &check)?;
    Ok(CatalogModel { kind, model, algebra, observer: Arc::new(ChartObserver), r_plus: 0.0 })
}

/// Reissner–Nordström with Coulomb potential `A = −(1/r) dt` and particle
/// charge `q0` (which replaces `constants.q`). The algebra is
/// `T = ∂_t` with `f̆ = q0/(ħ r)` and the rotations `L1, L2, L3` with `f̆ = 0`.
pub fn reissner_nordstrom(constants: Constants, k_s: f64, k_q: f64, q0: f64) -> Result<CatalogModel> {
    if !(k_s.is_finite() && k_s >= 0.0 && k_q.is_finite() && q0.is_finite()) {
        return Err(Error::InvalidArgument(format!("invalid parameters k_s = {k_s}, k_q = {k_q}, q0 = {q0}")));
    }
    let metric = ReissnerNordstromMetric { k_s, k_q };
    let r_plus = metric.r_plus();
    let model = SpacetimeModel::new("reissner_nordstrom", Arc::new(metric), constants.with_charge(q0))?
        .with_em(Arc::new(CoulombField));
    let basis = vec![
        SpecialPhaseFunction::new(
            "T",
            Arc::new(AffineField::translation(0)),
            Arc::new(InverseRadius { k: q0 / constants.hbar }),
        ),
        SpecialPhaseFunction::new("L1", Arc::new(SphericalRotation::L1), Arc::new(AffineScalar::zero())),
        SpecialPhaseFunction::new("L2", Arc::new(SphericalRotation::L2), Arc::new(AffineScalar::zero())),
        SpecialPhaseFunction::new("L3", Arc::new(SphericalRotation::L3), Arc::new(AffineScalar::zero())),
    ];
    let kind = CatalogKind::ReissnerNordstrom { k_s, k_q, q0 };
    let (fit, check) = fixed_probes(&kind, r_plus);
    let algebra = SymmetryAlgebra::new(basis, &fit, &check)?;
    Ok(CatalogModel { kind, model, algebra, observer: Arc::new(ChartObserver), r_plus })
}
