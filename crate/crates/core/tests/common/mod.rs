#![allow(dead_code)]

//! Shared fixtures and independent oracles for the integration tests.

use std::sync::Arc;

use jetphase::catalog::{self, CatalogModel};
use jetphase::fields::{christoffel, inverse_metric, Constants, EmField, MetricField, SpacetimeModel};
use jetphase::phase::PhasePoint;
use jetphase::symmetry::{ScalarField, VectorField};
use jetphase::{Mat4, Result, Vec3, Vec4};

pub const EPS: f64 = 0.05;
pub const KS: f64 = 2.0;
pub const KQ: f64 = 0.7;
pub const Q_SRC: f64 = 0.3;

/// Reissner–Nordström with small off-diagonal terms `g01, g03, g12`; a generic
/// metric with every block of the structure forms populated.
pub struct PerturbedMetric;

fn rn_f(r: f64) -> (f64, f64, f64) {
    let q2 = KQ * KQ;
    (1.0 - KS / r + q2 / (r * r), KS / (r * r) - 2.0 * q2 / (r * r * r), -2.0 * KS / (r * r * r) + 6.0 * q2 / (r * r * r * r))
}

fn sym(m: &mut Mat4, a: usize, b: usize, v: f64) {
    m[(a, b)] = v;
    m[(b, a)] = v;
}

impl MetricField for PerturbedMetric {
    fn components(&self, x: &Vec4) -> Result<Mat4> {
        let (t, r, th, ph) = (x[0], x[1], x[2], x[3]);
        let (f, _, _) = rn_f(r);
        let mut g = Mat4::from_diagonal(&Vec4::new(-f, 1.0 / f, r * r, r * r * th.sin().powi(2)));
        sym(&mut g, 0, 1, EPS * th.sin() * ph.cos());
        sym(&mut g, 0, 3, 0.5 * EPS * (0.3 * t).cos());
        sym(&mut g, 1, 2, 0.2 * EPS * r);
        Ok(g)
    }

    fn derivatives(&self, x: &Vec4) -> Result<[Mat4; 4]> {
        let (t, r, th, ph) = (x[0], x[1], x[2], x[3]);
        let (f, f1, _) = rn_f(r);
        let (s, c) = (th.sin(), th.cos());
        let mut d = [Mat4::zeros(); 4];
        sym(&mut d[0], 0, 3, -0.15 * EPS * (0.3 * t).sin());
        d[1] = Mat4::from_diagonal(&Vec4::new(-f1, -f1 / (f * f), 2.0 * r, 2.0 * r * s * s));
        sym(&mut d[1], 1, 2, 0.2 * EPS);
        d[2][(3, 3)] = 2.0 * r * r * s * c;
        sym(&mut d[2], 0, 1, EPS * c * ph.cos());
        sym(&mut d[3], 0, 1, -EPS * s * ph.sin());
        Ok(d)
    }

    fn second_derivatives(&self, x: &Vec4) -> Result<[[Mat4; 4]; 4]> {
        let (t, r, th, ph) = (x[0], x[1], x[2], x[3]);
        let (f, f1, f2) = rn_f(r);
        let (s, c) = (th.sin(), th.cos());
        let mut d = [[Mat4::zeros(); 4]; 4];
        sym(&mut d[0][0], 0, 3, -0.045 * EPS * (0.3 * t).cos());
        d[1][1] = Mat4::from_diagonal(&Vec4::new(-f2, (2.0 * f1 * f1 - f * f2) / (f * f * f), 2.0, 2.0 * s * s));
        d[1][2][(3, 3)] = 4.0 * r * s * c;
        d[2][1][(3, 3)] = 4.0 * r * s * c;
        d[2][2][(3, 3)] = 2.0 * r * r * (2.0 * th).cos();
        sym(&mut d[2][2], 0, 1, -EPS * s * ph.cos());
        sym(&mut d[2][3], 0, 1, -EPS * c * ph.sin());
        sym(&mut d[3][2], 0, 1, -EPS * c * ph.sin());
        sym(&mut d[3][3], 0, 1, -EPS * s * ph.cos());
        Ok(d)
    }

    fn analytic_derivatives(&self) -> bool {
        true
    }
}

/// `A = (−Q/r + ε sin φ, 0.1 ε t, 0.02 r cos θ, 0)`.
pub struct PerturbedField;

impl EmField for PerturbedField {
    fn field(&self, x: &Vec4) -> Result<Mat4> {
        let j = self.potential_jacobian(x)?;
        Ok(j.transpose() - j)
    }

    fn field_derivatives(&self, x: &Vec4) -> Result<[Mat4; 4]> {
        let (r, th, ph) = (x[1], x[2], x[3]);
        let mut d = [Mat4::zeros(); 4];
        // F01 = 0.1ε − Q/r², F03 = −ε cos φ, F12 = 0.02 cos θ
        d[1][(0, 1)] = 2.0 * Q_SRC / (r * r * r);
        d[1][(1, 0)] = -d[1][(0, 1)];
        d[3][(0, 3)] = EPS * ph.sin();
        d[3][(3, 0)] = -d[3][(0, 3)];
        d[2][(1, 2)] = -0.02 * th.sin();
        d[2][(2, 1)] = -d[2][(1, 2)];
        Ok(d)
    }

    fn has_potential(&self) -> bool {
        true
    }

    fn potential(&self, x: &Vec4) -> Result<Vec4> {
        let (t, r, th, ph) = (x[0], x[1], x[2], x[3]);
        Ok(Vec4::new(-Q_SRC / r + EPS * ph.sin(), 0.1 * EPS * t, 0.02 * r * th.cos(), 0.0))
    }

    fn potential_jacobian(&self, x: &Vec4) -> Result<Mat4> {
        let (r, th, ph) = (x[1], x[2], x[3]);
        let mut j = Mat4::zeros();
        j[(0, 1)] = Q_SRC / (r * r);
        j[(0, 3)] = EPS * ph.cos();
        j[(1, 0)] = 0.1 * EPS;
        j[(2, 1)] = 0.02 * th.cos();
        j[(2, 2)] = -0.02 * r * th.sin();
        Ok(j)
    }
}

/// Constants `m = 1.3, c = 1.7, ħ = 0.9, q = ħ` (so that `Â = A`).
pub fn perturbed_constants() -> Constants {
    Constants::new(1.3, 0.9, 1.7, 0.9).unwrap()
}

pub fn perturbed_model() -> SpacetimeModel {
    SpacetimeModel::new("perturbed", Arc::new(PerturbedMetric), perturbed_constants())
        .unwrap()
        .with_em(Arc::new(PerturbedField))
}

pub fn perturbed_point() -> PhasePoint {
    PhasePoint::new(&perturbed_model(), Vec4::new(0.3, 4.0, 1.1, 0.4), Vec3::new(0.1, -0.05, 0.03)).unwrap()
}

/// `X_A = (1 + 0.1 x¹, 0.2 x², cos x³, 0.05 x⁰ x¹)`.
pub struct FieldA;

impl VectorField for FieldA {
    fn value(&self, x: &Vec4) -> Result<Vec4> {
        Ok(Vec4::new(1.0 + 0.1 * x[1], 0.2 * x[2], x[3].cos(), 0.05 * x[0] * x[1]))
    }

    fn jacobian(&self, x: &Vec4) -> Result<Mat4> {
        let mut j = Mat4::zeros();
        j[(0, 1)] = 0.1;
        j[(1, 2)] = 0.2;
        j[(2, 3)] = -x[3].sin();
        j[(3, 0)] = 0.05 * x[1];
        j[(3, 1)] = 0.05 * x[0];
        Ok(j)
    }

    fn hessian(&self, x: &Vec4) -> Result<[Mat4; 4]> {
        let mut h = [Mat4::zeros(); 4];
        h[2][(3, 3)] = -x[3].cos();
        h[3][(0, 1)] = 0.05;
        h[3][(1, 0)] = 0.05;
        Ok(h)
    }
}

/// `X_B = (0.3 x², 1, 0.1 x⁰, sin x¹)`.
pub struct FieldB;

impl VectorField for FieldB {
    fn value(&self, x: &Vec4) -> Result<Vec4> {
        Ok(Vec4::new(0.3 * x[2], 1.0, 0.1 * x[0], x[1].sin()))
    }

    fn jacobian(&self, x: &Vec4) -> Result<Mat4> {
        let mut j = Mat4::zeros();
        j[(0, 2)] = 0.3;
        j[(2, 0)] = 0.1;
        j[(3, 1)] = x[1].cos();
        Ok(j)
    }

    fn hessian(&self, x: &Vec4) -> Result<[Mat4; 4]> {
        let mut h = [Mat4::zeros(); 4];
        h[3][(1, 1)] = -x[1].sin();
        Ok(h)
    }
}

/// `f̆_A = 0.3 (x¹)² + x⁰`.
pub struct ScalarA;

impl ScalarField for ScalarA {
    fn value(&self, x: &Vec4) -> Result<f64> {
        Ok(0.3 * x[1] * x[1] + x[0])
    }

    fn gradient(&self, x: &Vec4) -> Result<Vec4> {
        Ok(Vec4::new(1.0, 0.6 * x[1], 0.0, 0.0))
    }
}

/// `f̆_B = sin x² · x³`.
pub struct ScalarB;

impl ScalarField for ScalarB {
    fn value(&self, x: &Vec4) -> Result<f64> {
        Ok(x[2].sin() * x[3])
    }

    fn gradient(&self, x: &Vec4) -> Result<Vec4> {
        Ok(Vec4::new(0.0, 0.0, x[2].cos() * x[3], x[2].sin()))
    }
}

pub fn minkowski() -> CatalogModel {
    catalog::minkowski(Constants::natural()).unwrap()
}

pub fn rn(k_s: f64, k_q: f64, q0: f64) -> CatalogModel {
    catalog::reissner_nordstrom(Constants::natural(), k_s, k_q, q0).unwrap()
}

/// Parametrized Lorentz-force oracle: integrates
/// `du^λ/dσ = −K_μ^λ_ν u^μ u^ν + (ħ/m) g^{λν} F̂_{νμ} u^μ` in proper time with
/// fixed RK4 steps and returns `(xⁱ, dxⁱ/dx⁰)` at each requested x⁰.
pub struct ParametrizedOracle<'a> {
    pub model: &'a SpacetimeModel,
    pub dsigma: f64,
}

type S8 = nalgebra::SVector<f64, 8>;

impl<'a> ParametrizedOracle<'a> {
    fn rhs(&self, y: &S8) -> S8 {
        let x = Vec4::new(y[0], y[1], y[2], y[3]);
        let u = Vec4::new(y[4], y[5], y[6], y[7]);
        let k = christoffel(self.model, &x).unwrap();
        let g = self.model.metric_at(&x).unwrap();
        let ginv = inverse_metric(&g, &x).unwrap();
        let f = self.model.f_hat_or_zero(&x).unwrap();
        let kc = &self.model.constants;
        let mut a = Vec4::zeros();
        for lam in 0..4 {
            let mut s = 0.0;
            for mu in 0..4 {
                for nu in 0..4 {
                    s -= k.get(mu, lam, nu) * u[mu] * u[nu];
                }
            }
            a[lam] = s;
        }
        a += ginv * f * u * (kc.hbar / kc.m);
        S8::from_column_slice(&[u[0], u[1], u[2], u[3], a[0], a[1], a[2], a[3]])
    }

    fn step(&self, y: &S8, h: f64) -> S8 {
        let k1 = self.rhs(y);
        let k2 = self.rhs(&(y + k1 * (0.5 * h)));
        let k3 = self.rhs(&(y + k2 * (0.5 * h)));
        let k4 = self.rhs(&(y + k3 * h));
        y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
    }

    /// Positions and velocities at the requested coordinate times (ascending).
    pub fn run(&self, p0: &PhasePoint, targets: &[f64]) -> Vec<(Vec3, Vec3)> {
        let g = self.model.metric_at(&p0.x).unwrap();
        let d = p0.dbar0();
        let norm = (-(d.transpose() * g * d)[0]).sqrt();
        let u0 = d * (self.model.constants.c / norm);
        let mut y = S8::from_column_slice(&[p0.x[0], p0.x[1], p0.x[2], p0.x[3], u0[0], u0[1], u0[2], u0[3]]);
        let mut out = Vec::new();
        for &t in targets {
            loop {
                let yn = self.step(&y, self.dsigma);
                if yn[0] >= t {
                    break;
                }
                y = yn;
            }
            // secant on the partial step length so that x⁰ lands on t
            let (mut a, mut b) = (0.0, self.dsigma);
            let (mut fa, mut fb) = (y[0] - t, self.step(&y, b)[0] - t);
            for _ in 0..60 {
                if (b - a).abs() < 1e-16 || fb == fa {
                    break;
                }
                let c = b - fb * (b - a) / (fb - fa);
                a = b;
                fa = fb;
                b = c;
                fb = self.step(&y, b)[0] - t;
                if fb.abs() < 1e-15 {
                    break;
                }
            }
            let ye = self.step(&y, b);
            out.push((
                Vec3::new(ye[1], ye[2], ye[3]),
                Vec3::new(ye[5] / ye[4], ye[6] / ye[4], ye[7] / ye[4]),
            ));
        }
        out
    }
}

/// Initial data for a circular equatorial orbit of radius `r` in
/// Reissner–Nordström with Coulomb coupling `(ħ/m) F̂₁₀ = (q0/m)/r²`,
/// from radial force balance and the normalization `−f (u^t)² + r² (u^φ)² = −c²`.
pub fn circular_orbit(cm: &CatalogModel, r: f64) -> PhasePoint {
    let (k_s, k_q, q0) = match cm.kind {
        catalog::CatalogKind::ReissnerNordstrom { k_s, k_q, q0 } => (k_s, k_q, q0),
        _ => panic!("not Reissner–Nordström"),
    };
    let k = &cm.model.constants;
    let f = 1.0 - k_s / r + k_q * k_q / (r * r);
    let f1 = k_s / (r * r) - 2.0 * k_q * k_q / (r * r * r);
    let e = q0 / k.m / (r * r);
    // radial geodesic-plus-force balance: −½ f f' (u^t)² + r f (u^φ)² + f e u^t = 0
    // with (u^φ)² = (f (u^t)² − c²)/r²:  (f²/r − ½ f f')(u^t)² + f e u^t − f c²/r = 0
    let a = f * f / r - 0.5 * f * f1;
    let b = f * e;
    let cc = -f * k.c * k.c / r;
    let ut = (-b + (b * b - 4.0 * a * cc).sqrt()) / (2.0 * a);
    let uph = ((f * ut * ut - k.c * k.c) / (r * r)).sqrt();
    PhasePoint::new(&cm.model, Vec4::new(0.0, r, std::f64::consts::FRAC_PI_2, 0.0), Vec3::new(0.0, 0.0, uph / ut))
        .unwrap()
}
