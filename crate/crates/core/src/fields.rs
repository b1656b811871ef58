//! Spacetime data: physical constants, metric and electromagnetic field
//! providers, Christoffel symbols.

use std::sync::Arc;

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::{Error, Mat4, Result, Vec4};

/// Mass, charge, speed of light and reduced Planck constant of the particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub m: f64,
    pub q: f64,
    pub c: f64,
    pub hbar: f64,
}

impl Constants {
    pub fn new(m: f64, q: f64, c: f64, hbar: f64) -> Result<Self> {
        let k = Constants { m, q, c, hbar };
        k.validate()?;
        Ok(k)
    }

    /// `m = c = ħ = 1`, `q = 0`.
    pub fn natural() -> Self {
        Constants { m: 1.0, q: 0.0, c: 1.0, hbar: 1.0 }
    }

    pub fn with_charge(mut self, q: f64) -> Self {
        self.q = q;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, val) in [("m", self.m), ("c", self.c), ("hbar", self.hbar)] {
            if !(val.is_finite() && val > 0.0) {
                return Err(Error::InvalidConstants(format!("{name} must be positive and finite, got {val}")));
            }
        }
        if !self.q.is_finite() {
            return Err(Error::InvalidConstants(format!("q must be finite, got {}", self.q)));
        }
        Ok(())
    }

    /// `m/ħ`.
    pub fn m_over_hbar(&self) -> f64 {
        self.m / self.hbar
    }

    /// `mc²/ħ`, the factor between τ and τ̂.
    pub fn mc2_over_hbar(&self) -> f64 {
        self.m * self.c * self.c / self.hbar
    }

    /// `q/ħ`, the factor between F and F̂.
    pub fn q_over_hbar(&self) -> f64 {
        self.q / self.hbar
    }
}

/// Standard Christoffel symbols, `get(μ, λ, ν) = K_μ^λ_ν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Christoffel(pub [[[f64; 4]; 4]; 4]);

impl Christoffel {
    pub fn zero() -> Self {
        Christoffel([[[0.0; 4]; 4]; 4])
    }

    #[inline]
    pub fn get(&self, mu: usize, lam: usize, nu: usize) -> f64 {
        self.0[mu][lam][nu]
    }

    /// `K_ρ^λ_σ u^ρ w^σ`.
    pub fn contract(&self, u: &Vec4, w: &Vec4) -> Vec4 {
        let mut out = Vec4::zeros();
        for lam in 0..4 {
            let mut s = 0.0;
            for rho in 0..4 {
                for sig in 0..4 {
                    s += self.0[rho][lam][sig] * u[rho] * w[sig];
                }
            }
            out[lam] = s;
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Christoffel) -> f64 {
        let mut m: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    m = m.max((self.0[a][b][c] - other.0[a][b][c]).abs());
                }
            }
        }
        m
    }
}

/// Default finite-difference step for first derivatives at `x`.
pub fn fd_step(x: &Vec4) -> f64 {
    1e-5 * x.amax().max(1.0)
}

fn unit(k: usize) -> Vec4 {
    let mut e = Vec4::zeros();
    e[k] = 1.0;
    e
}

/// Central differences of a matrix-valued function in every coordinate direction.
pub fn central_diff_mat4<F>(f: F, x: &Vec4, h: f64) -> Result<[Mat4; 4]>
where
    F: Fn(&Vec4) -> Result<Mat4>,
{
    let mut out = [Mat4::zeros(); 4];
    for (k, o) in out.iter_mut().enumerate() {
        let e = unit(k) * h;
        *o = (f(&(x + e))? - f(&(x - e))?) / (2.0 * h);
    }
    Ok(out)
}

/// Jacobian `J[(λ, μ)] = ∂_μ f^λ` by central differences.
pub fn central_diff_vec4<F>(f: F, x: &Vec4, h: f64) -> Result<Mat4>
where
    F: Fn(&Vec4) -> Result<Vec4>,
{
    let mut out = Mat4::zeros();
    for k in 0..4 {
        let e = unit(k) * h;
        let col = (f(&(x + e))? - f(&(x - e))?) / (2.0 * h);
        out.set_column(k, &col);
    }
    Ok(out)
}

/// Gradient of a scalar function by central differences.
pub fn central_diff_scalar<F>(f: F, x: &Vec4, h: f64) -> Result<Vec4>
where
    F: Fn(&Vec4) -> Result<f64>,
{
    let mut out = Vec4::zeros();
    for k in 0..4 {
        let e = unit(k) * h;
        out[k] = (f(&(x + e))? - f(&(x - e))?) / (2.0 * h);
    }
    Ok(out)
}

/// A Lorentzian metric of signature (−,+,+,+) given in one chart.
///
/// Only `components` is required; derivatives default to central
/// differences. Models with closed-form derivatives should override them,
/// since the structure-form identities are checked at 1e-9 and below.
pub trait MetricField: Send + Sync {
    /// `g_{λμ}(x)`.
    fn components(&self, x: &Vec4) -> Result<Mat4>;

    /// `[∂_0 g, ∂_1 g, ∂_2 g, ∂_3 g]`.
    fn derivatives(&self, x: &Vec4) -> Result<[Mat4; 4]> {
        central_diff_mat4(|y| self.components(y), x, fd_step(x))
    }

    /// `out[κ][ν] = ∂_κ ∂_ν g`.
    fn second_derivatives(&self, x: &Vec4) -> Result<[[Mat4; 4]; 4]> {
        let h = 10.0 * fd_step(x);
        let mut out = [[Mat4::zeros(); 4]; 4];
        for k in 0..4 {
            let e = unit(k) * h;
            let p = self.derivatives(&(x + e))?;
            let m = self.derivatives(&(x - e))?;
            for nu in 0..4 {
                out[k][nu] = (p[nu] - m[nu]) / (2.0 * h);
            }
        }
        Ok(out)
    }

    /// Error if `x` is outside the chart.
    fn check_domain(&self, _x: &Vec4) -> Result<()> {
        Ok(())
    }

    /// Signed distance-like margin to the chart boundary, positive inside.
    fn chart_margin(&self, _x: &Vec4) -> f64 {
        f64::INFINITY
    }

    /// Whether the derivative methods are closed-form rather than finite differences.
    fn analytic_derivatives(&self) -> bool {
        false
    }
}

/// An electromagnetic field, stored unscaled (`F`, `A`); the model applies `q/ħ`.
pub trait EmField: Send + Sync {
    /// `F_{λμ}(x)`.
    fn field(&self, x: &Vec4) -> Result<Mat4>;

    /// `[∂_0 F, …, ∂_3 F]`.
    fn field_derivatives(&self, x: &Vec4) -> Result<[Mat4; 4]> {
        central_diff_mat4(|y| self.field(y), x, fd_step(x))
    }

    fn has_potential(&self) -> bool {
        false
    }

    /// `A_λ(x)` with `F = dA`.
    fn potential(&self, _x: &Vec4) -> Result<Vec4> {
        Err(Error::MissingPotential)
    }

    /// `J[(λ, μ)] = ∂_μ A_λ`.
    fn potential_jacobian(&self, x: &Vec4) -> Result<Mat4> {
        central_diff_vec4(|y| self.potential(y), x, fd_step(x))
    }
}

/// Metric given by a closure, derivatives by finite differences.
pub struct FnMetric<F>(pub F);

impl<F> MetricField for FnMetric<F>
where
    F: Fn(&Vec4) -> Mat4 + Send + Sync,
{
    fn components(&self, x: &Vec4) -> Result<Mat4> {
        Ok((self.0)(x))
    }
}

/// Constant field strength with potential `A_μ = ½ x^λ F_{λμ}`.
#[derive(Debug, Clone, Copy)]
pub struct UniformField {
    pub f: Mat4,
}

impl UniformField {
    pub fn new(f: Mat4) -> Result<Self> {
        if (f + f.transpose()).amax() > 1e-14 {
            return Err(Error::InvalidArgument("field strength must be antisymmetric".into()));
        }
        Ok(UniformField { f })
    }

    /// Pure magnetic field `B` along the x³ axis: `F_{12} = B`.
    pub fn magnetic_z(b: f64) -> Self {
        let mut f = Mat4::zeros();
        f[(1, 2)] = b;
        f[(2, 1)] = -b;
        UniformField { f }
    }

    /// Pure electric field along x¹: `F_{10} = E`, so the force on a positive charge points along +x¹.
    pub fn electric_x(e: f64) -> Self {
        let mut f = Mat4::zeros();
        f[(1, 0)] = e;
        f[(0, 1)] = -e;
        UniformField { f }
    }
}

impl EmField for UniformField {
    fn field(&self, _x: &Vec4) -> Result<Mat4> {
        Ok(self.f)
    }

    fn field_derivatives(&self, _x: &Vec4) -> Result<[Mat4; 4]> {
        Ok([Mat4::zeros(); 4])
    }

    fn has_potential(&self) -> bool {
        true
    }

    fn potential(&self, x: &Vec4) -> Result<Vec4> {
        Ok(self.f.transpose() * x * 0.5)
    }

    fn potential_jacobian(&self, _x: &Vec4) -> Result<Mat4> {
        Ok(self.f.transpose() * 0.5)
    }
}

/// Field derived from a potential closure, `F_{λμ} = ∂_λ A_μ − ∂_μ A_λ` by finite differences.
pub struct PotentialField<F>(pub F);

impl<F> EmField for PotentialField<F>
where
    F: Fn(&Vec4) -> Vec4 + Send + Sync,
{
    fn field(&self, x: &Vec4) -> Result<Mat4> {
        let j = self.potential_jacobian(x)?;
        Ok(j.transpose() - j)
    }

    fn has_potential(&self) -> bool {
        true
    }

    fn potential(&self, x: &Vec4) -> Result<Vec4> {
        Ok((self.0)(x))
    }
}

/// Wraps a field and hides its potential.
pub struct FieldOnly(pub Arc<dyn EmField>);

impl EmField for FieldOnly {
    fn field(&self, x: &Vec4) -> Result<Mat4> {
        self.0.field(x)
    }

    fn field_derivatives(&self, x: &Vec4) -> Result<[Mat4; 4]> {
        self.0.field_derivatives(x)
    }
}

/// Spacetime metric, optional electromagnetic field and particle constants.
#[derive(Clone)]
pub struct SpacetimeModel {
    pub name: String,
    pub metric: Arc<dyn MetricField>,
    pub em: Option<Arc<dyn EmField>>,
    pub constants: Constants,
}

impl SpacetimeModel {
    pub fn new(name: impl Into<String>, metric: Arc<dyn MetricField>, constants: Constants) -> Result<Self> {
        constants.validate()?;
        Ok(SpacetimeModel { name: name.into(), metric, em: None, constants })
    }

    pub fn with_em(mut self, em: Arc<dyn EmField>) -> Self {
        self.em = Some(em);
        self
    }

    /// The same model with the potential hidden (field strength kept).
    pub fn without_potential(&self) -> Self {
        let mut m = self.clone();
        if let Some(em) = &self.em {
            m.em = Some(Arc::new(FieldOnly(em.clone())));
        }
        m
    }

    pub fn has_potential(&self) -> bool {
        self.em.as_ref().is_none_or(|e| e.has_potential())
    }

    pub fn metric_at(&self, x: &Vec4) -> Result<Mat4> {
        self.metric.check_domain(x)?;
        let g = self.metric.components(x)?;
        if !g.iter().all(|v| v.is_finite()) {
            return Err(Error::SingularMetric { x: (*x).into() });
        }
        Ok(g)
    }

    /// `F̂ = (q/ħ) F`, or `None` without a field.
    pub fn f_hat(&self, x: &Vec4) -> Result<Option<Mat4>> {
        match &self.em {
            None => Ok(None),
            Some(em) => Ok(Some(em.field(x)? * self.constants.q_over_hbar())),
        }
    }

    /// `F̂` with zero in place of a missing field.
    pub fn f_hat_or_zero(&self, x: &Vec4) -> Result<Mat4> {
        Ok(self.f_hat(x)?.unwrap_or_else(Mat4::zeros))
    }

    pub fn f_hat_derivatives(&self, x: &Vec4) -> Result<[Mat4; 4]> {
        match &self.em {
            None => Ok([Mat4::zeros(); 4]),
            Some(em) => {
                let k = self.constants.q_over_hbar();
                Ok(em.field_derivatives(x)?.map(|d| d * k))
            }
        }
    }

    /// `Â = (q/ħ) A`; zero without a field, an error if the field has no potential.
    pub fn a_hat(&self, x: &Vec4) -> Result<Vec4> {
        match &self.em {
            None => Ok(Vec4::zeros()),
            Some(em) => Ok(em.potential(x)? * self.constants.q_over_hbar()),
        }
    }

    /// `J[(λ, μ)] = ∂_μ Â_λ`.
    pub fn a_hat_jacobian(&self, x: &Vec4) -> Result<Mat4> {
        match &self.em {
            None => Ok(Mat4::zeros()),
            Some(em) => {
                if !em.has_potential() {
                    return Err(Error::MissingPotential);
                }
                Ok(em.potential_jacobian(x)? * self.constants.q_over_hbar())
            }
        }
    }

    /// Checks signature (−,+,+,+) at each probe and closure of F.
    pub fn validate(&self, probes: &[Vec4], closure_tol: f64) -> Result<()> {
        for x in probes {
            check_signature(&self.metric_at(x)?, x)?;
            if let Some(em) = &self.em {
                let r = check_closed(em.as_ref(), x)?;
                if r > closure_tol {
                    return Err(Error::InvalidArgument(format!(
                        "electromagnetic field is not closed at {:?}: residual {r:e}",
                        x.as_slice()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Errors unless `g` has exactly one negative and three positive eigenvalues.
pub fn check_signature(g: &Mat4, x: &Vec4) -> Result<()> {
    let eig = SymmetricEigen::new((g + g.transpose()) * 0.5).eigenvalues;
    let scale = eig.amax().max(1e-300);
    let neg = eig.iter().filter(|e| **e < -1e-12 * scale).count();
    let pos = eig.iter().filter(|e| **e > 1e-12 * scale).count();
    if neg == 1 && pos == 3 {
        Ok(())
    } else {
        Err(Error::SingularMetric { x: (*x).into() })
    }
}

/// Inverse metric.
pub fn inverse_metric(g: &Mat4, x: &Vec4) -> Result<Mat4> {
    let inv = g.try_inverse().ok_or(Error::SingularMetric { x: (*x).into() })?;
    if !inv.iter().all(|v| v.is_finite()) {
        return Err(Error::SingularMetric { x: (*x).into() });
    }
    Ok(inv)
}

/// Maximum of the cyclic sum `|∂_λ F_μν + ∂_μ F_νλ + ∂_ν F_λμ|` over index triples.
pub fn check_closed(em: &dyn EmField, x: &Vec4) -> Result<f64> {
    let d = em.field_derivatives(x)?;
    let mut r: f64 = 0.0;
    for l in 0..4 {
        for m in (l + 1)..4 {
            for n in (m + 1)..4 {
                r = r.max((d[l][(m, n)] + d[m][(n, l)] + d[n][(l, m)]).abs());
            }
        }
    }
    Ok(r)
}

fn christoffel_from(ginv: &Mat4, dg: &[Mat4; 4]) -> Christoffel {
    let mut k = Christoffel::zero();
    for mu in 0..4 {
        for nu in 0..4 {
            let mut low = [0.0; 4];
            for (rho, l) in low.iter_mut().enumerate() {
                *l = 0.5 * (dg[mu][(rho, nu)] + dg[nu][(rho, mu)] - dg[rho][(mu, nu)]);
            }
            for lam in 0..4 {
                let mut s = 0.0;
                for (rho, l) in low.iter().enumerate() {
                    s += ginv[(lam, rho)] * l;
                }
                k.0[mu][lam][nu] = s;
            }
        }
    }
    k
}

/// Standard Christoffel symbols of the model's metric at `x`.
pub fn christoffel(model: &SpacetimeModel, x: &Vec4) -> Result<Christoffel> {
    let g = model.metric_at(x)?;
    let ginv = inverse_metric(&g, x)?;
    let dg = model.metric.derivatives(x)?;
    Ok(christoffel_from(&ginv, &dg))
}

pub(crate) fn christoffel_with(ginv: &Mat4, dg: &[Mat4; 4]) -> Christoffel {
    christoffel_from(ginv, dg)
}

/// `out[κ] = ∂_κ K` from the metric's first and second derivatives.
pub fn christoffel_derivatives(model: &SpacetimeModel, x: &Vec4) -> Result<[Christoffel; 4]> {
    let g = model.metric_at(x)?;
    let ginv = inverse_metric(&g, x)?;
    let dg = model.metric.derivatives(x)?;
    let ddg = model.metric.second_derivatives(x)?;
    let mut out = [Christoffel::zero(); 4];
    for kap in 0..4 {
        // ∂g⁻¹ = −g⁻¹ ∂g g⁻¹
        let dginv = -(ginv * dg[kap] * ginv);
        for mu in 0..4 {
            for nu in 0..4 {
                let mut low = [0.0; 4];
                let mut dlow = [0.0; 4];
                for rho in 0..4 {
                    low[rho] = 0.5 * (dg[mu][(rho, nu)] + dg[nu][(rho, mu)] - dg[rho][(mu, nu)]);
                    dlow[rho] = 0.5
                        * (ddg[kap][mu][(rho, nu)] + ddg[kap][nu][(rho, mu)] - ddg[kap][rho][(mu, nu)]);
                }
                for lam in 0..4 {
                    let mut s = 0.0;
                    for rho in 0..4 {
                        s += dginv[(lam, rho)] * low[rho] + ginv[(lam, rho)] * dlow[rho];
                    }
                    out[kap].0[mu][lam][nu] = s;
                }
            }
        }
    }
    Ok(out)
}
