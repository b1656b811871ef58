//! Phase points and the basic kinematic objects at a point: α⁰, τ, 𝕕, the
//! adapted frame, and the spacelike metrics g⊥ and ḡ⊥.

use crate::fields::{christoffel_with, inverse_metric, Christoffel, SpacetimeModel};
use crate::{Error, Mat3, Mat3x4, Mat4, Result, Vec3, Vec4, Vec7};

/// `ĝ₀₀` must be below `−TIMELIKE_MARGIN` for a valid phase point.
pub const TIMELIKE_MARGIN: f64 = 1e-12;

/// A point `(x⁰, x¹, x², x³, x¹₀, x²₀, x³₀)` of phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub x: Vec4,
    pub v: Vec3,
}

impl PhasePoint {
    /// Validated constructor: in the chart and timelike.
    pub fn new(model: &SpacetimeModel, x: Vec4, v: Vec3) -> Result<Self> {
        let p = PhasePoint { x, v };
        let g = model.metric_at(&x)?;
        ghat00_checked(&g, &v)?;
        Ok(p)
    }

    /// No validation; every operation re-checks what it needs.
    pub fn raw(x: Vec4, v: Vec3) -> Self {
        PhasePoint { x, v }
    }

    pub fn from_vec7(p: &Vec7) -> Self {
        PhasePoint { x: Vec4::new(p[0], p[1], p[2], p[3]), v: Vec3::new(p[4], p[5], p[6]) }
    }

    pub fn to_vec7(&self) -> Vec7 {
        Vec7::from_column_slice(&[self.x[0], self.x[1], self.x[2], self.x[3], self.v[0], self.v[1], self.v[2]])
    }

    /// `δ̄^μ₀ = (1, x¹₀, x²₀, x³₀)`.
    pub fn dbar0(&self) -> Vec4 {
        Vec4::new(1.0, self.v[0], self.v[1], self.v[2])
    }

    /// `δ̄ⁱ_λ = δⁱ_λ − xⁱ₀ δ⁰_λ` as a 3×4 matrix.
    pub fn dbar(&self) -> Mat3x4 {
        let mut d = Mat3x4::zeros();
        for i in 0..3 {
            d[(i, 0)] = -self.v[i];
            d[(i, i + 1)] = 1.0;
        }
        d
    }
}

fn ghat00_checked(g: &Mat4, v: &Vec3) -> Result<f64> {
    let d0 = Vec4::new(1.0, v[0], v[1], v[2]);
    let gh = (d0.transpose() * g * d0)[0];
    if !(gh < -TIMELIKE_MARGIN) {
        return Err(Error::NotTimelike { g00_hat: gh });
    }
    Ok(gh)
}

/// Base relative step for phase-space finite differences.
pub const FD_STEP: f64 = 1e-4;

/// Per-coordinate finite-difference steps at `p`: `h·max(1, |xᵏ|)` for the
/// positions and `h` times the distance to the light cone along each velocity axis.
pub fn fd_steps(model: &SpacetimeModel, p: &PhasePoint, h: f64) -> Result<Vec7> {
    let g = model.metric_at(&p.x)?;
    let gh = ghat00_checked(&g, &p.v)?;
    let gb = g * p.dbar0();
    let mut s = crate::forms::relative_steps(&p.to_vec7(), h);
    for i in 0..3 {
        let a = g[(i + 1, i + 1)];
        let b = gb[i + 1];
        let disc = b * b - a * gh;
        if a > 0.0 && disc > 0.0 {
            let r = disc.sqrt();
            let dist = ((-b + r) / a).abs().min(((-b - r) / a).abs());
            s[4 + i] = h * dist;
        }
    }
    Ok(s)
}

/// Every pointwise metric quantity the structure forms need, computed once.
#[derive(Debug, Clone)]
pub struct PhaseGeometry {
    pub p: PhasePoint,
    pub c: f64,
    pub m_over_hbar: f64,
    pub g: Mat4,
    pub ginv: Mat4,
    pub dg: [Mat4; 4],
    pub chr: Christoffel,
    /// `δ̄^μ₀`.
    pub dbar0: Vec4,
    /// `δ̄ⁱ_λ`.
    pub dbar: Mat3x4,
    pub g00_hat: f64,
    pub alpha: f64,
    /// `ğ₀λ = δ̄^ρ₀ g_ρλ`.
    pub gb: Vec4,
    /// `τ_λ`.
    pub tau: Vec4,
    /// `g⊥_ij`.
    pub g_perp: Mat3,
    /// `ḡ⊥^ij`.
    pub gbar_perp: Mat3,
    /// `Ḡ₀^{iμ} = (ħ/m) δ̄ⁱ_σ g^{σμ}`.
    pub gbar0: Mat3x4,
    /// `F̂_{λμ}`, zero without a field.
    pub f_hat: Mat4,
    pub has_em: bool,
}

impl PhaseGeometry {
    pub fn new(model: &SpacetimeModel, p: &PhasePoint) -> Result<Self> {
        let x = p.x;
        let g = model.metric_at(&x)?;
        let g00_hat = ghat00_checked(&g, &p.v)?;
        let ginv = inverse_metric(&g, &x)?;
        let dg = model.metric.derivatives(&x)?;
        let chr = christoffel_with(&ginv, &dg);
        let k = &model.constants;
        let c = k.c;
        let alpha = 1.0 / (-g00_hat).sqrt();
        let dbar0 = p.dbar0();
        let dbar = p.dbar();
        let gb = g * dbar0;
        let tau = -gb * (alpha / c);
        let mut g_perp = Mat3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                g_perp[(i, j)] = g[(i + 1, j + 1)] + c * c * tau[i + 1] * tau[j + 1];
            }
        }
        let gbar_perp = dbar * ginv * dbar.transpose();
        let gbar0 = dbar * ginv / k.m_over_hbar();
        let f = model.f_hat(&x)?;
        Ok(PhaseGeometry {
            p: *p,
            c,
            m_over_hbar: k.m_over_hbar(),
            g,
            ginv,
            dg,
            chr,
            dbar0,
            dbar,
            g00_hat,
            alpha,
            gb,
            tau,
            g_perp,
            gbar_perp,
            gbar0,
            f_hat: f.unwrap_or_else(Mat4::zeros),
            has_em: f.is_some(),
        })
    }

    /// `cα⁰`.
    pub fn c_alpha(&self) -> f64 {
        self.c * self.alpha
    }

    /// `𝕕 = cα⁰ δ̄^μ₀`.
    pub fn normalized_d(&self) -> Vec4 {
        self.dbar0 * self.c_alpha()
    }
}

/// `α⁰ = |ĝ₀₀|^{-1/2}`.
pub fn alpha0(model: &SpacetimeModel, p: &PhasePoint) -> Result<f64> {
    let g = model.metric_at(&p.x)?;
    Ok(1.0 / (-ghat00_checked(&g, &p.v)?).sqrt())
}

/// `τ_λ = −c⁻¹ α⁰ ğ₀λ`.
pub fn tau(model: &SpacetimeModel, p: &PhasePoint) -> Result<Vec4> {
    let g = model.metric_at(&p.x)?;
    let gh = ghat00_checked(&g, &p.v)?;
    let alpha = 1.0 / (-gh).sqrt();
    Ok(-(g * p.dbar0()) * (alpha / model.constants.c))
}

/// `τ̂ = (mc²/ħ) τ`.
pub fn tau_hat(model: &SpacetimeModel, p: &PhasePoint) -> Result<Vec4> {
    Ok(tau(model, p)? * model.constants.mc2_over_hbar())
}

/// τ̂ as a covector on phase space (velocity block zero).
pub fn tau_hat7(model: &SpacetimeModel, p: &PhasePoint) -> Result<Vec7> {
    let t = tau_hat(model, p)?;
    let mut out = Vec7::zeros();
    out.fixed_rows_mut::<4>(0).copy_from(&t);
    Ok(out)
}

/// `𝕕 = cα⁰ (1, x¹₀, x²₀, x³₀)`, the normalized four-velocity.
pub fn normalized_d(model: &SpacetimeModel, p: &PhasePoint) -> Result<Vec4> {
    Ok(p.dbar0() * (model.constants.c * alpha0(model, p)?))
}

/// Adapted frame `(D₀, N₁, N₂, N₃, ∂⁰₁, ∂⁰₂, ∂⁰₃)` and its dual coframe
/// `(N⁰, ω¹, ω², ω³, d¹₀, d²₀, d³₀)`, all as phase-space 7-vectors.
#[derive(Debug, Clone)]
pub struct AdaptedFrame {
    pub vectors: [Vec7; 7],
    pub covectors: [Vec7; 7],
}

impl AdaptedFrame {
    /// `max |θ^a(e_b) − δ^a_b|`.
    pub fn duality_defect(&self) -> f64 {
        let mut m: f64 = 0.0;
        for a in 0..7 {
            for b in 0..7 {
                let want = if a == b { 1.0 } else { 0.0 };
                m = m.max((self.covectors[a].dot(&self.vectors[b]) - want).abs());
            }
        }
        m
    }
}

pub fn adapted_frame(model: &SpacetimeModel, p: &PhasePoint) -> Result<AdaptedFrame> {
    let geo = PhaseGeometry::new(model, p)?;
    let ca = geo.c_alpha();
    let mut vectors = [Vec7::zeros(); 7];
    let mut covectors = [Vec7::zeros(); 7];
    for mu in 0..4 {
        vectors[0][mu] = geo.dbar0[mu];
    }
    for i in 0..3 {
        vectors[i + 1][i + 1] = 1.0;
        vectors[i + 1] -= vectors[0] * (ca * geo.tau[i + 1]);
        vectors[i + 4][i + 4] = 1.0;
        // ωⁱ = dⁱ − xⁱ₀ d⁰
        covectors[i + 1][i + 1] = 1.0;
        covectors[i + 1][0] = -p.v[i];
        covectors[i + 4][i + 4] = 1.0;
    }
    covectors[0][0] = 1.0;
    for i in 0..3 {
        covectors[0] = covectors[0] + covectors[i + 1] * (ca * geo.tau[i + 1]);
    }
    Ok(AdaptedFrame { vectors, covectors })
}

/// `(g⊥_ij, ḡ⊥^ij)`; the two are mutually inverse.
pub fn perp_metrics(model: &SpacetimeModel, p: &PhasePoint) -> Result<(Mat3, Mat3)> {
    let geo = PhaseGeometry::new(model, p)?;
    Ok((geo.g_perp, geo.gbar_perp))
}
