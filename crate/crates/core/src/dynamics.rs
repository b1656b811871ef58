//! Structure forms of phase space: the phase connection, the two-form Ω,
//! the bivector Λ, the Reeb field γ, the potential Θ, Lagrangian and
//! Hamiltonian, and the Euler–Lagrange covector.

use crate::forms::{self, top_form_coefficient};
use crate::phase::{fd_steps, tau_hat7, PhaseGeometry, PhasePoint};
use crate::fields::SpacetimeModel;
use crate::{Error, Mat3, Mat3x4, Mat7, Result, Vec3, Vec4, Vec7};

/// Gravitational and electromagnetic parts of the phase connection,
/// entry `(i, λ)` holds `Γ_λ^i₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseConnection {
    pub grav: Mat3x4,
    pub em: Mat3x4,
}

impl PhaseConnection {
    pub fn total(&self) -> Mat3x4 {
        self.grav + self.em
    }
}

pub(crate) fn connection_from(geo: &PhaseGeometry) -> PhaseConnection {
    let mut grav = Mat3x4::zeros();
    for lam in 0..4 {
        for sig in 0..4 {
            let mut s = 0.0;
            for rho in 0..4 {
                s += geo.chr.get(lam, sig, rho) * geo.dbar0[rho];
            }
            for i in 0..3 {
                grav[(i, lam)] -= geo.dbar[(i, sig)] * s;
            }
        }
    }
    let mut em = Mat3x4::zeros();
    if geo.has_em {
        let a2 = geo.alpha * geo.alpha;
        // F̂_{ρμ} δ̄^ρ₀
        let fd = geo.f_hat.transpose() * geo.dbar0;
        let k = -1.0 / (2.0 * geo.c_alpha());
        for i in 0..3 {
            for lam in 0..4 {
                let mut s = 0.0;
                for mu in 0..4 {
                    s += geo.gbar0[(i, mu)] * (geo.f_hat[(lam, mu)] - a2 * geo.gb[lam] * fd[mu]);
                }
                em[(i, lam)] = k * s;
            }
        }
    }
    PhaseConnection { grav, em }
}

/// Phase connection `Γ = Γᵍ + Γᵉ` at `p`.
pub fn phase_connection(model: &SpacetimeModel, p: &PhasePoint) -> Result<PhaseConnection> {
    Ok(connection_from(&PhaseGeometry::new(model, p)?))
}

/// Gravitational and electromagnetic parts of Ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaParts {
    pub grav: Mat7,
    pub em: Mat7,
}

impl OmegaParts {
    pub fn total(&self) -> Mat7 {
        self.grav + self.em
    }
}

pub(crate) fn omega_from(geo: &PhaseGeometry, conn: &PhaseConnection) -> OmegaParts {
    let v = geo.p.v;
    let mut a = [Vec7::zeros(); 3];
    let mut b = [Vec7::zeros(); 3];
    for i in 0..3 {
        a[i][4 + i] = 1.0;
        for phi in 0..4 {
            a[i][phi] -= conn.grav[(i, phi)];
        }
        b[i][i + 1] = 1.0;
        b[i][0] = -v[i];
    }
    let k = geo.c_alpha() * geo.m_over_hbar;
    let mut grav = Mat7::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let gij = k * geo.g_perp[(i, j)];
            if gij == 0.0 {
                continue;
            }
            let ab = a[i] * b[j].transpose();
            grav += (ab - ab.transpose()) * gij;
        }
    }
    let mut em = Mat7::zeros();
    em.fixed_view_mut::<4, 4>(0, 0).copy_from(&geo.f_hat);
    OmegaParts { grav, em }
}

/// `Ω = Ωᵍ + F̂` with the parts kept separate.
pub fn omega_parts(model: &SpacetimeModel, p: &PhasePoint) -> Result<OmegaParts> {
    let geo = PhaseGeometry::new(model, p)?;
    Ok(omega_from(&geo, &connection_from(&geo)))
}

/// The two-form Ω at `p`.
pub fn omega(model: &SpacetimeModel, p: &PhasePoint) -> Result<Mat7> {
    Ok(omega_parts(model, p)?.total())
}

/// The Λᵍ display evaluated with an arbitrary phase connection.
fn lambda_display(geo: &PhaseGeometry, gamma: &Mat3x4) -> Mat7 {
    let inv = 1.0 / geo.c_alpha();
    let mut out = Mat7::zeros();
    for lam in 0..4 {
        let mut u = Vec7::zeros();
        u[lam] = 1.0;
        for i in 0..3 {
            u[4 + i] = gamma[(i, lam)];
        }
        for j in 0..3 {
            let coef = inv * geo.gbar0[(j, lam)];
            if coef == 0.0 {
                continue;
            }
            let mut w = Vec7::zeros();
            w[4 + j] = 1.0;
            let uw = u * w.transpose();
            out += (uw - uw.transpose()) * coef;
        }
    }
    out
}

pub(crate) fn lambda_from(geo: &PhaseGeometry, conn: &PhaseConnection) -> Mat7 {
    let mut l = lambda_display(geo, &conn.grav);
    if geo.has_em {
        let k = 1.0 / (geo.c_alpha() * geo.c_alpha());
        let e: Mat3 = geo.gbar0 * geo.f_hat * geo.gbar0.transpose() * k;
        let mut block = l.fixed_view_mut::<3, 3>(4, 4);
        block += e;
    }
    l
}

/// `Λ = Λᵍ[Γᵍ] + Λᵉ`.
pub fn lambda(model: &SpacetimeModel, p: &PhasePoint) -> Result<Mat7> {
    let geo = PhaseGeometry::new(model, p)?;
    Ok(lambda_from(&geo, &connection_from(&geo)))
}

/// The Λᵍ display evaluated with the total connection; equals [`lambda`].
pub fn lambda_total_display(model: &SpacetimeModel, p: &PhasePoint) -> Result<Mat7> {
    let geo = PhaseGeometry::new(model, p)?;
    Ok(lambda_display(&geo, &connection_from(&geo).total()))
}

pub(crate) fn reeb_from(geo: &PhaseGeometry, conn: &PhaseConnection) -> Vec7 {
    let ca = geo.c_alpha();
    let g0 = conn.total() * geo.dbar0;
    let mut out = Vec7::zeros();
    for mu in 0..4 {
        out[mu] = ca * geo.dbar0[mu];
    }
    for i in 0..3 {
        out[4 + i] = ca * g0[i];
    }
    out
}

/// Reeb field `γ = cα⁰(∂₀ + xⁱ₀∂ᵢ + γ₀ⁱ₀∂⁰ᵢ)`.
pub fn reeb(model: &SpacetimeModel, p: &PhasePoint) -> Result<Vec7> {
    let geo = PhaseGeometry::new(model, p)?;
    Ok(reeb_from(&geo, &connection_from(&geo)))
}

/// `γ̂ = (ħ/(mc²)) γ`, normalized so that `τ̂(γ̂) = 1`.
pub fn reeb_hat(model: &SpacetimeModel, p: &PhasePoint) -> Result<Vec7> {
    Ok(reeb(model, p)? / model.constants.mc2_over_hbar())
}

/// Residuals of the cosymplectic duality relations with `w = −τ̂`, `E = −γ̂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityResiduals {
    /// `|w(E) − 1|`.
    pub r1: f64,
    /// `‖i_E Ω‖`.
    pub r2: f64,
    /// `‖Λ♯ w‖`.
    pub r3: f64,
    /// `‖Λ♯ then Ω♭ − (id − E⊗w)‖`, entrywise max.
    pub r4: f64,
}

impl DualityResiduals {
    pub fn max(&self) -> f64 {
        self.r1.max(self.r2).max(self.r3).max(self.r4)
    }
}

/// Duality residuals for an arbitrary (Ω, Λ, w, E), used for negative controls.
pub fn duality_residuals_of(omega: &Mat7, lambda: &Mat7, w: &Vec7, e: &Vec7) -> DualityResiduals {
    let r1 = (w.dot(e) - 1.0).abs();
    let r2 = (omega.transpose() * e).amax();
    let r3 = (lambda.transpose() * w).amax();
    let r4 = (lambda * omega - (Mat7::identity() - e * w.transpose())).amax();
    DualityResiduals { r1, r2, r3, r4 }
}

pub fn duality_residuals(model: &SpacetimeModel, p: &PhasePoint) -> Result<DualityResiduals> {
    let s = PhaseStructure::new(model, p)?;
    Ok(duality_residuals_of(&s.omega, &s.lambda, &s.w(), &s.e()))
}

/// All structure forms at one point.
#[derive(Debug, Clone)]
pub struct PhaseStructure {
    pub geometry: PhaseGeometry,
    pub connection: PhaseConnection,
    pub omega_parts: OmegaParts,
    pub omega: Mat7,
    pub lambda: Mat7,
    pub gamma: Vec7,
    pub tau_hat: Vec7,
    pub mc2_over_hbar: f64,
}

impl PhaseStructure {
    pub fn new(model: &SpacetimeModel, p: &PhasePoint) -> Result<Self> {
        let geometry = PhaseGeometry::new(model, p)?;
        let connection = connection_from(&geometry);
        let omega_parts = omega_from(&geometry, &connection);
        let lambda = lambda_from(&geometry, &connection);
        let gamma = reeb_from(&geometry, &connection);
        let tau_hat = tau_hat7(model, p)?;
        Ok(PhaseStructure {
            omega: omega_parts.total(),
            geometry,
            connection,
            omega_parts,
            lambda,
            gamma,
            tau_hat,
            mc2_over_hbar: model.constants.mc2_over_hbar(),
        })
    }

    pub fn gamma_hat(&self) -> Vec7 {
        self.gamma / self.mc2_over_hbar
    }

    /// `w = −τ̂`.
    pub fn w(&self) -> Vec7 {
        -self.tau_hat
    }

    /// `E = −γ̂`.
    pub fn e(&self) -> Vec7 {
        -self.gamma_hat()
    }

    /// `Λ♯(α)`.
    pub fn lambda_sharp(&self, alpha: &Vec7) -> Vec7 {
        self.lambda.transpose() * alpha
    }

    /// `i_Y Ω`.
    pub fn omega_flat(&self, y: &Vec7) -> Vec7 {
        self.omega.transpose() * y
    }
}

/// Coefficient of `e⁰∧…∧e⁶` in `τ̂ ∧ Ω³` and in `τ̂ ∧ (Ωᵍ)³`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nondegeneracy {
    pub full: f64,
    pub grav: f64,
}

pub fn nondegeneracy(model: &SpacetimeModel, p: &PhasePoint) -> Result<Nondegeneracy> {
    let s = PhaseStructure::new(model, p)?;
    Ok(Nondegeneracy {
        full: top_form_coefficient(&s.tau_hat, &s.omega),
        grav: top_form_coefficient(&s.tau_hat, &s.omega_parts.grav),
    })
}

/// Relative initial step for the extrapolated derivatives in [`omega_closure_residual`].
pub const CLOSURE_START_STEP: f64 = 5e-2;

/// `max |dΩ|` over index triples, by extrapolated central differences of Ω.
pub fn omega_closure_residual(model: &SpacetimeModel, p: &PhasePoint) -> Result<f64> {
    let q = p.to_vec7();
    let steps = fd_steps(model, p, CLOSURE_START_STEP)?;
    forms::closure_residual_2form(|y| omega(model, &PhasePoint::from_vec7(y)), &q, &steps)
}

/// `Θ = −τ̂ + Â` as a phase covector.
pub fn theta(model: &SpacetimeModel, p: &PhasePoint) -> Result<Vec7> {
    let a = model.a_hat(&p.x)?;
    let mut t = -tau_hat7(model, p)?;
    for mu in 0..4 {
        t[mu] += a[mu];
    }
    Ok(t)
}

/// Lagrangian density `L₀ = −(mc/ħ)/α⁰ + Â₀ + xⁱ₀Âᵢ = Θ(D₀)`.
pub fn lagrangian(model: &SpacetimeModel, p: &PhasePoint) -> Result<f64> {
    let geo = PhaseGeometry::new(model, p)?;
    let k = &model.constants;
    let a = model.a_hat(&p.x)?;
    Ok(-k.m * k.c / k.hbar / geo.alpha + a.dot(&geo.dbar0))
}

/// `∂L₀/∂xⁱ₀ = (mc/ħ)α⁰ ğ₀ᵢ + Âᵢ`.
pub fn lagrangian_velocity_gradient(model: &SpacetimeModel, p: &PhasePoint) -> Result<Vec3> {
    let geo = PhaseGeometry::new(model, p)?;
    let k = &model.constants;
    let a = model.a_hat(&p.x)?;
    let s = k.m * k.c / k.hbar * geo.alpha;
    Ok(Vec3::new(s * geo.gb[1] + a[1], s * geo.gb[2] + a[2], s * geo.gb[3] + a[3]))
}

/// `∂²L₀/∂xⁱ₀∂xʲ₀ = (mc/ħ) α⁰ g⊥_ij`.
pub fn lagrangian_hessian(model: &SpacetimeModel, p: &PhasePoint) -> Result<Mat3> {
    let geo = PhaseGeometry::new(model, p)?;
    let k = &model.constants;
    Ok(geo.g_perp * (k.m * k.c / k.hbar * geo.alpha))
}

/// Observer field `o = ∂₀ + oⁱ(x)∂ᵢ`, given by its spatial components.
pub trait Observer: Send + Sync {
    fn velocity(&self, x: &Vec4) -> Result<Vec3>;
}

/// The chart observer `∂₀`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ChartObserver;

impl Observer for ChartObserver {
    fn velocity(&self, _x: &Vec4) -> Result<Vec3> {
        Ok(Vec3::zeros())
    }
}

/// Observer given by a closure.
pub struct FnObserver<F>(pub F);

impl<F> Observer for FnObserver<F>
where
    F: Fn(&Vec4) -> Vec3 + Send + Sync,
{
    fn velocity(&self, x: &Vec4) -> Result<Vec3> {
        Ok((self.0)(x))
    }
}

/// Hamiltonian `H[o] = −Θ(∂₀ + oⁱ∂ᵢ)`.
pub fn hamiltonian(model: &SpacetimeModel, o: &dyn Observer, p: &PhasePoint) -> Result<f64> {
    let t = theta(model, p)?;
    let ov = o.velocity(&p.x)?;
    Ok(-(t[0] + ov[0] * t[1] + ov[1] * t[2] + ov[2] * t[3]))
}

/// `|∂L₀/∂xⁱ₀ · xⁱ₀ − L₀ − H[o]|` with the velocity gradient by a five-point
/// stencil. Requires `o` to be the chart observer at `p`.
pub fn legendre_residual(model: &SpacetimeModel, o: &dyn Observer, p: &PhasePoint) -> Result<f64> {
    let ov = o.velocity(&p.x)?;
    if ov.amax() > 1e-14 {
        return Err(Error::ObserverNotAdapted { x: p.x.into() });
    }
    let grad = lagrangian_velocity_gradient_fd(model, p, 1e-3)?;
    let l = lagrangian(model, p)?;
    let h = hamiltonian(model, o, p)?;
    Ok((grad.dot(&p.v) - l - h).abs())
}

fn diff5_scalar<F: Fn(f64) -> Result<f64>>(f: F, h: f64) -> Result<f64> {
    Ok((f(-2.0 * h)? - f(2.0 * h)? + 8.0 * (f(h)? - f(-h)?)) / (12.0 * h))
}

/// `∂L₀/∂xⁱ₀` by a five-point stencil; the step along each velocity axis is
/// `h` times the distance to the light cone.
pub fn lagrangian_velocity_gradient_fd(model: &SpacetimeModel, p: &PhasePoint, h: f64) -> Result<Vec3> {
    let steps = fd_steps(model, p, h)?;
    let mut out = Vec3::zeros();
    for i in 0..3 {
        out[i] = diff5_scalar(
            |s| {
                let mut q = *p;
                q.v[i] += s;
                lagrangian(model, &q)
            },
            steps[4 + i],
        )?;
    }
    Ok(out)
}

/// Velocity Hessian of `L₀` by nested five-point stencils, steps as in
/// [`lagrangian_velocity_gradient_fd`].
pub fn lagrangian_hessian_fd(model: &SpacetimeModel, p: &PhasePoint, h: f64) -> Result<Mat3> {
    let steps = fd_steps(model, p, h)?;
    let mut out = Mat3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            out[(i, j)] = diff5_scalar(
                |sj| {
                    diff5_scalar(
                        |si| {
                            let mut q = *p;
                            q.v[i] += si;
                            q.v[j] += sj;
                            lagrangian(model, &q)
                        },
                        steps[4 + i],
                    )
                },
                steps[4 + j],
            )?;
        }
    }
    Ok(out)
}

/// Euler–Lagrange covector
/// `η_j = (m/ħ)(cα⁰ g⊥_ij (xⁱ₀₀ − γᵍ₀ⁱ₀) + (q/m)(F₀ⱼ + F_ij xⁱ₀))`
/// for a candidate acceleration `xdd`; zero exactly on the equation of motion.
pub fn el_density(model: &SpacetimeModel, p: &PhasePoint, xdd: &Vec3) -> Result<Vec3> {
    let geo = PhaseGeometry::new(model, p)?;
    let conn = connection_from(&geo);
    let gg = conn.grav * geo.dbar0;
    let diff = xdd - gg;
    let k = geo.m_over_hbar * geo.c_alpha();
    let mut eta = geo.g_perp * diff * k;
    for j in 0..3 {
        let mut fterm = geo.f_hat[(0, j + 1)];
        for i in 0..3 {
            fterm += geo.f_hat[(i + 1, j + 1)] * p.v[i];
        }
        eta[j] += fterm;
    }
    Ok(eta)
}
