//! Infinitesimal symmetries: Lie derivatives of the spacetime data, holonomic
//! lifts, special phase functions with their Hamiltonian lifts and brackets,
//! and flow-transport oracles for Lie derivatives on phase space.

use std::sync::Arc;

use crate::dynamics::PhaseStructure;
use crate::fields::{
    central_diff_mat4, central_diff_scalar, central_diff_vec4, christoffel, christoffel_derivatives, fd_step,
    Christoffel, SpacetimeModel,
};
use crate::forms;
use crate::phase::{fd_steps, PhaseGeometry, PhasePoint, FD_STEP};
use crate::{Mat3x4, Mat4, Mat7, Result, Vec4, Vec7};

/// A vector field on spacetime.
pub trait VectorField: Send + Sync {
    fn value(&self, x: &Vec4) -> Result<Vec4>;

    /// `J[(λ, μ)] = ∂_μ X^λ`.
    fn jacobian(&self, x: &Vec4) -> Result<Mat4> {
        central_diff_vec4(|y| self.value(y), x, fd_step(x))
    }

    /// `H[λ][(μ, ν)] = ∂_μ ∂_ν X^λ`.
    fn hessian(&self, x: &Vec4) -> Result<[Mat4; 4]> {
        let d = central_diff_mat4(|y| self.jacobian(y), x, 10.0 * fd_step(x))?;
        let mut h = [Mat4::zeros(); 4];
        for (lam, hl) in h.iter_mut().enumerate() {
            for mu in 0..4 {
                for nu in 0..4 {
                    hl[(mu, nu)] = 0.5 * (d[nu][(lam, mu)] + d[mu][(lam, nu)]);
                }
            }
        }
        Ok(h)
    }
}

/// `X(x) = b + M x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineField {
    pub constant: Vec4,
    pub linear: Mat4,
}

impl AffineField {
    pub fn new(constant: Vec4, linear: Mat4) -> Self {
        AffineField { constant, linear }
    }

    /// The coordinate field `∂_k`.
    pub fn translation(k: usize) -> Self {
        let mut b = Vec4::zeros();
        b[k] = 1.0;
        AffineField { constant: b, linear: Mat4::zeros() }
    }

    /// `x^a ∂_b − x^b ∂_a`.
    pub fn rotation(a: usize, b: usize) -> Self {
        let mut m = Mat4::zeros();
        m[(b, a)] = 1.0;
        m[(a, b)] = -1.0;
        AffineField { constant: Vec4::zeros(), linear: m }
    }

    /// `x⁰ ∂_k + x^k ∂_0`.
    pub fn boost(k: usize) -> Self {
        let mut m = Mat4::zeros();
        m[(k, 0)] = 1.0;
        m[(0, k)] = 1.0;
        AffineField { constant: Vec4::zeros(), linear: m }
    }

    /// `x^k ∂_k`, a non-Killing control field.
    pub fn stretch(k: usize) -> Self {
        let mut m = Mat4::zeros();
        m[(k, k)] = 1.0;
        AffineField { constant: Vec4::zeros(), linear: m }
    }
}

impl VectorField for AffineField {
    fn value(&self, x: &Vec4) -> Result<Vec4> {
        Ok(self.constant + self.linear * x)
    }

    fn jacobian(&self, _x: &Vec4) -> Result<Mat4> {
        Ok(self.linear)
    }

    fn hessian(&self, _x: &Vec4) -> Result<[Mat4; 4]> {
        Ok([Mat4::zeros(); 4])
    }
}

/// Vector field from a closure; derivatives by finite differences.
pub struct FnVectorField<F>(pub F);

impl<F> VectorField for FnVectorField<F>
where
    F: Fn(&Vec4) -> Vec4 + Send + Sync,
{
    fn value(&self, x: &Vec4) -> Result<Vec4> {
        Ok((self.0)(x))
    }
}

/// Lie bracket `[A, B]^λ = A^ρ ∂_ρ B^λ − B^ρ ∂_ρ A^λ`.
#[derive(Clone)]
pub struct Commutator {
    pub a: Arc<dyn VectorField>,
    pub b: Arc<dyn VectorField>,
}

impl VectorField for Commutator {
    fn value(&self, x: &Vec4) -> Result<Vec4> {
        Ok(self.b.jacobian(x)? * self.a.value(x)? - self.a.jacobian(x)? * self.b.value(x)?)
    }

    fn jacobian(&self, x: &Vec4) -> Result<Mat4> {
        let (xa, xb) = (self.a.value(x)?, self.b.value(x)?);
        let (ja, jb) = (self.a.jacobian(x)?, self.b.jacobian(x)?);
        let (ha, hb) = (self.a.hessian(x)?, self.b.hessian(x)?);
        let mut out = jb * ja - ja * jb;
        for lam in 0..4 {
            let row = hb[lam].transpose() * xa - ha[lam].transpose() * xb;
            for mu in 0..4 {
                out[(lam, mu)] += row[mu];
            }
        }
        Ok(out)
    }
}

/// `Σ cₖ Xₖ`.
#[derive(Clone)]
pub struct LinearCombination {
    pub terms: Vec<(f64, Arc<dyn VectorField>)>,
}

impl VectorField for LinearCombination {
    fn value(&self, x: &Vec4) -> Result<Vec4> {
        let mut s = Vec4::zeros();
        for (c, f) in &self.terms {
            s += f.value(x)? * *c;
        }
        Ok(s)
    }

    fn jacobian(&self, x: &Vec4) -> Result<Mat4> {
        let mut s = Mat4::zeros();
        for (c, f) in &self.terms {
            s += f.jacobian(x)? * *c;
        }
        Ok(s)
    }

    fn hessian(&self, x: &Vec4) -> Result<[Mat4; 4]> {
        let mut s = [Mat4::zeros(); 4];
        for (c, f) in &self.terms {
            let h = f.hessian(x)?;
            for k in 0..4 {
                s[k] += h[k] * *c;
            }
        }
        Ok(s)
    }
}

/// A scalar function on spacetime.
pub trait ScalarField: Send + Sync {
    fn value(&self, x: &Vec4) -> Result<f64>;

    fn gradient(&self, x: &Vec4) -> Result<Vec4> {
        central_diff_scalar(|y| self.value(y), x, fd_step(x))
    }
}

/// `f̆ = k + c_λ x^λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineScalar {
    pub constant: f64,
    pub coefficients: Vec4,
}

impl AffineScalar {
    pub fn zero() -> Self {
        AffineScalar { constant: 0.0, coefficients: Vec4::zeros() }
    }

    pub fn constant(k: f64) -> Self {
        AffineScalar { constant: k, coefficients: Vec4::zeros() }
    }
}

impl ScalarField for AffineScalar {
    fn value(&self, x: &Vec4) -> Result<f64> {
        Ok(self.constant + self.coefficients.dot(x))
    }

    fn gradient(&self, _x: &Vec4) -> Result<Vec4> {
        Ok(self.coefficients)
    }
}

/// `f̆ = k / x¹`, for charges in spherical charts where x¹ is the radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseRadius {
    pub k: f64,
}

impl ScalarField for InverseRadius {
    fn value(&self, x: &Vec4) -> Result<f64> {
        Ok(self.k / x[1])
    }

    fn gradient(&self, x: &Vec4) -> Result<Vec4> {
        Ok(Vec4::new(0.0, -self.k / (x[1] * x[1]), 0.0, 0.0))
    }
}

/// Scalar from a closure; gradient by finite differences.
pub struct FnScalar<F>(pub F);

impl<F> ScalarField for FnScalar<F>
where
    F: Fn(&Vec4) -> f64 + Send + Sync,
{
    fn value(&self, x: &Vec4) -> Result<f64> {
        Ok((self.0)(x))
    }
}

/// `f̆ = −Â(X)`, the scalar part of the momentum-map special function.
pub struct MinusPotentialOf {
    pub model: SpacetimeModel,
    pub field: Arc<dyn VectorField>,
}

impl ScalarField for MinusPotentialOf {
    fn value(&self, x: &Vec4) -> Result<f64> {
        Ok(-self.model.a_hat(x)?.dot(&self.field.value(x)?))
    }

    fn gradient(&self, x: &Vec4) -> Result<Vec4> {
        let a = self.model.a_hat(x)?;
        let ja = self.model.a_hat_jacobian(x)?;
        let xv = self.field.value(x)?;
        let jx = self.field.jacobian(x)?;
        Ok(-(ja.transpose() * xv + jx.transpose() * a))
    }
}

/// Special phase function `f = τ̂(X) + f̆`, the pair `(X, f̆)`.
#[derive(Clone)]
pub struct SpecialPhaseFunction {
    pub name: String,
    pub field: Arc<dyn VectorField>,
    pub scalar: Arc<dyn ScalarField>,
}

impl SpecialPhaseFunction {
    pub fn new(name: impl Into<String>, field: Arc<dyn VectorField>, scalar: Arc<dyn ScalarField>) -> Self {
        SpecialPhaseFunction { name: name.into(), field, scalar }
    }

    /// `(X, 0)`.
    pub fn pure(name: impl Into<String>, field: Arc<dyn VectorField>) -> Self {
        Self::new(name, field, Arc::new(AffineScalar::zero()))
    }
}

/// `(L_X g)_{λμ}`.
pub fn lie_metric(model: &SpacetimeModel, x_field: &dyn VectorField, x: &Vec4) -> Result<Mat4> {
    let g = model.metric_at(x)?;
    let dg = model.metric.derivatives(x)?;
    let xv = x_field.value(x)?;
    let j = x_field.jacobian(x)?;
    let mut out = j.transpose() * g + g * j;
    for rho in 0..4 {
        out += dg[rho] * xv[rho];
    }
    Ok(out)
}

/// `(L_X F̂)_{λμ}`; zero without a field.
pub fn lie_em(model: &SpacetimeModel, x_field: &dyn VectorField, x: &Vec4) -> Result<Mat4> {
    let f = model.f_hat_or_zero(x)?;
    let df = model.f_hat_derivatives(x)?;
    let xv = x_field.value(x)?;
    let j = x_field.jacobian(x)?;
    let mut out = j.transpose() * f + f * j;
    for rho in 0..4 {
        out += df[rho] * xv[rho];
    }
    Ok(out)
}

/// `(L_X K)_μ^λ_ν` for the standard Christoffel symbols.
pub fn lie_connection(model: &SpacetimeModel, x_field: &dyn VectorField, x: &Vec4) -> Result<Christoffel> {
    let k = christoffel(model, x)?;
    let dk = christoffel_derivatives(model, x)?;
    let xv = x_field.value(x)?;
    let j = x_field.jacobian(x)?;
    let h = x_field.hessian(x)?;
    let mut out = Christoffel::zero();
    for mu in 0..4 {
        for lam in 0..4 {
            for nu in 0..4 {
                let mut s = h[lam][(mu, nu)];
                for rho in 0..4 {
                    s += xv[rho] * dk[rho].get(mu, lam, nu) - k.get(mu, rho, nu) * j[(lam, rho)]
                        + k.get(rho, lam, nu) * j[(rho, mu)]
                        + k.get(mu, lam, rho) * j[(rho, nu)];
                }
                out.0[mu][lam][nu] = s;
            }
        }
    }
    Ok(out)
}

/// `C(i, λ) = −δ̄ⁱ_σ (L_X K)_λ^σ_ρ δ̄^ρ₀`, the coefficients of `L_{X₍₁₎}` of the
/// gravitational phase connection on `d^λ ⊗ ∂⁰ᵢ` (the sign follows `Γᵍ = −δ̄ K δ̄`).
pub fn connection_variation(model: &SpacetimeModel, x_field: &dyn VectorField, p: &PhasePoint) -> Result<Mat3x4> {
    let lk = lie_connection(model, x_field, &p.x)?;
    let (d, d0) = (p.dbar(), p.dbar0());
    let mut out = Mat3x4::zeros();
    for i in 0..3 {
        for lam in 0..4 {
            let mut s = 0.0;
            for sig in 0..4 {
                for rho in 0..4 {
                    s += d[(i, sig)] * lk.get(lam, sig, rho) * d0[rho];
                }
            }
            out[(i, lam)] = -s;
        }
    }
    Ok(out)
}

/// `max |connection_variation|`; zero for Killing fields.
pub fn connection_variation_residual(model: &SpacetimeModel, x_field: &dyn VectorField, p: &PhasePoint) -> Result<f64> {
    Ok(connection_variation(model, x_field, p)?.amax())
}

/// The gravitational phase connection as the (1,1) tensor
/// `d^λ ⊗ (∂_λ + Γᵍ(i, λ) ∂⁰ᵢ)`, a 7×7 matrix acting on phase vectors.
pub fn grav_connection_tensor(model: &SpacetimeModel, p: &PhasePoint) -> Result<Mat7> {
    let conn = crate::dynamics::phase_connection(model, p)?;
    let mut t = Mat7::zeros();
    for lam in 0..4 {
        t[(lam, lam)] = 1.0;
        for i in 0..3 {
            t[(4 + i, lam)] = conn.grav[(i, lam)];
        }
    }
    Ok(t)
}

/// `L_{X₍₁₎}` of [`grav_connection_tensor`] by flow transport.
pub fn lie_connection_by_flow(
    model: &SpacetimeModel,
    x_field: &dyn VectorField,
    p: &PhasePoint,
    oracle: &FlowOracle,
) -> Result<Mat7> {
    let y = |q: &Vec7| holonomic_lift(x_field, &PhasePoint::from_vec7(q));
    let t = |q: &Vec7| grav_connection_tensor(model, &PhasePoint::from_vec7(q));
    oracle.lie_11tensor(&y, &t, &p.to_vec7(), &fd_steps(model, p, oracle.delta)?)
}

/// Maximum residuals of the symmetry conditions over a probe set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KillingReport {
    /// `max |L_X g|`.
    pub metric: f64,
    /// `max |L_X F̂|`.
    pub em: f64,
    pub is_killing: bool,
    pub preserves_em: bool,
}

pub fn is_killing(model: &SpacetimeModel, x_field: &dyn VectorField, probes: &[Vec4], tol: f64) -> Result<KillingReport> {
    let mut metric: f64 = 0.0;
    let mut em: f64 = 0.0;
    for x in probes {
        metric = metric.max(lie_metric(model, x_field, x)?.amax());
        em = em.max(lie_em(model, x_field, x)?.amax());
    }
    Ok(KillingReport { metric, em, is_killing: metric <= tol, preserves_em: em <= tol })
}

/// Holonomic lift `X₍₁₎ = X^λ ∂_λ + δ̄ⁱ_λ δ̄^μ₀ ∂_μ X^λ ∂⁰ᵢ`.
pub fn holonomic_lift(x_field: &dyn VectorField, p: &PhasePoint) -> Result<Vec7> {
    let xv = x_field.value(&p.x)?;
    let j = x_field.jacobian(&p.x)?;
    let vel = p.dbar() * j * p.dbar0();
    Ok(Vec7::from_column_slice(&[xv[0], xv[1], xv[2], xv[3], vel[0], vel[1], vel[2]]))
}

/// `f(p) = τ̂(X) + f̆`.
pub fn special_eval(model: &SpacetimeModel, f: &SpecialPhaseFunction, p: &PhasePoint) -> Result<f64> {
    let t = crate::phase::tau_hat(model, p)?;
    Ok(t.dot(&f.field.value(&p.x)?) + f.scalar.value(&p.x)?)
}

fn special_gradient_geo(model: &SpacetimeModel, geo: &PhaseGeometry, f: &SpecialPhaseFunction) -> Result<Vec7> {
    let x = geo.p.x;
    let xv = f.field.value(&x)?;
    let j = f.field.jacobian(&x)?;
    let k = model.constants.m * model.constants.c / model.constants.hbar;
    let a = geo.alpha;
    let a3 = a * a * a;
    let gx = geo.g * xv;
    let pval = geo.dbar0.dot(&gx);
    let fb = f.scalar.gradient(&x)?;
    let mut out = Vec7::zeros();
    for lam in 0..4 {
        let dgd = geo.dg[lam] * geo.dbar0;
        let da = 0.5 * a3 * geo.dbar0.dot(&dgd);
        let dp = dgd.dot(&xv) + geo.dbar0.dot(&(geo.g * j.column(lam)));
        out[lam] = -k * (da * pval + a * dp) + fb[lam];
    }
    for i in 0..3 {
        let da = a3 * geo.gb[i + 1];
        out[4 + i] = -k * (da * pval + a * gx[i + 1]);
    }
    Ok(out)
}

/// `df` on phase space, assembled analytically.
pub fn special_gradient(model: &SpacetimeModel, f: &SpecialPhaseFunction, p: &PhasePoint) -> Result<Vec7> {
    special_gradient_geo(model, &PhaseGeometry::new(model, p)?, f)
}

/// `df` by central differences, for cross-checks.
pub fn special_gradient_fd(model: &SpacetimeModel, f: &SpecialPhaseFunction, p: &PhasePoint) -> Result<Vec7> {
    let q = p.to_vec7();
    forms::gradient_fd(|y| special_eval(model, f, &PhasePoint::from_vec7(y)), &q, &fd_steps(model, p, FD_STEP)?)
}

/// Special Hamiltonian lift from the coordinate display
/// `X^λ∂_λ − Ḡ₀^{iσ}(−(cα⁰)⁻¹∂_σf̆ + X^ρ∂_ρĞ⁰₀σ + Ğ⁰₀ρ∂_σX^ρ + (cα⁰)⁻¹X^ρF̂_ρσ) ∂⁰ᵢ`,
/// with `Ğ⁰₀σ = (m/ħ) δ̄^κ₀ g_κσ`.
pub fn special_hamiltonian_lift(model: &SpacetimeModel, f: &SpecialPhaseFunction, p: &PhasePoint) -> Result<Vec7> {
    let geo = PhaseGeometry::new(model, p)?;
    let x = p.x;
    let xv = f.field.value(&x)?;
    let j = f.field.jacobian(&x)?;
    let fb = f.scalar.gradient(&x)?;
    let inv = 1.0 / geo.c_alpha();
    let mh = geo.m_over_hbar;
    let gb_hat = geo.gb * mh;
    let xf = geo.f_hat.transpose() * xv;
    let mut bracket = Vec4::zeros();
    for sig in 0..4 {
        let mut dgx = 0.0;
        for rho in 0..4 {
            dgx += xv[rho] * (geo.dg[rho] * geo.dbar0)[sig];
        }
        bracket[sig] = -inv * fb[sig] + mh * dgx + gb_hat.dot(&j.column(sig)) + inv * xf[sig];
    }
    let vel = -(geo.gbar0 * bracket);
    Ok(Vec7::from_column_slice(&[xv[0], xv[1], xv[2], xv[3], vel[0], vel[1], vel[2]]))
}

/// Special Hamiltonian lift `Λ♯(df) + τ̂(X) γ̂`.
pub fn special_hamiltonian_lift_lambda(model: &SpacetimeModel, f: &SpecialPhaseFunction, p: &PhasePoint) -> Result<Vec7> {
    let s = PhaseStructure::new(model, p)?;
    let df = special_gradient_geo(model, &s.geometry, f)?;
    let tx = s.tau_hat.dot(&holonomic_lift(f.field.as_ref(), p)?);
    Ok(s.lambda_sharp(&df) + s.gamma_hat() * tx)
}

/// Scalar part of the special bracket: `X.h̆ − X'.f̆ + F̂(X, X')`.
pub struct BracketScalar {
    pub model: SpacetimeModel,
    pub f: SpecialPhaseFunction,
    pub h: SpecialPhaseFunction,
}

impl ScalarField for BracketScalar {
    fn value(&self, x: &Vec4) -> Result<f64> {
        let xf = self.f.field.value(x)?;
        let xh = self.h.field.value(x)?;
        let fh = self.model.f_hat_or_zero(x)?;
        Ok(xf.dot(&self.h.scalar.gradient(x)?) - xh.dot(&self.f.scalar.gradient(x)?) + (xf.transpose() * fh * xh)[0])
    }
}

/// Structural special bracket `⟦f, h⟧ = ([X, X'], X.h̆ − X'.f̆ + F̂(X, X'))`.
pub fn special_bracket(model: &SpacetimeModel, f: &SpecialPhaseFunction, h: &SpecialPhaseFunction) -> SpecialPhaseFunction {
    SpecialPhaseFunction {
        name: format!("[{},{}]", f.name, h.name),
        field: Arc::new(Commutator { a: f.field.clone(), b: h.field.clone() }),
        scalar: Arc::new(BracketScalar { model: model.clone(), f: f.clone(), h: h.clone() }),
    }
}

/// Jacobi bracket of the two phase functions, `Λ(df, dh) + f γ̂.h − h γ̂.f`
/// with `f` and `h` restricted to their τ̂-parts in the Reeb terms.
pub fn jacobi_bracket_value(
    model: &SpacetimeModel,
    f: &SpecialPhaseFunction,
    h: &SpecialPhaseFunction,
    p: &PhasePoint,
) -> Result<f64> {
    let s = PhaseStructure::new(model, p)?;
    let df = special_gradient_geo(model, &s.geometry, f)?;
    let dh = special_gradient_geo(model, &s.geometry, h)?;
    let gh = s.gamma_hat();
    let tf = s.tau_hat.dot(&holonomic_lift(f.field.as_ref(), p)?);
    let th = s.tau_hat.dot(&holonomic_lift(h.field.as_ref(), p)?);
    Ok((df.transpose() * s.lambda * dh)[0] + tf * gh.dot(&dh) - th * gh.dot(&df))
}

/// `γ.f` and the criterion `𝕕.f̆ − (X⌟F̂)(𝕕) − ½(L_X G)(𝕕, 𝕕)`, `G = (m/ħ) g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationReport {
    pub gamma_f: f64,
    pub criterion: f64,
}

impl ConservationReport {
    pub fn residual(&self) -> f64 {
        (self.gamma_f - self.criterion).abs()
    }
}

pub fn conservation_residual(model: &SpacetimeModel, f: &SpecialPhaseFunction, p: &PhasePoint) -> Result<ConservationReport> {
    let s = PhaseStructure::new(model, p)?;
    let df = special_gradient_geo(model, &s.geometry, f)?;
    let gamma_f = df.dot(&s.gamma);
    let d = s.geometry.normalized_d();
    let xv = f.field.value(&p.x)?;
    let lg = lie_metric(model, f.field.as_ref(), &p.x)? * s.geometry.m_over_hbar;
    let xf = s.geometry.f_hat.transpose() * xv;
    let criterion = d.dot(&f.scalar.gradient(&p.x)?) - xf.dot(&d) - 0.5 * (d.transpose() * lg * d)[0];
    Ok(ConservationReport { gamma_f, criterion })
}

/// `‖i_{X₍₁₎} Ω − df‖`.
pub fn self_holonomy_residual(model: &SpacetimeModel, f: &SpecialPhaseFunction, p: &PhasePoint) -> Result<f64> {
    let s = PhaseStructure::new(model, p)?;
    let df = special_gradient_geo(model, &s.geometry, f)?;
    let lift = holonomic_lift(f.field.as_ref(), p)?;
    Ok((s.omega_flat(&lift) - df).amax())
}

/// `‖df̆ − X⌟F̂‖` at a spacetime point.
pub fn scalar_condition_residual(model: &SpacetimeModel, f: &SpecialPhaseFunction, x: &Vec4) -> Result<f64> {
    let xf = model.f_hat_or_zero(x)?.transpose() * f.field.value(x)?;
    Ok((f.scalar.gradient(x)? - xf).amax())
}

/// `[X₍₁₎, X'₍₁₎]` by central differences of the lifts.
pub fn lift_commutator_fd(
    model: &SpacetimeModel,
    a: &dyn VectorField,
    b: &dyn VectorField,
    p: &PhasePoint,
) -> Result<Vec7> {
    forms::commutator_fd(
        |y| holonomic_lift(a, &PhasePoint::from_vec7(y)),
        |y| holonomic_lift(b, &PhasePoint::from_vec7(y)),
        &p.to_vec7(),
        &fd_steps(model, p, FD_STEP)?,
    )
}

/// `‖X↑[⟦f, h⟧] − [X↑[f], X↑[h]]‖`, the commutator by central differences.
pub fn bracket_homomorphism_residual(
    model: &SpacetimeModel,
    f: &SpecialPhaseFunction,
    h: &SpecialPhaseFunction,
    p: &PhasePoint,
) -> Result<f64> {
    let fh = special_bracket(model, f, h);
    let lhs = special_hamiltonian_lift(model, &fh, p)?;
    let rhs = forms::commutator_fd(
        |y| special_hamiltonian_lift(model, f, &PhasePoint::from_vec7(y)),
        |y| special_hamiltonian_lift(model, h, &PhasePoint::from_vec7(y)),
        &p.to_vec7(),
        &fd_steps(model, p, FD_STEP)?,
    )?;
    Ok((lhs - rhs).amax())
}

/// Flow of a phase vector field for time `t`, RK4 with `substeps` steps.
pub fn phase_flow<F>(y: &F, p: &Vec7, t: f64, substeps: usize) -> Result<Vec7>
where
    F: Fn(&Vec7) -> Result<Vec7>,
{
    let h = t / substeps as f64;
    let mut q = *p;
    for _ in 0..substeps {
        let k1 = y(&q)?;
        let k2 = y(&(q + k1 * (0.5 * h)))?;
        let k3 = y(&(q + k2 * (0.5 * h)))?;
        let k4 = y(&(q + k3 * h))?;
        q += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    Ok(q)
}

/// Flow endpoint and its Jacobian `∂Fl_t^a/∂p^b` (seven-point differences with `steps`).
pub fn phase_flow_jacobian<F>(y: &F, p: &Vec7, t: f64, substeps: usize, steps: &Vec7) -> Result<(Vec7, Mat7)>
where
    F: Fn(&Vec7) -> Result<Vec7>,
{
    let end = phase_flow(y, p, t, substeps)?;
    let j = forms::vector_jacobian_fd(|q| phase_flow(y, q, t, substeps), p, steps)?;
    Ok((end, j))
}

/// Settings for the flow-transport Lie-derivative oracle: flow time `eps`,
/// RK4 substeps, and the finite-difference steps for the flow Jacobian.
#[derive(Debug, Clone, Copy)]
pub struct FlowOracle {
    pub eps: f64,
    pub substeps: usize,
    pub delta: f64,
}

impl Default for FlowOracle {
    fn default() -> Self {
        FlowOracle { eps: 1e-4, substeps: 4, delta: 1e-4 }
    }
}

impl FlowOracle {
    /// `(L_Y α)_p ≈ [(Fl_ε)*α − (Fl_{−ε})*α]_p / 2ε` for a phase 1-form `α`.
    pub fn lie_1form<F, A>(&self, y: &F, alpha: &A, p: &Vec7, steps: &Vec7) -> Result<Vec7>
    where
        F: Fn(&Vec7) -> Result<Vec7>,
        A: Fn(&Vec7) -> Result<Vec7>,
    {
        let (qp, jp) = phase_flow_jacobian(y, p, self.eps, self.substeps, steps)?;
        let (qm, jm) = phase_flow_jacobian(y, p, -self.eps, self.substeps, steps)?;
        Ok((jp.transpose() * alpha(&qp)? - jm.transpose() * alpha(&qm)?) / (2.0 * self.eps))
    }

    /// Same for a phase 2-form.
    pub fn lie_2form<F, W>(&self, y: &F, omega: &W, p: &Vec7, steps: &Vec7) -> Result<Mat7>
    where
        F: Fn(&Vec7) -> Result<Vec7>,
        W: Fn(&Vec7) -> Result<Mat7>,
    {
        let (qp, jp) = phase_flow_jacobian(y, p, self.eps, self.substeps, steps)?;
        let (qm, jm) = phase_flow_jacobian(y, p, -self.eps, self.substeps, steps)?;
        Ok((jp.transpose() * omega(&qp)? * jp - jm.transpose() * omega(&qm)? * jm) / (2.0 * self.eps))
    }
}

impl FlowOracle {
    /// Same for a (1,1) tensor `T`, pulled back as `DFl⁻¹ T DFl`.
    pub fn lie_11tensor<F, T>(&self, y: &F, t: &T, p: &Vec7, steps: &Vec7) -> Result<Mat7>
    where
        F: Fn(&Vec7) -> Result<Vec7>,
        T: Fn(&Vec7) -> Result<Mat7>,
    {
        let pull = |eps: f64| -> Result<Mat7> {
            let (q, j) = phase_flow_jacobian(y, p, eps, self.substeps, steps)?;
            let jinv = j.try_inverse().ok_or_else(|| crate::Error::InvalidArgument("singular flow Jacobian".into()))?;
            Ok(jinv * t(&q)? * j)
        };
        Ok((pull(self.eps)? - pull(-self.eps)?) / (2.0 * self.eps))
    }
}

/// `‖L_{X₍₁₎} τ̂‖` by flow transport.
pub fn lie_tau_hat_by_flow(model: &SpacetimeModel, x_field: &dyn VectorField, p: &PhasePoint, oracle: &FlowOracle) -> Result<f64> {
    let y = |q: &Vec7| holonomic_lift(x_field, &PhasePoint::from_vec7(q));
    let a = |q: &Vec7| crate::phase::tau_hat7(model, &PhasePoint::from_vec7(q));
    Ok(oracle.lie_1form(&y, &a, &p.to_vec7(), &fd_steps(model, p, oracle.delta)?)?.amax())
}

/// `‖L_{X₍₁₎} Ω‖` by flow transport.
pub fn lie_omega_by_flow(model: &SpacetimeModel, x_field: &dyn VectorField, p: &PhasePoint, oracle: &FlowOracle) -> Result<f64> {
    let y = |q: &Vec7| holonomic_lift(x_field, &PhasePoint::from_vec7(q));
    let w = |q: &Vec7| crate::dynamics::omega(model, &PhasePoint::from_vec7(q));
    Ok(oracle.lie_2form(&y, &w, &p.to_vec7(), &fd_steps(model, p, oracle.delta)?)?.amax())
}
