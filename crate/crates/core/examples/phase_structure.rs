//! Structure forms of phase space at one point of Reissner–Nordström:
//! clock form, Ω, Λ, Reeb field, and the identities tying them together.

use jetphase::catalog::reissner_nordstrom;
use jetphase::dynamics::{duality_residuals, nondegeneracy, omega_closure_residual, PhaseStructure};
use jetphase::fields::Constants;
use jetphase::phase::{alpha0, PhasePoint};
use jetphase::{Vec3, Vec4};

fn main() -> jetphase::Result<()> {
    let cm = reissner_nordstrom(Constants::natural(), 2.0, 0.7, 0.4)?;
    let p = PhasePoint::new(&cm.model, Vec4::new(0.0, 8.0, 1.2, 0.3), Vec3::new(0.05, 0.01, 0.02))?;

    let s = PhaseStructure::new(&cm.model, &p)?;
    println!("alpha0        = {:.12}", alpha0(&cm.model, &p)?);
    println!("tau_hat       = {:.6?}", s.tau_hat.as_slice());
    println!("reeb (scaled) = {:.6?}", s.gamma_hat().as_slice());

    let d = duality_residuals(&cm.model, &p)?;
    println!("duality residuals r1..r4 = {:.1e} {:.1e} {:.1e} {:.1e}", d.r1, d.r2, d.r3, d.r4);
    println!("closure |dOmega|          = {:.1e}", omega_closure_residual(&cm.model, &p)?);
    let n = nondegeneracy(&cm.model, &p)?;
    println!("tau_hat ^ Omega^3         = {:.6} (gravitational part {:.6})", n.full, n.grav);
    Ok(())
}
