//! Killing tests for catalog generators and a non-Killing stretch, and the
//! self-holonomy of the Reissner–Nordström energy function.

use std::sync::Arc;

use jetphase::catalog::{minkowski, reissner_nordstrom};
use jetphase::fields::Constants;
use jetphase::symmetry::{
    is_killing, self_holonomy_residual, AffineField, InverseRadius, SpecialPhaseFunction,
};

fn main() -> jetphase::Result<()> {
    let k = Constants::natural();
    let mk = minkowski(k)?;
    let probes: Vec<_> = mk.sample_points(1, 20)?.iter().map(|p| p.x).collect();
    for f in &mk.algebra.basis {
        let r = is_killing(&mk.model, f.field.as_ref(), &probes, 1e-10)?;
        println!("minkowski {:>3}: |L_X g| = {:.1e} killing = {}", f.name, r.metric, r.is_killing);
    }
    let r = is_killing(&mk.model, &AffineField::stretch(1), &probes, 1e-10)?;
    println!("minkowski x1 d1: |L_X g| = {:.1e} killing = {}", r.metric, r.is_killing);

    let q0 = 0.4;
    let cm = reissner_nordstrom(k, 2.0, 0.7, q0)?;
    let points = cm.sample_points(2, 20)?;
    for sign in [1.0, -1.0] {
        let f = SpecialPhaseFunction::new(
            "T",
            Arc::new(AffineField::translation(0)),
            Arc::new(InverseRadius { k: sign * q0 / k.hbar }),
        );
        let worst = points.iter().map(|p| self_holonomy_residual(&cm.model, &f, p)).try_fold(0.0f64, |m, r| r.map(|r| m.max(r)))?;
        println!("RN (d_t, {sign:+} q0/r): self-holonomy residual {worst:.1e}");
    }
    Ok(())
}
