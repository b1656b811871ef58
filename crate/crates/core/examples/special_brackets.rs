//! Brackets of special phase functions on Minkowski: the structural bracket
//! against the Jacobi bracket, and the lift homomorphism.

use jetphase::catalog::minkowski;
use jetphase::fields::Constants;
use jetphase::symmetry::{bracket_homomorphism_residual, jacobi_bracket_value, special_bracket, special_eval};

fn main() -> jetphase::Result<()> {
    let cm = minkowski(Constants::natural())?;
    let p = &cm.sample_points(3, 1)?[0];
    let basis = &cm.algebra.basis;
    for (a, b) in [(1, 4), (4, 5), (7, 8), (0, 7), (2, 9)] {
        let (f, h) = (&basis[a], &basis[b]);
        let fh = special_bracket(&cm.model, f, h);
        let structural = special_eval(&cm.model, &fh, p)?;
        let jacobi = jacobi_bracket_value(&cm.model, f, h, p)?;
        let hom = bracket_homomorphism_residual(&cm.model, f, h, p)?;
        println!("[{:>3},{:>3}] structural {structural:+.8} jacobi {jacobi:+.8} lift defect {hom:.1e}", f.name, h.name);
    }
    Ok(())
}
