//! A bound charged orbit around a Reissner–Nordström centre, with the drift
//! of the energy and angular-momentum charges along it.

use jetphase::catalog::reissner_nordstrom;
use jetphase::fields::Constants;
use jetphase::momentum::{charge_drift, momentum_map};
use jetphase::motion::{integrate, IntegratorOptions};
use jetphase::phase::PhasePoint;
use jetphase::{Vec3, Vec4};

fn main() -> jetphase::Result<()> {
    let cm = reissner_nordstrom(Constants::natural(), 2.0, 0.7, 0.4)?;
    let p0 = PhasePoint::new(&cm.model, Vec4::new(0.0, 10.0, std::f64::consts::FRAC_PI_2, 0.0), Vec3::new(0.0, 0.0, 0.03))?;

    let traj = integrate(&cm.model, &p0, 2000.0, &IntegratorOptions::rkf45(1e-10, 1e-10))?;
    let (rmin, rmax) = traj.points.iter().fold((f64::MAX, 0.0f64), |(lo, hi), p| (lo.min(p.x[1]), hi.max(p.x[1])));
    println!("{:?} after {} steps, r in [{rmin:.3}, {rmax:.3}]", traj.termination, traj.accepted_steps);

    let j0 = momentum_map(&cm.model, &cm.algebra, &p0)?;
    let drift = charge_drift(&cm.model, &cm.algebra, &traj)?;
    for (i, name) in cm.algebra.names().iter().enumerate() {
        println!("{name:>3} = {:+.10}  drift {:.1e}", j0[i], drift[i]);
    }
    Ok(())
}
