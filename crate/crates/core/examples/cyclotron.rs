//! Relativistic cyclotron motion in a uniform magnetic field, compared with
//! the closed-form gyration frequency `qB / (m γ)`.

use std::sync::Arc;

use jetphase::catalog::MinkowskiMetric;
use jetphase::fields::{Constants, SpacetimeModel, UniformField};
use jetphase::motion::{integrate, IntegratorOptions};
use jetphase::phase::PhasePoint;
use jetphase::{Vec3, Vec4};

fn main() -> jetphase::Result<()> {
    let (b, speed): (f64, f64) = (0.5, 0.6);
    let model = SpacetimeModel::new("cyclotron", Arc::new(MinkowskiMetric), Constants::natural().with_charge(1.0))?
        .with_em(Arc::new(UniformField::magnetic_z(b)));
    let gamma = 1.0 / (1.0 - speed * speed).sqrt();
    let omega = b / gamma;
    let radius = speed / omega;
    let p0 = PhasePoint::new(&model, Vec4::new(0.0, radius, 0.0, 0.0), Vec3::new(0.0, -speed, 0.0))?;

    let period = 2.0 * std::f64::consts::PI / omega;
    let traj = integrate(&model, &p0, period, &IntegratorOptions::rkf45(1e-12, 1e-12))?;
    let end = traj.last();
    let max_dev = traj.points.iter().map(|p| ((p.x[1].hypot(p.x[2])) - radius).abs()).fold(0.0, f64::max);
    println!("radius {radius:.6}, period {period:.6}");
    println!("return error after one period {:.1e}", (end.x - p0.x).fixed_rows::<3>(1).amax());
    println!("max radius deviation {max_dev:.1e}, speed change {:.1e}", (end.v.norm() - speed).abs());
    Ok(())
}
