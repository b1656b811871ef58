//! Momentum map of the Reissner–Nordström symmetry algebra: the moment
//! condition and equivariance under a rotation of the sphere.

use std::sync::Arc;

use jetphase::catalog::reissner_nordstrom;
use jetphase::fields::Constants;
use jetphase::momentum::{equivariance_residual, momentum_map, momentum_residual, GroupElement, SphericalRotationMap};
use jetphase::Vec3;

fn main() -> jetphase::Result<()> {
    let cm = reissner_nordstrom(Constants::natural(), 2.0, 0.7, 0.4)?;
    let p = &cm.sample_points(4, 1)?[0];
    let names = cm.algebra.names();

    let j = momentum_map(&cm.model, &cm.algebra, p)?;
    for (i, f) in cm.algebra.basis.iter().enumerate() {
        let r = momentum_residual(&cm.model, f.field.clone(), p)?;
        println!("J[{}] = {:+.10}  |i_X Omega + dJ| = {r:.1e}", names[i], j[i]);
    }

    let map = SphericalRotationMap::about_axis(Vec3::new(1.0, 1.0, 0.5), 0.8);
    let probes: Vec<_> = cm.sample_points(5, 8)?.iter().map(|q| q.x).collect();
    let coadjoint = cm.algebra.coadjoint_fitted(&map, &probes)?;
    let g = GroupElement { map: Arc::new(map), coadjoint };
    println!("equivariance residual {:.1e}", equivariance_residual(&cm.model, &cm.algebra, &g, p)?);
    Ok(())
}
