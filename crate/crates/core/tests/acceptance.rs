//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

mod common;

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use common::*;
use jetphase::catalog::{self, CatalogModel};
use jetphase::dynamics::{
    duality_residuals, lagrangian_hessian_fd, legendre_residual, nondegeneracy, omega, omega_closure_residual, theta,
    ChartObserver,
};
use jetphase::fields::{Constants, SpacetimeModel, UniformField};
use jetphase::forms::exterior_derivative_1form;
use jetphase::momentum::{
    charge_drift, equivariance_residual, momentum_map, momentum_residual, prolong_action, AffineMap, GroupElement,
    SphericalRotationMap,
};
use jetphase::motion::{integrate, IntegratorOptions, Termination, Trajectory};
use jetphase::phase::{alpha0, fd_steps, perp_metrics, PhasePoint, FD_STEP};
use jetphase::symmetry::{
    bracket_homomorphism_residual, holonomic_lift, jacobi_bracket_value, special_bracket, special_eval,
    special_hamiltonian_lift, AffineField, SpecialPhaseFunction,
};
use jetphase::{Mat4, Vec3, Vec4};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn models() -> Vec<CatalogModel> {
    vec![minkowski(), rn(2.0, 0.7, 0.4)]
}

fn duality_suite() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for cm in models() {
        for p in cm.sample_points(1001, 200).unwrap() {
            worst = worst.max(duality_residuals(&cm.model, &p).unwrap().max());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst < 1e-9 && secs < 5.0, format!("max r1..r4 = {worst:.2e} over 2 x 200 points in {secs:.2} s"))
}

fn closure_and_nondegeneracy() -> Outcome {
    let mut closure: f64 = 0.0;
    let mut top = f64::INFINITY;
    let mut check = |m: &SpacetimeModel, p: &PhasePoint| {
        closure = closure.max(omega_closure_residual(m, p).unwrap());
        top = top.min(nondegeneracy(m, p).unwrap().full.abs());
    };
    for cm in models() {
        for p in cm.sample_points(1002, 50).unwrap() {
            check(&cm.model, &p);
        }
    }
    check(&perturbed_model(), &perturbed_point());
    outcome(closure < 1e-6 && top > 1e-6, format!("max |dΩ| = {closure:.2e}, min |τ̂∧Ω³| = {top:.3e}"))
}

fn contact_case() -> Outcome {
    let schwarzschild = catalog::reissner_nordstrom(Constants::natural(), 2.0, 0.0, 0.0).unwrap();
    let neutral = SpacetimeModel { em: None, ..schwarzschild.model.clone() };
    let cases = [(minkowski(), minkowski().model), (schwarzschild, neutral)];
    let mut worst: f64 = 0.0;
    for (cm, model) in &cases {
        for p in cm.sample_points(1003, 50).unwrap() {
            let q = p.to_vec7();
            let steps = fd_steps(model, &p, FD_STEP).unwrap();
            let d_theta = exterior_derivative_1form(|y| theta(model, &PhasePoint::from_vec7(y)), &q, &steps).unwrap();
            let om = omega(model, &p).unwrap();
            worst = worst.max((om - d_theta).amax());
        }
    }
    outcome(worst < 1e-6, format!("max ‖Ω − d(−τ̂)‖ = {worst:.2e} with F = 0"))
}

fn oracle_gap(model: &SpacetimeModel, p0: &PhasePoint, targets: &[f64]) -> f64 {
    let reference = ParametrizedOracle { model, dsigma: 1e-2 }.run(p0, targets);
    let mut worst: f64 = 0.0;
    let mut here = *p0;
    for (t, (x, v)) in targets.iter().zip(reference) {
        let leg = integrate(model, &here, *t, &IntegratorOptions::rkf45(1e-12, 1e-12)).unwrap();
        assert_eq!(leg.termination, Termination::RangeEnd);
        here = *leg.last();
        worst = worst.max((Vec3::new(here.x[1], here.x[2], here.x[3]) - x).amax()).max((here.v - v).amax());
    }
    worst
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let k = Constants::new(1.0, 0.7, 1.0, 1.0).unwrap();
    let mut f = Mat4::zeros();
    f[(1, 2)] = 0.6;
    f[(2, 1)] = -0.6;
    f[(3, 0)] = 0.25;
    f[(0, 3)] = -0.25;
    let crossed = SpacetimeModel::new("crossed", Arc::new(catalog::MinkowskiMetric), k)
        .unwrap()
        .with_em(Arc::new(UniformField::new(f).unwrap()));
    let p0 = PhasePoint::new(&crossed, Vec4::new(0.0, 0.5, 0.0, 0.0), Vec3::new(0.2, 0.3, -0.1)).unwrap();
    let flat = oracle_gap(&crossed, &p0, &[2.5, 5.0, 7.5, 10.0]);

    let cm = rn(2.0, 0.7, 0.4);
    let c = circular_orbit(&cm, 10.0);
    let p0 = PhasePoint::new(&cm.model, c.x, c.v * 1.03).unwrap();
    let period = 2.0 * PI / c.v[2];
    let curved = oracle_gap(&cm.model, &p0, &[0.25 * period, 0.5 * period, 0.75 * period, period]);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        flat < 1e-6 && curved < 1e-6 && secs < 30.0,
        format!("crossed fields over x⁰ ∈ [0,10]: {flat:.2e}; RN bound orbit over one period ({period:.1}): {curved:.2e}; {secs:.1} s"),
    )
}

fn conservation() -> Outcome {
    let mk = minkowski();
    let mut flat: f64 = 0.0;
    for p in mk.sample_points(1005, 3).unwrap() {
        let p = PhasePoint::new(&mk.model, Vec4::new(0.0, p.x[1], p.x[2], p.x[3]), p.v).unwrap();
        let traj = integrate(&mk.model, &p, 10.0, &IntegratorOptions::Rk4 { step: 1e-3 }).unwrap();
        flat = flat.max(charge_drift(&mk.model, &mk.algebra, &traj).unwrap().amax());
    }
    let cm = rn(2.0, 0.7, 0.4);
    let c = circular_orbit(&cm, 10.0);
    let p0 = PhasePoint::new(&cm.model, c.x, Vec3::new(0.01, 0.004, c.v[2] * 1.04)).unwrap();
    let traj: Trajectory = integrate(&cm.model, &p0, 1000.0, &IntegratorOptions::rkf45(1e-10, 1e-10)).unwrap();
    let curved = charge_drift(&cm.model, &cm.algebra, &traj).unwrap().amax();
    let bound = traj.termination == Termination::RangeEnd && traj.points.iter().all(|p| p.x[1] < 30.0);
    outcome(
        flat < 1e-8 && curved < 1e-6 && bound,
        format!("Poincaré charges (rk4 1e-3): {flat:.2e}; RN T, L1..L3 (rkf45 1e-10, x⁰ ≤ 1000): {curved:.2e}"),
    )
}

fn special_lift_of_conserved() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut control = f64::INFINITY;
    let stretch = SpecialPhaseFunction::pure("stretch", Arc::new(AffineField::stretch(1)));
    for cm in models() {
        let mut gap: f64 = 0.0;
        for p in cm.sample_points(1006, 100).unwrap() {
            for f in &cm.algebra.basis {
                let up = special_hamiltonian_lift(&cm.model, f, &p).unwrap();
                worst = worst.max((up - holonomic_lift(f.field.as_ref(), &p).unwrap()).amax());
            }
            let up = special_hamiltonian_lift(&cm.model, &stretch, &p).unwrap();
            gap = gap.max((up - holonomic_lift(stretch.field.as_ref(), &p).unwrap()).amax());
        }
        control = control.min(gap);
    }
    outcome(
        worst < 1e-9 && control > 1e-3,
        format!("max ‖X↑[f] − X₍₁₎‖ = {worst:.2e}; non-Killing control, smallest per-model max {control:.2e}"),
    )
}

fn jacobi_residual(model: &SpacetimeModel, f: &SpecialPhaseFunction, g: &SpecialPhaseFunction, h: &SpecialPhaseFunction, p: &PhasePoint) -> f64 {
    let b = |x: &SpecialPhaseFunction, y: &SpecialPhaseFunction| special_bracket(model, x, y);
    [b(&b(f, g), h), b(&b(g, h), f), b(&b(h, f), g)].iter().map(|t| special_eval(model, t, p).unwrap()).sum::<f64>().abs()
}

fn bracket_laws() -> Outcome {
    let mut structural: f64 = 0.0;
    let mut homomorphism: f64 = 0.0;
    let generic = SpecialPhaseFunction::new("A", Arc::new(FieldA), Arc::new(ScalarA));
    for cm in models() {
        let basis = &cm.algebra.basis;
        for p in cm.sample_points(1007, 3).unwrap() {
            for f in basis.iter().chain([generic.clone()].iter()) {
                for h in basis {
                    let st = special_eval(&cm.model, &special_bracket(&cm.model, f, h), &p).unwrap();
                    let jb = jacobi_bracket_value(&cm.model, f, h, &p).unwrap();
                    structural = structural.max((st - jb).abs() / st.abs().max(1.0));
                }
            }
            for (i, f) in basis.iter().enumerate() {
                for h in &basis[i + 1..] {
                    homomorphism = homomorphism.max(bracket_homomorphism_residual(&cm.model, f, h, &p).unwrap());
                }
            }
        }
    }
    let mk = minkowski();
    let basis = &mk.algebra.basis;
    let mut jacobi: f64 = 0.0;
    for p in mk.sample_points(1008, 2).unwrap() {
        for i in 0..basis.len() {
            for j in (i + 1)..basis.len() {
                for k in (j + 1)..basis.len() {
                    jacobi = jacobi.max(jacobi_residual(&mk.model, &basis[i], &basis[j], &basis[k], &p));
                }
            }
        }
    }
    outcome(
        structural < 1e-8 && homomorphism < 1e-6 && jacobi < 1e-7,
        format!("structural vs Jacobi bracket {structural:.2e}; homomorphism {homomorphism:.2e}; Jacobi identity {jacobi:.2e}"),
    )
}

fn momentum_map_checks() -> Outcome {
    let mk = catalog::minkowski(Constants::new(2.0, 0.0, 3.0, 0.5).unwrap()).unwrap();
    let k = 2.0 * 3.0 / 0.5;
    let mut closed: f64 = 0.0;
    for p in mk.sample_points(1009, 100).unwrap() {
        let j = momentum_map(&mk.model, &mk.algebra, &p).unwrap();
        let a = alpha0(&mk.model, &p).unwrap();
        let v = Vec4::new(1.0, p.v[0], p.v[1], p.v[2]);
        for i in 1..4 {
            let want = k * a * v[i];
            closed = closed.max((j[mk.basis_index(&format!("P{i}")).unwrap()] - want).abs() / want.abs().max(1.0));
        }
        for (name, a_, b_) in [("J23", 2, 3), ("J31", 3, 1), ("J12", 1, 2)] {
            let want = k * a * (p.x[a_] * v[b_] - p.x[b_] * v[a_]);
            closed = closed.max((j[mk.basis_index(name).unwrap()] - want).abs() / want.abs().max(1.0));
        }
    }
    let mut differential: f64 = 0.0;
    for cm in [mk.clone(), rn(2.0, 0.7, 0.4)] {
        for p in cm.sample_points(1010, 100).unwrap() {
            for f in &cm.algebra.basis {
                differential = differential.max(momentum_residual(&cm.model, f.field.clone(), &p).unwrap());
            }
        }
    }
    let mut equivariance: f64 = 0.0;
    let quarter = AffineMap::flow_of(&AffineField::rotation(1, 2), PI / 2.0);
    let g = GroupElement {
        map: Arc::new(quarter),
        coadjoint: mk.algebra.coadjoint_of_flow(mk.basis_index("J12").unwrap(), PI / 2.0),
    };
    for p in mk.sample_points(1011, 50).unwrap() {
        equivariance = equivariance.max(equivariance_residual(&mk.model, &mk.algebra, &g, &p).unwrap());
    }
    let cm = rn(2.0, 0.7, 0.4);
    let probes: Vec<Vec4> = cm.sample_points(1012, 6).unwrap().iter().map(|p| p.x).collect();
    for (axis, angle) in [(Vec3::z(), 0.9), (Vec3::new(0.3, -0.5, 0.8), 1.1), (Vec3::x(), -2.0)] {
        let map = SphericalRotationMap::about_axis(axis, angle);
        let g = GroupElement { map: Arc::new(map), coadjoint: cm.algebra.coadjoint_fitted(&map, &probes).unwrap() };
        for p in cm.sample_points(1013, 50).unwrap() {
            if prolong_action(&cm.model, &map, &p).is_ok() {
                equivariance = equivariance.max(equivariance_residual(&cm.model, &cm.algebra, &g, &p).unwrap());
            }
        }
    }
    outcome(
        closed < 1e-12 && differential < 1e-8 && equivariance < 1e-8,
        format!("closed forms {closed:.2e}; ‖i_XΩ + dJ‖ {differential:.2e}; equivariance {equivariance:.2e}"),
    )
}

fn legendre_and_hessian() -> Outcome {
    let cm = rn(2.0, 0.7, 0.4);
    let k = cm.model.constants.m * cm.model.constants.c / cm.model.constants.hbar;
    let mut legendre: f64 = 0.0;
    let mut hessian: f64 = 0.0;
    for p in cm.sample_points(1014, 100).unwrap() {
        legendre = legendre.max(legendre_residual(&cm.model, &ChartObserver, &p).unwrap());
        let fd = lagrangian_hessian_fd(&cm.model, &p, 1e-3).unwrap();
        let (g_perp, _) = perp_metrics(&cm.model, &p).unwrap();
        let stated = -g_perp * (k * alpha0(&cm.model, &p).unwrap());
        hessian = hessian.max((fd - stated).amax() / stated.amax().max(1.0));
    }
    outcome(
        legendre < 1e-8 && hessian < 1e-6,
        format!("Legendre {legendre:.2e}; FD Hessian vs −(mc/ħ)α⁰g⊥ relative gap {hessian:.2e}"),
    )
}

fn integrator_order() -> Outcome {
    let cm = rn(2.0, 0.6, 0.2);
    let p0 = PhasePoint::new(&cm.model, Vec4::new(0.0, 10.0, PI / 2.0, 0.0), Vec3::new(-0.02, 0.0, 0.0)).unwrap();
    let end = |h: f64| {
        let t = integrate(&cm.model, &p0, 16.0, &IntegratorOptions::Rk4 { step: h }).unwrap();
        let p = t.last();
        assert!((p.x[0] - 16.0).abs() < 1e-12);
        Vec3::new(p.x[1], p.v[0], 0.0)
    };
    let (a, b, c) = (end(0.4), end(0.2), end(0.1));
    let order = ((a - b).norm() / (b - c).norm()).log2();
    outcome(order >= 3.9, format!("measured order {order:.3} (h = 0.4, 0.2, 0.1 on RN radial infall)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("duality suite", duality_suite),
        ("closure and nondegeneracy", closure_and_nondegeneracy),
        ("contact special case", contact_case),
        ("oracle equivalence of dynamics", oracle_equivalence),
        ("conservation of charges", conservation),
        ("special lift of conserved specials", special_lift_of_conserved),
        ("bracket laws", bracket_laws),
        ("momentum map", momentum_map_checks),
        ("Legendre identity and Lagrangian Hessian", legendre_and_hessian),
        ("integrator order", integrator_order),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("{} [{:2}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
