//! Killing fields, holonomic and special Hamiltonian lifts, brackets and conservation.

mod common;

use std::sync::Arc;

use common::*;
use jetphase::catalog::CatalogModel;
use jetphase::fields::{central_diff_scalar, SpacetimeModel};
use jetphase::phase::PhasePoint;
use jetphase::symmetry::*;
use jetphase::Vec4;

fn stretch() -> SpecialPhaseFunction {
    SpecialPhaseFunction::pure("stretch", Arc::new(AffineField::stretch(1)))
}

fn generic_a() -> SpecialPhaseFunction {
    SpecialPhaseFunction::new("A", Arc::new(FieldA), Arc::new(ScalarA))
}

fn generic_b() -> SpecialPhaseFunction {
    SpecialPhaseFunction::new("B", Arc::new(FieldB), Arc::new(ScalarB))
}

fn models() -> Vec<CatalogModel> {
    vec![minkowski(), rn(2.0, 0.7, 0.4)]
}

#[test]
fn killing_check_flags_non_killing_fields() {
    for cm in models() {
        let probes: Vec<Vec4> = cm.sample_points(1, 10).unwrap().iter().map(|p| p.x).collect();
        let r = is_killing(&cm.model, &AffineField::stretch(1), &probes, 1e-8).unwrap();
        assert!(!r.is_killing && r.metric > 1e-3, "{r:?}");
    }
    // boosts are not isometries of Reissner–Nordström
    let cm = rn(2.0, 0.7, 0.4);
    let probes: Vec<Vec4> = cm.sample_points(2, 10).unwrap().iter().map(|p| p.x).collect();
    assert!(!is_killing(&cm.model, &AffineField::boost(1), &probes, 1e-8).unwrap().is_killing);
}

#[test]
fn lie_derivative_of_metric_matches_flow_pullback() {
    // (L_X g)(x) = d/dt (Fl_t^* g)(x) for the affine stretch, whose flow is explicit
    let cm = rn(2.0, 0.7, 0.4);
    let x = Vec4::new(0.3, 6.0, 1.1, 0.4);
    let t = 1e-5;
    let pull = |s: f64| {
        let e = s.exp();
        let y = Vec4::new(x[0], x[1] * e, x[2], x[3]);
        let mut j = jetphase::Mat4::identity();
        j[(1, 1)] = e;
        j.transpose() * cm.model.metric_at(&y).unwrap() * j
    };
    let fd = (pull(t) - pull(-t)) / (2.0 * t);
    let an = lie_metric(&cm.model, &AffineField::stretch(1), &x).unwrap();
    assert!((fd - an).amax() < 1e-7, "{}", (fd - an).amax());
}

#[test]
fn killing_lifts_preserve_tau_hat_and_omega() {
    let oracle = FlowOracle::default();
    for cm in models() {
        for p in cm.sample_points(31, 4).unwrap() {
            for f in &cm.algebra.basis {
                let t = lie_tau_hat_by_flow(&cm.model, f.field.as_ref(), &p, &oracle).unwrap();
                assert!(t < 1e-5, "{} {t}", f.name);
                let w = lie_omega_by_flow(&cm.model, f.field.as_ref(), &p, &oracle).unwrap();
                let scale = jetphase::dynamics::omega(&cm.model, &p).unwrap().amax();
                assert!(w < 1e-6 * scale.max(1.0), "{} {w}", f.name);
            }
            let t = lie_tau_hat_by_flow(&cm.model, &AffineField::stretch(1), &p, &oracle).unwrap();
            assert!(t > 1e-2, "{t}");
        }
    }
}

#[test]
fn connection_variation_display_matches_flow_transport() {
    let oracle = FlowOracle::default();
    let cm = rn(2.0, 0.7, 0.4);
    let fields: Vec<Arc<dyn VectorField>> = vec![Arc::new(AffineField::stretch(1)), Arc::new(FieldA)];
    for p in cm.sample_points(41, 3).unwrap() {
        for x in &fields {
            let flow = lie_connection_by_flow(&cm.model, x.as_ref(), &p, &oracle).unwrap();
            let disp = connection_variation(&cm.model, x.as_ref(), &p).unwrap();
            let scale = disp.amax().max(1.0);
            for i in 0..3 {
                for lam in 0..4 {
                    assert!((flow[(4 + i, lam)] - disp[(i, lam)]).abs() < 1e-6 * scale, "{flow}\n{disp}");
                }
            }
            // every other block of the variation vanishes
            let mut rest = flow;
            rest.view_mut((4, 0), (3, 4)).fill(0.0);
            assert!(rest.amax() < 1e-6 * scale, "{rest}");
        }
        for f in &cm.algebra.basis {
            assert!(connection_variation_residual(&cm.model, f.field.as_ref(), &p).unwrap() < 1e-9);
        }
    }
}

#[test]
fn holonomic_lift_is_the_prolonged_flow() {
    // X₍₁₎ from differentiating the prolonged flow of a boost
    use jetphase::momentum::{prolong_action, AffineMap};
    let cm = minkowski();
    let boost = AffineField::boost(1);
    for p in cm.sample_points(3, 5).unwrap() {
        let h = 1e-5;
        let fwd = prolong_action(&cm.model, &AffineMap::flow_of(&boost, h), &p).unwrap().to_vec7();
        let bwd = prolong_action(&cm.model, &AffineMap::flow_of(&boost, -h), &p).unwrap().to_vec7();
        let fd = (fwd - bwd) / (2.0 * h);
        let an = holonomic_lift(&boost, &p).unwrap();
        assert!((fd - an).amax() < 1e-8, "{}", (fd - an).amax());
    }
}

#[test]
fn self_holonomy_of_conserved_specials() {
    let mk = minkowski();
    for p in mk.sample_points(7, 20).unwrap() {
        for name in ["P0", "P1", "P2", "P3"] {
            let f = &mk.algebra.basis[mk.basis_index(name).unwrap()];
            assert!(self_holonomy_residual(&mk.model, f, &p).unwrap() < 1e-10);
        }
        assert!(self_holonomy_residual(&mk.model, &stretch(), &p).unwrap() > 1e-3);
    }
    let cm = rn(2.0, 0.7, 0.4);
    for p in cm.sample_points(8, 20).unwrap() {
        for f in &cm.algebra.basis {
            assert!(self_holonomy_residual(&cm.model, f, &p).unwrap() < 1e-8, "{}", f.name);
        }
    }
}

#[test]
fn rn_energy_scalar_satisfies_the_field_condition() {
    let cm = rn(2.0, 0.7, 0.4);
    let t = &cm.algebra.basis[cm.basis_index("T").unwrap()];
    for p in cm.sample_points(9, 10).unwrap() {
        assert!(scalar_condition_residual(&cm.model, t, &p.x).unwrap() < 1e-15);
    }
    // the opposite sign violates it
    let wrong = SpecialPhaseFunction::new("T-", t.field.clone(), Arc::new(InverseRadius { k: -0.4 }));
    let x = Vec4::new(0.0, 5.0, 1.0, 0.0);
    assert!(scalar_condition_residual(&cm.model, &wrong, &x).unwrap() > 1e-2);
}

#[test]
fn special_lift_equals_holonomic_lift_for_conserved_specials() {
    for cm in models() {
        for p in cm.sample_points(12, 30).unwrap() {
            for f in &cm.algebra.basis {
                let up = special_hamiltonian_lift(&cm.model, f, &p).unwrap();
                let hol = holonomic_lift(f.field.as_ref(), &p).unwrap();
                assert!((up - hol).amax() < 1e-9, "{} {}", f.name, (up - hol).amax());
            }
            let up = special_hamiltonian_lift(&cm.model, &stretch(), &p).unwrap();
            let hol = holonomic_lift(&AffineField::stretch(1), &p).unwrap();
            assert!((up - hol).amax() > 1e-3);
        }
    }
}

#[test]
fn special_lift_routes_agree_on_catalog_models() {
    for cm in models() {
        for p in cm.sample_points(13, 10).unwrap() {
            for f in cm.algebra.basis.iter().chain([stretch(), generic_a()].iter()) {
                let a = special_hamiltonian_lift(&cm.model, f, &p).unwrap();
                let b = special_hamiltonian_lift_lambda(&cm.model, f, &p).unwrap();
                assert!((a - b).amax() < 1e-9 * a.amax().max(1.0), "{} {}", f.name, (a - b).amax());
            }
        }
    }
}

#[test]
fn conservation_criterion_matches_reeb_derivative() {
    for cm in models() {
        for p in cm.sample_points(14, 10).unwrap() {
            for f in cm.algebra.basis.iter().chain([stretch(), generic_a()].iter()) {
                let r = conservation_residual(&cm.model, f, &p).unwrap();
                assert!(r.residual() < 1e-9 * r.gamma_f.abs().max(1.0), "{} {r:?}", f.name);
            }
            for f in &cm.algebra.basis {
                assert!(conservation_residual(&cm.model, f, &p).unwrap().gamma_f.abs() < 1e-9);
            }
        }
    }
}

#[test]
fn structural_bracket_equals_jacobi_bracket() {
    let pm = perturbed_model();
    let p = perturbed_point();
    let st = special_eval(&pm, &special_bracket(&pm, &generic_a(), &generic_b()), &p).unwrap();
    assert!((st - jacobi_bracket_value(&pm, &generic_a(), &generic_b(), &p).unwrap()).abs() < 1e-8);
    for cm in models() {
        let basis = &cm.algebra.basis;
        for p in cm.sample_points(15, 5).unwrap() {
            for f in basis.iter().chain([generic_a()].iter()) {
                for h in basis.iter().chain([stretch()].iter()) {
                    let st = special_eval(&cm.model, &special_bracket(&cm.model, f, h), &p).unwrap();
                    let jb = jacobi_bracket_value(&cm.model, f, h, &p).unwrap();
                    assert!((st - jb).abs() < 1e-8 * st.abs().max(1.0), "{} {} {st} {jb}", f.name, h.name);
                }
            }
        }
    }
}

#[test]
fn brackets_of_conserved_specials_are_conserved() {
    for cm in models() {
        let basis = &cm.algebra.basis;
        for p in cm.sample_points(16, 5).unwrap() {
            for f in basis {
                for h in basis {
                    let b = special_bracket(&cm.model, f, h);
                    let r = conservation_residual(&cm.model, &b, &p).unwrap();
                    assert!(r.gamma_f.abs() < 1e-8, "{} {r:?}", b.name);
                }
            }
        }
    }
}

#[test]
fn bracket_scalar_law_on_rn() {
    // d(X.h̆ − X'.f̆ + F̂(X, X')) = [X, X']⌟F̂
    let cm = rn(2.0, 0.7, 0.4);
    let basis = &cm.algebra.basis;
    for p in cm.sample_points(17, 5).unwrap() {
        for f in basis {
            for h in basis {
                let s = BracketScalar { model: cm.model.clone(), f: f.clone(), h: h.clone() };
                let d = central_diff_scalar(|y| s.value(y), &p.x, 1e-5).unwrap();
                let comm = Commutator { a: f.field.clone(), b: h.field.clone() }.value(&p.x).unwrap();
                let rhs = cm.model.f_hat_or_zero(&p.x).unwrap().transpose() * comm;
                assert!((d - rhs).amax() < 1e-8, "{} {}", f.name, h.name);
            }
        }
    }
}

#[test]
fn lift_is_a_bracket_homomorphism_on_conserved_pairs() {
    for cm in models() {
        let basis = &cm.algebra.basis;
        for p in cm.sample_points(18, 3).unwrap() {
            for (i, f) in basis.iter().enumerate() {
                for h in &basis[i + 1..] {
                    let r = bracket_homomorphism_residual(&cm.model, f, h, &p).unwrap();
                    assert!(r < 1e-6, "{} {} {r}", f.name, h.name);
                }
            }
        }
    }
}

#[test]
fn holonomic_lift_commutes_with_brackets() {
    // [X₍₁₎, X'₍₁₎] = [X, X']₍₁₎ for any fields
    let cm = rn(2.0, 0.7, 0.4);
    for p in cm.sample_points(19, 5).unwrap() {
        let a: Arc<dyn VectorField> = Arc::new(FieldA);
        let b: Arc<dyn VectorField> = Arc::new(jetphase::catalog::SphericalRotation::L1);
        let fd = lift_commutator_fd(&cm.model, a.as_ref(), b.as_ref(), &p).unwrap();
        let an = holonomic_lift(&Commutator { a, b }, &p).unwrap();
        assert!((fd - an).amax() < 1e-7 * an.amax().max(1.0), "{}", (fd - an).amax());
    }
}

fn jacobi_identity_residual(model: &SpacetimeModel, f: &SpecialPhaseFunction, g: &SpecialPhaseFunction, h: &SpecialPhaseFunction, p: &PhasePoint) -> f64 {
    let b = |x: &SpecialPhaseFunction, y: &SpecialPhaseFunction| special_bracket(model, x, y);
    let terms = [b(&b(f, g), h), b(&b(g, h), f), b(&b(h, f), g)];
    terms.iter().map(|t| special_eval(model, t, p).unwrap()).sum::<f64>().abs()
}

#[test]
fn jacobi_identity_on_the_poincare_algebra() {
    let cm = minkowski();
    let basis = &cm.algebra.basis;
    let p = cm.sample_points(20, 1).unwrap()[0];
    let mut worst: f64 = 0.0;
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            for k in (j + 1)..basis.len() {
                worst = worst.max(jacobi_identity_residual(&cm.model, &basis[i], &basis[j], &basis[k], &p));
            }
        }
    }
    assert!(worst < 1e-7, "{worst}");
}

#[test]
fn jacobi_identity_with_field_terms() {
    let cm = rn(2.0, 0.7, 0.4);
    let basis = &cm.algebra.basis;
    for p in cm.sample_points(22, 3).unwrap() {
        let r = jacobi_identity_residual(&cm.model, &basis[0], &basis[1], &basis[2], &p);
        assert!(r < 1e-7, "{r}");
        let r = jacobi_identity_residual(&cm.model, &basis[1], &basis[2], &basis[3], &p);
        assert!(r < 1e-7, "{r}");
    }
}
