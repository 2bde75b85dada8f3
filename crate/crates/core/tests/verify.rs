use curvjet_core::catalog::{ConcircularCandidate, ScaleFactor};
use curvjet_core::curvature::CurvaturePack;
use curvjet_core::tensors::{g_double_form, MetricAtPoint, Tensor};
use curvjet_core::verify::synth::{random_curvature_tensor, random_metric, random_non_null_covector};
use curvjet_core::verify::{
    concircular_closed_form, concircular_fit, derived_identities, fit_recurrence,
    fit_recurrence_pack, fluid_extract, qcc_riemann, recurrence_rhs, synth_qcc, Status,
    Tolerances, DEFAULT_KAPPA,
};
use curvjet_core::{build_metric, build_pack, sample_points, Error, MetricSpec, Signature};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn scaled(v: &[f64], s: f64) -> Vec<f64> {
    v.iter().map(|x| x * s).collect()
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let n: f64 = b.iter().map(|y| y * y).sum();
    (d / n).sqrt()
}

fn synthetic_pack(
    metric: &MetricAtPoint,
    riemann: Tensor,
    a: &[f64],
    beta: f64,
    psi: f64,
) -> CurvaturePack {
    let nr = recurrence_rhs(metric, &riemann, a, &scaled(a, beta), &scaled(a, psi));
    CurvaturePack::from_tensors(metric.clone(), riemann, Some(nr)).unwrap()
}

#[test]
fn fitter_recovers_synthetic_structure() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let tol = Tolerances::default();
    for trial in 0..40 {
        let n = 4 + trial % 2;
        let sig = if trial % 3 == 0 { Signature::Riemannian } else { Signature::Lorentzian };
        let g = random_metric(n, sig, &mut rng);
        let r = random_curvature_tensor(n, &mut rng);
        let a = random_non_null_covector(&g, false, &mut rng);
        let beta = rng.gen_range(0.01..10.0) * if rng.gen() { 1.0 } else { -1.0 };
        let psi = rng.gen_range(0.01..10.0) * if rng.gen() { 1.0 } else { -1.0 };
        let pack = synthetic_pack(&g, r, &a, beta, psi);
        let fit = fit_recurrence_pack(&pack).unwrap();
        assert!(!fit.degenerate);
        assert!(fit.residual < 1e-10, "{:e}", fit.residual);
        assert!(rel(&fit.a, &a) < 1e-8);
        assert!((fit.beta.unwrap() - beta).abs() < 1e-8 * beta.abs());
        assert!((fit.psi.unwrap() - psi).abs() < 1e-8 * psi.abs());
        assert!(fit.b_parallelism_defect.unwrap() < 1e-8);
        let derived = derived_identities(&pack, &fit, &tol);
        for name in ["ricci_recurrence", "scalar_recurrence"] {
            let r = derived.iter().find(|r| r.name == name).unwrap();
            assert_eq!(r.status, Status::Pass, "{name}: {:e}", r.residual);
        }
    }
}

#[test]
fn fit_residual_is_scale_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 4;
    let g = random_metric(n, Signature::Lorentzian, &mut rng);
    let r = random_curvature_tensor(n, &mut rng);
    let a = random_non_null_covector(&g, true, &mut rng);
    // Off-structure data so the residual is not trivially zero.
    let mut nr = recurrence_rhs(&g, &r, &a, &scaled(&a, 0.7), &scaled(&a, -0.3));
    for (i, v) in nr.data_mut().iter_mut().enumerate() {
        *v += 0.01 * ((i * 7919 % 13) as f64 - 6.0);
    }
    let base = fit_recurrence_pack(&CurvaturePack::from_tensors(g.clone(), r.clone(), Some(nr.clone())).unwrap()).unwrap();
    for lambda in [0.5, 2.0] {
        let gl = MetricAtPoint::new(g.g().scale(lambda).data(), n, Signature::Lorentzian).unwrap();
        let pack = CurvaturePack::from_tensors(gl, r.scale(lambda), Some(nr.scale(lambda))).unwrap();
        let fit = fit_recurrence_pack(&pack).unwrap();
        assert!((fit.residual - base.residual).abs() < 1e-10 * base.residual.max(1.0));
        assert!(rel(&fit.a, &base.a) < 1e-9);
        assert!((fit.beta.unwrap() * lambda - base.beta.unwrap()).abs() < 1e-9);
    }
    assert!(base.residual > 1e-3);
}

#[test]
fn minkowski_fit_is_degenerate() {
    let m = build_metric(&MetricSpec::minkowski(4)).unwrap();
    let p = [0.1, 0.2, 0.3, 0.4];
    let fit = fit_recurrence(&m, &p).unwrap();
    assert!(fit.degenerate);
    assert!(fit.a.iter().all(|&x| x == 0.0));
    assert_eq!(fit.residual, 0.0);
    let pack = build_pack(&m, &p, 3).unwrap();
    let derived = derived_identities(&pack, &fit, &Tolerances::default());
    assert!(derived.iter().all(|r| r.status == Status::NotApplicable));
    assert!(concircular_closed_form(&fit, &pack).is_none());
}

#[test]
fn schwarzschild_is_not_extended_recurrent() {
    let m = build_metric(&MetricSpec::schwarzschild(1.0)).unwrap();
    let fit = fit_recurrence(&m, &[0.0, 5.0, 1.2, 0.3]).unwrap();
    assert!(!fit.degenerate);
    assert!(fit.residual > 1e-3, "{:e}", fit.residual);
}

#[test]
fn rw_derived_identities_are_exploratory() {
    let spec = MetricSpec::robertson_walker(4, 0.0, ScaleFactor::Power(1.0));
    let m = build_metric(&spec).unwrap();
    let p = [1.3, 0.1, -0.2, 0.3];
    let pack = build_pack(&m, &p, 3).unwrap();
    let fit = fit_recurrence_pack(&pack).unwrap();
    let derived = derived_identities(&pack, &fit, &Tolerances::default());
    assert_eq!(derived.len(), 9);
    if !fit.is_recurrent(Tolerances::default().recurrence) {
        assert!(derived.iter().all(|r| matches!(r.status, Status::Exploratory | Status::NotApplicable)));
    }
    assert!(derived.iter().all(|r| r.status == Status::NotApplicable || r.residual >= 0.0));
}

#[test]
fn quasi_constant_curvature_recurrence_satisfies_all_derived_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let tol = Tolerances::default();
    for n in [4, 5] {
        let g = random_metric(n, Signature::Lorentzian, &mut rng);
        let a = random_non_null_covector(&g, true, &mut rng);
        let (beta, psi, b) = (0.7, -0.3, 1.1);
        let r = qcc_riemann(&g, &a, psi, b).unwrap();
        let pack = synthetic_pack(&g, r, &a, beta, psi);
        let fit = fit_recurrence_pack(&pack).unwrap();
        assert!(fit.is_recurrent(tol.recurrence), "{:e}", fit.residual);
        for rep in derived_identities(&pack, &fit, &tol) {
            assert_eq!(rep.status, Status::Pass, "{} n={n}: {:e}", rep.name, rep.residual);
        }
        let expected_f = -(n as f64 - 1.0) * beta * fit.a_squared
            / (pack.scalar + (n * (n - 1)) as f64 * psi);
        assert!((concircular_closed_form(&fit, &pack).unwrap() - expected_f).abs() < 1e-12);
    }
}

#[test]
fn qcc_reports_pass_on_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let tol = Tolerances::default();
    for draw in 0..20 {
        let n = 4 + draw % 2;
        let g = random_metric(n, Signature::Lorentzian, &mut rng);
        let a = random_non_null_covector(&g, true, &mut rng);
        let psi = rng.gen_range(-2.0..2.0);
        let b = rng.gen_range(-2.0..2.0);
        for rep in synth_qcc(&g, &a, psi, b, &tol).unwrap() {
            assert!(rep.passed(), "{}: {:e}", rep.name, rep.residual);
        }
    }
}

#[test]
fn qcc_special_cases() {
    let g = MetricAtPoint::minkowski(4);
    let a = [1.0, 0.2, 0.0, -0.1];
    // b = 0: constant curvature ψ G, Ricci = -(n-1) ψ g with R_ij = R_imj^m.
    let r = qcc_riemann(&g, &a, -0.4, 0.0).unwrap();
    let d = r.try_sub(&g_double_form(&g).scale(-0.4)).unwrap();
    assert!(d.max_abs() < 1e-15);
    let pack = CurvaturePack::from_tensors(g.clone(), r, None).unwrap();
    let want = g.g().scale(3.0 * 0.4);
    assert!(pack.ricci.try_sub(&want).unwrap().max_abs() < 1e-14);
    assert!(pack.weyl_lower.unwrap().max_abs() < 1e-14);

    // ψ = 0: loop oracle for Ricci = b/(n-2) g + b A⊗A/A².
    let b = 0.9;
    let r = qcc_riemann(&g, &a, 0.0, b).unwrap();
    let a2 = g.covector_dot(&a, &a);
    for k in 0..4 {
        for l in 0..4 {
            let mut s = 0.0;
            for m in 0..4 {
                for p in 0..4 {
                    s += g.ginv_ij(m, p) * r.get(&[k, m, l, p]);
                }
            }
            let want = b / 2.0 * g.gij(k, l) + b * a[k] * a[l] / a2;
            assert!((s - want).abs() < 1e-14);
        }
    }

    let null = [1.0, 1.0, 0.0, 0.0];
    assert!(matches!(qcc_riemann(&g, &null, 0.1, 0.1), Err(Error::NullCovector { .. })));
}

#[test]
fn chen_vector_on_robertson_walker() {
    let specs = [
        MetricSpec::robertson_walker(4, 0.0, ScaleFactor::Power(0.5)),
        MetricSpec::robertson_walker(4, -1.0, ScaleFactor::Power(2.0)),
        MetricSpec::robertson_walker(4, 1.0, ScaleFactor::Exponential(1.0)),
        MetricSpec::de_sitter_flat(4, 1.0),
        MetricSpec::einstein_static(4, 2.0),
    ];
    for spec in &specs {
        let m = build_metric(spec).unwrap();
        let x = m.concircular_candidate();
        for p in sample_points(spec, 10, 4).unwrap() {
            let fit = concircular_fit(&m, &x, &p).unwrap();
            let rho = x.expected_rho(&p).unwrap();
            assert!(fit.chen_residual < 1e-8, "{}", spec.label());
            assert!((fit.chen_rho - rho).abs() < 1e-8 * (1.0 + rho.abs()));
            assert!((fit.rho - rho).abs() < 1e-8 * (1.0 + rho.abs()));
            assert!(fit.h.abs() < 1e-8);
        }
    }
}

#[test]
fn rho_depends_only_on_time() {
    let spec = MetricSpec::robertson_walker(4, -1.0, ScaleFactor::Power(2.0 / 3.0));
    let m = build_metric(&spec).unwrap();
    let x = m.concircular_candidate();
    let t = 1.4;
    let rhos: Vec<f64> = [[0.0, 0.0, 0.0], [0.3, -0.5, 0.2], [-0.7, 0.1, 0.6]]
        .iter()
        .map(|s| concircular_fit(&m, &x, &[t, s[0], s[1], s[2]]).unwrap().chen_rho)
        .collect();
    assert!(rhos.iter().all(|r| (r - rhos[0]).abs() < 1e-9));
}

#[test]
fn other_concircular_candidates() {
    let e = build_metric(&MetricSpec::euclidean(3)).unwrap();
    let fit = concircular_fit(&e, &e.concircular_candidate(), &[0.3, -0.2, 0.5]).unwrap();
    assert!((fit.rho - 1.0).abs() < 1e-14 && fit.h.abs() < 1e-14 && fit.residual < 1e-14);

    for spec in [
        MetricSpec::sphere(3, 1.5),
        MetricSpec::warped_riemannian(4, ScaleFactor::Polynomial(vec![0.1, 0.4, -0.2])),
        MetricSpec::minkowski(4),
    ] {
        let m = build_metric(&spec).unwrap();
        let x: ConcircularCandidate = m.concircular_candidate();
        for p in sample_points(&spec, 5, 2).unwrap() {
            let fit = concircular_fit(&m, &x, &p).unwrap();
            let rho = x.expected_rho(&p).unwrap();
            assert!(fit.chen_residual < 1e-10, "{}", spec.label());
            assert!((fit.chen_rho - rho).abs() < 1e-10, "{}", spec.label());
        }
    }
}

#[test]
fn killing_field_is_not_concircular() {
    let m = build_metric(&MetricSpec::schwarzschild(1.0)).unwrap();
    let x = m.concircular_candidate();
    assert!(x.is_control());
    let fit = concircular_fit(&m, &x, &[0.0, 5.0, 1.0, 0.5]).unwrap();
    assert!(fit.chen_rho.abs() < 1e-12);
    assert!(fit.chen_relative_residual > 0.99);
}

#[test]
fn radiation_dust_and_vacuum_energy() {
    let tol = Tolerances::default();
    let u = [1.0, 0.0, 0.0, 0.0];

    let spec = MetricSpec::robertson_walker(4, 0.0, ScaleFactor::Power(0.5));
    let m = build_metric(&spec).unwrap();
    for p in sample_points(&spec, 10, 1).unwrap() {
        let pack = build_pack(&m, &p, 2).unwrap();
        let fl = fluid_extract(&pack, &u, DEFAULT_KAPPA).unwrap();
        assert!(pack.scalar.abs() < 1e-8);
        assert!((fl.w().unwrap() - 1.0 / 3.0).abs() < 1e-6);
        assert!(fl.isotropy_residual < tol.fluid_isotropy);
        assert!(fl.eos_residual < tol.fluid_eos);
        assert!((fl.u_norm_sq + 1.0).abs() < 1e-12);
    }

    let spec = MetricSpec::robertson_walker(4, 0.0, ScaleFactor::Power(2.0 / 3.0));
    let m = build_metric(&spec).unwrap();
    for p in sample_points(&spec, 10, 2).unwrap() {
        let pack = build_pack(&m, &p, 2).unwrap();
        let fl = fluid_extract(&pack, &[2.0, 0.0, 0.0, 0.0], DEFAULT_KAPPA).unwrap();
        assert!(fl.p.abs() < 1e-6 * fl.mu.abs());
        assert!(fl.eos_residual < tol.fluid_eos);
        assert!((fl.mu / 3.0 - pack.scalar / (3.0 * DEFAULT_KAPPA)).abs() < 1e-10);
    }

    let m = build_metric(&MetricSpec::de_sitter_flat(4, 1.0)).unwrap();
    let pack = build_pack(&m, &[0.4, 0.1, 0.0, -0.2], 2).unwrap();
    let fl = fluid_extract(&pack, &u, DEFAULT_KAPPA).unwrap();
    assert!((fl.p + fl.mu).abs() < 1e-6);
    assert!((fl.psi_from_ricci + 1.0).abs() < 1e-10);

    let mk = build_metric(&MetricSpec::minkowski(4)).unwrap();
    let pack = build_pack(&mk, &[0.0; 4], 2).unwrap();
    let fl = fluid_extract(&pack, &u, DEFAULT_KAPPA).unwrap();
    assert_eq!((fl.p, fl.mu, fl.isotropy_residual, fl.eos_residual), (0.0, 0.0, 0.0, 0.0));
    assert!(matches!(
        fluid_extract(&pack, &[0.0, 1.0, 0.0, 0.0], DEFAULT_KAPPA),
        Err(Error::NotTimelike { .. })
    ));
    assert!(matches!(
        fluid_extract(&pack, &[1.0, 1.0, 0.0, 0.0], DEFAULT_KAPPA),
        Err(Error::NullCovector { .. })
    ));
}

#[test]
fn quasi_einstein_ricci_on_robertson_walker() {
    for k in [-1.0, 0.0, 1.0] {
        let spec = MetricSpec::robertson_walker(4, k, ScaleFactor::Polynomial(vec![1.0, 0.3, 0.2]));
        let m = build_metric(&spec).unwrap();
        for p in sample_points(&spec, 5, 7).unwrap() {
            let pack = build_pack(&m, &p, 2).unwrap();
            let fl = fluid_extract(&pack, &[1.0, 0.0, 0.0, 0.0], DEFAULT_KAPPA).unwrap();
            assert!(fl.quasi_einstein_residual < 1e-8);
            assert!(fl.isotropy_residual < 1e-8);
            let w = pack.weyl_lower.as_ref().unwrap().norm() / (1.0 + pack.riemann_lower.norm());
            assert!(w < 1e-8);
        }
    }
}
