//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use curvjet_core::catalog::{PerturbedMetric, ScaleFactor};
use curvjet_core::curvature::CurvaturePack;
use curvjet_core::oracle;
use curvjet_core::tensors::MetricAtPoint;
use curvjet_core::verify::synth::{random_curvature_tensor, random_metric, random_non_null_covector};
use curvjet_core::verify::{
    concircular_fit, conformal_flatness, derived_identities, fit_recurrence_pack, fluid_extract,
    identity_suite, recurrence_rhs, synth_qcc, Identity, Tolerances, DEFAULT_KAPPA,
};
use curvjet_core::{build_metric, build_pack, sample_points, MetricField, MetricSpec, Signature};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rw_specs() -> Vec<MetricSpec> {
    let qs = [
        ScaleFactor::Power(1.0),
        ScaleFactor::Power(2.0),
        ScaleFactor::Power(0.5),
        ScaleFactor::Power(2.0 / 3.0),
        ScaleFactor::Exponential(1.0),
    ];
    let mut out = Vec::new();
    for k in [-1.0, 0.0, 1.0] {
        for q in &qs {
            out.push(MetricSpec::robertson_walker(4, k, q.clone()));
        }
    }
    out
}

fn catalog() -> Vec<MetricSpec> {
    let mut out = vec![
        MetricSpec::minkowski(4),
        MetricSpec::euclidean(3),
        MetricSpec::sphere(2, 1.0),
        MetricSpec::sphere(3, 1.5),
        MetricSpec::sphere(4, 1.0),
        MetricSpec::de_sitter_flat(4, 1.0),
        MetricSpec::de_sitter_flat(5, 0.7),
        MetricSpec::einstein_static(4, 2.0),
        MetricSpec::robertson_walker(5, -1.0, ScaleFactor::Power(0.5)),
        MetricSpec::warped_riemannian(4, ScaleFactor::Polynomial(vec![0.1, 0.4, -0.2])),
        MetricSpec::warped_riemannian(5, ScaleFactor::Exponential(0.3)),
        MetricSpec::schwarzschild(1.0),
    ];
    out.extend(rw_specs());
    out
}

fn engine_vs_finite_differences() -> Outcome {
    let mut worst = (0.0f64, String::new());
    let specs = catalog();
    for (i, spec) in specs.iter().enumerate() {
        let m = build_metric(spec).map_err(|e| e.to_string())?;
        for p in sample_points(spec, 20, 100 + i as u64).map_err(|e| e.to_string())? {
            let pack = build_pack(&m, &p, 2).map_err(|e| e.to_string())?;
            let (dg, dr) = oracle::compare_with_pack(&m, &pack, oracle::STEP).map_err(|e| e.to_string())?;
            let r = dg.max(dr);
            if r > worst.0 {
                worst = (r, spec.label());
            }
        }
    }
    ensure(worst.0 < 1e-5, || format!("{:.3e} on {}", worst.0, worst.1))?;
    Ok(format!("{} metrics x 20 points, worst {:.2e} ({})", specs.len(), worst.0, worst.1))
}

fn sphere_convention() -> Outcome {
    let m = build_metric(&MetricSpec::sphere(2, 1.0)).map_err(|e| e.to_string())?;
    let r2 = build_pack(&m, &[1.1, 0.4], 2).map_err(|e| e.to_string())?.scalar;
    ensure((r2 - 2.0).abs() <= 1e-9, || format!("unit 2-sphere R = {r2}"))?;
    let mut worst = 0.0f64;
    for n in 2..=4 {
        let spec = MetricSpec::sphere(n, 1.0);
        let m = build_metric(&spec).map_err(|e| e.to_string())?;
        for p in sample_points(&spec, 10, n as u64).map_err(|e| e.to_string())? {
            let r = build_pack(&m, &p, 2).map_err(|e| e.to_string())?.scalar;
            let err = (r - (n * (n - 1)) as f64).abs();
            worst = worst.max(err);
            ensure(err <= 1e-8, || format!("n={n}: R = {r}"))?;
        }
    }
    Ok(format!("R(S^2) = {r2:.15}, worst |R - n(n-1)| = {worst:.1e}"))
}

fn identity_suite_on_catalog() -> Outcome {
    let tol = Tolerances::default();
    let ids = [Identity::SecondBianchi, Identity::WeylBianchi, Identity::Lovelock];
    let mut worst = (0.0f64, String::new());
    let mut count = 0;
    let mut check = |f: &dyn MetricField, points: Vec<Vec<f64>>| -> Result<(), String> {
        let n = f.dimension();
        let run: Vec<Identity> = ids.iter().copied().filter(|i| n >= i.required_dimension()).collect();
        for p in points {
            let pack = build_pack(f, &p, 4).map_err(|e| e.to_string())?;
            for r in identity_suite(&pack, &run, &tol).map_err(|e| e.to_string())? {
                count += 1;
                if r.residual > worst.0 || r.residual.is_nan() {
                    worst = (r.residual, format!("{} on {}", r.name, f.label()));
                }
                ensure(r.residual < 1e-7, || format!("{} on {}: {:.3e}", r.name, f.label(), r.residual))?;
            }
        }
        Ok(())
    };
    for (i, spec) in catalog().iter().enumerate() {
        let m = build_metric(spec).map_err(|e| e.to_string())?;
        check(&m, sample_points(spec, 20, 200 + i as u64).map_err(|e| e.to_string())?)?;
    }
    for (n, sig, seed) in [(4, Signature::Lorentzian, 1), (5, Signature::Lorentzian, 2), (5, Signature::Riemannian, 3)] {
        let f = PerturbedMetric::random(n, sig, 0.15, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = (0..20).map(|_| (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect()).collect();
        check(&f, pts)?;
    }
    Ok(format!("{count} residuals, worst {:.2e} ({})", worst.0, worst.1))
}

fn robertson_walker_consequences() -> Outcome {
    let tol = Tolerances::default();
    let mut worst_weyl = 0.0f64;
    let mut worst_qe = 0.0f64;
    for (i, spec) in rw_specs().iter().enumerate() {
        let m = build_metric(spec).map_err(|e| e.to_string())?;
        for p in sample_points(spec, 50, 300 + i as u64).map_err(|e| e.to_string())? {
            let pack = build_pack(&m, &p, 2).map_err(|e| e.to_string())?;
            let w = conformal_flatness(&pack, &tol).map_err(|e| e.to_string())?.residual;
            let fl = fluid_extract(&pack, &[1.0, 0.0, 0.0, 0.0], DEFAULT_KAPPA).map_err(|e| e.to_string())?;
            let qe = fl.quasi_einstein_residual.max(fl.isotropy_residual);
            worst_weyl = worst_weyl.max(w);
            worst_qe = worst_qe.max(qe);
            ensure(w < 1e-8, || format!("Weyl {w:.3e} on {}", spec.label()))?;
            ensure(qe < 1e-8, || format!("quasi-Einstein {qe:.3e} on {}", spec.label()))?;
        }
    }
    let s = build_metric(&MetricSpec::schwarzschild(1.0)).map_err(|e| e.to_string())?;
    let pack = build_pack(&s, &[0.0, 10.0, 1.2, 0.3], 2).map_err(|e| e.to_string())?;
    let ws = conformal_flatness(&pack, &tol).map_err(|e| e.to_string())?.residual;
    ensure(ws > 1e-3, || format!("Schwarzschild Weyl only {ws:.3e}"))?;
    Ok(format!(
        "15 RW metrics x 50 points: Weyl <= {worst_weyl:.1e}, quasi-Einstein <= {worst_qe:.1e}; Schwarzschild Weyl {ws:.2e}"
    ))
}

fn synthetic_recurrence_round_trip() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst_param, mut worst_res, mut worst_derived) = (0.0f64, 0.0f64, 0.0f64);
    for trial in 0..100 {
        let n = 4 + trial % 2;
        let sig = if trial % 3 == 0 { Signature::Riemannian } else { Signature::Lorentzian };
        let g = random_metric(n, sig, &mut rng);
        let r = random_curvature_tensor(n, &mut rng);
        let a = random_non_null_covector(&g, false, &mut rng);
        let sign = |rng: &mut ChaCha8Rng| if rng.gen() { 1.0 } else { -1.0 };
        let beta = rng.gen_range(0.05..5.0) * sign(&mut rng);
        let psi = rng.gen_range(0.05..5.0) * sign(&mut rng);
        let scaled = |s: f64| a.iter().map(|x| x * s).collect::<Vec<_>>();
        let nr = recurrence_rhs(&g, &r, &a, &scaled(beta), &scaled(psi));
        let pack = CurvaturePack::from_tensors(g.clone(), r, Some(nr)).map_err(|e| e.to_string())?;
        let fit = fit_recurrence_pack(&pack).map_err(|e| e.to_string())?;
        ensure(!fit.degenerate, || format!("trial {trial}: degenerate fit"))?;
        let an: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let da: f64 = fit.a.iter().zip(&a).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt() / an;
        let db = (fit.beta.unwrap_or(f64::NAN) - beta).abs() / beta.abs();
        let dp = (fit.psi.unwrap_or(f64::NAN) - psi).abs() / psi.abs();
        let param = da.max(db).max(dp);
        worst_param = worst_param.max(param);
        worst_res = worst_res.max(fit.residual);
        ensure(param < 1e-8, || format!("trial {trial}: parameter error {param:.3e}"))?;
        ensure(fit.residual < 1e-10, || format!("trial {trial}: residual {:.3e}", fit.residual))?;
        for rep in derived_identities(&pack, &fit, &tol) {
            if rep.name == "ricci_recurrence" || rep.name == "scalar_recurrence" {
                worst_derived = worst_derived.max(rep.residual);
                ensure(rep.residual < 1e-8, || format!("trial {trial}: {} {:.3e}", rep.name, rep.residual))?;
            }
        }
    }
    Ok(format!(
        "100 draws: parameter error <= {worst_param:.1e}, residual <= {worst_res:.1e}, contracted identities <= {worst_derived:.1e}"
    ))
}

fn quasi_constant_curvature_algebra() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst = (0.0f64, String::new());
    let mut total = 0;
    for n in [4, 5] {
        for trial in 0..50 {
            let sig = if trial % 2 == 0 { Signature::Lorentzian } else { Signature::Riemannian };
            let g: MetricAtPoint = random_metric(n, sig, &mut rng);
            let a = random_non_null_covector(&g, sig == Signature::Lorentzian, &mut rng);
            let psi = rng.gen_range(-2.0..2.0);
            let b = rng.gen_range(-2.0..2.0);
            for rep in synth_qcc(&g, &a, psi, b, &tol).map_err(|e| e.to_string())? {
                total += 1;
                if rep.residual > worst.0 {
                    worst = (rep.residual, rep.name.clone());
                }
                ensure(rep.residual < 1e-10, || format!("n={n} trial {trial}: {} {:.3e}", rep.name, rep.residual))?;
            }
        }
    }
    Ok(format!("{total} residuals over 100 draws, worst {:.2e} ({})", worst.0, worst.1))
}

fn chen_vector() -> Outcome {
    let mut specs = rw_specs();
    specs.push(MetricSpec::de_sitter_flat(4, 1.0));
    specs.push(MetricSpec::einstein_static(4, 2.0));
    specs.push(MetricSpec::robertson_walker(5, -1.0, ScaleFactor::Power(0.5)));
    let (mut worst_res, mut worst_rho) = (0.0f64, 0.0f64);
    for (i, spec) in specs.iter().enumerate() {
        let m = build_metric(spec).map_err(|e| e.to_string())?;
        let x = m.concircular_candidate();
        for p in sample_points(spec, 50, 400 + i as u64).map_err(|e| e.to_string())? {
            let fit = concircular_fit(&m, &x, &p).map_err(|e| e.to_string())?;
            let q_dot = x.expected_rho(&p).ok_or("no expected rho")?;
            let drho = (fit.chen_rho - q_dot).abs() / q_dot.abs().max(1.0);
            worst_res = worst_res.max(fit.chen_residual);
            worst_rho = worst_rho.max(drho);
            ensure(fit.chen_residual < 1e-8, || format!("{}: residual {:.3e}", spec.label(), fit.chen_residual))?;
            ensure(drho < 1e-8, || format!("{}: rho {} vs q' {}", spec.label(), fit.chen_rho, q_dot))?;
        }
    }
    Ok(format!(
        "{} metrics x 50 points: residual <= {worst_res:.1e}, |rho - q'| <= {worst_rho:.1e}",
        specs.len()
    ))
}

fn thermodynamics() -> Outcome {
    let u = [1.0, 0.0, 0.0, 0.0];
    let mut notes = Vec::new();

    let spec = MetricSpec::robertson_walker(4, 0.0, ScaleFactor::Power(0.5));
    let m = build_metric(&spec).map_err(|e| e.to_string())?;
    let mut worst = (0.0f64, 0.0f64);
    for p in sample_points(&spec, 20, 500).map_err(|e| e.to_string())? {
        let pack = build_pack(&m, &p, 2).map_err(|e| e.to_string())?;
        let fl = fluid_extract(&pack, &u, DEFAULT_KAPPA).map_err(|e| e.to_string())?;
        let dw = (fl.w().ok_or("mu = 0")? - 1.0 / 3.0).abs();
        worst = (worst.0.max(pack.scalar.abs()), worst.1.max(dw));
        ensure(pack.scalar.abs() < 1e-8, || format!("radiation R = {:e}", pack.scalar))?;
        ensure(dw <= 1e-6, || format!("radiation w = {:?}", fl.w()))?;
    }
    notes.push(format!("radiation |R| <= {:.1e}, |w - 1/3| <= {:.1e}", worst.0, worst.1));

    let spec = MetricSpec::robertson_walker(4, 0.0, ScaleFactor::Power(2.0 / 3.0));
    let m = build_metric(&spec).map_err(|e| e.to_string())?;
    let mut worst = (0.0f64, 0.0f64);
    for p in sample_points(&spec, 20, 501).map_err(|e| e.to_string())? {
        let pack = build_pack(&m, &p, 2).map_err(|e| e.to_string())?;
        let fl = fluid_extract(&pack, &u, DEFAULT_KAPPA).map_err(|e| e.to_string())?;
        let ratio = fl.p.abs() / fl.mu.abs();
        worst = (worst.0.max(ratio), worst.1.max(fl.eos_residual));
        ensure(fl.p.abs() < 1e-6 * fl.mu.abs(), || format!("dust p = {:e}, mu = {:e}", fl.p, fl.mu))?;
        ensure(fl.eos_residual < 1e-8, || format!("dust equation of state {:e}", fl.eos_residual))?;
    }
    notes.push(format!("dust |p/mu| <= {:.1e}, eos <= {:.1e}", worst.0, worst.1));

    let spec = MetricSpec::de_sitter_flat(4, 1.0);
    let m = build_metric(&spec).map_err(|e| e.to_string())?;
    let mut worst = (0.0f64, 0.0f64);
    for p in sample_points(&spec, 20, 502).map_err(|e| e.to_string())? {
        let pack = build_pack(&m, &p, 2).map_err(|e| e.to_string())?;
        let d = pack.einstein.try_add(&pack.metric.g().scale(3.0)).map_err(|e| e.to_string())?.max_abs();
        let fl = fluid_extract(&pack, &u, DEFAULT_KAPPA).map_err(|e| e.to_string())?;
        let dp = (fl.p + fl.mu).abs();
        worst = (worst.0.max(d), worst.1.max(dp));
        ensure(d <= 1e-9, || format!("de Sitter |G + 3g| = {d:e}"))?;
        ensure(dp <= 1e-6, || format!("de Sitter p + mu = {dp:e}"))?;
    }
    notes.push(format!("de Sitter |G + 3g| <= {:.1e}, |p + mu| <= {:.1e}", worst.0, worst.1));
    Ok(notes.join("; "))
}

fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn cli_contract() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_curvjet");
    let config = workspace_root().join("configs/reference.toml");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |out: &str, extra: &[&str]| -> Result<(i32, Vec<u8>), String> {
        let path = dir.path().join(out);
        let status = Command::new(exe)
            .arg("verify")
            .arg("--config")
            .arg(&config)
            .arg("--output")
            .arg(&path)
            .args(extra)
            .output()
            .map_err(|e| e.to_string())?
            .status;
        let bytes = std::fs::read(&path).unwrap_or_default();
        Ok((status.code().unwrap_or(-1), bytes))
    };
    let (c1, a) = run("a.json", &[])?;
    let (c2, b) = run("b.json", &[])?;
    ensure(c1 == 0 && c2 == 0, || format!("reference run exited {c1}, {c2}"))?;
    ensure(!a.is_empty() && a == b, || "reports differ between runs".into())?;
    let (c3, _) = run("c.json", &["--tol", "lovelock=1e-30", "--tol", "second_bianchi=1e-30"])?;
    ensure(c3 == 1, || format!("tightened run exited {c3}"))?;
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "checks = [\"identities\"]\n[[metric]]\nfamily = \"minkowsky\"\ndimension = 4\n")
        .map_err(|e| e.to_string())?;
    let out = Command::new(exe)
        .args(["verify", "--config"])
        .arg(&bad)
        .output()
        .map_err(|e| e.to_string())?;
    let c4 = out.status.code().unwrap_or(-1);
    ensure(c4 == 2, || format!("malformed config exited {c4}"))?;
    Ok(format!("{} identical bytes; exit codes 0, 1, 2", a.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("engine vs finite differences", engine_vs_finite_differences),
        ("sphere scalar curvature convention", sphere_convention),
        ("second Bianchi, Weyl Bianchi and Lovelock identities", identity_suite_on_catalog),
        ("Robertson-Walker conformal flatness and quasi-Einstein Ricci", robertson_walker_consequences),
        ("synthetic recurrence round trip", synthetic_recurrence_round_trip),
        ("quasi-constant curvature algebra", quasi_constant_curvature_algebra),
        ("concircular time vector", chen_vector),
        ("perfect fluid thermodynamics", thermodynamics),
        ("CLI determinism and exit codes", cli_contract),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
