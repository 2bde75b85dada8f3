//! Executes a [`RunConfig`] and assembles the [`Report`].

use std::collections::BTreeMap;

use curvjet_core::catalog::CatalogMetric;
use curvjet_core::oracle;
use curvjet_core::verify::{
    concircular_closed_form, concircular_fit, conformal_flatness, derived_identities,
    fit_recurrence_pack, fluid_extract, identity_suite, psi_gradient_check, synth::random_non_null_covector,
    synth_qcc, Identity, IdentityReport, RecurrenceFit, Status, Tolerances, ALL_IDENTITIES,
};
use curvjet_core::{build_metric, build_pack, sample_points, CurvaturePack, Family, MetricField, Signature};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Check, RunConfig};
use crate::json::{number, numbers};
use crate::report::{CheckRecord, MetricRecord, PointRecord, Report, RunMetadata};

/// Step used when refitting `ψ` at displaced points.
const PSI_STEP: f64 = 1e-4;

fn metric_seed(seed: u64, metric: usize) -> u64 {
    seed ^ (metric as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn point_seed(seed: u64, metric: usize, point: usize) -> u64 {
    metric_seed(seed, metric).rotate_left(17) ^ (point as u64 + 1).wrapping_mul(0xD1B5_4A32_D192_ED03)
}

pub fn run(config: &RunConfig) -> Report {
    let metadata = RunMetadata {
        seed: config.seed,
        points_per_metric: config.points_per_metric,
        kappa: config.kappa,
        checks: config.checks.iter().copied().collect(),
        tolerances: config.tolerances.entries().into_iter().collect(),
        versions: BTreeMap::from([
            ("curvjet", env!("CARGO_PKG_VERSION")),
            ("format", "1"),
        ]),
    };
    let metrics = config
        .metrics
        .iter()
        .enumerate()
        .map(|(mi, spec)| {
            let mut record = MetricRecord {
                label: spec.label(),
                family: spec.family.name().to_string(),
                dimension: spec.dimension,
                error: None,
                points: Vec::new(),
            };
            let built = build_metric(spec).and_then(|m| {
                sample_points(spec, config.points_per_metric, metric_seed(config.seed, mi))
                    .map(|pts| (m, pts))
            });
            match built {
                Ok((metric, points)) => {
                    record.points = points
                        .into_par_iter()
                        .enumerate()
                        .map(|(pi, p)| {
                            let seed = point_seed(config.seed, mi, pi);
                            PointRecord {
                                index: pi,
                                checks: run_point(&metric, &p, config, seed),
                                point: p,
                            }
                        })
                        .collect();
                }
                Err(e) => record.error = Some(e.to_string()),
            }
            record
        })
        .collect();
    Report::new(metadata, metrics)
}

fn pack_order(config: &RunConfig) -> usize {
    if config.checks.contains(&Check::Identities) {
        4
    } else {
        3
    }
}

/// All requested checks at one point, in check-name order.
pub fn run_point(metric: &CatalogMetric, p: &[f64], config: &RunConfig, seed: u64) -> Vec<CheckRecord> {
    let pack = build_pack(metric, p, pack_order(config));
    let mut fit: Option<Result<RecurrenceFit, String>> = None;
    config
        .checks
        .iter()
        .map(|&check| {
            let pack = match &pack {
                Ok(pack) => pack,
                Err(e) => return CheckRecord::errored(check, e.to_string()),
            };
            let fit = fit.get_or_insert_with(|| fit_recurrence_pack(pack).map_err(|e| e.to_string()));
            let tol = &config.tolerances;
            let result = match check {
                Check::Identities => identities(pack, tol),
                Check::RecurrenceFit => fit.clone().map(|f| recurrence(&f, tol)),
                Check::Derived => fit.clone().and_then(|f| derived(metric, pack, &f, tol)),
                Check::SynthQcc => synth(pack, tol, seed),
                Check::Concircular => concircular(metric, p, tol),
                Check::Fluid => fluid(pack, config.kappa, tol),
                Check::OracleFd => oracle_fd(metric, pack, tol),
            };
            result.unwrap_or_else(|e| CheckRecord::errored(check, e))
        })
        .collect()
}

fn not_applicable(name: &str, tol: f64, pack: &CurvaturePack) -> IdentityReport {
    IdentityReport::judged(name, f64::NAN, tol, &pack.point, &pack.label).with_status(Status::NotApplicable)
}

fn identities(pack: &CurvaturePack, tol: &Tolerances) -> Result<CheckRecord, String> {
    let n = pack.dim();
    let (run, skip): (Vec<Identity>, Vec<Identity>) = ALL_IDENTITIES
        .iter()
        .partition(|id| n >= id.required_dimension() && pack.order >= id.required_order());
    let mut reports = identity_suite(pack, &run, tol).map_err(|e| e.to_string())?;
    for id in skip {
        let t = tol.get(id.name()).unwrap_or(f64::NAN);
        reports.push(not_applicable(id.name(), t, pack));
    }
    reports.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(CheckRecord::from_reports(Check::Identities, &reports))
}

fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, number)
}

fn recurrence(fit: &RecurrenceFit, tol: &Tolerances) -> CheckRecord {
    let mut rep = IdentityReport::judged("recurrence", fit.residual, tol.recurrence, &fit.point, &fit.label);
    if fit.degenerate {
        rep = rep.with_status(Status::NotApplicable);
    } else if !fit.is_recurrent(tol.recurrence) {
        rep = rep.with_status(Status::Exploratory);
    }
    CheckRecord::from_reports(Check::RecurrenceFit, &[rep])
        .with_value("a", numbers(&fit.a))
        .with_value("a_squared", number(fit.a_squared))
        .with_value("beta", opt(fit.beta))
        .with_value("psi", opt(fit.psi))
        .with_value("rank", json!(fit.rank))
        .with_value("degenerate", json!(fit.degenerate))
        .with_value("gradient_alignment", opt(fit.gradient_alignment))
        .with_value("b_parallelism_defect", opt(fit.b_parallelism_defect))
        .with_value("c_parallelism_defect", opt(fit.c_parallelism_defect))
}

fn expects_conformal_flatness(family: Family) -> bool {
    family != Family::Schwarzschild
}

fn derived(
    metric: &CatalogMetric,
    pack: &CurvaturePack,
    fit: &RecurrenceFit,
    tol: &Tolerances,
) -> Result<CheckRecord, String> {
    let mut reports = derived_identities(pack, fit, tol);
    reports.push(psi_gradient_check(metric, fit, PSI_STEP, tol).map_err(|e| e.to_string())?);
    if pack.dim() >= 4 {
        let mut cf = conformal_flatness(pack, tol).map_err(|e| e.to_string())?;
        if !expects_conformal_flatness(metric.spec().family) {
            cf = cf.with_status(Status::Exploratory);
        }
        reports.push(cf);
    } else {
        reports.push(not_applicable("conformal_flatness", tol.conformal_flatness, pack));
    }
    reports.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(CheckRecord::from_reports(Check::Derived, &reports)
        .with_value("closed_form_f", opt(concircular_closed_form(fit, pack))))
}

fn synth(pack: &CurvaturePack, tol: &Tolerances, seed: u64) -> Result<CheckRecord, String> {
    if pack.dim() < 3 {
        return Ok(CheckRecord::from_reports(
            Check::SynthQcc,
            &[not_applicable("qcc", tol.qcc, pack)],
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let timelike = pack.metric.signature() == Signature::Lorentzian;
    let a = random_non_null_covector(&pack.metric, timelike, &mut rng);
    let psi = rng.gen_range(-1.0..1.0);
    let b = rng.gen_range(-1.0..1.0);
    let reports = synth_qcc(&pack.metric, &a, psi, b, tol).map_err(|e| e.to_string())?;
    Ok(CheckRecord::from_reports(Check::SynthQcc, &reports)
        .with_value("a", numbers(&a))
        .with_value("psi", number(psi))
        .with_value("b", number(b)))
}

fn concircular(metric: &CatalogMetric, p: &[f64], tol: &Tolerances) -> Result<CheckRecord, String> {
    let x = metric.concircular_candidate();
    let fit = concircular_fit(metric, &x, p).map_err(|e| e.to_string())?;
    let label = metric.label();
    let mut reports = vec![IdentityReport::judged("concircular", fit.chen_residual, tol.concircular, p, &label)];
    let expected = x.expected_rho(p);
    if let Some(rho) = expected {
        let r = (fit.chen_rho - rho).abs() / (1.0 + rho.abs());
        reports.push(IdentityReport::judged("concircular_rho", r, tol.concircular, p, &label));
    }
    if x.is_control() {
        reports = reports.into_iter().map(|r| r.with_status(Status::Exploratory)).collect();
    }
    Ok(CheckRecord::from_reports(Check::Concircular, &reports)
        .with_value("field", json!(x.description()))
        .with_value("control", json!(x.is_control()))
        .with_value("rho", number(fit.chen_rho))
        .with_value("expected_rho", opt(expected))
        .with_value("proper_rho", number(fit.rho))
        .with_value("proper_h", number(fit.h))
        .with_value("proper_residual", number(fit.residual))
        .with_value("gradient_norm", number(fit.gradient_norm)))
}

fn fluid(pack: &CurvaturePack, kappa: f64, tol: &Tolerances) -> Result<CheckRecord, String> {
    if pack.metric.signature() != Signature::Lorentzian || pack.dim() < 3 {
        return Ok(CheckRecord::from_reports(
            Check::Fluid,
            &[not_applicable("fluid_isotropy", tol.fluid_isotropy, pack)],
        ));
    }
    let mut u = vec![0.0; pack.dim()];
    u[0] = 1.0;
    let st = fluid_extract(pack, &u, kappa).map_err(|e| e.to_string())?;
    let j = |name: &str, r: f64, t: f64| IdentityReport::judged(name, r, t, &pack.point, &pack.label);
    let reports = [
        j("fluid_eos", st.eos_residual, tol.fluid_eos),
        j("fluid_isotropy", st.isotropy_residual, tol.fluid_isotropy),
        j("quasi_einstein", st.quasi_einstein_residual, tol.fluid_isotropy),
    ];
    Ok(CheckRecord::from_reports(Check::Fluid, &reports)
        .with_value("p", number(st.p))
        .with_value("mu", number(st.mu))
        .with_value("w", opt(st.w()))
        .with_value("ricci_a", number(st.a))
        .with_value("ricci_b", number(st.b))
        .with_value("psi_from_ricci", number(st.psi_from_ricci))
        .with_value("scalar", number(st.scalar)))
}

fn oracle_fd(metric: &CatalogMetric, pack: &CurvaturePack, tol: &Tolerances) -> Result<CheckRecord, String> {
    let (dg, dr) = oracle::compare_with_pack(metric, pack, oracle::STEP).map_err(|e| e.to_string())?;
    let j = |name: &str, r: f64| IdentityReport::judged(name, r, tol.oracle_fd, &pack.point, &pack.label);
    Ok(CheckRecord::from_reports(
        Check::OracleFd,
        &[j("oracle_christoffel", dg), j("oracle_riemann", dr)],
    ))
}
