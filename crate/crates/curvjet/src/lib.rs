//! Batch runner and file formats for [`curvjet_core`].
//!
//! A run is described by a TOML [`config::RunConfig`]; [`runner::run`]
//! samples points for every metric, executes the requested checks and
//! returns a [`report::Report`] that renders to JSON or a CSV summary.

pub mod config;
mod error;
pub mod json;
pub mod report;
pub mod runner;

use curvjet_core::verify::{concircular_closed_form, derived_identities, fit_recurrence_pack, Tolerances};
use curvjet_core::{build_metric, build_pack, MetricSpec};
use serde_json::{json, Value};

pub use error::CliError;

/// Every tensor of the curvature pack at `p`, as JSON.
pub fn curvature_dump(spec: &MetricSpec, p: &[f64], order: usize) -> Result<Value, CliError> {
    let metric = build_metric(spec)?;
    let pack = build_pack(&metric, p, order)?;
    let opt = |t: &Option<curvjet_core::Tensor>| t.as_ref().map_or(Value::Null, json::tensor);
    Ok(json!({
        "metric": spec.label(),
        "point": json::numbers(p),
        "order": order,
        "metric_tensor": json::metric(&pack.metric),
        "christoffel": json::tensor(&pack.gamma),
        "riemann": json::tensor(&pack.riemann),
        "riemann_lower": json::tensor(&pack.riemann_lower),
        "ricci": json::tensor(&pack.ricci),
        "scalar": json::number(pack.scalar),
        "einstein": json::tensor(&pack.einstein),
        "weyl_lower": opt(&pack.weyl_lower),
        "grad_scalar": opt(&pack.grad_scalar),
        "nabla_riemann": opt(&pack.nabla_riemann),
        "nabla_weyl": opt(&pack.nabla_weyl),
    }))
}

/// The recurrence fit at `p` together with the identities derived from it.
pub fn fit_dump(spec: &MetricSpec, p: &[f64], tol: &Tolerances) -> Result<Value, CliError> {
    let metric = build_metric(spec)?;
    let pack = build_pack(&metric, p, 3)?;
    let fit = fit_recurrence_pack(&pack)?;
    let derived: Vec<report::Entry> = derived_identities(&pack, &fit, tol).iter().map(Into::into).collect();
    let opt = |x: Option<f64>| x.map_or(Value::Null, json::number);
    Ok(json!({
        "metric": spec.label(),
        "point": json::numbers(p),
        "a": json::numbers(&fit.a),
        "b": json::numbers(&fit.b),
        "c": json::numbers(&fit.c),
        "beta": opt(fit.beta),
        "psi": opt(fit.psi),
        "a_squared": json::number(fit.a_squared),
        "residual": json::number(fit.residual),
        "recurrent": fit.is_recurrent(tol.recurrence),
        "degenerate": fit.degenerate,
        "rank": fit.rank,
        "gradient_alignment": opt(fit.gradient_alignment),
        "closed_form_f": opt(concircular_closed_form(&fit, &pack)),
        "derived": derived,
    }))
}
