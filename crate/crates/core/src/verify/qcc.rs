use alloc::vec::Vec;

use super::identities::riemann_symmetry_residual;
use super::recurrence::equation_residual;
use super::{IdentityReport, Tolerances};
use crate::curvature::{ricci_and_scalar, weyl_lower, CurvaturePack};
use crate::error::{Error, Result};
use crate::math;
use crate::tensors::{covariant, normalized_residual, MetricAtPoint, Tensor};

fn a_squared(metric: &MetricAtPoint, a: &[f64]) -> Result<f64> {
    let a2 = metric.covector_dot(a, a);
    let e2: f64 = a.iter().map(|x| x * x).sum();
    if math::abs(a2) <= 1e-12 * e2 || e2 == 0.0 {
        return Err(Error::NullCovector { norm_sq: a2 });
    }
    Ok(a2)
}

/// Quasi-constant curvature tensor
///
/// ```text
/// R_{jklm} = b/(n-2) [-g_{jm} P_{kl} + g_{km} P_{jl} - g_{kl} P_{jm} + g_{jl} P_{km}]
///          + ψ (g_{jm} g_{kl} - g_{jl} g_{km}),     P = A⊗A / A².
/// ```
pub fn qcc_riemann(metric: &MetricAtPoint, a: &[f64], psi: f64, b: f64) -> Result<Tensor> {
    let n = metric.dim();
    if a.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.len(),
        });
    }
    if n < 3 {
        return Err(Error::InsufficientDimension {
            what: "quasi-constant curvature",
            needed: 3,
            have: n,
        });
    }
    let a2 = a_squared(metric, a)?;
    let g = |i: usize, j: usize| metric.gij(i, j);
    let p = |i: usize, j: usize| a[i] * a[j] / a2;
    let c = b / (n as f64 - 2.0);
    Ok(Tensor::from_fn(n, covariant(4), |x| {
        let (j, k, l, m) = (x[0], x[1], x[2], x[3]);
        c * (-g(j, m) * p(k, l) + g(k, m) * p(j, l) - g(k, l) * p(j, m) + g(j, l) * p(k, m))
            + psi * (g(j, m) * g(k, l) - g(j, l) * g(k, m))
    }))
}

/// Builds the quasi-constant curvature tensor and checks by brute force
/// that it is Weyl-free, has quasi-Einstein Ricci
/// `a g + b A⊗A/A²` with `a = (R - ψ(n-1)(n-2))/(2(n-1))`, satisfies both
/// `A`-contraction identities with the same `ψ`, and reproduces the Ricci
/// reconstruction `2(n-1)R_{kl} - g_{kl}(R - ψ(n-1)(n-2)) = (n-2)[R + ψn(n-1)] A_kA_l/A²`.
pub fn synth_qcc(
    metric: &MetricAtPoint,
    a: &[f64],
    psi: f64,
    b: f64,
    tol: &Tolerances,
) -> Result<Vec<IdentityReport>> {
    let r = qcc_riemann(metric, a, psi, b)?;
    let a2 = a_squared(metric, a)?;
    let n = metric.dim();
    let nf = n as f64;
    let label = "quasi_constant_curvature";
    let judged = |name: &str, res: f64| IdentityReport::judged(name, res, tol.qcc, &[], label);
    let mut out = Vec::new();

    out.push(judged("qcc_riemann_symmetries", riemann_symmetry_residual(&r)));

    let c = weyl_lower(metric, &r)?;
    out.push(judged("qcc_weyl", normalized_residual(c.norm(), &[r.norm()])));

    let (ric, scalar) = ricci_and_scalar(metric, &r);
    let qa = (scalar - psi * (nf - 1.0) * (nf - 2.0)) / (2.0 * (nf - 1.0));
    let model = Tensor::from_fn(n, covariant(2), |x| {
        qa * metric.gij(x[0], x[1]) + b * a[x[0]] * a[x[1]] / a2
    });
    out.push(judged(
        "qcc_quasi_einstein",
        normalized_residual(ric.try_sub(&model)?.norm(), &[ric.norm(), model.norm()]),
    ));

    let pack = CurvaturePack::from_tensors(metric.clone(), r, None)?;
    for (name, eq) in [
        ("qcc_riemann_a_contraction", "riemann_a_contraction"),
        ("qcc_ricci_a_contraction", "ricci_a_contraction"),
    ] {
        out.push(judged(name, equation_residual(&pack, a, 0.0, psi, eq)?));
    }

    let lhs = Tensor::from_fn(n, covariant(2), |x| {
        2.0 * (nf - 1.0) * ric.get(x)
            - metric.gij(x[0], x[1]) * (scalar - psi * (nf - 1.0) * (nf - 2.0))
    });
    let rhs = Tensor::from_fn(n, covariant(2), |x| {
        a[x[0]] * a[x[1]] / a2 * (nf - 2.0) * (scalar + psi * nf * (nf - 1.0))
    });
    out.push(judged(
        "qcc_ricci_reconstruction",
        normalized_residual(lhs.try_sub(&rhs)?.norm(), &[lhs.norm(), rhs.norm()]),
    ));
    Ok(out)
}
