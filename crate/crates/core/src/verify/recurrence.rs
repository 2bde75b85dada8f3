use alloc::vec;
use alloc::vec::Vec;

use super::{IdentityReport, Status, Tolerances};
use crate::curvature::{build_pack, CurvaturePack, MetricField};
use crate::error::Result;
use crate::linalg;
use crate::math;
use crate::tensors::{covariant, g_double_form, normalized_residual, MetricAtPoint, Tensor};

/// Least-squares fit of
///
/// ```text
/// ∇_i R_{jklm} = A_i R_{jklm} + (β - ψ) A_i G_{jklm}
///              + β/2 [A_j G_{iklm} + A_k G_{jilm} + A_l G_{jkim} + A_m G_{jkli}]
/// ```
///
/// linearized in `(A, B = βA, C = ψA)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceFit {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    /// `⟨B, A⟩_g / A²`, absent when degenerate.
    pub beta: Option<f64>,
    /// `⟨C, A⟩_g / A²`, absent when degenerate.
    pub psi: Option<f64>,
    /// `g^{ij} A_i A_j`.
    pub a_squared: f64,
    /// `‖∇R - fitted right-hand side‖ / ‖∇R‖` (0 when `∇R = 0`).
    pub residual: f64,
    /// Sine of the component-space angle between `B` and `A`.
    pub b_parallelism_defect: Option<f64>,
    /// Sine of the component-space angle between `C` and `A`.
    pub c_parallelism_defect: Option<f64>,
    /// Cosine between `A` and `∇_i R` when the latter is not negligible.
    pub gradient_alignment: Option<f64>,
    pub degenerate: bool,
    pub rank: usize,
    pub point: Vec<f64>,
    pub label: alloc::string::String,
}

impl RecurrenceFit {
    /// Non-degenerate with residual within `tol`.
    pub fn is_recurrent(&self, tol: f64) -> bool {
        !self.degenerate && self.residual <= tol
    }
}

/// Right-hand side of the recurrence for given `(A, B, C)`.
pub fn recurrence_rhs(
    metric: &MetricAtPoint,
    riemann_lower: &Tensor,
    a: &[f64],
    b: &[f64],
    c: &[f64],
) -> Tensor {
    let g = g_double_form(metric);
    Tensor::from_fn(metric.dim(), covariant(5), |x| {
        let (i, j, k, l, m) = (x[0], x[1], x[2], x[3], x[4]);
        a[i] * riemann_lower.get(&[j, k, l, m])
            + (b[i] - c[i]) * g.get(&[j, k, l, m])
            + 0.5
                * (b[j] * g.get(&[i, k, l, m])
                    + b[k] * g.get(&[j, i, l, m])
                    + b[l] * g.get(&[j, k, i, m])
                    + b[m] * g.get(&[j, k, l, i]))
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sine_to(v: &[f64], a: &[f64]) -> f64 {
    let vv = dot(v, v);
    let aa = dot(a, a);
    if vv == 0.0 {
        return 0.0;
    }
    let proj = dot(v, a) / aa;
    let perp: f64 = v.iter().zip(a).map(|(x, y)| (x - proj * y) * (x - proj * y)).sum();
    math::sqrt(perp / vv)
}

const RCOND: f64 = 1e-12;
const NEGLIGIBLE: f64 = 1e-12;

/// Fits the recurrence on an already built pack (order ≥ 3).
pub fn fit_recurrence_pack(pack: &CurvaturePack) -> Result<RecurrenceFit> {
    let n = pack.dim();
    let nr = pack.nabla_riemann()?;
    let r = &pack.riemann_lower;
    let g = g_double_form(&pack.metric);
    let rows = n.pow(5);
    let cols = 3 * n;
    let mut design = vec![0.0; rows * cols];
    crate::tensors::for_each_index(n, 5, |row, x| {
        let (i, j, k, l, m) = (x[0], x[1], x[2], x[3], x[4]);
        let line = &mut design[row * cols..(row + 1) * cols];
        let gj = g.get(&[j, k, l, m]);
        line[i] += r.get(&[j, k, l, m]);
        line[n + i] += gj;
        line[2 * n + i] -= gj;
        line[n + j] += 0.5 * g.get(&[i, k, l, m]);
        line[n + k] += 0.5 * g.get(&[j, i, l, m]);
        line[n + l] += 0.5 * g.get(&[j, k, i, m]);
        line[n + m] += 0.5 * g.get(&[j, k, l, i]);
    });
    let ls = linalg::lstsq(&design, rows, cols, nr.data(), RCOND);
    let a = ls.solution[..n].to_vec();
    let b = ls.solution[n..2 * n].to_vec();
    let c = ls.solution[2 * n..].to_vec();

    let rhs = recurrence_rhs(&pack.metric, r, &a, &b, &c);
    let nr_norm = nr.norm();
    let defect = nr.try_sub(&rhs)?.norm();
    let residual = if nr_norm > 0.0 { defect / nr_norm } else { defect };

    let a_sq = pack.metric.covector_dot(&a, &a);
    let a_e = dot(&a, &a);
    let degenerate = nr_norm <= NEGLIGIBLE * (1.0 + r.norm())
        || a_e == 0.0
        || math::abs(a_sq) <= NEGLIGIBLE * a_e;
    let (beta, psi, bd, cd) = if degenerate {
        (None, None, None, None)
    } else {
        (
            Some(pack.metric.covector_dot(&b, &a) / a_sq),
            Some(pack.metric.covector_dot(&c, &a) / a_sq),
            Some(sine_to(&b, &a)),
            Some(sine_to(&c, &a)),
        )
    };
    let gradient_alignment = pack.grad_scalar.as_ref().and_then(|gr| {
        let gn = gr.norm();
        (!degenerate && gn > 1e-8).then(|| dot(gr.data(), &a) / (gn * math::sqrt(a_e)))
    });
    Ok(RecurrenceFit {
        a,
        b,
        c,
        beta,
        psi,
        a_squared: a_sq,
        residual,
        b_parallelism_defect: bd,
        c_parallelism_defect: cd,
        gradient_alignment,
        degenerate,
        rank: ls.rank,
        point: pack.point.clone(),
        label: pack.label.clone(),
    })
}

/// Builds the pack of `f` at `p` (order 3) and fits the recurrence.
pub fn fit_recurrence<F: MetricField + ?Sized>(f: &F, p: &[f64]) -> Result<RecurrenceFit> {
    fit_recurrence_pack(&build_pack(f, p, 3)?)
}

struct Terms<'a> {
    pack: &'a CurvaturePack,
    a: &'a [f64],
    a_up: Vec<f64>,
    beta: f64,
    psi: f64,
}

impl Terms<'_> {
    fn n(&self) -> usize {
        self.pack.dim()
    }
    fn nf(&self) -> f64 {
        self.n() as f64
    }
    fn g(&self, i: usize, j: usize) -> f64 {
        self.pack.metric.gij(i, j)
    }
    fn ric(&self, i: usize, j: usize) -> f64 {
        self.pack.ricci.get(&[i, j])
    }
    /// `(R - ψ(n-1)(n-2)) / (2(n-1))`.
    fn quasi_einstein_a(&self) -> f64 {
        let n = self.nf();
        (self.pack.scalar - self.psi * (n - 1.0) * (n - 2.0)) / (2.0 * (n - 1.0))
    }
}

/// Each derived equation as (lhs, rhs); the residual is
/// `‖lhs - rhs‖ / (1 + max(‖lhs‖, ‖rhs‖))`.
fn equation(t: &Terms<'_>, name: &str) -> Result<(Tensor, Tensor)> {
    let n = t.n();
    let nf = t.nf();
    let a = t.a;
    let (beta, psi) = (t.beta, t.psi);
    let scalar = t.pack.scalar;
    Ok(match name {
        "ricci_recurrence" => {
            let lhs = t.pack.nabla_ricci()?;
            let rhs = Tensor::from_fn(n, covariant(3), |x| {
                let (i, k, l) = (x[0], x[1], x[2]);
                a[i] * (t.ric(k, l) - t.g(k, l) * (nf * beta - (nf - 1.0) * psi))
                    - 0.5 * beta * (nf - 2.0) * (a[k] * t.g(i, l) + a[l] * t.g(i, k))
            });
            (lhs, rhs)
        }
        "scalar_recurrence" => {
            let lhs = t.pack.grad_scalar.clone().ok_or(crate::Error::InsufficientOrder {
                what: "gradient of scalar curvature",
                needed: 3,
                have: t.pack.order,
            })?;
            let s = scalar - (nf * nf + nf - 2.0) * beta + nf * (nf - 1.0) * psi;
            (lhs, Tensor::from_fn(n, covariant(1), |x| a[x[0]] * s))
        }
        "riemann_a_contraction" => {
            let r = &t.pack.riemann_lower;
            let lhs = Tensor::from_fn(n, covariant(3), |x| {
                (0..n).map(|m| r.get(&[x[0], x[1], x[2], m]) * t.a_up[m]).sum()
            });
            let rhs = Tensor::from_fn(n, covariant(3), |x| {
                let (j, k, l) = (x[0], x[1], x[2]);
                a[k] * (t.ric(j, l) + psi * (nf - 2.0) * t.g(j, l))
                    - a[j] * (t.ric(k, l) + psi * (nf - 2.0) * t.g(k, l))
            });
            (lhs, rhs)
        }
        "ricci_a_contraction" => {
            let lhs = Tensor::from_fn(n, covariant(1), |x| {
                (0..n).map(|m| t.ric(x[0], m) * t.a_up[m]).sum()
            });
            let s = 0.5 * (scalar + psi * (nf - 2.0) * (nf - 1.0));
            (lhs, Tensor::from_fn(n, covariant(1), |x| a[x[0]] * s))
        }
        "weyl_recurrence" => {
            let c = t.pack.weyl_lower()?;
            let lhs = t.pack.nabla_weyl()?.clone();
            let rhs = Tensor::from_fn(n, covariant(5), |x| a[x[0]] * c.get(&x[1..]));
            (lhs, rhs)
        }
        "weyl_a_contraction_form" => {
            let c = t.pack.weyl_lower()?;
            let lhs = Tensor::from_fn(n, covariant(3), |x| {
                (0..n).map(|m| c.get(&[x[0], x[1], x[2], m]) * t.a_up[m]).sum()
            });
            let qa = t.quasi_einstein_a();
            let f = (nf - 3.0) / (nf - 2.0);
            let rhs = Tensor::from_fn(n, covariant(3), |x| {
                let (j, k, l) = (x[0], x[1], x[2]);
                f * (a[k] * (t.ric(j, l) - qa * t.g(j, l)) - a[j] * (t.ric(k, l) - qa * t.g(k, l)))
            });
            (lhs, rhs)
        }
        "traceless_ricci_alignment" => {
            let qa = t.quasi_einstein_a();
            let lhs = Tensor::from_fn(n, covariant(3), |x| {
                let (j, k, l) = (x[0], x[1], x[2]);
                a[j] * (t.ric(k, l) - qa * t.g(k, l))
            });
            let rhs = Tensor::from_fn(n, covariant(3), |x| {
                let (j, k, l) = (x[0], x[1], x[2]);
                a[k] * (t.ric(j, l) - qa * t.g(j, l))
            });
            (lhs, rhs)
        }
        "weyl_a_contraction" => {
            let c = t.pack.weyl_lower()?;
            let lhs = Tensor::from_fn(n, covariant(3), |x| {
                (0..n).map(|m| c.get(&[x[0], x[1], x[2], m]) * t.a_up[m]).sum()
            });
            (lhs, Tensor::zeros(n, covariant(3)))
        }
        "weyl_divergence" => {
            t.pack.weyl_lower()?;
            let lhs = t.pack.div_weyl.clone().ok_or(crate::Error::InsufficientOrder {
                what: "divergence of weyl",
                needed: 3,
                have: t.pack.order,
            })?;
            (lhs, Tensor::zeros(n, covariant(3)))
        }
        _ => unreachable!("unknown derived identity {name}"),
    })
}

pub(super) const DERIVED: [&str; 9] = [
    "ricci_recurrence",
    "scalar_recurrence",
    "riemann_a_contraction",
    "ricci_a_contraction",
    "weyl_recurrence",
    "weyl_a_contraction_form",
    "traceless_ricci_alignment",
    "weyl_a_contraction",
    "weyl_divergence",
];

pub(super) fn equation_residual(
    pack: &CurvaturePack,
    a: &[f64],
    beta: f64,
    psi: f64,
    name: &str,
) -> Result<f64> {
    let t = Terms {
        pack,
        a,
        a_up: pack.metric.raise(a),
        beta,
        psi,
    };
    let (lhs, rhs) = equation(&t, name)?;
    let d = lhs.try_sub(&rhs)?;
    Ok(normalized_residual(d.norm(), &[lhs.norm(), rhs.norm()]))
}

/// Consequences of the recurrence evaluated with the fitted `(A, β, ψ)`.
///
/// Degenerate fits give `NotApplicable` reports (residual NaN). Fits whose
/// own residual exceeds the `recurrence` tolerance give `Exploratory`
/// reports: the residuals are informative but nothing is claimed. Weyl
/// identities on `n < 4` are `NotApplicable`.
pub fn derived_identities(
    pack: &CurvaturePack,
    fit: &RecurrenceFit,
    tol: &Tolerances,
) -> Vec<IdentityReport> {
    DERIVED
        .iter()
        .map(|&name| {
            let na = |_| {
                IdentityReport::judged(name, f64::NAN, tol.derived, &pack.point, &pack.label)
                    .with_status(Status::NotApplicable)
            };
            let (Some(beta), Some(psi)) = (fit.beta, fit.psi) else {
                return na(());
            };
            match equation_residual(pack, &fit.a, beta, psi, name) {
                Ok(r) => {
                    let rep = IdentityReport::judged(name, r, tol.derived, &pack.point, &pack.label);
                    if fit.is_recurrent(tol.recurrence) {
                        rep
                    } else {
                        rep.with_status(Status::Exploratory)
                    }
                }
                Err(_) => na(()),
            }
        })
        .collect()
}

/// `f = -(n-1) β A² / (R + n(n-1)ψ)`, the concircular coefficient implied by
/// the recurrence. `None` for degenerate fits or a vanishing denominator.
pub fn concircular_closed_form(fit: &RecurrenceFit, pack: &CurvaturePack) -> Option<f64> {
    let (beta, psi) = (fit.beta?, fit.psi?);
    let n = pack.dim() as f64;
    let den = pack.scalar + n * (n - 1.0) * psi;
    (math::abs(den) > NEGLIGIBLE * (1.0 + math::abs(pack.scalar)))
        .then(|| -(n - 1.0) * beta * fit.a_squared / den)
}

/// Compares `∇_j ψ` (central difference of refitted `ψ` along the unit
/// direction of `A^i`) with `β A_j`. Refits at `p ± step·d`.
pub fn psi_gradient_check<F: MetricField + ?Sized>(
    f: &F,
    fit: &RecurrenceFit,
    step: f64,
    tol: &Tolerances,
) -> Result<IdentityReport> {
    let name = "psi_gradient";
    let p = &fit.point;
    let (Some(beta), Some(_)) = (fit.beta, fit.psi) else {
        return Ok(IdentityReport::judged(name, f64::NAN, tol.psi_gradient, p, &fit.label)
            .with_status(Status::NotApplicable));
    };
    let pack = build_pack(f, p, 3)?;
    let up = pack.metric.raise(&fit.a);
    let len = math::sqrt(dot(&up, &up));
    let d: Vec<f64> = up.iter().map(|x| x / len).collect();
    let shifted = |s: f64| -> Result<Option<f64>> {
        let q: Vec<f64> = p.iter().zip(&d).map(|(x, y)| x + s * step * y).collect();
        Ok(fit_recurrence(f, &q)?.psi)
    };
    let (Some(plus), Some(minus)) = (shifted(1.0)?, shifted(-1.0)?) else {
        return Ok(IdentityReport::judged(name, f64::NAN, tol.psi_gradient, p, &fit.label)
            .with_status(Status::NotApplicable));
    };
    let measured = (plus - minus) / (2.0 * step);
    let expected = beta * dot(&fit.a, &d);
    let r = normalized_residual(
        math::abs(measured - expected),
        &[math::abs(measured), math::abs(expected)],
    );
    let rep = IdentityReport::judged(name, r, tol.psi_gradient, p, &fit.label);
    Ok(if fit.is_recurrent(tol.recurrence) {
        rep
    } else {
        rep.with_status(Status::Exploratory)
    })
}
