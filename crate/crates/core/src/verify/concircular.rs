use crate::curvature::{build_pack, covariant_derivative, MetricField, TensorField};
use crate::error::{Error, Result};
use crate::jets::seed_variables;
use crate::linalg;
use crate::tensors::{covariant, normalized_residual, Tensor, Variance};

/// Fit of `∇_k X_j ≈ ρ g_{kj} + h X_k X_j` at one point, plus the pure
/// `∇_k X_j ≈ ρ g_{kj}` fit with `h = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcircularFit {
    pub rho: f64,
    pub h: f64,
    /// Normalized residual of the two-parameter fit.
    pub residual: f64,
    /// `‖defect‖ / ‖∇X‖` of the two-parameter fit (0 when `∇X = 0`).
    pub relative_residual: f64,
    pub chen_rho: f64,
    pub chen_residual: f64,
    pub chen_relative_residual: f64,
    /// `‖∇_k X_j‖`.
    pub gradient_norm: f64,
}

fn relative(defect: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        defect / scale
    } else {
        defect
    }
}

/// `X` may be contravariant or covariant (rank 1).
pub fn concircular_fit<F, X>(f: &F, x: &X, p: &[f64]) -> Result<ConcircularFit>
where
    F: MetricField + ?Sized,
    X: TensorField + ?Sized,
{
    let variance = x.variance();
    if variance.len() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: variance.len(),
        });
    }
    let pack = build_pack(f, p, 2)?;
    let metric = &pack.metric;
    let n = metric.dim();
    let nabla = covariant_derivative(x, p, &pack)?;
    let (nabla, x_low) = {
        let v: alloc::vec::Vec<f64> = x
            .components(&seed_variables(p, 0)?)?
            .iter()
            .map(|j| j.value())
            .collect();
        match variance[0] {
            Variance::Contra => (nabla.raise_lower(1, metric)?, metric.lower(&v)),
            Variance::Co => (nabla, v),
        }
    };
    let g = metric.g();
    let xx = Tensor::from_fn(n, covariant(2), |i| x_low[i[0]] * x_low[i[1]]);

    let mut design = alloc::vec![0.0; n * n * 2];
    for r in 0..n * n {
        design[2 * r] = g.data()[r];
        design[2 * r + 1] = xx.data()[r];
    }
    let ls = linalg::lstsq(&design, n * n, 2, nabla.data(), 1e-12);
    let (rho, h) = (ls.solution[0], ls.solution[1]);
    let model = g.scale(rho).try_add(&xx.scale(h))?;
    let defect = nabla.try_sub(&model)?.norm();
    let gn = nabla.norm();

    let gg: f64 = g.data().iter().map(|v| v * v).sum();
    let chen_rho = g.data().iter().zip(nabla.data()).map(|(a, b)| a * b).sum::<f64>() / gg;
    let chen_model = g.scale(chen_rho);
    let chen_defect = nabla.try_sub(&chen_model)?.norm();

    Ok(ConcircularFit {
        rho,
        h,
        residual: normalized_residual(defect, &[gn, g.scale(rho).norm(), xx.scale(h).norm()]),
        relative_residual: relative(defect, gn),
        chen_rho,
        chen_residual: normalized_residual(chen_defect, &[gn, chen_model.norm()]),
        chen_relative_residual: relative(chen_defect, gn),
        gradient_norm: gn,
    })
}
