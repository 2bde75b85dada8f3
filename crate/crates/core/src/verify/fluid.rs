use alloc::vec::Vec;

use crate::curvature::CurvaturePack;
use crate::error::{Error, Result};
use crate::linalg;
use crate::math;
use crate::tensors::{covariant, normalized_residual, Tensor};

/// `8π` with `G = c = 1`.
pub const DEFAULT_KAPPA: f64 = 8.0 * core::f64::consts::PI;

/// Perfect-fluid reading of `κ T_{kl} = R_{kl} - ½ R g_{kl}` along `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidState {
    /// Unit timelike covector, `u² = -1`.
    pub u: Vec<f64>,
    pub u_norm_sq: f64,
    pub kappa: f64,
    pub p: f64,
    pub mu: f64,
    /// Quasi-Einstein fit `R_{kl} = a g_{kl} + b A_kA_l/A² = a g_{kl} - b u_k u_l`.
    pub a: f64,
    pub b: f64,
    pub quasi_einstein_residual: f64,
    /// `[R - 2(n-1)a] / ((n-1)(n-2))`.
    pub psi_from_ricci: f64,
    /// Normalized `‖T - (p+μ) u⊗u - p g‖`.
    pub isotropy_residual: f64,
    /// Normalized `|p - μ/(n-1) + (n-2)R/(2(n-1)κ)|`.
    pub eos_residual: f64,
    pub scalar: f64,
}

impl FluidState {
    /// `p / μ`, when `μ ≠ 0`.
    pub fn w(&self) -> Option<f64> {
        (self.mu != 0.0).then(|| self.p / self.mu)
    }
}

/// Decomposes the Einstein tensor of `pack` as a perfect fluid moving along
/// `u` (normalized internally).
pub fn fluid_extract(pack: &CurvaturePack, u: &[f64], kappa: f64) -> Result<FluidState> {
    let metric = &pack.metric;
    let n = metric.dim();
    if u.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u.len(),
        });
    }
    if n < 3 {
        return Err(Error::InsufficientDimension {
            what: "perfect fluid",
            needed: 3,
            have: n,
        });
    }
    let nf = n as f64;
    let u2 = metric.covector_dot(u, u);
    let e2: f64 = u.iter().map(|x| x * x).sum();
    if math::abs(u2) <= 1e-12 * e2 || e2 == 0.0 {
        return Err(Error::NullCovector { norm_sq: u2 });
    }
    if u2 > 0.0 {
        return Err(Error::NotTimelike { norm_sq: u2 });
    }
    let s = 1.0 / math::sqrt(-u2);
    let u: Vec<f64> = u.iter().map(|x| x * s).collect();
    let u_up = metric.raise(&u);
    let g = metric.g();
    let uu = Tensor::from_fn(n, covariant(2), |i| u[i[0]] * u[i[1]]);

    let t = pack.einstein.scale(1.0 / kappa);
    let mut mu = 0.0;
    let mut trace_h = 0.0;
    for k in 0..n {
        for l in 0..n {
            let tkl = t.get(&[k, l]);
            mu += tkl * u_up[k] * u_up[l];
            trace_h += tkl * (metric.ginv_ij(k, l) + u_up[k] * u_up[l]);
        }
    }
    let p = trace_h / (nf - 1.0);
    let fluid = uu.scale(p + mu).try_add(&g.scale(p))?;
    let isotropy_residual = normalized_residual(
        t.try_sub(&fluid)?.norm(),
        &[t.norm(), uu.scale(p + mu).norm(), g.scale(p).norm()],
    );

    let mut design = alloc::vec![0.0; n * n * 2];
    for r in 0..n * n {
        design[2 * r] = g.data()[r];
        design[2 * r + 1] = uu.data()[r];
    }
    let ls = linalg::lstsq(&design, n * n, 2, pack.ricci.data(), 1e-12);
    let (a, c) = (ls.solution[0], ls.solution[1]);
    let qe = g.scale(a).try_add(&uu.scale(c))?;
    let quasi_einstein_residual = normalized_residual(
        pack.ricci.try_sub(&qe)?.norm(),
        &[pack.ricci.norm(), g.scale(a).norm(), uu.scale(c).norm()],
    );

    let r = pack.scalar;
    let psi_from_ricci = (r - 2.0 * (nf - 1.0) * a) / ((nf - 1.0) * (nf - 2.0));
    let curv = (nf - 2.0) * r / (2.0 * (nf - 1.0) * kappa);
    let eos_residual = normalized_residual(
        math::abs(p - mu / (nf - 1.0) + curv),
        &[math::abs(p), math::abs(mu / (nf - 1.0)), math::abs(curv)],
    );

    Ok(FluidState {
        u_norm_sq: metric.covector_dot(&u, &u),
        u,
        kappa,
        p,
        mu,
        a,
        b: -c,
        quasi_einstein_residual,
        psi_from_ricci,
        isotropy_residual,
        eos_residual,
        scalar: r,
    })
}
