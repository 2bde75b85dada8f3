//! Finite-difference reference for the connection and curvature.
//!
//! Only order-0 metric evaluations are used. First and second partials of
//! `g_{ij}` come from central differences with one Richardson step,
//! `(4 D(h) - D(2h)) / 3`, so no difference uses a step below `h`. The
//! Christoffel and Riemann tensors are assembled from them in plain real
//! arithmetic.

use alloc::vec;
use alloc::vec::Vec;

use crate::curvature::{CurvaturePack, MetricField};
use crate::error::{Error, Result};
use crate::jets::seed_variables;
use crate::linalg;
use crate::tensors::{normalized_residual, Tensor, Variance};

/// Default step.
pub const STEP: f64 = 1e-4;

fn metric_values<F: MetricField + ?Sized>(f: &F, p: &[f64]) -> Result<Vec<f64>> {
    if !f.in_domain(p) {
        return Err(Error::OutsideDomain {
            metric: f.label(),
            point: p.to_vec(),
        });
    }
    Ok(f.components(&seed_variables(p, 0)?)?
        .iter()
        .map(|j| j.value())
        .collect())
}

fn shifted(p: &[f64], shifts: &[(usize, f64)]) -> Vec<f64> {
    let mut q = p.to_vec();
    for &(i, s) in shifts {
        q[i] += s;
    }
    q
}

struct Derivatives {
    g: Vec<f64>,
    /// `d1[a][ij] = ∂_a g_ij`.
    d1: Vec<Vec<f64>>,
    /// `d2[a * n + b][ij] = ∂_a ∂_b g_ij`.
    d2: Vec<Vec<f64>>,
}

/// Per-direction component arrays.
type Partials = Vec<Vec<f64>>;

fn central<F: MetricField + ?Sized>(f: &F, p: &[f64], h: f64) -> Result<(Partials, Partials)> {
    let n = p.len();
    let g0 = metric_values(f, p)?;
    let mut d1 = Vec::with_capacity(n);
    let mut d2 = vec![Vec::new(); n * n];
    for a in 0..n {
        let plus = metric_values(f, &shifted(p, &[(a, h)]))?;
        let minus = metric_values(f, &shifted(p, &[(a, -h)]))?;
        d1.push(plus.iter().zip(&minus).map(|(x, y)| (x - y) / (2.0 * h)).collect());
        d2[a * n + a] = plus
            .iter()
            .zip(&minus)
            .zip(&g0)
            .map(|((x, y), z)| (x + y - 2.0 * z) / (h * h))
            .collect();
    }
    for a in 0..n {
        for b in a + 1..n {
            let pp = metric_values(f, &shifted(p, &[(a, h), (b, h)]))?;
            let pm = metric_values(f, &shifted(p, &[(a, h), (b, -h)]))?;
            let mp = metric_values(f, &shifted(p, &[(a, -h), (b, h)]))?;
            let mm = metric_values(f, &shifted(p, &[(a, -h), (b, -h)]))?;
            let v: Vec<f64> = (0..n * n)
                .map(|i| (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * h))
                .collect();
            d2[a * n + b] = v.clone();
            d2[b * n + a] = v;
        }
    }
    Ok((d1, d2))
}

fn richardson(coarse: Partials, fine: Partials) -> Partials {
    coarse
        .into_iter()
        .zip(fine)
        .map(|(c, f)| c.iter().zip(&f).map(|(c, f)| (4.0 * f - c) / 3.0).collect())
        .collect()
}

fn derivatives<F: MetricField + ?Sized>(f: &F, p: &[f64], h: f64) -> Result<Derivatives> {
    let (c1, c2) = central(f, p, 2.0 * h)?;
    let (f1, f2) = central(f, p, h)?;
    Ok(Derivatives {
        g: metric_values(f, p)?,
        d1: richardson(c1, f1),
        d2: richardson(c2, f2),
    })
}

/// `(Γ^k_{ij}, R_{jkl}{}^m)` by finite differences with step `h`.
pub fn fd_curvature<F: MetricField + ?Sized>(f: &F, p: &[f64], h: f64) -> Result<(Tensor, Tensor)> {
    let n = f.dimension();
    if p.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.len(),
        });
    }
    let d = derivatives(f, p, h)?;
    let gi = linalg::inverse(&d.g, n)
        .ok_or_else(|| Error::InvalidMetric(alloc::format!("{} singular at {p:?}", f.label())))?;
    let dg = |a: usize, i: usize, j: usize| d.d1[a][i * n + j];
    let ddg = |a: usize, b: usize, i: usize, j: usize| d.d2[a * n + b][i * n + j];

    // Γ_{m ij} = ½ (∂_i g_jm + ∂_j g_im - ∂_m g_ij) and its derivatives.
    let gamma_low = |m: usize, i: usize, j: usize| 0.5 * (dg(i, j, m) + dg(j, i, m) - dg(m, i, j));
    let dgamma_low = |a: usize, m: usize, i: usize, j: usize| {
        0.5 * (ddg(a, i, j, m) + ddg(a, j, i, m) - ddg(a, m, i, j))
    };
    // ∂_a g^{km} = -g^{kp} ∂_a g_pq g^{qm}.
    let mut dginv = vec![0.0; n * n * n];
    for a in 0..n {
        for k in 0..n {
            for m in 0..n {
                let mut s = 0.0;
                for pp in 0..n {
                    for q in 0..n {
                        s -= gi[k * n + pp] * dg(a, pp, q) * gi[q * n + m];
                    }
                }
                dginv[(a * n + k) * n + m] = s;
            }
        }
    }
    let contra_co_co = vec![Variance::Contra, Variance::Co, Variance::Co];
    let gamma = Tensor::from_fn(n, contra_co_co.clone(), |x| {
        (0..n).map(|m| gi[x[0] * n + m] * gamma_low(m, x[1], x[2])).sum()
    });
    // dgamma[a] = ∂_a Γ^k_{ij}
    let dgamma: Vec<Tensor> = (0..n)
        .map(|a| {
            Tensor::from_fn(n, contra_co_co.clone(), |x| {
                (0..n)
                    .map(|m| {
                        dginv[(a * n + x[0]) * n + m] * gamma_low(m, x[1], x[2])
                            + gi[x[0] * n + m] * dgamma_low(a, m, x[1], x[2])
                    })
                    .sum()
            })
        })
        .collect();
    let riemann = Tensor::from_fn(
        n,
        vec![Variance::Co, Variance::Co, Variance::Co, Variance::Contra],
        |x| {
            let (j, k, l, m) = (x[0], x[1], x[2], x[3]);
            let mut v = dgamma[k].get(&[m, j, l]) - dgamma[j].get(&[m, k, l]);
            for s in 0..n {
                v += gamma.get(&[m, k, s]) * gamma.get(&[s, j, l])
                    - gamma.get(&[m, j, s]) * gamma.get(&[s, k, l]);
            }
            v
        },
    );
    Ok((gamma, riemann))
}

/// Normalized discrepancies `(Γ, Riemann)` between a pack and the
/// finite-difference reference at the pack's point.
pub fn compare_with_pack<F: MetricField + ?Sized>(
    f: &F,
    pack: &CurvaturePack,
    h: f64,
) -> Result<(f64, f64)> {
    let (gamma, riemann) = fd_curvature(f, &pack.point, h)?;
    let dg = gamma.try_sub(&pack.gamma)?.norm();
    let dr = riemann.try_sub(&pack.riemann)?.norm();
    Ok((
        normalized_residual(dg, &[pack.gamma.norm()]),
        normalized_residual(dr, &[pack.riemann.norm()]),
    ))
}
