use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::{IdentityReport, Tolerances};
use crate::curvature::CurvaturePack;
use crate::error::{Error, Result};
use crate::tensors::{covariant, normalized_residual, Tensor};

/// Curvature identities that hold on every metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Identity {
    /// `∇_i R_{jklm} + ∇_j R_{kilm} + ∇_k R_{ijlm} = 0`.
    SecondBianchi,
    /// Cyclic sum of `∇C` balanced by divergence terms with `1/(n-3)`.
    WeylBianchi,
    /// Cyclic sum of `∇_i ∇_m R_{jkl}{}^m` plus Ricci-Riemann products.
    Lovelock,
    /// All three traces of `C_{jkl}{}^m` against its upper slot vanish.
    WeylTraces,
    /// Antisymmetries, pair symmetry and first Bianchi of `R_{jklm}`.
    RiemannSymmetries,
}

pub const ALL_IDENTITIES: [Identity; 5] = [
    Identity::SecondBianchi,
    Identity::WeylBianchi,
    Identity::Lovelock,
    Identity::WeylTraces,
    Identity::RiemannSymmetries,
];

impl Identity {
    pub fn name(&self) -> &'static str {
        match self {
            Identity::SecondBianchi => "second_bianchi",
            Identity::WeylBianchi => "weyl_bianchi",
            Identity::Lovelock => "lovelock",
            Identity::WeylTraces => "weyl_traces",
            Identity::RiemannSymmetries => "riemann_symmetries",
        }
    }

    /// Working order needed in [`crate::build_pack`].
    pub fn required_order(&self) -> usize {
        match self {
            Identity::SecondBianchi | Identity::WeylBianchi => 3,
            Identity::Lovelock => 4,
            Identity::WeylTraces | Identity::RiemannSymmetries => 2,
        }
    }

    pub fn required_dimension(&self) -> usize {
        match self {
            Identity::WeylBianchi | Identity::WeylTraces => 4,
            _ => 2,
        }
    }

    fn tolerance(&self, tol: &Tolerances) -> f64 {
        match self {
            Identity::SecondBianchi => tol.second_bianchi,
            Identity::WeylBianchi => tol.weyl_bianchi,
            Identity::Lovelock => tol.lovelock,
            Identity::WeylTraces => tol.weyl_traces,
            Identity::RiemannSymmetries => tol.riemann_symmetries,
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Identity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Identity> {
        ALL_IDENTITIES
            .iter()
            .find(|i| i.name() == s)
            .copied()
            .ok_or_else(|| Error::InvalidSpec(format!("unknown identity `{s}`")))
    }
}

/// Residuals of the requested identities on one pack.
pub fn identity_suite(
    pack: &CurvaturePack,
    which: &[Identity],
    tol: &Tolerances,
) -> Result<Vec<IdentityReport>> {
    which
        .iter()
        .map(|id| {
            if pack.dim() < id.required_dimension() {
                return Err(Error::InsufficientDimension {
                    what: id.name(),
                    needed: id.required_dimension(),
                    have: pack.dim(),
                });
            }
            if pack.order < id.required_order() {
                return Err(Error::InsufficientOrder {
                    what: id.name(),
                    needed: id.required_order(),
                    have: pack.order,
                });
            }
            let residual = match id {
                Identity::SecondBianchi => second_bianchi(pack)?,
                Identity::WeylBianchi => weyl_bianchi(pack)?,
                Identity::Lovelock => lovelock(pack)?,
                Identity::WeylTraces => weyl_traces(pack)?,
                Identity::RiemannSymmetries => riemann_symmetry_residual(&pack.riemann_lower),
            };
            Ok(IdentityReport::judged(
                id.name(),
                residual,
                id.tolerance(tol),
                &pack.point,
                &pack.label,
            ))
        })
        .collect()
}

fn second_bianchi(pack: &CurvaturePack) -> Result<f64> {
    let nr = pack.nabla_riemann()?;
    let d = Tensor::from_fn(pack.dim(), covariant(5), |x| {
        let (i, j, k, l, m) = (x[0], x[1], x[2], x[3], x[4]);
        nr.get(&[i, j, k, l, m]) + nr.get(&[j, k, i, l, m]) + nr.get(&[k, i, j, l, m])
    });
    Ok(normalized_residual(d.norm(), &[nr.norm()]))
}

fn weyl_bianchi(pack: &CurvaturePack) -> Result<f64> {
    let nw = pack.nabla_weyl()?;
    let dv = pack.div_weyl.as_ref().expect("divergence accompanies nabla_weyl");
    let n = pack.dim();
    let g = |a: usize, b: usize| pack.metric.gij(a, b);
    let c = 1.0 / (n as f64 - 3.0);
    let rhs = Tensor::from_fn(n, covariant(5), |x| {
        let (i, j, k, l, m) = (x[0], x[1], x[2], x[3], x[4]);
        c * (g(j, m) * dv.get(&[k, i, l])
            + g(k, m) * dv.get(&[i, j, l])
            + g(i, m) * dv.get(&[j, k, l])
            + g(k, l) * dv.get(&[j, i, m])
            + g(i, l) * dv.get(&[k, j, m])
            + g(j, l) * dv.get(&[i, k, m]))
    });
    let lhs = Tensor::from_fn(n, covariant(5), |x| {
        let (i, j, k, l, m) = (x[0], x[1], x[2], x[3], x[4]);
        nw.get(&[i, j, k, l, m]) + nw.get(&[j, k, i, l, m]) + nw.get(&[k, i, j, l, m])
    });
    let d = lhs.try_sub(&rhs)?;
    Ok(normalized_residual(d.norm(), &[nw.norm(), rhs.norm()]))
}

fn lovelock(pack: &CurvaturePack) -> Result<f64> {
    let n2 = pack.nabla2_riemann()?;
    let n = pack.dim();
    let ric = &pack.ricci;
    let r = &pack.riemann;
    let products = Tensor::from_fn(n, covariant(4), |x| {
        let (i, j, k, l) = (x[0], x[1], x[2], x[3]);
        (0..n)
            .map(|m| {
                ric.get(&[i, m]) * r.get(&[j, k, l, m])
                    + ric.get(&[j, m]) * r.get(&[k, i, l, m])
                    + ric.get(&[k, m]) * r.get(&[i, j, l, m])
            })
            .sum()
    });
    let cyclic = Tensor::from_fn(n, covariant(4), |x| {
        let (i, j, k, l) = (x[0], x[1], x[2], x[3]);
        n2.get(&[i, j, k, l]) + n2.get(&[j, k, i, l]) + n2.get(&[k, i, j, l])
    });
    let d = cyclic.try_add(&products)?;
    Ok(normalized_residual(d.norm(), &[n2.norm(), products.norm()]))
}

fn weyl_traces(pack: &CurvaturePack) -> Result<f64> {
    let c = pack.weyl.as_ref().ok_or(Error::InsufficientDimension {
        what: "weyl tensor",
        needed: 4,
        have: pack.dim(),
    })?;
    let worst = [0, 1, 2]
        .iter()
        .map(|&s| c.contract(s, 3).map(|t| t.norm()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(normalized_residual(worst, &[c.norm()]))
}

/// Largest normalized defect among the algebraic Riemann symmetries of a
/// covariant rank-4 tensor.
pub fn riemann_symmetry_residual(r: &Tensor) -> f64 {
    let n = r.dim();
    let mut worst = [0.0f64; 4];
    crate::tensors::for_each_index(n, 4, |_, x| {
        let (j, k, l, m) = (x[0], x[1], x[2], x[3]);
        let v = r.get(x);
        let d = [
            v + r.get(&[k, j, l, m]),
            v + r.get(&[j, k, m, l]),
            v - r.get(&[l, m, j, k]),
            v + r.get(&[k, l, j, m]) + r.get(&[l, j, k, m]),
        ];
        for (w, x) in worst.iter_mut().zip(d) {
            *w += x * x;
        }
    });
    let worst = worst.iter().fold(0.0f64, |a, b| a.max(*b));
    normalized_residual(crate::math::sqrt(worst), &[r.norm()])
}

/// `‖C‖ / (1 + ‖R‖)`, judged against `conformal_flatness`.
pub fn conformal_flatness(pack: &CurvaturePack, tol: &Tolerances) -> Result<IdentityReport> {
    let c = pack.weyl_lower()?;
    Ok(IdentityReport::judged(
        "conformal_flatness",
        normalized_residual(c.norm(), &[pack.riemann_lower.norm()]),
        tol.conformal_flatness,
        &pack.point,
        &pack.label,
    ))
}
