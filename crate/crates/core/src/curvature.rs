//! Connection, curvature and covariant derivatives from metric jets.
//!
//! [`build_pack`] evaluates the metric on coordinate jets of order `K`, then
//! works entirely in jet arithmetic: the inverse metric and Christoffel
//! symbols keep order `K - 1`, Riemann keeps `K - 2`, and each covariant
//! derivative consumes one more order. Only value parts are exported.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::jets::{seed_variables, Basis, Jet, MAX_ORDER};
use crate::math;
use crate::tensors::{covariant, for_each_index, MetricAtPoint, Signature, Tensor, Variance};

/// An analytic metric, evaluable in jet arithmetic.
///
/// Implementations must be stateless: the same coordinates always give the
/// same components.
pub trait MetricField: Send + Sync {
    fn dimension(&self) -> usize;
    fn signature(&self) -> Signature;
    fn label(&self) -> String;
    fn in_domain(&self, point: &[f64]) -> bool;
    /// Row-major `n x n` components evaluated on coordinate jets.
    fn components(&self, x: &[Jet]) -> Result<Vec<Jet>>;
}

/// A tensor field whose components can be evaluated on coordinate jets.
pub trait TensorField {
    fn dimension(&self) -> usize;
    fn variance(&self) -> Vec<Variance>;
    /// Row-major components in the order given by [`TensorField::variance`].
    fn components(&self, x: &[Jet]) -> Result<Vec<Jet>>;
}

/// Exposes the metric of a [`MetricField`] as a covariant rank-2 field.
pub struct MetricTensorField<'a, F: ?Sized>(pub &'a F);

impl<F: MetricField + ?Sized> TensorField for MetricTensorField<'_, F> {
    fn dimension(&self) -> usize {
        self.0.dimension()
    }
    fn variance(&self) -> Vec<Variance> {
        covariant(2)
    }
    fn components(&self, x: &[Jet]) -> Result<Vec<Jet>> {
        self.0.components(x)
    }
}

/// Dense tensor with jet-valued components.
#[derive(Debug, Clone)]
pub struct JetTensor {
    dim: usize,
    variance: Vec<Variance>,
    data: Vec<Jet>,
}

impl JetTensor {
    pub fn new(dim: usize, variance: Vec<Variance>, data: Vec<Jet>) -> Result<JetTensor> {
        let len = dim.pow(variance.len() as u32);
        if data.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                found: data.len(),
            });
        }
        if let Some(first) = data.first() {
            if data.iter().any(|j| j.order() != first.order()) {
                return Err(Error::InvalidMetric("jet tensor with mixed orders".into()));
            }
        }
        Ok(JetTensor {
            dim,
            variance,
            data,
        })
    }

    pub fn order(&self) -> usize {
        self.data[0].order()
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn data(&self) -> &[Jet] {
        &self.data
    }

    pub fn value(&self) -> Tensor {
        Tensor::from_data(
            self.dim,
            self.variance.clone(),
            self.data.iter().map(Jet::value).collect(),
        )
        .expect("shape preserved")
    }

    pub fn truncate(&self, order: usize) -> Result<JetTensor> {
        Ok(JetTensor {
            dim: self.dim,
            variance: self.variance.clone(),
            data: self
                .data
                .iter()
                .map(|j| j.truncate(order))
                .collect::<Result<_>>()?,
        })
    }

    fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> &Jet {
        &self.data[self.flat(idx)]
    }
}

fn check_pack_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::OrderOutOfRange(order));
    }
    Ok(())
}

/// Metric components as jets of the given order at `p`, checked for symmetry
/// in every coefficient.
pub fn metric_jets<F: MetricField + ?Sized>(f: &F, p: &[f64], order: usize) -> Result<Vec<Jet>> {
    check_pack_order(order)?;
    let n = f.dimension();
    if p.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.len(),
        });
    }
    if !f.in_domain(p) {
        return Err(Error::OutsideDomain {
            metric: f.label(),
            point: p.to_vec(),
        });
    }
    let x = seed_variables(p, order)?;
    let g = f.components(&x)?;
    if g.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: g.len(),
        });
    }
    let scale = g
        .iter()
        .flat_map(|j| j.derivatives().iter())
        .fold(0.0f64, |m, c| m.max(math::abs(*c)));
    for i in 0..n {
        for j in i + 1..n {
            let a = g[i * n + j].derivatives();
            let b = g[j * n + i].derivatives();
            if a.iter().zip(b).any(|(x, y)| math::abs(x - y) > 1e-14 * scale) {
                return Err(Error::InvalidMetric(alloc::format!(
                    "{}: components ({i}, {j}) and ({j}, {i}) differ",
                    f.label()
                )));
            }
        }
    }
    Ok(g)
}

fn jet_matmul(a: &[Jet], b: &[Jet], n: usize) -> Vec<Jet> {
    let zero = Jet::zero(a[0].basis(), a[0].order());
    let mut out = vec![zero; n * n];
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                out[i * n + j].add_product(1.0, &a[i * n + k], &b[k * n + j]);
            }
        }
    }
    out
}

/// Inverse metric jets by the finite Neumann series
/// `g⁻¹ = Σ_k (-g₀⁻¹ δ)^k g₀⁻¹`, exact because `δ = g - g₀` is nilpotent.
fn inverse_jets(g: &[Jet], g0_inv: &[f64], n: usize) -> Vec<Jet> {
    let basis = g[0].basis().clone();
    let order = g[0].order();
    let inv0: Vec<Jet> = g0_inv.iter().map(|&v| Jet::constant(&basis, order, v)).collect();
    let delta: Vec<Jet> = g
        .iter()
        .map(|j| {
            let mut d = j.clone();
            d = d.add_scalar(-j.value());
            d
        })
        .collect();
    let m: Vec<Jet> = jet_matmul(&inv0, &delta, n).into_iter().map(|j| -j).collect();
    let mut term = inv0.clone();
    let mut out = inv0;
    for _ in 0..order {
        term = jet_matmul(&m, &term, n);
        for (o, t) in out.iter_mut().zip(&term) {
            o.add_assign_jet(t);
        }
    }
    out
}

fn christoffel_jets(g: &[Jet], g_inv: &[Jet], n: usize) -> Result<JetTensor> {
    let order = g[0].order() - 1;
    // dg[c][a][b] = ∂_c g_ab
    let mut dg = Vec::with_capacity(n * n * n);
    for c in 0..n {
        for ab in 0..n * n {
            dg.push(g[ab].derivative(c)?);
        }
    }
    let ginv: Vec<Jet> = g_inv.iter().map(|j| j.truncate(order)).collect::<Result<_>>()?;
    let d = |c: usize, a: usize, b: usize| &dg[(c * n + a) * n + b];
    let zero = Jet::zero(g[0].basis(), order);
    let mut data = vec![zero.clone(); n * n * n];
    for i in 0..n {
        for j in i..n {
            // first-kind symbols [ij, m]
            let first: Vec<Jet> = (0..n)
                .map(|m| {
                    let mut s = d(i, j, m).clone();
                    s.add_assign_jet(d(j, i, m));
                    s.add_scaled(-1.0, d(m, i, j));
                    s
                })
                .collect();
            for k in 0..n {
                let mut acc = zero.clone();
                for (m, fm) in first.iter().enumerate() {
                    acc.add_product(0.5, &ginv[k * n + m], fm);
                }
                data[(k * n + i) * n + j] = acc.clone();
                data[(k * n + j) * n + i] = acc;
            }
        }
    }
    JetTensor::new(n, vec![Variance::Contra, Variance::Co, Variance::Co], data)
}

/// Christoffel symbols `Γ^k_{ij}` (slots `(k, i, j)`) from metric jets of
/// order at least 1.
pub fn christoffel(jets: &[Jet], metric: &MetricAtPoint) -> Result<Tensor> {
    let n = metric.dim();
    if jets.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: jets.len(),
        });
    }
    if jets[0].order() < 1 {
        return Err(Error::InsufficientOrder {
            what: "christoffel symbols",
            needed: 1,
            have: jets[0].order(),
        });
    }
    let g1: Vec<Jet> = jets.iter().map(|j| j.truncate(1)).collect::<Result<_>>()?;
    let basis = g1[0].basis().clone();
    let ginv: Vec<Jet> = metric
        .g_inv()
        .data()
        .iter()
        .map(|&v| Jet::constant(&basis, 1, v))
        .collect();
    Ok(christoffel_jets(&g1, &ginv, n)?.value())
}

/// Covariant derivative in jet arithmetic. The result has order one less
/// than `t` and a new leading covariant slot.
pub fn covariant_derivative_jets(t: &JetTensor, gamma: &JetTensor) -> Result<JetTensor> {
    let k = t.order();
    if k == 0 {
        return Err(Error::InsufficientOrder {
            what: "covariant derivative",
            needed: 1,
            have: 0,
        });
    }
    let out_order = k - 1;
    let n = t.dim;
    let rank = t.rank();
    let tt = t.truncate(out_order)?;
    let gt = gamma.truncate(out_order)?;
    let g = |a: usize, b: usize, c: usize| &gt.data[(a * n + b) * n + c];
    let mut variance = vec![Variance::Co];
    variance.extend_from_slice(&t.variance);
    let mut data = Vec::with_capacity(n * t.data.len());
    let mut src = vec![0usize; rank];
    let mut err = None;
    for_each_index(n, rank + 1, |_, idx| {
        if err.is_some() {
            return;
        }
        let i = idx[0];
        let s = &idx[1..];
        let mut acc = match t.get(s).derivative(i) {
            Ok(j) => j,
            Err(e) => {
                err = Some(e);
                return;
            }
        };
        for (a, var) in t.variance.iter().enumerate() {
            src.copy_from_slice(s);
            for p in 0..n {
                src[a] = p;
                let comp = tt.get(&src);
                match var {
                    Variance::Contra => acc.add_product(1.0, g(s[a], i, p), comp),
                    Variance::Co => acc.add_product(-1.0, g(p, i, s[a]), comp),
                }
            }
        }
        data.push(acc);
    });
    if let Some(e) = err {
        return Err(e);
    }
    JetTensor::new(n, variance, data)
}

/// `∇_i T` of a tensor field at `p`, using the connection stored in `pack`.
/// The new slot comes first and is covariant.
pub fn covariant_derivative<T: TensorField + ?Sized>(
    field: &T,
    p: &[f64],
    pack: &CurvaturePack,
) -> Result<Tensor> {
    let n = pack.metric.dim();
    if field.dimension() != n || p.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: field.dimension().min(p.len()),
        });
    }
    let x = seed_variables(p, 1)?;
    let comps = field.components(&x)?;
    let t = JetTensor::new(n, field.variance(), comps)?;
    let basis = x[0].basis().clone();
    let gamma = JetTensor::new(
        n,
        pack.gamma.variance().to_vec(),
        pack.gamma
            .data()
            .iter()
            .map(|&v| Jet::constant(&basis, 0, v))
            .collect(),
    )?;
    Ok(covariant_derivative_jets(&t, &gamma)?.value())
}

/// Ricci `R_{kl} = g^{mp} R_{kmlp}` and scalar curvature from a covariant
/// Riemann-like tensor.
pub fn ricci_and_scalar(metric: &MetricAtPoint, riemann_lower: &Tensor) -> (Tensor, f64) {
    let n = metric.dim();
    let ricci = Tensor::from_fn(n, covariant(2), |i| {
        let mut s = 0.0;
        for m in 0..n {
            for p in 0..n {
                s += metric.ginv_ij(m, p) * riemann_lower.get(&[i[0], m, i[1], p]);
            }
        }
        s
    });
    let scalar = (0..n)
        .flat_map(|k| (0..n).map(move |l| (k, l)))
        .map(|(k, l)| metric.ginv_ij(k, l) * ricci.get(&[k, l]))
        .sum();
    (ricci, scalar)
}

/// Weyl tensor `C_{jklm}` of a covariant Riemann-like tensor. The map is
/// linear, so it also turns `∇_i R_{jklm}` into `∇_i C_{jklm}`.
pub fn weyl_lower(metric: &MetricAtPoint, riemann_lower: &Tensor) -> Result<Tensor> {
    let n = metric.dim();
    if n < 3 {
        return Err(Error::InsufficientDimension {
            what: "weyl tensor",
            needed: 3,
            have: n,
        });
    }
    let (ric, r) = ricci_and_scalar(metric, riemann_lower);
    let nf = n as f64;
    let c1 = 1.0 / (nf - 2.0);
    let c2 = r / ((nf - 1.0) * (nf - 2.0));
    let g = |a: usize, b: usize| metric.gij(a, b);
    let rc = |a: usize, b: usize| ric.get(&[a, b]);
    Ok(Tensor::from_fn(n, covariant(4), |i| {
        let (j, k, l, m) = (i[0], i[1], i[2], i[3]);
        riemann_lower.get(i)
            + c1 * (g(j, m) * rc(k, l) - g(k, m) * rc(j, l) + rc(j, m) * g(k, l) - rc(k, m) * g(j, l))
            - c2 * (g(j, m) * g(k, l) - g(k, m) * g(j, l))
    }))
}

/// `R_{kl} - ½ R g_{kl}`.
pub fn einstein_from(metric: &MetricAtPoint, ricci: &Tensor, scalar: f64) -> Tensor {
    let n = metric.dim();
    Tensor::from_fn(n, covariant(2), |i| {
        ricci.get(i) - 0.5 * scalar * metric.gij(i[0], i[1])
    })
}

/// Applies a rank-4 linear map slice-wise to a rank-5 tensor whose first
/// slot is a derivative index.
fn map_derivative_slices(
    dim: usize,
    t: &Tensor,
    f: impl Fn(&Tensor) -> Result<Tensor>,
) -> Result<Tensor> {
    let stride = dim.pow(4);
    let mut data = Vec::with_capacity(t.data().len());
    for i in 0..dim {
        let slice = Tensor::from_data(dim, covariant(4), t.data()[i * stride..(i + 1) * stride].to_vec())?;
        data.extend_from_slice(f(&slice)?.data());
    }
    Tensor::from_data(dim, t.variance().to_vec(), data)
}

/// Every curvature quantity at one point. Optional fields depend on the
/// working order (`∇` fields need 3, `nabla2_riemann` needs 4) and on the
/// dimension (Weyl needs `n ≥ 4`).
#[derive(Debug, Clone, PartialEq)]
pub struct CurvaturePack {
    pub point: Vec<f64>,
    pub label: String,
    pub order: usize,
    pub metric: MetricAtPoint,
    /// `Γ^k_{ij}`, slots `(k, i, j)`.
    pub gamma: Tensor,
    /// `R_{jkl}{}^m`.
    pub riemann: Tensor,
    /// `R_{jklm}`.
    pub riemann_lower: Tensor,
    pub ricci: Tensor,
    pub scalar: f64,
    /// `C_{jkl}{}^m`.
    pub weyl: Option<Tensor>,
    /// `C_{jklm}`.
    pub weyl_lower: Option<Tensor>,
    pub einstein: Tensor,
    /// `∇_i R`.
    pub grad_scalar: Option<Tensor>,
    /// `∇_i R_{jklm}`.
    pub nabla_riemann: Option<Tensor>,
    /// `∇_i C_{jklm}`.
    pub nabla_weyl: Option<Tensor>,
    /// `∇_m C_{jkl}{}^m`.
    pub div_weyl: Option<Tensor>,
    /// `∇_i ∇_m R_{jkl}{}^m`.
    pub nabla2_riemann: Option<Tensor>,
}

impl CurvaturePack {
    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn weyl_lower(&self) -> Result<&Tensor> {
        self.weyl_lower.as_ref().ok_or(Error::InsufficientDimension {
            what: "weyl tensor",
            needed: 4,
            have: self.dim(),
        })
    }

    pub fn nabla_riemann(&self) -> Result<&Tensor> {
        self.nabla_riemann.as_ref().ok_or(Error::InsufficientOrder {
            what: "covariant derivative of riemann",
            needed: 3,
            have: self.order,
        })
    }

    pub fn nabla_weyl(&self) -> Result<&Tensor> {
        if self.dim() < 4 {
            return Err(Error::InsufficientDimension {
                what: "covariant derivative of weyl",
                needed: 4,
                have: self.dim(),
            });
        }
        self.nabla_weyl.as_ref().ok_or(Error::InsufficientOrder {
            what: "covariant derivative of weyl",
            needed: 3,
            have: self.order,
        })
    }

    pub fn nabla2_riemann(&self) -> Result<&Tensor> {
        self.nabla2_riemann.as_ref().ok_or(Error::InsufficientOrder {
            what: "second covariant derivative of riemann",
            needed: 4,
            have: self.order,
        })
    }

    /// `∇_i R_{kl} = g^{mp} ∇_i R_{kmlp}`.
    pub fn nabla_ricci(&self) -> Result<Tensor> {
        let nr = self.nabla_riemann()?;
        let n = self.dim();
        let m = &self.metric;
        Ok(Tensor::from_fn(n, covariant(3), |i| {
            let mut s = 0.0;
            for a in 0..n {
                for b in 0..n {
                    s += m.ginv_ij(a, b) * nr.get(&[i[0], i[1], a, i[2], b]);
                }
            }
            s
        }))
    }

    /// Assembles a pack from algebraic data: a covariant Riemann-like tensor
    /// and optionally its covariant derivative. The connection is left zero
    /// and the point empty; everything else is derived by contraction.
    pub fn from_tensors(
        metric: MetricAtPoint,
        riemann_lower: Tensor,
        nabla_riemann: Option<Tensor>,
    ) -> Result<CurvaturePack> {
        let n = metric.dim();
        if riemann_lower.dim() != n || riemann_lower.rank() != 4 {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: riemann_lower.dim(),
            });
        }
        let riemann = riemann_lower.raise_lower(3, &metric)?;
        let (ricci, scalar) = ricci_and_scalar(&metric, &riemann_lower);
        let einstein = einstein_from(&metric, &ricci, scalar);
        let (weyl_lower, weyl) = if n >= 4 {
            let c = weyl_lower(&metric, &riemann_lower)?;
            let cm = c.raise_lower(3, &metric)?;
            (Some(c), Some(cm))
        } else {
            (None, None)
        };
        let mut pack = CurvaturePack {
            point: Vec::new(),
            label: String::from("synthetic"),
            order: if nabla_riemann.is_some() { 3 } else { 2 },
            gamma: Tensor::zeros(n, vec![Variance::Contra, Variance::Co, Variance::Co]),
            riemann,
            riemann_lower,
            ricci,
            scalar,
            weyl,
            weyl_lower,
            einstein,
            grad_scalar: None,
            nabla_riemann: None,
            nabla_weyl: None,
            div_weyl: None,
            nabla2_riemann: None,
            metric,
        };
        if let Some(nr) = nabla_riemann {
            pack.attach_nabla_riemann(nr)?;
        }
        Ok(pack)
    }

    fn attach_nabla_riemann(&mut self, nr: Tensor) -> Result<()> {
        let n = self.dim();
        self.nabla_riemann = Some(nr);
        let nric = self.nabla_ricci()?;
        let m = &self.metric;
        self.grad_scalar = Some(Tensor::from_fn(n, covariant(1), |i| {
            let mut s = 0.0;
            for k in 0..n {
                for l in 0..n {
                    s += m.ginv_ij(k, l) * nric.get(&[i[0], k, l]);
                }
            }
            s
        }));
        if n >= 4 {
            let nr = self.nabla_riemann.as_ref().unwrap();
            let nw = map_derivative_slices(n, nr, |s| weyl_lower(m, s))?;
            let div = Tensor::from_fn(n, covariant(3), |i| {
                let mut s = 0.0;
                for a in 0..n {
                    for p in 0..n {
                        s += m.ginv_ij(a, p) * nw.get(&[a, i[0], i[1], i[2], p]);
                    }
                }
                s
            });
            self.nabla_weyl = Some(nw);
            self.div_weyl = Some(div);
        }
        Ok(())
    }
}

/// Builds the full curvature pack of `f` at `p` from metric jets of the
/// given order (2, 3 or 4).
pub fn build_pack<F: MetricField + ?Sized>(f: &F, p: &[f64], order: usize) -> Result<CurvaturePack> {
    if !(2..=MAX_ORDER).contains(&order) {
        return Err(if order > MAX_ORDER {
            Error::OrderOutOfRange(order)
        } else {
            Error::InsufficientOrder {
                what: "curvature pack",
                needed: 2,
                have: order,
            }
        });
    }
    let n = f.dimension();
    let g = metric_jets(f, p, order)?;
    let g0: Vec<f64> = g.iter().map(Jet::value).collect();
    let metric = MetricAtPoint::new(&g0, n, f.signature())?;
    let g_inv = inverse_jets(&g, metric.g_inv().data(), n);
    let gamma = christoffel_jets(&g, &g_inv, n)?;

    // Riemann R_{jkl}^m at order K-2.
    let ro = order - 2;
    let basis: alloc::sync::Arc<Basis> = g[0].basis().clone();
    let gt = gamma.truncate(ro)?;
    let dgamma: Vec<JetTensor> = (0..n)
        .map(|c| {
            Ok(JetTensor {
                dim: n,
                variance: gamma.variance.clone(),
                data: gamma.data.iter().map(|j| j.derivative(c)).collect::<Result<_>>()?,
            })
        })
        .collect::<Result<_>>()?;
    let gam = |m: usize, a: usize, b: usize| &gt.data[(m * n + a) * n + b];
    let zero = Jet::zero(&basis, ro);
    let mut rdata = Vec::with_capacity(n.pow(4));
    for_each_index(n, 4, |_, i| {
        let (j, k, l, m) = (i[0], i[1], i[2], i[3]);
        let mut acc = dgamma[k].get(&[m, j, l]).clone();
        acc.add_scaled(-1.0, dgamma[j].get(&[m, k, l]));
        for s in 0..n {
            acc.add_product(1.0, gam(m, k, s), gam(s, j, l));
            acc.add_product(-1.0, gam(m, j, s), gam(s, k, l));
        }
        rdata.push(acc);
    });
    let riemann_j = JetTensor::new(
        n,
        vec![Variance::Co, Variance::Co, Variance::Co, Variance::Contra],
        rdata,
    )?;

    let gtr: Vec<Jet> = g.iter().map(|j| j.truncate(ro)).collect::<Result<_>>()?;
    let mut ldata = Vec::with_capacity(n.pow(4));
    for_each_index(n, 4, |_, i| {
        let mut acc = zero.clone();
        for p in 0..n {
            acc.add_product(1.0, riemann_j.get(&[i[0], i[1], i[2], p]), &gtr[p * n + i[3]]);
        }
        ldata.push(acc);
    });
    let riemann_lower_j = JetTensor::new(n, covariant(4), ldata)?;

    let riemann = riemann_j.value();
    let riemann_lower = riemann_lower_j.value();
    let (ricci, scalar) = ricci_and_scalar(&metric, &riemann_lower);
    let einstein = einstein_from(&metric, &ricci, scalar);
    let (weyl_lower_t, weyl) = if n >= 4 {
        let c = weyl_lower(&metric, &riemann_lower)?;
        let cm = c.raise_lower(3, &metric)?;
        (Some(c), Some(cm))
    } else {
        (None, None)
    };

    let mut pack = CurvaturePack {
        point: p.to_vec(),
        label: f.label(),
        order,
        metric,
        gamma: gamma.value(),
        riemann,
        riemann_lower,
        ricci,
        scalar,
        weyl,
        weyl_lower: weyl_lower_t,
        einstein,
        grad_scalar: None,
        nabla_riemann: None,
        nabla_weyl: None,
        div_weyl: None,
        nabla2_riemann: None,
    };

    if order >= 3 {
        let nr = covariant_derivative_jets(&riemann_lower_j, &gamma)?;
        pack.attach_nabla_riemann(nr.value())?;
    }
    if order >= 4 {
        // D_{jkl} = ∇_m R_{jkl}^m, then ∇_i D_{jkl}.
        let nmixed = covariant_derivative_jets(&riemann_j, &gamma)?;
        let mut ddata = Vec::with_capacity(n.pow(3));
        let dzero = Jet::zero(&basis, nmixed.order());
        for_each_index(n, 3, |_, i| {
            let mut acc = dzero.clone();
            for m in 0..n {
                acc.add_assign_jet(nmixed.get(&[m, i[0], i[1], i[2], m]));
            }
            ddata.push(acc);
        });
        let div = JetTensor::new(n, covariant(3), ddata)?;
        pack.nabla2_riemann = Some(covariant_derivative_jets(&div, &gamma)?.value());
    }
    Ok(pack)
}

/// `R_{kl} - ½ R g_{kl}` of a pack.
pub fn einstein_tensor(pack: &CurvaturePack) -> Tensor {
    pack.einstein.clone()
}
