//! Dense tensors with explicit slot variance.
//!
//! Components are stored row-major over the slots in variance order, so for
//! a rank-3 tensor over dimension `n` the entry `[a, b, c]` lives at
//! `(a * n + b) * n + c`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg;
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variance {
    Co,
    Contra,
}

impl Variance {
    pub fn flipped(self) -> Variance {
        match self {
            Variance::Co => Variance::Contra,
            Variance::Contra => Variance::Co,
        }
    }
}

/// `n` covariant slots.
pub fn covariant(rank: usize) -> Vec<Variance> {
    vec![Variance::Co; rank]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    dim: usize,
    variance: Vec<Variance>,
    data: Vec<f64>,
}

/// Iterates over all multi-indices of `rank` slots in row-major order.
pub(crate) fn for_each_index(dim: usize, rank: usize, mut f: impl FnMut(usize, &[usize])) {
    let total = dim.pow(rank as u32);
    let mut idx = vec![0usize; rank];
    for flat in 0..total {
        f(flat, &idx);
        for s in (0..rank).rev() {
            idx[s] += 1;
            if idx[s] < dim {
                break;
            }
            idx[s] = 0;
        }
    }
}

impl Tensor {
    pub fn zeros(dim: usize, variance: Vec<Variance>) -> Tensor {
        let len = dim.pow(variance.len() as u32);
        Tensor {
            dim,
            variance,
            data: vec![0.0; len],
        }
    }

    pub fn scalar(value: f64) -> Tensor {
        Tensor {
            dim: 1,
            variance: Vec::new(),
            data: vec![value],
        }
    }

    pub fn from_data(dim: usize, variance: Vec<Variance>, data: Vec<f64>) -> Result<Tensor> {
        let len = dim.pow(variance.len() as u32);
        if data.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                found: data.len(),
            });
        }
        Ok(Tensor {
            dim,
            variance,
            data,
        })
    }

    pub fn from_fn(dim: usize, variance: Vec<Variance>, mut f: impl FnMut(&[usize]) -> f64) -> Tensor {
        let mut t = Tensor::zeros(dim, variance);
        let rank = t.rank();
        let data = &mut t.data;
        for_each_index(dim, rank, |flat, idx| data[flat] = f(idx));
        t
    }

    /// Mixed Kronecker delta `δ_i^j` (slots co, contra).
    pub fn kronecker(dim: usize) -> Tensor {
        Tensor::from_fn(dim, vec![Variance::Co, Variance::Contra], |i| {
            if i[0] == i[1] {
                1.0
            } else {
                0.0
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Scalar value of a rank-0 tensor.
    pub fn as_scalar(&self) -> Option<f64> {
        if self.rank() == 0 {
            Some(self.data[0])
        } else {
            None
        }
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.flat_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let f = self.flat_index(idx);
        self.data[f] = value;
    }

    /// Frobenius norm of the components.
    pub fn norm(&self) -> f64 {
        math::norm(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(math::abs(*x)))
    }

    fn check_same_shape(&self, other: &Tensor) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if self.variance != other.variance {
            return Err(Error::InvalidMetric(format!(
                "variance mismatch: {:?} vs {:?}",
                self.variance, other.variance
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Tensor) -> Result<Tensor> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        out.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a += b);
        Ok(out)
    }

    pub fn try_sub(&self, other: &Tensor) -> Result<Tensor> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        out.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a -= b);
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Tensor {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|a| *a *= s);
        out
    }

    /// Outer product; the variance list is the concatenation.
    pub fn tensor_product(&self, other: &Tensor) -> Result<Tensor> {
        if self.rank() == 0 {
            return Ok(other.scale(self.data[0]));
        }
        if other.rank() == 0 {
            return Ok(self.scale(other.data[0]));
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut variance = self.variance.clone();
        variance.extend_from_slice(&other.variance);
        let mut data = Vec::with_capacity(self.data.len() * other.data.len());
        for a in &self.data {
            data.extend(other.data.iter().map(|b| a * b));
        }
        Ok(Tensor {
            dim: self.dim,
            variance,
            data,
        })
    }

    /// Sums over a pair of opposite-variance slots; the remaining slots keep
    /// their order.
    pub fn contract(&self, slot_a: usize, slot_b: usize) -> Result<Tensor> {
        let rank = self.rank();
        for s in [slot_a, slot_b] {
            if s >= rank {
                return Err(Error::SlotOutOfRange { slot: s, rank });
            }
        }
        if slot_a == slot_b || self.variance[slot_a] == self.variance[slot_b] {
            return Err(Error::SameVariance {
                a: slot_a,
                b: slot_b,
            });
        }
        let variance: Vec<Variance> = self
            .variance
            .iter()
            .enumerate()
            .filter(|(s, _)| *s != slot_a && *s != slot_b)
            .map(|(_, v)| *v)
            .collect();
        let n = self.dim;
        let mut full = vec![0usize; rank];
        let out = Tensor::from_fn(n, variance, |rest| {
            let mut r = rest.iter();
            for (s, slot) in full.iter_mut().enumerate() {
                if s != slot_a && s != slot_b {
                    *slot = *r.next().unwrap();
                }
            }
            (0..n)
                .map(|p| {
                    full[slot_a] = p;
                    full[slot_b] = p;
                    self.get(&full)
                })
                .sum()
        });
        if out.rank() == 0 {
            return Ok(Tensor::scalar(out.data[0]));
        }
        Ok(out)
    }

    /// Flips the variance of one slot by contracting with `g` (lowering) or
    /// `g⁻¹` (raising). The slot keeps its position.
    pub fn raise_lower(&self, slot: usize, metric: &MetricAtPoint) -> Result<Tensor> {
        let rank = self.rank();
        if slot >= rank {
            return Err(Error::SlotOutOfRange { slot, rank });
        }
        if metric.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: metric.dim(),
            });
        }
        let m = match self.variance[slot] {
            Variance::Co => metric.g_inv(),
            Variance::Contra => metric.g(),
        };
        let mut variance = self.variance.clone();
        variance[slot] = variance[slot].flipped();
        let n = self.dim;
        let mut src = vec![0usize; rank];
        Ok(Tensor::from_fn(n, variance, |idx| {
            src.copy_from_slice(idx);
            (0..n)
                .map(|p| {
                    src[slot] = p;
                    m.data[idx[slot] * n + p] * self.get(&src)
                })
                .sum()
        }))
    }

    /// Reorders slots: output slot `s` is input slot `perm[s]`.
    pub fn permuted(&self, perm: &[usize]) -> Tensor {
        assert_eq!(perm.len(), self.rank());
        let variance = perm.iter().map(|&p| self.variance[p]).collect();
        let mut src = vec![0usize; self.rank()];
        Tensor::from_fn(self.dim, variance, |idx| {
            for (s, &p) in perm.iter().enumerate() {
                src[p] = idx[s];
            }
            self.get(&src)
        })
    }

    /// Symmetric part in two slots.
    pub fn symmetrized(&self, a: usize, b: usize) -> Tensor {
        let mut perm: Vec<usize> = (0..self.rank()).collect();
        perm.swap(a, b);
        let swapped = self.permuted(&perm);
        let mut out = self.clone();
        out.data
            .iter_mut()
            .zip(&swapped.data)
            .for_each(|(x, y)| *x = 0.5 * (*x + y));
        out
    }
}

/// Signature of a metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    Riemannian,
    /// `(-, +, ..., +)`
    Lorentzian,
}

impl Signature {
    pub fn name(&self) -> &'static str {
        match self {
            Signature::Riemannian => "riemannian",
            Signature::Lorentzian => "lorentzian",
        }
    }
}

/// Validated metric and inverse at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricAtPoint {
    g: Tensor,
    g_inv: Tensor,
    signature: Signature,
}

impl MetricAtPoint {
    /// Checks symmetry (1e-14 relative), invertibility (`g g⁻¹ = 1` to 1e-12)
    /// and that the eigenvalue signs match `signature`.
    pub fn new(components: &[f64], dim: usize, signature: Signature) -> Result<MetricAtPoint> {
        if components.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: components.len(),
            });
        }
        if components.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMetric("non-finite component".into()));
        }
        let scale = components.iter().fold(0.0f64, |m, x| m.max(math::abs(*x)));
        for i in 0..dim {
            for j in i + 1..dim {
                let d = math::abs(components[i * dim + j] - components[j * dim + i]);
                if d > 1e-14 * scale {
                    return Err(Error::InvalidMetric(format!(
                        "not symmetric at ({i}, {j}): defect {d:e}"
                    )));
                }
            }
        }
        let inv = linalg::inverse(components, dim)
            .ok_or_else(|| Error::InvalidMetric("singular metric".into()))?;
        let prod = linalg::matmul(components, &inv, dim, dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                let e = if i == j { 1.0 } else { 0.0 };
                if math::abs(prod[i * dim + j] - e) > 1e-12 {
                    return Err(Error::InvalidMetric("ill-conditioned metric".into()));
                }
            }
        }
        let ev = linalg::symmetric_eigenvalues(components, dim);
        let negatives = ev.iter().filter(|&&x| x < 0.0).count();
        let expected = match signature {
            Signature::Riemannian => 0,
            Signature::Lorentzian => 1,
        };
        if negatives != expected {
            return Err(Error::InvalidMetric(format!(
                "eigenvalues {ev:?} do not match {} signature",
                signature.name()
            )));
        }
        // Symmetrize the inverse; elimination leaves last-bit asymmetry.
        let mut g_inv = Tensor::from_data(dim, vec![Variance::Contra; 2], inv)?;
        g_inv = g_inv.symmetrized(0, 1);
        Ok(MetricAtPoint {
            g: Tensor::from_data(dim, covariant(2), components.to_vec())?,
            g_inv,
            signature,
        })
    }

    pub fn minkowski(dim: usize) -> MetricAtPoint {
        let mut c = vec![0.0; dim * dim];
        c[0] = -1.0;
        for i in 1..dim {
            c[i * dim + i] = 1.0;
        }
        MetricAtPoint::new(&c, dim, Signature::Lorentzian).expect("Minkowski metric is valid")
    }

    pub fn euclidean(dim: usize) -> MetricAtPoint {
        let mut c = vec![0.0; dim * dim];
        for i in 0..dim {
            c[i * dim + i] = 1.0;
        }
        MetricAtPoint::new(&c, dim, Signature::Riemannian).expect("Euclidean metric is valid")
    }

    pub fn dim(&self) -> usize {
        self.g.dim
    }

    pub fn g(&self) -> &Tensor {
        &self.g
    }

    pub fn g_inv(&self) -> &Tensor {
        &self.g_inv
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn gij(&self, i: usize, j: usize) -> f64 {
        self.g.data[i * self.dim() + j]
    }

    pub fn ginv_ij(&self, i: usize, j: usize) -> f64 {
        self.g_inv.data[i * self.dim() + j]
    }

    /// Raises a covector given as components.
    pub fn raise(&self, covector: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.ginv_ij(i, j) * covector[j]).sum())
            .collect()
    }

    /// Lowers a vector given as components.
    pub fn lower(&self, vector: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.gij(i, j) * vector[j]).sum())
            .collect()
    }

    /// `g^{ij} a_i b_j` for two covectors.
    pub fn covector_dot(&self, a: &[f64], b: &[f64]) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += self.ginv_ij(i, j) * a[i] * b[j];
            }
        }
        s
    }
}

/// `G_{jklm} = g_{mj} g_{kl} - g_{mk} g_{jl}`.
pub fn g_double_form(metric: &MetricAtPoint) -> Tensor {
    Tensor::from_fn(metric.dim(), covariant(4), |i| {
        let (j, k, l, m) = (i[0], i[1], i[2], i[3]);
        metric.gij(m, j) * metric.gij(k, l) - metric.gij(m, k) * metric.gij(j, l)
    })
}

/// `‖defect‖ / (1 + max scale)`, the scale-free residual used by every
/// "= 0" check.
pub fn normalized_residual(defect_norm: f64, scales: &[f64]) -> f64 {
    let s = scales.iter().fold(0.0f64, |m, x| m.max(*x));
    defect_norm / (1.0 + s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_times_vector() {
        let v = Tensor::from_data(2, vec![Variance::Contra], vec![1.0, 0.0]).unwrap();
        let out = Tensor::scalar(2.0).tensor_product(&v).unwrap();
        assert_eq!(out.data(), &[2.0, 0.0]);
        assert_eq!(Tensor::scalar(1.0).tensor_product(&v).unwrap(), v);
    }

    #[test]
    fn kronecker_trace_is_dimension() {
        for n in 1..6 {
            let t = Tensor::kronecker(n).contract(0, 1).unwrap();
            assert_eq!(t.as_scalar(), Some(n as f64));
        }
    }

    #[test]
    fn same_variance_contraction_is_error() {
        let t = Tensor::zeros(3, covariant(2));
        assert!(matches!(t.contract(0, 1), Err(Error::SameVariance { .. })));
        assert!(matches!(t.contract(0, 2), Err(Error::SlotOutOfRange { .. })));
    }

    #[test]
    fn metric_times_inverse_contracts_to_delta() {
        let m = MetricAtPoint::minkowski(4);
        let prod = m.g().tensor_product(m.g_inv()).unwrap().contract(1, 2).unwrap();
        assert_eq!(prod.variance(), &[Variance::Co, Variance::Contra]);
        assert_eq!(prod, Tensor::kronecker(4));
    }

    #[test]
    fn minkowski_lowering() {
        let m = MetricAtPoint::minkowski(4);
        let v = Tensor::from_data(4, vec![Variance::Contra], vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let low = v.raise_lower(0, &m).unwrap();
        assert_eq!(low.data(), &[-1.0, 0.0, 0.0, 0.0]);
        assert_eq!(low.variance(), &[Variance::Co]);
    }

    #[test]
    fn g_double_form_examples() {
        let e = MetricAtPoint::euclidean(2);
        let g = g_double_form(&e);
        assert_eq!(g.get(&[0, 1, 0, 1]), -1.0);

        let m = MetricAtPoint::minkowski(4);
        let gm = g_double_form(&m);
        let t = gm
            .raise_lower(0, &m)
            .unwrap()
            .raise_lower(1, &m)
            .unwrap()
            .contract(0, 3)
            .unwrap()
            .contract(0, 1)
            .unwrap();
        assert_eq!(t.as_scalar(), Some(12.0));
    }

    #[test]
    fn signature_mismatch_rejected() {
        let c = [-1.0, 0.0, 0.0, 1.0];
        assert!(MetricAtPoint::new(&c, 2, Signature::Riemannian).is_err());
        assert!(MetricAtPoint::new(&c, 2, Signature::Lorentzian).is_ok());
        assert!(MetricAtPoint::new(&[1.0, 0.5, 0.4, 1.0], 2, Signature::Riemannian).is_err());
    }
}
