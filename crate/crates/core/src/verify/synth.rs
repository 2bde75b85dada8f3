//! Random algebraic data for synthetic checks.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::linalg;
use crate::tensors::{covariant, MetricAtPoint, Signature, Tensor};

/// `g = Lᵀ η L` with `L = I + 0.3 M`, `M` uniform in `[-1, 1]`.
pub fn random_metric<R: Rng + ?Sized>(n: usize, signature: Signature, rng: &mut R) -> MetricAtPoint {
    loop {
        let l: Vec<f64> = (0..n * n)
            .map(|i| if i % (n + 1) == 0 { 1.0 } else { 0.0 } + 0.3 * rng.gen_range(-1.0..1.0))
            .collect();
        let mut eta = vec![0.0; n * n];
        for i in 0..n {
            eta[i * n + i] = 1.0;
        }
        if signature == Signature::Lorentzian {
            eta[0] = -1.0;
        }
        let mut lt = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                lt[i * n + j] = l[j * n + i];
            }
        }
        let g = linalg::matmul(&linalg::matmul(&lt, &eta, n, n, n), &l, n, n, n);
        let mut sym = g.clone();
        for i in 0..n {
            for j in 0..n {
                sym[i * n + j] = 0.5 * (g[i * n + j] + g[j * n + i]);
            }
        }
        if let Ok(m) = MetricAtPoint::new(&sym, n, signature) {
            if m.g_inv().max_abs() < 20.0 {
                return m;
            }
        }
    }
}

pub fn random_covector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// A covector with `|A²| ≥ 0.1 |A|²` (Euclidean norm on components); for
/// Lorentzian metrics also `A² < 0`.
pub fn random_non_null_covector<R: Rng + ?Sized>(
    metric: &MetricAtPoint,
    timelike: bool,
    rng: &mut R,
) -> Vec<f64> {
    let n = metric.dim();
    loop {
        let mut a = random_covector(n, rng);
        if timelike {
            a[0] = rng.gen_range(1.5..2.5) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
        }
        let a2 = metric.covector_dot(&a, &a);
        let e2: f64 = a.iter().map(|x| x * x).sum();
        if a2.abs() >= 0.1 * e2 && (!timelike || a2 < 0.0) {
            return a;
        }
    }
}

/// Kulkarni–Nomizu product of two symmetric rank-2 tensors,
/// `h_{jm} k_{kl} + h_{kl} k_{jm} - h_{km} k_{jl} - h_{jl} k_{km}`.
/// It has every algebraic symmetry of a Riemann tensor.
pub fn kulkarni_nomizu(h: &Tensor, k: &Tensor) -> Tensor {
    Tensor::from_fn(h.dim(), covariant(4), |i| {
        let (j, kk, l, m) = (i[0], i[1], i[2], i[3]);
        h.get(&[j, m]) * k.get(&[kk, l]) + h.get(&[kk, l]) * k.get(&[j, m])
            - h.get(&[kk, m]) * k.get(&[j, l])
            - h.get(&[j, l]) * k.get(&[kk, m])
    })
}

pub fn random_symmetric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Tensor {
    let mut t = Tensor::zeros(n, covariant(2));
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(-1.0..1.0);
            t.set(&[i, j], v);
            t.set(&[j, i], v);
        }
    }
    t
}

/// A generic covariant tensor with all algebraic Riemann symmetries.
pub fn random_curvature_tensor<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Tensor {
    let mut acc = Tensor::zeros(n, covariant(4));
    for _ in 0..3 {
        let h = random_symmetric(n, rng);
        let k = random_symmetric(n, rng);
        acc = acc.try_add(&kulkarni_nomizu(&h, &k)).unwrap();
    }
    acc
}
