//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] of order `K` over `n` variables carries every partial derivative
//! `∂^α f` with `|α| ≤ K` of some analytic function at a base point. The
//! coefficient stored for a multi-index `α` *is* the derivative value; no
//! factorials are folded in. Multi-indices are kept in graded lexicographic
//! order: by total degree first, then lexicographically descending on the
//! exponent tuple, so for two variables the layout is
//! `1, x, y, x², xy, y², x³, ...`.
//!
//! Because the ordering is graded, the coefficients of a lower-order jet are
//! a prefix of the higher-order layout and truncation is a slice.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::math;

/// Highest supported jet order.
pub const MAX_ORDER: usize = 4;

#[derive(Debug, Clone, Copy)]
struct MulTerm {
    a: u32,
    b: u32,
    out: u32,
    weight: f64,
}

/// Multi-index tables for one dimension, shared by every jet of that
/// dimension regardless of order.
#[derive(Debug)]
pub struct Basis {
    dim: usize,
    multis: Vec<Vec<u8>>,
    lookup: BTreeMap<Vec<u8>, usize>,
    len_by_order: [usize; MAX_ORDER + 1],
    // shift[var][idx] = index of (multis[idx] + e_var), for |multis[idx]| < MAX_ORDER
    shift: Vec<Vec<u32>>,
    mul: Vec<MulTerm>,
    mul_len_by_order: [usize; MAX_ORDER + 1],
}

fn push_degree(dim: usize, degree: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if prefix.len() + 1 == dim {
        prefix.push(degree as u8);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=degree).rev() {
        prefix.push(first as u8);
        push_degree(dim, degree - first, prefix, out);
        prefix.pop();
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn multi_factorial(alpha: &[u8]) -> f64 {
    alpha.iter().map(|&a| factorial(a as usize)).product()
}

fn degree(alpha: &[u8]) -> usize {
    alpha.iter().map(|&a| a as usize).sum()
}

impl Basis {
    /// Builds the tables for `dim` variables up to [`MAX_ORDER`].
    pub fn new(dim: usize) -> Arc<Basis> {
        assert!(dim >= 1, "jet dimension must be positive");
        let mut multis = Vec::new();
        let mut len_by_order = [0usize; MAX_ORDER + 1];
        for d in 0..=MAX_ORDER {
            push_degree(dim, d, &mut Vec::with_capacity(dim), &mut multis);
            len_by_order[d] = multis.len();
        }
        let lookup: BTreeMap<Vec<u8>, usize> = multis
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();

        let lower = len_by_order[MAX_ORDER - 1];
        let shift = (0..dim)
            .map(|var| {
                (0..lower)
                    .map(|idx| {
                        let mut m = multis[idx].clone();
                        m[var] += 1;
                        lookup[&m] as u32
                    })
                    .collect()
            })
            .collect();

        // Leibniz: ∂^γ(fg) = Σ_{α+β=γ} γ!/(α!β!) ∂^α f ∂^β g, grouped by |γ|.
        let mut mul = Vec::new();
        let mut mul_len_by_order = [0usize; MAX_ORDER + 1];
        for d in 0..=MAX_ORDER {
            let start = if d == 0 { 0 } else { len_by_order[d - 1] };
            for out in start..len_by_order[d] {
                let gamma = &multis[out];
                let gamma_fact = multi_factorial(gamma);
                for a in 0..len_by_order[d] {
                    let alpha = &multis[a];
                    if alpha.iter().zip(gamma).any(|(x, g)| x > g) {
                        continue;
                    }
                    let beta: Vec<u8> = gamma.iter().zip(alpha).map(|(g, x)| g - x).collect();
                    let b = lookup[&beta];
                    mul.push(MulTerm {
                        a: a as u32,
                        b: b as u32,
                        out: out as u32,
                        weight: gamma_fact / (multi_factorial(alpha) * multi_factorial(&beta)),
                    });
                }
            }
            mul_len_by_order[d] = mul.len();
        }

        Arc::new(Basis {
            dim,
            multis,
            lookup,
            len_by_order,
            shift,
            mul,
            mul_len_by_order,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// Number of coefficients of a jet of the given order: `C(n + order, order)`.
    pub fn len(&self, order: usize) -> usize {
        self.len_by_order[order]
    }

    /// Multi-indices in storage order, up to [`MAX_ORDER`].
    pub fn multi_indices(&self) -> &[Vec<u8>] {
        &self.multis
    }

    /// Storage position of a multi-index, if its degree is at most [`MAX_ORDER`].
    pub fn index_of(&self, alpha: &[u8]) -> Option<usize> {
        self.lookup.get(alpha).copied()
    }
}

/// Function tags accepted by [`Jet::apply`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Elementary {
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
    PowConst(f64),
    Reciprocal,
}

impl Elementary {
    pub fn name(&self) -> &'static str {
        match self {
            Elementary::Exp => "exp",
            Elementary::Ln => "ln",
            Elementary::Sin => "sin",
            Elementary::Cos => "cos",
            Elementary::Sqrt => "sqrt",
            Elementary::PowConst(_) => "pow_const",
            Elementary::Reciprocal => "reciprocal",
        }
    }

    /// Plain real evaluation, the order-0 reference for [`Jet::apply`].
    pub fn eval(&self, v: f64) -> Result<f64> {
        self.check_domain(v)?;
        Ok(match *self {
            Elementary::Exp => math::exp(v),
            Elementary::Ln => math::ln(v),
            Elementary::Sin => math::sin(v),
            Elementary::Cos => math::cos(v),
            Elementary::Sqrt => math::sqrt(v),
            Elementary::PowConst(c) => math::pow(v, c),
            Elementary::Reciprocal => 1.0 / v,
        })
    }

    fn check_domain(&self, v: f64) -> Result<()> {
        let ok = match *self {
            Elementary::Ln | Elementary::Sqrt => v > 0.0,
            Elementary::Reciprocal => v != 0.0,
            Elementary::PowConst(c) => {
                if c == libm::trunc(c) {
                    c >= 0.0 || v != 0.0
                } else {
                    v > 0.0
                }
            }
            Elementary::Exp | Elementary::Sin | Elementary::Cos => true,
        };
        if ok && v.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain {
                function: self.name(),
                value: v,
            })
        }
    }

    /// Derivatives `φ^(k)(v)` for `k = 0..=order`.
    fn derivatives(&self, v: f64, order: usize) -> Result<[f64; MAX_ORDER + 1]> {
        let mut d = [0.0; MAX_ORDER + 1];
        d[0] = self.eval(v)?;
        for k in 1..=order {
            d[k] = match *self {
                Elementary::Exp => d[0],
                Elementary::Ln => {
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    sign * factorial(k - 1) / math::pow(v, k as f64)
                }
                Elementary::Sin => match k % 4 {
                    0 => d[0],
                    1 => math::cos(v),
                    2 => -d[0],
                    _ => -math::cos(v),
                },
                Elementary::Cos => match k % 4 {
                    0 => d[0],
                    1 => -math::sin(v),
                    2 => -d[0],
                    _ => math::sin(v),
                },
                Elementary::Sqrt => falling_power(0.5, k, v),
                Elementary::PowConst(c) => falling_power(c, k, v),
                Elementary::Reciprocal => {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    sign * factorial(k) / math::pow(v, (k + 1) as f64)
                }
            };
        }
        Ok(d)
    }
}

/// k-th derivative of `v^c`: `c (c-1) ... (c-k+1) v^(c-k)`.
fn falling_power(c: f64, k: usize, v: f64) -> f64 {
    let coeff: f64 = (0..k).map(|i| c - i as f64).product();
    if coeff == 0.0 {
        0.0
    } else {
        coeff * math::pow(v, c - k as f64)
    }
}

/// Truncated Taylor expansion of a scalar function at a point.
#[derive(Clone)]
pub struct Jet {
    basis: Arc<Basis>,
    order: usize,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("dimension", &self.basis.dim)
            .field("order", &self.order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.basis.dim == other.basis.dim && self.order == other.order && self.coeffs == other.coeffs
    }
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        Err(Error::OrderOutOfRange(order))
    } else {
        Ok(())
    }
}

/// Seeds one variable jet per coordinate: jet `i` has value `point[i]`,
/// `∂_i = 1` and every other coefficient zero.
pub fn seed_variables(point: &[f64], order: usize) -> Result<Vec<Jet>> {
    check_order(order)?;
    if point.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    if let Some(&bad) = point.iter().find(|x| !x.is_finite()) {
        return Err(Error::Domain {
            function: "seed_variables",
            value: bad,
        });
    }
    let basis = Basis::new(point.len());
    Ok(point
        .iter()
        .enumerate()
        .map(|(i, &x)| Jet::variable(&basis, order, i, x))
        .collect())
}

impl Jet {
    pub fn constant(basis: &Arc<Basis>, order: usize, value: f64) -> Jet {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let mut coeffs = vec![0.0; basis.len(order)];
        coeffs[0] = value;
        Jet {
            basis: Arc::clone(basis),
            order,
            coeffs,
        }
    }

    pub fn zero(basis: &Arc<Basis>, order: usize) -> Jet {
        Jet::constant(basis, order, 0.0)
    }

    pub fn variable(basis: &Arc<Basis>, order: usize, var: usize, value: f64) -> Jet {
        assert!(var < basis.dim, "variable {var} out of range");
        let mut j = Jet::constant(basis, order, value);
        if order >= 1 {
            j.coeffs[1 + var] = 1.0;
        }
        j
    }

    /// Builds a jet from derivative values in storage order.
    pub fn from_derivatives(basis: &Arc<Basis>, order: usize, coeffs: Vec<f64>) -> Result<Jet> {
        check_order(order)?;
        if coeffs.len() != basis.len(order) {
            return Err(Error::DimensionMismatch {
                expected: basis.len(order),
                found: coeffs.len(),
            });
        }
        Ok(Jet {
            basis: Arc::clone(basis),
            order,
            coeffs,
        })
    }

    /// A constant jet sharing this jet's basis and order.
    pub fn constant_like(&self, value: f64) -> Jet {
        Jet::constant(&self.basis, self.order, value)
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Derivative values in graded lexicographic order.
    pub fn derivatives(&self) -> &[f64] {
        &self.coeffs
    }

    /// `∂^α` of the represented function at the base point.
    pub fn partial(&self, alpha: &[u8]) -> Result<f64> {
        if alpha.len() != self.basis.dim {
            return Err(Error::DimensionMismatch {
                expected: self.basis.dim,
                found: alpha.len(),
            });
        }
        let deg = degree(alpha);
        if deg > self.order {
            return Err(Error::DegreeExceedsOrder {
                degree: deg,
                order: self.order,
            });
        }
        Ok(self.coeffs[self.basis.lookup[alpha]])
    }

    /// The jet of `∂_var f`, one order lower.
    pub fn derivative(&self, var: usize) -> Result<Jet> {
        if self.order == 0 {
            return Err(Error::InsufficientOrder {
                what: "partial derivative",
                needed: 1,
                have: 0,
            });
        }
        let order = self.order - 1;
        let shift = &self.basis.shift[var];
        let coeffs = (0..self.basis.len(order))
            .map(|i| self.coeffs[shift[i] as usize])
            .collect();
        Ok(Jet {
            basis: Arc::clone(&self.basis),
            order,
            coeffs,
        })
    }

    /// Drops every coefficient above `order`.
    pub fn truncate(&self, order: usize) -> Result<Jet> {
        if order > self.order {
            return Err(Error::InsufficientOrder {
                what: "truncation",
                needed: order,
                have: self.order,
            });
        }
        Ok(Jet {
            basis: Arc::clone(&self.basis),
            order,
            coeffs: self.coeffs[..self.basis.len(order)].to_vec(),
        })
    }

    fn check_compatible(&self, other: &Jet) -> Result<()> {
        if self.basis.dim != other.basis.dim || self.order != other.order {
            return Err(Error::JetMismatch {
                dim_a: self.basis.dim,
                order_a: self.order,
                dim_b: other.basis.dim,
                order_b: other.order,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.add_assign_jet(other);
        Ok(out)
    }

    pub fn try_sub(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    /// Division as multiplication by the reciprocal jet.
    pub fn try_div(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(&other.recip()?))
    }

    fn mul_unchecked(&self, other: &Jet) -> Jet {
        let mut out = vec![0.0; self.coeffs.len()];
        let a = &self.coeffs;
        let b = &other.coeffs;
        for t in &self.basis.mul[..self.basis.mul_len_by_order[self.order]] {
            out[t.out as usize] += t.weight * a[t.a as usize] * b[t.b as usize];
        }
        Jet {
            basis: Arc::clone(&self.basis),
            order: self.order,
            coeffs: out,
        }
    }

    pub(crate) fn add_assign_jet(&mut self, other: &Jet) {
        debug_assert_eq!(self.coeffs.len(), other.coeffs.len());
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    /// `self += s * other`.
    pub(crate) fn add_scaled(&mut self, s: f64, other: &Jet) {
        debug_assert_eq!(self.coeffs.len(), other.coeffs.len());
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
    }

    /// `self += s * a * b`, with `a` and `b` of this jet's shape.
    pub(crate) fn add_product(&mut self, s: f64, a: &Jet, b: &Jet) {
        let (x, y) = (&a.coeffs, &b.coeffs);
        for t in &self.basis.mul[..self.basis.mul_len_by_order[self.order]] {
            self.coeffs[t.out as usize] += s * t.weight * x[t.a as usize] * y[t.b as usize];
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    /// Composition with an elementary function, exact to the working order.
    ///
    /// With `v` the value and `δ = self - v`, `φ(self) = Σ_k φ^(k)(v)/k! δ^k`;
    /// `δ` is nilpotent past the working order so the sum is finite.
    pub fn apply(&self, f: Elementary) -> Result<Jet> {
        let v = self.value();
        let d = f.derivatives(v, self.order)?;
        let mut out = self.constant_like(d[0]);
        if self.order == 0 {
            return Ok(out);
        }
        let mut delta = self.clone();
        delta.coeffs[0] = 0.0;
        // Horner in δ, coefficients φ^(k)/k!.
        let mut acc = self.constant_like(d[self.order] / factorial(self.order));
        for k in (1..self.order).rev() {
            acc = acc.mul_unchecked(&delta).add_scalar(d[k] / factorial(k));
        }
        acc = acc.mul_unchecked(&delta);
        acc.coeffs[0] = 0.0;
        out.add_assign_jet(&acc);
        out.coeffs[0] = d[0];
        Ok(out)
    }

    pub fn exp(&self) -> Jet {
        self.apply(Elementary::Exp).expect("exp is total")
    }

    pub fn ln(&self) -> Result<Jet> {
        self.apply(Elementary::Ln)
    }

    pub fn sin(&self) -> Jet {
        self.apply(Elementary::Sin).expect("sin is total")
    }

    pub fn cos(&self) -> Jet {
        self.apply(Elementary::Cos).expect("cos is total")
    }

    pub fn sqrt(&self) -> Result<Jet> {
        self.apply(Elementary::Sqrt)
    }

    pub fn powf(&self, c: f64) -> Result<Jet> {
        self.apply(Elementary::PowConst(c))
    }

    pub fn recip(&self) -> Result<Jet> {
        self.apply(Elementary::Reciprocal)
    }

    /// Integer power by repeated multiplication; negative exponents go
    /// through the reciprocal.
    pub fn powi(&self, k: i32) -> Result<Jet> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let mut out = self.constant_like(1.0);
        for _ in 0..k.unsigned_abs() {
            out = out.mul_unchecked(&base);
        }
        Ok(out)
    }
}

/// Free-function form of [`Jet::apply`].
pub fn apply_elementary(f: Elementary, j: &Jet) -> Result<Jet> {
    j.apply(f)
}

/// Free-function form of [`Jet::partial`].
pub fn partial(j: &Jet, alpha: &[u8]) -> Result<f64> {
    j.partial(alpha)
}

macro_rules! binop {
    ($tr:ident, $method:ident, $try:ident) => {
        impl $tr<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                match self.$try(rhs) {
                    Ok(j) => j,
                    Err(e) => panic!("{e}"),
                }
            }
        }
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        self.add_scalar(rhs)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        self.add_scalar(rhs)
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}
