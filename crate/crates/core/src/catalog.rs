//! Analytic metric families.
//!
//! Robertson–Walker metrics use a constant-curvature fiber in its
//! conformally flat chart,
//!
//! ```text
//! ds² = -dt² + q(t)² δ_{αβ} dx^α dx^β / (1 + k|x|²/4)²
//! ```
//!
//! so a single chart covers the sampled region. The warped Riemannian family
//! is `ds² = (dx¹)² + e^{η(x¹)} δ_{αβ} dx^α dx^β` with a flat fiber.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curvature::{MetricField, TensorField};
use crate::error::{Error, Result};
use crate::jets::{seed_variables, Jet};
use crate::linalg;
use crate::math;
use crate::tensors::{Signature, Variance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Minkowski,
    Euclidean,
    Sphere,
    DeSitterFlat,
    EinsteinStatic,
    RobertsonWalker,
    WarpedRiemannian,
    Schwarzschild,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Minkowski,
        Family::Euclidean,
        Family::Sphere,
        Family::DeSitterFlat,
        Family::EinsteinStatic,
        Family::RobertsonWalker,
        Family::WarpedRiemannian,
        Family::Schwarzschild,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Minkowski => "minkowski",
            Family::Euclidean => "euclidean",
            Family::Sphere => "sphere",
            Family::DeSitterFlat => "de_sitter_flat",
            Family::EinsteinStatic => "einstein_static",
            Family::RobertsonWalker => "robertson_walker",
            Family::WarpedRiemannian => "warped_riemannian",
            Family::Schwarzschild => "schwarzschild",
        }
    }

    fn parameter_names(&self) -> &'static [&'static str] {
        match self {
            Family::Minkowski | Family::Euclidean | Family::WarpedRiemannian => &[],
            Family::Sphere | Family::EinsteinStatic => &["radius"],
            Family::DeSitterFlat => &["H"],
            Family::RobertsonWalker => &["k"],
            Family::Schwarzschild => &["M"],
        }
    }

    fn uses_scale_factor(&self) -> bool {
        matches!(self, Family::RobertsonWalker | Family::WarpedRiemannian)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family> {
        Family::ALL
            .iter()
            .find(|f| f.name() == s)
            .copied()
            .ok_or_else(|| Error::InvalidSpec(format!("unknown metric family `{s}`")))
    }
}

/// Analytic scale factor `q(t)` for Robertson–Walker metrics, or the warping
/// exponent `η(x¹)` for the warped Riemannian family.
#[derive(Debug, Clone, PartialEq)]
pub enum ScaleFactor {
    /// `t^p`, defined for `t > 0`.
    Power(f64),
    /// `e^{H t}`.
    Exponential(f64),
    /// `Σ c_i t^i`, coefficients in ascending degree.
    Polynomial(Vec<f64>),
}

impl ScaleFactor {
    pub fn eval_jet(&self, t: &Jet) -> Result<Jet> {
        match self {
            ScaleFactor::Power(p) => t.powf(*p),
            ScaleFactor::Exponential(h) => Ok(t.scale(*h).exp()),
            ScaleFactor::Polynomial(c) => {
                let mut acc = t.constant_like(0.0);
                for coeff in c.iter().rev() {
                    acc = (&acc * t).add_scalar(*coeff);
                }
                Ok(acc)
            }
        }
    }

    /// Value and first derivative at `t`.
    pub fn value_and_derivative(&self, t: f64) -> Result<(f64, f64)> {
        let x = &seed_variables(&[t], 1)?[0];
        let q = self.eval_jet(x)?;
        Ok((q.value(), q.derivatives()[1]))
    }

    fn admits(&self, t: f64) -> bool {
        match self {
            ScaleFactor::Power(_) => t > 0.0,
            _ => true,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            ScaleFactor::Power(p) | ScaleFactor::Exponential(p) => p.is_finite(),
            ScaleFactor::Polynomial(c) => !c.is_empty() && c.iter().all(|x| x.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("invalid scale factor {self}")))
        }
    }
}

impl fmt::Display for ScaleFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScaleFactor::Power(p) => write!(f, "power({p})"),
            ScaleFactor::Exponential(h) => write!(f, "exponential({h})"),
            ScaleFactor::Polynomial(c) => {
                write!(f, "polynomial(")?;
                for (i, x) in c.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Declarative description of a catalog metric.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    pub family: Family,
    pub dimension: usize,
    pub parameters: BTreeMap<String, f64>,
    pub scale_factor: Option<ScaleFactor>,
}

impl MetricSpec {
    pub fn new(family: Family, dimension: usize) -> MetricSpec {
        MetricSpec {
            family,
            dimension,
            parameters: BTreeMap::new(),
            scale_factor: None,
        }
    }

    pub fn with_parameter(mut self, name: &str, value: f64) -> MetricSpec {
        self.parameters.insert(name.to_string(), value);
        self
    }

    pub fn with_scale_factor(mut self, sf: ScaleFactor) -> MetricSpec {
        self.scale_factor = Some(sf);
        self
    }

    pub fn minkowski(n: usize) -> MetricSpec {
        MetricSpec::new(Family::Minkowski, n)
    }

    pub fn euclidean(n: usize) -> MetricSpec {
        MetricSpec::new(Family::Euclidean, n)
    }

    pub fn sphere(n: usize, radius: f64) -> MetricSpec {
        MetricSpec::new(Family::Sphere, n).with_parameter("radius", radius)
    }

    pub fn de_sitter_flat(n: usize, hubble: f64) -> MetricSpec {
        MetricSpec::new(Family::DeSitterFlat, n).with_parameter("H", hubble)
    }

    pub fn einstein_static(n: usize, radius: f64) -> MetricSpec {
        MetricSpec::new(Family::EinsteinStatic, n).with_parameter("radius", radius)
    }

    pub fn robertson_walker(n: usize, k: f64, q: ScaleFactor) -> MetricSpec {
        MetricSpec::new(Family::RobertsonWalker, n)
            .with_parameter("k", k)
            .with_scale_factor(q)
    }

    pub fn warped_riemannian(n: usize, eta: ScaleFactor) -> MetricSpec {
        MetricSpec::new(Family::WarpedRiemannian, n).with_scale_factor(eta)
    }

    pub fn schwarzschild(mass: f64) -> MetricSpec {
        MetricSpec::new(Family::Schwarzschild, 4).with_parameter("M", mass)
    }

    pub fn label(&self) -> String {
        let mut s = format!("{}(n={}", self.family, self.dimension);
        for (k, v) in &self.parameters {
            s.push_str(&format!(",{k}={v}"));
        }
        if let Some(sf) = &self.scale_factor {
            let key = if self.family == Family::WarpedRiemannian { "eta" } else { "q" };
            s.push_str(&format!(",{key}={sf}"));
        }
        s.push(')');
        s
    }

    fn param(&self, name: &str) -> f64 {
        self.parameters[name]
    }

    fn validate(&self) -> Result<()> {
        let fam = self.family;
        if self.dimension < 2 {
            return Err(Error::InvalidSpec(format!("{fam}: dimension must be at least 2")));
        }
        if fam == Family::Schwarzschild && self.dimension != 4 {
            return Err(Error::InvalidSpec("schwarzschild: dimension must be 4".into()));
        }
        let allowed = fam.parameter_names();
        for name in allowed {
            match self.parameters.get(*name) {
                None => {
                    return Err(Error::InvalidSpec(format!(
                        "{fam}: missing parameter `{name}`"
                    )))
                }
                Some(v) if !v.is_finite() => {
                    return Err(Error::InvalidSpec(format!(
                        "{fam}: parameter `{name}` is not finite"
                    )))
                }
                _ => {}
            }
        }
        if let Some(extra) = self.parameters.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::InvalidSpec(format!("{fam}: unknown parameter `{extra}`")));
        }
        match (&self.scale_factor, fam.uses_scale_factor()) {
            (None, true) => {
                return Err(Error::InvalidSpec(format!("{fam}: missing scale factor")));
            }
            (Some(_), false) => {
                return Err(Error::InvalidSpec(format!("{fam}: takes no scale factor")));
            }
            (Some(sf), true) => sf.validate()?,
            (None, false) => {}
        }
        match fam {
            Family::RobertsonWalker => {
                let k = self.param("k");
                if k != -1.0 && k != 0.0 && k != 1.0 {
                    return Err(Error::InvalidSpec(format!(
                        "robertson_walker: spatial curvature k must be -1, 0 or 1, got {k}"
                    )));
                }
            }
            Family::Sphere | Family::EinsteinStatic if self.param("radius") <= 0.0 => {
                return Err(Error::InvalidSpec(format!("{fam}: radius must be positive")));
            }
            Family::Schwarzschild if self.param("M") < 0.0 => {
                return Err(Error::InvalidSpec("schwarzschild: mass must be non-negative".into()));
            }
            _ => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Resolved {
    Minkowski,
    Euclidean,
    Sphere { radius: f64 },
    Rw { k: f64, q: ScaleFactor },
    Warped { eta: ScaleFactor },
    Schwarzschild { mass: f64 },
}

/// A [`MetricField`] realized from a [`MetricSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogMetric {
    spec: MetricSpec,
    resolved: Resolved,
}

/// Validates a spec and returns its metric field.
pub fn build_metric(spec: &MetricSpec) -> Result<CatalogMetric> {
    spec.validate()?;
    let resolved = match spec.family {
        Family::Minkowski => Resolved::Minkowski,
        Family::Euclidean => Resolved::Euclidean,
        Family::Sphere => Resolved::Sphere {
            radius: spec.param("radius"),
        },
        Family::DeSitterFlat => Resolved::Rw {
            k: 0.0,
            q: ScaleFactor::Exponential(spec.param("H")),
        },
        Family::EinsteinStatic => Resolved::Rw {
            k: 1.0,
            q: ScaleFactor::Polynomial(vec![spec.param("radius")]),
        },
        Family::RobertsonWalker => Resolved::Rw {
            k: spec.param("k"),
            q: spec.scale_factor.clone().unwrap(),
        },
        Family::WarpedRiemannian => Resolved::Warped {
            eta: spec.scale_factor.clone().unwrap(),
        },
        Family::Schwarzschild => Resolved::Schwarzschild {
            mass: spec.param("M"),
        },
    };
    Ok(CatalogMetric {
        spec: spec.clone(),
        resolved,
    })
}

fn diagonal(diag: Vec<Jet>) -> Vec<Jet> {
    let n = diag.len();
    let zero = diag[0].constant_like(0.0);
    let mut out = vec![zero; n * n];
    for (i, d) in diag.into_iter().enumerate() {
        out[i * n + i] = d;
    }
    out
}

/// `1 + k|x|²/4` over the spatial coordinates.
fn conformal_denominator(k: f64, spatial: &[Jet]) -> Jet {
    let mut acc = spatial[0].constant_like(1.0);
    for x in spatial {
        acc.add_product(0.25 * k, x, x);
    }
    acc
}

impl CatalogMetric {
    pub fn spec(&self) -> &MetricSpec {
        &self.spec
    }

    /// The `(n-1)`-dimensional fiber of a Robertson–Walker-type metric.
    pub fn fiber(&self) -> Option<ConstantCurvatureFiber> {
        match &self.resolved {
            Resolved::Rw { k, .. } => Some(ConstantCurvatureFiber {
                dim: self.spec.dimension - 1,
                k: *k,
            }),
            _ => None,
        }
    }

    /// A vector field expected to satisfy `∇_k X_j = ρ g_{kj}` for this
    /// family, or a control field expected to fail it.
    pub fn concircular_candidate(&self) -> ConcircularCandidate {
        let n = self.spec.dimension;
        let kind = match &self.resolved {
            Resolved::Minkowski | Resolved::Euclidean => CandidateKind::Position,
            Resolved::Sphere { radius } => CandidateKind::SphereHeight { radius: *radius },
            Resolved::Rw { q, .. } => CandidateKind::TimeScaled { q: q.clone() },
            Resolved::Warped { eta } => CandidateKind::WarpScaled { eta: eta.clone() },
            Resolved::Schwarzschild { .. } => CandidateKind::Killing,
        };
        ConcircularCandidate { dim: n, kind }
    }
}

impl MetricField for CatalogMetric {
    fn dimension(&self) -> usize {
        self.spec.dimension
    }

    fn signature(&self) -> Signature {
        match self.resolved {
            Resolved::Euclidean | Resolved::Sphere { .. } | Resolved::Warped { .. } => {
                Signature::Riemannian
            }
            _ => Signature::Lorentzian,
        }
    }

    fn label(&self) -> String {
        self.spec.label()
    }

    fn in_domain(&self, p: &[f64]) -> bool {
        let n = self.spec.dimension;
        if p.len() != n || p.iter().any(|x| !x.is_finite()) {
            return false;
        }
        match &self.resolved {
            Resolved::Minkowski | Resolved::Euclidean => true,
            Resolved::Sphere { .. } => p[..n - 1].iter().all(|&th| math::abs(math::sin(th)) > 1e-12),
            Resolved::Rw { k, q } => {
                if !q.admits(p[0]) {
                    return false;
                }
                let qv = match q.value_and_derivative(p[0]) {
                    Ok((v, _)) => v,
                    Err(_) => return false,
                };
                let r2: f64 = p[1..].iter().map(|x| x * x).sum();
                math::abs(qv) > 1e-12 && qv.is_finite() && 1.0 + 0.25 * k * r2 > 0.0
            }
            Resolved::Warped { eta } => {
                eta.admits(p[0]) && matches!(eta.value_and_derivative(p[0]), Ok((v, _)) if v.is_finite())
            }
            Resolved::Schwarzschild { mass } => {
                let r = p[1];
                r > 0.0 && r > 2.0 * mass && math::abs(math::sin(p[2])) > 1e-12
            }
        }
    }

    fn components(&self, x: &[Jet]) -> Result<Vec<Jet>> {
        let n = self.spec.dimension;
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.len(),
            });
        }
        let one = x[0].constant_like(1.0);
        Ok(match &self.resolved {
            Resolved::Minkowski => {
                let mut d = vec![one.clone(); n];
                d[0] = one.scale(-1.0);
                diagonal(d)
            }
            Resolved::Euclidean => diagonal(vec![one; n]),
            Resolved::Sphere { radius } => {
                // r² (dθ₀² + sin²θ₀ dθ₁² + sin²θ₀ sin²θ₁ dθ₂² + ...)
                let mut d = Vec::with_capacity(n);
                let mut factor = one.scale(radius * radius);
                for i in 0..n {
                    d.push(factor.clone());
                    if i + 1 < n {
                        let s = x[i].sin();
                        factor = &(&factor * &s) * &s;
                    }
                }
                diagonal(d)
            }
            Resolved::Rw { k, q } => {
                let qt = q.eval_jet(&x[0])?;
                let w = conformal_denominator(*k, &x[1..]);
                let spatial = (&qt * &qt) * w.powi(-2)?;
                let mut d = vec![spatial; n];
                d[0] = one.scale(-1.0);
                diagonal(d)
            }
            Resolved::Warped { eta } => {
                let e = eta.eval_jet(&x[0])?.exp();
                let mut d = vec![e; n];
                d[0] = one;
                diagonal(d)
            }
            Resolved::Schwarzschild { mass } => {
                let r = &x[1];
                let f = (r.recip()? * (-2.0 * mass)).add_scalar(1.0);
                let s = x[2].sin();
                diagonal(vec![
                    -f.clone(),
                    f.recip()?,
                    r * r,
                    &(r * r) * &(&s * &s),
                ])
            }
        })
    }
}

/// `δ_{αβ} / (1 + k|x|²/4)²`, the constant-curvature fiber of the
/// Robertson–Walker family.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantCurvatureFiber {
    pub dim: usize,
    pub k: f64,
}

impl MetricField for ConstantCurvatureFiber {
    fn dimension(&self) -> usize {
        self.dim
    }
    fn signature(&self) -> Signature {
        Signature::Riemannian
    }
    fn label(&self) -> String {
        format!("fiber(n={},k={})", self.dim, self.k)
    }
    fn in_domain(&self, p: &[f64]) -> bool {
        let r2: f64 = p.iter().map(|x| x * x).sum();
        p.len() == self.dim && 1.0 + 0.25 * self.k * r2 > 0.0
    }
    fn components(&self, x: &[Jet]) -> Result<Vec<Jet>> {
        let w = conformal_denominator(self.k, x).powi(-2)?;
        Ok(diagonal(vec![w; self.dim]))
    }
}

/// Smooth non-symmetric test metric: a constant base plus small trigonometric
/// perturbations, `g_ab = base_ab + ε_ab sin(w_ab · x + φ_ab)`.
///
/// Every derivative order is populated, which makes it useful for exercising
/// identities that are trivial on the symmetric catalog families.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedMetric {
    dim: usize,
    signature: Signature,
    amplitude: Vec<f64>,
    wave: Vec<Vec<f64>>,
    phase: Vec<f64>,
}

impl PerturbedMetric {
    pub fn random(dim: usize, signature: Signature, amplitude: f64, seed: u64) -> PerturbedMetric {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut amp = vec![0.0; dim * dim];
        let mut wave = vec![Vec::new(); dim * dim];
        let mut phase = vec![0.0; dim * dim];
        for a in 0..dim {
            for b in a..dim {
                let e = amplitude * rng.gen_range(0.2..1.0);
                let w: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.5..1.5)).collect();
                let ph = rng.gen_range(0.0..2.0 * PI);
                for (i, j) in [(a, b), (b, a)] {
                    amp[i * dim + j] = e;
                    wave[i * dim + j] = w.clone();
                    phase[i * dim + j] = ph;
                }
            }
        }
        PerturbedMetric {
            dim,
            signature,
            amplitude: amp,
            wave,
            phase,
        }
    }
}

impl MetricField for PerturbedMetric {
    fn dimension(&self) -> usize {
        self.dim
    }
    fn signature(&self) -> Signature {
        self.signature
    }
    fn label(&self) -> String {
        format!("perturbed(n={})", self.dim)
    }
    fn in_domain(&self, p: &[f64]) -> bool {
        p.len() == self.dim && p.iter().all(|x| x.is_finite() && math::abs(*x) <= 2.0)
    }
    fn components(&self, x: &[Jet]) -> Result<Vec<Jet>> {
        let n = self.dim;
        let mut out = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let ab = a * n + b;
                let mut arg = x[0].constant_like(self.phase[ab]);
                for (xi, w) in x.iter().zip(&self.wave[ab]) {
                    arg.add_scaled(*w, xi);
                }
                let base = if a != b {
                    0.0
                } else if a == 0 && self.signature == Signature::Lorentzian {
                    -1.0
                } else {
                    1.0
                };
                out.push(arg.sin().scale(self.amplitude[ab]).add_scalar(base));
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum CandidateKind {
    Position,
    SphereHeight { radius: f64 },
    TimeScaled { q: ScaleFactor },
    WarpScaled { eta: ScaleFactor },
    Killing,
}

/// Contravariant vector field attached to a catalog family for the
/// concircularity check.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcircularCandidate {
    dim: usize,
    kind: CandidateKind,
}

impl ConcircularCandidate {
    /// `true` for fields that are expected *not* to be concircular.
    pub fn is_control(&self) -> bool {
        matches!(self.kind, CandidateKind::Killing)
    }

    pub fn description(&self) -> String {
        match &self.kind {
            CandidateKind::Position => "x^a d_a".into(),
            CandidateKind::SphereHeight { .. } => "grad cos(theta_0)".into(),
            CandidateKind::TimeScaled { q } => format!("q(t) d_t, q = {q}"),
            CandidateKind::WarpScaled { eta } => format!("exp(eta/2) d_1, eta = {eta}"),
            CandidateKind::Killing => "d_t (Killing)".into(),
        }
    }

    /// The expected `ρ` in `∇_k X_j = ρ g_{kj}` at `p`, when known.
    pub fn expected_rho(&self, p: &[f64]) -> Option<f64> {
        match &self.kind {
            CandidateKind::Position => Some(1.0),
            CandidateKind::SphereHeight { radius } => Some(-math::cos(p[0]) / (radius * radius)),
            CandidateKind::TimeScaled { q } => q.value_and_derivative(p[0]).ok().map(|(_, d)| d),
            CandidateKind::WarpScaled { eta } => {
                let x = &seed_variables(&[p[0]], 1).ok()?[0];
                let s = eta.eval_jet(x).ok()?.scale(0.5).exp();
                Some(s.derivatives()[1])
            }
            CandidateKind::Killing => None,
        }
    }
}

impl TensorField for ConcircularCandidate {
    fn dimension(&self) -> usize {
        self.dim
    }
    fn variance(&self) -> Vec<Variance> {
        vec![Variance::Contra]
    }
    fn components(&self, x: &[Jet]) -> Result<Vec<Jet>> {
        let zero = x[0].constant_like(0.0);
        let mut v = vec![zero; self.dim];
        match &self.kind {
            CandidateKind::Position => v.clone_from_slice(x),
            CandidateKind::SphereHeight { radius } => {
                v[0] = x[0].sin().scale(-1.0 / (radius * radius));
            }
            CandidateKind::TimeScaled { q } => v[0] = q.eval_jet(&x[0])?,
            CandidateKind::WarpScaled { eta } => v[0] = eta.eval_jet(&x[0])?.scale(0.5).exp(),
            CandidateKind::Killing => v[0] = x[0].constant_like(1.0),
        }
        Ok(v)
    }
}

/// Sampling box of a family; see [`sample_points`].
fn sample_one(spec: &MetricSpec, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = spec.dimension;
    let mut uniform = |lo: f64, hi: f64| rng.gen_range(lo..hi);
    match spec.family {
        Family::Minkowski | Family::Euclidean | Family::DeSitterFlat => {
            (0..n).map(|_| uniform(-1.0, 1.0)).collect()
        }
        Family::Sphere => (0..n)
            .map(|i| {
                if i + 1 < n {
                    uniform(0.3, PI - 0.3)
                } else {
                    uniform(0.0, 2.0 * PI)
                }
            })
            .collect(),
        Family::RobertsonWalker | Family::EinsteinStatic => (0..n)
            .map(|i| if i == 0 { uniform(0.5, 3.0) } else { uniform(-1.0, 1.0) })
            .collect(),
        Family::WarpedRiemannian => (0..n)
            .map(|i| if i == 0 { uniform(0.5, 2.0) } else { uniform(-1.0, 1.0) })
            .collect(),
        Family::Schwarzschild => {
            let m = spec.parameters.get("M").copied().unwrap_or(0.0);
            vec![
                uniform(-1.0, 1.0),
                uniform(2.5 * m + 1.0, 2.5 * m + 12.0),
                uniform(0.3, PI - 0.3),
                uniform(0.0, 2.0 * PI),
            ]
        }
    }
}

const MAX_ATTEMPTS: usize = 1000;

/// Deterministic sample of valid points.
///
/// Boxes: flat and de Sitter charts `[-1, 1]^n`; sphere angles
/// `[0.3, π - 0.3]` with the last angle in `[0, 2π)`; Robertson–Walker and
/// Einstein static `t ∈ [0.5, 3]`, `|x^α| ≤ 1`; warped `x¹ ∈ [0.5, 2]`,
/// `|x^α| ≤ 1`; Schwarzschild `r ∈ [2.5M + 1, 2.5M + 12]`,
/// `θ ∈ [0.3, π - 0.3]`. Points failing the domain predicate (or keeping the
/// conformal factor of a `k = -1` fiber below 0.1) are redrawn.
pub fn sample_points(spec: &MetricSpec, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let metric = build_metric(spec)?;
    let k = spec.parameters.get("k").copied().unwrap_or(0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut found = None;
        for _ in 0..MAX_ATTEMPTS {
            let p = sample_one(spec, &mut rng);
            let margin_ok = if spec.family == Family::RobertsonWalker {
                let r2: f64 = p[1..].iter().map(|x| x * x).sum();
                1.0 + 0.25 * k * r2 >= 0.1
            } else {
                true
            };
            if margin_ok && metric.in_domain(&p) {
                found = Some(p);
                break;
            }
        }
        match found {
            Some(p) => out.push(p),
            None => {
                return Err(Error::SamplingFailed {
                    metric: spec.label(),
                    attempts: MAX_ATTEMPTS,
                })
            }
        }
    }
    Ok(out)
}

/// Symmetry and invertibility of the metric components at `p` plus the
/// eigenvalue-sign check of the declared signature.
pub fn check_metric_at<F: MetricField + ?Sized>(f: &F, p: &[f64]) -> Result<()> {
    let n = f.dimension();
    let g = crate::curvature::metric_jets(f, p, 0)?;
    let vals: Vec<f64> = g.iter().map(Jet::value).collect();
    if linalg::inverse(&vals, n).is_none() {
        return Err(Error::InvalidMetric(format!("{} singular at {p:?}", f.label())));
    }
    crate::tensors::MetricAtPoint::new(&vals, n, f.signature()).map(|_| ())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::metric_jets;

    fn values(f: &CatalogMetric, p: &[f64]) -> Vec<f64> {
        metric_jets(f, p, 0).unwrap().iter().map(Jet::value).collect()
    }

    #[test]
    fn rw_sqrt_at_unit_time_is_minkowski() {
        let m = build_metric(&MetricSpec::robertson_walker(4, 0.0, ScaleFactor::Power(0.5))).unwrap();
        let g = values(&m, &[1.0, 0.2, -0.3, 0.4]);
        let expected = [-1.0, 1.0, 1.0, 1.0];
        for i in 0..4 {
            assert_eq!(g[i * 4 + i], expected[i]);
        }
    }

    #[test]
    fn rw_linear_scale_factor_jets() {
        let m = build_metric(&MetricSpec::robertson_walker(4, 0.0, ScaleFactor::Power(1.0))).unwrap();
        let g = metric_jets(&m, &[2.0, 0.0, 0.0, 0.0], 2).unwrap();
        assert_eq!(g[5].value(), 4.0);
        assert_eq!(g[5].partial(&[1, 0, 0, 0]).unwrap(), 4.0);
    }

    #[test]
    fn minkowski_jets_are_constant() {
        let m = build_metric(&MetricSpec::minkowski(4)).unwrap();
        let g = metric_jets(&m, &[0.3, 1.0, -2.0, 0.5], 2).unwrap();
        for (i, j) in g.iter().enumerate() {
            let v = if i == 0 {
                -1.0
            } else if i % 5 == 0 {
                1.0
            } else {
                0.0
            };
            assert_eq!(j.value(), v);
            assert!(j.derivatives()[1..].iter().all(|&c| c == 0.0));
        }
    }

    #[test]
    fn massless_schwarzschild_is_spherical_minkowski() {
        let m = build_metric(&MetricSpec::schwarzschild(0.0)).unwrap();
        for p in sample_points(&MetricSpec::schwarzschild(0.0), 10, 3).unwrap() {
            let g = values(&m, &p);
            let r = p[1];
            let s = libm::sin(p[2]);
            let expected = [-1.0, 1.0, r * r, r * r * s * s];
            for i in 0..4 {
                assert!((g[i * 5] - expected[i]).abs() < 1e-14 * (1.0 + expected[i].abs()));
            }
        }
    }

    #[test]
    fn warped_with_zero_eta_is_euclidean() {
        let m = build_metric(&MetricSpec::warped_riemannian(3, ScaleFactor::Polynomial(vec![0.0]))).unwrap();
        let g = values(&m, &[0.7, -0.2, 0.9]);
        assert_eq!(g, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn spec_validation() {
        assert!("anti_de_sitter".parse::<Family>().is_err());
        assert!(build_metric(&MetricSpec::new(Family::Sphere, 3)).is_err());
        assert!(build_metric(&MetricSpec::robertson_walker(4, 2.0, ScaleFactor::Power(1.0))).is_err());
        assert!(build_metric(&MetricSpec::minkowski(4).with_parameter("H", 1.0)).is_err());
        assert!(build_metric(&MetricSpec::new(Family::RobertsonWalker, 4).with_parameter("k", 0.0)).is_err());
        assert!(build_metric(&MetricSpec::new(Family::Schwarzschild, 5).with_parameter("M", 1.0)).is_err());
        assert!(build_metric(&MetricSpec::minkowski(1)).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_in_box() {
        let spec = MetricSpec::robertson_walker(4, -1.0, ScaleFactor::Power(2.0 / 3.0));
        let a = sample_points(&spec, 100, 42).unwrap();
        let b = sample_points(&spec, 100, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|p| p[0] >= 0.5 && p[0] <= 3.0));
        let c = sample_points(&spec, 100, 43).unwrap();
        assert_ne!(a, c);

        let s = sample_points(&MetricSpec::schwarzschild(1.0), 100, 1).unwrap();
        assert!(s.iter().all(|p| p[1] > 2.5));
    }

    #[test]
    fn every_family_passes_metric_checks() {
        let specs = [
            MetricSpec::minkowski(4),
            MetricSpec::euclidean(3),
            MetricSpec::sphere(3, 1.5),
            MetricSpec::de_sitter_flat(4, 1.0),
            MetricSpec::einstein_static(4, 2.0),
            MetricSpec::robertson_walker(5, 1.0, ScaleFactor::Polynomial(vec![1.0, 0.5, 0.1])),
            MetricSpec::warped_riemannian(4, ScaleFactor::Exponential(0.3)),
            MetricSpec::schwarzschild(1.0),
        ];
        for spec in &specs {
            let m = build_metric(spec).unwrap();
            for p in sample_points(spec, 25, 9).unwrap() {
                check_metric_at(&m, &p).unwrap_or_else(|e| panic!("{}: {e}", spec.label()));
            }
        }
    }

    #[test]
    fn domain_excludes_singular_loci() {
        let s = build_metric(&MetricSpec::schwarzschild(1.0)).unwrap();
        assert!(!s.in_domain(&[0.0, 1.5, 1.0, 0.0]));
        assert!(!s.in_domain(&[0.0, 5.0, 0.0, 0.0]));
        let rw = build_metric(&MetricSpec::robertson_walker(4, -1.0, ScaleFactor::Power(0.5))).unwrap();
        assert!(!rw.in_domain(&[-1.0, 0.0, 0.0, 0.0]));
        assert!(!rw.in_domain(&[1.0, 2.0, 0.1, 0.0]));
        assert!(matches!(
            metric_jets(&rw, &[0.0, 0.0, 0.0, 0.0], 2),
            Err(Error::OutsideDomain { .. })
        ));
    }
}
