//! Numerical verification of the extended-recurrence structure and its
//! consequences.
//!
//! Every check produces an [`IdentityReport`] carrying a normalized residual
//! (see [`crate::tensors::normalized_residual`]) and the tolerance it was
//! judged against. Tolerances live in one place, [`Tolerances`].

mod concircular;
mod fluid;
mod identities;
mod qcc;
mod recurrence;
pub mod synth;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

pub use concircular::{concircular_fit, ConcircularFit};
pub use fluid::{fluid_extract, FluidState, DEFAULT_KAPPA};
pub use identities::{
    conformal_flatness, identity_suite, riemann_symmetry_residual, Identity, ALL_IDENTITIES,
};
pub use qcc::{qcc_riemann, synth_qcc};
pub use recurrence::{
    concircular_closed_form, derived_identities, fit_recurrence, fit_recurrence_pack,
    psi_gradient_check, recurrence_rhs, RecurrenceFit,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Pass,
    Fail,
    /// Preconditions of the check do not hold (e.g. a degenerate fit).
    NotApplicable,
    /// Residual reported for inspection only; no pass/fail claim is made.
    Exploratory,
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::NotApplicable => "not_applicable",
            Status::Exploratory => "exploratory",
        }
    }

    /// Whether this status blocks a passing run.
    pub fn is_failure(&self) -> bool {
        matches!(self, Status::Fail)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub status: Status,
    pub point: Vec<f64>,
    pub metric: String,
}

impl IdentityReport {
    /// A judged report: passes iff `residual ≤ tolerance` (NaN fails).
    pub fn judged(name: &str, residual: f64, tolerance: f64, point: &[f64], metric: &str) -> Self {
        let status = if residual <= tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        IdentityReport {
            name: name.into(),
            residual,
            tolerance,
            status,
            point: point.to_vec(),
            metric: metric.into(),
        }
    }

    pub fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

macro_rules! tolerances {
    ($($field:ident = $default:expr),* $(,)?) => {
        /// Every tolerance used by the suite, addressable by name.
        #[derive(Debug, Clone, PartialEq)]
        pub struct Tolerances {
            $(pub $field: f64,)*
        }

        impl Default for Tolerances {
            fn default() -> Self {
                Tolerances { $($field: $default,)* }
            }
        }

        impl Tolerances {
            pub const NAMES: &'static [&'static str] = &[$(stringify!($field),)*];

            pub fn get(&self, name: &str) -> Result<f64> {
                match name {
                    $(stringify!($field) => Ok(self.$field),)*
                    _ => Err(Error::UnknownTolerance(name.into())),
                }
            }

            pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
                if !(value >= 0.0 && value.is_finite()) {
                    return Err(Error::InvalidSpec(alloc::format!(
                        "tolerance `{name}` must be finite and non-negative"
                    )));
                }
                match name {
                    $(stringify!($field) => self.$field = value,)*
                    _ => return Err(Error::UnknownTolerance(name.into())),
                }
                Ok(())
            }

            /// `(name, value)` pairs in declaration order.
            pub fn entries(&self) -> Vec<(&'static str, f64)> {
                alloc::vec![$((stringify!($field), self.$field),)*]
            }
        }
    };
}

tolerances! {
    second_bianchi = 1e-7,
    weyl_bianchi = 1e-7,
    lovelock = 1e-7,
    weyl_traces = 1e-9,
    riemann_symmetries = 1e-9,
    conformal_flatness = 1e-8,
    recurrence = 1e-10,
    derived = 1e-8,
    qcc = 1e-10,
    concircular = 1e-8,
    fluid_isotropy = 1e-8,
    fluid_eos = 1e-8,
    oracle_fd = 1e-5,
    psi_gradient = 1e-4,
}
