use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A value violates the constraints of the type it was used to build.
    #[error("{what}: {detail}")]
    InvalidParameter { what: &'static str, detail: String },

    /// `γV + (1-γ)S` has (numerically) zero variance but analog power was requested.
    #[error("degenerate analog direction: sigma_a^2 = {sigma_a2:e} with pa = {pa}")]
    DegenerateDirection { sigma_a2: f64, pa: f64 },

    /// HDA refinement needs a side-information MSE bounded away from zero.
    #[error("degenerate side information: d_star = {d_star:e} with p_h = {p_h}")]
    DegenerateSideInformation { d_star: f64, p_h: f64 },

    /// The objective returned NaN or an infinity during a grid search.
    #[error("non-finite objective value {value} at {coords:?}")]
    NonFinite { coords: Vec<f64>, value: f64 },

    /// An operation was called outside the domain it is defined on.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The cognitive channel is not in a regime with a known capacity region.
    #[error("regime mismatch: operation requires {expected}, channel is {found}")]
    Regime {
        expected: &'static str,
        found: &'static str,
    },

    /// No evaluated point satisfied a constraint.
    #[error("infeasible: {0}")]
    Infeasible(String),
}

impl Error {
    pub(crate) fn invalid(what: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidParameter {
            what,
            detail: detail.into(),
        }
    }

    /// Short machine-readable tag used by the command line front-end.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid-parameter",
            Error::DegenerateDirection { .. } => "degenerate-direction",
            Error::DegenerateSideInformation { .. } => "degenerate-side-information",
            Error::NonFinite { .. } => "non-finite",
            Error::Precondition(_) => "precondition",
            Error::Regime { .. } => "regime",
            Error::Infeasible(_) => "infeasible",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
