//! Value types shared by every analysis module.
//!
//! All quantities are plain `f64` in consistent power units. Each type checks
//! its own invariants on construction, so any value that exists is valid; the
//! joint constraint between an [`Allocation`] and a [`ChannelSpec`] is checked
//! by [`validate`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn finite(what: &'static str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::invalid(what, format!("{x} is not finite")))
    }
}

fn positive(what: &'static str, x: f64) -> Result<f64> {
    finite(what, x)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(Error::invalid(what, format!("{x} must be > 0")))
    }
}

fn correlation(x: f64) -> Result<f64> {
    finite("rho out of range", x)?;
    if (-1.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(Error::invalid(
            "rho out of range",
            format!("{x} not in [-1, 1]"),
        ))
    }
}

/// Second-order statistics of the source `V` and the interference `S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceModel {
    sigma_v2: f64,
    sigma_s2: f64,
    rho: f64,
}

impl SourceModel {
    pub fn new(sigma_v2: f64, sigma_s2: f64, rho: f64) -> Result<Self> {
        let model = SourceModel {
            sigma_v2: positive("sigma_v2 must be positive", sigma_v2)?,
            sigma_s2: positive("sigma_s2 must be positive", sigma_s2)?,
            rho: correlation(rho)?,
        };
        // Determinant of the covariance matrix is sigma_v2 * sigma_s2 * (1 - rho^2).
        debug_assert!(model.sigma_v2 * model.sigma_s2 * (1.0 - model.rho * model.rho) >= 0.0);
        Ok(model)
    }

    /// Unit-variance source and interference.
    pub fn unit(rho: f64) -> Result<Self> {
        Self::new(1.0, 1.0, rho)
    }

    pub fn sigma_v2(&self) -> f64 {
        self.sigma_v2
    }

    pub fn sigma_s2(&self) -> f64 {
        self.sigma_s2
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn sigma_v(&self) -> f64 {
        self.sigma_v2.sqrt()
    }

    pub fn sigma_s(&self) -> f64 {
        self.sigma_s2.sqrt()
    }

    /// `E[VS] = ρ σ_V σ_S`.
    pub fn cov_vs(&self) -> f64 {
        self.rho * self.sigma_v() * self.sigma_s()
    }

    /// Same statistics with a different correlation coefficient.
    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(self.sigma_v2, self.sigma_s2, rho)
    }
}

/// Power budget, design noise and actual noise of the AWGN channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    p: f64,
    n_design: f64,
    n_actual: f64,
}

impl ChannelSpec {
    /// Matched channel: the actual noise equals the design noise.
    pub fn new(p: f64, n_design: f64) -> Result<Self> {
        let n_design = positive("noise must be positive", n_design)?;
        Ok(ChannelSpec {
            p: positive("power must be positive", p)?,
            n_design,
            n_actual: n_design,
        })
    }

    /// Channel with power `p` and design SNR `P/N` given in dB.
    pub fn from_snr_db(p: f64, snr_db: f64) -> Result<Self> {
        let snr_db = finite("snr must be finite", snr_db)?;
        let p = positive("power must be positive", p)?;
        Self::new(p, p / db_to_linear(snr_db))
    }

    /// The same design with a different actual noise variance.
    pub fn with_actual_noise(&self, n_actual: f64) -> Result<Self> {
        Ok(ChannelSpec {
            n_actual: positive("noise must be positive", n_actual)?,
            ..*self
        })
    }

    /// The same design with the actual SNR `P/N_a` given in dB.
    pub fn with_actual_snr_db(&self, snr_db: f64) -> Result<Self> {
        let snr_db = finite("snr must be finite", snr_db)?;
        self.with_actual_noise(self.p / db_to_linear(snr_db))
    }

    /// Drops any mismatch: the actual noise is reset to the design noise.
    pub fn matched(&self) -> Self {
        ChannelSpec {
            n_actual: self.n_design,
            ..*self
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n_design(&self) -> f64 {
        self.n_design
    }

    pub fn n_actual(&self) -> f64 {
        self.n_actual
    }

    pub fn is_matched(&self) -> bool {
        self.n_actual == self.n_design
    }

    pub fn design_snr_db(&self) -> f64 {
        linear_to_db(self.p / self.n_design)
    }

    pub fn actual_snr_db(&self) -> f64 {
        linear_to_db(self.p / self.n_actual)
    }
}

/// Free parameters of the superposition schemes: the mixing coefficient `γ`
/// of the analog part and its power `P_a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    gamma: f64,
    pa: f64,
}

impl Allocation {
    pub fn new(gamma: f64, pa: f64) -> Result<Self> {
        finite("gamma out of range", gamma)?;
        finite("pa out of range", pa)?;
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::invalid(
                "gamma out of range",
                format!("{gamma} not in [0, 1]"),
            ));
        }
        if pa < 0.0 {
            return Err(Error::invalid(
                "pa out of range",
                format!("{pa} must be >= 0"),
            ));
        }
        Ok(Allocation { gamma, pa })
    }

    /// Allocation checked against the power budget of `channel`.
    pub fn for_channel(gamma: f64, pa: f64, channel: &ChannelSpec) -> Result<Self> {
        let alloc = Self::new(gamma, pa)?;
        check_budget(&alloc, channel.p())?;
        Ok(alloc)
    }

    /// Full-power coherent analog transmission (the uncoded scheme).
    pub fn uncoded(channel: &ChannelSpec) -> Self {
        Allocation {
            gamma: 1.0,
            pa: channel.p(),
        }
    }

    /// No analog part at all.
    pub fn digital_only() -> Self {
        Allocation {
            gamma: 1.0,
            pa: 0.0,
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn pa(&self) -> f64 {
        self.pa
    }

    /// Power left for the digital or HDA part, `P - P_a`.
    pub fn p_h(&self, channel: &ChannelSpec) -> f64 {
        (channel.p() - self.pa).max(0.0)
    }
}

pub(crate) fn check_budget(alloc: &Allocation, p: f64) -> Result<()> {
    if alloc.pa() > p {
        Err(Error::invalid(
            "pa exceeds power budget",
            format!("pa = {} > p = {}", alloc.pa(), p),
        ))
    } else {
        Ok(())
    }
}

/// Checks the joint constraints of a model, a channel and an allocation.
pub fn validate(_model: &SourceModel, channel: &ChannelSpec, alloc: &Allocation) -> Result<()> {
    // Each value re-checked its own invariants when it was built; only the
    // cross-type constraint is left.
    check_budget(alloc, channel.p())
}

/// Coding scheme whose distortion is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Full-power analog transmission of `V`.
    Uncoded,
    /// Optimal quantizer and dirty paper coding that ignores the correlation.
    NaiveDpc,
    /// Analog part plus Wyner-Ziv refinement sent with dirty paper coding.
    DigitalDpc,
    /// Analog part plus hybrid digital-analog refinement.
    Hda,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::Uncoded,
        Scheme::NaiveDpc,
        Scheme::DigitalDpc,
        Scheme::Hda,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Uncoded => "uncoded",
            Scheme::NaiveDpc => "naive-dpc",
            Scheme::DigitalDpc => "digital-dpc",
            Scheme::Hda => "hda",
        }
    }

    /// Whether the scheme has free `(γ, P_a)` parameters.
    pub fn has_allocation(&self) -> bool {
        matches!(self, Scheme::DigitalDpc | Scheme::Hda)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.name() == s)
            .ok_or_else(|| Error::invalid("unknown scheme", s.to_string()))
    }
}

/// An evaluated allocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionPoint {
    pub allocation: Allocation,
    pub distortion: f64,
    pub scheme: Scheme,
}

impl DistortionPoint {
    /// Checks `0 <= D <= σ_V²` with a relative slack for round-off.
    pub fn new(
        model: &SourceModel,
        allocation: Allocation,
        distortion: f64,
        scheme: Scheme,
    ) -> Result<Self> {
        let slack = 1e-12 * model.sigma_v2();
        if !distortion.is_finite() || distortion < -slack || distortion > model.sigma_v2() + slack {
            return Err(Error::invalid(
                "distortion out of range",
                format!("{distortion} not in [0, {}]", model.sigma_v2()),
            ));
        }
        Ok(DistortionPoint {
            allocation,
            distortion,
            scheme,
        })
    }
}

/// Generalized cognitive radio channel with correlated analog sources.
///
/// `Y_1 = X_1 + h_2 X_2 + Z_1` at the primary receiver and
/// `Y_2 = h_1 X_1 + X_2 + Z_2` at the secondary one; the secondary transmitter
/// knows `V_1` non-causally.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CognitiveConfig {
    p1: f64,
    p2: f64,
    h1: f64,
    h2: f64,
    n1: f64,
    n2: f64,
    sigma_v1_2: f64,
    sigma_v2_2: f64,
    rho: f64,
}

impl CognitiveConfig {
    /// Unit noises and unit source variances.
    pub fn new(p1: f64, p2: f64, h1: f64, h2: f64, rho: f64) -> Result<Self> {
        Ok(CognitiveConfig {
            p1: positive("p1 must be positive", p1)?,
            p2: positive("p2 must be positive", p2)?,
            h1: finite("h1 must be finite", h1)?,
            h2: finite("h2 must be finite", h2)?,
            n1: 1.0,
            n2: 1.0,
            sigma_v1_2: 1.0,
            sigma_v2_2: 1.0,
            rho: correlation(rho)?,
        })
    }

    pub fn with_noise(self, n1: f64, n2: f64) -> Result<Self> {
        Ok(CognitiveConfig {
            n1: positive("n1 must be positive", n1)?,
            n2: positive("n2 must be positive", n2)?,
            ..self
        })
    }

    pub fn with_source_variances(self, sigma_v1_2: f64, sigma_v2_2: f64) -> Result<Self> {
        Ok(CognitiveConfig {
            sigma_v1_2: positive("sigma_v1_2 must be positive", sigma_v1_2)?,
            sigma_v2_2: positive("sigma_v2_2 must be positive", sigma_v2_2)?,
            ..self
        })
    }

    pub fn with_rho(self, rho: f64) -> Result<Self> {
        Ok(CognitiveConfig {
            rho: correlation(rho)?,
            ..self
        })
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }
    pub fn p2(&self) -> f64 {
        self.p2
    }
    pub fn h1(&self) -> f64 {
        self.h1
    }
    pub fn h2(&self) -> f64 {
        self.h2
    }
    pub fn n1(&self) -> f64 {
        self.n1
    }
    pub fn n2(&self) -> f64 {
        self.n2
    }
    pub fn sigma_v1_2(&self) -> f64 {
        self.sigma_v1_2
    }
    pub fn sigma_v2_2(&self) -> f64 {
        self.sigma_v2_2
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Signal-to-distortion style dB value, `-10 log10(D)`.
pub fn distortion_db(d: f64) -> f64 {
    -10.0 * d.log10()
}
