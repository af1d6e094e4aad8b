//! Channel descriptions and classical reference bounds.
//!
//! Two representations are used. [`GeneralChannel`] holds the physical 2x2
//! crosstalk matrix (as squared gain magnitudes), transmit powers, bandwidth
//! and noise density. [`StandardChannel`] is its normalized form: unit direct
//! gains and unit noise, with the interference captured by the coupling
//! coefficients `alpha` (into receiver 1) and `beta` (into receiver 2).
//! All solvers consume the standard form.
//!
//! Rates are reported in bits per channel use under the `w` bandwidth
//! convention. The default `w = 2` makes `w/2 = 1`, so a full-band
//! interference-free rate reads simply `log2(1 + snr)`. Improvement ratios
//! are invariant in `w`, so the convention is cosmetic and kept configurable.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_nonnegative, ensure_positive, Result};
use crate::units::db_to_linear;

/// Default bandwidth convention for reported rates.
pub const DEFAULT_W: f64 = 2.0;

/// Physical 2x2 interference channel.
///
/// `gain_sq[i][j]` is the squared gain magnitude `|h_ij|^2` from transmitter
/// `j` into receiver `i`. Gains are accepted as squared magnitudes directly;
/// complex-valued input belongs to the parsing layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralChannel {
    /// Squared gain magnitudes, row = receiver, column = transmitter.
    pub gain_sq: [[f64; 2]; 2],
    /// Transmit power budgets in watts.
    pub power: [f64; 2],
    /// Bandwidth in Hz.
    pub bandwidth: f64,
    /// One-sided noise spectral density in watts/Hz.
    pub noise_density: f64,
}

impl GeneralChannel {
    /// Validate and build a physical channel. Direct links must exist
    /// (`gain_sq[0][0]`, `gain_sq[1][1]` positive); powers, bandwidth and
    /// noise density must be positive.
    pub fn new(
        gain_sq: [[f64; 2]; 2],
        power: [f64; 2],
        bandwidth: f64,
        noise_density: f64,
    ) -> Result<Self> {
        ensure_positive("|h11|^2", gain_sq[0][0])?;
        ensure_positive("|h22|^2", gain_sq[1][1])?;
        ensure_nonnegative("|h12|^2", gain_sq[0][1])?;
        ensure_nonnegative("|h21|^2", gain_sq[1][0])?;
        ensure_positive("P1", power[0])?;
        ensure_positive("P2", power[1])?;
        ensure_positive("W", bandwidth)?;
        ensure_positive("N0", noise_density)?;
        Ok(Self {
            gain_sq,
            power,
            bandwidth,
            noise_density,
        })
    }

    /// Normalize to standard form by dividing through by the noise power
    /// `W*N0/2` and the direct gains:
    ///
    /// `snr_i = |h_ii|^2 P_i / (W N0 / 2)`, `alpha = |h12|^2 / |h22|^2`,
    /// `beta = |h21|^2 / |h11|^2`. The rate convention `w` is carried from
    /// configuration, not from the physical bandwidth.
    pub fn normalize(&self, w: f64) -> Result<StandardChannel> {
        let noise_power = self.bandwidth * self.noise_density / 2.0;
        StandardChannel::new(
            self.gain_sq[0][0] * self.power[0] / noise_power,
            self.gain_sq[1][1] * self.power[1] / noise_power,
            self.gain_sq[0][1] / self.gain_sq[1][1],
            self.gain_sq[1][0] / self.gain_sq[0][0],
            w,
        )
    }
}

/// Normalized channel: the input to every solver in this crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardChannel {
    /// Linear signal-to-noise ratio of link 1.
    pub snr1: f64,
    /// Linear signal-to-noise ratio of link 2.
    pub snr2: f64,
    /// Interference coupling into receiver 1.
    pub alpha: f64,
    /// Interference coupling into receiver 2.
    pub beta: f64,
    /// Bandwidth convention for reported rates.
    pub w: f64,
}

impl StandardChannel {
    pub fn new(snr1: f64, snr2: f64, alpha: f64, beta: f64, w: f64) -> Result<Self> {
        ensure_positive("snr1", snr1)?;
        ensure_positive("snr2", snr2)?;
        ensure_nonnegative("alpha", alpha)?;
        ensure_nonnegative("beta", beta)?;
        ensure_positive("w", w)?;
        Ok(Self {
            snr1,
            snr2,
            alpha,
            beta,
            w,
        })
    }
}

/// A point `(r1, r2)` in rate space, bits per channel use under the
/// channel's `w` convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePair {
    pub r1: f64,
    pub r2: f64,
}

impl RatePair {
    /// Coordinatewise dominance: `self >= other` in both rates.
    pub fn dominates(&self, other: &RatePair) -> bool {
        self.r1 >= other.r1 && self.r2 >= other.r2
    }
}

/// Classical reference bounds, informational outputs only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceBounds {
    /// Whether the very-strong-interference condition
    /// `alpha >= 1 + snr1` and `beta >= 1 + snr2` holds.
    pub vsi_applies: bool,
    /// Per-user single-link capacities when it does: interference can be
    /// decoded and removed, so each link attains its interference-free rate.
    pub vsi_rates: Option<RatePair>,
    /// Sato sum-rate bound: the tighter of the two embedded multiple-access
    /// sum capacities.
    pub sato_sum_rate: f64,
}

/// Rate of a single interference-free link using the whole band.
pub(crate) fn single_link_rate(snr: f64, w: f64) -> f64 {
    0.5 * w * snr.ln_1p() / std::f64::consts::LN_2
}

/// Compute the classical reference bounds for a standard channel.
pub fn reference_bounds(sc: &StandardChannel) -> ReferenceBounds {
    let vsi_applies = sc.alpha >= 1.0 + sc.snr1 && sc.beta >= 1.0 + sc.snr2;
    let vsi_rates = vsi_applies.then(|| RatePair {
        r1: single_link_rate(sc.snr1, sc.w),
        r2: single_link_rate(sc.snr2, sc.w),
    });
    let mac1 = sc.snr1 + sc.alpha * sc.snr2;
    let mac2 = sc.snr2 + sc.beta * sc.snr1;
    ReferenceBounds {
        vsi_applies,
        vsi_rates,
        sato_sum_rate: single_link_rate(mac1.min(mac2), sc.w),
    }
}

/// JSON channel descriptor accepted on the command line.
///
/// Either a physical description,
/// `{"h2": [[1.0, 0.4], [0.7, 1.0]], "p": [100, 31.6228], "w": 2, "n0": 1}`
/// with `h2` holding squared gain magnitudes, or a pre-normalized one,
/// `{"snr_db": [20, 15], "alpha": 0.4, "beta": 0.7}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ChannelDescriptor {
    General {
        h2: [[f64; 2]; 2],
        p: [f64; 2],
        w: f64,
        n0: f64,
    },
    Standard {
        snr_db: [f64; 2],
        alpha: f64,
        beta: f64,
    },
}

impl ChannelDescriptor {
    /// Resolve the descriptor into a standard channel under the given rate
    /// convention `w`.
    pub fn to_standard(&self, convention_w: f64) -> Result<StandardChannel> {
        match *self {
            ChannelDescriptor::General { h2, p, w, n0 } => {
                GeneralChannel::new(h2, p, w, n0)?.normalize(convention_w)
            }
            ChannelDescriptor::Standard {
                snr_db,
                alpha,
                beta,
            } => StandardChannel::new(
                db_to_linear(snr_db[0]),
                db_to_linear(snr_db[1]),
                alpha,
                beta,
                convention_w,
            ),
        }
    }
}
