//! FDM bargaining: rate parametrization, feasibility, and the Nash
//! bargaining solution.
//!
//! Under FDM cooperation player 1 takes a fraction `rho` of the band and
//! player 2 the remaining `1 - rho`, each spending its full power inside its
//! own slice, so the achievable rates are
//!
//! ```text
//! R1(rho) = (rho w / 2) log2(1 + snr1 / rho)
//! R2(1 - rho) = ((1 - rho) w / 2) log2(1 + snr2 / (1 - rho))
//! ```
//!
//! Cooperation is individually rational only if both players can at least
//! recover their competitive rates. [`threshold_share`] computes the minimal
//! share that does so for one link; [`fdm_feasible`] checks that the two
//! minimal shares fit into one band. When they do, [`solve_nbs`] maximizes
//! the Nash product
//!
//! ```text
//! F(rho) = (R1(rho) - r1_c) (R2(1 - rho) - r2_c)
//! ```
//!
//! over the feasible interval; the maximizer is the unique bargaining
//! outcome, Pareto-optimal on the FDM boundary. Infeasible channels fall
//! back to the disagreement point, the competitive rates themselves.

use crate::channel::{single_link_rate, RatePair, StandardChannel};
use crate::competitive::competitive_rates;
use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::solvers::{bisect_bracket, golden_section_max};

const LN_2: f64 = std::f64::consts::LN_2;

/// Below this share the rate contribution is indistinguishable from zero and
/// `snr / rho` risks overflow; the continuous extension at zero applies.
const RHO_FLOOR: f64 = 1e-300;

/// Feasibility margin: minimal-share sums within this of one count as a tie
/// and are classified as disagreement (the unique split would reproduce the
/// competitive rates anyway).
pub const FEASIBILITY_EPS: f64 = 1e-10;

/// Tolerance for boundary membership queries in share space.
const MEMBERSHIP_TOL: f64 = 1e-9;

/// Default tolerance on the bargaining split.
pub const DEFAULT_NBS_TOL: f64 = 1e-10;

/// Band share assigned to player 1; player 2 implicitly gets the rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdmSplit(f64);

impl FdmSplit {
    pub fn new(rho: f64) -> Result<Self> {
        if rho.is_finite() && (0.0..=1.0).contains(&rho) {
            Ok(Self(rho))
        } else {
            Err(Error::Domain {
                name: "rho",
                constraint: "within [0, 1]",
                value: rho,
            })
        }
    }

    pub fn rho(self) -> f64 {
        self.0
    }

    /// Share left for player 2.
    pub fn complement(self) -> f64 {
        1.0 - self.0
    }
}

/// Rate of one link confined to a `rho` fraction of the band at full power,
/// extended continuously by zero at `rho = 0`.
fn share_rate(snr: f64, w: f64, rho: f64) -> f64 {
    if rho <= RHO_FLOOR {
        0.0
    } else {
        0.5 * w * rho * (snr / rho).ln_1p() / LN_2
    }
}

/// d/d(rho) of [`share_rate`]; positive for all `rho` in (0, 1].
fn share_rate_slope(snr: f64, w: f64, rho: f64) -> f64 {
    0.5 * w * ((snr / rho).ln_1p() - snr / (rho + snr)) / LN_2
}

/// Rates of both players under a band split.
pub fn fdm_rates(sc: &StandardChannel, split: FdmSplit) -> RatePair {
    RatePair {
        r1: share_rate(sc.snr1, sc.w, split.rho()),
        r2: share_rate(sc.snr2, sc.w, split.complement()),
    }
}

/// Log-domain residual of the share equation
/// `(1 + x/rho)^rho = 1 + x/(1 + y)`:
///
/// `rho * ln(1 + x/rho) - ln(1 + x/(1 + y))`, rearranged so that both terms
/// stay accurate when the root sits close to 1 (the difference of the two
/// logs is folded into a single `ln_1p` of a small quantity).
fn share_gap_log(x: f64, y: f64, rho: f64, log_rhs: f64) -> f64 {
    let q = (x / rho) * (((1.0 - rho) + y) / (1.0 + x + y));
    rho * q.ln_1p() + (rho - 1.0) * log_rhs
}

/// Minimal band share `rho` at which a link with SNR `x` facing effective
/// interference `y` recovers its competitive rate: the unique root in
/// (0, 1] of `(1 + x/rho)^rho = 1 + x/(1 + y)`.
///
/// The left side grows monotonically in `rho` from 1 towards `1 + x`, and
/// the right side sits strictly inside that range for `y > 0`, so bisection
/// cannot miss. The bracket is driven to adjacent floats and the endpoint
/// with the smaller residual wins; that keeps the defining equation satisfied
/// to the limit f64 allows even at large `x`, where it is very steep in
/// `rho`. For `y = 0` the equation holds exactly at `rho = 1`.
pub fn threshold_share(x: f64, y: f64) -> Result<f64> {
    ensure_positive("x", x)?;
    ensure_nonnegative("y", y)?;
    if y == 0.0 {
        return Ok(1.0);
    }
    Ok(threshold_share_unchecked(x, y))
}

fn threshold_share_unchecked(x: f64, y: f64) -> f64 {
    let log_rhs = (x / (1.0 + y)).ln_1p();
    let gap = |rho: f64| share_gap_log(x, y, rho, log_rhs);
    let (lo, hi) = bisect_bracket(gap, RHO_FLOOR, 1.0, 0.0);
    if gap(lo).abs() <= gap(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Residual of the share equation at a given split, in the original
/// (non-log) scale: `(1 + x/rho)^rho - 1 - x/(1 + y)`. Evaluated through the
/// same stabilized rearrangement so it measures the true residual instead of
/// cancellation noise.
pub fn share_equation_residual(x: f64, y: f64, rho: f64) -> f64 {
    let log_rhs = (x / (1.0 + y)).ln_1p();
    let rhs = 1.0 + x / (1.0 + y);
    rhs * share_gap_log(x, y, rho, log_rhs).exp_m1()
}

/// Minimal shares of both players and whether they fit in one band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport {
    /// Minimal share for player 1 to recover its competitive rate.
    pub rho1_min: f64,
    /// Minimal share for player 2.
    pub rho2_min: f64,
    /// Whether both minimal shares fit: `rho1_min + rho2_min <= 1` (up to
    /// [`FEASIBILITY_EPS`]).
    pub feasible: bool,
    /// Leftover band fraction `1 - rho1_min - rho2_min`.
    pub slack: f64,
}

/// Decide whether an FDM bargaining gain exists for this channel.
pub fn fdm_feasible(sc: &StandardChannel) -> FeasibilityReport {
    let rho1_min = if sc.alpha == 0.0 {
        1.0
    } else {
        threshold_share_unchecked(sc.snr1, sc.alpha * sc.snr2)
    };
    let rho2_min = if sc.beta == 0.0 {
        1.0
    } else {
        threshold_share_unchecked(sc.snr2, sc.beta * sc.snr1)
    };
    let slack = 1.0 - rho1_min - rho2_min;
    FeasibilityReport {
        rho1_min,
        rho2_min,
        feasible: slack >= FEASIBILITY_EPS,
        slack,
    }
}

/// Nash product `F(rho) = (R1(rho) - rc.r1) (R2(1-rho) - rc.r2)`.
///
/// `rc` must be the competitive rates of the same channel. Negative outside
/// the feasible interval.
pub fn nash_product(sc: &StandardChannel, split: FdmSplit, rc: &RatePair) -> f64 {
    let rates = fdm_rates(sc, split);
    (rates.r1 - rc.r1) * (rates.r2 - rc.r2)
}

/// Outcome of the bargaining problem.
#[derive(Debug, Clone, PartialEq)]
pub enum BargainingOutcome {
    /// Cooperation pays: the band split maximizing the Nash product.
    Agreement {
        rho_star: FdmSplit,
        nbs_rates: RatePair,
        competitive: RatePair,
        /// `F(rho_star)`, (bits/use)^2.
        nash_product: f64,
        /// Per-player rate gains over the competitive point.
        gains: (f64, f64),
    },
    /// No split beats the competitive point for both players; the outcome is
    /// the disagreement point itself.
    Disagreement { competitive: RatePair },
}

impl BargainingOutcome {
    pub fn is_agreement(&self) -> bool {
        matches!(self, BargainingOutcome::Agreement { .. })
    }

    pub fn rho_star(&self) -> Option<f64> {
        match self {
            BargainingOutcome::Agreement { rho_star, .. } => Some(rho_star.rho()),
            BargainingOutcome::Disagreement { .. } => None,
        }
    }

    /// Rates actually realized: the bargaining rates on agreement, the
    /// competitive rates otherwise.
    pub fn rates(&self) -> RatePair {
        match self {
            BargainingOutcome::Agreement { nbs_rates, .. } => *nbs_rates,
            BargainingOutcome::Disagreement { competitive } => *competitive,
        }
    }

    pub fn competitive(&self) -> RatePair {
        match self {
            BargainingOutcome::Agreement { competitive, .. } => *competitive,
            BargainingOutcome::Disagreement { competitive } => *competitive,
        }
    }

    pub fn nash_product(&self) -> f64 {
        match self {
            BargainingOutcome::Agreement { nash_product, .. } => *nash_product,
            BargainingOutcome::Disagreement { .. } => 0.0,
        }
    }

    /// Rate gains over the disagreement point, `(1, 1)` on disagreement.
    pub fn gains(&self) -> (f64, f64) {
        match self {
            BargainingOutcome::Agreement { gains, .. } => *gains,
            BargainingOutcome::Disagreement { .. } => (1.0, 1.0),
        }
    }
}

/// Solve the bargaining problem for a channel.
///
/// Infeasible channels return [`BargainingOutcome::Disagreement`]. Otherwise
/// the split maximizing the Nash product is located on the feasible interval
/// `[rho1_min, 1 - rho2_min]` by golden-section search on
/// `ln(R1(rho) - rc1) + ln(R2(1-rho) - rc2)` (strictly concave there), then
/// sharpened by bisecting the sign of the analytic derivative inside the
/// golden bracket. `tol` bounds the final bracket width on `rho`.
pub fn solve_nbs(sc: &StandardChannel, tol: f64) -> Result<BargainingOutcome> {
    ensure_positive("tolerance", tol)?;
    let rc = competitive_rates(sc);
    let report = fdm_feasible(sc);
    if !report.feasible {
        return Ok(BargainingOutcome::Disagreement { competitive: rc });
    }

    let (a, b) = (report.rho1_min, 1.0 - report.rho2_min);
    let (snr1, snr2, w) = (sc.snr1, sc.snr2, sc.w);

    let log_objective = |rho: f64| -> f64 {
        let u1 = share_rate(snr1, w, rho) - rc.r1;
        let u2 = share_rate(snr2, w, 1.0 - rho) - rc.r2;
        if u1 > 0.0 && u2 > 0.0 {
            u1.ln() + u2.ln()
        } else {
            f64::NEG_INFINITY
        }
    };
    // Decreasing in rho; its root is the maximizer.
    let objective_slope = |rho: f64| -> f64 {
        let u1 = share_rate(snr1, w, rho) - rc.r1;
        let u2 = share_rate(snr2, w, 1.0 - rho) - rc.r2;
        if u1 <= 0.0 {
            return f64::INFINITY;
        }
        if u2 <= 0.0 {
            return f64::NEG_INFINITY;
        }
        share_rate_slope(snr1, w, rho) / u1 - share_rate_slope(snr2, w, 1.0 - rho) / u2
    };

    let coarse = tol.max(1e-7);
    let (glo, ghi) = golden_section_max(log_objective, a, b, coarse);

    let rho_star = {
        let edge = (b - a) * 1e-9;
        let pad = (ghi - glo).max(tol);
        let mut lo = (glo - pad).max(a + edge);
        let mut hi = (ghi + pad).min(b - edge);
        if objective_slope(lo) <= 0.0 {
            lo = a + edge;
        }
        if objective_slope(hi) >= 0.0 {
            hi = b - edge;
        }
        if objective_slope(lo) > 0.0 && objective_slope(hi) < 0.0 {
            let (l, r) = bisect_bracket(|rho| -objective_slope(rho), lo, hi, tol);
            0.5 * (l + r)
        } else {
            // Derivative signs are unreadable (interval at fp resolution);
            // fall back to the golden bracket midpoint.
            0.5 * (glo + ghi)
        }
    };

    let split = FdmSplit(rho_star);
    let nbs_rates = fdm_rates(sc, split);
    let product = (nbs_rates.r1 - rc.r1) * (nbs_rates.r2 - rc.r2);
    if product <= 0.0 {
        // Feasible only by a hair: the gains are below f64 resolution, so
        // the conservative disagreement label applies.
        return Ok(BargainingOutcome::Disagreement { competitive: rc });
    }
    Ok(BargainingOutcome::Agreement {
        rho_star: split,
        nbs_rates,
        competitive: rc,
        nash_product: product,
        gains: (nbs_rates.r1 / rc.r1, nbs_rates.r2 / rc.r2),
    })
}

/// Closed-form SNR sufficiency test: with both couplings strictly positive,
/// SNRs at or above
///
/// `snr1 >= (alpha^2 beta^4)^(-1/3) / 2`, `snr2 >= (beta^2 alpha^4)^(-1/3) / 2`
///
/// guarantee that an even band split already beats the competitive point,
/// hence an FDM bargaining gain exists.
pub fn fdm_gain_guaranteed(sc: &StandardChannel) -> Result<bool> {
    ensure_positive("alpha", sc.alpha)?;
    ensure_positive("beta", sc.beta)?;
    let t1 = 0.5 * (sc.alpha * sc.alpha * sc.beta.powi(4)).powf(-1.0 / 3.0);
    let t2 = 0.5 * (sc.beta * sc.beta * sc.alpha.powi(4)).powf(-1.0 / 3.0);
    Ok(sc.snr1 >= t1 && sc.snr2 >= t2)
}

/// Sample the FDM boundary at `n >= 2` evenly spaced splits. Player 1's rate
/// is nondecreasing and player 2's nonincreasing along the returned list.
pub fn region_boundary(sc: &StandardChannel, n: usize) -> Result<Vec<(f64, RatePair)>> {
    if n < 2 {
        return Err(Error::Domain {
            name: "sample count",
            constraint: "at least 2",
            value: n as f64,
        });
    }
    Ok((0..n)
        .map(|i| {
            let rho = i as f64 / (n - 1) as f64;
            (rho, fdm_rates(sc, FdmSplit(rho)))
        })
        .collect())
}

/// Minimal share at which a single link reaches `target` rate: the inverse
/// of the strictly increasing `rho -> share_rate(snr, w, rho)`, bisected to
/// 1e-12 on the share. Zero target maps to zero share; targets above the
/// full-band rate are rejected.
pub fn invert_share(snr: f64, w: f64, target: f64) -> Result<f64> {
    ensure_positive("snr", snr)?;
    ensure_positive("w", w)?;
    ensure_nonnegative("target rate", target)?;
    if target == 0.0 {
        return Ok(0.0);
    }
    let full = single_link_rate(snr, w);
    if target > full {
        return Err(Error::TargetAboveCapacity { target, max: full });
    }
    if target == full {
        return Ok(1.0);
    }
    let (lo, hi) = bisect_bracket(|rho| share_rate(snr, w, rho) - target, 0.0, 1.0, 1e-12);
    Ok(0.5 * (lo + hi))
}

/// Membership of a rate pair in the FDM region and in its individually
/// rational part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionMembership {
    /// Reachable by some band split: the per-link minimal shares fit in one
    /// band.
    pub in_fdm: bool,
    /// Additionally dominates the competitive point coordinatewise.
    pub in_game_region: bool,
}

/// Test a nonnegative rate pair for region membership.
pub fn region_membership(p: &RatePair, sc: &StandardChannel) -> Result<RegionMembership> {
    ensure_nonnegative("r1", p.r1)?;
    ensure_nonnegative("r2", p.r2)?;
    let in_fdm = match (
        invert_share(sc.snr1, sc.w, p.r1),
        invert_share(sc.snr2, sc.w, p.r2),
    ) {
        (Ok(s1), Ok(s2)) => s1 + s2 <= 1.0 + MEMBERSHIP_TOL,
        // beyond a full-band rate on either axis
        _ => false,
    };
    let rc = competitive_rates(sc);
    Ok(RegionMembership {
        in_fdm,
        in_game_region: in_fdm && p.dominates(&rc),
    })
}
