//! Solvers for spectrum sharing between two interfering links.
//!
//! The crate models the two-user Gaussian interference channel and computes
//! both of its natural operating points under frequency-division
//! multiplexing:
//!
//! - the **competitive** point, where each link unilaterally water-fills
//!   against the other's interference ([`competitive`]), and
//! - the **cooperative** point, the Nash bargaining solution over band
//!   splits, which maximizes the product of the rate gains both links get
//!   relative to the competitive fallback ([`bargaining`]).
//!
//! [`channel`] holds the channel representations and classical reference
//! bounds, and [`sweep`] reproduces the improvement-ratio surfaces over SNR
//! and coupling grids with deterministic, optionally parallel execution.
//!
//! All solvers operate on the normalized [`StandardChannel`]: linear SNRs,
//! coupling coefficients `alpha`/`beta`, and a rate convention `w`
//! (default 2, so rates read as plain `log2(1 + snr)`).

pub mod bargaining;
pub mod channel;
pub mod competitive;
pub mod error;
pub mod fmt;
pub mod solvers;
pub mod sweep;
pub mod units;

pub use bargaining::{
    fdm_feasible, fdm_gain_guaranteed, fdm_rates, invert_share, nash_product, region_boundary,
    region_membership, solve_nbs, threshold_share, BargainingOutcome, FdmSplit, FeasibilityReport,
    RegionMembership, DEFAULT_NBS_TOL,
};
pub use channel::{
    reference_bounds, ChannelDescriptor, GeneralChannel, RatePair, ReferenceBounds,
    StandardChannel, DEFAULT_W,
};
pub use competitive::{
    competitive_rates, DiscreteGame, EquilibriumResult, GameDescriptor, PowerAllocation,
};
pub use error::{Error, Result};
pub use sweep::{
    deltas, run_sweep, run_sweep_serial, sweep_csv, AxisSpec, SweepRecord, SweepSpec,
    INFEASIBLE_RHO_SENTINEL,
};
pub use units::{db_to_linear, linear_to_db};
