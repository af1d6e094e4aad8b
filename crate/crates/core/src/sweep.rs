//! Grid sweeps of the bargaining gain over SNR or interference coefficients.
//!
//! Every grid point is an independent pure computation, so the sweep maps
//! cleanly onto a worker pool: with the `parallel` feature (default) points
//! run on rayon and are collected back in index order, making the output
//! independent of the worker count, byte for byte. Without the feature
//! [`run_sweep`] falls back to the sequential path, which is also exported
//! directly as [`run_sweep_serial`] for comparison and benchmarking.
//!
//! Two protocols are covered: a square SNR grid at fixed couplings
//! (default 0 to 40 dB in 0.25 dB steps) and a square coupling grid at
//! fixed SNRs (default 0 to 1 in 0.01 steps). Grid values are computed as
//! `min + i * step` from integer indices so long axes accumulate no drift.

use crate::bargaining::{solve_nbs, BargainingOutcome, DEFAULT_NBS_TOL};
use crate::channel::{RatePair, StandardChannel};
use crate::error::{Error, Result};
use crate::fmt::sig10;
use crate::units::db_to_linear;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Value of the `rho_star` column for infeasible grid points.
pub const INFEASIBLE_RHO_SENTINEL: f64 = -1.0;

/// Header of the sweep CSV schema.
pub const SWEEP_CSV_HEADER: &str =
    "snr1_db,snr2_db,alpha,beta,rc1,rc2,feasible,rho_star,r_nbs1,r_nbs2,delta_min,delta_sum";

/// One evenly spaced sweep axis; values are `min + i * step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl AxisSpec {
    pub fn new(min: f64, max: f64, step: f64) -> Self {
        Self { min, max, step }
    }

    fn validate(&self, name: &'static str) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.step.is_finite()) {
            return Err(Error::Axis {
                name,
                reason: "bounds and step must be finite",
            });
        }
        if self.step <= 0.0 {
            return Err(Error::Axis {
                name,
                reason: "step must be positive",
            });
        }
        if self.max < self.min {
            return Err(Error::Axis {
                name,
                reason: "max must not be below min",
            });
        }
        Ok(())
    }

    /// Number of grid values on this axis.
    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value(&self, i: usize) -> f64 {
        self.min + i as f64 * self.step
    }
}

/// Sweep protocol: which two parameters span the grid and which stay fixed.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepSpec {
    /// Fixed couplings, SNR axes in dB.
    SnrGrid {
        alpha: f64,
        beta: f64,
        snr1_db: AxisSpec,
        snr2_db: AxisSpec,
        w: f64,
    },
    /// Fixed SNRs (dB), coupling axes in [0, 1].
    InterferenceGrid {
        snr1_db: f64,
        snr2_db: f64,
        alpha: AxisSpec,
        beta: AxisSpec,
        w: f64,
    },
}

impl SweepSpec {
    /// The square 0-40 dB grid in 0.25 dB steps at fixed couplings.
    pub fn default_snr_grid(alpha: f64, beta: f64, w: f64) -> Self {
        let axis = AxisSpec::new(0.0, 40.0, 0.25);
        SweepSpec::SnrGrid {
            alpha,
            beta,
            snr1_db: axis,
            snr2_db: axis,
            w,
        }
    }

    /// The square 0-1 coupling grid in 0.01 steps at fixed SNRs.
    pub fn default_interference_grid(snr1_db: f64, snr2_db: f64, w: f64) -> Self {
        let axis = AxisSpec::new(0.0, 1.0, 0.01);
        SweepSpec::InterferenceGrid {
            snr1_db,
            snr2_db,
            alpha: axis,
            beta: axis,
            w,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SweepSpec::SnrGrid {
                alpha,
                beta,
                snr1_db,
                snr2_db,
                w,
            } => {
                crate::error::ensure_nonnegative("alpha", *alpha)?;
                crate::error::ensure_nonnegative("beta", *beta)?;
                crate::error::ensure_positive("w", *w)?;
                snr1_db.validate("snr1_db")?;
                snr2_db.validate("snr2_db")
            }
            SweepSpec::InterferenceGrid {
                snr1_db,
                snr2_db,
                alpha,
                beta,
                w,
            } => {
                if !snr1_db.is_finite() || !snr2_db.is_finite() {
                    return Err(Error::Domain {
                        name: "snr_db",
                        constraint: "finite",
                        value: if snr1_db.is_finite() {
                            *snr2_db
                        } else {
                            *snr1_db
                        },
                    });
                }
                crate::error::ensure_positive("w", *w)?;
                alpha.validate("alpha")?;
                beta.validate("beta")?;
                for (name, axis) in [("alpha", alpha), ("beta", beta)] {
                    if axis.min < 0.0 || axis.max > 1.0 {
                        return Err(Error::Axis {
                            name: if name == "alpha" { "alpha" } else { "beta" },
                            reason: "coupling axes must stay within [0, 1]",
                        });
                    }
                }
                Ok(())
            }
        }
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        let (a, b) = self.axes();
        a.len() * b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn axes(&self) -> (&AxisSpec, &AxisSpec) {
        match self {
            SweepSpec::SnrGrid {
                snr1_db, snr2_db, ..
            } => (snr1_db, snr2_db),
            SweepSpec::InterferenceGrid { alpha, beta, .. } => (alpha, beta),
        }
    }

    fn w(&self) -> f64 {
        match self {
            SweepSpec::SnrGrid { w, .. } | SweepSpec::InterferenceGrid { w, .. } => *w,
        }
    }

    /// Row-major grid coordinates: the first axis is the outer loop.
    fn grid_points(&self) -> Vec<GridPoint> {
        let (outer, inner) = self.axes();
        let mut points = Vec::with_capacity(self.len());
        for i in 0..outer.len() {
            for j in 0..inner.len() {
                points.push(match self {
                    SweepSpec::SnrGrid { alpha, beta, .. } => GridPoint {
                        snr1_db: outer.value(i),
                        snr2_db: inner.value(j),
                        alpha: *alpha,
                        beta: *beta,
                    },
                    SweepSpec::InterferenceGrid {
                        snr1_db, snr2_db, ..
                    } => GridPoint {
                        snr1_db: *snr1_db,
                        snr2_db: *snr2_db,
                        alpha: outer.value(i),
                        beta: inner.value(j),
                    },
                });
            }
        }
        points
    }
}

#[derive(Debug, Clone, Copy)]
struct GridPoint {
    snr1_db: f64,
    snr2_db: f64,
    alpha: f64,
    beta: f64,
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub snr1_db: f64,
    pub snr2_db: f64,
    pub alpha: f64,
    pub beta: f64,
    pub rc1: f64,
    pub rc2: f64,
    pub feasible: bool,
    /// Bargaining split, or [`INFEASIBLE_RHO_SENTINEL`] on disagreement.
    pub rho_star: f64,
    pub r_nbs1: f64,
    pub r_nbs2: f64,
    pub delta_min: f64,
    pub delta_sum: f64,
}

/// Improvement ratios of bargaining rates over competitive ones:
/// the worse of the per-player ratios and the sum-rate ratio.
pub fn deltas(nbs: &RatePair, rc: &RatePair) -> Result<(f64, f64)> {
    crate::error::ensure_positive("rc1", rc.r1)?;
    crate::error::ensure_positive("rc2", rc.r2)?;
    let delta_min = (nbs.r1 / rc.r1).min(nbs.r2 / rc.r2);
    let delta_sum = (nbs.r1 + nbs.r2) / (rc.r1 + rc.r2);
    Ok((delta_min, delta_sum))
}

fn evaluate_point(p: &GridPoint, w: f64) -> SweepRecord {
    let sc = StandardChannel::new(
        db_to_linear(p.snr1_db),
        db_to_linear(p.snr2_db),
        p.alpha,
        p.beta,
        w,
    )
    .expect("grid points are valid channels by construction");
    let outcome = solve_nbs(&sc, DEFAULT_NBS_TOL).expect("default tolerance is positive");
    let rc = outcome.competitive();
    match outcome {
        BargainingOutcome::Agreement {
            rho_star,
            nbs_rates,
            ..
        } => {
            let (delta_min, delta_sum) =
                deltas(&nbs_rates, &rc).expect("competitive rates are positive");
            SweepRecord {
                snr1_db: p.snr1_db,
                snr2_db: p.snr2_db,
                alpha: p.alpha,
                beta: p.beta,
                rc1: rc.r1,
                rc2: rc.r2,
                feasible: true,
                rho_star: rho_star.rho(),
                r_nbs1: nbs_rates.r1,
                r_nbs2: nbs_rates.r2,
                delta_min,
                delta_sum,
            }
        }
        BargainingOutcome::Disagreement { .. } => SweepRecord {
            snr1_db: p.snr1_db,
            snr2_db: p.snr2_db,
            alpha: p.alpha,
            beta: p.beta,
            rc1: rc.r1,
            rc2: rc.r2,
            feasible: false,
            rho_star: INFEASIBLE_RHO_SENTINEL,
            r_nbs1: rc.r1,
            r_nbs2: rc.r2,
            delta_min: 1.0,
            delta_sum: 1.0,
        },
    }
}

/// Run a sweep on `workers` threads (0 means one per core). Records come
/// back in row-major grid order whatever the worker count. Built without the
/// `parallel` feature this delegates to [`run_sweep_serial`].
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<Vec<SweepRecord>> {
    spec.validate()?;
    let w = spec.w();
    let points = spec.grid_points();

    #[cfg(feature = "parallel")]
    {
        if workers == 0 {
            // default worker count: the shared global pool
            return Ok(points.par_iter().map(|p| evaluate_point(p, w)).collect());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::WorkerPool(e.to_string()))?;
        Ok(pool.install(|| points.par_iter().map(|p| evaluate_point(p, w)).collect()))
    }

    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        Ok(points.iter().map(|p| evaluate_point(p, w)).collect())
    }
}

/// Sequential sweep, identical output to [`run_sweep`].
pub fn run_sweep_serial(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    spec.validate()?;
    let w = spec.w();
    Ok(spec
        .grid_points()
        .iter()
        .map(|p| evaluate_point(p, w))
        .collect())
}

/// Render records as CSV: fixed header, ten significant digits, `-1`
/// sentinel split on infeasible rows.
pub fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            sig10(r.snr1_db),
            sig10(r.snr2_db),
            sig10(r.alpha),
            sig10(r.beta),
            sig10(r.rc1),
            sig10(r.rc2),
            r.feasible,
            sig10(r.rho_star),
            sig10(r.r_nbs1),
            sig10(r.r_nbs2),
            sig10(r.delta_min),
            sig10(r.delta_sum),
        ));
    }
    out
}

/// Render a sampled FDM boundary as CSV with the competitive point and the
/// bargaining outcome marked in leading comment lines.
pub fn region_csv(
    boundary: &[(f64, RatePair)],
    rc: &RatePair,
    outcome: &BargainingOutcome,
) -> String {
    let mut out = String::with_capacity(32 * (boundary.len() + 3));
    out.push_str(&format!("# NE r1={} r2={}\n", sig10(rc.r1), sig10(rc.r2)));
    let nbs = outcome.rates();
    let rho = outcome.rho_star().unwrap_or(INFEASIBLE_RHO_SENTINEL);
    out.push_str(&format!(
        "# NBS rho={} r1={} r2={}\n",
        sig10(rho),
        sig10(nbs.r1),
        sig10(nbs.r2)
    ));
    out.push_str("rho,r1,r2\n");
    for (rho, rates) in boundary {
        out.push_str(&format!(
            "{},{},{}\n",
            sig10(*rho),
            sig10(rates.r1),
            sig10(rates.r2)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bargaining::region_boundary;
    use crate::competitive::competitive_rates;

    #[test]
    fn improvement_ratio_edges() {
        let rc = RatePair { r1: 2.0, r2: 0.5 };
        assert_eq!(deltas(&rc, &rc).unwrap(), (1.0, 1.0));
        let doubled = RatePair { r1: 4.0, r2: 1.0 };
        assert_eq!(deltas(&doubled, &rc).unwrap(), (2.0, 2.0));
        assert!(deltas(&rc, &RatePair { r1: 0.0, r2: 1.0 }).is_err());
    }

    #[test]
    fn demo_channel_improvement_ratios() {
        let sc = StandardChannel::new(100.0, 31.6228, 0.4, 0.7, 2.0).unwrap();
        let out = solve_nbs(&sc, DEFAULT_NBS_TOL).unwrap();
        let (dmin, dsum) = deltas(&out.rates(), &out.competitive()).unwrap();
        assert!((dmin - 1.5925524013280424).abs() < 1e-9, "dmin = {dmin}");
        assert!((dsum - 1.9571880588746593).abs() < 1e-9, "dsum = {dsum}");
    }

    #[test]
    fn default_axes_have_the_documented_sizes() {
        let snr = SweepSpec::default_snr_grid(0.7, 0.7, 2.0);
        assert_eq!(snr.len(), 161 * 161);
        let interference = SweepSpec::default_interference_grid(20.0, 20.0, 2.0);
        assert_eq!(interference.len(), 101 * 101);
    }

    #[test]
    fn single_point_sweep_matches_the_solver() {
        let spec = SweepSpec::SnrGrid {
            alpha: 0.4,
            beta: 0.7,
            snr1_db: AxisSpec::new(20.0, 20.0, 1.0),
            snr2_db: AxisSpec::new(15.0, 15.0, 1.0),
            w: 2.0,
        };
        let records = run_sweep_serial(&spec).unwrap();
        assert_eq!(records.len(), 1);
        let r = &records[0];

        let sc =
            StandardChannel::new(db_to_linear(20.0), db_to_linear(15.0), 0.4, 0.7, 2.0).unwrap();
        let out = solve_nbs(&sc, DEFAULT_NBS_TOL).unwrap();
        assert!(r.feasible);
        assert_eq!(r.rho_star, out.rho_star().unwrap());
        assert_eq!(r.r_nbs1, out.rates().r1);
        assert_eq!(r.rc1, out.competitive().r1);
    }

    #[test]
    fn uncoupled_axis_is_infeasible_with_unit_deltas() {
        let spec = SweepSpec::InterferenceGrid {
            snr1_db: 20.0,
            snr2_db: 20.0,
            alpha: AxisSpec::new(0.0, 0.0, 0.01),
            beta: AxisSpec::new(0.0, 1.0, 0.25),
            w: 2.0,
        };
        let records = run_sweep_serial(&spec).unwrap();
        assert_eq!(records.len(), 5);
        for r in &records {
            assert!(!r.feasible);
            assert_eq!(r.rho_star, INFEASIBLE_RHO_SENTINEL);
            assert_eq!(r.delta_min, 1.0);
            assert_eq!(r.delta_sum, 1.0);
            assert_eq!(r.r_nbs1, r.rc1);
        }
    }

    #[test]
    fn records_are_row_major() {
        let spec = SweepSpec::SnrGrid {
            alpha: 0.7,
            beta: 0.7,
            snr1_db: AxisSpec::new(0.0, 2.0, 1.0),
            snr2_db: AxisSpec::new(10.0, 12.0, 1.0),
            w: 2.0,
        };
        let records = run_sweep_serial(&spec).unwrap();
        assert_eq!(records.len(), 9);
        // inner axis (snr2) varies fastest
        assert_eq!(records[0].snr1_db, 0.0);
        assert_eq!(records[0].snr2_db, 10.0);
        assert_eq!(records[1].snr2_db, 11.0);
        assert_eq!(records[3].snr1_db, 1.0);
        assert_eq!(records[3].snr2_db, 10.0);
    }

    #[test]
    fn rejects_malformed_specs() {
        let bad_step = SweepSpec::SnrGrid {
            alpha: 0.7,
            beta: 0.7,
            snr1_db: AxisSpec::new(0.0, 40.0, 0.0),
            snr2_db: AxisSpec::new(0.0, 40.0, 0.25),
            w: 2.0,
        };
        assert!(run_sweep_serial(&bad_step).is_err());
        let coupling_out_of_range = SweepSpec::InterferenceGrid {
            snr1_db: 20.0,
            snr2_db: 20.0,
            alpha: AxisSpec::new(0.0, 1.5, 0.1),
            beta: AxisSpec::new(0.0, 1.0, 0.1),
            w: 2.0,
        };
        assert!(run_sweep_serial(&coupling_out_of_range).is_err());
    }

    #[test]
    fn csv_schema_is_stable() {
        let spec = SweepSpec::SnrGrid {
            alpha: 0.4,
            beta: 0.7,
            snr1_db: AxisSpec::new(20.0, 20.0, 1.0),
            snr2_db: AxisSpec::new(15.0, 15.0, 1.0),
            w: 2.0,
        };
        let csv = sweep_csv(&run_sweep_serial(&spec).unwrap());
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), SWEEP_CSV_HEADER);
        let row = lines.next().unwrap();
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 12);
        assert_eq!(fields[0], "20");
        assert_eq!(fields[1], "15");
        assert_eq!(fields[6], "true");
        assert!(lines.next().is_none());
    }

    #[test]
    fn region_csv_marks_both_operating_points() {
        let sc = StandardChannel::new(100.0, 31.6228, 0.4, 0.7, 2.0).unwrap();
        let rc = competitive_rates(&sc);
        let out = solve_nbs(&sc, DEFAULT_NBS_TOL).unwrap();
        let boundary = region_boundary(&sc, 16).unwrap();
        let csv = region_csv(&boundary, &rc, &out);
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# NE r1="));
        assert!(lines[1].starts_with("# NBS rho="));
        assert_eq!(lines[2], "rho,r1,r2");
        assert_eq!(lines.len(), 3 + 16);
        assert!(lines[3].starts_with("0,0,"));
        assert!(lines.last().unwrap().starts_with("1,"));
        assert!(lines.last().unwrap().ends_with(",0"));
    }
}
