//! Competitive (non-cooperative) operating points.
//!
//! This module produces the disagreement point of the bargaining problem in
//! two flavors:
//!
//! - [`competitive_rates`]: the closed-form rates of the frequency-flat
//!   channel, where the competitive strategy is flat power allocation and
//!   each receiver treats the other link's signal as noise.
//! - [`DiscreteGame::iterate_waterfilling`]: for a K-band discrete spectrum
//!   game, sequential round-robin best responses (water-filling against the
//!   current interference) until the allocations stop moving. Each player's
//!   best response maximizes its own sum rate given the others' power
//!   spectral densities.
//!
//! Uniqueness of the fixed point is not checked; non-convergence is reported
//! in the result rather than raised, so oscillation stays observable.

use serde::{Deserialize, Serialize};

use crate::channel::{RatePair, StandardChannel};
use crate::error::{ensure_positive, Error, Result};

const LN_2: f64 = std::f64::consts::LN_2;

/// Closed-form competitive rates of the flat channel: each link spreads full
/// power over the whole band and sees the other link as extra noise,
///
/// `r_i = (w/2) log2(1 + snr_i / (1 + coupling * snr_j))`.
pub fn competitive_rates(sc: &StandardChannel) -> RatePair {
    let half_w = 0.5 * sc.w;
    RatePair {
        r1: half_w * (sc.snr1 / (1.0 + sc.alpha * sc.snr2)).ln_1p() / LN_2,
        r2: half_w * (sc.snr2 / (1.0 + sc.beta * sc.snr1)).ln_1p() / LN_2,
    }
}

/// A K-band discrete spectrum-sharing game for N players.
///
/// Per band `k`, player `i` sees direct squared gain `direct_gain[i][k]`,
/// crosstalk `cross_gain[i][j][k]` from each other player `j`, and receiver
/// noise `noise[i][k] > 0`. Every player must spend its full power budget
/// (idle power is never rational in the competitive setting), so admissible
/// strategies are nonnegative per-band vectors summing to `power_budget[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteGame {
    direct_gain: Vec<Vec<f64>>,
    cross_gain: Vec<Vec<Vec<f64>>>,
    noise: Vec<Vec<f64>>,
    power_budget: Vec<f64>,
    band_edges: Option<Vec<f64>>,
}

/// Relative tolerance on budget conservation for admissible allocations.
pub const POWER_CONSERVATION_REL_TOL: f64 = 1e-9;

impl DiscreteGame {
    /// Validate shapes and domains and build a game.
    ///
    /// `band_edges`, when given, is metadata only: `K + 1` strictly
    /// increasing frequencies delimiting the bands.
    pub fn new(
        direct_gain: Vec<Vec<f64>>,
        cross_gain: Vec<Vec<Vec<f64>>>,
        noise: Vec<Vec<f64>>,
        power_budget: Vec<f64>,
        band_edges: Option<Vec<f64>>,
    ) -> Result<Self> {
        let n = power_budget.len();
        if n == 0 {
            return Err(Error::Dimension("game needs at least one player".into()));
        }
        let k = direct_gain.first().map_or(0, Vec::len);
        if k == 0 {
            return Err(Error::Dimension("game needs at least one band".into()));
        }
        if direct_gain.len() != n || noise.len() != n || cross_gain.len() != n {
            return Err(Error::Dimension(format!(
                "expected {n} rows in direct/cross/noise, got {}/{}/{}",
                direct_gain.len(),
                cross_gain.len(),
                noise.len()
            )));
        }
        for i in 0..n {
            if direct_gain[i].len() != k || noise[i].len() != k || cross_gain[i].len() != n {
                return Err(Error::Dimension(format!("ragged arrays for player {i}")));
            }
            for (j, cross_row) in cross_gain[i].iter().enumerate() {
                if cross_row.len() != k {
                    return Err(Error::Dimension(format!(
                        "cross_gain[{i}][{j}] has {} bands, expected {k}",
                        cross_row.len()
                    )));
                }
                if j != i {
                    for &gain in cross_row {
                        crate::error::ensure_nonnegative("cross gain", gain)?;
                    }
                }
            }
            for kk in 0..k {
                ensure_positive("direct gain", direct_gain[i][kk])?;
                ensure_positive("noise", noise[i][kk])?;
            }
            ensure_positive("power budget", power_budget[i])?;
        }
        if let Some(edges) = &band_edges {
            if edges.len() != k + 1 {
                return Err(Error::Dimension(format!(
                    "band_edges has {} entries, expected {}",
                    edges.len(),
                    k + 1
                )));
            }
            if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|p| p[1] <= p[0]) {
                return Err(Error::Dimension(
                    "band_edges must be finite and strictly increasing".into(),
                ));
            }
        }
        Ok(Self {
            direct_gain,
            cross_gain,
            noise,
            power_budget,
            band_edges,
        })
    }

    pub fn n_players(&self) -> usize {
        self.power_budget.len()
    }

    pub fn k_bands(&self) -> usize {
        self.direct_gain[0].len()
    }

    pub fn power_budget(&self) -> &[f64] {
        &self.power_budget
    }

    pub fn band_edges(&self) -> Option<&[f64]> {
        self.band_edges.as_deref()
    }

    /// Check that `alloc` is admissible for this game: matching shape,
    /// nonnegative powers, every player's budget spent exactly (within
    /// [`POWER_CONSERVATION_REL_TOL`] relative).
    pub fn validate_allocation(&self, alloc: &PowerAllocation) -> Result<()> {
        let (n, k) = (self.n_players(), self.k_bands());
        if alloc.powers.len() != n {
            return Err(Error::Dimension(format!(
                "allocation has {} players, game has {n}",
                alloc.powers.len()
            )));
        }
        for (i, row) in alloc.powers.iter().enumerate() {
            if row.len() != k {
                return Err(Error::Dimension(format!(
                    "allocation row {i} has {} bands, game has {k}",
                    row.len()
                )));
            }
            let mut total = 0.0;
            for &p in row {
                crate::error::ensure_nonnegative("allocated power", p)?;
                total += p;
            }
            let budget = self.power_budget[i];
            if ((total - budget) / budget).abs() > POWER_CONSERVATION_REL_TOL {
                return Err(Error::Domain {
                    name: "allocation total",
                    constraint: "equal to the power budget",
                    value: total,
                });
            }
        }
        Ok(())
    }

    /// Sum rate available to `player` given everyone's power distribution:
    /// the per-band log of one plus the signal-to-interference-plus-noise
    /// ratio, summed over bands.
    pub fn payoff(&self, alloc: &PowerAllocation, player: usize) -> Result<f64> {
        self.check_shape(alloc, player)?;
        Ok(self.payoff_unchecked(&alloc.powers, player))
    }

    fn check_shape(&self, alloc: &PowerAllocation, player: usize) -> Result<()> {
        let (n, k) = (self.n_players(), self.k_bands());
        if player >= n {
            return Err(Error::Dimension(format!(
                "player {player} out of range for {n}-player game"
            )));
        }
        if alloc.powers.len() != n || alloc.powers.iter().any(|row| row.len() != k) {
            return Err(Error::Dimension(
                "allocation shape does not match the game".into(),
            ));
        }
        Ok(())
    }

    fn payoff_unchecked(&self, powers: &[Vec<f64>], i: usize) -> f64 {
        let mut rate = 0.0;
        for k in 0..self.k_bands() {
            let mut interference = self.noise[i][k];
            for (j, row) in powers.iter().enumerate() {
                if j != i {
                    interference += self.cross_gain[i][j][k] * row[k];
                }
            }
            rate += (self.direct_gain[i][k] * powers[i][k] / interference).ln_1p() / LN_2;
        }
        rate
    }

    /// Water-filling best response of `player` against fixed opponents.
    ///
    /// With effective noise `N_k = (interference_k + noise_k) / direct_k`
    /// per band, the maximizer of the player's sum rate is
    /// `p_k = max(0, mu - N_k)` with the water level `mu` fixing the budget.
    /// The level is found exactly by sorting the `N_k` breakpoints rather
    /// than by an iterative search, so the result is bit-reproducible.
    pub fn waterfill_best_response(
        &self,
        player: usize,
        others: &PowerAllocation,
    ) -> Result<Vec<f64>> {
        self.check_shape(others, player)?;
        Ok(self.best_response_unchecked(&others.powers, player))
    }

    fn best_response_unchecked(&self, powers: &[Vec<f64>], i: usize) -> Vec<f64> {
        let k = self.k_bands();
        let mut n_eff = vec![0.0; k];
        for kk in 0..k {
            let mut interference = self.noise[i][kk];
            for (j, row) in powers.iter().enumerate() {
                if j != i {
                    interference += self.cross_gain[i][j][kk] * row[kk];
                }
            }
            n_eff[kk] = interference / self.direct_gain[i][kk];
        }
        waterfill_exact(&n_eff, self.power_budget[i])
    }

    /// Sequential round-robin iterative water-filling from a flat start.
    ///
    /// One round updates every player in index order against the freshest
    /// allocation. After each round the residual is the largest per-band
    /// power change seen in that round; the iteration stops when it drops
    /// to `tol` or after `max_iters` rounds (reported, not an error).
    pub fn iterate_waterfilling(&self, tol: f64, max_iters: usize) -> Result<EquilibriumResult> {
        ensure_positive("tolerance", tol)?;
        let n = self.n_players();
        let mut alloc = PowerAllocation::flat(self);
        let mut iterations = 0;
        let mut converged = false;
        let mut residual = f64::INFINITY;

        for round in 1..=max_iters {
            let mut max_delta = 0.0_f64;
            for i in 0..n {
                let fresh = self.best_response_unchecked(&alloc.powers, i);
                for (new_p, old_p) in fresh.iter().zip(&alloc.powers[i]) {
                    max_delta = max_delta.max((new_p - old_p).abs());
                }
                alloc.powers[i] = fresh;
            }
            iterations = round;
            residual = max_delta;
            if max_delta <= tol {
                converged = true;
                break;
            }
        }

        let rates = (0..n)
            .map(|i| self.payoff_unchecked(&alloc.powers, i))
            .collect();
        Ok(EquilibriumResult {
            allocation: alloc,
            rates,
            iterations,
            converged,
            residual,
        })
    }
}

/// Exact water level by breakpoint sort: activate bands in order of
/// increasing effective noise until the next band would sit above water.
fn waterfill_exact(n_eff: &[f64], budget: f64) -> Vec<f64> {
    let k = n_eff.len();
    if k == 1 {
        return vec![budget];
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| n_eff[a].total_cmp(&n_eff[b]));

    let mut prefix = 0.0;
    let mut level = 0.0;
    for (m, &idx) in order.iter().enumerate() {
        prefix += n_eff[idx];
        let candidate = (budget + prefix) / (m + 1) as f64;
        match order.get(m + 1) {
            Some(&next) if candidate > n_eff[next] => continue,
            _ => {
                level = candidate;
                break;
            }
        }
    }
    n_eff.iter().map(|&n| (level - n).max(0.0)).collect()
}

/// Per-player per-band transmit powers.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PowerAllocation {
    /// `powers[i][k]` is the power player `i` spends in band `k`, watts.
    pub powers: Vec<Vec<f64>>,
}

impl PowerAllocation {
    /// Every budget spread evenly over the bands.
    pub fn flat(game: &DiscreteGame) -> Self {
        let k = game.k_bands();
        Self {
            powers: game
                .power_budget
                .iter()
                .map(|&p| vec![p / k as f64; k])
                .collect(),
        }
    }
}

/// Outcome of iterative water-filling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumResult {
    pub allocation: PowerAllocation,
    /// Per-player sum rates at the final allocation.
    pub rates: Vec<f64>,
    /// Rounds actually executed.
    pub iterations: usize,
    pub converged: bool,
    /// Largest per-band power change during the last round.
    pub residual: f64,
}

/// JSON game descriptor:
/// `{"k": 4, "players": 2, "direct": [[...]], "cross": [[[...]]],
///   "noise": [[...]], "power": [P1, P2]}` with optional `"band_edges"`.
#[derive(Debug, Clone, Deserialize)]
pub struct GameDescriptor {
    pub k: usize,
    pub players: usize,
    pub direct: Vec<Vec<f64>>,
    pub cross: Vec<Vec<Vec<f64>>>,
    pub noise: Vec<Vec<f64>>,
    pub power: Vec<f64>,
    #[serde(default)]
    pub band_edges: Option<Vec<f64>>,
}

impl TryFrom<GameDescriptor> for DiscreteGame {
    type Error = Error;

    fn try_from(d: GameDescriptor) -> Result<Self> {
        if d.power.len() != d.players {
            return Err(Error::Dimension(format!(
                "descriptor says {} players but lists {} budgets",
                d.players,
                d.power.len()
            )));
        }
        if d.direct.iter().any(|row| row.len() != d.k) {
            return Err(Error::Dimension(format!(
                "descriptor says k={} but direct rows disagree",
                d.k
            )));
        }
        DiscreteGame::new(d.direct, d.cross, d.noise, d.power, d.band_edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn demo_channel() -> StandardChannel {
        StandardChannel::new(100.0, 31.6228, 0.4, 0.7, 2.0).unwrap()
    }

    /// Frequency-flat two-player game in standard-form units: unit direct
    /// gains, couplings alpha/beta, unit per-band noise.
    fn flat_game(k: usize, p1: f64, p2: f64, alpha: f64, beta: f64) -> DiscreteGame {
        DiscreteGame::new(
            vec![vec![1.0; k]; 2],
            vec![
                vec![vec![0.0; k], vec![alpha; k]],
                vec![vec![beta; k], vec![0.0; k]],
            ],
            vec![vec![1.0; k]; 2],
            vec![p1, p2],
            None,
        )
        .unwrap()
    }

    /// Random admissible per-band vector: exponential spacings scaled onto
    /// the budget simplex.
    fn random_admissible(rng: &mut ChaCha8Rng, k: usize, budget: f64) -> Vec<f64> {
        let raw: Vec<f64> = (0..k).map(|_| -rng.gen::<f64>().max(1e-12).ln()).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x * budget / total).collect()
    }

    #[test]
    fn no_interference_is_single_link_rate() {
        let sc = StandardChannel::new(7.5, 7.5, 0.0, 0.0, 2.0).unwrap();
        let rc = competitive_rates(&sc);
        let expected = 8.5_f64.log2();
        assert!((rc.r1 - expected).abs() < 1e-12);
        assert!((rc.r2 - expected).abs() < 1e-12);
    }

    #[test]
    fn demo_channel_competitive_rates() {
        // log2(1 + 100/13.64912) and log2(1 + 31.6228/71)
        let rc = competitive_rates(&demo_channel());
        assert!((rc.r1 - 3.057706668874136).abs() < 1e-12, "r1 = {}", rc.r1);
        assert!((rc.r2 - 0.5314603644961617).abs() < 1e-12, "r2 = {}", rc.r2);
    }

    #[test]
    fn vanishing_snr_gives_vanishing_rate() {
        let sc = StandardChannel::new(1e-13, 31.6228, 0.4, 0.7, 2.0).unwrap();
        let rc = competitive_rates(&sc);
        assert!(rc.r1 > 0.0 && rc.r1 < 1e-12);
    }

    #[test]
    fn payoff_single_band_single_player() {
        let g = DiscreteGame::new(
            vec![vec![1.0]],
            vec![vec![vec![0.0]]],
            vec![vec![1.0]],
            vec![1.0],
            None,
        )
        .unwrap();
        let alloc = PowerAllocation {
            powers: vec![vec![1.0]],
        };
        assert!(
            (g.payoff(&alloc, 0).unwrap() - 1.0).abs() < 1e-15,
            "log2(2)"
        );
    }

    #[test]
    fn payoff_zero_power_is_zero() {
        let g = flat_game(3, 1.0, 1.0, 0.4, 0.7);
        let alloc = PowerAllocation {
            powers: vec![vec![0.0; 3], vec![1.0 / 3.0; 3]],
        };
        assert_eq!(g.payoff(&alloc, 0).unwrap(), 0.0);
    }

    #[test]
    fn payoff_rejects_shape_mismatch() {
        let g = flat_game(3, 1.0, 1.0, 0.4, 0.7);
        let alloc = PowerAllocation {
            powers: vec![vec![0.5; 2], vec![0.5; 2]],
        };
        assert!(g.payoff(&alloc, 0).is_err());
        let ok = PowerAllocation::flat(&g);
        assert!(g.payoff(&ok, 5).is_err());
    }

    #[test]
    fn flat_allocation_matches_closed_form() {
        // A K-band flat game is K independent copies of the flat channel,
        // so its payoff equals the closed form at the per-band SNRs scaled
        // by the number of bands.
        let k = 2;
        let (snr1, snr2, alpha, beta) = (100.0, 31.6228, 0.4, 0.7);
        let g = flat_game(k, snr1 * k as f64, snr2 * k as f64, alpha, beta);
        let alloc = PowerAllocation::flat(&g);
        let per_band = StandardChannel::new(snr1, snr2, alpha, beta, 2.0).unwrap();
        let rc = competitive_rates(&per_band);
        let c1 = g.payoff(&alloc, 0).unwrap();
        let c2 = g.payoff(&alloc, 1).unwrap();
        assert!((c1 - k as f64 * rc.r1).abs() < 1e-12, "{c1}");
        assert!((c2 - k as f64 * rc.r2).abs() < 1e-12, "{c2}");
    }

    #[test]
    fn waterfill_single_band_takes_everything() {
        let g = flat_game(1, 3.5, 1.0, 0.2, 0.2);
        let others = PowerAllocation::flat(&g);
        let p = g.waterfill_best_response(0, &others).unwrap();
        assert_eq!(p, vec![3.5]);
    }

    #[test]
    fn waterfill_equal_noise_splits_evenly() {
        let g = flat_game(4, 2.0, 2.0, 0.3, 0.3);
        let others = PowerAllocation::flat(&g);
        let p = g.waterfill_best_response(0, &others).unwrap();
        for &x in &p {
            assert!((x - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn waterfill_breakpoints_dry_out_costly_bands() {
        // Effective noises (1, 2, 10) and unit budget put the water level
        // exactly at 2: band one gets everything, bands two and three stay
        // dry.
        let g = DiscreteGame::new(
            vec![vec![1.0, 1.0, 1.0]],
            vec![vec![vec![0.0; 3]]],
            vec![vec![1.0, 2.0, 10.0]],
            vec![1.0],
            None,
        )
        .unwrap();
        let others = PowerAllocation::flat(&g);
        let p = g.waterfill_best_response(0, &others).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-15);
        assert_eq!(p[1], 0.0);
        assert_eq!(p[2], 0.0);
    }

    #[test]
    fn best_response_dominates_random_allocations() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..5 {
            let k = rng.gen_range(2..=4);
            let g = DiscreteGame::new(
                vec![
                    (0..k).map(|_| rng.gen_range(0.2..4.0)).collect(),
                    (0..k).map(|_| rng.gen_range(0.2..4.0)).collect(),
                ],
                vec![
                    vec![
                        vec![0.0; k],
                        (0..k).map(|_| rng.gen_range(0.0..1.5)).collect(),
                    ],
                    vec![
                        (0..k).map(|_| rng.gen_range(0.0..1.5)).collect(),
                        vec![0.0; k],
                    ],
                ],
                vec![
                    (0..k).map(|_| rng.gen_range(0.1..2.0)).collect(),
                    (0..k).map(|_| rng.gen_range(0.1..2.0)).collect(),
                ],
                vec![rng.gen_range(0.5..10.0), rng.gen_range(0.5..10.0)],
                None,
            )
            .unwrap();
            let mut others = PowerAllocation::flat(&g);
            others.powers[1] = random_admissible(&mut rng, k, g.power_budget()[1]);

            let best = g.waterfill_best_response(0, &others).unwrap();
            let mut candidate = others.clone();
            candidate.powers[0] = best;
            let best_payoff = g.payoff(&candidate, 0).unwrap();

            for _ in 0..100_000 {
                candidate.powers[0] = random_admissible(&mut rng, k, g.power_budget()[0]);
                let payoff = g.payoff(&candidate, 0).unwrap();
                assert!(
                    best_payoff >= payoff - 1e-9,
                    "random allocation beat water-filling: {payoff} > {best_payoff}"
                );
            }
        }
    }

    #[test]
    fn flat_game_converges_immediately_to_closed_form() {
        let k = 4;
        let (snr1, snr2, alpha, beta) = (100.0, 31.6228, 0.4, 0.7);
        let g = flat_game(k, snr1 * k as f64, snr2 * k as f64, alpha, beta);
        let eq = g.iterate_waterfilling(1e-10, 100).unwrap();
        assert!(eq.converged);
        assert_eq!(eq.iterations, 1, "flat start is already the fixed point");
        let rc = competitive_rates(&StandardChannel::new(snr1, snr2, alpha, beta, 2.0).unwrap());
        assert!((eq.rates[0] - k as f64 * rc.r1).abs() < 1e-6);
        assert!((eq.rates[1] - k as f64 * rc.r2).abs() < 1e-6);
    }

    #[test]
    fn decoupled_game_waterfills_in_one_round() {
        // No crosstalk: each player solves a private water-filling problem.
        let mut rng = ChaCha8Rng::seed_from_u64(311);
        let k = 5;
        let noise: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..k).map(|_| rng.gen_range(0.1..4.0)).collect())
            .collect();
        let g = DiscreteGame::new(
            vec![vec![1.0; k]; 2],
            vec![
                vec![vec![0.0; k], vec![0.0; k]],
                vec![vec![0.0; k], vec![0.0; k]],
            ],
            noise.clone(),
            vec![3.0, 1.2],
            None,
        )
        .unwrap();
        let eq = g.iterate_waterfilling(1e-12, 100).unwrap();
        assert!(eq.converged);
        assert!(eq.iterations <= 2);
        // Level condition: active bands share one level, dry bands sit above.
        for (powers, noise_row) in eq.allocation.powers.iter().zip(&noise) {
            let level = powers
                .iter()
                .zip(noise_row)
                .filter(|(p, _)| **p > 0.0)
                .map(|(p, n)| p + n)
                .fold(f64::NEG_INFINITY, f64::max);
            for (p, n) in powers.iter().zip(noise_row) {
                if *p > 0.0 {
                    assert!((p + n - level).abs() < 1e-9, "uneven water level");
                } else {
                    assert!(*n >= level - 1e-9, "dry band below the water level");
                }
            }
        }
    }

    #[test]
    fn single_band_converges_immediately() {
        let g = flat_game(1, 2.0, 3.0, 0.4, 0.7);
        let eq = g.iterate_waterfilling(1e-12, 10).unwrap();
        assert!(eq.converged);
        assert_eq!(eq.iterations, 1);
        assert_eq!(eq.allocation.powers[0], vec![2.0]);
        assert_eq!(eq.allocation.powers[1], vec![3.0]);
        let rc = competitive_rates(&StandardChannel::new(2.0, 3.0, 0.4, 0.7, 2.0).unwrap());
        assert!((eq.rates[0] - rc.r1).abs() < 1e-12);
        assert!((eq.rates[1] - rc.r2).abs() < 1e-12);
    }

    #[test]
    fn converged_allocation_is_a_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(977);
        for _ in 0..20 {
            let k = rng.gen_range(2..=4);
            let g = DiscreteGame::new(
                vec![
                    (0..k).map(|_| rng.gen_range(0.3..3.0)).collect(),
                    (0..k).map(|_| rng.gen_range(0.3..3.0)).collect(),
                ],
                vec![
                    vec![
                        vec![0.0; k],
                        (0..k).map(|_| rng.gen_range(0.0..0.8)).collect(),
                    ],
                    vec![
                        (0..k).map(|_| rng.gen_range(0.0..0.8)).collect(),
                        vec![0.0; k],
                    ],
                ],
                vec![
                    (0..k).map(|_| rng.gen_range(0.2..2.0)).collect(),
                    (0..k).map(|_| rng.gen_range(0.2..2.0)).collect(),
                ],
                vec![rng.gen_range(0.5..5.0), rng.gen_range(0.5..5.0)],
                None,
            )
            .unwrap();
            let tol = 1e-11;
            let eq = g.iterate_waterfilling(tol, 500).unwrap();
            assert!(eq.converged, "moderate coupling should converge");
            assert!(eq.residual <= tol);
            g.validate_allocation(&eq.allocation).unwrap();

            // Re-running a best response moves no band by more than tol and
            // no rate by more than 1e-8.
            for i in 0..2 {
                let again = g.waterfill_best_response(i, &eq.allocation).unwrap();
                for (new_p, old_p) in again.iter().zip(&eq.allocation.powers[i]) {
                    assert!((new_p - old_p).abs() <= tol * 10.0);
                }
                let mut moved = eq.allocation.clone();
                moved.powers[i] = again;
                let rate = g.payoff(&moved, i).unwrap();
                assert!((rate - eq.rates[i]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn non_convergence_is_reported_not_raised() {
        // Strong asymmetric coupling with uneven noise needs more than one
        // round; capping the rounds must surface converged = false.
        let g = DiscreteGame::new(
            vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            vec![
                vec![vec![0.0, 0.0], vec![2.5, 0.1]],
                vec![vec![0.1, 2.5], vec![0.0, 0.0]],
            ],
            vec![vec![1.0, 0.05], vec![0.05, 1.0]],
            vec![4.0, 4.0],
            None,
        )
        .unwrap();
        let capped = g.iterate_waterfilling(1e-12, 1).unwrap();
        assert!(!capped.converged);
        assert!(capped.residual > 1e-12);
        let free = g.iterate_waterfilling(1e-12, 500).unwrap();
        assert!(free.converged);
    }

    #[test]
    fn power_conservation_holds_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(555);
        for _ in 0..30 {
            let k = rng.gen_range(1..=6);
            let g = flat_game(
                k,
                rng.gen_range(0.1..20.0),
                rng.gen_range(0.1..20.0),
                rng.gen_range(0.0..1.0),
                rng.gen_range(0.0..1.0),
            );
            let eq = g.iterate_waterfilling(1e-10, 200).unwrap();
            g.validate_allocation(&eq.allocation).unwrap();
            for (i, row) in eq.allocation.powers.iter().enumerate() {
                let total: f64 = row.iter().sum();
                let budget = g.power_budget()[i];
                assert!(((total - budget) / budget).abs() < 1e-9);
                assert!(row.iter().all(|&p| p >= 0.0));
            }
        }
    }

    #[test]
    fn rejects_invalid_games() {
        assert!(DiscreteGame::new(vec![], vec![], vec![], vec![], None).is_err());
        // zero noise
        assert!(DiscreteGame::new(
            vec![vec![1.0]],
            vec![vec![vec![0.0]]],
            vec![vec![0.0]],
            vec![1.0],
            None,
        )
        .is_err());
        // zero direct gain
        assert!(DiscreteGame::new(
            vec![vec![0.0]],
            vec![vec![vec![0.0]]],
            vec![vec![1.0]],
            vec![1.0],
            None,
        )
        .is_err());
        // band edges not increasing
        assert!(DiscreteGame::new(
            vec![vec![1.0, 1.0]],
            vec![vec![vec![0.0, 0.0]]],
            vec![vec![1.0, 1.0]],
            vec![1.0],
            Some(vec![0.0, 2.0, 1.0]),
        )
        .is_err());
    }

    #[test]
    fn game_descriptor_round_trip() {
        let json = r#"{
            "k": 2, "players": 2,
            "direct": [[1.0, 1.0], [1.0, 1.0]],
            "cross": [[[0.0, 0.0], [0.4, 0.4]], [[0.7, 0.7], [0.0, 0.0]]],
            "noise": [[1.0, 1.0], [1.0, 1.0]],
            "power": [200.0, 63.2456]
        }"#;
        let d: GameDescriptor = serde_json::from_str(json).unwrap();
        let g = DiscreteGame::try_from(d).unwrap();
        assert_eq!(g.n_players(), 2);
        assert_eq!(g.k_bands(), 2);
        let eq = g.iterate_waterfilling(1e-10, 100).unwrap();
        assert!(eq.converged);
    }

    #[test]
    fn descriptor_rejects_inconsistent_counts() {
        let json = r#"{
            "k": 2, "players": 3,
            "direct": [[1.0, 1.0], [1.0, 1.0]],
            "cross": [[[0.0, 0.0], [0.4, 0.4]], [[0.7, 0.7], [0.0, 0.0]]],
            "noise": [[1.0, 1.0], [1.0, 1.0]],
            "power": [200.0, 63.2456]
        }"#;
        let d: GameDescriptor = serde_json::from_str(json).unwrap();
        assert!(DiscreteGame::try_from(d).is_err());
    }
}
