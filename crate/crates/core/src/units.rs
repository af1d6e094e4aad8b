//! dB / linear power-ratio conversions.
//!
//! SNRs are quoted in dB on the command line and in sweep axes, while every
//! rate formula wants linear ratios. Power semantics throughout: 10*log10.

use crate::error::{ensure_positive, Result};

/// Convert a power quantity in dB to a linear ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Convert a linear power ratio to dB. Rejects nonpositive input.
pub fn linear_to_db(linear: f64) -> Result<f64> {
    ensure_positive("linear ratio", linear)?;
    Ok(10.0 * linear.log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn zero_db_is_unity() {
        assert_eq!(db_to_linear(0.0), 1.0);
    }

    #[test]
    fn twenty_db_is_hundred() {
        assert!((db_to_linear(20.0) - 100.0).abs() < 1e-12);
    }

    #[test]
    fn fifteen_db() {
        // 10^1.5
        assert!((db_to_linear(15.0) - 31.622776601683793).abs() < 1e-4);
        assert!((db_to_linear(15.0) - 31.622776601683793).abs() < 1e-12);
    }

    #[test]
    fn round_trip_over_sixty_db_span() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let db = rng.gen_range(-60.0..=60.0);
            let back = linear_to_db(db_to_linear(db)).unwrap();
            assert!(
                (back - db).abs() < 1e-10,
                "round trip drifted: {db} -> {back}"
            );
        }
    }

    #[test]
    fn rejects_nonpositive_linear() {
        assert!(linear_to_db(0.0).is_err());
        assert!(linear_to_db(-3.0).is_err());
        assert!(linear_to_db(f64::NAN).is_err());
    }
}
