//! Deterministic significant-digit float formatting for CSV output.

/// Format `x` with up to `digits` significant digits, `%g` style: positional
/// notation in a moderate exponent range, scientific outside it, trailing
/// zeros trimmed. Pure function of the value, so output files are
/// byte-reproducible.
pub fn sig(x: f64, digits: usize) -> String {
    debug_assert!(digits >= 1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if exp < -4 || exp >= digits as i32 {
        let s = format!("{:.*e}", digits - 1, x);
        match s.split_once('e') {
            Some((mantissa, e)) => format!("{}e{}", trim_fraction(mantissa), e),
            None => s,
        }
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{:.*}", decimals, x))
    }
}

/// Ten significant digits, the convention for all emitted CSV.
pub fn sig10(x: f64) -> String {
    sig(x, 10)
}

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positional_and_trimmed() {
        assert_eq!(sig10(20.25), "20.25");
        assert_eq!(sig10(-1.0), "-1");
        assert_eq!(sig10(0.0), "0");
        assert_eq!(sig10(25921.0), "25921");
        assert_eq!(sig10(0.075_201_220_969_983_12), "0.07520122097");
    }

    #[test]
    fn scientific_outside_the_window() {
        assert_eq!(sig10(1e-5), "1e-5");
        assert_eq!(sig10(1.25e12), "1.25e12");
        assert_eq!(sig10(-3.0e-7), "-3e-7");
    }

    #[test]
    fn ten_significant_digits_survive() {
        assert_eq!(sig10(3.057706668874136), "3.057706669");
        assert_eq!(sig10(5.581223832687802), "5.581223833");
    }
}
