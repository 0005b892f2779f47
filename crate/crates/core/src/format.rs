//! Fixed-precision number rendering shared by every report writer.

/// Significant digits used for all printed numbers.
pub const SIG_DIGITS: usize = 12;

/// Formats `x` with `digits` significant digits in the style of C's `%g`:
/// fixed notation for moderate exponents, scientific otherwise, trailing
/// zeros trimmed.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    // Round first so the exponent reflects carries (9.99..e2 -> 1e3).
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        format!("{mantissa}e{exp}")
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// [`fmt_sig`] with the crate-wide precision.
pub fn fmt12(x: f64) -> String {
    fmt_sig(x, SIG_DIGITS)
}

/// Rounds `x` to the crate-wide precision so that serialized JSON numbers
/// agree with the text renderings.
pub fn round12(x: f64) -> f64 {
    fmt12(x).parse().unwrap_or(x)
}

/// `serialize_with` adapter applying [`round12`].
pub fn ser_round<S: serde::Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round12(*v))
}

/// [`ser_round`] over a vector.
pub fn ser_round_vec<S: serde::Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| round12(*x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integers_and_simple_fractions() {
        assert_eq!(fmt12(1.0), "1");
        assert_eq!(fmt12(0.0), "0");
        assert_eq!(fmt12(-0.5), "-0.5");
        assert_eq!(fmt12(-2.0 / 9.0), "-0.222222222222");
        assert_eq!(fmt12(-0.03125), "-0.03125");
    }

    #[test]
    fn exponent_switch() {
        assert_eq!(fmt12(1.5e-7), "1.5e-7");
        assert_eq!(fmt12(2.5e13), "2.5e13");
        assert_eq!(fmt12(123456.0), "123456");
        assert_eq!(fmt12(1.25e-4), "0.000125");
        assert_eq!(fmt12(1.25e-5), "1.25e-5");
    }

    #[test]
    fn rounding_carry() {
        assert_eq!(fmt_sig(9.9999999999999, 12), "10");
        assert_eq!(round12(0.1 + 0.2), 0.3);
    }
}
