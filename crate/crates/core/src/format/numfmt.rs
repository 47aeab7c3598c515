//! `%g`-style float rendering.

/// Formats `x` with `digits` significant digits the way C's `%.{digits}g`
/// does: fixed notation for decimal exponents in `-4..digits`, scientific
/// otherwise, trailing zeros removed, exponent with at least two digits.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    assert!(digits >= 1, "need at least one significant digit");
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn matches_printf() {
        assert_eq!(fmt_sig(0.5, 17), "0.5");
        assert_eq!(fmt_sig(0.1, 17), "0.10000000000000001");
        assert_eq!(fmt_sig(0.1, 9), "0.1");
        assert_eq!(fmt_sig(1.0, 9), "1");
        assert_eq!(fmt_sig(100.0, 9), "100");
        assert_eq!(fmt_sig(1e-5, 9), "1e-05");
        assert_eq!(fmt_sig(0.0001, 9), "0.0001");
        assert_eq!(fmt_sig(123456789.0, 9), "123456789");
        assert_eq!(fmt_sig(1234567890.0, 9), "1.23456789e+09");
        assert_eq!(fmt_sig(-3.4641016151377544, 9), "-3.46410162");
        assert_eq!(fmt_sig(6.0 / 7.0, 12), "0.857142857143");
        assert_eq!(fmt_sig(9.9999999999, 3), "10");
        assert_eq!(fmt_sig(0.000099999, 2), "0.0001");
        assert_eq!(fmt_sig(2.5e-300, 17), "2.5e-300");
        assert_eq!(fmt_sig(f64::INFINITY, 9), "inf");
        assert_eq!(fmt_sig(0.0, 9), "0");
    }

    proptest! {
        #[test]
        fn seventeen_digits_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
            prop_assert_eq!(fmt_sig(x, 17).parse::<f64>().unwrap(), x);
        }
    }
}
