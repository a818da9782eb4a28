//! Fixed 9-significant-digit number formatting, independent of locale.

pub const SIG_DIGITS: usize = 9;

/// `%.9g`-style text: fixed notation for exponents in [-5, 9), scientific
/// otherwise; trailing zeros dropped.  Non-finite values print as `nan`,
/// `inf`, `-inf`.
pub fn fmt9(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    // the exponent after rounding to 9 digits, so 999999999.7 goes scientific
    let sci = format!("{:.*e}", SIG_DIGITS - 1, v);
    let (mant, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, v))
    } else {
        let m = trim_zeros(mant.to_string());
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".into()
    } else {
        t.to_string()
    }
}

/// The value `fmt9` prints, as a float (for JSON output).
pub fn round9(v: f64) -> f64 {
    if v.is_finite() {
        fmt9(v).parse().expect("fmt9 output parses")
    } else {
        v
    }
}

pub fn fmt9_opt(v: Option<f64>) -> String {
    v.map(fmt9).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_and_scientific() {
        assert_eq!(fmt9(0.0), "0");
        assert_eq!(fmt9(-0.0), "0");
        assert_eq!(fmt9(1.5), "1.5");
        assert_eq!(fmt9(std::f64::consts::PI), "3.14159265");
        assert_eq!(fmt9(-2.0 / 3.0), "-0.666666667");
        assert_eq!(fmt9(41.569219381653056), "41.5692194");
        assert_eq!(fmt9(123456789.0), "123456789");
        assert_eq!(fmt9(1234567890.0), "1.23456789e+09");
        assert_eq!(fmt9(1e-5), "0.00001");
        assert_eq!(fmt9(1.25e-7), "1.25e-07");
        assert_eq!(fmt9(999999999.7), "1e+09");
        assert_eq!(fmt9(f64::NAN), "nan");
        assert_eq!(fmt9(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn extreme_exponents_and_rounding() {
        assert_eq!(fmt9(-1e-300), "-1e-300");
        assert_eq!(round9(0.1 + 0.2), 0.3);
    }
}
