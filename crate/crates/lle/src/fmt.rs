//! Fixed numeric formatting for data files.

/// `%.{digits}g` formatting: shortest of fixed and exponent notation, trailing zeros removed.
pub fn g(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let p = digits.max(1);
    let e = format!("{:.*e}", p - 1, x);
    let (mant, exp) = e.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
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

/// Fifteen significant digits, the precision used in every CSV column.
pub fn g15(x: f64) -> String {
    g(x, 15)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(g15(1.0), "1");
        assert_eq!(g15(0.1), "0.1");
        assert_eq!(g15(-2.5), "-2.5");
        assert_eq!(g15(1e-5), "1e-05");
        assert_eq!(g15(123456789012345678.0), "1.23456789012346e+17");
        assert_eq!(g15(-490.0 / 9.0), "-54.4444444444444");
        assert_eq!(g15(0.0001), "0.0001");
        assert_eq!(g(2.0f64.sqrt(), 6), "1.41421");
    }
}
