//! Decimal rendering and printed-digit comparison helpers.
//!
//! Table output is plain decimal (no scientific notation) rounded
//! half-even to a significant-digit count; reference comparisons are done
//! in units of the last printed digit.

use rug::{float::Round, ops::Pow, Float, Integer, Rational};

/// Render `x` in plain decimal with `sig` significant digits, round half-even.
pub fn to_decimal_sig(x: &Float, sig: usize) -> String {
    assert!(sig > 0);
    if x.is_zero() {
        return "0".to_string();
    }
    let (neg, digits, exp) = x.to_sign_string_exp_round(10, Some(sig), Round::Nearest);
    // MPFR convention: value = ±0.digits × 10^exp.
    let exp = exp.expect("finite nonzero float has an exponent");
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    if exp <= 0 {
        s.push_str("0.");
        for _ in 0..(-exp) {
            s.push('0');
        }
        s.push_str(&digits);
    } else if (exp as usize) >= digits.len() {
        s.push_str(&digits);
        for _ in 0..(exp as usize - digits.len()) {
            s.push('0');
        }
    } else {
        let (int_part, frac_part) = digits.split_at(exp as usize);
        s.push_str(int_part);
        s.push('.');
        s.push_str(frac_part);
    }
    s
}

/// Render with a fixed number of digits after the decimal point.
pub fn to_decimal_places(x: &Float, places: usize) -> String {
    let scale = Rational::from((Integer::from(10).pow(places as u32), Integer::from(1)));
    let prec = x.prec() + 32;
    let scaled = Float::with_val(prec, x * Float::with_val(prec, &scale));
    let units = scaled.to_integer_round(Round::Nearest).unwrap().0;
    let neg = units < 0;
    let mag = units.abs().to_string();
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    if places == 0 {
        s.push_str(&mag);
        return s;
    }
    if mag.len() <= places {
        s.push_str("0.");
        for _ in 0..(places - mag.len()) {
            s.push('0');
        }
        s.push_str(&mag);
    } else {
        let (int_part, frac_part) = mag.split_at(mag.len() - places);
        s.push_str(int_part);
        s.push('.');
        s.push_str(frac_part);
    }
    s
}

/// A reference decimal string decomposed for last-digit comparisons.
#[derive(Debug, Clone)]
pub struct PrintedValue {
    /// Signed integer reading of the digit string (decimal point removed).
    pub units: Integer,
    /// Power of ten of the last printed digit.
    pub last_place: i32,
    /// Number of significant digits printed.
    pub sig_digits: usize,
}

impl PrintedValue {
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s.is_empty() {
            return None;
        }
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let mut digits = String::new();
        let mut last_place = 0i32;
        let mut seen_point = false;
        for c in body.chars() {
            match c {
                '0'..='9' => {
                    digits.push(c);
                    if seen_point {
                        last_place -= 1;
                    }
                }
                '.' if !seen_point => seen_point = true,
                _ => return None,
            }
        }
        if digits.is_empty() {
            return None;
        }
        let mut units = Integer::from_str_radix(&digits, 10).ok()?;
        if neg {
            units = -units;
        }
        let sig = digits.trim_start_matches('0').len().max(1);
        Some(Self {
            units,
            last_place,
            sig_digits: sig,
        })
    }

    /// Exact rational value of the printed string.
    pub fn value(&self) -> Rational {
        let scale = Integer::from(10).pow(self.last_place.unsigned_abs());
        if self.last_place >= 0 {
            Rational::from(self.units.clone() * scale)
        } else {
            Rational::from((self.units.clone(), scale))
        }
    }

    /// Distance from `x` in units of the last printed digit.
    pub fn distance_in_last_place(&self, x: &Float) -> Integer {
        let prec = x.prec() + 64;
        let scale = Integer::from(10).pow(self.last_place.unsigned_abs());
        let scaled = if self.last_place >= 0 {
            Float::with_val(prec, x / Float::with_val(prec, &scale))
        } else {
            Float::with_val(prec, x * Float::with_val(prec, &scale))
        };
        let rounded = scaled.to_integer_round(Round::Nearest).unwrap().0;
        Integer::from(&rounded - &self.units).abs()
    }
}

/// True when `x`, rounded to the printed length, matches the reference to
/// ±1 in the last printed digit.
pub fn agrees_with_printed(x: &Float, printed: &str) -> bool {
    match PrintedValue::parse(printed) {
        Some(p) => p.distance_in_last_place(x) <= 1u32,
        None => false,
    }
}

/// Parse a plain or scientific decimal string at the given binary precision.
pub fn parse_decimal(s: &str, prec_bits: u32) -> Option<Float> {
    Float::parse(s).ok().map(|v| Float::with_val(prec_bits, v))
}

/// Parse a plain decimal string into an exact rational ("0.05" -> 1/20).
pub fn parse_decimal_rational(s: &str) -> Option<Rational> {
    PrintedValue::parse(s).map(|p| p.value()).or_else(|| {
        // fall back for strings like "-3" already handled, or "1e-3"
        s.parse::<Rational>().ok()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(v: f64) -> Float {
        Float::with_val(200, v)
    }

    #[test]
    fn plain_decimal_rendering() {
        assert_eq!(to_decimal_sig(&f(1.5), 3), "1.50");
        assert_eq!(to_decimal_sig(&f(0.5), 1), "0.5");
        assert_eq!(to_decimal_sig(&f(-13.85), 4), "-13.85");
        assert_eq!(to_decimal_sig(&f(0.0), 5), "0");
        assert_eq!(to_decimal_sig(&f(1234.0), 2), "1200");
        assert_eq!(to_decimal_sig(&f(0.00125), 2), "0.0013");
    }

    #[test]
    fn fixed_places_rendering() {
        assert_eq!(to_decimal_places(&f(0.5), 1), "0.5");
        assert_eq!(to_decimal_places(&f(1.25), 4), "1.2500");
        assert_eq!(to_decimal_places(&f(-0.004), 2), "0.00");
        assert_eq!(to_decimal_places(&f(21.0), 0), "21");
    }

    #[test]
    fn round_half_even() {
        // 1.25 with 2 sig digits: ties-to-even gives 1.2
        let x = Float::with_val(200, Rational::from((5, 4)));
        assert_eq!(to_decimal_sig(&x, 2), "1.2");
        let y = Float::with_val(200, Rational::from((7, 4))); // 1.75 -> 1.8
        assert_eq!(to_decimal_sig(&y, 2), "1.8");
    }

    #[test]
    fn printed_comparison() {
        let x = f(1.970246841);
        assert!(agrees_with_printed(&x, "1.970246841"));
        assert!(agrees_with_printed(&x, "1.970246840"));
        assert!(agrees_with_printed(&x, "1.970246842"));
        assert!(!agrees_with_printed(&x, "1.970246843"));
        // rounding to 7 significant digits gives 1.970247 exactly
        assert!(agrees_with_printed(&x, "1.970247"));
        assert!(!agrees_with_printed(&x, "1.970249"));
        assert!(agrees_with_printed(&x, "1.9702468"));
    }

    #[test]
    fn printed_parse_value() {
        let p = PrintedValue::parse("0.05").unwrap();
        assert_eq!(p.value(), Rational::from((1, 20)));
        assert_eq!(p.last_place, -2);
        let n = PrintedValue::parse("-1.5").unwrap();
        assert_eq!(n.value(), Rational::from((-3, 2)));
        assert_eq!(PrintedValue::parse("13.85").unwrap().sig_digits, 4);
    }
}
