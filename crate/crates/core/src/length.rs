//! Exact lengths.

use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Exact nonnegative length. Spaces store edge lengths as integer ticks of a
/// common denominator and convert back to `Length` at their boundary.
pub type Length = Ratio<i64>;

pub fn int(n: i64) -> Length {
    Length::from_integer(n)
}

/// Parses `"3"`, `"1/2"`, `"0.25"` or `"-1.5"`.
pub fn parse(s: &str) -> Result<Length> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational length: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let neg = whole.starts_with('-');
        let whole_abs = whole.trim_start_matches(['-', '+']);
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 15 {
            return Err(bad());
        }
        let w: i64 = if whole_abs.is_empty() {
            0
        } else {
            whole_abs.parse().map_err(|_| bad())?
        };
        let den = 10i64.pow(frac.len() as u32);
        let f: i64 = frac.parse().map_err(|_| bad())?;
        let v = Ratio::new(w * den + f, den);
        return Ok(if neg { -v } else { v });
    }
    s.parse::<i64>().map(Ratio::from_integer).map_err(|_| bad())
}

/// Renders integers without a denominator, everything else as `n/d`.
pub fn fmt(l: &Length) -> String {
    if l.is_integer() {
        l.to_integer().to_string()
    } else {
        format!("{}/{}", l.numer(), l.denom())
    }
}

pub fn to_f64(l: &Length) -> f64 {
    *l.numer() as f64 / *l.denom() as f64
}

pub fn is_positive(l: &Length) -> bool {
    l.is_positive() && !l.is_zero()
}

/// `floor(l)` as an integer, for nonnegative `l`.
pub fn floor_u32(l: &Length) -> u32 {
    l.floor().to_integer().max(0) as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse("3").unwrap(), int(3));
        assert_eq!(parse("1/2").unwrap(), Ratio::new(1, 2));
        assert_eq!(parse("0.25").unwrap(), Ratio::new(1, 4));
        assert_eq!(parse("-1.5").unwrap(), Ratio::new(-3, 2));
        assert_eq!(parse(".5").unwrap(), Ratio::new(1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("1.").is_err());
    }

    #[test]
    fn formats() {
        assert_eq!(fmt(&int(4)), "4");
        assert_eq!(fmt(&Ratio::new(6, 4)), "3/2");
    }
}
