//! Exact rational scalars and parsing/formatting helpers.
//!
//! `Rat` is a reduced fraction with positive denominator; both invariants
//! are maintained by `num-rational` on every operation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn rat(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    Rat::new(Int::from(n), Int::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

pub fn rat_from_int(n: &Int) -> Rat {
    Rat::from_integer(n.clone())
}

/// Parses "p/q" or "p". Whitespace around the tokens is accepted.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let n: Int = num
        .parse()
        .map_err(|_| Error::Parse(format!("invalid integer `{num}`")))?;
    let d: Int = match den {
        Some(d) => d
            .parse()
            .map_err(|_| Error::Parse(format!("invalid integer `{d}`")))?,
        None => Int::one(),
    };
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{s}`")));
    }
    Ok(Rat::new(n, d))
}

/// Renders a rational as "p" when integral and "p/q" otherwise.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal expansion truncated toward zero to `places` digits.
pub fn rat_to_decimal(r: &Rat, places: usize) -> String {
    let scale = Int::from(10u32).pow(places as u32);
    let scaled = (r.numer() * &scale) / r.denom();
    let neg = scaled.is_negative();
    let abs = scaled.abs();
    let digits = abs.to_string();
    let (int_part, frac_part) = if digits.len() > places {
        let split = digits.len() - places;
        (digits[..split].to_string(), digits[split..].to_string())
    } else {
        ("0".to_string(), format!("{digits:0>places$}"))
    };
    let sign = if neg { "-" } else { "" };
    if places == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// Least common multiple of the denominators, i.e. the smallest k with
/// k*r integral for all entries.
pub fn denominator_lcm<'a, I: IntoIterator<Item = &'a Rat>>(items: I) -> Int {
    use num_integer::Integer;
    let mut l = Int::one();
    for r in items {
        l = l.lcm(r.denom());
    }
    l
}

pub fn floor_int(r: &Rat) -> Int {
    r.floor().to_integer()
}

pub fn ceil_int(r: &Rat) -> Int {
    r.ceil().to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3", "-7", "22/7", "-5/3", "0"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(&r), s);
        }
        assert_eq!(format_rat(&parse_rat("4/2").unwrap()), "2");
        assert_eq!(format_rat(&parse_rat(" 3 / 9 ").unwrap()), "1/3");
        assert_eq!(format_rat(&parse_rat("-2/-4").unwrap()), "1/2");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(rat_to_decimal(&rat(1, 3), 4), "0.3333");
        assert_eq!(rat_to_decimal(&rat(-22, 7), 3), "-3.142");
        assert_eq!(rat_to_decimal(&rat_int(5), 2), "5.00");
    }

    #[test]
    fn denominator_lcm_of_mixed_entries() {
        let v = vec![rat(1, 6), rat(3, 4), rat_int(2)];
        assert_eq!(denominator_lcm(v.iter()), Int::from(12));
    }
}
