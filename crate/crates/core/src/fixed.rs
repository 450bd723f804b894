//! Exact dyadic fixed-point scalars.
//!
//! Every value manipulated by the exact engine is a dyadic rational
//! `mant / 2^fbits`, stored in normalized form (`mant` odd, or `fbits == 0`).
//! Arithmetic on [`Fixed`] is exact; a [`Precision`] describes the `p`-bit
//! on-wire format (total bits including sign, plus fraction bits) and is the
//! only place where rounding and range checks happen. Quantization uses
//! round-to-nearest, ties to even; values that do not fit the `p`-bit range
//! are a hard error, never saturated or wrapped.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FixedError {
    #[error("fixed-point overflow: value {value} does not fit {bits} bits")]
    Overflow { value: String, bits: u32 },
    #[error("not representable as a dyadic rational: {0}")]
    NotDyadic(String),
    #[error("malformed numeric literal: {0}")]
    Malformed(String),
}

/// A dyadic rational `mant / 2^fbits`, always normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fixed {
    mant: i64,
    fbits: u32,
}

impl Fixed {
    pub const ZERO: Fixed = Fixed { mant: 0, fbits: 0 };
    pub const ONE: Fixed = Fixed { mant: 1, fbits: 0 };

    pub fn from_int(v: i64) -> Fixed {
        Fixed { mant: v, fbits: 0 }
    }

    /// `mant / 2^fbits`, normalizing so the mantissa is odd or fbits is 0.
    pub fn from_parts(mut mant: i64, mut fbits: u32) -> Fixed {
        if mant == 0 {
            return Fixed::ZERO;
        }
        while fbits > 0 && mant % 2 == 0 {
            mant /= 2;
            fbits -= 1;
        }
        Fixed { mant, fbits }
    }

    pub fn mantissa(&self) -> i64 {
        self.mant
    }

    pub fn frac_bits(&self) -> u32 {
        self.fbits
    }

    pub fn is_zero(&self) -> bool {
        self.mant == 0
    }

    pub fn is_integer(&self) -> bool {
        self.fbits == 0
    }

    /// Integer value if this scalar is an integer.
    pub fn as_int(&self) -> Option<i64> {
        (self.fbits == 0).then_some(self.mant)
    }

    pub fn to_f64(&self) -> f64 {
        self.mant as f64 / (1u64 << self.fbits.min(62)) as f64
    }

    pub fn checked_add(&self, other: &Fixed) -> Option<Fixed> {
        let f = self.fbits.max(other.fbits);
        let a = self.mant.checked_mul(1i64.checked_shl(f - self.fbits)?)?;
        let b = other.mant.checked_mul(1i64.checked_shl(f - other.fbits)?)?;
        Some(Fixed::from_parts(a.checked_add(b)?, f))
    }

    pub fn checked_sub(&self, other: &Fixed) -> Option<Fixed> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Fixed) -> Option<Fixed> {
        Some(Fixed::from_parts(
            self.mant.checked_mul(other.mant)?,
            self.fbits.checked_add(other.fbits)?,
        ))
    }

    pub fn neg(&self) -> Fixed {
        Fixed {
            mant: -self.mant,
            fbits: self.fbits,
        }
    }

    /// Parse a decimal literal (`"3"`, `"-1.5"`, `"0.25"`). The fractional
    /// part must be exactly representable as a dyadic rational.
    pub fn parse_decimal(s: &str) -> Result<Fixed, FixedError> {
        let t = s.trim();
        if t.is_empty() {
            return Err(FixedError::Malformed(s.to_string()));
        }
        let (sign, t) = match t.strip_prefix('-') {
            Some(rest) => (-1i64, rest),
            None => (1i64, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int_part, frac_part) = match t.split_once('.') {
            Some((i, f)) => (i, f),
            None => (t, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(FixedError::Malformed(s.to_string()));
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(FixedError::Malformed(s.to_string()));
        }
        let int_val: i64 = if int_part.is_empty() {
            0
        } else {
            int_part
                .parse()
                .map_err(|_| FixedError::Malformed(s.to_string()))?
        };
        // value = int_val + frac_digits / 10^k; dyadic iff frac_digits / 5^k
        // is an integer after clearing the 2^k factor.
        let k = frac_part.len() as u32;
        if k > 18 {
            return Err(FixedError::NotDyadic(s.to_string()));
        }
        let frac_num: i64 = if frac_part.is_empty() {
            0
        } else {
            frac_part
                .parse()
                .map_err(|_| FixedError::Malformed(s.to_string()))?
        };
        let pow5 = 5i64.checked_pow(k).ok_or_else(|| FixedError::NotDyadic(s.to_string()))?;
        if frac_num % pow5 != 0 {
            return Err(FixedError::NotDyadic(s.to_string()));
        }
        let frac_mant = frac_num / pow5; // value = frac_mant / 2^k
        let mant = int_val
            .checked_shl(k)
            .and_then(|v| v.checked_add(frac_mant))
            .ok_or_else(|| FixedError::Malformed(s.to_string()))?;
        Ok(Fixed::from_parts(sign * mant, k))
    }

    /// Render as an exact decimal string; round-trips through
    /// [`Fixed::parse_decimal`] bit-exactly.
    pub fn to_decimal_string(&self) -> String {
        if self.fbits == 0 {
            return self.mant.to_string();
        }
        // mant / 2^f == mant * 5^f / 10^f
        let neg = self.mant < 0;
        let mag = (self.mant as i128).unsigned_abs();
        let scaled = mag * 5u128.pow(self.fbits);
        let pow10 = 10u128.pow(self.fbits);
        let int = scaled / pow10;
        let frac = scaled % pow10;
        let mut frac_s = format!("{:0width$}", frac, width = self.fbits as usize);
        while frac_s.ends_with('0') {
            frac_s.pop();
        }
        let sign = if neg { "-" } else { "" };
        if frac_s.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac_s}")
        }
    }
}

impl std::fmt::Display for Fixed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

/// On-wire fixed-point format: `total_bits` two's-complement bits per scalar,
/// of which `frac_bits` sit below the binary point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Precision {
    pub total_bits: u32,
    pub frac_bits: u32,
}

impl Precision {
    pub fn integer(total_bits: u32) -> Precision {
        Precision {
            total_bits,
            frac_bits: 0,
        }
    }

    /// Default precision for graphs of `n` nodes: twice the id length,
    /// integer-valued. Node ids need ceil(log2 n) bits; doubling leaves
    /// headroom for small arithmetic.
    pub fn for_graph_size(n: usize) -> Precision {
        Precision::integer(2 * ceil_log2(n.max(2)))
    }

    /// Round `v` to this format (nearest, ties to even) and range-check it.
    pub fn quantize(&self, v: &Fixed) -> Result<Fixed, FixedError> {
        let q = if v.fbits <= self.frac_bits {
            *v
        } else {
            let shift = v.fbits - self.frac_bits;
            let unit = 1i64 << shift;
            let half = unit >> 1;
            let floor = v.mant.div_euclid(unit);
            let rem = v.mant.rem_euclid(unit);
            let rounded = match rem.cmp(&half) {
                std::cmp::Ordering::Less => floor,
                std::cmp::Ordering::Greater => floor + 1,
                std::cmp::Ordering::Equal => floor + (floor.rem_euclid(2)),
            };
            Fixed::from_parts(rounded, self.frac_bits)
        };
        // Range check on the mantissa at frac_bits resolution.
        let m = q.mant << (self.frac_bits - q.fbits);
        let bound = 1i64 << (self.total_bits - 1);
        if m < -bound || m >= bound {
            return Err(FixedError::Overflow {
                value: v.to_decimal_string(),
                bits: self.total_bits,
            });
        }
        Ok(q)
    }

    /// Raw two's-complement mantissa of a quantized value.
    pub fn raw_bits(&self, v: &Fixed) -> Result<u64, FixedError> {
        let q = self.quantize(v)?;
        let m = q.mant << (self.frac_bits - q.fbits);
        Ok((m as u64) & mask(self.total_bits))
    }

    /// Inverse of [`Precision::raw_bits`].
    pub fn from_raw_bits(&self, raw: u64) -> Fixed {
        let m = sign_extend(raw & mask(self.total_bits), self.total_bits);
        Fixed::from_parts(m, self.frac_bits)
    }
}

pub(crate) fn mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

fn sign_extend(raw: u64, bits: u32) -> i64 {
    let sign_bit = 1u64 << (bits - 1);
    if raw & sign_bit != 0 {
        (raw | !mask(bits)) as i64
    } else {
        raw as i64
    }
}

/// ceil(log2 n) for n >= 1.
pub fn ceil_log2(n: usize) -> u32 {
    (n.max(1) as u64).next_power_of_two().trailing_zeros()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization() {
        assert_eq!(Fixed::from_parts(4, 2), Fixed::from_int(1));
        assert_eq!(Fixed::from_parts(6, 1), Fixed::from_int(3));
        assert_eq!(Fixed::from_parts(3, 1).mantissa(), 3);
    }

    #[test]
    fn exact_arithmetic() {
        let a = Fixed::parse_decimal("1.5").unwrap();
        let b = Fixed::parse_decimal("0.25").unwrap();
        assert_eq!(a.checked_add(&b).unwrap().to_decimal_string(), "1.75");
        assert_eq!(a.checked_mul(&b).unwrap().to_decimal_string(), "0.375");
        assert_eq!(a.checked_sub(&a).unwrap(), Fixed::ZERO);
    }

    #[test]
    fn decimal_round_trip() {
        for s in ["0", "1", "-7", "1.5", "-0.125", "42.75", "0.0625"] {
            let v = Fixed::parse_decimal(s).unwrap();
            assert_eq!(Fixed::parse_decimal(&v.to_decimal_string()).unwrap(), v);
        }
    }

    #[test]
    fn non_dyadic_rejected() {
        assert!(matches!(
            Fixed::parse_decimal("0.3"),
            Err(FixedError::NotDyadic(_))
        ));
        assert!(Fixed::parse_decimal("x").is_err());
        assert!(Fixed::parse_decimal("").is_err());
    }

    #[test]
    fn quantize_rounds_to_nearest_even() {
        let p = Precision {
            total_bits: 8,
            frac_bits: 1,
        };
        // 0.25 is exactly between 0 and 0.5; ties go to even mantissa (0).
        let v = Fixed::parse_decimal("0.25").unwrap();
        assert_eq!(p.quantize(&v).unwrap(), Fixed::ZERO);
        let v = Fixed::parse_decimal("0.75").unwrap();
        assert_eq!(
            p.quantize(&v).unwrap(),
            Fixed::parse_decimal("1").unwrap()
        );
    }

    #[test]
    fn overflow_is_an_error() {
        let p = Precision::integer(4); // range [-8, 8)
        assert!(p.quantize(&Fixed::from_int(7)).is_ok());
        assert!(p.quantize(&Fixed::from_int(8)).is_err());
        assert!(p.quantize(&Fixed::from_int(-8)).is_ok());
        assert!(p.quantize(&Fixed::from_int(-9)).is_err());
    }

    #[test]
    fn raw_bits_round_trip() {
        let p = Precision {
            total_bits: 6,
            frac_bits: 2,
        };
        for m in -32..32i64 {
            let v = Fixed::from_parts(m, 2);
            let raw = p.raw_bits(&v).unwrap();
            assert_eq!(p.from_raw_bits(raw), v);
        }
    }

    #[test]
    fn default_precision_tracks_graph_size() {
        assert_eq!(Precision::for_graph_size(2).total_bits, 2);
        assert_eq!(Precision::for_graph_size(6).total_bits, 6);
        assert_eq!(Precision::for_graph_size(16).total_bits, 8);
        assert_eq!(Precision::for_graph_size(17).total_bits, 10);
    }
}
