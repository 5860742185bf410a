//! Integer frequencies.
//!
//! The inductive construction pushes frequencies far beyond 64 bits (at matrix
//! size 128 the dyadic placement reaches `2^507`), so frequencies are
//! arbitrary-precision integers everywhere.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Freq = BigInt;

/// Largest magnitude serialised as a JSON number (integers above this are not
/// exactly representable as IEEE doubles and are written as decimal strings).
const JSON_SAFE_INTEGER: i64 = (1 << 53) - 1;

pub fn pow2(k: u64) -> Freq {
    Freq::one() << k
}

/// `m mod modulus` as a machine index.
pub fn residue(m: &Freq, modulus: usize) -> usize {
    m.mod_floor(&Freq::from(modulus))
        .to_usize()
        .expect("residue fits in usize")
}

/// `num / den` rounded to the nearest double, without overflowing on huge
/// operands.
pub fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    assert!(!den.is_zero(), "zero denominator");
    let bits = num.bits().max(den.bits());
    if bits <= 1000 {
        return num.to_f64().unwrap() / den.to_f64().unwrap();
    }
    let shift = bits - 900;
    let n = num >> shift;
    let d = den >> shift;
    if d.is_zero() {
        return f64::INFINITY.copysign(if num.sign() == Sign::Minus { -1.0 } else { 1.0 });
    }
    n.to_f64().unwrap() / d.to_f64().unwrap()
}

/// Fractional part of `m * t` computed exactly from the binary expansion of
/// `t`, so that `e_m(t)` stays accurate for astronomically large `m`.
pub fn phase_turns(m: &Freq, t: f64) -> f64 {
    if t == 0.0 || m.is_zero() {
        return 0.0;
    }
    assert!(t.is_finite(), "non-finite evaluation point");
    // t = mantissa * 2^exponent with an integer mantissa.
    let bits = t.abs().to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let (mantissa, exponent) = if raw_exp == 0 {
        (bits & ((1 << 52) - 1), -1074)
    } else {
        ((bits & ((1 << 52) - 1)) | (1 << 52), raw_exp - 1075)
    };
    let mut product = m * BigInt::from(mantissa);
    if t < 0.0 {
        product = -product;
    }
    if exponent >= 0 {
        return 0.0;
    }
    let k = (-exponent) as u64;
    let modulus = pow2(k);
    let r = product.mod_floor(&modulus);
    ratio_to_f64(&r, &modulus)
}

/// Serialise as a JSON number when exactly representable, otherwise as a
/// decimal string.
pub fn to_json(m: &Freq) -> serde_json::Value {
    match m.to_i64() {
        Some(v) if v.abs() <= JSON_SAFE_INTEGER => serde_json::Value::from(v),
        _ => serde_json::Value::String(m.to_string()),
    }
}

pub fn from_json(v: &serde_json::Value) -> Result<Freq, String> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Freq::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(Freq::from(u))
            } else {
                Err(format!("frequency {n} is not an integer"))
            }
        }
        serde_json::Value::String(s) => s
            .trim()
            .parse::<Freq>()
            .map_err(|e| format!("bad frequency {s:?}: {e}")),
        other => Err(format!("expected a frequency, got {other}")),
    }
}

/// `serde(with = ...)` adapter for a list of frequencies.
pub mod serde_vec {
    use super::{from_json, to_json, Freq};
    use serde::{de::Error as _, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Freq], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for m in v {
            seq.serialize_element(&to_json(m))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Freq>, D::Error> {
        let raw = Vec::<serde_json::Value>::deserialize(d)?;
        raw.iter().map(|v| from_json(v).map_err(D::Error::custom)).collect()
    }
}

/// Number of bits of a nonnegative frequency (`0` for zero).
pub fn bit_length(m: &Freq) -> u64 {
    debug_assert!(!m.is_negative());
    m.bits()
}

/// Whether a positive frequency is a power of two.
pub fn is_pow2(m: &Freq) -> bool {
    m.is_positive() && m.trailing_zeros() == Some(m.bits() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_is_exact_for_dyadic_points() {
        assert_eq!(phase_turns(&Freq::from(1), 0.5), 0.5);
        assert_eq!(phase_turns(&Freq::from(3), 0.5), 0.5);
        assert_eq!(phase_turns(&Freq::from(4), 0.25), 0.0);
        // 2^600 * 0.375 is an integer.
        assert_eq!(phase_turns(&pow2(600), 0.375), 0.0);
        assert_eq!(phase_turns(&(pow2(600) + 1), 0.375), 0.375);
        assert_eq!(phase_turns(&Freq::from(-1), 0.25), 0.75);
    }

    #[test]
    fn phase_matches_float_for_small_frequencies() {
        for m in 0..50i64 {
            for &t in &[0.1, 0.37, 0.999, 1e-7] {
                let expect = (m as f64 * t).fract();
                let got = phase_turns(&Freq::from(m), t);
                let diff = (expect - got).abs();
                assert!(diff < 1e-12 || (1.0 - diff) < 1e-12, "m={m} t={t}");
            }
        }
    }

    #[test]
    fn json_round_trip_switches_to_strings() {
        let small = Freq::from(12345);
        let big = pow2(80);
        assert!(to_json(&small).is_number());
        assert!(to_json(&big).is_string());
        assert_eq!(from_json(&to_json(&big)).unwrap(), big);
        assert_eq!(from_json(&to_json(&small)).unwrap(), small);
    }

    #[test]
    fn huge_ratio_does_not_overflow() {
        let a = pow2(2000) * 3;
        let b = pow2(2001);
        assert!((ratio_to_f64(&a, &b) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn pow2_detection() {
        assert!(is_pow2(&Freq::from(1)));
        assert!(is_pow2(&pow2(300)));
        assert!(!is_pow2(&Freq::from(0)));
        assert!(!is_pow2(&Freq::from(12)));
    }
}
