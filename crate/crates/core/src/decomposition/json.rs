//! JSON form of a decomposition.
//!
//! ```json
//! {"pieces": [
//!   {"type": "diagonal", "support": [[3, 0.5, 0.0], [4, [1, 3], 0]]},
//!   {"type": "diagonal", "ramp": [1, 2, 2, 4]},
//!   {"type": "kernel", "support": [[5, 1, 1.0, 0.0]]}
//! ]}
//! ```
//!
//! Diagonal supports list `[frequency, re, im]`, kernel supports list
//! `[output, input, re, im]`. Values are numbers or exact `[num, den]`
//! integer pairs; frequencies beyond `2^53` are decimal strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use super::{DiagonalSymbol, Kernel, MultiplierDecomposition, MultiplierPiece, QComplex, Ramp};
use crate::freq::{self, Freq};
use crate::{Error, Result};

fn fmt_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn value_to_json(r: &BigRational) -> Value {
    if r.is_integer() {
        return freq::to_json(r.numer());
    }
    // Dyadic values that a double carries exactly stay plain numbers.
    if let Some(x) = r.to_f64() {
        if BigRational::from_float(x).as_ref() == Some(r) {
            return json!(x);
        }
    }
    json!([freq::to_json(r.numer()), freq::to_json(r.denom())])
}

fn value_from_json(v: &Value) -> Result<BigRational> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(i.into()))
            } else {
                let x = n.as_f64().ok_or_else(|| fmt_err(format!("bad number {n}")))?;
                BigRational::from_float(x).ok_or_else(|| fmt_err(format!("non-finite value {n}")))
            }
        }
        Value::Array(pair) if pair.len() == 2 => {
            let num: BigInt = freq::from_json(&pair[0]).map_err(fmt_err)?;
            let den: BigInt = freq::from_json(&pair[1]).map_err(fmt_err)?;
            if den.is_zero() {
                return Err(fmt_err("zero denominator"));
            }
            Ok(BigRational::new(num, den))
        }
        Value::String(_) => Ok(BigRational::from_integer(freq::from_json(v).map_err(fmt_err)?)),
        other => Err(fmt_err(format!("expected a number or [num, den], got {other}"))),
    }
}

fn freq_from(v: &Value) -> Result<Freq> {
    freq::from_json(v).map_err(fmt_err)
}

fn row<'a>(v: &'a Value, len: usize, what: &str) -> Result<&'a [Value]> {
    match v.as_array() {
        Some(a) if a.len() == len => Ok(a),
        _ => Err(fmt_err(format!("{what} entries must have {len} fields, got {v}"))),
    }
}

impl MultiplierDecomposition {
    pub fn to_json(&self) -> Value {
        let pieces: Vec<Value> = self
            .pieces()
            .iter()
            .map(|p| match p {
                MultiplierPiece::Diagonal(DiagonalSymbol::Ramp(r)) => json!({
                    "type": "diagonal",
                    "ramp": r.knots().iter().map(|k| freq::to_json(k)).collect::<Vec<_>>(),
                }),
                MultiplierPiece::Diagonal(DiagonalSymbol::Sparse(map)) => json!({
                    "type": "diagonal",
                    "support": map
                        .iter()
                        .map(|(m, v)| json!([freq::to_json(m), value_to_json(&v.re), value_to_json(&v.im)]))
                        .collect::<Vec<_>>(),
                }),
                MultiplierPiece::Kernel(k) => json!({
                    "type": "kernel",
                    "support": k
                        .columns()
                        .flat_map(|(input, col)| {
                            col.iter().map(move |(out, v)| {
                                json!([freq::to_json(out), freq::to_json(input), value_to_json(&v.re), value_to_json(&v.im)])
                            })
                        })
                        .collect::<Vec<_>>(),
                }),
            })
            .collect();
        json!({ "pieces": pieces })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let pieces = v
            .get("pieces")
            .and_then(Value::as_array)
            .ok_or_else(|| fmt_err("missing \"pieces\" array"))?;
        let mut out = Vec::with_capacity(pieces.len());
        for (k, p) in pieces.iter().enumerate() {
            let kind = p.get("type").and_then(Value::as_str).unwrap_or("");
            let piece = match kind {
                "diagonal" => {
                    if let Some(r) = p.get("ramp") {
                        let k = row(r, 4, "ramp")?;
                        MultiplierPiece::ramp(Ramp::new(
                            freq_from(&k[0])?,
                            freq_from(&k[1])?,
                            freq_from(&k[2])?,
                            freq_from(&k[3])?,
                        )?)
                    } else {
                        let support = support(p, k)?;
                        let mut values = Vec::with_capacity(support.len());
                        for e in support {
                            let e = row(e, 3, "diagonal support")?;
                            values.push((freq_from(&e[0])?, QComplex::new(value_from_json(&e[1])?, value_from_json(&e[2])?)));
                        }
                        MultiplierPiece::sparse(values)
                    }
                }
                "kernel" => {
                    let support = support(p, k)?;
                    let mut entries = Vec::with_capacity(support.len());
                    for e in support {
                        let e = row(e, 4, "kernel support")?;
                        entries.push((
                            freq_from(&e[0])?,
                            freq_from(&e[1])?,
                            QComplex::new(value_from_json(&e[2])?, value_from_json(&e[3])?),
                        ));
                    }
                    MultiplierPiece::Kernel(Kernel::new(entries))
                }
                other => return Err(fmt_err(format!("piece {k}: unknown type {other:?}"))),
            };
            out.push(piece);
        }
        Ok(Self::new(out))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }
}

fn support(p: &Value, k: usize) -> Result<&Vec<Value>> {
    p.get("support")
        .and_then(Value::as_array)
        .ok_or_else(|| fmt_err(format!("piece {k}: missing \"support\" array")))
}

#[cfg(test)]
mod tests {
    use super::super::stein;
    use super::*;

    #[test]
    fn parses_all_value_forms() {
        let d = MultiplierDecomposition::from_json_str(
            r#"{"pieces": [
                {"type": "diagonal", "support": [[3, 0.5, 0], [4, [1, 3], [-2, 7]], ["123456789012345678901234567890", 1, 0]]},
                {"type": "diagonal", "ramp": [1, 2, 2, 4]},
                {"type": "kernel", "support": [[5, 1, 1.0, 0.0]]}
            ]}"#,
        )
        .unwrap();
        assert_eq!(d.len(), 3);
        let v = d.piece(0).multiplier(&Freq::from(4)).unwrap();
        assert_eq!(v.re, BigRational::new(1.into(), 3.into()));
        assert_eq!(v.im, BigRational::new((-2).into(), 7.into()));
        let big: Freq = "123456789012345678901234567890".parse().unwrap();
        assert!(!d.piece(0).multiplier(&big).unwrap().is_zero());
        assert_eq!(d.piece(1).multiplier(&Freq::from(3)).unwrap().re, BigRational::new(1.into(), 2.into()));
        assert_eq!(d.piece(2).apply_monomial(&Freq::from(1)).len(), 1);
    }

    #[test]
    fn stein_round_trip() {
        let s = stein(70).unwrap();
        let text = serde_json::to_string(&s.to_json()).unwrap();
        assert_eq!(MultiplierDecomposition::from_json_str(&text).unwrap(), s);
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            r#"{}"#,
            r#"{"pieces": [{"type": "blob"}]}"#,
            r#"{"pieces": [{"type": "diagonal", "support": [[1, 2]]}]}"#,
            r#"{"pieces": [{"type": "diagonal", "support": [[1, [1, 0], 0]]}]}"#,
            r#"{"pieces": [{"type": "diagonal", "ramp": [4, 3, 2, 1]}]}"#,
        ] {
            assert!(MultiplierDecomposition::from_json_str(bad).is_err(), "{bad}");
        }
    }
}
