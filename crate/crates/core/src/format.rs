//! Fixed-precision number formatting for machine-readable outputs.

use serde::Serializer;
use serde_json::value::RawValue;

/// Formats `x` with exactly 17 significant digits, in positional notation
/// when the decimal exponent lies in `[-5, 17)` and in scientific notation
/// otherwise. Seventeen digits round-trip every binary64 value.
pub fn sig17(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".to_string()
        } else if x > 0.0 {
            "Infinity".to_string()
        } else {
            "-Infinity".to_string()
        };
    }
    if x == 0.0 {
        return "0.0000000000000000".to_string();
    }
    // The scientific rendering fixes the decimal exponent after rounding.
    let sci = format!("{:.16e}", x);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        format!("{:.*}", decimals, x)
    } else {
        sci
    }
}

/// Human-facing rendering at six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        format!("{:.*}", decimals, x)
    } else {
        format!("{:.5e}", x)
    }
}

/// `serialize_with` adapter writing an `f64` as a JSON number with 17
/// significant digits. Non-finite values become `null`.
pub fn serialize_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return s.serialize_none();
    }
    let raw = RawValue::from_string(sig17(*x)).map_err(serde::ser::Error::custom)?;
    s.serialize_some(&raw)
}

pub fn serialize_opt_f64<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => serialize_f64(v, s),
        None => s.serialize_none(),
    }
}

pub fn serialize_f64_pair<S: Serializer>(x: &(f64, f64), s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&Sig17(x.0))?;
    t.serialize_element(&Sig17(x.1))?;
    t.end()
}

pub fn serialize_f64_vec<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&Sig17(*x))?;
    }
    seq.end()
}

pub fn serialize_opt_f64_vec<S: Serializer>(v: &Option<Vec<f64>>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => serialize_f64_vec(v, s),
        None => s.serialize_none(),
    }
}

/// Newtype that serializes through [`serialize_f64`].
#[derive(Debug, Clone, Copy)]
pub struct Sig17(pub f64);

impl serde::Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_f64(&self.0, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(sig17(0.25), "0.25000000000000000");
        assert_eq!(sig17(1.0), "1.0000000000000000");
        assert_eq!(sig17(-12.5), "-12.500000000000000");
        assert_eq!(sig17(1e-7), "9.9999999999999995e-8");
        assert_eq!(sig17(2.5e-7), "2.4999999999999999e-7");
        assert_eq!(sig17(0.1), "0.10000000000000001");
    }

    #[test]
    fn round_trips() {
        for &x in &[0.1, 1.0 / 3.0, 0.49310962685897021, 6.02e23, 1e-300, -7.25e-6] {
            assert_eq!(sig17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_number_is_valid() {
        #[derive(serde::Serialize)]
        struct W {
            #[serde(serialize_with = "serialize_f64")]
            v: f64,
        }
        let s = serde_json::to_string(&W { v: 1e-7 }).unwrap();
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["v"].as_f64().unwrap(), 1e-7);
    }

    #[test]
    fn six_digits() {
        assert_eq!(sig6(0.608167580), "0.608168");
        assert_eq!(sig6(1234.5678), "1234.57");
    }
}
