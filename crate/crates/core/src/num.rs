//! Fixed-precision number output for JSON and CSV.

use std::collections::BTreeMap;

use serde::ser::SerializeMap;
use serde::Serializer;

/// Number of decimals kept in serialized output.
pub const OUTPUT_DECIMALS: i32 = 6;

/// Rounds to six decimal places. Magnitudes of 1e9 and above already carry
/// less than a millionth of precision and are returned unchanged.
pub fn round6(x: f64) -> f64 {
    if !x.is_finite() || x.abs() >= 1e9 {
        return x;
    }
    let scale = 10f64.powi(OUTPUT_DECIMALS);
    let r = (x * scale).round() / scale;
    // no "-0" in output
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Text form of [`round6`], shortest representation that parses back exactly.
pub fn fmt6(x: f64) -> String {
    format!("{}", round6(x))
}

pub fn ser_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round6(*x))
}

pub fn ser_opt_f64<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&round6(*v)),
        None => s.serialize_none(),
    }
}

pub fn ser_map_f64<K, S>(map: &BTreeMap<K, f64>, s: S) -> Result<S::Ok, S::Error>
where
    K: serde::Serialize,
    S: Serializer,
{
    let mut out = s.serialize_map(Some(map.len()))?;
    for (k, v) in map {
        out.serialize_entry(k, &round6(*v))?;
    }
    out.end()
}

pub fn ser_map_opt_f64<K, S>(map: &BTreeMap<K, Option<f64>>, s: S) -> Result<S::Ok, S::Error>
where
    K: serde::Serialize,
    S: Serializer,
{
    let mut out = s.serialize_map(Some(map.len()))?;
    for (k, v) in map {
        out.serialize_entry(k, &v.map(round6))?;
    }
    out.end()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounds_to_six_places() {
        assert_eq!(round6(64.16666666666667), 64.166667);
        assert_eq!(round6(-0.0000001), 0.0);
        assert_eq!(fmt6(28.571428571428573), "28.571429");
        assert_eq!(fmt6(100.0), "100");
        assert_eq!(round6(6.722e10), 6.722e10);
    }
}
