//! Finite functions as JSON maps `{"x": [re, im]}`.

use std::collections::BTreeMap;

use newton_circle_core::ergodic::FiniteFunction;
use newton_circle_core::Complex;

use crate::Error;

pub fn from_json(text: &str) -> Result<FiniteFunction, Error> {
    let raw: BTreeMap<String, [f64; 2]> =
        serde_json::from_str(text).map_err(|e| Error::Usage(format!("finite function JSON: {e}")))?;
    let mut values = Vec::with_capacity(raw.len());
    for (k, [re, im]) in raw {
        let x: i64 = k.trim().parse().map_err(|_| Error::Usage(format!("finite function key {k:?} is not an integer")))?;
        values.push((x, Complex::new(re, im)));
    }
    Ok(FiniteFunction::new(values)?)
}

/// Keys in increasing integer order.
pub fn to_json(f: &FiniteFunction) -> String {
    let mut map = serde_json::Map::new();
    for (x, v) in f.support() {
        map.insert(x.to_string(), serde_json::json!([v.re, v.im]));
    }
    serde_json::Value::Object(map).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let f = from_json(r#"{"3": [1.0, -0.5], "-2": [0.25, 0.0], "7": [0.0, 0.0]}"#).unwrap();
        assert_eq!(f.get(-2), Complex::new(0.25, 0.0));
        assert_eq!(f.get(7), Complex::new(0.0, 0.0));
        assert_eq!(to_json(&f), r#"{"-2":[0.25,0.0],"3":[1.0,-0.5]}"#);
        assert_eq!(from_json(&to_json(&f)).unwrap(), f);
        assert!(from_json(r#"{"a": [1, 2]}"#).is_err());
        assert!(from_json(r#"{"1": [1]}"#).is_err());
    }
}
