//! Canonical JSON text: stable field order (declaration order of every
//! serialized struct), two-space indentation, LF line endings, a trailing
//! newline, and every real number written with exactly six fractional digits.

use serde::ser::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

/// Fixed six-decimal rendering used for every real-valued field.
pub fn format_fixed(value: f64) -> Option<String> {
    if !value.is_finite() {
        return None;
    }
    let text = format!("{value:.6}");
    if text == "-0.000000" {
        Some("0.000000".to_string())
    } else {
        Some(text)
    }
}

/// `#[serde(with = "fixed6")]` for `f64` fields.
pub mod fixed6 {
    use super::*;

    pub fn serialize<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
        let text = format_fixed(*value)
            .ok_or_else(|| S::Error::custom(format!("non-finite number {value}")))?;
        let raw = RawValue::from_string(text).map_err(S::Error::custom)?;
        raw.serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<f64, D::Error> {
        f64::deserialize(deserializer)
    }

    /// Same rendering for `Option<f64>`; `None` becomes `null`.
    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(
            value: &Option<f64>,
            serializer: S,
        ) -> Result<S::Ok, S::Error> {
            match value {
                Some(v) => super::serialize(v, serializer),
                None => serializer.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            deserializer: D,
        ) -> Result<Option<f64>, D::Error> {
            Option::<f64>::deserialize(deserializer)
        }
    }
    /// Same rendering for `Vec<f64>`.
    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(values: &[f64], serializer: S) -> Result<S::Ok, S::Error> {
            let mut seq = serializer.serialize_seq(Some(values.len()))?;
            for v in values {
                let text = format_fixed(*v)
                    .ok_or_else(|| S::Error::custom(format!("non-finite number {v}")))?;
                seq.serialize_element(&RawValue::from_string(text).map_err(S::Error::custom)?)?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<f64>, D::Error> {
            Vec::<f64>::deserialize(deserializer)
        }
    }
}

/// Serialize any document to canonical text.
pub fn to_canonical_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Sample {
        #[serde(with = "fixed6")]
        t: f64,
        #[serde(with = "fixed6::option")]
        o: Option<f64>,
    }

    #[test]
    fn six_fraction_digits() {
        let s = Sample { t: 0.35, o: Some(-0.0) };
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"t":0.350000,"o":0.000000}"#);
        let none = Sample { t: 2.0, o: None };
        assert_eq!(serde_json::to_string(&none).unwrap(), r#"{"t":2.000000,"o":null}"#);
    }

    #[test]
    fn rejects_non_finite() {
        let s = Sample { t: f64::NAN, o: None };
        assert!(serde_json::to_string(&s).is_err());
    }

    #[test]
    fn canonical_has_trailing_newline() {
        let text = to_canonical_string(&Sample { t: 1.0, o: None }).unwrap();
        assert!(text.ends_with("}\n"));
        assert!(!text.contains('\r'));
    }
}
