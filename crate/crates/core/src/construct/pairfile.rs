//! Pair files: `{"x": "...", "y": "...", "meta": {family, k, prefix_len, p}}`.

use serde::{Deserialize, Serialize};

use super::HardPairSpec;
use crate::error::{Error, Result};
use crate::strings::BitString;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairMeta {
    #[serde(default)]
    pub family: Option<String>,
    #[serde(default)]
    pub k: Option<u32>,
    #[serde(default)]
    pub prefix_len: Option<usize>,
    /// Deletion probability as written, e.g. `"1/2"`.
    #[serde(default)]
    pub p: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairFile {
    pub x: BitString,
    pub y: BitString,
    #[serde(default)]
    pub meta: PairMeta,
}

impl PairFile {
    pub fn from_hard_pair(spec: &HardPairSpec, p: Option<String>) -> Self {
        PairFile {
            x: spec.x.clone(),
            y: spec.y.clone(),
            meta: PairMeta {
                family: Some("hard".into()),
                k: Some(spec.k),
                prefix_len: Some(spec.prefix.len()),
                p,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("pair file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let pair: PairFile = serde_json::from_str(text)?;
        if pair.x.len() != pair.y.len() {
            return Err(Error::UnequalLengths {
                left: pair.x.len(),
                right: pair.y.len(),
            });
        }
        Ok(pair)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::hard_pair;

    #[test]
    fn round_trip() {
        let h = hard_pair(3, &"0110".parse().unwrap()).unwrap();
        let file = PairFile::from_hard_pair(&h, Some("1/2".into()));
        let back = PairFile::from_json(&file.to_json()).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.meta.prefix_len, Some(4));
        let v: serde_json::Value = serde_json::from_str(&file.to_json()).unwrap();
        assert_eq!(v["meta"]["family"], "hard");
        assert_eq!(v["meta"]["k"], 3);
    }

    #[test]
    fn meta_is_optional() {
        let pair = PairFile::from_json(r#"{"x": "10", "y": "01"}"#).unwrap();
        assert_eq!(pair.meta, PairMeta::default());
    }

    #[test]
    fn rejects_bad_pairs() {
        assert!(PairFile::from_json(r#"{"x": "10", "y": "011"}"#).is_err());
        assert!(PairFile::from_json(r#"{"x": "1a", "y": "01"}"#).is_err());
        assert!(PairFile::from_json(r#"{"x": "10"}"#).is_err());
    }
}
