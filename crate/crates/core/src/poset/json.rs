use serde::{Deserialize, Serialize};

use super::{FinitePoset, PosetError};

/// Wire form `{"elements": [...], "covers": [["a","b"], ...]}` with `a ⋖ b`.
///
/// Covers are emitted grouped by lower element in element order, upper
/// elements in element order, so a canonical file round-trips byte for byte.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetJson {
    pub elements: Vec<String>,
    pub covers: Vec<[String; 2]>,
}

impl From<&FinitePoset> for PosetJson {
    fn from(p: &FinitePoset) -> Self {
        PosetJson {
            elements: p.ids().to_vec(),
            covers: p
                .cover_pairs()
                .map(|(a, b)| [p.id(a).to_string(), p.id(b).to_string()])
                .collect(),
        }
    }
}

impl TryFrom<PosetJson> for FinitePoset {
    type Error = PosetError;

    fn try_from(value: PosetJson) -> Result<Self, Self::Error> {
        FinitePoset::from_covers(value.elements, value.covers.iter().map(|[a, b]| (a, b)))
    }
}

impl FinitePoset {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&PosetJson::from(self)).expect("poset serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, PosetError> {
        let raw: PosetJson = serde_json::from_str(text).map_err(|e| PosetError::Json(e.to_string()))?;
        raw.try_into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_text_round_trips() {
        let p = FinitePoset::from_covers(["0", "a", "b", "1"], [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")])
            .unwrap();
        let text = p.to_json();
        let back = FinitePoset::from_json(&text).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(FinitePoset::from_json("{\"elements\": 3}"), Err(PosetError::Json(_))));
        assert!(matches!(
            FinitePoset::from_json(r#"{"elements":["a"],"covers":[["a","q"]]}"#),
            Err(PosetError::UnknownId(_))
        ));
    }
}
