//! Optional `<stem>.json` sidecar next to a ballot file.
//!
//! ```json
//! { "council": "Example", "ward": "Ward 3", "year": 2022,
//!   "parties": { "Ann Smith": "SNP" } }
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub council: Option<String>,
    #[serde(default)]
    pub ward: Option<String>,
    #[serde(default)]
    pub year: Option<u32>,
    /// Party label by candidate name.
    #[serde(default)]
    pub parties: BTreeMap<String, String>,
}

impl Manifest {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_partial() {
        let m = Manifest::from_json(r#"{"year": 2017, "parties": {"Bo": "Lab"}}"#).unwrap();
        assert_eq!(m.year, Some(2017));
        assert_eq!(m.council, None);
        assert_eq!(m.parties["Bo"], "Lab");
        assert!(Manifest::from_json(r#"{"yaer": 2017}"#).is_err());
    }
}
