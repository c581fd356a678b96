//! Gluing-spec files.
//!
//! ```json
//! {"k": 2, "l": 1, "matching": [["S0.p0", "A0.p2"], ["S1.p0", "A0.p0"], ["A0.p1", "A0.p3"]]}
//! ```
//!
//! `"matching": "auto"` selects the canonical pairing: S-pieces in
//! consecutive pairs, then `(p0,p1), (p2,p3)` inside each A-piece. Ports are
//! numbered from 0.

use std::path::Path;

use anyhow::{bail, Context, Result};
use qshadow_core::{GluingSpec, Port};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum MatchingField {
    Keyword(String),
    Pairs(Vec<[String; 2]>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GluingFile {
    k: usize,
    l: usize,
    matching: MatchingField,
}

pub fn parse_spec(text: &str) -> Result<GluingSpec> {
    let file: GluingFile = serde_json::from_str(text).context("malformed gluing spec")?;
    let spec = match file.matching {
        MatchingField::Keyword(w) if w == "auto" => GluingSpec::auto(file.k, file.l)?,
        MatchingField::Keyword(w) => bail!(qshadow_core::Error::Spec(format!("unknown matching keyword {w:?}"))),
        MatchingField::Pairs(pairs) => {
            let mut m = Vec::with_capacity(pairs.len());
            for [a, b] in pairs {
                m.push((a.parse::<Port>()?, b.parse::<Port>()?));
            }
            GluingSpec::new(file.k, file.l, m)?
        }
    };
    Ok(spec)
}

pub fn load_spec(path: &Path) -> Result<GluingSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_spec(&text).with_context(|| format!("in {}", path.display()))
}

pub fn to_json(spec: &GluingSpec) -> String {
    let pairs: Vec<[String; 2]> = spec.matching().iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect();
    serde_json::json!({ "k": spec.k(), "l": spec.l(), "matching": pairs }).to_string()
}
