//! The map document: one JSON object per line, exact rational coefficients
//! written as strings.
//!
//! ```text
//! {"n":1,"D":8,"components":[[{"exp":[1],"c":"1"},{"exp":[2],"c":"-1"}]]}
//! ```

use formal_inverse::rat::parse_rat;
use formal_inverse::series::default_var_names;
use formal_inverse::{MSeries, MapF, PolyMap, Rat};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub exp: Vec<u32>,
    pub c: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meta {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub homogeneous_degree: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub source: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDocument {
    pub n: usize,
    #[serde(rename = "D")]
    pub d: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub vars: Option<Vec<String>>,
    pub components: Vec<Vec<Term>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub meta: Option<Meta>,
}

impl MapDocument {
    /// The canonical document for `m`: terms in graded order, reduced
    /// coefficients, zero terms dropped.
    pub fn from_map(m: &PolyMap) -> MapDocument {
        let components = m
            .components()
            .iter()
            .map(|c| {
                c.terms()
                    .map(|(e, v)| Term {
                        exp: e.as_slice().to_vec(),
                        c: v.to_string(),
                    })
                    .collect()
            })
            .collect();
        MapDocument {
            n: m.nvars(),
            d: m.trunc(),
            vars: None,
            components,
            meta: None,
        }
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.meta.get_or_insert_with(Meta::default).source = Some(source.into());
        self
    }

    pub fn var_names(&self) -> Vec<String> {
        self.vars
            .clone()
            .unwrap_or_else(|| default_var_names(self.n))
    }

    /// Validates the document and builds the map.
    pub fn to_map(&self) -> Result<PolyMap, CliError> {
        if self.components.len() != self.n {
            return Err(CliError::Input(format!(
                "expected {} components, found {}",
                self.n,
                self.components.len()
            )));
        }
        if let Some(v) = &self.vars {
            if v.len() != self.n {
                return Err(CliError::Input(format!(
                    "expected {} variable names, found {}",
                    self.n,
                    v.len()
                )));
            }
        }
        let mut comps = Vec::with_capacity(self.n);
        for (i, terms) in self.components.iter().enumerate() {
            let mut parsed: Vec<(Vec<i64>, Rat)> = Vec::with_capacity(terms.len());
            for (j, t) in terms.iter().enumerate() {
                let at = || format!("component {}, term {}", i + 1, j + 1);
                if t.exp.len() != self.n {
                    return Err(CliError::Input(format!(
                        "{}: exponent has {} entries, expected {}",
                        at(),
                        t.exp.len(),
                        self.n
                    )));
                }
                let c = parse_rat(&t.c).ok_or_else(|| {
                    CliError::Input(format!("{}: bad coefficient {:?}", at(), t.c))
                })?;
                parsed.push((t.exp.iter().map(|&k| i64::from(k)).collect(), c));
            }
            let s = MSeries::from_terms(self.n, self.d, parsed)
                .map_err(|e| CliError::Input(format!("component {}: {e}", i + 1)))?;
            if s.order() == Some(0) {
                return Err(CliError::Input(format!(
                    "component {} has a nonzero constant term",
                    i + 1
                )));
            }
            comps.push(s);
        }
        PolyMap::new(comps).map_err(|e| CliError::Input(e.to_string()))
    }

    /// The map as `F = z - H`, requiring identity linear part.
    pub fn to_map_f(&self) -> Result<MapF, CliError> {
        MapF::new(self.to_map()?).map_err(|e| CliError::Input(e.to_string()))
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("documents serialize")
    }
}

/// Parses one document per non-blank line.
pub fn parse_documents(text: &str) -> Result<Vec<MapDocument>, CliError> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let doc: MapDocument = serde_json::from_str(line).map_err(|e| CliError::Syntax {
            line: idx + 1,
            column: e.column(),
            message: e.to_string(),
        })?;
        doc.to_map()
            .map_err(|e| CliError::Input(format!("line {}: {}", idx + 1, e.message())))?;
        out.push(doc);
    }
    if out.is_empty() {
        return Err(CliError::Input("no map documents found".into()));
    }
    Ok(out)
}

/// Parses exactly one document.
pub fn parse_map(text: &str) -> Result<MapDocument, CliError> {
    let mut docs = parse_documents(text)?;
    if docs.len() != 1 {
        return Err(CliError::Input(format!(
            "expected one map document, found {}",
            docs.len()
        )));
    }
    Ok(docs.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use formal_inverse::rat::{rat, ratio};

    const CATALAN: &str =
        r#"{"n":1,"D":8,"components":[[{"exp":[1],"c":"1"},{"exp":[2],"c":"-1"}]]}"#;

    #[test]
    fn parses_and_round_trips() {
        let doc = parse_map(CATALAN).unwrap();
        let f = doc.to_map_f().unwrap();
        assert_eq!(f.h().component(0).coeff_of(&[2]), rat(1));
        assert_eq!(f.trunc(), 8);
        assert_eq!(doc.to_line(), CATALAN);
        assert_eq!(MapDocument::from_map(f.f()).to_line(), CATALAN);
    }

    #[test]
    fn rational_coefficients() {
        let text = r#"{"n":1,"D":3,"components":[[{"exp":[1],"c":"1"},{"exp":[3],"c":"2/3"}]]}"#;
        let m = parse_map(text).unwrap().to_map().unwrap();
        assert_eq!(m.component(0).coeff_of(&[3]), ratio(2, 3));
    }

    #[test]
    fn optional_fields_keep_their_place() {
        let text = r#"{"n":2,"D":4,"vars":["x","y"],"components":[[{"exp":[1,0],"c":"1"}],[{"exp":[0,1],"c":"1"},{"exp":[2,0],"c":"-1/2"}]],"meta":{"homogeneous_degree":2,"source":"test"}}"#;
        let doc = parse_map(text).unwrap();
        assert_eq!(doc.to_line(), text);
        assert_eq!(doc.var_names(), ["x", "y"]);
    }

    #[test]
    fn rejections() {
        let constant = r#"{"n":1,"D":3,"components":[[{"exp":[0],"c":"1"},{"exp":[1],"c":"1"}]]}"#;
        let e = parse_map(constant).unwrap_err();
        assert!(e.to_string().contains("constant term"), "{e}");
        let dims = r#"{"n":2,"D":3,"components":[[{"exp":[1],"c":"1"}],[]]}"#;
        assert!(parse_map(dims)
            .unwrap_err()
            .to_string()
            .contains("exponent has 1 entries"));
        let syntax = "\n{\"n\":1,\"D\":3,\"components\":[[{\"exp\":[1],\"c\":1}]]}";
        match parse_map(syntax).unwrap_err() {
            CliError::Syntax { line, column, .. } => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("unexpected {other}"),
        }
        let linear = r#"{"n":1,"D":3,"components":[[{"exp":[1],"c":"2"}]]}"#;
        assert!(parse_map(linear).unwrap().to_map_f().is_err());
        let bad = r#"{"n":1,"D":3,"components":[[{"exp":[1],"c":"1/0"}]]}"#;
        assert!(parse_map(bad).is_err());
    }
}
