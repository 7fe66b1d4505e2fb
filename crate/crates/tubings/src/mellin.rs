//! Mellin coefficient tables c_{i,d}, one sequence per decoration.

use std::collections::BTreeMap;
use std::path::Path;

use num_traits::One;
use serde::Deserialize;
use thiserror::Error;

use crate::scalar::{parse_rational, Poly, Rational, Scalar, Symbol};
use crate::trees::{Decoration, TypeTag};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MellinError {
    #[error("no coefficients for decoration {0}")]
    MissingDecoration(Decoration),
    #[error("coefficient c_{index} for decoration {deco} exceeds the table length {len}")]
    Truncated { index: usize, deco: Decoration, len: usize },
    #[error("table length {have} is shorter than the required {need}")]
    TooShort { have: usize, need: usize },
    #[error("coefficient lists must share one length")]
    Ragged,
    #[error("bad mellin table: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MellinTable<S> {
    entries: BTreeMap<Decoration, Vec<S>>,
}

impl<S: Scalar> MellinTable<S> {
    pub fn new(entries: BTreeMap<Decoration, Vec<S>>) -> Result<Self, MellinError> {
        let mut lens = entries.values().map(Vec::len);
        if let Some(first) = lens.next() {
            if first == 0 || lens.any(|l| l != first) {
                return Err(MellinError::Ragged);
            }
        }
        Ok(MellinTable { entries })
    }

    pub fn from_fn(
        decos: impl IntoIterator<Item = Decoration>,
        len: usize,
        f: impl Fn(usize, Decoration) -> S,
    ) -> Self {
        let entries = decos
            .into_iter()
            .map(|d| (d, (0..len).map(|i| f(i, d)).collect()))
            .collect();
        MellinTable::new(entries).expect("uniform by construction")
    }

    pub fn decorations(&self) -> impl Iterator<Item = Decoration> + '_ {
        self.entries.keys().copied()
    }

    /// Common length of the coefficient lists.
    pub fn len(&self) -> usize {
        self.entries.values().next().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize, deco: Decoration) -> Result<&S, MellinError> {
        let seq = self.entries.get(&deco).ok_or(MellinError::MissingDecoration(deco))?;
        seq.get(index).ok_or(MellinError::Truncated {
            index,
            deco,
            len: seq.len(),
        })
    }

    pub fn require_len(&self, need: usize) -> Result<(), MellinError> {
        if self.len() < need {
            return Err(MellinError::TooShort { have: self.len(), need });
        }
        Ok(())
    }

    /// Keeps only the given decorations.
    pub fn restricted(&self, keep: impl Fn(Decoration) -> bool) -> Self {
        MellinTable {
            entries: self
                .entries
                .iter()
                .filter(|(d, _)| keep(**d))
                .map(|(d, v)| (*d, v.clone()))
                .collect(),
        }
    }
}

impl MellinTable<Rational> {
    /// c_j = -(-1)^j for the single weight-1 kernel.
    pub fn yukawa(len: usize) -> Self {
        MellinTable::from_fn([Decoration::default()], len, |j, _| {
            if j % 2 == 0 {
                -Rational::one()
            } else {
                Rational::one()
            }
        })
    }
}

impl MellinTable<Poly> {
    /// Independent formal symbols c_{i,d} for every listed decoration.
    pub fn symbolic(decos: impl IntoIterator<Item = Decoration>, len: usize) -> Self {
        MellinTable::from_fn(decos, len, |i, d| Poly::mellin(i as u32, d.tag, d.weight))
    }
}

/// A table read from JSON: exact if every entry is a rational, symbolic otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum LoadedTable {
    Exact(MellinTable<Rational>),
    Symbolic(MellinTable<Poly>),
}

#[derive(Deserialize)]
struct TableJson {
    decorations: Vec<EntryJson>,
}

#[derive(Deserialize)]
struct EntryJson {
    #[serde(rename = "type", default)]
    ty: String,
    k: u32,
    coeffs: Vec<String>,
}

/// Parses `{"decorations": [{"type": "a", "k": 1, "coeffs": ["-1", "1", ...]}]}`.
/// Entries that are not rationals are treated as symbol names.
pub fn parse_table(text: &str) -> Result<LoadedTable, MellinError> {
    let j: TableJson = serde_json::from_str(text).map_err(|e| MellinError::Parse(e.to_string()))?;
    let mut raw = BTreeMap::new();
    for e in j.decorations {
        if e.k == 0 {
            return Err(MellinError::Parse("k must be at least 1".into()));
        }
        let tag = TypeTag::new(&e.ty).map_err(|err| MellinError::Parse(err.to_string()))?;
        if raw.insert(Decoration::new(tag, e.k), e.coeffs).is_some() {
            return Err(MellinError::Parse(format!("duplicate decoration ({}, {})", e.ty, e.k)));
        }
    }
    let exact: Option<BTreeMap<Decoration, Vec<Rational>>> = raw
        .iter()
        .map(|(d, cs)| {
            cs.iter()
                .map(|c| parse_rational(c))
                .collect::<Option<Vec<_>>>()
                .map(|v| (*d, v))
        })
        .collect();
    match exact {
        Some(m) => Ok(LoadedTable::Exact(MellinTable::new(m)?)),
        None => {
            let mut m = BTreeMap::new();
            for (d, cs) in raw {
                let v = cs
                    .iter()
                    .map(|c| match parse_rational(c) {
                        Some(q) => Poly::constant(q),
                        None => Poly::var(Symbol::Named(c.trim().to_string())),
                    })
                    .collect();
                m.insert(d, v);
            }
            Ok(LoadedTable::Symbolic(MellinTable::new(m)?))
        }
    }
}

pub fn load_table(path: &Path) -> Result<LoadedTable, MellinError> {
    let text = std::fs::read_to_string(path).map_err(|e| MellinError::Parse(format!("{}: {e}", path.display())))?;
    parse_table(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn yukawa_signs() {
        let t = MellinTable::yukawa(4);
        let d = Decoration::default();
        let got: Vec<Rational> = (0..4).map(|i| t.get(i, d).unwrap().clone()).collect();
        assert_eq!(got, vec![int(-1), int(1), int(-1), int(1)]);
        assert_eq!(
            t.get(4, d),
            Err(MellinError::Truncated {
                index: 4,
                deco: d,
                len: 4
            })
        );
        assert!(t.get(0, Decoration::weight(2)).is_err());
    }

    #[test]
    fn parse_exact_and_symbolic() {
        let exact = parse_table(r#"{"decorations":[{"type":"","k":1,"coeffs":["-1","1/2"]}]}"#).unwrap();
        assert!(matches!(exact, LoadedTable::Exact(_)));
        let sym = parse_table(r#"{"decorations":[{"k":1,"coeffs":["a","2"]},{"k":2,"coeffs":["b","0"]}]}"#).unwrap();
        match sym {
            LoadedTable::Symbolic(t) => {
                assert_eq!(t.get(0, Decoration::weight(1)).unwrap().to_string(), "a");
                assert_eq!(t.len(), 2);
            }
            _ => panic!("expected symbolic"),
        }
        assert_eq!(
            parse_table(r#"{"decorations":[{"k":1,"coeffs":["1"]},{"k":2,"coeffs":["1","2"]}]}"#),
            Err(MellinError::Ragged)
        );
    }
}
