use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use tubings::mellin::load_table;
use tubings::scalar::parse_rational;
use tubings::{Decoration, LoadedTable, MellinTable, Rational, TypeTag};

pub fn rational(text: &str) -> Result<Rational> {
    parse_rational(text).with_context(|| format!("{text:?} is not a rational number"))
}

/// Parses "1,2" into weights of the default type.
pub fn kernel_weights(text: &str) -> Result<Vec<u32>> {
    let mut ws: Vec<u32> = text
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<u32>()
                .with_context(|| format!("bad kernel weight {p:?}"))
        })
        .collect::<Result<_>>()?;
    if ws.contains(&0) {
        bail!("kernel weights must be at least 1");
    }
    ws.sort_unstable();
    ws.dedup();
    Ok(ws)
}

pub fn kernel_decorations(text: &str) -> Result<Vec<Decoration>> {
    Ok(kernel_weights(text)?.into_iter().map(Decoration::weight).collect())
}

/// Builds the table named by `--mellin` for the given kernels.
pub fn mellin_table(source: &str, decos: &[Decoration], len: usize) -> Result<LoadedTable> {
    match source {
        "yukawa" => {
            if decos.iter().any(|d| d.weight != 1 || !d.tag.is_empty()) {
                bail!("the yukawa table has a single weight-1 kernel");
            }
            Ok(LoadedTable::Exact(MellinTable::yukawa(len)))
        }
        "symbolic" => Ok(LoadedTable::Symbolic(MellinTable::symbolic(decos.iter().copied(), len))),
        path => {
            let p = Path::new(path);
            if !p.is_file() {
                bail!("unknown mellin source {path:?}: expected yukawa, symbolic or a JSON file");
            }
            Ok(load_table(p)?)
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemJson {
    s: BTreeMap<String, String>,
    #[serde(default)]
    kernels: BTreeMap<String, Vec<u32>>,
}

/// A system file: `{"s": {"a": "-1"}, "kernels": {"a": [1, 2]}}`.
pub struct SystemFile {
    pub s: BTreeMap<TypeTag, Rational>,
    pub kernels: Vec<Decoration>,
}

pub fn system_file(path: &Path) -> Result<SystemFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let j: SystemJson = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let mut s = BTreeMap::new();
    for (name, v) in &j.s {
        s.insert(TypeTag::new(name)?, rational(v)?);
    }
    let mut kernels = Vec::new();
    for (name, ws) in &j.kernels {
        let tag = TypeTag::new(name)?;
        if !s.contains_key(&tag) {
            bail!("kernels given for type {name:?} without an s value");
        }
        for &w in ws {
            if w == 0 {
                bail!("kernel weights must be at least 1");
            }
            kernels.push(Decoration::new(tag, w));
        }
    }
    kernels.sort();
    kernels.dedup();
    Ok(SystemFile { s, kernels })
}
