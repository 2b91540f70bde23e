//! JSON-lines persistence for enumerated crystal graphs.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use kmcalc::binf::{CrystalElt, CrystalGraph, Word};
use kmcalc::root_datum::{DatumSpec, RootDatum, WeightVec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const FORMAT: &str = "kmcalc-crystal-graph";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Header {
    pub format: String,
    pub version: u32,
    pub datum: DatumSpec,
    pub fingerprint: String,
    /// Word period as node labels.
    pub word: Vec<usize>,
    pub max_height: u32,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct Line {
    id: usize,
    string: Vec<u32>,
    wt: WeightVec,
    phi: BTreeMap<String, i64>,
    phi_star: BTreeMap<String, i64>,
    f: BTreeMap<String, Option<usize>>,
    f_star: BTreeMap<String, Option<usize>>,
}

/// SHA-256 of the Cartan matrix and the affine flag.
pub fn fingerprint(d: &RootDatum) -> String {
    let key = serde_json::json!({
        "cartan": d.finite_datum().cartan().rows(),
        "affine": d.is_affine(),
    });
    let digest = Sha256::digest(key.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn header_for(g: &CrystalGraph) -> Header {
    Header {
        format: FORMAT.into(),
        version: VERSION,
        datum: g.datum.to_spec(),
        fingerprint: fingerprint(&g.datum),
        word: g.word.period().iter().map(|&i| g.datum.label(i)).collect(),
        max_height: g.max_height,
        count: g.len(),
    }
}

pub fn render(g: &CrystalGraph) -> String {
    let d = &g.datum;
    let mut out = serde_json::to_string(&header_for(g)).expect("header serializes");
    out.push('\n');
    for id in 0..g.len() {
        let by_label = |v: &[i64]| v.iter().enumerate().map(|(i, &x)| (d.label(i).to_string(), x)).collect();
        let ids = |v: &[Option<usize>]| v.iter().enumerate().map(|(i, &x)| (d.label(i).to_string(), x)).collect();
        let line = Line {
            id,
            string: g.elements[id].coords().to_vec(),
            wt: d.weight_of(&g.weights[id]),
            phi: by_label(&g.phi[id]),
            phi_star: by_label(&g.phi_star[id]),
            f: ids(&g.f[id]),
            f_star: ids(&g.f_star[id]),
        };
        out.push_str(&serde_json::to_string(&line).expect("line serializes"));
        out.push('\n');
    }
    out
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let input = |e: std::io::Error| CliError::Input(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(input)?;
    tmp.write_all(contents.as_bytes()).map_err(input)?;
    tmp.persist(path).map_err(|e| input(e.error))?;
    Ok(())
}

pub fn read_header(path: &Path) -> Result<Header, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let first = text.lines().next().unwrap_or_default();
    serde_json::from_str(first).map_err(|e| CliError::Input(format!("bad header in {}: {e}", path.display())))
}

/// Parses a graph file. Header problems are input errors; a malformed
/// element line is reported against its element id.
pub fn load(path: &Path) -> Result<(Header, CrystalGraph), CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header: Header = serde_json::from_str(lines.next().unwrap_or_default())
        .map_err(|e| CliError::Input(format!("bad header in {}: {e}", path.display())))?;
    if header.format != FORMAT || header.version != VERSION {
        return Err(CliError::Input(format!("unsupported graph format {} v{}", header.format, header.version)));
    }
    let datum = RootDatum::from_spec(&header.datum)?;
    if fingerprint(&datum) != header.fingerprint {
        return Err(CliError::Input("root datum fingerprint does not match the header".into()));
    }
    let period = header
        .word
        .iter()
        .map(|&l| datum.index_of_label(l).ok_or_else(|| CliError::Input(format!("word label {l} out of range"))))
        .collect::<Result<Vec<_>, _>>()?;
    let word = Word::periodic(period, datum.rank())?;
    let rank = datum.rank();
    let n = header.count;
    let mut elements = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut phi = Vec::with_capacity(n);
    let mut phi_star = Vec::with_capacity(n);
    let mut f = Vec::with_capacity(n);
    let mut f_star = Vec::with_capacity(n);
    for (k, raw) in lines.enumerate() {
        let bad = |what: String| CliError::Violation(format!("element {k}: {what}"));
        let line: Line = serde_json::from_str(raw).map_err(|e| bad(format!("unreadable line: {e}")))?;
        if line.id != k {
            return Err(bad(format!("line carries id {}", line.id)));
        }
        let column = |m: &BTreeMap<String, i64>| -> Result<Vec<i64>, CliError> {
            (0..rank)
                .map(|i| m.get(&datum.label(i).to_string()).copied().ok_or_else(|| bad(format!("missing label {}", datum.label(i)))))
                .collect()
        };
        let table = |m: &BTreeMap<String, Option<usize>>| -> Result<Vec<Option<usize>>, CliError> {
            (0..rank)
                .map(|i| m.get(&datum.label(i).to_string()).copied().ok_or_else(|| bad(format!("missing label {}", datum.label(i)))))
                .collect()
        };
        elements.push(CrystalElt::new(line.string));
        weights.push(datum.coefficients(&line.wt).map_err(|e| bad(e.to_string()))?);
        phi.push(column(&line.phi)?);
        phi_star.push(column(&line.phi_star)?);
        f.push(table(&line.f)?);
        f_star.push(table(&line.f_star)?);
    }
    if elements.len() != n {
        return Err(CliError::Violation(format!("header announces {n} elements, file has {}", elements.len())));
    }
    let g = CrystalGraph::from_parts(datum, word, header.max_height, elements, weights, phi, phi_star, f, f_star)
        .map_err(|e| CliError::Violation(e.to_string()))?;
    Ok((header, g))
}

/// Ids whose stored row differs from a fresh enumeration.
pub fn diff_rows(stored: &CrystalGraph, fresh: &CrystalGraph) -> Vec<usize> {
    let n = stored.len().max(fresh.len());
    (0..n)
        .filter(|&id| {
            id >= stored.len()
                || id >= fresh.len()
                || stored.elements[id] != fresh.elements[id]
                || stored.weights[id] != fresh.weights[id]
                || stored.phi[id] != fresh.phi[id]
                || stored.phi_star[id] != fresh.phi_star[id]
                || stored.f[id] != fresh.f[id]
                || stored.f_star[id] != fresh.f_star[id]
        })
        .collect()
}

/// Cache file name for a datum, word and height bound.
pub fn cache_path(dir: &Path, d: &RootDatum, word: &Word, max_height: u32) -> PathBuf {
    let w: Vec<String> = word.period().iter().map(|&i| d.label(i).to_string()).collect();
    dir.join(format!("graph-{}-w{}-h{max_height}.jsonl", &fingerprint(d)[..16], w.join(".")))
}
