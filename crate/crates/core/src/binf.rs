//! A computable model of `B(∞)` through string coordinates along a word.
//!
//! An element is a finitely supported sequence `a = (a_1, a_2, …)` attached
//! to a word `ι = (i_1, i_2, …)`; its weight is `Σ_k a_k α_{i_k}`. For a
//! direction `i` put, over the positions `k` with `i_k = i`,
//!
//! ```text
//! σ_k(a) = a_k + Σ_{j>k} ⟨α_{i_j}, α̌_i⟩ a_j
//! ```
//!
//! and `up_i(a) = max(0, max_k σ_k(a))`. Raising (`e_i`) adds one at the
//! smallest maximizing position, lowering (`f_i`) removes one at the largest
//! maximizing position when `up_i(a) > 0`; `φ_i = up_i`.
//!
//! The star structure is obtained by prepending `i` to the word: the first
//! coordinate in that word is the `f*_i`-depth of the element.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::crystal::{Crystal, Elementary, Ext, Tensor};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::root_datum::RootDatum;

/// An infinite word over `I`: a finite prefix followed by a repeated period.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    prefix: Vec<usize>,
    period: Vec<usize>,
}

impl Word {
    /// A periodic word; every index in `0..rank` must occur in the period.
    pub fn periodic(period: Vec<usize>, rank: usize) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidWord("empty period".into()));
        }
        for i in 0..rank {
            if !period.contains(&i) {
                return Err(Error::InvalidWord(format!("index {i} missing from period {period:?}")));
            }
        }
        if let Some(bad) = period.iter().find(|&&i| i >= rank) {
            return Err(Error::InvalidWord(format!("index {bad} out of range")));
        }
        Ok(Word { prefix: Vec::new(), period })
    }

    /// The period `(0, 1, …, rank−1)`.
    pub fn standard(rank: usize) -> Self {
        Word { prefix: Vec::new(), period: (0..rank).collect() }
    }

    /// The word with `i` placed in front.
    pub fn with_prefix(&self, i: usize) -> Self {
        let mut prefix = vec![i];
        prefix.extend_from_slice(&self.prefix);
        Word { prefix, period: self.period.clone() }
    }

    pub fn period(&self) -> &[usize] {
        &self.period
    }

    pub fn prefix(&self) -> &[usize] {
        &self.prefix
    }

    pub fn letter(&self, k: usize) -> usize {
        if k < self.prefix.len() {
            self.prefix[k]
        } else {
            self.period[(k - self.prefix.len()) % self.period.len()]
        }
    }

    /// The first position `≥ from` carrying the letter `i`.
    fn next_position(&self, i: usize, from: usize) -> usize {
        let mut k = from;
        while self.letter(k) != i {
            k += 1;
        }
        k
    }
}

/// String coordinates, trailing zeros trimmed.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CrystalElt(Vec<u32>);

impl CrystalElt {
    pub fn zero() -> Self {
        CrystalElt(Vec::new())
    }

    pub fn new(mut coords: Vec<u32>) -> Self {
        while coords.last() == Some(&0) {
            coords.pop();
        }
        CrystalElt(coords)
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, k: usize) -> u32 {
        self.0.get(k).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn height(&self) -> u64 {
        self.0.iter().map(|&x| x as u64).sum()
    }

    fn bumped(&self, k: usize, up: bool) -> Self {
        let mut v = self.0.clone();
        if v.len() <= k {
            v.resize(k + 1, 0);
        }
        if up {
            v[k] += 1;
        } else {
            v[k] -= 1;
        }
        CrystalElt::new(v)
    }
}

impl fmt::Debug for CrystalElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// The maximizing data of the signature rule in one direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Signature {
    pub up: i64,
    /// Where `e_i` adds a box.
    pub raise_at: usize,
    /// Where `f_i` removes a box, when `up > 0`.
    pub lower_at: Option<usize>,
}

/// `B(∞)` realized along a fixed word.
#[derive(Clone, Debug)]
pub struct BInfinity<'a> {
    datum: &'a RootDatum,
    word: Word,
}

impl<'a> BInfinity<'a> {
    pub fn new(datum: &'a RootDatum, word: Word) -> Self {
        BInfinity { datum, word }
    }

    pub fn standard(datum: &'a RootDatum) -> Self {
        BInfinity { datum, word: Word::standard(datum.rank()) }
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn with_word(&self, word: Word) -> BInfinity<'a> {
        BInfinity { datum: self.datum, word }
    }

    pub fn signature(&self, a: &CrystalElt, i: usize) -> Signature {
        let len = a.coords().len();
        let tail = self.word.next_position(i, len);
        // σ at the first free i-position is 0; walk backwards from there
        let mut best = 0i64;
        let mut raise_at = tail;
        let mut lower_at: Option<usize> = None;
        let mut suffix = 0i64;
        for k in (0..len).rev() {
            let letter = self.word.letter(k);
            let ak = a.get(k) as i64;
            if letter == i {
                let sigma = ak + suffix;
                if sigma > best {
                    best = sigma;
                    raise_at = k;
                    lower_at = Some(k);
                } else if sigma == best {
                    raise_at = k;
                    if lower_at.is_none() && best > 0 {
                        lower_at = Some(k);
                    }
                }
            }
            suffix += self.datum.cartan().get(letter, i) * ak;
        }
        Signature { up: best, raise_at, lower_at: if best > 0 { lower_at } else { None } }
    }

    /// Weight-raising operator `e_i`.
    pub fn raise(&self, a: &CrystalElt, i: usize) -> CrystalElt {
        a.bumped(self.signature(a, i).raise_at, true)
    }

    /// Lowering operator `f_i`, toward the zero sequence.
    pub fn lower(&self, a: &CrystalElt, i: usize) -> Option<CrystalElt> {
        // a zero coordinate at the lowering position only occurs off the image
        self.signature(a, i).lower_at.filter(|&k| a.get(k) > 0).map(|k| a.bumped(k, false))
    }

    pub fn weight(&self, a: &CrystalElt) -> Vec<i64> {
        let mut w = vec![0; self.datum.rank()];
        for (k, &x) in a.coords().iter().enumerate() {
            w[self.word.letter(k)] += x as i64;
        }
        w
    }

    /// A lowering path to the zero sequence: the directions used, in order.
    pub fn lowering_path(&self, a: &CrystalElt) -> Result<Vec<usize>> {
        let steps = a.height();
        let mut path = Vec::with_capacity(steps as usize);
        let mut cur = a.clone();
        for _ in 0..steps {
            let next = (0..self.datum.rank()).find_map(|i| self.lower(&cur, i).map(|b| (i, b)));
            match next {
                Some((i, b)) => {
                    path.push(i);
                    cur = b;
                }
                None => break,
            }
        }
        if !cur.is_zero() {
            return Err(Error::Invariant(format!(
                "lowering from {a:?} got stuck at {cur:?} after {} steps",
                path.len()
            )));
        }
        Ok(path)
    }

    /// Raises the zero sequence along the reverse of a lowering path.
    pub fn replay(&self, path: &[usize]) -> CrystalElt {
        path.iter().rev().fold(CrystalElt::zero(), |acc, &i| self.raise(&acc, i))
    }

    /// The same crystal element in the coordinates of another word.
    pub fn restring(&self, a: &CrystalElt, target: &BInfinity<'_>) -> Result<CrystalElt> {
        Ok(target.replay(&self.lowering_path(a)?))
    }

    fn starred(&self, i: usize) -> BInfinity<'a> {
        self.with_word(self.word.with_prefix(i))
    }

    /// The `f*_i`-depth of `a`: its first coordinate along `(i, ι)`. In the
    /// positive convention this is `φ*_i(a)`.
    pub fn star_depth(&self, a: &CrystalElt, i: usize) -> Result<u32> {
        Ok(self.restring(a, &self.starred(i))?.get(0))
    }

    pub fn star_raise(&self, a: &CrystalElt, i: usize) -> Result<CrystalElt> {
        let star = self.starred(i);
        let c = self.restring(a, &star)?;
        star.restring(&c.bumped(0, true), self)
    }

    pub fn star_lower(&self, a: &CrystalElt, i: usize) -> Result<Option<CrystalElt>> {
        let star = self.starred(i);
        let c = self.restring(a, &star)?;
        if c.get(0) == 0 {
            return Ok(None);
        }
        Ok(Some(star.restring(&c.bumped(0, false), self)?))
    }

    /// `Ψ_i(a) = (a′, n)` with `a = (e*_i)^n a′` and `f*_i(a′) = 0`.
    pub fn psi(&self, a: &CrystalElt, i: usize) -> Result<(CrystalElt, u32)> {
        let star = self.starred(i);
        let c = self.restring(a, &star)?;
        let n = c.get(0);
        let mut peeled = c.0.clone();
        if !peeled.is_empty() {
            peeled[0] = 0;
        }
        Ok((star.restring(&CrystalElt::new(peeled), self)?, n))
    }

    /// Inverse of `psi`: `(e*_i)^n a′`.
    pub fn psi_inverse(&self, a_prime: &CrystalElt, n: u32, i: usize) -> Result<CrystalElt> {
        let star = self.starred(i);
        let mut c = self.restring(a_prime, &star)?.0;
        if c.is_empty() {
            c.push(0);
        }
        c[0] += n;
        star.restring(&CrystalElt::new(c), self)
    }

    pub fn phi_star(&self, a: &CrystalElt, i: usize) -> Result<i64> {
        Ok(self.star_depth(a, i)? as i64)
    }

    pub fn eps_star(&self, a: &CrystalElt, i: usize) -> Result<i64> {
        Ok(self.phi_star(a, i)? - self.datum.pair(&self.weight(a), i))
    }
}

impl Crystal for BInfinity<'_> {
    type Elt = CrystalElt;

    fn datum(&self) -> &RootDatum {
        self.datum
    }

    fn wt(&self, b: &CrystalElt) -> Vec<i64> {
        self.weight(b)
    }

    fn e(&self, b: &CrystalElt, i: usize) -> Option<CrystalElt> {
        Some(self.raise(b, i))
    }

    fn f(&self, b: &CrystalElt, i: usize) -> Option<CrystalElt> {
        self.lower(b, i)
    }

    fn phi(&self, b: &CrystalElt, i: usize) -> Ext {
        Ext::Fin(self.signature(b, i).up)
    }
}

/// The star structure on the same set, as a crystal in its own right.
/// Star operations that fail internally are reported as `None`.
#[derive(Clone, Debug)]
pub struct StarCrystal<'a>(pub BInfinity<'a>);

impl Crystal for StarCrystal<'_> {
    type Elt = CrystalElt;

    fn datum(&self) -> &RootDatum {
        self.0.datum
    }

    fn wt(&self, b: &CrystalElt) -> Vec<i64> {
        self.0.weight(b)
    }

    fn e(&self, b: &CrystalElt, i: usize) -> Option<CrystalElt> {
        self.0.star_raise(b, i).ok()
    }

    fn f(&self, b: &CrystalElt, i: usize) -> Option<CrystalElt> {
        self.0.star_lower(b, i).ok().flatten()
    }

    fn phi(&self, b: &CrystalElt, i: usize) -> Ext {
        self.0.phi_star(b, i).map_or(Ext::NegInf, Ext::Fin)
    }
}

/// Truncated enumeration of `B(∞)` with cached statistics and operation
/// tables for both crystal structures.
///
/// Raising tables hold `None` when the target lies above the height bound;
/// lowering tables hold `None` when the operator kills the element.
#[derive(Clone, Debug, PartialEq)]
pub struct CrystalGraph {
    pub datum: RootDatum,
    pub word: Word,
    pub max_height: u32,
    pub elements: Vec<CrystalElt>,
    pub weights: Vec<Vec<i64>>,
    pub phi: Vec<Vec<i64>>,
    pub phi_star: Vec<Vec<i64>>,
    pub e: Vec<Vec<Option<usize>>>,
    pub f: Vec<Vec<Option<usize>>>,
    pub e_star: Vec<Vec<Option<usize>>>,
    pub f_star: Vec<Vec<Option<usize>>>,
    index: HashMap<CrystalElt, usize>,
}

impl CrystalGraph {
    pub fn model(&self) -> BInfinity<'_> {
        BInfinity::new(&self.datum, self.word.clone())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn id_of(&self, a: &CrystalElt) -> Option<usize> {
        self.index.get(a).copied()
    }

    pub fn height(&self, id: usize) -> u32 {
        self.weights[id].iter().sum::<i64>() as u32
    }

    pub fn eps(&self, id: usize, i: usize) -> i64 {
        self.phi[id][i] - self.datum.pair(&self.weights[id], i)
    }

    pub fn eps_star(&self, id: usize, i: usize) -> i64 {
        self.phi_star[id][i] - self.datum.pair(&self.weights[id], i)
    }

    /// Element counts per weight.
    pub fn weight_multiplicities(&self) -> BTreeMap<Vec<i64>, usize> {
        let mut m = BTreeMap::new();
        for w in &self.weights {
            *m.entry(w.clone()).or_default() += 1;
        }
        m
    }

    /// Reassembles a graph from stored columns, rebuilding the raising
    /// tables as inverses of the lowering tables.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        datum: RootDatum,
        word: Word,
        max_height: u32,
        elements: Vec<CrystalElt>,
        weights: Vec<Vec<i64>>,
        phi: Vec<Vec<i64>>,
        phi_star: Vec<Vec<i64>>,
        f: Vec<Vec<Option<usize>>>,
        f_star: Vec<Vec<Option<usize>>>,
    ) -> Result<Self> {
        let n = elements.len();
        let rank = datum.rank();
        for (name, len) in [("weights", weights.len()), ("phi", phi.len()), ("phiStar", phi_star.len()), ("f", f.len()), ("fStar", f_star.len())] {
            if len != n {
                return Err(Error::Shape(format!("{name} column has {len} rows, expected {n}")));
            }
        }
        let invert = |table: &Vec<Vec<Option<usize>>>| -> Result<Vec<Vec<Option<usize>>>> {
            let mut inv = vec![vec![None; rank]; n];
            for (id, row) in table.iter().enumerate() {
                if row.len() != rank {
                    return Err(Error::Shape(format!("element {id} has {} table entries", row.len())));
                }
                for (i, t) in row.iter().enumerate() {
                    if let Some(t) = *t {
                        if t >= n {
                            return Err(Error::Shape(format!("element {id} points to missing id {t}")));
                        }
                        inv[t][i] = Some(id);
                    }
                }
            }
            Ok(inv)
        };
        let e = invert(&f)?;
        let e_star = invert(&f_star)?;
        let index = elements.iter().cloned().enumerate().map(|(k, a)| (a, k)).collect();
        Ok(CrystalGraph { datum, word, max_height, elements, weights, phi, phi_star, e, f, e_star, f_star, index })
    }
}

/// Breadth-first closure of the zero sequence under raising, up to the
/// height bound, with all tables filled.
pub fn enumerate(datum: &RootDatum, word: &Word, max_height: u32) -> Result<CrystalGraph> {
    enumerate_with(datum, word, max_height, Execution::default())
}

pub fn enumerate_with(datum: &RootDatum, word: &Word, max_height: u32, exec: Execution) -> Result<CrystalGraph> {
    let model = BInfinity::new(datum, word.clone());
    let rank = datum.rank();
    let mut all = vec![CrystalElt::zero()];
    let mut frontier = vec![CrystalElt::zero()];
    for _ in 0..max_height {
        let mut next = exec.flat_map_range(frontier.len(), |k| {
            (0..rank).map(|i| model.raise(&frontier[k], i)).collect::<Vec<_>>()
        });
        next.sort();
        next.dedup();
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all.sort();
    let index: HashMap<CrystalElt, usize> = all.iter().cloned().enumerate().map(|(k, a)| (a, k)).collect();

    struct Row {
        weight: Vec<i64>,
        phi: Vec<i64>,
        phi_star: Vec<i64>,
        e: Vec<Option<usize>>,
        f: Vec<Option<usize>>,
        e_star: Vec<Option<usize>>,
        f_star: Vec<Option<usize>>,
    }
    let lookup = |a: &CrystalElt| index.get(a).copied();
    let rows: Vec<Result<Row>> = exec.map(&all, |a| {
        let mut row = Row {
            weight: model.weight(a),
            phi: Vec::with_capacity(rank),
            phi_star: Vec::with_capacity(rank),
            e: Vec::with_capacity(rank),
            f: Vec::with_capacity(rank),
            e_star: Vec::with_capacity(rank),
            f_star: Vec::with_capacity(rank),
        };
        for i in 0..rank {
            let sig = model.signature(a, i);
            row.phi.push(sig.up);
            row.e.push(lookup(&a.bumped(sig.raise_at, true)));
            row.f.push(model.lower(a, i).and_then(|b| lookup(&b)));
            let star = model.starred(i);
            let c = model.restring(a, &star)?;
            row.phi_star.push(c.get(0) as i64);
            row.e_star.push(lookup(&star.restring(&c.bumped(0, true), &model)?));
            row.f_star.push(if c.get(0) == 0 {
                None
            } else {
                lookup(&star.restring(&c.bumped(0, false), &model)?)
            });
        }
        Ok(row)
    });
    let n = all.len();
    let mut g = CrystalGraph {
        datum: datum.clone(),
        word: word.clone(),
        max_height,
        elements: all,
        weights: Vec::with_capacity(n),
        phi: Vec::with_capacity(n),
        phi_star: Vec::with_capacity(n),
        e: Vec::with_capacity(n),
        f: Vec::with_capacity(n),
        e_star: Vec::with_capacity(n),
        f_star: Vec::with_capacity(n),
        index,
    };
    for row in rows {
        let row = row?;
        g.weights.push(row.weight);
        g.phi.push(row.phi);
        g.phi_star.push(row.phi_star);
        g.e.push(row.e);
        g.f.push(row.f);
        g.e_star.push(row.e_star);
        g.f_star.push(row.f_star);
    }
    Ok(g)
}

/// A failed check, located at an element id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub check: &'static str,
    pub element: Option<usize>,
    pub detail: String,
}

impl Finding {
    fn at(check: &'static str, element: usize, detail: String) -> Self {
        Finding { check, element: Some(element), detail }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub checked: usize,
    pub findings: Vec<Finding>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.findings.is_empty()
    }

    fn new(name: &str, checked: usize, findings: Vec<Finding>) -> Self {
        SuiteReport { name: name.to_string(), checked, findings }
    }
}

/// Every element other than the zero sequence admits some `f_i ≠ 0` and
/// some `f*_i ≠ 0`.
pub fn highest_weight_report(g: &CrystalGraph) -> SuiteReport {
    let mut findings = Vec::new();
    for id in 0..g.len() {
        if g.elements[id].is_zero() {
            continue;
        }
        if g.f[id].iter().all(Option::is_none) {
            findings.push(Finding::at("highest-weight", id, "all f_i vanish".into()));
        }
        if g.f_star[id].iter().all(Option::is_none) {
            findings.push(Finding::at("highest-weight", id, "all f*_i vanish".into()));
        }
    }
    SuiteReport::new("highest-weight", g.len(), findings)
}

/// `|{a : wt(a) = λ}| = P(λ)` for every `λ ∈ Λ^pos` up to the height bound.
pub fn weight_count_report(g: &CrystalGraph) -> Result<SuiteReport> {
    let counts = g.weight_multiplicities();
    let roots = g.datum.positive_roots(Some(g.max_height.max(1)))?;
    let mut findings = Vec::new();
    let mut checked = 0;
    for lambda in positive_cone(g.datum.rank(), g.max_height) {
        checked += 1;
        let have = counts.get(&lambda).copied().unwrap_or(0) as u128;
        let want = roots.partition_count(&lambda);
        if have != want {
            findings.push(Finding {
                check: "weight-count",
                element: None,
                detail: format!("weight {lambda:?}: {have} elements, partition function {want}"),
            });
        }
    }
    Ok(SuiteReport::new("weight-count", checked, findings))
}

/// All coefficient vectors `≥ 0` of height at most `h`.
pub fn positive_cone(rank: usize, h: u32) -> Vec<Vec<i64>> {
    fn go(rank: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == rank {
            out.push(cur.clone());
            return;
        }
        for x in 0..=left {
            cur.push(x);
            go(rank, left - x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(rank, h as i64, &mut Vec::new(), &mut out);
    out
}

fn string_length(table: &[Vec<Option<usize>>], id: usize, i: usize) -> i64 {
    let mut n = 0;
    let mut cur = table[id][i];
    while let Some(next) = cur {
        n += 1;
        cur = table[next][i];
    }
    n
}

/// φ-normality of both structures, the partial-inverse property of the
/// tables, and agreement of the cached statistics with the model.
pub fn axiom_report(g: &CrystalGraph, exec: Execution) -> SuiteReport {
    let model = g.model();
    let rank = g.datum.rank();
    let findings = exec.flat_map_range(g.len(), |id| {
        let mut out = Vec::new();
        let a = &g.elements[id];
        let below_top = g.height(id) < g.max_height;
        if model.weight(a) != g.weights[id] {
            out.push(Finding::at("axioms", id, "stored weight differs from the string".into()));
        }
        for i in 0..rank {
            let len = string_length(&g.f, id, i);
            if g.phi[id][i] != len {
                out.push(Finding::at("axioms", id, format!("phi_{i} = {} but f-string has length {len}", g.phi[id][i])));
            }
            let len_star = string_length(&g.f_star, id, i);
            if g.phi_star[id][i] != len_star {
                out.push(Finding::at(
                    "axioms",
                    id,
                    format!("phiStar_{i} = {} but f*-string has length {len_star}", g.phi_star[id][i]),
                ));
            }
            let sig = model.signature(a, i);
            if sig.up != g.phi[id][i] {
                out.push(Finding::at("axioms", id, format!("phi_{i} differs from the signature value {}", sig.up)));
            }
            let eps = g.eps(id, i);
            let eps_model = model.eps(a, i);
            if Ext::Fin(eps) != eps_model {
                out.push(Finding::at("axioms", id, format!("eps_{i} = {eps} but model gives {eps_model}")));
            }
            match model.lower(a, i) {
                Some(b) if g.f[id][i] != g.id_of(&b) => {
                    out.push(Finding::at("axioms", id, format!("f_{i} table entry differs from the model")))
                }
                None if g.f[id][i].is_some() => {
                    out.push(Finding::at("axioms", id, format!("f_{i} table entry should be null")))
                }
                _ => {}
            }
            for (name, up, down) in [("", &g.e, &g.f), ("*", &g.e_star, &g.f_star)] {
                if let Some(t) = down[id][i] {
                    if up[t][i] != Some(id) {
                        out.push(Finding::at("axioms", id, format!("e{name}_{i}(f{name}_{i}(b)) != b")));
                    }
                }
                match up[id][i] {
                    Some(t) if down[t][i] != Some(id) => {
                        out.push(Finding::at("axioms", id, format!("f{name}_{i}(e{name}_{i}(b)) != b")));
                    }
                    None if below_top => {
                        out.push(Finding::at("axioms", id, format!("e{name}_{i} missing below the height bound")));
                    }
                    _ => {}
                }
            }
        }
        out
    });
    SuiteReport::new("axioms", g.len(), findings)
}

/// For `i ≠ j`, each of `e_i, f_i` commutes with each of `e*_j, f*_j`, with
/// `0` absorbing.
pub fn commutation_report(g: &CrystalGraph, exec: Execution) -> SuiteReport {
    let model = g.model();
    let rank = g.datum.rank();
    type Op<'m> = Box<dyn Fn(&CrystalElt) -> Option<CrystalElt> + Sync + Send + 'm>;
    let findings = exec.flat_map_range(g.len(), |id| {
        let a = &g.elements[id];
        let mut out = Vec::new();
        for i in 0..rank {
            for j in 0..rank {
                if i == j {
                    continue;
                }
                let m = &model;
                let plain: [(&str, Op); 2] = [
                    ("e", Box::new(move |b: &CrystalElt| Some(m.raise(b, i)))),
                    ("f", Box::new(move |b: &CrystalElt| m.lower(b, i))),
                ];
                let star: [(&str, Op); 2] = [
                    ("e*", Box::new(move |b: &CrystalElt| m.star_raise(b, j).ok())),
                    ("f*", Box::new(move |b: &CrystalElt| m.star_lower(b, j).ok().flatten())),
                ];
                for (pn, p) in &plain {
                    for (sn, s) in &star {
                        let ps = s(a).and_then(|b| p(&b));
                        let sp = p(a).and_then(|b| s(&b));
                        if ps != sp {
                            out.push(Finding::at(
                                "commutation",
                                id,
                                format!("{pn}_{i} {sn}_{j}: {ps:?} vs {sp:?}"),
                            ));
                        }
                    }
                }
            }
        }
        out
    });
    SuiteReport::new("commutation", g.len(), findings)
}

/// `Ψ_i` is a crystal morphism into `B(∞) ⊗ B_i` on every element below the
/// height bound, and a bijection onto `{(a′, n) : f*_i(a′) = 0}` within the
/// bound.
pub fn psi_report(g: &CrystalGraph, exec: Execution) -> SuiteReport {
    let model = g.model();
    let rank = g.datum.rank();
    let ids: Vec<usize> = (0..g.len()).filter(|&id| g.height(id) < g.max_height).collect();
    let mut findings = exec.flat_map_range(ids.len(), |k| {
        let id = ids[k];
        let a = &g.elements[id];
        let mut out = Vec::new();
        for i in 0..rank {
            let tensor = Tensor::new(model.clone(), Elementary::new(&g.datum, i)).expect("same datum");
            let (ap, n) = match model.psi(a, i) {
                Ok(x) => x,
                Err(err) => {
                    out.push(Finding::at("psi", id, err.to_string()));
                    continue;
                }
            };
            let img = (ap.clone(), n as u64);
            if model.star_lower(&ap, i).ok().flatten().is_some() {
                out.push(Finding::at("psi", id, format!("Psi_{i} first factor is not star-lowest")));
            }
            if tensor.wt(&img) != model.weight(a) {
                out.push(Finding::at("psi", id, format!("Psi_{i} changes the weight")));
            }
            for j in 0..rank {
                if tensor.phi(&img, j) != model.phi(a, j) || tensor.eps(&img, j) != model.eps(a, j) {
                    out.push(Finding::at("psi", id, format!("Psi_{i} does not preserve phi_{j}/eps_{j}")));
                }
                let via_e = model.psi(&model.raise(a, j), i).ok().map(|(x, n)| (x, n as u64));
                if via_e != tensor.e(&img, j) {
                    out.push(Finding::at("psi", id, format!("Psi_{i} does not intertwine e_{j}")));
                }
                let via_f = model.lower(a, j).map(|b| model.psi(&b, i).ok().map(|(x, n)| (x, n as u64)));
                let tf = tensor.f(&img, j);
                let agrees = match via_f {
                    None => tf.is_none(),
                    Some(v) => v == tf,
                };
                if !agrees {
                    out.push(Finding::at("psi", id, format!("Psi_{i} does not intertwine f_{j}")));
                }
            }
        }
        out
    });

    // bijectivity onto the star-lowest pairs within the bound
    for i in 0..rank {
        let mut seen: HashMap<(usize, u32), usize> = HashMap::new();
        for id in 0..g.len() {
            let (ap, n) = match model.psi(&g.elements[id], i) {
                Ok(x) => x,
                Err(err) => {
                    findings.push(Finding::at("psi", id, err.to_string()));
                    continue;
                }
            };
            let Some(pid) = g.id_of(&ap) else {
                findings.push(Finding::at("psi", id, format!("Psi_{i} leaves the graph")));
                continue;
            };
            if let Some(prev) = seen.insert((pid, n), id) {
                findings.push(Finding::at("psi", id, format!("Psi_{i} collides with element {prev}")));
            }
        }
        for pid in 0..g.len() {
            if g.f_star[pid][i].is_some() {
                continue;
            }
            for n in 0..=(g.max_height - g.height(pid)) {
                if !seen.contains_key(&(pid, n)) {
                    findings.push(Finding::at("psi", pid, format!("({pid}, {n}) has no Psi_{i} preimage")));
                }
            }
        }
    }
    SuiteReport::new("psi", ids.len(), findings)
}

/// Restringing to a second word and back is the identity and commutes with
/// every `e_i`, `f_i`.
pub fn restring_report(g: &CrystalGraph, other: &Word, exec: Execution) -> SuiteReport {
    let model = g.model();
    let target = model.with_word(other.clone());
    let rank = g.datum.rank();
    let findings = exec.flat_map_range(g.len(), |id| {
        let a = &g.elements[id];
        let mut out = Vec::new();
        let b = match model.restring(a, &target) {
            Ok(b) => b,
            Err(err) => return vec![Finding::at("restring", id, err.to_string())],
        };
        if target.restring(&b, &model).ok().as_ref() != Some(a) {
            out.push(Finding::at("restring", id, "round trip is not the identity".into()));
        }
        for i in 0..rank {
            let lhs = target.restring(&target.raise(&b, i), &model).ok();
            if lhs != Some(model.raise(a, i)) {
                out.push(Finding::at("restring", id, format!("does not commute with e_{i}")));
            }
            let lhs = target.lower(&b, i).map(|c| target.restring(&c, &model).ok());
            let rhs = model.lower(a, i).map(Some);
            if lhs != rhs {
                out.push(Finding::at("restring", id, format!("does not commute with f_{i}")));
            }
        }
        out
    });
    SuiteReport::new("restring", g.len(), findings)
}
