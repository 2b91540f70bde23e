//! Levi restrictions of an enumerated `B(∞)`: the star-lowest subsets `B^m`,
//! the counting form of `B(∞) ≅ B^m ⊗ B_m(∞)`, the splitting of `B^m` into
//! finite `m`-crystals, and the matching character computation.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::binf::{enumerate_with, CrystalGraph, Word};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::root_datum::{RootDatum, RootMultiset};

/// A subset `m ⊆ I` spanning a finite-type subdiagram.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LeviSpec {
    indices: Vec<usize>,
}

impl LeviSpec {
    pub fn new(datum: &RootDatum, indices: &[usize]) -> Result<Self> {
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != indices.len() || sorted.iter().any(|&i| i >= datum.rank()) {
            return Err(Error::InvalidLevi(format!("{indices:?}")));
        }
        if !sorted.is_empty() {
            datum.levi(&sorted)?;
        }
        Ok(LeviSpec { indices: sorted })
    }

    pub fn empty() -> Self {
        LeviSpec { indices: Vec::new() }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// The Levi root datum, `None` for `m = ∅`.
    pub fn datum(&self, ambient: &RootDatum) -> Result<Option<RootDatum>> {
        if self.indices.is_empty() {
            Ok(None)
        } else {
            ambient.levi(&self.indices).map(Some)
        }
    }

    /// Embeds Levi coefficients into ambient coefficients.
    pub fn embed(&self, rank: usize, local: &[i64]) -> Vec<i64> {
        let mut v = vec![0; rank];
        for (k, &i) in self.indices.iter().enumerate() {
            v[i] = local[k];
        }
        v
    }

    fn supported(&self, coeffs: &[i64]) -> bool {
        coeffs.iter().enumerate().all(|(i, &c)| c == 0 || self.contains(i))
    }
}

/// `B^m`: elements killed by every `f*_i`, `i ∈ m`, with the induced
/// operations. For `i ∈ m`, `f_i` is the ambient one and `e_i` is the ambient
/// one when it stays inside, null otherwise.
#[derive(Clone, Debug)]
pub struct BmSubset<'g> {
    pub graph: &'g CrystalGraph,
    pub m: LeviSpec,
    pub members: Vec<usize>,
    member: Vec<bool>,
}

impl<'g> BmSubset<'g> {
    pub fn contains(&self, id: usize) -> bool {
        self.member[id]
    }

    /// Induced `e_j`. The outer `None` means the ambient target lies beyond
    /// the height bound.
    pub fn e(&self, id: usize, j: usize) -> Option<Option<usize>> {
        let t = self.graph.e[id][j]?;
        Some(if self.m.contains(j) && !self.member[t] { None } else { Some(t) })
    }

    pub fn f(&self, id: usize, j: usize) -> Option<usize> {
        self.graph.f[id][j]
    }

    pub fn count_by_weight(&self) -> BTreeMap<Vec<i64>, usize> {
        let mut m = BTreeMap::new();
        for &id in &self.members {
            *m.entry(self.graph.weights[id].clone()).or_default() += 1;
        }
        m
    }
}

pub fn extract_bm<'g>(g: &'g CrystalGraph, m: &LeviSpec) -> BmSubset<'g> {
    let member: Vec<bool> = (0..g.len()).map(|id| m.indices().iter().all(|&i| g.f_star[id][i].is_none())).collect();
    let members = (0..g.len()).filter(|&id| member[id]).collect();
    BmSubset { graph: g, m: m.clone(), members, member }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionFailure {
    pub weight: Vec<i64>,
    pub ambient: u128,
    pub product_sum: u128,
}

/// For every weight up to the height bound,
/// `|B(λ)| = Σ_{μ+ν=λ, ν ∈ span(m)} |B^m(μ)|·|B_m(ν)|`, with the Levi graph
/// enumerated independently on the sub-datum.
pub fn verify_complete_decomposition(g: &CrystalGraph, m: &LeviSpec, exec: Execution) -> Result<Vec<DecompositionFailure>> {
    let rank = g.datum.rank();
    let bm = extract_bm(g, m).count_by_weight();
    let levi: BTreeMap<Vec<i64>, usize> = match m.datum(&g.datum)? {
        None => BTreeMap::from([(vec![0; rank], 1)]),
        Some(ld) => enumerate_with(&ld, &Word::standard(ld.rank()), g.max_height, exec)?
            .weight_multiplicities()
            .into_iter()
            .map(|(w, c)| (m.embed(rank, &w), c))
            .collect(),
    };
    let ambient = g.weight_multiplicities();
    let mut failures = Vec::new();
    for lambda in crate::binf::positive_cone(rank, g.max_height) {
        let have = ambient.get(&lambda).copied().unwrap_or(0) as u128;
        let mut sum = 0u128;
        for (nu, &c) in &levi {
            let mu: Vec<i64> = lambda.iter().zip(nu).map(|(a, b)| a - b).collect();
            if let Some(&b) = bm.get(&mu) {
                sum += (b * c) as u128;
            }
        }
        if have != sum {
            failures.push(DecompositionFailure { weight: lambda, ambient: have, product_sum: sum });
        }
    }
    Ok(failures)
}

/// One connected component of `B^m` under the induced `m`-operations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    /// The element killed by every `f_i`, `i ∈ m`.
    pub extreme: usize,
    pub weight: Vec<i64>,
    pub size: usize,
    pub truncated: bool,
}

/// Splits `B^m` into components under `{e_i, f_i : i ∈ m}`. Components that
/// reach the height bound are flagged as truncated; complete ones are checked
/// against the shape of an irreducible `m`-crystal.
pub fn components(b: &BmSubset<'_>) -> Result<Vec<Component>> {
    let g = b.graph;
    let m = b.m.indices();
    let mut seen = vec![false; g.len()];
    let mut out = Vec::new();
    let levi = b.m.datum(&g.datum)?;
    for &start in &b.members {
        if seen[start] {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut elems = Vec::new();
        let mut truncated = false;
        while let Some(id) = queue.pop_front() {
            elems.push(id);
            for &i in m {
                let up = b.e(id, i);
                if up.is_none() {
                    truncated = true;
                }
                for t in [up.flatten(), b.f(id, i)].into_iter().flatten() {
                    if b.contains(t) && !seen[t] {
                        seen[t] = true;
                        queue.push_back(t);
                    }
                }
            }
        }
        let lowest: Vec<usize> = elems.iter().copied().filter(|&id| m.iter().all(|&i| b.f(id, i).is_none())).collect();
        let extreme = *lowest.first().ok_or_else(|| {
            Error::Invariant(format!("component of element {start} has no element killed by all f_i"))
        })?;
        if !truncated {
            if lowest.len() != 1 {
                return Err(Error::Invariant(format!(
                    "component of element {extreme} has {} lowest elements",
                    lowest.len()
                )));
            }
            let expected = match &levi {
                None => 1,
                Some(ld) => {
                    let labels: Vec<i64> = m.iter().map(|&i| -g.datum.pair(&g.weights[extreme], i)).collect();
                    weyl_dimension(ld, &labels)?
                }
            };
            if expected != elems.len() as u128 {
                return Err(Error::Invariant(format!(
                    "component of element {extreme} has {} elements, an irreducible one has {expected}",
                    elems.len()
                )));
            }
            for &id in &elems {
                for &i in m {
                    let up = (0..).scan(Some(id), |cur, _| {
                        *cur = cur.and_then(|c| b.e(c, i).flatten());
                        Some(*cur)
                    });
                    let up_len = up.take_while(Option::is_some).count() as i64;
                    let eps = g.eps(id, i);
                    if g.phi[id][i] < 0 || eps != up_len {
                        return Err(Error::Invariant(format!(
                            "element {id} breaks normality of the induced {i}-string"
                        )));
                    }
                }
            }
        }
        out.push(Component { extreme, weight: g.weights[extreme].clone(), size: elems.len(), truncated });
    }
    out.sort_by_key(|c| c.extreme);
    Ok(out)
}

/// Dimension of the irreducible module of the dual Levi with the given
/// labels `⟨λ, α̌_i⟩` (all `≥ 0`).
pub fn weyl_dimension(levi: &RootDatum, labels: &[i64]) -> Result<u128> {
    if labels.iter().any(|&l| l < 0) {
        return Err(Error::Invariant(format!("labels {labels:?} are not dominant")));
    }
    let mut num = num_bigint::BigInt::from(1);
    let mut den = num_bigint::BigInt::from(1);
    for beta in levi.positive_roots_of_dual() {
        let rho: i64 = beta.iter().sum();
        let shifted: i64 = beta.iter().zip(labels).map(|(c, l)| c * (l + 1)).sum();
        num *= shifted;
        den *= rho;
    }
    let q = num / den;
    u128::try_from(q).map_err(|e| Error::Invariant(e.to_string()))
}

/// Complete-component counts per extreme weight, together with the weights
/// at which some component was truncated.
pub fn highest_weight_split(b: &BmSubset<'_>) -> Result<(BTreeMap<Vec<i64>, usize>, BTreeSet<Vec<i64>>)> {
    let mut mult = BTreeMap::new();
    let mut truncated = BTreeSet::new();
    for c in components(b)? {
        if c.truncated {
            truncated.insert(c.weight);
        } else {
            *mult.entry(c.weight).or_default() += 1;
        }
    }
    Ok((mult, truncated))
}

/// Elements of weight `ν` killed by `f_i` and `f*_i` for all `i ∈ m`.
pub fn c_nu_elements(g: &CrystalGraph, m: &LeviSpec, nu: &[i64]) -> Vec<usize> {
    (0..g.len())
        .filter(|&id| g.weights[id] == nu)
        .filter(|&id| m.indices().iter().all(|&i| g.f[id][i].is_none() && g.f_star[id][i].is_none()))
        .collect()
}

/// Result of the character computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OracleValue {
    Exact(u128),
    Undetermined,
}

/// `Δ⁺ ∖ Δ⁺(m)` with multiplicities, up to the given height.
pub fn nilradical_roots(d: &RootDatum, m: &LeviSpec, bound: u32) -> Result<RootMultiset> {
    let mut roots = d.positive_roots(Some(bound.max(1)))?;
    roots.roots.retain(|r| !m.supported(&r.coeffs));
    Ok(roots)
}

/// `ρ − wρ` over the Levi Weyl group, with the sign of `w`.
pub fn levi_rho_shifts(d: &RootDatum, m: &LeviSpec) -> Vec<(Vec<i64>, i64)> {
    let rank = d.rank();
    let mut seen: HashMap<Vec<i64>, i64> = HashMap::from([(vec![0; rank], 1)]);
    let mut queue = VecDeque::from([vec![0; rank]]);
    while let Some(shift) = queue.pop_front() {
        let sign = seen[&shift];
        for &i in m.indices() {
            let mut next = shift.clone();
            next[i] += 1 - d.pair(&shift, i);
            if !seen.contains_key(&next) {
                seen.insert(next.clone(), -sign);
                queue.push_back(next);
            }
        }
    }
    let mut out: Vec<_> = seen.into_iter().collect();
    out.sort();
    out
}

/// Multiplicity of the irreducible dual-Levi module attached to the extreme
/// weight `ν` in the symmetric algebra of `Δ⁺ ∖ Δ⁺(m)`, by Weyl-group
/// alternation over restricted partition counts.
pub fn hom_multiplicity_oracle(d: &RootDatum, m: &LeviSpec, nu: &[i64], max_height: u32) -> Result<OracleValue> {
    if nu.len() != d.rank() {
        return Err(Error::WeightShape { expected: d.rank(), got: nu.len() });
    }
    let height: i64 = nu.iter().sum();
    if nu.iter().any(|&x| x < 0) {
        return Ok(OracleValue::Exact(0));
    }
    if height > max_height as i64 {
        return Ok(OracleValue::Undetermined);
    }
    if m.indices().iter().any(|&i| d.pair(nu, i) > 0) {
        return Ok(OracleValue::Exact(0));
    }
    let roots = nilradical_roots(d, m, height.max(1) as u32)?;
    let mut total: i128 = 0;
    for (shift, sign) in levi_rho_shifts(d, m) {
        let target: Vec<i64> = nu.iter().zip(&shift).map(|(a, b)| a - b).collect();
        total += sign as i128 * roots.partition_count(&target) as i128;
    }
    u128::try_from(total)
        .map(OracleValue::Exact)
        .map_err(|_| Error::Invariant(format!("negative alternating sum {total} at {nu:?}")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParabolicRow {
    pub m: Vec<usize>,
    pub nu: Vec<i64>,
    pub mult_graph: Option<usize>,
    pub mult_char: Option<u128>,
    pub mult_cnu: usize,
    pub status: RowStatus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Agree,
    Truncated,
    Mismatch,
}

/// The three multiplicities for every weight up to the height bound.
pub fn three_way_table(g: &CrystalGraph, m: &LeviSpec, exec: Execution) -> Result<Vec<ParabolicRow>> {
    let b = extract_bm(g, m);
    let (split, truncated) = highest_weight_split(&b)?;
    let cone = crate::binf::positive_cone(g.datum.rank(), g.max_height);
    let rows = exec.map(&cone, |nu| -> Result<ParabolicRow> {
        let cnu = c_nu_elements(g, m, nu).len();
        let chr = match hom_multiplicity_oracle(&g.datum, m, nu, g.max_height)? {
            OracleValue::Exact(v) => Some(v),
            OracleValue::Undetermined => None,
        };
        let graph = (!truncated.contains(nu)).then(|| split.get(nu).copied().unwrap_or(0));
        let status = match (graph, chr) {
            (Some(a), Some(c)) if a as u128 == c && a == cnu => RowStatus::Agree,
            (Some(_), Some(_)) => RowStatus::Mismatch,
            _ => RowStatus::Truncated,
        };
        Ok(ParabolicRow { m: m.indices().to_vec(), nu: nu.clone(), mult_graph: graph, mult_char: chr, mult_cnu: cnu, status })
    });
    rows.into_iter().collect()
}

/// Greedy descent along `f*_i`, `i ∈ m`, scanning directions in the given
/// order.
fn star_project(g: &CrystalGraph, m: &[usize], id: usize) -> usize {
    let mut cur = id;
    'outer: loop {
        for &i in m {
            if let Some(t) = g.f_star[cur][i] {
                cur = t;
                continue 'outer;
            }
        }
        return cur;
    }
}

/// Refinement of the counting identity along the star fibres: the projection
/// to `B^m` by `f*`-descent does not depend on the order of directions,
/// `e*_i` (`i ∈ m`) preserves it, and the fibre classes `(μ, ν)` have
/// `|B^m(μ)|·|B_m(ν)|` elements.
pub fn star_fiber_report(g: &CrystalGraph, m: &LeviSpec, exec: Execution) -> Result<Vec<String>> {
    let fwd = m.indices().to_vec();
    let rev: Vec<usize> = fwd.iter().rev().copied().collect();
    let proj = exec.map_range(g.len(), |id| (star_project(g, &fwd, id), star_project(g, &rev, id)));
    let mut problems = Vec::new();
    for (id, &(a, b)) in proj.iter().enumerate() {
        if a != b {
            problems.push(format!("element {id}: star descent depends on the order ({a} vs {b})"));
        }
        for &i in m.indices() {
            if let Some(t) = g.e_star[id][i] {
                if proj[t].0 != a {
                    problems.push(format!("element {id}: e*_{i} moves the projection"));
                }
            }
        }
    }
    let bm = extract_bm(g, m).count_by_weight();
    let rank = g.datum.rank();
    let levi: BTreeMap<Vec<i64>, usize> = match m.datum(&g.datum)? {
        None => BTreeMap::from([(vec![0; rank], 1)]),
        Some(ld) => enumerate_with(&ld, &Word::standard(ld.rank()), g.max_height, exec)?
            .weight_multiplicities()
            .into_iter()
            .map(|(w, c)| (m.embed(rank, &w), c))
            .collect(),
    };
    let mut classes: BTreeMap<(Vec<i64>, Vec<i64>), usize> = BTreeMap::new();
    for (id, &(p, _)) in proj.iter().enumerate() {
        let mu = g.weights[p].clone();
        let nu: Vec<i64> = g.weights[id].iter().zip(&mu).map(|(a, b)| a - b).collect();
        *classes.entry((mu, nu)).or_default() += 1;
    }
    for (mu, &bcount) in &bm {
        for (nu, &lcount) in &levi {
            let h: i64 = mu.iter().chain(nu.iter()).sum();
            if h > g.max_height as i64 {
                continue;
            }
            let have = classes.get(&(mu.clone(), nu.clone())).copied().unwrap_or(0);
            if have != bcount * lcount {
                problems.push(format!("class ({mu:?}, {nu:?}) has {have} elements, expected {}", bcount * lcount));
            }
        }
    }
    Ok(problems)
}
