//! Graded characters attached to Uhlenbeck IC stalks: principal gradings,
//! kernels of the principal nilpotent, symmetric-power series, the `V_p`
//! pieces and their symmetric powers, plus closed-form dimension counts.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::parabolic::{levi_rho_shifts, LeviSpec};
use crate::root_datum::RootDatum;

/// A Laurent polynomial in `q` with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QChar(BTreeMap<i64, i128>);

impl QChar {
    pub fn new() -> Self {
        QChar::default()
    }

    pub fn monomial(deg: i64, c: i128) -> Self {
        let mut q = QChar::new();
        q.add_term(deg, c);
        q
    }

    pub fn add_term(&mut self, deg: i64, c: i128) {
        let e = self.0.entry(deg).or_insert(0);
        *e += c;
        if *e == 0 {
            self.0.remove(&deg);
        }
    }

    pub fn coeff(&self, deg: i64) -> i128 {
        self.0.get(&deg).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i128)> + '_ {
        self.0.iter().map(|(&d, &c)| (d, c))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        self.0.iter().all(|(&d, &c)| self.coeff(-d) == c)
    }

    pub fn mul(&self, other: &QChar) -> QChar {
        let mut out = QChar::new();
        for (a, x) in self.terms() {
            for (b, y) in other.terms() {
                out.add_term(a + b, x * y);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> QChar {
        (0..n).fold(QChar::monomial(0, 1), |acc, _| acc.mul(self))
    }

    pub fn shift(&self, k: i64) -> QChar {
        QChar(self.0.iter().map(|(&d, &c)| (d + k, c)).collect())
    }

    /// `Σ_{k=0}^{m} q^{−m+2k}`.
    pub fn string(m: u32) -> QChar {
        let mut q = QChar::new();
        for k in 0..=m as i64 {
            q.add_term(-(m as i64) + 2 * k, 1);
        }
        q
    }
}

impl fmt::Display for QChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&d, &c) in &self.0 {
            let (sign, c) = if c < 0 { ("-", -c) } else { ("+", c) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (c, d) {
                (c, 0) => write!(f, "{c}")?,
                (1, 1) => write!(f, "q")?,
                (1, d) => write!(f, "q^{d}")?,
                (c, 1) => write!(f, "{c}q")?,
                (c, d) => write!(f, "{c}q^{d}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for QChar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<[i128; 2]> = self.0.iter().map(|(&d, &c)| [d as i128, c]).collect();
        v.serialize(s)
    }
}

/// Principal-grading character of the adjoint representation: a root of
/// height `h` sits in degree `2h`.
pub fn adjoint_qchar(d: &RootDatum) -> Result<QChar> {
    if d.is_affine() {
        return Err(Error::Unsupported("adjoint character of an affine datum".into()));
    }
    let mut q = QChar::monomial(0, d.rank() as i128);
    for r in d.positive_roots(None)?.roots {
        q.add_term(2 * r.height as i64, 1);
        q.add_term(-2 * r.height as i64, 1);
    }
    Ok(q)
}

/// Splits a symmetric non-negative character into `sl_2`-strings, returning
/// the string lengths `m` in decreasing order.
pub fn sl2_string_decompose(c: &QChar) -> Result<Vec<u32>> {
    if !c.is_symmetric() {
        return Err(Error::NotACharacter(format!("{c} is not symmetric under q ↔ q⁻¹")));
    }
    let mut rest = c.clone();
    let mut out = Vec::new();
    while let Some((&top, &k)) = rest.0.iter().next_back() {
        if k < 0 || top < 0 {
            return Err(Error::NotACharacter(format!("negative residue {rest} while decomposing {c}")));
        }
        for _ in 0..k {
            out.push(top as u32);
        }
        let s = QChar::string(top as u32);
        for (d, x) in s.terms() {
            rest.add_term(d, -x * k);
        }
    }
    Ok(out)
}

fn require_simply_laced(d: &RootDatum) -> Result<()> {
    if d.is_affine() {
        return Err(Error::Unsupported("expected the finite datum; the loop direction is added internally".into()));
    }
    if !d.cartan().is_connected() {
        return Err(Error::Unsupported("expected an irreducible datum".into()));
    }
    if !d.is_simply_laced() {
        return Err(Error::DualTwist(d.name()));
    }
    Ok(())
}

/// Exponents read off the principal-nilpotent kernel of the adjoint
/// representation.
pub fn principal_exponents(d: &RootDatum) -> Result<Vec<u32>> {
    let mut m: Vec<u32> = sl2_string_decompose(&adjoint_qchar(d)?)?.into_iter().map(|s| s / 2).collect();
    m.sort_unstable();
    Ok(m)
}

/// One generator `(m, l)` per exponent and loop degree `1 ≤ l ≤ l_max`.
pub fn vf_generators(d: &RootDatum, l_max: u32) -> Result<Vec<(u32, u32)>> {
    require_simply_laced(d)?;
    let exps = principal_exponents(d)?;
    Ok((1..=l_max).flat_map(|l| exps.iter().map(move |&m| (m, l))).collect())
}

/// Coefficients `c(d, l)` of a series `Σ c(d, l) q^d t^l`, truncated at
/// `t^{l_max}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigradedSeries {
    pub l_max: u32,
    coeffs: BTreeMap<(u32, u32), u128>,
}

impl BigradedSeries {
    pub fn coeff(&self, d: u32, l: u32) -> u128 {
        self.coeffs.get(&(d, l)).copied().unwrap_or(0)
    }

    /// `[t^l]` as a polynomial in `q`.
    pub fn at_level(&self, l: u32) -> QChar {
        let mut q = QChar::new();
        for (&(d, ll), &c) in &self.coeffs {
            if ll == l {
                q.add_term(d as i64, c as i128);
            }
        }
        q
    }

    /// Sorted `[d, l, c]` triples.
    pub fn triples(&self) -> Vec<[u128; 3]> {
        let mut v: Vec<[u128; 3]> = self.coeffs.iter().map(|(&(d, l), &c)| [d as u128, l as u128, c]).collect();
        v.sort_by_key(|t| (t[1], t[0]));
        v
    }
}

impl Serialize for BigradedSeries {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.triples().serialize(s)
    }
}

/// `Z(q, t) = Π_{m ∈ Exp} Π_{1≤l≤l_max} (1 − q^{2m} t^l)^{−1}` up to `t^{l_max}`.
pub fn sym_vf_series(d: &RootDatum, l_max: u32) -> Result<BigradedSeries> {
    let gens = vf_generators(d, l_max)?;
    let mut coeffs: BTreeMap<(u32, u32), u128> = BTreeMap::from([((0, 0), 1)]);
    for (m, l) in gens {
        // multiply by the geometric series in q^{2m} t^l, ascending in t
        let mut levels: Vec<Vec<(u32, u128)>> = vec![Vec::new(); l_max as usize + 1];
        for (&(dd, ll), &c) in &coeffs {
            levels[ll as usize].push((dd, c));
        }
        let mut by: Vec<BTreeMap<u32, u128>> =
            levels.into_iter().map(|v| v.into_iter().collect()).collect();
        for ll in l..=l_max {
            let src: Vec<(u32, u128)> = by[(ll - l) as usize].iter().map(|(&a, &b)| (a, b)).collect();
            for (dd, c) in src {
                *by[ll as usize].entry(dd + 2 * m).or_insert(0) += c;
            }
        }
        coeffs = by
            .into_iter()
            .enumerate()
            .flat_map(|(ll, m)| m.into_iter().map(move |(dd, c)| ((dd, ll as u32), c)))
            .collect();
    }
    Ok(BigradedSeries { l_max, coeffs })
}

/// `b = Σ n_k d_k` with distinct parts `d_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Partition {
    parts: Vec<(u32, u32)>,
}

impl Partition {
    pub fn new(mut parts: Vec<(u32, u32)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Parse("empty partition".into()));
        }
        parts.sort_unstable();
        for w in parts.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Parse(format!("part {} repeated", w[0].0)));
            }
        }
        if parts.iter().any(|&(d, n)| d == 0 || n == 0) {
            return Err(Error::Parse("parts and multiplicities must be positive".into()));
        }
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[(u32, u32)] {
        &self.parts
    }

    /// `b = Σ n_k d_k`.
    pub fn total(&self) -> u32 {
        self.parts.iter().map(|&(d, n)| d * n).sum()
    }

    /// `|P(b)| = Σ n_k`.
    pub fn length(&self) -> u32 {
        self.parts.iter().map(|&(_, n)| n).sum()
    }

    pub fn max_part(&self) -> u32 {
        self.parts.iter().map(|&(d, _)| d).max().unwrap_or(0)
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// `"d:n,d:n"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = Vec::new();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (d, n) = item.split_once(':').ok_or_else(|| Error::Parse(format!("expected d:n, got {item:?}")))?;
            let d = d.trim().parse().map_err(|_| Error::Parse(format!("bad part {d:?}")))?;
            let n = n.trim().parse().map_err(|_| Error::Parse(format!("bad multiplicity {n:?}")))?;
            parts.push((d, n));
        }
        Partition::new(parts)
    }
}

/// `Π_k ([t^{d_k}] Z)^{n_k}`.
pub fn stalk_polynomial(d: &RootDatum, p: &Partition) -> Result<QChar> {
    let z = sym_vf_series(d, p.max_part())?;
    Ok(p.parts.iter().fold(QChar::monomial(0, 1), |acc, &(dk, nk)| acc.mul(&z.at_level(dk).pow(nk))))
}

/// `[t¹]Z / q²`, the single-point stalk with the lowest term moved to degree 0.
pub fn normalized_single_point(d: &RootDatum) -> Result<QChar> {
    Ok(sym_vf_series(d, 1)?.at_level(1).shift(-2))
}

/// Irreducible constituents of a finite character of the dual Levi.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Irrep {
    /// `⟨λ, α̌_i⟩` for `i ∈ m`, in the order of `m`.
    pub labels: Vec<i64>,
    pub multiplicity: u64,
}

/// A weight-multiset decomposed into irreducibles of the Levi.
pub fn branch(
    d: &RootDatum,
    m: &LeviSpec,
    shifts: &[(Vec<i64>, i64)],
    weights: &HashMap<Vec<i64>, u64>,
) -> Result<Vec<Irrep>> {
    let mut out: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
    for lambda in weights.keys() {
        if m.indices().iter().any(|&i| d.pair(lambda, i) < 0) {
            continue;
        }
        let mut total: i128 = 0;
        for (shift, sign) in shifts {
            let w: Vec<i64> = lambda.iter().zip(shift).map(|(a, b)| a + b).collect();
            total += *sign as i128 * weights.get(&w).copied().unwrap_or(0) as i128;
        }
        if total < 0 {
            return Err(Error::NotACharacter(format!("negative multiplicity at {lambda:?}")));
        }
        if total > 0 {
            let labels: Vec<i64> = m.indices().iter().map(|&i| d.pair(lambda, i)).collect();
            *out.entry(labels).or_default() += total as u64;
        }
    }
    Ok(out.into_iter().map(|(labels, multiplicity)| Irrep { labels, multiplicity }).collect())
}

/// A weight of `V_p`: loop degree and finite part.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct VpWeight {
    level: u32,
    finite: Vec<i64>,
    mult: u64,
}

/// The image in `Λ̂ / span(α_i, i ∈ m)`: affine simple-coroot coefficients at
/// the nodes outside `m`, node 0 first.
fn theta_of(d: &RootDatum, m: &LeviSpec, level: u32, finite: &[i64]) -> Vec<i64> {
    let a0 = d.affinize().ok().and_then(|a| a.alpha0_bar().map(<[i64]>::to_vec)).unwrap_or_default();
    let mut theta = vec![level as i64];
    for (i, &c) in finite.iter().enumerate() {
        if !m.contains(i) {
            theta.push(c + level as i64 * a0[i]);
        }
    }
    theta
}

fn vp_weights(d: &RootDatum, m: &LeviSpec, l_max: u32) -> Result<Vec<VpWeight>> {
    require_simply_laced(d)?;
    let roots = d.positive_roots(None)?;
    let mut out = Vec::new();
    for r in &roots.roots {
        if r.coeffs.iter().enumerate().any(|(i, &c)| c != 0 && !m.contains(i)) {
            out.push(VpWeight { level: 0, finite: r.coeffs.clone(), mult: 1 });
        }
    }
    for l in 1..=l_max {
        for r in &roots.roots {
            out.push(VpWeight { level: l, finite: r.coeffs.clone(), mult: 1 });
            out.push(VpWeight { level: l, finite: r.coeffs.iter().map(|c| -c).collect(), mult: 1 });
        }
        out.push(VpWeight { level: l, finite: vec![0; d.rank()], mult: d.rank() as u64 });
    }
    Ok(out)
}

/// One graded piece of `V_p` at a central character.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VpPiece {
    pub level: u32,
    pub theta: Vec<i64>,
    pub dim: u64,
    pub irreps: Vec<Irrep>,
}

/// `V_p` by loop degree `l ≤ l_max` and central character, branched to the
/// dual Levi. Degree 0 holds `Δ⁺ ∖ Δ⁺(m)`; each `l ≥ 1` one adjoint copy
/// whose zero weights are the imaginary root.
pub fn vp_character(d: &RootDatum, m: &LeviSpec, l_max: u32) -> Result<Vec<VpPiece>> {
    let shifts = levi_rho_shifts(d, m);
    let mut groups: BTreeMap<(u32, Vec<i64>), HashMap<Vec<i64>, u64>> = BTreeMap::new();
    for w in vp_weights(d, m, l_max)? {
        let key = (w.level, theta_of(d, m, w.level, &w.finite));
        *groups.entry(key).or_default().entry(w.finite).or_default() += w.mult;
    }
    groups
        .into_iter()
        .map(|((level, theta), weights)| {
            let irreps = branch(d, m, &shifts, &weights)?;
            Ok(VpPiece { level, theta, dim: weights.values().sum(), irreps })
        })
        .collect()
}

/// `Sym^i(V_p)` at one central character, with its cohomological shift.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymPiece {
    pub degree: u32,
    pub shift: u32,
    pub dim: u64,
    pub irreps: Vec<Irrep>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymVpReport {
    pub theta: Vec<i64>,
    pub pieces: Vec<SymPiece>,
    /// False when symmetric degrees above `i_max` could still reach `θ`.
    pub complete: bool,
}

/// `⊕_{i ≤ i_max} Sym^i(V_p)[2i]` at central character `θ` (coefficients at
/// the nodes outside `m`, node 0 first).
pub fn sym_vp_series(d: &RootDatum, m: &LeviSpec, theta: &[i64], i_max: u32) -> Result<SymVpReport> {
    let outside = d.rank() + 1 - m.indices().len();
    if theta.len() != outside {
        return Err(Error::WeightShape { expected: outside, got: theta.len() });
    }
    if theta.iter().any(|&x| x < 0) {
        return Err(Error::NotPositive(format!("{theta:?}")));
    }
    let l_max = theta[0] as u32;
    let gens: Vec<(Vec<i64>, Vec<i64>, u64)> = vp_weights(d, m, l_max)?
        .into_iter()
        .map(|w| (theta_of(d, m, w.level, &w.finite), w.finite, w.mult))
        .filter(|(t, _, _)| t.iter().zip(theta).all(|(a, b)| a <= b))
        .collect();
    // every generator has a positive coefficient, so |θ| bounds the degree
    let total: i64 = theta.iter().sum();
    let complete = i_max as i64 >= total;
    type State = (u32, Vec<i64>, Vec<i64>);
    let mut states: HashMap<State, u64> = HashMap::from([((0, vec![0; outside], vec![0; d.rank()]), 1)]);
    for (gt, gw, mult) in &gens {
        for _ in 0..*mult {
            // multiply by 1/(1 − x) for one generator x, capped by θ and i_max
            let mut keys: Vec<State> = states.keys().cloned().collect();
            keys.sort();
            let mut next = states.clone();
            let mut frontier: Vec<(State, u64)> = keys.into_iter().map(|k| { let c = states[&k]; (k, c) }).collect();
            loop {
                let mut grown = Vec::new();
                for ((i, t, w), c) in frontier {
                    let nt: Vec<i64> = t.iter().zip(gt).map(|(a, b)| a + b).collect();
                    if i + 1 > i_max || nt.iter().zip(theta).any(|(a, b)| a > b) {
                        continue;
                    }
                    let nw: Vec<i64> = w.iter().zip(gw).map(|(a, b)| a + b).collect();
                    let key = (i + 1, nt, nw);
                    *next.entry(key.clone()).or_default() += c;
                    grown.push((key, c));
                }
                if grown.is_empty() {
                    break;
                }
                frontier = grown;
            }
            states = next;
        }
    }
    let shifts = levi_rho_shifts(d, m);
    let mut by_degree: BTreeMap<u32, HashMap<Vec<i64>, u64>> = BTreeMap::new();
    for ((i, t, w), c) in states {
        if t == theta {
            *by_degree.entry(i).or_default().entry(w).or_default() += c;
        }
    }
    let pieces = by_degree
        .into_iter()
        .map(|(i, weights)| {
            Ok(SymPiece { degree: i, shift: 2 * i, dim: weights.values().sum(), irreps: branch(d, m, &shifts, &weights)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SymVpReport { theta: theta.to_vec(), pieces, complete })
}

/// Dimension data for a parabolic zastava space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZastavaDims {
    /// `|θ| = ⟨θ̃, ρ̌⟩`.
    pub height: i64,
    /// `⟨θ̃, ρ̌_M⟩`, possibly a half-integer.
    #[serde(serialize_with = "ser_ratio")]
    pub rho_m_pairing: Ratio<i64>,
    #[serde(serialize_with = "ser_ratio")]
    pub height_prime: Ratio<i64>,
    /// `2|θ|′`.
    pub dimension: i64,
}

fn ser_ratio<S: Serializer>(r: &Ratio<i64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

/// `θ` is given by its coefficients at the simple coroots outside `m`.
pub fn zastava_dims(d: &RootDatum, m: &LeviSpec, theta: &[i64]) -> Result<ZastavaDims> {
    let outside: Vec<usize> = (0..d.rank()).filter(|&i| !m.contains(i)).collect();
    if theta.len() != outside.len() {
        return Err(Error::WeightShape { expected: outside.len(), got: theta.len() });
    }
    if theta.iter().any(|&x| x < 0) || theta.iter().all(|&x| x == 0) {
        return Err(Error::NotPositive(format!("{theta:?}")));
    }
    let mut lift = vec![0; d.rank()];
    for (k, &i) in outside.iter().enumerate() {
        lift[i] = theta[k];
    }
    let height: i64 = lift.iter().sum();
    let mut twice = 0i64;
    if let Some(levi) = m.datum(d)? {
        for beta in levi.positive_roots_of_dual() {
            for (k, &j) in m.indices().iter().enumerate() {
                twice += beta[k] * d.pair(&lift, j);
            }
        }
    }
    let rho_m = Ratio::new(twice, 2);
    let prime = Ratio::from_integer(height) - rho_m;
    Ok(ZastavaDims { height, rho_m_pairing: rho_m, height_prime: prime, dimension: 2 * height - twice })
}

/// `2|μ|` for the Borel case.
pub fn borel_zastava_dim(d: &RootDatum, mu: &[i64]) -> Result<i64> {
    Ok(zastava_dims(d, &LeviSpec::empty(), mu)?.dimension)
}

/// `2·ȟ·a`.
pub fn bundle_dimension(d: &RootDatum, a: u32) -> i64 {
    2 * d.dual_coxeter() * a as i64
}

/// `⟨λ_1 − λ_2, ρ̌⟩`, requiring `λ_1 − λ_2 ∈ Λ^pos`.
pub fn grassmannian_dimension(d: &RootDatum, l1: &[i64], l2: &[i64]) -> Result<i64> {
    if l1.len() != d.rank() || l2.len() != d.rank() {
        return Err(Error::WeightShape { expected: d.rank(), got: l1.len().max(l2.len()) });
    }
    let diff: Vec<i64> = l1.iter().zip(l2).map(|(a, b)| a - b).collect();
    if diff.iter().any(|&x| x < 0) {
        return Err(Error::NotPositive(format!("{diff:?}")));
    }
    Ok(diff.iter().sum())
}

/// `|δ|` for an affine datum.
pub fn null_root_length(d: &RootDatum) -> Result<i64> {
    d.null_root()
        .map(|delta| delta.iter().sum())
        .ok_or_else(|| Error::Unsupported("null root of a finite datum".into()))
}

/// `n(n+1)(n+2)/6`.
pub fn cartier_vanishing_order(n: u64) -> u128 {
    let n = n as u128;
    n * (n + 1) * (n + 2) / 6
}

/// `Σ_{j=1}^{n} j·(n−j+1)`.
pub fn filtration_sum(n: u64) -> u128 {
    (1..=n as u128).map(|j| j * (n as u128 - j + 1)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(f: char, r: usize) -> RootDatum {
        RootDatum::build_finite(f, r).unwrap()
    }

    fn poly(terms: &[(i64, i128)]) -> QChar {
        let mut q = QChar::new();
        for &(d, c) in terms {
            q.add_term(d, c);
        }
        q
    }

    #[test]
    fn string_decomposition() {
        assert_eq!(sl2_string_decompose(&adjoint_qchar(&fin('A', 1)).unwrap()).unwrap(), vec![2]);
        assert_eq!(sl2_string_decompose(&adjoint_qchar(&fin('A', 2)).unwrap()).unwrap(), vec![4, 2]);
        assert_eq!(sl2_string_decompose(&QChar::monomial(0, 1)).unwrap(), vec![0]);
        assert!(sl2_string_decompose(&QChar::monomial(2, 1)).is_err());
        // symmetric but not a character: q^-2 + q^2 - 1 leaves a negative residue
        assert!(sl2_string_decompose(&poly(&[(-2, 1), (2, 1)])).is_err());
    }

    #[test]
    fn exponents_from_strings() {
        assert_eq!(principal_exponents(&fin('D', 4)).unwrap(), vec![1, 3, 3, 5]);
        assert_eq!(principal_exponents(&fin('E', 6)).unwrap(), vec![1, 4, 5, 7, 8, 11]);
        assert_eq!(principal_exponents(&fin('A', 3)).unwrap(), fin('A', 3).exponents().unwrap());
    }

    #[test]
    fn generators() {
        assert_eq!(vf_generators(&fin('A', 1), 2).unwrap(), vec![(1, 1), (1, 2)]);
        assert_eq!(vf_generators(&fin('A', 2), 1).unwrap(), vec![(1, 1), (2, 1)]);
        assert!(matches!(vf_generators(&fin('B', 2), 1), Err(Error::DualTwist(_))));
    }

    #[test]
    fn z_series() {
        let z = sym_vf_series(&fin('A', 1), 2).unwrap();
        assert_eq!(z.at_level(1), poly(&[(2, 1)]));
        assert_eq!(z.at_level(2), poly(&[(2, 1), (4, 1)]));
        assert_eq!(z.coeff(0, 0), 1);
        let z3 = sym_vf_series(&fin('A', 2), 1).unwrap();
        assert_eq!(z3.at_level(1), poly(&[(2, 1), (4, 1)]));
    }

    #[test]
    fn stalks() {
        let p: Partition = "1:2".parse().unwrap();
        assert_eq!(stalk_polynomial(&fin('A', 1), &p).unwrap(), poly(&[(4, 1)]));
        let p: Partition = "2:1".parse().unwrap();
        assert_eq!(stalk_polynomial(&fin('A', 1), &p).unwrap(), poly(&[(2, 1), (4, 1)]));
        assert_eq!(normalized_single_point(&fin('A', 2)).unwrap().to_string(), "1 + q^2");
        assert_eq!(normalized_single_point(&fin('A', 1)).unwrap().to_string(), "1");
        assert!("1:1,1:2".parse::<Partition>().is_err());
        assert!("0:1".parse::<Partition>().is_err());
        let p: Partition = "1:2,3:1".parse().unwrap();
        assert_eq!((p.total(), p.length()), (5, 3));
    }

    #[test]
    fn vp_pieces() {
        let a2 = fin('A', 2);
        let m = LeviSpec::new(&a2, &[0]).unwrap();
        let pieces = vp_character(&a2, &m, 0).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].irreps, vec![Irrep { labels: vec![1], multiplicity: 1 }]);
        assert_eq!(pieces[0].dim, 2);
        let borel = vp_character(&a2, &LeviSpec::empty(), 0).unwrap();
        assert_eq!(borel.iter().map(|p| p.dim).sum::<u64>(), 3);
        let all = LeviSpec::new(&a2, &[0, 1]).unwrap();
        let full = vp_character(&a2, &all, 2).unwrap();
        assert!(full.iter().all(|p| p.level >= 1 && p.dim == 8));
        assert!(full.iter().all(|p| p.irreps == vec![Irrep { labels: vec![1, 1], multiplicity: 1 }]));
    }

    #[test]
    fn sym_vp_examples() {
        let a1 = fin('A', 1);
        let all = LeviSpec::new(&a1, &[0]).unwrap();
        let r = sym_vp_series(&a1, &all, &[0], 3).unwrap();
        assert_eq!(r.pieces.len(), 1);
        assert_eq!(r.pieces[0].degree, 0);
        let r = sym_vp_series(&a1, &all, &[1], 3).unwrap();
        assert_eq!(r.pieces.len(), 1);
        assert_eq!((r.pieces[0].degree, r.pieces[0].shift), (1, 2));
        assert_eq!(r.pieces[0].irreps, vec![Irrep { labels: vec![2], multiplicity: 1 }]);
        let a2 = fin('A', 2);
        let r = sym_vp_series(&a2, &LeviSpec::empty(), &[0, 1, 1], 4).unwrap();
        assert_eq!(r.pieces.iter().map(|p| p.dim).sum::<u64>(), 2);
        assert!(r.complete);
        assert!(!sym_vp_series(&a2, &LeviSpec::empty(), &[0, 1, 1], 1).unwrap().complete);
    }

    #[test]
    fn dimensions() {
        let a2 = fin('A', 2);
        assert_eq!(borel_zastava_dim(&a2, &[1, 0]).unwrap(), 2);
        assert_eq!(bundle_dimension(&fin('A', 1), 1), 4);
        assert_eq!(grassmannian_dimension(&a2, &[1, 1], &[0, 0]).unwrap(), 2);
        assert!(grassmannian_dimension(&a2, &[0, 0], &[1, 0]).is_err());
        for (f, r, h) in [('A', 1, 2), ('A', 2, 3), ('D', 4, 6)] {
            assert_eq!(null_root_length(&fin(f, r).affinize().unwrap()).unwrap(), h);
        }
        // m = {1} in A2, θ = α_2: ⟨α_2, ρ̌_M⟩ = −1/2
        let m = LeviSpec::new(&a2, &[0]).unwrap();
        let z = zastava_dims(&a2, &m, &[1]).unwrap();
        assert_eq!(z.rho_m_pairing, Ratio::new(-1, 2));
        assert_eq!(z.dimension, 3);
        assert!(zastava_dims(&a2, &m, &[0]).is_err());
    }

    #[test]
    fn vanishing_order() {
        assert_eq!(cartier_vanishing_order(0), 0);
        assert_eq!(cartier_vanishing_order(1), 1);
        assert_eq!(cartier_vanishing_order(2), 4);
        assert_eq!(filtration_sum(2), 4);
    }
}
