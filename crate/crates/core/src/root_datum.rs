//! Root data of finite and untwisted affine Kac-Moody algebras.
//!
//! Conventions: the lattice `Λ` contains the simple coroots `α_i` and is the
//! home of crystal weights; `Λ̌` contains the simple roots `α̌_i`, and
//! `⟨α_i, α̌_j⟩ = A[i][j]`. For a simply-connected finite datum `Λ` is the
//! coroot lattice itself, so weight coordinates are simple-coroot
//! coefficients. The affine lattice is `Λ ⊕ Zδ` (the `d`-direction is
//! dropped) and an affine weight is written `(μ̄, a)`.
//!
//! Internally most routines work with *coefficient vectors*: the integer
//! coordinates of an element of the span of the simple coroots in the basis
//! `(α_i)_{i∈I}`. For an affine datum the index `0` is the affine node.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct CartanMatrix {
    entries: Vec<Vec<i64>>,
}

impl TryFrom<Vec<Vec<i64>>> for CartanMatrix {
    type Error = Error;

    fn try_from(entries: Vec<Vec<i64>>) -> Result<Self> {
        CartanMatrix::new(entries)
    }
}

impl From<CartanMatrix> for Vec<Vec<i64>> {
    fn from(c: CartanMatrix) -> Self {
        c.entries
    }
}

impl CartanMatrix {
    /// Validates the generalized Cartan matrix axioms and symmetrizability.
    pub fn new(entries: Vec<Vec<i64>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::InvalidCartan("empty matrix".into()));
        }
        for (i, row) in entries.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidCartan(format!("row {i} has length {}", row.len())));
            }
            for (j, &a) in row.iter().enumerate() {
                if i == j && a != 2 {
                    return Err(Error::InvalidCartan(format!("A[{i}][{i}] = {a}, expected 2")));
                }
                if i != j && a > 0 {
                    return Err(Error::InvalidCartan(format!("A[{i}][{j}] = {a} is positive")));
                }
                if i != j && (a == 0) != (entries[j][i] == 0) {
                    return Err(Error::InvalidCartan(format!(
                        "A[{i}][{j}] and A[{j}][{i}] must vanish together"
                    )));
                }
            }
        }
        let c = CartanMatrix { entries };
        if c.symmetrizer().is_none() {
            return Err(Error::InvalidCartan("matrix is not symmetrizable".into()));
        }
        Ok(c)
    }

    /// The Cartan matrix of a finite Dynkin type, in Bourbaki numbering.
    pub fn finite(family: char, rank: usize) -> Result<Self> {
        let bad = || Error::InvalidType { family: family.to_string(), rank };
        let ok = match family {
            'A' => rank >= 1,
            'B' | 'C' => rank >= 2,
            'D' => rank >= 4,
            'E' => (6..=8).contains(&rank),
            'F' => rank == 4,
            'G' => rank == 2,
            _ => false,
        };
        if !ok {
            return Err(bad());
        }
        let mut a = vec![vec![0i64; rank]; rank];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 2;
        }
        let mut link = |i: usize, j: usize| {
            a[i][j] = -1;
            a[j][i] = -1;
        };
        match family {
            'A' | 'B' | 'C' | 'F' | 'G' => {
                for i in 0..rank - 1 {
                    link(i, i + 1);
                }
            }
            'D' => {
                for i in 0..rank - 2 {
                    link(i, i + 1);
                }
                link(rank - 3, rank - 1);
            }
            'E' => {
                // Bourbaki: 1-3-4-5-6(-7-8), 2 attached to 4.
                link(0, 2);
                link(1, 3);
                for i in 2..rank - 1 {
                    link(i, i + 1);
                }
            }
            _ => unreachable!(),
        }
        match family {
            'B' => a[rank - 1][rank - 2] = -2,
            'C' => a[rank - 2][rank - 1] = -2,
            'F' => a[2][1] = -2,
            'G' => a[0][1] = -3,
            _ => {}
        }
        CartanMatrix::new(a)
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn transpose(&self) -> CartanMatrix {
        let n = self.size();
        let entries = (0..n).map(|i| (0..n).map(|j| self.entries[j][i]).collect()).collect();
        CartanMatrix { entries }
    }

    pub fn submatrix(&self, idx: &[usize]) -> CartanMatrix {
        let entries = idx.iter().map(|&i| idx.iter().map(|&j| self.entries[i][j]).collect()).collect();
        CartanMatrix { entries }
    }

    pub fn is_simply_laced(&self) -> bool {
        self.entries.iter().flatten().all(|&a| a == 2 || a == 0 || a == -1)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.size();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if !seen[j] && self.entries[i][j] != 0 {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Positive integers `d_i` with `d_i A[i][j] = d_j A[j][i]`, minimal on
    /// each connected component.
    pub fn symmetrizer(&self) -> Option<Vec<i64>> {
        let n = self.size();
        let mut d: Vec<Option<BigRational>> = vec![None; n];
        for start in 0..n {
            if d[start].is_some() {
                continue;
            }
            let mut component = vec![start];
            d[start] = Some(BigRational::one());
            let mut stack = vec![start];
            while let Some(i) = stack.pop() {
                for j in 0..n {
                    if i == j || self.entries[i][j] == 0 {
                        continue;
                    }
                    let di = d[i].clone().unwrap();
                    let want = di * BigRational::from_integer(self.entries[i][j].into())
                        / BigRational::from_integer(self.entries[j][i].into());
                    match &d[j] {
                        Some(dj) if *dj != want => return None,
                        Some(_) => {}
                        None => {
                            d[j] = Some(want);
                            component.push(j);
                            stack.push(j);
                        }
                    }
                }
            }
            // clear denominators, then remove the common factor
            let lcm = component.iter().fold(BigInt::one(), |acc, &i| {
                num_integer::Integer::lcm(&acc, d[i].as_ref().unwrap().denom())
            });
            let ints: Vec<BigInt> = component
                .iter()
                .map(|&i| (d[i].clone().unwrap() * BigRational::from_integer(lcm.clone())).to_integer())
                .collect();
            let g = ints.iter().fold(BigInt::zero(), |acc, x| num_integer::Integer::gcd(&acc, x));
            for (&i, v) in component.iter().zip(ints) {
                d[i] = Some(BigRational::from_integer(v / &g));
            }
        }
        d.into_iter().map(|x| x.and_then(|r| r.to_integer().to_i64())).collect()
    }

    /// Finite type: the symmetrized matrix `(d_i A[i][j])` is positive definite.
    pub fn is_finite_type(&self) -> bool {
        let Some(d) = self.symmetrizer() else {
            return false;
        };
        let n = self.size();
        let mut m: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| BigRational::from_integer((d[i] * self.entries[i][j]).into()))
                    .collect()
            })
            .collect();
        // leading principal minors via elimination without row swaps
        for k in 0..n {
            if !m[k][k].is_positive() {
                return false;
            }
            for r in k + 1..n {
                let f = &m[r][k] / &m[k][k];
                for c in k..n {
                    let sub = &f * &m[k][c];
                    m[r][c] -= sub;
                }
            }
        }
        true
    }
}

/// An element of `Λ`: simple-coroot coordinates for finite data, `(μ̄, a)`
/// for affine data.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightVec {
    Finite(Vec<i64>),
    Affine { finite: Vec<i64>, delta: i64 },
}

impl WeightVec {
    pub fn finite_part(&self) -> &[i64] {
        match self {
            WeightVec::Finite(v) => v,
            WeightVec::Affine { finite, .. } => finite,
        }
    }

    pub fn delta_coeff(&self) -> i64 {
        match self {
            WeightVec::Finite(_) => 0,
            WeightVec::Affine { delta, .. } => *delta,
        }
    }

    /// Flat coordinates, affine `δ`-coefficient last.
    pub fn coords(&self) -> Vec<i64> {
        match self {
            WeightVec::Finite(v) => v.clone(),
            WeightVec::Affine { finite, delta } => {
                let mut v = finite.clone();
                v.push(*delta);
                v
            }
        }
    }

    fn len(&self) -> usize {
        match self {
            WeightVec::Finite(v) => v.len(),
            WeightVec::Affine { finite, .. } => finite.len() + 1,
        }
    }
}

impl fmt::Display for WeightVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightVec::Finite(v) => write!(f, "{v:?}"),
            WeightVec::Affine { finite, delta } => write!(f, "({finite:?}, {delta})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositiveRoot {
    pub coeffs: Vec<i64>,
    pub weight: WeightVec,
    pub multiplicity: u32,
    pub height: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RootMultiset {
    pub roots: Vec<PositiveRoot>,
}

impl RootMultiset {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn multiplicity(&self, coeffs: &[i64]) -> u32 {
        self.roots.iter().find(|r| r.coeffs == coeffs).map_or(0, |r| r.multiplicity)
    }

    /// Number of colored multisets of roots summing to `target`.
    pub fn partition_count(&self, target: &[i64]) -> u128 {
        if target.iter().any(|&x| x < 0) {
            return 0;
        }
        let dims: Vec<usize> = target.iter().map(|&x| x as usize + 1).collect();
        let size: usize = dims.iter().product();
        let mut strides = vec![1usize; dims.len()];
        for k in 1..dims.len() {
            strides[k] = strides[k - 1] * dims[k - 1];
        }
        let mut dp = vec![0u128; size];
        dp[0] = 1;
        let mut cur = vec![0usize; dims.len()];
        for root in &self.roots {
            if root.coeffs.iter().zip(target).any(|(&b, &t)| b > t) {
                continue;
            }
            let shift: usize = root.coeffs.iter().zip(&strides).map(|(&b, &s)| b as usize * s).sum();
            for _ in 0..root.multiplicity {
                cur.iter_mut().for_each(|c| *c = 0);
                for idx in 0..size {
                    if idx > 0 {
                        // advance the mixed-radix counter
                        let mut k = 0;
                        loop {
                            cur[k] += 1;
                            if cur[k] < dims[k] {
                                break;
                            }
                            cur[k] = 0;
                            k += 1;
                        }
                    }
                    if cur.iter().zip(&root.coeffs).all(|(&c, &b)| c as i64 >= b) {
                        dp[idx] += dp[idx - shift];
                    }
                }
            }
        }
        dp[size - 1]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineData {
    finite: Box<RootDatum>,
    /// `δ = α_0 + ᾱ_0` as coefficients over the affine index set.
    null_root: Vec<i64>,
    /// `ᾱ_0` as coefficients over the finite index set.
    alpha0_bar: Vec<i64>,
}

/// Serialized description of a root datum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatumSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cartan: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub affine: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDatum {
    cartan: CartanMatrix,
    family: Option<(char, usize)>,
    affine: Option<AffineData>,
}

impl RootDatum {
    pub fn build_finite(family: char, rank: usize) -> Result<Self> {
        let family = family.to_ascii_uppercase();
        let cartan = CartanMatrix::finite(family, rank)?;
        Ok(RootDatum { cartan, family: Some((family, rank)), affine: None })
    }

    /// A finite datum from an arbitrary finite-type Cartan matrix.
    pub fn from_cartan(cartan: CartanMatrix) -> Result<Self> {
        if !cartan.is_finite_type() {
            return Err(Error::Unsupported(
                "only finite-type Cartan matrices can be given directly; use affinize for affine data".into(),
            ));
        }
        Ok(RootDatum { cartan, family: None, affine: None })
    }

    pub fn from_spec(spec: &DatumSpec) -> Result<Self> {
        let finite = match (&spec.family, spec.rank, &spec.cartan) {
            (Some(f), Some(r), None) => {
                let mut chars = f.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => RootDatum::build_finite(c, r)?,
                    _ => return Err(Error::InvalidType { family: f.clone(), rank: r }),
                }
            }
            (None, None, Some(c)) => RootDatum::from_cartan(CartanMatrix::new(c.clone())?)?,
            _ => {
                return Err(Error::Parse(
                    "root datum needs either family+rank or cartan".into(),
                ))
            }
        };
        if spec.affine {
            finite.affinize()
        } else {
            Ok(finite)
        }
    }

    pub fn to_spec(&self) -> DatumSpec {
        let base = self.finite_datum();
        match base.family {
            Some((f, r)) => DatumSpec {
                family: Some(f.to_string()),
                rank: Some(r),
                cartan: None,
                affine: self.is_affine(),
            },
            None => DatumSpec {
                family: None,
                rank: None,
                cartan: Some(base.cartan.rows().to_vec()),
                affine: self.is_affine(),
            },
        }
    }

    /// Short human-readable name, e.g. `A2` or `A1^(1)`.
    pub fn name(&self) -> String {
        let base = self.finite_datum();
        let core = match base.family {
            Some((f, r)) => format!("{f}{r}"),
            None => format!("cartan{:?}", base.cartan.rows()),
        };
        if self.is_affine() {
            format!("{core}^(1)")
        } else {
            core
        }
    }

    /// Untwisted affinization: index set `{0} ∪ I`, `α_0 = (−ᾱ_0, 1)`.
    pub fn affinize(&self) -> Result<Self> {
        if self.is_affine() {
            return Err(Error::Unsupported("datum is already affine".into()));
        }
        if !self.cartan.is_connected() {
            return Err(Error::Unsupported("cannot affinize a reducible datum".into()));
        }
        let n = self.rank();
        let alpha0_bar = self.long_root_coroot();
        let theta = self.highest_root_of_dual();
        let mut a = vec![vec![0i64; n + 1]; n + 1];
        a[0][0] = 2;
        for j in 0..n {
            // ⟨α_0, α̌_j⟩ = −⟨ᾱ_0, α̌_j⟩ and ⟨α_j, α̌_0⟩ = −⟨α_j, θ̌⟩
            a[0][j + 1] = -self.pair(&alpha0_bar, j);
            a[j + 1][0] = -(0..n).map(|k| theta[k] * self.cartan.get(j, k)).sum::<i64>();
            for k in 0..n {
                a[j + 1][k + 1] = self.cartan.get(j, k);
            }
        }
        let cartan = CartanMatrix::new(a)?;
        let mut null_root = vec![1];
        null_root.extend_from_slice(&alpha0_bar);
        Ok(RootDatum {
            cartan,
            family: None,
            affine: Some(AffineData { finite: Box::new(self.clone()), null_root, alpha0_bar }),
        })
    }

    /// The finite-type datum spanned by a subset of the simple roots.
    pub fn levi(&self, subset: &[usize]) -> Result<Self> {
        if subset.is_empty() {
            return Err(Error::InvalidLevi("empty Levi has no root datum".into()));
        }
        let mut sorted = subset.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != subset.len() || sorted.iter().any(|&i| i >= self.rank()) {
            return Err(Error::InvalidLevi(format!("{subset:?}")));
        }
        let sub = self.cartan.submatrix(subset);
        if !sub.is_finite_type() {
            return Err(Error::InvalidLevi(format!("{subset:?} is not of finite type")));
        }
        Ok(RootDatum { cartan: sub, family: None, affine: None })
    }

    pub fn cartan(&self) -> &CartanMatrix {
        &self.cartan
    }

    pub fn family(&self) -> Option<(char, usize)> {
        self.family
    }

    /// Number of simple coroots.
    pub fn rank(&self) -> usize {
        self.cartan.size()
    }

    /// Rank of the lattice `Λ`.
    pub fn lattice_rank(&self) -> usize {
        self.rank()
    }

    pub fn is_affine(&self) -> bool {
        self.affine.is_some()
    }

    pub fn is_simply_laced(&self) -> bool {
        self.cartan.is_simply_laced()
    }

    pub fn affine_data(&self) -> Option<&AffineData> {
        self.affine.as_ref()
    }

    /// The datum itself if finite, its finite part if affine.
    pub fn finite_datum(&self) -> &RootDatum {
        match &self.affine {
            Some(a) => &a.finite,
            None => self,
        }
    }

    /// `δ` as coefficients over the affine index set.
    pub fn null_root(&self) -> Option<&[i64]> {
        self.affine.as_ref().map(|a| a.null_root.as_slice())
    }

    pub fn alpha0_bar(&self) -> Option<&[i64]> {
        self.affine.as_ref().map(|a| a.alpha0_bar.as_slice())
    }

    /// User-facing node label: `1..=r` for finite data, `0..=r` for affine.
    pub fn label(&self, i: usize) -> usize {
        if self.is_affine() {
            i
        } else {
            i + 1
        }
    }

    pub fn index_of_label(&self, label: usize) -> Option<usize> {
        let i = if self.is_affine() { Some(label) } else { label.checked_sub(1) }?;
        (i < self.rank()).then_some(i)
    }

    pub fn labels(&self) -> Vec<usize> {
        (0..self.rank()).map(|i| self.label(i)).collect()
    }

    /// `⟨μ, α̌_i⟩` for `μ = Σ_j n_j α_j` given by its coefficients.
    pub fn pair(&self, coeffs: &[i64], i: usize) -> i64 {
        coeffs.iter().enumerate().map(|(j, &n)| n * self.cartan.get(j, i)).sum()
    }

    pub fn zero_weight(&self) -> WeightVec {
        self.weight_of(&vec![0; self.rank()])
    }

    /// The element `Σ n_i α_i` of `Λ`.
    pub fn weight_of(&self, coeffs: &[i64]) -> WeightVec {
        match &self.affine {
            None => WeightVec::Finite(coeffs.to_vec()),
            Some(a) => {
                let n0 = coeffs[0];
                let finite = (0..a.alpha0_bar.len())
                    .map(|k| coeffs[k + 1] - n0 * a.alpha0_bar[k])
                    .collect();
                WeightVec::Affine { finite, delta: n0 }
            }
        }
    }

    pub fn simple_coroot(&self, i: usize) -> WeightVec {
        let mut c = vec![0; self.rank()];
        c[i] = 1;
        self.weight_of(&c)
    }

    /// `α̌_i` in the basis of `Λ̌` dual to the coordinates of `Λ`.
    pub fn simple_root(&self, i: usize) -> Vec<i64> {
        match &self.affine {
            None => (0..self.rank()).map(|k| self.cartan.get(k, i)).collect(),
            Some(a) => {
                let fin = &a.finite;
                let r = fin.rank();
                let mut v: Vec<i64> = if i == 0 {
                    let theta = fin.highest_root_of_dual();
                    (0..r).map(|k| -(0..r).map(|j| theta[j] * fin.cartan.get(k, j)).sum::<i64>()).collect()
                } else {
                    (0..r).map(|k| fin.cartan.get(k, i - 1)).collect()
                };
                v.push(0);
                v
            }
        }
    }

    /// The perfect pairing `Λ × Λ̌ → Z` in the stored bases.
    pub fn pairing(&self, mu: &WeightVec, check: &[i64]) -> Result<i64> {
        self.check_shape(mu)?;
        let c = mu.coords();
        if c.len() != check.len() {
            return Err(Error::WeightShape { expected: c.len(), got: check.len() });
        }
        Ok(c.iter().zip(check).map(|(a, b)| a * b).sum())
    }

    fn check_shape(&self, mu: &WeightVec) -> Result<()> {
        let ok = matches!(
            (mu, self.is_affine()),
            (WeightVec::Finite(_), false) | (WeightVec::Affine { .. }, true)
        );
        let expected = self.lattice_rank();
        if !ok || mu.len() != expected {
            return Err(Error::WeightShape { expected, got: mu.len() });
        }
        Ok(())
    }

    /// Coefficients of `μ` in the simple-coroot basis.
    pub fn coefficients(&self, mu: &WeightVec) -> Result<Vec<i64>> {
        self.check_shape(mu)?;
        Ok(match (&self.affine, mu) {
            (None, WeightVec::Finite(v)) => v.clone(),
            (Some(a), WeightVec::Affine { finite, delta }) => {
                let mut c = vec![*delta];
                c.extend(finite.iter().zip(&a.alpha0_bar).map(|(&m, &b)| m + delta * b));
                c
            }
            _ => unreachable!(),
        })
    }

    /// `Some(coefficients)` iff `μ ∈ Λ^pos`.
    pub fn is_positive(&self, mu: &WeightVec) -> Result<Option<Vec<i64>>> {
        let c = self.coefficients(mu)?;
        Ok(c.iter().all(|&n| n >= 0).then_some(c))
    }

    /// `|μ| = Σ n_i` for positive `μ`.
    pub fn length(&self, mu: &WeightVec) -> Result<i64> {
        match self.is_positive(mu)? {
            Some(c) => Ok(c.iter().sum()),
            None => Err(Error::NotPositive(mu.to_string())),
        }
    }

    /// `⟨μ, ρ̌⟩`, where `⟨α_i, ρ̌⟩ = 1` for every `i`.
    pub fn rho_check_pairing(&self, mu: &WeightVec) -> Result<i64> {
        Ok(self.coefficients(mu)?.iter().sum())
    }

    /// Dual Coxeter number `1 + ⟨ᾱ_0, ρ̌⟩` of the finite part.
    pub fn dual_coxeter(&self) -> i64 {
        1 + self.finite_datum().long_root_coroot().iter().sum::<i64>()
    }

    /// Positive roots with multiplicities whose simple roots are the `α_i ∈ Λ`
    /// (i.e. the positive coroots of `g`), up to the given height.
    ///
    /// Finite data ignore a missing bound; affine data require one.
    pub fn positive_roots(&self, height_bound: Option<u32>) -> Result<RootMultiset> {
        let raw: Vec<(Vec<i64>, u32)> = if self.is_affine() {
            let bound = height_bound.ok_or_else(|| {
                Error::Unsupported("affine root systems need a height bound".into())
            })?;
            peterson_multiplicities(&self.cartan, bound)?
        } else {
            root_closure(&self.cartan, Orientation::Coroots)
                .into_iter()
                .filter(|c| height_bound.is_none_or(|b| c.iter().sum::<i64>() <= b as i64))
                .map(|c| (c, 1))
                .collect()
        };
        let mut roots: Vec<PositiveRoot> = raw
            .into_iter()
            .map(|(coeffs, multiplicity)| PositiveRoot {
                height: coeffs.iter().sum::<i64>() as u32,
                weight: self.weight_of(&coeffs),
                coeffs,
                multiplicity,
            })
            .collect();
        roots.sort_by(|a, b| a.height.cmp(&b.height).then_with(|| b.coeffs.cmp(&a.coeffs)));
        Ok(RootMultiset { roots })
    }

    /// Kostant partition function on `Λ`; zero off `Λ^pos`.
    pub fn kostant_partition(&self, lambda: &WeightVec) -> Result<u128> {
        let Some(c) = self.is_positive(lambda)? else {
            return Ok(0);
        };
        self.kostant_partition_coeffs(&c)
    }

    pub fn kostant_partition_coeffs(&self, coeffs: &[i64]) -> Result<u128> {
        if coeffs.iter().any(|&x| x < 0) {
            return Ok(0);
        }
        let h = coeffs.iter().sum::<i64>().max(1) as u32;
        Ok(self.positive_roots(Some(h))?.partition_count(coeffs))
    }

    /// Exponents, read off the height distribution of positive roots.
    pub fn exponents(&self) -> Result<Vec<u32>> {
        if self.is_affine() {
            return Err(Error::Unsupported("exponents need a finite datum".into()));
        }
        if !self.cartan.is_connected() {
            return Err(Error::Unsupported("exponents need an irreducible datum".into()));
        }
        let roots = root_closure(&self.cartan, Orientation::Coroots);
        let mut by_height: BTreeMap<i64, u32> = BTreeMap::new();
        for r in &roots {
            *by_height.entry(r.iter().sum()).or_default() += 1;
        }
        let count = |h: i64| by_height.get(&h).copied().unwrap_or(0);
        let mut exps = Vec::new();
        for (&h, &c) in &by_height {
            for _ in 0..c - count(h + 1) {
                exps.push(h as u32);
            }
        }
        Ok(exps)
    }

    /// `ᾱ_0`: the coroot dual to the long dominant root, equivalently the
    /// dominant short root of the coroot system.
    pub(crate) fn long_root_coroot(&self) -> Vec<i64> {
        let n = self.rank();
        let roots = root_closure(&self.cartan, Orientation::Coroots);
        let dominant: Vec<&Vec<i64>> =
            roots.iter().filter(|r| (0..n).all(|i| self.pair(r, i) >= 0)).collect();
        let short = dominant
            .into_iter()
            .min_by_key(|r| r.iter().sum::<i64>())
            .expect("finite root system has a dominant root")
            .clone();
        debug_assert_eq!(
            {
                let theta = self.highest_root_of_dual();
                (0..n).map(|j| theta[j] * self.pair(&short, j)).sum::<i64>()
            },
            2
        );
        short
    }

    /// The highest root `θ̌` of `g` in the basis `(α̌_i)`.
    pub(crate) fn highest_root_of_dual(&self) -> Vec<i64> {
        root_closure(&self.cartan, Orientation::Roots)
            .into_iter()
            .max_by_key(|r| r.iter().sum::<i64>())
            .expect("non-empty root system")
    }

    /// Positive roots of `g` itself (elements of `Λ̌`) in the basis `(α̌_i)`;
    /// finite data only.
    pub fn positive_roots_of_dual(&self) -> Vec<Vec<i64>> {
        root_closure(&self.cartan, Orientation::Roots)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Orientation {
    /// Simple roots `α_i ∈ Λ`; the `j`-string through `β` has `p − q = Σ_i n_i A[i][j]`.
    Coroots,
    /// Simple roots `α̌_i ∈ Λ̌`; `p − q = Σ_i n_i A[j][i]`.
    Roots,
}

/// Positive roots of a finite-type Cartan matrix by closure under root strings.
pub(crate) fn root_closure(cartan: &CartanMatrix, orientation: Orientation) -> Vec<Vec<i64>> {
    let n = cartan.size();
    let pair = |beta: &[i64], j: usize| -> i64 {
        (0..n)
            .map(|i| {
                beta[i]
                    * match orientation {
                        Orientation::Coroots => cartan.get(i, j),
                        Orientation::Roots => cartan.get(j, i),
                    }
            })
            .sum()
    };
    let mut all: HashSet<Vec<i64>> = HashSet::new();
    let mut level: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut v = vec![0; n];
            v[i] = 1;
            v
        })
        .collect();
    let mut out = Vec::new();
    while !level.is_empty() {
        all.extend(level.iter().cloned());
        let mut next: Vec<Vec<i64>> = Vec::new();
        for beta in &level {
            for j in 0..n {
                let mut p = 0;
                let mut probe = beta.clone();
                loop {
                    probe[j] -= 1;
                    if probe[j] < 0 || !all.contains(&probe) {
                        break;
                    }
                    p += 1;
                }
                let q = p - pair(beta, j);
                if q > 0 {
                    let mut up = beta.clone();
                    up[j] += 1;
                    if !next.contains(&up) {
                        next.push(up);
                    }
                }
            }
        }
        out.append(&mut level);
        next.sort();
        level = next;
    }
    out
}

/// Root multiplicities up to a height bound via Peterson's recursion, for the
/// Kac-Moody algebra whose simple roots are the `α_i ∈ Λ`.
///
/// Uses the invariant form `(α_i|α_j) = A[j][i] / d_i`, where `d` is the
/// symmetrizer of `A`, and
/// `(β|β−2ρ) c_β = Σ_{β'+β''=β} (β'|β'') c_{β'} c_{β''}` with
/// `c_β = Σ_{k≥1} mult(β/k)/k`.
pub(crate) fn peterson_multiplicities(cartan: &CartanMatrix, bound: u32) -> Result<Vec<(Vec<i64>, u32)>> {
    let n = cartan.size();
    let d = cartan
        .symmetrizer()
        .ok_or_else(|| Error::InvalidCartan("not symmetrizable".into()))?;
    let form: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| BigRational::new(cartan.get(j, i).into(), d[i].into()))
                .collect()
        })
        .collect();
    let bil = |x: &[i64], y: &[i64]| -> BigRational {
        let mut s = BigRational::zero();
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            for j in 0..n {
                if y[j] != 0 {
                    s += &form[i][j] * BigRational::from_integer((x[i] * y[j]).into());
                }
            }
        }
        s
    };
    let two_rho = |x: &[i64]| -> BigRational {
        (0..n).fold(BigRational::zero(), |s, i| s + &form[i][i] * BigRational::from_integer(x[i].into()))
    };

    let mut c: HashMap<Vec<i64>, BigRational> = HashMap::new();
    let mut mult: BTreeMap<Vec<i64>, u32> = BTreeMap::new();
    let mut by_height: Vec<Vec<Vec<i64>>> = vec![Vec::new(); bound as usize + 1];
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        c.insert(e.clone(), BigRational::one());
        mult.insert(e.clone(), 1);
        if bound >= 1 {
            by_height[1].push(e);
        }
    }
    for h in 2..=bound as usize {
        let mut candidates: HashSet<Vec<i64>> = HashSet::new();
        for beta in &by_height[h - 1] {
            for i in 0..n {
                let mut up = beta.clone();
                up[i] += 1;
                candidates.insert(up);
            }
        }
        for root in mult.keys() {
            let rh = root.iter().sum::<i64>() as usize;
            if h % rh == 0 && h / rh >= 2 {
                candidates.insert(root.iter().map(|x| x * (h / rh) as i64).collect());
            }
        }
        let mut candidates: Vec<Vec<i64>> = candidates.into_iter().collect();
        candidates.sort();
        let support: Vec<(Vec<i64>, BigRational)> =
            c.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        for beta in candidates {
            let mut rhs = BigRational::zero();
            for (b1, c1) in &support {
                if b1.iter().zip(&beta).any(|(x, y)| x > y) || *b1 == beta {
                    continue;
                }
                let b2: Vec<i64> = beta.iter().zip(b1).map(|(x, y)| x - y).collect();
                if let Some(c2) = c.get(&b2) {
                    rhs += bil(b1, &b2) * c1 * c2;
                }
            }
            // Σ_{k≥2} mult(β/k)/k
            let mut from_multiples = BigRational::zero();
            for k in 2..=h as i64 {
                if beta.iter().all(|x| x % k == 0) {
                    let sub: Vec<i64> = beta.iter().map(|x| x / k).collect();
                    if let Some(&ms) = mult.get(&sub) {
                        from_multiples += BigRational::new(ms.into(), k.into());
                    }
                }
            }
            let lhs = bil(&beta, &beta) - two_rho(&beta);
            if lhs.is_zero() {
                // No root of height ≥ 2 has (β|β) = 2(ρ|β), so mult(β) = 0 and
                // c_β comes from the submultiples alone.
                if !rhs.is_zero() {
                    return Err(Error::Invariant(format!(
                        "Peterson recursion degenerate at {beta:?}"
                    )));
                }
                if !from_multiples.is_zero() {
                    c.insert(beta, from_multiples);
                }
                continue;
            }
            let cb = rhs / lhs;
            if cb.is_zero() && from_multiples.is_zero() {
                continue;
            }
            // mult(β) = c_β − Σ_{k≥2} mult(β/k)/k
            let m = &cb - &from_multiples;
            if !m.is_integer() || m.is_negative() {
                return Err(Error::Invariant(format!(
                    "Peterson recursion produced multiplicity {m} at {beta:?}"
                )));
            }
            c.insert(beta.clone(), cb);
            let m = m.to_integer().to_u32().expect("small multiplicity");
            if m > 0 {
                mult.insert(beta.clone(), m);
                by_height[h].push(beta);
            }
        }
    }
    Ok(mult.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(f: char, r: usize) -> RootDatum {
        RootDatum::build_finite(f, r).unwrap()
    }

    #[test]
    fn small_cartan_matrices() {
        assert_eq!(fin('A', 1).cartan().rows(), &[vec![2]]);
        assert_eq!(fin('A', 2).cartan().rows(), &[vec![2, -1], vec![-1, 2]]);
        assert_eq!(fin('G', 2).cartan().symmetrizer().unwrap(), vec![1, 3]);
    }

    #[test]
    fn symmetrizer_matches_brute_force() {
        for (f, r) in [('B', 3), ('C', 3), ('F', 4), ('G', 2), ('D', 4)] {
            let c = CartanMatrix::finite(f, r).unwrap();
            let d = c.symmetrizer().unwrap();
            for i in 0..r {
                for j in 0..r {
                    assert_eq!(d[i] * c.get(i, j), d[j] * c.get(j, i));
                }
            }
        }
    }

    #[test]
    fn rejects_bad_types_and_matrices() {
        assert!(RootDatum::build_finite('E', 5).is_err());
        assert!(RootDatum::build_finite('Q', 2).is_err());
        assert!(RootDatum::build_finite('D', 2).is_err());
        assert!(CartanMatrix::new(vec![vec![2, -1], vec![0, 2]]).is_err());
        assert!(CartanMatrix::new(vec![vec![2, 1], vec![1, 2]]).is_err());
        assert!(CartanMatrix::new(vec![vec![3]]).is_err());
        // not symmetrizable: cycle with inconsistent ratios
        assert!(CartanMatrix::new(vec![
            vec![2, -1, -1],
            vec![-2, 2, -1],
            vec![-1, -1, 2],
        ])
        .is_err());
    }

    #[test]
    fn every_family_is_finite_type() {
        for (f, r) in [('A', 5), ('B', 4), ('C', 4), ('D', 5), ('E', 6), ('E', 7), ('E', 8), ('F', 4), ('G', 2)] {
            assert!(CartanMatrix::finite(f, r).unwrap().is_finite_type(), "{f}{r}");
        }
        assert!(!CartanMatrix::new(vec![vec![2, -2], vec![-2, 2]]).unwrap().is_finite_type());
    }

    #[test]
    fn affinize_a1_and_a2() {
        let a1 = fin('A', 1).affinize().unwrap();
        assert_eq!(a1.simple_coroot(0), WeightVec::Affine { finite: vec![-1], delta: 1 });
        assert_eq!(a1.cartan().rows(), &[vec![2, -2], vec![-2, 2]]);
        assert_eq!(a1.weight_of(a1.null_root().unwrap()), WeightVec::Affine { finite: vec![0], delta: 1 });
        let a2 = fin('A', 2).affinize().unwrap();
        assert_eq!(a2.alpha0_bar().unwrap(), &[1, 1]);
        assert!(fin('A', 2).affinize().unwrap().affinize().is_err());
    }

    #[test]
    fn pairing_reproduces_cartan_entries() {
        for d in [fin('A', 3), fin('B', 3), fin('G', 2), fin('A', 2).affinize().unwrap(), fin('C', 2).affinize().unwrap()] {
            for i in 0..d.rank() {
                for j in 0..d.rank() {
                    let v = d.pairing(&d.simple_coroot(i), &d.simple_root(j)).unwrap();
                    assert_eq!(v, d.cartan().get(i, j), "{} ({i},{j})", d.name());
                }
            }
        }
    }

    #[test]
    fn delta_is_null() {
        for d in [fin('A', 1), fin('B', 3), fin('G', 2), fin('D', 4)] {
            let a = d.affinize().unwrap();
            let delta = a.null_root().unwrap();
            for i in 0..a.rank() {
                assert_eq!(a.pair(delta, i), 0, "{}", a.name());
            }
        }
    }

    #[test]
    fn positivity_and_length() {
        let a1 = fin('A', 1).affinize().unwrap();
        let delta = WeightVec::Affine { finite: vec![0], delta: 1 };
        assert_eq!(a1.is_positive(&delta).unwrap(), Some(vec![1, 1]));
        assert_eq!(a1.length(&delta).unwrap(), 2);
        let a2 = fin('A', 2);
        assert_eq!(a2.is_positive(&WeightVec::Finite(vec![1, 0])).unwrap(), Some(vec![1, 0]));
        assert_eq!(a2.is_positive(&WeightVec::Finite(vec![-1, 0])).unwrap(), None);
        assert!(a2.length(&WeightVec::Finite(vec![-1, 0])).is_err());
        assert_eq!(a2.length(&WeightVec::Finite(vec![1, 1])).unwrap(), 2);
        assert!(a2.is_positive(&WeightVec::Finite(vec![1])).is_err());
        assert!(a2.is_positive(&WeightVec::Affine { finite: vec![1, 1], delta: 0 }).is_err());
    }

    #[test]
    fn exponents_of_small_types() {
        assert_eq!(fin('A', 1).exponents().unwrap(), vec![1]);
        assert_eq!(fin('A', 2).exponents().unwrap(), vec![1, 2]);
        assert_eq!(fin('D', 4).exponents().unwrap(), vec![1, 3, 3, 5]);
        assert!(fin('A', 1).affinize().unwrap().exponents().is_err());
    }

    #[test]
    fn kostant_small_values() {
        let a2 = fin('A', 2);
        assert_eq!(a2.kostant_partition(&WeightVec::Finite(vec![1, 1])).unwrap(), 2);
        assert_eq!(a2.kostant_partition(&WeightVec::Finite(vec![0, 1])).unwrap(), 1);
        assert_eq!(a2.kostant_partition(&WeightVec::Finite(vec![-1, 1])).unwrap(), 0);
        let a1 = fin('A', 1).affinize().unwrap();
        assert_eq!(a1.kostant_partition(&WeightVec::Affine { finite: vec![0], delta: 1 }).unwrap(), 2);
    }

    #[test]
    fn affine_roots_need_bound() {
        assert!(fin('A', 1).affinize().unwrap().positive_roots(None).is_err());
    }

    #[test]
    fn levi_rejects_affine_subsets() {
        let a1 = fin('A', 1).affinize().unwrap();
        assert!(a1.levi(&[0, 1]).is_err());
        assert!(a1.levi(&[0]).is_ok());
        assert!(a1.levi(&[2]).is_err());
    }
}
