//! ADHM data over exact rationals: the moment map, stability, the monad
//! built from a datum, characteristic polynomials and invariant functions.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, RngExt};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Dense matrix over `Q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = BigRational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>, cols: usize) -> Result<Self> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for (k, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Shape(format!("row {k} has {} entries, expected {cols}", row.len())));
            }
            data.extend(row);
        }
        Ok(QMatrix { rows: r, cols, data })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        QMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect(), cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn to_rows(&self) -> Vec<Vec<BigRational>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(<[BigRational]>::to_vec).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn scale(&self, s: &BigRational) -> QMatrix {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn trace(&self) -> BigRational {
        (0..self.rows.min(self.cols)).map(|k| self[(k, k)].clone()).sum()
    }

    /// Row echelon form and rank, by Gaussian elimination.
    fn echelon(&self) -> (QMatrix, usize) {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            let Some(p) = (rank..m.rows).find(|&r| !m[(r, c)].is_zero()) else {
                continue;
            };
            for k in 0..m.cols {
                m.data.swap(p * m.cols + k, rank * m.cols + k);
            }
            let pivot = m[(rank, c)].clone();
            for r in 0..m.rows {
                if r != rank && !m[(r, c)].is_zero() {
                    let factor = &m[(r, c)] / &pivot;
                    for k in c..m.cols {
                        let v = &m[(rank, k)] * &factor;
                        m[(r, k)] -= v;
                    }
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        (m, rank)
    }

    pub fn rank(&self) -> usize {
        self.echelon().1
    }

    pub fn hstack(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.rows, other.rows);
        let mut m = QMatrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m[(r, c)] = self[(r, c)].clone();
            }
            for c in 0..other.cols {
                m[(r, self.cols + c)] = other[(r, c)].clone();
            }
        }
        m
    }

    /// A basis of the column space, as the columns of the result.
    pub fn column_basis(&self) -> QMatrix {
        let (e, rank) = self.transpose().echelon();
        let mut b = QMatrix::zeros(self.rows, rank);
        for k in 0..rank {
            for r in 0..self.rows {
                b[(r, k)] = e[(k, r)].clone();
            }
        }
        b
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let (e, rank) = self.hstack(&QMatrix::identity(n)).echelon();
        if rank < n || (0..n).any(|k| e[(k, k)].is_zero()) {
            return None;
        }
        let mut inv = QMatrix::zeros(n, n);
        for r in 0..n {
            let p = e[(r, r)].clone();
            for c in 0..n {
                inv[(r, c)] = &e[(r, n + c)] / &p;
            }
        }
        Some(inv)
    }

    /// `det(x·I − M)` by Faddeev–LeVerrier, coefficients from `x^n` down.
    pub fn charpoly(&self) -> Result<Vec<BigRational>> {
        if self.rows != self.cols {
            return Err(Error::Shape(format!("charpoly of a {}x{} matrix", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut coeffs = vec![BigRational::one()];
        let mut mk = QMatrix::zeros(n, n);
        for k in 1..=n {
            let prev = coeffs[k - 1].clone();
            mk = &(self * &mk) + &QMatrix::identity(n).scale(&prev);
            let ck = -(self * &mk).trace() / q(k as i64);
            coeffs.push(ck);
        }
        Ok(coeffs)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, range: i64) -> QMatrix {
        let data = (0..rows * cols)
            .map(|_| {
                let num = rng.random_range(-range..=range);
                let den = rng.random_range(1..=3i64);
                BigRational::new(BigInt::from(num), BigInt::from(den))
            })
            .collect();
        QMatrix { rows, cols, data }
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = BigRational;
    fn index(&self, (r, c): (usize, usize)) -> &BigRational {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigRational {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;
    fn mul(self, o: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, o.rows, "matrix shapes do not compose");
        let mut m = QMatrix::zeros(self.rows, o.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..o.cols {
                    let v = a * &o[(k, c)];
                    m[(r, c)] += v;
                }
            }
        }
        m
    }
}

impl Add for &QMatrix {
    type Output = QMatrix;
    fn add(self, o: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;
    fn sub(self, o: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }
}

/// `"p/q"` or `"p"`.
pub fn rat_to_string(x: &BigRational) -> String {
    x.to_string()
}

pub fn parse_rat(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let parsed: std::result::Result<BigRational, _> = s.parse();
    match parsed {
        Ok(x) => Ok(x),
        Err(_) => Err(Error::Parse(format!("not a rational: {s:?}"))),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RatRepr {
    Str(String),
    Int(i64),
}

fn ser_matrix<S: Serializer>(m: &QMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<String>> = m.to_rows().iter().map(|r| r.iter().map(rat_to_string).collect()).collect();
    rows.serialize(s)
}

fn de_rows<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<BigRational>>, D::Error> {
    let raw: Vec<Vec<RatRepr>> = Vec::deserialize(d)?;
    raw.into_iter()
        .map(|row| {
            row.into_iter()
                .map(|x| match x {
                    RatRepr::Str(s) => parse_rat(&s).map_err(serde::de::Error::custom),
                    RatRepr::Int(n) => Ok(q(n)),
                })
                .collect()
        })
        .collect()
}

#[derive(Deserialize)]
struct RawDatum {
    a: usize,
    n: usize,
    #[serde(rename = "B1", deserialize_with = "de_rows")]
    b1: Vec<Vec<BigRational>>,
    #[serde(rename = "B2", deserialize_with = "de_rows")]
    b2: Vec<Vec<BigRational>>,
    #[serde(deserialize_with = "de_rows")]
    i: Vec<Vec<BigRational>>,
    #[serde(deserialize_with = "de_rows")]
    j: Vec<Vec<BigRational>>,
}

/// `(B1, B2, ı, ȷ)` with `B_k: V → V`, `ı: W → V`, `ȷ: V → W`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdhmDatum {
    pub a: usize,
    pub n: usize,
    #[serde(rename = "B1", serialize_with = "ser_matrix")]
    pub b1: QMatrix,
    #[serde(rename = "B2", serialize_with = "ser_matrix")]
    pub b2: QMatrix,
    #[serde(serialize_with = "ser_matrix")]
    pub i: QMatrix,
    #[serde(serialize_with = "ser_matrix")]
    pub j: QMatrix,
}

impl<'de> Deserialize<'de> for AdhmDatum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawDatum::deserialize(d)?;
        let mat = |rows: Vec<Vec<BigRational>>, r: usize, c: usize, name: &str| {
            if rows.len() != r {
                return Err(Error::Shape(format!("{name} has {} rows, expected {r}", rows.len())));
            }
            QMatrix::from_rows(rows, c).map_err(|e| Error::Shape(format!("{name}: {e}")))
        };
        let build = || -> Result<AdhmDatum> {
            AdhmDatum::new(
                mat(raw.b1, raw.a, raw.a, "B1")?,
                mat(raw.b2, raw.a, raw.a, "B2")?,
                mat(raw.i, raw.a, raw.n, "i")?,
                mat(raw.j, raw.n, raw.a, "j")?,
            )
        };
        build().map_err(serde::de::Error::custom)
    }
}

impl AdhmDatum {
    pub fn new(b1: QMatrix, b2: QMatrix, i: QMatrix, j: QMatrix) -> Result<Self> {
        let a = b1.rows();
        let n = i.cols();
        let shapes = [
            ("B1", b1.rows(), b1.cols(), a, a),
            ("B2", b2.rows(), b2.cols(), a, a),
            ("i", i.rows(), i.cols(), a, n),
            ("j", j.rows(), j.cols(), n, a),
        ];
        for (name, r, c, er, ec) in shapes {
            if (r, c) != (er, ec) {
                return Err(Error::Shape(format!("{name} is {r}x{c}, expected {er}x{ec}")));
            }
        }
        Ok(AdhmDatum { a, n, b1, b2, i, j })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Shape(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("datum serializes")
    }

    /// Random entries `p/q` with `|p| ≤ range`, `q ≤ 3`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, a: usize, n: usize, range: i64) -> Self {
        AdhmDatum {
            a,
            n,
            b1: QMatrix::random(rng, a, a, range),
            b2: QMatrix::random(rng, a, a, range),
            i: QMatrix::random(rng, a, n, range),
            j: QMatrix::random(rng, n, a, range),
        }
    }

    /// A moment-map solution with `ȷ·w(B1,B2)·ı = 0` for every word `w` and
    /// non-commuting `B1`, `B2` when `a2 > 0`.
    ///
    /// `V = V_1 ⊕ V_2` with `dim V_1 = n = a1`; both `B_k` are block upper
    /// triangular with commuting diagonal blocks, `ı` embeds `W` as `V_1`, and
    /// `ȷ` kills `V_1` and cancels the off-diagonal commutator on `V_2`.
    pub fn random_moment_solution<R: Rng + ?Sized>(rng: &mut R, a1: usize, a2: usize, range: i64) -> Self {
        let commuting_pair = |rng: &mut R, k: usize| {
            let x = QMatrix::random(rng, k, k, range);
            let c: Vec<BigRational> = (0..3).map(|_| q(rng.random_range(-2..=2))).collect();
            let y = &(&QMatrix::identity(k).scale(&c[0]) + &x.scale(&c[1])) + &(&x * &x).scale(&c[2]);
            (x, y)
        };
        let (d1, d2) = commuting_pair(rng, a1);
        let (e1, e2) = commuting_pair(rng, a2);
        let x1 = QMatrix::random(rng, a1, a2, range);
        let x2 = QMatrix::random(rng, a1, a2, range);
        let a = a1 + a2;
        let block = |d: &QMatrix, x: &QMatrix, e: &QMatrix| {
            let mut m = QMatrix::zeros(a, a);
            for r in 0..a1 {
                for c in 0..a1 {
                    m[(r, c)] = d[(r, c)].clone();
                }
                for c in 0..a2 {
                    m[(r, a1 + c)] = x[(r, c)].clone();
                }
            }
            for r in 0..a2 {
                for c in 0..a2 {
                    m[(a1 + r, a1 + c)] = e[(r, c)].clone();
                }
            }
            m
        };
        let b1 = block(&d1, &x1, &e1);
        let b2 = block(&d2, &x2, &e2);
        let off = &(&(&(&d1 * &x2) + &(&x1 * &e2)) - &(&d2 * &x1)) - &(&x2 * &e1);
        let mut i = QMatrix::zeros(a, a1);
        for k in 0..a1 {
            i[(k, k)] = BigRational::one();
        }
        let mut j = QMatrix::zeros(a1, a);
        for r in 0..a1 {
            for c in 0..a2 {
                j[(r, a1 + c)] = -off[(r, c)].clone();
            }
        }
        AdhmDatum { a, n: a1, b1, b2, i, j }
    }

    /// `(g B1 g⁻¹, g B2 g⁻¹, g ı, ȷ g⁻¹)`.
    pub fn conjugate(&self, g: &QMatrix) -> Result<Self> {
        let gi = g.inverse().ok_or_else(|| Error::Shape("conjugating matrix is singular".into()))?;
        Ok(AdhmDatum {
            a: self.a,
            n: self.n,
            b1: &(g * &self.b1) * &gi,
            b2: &(g * &self.b2) * &gi,
            i: g * &self.i,
            j: &self.j * &gi,
        })
    }

    /// Block diagonal sum on `V ⊕ V′`, `W ⊕ W′`.
    pub fn direct_sum(&self, o: &AdhmDatum) -> AdhmDatum {
        let diag = |x: &QMatrix, y: &QMatrix| {
            let mut m = QMatrix::zeros(x.rows() + y.rows(), x.cols() + y.cols());
            for r in 0..x.rows() {
                for c in 0..x.cols() {
                    m[(r, c)] = x[(r, c)].clone();
                }
            }
            for r in 0..y.rows() {
                for c in 0..y.cols() {
                    m[(x.rows() + r, x.cols() + c)] = y[(r, c)].clone();
                }
            }
            m
        };
        AdhmDatum {
            a: self.a + o.a,
            n: self.n + o.n,
            b1: diag(&self.b1, &o.b1),
            b2: diag(&self.b2, &o.b2),
            i: diag(&self.i, &o.i),
            j: diag(&self.j, &o.j),
        }
    }
}

/// `[B1, B2] + ıȷ`.
pub fn moment_residual(x: &AdhmDatum) -> QMatrix {
    let comm = &(&x.b1 * &x.b2) - &(&x.b2 * &x.b1);
    &comm + &(&x.i * &x.j)
}

/// Smallest subspace containing the columns of `start` and invariant under
/// the given operators, returned as a column basis.
fn krylov_closure(start: &QMatrix, ops: &[&QMatrix]) -> QMatrix {
    let mut basis = start.column_basis();
    loop {
        let mut grown = basis.clone();
        for op in ops {
            grown = grown.hstack(&(*op * &basis));
        }
        let next = grown.column_basis();
        if next.cols() == basis.cols() {
            return basis;
        }
        basis = next;
    }
}

/// No proper `B1, B2`-invariant subspace contains `im ı`.
pub fn is_stable(x: &AdhmDatum) -> bool {
    krylov_closure(&x.i, &[&x.b1, &x.b2]).cols() == x.a
}

/// No nonzero `B1, B2`-invariant subspace lies in `ker ȷ`.
pub fn is_costable(x: &AdhmDatum) -> bool {
    let (t1, t2) = (x.b1.transpose(), x.b2.transpose());
    krylov_closure(&x.j.transpose(), &[&t1, &t2]).cols() == x.a
}

/// Polynomial in `z0, z1, z2` with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ZPoly(BTreeMap<[u8; 3], BigRational>);

impl ZPoly {
    pub fn zero() -> Self {
        ZPoly::default()
    }

    pub fn term(exp: [u8; 3], c: BigRational) -> Self {
        let mut p = ZPoly::zero();
        p.add_term(exp, c);
        p
    }

    fn add_term(&mut self, exp: [u8; 3], c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry(exp).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&exp);
        }
    }

    pub fn coeff(&self, exp: [u8; 3]) -> BigRational {
        self.0.get(&exp).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add(&self, o: &ZPoly) -> ZPoly {
        let mut p = self.clone();
        for (e, c) in &o.0 {
            p.add_term(*e, c.clone());
        }
        p
    }

    fn mul(&self, o: &ZPoly) -> ZPoly {
        let mut p = ZPoly::zero();
        for (a, x) in &self.0 {
            for (b, y) in &o.0 {
                p.add_term([a[0] + b[0], a[1] + b[1], a[2] + b[2]], x * y);
            }
        }
        p
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.0.iter().rev() {
            let (neg, c) = if c.is_negative() { (true, -c) } else { (false, c.clone()) };
            match (first, neg) {
                (true, true) => write!(f, "-")?,
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
                _ => {}
            }
            first = false;
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(v, &k)| if k == 1 { format!("z{v}") } else { format!("z{v}^{k}") })
                .collect();
            if mono.is_empty() || !c.is_one() {
                write!(f, "{c}")?;
            }
            write!(f, "{}", mono.join("*"))?;
        }
        Ok(())
    }
}

impl Serialize for ZPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_string().serialize(s)
    }
}

/// Matrix with entries in `Q[z0, z1, z2]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<ZPoly>>,
}

impl ZMatrix {
    fn zeros(rows: usize, cols: usize) -> Self {
        ZMatrix { rows, cols, entries: vec![vec![ZPoly::zero(); cols]; rows] }
    }

    /// `Σ_k z^{e_k} M_k`.
    fn linear(rows: usize, cols: usize, parts: &[([u8; 3], &QMatrix)]) -> Self {
        let mut m = ZMatrix::zeros(rows, cols);
        for (e, mat) in parts {
            for r in 0..rows {
                for c in 0..cols {
                    m.entries[r][c].add_term(*e, mat[(r, c)].clone());
                }
            }
        }
        m
    }

    fn mul(&self, o: &ZMatrix) -> ZMatrix {
        let mut m = ZMatrix::zeros(self.rows, o.cols);
        for r in 0..self.rows {
            for c in 0..o.cols {
                let mut acc = ZPoly::zero();
                for k in 0..self.cols {
                    acc = acc.add(&self.entries[r][k].mul(&o.entries[k][c]));
                }
                m.entries[r][c] = acc;
            }
        }
        m
    }

    fn vstack(parts: &[ZMatrix]) -> ZMatrix {
        let cols = parts[0].cols;
        let entries: Vec<Vec<ZPoly>> = parts.iter().flat_map(|p| p.entries.clone()).collect();
        ZMatrix { rows: entries.len(), cols, entries }
    }

    fn hstack(parts: &[ZMatrix]) -> ZMatrix {
        let rows = parts[0].rows;
        let entries: Vec<Vec<ZPoly>> =
            (0..rows).map(|r| parts.iter().flat_map(|p| p.entries[r].clone()).collect()).collect();
        let cols = entries.first().map_or(0, Vec::len);
        ZMatrix { rows, cols, entries }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(ZPoly::is_zero)
    }
}

const Z0: [u8; 3] = [1, 0, 0];
const Z1: [u8; 3] = [0, 1, 0];
const Z2: [u8; 3] = [0, 0, 1];

/// `d = (z0B1 − z1, z0B2 − z2, z0ȷ)` and `b = (−z0B2 + z2, z0B1 − z1, z0ı)`.
pub fn monad(x: &AdhmDatum) -> (ZMatrix, ZMatrix) {
    let a = x.a;
    let id = QMatrix::identity(a);
    let mid = -&id;
    let nb2 = -&x.b2;
    let d = ZMatrix::vstack(&[
        ZMatrix::linear(a, a, &[(Z0, &x.b1), (Z1, &mid)]),
        ZMatrix::linear(a, a, &[(Z0, &x.b2), (Z2, &mid)]),
        ZMatrix::linear(x.n, a, &[(Z0, &x.j)]),
    ]);
    let b = ZMatrix::hstack(&[
        ZMatrix::linear(a, a, &[(Z0, &nb2), (Z2, &id)]),
        ZMatrix::linear(a, a, &[(Z0, &x.b1), (Z1, &mid)]),
        ZMatrix::linear(a, x.n, &[(Z0, &x.i)]),
    ]);
    (d, b)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonadCheck {
    pub composite: ZMatrix,
    pub expected: ZMatrix,
    pub holds: bool,
}

/// Compares `b∘d` with `z0²·([B1,B2] + ıȷ)` entrywise.
pub fn monad_identity_check(x: &AdhmDatum) -> MonadCheck {
    let (d, b) = monad(x);
    let composite = b.mul(&d);
    let expected = ZMatrix::linear(x.a, x.a, &[([2, 0, 0], &moment_residual(x))]);
    let holds = composite == expected;
    MonadCheck { composite, expected, holds }
}

/// Coefficients of a monic polynomial, leading first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPoly(pub Vec<BigRational>);

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let deg = self.0.len().saturating_sub(1);
        let mut first = true;
        for (k, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let p = deg - k;
            let (neg, c) = if c.is_negative() { (true, -c) } else { (false, c.clone()) };
            match (first, neg) {
                (true, true) => write!(f, "-")?,
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
                _ => {}
            }
            first = false;
            let coef = if c.is_one() && p > 0 { String::new() } else { c.to_string() };
            match p {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{coef}x")?,
                _ => write!(f, "{coef}x^{p}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Serialize for QPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_string().serialize(s)
    }
}

/// `(charpoly(B1), charpoly(B2))`.
pub fn charpoly_projections(x: &AdhmDatum) -> (QPoly, QPoly) {
    (
        QPoly(x.b1.charpoly().expect("square")),
        QPoly(x.b2.charpoly().expect("square")),
    )
}

/// Matrix coefficients of `ȷ·w(B1,B2)·ı` and traces of words in
/// `B1, B2, ıȷ`, words ordered by length then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantTable {
    pub tw: Vec<(String, Vec<Vec<String>>)>,
    pub tv: Vec<(String, String)>,
}

fn words(alphabet: usize, max_len: usize, min_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut level: Vec<Vec<usize>> = vec![Vec::new()];
    for len in 0..=max_len {
        if len >= min_len {
            out.extend(level.iter().cloned());
        }
        level = level
            .iter()
            .flat_map(|w| (0..alphabet).map(move |c| {
                let mut v = w.clone();
                v.push(c);
                v
            }))
            .collect();
    }
    out
}

fn word_matrix(ops: &[&QMatrix], w: &[usize], dim: usize) -> QMatrix {
    w.iter().fold(QMatrix::identity(dim), |acc, &k| &acc * ops[k])
}

pub fn invariants(x: &AdhmDatum, max_len: usize) -> InvariantTable {
    let p = &x.i * &x.j;
    let names = ["B1", "B2", "P"];
    let label = |w: &[usize]| {
        if w.is_empty() {
            "1".to_string()
        } else {
            w.iter().map(|&k| names[k]).collect::<Vec<_>>().join("*")
        }
    };
    let tw = words(2, max_len, 0)
        .into_iter()
        .map(|w| {
            let m = &(&x.j * &word_matrix(&[&x.b1, &x.b2], &w, x.a)) * &x.i;
            let rows = m.to_rows().iter().map(|r| r.iter().map(rat_to_string).collect()).collect();
            (label(&w), rows)
        })
        .collect();
    let tv = words(3, max_len, 1)
        .into_iter()
        .map(|w| (label(&w), rat_to_string(&word_matrix(&[&x.b1, &x.b2, &p], &w, x.a).trace())))
        .collect();
    InvariantTable { tw, tv }
}

/// `tr` of a word in `B1, B2` (letters 0 and 1).
pub fn word_trace(x: &AdhmDatum, w: &[usize]) -> BigRational {
    word_matrix(&[&x.b1, &x.b2], w, x.a).trace()
}

/// A random invertible `a × a` matrix.
pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, a: usize, range: i64) -> QMatrix {
    loop {
        let g = QMatrix::random(rng, a, a, range);
        if g.rank() == a {
            return g;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn m(rows: &[Vec<i64>]) -> QMatrix {
        QMatrix::from_i64(rows).unwrap()
    }

    fn scalar(b1: i64, b2: i64, i: i64, j: i64) -> AdhmDatum {
        AdhmDatum::new(m(&[vec![b1]]), m(&[vec![b2]]), m(&[vec![i]]), m(&[vec![j]])).unwrap()
    }

    #[test]
    fn linear_algebra_basics() {
        let a = m(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(a.rank(), 1);
        assert!(a.inverse().is_none());
        let b = m(&[vec![2, 1], vec![1, 1]]);
        assert_eq!(&b * &b.inverse().unwrap(), QMatrix::identity(2));
        assert_eq!(b.charpoly().unwrap(), vec![q(1), q(-3), q(1)]);
        assert_eq!(QPoly(b.charpoly().unwrap()).to_string(), "x^2 - 3x + 1");
        let nil = m(&[vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 0]]);
        assert_eq!(QPoly(nil.charpoly().unwrap()).to_string(), "x^3");
    }

    #[test]
    fn residual_examples() {
        let x = scalar(3, 5, 2, 7);
        assert_eq!(moment_residual(&x), m(&[vec![14]]));
        let mut rng = StdRng::seed_from_u64(1);
        let mut y = AdhmDatum::random(&mut rng, 3, 2, 4);
        y.j = QMatrix::zeros(2, 3);
        assert_eq!(moment_residual(&y), &(&y.b1 * &y.b2) - &(&y.b2 * &y.b1));
        y.b2 = QMatrix::identity(3);
        assert_eq!(moment_residual(&y), &y.i * &y.j);
    }

    #[test]
    fn stability_examples() {
        assert!(is_stable(&scalar(0, 0, 1, 0)));
        assert!(!is_stable(&scalar(0, 0, 0, 1)));
        assert!(is_costable(&scalar(0, 0, 0, 1)));
        let jordan = AdhmDatum::new(
            m(&[vec![0, 1], vec![0, 0]]),
            QMatrix::zeros(2, 2),
            m(&[vec![0], vec![1]]),
            QMatrix::zeros(1, 2),
        )
        .unwrap();
        assert!(is_stable(&jordan));
        assert!(!is_costable(&jordan));
        // a summand with ı = 0 spoils stability
        assert!(!is_stable(&jordan.direct_sum(&scalar(1, 1, 0, 0))));
    }

    #[test]
    fn monad_examples() {
        let x = scalar(2, 3, 1, 5);
        let chk = monad_identity_check(&x);
        assert!(chk.holds);
        assert_eq!(chk.composite.entries[0][0].to_string(), "5z0^2");
        let mut rng = StdRng::seed_from_u64(7);
        let sol = AdhmDatum::random_moment_solution(&mut rng, 2, 2, 3);
        assert!(moment_residual(&sol).is_zero());
        assert!(monad_identity_check(&sol).composite.is_zero());
    }

    #[test]
    fn charpolys_multiply_over_direct_sums() {
        let mut rng = StdRng::seed_from_u64(3);
        let x = AdhmDatum::random(&mut rng, 2, 1, 3);
        let y = AdhmDatum::random(&mut rng, 1, 1, 3);
        let s = x.direct_sum(&y);
        let mul = |p: &[BigRational], q: &[BigRational]| {
            let mut out = vec![BigRational::zero(); p.len() + q.len() - 1];
            for (a, u) in p.iter().enumerate() {
                for (b, v) in q.iter().enumerate() {
                    out[a + b] += u * v;
                }
            }
            out
        };
        assert_eq!(s.b1.charpoly().unwrap(), mul(&x.b1.charpoly().unwrap(), &y.b1.charpoly().unwrap()));
    }

    #[test]
    fn invariant_examples() {
        let x = scalar(3, 1, 2, 0);
        let t = invariants(&x, 3);
        assert!(t.tw.iter().all(|(_, m)| m.iter().flatten().all(|v| v == "0")));
        let b1_cubed = t.tv.iter().find(|(w, _)| w == "B1*B1*B1").unwrap();
        assert_eq!(b1_cubed.1, "27");
        assert_eq!(t.tv.len(), 3 + 9 + 27);
        assert_eq!(t.tw.len(), 1 + 2 + 4 + 8);
    }

    #[test]
    fn json_round_trip() {
        let s = r#"{"a":1,"n":1,"B1":[["1/2"]],"B2":[["3"]],"i":[["-2/4"]],"j":[[1]]}"#;
        let x = AdhmDatum::from_json(s).unwrap();
        assert_eq!(x.i[(0, 0)], BigRational::new(BigInt::from(-1), BigInt::from(2)));
        let back = AdhmDatum::from_json(&x.to_json()).unwrap();
        assert_eq!(back, x);
        assert!(AdhmDatum::from_json(r#"{"a":2,"n":1,"B1":[["1"]],"B2":[["3"]],"i":[["1"]],"j":[["1"]]}"#).is_err());
    }
}
