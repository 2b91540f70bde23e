//! Abstract crystals in the positive-weight convention: weights lie in
//! `Λ^pos`-like cones, `f_i` moves toward weight zero and
//! `φ_i(b) = max{n | f_i^n(b) ≠ 0}` for normal elements.
//!
//! Weights are coefficient vectors over the simple coroots of the datum the
//! crystal lives over.

use std::fmt;

use crate::error::{Error, Result};
use crate::root_datum::RootDatum;

/// An integer or `−∞`; `−∞` absorbs addition and is below every integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ext {
    NegInf,
    Fin(i64),
}

impl Ext {
    pub fn finite(self) -> Option<i64> {
        match self {
            Ext::Fin(v) => Some(v),
            Ext::NegInf => None,
        }
    }

    pub fn add(self, k: i64) -> Ext {
        match self {
            Ext::Fin(v) => Ext::Fin(v + k),
            Ext::NegInf => Ext::NegInf,
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Fin(v) => write!(f, "{v}"),
            Ext::NegInf => write!(f, "-inf"),
        }
    }
}

pub trait Crystal {
    type Elt: Clone + PartialEq + fmt::Debug;

    fn datum(&self) -> &RootDatum;
    fn wt(&self, b: &Self::Elt) -> Vec<i64>;
    fn e(&self, b: &Self::Elt, i: usize) -> Option<Self::Elt>;
    fn f(&self, b: &Self::Elt, i: usize) -> Option<Self::Elt>;
    fn phi(&self, b: &Self::Elt, i: usize) -> Ext;

    /// `ε_i(b) = φ_i(b) − ⟨wt(b), α̌_i⟩`.
    fn eps(&self, b: &Self::Elt, i: usize) -> Ext {
        self.phi(b, i).add(-self.datum().pair(&self.wt(b), i))
    }

    fn rank(&self) -> usize {
        self.datum().rank()
    }
}

/// `B_i`: elements `b_i(n)`, `n ≥ 0`, of weight `n·α_i`.
#[derive(Clone, Debug)]
pub struct Elementary<'a> {
    datum: &'a RootDatum,
    index: usize,
}

impl<'a> Elementary<'a> {
    pub fn new(datum: &'a RootDatum, index: usize) -> Self {
        assert!(index < datum.rank());
        Elementary { datum, index }
    }

    pub fn index(&self) -> usize {
        self.index
    }
}

impl Crystal for Elementary<'_> {
    type Elt = u64;

    fn datum(&self) -> &RootDatum {
        self.datum
    }

    fn wt(&self, b: &u64) -> Vec<i64> {
        let mut w = vec![0; self.datum.rank()];
        w[self.index] = *b as i64;
        w
    }

    fn e(&self, b: &u64, i: usize) -> Option<u64> {
        (i == self.index).then_some(b + 1)
    }

    fn f(&self, b: &u64, i: usize) -> Option<u64> {
        if i == self.index {
            b.checked_sub(1)
        } else {
            None
        }
    }

    fn phi(&self, b: &u64, i: usize) -> Ext {
        if i == self.index {
            Ext::Fin(*b as i64)
        } else {
            Ext::NegInf
        }
    }

    fn eps(&self, b: &u64, i: usize) -> Ext {
        if i == self.index {
            Ext::Fin(-(*b as i64))
        } else {
            Ext::NegInf
        }
    }
}

/// The finite `sl_2`-string of highest weight `n` in direction `i`: element
/// `k` (`0 ≤ k ≤ n`) has `φ_i = n − k`, `ε_i = k` and weight `top − k·α_i`.
#[derive(Clone, Debug)]
pub struct Sl2String<'a> {
    datum: &'a RootDatum,
    index: usize,
    n: u64,
    top: Vec<i64>,
}

impl<'a> Sl2String<'a> {
    /// `top` must satisfy `⟨top, α̌_i⟩ = n`.
    pub fn new(datum: &'a RootDatum, index: usize, n: u64, top: Vec<i64>) -> Result<Self> {
        if top.len() != datum.rank() || datum.pair(&top, index) != n as i64 {
            return Err(Error::Shape(format!(
                "top weight {top:?} does not pair to {n} with the simple root {index}"
            )));
        }
        Ok(Sl2String { datum, index, n, top })
    }

    pub fn elements(&self) -> Vec<u64> {
        (0..=self.n).collect()
    }
}

impl Crystal for Sl2String<'_> {
    type Elt = u64;

    fn datum(&self) -> &RootDatum {
        self.datum
    }

    fn wt(&self, k: &u64) -> Vec<i64> {
        let mut w = self.top.clone();
        w[self.index] -= *k as i64;
        w
    }

    fn e(&self, k: &u64, i: usize) -> Option<u64> {
        if i == self.index {
            k.checked_sub(1)
        } else {
            None
        }
    }

    fn f(&self, k: &u64, i: usize) -> Option<u64> {
        (i == self.index && *k < self.n).then_some(k + 1)
    }

    fn phi(&self, k: &u64, i: usize) -> Ext {
        if i == self.index {
            Ext::Fin((self.n - k) as i64)
        } else {
            Ext::NegInf
        }
    }
}

/// Tensor product `x ⊗ y`.
///
/// `f_i` acts on `x` iff `ε_i(x) ≥ φ_i(y)`, `e_i` acts on `x` iff
/// `ε_i(x) > φ_i(y)`; `φ_i(x⊗y) = max(φ_i(x), φ_i(y) + ⟨wt(x), α̌_i⟩)`.
/// This orientation makes `b ↦ b′ ⊗ b_i(n)` a morphism `B(∞) → B(∞) ⊗ B_i`.
#[derive(Clone, Debug)]
pub struct Tensor<A, B> {
    pub left: A,
    pub right: B,
}

impl<A: Crystal, B: Crystal> Tensor<A, B> {
    pub fn new(left: A, right: B) -> Result<Self> {
        if left.datum() != right.datum() {
            return Err(Error::Shape("tensor factors live over different root data".into()));
        }
        Ok(Tensor { left, right })
    }

    fn acts_left_f(&self, b: &(A::Elt, B::Elt), i: usize) -> bool {
        self.left.eps(&b.0, i) >= self.right.phi(&b.1, i)
    }

    fn acts_left_e(&self, b: &(A::Elt, B::Elt), i: usize) -> bool {
        self.left.eps(&b.0, i) > self.right.phi(&b.1, i)
    }
}

impl<A: Crystal, B: Crystal> Crystal for Tensor<A, B> {
    type Elt = (A::Elt, B::Elt);

    fn datum(&self) -> &RootDatum {
        self.left.datum()
    }

    fn wt(&self, b: &Self::Elt) -> Vec<i64> {
        let mut w = self.left.wt(&b.0);
        for (x, y) in w.iter_mut().zip(self.right.wt(&b.1)) {
            *x += y;
        }
        w
    }

    fn e(&self, b: &Self::Elt, i: usize) -> Option<Self::Elt> {
        if self.acts_left_e(b, i) {
            self.left.e(&b.0, i).map(|x| (x, b.1.clone()))
        } else {
            self.right.e(&b.1, i).map(|y| (b.0.clone(), y))
        }
    }

    fn f(&self, b: &Self::Elt, i: usize) -> Option<Self::Elt> {
        if self.acts_left_f(b, i) {
            self.left.f(&b.0, i).map(|x| (x, b.1.clone()))
        } else {
            self.right.f(&b.1, i).map(|y| (b.0.clone(), y))
        }
    }

    fn phi(&self, b: &Self::Elt, i: usize) -> Ext {
        let shift = self.datum().pair(&self.left.wt(&b.0), i);
        self.left.phi(&b.0, i).max(self.right.phi(&b.1, i).add(shift))
    }

    fn eps(&self, b: &Self::Elt, i: usize) -> Ext {
        let shift = self.datum().pair(&self.right.wt(&b.1), i);
        self.right.eps(&b.1, i).max(self.left.eps(&b.0, i).add(-shift))
    }
}

/// Levi restriction: keep the operations for `i ∈ m`, kill the rest with
/// `ε_j = φ_j = −∞`.
#[derive(Clone, Debug)]
pub struct LeviRestriction<C> {
    inner: C,
    keep: Vec<bool>,
}

impl<C: Crystal> LeviRestriction<C> {
    pub fn new(inner: C, m: &[usize]) -> Self {
        let mut keep = vec![false; inner.rank()];
        for &i in m {
            keep[i] = true;
        }
        LeviRestriction { inner, keep }
    }
}

impl<C: Crystal> Crystal for LeviRestriction<C> {
    type Elt = C::Elt;

    fn datum(&self) -> &RootDatum {
        self.inner.datum()
    }

    fn wt(&self, b: &C::Elt) -> Vec<i64> {
        self.inner.wt(b)
    }

    fn e(&self, b: &C::Elt, i: usize) -> Option<C::Elt> {
        if self.keep[i] {
            self.inner.e(b, i)
        } else {
            None
        }
    }

    fn f(&self, b: &C::Elt, i: usize) -> Option<C::Elt> {
        if self.keep[i] {
            self.inner.f(b, i)
        } else {
            None
        }
    }

    fn phi(&self, b: &C::Elt, i: usize) -> Ext {
        if self.keep[i] {
            self.inner.phi(b, i)
        } else {
            Ext::NegInf
        }
    }

    fn eps(&self, b: &C::Elt, i: usize) -> Ext {
        if self.keep[i] {
            self.inner.eps(b, i)
        } else {
            Ext::NegInf
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// `φ_i(b)` differs from the length of the `f_i`-string below `b`.
    PhiNotNormal { phi: Ext, string_length: i64 },
    /// `ε_i(b) ≠ φ_i(b) − ⟨wt(b), α̌_i⟩`.
    EpsMismatch { eps: Ext, expected: Ext },
    /// `f_i(b) = b′` but `e_i(b′) ≠ b`, or the reverse.
    NotInverse,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub sample_index: usize,
    pub i: usize,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NormalityReport {
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl NormalityReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks φ-normality, the `ε`/`φ` relation and the partial-inverse property
/// on every sample element. `max_string` caps the `f_i`-string walk.
pub fn check_normality<C: Crystal>(c: &C, sample: &[C::Elt], max_string: i64) -> NormalityReport {
    let mut report = NormalityReport { checked: sample.len(), violations: Vec::new() };
    for (idx, b) in sample.iter().enumerate() {
        let w = c.wt(b);
        let pairing: Vec<i64> = (0..c.rank()).map(|i| c.datum().pair(&w, i)).collect();
        for i in 0..c.rank() {
            let phi = c.phi(b, i);
            let mut len = 0;
            let mut cur = c.f(b, i);
            while let Some(next) = cur {
                len += 1;
                if len > max_string {
                    break;
                }
                cur = c.f(&next, i);
            }
            let normal = match phi {
                Ext::Fin(p) => p == len,
                Ext::NegInf => len == 0,
            };
            if !normal {
                report.violations.push(Violation {
                    sample_index: idx,
                    i,
                    kind: ViolationKind::PhiNotNormal { phi, string_length: len },
                });
            }
            let expected = phi.add(-pairing[i]);
            let eps = c.eps(b, i);
            if eps != expected {
                report.violations.push(Violation {
                    sample_index: idx,
                    i,
                    kind: ViolationKind::EpsMismatch { eps, expected },
                });
            }
            let down_ok = c.f(b, i).is_none_or(|d| c.e(&d, i).as_ref() == Some(b));
            let up_ok = c.e(b, i).is_none_or(|u| c.f(&u, i).as_ref() == Some(b));
            if !(down_ok && up_ok) {
                report.violations.push(Violation { sample_index: idx, i, kind: ViolationKind::NotInverse });
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a2() -> RootDatum {
        RootDatum::build_finite('A', 2).unwrap()
    }

    #[test]
    fn elementary_values() {
        let d = a2();
        let b = Elementary::new(&d, 0);
        assert_eq!(b.phi(&3, 0), Ext::Fin(3));
        assert_eq!(b.eps(&3, 0), Ext::Fin(-3));
        assert_eq!(b.f(&0, 0), None);
        assert_eq!(b.f(&3, 0), Some(2));
        assert_eq!(b.e(&3, 0), Some(4));
        assert_eq!(b.wt(&3), vec![3, 0]);
        assert_eq!(b.phi(&3, 1), Ext::NegInf);
        assert_eq!(b.eps(&3, 1), Ext::NegInf);
        assert_eq!(b.f(&3, 1), None);
        assert_eq!(b.e(&3, 1), None);
    }

    #[test]
    fn elementary_and_string_are_normal() {
        let d = a2();
        let b = Elementary::new(&d, 1);
        let sample: Vec<u64> = (0..=5).collect();
        assert!(check_normality(&b, &sample, 100).is_clean());
        let s = Sl2String::new(&d, 0, 2, vec![1, 0]).unwrap();
        assert!(check_normality(&s, &s.elements(), 100).is_clean());
        assert!(Sl2String::new(&d, 0, 2, vec![1, 1]).is_err());
    }

    struct Corrupted<'a>(Elementary<'a>);

    impl Crystal for Corrupted<'_> {
        type Elt = u64;
        fn datum(&self) -> &RootDatum {
            self.0.datum()
        }
        fn wt(&self, b: &u64) -> Vec<i64> {
            self.0.wt(b)
        }
        fn e(&self, b: &u64, i: usize) -> Option<u64> {
            self.0.e(b, i)
        }
        fn f(&self, b: &u64, i: usize) -> Option<u64> {
            self.0.f(b, i)
        }
        fn phi(&self, b: &u64, i: usize) -> Ext {
            if *b == 3 && i == 0 {
                Ext::Fin(7)
            } else {
                self.0.phi(b, i)
            }
        }
    }

    #[test]
    fn corrupted_phi_is_located() {
        let d = a2();
        let c = Corrupted(Elementary::new(&d, 0));
        let sample: Vec<u64> = (0..=5).collect();
        let r = check_normality(&c, &sample, 100);
        assert!(!r.is_clean());
        assert!(r.violations.iter().all(|v| v.sample_index == 3 && v.i == 0));
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v.kind, ViolationKind::PhiNotNormal { string_length: 3, .. })));
    }

    #[test]
    fn tensor_routing() {
        let d = a2();
        let t = Tensor::new(Elementary::new(&d, 0), Elementary::new(&d, 0)).unwrap();
        assert_eq!(t.wt(&(2, 3)), vec![5, 0]);
        // ε(b(1)) = −1 < φ(b(0)) = 0: f acts on the right factor, which is killed
        assert_eq!(t.f(&(1, 0), 0), None);
        assert_eq!(t.f(&(0, 1), 0), Some((0, 0)));
        assert_eq!(t.e(&(0, 0), 0), Some((0, 1)));
        // −∞ on the left sends f to the right factor
        let t2 = Tensor::new(Elementary::new(&d, 1), Elementary::new(&d, 0)).unwrap();
        assert_eq!(t2.phi(&(4, 0), 0), Ext::Fin(-4));
        assert_eq!(t2.f(&(4, 2), 0), Some((4, 1)));
    }

    #[test]
    fn tensor_of_strings_is_normal() {
        let d = a2();
        let s = Sl2String::new(&d, 0, 2, vec![1, 0]).unwrap();
        let t = Tensor::new(s.clone(), s.clone()).unwrap();
        let sample: Vec<(u64, u64)> = s.elements().into_iter().flat_map(|x| (0..=2).map(move |y| (x, y))).collect();
        let r = check_normality(&t, &sample, 100);
        assert!(r.is_clean(), "{r:?}");
    }

    #[test]
    fn tensor_with_b_i_is_normal_on_psi_image() {
        // elements b_i(0) ⊗ b_i(n) are what Ψ_i produces in rank one
        let d = RootDatum::build_finite('A', 1).unwrap();
        let t = Tensor::new(Elementary::new(&d, 0), Elementary::new(&d, 0)).unwrap();
        for n in 0..6u64 {
            assert_eq!(t.phi(&(0, n), 0), Ext::Fin(n as i64));
            assert_eq!(t.f(&(0, n), 0), n.checked_sub(1).map(|m| (0, m)));
        }
        // off the image the product is not normal
        assert_eq!(t.phi(&(1, 0), 0), Ext::Fin(2));
        assert_eq!(t.f(&(1, 0), 0), None);
    }

    #[test]
    fn levi_restriction_is_normal() {
        let d = a2();
        let s = Sl2String::new(&d, 0, 3, vec![2, 1]).unwrap();
        let t = Tensor::new(s.clone(), s.clone()).unwrap();
        let r = LeviRestriction::new(t, &[0]);
        let sample: Vec<(u64, u64)> = s.elements().into_iter().flat_map(|x| (0..=3).map(move |y| (x, y))).collect();
        let rep = check_normality(&r, &sample, 100);
        assert!(rep.is_clean(), "{rep:?}");
        assert_eq!(r.phi(&(1, 1), 1), Ext::NegInf);
        assert_eq!(r.f(&(1, 1), 1), None);
    }

    #[derive(Clone, Copy, Debug)]
    enum Factor {
        Elem(usize),
        Str(usize, u64),
    }

    fn string_top(d: &RootDatum, i: usize, n: u64) -> Vec<i64> {
        // in A2: ⟨n·α_i + n·α_j, α̌_i⟩ = 2n − n = n
        let mut top = vec![n as i64; d.rank()];
        top[i] = n as i64;
        top
    }

    struct Any<'a> {
        d: &'a RootDatum,
        f: Factor,
    }

    impl Crystal for Any<'_> {
        type Elt = u64;
        fn datum(&self) -> &RootDatum {
            self.d
        }
        fn wt(&self, b: &u64) -> Vec<i64> {
            match self.f {
                Factor::Elem(i) => Elementary::new(self.d, i).wt(b),
                Factor::Str(i, n) => Sl2String::new(self.d, i, n, string_top(self.d, i, n)).unwrap().wt(b),
            }
        }
        fn e(&self, b: &u64, i: usize) -> Option<u64> {
            match self.f {
                Factor::Elem(k) => Elementary::new(self.d, k).e(b, i),
                Factor::Str(k, n) => Sl2String::new(self.d, k, n, string_top(self.d, k, n)).unwrap().e(b, i),
            }
        }
        fn f(&self, b: &u64, i: usize) -> Option<u64> {
            match self.f {
                Factor::Elem(k) => Elementary::new(self.d, k).f(b, i),
                Factor::Str(k, n) => Sl2String::new(self.d, k, n, string_top(self.d, k, n)).unwrap().f(b, i),
            }
        }
        fn phi(&self, b: &u64, i: usize) -> Ext {
            match self.f {
                Factor::Elem(k) => Elementary::new(self.d, k).phi(b, i),
                Factor::Str(k, n) => Sl2String::new(self.d, k, n, string_top(self.d, k, n)).unwrap().phi(b, i),
            }
        }
        fn eps(&self, b: &u64, i: usize) -> Ext {
            match self.f {
                Factor::Elem(k) => Elementary::new(self.d, k).eps(b, i),
                Factor::Str(k, n) => Sl2String::new(self.d, k, n, string_top(self.d, k, n)).unwrap().eps(b, i),
            }
        }
    }

    fn factor() -> impl Strategy<Value = (Factor, u64)> {
        prop_oneof![
            (0usize..2, 0u64..5).prop_map(|(i, b)| (Factor::Elem(i), b)),
            (0usize..2, 1u64..4, 0u64..4).prop_map(|(i, n, k)| (Factor::Str(i, n), k.min(n))),
        ]
    }

    proptest! {
        #[test]
        fn tensor_is_associative((f1, x) in factor(), (f2, y) in factor(), (f3, z) in factor()) {
            let d = a2();
            let mk = |f| Any { d: &d, f };
            let left = Tensor::new(Tensor::new(mk(f1), mk(f2)).unwrap(), mk(f3)).unwrap();
            let right = Tensor::new(mk(f1), Tensor::new(mk(f2), mk(f3)).unwrap()).unwrap();
            let bl = ((x, y), z);
            let br = (x, (y, z));
            let flat_l = |p: Option<((u64, u64), u64)>| p.map(|((a, b), c)| (a, b, c));
            let flat_r = |p: Option<(u64, (u64, u64))>| p.map(|(a, (b, c))| (a, b, c));
            prop_assert_eq!(left.wt(&bl), right.wt(&br));
            for i in 0..2 {
                prop_assert_eq!(left.phi(&bl, i), right.phi(&br, i));
                prop_assert_eq!(left.eps(&bl, i), right.eps(&br, i));
                prop_assert_eq!(flat_l(left.e(&bl, i)), flat_r(right.e(&br, i)));
                prop_assert_eq!(flat_l(left.f(&bl, i)), flat_r(right.f(&br, i)));
            }
        }
    }
}
