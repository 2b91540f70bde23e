//! Exact computations around Kac–Moody root data: positive roots and
//! Kostant partitions, a string-coordinate model of `B(∞)` with its star
//! structure, parabolic restrictions, graded characters of Uhlenbeck IC
//! stalks, and rational ADHM linear algebra.

pub mod adhm;
pub mod binf;
pub mod crystal;
pub mod error;
pub mod exec;
pub mod ic_stalks;
pub mod parabolic;
pub mod root_datum;

pub use binf::{BInfinity, CrystalElt, CrystalGraph, Word};
pub use crystal::{Crystal, Ext};
pub use error::{Error, Result};
pub use exec::Execution;
pub use root_datum::{CartanMatrix, DatumSpec, RootDatum, RootMultiset, WeightVec};
