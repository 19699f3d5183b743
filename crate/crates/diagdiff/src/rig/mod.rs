//! Commutative rigs and the structures layered on top of them: dual numbers,
//! affine parameter expressions, univariate polynomials and truth-table
//! function rigs with their discrete partial derivatives.

mod dual;
mod phase;
mod poly;
mod truth;

pub use dual::{lift_smooth, Dual};
pub use phase::PhaseExpr;
pub use poly::Poly;
pub use truth::{
    bool_partial, bool_partial_inductive, f2_partial, BoolExpr, DiscreteRig, TruthTableFn,
};

use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by rig-level operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RigError {
    #[error("rig mismatch: {0}")]
    Mismatch(String),
    #[error("parameter index {index} out of range for {len} parameters")]
    ParamOutOfRange { index: usize, len: usize },
    #[error("variable index {index} out of range for arity {arity}")]
    VarOutOfRange { index: usize, arity: usize },
}

/// A commutative rig: a set with associative, commutative `add` and `mul`,
/// units `zero` and `one`, and multiplication distributing over addition.
/// There is no subtraction in general.
pub trait Rig: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }
}

/// Rigs that are also rings: every element has an additive inverse.
pub trait RingNeg: Rig {
    fn neg(&self) -> Self;
}

/// Rigs with an involutive conjugation that fixes sums and products.
pub trait Conjugate: Rig {
    fn conjugate(&self) -> Self;
}

/// Rigs equipped with a derivation: an additive map satisfying the Leibniz
/// rule `d(a*b) = a*d(b) + d(a)*b`.
pub trait DifferentialRig: Rig {
    fn derive(&self) -> Self;
}

impl Rig for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
}

impl RingNeg for Complex64 {
    fn neg(&self) -> Self {
        -self
    }
}

impl Conjugate for Complex64 {
    fn conjugate(&self) -> Self {
        self.conj()
    }
}

/// The two-element field: addition is XOR, multiplication is AND.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct F2(pub bool);

impl Rig for F2 {
    fn zero() -> Self {
        F2(false)
    }
    fn one() -> Self {
        F2(true)
    }
    fn add(&self, rhs: &Self) -> Self {
        F2(self.0 ^ rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        F2(self.0 & rhs.0)
    }
}

impl RingNeg for F2 {
    // Characteristic 2: every element is its own negative.
    fn neg(&self) -> Self {
        *self
    }
}

/// The Boolean rig: addition is OR, multiplication is AND. Not a ring —
/// `true` has no additive inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Boolean(pub bool);

impl Rig for Boolean {
    fn zero() -> Self {
        Boolean(false)
    }
    fn one() -> Self {
        Boolean(true)
    }
    fn add(&self, rhs: &Self) -> Self {
        Boolean(self.0 | rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Boolean(self.0 & rhs.0)
    }
}
