//! Boolean functions as explicit truth tables, under two rig structures on
//! the same carrier: F2 (XOR/AND) and the Boolean rig (OR/AND). Each comes
//! with its own discrete partial derivative.

use super::RigError;

/// Which rig structure a truth table is considered an element of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscreteRig {
    /// Addition is XOR.
    F2,
    /// Addition is OR.
    Boolean,
}

/// A function `{0,1}^arity → {0,1}^coarity` tabulated row by row. Row index
/// `r` encodes the inputs with `x_i = (r >> i) & 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTableFn {
    pub arity: usize,
    pub coarity: usize,
    pub rig: DiscreteRig,
    rows: Vec<Vec<bool>>,
}

impl TruthTableFn {
    pub fn new(
        arity: usize,
        coarity: usize,
        rig: DiscreteRig,
        rows: Vec<Vec<bool>>,
    ) -> Result<Self, RigError> {
        if rows.len() != 1 << arity || rows.iter().any(|r| r.len() != coarity) {
            return Err(RigError::Mismatch(format!(
                "table shape {}x{} does not match arity {arity} / coarity {coarity}",
                rows.len(),
                rows.first().map_or(0, Vec::len),
            )));
        }
        Ok(TruthTableFn {
            arity,
            coarity,
            rig,
            rows,
        })
    }

    /// Tabulate a closure over all input rows.
    pub fn from_fn(
        arity: usize,
        coarity: usize,
        rig: DiscreteRig,
        f: impl Fn(usize) -> Vec<bool>,
    ) -> Self {
        let rows = (0..1usize << arity).map(f).collect::<Vec<_>>();
        TruthTableFn::new(arity, coarity, rig, rows).expect("closure produced wrong row width")
    }

    /// Single-output table whose row `r` outputs bit `r` of `bits`.
    /// Convenient for exhaustive enumeration of small functions.
    pub fn from_output_bits(arity: usize, rig: DiscreteRig, bits: u64) -> Self {
        TruthTableFn::from_fn(arity, 1, rig, |r| vec![(bits >> r) & 1 == 1])
    }

    pub fn row(&self, r: usize) -> &[bool] {
        &self.rows[r]
    }

    /// The same table viewed in the other rig.
    pub fn retagged(&self, rig: DiscreteRig) -> Self {
        TruthTableFn { rig, ..self.clone() }
    }

    fn check_compatible(&self, rhs: &Self) -> Result<(), RigError> {
        if self.rig != rhs.rig {
            return Err(RigError::Mismatch(format!(
                "cannot combine a {:?} table with a {:?} table",
                self.rig, rhs.rig
            )));
        }
        if self.arity != rhs.arity || self.coarity != rhs.coarity {
            return Err(RigError::Mismatch(format!(
                "table shapes differ: {}→{} vs {}→{}",
                self.arity, self.coarity, rhs.arity, rhs.coarity
            )));
        }
        Ok(())
    }

    fn zip(&self, rhs: &Self, f: impl Fn(bool, bool) -> bool) -> Self {
        TruthTableFn {
            arity: self.arity,
            coarity: self.coarity,
            rig: self.rig,
            rows: self
                .rows
                .iter()
                .zip(&rhs.rows)
                .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
                .collect(),
        }
    }

    /// Rig addition: XOR under F2, OR under Boolean.
    pub fn add(&self, rhs: &Self) -> Result<Self, RigError> {
        self.check_compatible(rhs)?;
        Ok(match self.rig {
            DiscreteRig::F2 => self.zip(rhs, |a, b| a ^ b),
            DiscreteRig::Boolean => self.zip(rhs, |a, b| a | b),
        })
    }

    /// Rig multiplication: AND in both rigs.
    pub fn mul(&self, rhs: &Self) -> Result<Self, RigError> {
        self.check_compatible(rhs)?;
        Ok(self.zip(rhs, |a, b| a & b))
    }

    /// Pointwise complement. Not a rig operation; used by the closed-form
    /// Boolean derivative.
    pub fn not(&self) -> Self {
        TruthTableFn {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|&b| !b).collect())
                .collect(),
            ..self.clone()
        }
    }

    fn check_var(&self, i: usize) -> Result<(), RigError> {
        if i >= self.arity {
            return Err(RigError::VarOutOfRange {
                index: i,
                arity: self.arity,
            });
        }
        Ok(())
    }

    /// Substitute the constant `v` for input `x_i`, keeping the arity.
    pub fn restrict(&self, i: usize, v: bool) -> Result<Self, RigError> {
        self.check_var(i)?;
        let mask = 1usize << i;
        Ok(TruthTableFn {
            rows: (0..self.rows.len())
                .map(|r| self.rows[if v { r | mask } else { r & !mask }].clone())
                .collect(),
            ..self.clone()
        })
    }

    /// Substitute `¬x_i` for input `x_i`.
    pub fn flip_input(&self, i: usize) -> Result<Self, RigError> {
        self.check_var(i)?;
        let mask = 1usize << i;
        Ok(TruthTableFn {
            rows: (0..self.rows.len())
                .map(|r| self.rows[r ^ mask].clone())
                .collect(),
            ..self.clone()
        })
    }

    /// Whether the function ignores input `x_i`.
    pub fn independent_of(&self, i: usize) -> bool {
        let mask = 1usize << i;
        (0..self.rows.len()).all(|r| self.rows[r] == self.rows[r | mask])
    }
}

/// F2 partial derivative: `∂i f = f[x_i↦0] ⊕ f[x_i↦1]`.
pub fn f2_partial(f: &TruthTableFn, i: usize) -> Result<TruthTableFn, RigError> {
    if f.rig != DiscreteRig::F2 {
        return Err(RigError::Mismatch(
            "f2_partial expects a table over the F2 rig".into(),
        ));
    }
    f.restrict(i, false)?.add(&f.restrict(i, true)?)
}

/// Closed-form Boolean partial derivative: `∂i φ = ¬φ[x_i↦0] ∧ φ[x_i↦1]`.
/// A row satisfies the derivative exactly when flipping `x_i` from 0 to 1
/// turns the function on.
pub fn bool_partial(f: &TruthTableFn, i: usize) -> Result<TruthTableFn, RigError> {
    if f.rig != DiscreteRig::Boolean {
        return Err(RigError::Mismatch(
            "bool_partial expects a table over the Boolean rig".into(),
        ));
    }
    f.restrict(i, false)?.not().mul(&f.restrict(i, true)?)
}

/// A term over the Boolean rig signature: variables, constants, ∨ and ∧.
/// Negation is not a rig operation, so it does not appear here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoolExpr {
    Var(usize),
    Const(bool),
    Or(Box<BoolExpr>, Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn or(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::And(Box::new(a), Box::new(b))
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        match self {
            BoolExpr::Var(i) => assignment[*i],
            BoolExpr::Const(b) => *b,
            BoolExpr::Or(a, b) => a.eval(assignment) | b.eval(assignment),
            BoolExpr::And(a, b) => a.eval(assignment) & b.eval(assignment),
        }
    }

    /// Tabulate over `arity` inputs as a Boolean-rig table.
    pub fn truth_table(&self, arity: usize) -> TruthTableFn {
        TruthTableFn::from_fn(arity, 1, DiscreteRig::Boolean, |r| {
            let assignment = (0..arity).map(|i| (r >> i) & 1 == 1).collect::<Vec<_>>();
            vec![self.eval(&assignment)]
        })
    }
}

/// Inductive Boolean partial derivative on terms: linear over ∨, product
/// rule over ∧. This is a distinct operation from the closed form and the
/// two genuinely disagree on some terms (e.g. `x0 ∨ x1`).
pub fn bool_partial_inductive(e: &BoolExpr, i: usize) -> BoolExpr {
    match e {
        BoolExpr::Var(j) => BoolExpr::Const(*j == i),
        BoolExpr::Const(_) => BoolExpr::Const(false),
        BoolExpr::Or(a, b) => {
            BoolExpr::or(bool_partial_inductive(a, i), bool_partial_inductive(b, i))
        }
        BoolExpr::And(a, b) => BoolExpr::or(
            BoolExpr::and((**a).clone(), bool_partial_inductive(b, i)),
            BoolExpr::and(bool_partial_inductive(a, i), (**b).clone()),
        ),
    }
}
