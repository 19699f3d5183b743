//! Affine expressions over a parameter vector: `c0 + Σ ci·θi`. Used for
//! spider phases and for parametrised matrix entries.

use super::RigError;
use std::collections::BTreeMap;

/// An affine expression in the parameters `θ0, θ1, …`. Zero coefficients are
/// dropped on construction so that structural equality compares normal forms
/// exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseExpr {
    pub constant: f64,
    pub coeffs: BTreeMap<usize, f64>,
}

impl PhaseExpr {
    /// A constant expression with no parameter dependence.
    pub fn constant(c: f64) -> Self {
        PhaseExpr {
            constant: c,
            coeffs: BTreeMap::new(),
        }
    }

    /// The bare parameter `θi`.
    pub fn theta(i: usize) -> Self {
        PhaseExpr::constant(0.0).plus_theta(i, 1.0)
    }

    /// Add `c·θi` to the expression.
    pub fn plus_theta(mut self, i: usize, c: f64) -> Self {
        let v = self.coeffs.entry(i).or_insert(0.0);
        *v += c;
        if *v == 0.0 {
            self.coeffs.remove(&i);
        }
        self
    }

    /// Evaluate at a concrete parameter vector.
    pub fn eval(&self, theta: &[f64]) -> Result<f64, RigError> {
        let mut acc = self.constant;
        for (&i, &c) in &self.coeffs {
            if i >= theta.len() {
                return Err(RigError::ParamOutOfRange {
                    index: i,
                    len: theta.len(),
                });
            }
            acc += c * theta[i];
        }
        Ok(acc)
    }

    /// Coefficient of `θi`; zero when the expression does not mention it.
    pub fn partial(&self, i: usize) -> f64 {
        self.coeffs.get(&i).copied().unwrap_or(0.0)
    }

    /// Sum of two expressions (used by spider fusion).
    pub fn plus(&self, rhs: &PhaseExpr) -> PhaseExpr {
        let mut out = self.clone();
        out.constant += rhs.constant;
        for (&i, &c) in &rhs.coeffs {
            out = out.plus_theta(i, c);
        }
        out
    }

    /// Shift the constant term (used by derivative and shift rules).
    pub fn shifted(&self, by: f64) -> PhaseExpr {
        let mut out = self.clone();
        out.constant += by;
        out
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest parameter index mentioned, if any.
    pub fn max_param(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn eval_affine() {
        let e = PhaseExpr::constant(PI).plus_theta(0, 2.0);
        assert_eq!(e.eval(&[1.0]).unwrap(), PI + 2.0);
    }

    #[test]
    fn eval_constant_ignores_theta() {
        assert_eq!(PhaseExpr::constant(1.25).eval(&[]).unwrap(), 1.25);
    }

    #[test]
    fn eval_two_params() {
        let e = PhaseExpr::theta(0).plus_theta(1, 1.0);
        assert_eq!(e.eval(&[0.5, 0.25]).unwrap(), 0.75);
    }

    #[test]
    fn eval_out_of_range_errors() {
        let e = PhaseExpr::theta(5);
        assert_eq!(
            e.eval(&[0.0, 0.0]),
            Err(RigError::ParamOutOfRange { index: 5, len: 2 })
        );
    }

    #[test]
    fn partials_read_coefficients() {
        let e = PhaseExpr::constant(PI).plus_theta(0, 2.0);
        assert_eq!(e.partial(0), 2.0);
        assert_eq!(e.partial(1), 0.0);
        assert_eq!(PhaseExpr::constant(3.0).partial(0), 0.0);
    }

    #[test]
    fn zero_coefficients_are_normalised_away() {
        let e = PhaseExpr::theta(0).plus_theta(0, -1.0);
        assert_eq!(e, PhaseExpr::constant(0.0));
        assert!(e.is_constant());
    }

    #[test]
    fn plus_and_shift() {
        let a = PhaseExpr::theta(0);
        let b = PhaseExpr::theta(1).shifted(1.0);
        let s = a.plus(&b);
        assert_eq!(s.eval(&[2.0, 3.0]).unwrap(), 6.0);
        assert_eq!(s.max_param(), Some(1));
    }
}
