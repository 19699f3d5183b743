//! Univariate polynomials with complex coefficients, carrying the derivation
//! d/dt. The simplest nontrivial differential rig used in tests and as the
//! value rig for labelled green boxes.

use super::{Conjugate, DifferentialRig, Rig, RingNeg};
use num_complex::Complex64;

/// A polynomial in one variable `t`, coefficients stored low degree first.
/// Trailing exact zeros are trimmed so equality compares normal forms.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last() == Some(&Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: Complex64) -> Self {
        Poly::new(vec![c])
    }

    /// The variable `t`.
    pub fn var() -> Self {
        Poly::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Largest absolute difference between coefficients, for approximate
    /// comparisons in the presence of rounding.
    pub fn max_coeff_diff(&self, rhs: &Poly) -> f64 {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).unwrap_or(&zero);
                let b = rhs.coeffs.get(i).unwrap_or(&zero);
                (a - b).norm()
            })
            .fold(0.0, f64::max)
    }
}

impl Rig for Poly {
    fn zero() -> Self {
        Poly::new(vec![])
    }
    fn one() -> Self {
        Poly::constant(Complex64::new(1.0, 0.0))
    }
    fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        Poly::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero)
                })
                .collect(),
        )
    }
    fn mul(&self, rhs: &Self) -> Self {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl RingNeg for Poly {
    fn neg(&self) -> Self {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Conjugate for Poly {
    fn conjugate(&self) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }
}

impl DifferentialRig for Poly {
    fn derive(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, &c)| c * ((k + 1) as f64))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn derive_of_t_is_one() {
        assert_eq!(Poly::var().derive(), Poly::one());
        assert_eq!(Poly::constant(c(3.0, -1.0)).derive(), Poly::zero());
    }

    #[test]
    fn derive_of_square() {
        // d/dt t² = 2t
        let t = Poly::var();
        assert_eq!(t.mul(&t).derive(), Poly::new(vec![c(0.0, 0.0), c(2.0, 0.0)]));
    }

    #[test]
    fn derivation_is_additive_and_leibniz() {
        // Pseudo-random complex coefficients from a fixed recurrence.
        let mut seed = 1.0_f64;
        let mut next = || {
            seed = (seed * 997.0 + 1.0) % 101.0;
            let re = seed / 10.0 - 5.0;
            seed = (seed * 997.0 + 1.0) % 101.0;
            c(re, seed / 10.0 - 5.0)
        };
        for _ in 0..50 {
            let a = Poly::new(vec![next(), next(), next(), next()]);
            let b = Poly::new(vec![next(), next(), next()]);
            let sum_rule = a.add(&b).derive().max_coeff_diff(&a.derive().add(&b.derive()));
            assert!(sum_rule < 1e-12, "additivity off by {sum_rule}");
            let lhs = a.mul(&b).derive();
            let rhs = a.mul(&b.derive()).add(&a.derive().mul(&b));
            let leibniz = lhs.max_coeff_diff(&rhs);
            assert!(leibniz < 1e-12, "Leibniz off by {leibniz}");
        }
    }

    #[test]
    fn dual_pairing_is_multiplicative() {
        // a ↦ (a, ∂a) turns rig products into dual-number products.
        use crate::rig::Dual;
        let a = Poly::new(vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 1.0)]);
        let b = Poly::new(vec![c(2.0, 0.0), c(4.0, -1.0)]);
        let da = Dual::new(a.clone(), a.derive());
        let db = Dual::new(b.clone(), b.derive());
        let prod = da.mul(&db);
        assert!(prod.re.max_coeff_diff(&a.mul(&b)) < 1e-12);
        assert!(prod.eps.max_coeff_diff(&a.mul(&b).derive()) < 1e-12);
    }

    #[test]
    fn eval_horner() {
        let p = Poly::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(p.eval(c(3.0, 0.0)), c(19.0, 0.0));
    }
}
