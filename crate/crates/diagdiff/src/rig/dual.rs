//! Dual numbers over an arbitrary rig: pairs `a + a' ε` with `ε² = 0`.

use super::{Conjugate, Rig, RingNeg};
use num_complex::Complex64;

/// A dual number `re + eps·ε` over the rig `S`. The first component carries
/// the value, the second the tangent; `ε` squares to zero, so multiplication
/// follows the product rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual<S> {
    pub re: S,
    pub eps: S,
}

impl<S: Rig> Dual<S> {
    pub fn new(re: S, eps: S) -> Self {
        Dual { re, eps }
    }

    /// Embed a rig element with zero tangent.
    pub fn constant(re: S) -> Self {
        Dual {
            re,
            eps: S::zero(),
        }
    }

    /// Projection onto the value component.
    pub fn value(&self) -> &S {
        &self.re
    }

    /// Projection onto the tangent component.
    pub fn tangent(&self) -> &S {
        &self.eps
    }
}

impl<S: Rig> Rig for Dual<S> {
    fn zero() -> Self {
        Dual::constant(S::zero())
    }
    fn one() -> Self {
        Dual::constant(S::one())
    }
    // (a + a'ε) + (b + b'ε) = (a + b) + (a' + b')ε
    fn add(&self, rhs: &Self) -> Self {
        Dual {
            re: self.re.add(&rhs.re),
            eps: self.eps.add(&rhs.eps),
        }
    }
    // (a + a'ε)(b + b'ε) = ab + (ab' + a'b)ε since ε² = 0
    fn mul(&self, rhs: &Self) -> Self {
        Dual {
            re: self.re.mul(&rhs.re),
            eps: self.re.mul(&rhs.eps).add(&self.eps.mul(&rhs.re)),
        }
    }
}

impl<S: RingNeg> RingNeg for Dual<S> {
    fn neg(&self) -> Self {
        Dual {
            re: self.re.neg(),
            eps: self.eps.neg(),
        }
    }
}

impl<S: Conjugate> Conjugate for Dual<S> {
    // ε is an infinitesimal of a real parameter, so conjugation acts
    // componentwise.
    fn conjugate(&self) -> Self {
        Dual {
            re: self.re.conjugate(),
            eps: self.eps.conjugate(),
        }
    }
}

/// Lift a smooth function to dual-complex numbers:
/// `f(a + a'ε) = f(a) + a'·f'(a)·ε`.
pub fn lift_smooth(
    f: impl Fn(Complex64) -> Complex64,
    df: impl Fn(Complex64) -> Complex64,
    x: Dual<Complex64>,
) -> Dual<Complex64> {
    Dual {
        re: f(x.re),
        eps: x.eps * df(x.re),
    }
}

#[cfg(test)]
mod tests {
    use super::super::F2;
    use super::*;

    fn d(re: f64, eps: f64) -> Dual<Complex64> {
        Dual::new(Complex64::new(re, 0.0), Complex64::new(eps, 0.0))
    }

    #[test]
    fn add_is_componentwise() {
        assert_eq!(d(1.0, 2.0).add(&d(3.0, 4.0)), d(4.0, 6.0));
    }

    #[test]
    fn mul_follows_product_rule() {
        // (2 + 3ε)(5 + 7ε) = 10 + 29ε
        assert_eq!(d(2.0, 3.0).mul(&d(5.0, 7.0)), d(10.0, 29.0));
    }

    #[test]
    fn epsilon_squares_to_zero() {
        let e = d(0.0, 1.0);
        assert_eq!(e.mul(&e), Dual::zero());
    }

    #[test]
    fn units() {
        let x = d(2.5, -1.5);
        assert_eq!(x.add(&Dual::zero()), x);
        assert_eq!(x.mul(&Dual::one()), x);
    }

    #[test]
    fn lift_identity_and_constant() {
        let x = d(1.5, 2.0);
        assert_eq!(lift_smooth(|a| a, |_| Complex64::new(1.0, 0.0), x), x);
        let c = Complex64::new(7.0, 0.0);
        assert_eq!(
            lift_smooth(|_| c, |_| Complex64::new(0.0, 0.0), x),
            Dual::constant(c)
        );
    }

    #[test]
    fn lift_sin_at_seeded_zero() {
        // sin(0 + ε) = 0 + cos(0)·ε = ε
        let out = lift_smooth(|a| a.sin(), |a| a.cos(), d(0.0, 1.0));
        assert_eq!(out, d(0.0, 1.0));
    }

    #[test]
    fn product_rule_holds_over_f2_exhaustively() {
        let els = [F2(false), F2(true)];
        for &a in &els {
            for &da in &els {
                for &b in &els {
                    for &db in &els {
                        let x = Dual::new(a, da);
                        let y = Dual::new(b, db);
                        let prod = x.mul(&y);
                        assert_eq!(prod.re, a.mul(&b));
                        assert_eq!(prod.eps, a.mul(&db).add(&da.mul(&b)));
                    }
                }
            }
        }
    }
}
