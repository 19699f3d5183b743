//! Complex-weighted formal sums of parallel diagrams. Sums are kept in a
//! merged normal form: structurally equal diagrams share one term and terms
//! with coefficient zero are dropped, so the empty sum is the zero morphism.

use super::{Diagram, DiagramError, Ty};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub diagram: Diagram,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormalSum {
    pub dom: Ty,
    pub cod: Ty,
    terms: Vec<Term>,
}

impl FormalSum {
    /// The zero morphism of the given boundary.
    pub fn zero(dom: Ty, cod: Ty) -> Self {
        FormalSum {
            dom,
            cod,
            terms: Vec::new(),
        }
    }

    /// A single diagram with coefficient one.
    pub fn from_diagram(d: Diagram) -> Self {
        FormalSum::from_terms(
            d.dom().clone(),
            d.cod().clone(),
            vec![Term {
                coeff: Complex64::new(1.0, 0.0),
                diagram: d,
            }],
        )
        .expect("term boundary matches its own diagram")
    }

    pub fn from_terms(dom: Ty, cod: Ty, terms: Vec<Term>) -> Result<Self, DiagramError> {
        for t in &terms {
            if t.diagram.dom() != &dom || t.diagram.cod() != &cod {
                return Err(DiagramError::NotParallel {
                    lhs: format!("{} → {}", t.diagram.dom(), t.diagram.cod()),
                    rhs: format!("{dom} → {cod}"),
                });
            }
        }
        let mut s = FormalSum {
            dom,
            cod,
            terms: Vec::new(),
        };
        for t in terms {
            s.push(t.coeff, t.diagram);
        }
        Ok(s)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add one weighted diagram, merging with a structurally equal term if
    /// present and dropping the term if the coefficient cancels to zero.
    pub(crate) fn push(&mut self, coeff: Complex64, diagram: Diagram) {
        if coeff == Complex64::new(0.0, 0.0) {
            return;
        }
        if let Some(t) = self.terms.iter_mut().find(|t| t.diagram == diagram) {
            t.coeff += coeff;
            if t.coeff == Complex64::new(0.0, 0.0) {
                self.terms.retain(|t| t.coeff != Complex64::new(0.0, 0.0));
            }
            return;
        }
        self.terms.push(Term { coeff, diagram });
    }

    /// Sum of two parallel sums.
    pub fn add(&self, rhs: &FormalSum) -> Result<FormalSum, DiagramError> {
        if self.dom != rhs.dom || self.cod != rhs.cod {
            return Err(DiagramError::NotParallel {
                lhs: format!("{} → {}", self.dom, self.cod),
                rhs: format!("{} → {}", rhs.dom, rhs.cod),
            });
        }
        let mut out = self.clone();
        for t in &rhs.terms {
            out.push(t.coeff, t.diagram.clone());
        }
        Ok(out)
    }

    /// Multiply every coefficient by a scalar.
    pub fn scale(&self, c: Complex64) -> FormalSum {
        let mut out = FormalSum::zero(self.dom.clone(), self.cod.clone());
        for t in &self.terms {
            out.push(c * t.coeff, t.diagram.clone());
        }
        out
    }

    /// Sequential composition, expanded distributively over terms.
    pub fn compose(&self, rhs: &FormalSum) -> Result<FormalSum, DiagramError> {
        if self.cod != rhs.dom {
            return Err(DiagramError::NotComposable {
                lhs: self.cod.to_string(),
                rhs: rhs.dom.to_string(),
            });
        }
        let mut out = FormalSum::zero(self.dom.clone(), rhs.cod.clone());
        for a in &self.terms {
            for b in &rhs.terms {
                out.push(a.coeff * b.coeff, a.diagram.compose(&b.diagram)?);
            }
        }
        Ok(out)
    }

    /// Side-by-side composition, expanded distributively over terms.
    pub fn tensor(&self, rhs: &FormalSum) -> FormalSum {
        let mut out = FormalSum::zero(self.dom.tensor(&rhs.dom), self.cod.tensor(&rhs.cod));
        for a in &self.terms {
            for b in &rhs.terms {
                out.push(a.coeff * b.coeff, a.diagram.tensor(&b.diagram));
            }
        }
        out
    }

    pub fn max_param(&self) -> Option<usize> {
        self.terms.iter().filter_map(|t| t.diagram.max_param()).max()
    }

    pub fn is_cq(&self) -> bool {
        self.terms.iter().any(|t| t.diagram.is_cq())
    }
}
