//! Layered string diagrams: objects, boxes and well-typed diagrams built as
//! ordered layers of boxes applied at wire offsets.

mod bubble;
mod sum;

pub use bubble::{BubbleColour, ColourKind, ColourRegistry, ObMap};
pub use sum::{FormalSum, Term};

use crate::rig::PhaseExpr;
use num_complex::Complex64;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiagramError {
    #[error("layer {layer}: box expects {expected} at offset {offset} but wires are {found}")]
    IllTyped {
        layer: usize,
        offset: usize,
        expected: String,
        found: String,
    },
    #[error("codomain {found} does not match declared codomain {expected}")]
    CodMismatch { expected: String, found: String },
    #[error("cannot compose: codomain {lhs} does not match domain {rhs}")]
    NotComposable { lhs: String, rhs: String },
    #[error("terms are not parallel: {lhs} vs {rhs}")]
    NotParallel { lhs: String, rhs: String },
    #[error("no colour named {0:?} is registered")]
    UnregisteredColour(String),
    #[error("invalid box: {0}")]
    BadBox(String),
}

/// A generating object: one wire of a given flavour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Ob {
    /// A quantum wire of dimension 2.
    Qubit,
    /// A classical bit wire of dimension 2.
    Bit,
    /// A classical wire of arbitrary dimension.
    Dim(usize),
}

impl Ob {
    /// Dimension of the wire under plain tensor interpretation.
    pub fn dim(&self) -> usize {
        match self {
            Ob::Qubit | Ob::Bit => 2,
            Ob::Dim(k) => *k,
        }
    }

    pub fn is_classical(&self) -> bool {
        !matches!(self, Ob::Qubit)
    }
}

impl fmt::Display for Ob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ob::Qubit => write!(f, "q"),
            Ob::Bit => write!(f, "c"),
            Ob::Dim(k) => write!(f, "d{k}"),
        }
    }
}

/// An object of the diagram category: an ordered list of wires.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Ty(pub Vec<Ob>);

impl Ty {
    /// The empty (unit) object.
    pub fn unit() -> Self {
        Ty(Vec::new())
    }

    pub fn qubits(n: usize) -> Self {
        Ty(vec![Ob::Qubit; n])
    }

    pub fn of(obs: &[Ob]) -> Self {
        Ty(obs.to_vec())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Concatenation of wire lists.
    pub fn tensor(&self, rhs: &Ty) -> Ty {
        let mut obs = self.0.clone();
        obs.extend_from_slice(&rhs.0);
        Ty(obs)
    }

    /// Per-wire tensor dimensions.
    pub fn dims(&self) -> Vec<usize> {
        self.0.iter().map(Ob::dim).collect()
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "I");
        }
        for (k, ob) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "⊗")?;
            }
            write!(f, "{ob}")?;
        }
        Ok(())
    }
}

/// Label of an algebraic green box: either a constant of the value rig or
/// the distinguished polynomial variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GreenLabel {
    Const(Complex64),
    Var,
}

impl GreenLabel {
    /// Derivative of the label under the rig derivation d/dt; constants
    /// vanish and the variable has derivative one.
    pub fn derivative(&self) -> Complex64 {
        match self {
            GreenLabel::Const(_) => Complex64::new(0.0, 0.0),
            GreenLabel::Var => Complex64::new(1.0, 0.0),
        }
    }
}

/// The payload of a box: which generator (or composite construct) it is.
#[derive(Debug, Clone, PartialEq)]
pub enum BoxKind {
    /// A spider with `m` inputs and `n` outputs on wires of a single object.
    /// On qubit wires the phase may be any affine expression and the
    /// interpretation is `e^{-iα/2}|0…0⟩⟨0…0| + e^{iα/2}|1…1⟩⟨1…1|`;
    /// on classical wires the phase must be constantly zero and the spider
    /// is the copy/merge family `Σ|i…i⟩⟨i…i|`.
    Spider {
        m: usize,
        n: usize,
        phase: PhaseExpr,
        ob: Ob,
    },
    /// The Hadamard box on one qubit.
    Hadamard,
    /// Exchange two adjacent wires.
    Swap { a: Ob, b: Ob },
    /// Algebraic green box `|0⟩^n⟨0|^m + a·|1⟩^n⟨1|^m` on qubit wires.
    Green {
        m: usize,
        n: usize,
        label: GreenLabel,
    },
    /// A constant complex scalar on no wires.
    Scalar(Complex64),
    /// Measurement of one qubit onto one bit.
    Measure,
    /// Encoding of one bit onto one qubit.
    Encode,
    /// A pure box lifted to the classical-quantum world by doubling.
    Doubled(Box<DiagBox>),
    /// A matrix of affine parameter expressions on classical wires,
    /// entry `(j, i)` at `entries[j * dom_size + i]`.
    AffineMap {
        name: String,
        entries: Vec<PhaseExpr>,
    },
    /// A registered nonlinear function applied around an inner sum.
    Bubble { colour: String, inner: FormalSum },
    /// Jacobian-vector product of a matrix-level colour: the derivative of a
    /// bubble whose colour has no pointwise derivative, evaluated at `point`
    /// along `tangent`.
    BubbleJvp {
        colour: String,
        point: FormalSum,
        tangent: FormalSum,
    },
    /// An opaque named box with no intrinsic interpretation.
    Plain { name: String },
}

/// A box together with its explicit domain and codomain.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagBox {
    pub dom: Ty,
    pub cod: Ty,
    pub kind: BoxKind,
}

impl DiagBox {
    /// Z spider on qubit wires.
    pub fn z_spider(m: usize, n: usize, phase: PhaseExpr) -> Self {
        DiagBox {
            dom: Ty::qubits(m),
            cod: Ty::qubits(n),
            kind: BoxKind::Spider {
                m,
                n,
                phase,
                ob: Ob::Qubit,
            },
        }
    }

    /// Phaseless copy/merge spider on a classical wire.
    pub fn classical_spider(ob: Ob, m: usize, n: usize) -> Result<Self, DiagramError> {
        if !ob.is_classical() {
            return Err(DiagramError::BadBox(
                "classical_spider needs a classical object; use z_spider on qubits".into(),
            ));
        }
        Ok(DiagBox {
            dom: Ty(vec![ob; m]),
            cod: Ty(vec![ob; n]),
            kind: BoxKind::Spider {
                m,
                n,
                phase: PhaseExpr::constant(0.0),
                ob,
            },
        })
    }

    pub fn hadamard() -> Self {
        DiagBox {
            dom: Ty::qubits(1),
            cod: Ty::qubits(1),
            kind: BoxKind::Hadamard,
        }
    }

    pub fn swap(a: Ob, b: Ob) -> Self {
        DiagBox {
            dom: Ty(vec![a, b]),
            cod: Ty(vec![b, a]),
            kind: BoxKind::Swap { a, b },
        }
    }

    pub fn green(m: usize, n: usize, label: GreenLabel) -> Self {
        DiagBox {
            dom: Ty::qubits(m),
            cod: Ty::qubits(n),
            kind: BoxKind::Green { m, n, label },
        }
    }

    pub fn scalar(value: Complex64) -> Self {
        DiagBox {
            dom: Ty::unit(),
            cod: Ty::unit(),
            kind: BoxKind::Scalar(value),
        }
    }

    pub fn measure() -> Self {
        DiagBox {
            dom: Ty(vec![Ob::Qubit]),
            cod: Ty(vec![Ob::Bit]),
            kind: BoxKind::Measure,
        }
    }

    pub fn encode() -> Self {
        DiagBox {
            dom: Ty(vec![Ob::Bit]),
            cod: Ty(vec![Ob::Qubit]),
            kind: BoxKind::Encode,
        }
    }

    /// Lift a pure qubit box to the classical-quantum world.
    pub fn doubled(inner: DiagBox) -> Result<Self, DiagramError> {
        let pure = matches!(
            inner.kind,
            BoxKind::Spider { ob: Ob::Qubit, .. }
                | BoxKind::Hadamard
                | BoxKind::Swap {
                    a: Ob::Qubit,
                    b: Ob::Qubit
                }
                | BoxKind::Green { .. }
                | BoxKind::Scalar(_)
        );
        if !pure {
            return Err(DiagramError::BadBox(format!(
                "only pure qubit boxes can be doubled, got {}",
                inner.name()
            )));
        }
        Ok(DiagBox {
            dom: inner.dom.clone(),
            cod: inner.cod.clone(),
            kind: BoxKind::Doubled(Box::new(inner)),
        })
    }

    /// A matrix of affine parameter expressions between classical types.
    pub fn affine_map(
        name: &str,
        dom: Ty,
        cod: Ty,
        entries: Vec<PhaseExpr>,
    ) -> Result<Self, DiagramError> {
        if dom.0.iter().chain(&cod.0).any(|o| !o.is_classical()) {
            return Err(DiagramError::BadBox(format!(
                "affine map {name:?} must act on classical wires"
            )));
        }
        let want: usize =
            dom.dims().iter().product::<usize>() * cod.dims().iter().product::<usize>();
        if entries.len() != want {
            return Err(DiagramError::BadBox(format!(
                "affine map {name:?} has {} entries but {dom} → {cod} needs {want}",
                entries.len()
            )));
        }
        Ok(DiagBox {
            dom,
            cod,
            kind: BoxKind::AffineMap {
                name: name.to_string(),
                entries,
            },
        })
    }

    pub fn plain(name: &str, dom: Ty, cod: Ty) -> Self {
        DiagBox {
            dom,
            cod,
            kind: BoxKind::Plain {
                name: name.to_string(),
            },
        }
    }

    /// Wrap a sum in a registered bubble colour. The box's boundary comes
    /// from applying the colour's object maps to the inner boundary.
    pub fn bubble(
        colour: &str,
        inner: FormalSum,
        registry: &ColourRegistry,
    ) -> Result<Self, DiagramError> {
        let col = registry
            .get(colour)
            .ok_or_else(|| DiagramError::UnregisteredColour(colour.to_string()))?;
        Ok(DiagBox {
            dom: col.dom_map.apply(&inner.dom),
            cod: col.cod_map.apply(&inner.cod),
            kind: BoxKind::Bubble {
                colour: colour.to_string(),
                inner,
            },
        })
    }

    /// A Jacobian-vector box for a matrix-level colour: interpreted as the
    /// colour's jvp at `point` applied to `tangent`.
    pub fn bubble_jvp(
        colour: &str,
        point: FormalSum,
        tangent: FormalSum,
        registry: &ColourRegistry,
    ) -> Result<Self, DiagramError> {
        let col = registry
            .get(colour)
            .ok_or_else(|| DiagramError::UnregisteredColour(colour.to_string()))?;
        if point.dom != tangent.dom || point.cod != tangent.cod {
            return Err(DiagramError::NotParallel {
                lhs: format!("{} → {}", point.dom, point.cod),
                rhs: format!("{} → {}", tangent.dom, tangent.cod),
            });
        }
        Ok(DiagBox {
            dom: col.dom_map.apply(&point.dom),
            cod: col.cod_map.apply(&point.cod),
            kind: BoxKind::BubbleJvp {
                colour: colour.to_string(),
                point,
                tangent,
            },
        })
    }

    /// Short human-readable name for error messages.
    pub fn name(&self) -> String {
        match &self.kind {
            BoxKind::Spider { m, n, ob, .. } => format!("spider[{ob}]^{{{m},{n}}}"),
            BoxKind::Hadamard => "H".into(),
            BoxKind::Swap { .. } => "swap".into(),
            BoxKind::Green { m, n, .. } => format!("green^{{{m},{n}}}"),
            BoxKind::Scalar(_) => "scalar".into(),
            BoxKind::Measure => "measure".into(),
            BoxKind::Encode => "encode".into(),
            BoxKind::Doubled(inner) => format!("doubled({})", inner.name()),
            BoxKind::AffineMap { name, .. } => name.clone(),
            BoxKind::Bubble { colour, .. } => format!("bubble[{colour}]"),
            BoxKind::BubbleJvp { colour, .. } => format!("bubble-jvp[{colour}]"),
            BoxKind::Plain { name } => name.clone(),
        }
    }

    fn validate(&self) -> Result<(), DiagramError> {
        match &self.kind {
            BoxKind::Spider { m, n, phase, ob } => {
                if self.dom.0 != vec![*ob; *m] || self.cod.0 != vec![*ob; *n] {
                    return Err(DiagramError::BadBox("spider boundary mismatch".into()));
                }
                if ob.is_classical() && !(phase.is_constant() && phase.constant == 0.0) {
                    return Err(DiagramError::BadBox(
                        "classical spiders cannot carry a phase".into(),
                    ));
                }
            }
            BoxKind::Green { m, n, .. } => {
                if self.dom.0 != vec![Ob::Qubit; *m] || self.cod.0 != vec![Ob::Qubit; *n] {
                    return Err(DiagramError::BadBox("green box boundary mismatch".into()));
                }
            }
            BoxKind::Swap { a, b }
                if (self.dom.0 != vec![*a, *b] || self.cod.0 != vec![*b, *a]) => {
                    return Err(DiagramError::BadBox("swap boundary mismatch".into()));
                }
            _ => {}
        }
        Ok(())
    }

    /// Largest parameter index mentioned anywhere in the box.
    pub fn max_param(&self) -> Option<usize> {
        match &self.kind {
            BoxKind::Spider { phase, .. } => phase.max_param(),
            BoxKind::AffineMap { entries, .. } => {
                entries.iter().filter_map(PhaseExpr::max_param).max()
            }
            BoxKind::Doubled(inner) => inner.max_param(),
            BoxKind::Bubble { inner, .. } => inner.max_param(),
            BoxKind::BubbleJvp { point, tangent, .. } => point.max_param().max(tangent.max_param()),
            _ => None,
        }
    }

    /// Whether the box belongs to the classical-quantum world.
    pub fn is_cq(&self) -> bool {
        match &self.kind {
            BoxKind::Measure | BoxKind::Encode | BoxKind::Doubled(_) => true,
            BoxKind::Bubble { inner, .. } => inner.is_cq(),
            BoxKind::BubbleJvp { point, tangent, .. } => point.is_cq() || tangent.is_cq(),
            _ => false,
        }
    }
}

/// One layer: a box applied at a wire offset, with identities elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub offset: usize,
    pub bx: DiagBox,
}

/// A well-typed diagram: a domain, a codomain and an ordered list of layers.
/// Construction checks that every layer's box matches the wires it is
/// applied to.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagram {
    dom: Ty,
    cod: Ty,
    layers: Vec<Layer>,
}

impl Diagram {
    /// The identity diagram on a type.
    pub fn id(ty: Ty) -> Self {
        Diagram {
            dom: ty.clone(),
            cod: ty,
            layers: Vec::new(),
        }
    }

    /// A single box as a diagram.
    pub fn from_box(bx: DiagBox) -> Self {
        Diagram {
            dom: bx.dom.clone(),
            cod: bx.cod.clone(),
            layers: vec![Layer { offset: 0, bx }],
        }
    }

    /// Build from a domain and layers, type-checking as it goes.
    pub fn new(dom: Ty, layers: Vec<Layer>) -> Result<Self, DiagramError> {
        let mut d = Diagram::id(dom);
        for layer in layers {
            d = d.then_at(layer.offset, layer.bx)?;
        }
        Ok(d)
    }

    /// Append a box at the given offset of the current codomain.
    pub fn then_at(mut self, offset: usize, bx: DiagBox) -> Result<Self, DiagramError> {
        bx.validate()?;
        let wires = &self.cod.0;
        let m = bx.dom.len();
        if offset + m > wires.len() || wires[offset..offset + m] != bx.dom.0[..] {
            return Err(DiagramError::IllTyped {
                layer: self.layers.len(),
                offset,
                expected: bx.dom.to_string(),
                found: self.cod.to_string(),
            });
        }
        let mut new_wires = wires[..offset].to_vec();
        new_wires.extend_from_slice(&bx.cod.0);
        new_wires.extend_from_slice(&wires[offset + m..]);
        self.cod = Ty(new_wires);
        self.layers.push(Layer { offset, bx });
        Ok(self)
    }

    pub fn dom(&self) -> &Ty {
        &self.dom
    }

    pub fn cod(&self) -> &Ty {
        &self.cod
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Sequential composition `self ⨾ other`.
    pub fn compose(&self, other: &Diagram) -> Result<Diagram, DiagramError> {
        if self.cod != other.dom {
            return Err(DiagramError::NotComposable {
                lhs: self.cod.to_string(),
                rhs: other.dom.to_string(),
            });
        }
        let mut layers = self.layers.clone();
        layers.extend(other.layers.iter().cloned());
        Ok(Diagram {
            dom: self.dom.clone(),
            cod: other.cod.clone(),
            layers,
        })
    }

    /// Side-by-side composition, self on the left.
    pub fn tensor(&self, other: &Diagram) -> Diagram {
        let mut layers = self.layers.clone();
        let shift = self.cod.len();
        layers.extend(other.layers.iter().map(|l| Layer {
            offset: l.offset + shift,
            bx: l.bx.clone(),
        }));
        Diagram {
            dom: self.dom.tensor(&other.dom),
            cod: self.cod.tensor(&other.cod),
            layers,
        }
    }

    /// Replace the box of layer `k` by a whole diagram with the same
    /// boundary, splicing its layers in place.
    pub fn splice(&self, k: usize, replacement: &Diagram) -> Result<Diagram, DiagramError> {
        let target = &self.layers[k];
        if replacement.dom != target.bx.dom || replacement.cod != target.bx.cod {
            return Err(DiagramError::NotParallel {
                lhs: format!("{} → {}", replacement.dom, replacement.cod),
                rhs: format!("{} → {}", target.bx.dom, target.bx.cod),
            });
        }
        let mut layers = self.layers[..k].to_vec();
        layers.extend(replacement.layers.iter().map(|l| Layer {
            offset: l.offset + target.offset,
            bx: l.bx.clone(),
        }));
        layers.extend_from_slice(&self.layers[k + 1..]);
        Ok(Diagram {
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            layers,
        })
    }

    pub fn max_param(&self) -> Option<usize> {
        self.layers.iter().filter_map(|l| l.bx.max_param()).max()
    }

    pub fn is_cq(&self) -> bool {
        self.layers.iter().any(|l| l.bx.is_cq())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rz(i: usize) -> DiagBox {
        DiagBox::z_spider(1, 1, PhaseExpr::theta(i))
    }

    #[test]
    fn single_box_diagram_has_its_boundary() {
        let d = Diagram::from_box(rz(0));
        assert_eq!(d.dom(), &Ty::qubits(1));
        assert_eq!(d.cod(), &Ty::qubits(1));
    }

    #[test]
    fn ill_typed_layer_is_rejected() {
        // Hadamard on a classical wire.
        let err = Diagram::id(Ty(vec![Ob::Bit])).then_at(0, DiagBox::hadamard());
        assert!(matches!(err, Err(DiagramError::IllTyped { .. })));
        // Offset past the end.
        let err = Diagram::id(Ty::qubits(1)).then_at(1, DiagBox::hadamard());
        assert!(matches!(err, Err(DiagramError::IllTyped { .. })));
    }

    #[test]
    fn spider_changes_wire_count() {
        let d = Diagram::id(Ty::qubits(1))
            .then_at(0, DiagBox::z_spider(1, 2, PhaseExpr::constant(0.0)))
            .unwrap();
        assert_eq!(d.cod(), &Ty::qubits(2));
    }

    #[test]
    fn compose_respects_boundaries() {
        let d1 = Diagram::from_box(rz(0));
        let d2 = Diagram::from_box(DiagBox::hadamard());
        let d = d1.compose(&d2).unwrap();
        assert_eq!(d.layers().len(), 2);
        assert_eq!(d.dom(), &Ty::qubits(1));
    }

    #[test]
    fn compose_mismatch_errors() {
        let d1 = Diagram::from_box(DiagBox::z_spider(1, 2, PhaseExpr::constant(0.0)));
        let d2 = Diagram::from_box(DiagBox::hadamard());
        assert!(matches!(
            d1.compose(&d2),
            Err(DiagramError::NotComposable { .. })
        ));
    }

    #[test]
    fn tensor_shifts_offsets() {
        let d = Diagram::from_box(rz(0)).tensor(&Diagram::from_box(DiagBox::hadamard()));
        assert_eq!(d.dom(), &Ty::qubits(2));
        assert_eq!(d.layers()[1].offset, 1);
    }

    #[test]
    fn tensor_width_is_additive() {
        let a = Diagram::id(Ty::qubits(2));
        let b = Diagram::id(Ty(vec![Ob::Bit]));
        assert_eq!(a.tensor(&b).dom().len(), 3);
    }

    #[test]
    fn splice_replaces_a_layer() {
        let d = Diagram::from_box(rz(0))
            .compose(&Diagram::from_box(DiagBox::hadamard()))
            .unwrap();
        let replacement = Diagram::from_box(DiagBox::hadamard())
            .compose(&Diagram::from_box(DiagBox::hadamard()))
            .unwrap();
        let spliced = d.splice(1, &replacement).unwrap();
        assert_eq!(spliced.layers().len(), 3);
        // Replacement with the wrong boundary is rejected.
        let wrong = Diagram::from_box(DiagBox::z_spider(1, 2, PhaseExpr::constant(0.0)));
        assert!(d.splice(1, &wrong).is_err());
    }

    #[test]
    fn classical_spider_rejects_phase_and_qubit() {
        assert!(DiagBox::classical_spider(Ob::Qubit, 1, 2).is_err());
        let ok = DiagBox::classical_spider(Ob::Dim(3), 2, 1).unwrap();
        assert_eq!(ok.dom.dims(), vec![3, 3]);
    }

    #[test]
    fn doubled_rejects_non_pure() {
        assert!(DiagBox::doubled(DiagBox::measure()).is_err());
        assert!(DiagBox::doubled(DiagBox::hadamard()).is_ok());
    }

    #[test]
    fn affine_map_checks_entry_count() {
        let e = DiagBox::affine_map(
            "w",
            Ty(vec![Ob::Dim(3)]),
            Ty(vec![Ob::Dim(2)]),
            vec![PhaseExpr::constant(0.0); 5],
        );
        assert!(e.is_err());
        let ok = DiagBox::affine_map(
            "w",
            Ty(vec![Ob::Dim(3)]),
            Ty(vec![Ob::Dim(2)]),
            vec![PhaseExpr::constant(0.0); 6],
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn max_param_scans_phases() {
        let d = Diagram::from_box(rz(3)).tensor(&Diagram::from_box(rz(1)));
        assert_eq!(d.max_param(), Some(3));
        assert_eq!(Diagram::id(Ty::qubits(1)).max_param(), None);
    }

    #[test]
    fn cq_detection() {
        assert!(Diagram::from_box(DiagBox::measure()).is_cq());
        assert!(!Diagram::from_box(rz(0)).is_cq());
        let doubled = DiagBox::doubled(rz(0)).unwrap();
        assert!(Diagram::from_box(doubled).is_cq());
    }
}
