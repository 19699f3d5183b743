//! The derivation engine: per-box gradient rules extended to whole sums by
//! the product rule, the spider-built Hadamard product, the bubble chain
//! rule, and layers for feed-forward networks.

pub mod check;

pub use check::{
    dual_eval, eval_any, finite_difference, gradcheck, GradCheckConfig, GradCheckPoint,
    GradCheckReport,
};

use crate::cqmap::{shift_rule_derivative, CqError, ShiftRule};
use crate::diagram::{
    BoxKind, ColourKind, ColourRegistry, DiagBox, Diagram, DiagramError, FormalSum, Ob,
};
use crate::rig::PhaseExpr;
use crate::tensor::interp::InterpretError;
use crate::zx;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AutodiffError {
    #[error("no gradient rule for box {0}")]
    MissingRule(String),
    #[error("colour {0:?} has no registered derivative colour")]
    NoDerivativeColour(String),
    #[error("{0} cannot be differentiated again at the diagram level")]
    SecondOrder(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Interpret(#[from] InterpretError),
    #[error(transparent)]
    Cq(#[from] CqError),
}

/// A custom per-box gradient rule: box and parameter index in, replacement
/// sum (with the box's boundary) out.
pub type CustomRule = Arc<dyn Fn(&DiagBox, usize) -> Result<FormalSum, AutodiffError> + Send + Sync>;

/// Which rule a box resolves to when differentiated by parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoxRule {
    /// The box does not depend on any parameter.
    Zero,
    /// Phase-shift rule for pure spiders.
    SpiderShift,
    /// Parameter-shift rule for doubled spiders.
    ParameterShift(ShiftRule),
    /// Replace an affine-entry matrix by its matrix of coefficients.
    AffineCoefficients,
    /// Chain rule through a bubble colour.
    BubbleChain,
    /// A rule registered by name for plain boxes.
    Custom,
}

/// Assigns a gradient rule to every differentiable box kind. The shift rule
/// used for doubled spiders is configurable (deliberately wrong magnitudes
/// make good negative controls); plain boxes resolve through named custom
/// rules.
pub struct GradientRuleSet {
    shift: ShiftRule,
    custom: BTreeMap<String, CustomRule>,
}

impl std::fmt::Debug for GradientRuleSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GradientRuleSet")
            .field("shift", &self.shift)
            .field("custom", &self.custom.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl Default for GradientRuleSet {
    fn default() -> Self {
        GradientRuleSet {
            shift: ShiftRule::for_spiders(),
            custom: BTreeMap::new(),
        }
    }
}

impl GradientRuleSet {
    pub fn standard() -> Self {
        GradientRuleSet::default()
    }

    /// Use a different parameter-shift rule for doubled spiders.
    pub fn with_shift_rule(rule: ShiftRule) -> Self {
        GradientRuleSet {
            shift: rule,
            custom: BTreeMap::new(),
        }
    }

    pub fn register_custom(&mut self, name: &str, rule: CustomRule) {
        self.custom.insert(name.to_string(), rule);
    }

    pub fn shift(&self) -> &ShiftRule {
        &self.shift
    }

    /// The rule a box would be differentiated by, if any.
    pub fn rule_for(&self, bx: &DiagBox) -> Option<BoxRule> {
        match &bx.kind {
            BoxKind::Spider { ob: Ob::Qubit, .. } => Some(BoxRule::SpiderShift),
            BoxKind::Spider { .. }
            | BoxKind::Hadamard
            | BoxKind::Swap { .. }
            | BoxKind::Scalar(_)
            | BoxKind::Measure
            | BoxKind::Encode
            | BoxKind::Green { .. } => Some(BoxRule::Zero),
            BoxKind::Doubled(inner) => match inner.kind {
                BoxKind::Spider { ob: Ob::Qubit, .. } => {
                    Some(BoxRule::ParameterShift(self.shift))
                }
                _ => Some(BoxRule::Zero),
            },
            BoxKind::AffineMap { .. } => Some(BoxRule::AffineCoefficients),
            BoxKind::Bubble { .. } => Some(BoxRule::BubbleChain),
            BoxKind::BubbleJvp { .. } => None,
            BoxKind::Plain { name } => self.custom.contains_key(name).then_some(BoxRule::Custom),
        }
    }
}

fn zero_like(bx: &DiagBox) -> FormalSum {
    FormalSum::zero(bx.dom.clone(), bx.cod.clone())
}

/// Derivative of a single box with respect to one parameter, as a sum with
/// the box's boundary.
pub fn box_derivative(
    bx: &DiagBox,
    param: usize,
    rules: &GradientRuleSet,
    registry: &ColourRegistry,
) -> Result<FormalSum, AutodiffError> {
    match &bx.kind {
        BoxKind::Spider { ob: Ob::Qubit, .. } => Ok(zx::spider_derivative(bx, param)?),
        // Phases on other objects are constant zero; labels, wirings and the
        // measurement/encoding boxes carry no parameters at all.
        BoxKind::Spider { .. }
        | BoxKind::Hadamard
        | BoxKind::Swap { .. }
        | BoxKind::Scalar(_)
        | BoxKind::Measure
        | BoxKind::Encode
        | BoxKind::Green { .. } => Ok(zero_like(bx)),
        BoxKind::Doubled(inner) => match inner.kind {
            BoxKind::Spider { ob: Ob::Qubit, .. } => {
                Ok(shift_rule_derivative(bx, param, &rules.shift)?)
            }
            _ => Ok(zero_like(bx)),
        },
        BoxKind::AffineMap { name, entries } => {
            if entries.iter().all(|e| e.partial(param) == 0.0) {
                return Ok(zero_like(bx));
            }
            let coeffs: Vec<PhaseExpr> = entries
                .iter()
                .map(|e| PhaseExpr::constant(e.partial(param)))
                .collect();
            let dbx = DiagBox::affine_map(
                &format!("{name}_d{param}"),
                bx.dom.clone(),
                bx.cod.clone(),
                coeffs,
            )?;
            Ok(FormalSum::from_diagram(Diagram::from_box(dbx)))
        }
        BoxKind::Bubble { .. } => bubble_derivative(bx, param, rules, registry),
        BoxKind::BubbleJvp { .. } => Err(AutodiffError::SecondOrder(bx.name())),
        BoxKind::Plain { name } => match rules.custom.get(name) {
            Some(rule) => rule(bx, param),
            None => Err(AutodiffError::MissingRule(bx.name())),
        },
    }
}

/// Derivative of a formal sum with respect to one parameter: linearity over
/// terms and, within each diagram, the product rule — one layer of each term
/// is replaced by its box's derivative sum.
pub fn diagram_derivative(
    sum: &FormalSum,
    param: usize,
    rules: &GradientRuleSet,
    registry: &ColourRegistry,
) -> Result<FormalSum, AutodiffError> {
    let mut out = FormalSum::zero(sum.dom.clone(), sum.cod.clone());
    for term in sum.terms() {
        for (k, layer) in term.diagram.layers().iter().enumerate() {
            let rule_sum = box_derivative(&layer.bx, param, rules, registry)?;
            for rt in rule_sum.terms() {
                let spliced = term.diagram.splice(k, &rt.diagram)?;
                out.push(term.coeff * rt.coeff, spliced);
            }
        }
    }
    Ok(out)
}

/// Derivative of a sum along the rig variable: every algebraic green box is
/// replaced by its label's derivative, everything else contributes zero.
pub fn algebraic_sum_derivative(sum: &FormalSum) -> Result<FormalSum, AutodiffError> {
    let mut out = FormalSum::zero(sum.dom.clone(), sum.cod.clone());
    for term in sum.terms() {
        for (k, layer) in term.diagram.layers().iter().enumerate() {
            if !matches!(layer.bx.kind, BoxKind::Green { .. }) {
                continue;
            }
            let rule_sum = zx::algebraic_derivative(&layer.bx)?;
            for rt in rule_sum.terms() {
                let spliced = term.diagram.splice(k, &rt.diagram)?;
                out.push(term.coeff * rt.coeff, spliced);
            }
        }
    }
    Ok(out)
}

fn copy_box(ob: Ob) -> DiagBox {
    match ob {
        Ob::Qubit => DiagBox::z_spider(1, 2, PhaseExpr::constant(0.0)),
        other => DiagBox::classical_spider(other, 1, 2).expect("classical object"),
    }
}

fn merge_box(ob: Ob) -> DiagBox {
    match ob {
        Ob::Qubit => DiagBox::z_spider(2, 1, PhaseExpr::constant(0.0)),
        other => DiagBox::classical_spider(other, 2, 1).expect("classical object"),
    }
}

/// Wire routing by adjacent swaps: after the diagram, output position `j`
/// carries input wire `perm[j]`.
fn route(wires: &[Ob], perm: &[usize]) -> Diagram {
    let mut order: Vec<usize> = (0..wires.len()).collect();
    let mut d = Diagram::id(crate::diagram::Ty(wires.to_vec()));
    for j in 0..perm.len() {
        let p = j + order[j..]
            .iter()
            .position(|&s| s == perm[j])
            .expect("perm is a permutation of the wires");
        for q in (j..p).rev() {
            let (a, b) = (wires[order[q]], wires[order[q + 1]]);
            d = d
                .then_at(q, DiagBox::swap(a, b))
                .expect("swap of adjacent wires is well-typed");
            order.swap(q, q + 1);
        }
    }
    d
}

/// Entrywise (Hadamard) product of two parallel sums, built diagrammatically:
/// copy spiders on every domain wire, the two sums side by side, and merge
/// spiders on every codomain wire, with swap layers routing in between. On
/// the unit type all stages are empty and the product is plain scalar
/// multiplication.
pub fn hadamard_product_diagram(
    f: &FormalSum,
    g: &FormalSum,
) -> Result<FormalSum, AutodiffError> {
    if f.dom != g.dom || f.cod != g.cod {
        return Err(AutodiffError::Diagram(DiagramError::NotParallel {
            lhs: format!("{} → {}", f.dom, f.cod),
            rhs: format!("{} → {}", g.dom, g.cod),
        }));
    }
    let dom = &f.dom.0;
    let cod = &f.cod.0;

    // dom → dom⊗dom, interleaved as (w0, w0, w1, w1, …).
    let mut copies = Diagram::id(f.dom.clone());
    for (i, &w) in dom.iter().enumerate() {
        copies = copies.then_at(2 * i, copy_box(w))?;
    }
    // Interleaved to grouped: position j takes source 2j, position k+j takes 2j+1.
    let k = dom.len();
    let interleaved_dom: Vec<Ob> = dom.iter().flat_map(|&w| [w, w]).collect();
    let mut to_grouped = Vec::with_capacity(2 * k);
    to_grouped.extend((0..k).map(|j| 2 * j));
    to_grouped.extend((0..k).map(|j| 2 * j + 1));
    let spread = route(&interleaved_dom, &to_grouped);

    // Grouped to interleaved on the codomain side, then merge each pair.
    let m = cod.len();
    let grouped_cod: Vec<Ob> = cod.iter().chain(cod.iter()).copied().collect();
    let mut to_interleaved = Vec::with_capacity(2 * m);
    for j in 0..m {
        to_interleaved.push(j);
        to_interleaved.push(m + j);
    }
    let collect = route(&grouped_cod, &to_interleaved);
    let mut merges = Diagram::id(collect.cod().clone());
    for (j, &w) in cod.iter().enumerate() {
        merges = merges.then_at(j, merge_box(w))?;
    }

    let pre = FormalSum::from_diagram(copies.compose(&spread)?);
    let post = FormalSum::from_diagram(collect.compose(&merges)?);
    Ok(pre.compose(&f.tensor(g))?.compose(&post)?)
}

/// Chain rule for a bubble box: `∂(β(f)) = β′(f) ⊙ ∂f` for pointwise
/// colours, and a Jacobian-vector box for matrix-level ones.
pub fn bubble_derivative(
    bx: &DiagBox,
    param: usize,
    rules: &GradientRuleSet,
    registry: &ColourRegistry,
) -> Result<FormalSum, AutodiffError> {
    let (colour, inner) = match &bx.kind {
        BoxKind::Bubble { colour, inner } => (colour, inner),
        _ => {
            return Err(AutodiffError::Diagram(DiagramError::BadBox(format!(
                "{} is not a bubble",
                bx.name()
            ))))
        }
    };
    let col = registry
        .get(colour)
        .ok_or_else(|| DiagramError::UnregisteredColour(colour.clone()))?;
    let dinner = diagram_derivative(inner, param, rules, registry)?;
    if dinner.is_zero() {
        return Ok(zero_like(bx));
    }
    match &col.kind {
        ColourKind::Pointwise { .. } => {
            let dname = col
                .derivative
                .clone()
                .ok_or_else(|| AutodiffError::NoDerivativeColour(colour.clone()))?;
            let outer = DiagBox::bubble(&dname, inner.clone(), registry)?;
            hadamard_product_diagram(
                &FormalSum::from_diagram(Diagram::from_box(outer)),
                &dinner,
            )
        }
        ColourKind::MatrixLevel { .. } => {
            let jv = DiagBox::bubble_jvp(colour, inner.clone(), dinner, registry)?;
            Ok(FormalSum::from_diagram(Diagram::from_box(jv)))
        }
    }
}

/// One feed-forward layer applied to a state: `bubble(σ, (input ⨾ W) + b)`.
/// `input` and `bias` are states of the unit domain; `weights` is a matrix
/// box from the input's codomain.
pub fn nn_layer(
    input: &FormalSum,
    weights: &DiagBox,
    bias: &DiagBox,
    colour: &str,
    registry: &ColourRegistry,
) -> Result<FormalSum, AutodiffError> {
    let wx = input.compose(&FormalSum::from_diagram(Diagram::from_box(weights.clone())))?;
    let pre = wx.add(&FormalSum::from_diagram(Diagram::from_box(bias.clone())))?;
    let bx = DiagBox::bubble(colour, pre, registry)?;
    Ok(FormalSum::from_diagram(Diagram::from_box(bx)))
}
