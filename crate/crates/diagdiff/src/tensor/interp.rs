//! Interpretation of formal sums as dense tensors. The walk over layers is
//! generic in the value rig; plugging in complex numbers gives plain
//! evaluation, dual-complex numbers give forward-mode derivatives, and
//! polynomials give symbolic values for labelled green boxes.

use super::{kron, mat_compose, split_dual, Tensor, TensorError};
use crate::diagram::{
    BoxKind, ColourKind, ColourRegistry, DiagBox, Diagram, DiagramError, FormalSum, GreenLabel, Ob,
};
use crate::rig::{lift_smooth, Dual, PhaseExpr, Poly, Rig, RigError};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InterpretError {
    #[error("{what} cannot be interpreted over the {rig} rig")]
    Unsupported { what: String, rig: &'static str },
    #[error("box {0} only exists in the classical-quantum world; interpret it with the cq functor")]
    CqOnly(String),
    #[error("pure box {0} appears bare in a classical-quantum diagram; double it first")]
    PureInCq(String),
    #[error("box {0} has no interpretation")]
    NoInterpretation(String),
    #[error("no colour named {0:?} is registered")]
    UnregisteredColour(String),
    #[error("colour {colour:?} produced a tensor of {got} entries where the bubble boundary needs {want}")]
    ColourShape {
        colour: String,
        got: usize,
        want: usize,
    },
    #[error(transparent)]
    Rig(#[from] RigError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// Evaluation context: the parameter point, plus an optional ε-seed telling
/// dual-valued interpretations which parameter carries the infinitesimal and
/// with what scale.
#[derive(Debug, Clone, Copy)]
pub struct EvalCtx<'a> {
    pub theta: &'a [f64],
    pub seed: Option<(usize, f64)>,
}

impl<'a> EvalCtx<'a> {
    pub fn at(theta: &'a [f64]) -> Self {
        EvalCtx { theta, seed: None }
    }

    pub fn seeded(theta: &'a [f64], param: usize, scale: f64) -> Self {
        EvalCtx {
            theta,
            seed: Some((param, scale)),
        }
    }
}

/// A rig that diagram boxes can be evaluated into.
pub trait EvalScalar: Rig {
    const RIG_NAME: &'static str;

    fn constant(z: Complex64) -> Self;
    /// `e^{sign·i·α(θ)/2}` for an affine phase `α`.
    fn half_phase(phase: &PhaseExpr, ctx: &EvalCtx, sign: f64) -> Result<Self, InterpretError>;
    /// The value of an affine expression itself.
    fn affine(expr: &PhaseExpr, ctx: &EvalCtx) -> Result<Self, InterpretError>;
    fn green_label(label: &GreenLabel, ctx: &EvalCtx) -> Result<Self, InterpretError>;
    fn apply_colour(kind: &ColourKind, t: &Tensor<Self>) -> Result<Tensor<Self>, InterpretError>;
    /// Jacobian-vector product of a matrix-level colour.
    fn apply_jvp(
        kind: &ColourKind,
        point: &Tensor<Self>,
        tangent: &Tensor<Self>,
    ) -> Result<Tensor<Self>, InterpretError>;
}

impl EvalScalar for Complex64 {
    const RIG_NAME: &'static str = "complex";

    fn constant(z: Complex64) -> Self {
        z
    }

    fn half_phase(phase: &PhaseExpr, ctx: &EvalCtx, sign: f64) -> Result<Self, InterpretError> {
        let v = phase.eval(ctx.theta)?;
        Ok(Complex64::from_polar(1.0, sign * v / 2.0))
    }

    fn affine(expr: &PhaseExpr, ctx: &EvalCtx) -> Result<Self, InterpretError> {
        Ok(Complex64::new(expr.eval(ctx.theta)?, 0.0))
    }

    fn green_label(label: &GreenLabel, _ctx: &EvalCtx) -> Result<Self, InterpretError> {
        match label {
            GreenLabel::Const(z) => Ok(*z),
            GreenLabel::Var => Err(InterpretError::Unsupported {
                what: "the polynomial variable".into(),
                rig: Self::RIG_NAME,
            }),
        }
    }

    fn apply_colour(kind: &ColourKind, t: &Tensor<Self>) -> Result<Tensor<Self>, InterpretError> {
        match kind {
            ColourKind::Pointwise { f, .. } => Ok(Tensor {
                dom_dims: t.dom_dims.clone(),
                cod_dims: t.cod_dims.clone(),
                data: t.data.iter().map(|z| f(*z)).collect(),
            }),
            ColourKind::MatrixLevel { f, .. } => Ok(f(t)?),
        }
    }

    fn apply_jvp(
        kind: &ColourKind,
        point: &Tensor<Self>,
        tangent: &Tensor<Self>,
    ) -> Result<Tensor<Self>, InterpretError> {
        match kind {
            ColourKind::MatrixLevel { jvp, .. } => Ok(jvp(point, tangent)?),
            ColourKind::Pointwise { .. } => Err(InterpretError::Unsupported {
                what: "a Jacobian-vector box over a pointwise colour".into(),
                rig: Self::RIG_NAME,
            }),
        }
    }
}

impl EvalScalar for Dual<Complex64> {
    const RIG_NAME: &'static str = "dual-complex";

    fn constant(z: Complex64) -> Self {
        Dual::constant(z)
    }

    fn half_phase(phase: &PhaseExpr, ctx: &EvalCtx, sign: f64) -> Result<Self, InterpretError> {
        let v = phase.eval(ctx.theta)?;
        let dv = match ctx.seed {
            Some((i, scale)) => phase.partial(i) * scale,
            None => 0.0,
        };
        let x = Dual::new(Complex64::new(v, 0.0), Complex64::new(dv, 0.0));
        let half = Complex64::new(0.0, sign / 2.0);
        Ok(lift_smooth(
            move |a| (half * a).exp(),
            move |a| half * (half * a).exp(),
            x,
        ))
    }

    fn affine(expr: &PhaseExpr, ctx: &EvalCtx) -> Result<Self, InterpretError> {
        let v = expr.eval(ctx.theta)?;
        let dv = match ctx.seed {
            Some((i, scale)) => expr.partial(i) * scale,
            None => 0.0,
        };
        Ok(Dual::new(Complex64::new(v, 0.0), Complex64::new(dv, 0.0)))
    }

    fn green_label(label: &GreenLabel, _ctx: &EvalCtx) -> Result<Self, InterpretError> {
        match label {
            GreenLabel::Const(z) => Ok(Dual::constant(*z)),
            GreenLabel::Var => Err(InterpretError::Unsupported {
                what: "the polynomial variable".into(),
                rig: Self::RIG_NAME,
            }),
        }
    }

    fn apply_colour(kind: &ColourKind, t: &Tensor<Self>) -> Result<Tensor<Self>, InterpretError> {
        match kind {
            ColourKind::Pointwise { f, df } => Ok(Tensor {
                dom_dims: t.dom_dims.clone(),
                cod_dims: t.cod_dims.clone(),
                data: t
                    .data
                    .iter()
                    .map(|d| lift_smooth(|z| f(z), |z| df(z), *d))
                    .collect(),
            }),
            ColourKind::MatrixLevel { f, jvp } => {
                let (value, tangent) = split_dual(t);
                let out_v = f(&value)?;
                let out_t = jvp(&value, &tangent)?;
                Ok(Tensor {
                    dom_dims: out_v.dom_dims.clone(),
                    cod_dims: out_v.cod_dims.clone(),
                    data: out_v
                        .data
                        .into_iter()
                        .zip(out_t.data)
                        .map(|(v, e)| Dual::new(v, e))
                        .collect(),
                })
            }
        }
    }

    fn apply_jvp(
        _kind: &ColourKind,
        _point: &Tensor<Self>,
        _tangent: &Tensor<Self>,
    ) -> Result<Tensor<Self>, InterpretError> {
        Err(InterpretError::Unsupported {
            what: "a second-order pass through a Jacobian-vector box".into(),
            rig: Self::RIG_NAME,
        })
    }
}

impl EvalScalar for Poly {
    const RIG_NAME: &'static str = "polynomial";

    fn constant(z: Complex64) -> Self {
        Poly::constant(z)
    }

    fn half_phase(phase: &PhaseExpr, ctx: &EvalCtx, sign: f64) -> Result<Self, InterpretError> {
        if !phase.is_constant() {
            return Err(InterpretError::Unsupported {
                what: "a parametrised phase".into(),
                rig: Self::RIG_NAME,
            });
        }
        let v = phase.eval(ctx.theta)?;
        Ok(Poly::constant(Complex64::from_polar(1.0, sign * v / 2.0)))
    }

    fn affine(expr: &PhaseExpr, ctx: &EvalCtx) -> Result<Self, InterpretError> {
        if !expr.is_constant() {
            return Err(InterpretError::Unsupported {
                what: "a parametrised matrix entry".into(),
                rig: Self::RIG_NAME,
            });
        }
        Ok(Poly::constant(Complex64::new(expr.eval(ctx.theta)?, 0.0)))
    }

    fn green_label(label: &GreenLabel, _ctx: &EvalCtx) -> Result<Self, InterpretError> {
        match label {
            GreenLabel::Const(z) => Ok(Poly::constant(*z)),
            GreenLabel::Var => Ok(Poly::var()),
        }
    }

    fn apply_colour(_kind: &ColourKind, _t: &Tensor<Self>) -> Result<Tensor<Self>, InterpretError> {
        Err(InterpretError::Unsupported {
            what: "a bubble".into(),
            rig: Self::RIG_NAME,
        })
    }

    fn apply_jvp(
        _kind: &ColourKind,
        _point: &Tensor<Self>,
        _tangent: &Tensor<Self>,
    ) -> Result<Tensor<Self>, InterpretError> {
        Err(InterpretError::Unsupported {
            what: "a Jacobian-vector box".into(),
            rig: Self::RIG_NAME,
        })
    }
}

/// Generalised spider `Σ_i coeffs[i]·|i…i⟩⟨i…i|` with `m` inputs and `n`
/// outputs on wires of dimension `coeffs.len()`.
pub fn spider_tensor<S: Rig>(m: usize, n: usize, coeffs: &[S]) -> Tensor<S> {
    let d = coeffs.len();
    let mut t: Tensor<S> = Tensor::zeros(vec![d; m], vec![d; n]);
    let dom_size = t.dom_size();
    for (i, c) in coeffs.iter().enumerate() {
        let dom_flat: usize = (0..m).fold(0, |acc, _| acc * d + i);
        let cod_flat: usize = (0..n).fold(0, |acc, _| acc * d + i);
        // Accumulate rather than assign: with no legs at all, every corner
        // lands on the single scalar entry and the coefficients sum.
        let idx = cod_flat * dom_size + dom_flat;
        t.data[idx] = t.data[idx].add(c);
    }
    t
}

/// The permutation tensor exchanging two wires of the given dimensions.
pub fn swap_tensor<S: Rig>(d1: usize, d2: usize) -> Tensor<S> {
    let mut t = Tensor::zeros(vec![d1, d2], vec![d2, d1]);
    for i1 in 0..d1 {
        for i2 in 0..d2 {
            t.set(i2 * d1 + i1, i1 * d2 + i2, S::one());
        }
    }
    t
}

fn hadamard_tensor<S: EvalScalar>() -> Tensor<S> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let p = S::constant(Complex64::new(h, 0.0));
    let m = S::constant(Complex64::new(-h, 0.0));
    Tensor {
        dom_dims: vec![2],
        cod_dims: vec![2],
        data: vec![p.clone(), p.clone(), p, m],
    }
}

/// Interpret a single box as a tensor over `S`.
pub fn box_tensor<S: EvalScalar>(
    bx: &DiagBox,
    ctx: &EvalCtx,
    registry: &ColourRegistry,
) -> Result<Tensor<S>, InterpretError> {
    match &bx.kind {
        BoxKind::Spider { m, n, phase, ob } => {
            let coeffs = match ob {
                Ob::Qubit => vec![
                    S::half_phase(phase, ctx, -1.0)?,
                    S::half_phase(phase, ctx, 1.0)?,
                ],
                classical => vec![S::one(); classical.dim()],
            };
            Ok(spider_tensor(*m, *n, &coeffs))
        }
        BoxKind::Hadamard => Ok(hadamard_tensor()),
        BoxKind::Swap { a, b } => Ok(swap_tensor(a.dim(), b.dim())),
        BoxKind::Green { m, n, label } => {
            let coeffs = vec![S::one(), S::green_label(label, ctx)?];
            Ok(spider_tensor(*m, *n, &coeffs))
        }
        BoxKind::Scalar(z) => Ok(Tensor::scalar(S::constant(*z))),
        BoxKind::AffineMap { entries, .. } => {
            let data = entries
                .iter()
                .map(|e| S::affine(e, ctx))
                .collect::<Result<Vec<_>, _>>()?;
            Tensor::new(bx.dom.dims(), bx.cod.dims(), data).map_err(Into::into)
        }
        BoxKind::Bubble { colour, inner } => {
            let col = registry
                .get(colour)
                .ok_or_else(|| InterpretError::UnregisteredColour(colour.clone()))?;
            let t = interpret_in::<S>(inner, ctx, registry)?;
            let out = S::apply_colour(&col.kind, &t)?;
            reshape_to_boundary(out, bx, colour)
        }
        BoxKind::BubbleJvp {
            colour,
            point,
            tangent,
        } => {
            let col = registry
                .get(colour)
                .ok_or_else(|| InterpretError::UnregisteredColour(colour.clone()))?;
            let p = interpret_in::<S>(point, ctx, registry)?;
            let tg = interpret_in::<S>(tangent, ctx, registry)?;
            let out = S::apply_jvp(&col.kind, &p, &tg)?;
            reshape_to_boundary(out, bx, colour)
        }
        BoxKind::Measure | BoxKind::Encode | BoxKind::Doubled(_) => {
            Err(InterpretError::CqOnly(bx.name()))
        }
        BoxKind::Plain { name } => Err(InterpretError::NoInterpretation(name.clone())),
    }
}

fn reshape_to_boundary<S: Rig>(
    t: Tensor<S>,
    bx: &DiagBox,
    colour: &str,
) -> Result<Tensor<S>, InterpretError> {
    let want: usize = bx.dom.dims().iter().product::<usize>()
        * bx.cod.dims().iter().product::<usize>();
    if t.data.len() != want {
        return Err(InterpretError::ColourShape {
            colour: colour.to_string(),
            got: t.data.len(),
            want,
        });
    }
    Ok(Tensor {
        dom_dims: bx.dom.dims(),
        cod_dims: bx.cod.dims(),
        data: t.data,
    })
}

fn interpret_diagram<S: EvalScalar>(
    d: &Diagram,
    ctx: &EvalCtx,
    registry: &ColourRegistry,
) -> Result<Tensor<S>, InterpretError> {
    let mut wires: Vec<Ob> = d.dom().0.clone();
    let mut cur: Tensor<S> = Tensor::identity(d.dom().dims());
    for layer in d.layers() {
        let bt = box_tensor(&layer.bx, ctx, registry)?;
        let m = layer.bx.dom.len();
        let left: Vec<usize> = wires[..layer.offset].iter().map(Ob::dim).collect();
        let right: Vec<usize> = wires[layer.offset + m..].iter().map(Ob::dim).collect();
        let layer_t = kron(&kron(&Tensor::identity(left), &bt), &Tensor::identity(right));
        cur = mat_compose(&cur, &layer_t)?;
        let mut next = wires[..layer.offset].to_vec();
        next.extend_from_slice(&layer.bx.cod.0);
        next.extend_from_slice(&wires[layer.offset + m..]);
        wires = next;
    }
    Ok(cur)
}

/// Interpret a formal sum over an arbitrary evaluation rig. Terms are summed
/// in their stored order.
pub fn interpret_in<S: EvalScalar>(
    sum: &FormalSum,
    ctx: &EvalCtx,
    registry: &ColourRegistry,
) -> Result<Tensor<S>, InterpretError> {
    let mut acc: Tensor<S> = Tensor::zeros(sum.dom.dims(), sum.cod.dims());
    for term in sum.terms() {
        let t = interpret_diagram::<S>(&term.diagram, ctx, registry)?;
        acc = acc.add(&t.scale(&S::constant(term.coeff)))?;
    }
    Ok(acc)
}

/// Evaluate at a parameter point over the complex numbers.
pub fn interpret(
    sum: &FormalSum,
    theta: &[f64],
    registry: &ColourRegistry,
) -> Result<Tensor<Complex64>, InterpretError> {
    interpret_in(sum, &EvalCtx::at(theta), registry)
}

/// Evaluate over dual-complex numbers with parameter `seed` carrying an
/// ε-seed of the given scale (1 for a plain derivative).
pub fn interpret_dual(
    sum: &FormalSum,
    theta: &[f64],
    seed: usize,
    scale: f64,
    registry: &ColourRegistry,
) -> Result<Tensor<Dual<Complex64>>, InterpretError> {
    interpret_in(sum, &EvalCtx::seeded(theta, seed, scale), registry)
}

/// Evaluate over the polynomial rig; phases and entries must be constant and
/// green labels may mention the variable.
pub fn interpret_poly(
    sum: &FormalSum,
    registry: &ColourRegistry,
) -> Result<Tensor<Poly>, InterpretError> {
    interpret_in(sum, &EvalCtx::at(&[]), registry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Ty;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reg() -> ColourRegistry {
        ColourRegistry::standard()
    }

    fn one_box(bx: DiagBox) -> FormalSum {
        FormalSum::from_diagram(Diagram::from_box(bx))
    }

    #[test]
    fn empty_diagram_is_scalar_one() {
        let s = FormalSum::from_diagram(Diagram::id(Ty::unit()));
        let t = interpret(&s, &[], &reg()).unwrap();
        assert_eq!(t.data, vec![c(1.0, 0.0)]);
    }

    #[test]
    fn hadamard_matrix() {
        let t = interpret(&one_box(DiagBox::hadamard()), &[], &reg()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((t.get(0, 0) - c(h, 0.0)).norm() < 1e-15);
        assert!((t.get(1, 1) - c(-h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn swap_matrix() {
        use crate::diagram::Ob;
        let t = interpret(&one_box(DiagBox::swap(Ob::Qubit, Ob::Qubit)), &[], &reg()).unwrap();
        // |01⟩ ↦ |10⟩
        assert_eq!(t.get(2, 1), &c(1.0, 0.0));
        assert_eq!(t.get(1, 1), &c(0.0, 0.0));
    }

    #[test]
    fn phaseless_spider_is_identity_on_one_leg() {
        let s = one_box(DiagBox::z_spider(1, 1, PhaseExpr::constant(0.0)));
        let t = interpret(&s, &[], &reg()).unwrap();
        assert!(t.max_abs_diff(&Tensor::identity(vec![2])) < 1e-15);
    }

    #[test]
    fn pi_spider_is_diag_minus_i_i() {
        let s = one_box(DiagBox::z_spider(1, 1, PhaseExpr::constant(std::f64::consts::PI)));
        let t = interpret(&s, &[], &reg()).unwrap();
        assert!((t.get(0, 0) - c(0.0, -1.0)).norm() < 1e-15);
        assert!((t.get(1, 1) - c(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(t.get(0, 1), &c(0.0, 0.0));
    }

    #[test]
    fn green_box_with_polynomial_label() {
        use crate::rig::DifferentialRig;
        let s = one_box(DiagBox::green(1, 1, GreenLabel::Var));
        let t = interpret_poly(&s, &reg()).unwrap();
        assert_eq!(t.get(0, 0), &Poly::one());
        assert_eq!(t.get(1, 1), &Poly::var());
        assert_eq!(t.get(1, 1).derive(), Poly::one());
        // Over the complex rig the variable has no value.
        assert!(matches!(
            interpret(&s, &[], &reg()),
            Err(InterpretError::Unsupported { .. })
        ));
    }

    #[test]
    fn dual_value_part_matches_plain_interpretation() {
        let d = Diagram::from_box(DiagBox::z_spider(1, 1, PhaseExpr::theta(0)))
            .compose(&Diagram::from_box(DiagBox::hadamard()))
            .unwrap();
        let s = FormalSum::from_diagram(d);
        let theta = [0.7];
        let plain = interpret(&s, &theta, &reg()).unwrap();
        let dual = interpret_dual(&s, &theta, 0, 1.0, &reg()).unwrap();
        let (value, _) = split_dual(&dual);
        assert!(value.max_abs_diff(&plain) < 1e-15);
    }

    #[test]
    fn dual_tangent_is_linear_in_seed_scale() {
        let s = one_box(DiagBox::z_spider(1, 1, PhaseExpr::theta(0)));
        let theta = [0.3];
        let (_, t1) = split_dual(&interpret_dual(&s, &theta, 0, 1.0, &reg()).unwrap());
        let (_, t2) = split_dual(&interpret_dual(&s, &theta, 0, 2.0, &reg()).unwrap());
        assert!(t2.max_abs_diff(&t1.scale(&c(2.0, 0.0))) < 1e-15);
    }

    #[test]
    fn measure_is_rejected_by_pure_interpretation() {
        let s = one_box(DiagBox::measure());
        assert!(matches!(
            interpret(&s, &[], &reg()),
            Err(InterpretError::CqOnly(_))
        ));
    }

    #[test]
    fn plain_box_has_no_interpretation() {
        let s = one_box(DiagBox::plain("mystery", Ty::qubits(1), Ty::qubits(1)));
        assert!(matches!(
            interpret(&s, &[], &reg()),
            Err(InterpretError::NoInterpretation(_))
        ));
    }

    #[test]
    fn scalar_boxes_multiply_into_the_tensor() {
        let d = Diagram::from_box(DiagBox::scalar(c(2.0, 1.0)))
            .tensor(&Diagram::from_box(DiagBox::hadamard()));
        let t = interpret(&FormalSum::from_diagram(d), &[], &reg()).unwrap();
        let h = interpret(&one_box(DiagBox::hadamard()), &[], &reg()).unwrap();
        assert!(t.max_abs_diff(&h.scale(&c(2.0, 1.0))) < 1e-15);
    }

    #[test]
    fn sum_interpretation_is_additive() {
        let a = one_box(DiagBox::z_spider(1, 1, PhaseExpr::constant(0.4)));
        let b = one_box(DiagBox::hadamard());
        let both = a.add(&b).unwrap();
        let lhs = interpret(&both, &[], &reg()).unwrap();
        let rhs = interpret(&a, &[], &reg())
            .unwrap()
            .add(&interpret(&b, &[], &reg()).unwrap())
            .unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-15);
    }

    #[test]
    fn bubble_applies_pointwise_function() {
        // Sigmoid wrapped around the scalar 0 evaluates to 1/2.
        let inner = FormalSum::from_diagram(Diagram::from_box(DiagBox::scalar(c(0.0, 0.0))));
        let bx = DiagBox::bubble("sigmoid", inner, &reg()).unwrap();
        let t = interpret(&one_box(bx), &[], &reg()).unwrap();
        assert!((t.data[0] - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn classical_spider_copies_a_vector() {
        use crate::diagram::Ob;
        let copy = DiagBox::classical_spider(Ob::Dim(3), 1, 2).unwrap();
        let t = interpret(&one_box(copy), &[], &reg()).unwrap();
        // Basis vector i maps to (i, i).
        for i in 0..3 {
            assert_eq!(t.get(i * 3 + i, i), &c(1.0, 0.0));
        }
        assert_eq!(t.get(1, 0), &c(0.0, 0.0));
    }
}
