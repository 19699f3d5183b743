//! ZX generators: spider semantics, the phase-shift derivative of a spider,
//! the algebraic green-box family, and recovery of the generator of a
//! one-parameter unitary family from its derivative at zero.

use crate::diagram::{
    BoxKind, ColourRegistry, DiagBox, Diagram, DiagramError, FormalSum, GreenLabel, Term, Ty,
};
use crate::rig::PhaseExpr;
use crate::tensor::interp::{box_tensor, interpret, interpret_dual, EvalCtx, InterpretError};
use crate::tensor::{matrix_exp, split_dual, Tensor};
use num_complex::Complex64;
use std::f64::consts::{PI, SQRT_2};

/// Evaluate a single box to its complex matrix at the given parameter point.
pub fn zx_interpret(bx: &DiagBox, theta: &[f64]) -> Result<Tensor<Complex64>, InterpretError> {
    box_tensor(bx, &EvalCtx::at(theta), &ColourRegistry::standard())
}

/// Derivative of a spider with respect to one parameter:
/// `(∂α/2)·Z^{m,n}(α+π)`, or the zero sum when the phase does not mention
/// the parameter.
pub fn spider_derivative(bx: &DiagBox, param: usize) -> Result<FormalSum, DiagramError> {
    let (phase, rest) = match &bx.kind {
        BoxKind::Spider { m, n, phase, ob } => (phase, (*m, *n, *ob)),
        _ => return Err(DiagramError::BadBox(format!("{} is not a spider", bx.name()))),
    };
    let coeff = phase.partial(param) / 2.0;
    if coeff == 0.0 {
        return Ok(FormalSum::zero(bx.dom.clone(), bx.cod.clone()));
    }
    let (m, n, ob) = rest;
    let shifted = DiagBox {
        dom: bx.dom.clone(),
        cod: bx.cod.clone(),
        kind: BoxKind::Spider {
            m,
            n,
            phase: phase.shifted(PI),
            ob,
        },
    };
    Ok(FormalSum::from_diagram(Diagram::from_box(shifted)).scale(Complex64::new(coeff, 0.0)))
}

/// Derivative of an algebraic green box: `(∂a)·(R^{m,n}(1) − R^{m,n}(0))`,
/// whose interpretation is `(∂a)·|1…⟩⟨1…|`.
pub fn algebraic_derivative(bx: &DiagBox) -> Result<FormalSum, DiagramError> {
    let (m, n, label) = match &bx.kind {
        BoxKind::Green { m, n, label } => (*m, *n, label),
        _ => {
            return Err(DiagramError::BadBox(format!(
                "{} is not an algebraic green box",
                bx.name()
            )))
        }
    };
    let da = label.derivative();
    if da == Complex64::new(0.0, 0.0) {
        return Ok(FormalSum::zero(bx.dom.clone(), bx.cod.clone()));
    }
    let at = |v: f64| {
        Diagram::from_box(DiagBox::green(
            m,
            n,
            GreenLabel::Const(Complex64::new(v, 0.0)),
        ))
    };
    FormalSum::from_terms(
        bx.dom.clone(),
        bx.cod.clone(),
        vec![
            Term {
                coeff: da,
                diagram: at(1.0),
            },
            Term {
                coeff: -da,
                diagram: at(0.0),
            },
        ],
    )
}

/// X spider as sugar: `H^{⊗m} ⨾ Z^{m,n}(phase) ⨾ H^{⊗n}`.
pub fn x_spider(m: usize, n: usize, phase: PhaseExpr) -> Diagram {
    let mut d = Diagram::id(Ty::qubits(m));
    for k in 0..m {
        d = d.then_at(k, DiagBox::hadamard()).unwrap();
    }
    d = d.then_at(0, DiagBox::z_spider(m, n, phase)).unwrap();
    for k in 0..n {
        d = d.then_at(k, DiagBox::hadamard()).unwrap();
    }
    d
}

/// Z rotation on one qubit (our spider convention makes this exactly `Rz`).
pub fn rz(phase: PhaseExpr) -> Diagram {
    Diagram::from_box(DiagBox::z_spider(1, 1, phase))
}

/// X rotation on one qubit.
pub fn rx(phase: PhaseExpr) -> Diagram {
    x_spider(1, 1, phase)
}

/// CNOT with control on the first wire, built from spiders:
/// `√2 · (Z^{1,2}(0) ⊗ id) ⨾ (id ⊗ X^{2,1}(0))`.
pub fn cnot() -> Diagram {
    let copy = Diagram::from_box(DiagBox::z_spider(1, 2, PhaseExpr::constant(0.0)));
    let xor = x_spider(2, 1, PhaseExpr::constant(0.0));
    let wire = Diagram::id(Ty::qubits(1));
    copy.tensor(&wire)
        .compose(&wire.tensor(&xor))
        .unwrap()
        .tensor(&Diagram::from_box(DiagBox::scalar(Complex64::new(
            SQRT_2, 0.0,
        ))))
}

/// `Rz(θ0) ⊗ Rx(θ0)`: a product of two rotations driven by one parameter.
pub fn rz_rx() -> Diagram {
    rz(PhaseExpr::theta(0)).tensor(&rx(PhaseExpr::theta(0)))
}

/// The two-qubit Pauli gadget `(1⊗H) ⨾ CNOT ⨾ (1⊗Rz(θ0)) ⨾ CNOT ⨾ (1⊗H)`,
/// a one-parameter family generated by `−(1/2)·Z⊗X`.
pub fn pauli_zx_gadget() -> Diagram {
    let h1 = Diagram::id(Ty::qubits(1)).tensor(&Diagram::from_box(DiagBox::hadamard()));
    let rz1 = Diagram::id(Ty::qubits(1)).tensor(&rz(PhaseExpr::theta(0)));
    h1.compose(&cnot())
        .unwrap()
        .compose(&rz1)
        .unwrap()
        .compose(&cnot())
        .unwrap()
        .compose(&h1)
        .unwrap()
}

/// Result of checking that a parametrised sum is the one-parameter group
/// generated by `−i·(∂U)(0)`.
#[derive(Debug, Clone)]
pub struct StoneReport {
    pub generator: Tensor<Complex64>,
    /// Max entrywise deviation of `U(t)` from `exp(i·t·generator)` over the grid.
    pub max_deviation: f64,
    /// Max entrywise deviation of `U(t)·U(t)†` from the identity over the grid.
    pub unitarity_defect: f64,
    /// Entrywise deviation of the generator from its own adjoint.
    pub hermiticity_defect: f64,
    /// Entrywise deviation of `U(0)` from the identity.
    pub identity_defect: f64,
    /// Per grid point: `(t, deviation of U(t) from the exponential)`.
    pub grid: Vec<(f64, f64)>,
    pub tolerance: f64,
    pub pass: bool,
}

/// `−i·(∂U)(0)`: the generator of a one-parameter family, extracted by a
/// dual-number pass at `θ0 = 0`.
pub fn stone_generator(
    sum: &FormalSum,
    registry: &ColourRegistry,
) -> Result<Tensor<Complex64>, InterpretError> {
    let dual = interpret_dual(sum, &[0.0], 0, 1.0, registry)?;
    let (_, tangent) = split_dual(&dual);
    Ok(tangent.scale(&Complex64::new(0.0, -1.0)))
}

/// Verify `U(t) = exp(i·t·Ĥ)` with `Ĥ = −i·(∂U)(0)` across a grid of
/// parameter values, also recording how far each `U(t)` is from unitary.
pub fn stone_check(
    sum: &FormalSum,
    grid: &[f64],
    tolerance: f64,
    registry: &ColourRegistry,
) -> Result<StoneReport, InterpretError> {
    let generator = stone_generator(sum, registry)?;
    let dim = generator.dom_size();
    let id = Tensor::identity(generator.dom_dims.clone());
    let mut max_deviation: f64 = 0.0;
    let mut unitarity_defect: f64 = 0.0;
    let mut points = Vec::with_capacity(grid.len());
    for &t in grid {
        let u = interpret(sum, &[t], registry)?;
        if u.dom_size() != dim || u.cod_size() != dim {
            return Err(InterpretError::Unsupported {
                what: "a non-square one-parameter family".into(),
                rig: "complex",
            });
        }
        let expected = matrix_exp(&generator, t)?;
        let deviation = u.max_abs_diff(&expected);
        points.push((t, deviation));
        max_deviation = max_deviation.max(deviation);
        let gram = crate::tensor::mat_compose(&u.dagger(), &u)?;
        unitarity_defect = unitarity_defect.max(gram.max_abs_diff(&id));
    }
    let hermiticity_defect = generator.max_abs_diff(&generator.dagger());
    let identity_defect = interpret(sum, &[0.0], registry)?.max_abs_diff(&id);
    let pass = max_deviation <= tolerance
        && unitarity_defect <= tolerance
        && hermiticity_defect <= tolerance
        && identity_defect <= tolerance;
    Ok(StoneReport {
        generator,
        max_deviation,
        unitarity_defect,
        hermiticity_defect,
        identity_defect,
        grid: points,
        tolerance,
        pass,
    })
}
