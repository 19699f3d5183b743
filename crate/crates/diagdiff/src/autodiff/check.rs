//! Gradient checking: the diagrammatic derivative, the dual-number forward
//! pass, and central finite differences, compared on a grid around a point.

use super::{diagram_derivative, AutodiffError, GradientRuleSet};
use crate::cqmap::{cq_interpret, cq_interpret_dual, split_dual_cq};
use crate::diagram::{ColourRegistry, FormalSum};
use crate::tensor::interp::{interpret, interpret_dual, InterpretError};
use crate::tensor::{split_dual, Tensor};
use num_complex::Complex64;

/// Evaluate a sum at a parameter point, routing through the
/// classical-quantum interpretation when the sum contains cq boxes.
pub fn eval_any(
    sum: &FormalSum,
    theta: &[f64],
    registry: &ColourRegistry,
) -> Result<Tensor<Complex64>, InterpretError> {
    if sum.is_cq() {
        Ok(cq_interpret(sum, theta, registry)?.tensor)
    } else {
        interpret(sum, theta, registry)
    }
}

/// Value and derivative along one parameter from a single dual-number pass.
pub fn dual_eval(
    sum: &FormalSum,
    param: usize,
    theta: &[f64],
    registry: &ColourRegistry,
) -> Result<(Tensor<Complex64>, Tensor<Complex64>), InterpretError> {
    if sum.is_cq() {
        let m = cq_interpret_dual(sum, theta, param, 1.0, registry)?;
        let (value, tangent) = split_dual_cq(&m);
        Ok((value.tensor, tangent.tensor))
    } else {
        let t = interpret_dual(sum, theta, param, 1.0, registry)?;
        Ok(split_dual(&t))
    }
}

/// Central finite difference along one parameter.
pub fn finite_difference(
    sum: &FormalSum,
    param: usize,
    theta: &[f64],
    h: f64,
    registry: &ColourRegistry,
) -> Result<Tensor<Complex64>, InterpretError> {
    let mut up = theta.to_vec();
    let mut dn = theta.to_vec();
    if param >= up.len() {
        up.resize(param + 1, 0.0);
        dn.resize(param + 1, 0.0);
    }
    up[param] += h;
    dn[param] -= h;
    let plus = eval_any(sum, &up, registry)?;
    let minus = eval_any(sum, &dn, registry)?;
    Ok(plus
        .sub(&minus)
        .expect("same sum evaluates to the same shape")
        .scale(&Complex64::new(1.0 / (2.0 * h), 0.0)))
}

/// The derivative built by the rule engine, evaluated at a point.
pub fn diagrammatic_gradient(
    sum: &FormalSum,
    param: usize,
    theta: &[f64],
    rules: &GradientRuleSet,
    registry: &ColourRegistry,
) -> Result<Tensor<Complex64>, AutodiffError> {
    let dv = diagram_derivative(sum, param, rules, registry)?;
    Ok(eval_any(&dv, theta, registry)?)
}

/// Where and how tightly to compare the three gradients.
#[derive(Debug, Clone)]
pub struct GradCheckConfig {
    /// Base parameter point; shorter vectors are zero-extended.
    pub theta: Vec<f64>,
    /// Finite-difference step.
    pub h: f64,
    /// Tolerance between the diagrammatic and dual derivatives.
    pub tol_exact: f64,
    /// Tolerance of either against finite differences.
    pub tol_fd: f64,
    /// Offsets added to the checked parameter, one grid point each.
    pub grid_offsets: Vec<f64>,
}

impl Default for GradCheckConfig {
    fn default() -> Self {
        GradCheckConfig {
            theta: Vec::new(),
            h: 1e-5,
            tol_exact: 1e-10,
            tol_fd: 1e-6,
            grid_offsets: vec![-0.2, -0.1, 0.0, 0.1, 0.2],
        }
    }
}

impl GradCheckConfig {
    pub fn at(theta: &[f64]) -> Self {
        GradCheckConfig {
            theta: theta.to_vec(),
            ..GradCheckConfig::default()
        }
    }
}

/// One grid point of one parameter.
#[derive(Debug, Clone)]
pub struct GradCheckPoint {
    pub param: usize,
    pub theta: Vec<f64>,
    /// Largest entry gap between the diagrammatic and dual derivatives.
    pub exact_disagreement: f64,
    /// Largest entry gap of either derivative against finite differences.
    pub fd_disagreement: f64,
    pub pass: bool,
}

/// All grid points, with the worst disagreements pulled out.
#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub points: Vec<GradCheckPoint>,
    pub max_exact_disagreement: f64,
    pub max_fd_disagreement: f64,
    pub pass: bool,
}

/// Compare the diagrammatic, dual-number, and finite-difference derivatives
/// of every parameter on a grid around `config.theta`. A sum with no
/// parameters passes vacuously.
pub fn gradcheck(
    sum: &FormalSum,
    config: &GradCheckConfig,
    rules: &GradientRuleSet,
    registry: &ColourRegistry,
) -> Result<GradCheckReport, AutodiffError> {
    let n_params = match sum.max_param() {
        Some(p) => p + 1,
        None => {
            return Ok(GradCheckReport {
                points: Vec::new(),
                max_exact_disagreement: 0.0,
                max_fd_disagreement: 0.0,
                pass: true,
            })
        }
    };
    let mut base = config.theta.clone();
    if base.len() < n_params {
        base.resize(n_params, 0.0);
    }
    let mut points = Vec::new();
    let mut max_exact = 0.0f64;
    let mut max_fd = 0.0f64;
    for param in 0..n_params {
        let dv = diagram_derivative(sum, param, rules, registry)?;
        for &offset in &config.grid_offsets {
            let mut theta = base.clone();
            theta[param] += offset;
            let g_diag = eval_any(&dv, &theta, registry)?;
            let (_, g_dual) = dual_eval(sum, param, &theta, registry)?;
            let g_fd = finite_difference(sum, param, &theta, config.h, registry)?;
            let exact_disagreement = g_diag.max_abs_diff(&g_dual);
            let fd_disagreement = g_diag
                .max_abs_diff(&g_fd)
                .max(g_dual.max_abs_diff(&g_fd));
            let pass =
                exact_disagreement <= config.tol_exact && fd_disagreement <= config.tol_fd;
            max_exact = max_exact.max(exact_disagreement);
            max_fd = max_fd.max(fd_disagreement);
            points.push(GradCheckPoint {
                param,
                theta,
                exact_disagreement,
                fd_disagreement,
                pass,
            });
        }
    }
    let pass = points.iter().all(|p| p.pass);
    Ok(GradCheckReport {
        points,
        max_exact_disagreement: max_exact,
        max_fd_disagreement: max_fd,
        pass,
    })
}
