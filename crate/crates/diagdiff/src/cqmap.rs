//! Classical-quantum maps: objects are pairs of dimensions, arrows are
//! `a·b² → c·d²` tensors with indices grouped as (classical, ket, bra).
//! Pure maps enter through doubling `f ↦ f ⊗ f̄`; measurement and encoding
//! mediate between the two worlds; the parameter-shift rule differentiates
//! doubled spiders.

use crate::diagram::{
    BoxKind, ColourRegistry, DiagBox, Diagram, DiagramError, FormalSum, Ob, Term, Ty,
};
use crate::rig::{Conjugate, Dual, Rig};
use crate::tensor::interp::{
    box_tensor, spider_tensor, swap_tensor, EvalCtx, EvalScalar, InterpretError,
};
use crate::tensor::{kron, mat_compose, Tensor, TensorError};
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CqError {
    #[error("shift {s} is inconsistent with eigenvalue magnitude {r}: need s = π/(4r)")]
    InconsistentShift { r: f64, s: f64 },
    #[error("eigenvalue magnitude must be positive, got {0}")]
    NonPositiveEigenvalue(f64),
    #[error("dimension must be at least 1")]
    ZeroDim,
    #[error("cq mismatch: {0}")]
    Dim(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// An object of the classical-quantum category: a classical dimension paired
/// with a quantum one. The unit is (1, 1) and tensoring multiplies pointwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CQDim {
    pub classical: usize,
    pub quantum: usize,
}

impl CQDim {
    pub fn new(classical: usize, quantum: usize) -> Self {
        CQDim { classical, quantum }
    }

    pub fn unit() -> Self {
        CQDim::new(1, 1)
    }

    pub fn tensor(&self, rhs: &CQDim) -> CQDim {
        CQDim::new(self.classical * rhs.classical, self.quantum * rhs.quantum)
    }

    /// Underlying tensor axes: classical, ket copy, bra copy.
    pub fn dims(&self) -> Vec<usize> {
        vec![self.classical, self.quantum, self.quantum]
    }

    pub fn total(&self) -> usize {
        self.classical * self.quantum * self.quantum
    }
}

/// The classical-quantum dimensions of a wire list: qubit wires contribute to
/// the quantum factor, everything else to the classical one.
pub fn cq_dim_of(ty: &Ty) -> CQDim {
    let mut dim = CQDim::unit();
    for ob in &ty.0 {
        if ob.is_classical() {
            dim.classical *= ob.dim();
        } else {
            dim.quantum *= ob.dim();
        }
    }
    dim
}

/// A classical-quantum map: tensor from `dom.total()` to `cod.total()` with
/// axes in (classical, ket, bra) order on each side.
#[derive(Debug, Clone, PartialEq)]
pub struct CQMap<S: Rig = Complex64> {
    pub dom: CQDim,
    pub cod: CQDim,
    pub tensor: Tensor<S>,
}

impl<S: Rig> CQMap<S> {
    pub fn new(dom: CQDim, cod: CQDim, tensor: Tensor<S>) -> Result<Self, CqError> {
        if tensor.dom_dims != dom.dims() || tensor.cod_dims != cod.dims() {
            return Err(CqError::Dim(format!(
                "tensor axes {:?}→{:?} do not match cq dims {:?}→{:?}",
                tensor.dom_dims,
                tensor.cod_dims,
                dom.dims(),
                cod.dims()
            )));
        }
        Ok(CQMap { dom, cod, tensor })
    }

    pub fn identity(dim: CQDim) -> Self {
        CQMap {
            dom: dim,
            cod: dim,
            tensor: Tensor::identity(dim.dims()),
        }
    }

    pub fn scalar(value: S) -> Self {
        let unit = CQDim::unit();
        CQMap {
            dom: unit,
            cod: unit,
            tensor: Tensor {
                dom_dims: unit.dims(),
                cod_dims: unit.dims(),
                data: vec![value],
            },
        }
    }

    /// Wrap a purely classical map (quantum dimension 1 on both sides).
    pub fn classical(t: &Tensor<S>) -> Self {
        let dom = CQDim::new(t.dom_size(), 1);
        let cod = CQDim::new(t.cod_size(), 1);
        CQMap {
            dom,
            cod,
            tensor: Tensor {
                dom_dims: dom.dims(),
                cod_dims: cod.dims(),
                data: t.data.clone(),
            },
        }
    }

    /// Sequential composition `self ⨾ rhs`.
    pub fn compose(&self, rhs: &CQMap<S>) -> Result<CQMap<S>, CqError> {
        if self.cod != rhs.dom {
            return Err(CqError::Dim(format!(
                "cannot compose: codomain {:?} vs domain {:?}",
                self.cod, rhs.dom
            )));
        }
        Ok(CQMap {
            dom: self.dom,
            cod: rhs.cod,
            tensor: mat_compose(&self.tensor, &rhs.tensor)?,
        })
    }

    /// Monoidal product: kron of the underlying tensors followed by the
    /// permutation regrouping axes to (classical·classical, ket·ket, bra·bra).
    pub fn cq_tensor(&self, rhs: &CQMap<S>) -> CQMap<S> {
        let k = kron(&self.tensor, &rhs.tensor);
        let perm = [0usize, 3, 1, 4, 2, 5];
        let p = k.permute(&perm, &perm).expect("six axes by construction");
        let dom = self.dom.tensor(&rhs.dom);
        let cod = self.cod.tensor(&rhs.cod);
        CQMap {
            dom,
            cod,
            tensor: Tensor {
                dom_dims: dom.dims(),
                cod_dims: cod.dims(),
                data: p.data,
            },
        }
    }

    pub fn add(&self, rhs: &CQMap<S>) -> Result<CQMap<S>, CqError> {
        if self.dom != rhs.dom || self.cod != rhs.cod {
            return Err(CqError::Dim("sum of maps with different cq dims".into()));
        }
        Ok(CQMap {
            dom: self.dom,
            cod: self.cod,
            tensor: self.tensor.add(&rhs.tensor)?,
        })
    }

    pub fn scale(&self, s: &S) -> CQMap<S> {
        CQMap {
            dom: self.dom,
            cod: self.cod,
            tensor: self.tensor.scale(s),
        }
    }
}

/// Lift a pure map to the classical-quantum world by tensoring with its
/// conjugate, ket copy major: `double(f) = f ⊗ f̄`.
pub fn double<S: Rig + Conjugate>(f: &Tensor<S>) -> CQMap<S> {
    let k = kron(f, &f.conj());
    let dom = CQDim::new(1, f.dom_size());
    let cod = CQDim::new(1, f.cod_size());
    CQMap {
        dom,
        cod,
        tensor: Tensor {
            dom_dims: dom.dims(),
            cod_dims: cod.dims(),
            data: k.data,
        },
    }
}

/// Measurement `M_a = Σ_i |i⟩⟨i,i|`: quantum dimension `a` in, classical
/// dimension `a` out.
pub fn measure_map<S: Rig>(a: usize) -> Result<CQMap<S>, CqError> {
    if a == 0 {
        return Err(CqError::ZeroDim);
    }
    let dom = CQDim::new(1, a);
    let cod = CQDim::new(a, 1);
    let mut t = Tensor::zeros(dom.dims(), cod.dims());
    for i in 0..a {
        t.set(i, i * a + i, S::one());
    }
    Ok(CQMap { dom, cod, tensor: t })
}

/// Encoding `E_a = Σ_i |i,i⟩⟨i|`: classical in, quantum out.
pub fn encode_map<S: Rig>(a: usize) -> Result<CQMap<S>, CqError> {
    if a == 0 {
        return Err(CqError::ZeroDim);
    }
    let dom = CQDim::new(a, 1);
    let cod = CQDim::new(1, a);
    let mut t = Tensor::zeros(dom.dims(), cod.dims());
    for i in 0..a {
        t.set(i * a + i, i, S::one());
    }
    Ok(CQMap { dom, cod, tensor: t })
}

/// The parameter-shift rule for doubled one-parameter boxes: the doubled
/// family has generator eigenvalue gaps in `{0, ±2r}`, and the shift is
/// `s = π/(4r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftRule {
    r: f64,
    s: f64,
}

impl ShiftRule {
    /// Rule for a given eigenvalue magnitude, with the shift it dictates.
    pub fn from_eigenvalue(r: f64) -> Result<Self, CqError> {
        if r <= 0.0 {
            return Err(CqError::NonPositiveEigenvalue(r));
        }
        Ok(ShiftRule { r, s: PI / (4.0 * r) })
    }

    /// Validate an explicitly supplied (r, s) pair.
    pub fn checked(r: f64, s: f64) -> Result<Self, CqError> {
        let rule = ShiftRule::from_eigenvalue(r)?;
        if (s - rule.s).abs() > 1e-9 {
            return Err(CqError::InconsistentShift { r, s });
        }
        Ok(rule)
    }

    /// The rule matching our spider convention: the doubled spider's phase
    /// gaps are `0, ±1` per unit of phase, so `r = 1/2` and `s = π/2`.
    pub fn for_spiders() -> Self {
        ShiftRule { r: 0.5, s: PI / 2.0 }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn s(&self) -> f64 {
        self.s
    }
}

/// Differentiate a doubled spider by the parameter-shift rule:
/// `(∂α·r)·double(Z(α+s)) − (∂α·r)·double(Z(α−s))`. Accepts the doubled box
/// or the bare pure spider; the output is always a sum of doubled boxes.
pub fn shift_rule_derivative(
    bx: &DiagBox,
    param: usize,
    rule: &ShiftRule,
) -> Result<FormalSum, CqError> {
    let inner = match &bx.kind {
        BoxKind::Doubled(inner) => inner.as_ref(),
        BoxKind::Spider { ob: Ob::Qubit, .. } => bx,
        _ => {
            return Err(CqError::Dim(format!(
                "the shift rule applies to doubled spiders, not {}",
                bx.name()
            )))
        }
    };
    let (m, n, phase) = match &inner.kind {
        BoxKind::Spider {
            m,
            n,
            phase,
            ob: Ob::Qubit,
        } => (*m, *n, phase),
        _ => {
            return Err(CqError::Dim(format!(
                "the shift rule applies to doubled spiders, not {}",
                inner.name()
            )))
        }
    };
    let coeff = phase.partial(param) * rule.r;
    if coeff == 0.0 {
        return Ok(FormalSum::zero(bx.dom.clone(), bx.cod.clone()));
    }
    let shifted = |s: f64| -> Result<Diagram, CqError> {
        let spider = DiagBox::z_spider(m, n, phase.shifted(s));
        Ok(Diagram::from_box(DiagBox::doubled(spider)?))
    };
    Ok(FormalSum::from_terms(
        bx.dom.clone(),
        bx.cod.clone(),
        vec![
            Term {
                coeff: Complex64::new(coeff, 0.0),
                diagram: shifted(rule.s)?,
            },
            Term {
                coeff: Complex64::new(-coeff, 0.0),
                diagram: shifted(-rule.s)?,
            },
        ],
    )?)
}

/// Replace every box of a pure diagram by its doubled counterpart.
pub fn double_diagram(d: &Diagram) -> Result<Diagram, DiagramError> {
    let mut out = Diagram::id(d.dom().clone());
    for layer in d.layers() {
        out = out.then_at(layer.offset, DiagBox::doubled(layer.bx.clone())?)?;
    }
    Ok(out)
}

fn cq_box_map<S: EvalScalar + Conjugate>(
    bx: &DiagBox,
    ctx: &EvalCtx,
    registry: &ColourRegistry,
) -> Result<CQMap<S>, InterpretError> {
    match &bx.kind {
        BoxKind::Doubled(inner) => Ok(double(&box_tensor::<S>(inner, ctx, registry)?)),
        BoxKind::Measure => Ok(measure_map(2).expect("positive dimension")),
        BoxKind::Encode => Ok(encode_map(2).expect("positive dimension")),
        BoxKind::Spider { m, n, ob, .. } if ob.is_classical() => {
            let coeffs = vec![S::one(); ob.dim()];
            Ok(CQMap::classical(&spider_tensor(*m, *n, &coeffs)))
        }
        BoxKind::AffineMap { entries, .. } => {
            let data = entries
                .iter()
                .map(|e| S::affine(e, ctx))
                .collect::<Result<Vec<_>, _>>()?;
            let t = Tensor::new(bx.dom.dims(), bx.cod.dims(), data)?;
            Ok(CQMap::classical(&t))
        }
        BoxKind::Swap { a, b } => match (a.is_classical(), b.is_classical()) {
            (true, true) => Ok(CQMap::classical(&swap_tensor(a.dim(), b.dim()))),
            (false, false) => Ok(double(&swap_tensor::<S>(a.dim(), b.dim()))),
            // A classical wire passing a quantum one: the regrouped
            // representation already separates the two, so nothing moves.
            _ => Ok(CQMap::identity(cq_dim_of(&bx.dom))),
        },
        BoxKind::Scalar(z) => Ok(CQMap::scalar(S::constant(*z))),
        BoxKind::Bubble { colour, inner } => {
            let col = registry
                .get(colour)
                .ok_or_else(|| InterpretError::UnregisteredColour(colour.clone()))?;
            let m = cq_interpret_in::<S>(inner, ctx, registry)?;
            let out = S::apply_colour(&col.kind, &m.tensor)?;
            cq_reshape(out, bx, colour)
        }
        BoxKind::BubbleJvp {
            colour,
            point,
            tangent,
        } => {
            let col = registry
                .get(colour)
                .ok_or_else(|| InterpretError::UnregisteredColour(colour.clone()))?;
            let p = cq_interpret_in::<S>(point, ctx, registry)?;
            let tg = cq_interpret_in::<S>(tangent, ctx, registry)?;
            let out = S::apply_jvp(&col.kind, &p.tensor, &tg.tensor)?;
            cq_reshape(out, bx, colour)
        }
        BoxKind::Spider { .. } | BoxKind::Hadamard | BoxKind::Green { .. } => {
            Err(InterpretError::PureInCq(bx.name()))
        }
        BoxKind::Plain { name } => Err(InterpretError::NoInterpretation(name.clone())),
    }
}

fn cq_reshape<S: Rig>(
    t: Tensor<S>,
    bx: &DiagBox,
    colour: &str,
) -> Result<CQMap<S>, InterpretError> {
    let dom = cq_dim_of(&bx.dom);
    let cod = cq_dim_of(&bx.cod);
    if t.data.len() != dom.total() * cod.total() {
        return Err(InterpretError::ColourShape {
            colour: colour.to_string(),
            got: t.data.len(),
            want: dom.total() * cod.total(),
        });
    }
    Ok(CQMap {
        dom,
        cod,
        tensor: Tensor {
            dom_dims: dom.dims(),
            cod_dims: cod.dims(),
            data: t.data,
        },
    })
}

fn cq_interpret_diagram<S: EvalScalar + Conjugate>(
    d: &Diagram,
    ctx: &EvalCtx,
    registry: &ColourRegistry,
) -> Result<CQMap<S>, InterpretError> {
    let mut wires: Vec<Ob> = d.dom().0.clone();
    let mut cur: CQMap<S> = CQMap::identity(cq_dim_of(d.dom()));
    for layer in d.layers() {
        let bm = cq_box_map(&layer.bx, ctx, registry)?;
        let m = layer.bx.dom.len();
        let left = CQMap::identity(cq_dim_of(&Ty(wires[..layer.offset].to_vec())));
        let right = CQMap::identity(cq_dim_of(&Ty(wires[layer.offset + m..].to_vec())));
        let layer_map = left.cq_tensor(&bm).cq_tensor(&right);
        cur = cur
            .compose(&layer_map)
            .map_err(|e| InterpretError::Unsupported {
                what: format!("ill-formed cq layer: {e}"),
                rig: S::RIG_NAME,
            })?;
        let mut next = wires[..layer.offset].to_vec();
        next.extend_from_slice(&layer.bx.cod.0);
        next.extend_from_slice(&wires[layer.offset + m..]);
        wires = next;
    }
    Ok(cur)
}

/// Interpret a formal sum in the classical-quantum world.
pub fn cq_interpret_in<S: EvalScalar + Conjugate>(
    sum: &FormalSum,
    ctx: &EvalCtx,
    registry: &ColourRegistry,
) -> Result<CQMap<S>, InterpretError> {
    let dom = cq_dim_of(&sum.dom);
    let cod = cq_dim_of(&sum.cod);
    let mut acc: CQMap<S> = CQMap {
        dom,
        cod,
        tensor: Tensor::zeros(dom.dims(), cod.dims()),
    };
    for term in sum.terms() {
        let m = cq_interpret_diagram::<S>(&term.diagram, ctx, registry)?;
        acc = acc
            .add(&m.scale(&S::constant(term.coeff)))
            .map_err(|e| InterpretError::Unsupported {
                what: format!("mismatched cq term: {e}"),
                rig: S::RIG_NAME,
            })?;
    }
    Ok(acc)
}

pub fn cq_interpret(
    sum: &FormalSum,
    theta: &[f64],
    registry: &ColourRegistry,
) -> Result<CQMap<Complex64>, InterpretError> {
    cq_interpret_in(sum, &EvalCtx::at(theta), registry)
}

pub fn cq_interpret_dual(
    sum: &FormalSum,
    theta: &[f64],
    seed: usize,
    scale: f64,
    registry: &ColourRegistry,
) -> Result<CQMap<Dual<Complex64>>, InterpretError> {
    cq_interpret_in(sum, &EvalCtx::seeded(theta, seed, scale), registry)
}

/// Split a dual-valued cq map into its value and tangent parts.
pub fn split_dual_cq(m: &CQMap<Dual<Complex64>>) -> (CQMap<Complex64>, CQMap<Complex64>) {
    let (value, tangent) = crate::tensor::split_dual(&m.tensor);
    (
        CQMap {
            dom: m.dom,
            cod: m.cod,
            tensor: value,
        },
        CQMap {
            dom: m.dom,
            cod: m.cod,
            tensor: tangent,
        },
    )
}

/// How far a cq map is from completely positive: the most negative pivot met
/// while factoring the Choi matrix of each classical block, clamped at zero.
/// A defect within tolerance of zero means no violation was detected; the
/// category deliberately admits maps where this is large.
pub fn cp_defect(m: &CQMap<Complex64>) -> f64 {
    let b = m.dom.quantum;
    let d = m.cod.quantum;
    let side = b * d;
    let mut worst: f64 = 0.0;
    for o in 0..m.cod.classical {
        for i in 0..m.dom.classical {
            // Choi matrix C[(k,x),(l,y)] = T[(o,x,y), (i,k,l)].
            let mut choi = vec![vec![Complex64::new(0.0, 0.0); side]; side];
            for k in 0..b {
                for l in 0..b {
                    for x in 0..d {
                        for y in 0..d {
                            let cod_flat = (o * d + x) * d + y;
                            let dom_flat = (i * b + k) * b + l;
                            choi[k * d + x][l * d + y] = *m.tensor.get(cod_flat, dom_flat);
                        }
                    }
                }
            }
            worst = worst.max((-hermitian_min_pivot(&mut choi)).max(0.0));
        }
    }
    worst
}

/// Smallest pivot encountered by diagonally-pivoted Cholesky elimination; for
/// a positive semidefinite matrix this never goes meaningfully below zero.
fn hermitian_min_pivot(a: &mut [Vec<Complex64>]) -> f64 {
    let n = a.len();
    let mut active: Vec<usize> = (0..n).collect();
    let mut min_pivot = f64::INFINITY;
    while !active.is_empty() {
        let (pos, &p) = active
            .iter()
            .enumerate()
            .max_by(|(_, &x), (_, &y)| a[x][x].re.total_cmp(&a[y][y].re))
            .expect("non-empty");
        let d = a[p][p].re;
        if d <= 1e-13 {
            // No usable pivot left. A semidefinite remainder must be ~zero
            // throughout; bound the minimum eigenvalue from the diagonal and
            // from every 2×2 principal submatrix (eigenvalue interlacing), so
            // off-diagonal mass over a flat diagonal is still detected.
            for (pos_q, &q) in active.iter().enumerate() {
                min_pivot = min_pivot.min(a[q][q].re);
                for &r in &active[pos_q + 1..] {
                    let (aa, cc) = (a[q][q].re, a[r][r].re);
                    let mid = (aa + cc) / 2.0;
                    let rad = (((aa - cc) / 2.0).powi(2) + a[q][r].norm_sqr()).sqrt();
                    min_pivot = min_pivot.min(mid - rad);
                }
            }
            break;
        }
        min_pivot = min_pivot.min(d);
        active.remove(pos);
        for &q in &active {
            for &r in &active {
                let upd = a[q][p] * a[r][p].conj() / Complex64::new(d, 0.0);
                a[q][r] -= upd;
            }
        }
    }
    if min_pivot == f64::INFINITY {
        0.0
    } else {
        min_pivot
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rig::PhaseExpr;
    use crate::tensor::interp::interpret;
    use crate::zx;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reg() -> ColourRegistry {
        ColourRegistry::standard()
    }

    fn ket0() -> Tensor<Complex64> {
        Tensor::new(vec![], vec![2], vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap()
    }

    fn ket_plus() -> Tensor<Complex64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Tensor::new(vec![], vec![2], vec![c(h, 0.0), c(h, 0.0)]).unwrap()
    }

    #[test]
    fn double_identity_is_identity() {
        let d = double(&Tensor::<Complex64>::identity(vec![2]));
        assert_eq!(d.dom, CQDim::new(1, 2));
        let want = Tensor::identity(vec![1, 2, 2]);
        assert!(d.tensor.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn double_squares_scalars_in_magnitude() {
        let s = Tensor::scalar(c(0.0, 2.0));
        let d = double(&s);
        assert!((d.tensor.data[0] - c(4.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn doubling_forgets_global_phase() {
        let f = Tensor::new(
            vec![2],
            vec![2],
            vec![c(0.3, 0.1), c(0.0, 0.7), c(-0.2, 0.0), c(0.5, -0.4)],
        )
        .unwrap();
        let phase = Complex64::from_polar(1.0, 1.234);
        let lhs = double(&f.scale(&phase));
        let rhs = double(&f);
        assert!(lhs.tensor.max_abs_diff(&rhs.tensor) < 1e-15);
    }

    #[test]
    fn doubling_is_not_additive() {
        let id2 = Tensor::<Complex64>::identity(vec![2]);
        let lhs = double(&id2.scale(&c(2.0, 0.0)));
        let rhs = double(&id2).scale(&c(2.0, 0.0));
        let diff = lhs.tensor.sub(&rhs.tensor).unwrap();
        // 4·I − 2·I = 2·I exactly.
        assert!((diff.max_abs() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn identity_composes_neutrally() {
        let m = measure_map::<Complex64>(3).unwrap();
        let pre = CQMap::identity(m.dom).compose(&m).unwrap();
        let post = m.compose(&CQMap::identity(m.cod)).unwrap();
        assert_eq!(pre, m);
        assert_eq!(post, m);
    }

    #[test]
    fn tensor_of_classical_maps_is_plain_kron() {
        let f = Tensor::new(vec![2], vec![2], vec![c(1.0, 0.0); 4]).unwrap();
        let g = Tensor::new(
            vec![3],
            vec![2],
            vec![
                c(0.0, 0.0),
                c(1.0, 0.0),
                c(2.0, 0.0),
                c(3.0, 0.0),
                c(4.0, 0.0),
                c(5.0, 0.0),
            ],
        )
        .unwrap();
        let lhs = CQMap::classical(&f).cq_tensor(&CQMap::classical(&g));
        let want = kron(&f, &g);
        assert_eq!(lhs.tensor.data, want.data);
    }

    #[test]
    fn tensor_of_doubles_is_double_of_kron() {
        let a = Tensor::new(
            vec![2],
            vec![2],
            vec![c(0.6, 0.1), c(-0.2, 0.4), c(0.9, 0.0), c(0.3, -0.5)],
        )
        .unwrap();
        let b = Tensor::new(
            vec![2],
            vec![2],
            vec![c(0.1, -0.3), c(0.8, 0.2), c(-0.4, 0.6), c(0.0, 0.7)],
        )
        .unwrap();
        let lhs = double(&a).cq_tensor(&double(&b));
        let rhs = double(&kron(&a, &b));
        assert!(lhs.tensor.max_abs_diff(&rhs.tensor) < 1e-13);
        assert_eq!(lhs.dom, rhs.dom);
    }

    #[test]
    fn measuring_plus_state_gives_uniform_distribution() {
        let state = double(&ket_plus());
        let probs = state.compose(&measure_map(2).unwrap()).unwrap();
        assert!((probs.tensor.get(0, 0) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((probs.tensor.get(1, 0) - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn measuring_basis_state_is_deterministic() {
        let probs = double(&ket0()).compose(&measure_map(2).unwrap()).unwrap();
        assert_eq!(probs.tensor.get(0, 0), &c(1.0, 0.0));
        assert_eq!(probs.tensor.get(1, 0), &c(0.0, 0.0));
    }

    #[test]
    fn encode_then_measure_is_classical_identity() {
        let e = encode_map::<Complex64>(3).unwrap();
        let m = measure_map::<Complex64>(3).unwrap();
        let em = e.compose(&m).unwrap();
        assert!(em.tensor.max_abs_diff(&Tensor::identity(vec![3, 1, 1])) < 1e-15);
    }

    #[test]
    fn zero_dimension_is_rejected() {
        assert!(measure_map::<Complex64>(0).is_err());
        assert!(encode_map::<Complex64>(0).is_err());
    }

    #[test]
    fn shift_rule_consistency_is_validated() {
        assert!(ShiftRule::checked(0.5, PI / 2.0).is_ok());
        assert!(matches!(
            ShiftRule::checked(0.5, PI / 4.0),
            Err(CqError::InconsistentShift { .. })
        ));
        assert!(ShiftRule::from_eigenvalue(-1.0).is_err());
        assert!((ShiftRule::from_eigenvalue(1.0).unwrap().s() - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn shift_rule_matches_finite_differences_on_doubled_spider() {
        let bx = DiagBox::doubled(DiagBox::z_spider(1, 1, PhaseExpr::theta(0))).unwrap();
        let sum = FormalSum::from_diagram(Diagram::from_box(bx.clone()));
        let d = shift_rule_derivative(&bx, 0, &ShiftRule::for_spiders()).unwrap();
        let theta = [0.37];
        let exact = cq_interpret(&d, &theta, &reg()).unwrap();
        let h = 1e-5;
        let up = cq_interpret(&sum, &[theta[0] + h], &reg()).unwrap();
        let dn = cq_interpret(&sum, &[theta[0] - h], &reg()).unwrap();
        let fd = up
            .tensor
            .sub(&dn.tensor)
            .unwrap()
            .scale(&c(1.0 / (2.0 * h), 0.0));
        assert!(exact.tensor.max_abs_diff(&fd) < 1e-8);
    }

    #[test]
    fn wrong_eigenvalue_magnitude_fails_numerically() {
        let bx = DiagBox::doubled(DiagBox::z_spider(1, 1, PhaseExpr::theta(0))).unwrap();
        let sum = FormalSum::from_diagram(Diagram::from_box(bx.clone()));
        let wrong = ShiftRule::from_eigenvalue(1.0).unwrap();
        let d = shift_rule_derivative(&bx, 0, &wrong).unwrap();
        let theta = [0.37];
        let got = cq_interpret(&d, &theta, &reg()).unwrap();
        let h = 1e-5;
        let up = cq_interpret(&sum, &[theta[0] + h], &reg()).unwrap();
        let dn = cq_interpret(&sum, &[theta[0] - h], &reg()).unwrap();
        let fd = up
            .tensor
            .sub(&dn.tensor)
            .unwrap()
            .scale(&c(1.0 / (2.0 * h), 0.0));
        assert!(got.tensor.max_abs_diff(&fd) > 1e-3);
    }

    #[test]
    fn constant_phase_spider_has_zero_shift_derivative() {
        let bx = DiagBox::doubled(DiagBox::z_spider(1, 1, PhaseExpr::constant(0.9))).unwrap();
        let d = shift_rule_derivative(&bx, 0, &ShiftRule::for_spiders()).unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn shift_scaling_follows_affine_coefficient() {
        let bx =
            DiagBox::doubled(DiagBox::z_spider(1, 1, PhaseExpr::constant(0.2).plus_theta(0, 2.0)))
                .unwrap();
        let d = shift_rule_derivative(&bx, 0, &ShiftRule::for_spiders()).unwrap();
        assert_eq!(d.terms()[0].coeff, c(1.0, 0.0));
        let theta = [0.11];
        let exact = cq_interpret(&d, &theta, &reg()).unwrap();
        let sum = FormalSum::from_diagram(Diagram::from_box(bx));
        let h = 1e-5;
        let up = cq_interpret(&sum, &[theta[0] + h], &reg()).unwrap();
        let dn = cq_interpret(&sum, &[theta[0] - h], &reg()).unwrap();
        let fd = up
            .tensor
            .sub(&dn.tensor)
            .unwrap()
            .scale(&c(1.0 / (2.0 * h), 0.0));
        assert!(exact.tensor.max_abs_diff(&fd) < 1e-8);
    }

    #[test]
    fn pure_derivative_does_not_lift_through_doubling() {
        // interpret(double(∂f)) vs ∂(interpret(double(f))) for f = Rz(θ).
        let theta = [0.3];
        let spider = DiagBox::z_spider(1, 1, PhaseExpr::theta(0));
        let pure_dv = interpret(&zx::spider_derivative(&spider, 0).unwrap(), &theta, &reg()).unwrap();
        let doubled_of_derivative = double(&pure_dv);

        let bx = DiagBox::doubled(spider).unwrap();
        let sum = FormalSum::from_diagram(Diagram::from_box(bx.clone()));
        let true_dv = cq_interpret(
            &shift_rule_derivative(&bx, 0, &ShiftRule::for_spiders()).unwrap(),
            &theta,
            &reg(),
        )
        .unwrap();
        // Sanity: the shift rule matches the dual-number derivative.
        let (_, tangent) = split_dual_cq(&cq_interpret_dual(&sum, &theta, 0, 1.0, &reg()).unwrap());
        assert!(true_dv.tensor.max_abs_diff(&tangent.tensor) < 1e-10);
        // And the naive lift differs from it by a clear margin.
        assert!(
            doubled_of_derivative
                .tensor
                .max_abs_diff(&true_dv.tensor)
                > 1e-3
        );
    }

    #[test]
    fn functor_evaluates_bell_circuit_probabilities() {
        // |00⟩ prepared, H on wire 0, CNOT, both wires measured.
        let prep1 = zx::x_spider(0, 1, PhaseExpr::constant(0.0))
            .tensor(&Diagram::from_box(DiagBox::scalar(c(
                std::f64::consts::FRAC_1_SQRT_2,
                0.0,
            ))));
        let prep = prep1.tensor(&prep1);
        let h0 = Diagram::from_box(DiagBox::hadamard()).tensor(&Diagram::id(Ty::qubits(1)));
        let pure = prep.compose(&h0).unwrap().compose(&zx::cnot()).unwrap();
        let mut cq = double_diagram(&pure).unwrap();
        cq = cq.then_at(0, DiagBox::measure()).unwrap();
        cq = cq.then_at(1, DiagBox::measure()).unwrap();
        let m = cq_interpret(&FormalSum::from_diagram(cq), &[], &reg()).unwrap();
        assert_eq!(m.cod, CQDim::new(4, 1));
        let want = [0.5, 0.0, 0.0, 0.5];
        for (k, w) in want.iter().enumerate() {
            assert!(
                (m.tensor.get(k, 0) - c(*w, 0.0)).norm() < 1e-12,
                "entry {k}: {:?}",
                m.tensor.get(k, 0)
            );
        }
    }

    #[test]
    fn doubled_unitary_with_measurement_normalises() {
        let prep1 = zx::x_spider(0, 1, PhaseExpr::constant(0.0))
            .tensor(&Diagram::from_box(DiagBox::scalar(c(
                std::f64::consts::FRAC_1_SQRT_2,
                0.0,
            ))));
        let prep = prep1.tensor(&prep1);
        let circuit = zx::rz(PhaseExpr::theta(0)).tensor(&zx::rx(PhaseExpr::theta(1)));
        let pure = prep.compose(&circuit).unwrap().compose(&zx::cnot()).unwrap();
        let mut cq = double_diagram(&pure).unwrap();
        cq = cq.then_at(0, DiagBox::measure()).unwrap();
        cq = cq.then_at(1, DiagBox::measure()).unwrap();
        let m = cq_interpret(&FormalSum::from_diagram(cq), &[0.613, -1.27], &reg()).unwrap();
        let total: Complex64 = (0..4).map(|k| m.tensor.get(k, 0)).sum();
        assert!((total - c(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn classical_quantum_swap_is_identity_on_the_representation() {
        let bx = DiagBox::swap(Ob::Bit, Ob::Qubit);
        let m = cq_interpret(
            &FormalSum::from_diagram(Diagram::from_box(bx)),
            &[],
            &reg(),
        )
        .unwrap();
        assert!(m.tensor.max_abs_diff(&Tensor::identity(vec![2, 2, 2])) < 1e-15);
    }

    #[test]
    fn bare_pure_boxes_are_rejected_by_the_cq_functor() {
        let sum = FormalSum::from_diagram(Diagram::from_box(DiagBox::hadamard()));
        assert!(matches!(
            cq_interpret(&sum, &[], &reg()),
            Err(InterpretError::PureInCq(_))
        ));
    }

    #[test]
    fn encode_box_round_trips_through_measure_box() {
        let d = Diagram::from_box(DiagBox::encode())
            .compose(&Diagram::from_box(DiagBox::measure()))
            .unwrap();
        let m = cq_interpret(&FormalSum::from_diagram(d), &[], &reg()).unwrap();
        assert!(m.tensor.max_abs_diff(&Tensor::identity(vec![2, 1, 1])) < 1e-15);
    }

    #[test]
    fn doubled_unitaries_have_zero_cp_defect() {
        let pure = zx::rz(PhaseExpr::constant(0.77));
        let m = cq_interpret(
            &FormalSum::from_diagram(double_diagram(&pure).unwrap()),
            &[],
            &reg(),
        )
        .unwrap();
        assert!(cp_defect(&m) < 1e-12);
    }

    #[test]
    fn cp_defect_flags_a_transpose_like_map() {
        // The swap-as-Choi map (the transpose channel) is positive but not
        // completely positive; its Choi matrix has a −1 eigenvalue.
        let mut t = Tensor::zeros(vec![1, 2, 2], vec![1, 2, 2]);
        for k in 0..2 {
            for l in 0..2 {
                // transpose: output (x,y) = input (y,x)
                t.set(l * 2 + k, k * 2 + l, c(1.0, 0.0));
            }
        }
        let m = CQMap::new(CQDim::new(1, 2), CQDim::new(1, 2), t).unwrap();
        assert!(cp_defect(&m) > 0.5);
    }

    #[test]
    fn shift_rule_rejects_non_spiders() {
        let bx = DiagBox::doubled(DiagBox::hadamard()).unwrap();
        assert!(shift_rule_derivative(&bx, 0, &ShiftRule::for_spiders()).is_err());
    }
}
