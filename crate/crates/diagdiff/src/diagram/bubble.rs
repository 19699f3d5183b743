//! Bubble colours: named nonlinear functions that can wrap a sum, together
//! with the write-once registry that interpretation and differentiation
//! consult. Registering a colour (and, for chain rules, its derivative
//! colour) is how the box signature gets extended.

use super::{Ob, Ty};
use crate::tensor::{Tensor, TensorError};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

type PointFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;
type TensorFn = Arc<dyn Fn(&Tensor<Complex64>) -> Result<Tensor<Complex64>, TensorError> + Send + Sync>;
type JvpFn = Arc<
    dyn Fn(&Tensor<Complex64>, &Tensor<Complex64>) -> Result<Tensor<Complex64>, TensorError>
        + Send
        + Sync,
>;

/// How a colour acts on the interpreted inner tensor.
#[derive(Clone)]
pub enum ColourKind {
    /// Applied entrywise; `df` is the pointwise derivative, used to lift the
    /// function to dual numbers.
    Pointwise { f: PointFn, df: PointFn },
    /// Applied to the whole tensor; `jvp` is the Jacobian-vector product at
    /// a point along a tangent, used both for dual lifting and for the
    /// derivative of the bubble.
    MatrixLevel { f: TensorFn, jvp: JvpFn },
}

impl fmt::Debug for ColourKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColourKind::Pointwise { .. } => write!(f, "Pointwise"),
            ColourKind::MatrixLevel { .. } => write!(f, "MatrixLevel"),
        }
    }
}

/// How a colour transforms the boundary of the wrapped sum.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ObMap {
    #[default]
    Identity,
    /// Rewrite individual objects, leaving unmapped ones unchanged.
    PerOb(BTreeMap<Ob, Ob>),
    /// Replace the whole boundary type.
    ConstTy(Ty),
}

impl ObMap {
    pub fn apply(&self, ty: &Ty) -> Ty {
        match self {
            ObMap::Identity => ty.clone(),
            ObMap::PerOb(m) => Ty(ty.0.iter().map(|o| *m.get(o).unwrap_or(o)).collect()),
            ObMap::ConstTy(t) => t.clone(),
        }
    }
}

/// A registered bubble colour.
#[derive(Debug, Clone)]
pub struct BubbleColour {
    pub name: String,
    pub kind: ColourKind,
    /// Name of the registered colour that acts as this colour's pointwise
    /// derivative, if any. Matrix-level colours differentiate through their
    /// `jvp` instead.
    pub derivative: Option<String>,
    pub dom_map: ObMap,
    pub cod_map: ObMap,
}

impl BubbleColour {
    pub fn pointwise(
        name: &str,
        f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        df: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        derivative: Option<&str>,
    ) -> Self {
        BubbleColour {
            name: name.to_string(),
            kind: ColourKind::Pointwise {
                f: Arc::new(f),
                df: Arc::new(df),
            },
            derivative: derivative.map(str::to_string),
            dom_map: ObMap::Identity,
            cod_map: ObMap::Identity,
        }
    }

    pub fn matrix_level(
        name: &str,
        f: impl Fn(&Tensor<Complex64>) -> Result<Tensor<Complex64>, TensorError> + Send + Sync + 'static,
        jvp: impl Fn(&Tensor<Complex64>, &Tensor<Complex64>) -> Result<Tensor<Complex64>, TensorError>
            + Send
            + Sync
            + 'static,
    ) -> Self {
        BubbleColour {
            name: name.to_string(),
            kind: ColourKind::MatrixLevel {
                f: Arc::new(f),
                jvp: Arc::new(jvp),
            },
            derivative: None,
            dom_map: ObMap::Identity,
            cod_map: ObMap::Identity,
        }
    }

    pub fn with_cod_map(mut self, m: ObMap) -> Self {
        self.cod_map = m;
        self
    }

    pub fn with_dom_map(mut self, m: ObMap) -> Self {
        self.dom_map = m;
        self
    }
}

/// The colour registry. Populated once during setup and then only read; a
/// name can never be rebound.
#[derive(Debug, Clone, Default)]
pub struct ColourRegistry {
    colours: BTreeMap<String, BubbleColour>,
}

impl ColourRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, colour: BubbleColour) -> Result<(), String> {
        if self.colours.contains_key(&colour.name) {
            return Err(format!("colour {:?} is already registered", colour.name));
        }
        self.colours.insert(colour.name.clone(), colour);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&BubbleColour> {
        self.colours.get(name)
    }

    /// Registry with the stock colours: identity/one/zero, the sigmoid chain
    /// (two derivative levels), ReLU with subgradient 0 at the origin, and
    /// matrix-level softmax.
    pub fn standard() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let sig = move |z: Complex64| one / (one + (-z).exp());
        let dsig = move |z: Complex64| {
            let s = sig(z);
            s * (one - s)
        };
        let ddsig = move |z: Complex64| {
            let s = sig(z);
            s * (one - s) * (one - 2.0 * s)
        };
        let dddsig = move |z: Complex64| {
            let s = sig(z);
            let sp = s * (one - s);
            sp * (one - 2.0 * s) * (one - 2.0 * s) - 2.0 * sp * sp
        };
        let relu = move |z: Complex64| if z.re > 0.0 { z } else { zero };
        let step = move |z: Complex64| if z.re > 0.0 { one } else { zero };

        let mut reg = ColourRegistry::new();
        let mut add = |c: BubbleColour| reg.register(c).expect("stock colours are distinct");
        add(BubbleColour::pointwise("zero", move |_| zero, move |_| zero, Some("zero")));
        add(BubbleColour::pointwise("one", move |_| one, move |_| zero, Some("zero")));
        add(BubbleColour::pointwise("identity", |z| z, move |_| one, Some("one")));
        add(BubbleColour::pointwise("sigmoid", sig, dsig, Some("sigmoid_d")));
        add(BubbleColour::pointwise("sigmoid_d", dsig, ddsig, Some("sigmoid_dd")));
        add(BubbleColour::pointwise("sigmoid_dd", ddsig, dddsig, None));
        add(BubbleColour::pointwise("relu", relu, step, Some("relu_d")));
        add(BubbleColour::pointwise("relu_d", step, move |_| zero, Some("zero")));
        add(BubbleColour::matrix_level("softmax", softmax, softmax_jvp));
        reg
    }

    /// Register a relative-entropy loss `y ↦ Σ y_i·ln(y_i/target_i)` against
    /// a fixed target distribution. The bubble turns a vector into a scalar,
    /// so the codomain collapses to the unit type.
    pub fn register_relative_entropy(
        &mut self,
        name: &str,
        target: Vec<f64>,
    ) -> Result<(), String> {
        let t2 = target.clone();
        let colour = BubbleColour::matrix_level(
            name,
            move |y| {
                check_state(y, target.len())?;
                let mut acc = Complex64::new(0.0, 0.0);
                for (yi, &ti) in y.data.iter().zip(&target) {
                    acc += yi * (yi / ti).ln();
                }
                Ok(Tensor::scalar(acc))
            },
            move |y, v| {
                check_state(y, t2.len())?;
                check_state(v, t2.len())?;
                let mut acc = Complex64::new(0.0, 0.0);
                for ((yi, vi), &ti) in y.data.iter().zip(&v.data).zip(&t2) {
                    acc += vi * ((yi / ti).ln() + 1.0);
                }
                Ok(Tensor::scalar(acc))
            },
        )
        .with_cod_map(ObMap::ConstTy(Ty::unit()));
        self.register(colour)
    }
}

fn check_state(t: &Tensor<Complex64>, n: usize) -> Result<(), TensorError> {
    if t.dom_size() != 1 || t.cod_size() != n {
        return Err(TensorError::Shape(format!(
            "expected a state of dimension {n}, got {:?} → {:?}",
            t.dom_dims, t.cod_dims
        )));
    }
    Ok(())
}

fn softmax(x: &Tensor<Complex64>) -> Result<Tensor<Complex64>, TensorError> {
    if x.dom_size() != 1 {
        return Err(TensorError::Shape(
            "softmax applies to states (no inputs)".into(),
        ));
    }
    let exps: Vec<Complex64> = x.data.iter().map(|z| z.exp()).collect();
    let total: Complex64 = exps.iter().sum();
    Tensor::new(
        x.dom_dims.clone(),
        x.cod_dims.clone(),
        exps.into_iter().map(|e| e / total).collect(),
    )
}

fn softmax_jvp(
    x: &Tensor<Complex64>,
    v: &Tensor<Complex64>,
) -> Result<Tensor<Complex64>, TensorError> {
    let s = softmax(x)?;
    let dot: Complex64 = s.data.iter().zip(&v.data).map(|(a, b)| a * b).sum();
    Tensor::new(
        x.dom_dims.clone(),
        x.cod_dims.clone(),
        s.data.iter().zip(&v.data).map(|(si, vi)| si * (vi - dot)).collect(),
    )
}
