//! Dense tensors over a commutative rig, stored as matrices from a product
//! of domain dimensions to a product of codomain dimensions.

mod expm;
pub mod interp;

pub use expm::matrix_exp;

use crate::rig::{Conjugate, Dual, Rig, RingNeg};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("dimension mismatch: {0}")]
    Shape(String),
}

/// A dense tensor of rig elements. `data` is row-major with the codomain
/// multi-index major and the domain multi-index minor, i.e. entry
/// `(j, i)` lives at `j * dom_size + i` where `j` flattens `cod_dims` and
/// `i` flattens `dom_dims` (first listed dimension most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<S> {
    pub dom_dims: Vec<usize>,
    pub cod_dims: Vec<usize>,
    pub data: Vec<S>,
}

fn size(dims: &[usize]) -> usize {
    dims.iter().product()
}

impl<S: Rig> Tensor<S> {
    pub fn new(dom_dims: Vec<usize>, cod_dims: Vec<usize>, data: Vec<S>) -> Result<Self, TensorError> {
        if data.len() != size(&dom_dims) * size(&cod_dims) {
            return Err(TensorError::Shape(format!(
                "data length {} does not match dom {:?} × cod {:?}",
                data.len(),
                dom_dims,
                cod_dims
            )));
        }
        Ok(Tensor {
            dom_dims,
            cod_dims,
            data,
        })
    }

    pub fn zeros(dom_dims: Vec<usize>, cod_dims: Vec<usize>) -> Self {
        let n = size(&dom_dims) * size(&cod_dims);
        Tensor {
            dom_dims,
            cod_dims,
            data: vec![S::zero(); n],
        }
    }

    /// Identity on the listed dimensions.
    pub fn identity(dims: Vec<usize>) -> Self {
        let n = size(&dims);
        let mut t = Tensor::zeros(dims.clone(), dims);
        for i in 0..n {
            t.data[i * n + i] = S::one();
        }
        t
    }

    /// The 1×1 tensor holding one scalar.
    pub fn scalar(s: S) -> Self {
        Tensor {
            dom_dims: vec![],
            cod_dims: vec![],
            data: vec![s],
        }
    }

    pub fn dom_size(&self) -> usize {
        size(&self.dom_dims)
    }

    pub fn cod_size(&self) -> usize {
        size(&self.cod_dims)
    }

    pub fn get(&self, cod: usize, dom: usize) -> &S {
        &self.data[cod * self.dom_size() + dom]
    }

    pub fn set(&mut self, cod: usize, dom: usize, v: S) {
        let n = self.dom_size();
        self.data[cod * n + dom] = v;
    }

    /// Entrywise sum; shapes must agree.
    pub fn add(&self, rhs: &Self) -> Result<Self, TensorError> {
        self.same_shape(rhs)?;
        Ok(Tensor {
            dom_dims: self.dom_dims.clone(),
            cod_dims: self.cod_dims.clone(),
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    /// Entrywise (Hadamard) product; shapes must agree.
    pub fn entrywise(&self, rhs: &Self) -> Result<Self, TensorError> {
        self.same_shape(rhs)?;
        Ok(Tensor {
            dom_dims: self.dom_dims.clone(),
            cod_dims: self.cod_dims.clone(),
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.mul(b))
                .collect(),
        })
    }

    /// Multiply every entry by a scalar.
    pub fn scale(&self, s: &S) -> Self {
        Tensor {
            dom_dims: self.dom_dims.clone(),
            cod_dims: self.cod_dims.clone(),
            data: self.data.iter().map(|a| a.mul(s)).collect(),
        }
    }

    fn same_shape(&self, rhs: &Self) -> Result<(), TensorError> {
        if self.dom_dims != rhs.dom_dims || self.cod_dims != rhs.cod_dims {
            return Err(TensorError::Shape(format!(
                "shapes differ: {:?}→{:?} vs {:?}→{:?}",
                self.dom_dims, self.cod_dims, rhs.dom_dims, rhs.cod_dims
            )));
        }
        Ok(())
    }

    /// Reorder domain and codomain index groups. `dom_perm[k]` names which
    /// old domain axis lands in position `k` of the new domain, and likewise
    /// for the codomain.
    pub fn permute(&self, cod_perm: &[usize], dom_perm: &[usize]) -> Result<Self, TensorError> {
        if cod_perm.len() != self.cod_dims.len() || dom_perm.len() != self.dom_dims.len() {
            return Err(TensorError::Shape("permutation length mismatch".into()));
        }
        let new_dom: Vec<usize> = dom_perm.iter().map(|&k| self.dom_dims[k]).collect();
        let new_cod: Vec<usize> = cod_perm.iter().map(|&k| self.cod_dims[k]).collect();
        let mut out = Tensor::zeros(new_dom.clone(), new_cod.clone());
        let dom_size = size(&new_dom);
        for j in 0..size(&new_cod) {
            let jm = unflatten(j, &new_cod);
            let mut old_jm = vec![0; jm.len()];
            for (k, &axis) in cod_perm.iter().enumerate() {
                old_jm[axis] = jm[k];
            }
            let oj = flatten(&old_jm, &self.cod_dims);
            for i in 0..dom_size {
                let im = unflatten(i, &new_dom);
                let mut old_im = vec![0; im.len()];
                for (k, &axis) in dom_perm.iter().enumerate() {
                    old_im[axis] = im[k];
                }
                let oi = flatten(&old_im, &self.dom_dims);
                out.data[j * dom_size + i] = self.get(oj, oi).clone();
            }
        }
        Ok(out)
    }
}

/// Flatten a multi-index against `dims`, first dimension most significant.
pub fn flatten(index: &[usize], dims: &[usize]) -> usize {
    index
        .iter()
        .zip(dims)
        .fold(0, |acc, (&i, &d)| acc * d + i)
}

/// Inverse of [`flatten`].
pub fn unflatten(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = flat % dims[k];
        flat /= dims[k];
    }
    out
}

/// Sequential composition `f ⨾ g`: feed the output of `f` into `g`.
/// As matrices this is the product `[[g]]·[[f]]`.
pub fn mat_compose<S: Rig>(f: &Tensor<S>, g: &Tensor<S>) -> Result<Tensor<S>, TensorError> {
    if f.cod_dims != g.dom_dims {
        return Err(TensorError::Shape(format!(
            "codomain {:?} of first factor does not match domain {:?} of second",
            f.cod_dims, g.dom_dims
        )));
    }
    let a = f.dom_size();
    let b = f.cod_size();
    let c = g.cod_size();
    let mut out: Tensor<S> = Tensor::zeros(f.dom_dims.clone(), g.cod_dims.clone());
    for k in 0..c {
        for j in 0..b {
            let gkj = g.get(k, j);
            if gkj.is_zero() {
                continue;
            }
            for i in 0..a {
                let cur = out.get(k, i).add(&gkj.mul(f.get(j, i)));
                out.set(k, i, cur);
            }
        }
    }
    Ok(out)
}

/// Tensor (Kronecker) product; dimensions concatenate and the first factor's
/// indices are major.
pub fn kron<S: Rig>(f: &Tensor<S>, g: &Tensor<S>) -> Tensor<S> {
    let mut dom = f.dom_dims.clone();
    dom.extend_from_slice(&g.dom_dims);
    let mut cod = f.cod_dims.clone();
    cod.extend_from_slice(&g.cod_dims);
    let (fa, fb) = (f.dom_size(), f.cod_size());
    let (ga, gb) = (g.dom_size(), g.cod_size());
    let mut out = Tensor::zeros(dom, cod);
    for jf in 0..fb {
        for jg in 0..gb {
            for i_f in 0..fa {
                for ig in 0..ga {
                    out.set(jf * gb + jg, i_f * ga + ig, f.get(jf, i_f).mul(g.get(jg, ig)));
                }
            }
        }
    }
    out
}

impl<S: Conjugate> Tensor<S> {
    /// Entrywise conjugation.
    pub fn conj(&self) -> Self {
        Tensor {
            dom_dims: self.dom_dims.clone(),
            cod_dims: self.cod_dims.clone(),
            data: self.data.iter().map(Conjugate::conjugate).collect(),
        }
    }

    /// Conjugate transpose: swaps domain and codomain.
    pub fn dagger(&self) -> Self {
        let mut out = Tensor {
            dom_dims: self.cod_dims.clone(),
            cod_dims: self.dom_dims.clone(),
            data: vec![S::zero(); self.data.len()],
        };
        for j in 0..self.cod_size() {
            for i in 0..self.dom_size() {
                out.set(i, j, self.get(j, i).conjugate());
            }
        }
        out
    }
}

impl<S: RingNeg> Tensor<S> {
    /// Entrywise difference.
    pub fn sub(&self, rhs: &Self) -> Result<Self, TensorError> {
        self.same_shape(rhs)?;
        Ok(Tensor {
            dom_dims: self.dom_dims.clone(),
            cod_dims: self.cod_dims.clone(),
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.add(&b.neg()))
                .collect(),
        })
    }
}

impl Tensor<Complex64> {
    /// Largest entrywise absolute deviation from `rhs`. Shape differences
    /// count as infinite.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        if self.dom_dims != rhs.dom_dims || self.cod_dims != rhs.cod_dims {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

/// Split a dual-valued tensor into its value and tangent parts.
pub fn split_dual<S: Rig>(t: &Tensor<Dual<S>>) -> (Tensor<S>, Tensor<S>) {
    let value = Tensor {
        dom_dims: t.dom_dims.clone(),
        cod_dims: t.cod_dims.clone(),
        data: t.data.iter().map(|d| d.re.clone()).collect(),
    };
    let tangent = Tensor {
        dom_dims: t.dom_dims.clone(),
        cod_dims: t.cod_dims.clone(),
        data: t.data.iter().map(|d| d.eps.clone()).collect(),
    };
    (value, tangent)
}
