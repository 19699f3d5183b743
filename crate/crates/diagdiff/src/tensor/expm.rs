//! Matrix exponential of `i·t·H` by scaling and squaring of a truncated
//! Taylor series. Intended for the small Hermitian generators that appear in
//! one-parameter unitary groups, not as a general-purpose expm.

use super::{mat_compose, Tensor, TensorError};
use num_complex::Complex64;

/// Compute `exp(i·t·H)` for a square tensor `H`. The argument is scaled down
/// until its 1-norm is at most 1/4, the series is summed until terms fall
/// below 1e-20, and the result is squared back up; at the sizes used here
/// the result is accurate to well under 1e-12.
pub fn matrix_exp(h: &Tensor<Complex64>, t: f64) -> Result<Tensor<Complex64>, TensorError> {
    if h.dom_dims != h.cod_dims {
        return Err(TensorError::Shape(format!(
            "matrix_exp needs a square tensor, got {:?}→{:?}",
            h.dom_dims, h.cod_dims
        )));
    }
    let a = h.scale(&Complex64::new(0.0, t));
    let norm = one_norm(&a);
    let squarings = if norm <= 0.25 {
        0
    } else {
        (norm / 0.25).log2().ceil() as u32
    };
    let scaled = a.scale(&Complex64::new(1.0 / f64::powi(2.0, squarings as i32), 0.0));

    let mut sum = Tensor::identity(a.dom_dims.clone());
    let mut term = Tensor::identity(a.dom_dims.clone());
    for k in 1..64 {
        term = mat_compose(&term, &scaled)?.scale(&Complex64::new(1.0 / k as f64, 0.0));
        sum = sum.add(&term)?;
        if one_norm(&term) < 1e-20 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = mat_compose(&sum, &sum)?;
    }
    Ok(sum)
}

fn one_norm(t: &Tensor<Complex64>) -> f64 {
    let n = t.dom_size();
    (0..n)
        .map(|i| (0..t.cod_size()).map(|j| t.get(j, i).norm()).sum())
        .fold(0.0_f64, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag(entries: &[f64]) -> Tensor<Complex64> {
        let n = entries.len();
        let mut t = Tensor::zeros(vec![n], vec![n]);
        for (i, &e) in entries.iter().enumerate() {
            t.set(i, i, c(e, 0.0));
        }
        t
    }

    #[test]
    fn exp_at_zero_is_identity() {
        let h = diag(&[1.0, -2.0, 0.5]);
        let u = matrix_exp(&h, 0.0).unwrap();
        assert!(u.max_abs_diff(&Tensor::identity(vec![3])) < 1e-15);
    }

    #[test]
    fn exp_of_pauli_z_at_pi() {
        // exp(iπ·diag(1,-1)) = -I
        let u = matrix_exp(&diag(&[1.0, -1.0]), std::f64::consts::PI).unwrap();
        let minus_id = Tensor::identity(vec![2]).scale(&c(-1.0, 0.0));
        assert!(u.max_abs_diff(&minus_id) < 1e-13);
    }

    #[test]
    fn diagonal_case_matches_scalar_exponentials() {
        let entries = [0.3, -1.7, 2.2, 0.0];
        let t = 1.234;
        let u = matrix_exp(&diag(&entries), t).unwrap();
        for (i, &e) in entries.iter().enumerate() {
            let expected = (c(0.0, 1.0) * c(e * t, 0.0)).exp();
            assert!((u.get(i, i) - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn group_law_on_non_diagonal_hermitian() {
        // H = [[1, 1-i], [1+i, -1]] is Hermitian.
        let h = Tensor::new(
            vec![2],
            vec![2],
            vec![c(1.0, 0.0), c(1.0, -1.0), c(1.0, 1.0), c(-1.0, 0.0)],
        )
        .unwrap();
        let (s, t) = (0.7, -1.9);
        let lhs = matrix_exp(&h, s + t).unwrap();
        let rhs = mat_compose(&matrix_exp(&h, t).unwrap(), &matrix_exp(&h, s).unwrap()).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn large_argument_still_accurate() {
        let u = matrix_exp(&diag(&[1.0, -1.0]), 40.0 * std::f64::consts::PI).unwrap();
        assert!(u.max_abs_diff(&Tensor::identity(vec![2])) < 1e-11);
    }

    #[test]
    fn non_square_rejected() {
        let t = Tensor::<Complex64>::zeros(vec![2], vec![3]);
        assert!(matrix_exp(&t, 1.0).is_err());
    }
}
