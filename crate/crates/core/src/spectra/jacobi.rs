//! Cyclic Jacobi diagonalization for dense real symmetric matrices.

use super::{DenseMatrix, SpectraError, Spectrum};

/// Sweep budget before [`SpectraError::NoConvergence`] is reported.
pub const MAX_SWEEPS: usize = 30;

/// Default relative convergence tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Tolerance used when checking the input for symmetry.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Eigenvalues of a real symmetric matrix, sorted descending.
///
/// Each sweep visits the strictly upper triangle row by row and applies one
/// plane rotation per pair. The first three sweeps skip elements below a
/// threshold of a fifth of the mean off-diagonal magnitude. Iteration stops
/// once the off-diagonal Frobenius norm is at most `tol * max(1, ||m||_inf)`;
/// by Weyl's inequality that norm bounds the error of every eigenvalue.
pub fn eigenvalues_symmetric(m: &DenseMatrix, tol: f64) -> Result<Spectrum, SpectraError> {
    eigenvalues_with_budget(m, tol, MAX_SWEEPS)
}

/// [`eigenvalues_symmetric`] with an explicit sweep budget.
pub fn eigenvalues_with_budget(
    m: &DenseMatrix,
    tol: f64,
    max_sweeps: usize,
) -> Result<Spectrum, SpectraError> {
    let n = m.rows();
    if m.cols() != n {
        return Err(SpectraError::InvalidMatrix(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    for r in 0..n {
        for c in 0..r {
            if (m.get(r, c) - m.get(c, r)).abs() > SYMMETRY_TOL {
                return Err(SpectraError::InvalidMatrix(format!(
                    "asymmetric at ({r}, {c}): {} vs {}",
                    m.get(r, c),
                    m.get(c, r)
                )));
            }
        }
    }
    let scale = m.inf_norm().max(1.0);
    let target = tol * scale;

    let mut a = m.data().to_vec();
    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];

    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                s += a[p * n + q] * a[p * n + q];
            }
        }
        (2.0 * s).sqrt()
    };

    for sweep in 0..max_sweeps {
        let off = off_norm(&a);
        if off <= target {
            return Ok(Spectrum::from_unsorted(d));
        }
        let abs_sum: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q].abs())
            .sum();
        let threshold = if sweep < 3 {
            0.2 * abs_sum / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let g = 100.0 * apq.abs();
                if sweep > 3 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a[p * n + q] = 0.0;
                    continue;
                }
                if apq.abs() <= threshold || apq == 0.0 {
                    continue;
                }
                let h = d[q] - d[p];
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * apq;
                z[p] -= h;
                z[q] += h;
                d[p] -= h;
                d[q] += h;
                a[p * n + q] = 0.0;
                let mut rotate = |i: usize, j: usize| {
                    let g = a[i];
                    let h = a[j];
                    a[i] = g - s * (h + g * tau);
                    a[j] = h + s * (g - h * tau);
                };
                for j in 0..p {
                    rotate(j * n + p, j * n + q);
                }
                for j in p + 1..q {
                    rotate(p * n + j, j * n + q);
                }
                for j in q + 1..n {
                    rotate(p * n + j, q * n + j);
                }
            }
        }
        for p in 0..n {
            b[p] += z[p];
            d[p] = b[p];
            z[p] = 0.0;
        }
    }
    let residual = off_norm(&a);
    if residual <= target {
        return Ok(Spectrum::from_unsorted(d));
    }
    Err(SpectraError::NoConvergence {
        sweeps: max_sweeps,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn dense(rows: &[&[f64]]) -> DenseMatrix {
        let n = rows.len();
        DenseMatrix::new(n, rows[0].len(), rows.concat()).unwrap()
    }

    #[test]
    fn small_known_matrices() {
        let zero = DenseMatrix::zeros(3, 3);
        assert_eq!(
            eigenvalues_symmetric(&zero, DEFAULT_TOL).unwrap().values(),
            &[0.0; 3]
        );

        let c4 = dense(&[
            &[0., 1., 0., 1.],
            &[1., 0., 1., 0.],
            &[0., 1., 0., 1.],
            &[1., 0., 1., 0.],
        ]);
        let spec = eigenvalues_symmetric(&c4, DEFAULT_TOL).unwrap();
        for (got, want) in spec.values().iter().zip([2.0, 0.0, 0.0, -2.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }

        // [[2,1],[1,2]] has eigenvalues 3 and 1
        let m = dense(&[&[2., 1.], &[1., 2.]]);
        let spec = eigenvalues_symmetric(&m, DEFAULT_TOL).unwrap();
        assert!((spec.values()[0] - 3.0).abs() < 1e-12);
        assert!((spec.values()[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tridiagonal_toeplitz() {
        // diag a, off-diag b: a + 2b cos(pi j / (n+1))
        let n = 30;
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.5);
            if i + 1 < n {
                m.set(i, i + 1, -0.7);
                m.set(i + 1, i, -0.7);
            }
        }
        let spec = eigenvalues_symmetric(&m, DEFAULT_TOL).unwrap();
        let mut want: Vec<f64> = (1..=n)
            .map(|j| 1.5 - 1.4 * (PI * j as f64 / (n + 1) as f64).cos())
            .collect();
        want.sort_by(|a, b| b.total_cmp(a));
        for (got, want) in spec.values().iter().zip(want) {
            assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let rect = DenseMatrix::zeros(2, 3);
        assert!(matches!(
            eigenvalues_symmetric(&rect, DEFAULT_TOL),
            Err(SpectraError::InvalidMatrix(_))
        ));
        let asym = dense(&[&[0., 1.], &[0.5, 0.]]);
        assert!(matches!(
            eigenvalues_symmetric(&asym, DEFAULT_TOL),
            Err(SpectraError::InvalidMatrix(_))
        ));
    }

    #[test]
    fn exhausted_budget_reports_residual() {
        let n = 12;
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, ((i * 7 + j * 7 + i * j) % 11) as f64 - 5.0);
            }
        }
        match eigenvalues_with_budget(&m, 1e-14, 1) {
            Err(SpectraError::NoConvergence { sweeps, residual }) => {
                assert_eq!(sweeps, 1);
                assert!(residual > 0.0);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
        assert!(eigenvalues_with_budget(&m, 1e-14, MAX_SWEEPS).is_ok());
    }

    #[test]
    fn empty_matrix_has_empty_spectrum() {
        let spec = eigenvalues_symmetric(&DenseMatrix::zeros(0, 0), DEFAULT_TOL).unwrap();
        assert!(spec.values().is_empty());
    }
}
