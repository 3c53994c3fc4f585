//! Cyclic complex Jacobi diagonalization of Hermitian matrices.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use super::ComplexMatrix;
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order; `vectors` holds the matching
/// orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }

    /// `V f(Lambda) V^dagger` for a scalar function of the eigenvalues.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.values.len();
        let fvals: Vec<Complex64> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * fvals[k] * self.vectors[(j, k)].conj())
                .sum()
        })
    }
}

/// Diagonalizes the Hermitian part `(A + A^dagger)/2` of `a`.
pub fn eigh(a: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = a.dim();
    let mut w = ComplexMatrix::from_fn(n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let scale = w.frobenius_norm();

    let mut converged = n <= 1 || scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| w[(i, j)].norm_sqr())
            .sum();
        if off.sqrt() <= f64::EPSILON * 1e-3 * scale {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut w, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(i, i)].re.total_cmp(&w[(j, j)].re));
    let values = order.iter().map(|&k| w[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

fn rotate(w: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = w[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let app = w[(p, p)].re;
    let aqq = w[(q, q)].re;
    // Skip rotations that cannot change the diagonal in floating point.
    if g < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        w[(p, q)] = Complex64::new(0.0, 0.0);
        w[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = apq / g;
    let tau = (aqq - app) / (2.0 * g);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // G = diag(1, conj(phase)) * [[c, s], [-s, c]] acting on (p, q).
    let gpp = Complex64::new(c, 0.0);
    let gpq = Complex64::new(s, 0.0);
    let gqp = -phase.conj() * s;
    let gqq = phase.conj() * c;

    let n = w.dim();
    for i in 0..n {
        let (aip, aiq) = (w[(i, p)], w[(i, q)]);
        w[(i, p)] = aip * gpp + aiq * gqp;
        w[(i, q)] = aip * gpq + aiq * gqq;
    }
    for j in 0..n {
        let (apj, aqj) = (w[(p, j)], w[(q, j)]);
        w[(p, j)] = gpp.conj() * apj + gqp.conj() * aqj;
        w[(q, j)] = gpq.conj() * apj + gqq.conj() * aqj;
    }
    for i in 0..n {
        let (vip, viq) = (v[(i, p)], v[(i, q)]);
        v[(i, p)] = vip * gpp + viq * gqp;
        v[(i, q)] = vip * gpq + viq * gqq;
    }
    w[(p, q)] = Complex64::new(0.0, 0.0);
    w[(q, p)] = Complex64::new(0.0, 0.0);
    w[(p, p)].im = 0.0;
    w[(q, q)].im = 0.0;
}
