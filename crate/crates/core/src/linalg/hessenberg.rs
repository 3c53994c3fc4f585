//! Eigenvalues of complex upper Hessenberg matrices (shifted QR).

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;
use num_traits::Zero;

use super::ComplexMatrix;
use crate::{Error, Result};

const MAX_ITERATIONS_PER_EIGENVALUE: usize = 60;

/// Diagonal similarity scaling by powers of two that roughly equalizes row
/// and column norms. Preserves Hessenberg structure and the spectrum.
pub fn balance(m: &mut ComplexMatrix) {
    let n = m.dim();
    let radix = 2.0_f64;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].l1_norm();
                    r += m[(i, j)].l1_norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while c >= g {
                f /= radix;
                c /= radix * radix;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

/// All eigenvalues of an upper Hessenberg matrix. Entries below the first
/// subdiagonal are ignored.
pub fn hessenberg_eigenvalues(h: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = h.dim();
    let mut a = h.clone();
    let mut eig = vec![Complex64::zero(); n];
    if n == 0 {
        return Ok(eig);
    }

    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut rotations: Vec<(f64, Complex64)> = Vec::with_capacity(n);
    loop {
        if hi == 0 {
            eig[0] = a[(0, 0)];
            break;
        }
        // Locate the start of the trailing unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = a[(lo, lo - 1)].l1_norm();
            let diag = a[(lo - 1, lo - 1)].l1_norm() + a[(lo, lo)].l1_norm();
            if sub <= f64::EPSILON * diag || sub < f64::MIN_POSITIVE {
                a[(lo, lo - 1)] = Complex64::zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = a[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }

        iter += 1;
        if iter > MAX_ITERATIONS_PER_EIGENVALUE {
            return Err(Error::NoConvergence);
        }
        let shift = if iter.is_multiple_of(10) {
            // Exceptional shift to break cycles.
            a[(hi, hi)] + Complex64::new(a[(hi, hi - 1)].norm(), 0.0) * 0.75
        } else {
            wilkinson_shift(&a, hi)
        };

        for k in lo..=hi {
            a[(k, k)] -= shift;
        }
        rotations.clear();
        for k in lo..hi {
            let (c, s) = givens(a[(k, k)], a[(k + 1, k)]);
            rotations.push((c, s));
            for j in k..=hi {
                let (x, y) = (a[(k, j)], a[(k + 1, j)]);
                a[(k, j)] = x * c + s * y;
                a[(k + 1, j)] = -s.conj() * x + y * c;
            }
        }
        for (offset, &(c, s)) in rotations.iter().enumerate() {
            let k = lo + offset;
            let last_row = (k + 2).min(hi);
            for i in lo..=last_row {
                let (x, y) = (a[(i, k)], a[(i, k + 1)]);
                a[(i, k)] = x * c + y * s.conj();
                a[(i, k + 1)] = -x * s + y * c;
            }
        }
        for k in lo..=hi {
            a[(k, k)] += shift;
        }
    }
    Ok(eig)
}

/// Eigenvalue of the trailing 2x2 block closest to its last diagonal entry.
fn wilkinson_shift(a: &ComplexMatrix, hi: usize) -> Complex64 {
    let p = a[(hi - 1, hi - 1)];
    let q = a[(hi - 1, hi)];
    let r = a[(hi, hi - 1)];
    let d = a[(hi, hi)];
    let half = (p - d) * 0.5;
    let disc = (half * half + q * r).sqrt();
    let mid = (p + d) * 0.5;
    let mu1 = mid + disc;
    let mu2 = mid - disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}

/// Rotation `[[c, s], [-conj(s), c]]` with real `c` mapping `(x, y)` to
/// `(r, 0)`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, Complex64::zero());
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let norm = ax.hypot(ay);
    let c = ax / norm;
    let s = (x / ax) * y.conj() / norm;
    (c, s)
}
