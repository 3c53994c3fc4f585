//! Spin coherent states: kets, projectors and the polynomial projector form.

mod majorana;

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;
use num_traits::{One, ToPrimitive, Zero};

use crate::linalg::{c64, eigh, vec_norm, ComplexMatrix};
use crate::spin_algebra::{check_unit, local_ladder_operators, OperatorTriple, SpinLabel};
use crate::{Error, Result, Vec3};

pub use majorana::{coherent_fit, majorana_constellation, MajoranaConstellation, DEFAULT_FIT_TOLERANCE};

/// Polar angle `theta` in `[0, pi]` and azimuth `phi` in `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionAngles {
    theta: f64,
    phi: f64,
}

impl DirectionAngles {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::AngleOutOfRange(alloc::format!("theta = {theta} not in [0, pi]")));
        }
        if !(0.0..TAU).contains(&phi) {
            return Err(Error::AngleOutOfRange(alloc::format!("phi = {phi} not in [0, 2 pi)")));
        }
        Ok(DirectionAngles { theta, phi })
    }

    /// Angles of a non-zero vector; the azimuth is wrapped into `[0, 2 pi)`
    /// and set to zero on the poles.
    pub fn from_vector(v: &Vec3) -> Result<Self> {
        let n = v.normalized().ok_or(Error::ZeroVector)?;
        let rho = n.x().hypot(n.y());
        let theta = rho.atan2(n.z());
        let mut phi = if rho == 0.0 { 0.0 } else { n.y().atan2(n.x()) };
        if phi < 0.0 {
            phi += TAU;
        }
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(DirectionAngles { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `(sin theta cos phi, sin theta sin phi, cos theta)`.
    pub fn unit_vector(&self) -> Vec3 {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Vec3::new(st * cp, st * sp, ct)
    }
}

/// Normalized coherent ket in the descending `|s, m>` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentKet {
    amplitudes: Vec<Complex64>,
    label: SpinLabel,
    source_angles: DirectionAngles,
}

impl CoherentKet {
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn label(&self) -> SpinLabel {
        self.label
    }

    pub fn source_angles(&self) -> DirectionAngles {
        self.source_angles
    }

    pub fn direction(&self) -> Vec3 {
        self.source_angles.unit_vector()
    }
}

/// Binomial coefficient as a float (exact below 2^53).
pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64).round()
}

/// Amplitudes `sqrt(C(2s, s+m)) e^{i(s-m)phi} cos^{s+m}(theta/2) sin^{s-m}(theta/2)`.
pub fn ket_from_angles(s: SpinLabel, angles: DirectionAngles) -> CoherentKet {
    let twice_s = s.twice_s();
    let (sh, ch) = (angles.theta() / 2.0).sin_cos();
    let amplitudes = (0..s.dim())
        .map(|i| {
            // index i <-> m = s - i, so s + m = 2s - i and s - m = i
            let up = twice_s - i as u32;
            let magnitude = binomial(twice_s, up).sqrt() * ch.powi(up as i32) * sh.powi(i as i32);
            Complex64::from_polar(magnitude, i as f64 * angles.phi())
        })
        .collect();
    CoherentKet { amplitudes, label: s, source_angles: angles }
}

/// Density matrix of one spin: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: ComplexMatrix,
    label: SpinLabel,
}

impl DensityMatrix {
    pub const HERMITIAN_TOLERANCE: f64 = 1e-13;
    pub const TRACE_TOLERANCE: f64 = 1e-12;
    pub const EIGENVALUE_FLOOR: f64 = -1e-12;

    /// Validates the density-matrix invariants.
    pub fn new(entries: ComplexMatrix, label: SpinLabel) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(entries, label)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Only the dimension is checked. Used for matrices that are density
    /// matrices by construction.
    pub fn from_matrix_unchecked(entries: ComplexMatrix, label: SpinLabel) -> Result<Self> {
        if entries.dim() != label.dim() {
            return Err(Error::DimensionMismatch { expected: label.dim(), found: entries.dim() });
        }
        Ok(DensityMatrix { entries, label })
    }

    /// `I / (2s + 1)`.
    pub fn maximally_mixed(label: SpinLabel) -> Self {
        let n = label.dim();
        DensityMatrix { entries: ComplexMatrix::identity(n).scale_real(1.0 / n as f64), label }
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.entries.hermitian_residual();
        if herm > Self::HERMITIAN_TOLERANCE {
            return Err(Error::InvalidDensity(alloc::format!("not Hermitian (residual {herm:e})")));
        }
        let tr = self.entries.trace();
        if (tr - Complex64::one()).norm() > Self::TRACE_TOLERANCE {
            return Err(Error::InvalidDensity(alloc::format!("trace {tr} != 1")));
        }
        let lowest = self.eigenvalues()?.first().copied().unwrap_or(0.0);
        if lowest < Self::EIGENVALUE_FLOOR {
            return Err(Error::InvalidDensity(alloc::format!("negative eigenvalue {lowest:e}")));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.entries
    }

    pub fn label(&self) -> SpinLabel {
        self.label
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries).trace().re
    }

    /// Max-norm of `rho^2 - rho`.
    pub fn idempotency_residual(&self) -> f64 {
        (&self.entries * &self.entries).max_abs_diff(&self.entries).expect("square")
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(eigh(&self.entries)?.values)
    }
}

/// `rho_ij = c_i conj(c_j)`.
pub fn projector_outer(ket: &CoherentKet) -> DensityMatrix {
    let m = ComplexMatrix::outer(&ket.amplitudes, &ket.amplitudes).expect("same vector");
    DensityMatrix { entries: m, label: ket.label }
}

/// The projector as the literal product `prod_{m'=-s}^{s-1} (X - m' I)/(s - m')`
/// with `X = (n . S)/hbar`.
pub fn projector_polynomial(ops: &OperatorTriple, n: &Vec3) -> Result<DensityMatrix> {
    check_unit(n)?;
    let label = ops.label();
    let x = ops.projection(n);
    let dim = label.dim();
    let s = label.s();
    let mut rho = ComplexMatrix::identity(dim);
    for t in 0..label.twice_s() {
        let m_prime = -s + t as f64;
        let mut factor = x.clone();
        for i in 0..dim {
            factor[(i, i)] -= c64(m_prime, 0.0);
        }
        rho = (&rho * &factor).scale_real(1.0 / (s - m_prime));
    }
    Ok(DensityMatrix { entries: rho, label })
}

/// Coefficients `a_k` of the projector polynomial `sum_k a_k X^k`, kept both
/// as exact rationals and as floats.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorPolynomial {
    exact: Vec<BigRational>,
    coefficients: Vec<f64>,
}

impl ProjectorPolynomial {
    /// Exact coefficients, constant term first.
    pub fn exact(&self) -> &[BigRational] {
        &self.exact
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Horner evaluation at a scalar.
    pub fn evaluate_scalar(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, a| acc * x + a)
    }

    /// Horner evaluation at a square matrix.
    pub fn evaluate(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let dim = x.dim();
        let mut acc = ComplexMatrix::zeros(dim);
        for a in self.coefficients.iter().rev() {
            acc = &acc * x;
            for i in 0..dim {
                acc[(i, i)] += c64(*a, 0.0);
            }
        }
        acc
    }
}

/// Expands `prod_{m'=-s}^{s-1} (x - m')/(s - m')` over the rationals.
pub fn polynomial_coefficients(s: SpinLabel) -> ProjectorPolynomial {
    let twice_s = s.twice_s() as i64;
    let mut poly: Vec<BigRational> = alloc::vec![BigRational::one()];
    for t in 0..twice_s {
        // m' = (2t - 2s)/2, s - m' = 2s - t
        let m_prime = BigRational::new(BigInt::from(2 * t - twice_s), BigInt::from(2));
        let denom = BigRational::from_integer(BigInt::from(twice_s - t));
        let mut next = alloc::vec![BigRational::zero(); poly.len() + 1];
        for (k, a) in poly.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= &m_prime * a;
        }
        poly = next.into_iter().map(|a| a / &denom).collect();
    }
    let coefficients = poly.iter().map(|a| a.to_f64().unwrap_or(f64::NAN)).collect();
    ProjectorPolynomial { exact: poly, coefficients }
}

/// `(|X ket - s ket|, |S_{n,+} ket|)` along the ket's own direction.
pub fn highest_weight_residuals(ket: &CoherentKet, ops: &OperatorTriple) -> Result<(f64, f64)> {
    if ket.label.dim() != ops.dim() {
        return Err(Error::DimensionMismatch { expected: ops.dim(), found: ket.label.dim() });
    }
    let n = ket.direction();
    let x_ket = ops.projection(&n).mat_vec(&ket.amplitudes)?;
    let s = ops.label().s();
    let eig: Vec<Complex64> = x_ket.iter().zip(&ket.amplitudes).map(|(a, c)| a - c * s).collect();
    let (raise, _) = local_ladder_operators(&n, ops)?;
    let raised = raise.mat_vec(&ket.amplitudes)?;
    Ok((vec_norm(&eig), vec_norm(&raised)))
}

#[cfg(test)]
mod tests;
