//! Spin-s operator matrices and the commutator identities they satisfy.

use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

use crate::linalg::{c64, ComplexMatrix};
use crate::{Error, Result, Vec3};

/// How far `|n|` may stray from one before a direction is rejected.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-12;

/// Largest spin whose tolerances are used unscaled.
const UNSCALED_TWICE_S: u32 = 12;

/// Spin quantum number `s`, stored exactly as `2s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpinLabel {
    twice_s: u32,
}

impl SpinLabel {
    pub const HALF: SpinLabel = SpinLabel { twice_s: 1 };
    pub const ONE: SpinLabel = SpinLabel { twice_s: 2 };

    /// `twice_s = 0` is the degenerate 1x1 case.
    pub const fn new(twice_s: u32) -> Self {
        SpinLabel { twice_s }
    }

    pub const fn twice_s(&self) -> u32 {
        self.twice_s
    }

    pub fn s(&self) -> f64 {
        self.twice_s as f64 / 2.0
    }

    pub const fn dim(&self) -> usize {
        self.twice_s as usize + 1
    }

    /// `m` for basis index `i` (descending order, index 0 is `m = s`).
    pub fn m(&self, index: usize) -> f64 {
        self.s() - index as f64
    }
}

impl fmt::Display for SpinLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice_s.is_multiple_of(2) {
            write!(f, "{}", self.twice_s / 2)
        } else {
            write!(f, "{}/2", self.twice_s)
        }
    }
}

/// `tol` for `s <= 6`, `tol * (2s + 1)` beyond.
pub fn scaled_tolerance(tol: f64, s: SpinLabel) -> f64 {
    if s.twice_s() > UNSCALED_TWICE_S {
        tol * s.dim() as f64
    } else {
        tol
    }
}

/// The Cartesian spin operators `(S_x, S_y, S_z)` for one spin, in units
/// where the stored `hbar` multiplies every entry.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorTriple {
    label: SpinLabel,
    hbar: f64,
    ops: [ComplexMatrix; 3],
}

/// Spin operators with `hbar = 1`.
pub fn build_spin_operators(s: SpinLabel) -> OperatorTriple {
    OperatorTriple::with_hbar(s, 1.0)
}

impl OperatorTriple {
    /// Ladder construction in the descending `|s, m>` basis.
    pub fn with_hbar(s: SpinLabel, hbar: f64) -> Self {
        let n = s.dim();
        let j = s.twice_s() as i64;
        let mut sx = ComplexMatrix::zeros(n);
        let mut sy = ComplexMatrix::zeros(n);
        let mut sz = ComplexMatrix::zeros(n);
        for i in 0..n {
            let twice_m = j - 2 * i as i64;
            sz[(i, i)] = c64(hbar * twice_m as f64 / 2.0, 0.0);
            if i > 0 {
                // <m+1| S_+ |m> = hbar sqrt((s - m)(s + m + 1))
                let raise = hbar * (((j - twice_m) * (j + twice_m + 2)) as f64).sqrt() / 2.0;
                sx[(i - 1, i)] = c64(raise / 2.0, 0.0);
                sx[(i, i - 1)] = c64(raise / 2.0, 0.0);
                sy[(i - 1, i)] = c64(0.0, -raise / 2.0);
                sy[(i, i - 1)] = c64(0.0, raise / 2.0);
            }
        }
        OperatorTriple { label: s, hbar, ops: [sx, sy, sz] }
    }

    /// Wraps externally supplied matrices (used for test fixtures such as
    /// deliberately corrupted operators). Only dimensions are checked.
    pub fn from_parts(s: SpinLabel, hbar: f64, sx: ComplexMatrix, sy: ComplexMatrix, sz: ComplexMatrix) -> Result<Self> {
        for m in [&sx, &sy, &sz] {
            if m.dim() != s.dim() {
                return Err(Error::DimensionMismatch { expected: s.dim(), found: m.dim() });
            }
        }
        Ok(OperatorTriple { label: s, hbar, ops: [sx, sy, sz] })
    }

    pub fn label(&self) -> SpinLabel {
        self.label
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn dim(&self) -> usize {
        self.label.dim()
    }

    pub fn sx(&self) -> &ComplexMatrix {
        &self.ops[0]
    }

    pub fn sy(&self) -> &ComplexMatrix {
        &self.ops[1]
    }

    pub fn sz(&self) -> &ComplexMatrix {
        &self.ops[2]
    }

    pub fn components(&self) -> &[ComplexMatrix; 3] {
        &self.ops
    }

    /// `S_+ = S_x + i S_y`.
    pub fn raising(&self) -> ComplexMatrix {
        self.sx() + &self.sy().scale(Complex64::i())
    }

    /// `S_- = S_x - i S_y`.
    pub fn lowering(&self) -> ComplexMatrix {
        self.sx() - &self.sy().scale(Complex64::i())
    }

    /// Dimensionless projection `(n . S) / hbar`.
    pub fn projection(&self, n: &Vec3) -> ComplexMatrix {
        dot_operator(n, self).scale_real(1.0 / self.hbar)
    }

    /// `S_x^2 + S_y^2 + S_z^2`.
    pub fn casimir(&self) -> ComplexMatrix {
        let [x, y, z] = &self.ops;
        &(&(x * x) + &(y * y)) + &(z * z)
    }

    /// Worst of `|[S_i, S_j] - i hbar eps_ijk S_k|` over all pairs.
    pub fn su2_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            let lhs = &(&self.ops[i] * &self.ops[j]) - &(&self.ops[j] * &self.ops[i]);
            let rhs = self.ops[k].scale(c64(0.0, self.hbar));
            worst = worst.max(lhs.max_abs_diff(&rhs).unwrap_or(f64::INFINITY));
        }
        worst
    }

    /// `|S^2 - hbar^2 s(s+1) I|`.
    pub fn casimir_residual(&self) -> f64 {
        let s = self.label.s();
        let want = ComplexMatrix::identity(self.dim()).scale_real(self.hbar * self.hbar * s * (s + 1.0));
        self.casimir().max_abs_diff(&want).unwrap_or(f64::INFINITY)
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.ops.iter().fold(0.0, |m, op| m.max(op.hermitian_residual()))
    }
}

/// `v_x S_x + v_y S_y + v_z S_z`.
pub fn dot_operator(v: &Vec3, ops: &OperatorTriple) -> ComplexMatrix {
    let n = ops.dim();
    let [x, y, z] = ops.components();
    ComplexMatrix::from_fn(n, |i, j| x[(i, j)] * v[0] + y[(i, j)] * v[1] + z[(i, j)] * v[2])
}

/// `ab - ba`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.checked_mul(b)?.checked_sub(&b.checked_mul(a)?)
}

/// Max-norm of `[a.S, b.S] - i hbar (a x b).S`.
pub fn cross_identity_residual(a: &Vec3, b: &Vec3, ops: &OperatorTriple) -> f64 {
    let lhs = commutator(&dot_operator(a, ops), &dot_operator(b, ops)).expect("same spin space");
    let rhs = dot_operator(&a.cross(b), ops).scale(c64(0.0, ops.hbar()));
    lhs.max_abs_diff(&rhs).expect("same spin space")
}

/// Max over components of `|[S_i, B.S] + i hbar (S x B)_i|`.
pub fn spin_cross_field_residual(field: &Vec3, ops: &OperatorTriple) -> f64 {
    let b_dot_s = dot_operator(field, ops);
    let [sx, sy, sz] = ops.components();
    let cross = |p: &ComplexMatrix, bq: f64, q: &ComplexMatrix, bp: f64| {
        &p.scale_real(bq) - &q.scale_real(bp)
    };
    // (S x B)_x = S_y B_z - S_z B_y, and cyclic.
    let s_cross_b = [
        cross(sy, field[2], sz, field[1]),
        cross(sz, field[0], sx, field[2]),
        cross(sx, field[1], sy, field[0]),
    ];
    let mut worst: f64 = 0.0;
    for (si, sxb) in ops.components().iter().zip(&s_cross_b) {
        let lhs = commutator(si, &b_dot_s).expect("same spin space");
        let rhs = sxb.scale(c64(0.0, -ops.hbar()));
        worst = worst.max(lhs.max_abs_diff(&rhs).expect("same spin space"));
    }
    worst
}

/// Max-norm of `sum_{j<k} X^j [X, H] X^(k-1-j) - [X^k, H]`, both sides
/// evaluated literally.
pub fn telescoping_residual(x: &ComplexMatrix, h: &ComplexMatrix, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::ZeroPower);
    }
    x.ensure_same_dim(h)?;
    let powers: alloc::vec::Vec<ComplexMatrix> =
        core::iter::successors(Some(ComplexMatrix::identity(x.dim())), |p| Some(p * x))
            .take(k + 1)
            .collect();
    let inner = commutator(x, h)?;
    let mut lhs = ComplexMatrix::zeros(x.dim());
    for j in 0..k {
        lhs = &lhs + &(&(&powers[j] * &inner) * &powers[k - 1 - j]);
    }
    let rhs = commutator(&powers[k], h)?;
    lhs.max_abs_diff(&rhs)
}

/// Right-handed orthonormal frame `(e1, e2, n)` with the gauge
/// `e1 = normalize(z x n)`, falling back to `x` near the poles.
pub fn local_frame(n: &Vec3) -> Result<[Vec3; 3]> {
    check_unit(n)?;
    let zn = Vec3::Z.cross(n);
    let e1 = if zn.norm() > 1e-8 { zn.normalized().expect("non-zero") } else { Vec3::X };
    let e2 = n.cross(&e1);
    Ok([e1, e2, *n])
}

/// `(S_{n,+}, S_{n,-})` built from the local frame of [`local_frame`].
pub fn local_ladder_operators(n: &Vec3, ops: &OperatorTriple) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let [e1, e2, _] = local_frame(n)?;
    let lx = dot_operator(&e1, ops);
    let ly = dot_operator(&e2, ops).scale(Complex64::i());
    Ok((&lx + &ly, &lx - &ly))
}

pub(crate) fn check_unit(n: &Vec3) -> Result<()> {
    let norm = n.norm();
    if (norm - 1.0).abs() <= UNIT_NORM_TOLERANCE {
        Ok(())
    } else {
        Err(Error::NotUnitVector { norm })
    }
}
