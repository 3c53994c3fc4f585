//! Majorana constellations: the 2s points on the sphere that encode a
//! spin-s pure state up to global phase.
//!
//! A state with amplitudes `c_m` is mapped to the polynomial
//!
//! ```text
//! P(z) = sum_m (-1)^(s-m) sqrt(C(2s, s+m)) c_m z^(s+m)
//! ```
//!
//! whose roots `z = tan(theta/2) e^{i phi}` are the stars; a degree
//! deficiency of `d` puts `d` stars on the south pole. With this sign
//! convention the coherent state along `n` maps to `(z cos(theta/2) -
//! sin(theta/2) e^{i phi})^{2s}`, so all of its stars sit at `n` itself.
//!
//! Roots come from the eigenvalues of the balanced companion matrix. A
//! k-fold root is only resolved to about `eps^(1/k)` by any floating-point
//! root finder, so clusters of computed roots are replaced by their mean
//! whenever the merged constellation still reproduces the polynomial to
//! roundoff. The cluster mean is a well-conditioned quantity even when the
//! individual roots are not.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;
use num_traits::Zero;

use super::{binomial, ket_from_angles, DirectionAngles};
use crate::linalg::{balance, hessenberg_eigenvalues, vec_norm, ComplexMatrix};
use crate::spin_algebra::SpinLabel;
use crate::{Error, Result, Vec3};

/// Default overlap slack for [`coherent_fit`].
pub const DEFAULT_FIT_TOLERANCE: f64 = 1e-9;

/// Largest projective coefficient residual a cluster merge may introduce.
const MERGE_RESIDUAL_TOLERANCE: f64 = 1e-11;

/// Multiset of `2s` unit vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct MajoranaConstellation {
    stars: Vec<Vec3>,
}

impl MajoranaConstellation {
    pub fn stars(&self) -> &[Vec3] {
        &self.stars
    }

    pub fn len(&self) -> usize {
        self.stars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stars.is_empty()
    }

    pub fn angles(&self) -> Vec<DirectionAngles> {
        self.stars
            .iter()
            .map(|s| DirectionAngles::from_vector(s).expect("stars are unit vectors"))
            .collect()
    }

    /// Normalized mean of the stars; `None` when they cancel.
    pub fn centroid(&self) -> Option<Vec3> {
        let sum = self.stars.iter().fold(Vec3::ZERO, |acc, s| acc + *s);
        if sum.norm() < 1e-12 * self.stars.len().max(1) as f64 {
            return None;
        }
        sum.normalized()
    }

    /// Largest pairwise angular distance between stars.
    pub fn spread(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.stars.iter().enumerate() {
            for b in &self.stars[i + 1..] {
                worst = worst.max(a.angle_to(b));
            }
        }
        worst
    }
}

/// Homogeneous root `(u, v)`, `|u|^2 + |v|^2 = 1`, for the linear factor
/// `u z - v`; `z = v / u` and `u = 0` is the point at infinity.
#[derive(Debug, Clone, Copy)]
struct Root {
    u: Complex64,
    v: Complex64,
}

impl Root {
    fn normalized(u: Complex64, v: Complex64) -> Root {
        let norm = u.norm().hypot(v.norm());
        Root { u: u / norm, v: v / norm }
    }

    fn north() -> Root {
        Root { u: Complex64::new(1.0, 0.0), v: Complex64::zero() }
    }

    fn south() -> Root {
        Root { u: Complex64::zero(), v: Complex64::new(1.0, 0.0) }
    }

    fn star(&self) -> Vec3 {
        let w = self.u.conj() * self.v;
        let z = self.u.norm_sqr() - self.v.norm_sqr();
        Vec3::new(2.0 * w.re, 2.0 * w.im, z).normalized().unwrap_or(Vec3::Z)
    }
}

/// Coefficients `a_k` (of `z^k`) of the Majorana polynomial.
fn majorana_coefficients(amplitudes: &[Complex64], twice_s: u32) -> Vec<Complex64> {
    let n = twice_s as usize;
    (0..=n)
        .map(|k| {
            let i = n - k; // basis index with s + m = k, s - m = i
            let sign = if i.is_multiple_of(2) { 1.0 } else { -1.0 };
            amplitudes[i] * (sign * binomial(twice_s, k as u32).sqrt())
        })
        .collect()
}

/// Coefficients of `prod_j (u_j z - v_j)`.
fn expand(roots: &[Root]) -> Vec<Complex64> {
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::zero(); poly.len() + 1];
        for (k, a) in poly.iter().enumerate() {
            next[k + 1] += a * r.u;
            next[k] -= a * r.v;
        }
        poly = next;
    }
    poly
}

/// Distance between the complex lines spanned by two coefficient vectors.
fn projective_residual(target_unit: &[Complex64], roots: &[Root]) -> f64 {
    let q = expand(roots);
    let qn = vec_norm(&q);
    if qn == 0.0 {
        return f64::INFINITY;
    }
    let overlap: Complex64 = q.iter().zip(target_unit).map(|(qi, ti)| qi.conj() * ti).sum::<Complex64>() / qn;
    target_unit
        .iter()
        .zip(&q)
        .map(|(ti, qi)| (ti - overlap * qi / qn).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Roots of `sum_k b_k z^k` with `b_0 != 0` and `b_deg != 0`.
fn companion_roots(b: &[Complex64]) -> Result<Vec<Root>> {
    let deg = b.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    // Work in whichever chart keeps the monic normalization bounded.
    let reversed = b[0].norm() > b[deg].norm();
    let coeffs: Vec<Complex64> = if reversed { b.iter().rev().copied().collect() } else { b.to_vec() };
    let lead = coeffs[deg];
    let mut companion = ComplexMatrix::zeros(deg);
    for j in 0..deg {
        companion[(0, j)] = -coeffs[deg - 1 - j] / lead;
        if j + 1 < deg {
            companion[(j + 1, j)] = Complex64::new(1.0, 0.0);
        }
    }
    balance(&mut companion);
    let one = Complex64::new(1.0, 0.0);
    Ok(hessenberg_eigenvalues(&companion)?
        .into_iter()
        .map(|z| if reversed { Root::normalized(z, one) } else { Root::normalized(one, z) })
        .collect())
}

/// Minimum spanning tree over angular distance (Prim), as `(weight, a, b)`.
fn spanning_tree(stars: &[Vec3]) -> Vec<(f64, usize, usize)> {
    let n = stars.len();
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    if n < 2 {
        return edges;
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![(f64::INFINITY, 0usize); n];
    in_tree[0] = true;
    for j in 1..n {
        best[j] = (stars[0].angle_to(&stars[j]), 0);
    }
    for _ in 1..n {
        let (next, &(w, from)) = best
            .iter()
            .enumerate()
            .filter(|(j, _)| !in_tree[*j])
            .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
            .expect("vertices remain");
        in_tree[next] = true;
        edges.push((w, from, next));
        for j in 0..n {
            if !in_tree[j] {
                let d = stars[next].angle_to(&stars[j]);
                if d < best[j].0 {
                    best[j] = (d, next);
                }
            }
        }
    }
    edges
}

/// Mean of the cluster's roots in the chart around its centroid.
fn merged_root(roots: &[Root], members: &[usize]) -> Option<Root> {
    let centroid = members.iter().fold(Vec3::ZERO, |acc, &i| acc + roots[i].star());
    let north = centroid.z() >= 0.0;
    let mut sum = Complex64::zero();
    for &i in members {
        let r = roots[i];
        let (num, den) = if north { (r.v, r.u) } else { (r.u, r.v) };
        if den.norm() == 0.0 {
            return None;
        }
        sum += num / den;
    }
    let mean = sum / members.len() as f64;
    let one = Complex64::new(1.0, 0.0);
    Some(if north { Root::normalized(one, mean) } else { Root::normalized(mean, one) })
}

/// Walks the single-linkage dendrogram top-down, merging every cluster whose
/// merge keeps the polynomial intact and splitting the rest at their widest
/// spanning-tree edge.
fn consolidate(raw: Vec<Root>, target_unit: &[Complex64]) -> Vec<Root> {
    let stars: Vec<Vec3> = raw.iter().map(Root::star).collect();
    let tree = spanning_tree(&stars);
    let mut out = raw.clone();
    let mut pending: Vec<Vec<usize>> = vec![(0..raw.len()).collect()];
    while let Some(cluster) = pending.pop() {
        if cluster.len() < 2 {
            continue;
        }
        if let Some(m) = merged_root(&raw, &cluster) {
            let mut trial = out.clone();
            for &i in &cluster {
                trial[i] = m;
            }
            if projective_residual(target_unit, &trial) <= MERGE_RESIDUAL_TOLERANCE {
                out = trial;
                continue;
            }
        }
        let (left, right) = split(&cluster, &tree);
        pending.push(left);
        pending.push(right);
    }
    out
}

/// Removes the heaviest spanning-tree edge inside `cluster`.
fn split(cluster: &[usize], tree: &[(f64, usize, usize)]) -> (Vec<usize>, Vec<usize>) {
    let inside: Vec<&(f64, usize, usize)> =
        tree.iter().filter(|(_, a, b)| cluster.contains(a) && cluster.contains(b)).collect();
    let cut = inside
        .iter()
        .enumerate()
        .max_by(|x, y| x.1 .0.total_cmp(&y.1 .0))
        .map(|(k, _)| k)
        .expect("cluster of two or more is connected");
    let mut left = vec![inside[cut].1];
    let mut grew = true;
    while grew {
        grew = false;
        for (k, &&(_, a, b)) in inside.iter().enumerate() {
            if k == cut {
                continue;
            }
            let (ha, hb) = (left.contains(&a), left.contains(&b));
            if ha != hb {
                left.push(if ha { b } else { a });
                grew = true;
            }
        }
    }
    let right = cluster.iter().copied().filter(|i| !left.contains(i)).collect();
    (left, right)
}

/// Stars of a pure spin-s state. The amplitudes need not be normalized;
/// only the zero vector is rejected.
pub fn majorana_constellation(amplitudes: &[Complex64], s: SpinLabel) -> Result<MajoranaConstellation> {
    if amplitudes.len() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), found: amplitudes.len() });
    }
    let coeffs = majorana_coefficients(amplitudes, s.twice_s());
    let norm = vec_norm(&coeffs);
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    let unit: Vec<Complex64> = coeffs.iter().map(|a| a / norm).collect();

    let lo = coeffs.iter().position(|a| !a.is_zero()).expect("non-zero");
    let hi = coeffs.iter().rposition(|a| !a.is_zero()).expect("non-zero");
    let mut roots: Vec<Root> = Vec::with_capacity(s.twice_s() as usize);
    roots.extend(core::iter::repeat_n(Root::north(), lo));
    roots.extend(companion_roots(&coeffs[lo..=hi])?);
    roots.extend(core::iter::repeat_n(Root::south(), coeffs.len() - 1 - hi));

    let roots = consolidate(roots, &unit);
    Ok(MajoranaConstellation { stars: roots.iter().map(Root::star).collect() })
}

/// Angles of the coherent state matching `amplitudes` up to global phase,
/// if the overlap reaches `1 - tol`.
pub fn coherent_fit(amplitudes: &[Complex64], s: SpinLabel, tol: f64) -> Result<Option<DirectionAngles>> {
    let norm = vec_norm(amplitudes);
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    if s.twice_s() == 0 {
        if amplitudes.len() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: amplitudes.len() });
        }
        return Ok(Some(DirectionAngles { theta: 0.0, phi: 0.0 }));
    }
    let stars = majorana_constellation(amplitudes, s)?;
    let Some(center) = stars.centroid() else {
        return Ok(None);
    };
    let angles = DirectionAngles::from_vector(&center)?;
    let ket = ket_from_angles(s, angles);
    let overlap: Complex64 =
        ket.amplitudes().iter().zip(amplitudes).map(|(a, b)| a.conj() * b).sum::<Complex64>() / norm;
    Ok((overlap.norm() >= 1.0 - tol).then_some(angles))
}
