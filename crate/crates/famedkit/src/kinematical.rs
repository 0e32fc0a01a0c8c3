//! Kinematical-kernel matrices.
//!
//! `R`, `A`, `B` encode the face combinatorics of the triangulation: with
//! face variables `x` (one per face class, in canonical order) and
//! tetrahedron variables `t`, the vector `Ax + Bt` lists the combinations
//! `x_0(T_j) - x_1(T_j) + x_2(T_j)` followed by `x_2(T_j) - x_3(T_j) + t_j`,
//! and `R` has the single entry `ε(T_j)` at `(t_j, x_0(T_j))`.
//!
//! When `det A ≠ 0` the kernel collapses to the bounded Gaussian
//! `e^{2πi tᵀQt}/|det A|` with `Q = ½[-RA⁻¹B - (RA⁻¹B)ᵀ]`, and
//! `𝒢 = -2 diag(ε) Q diag(ε) + diag(max(ε,0))`.

use crate::exact::{rat, rat_int, Rat, RatMat};
use crate::tri::{FaceSlot, OrderedTriangulation};
use num_traits::Zero;
use thiserror::Error;

#[derive(Clone, Debug)]
pub struct KinematicalMatrices {
    /// N×2N, entry ε(T_j) in column x₀(T_j).
    pub r: RatMat,
    /// 2N×2N face-adjacency matrix.
    pub a: RatMat,
    /// 2N×N, entry 1 at (w′_j, t_j).
    pub b: RatMat,
    pub det_a: Rat,
    /// N×N symmetric Gaussian exponent; requires det A ≠ 0.
    pub q: RatMat,
    /// N×N duality matrix 𝒢.
    pub script_g: RatMat,
    pub signs: Vec<i8>,
}

#[derive(Error, Debug)]
pub enum KinematicalError {
    #[error("face-adjacency matrix A is singular (FAMED condition 2 fails)")]
    SingularA,
}

/// Build `R`, `A`, `B` from the face combinatorics.
pub fn build_rab(tri: &OrderedTriangulation) -> (RatMat, RatMat, RatMat) {
    let n = tri.n();
    let classes = tri.face_classes();
    let mut r = RatMat::zeros(n, 2 * n);
    let mut a = RatMat::zeros(2 * n, 2 * n);
    let mut b = RatMat::zeros(2 * n, n);
    for (j, tet) in tri.tetrahedra.iter().enumerate() {
        let x = |k: usize| tri.face_class_index(&classes, FaceSlot { tet: j, face: k });
        r[(j, x(0))] = rat_int(tet.sign as i64);
        // row w_j: x0 - x1 + x2
        for (k, s) in [(0usize, 1i64), (1, -1), (2, 1)] {
            let col = x(k);
            a[(j, col)] = &a[(j, col)] + rat_int(s);
        }
        // row w'_j: x2 - x3 + t_j
        for (k, s) in [(2usize, 1i64), (3, -1)] {
            let col = x(k);
            a[(n + j, col)] = &a[(n + j, col)] + rat_int(s);
        }
        b[(n + j, j)] = rat_int(1);
    }
    (r, a, b)
}

/// `Q = ½[-RA⁻¹B - (RA⁻¹B)ᵀ]`, exact.
pub fn compute_q(r: &RatMat, a: &RatMat, b: &RatMat) -> Result<RatMat, KinematicalError> {
    let a_inv = a.inverse().ok_or(KinematicalError::SingularA)?;
    let rab = r.mul(&a_inv).mul(b);
    let q = RatMat::zeros(rab.nrows(), rab.ncols())
        .sub(&rab)
        .sub(&rab.transpose())
        .scale(&rat(1, 2));
    Ok(q)
}

/// `𝒢 = -2 diag(ε) Q diag(ε) + diag(max(ε,0))`.
pub fn compute_script_g(q: &RatMat, signs: &[i8]) -> RatMat {
    let n = signs.len();
    let mut g = RatMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let s = (signs[i] * signs[j]) as i64;
            g[(i, j)] = &q[(i, j)] * rat_int(-2 * s);
        }
        if signs[i] > 0 {
            g[(i, i)] = &g[(i, i)] + rat_int(1);
        }
    }
    g
}

pub fn build(tri: &OrderedTriangulation) -> Result<KinematicalMatrices, KinematicalError> {
    let (r, a, b) = build_rab(tri);
    let det_a = a.det();
    if det_a.is_zero() {
        return Err(KinematicalError::SingularA);
    }
    let q = compute_q(&r, &a, &b)?;
    let signs = tri.signs();
    let script_g = compute_script_g(&q, &signs);
    Ok(KinematicalMatrices {
        r,
        a,
        b,
        det_a,
        q,
        script_g,
        signs,
    })
}
