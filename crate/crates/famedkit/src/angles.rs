//! Angle structures: polytope feasibility, the Lobachevsky volume
//! functional, and its constrained maximization.

use crate::exact::{rat_int, Rat};
use crate::nz::edge_incidence;
use crate::simplex::{maximize as lp_maximize, LpOutcome};
use crate::tri::{OrderedTriangulation, PeripheralCurve};
use nalgebra::{DMatrix, DVector};
use num_traits::{Signed, ToPrimitive, Zero};
use std::f64::consts::PI;

/// Angles `(a_1, b_1, c_1, …, a_N, b_N, c_N)` in radians.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleStructure {
    pub angles: Vec<f64>,
}

impl AngleStructure {
    pub fn n(&self) -> usize {
        self.angles.len() / 3
    }

    pub fn abc(&self, tet: usize) -> (f64, f64, f64) {
        (
            self.angles[3 * tet],
            self.angles[3 * tet + 1],
            self.angles[3 * tet + 2],
        )
    }

    pub fn regular(n: usize) -> Self {
        AngleStructure {
            angles: vec![PI / 3.0; 3 * n],
        }
    }

    /// Max violation of the per-tetrahedron sum and the edge-balance
    /// conditions.
    pub fn balance_residual(&self, tri: &OrderedTriangulation) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.n() {
            let (a, b, c) = self.abc(k);
            worst = worst.max((a + b + c - PI).abs());
        }
        for row in &angle_weight_rows(tri) {
            let w: f64 = row
                .iter()
                .zip(&self.angles)
                .map(|(c, x)| *c as f64 * x)
                .sum();
            worst = worst.max((w - 2.0 * PI).abs());
        }
        worst
    }
}

/// Edge-weight rows in angle coordinates: one row per edge class, entries on
/// `(a_j, b_j, c_j)`. The shape-symbol incidence translates through the
/// sign-dependent symbol-to-angle assignment.
pub fn angle_weight_rows(tri: &OrderedTriangulation) -> Vec<Vec<i64>> {
    let n = tri.n();
    let inc = edge_incidence(tri);
    let signs = tri.signs();
    let mut rows = Vec::with_capacity(inc.e.len());
    for i in 0..inc.e.len() {
        let mut row = vec![0i64; 3 * n];
        for j in 0..n {
            row[3 * j] = inc.e[i][j];
            if signs[j] > 0 {
                row[3 * j + 1] = inc.epp[i][j];
                row[3 * j + 2] = inc.ep[i][j];
            } else {
                row[3 * j + 1] = inc.ep[i][j];
                row[3 * j + 2] = inc.epp[i][j];
            }
        }
        rows.push(row);
    }
    rows
}

/// Angular-holonomy row of a peripheral curve in angle coordinates, plus the
/// constant `π·nu` term: `λ(γ) = row·angles + π·nu`.
pub fn angular_holonomy_row(tri: &OrderedTriangulation, curve: &PeripheralCurve) -> Vec<i64> {
    let n = tri.n();
    let signs = tri.signs();
    let mut row = vec![0i64; 3 * n];
    for j in 0..n {
        row[3 * j] += curve.c[j];
        if signs[j] > 0 {
            row[3 * j + 1] += curve.cpp[j];
            row[3 * j + 2] += curve.cp[j];
        } else {
            row[3 * j + 1] += curve.cp[j];
            row[3 * j + 2] += curve.cpp[j];
        }
    }
    row
}

pub fn angular_holonomy(
    tri: &OrderedTriangulation,
    alpha: &AngleStructure,
    curve: &PeripheralCurve,
) -> f64 {
    let row = angular_holonomy_row(tri, curve);
    let linear: f64 = row
        .iter()
        .zip(&alpha.angles)
        .map(|(c, x)| *c as f64 * x)
        .sum();
    linear + PI * curve.nu as f64
}

/// Exact LP: maximize the minimum angle over the balanced polytope
/// (optionally on a fixed-holonomy slice, with θ in units of π). Returns an
/// interior witness when the optimum is strictly positive.
fn feasibility_lp(
    tri: &OrderedTriangulation,
    slice: Option<(&PeripheralCurve, Rat)>,
) -> Option<Vec<Rat>> {
    let n = tri.n();
    let nv = 3 * n; // angles in units of π
    // variables: [angles | delta | per-angle slacks | delta cap slack]
    let total = nv + 1 + nv + 1;
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    let mut rhs: Vec<Rat> = Vec::new();
    let push = |rows: &mut Vec<Vec<Rat>>, rhs: &mut Vec<Rat>, row: Vec<Rat>, b: Rat| {
        rows.push(row);
        rhs.push(b);
    };
    for k in 0..n {
        let mut row = vec![Rat::zero(); total];
        for j in 0..3 {
            row[3 * k + j] = rat_int(1);
        }
        push(&mut rows, &mut rhs, row, rat_int(1));
    }
    for wrow in angle_weight_rows(tri) {
        let mut row = vec![Rat::zero(); total];
        for (j, &cj) in wrow.iter().enumerate() {
            row[j] = rat_int(cj);
        }
        push(&mut rows, &mut rhs, row, rat_int(2));
    }
    if let Some((curve, theta_over_pi)) = slice {
        let hrow = angular_holonomy_row(tri, curve);
        let mut row = vec![Rat::zero(); total];
        for (j, &cj) in hrow.iter().enumerate() {
            row[j] = rat_int(cj);
        }
        push(&mut rows, &mut rhs, row, theta_over_pi - rat_int(curve.nu));
    }
    // x_i - delta - s_i = 0
    for i in 0..nv {
        let mut row = vec![Rat::zero(); total];
        row[i] = rat_int(1);
        row[nv] = rat_int(-1);
        row[nv + 1 + i] = rat_int(-1);
        push(&mut rows, &mut rhs, row, rat_int(0));
    }
    // delta <= 1
    let mut cap = vec![Rat::zero(); total];
    cap[nv] = rat_int(1);
    cap[total - 1] = rat_int(1);
    push(&mut rows, &mut rhs, cap, rat_int(1));

    let mut c = vec![Rat::zero(); total];
    c[nv] = rat_int(1);
    match lp_maximize(&rows, &rhs, &c) {
        LpOutcome::Optimal { x, value } if value.is_positive() => Some(x[..nv].to_vec()),
        _ => None,
    }
}

/// FAMED condition (1): an interior point of the angle polytope, or `None`.
pub fn feasibility(tri: &OrderedTriangulation) -> Option<Vec<f64>> {
    feasibility_lp(tri, None).map(|x| {
        x.iter()
            .map(|r| r.to_f64().unwrap() * PI)
            .collect()
    })
}

/// Lobachevsky function `λ(x) = -∫₀ˣ log|2 sin t| dt`.
///
/// Evaluated as half the Clausen function: `λ(x) = ½ Cl₂(2x)` with the
/// log-sine power series `Cl₂(θ) = θ - θ log θ + Σ ζ(2k) θ^{2k+1} /
/// (k (2k+1) (2π)^{2k})`, accurate to machine precision on `[0, π]`.
pub fn lobachevsky(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    // reduce to [0, pi)
    let mut r = x % PI;
    if r < 0.0 {
        r += PI;
    }
    let theta = 2.0 * r; // in [0, 2pi)
    let cl2 = if theta <= PI {
        clausen2(theta)
    } else {
        -clausen2(2.0 * PI - theta)
    };
    0.5 * cl2
}

fn zeta_even(k: usize) -> f64 {
    // ζ(2k); closed forms for small k, rapidly convergent tail sums after
    const SMALL: [f64; 6] = [
        0.0,                   // unused
        1.6449340668482264,    // ζ(2)
        1.0823232337111382,    // ζ(4)
        1.017_343_061_984_449,    // ζ(6)
        1.0040773561979443,    // ζ(8)
        1.0009945751278181,    // ζ(10)
    ];
    if k < SMALL.len() {
        return SMALL[k];
    }
    let mut s = 1.0;
    let mut n = 2.0f64;
    loop {
        let t = n.powi(-(2 * k as i32));
        if t < 1e-20 {
            return s;
        }
        s += t;
        n += 1.0;
    }
}

fn clausen2(theta: f64) -> f64 {
    debug_assert!((0.0..=PI + 1e-9).contains(&theta));
    if theta == 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    let ratio = (theta / (2.0 * PI)).powi(2);
    let mut pow = ratio; // (θ/2π)^{2k}
    for k in 1..60 {
        let term = zeta_even(k) * pow * theta / (k as f64 * (2 * k + 1) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1.0) {
            break;
        }
        pow *= ratio;
    }
    theta - theta * theta.ln() + sum
}

/// `𝒱(α) = Σ λ(angle)`.
pub fn volume_functional(alpha: &AngleStructure) -> f64 {
    alpha.angles.iter().map(|&x| lobachevsky(x)).sum()
}

/// Orthonormal basis of the null space of `c` (columns), by Gram–Schmidt
/// against an orthonormalized row basis. The thin SVD cannot be used here:
/// it only returns `min(m, n)` right-singular vectors.
pub fn nullspace(c: &DMatrix<f64>) -> DMatrix<f64> {
    let n = c.ncols();
    let mut row_basis: Vec<DVector<f64>> = Vec::new();
    for i in 0..c.nrows() {
        let mut v = c.row(i).transpose();
        for b in &row_basis {
            let d = b.dot(&v);
            v -= b * d;
        }
        let norm = v.norm();
        if norm > 1e-10 * c.nrows() as f64 {
            row_basis.push(v / norm);
        }
    }
    let mut null_basis: Vec<DVector<f64>> = Vec::new();
    for i in 0..n {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        for b in row_basis.iter().chain(null_basis.iter()) {
            let d = b.dot(&v);
            v -= b * d;
        }
        // second re-orthogonalization pass for numerical hygiene
        for b in row_basis.iter().chain(null_basis.iter()) {
            let d = b.dot(&v);
            v -= b * d;
        }
        let norm = v.norm();
        if norm > 1e-8 {
            null_basis.push(v / norm);
        }
    }
    let mut z = DMatrix::zeros(n, null_basis.len());
    for (k, b) in null_basis.iter().enumerate() {
        z.set_column(k, b);
    }
    z
}

#[derive(Clone, Debug)]
pub struct VolumeReport {
    pub maximizer: AngleStructure,
    pub value: f64,
    pub slice_theta: Option<f64>,
    pub converged: bool,
    pub kkt_residual: f64,
    /// Angles within `1e-6` of `0` or `π` at a non-converged stop.
    pub boundary_angles: Vec<usize>,
    pub iterations: usize,
}

/// Maximize the volume functional over the balanced polytope, optionally on
/// the slice `λ_curve(α) = θ`. Projected Newton with an ascent fallback;
/// strict concavity on the interior makes the interior maximizer unique.
pub fn maximize_volume(
    tri: &OrderedTriangulation,
    slice: Option<(&str, f64)>,
) -> Result<VolumeReport, String> {
    let n = tri.n();
    let nv = 3 * n;
    // constraint rows and rhs
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for k in 0..n {
        let mut row = vec![0.0; nv];
        for j in 0..3 {
            row[3 * k + j] = 1.0;
        }
        rows.push(row);
        rhs.push(PI);
    }
    for wrow in angle_weight_rows(tri) {
        rows.push(wrow.iter().map(|&c| c as f64).collect());
        rhs.push(2.0 * PI);
    }
    let slice_curve = match slice {
        Some((name, theta)) => {
            let curve = tri.curve(name).map_err(|e| e.to_string())?;
            let hrow = angular_holonomy_row(tri, curve);
            rows.push(hrow.iter().map(|&c| c as f64).collect());
            rhs.push(theta - PI * curve.nu as f64);
            Some((curve.clone(), theta))
        }
        None => None,
    };

    // interior start from the exact LP (with the slice constraint when set)
    let witness = match &slice_curve {
        Some((curve, theta)) => {
            let th = Rat::from_float(*theta / PI).ok_or("bad slice theta")?;
            feasibility_lp(tri, Some((curve, th)))
                .map(|x| x.iter().map(|r| r.to_f64().unwrap() * PI).collect::<Vec<f64>>())
        }
        None => feasibility(tri),
    };
    let Some(x0) = witness else {
        return Err("angle polytope (or slice) is empty".to_string());
    };

    let c_mat = DMatrix::from_fn(rows.len(), nv, |i, j| rows[i][j]);
    let z = nullspace(&c_mat);
    if z.ncols() == 0 {
        return Err("constraint set has no interior directions".to_string());
    }

    let mut x = DVector::from_vec(x0);
    let grad = |x: &DVector<f64>| -> DVector<f64> {
        DVector::from_fn(nv, |i, _| -((2.0 * x[i].sin()).abs()).ln())
    };
    let value = |x: &DVector<f64>| -> f64 { x.iter().map(|&a| lobachevsky(a)).sum() };

    let mut kkt = f64::INFINITY;
    let mut converged = false;
    let mut iters = 0usize;
    for it in 0..500 {
        iters = it + 1;
        let g = grad(&x);
        let gz = z.transpose() * &g;
        kkt = gz.norm();
        if kkt < 1e-9 {
            converged = true;
            break;
        }
        // reduced Newton direction; fall back to gradient if not ascent
        let h = DMatrix::from_fn(nv, nv, |i, j| {
            if i == j {
                -1.0 / x[i].tan()
            } else {
                0.0
            }
        });
        let hz = z.transpose() * &h * &z;
        let dir_u = match hz.clone().lu().solve(&(-&gz)) {
            Some(d) if d.dot(&gz) > 0.0 => d,
            _ => gz.clone(),
        };
        let mut dir = &z * dir_u;
        // fraction-to-boundary cap
        let mut tmax: f64 = 1.0;
        for i in 0..nv {
            if dir[i] < 0.0 {
                tmax = tmax.min(0.9 * (x[i] / -dir[i]));
            } else if dir[i] > 0.0 {
                tmax = tmax.min(0.9 * ((PI - x[i]) / dir[i]));
            }
        }
        if !tmax.is_finite() || tmax <= 0.0 {
            break;
        }
        // Armijo backtracking
        let f0 = value(&x);
        let slope = g.dot(&dir);
        let mut t = tmax.min(1.0);
        let mut accepted = false;
        for _ in 0..60 {
            let cand = &x + t * &dir;
            if value(&cand) >= f0 + 1e-4 * t * slope {
                x = cand;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            dir = &z * gz.clone();
            let mut t2 = tmax.min(1.0);
            let mut ok = false;
            for _ in 0..60 {
                let cand = &x + t2 * &dir;
                if value(&cand) > f0 {
                    x = cand;
                    ok = true;
                    break;
                }
                t2 *= 0.5;
            }
            if !ok {
                break;
            }
        }
    }

    let boundary_angles = (0..nv)
        .filter(|&i| x[i] < 1e-6 || x[i] > PI - 1e-6)
        .collect();
    let maximizer = AngleStructure {
        angles: x.iter().cloned().collect(),
    };
    let value = volume_functional(&maximizer);
    Ok(VolumeReport {
        maximizer,
        value,
        slice_theta: slice.map(|(_, t)| t),
        converged,
        kkt_residual: kkt,
        boundary_angles,
        iterations: iters,
    })
}
