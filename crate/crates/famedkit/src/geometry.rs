//! Shape solutions of the gluing equations and the potential function.
//!
//! The solver works in the strip coordinates `y_k = ε_k (Log z_k - iπ)`,
//! where the three log-shapes have the closed forms
//!
//! ```text
//! ε = +1:  Log z = y + iπ,   Log z′ = -Log(1+e^y),   Log z″ = Log(1+e^{-y})
//! ε = -1:  Log z = iπ - y,   Log z′ = -Log(1+e^{-y}), Log z″ = Log(1+e^y)
//! ```
//!
//! so `Log z + Log z′ + Log z″ = iπ` holds identically and Newton
//! continuation never changes logarithm branches.

use crate::exact::{Rat, RatMat};
use crate::kinematical::KinematicalMatrices;
use crate::nz::NzSystem;
use crate::special::dilog;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum GeometryError {
    #[error("Newton iteration diverged: residual {residual} after {steps} steps")]
    Diverged { residual: f64, steps: usize },
    #[error("𝐁 is singular; the Neumann–Zagier system cannot be solved")]
    SingularB,
    #[error("argument left the definition strip")]
    StripViolation,
}

/// `Log(1 + e^w)`, stable for large `|Re w|`.
fn log1p_exp(w: Complex64) -> Complex64 {
    if w.re > 40.0 {
        w + (-w).exp().ln_1p_complex()
    } else {
        w.exp().ln_1p_complex()
    }
}

trait Ln1pComplex {
    fn ln_1p_complex(self) -> Complex64;
}

impl Ln1pComplex for Complex64 {
    fn ln_1p_complex(self) -> Complex64 {
        // ln(1 + w); series for small w, direct otherwise
        if self.norm() < 1e-4 {
            let w = self;
            w - w * w / 2.0 + w * w * w / 3.0 - w * w * w * w / 4.0
        } else {
            (Complex64::new(1.0, 0.0) + self).ln()
        }
    }
}

/// Log-shapes of one tetrahedron as functions of its strip coordinate.
pub fn log_shapes(y: Complex64, sign: i8) -> (Complex64, Complex64, Complex64) {
    let ipi = Complex64::new(0.0, PI);
    if sign > 0 {
        (y + ipi, -log1p_exp(y), log1p_exp(-y))
    } else {
        (ipi - y, -log1p_exp(-y), log1p_exp(y))
    }
}

#[derive(Clone, Debug)]
pub struct ShapeSolution {
    /// Strip coordinates, one per tetrahedron.
    pub y: Vec<Complex64>,
    /// Shapes `z_k` recovered from `y`.
    pub z: Vec<Complex64>,
    pub log_z: Vec<Complex64>,
    pub log_zp: Vec<Complex64>,
    pub log_zpp: Vec<Complex64>,
    /// Max-norm defect of `𝐀 Log z + 𝐁 Log z″ - iν - iu`.
    pub residual: f64,
    pub u_target: Complex64,
    /// All shapes in the open upper half-plane.
    pub geometric: bool,
    pub newton_steps: usize,
}

impl ShapeSolution {
    pub fn volume(&self) -> f64 {
        self.z.iter().map(|&z| crate::special::bloch_wigner(z)).sum()
    }
}

fn build_solution(
    y: &DVector<Complex64>,
    signs: &[i8],
    residual: f64,
    u: Complex64,
    steps: usize,
) -> ShapeSolution {
    let n = signs.len();
    let mut z = Vec::with_capacity(n);
    let mut lz = Vec::with_capacity(n);
    let mut lzp = Vec::with_capacity(n);
    let mut lzpp = Vec::with_capacity(n);
    for k in 0..n {
        let (a, b, c) = log_shapes(y[k], signs[k]);
        lz.push(a);
        lzp.push(b);
        lzpp.push(c);
        z.push(a.exp());
    }
    let geometric = z.iter().all(|zz| zz.im > 0.0);
    ShapeSolution {
        y: y.iter().cloned().collect(),
        z,
        log_z: lz,
        log_zp: lzp,
        log_zpp: lzpp,
        residual,
        u_target: u,
        geometric,
        newton_steps: steps,
    }
}

/// Residual vector `𝐀 Log z + 𝐁 Log z″ - iν - iu` at strip coordinates `y`.
fn gluing_residual(nz: &NzSystem, y: &DVector<Complex64>, u: Complex64) -> DVector<Complex64> {
    let n = nz.signs.len();
    let mut f = DVector::from_element(n, Complex64::new(0.0, 0.0));
    let mut lz = vec![Complex64::new(0.0, 0.0); n];
    let mut lzpp = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        let (a, _, c) = log_shapes(y[k], nz.signs[k]);
        lz[k] = a;
        lzpp[k] = c;
    }
    for i in 0..n {
        let mut acc = Complex64::new(0.0, -PI * nz.nu[i] as f64);
        for k in 0..n {
            acc += nz.abold[i][k] as f64 * lz[k] + nz.bbold[i][k] as f64 * lzpp[k];
        }
        if i == nz.curve_row_index {
            acc -= Complex64::i() * u;
        }
        f[i] = acc;
    }
    f
}

/// `1/(1 + e^{-w})`, stable for large `|Re w|`.
fn logistic(w: Complex64) -> Complex64 {
    if w.re >= 0.0 {
        1.0 / (1.0 + (-w).exp())
    } else {
        let e = w.exp();
        e / (1.0 + e)
    }
}

fn gluing_jacobian(nz: &NzSystem, y: &DVector<Complex64>) -> DMatrix<Complex64> {
    let n = nz.signs.len();
    DMatrix::from_fn(n, n, |i, k| {
        let sign = nz.signs[k] as f64;
        // dLog z/dy = ε; dLog z″/dy = -1/(1+e^y) for ε = +1,
        // +1/(1+e^{-y}) for ε = -1
        let d_lzpp = if nz.signs[k] > 0 {
            logistic(y[k]) - 1.0
        } else {
            logistic(y[k])
        };
        nz.abold[i][k] as f64 * Complex64::new(sign, 0.0) + nz.bbold[i][k] as f64 * d_lzpp
    })
}

/// Damped Newton iteration for `𝐀 Log z + 𝐁 Log z″ = iν + iu`.
///
/// `z0` are initial shapes in the upper half-plane (default: all
/// `e^{iπ/3}`). Shapes may leave the upper half-plane during continuation;
/// that is reported through `geometric`, not as an error.
pub fn solve_gluing(
    nz: &NzSystem,
    u: Complex64,
    z0: Option<&[Complex64]>,
) -> Result<ShapeSolution, GeometryError> {
    let n = nz.signs.len();
    let mut y = DVector::from_fn(n, |k, _| {
        let z = z0
            .map(|zs| zs[k])
            .unwrap_or_else(|| Complex64::from_polar(1.0, PI / 3.0));
        let sign = nz.signs[k] as f64;
        sign * (z.ln() - Complex64::new(0.0, PI))
    });
    let max_norm = |v: &DVector<Complex64>| v.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    let mut res = gluing_residual(nz, &y, u);
    let mut rnorm = max_norm(&res);
    let mut stall = 0usize;
    for step in 0..200 {
        if rnorm < 1e-12 {
            return Ok(build_solution(&y, &nz.signs, rnorm, u, step));
        }
        let jac = gluing_jacobian(nz, &y);
        let delta = jac
            .lu()
            .solve(&res)
            .ok_or(GeometryError::SingularB)?;
        // backtracking: halve until the residual decreases
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand = &y - &delta * Complex64::new(t, 0.0);
            let cres = gluing_residual(nz, &cand, u);
            let cnorm = max_norm(&cres);
            if cnorm < rnorm {
                y = cand;
                res = cres;
                rnorm = cnorm;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            stall += 1;
            if stall >= 50 {
                return Err(GeometryError::Diverged {
                    residual: rnorm,
                    steps: step,
                });
            }
        } else {
            stall = 0;
        }
    }
    if rnorm < 1e-12 {
        Ok(build_solution(&y, &nz.signs, rnorm, u, 200))
    } else {
        Err(GeometryError::Diverged {
            residual: rnorm,
            steps: 200,
        })
    }
}

/// Continuation: solve at each `u` on the segment from `from` to `to`,
/// reusing the previous solution as the start.
pub fn sweep_u(
    nz: &NzSystem,
    from: Complex64,
    to: Complex64,
    steps: usize,
) -> Result<Vec<ShapeSolution>, GeometryError> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut start: Option<Vec<Complex64>> = None;
    for i in 0..=steps {
        let t = i as f64 / steps.max(1) as f64;
        let u = from + (to - from) * t;
        let sol = solve_gluing(nz, u, start.as_deref())?;
        start = Some(sol.z.clone());
        out.push(sol);
    }
    Ok(out)
}

/// Hyperbolic volume `Σ D(z_k)` of a geometric solution.
pub fn hyperbolic_volume(sol: &ShapeSolution) -> f64 {
    sol.volume()
}

/// The linear data entering the potential: `w = 𝐁⁻¹(ν + u) - 𝒢π` as an
/// exact-rational multiple of π plus the exact `𝐁⁻¹` column applied to `u`.
#[derive(Clone, Debug)]
pub struct PotentialData {
    /// N×N Gaussian coefficient (from the kinematical kernel).
    pub q: DMatrix<f64>,
    pub signs: Vec<i8>,
    /// π-rational constant part of `𝐁⁻¹ν - 𝒢π`, exact (units of π).
    pub w_const_over_pi: Vec<Rat>,
    /// `𝐁⁻¹` column applied to the curve slot of `u`.
    pub binv_curve_col: Vec<Rat>,
    pub u: Complex64,
}

impl PotentialData {
    pub fn new(
        km: &KinematicalMatrices,
        nz: &NzSystem,
        u: Complex64,
    ) -> Result<Self, GeometryError> {
        let binv = nz.b_inv.as_ref().ok_or(GeometryError::SingularB)?;
        let n = nz.signs.len();
        // 𝐁⁻¹ν - 𝒢π, exact in units of π
        let nu_vec = RatMat::from_rows(
            nz.nu
                .iter()
                .map(|&x| vec![Rat::from_integer(x.into())])
                .collect(),
        );
        let binv_nu = binv.mul(&nu_vec);
        let ones = RatMat::from_rows(vec![vec![Rat::from_integer(1.into())]; n]);
        let gpi = km.script_g.mul(&ones);
        let mut w_const = Vec::with_capacity(n);
        for i in 0..n {
            w_const.push(&binv_nu[(i, 0)] - &gpi[(i, 0)]);
        }
        let binv_curve_col = (0..n).map(|i| binv[(i, nz.curve_row_index)].clone()).collect();
        Ok(PotentialData {
            q: km.q.to_f64(),
            signs: nz.signs.clone(),
            w_const_over_pi: w_const,
            binv_curve_col,
            u,
        })
    }

    /// `w = 𝐁⁻¹(ν + u) - 𝒢π` as complex numbers.
    pub fn w_vector(&self) -> Vec<Complex64> {
        self.w_const_over_pi
            .iter()
            .zip(&self.binv_curve_col)
            .map(|(c, bc)| {
                Complex64::new(PI * c.to_f64().unwrap(), 0.0) + bc.to_f64().unwrap() * self.u
            })
            .collect()
    }

    /// The weight vector `𝒲 = -diag(ε) w` of the partition integrand.
    pub fn script_w(&self) -> Vec<Complex64> {
        self.w_vector()
            .iter()
            .zip(&self.signs)
            .map(|(w, &s)| -(s as f64) * w)
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct PotentialEval {
    pub value: Complex64,
    pub gradient: Vec<Complex64>,
    pub hessian: DMatrix<Complex64>,
}

/// `S(y) = i yᵀQy + (-diag ε y)·w + i Σ ε_k Li₂(-e^{y_k})` with analytic
/// gradient and Hessian. Each `y_k` must lie in its open strip.
pub fn potential_s(data: &PotentialData, y: &[Complex64]) -> Result<PotentialEval, GeometryError> {
    let n = data.signs.len();
    for (k, &yk) in y.iter().enumerate() {
        let band = if data.signs[k] > 0 {
            -PI < yk.im && yk.im < 0.0
        } else {
            0.0 < yk.im && yk.im < PI
        };
        if !band {
            return Err(GeometryError::StripViolation);
        }
    }
    let w = data.w_vector();
    let yv = DVector::from_column_slice(y);
    let qy = DMatrix::from_fn(n, n, |i, j| Complex64::new(data.q[(i, j)], 0.0)) * &yv;
    let mut value = Complex64::i() * (0..n).map(|i| y[i] * qy[i]).sum::<Complex64>();
    let mut gradient = Vec::with_capacity(n);
    let mut hess_diag = Vec::with_capacity(n);
    for k in 0..n {
        let s = data.signs[k] as f64;
        value += -(s) * y[k] * w[k];
        let li2 = dilog(-(y[k].exp())).map_err(|_| GeometryError::StripViolation)?;
        value += Complex64::i() * s * li2;
        // d/dy [i ε Li₂(-e^y)] = -i ε Log(1+e^y)
        let lg = log1p_exp(y[k]);
        gradient.push(2.0 * Complex64::i() * qy[k] - s * w[k] - Complex64::i() * s * lg);
        // d²: -i ε e^y/(1+e^y) = -i ε /(1+e^{-y})
        hess_diag.push(-Complex64::i() * s / (1.0 + (-y[k]).exp()));
    }
    let hessian = DMatrix::from_fn(n, n, |i, j| {
        let base = 2.0 * Complex64::i() * Complex64::new(data.q[(i, j)], 0.0);
        if i == j {
            base + hess_diag[i]
        } else {
            base
        }
    });
    Ok(PotentialEval {
        value,
        gradient,
        hessian,
    })
}

/// Critical point of `S` from the gluing solution at the same `u`:
/// checks `∇S(y_c) ≈ 0` and returns the evaluation there.
pub fn find_critical_point(
    data: &PotentialData,
    nz: &NzSystem,
    start: Option<&[Complex64]>,
) -> Result<(ShapeSolution, PotentialEval), GeometryError> {
    let sol = solve_gluing(nz, data.u, start)?;
    let eval = potential_s(data, &sol.y)?;
    Ok((sol, eval))
}

/// Complex holonomy of a stored peripheral curve at a solution.
pub fn curve_holonomy(
    tri: &crate::tri::OrderedTriangulation,
    curve: &crate::tri::PeripheralCurve,
    sol: &ShapeSolution,
) -> Complex64 {
    let n = tri.n();
    let mut h = Complex64::new(0.0, PI * curve.nu as f64);
    for k in 0..n {
        h += curve.c[k] as f64 * sol.log_z[k]
            + curve.cp[k] as f64 * sol.log_zp[k]
            + curve.cpp[k] as f64 * sol.log_zpp[k];
    }
    h
}

/// Residual of the dropped edge equation at a solution (the reinstated row
/// must equal 2πi).
pub fn dropped_edge_residual(
    tri: &crate::tri::OrderedTriangulation,
    nz: &NzSystem,
    sol: &ShapeSolution,
) -> f64 {
    let inc = crate::nz::edge_incidence(tri);
    let i = nz.dropped_edge;
    let mut acc = Complex64::new(0.0, -2.0 * PI);
    for k in 0..tri.n() {
        acc += inc.e[i][k] as f64 * sol.log_z[k]
            + inc.ep[i][k] as f64 * sol.log_zp[k]
            + inc.epp[i][k] as f64 * sol.log_zpp[k];
    }
    acc.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematical;
    use crate::nz::nz_for_longitude;
    use crate::presets;

    const VOL_41: f64 = 2.029883212819307;

    fn fig8_setup() -> (
        crate::tri::OrderedTriangulation,
        KinematicalMatrices,
        NzSystem,
    ) {
        let t = presets::load("fig8").unwrap();
        let km = kinematical::build(&t).unwrap();
        let nz = nz_for_longitude(&t, None).unwrap();
        (t, km, nz)
    }

    #[test]
    fn fig8_complete_solution_is_regular() {
        let (_, _, nz) = fig8_setup();
        let sol = solve_gluing(&nz, Complex64::new(0.0, 0.0), None).unwrap();
        assert!(sol.residual < 1e-12);
        assert!(sol.geometric);
        let want = Complex64::from_polar(1.0, PI / 3.0);
        for z in &sol.z {
            assert!((z - want).norm() < 1e-12, "z = {z}");
        }
        // exact start: zero Newton steps
        let sol2 = solve_gluing(&nz, Complex64::new(0.0, 0.0), Some(&sol.z)).unwrap();
        assert_eq!(sol2.newton_steps, 0);
    }

    #[test]
    fn fig8_volume_matches_bloch_wigner() {
        let (_, _, nz) = fig8_setup();
        let sol = solve_gluing(&nz, Complex64::new(0.0, 0.0), None).unwrap();
        assert!((hyperbolic_volume(&sol) - VOL_41).abs() < 1e-9);
    }

    #[test]
    fn fig8_deformed_solution() {
        let (_, _, nz) = fig8_setup();
        let u = Complex64::new(0.0, 0.1);
        let sol = solve_gluing(&nz, u, None).unwrap();
        assert!(sol.residual < 1e-12);
        let want = Complex64::from_polar(1.0, PI / 3.0);
        for z in &sol.z {
            let d = (z - want).norm();
            assert!(d > 1e-4 && d < 0.2, "shape moved by {d}");
        }
        // deformation decreases volume
        assert!(hyperbolic_volume(&sol) < VOL_41 - 1e-6);
    }

    #[test]
    fn branch_identity_holds_exactly() {
        let (_, _, nz) = fig8_setup();
        let sol = solve_gluing(&nz, Complex64::new(0.02, 0.07), None).unwrap();
        for k in 0..sol.z.len() {
            let sum = sol.log_z[k] + sol.log_zp[k] + sol.log_zpp[k];
            assert!((sum - Complex64::new(0.0, PI)).norm() < 1e-12);
        }
    }

    #[test]
    fn holonomy_consistency_at_solutions() {
        let (t, _, nz) = fig8_setup();
        for &im in &[0.0, 0.05, 0.1] {
            let u = Complex64::new(0.0, im);
            let sol = solve_gluing(&nz, u, None).unwrap();
            let l = t.curve("l").unwrap();
            let h = curve_holonomy(&t, l, &sol);
            assert!((h - Complex64::i() * u).norm() < 1e-10, "H(l) = {h}, u = {u}");
        }
    }

    #[test]
    fn dropped_edge_residual_small() {
        let (t, _, nz) = fig8_setup();
        let sol = solve_gluing(&nz, Complex64::new(0.0, 0.1), None).unwrap();
        assert!(dropped_edge_residual(&t, &nz, &sol) < 1e-10);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (_, km, nz) = fig8_setup();
        let data = PotentialData::new(&km, &nz, Complex64::new(0.0, 0.0)).unwrap();
        let mut seed = 42u64;
        let mut rng = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        let h = 1e-6;
        for _ in 0..20 {
            let y: Vec<Complex64> = (0..2)
                .map(|k| {
                    let re = -1.5 + 3.0 * rng();
                    let im = 0.2 + 2.6 * rng() / PI; // stay inside (0, π) scaled below
                    let im = im.min(0.9) * PI * 0.9 + 0.05;
                    if nz.signs[k] > 0 {
                        Complex64::new(re, -im)
                    } else {
                        Complex64::new(re, im)
                    }
                })
                .collect();
            let eval = potential_s(&data, &y).unwrap();
            for k in 0..2 {
                for dir in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
                    let mut yp = y.clone();
                    let mut ym = y.clone();
                    yp[k] += h * dir;
                    ym[k] -= h * dir;
                    let fp = potential_s(&data, &yp).unwrap().value;
                    let fm = potential_s(&data, &ym).unwrap().value;
                    let fd = (fp - fm) / (2.0 * h);
                    let want = eval.gradient[k] * dir;
                    assert!(
                        (fd - want).norm() < 1e-7,
                        "k={k} dir={dir} fd={fd} grad={want}"
                    );
                }
            }
        }
    }

    #[test]
    fn gradient_vanishes_at_critical_point() {
        let (_, km, nz) = fig8_setup();
        let data = PotentialData::new(&km, &nz, Complex64::new(0.0, 0.0)).unwrap();
        let (sol, eval) = find_critical_point(&data, &nz, None).unwrap();
        assert!(sol.residual < 1e-12);
        for g in &eval.gradient {
            assert!(g.norm() < 1e-10, "∇S = {g}");
        }
    }

    #[test]
    fn real_part_at_critical_point_is_minus_volume() {
        let (_, km, nz) = fig8_setup();
        let data = PotentialData::new(&km, &nz, Complex64::new(0.0, 0.0)).unwrap();
        let (_, eval) = find_critical_point(&data, &nz, None).unwrap();
        assert!((eval.value.re + VOL_41).abs() < 1e-9, "Re S = {}", eval.value.re);
    }

    #[test]
    fn real_part_at_balanced_structures_is_minus_volume_functional() {
        // any balanced angle structure maps to y with Re S = -𝒱(α)
        let (t, km, nz) = fig8_setup();
        let data = PotentialData::new(&km, &nz, Complex64::new(0.0, 0.0)).unwrap();
        let witness = crate::angles::feasibility(&t).unwrap();
        let alpha = crate::angles::AngleStructure { angles: witness };
        // y from the angles: z has argument a_k and modulus sin(c)/sin(b)
        // (positive) — use the tabulated correspondence
        let y: Vec<Complex64> = (0..2)
            .map(|k| {
                let (a, b, c) = alpha.abc(k);
                if nz.signs[k] > 0 {
                    Complex64::new((c.sin() / b.sin()).ln(), -(PI - a))
                } else {
                    Complex64::new((c.sin() / b.sin()).ln(), PI - a)
                }
            })
            .collect();
        let eval = potential_s(&data, &y).unwrap();
        let vol = crate::angles::volume_functional(&alpha);
        assert!(
            (eval.value.re + vol).abs() < 1e-9,
            "Re S = {}, -V = {}",
            eval.value.re,
            -vol
        );
    }

    #[test]
    fn concavity_of_re_s_along_segments() {
        let (_, km, nz) = fig8_setup();
        let data = PotentialData::new(&km, &nz, Complex64::new(0.0, 0.0)).unwrap();
        let (sol, eval0) = find_critical_point(&data, &nz, None).unwrap();
        let mut seed = 7u64;
        let mut rng = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..20 {
            let dir: Vec<Complex64> = (0..2).map(|_| Complex64::new(rng() - 0.5, 0.0)).collect();
            let t_step = 0.4;
            let y1: Vec<Complex64> = sol.y.iter().zip(&dir).map(|(y, d)| y + t_step * d).collect();
            if let Ok(e1) = potential_s(&data, &y1) {
                assert!(e1.value.re < eval0.value.re + 1e-12);
            }
        }
    }

    #[test]
    fn newton_basin_unique_at_complete_structure() {
        let (_, _, nz) = fig8_setup();
        let reference = solve_gluing(&nz, Complex64::new(0.0, 0.0), None).unwrap();
        let mut seed = 99u64;
        let mut rng = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..10 {
            let start: Vec<Complex64> = reference
                .z
                .iter()
                .map(|z| z + Complex64::new(0.1 * (rng() - 0.5), 0.1 * (rng() - 0.5)))
                .collect();
            let sol = solve_gluing(&nz, Complex64::new(0.0, 0.0), Some(&start)).unwrap();
            for (a, b) in sol.z.iter().zip(&reference.z) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn twist_presets_are_geometric_with_known_volumes() {
        // complete-structure volumes of the twist-knot complements
        let expected = [
            ("x4", 3.163963228883155),
            ("x5", 3.331744231641115),
            ("x6", 3.427205246273706),
            ("x7", 3.486660146295043),
        ];
        for (name, vol) in expected {
            let t = presets::load(name).unwrap();
            let nz = nz_for_longitude(&t, None).unwrap();
            let sol = solve_gluing(&nz, Complex64::new(0.0, 0.0), None).unwrap();
            assert!(sol.geometric, "{name} complete solution not geometric");
            assert!(
                (sol.volume() - vol).abs() < 1e-9,
                "{name}: volume {} vs {vol}",
                sol.volume()
            );
            // both peripheral holonomies vanish at the complete structure
            for curve in ["l", "m"] {
                let h = curve_holonomy(&t, t.curve(curve).unwrap(), &sol);
                assert!(h.norm() < 1e-10, "{name}: H({curve}) = {h}");
            }
            // Re S = -Vol at the critical point
            let km = crate::kinematical::build(&t).unwrap();
            let data = PotentialData::new(&km, &nz, Complex64::new(0.0, 0.0)).unwrap();
            let (_, eval) = find_critical_point(&data, &nz, None).unwrap();
            assert!((eval.value.re + sol.volume()).abs() < 1e-9);
            for g in &eval.gradient {
                assert!(g.norm() < 1e-10);
            }
        }
    }

    #[test]
    fn script_w_matches_direct_alpha_formula() {
        // 𝒲 = 2QΓ(α) + C(α) must agree with -diag(ε)[𝐁⁻¹(ν+u) - 𝒢π]
        // at any balanced α with matching λ(α) (here the regular one, λ = 0)
        let (_, km, nz) = fig8_setup();
        let data = PotentialData::new(&km, &nz, Complex64::new(0.0, 0.0)).unwrap();
        let w = data.script_w();
        let alpha = crate::angles::AngleStructure::regular(2);
        let q = km.q.to_f64();
        for i in 0..2 {
            let mut direct = alpha.abc(i).2; // c_i
            for j in 0..2 {
                let gamma_j = (nz.signs[j] as f64) * (alpha.abc(j).0 - PI);
                direct += 2.0 * q[(i, j)] * gamma_j;
            }
            assert!((w[i] - Complex64::new(direct, 0.0)).norm() < 1e-12);
        }
    }
}
