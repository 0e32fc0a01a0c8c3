//! The desk-scale acceptance checks, shared by `famedkit accept` and the
//! `acceptance` test target. Each criterion returns a structured verdict
//! with the measured quantities, so failures are diagnosable from the
//! report alone.

use crate::angles::{self, AngleStructure};
use crate::exact::RatMat;
use crate::geometry;
use crate::kinematical;
use crate::nz;
use crate::oneloop;
use crate::partition::{self, ContourSpec};
use crate::presets;
use crate::special::{self, QDilogParams};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

pub const VOL_FIG8: f64 = 2.029883212819307;

#[derive(Clone, Debug, Serialize)]
pub struct Criterion {
    pub id: String,
    pub passed: bool,
    pub details: Vec<String>,
    pub millis: u128,
}

fn run<F: FnOnce(&mut Vec<String>) -> bool>(id: &str, f: F) -> Criterion {
    let start = std::time::Instant::now();
    let mut details = Vec::new();
    let passed = f(&mut details);
    Criterion {
        id: id.to_string(),
        passed,
        details,
        millis: start.elapsed().as_millis(),
    }
}

fn check(details: &mut Vec<String>, ok: bool, msg: String) -> bool {
    details.push(format!("{} {msg}", if ok { "ok " } else { "FAIL" }));
    ok
}

/// A1: exact golden matrices on the presets.
pub fn a1_exact_golden_matrices() -> Criterion {
    run("A1 exact golden matrices", |d| {
        let mut ok = true;
        let t = presets::load("fig8").unwrap();
        let km = kinematical::build(&t).unwrap();
        // published face columns permuted to the canonical face order
        let r_want = RatMat::from_int_rows(&[vec![1, 0, 0, 0], vec![0, 0, -1, 0]]);
        let a_want = RatMat::from_int_rows(&[
            vec![1, -1, 1, 0],
            vec![1, 0, 1, -1],
            vec![0, 0, 1, -1],
            vec![1, -1, 0, 0],
        ]);
        let b_want =
            RatMat::from_int_rows(&[vec![0, 0], vec![0, 0], vec![1, 0], vec![0, 1]]);
        ok &= check(d, km.r == r_want && km.a == a_want && km.b == b_want,
            "4_1 R, A, B match (canonical face order)".into());
        ok &= check(d, km.q == RatMat::from_int_rows(&[vec![1, 0], vec![0, -1]]),
            "4_1 Q = diag(1,-1)".into());
        ok &= check(d, km.script_g == RatMat::from_int_rows(&[vec![-1, 0], vec![0, 2]]),
            "4_1 G = diag(-1,2)".into());
        let nzs = nz::nz_for_longitude(&t, None).unwrap();
        ok &= check(d, nzs.abold == vec![vec![1, -2], vec![0, 4]], "4_1 A bold".into());
        ok &= check(d, nzs.bbold == vec![vec![-1, -1], vec![0, 2]], "4_1 B bold".into());
        let cert = nz::famed_check(&t, None).unwrap();
        ok &= check(d, cert.famed && cert.duality_holds, "4_1 FAMED with exact duality".into());
        for name in ["x4", "x5", "x6", "x7"] {
            let t = presets::load(name).unwrap();
            let golden = crate::presets_golden::twist_golden(name);
            let km = kinematical::build(&t).unwrap();
            ok &= check(d, km.q == golden.q, format!("{name} Q matches"));
            ok &= check(d, km.script_g == golden.script_g, format!("{name} G matches"));
            let cert = nz::famed_check(&t, None).unwrap();
            ok &= check(d, cert.famed, format!("{name} FAMED"));
            let aligned = crate::presets_golden::aligned_nz(&t, name);
            ok &= check(d, aligned.b_inv == golden.b_inv, format!("{name} B^-1 matches"));
        }
        ok
    })
}

/// A2: special-function identity suite.
pub fn a2_special_functions() -> Criterion {
    run("A2 special-function identities", |d| {
        let mut ok = true;
        // unitarity over 1000 points
        let mut seed = 0xabcdef12u64;
        let mut rng = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut worst: f64 = 0.0;
        for &b in &[0.5, 0.8, 1.0] {
            let p = QDilogParams::new(b);
            for _ in 0..334 {
                let x = -5.0 + 10.0 * rng();
                let v = special::phi_b(Complex64::new(x, 0.0), &p).unwrap();
                worst = worst.max((v.norm() - 1.0).abs());
            }
        }
        ok &= check(d, worst < 1e-10, format!("unitarity residual {worst:.2e} < 1e-10"));
        // inversion relation on a strip grid
        let mut worst_inv: f64 = 0.0;
        for &b in &[0.7, 1.0] {
            let p = QDilogParams::new(b);
            let c = Complex64::new(0.0, PI / 12.0 * (b * b + 1.0 / (b * b))).exp();
            for i in -3..4 {
                for j in -2..3 {
                    let z = Complex64::new(0.7 * i as f64, 0.3 * j as f64);
                    let lhs = special::phi_b(z, &p).unwrap() * special::phi_b(-z, &p).unwrap();
                    let rhs = c * (Complex64::new(0.0, PI) * z * z).exp();
                    worst_inv = worst_inv.max((lhs - rhs).norm() / rhs.norm().max(1.0));
                }
            }
        }
        ok &= check(d, worst_inv < 1e-9, format!("inversion residual {worst_inv:.2e} < 1e-9"));
        // semiclassical order between b = 0.2 and b = 0.05
        let z = Complex64::new(0.3, 0.0);
        let r1 = special::phi_b_semiclassical_residual(z, 0.2).unwrap();
        let r2 = special::phi_b_semiclassical_residual(z, 0.05).unwrap();
        let order = (r1 / r2).ln() / (0.2f64 / 0.05).ln();
        ok &= check(d, (order - 2.0).abs() < 0.2, format!("semiclassical order {order:.3} = 2.0 ± 0.2"));
        // Bloch-Wigner symmetry
        let mut worst_d: f64 = 0.0;
        for i in 0..50 {
            let z = Complex64::new(-2.0 + 0.08 * i as f64, 0.1 + 0.05 * i as f64);
            worst_d = worst_d.max((special::bloch_wigner(z.conj()) + special::bloch_wigner(z)).abs());
            worst_d = worst_d.max(special::bloch_wigner(Complex64::new(z.re, 0.0)).abs());
        }
        ok &= check(d, worst_d < 1e-12, format!("Bloch-Wigner symmetry residual {worst_d:.2e}"));
        ok
    })
}

/// A3: volume limit of the partition function on the figure-eight preset.
pub fn a3_volume_limit() -> Criterion {
    run("A3 partition-function volume limit", |d| {
        let mut ok = true;
        let t = presets::load("fig8").unwrap();
        let km = kinematical::build(&t).unwrap();
        let alpha = AngleStructure::regular(2);
        let spec = ContourSpec {
            nodes_per_axis: 400,
            ..Default::default()
        };
        let bs = [1.0, 0.8, 0.6, 0.5, 0.45, 0.4];
        let mut samples = Vec::new();
        for &b in &bs {
            let v = partition::partition_modulus(&t, &km, &alpha, b, &spec).unwrap();
            d.push(format!("     b = {b:>4}: |Z| = {v:.12e}, 2πb² log|Z| = {:.6}", 2.0 * PI * b * b * v.ln()));
            samples.push((b, v));
        }
        let rep = partition::fit_asymptotics(&samples, -VOL_FIG8, 0.0).unwrap();
        ok &= check(d, (rep.fitted_rate + VOL_FIG8).abs() < 0.05,
            format!("fitted rate {:.6} = {:.6} ± 0.05", rep.fitted_rate, -VOL_FIG8));
        // independent volume: 2 D(e^{iπ/3})
        let dvol = 2.0 * special::bloch_wigner(Complex64::from_polar(1.0, PI / 3.0));
        let nzs = nz::nz_for_longitude(&t, None).unwrap();
        let sol = geometry::solve_gluing(&nzs, Complex64::new(0.0, 0.0), None).unwrap();
        ok &= check(d, (sol.volume() - dvol).abs() < 1e-9,
            format!("Vol from shapes {:.12} = 2D(e^iπ/3) {:.12} ± 1e-9", sol.volume(), dvol));
        ok
    })
}

/// A4: one-loop prefactor and the Hessian–torsion bridge.
pub fn a4_one_loop_prefactor() -> Criterion {
    run("A4 one-loop prefactor", |d| {
        let mut ok = true;
        let t = presets::load("fig8").unwrap();
        let km = kinematical::build(&t).unwrap();
        let nzs = nz::nz_for_longitude(&t, None).unwrap();
        let flat = oneloop::strong_flattening(&t).unwrap();
        let alpha = AngleStructure::regular(2);
        let spec = ContourSpec {
            nodes_per_axis: 400,
            ..Default::default()
        };
        let mut prev_dev = f64::INFINITY;
        let mut monotone = true;
        for &b in &[0.6, 0.5, 0.4] {
            let actual = partition::partition_modulus(&t, &km, &alpha, b, &spec).unwrap();
            let predicted =
                partition::predicted_modulus(&t, &km, &nzs, &flat, &alpha, b).unwrap();
            let ratio = predicted / actual;
            d.push(format!("     b = {b}: predicted/actual = {ratio:.6}"));
            let dev = (ratio - 1.0).abs();
            if b < 0.6 && dev > prev_dev + 1e-12 {
                monotone = false;
            }
            prev_dev = dev;
            if b == 0.4 {
                ok &= check(d, (0.9..=1.1).contains(&ratio), format!("ratio at b=0.4 in [0.9, 1.1]: {ratio:.4}"));
            }
        }
        ok &= check(d, monotone, "deviation shrinks monotonically from b=0.6 to b=0.4".into());
        // Hessian–torsion bridge at u = 0 and u = 0.1i, on 4_1 and x5
        for name in ["fig8", "x5"] {
            let t = presets::load(name).unwrap();
            let km = kinematical::build(&t).unwrap();
            let nzs = nz::nz_for_longitude(&t, None).unwrap();
            let flat = oneloop::strong_flattening(&t).unwrap();
            for &u in &[Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.1)] {
                let rel = hessian_torsion_gap(&t, &km, &nzs, &flat, u);
                ok &= check(d, rel < 1e-8,
                    format!("Hessian-torsion bridge on {name} at u = {u}: gap {rel:.2e} < 1e-8"));
            }
        }
        ok
    })
}

/// Relative disagreement (modulus and phase mod π) between `det Hess S` and
/// `±2 i^N det 𝐁⁻¹ (Π z^{-f″} z″^{f-1}) τ` at the critical point.
pub fn hessian_torsion_gap(
    t: &crate::tri::OrderedTriangulation,
    km: &kinematical::KinematicalMatrices,
    nzs: &nz::NzSystem,
    flat: &oneloop::Flattening,
    u: Complex64,
) -> f64 {
    let data = geometry::PotentialData::new(km, nzs, u).unwrap();
    let (sol, eval) = geometry::find_critical_point(&data, nzs, None).unwrap();
    let tau = oneloop::one_loop_tau(nzs, &sol, flat).unwrap().tau;
    let det_hess = eval.hessian.clone().lu().determinant();
    let n = t.n() as i32;
    let det_binv = 1.0 / nzs.det_b.to_f64_checked();
    let mut weight = Complex64::new(1.0, 0.0);
    for k in 0..t.n() {
        weight *= ((-flat.fpp[k] as f64) * sol.log_z[k]
            + (flat.f[k] as f64 - 1.0) * sol.log_zpp[k])
            .exp();
    }
    let rhs = 2.0 * Complex64::i().powi(n) * det_binv * weight * tau;
    let rel = (det_hess.norm() - rhs.norm()).abs() / rhs.norm();
    let mut dphase = (det_hess.arg() - rhs.arg()).rem_euclid(PI);
    if dphase > PI / 2.0 {
        dphase = PI - dphase;
    }
    rel.max(dphase)
}

/// A5: Jones function volume limit and the reconstruction identity.
pub fn a5_jones_function() -> Criterion {
    run("A5 Jones function", |d| {
        let mut ok = true;
        let t = presets::load("fig8").unwrap();
        let km = kinematical::build(&t).unwrap();
        let nzs = nz::nz_for_longitude(&t, None).unwrap();
        let spec = ContourSpec {
            nodes_per_axis: 300,
            ..Default::default()
        };
        let x0 = Complex64::new(0.0, 0.0);
        let bs = [0.5, 0.45, 0.4, 0.35, 0.3, 0.25];
        let mut samples = Vec::new();
        for &b in &bs {
            let v = partition::jones_function(&t, &km, &nzs, x0, b, &spec)
                .unwrap()
                .norm();
            d.push(format!(
                "     b = {b:>4}: |J(0)| = {v:.10e}, 2πb² log|J| = {:.6}",
                2.0 * PI * b * b * v.ln()
            ));
            // extrapolate with the known saddle-point power b^{N-1} removed;
            // 2πb² log of the normalized quantity has the same b → 0 limit
            samples.push((b, v / b.powi(t.n() as i32 - 1)));
        }
        let rep = partition::fit_asymptotics(&samples, -VOL_FIG8, 0.0).unwrap();
        ok &= check(d, (rep.fitted_rate + VOL_FIG8).abs() < 0.05,
            format!("fitted rate {:.6} = {:.6} ± 0.05", rep.fitted_rate, -VOL_FIG8));
        // reconstruction against |Z| at b = 0.8 and λ = 0
        let b = 0.8;
        let alpha = AngleStructure::regular(2);
        let z_val = partition::partition_modulus(&t, &km, &alpha, b, &ContourSpec {
            nodes_per_axis: 400,
            ..Default::default()
        })
        .unwrap();
        let recon = partition::jones_reconstruction_modulus(&t, &km, &nzs, b, &spec).unwrap();
        let want = z_val * (2.0 * PI * b).powi(t.n() as i32);
        let rel = (recon - want).abs() / want;
        ok &= check(d, rel < 1e-4,
            format!("reconstruction |∫J| = {recon:.8e} vs (2πb)^N |Z| = {want:.8e} (rel {rel:.2e})"));
        ok
    })
}

/// A6: angle-structure optimization and slice sweep.
pub fn a6_volume_maximization() -> Criterion {
    run("A6 angle-structure optimization", |d| {
        let mut ok = true;
        let t = presets::load("fig8").unwrap();
        let rep = angles::maximize_volume(&t, None).unwrap();
        ok &= check(d, (rep.value - VOL_FIG8).abs() < 1e-6,
            format!("max volume {:.9} = {VOL_FIG8:.9} ± 1e-6", rep.value));
        ok &= check(d, rep.kkt_residual < 1e-8, format!("KKT residual {:.2e} < 1e-8", rep.kkt_residual));
        let regular = rep
            .maximizer
            .angles
            .iter()
            .all(|&a| (a - PI / 3.0).abs() < 1e-6);
        ok &= check(d, regular, "maximizer is the regular structure".into());
        let nzs = nz::nz_for_longitude(&t, None).unwrap();
        for i in 0..7 {
            let theta = -0.3 + 0.1 * i as f64;
            let srep = angles::maximize_volume(&t, Some(("l", theta))).unwrap();
            ok &= check(d, srep.value <= rep.value + 1e-9,
                format!("slice θ = {theta:.1}: volume {:.9} ≤ max", srep.value));
            // geometric continuation at H(l) = iθ
            let sol = geometry::solve_gluing(&nzs, Complex64::new(theta, 0.0), None).unwrap();
            let vol_geo = sol.volume();
            ok &= check(d, (srep.value - vol_geo).abs() < 1e-4,
                format!("slice θ = {theta:.1}: LP/ascent {:.8} vs continuation {:.8}", srep.value, vol_geo));
        }
        ok
    })
}

/// A7: property suites runnable standalone.
pub fn a7_property_suites() -> Criterion {
    run("A7 property suites", |d| {
        let mut ok = true;
        // flattening substitution residual exactly 0 on all presets
        for name in presets::names() {
            let t = presets::load(name).unwrap();
            let flat = oneloop::strong_flattening(&t).unwrap();
            let defect = oneloop::flattening_defect(&t, &flat);
            ok &= check(d, defect == 0, format!("{name}: flattening defect {defect} == 0"));
        }
        // gradient vs finite differences
        let t = presets::load("fig8").unwrap();
        let km = kinematical::build(&t).unwrap();
        let nzs = nz::nz_for_longitude(&t, None).unwrap();
        let data = geometry::PotentialData::new(&km, &nzs, Complex64::new(0.0, 0.0)).unwrap();
        let sol = geometry::solve_gluing(&nzs, Complex64::new(0.0, 0.0), None).unwrap();
        let h = 1e-6;
        let mut worst: f64 = 0.0;
        for k in 0..2 {
            let eval = geometry::potential_s(&data, &sol.y).unwrap();
            let mut yp = sol.y.clone();
            let mut ym = sol.y.clone();
            yp[k] += Complex64::new(h, 0.0);
            ym[k] -= Complex64::new(h, 0.0);
            let fd = (geometry::potential_s(&data, &yp).unwrap().value
                - geometry::potential_s(&data, &ym).unwrap().value)
                / (2.0 * h);
            worst = worst.max((fd - eval.gradient[k]).norm());
        }
        ok &= check(d, worst < 1e-7, format!("gradient FD residual {worst:.2e} < 1e-7"));
        // contour-shift and angle-slice invariance at b = 0.5
        let alpha = AngleStructure::regular(2);
        let b = 0.5;
        let base = partition::partition_modulus(&t, &km, &alpha, b, &ContourSpec::default()).unwrap();
        let shifted = partition::partition_modulus(&t, &km, &alpha, b, &ContourSpec {
            extra_shift_y: 0.2,
            ..Default::default()
        })
        .unwrap();
        ok &= check(d, (base - shifted).abs() < 1e-6 * base,
            format!("contour shift invariance rel {:.2e}", (base - shifted).abs() / base));
        // dropped-edge independence
        let sol = geometry::solve_gluing(&nzs, Complex64::new(0.0, 0.05), None).unwrap();
        let r = geometry::dropped_edge_residual(&t, &nzs, &sol);
        ok &= check(d, r < 1e-10, format!("dropped-edge residual {r:.2e} < 1e-10"));
        let nz_other = nz::nz_for_longitude(&t, Some(0)).unwrap();
        let sol2 = geometry::solve_gluing(&nz_other, Complex64::new(0.0, 0.05), None).unwrap();
        let max_diff = sol
            .z
            .iter()
            .zip(&sol2.z)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        ok &= check(d, max_diff < 1e-10,
            format!("solution agrees across dropped-edge choice: {max_diff:.2e}"));
        ok
    })
}

pub fn run_all() -> Vec<Criterion> {
    vec![
        a1_exact_golden_matrices(),
        a2_special_functions(),
        a3_volume_limit(),
        a4_one_loop_prefactor(),
        a5_jones_function(),
        a6_volume_maximization(),
        a7_property_suites(),
    ]
}

trait RatToF64 {
    fn to_f64_checked(&self) -> f64;
}

impl RatToF64 for crate::exact::Rat {
    fn to_f64_checked(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).expect("rational out of f64 range")
    }
}
