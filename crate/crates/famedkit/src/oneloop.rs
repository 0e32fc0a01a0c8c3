//! Strong combinatorial flattenings and the 1-loop invariant.

use crate::exact::{solve_integer, Int};
use crate::geometry::ShapeSolution;
use crate::nz::{assemble_gluing, assemble_nz, Convention, NzSystem};
use crate::tri::OrderedTriangulation;
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum OneLoopError {
    #[error("no integer flattening exists for the supplied curve rows")]
    NoIntegerSolution,
    #[error("a shape parameter vanishes; Δ_z is singular")]
    SingularShape,
    #[error(transparent)]
    Tri(#[from] crate::tri::TriError),
}

/// `(f, f′, f″)` with `f + f′ + f″ = 1` per tetrahedron; edge rows weigh to
/// 2 and every supplied peripheral-curve row to 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flattening {
    pub f: Vec<i64>,
    pub fp: Vec<i64>,
    pub fpp: Vec<i64>,
    /// Certified against every curve present in the input (for a knot
    /// complement with `l` and `m` this generates the peripheral homology).
    pub strong: bool,
}

/// Solve the flattening conditions by eliminating `f′ = 1 - f - f″` and
/// running the integer HNF solver on `(f, f″)`. The smallest-norm solution
/// of the lattice coset is returned.
pub fn strong_flattening(tri: &OrderedTriangulation) -> Result<Flattening, OneLoopError> {
    let n = tri.n();
    let inc = crate::nz::edge_incidence(tri);
    let mut rows: Vec<Vec<Int>> = Vec::new();
    let mut rhs: Vec<Int> = Vec::new();
    let mut push_row = |e: &[i64], ep: &[i64], epp: &[i64], target: i64| {
        let mut row = Vec::with_capacity(2 * n);
        for k in 0..n {
            row.push(Int::from(e[k] - ep[k]));
        }
        for k in 0..n {
            row.push(Int::from(epp[k] - ep[k]));
        }
        rows.push(row);
        rhs.push(Int::from(target - ep.iter().sum::<i64>()));
    };
    for i in 0..inc.e.len() {
        push_row(&inc.e[i], &inc.ep[i], &inc.epp[i], 2);
    }
    for curve in &tri.curves {
        push_row(&curve.c, &curve.cp, &curve.cpp, 0);
    }
    let sol = solve_integer(&rows, &rhs).ok_or(OneLoopError::NoIntegerSolution)?;
    let f: Vec<i64> = sol.particular[..n]
        .iter()
        .map(|x| x.to_i64().expect("flattening entry out of i64"))
        .collect();
    let fpp: Vec<i64> = sol.particular[n..]
        .iter()
        .map(|x| x.to_i64().expect("flattening entry out of i64"))
        .collect();
    let fp: Vec<i64> = (0..n).map(|k| 1 - f[k] - fpp[k]).collect();
    let flat = Flattening {
        f,
        fp,
        fpp,
        strong: !tri.curves.is_empty(),
    };
    debug_assert_eq!(flattening_defect(tri, &flat), 0);
    Ok(flat)
}

/// Exact integer defect of the flattening conditions (0 when valid).
pub fn flattening_defect(tri: &OrderedTriangulation, flat: &Flattening) -> i64 {
    let n = tri.n();
    let inc = crate::nz::edge_incidence(tri);
    let mut defect = 0i64;
    for k in 0..n {
        defect += (flat.f[k] + flat.fp[k] + flat.fpp[k] - 1).abs();
    }
    let weigh = |e: &[i64], ep: &[i64], epp: &[i64]| -> i64 {
        (0..n)
            .map(|k| e[k] * flat.f[k] + ep[k] * flat.fp[k] + epp[k] * flat.fpp[k])
            .sum()
    };
    for i in 0..inc.e.len() {
        defect += (weigh(&inc.e[i], &inc.ep[i], &inc.epp[i]) - 2).abs();
    }
    for curve in &tri.curves {
        defect += weigh(&curve.c, &curve.cp, &curve.cpp).abs();
    }
    defect
}

/// 1-loop invariant, an element of ℂ/±1. The stored representative has
/// phase in `[0, π)`.
#[derive(Clone, Copy, Debug)]
pub struct OneLoopValue {
    pub tau: Complex64,
    pub convention: Convention,
}

pub fn normalize_sign(tau: Complex64) -> Complex64 {
    let a = tau.arg();
    if a < 0.0 || (a - std::f64::consts::PI).abs() < 1e-300 || a >= std::f64::consts::PI {
        -tau
    } else {
        tau
    }
}

/// `τ = ±½ det(𝐀 Δ_{z″} + 𝐁 Δ_z⁻¹) Π z_i^{f″_i} z″_i^{-f_i}`.
pub fn one_loop_tau(
    nz: &NzSystem,
    sol: &ShapeSolution,
    flat: &Flattening,
) -> Result<OneLoopValue, OneLoopError> {
    let n = nz.signs.len();
    for z in &sol.z {
        if z.norm() < 1e-14 {
            return Err(OneLoopError::SingularShape);
        }
    }
    let zpp: Vec<Complex64> = sol.log_zpp.iter().map(|l| l.exp()).collect();
    let m = DMatrix::from_fn(n, n, |i, k| {
        nz.abold[i][k] as f64 * zpp[k] + nz.bbold[i][k] as f64 / sol.z[k]
    });
    let det = m.lu().determinant();
    let mut weight = Complex64::new(1.0, 0.0);
    for k in 0..n {
        weight *= (flat.fpp[k] as f64 * sol.log_z[k] + (-flat.f[k] as f64) * sol.log_zpp[k]).exp();
    }
    Ok(OneLoopValue {
        tau: normalize_sign(0.5 * det * weight),
        convention: nz.convention,
    })
}

/// Convenience: τ under both 𝐁-conventions at the longitude system.
pub fn one_loop_both_conventions(
    tri: &OrderedTriangulation,
    sol: &ShapeSolution,
    flat: &Flattening,
    drop_edge: Option<usize>,
) -> Result<(OneLoopValue, OneLoopValue), OneLoopError> {
    let curve = tri.curve("l")?.clone();
    let gm = assemble_gluing(tri, &curve, drop_edge)?;
    let nz_default = assemble_nz(tri, &gm, Convention::GppMinusGp);
    let nz_alt = assemble_nz(tri, &gm, Convention::GppMinusG);
    Ok((
        one_loop_tau(&nz_default, sol, flat)?,
        one_loop_tau(&nz_alt, sol, flat)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::solve_gluing;
    use crate::kinematical;
    use crate::nz::nz_for_longitude;
    use crate::presets;
    use std::f64::consts::PI;

    #[test]
    fn fig8_flattening_is_exact() {
        let t = presets::load("fig8").unwrap();
        let flat = strong_flattening(&t).unwrap();
        assert_eq!(flattening_defect(&t, &flat), 0);
        assert!(flat.strong);
        // the minimal-norm solution for this preset
        assert_eq!((flat.f.clone(), flat.fp.clone(), flat.fpp.clone()),
                   (vec![0, 0], vec![0, 1], vec![1, 0]));
    }

    #[test]
    fn trivial_flattening_requires_gp_row_sums() {
        // f = f'' = 0, f' = 1 is valid iff G' rows sum to 2 on edges and 0
        // on curves; fig8 has edge G' sums 3 and 1, so it must NOT be valid
        let t = presets::load("fig8").unwrap();
        let flat = Flattening {
            f: vec![0, 0],
            fp: vec![1, 1],
            fpp: vec![0, 0],
            strong: false,
        };
        assert_ne!(flattening_defect(&t, &flat), 0);
    }

    #[test]
    fn all_presets_admit_flattenings() {
        for name in presets::names() {
            let t = presets::load(name).unwrap();
            let flat = strong_flattening(&t).unwrap();
            assert_eq!(flattening_defect(&t, &flat), 0, "defect for {name}");
        }
    }

    #[test]
    fn fig8_tau_has_modulus_three() {
        let t = presets::load("fig8").unwrap();
        let nz = nz_for_longitude(&t, None).unwrap();
        let sol = solve_gluing(&nz, Complex64::new(0.0, 0.0), None).unwrap();
        let flat = strong_flattening(&t).unwrap();
        let tau = one_loop_tau(&nz, &sol, &flat).unwrap();
        assert!((tau.tau.norm() - 3.0).abs() < 1e-10, "|τ| = {}", tau.tau.norm());
        // the representative is real up to the ± ambiguity
        assert!(tau.tau.im.abs() < 1e-10 || (tau.tau.arg() - PI).abs() < 1e-10);
    }

    #[test]
    fn tau_independent_of_flattening_choice_up_to_sign() {
        let t = presets::load("fig8").unwrap();
        let nz = nz_for_longitude(&t, None).unwrap();
        let sol = solve_gluing(&nz, Complex64::new(0.0, 0.0), None).unwrap();
        let flat = strong_flattening(&t).unwrap();
        let tau1 = one_loop_tau(&nz, &sol, &flat).unwrap();
        // another valid flattening: t = 1 member of the solution family
        let flat2 = Flattening {
            f: vec![1, 1],
            fp: vec![-2, 2],
            fpp: vec![2, -2],
            strong: true,
        };
        assert_eq!(flattening_defect(&t, &flat2), 0);
        let tau2 = one_loop_tau(&nz, &sol, &flat2).unwrap();
        assert!(
            (tau1.tau - tau2.tau).norm() < 1e-9 * tau1.tau.norm(),
            "τ changed beyond sign: {} vs {}",
            tau1.tau,
            tau2.tau
        );
    }

    #[test]
    fn phase_normalization_is_idempotent() {
        for &z in &[
            Complex64::new(1.0, 2.0),
            Complex64::new(-1.0, -2.0),
            Complex64::new(-3.0, 0.0),
            Complex64::new(0.0, -1.0),
        ] {
            let n1 = normalize_sign(z);
            let n2 = normalize_sign(n1);
            assert_eq!(n1, n2);
            assert!((0.0..PI).contains(&n1.arg()), "{} -> {}", z, n1);
        }
    }

    #[test]
    fn identity_b_fixture_matches_direct_determinant() {
        // 𝐁 = I, z_i = i, f = f'' = 0: τ = ±½ det(𝐀 Δ_{z''} + Δ_z^{-1})
        let nz = NzSystem {
            abold: vec![vec![1, 2], vec![3, 4]],
            bbold: vec![vec![1, 0], vec![0, 1]],
            nu: vec![0, 0],
            curve_row_index: 1,
            dropped_edge: 0,
            kept_edges: vec![1],
            convention: Convention::GppMinusGp,
            det_b: crate::exact::rat_int(1),
            b_inv: Some(crate::exact::RatMat::identity(2)),
            signs: vec![1, 1],
            curve_name: "l".into(),
        };
        let z = Complex64::new(0.0, 1.0);
        let zpp = (z - 1.0) / z; // 1 + i
        let sol = ShapeSolution {
            y: vec![z.ln() - Complex64::new(0.0, PI); 2],
            z: vec![z; 2],
            log_z: vec![z.ln(); 2],
            log_zp: vec![(1.0 / (1.0 - z)).ln(); 2],
            log_zpp: vec![zpp.ln(); 2],
            residual: 0.0,
            u_target: Complex64::new(0.0, 0.0),
            geometric: true,
            newton_steps: 0,
        };
        let flat = Flattening {
            f: vec![0, 0],
            fp: vec![1, 1],
            fpp: vec![0, 0],
            strong: false,
        };
        let tau = one_loop_tau(&nz, &sol, &flat).unwrap().tau;
        // M = zpp*A + (1/z) I with 1/z = -i
        let m11 = zpp * 1.0 + Complex64::new(0.0, -1.0);
        let m12 = zpp * 2.0;
        let m21 = zpp * 3.0;
        let m22 = zpp * 4.0 + Complex64::new(0.0, -1.0);
        let want = normalize_sign(0.5 * (m11 * m22 - m12 * m21));
        assert!((tau - want).norm() < 1e-12);
    }
}
