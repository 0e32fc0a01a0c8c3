//! Gluing-equation matrices and the Neumann–Zagier system.
//!
//! The rows of `G`, `G′`, `G″` are the `N-1` kept edge equations followed by
//! one peripheral-curve row. Eliminating `Log z′` through
//! `Log z + Log z′ + Log z″ = iπ` yields the system
//! `𝐀 Log z + 𝐁 Log z″ = iν + iu` with `𝐀 = G - G′` and (default
//! convention) `𝐁 = G″ - G′`; the alternative `𝐁 = G″ - G` is kept behind a
//! flag for the 1-loop invariant's published formula.

use crate::exact::{Rat, RatMat};
use crate::kinematical::{self, KinematicalMatrices};
use crate::tri::{OrderedTriangulation, PeripheralCurve, ShapeSymbol, TriError};
use num_traits::Zero;
use serde::Serialize;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[derive(Default)]
pub enum Convention {
    /// `𝐁 = G″ - G′` (the elimination identity; matches the published
    /// figure-eight and twist-knot matrices).
    #[default]
    GppMinusGp,
    /// `𝐁 = G″ - G` (the 1-loop definition's literal text).
    GppMinusG,
}


/// Full edge incidence: one row per edge class (all `N` of them).
#[derive(Clone, Debug)]
pub struct EdgeIncidence {
    pub e: Vec<Vec<i64>>,
    pub ep: Vec<Vec<i64>>,
    pub epp: Vec<Vec<i64>>,
}

/// Count shape-symbol incidences of every edge class.
pub fn edge_incidence(tri: &OrderedTriangulation) -> EdgeIncidence {
    let n = tri.n();
    let rows = tri.edge_classes.len();
    let mut e = vec![vec![0i64; n]; rows];
    let mut ep = vec![vec![0i64; n]; rows];
    let mut epp = vec![vec![0i64; n]; rows];
    for (i, class) in tri.edge_classes.iter().enumerate() {
        for ((tet, sym), count) in class.symbol_counts(&tri.tetrahedra) {
            let target = match sym {
                ShapeSymbol::Z => &mut e,
                ShapeSymbol::Zp => &mut ep,
                ShapeSymbol::Zpp => &mut epp,
            };
            target[i][tet] += count as i64;
        }
    }
    EdgeIncidence { e, ep, epp }
}

/// The `N×N` gluing matrices: kept edge rows then one curve row.
#[derive(Clone, Debug)]
pub struct GluingMatrices {
    pub g: Vec<Vec<i64>>,
    pub gp: Vec<Vec<i64>>,
    pub gpp: Vec<Vec<i64>>,
    pub dropped_edge: usize,
    pub kept_edges: Vec<usize>,
    pub curve_name: String,
    pub curve_nu: i64,
}

pub fn assemble_gluing(
    tri: &OrderedTriangulation,
    curve: &PeripheralCurve,
    drop_edge: Option<usize>,
) -> Result<GluingMatrices, TriError> {
    let n = tri.n();
    let inc = edge_incidence(tri);
    let dropped = drop_edge.unwrap_or(tri.edge_classes.len().saturating_sub(1));
    if dropped >= tri.edge_classes.len() {
        return Err(TriError::Syntax {
            line: 0,
            msg: format!("dropped edge {dropped} out of range"),
        });
    }
    let kept: Vec<usize> = (0..tri.edge_classes.len()).filter(|&i| i != dropped).collect();
    let pick = |m: &Vec<Vec<i64>>, extra: &Vec<i64>| -> Vec<Vec<i64>> {
        let mut rows: Vec<Vec<i64>> = kept.iter().map(|&i| m[i].clone()).collect();
        rows.push(extra.clone());
        rows
    };
    if kept.len() + 1 != n {
        return Err(TriError::EdgeClassCount {
            expected: n,
            found: tri.edge_classes.len(),
        });
    }
    Ok(GluingMatrices {
        g: pick(&inc.e, &curve.c),
        gp: pick(&inc.ep, &curve.cp),
        gpp: pick(&inc.epp, &curve.cpp),
        dropped_edge: dropped,
        kept_edges: kept,
        curve_name: curve.name.clone(),
        curve_nu: curve.nu,
    })
}

#[derive(Clone, Debug)]
pub struct NzSystem {
    /// `𝐀 = G - G′`.
    pub abold: Vec<Vec<i64>>,
    /// `𝐁` under the chosen convention.
    pub bbold: Vec<Vec<i64>>,
    /// `ν/π` per row (the equations read `𝐀 Log z + 𝐁 Log z″ = iπ·nu + iu`).
    pub nu: Vec<i64>,
    pub curve_row_index: usize,
    pub dropped_edge: usize,
    pub kept_edges: Vec<usize>,
    pub convention: Convention,
    pub det_b: Rat,
    pub b_inv: Option<RatMat>,
    pub signs: Vec<i8>,
    pub curve_name: String,
}

fn mat_sub(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn assemble_nz(
    tri: &OrderedTriangulation,
    gm: &GluingMatrices,
    convention: Convention,
) -> NzSystem {
    let n = tri.n();
    let abold = mat_sub(&gm.g, &gm.gp);
    let bbold = match convention {
        Convention::GppMinusGp => mat_sub(&gm.gpp, &gm.gp),
        Convention::GppMinusG => mat_sub(&gm.gpp, &gm.g),
    };
    // elimination constant: edge equations read ... = 2πi - iπ ΣG′ row;
    // the curve equation reads ... = iu - iπ(nu_in + ΣC′)
    let mut nu: Vec<i64> = gm
        .gp
        .iter()
        .map(|row| 2 - row.iter().sum::<i64>())
        .collect();
    let last = nu.len() - 1;
    nu[last] = -(gm.curve_nu + gm.gp[last].iter().sum::<i64>());
    let bmat = RatMat::from_int_rows(&bbold);
    let det_b = bmat.det();
    let b_inv = bmat.inverse();
    NzSystem {
        abold,
        bbold,
        nu,
        curve_row_index: n - 1,
        dropped_edge: gm.dropped_edge,
        kept_edges: gm.kept_edges.clone(),
        convention,
        det_b,
        b_inv,
        signs: tri.signs(),
        curve_name: gm.curve_name.clone(),
    }
}

/// Assemble the default NZ system for the curve `l`.
pub fn nz_for_longitude(
    tri: &OrderedTriangulation,
    drop_edge: Option<usize>,
) -> Result<NzSystem, TriError> {
    let curve = tri.curve("l")?.clone();
    let gm = assemble_gluing(tri, &curve, drop_edge)?;
    Ok(assemble_nz(tri, &gm, Convention::GppMinusGp))
}

#[derive(Clone, Debug, Serialize)]
pub struct FamedCertificate {
    pub angle_space_nonempty: bool,
    /// Interior witness angle structure (radians), when one exists.
    pub witness: Option<Vec<f64>>,
    pub det_a: String,
    pub det_a_nonzero: bool,
    pub det_b: String,
    pub det_b_nonzero: bool,
    /// `𝐁⁻¹𝐀 = 𝒢`, exact rational comparison, default convention.
    pub duality_holds: bool,
    /// Same check under the `G″ - G` convention; reported so disagreement
    /// between the two published conventions is visible.
    pub alt_duality_holds: bool,
    pub famed: bool,
}

/// Check the four FAMED conditions. Mathematical failures are reported in
/// the certificate, never as errors.
pub fn famed_check(
    tri: &OrderedTriangulation,
    drop_edge: Option<usize>,
) -> Result<FamedCertificate, TriError> {
    let km: Option<KinematicalMatrices> = kinematical::build(tri).ok();
    let curve = tri.curve("l")?.clone();
    let gm = assemble_gluing(tri, &curve, drop_edge)?;
    let nz = assemble_nz(tri, &gm, Convention::GppMinusGp);
    let nz_alt = assemble_nz(tri, &gm, Convention::GppMinusG);

    let feas = crate::angles::feasibility(tri);
    let angle_space_nonempty = feas.is_some();

    let duality = |nz: &NzSystem| -> bool {
        match (&nz.b_inv, &km) {
            (Some(binv), Some(km)) => {
                let a = RatMat::from_int_rows(&nz.abold);
                binv.mul(&a) == km.script_g
            }
            _ => false,
        }
    };
    let (det_a, det_a_nonzero) = match &km {
        Some(km) => (km.det_a.to_string(), !km.det_a.is_zero()),
        None => ("0".to_string(), false),
    };
    let duality_holds = duality(&nz);
    let alt_duality_holds = duality(&nz_alt);
    let det_b_nonzero = !nz.det_b.is_zero();
    let famed = angle_space_nonempty && det_a_nonzero && det_b_nonzero && duality_holds;
    Ok(FamedCertificate {
        angle_space_nonempty,
        witness: feas,
        det_a,
        det_a_nonzero,
        det_b: nz.det_b.to_string(),
        det_b_nonzero,
        duality_holds,
        alt_duality_holds,
        famed,
    })
}
