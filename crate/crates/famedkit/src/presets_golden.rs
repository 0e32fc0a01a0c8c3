//! Golden matrices for the twist-knot presets.
//!
//! The tetrahedra are ordered `z_1, …, z_p, U, V, W` (N = p+3) and the edge
//! classes carry the published labels `s, 0, 1, …, p+1`, with edge `p`
//! dropped from the Neumann–Zagier system. For `p = 1` the interior chain
//! rows collapse and edges `1` and `p` merge into a single row.

use crate::exact::{rat, rat_int, RatMat};
use crate::nz::{assemble_gluing, assemble_nz, Convention};
use crate::tri::OrderedTriangulation;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Parity {
    Odd,
    Even,
}

/// `(parity, p)` of a preset name.
pub fn twist_params(name: &str) -> Option<(Parity, usize)> {
    match name {
        "x4" => Some((Parity::Even, 1)),
        "x5" => Some((Parity::Odd, 1)),
        "x6" => Some((Parity::Even, 2)),
        "x7" => Some((Parity::Odd, 2)),
        _ => None,
    }
}

pub fn twist_signs(parity: Parity, p: usize) -> Vec<i8> {
    let mut s = vec![1i8; p];
    match parity {
        Parity::Odd => s.extend([-1, -1, -1]),
        Parity::Even => s.extend([1, -1, -1]),
    }
    s
}

/// One golden edge row as `(E, E′, E″)` incidence vectors.
pub type OmegaRow = (Vec<i64>, Vec<i64>, Vec<i64>);

/// Edge rows in label order `s, 0, 1, …, p+1`; columns `z_1..z_p, U, V, W`.
pub fn omega_rows(parity: Parity, p: usize) -> Vec<OmegaRow> {
    let n = p + 3;
    let (u, v, w) = (p, p + 1, p + 2);
    let zero = || (vec![0i64; n], vec![0i64; n], vec![0i64; n]);
    let mut rows = Vec::new();

    // ω_s = 2L(z_U) + L(z_V′) + L(z_V″) + L(z_W) + L(z_W′)
    let mut r = zero();
    r.0[u] = 2;
    r.0[w] = 1;
    r.1[v] = 1;
    r.1[w] = 1;
    r.2[v] = 1;
    rows.push(r);

    // ω_0 = 2L(z_1) + L(z_1′) + 2L(z_2) + … + 2L(z_p) + L(z_V) + L(z_W″)
    let mut r = zero();
    for k in 0..p {
        r.0[k] = 2;
    }
    r.0[v] = 1;
    r.1[0] = 1;
    r.2[w] = 1;
    rows.push(r);

    if p == 1 {
        // merged ω_1 = ω_p
        let mut r = zero();
        match parity {
            Parity::Odd => {
                // 2L(z_1″) + L(z_U′) + L(z_V′) + L(z_W)
                r.2[0] = 2;
                r.1[u] = 1;
                r.1[v] = 1;
                r.0[w] = 1;
            }
            Parity::Even => {
                // 2L(z_1″) + 2L(z_U′) + L(z_U″) + L(z_V) + L(z_V′) + L(z_W) + L(z_W″)
                r.2[0] = 2;
                r.1[u] = 2;
                r.2[u] = 1;
                r.0[v] = 1;
                r.1[v] = 1;
                r.0[w] = 1;
                r.2[w] = 1;
            }
        }
        rows.push(r);
    } else {
        // ω_1 = 2L(z_1″) + L(z_2′)
        let mut r = zero();
        r.2[0] = 2;
        r.1[1] = 1;
        rows.push(r);
        // ω_k = L(z_{k-1}′) + 2L(z_k″) + L(z_{k+1}′), 2 ≤ k ≤ p-1
        for k in 2..p {
            let mut r = zero();
            r.1[k - 2] = 1;
            r.2[k - 1] = 2;
            r.1[k] = 1;
            rows.push(r);
        }
        // ω_p
        let mut r = zero();
        match parity {
            Parity::Odd => {
                // L(z_{p-1}′) + 2L(z_p″) + L(z_U′) + L(z_V′) + L(z_W)
                r.1[p - 2] = 1;
                r.2[p - 1] = 2;
                r.1[u] = 1;
                r.1[v] = 1;
                r.0[w] = 1;
            }
            Parity::Even => {
                // L(z_{p-1}′) + 2L(z_p″) + 2L(z_U′) + L(z_U″) + L(z_V) + L(z_V′)
                //   + L(z_W) + L(z_W″)
                r.1[p - 2] = 1;
                r.2[p - 1] = 2;
                r.1[u] = 2;
                r.2[u] = 1;
                r.0[v] = 1;
                r.1[v] = 1;
                r.0[w] = 1;
                r.2[w] = 1;
            }
        }
        rows.push(r);
    }

    // ω_{p+1}
    let mut r = zero();
    match parity {
        Parity::Odd => {
            // L(z_p′) + L(z_U′) + 2L(z_U″) + L(z_V) + L(z_V″) + L(z_W′) + L(z_W″)
            r.1[p - 1] = 1;
            r.1[u] = 1;
            r.2[u] = 2;
            r.0[v] = 1;
            r.2[v] = 1;
            r.1[w] = 1;
            r.2[w] = 1;
        }
        Parity::Even => {
            // L(z_p′) + L(z_U″) + L(z_V″) + L(z_W′)
            r.1[p - 1] = 1;
            r.2[u] = 1;
            r.2[v] = 1;
            r.1[w] = 1;
        }
    }
    rows.push(r);
    rows
}

/// Index of the dropped edge (`ω_p`) in the label order.
pub fn dropped_label_index(p: usize) -> usize {
    if p == 1 {
        2
    } else {
        p + 1
    }
}

/// Longitude rows of `𝐀` and `𝐁` (eliminated form).
pub fn l_rows(parity: Parity, p: usize) -> (Vec<i64>, Vec<i64>) {
    let n = p + 3;
    let (u, v, w) = (p, p + 1, p + 2);
    let mut a = vec![0i64; n];
    let mut b = vec![0i64; n];
    match parity {
        Parity::Odd => {
            a[u] = 2;
            a[v] = -2;
            a[w] = 2;
            b[v] = 2;
            b[w] = 2;
        }
        Parity::Even => {
            a[u] = -2;
            a[v] = 4;
            a[w] = 2;
            b[v] = 2;
        }
    }
    (a, b)
}

pub fn q_golden(parity: Parity, p: usize) -> RatMat {
    let n = p + 3;
    let (u, v, w) = (p, p + 1, p + 2);
    let mut q = RatMat::zeros(n, n);
    for i in 0..p {
        for j in 0..p {
            q[(i, j)] = rat_int(1 + i.min(j) as i64);
        }
    }
    match parity {
        Parity::Odd => {
            for i in 0..p {
                q[(i, u)] = rat_int(-(1 + i as i64));
                q[(u, i)] = rat_int(-(1 + i as i64));
            }
            q[(u, u)] = rat_int(p as i64 + 2);
            q[(u, v)] = rat(-3, 2);
            q[(v, u)] = rat(-3, 2);
            q[(u, w)] = rat_int(1);
            q[(w, u)] = rat_int(1);
            q[(v, v)] = rat_int(1);
            q[(v, w)] = rat(-1, 2);
            q[(w, v)] = rat(-1, 2);
        }
        Parity::Even => {
            for i in 0..p {
                q[(i, u)] = rat_int(1 + i as i64);
                q[(u, i)] = rat_int(1 + i as i64);
            }
            q[(u, u)] = rat_int(p as i64 + 1);
            q[(u, v)] = rat(-1, 2);
            q[(v, u)] = rat(-1, 2);
            q[(u, w)] = rat_int(-1);
            q[(w, u)] = rat_int(-1);
            q[(v, v)] = rat_int(-1);
            q[(v, w)] = rat(-1, 2);
            q[(w, v)] = rat(-1, 2);
        }
    }
    q
}

/// `𝐁⁻¹` golden, columns in the kept equation order `s, 0, 1, …, p-1, p+1, l`.
pub fn binv_golden(parity: Parity, p: usize) -> RatMat {
    let n = p + 3;
    let (u, v, w) = (p, p + 1, p + 2);
    let mut m = RatMat::zeros(n, n);
    // z_k rows, 1-indexed k
    for k in 1..=p {
        let row = k - 1;
        m[(row, 0)] = rat_int(-(k as i64));
        m[(row, 1)] = rat_int(-(k as i64));
        for j in 1..p {
            let val = -(k as i64 - j as i64);
            if val < 0 {
                m[(row, j + 1)] = rat_int(val);
            }
        }
    }
    // U row: (-p-1, -p, -p+1, …, -1, 1, -1/2)
    m[(u, 0)] = rat_int(-(p as i64) - 1);
    m[(u, 1)] = rat_int(-(p as i64));
    for j in 1..p {
        m[(u, j + 1)] = rat_int(-(p as i64 - j as i64));
    }
    m[(u, n - 2)] = rat_int(1);
    m[(u, n - 1)] = rat(-1, 2);
    // V and W rows
    match parity {
        Parity::Odd => {
            m[(v, 0)] = rat_int(1);
            m[(v, n - 1)] = rat(1, 2);
        }
        Parity::Even => {
            m[(v, n - 1)] = rat(1, 2);
        }
    }
    m[(w, 0)] = rat_int(-1);
    m
}

pub struct TwistGolden {
    pub q: RatMat,
    pub script_g: RatMat,
    pub b_inv: RatMat,
    pub omega: Vec<OmegaRow>,
    pub signs: Vec<i8>,
    pub abold_l: Vec<i64>,
    pub bbold_l: Vec<i64>,
}

pub fn twist_golden(name: &str) -> TwistGolden {
    let (parity, p) = twist_params(name).expect("not a twist preset");
    let q = q_golden(parity, p);
    let signs = twist_signs(parity, p);
    let script_g = crate::kinematical::compute_script_g(&q, &signs);
    let (abold_l, bbold_l) = l_rows(parity, p);
    TwistGolden {
        q,
        script_g,
        b_inv: binv_golden(parity, p),
        omega: omega_rows(parity, p),
        signs,
        abold_l,
        bbold_l,
    }
}

pub struct AlignedNz {
    /// `𝐁⁻¹` with the rows/columns in the published label order.
    pub b_inv: RatMat,
    pub abold: Vec<Vec<i64>>,
    pub bbold: Vec<Vec<i64>>,
    /// computed-edge index of each published label
    pub label_to_class: Vec<usize>,
}

/// Align the computed edge classes of a preset with the published row order
/// and assemble the Neumann–Zagier matrices with the published dropped edge.
/// Panics when no unique alignment exists (the golden test fails loudly).
pub fn aligned_nz(tri: &OrderedTriangulation, name: &str) -> AlignedNz {
    let golden = twist_golden(name);
    let (_, p) = twist_params(name).unwrap();
    let inc = crate::nz::edge_incidence(tri);
    let n = tri.n();
    let mut label_to_class = Vec::with_capacity(n);
    for (lbl, (e, ep, epp)) in golden.omega.iter().enumerate() {
        let matches: Vec<usize> = (0..n)
            .filter(|&i| &inc.e[i] == e && &inc.ep[i] == ep && &inc.epp[i] == epp)
            .collect();
        assert_eq!(
            matches.len(),
            1,
            "published edge row {lbl} of {name} must match exactly one computed class, got {matches:?}"
        );
        label_to_class.push(matches[0]);
    }
    // reorder edge classes to label order, then drop ω_p and assemble
    let drop_label = dropped_label_index(p);
    let curve = tri.curve("l").unwrap().clone();
    let gm_all = assemble_gluing(tri, &curve, Some(label_to_class[drop_label])).unwrap();
    // gm_all kept edges are in computed order; re-sort rows into label order
    let kept_labels: Vec<usize> = (0..n).filter(|&l| l != drop_label).collect();
    let reorder = |m: &Vec<Vec<i64>>| -> Vec<Vec<i64>> {
        let mut rows: Vec<Vec<i64>> = Vec::with_capacity(n);
        for &lbl in &kept_labels {
            let class = label_to_class[lbl];
            let pos = gm_all
                .kept_edges
                .iter()
                .position(|&k| k == class)
                .expect("kept class");
            rows.push(m[pos].clone());
        }
        rows.push(m[n - 1].clone()); // curve row stays last
        rows
    };
    let gm = crate::nz::GluingMatrices {
        g: reorder(&gm_all.g),
        gp: reorder(&gm_all.gp),
        gpp: reorder(&gm_all.gpp),
        dropped_edge: gm_all.dropped_edge,
        kept_edges: kept_labels,
        curve_name: gm_all.curve_name.clone(),
        curve_nu: gm_all.curve_nu,
    };
    let nz = assemble_nz(tri, &gm, Convention::GppMinusGp);
    AlignedNz {
        b_inv: nz.b_inv.clone().expect("B invertible"),
        abold: nz.abold,
        bbold: nz.bbold,
        label_to_class,
    }
}
