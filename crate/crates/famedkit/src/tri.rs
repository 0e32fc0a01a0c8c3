//! Ordered ideal triangulations: file format, validation, edge classes.
//!
//! A triangulation is a list of signed, vertex-ordered tetrahedra with face
//! pairings. Because every face gluing must respect the vertex order, a
//! pairing of face slots determines the gluing completely; the file format
//! therefore stores only `(tet, face) -> (tet, face)` pairs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

/// Vertex pairs of the six edge slots of a tetrahedron, in the fixed order
/// used for slot indices.
pub const EDGE_PAIRS: [(u8, u8); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Shape symbol carried by an edge slot. `z` sits on the 01/23 edges; which
/// of `z′`, `z″` sits on the b-edges (02/13) and c-edges (03/12) depends on
/// the tetrahedron sign.
#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord)]
pub enum ShapeSymbol {
    Z,
    Zp,
    Zpp,
}

/// Dihedral-angle label of an edge slot: `a` on 01/23, `b` on 02/13, `c` on
/// 03/12.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AngleLabel {
    A,
    B,
    C,
}

pub fn angle_label(pair_idx: usize) -> AngleLabel {
    match pair_idx {
        0 | 5 => AngleLabel::A,
        1 | 4 => AngleLabel::B,
        _ => AngleLabel::C,
    }
}

pub fn shape_symbol(sign: i8, pair_idx: usize) -> ShapeSymbol {
    match angle_label(pair_idx) {
        AngleLabel::A => ShapeSymbol::Z,
        AngleLabel::B => {
            if sign > 0 {
                ShapeSymbol::Zpp
            } else {
                ShapeSymbol::Zp
            }
        }
        AngleLabel::C => {
            if sign > 0 {
                ShapeSymbol::Zp
            } else {
                ShapeSymbol::Zpp
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct FaceSlot {
    pub tet: usize,
    pub face: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct EdgeSlot {
    pub tet: usize,
    /// Index into [`EDGE_PAIRS`].
    pub pair: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Tetrahedron {
    pub index: usize,
    pub sign: i8,
    /// `face_gluings[k] = (j, k')` glues face `x_k` of this tetrahedron to
    /// face `x_{k'}` of tetrahedron `j`.
    pub face_gluings: [(usize, usize); 4],
}

/// Peripheral curve data: signed corner counts per shape symbol plus the
/// lattice constant `nu`, so that
/// `H(γ) = Σ C·Log z + C′·Log z′ + C″·Log z″ + iπ·nu`.
#[derive(Clone, PartialEq, Debug)]
pub struct PeripheralCurve {
    pub name: String,
    pub c: Vec<i64>,
    pub cp: Vec<i64>,
    pub cpp: Vec<i64>,
    pub nu: i64,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Kind {
    KnotComplement,
    Generic,
}

#[derive(Clone, PartialEq, Debug)]
pub struct EdgeClass {
    /// Sorted slots belonging to this class.
    pub slots: Vec<EdgeSlot>,
}

impl EdgeClass {
    pub fn multiplicity(&self) -> usize {
        self.slots.len()
    }

    /// Incidence counts per (tetrahedron, shape symbol).
    pub fn symbol_counts(&self, tets: &[Tetrahedron]) -> BTreeMap<(usize, ShapeSymbol), usize> {
        let mut out = BTreeMap::new();
        for s in &self.slots {
            let sym = shape_symbol(tets[s.tet].sign, s.pair);
            *out.entry((s.tet, sym)).or_insert(0) += 1;
        }
        out
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct OrderedTriangulation {
    pub name: String,
    pub kind: Kind,
    pub tetrahedra: Vec<Tetrahedron>,
    pub curves: Vec<PeripheralCurve>,
    /// Edge classes ordered by smallest slot; computed at parse time.
    pub edge_classes: Vec<EdgeClass>,
}

#[derive(Error, Debug)]
pub enum TriError {
    #[error("line {line}: syntax error: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("tetrahedron {tet} face {face}: glued out of range")]
    GluingOutOfRange { tet: usize, face: usize },
    #[error("tetrahedron {tet} face {face} is unpaired (gluing is not an involution)")]
    UnpairedFace { tet: usize, face: usize },
    #[error("tetrahedron {tet} face {face} is glued to itself")]
    SelfGluedFace { tet: usize, face: usize },
    #[error("knot complement must have exactly {expected} edge classes, found {found}")]
    EdgeClassCount { expected: usize, found: usize },
    #[error("curve '{name}': vector length {got}, expected {expected}")]
    CurveLength {
        name: String,
        got: usize,
        expected: usize,
    },
    #[error("curve '{name}' not found")]
    MissingCurve { name: String },
    #[error("duplicate tetrahedron index {0}")]
    DuplicateTet(usize),
}

impl OrderedTriangulation {
    pub fn n(&self) -> usize {
        self.tetrahedra.len()
    }

    pub fn signs(&self) -> Vec<i8> {
        self.tetrahedra.iter().map(|t| t.sign).collect()
    }

    pub fn curve(&self, name: &str) -> Result<&PeripheralCurve, TriError> {
        self.curves
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| TriError::MissingCurve {
                name: name.to_string(),
            })
    }

    /// Face classes as slot pairs, ordered by their smallest `(tet, face)`
    /// slot. This is the canonical face-variable order used by the
    /// kinematical matrices.
    pub fn face_classes(&self) -> Vec<[FaceSlot; 2]> {
        let n = self.n();
        let mut seen = vec![false; 4 * n];
        let mut classes = Vec::with_capacity(2 * n);
        for tet in 0..n {
            for face in 0..4 {
                if seen[4 * tet + face] {
                    continue;
                }
                let (jt, jf) = self.tetrahedra[tet].face_gluings[face];
                seen[4 * tet + face] = true;
                seen[4 * jt + jf] = true;
                classes.push([FaceSlot { tet, face }, FaceSlot { tet: jt, face: jf }]);
            }
        }
        classes
    }

    /// Index of the face class containing `slot`.
    pub fn face_class_index(&self, classes: &[[FaceSlot; 2]], slot: FaceSlot) -> usize {
        classes
            .iter()
            .position(|c| c.contains(&slot))
            .expect("face slot not in any class")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let kind = match self.kind {
            Kind::KnotComplement => "knot-complement",
            Kind::Generic => "generic",
        };
        let _ = writeln!(
            out,
            "triangulation {} tets={} kind={}",
            self.name,
            self.n(),
            kind
        );
        for t in &self.tetrahedra {
            let g = &t.face_gluings;
            let _ = writeln!(
                out,
                "tet {} sign={} glue 0->{}.{} 1->{}.{} 2->{}.{} 3->{}.{}",
                t.index,
                if t.sign > 0 { "+1" } else { "-1" },
                g[0].0,
                g[0].1,
                g[1].0,
                g[1].1,
                g[2].0,
                g[2].1,
                g[3].0,
                g[3].1
            );
        }
        let join = |v: &[i64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        for c in &self.curves {
            let _ = writeln!(
                out,
                "curve {} nu={} C={} Cp={} Cpp={}",
                c.name,
                c.nu,
                join(&c.c),
                join(&c.cp),
                join(&c.cpp)
            );
        }
        out
    }
}

/// Image of an edge of a glued face under the order-respecting vertex map.
///
/// Face `k` of a tetrahedron carries the three vertices `{0,..,3} \ {k}` in
/// increasing order; the gluing maps them to the increasing vertex list of
/// the target face.
fn glued_edge(face: usize, target_face: usize, pair: (u8, u8)) -> (u8, u8) {
    let verts = |f: usize| -> [u8; 3] {
        let mut v = [0u8; 3];
        let mut idx = 0;
        for x in 0..4u8 {
            if x as usize != f {
                v[idx] = x;
                idx += 1;
            }
        }
        v
    };
    let src = verts(face);
    let dst = verts(target_face);
    let map = |v: u8| dst[src.iter().position(|&s| s == v).unwrap()];
    let (a, b) = (map(pair.0), map(pair.1));
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn pair_index(pair: (u8, u8)) -> usize {
    EDGE_PAIRS.iter().position(|&p| p == pair).unwrap()
}

fn compute_edge_classes(tets: &[Tetrahedron]) -> Vec<EdgeClass> {
    let n = tets.len();
    let mut dsu: Vec<usize> = (0..6 * n).collect();
    fn find(dsu: &mut Vec<usize>, x: usize) -> usize {
        if dsu[x] != x {
            let r = find(dsu, dsu[x]);
            dsu[x] = r;
        }
        dsu[x]
    }
    for (ti, t) in tets.iter().enumerate() {
        for face in 0..4 {
            let (jt, jf) = t.face_gluings[face];
            for &(a, b) in EDGE_PAIRS.iter() {
                if a as usize == face || b as usize == face {
                    continue; // edge not on this face
                }
                let here = 6 * ti + pair_index((a, b));
                let there = 6 * jt + pair_index(glued_edge(face, jf, (a, b)));
                let (ra, rb) = (find(&mut dsu, here), find(&mut dsu, there));
                if ra != rb {
                    dsu[ra] = rb;
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<EdgeSlot>> = BTreeMap::new();
    for slot in 0..6 * n {
        let root = find(&mut dsu, slot);
        groups.entry(root).or_default().push(EdgeSlot {
            tet: slot / 6,
            pair: slot % 6,
        });
    }
    let mut classes: Vec<EdgeClass> = groups
        .into_values()
        .map(|mut slots| {
            slots.sort();
            EdgeClass { slots }
        })
        .collect();
    classes.sort_by_key(|c| c.slots[0]);
    classes
}

/// Parse and fully validate a triangulation document.
pub fn parse_triangulation(text: &str) -> Result<OrderedTriangulation, TriError> {
    let syntax = |line: usize, msg: &str| TriError::Syntax {
        line,
        msg: msg.to_string(),
    };
    let mut name = String::new();
    let mut kind = Kind::Generic;
    let mut declared_n: Option<usize> = None;
    let mut tets: Vec<Option<Tetrahedron>> = Vec::new();
    let mut curves: Vec<PeripheralCurve> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut words = content.split_whitespace();
        match words.next() {
            Some("triangulation") => {
                name = words
                    .next()
                    .ok_or_else(|| syntax(line, "missing name"))?
                    .to_string();
                for w in words {
                    if let Some(v) = w.strip_prefix("tets=") {
                        let n: usize = v
                            .parse()
                            .map_err(|_| syntax(line, "bad tets= count"))?;
                        declared_n = Some(n);
                        tets = vec![None; n];
                    } else if let Some(v) = w.strip_prefix("kind=") {
                        kind = match v {
                            "knot-complement" => Kind::KnotComplement,
                            "generic" => Kind::Generic,
                            _ => return Err(syntax(line, "kind must be knot-complement or generic")),
                        };
                    } else {
                        return Err(syntax(line, "unknown header field"));
                    }
                }
                if declared_n.is_none() {
                    return Err(syntax(line, "missing tets= count"));
                }
            }
            Some("tet") => {
                let n = declared_n.ok_or_else(|| syntax(line, "tet before header"))?;
                let idx: usize = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| syntax(line, "missing tet index"))?;
                if idx >= n {
                    return Err(syntax(line, "tet index out of range"));
                }
                let sign = match words.next() {
                    Some("sign=+1") => 1i8,
                    Some("sign=-1") => -1i8,
                    _ => return Err(syntax(line, "expected sign=+1 or sign=-1")),
                };
                if words.next() != Some("glue") {
                    return Err(syntax(line, "expected glue"));
                }
                let mut gluings = [(0usize, 0usize); 4];
                let mut got = [false; 4];
                for w in words {
                    let (lhs, rhs) = w
                        .split_once("->")
                        .ok_or_else(|| syntax(line, "expected k->j.k'"))?;
                    let k: usize = lhs.parse().map_err(|_| syntax(line, "bad face index"))?;
                    let (j, kp) = rhs
                        .split_once('.')
                        .ok_or_else(|| syntax(line, "expected j.k' after ->"))?;
                    let j: usize = j.parse().map_err(|_| syntax(line, "bad target tet"))?;
                    let kp: usize = kp.parse().map_err(|_| syntax(line, "bad target face"))?;
                    if k >= 4 || kp >= 4 {
                        return Err(syntax(line, "face index must be 0..3"));
                    }
                    gluings[k] = (j, kp);
                    got[k] = true;
                }
                if !got.iter().all(|&g| g) {
                    return Err(syntax(line, "all four faces must be glued"));
                }
                if tets[idx].is_some() {
                    return Err(TriError::DuplicateTet(idx));
                }
                tets[idx] = Some(Tetrahedron {
                    index: idx,
                    sign,
                    face_gluings: gluings,
                });
            }
            Some("curve") => {
                let cname = words
                    .next()
                    .ok_or_else(|| syntax(line, "missing curve name"))?
                    .to_string();
                let mut nu = 0i64;
                let mut c = None;
                let mut cp = None;
                let mut cpp = None;
                let parse_vec = |v: &str| -> Option<Vec<i64>> {
                    v.split(',').map(|x| x.trim().parse().ok()).collect()
                };
                for w in words {
                    if let Some(v) = w.strip_prefix("nu=") {
                        nu = v.parse().map_err(|_| syntax(line, "bad nu"))?;
                    } else if let Some(v) = w.strip_prefix("C=") {
                        c = parse_vec(v);
                    } else if let Some(v) = w.strip_prefix("Cp=") {
                        cp = parse_vec(v);
                    } else if let Some(v) = w.strip_prefix("Cpp=") {
                        cpp = parse_vec(v);
                    } else {
                        return Err(syntax(line, "unknown curve field"));
                    }
                }
                let (c, cp, cpp) = match (c, cp, cpp) {
                    (Some(a), Some(b), Some(d)) => (a, b, d),
                    _ => return Err(syntax(line, "curve needs C=, Cp=, Cpp=")),
                };
                curves.push(PeripheralCurve {
                    name: cname,
                    c,
                    cp,
                    cpp,
                    nu,
                });
            }
            Some(other) => return Err(syntax(line, &format!("unknown directive '{other}'"))),
            None => unreachable!(),
        }
    }

    let n = declared_n.ok_or_else(|| syntax(0, "missing triangulation header"))?;
    let tets: Vec<Tetrahedron> = tets
        .into_iter()
        .enumerate()
        .map(|(i, t)| t.ok_or(TriError::UnpairedFace { tet: i, face: 0 }))
        .collect::<Result<_, _>>()?;

    // face pairing must be a fixed-point-free involution
    for t in &tets {
        for face in 0..4 {
            let (j, k) = t.face_gluings[face];
            if j >= n {
                return Err(TriError::GluingOutOfRange {
                    tet: t.index,
                    face,
                });
            }
            if (j, k) == (t.index, face) {
                return Err(TriError::SelfGluedFace {
                    tet: t.index,
                    face,
                });
            }
            if tets[j].face_gluings[k] != (t.index, face) {
                return Err(TriError::UnpairedFace {
                    tet: t.index,
                    face,
                });
            }
        }
    }

    for c in &curves {
        for v in [&c.c, &c.cp, &c.cpp] {
            if v.len() != n {
                return Err(TriError::CurveLength {
                    name: c.name.clone(),
                    got: v.len(),
                    expected: n,
                });
            }
        }
    }

    let edge_classes = compute_edge_classes(&tets);
    if kind == Kind::KnotComplement && edge_classes.len() != n {
        return Err(TriError::EdgeClassCount {
            expected: n,
            found: edge_classes.len(),
        });
    }

    Ok(OrderedTriangulation {
        name,
        kind,
        tetrahedra: tets,
        curves,
        edge_classes,
    })
}
