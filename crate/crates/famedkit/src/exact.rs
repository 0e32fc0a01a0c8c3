//! Exact rational matrices and integer linear algebra.
//!
//! Everything the FAMED certificate touches is computed here without floating
//! point: rational Gaussian elimination for determinants and inverses, and a
//! Hermite-normal-form solver for integer systems (flattenings, symplectic
//! completions).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

/// Dense matrix over `BigRational`, row major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c));
        RatMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat_int(x)).collect())
                .collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> RatMat {
        let mut out = RatMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.cols, other.rows);
        let mut out = RatMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let v = &out[(i, j)] + a * b;
                        out[(i, j)] = v;
                    }
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &RatMat) -> RatMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a = &*a - b;
        }
        out
    }

    pub fn scale(&self, s: &Rat) -> RatMat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = &*a * s;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Determinant by exact Gaussian elimination.
    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rat::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m[(r, col)].is_zero()) else {
                return Rat::zero();
            };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let pivot = m[(col, col)].clone();
            det *= &pivot;
            for r in col + 1..n {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let f = &m[(r, col)] / &pivot;
                for c in col..n {
                    let v = &m[(r, c)] - &f * &m[(col, c)];
                    m[(r, c)] = v;
                }
            }
        }
        det
    }

    /// Exact inverse; `None` when singular.
    pub fn inverse(&self) -> Option<RatMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = RatMat::identity(n);
        for col in 0..n {
            let p = (col..n).find(|&r| !m[(r, col)].is_zero())?;
            if p != col {
                m.swap_rows(p, col);
                inv.swap_rows(p, col);
            }
            let pivot = m[(col, col)].clone();
            for c in 0..n {
                m[(col, c)] = &m[(col, c)] / &pivot;
                inv[(col, c)] = &inv[(col, c)] / &pivot;
            }
            for r in 0..n {
                if r == col || m[(r, col)].is_zero() {
                    continue;
                }
                let f = m[(r, col)].clone();
                for c in 0..n {
                    let v = &m[(r, c)] - &f * &m[(col, c)];
                    m[(r, c)] = v;
                    let w = &inv[(r, c)] - &f * &inv[(col, c)];
                    inv[(r, c)] = w;
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].to_f64().expect("rational out of f64 range")
        })
    }
}

impl std::ops::Index<(usize, usize)> for RatMat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

impl std::fmt::Display for RatMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Solution set of an integer linear system `A x = b`.
#[derive(Clone, Debug)]
pub struct IntSolution {
    pub particular: Vec<Int>,
    pub kernel: Vec<Vec<Int>>,
}

/// Row-style Hermite normal form: returns `(u, h)` with `u * m = h`,
/// `u` unimodular and `h` in row echelon with positive pivots reduced
/// upwards.
pub fn row_hnf(m: &[Vec<Int>]) -> (Vec<Vec<Int>>, Vec<Vec<Int>>) {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut h: Vec<Vec<Int>> = m.to_vec();
    let mut u: Vec<Vec<Int>> = (0..rows)
        .map(|i| {
            (0..rows)
                .map(|j| if i == j { Int::one() } else { Int::zero() })
                .collect()
        })
        .collect();
    let mut r = 0usize;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        // gcd sweep: zero out entries below the pivot
        loop {
            let mut best: Option<usize> = None;
            for i in r..rows {
                if !h[i][c].is_zero()
                    && best.is_none_or(|b| h[i][c].abs() < h[b][c].abs())
                {
                    best = Some(i);
                }
            }
            let Some(p) = best else {
                break;
            };
            h.swap(r, p);
            u.swap(r, p);
            let mut done = true;
            for i in r + 1..rows {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = div_round(&h[i][c], &h[r][c]);
                row_axpy(&mut h, i, r, &q);
                row_axpy(&mut u, i, r, &q);
                if !h[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            negate_row(&mut h, r);
            negate_row(&mut u, r);
        }
        for i in 0..r {
            if !h[i][c].is_zero() {
                let q = h[i][c].div_floor(&h[r][c]);
                row_axpy(&mut h, i, r, &q);
                row_axpy(&mut u, i, r, &q);
            }
        }
        r += 1;
    }
    (u, h)
}

fn div_round(a: &Int, b: &Int) -> Int {
    // nearest-integer quotient, ties toward zero
    let (q, r) = a.div_rem(b);
    if &r.abs() * 2 > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

fn row_axpy(m: &mut [Vec<Int>], dst: usize, src: usize, q: &Int) {
    if q.is_zero() {
        return;
    }
    let srow = m[src].clone();
    for (d, s) in m[dst].iter_mut().zip(srow.iter()) {
        *d -= q * s;
    }
}

fn negate_row(m: &mut [Vec<Int>], i: usize) {
    for x in m[i].iter_mut() {
        *x = -x.clone();
    }
}

/// Integer solutions of `A x = b` via HNF of `Aᵀ`; `None` when no integer
/// solution exists. The particular solution is size-reduced against the
/// kernel lattice.
pub fn solve_integer(a: &[Vec<Int>], b: &[Int]) -> Option<IntSolution> {
    let m = a.len();
    assert_eq!(m, b.len());
    let n = a.first().map_or(0, |r| r.len());
    // rows of `at` = unknowns
    let at: Vec<Vec<Int>> = (0..n).map(|j| (0..m).map(|i| a[i][j].clone()).collect()).collect();
    let (u, h) = row_hnf(&at);
    // express b as an integer combination of the rows of h
    let mut c = vec![Int::zero(); n];
    let mut residual: Vec<Int> = b.to_vec();
    for (ri, hrow) in h.iter().enumerate() {
        let Some(p) = hrow.iter().position(|x| !x.is_zero()) else {
            continue;
        };
        let (q, rem) = residual[p].div_rem(&hrow[p]);
        if !rem.is_zero() {
            return None;
        }
        c[ri] = q.clone();
        for (res, hv) in residual.iter_mut().zip(hrow.iter()) {
            *res -= &q * hv;
        }
    }
    if residual.iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut particular = vec![Int::zero(); n];
    for (ci, urow) in c.iter().zip(u.iter()) {
        if ci.is_zero() {
            continue;
        }
        for (p, uv) in particular.iter_mut().zip(urow.iter()) {
            *p += ci * uv;
        }
    }
    let kernel: Vec<Vec<Int>> = h
        .iter()
        .enumerate()
        .filter(|(_, hrow)| hrow.iter().all(|x| x.is_zero()))
        .map(|(i, _)| u[i].clone())
        .collect();
    let particular = size_reduce(particular, &kernel);
    Some(IntSolution { particular, kernel })
}

/// Greedy size reduction of `x` modulo the lattice spanned by `basis`
/// (coordinate rounds until the Euclidean norm stops improving).
fn size_reduce(mut x: Vec<Int>, basis: &[Vec<Int>]) -> Vec<Int> {
    if basis.is_empty() {
        return x;
    }
    let norm2 = |v: &[Int]| -> Int { v.iter().map(|a| a * a).sum() };
    let mut best = norm2(&x);
    loop {
        let mut improved = false;
        for k in basis {
            let dot: Int = x.iter().zip(k.iter()).map(|(a, b)| a * b).sum();
            let kk = norm2(k);
            if kk.is_zero() {
                continue;
            }
            let q = div_round(&dot, &kk);
            if q.is_zero() {
                continue;
            }
            let cand: Vec<Int> = x.iter().zip(k.iter()).map(|(a, b)| a - &q * b).collect();
            let cn = norm2(&cand);
            if cn < best {
                best = cn;
                x = cand;
                improved = true;
            }
        }
        if !improved {
            return x;
        }
    }
}
