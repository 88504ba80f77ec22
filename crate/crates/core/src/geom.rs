//! Points, lines and planes of PG(3,q) in canonical form.
//!
//! Vectors are normalised so that the leftmost nonzero coordinate is 1; lines
//! are stored as the reduced row echelon form of any basis. The generic
//! helpers (`normalize`, `rref`, `kernel`, ...) also serve the 6-dimensional
//! Plücker space.

use crate::gf::{FieldCtx, Fq};

/// Canonical representative of the projective class of `v`, or `None` for zero.
pub fn normalize<const N: usize>(f: &FieldCtx, v: [Fq; N]) -> Option<[Fq; N]> {
    let lead = v.iter().position(|x| !x.is_zero())?;
    if v[lead] == Fq::ONE {
        return Some(v);
    }
    let s = f.inv(v[lead]);
    Some(v.map(|x| f.mul(s, x)))
}

pub fn scale<const N: usize>(f: &FieldCtx, s: Fq, v: &[Fq; N]) -> [Fq; N] {
    v.map(|x| f.mul(s, x))
}

pub fn add<const N: usize>(a: &[Fq; N], b: &[Fq; N]) -> [Fq; N] {
    let mut r = *a;
    for (x, y) in r.iter_mut().zip(b) {
        *x += *y;
    }
    r
}

pub fn dot<const N: usize>(f: &FieldCtx, a: &[Fq; N], b: &[Fq; N]) -> Fq {
    a.iter().zip(b).fold(Fq::ZERO, |acc, (&x, &y)| acc + f.mul(x, y))
}

/// `m * v` for a square matrix acting on column vectors.
pub fn mat_vec<const N: usize>(f: &FieldCtx, m: &[[Fq; N]; N], v: &[Fq; N]) -> [Fq; N] {
    let mut r = [Fq::ZERO; N];
    for (ri, row) in r.iter_mut().zip(m) {
        *ri = dot(f, row, v);
    }
    r
}

pub fn mat_mul<const N: usize>(f: &FieldCtx, a: &[[Fq; N]; N], b: &[[Fq; N]; N]) -> [[Fq; N]; N] {
    let mut r = [[Fq::ZERO; N]; N];
    for i in 0..N {
        for j in 0..N {
            let mut acc = Fq::ZERO;
            for k in 0..N {
                acc += f.mul(a[i][k], b[k][j]);
            }
            r[i][j] = acc;
        }
    }
    r
}

pub fn transpose<const N: usize>(a: &[[Fq; N]; N]) -> [[Fq; N]; N] {
    let mut r = [[Fq::ZERO; N]; N];
    for i in 0..N {
        for j in 0..N {
            r[i][j] = a[j][i];
        }
    }
    r
}

/// Reduces `rows` in place to reduced row echelon form, dropping zero rows.
/// Returns the rank.
pub fn rref<const N: usize>(f: &FieldCtx, rows: &mut Vec<[Fq; N]>) -> usize {
    let mut r = 0;
    for col in 0..N {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let s = f.inv(rows[r][col]);
        rows[r] = scale(f, s, &rows[r]);
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let m = rows[i][col];
                let sub = scale(f, m, &rows[r]);
                rows[i] = add(&rows[i], &sub);
            }
        }
        r += 1;
    }
    rows.truncate(r);
    r
}

/// Rank over GF(q) by Gaussian elimination.
pub fn rank<const N: usize>(f: &FieldCtx, rows: &[[Fq; N]]) -> usize {
    let mut m = rows.to_vec();
    rref(f, &mut m)
}

/// Basis of `{x : r . x = 0 for every row r}`.
pub fn kernel<const N: usize>(f: &FieldCtx, rows: &[[Fq; N]]) -> Vec<[Fq; N]> {
    let mut m = rows.to_vec();
    let r = rref(f, &mut m);
    let pivots: Vec<usize> = m
        .iter()
        .map(|row| row.iter().position(|x| !x.is_zero()).unwrap())
        .collect();
    let mut basis = Vec::with_capacity(N - r);
    for free in (0..N).filter(|c| !pivots.contains(c)) {
        let mut v = [Fq::ZERO; N];
        v[free] = Fq::ONE;
        for (row, &p) in m.iter().zip(&pivots) {
            // characteristic 2: x_p = sum of row[free] * x_free
            v[p] = row[free];
        }
        basis.push(v);
    }
    basis
}

/// Number of points of PG(N-1, q).
pub fn proj_count(q: usize, dim_plus_one: usize) -> usize {
    (0..dim_plus_one).map(|k| q.pow(k as u32)).sum()
}

/// Lexicographic rank of a canonical vector among all canonical vectors of length `N`.
pub fn proj_rank<const N: usize>(q: usize, v: &[Fq; N]) -> usize {
    let lead = v.iter().position(|x| !x.is_zero()).expect("nonzero vector");
    debug_assert_eq!(v[lead], Fq::ONE);
    // vectors whose leading 1 sits further right sort first
    let offset: usize = ((lead + 1)..N).map(|p| q.pow((N - 1 - p) as u32)).sum();
    let mut r = 0usize;
    for x in &v[lead + 1..] {
        r = r * q + x.0 as usize;
    }
    offset + r
}

pub fn proj_unrank<const N: usize>(q: usize, mut idx: usize) -> [Fq; N] {
    let mut v = [Fq::ZERO; N];
    for lead in (0..N).rev() {
        let block = q.pow((N - 1 - lead) as u32);
        if idx < block {
            v[lead] = Fq::ONE;
            for slot in ((lead + 1)..N).rev() {
                v[slot] = Fq((idx % q) as u8);
                idx /= q;
            }
            return v;
        }
        idx -= block;
    }
    panic!("projective index out of range");
}

/// A point of PG(3,q).
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ProjPoint([Fq; 4]);

impl ProjPoint {
    pub fn new(f: &FieldCtx, v: [Fq; 4]) -> Option<Self> {
        normalize(f, v).map(ProjPoint)
    }

    /// `U_i`, 1-based as in the usual notation.
    pub fn unit(i: usize) -> Self {
        let mut v = [Fq::ZERO; 4];
        v[i - 1] = Fq::ONE;
        ProjPoint(v)
    }

    pub fn coords(&self) -> [Fq; 4] {
        self.0
    }

    pub fn rank(&self, q: usize) -> usize {
        proj_rank(q, &self.0)
    }

    pub fn unrank(q: usize, idx: usize) -> Self {
        ProjPoint(proj_unrank(q, idx))
    }

    pub fn count(q: usize) -> usize {
        proj_count(q, 4)
    }
}

/// A plane of PG(3,q), stored by the coefficients of its linear form.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ProjPlane([Fq; 4]);

impl ProjPlane {
    pub fn new(f: &FieldCtx, dual: [Fq; 4]) -> Option<Self> {
        normalize(f, dual).map(ProjPlane)
    }

    pub fn dual(&self) -> [Fq; 4] {
        self.0
    }

    pub fn contains(&self, f: &FieldCtx, p: &ProjPoint) -> bool {
        dot(f, &self.0, &p.0).is_zero()
    }

    pub fn points(&self, f: &FieldCtx) -> Vec<ProjPoint> {
        let basis = kernel(f, &[self.0]);
        debug_assert_eq!(basis.len(), 3);
        let q = f.q();
        (0..proj_count(q, 3))
            .map(|i| {
                let c: [Fq; 3] = proj_unrank(q, i);
                let mut v = [Fq::ZERO; 4];
                for (ci, b) in c.iter().zip(&basis) {
                    v = add(&v, &scale(f, *ci, b));
                }
                ProjPoint::new(f, v).unwrap()
            })
            .collect()
    }

    pub fn rank(&self, q: usize) -> usize {
        proj_rank(q, &self.0)
    }

    pub fn unrank(q: usize, idx: usize) -> Self {
        ProjPlane(proj_unrank(q, idx))
    }

    pub fn count(q: usize) -> usize {
        proj_count(q, 4)
    }
}

/// A line of PG(3,q) as a 2x4 matrix in reduced row echelon form.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ProjLine([[Fq; 4]; 2]);

impl ProjLine {
    /// Span of two vectors; `None` if they are dependent.
    pub fn new(f: &FieldCtx, u: [Fq; 4], v: [Fq; 4]) -> Option<Self> {
        let mut m = vec![u, v];
        (rref(f, &mut m) == 2).then(|| ProjLine([m[0], m[1]]))
    }

    pub fn through(f: &FieldCtx, p: &ProjPoint, r: &ProjPoint) -> Option<Self> {
        Self::new(f, p.0, r.0)
    }

    pub fn basis(&self) -> [[Fq; 4]; 2] {
        self.0
    }

    pub fn contains(&self, f: &FieldCtx, p: &ProjPoint) -> bool {
        rank(f, &[self.0[0], self.0[1], p.0]) == 2
    }

    /// The q+1 points of the line.
    pub fn points(&self, f: &FieldCtx) -> Vec<ProjPoint> {
        let [u, v] = self.0;
        let mut pts = Vec::with_capacity(f.q() + 1);
        pts.push(ProjPoint::new(f, v).unwrap());
        for l in f.elements() {
            pts.push(ProjPoint::new(f, add(&u, &scale(f, l, &v))).unwrap());
        }
        pts
    }

    /// Dual coordinates of the two planes cutting out the line.
    pub fn equations(&self, f: &FieldCtx) -> [[Fq; 4]; 2] {
        let k = kernel(f, &self.0);
        [k[0], k[1]]
    }

    /// Common point of two distinct coplanar lines.
    pub fn meet(&self, f: &FieldCtx, other: &ProjLine) -> Option<ProjPoint> {
        if self == other {
            return None;
        }
        self.points(f).into_iter().find(|p| other.contains(f, p))
    }

    /// Big-endian packing of the eight coordinates; orders like the coordinates.
    pub fn key(&self) -> u64 {
        self.0
            .iter()
            .flatten()
            .fold(0u64, |acc, x| (acc << 8) | x.0 as u64)
    }

    pub fn from_key(key: u64) -> Self {
        let mut m = [[Fq::ZERO; 4]; 2];
        for k in 0..8 {
            m[k / 4][k % 4] = Fq(((key >> (8 * (7 - k))) & 0xff) as u8);
        }
        ProjLine(m)
    }

    pub fn count(q: usize) -> usize {
        (q * q + 1) * (q * q + q + 1)
    }
}

/// The subspace spanned by a set of points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subspace {
    Point(ProjPoint),
    Line(ProjLine),
    Plane(ProjPlane),
    Whole,
}

pub fn span(f: &FieldCtx, points: &[ProjPoint]) -> Subspace {
    assert!(!points.is_empty(), "span of an empty set");
    let mut m: Vec<[Fq; 4]> = points.iter().map(|p| p.0).collect();
    match rref(f, &mut m) {
        1 => Subspace::Point(ProjPoint(m[0])),
        2 => Subspace::Line(ProjLine([m[0], m[1]])),
        3 => Subspace::Plane(ProjPlane::new(f, kernel(f, &m)[0]).unwrap()),
        _ => Subspace::Whole,
    }
}

/// Rank of a list of 4-vectors.
pub fn rank4(f: &FieldCtx, rows: &[[Fq; 4]]) -> usize {
    rank(f, rows)
}

pub fn enumerate_points(q: usize) -> impl Iterator<Item = ProjPoint> {
    (0..ProjPoint::count(q)).map(move |i| ProjPoint::unrank(q, i))
}

pub fn enumerate_planes(q: usize) -> impl Iterator<Item = ProjPlane> {
    (0..ProjPlane::count(q)).map(move |i| ProjPlane::unrank(q, i))
}

/// Sorted table of all lines of PG(3,q); the index of a line is its position
/// in lexicographic order of the canonical coordinates.
#[derive(Clone, Debug)]
pub struct LineIndex {
    keys: Vec<u64>,
}

impl LineIndex {
    pub fn new(f: &FieldCtx) -> Self {
        let q = f.q();
        let mut keys = Vec::with_capacity(ProjLine::count(q));
        let e = |i: usize| Fq(i as u8);
        let o = Fq::ZERO;
        let l = Fq::ONE;
        // one block per pivot pattern of a 2x4 reduced echelon matrix
        for a in 0..q {
            for b in 0..q {
                for c in 0..q {
                    for d in 0..q {
                        keys.push(ProjLine([[l, o, e(a), e(b)], [o, l, e(c), e(d)]]).key());
                    }
                    keys.push(ProjLine([[l, e(a), o, e(b)], [o, o, l, e(c)]]).key());
                }
                keys.push(ProjLine([[l, e(a), e(b), o], [o, o, o, l]]).key());
                keys.push(ProjLine([[o, l, o, e(a)], [o, o, l, e(b)]]).key());
            }
            keys.push(ProjLine([[o, l, e(a), o], [o, o, o, l]]).key());
        }
        keys.push(ProjLine([[o, o, l, o], [o, o, o, l]]).key());
        keys.sort_unstable();
        debug_assert_eq!(keys.len(), ProjLine::count(q));
        LineIndex { keys }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn rank(&self, line: &ProjLine) -> usize {
        self.keys
            .binary_search(&line.key())
            .expect("canonical line present in the index")
    }

    pub fn line(&self, idx: usize) -> ProjLine {
        ProjLine::from_key(self.keys[idx])
    }

    pub fn iter(&self) -> impl Iterator<Item = ProjLine> + '_ {
        self.keys.iter().map(|&k| ProjLine::from_key(k))
    }
}
