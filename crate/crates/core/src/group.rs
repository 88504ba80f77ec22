//! The stabilizer `G_h ≅ PGL(2, q)` of the arc as explicit 4×4 matrices, its
//! induced 6×6 action on Plücker coordinates, and a permutation-based orbit engine.

use rayon::prelude::*;

use crate::arc::ArcCtx;
use crate::geom::{mat_mul, mat_vec, transpose, ProjLine, ProjPlane, ProjPoint};
use crate::gf::{FieldCtx, Fq};

/// `(a, b, c, d)` with `ad + bc = 1`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct GroupElem {
    pub a: Fq,
    pub b: Fq,
    pub c: Fq,
    pub d: Fq,
}

impl GroupElem {
    pub fn new(f: &FieldCtx, a: Fq, b: Fq, c: Fq, d: Fq) -> Option<Self> {
        (f.mul(a, d) + f.mul(b, c) == Fq::ONE).then_some(GroupElem { a, b, c, d })
    }

    pub fn identity() -> Self {
        GroupElem { a: Fq::ONE, b: Fq::ZERO, c: Fq::ZERO, d: Fq::ONE }
    }

    /// Product in SL(2, q) = PGL(2, q), matching `M_g M_k ∝ M_{gk}`.
    pub fn compose(&self, f: &FieldCtx, k: &GroupElem) -> GroupElem {
        let m = |x, y| f.mul(x, y);
        GroupElem {
            a: m(self.a, k.a) + m(self.b, k.c),
            b: m(self.a, k.b) + m(self.b, k.d),
            c: m(self.c, k.a) + m(self.d, k.c),
            d: m(self.c, k.b) + m(self.d, k.d),
        }
    }

    pub fn inverse(&self) -> GroupElem {
        GroupElem { a: self.d, b: self.b, c: self.c, d: self.a }
    }

    /// The 4×4 matrix `M_{a,b,c,d}` acting on column vectors.
    pub fn matrix4(&self, arc: &ArcCtx) -> [[Fq; 4]; 4] {
        let f = arc.field();
        let m = |x, y| f.mul(x, y);
        let s = |x| arc.sigma(x);
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let (sa, sb, sc, sd) = (s(a), s(b), s(c), s(d));
        [
            [m(sa, a), m(sa, b), m(a, sb), m(sb, b)],
            [m(sa, c), m(sa, d), m(sb, c), m(sb, d)],
            [m(a, sc), m(b, sc), m(a, sd), m(b, sd)],
            [m(sc, c), m(sc, d), m(c, sd), m(sd, d)],
        ]
    }

    /// The 6×6 matrix `M̃_{a,b,c,d}` acting on Plücker column vectors.
    pub fn matrix6(&self, arc: &ArcCtx) -> [[Fq; 6]; 6] {
        let f = arc.field();
        let m = |x, y| f.mul(x, y);
        let sq = |x| f.square(x);
        let s = |x| arc.sigma(x);
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let (sa, sb, sc, sd) = (s(a), s(b), s(c), s(d));
        let o = Fq::ZERO;
        let e = m(sb, sc) + m(b, c);
        [
            [sq(sa), o, m(sa, sb), m(sa, sb), o, sq(sb)],
            [o, sq(a), m(a, b), m(a, b), sq(b), o],
            [m(sa, sc), m(a, c), e + Fq::ONE, e, m(b, d), m(sb, sd)],
            [m(sa, sc), m(a, c), e, e + Fq::ONE, m(b, d), m(sb, sd)],
            [o, sq(c), m(c, d), m(c, d), sq(d), o],
            [sq(sc), o, m(sc, sd), m(sc, sd), o, sq(sd)],
        ]
    }
}

/// Every element of the group, `q^3 - q` in total, in a fixed order.
pub fn all_elements(f: &FieldCtx) -> Vec<GroupElem> {
    let mut out = Vec::with_capacity(f.q() * f.q() * f.q() - f.q());
    for a in f.nonzero() {
        for b in f.elements() {
            for c in f.elements() {
                let d = f.div(Fq::ONE + f.mul(b, c), a);
                out.push(GroupElem { a, b, c, d });
            }
        }
    }
    for b in f.nonzero() {
        let c = f.inv(b);
        for d in f.elements() {
            out.push(GroupElem { a: Fq::ZERO, b, c, d });
        }
    }
    out
}

/// Translation, inversion and scaling by `sqrt(omega)`.
pub fn generators(f: &FieldCtx) -> Vec<GroupElem> {
    let s = f.sqrt(f.omega());
    let (o, l) = (Fq::ZERO, Fq::ONE);
    vec![
        GroupElem { a: l, b: o, c: l, d: l },
        GroupElem { a: o, b: l, c: l, d: o },
        GroupElem { a: s, b: o, c: o, d: f.inv(s) },
    ]
}

/// A group element with its matrices prepared for repeated application.
#[derive(Clone, Debug)]
pub struct Projectivity {
    pub elem: GroupElem,
    m4: [[Fq; 4]; 4],
    dual: [[Fq; 4]; 4],
    m6: [[Fq; 6]; 6],
}

impl Projectivity {
    pub fn new(arc: &ArcCtx, g: GroupElem) -> Self {
        let m4 = g.matrix4(arc);
        // planes transform by M^{-T} = J M J
        let jmj = {
            let mut r = [[Fq::ZERO; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    r[i][j] = m4[3 - i][3 - j];
                }
            }
            r
        };
        Projectivity { elem: g, m4, dual: jmj, m6: g.matrix6(arc) }
    }

    pub fn matrix4(&self) -> &[[Fq; 4]; 4] {
        &self.m4
    }

    pub fn matrix6(&self) -> &[[Fq; 6]; 6] {
        &self.m6
    }

    pub fn point(&self, f: &FieldCtx, p: &ProjPoint) -> ProjPoint {
        ProjPoint::new(f, mat_vec(f, &self.m4, &p.coords())).unwrap()
    }

    pub fn vector(&self, f: &FieldCtx, v: &[Fq; 4]) -> [Fq; 4] {
        mat_vec(f, &self.m4, v)
    }

    pub fn plane(&self, f: &FieldCtx, pl: &ProjPlane) -> ProjPlane {
        ProjPlane::new(f, mat_vec(f, &self.dual, &pl.dual())).unwrap()
    }

    pub fn line(&self, f: &FieldCtx, l: &ProjLine) -> ProjLine {
        let [u, v] = l.basis();
        ProjLine::new(f, mat_vec(f, &self.m4, &u), mat_vec(f, &self.m4, &v)).unwrap()
    }

    /// Raw 6-vector image (not normalized).
    pub fn plucker_vector(&self, f: &FieldCtx, p: &[Fq; 6]) -> [Fq; 6] {
        mat_vec(f, &self.m6, p)
    }
}

/// `M^T J M = J`.
pub fn is_symplectic(f: &FieldCtx, m: &[[Fq; 4]; 4]) -> bool {
    let mut j = [[Fq::ZERO; 4]; 4];
    for (i, row) in j.iter_mut().enumerate() {
        row[3 - i] = Fq::ONE;
    }
    mat_mul(f, &mat_mul(f, &transpose(m), &j), m) == j
}

/// Orbits of a group given by generator permutations of `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPartition {
    orbit_of: Vec<u32>,
    reps: Vec<usize>,
    sizes: Vec<usize>,
}

impl OrbitPartition {
    /// Sequential BFS scanning indices in increasing order, so orbit ids are
    /// ordered by minimal representative and the result is independent of how
    /// the permutation tables were computed.
    pub fn from_permutations(n: usize, perms: &[Vec<u32>]) -> Self {
        const UNSEEN: u32 = u32::MAX;
        let mut orbit_of = vec![UNSEEN; n];
        let mut reps = Vec::new();
        let mut sizes = Vec::new();
        let mut stack = Vec::new();
        for start in 0..n {
            if orbit_of[start] != UNSEEN {
                continue;
            }
            let id = reps.len() as u32;
            reps.push(start);
            orbit_of[start] = id;
            stack.push(start as u32);
            let mut size = 0;
            while let Some(x) = stack.pop() {
                size += 1;
                for p in perms {
                    let y = p[x as usize];
                    if orbit_of[y as usize] == UNSEEN {
                        orbit_of[y as usize] = id;
                        stack.push(y);
                    }
                }
            }
            sizes.push(size);
        }
        OrbitPartition { orbit_of, reps, sizes }
    }

    /// Build permutation tables in parallel, then partition.
    pub fn compute<F>(n: usize, gens: &[Projectivity], image: F) -> Self
    where
        F: Fn(&Projectivity, usize) -> usize + Sync,
    {
        let perms: Vec<Vec<u32>> = gens
            .iter()
            .map(|g| (0..n).into_par_iter().map(|i| image(g, i) as u32).collect())
            .collect();
        Self::from_permutations(n, &perms)
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn orbit_of(&self, i: usize) -> usize {
        self.orbit_of[i] as usize
    }

    pub fn representative(&self, id: usize) -> usize {
        self.reps[id]
    }

    pub fn size(&self, id: usize) -> usize {
        self.sizes[id]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn members(&self, id: usize) -> impl Iterator<Item = usize> + '_ {
        self.orbit_of
            .iter()
            .enumerate()
            .filter(move |(_, &o)| o as usize == id)
            .map(|(i, _)| i)
    }

    /// Sorted orbit sizes.
    pub fn size_multiset(&self) -> Vec<usize> {
        let mut s = self.sizes.clone();
        s.sort_unstable();
        s
    }
}

/// Prepared generators.
pub fn prepared_generators(arc: &ArcCtx) -> Vec<Projectivity> {
    generators(arc.field()).into_iter().map(|g| Projectivity::new(arc, g)).collect()
}

pub fn point_orbits(arc: &ArcCtx) -> OrbitPartition {
    let f = arc.field();
    let q = arc.q();
    OrbitPartition::compute(ProjPoint::count(q), &prepared_generators(arc), |g, i| {
        g.point(f, &ProjPoint::unrank(q, i)).rank(q)
    })
}

pub fn plane_orbits(arc: &ArcCtx) -> OrbitPartition {
    let f = arc.field();
    let q = arc.q();
    OrbitPartition::compute(ProjPlane::count(q), &prepared_generators(arc), |g, i| {
        g.plane(f, &ProjPlane::unrank(q, i)).rank(q)
    })
}

pub fn line_orbits(arc: &ArcCtx, index: &crate::geom::LineIndex) -> OrbitPartition {
    let f = arc.field();
    OrbitPartition::compute(index.len(), &prepared_generators(arc), |g, i| {
        index.rank(&g.line(f, &index.line(i)))
    })
}

/// Elements fixing `x` under `act`, by a full group scan.
pub fn stabilizer<T: PartialEq>(
    arc: &ArcCtx,
    x: &T,
    act: impl Fn(&Projectivity, &T) -> T + Sync,
) -> Vec<GroupElem>
where
    T: Sync,
{
    all_elements(arc.field())
        .into_par_iter()
        .filter(|&g| act(&Projectivity::new(arc, g), x) == *x)
        .collect()
}

pub fn stabilizer_order<T: PartialEq + Sync>(
    arc: &ArcCtx,
    x: &T,
    act: impl Fn(&Projectivity, &T) -> T + Sync,
) -> usize {
    stabilizer(arc, x, act).len()
}
