//! Line geometry through the Plücker embedding: the Klein quadric, its parabolic
//! section `Q(4, q)` by `Π: X3 = X4`, the conics `𝒳`, `𝒳'`, the hypersurface
//! `𝒴: F_h = 0`, and the hyperbolic solid sections whose reguli encode the
//! non-generator lines of PG(3, q).
//!
//! Coordinates are `(X1..X6) = (p01, p02, p03, p12, p13, p23)`, stored 0-based.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::arc::{gram, ArcCtx};
use crate::error::{Error, Result};
use crate::geom::{self, kernel, normalize, proj_count, proj_unrank, rank, LineIndex, ProjLine, ProjPoint};
use crate::gf::{ExtCtx, FieldCtx, Fq, Fq2};
use crate::group::{all_elements, prepared_generators, OrbitPartition, Projectivity};

pub type Vec6 = [Fq; 6];

/// `Π^⊥ = (0, 0, 1, 1, 0, 0)`.
pub const PI_POLE: Vec6 = [Fq(0), Fq(0), Fq(1), Fq(1), Fq(0), Fq(0)];

/// Pack a 6-vector for ordered lookup.
pub fn key6(v: &Vec6) -> u64 {
    v.iter().fold(0u64, |k, x| (k << 8) | x.0 as u64)
}

/// `X1 X6 + X2 X5 + X3 X4`.
pub fn klein_form(f: &FieldCtx, x: &Vec6) -> Fq {
    f.mul(x[0], x[5]) + f.mul(x[1], x[4]) + f.mul(x[2], x[3])
}

/// Polar form of the Klein quadric.
pub fn bilinear(f: &FieldCtx, x: &Vec6, y: &Vec6) -> Fq {
    geom::dot(f, x, &pair_swap(y))
}

/// Coordinates paired by the Klein form: 1↔6, 2↔5, 3↔4.
pub fn pair_swap(y: &Vec6) -> Vec6 {
    [y[5], y[4], y[3], y[2], y[1], y[0]]
}

pub fn in_pi(x: &Vec6) -> bool {
    x[2] == x[3]
}

/// Normalized point of the Klein quadric.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct PluckerPoint(Vec6);

impl PluckerPoint {
    pub fn new(f: &FieldCtx, v: Vec6) -> Option<Self> {
        normalize(f, v).map(PluckerPoint)
    }

    pub fn coords(&self) -> Vec6 {
        self.0
    }

    pub fn key(&self) -> u64 {
        key6(&self.0)
    }
}

/// Raw Plücker vector of the line spanned by `x`, `y`.
pub fn plucker_vector(f: &FieldCtx, x: &[Fq; 4], y: &[Fq; 4]) -> Vec6 {
    let p = |i: usize, j: usize| f.mul(x[i], y[j]) + f.mul(x[j], y[i]);
    [p(0, 1), p(0, 2), p(0, 3), p(1, 2), p(1, 3), p(2, 3)]
}

pub fn plucker(f: &FieldCtx, l: &ProjLine) -> PluckerPoint {
    let [x, y] = l.basis();
    PluckerPoint::new(f, plucker_vector(f, &x, &y)).unwrap()
}

/// Inverse Plücker map: the rows of the alternating matrix `(p_ij)` span the line.
pub fn unplucker(f: &FieldCtx, p: &Vec6) -> Result<ProjLine> {
    if !klein_form(f, p).is_zero() || p.iter().all(|x| x.is_zero()) {
        return Err(Error::NotALine(format!("{p:?} is not on the Klein quadric")));
    }
    let o = Fq::ZERO;
    let mut rows = vec![
        [o, p[0], p[1], p[2]],
        [p[0], o, p[3], p[4]],
        [p[1], p[3], o, p[5]],
        [p[2], p[4], p[5], o],
    ];
    let r = geom::rref(f, &mut rows);
    if r != 2 {
        return Err(Error::NotALine(format!("{p:?} has rank {r}")));
    }
    Ok(ProjLine::new(f, rows[0], rows[1]).unwrap())
}

/// `F_h = X1 X5^(2^h) + X2^(2^h) X6`.
pub fn f_h(arc: &ArcCtx, x: &Vec6) -> Fq {
    let f = arc.field();
    f.mul(x[0], arc.sigma(x[4])) + f.mul(arc.sigma(x[1]), x[5])
}

/// A line of PG(5, q) in reduced row echelon form.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct KleinLine([Vec6; 2]);

impl KleinLine {
    pub fn new(f: &FieldCtx, u: Vec6, v: Vec6) -> Option<Self> {
        let mut rows = vec![u, v];
        (geom::rref(f, &mut rows) == 2).then(|| KleinLine([rows[0], rows[1]]))
    }

    pub fn basis(&self) -> [Vec6; 2] {
        self.0
    }

    /// First basis row, then `u + λ v`.
    pub fn points(&self, f: &FieldCtx) -> Vec<Vec6> {
        let [u, v] = self.0;
        let mut out = vec![normalize(f, v).unwrap()];
        for l in f.elements() {
            out.push(normalize(f, geom::add(&u, &geom::scale(f, l, &v))).unwrap());
        }
        out
    }

    pub fn meets(&self, f: &FieldCtx, other: &KleinLine) -> bool {
        let [a, b] = self.0;
        let [c, d] = other.0;
        rank(f, &[a, b, c, d]) < 4
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize)]
pub enum KleinPointLabel {
    X,
    XPrime,
    YMinusConics,
    Z(u8),
}

impl KleinPointLabel {
    pub fn name(&self) -> String {
        match self {
            Self::X => "X".into(),
            Self::XPrime => "X'".into(),
            Self::YMinusConics => "Y\\(X∪X')".into(),
            Self::Z(i) => format!("Z_{i}"),
        }
    }

    /// All labels occurring for `q ≡ xi (mod 3)`, in table order.
    pub fn all(xi: i64) -> Vec<KleinPointLabel> {
        let mut v = vec![Self::X, Self::XPrime, Self::YMinusConics, Self::Z(1)];
        if xi == 1 {
            v.extend([Self::Z(2), Self::Z(3)]);
        }
        v
    }

    pub fn expected_size(&self, q: usize, xi: i64) -> usize {
        match self {
            Self::X | Self::XPrime => q + 1,
            Self::YMinusConics => q * q - 1,
            Self::Z(_) => (q * q * q - q) / (2 + xi) as usize,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize)]
pub enum KleinLineClass {
    Lq1,
    L0,
    L1,
    L2,
    L3,
}

impl KleinLineClass {
    pub const ALL: [KleinLineClass; 5] = [Self::Lq1, Self::L0, Self::L1, Self::L2, Self::L3];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        ["L_{q+1}", "L_0", "L_1", "L_2", "L_3"][self.index()]
    }

    pub fn from_hits(hits: usize, q: usize) -> Option<Self> {
        match hits {
            h if h == q + 1 => Some(Self::Lq1),
            0 => Some(Self::L0),
            1 => Some(Self::L1),
            2 => Some(Self::L2),
            3 => Some(Self::L3),
            _ => None,
        }
    }

    pub fn expected_size(self, q: usize) -> usize {
        let c = q * q * q - q;
        match self {
            Self::Lq1 => q + 1,
            Self::L0 => c / 3,
            Self::L1 => c / 2,
            Self::L2 => q * q + q,
            Self::L3 => c / 6,
        }
    }
}

/// How the cube class of `F_1` is mapped to the index of `Z_i`.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum ZConvention {
    /// `Z_i` is the orbit of `U1 + ω^(i-1) U5`, on which `F_1 = ω^(2(i-1))`.
    Representative,
    /// `Z_i` is where `F_1 = ω^(3j+i-1)`.
    Exponent,
}

pub fn z_index_from_value(f: &FieldCtx, value: Fq, conv: ZConvention) -> u8 {
    let r = f.log(value).expect("nonzero") % 3;
    match conv {
        ZConvention::Representative => [1, 3, 2][r],
        ZConvention::Exponent => [1, 2, 3][r],
    }
}

/// `U1 + ω^(i-1) U5`.
pub fn z_representative(f: &FieldCtx, i: u8) -> Vec6 {
    let mut v = [Fq::ZERO; 6];
    v[0] = Fq::ONE;
    v[4] = f.exp(i as usize - 1);
    v
}

/// The five families of hyperbolic solid sections.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize)]
pub enum RegulusFamily {
    /// `Σ: X3 = 0`, orbit size q(q+1)/2.
    SecantFixed,
    /// `Σ: X1 = X3`, orbit size q^3 - q.
    SecantFull,
    /// `Σ: X1 + z^4/(z^2+1) X3 + X6 = 0`, orbit size (q^3-q)/2.
    SecantGeneric,
    /// The ζ solid, orbit size q(q-1)/2.
    ExternalFixed,
    /// The t solids, orbit size (q^3-q)/2.
    ExternalGeneric,
}

impl RegulusFamily {
    pub const ALL: [RegulusFamily; 5] = [
        Self::SecantFixed,
        Self::SecantFull,
        Self::SecantGeneric,
        Self::ExternalFixed,
        Self::ExternalGeneric,
    ];

    pub fn expected_orbit_size(self, q: usize) -> usize {
        let c = q * q * q - q;
        match self {
            Self::SecantFixed => q * (q + 1) / 2,
            Self::SecantFull => c,
            Self::SecantGeneric | Self::ExternalGeneric => c / 2,
            Self::ExternalFixed => q * (q - 1) / 2,
        }
    }

    pub fn conic_points(self) -> usize {
        match self {
            Self::SecantFixed | Self::SecantFull | Self::SecantGeneric => 2,
            _ => 0,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize)]
pub enum FamilyParam {
    None,
    Z(u8),
    T(u8, u8),
}

impl FamilyParam {
    pub fn t(&self) -> Option<Fq2> {
        match *self {
            FamilyParam::T(a0, a1) => Some(Fq2::new(Fq(a0), Fq(a1))),
            _ => None,
        }
    }
}

/// Linear form of a solid of `Π`; coordinate 4 is folded into 3.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Solid(Vec6);

impl Solid {
    pub fn new(f: &FieldCtx, mut w: Vec6) -> Option<Self> {
        w[2] += w[3];
        w[3] = Fq::ZERO;
        normalize(f, w).map(Solid)
    }

    pub fn form(&self) -> Vec6 {
        self.0
    }

    pub fn contains(&self, f: &FieldCtx, x: &Vec6) -> bool {
        geom::dot(f, &self.0, x).is_zero()
    }

    /// Every solid of `Π`.
    pub fn all(f: &FieldCtx) -> impl Iterator<Item = Solid> + '_ {
        let q = f.q();
        (0..proj_count(q, 5)).map(move |i| {
            let w: [Fq; 5] = proj_unrank(q, i);
            Solid([w[0], w[1], w[2], Fq::ZERO, w[3], w[4]])
        })
    }
}

/// A hyperbolic section split into its two reguli. Regulus lines are stored as
/// the PG(3, q) points whose generator pencils they are.
#[derive(Clone, Debug)]
pub struct RegulusPair {
    pub solid: Solid,
    pub r1: Vec<ProjPoint>,
    pub r2: Vec<ProjPoint>,
}

#[derive(Clone, Debug)]
pub enum SolidSection {
    Hyperbolic(RegulusPair),
    Degenerate { points: usize, lines: usize },
}

/// A representative solid with its parameter.
#[derive(Clone, Debug)]
pub struct Representative {
    pub family: RegulusFamily,
    pub param: FamilyParam,
    pub solid: Solid,
    /// A line of the (extended) section that marks the first regulus.
    pub marker: [[Fq2; 6]; 2],
}

/// Klein-side context: the points of `Q(4, q)` and the closed-form labels.
pub struct KleinCtx<'a> {
    arc: &'a ArcCtx,
    q4: Vec<Vec6>,
    keys: Vec<u64>,
    z_bfs: Option<(OrbitPartition, [usize; 3])>,
}

impl<'a> KleinCtx<'a> {
    pub fn new(arc: &'a ArcCtx) -> Self {
        let f = arc.field();
        let q = arc.q();
        // Q(4, q) from PG(4, q) on (X1, X2, X3, X5, X6) with X4 = X3
        let mut q4: Vec<Vec6> = (0..proj_count(q, 5))
            .map(|i| {
                let w: [Fq; 5] = proj_unrank(q, i);
                [w[0], w[1], w[2], w[2], w[3], w[4]]
            })
            .filter(|x| klein_form(f, x).is_zero())
            .collect();
        q4.sort_by_key(key6);
        let keys = q4.iter().map(key6).collect();
        let mut ctx = KleinCtx { arc, q4, keys, z_bfs: None };
        if f.xi() == 1 && arc.h() != 1 {
            let orbits = ctx.q4_orbits();
            let ids = [1u8, 2, 3].map(|i| {
                let r = normalize(f, z_representative(f, i)).unwrap();
                orbits.orbit_of(ctx.q4_rank(&r).unwrap())
            });
            ctx.z_bfs = Some((orbits, ids));
        }
        ctx
    }

    pub fn arc(&self) -> &ArcCtx {
        self.arc
    }

    pub fn field(&self) -> &FieldCtx {
        self.arc.field()
    }

    pub fn q4_points(&self) -> &[Vec6] {
        &self.q4
    }

    pub fn q4_rank(&self, x: &Vec6) -> Option<usize> {
        self.keys.binary_search(&key6(x)).ok()
    }

    pub fn on_q4(&self, x: &Vec6) -> bool {
        in_pi(x) && klein_form(self.field(), x).is_zero() && x.iter().any(|c| !c.is_zero())
    }

    pub fn on_y(&self, x: &Vec6) -> bool {
        in_pi(x) && f_h(self.arc, x).is_zero()
    }

    /// `𝒳 = π ∩ Q`, `π: X2 = X5 = X3 + X4 = 0`.
    pub fn on_x(&self, x: &Vec6) -> bool {
        self.on_q4(x) && x[1].is_zero() && x[4].is_zero()
    }

    /// `𝒳' = π^⊥ ∩ Q`, `π^⊥ = <U2, U5, U3 + U4>`.
    pub fn on_x_prime(&self, x: &Vec6) -> bool {
        self.on_q4(x) && x[0].is_zero() && x[5].is_zero()
    }

    /// Orbits of the 6×6 action on the points of `Q(4, q)`.
    pub fn q4_orbits(&self) -> OrbitPartition {
        let f = self.field();
        OrbitPartition::compute(self.q4.len(), &prepared_generators(self.arc), |g, i| {
            let y = normalize(f, g.plucker_vector(f, &self.q4[i])).unwrap();
            self.q4_rank(&y).expect("image on Q(4,q)")
        })
    }

    pub fn classify_point(&self, x: &Vec6) -> Result<KleinPointLabel> {
        if !self.on_q4(x) {
            return Err(Error::Domain(format!("{x:?} is not on Q(4,q)")));
        }
        let f = self.field();
        let x = normalize(f, *x).unwrap();
        if self.on_x(&x) {
            return Ok(KleinPointLabel::X);
        }
        if self.on_x_prime(&x) {
            return Ok(KleinPointLabel::XPrime);
        }
        let v = f_h(self.arc, &x);
        if v.is_zero() {
            return Ok(KleinPointLabel::YMinusConics);
        }
        if f.xi() == -1 {
            return Ok(KleinPointLabel::Z(1));
        }
        if self.arc.h() == 1 {
            return Ok(KleinPointLabel::Z(z_index_from_value(f, v, ZConvention::Representative)));
        }
        let (orbits, ids) = self.z_bfs.as_ref().unwrap();
        let o = orbits.orbit_of(self.q4_rank(&x).unwrap());
        let i = ids.iter().position(|&id| id == o).ok_or_else(|| {
            Error::InvariantViolation(format!("{x:?} off 𝒴 in no representative orbit"))
        })?;
        Ok(KleinPointLabel::Z(i as u8 + 1))
    }

    /// The pencil of generators through `p` (in the plane `p^s`), as a line of `Q(4, q)`.
    pub fn klein_line_of_point(&self, p: &ProjPoint) -> KleinLine {
        let f = self.field();
        let pc = p.coords();
        let basis = kernel(f, &[gram(&pc)]);
        let mut others = Vec::with_capacity(2);
        for u in basis {
            let mut cand = vec![pc];
            cand.extend(others.iter().copied());
            cand.push(u);
            if rank(f, &cand) == cand.len() {
                others.push(u);
            }
        }
        let a = plucker_vector(f, &pc, &others[0]);
        let b = plucker_vector(f, &pc, &others[1]);
        KleinLine::new(f, a, b).unwrap()
    }

    /// The common point of the generators on a line of `Q(4, q)`.
    pub fn vertex(&self, m: &KleinLine) -> Result<ProjPoint> {
        let f = self.field();
        let [a, b] = m.basis();
        let la = unplucker(f, &a)?;
        let lb = unplucker(f, &b)?;
        la.meet(f, &lb)
            .ok_or_else(|| Error::InvariantViolation(format!("{m:?} is not a pencil")))
    }

    pub fn classify_line(&self, m: &KleinLine) -> Result<KleinLineClass> {
        let f = self.field();
        let q = self.arc.q();
        let pts = m.points(f);
        if let Some(bad) = pts.iter().find(|x| !self.on_q4(x)) {
            return Err(Error::Domain(format!("{bad:?} on {m:?} is not on Q(4,q)")));
        }
        let hits = pts.iter().filter(|x| f_h(self.arc, x).is_zero()).count();
        KleinLineClass::from_hits(hits, q)
            .ok_or_else(|| Error::InvariantViolation(format!("{m:?} meets 𝒴 in {hits} points")))
    }

    /// Class of the Klein line of every point of PG(3, q), indexed by rank.
    pub fn line_classes(&self) -> Result<Vec<KleinLineClass>> {
        let q = self.arc.q();
        (0..ProjPoint::count(q))
            .into_par_iter()
            .map(|i| self.classify_line(&self.klein_line_of_point(&ProjPoint::unrank(q, i))))
            .collect()
    }

    /// The lines `ℓ_x` and `ℓ_∞` of `𝒴 ∩ Q(4, q)`.
    pub fn y_lines(&self) -> Vec<KleinLine> {
        let f = self.field();
        let s = |x| self.arc.sigma(x);
        let o = Fq::ZERO;
        let mut out: Vec<KleinLine> = f
            .elements()
            .map(|x| {
                let x2 = f.square(x);
                let sx = s(x);
                KleinLine::new(f, [o, Fq::ONE, x, x, x2, o], [Fq::ONE, o, sx, sx, o, f.square(sx)]).unwrap()
            })
            .collect();
        let mut u5 = [o; 6];
        u5[4] = Fq::ONE;
        let mut u6 = [o; 6];
        u6[5] = Fq::ONE;
        out.push(KleinLine::new(f, u5, u6).unwrap());
        out
    }

    /// The solid of `Π` cutting the reguli of a non-generator line and its polar.
    pub fn solid_of_line(&self, l: &ProjLine) -> Solid {
        let f = self.field();
        let p = plucker(f, l).coords();
        Solid::new(f, pair_swap(&p)).unwrap()
    }

    /// Split the section by the disjointness relation between its lines.
    pub fn solid_section(&self, solid: &Solid) -> SolidSection {
        let f = self.field();
        let q = self.arc.q();
        let points = self.q4.iter().filter(|x| solid.contains(f, x)).count();
        let lines: Vec<(ProjPoint, KleinLine)> = (0..ProjPoint::count(q))
            .map(|i| ProjPoint::unrank(q, i))
            .map(|p| (p, self.klein_line_of_point(&p)))
            .filter(|(_, m)| m.basis().iter().all(|x| solid.contains(f, x)))
            .collect();
        if points != (q + 1) * (q + 1) || lines.len() != 2 * (q + 1) {
            return SolidSection::Degenerate { points, lines: lines.len() };
        }
        let first = lines[0].1;
        let (same, other): (Vec<&(ProjPoint, KleinLine)>, Vec<&(ProjPoint, KleinLine)>) =
            lines.iter().partition(|(_, m)| *m == first || !m.meets(f, &first));
        let ok = same.len() == q + 1
            && same.iter().enumerate().all(|(i, a)| same[i + 1..].iter().all(|b| !a.1.meets(f, &b.1)))
            && other.iter().enumerate().all(|(i, a)| other[i + 1..].iter().all(|b| !a.1.meets(f, &b.1)))
            && same.iter().all(|a| other.iter().all(|b| a.1.meets(f, &b.1)));
        if !ok {
            return SolidSection::Degenerate { points, lines: lines.len() };
        }
        SolidSection::Hyperbolic(RegulusPair {
            solid: *solid,
            r1: same.iter().map(|x| x.0).collect(),
            r2: other.iter().map(|x| x.0).collect(),
        })
    }

    /// The line of PG(3, q) whose points are the vertices of a regulus.
    pub fn regulus_line(&self, vertices: &[ProjPoint]) -> Result<ProjLine> {
        let f = self.field();
        let l = ProjLine::through(f, &vertices[0], &vertices[1])
            .ok_or_else(|| Error::InvariantViolation("repeated regulus vertex".into()))?;
        if vertices.iter().all(|p| l.contains(f, p)) {
            Ok(l)
        } else {
            Err(Error::InvariantViolation("regulus vertices not collinear".into()))
        }
    }

    /// The five families of representative solids, one per parameter value.
    pub fn regulus_representatives(&self) -> Vec<Representative> {
        let f = self.field();
        let e = self.arc.ext();
        let o = Fq::ZERO;
        let l = Fq::ONE;
        let emb = |v: Vec6| v.map(Fq2::embed);
        let unit = |i: usize| {
            let mut v = [o; 6];
            v[i] = l;
            v
        };
        let mut out = Vec::new();
        out.push(Representative {
            family: RegulusFamily::SecantFixed,
            param: FamilyParam::None,
            solid: Solid::new(f, unit(2)).unwrap(),
            marker: [emb(unit(0)), emb(unit(1))],
        });
        out.push(Representative {
            family: RegulusFamily::SecantFull,
            param: FamilyParam::None,
            solid: Solid::new(f, [l, o, l, o, o, o]).unwrap(),
            marker: [emb(unit(4)), emb(unit(5))],
        });
        for z in f.elements().filter(|&z| z.0 > 1) {
            let z2 = f.square(z);
            let z4 = f.square(z2);
            let c = f.div(z4, z2 + l);
            out.push(Representative {
                family: RegulusFamily::SecantGeneric,
                param: FamilyParam::Z(z.0),
                solid: Solid::new(f, [l, o, c, o, o, l]).unwrap(),
                marker: [emb([l, o, z2 + l, z2 + l, o, z4 + l]), emb(unit(1))],
            });
        }
        let zeta = e.zeta();
        let nz = e.norm(zeta);
        let zp1 = zeta + Fq2::ONE;
        let z2p1 = e.square(zeta) + Fq2::ONE;
        let z4p1 = e.square(e.square(zeta)) + Fq2::ONE;
        let common = [Fq2::ZERO, Fq2::ONE, zp1, zp1, z2p1, Fq2::ZERO];
        out.push(Representative {
            family: RegulusFamily::ExternalFixed,
            param: FamilyParam::None,
            solid: Solid::new(f, [l, nz, f.square(nz), o, nz, l]).unwrap(),
            marker: [common, [Fq2::ONE, Fq2::ZERO, z2p1, z2p1, Fq2::ZERO, z4p1]],
        });
        for t in external_parameters(e) {
            let nt = e.norm(t);
            let s = f.div(nt, nz);
            let tp1 = t + Fq2::ONE;
            let t2p1 = e.square(t) + Fq2::ONE;
            out.push(Representative {
                family: RegulusFamily::ExternalGeneric,
                param: FamilyParam::T(t.a0.0, t.a1.0),
                solid: Solid::new(f, [l, s, nt, o, s, l]).unwrap(),
                marker: [common, [Fq2::ONE, Fq2::ZERO, tp1, tp1, Fq2::ZERO, t2p1]],
            });
        }
        out
    }

    /// Whether the marker line lies on the extended section.
    pub fn marker_on_section(&self, rep: &Representative) -> bool {
        let e = self.arc.ext();
        let w = rep.solid.form().map(Fq2::embed);
        let [u, v] = rep.marker;
        let form = |x: &[Fq2; 6], y: &[Fq2; 6]| {
            let sw = [y[5], y[4], y[3], y[2], y[1], y[0]];
            x.iter().zip(&sw).fold(Fq2::ZERO, |acc, (&a, &b)| acc + e.mul(a, b))
        };
        let lin = |x: &[Fq2; 6]| x.iter().zip(&w).fold(Fq2::ZERO, |acc, (&a, &b)| acc + e.mul(a, b));
        let quad = |x: &[Fq2; 6]| e.mul(x[0], x[5]) + e.mul(x[1], x[4]) + e.mul(x[2], x[3]);
        u[2] == u[3]
            && v[2] == v[3]
            && lin(&u).is_zero()
            && lin(&v).is_zero()
            && quad(&u).is_zero()
            && quad(&v).is_zero()
            && form(&u, &v).is_zero()
    }

    /// Order the pair so that `r1` is the regulus whose extension contains the marker.
    pub fn orient(&self, pair: RegulusPair, marker: &[[Fq2; 6]; 2]) -> Result<RegulusPair> {
        let f = self.field();
        let e = self.arc.ext();
        let m = self.klein_line_of_point(&pair.r1[0]);
        let [a, b] = m.basis();
        let rows = [a.map(Fq2::embed), b.map(Fq2::embed), marker[0], marker[1]];
        let _ = f;
        match ext_rank(e, &rows) {
            // disjoint from a line of r1, or equal to it: same regulus
            4 | 2 => Ok(pair),
            3 => Ok(RegulusPair { solid: pair.solid, r1: pair.r2, r2: pair.r1 }),
            r => Err(Error::InvariantViolation(format!("marker rank {r}"))),
        }
    }
}

/// `t ∈ GF(q^2) \ {0, ζ^2, ζ^(2q)}` with `(t+1)^(q+1) = 1`, in element order.
pub fn external_parameters(e: &ExtCtx) -> Vec<Fq2> {
    let zeta = e.zeta();
    let z2 = e.square(zeta);
    let z2q = e.frobenius(z2);
    e.elements()
        .filter(|&t| e.norm(t + Fq2::ONE) == Fq::ONE)
        .filter(|&t| !t.is_zero() && t != z2 && t != z2q)
        .collect()
}

/// Rank of a small matrix over GF(q^2).
pub fn ext_rank<const N: usize>(e: &ExtCtx, rows: &[[Fq2; N]]) -> usize {
    let mut m = rows.to_vec();
    let mut r = 0;
    for col in 0..N {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, p);
        let inv = e.inv(m[r][col]);
        let pivot = m[r].map(|x| e.mul(x, inv));
        m[r] = pivot;
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let c = m[i][col];
                for k in 0..N {
                    m[i][k] += e.mul(c, pivot[k]);
                }
            }
        }
        r += 1;
    }
    r
}

/// Sub-orbits of a line stabilizer acting on the lines of the plane `π`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubOrbits {
    pub stabilizer_order: usize,
    pub sizes: Vec<usize>,
}

/// Action of a group element on `π` in coordinates `(X1, X3, X6)`.
fn pi_matrix(g: &Projectivity) -> [[Fq; 3]; 3] {
    let m = g.matrix6();
    let idx = [0usize, 2, 5];
    let mut r = [[Fq::ZERO; 3]; 3];
    for (i, &ri) in idx.iter().enumerate() {
        r[i][0] = m[ri][0];
        r[i][1] = m[ri][2] + m[ri][3];
        r[i][2] = m[ri][5];
    }
    r
}

fn cross(f: &FieldCtx, a: &[Fq; 3], b: &[Fq; 3]) -> [Fq; 3] {
    [
        f.mul(a[1], b[2]) + f.mul(a[2], b[1]),
        f.mul(a[2], b[0]) + f.mul(a[0], b[2]),
        f.mul(a[0], b[1]) + f.mul(a[1], b[0]),
    ]
}

fn pi_line_image(f: &FieldCtx, m: &[[Fq; 3]; 3], w: &[Fq; 3]) -> [Fq; 3] {
    let k = kernel(f, &[*w]);
    let a = geom::mat_vec(f, m, &k[0]);
    let b = geom::mat_vec(f, m, &k[1]);
    normalize(f, cross(f, &a, &b)).unwrap()
}

/// Points `(1, t, t^2)`, `(0, 0, 1)` of the conic `𝒳` in `π`, on a line of `π`.
fn conic_hits(f: &FieldCtx, w: &[Fq; 3]) -> usize {
    let mut n = usize::from(w[2].is_zero());
    for t in f.elements() {
        if (w[0] + f.mul(w[1], t) + f.mul(w[2], f.square(t))).is_zero() {
            n += 1;
        }
    }
    n
}

/// Orbits of the stabilizer of a secant (`hits = 2`) or external (`hits = 0`)
/// line of `π` on the lines of `π` of the same kind.
pub fn pi_line_suborbits(arc: &ArcCtx, hits: usize) -> SubOrbits {
    let f = arc.field();
    let q = arc.q();
    let lines: Vec<[Fq; 3]> = (0..proj_count(q, 3))
        .map(|i| proj_unrank::<3>(q, i))
        .filter(|w| conic_hits(f, w) == hits)
        .collect();
    // ⟨U1, U6⟩ is X3 = 0; otherwise the first external line
    let base = if hits == 2 { [Fq::ZERO, Fq::ONE, Fq::ZERO] } else { lines[0] };
    let stab: Vec<[[Fq; 3]; 3]> = all_elements(f)
        .into_par_iter()
        .map(|g| pi_matrix(&Projectivity::new(arc, g)))
        .filter(|m| pi_line_image(f, m, &base) == base)
        .collect();
    let index: HashMap<[Fq; 3], usize> = lines.iter().enumerate().map(|(i, w)| (*w, i)).collect();
    let perms: Vec<Vec<u32>> = stab
        .iter()
        .map(|m| lines.iter().map(|w| index[&pi_line_image(f, m, w)] as u32).collect())
        .collect();
    let part = OrbitPartition::from_permutations(lines.len(), &perms);
    SubOrbits { stabilizer_order: stab.len(), sizes: part.size_multiset() }
}

/// Generators of `W(3, q)` mapped into `Π`, and non-generators off it.
pub fn generator_pi_mismatches(arc: &ArcCtx, index: &LineIndex) -> usize {
    let f = arc.field();
    index
        .iter()
        .filter(|l| arc.is_generator(l) != in_pi(&plucker(f, l).coords()))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arc::{ArcParam, Polarity};
    use crate::pointplane::{classify_point as point_label, OrbitLabel};
    use std::collections::HashSet;

    fn arc(n: u32, h: u32) -> ArcCtx {
        ArcCtx::new(n, h).unwrap()
    }

    #[test]
    fn plucker_round_trip_q8() {
        let a = arc(3, 1);
        let f = a.field();
        let idx = LineIndex::new(f);
        for l in idx.iter() {
            let p = plucker(f, &l);
            assert!(klein_form(f, &p.coords()).is_zero());
            assert_eq!(unplucker(f, &p.coords()).unwrap(), l);
        }
        assert!(unplucker(f, &[Fq::ONE, Fq::ZERO, Fq::ZERO, Fq::ZERO, Fq::ZERO, Fq::ONE]).is_err());
    }

    #[test]
    fn tangent_images_form_conic() {
        for (n, h) in [(3, 1), (3, 2), (4, 3)] {
            let a = arc(n, h);
            let f = a.field();
            let got: HashSet<Vec6> = a.tangents().iter().map(|l| plucker(f, l).coords()).collect();
            let o = Fq::ZERO;
            let mut want: HashSet<Vec6> =
                f.elements().map(|u| [Fq::ONE, o, u, u, o, f.square(u)]).collect();
            want.insert([o, o, o, o, o, Fq::ONE]);
            assert_eq!(got, want);
            let k = KleinCtx::new(&a);
            assert!(got.iter().all(|x| k.on_x(x)));
            assert_eq!(plucker(f, &a.tangent_line(ArcParam::Infinity)).coords(), [o, o, o, o, o, Fq::ONE]);
        }
    }

    #[test]
    fn action_commutes_with_plucker() {
        for (n, h) in [(3, 1), (3, 2), (4, 1), (4, 3), (5, 2)] {
            let a = arc(n, h);
            let f = a.field();
            let idx = LineIndex::new(f);
            let all = all_elements(f);
            for k in 0..200 {
                let g = Projectivity::new(&a, all[(k * 7919) % all.len()]);
                let l = idx.line((k * 104_729) % idx.len());
                let lhs = plucker(f, &g.line(f, &l));
                let rhs = PluckerPoint::new(f, g.plucker_vector(f, &plucker(f, &l).coords())).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn generators_are_pi() {
        let a = arc(3, 1);
        let idx = LineIndex::new(a.field());
        assert_eq!(generator_pi_mismatches(&a, &idx), 0);
        let k = KleinCtx::new(&a);
        assert_eq!(k.q4_points().len(), 585);
    }

    #[test]
    fn y_structure() {
        for (n, h) in [(3, 1), (3, 2), (4, 1), (4, 3)] {
            let a = arc(n, h);
            let f = a.field();
            let q = a.q();
            let k = KleinCtx::new(&a);
            let on_y: HashSet<Vec6> = k.q4_points().iter().filter(|x| k.on_y(x)).copied().collect();
            assert_eq!(on_y.len(), (q + 1) * (q + 1));
            let lines = k.y_lines();
            let union: HashSet<Vec6> = lines.iter().flat_map(|m| m.points(f)).collect();
            assert_eq!(union, on_y);
            for (i, m) in lines.iter().enumerate() {
                assert_eq!(k.classify_line(m).unwrap(), KleinLineClass::Lq1);
                assert!(lines[i + 1..].iter().all(|r| !m.meets(f, r)));
            }
        }
    }

    #[test]
    fn f1_scaling() {
        let a = arc(4, 1);
        let f = a.field();
        for (i, x) in [(1u8, 0usize), (2, 1), (3, 2)] {
            let r = z_representative(f, i);
            assert_eq!(f_h(&a, &r), f.exp(2 * x));
            let l = f.omega();
            let lr = geom::scale(f, l, &r);
            assert_eq!(f_h(&a, &lr), f.mul(f.pow(l, 3), f_h(&a, &r)));
        }
    }

    #[test]
    fn point_label_examples() {
        let b = arc(4, 1);
        let f = b.field();
        let k = KleinCtx::new(&b);
        let mut p = [Fq::ZERO; 6];
        p[4] = Fq::ONE;
        p[5] = Fq::ONE;
        assert_eq!(k.classify_point(&p).unwrap(), KleinPointLabel::YMinusConics);
        assert_eq!(k.classify_point(&z_representative(f, 1)).unwrap(), KleinPointLabel::Z(1));
        assert!(k.classify_point(&[Fq::ONE, Fq::ZERO, Fq::ZERO, Fq::ZERO, Fq::ZERO, Fq::ONE]).is_err());
    }

    #[test]
    fn point_labels_match_orbits() {
        for (n, h) in [(3, 1), (3, 2), (4, 1), (4, 3)] {
            let a = arc(n, h);
            let f = a.field();
            let q = a.q();
            let xi = f.xi();
            let k = KleinCtx::new(&a);
            let orbits = k.q4_orbits();
            assert_eq!(orbits.len() as i64, 5 + xi);
            let labels: Vec<KleinPointLabel> =
                k.q4_points().iter().map(|x| k.classify_point(x).unwrap()).collect();
            for l in KleinPointLabel::all(xi) {
                assert_eq!(labels.iter().filter(|&&x| x == l).count(), l.expected_size(q, xi), "{l:?}");
            }
            // same partition
            let mut map = HashMap::new();
            for (i, l) in labels.iter().enumerate() {
                assert_eq!(*map.entry(orbits.orbit_of(i)).or_insert(*l), *l);
            }
            if xi == 1 {
                for i in 1..=3u8 {
                    let r = normalize(f, z_representative(f, i)).unwrap();
                    assert_eq!(k.classify_point(&r).unwrap(), KleinPointLabel::Z(i));
                }
            }
        }
    }

    #[test]
    fn line_classes_match_point_labels() {
        for (n, h) in [(3, 1), (4, 1), (4, 3)] {
            let a = arc(n, h);
            let q = a.q();
            let k = KleinCtx::new(&a);
            let classes = k.line_classes().unwrap();
            for (i, c) in classes.iter().enumerate() {
                let p = ProjPoint::unrank(q, i);
                let want = point_label(&a, &p).unwrap();
                assert_eq!(c.index(), want.index());
                if i % 7 == 0 {
                    assert_eq!(k.vertex(&k.klein_line_of_point(&p)).unwrap(), p);
                }
            }
            for c in KleinLineClass::ALL {
                assert_eq!(classes.iter().filter(|&&x| x == c).count(), c.expected_size(q));
            }
            let _ = OrbitLabel::ALL;
        }
    }

    #[test]
    fn conic_remark() {
        let a = arc(3, 1);
        let f = a.field();
        let k = KleinCtx::new(&a);
        let q = a.q();
        for i in 0..ProjPoint::count(q) {
            let m = k.klein_line_of_point(&ProjPoint::unrank(q, i));
            let pts = m.points(f);
            let nx = pts.iter().filter(|x| k.on_x(x)).count();
            let nxp = pts.iter().filter(|x| k.on_x_prime(x)).count();
            match k.classify_line(&m).unwrap() {
                KleinLineClass::Lq1 | KleinLineClass::L2 => assert_eq!((nx, nxp), (1, 1)),
                KleinLineClass::L1 | KleinLineClass::L3 => assert_eq!((nx, nxp), (0, 0)),
                KleinLineClass::L0 => {}
            }
        }
    }

    #[test]
    fn solid_census_q8() {
        let a = arc(3, 1);
        let f = a.field();
        let k = KleinCtx::new(&a);
        let hyperbolic = Solid::all(f)
            .filter(|s| matches!(k.solid_section(s), SolidSection::Hyperbolic(_)))
            .count();
        assert_eq!(hyperbolic, 2080);
    }

    #[test]
    fn reguli_of_lines() {
        let a = arc(3, 1);
        let f = a.field();
        let k = KleinCtx::new(&a);
        let idx = LineIndex::new(f);
        for l in idx.iter().step_by(41).filter(|l| !a.is_generator(l)) {
            let SolidSection::Hyperbolic(pair) = k.solid_section(&k.solid_of_line(&l)) else {
                panic!("{l:?}")
            };
            let lines = [k.regulus_line(&pair.r1).unwrap(), k.regulus_line(&pair.r2).unwrap()];
            assert!(lines.contains(&l));
            assert!(lines.contains(&l.polar(f)));
        }
    }

    #[test]
    fn representatives_are_hyperbolic() {
        for n in [3, 4] {
            let a = arc(n, 1);
            let f = a.field();
            let q = a.q();
            let k = KleinCtx::new(&a);
            let reps = k.regulus_representatives();
            assert_eq!(reps.len(), 2 + (q - 2) + 1 + (q - 2));
            for r in &reps {
                assert!(k.marker_on_section(r), "{r:?}");
                let SolidSection::Hyperbolic(pair) = k.solid_section(&r.solid) else {
                    panic!("{r:?} not hyperbolic")
                };
                let conic = k.q4_points().iter().filter(|x| k.on_x(x) && r.solid.contains(f, x)).count();
                assert_eq!(conic, r.family.conic_points(), "{r:?}");
                k.orient(pair, &r.marker).unwrap();
            }
        }
    }

    #[test]
    fn line_stabilizer_suborbits() {
        for n in [3, 4] {
            let a = arc(n, 1);
            let q = a.q();
            let s = pi_line_suborbits(&a, 2);
            assert_eq!(s.stabilizer_order, 2 * (q - 1));
            let mut want = vec![1];
            want.extend(std::iter::repeat_n(q - 1, (q - 2) / 2));
            want.push(2 * (q - 1));
            want.sort_unstable();
            assert_eq!(s.sizes, want);
            let e = pi_line_suborbits(&a, 0);
            assert_eq!(e.stabilizer_order, 2 * (q + 1));
            let mut want = vec![1];
            want.extend(std::iter::repeat_n(q + 1, (q - 2) / 2));
            assert_eq!(e.sizes, want);
        }
    }
}
