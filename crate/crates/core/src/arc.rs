//! The (q+1)-arc `{(1, t, t^s, t^(s+1))} ∪ {U4}` with `s = 2^h`, its tangents,
//! osculating planes and chords, and the symplectic polarity with Gram matrix
//! J = antidiag(1, 1, 1, 1).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geom::{self, dot, kernel, ProjLine, ProjPlane, ProjPoint};
use crate::gf::{ExtCtx, FieldCtx, Fq, Fq2};

/// Parameter of an arc point: a field element or the point at infinity `U4`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub enum ArcParam {
    Finite(Fq),
    Infinity,
}

#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, serde::Serialize)]
pub enum ChordType {
    Tangent,
    RealChord,
    ImaginaryChord,
    NotAChord,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `J v`: the coordinates reversed.
#[inline]
pub fn gram(v: &[Fq; 4]) -> [Fq; 4] {
    [v[3], v[2], v[1], v[0]]
}

/// The alternating form `x1 y4 + x2 y3 + x3 y2 + x4 y1`.
pub fn beta(f: &FieldCtx, x: &[Fq; 4], y: &[Fq; 4]) -> Fq {
    dot(f, x, &gram(y))
}

/// The hyperbolic quadric `X1 X4 + X2 X3 = 0`.
pub fn on_hyperbolic_quadric(f: &FieldCtx, p: &ProjPoint) -> bool {
    let x = p.coords();
    (f.mul(x[0], x[3]) + f.mul(x[1], x[2])).is_zero()
}

/// Image under the symplectic polarity.
pub trait Polarity {
    type Dual;
    fn polar(&self, f: &FieldCtx) -> Self::Dual;
}

impl Polarity for ProjPoint {
    type Dual = ProjPlane;
    fn polar(&self, f: &FieldCtx) -> ProjPlane {
        ProjPlane::new(f, gram(&self.coords())).unwrap()
    }
}

impl Polarity for ProjPlane {
    type Dual = ProjPoint;
    fn polar(&self, f: &FieldCtx) -> ProjPoint {
        ProjPoint::new(f, gram(&self.dual())).unwrap()
    }
}

impl Polarity for ProjLine {
    type Dual = ProjLine;
    fn polar(&self, f: &FieldCtx) -> ProjLine {
        let [u, v] = self.basis();
        let k = kernel(f, &[gram(&u), gram(&v)]);
        ProjLine::new(f, k[0], k[1]).unwrap()
    }
}

/// The arc together with its tangents, osculating planes and chord table.
#[derive(Clone, Debug)]
pub struct ArcCtx {
    field: FieldCtx,
    ext: ExtCtx,
    h: u32,
    sigma: Vec<Fq>,
    points: Vec<ProjPoint>,
    tangents: Vec<ProjLine>,
    osculating: Vec<ProjPlane>,
    chords: HashMap<ProjLine, ChordType>,
}

impl ArcCtx {
    pub fn new(n: u32, h: u32) -> Result<Self> {
        let field = FieldCtx::new(n)?;
        Self::with_field(field, h)
    }

    pub fn with_field(field: FieldCtx, h: u32) -> Result<Self> {
        let n = field.n();
        if h < 1 || h >= n || gcd(h, n) != 1 {
            return Err(Error::InvalidExponent { n, h });
        }
        let ext = ExtCtx::new(&field);
        let sigma = field.elements().map(|x| field.frob_pow(x, h)).collect();
        let mut ctx = ArcCtx {
            field,
            ext,
            h,
            sigma,
            points: Vec::new(),
            tangents: Vec::new(),
            osculating: Vec::new(),
            chords: HashMap::new(),
        };
        let params: Vec<ArcParam> = ctx.params().collect();
        ctx.points = params.iter().map(|&t| ctx.arc_point(t)).collect();
        ctx.tangents = params.iter().map(|&t| ctx.tangent_line(t)).collect();
        ctx.osculating = params.iter().map(|&t| ctx.osculating_plane(t)).collect();
        ctx.chords = ctx.build_chord_table()?;
        Ok(ctx)
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    pub fn ext(&self) -> &ExtCtx {
        &self.ext
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn q(&self) -> usize {
        self.field.q()
    }

    /// `x^(2^h)`.
    #[inline]
    pub fn sigma(&self, x: Fq) -> Fq {
        self.sigma[x.0 as usize]
    }

    /// Finite parameters in element order, then infinity.
    pub fn params(&self) -> impl Iterator<Item = ArcParam> + '_ {
        self.field
            .elements()
            .map(ArcParam::Finite)
            .chain(std::iter::once(ArcParam::Infinity))
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn tangents(&self) -> &[ProjLine] {
        &self.tangents
    }

    pub fn osculating_planes(&self) -> &[ProjPlane] {
        &self.osculating
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.points.contains(p)
    }

    pub fn arc_point(&self, t: ArcParam) -> ProjPoint {
        let f = &self.field;
        match t {
            ArcParam::Finite(t) => {
                let ts = self.sigma(t);
                ProjPoint::new(f, [Fq::ONE, t, ts, f.mul(ts, t)]).unwrap()
            }
            ArcParam::Infinity => ProjPoint::unit(4),
        }
    }

    pub fn tangent_line(&self, t: ArcParam) -> ProjLine {
        let f = &self.field;
        let p = self.arc_point(t);
        let dir = match t {
            ArcParam::Finite(t) => [Fq::ZERO, Fq::ONE, Fq::ZERO, self.sigma(t)],
            ArcParam::Infinity => ProjPoint::unit(3).coords(),
        };
        ProjLine::new(f, p.coords(), dir).unwrap()
    }

    pub fn osculating_plane(&self, t: ArcParam) -> ProjPlane {
        let f = &self.field;
        match t {
            ArcParam::Finite(t) => {
                let ts = self.sigma(t);
                ProjPlane::new(f, [f.mul(ts, t), ts, t, Fq::ONE]).unwrap()
            }
            ArcParam::Infinity => ProjPlane::new(f, [Fq::ONE, Fq::ZERO, Fq::ZERO, Fq::ZERO]).unwrap(),
        }
    }

    pub fn is_generator(&self, l: &ProjLine) -> bool {
        let [u, v] = l.basis();
        beta(&self.field, &u, &v).is_zero()
    }

    pub fn classify_chord(&self, l: &ProjLine) -> ChordType {
        self.chords.get(l).copied().unwrap_or(ChordType::NotAChord)
    }

    pub fn chords(&self) -> impl Iterator<Item = (&ProjLine, &ChordType)> {
        self.chords.iter()
    }

    /// Exponent map of the extension arc: `t^(2^h)` for h odd, `t^(2^(n+h))` for h even.
    pub fn ext_sigma(&self, t: Fq2) -> Fq2 {
        let s = self.ext.frob_pow(t, self.h);
        if self.h % 2 == 1 {
            s
        } else {
            self.ext.frobenius(s)
        }
    }

    /// Point of the extension arc over GF(q^2).
    pub fn ext_arc_point(&self, t: Fq2) -> [Fq2; 4] {
        let ts = self.ext_sigma(t);
        [Fq2::ONE, t, ts, self.ext.mul(ts, t)]
    }

    /// The GF(q)-line under the chord joining `P_t` and `P_{t^q}` of the extension arc.
    pub fn imaginary_chord(&self, t: Fq2) -> Option<ProjLine> {
        if t.is_base() {
            return None;
        }
        let p = self.ext_arc_point(t);
        let re = p.map(|x| x.a0);
        let im = p.map(|x| x.a1);
        ProjLine::new(&self.field, re, im)
    }

    /// Direct check: does the extension of `l` over GF(q^2) pass through a point
    /// of the extension arc with parameter outside GF(q)?
    pub fn meets_extension_arc(&self, l: &ProjLine) -> bool {
        let eqs = l.equations(&self.field);
        let e = &self.ext;
        e.elements().filter(|t| !t.is_base()).any(|t| {
            let p = self.ext_arc_point(t);
            eqs.iter().all(|w| {
                w.iter()
                    .zip(&p)
                    .fold(Fq2::ZERO, |acc, (&c, &x)| acc + e.scale(c, x))
                    .is_zero()
            })
        })
    }

    fn build_chord_table(&self) -> Result<HashMap<ProjLine, ChordType>> {
        let q = self.q();
        let f = &self.field;
        let mut table = HashMap::new();
        let mut insert = |l: ProjLine, c: ChordType| -> Result<()> {
            match table.insert(l, c) {
                Some(prev) if prev != c => Err(Error::InvariantViolation(format!(
                    "line {l:?} is both {prev:?} and {c:?}"
                ))),
                _ => Ok(()),
            }
        };
        for l in &self.tangents {
            insert(*l, ChordType::Tangent)?;
        }
        for (i, p) in self.points.iter().enumerate() {
            for r in &self.points[i + 1..] {
                insert(ProjLine::through(f, p, r).unwrap(), ChordType::RealChord)?;
            }
        }
        for t in self.ext.elements() {
            if let Some(l) = self.imaginary_chord(t) {
                insert(l, ChordType::ImaginaryChord)?;
            }
        }
        let count = |c: ChordType| table.values().filter(|&&v| v == c).count();
        let got = (
            count(ChordType::Tangent),
            count(ChordType::RealChord),
            count(ChordType::ImaginaryChord),
        );
        if got != (q + 1, q * (q + 1) / 2, q * (q - 1) / 2) {
            return Err(Error::InvariantViolation(format!("chord counts {got:?} for q = {q}")));
        }
        Ok(table)
    }

    /// No four arc points coplanar. Exhaustive over all 4-subsets.
    pub fn verify_arc_property(&self) -> bool {
        let f = &self.field;
        let pts: Vec<[Fq; 4]> = self.points.iter().map(|p| p.coords()).collect();
        let m = pts.len();
        for a in 0..m {
            for b in a + 1..m {
                for c in b + 1..m {
                    let mut base = vec![pts[a], pts[b], pts[c]];
                    if geom::rref(f, &mut base) != 3 {
                        return false;
                    }
                    let plane = kernel(f, &base)[0];
                    if pts[c + 1..].iter().any(|d| dot(f, &plane, d).is_zero()) {
                        return false;
                    }
                }
            }
        }
        true
    }
}
