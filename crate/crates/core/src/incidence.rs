//! Point–line distribution for the twisted cubic (h = 1): lines of each class
//! `L_i` through the points of each `Q(4, q)` orbit, and per-regulus class
//! profiles together with the trace counters `u_i`, `v_i` that predict them.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::arc::ArcCtx;
use crate::error::{Error, Result};
use crate::expected::{external_generic_profile, secant_generic_profile, Expr, Params};
use crate::geom::{LineIndex, ProjPoint};
use crate::gf::{ExtCtx, FieldCtx, Fq, Fq2};
use crate::group::OrbitPartition;
use crate::klein::{
    f_h, unplucker, FamilyParam, KleinCtx, KleinLineClass, KleinPointLabel, RegulusFamily, SolidSection,
};
use crate::pointplane::OrbitLabel;

/// Counts indexed by [`KleinLineClass::index`]: `(L_{q+1}, L_0, L_1, L_2, L_3)`.
pub type Profile = [u32; 5];

pub fn require_twisted_cubic(arc: &ArcCtx, table: u8) -> Result<()> {
    if arc.h() != 1 {
        return Err(Error::TableUnavailable { table, reason: format!("needs h = 1, got h = {}", arc.h()) });
    }
    Ok(())
}

/// Number of lines of each class through a point of each `Q(4, q)` label.
#[derive(Clone, Debug, Serialize)]
pub struct PointDistribution {
    pub labels: Vec<KleinPointLabel>,
    pub sizes: Vec<usize>,
    pub rows: Vec<Profile>,
}

/// Brute force over every point of `Q(4, q)`: the lines of `Q(4, q)` through `x`
/// are the pencils of the points on the generator `x`.
pub fn lines_through_points(k: &KleinCtx, classes: &[KleinLineClass]) -> Result<PointDistribution> {
    let f = k.field();
    let q = k.arc().q();
    let per_point: Vec<(KleinPointLabel, Profile)> = k
        .q4_points()
        .par_iter()
        .map(|x| {
            let label = k.classify_point(x)?;
            let gen = unplucker(f, x)?;
            let mut prof = [0u32; 5];
            for p in gen.points(f) {
                prof[classes[p.rank(q)].index()] += 1;
            }
            Ok((label, prof))
        })
        .collect::<Result<_>>()?;
    let mut by_label: BTreeMap<KleinPointLabel, (usize, Profile)> = BTreeMap::new();
    for (i, (label, prof)) in per_point.iter().enumerate() {
        let e = by_label.entry(*label).or_insert((0, *prof));
        if e.1 != *prof {
            return Err(Error::InvariantViolation(format!(
                "{:?} ({}) has profile {prof:?}, expected {:?}",
                k.q4_points()[i],
                label.name(),
                e.1
            )));
        }
        e.0 += 1;
    }
    Ok(PointDistribution {
        labels: by_label.keys().copied().collect(),
        sizes: by_label.values().map(|v| v.0).collect(),
        rows: by_label.values().map(|v| v.1).collect(),
    })
}

impl PointDistribution {
    /// Matrix with rows = classes, columns = labels.
    pub fn matrix(&self) -> Vec<Vec<i64>> {
        (0..5).map(|c| self.rows.iter().map(|r| r[c] as i64).collect()).collect()
    }

    /// `Σ |label| · n_i(label) = |L_i| (q+1)` for each class.
    pub fn double_counting_holds(&self, q: usize) -> bool {
        KleinLineClass::ALL.iter().all(|c| {
            let lhs: usize = self.sizes.iter().zip(&self.rows).map(|(s, r)| s * r[c.index()] as usize).sum();
            lhs == c.expected_size(q) * (q + 1)
        })
    }
}

/// Points of a representative `L_0` or `L_3` line per `Z_i`, directly and from
/// the solution count of the cubic surface equation.
#[derive(Clone, Debug, Serialize)]
pub struct CubeSurfaceCount {
    pub kind: KleinLineClass,
    pub x: u8,
    pub observed_class: KleinLineClass,
    pub direct: [usize; 3],
    pub pairs: usize,
    pub z1_from_pairs: usize,
}

/// `r_x = {(1, μ, 0, 0, x, μx)} ∪ {U2 + x U6}` for non-cubes `x`, counted with
/// `x μ^3 + λ^3 = x^2`, and `r = {(1, μ, 0, 0, 1, μ)} ∪ {U2 + U6}` counted with
/// `μ^3 + λ^3 = 1`.
pub fn cube_surface_counts(k: &KleinCtx) -> Result<Vec<CubeSurfaceCount>> {
    let arc = k.arc();
    let f = arc.field();
    require_twisted_cubic(arc, 4)?;
    if f.xi() != 1 {
        return Err(Error::TableUnavailable { table: 4, reason: "needs q = 1 mod 3".into() });
    }
    let o = Fq::ZERO;
    let l = Fq::ONE;
    let count_z = |pts: &[[Fq; 6]]| -> Result<[usize; 3]> {
        let mut c = [0; 3];
        for p in pts {
            if let KleinPointLabel::Z(i) = k.classify_point(p)? {
                c[i as usize - 1] += 1;
            }
        }
        Ok(c)
    };
    let cube = |a: Fq| f.mul(f.square(a), a);
    let mut out = Vec::new();
    for x in [f.omega(), f.square(f.omega())] {
        let mut pts: Vec<[Fq; 6]> = f.elements().map(|mu| [l, mu, o, o, x, f.mul(mu, x)]).collect();
        pts.push([o, l, o, o, o, x]);
        let m = crate::klein::KleinLine::new(f, pts[0], pts[pts.len() - 1]).unwrap();
        let x2 = f.square(x);
        let pairs = f
            .elements()
            .flat_map(|mu| f.elements().map(move |lam| (mu, lam)))
            .filter(|&(mu, lam)| f.mul(x, cube(mu)) + cube(lam) == x2)
            .count();
        out.push(CubeSurfaceCount {
            kind: KleinLineClass::L0,
            x: x.0,
            observed_class: k.classify_line(&m)?,
            direct: count_z(&pts)?,
            pairs,
            z1_from_pairs: pairs / 3,
        });
    }
    let mut pts: Vec<[Fq; 6]> = f.elements().map(|mu| [l, mu, o, o, l, mu]).collect();
    pts.push([o, l, o, o, o, l]);
    let m = crate::klein::KleinLine::new(f, pts[0], pts[pts.len() - 1]).unwrap();
    let pairs = f
        .elements()
        .flat_map(|mu| f.elements().map(move |lam| (mu, lam)))
        .filter(|&(mu, lam)| cube(mu) + cube(lam) == l)
        .count();
    // drop (μ, 0) with μ^3 = 1; U2 + U6 is added back when F_1 there is a cube
    let trivial = f.elements().filter(|&mu| cube(mu) == l).count();
    let at_infinity = f.is_cube(f_h(arc, &[o, l, o, o, o, l]))? as usize;
    out.push(CubeSurfaceCount {
        kind: KleinLineClass::L3,
        x: 1,
        observed_class: k.classify_line(&m)?,
        direct: count_z(&pts)?,
        pairs,
        z1_from_pairs: (pairs - trivial) / 3 + at_infinity,
    });
    Ok(out)
}

pub fn profile_of(classes: &[KleinLineClass], q: usize, vertices: &[ProjPoint]) -> Profile {
    let mut p = [0u32; 5];
    for v in vertices {
        p[classes[v.rank(q)].index()] += 1;
    }
    p
}

/// Profile of every line of PG(3, q), from the point labels on it.
pub fn line_profiles(arc: &ArcCtx, index: &LineIndex, point_labels: &[OrbitLabel]) -> Vec<Profile> {
    let f = arc.field();
    let q = arc.q();
    (0..index.len())
        .into_par_iter()
        .map(|i| {
            let mut p = [0u32; 5];
            for pt in index.line(i).points(f) {
                p[point_labels[pt.rank(q)].index()] += 1;
            }
            p
        })
        .collect()
}

/// Orbits on which the profile is not constant.
pub fn profile_violations(orbits: &OrbitPartition, profiles: &[Profile]) -> Vec<usize> {
    (0..orbits.len())
        .filter(|&id| {
            let r = profiles[orbits.representative(id)];
            orbits.members(id).any(|m| profiles[m] != r)
        })
        .collect()
}

/// One representative solid with its oriented reguli.
#[derive(Clone, Debug, Serialize)]
pub struct RegulusRow {
    pub family: RegulusFamily,
    pub param: FamilyParam,
    pub line_orbit: [usize; 2],
    pub orbit_size: [usize; 2],
    pub profile: [Profile; 2],
    /// The same profiles counted on the Klein side (points of `𝒴` on each line).
    pub klein_profile: [Profile; 2],
}

pub fn regulus_rows(
    k: &KleinCtx,
    classes: &[KleinLineClass],
    index: &LineIndex,
    orbits: &OrbitPartition,
) -> Result<Vec<RegulusRow>> {
    let q = k.arc().q();
    k.regulus_representatives()
        .into_par_iter()
        .map(|rep| {
            if !k.marker_on_section(&rep) {
                return Err(Error::InvariantViolation(format!("marker of {rep:?} is off its section")));
            }
            let SolidSection::Hyperbolic(pair) = k.solid_section(&rep.solid) else {
                return Err(Error::InvariantViolation(format!("{rep:?} does not cut a hyperbolic quadric")));
            };
            let pair = k.orient(pair, &rep.marker)?;
            let regs = [&pair.r1, &pair.r2];
            let mut line_orbit = [0; 2];
            let mut orbit_size = [0; 2];
            let mut profile = [[0; 5]; 2];
            let mut klein_profile = [[0; 5]; 2];
            for (i, r) in regs.iter().enumerate() {
                let l = k.regulus_line(r)?;
                let id = orbits.orbit_of(index.rank(&l));
                line_orbit[i] = id;
                orbit_size[i] = orbits.size(id);
                profile[i] = profile_of(classes, q, r);
                for v in r.iter() {
                    klein_profile[i][k.classify_line(&k.klein_line_of_point(v))?.index()] += 1;
                }
            }
            Ok(RegulusRow { family: rep.family, param: rep.param, line_orbit, orbit_size, profile, klein_profile })
        })
        .collect()
}

fn f_core(f: &FieldCtx, z: Fq, x: Fq) -> Fq {
    let z2 = f.square(z);
    let zp1 = z + Fq::ONE;
    f.div(f.mul(x, zp1), z2) + f.div(zp1, f.mul(x, z2)) + Fq::ONE
}

/// `(u_1, u_2)` for a parameter `z ∈ GF(q) \ {0, 1}`.
pub fn u_counts(f: &FieldCtx, z: Fq) -> [usize; 2] {
    let z2 = f.square(z);
    let zp1 = z + Fq::ONE;
    let skip = [Fq::ZERO, zp1, f.inv(zp1)];
    let c1 = f.inv(z2);
    let c2 = f.div(z2 + Fq::ONE, z2);
    let mut u = [0; 2];
    for x in f.elements().filter(|x| !skip.contains(x)) {
        let core = f_core(f, z, x);
        for (i, c) in [c1, c2].iter().enumerate() {
            if f.trace(f.mul(*c, core)) == 0 {
                u[i] += 1;
            }
        }
    }
    u
}

/// Trace counters and branch conditions for a parameter `t` of the external family.
///
/// `g_i(x) = (ζ^(2(q+1))/t^(2(q+1))) · c_i(x) · c_i'(x) / d(x)^2` where `c_i` is the
/// leading and `c_i'` the constant coefficient of the quadratic in `y` whose
/// roots are the other two `𝒴`-points on the `L_3` line of `R_i` through `T_x`.
#[derive(Clone, Debug, Serialize)]
pub struct VCounts {
    pub t: (u8, u8),
    /// Denominator `d = x^2 + ζ^(q+1) x + 1`, skipping the roots of `c_i`.
    pub v: [usize; 2],
    /// Roots of `c_i` in GF(q): `T_x` on the line `T_x T_∞`.
    pub leading_roots: [usize; 2],
    /// Denominator `d = x^2 + ζ^(q+1) + 1` as displayed, zeros of `d` skipped.
    pub v_displayed: [usize; 2],
    pub displayed_zeros: Vec<u8>,
    /// Values of `g_i` outside GF(q) (trace undefined).
    pub off_base: usize,
    /// `Tr((ζ^2/t^(q+1)) (1 + ζ^(2q)/t^2))`, if the argument lies in GF(q).
    pub branch_stated: Option<u8>,
    /// `Tr((ζ^(2(q+1))/t^(q+1)) (1/ζ^2 + 1/t^2))`, if in GF(q).
    pub branch_second: Option<u8>,
    /// Solvability of `c_i(x) = 0` in GF(q), i.e. `Tr(c_i(0) / B^2)` with `B = t^(q+1)/ζ^(q+1)`.
    pub branch: [Option<u8>; 2],
}

fn base(x: Fq2) -> Option<Fq> {
    x.is_base().then_some(x.a0)
}

pub fn v_counts(e: &ExtCtx, t: Fq2) -> VCounts {
    let f = e.base();
    let zeta = e.zeta();
    let nz = e.norm(zeta);
    let nt = e.norm(t);
    let ntx = Fq2::embed(nt);
    let b = f.div(nt, nz);
    let z2 = e.square(zeta);
    let t2 = e.square(t);
    let a = [e.div(t2, ntx) + e.div(ntx, z2), e.div(ntx, t2) + e.div(ntx, z2)];
    let lead = Fq2::embed(f.div(f.square(nz), f.square(nt)));
    let tr = |x: Fq2| base(x).map(|v| f.trace(v));
    let mut out = VCounts {
        t: (t.a0.0, t.a1.0),
        v: [0; 2],
        leading_roots: [0; 2],
        v_displayed: [0; 2],
        displayed_zeros: Vec::new(),
        off_base: 0,
        branch_stated: None,
        branch_second: None,
        branch: [None; 2],
    };
    for x in f.elements() {
        let xx = Fq2::embed(f.square(x));
        let bx = Fq2::embed(f.mul(b, x));
        let dl = f.square(x) + f.mul(nz, x) + Fq::ONE;
        let dd = f.square(x) + nz + Fq::ONE;
        if dd.is_zero() {
            out.displayed_zeros.push(x.0);
        }
        for i in 0..2 {
            let c = xx + bx + a[i];
            let num = e.mul(e.mul(lead, c), e.mul(a[i], xx) + bx + Fq2::ONE);
            if c.is_zero() {
                out.leading_roots[i] += 1;
            }
            for (den, slot, skip) in [(dl, &mut out.v[i], c.is_zero()), (dd, &mut out.v_displayed[i], false)] {
                if skip || den.is_zero() {
                    continue;
                }
                match tr(e.div(num, Fq2::embed(f.square(den)))) {
                    Some(0) => *slot += 1,
                    Some(_) => {}
                    None => out.off_base += 1,
                }
            }
        }
    }
    let z2q = e.frobenius(z2);
    out.branch_stated = tr(e.mul(e.div(z2, ntx), Fq2::ONE + e.div(z2q, t2)));
    out.branch_second = tr(e.mul(e.div(Fq2::embed(f.square(nz)), ntx), e.inv(z2) + e.inv(t2)));
    let b2 = Fq2::embed(f.square(b));
    out.branch = [tr(e.div(a[0], b2)), tr(e.div(a[1], b2))];
    out
}

/// Predicted profile of `R_i` for the `z` family.
pub fn predict_secant_generic(q: usize, u: usize) -> Result<Profile> {
    let p = Params::new(q.trailing_zeros()).with_u(u as i64);
    eval_profile(&secant_generic_profile(), &p)
}

/// Predicted profile of `R_i` for the `t` family, with trace branch `b`.
pub fn predict_external_generic(q: usize, v: usize, b: u8) -> Result<Profile> {
    let p = Params::new(q.trailing_zeros()).with_u(v as i64);
    eval_profile(&external_generic_profile(b), &p)
}

fn eval_profile(e: &[Expr; 5], p: &Params) -> Result<Profile> {
    let mut out = [0u32; 5];
    for (o, x) in out.iter_mut().zip(e) {
        let v = x.eval(p)?;
        if v < 0 {
            return Err(Error::InvariantViolation(format!("{} is negative at {p:?}", x.text)));
        }
        *o = v as u32;
    }
    Ok(out)
}

/// Counter values and predictions for one parametrized representative.
#[derive(Clone, Debug, Serialize)]
pub struct TraceRow {
    pub family: RegulusFamily,
    pub param: FamilyParam,
    pub counts: [usize; 2],
    pub branch: [Option<u8>; 2],
    pub predicted: [Option<Profile>; 2],
    pub observed: [Profile; 2],
    pub line_orbit: [usize; 2],
}

impl TraceRow {
    pub fn agrees(&self) -> bool {
        self.predicted.iter().zip(&self.observed).all(|(p, o)| p.as_ref() == Some(o))
    }
}

/// Attach trace predictions to the rows of the two parametrized families.
pub fn trace_rows(arc: &ArcCtx, rows: &[RegulusRow]) -> Vec<TraceRow> {
    let q = arc.q();
    rows.iter()
        .filter_map(|r| {
            let (counts, branch, predicted) = match r.param {
                FamilyParam::Z(z) => {
                    let u = u_counts(arc.field(), Fq(z));
                    (u, [None; 2], u.map(|u| predict_secant_generic(q, u).ok()))
                }
                FamilyParam::T(..) => {
                    let c = v_counts(arc.ext(), r.param.t().unwrap());
                    let pred = [0, 1].map(|i| c.branch[i].and_then(|b| predict_external_generic(q, c.v[i], b).ok()));
                    (c.v, c.branch, pred)
                }
                FamilyParam::None => return None,
            };
            Some(TraceRow {
                family: r.family,
                param: r.param,
                counts,
                branch,
                predicted,
                observed: r.profile,
                line_orbit: r.line_orbit,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expected::{table3, table4, table5, table6, table7};
    use crate::group::line_orbits;
    use crate::pointplane::point_labels;

    struct Setup {
        arc: ArcCtx,
    }

    fn setup(n: u32) -> Setup {
        Setup { arc: ArcCtx::new(n, 1).unwrap() }
    }

    #[test]
    fn through_point_tables() {
        for n in [3, 4] {
            let s = setup(n);
            let q = s.arc.q();
            let k = KleinCtx::new(&s.arc);
            let classes = k.line_classes().unwrap();
            let d = lines_through_points(&k, &classes).unwrap();
            assert!(d.double_counting_holds(q));
            let p = Params::new(n);
            let want = if p.xi == -1 { table3() } else { table4() }.eval(&p).unwrap();
            assert_eq!(d.matrix(), want);
        }
    }

    #[test]
    fn cube_surfaces_q16() {
        let s = setup(4);
        let k = KleinCtx::new(&s.arc);
        let c = cube_surface_counts(&k).unwrap();
        for r in &c[..2] {
            assert_eq!(r.observed_class, KleinLineClass::L0);
            assert_eq!(r.pairs, 9);
            assert_eq!(r.direct, [3, 7, 7]);
            assert_eq!(r.z1_from_pairs, 3);
        }
        assert_eq!(c[2].observed_class, KleinLineClass::L3);
        assert_eq!(c[2].pairs, 6);
        assert_eq!(c[2].direct, [2, 6, 6]);
        assert_eq!(c[2].z1_from_pairs, 2);
        assert!(cube_surface_counts(&KleinCtx::new(&setup(3).arc)).is_err());
    }

    #[test]
    fn regulus_tables_and_traces() {
        for n in [3, 4] {
            let s = setup(n);
            let q = s.arc.q();
            let p = Params::new(n);
            let k = KleinCtx::new(&s.arc);
            let classes = k.line_classes().unwrap();
            let idx = LineIndex::new(s.arc.field());
            let orbits = line_orbits(&s.arc, &idx);
            let rows = regulus_rows(&k, &classes, &idx, &orbits).unwrap();
            for r in &rows {
                assert_eq!(r.profile, r.klein_profile);
                assert_eq!(r.orbit_size, [r.family.expected_orbit_size(q); 2], "{r:?}");
                let want = match r.family {
                    RegulusFamily::SecantFixed => table5(p.xi),
                    RegulusFamily::SecantFull => table6(p.xi),
                    RegulusFamily::ExternalFixed => table7(p.xi),
                    _ => continue,
                }
                .eval(&p)
                .unwrap();
                for i in 0..2 {
                    let col: Vec<i64> = want.iter().map(|row| row[i]).collect();
                    let got: Vec<i64> = r.profile[i].iter().map(|&x| x as i64).collect();
                    assert_eq!(got, col, "{:?} R{}", r.family, i + 1);
                }
            }
            let traces = trace_rows(&s.arc, &rows);
            assert_eq!(traces.len(), 2 * (q - 2));
            for t in &traces {
                assert!(t.agrees(), "{t:?}");
            }
            // every regulus orbit is reached
            let mut seen: Vec<usize> = rows.iter().flat_map(|r| r.line_orbit).collect();
            seen.sort_unstable();
            seen.dedup();
            assert_eq!(seen.len(), 2 * (q + 1));
        }
    }

    #[test]
    fn displayed_denominator_always_vanishes_once() {
        for n in [3, 4, 5] {
            let s = setup(n);
            let e = s.arc.ext();
            for t in crate::klein::external_parameters(e) {
                let c = v_counts(e, t);
                assert_eq!(c.displayed_zeros.len(), 1);
                assert_eq!(c.off_base, 0);
                assert_eq!(c.branch[0], c.branch_stated);
                assert_eq!(c.branch[1], c.branch_second);
            }
        }
    }

    #[test]
    fn orbit_profiles_constant() {
        let s = setup(3);
        let idx = LineIndex::new(s.arc.field());
        let orbits = line_orbits(&s.arc, &idx);
        let labels = point_labels(&s.arc).unwrap();
        let prof = line_profiles(&s.arc, &idx, &labels);
        assert!(profile_violations(&orbits, &prof).is_empty());
    }

    #[test]
    fn refuses_other_h() {
        assert!(require_twisted_cubic(&ArcCtx::new(3, 2).unwrap(), 5).is_err());
    }
}
