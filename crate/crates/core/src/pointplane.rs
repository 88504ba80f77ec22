//! Closed-form labels for points and planes, chord coverage, and brute-force
//! point–plane incidence counts grouped by label.

use serde::Serialize;

use crate::arc::{on_hyperbolic_quadric, ArcCtx, ChordType, Polarity};
use crate::error::{Error, Result};
use crate::geom::{ProjPlane, ProjPoint};

/// Point orbit label; for planes the same tags denote the polar orbits
/// (`Arc` = osculating planes).
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize)]
pub enum OrbitLabel {
    Arc,
    O0,
    O1,
    O2,
    O3,
}

impl OrbitLabel {
    pub const ALL: [OrbitLabel; 5] = [Self::Arc, Self::O0, Self::O1, Self::O2, Self::O3];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_count(k: usize) -> Option<Self> {
        [Self::O0, Self::O1, Self::O2, Self::O3].get(k).copied()
    }

    pub fn point_name(self) -> &'static str {
        ["A", "O_0", "O_1", "O_2", "O_3"][self.index()]
    }

    pub fn plane_name(self) -> &'static str {
        ["O^s_{q+1}", "O^s_0", "O^s_1", "O^s_2", "O^s_3"][self.index()]
    }

    /// `q+1, (q^3-q)/3, (q^3-q)/2, q^2+q, (q^3-q)/6`.
    pub fn expected_size(self, q: usize) -> usize {
        let c = q * q * q - q;
        match self {
            Self::Arc => q + 1,
            Self::O0 => c / 3,
            Self::O1 => c / 2,
            Self::O2 => q * q + q,
            Self::O3 => c / 6,
        }
    }
}

/// Number of osculating planes through `p`, with the quadric cross-check.
pub fn classify_point(arc: &ArcCtx, p: &ProjPoint) -> Result<OrbitLabel> {
    let f = arc.field();
    if arc.contains(p) {
        return Ok(OrbitLabel::Arc);
    }
    let k = arc.osculating_planes().iter().filter(|pl| pl.contains(f, p)).count();
    let on_quadric = on_hyperbolic_quadric(f, p);
    if (k == 2) != on_quadric {
        return Err(Error::InvariantViolation(format!(
            "point {p:?} on {k} osculating planes, quadric membership {on_quadric}"
        )));
    }
    OrbitLabel::from_count(k)
        .ok_or_else(|| Error::InvariantViolation(format!("point {p:?} on {k} osculating planes")))
}

/// Number of arc points on `pl`, or `Arc` for osculating planes.
pub fn classify_plane(arc: &ArcCtx, pl: &ProjPlane) -> Result<OrbitLabel> {
    let f = arc.field();
    if arc.osculating_planes().contains(pl) {
        return Ok(OrbitLabel::Arc);
    }
    let k = arc.points().iter().filter(|p| pl.contains(f, p)).count();
    OrbitLabel::from_count(k)
        .ok_or_else(|| Error::InvariantViolation(format!("plane {pl:?} meets the arc in {k} points")))
}

/// Labels of all points, indexed by rank.
pub fn point_labels(arc: &ArcCtx) -> Result<Vec<OrbitLabel>> {
    use rayon::prelude::*;
    let q = arc.q();
    (0..ProjPoint::count(q))
        .into_par_iter()
        .map(|i| classify_point(arc, &ProjPoint::unrank(q, i)))
        .collect()
}

/// Labels of all planes, indexed by rank.
pub fn plane_labels(arc: &ArcCtx) -> Result<Vec<OrbitLabel>> {
    use rayon::prelude::*;
    let q = arc.q();
    (0..ProjPlane::count(q))
        .into_par_iter()
        .map(|i| classify_plane(arc, &ProjPlane::unrank(q, i)))
        .collect()
}

/// Planes whose label differs from that of their pole.
pub fn polarity_disagreements(arc: &ArcCtx, points: &[OrbitLabel], planes: &[OrbitLabel]) -> Vec<ProjPlane> {
    let f = arc.field();
    let q = arc.q();
    (0..planes.len())
        .map(|i| ProjPlane::unrank(q, i))
        .filter(|pl| planes[pl.rank(q)] != points[pl.polar(f).rank(q)])
        .collect()
}

/// How the chords cover the points of PG(3, q).
#[derive(Clone, Debug, Default)]
pub struct ChordCoverage {
    pub tangents: usize,
    pub real_chords: usize,
    pub imaginary_chords: usize,
    /// Off-arc points not on exactly one chord.
    pub uncovered_or_multiple: Vec<ProjPoint>,
    /// Chord type through each point (arc points: `Tangent`), by rank.
    pub chord_of: Vec<Option<ChordType>>,
}

pub fn chord_coverage(arc: &ArcCtx) -> ChordCoverage {
    let f = arc.field();
    let q = arc.q();
    let n = ProjPoint::count(q);
    let mut hits = vec![0u32; n];
    let mut chord_of = vec![None; n];
    let mut cov = ChordCoverage::default();
    for (l, &c) in arc.chords() {
        match c {
            ChordType::Tangent => cov.tangents += 1,
            ChordType::RealChord => cov.real_chords += 1,
            ChordType::ImaginaryChord => cov.imaginary_chords += 1,
            ChordType::NotAChord => {}
        }
        for p in l.points(f) {
            if arc.contains(&p) {
                continue;
            }
            let r = p.rank(q);
            hits[r] += 1;
            chord_of[r] = Some(c);
        }
    }
    for p in arc.points() {
        chord_of[p.rank(q)] = Some(ChordType::Tangent);
    }
    cov.uncovered_or_multiple = (0..n)
        .filter(|&i| hits[i] != 1 && !arc.contains(&ProjPoint::unrank(q, i)))
        .map(|i| ProjPoint::unrank(q, i))
        .collect();
    cov.chord_of = chord_of;
    cov
}

/// Which chord type the off-arc points of each label lie on, given `q ≡ xi (mod 3)`.
pub fn expected_chord_type(label: OrbitLabel, xi: i64) -> ChordType {
    match (label, xi) {
        (OrbitLabel::O2, _) => ChordType::Tangent,
        (OrbitLabel::O0 | OrbitLabel::O3, 1) => ChordType::RealChord,
        (OrbitLabel::O1, 1) => ChordType::ImaginaryChord,
        (OrbitLabel::O0 | OrbitLabel::O3, _) => ChordType::ImaginaryChord,
        (OrbitLabel::O1, _) => ChordType::RealChord,
        (OrbitLabel::Arc, _) => ChordType::Tangent,
    }
}

/// Off-arc points whose chord type disagrees with their label.
pub fn chord_side_check(arc: &ArcCtx, labels: &[OrbitLabel], cov: &ChordCoverage) -> Vec<(ProjPoint, OrbitLabel, Option<ChordType>)> {
    let q = arc.q();
    let xi = arc.field().xi();
    labels
        .iter()
        .enumerate()
        .filter(|(_, &l)| l != OrbitLabel::Arc)
        .filter(|(i, &l)| cov.chord_of[*i] != Some(expected_chord_type(l, xi)))
        .map(|(i, &l)| (ProjPoint::unrank(q, i), l, cov.chord_of[i]))
        .collect()
}

/// Raw incidence data: for each point, the number of planes of each label
/// through it; for each plane, the number of points of each label on it.
#[derive(Clone, Debug)]
pub struct IncidenceCounts {
    pub per_point: Vec<[u32; 5]>,
    pub per_plane: Vec<[u32; 5]>,
}

pub fn incidence_counts(arc: &ArcCtx, points: &[OrbitLabel], planes: &[OrbitLabel]) -> IncidenceCounts {
    use rayon::prelude::*;
    let f = arc.field();
    let q = arc.q();
    let plane_points: Vec<Vec<u32>> = (0..planes.len())
        .into_par_iter()
        .map(|i| {
            ProjPlane::unrank(q, i)
                .points(f)
                .iter()
                .map(|p| p.rank(q) as u32)
                .collect()
        })
        .collect();
    let mut per_point = vec![[0u32; 5]; points.len()];
    let mut per_plane = vec![[0u32; 5]; planes.len()];
    for (j, pts) in plane_points.iter().enumerate() {
        let lj = planes[j].index();
        for &p in pts {
            per_point[p as usize][lj] += 1;
            per_plane[j][points[p as usize].index()] += 1;
        }
    }
    IncidenceCounts { per_point, per_plane }
}

/// Per-label count matrix; `None` where members of a label disagree.
/// `m[j][i]` is indexed by (plane label j, point label i).
pub type LabelMatrix = [[Option<u32>; 5]; 5];

fn constant_per_label(rows: &[[u32; 5]], labels: &[OrbitLabel]) -> [[Option<u32>; 5]; 5] {
    let mut out = [[None; 5]; 5];
    let mut seen = [false; 5];
    let mut broken = [[false; 5]; 5];
    for (row, l) in rows.iter().zip(labels) {
        let li = l.index();
        for k in 0..5 {
            if !seen[li] {
                out[li][k] = Some(row[k]);
            } else if out[li][k] != Some(row[k]) {
                broken[li][k] = true;
            }
        }
        seen[li] = true;
    }
    for li in 0..5 {
        for k in 0..5 {
            if broken[li][k] {
                out[li][k] = None;
            }
        }
    }
    out
}

/// `(r, k)` with `r[j][i]` = planes of label j through a point of label i, and
/// `k[j][i]` = points of label i on a plane of label j.
pub fn incidence_tables(counts: &IncidenceCounts, points: &[OrbitLabel], planes: &[OrbitLabel]) -> (LabelMatrix, LabelMatrix) {
    // per_point is indexed [point label][plane label]; transpose to [plane][point]
    let by_point = constant_per_label(&counts.per_point, points);
    let mut r = [[None; 5]; 5];
    for i in 0..5 {
        for j in 0..5 {
            r[j][i] = by_point[i][j];
        }
    }
    let k = constant_per_label(&counts.per_plane, planes);
    (r, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::enumerate_points;
    use crate::gf::Fq;

    #[test]
    fn point_examples() {
        let a = ArcCtx::new(3, 1).unwrap();
        let f = a.field();
        assert_eq!(classify_point(&a, &ProjPoint::unit(2)).unwrap(), OrbitLabel::O2);
        assert_eq!(classify_point(&a, &ProjPoint::unit(1)).unwrap(), OrbitLabel::Arc);
        for x in f.nonzero() {
            let p = ProjPoint::new(f, [Fq::ONE, Fq::ZERO, Fq::ZERO, x]).unwrap();
            assert_eq!(classify_point(&a, &p).unwrap(), OrbitLabel::O1);
        }
        let b = ArcCtx::new(4, 1).unwrap();
        let f = b.field();
        for x in f.nonzero() {
            let p = ProjPoint::new(f, [Fq::ONE, Fq::ZERO, Fq::ZERO, x]).unwrap();
            let want = if f.is_cube(x).unwrap() { OrbitLabel::O3 } else { OrbitLabel::O0 };
            assert_eq!(classify_point(&b, &p).unwrap(), want);
        }
    }

    #[test]
    fn plane_examples() {
        let a = ArcCtx::new(3, 1).unwrap();
        let f = a.field();
        assert_eq!(classify_plane(&a, &a.osculating_planes()[0]).unwrap(), OrbitLabel::Arc);
        // span of P_0, P_1 and a quadric point off the arc
        let p0 = a.points()[0].coords();
        let p1 = a.points()[1].coords();
        let r = ProjPoint::unit(2).coords();
        let pl = crate::geom::kernel(f, &[p0, p1, r])[0];
        let pl = ProjPlane::new(f, pl).unwrap();
        assert_eq!(classify_plane(&a, &pl).unwrap(), OrbitLabel::O2);
    }

    #[test]
    fn sizes_and_polarity() {
        for (n, h) in [(3, 1), (3, 2), (4, 1), (4, 3)] {
            let a = ArcCtx::new(n, h).unwrap();
            let q = a.q();
            let pts = point_labels(&a).unwrap();
            let pls = plane_labels(&a).unwrap();
            for l in OrbitLabel::ALL {
                assert_eq!(pts.iter().filter(|&&x| x == l).count(), l.expected_size(q));
                assert_eq!(pls.iter().filter(|&&x| x == l).count(), l.expected_size(q));
            }
            assert!(polarity_disagreements(&a, &pts, &pls).is_empty());
        }
    }

    #[test]
    fn coverage_and_sides() {
        for (n, h) in [(3, 1), (4, 1), (4, 3)] {
            let a = ArcCtx::new(n, h).unwrap();
            let q = a.q();
            let cov = chord_coverage(&a);
            assert!(cov.uncovered_or_multiple.is_empty());
            assert_eq!(cov.tangents, q + 1);
            let labels = point_labels(&a).unwrap();
            assert!(chord_side_check(&a, &labels, &cov).is_empty());
            assert_eq!(enumerate_points(q).count(), labels.len());
        }
    }

    #[test]
    fn table_examples_q8() {
        let a = ArcCtx::new(3, 1).unwrap();
        let pts = point_labels(&a).unwrap();
        let pls = plane_labels(&a).unwrap();
        let counts = incidence_counts(&a, &pts, &pls);
        let (r, k) = incidence_tables(&counts, &pts, &pls);
        assert_eq!(r[1][1], Some(19));
        assert_eq!(r[3][3], Some(15));
        assert_eq!(k[4][4], Some(10));
    }
}
