//! Verification suites and table builders on top of the engine.

use std::cell::OnceCell;
use std::fmt::Debug;

use crate::arc::{ArcCtx, ChordType};
use crate::error::{Error, Result};
use crate::expected::{self, Params};
use crate::geom::{LineIndex, ProjLine, ProjPoint};
use crate::group::{line_orbits, plane_orbits, point_orbits, OrbitPartition};
use crate::incidence::{self, RegulusRow};
use crate::klein::{self, FamilyParam, KleinCtx, KleinLineClass, KleinPointLabel, RegulusFamily};
use crate::pointplane::{self, OrbitLabel};

use super::report::{Check, Counterexample, SuiteResult, TableReport};

/// Suites in run order.
pub const SUITES: [&str; 5] = ["points", "planes", "lines", "klein", "incidence"];

/// Lazily computed shared data for one (n, h).
pub struct Session<'a> {
    pub arc: &'a ArcCtx,
    points: OnceCell<Vec<OrbitLabel>>,
    planes: OnceCell<Vec<OrbitLabel>>,
    index: OnceCell<LineIndex>,
    lines: OnceCell<OrbitPartition>,
    klein: OnceCell<KleinCtx<'a>>,
    classes: OnceCell<Vec<KleinLineClass>>,
    reguli: OnceCell<Vec<RegulusRow>>,
}

fn cached<T>(cell: &OnceCell<T>, init: impl FnOnce() -> Result<T>) -> Result<&T> {
    if let Some(v) = cell.get() {
        return Ok(v);
    }
    let v = init()?;
    Ok(cell.get_or_init(|| v))
}

impl<'a> Session<'a> {
    pub fn new(arc: &'a ArcCtx) -> Self {
        Session {
            arc,
            points: OnceCell::new(),
            planes: OnceCell::new(),
            index: OnceCell::new(),
            lines: OnceCell::new(),
            klein: OnceCell::new(),
            classes: OnceCell::new(),
            reguli: OnceCell::new(),
        }
    }

    pub fn params(&self) -> Params {
        Params::new(self.arc.field().n())
    }

    pub fn point_labels(&self) -> Result<&Vec<OrbitLabel>> {
        cached(&self.points, || pointplane::point_labels(self.arc))
    }

    pub fn plane_labels(&self) -> Result<&Vec<OrbitLabel>> {
        cached(&self.planes, || pointplane::plane_labels(self.arc))
    }

    pub fn index(&self) -> &LineIndex {
        self.index.get_or_init(|| LineIndex::new(self.arc.field()))
    }

    pub fn line_orbits(&self) -> &OrbitPartition {
        self.lines.get_or_init(|| line_orbits(self.arc, self.index()))
    }

    pub fn klein(&self) -> &KleinCtx<'a> {
        self.klein.get_or_init(|| KleinCtx::new(self.arc))
    }

    pub fn classes(&self) -> Result<&Vec<KleinLineClass>> {
        cached(&self.classes, || self.klein().line_classes())
    }

    pub fn regulus_rows(&self) -> Result<&Vec<RegulusRow>> {
        cached(&self.reguli, || {
            incidence::regulus_rows(self.klein(), self.classes()?, self.index(), self.line_orbits())
        })
    }
}

/// Checks, tables and counterexamples collected by one suite.
pub struct SuiteOutput {
    pub result: SuiteResult,
    pub tables: Vec<TableReport>,
    pub counterexamples: Vec<Counterexample>,
}

struct Suite {
    name: &'static str,
    checks: Vec<Check>,
    tables: Vec<TableReport>,
    cex: Vec<Counterexample>,
}

const MAX_EXAMPLES: usize = 5;

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite { name, checks: Vec::new(), tables: Vec::new(), cex: Vec::new() }
    }

    fn check<T: Debug + PartialEq>(&mut self, name: &str, expected: T, computed: T) -> bool {
        let pass = expected == computed;
        self.checks.push(Check {
            name: name.into(),
            expected: format!("{expected:?}"),
            computed: format!("{computed:?}"),
            pass,
        });
        pass
    }

    /// Passes iff `bad` is empty; the first few entries become counterexamples.
    fn none<T: Debug>(&mut self, name: &str, bad: &[T]) {
        if !self.check(name, 0, bad.len()) {
            for b in bad.iter().take(MAX_EXAMPLES) {
                self.example(name, format!("{b:?}"));
            }
        }
    }

    fn example(&mut self, check: &str, detail: String) {
        self.cex.push(Counterexample { suite: self.name.into(), check: check.into(), detail });
    }

    fn table(&mut self, t: TableReport) {
        let name = format!("table {} cells", t.id);
        let bad = t.mismatches();
        self.tables.push(t);
        self.none(&name, &bad);
    }

    fn engine_error(&mut self, e: Error) {
        self.check("engine", "ok".to_string(), e.to_string());
        self.example("engine", e.to_string());
    }

    fn finish(self) -> SuiteOutput {
        let pass = self.checks.iter().all(|c| c.pass);
        SuiteOutput {
            result: SuiteResult { name: self.name.into(), pass, checks: self.checks },
            tables: self.tables,
            counterexamples: self.cex,
        }
    }
}

pub fn run_suite(name: &str, s: &Session) -> SuiteOutput {
    let mut out = match name {
        "points" => Suite::new("points"),
        "planes" => Suite::new("planes"),
        "lines" => Suite::new("lines"),
        "klein" => Suite::new("klein"),
        _ => Suite::new("incidence"),
    };
    let r = match name {
        "points" => points_suite(&mut out, s),
        "planes" => planes_suite(&mut out, s),
        "lines" => lines_suite(&mut out, s),
        "klein" => klein_suite(&mut out, s),
        _ => incidence_suite(&mut out, s),
    };
    if let Err(e) = r {
        out.engine_error(e);
    }
    out.finish()
}

fn label_sizes(labels: &[OrbitLabel]) -> Vec<usize> {
    OrbitLabel::ALL.iter().map(|l| labels.iter().filter(|&&x| x == *l).count()).collect()
}

/// Orbits whose members carry more than one label, and orbit count.
fn orbit_label_conflicts<L: PartialEq + Copy + Debug>(orbits: &OrbitPartition, labels: &[L]) -> Vec<String> {
    (0..orbits.len())
        .filter_map(|id| {
            let r = labels[orbits.representative(id)];
            orbits
                .members(id)
                .find(|&m| labels[m] != r)
                .map(|m| format!("orbit {id}: element {m} labelled {:?}, representative {r:?}", labels[m]))
        })
        .collect()
}

fn points_suite(out: &mut Suite, s: &Session) -> Result<()> {
    let arc = s.arc;
    let q = arc.q();
    out.check("no four arc points coplanar", true, arc.verify_arc_property());
    let labels = s.point_labels()?;
    out.check("point orbit sizes", expected::point_orbit_sizes(q).to_vec(), label_sizes(labels));
    let orbits = point_orbits(arc);
    out.check("point orbits (BFS)", 5, orbits.len());
    out.none("BFS orbits constant on labels", &orbit_label_conflicts(&orbits, labels));
    let cov = pointplane::chord_coverage(arc);
    out.check(
        "chord counts (tangent, real, imaginary)",
        (q + 1, q * (q + 1) / 2, q * (q - 1) / 2),
        (cov.tangents, cov.real_chords, cov.imaginary_chords),
    );
    out.none("off-arc points on exactly one chord", &cov.uncovered_or_multiple);
    out.none("chord type by orbit", &pointplane::chord_side_check(arc, labels, &cov));
    Ok(())
}

fn planes_suite(out: &mut Suite, s: &Session) -> Result<()> {
    let arc = s.arc;
    let q = arc.q();
    let planes = s.plane_labels()?;
    out.check("plane orbit sizes", expected::point_orbit_sizes(q).to_vec(), label_sizes(planes));
    let orbits = plane_orbits(arc);
    out.check("plane orbits (BFS)", 5, orbits.len());
    out.none("BFS orbits constant on labels", &orbit_label_conflicts(&orbits, planes));
    let points = s.point_labels()?;
    out.none("polarity maps labels to labels", &pointplane::polarity_disagreements(arc, points, planes));
    if arc.field().n() >= 7 {
        return Ok(());
    }
    let (t1, t2, r, k) = incidence_pair(s)?;
    out.table(t1);
    out.table(t2);
    let sizes = expected::point_orbit_sizes(q);
    let mut bad = Vec::new();
    for j in 0..5 {
        for i in 0..5 {
            let (Some(rv), Some(kv)) = (r[j][i], k[j][i]) else {
                bad.push(format!("cell ({j}, {i}) not constant"));
                continue;
            };
            if sizes[i] * rv as usize != sizes[j] * kv as usize {
                bad.push(format!("cell ({j}, {i}): {} * {rv} != {} * {kv}", sizes[i], sizes[j]));
            }
        }
    }
    out.none("|O_i| r = |O^s_j| k on every cell", &bad);
    let sq = (q + 1) * (q + 1);
    let weighted: Vec<usize> = (1..5)
        .map(|i| {
            let g = |j: usize| r[j][i].unwrap_or(0) as usize;
            g(0) + g(2) + 2 * g(3) + 3 * g(4)
        })
        .collect();
    out.check("r(osc) + r(1) + 2 r(2) + 3 r(3) per orbit O_0..O_3", vec![sq; 4], weighted);
    Ok(())
}

type LabelMatrix = pointplane::LabelMatrix;

fn incidence_pair(s: &Session) -> Result<(TableReport, TableReport, LabelMatrix, LabelMatrix)> {
    let points = s.point_labels()?;
    let planes = s.plane_labels()?;
    let counts = pointplane::incidence_counts(s.arc, points, planes);
    let (r, k) = pointplane::incidence_tables(&counts, points, planes);
    let p = s.params();
    let conv = |m: &LabelMatrix| -> Vec<Vec<Option<i64>>> {
        m.iter().map(|row| row.iter().map(|c| c.map(i64::from)).collect()).collect()
    };
    let t1 = symbolic_report(&expected::table1(), &p, conv(&r))?;
    let t2 = symbolic_report(&expected::table2(), &p, conv(&k))?;
    Ok((t1, t2, r, k))
}

fn symbolic_report(t: &expected::SymbolicTable, p: &Params, computed: Vec<Vec<Option<i64>>>) -> Result<TableReport> {
    let expected = t.eval(p)?.into_iter().map(|r| r.into_iter().map(Some).collect()).collect();
    Ok(TableReport {
        id: t.id,
        title: t.title.clone(),
        rows: t.rows.clone(),
        cols: t.cols.clone(),
        formulas: t.cells.iter().map(|r| r.iter().map(|e| e.text.to_string()).collect()).collect(),
        expected,
        computed,
        row_notes: Vec::new(),
        pass: false,
    }
    .finish())
}

fn lines_suite(out: &mut Suite, s: &Session) -> Result<()> {
    let arc = s.arc;
    let q = arc.q();
    let xi = arc.field().xi();
    let orbits = s.line_orbits();
    out.check("line orbits", 2 * q as i64 + 7 + xi, orbits.len() as i64);
    out.check("line orbit sizes", expected::line_orbit_sizes(q, xi), orbits.size_multiset());
    out.check(
        "line orbit sizes sum",
        (q * q + 1) * (q * q + q + 1),
        orbits.sizes().iter().sum::<usize>(),
    );
    let mismatches = klein::generator_pi_mismatches(arc, s.index());
    out.check("generator iff Plücker image in X3 + X4 = 0", 0, mismatches);
    let profiles = incidence::line_profiles(arc, s.index(), s.point_labels()?);
    let bad = incidence::profile_violations(orbits, &profiles);
    out.none("point-orbit profile constant on line orbits", &bad);
    Ok(())
}

fn klein_suite(out: &mut Suite, s: &Session) -> Result<()> {
    let arc = s.arc;
    let f = arc.field();
    let q = arc.q();
    let xi = f.xi();
    let k = s.klein();
    // Plücker round trip: exhaustive up to q = 16, strided sample beyond
    let idx = s.index();
    let step = if q <= 16 { 1 } else { (idx.len() / 100_000).max(1) | 1 };
    let bad: Vec<ProjLine> = (0..idx.len())
        .step_by(step)
        .map(|i| idx.line(i))
        .filter(|l| {
            let p = klein::plucker(f, l);
            !klein::klein_form(f, &p.coords()).is_zero() || klein::unplucker(f, &p.coords()).ok() != Some(*l)
        })
        .collect();
    out.none("Plücker round trip", &bad);
    out.check("|Q(4,q)|", (q + 1) * (q * q + 1), k.q4_points().len());
    let on_y = k.q4_points().iter().filter(|x| k.on_y(x)).count();
    out.check("|Y ∩ Q(4,q)|", (q + 1) * (q + 1), on_y);
    let mut y_union: Vec<u64> = k.y_lines().iter().flat_map(|m| m.points(f)).map(|x| klein::key6(&x)).collect();
    y_union.sort_unstable();
    y_union.dedup();
    out.check("Y ∩ Q(4,q) is q+1 disjoint lines", (q + 1) * (q + 1), y_union.len());
    let labels: Vec<KleinPointLabel> = k.q4_points().iter().map(|x| k.classify_point(x)).collect::<Result<_>>()?;
    let all = KleinPointLabel::all(xi);
    let sizes: Vec<usize> = all.iter().map(|l| labels.iter().filter(|&&x| x == *l).count()).collect();
    out.check("Q(4,q) point orbit sizes", expected::klein_point_orbit_sizes(q, xi), sizes);
    let orbits = k.q4_orbits();
    out.check("Q(4,q) point orbits (BFS)", (5 + xi) as usize, orbits.len());
    out.none("BFS orbits constant on labels", &orbit_label_conflicts(&orbits, &labels));
    let classes = s.classes()?;
    let class_sizes: Vec<usize> =
        KleinLineClass::ALL.iter().map(|c| classes.iter().filter(|&&x| x == *c).count()).collect();
    let want: Vec<usize> = KleinLineClass::ALL.iter().map(|c| c.expected_size(q)).collect();
    out.check("line class sizes", want, class_sizes);
    let points = s.point_labels()?;
    let bad: Vec<String> = classes
        .iter()
        .zip(points)
        .enumerate()
        .filter(|(_, (c, p))| c.index() != p.index())
        .map(|(i, (c, p))| format!("{:?}: {} vs {}", ProjPoint::unrank(q, i).coords(), c.name(), p.point_name()))
        .collect();
    out.none("class of pencil = orbit of its vertex", &bad);
    let sec = klein::pi_line_suborbits(arc, 2);
    let mut want = vec![1];
    want.extend(std::iter::repeat_n(q - 1, (q - 2) / 2));
    want.push(2 * (q - 1));
    want.sort_unstable();
    out.check("secant line stabilizer order", 2 * (q - 1), sec.stabilizer_order);
    out.check("secant line stabilizer orbits on secants", want, sec.sizes);
    let ext = klein::pi_line_suborbits(arc, 0);
    let mut want = vec![1];
    want.extend(std::iter::repeat_n(q + 1, (q - 2) / 2));
    out.check("external line stabilizer order", 2 * (q + 1), ext.stabilizer_order);
    out.check("external line stabilizer orbits on externals", want, ext.sizes);
    let rows = s.regulus_rows()?;
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| r.orbit_size != [r.family.expected_orbit_size(q); 2])
        .map(|r| format!("{:?} {:?}: orbit sizes {:?}", r.family, r.param, r.orbit_size))
        .collect();
    out.none("representative solids: hyperbolic, orbit sizes", &bad);
    let mut reached: Vec<usize> = rows.iter().flat_map(|r| r.line_orbit).collect();
    reached.sort_unstable();
    reached.dedup();
    out.check("regulus orbits reached by representatives", 2 * (q + 1), reached.len());
    Ok(())
}

fn incidence_suite(out: &mut Suite, s: &Session) -> Result<()> {
    incidence::require_twisted_cubic(s.arc, 3)?;
    let q = s.arc.q();
    let p = s.params();
    let t = if p.xi == -1 { 3 } else { 4 };
    out.table(build_table(s, t)?);
    let dist = incidence::lines_through_points(s.klein(), s.classes()?)?;
    out.check("Σ |orbit| · lines through a point = |L_i| (q+1)", true, dist.double_counting_holds(q));
    if p.xi == 1 {
        let counts = incidence::cube_surface_counts(s.klein())?;
        let l0 = (p.q - 2 * p.s + 1) as usize;
        let l3 = (p.q - 2 * p.s - 2) as usize;
        for c in &counts {
            let (name, pairs) = match c.kind {
                KleinLineClass::L0 => ("x μ^3 + λ^3 = x^2 solutions", l0),
                _ => ("μ^3 + λ^3 = 1 solutions", l3),
            };
            out.check(&format!("{name} (x = {})", c.x), pairs, c.pairs);
            out.check(&format!("|Z_1| on {} line: direct vs equation", c.kind.name()), c.direct[0], c.z1_from_pairs);
            out.check(&format!("{} representative class", c.kind.name()), c.kind, c.observed_class);
        }
    }
    for id in [5, 6, 7, 8] {
        out.table(build_table(s, id)?);
    }
    let rows = s.regulus_rows()?;
    let traces = incidence::trace_rows(s.arc, rows);
    let bad: Vec<String> = traces
        .iter()
        .filter(|t| !t.agrees())
        .map(|t| format!("{:?} {:?}: predicted {:?}, observed {:?}", t.family, t.param, t.predicted, t.observed))
        .collect();
    out.none("trace predictions match regulus profiles", &bad);
    Ok(())
}

fn family_cols(id: u8) -> RegulusFamily {
    match id {
        5 => RegulusFamily::SecantFixed,
        6 => RegulusFamily::SecantFull,
        _ => RegulusFamily::ExternalFixed,
    }
}

fn param_name(p: &FamilyParam) -> String {
    match p {
        FamilyParam::None => String::new(),
        FamilyParam::Z(z) => format!("z={z}"),
        FamilyParam::T(a0, a1) => format!("t=({a0},{a1})"),
    }
}

/// Compute table `id` (1..=8) by brute force next to its expected values.
pub fn build_table(s: &Session, id: u8) -> Result<TableReport> {
    let p = s.params();
    if id >= 3 {
        incidence::require_twisted_cubic(s.arc, id)?;
    }
    match id {
        1 | 2 => {
            let (t1, t2, ..) = incidence_pair(s)?;
            Ok(if id == 1 { t1 } else { t2 })
        }
        3 | 4 => {
            let sym = expected::symbolic_table(id, &p)?;
            let dist = incidence::lines_through_points(s.klein(), s.classes()?)?;
            let computed = dist.matrix().into_iter().map(|r| r.into_iter().map(Some).collect()).collect();
            symbolic_report(&sym, &p, computed)
        }
        5..=7 => {
            let sym = expected::symbolic_table(id, &p)?;
            let fam = family_cols(id);
            let row = s
                .regulus_rows()?
                .iter()
                .find(|r| r.family == fam)
                .ok_or_else(|| Error::InvariantViolation(format!("no representative for {fam:?}")))?;
            let computed = (0..5).map(|c| (0..2).map(|i| Some(row.profile[i][c] as i64)).collect()).collect();
            symbolic_report(&sym, &p, computed)
        }
        8 => table8(s),
        _ => Err(Error::TableUnavailable { table: id, reason: "tables are numbered 1..=8".into() }),
    }
}

fn table8(s: &Session) -> Result<TableReport> {
    let traces = incidence::trace_rows(s.arc, s.regulus_rows()?);
    let mut t = TableReport {
        id: 8,
        title: "|S| = (q^3-q)/2: |Σ ∩ X| = 2 (z, u_i) and |Σ ∩ X| = 0 (t, v_i, trace branch)".into(),
        rows: Vec::new(),
        cols: expected::CLASS_ROWS.iter().map(|s| s.to_string()).collect(),
        formulas: Vec::new(),
        expected: Vec::new(),
        computed: Vec::new(),
        row_notes: Vec::new(),
        pass: false,
    };
    for tr in &traces {
        for i in 0..2 {
            t.rows.push(format!("{} R_{}", param_name(&tr.param), i + 1));
            let (exprs, note) = match tr.param {
                FamilyParam::Z(_) => (expected::secant_generic_profile(), format!("u={}", tr.counts[i])),
                _ => {
                    let b = tr.branch[i].unwrap_or(1);
                    (expected::external_generic_profile(b), format!("v={} branch={b}", tr.counts[i]))
                }
            };
            t.row_notes.push(format!("{note} orbit={}", tr.line_orbit[i]));
            t.formulas.push(exprs.iter().map(|e| e.text.to_string()).collect());
            t.expected.push((0..5).map(|c| tr.predicted[i].map(|p| p[c] as i64)).collect());
            t.computed.push(tr.observed[i].iter().map(|&x| Some(x as i64)).collect());
        }
    }
    Ok(t.finish())
}

/// Inventory rows `(id, size, representative, label)` for one object kind.
pub fn inventory(s: &Session, kind: &str) -> Result<Vec<(usize, usize, String, String)>> {
    let arc = s.arc;
    let f = arc.field();
    let q = arc.q();
    let fmt4 = |v: [crate::gf::Fq; 4]| format!("({},{},{},{})", v[0].0, v[1].0, v[2].0, v[3].0);
    let rows = match kind {
        "point" => {
            let o = point_orbits(arc);
            let labels = s.point_labels()?;
            (0..o.len())
                .map(|id| {
                    let r = o.representative(id);
                    (id, o.size(id), fmt4(ProjPoint::unrank(q, r).coords()), labels[r].point_name().to_string())
                })
                .collect()
        }
        "plane" => {
            let o = plane_orbits(arc);
            let labels = s.plane_labels()?;
            (0..o.len())
                .map(|id| {
                    let r = o.representative(id);
                    let pl = crate::geom::ProjPlane::unrank(q, r);
                    let d = pl.dual();
                    let rep = format!("[{},{},{},{}]", d[0].0, d[1].0, d[2].0, d[3].0);
                    (id, o.size(id), rep, labels[r].plane_name().to_string())
                })
                .collect()
        }
        _ => {
            let o = s.line_orbits();
            let labels = s.point_labels()?;
            (0..o.len())
                .map(|id| {
                    let l = s.index().line(o.representative(id));
                    let [u, v] = l.basis();
                    let kind = match arc.classify_chord(&l) {
                        ChordType::Tangent => "tangent",
                        ChordType::RealChord => "real chord",
                        ChordType::ImaginaryChord => "imaginary chord",
                        ChordType::NotAChord if arc.is_generator(&l) => "generator",
                        ChordType::NotAChord => "non-generator",
                    };
                    let mut prof = [0usize; 5];
                    for p in l.points(f) {
                        prof[labels[p.rank(q)].index()] += 1;
                    }
                    let profile: Vec<String> = OrbitLabel::ALL
                        .iter()
                        .zip(prof)
                        .filter(|(_, c)| *c > 0)
                        .map(|(l, c)| format!("{}:{c}", l.point_name()))
                        .collect();
                    (id, o.size(id), format!("<{},{}>", fmt4(u), fmt4(v)), format!("{kind} {}", profile.join(" ")))
                })
                .collect()
        }
    };
    Ok(rows)
}
