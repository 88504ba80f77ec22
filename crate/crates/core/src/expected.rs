//! Closed-form expected values, kept symbolic and evaluated at run time so that
//! every supported q goes through the same formula code.

use serde::Serialize;

use crate::error::{Error, Result};

/// Evaluation point: q, ξ = q mod 3 as ±1, n, `s = (-1)^(n/2) √q` (0 for odd n),
/// and a free count `u` for parametrized entries.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Params {
    pub q: i64,
    pub xi: i64,
    pub n: u32,
    pub s: i64,
    pub u: i64,
}

impl Params {
    pub fn new(n: u32) -> Self {
        let q = 1i64 << n;
        let xi = if q % 3 == 1 { 1 } else { -1 };
        let s = if n.is_multiple_of(2) {
            let r = 1i64 << (n / 2);
            if (n / 2).is_multiple_of(2) { r } else { -r }
        } else {
            0
        };
        Params { q, xi, n, s, u: 0 }
    }

    pub fn with_u(self, u: i64) -> Self {
        Params { u, ..self }
    }
}

/// A formula: display text plus a (numerator, denominator) evaluator.
#[derive(Copy, Clone)]
pub struct Expr {
    pub text: &'static str,
    f: fn(&Params) -> (i64, i64),
}

impl std::fmt::Debug for Expr {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.write_str(self.text)
    }
}

impl Expr {
    pub const fn new(text: &'static str, f: fn(&Params) -> (i64, i64)) -> Self {
        Expr { text, f }
    }

    pub fn eval(&self, p: &Params) -> Result<i64> {
        let (num, den) = (self.f)(p);
        if num % den != 0 {
            return Err(Error::InvariantViolation(format!("{} is not integral at {p:?}", self.text)));
        }
        Ok(num / den)
    }
}

macro_rules! ex {
    ($text:expr, |$p:ident| $num:expr, $den:expr) => {
        Expr::new($text, |$p: &Params| ($num, $den))
    };
    ($text:expr, |$p:ident| $num:expr) => {
        Expr::new($text, |$p: &Params| ($num, 1))
    };
}

const ZERO: Expr = ex!("0", |_p| 0);
const ONE: Expr = ex!("1", |_p| 1);
const TWO: Expr = ex!("2", |_p| 2);
const THREE: Expr = ex!("3", |_p| 3);

/// Symbolic table with row and column headers.
#[derive(Clone, Debug)]
pub struct SymbolicTable {
    pub id: u8,
    pub title: String,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub cells: Vec<Vec<Expr>>,
}

impl SymbolicTable {
    pub fn eval(&self, p: &Params) -> Result<Vec<Vec<i64>>> {
        self.cells.iter().map(|r| r.iter().map(|e| e.eval(p)).collect()).collect()
    }
}

fn strs(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

const POINT_COLS: [&str; 5] = ["A", "O_0", "O_1", "O_2", "O_3"];
const PLANE_ROWS: [&str; 5] = ["O^s_{q+1}", "O^s_0", "O^s_1", "O^s_2", "O^s_3"];
pub const CLASS_ROWS: [&str; 5] = ["L_{q+1}", "L_0", "L_1", "L_2", "L_3"];

/// Planes of each plane orbit through a point of each point orbit.
pub fn table1() -> SymbolicTable {
    let cells = vec![
        vec![ONE, ZERO, ONE, TWO, THREE],
        vec![
            ZERO,
            ex!("(q^2+ξq+1)/3", |p| p.q * p.q + p.xi * p.q + 1, 3),
            ex!("(q^2-ξq)/3", |p| p.q * p.q - p.xi * p.q, 3),
            ex!("(q^2-1)/3", |p| p.q * p.q - 1, 3),
            ex!("(q^2+ξq-2)/3", |p| p.q * p.q + p.xi * p.q - 2, 3),
        ],
        vec![
            ex!("(q^2-q)/2", |p| p.q * p.q - p.q, 2),
            ex!("(q^2-ξq)/2", |p| p.q * p.q - p.xi * p.q, 2),
            ex!("(q^2+ξq)/2", |p| p.q * p.q + p.xi * p.q, 2),
            ex!("(q^2-q)/2", |p| p.q * p.q - p.q, 2),
            ex!("(q^2-ξq)/2", |p| p.q * p.q - p.xi * p.q, 2),
        ],
        vec![
            ex!("2q", |p| 2 * p.q),
            ex!("q+1", |p| p.q + 1),
            ex!("q", |p| p.q),
            ex!("2q-1", |p| 2 * p.q - 1),
            ex!("q-2", |p| p.q - 2),
        ],
        vec![
            ex!("(q^2-q)/2", |p| p.q * p.q - p.q, 2),
            ex!("(q^2+ξq-2)/6", |p| p.q * p.q + p.xi * p.q - 2, 6),
            ex!("(q^2-ξq)/6", |p| p.q * p.q - p.xi * p.q, 6),
            ex!("(q^2-3q+2)/6", |p| p.q * p.q - 3 * p.q + 2, 6),
            ex!("(q^2+ξq+4)/6", |p| p.q * p.q + p.xi * p.q + 4, 6),
        ],
    ];
    SymbolicTable {
        id: 1,
        title: "planes of O^s_j through a point of O_i".into(),
        rows: strs(&PLANE_ROWS),
        cols: strs(&POINT_COLS),
        cells,
    }
}

/// Points of each point orbit in a plane of each plane orbit.
pub fn table2() -> SymbolicTable {
    let cells = vec![
        vec![
            ONE,
            ZERO,
            ex!("(q^2-q)/2", |p| p.q * p.q - p.q, 2),
            ex!("2q", |p| 2 * p.q),
            ex!("(q^2-q)/2", |p| p.q * p.q - p.q, 2),
        ],
        vec![
            ZERO,
            ex!("(q^2+ξq+1)/3", |p| p.q * p.q + p.xi * p.q + 1, 3),
            ex!("(q^2-ξq)/2", |p| p.q * p.q - p.xi * p.q, 2),
            ex!("q+1", |p| p.q + 1),
            ex!("(q^2+ξq-2)/6", |p| p.q * p.q + p.xi * p.q - 2, 6),
        ],
        vec![
            ONE,
            ex!("(q^2-ξq)/3", |p| p.q * p.q - p.xi * p.q, 3),
            ex!("(q^2+ξq)/2", |p| p.q * p.q + p.xi * p.q, 2),
            ex!("q", |p| p.q),
            ex!("(q^2-ξq)/6", |p| p.q * p.q - p.xi * p.q, 6),
        ],
        vec![
            TWO,
            ex!("(q^2-1)/3", |p| p.q * p.q - 1, 3),
            ex!("(q^2-q)/2", |p| p.q * p.q - p.q, 2),
            ex!("2q-1", |p| 2 * p.q - 1),
            ex!("(q^2-3q+2)/6", |p| p.q * p.q - 3 * p.q + 2, 6),
        ],
        vec![
            THREE,
            ex!("(q^2+ξq-2)/3", |p| p.q * p.q + p.xi * p.q - 2, 3),
            ex!("(q^2-ξq)/2", |p| p.q * p.q - p.xi * p.q, 2),
            ex!("q-2", |p| p.q - 2),
            ex!("(q^2+ξq+4)/6", |p| p.q * p.q + p.xi * p.q + 4, 6),
        ],
    ];
    SymbolicTable {
        id: 2,
        title: "points of O_i in a plane of O^s_j".into(),
        rows: strs(&PLANE_ROWS),
        cols: strs(&POINT_COLS),
        cells,
    }
}

/// Lines of each class through a point of each `Q(4, q)` orbit, q ≡ -1 (mod 3).
pub fn table3() -> SymbolicTable {
    let half = ex!("q/2", |p| p.q, 2);
    let cells = vec![
        vec![ONE, ONE, ONE, ZERO],
        vec![ZERO, ZERO, ZERO, ex!("(q+1)/3", |p| p.q + 1, 3)],
        vec![ZERO, ZERO, half, half],
        vec![ex!("q", |p| p.q), ex!("q", |p| p.q), ZERO, ONE],
        vec![ZERO, ZERO, half, ex!("(q-2)/6", |p| p.q - 2, 6)],
    ];
    SymbolicTable {
        id: 3,
        title: "lines of L_i through a point of Q(4,q), q = -1 mod 3".into(),
        rows: strs(&CLASS_ROWS),
        cols: strs(&["X", "X'", "Y\\(X∪X')", "Z_1"]),
        cells,
    }
}

/// As [`table3`] for q ≡ 1 (mod 3); `s = (-1)^(n/2) √q`.
pub fn table4() -> SymbolicTable {
    let half = ex!("q/2", |p| p.q, 2);
    let l0 = ex!("(q+s+1)/3", |p| p.q + p.s + 1, 3);
    let l1 = ex!("(q-s)/2", |p| p.q - p.s, 2);
    let l3 = ex!("(q+s-2)/6", |p| p.q + p.s - 2, 6);
    let q = ex!("q", |p| p.q);
    let cells = vec![
        vec![ONE, ONE, ONE, ZERO, ZERO, ZERO],
        vec![ZERO, ZERO, ZERO, ex!("(q-2s+1)/3", |p| p.q - 2 * p.s + 1, 3), l0, l0],
        vec![ZERO, ZERO, half, ex!("(q+2s)/2", |p| p.q + 2 * p.s, 2), l1, l1],
        vec![q, q, ZERO, ONE, ONE, ONE],
        vec![ZERO, ZERO, half, ex!("(q-2s-2)/6", |p| p.q - 2 * p.s - 2, 6), l3, l3],
    ];
    SymbolicTable {
        id: 4,
        title: "lines of L_i through a point of Q(4,q), q = 1 mod 3, s = (-1)^(n/2) sqrt(q)".into(),
        rows: strs(&CLASS_ROWS),
        cols: strs(&["X", "X'", "Y\\(X∪X')", "Z_1", "Z_2", "Z_3"]),
        cells,
    }
}

fn regulus_table(id: u8, title: String, r1: [Expr; 5], r2: [Expr; 5]) -> SymbolicTable {
    SymbolicTable {
        id,
        title,
        rows: strs(&CLASS_ROWS),
        cols: strs(&["R_1", "R_2"]),
        cells: (0..5).map(|i| vec![r1[i], r2[i]]).collect(),
    }
}

/// Profiles of the two reguli of the orbit pair of size q(q+1)/2.
pub fn table5(xi: i64) -> SymbolicTable {
    let qm1 = ex!("q-1", |p| p.q - 1);
    let r1 = if xi == 1 {
        [TWO, ex!("2(q-1)/3", |p| 2 * (p.q - 1), 3), ZERO, ZERO, ex!("(q-1)/3", |p| p.q - 1, 3)]
    } else {
        [TWO, ZERO, qm1, ZERO, ZERO]
    };
    regulus_table(5, format!("|S| = q(q+1)/2, q = {xi} mod 3"), r1, [ZERO, ZERO, ZERO, TWO, qm1])
}

/// Profiles for the orbit pair of size q^3 - q.
pub fn table6(xi: i64) -> SymbolicTable {
    let half = ex!("q/2", |p| p.q, 2);
    let r1 = if xi == 1 {
        [ONE, ex!("(q-1)/3", |p| p.q - 1, 3), half, ONE, ex!("(q-4)/6", |p| p.q - 4, 6)]
    } else {
        [ONE, ex!("(q+1)/3", |p| p.q + 1, 3), ex!("(q-2)/2", |p| p.q - 2, 2), ONE, ex!("(q-2)/6", |p| p.q - 2, 6)]
    };
    let r2 = [ZERO, ZERO, half, TWO, ex!("(q-2)/2", |p| p.q - 2, 2)];
    regulus_table(6, format!("|S| = q^3-q, q = {xi} mod 3"), r1, r2)
}

/// Profiles for the orbit pair of size q(q-1)/2.
pub fn table7(xi: i64) -> SymbolicTable {
    let qp1 = ex!("q+1", |p| p.q + 1);
    let r1 = if xi == 1 {
        [ZERO, ZERO, qp1, ZERO, ZERO]
    } else {
        [ZERO, ex!("2(q+1)/3", |p| 2 * (p.q + 1), 3), ZERO, ZERO, ex!("(q+1)/3", |p| p.q + 1, 3)]
    };
    regulus_table(7, format!("|S| = q(q-1)/2, q = {xi} mod 3"), r1, [ZERO, ZERO, qp1, ZERO, ZERO])
}

/// Profile of a regulus in the (q^3-q)/2 orbits meeting `𝒳` twice, in terms of `u`.
pub fn secant_generic_profile() -> [Expr; 5] {
    [
        ZERO,
        ex!("(2u+6)/3", |p| 2 * p.u + 6, 3),
        ex!("q-u-3", |p| p.q - p.u - 3),
        TWO,
        ex!("u/3", |p| p.u, 3),
    ]
}

/// Profile of a regulus in the (q^3-q)/2 orbits missing `𝒳`, in terms of `u = v`,
/// for trace branch 0 or 1.
pub fn external_generic_profile(branch: u8) -> [Expr; 5] {
    if branch == 0 {
        [
            ZERO,
            ex!("(2v+6)/3", |p| 2 * p.u + 6, 3),
            ex!("q-v-2", |p| p.q - p.u - 2),
            ZERO,
            ex!("(v+3)/3", |p| p.u + 3, 3),
        ]
    } else {
        [ZERO, ex!("2v/3", |p| 2 * p.u, 3), ex!("q-v+1", |p| p.q - p.u + 1), ZERO, ex!("v/3", |p| p.u, 3)]
    }
}

/// Sizes of the five point (or plane) orbits, arc first.
pub fn point_orbit_sizes(q: usize) -> [usize; 5] {
    let c = q * q * q - q;
    [q + 1, c / 3, c / 2, q * q + q, c / 6]
}

/// Sorted size multiset of the 2q+7+ξ line orbits.
pub fn line_orbit_sizes(q: usize, xi: i64) -> Vec<usize> {
    let c = q * q * q - q;
    let k = (2 + xi) as usize;
    let mut v = vec![q + 1, q + 1, q * (q - 1) / 2, q * (q - 1) / 2, q * (q + 1) / 2, q * (q + 1) / 2, q * q - 1];
    v.extend(std::iter::repeat_n(c / k, k));
    v.extend(std::iter::repeat_n(c / 2, 2 * (q - 2)));
    v.extend([c, c]);
    v.sort_unstable();
    v
}

/// Sizes of the `Q(4, q)` point orbits in [`crate::klein::KleinPointLabel::all`] order.
pub fn klein_point_orbit_sizes(q: usize, xi: i64) -> Vec<usize> {
    let mut v = vec![q + 1, q + 1, q * q - 1];
    v.extend(std::iter::repeat_n((q * q * q - q) / (2 + xi) as usize, (2 + xi) as usize));
    v
}

pub fn symbolic_table(id: u8, p: &Params) -> Result<SymbolicTable> {
    match id {
        1 => Ok(table1()),
        2 => Ok(table2()),
        3 if p.xi == -1 => Ok(table3()),
        3 => Err(Error::TableUnavailable { table: 3, reason: "needs q = -1 mod 3 (odd n)".into() }),
        4 if p.xi == 1 => Ok(table4()),
        4 => Err(Error::TableUnavailable { table: 4, reason: "needs q = 1 mod 3 (even n)".into() }),
        5 => Ok(table5(p.xi)),
        6 => Ok(table6(p.xi)),
        7 => Ok(table7(p.xi)),
        _ => Err(Error::TableUnavailable { table: id, reason: "no fixed symbolic form".into() }),
    }
}
