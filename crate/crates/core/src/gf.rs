//! Arithmetic in GF(2^n), 3 <= n <= 8, and in its quadratic extension GF(q^2).
//!
//! Elements of GF(q) are polynomial residues over GF(2) stored as bitmasks in a
//! `u8`; multiplication goes through log/antilog tables built from the least
//! primitive element. GF(q^2) is realised as GF(q)[y]/(y^2 + y + delta) with
//! `Tr(delta) = 1`, so the q-Frobenius is `a0 + a1 y -> (a0 + a1) + a1 y`.

use std::fmt;
use std::ops::{Add, AddAssign};

use crate::error::{Error, Result};

/// Fixed moduli (bitmask, including the leading term) for n = 3..=8.
const MODULI: [u32; 6] = [
    0b1011,      // x^3 + x + 1
    0b1_0011,    // x^4 + x + 1
    0b10_0101,   // x^5 + x^2 + 1
    0b101_1011,  // x^6 + x^4 + x^3 + x + 1
    0b1000_0011, // x^7 + x + 1
    0x11d,       // x^8 + x^4 + x^3 + x^2 + 1
];

/// An element of GF(2^n). The field it belongs to is carried by a [`FieldCtx`].
#[derive(Copy, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fq(pub u8);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for Fq {
    type Output = Fq;
    #[inline]
    fn add(self, rhs: Fq) -> Fq {
        Fq(self.0 ^ rhs.0)
    }
}

impl AddAssign for Fq {
    #[inline]
    fn add_assign(&mut self, rhs: Fq) {
        self.0 ^= rhs.0;
    }
}

/// Solver for `z^2 + z = k`.
#[derive(Clone, Debug)]
enum ArtinSchreier {
    /// n odd: the half-trace is a root whenever `Tr(k) = 0`.
    HalfTrace,
    /// n even: echelonised images `L(e_j)` of `L(z) = z^2 + z` with their preimages.
    Kernel(Vec<(u32, u32)>),
}

/// Arithmetic context for GF(2^n).
#[derive(Clone, Debug)]
pub struct FieldCtx {
    n: u32,
    q: usize,
    modulus: u32,
    omega: Fq,
    exp: Vec<u8>,
    log: Vec<u16>,
    solver: ArtinSchreier,
}

fn clmul_mod(mut a: u32, mut b: u32, modulus: u32, n: u32) -> u32 {
    let top = 1u32 << n;
    let mut r = 0;
    while b != 0 {
        if b & 1 != 0 {
            r ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= modulus;
        }
    }
    r
}

fn poly_degree(p: u32) -> i32 {
    31 - p.leading_zeros() as i32
}

fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

/// Irreducibility over GF(2) by trial division with every polynomial of degree <= n/2.
pub fn is_irreducible(modulus: u32) -> bool {
    let n = poly_degree(modulus);
    if n < 1 {
        return false;
    }
    for d in 1..=(n / 2) {
        for low in 0..(1u32 << d) {
            let divisor = (1u32 << d) | low;
            if poly_rem(modulus, divisor) == 0 {
                return false;
            }
        }
    }
    true
}

impl FieldCtx {
    /// Builds GF(2^n) with the fixed modulus for `n` and the least primitive element.
    pub fn new(n: u32) -> Result<Self> {
        if !(3..=8).contains(&n) {
            return Err(Error::UnsupportedDegree(n));
        }
        let modulus = MODULI[(n - 3) as usize];
        if poly_degree(modulus) != n as i32 || !is_irreducible(modulus) {
            return Err(Error::ReducibleModulus { n, modulus });
        }
        let q = 1usize << n;
        let order = |g: u32| -> usize {
            let mut x = g;
            let mut k = 1;
            while x != 1 {
                x = clmul_mod(x, g, modulus, n);
                k += 1;
                if k > q {
                    return 0;
                }
            }
            k
        };
        let omega = (2..q as u32)
            .find(|&g| order(g) == q - 1)
            .ok_or_else(|| Error::InvariantViolation("no primitive element".into()))?;

        let mut exp = vec![0u8; 2 * (q - 1)];
        let mut log = vec![0u16; q];
        let mut x = 1u32;
        for i in 0..(q - 1) {
            exp[i] = x as u8;
            exp[i + q - 1] = x as u8;
            log[x as usize] = i as u16;
            x = clmul_mod(x, omega, modulus, n);
        }

        let mut ctx = FieldCtx {
            n,
            q,
            modulus,
            omega: Fq(omega as u8),
            exp,
            log,
            solver: ArtinSchreier::HalfTrace,
        };
        if n.is_multiple_of(2) {
            ctx.solver = ArtinSchreier::Kernel(ctx.artin_schreier_basis());
        }
        Ok(ctx)
    }

    fn artin_schreier_basis(&self) -> Vec<(u32, u32)> {
        // Echelon form of { (L(e_j), e_j) } keyed by the leading bit of the image.
        let mut rows: Vec<(u32, u32)> = Vec::new();
        for j in 0..self.n {
            let e = Fq(1 << j);
            let mut img = (self.square(e) + e).0 as u32;
            let mut pre = e.0 as u32;
            for &(ri, rp) in &rows {
                if img & (1 << poly_degree(ri)) != 0 {
                    img ^= ri;
                    pre ^= rp;
                }
            }
            if img != 0 {
                rows.push((img, pre));
                rows.sort_by_key(|&(i, _)| std::cmp::Reverse(poly_degree(i)));
            }
        }
        rows
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// The least primitive element, in integer order of the bitmask labels.
    pub fn omega(&self) -> Fq {
        self.omega
    }

    /// `q mod 3` expressed as +1 or -1.
    pub fn xi(&self) -> i64 {
        if self.n.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> + Clone {
        (0..self.q).map(|v| Fq(v as u8))
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Fq> + Clone {
        (1..self.q).map(|v| Fq(v as u8))
    }

    #[inline]
    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        if a.0 == 0 || b.0 == 0 {
            return Fq::ZERO;
        }
        Fq(self.exp[self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize])
    }

    #[inline]
    pub fn square(&self, a: Fq) -> Fq {
        self.mul(a, a)
    }

    /// Multiplicative inverse. Panics on zero.
    #[inline]
    pub fn inv(&self, a: Fq) -> Fq {
        assert!(a.0 != 0, "inverse of zero in GF({})", self.q);
        let l = self.log[a.0 as usize] as usize;
        Fq(self.exp[(self.q - 1 - l) % (self.q - 1)])
    }

    pub fn checked_inv(&self, a: Fq) -> Option<Fq> {
        (a.0 != 0).then(|| self.inv(a))
    }

    #[inline]
    pub fn div(&self, a: Fq, b: Fq) -> Fq {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Fq, e: u64) -> Fq {
        if e == 0 {
            return Fq::ONE;
        }
        if a.0 == 0 {
            return Fq::ZERO;
        }
        let m = (self.q - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        Fq(self.exp[((l * (e % m)) % m) as usize])
    }

    /// `a^(2^k)`.
    pub fn frob_pow(&self, a: Fq, k: u32) -> Fq {
        let mut x = a;
        for _ in 0..(k % self.n) {
            x = self.square(x);
        }
        x
    }

    /// Discrete logarithm to base omega, for nonzero `a`.
    pub fn log(&self, a: Fq) -> Option<usize> {
        (a.0 != 0).then(|| self.log[a.0 as usize] as usize)
    }

    /// `omega^k`.
    pub fn exp(&self, k: usize) -> Fq {
        Fq(self.exp[k % (self.q - 1)])
    }

    /// Absolute trace `x + x^2 + ... + x^(2^(n-1))`, returned as 0 or 1.
    pub fn trace(&self, x: Fq) -> u8 {
        let mut acc = Fq::ZERO;
        let mut y = x;
        for _ in 0..self.n {
            acc += y;
            y = self.square(y);
        }
        debug_assert!(acc.0 <= 1);
        acc.0
    }

    /// True iff nonzero `x` is a cube in GF(q).
    pub fn is_cube(&self, x: Fq) -> Result<bool> {
        let l = self.log(x).ok_or_else(|| Error::Domain("is_cube(0)".into()))?;
        let g = if (self.q - 1).is_multiple_of(3) { 3 } else { 1 };
        Ok(l % g == 0)
    }

    /// The unique square root, `x^(2^(n-1))`.
    pub fn sqrt(&self, x: Fq) -> Fq {
        self.frob_pow(x, self.n - 1)
    }

    /// One root of `z^2 + z = k`, or `None` when `Tr(k) = 1`. The other root is `z + 1`.
    pub fn artin_schreier_root(&self, k: Fq) -> Option<Fq> {
        if self.trace(k) != 0 {
            return None;
        }
        let z = match &self.solver {
            ArtinSchreier::HalfTrace => {
                let mut acc = Fq::ZERO;
                let mut y = k;
                for _ in 0..=((self.n - 1) / 2) {
                    acc += y;
                    y = self.square(self.square(y));
                }
                acc
            }
            ArtinSchreier::Kernel(rows) => {
                let mut rem = k.0 as u32;
                let mut z = 0u32;
                for &(img, pre) in rows {
                    if rem & (1 << poly_degree(img)) != 0 {
                        rem ^= img;
                        z ^= pre;
                    }
                }
                if rem != 0 {
                    return None;
                }
                Fq(z as u8)
            }
        };
        debug_assert_eq!(self.square(z) + z, k);
        Some(z)
    }

    /// All roots of `a y^2 + b y + c = 0`, sorted. Empty when there are none
    /// (including the degenerate `a = b = 0, c != 0`); every element when `a = b = c = 0`.
    pub fn solve_quadratic(&self, a: Fq, b: Fq, c: Fq) -> Vec<Fq> {
        let mut roots = match (a.is_zero(), b.is_zero()) {
            (true, true) => {
                if c.is_zero() {
                    self.elements().collect()
                } else {
                    Vec::new()
                }
            }
            (true, false) => vec![self.div(c, b)],
            (false, true) => vec![self.sqrt(self.div(c, a))],
            (false, false) => {
                // y = (b/a) z turns the equation into z^2 + z = ac/b^2.
                let k = self.div(self.mul(a, c), self.square(b));
                match self.artin_schreier_root(k) {
                    None => Vec::new(),
                    Some(z) => {
                        let s = self.div(b, a);
                        vec![self.mul(s, z), self.mul(s, z + Fq::ONE)]
                    }
                }
            }
        };
        roots.sort();
        roots
    }
}

/// An element `a0 + a1 y` of GF(q^2) = GF(q)[y]/(y^2 + y + delta).
#[derive(Copy, Clone, Default, PartialEq, Eq, Hash, Debug)]
pub struct Fq2 {
    pub a0: Fq,
    pub a1: Fq,
}

impl Fq2 {
    pub const ZERO: Fq2 = Fq2 { a0: Fq::ZERO, a1: Fq::ZERO };
    pub const ONE: Fq2 = Fq2 { a0: Fq::ONE, a1: Fq::ZERO };

    pub fn new(a0: Fq, a1: Fq) -> Self {
        Fq2 { a0, a1 }
    }

    pub fn embed(x: Fq) -> Self {
        Fq2 { a0: x, a1: Fq::ZERO }
    }

    pub fn is_zero(self) -> bool {
        self.a0.is_zero() && self.a1.is_zero()
    }

    /// Lies in the embedded subfield GF(q).
    pub fn is_base(self) -> bool {
        self.a1.is_zero()
    }

    /// Integer label used to order elements: `a0 + q * a1`.
    pub fn index(self, q: usize) -> usize {
        self.a0.0 as usize + q * self.a1.0 as usize
    }
}

impl Add for Fq2 {
    type Output = Fq2;
    #[inline]
    fn add(self, rhs: Fq2) -> Fq2 {
        Fq2 { a0: self.a0 + rhs.a0, a1: self.a1 + rhs.a1 }
    }
}

impl AddAssign for Fq2 {
    fn add_assign(&mut self, rhs: Fq2) {
        *self = *self + rhs;
    }
}

/// Arithmetic context for GF(q^2) over a [`FieldCtx`].
#[derive(Clone, Debug)]
pub struct ExtCtx {
    base: FieldCtx,
    delta: Fq,
    zeta: Fq2,
}

impl ExtCtx {
    /// Picks the least `delta` with `Tr(delta) = 1` and the least `zeta` outside
    /// GF(q) with `(zeta + 1)^(q+1) = 1`.
    pub fn new(base: &FieldCtx) -> Self {
        let delta = base
            .elements()
            .find(|&d| base.trace(d) == 1)
            .expect("trace is onto GF(2)");
        let mut ext = ExtCtx { base: base.clone(), delta, zeta: Fq2::ZERO };
        let q = base.q();
        let zeta = (0..q * q)
            .map(|i| ext.from_index(i))
            .find(|&z| !z.is_base() && ext.norm(z + Fq2::ONE) == Fq::ONE)
            .expect("norm-one elements outside GF(q) exist");
        ext.zeta = zeta;
        ext
    }

    pub fn base(&self) -> &FieldCtx {
        &self.base
    }

    pub fn delta(&self) -> Fq {
        self.delta
    }

    pub fn zeta(&self) -> Fq2 {
        self.zeta
    }

    /// The adjoined root `y`.
    pub fn y(&self) -> Fq2 {
        Fq2::new(Fq::ZERO, Fq::ONE)
    }

    pub fn from_index(&self, i: usize) -> Fq2 {
        let q = self.base.q();
        Fq2::new(Fq((i % q) as u8), Fq((i / q) as u8))
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq2> + '_ {
        let q = self.base.q();
        (0..q * q).map(move |i| self.from_index(i))
    }

    pub fn mul(&self, x: Fq2, z: Fq2) -> Fq2 {
        let f = &self.base;
        let hi = f.mul(x.a1, z.a1);
        Fq2 {
            a0: f.mul(x.a0, z.a0) + f.mul(hi, self.delta),
            a1: f.mul(x.a0, z.a1) + f.mul(x.a1, z.a0) + hi,
        }
    }

    pub fn scale(&self, s: Fq, x: Fq2) -> Fq2 {
        Fq2::new(self.base.mul(s, x.a0), self.base.mul(s, x.a1))
    }

    pub fn square(&self, x: Fq2) -> Fq2 {
        self.mul(x, x)
    }

    /// `x^q`.
    pub fn frobenius(&self, x: Fq2) -> Fq2 {
        Fq2 { a0: x.a0 + x.a1, a1: x.a1 }
    }

    /// `x^(2^k)`.
    pub fn frob_pow(&self, x: Fq2, k: u32) -> Fq2 {
        let mut r = x;
        for _ in 0..k {
            r = self.square(r);
        }
        r
    }

    /// `x^(q+1)`, which lies in GF(q).
    pub fn norm(&self, x: Fq2) -> Fq {
        let p = self.mul(x, self.frobenius(x));
        debug_assert!(p.is_base());
        p.a0
    }

    /// Relative trace `x + x^q`.
    pub fn rel_trace(&self, x: Fq2) -> Fq {
        (x + self.frobenius(x)).a0
    }

    pub fn inv(&self, x: Fq2) -> Fq2 {
        let nrm = self.norm(x);
        assert!(!nrm.is_zero(), "inverse of zero in GF(q^2)");
        self.scale(self.base.inv(nrm), self.frobenius(x))
    }

    pub fn div(&self, x: Fq2, z: Fq2) -> Fq2 {
        self.mul(x, self.inv(z))
    }

    pub fn pow(&self, x: Fq2, mut e: u64) -> Fq2 {
        let mut base = x;
        let mut acc = Fq2::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.square(base);
            e >>= 1;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moduli_and_primitive_elements() {
        let f3 = FieldCtx::new(3).unwrap();
        assert_eq!(f3.q(), 8);
        assert_eq!(f3.modulus(), 0b1011);
        assert_eq!(f3.omega(), Fq(2));
        // ord(x) = 7 by direct exponentiation.
        let x = Fq(2);
        let mut y = x;
        let mut k = 1;
        while y != Fq::ONE {
            y = f3.mul(y, x);
            k += 1;
        }
        assert_eq!(k, 7);

        let f4 = FieldCtx::new(4).unwrap();
        assert_eq!(f4.q(), 16);
        assert_eq!(f4.modulus(), 0b1_0011);
        for n in 3..=8 {
            let f = FieldCtx::new(n).unwrap();
            assert!(is_irreducible(f.modulus()));
            let w = f.omega();
            let ord = (1..f.q()).find(|&k| f.pow(w, k as u64) == Fq::ONE).unwrap();
            assert_eq!(ord, f.q() - 1);
        }
    }

    #[test]
    fn out_of_range_degree() {
        assert_eq!(FieldCtx::new(2).unwrap_err(), Error::UnsupportedDegree(2));
        assert_eq!(FieldCtx::new(9).unwrap_err(), Error::UnsupportedDegree(9));
        assert!(!is_irreducible(0b101)); // (x+1)^2
    }

    #[test]
    fn trace_examples() {
        let f = FieldCtx::new(3).unwrap();
        assert_eq!(f.trace(Fq::ZERO), 0);
        assert_eq!(f.trace(Fq::ONE), 1);
        assert_eq!(f.trace(Fq(2)), 0);
        for n in 3..=8 {
            let f = FieldCtx::new(n).unwrap();
            let zeros = f.elements().filter(|&x| f.trace(x) == 0).count();
            assert_eq!(zeros, f.q() / 2);
        }
    }

    #[test]
    fn cube_classes() {
        let f8 = FieldCtx::new(3).unwrap();
        assert!(f8.is_cube(f8.omega()).unwrap());
        let f16 = FieldCtx::new(4).unwrap();
        let w = f16.omega();
        assert_ne!(f16.pow(w, 5), Fq::ONE);
        assert!(!f16.is_cube(w).unwrap());
        assert!(f16.is_cube(f16.pow(w, 3)).unwrap());
        assert!(f16.is_cube(Fq::ZERO).is_err());
        for n in 3..=8 {
            let f = FieldCtx::new(n).unwrap();
            let cubes: std::collections::HashSet<Fq> =
                f.nonzero().map(|x| f.pow(x, 3)).collect();
            for x in f.nonzero() {
                assert_eq!(f.is_cube(x).unwrap(), cubes.contains(&x));
            }
        }
    }

    #[test]
    fn square_roots() {
        for n in 3..=8 {
            let f = FieldCtx::new(n).unwrap();
            assert_eq!(f.sqrt(Fq::ZERO), Fq::ZERO);
            assert_eq!(f.sqrt(Fq::ONE), Fq::ONE);
            for x in f.elements() {
                assert_eq!(f.square(f.sqrt(x)), x);
            }
        }
        let f = FieldCtx::new(3).unwrap();
        let w = f.omega();
        assert_eq!(f.sqrt(f.square(w)), w);
    }

    #[test]
    fn axioms_exhaustive_small() {
        for n in 3..=4 {
            let f = FieldCtx::new(n).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements() {
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, b + c), f.mul(a, b) + f.mul(a, c));
                    }
                }
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a)), Fq::ONE);
                }
            }
        }
    }

    #[test]
    fn quadratic_examples() {
        let f = FieldCtx::new(3).unwrap();
        assert_eq!(f.solve_quadratic(Fq::ONE, Fq::ONE, Fq::ZERO), vec![Fq(0), Fq(1)]);
        for c in f.elements().filter(|&c| f.trace(c) == 1) {
            assert!(f.solve_quadratic(Fq::ONE, Fq::ONE, c).is_empty());
        }
        assert!(f.solve_quadratic(Fq::ZERO, Fq::ZERO, Fq::ONE).is_empty());

        let f = FieldCtx::new(4).unwrap();
        let w = f.omega();
        let w2 = f.square(w);
        let oracle: Vec<Fq> = f
            .elements()
            .filter(|&y| f.square(y) + f.mul(w, y) + w2 == Fq::ZERO)
            .collect();
        assert_eq!(f.solve_quadratic(Fq::ONE, w, w2), oracle);
    }

    #[test]
    fn quadratic_matches_substitution_everywhere() {
        for n in [3, 4, 5, 6] {
            let f = FieldCtx::new(n).unwrap();
            let step = if n <= 4 { 1 } else { 7 };
            for a in f.elements().step_by(step) {
                for b in f.elements().step_by(step) {
                    for c in f.elements() {
                        if a.is_zero() && b.is_zero() {
                            continue;
                        }
                        let roots = f.solve_quadratic(a, b, c);
                        let oracle: Vec<Fq> = f
                            .elements()
                            .filter(|&y| f.mul(a, f.square(y)) + f.mul(b, y) + c == Fq::ZERO)
                            .collect();
                        assert_eq!(roots, oracle, "a={a:?} b={b:?} c={c:?}");
                        if !a.is_zero() && !b.is_zero() {
                            let k = f.div(f.mul(a, c), f.square(b));
                            let expect = if f.trace(k) == 0 { 2 } else { 0 };
                            assert_eq!(roots.len(), expect);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn extension_field() {
        let f = FieldCtx::new(3).unwrap();
        let e = ExtCtx::new(&f);
        assert_eq!(e.delta(), Fq::ONE);
        let q = f.q();
        // y^q = y + 1
        assert_eq!(e.pow(e.y(), q as u64), e.y() + Fq2::ONE);
        let norm_one = e.elements().filter(|&u| e.norm(u) == Fq::ONE).count();
        assert_eq!(norm_one, q + 1);
        let z = e.zeta();
        assert!(!z.is_base());
        assert_eq!(e.pow(z + Fq2::ONE, q as u64 + 1), Fq2::ONE);

        for n in [3, 4] {
            let f = FieldCtx::new(n).unwrap();
            let e = ExtCtx::new(&f);
            let q = f.q() as u64;
            for x in e.elements() {
                assert_eq!(e.frobenius(x), e.pow(x, q));
                assert_eq!(e.frobenius(e.frobenius(x)), x);
                assert_eq!(e.frobenius(x) == x, x.is_base());
                if !x.is_zero() {
                    assert_eq!(e.mul(x, e.inv(x)), Fq2::ONE);
                }
            }
        }
    }
}
