//! Quadratic Dirichlet characters, Atkin-Lehner matrices in exact integer
//! form, and extensions of characters to the Fricke and Atkin-Lehner groups.

use std::fmt;
use std::ops::{Mul, Neg};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{self, ext_gcd, factorize, kronecker, Factorization};
use crate::error::{Error, Result};

/// A fourth root of unity `i^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Unit(u8);

impl Unit {
    pub const ONE: Unit = Unit(0);
    pub const I: Unit = Unit(1);
    pub const MINUS_ONE: Unit = Unit(2);
    pub const MINUS_I: Unit = Unit(3);

    pub fn from_sign(s: i32) -> Unit {
        match s {
            1 => Unit::ONE,
            -1 => Unit::MINUS_ONE,
            _ => panic!("not a sign: {s}"),
        }
    }

    /// Exponent `k` with `self = i^k`, in `0..4`.
    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn conj(self) -> Unit {
        Unit((4 - self.0) % 4)
    }

    pub fn square(self) -> Unit {
        self * self
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// `(re, im)` as integers.
    pub fn parts(self) -> (i64, i64) {
        match self.0 {
            0 => (1, 0),
            1 => (0, 1),
            2 => (-1, 0),
            _ => (0, -1),
        }
    }

    /// Both square roots of `self`.
    pub fn square_roots(self) -> [Unit; 2] {
        match self.0 {
            0 => [Unit::ONE, Unit::MINUS_ONE],
            2 => [Unit::I, Unit::MINUS_I],
            // square roots of +-i are primitive 8th roots; never needed here
            _ => panic!("no fourth-root-of-unity square root of {self}"),
        }
    }
}

impl Mul for Unit {
    type Output = Unit;
    fn mul(self, rhs: Unit) -> Unit {
        Unit((self.0 + rhs.0) % 4)
    }
}

impl Neg for Unit {
    type Output = Unit;
    fn neg(self) -> Unit {
        Unit((self.0 + 2) % 4)
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+1",
            1 => "+i",
            2 => "-1",
            _ => "-i",
        })
    }
}

impl std::str::FromStr for Unit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Unit> {
        match s.trim() {
            "+1" | "1" => Ok(Unit::ONE),
            "-1" => Ok(Unit::MINUS_ONE),
            "+i" | "i" => Ok(Unit::I),
            "-i" => Ok(Unit::MINUS_I),
            other => Err(Error::InvalidInput(format!("bad sign '{other}'"))),
        }
    }
}

/// Local character at 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TwoPart {
    Trivial,
    /// `(-1/.)`
    M4,
    /// `(2/.)`
    P8,
    /// `(-2/.)`
    M8,
}

impl TwoPart {
    pub fn conductor(self) -> u64 {
        match self {
            TwoPart::Trivial => 1,
            TwoPart::M4 => 4,
            TwoPart::P8 | TwoPart::M8 => 8,
        }
    }

    pub fn parity(self) -> i32 {
        match self {
            TwoPart::M4 | TwoPart::M8 => -1,
            _ => 1,
        }
    }

    pub fn eval(self, n: i64) -> i32 {
        match self {
            TwoPart::Trivial => 1,
            TwoPart::M4 => kronecker(-4, n),
            TwoPart::P8 => kronecker(8, n),
            TwoPart::M8 => kronecker(-8, n),
        }
    }

    pub fn token(self) -> Option<&'static str> {
        match self {
            TwoPart::Trivial => None,
            TwoPart::M4 => Some("m4"),
            TwoPart::P8 => Some("p8"),
            TwoPart::M8 => Some("m8"),
        }
    }
}

/// A trivial or quadratic Dirichlet character modulo `N`, stored as its
/// local components.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadChar {
    level: u64,
    fact: Factorization,
    odd: Vec<u64>,
    two: TwoPart,
}

impl QuadChar {
    /// Build from explicit components, validating them against the level.
    pub fn new(level: u64, odd_primes: &[u64], two: TwoPart) -> Result<QuadChar> {
        if level == 0 {
            return Err(Error::InvalidInput("level must be positive".into()));
        }
        let fact = factorize(level as i64)?;
        let mut odd = odd_primes.to_vec();
        odd.sort_unstable();
        if odd.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("duplicate character component".into()));
        }
        for &p in &odd {
            if p == 2 || !arith::is_prime(p) || !level.is_multiple_of(p) {
                return Err(Error::InvalidInput(format!(
                    "component p{p} is not an odd prime dividing {level}"
                )));
            }
        }
        let v2 = fact.valuation(2);
        let allowed = match two {
            TwoPart::Trivial => true,
            TwoPart::M4 => v2 >= 2,
            TwoPart::P8 | TwoPart::M8 => v2 >= 3,
        };
        if !allowed {
            return Err(Error::InvalidInput(format!(
                "2-component {} incompatible with level {level}",
                two.token().unwrap_or("triv")
            )));
        }
        Ok(QuadChar {
            level,
            fact,
            odd,
            two,
        })
    }

    pub fn trivial(level: u64) -> Result<QuadChar> {
        QuadChar::new(level, &[], TwoPart::Trivial)
    }

    /// Parse the comma-separated component grammar (`p13,p17`, `m4`, `triv`).
    pub fn parse(level: u64, spec: &str) -> Result<QuadChar> {
        let mut odd = Vec::new();
        let mut two = TwoPart::Trivial;
        let mut seen_two = false;
        for token in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let part = match token {
                "triv" => continue,
                "m4" => Some(TwoPart::M4),
                "p8" => Some(TwoPart::P8),
                "m8" => Some(TwoPart::M8),
                _ => None,
            };
            match part {
                Some(t) => {
                    if seen_two {
                        return Err(Error::InvalidInput("more than one 2-component".into()));
                    }
                    seen_two = true;
                    two = t;
                }
                None => {
                    let p = token
                        .strip_prefix('p')
                        .and_then(|s| s.parse::<u64>().ok())
                        .ok_or_else(|| {
                            Error::InvalidInput(format!("bad character token '{token}'"))
                        })?;
                    odd.push(p);
                }
            }
        }
        QuadChar::new(level, &odd, two)
    }

    /// The character of level `N` attached to a fundamental discriminant `d`
    /// (the Kronecker symbol `(d/.)`), if its conductor divides `N`.
    pub fn from_fundamental(level: u64, d: i64) -> Result<Option<QuadChar>> {
        if d == 1 {
            return QuadChar::trivial(level).map(Some);
        }
        let fd = factorize(d.unsigned_abs() as i64)?;
        let mut odd = Vec::new();
        let mut rest = d;
        for p in fd.primes().filter(|&p| p != 2) {
            let p_star = if p % 4 == 1 { p as i64 } else { -(p as i64) };
            rest /= p_star;
            odd.push(p);
        }
        let two = match rest {
            1 => TwoPart::Trivial,
            -4 => TwoPart::M4,
            8 => TwoPart::P8,
            -8 => TwoPart::M8,
            _ => {
                return Err(Error::InvalidInput(format!(
                    "{d} is not a fundamental discriminant"
                )))
            }
        };
        if !level.is_multiple_of(d.unsigned_abs()) {
            return Ok(None);
        }
        QuadChar::new(level, &odd, two).map(Some)
    }

    /// Every trivial or quadratic character modulo `N`; trivial first.
    pub fn list(level: u64) -> Result<Vec<QuadChar>> {
        let fact = factorize(level as i64)?;
        let odd: Vec<u64> = fact.primes().filter(|&p| p != 2).collect();
        let twos: &[TwoPart] = match fact.valuation(2) {
            0 | 1 => &[TwoPart::Trivial],
            2 => &[TwoPart::Trivial, TwoPart::M4],
            _ => &[TwoPart::Trivial, TwoPart::M4, TwoPart::P8, TwoPart::M8],
        };
        let mut out = Vec::new();
        for &two in twos {
            for mask in 0u32..(1 << odd.len()) {
                let subset: Vec<u64> = odd
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &p)| p)
                    .collect();
                out.push(QuadChar::new(level, &subset, two)?);
            }
        }
        out.sort_by_key(|c| (c.conductor(), c.two, c.odd.clone()));
        Ok(out)
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn level_factorization(&self) -> &Factorization {
        &self.fact
    }

    pub fn odd_primes(&self) -> &[u64] {
        &self.odd
    }

    pub fn two_part(&self) -> TwoPart {
        self.two
    }

    pub fn is_trivial(&self) -> bool {
        self.odd.is_empty() && self.two == TwoPart::Trivial
    }

    pub fn conductor(&self) -> u64 {
        self.odd.iter().product::<u64>() * self.two.conductor()
    }

    /// `chi(-1)`.
    pub fn parity(&self) -> i32 {
        self.odd
            .iter()
            .map(|&p| if p % 4 == 1 { 1 } else { -1 })
            .product::<i32>()
            * self.two.parity()
    }

    /// Value of the local component at the prime `p` (1 if absent).
    pub fn local(&self, p: u64, n: i64) -> i32 {
        if p == 2 {
            self.two.eval(n)
        } else if self.odd.contains(&p) {
            kronecker(n, p as i64)
        } else {
            1
        }
    }

    /// `chi(n)`, zero exactly when `gcd(n, f) > 1`.
    pub fn eval(&self, n: i64) -> i32 {
        let mut v = self.two.eval(n);
        for &p in &self.odd {
            v *= kronecker(n, p as i64);
        }
        v
    }

    pub fn eval_unit(&self, n: i64) -> Option<Unit> {
        match self.eval(n) {
            0 => None,
            s => Some(Unit::from_sign(s)),
        }
    }

    /// Component grammar string, `triv` for the trivial character.
    pub fn spec(&self) -> String {
        let mut tokens: Vec<String> = self.odd.iter().map(|p| format!("p{p}")).collect();
        if let Some(t) = self.two.token() {
            tokens.push(t.to_string());
        }
        if tokens.is_empty() {
            "triv".to_string()
        } else {
            tokens.join(",")
        }
    }
}

impl fmt::Display for QuadChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec())
    }
}

/// An element of `Gamma0(N) W_e`, the real matrix
/// `[[a sqrt(e), b/sqrt(e)], [c N/sqrt(e), d sqrt(e)]]` with
/// `a d e - b c N/e = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlMatrix {
    pub level: u64,
    pub e: u64,
    pub a: i128,
    pub b: i128,
    pub c: i128,
    pub d: i128,
}

fn check_hall(n: u64, e: u64) -> Result<()> {
    if e == 0 || !n.is_multiple_of(e) || e.gcd(&(n / e)) != 1 {
        return Err(Error::NotHallDivisor { n, e });
    }
    Ok(())
}

impl AlMatrix {
    pub fn new(level: u64, e: u64, a: i128, b: i128, c: i128, d: i128) -> Result<AlMatrix> {
        check_hall(level, e)?;
        let m = AlMatrix {
            level,
            e,
            a,
            b,
            c,
            d,
        };
        if m.det() != 1 {
            return Err(Error::InvalidInput(format!(
                "determinant condition fails for {m:?}"
            )));
        }
        Ok(m)
    }

    /// Element `[[a, b], [cN, d]]` of `Gamma0(N)`.
    pub fn gamma0(level: u64, a: i128, b: i128, c: i128, d: i128) -> Result<AlMatrix> {
        AlMatrix::new(level, 1, a, b, c, d)
    }

    pub fn identity(level: u64) -> AlMatrix {
        AlMatrix {
            level,
            e: 1,
            a: 1,
            b: 0,
            c: 0,
            d: 1,
        }
    }

    /// `a d e - b c (N/e)`; equals 1 for every valid matrix.
    pub fn det(&self) -> i128 {
        let e = self.e as i128;
        let ne = (self.level / self.e) as i128;
        self.a * self.d * e - self.b * self.c * ne
    }

    /// Canonical `W_e`: `b = d = 1` and `0 <= a < N/e` for `1 < e < N`;
    /// `[[0, -1/sqrt(N)], [sqrt(N), 0]]` for `e = N`; identity for `e = 1`.
    pub fn atkin_lehner(level: u64, e: u64) -> Result<AlMatrix> {
        check_hall(level, e)?;
        if e == 1 {
            return Ok(AlMatrix::identity(level));
        }
        if e == level {
            return AlMatrix::new(level, e, 0, -1, 1, 0);
        }
        // a e - c (N/e) = 1
        let ne = (level / e) as i128;
        let (_, x, _) = ext_gcd(e as i128, ne);
        let a = x.rem_euclid(ne);
        let c = (a * e as i128 - 1) / ne;
        AlMatrix::new(level, e, a, 1, c, 1)
    }

    pub fn mul(&self, rhs: &AlMatrix) -> AlMatrix {
        assert_eq!(self.level, rhs.level, "level mismatch");
        let n = self.level as i128;
        let g = self.e.gcd(&rhs.e);
        let u1 = (self.e / g) as i128;
        let u2 = (rhs.e / g) as i128;
        let e3 = (u1 * u2) as u64;
        let g = g as i128;
        let q = n / (g * e3 as i128);
        let a = self.a * rhs.a * g + self.b * rhs.c * q;
        let b = self.a * rhs.b * u1 + self.b * rhs.d * u2;
        let c = self.c * rhs.a * u2 + self.d * rhs.c * u1;
        let d = self.c * rhs.b * q + self.d * rhs.d * g;
        AlMatrix {
            level: self.level,
            e: e3,
            a,
            b,
            c,
            d,
        }
    }

    pub fn inverse(&self) -> AlMatrix {
        AlMatrix {
            level: self.level,
            e: self.e,
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn neg(&self) -> AlMatrix {
        AlMatrix {
            level: self.level,
            e: self.e,
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
        }
    }

    /// The trace is `(a + d) sqrt(e)`; this returns `a + d`.
    pub fn trace_coefficient(&self) -> i128 {
        self.a + self.d
    }

    /// Sign of the lower-left entry `c N / sqrt(e)`.
    pub fn lower_left_sign(&self) -> i32 {
        self.c.signum() as i32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupKind {
    #[serde(rename = "gamma0")]
    Gamma0,
    #[serde(rename = "gamma0+")]
    Gamma0Plus,
    #[serde(rename = "gamma0*")]
    Gamma0Star,
}

impl GroupKind {
    pub fn name(self) -> &'static str {
        match self {
            GroupKind::Gamma0 => "gamma0",
            GroupKind::Gamma0Plus => "gamma0+",
            GroupKind::Gamma0Star => "gamma0*",
        }
    }
}

impl std::str::FromStr for GroupKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<GroupKind> {
        match s {
            "gamma0" => Ok(GroupKind::Gamma0),
            "gamma0+" | "gamma0plus" => Ok(GroupKind::Gamma0Plus),
            "gamma0*" | "gamma0star" => Ok(GroupKind::Gamma0Star),
            other => Err(Error::InvalidInput(format!("unknown group '{other}'"))),
        }
    }
}

/// A character of `Gamma0(N)`, `Gamma0+(N)` or `Gamma0*(N)` restricting to a
/// quadratic Dirichlet character on `Gamma0(N)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtChar {
    base: QuadChar,
    kind: GroupKind,
    /// Prime signs for the star group, or the single `W_N` sign for plus.
    signs: Vec<(u64, Unit)>,
    /// Values on the canonical `W_e`, one per Hall divisor in the group.
    w_values: Vec<(u64, Unit)>,
}

/// `chi(W_e^2)` for the canonical `W_e`; the square of any admissible sign.
pub fn w_square_value(chi: &QuadChar, e: u64) -> Result<Unit> {
    let w = AlMatrix::atkin_lehner(chi.level(), e)?;
    let sq = w.mul(&w);
    debug_assert_eq!(sq.e, 1);
    chi.eval_unit(sq.d as i64)
        .ok_or_else(|| Error::Inconsistent("W_e^2 has non-unit character value".into()))
}

/// The prime pair `(p, q)` of a square-free level obstructing an extension of
/// `chi` to `Gamma0*(N)`. The commutator of `W_p` and `W_q` lies in
/// `Gamma0(N)` with value `chi_p(q) chi_q(p)`, so every such product must be 1.
pub fn star_obstruction(chi: &QuadChar) -> Option<(u64, u64)> {
    let primes: Vec<u64> = chi.level_factorization().primes().collect();
    for (i, &p) in primes.iter().enumerate() {
        for &q in &primes[i + 1..] {
            if chi.local(p, q as i64) * chi.local(q, p as i64) != 1 {
                return Some((p, q));
            }
        }
    }
    None
}

impl ExtChar {
    pub fn gamma0(base: QuadChar) -> ExtChar {
        ExtChar {
            base,
            kind: GroupKind::Gamma0,
            signs: Vec::new(),
            w_values: vec![(1, Unit::ONE)],
        }
    }

    pub fn plus(base: QuadChar, eps: Unit) -> Result<ExtChar> {
        let n = base.level();
        if n < 2 {
            return Err(Error::InvalidInput("Fricke group needs N > 1".into()));
        }
        let expected = Unit::from_sign(base.parity());
        if eps.square() != expected {
            return Err(Error::InvalidInput(format!(
                "sign {eps} does not square to chi(-1) = {expected}"
            )));
        }
        Ok(ExtChar {
            base,
            kind: GroupKind::Gamma0Plus,
            signs: vec![(n, eps)],
            w_values: vec![(1, Unit::ONE), (n, eps)],
        })
    }

    /// Star extension from `chi*(W_p)` for every prime `p | N`.
    pub fn star(base: QuadChar, prime_signs: &[(u64, Unit)]) -> Result<ExtChar> {
        let n = base.level();
        let fact = base.level_factorization().clone();
        if n < 2 {
            return Err(Error::InvalidInput("star group needs N > 1".into()));
        }
        if !fact.is_squarefree() {
            return Err(Error::NotSquareFree(n));
        }
        if let Some((p, q)) = star_obstruction(&base) {
            return Err(Error::InvalidInput(format!(
                "{base} does not extend to gamma0*({n}): W_{p} and W_{q} have commutator value -1"
            )));
        }
        let mut signs = prime_signs.to_vec();
        signs.sort_unstable();
        let primes: Vec<u64> = fact.primes().collect();
        if signs.iter().map(|&(p, _)| p).collect::<Vec<_>>() != primes {
            return Err(Error::InvalidInput(format!(
                "star signs must name each prime of {n} exactly once"
            )));
        }
        for &(p, s) in &signs {
            let sq = w_square_value(&base, p)?;
            if s.square() != sq {
                return Err(Error::InvalidInput(format!(
                    "sign {s} at {p} must square to chi(W_{p}^2) = {sq}"
                )));
            }
        }
        let mut w_values: Vec<(u64, Unit)> = vec![(1, Unit::ONE)];
        for e in fact.hall_divisors().into_iter().skip(1) {
            let p = factorize(e as i64)?.primes().next().unwrap();
            let rest = e / p;
            let eps_p = signs.iter().find(|s| s.0 == p).unwrap().1;
            let value = if rest == 1 {
                eps_p
            } else {
                let w_rest = w_values.iter().find(|w| w.0 == rest).unwrap().1;
                // W_p W_rest = h W_e with h in Gamma0(N)
                let wp = AlMatrix::atkin_lehner(n, p)?;
                let wr = AlMatrix::atkin_lehner(n, rest)?;
                let we = AlMatrix::atkin_lehner(n, e)?;
                let h = wp.mul(&wr).mul(&we.inverse());
                let chi_h = base.eval_unit(h.d as i64).ok_or_else(|| {
                    Error::Inconsistent("coset correction has non-unit value".into())
                })?;
                eps_p * w_rest * chi_h.conj()
            };
            if value.square() != w_square_value(&base, e)? {
                return Err(Error::Inconsistent(format!(
                    "value on W_{e} does not square to chi(W_{e}^2)"
                )));
            }
            w_values.push((e, value));
        }
        Ok(ExtChar {
            base,
            kind: GroupKind::Gamma0Star,
            signs,
            w_values,
        })
    }

    /// All extensions of `chi` to the given group.
    pub fn extensions(chi: &QuadChar, kind: GroupKind) -> Result<Vec<ExtChar>> {
        match kind {
            GroupKind::Gamma0 => Ok(vec![ExtChar::gamma0(chi.clone())]),
            GroupKind::Gamma0Plus => {
                let roots = Unit::from_sign(chi.parity()).square_roots();
                roots
                    .into_iter()
                    .map(|eps| ExtChar::plus(chi.clone(), eps))
                    .collect()
            }
            GroupKind::Gamma0Star => {
                let fact = chi.level_factorization();
                if !fact.is_squarefree() {
                    return Err(Error::NotSquareFree(chi.level()));
                }
                let mut options: Vec<Vec<(u64, Unit)>> = vec![Vec::new()];
                for p in fact.primes() {
                    let roots = w_square_value(chi, p)?.square_roots();
                    options = options
                        .into_iter()
                        .flat_map(|prefix| {
                            roots.iter().map(move |&r| {
                                let mut next = prefix.clone();
                                next.push((p, r));
                                next
                            })
                        })
                        .collect();
                }
                options
                    .iter()
                    .map(|s| ExtChar::star(chi.clone(), s))
                    .collect()
            }
        }
    }

    pub fn base(&self) -> &QuadChar {
        &self.base
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn level(&self) -> u64 {
        self.base.level()
    }

    pub fn signs(&self) -> &[(u64, Unit)] {
        &self.signs
    }

    /// `chi^+(W_N)` for a plus extension.
    pub fn fricke_sign(&self) -> Option<Unit> {
        match self.kind {
            GroupKind::Gamma0Plus => Some(self.signs[0].1),
            _ => None,
        }
    }

    /// Value on the canonical `W_e`.
    pub fn w_value(&self, e: u64) -> Result<Unit> {
        self.w_values
            .iter()
            .find(|w| w.0 == e)
            .map(|w| w.1)
            .ok_or(Error::InvalidInput(format!(
                "W_{e} is not in the {} group of level {}",
                self.kind.name(),
                self.level()
            )))
    }

    /// Evaluate on `M = g W_e`, returning `None` for a non-unit value.
    pub fn eval(&self, m: &AlMatrix) -> Result<Option<Unit>> {
        if m.level != self.level() {
            return Err(Error::InvalidInput("matrix level mismatch".into()));
        }
        let w_val = self.w_value(m.e)?;
        let w = AlMatrix::atkin_lehner(m.level, m.e)?;
        let g = m.mul(&w.inverse());
        debug_assert_eq!(g.e, 1);
        Ok(self.base.eval_unit(g.d as i64).map(|u| u * w_val))
    }

    /// Trivial on the whole group.
    pub fn is_trivial(&self) -> bool {
        self.base.is_trivial() && self.w_values.iter().all(|w| w.1 == Unit::ONE)
    }

    /// The complex conjugate character.
    pub fn conj(&self) -> ExtChar {
        let mut out = self.clone();
        for s in &mut out.signs {
            s.1 = s.1.conj();
        }
        for w in &mut out.w_values {
            w.1 = w.1.conj();
        }
        out
    }

    /// Sign grammar: `+1` for plus, `13:+1,17:-1` for star, empty for gamma0.
    pub fn sign_spec(&self) -> String {
        match self.kind {
            GroupKind::Gamma0 => String::new(),
            GroupKind::Gamma0Plus => self.signs[0].1.to_string(),
            GroupKind::Gamma0Star => self
                .signs
                .iter()
                .map(|(p, s)| format!("{p}:{s}"))
                .collect::<Vec<_>>()
                .join(","),
        }
    }
}

/// Parse `13:+1,17:-1`.
pub fn parse_star_signs(spec: &str) -> Result<Vec<(u64, Unit)>> {
    spec.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|token| {
            let (p, s) = token
                .split_once(':')
                .ok_or_else(|| Error::InvalidInput(format!("bad star sign '{token}'")))?;
            let p = p
                .trim()
                .parse::<u64>()
                .map_err(|_| Error::InvalidInput(format!("bad prime in '{token}'")))?;
            Ok((p, s.parse()?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi221() -> QuadChar {
        QuadChar::parse(221, "p13,p17").unwrap()
    }

    #[test]
    fn make_char_examples() {
        let c = chi221();
        assert_eq!(c.conductor(), 221);
        assert_eq!(c.parity(), 1);
        let t = QuadChar::parse(221, "").unwrap();
        assert!(t.is_trivial());
        assert_eq!(t.conductor(), 1);
        let c12 = QuadChar::parse(12, "m4,p3").unwrap();
        assert_eq!(c12.conductor(), 12);
        assert_eq!(c12.parity(), 1);
    }

    #[test]
    fn make_char_errors() {
        assert!(QuadChar::parse(5, "p13").is_err());
        assert!(QuadChar::parse(6, "m4").is_err());
        assert!(QuadChar::parse(4, "p8").is_err());
        assert!(QuadChar::parse(15, "p3,p3").is_err());
        assert!(QuadChar::parse(16, "m4,p8").is_err());
        assert!(QuadChar::parse(15, "q3").is_err());
    }

    #[test]
    fn char_eval_examples() {
        let c = chi221();
        assert_eq!(c.eval(21), -1);
        assert_eq!(c.eval(1), 1);
        let total: i32 = [21, 47, 174, 200].iter().map(|&s| c.eval(s)).sum();
        assert_eq!(total, -4);
        assert_eq!(c.eval(13), 0);
    }

    #[test]
    fn list_chars_examples() {
        assert_eq!(QuadChar::list(221).unwrap().len(), 4);
        assert!(QuadChar::list(221).unwrap()[0].is_trivial());
        assert_eq!(QuadChar::list(2).unwrap().len(), 1);
        assert_eq!(QuadChar::list(8).unwrap().len(), 4);
        assert_eq!(QuadChar::list(4).unwrap().len(), 2);
    }

    #[test]
    fn fundamental_character() {
        let c = QuadChar::from_fundamental(24, -24).unwrap().unwrap();
        assert_eq!(c.two_part(), TwoPart::P8);
        assert_eq!(c.odd_primes(), &[3]);
        for r in (1..200).filter(|r| r % 2 == 1 && r % 3 != 0) {
            assert_eq!(c.eval(r), kronecker(-24, r));
        }
        assert!(QuadChar::from_fundamental(12, -8).unwrap().is_none());
    }

    #[test]
    fn atkin_lehner_examples() {
        let w13 = AlMatrix::atkin_lehner(221, 13).unwrap();
        assert_eq!((w13.a, w13.b, w13.c, w13.d), (4, 1, 3, 1));
        let wn = AlMatrix::atkin_lehner(221, 221).unwrap();
        assert_eq!((wn.a, wn.b, wn.c, wn.d), (0, -1, 1, 0));
        assert_eq!(
            AlMatrix::atkin_lehner(221, 1).unwrap(),
            AlMatrix::identity(221)
        );
        assert!(AlMatrix::atkin_lehner(12, 2).is_err());
    }

    #[test]
    fn al_mul_examples() {
        let w13 = AlMatrix::atkin_lehner(221, 13).unwrap();
        let w17 = AlMatrix::atkin_lehner(221, 17).unwrap();
        let sq = w13.mul(&w13);
        assert_eq!(sq.e, 1);
        assert_eq!(sq.det(), 1);
        let p = w13.mul(&w17);
        assert_eq!(p.e, 221);
        assert_eq!(p.det(), 1);
        let wn = AlMatrix::atkin_lehner(221, 221).unwrap();
        assert_eq!(AlMatrix::identity(221).mul(&wn), wn);
    }

    #[test]
    fn ext_eval_examples() {
        let triv = ExtChar::plus(QuadChar::trivial(221).unwrap(), Unit::ONE).unwrap();
        let wn = AlMatrix::atkin_lehner(221, 221).unwrap();
        assert_eq!(triv.eval(&wn).unwrap(), Some(Unit::ONE));
        let t = AlMatrix::gamma0(221, 1, 1, 0, 1).unwrap();
        let chi = ExtChar::plus(chi221(), Unit::MINUS_ONE).unwrap();
        assert_eq!(chi.eval(&t).unwrap(), Some(Unit::ONE));

        let star =
            ExtChar::star(chi221(), &[(13, Unit::MINUS_ONE), (17, Unit::MINUS_ONE)]).unwrap();
        let w13 = AlMatrix::atkin_lehner(221, 13).unwrap();
        let w17 = AlMatrix::atkin_lehner(221, 17).unwrap();
        let prod = w13.mul(&w17);
        let h = prod.mul(&AlMatrix::atkin_lehner(221, 221).unwrap().inverse());
        let expected = Unit::from_sign(chi221().eval(h.d as i64)) * star.w_value(221).unwrap();
        assert_eq!(star.eval(&prod).unwrap(), Some(expected));
        // the product of the two prime signs, up to the Gamma0 correction
        assert_eq!(star.eval(&prod).unwrap(), Some(Unit::ONE));
    }

    #[test]
    fn extension_counts() {
        let plus = ExtChar::extensions(&chi221(), GroupKind::Gamma0Plus).unwrap();
        let signs: Vec<Unit> = plus.iter().map(|x| x.fricke_sign().unwrap()).collect();
        assert_eq!(signs, vec![Unit::ONE, Unit::MINUS_ONE]);
        let odd = QuadChar::parse(4, "m4").unwrap();
        let plus = ExtChar::extensions(&odd, GroupKind::Gamma0Plus).unwrap();
        let signs: Vec<Unit> = plus.iter().map(|x| x.fricke_sign().unwrap()).collect();
        assert_eq!(signs, vec![Unit::I, Unit::MINUS_I]);
        assert_eq!(
            ExtChar::extensions(&chi221(), GroupKind::Gamma0Star)
                .unwrap()
                .len(),
            4
        );
        assert!(
            ExtChar::extensions(&QuadChar::trivial(12).unwrap(), GroupKind::Gamma0Star).is_err()
        );
    }

    #[test]
    fn sign_validation() {
        assert!(ExtChar::plus(chi221(), Unit::I).is_err());
        assert!(ExtChar::star(chi221(), &[(13, Unit::ONE)]).is_err());
        assert_eq!(
            parse_star_signs("13:+1,17:-1").unwrap(),
            vec![(13, Unit::ONE), (17, Unit::MINUS_ONE)]
        );
    }

    #[test]
    fn star_obstruction_matches_commutators() {
        assert_eq!(
            star_obstruction(&QuadChar::parse(15, "p3").unwrap()),
            Some((3, 5))
        );
        assert_eq!(star_obstruction(&chi221()), None);
        assert!(
            ExtChar::extensions(&QuadChar::parse(65, "p5").unwrap(), GroupKind::Gamma0Star)
                .is_err()
        );
        for n in 2..200u64 {
            let fact = factorize(n as i64).unwrap();
            if !fact.is_squarefree() {
                continue;
            }
            let primes: Vec<u64> = fact.primes().collect();
            for chi in QuadChar::list(n).unwrap() {
                let mut clean = true;
                for &p in &primes {
                    for &q in &primes {
                        let wp = AlMatrix::atkin_lehner(n, p).unwrap();
                        let wq = AlMatrix::atkin_lehner(n, q).unwrap();
                        let comm = wp.mul(&wq).mul(&wp.inverse()).mul(&wq.inverse());
                        assert_eq!(comm.e, 1);
                        clean &= chi.eval_unit(comm.d as i64) == Some(Unit::ONE);
                    }
                }
                assert_eq!(
                    star_obstruction(&chi).is_none(),
                    clean,
                    "N = {n}, chi = {chi}"
                );
            }
        }
    }
}
