//! Dimension formulas for `Gamma0(N)`, `Gamma0+(N)` and `Gamma0*(N)` with a
//! quadratic character extended to the Atkin-Lehner elements.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::factorize;
use crate::characters::{ExtChar, GroupKind, QuadChar, Unit};
use crate::cusps::{cusp_count_plus, nu_inf, nu_inf_plus};
use crate::elliptic::{
    a3_orbits, a4_roots, delta12_star, delta8_star, extra_count_plus, high_order_generator, nu2,
    nu2_plus, nu2_star, nu3, nu3_plus, nu3_star, GaussInt,
};
use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

fn q(n: i64, d: i64) -> Rational {
    Ratio::new(n, d)
}

/// Exact `re + im i` with rational parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaussRat {
    pub re: Rational,
    pub im: Rational,
}

impl GaussRat {
    pub fn real(re: Rational) -> GaussRat {
        GaussRat {
            re,
            im: Rational::zero(),
        }
    }

    pub fn imag(im: Rational) -> GaussRat {
        GaussRat {
            re: Rational::zero(),
            im,
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// The real part, failing on a nonzero imaginary residue.
    pub fn into_real(self, what: &str) -> Result<Rational> {
        if self.is_real() {
            Ok(self.re)
        } else {
            Err(Error::Inconsistent(format!(
                "{what} has imaginary part {}",
                self.im
            )))
        }
    }
}

impl From<GaussInt> for GaussRat {
    fn from(z: GaussInt) -> GaussRat {
        GaussRat {
            re: z.re.into(),
            im: z.im.into(),
        }
    }
}

impl Add for GaussRat {
    type Output = GaussRat;
    fn add(self, o: GaussRat) -> GaussRat {
        GaussRat {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Sub for GaussRat {
    type Output = GaussRat;
    fn sub(self, o: GaussRat) -> GaussRat {
        GaussRat {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Mul for GaussRat {
    type Output = GaussRat;
    fn mul(self, o: GaussRat) -> GaussRat {
        GaussRat {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) if self.im.is_negative() => write!(f, "{}-{}i", self.re, -self.im),
            _ => write!(f, "{}+{}i", self.re, self.im),
        }
    }
}

const GAMMA8: [[i64; 4]; 2] = [[3, -3, -1, 1], [-1, 1, 3, -3]];

const GAMMA12: [[i64; 6]; 4] = [
    [5, -5, -3, -1, 1, 3],
    [-1, 1, 3, 5, -5, -3],
    [-3, -1, 1, 3, 5, -5],
    [3, 5, -5, -3, -1, 1],
];

/// `gamma_3`, `gamma_4`, `gamma_8`, `gamma_12` at weight `k`. The sign is the
/// value of the extended character on `W_2` (order 8) or `W_3` (order 12) and
/// is ignored for orders 3 and 4.
pub fn gamma_coeff(order: u32, k: i64, sign: Unit) -> Result<GaussRat> {
    let bad = || Error::InvalidCombination {
        order,
        k,
        sign: sign.to_string(),
    };
    match order {
        3 => Ok(GaussRat::real(match k.rem_euclid(3) {
            0 => q(1, 3),
            1 => q(0, 1),
            _ => q(-1, 3),
        })),
        4 => Ok(match k.rem_euclid(4) {
            0 => GaussRat::real(q(1, 4)),
            1 => GaussRat::imag(q(1, 4)),
            2 => GaussRat::real(q(-1, 4)),
            _ => GaussRat::imag(q(-1, 4)),
        }),
        8 => {
            if k.rem_euclid(2) != 0 || !sign.is_real() {
                return Err(bad());
            }
            let row = (sign == Unit::MINUS_ONE) as usize;
            let col = (k.rem_euclid(8) / 2) as usize;
            Ok(GaussRat::real(q(GAMMA8[row][col], 8)))
        }
        12 => {
            let r = k.rem_euclid(12);
            if (r % 2 == 0) != sign.is_real() {
                return Err(bad());
            }
            let row = match sign {
                Unit::ONE => 0,
                Unit::MINUS_ONE => 1,
                Unit::I => 2,
                _ => 3,
            };
            Ok(GaussRat::real(q(GAMMA12[row][(r / 2) as usize], 12)))
        }
        _ => Err(bad()),
    }
}

/// Contribution `mu - (m-1)/(2m)` of an elliptic point of order `m` whose
/// generator `exp(i pi (m-1)/m)` rotation carries character value `u`, where
/// `exp(2 pi i mu) = j^(2-k) conj(u)`, `0 <= mu < 1`.
pub fn local_term(m: u32, k: i64, u: Unit) -> Result<Rational> {
    // exponents in units of 2 pi / 24
    let j = match m {
        2 => 6,
        3 => 8,
        4 => 9,
        6 => 10,
        _ => {
            return Err(Error::InvalidInput(format!(
                "no elliptic points of order {m}"
            )))
        }
    };
    let e = (j * (2 - k) - 6 * u.exponent() as i64).rem_euclid(24);
    Ok(q(e, 24) - q(m as i64 - 1, 2 * m as i64))
}

fn psi(n: u64) -> Result<i64> {
    let fact = factorize(n as i64)?;
    let mut v = n as i64;
    for p in fact.primes() {
        v = v / p as i64 * (p as i64 + 1);
    }
    Ok(v)
}

/// `nu0` of the group: the index of `Gamma0(N)` in `SL2(Z)` scaled by the
/// number of Atkin-Lehner cosets.
pub fn index_nu0(kind: GroupKind, n: u64) -> Result<Rational> {
    if n == 0 {
        return Err(Error::InvalidInput("level must be positive".into()));
    }
    let base = Rational::from_integer(psi(n)?);
    match kind {
        GroupKind::Gamma0 => Ok(base),
        GroupKind::Gamma0Plus => Ok(base / 2),
        GroupKind::Gamma0Star => {
            let fact = factorize(n as i64)?;
            if !fact.is_squarefree() {
                return Err(Error::NotSquareFree(n));
            }
            Ok(base / (1i64 << fact.omega()))
        }
    }
}

/// Term breakdown of `dim S_k - dim M_(2-k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Terms {
    #[serde(with = "ratio_str")]
    pub index: Rational,
    #[serde(with = "ratio_str")]
    pub e2: Rational,
    #[serde(with = "ratio_str")]
    pub e3: Rational,
    #[serde(with = "ratio_str")]
    pub d8: Rational,
    #[serde(with = "ratio_str")]
    pub d12: Rational,
    #[serde(with = "ratio_str")]
    pub cusp: Rational,
}

impl Terms {
    pub fn total(&self) -> Rational {
        self.index + self.e2 + self.e3 + self.d8 + self.d12 + self.cusp
    }
}

mod ratio_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        text.parse::<Rational>()
            .map_err(|_| serde::de::Error::custom(format!("bad rational '{text}'")))
    }
}

fn parity_ok(chi: &ExtChar, k: i64) -> bool {
    chi.base().parity() == if k.rem_euclid(2) == 0 { 1 } else { -1 }
}

fn generator_value(chi: &ExtChar, e: u64) -> Result<Unit> {
    let g = high_order_generator(chi.level(), e)?
        .ok_or_else(|| Error::Inconsistent(format!("no order-{} point", 2 * e)))?;
    chi.eval(&g)?
        .ok_or_else(|| Error::Inconsistent("non-unit value at elliptic generator".into()))
}

/// The right-hand side of the dimension formula, term by term.
pub fn dim_terms(chi: &ExtChar, k: i64) -> Result<Terms> {
    if !parity_ok(chi, k) {
        return Err(Error::ParityMismatch(k));
    }
    let n = chi.level();
    let kind = chi.kind();
    let index = index_nu0(kind, n)? * q(k - 1, 12);
    let g4 = gamma_coeff(4, k, Unit::ONE)?;
    let g3 = gamma_coeff(3, k, Unit::ONE)?.re;
    let zero = Rational::zero();
    let (nu2_v, nu3_v, d8, d12, cusp) = match kind {
        GroupKind::Gamma0 => {
            let base = chi.base();
            let cusp = q(nu_inf(base)? as i64, 2);
            (
                GaussRat::from(GaussInt::real(nu2(base))),
                nu3(base),
                zero,
                zero,
                cusp,
            )
        }
        GroupKind::Gamma0Plus => {
            let eps = chi.fricke_sign().expect("plus character carries a sign");
            let d8 = if n == 2 {
                gamma_coeff(8, k, eps)?.re
            } else {
                zero
            };
            let d12 = if n == 3 {
                gamma_coeff(12, k, eps)?.re
            } else {
                zero
            };
            let cusp = nu_inf_plus(chi)? / 2;
            (
                GaussRat::from(nu2_plus(chi)?),
                nu3_plus(chi)?,
                d8,
                d12,
                cusp,
            )
        }
        GroupKind::Gamma0Star => {
            let d8 = if delta8_star(n)? {
                local_term(4, k, generator_value(chi, 2)?)?
            } else {
                zero
            };
            let d12 = if delta12_star(n)? {
                local_term(6, k, generator_value(chi, 3)?)?
            } else {
                zero
            };
            (
                GaussRat::from(nu2_star(chi)?),
                nu3_star(n)?,
                d8,
                d12,
                q(1, 2),
            )
        }
    };
    let e2 = (g4 * nu2_v).into_real("elliptic order-2 term")?;
    Ok(Terms {
        index,
        e2,
        e3: g3 * nu3_v,
        d8,
        d12,
        cusp: -cusp,
    })
}

/// `dim S_k(chi) - dim M_(2-k)(conj chi)`.
pub fn dim_diff(chi: &ExtChar, k: i64) -> Result<Rational> {
    dim_terms(chi, k).map(|t| t.total())
}

fn to_dim(v: Rational, what: &str) -> Result<u64> {
    if !v.is_integer() || v.is_negative() {
        return Err(Error::Inconsistent(format!("{what} evaluates to {v}")));
    }
    Ok(v.to_integer() as u64)
}

/// `dim S_k`.
pub fn dim_cusp(chi: &ExtChar, k: i64) -> Result<u64> {
    if k == 1 {
        return Err(Error::UnsupportedWeight(k));
    }
    if k <= 0 || !parity_ok(chi, k) {
        return Ok(0);
    }
    let mut v = dim_diff(chi, k)?;
    if k == 2 && chi.is_trivial() {
        v += 1;
    }
    to_dim(v, "dim S_k")
}

/// `dim M_k`, via the formula at the reflected weight `2 - k`.
pub fn dim_modular(chi: &ExtChar, k: i64) -> Result<u64> {
    if k == 1 {
        return Err(Error::UnsupportedWeight(k));
    }
    if !parity_ok(chi, k) || k < 0 {
        return Ok(0);
    }
    if k == 0 {
        return Ok(chi.is_trivial() as u64);
    }
    to_dim(-dim_diff(&chi.conj(), 2 - k)?, "dim M_k")
}

/// `dim E_k = dim M_k - dim S_k`.
pub fn dim_eisenstein(chi: &ExtChar, k: i64) -> Result<u64> {
    let m = dim_modular(chi, k)?;
    let s = dim_cusp(chi, k)?;
    m.checked_sub(s)
        .ok_or_else(|| Error::Inconsistent(format!("dim M_{k} = {m} < dim S_{k} = {s}")))
}

/// The cusp count entering the Eisenstein dimension: `nu_inf`, `nu_inf+` or 1.
pub fn cusp_term_count(chi: &ExtChar) -> Result<Rational> {
    match chi.kind() {
        GroupKind::Gamma0 => Ok((nu_inf(chi.base())? as i64).into()),
        GroupKind::Gamma0Plus => nu_inf_plus(chi),
        GroupKind::Gamma0Star => Ok(Rational::from_integer(1)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub cusp: u64,
    pub eisenstein: u64,
    pub modular: u64,
}

impl Dims {
    pub fn compute(chi: &ExtChar, k: i64) -> Result<Dims> {
        let cusp = dim_cusp(chi, k)?;
        let modular = dim_modular(chi, k)?;
        let eisenstein = dim_eisenstein(chi, k)?;
        Ok(Dims {
            cusp,
            eisenstein,
            modular,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    ParityVanishing,
    WeightUnsupported,
}

/// Everything known about one `(group, N, k, chi, signs)` query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimReport {
    pub group: GroupKind,
    pub level: u64,
    pub weight: i64,
    pub chi: String,
    pub signs: String,
    pub terms: Option<Terms>,
    pub dims: Option<Dims>,
    pub flags: Vec<Flag>,
}

impl DimReport {
    pub fn compute(chi: &ExtChar, k: i64) -> Result<DimReport> {
        let mut report = DimReport {
            group: chi.kind(),
            level: chi.level(),
            weight: k,
            chi: chi.base().spec(),
            signs: chi.sign_spec(),
            terms: None,
            dims: None,
            flags: Vec::new(),
        };
        if k == 1 {
            report.flags.push(Flag::WeightUnsupported);
            return Ok(report);
        }
        if !parity_ok(chi, k) {
            report.flags.push(Flag::ParityVanishing);
            report.dims = Some(Dims {
                cusp: 0,
                eisenstein: 0,
                modular: 0,
            });
            return Ok(report);
        }
        if k >= 2 {
            report.terms = Some(dim_terms(chi, k)?);
        }
        report.dims = Some(Dims::compute(chi, k)?);
        Ok(report)
    }

    pub fn parity_vanishing(&self) -> bool {
        self.flags.contains(&Flag::ParityVanishing)
    }
}

/// Genus of `X0+(N)` from point counts of the Fricke group.
pub fn genus_plus(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidInput("Fricke group needs N > 1".into()));
    }
    let nu2_count = if n <= 3 {
        Rational::from_integer(1)
    } else {
        q(a4_roots(n).len() as i64, 2) + extra_count_plus(n)? as i64
    };
    let nu3_count = a3_orbits(n).len() as i64;
    let mut g = index_nu0(GroupKind::Gamma0Plus, n)? / 12
        - nu2_count / 4
        - q(nu3_count, 3)
        - q(cusp_count_plus(n)? as i64, 2)
        + 1;
    if n == 2 {
        g -= q(3, 8);
    }
    if n == 3 {
        g -= q(5, 12);
    }
    to_dim(g, "genus of X0+(N)")
}

/// `dim S_k + deg D`, the space of forms with poles bounded by a cuspidal
/// divisor `D`.
pub fn riemann_roch_dim(chi: &ExtChar, k: i64, deg_d: u64) -> Result<u64> {
    if k <= 2 {
        return Err(Error::UnsupportedWeight(k));
    }
    if !parity_ok(chi, k) {
        return Err(Error::ParityMismatch(k));
    }
    Ok(dim_cusp(chi, k)? + deg_d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

impl RelationCheck {
    fn judge(name: &'static str, ok: bool, detail: String) -> RelationCheck {
        let status = if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        RelationCheck {
            name,
            status,
            detail,
        }
    }

    fn skipped(name: &'static str, why: &str) -> RelationCheck {
        RelationCheck {
            name,
            status: CheckStatus::Skipped,
            detail: why.to_string(),
        }
    }
}

fn sum_check(
    name: &'static str,
    chi: &QuadChar,
    kind: GroupKind,
    k: i64,
    whole: u64,
) -> Result<RelationCheck> {
    let parts = ExtChar::extensions(chi, kind)?
        .iter()
        .map(|c| dim_cusp(c, k))
        .collect::<Result<Vec<_>>>()?;
    let total: u64 = parts.iter().sum();
    let shown: Vec<String> = parts.iter().map(u64::to_string).collect();
    Ok(RelationCheck::judge(
        name,
        total == whole,
        format!("{whole} = {}", shown.join(" + ")),
    ))
}

/// The sum-over-extensions identities, the halving relation for
/// `N = 1 mod 4` and the `2^-omega` relation for the star group.
pub fn verify_power_relations(n: u64, chi: &QuadChar, k: i64) -> Result<Vec<RelationCheck>> {
    if chi.level() != n {
        return Err(Error::InvalidInput("character level differs from N".into()));
    }
    let whole = dim_cusp(&ExtChar::gamma0(chi.clone()), k)?;
    let fact = factorize(n as i64)?;
    let mut out = Vec::new();
    if n >= 2 {
        out.push(sum_check("sum-plus", chi, GroupKind::Gamma0Plus, k, whole)?);
    } else {
        out.push(RelationCheck::skipped("sum-plus", "N = 1"));
    }
    if n >= 2 && fact.is_squarefree() {
        out.push(sum_check("sum-star", chi, GroupKind::Gamma0Star, k, whole)?);
    } else {
        out.push(RelationCheck::skipped("sum-star", "N is not square-free"));
    }

    if n > 3 && n % 4 == 1 && !chi.is_trivial() && k >= 2 {
        let parts = ExtChar::extensions(chi, GroupKind::Gamma0Plus)?
            .iter()
            .map(|c| dim_cusp(c, k))
            .collect::<Result<Vec<_>>>()?;
        let ok = parts.iter().all(|&d| 2 * d == whole);
        out.push(RelationCheck::judge(
            "halving",
            ok,
            format!("{whole} = 2 * {:?}", parts),
        ));
    } else {
        out.push(RelationCheck::skipped(
            "halving",
            "needs N > 3, N = 1 mod 4, nontrivial chi",
        ));
    }

    let star_ok = n > 1
        && fact.is_squarefree()
        && fact.primes().all(|p| p % 4 == 1)
        && chi.conductor() == n
        && k >= 2
        && k % 2 == 0;
    if star_ok {
        let w = 1u64 << fact.omega();
        let parts = ExtChar::extensions(chi, GroupKind::Gamma0Star)?
            .iter()
            .map(|c| dim_cusp(c, k))
            .collect::<Result<Vec<_>>>()?;
        let ok = parts.iter().all(|&d| w * d == whole);
        out.push(RelationCheck::judge(
            "star-power",
            ok,
            format!("{whole} = {w} * {:?}", parts),
        ));
    } else {
        out.push(RelationCheck::skipped(
            "star-power",
            "needs square-free N, primes 1 mod 4, conductor N, even k",
        ));
    }
    Ok(out)
}
