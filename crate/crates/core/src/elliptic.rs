//! Character sums over elliptic points of `Gamma0(N)`, `Gamma0+(N)` and
//! `Gamma0*(N)`.
//!
//! Elliptic elements of order 2 in a coset `W_e Gamma0(N)` have trace zero
//! and correspond to `Gamma0(N)`-classes of positive definite forms
//! `(A, B, C)` of discriminant `-4e` with `N | A` and `2e | B`. Those classes
//! are enumerated exactly: a class is an `SL2(Z)`-class `Q` of discriminant
//! `-4e` together with a point of `P^1(Z/N)` on which `Q` vanishes, modulo
//! the automorphisms of `Q`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;

use crate::arith::{crt, ext_gcd, factorize, inv_mod, kronecker, sqrt_mod, Factorization};
use crate::characters::{AlMatrix, ExtChar, GroupKind, QuadChar, Unit};
use crate::error::{Error, Result};
use crate::qforms::{
    all_reduced_forms, class_number, fundamental_part, mat_inv, reduced_forms, represented_value,
    Mat2, QForm,
};

/// A Gaussian integer `re + im i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GaussInt {
    pub re: i64,
    pub im: i64,
}

impl GaussInt {
    pub const ZERO: GaussInt = GaussInt { re: 0, im: 0 };

    pub const fn new(re: i64, im: i64) -> GaussInt {
        GaussInt { re, im }
    }

    pub fn real(re: i64) -> GaussInt {
        GaussInt { re, im: 0 }
    }

    pub fn scale(self, s: i64) -> GaussInt {
        GaussInt::new(self.re * s, self.im * s)
    }

    /// Exact division by a positive integer.
    pub fn div_exact(self, d: i64) -> Result<GaussInt> {
        if self.re % d != 0 || self.im % d != 0 {
            return Err(Error::Inconsistent(format!(
                "{self} is not divisible by {d}"
            )));
        }
        Ok(GaussInt::new(self.re / d, self.im / d))
    }
}

impl From<Unit> for GaussInt {
    fn from(u: Unit) -> GaussInt {
        let (re, im) = u.parts();
        GaussInt { re, im }
    }
}

impl Add for GaussInt {
    type Output = GaussInt;
    fn add(self, rhs: GaussInt) -> GaussInt {
        GaussInt::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl AddAssign for GaussInt {
    fn add_assign(&mut self, rhs: GaussInt) {
        *self = *self + rhs;
    }
}

impl Sub for GaussInt {
    type Output = GaussInt;
    fn sub(self, rhs: GaussInt) -> GaussInt {
        GaussInt::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for GaussInt {
    type Output = GaussInt;
    fn neg(self) -> GaussInt {
        GaussInt::new(-self.re, -self.im)
    }
}

impl Mul<Unit> for GaussInt {
    type Output = GaussInt;
    fn mul(self, u: Unit) -> GaussInt {
        let (c, d) = u.parts();
        GaussInt::new(self.re * c - self.im * d, self.re * d + self.im * c)
    }
}

impl fmt::Display for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (re, 0) => write!(f, "{re}"),
            (0, im) => write!(f, "{im}i"),
            (re, im) if im < 0 => write!(f, "{re}-{}i", -im),
            (re, im) => write!(f, "{re}+{im}i"),
        }
    }
}

/// `A4(N)`: roots of `s^2 + 1 = 0 (mod N)`.
pub fn a4_roots(n: u64) -> Vec<u64> {
    sqrt_mod(-1, n)
}

/// `A3(N)`: roots of `s^2 + s + 1 = 0 (mod N)`, ascending.
pub fn a3_roots(n: u64) -> Vec<u64> {
    // (2s + 1)^2 = -3 (mod 4N)
    let mut out: Vec<u64> = sqrt_mod(-3, 4 * n)
        .into_iter()
        .filter(|t| t % 2 == 1)
        .map(|t| ((t - 1) / 2) % n)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// `nu2(chi)`: sum of `chi(s)` over `A4(N)`.
pub fn nu2(chi: &QuadChar) -> i64 {
    a4_roots(chi.level())
        .into_iter()
        .map(|s| chi.eval(s as i64) as i64)
        .sum()
}

/// `nu3(chi)`: sum of `chi(s)` over `A3(N)`.
pub fn nu3(chi: &QuadChar) -> i64 {
    a3_roots(chi.level())
        .into_iter()
        .map(|s| chi.eval(s as i64) as i64)
        .sum()
}

/// Orbits of size two of `s -> -1 - s` on `A3(N)`, as `(s, s')` with `s < s'`.
pub fn a3_orbits(n: u64) -> Vec<(u64, u64)> {
    let roots = a3_roots(n);
    roots
        .iter()
        .filter_map(|&s| {
            let t = (2 * n - 1 - s) % n;
            (s < t).then_some((s, t))
        })
        .collect()
}

fn expect_kind(chi: &ExtChar, kind: GroupKind) -> Result<()> {
    if chi.kind() != kind {
        return Err(Error::InvalidInput(format!(
            "expected a {} character, got {}",
            kind.name(),
            chi.kind().name()
        )));
    }
    Ok(())
}

/// `nu3+(chi+)`: sum over the free orbits of `A3(N)`.
pub fn nu3_plus(chi: &ExtChar) -> Result<i64> {
    expect_kind(chi, GroupKind::Gamma0Plus)?;
    Ok(a3_orbits(chi.level())
        .into_iter()
        .map(|(s, _)| chi.base().eval(s as i64) as i64)
        .sum())
}

/// Number of order-2 points of `Gamma0+(N)` fixed by `W_N Gamma0(N)`, `N >= 4`.
pub fn extra_count_plus(n: u64) -> Result<u64> {
    if n < 4 {
        return Err(Error::InvalidInput(format!(
            "extra order-2 count needs N >= 4, got {n}"
        )));
    }
    let d = 4 * n as i64;
    let mut h = class_number(-d)?;
    if n % 4 == 3 {
        h += class_number(-(n as i64))?;
    }
    Ok(h)
}

/// Which closed-form branch `nu2_plus` used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nu2PlusCase {
    /// `N = 2` or `3`: a single point fixed by `W_N`.
    Small,
    /// `chi` is trivial: every extra point contributes `epsilon`.
    Trivial,
    /// `chi` is the Kronecker character of the fundamental part of `-4N`.
    GenusCharacter,
    /// The extra points cancel in pairs of opposite genus sign.
    Cancelling,
}

/// Closed form of `nu2+(chi+)` and the branch that produced it.
pub fn nu2_plus_with_case(chi: &ExtChar) -> Result<(GaussInt, Nu2PlusCase)> {
    expect_kind(chi, GroupKind::Gamma0Plus)?;
    let n = chi.level();
    let eps = chi.fricke_sign().expect("plus character carries a sign");
    if n <= 3 {
        return Ok((GaussInt::from(eps), Nu2PlusCase::Small));
    }
    let base = chi.base();
    let half = GaussInt::real(nu2(base)).div_exact(2)?;
    let case = if base.is_trivial() {
        Nu2PlusCase::Trivial
    } else {
        let (fund, _) = fundamental_part(-4 * n as i64)?;
        match QuadChar::from_fundamental(n, fund)? {
            Some(psi) if &psi == base => Nu2PlusCase::GenusCharacter,
            _ => Nu2PlusCase::Cancelling,
        }
    };
    if case == Nu2PlusCase::Cancelling {
        return Ok((half, case));
    }
    let mut extra = class_number(-4 * n as i64)? as i64;
    if n % 4 == 3 {
        extra += base.eval(2) as i64 * class_number(-(n as i64))? as i64;
    }
    Ok((half + GaussInt::from(eps).scale(extra), case))
}

/// `nu2+(chi+)`.
pub fn nu2_plus(chi: &ExtChar) -> Result<GaussInt> {
    nu2_plus_with_case(chi).map(|(v, _)| v)
}

/// `nu2+(chi+)` from class enumeration of discriminants `-4N` and `-N`.
pub fn nu2_plus_oracle(chi: &ExtChar) -> Result<GaussInt> {
    expect_kind(chi, GroupKind::Gamma0Plus)?;
    let n = chi.level();
    if n < 4 {
        return Err(Error::InvalidInput("oracle needs N >= 4".into()));
    }
    let base = chi.base();
    let eps = chi.fricke_sign().expect("plus character carries a sign");
    let m = 4 * n * base.conductor();
    let class_sum = |d: i64| -> Result<i64> {
        reduced_forms(d)?
            .iter()
            .map(|q| Ok(base.eval(represented_value(q, m)? as i64) as i64))
            .sum()
    };
    let mut extra = class_sum(-4 * n as i64)?;
    if n % 4 == 3 {
        extra += base.eval(2) as i64 * class_sum(-(n as i64))?;
    }
    let half = GaussInt::real(nu2(base)).div_exact(2)?;
    Ok(half + GaussInt::from(eps).scale(extra))
}

/// Subfamily of a trace-zero class: primitive forms of discriminant `-4e`,
/// or twice a primitive form of discriminant `-e` (only for `e = 3 mod 4`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subfamily {
    Primitive,
    Half,
}

/// A `Gamma0(N)`-conjugacy class of trace-zero elements of `W_e Gamma0(N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EllipticClass {
    pub e: u64,
    /// `B mod 2N` of the attached forms.
    pub rho: u64,
    pub subfamily: Subfamily,
    /// Reduced `SL2(Z)` representative.
    pub reduced: QForm,
    /// A form of the class with `N | A`; the element is read off from it.
    pub form: QForm,
    /// Normalized element: positive lower-left entry.
    pub element: AlMatrix,
    pub key: ClassKey,
}

/// Canonical label of a `Gamma0(N)`-class of forms with `N | A`.
pub type ClassKey = (QForm, (u64, u64));

fn local_units(p: u64, v: u32) -> u64 {
    p.pow(v)
}

/// Canonical representative of a point of `P^1(Z/N)`.
fn p1_canonical(x: i128, y: i128, fact: &Factorization) -> (u64, u64) {
    if fact.n() == 1 {
        return (0, 0);
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(p, v) in fact.factors() {
        let q = local_units(p, v) as i128;
        let (lx, ly) = (x.rem_euclid(q), y.rem_euclid(q));
        if ly % p as i128 != 0 {
            let inv = inv_mod(ly, q).unwrap();
            xs.push(((lx * inv).rem_euclid(q), q));
            ys.push((1, q));
        } else {
            let inv = inv_mod(lx, q).expect("point of P^1 must be primitive");
            xs.push((1, q));
            ys.push(((ly * inv).rem_euclid(q), q));
        }
    }
    (crt(&xs).0 as u64, crt(&ys).0 as u64)
}

type Residues = Vec<(i128, i128)>;

/// Points of `P^1(Z/N)` where `q` vanishes mod `N`, canonical representatives.
fn p1_zeros(q: &QForm, fact: &Factorization) -> Vec<(u64, u64)> {
    if fact.n() == 1 {
        return vec![(0, 0)];
    }
    let mut combos: Vec<(Residues, Residues)> = vec![(Vec::new(), Vec::new())];
    for &(p, v) in fact.factors() {
        let modulus = local_units(p, v) as i128;
        let value = |x: i128, y: i128| {
            (q.a as i128 * x * x + q.b as i128 * x * y + q.c as i128 * y * y).rem_euclid(modulus)
        };
        let mut local: Vec<(i128, i128)> = (0..modulus)
            .map(|t| (t, 1))
            .filter(|&(x, y)| value(x, y) == 0)
            .collect();
        let p = p as i128;
        local.extend(
            (0..modulus / p)
                .map(|s| (1, p * s))
                .filter(|&(x, y)| value(x, y) == 0),
        );
        if local.is_empty() {
            return Vec::new();
        }
        combos = combos
            .into_iter()
            .flat_map(|(xs, ys)| {
                local.iter().map(move |&(x, y)| {
                    let mut xs = xs.clone();
                    let mut ys = ys.clone();
                    xs.push((x, modulus));
                    ys.push((y, modulus));
                    (xs, ys)
                })
            })
            .collect();
    }
    combos
        .iter()
        .map(|(xs, ys)| (crt(xs).0 as u64, crt(ys).0 as u64))
        .collect()
}

/// Coprime integers `(x, y)` reducing to the given point mod `N`.
fn p1_lift(point: (u64, u64), n: u64) -> (i128, i128) {
    if n == 1 {
        return (1, 0);
    }
    let n = n as i128;
    let (x0, y0) = (point.0 as i128, point.1 as i128);
    let y = if y0 == 0 { n } else { y0 };
    let mut x = x0;
    while x.gcd(&y) != 1 {
        x += n;
    }
    (x, y)
}

/// Matrix in `SL2(Z)` with first column `(x, y)`.
fn complete(x: i128, y: i128) -> Mat2 {
    let (g, s, t) = ext_gcd(x, y);
    debug_assert_eq!(g, 1);
    [x, -t, y, s]
}

/// Canonical key of the `Gamma0(N)`-class of a form with `N | A`.
pub fn class_key(form: &QForm, fact: &Factorization) -> Result<ClassKey> {
    let (reduced, g) = form.reduce_tracked()?;
    // form = reduced . g^-1
    let gi = mat_inv(&g);
    let point = p1_canonical(gi[0], gi[2], fact);
    Ok((reduced, orbit_min(&reduced, point, fact)))
}

fn orbit_min(reduced: &QForm, point: (u64, u64), fact: &Factorization) -> (u64, u64) {
    let Some((sigma, order)) = reduced.automorphism() else {
        return point;
    };
    let mut best = point;
    let mut cur = (point.0 as i128, point.1 as i128);
    for _ in 1..order {
        cur = (
            sigma[0] * cur.0 + sigma[1] * cur.1,
            sigma[2] * cur.0 + sigma[3] * cur.1,
        );
        best = best.min(p1_canonical(cur.0, cur.1, fact));
    }
    best
}

fn element_of_form(form: &QForm, n: u64, e: u64) -> Result<AlMatrix> {
    let (a_big, b_big, c_big) = (form.a as i128, form.b as i128, form.c as i128);
    let (n_i, e_i) = (n as i128, e as i128);
    if a_big % n_i != 0 || b_big % (2 * e_i) != 0 {
        return Err(Error::Inconsistent(format!(
            "form {form} is not attached to W_{e} at level {n}"
        )));
    }
    let a = -b_big / (2 * e_i);
    AlMatrix::new(n, e, a, -c_big, a_big / n_i, -a)
}

/// The form `(cN, -2ae, -b)` fixed by a trace-zero element.
pub fn form_of_element(m: &AlMatrix) -> Result<QForm> {
    if m.a + m.d != 0 {
        return Err(Error::InvalidInput(
            "element does not have trace zero".into(),
        ));
    }
    let to = |x: i128| i64::try_from(x).map_err(|_| Error::InternalLimit("entry overflow".into()));
    Ok(QForm::new(
        to(m.c * m.level as i128)?,
        to(-2 * m.a * m.e as i128)?,
        to(-m.b)?,
    ))
}

fn check_hall(n: u64, e: u64) -> Result<Factorization> {
    let fact = factorize(n as i64)?;
    if e == 0 || !n.is_multiple_of(e) || e.gcd(&(n / e)) != 1 {
        return Err(Error::NotHallDivisor { n, e });
    }
    Ok(fact)
}

fn enumerate_classes(n: u64, e: u64) -> Result<Vec<EllipticClass>> {
    let fact = check_hall(n, e)?;
    let mut out = Vec::new();
    for q in all_reduced_forms(-4 * e as i64)? {
        let content = q.content();
        let subfamily = match content {
            1 => Subfamily::Primitive,
            2 => Subfamily::Half,
            _ => continue,
        };
        let mut seen = BTreeSet::new();
        for point in p1_zeros(&q, &fact) {
            let orbit = orbit_min(&q, point, &fact);
            if !seen.insert(orbit) {
                continue;
            }
            let (x, y) = p1_lift(orbit, n);
            let form = q.transform(&complete(x, y))?;
            debug_assert_eq!(form.a % n as i64, 0);
            if form.b % (2 * e as i64) != 0 {
                continue;
            }
            let element = element_of_form(&form, n, e)?;
            out.push(EllipticClass {
                e,
                rho: form.b.rem_euclid(2 * n as i64) as u64,
                subfamily,
                reduced: q,
                form,
                element,
                key: (q, orbit),
            });
        }
    }
    Ok(out)
}

/// All classes of trace-zero elements of `W_e Gamma0(N)` (memoized).
pub fn trace_zero_classes(n: u64, e: u64) -> Result<Arc<Vec<EllipticClass>>> {
    type Cache = Mutex<HashMap<(u64, u64), Arc<Vec<EllipticClass>>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(&(n, e)) {
        return Ok(v.clone());
    }
    let classes = Arc::new(enumerate_classes(n, e)?);
    let mut guard = cache.lock().unwrap();
    if guard.len() > 1 << 14 {
        guard.clear();
    }
    guard.insert((n, e), classes.clone());
    Ok(classes)
}

/// Classes of extra order-2 elliptic elements in `W_e Gamma0(N)` for
/// square-free `N` and `e > 1`.
pub fn star_elliptic_classes(n: u64, e: u64) -> Result<Arc<Vec<EllipticClass>>> {
    let fact = check_hall(n, e)?;
    if !fact.is_squarefree() {
        return Err(Error::NotSquareFree(n));
    }
    if e == 1 {
        return Err(Error::InvalidInput("star classes need e > 1".into()));
    }
    trace_zero_classes(n, e)
}

/// `#{rho mod 2N : rho^2 = -4e (mod 4N)} * h(-4e)`, the primitive class count.
pub fn expected_primitive_count(n: u64, e: u64) -> Result<u64> {
    check_hall(n, e)?;
    let roots = sqrt_mod(-4 * e as i64, 4 * n)
        .into_iter()
        .filter(|r| *r < 2 * n)
        .count() as u64;
    Ok(roots * class_number(-4 * e as i64)?)
}

/// Independent enumeration of the trace-zero classes: scan `a`, factor
/// `-bc = (a^2 e + 1)/(N/e)` and collect class keys, doubling the scan bound
/// until `target` keys are found.
pub fn scan_class_keys(n: u64, e: u64, target: usize) -> Result<BTreeSet<ClassKey>> {
    let fact = check_hall(n, e)?;
    let ne = (n / e) as i128;
    let e_i = e as i128;
    let mut bound = (4.0 * (n as f64).sqrt()).ceil() as i128;
    let mut keys = BTreeSet::new();
    let mut scanned: i128 = -1;
    loop {
        for a in (scanned + 1)..=bound {
            for a in [a, -a] {
                let m = a * a * e_i + 1;
                if m % ne != 0 {
                    continue;
                }
                let m = m / ne;
                for c in factorize(m as i64)?.divisors() {
                    let c = c as i128;
                    let el = AlMatrix::new(n, e, a, -(m / c), c, -a)?;
                    keys.insert(class_key(&form_of_element(&el)?, &fact)?);
                }
                if a == 0 {
                    break;
                }
            }
        }
        scanned = bound;
        if keys.len() >= target {
            return Ok(keys);
        }
        if bound >= 1 << 20 {
            return Err(Error::InternalLimit(format!(
                "scan for W_{e} classes at level {n} found {} of {target}",
                keys.len()
            )));
        }
        bound = (2 * bound).min(1 << 20);
    }
}

/// `sum chi*(gamma)` over the classes of `W_e Gamma0(N)`, by direct evaluation.
pub fn star_class_sum(chi: &ExtChar, e: u64) -> Result<GaussInt> {
    let classes = trace_zero_classes(chi.level(), e)?;
    let mut total = GaussInt::ZERO;
    for class in classes.iter() {
        let v = chi.eval(&class.element)?.ok_or_else(|| {
            Error::Inconsistent(format!("non-unit character value on {:?}", class.element))
        })?;
        total += GaussInt::from(v);
    }
    Ok(total)
}

/// The same sum from the genus-character closed form
/// `chi*(W_e) s_e sum kappa(rho) chi_e(class)`.
pub fn star_class_sum_closed(chi: &ExtChar, e: u64) -> Result<GaussInt> {
    expect_kind(chi, GroupKind::Gamma0Star)?;
    let n = chi.level();
    let base = chi.base();
    let f = base.conductor();
    let ne = n / e;
    let e_primes: Vec<u64> = factorize(f.gcd(&e) as i64)?.primes().collect();
    let ne_primes: Vec<u64> = factorize(f.gcd(&ne) as i64)?.primes().collect();
    let sign: i64 = if e == n {
        1
    } else {
        e_primes.iter().map(|&p| base.local(p, -1) as i64).product()
    };
    let mut total = 0i64;
    for class in trace_zero_classes(n, e)?.iter() {
        let a = -(class.form.b as i128) / (2 * e as i128);
        let kappa: i64 = ne_primes
            .iter()
            .map(|&p| kronecker((-a).rem_euclid(p as i128) as i64, p as i64) as i64)
            .product();
        let (form, twist) = match class.subfamily {
            Subfamily::Primitive => (class.reduced, 1i64),
            Subfamily::Half => (
                QForm::new(
                    class.reduced.a / 2,
                    class.reduced.b / 2,
                    class.reduced.c / 2,
                ),
                e_primes
                    .iter()
                    .map(|&p| kronecker(2, p as i64) as i64)
                    .product(),
            ),
        };
        let r = represented_value(&form, 2 * n * f)? as i64;
        let chi_e: i64 = e_primes
            .iter()
            .map(|&p| kronecker(r, p as i64) as i64)
            .product();
        total += kappa * twist * chi_e;
    }
    Ok(GaussInt::from(chi.w_value(e)?).scale(sign * total))
}

/// `nu3*`: 1 when every prime of `N` is `1 mod 3`.
pub fn nu3_star(n: u64) -> Result<i64> {
    let all_one_mod_3 = factorize(n as i64)?.primes().all(|p| p % 3 == 1);
    Ok(all_one_mod_3 as i64)
}

/// `delta8*`: `2 | N` and every odd prime of `N` is `1 mod 4`.
pub fn delta8_star(n: u64) -> Result<bool> {
    let odd_ok = factorize(n as i64)?
        .primes()
        .filter(|&p| p != 2)
        .all(|p| p % 4 == 1);
    Ok(n.is_multiple_of(2) && odd_ok)
}

/// `delta12*`: `3 | N` and every other prime of `N` is `1 mod 3`.
pub fn delta12_star(n: u64) -> Result<bool> {
    let rest_ok = factorize(n as i64)?
        .primes()
        .filter(|&p| p != 3)
        .all(|p| p % 3 == 1);
    Ok(n.is_multiple_of(3) && rest_ok)
}

/// Generator with positive lower-left entry of the stabilizer of an elliptic
/// point of order 4 (`e = 2`) or 6 (`e = 3`) lying in `W_e Gamma0(N)`:
/// trace `-sqrt(e)`, so `a + d = -1` and `c = 1`.
pub fn high_order_generator(n: u64, e: u64) -> Result<Option<AlMatrix>> {
    if e != 2 && e != 3 {
        return Err(Error::InvalidInput(format!("no order-{} generator", 2 * e)));
    }
    if !n.is_multiple_of(e) || (n / e).is_multiple_of(e) {
        return Ok(None);
    }
    let ne = (n / e) as i128;
    let e_i = e as i128;
    for a in 0..ne.max(1) {
        // e a d - b N/e = 1 with d = -1 - a
        let num = -e_i * a * (1 + a) - 1;
        if num % ne == 0 {
            return AlMatrix::new(n, e, a, num / ne, 1, -1 - a).map(Some);
        }
    }
    Ok(None)
}

/// The cube of the order-6 generator: the trace-zero element of `W_3
/// Gamma0(N)` whose fixed point is the order-6 point, sign-normalized.
pub fn order6_involution(n: u64) -> Result<Option<AlMatrix>> {
    let Some(g) = high_order_generator(n, 3)? else {
        return Ok(None);
    };
    let cube = g.mul(&g).mul(&g);
    if cube.trace_coefficient() != 0 {
        return Err(Error::Inconsistent(
            "cube of order-6 generator has trace".into(),
        ));
    }
    Ok(Some(if cube.c > 0 { cube } else { cube.neg() }))
}

/// `nu2*(chi*)`.
pub fn nu2_star(chi: &ExtChar) -> Result<GaussInt> {
    expect_kind(chi, GroupKind::Gamma0Star)?;
    let n = chi.level();
    let fact = factorize(n as i64)?;
    if !fact.is_squarefree() {
        return Err(Error::NotSquareFree(n));
    }
    let w = 1i64 << fact.omega();
    let mut numer = GaussInt::ZERO;
    if n % 2 == 1 {
        numer += GaussInt::real(nu2(chi.base()));
    }
    for e in fact.hall_divisors().into_iter().skip(1) {
        numer += star_class_sum(chi, e)?.scale(2);
    }
    let mut total = numer.div_exact(w)?;
    if delta12_star(n)? {
        let inv = order6_involution(n)?.expect("delta12 guarantees an order-6 point");
        let u = chi
            .eval(&inv)?
            .ok_or_else(|| Error::Inconsistent("non-unit value at order-6 point".into()))?;
        total = total - GaussInt::from(u);
    }
    Ok(total)
}

/// Sum over the classes of every `e > 1` of `chi*`, the `G*_1` part of `nu2*`
/// before the `2^(1 - omega)` scaling.
pub fn star_extra_sum(chi: &ExtChar) -> Result<GaussInt> {
    expect_kind(chi, GroupKind::Gamma0Star)?;
    let fact = factorize(chi.level() as i64)?;
    let mut total = GaussInt::ZERO;
    for e in fact.hall_divisors().into_iter().skip(1) {
        total += star_class_sum(chi, e)?;
    }
    Ok(total)
}
