//! Exact integer utilities: factorization, Kronecker symbols and square roots
//! of residues modulo composite integers.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_integer::Integer;

use crate::error::{Error, Result};

const TRIAL_BOUND: u64 = 1 << 20;

/// Canonical prime factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    /// `(p, v_p)` pairs with `p` ascending.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Number of distinct prime divisors.
    pub fn omega(&self) -> u32 {
        self.factors.len() as u32
    }

    pub fn valuation(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, v)| v)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, v)| v == 1)
    }

    /// Euler's totient.
    pub fn phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, v)| (p - 1) * p.pow(v - 1))
            .product()
    }

    /// Product of the distinct primes.
    pub fn radical(&self) -> u64 {
        self.factors.iter().map(|&(p, _)| p).product()
    }

    /// All divisors, ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, v) in &self.factors {
            let current = divs.clone();
            let mut pk = 1;
            for _ in 0..v {
                pk *= p;
                divs.extend(current.iter().map(|d| d * pk));
            }
        }
        divs.sort_unstable();
        divs
    }

    /// Hall divisors `e || n` (`gcd(e, n/e) = 1`), ascending.
    pub fn hall_divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, v) in &self.factors {
            let pk = p.pow(v);
            let current = divs.clone();
            divs.extend(current.iter().map(|d| d * pk));
        }
        divs.sort_unstable();
        divs
    }
}

fn factor_cache() -> &'static Mutex<HashMap<u64, Factorization>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Factorization>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Factor `n` with trial division up to 2^20, then Miller-Rabin and Pollard rho.
pub fn factorize(n: i64) -> Result<Factorization> {
    if n <= 0 {
        return Err(Error::InvalidInput(format!(
            "cannot factor non-positive integer {n}"
        )));
    }
    let n = n as u64;
    if let Some(f) = factor_cache().lock().unwrap().get(&n) {
        return Ok(f.clone());
    }
    let f = factorize_uncached(n);
    let mut cache = factor_cache().lock().unwrap();
    if cache.len() > 1 << 16 {
        cache.clear();
    }
    cache.insert(n, f.clone());
    Ok(f)
}

fn factorize_uncached(n: u64) -> Factorization {
    let mut rest = n;
    let mut primes: Vec<u64> = Vec::new();
    let mut d = 2u64;
    while d < TRIAL_BOUND && d * d <= rest {
        while rest.is_multiple_of(d) {
            primes.push(d);
            rest /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        split_large(rest, &mut primes);
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, v)) if *q == p => *v += 1,
            _ => factors.push((p, 1)),
        }
    }
    Factorization { n, factors }
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    split_large(d, out);
    split_large(n / d, out);
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Kronecker symbol `(a / n)` with the full extension to even, zero and
/// negative `n`.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let twos = n.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
        n >>= twos;
    }
    result * jacobi(a, n)
}

/// Jacobi symbol for odd positive `n`.
pub fn jacobi(a: i64, n: i64) -> i32 {
    debug_assert!(n > 0 && n % 2 == 1);
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut result = 1i32;
    while a != 0 {
        let twos = a.trailing_zeros();
        a >>= twos;
        if twos % 2 == 1 && matches!(n % 8, 3 | 5) {
            result = -result;
        }
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: i128, m: i128) -> Option<i128> {
    let (g, x, _) = ext_gcd(a.rem_euclid(m), m);
    (g == 1).then(|| x.rem_euclid(m))
}

/// Combine residues `r_i mod m_i` for pairwise coprime moduli.
pub fn crt(residues: &[(i128, i128)]) -> (i128, i128) {
    residues.iter().fold((0i128, 1i128), |(r, m), &(ri, mi)| {
        let inv = inv_mod(m, mi).expect("crt moduli must be coprime");
        let t = ((ri - r).rem_euclid(mi) * inv).rem_euclid(mi);
        (r + m * t, m * mi)
    })
}

/// Tonelli-Shanks square root modulo an odd prime, for a quadratic residue.
fn sqrt_mod_prime(a: u64, p: u64) -> u64 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if p % 4 == 3 {
        return pow_mod(a, (p + 1) / 4, p);
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2u64;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    r
}

/// Roots of `x^2 = d (mod p^v)` for an odd prime `p`.
fn sqrt_mod_odd_prime_power(d: i128, p: u64, v: u32) -> Vec<i128> {
    let p_i = p as i128;
    let pv = p_i.pow(v);
    let d = d.rem_euclid(pv);
    if d == 0 {
        // x = 0 mod p^ceil(v/2)
        let step = p_i.pow(v.div_ceil(2));
        return (0..pv / step).map(|j| j * step).collect();
    }
    let mut t = 0u32;
    let mut unit = d;
    while unit % p_i == 0 {
        unit /= p_i;
        t += 1;
    }
    if t % 2 == 1 {
        return Vec::new();
    }
    let s = t / 2;
    let w = v - t;
    // y^2 = unit (mod p^w) with unit prime to p
    if pow_mod((unit % p_i) as u64, (p - 1) / 2, p) != 1 {
        return Vec::new();
    }
    let mut y = sqrt_mod_prime((unit % p_i) as u64, p) as i128;
    let mut modulus = p_i;
    for _ in 1..w {
        // Hensel step
        let next = modulus * p_i;
        let f = (y * y - unit).rem_euclid(next);
        let inv = inv_mod(2 * y, next).unwrap();
        y = (y - f * inv).rem_euclid(next);
        modulus = next;
    }
    let pw = p_i.pow(w);
    let ps = p_i.pow(s);
    let mut roots = Vec::new();
    for y0 in [y, (pw - y) % pw] {
        // y is determined mod p^w; x = p^s * y is determined mod p^(w+s)
        let lifts = p_i.pow(v - w - s);
        for j in 0..lifts {
            roots.push((ps * (y0 + j * pw)).rem_euclid(pv));
        }
    }
    roots.sort_unstable();
    roots.dedup();
    roots
}

/// Roots of `x^2 = d (mod 2^v)` by digit-by-digit lifting.
fn sqrt_mod_two_power(d: i128, v: u32) -> Vec<i128> {
    let mut roots: Vec<i128> = vec![0];
    let mut modulus = 1i128;
    for _ in 0..v {
        let next = modulus * 2;
        let target = d.rem_euclid(next);
        roots = roots
            .iter()
            .flat_map(|&x| [x, x + modulus])
            .filter(|&x| (x * x).rem_euclid(next) == target)
            .collect();
        modulus = next;
        if roots.is_empty() {
            break;
        }
    }
    roots
}

/// All residues `r` in `[0, m)` with `r^2 = d (mod m)`, ascending.
pub fn sqrt_mod(d: i64, m: u64) -> Vec<u64> {
    if m == 1 {
        return vec![0];
    }
    let fact = factorize(m as i64).expect("modulus must be positive");
    let mut per_prime: Vec<(Vec<i128>, i128)> = Vec::new();
    for &(p, v) in fact.factors() {
        let roots = if p == 2 {
            sqrt_mod_two_power(d as i128, v)
        } else {
            sqrt_mod_odd_prime_power(d as i128, p, v)
        };
        if roots.is_empty() {
            return Vec::new();
        }
        per_prime.push((roots, (p as i128).pow(v)));
    }
    let mut combos: Vec<Vec<(i128, i128)>> = vec![Vec::new()];
    for (roots, modulus) in &per_prime {
        combos = combos
            .into_iter()
            .flat_map(|prefix| {
                roots.iter().map(move |&r| {
                    let mut next = prefix.clone();
                    next.push((r, *modulus));
                    next
                })
            })
            .collect();
    }
    let mut out: Vec<u64> = combos.iter().map(|c| crt(c).0 as u64).collect();
    out.sort_unstable();
    out
}

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization_examples() {
        assert_eq!(factorize(221).unwrap().factors(), &[(13, 1), (17, 1)]);
        assert!(factorize(1).unwrap().factors().is_empty());
        assert_eq!(
            factorize(884).unwrap().factors(),
            &[(2, 2), (13, 1), (17, 1)]
        );
        assert!(factorize(0).is_err());
        assert!(factorize(-5).is_err());
    }

    #[test]
    fn large_semiprime_splits() {
        let p = 1_000_003u64;
        let q = 1_000_033u64;
        let f = factorize((p * q) as i64).unwrap();
        assert_eq!(f.factors(), &[(p, 1), (q, 1)]);
        let big = 9_223_372_036_854_775_783u64; // largest prime below 2^63
        assert!(is_prime(big));
        assert_eq!(factorize(big as i64).unwrap().factors(), &[(big, 1)]);
    }

    #[test]
    fn derived_accessors() {
        let f = factorize(360).unwrap();
        assert_eq!(f.omega(), 3);
        assert_eq!(f.phi(), 96);
        assert!(!f.is_squarefree());
        assert_eq!(f.valuation(2), 3);
        assert_eq!(f.hall_divisors(), vec![1, 5, 8, 9, 40, 45, 72, 360]);
        assert_eq!(f.divisors().len(), 24);
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(21, 221), -1);
        assert_eq!(kronecker(2, 13), -1);
        for a in -20..20 {
            assert_eq!(kronecker(a, 1), 1);
        }
        assert_eq!(kronecker(-1, -1), -1);
        assert_eq!(kronecker(3, 0), 0);
        assert_eq!(kronecker(5, 8), -1);
        assert_eq!(kronecker(7, 8), 1);
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        for p in [3i64, 5, 7, 11, 13, 101, 997] {
            for a in -50..50i64 {
                let e = pow_mod(a.rem_euclid(p) as u64, ((p - 1) / 2) as u64, p as u64);
                let expected = match e {
                    0 => 0,
                    1 => 1,
                    _ => -1,
                };
                assert_eq!(kronecker(a, p), expected, "({a}/{p})");
            }
        }
    }

    #[test]
    fn sqrt_mod_examples() {
        assert_eq!(sqrt_mod(-1, 65), vec![8, 18, 47, 57]);
        assert_eq!(sqrt_mod(0, 7), vec![0]);
        assert!(sqrt_mod(-1, 7).is_empty());
        assert_eq!(sqrt_mod(-1, 221), vec![21, 47, 174, 200]);
    }

    #[test]
    fn sqrt_mod_matches_exhaustive_search() {
        for m in 1..400u64 {
            for d in [-4i64, -3, -1, 0, 1, 2, 4, 8, 9, 12, 18, 27] {
                let brute: Vec<u64> = (0..m)
                    .filter(|&r| ((r * r) as i64 - d).rem_euclid(m as i64) == 0)
                    .collect();
                assert_eq!(sqrt_mod(d, m), brute, "d={d} m={m}");
            }
        }
    }
}
