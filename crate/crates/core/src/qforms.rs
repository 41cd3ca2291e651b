//! Positive definite binary quadratic forms: reduction, class enumeration,
//! class numbers and genus theory.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, gcd, kronecker};
use crate::error::{Error, Result};

/// The form `A x^2 + B xy + C y^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

/// An integer 2x2 matrix `[[p, q], [r, s]]` acting by `(Q.g)(x, y) = Q(px + qy, rx + sy)`.
pub type Mat2 = [i128; 4];

pub const IDENTITY: Mat2 = [1, 0, 0, 1];

pub fn mat_mul(g: &Mat2, h: &Mat2) -> Mat2 {
    [
        g[0] * h[0] + g[1] * h[2],
        g[0] * h[1] + g[1] * h[3],
        g[2] * h[0] + g[3] * h[2],
        g[2] * h[1] + g[3] * h[3],
    ]
}

/// Inverse of a determinant-one matrix.
pub fn mat_inv(g: &Mat2) -> Mat2 {
    [g[3], -g[1], -g[2], g[0]]
}

impl QForm {
    pub const fn new(a: i64, b: i64, c: i64) -> QForm {
        QForm { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn content(&self) -> i64 {
        gcd(gcd(self.a, self.b), self.c)
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    pub fn is_positive_definite(&self) -> bool {
        self.disc() < 0 && self.a > 0
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    pub fn eval(&self, x: i64, y: i64) -> i128 {
        let (x, y) = (x as i128, y as i128);
        self.a as i128 * x * x + self.b as i128 * x * y + self.c as i128 * y * y
    }

    /// `Q.g` for an integer matrix `g`.
    pub fn transform(&self, g: &Mat2) -> Result<QForm> {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        let [p, q, r, s] = *g;
        let na = a * p * p + b * p * r + c * r * r;
        let nb = 2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s;
        let nc = a * q * q + b * q * s + c * s * s;
        Ok(QForm::new(to_i64(na)?, to_i64(nb)?, to_i64(nc)?))
    }

    /// The reduced representative of the SL2(Z)-class.
    pub fn reduce(&self) -> Result<QForm> {
        self.reduce_tracked().map(|(f, _)| f)
    }

    /// The reduced form together with `g` in SL2(Z) such that `self.g` is it.
    pub fn reduce_tracked(&self) -> Result<(QForm, Mat2)> {
        if !self.is_positive_definite() {
            return Err(Error::InvalidInput(format!(
                "{self} is not positive definite"
            )));
        }
        let (mut a, mut b, mut c) = (self.a as i128, self.b as i128, self.c as i128);
        let mut g = IDENTITY;
        loop {
            // bring b into (-a, a]
            let n = Integer::div_floor(&(a - b), &(2 * a));
            if n != 0 {
                c += (a * n + b) * n;
                b += 2 * a * n;
                g = mat_mul(&g, &[1, n, 0, 1]);
            }
            if a > c {
                (a, b, c) = (c, -b, a);
                g = mat_mul(&g, &[0, -1, 1, 0]);
            } else {
                break;
            }
        }
        if a == c && b < 0 {
            (a, b, c) = (c, -b, a);
            g = mat_mul(&g, &[0, -1, 1, 0]);
        }
        Ok((QForm::new(to_i64(a)?, to_i64(b)?, to_i64(c)?), g))
    }

    /// Generators of the stabilizer of a reduced form in SL2(Z) modulo `+-1`,
    /// as `(generator, order)`; `None` when the stabilizer is `{+-1}`.
    pub fn automorphism(&self) -> Option<(Mat2, u32)> {
        if self.a == self.c && self.b == 0 {
            Some(([0, -1, 1, 0], 2))
        } else if self.a == self.c && self.b == self.a {
            Some(([0, -1, 1, 1], 3))
        } else {
            None
        }
    }
}

fn to_i64(x: i128) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::InternalLimit(format!("form coefficient {x} overflows")))
}

impl fmt::Display for QForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

fn check_disc(d: i64) -> Result<()> {
    if d >= 0 || d.rem_euclid(4) > 1 {
        return Err(Error::InvalidInput(format!(
            "{d} is not a negative discriminant"
        )));
    }
    Ok(())
}

/// Every reduced form of discriminant `d`, primitive or not, ordered by `(A, B)`.
pub fn all_reduced_forms(d: i64) -> Result<Vec<QForm>> {
    check_disc(d)?;
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let f = QForm::new(a, b, num / (4 * a));
            if f.is_reduced() {
                out.push(f);
            }
        }
        a += 1;
    }
    Ok(out)
}

/// Primitive reduced forms of discriminant `d`.
pub fn reduced_forms(d: i64) -> Result<Vec<QForm>> {
    Ok(all_reduced_forms(d)?
        .into_iter()
        .filter(QForm::is_primitive)
        .collect())
}

/// `h(d)`, memoized.
pub fn class_number(d: i64) -> Result<u64> {
    static CACHE: OnceLock<Mutex<HashMap<i64, u64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(&h) = cache.lock().unwrap().get(&d) {
        return Ok(h);
    }
    let h = reduced_forms(d)?.len() as u64;
    cache.lock().unwrap().insert(d, h);
    Ok(h)
}

/// `(d0, l)` with `d = d0 l^2` and `d0` fundamental.
pub fn fundamental_part(d: i64) -> Result<(i64, u64)> {
    check_disc(d)?;
    let fact = factorize(-d)?;
    let mut core = -1i64;
    let mut l = 1u64;
    for &(p, v) in fact.factors() {
        if v % 2 == 1 {
            core *= p as i64;
        }
        l *= p.pow(v / 2);
    }
    // d = core * l^2 with core squarefree
    if core.rem_euclid(4) == 1 {
        Ok((core, l))
    } else {
        debug_assert!(l.is_multiple_of(2));
        Ok((4 * core, l / 2))
    }
}

/// A generic character of a discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GenericChar {
    /// `(./p)` for an odd prime `p`.
    Odd(u64),
    /// `(-1/.)`
    M4,
    /// `(2/.)`
    P8,
    /// `(-2/.)`
    M8,
}

impl GenericChar {
    pub fn eval(self, r: i64) -> i32 {
        match self {
            GenericChar::Odd(p) => kronecker(r, p as i64),
            GenericChar::M4 => kronecker(-4, r),
            GenericChar::P8 => kronecker(8, r),
            GenericChar::M8 => kronecker(-8, r),
        }
    }

    pub fn label(self) -> String {
        match self {
            GenericChar::Odd(p) => format!("(./{p})"),
            GenericChar::M4 => "(-1/.)".into(),
            GenericChar::P8 => "(2/.)".into(),
            GenericChar::M8 => "(-2/.)".into(),
        }
    }
}

/// Generic characters of `-4N`: odd primes ascending, then the 2-adic labels.
pub fn generic_characters_of_level(n: u64) -> Result<Vec<GenericChar>> {
    let fact = factorize(n as i64)?;
    let mut out: Vec<GenericChar> = fact
        .primes()
        .filter(|&p| p != 2)
        .map(GenericChar::Odd)
        .collect();
    let v2 = fact.valuation(2);
    match (v2, n % 8) {
        (0, _) if n % 4 == 1 => out.push(GenericChar::M4),
        (0, _) => {}
        (1, 2) => out.push(GenericChar::M8),
        (1, _) => out.push(GenericChar::P8),
        (2, _) => out.push(GenericChar::M4),
        _ => {
            out.push(GenericChar::M4);
            out.push(GenericChar::P8);
        }
    }
    Ok(out)
}

/// Generic characters of any negative discriminant.
pub fn generic_characters(d: i64) -> Result<Vec<GenericChar>> {
    check_disc(d)?;
    if d % 4 == 0 {
        generic_characters_of_level((-d / 4) as u64)
    } else {
        Ok(factorize(-d)?.primes().map(GenericChar::Odd).collect())
    }
}

/// Smallest value `Q(x, y)` prime to `m` for a primitive positive definite `Q`.
pub fn represented_value(q: &QForm, m: u64) -> Result<u64> {
    if !q.is_positive_definite() {
        return Err(Error::InvalidInput(format!("{q} is not positive definite")));
    }
    if gcd(q.content(), m as i64) != 1 {
        return Err(Error::InvalidInput(format!(
            "{q} represents no integer prime to {m}"
        )));
    }
    let (a, b, c) = (q.a as f64, q.b as f64, q.c as f64);
    // Q(x, y) >= lambda (x^2 + y^2) with lambda the smaller eigenvalue
    let lambda = ((a + c) - ((a - c).powi(2) + b * b).sqrt()) / 2.0 * (1.0 - 1e-9);
    let mut bound: i64 = 4;
    loop {
        let mut best: Option<u64> = None;
        for x in -bound..=bound {
            for y in -bound..=bound {
                let v = q.eval(x, y);
                if v <= 0 {
                    continue;
                }
                let v = v as u64;
                if v.gcd(&m) == 1 && best.is_none_or(|b| v < b) {
                    best = Some(v);
                }
            }
        }
        if let Some(v) = best {
            let outside = lambda * (bound as f64 + 1.0).powi(2);
            if (v as f64) <= outside {
                return Ok(v);
            }
        }
        if bound > 1 << 16 {
            return Err(Error::InternalLimit(format!(
                "no represented value of {q} prime to {m}"
            )));
        }
        bound *= 2;
    }
}

/// Genus data of a negative discriminant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusTable {
    pub disc: i64,
    pub characters: Vec<GenericChar>,
    pub classes: Vec<QForm>,
    pub assignment: Vec<Vec<i32>>,
}

impl GenusTable {
    /// Classes grouped by sign vector, in descending sign-vector order
    /// (all-plus first).
    pub fn genera(&self) -> Vec<(Vec<i32>, Vec<QForm>)> {
        let mut groups: BTreeMap<Vec<i32>, Vec<QForm>> = BTreeMap::new();
        for (form, signs) in self.classes.iter().zip(&self.assignment) {
            groups.entry(signs.clone()).or_default().push(*form);
        }
        let mut out: Vec<_> = groups.into_iter().collect();
        out.reverse();
        out
    }

    /// Sign vector of the class of `q`.
    pub fn signs_of(&self, q: &QForm) -> Result<Option<&[i32]>> {
        let r = q.reduce()?;
        Ok(self
            .classes
            .iter()
            .position(|c| *c == r)
            .map(|i| self.assignment[i].as_slice()))
    }
}

/// Evaluate the generic characters of `d` on every class.
pub fn genus_partition(d: i64) -> Result<GenusTable> {
    let characters = generic_characters(d)?;
    let classes = reduced_forms(d)?;
    let m = 2 * d.unsigned_abs();
    let assignment = classes
        .iter()
        .map(|q| {
            let r = represented_value(q, m)? as i64;
            Ok(characters.iter().map(|c| c.eval(r)).collect())
        })
        .collect::<Result<Vec<Vec<i32>>>>()?;
    Ok(GenusTable {
        disc: d,
        characters,
        classes,
        assignment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_examples() {
        assert_eq!(QForm::new(1, 0, 65).reduce().unwrap(), QForm::new(1, 0, 65));
        assert_eq!(QForm::new(9, -8, 9).reduce().unwrap(), QForm::new(9, 8, 9));
        assert_eq!(QForm::new(65, 0, 1).reduce().unwrap(), QForm::new(1, 0, 65));
        assert!(QForm::new(1, 5, 1).reduce().is_err());
        assert!(QForm::new(-1, 0, -1).reduce().is_err());
    }

    #[test]
    fn reduce_tracks_matrix() {
        let q = QForm::new(29 * 65, -4 * 65, 9);
        let (r, g) = q.reduce_tracked().unwrap();
        assert_eq!(q.transform(&g).unwrap(), r);
        assert_eq!(g[0] * g[3] - g[1] * g[2], 1);
        assert!(r.is_reduced());
    }

    #[test]
    fn reduced_forms_examples() {
        assert_eq!(
            reduced_forms(-20).unwrap(),
            vec![QForm::new(1, 0, 5), QForm::new(2, 2, 3)]
        );
        assert_eq!(reduced_forms(-4).unwrap(), vec![QForm::new(1, 0, 1)]);
        assert_eq!(reduced_forms(-260).unwrap().len(), 8);
        assert!(reduced_forms(-5).is_err());
        assert!(reduced_forms(8).is_err());
        // (2,0,2) is imprimitive
        assert_eq!(all_reduced_forms(-16).unwrap().len(), 2);
        assert_eq!(reduced_forms(-16).unwrap().len(), 1);
    }

    #[test]
    fn class_number_examples() {
        assert_eq!(class_number(-52).unwrap(), 2);
        assert_eq!(class_number(-68).unwrap(), 4);
        assert_eq!(class_number(-884).unwrap(), 16);
        assert_eq!(class_number(-3).unwrap(), 1);
        assert_eq!(class_number(-23).unwrap(), 3);
    }

    #[test]
    fn fundamental_part_examples() {
        assert_eq!(fundamental_part(-260).unwrap(), (-260, 1));
        assert_eq!(fundamental_part(-180).unwrap(), (-20, 3));
        assert_eq!(fundamental_part(-884).unwrap(), (-884, 1));
        assert_eq!(fundamental_part(-16).unwrap(), (-4, 2));
        assert_eq!(fundamental_part(-27).unwrap(), (-3, 3));
        assert_eq!(fundamental_part(-96).unwrap(), (-24, 2));
    }

    #[test]
    fn generic_character_examples() {
        use GenericChar::*;
        assert_eq!(
            generic_characters_of_level(65).unwrap(),
            vec![Odd(5), Odd(13), M4]
        );
        assert_eq!(
            generic_characters_of_level(39).unwrap(),
            vec![Odd(3), Odd(13)]
        );
        assert_eq!(generic_characters_of_level(6).unwrap(), vec![Odd(3), P8]);
        assert_eq!(generic_characters_of_level(10).unwrap(), vec![Odd(5), M8]);
        assert_eq!(
            generic_characters_of_level(24).unwrap(),
            vec![Odd(3), M4, P8]
        );
        assert_eq!(generic_characters(-23).unwrap(), vec![Odd(23)]);
    }

    #[test]
    fn represented_value_examples() {
        assert_eq!(represented_value(&QForm::new(1, 0, 65), 260).unwrap(), 1);
        assert_eq!(represented_value(&QForm::new(2, 2, 33), 260).unwrap(), 33);
        assert_eq!(represented_value(&QForm::new(9, 8, 9), 260).unwrap(), 9);
    }

    #[test]
    fn genus_partition_260() {
        let t = genus_partition(-260).unwrap();
        let genera = t.genera();
        assert_eq!(genera.len(), 4);
        assert!(genera.iter().all(|(_, c)| c.len() == 2));
        assert_eq!(
            t.signs_of(&QForm::new(65, 0, 1)).unwrap().unwrap(),
            &[1, 1, 1]
        );
        // order is (./5), (./13), (-1/.)
        assert_eq!(
            t.signs_of(&QForm::new(130, -130, 33)).unwrap().unwrap(),
            &[-1, -1, 1]
        );
        let single = genus_partition(-4).unwrap();
        assert_eq!(single.genera().len(), 1);
    }
}
