//! Cusps of `Gamma0(N)` and the cusp character sums entering the dimension
//! formulas.

use num_integer::Integer;
use num_rational::Ratio;

use crate::arith::factorize;
use crate::characters::{ExtChar, GroupKind, QuadChar, Unit};
use crate::error::{Error, Result};

/// The cusp `a/c` of `Gamma0(N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CuspRep {
    pub a: u64,
    pub c: u64,
    /// `N / gcd(N, c^2)`
    pub width: u64,
}

/// Representatives `a/c` in lowest terms: `c | N` and `a` running over the
/// units mod `gcd(c, N/c)`, lifted to the least positive value prime to `c`.
pub fn cusp_reps(n: u64) -> Result<Vec<CuspRep>> {
    let fact = factorize(n as i64)?;
    let mut out = Vec::new();
    for c in fact.divisors() {
        let g = c.gcd(&(n / c));
        let width = n / n.gcd(&(c * c));
        for a in 1..=g {
            if a.gcd(&g) == 1 {
                let a = (0..).map(|t| a + t * g).find(|x| x.gcd(&c) == 1).unwrap();
                out.push(CuspRep { a, c, width });
            }
        }
    }
    Ok(out)
}

/// `nu_inf(chi)`: sum of `phi(gcd(c, N/c))` over `c | N` with
/// `gcd(c, N/c) | N/f`.
pub fn nu_inf(chi: &QuadChar) -> Result<u64> {
    let n = chi.level();
    let f = chi.conductor();
    let fact = factorize(n as i64)?;
    let mut total = 0;
    for c in fact.divisors() {
        let g = c.gcd(&(n / c));
        if (n / f).is_multiple_of(g) {
            total += factorize(g as i64)?.phi();
        }
    }
    Ok(total)
}

/// `nu_inf+(chi+)`, half-integral at `N = 4`.
pub fn nu_inf_plus(chi: &ExtChar) -> Result<Ratio<i64>> {
    if chi.kind() != GroupKind::Gamma0Plus {
        return Err(Error::InvalidInput("nu_inf+ needs a plus character".into()));
    }
    let eps = chi.fricke_sign().expect("plus character carries a sign");
    if chi.level() == 4 {
        let twice = match eps {
            Unit::ONE => 4,
            Unit::MINUS_ONE => 2,
            Unit::I => 3,
            _ => 1,
        };
        return Ok(Ratio::new(twice, 2));
    }
    Ok(Ratio::new(nu_inf(chi.base())? as i64, 2))
}

/// Class of the cusp `p/q` (lowest terms) as `(gcd(q, N), p * q/d mod g)`.
fn cusp_class(p: i64, q: i64, n: i64) -> (i64, i64) {
    let d = q.gcd(&n);
    let g = d.gcd(&(n / d));
    (d, (p * (q / d)).mod_floor(&g))
}

/// Number of cusps of `Gamma0+(N)`, i.e. orbits of the Fricke involution.
pub fn cusp_count_plus(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidInput("Fricke group needs N > 1".into()));
    }
    let reps = cusp_reps(n)?;
    let ni = n as i64;
    let mut orbits = 0;
    for r in &reps {
        let (a, c) = (r.a as i64, r.c as i64);
        let here = cusp_class(a, c, ni);
        // W_N (a/c) = -c / (N a), and gcd(c, N a) = c
        let there = cusp_class(-1, ni * a / c, ni);
        if here <= there {
            orbits += 1;
        }
    }
    Ok(orbits)
}
