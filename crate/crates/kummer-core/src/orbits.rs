//! Combinatorics of the multiplication-by-q action on Z/2dZ.
//!
//! The residue set driving the L-function is
//!   Z_2d = Z/2dZ minus {0, d}           for d odd,
//!   Z_2d = Z/2dZ minus {0, d/2, d, 3d/2} for d even
//! (empty for d = 1, 2). Multiplication by q permutes it when gcd(2d, q) = 1;
//! each orbit through n has length o_q(2d / gcd(2d, n)), the multiplicative
//! order of q modulo 2d/gcd(2d, n).
//!
//! Also here: the divisor stratification of the orbit set, the divisor sum
//! I_q(D) = sum_{e | D} phi(e)/o_q(e) (with phi(1) = 0), and the
//! supersingularity test "D divides q^a + 1 for some a", decided via
//! -1 in <q> mod D.

use std::collections::BTreeMap;

use num_rational::Ratio;

use crate::error::{Error, Result};

fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// Euler's totient, with the convention phi(1) = 0 so that
/// phi(n) = |(Z/nZ)^x| for every n >= 1.
pub fn totient(n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut result = n;
    let mut m = n;
    let mut d = 2;
    while d as u128 * d as u128 <= m as u128 {
        if m % d == 0 {
            result -= result / d;
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Multiplicative order of q modulo n (o_q(1) := 1).
pub fn mult_order(q: u64, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidArgument("modulus must be >= 1".into()));
    }
    if gcd(q % n.max(1), n) != 1 && n > 1 {
        return Err(Error::NotCoprime { q, n });
    }
    if n == 1 {
        return Ok(1);
    }
    let base = q % n;
    let mut cur = base;
    let mut ord = 1u64;
    while cur != 1 {
        cur = mul_mod(cur, base, n);
        ord += 1;
    }
    Ok(ord)
}

/// Is D supersingular for q, i.e. does D divide q^a + 1 for some a >= 1?
/// Returns the least such witness a, decided by scanning q^a mod D for
/// a = 1..o_q(D); equivalently -1 lies in the subgroup generated by q.
pub fn supersingular_witness(q: u64, d: u64) -> Result<Option<u64>> {
    if d == 0 {
        return Err(Error::InvalidArgument("D must be >= 1".into()));
    }
    if d == 1 {
        return Ok(Some(1)); // 1 divides everything
    }
    if gcd(q % d, d) != 1 {
        return Err(Error::NotCoprime { q, n: d });
    }
    let minus_one = d - 1;
    let base = q % d;
    let mut cur = base;
    let bound = mult_order(q, d)?;
    for a in 1..=bound {
        if cur == minus_one {
            return Ok(Some(a));
        }
        cur = mul_mod(cur, base, d);
    }
    Ok(None)
}

pub fn is_supersingular(q: u64, d: u64) -> Result<bool> {
    Ok(supersingular_witness(q, d)?.is_some())
}

/// One orbit of the multiplication-by-q action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    /// Smallest member.
    pub rep: u64,
    /// Orbit length |n| = o_q(2d / gcd(2d, n)).
    pub len: u64,
    /// Members in cycle order starting from the representative.
    pub members: Vec<u64>,
}

/// The decomposition of Z_2d under multiplication by q, orbits sorted by
/// representative.
#[derive(Debug, Clone)]
pub struct OrbitSet {
    pub q: u64,
    pub d: u64,
    pub members: Vec<u64>,
    pub orbits: Vec<Orbit>,
}

impl OrbitSet {
    pub fn new(q: u64, d: u64) -> Result<OrbitSet> {
        if d == 0 {
            return Err(Error::InvalidArgument("d must be >= 1".into()));
        }
        let n = 2 * d;
        if gcd(q % n, n) != 1 {
            return Err(Error::StripPPartFirst { q, d });
        }
        let mut excluded = vec![0, d];
        if d % 2 == 0 {
            excluded.push(d / 2);
            excluded.push(3 * d / 2);
        }
        let members: Vec<u64> = (0..n).filter(|m| !excluded.contains(m)).collect();

        let mut seen = vec![false; n as usize];
        for &e in &excluded {
            seen[e as usize] = true;
        }
        let mut orbits = Vec::new();
        for &start in &members {
            if seen[start as usize] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut cur = start;
            loop {
                seen[cur as usize] = true;
                cycle.push(cur);
                cur = mul_mod(cur, q % n, n);
                if cur == start {
                    break;
                }
            }
            let rep = *cycle.iter().min().unwrap();
            orbits.push(Orbit {
                rep,
                len: cycle.len() as u64,
                members: cycle,
            });
        }
        orbits.sort_by_key(|o| o.rep);
        Ok(OrbitSet {
            q,
            d,
            members,
            orbits,
        })
    }

    pub fn orbit_count(&self) -> usize {
        self.orbits.len()
    }

    /// Stratify orbits by the divisor e = 2d/gcd(2d, n); every orbit inside
    /// the stratum of e has length o_q(e). Keys are all divisors e > 2 of 2d;
    /// for even d the stratum e = 4 is empty (its two residues d/2, 3d/2 are
    /// excluded from Z_2d).
    pub fn stratify(&self) -> BTreeMap<u64, u64> {
        let n = 2 * self.d;
        let mut strata: BTreeMap<u64, u64> = divisors(n)
            .into_iter()
            .filter(|&e| e > 2)
            .map(|e| (e, 0))
            .collect();
        for orbit in &self.orbits {
            let e = n / gcd(n, orbit.rep);
            *strata.get_mut(&e).expect("orbit stratum is a divisor > 2") += 1;
        }
        strata
    }
}

/// I_q(D) = sum over divisors e of D of phi(e)/o_q(e), phi(1) = 0.
/// Exact rational; integrality is asserted by callers per stratum.
pub fn totient_order_sum(q: u64, d: u64) -> Result<Ratio<u64>> {
    if gcd(q % d.max(1), d) != 1 && d > 1 {
        return Err(Error::NotCoprime { q, n: d });
    }
    let mut acc = Ratio::new(0, 1);
    for e in divisors(d) {
        if e == 1 {
            continue; // phi(1) = 0
        }
        acc += Ratio::new(totient(e), mult_order(q, e)?);
    }
    Ok(acc)
}
