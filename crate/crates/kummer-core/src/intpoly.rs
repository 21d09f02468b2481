//! Dense polynomials with unbounded integer coefficients.
//!
//! Shared low-level helper for the cyclotomic ring (reduction modulo the
//! cyclotomic polynomial) and for the symbolic curve identities (discriminant,
//! j-invariant numerator/denominator, points on the model). Coefficients are
//! stored low-degree-first; the zero polynomial is the empty vector.

use num_bigint::BigInt;
use num_traits::Zero;

pub type IntPoly = Vec<BigInt>;

pub fn trim(p: &mut IntPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn degree(p: &IntPoly) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

pub fn from_coeffs<I: Into<BigInt> + Clone>(cs: &[I]) -> IntPoly {
    let mut p: IntPoly = cs.iter().cloned().map(Into::into).collect();
    trim(&mut p);
    p
}

pub fn constant<I: Into<BigInt>>(c: I) -> IntPoly {
    from_coeffs(&[c.into()])
}

/// X^n with coefficient c.
pub fn monomial<I: Into<BigInt>>(c: I, n: usize) -> IntPoly {
    let mut p = vec![BigInt::zero(); n + 1];
    p[n] = c.into();
    trim(&mut p);
    p
}

pub fn add(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut out = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    trim(&mut out);
    out
}

pub fn sub(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut out = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    trim(&mut out);
    out
}

pub fn mul(a: &IntPoly, b: &IntPoly) -> IntPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    trim(&mut out);
    out
}

/// Remainder of `a` modulo the monic polynomial `m` (exact over Z).
///
/// Panics if `m` is not monic; callers only divide by X^N - 1 factors and
/// cyclotomic polynomials, which are monic by construction.
pub fn rem_monic(a: &IntPoly, m: &IntPoly) -> IntPoly {
    assert!(
        m.last().is_some_and(|c| *c == BigInt::from(1)),
        "divisor must be monic"
    );
    let dm = m.len() - 1;
    let mut r = a.clone();
    trim(&mut r);
    while r.len() > dm {
        let lead = r.last().unwrap().clone();
        let shift = r.len() - 1 - dm;
        if !lead.is_zero() {
            for (j, mj) in m.iter().enumerate() {
                let idx = shift + j;
                let t = &lead * mj;
                r[idx] -= t;
            }
        }
        r.pop();
        trim(&mut r);
    }
    r
}

/// Exact quotient a / b; panics if the division is not exact.
/// Used only for cyclotomic polynomial construction where exactness is a
/// ring-theoretic fact.
pub fn div_exact(a: &IntPoly, b: &IntPoly) -> IntPoly {
    if a.is_empty() {
        return Vec::new();
    }
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = a.clone();
    let db = b.len() - 1;
    let blead = b.last().unwrap();
    assert!(r.len() > db || r.len() == b.len(), "degree mismatch");
    let mut q = vec![BigInt::zero(); r.len() - db];
    while r.len() >= b.len() {
        let lead = r.last().unwrap();
        let (c, rem) = num_integer::Integer::div_rem(lead, blead);
        assert!(rem.is_zero(), "non-exact polynomial division");
        let shift = r.len() - b.len();
        q[shift] = c.clone();
        for (j, bj) in b.iter().enumerate() {
            let t = &c * bj;
            r[shift + j] -= t;
        }
        trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    assert!(r.is_empty(), "non-exact polynomial division (remainder)");
    trim(&mut q);
    q
}
