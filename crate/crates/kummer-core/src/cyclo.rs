//! Exact arithmetic in rings of cyclotomic integers Z[zeta_N].
//!
//! Elements are kept in the group-ring presentation Z[X]/(X^N - 1): a vector
//! of N unbounded integers, coefficient i attached to zeta_N^i. Character
//! sums accumulate naturally by exponent in this presentation; reduction
//! modulo the cyclotomic polynomial Phi_N happens only when equality must be
//! decided. Two elements are equal as algebraic numbers iff their difference
//! reduces to zero modulo Phi_N (after lifting both into a common ring when
//! the root-of-unity orders differ).

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::intpoly::{self, IntPoly};

/// An element of Z[zeta_N], stored as `sum coeffs[i] * zeta_N^i`.
#[derive(Debug, Clone)]
pub struct Cyclotomic {
    order: u64,
    coeffs: Vec<BigInt>,
}

/// The N-th cyclotomic polynomial Phi_N, low-degree-first.
///
/// Computed by exact division of X^N - 1 by the product of Phi_e over the
/// proper divisors e of N, and memoised process-wide.
pub fn cyclotomic_polynomial(n: u64) -> IntPoly {
    static CACHE: OnceLock<Mutex<HashMap<u64, IntPoly>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    let phi = compute_cyclotomic(n);
    cache.lock().unwrap().insert(n, phi.clone());
    phi
}

fn compute_cyclotomic(n: u64) -> IntPoly {
    assert!(n >= 1);
    if n == 1 {
        // X - 1
        return intpoly::from_coeffs(&[-1i64, 1]);
    }
    // X^n - 1
    let mut xn1 = intpoly::monomial(1i64, n as usize);
    xn1[0] = BigInt::from(-1);
    let mut denom = intpoly::constant(1i64);
    for e in 1..n {
        if n % e == 0 {
            denom = intpoly::mul(&denom, &cyclotomic_polynomial(e));
        }
    }
    intpoly::div_exact(&xn1, &denom)
}

impl Cyclotomic {
    /// Build from explicit group-ring coefficients (length must equal `order`).
    pub fn new(order: u64, coeffs: Vec<BigInt>) -> Self {
        assert!(order >= 1 && coeffs.len() == order as usize);
        Cyclotomic { order, coeffs }
    }

    pub fn zero(order: u64) -> Self {
        Cyclotomic::new(order, vec![BigInt::zero(); order as usize])
    }

    /// The rational integer c, represented in Z[zeta_1].
    pub fn integer<I: Into<BigInt>>(c: I) -> Self {
        Cyclotomic::new(1, vec![c.into()])
    }

    /// zeta_order^k.
    pub fn root_of_unity(order: u64, k: u64) -> Self {
        let mut z = Cyclotomic::zero(order);
        z.coeffs[(k % order) as usize] = BigInt::one();
        z
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Re-express in Z[zeta_M] for a multiple M of the current order
    /// (index map i -> i * M/N).
    pub fn lift_to_order(&self, m: u64) -> Cyclotomic {
        assert!(m % self.order == 0, "target order must be a multiple");
        if m == self.order {
            return self.clone();
        }
        let step = (m / self.order) as usize;
        let mut out = Cyclotomic::zero(m);
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.coeffs[i * step] = c.clone();
            }
        }
        out
    }

    fn common_order(&self, other: &Cyclotomic) -> u64 {
        self.order.lcm(&other.order)
    }

    pub fn add(&self, other: &Cyclotomic) -> Cyclotomic {
        let m = self.common_order(other);
        let mut a = self.lift_to_order(m);
        let b = other.lift_to_order(m);
        for (ca, cb) in a.coeffs.iter_mut().zip(b.coeffs.iter()) {
            *ca += cb;
        }
        a
    }

    pub fn sub(&self, other: &Cyclotomic) -> Cyclotomic {
        let m = self.common_order(other);
        let mut a = self.lift_to_order(m);
        let b = other.lift_to_order(m);
        for (ca, cb) in a.coeffs.iter_mut().zip(b.coeffs.iter()) {
            *ca -= cb;
        }
        a
    }

    pub fn neg(&self) -> Cyclotomic {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c = -std::mem::take(c);
        }
        out
    }

    /// Product, computed as cyclic convolution after lifting to the lcm of
    /// the two orders.
    pub fn mul(&self, other: &Cyclotomic) -> Cyclotomic {
        let m = self.common_order(other);
        let a = self.lift_to_order(m);
        let b = other.lift_to_order(m);
        let n = m as usize;
        let mut out = Cyclotomic::zero(m);
        for (i, ai) in a.coeffs.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.coeffs.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let k = (i + j) % n;
                out.coeffs[k] += ai * bj;
            }
        }
        out
    }

    pub fn scale<I: Into<BigInt>>(&self, c: I) -> Cyclotomic {
        let c: BigInt = c.into();
        let mut out = self.clone();
        for x in out.coeffs.iter_mut() {
            *x *= &c;
        }
        out
    }

    /// Complex conjugation: the index permutation i -> -i mod N.
    pub fn conj(&self) -> Cyclotomic {
        let n = self.order as usize;
        let mut out = Cyclotomic::zero(self.order);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[(n - i) % n] = c.clone();
        }
        out
    }

    /// z * conj(z), an exact element of the same ring.
    pub fn abs_square(&self) -> Cyclotomic {
        self.mul(&self.conj())
    }

    pub fn pow(&self, mut e: u64) -> Cyclotomic {
        let mut base = self.clone();
        let mut acc = Cyclotomic::root_of_unity(self.order, 0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Canonical residue modulo Phi_N: an integer polynomial of degree
    /// < phi(N) representing the same algebraic number. Idempotent.
    pub fn reduce(&self) -> IntPoly {
        let mut p: IntPoly = self.coeffs.clone();
        intpoly::trim(&mut p);
        intpoly::rem_monic(&p, &cyclotomic_polynomial(self.order))
    }

    pub fn is_zero(&self) -> bool {
        self.reduce().is_empty()
    }

    /// Decides z = c as algebraic numbers.
    pub fn equals_integer<I: Into<BigInt>>(&self, c: I) -> bool {
        self.sub(&Cyclotomic::integer(c)).is_zero()
    }

    /// If the element is a rational integer, return it.
    pub fn as_integer(&self) -> Option<BigInt> {
        let r = self.reduce();
        match r.len() {
            0 => Some(BigInt::zero()),
            1 => Some(r[0].clone()),
            _ => None,
        }
    }
}

impl PartialEq for Cyclotomic {
    /// Equality as algebraic numbers (after lifting to a common ring).
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl Eq for Cyclotomic {}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.reduce();
        if r.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in r.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.sign() == num_bigint::Sign::Minus {
                ("-", -c.clone())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", sign)?;
            }
            if i == 0 {
                write!(f, "{}", mag)?;
            } else if mag.is_one() {
                write!(f, "z{}^{}", self.order, i)?;
            } else {
                write!(f, "{}*z{}^{}", mag, self.order, i)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cyclotomic_polynomials_small() {
        assert_eq!(cyclotomic_polynomial(1), intpoly::from_coeffs(&[-1i64, 1]));
        assert_eq!(cyclotomic_polynomial(2), intpoly::from_coeffs(&[1i64, 1]));
        assert_eq!(
            cyclotomic_polynomial(10),
            intpoly::from_coeffs(&[1i64, -1, 1, -1, 1])
        );
        // degree of Phi_N is phi(N)
        assert_eq!(cyclotomic_polynomial(105).len() - 1, 48);
    }

    #[test]
    fn reduce_examples() {
        // zeta_2 = -1
        let z = Cyclotomic::root_of_unity(2, 1);
        assert_eq!(z.reduce(), intpoly::from_coeffs(&[-1i64]));
        // 1 + zeta_3 + zeta_3^2 = 0
        let s = Cyclotomic::root_of_unity(3, 0)
            .add(&Cyclotomic::root_of_unity(3, 1))
            .add(&Cyclotomic::root_of_unity(3, 2));
        assert!(s.is_zero());
        // zeta_10^5 = -1
        let z = Cyclotomic::root_of_unity(10, 5);
        assert!(z.equals_integer(-1));
    }

    #[test]
    fn equals_integer_examples() {
        let z = Cyclotomic::root_of_unity(2, 1).add(&Cyclotomic::integer(1));
        assert!(z.equals_integer(0));
        assert!(!Cyclotomic::root_of_unity(4, 1).equals_integer(1));
    }

    #[test]
    fn abs_square_of_root_of_unity_is_one() {
        for k in 0..12 {
            let z = Cyclotomic::root_of_unity(12, k);
            assert!(z.abs_square().equals_integer(1));
        }
        assert!(Cyclotomic::zero(5).abs_square().equals_integer(0));
    }

    #[test]
    fn conj_is_involution() {
        let z = Cyclotomic::new(
            6,
            vec![1i64, -2, 3, 0, 5, -1]
                .into_iter()
                .map(BigInt::from)
                .collect(),
        );
        assert_eq!(z.conj().conj().coeffs(), z.coeffs());
    }

    #[test]
    fn rescaling_order_preserves_value() {
        // an element of Z[zeta_5] re-expressed in Z[zeta_15]
        let z = Cyclotomic::new(
            5,
            vec![2i64, -1, 0, 4, 7].into_iter().map(BigInt::from).collect(),
        );
        let lifted = z.lift_to_order(15);
        assert_eq!(z, lifted);
    }

    fn arb_cyclo(max_order: u64) -> impl Strategy<Value = Cyclotomic> {
        (1..=max_order).prop_flat_map(|n| {
            proptest::collection::vec(-10i64..=10, n as usize)
                .prop_map(move |cs| Cyclotomic::new(n, cs.into_iter().map(BigInt::from).collect()))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_axioms(a in arb_cyclo(30), b in arb_cyclo(30), c in arb_cyclo(30)) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }

        #[test]
        fn reduce_commutes_with_mul(a in arb_cyclo(24), b in arb_cyclo(24)) {
            // reduce(z*w) equals reduce applied to the product of reduced
            // representatives, as algebraic numbers
            let prod = a.mul(&b);
            let m = prod.order();
            let ra = Cyclotomic::new(m, {
                let mut v = a.lift_to_order(m).coeffs().to_vec();
                let red = intpoly::rem_monic(&v.clone(), &cyclotomic_polynomial(m));
                for x in v.iter_mut() { *x = BigInt::zero(); }
                for (i, c) in red.iter().enumerate() { v[i] = c.clone(); }
                v
            });
            let rb = b.lift_to_order(m);
            prop_assert_eq!(ra.mul(&rb), prod);
        }

        #[test]
        fn conj_is_ring_hom(a in arb_cyclo(20), b in arb_cyclo(20)) {
            prop_assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
            prop_assert_eq!(a.add(&b).conj(), a.conj().add(&b.conj()));
        }
    }
}
