//! Multiplicative characters on F_Q^x and the character sums behind the
//! L-function.
//!
//! A character is pinned by its exponent step s: with g the field's fixed
//! generator, chi(g^e) = zeta_{Q-1}^(s e). Nontrivial characters are extended
//! by chi(0) := 0 and the trivial character by 1(0) := 1. The unique
//! character of order 2 is written lambda throughout.
//!
//! Jacobi sums carry a leading minus sign here:
//!   j(chi1, chi2) = - sum_{x1 + x2 = 1} chi1(x1) chi2(x2),
//! which makes |j|^2 = |F| whenever chi1, chi2, chi1*chi2 are all nontrivial,
//! and j(lambda, lambda) = lambda(-1).
//!
//! The double sum attached to the curve family is
//!   B(F, chi) = sum_x sum_{z != 0} chi(z) lambda(x^3 + x^2 z - 4 x z);
//! its closed form dispatches on the order of chi:
//!   |F|                                            chi trivial,
//!   1                                              chi = lambda,
//!   j(chi, chi)                                    chi of order 4,
//!   chi^2(4) j(chi, chi) j(lambda chi^2, chi^-1)   otherwise.
//! The naive O(|F|^2) sum is retained solely as a differential oracle.
//!
//! For a residue n mod 2d the indexed character tau_n on F_{q^|n|} has step
//! (q^|n| - 1) n / 2d, where |n| = o_q(2d/gcd(2d, n)) is the orbit length;
//! the closed-form value of B at tau_n is the reciprocal-root datum of one
//! L-factor, computed by `orbit_root`.

use std::sync::Arc;

use num_bigint::BigInt;

use crate::cyclo::Cyclotomic;
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::gfq::{FieldTable, SubfieldEmbedding};
use crate::orbits;

#[derive(Clone)]
pub struct Character {
    field: Arc<FieldTable>,
    step: u64,
}

impl Character {
    pub fn from_step(field: Arc<FieldTable>, step: u64) -> Character {
        let m = field.q() - 1;
        Character {
            field,
            step: step % m,
        }
    }

    pub fn trivial(field: Arc<FieldTable>) -> Character {
        Character::from_step(field, 0)
    }

    /// The unique character of order 2.
    pub fn quadratic(field: Arc<FieldTable>) -> Character {
        let s = (field.q() - 1) / 2;
        Character::from_step(field, s)
    }

    pub fn field(&self) -> &Arc<FieldTable> {
        &self.field
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn order(&self) -> u64 {
        let m = self.field.q() - 1;
        m / num_integer::gcd(m, self.step)
    }

    pub fn is_trivial(&self) -> bool {
        self.step == 0
    }

    /// chi(0) per the extension convention: 1 for the trivial character,
    /// 0 otherwise.
    pub fn zero_value(&self) -> u64 {
        if self.is_trivial() {
            1
        } else {
            0
        }
    }

    /// The conjugate character; on roots of unity this coincides with the
    /// inverse, so it is realised as the negated exponent step.
    pub fn inverse(&self) -> Character {
        let m = self.field.q() - 1;
        Character::from_step(Arc::clone(&self.field), (m - self.step) % m)
    }

    pub fn mul(&self, other: &Character) -> Character {
        assert_eq!(self.field.q(), other.field.q(), "characters on one field");
        let m = self.field.q() - 1;
        Character::from_step(Arc::clone(&self.field), (self.step + other.step) % m)
    }

    pub fn pow(&self, c: u64) -> Character {
        let m = (self.field.q() - 1) as u128;
        Character::from_step(
            Arc::clone(&self.field),
            ((self.step as u128 * c as u128) % m) as u64,
        )
    }

    /// Exact value chi(x), represented in Z[zeta_M] with M the order of chi.
    pub fn eval(&self, x: u64) -> Cyclotomic {
        if x == 0 {
            return Cyclotomic::integer(self.zero_value() as i64);
        }
        let m = self.order();
        if m == 1 {
            return Cyclotomic::integer(1);
        }
        let q1 = self.field.q() - 1;
        let e = (self.step as u128 * self.field.dlog(x).unwrap() as u128 % q1 as u128) as u64;
        debug_assert_eq!(e % (q1 / m), 0);
        Cyclotomic::root_of_unity(m, e / (q1 / m))
    }

    /// Compose with the relative norm from the degree-s extension, giving a
    /// character on F_{Q^s} of the same order.
    pub fn lift_via_norm(&self, engine: &Engine, s: u32) -> Result<Character> {
        if s == 1 {
            return Ok(self.clone());
        }
        let big = engine.field(self.field.p(), self.field.k() * s)?;
        let emb = SubfieldEmbedding::new(&big, &self.field)?;
        // chi(N(g_big)) = zeta_{Q_small-1}^(step * dlog_small(N(g_big)))
        //              = zeta_{Q_big-1}^(step * dlog_small(N(g_big)) * norm_exp)
        let n0 = emb.norm(&big, big.generator());
        let d0 = self.field.dlog(n0)?;
        let m_big = (big.q() - 1) as u128;
        let step =
            (self.step as u128 * d0 as u128 % m_big * emb.norm_exponent() as u128 % m_big) as u64;
        let lifted = Character::from_step(big, step);
        debug_assert_eq!(lifted.order(), self.order());
        Ok(lifted)
    }
}

fn order_of_step(q1: u64, step: u64) -> u64 {
    q1 / num_integer::gcd(q1, step)
}

/// Fold counts indexed by exponents of zeta_{Q-1} into Z[zeta_target],
/// negating when `negate` is set. Every populated exponent must be divisible
/// by (Q-1)/target.
fn counts_to_cyclo(counts: &[u64], target: u64, negate: bool) -> Cyclotomic {
    let q1 = counts.len() as u64;
    debug_assert_eq!(q1 % target, 0);
    let stride = q1 / target;
    let mut coeffs = vec![BigInt::from(0); target as usize];
    for (e, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        debug_assert_eq!(e as u64 % stride, 0, "exponent outside target ring");
        let k = (e as u64 / stride) as usize;
        if negate {
            coeffs[k] -= BigInt::from(c);
        } else {
            coeffs[k] += BigInt::from(c);
        }
    }
    Cyclotomic::new(target, coeffs)
}

/// Step-level Jacobi sum kernel: characters given by exponent steps, trivial
/// extension convention applied from step == 0.
fn jacobi_sum_steps(field: &FieldTable, s1: u64, s2: u64) -> Cyclotomic {
    let q1 = field.q() - 1;
    let target = num_integer::lcm(order_of_step(q1, s1), order_of_step(q1, s2));
    let mut counts = vec![0u64; q1 as usize];
    for x1 in field.elements() {
        let x2 = field.sub(1, x1);
        let e1 = if x1 == 0 {
            if s1 == 0 {
                0
            } else {
                continue; // chi1(0) = 0
            }
        } else {
            (s1 as u128 * field.dlog(x1).unwrap() as u128 % q1 as u128) as u64
        };
        let e2 = if x2 == 0 {
            if s2 == 0 {
                0
            } else {
                continue;
            }
        } else {
            (s2 as u128 * field.dlog(x2).unwrap() as u128 % q1 as u128) as u64
        };
        counts[((e1 + e2) % q1) as usize] += 1;
    }
    counts_to_cyclo(&counts, target, true)
}

/// j(chi1, chi2) = - sum_{x1 + x2 = 1} chi1(x1) chi2(x2), exact in
/// Z[zeta_lcm(ord chi1, ord chi2)]. Single O(Q) loop over x1 with
/// x2 = 1 - x1, characters evaluated through the dlog table.
pub fn jacobi_sum(field: &FieldTable, chi1: &Character, chi2: &Character) -> Cyclotomic {
    assert_eq!(field.q(), chi1.field.q());
    assert_eq!(field.q(), chi2.field.q());
    jacobi_sum_steps(field, chi1.step, chi2.step)
}

/// The naive double sum B(F, chi), O(Q^2); kept as a differential oracle for
/// the closed form and guarded by the double-sum budget.
pub fn double_char_sum(engine: &Engine, field: &FieldTable, chi: &Character) -> Result<Cyclotomic> {
    if field.q() > engine.double_sum_budget() {
        return Err(Error::DoubleSumBudget {
            q: field.q(),
            budget: engine.double_sum_budget(),
        });
    }
    let q1 = field.q() - 1;
    let lambda_step = q1 / 2;
    let target = num_integer::lcm(chi.order(), 2);
    let four = field.from_int(4);
    let mut counts = vec![0u64; q1 as usize];
    for x in field.elements() {
        let x2 = field.mul(x, x);
        let x3 = field.mul(x2, x);
        let slope = field.sub(x2, field.mul(four, x));
        for z in 1..field.q() {
            // x^3 + (x^2 - 4x) z
            let w = field.add(x3, field.mul(slope, z));
            if w == 0 {
                continue; // lambda(0) = 0
            }
            let e_chi = (chi.step as u128 * field.dlog(z).unwrap() as u128 % q1 as u128) as u64;
            let e_lam = lambda_step * (field.dlog(w).unwrap() % 2);
            counts[((e_chi + e_lam) % q1) as usize] += 1;
        }
    }
    Ok(counts_to_cyclo(&counts, target, false))
}

/// Closed form of B(F, chi): case dispatch on the order of chi, O(Q).
pub fn double_char_sum_closed(field: &FieldTable, chi: &Character) -> Cyclotomic {
    let order = chi.order();
    if order == 1 {
        return Cyclotomic::integer(field.q() as i64);
    }
    if order == 2 {
        return Cyclotomic::integer(1);
    }
    if order == 4 {
        return jacobi_sum(field, chi, chi);
    }
    let q1 = field.q() - 1;
    let chi_sq_step = (chi.step * 2) % q1;
    let lam_chi_sq_step = (q1 / 2 + chi_sq_step) % q1;
    let inv_step = (q1 - chi.step) % q1;
    let j1 = jacobi_sum_steps(field, chi.step, chi.step);
    let j2 = jacobi_sum_steps(field, lam_chi_sq_step, inv_step);
    // chi^2(4)
    let four = field.from_int(4);
    let m = order_of_step(q1, chi_sq_step);
    let e = (chi_sq_step as u128 * field.dlog(four).unwrap() as u128 % q1 as u128) as u64;
    let chi_sq_at_4 = Cyclotomic::root_of_unity(m, e / (q1 / m));
    chi_sq_at_4.mul(&j1).mul(&j2)
}

/// Checks sum_x lambda(x (x^2 - 4)) = - sum over exact-order-4 characters of
/// j(chi, chi), both sides exactly (the right side is the empty sum unless
/// |F| = 1 mod 4).
pub fn quartic_identity_holds(field: &FieldTable) -> bool {
    let mut lhs = 0i64;
    for x in field.elements() {
        let w = field.mul(x, field.sub(field.mul(x, x), field.from_int(4)));
        if w == 0 {
            continue;
        }
        lhs += if field.dlog(w).unwrap() % 2 == 0 { 1 } else { -1 };
    }
    let q1 = field.q() - 1;
    let mut rhs = Cyclotomic::integer(0);
    if q1 % 4 == 0 {
        for step in [q1 / 4, 3 * q1 / 4] {
            rhs = rhs.sub(&jacobi_sum_steps(field, step, step));
        }
    }
    rhs.equals_integer(lhs)
}

/// tau_n: the canonical character of exact order 2d/gcd(2d, n) on the field
/// F_{q^|n|}, where |n| = o_q(2d/gcd(2d, n)). Returns the character and |n|.
pub fn orbit_character(engine: &Engine, q: u64, d: u64, n: u64) -> Result<(Character, u64)> {
    let two_d = 2 * d;
    if num_integer::gcd(two_d, q) != 1 {
        return Err(Error::StripPPartFirst { q, d });
    }
    let n = n % two_d;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be nonzero mod 2d".into()));
    }
    let e = two_d / num_integer::gcd(two_d, n);
    let len = orbits::mult_order(q, e)?;
    let needed = (q as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
    if needed > engine.field_budget() as u128 {
        return Err(Error::BudgetExceeded {
            what: format!("orbit of n = {} (length {})", n, len),
            needed,
            budget: engine.field_budget(),
        });
    }
    let field = engine.extension_field(q, len as u32)?;
    let q_len = field.q();
    debug_assert_eq!((q_len as u128 - 1) * n as u128 % two_d as u128, 0);
    let step = ((q_len as u128 - 1) * n as u128 / two_d as u128) as u64;
    let chi = Character::from_step(field, step);
    debug_assert_eq!(chi.order(), two_d / num_integer::gcd(two_d, n));
    Ok((chi, len))
}

/// The reciprocal-root datum beta(n) of the L-factor attached to the orbit
/// of n in Z_2d: the closed-form value of B at tau_n. Constant along orbits
/// and of square-absolute-value q^(2|n|).
pub fn orbit_root(engine: &Engine, q: u64, d: u64, n: u64) -> Result<Cyclotomic> {
    let (chi, _len) = orbit_character(engine, q, d, n)?;
    let field = Arc::clone(chi.field());
    Ok(double_char_sum_closed(&field, &chi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfq::GeneratorChoice;
    use num_traits::Zero;

    fn engine() -> Engine {
        Engine::new()
    }

    fn all_characters(field: &Arc<FieldTable>) -> Vec<Character> {
        (0..field.q() - 1)
            .map(|s| Character::from_step(Arc::clone(field), s))
            .collect()
    }

    #[test]
    fn zero_value_convention() {
        let e = engine();
        let f3 = e.field(3, 1).unwrap();
        let triv = Character::trivial(Arc::clone(&f3));
        let lam = Character::quadratic(Arc::clone(&f3));
        assert!(triv.eval(0).equals_integer(1));
        assert!(lam.eval(0).equals_integer(0));
        // lambda(-1) = -1 over F_3
        assert!(lam.eval(f3.neg(1)).equals_integer(-1));
        for x in 1..3 {
            assert!(triv.eval(x).equals_integer(1));
        }
    }

    #[test]
    fn orbit_character_spec_examples() {
        let e = engine();
        // q=3, d=5, n=5: length o_3(2) = 1, order 2 (this is lambda on F_3)
        let (chi, len) = orbit_character(&e, 3, 5, 5).unwrap();
        assert_eq!(len, 1);
        assert_eq!(chi.order(), 2);
        assert_eq!(chi.field().q(), 3);
        // q=3, d=5, n=1: length o_3(10) = 4, order 10 on F_81
        let (chi, len) = orbit_character(&e, 3, 5, 1).unwrap();
        assert_eq!(len, 4);
        assert_eq!(chi.order(), 10);
        assert_eq!(chi.field().q(), 81);
    }

    #[test]
    fn orbit_character_order_formula() {
        // tau_n is defined for every nonzero n mod 2d and has exact order
        // 2d/gcd(2d, n)
        let e = engine();
        for d in [4u64, 5, 7, 8] {
            for n in 1..2 * d {
                let (chi, _) = orbit_character(&e, 3, d, n).unwrap();
                assert_eq!(chi.order(), 2 * d / num_integer::gcd(2 * d, n));
            }
        }
    }

    #[test]
    fn lift_preserves_order_and_fixes_s1() {
        let e = engine();
        let f5 = e.field(5, 1).unwrap();
        for chi in all_characters(&f5) {
            let same = chi.lift_via_norm(&e, 1).unwrap();
            assert_eq!(same.step(), chi.step());
            for s in [2u32, 3] {
                let lifted = chi.lift_via_norm(&e, s).unwrap();
                assert_eq!(lifted.order(), chi.order());
                if chi.is_trivial() {
                    assert!(lifted.is_trivial());
                }
            }
        }
    }

    #[test]
    fn jacobi_identities_small_fields() {
        let e = engine();
        for (p, k) in [(3u64, 1u32), (5, 1), (7, 1), (3, 2)] {
            let f = e.field(p, k).unwrap();
            let q = f.q() as i64;
            let triv = Character::trivial(Arc::clone(&f));
            let lam = Character::quadratic(Arc::clone(&f));
            // Jac1
            for chi in all_characters(&f) {
                if chi.is_trivial() {
                    continue;
                }
                assert!(jacobi_sum(&f, &triv, &chi).equals_integer(0));
            }
            // Jac3: j(lambda, lambda) = lambda(-1) = (-1)^((q-1)/2)
            let expected = if (q as u64 - 1) / 2 % 2 == 0 { 1 } else { -1 };
            assert!(jacobi_sum(&f, &lam, &lam).equals_integer(expected));
            // Jac2: j(chi, lambda) = chi(4) j(chi, chi) for chi not in {1, lambda}
            for chi in all_characters(&f) {
                if chi.is_trivial() || chi.order() == 2 {
                    continue;
                }
                let lhs = jacobi_sum(&f, &chi, &lam);
                let rhs = chi.eval(f.from_int(4)).mul(&jacobi_sum(&f, &chi, &chi));
                assert_eq!(lhs, rhs);
            }
            // Jac5: |j|^2 = q when chi1, chi2, chi1 chi2 all nontrivial
            for chi1 in all_characters(&f) {
                for chi2 in all_characters(&f) {
                    if chi1.is_trivial()
                        || chi2.is_trivial()
                        || chi1.mul(&chi2).is_trivial()
                    {
                        continue;
                    }
                    let j = jacobi_sum(&f, &chi1, &chi2);
                    assert!(j.abs_square().equals_integer(q));
                }
            }
        }
    }

    #[test]
    fn hasse_davenport_for_jacobi() {
        let e = engine();
        for (p, s) in [(3u64, 2u32), (3, 3), (5, 2), (5, 3)] {
            let base = e.field(p, 1).unwrap();
            let big = e.field(p, s).unwrap();
            for chi1 in all_characters(&base) {
                for chi2 in all_characters(&base) {
                    let l1 = chi1.lift_via_norm(&e, s).unwrap();
                    let l2 = chi2.lift_via_norm(&e, s).unwrap();
                    let lhs = jacobi_sum(&big, &l1, &l2);
                    let rhs = jacobi_sum(&base, &chi1, &chi2).pow(s as u64);
                    assert_eq!(lhs, rhs, "p={} s={}", p, s);
                }
            }
        }
    }

    #[test]
    fn double_sum_matches_closed_form() {
        let e = engine();
        for (p, k) in [(3u64, 1u32), (5, 1), (7, 1), (3, 2)] {
            let f = e.field(p, k).unwrap();
            for chi in all_characters(&f) {
                let naive = double_char_sum(&e, &f, &chi).unwrap();
                let closed = double_char_sum_closed(&f, &chi);
                assert_eq!(naive, closed, "q={} step={}", f.q(), chi.step());
            }
        }
    }

    #[test]
    fn double_sum_special_cases() {
        let e = engine();
        let f9 = e.field(3, 2).unwrap();
        let triv = Character::trivial(Arc::clone(&f9));
        assert!(double_char_sum(&e, &f9, &triv).unwrap().equals_integer(9));
        let lam = Character::quadratic(Arc::clone(&f9));
        assert!(double_char_sum(&e, &f9, &lam).unwrap().equals_integer(1));
        // order 4 -> j(chi, chi)
        let chi4 = Character::from_step(Arc::clone(&f9), 2);
        assert_eq!(chi4.order(), 4);
        let b = double_char_sum(&e, &f9, &chi4).unwrap();
        assert_eq!(b, jacobi_sum(&f9, &chi4, &chi4));
    }

    #[test]
    fn double_sum_budget_guard() {
        let e = Engine::new().with_double_sum_budget(8);
        let f9 = e.field(3, 2).unwrap();
        let triv = Character::trivial(Arc::clone(&f9));
        assert!(matches!(
            double_char_sum(&e, &f9, &triv),
            Err(Error::DoubleSumBudget { .. })
        ));
    }

    #[test]
    fn quartic_identity_small_fields() {
        let e = engine();
        for (p, k) in [(3u64, 1u32), (5, 1), (9, 1), (13, 1)] {
            let f = if p == 9 {
                e.field(3, 2).unwrap()
            } else {
                e.field(p, k).unwrap()
            };
            assert!(quartic_identity_holds(&f), "q = {}", f.q());
        }
    }

    #[test]
    fn orbit_root_constant_along_orbits() {
        let e = engine();
        for d in [4u64, 5, 7] {
            for n in 1..2 * d {
                if n == d || (d % 2 == 0 && (n == d / 2 || n == 3 * d / 2)) {
                    continue;
                }
                let b1 = orbit_root(&e, 3, d, n).unwrap();
                let b2 = orbit_root(&e, 3, d, (3 * n) % (2 * d)).unwrap();
                assert_eq!(b1, b2, "d={} n={}", d, n);
            }
        }
    }

    #[test]
    fn orbit_root_magnitude() {
        let e = engine();
        for d in [4u64, 5] {
            for n in 1..2 * d {
                if n == d || (d % 2 == 0 && (n == d / 2 || n == 3 * d / 2)) {
                    continue;
                }
                let (_, len) = orbit_character(&e, 3, d, n).unwrap();
                let b = orbit_root(&e, 3, d, n).unwrap();
                let expected = BigInt::from(3u64).pow(2 * len as u32);
                assert!(b.abs_square().equals_integer(expected));
            }
        }
    }

    #[test]
    fn supersingular_case_orbit_roots_are_integral_powers() {
        // 10 is supersingular for q = 3 (3^2 = -1 mod 10): every orbit root
        // equals q^|n| = 81
        let e = engine();
        for n in [1u64, 2, 3, 4, 6, 7, 8, 9] {
            let b = orbit_root(&e, 3, 5, n).unwrap();
            assert!(b.equals_integer(81), "n = {}", n);
        }
    }

    #[test]
    fn orbit_root_budget_error() {
        let e = Engine::new().with_field_budget(27);
        let err = orbit_root(&e, 3, 5, 1).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn orbit_root_multiset_invariant_under_generator_switch() {
        // the multiset {(reduced beta, |n|)} must not depend on which pinned
        // primitive element the dlog tables use
        for d in [4u64, 5] {
            let collect = |choice: GeneratorChoice| {
                let e = Engine::new().with_generator(choice);
                let os = crate::orbits::OrbitSet::new(3, d).unwrap();
                let mut set: Vec<(Vec<BigInt>, u64)> = os
                    .orbits
                    .iter()
                    .map(|o| {
                        let b = orbit_root(&e, 3, d, o.rep).unwrap();
                        let mut r = b.reduce();
                        if r.is_empty() {
                            r.push(BigInt::zero());
                        }
                        (r, o.len)
                    })
                    .collect();
                set.sort();
                set
            };
            assert_eq!(
                collect(GeneratorChoice::Primary),
                collect(GeneratorChoice::Alternate),
                "d = {}",
                d
            );
        }
    }
}
