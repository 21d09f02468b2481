//! Exact arithmetic in finite fields F_{p^k} of odd characteristic.
//!
//! A `FieldTable` fixes, deterministically:
//!   - the modulus: the lexicographically smallest monic irreducible
//!     polynomial of degree k over F_p (coefficients compared
//!     low-degree-first),
//!   - a primitive element: the smallest element, in index order, of
//!     multiplicative order p^k - 1 (a second deterministic choice, the next
//!     smallest primitive element, is kept for invariance checks),
//!   - a complete discrete-log table with respect to that element.
//!
//! Elements are indexed 0..Q-1: the element sum a_i x^i has index
//! sum a_i p^i, so 0 is zero and indices below p are the prime field.
//! The full dlog/exp tables make character evaluation O(1) per point; the
//! O(Q) memory is the accepted cost and defines the field-size budget.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Which of the two pinned primitive elements the dlog table is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum GeneratorChoice {
    #[default]
    Primary,
    Alternate,
}

/// Default cap on p^k for table construction.
pub const DEFAULT_FIELD_BUDGET: u64 = 1 << 24;

#[derive(Debug)]
pub struct FieldTable {
    p: u64,
    k: u32,
    q: u64,
    modulus: Vec<u64>,
    generator: u64,
    primary_generator: u64,
    alternate_generator: u64,
    choice: GeneratorChoice,
    dlog: Vec<u32>,
    exp: Vec<u32>,
}

const DLOG_ZERO: u32 = u32::MAX;

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d as u128 * d as u128 <= n as u128 {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Polynomial helpers over F_p used only during construction
// (coefficients low-degree-first, not necessarily trimmed).

fn poly_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_mul_mod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    poly_rem(&mut prod, modulus, p);
    prod
}

/// In-place remainder modulo a monic modulus.
fn poly_rem(a: &mut Vec<u64>, modulus: &[u64], p: u64) {
    let dm = modulus.len() - 1;
    while {
        poly_trim(a);
        a.len() > dm
    } {
        let lead = *a.last().unwrap();
        let shift = a.len() - 1 - dm;
        for (j, &mj) in modulus.iter().enumerate() {
            let t = (lead * mj) % p;
            let idx = shift + j;
            a[idx] = (a[idx] + p - t) % p;
        }
    }
}

fn poly_pow_mod(base: &[u64], mut e: u64, modulus: &[u64], p: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut b = base.to_vec();
    poly_rem(&mut b, modulus, p);
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mul_mod(&result, &b, modulus, p);
        }
        e >>= 1;
        if e > 0 {
            b = poly_mul_mod(&b, &b, modulus, p);
        }
    }
    result
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !b.is_empty() {
        // make b monic, then reduce a mod b
        let inv = mod_inverse(*b.last().unwrap(), p);
        let bm: Vec<u64> = b.iter().map(|&c| (c * inv) % p).collect();
        poly_rem(&mut a, &bm, p);
        std::mem::swap(&mut a, &mut b);
        poly_trim(&mut b);
    }
    a
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // p is a small prime; Fermat
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

/// Rabin irreducibility test for a monic polynomial of degree k over F_p.
fn is_irreducible(f: &[u64], k: u32, p: u64) -> bool {
    let x = vec![0u64, 1];
    // x^(p^j) mod f by iterated Frobenius
    let frob_power = |j: u32| -> Vec<u64> {
        let mut h = x.clone();
        for _ in 0..j {
            h = poly_pow_mod(&h, p, f, p);
        }
        h
    };
    // x^(p^k) == x mod f
    let mut top = frob_power(k);
    for (i, &xi) in x.iter().enumerate() {
        let cur = top.get(i).copied().unwrap_or(0);
        if i < top.len() {
            top[i] = (cur + p - xi) % p;
        } else {
            top.push((p - xi) % p);
        }
    }
    poly_trim(&mut top);
    if !top.is_empty() {
        return false;
    }
    for r in prime_factors(k as u64) {
        let mut h = frob_power(k / r as u32);
        // h - x
        for (i, &xi) in x.iter().enumerate() {
            let cur = h.get(i).copied().unwrap_or(0);
            if i < h.len() {
                h[i] = (cur + p - xi) % p;
            } else {
                h.push((p - xi) % p);
            }
        }
        let g = poly_gcd(&h, f, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

impl FieldTable {
    /// Build F_{p^k} with the primary deterministic generator.
    pub fn new(p: u64, k: u32, budget: u64) -> Result<FieldTable> {
        FieldTable::with_generator(p, k, budget, GeneratorChoice::Primary)
    }

    pub fn with_generator(
        p: u64,
        k: u32,
        budget: u64,
        choice: GeneratorChoice,
    ) -> Result<FieldTable> {
        if p == 2 {
            return Err(Error::OddCharacteristicRequired { p });
        }
        if !is_prime(p) {
            return Err(Error::NotPrime { p });
        }
        if k < 1 {
            return Err(Error::InvalidArgument("extension degree k >= 1".into()));
        }
        let q128 = (p as u128).checked_pow(k).unwrap_or(u128::MAX);
        if q128 > budget as u128 {
            return Err(Error::FieldTooLarge {
                requested: q128,
                budget,
            });
        }
        let q = q128 as u64;

        let modulus = Self::smallest_irreducible(p, k);

        // digits of an element index, low degree first
        let decode = |idx: u64| -> Vec<u64> {
            let mut digits = vec![0u64; k as usize];
            let mut v = idx;
            for d in digits.iter_mut() {
                *d = v % p;
                v /= p;
            }
            digits
        };
        let encode = |digits: &[u64]| -> u64 {
            let mut idx = 0u64;
            for &d in digits.iter().rev() {
                idx = idx * p + d;
            }
            idx
        };

        // generator search: smallest (then next smallest) primitive element
        // in index order
        let factors = prime_factors(q - 1);
        let mut primary = 0u64;
        let mut alternate = 0u64;
        for idx in 2..q {
            let digits = decode(idx);
            let primitive = factors.iter().all(|&r| {
                let e = (q - 1) / r;
                let h = poly_pow_mod(&digits, e, &modulus, p);
                !(h.len() == 1 && h[0] == 1)
            });
            if primitive {
                if primary == 0 {
                    primary = idx;
                } else {
                    alternate = idx;
                    break;
                }
            }
        }
        assert!(primary != 0, "no primitive element found");
        if alternate == 0 {
            // F_3 has a single primitive element
            alternate = primary;
        }
        let generator = match choice {
            GeneratorChoice::Primary => primary,
            GeneratorChoice::Alternate => alternate,
        };

        // dlog/exp tables by one pass of multiplication by g
        let mut dlog = vec![DLOG_ZERO; q as usize];
        let mut exp = vec![0u32; (q - 1) as usize];
        let g_digits = decode(generator);
        let mut cur = vec![1u64];
        for e in 0..(q - 1) {
            let mut padded = cur.clone();
            padded.resize(k as usize, 0);
            let idx = encode(&padded);
            debug_assert!(dlog[idx as usize] == DLOG_ZERO, "generator not primitive");
            dlog[idx as usize] = e as u32;
            exp[e as usize] = idx as u32;
            cur = poly_mul_mod(&cur, &g_digits, &modulus, p);
        }
        {
            let mut padded = cur.clone();
            padded.resize(k as usize, 0);
            assert_eq!(encode(&padded), 1, "generator order != q - 1");
        }

        Ok(FieldTable {
            p,
            k,
            q,
            modulus,
            generator,
            primary_generator: primary,
            alternate_generator: alternate,
            choice,
            dlog,
            exp,
        })
    }

    fn smallest_irreducible(p: u64, k: u32) -> Vec<u64> {
        if k == 1 {
            return vec![0, 1]; // x
        }
        let total = (p as u128).pow(k);
        // enumerate constant-coefficient-first lexicographic order
        for j in 0..total {
            let mut coeffs = vec![0u64; k as usize + 1];
            coeffs[k as usize] = 1;
            let mut v = j;
            for i in 0..k as usize {
                // c_0 is the most significant digit of j
                let power = (p as u128).pow(k - 1 - i as u32);
                coeffs[i] = (v / power) as u64;
                v %= power;
            }
            if is_irreducible(&coeffs, k, p) {
                return coeffs;
            }
        }
        unreachable!("an irreducible polynomial of every degree exists");
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Field cardinality Q = p^k.
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    pub fn generator_choice(&self) -> GeneratorChoice {
        self.choice
    }

    pub fn primary_generator(&self) -> u64 {
        self.primary_generator
    }

    pub fn alternate_generator(&self) -> u64 {
        self.alternate_generator
    }

    pub fn zero(&self) -> u64 {
        0
    }

    pub fn one(&self) -> u64 {
        1
    }

    /// The constant c mod p as a field element.
    pub fn from_int(&self, c: i64) -> u64 {
        (c.rem_euclid(self.p as i64)) as u64
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.q
    }

    pub fn dlog(&self, x: u64) -> Result<u64> {
        if x == 0 {
            return Err(Error::DlogOfZero);
        }
        Ok(self.dlog[x as usize] as u64)
    }

    /// g^e.
    pub fn exp(&self, e: u64) -> u64 {
        self.exp[(e % (self.q - 1)) as usize] as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.k == 1 {
            return (a + b) % self.p;
        }
        let (mut out, mut x, mut y, mut scale) = (0u64, a, b, 1u64);
        for _ in 0..self.k {
            out += (x % self.p + y % self.p) % self.p * scale;
            x /= self.p;
            y /= self.p;
            scale *= self.p;
        }
        out
    }

    pub fn neg(&self, a: u64) -> u64 {
        if self.k == 1 {
            return (self.p - a) % self.p;
        }
        let (mut out, mut x, mut scale) = (0u64, a, 1u64);
        for _ in 0..self.k {
            out += (self.p - x % self.p) % self.p * scale;
            x /= self.p;
            scale *= self.p;
        }
        out
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        let e = self.dlog[a as usize] as u64 + self.dlog[b as usize] as u64;
        self.exp(e)
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::DlogOfZero);
        }
        let e = self.dlog[a as usize] as u64;
        Ok(self.exp(self.q - 1 - e))
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let d = self.dlog[a as usize] as u128 * e as u128;
        self.exp((d % (self.q as u128 - 1)) as u64)
    }

    /// x -> x^p, the arithmetic Frobenius.
    pub fn frobenius(&self, a: u64) -> u64 {
        self.pow(a, self.p)
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: u64) -> Result<u64> {
        let e = self.dlog(a)?;
        Ok((self.q - 1) / num_integer::gcd(self.q - 1, e))
    }

    /// Relative norm into a subfield, as an element of `small`'s own table.
    ///
    /// Convenience wrapper that constructs the deterministic embedding; use
    /// `SubfieldEmbedding` directly when calling in a loop.
    pub fn relative_norm(&self, small: &FieldTable, x: u64) -> Result<u64> {
        let emb = SubfieldEmbedding::new(self, small)?;
        Ok(emb.norm(self, x))
    }
}

/// A genuine field embedding F_{p^a} -> F_{p^ab}, pinned by sending the
/// small field's canonical ring generator to the smallest-index root of the
/// small modulus inside the big field. The image is exactly the set of
/// solutions of x^(p^a) = x.
pub struct SubfieldEmbedding {
    map: Vec<u32>,
    inv: HashMap<u32, u32>,
    norm_exponent: u64,
}

impl SubfieldEmbedding {
    pub fn new(big: &FieldTable, small: &FieldTable) -> Result<SubfieldEmbedding> {
        if big.p != small.p || big.k % small.k != 0 {
            return Err(Error::NotASubfield {
                small: small.q,
                big: big.q,
            });
        }
        let s = (big.q - 1) / (small.q - 1);

        // candidate roots live in the unique subfield of order q_small
        let mut root = None;
        for j in 0..(small.q - 1) {
            let cand = big.exp(j * s);
            // evaluate small.modulus at cand (Horner)
            let mut acc = 0u64;
            for &c in small.modulus.iter().rev() {
                acc = big.add(big.mul(acc, cand), c % big.p);
            }
            if acc == 0 {
                root = Some(match root {
                    None => cand,
                    Some(r) if cand < r => cand,
                    Some(r) => r,
                });
            }
        }
        let root = root.expect("small modulus splits in the big field");

        // embed every small element a_0 + a_1 x + ... as sum a_i root^i
        let mut powers = vec![1u64];
        for _ in 1..small.k {
            let last = *powers.last().unwrap();
            powers.push(big.mul(last, root));
        }
        let mut map = vec![0u32; small.q as usize];
        let mut inv = HashMap::with_capacity(small.q as usize);
        for m in 0..small.q {
            let mut digits = m;
            let mut acc = 0u64;
            for pw in powers.iter() {
                let d = digits % small.p;
                digits /= small.p;
                acc = big.add(acc, big.mul(d, *pw));
            }
            map[m as usize] = acc as u32;
            inv.insert(acc as u32, m as u32);
        }
        Ok(SubfieldEmbedding {
            map,
            inv,
            norm_exponent: s,
        })
    }

    pub fn embed(&self, small_elt: u64) -> u64 {
        self.map[small_elt as usize] as u64
    }

    /// N(x) = x^((Q_big-1)/(Q_small-1)) pulled back to the small table
    /// (0 for x = 0).
    pub fn norm(&self, big: &FieldTable, x: u64) -> u64 {
        if x == 0 {
            return 0;
        }
        let y = big.pow(x, self.norm_exponent);
        self.inv[&(y as u32)] as u64
    }

    pub fn norm_exponent(&self) -> u64 {
        self.norm_exponent
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u64, k: u32) -> FieldTable {
        FieldTable::new(p, k, DEFAULT_FIELD_BUDGET).unwrap()
    }

    #[test]
    fn f3_generator_is_two() {
        let f = field(3, 1);
        assert_eq!(f.q(), 3);
        assert_eq!(f.generator(), 2);
        // single primitive element: alternate falls back to primary
        assert_eq!(f.alternate_generator(), 2);
    }

    #[test]
    fn f9_has_order_eight_generator() {
        let f = field(3, 2);
        assert_eq!(f.q(), 9);
        assert_eq!(f.modulus(), &[1, 0, 1]); // x^2 + 1
        assert_eq!(f.element_order(f.generator()).unwrap(), 8);
        assert_ne!(f.alternate_generator(), f.primary_generator());
        let alt = FieldTable::with_generator(3, 2, 1 << 24, GeneratorChoice::Alternate).unwrap();
        assert_eq!(alt.element_order(alt.generator()).unwrap(), 8);
    }

    #[test]
    fn even_characteristic_rejected() {
        assert!(matches!(
            FieldTable::new(2, 1, 1 << 24),
            Err(Error::OddCharacteristicRequired { .. })
        ));
    }

    #[test]
    fn budget_enforced() {
        assert!(matches!(
            FieldTable::new(3, 20, 1 << 24),
            Err(Error::FieldTooLarge { .. })
        ));
    }

    #[test]
    fn dlog_basics() {
        for f in [field(7, 1), field(3, 2), field(5, 2)] {
            assert_eq!(f.dlog(f.generator()).unwrap(), 1);
            assert_eq!(f.dlog(1).unwrap(), 0);
            // -1 is the unique element of order 2
            let minus_one = f.neg(1);
            assert_eq!(f.dlog(minus_one).unwrap(), (f.q() - 1) / 2);
            assert!(f.dlog(0).is_err());
        }
    }

    #[test]
    fn dlog_is_homomorphism_exhaustive() {
        // exhaustive over F_729
        let f = field(3, 6);
        let q = f.q();
        for a in 1..q {
            let la = f.dlog(a).unwrap();
            for b in a..q {
                let lb = f.dlog(b).unwrap();
                assert_eq!(f.dlog(f.mul(a, b)).unwrap(), (la + lb) % (q - 1));
            }
        }
    }

    #[test]
    fn addition_is_componentwise_and_consistent() {
        let f = field(3, 3);
        // spot-check associativity/commutativity and x + (-x) = 0
        for a in f.elements() {
            assert_eq!(f.add(a, f.neg(a)), 0);
            for b in f.elements() {
                assert_eq!(f.add(a, b), f.add(b, a));
            }
        }
        // distributivity on a sample
        for a in f.elements().step_by(3) {
            for b in f.elements().step_by(5) {
                for c in f.elements().step_by(7) {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn frobenius_fixes_exactly_the_prime_field() {
        for f in [field(3, 2), field(3, 3), field(5, 2)] {
            let fixed: Vec<u64> = f.elements().filter(|&x| f.frobenius(x) == x).collect();
            assert_eq!(fixed, (0..f.p()).collect::<Vec<_>>());
            // and is a permutation
            let mut image: Vec<u64> = f.elements().map(|x| f.frobenius(x)).collect();
            image.sort_unstable();
            assert_eq!(image, f.elements().collect::<Vec<_>>());
        }
    }

    #[test]
    fn norm_spec_examples() {
        let f9 = field(3, 2);
        let f3 = field(3, 1);
        assert_eq!(f9.relative_norm(&f3, 1).unwrap(), 1);
        assert_eq!(f9.relative_norm(&f3, 0).unwrap(), 0);
        let n = f9.relative_norm(&f3, f9.generator()).unwrap();
        assert_eq!(f3.element_order(n).unwrap(), 2); // generates F_3^x
    }

    #[test]
    fn norm_is_multiplicative_and_surjective() {
        let big = field(3, 4);
        for small in [field(3, 1), field(3, 2)] {
            let emb = SubfieldEmbedding::new(&big, &small).unwrap();
            let mut hit = vec![false; small.q() as usize];
            for x in 1..big.q() {
                hit[emb.norm(&big, x) as usize] = true;
            }
            for y in 1..small.q() {
                assert!(hit[y as usize], "norm misses {}", y);
            }
            for x in (1..big.q()).step_by(7) {
                for y in (1..big.q()).step_by(11) {
                    let lhs = emb.norm(&big, big.mul(x, y));
                    let rhs = small.mul(emb.norm(&big, x), emb.norm(&big, y));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn embedding_is_a_ring_hom() {
        let big = field(3, 4);
        let small = field(3, 2);
        let emb = SubfieldEmbedding::new(&big, &small).unwrap();
        for a in small.elements() {
            for b in small.elements() {
                assert_eq!(emb.embed(small.add(a, b)), big.add(emb.embed(a), emb.embed(b)));
                assert_eq!(emb.embed(small.mul(a, b)), big.mul(emb.embed(a), emb.embed(b)));
            }
        }
    }

    #[test]
    fn incompatible_fields_rejected() {
        let f27 = field(3, 3);
        let f9 = field(3, 2);
        assert!(matches!(
            SubfieldEmbedding::new(&f27, &f9),
            Err(Error::NotASubfield { .. })
        ));
    }
}
