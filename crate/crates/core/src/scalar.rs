//! Scalar coefficient rings: exact rationals, 64-bit prime fields, and the
//! central ring of integer Laurent polynomials in epsilon.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Exact rational scalar.
pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    BigRational::from(BigInt::from(n))
}

/// A coefficient ring, held as a value so that prime fields can carry their
/// modulus.
pub trait CoeffRing: Clone + PartialEq + fmt::Debug {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn fmt_elem(&self, a: &Self::Elem) -> String;
    /// True when every stored coefficient of a subtraction-free expression
    /// must be positive. Only meaningful over ordered fields.
    fn is_positive(&self, a: &Self::Elem) -> bool;
}

/// The field of rational numbers.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct Rationals;

impl CoeffRing for Rationals {
    type Elem = Rat;

    fn zero(&self) -> Rat {
        Rat::zero()
    }
    fn one(&self) -> Rat {
        Rat::one()
    }
    fn is_zero(&self, a: &Rat) -> bool {
        a.is_zero()
    }
    fn neg(&self, a: &Rat) -> Rat {
        -a.clone()
    }
    fn add(&self, a: &Rat, b: &Rat) -> Rat {
        a + b
    }
    fn sub(&self, a: &Rat, b: &Rat) -> Rat {
        a - b
    }
    fn mul(&self, a: &Rat, b: &Rat) -> Rat {
        a * b
    }
    fn inv(&self, a: &Rat) -> Option<Rat> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn from_i64(&self, v: i64) -> Rat {
        rat(v)
    }
    fn fmt_elem(&self, a: &Rat) -> String {
        a.to_string()
    }
    fn is_positive(&self, a: &Rat) -> bool {
        a.is_positive()
    }
}

/// Arithmetic in F_p for a 64-bit prime p.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PrimeField {
    pub p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Self {
        PrimeField { p }
    }

    #[inline]
    pub fn addm(&self, a: u64, b: u64) -> u64 {
        let s = a.wrapping_add(b);
        if s >= self.p || s < a {
            s.wrapping_sub(self.p)
        } else {
            s
        }
    }

    #[inline]
    pub fn subm(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn mulm(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn powm(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        a %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mulm(acc, a);
            }
            a = self.mulm(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn invm(&self, a: u64) -> Option<u64> {
        if a % self.p == 0 {
            None
        } else {
            Some(self.powm(a, self.p - 2))
        }
    }

    /// Signed exponent power: a^e with e possibly negative.
    pub fn powi(&self, a: u64, e: i64) -> Option<u64> {
        if e >= 0 {
            Some(self.powm(a, e as u64))
        } else {
            self.invm(a).map(|ai| self.powm(ai, (-e) as u64))
        }
    }
}

impl CoeffRing for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a % self.p == 0
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        self.addm(*a, *b)
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        self.subm(*a, *b)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.mulm(*a, *b)
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        self.invm(*a)
    }
    fn from_i64(&self, v: i64) -> u64 {
        let r = v.rem_euclid(self.p as i64);
        r as u64
    }
    fn fmt_elem(&self, a: &u64) -> String {
        a.to_string()
    }
    fn is_positive(&self, _a: &u64) -> bool {
        true
    }
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let f = PrimeField::new(n);
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = f.powm(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = f.mulm(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// An element of Z[eps, eps^{-1}]: a finite map from integer exponents of
/// epsilon to nonzero integer coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct EpsScalar {
    terms: BTreeMap<i64, i64>,
}

impl EpsScalar {
    pub fn zero() -> Self {
        EpsScalar::default()
    }

    pub fn one() -> Self {
        EpsScalar::eps_pow(0)
    }

    pub fn int(c: i64) -> Self {
        let mut t = BTreeMap::new();
        if c != 0 {
            t.insert(0, c);
        }
        EpsScalar { terms: t }
    }

    /// eps^k
    pub fn eps_pow(k: i64) -> Self {
        let mut t = BTreeMap::new();
        t.insert(k, 1);
        EpsScalar { terms: t }
    }

    pub fn term(k: i64, c: i64) -> Self {
        let mut t = BTreeMap::new();
        if c != 0 {
            t.insert(k, c);
        }
        EpsScalar { terms: t }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0) == Some(&1)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.terms.iter().map(|(k, c)| (*k, *c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut t = self.terms.clone();
        for (k, c) in &other.terms {
            let e = t.entry(*k).or_insert(0);
            *e = e.checked_add(*c).expect("eps coefficient overflow");
            if *e == 0 {
                t.remove(k);
            }
        }
        EpsScalar { terms: t }
    }

    pub fn neg(&self) -> Self {
        EpsScalar {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut t: BTreeMap<i64, i64> = BTreeMap::new();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let k = k1 + k2;
                let c = c1.checked_mul(*c2).expect("eps coefficient overflow");
                let e = t.entry(k).or_insert(0);
                *e = e.checked_add(c).expect("eps coefficient overflow");
                if *e == 0 {
                    t.remove(&k);
                }
            }
        }
        EpsScalar { terms: t }
    }

    pub fn mul_eps_pow(&self, k: i64) -> Self {
        EpsScalar {
            terms: self.terms.iter().map(|(e, c)| (e + k, *c)).collect(),
        }
    }

    /// Evaluate at eps = 1.
    pub fn eval_classical(&self) -> i64 {
        self.terms.values().sum()
    }

    /// Evaluate at eps = zeta in F_p.
    pub fn eval_fp(&self, f: &PrimeField, zeta: u64) -> u64 {
        let mut acc = 0u64;
        for (k, c) in &self.terms {
            let z = f.powi(zeta, *k).expect("zeta must be invertible");
            let cc = f.from_i64(*c);
            acc = f.addm(acc, f.mulm(z, cc));
        }
        acc
    }
}

impl fmt::Display for EpsScalar {
    fn fmt(&self, w: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(w, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            let sign = if *c < 0 { "-" } else { "+" };
            if first {
                if *c < 0 {
                    write!(w, "-")?;
                }
                first = false;
            } else {
                write!(w, " {} ", sign)?;
            }
            let ac = c.unsigned_abs();
            match (*k, ac) {
                (0, a) => write!(w, "{}", a)?,
                (1, 1) => write!(w, "e")?,
                (1, a) => write!(w, "{}*e", a)?,
                (kk, 1) => write!(w, "e^{}", kk)?,
                (kk, a) => write!(w, "{}*e^{}", a, kk)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_basics() {
        let f = PrimeField::new(101);
        assert_eq!(f.addm(100, 5), 4);
        assert_eq!(f.mulm(50, 51), (50 * 51) % 101);
        let i = f.invm(7).unwrap();
        assert_eq!(f.mulm(7, i), 1);
        assert_eq!(f.invm(0), None);
    }

    #[test]
    fn miller_rabin() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64((1u64 << 61) - 1));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(561));
        assert!(!is_prime_u64((1u64 << 61) - 3));
    }

    #[test]
    fn eps_scalar_arith() {
        let a = EpsScalar::eps_pow(2).add(&EpsScalar::int(3));
        let b = EpsScalar::eps_pow(-1);
        let p = a.mul(&b);
        assert_eq!(p, EpsScalar::eps_pow(1).add(&EpsScalar::term(-1, 3)));
        assert_eq!(p.eval_classical(), 4);
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn eps_eval_fp() {
        let f = PrimeField::new(11);
        // zeta = 3 has order 5 mod 11
        let s = EpsScalar::eps_pow(5).sub(&EpsScalar::one());
        assert_eq!(s.eval_fp(&f, 3), 0);
    }
}
