//! Multivariate Laurent polynomials with exact coefficients, unreduced
//! fractions compared by cross-multiplication, and tropical (min-plus)
//! exponent vectors.

use crate::error::{Error, Result};
use crate::scalar::{CoeffRing, PrimeField, Rationals};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

/// Registry of variable names; exponent vectors are indexed against it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarRegistry {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl VarRegistry {
    pub fn new<S: Into<String>>(names: Vec<S>) -> Arc<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let index = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        Arc::new(VarRegistry { names, index })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }
}

/// A Laurent polynomial: map from dense exponent vectors to nonzero
/// coefficients in the ring `R`.
#[derive(Clone, PartialEq, Debug)]
pub struct MultiLaurent<R: CoeffRing> {
    pub ring: R,
    pub reg: Arc<VarRegistry>,
    terms: BTreeMap<Vec<i32>, R::Elem>,
}

impl<R: CoeffRing> MultiLaurent<R> {
    pub fn zero(ring: R, reg: Arc<VarRegistry>) -> Self {
        MultiLaurent {
            ring,
            reg,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: R, reg: Arc<VarRegistry>, c: R::Elem) -> Self {
        let mut t = BTreeMap::new();
        if !ring.is_zero(&c) {
            t.insert(vec![0; reg.len()], c);
        }
        MultiLaurent {
            ring,
            reg,
            terms: t,
        }
    }

    pub fn one(ring: R, reg: Arc<VarRegistry>) -> Self {
        let c = ring.one();
        Self::constant(ring, reg, c)
    }

    pub fn gen(ring: R, reg: Arc<VarRegistry>, var: usize) -> Self {
        Self::gen_pow(ring, reg, var, 1)
    }

    pub fn gen_pow(ring: R, reg: Arc<VarRegistry>, var: usize, e: i32) -> Self {
        let mut exps = vec![0; reg.len()];
        exps[var] = e;
        let c = ring.one();
        Self::monomial(ring, reg, exps, c)
    }

    pub fn monomial(ring: R, reg: Arc<VarRegistry>, exps: Vec<i32>, c: R::Elem) -> Self {
        assert_eq!(exps.len(), reg.len());
        let mut t = BTreeMap::new();
        if !ring.is_zero(&c) {
            t.insert(exps, c);
        }
        MultiLaurent {
            ring,
            reg,
            terms: t,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(e, c)| e.iter().all(|&x| x == 0) && self.ring.is_zero(&self.ring.sub(c, &self.ring.one())))
                .unwrap_or(false)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &R::Elem)> {
        self.terms.iter()
    }

    /// True when the polynomial is a single term; returns it.
    pub fn as_monomial(&self) -> Option<(&Vec<i32>, &R::Elem)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    fn check_compat(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.reg, &other.reg) || self.reg == other.reg {
            Ok(())
        } else {
            Err(Error::RegistryMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compat(other).expect("registry mismatch");
        let mut t = self.terms.clone();
        for (e, c) in &other.terms {
            match t.get_mut(e) {
                Some(x) => {
                    let s = self.ring.add(x, c);
                    if self.ring.is_zero(&s) {
                        t.remove(e);
                    } else {
                        *x = s;
                    }
                }
                None => {
                    t.insert(e.clone(), c.clone());
                }
            }
        }
        MultiLaurent {
            ring: self.ring.clone(),
            reg: self.reg.clone(),
            terms: t,
        }
    }

    pub fn neg(&self) -> Self {
        MultiLaurent {
            ring: self.ring.clone(),
            reg: self.reg.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), self.ring.neg(c)))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_compat(other).expect("registry mismatch");
        let mut t: BTreeMap<Vec<i32>, R::Elem> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<i32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let c = self.ring.mul(c1, c2);
                match t.get_mut(&e) {
                    Some(x) => {
                        let s = self.ring.add(x, &c);
                        if self.ring.is_zero(&s) {
                            t.remove(&e);
                        } else {
                            *x = s;
                        }
                    }
                    None => {
                        if !self.ring.is_zero(&c) {
                            t.insert(e, c);
                        }
                    }
                }
            }
        }
        MultiLaurent {
            ring: self.ring.clone(),
            reg: self.reg.clone(),
            terms: t,
        }
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        if self.ring.is_zero(c) {
            return Self::zero(self.ring.clone(), self.reg.clone());
        }
        MultiLaurent {
            ring: self.ring.clone(),
            reg: self.reg.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, x)| (e.clone(), self.ring.mul(x, c)))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.ring.clone(), self.reg.clone());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiply by a monomial given as an exponent vector.
    pub fn shift(&self, delta: &[i32]) -> Self {
        MultiLaurent {
            ring: self.ring.clone(),
            reg: self.reg.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    (
                        e.iter().zip(delta).map(|(a, b)| a + b).collect(),
                        c.clone(),
                    )
                })
                .collect(),
        }
    }

    /// Componentwise minimum of the exponent vectors over all terms.
    pub fn min_exponents(&self) -> Option<Vec<i32>> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, e| {
            acc.iter().zip(e).map(|(a, b)| (*a).min(*b)).collect()
        }))
    }

    /// Leading term in the lexicographic order on exponent vectors.
    fn leading(&self) -> Option<(&Vec<i32>, &R::Elem)> {
        self.terms.iter().next_back()
    }

    /// Exact division: returns q with q * b == a, or NotDivisible.
    pub fn div_exact(&self, b: &Self) -> Result<Self> {
        self.check_compat(b)?;
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero(self.ring.clone(), self.reg.clone()));
        }
        // Normalize both operands to honest polynomials with componentwise
        // minimal exponent zero; the quotient picks up the monomial shift.
        let ma = self.min_exponents().unwrap();
        let mb = b.min_exponents().unwrap();
        let na = self.shift(&ma.iter().map(|x| -x).collect::<Vec<_>>());
        let nb = b.shift(&mb.iter().map(|x| -x).collect::<Vec<_>>());
        let shift: Vec<i32> = ma.iter().zip(&mb).map(|(x, y)| x - y).collect();

        let mut rem = na;
        let mut quot = Self::zero(self.ring.clone(), self.reg.clone());
        let (lb_e, lb_c) = {
            let (e, c) = nb.leading().unwrap();
            (e.clone(), c.clone())
        };
        let lb_inv = self
            .ring
            .inv(&lb_c)
            .ok_or_else(|| Error::NotDivisible("leading coefficient not invertible".into()))?;
        while !rem.is_zero() {
            let (lr_e, lr_c) = {
                let (e, c) = rem.leading().unwrap();
                (e.clone(), c.clone())
            };
            let qe: Vec<i32> = lr_e.iter().zip(&lb_e).map(|(a, b)| a - b).collect();
            if qe.iter().any(|&x| x < 0) {
                return Err(Error::NotDivisible(format!(
                    "remainder with {} terms",
                    rem.num_terms()
                )));
            }
            let qc = self.ring.mul(&lr_c, &lb_inv);
            let qt = Self::monomial(self.ring.clone(), self.reg.clone(), qe, qc);
            rem = rem.sub(&qt.mul(&nb));
            quot = quot.add(&qt);
        }
        Ok(quot.shift(&shift))
    }

    /// Evaluate at a point: one ring element per variable. All variables must
    /// be assigned invertible values when negative exponents occur.
    pub fn eval(&self, point: &[R::Elem]) -> Result<R::Elem> {
        assert_eq!(point.len(), self.reg.len());
        let mut acc = self.ring.zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let base = if k > 0 {
                    point[i].clone()
                } else {
                    self.ring.inv(&point[i]).ok_or(Error::DivisionByZero)?
                };
                for _ in 0..k.unsigned_abs() {
                    m = self.ring.mul(&m, &base);
                }
            }
            acc = self.ring.add(&acc, &m);
        }
        Ok(acc)
    }

    /// Apply a variable substitution given by fractions, producing a fraction.
    pub fn subst(&self, map: &RationalMap<R>) -> Fraction<R> {
        // Horner-free expansion: sum over terms of prod images^exp.
        let one = Fraction::one(self.ring.clone(), map.target.clone());
        let mut acc = Fraction::zero(self.ring.clone(), map.target.clone());
        for (e, c) in &self.terms {
            let mut m = one.clone();
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let img = &map.images[i];
                let f = if k > 0 {
                    img.pow(k as u32)
                } else {
                    img.inv().expect("substituting zero image with negative exponent")
                        .pow((-k) as u32)
                };
                m = m.mul(&f);
            }
            m = m.scale(c);
            acc = acc.add(&m);
        }
        acc
    }

    /// True when every coefficient is positive (no stored zero coefficients).
    pub fn is_subtraction_free(&self) -> bool {
        self.terms.values().all(|c| self.ring.is_positive(c))
    }

    /// Reinterpret over a different registry via an index map
    /// (new_exponents[perm[i]] = old_exponents[i]).
    pub fn map_vars(&self, target: Arc<VarRegistry>, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.reg.len());
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut ne = vec![0; target.len()];
                for (i, &x) in e.iter().enumerate() {
                    ne[perm[i]] = x;
                }
                (ne, c.clone())
            })
            .collect();
        MultiLaurent {
            ring: self.ring.clone(),
            reg: target,
            terms,
        }
    }
}

impl MultiLaurent<Rationals> {
    /// Reduce mod p, mapping each variable through `var_map`.
    pub fn to_fp(&self, f: PrimeField, reg: Arc<VarRegistry>) -> MultiLaurent<PrimeField> {
        let terms = self
            .terms
            .iter()
            .filter_map(|(e, c)| {
                let num = c.numer();
                let den = c.denom();
                let n = f.from_i64(i64::try_from(num % num_bigint::BigInt::from(f.p)).unwrap());
                let d = f.from_i64(i64::try_from(den % num_bigint::BigInt::from(f.p)).unwrap());
                let v = f.mulm(n, f.invm(d).expect("denominator divisible by p"));
                if v == 0 {
                    None
                } else {
                    Some((e.clone(), v))
                }
            })
            .collect();
        MultiLaurent {
            ring: f,
            reg,
            terms,
        }
    }
}

impl<R: CoeffRing> fmt::Display for MultiLaurent<R> {
    fn fmt(&self, w: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(w, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(w, " + ")?;
            }
            first = false;
            let cs = self.ring.fmt_elem(c);
            let mut vars = String::new();
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if !vars.is_empty() {
                    vars.push('*');
                }
                if k == 1 {
                    vars.push_str(self.reg.name(i));
                } else {
                    vars.push_str(&format!("{}^{}", self.reg.name(i), k));
                }
            }
            match (cs.as_str(), vars.is_empty()) {
                (_, true) => write!(w, "{}", cs)?,
                ("1", false) => write!(w, "{}", vars)?,
                ("-1", false) => write!(w, "-{}", vars)?,
                (_, false) => write!(w, "{}*{}", cs, vars)?,
            }
        }
        Ok(())
    }
}

/// An unreduced fraction of Laurent polynomials. Equality is decided by
/// cross-multiplication, never by GCD computation.
#[derive(Clone, Debug)]
pub struct Fraction<R: CoeffRing> {
    pub num: MultiLaurent<R>,
    pub den: MultiLaurent<R>,
}

impl<R: CoeffRing> Fraction<R> {
    pub fn new(num: MultiLaurent<R>, den: MultiLaurent<R>) -> Self {
        assert!(!den.is_zero(), "fraction with zero denominator");
        Fraction { num, den }
    }

    pub fn from_poly(num: MultiLaurent<R>) -> Self {
        let den = MultiLaurent::one(num.ring.clone(), num.reg.clone());
        Fraction { num, den }
    }

    pub fn zero(ring: R, reg: Arc<VarRegistry>) -> Self {
        Fraction {
            num: MultiLaurent::zero(ring.clone(), reg.clone()),
            den: MultiLaurent::one(ring, reg),
        }
    }

    pub fn one(ring: R, reg: Arc<VarRegistry>) -> Self {
        Fraction {
            num: MultiLaurent::one(ring.clone(), reg.clone()),
            den: MultiLaurent::one(ring, reg),
        }
    }

    pub fn gen(ring: R, reg: Arc<VarRegistry>, var: usize) -> Self {
        Fraction::from_poly(MultiLaurent::gen(ring, reg, var))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        Fraction {
            num: self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            den: self.den.mul(&other.den),
        }
        .reduce_monomial_content()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Fraction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Fraction {
            num: self.num.mul(&other.num),
            den: self.den.mul(&other.den),
        }
        .reduce_monomial_content()
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        Fraction {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.num.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Fraction {
            num: self.den.clone(),
            den: self.num.clone(),
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Fraction::one(self.num.ring.clone(), self.num.reg.clone());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Signed power.
    pub fn powi(&self, e: i32) -> Result<Self> {
        if e >= 0 {
            Ok(self.pow(e as u32))
        } else {
            Ok(self.inv()?.pow((-e) as u32))
        }
    }

    /// Divide numerator and denominator by their monomial contents. This is a
    /// cheap normalization that keeps unreduced arithmetic from accumulating
    /// spurious monomial factors; it never computes polynomial GCDs.
    pub fn reduce_monomial_content(self) -> Self {
        let (Some(mn), Some(md)) = (self.num.min_exponents(), self.den.min_exponents()) else {
            return self;
        };
        let delta: Vec<i32> = mn.iter().zip(&md).map(|(a, b)| -((*a).min(*b))).collect();
        if delta.iter().all(|&x| x == 0) {
            return self;
        }
        Fraction {
            num: self.num.shift(&delta),
            den: self.den.shift(&delta),
        }
    }

    /// Cross-multiplication equality.
    pub fn eq_cross(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    pub fn eval(&self, point: &[R::Elem]) -> Result<R::Elem> {
        let n = self.num.eval(point)?;
        let d = self.den.eval(point)?;
        let di = self.num.ring.inv(&d).ok_or(Error::DivisionByZero)?;
        Ok(self.num.ring.mul(&n, &di))
    }

    pub fn subst(&self, map: &RationalMap<R>) -> Result<Self> {
        let n = self.num.subst(map);
        let d = self.den.subst(map);
        n.div(&d)
    }
}

impl<R: CoeffRing> PartialEq for Fraction<R> {
    fn eq(&self, other: &Self) -> bool {
        self.eq_cross(other)
    }
}

impl<R: CoeffRing> fmt::Display for Fraction<R> {
    fn fmt(&self, w: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(w, "{}", self.num)
        } else {
            write!(w, "({}) / ({})", self.num, self.den)
        }
    }
}

/// A substitution sending each variable of a source registry to a fraction
/// over a target registry.
#[derive(Clone, Debug)]
pub struct RationalMap<R: CoeffRing> {
    pub source: Arc<VarRegistry>,
    pub target: Arc<VarRegistry>,
    pub images: Vec<Fraction<R>>,
}

impl<R: CoeffRing> RationalMap<R> {
    pub fn identity(ring: R, reg: Arc<VarRegistry>) -> Self {
        let images = (0..reg.len())
            .map(|i| Fraction::gen(ring.clone(), reg.clone(), i))
            .collect();
        RationalMap {
            source: reg.clone(),
            target: reg,
            images,
        }
    }

    pub fn new(source: Arc<VarRegistry>, target: Arc<VarRegistry>, images: Vec<Fraction<R>>) -> Self {
        assert_eq!(source.len(), images.len());
        RationalMap {
            source,
            target,
            images,
        }
    }

    pub fn apply_fraction(&self, f: &Fraction<R>) -> Result<Fraction<R>> {
        f.subst(self)
    }

    /// self after other: (self . other)(x) = self(other(x)) requires
    /// other: A -> B and self: B -> C.
    pub fn compose(&self, other: &RationalMap<R>) -> Result<RationalMap<R>> {
        let images = other
            .images
            .iter()
            .map(|f| f.subst(self))
            .collect::<Result<Vec<_>>>()?;
        Ok(RationalMap {
            source: other.source.clone(),
            target: self.target.clone(),
            images,
        })
    }

    /// Evaluate the map at a numeric point of the target space, giving one
    /// value per source variable.
    pub fn eval_point(&self, point: &[R::Elem]) -> Result<Vec<R::Elem>> {
        self.images.iter().map(|f| f.eval(point)).collect()
    }
}

/// A point of the tropical semifield: the exponent vector of a Laurent
/// monomial in the initial generators. Addition is componentwise min,
/// multiplication is componentwise sum.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TropicalPoint {
    pub exps: Vec<i64>,
}

impl TropicalPoint {
    pub fn one(n: usize) -> Self {
        TropicalPoint { exps: vec![0; n] }
    }

    pub fn gen(n: usize, i: usize) -> Self {
        let mut exps = vec![0; n];
        exps[i] = 1;
        TropicalPoint { exps }
    }

    pub fn trop_add(&self, other: &Self) -> Result<Self> {
        if self.exps.len() != other.exps.len() {
            return Err(Error::LengthMismatch(format!(
                "{} vs {}",
                self.exps.len(),
                other.exps.len()
            )));
        }
        Ok(TropicalPoint {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| (*a).min(*b))
                .collect(),
        })
    }

    pub fn trop_mul(&self, other: &Self) -> Result<Self> {
        if self.exps.len() != other.exps.len() {
            return Err(Error::LengthMismatch(format!(
                "{} vs {}",
                self.exps.len(),
                other.exps.len()
            )));
        }
        Ok(TropicalPoint {
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn inv(&self) -> Self {
        TropicalPoint {
            exps: self.exps.iter().map(|x| -x).collect(),
        }
    }

    pub fn powi(&self, e: i64) -> Self {
        TropicalPoint {
            exps: self.exps.iter().map(|x| x * e).collect(),
        }
    }

    /// 1 (+) self, i.e. componentwise min with zero.
    pub fn add_one(&self) -> Self {
        TropicalPoint {
            exps: self.exps.iter().map(|x| (*x).min(0)).collect(),
        }
    }
}

/// The principal-coefficient projection from the universal semifield to the
/// tropical one: for a subtraction-free fraction, the exponent of y_i is the
/// minimal y_i-exponent of the numerator minus that of the denominator.
pub fn principal_part(f: &Fraction<Rationals>) -> Result<TropicalPoint> {
    if f.num.is_zero() {
        return Err(Error::NotSubtractionFree("zero numerator".into()));
    }
    if !f.num.is_subtraction_free() || !f.den.is_subtraction_free() {
        return Err(Error::NotSubtractionFree(
            "numerator and denominator must have positive coefficients".into(),
        ));
    }
    let mn = f.num.min_exponents().unwrap();
    let md = f.den.min_exponents().unwrap();
    Ok(TropicalPoint {
        exps: mn.iter().zip(&md).map(|(a, b)| (*a as i64) - (*b as i64)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn xy_reg() -> Arc<VarRegistry> {
        VarRegistry::new(vec!["x1", "x2", "x3"])
    }

    fn gen(reg: &Arc<VarRegistry>, i: usize) -> MultiLaurent<Rationals> {
        MultiLaurent::gen(Rationals, reg.clone(), i)
    }

    #[test]
    fn mul_identities() {
        let reg = xy_reg();
        let x1 = gen(&reg, 0);
        let x1i = MultiLaurent::gen_pow(Rationals, reg.clone(), 0, -1);
        assert!(x1.mul(&x1i).is_one());

        let x2 = gen(&reg, 1);
        let s = x1.add(&x2);
        let d = x1.sub(&x2);
        let p = s.mul(&d);
        let expect = x1.mul(&x1).sub(&x2.mul(&x2));
        assert_eq!(p, expect);
    }

    #[test]
    fn exact_division() {
        let reg = xy_reg();
        let x1 = gen(&reg, 0);
        let x2 = gen(&reg, 1);
        let x3 = gen(&reg, 2);
        let a = x1.mul(&x2).add(&x1.mul(&x3));
        let q = a.div_exact(&x1).unwrap();
        assert_eq!(q, x2.add(&x3));

        let bad = x1.add(&x2).div_exact(&x3);
        // x3 is a monomial, so division by it succeeds in the Laurent ring.
        assert!(bad.is_ok());
        let bad2 = x1.add(&x2).div_exact(&x1.add(&x3));
        assert!(matches!(bad2, Err(Error::NotDivisible(_))));
    }

    #[test]
    fn division_roundtrip_random() {
        let mut rng = StdRng::seed_from_u64(7);
        let reg = xy_reg();
        for _ in 0..40 {
            let a = random_poly(&mut rng, &reg, 4);
            let b = random_poly(&mut rng, &reg, 4);
            if b.is_zero() {
                continue;
            }
            let p = a.mul(&b);
            let q = p.div_exact(&b).unwrap();
            assert_eq!(q, a);
        }
    }

    fn random_poly(
        rng: &mut StdRng,
        reg: &Arc<VarRegistry>,
        nterms: usize,
    ) -> MultiLaurent<Rationals> {
        let mut p = MultiLaurent::zero(Rationals, reg.clone());
        for _ in 0..nterms {
            let e: Vec<i32> = (0..reg.len()).map(|_| rng.gen_range(-2..3)).collect();
            let c = rat(rng.gen_range(-4..5));
            p = p.add(&MultiLaurent::monomial(Rationals, reg.clone(), e, c));
        }
        p
    }

    #[test]
    fn ring_axioms_by_fp_evaluation() {
        // Associativity and distributivity checked at random points of F_p.
        let mut rng = StdRng::seed_from_u64(2024);
        let f = PrimeField::new(1_000_000_007);
        let reg = xy_reg();
        for _ in 0..8 {
            let a = random_poly(&mut rng, &reg, 3).to_fp(f, reg.clone());
            let b = random_poly(&mut rng, &reg, 3).to_fp(f, reg.clone());
            let c = random_poly(&mut rng, &reg, 3).to_fp(f, reg.clone());
            let ab_c = a.mul(&b).mul(&c);
            let a_bc = a.mul(&b.mul(&c));
            let dist_l = a.mul(&b.add(&c));
            let dist_r = a.mul(&b).add(&a.mul(&c));
            for _ in 0..20 {
                let pt: Vec<u64> = (0..reg.len()).map(|_| rng.gen_range(1..f.p)).collect();
                assert_eq!(ab_c.eval(&pt).unwrap(), a_bc.eval(&pt).unwrap());
                assert_eq!(dist_l.eval(&pt).unwrap(), dist_r.eval(&pt).unwrap());
                // evaluation is multiplicative
                let lhs = a.mul(&b).eval(&pt).unwrap();
                let rhs = f.mulm(a.eval(&pt).unwrap(), b.eval(&pt).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn tropical_ops() {
        let a = TropicalPoint { exps: vec![1, 0] };
        let b = TropicalPoint { exps: vec![0, 2] };
        assert_eq!(a.trop_add(&b).unwrap().exps, vec![0, 0]);
        assert_eq!(a.trop_add(&a).unwrap(), a);
        assert_eq!(a.trop_mul(&b).unwrap().exps, vec![1, 2]);
        let c = TropicalPoint { exps: vec![1] };
        assert!(a.trop_add(&c).is_err());
    }

    #[test]
    fn principal_part_examples() {
        let reg = VarRegistry::new(vec!["y1", "y2"]);
        let y1 = Fraction::gen(Rationals, reg.clone(), 0);
        let y2 = Fraction::gen(Rationals, reg.clone(), 1);
        let one = Fraction::one(Rationals, reg.clone());

        assert_eq!(principal_part(&y1).unwrap().exps, vec![1, 0]);

        // y1^2 y2 / (1 + y2) -> (2, 1)
        let f = y1.pow(2).mul(&y2).div(&one.add(&y2)).unwrap();
        assert_eq!(principal_part(&f).unwrap().exps, vec![2, 1]);

        // not subtraction-free
        let g = y1.sub(&y2);
        assert!(principal_part(&g).is_err());
    }

    #[test]
    fn principal_part_is_semifield_hom() {
        let mut rng = StdRng::seed_from_u64(5);
        let reg = VarRegistry::new(vec!["y1", "y2", "y3"]);
        for _ in 0..30 {
            let f = random_sf(&mut rng, &reg);
            let g = random_sf(&mut rng, &reg);
            let pf = principal_part(&f).unwrap();
            let pg = principal_part(&g).unwrap();
            let pm = principal_part(&f.mul(&g)).unwrap();
            let pa = principal_part(&f.add(&g)).unwrap();
            assert_eq!(pm, pf.trop_mul(&pg).unwrap());
            assert_eq!(pa, pf.trop_add(&pg).unwrap());
        }
    }

    fn random_sf(rng: &mut StdRng, reg: &Arc<VarRegistry>) -> Fraction<Rationals> {
        // random subtraction-free fraction: positive polynomials over monomials
        let mut num = MultiLaurent::zero(Rationals, reg.clone());
        for _ in 0..rng.gen_range(1..4) {
            let e: Vec<i32> = (0..reg.len()).map(|_| rng.gen_range(-2..3)).collect();
            num = num.add(&MultiLaurent::monomial(
                Rationals,
                reg.clone(),
                e,
                rat(rng.gen_range(1..4)),
            ));
        }
        let mut den = MultiLaurent::zero(Rationals, reg.clone());
        for _ in 0..rng.gen_range(1..3) {
            let e: Vec<i32> = (0..reg.len()).map(|_| rng.gen_range(-2..3)).collect();
            den = den.add(&MultiLaurent::monomial(
                Rationals,
                reg.clone(),
                e,
                rat(rng.gen_range(1..4)),
            ));
        }
        Fraction::new(num, den)
    }

    #[test]
    fn fraction_cross_eq() {
        let reg = xy_reg();
        let x1 = Fraction::gen(Rationals, reg.clone(), 0);
        let x2 = Fraction::gen(Rationals, reg.clone(), 1);
        // (x1^2 - x2^2)/(x1 - x2) == x1 + x2
        let f = x1.mul(&x1).sub(&x2.mul(&x2)).div(&x1.sub(&x2)).unwrap();
        let g = x1.add(&x2);
        assert!(f.eq_cross(&g));
        assert!(!f.eq_cross(&x1));
    }
}
