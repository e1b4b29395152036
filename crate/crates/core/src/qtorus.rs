//! Quantum tori: noncommutative Laurent polynomials over Z[eps, eps^{-1}]
//! whose generators commute up to integer powers of epsilon, together with
//! the commutation data used throughout (the two-column torus, the cylindric
//! network torus organized by snake paths, and the y-variable torus of a
//! quiver), and the kappa and alpha building blocks.

use crate::error::{Error, Result};
use crate::quiver::{wrap, ExchangeMatrix, Vertex};
use crate::scalar::{CoeffRing, EpsScalar, PrimeField};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

/// Generator labels. The derived ordering is the canonical normal-ordering
/// of monomials: p's before q's by index, network generators by (column,
/// row), y-generators by vertex label.
#[derive(
    Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize,
)]
pub enum Gen {
    P(u8),
    Q(u8),
    Net { col: u8, row: u8 },
    Y(Vertex),
    Free(String),
}

impl fmt::Display for Gen {
    fn fmt(&self, w: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::P(i) => write!(w, "p{}", i),
            Gen::Q(i) => write!(w, "q{}", i),
            Gen::Net { col, row } => write!(w, "q[{},{}]", col, row),
            Gen::Y(v) => write!(w, "y{}", v),
            Gen::Free(s) => write!(w, "{}", s),
        }
    }
}

/// The commutation data of a quantum torus: g_a g_b = eps^{lambda_ab} g_b g_a.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CommutationMatrix {
    gens: Vec<Gen>,
    #[serde(skip)]
    index: HashMap<Gen, usize>,
    lambda: Vec<i64>,
}

impl CommutationMatrix {
    pub fn new(mut gens: Vec<Gen>, entries: &[(Gen, Gen, i64)]) -> Arc<Self> {
        gens.sort();
        gens.dedup();
        let index: HashMap<Gen, usize> = gens.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
        let n = gens.len();
        let mut lambda = vec![0i64; n * n];
        for (a, b, v) in entries {
            let ia = index[a];
            let ib = index[b];
            lambda[ia * n + ib] = *v;
            lambda[ib * n + ia] = -*v;
        }
        Arc::new(CommutationMatrix { gens, index, lambda })
    }

    /// Rebuild the lookup table (used after deserialization).
    pub fn rebuild_index(&mut self) {
        self.index = self
            .gens
            .iter()
            .enumerate()
            .map(|(i, g)| (g.clone(), i))
            .collect();
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn gens(&self) -> &[Gen] {
        &self.gens
    }

    pub fn index_of(&self, g: &Gen) -> Result<usize> {
        self.index
            .get(g)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(g.to_string()))
    }

    pub fn lambda_at(&self, a: usize, b: usize) -> i64 {
        self.lambda[a * self.gens.len() + b]
    }

    pub fn lambda(&self, a: &Gen, b: &Gen) -> i64 {
        self.lambda_at(self.index[a], self.index[b])
    }

    /// Restriction to a generator subset (indices into this registry).
    /// Returns the restricted matrix and, for each old index, its position in
    /// the restriction (if kept).
    pub fn restrict(&self, keep: &[usize]) -> (Arc<CommutationMatrix>, HashMap<usize, usize>) {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let gens: Vec<Gen> = keep.iter().map(|&i| self.gens[i].clone()).collect();
        let index: HashMap<Gen, usize> = gens.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
        let n = gens.len();
        let mut lambda = vec![0i64; n * n];
        for (i, &a) in keep.iter().enumerate() {
            for (j, &b) in keep.iter().enumerate() {
                lambda[i * n + j] = self.lambda_at(a, b);
            }
        }
        let map = keep.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        (Arc::new(CommutationMatrix { gens, index, lambda }), map)
    }
}

/// Commutation data of the two-column torus on generators p_1..p_n,
/// q_1..q_n.
pub fn lambda_pq(n: usize) -> Result<Arc<CommutationMatrix>> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "two-column torus needs n >= 3, got {}",
            n
        )));
    }
    let mut gens = Vec::new();
    for i in 1..=n {
        gens.push(Gen::P(i as u8));
        gens.push(Gen::Q(i as u8));
    }
    let mut entries = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            // p_i q_j
            let v = if j == i || j == wrap(n, i as i64 - 2) {
                1
            } else if j == wrap(n, i as i64 - 1) {
                -2
            } else {
                0
            };
            if v != 0 {
                entries.push((Gen::P(i as u8), Gen::Q(j as u8), v));
            }
            // r_i r_j for r = p and r = q
            if j == wrap(n, i as i64 - 1) && i != j {
                entries.push((Gen::P(i as u8), Gen::P(j as u8), 1));
                entries.push((Gen::Q(i as u8), Gen::Q(j as u8), 1));
            }
        }
    }
    Ok(CommutationMatrix::new(gens, &entries))
}

/// Snake-path index of the crossing (col j, row i): i + j - 1 mod n.
pub fn snake_index(n: usize, col: usize, row: usize) -> usize {
    (row + col - 1) % n
}

/// Commutation data of the cylindric network torus on q_{j,i} for columns
/// 1..=m and rows 1..=n, organized by snake paths.
pub fn lambda_snake(n: usize, m: usize) -> Result<Arc<CommutationMatrix>> {
    if n < 3 || m < 1 {
        return Err(Error::InvalidParameter(format!(
            "network torus needs n >= 3, m >= 1, got n={}, m={}",
            n, m
        )));
    }
    let mut gens = Vec::new();
    for j in 1..=m {
        for i in 1..=n {
            gens.push(Gen::Net {
                col: j as u8,
                row: i as u8,
            });
        }
    }
    let mut entries = Vec::new();
    for j in 1..=m {
        for i in 1..=n {
            for jp in 1..=m {
                for ip in 1..=n {
                    if (j, i) >= (jp, ip) {
                        continue;
                    }
                    let sa = snake_index(n, j, i);
                    let sb = snake_index(n, jp, ip);
                    let v = if sa == (sb + 1) % n {
                        if j <= jp {
                            1
                        } else {
                            -1
                        }
                    } else if sa == sb {
                        if j < jp {
                            -2
                        } else if j > jp {
                            2
                        } else {
                            0
                        }
                    } else if (sa + 1) % n == sb {
                        // antisymmetric counterpart
                        if jp <= j {
                            -1
                        } else {
                            1
                        }
                    } else {
                        0
                    };
                    if v != 0 {
                        entries.push((
                            Gen::Net {
                                col: j as u8,
                                row: i as u8,
                            },
                            Gen::Net {
                                col: jp as u8,
                                row: ip as u8,
                            },
                            v,
                        ));
                    }
                }
            }
        }
    }
    Ok(CommutationMatrix::new(gens, &entries))
}

/// Commutation data of the quantum y-torus of an exchange matrix:
/// y_a y_b = eps^{2 b_{ba}} y_b y_a on the mutable vertices.
pub fn lambda_y(q: &ExchangeMatrix) -> Arc<CommutationMatrix> {
    let verts: Vec<Vertex> = q.mutable_verts().collect();
    let gens: Vec<Gen> = verts.iter().map(|&v| Gen::Y(v)).collect();
    let mut entries = Vec::new();
    for &a in &verts {
        for &b in &verts {
            if a < b {
                let v = 2 * q.b(b, a);
                if v != 0 {
                    entries.push((Gen::Y(a), Gen::Y(b), v));
                }
            }
        }
    }
    CommutationMatrix::new(gens, &entries)
}

/// A free quantum torus on named generators with prescribed exponents.
pub fn lambda_free(names: &[&str], entries: &[(&str, &str, i64)]) -> Arc<CommutationMatrix> {
    let gens: Vec<Gen> = names.iter().map(|s| Gen::Free(s.to_string())).collect();
    let es: Vec<(Gen, Gen, i64)> = entries
        .iter()
        .map(|(a, b, v)| (Gen::Free(a.to_string()), Gen::Free(b.to_string()), *v))
        .collect();
    CommutationMatrix::new(gens, &es)
}

/// A noncommutative Laurent polynomial in canonical normal order: a map
/// from exponent vectors (over the registry order) to EpsScalar
/// coefficients.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NCLaurent {
    #[serde(with = "arc_comm")]
    comm: Arc<CommutationMatrix>,
    terms: BTreeMap<Vec<i32>, EpsScalar>,
}

mod arc_comm {
    use super::CommutationMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::sync::Arc;

    pub fn serialize<S: Serializer>(
        v: &Arc<CommutationMatrix>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        v.as_ref().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Arc<CommutationMatrix>, D::Error> {
        let mut m = CommutationMatrix::deserialize(d)?;
        m.rebuild_index();
        Ok(Arc::new(m))
    }
}

impl PartialEq for NCLaurent {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.comm, &other.comm) || self.comm == other.comm)
            && self.terms == other.terms
    }
}

impl NCLaurent {
    pub fn zero(comm: Arc<CommutationMatrix>) -> Self {
        NCLaurent {
            comm,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(comm: Arc<CommutationMatrix>) -> Self {
        Self::scalar(comm, EpsScalar::one())
    }

    pub fn scalar(comm: Arc<CommutationMatrix>, c: EpsScalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; comm.len()], c);
        }
        NCLaurent { comm, terms }
    }

    pub fn gen(comm: Arc<CommutationMatrix>, idx: usize) -> Self {
        Self::gen_pow(comm, idx, 1)
    }

    pub fn gen_pow(comm: Arc<CommutationMatrix>, idx: usize, e: i32) -> Self {
        let mut exps = vec![0; comm.len()];
        exps[idx] = e;
        Self::monomial(comm, exps, EpsScalar::one())
    }

    pub fn monomial(comm: Arc<CommutationMatrix>, exps: Vec<i32>, c: EpsScalar) -> Self {
        assert_eq!(exps.len(), comm.len());
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        NCLaurent { comm, terms }
    }

    pub fn comm(&self) -> &Arc<CommutationMatrix> {
        &self.comm
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &EpsScalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_monomial(&self) -> Option<(&Vec<i32>, &EpsScalar)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    fn check_compat(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.comm, &other.comm) || self.comm == other.comm {
            Ok(())
        } else {
            Err(Error::RegistryMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compat(other).expect("registry mismatch");
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            match terms.get_mut(e) {
                Some(x) => {
                    let s = x.add(c);
                    if s.is_zero() {
                        terms.remove(e);
                    } else {
                        *x = s;
                    }
                }
                None => {
                    terms.insert(e.clone(), c.clone());
                }
            }
        }
        NCLaurent {
            comm: self.comm.clone(),
            terms,
        }
    }

    pub fn neg(&self) -> Self {
        NCLaurent {
            comm: self.comm.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Crossing exponent picked up when the normal-ordered monomial u is
    /// multiplied on the right by the normal-ordered monomial v.
    fn crossing(&self, u: &[i32], v: &[i32]) -> i64 {
        let n = self.comm.len();
        let mut acc = 0i64;
        for b in 0..n {
            if u[b] == 0 {
                continue;
            }
            for a in 0..b {
                if v[a] == 0 {
                    continue;
                }
                acc += self.comm.lambda_at(b, a) * (u[b] as i64) * (v[a] as i64);
            }
        }
        acc
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_compat(other).expect("registry mismatch");
        let mut terms: BTreeMap<Vec<i32>, EpsScalar> = BTreeMap::new();
        for (u, cu) in &self.terms {
            for (v, cv) in &other.terms {
                let w: Vec<i32> = u.iter().zip(v).map(|(a, b)| a + b).collect();
                let delta = self.crossing(u, v);
                let c = cu.mul(cv).mul_eps_pow(delta);
                match terms.get_mut(&w) {
                    Some(x) => {
                        let s = x.add(&c);
                        if s.is_zero() {
                            terms.remove(&w);
                        } else {
                            *x = s;
                        }
                    }
                    None => {
                        if !c.is_zero() {
                            terms.insert(w, c);
                        }
                    }
                }
            }
        }
        NCLaurent {
            comm: self.comm.clone(),
            terms,
        }
    }

    pub fn scale(&self, c: &EpsScalar) -> Self {
        if c.is_zero() {
            return Self::zero(self.comm.clone());
        }
        NCLaurent {
            comm: self.comm.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, x)| (e.clone(), x.mul(c)))
                .collect(),
        }
    }

    /// The epsilon exponent alpha with m m' = eps^alpha m' m for monomial
    /// exponent vectors; total for monomials (they always quasi-commute).
    pub fn alpha_exponent(comm: &CommutationMatrix, u: &[i32], v: &[i32]) -> i64 {
        let n = comm.len();
        let mut acc = 0i64;
        for a in 0..n {
            if u[a] == 0 {
                continue;
            }
            for b in 0..n {
                if v[b] == 0 {
                    continue;
                }
                acc += comm.lambda_at(a, b) * (u[a] as i64) * (v[b] as i64);
            }
        }
        acc
    }

    /// x P x^{-1} for a monomial x: each term of P picks up
    /// eps^{alpha(x, term)}.
    pub fn conjugate_by_monomial(&self, x: &[i32]) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let a = Self::alpha_exponent(&self.comm, x, e);
                (e.clone(), c.mul_eps_pow(a))
            })
            .collect();
        NCLaurent {
            comm: self.comm.clone(),
            terms,
        }
    }

    /// Build the normal form of an ordered word of generator powers.
    pub fn from_word(comm: Arc<CommutationMatrix>, word: &[(usize, i32)]) -> Self {
        let mut acc = Self::one(comm.clone());
        for &(g, e) in word {
            acc = acc.mul(&Self::gen_pow(comm.clone(), g, e));
        }
        acc
    }

    /// Evaluate at eps = 1 with commuting generator values in F_p.
    pub fn eval_classical(&self, f: &PrimeField, point: &[u64]) -> Result<u64> {
        let mut acc = 0u64;
        for (e, c) in &self.terms {
            let mut m = f.from_i64(c.eval_classical());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let v = f
                    .powi(point[i], k as i64)
                    .ok_or(Error::DivisionByZero)?;
                m = f.mulm(m, v);
            }
            acc = f.addm(acc, m);
        }
        Ok(acc)
    }
}

impl fmt::Display for NCLaurent {
    fn fmt(&self, w: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(w, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(w, " + ")?;
            }
            first = false;
            let mut word = String::new();
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if !word.is_empty() {
                    word.push(' ');
                }
                if k == 1 {
                    word.push_str(&self.comm.gens[i].to_string());
                } else {
                    word.push_str(&format!("{}^{}", self.comm.gens[i], k));
                }
            }
            if word.is_empty() {
                write!(w, "({})", c)?;
            } else if c.is_one() {
                write!(w, "{}", word)?;
            } else {
                write!(w, "({}) {}", c, word)?;
            }
        }
        Ok(())
    }
}

/// kappa_i as a quantum polynomial: sum over j of
/// p_{i-1} p_{i-2} ... p_{i-j} q_{i-j-2} ... q_{i-n}, with the factors in
/// exactly this order. `p` and `q` list the generator indices for positions
/// 1..=n.
pub fn kappa_eps(
    comm: &Arc<CommutationMatrix>,
    n: usize,
    i: i64,
    p: &[usize],
    q: &[usize],
) -> NCLaurent {
    let mut acc = NCLaurent::zero(comm.clone());
    for j in 0..n as i64 {
        let mut word: Vec<(usize, i32)> = Vec::new();
        for l in 1..=j {
            word.push((p[wrap(n, i - l) - 1], 1));
        }
        for l in j + 2..=n as i64 {
            word.push((q[wrap(n, i - l) - 1], 1));
        }
        acc = acc.add(&NCLaurent::from_word(comm.clone(), &word));
    }
    acc
}

/// alpha_i as a quantum polynomial: 1 + sum_{k=1}^{n-1} eps^k
/// y_i y_{i+1} ... y_{i+k-1}. `y` lists the generator indices for positions
/// 1..=n.
pub fn alpha_eps(comm: &Arc<CommutationMatrix>, n: usize, i: i64, y: &[usize]) -> NCLaurent {
    let mut acc = NCLaurent::one(comm.clone());
    for k in 1..=n as i64 - 1 {
        let word: Vec<(usize, i32)> = (0..k).map(|l| (y[wrap(n, i + l) - 1], 1)).collect();
        let m = NCLaurent::from_word(comm.clone(), &word).scale(&EpsScalar::eps_pow(k));
        acc = acc.add(&m);
    }
    acc
}

/// Central products prod p_i and prod q_i (descending order as written in
/// the lens parameter).
pub fn central_product(comm: &Arc<CommutationMatrix>, gens: &[usize]) -> NCLaurent {
    let word: Vec<(usize, i32)> = gens.iter().rev().map(|&g| (g, 1)).collect();
    NCLaurent::from_word(comm.clone(), &word)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::build_q;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn pq_indices(comm: &CommutationMatrix, n: usize) -> (Vec<usize>, Vec<usize>) {
        let p = (1..=n)
            .map(|i| comm.index_of(&Gen::P(i as u8)).unwrap())
            .collect();
        let q = (1..=n)
            .map(|i| comm.index_of(&Gen::Q(i as u8)).unwrap())
            .collect();
        (p, q)
    }

    #[test]
    fn pq_relations() {
        for n in [3usize, 4, 5] {
            let c = lambda_pq(n).unwrap();
            for i in 1..=n {
                let pi = Gen::P(i as u8);
                assert_eq!(c.lambda(&pi, &Gen::Q(i as u8)), 1, "n={} i={}", n, i);
                assert_eq!(
                    c.lambda(&pi, &Gen::Q(wrap(n, i as i64 - 1) as u8)),
                    -2
                );
                assert_eq!(c.lambda(&pi, &Gen::Q(wrap(n, i as i64 - 2) as u8)), 1);
                // index-shift invariance
                for j in 1..=n {
                    let v = c.lambda(&Gen::P(i as u8), &Gen::Q(j as u8));
                    let vs = c.lambda(
                        &Gen::P(wrap(n, i as i64 + 1) as u8),
                        &Gen::Q(wrap(n, j as i64 + 1) as u8),
                    );
                    assert_eq!(v, vs);
                }
            }
        }
    }

    #[test]
    fn snake_restriction_matches_pq() {
        // two adjacent columns of the network torus carry the p,q relations
        for n in [3usize, 4] {
            let m = 3;
            let net = lambda_snake(n, m).unwrap();
            let pq = lambda_pq(n).unwrap();
            for j in 1..m {
                for a in 1..=n {
                    for b in 1..=n {
                        let p_a = Gen::Net {
                            col: j as u8,
                            row: a as u8,
                        };
                        let q_b = Gen::Net {
                            col: (j + 1) as u8,
                            row: b as u8,
                        };
                        assert_eq!(
                            net.lambda(&p_a, &q_b),
                            pq.lambda(&Gen::P(a as u8), &Gen::Q(b as u8)),
                            "n={} j={} a={} b={}",
                            n,
                            j,
                            a,
                            b
                        );
                        let p_b = Gen::Net {
                            col: j as u8,
                            row: b as u8,
                        };
                        assert_eq!(
                            net.lambda(&p_a, &p_b),
                            pq.lambda(&Gen::P(a as u8), &Gen::P(b as u8))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn snake_same_and_far() {
        let n = 4;
        let net = lambda_snake(n, 3).unwrap();
        // same snake path, columns j < j': exponent -2
        let a = Gen::Net { col: 1, row: 1 }; // snake (1+1-1) mod 4 = 1
        let b = Gen::Net { col: 2, row: 4 }; // snake (4+2-1) mod 4 = 1
        assert_eq!(net.lambda(&a, &b), -2);
        // non-adjacent snake paths commute
        let c = Gen::Net { col: 1, row: 3 }; // snake 3
        assert_eq!(net.lambda(&a, &c), 0);
    }

    #[test]
    fn y_torus_relations() {
        let q = build_q(3, 2).unwrap();
        let c = lambda_y(&q);
        let y = |cy: usize, p: usize| Gen::Y(Vertex::grid(cy, p));
        // y_{ji} y_{j+1,i} = eps^2 ...
        assert_eq!(c.lambda(&y(1, 1), &y(2, 1)), 2);
        // y_{ji} y_{j,i+1} = eps^{-2} ...
        assert_eq!(c.lambda(&y(1, 1), &y(1, 2)), -2);
        // y_{ji} y_{j+1,i-1} = eps^{-2} ...
        assert_eq!(c.lambda(&y(1, 1), &y(2, 3)), -2);
        // lambda = 2 B^T on all pairs
        for &a in q.verts() {
            for &b in q.verts() {
                assert_eq!(c.lambda(&Gen::Y(a), &Gen::Y(b)), 2 * q.b(b, a));
            }
        }
    }

    #[test]
    fn word_normalization_consistent() {
        // multiplying generators in any association order gives the same
        // normal form
        let mut rng = StdRng::seed_from_u64(23);
        let comm = lambda_pq(3).unwrap();
        let ngen = comm.len();
        for _ in 0..40 {
            let len = rng.gen_range(2..8);
            let word: Vec<(usize, i32)> = (0..len)
                .map(|_| (rng.gen_range(0..ngen), *[-1i32, 1, 2].get(rng.gen_range(0..3)).unwrap()))
                .collect();
            let direct = NCLaurent::from_word(comm.clone(), &word);
            let split = rng.gen_range(1..len);
            let left = NCLaurent::from_word(comm.clone(), &word[..split]);
            let right = NCLaurent::from_word(comm.clone(), &word[split..]);
            assert_eq!(direct, left.mul(&right));
        }
    }

    #[test]
    fn mul_associative_random() {
        let mut rng = StdRng::seed_from_u64(31);
        let comm = lambda_pq(3).unwrap();
        let ngen = comm.len();
        let rand_poly = |rng: &mut StdRng| {
            let mut acc = NCLaurent::zero(comm.clone());
            for _ in 0..5 {
                let e: Vec<i32> = (0..ngen).map(|_| rng.gen_range(-1..2)).collect();
                acc = acc.add(&NCLaurent::monomial(
                    comm.clone(),
                    e,
                    EpsScalar::term(rng.gen_range(-2..3), rng.gen_range(-2..3)),
                ));
            }
            acc
        };
        for _ in 0..10 {
            let a = rand_poly(&mut rng);
            let b = rand_poly(&mut rng);
            let c = rand_poly(&mut rng);
            assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            // distributivity
            assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        }
    }

    #[test]
    fn single_relation() {
        let comm = lambda_pq(3).unwrap();
        let (p, q) = pq_indices(&comm, 3);
        // p1 q1 = eps q1 p1: both words normalize to the same basis monomial
        // up to the crossing power.
        let pq_word = NCLaurent::from_word(comm.clone(), &[(p[0], 1), (q[0], 1)]);
        let qp_word = NCLaurent::from_word(comm.clone(), &[(q[0], 1), (p[0], 1)]);
        assert_eq!(pq_word, qp_word.scale(&EpsScalar::eps_pow(1)));
    }

    #[test]
    fn central_products() {
        for n in [3usize, 4] {
            let comm = lambda_pq(n).unwrap();
            let (p, q) = pq_indices(&comm, n);
            let pp = central_product(&comm, &p);
            let qq = central_product(&comm, &q);
            for g in 0..comm.len() {
                let gen = NCLaurent::gen(comm.clone(), g);
                assert_eq!(pp.mul(&gen), gen.mul(&pp));
                assert_eq!(qq.mul(&gen), gen.mul(&qq));
            }
        }
    }

    #[test]
    fn kappa_printed_n4() {
        // classical shadow of kappa_1 for n=4: q1q2q3 + p4q1q2 + p3p4q1 + p2p3p4
        let comm = lambda_pq(4).unwrap();
        let (p, q) = pq_indices(&comm, 4);
        let k1 = kappa_eps(&comm, 4, 1, &p, &q);
        assert_eq!(k1.num_terms(), 4);
        for (e, _) in k1.terms() {
            let deg: i32 = e.iter().sum();
            assert_eq!(deg, 3);
        }
        let f = PrimeField::new(1_000_003);
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..10 {
            let pt: Vec<u64> = (0..comm.len()).map(|_| rng.gen_range(1..f.p)).collect();
            let val = |gens: &[usize]| {
                gens.iter()
                    .map(|&g| pt[g])
                    .fold(1u64, |acc, v| f.mulm(acc, v))
            };
            let expect = f.addm(
                f.addm(val(&[q[0], q[1], q[2]]), val(&[p[3], q[0], q[1]])),
                f.addm(val(&[p[2], p[3], q[0]]), val(&[p[1], p[2], p[3]])),
            );
            assert_eq!(k1.eval_classical(&f, &pt).unwrap(), expect);
        }
    }

    #[test]
    fn pq_kappa_identity() {
        // p_i q_i kappa_{i+1} = eps^{-1} kappa_{i+1} p_i q_i, exactly
        for n in [3usize, 4] {
            let comm = lambda_pq(n).unwrap();
            let (p, q) = pq_indices(&comm, n);
            for i in 1..=n as i64 {
                let k = kappa_eps(&comm, n, i + 1, &p, &q);
                let pi = NCLaurent::gen(comm.clone(), p[wrap(n, i) - 1]);
                let qi = NCLaurent::gen(comm.clone(), q[wrap(n, i) - 1]);
                let lhs = pi.mul(&qi).mul(&k);
                let rhs = k.mul(&pi).mul(&qi).scale(&EpsScalar::eps_pow(-1));
                assert_eq!(lhs, rhs, "n={} i={}", n, i);
                // and q_i p_i kappa_i = eps kappa_i q_i p_i
                let ki = kappa_eps(&comm, n, i, &p, &q);
                let lhs2 = qi.mul(&pi).mul(&ki);
                let rhs2 = ki.mul(&qi).mul(&pi).scale(&EpsScalar::eps_pow(1));
                assert_eq!(lhs2, rhs2, "n={} i={}", n, i);
            }
        }
    }

    #[test]
    fn alpha_printed_n3() {
        // alpha_1 = 1 + eps y1 + eps^2 y1 y2 on the middle cycle of the
        // quiver torus
        let qq = build_q(3, 2).unwrap();
        let comm = lambda_y(&qq);
        let y: Vec<usize> = (1..=3)
            .map(|i| comm.index_of(&Gen::Y(Vertex::grid(1, i))).unwrap())
            .collect();
        let a1 = alpha_eps(&comm, 3, 1, &y);
        let mut expect = NCLaurent::one(comm.clone());
        expect = expect.add(&NCLaurent::gen(comm.clone(), y[0]).scale(&EpsScalar::eps_pow(1)));
        expect = expect.add(
            &NCLaurent::from_word(comm.clone(), &[(y[0], 1), (y[1], 1)])
                .scale(&EpsScalar::eps_pow(2)),
        );
        assert_eq!(a1, expect);
        // classical shadow has all coefficients 1
        for (_, c) in a1.terms() {
            assert_eq!(c.eval_classical(), 1);
        }
    }

    #[test]
    fn alpha_recursion_n4() {
        // alpha_i = 1 + eps y_i * (alpha_{i+1} truncated to degree n-2)
        let qq = build_q(4, 2).unwrap();
        let comm = lambda_y(&qq);
        let y: Vec<usize> = (1..=4)
            .map(|i| comm.index_of(&Gen::Y(Vertex::grid(1, i))).unwrap())
            .collect();
        let a1 = alpha_eps(&comm, 4, 1, &y);
        let a2 = alpha_eps(&comm, 4, 2, &y);
        // truncate a2: drop the top-degree term (k = n-1)
        let mut trunc = NCLaurent::zero(comm.clone());
        for (e, c) in a2.terms() {
            let deg: i32 = e.iter().sum();
            if deg <= 2 {
                trunc = trunc.add(&NCLaurent::monomial(comm.clone(), e.clone(), c.clone()));
            }
        }
        let y1 = NCLaurent::gen(comm.clone(), y[0]);
        let rhs = NCLaurent::one(comm.clone())
            .add(&y1.mul(&trunc).scale(&EpsScalar::eps_pow(1)));
        assert_eq!(a1, rhs);
    }

    #[test]
    fn conjugation() {
        let comm = lambda_pq(3).unwrap();
        let (p, q) = pq_indices(&comm, 3);
        let k = kappa_eps(&comm, 3, 1, &p, &q);
        // conjugation by a central monomial is the identity
        let mut central = vec![0i32; comm.len()];
        for &g in &p {
            central[g] = 1;
        }
        assert_eq!(k.conjugate_by_monomial(&central), k);
        // conjugating by p_1 preserves the support
        let mut x = vec![0i32; comm.len()];
        x[p[0]] = 1;
        let conj = k.conjugate_by_monomial(&x);
        let sup: Vec<&Vec<i32>> = k.terms().map(|(e, _)| e).collect();
        let sup2: Vec<&Vec<i32>> = conj.terms().map(|(e, _)| e).collect();
        assert_eq!(sup, sup2);
        // conjugating a monomial multiplies it by eps^{alpha(x, m)}
        let m = NCLaurent::gen(comm.clone(), q[0]);
        let a = NCLaurent::alpha_exponent(&comm, &x, &{
            let mut e = vec![0i32; comm.len()];
            e[q[0]] = 1;
            e
        });
        assert_eq!(m.conjugate_by_monomial(&x), m.scale(&EpsScalar::eps_pow(a)));
    }

    #[test]
    fn alpha_exponent_antisymmetric() {
        let comm = lambda_pq(4).unwrap();
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..20 {
            let u: Vec<i32> = (0..comm.len()).map(|_| rng.gen_range(-2..3)).collect();
            let v: Vec<i32> = (0..comm.len()).map(|_| rng.gen_range(-2..3)).collect();
            assert_eq!(
                NCLaurent::alpha_exponent(&comm, &u, &v),
                -NCLaurent::alpha_exponent(&comm, &v, &u)
            );
            assert_eq!(NCLaurent::alpha_exponent(&comm, &u, &u), 0);
        }
    }

    #[test]
    fn rpqm_cleared_identity() {
        // q_{i+1} kappa_{i+2} + p_i kappa_i = kappa_{i+1} (p_{i+1} + q_i)
        for n in [3usize, 4] {
            let comm = lambda_pq(n).unwrap();
            let (p, q) = pq_indices(&comm, n);
            for i in 1..=n as i64 {
                let gi = |arr: &[usize], k: i64| NCLaurent::gen(comm.clone(), arr[wrap(n, k) - 1]);
                let lhs = gi(&q, i + 1)
                    .mul(&kappa_eps(&comm, n, i + 2, &p, &q))
                    .add(&gi(&p, i).mul(&kappa_eps(&comm, n, i, &p, &q)));
                let rhs = kappa_eps(&comm, n, i + 1, &p, &q)
                    .mul(&gi(&p, i + 1).add(&gi(&q, i)));
                assert_eq!(lhs, rhs, "n={} i={}", n, i);
            }
        }
    }
}
