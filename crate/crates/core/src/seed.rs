//! Seeds over the grid quivers: cluster variables, coefficient dynamics in
//! the universal and tropical semifields, the mutation sequences realizing
//! the R-matrices, and their commutative closed forms.

use crate::error::{Error, Result};
use crate::laurent::{
    principal_part, Fraction, MultiLaurent, RationalMap, TropicalPoint, VarRegistry,
};
use crate::quiver::{wrap, ExchangeMatrix, Vertex, VertexPermutation};
use crate::scalar::{CoeffRing, Rationals};
use std::sync::Arc;

/// One step of a mutation word.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WordStep {
    Mu(Vertex),
    Swap(Vertex, Vertex),
}

impl std::fmt::Display for WordStep {
    fn fmt(&self, w: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WordStep::Mu(v) => write!(w, "mu({})", v),
            WordStep::Swap(u, v) => write!(w, "swap({},{})", u, v),
        }
    }
}

pub fn format_word(word: &[WordStep]) -> String {
    word.iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_vertex(s: &str) -> Result<Vertex> {
    let s = s.trim();
    let inner = |t: &str, tag: &str| -> Result<String> {
        t.strip_prefix(tag)
            .and_then(|r| r.strip_suffix(')'))
            .map(|r| r.to_string())
            .ok_or_else(|| Error::Parse(format!("bad vertex: {}", t)))
    };
    if s.starts_with("v(") {
        let body = inner(s, "v(")?;
        let parts: Vec<&str> = body.split(',').collect();
        if parts.len() != 2 {
            return Err(Error::Parse(format!("bad grid vertex: {}", s)));
        }
        let c: usize = parts[0].trim().parse().map_err(|_| Error::Parse(s.into()))?;
        let p: usize = parts[1].trim().parse().map_err(|_| Error::Parse(s.into()))?;
        Ok(Vertex::grid(c, p))
    } else if s.starts_with("X(") {
        let body = inner(s, "X(")?;
        let halves: Vec<&str> = body.split('|').collect();
        if halves.len() != 2 {
            return Err(Error::Parse(format!("bad frozen vertex: {}", s)));
        }
        let parse_pair = |t: &str| -> Result<(usize, usize)> {
            let parts: Vec<&str> = t.split(',').collect();
            if parts.len() != 2 {
                return Err(Error::Parse(format!("bad vertex pair: {}", t)));
            }
            Ok((
                parts[0].trim().parse().map_err(|_| Error::Parse(t.into()))?,
                parts[1].trim().parse().map_err(|_| Error::Parse(t.into()))?,
            ))
        };
        Ok(Vertex::frozen(parse_pair(halves[0])?, parse_pair(halves[1])?))
    } else {
        Err(Error::Parse(format!("unknown vertex syntax: {}", s)))
    }
}

/// Parse a one-line mutation word: comma-separated `mu(v)` / `swap(u,v)`
/// tokens. Parentheses inside vertex labels are respected.
pub fn parse_word(line: &str) -> Result<Vec<WordStep>> {
    let mut steps = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    let mut tokens = Vec::new();
    for ch in line.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                cur.push(ch);
            }
            ',' if depth == 0 => {
                tokens.push(cur.trim().to_string());
                cur.clear();
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        tokens.push(cur.trim().to_string());
    }
    for tok in tokens {
        if let Some(body) = tok.strip_prefix("mu(").and_then(|r| r.strip_suffix(')')) {
            steps.push(WordStep::Mu(parse_vertex(body)?));
        } else if let Some(body) = tok.strip_prefix("swap(").and_then(|r| r.strip_suffix(')')) {
            // split at the top-level comma
            let mut d = 0usize;
            let mut split = None;
            for (i, ch) in body.char_indices() {
                match ch {
                    '(' => d += 1,
                    ')' => d -= 1,
                    ',' if d == 0 => {
                        split = Some(i);
                        break;
                    }
                    _ => {}
                }
            }
            let i = split.ok_or_else(|| Error::Parse(format!("bad swap: {}", tok)))?;
            steps.push(WordStep::Swap(
                parse_vertex(&body[..i])?,
                parse_vertex(&body[i + 1..])?,
            ));
        } else {
            return Err(Error::Parse(format!("unknown token: {}", tok)));
        }
    }
    Ok(steps)
}

/// The 2n-2 mutations and permutation realizing the R-matrix at cycle
/// `c`, starting the sequence at position `j`. With `enriched` set the
/// frozen-label swaps are appended (absent frozen vertices are skipped,
/// which also covers the reduced enriched quiver).
pub fn r_word(q: &ExchangeMatrix, c: usize, j: i64, enriched: bool) -> Vec<WordStep> {
    let n = q.n;
    let g = |p: i64| Vertex::grid(c, wrap(n, p));
    let mut word = Vec::new();
    for k in 0..n as i64 {
        word.push(WordStep::Mu(g(j + k)));
    }
    for k in 0..(n as i64 - 2) {
        word.push(WordStep::Mu(g(j - 3 - k)));
    }
    word.push(WordStep::Swap(g(j - 2), g(j - 1)));
    if enriched {
        let have = |v: Vertex| q.index_of(v).is_ok();
        for i in 1..=n as i64 {
            // X_{i^+, i} <-> X_{i+1, (i+1)^-}
            let a = Vertex::frozen((c + 1, wrap(n, i)), (c, wrap(n, i)));
            let b = Vertex::frozen((c, wrap(n, i + 1)), (c.wrapping_sub(1), wrap(n, i + 1)));
            if have(a) && have(b) {
                word.push(WordStep::Swap(a, b));
            }
            // X_{i, (i-1)^+} <-> X_{i^-, i-1}
            let a = Vertex::frozen((c, wrap(n, i)), (c + 1, wrap(n, i - 1)));
            let b = Vertex::frozen((c.wrapping_sub(1), wrap(n, i)), (c, wrap(n, i - 1)));
            if have(a) && have(b) {
                word.push(WordStep::Swap(a, b));
            }
        }
    }
    word
}

/// Registry naming one variable per vertex of a quiver.
pub fn quiver_registry(q: &ExchangeMatrix) -> Arc<VarRegistry> {
    VarRegistry::new(q.verts().iter().map(|v| v.to_string()).collect::<Vec<_>>())
}

/// A seed of cluster variables: every vertex (mutable and frozen) carries a
/// Laurent polynomial in the initial variables.
#[derive(Clone, Debug, PartialEq)]
pub struct XSeed<R: CoeffRing> {
    pub quiver: ExchangeMatrix,
    pub reg: Arc<VarRegistry>,
    pub vars: Vec<MultiLaurent<R>>,
}

impl<R: CoeffRing> XSeed<R> {
    pub fn initial(ring: R, quiver: ExchangeMatrix) -> Self {
        let reg = quiver_registry(&quiver);
        let vars = (0..quiver.len())
            .map(|i| MultiLaurent::gen(ring.clone(), reg.clone(), i))
            .collect();
        XSeed { quiver, reg, vars }
    }

    pub fn var(&self, v: Vertex) -> &MultiLaurent<R> {
        &self.vars[self.quiver.index_of(v).unwrap()]
    }

    pub fn mutate(&self, k: Vertex) -> Result<Self> {
        let ki = self.quiver.index_of(k)?;
        if k.is_frozen() {
            return Err(Error::FrozenVertex(k.to_string()));
        }
        let ring = self.vars[0].ring.clone();
        let mut pos = MultiLaurent::one(ring.clone(), self.reg.clone());
        let mut neg = MultiLaurent::one(ring.clone(), self.reg.clone());
        for (j, xj) in self.vars.iter().enumerate() {
            let bjk = self.quiver.b_at(j, ki);
            if bjk > 0 {
                pos = pos.mul(&xj.pow(bjk as u32));
            } else if bjk < 0 {
                neg = neg.mul(&xj.pow((-bjk) as u32));
            }
        }
        let num = pos.add(&neg);
        let new_xk = num.div_exact(&self.vars[ki])?;
        let mut vars = self.vars.clone();
        vars[ki] = new_xk;
        Ok(XSeed {
            quiver: self.quiver.mutate(k)?,
            reg: self.reg.clone(),
            vars,
        })
    }

    pub fn apply_perm(&self, p: &VertexPermutation) -> Self {
        let mut vars = self.vars.clone();
        for (i, &v) in self.quiver.verts().iter().enumerate() {
            let target = self.quiver.index_of(p.apply(v)).unwrap();
            vars[target] = self.vars[i].clone();
        }
        XSeed {
            quiver: self.quiver.apply_perm(p),
            reg: self.reg.clone(),
            vars,
        }
    }

    pub fn apply_word(&self, word: &[WordStep]) -> Result<Self> {
        let mut s = self.clone();
        for step in word {
            s = match step {
                WordStep::Mu(v) => s.mutate(*v)?,
                WordStep::Swap(u, v) => s.apply_perm(&VertexPermutation::swap(*u, *v)),
            };
        }
        Ok(s)
    }

    pub fn is_sigma_period(&self, word: &[WordStep], sigma: &VertexPermutation) -> Result<bool> {
        let out = self.apply_word(word)?;
        let expect = self.apply_perm(sigma);
        Ok(out == expect)
    }

    /// Every variable has positive coefficients only.
    pub fn all_positive(&self) -> bool {
        self.vars.iter().all(|x| x.is_subtraction_free())
    }
}

/// A y-seed in the universal semifield: subtraction-free fractions in the
/// initial y-variables.
#[derive(Clone, Debug)]
pub struct YSeedUniversal {
    pub quiver: ExchangeMatrix,
    pub reg: Arc<VarRegistry>,
    pub vars: Vec<Fraction<Rationals>>,
}

impl PartialEq for YSeedUniversal {
    fn eq(&self, other: &Self) -> bool {
        self.quiver == other.quiver
            && self
                .vars
                .iter()
                .zip(&other.vars)
                .all(|(a, b)| a.eq_cross(b))
    }
}

impl YSeedUniversal {
    pub fn initial(quiver: ExchangeMatrix) -> Self {
        let reg = quiver_registry(&quiver);
        let vars = (0..quiver.len())
            .map(|i| Fraction::gen(Rationals, reg.clone(), i))
            .collect();
        YSeedUniversal { quiver, reg, vars }
    }

    pub fn var(&self, v: Vertex) -> &Fraction<Rationals> {
        &self.vars[self.quiver.index_of(v).unwrap()]
    }

    pub fn mutate(&self, k: Vertex) -> Result<Self> {
        let ki = self.quiver.index_of(k)?;
        if k.is_frozen() {
            return Err(Error::FrozenVertex(k.to_string()));
        }
        let one = Fraction::one(Rationals, self.reg.clone());
        let yk = &self.vars[ki];
        let mut vars = self.vars.clone();
        for (i, yi) in self.vars.iter().enumerate() {
            if i == ki {
                vars[i] = yk.inv()?;
                continue;
            }
            let bki = self.quiver.b_at(ki, i);
            if bki == 0 {
                continue;
            }
            let factor = if bki > 0 {
                one.add(&yk.inv()?).powi(-(bki as i32))?
            } else {
                one.add(yk).powi(-(bki as i32))?
            };
            vars[i] = yi.mul(&factor);
        }
        Ok(YSeedUniversal {
            quiver: self.quiver.mutate(k)?,
            reg: self.reg.clone(),
            vars,
        })
    }

    pub fn apply_perm(&self, p: &VertexPermutation) -> Self {
        let mut vars = self.vars.clone();
        for (i, &v) in self.quiver.verts().iter().enumerate() {
            let target = self.quiver.index_of(p.apply(v)).unwrap();
            vars[target] = self.vars[i].clone();
        }
        YSeedUniversal {
            quiver: self.quiver.apply_perm(p),
            reg: self.reg.clone(),
            vars,
        }
    }

    pub fn apply_word(&self, word: &[WordStep]) -> Result<Self> {
        let mut s = self.clone();
        for step in word {
            s = match step {
                WordStep::Mu(v) => s.mutate(*v)?,
                WordStep::Swap(u, v) => s.apply_perm(&VertexPermutation::swap(*u, *v)),
            };
        }
        Ok(s)
    }

    pub fn is_sigma_period(&self, word: &[WordStep], sigma: &VertexPermutation) -> Result<bool> {
        let out = self.apply_word(word)?;
        let expect = self.apply_perm(sigma);
        Ok(out == expect)
    }

    /// Project every variable to the tropical semifield.
    pub fn tropicalize(&self) -> Result<YSeedTropical> {
        let vars = self
            .vars
            .iter()
            .map(principal_part)
            .collect::<Result<Vec<_>>>()?;
        Ok(YSeedTropical {
            quiver: self.quiver.clone(),
            vars,
        })
    }
}

/// A y-seed in the tropical semifield.
#[derive(Clone, Debug, PartialEq)]
pub struct YSeedTropical {
    pub quiver: ExchangeMatrix,
    pub vars: Vec<TropicalPoint>,
}

impl YSeedTropical {
    pub fn initial(quiver: ExchangeMatrix) -> Self {
        let n = quiver.len();
        let vars = (0..n).map(|i| TropicalPoint::gen(n, i)).collect();
        YSeedTropical { quiver, vars }
    }

    pub fn var(&self, v: Vertex) -> &TropicalPoint {
        &self.vars[self.quiver.index_of(v).unwrap()]
    }

    pub fn mutate(&self, k: Vertex) -> Result<Self> {
        let ki = self.quiver.index_of(k)?;
        if k.is_frozen() {
            return Err(Error::FrozenVertex(k.to_string()));
        }
        let yk = &self.vars[ki];
        let mut vars = self.vars.clone();
        for (i, yi) in self.vars.iter().enumerate() {
            if i == ki {
                vars[i] = yk.inv();
                continue;
            }
            let bki = self.quiver.b_at(ki, i);
            if bki == 0 {
                continue;
            }
            let factor = if bki > 0 {
                yk.inv().add_one().powi(-bki)
            } else {
                yk.add_one().powi(-bki)
            };
            vars[i] = yi.trop_mul(&factor)?;
        }
        Ok(YSeedTropical {
            quiver: self.quiver.mutate(k)?,
            vars,
        })
    }

    pub fn apply_perm(&self, p: &VertexPermutation) -> Self {
        let mut vars = self.vars.clone();
        for (i, &v) in self.quiver.verts().iter().enumerate() {
            let target = self.quiver.index_of(p.apply(v)).unwrap();
            vars[target] = self.vars[i].clone();
        }
        YSeedTropical {
            quiver: self.quiver.apply_perm(p),
            vars,
        }
    }

    pub fn apply_word(&self, word: &[WordStep]) -> Result<Self> {
        let mut s = self.clone();
        for step in word {
            s = match step {
                WordStep::Mu(v) => s.mutate(*v)?,
                WordStep::Swap(u, v) => s.apply_perm(&VertexPermutation::swap(*u, *v)),
            };
        }
        Ok(s)
    }

    pub fn is_sigma_period(&self, word: &[WordStep], sigma: &VertexPermutation) -> Result<bool> {
        let out = self.apply_word(word)?;
        let expect = self.apply_perm(sigma);
        Ok(out == expect)
    }
}

/// A seed with both cluster variables and tropical coefficients. The
/// x-variables live in a Laurent ring whose registry concatenates one `x`
/// generator per vertex followed by one `y` generator per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct XYSeed {
    pub quiver: ExchangeMatrix,
    pub reg: Arc<VarRegistry>,
    pub x: Vec<MultiLaurent<Rationals>>,
    pub y: Vec<TropicalPoint>,
}

impl XYSeed {
    pub fn initial(quiver: ExchangeMatrix) -> Self {
        let nv = quiver.len();
        let mut names: Vec<String> = quiver.verts().iter().map(|v| format!("x{}", v)).collect();
        names.extend(quiver.verts().iter().map(|v| format!("y{}", v)));
        let reg = VarRegistry::new(names);
        let x = (0..nv)
            .map(|i| MultiLaurent::gen(Rationals, reg.clone(), i))
            .collect();
        let y = (0..nv).map(|i| TropicalPoint::gen(nv, i)).collect();
        XYSeed { quiver, reg, x, y }
    }

    /// Embed a tropical point (a y-monomial) into the combined Laurent ring.
    fn y_monomial(&self, t: &TropicalPoint) -> MultiLaurent<Rationals> {
        let nv = self.quiver.len();
        let mut exps = vec![0i32; self.reg.len()];
        for (i, &e) in t.exps.iter().enumerate() {
            exps[nv + i] = e as i32;
        }
        MultiLaurent::monomial(Rationals, self.reg.clone(), exps, crate::scalar::rat(1))
    }

    pub fn mutate(&self, k: Vertex) -> Result<Self> {
        let ki = self.quiver.index_of(k)?;
        if k.is_frozen() {
            return Err(Error::FrozenVertex(k.to_string()));
        }
        let yk = &self.y[ki];
        // x-variable exchange with coefficients
        let mut pos = self.y_monomial(yk);
        let mut neg = MultiLaurent::one(Rationals, self.reg.clone());
        for (j, xj) in self.x.iter().enumerate() {
            let bjk = self.quiver.b_at(j, ki);
            if bjk > 0 {
                pos = pos.mul(&xj.pow(bjk as u32));
            } else if bjk < 0 {
                neg = neg.mul(&xj.pow((-bjk) as u32));
            }
        }
        let denom = self.y_monomial(&yk.add_one()).mul(&self.x[ki]);
        let new_xk = pos.add(&neg).div_exact(&denom)?;

        // tropical y-mutation
        let mut y = self.y.clone();
        for (i, yi) in self.y.iter().enumerate() {
            if i == ki {
                y[i] = yk.inv();
                continue;
            }
            let bki = self.quiver.b_at(ki, i);
            if bki == 0 {
                continue;
            }
            let factor = if bki > 0 {
                yk.inv().add_one().powi(-bki)
            } else {
                yk.add_one().powi(-bki)
            };
            y[i] = yi.trop_mul(&factor)?;
        }
        let mut x = self.x.clone();
        x[ki] = new_xk;
        Ok(XYSeed {
            quiver: self.quiver.mutate(k)?,
            reg: self.reg.clone(),
            x,
            y,
        })
    }

    pub fn apply_perm(&self, p: &VertexPermutation) -> Self {
        let mut x = self.x.clone();
        let mut y = self.y.clone();
        for (i, &v) in self.quiver.verts().iter().enumerate() {
            let target = self.quiver.index_of(p.apply(v)).unwrap();
            x[target] = self.x[i].clone();
            y[target] = self.y[i].clone();
        }
        XYSeed {
            quiver: self.quiver.apply_perm(p),
            reg: self.reg.clone(),
            x,
            y,
        }
    }

    pub fn apply_word(&self, word: &[WordStep]) -> Result<Self> {
        let mut s = self.clone();
        for step in word {
            s = match step {
                WordStep::Mu(v) => s.mutate(*v)?,
                WordStep::Swap(u, v) => s.apply_perm(&VertexPermutation::swap(*u, *v)),
            };
        }
        Ok(s)
    }

    pub fn is_sigma_period(&self, word: &[WordStep], sigma: &VertexPermutation) -> Result<bool> {
        let out = self.apply_word(word)?;
        let expect = self.apply_perm(sigma);
        Ok(out == expect)
    }
}

/// Cyclic index interval a..b in Z/n, written with 1-based representatives.
/// The interval wrapping all the way around (b = a-1 mod n) is empty.
pub fn cyclic_range(n: usize, a: i64, b: i64) -> Vec<usize> {
    let len = (b - a).rem_euclid(n as i64) + 1;
    if len == n as i64 {
        return Vec::new();
    }
    (0..len).map(|k| wrap(n, a + k)).collect()
}

fn gen_frac(reg: &Arc<VarRegistry>, idx: usize) -> Fraction<Rationals> {
    Fraction::gen(Rationals, reg.clone(), idx)
}

fn vertex_frac(q: &ExchangeMatrix, reg: &Arc<VarRegistry>, v: Vertex) -> Fraction<Rationals> {
    gen_frac(reg, q.index_of(v).unwrap())
}

/// The closed form of the R-matrix on cluster variables at cycle `c` of a
/// grid quiver (no frozen decoration).
pub fn closed_r_x(q: &ExchangeMatrix, c: usize) -> Result<RationalMap<Rationals>> {
    let n = q.n;
    let reg = quiver_registry(q);
    let x = |cyc: usize, p: i64| vertex_frac(q, &reg, Vertex::grid(cyc, wrap(n, p)));
    let mut numer = Fraction::zero(Rationals, reg.clone());
    for j in 1..=n as i64 {
        let mut term = x(c - 1, j + 1);
        for l in cyclic_range(n, j + 2, j - 1) {
            term = term.mul(&x(c, l as i64));
        }
        term = term.mul(&x(c + 1, j));
        numer = numer.add(&term);
    }
    let mut images = Vec::with_capacity(q.len());
    for (vi, &v) in q.verts().iter().enumerate() {
        match v {
            Vertex::Grid { cycle, pos } if cycle as usize == c => {
                let mut den = Fraction::one(Rationals, reg.clone());
                for j in 1..=n {
                    if j != pos as usize {
                        den = den.mul(&x(c, j as i64));
                    }
                }
                images.push(numer.div(&den)?);
            }
            _ => images.push(gen_frac(&reg, vi)),
        }
    }
    Ok(RationalMap::new(reg.clone(), reg, images))
}

/// The closed form of the R-matrix on the enriched quiver (frozen variables
/// included); frozen families absent from the quiver are treated as 1.
pub fn closed_tilde_r(q: &ExchangeMatrix, c: usize) -> Result<RationalMap<Rationals>> {
    let n = q.n;
    let reg = quiver_registry(q);
    let have = |v: Vertex| q.index_of(v).is_ok();
    let x = |cyc: usize, p: i64| vertex_frac(q, &reg, Vertex::grid(cyc, wrap(n, p)));
    let frozen_or_one = |v: Vertex| {
        if have(v) {
            vertex_frac(q, &reg, v)
        } else {
            Fraction::one(Rationals, reg.clone())
        }
    };
    // frozen labels around cycle c
    let x_within = |j: i64| Vertex::frozen((c, wrap(n, j)), (c, wrap(n, j + 1)));
    let x_up_in = |l: i64| Vertex::frozen((c + 1, wrap(n, l)), (c, wrap(n, l))); // X_{l^+, l}
    let x_diag_in = |l: i64| Vertex::frozen((c - 1, wrap(n, l + 1)), (c, wrap(n, l))); // X_{l+1^-, l}
    let x_down_out = |l: i64| Vertex::frozen((c, wrap(n, l)), (c - 1, wrap(n, l))); // X_{l, l^-}
    let x_diag_out = |l: i64| Vertex::frozen((c, wrap(n, l)), (c + 1, wrap(n, l - 1))); // X_{l, l-1^+}

    let mut images: Vec<Fraction<Rationals>> = Vec::with_capacity(q.len());
    for (vi, &v) in q.verts().iter().enumerate() {
        match v {
            Vertex::Grid { cycle, pos } if cycle as usize == c => {
                let i = pos as i64;
                let mut numer = Fraction::zero(Rationals, reg.clone());
                for j in 1..=n as i64 {
                    let mut term = x(c - 1, j + 1);
                    for l in cyclic_range(n, j + 2, j - 1) {
                        term = term.mul(&x(c, l as i64));
                    }
                    term = term.mul(&x(c + 1, j));
                    term = term.mul(&frozen_or_one(x_within(j)));
                    for l in cyclic_range(n, j + 1, i - 1) {
                        term = term.mul(&frozen_or_one(x_up_in(l as i64)));
                        term = term.mul(&frozen_or_one(x_diag_in(l as i64)));
                    }
                    for l in cyclic_range(n, i + 1, j) {
                        term = term.mul(&frozen_or_one(x_down_out(l as i64)));
                        term = term.mul(&frozen_or_one(x_diag_out(l as i64)));
                    }
                    numer = numer.add(&term);
                }
                let mut den = Fraction::one(Rationals, reg.clone());
                for j in 1..=n {
                    if j != pos as usize {
                        den = den.mul(&x(c, j as i64));
                    }
                }
                images.push(numer.div(&den)?);
            }
            Vertex::Frozen { .. } => {
                let mut img = gen_frac(&reg, vi);
                for i in 1..=n as i64 {
                    // X_{i^+, i} <-> X_{i+1, i+1^-}
                    if v == x_up_in(i) {
                        img = frozen_or_one(x_down_out(i + 1));
                    } else if v == x_down_out(i + 1) && have(x_up_in(i)) {
                        img = vertex_frac(q, &reg, x_up_in(i));
                    }
                    // X_{i, i-1^+} <-> X_{i^-, i-1}
                    if v == x_diag_out(i) {
                        img = frozen_or_one(x_diag_in(i - 1));
                    } else if v == x_diag_in(i - 1) && have(x_diag_out(i)) {
                        img = vertex_frac(q, &reg, x_diag_out(i));
                    }
                }
                images.push(img);
            }
            _ => images.push(gen_frac(&reg, vi)),
        }
    }
    Ok(RationalMap::new(reg.clone(), reg, images))
}

/// The common factor S with R(x_i) = S x_i at cycle `c`.
pub fn s_factor(q: &ExchangeMatrix, c: usize) -> Result<Fraction<Rationals>> {
    let n = q.n;
    let reg = quiver_registry(q);
    let x = |cyc: usize, p: i64| vertex_frac(q, &reg, Vertex::grid(cyc, wrap(n, p)));
    let mut numer = Fraction::zero(Rationals, reg.clone());
    for j in 1..=n as i64 {
        let mut term = x(c - 1, j + 1);
        for l in cyclic_range(n, j + 2, j - 1) {
            term = term.mul(&x(c, l as i64));
        }
        term = term.mul(&x(c + 1, j));
        numer = numer.add(&term);
    }
    let mut den = Fraction::one(Rationals, reg.clone());
    for j in 1..=n as i64 {
        den = den.mul(&x(c, j));
    }
    numer.div(&den)
}

/// The cluster variable at position i of the middle cycle after the first i
/// mutations 1, ..., i (on the three-cycle grid quiver with cycles 0,1,2).
pub fn intermediate_half(q: &ExchangeMatrix, i: usize) -> Result<Fraction<Rationals>> {
    let n = q.n;
    if !(1 <= i && i <= n - 2) {
        return Err(Error::InvalidParameter(format!(
            "intermediate variable needs 1 <= i <= n-2, got {}",
            i
        )));
    }
    let reg = quiver_registry(q);
    let x = |cyc: usize, p: usize| vertex_frac(q, &reg, Vertex::grid(cyc, p));
    // x_1^- x_{i+1}/x_1 x_n^+ + sum_{k=3}^{i+2} x_{k-1}^- x_{i+1} x_n /(x_{k-1} x_{k-2}) x_{k-2}^+
    let mut acc = x(0, 1)
        .mul(&x(1, i + 1))
        .div(&x(1, 1))?
        .mul(&x(2, n));
    for k in 3..=i + 2 {
        let term = x(0, k - 1)
            .mul(&x(1, i + 1))
            .mul(&x(1, n))
            .div(&x(1, k - 1).mul(&x(1, k - 2)))?
            .mul(&x(2, k - 2));
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// The commutative closed form of the R-matrix on y-variables at cycle `c`.
/// Boundary cycles use only the rows that exist.
pub fn closed_r_y_classical(q: &ExchangeMatrix, c: usize) -> Result<RationalMap<Rationals>> {
    let n = q.n;
    let reg = quiver_registry(q);
    let y = |cyc: usize, p: i64| vertex_frac(q, &reg, Vertex::grid(cyc, wrap(n, p)));
    let one = Fraction::one(Rationals, reg.clone());
    let alpha = |i: i64| {
        let mut acc = one.clone();
        for k in 1..=n as i64 - 1 {
            let mut prod = one.clone();
            for l in 0..k {
                prod = prod.mul(&y(c, i + l));
            }
            acc = acc.add(&prod);
        }
        acc
    };
    let mut images = Vec::with_capacity(q.len());
    for (vi, &v) in q.verts().iter().enumerate() {
        let img = match v {
            Vertex::Grid { cycle, pos } if cycle as usize == c => {
                let i = pos as i64;
                alpha(i + 2).inv()?.mul(&y(c, i + 1).inv()?).mul(&alpha(i))
            }
            Vertex::Grid { cycle, pos } if c >= 1 && cycle as usize == c - 1 => {
                let i = pos as i64;
                alpha(i)
                    .inv()?
                    .mul(&y(c, i))
                    .mul(&y(c - 1, i))
                    .mul(&alpha(i + 1))
            }
            Vertex::Grid { cycle, pos } if cycle as usize == c + 1 => {
                let i = pos as i64;
                alpha(i + 1)
                    .inv()?
                    .mul(&y(c, i + 1))
                    .mul(&y(c + 1, i))
                    .mul(&alpha(i + 2))
            }
            _ => gen_frac(&reg, vi),
        };
        images.push(img);
    }
    Ok(RationalMap::new(reg.clone(), reg, images))
}

/// The expected tropical outcome of one R-matrix application to the initial
/// tropical y-seed at cycle `c`.
pub fn expected_tropical_r(q: &ExchangeMatrix, c: usize) -> YSeedTropical {
    let n = q.n;
    let nv = q.len();
    let idx = |cyc: usize, p: i64| q.index_of(Vertex::grid(cyc, wrap(n, p))).unwrap();
    let gen = |i: usize| TropicalPoint::gen(nv, i);
    let mut vars: Vec<TropicalPoint> = (0..nv).map(gen).collect();
    for p in 1..=n as i64 {
        vars[idx(c, p)] = gen(idx(c, p + 1)).inv();
        if c >= 1 && q.index_of(Vertex::grid(c - 1, 1)).is_ok() {
            vars[idx(c - 1, p)] = gen(idx(c, p)).trop_mul(&gen(idx(c - 1, p))).unwrap();
        }
        if q.index_of(Vertex::grid(c + 1, 1)).is_ok() {
            vars[idx(c + 1, p)] = gen(idx(c, p + 1)).trop_mul(&gen(idx(c + 1, p))).unwrap();
        }
    }
    YSeedTropical {
        quiver: q.clone(),
        vars,
    }
}
