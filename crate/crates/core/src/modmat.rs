//! Dense and generalized-permutation matrices over F_p, with LU solving and
//! Gauss-Jordan inversion. Generator specializations are generalized
//! permutations (one nonzero per column), so products against them stay
//! quadratic; dense cubic work only happens in genuine dense products and
//! inversions.

use crate::error::{Error, Result};
use crate::scalar::PrimeField;
use std::sync::Arc;

/// Montgomery context for fast repeated multiplication mod an odd prime.
#[derive(Clone, Copy, Debug)]
pub struct Mont {
    pub p: u64,
    ninv: u64, // -p^{-1} mod 2^64
    r2: u64,   // 2^128 mod p
}

impl Mont {
    pub fn new(p: u64) -> Self {
        debug_assert!(p % 2 == 1);
        // Newton iteration for p^{-1} mod 2^64
        let mut inv = p;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let ninv = inv.wrapping_neg();
        let r = (1u128 << 64) % p as u128;
        let r2 = ((r * r) % p as u128) as u64;
        Mont { p, ninv, r2 }
    }

    #[inline(always)]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.ninv);
        let t2 = (t >> 64) as u64;
        let (mp_hi, carry) = {
            let mp = m as u128 * self.p as u128;
            let lo = mp as u64;
            let hi = (mp >> 64) as u64;
            let (_, c) = (t as u64).overflowing_add(lo);
            (hi, c as u64)
        };
        let r = t2.wrapping_add(mp_hi).wrapping_add(carry);
        if r >= self.p {
            r - self.p
        } else {
            r
        }
    }

    #[inline(always)]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    pub fn to_mont(&self, a: u64) -> u64 {
        self.mul(a, self.r2)
    }

    pub fn from_mont(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }
}

/// A generalized permutation operator: |src> -> scale[src] |dest[src]>.
#[derive(Clone, Debug, PartialEq)]
pub struct GenPerm {
    pub dim: usize,
    pub dest: Vec<u32>,
    pub scale: Vec<u64>,
}

impl GenPerm {
    pub fn identity(dim: usize) -> Self {
        GenPerm {
            dim,
            dest: (0..dim as u32).collect(),
            scale: vec![1; dim],
        }
    }

    pub fn scalar(dim: usize, c: u64) -> Self {
        GenPerm {
            dim,
            dest: (0..dim as u32).collect(),
            scale: vec![c; dim],
        }
    }

    /// self applied after other: (self * other)|w> = self(other|w>).
    pub fn compose(&self, other: &GenPerm, f: &PrimeField) -> GenPerm {
        let mut dest = vec![0u32; self.dim];
        let mut scale = vec![0u64; self.dim];
        for src in 0..self.dim {
            let mid = other.dest[src] as usize;
            dest[src] = self.dest[mid];
            scale[src] = f.mulm(other.scale[src], self.scale[mid]);
        }
        GenPerm {
            dim: self.dim,
            dest,
            scale,
        }
    }

    pub fn inverse(&self, f: &PrimeField) -> Result<GenPerm> {
        let mut dest = vec![0u32; self.dim];
        let mut scale = vec![0u64; self.dim];
        for src in 0..self.dim {
            let d = self.dest[src] as usize;
            dest[d] = src as u32;
            scale[d] = f.invm(self.scale[src]).ok_or(Error::SingularInversion)?;
        }
        Ok(GenPerm {
            dim: self.dim,
            dest,
            scale,
        })
    }

    pub fn powi(&self, e: i64, f: &PrimeField) -> Result<GenPerm> {
        let base = if e < 0 { self.inverse(f)? } else { self.clone() };
        let mut acc = GenPerm::identity(self.dim);
        for _ in 0..e.unsigned_abs() {
            acc = base.compose(&acc, f);
        }
        Ok(acc)
    }

    pub fn apply(&self, w: &[u64], f: &PrimeField) -> Vec<u64> {
        let mut out = vec![0u64; self.dim];
        for src in 0..self.dim {
            out[self.dest[src] as usize] = f.mulm(self.scale[src], w[src]);
        }
        out
    }

    pub fn to_dense(&self, f: &PrimeField) -> Dense {
        let mut d = Dense::zeros(self.dim, f.p);
        for src in 0..self.dim {
            d.a[self.dest[src] as usize * self.dim + src] = self.scale[src] % f.p;
        }
        d
    }
}

/// Dense square matrix over F_p, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub dim: usize,
    pub p: u64,
    pub a: Vec<u64>,
}

impl Dense {
    pub fn zeros(dim: usize, p: u64) -> Self {
        Dense {
            dim,
            p,
            a: vec![0; dim * dim],
        }
    }

    pub fn identity(dim: usize, p: u64) -> Self {
        let mut d = Dense::zeros(dim, p);
        for i in 0..dim {
            d.a[i * dim + i] = 1;
        }
        d
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|&x| x == 0)
    }

    pub fn add_assign(&mut self, other: &Dense, f: &PrimeField) {
        for (x, y) in self.a.iter_mut().zip(&other.a) {
            *x = f.addm(*x, *y);
        }
    }

    pub fn scale_assign(&mut self, c: u64, f: &PrimeField) {
        for x in self.a.iter_mut() {
            *x = f.mulm(*x, c);
        }
    }

    /// Dense * dense with Montgomery inner loops.
    pub fn matmul(&self, other: &Dense, f: &PrimeField) -> Dense {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mont = Mont::new(f.p);
        // put `other` in Montgomery form once; a plain * mont = mont(redc(a*bm)) trick:
        // redc(a * to_mont(b)) = a*b mod p, so only one side needs conversion.
        let bm: Vec<u64> = other.a.iter().map(|&x| mont.to_mont(x)).collect();
        let mut out = vec![0u64; n * n];
        for i in 0..n {
            let arow = &self.a[i * n..(i + 1) * n];
            let mut acc = vec![0u128; n];
            for (k, &aik) in arow.iter().enumerate() {
                if aik == 0 {
                    continue;
                }
                let brow = &bm[k * n..(k + 1) * n];
                for j in 0..n {
                    // mont.mul(aik, bm) = aik * b mod p, each < p < 2^61;
                    // n < 2^12 keeps the u128 accumulator far from overflow.
                    acc[j] += mont.mul(aik, brow[j]) as u128;
                }
            }
            for j in 0..n {
                out[i * n + j] = (acc[j] % f.p as u128) as u64;
            }
        }
        Dense {
            dim: n,
            p: f.p,
            a: out,
        }
    }

    /// self * genperm: column src of the result is scale[src] * column
    /// dest[src] of self.
    pub fn mul_perm(&self, g: &GenPerm, f: &PrimeField) -> Dense {
        let n = self.dim;
        let mut out = vec![0u64; n * n];
        for i in 0..n {
            let row = &self.a[i * n..(i + 1) * n];
            let orow = &mut out[i * n..(i + 1) * n];
            for src in 0..n {
                orow[src] = f.mulm(g.scale[src], row[g.dest[src] as usize]);
            }
        }
        Dense {
            dim: n,
            p: f.p,
            a: out,
        }
    }

    /// genperm * self: row dest[src] of the result is scale[src] * row src.
    pub fn perm_mul(&self, g: &GenPerm, f: &PrimeField) -> Dense {
        let n = self.dim;
        let mut out = vec![0u64; n * n];
        for src in 0..n {
            let d = g.dest[src] as usize;
            let row = &self.a[src * n..(src + 1) * n];
            let orow = &mut out[d * n..(d + 1) * n];
            for j in 0..n {
                orow[j] = f.mulm(g.scale[src], row[j]);
            }
        }
        Dense {
            dim: n,
            p: f.p,
            a: out,
        }
    }

    pub fn matvec(&self, w: &[u64], f: &PrimeField) -> Vec<u64> {
        let n = self.dim;
        let mont = Mont::new(f.p);
        let wm: Vec<u64> = w.iter().map(|&x| mont.to_mont(x)).collect();
        let mut out = vec![0u64; n];
        for i in 0..n {
            let row = &self.a[i * n..(i + 1) * n];
            let mut acc: u128 = 0;
            for j in 0..n {
                if row[j] != 0 {
                    acc += mont.mul(row[j], wm[j]) as u128;
                }
            }
            out[i] = (acc % f.p as u128) as u64;
        }
        out
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self, f: &PrimeField) -> Result<Dense> {
        let n = self.dim;
        let mut a = self.a.clone();
        let mut inv = Dense::identity(n, f.p).a;
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| a[r * n + col] != 0)
                .ok_or(Error::SingularInversion)?;
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                    inv.swap(piv * n + j, col * n + j);
                }
            }
            let pinv = f.invm(a[col * n + col]).ok_or(Error::SingularInversion)?;
            for j in 0..n {
                a[col * n + j] = f.mulm(a[col * n + j], pinv);
                inv[col * n + j] = f.mulm(inv[col * n + j], pinv);
            }
            let mont = Mont::new(f.p);
            let arow: Vec<u64> = a[col * n..(col + 1) * n]
                .iter()
                .map(|&x| mont.to_mont(x))
                .collect();
            let irow: Vec<u64> = inv[col * n..(col + 1) * n]
                .iter()
                .map(|&x| mont.to_mont(x))
                .collect();
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r * n + col];
                if factor == 0 {
                    continue;
                }
                for j in 0..n {
                    let sub = mont.mul(factor, arow[j]);
                    a[r * n + j] = f.subm(a[r * n + j], sub);
                    let sub = mont.mul(factor, irow[j]);
                    inv[r * n + j] = f.subm(inv[r * n + j], sub);
                }
            }
        }
        Ok(Dense {
            dim: n,
            p: f.p,
            a: inv,
        })
    }

    /// LU factorization with row pivoting, for repeated solves.
    pub fn lu(&self, f: &PrimeField) -> Result<Lu> {
        let n = self.dim;
        let mut a = self.a.clone();
        let mut perm: Vec<u32> = (0..n as u32).collect();
        let mont = Mont::new(f.p);
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| a[r * n + col] != 0)
                .ok_or(Error::SingularInversion)?;
            if piv != col {
                perm.swap(piv, col);
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                }
            }
            let pinv = f.invm(a[col * n + col]).ok_or(Error::SingularInversion)?;
            let prow: Vec<u64> = a[col * n..(col + 1) * n]
                .iter()
                .map(|&x| mont.to_mont(x))
                .collect();
            for r in col + 1..n {
                let factor = f.mulm(a[r * n + col], pinv);
                a[r * n + col] = factor;
                if factor == 0 {
                    continue;
                }
                for j in col + 1..n {
                    let sub = mont.mul(factor, prow[j]);
                    a[r * n + j] = f.subm(a[r * n + j], sub);
                }
            }
        }
        Ok(Lu { dim: n, a, perm })
    }
}

/// PLU factors packed in one matrix.
#[derive(Clone, Debug)]
pub struct Lu {
    dim: usize,
    a: Vec<u64>,
    perm: Vec<u32>,
}

impl Lu {
    /// Solve A x = w.
    pub fn solve(&self, w: &[u64], f: &PrimeField) -> Vec<u64> {
        let n = self.dim;
        let mut x: Vec<u64> = self.perm.iter().map(|&i| w[i as usize]).collect();
        // forward: L has unit diagonal
        for i in 0..n {
            let mut acc = x[i] as u128;
            let row = &self.a[i * n..i * n + i];
            let mut sub: u128 = 0;
            for j in 0..i {
                if row[j] != 0 && x[j] != 0 {
                    sub += f.mulm(row[j], x[j]) as u128;
                }
            }
            let subm = (sub % f.p as u128) as u64;
            acc = acc + f.p as u128 - subm as u128;
            x[i] = (acc % f.p as u128) as u64;
        }
        // back substitution
        for i in (0..n).rev() {
            let row = &self.a[i * n..(i + 1) * n];
            let mut sub: u128 = 0;
            for j in i + 1..n {
                if row[j] != 0 && x[j] != 0 {
                    sub += f.mulm(row[j], x[j]) as u128;
                }
            }
            let subm = (sub % f.p as u128) as u64;
            let num = f.subm(x[i], subm);
            x[i] = f.mulm(num, f.invm(row[i]).expect("unit pivot"));
        }
        x
    }
}

/// Either representation, with arithmetic dispatch.
#[derive(Clone, Debug)]
pub enum Mat {
    Perm(GenPerm),
    Dense(Arc<Dense>),
}

impl Mat {
    pub fn dim(&self) -> usize {
        match self {
            Mat::Perm(g) => g.dim,
            Mat::Dense(d) => d.dim,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Mat::Perm(GenPerm::identity(dim))
    }

    pub fn to_dense(&self, f: &PrimeField) -> Dense {
        match self {
            Mat::Perm(g) => g.to_dense(f),
            Mat::Dense(d) => (**d).clone(),
        }
    }

    /// self * other (composition: self applied after other).
    pub fn mul(&self, other: &Mat, f: &PrimeField) -> Mat {
        match (self, other) {
            (Mat::Perm(a), Mat::Perm(b)) => Mat::Perm(a.compose(b, f)),
            (Mat::Dense(a), Mat::Perm(b)) => Mat::Dense(Arc::new(a.mul_perm(b, f))),
            (Mat::Perm(a), Mat::Dense(b)) => Mat::Dense(Arc::new(b.perm_mul(a, f))),
            (Mat::Dense(a), Mat::Dense(b)) => Mat::Dense(Arc::new(a.matmul(b, f))),
        }
    }

    pub fn add(&self, other: &Mat, f: &PrimeField) -> Mat {
        let mut d = self.to_dense(f);
        match other {
            Mat::Dense(o) => d.add_assign(o, f),
            Mat::Perm(g) => {
                for src in 0..g.dim {
                    let i = g.dest[src] as usize;
                    d.a[i * g.dim + src] = f.addm(d.a[i * g.dim + src], g.scale[src]);
                }
            }
        }
        Mat::Dense(Arc::new(d))
    }

    pub fn scale(&self, c: u64, f: &PrimeField) -> Mat {
        match self {
            Mat::Perm(g) => {
                let mut g = g.clone();
                for s in g.scale.iter_mut() {
                    *s = f.mulm(*s, c);
                }
                Mat::Perm(g)
            }
            Mat::Dense(d) => {
                let mut d = (**d).clone();
                d.scale_assign(c, f);
                Mat::Dense(Arc::new(d))
            }
        }
    }

    pub fn inverse(&self, f: &PrimeField) -> Result<Mat> {
        match self {
            Mat::Perm(g) => Ok(Mat::Perm(g.inverse(f)?)),
            Mat::Dense(d) => Ok(Mat::Dense(Arc::new(d.inverse(f)?))),
        }
    }

    pub fn apply(&self, w: &[u64], f: &PrimeField) -> Vec<u64> {
        match self {
            Mat::Perm(g) => g.apply(w, f),
            Mat::Dense(d) => d.matvec(w, f),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Mat::Perm(g) => g.scale.iter().all(|&s| s == 0),
            Mat::Dense(d) => d.is_zero(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn rand_dense(rng: &mut StdRng, n: usize, f: &PrimeField) -> Dense {
        Dense {
            dim: n,
            p: f.p,
            a: (0..n * n).map(|_| rng.gen_range(0..f.p)).collect(),
        }
    }

    #[test]
    fn montgomery_mul() {
        let p = (1u64 << 61) - 1;
        let m = Mont::new(p);
        let mut rng = StdRng::seed_from_u64(1);
        let f = PrimeField::new(p);
        for _ in 0..200 {
            let a = rng.gen_range(0..p);
            let b = rng.gen_range(0..p);
            assert_eq!(m.mul(a, m.to_mont(b)), f.mulm(a, b));
        }
    }

    #[test]
    fn matmul_agrees_with_naive() {
        let f = PrimeField::new(2305843009213693951); // 2^61 - 1
        let mut rng = StdRng::seed_from_u64(2);
        let n = 17;
        let a = rand_dense(&mut rng, n, &f);
        let b = rand_dense(&mut rng, n, &f);
        let c = a.matmul(&b, &f);
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0u64;
                for k in 0..n {
                    acc = f.addm(acc, f.mulm(a.a[i * n + k], b.a[k * n + j]));
                }
                assert_eq!(c.a[i * n + j], acc);
            }
        }
    }

    #[test]
    fn inverse_and_lu() {
        let f = PrimeField::new(1_000_000_007);
        let mut rng = StdRng::seed_from_u64(3);
        let n = 20;
        let a = rand_dense(&mut rng, n, &f);
        let ainv = a.inverse(&f).unwrap();
        let prod = a.matmul(&ainv, &f);
        assert_eq!(prod, Dense::identity(n, f.p));

        let lu = a.lu(&f).unwrap();
        for _ in 0..5 {
            let w: Vec<u64> = (0..n).map(|_| rng.gen_range(0..f.p)).collect();
            let x = lu.solve(&w, &f);
            let back = a.matvec(&x, &f);
            assert_eq!(back, w);
        }
    }

    #[test]
    fn perm_ops() {
        let f = PrimeField::new(101);
        let mut rng = StdRng::seed_from_u64(4);
        let n = 12;
        // random generalized permutation
        let mut dest: Vec<u32> = (0..n as u32).collect();
        for i in (1..n).rev() {
            dest.swap(i, rng.gen_range(0..=i));
        }
        let g = GenPerm {
            dim: n,
            dest,
            scale: (0..n).map(|_| rng.gen_range(1..f.p)).collect(),
        };
        let d = rand_dense(&mut rng, n, &f);
        let gd = g.to_dense(&f);
        assert_eq!(d.mul_perm(&g, &f), d.matmul(&gd, &f));
        assert_eq!(d.perm_mul(&g, &f), gd.matmul(&d, &f));
        let gi = g.inverse(&f).unwrap();
        let id = g.compose(&gi, &f);
        assert_eq!(id.to_dense(&f), Dense::identity(n, f.p));
        // apply matches dense matvec
        let w: Vec<u64> = (0..n).map(|_| rng.gen_range(0..f.p)).collect();
        assert_eq!(g.apply(&w, &f), gd.matvec(&w, &f));
    }
}
