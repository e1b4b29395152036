//! The R-matrix closed forms and the maps tying them together: the classical
//! geometric R-matrix over commutative fractions, its quantum counterpart as
//! kappa-conjugation on the quantum torus, quantum y-seed mutation and the
//! closed quantum y-form, and the embeddings from the p,q picture into the
//! cluster picture.

use crate::error::{Error, Result};
use crate::laurent::{Fraction, RationalMap, VarRegistry};
use crate::qtorus::{alpha_eps, kappa_eps, lambda_y, CommutationMatrix, Gen, NCLaurent};
use crate::quiver::{build_q_tilde_prime, wrap, ExchangeMatrix, Vertex, VertexPermutation};
use crate::scalar::{EpsScalar, Rationals};
use crate::seed::{quiver_registry, WordStep};
use crate::skew::SkewExpr;
use std::collections::HashMap;
use std::sync::Arc;

/// Registry of the commutative p,q function field.
pub fn pq_registry(n: usize) -> Arc<VarRegistry> {
    let mut names = Vec::new();
    for i in 1..=n {
        names.push(format!("p{}", i));
    }
    for i in 1..=n {
        names.push(format!("q{}", i));
    }
    VarRegistry::new(names)
}

/// Registry of the commutative network function field, one variable per
/// crossing, named like the torus generators.
pub fn net_registry(n: usize, m: usize) -> Arc<VarRegistry> {
    let mut names = Vec::new();
    for j in 1..=m {
        for i in 1..=n {
            names.push(format!("q[{},{}]", j, i));
        }
    }
    VarRegistry::new(names)
}

/// kappa_i as a commutative fraction over a registry with p at indices
/// p_idx and q at q_idx (1-based positions).
pub fn kappa_fraction(
    reg: &Arc<VarRegistry>,
    n: usize,
    i: i64,
    p_idx: &[usize],
    q_idx: &[usize],
) -> Fraction<Rationals> {
    let mut acc = Fraction::zero(Rationals, reg.clone());
    for j in 0..n as i64 {
        let mut term = Fraction::one(Rationals, reg.clone());
        for l in 1..=j {
            term = term.mul(&Fraction::gen(Rationals, reg.clone(), p_idx[wrap(n, i - l) - 1]));
        }
        for l in j + 2..=n as i64 {
            term = term.mul(&Fraction::gen(Rationals, reg.clone(), q_idx[wrap(n, i - l) - 1]));
        }
        acc = acc.add(&term);
    }
    acc
}

/// The classical geometric R-matrix: p_i -> q_i kappa_{i+1}/kappa_i,
/// q_i -> p_i kappa_i/kappa_{i+1}.
pub fn geometric_r(n: usize) -> Result<RationalMap<Rationals>> {
    if n < 3 {
        return Err(Error::InvalidParameter("geometric R needs n >= 3".into()));
    }
    let reg = pq_registry(n);
    let p_idx: Vec<usize> = (0..n).collect();
    let q_idx: Vec<usize> = (n..2 * n).collect();
    let mut images = Vec::with_capacity(2 * n);
    for i in 1..=n as i64 {
        let ki = kappa_fraction(&reg, n, i, &p_idx, &q_idx);
        let ki1 = kappa_fraction(&reg, n, i + 1, &p_idx, &q_idx);
        let qi = Fraction::gen(Rationals, reg.clone(), q_idx[i as usize - 1]);
        images.push(qi.mul(&ki1).div(&ki)?);
    }
    for i in 1..=n as i64 {
        let ki = kappa_fraction(&reg, n, i, &p_idx, &q_idx);
        let ki1 = kappa_fraction(&reg, n, i + 1, &p_idx, &q_idx);
        let pi = Fraction::gen(Rationals, reg.clone(), p_idx[i as usize - 1]);
        images.push(pi.mul(&ki).div(&ki1)?);
    }
    Ok(RationalMap::new(reg.clone(), reg, images))
}

/// A substitution of skew-field expressions for the generators of a quantum
/// torus. Images may be partial (None = not in the domain).
#[derive(Clone)]
pub struct QuantumSubst {
    pub comm: Arc<CommutationMatrix>,
    pub images: Vec<Option<SkewExpr>>,
}

impl QuantumSubst {
    pub fn identity(comm: Arc<CommutationMatrix>) -> Self {
        let images = (0..comm.len()).map(|i| Some(SkewExpr::gen(i))).collect();
        QuantumSubst { comm, images }
    }

    pub fn image(&self, g: usize) -> Result<&SkewExpr> {
        self.images[g]
            .as_ref()
            .ok_or_else(|| Error::UnknownVertex(format!("generator {} outside domain", g)))
    }

    fn total_images(&self) -> Result<Vec<SkewExpr>> {
        self.images
            .iter()
            .enumerate()
            .map(|(i, im)| {
                im.clone()
                    .ok_or_else(|| Error::UnknownVertex(format!("generator {} outside domain", i)))
            })
            .collect()
    }

    pub fn apply(&self, e: &SkewExpr) -> Result<SkewExpr> {
        let mut sup = std::collections::BTreeSet::new();
        e.support(&mut sup);
        let mut images = Vec::with_capacity(self.images.len());
        for (i, im) in self.images.iter().enumerate() {
            match im {
                Some(x) => images.push(x.clone()),
                None if sup.contains(&i) => {
                    return Err(Error::UnknownVertex(format!(
                        "generator {} outside substitution domain",
                        i
                    )))
                }
                None => images.push(SkewExpr::gen(i)),
            }
        }
        let mut memo = HashMap::new();
        Ok(e.subst(&images, &mut memo))
    }

    /// self after inner.
    pub fn compose(&self, inner: &QuantumSubst) -> Result<QuantumSubst> {
        let images = self.total_images()?;
        let mut memo = HashMap::new();
        let new_images = inner
            .images
            .iter()
            .map(|im| im.as_ref().map(|e| e.subst(&images, &mut memo)))
            .collect();
        Ok(QuantumSubst {
            comm: self.comm.clone(),
            images: new_images,
        })
    }
}

/// The quantum geometric R-matrix acting on one pair of generator families:
/// R(p_i) = kappa_i^{-1} q_i kappa_{i+1}, R(q_i) = kappa_{i+1}^{-1} p_i
/// kappa_i, all other generators fixed.
pub fn quantum_geometric_r(
    comm: &Arc<CommutationMatrix>,
    n: usize,
    p: &[usize],
    q: &[usize],
) -> QuantumSubst {
    let mut subst = QuantumSubst::identity(comm.clone());
    for i in 1..=n as i64 {
        let ki = SkewExpr::poly(kappa_eps(comm, n, i, p, q));
        let ki1 = SkewExpr::poly(kappa_eps(comm, n, i + 1, p, q));
        let pi = p[i as usize - 1];
        let qi = q[i as usize - 1];
        subst.images[pi] = Some(SkewExpr::mul(vec![
            SkewExpr::inv(ki.clone()),
            SkewExpr::gen(qi),
            ki1.clone(),
        ]));
        subst.images[qi] = Some(SkewExpr::mul(vec![
            SkewExpr::inv(ki1),
            SkewExpr::gen(pi),
            ki,
        ]));
    }
    subst
}

/// Generator indices of one column of the network torus.
pub fn column_gens(comm: &CommutationMatrix, n: usize, col: usize) -> Vec<usize> {
    (1..=n)
        .map(|i| {
            comm.index_of(&Gen::Net {
                col: col as u8,
                row: i as u8,
            })
            .unwrap()
        })
        .collect()
}

/// The quantum geometric R-matrix acting on columns j, j+1 of the network
/// torus.
pub fn r_network(comm: &Arc<CommutationMatrix>, n: usize, j: usize) -> QuantumSubst {
    let p = column_gens(comm, n, j);
    let q = column_gens(comm, n, j + 1);
    quantum_geometric_r(comm, n, &p, &q)
}

/// A quantum y-seed tracked as expressions in the initial generators, with
/// the evolving exchange matrix.
#[derive(Clone)]
pub struct QuantumYState {
    pub quiver: ExchangeMatrix,
    pub comm: Arc<CommutationMatrix>,
    pub exprs: Vec<SkewExpr>,
}

impl QuantumYState {
    pub fn initial(quiver: ExchangeMatrix) -> Self {
        let comm = lambda_y(&quiver);
        // the registry sorts Gen::Y(v) by vertex, matching the quiver's
        // mutable vertex order
        let verts: Vec<Vertex> = quiver.mutable_verts().collect();
        debug_assert_eq!(
            comm.gens().to_vec(),
            verts.iter().map(|&v| Gen::Y(v)).collect::<Vec<_>>()
        );
        let exprs = (0..comm.len()).map(SkewExpr::gen).collect();
        QuantumYState {
            quiver,
            comm,
            exprs,
        }
    }

    pub fn gen_index(&self, v: Vertex) -> Result<usize> {
        self.comm.index_of(&Gen::Y(v))
    }

    pub fn expr(&self, v: Vertex) -> &SkewExpr {
        &self.exprs[self.gen_index(v).unwrap()]
    }

    /// One quantum mutation step.
    pub fn mutate(&self, k: Vertex) -> Result<Self> {
        let ki = self.gen_index(k)?;
        let yk = self.exprs[ki].clone();
        let mut exprs = self.exprs.clone();
        for (gi, g) in self.comm.gens().iter().enumerate() {
            let Gen::Y(v) = g else { unreachable!() };
            if *v == k {
                exprs[gi] = SkewExpr::inv(yk.clone());
                continue;
            }
            let bki = self.quiver.b(k, *v);
            if bki == 0 {
                continue;
            }
            let mut factors = vec![self.exprs[gi].clone()];
            if bki > 0 {
                for m in 1..=bki {
                    factors.push(SkewExpr::inv(SkewExpr::add2(
                        SkewExpr::one(),
                        SkewExpr::mul2(SkewExpr::eps(2 * m - 1), SkewExpr::inv(yk.clone())),
                    )));
                }
            } else {
                for m in 1..=(-bki) {
                    factors.push(SkewExpr::add2(
                        SkewExpr::one(),
                        SkewExpr::mul2(SkewExpr::eps(2 * m - 1), yk.clone()),
                    ));
                }
            }
            exprs[gi] = SkewExpr::mul(factors);
        }
        Ok(QuantumYState {
            quiver: self.quiver.mutate(k)?,
            comm: self.comm.clone(),
            exprs,
        })
    }

    pub fn apply_perm(&self, p: &VertexPermutation) -> Self {
        let mut exprs = self.exprs.clone();
        for (gi, g) in self.comm.gens().iter().enumerate() {
            let Gen::Y(v) = g else { unreachable!() };
            let target = self.gen_index(p.apply(*v)).unwrap();
            exprs[target] = self.exprs[gi].clone();
        }
        QuantumYState {
            quiver: self.quiver.apply_perm(p),
            comm: self.comm.clone(),
            exprs,
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
}

/// The closed quantum y-form of the R-matrix at cycle c: a substitution on
/// the y-torus of the quiver. Boundary cycles use only the rows present.
pub fn quantum_cluster_ry(
    q: &ExchangeMatrix,
    comm: &Arc<CommutationMatrix>,
    c: usize,
) -> Result<QuantumSubst> {
    let n = q.n;
    let ygen = |cyc: usize, p: i64| comm.index_of(&Gen::Y(Vertex::grid(cyc, wrap(n, p))));
    let cycle_gens: Vec<usize> = (1..=n)
        .map(|i| ygen(c, i as i64))
        .collect::<Result<Vec<_>>>()?;
    let alpha = |i: i64| SkewExpr::poly(alpha_eps(comm, n, i, &cycle_gens));
    let mut subst = QuantumSubst::identity(comm.clone());
    for i in 1..=n as i64 {
        // middle row
        let v = ygen(c, i)?;
        subst.images[v] = Some(SkewExpr::mul(vec![
            SkewExpr::inv(alpha(i + 2)),
            SkewExpr::inv(SkewExpr::gen(ygen(c, i + 1)?)),
            alpha(i),
        ]));
        // row below
        if c >= 1 && ygen(c - 1, i).is_ok() {
            let vm = ygen(c - 1, i)?;
            subst.images[vm] = Some(SkewExpr::mul(vec![
                SkewExpr::inv(alpha(i)),
                SkewExpr::eps(1),
                SkewExpr::gen(ygen(c, i)?),
                SkewExpr::gen(vm),
                alpha(i + 1),
            ]));
        }
        // row above
        if ygen(c + 1, i).is_ok() {
            let vp = ygen(c + 1, i)?;
            subst.images[vp] = Some(SkewExpr::mul(vec![
                SkewExpr::inv(alpha(i + 1)),
                SkewExpr::eps(1),
                SkewExpr::gen(ygen(c, i + 1)?),
                SkewExpr::gen(vp),
                alpha(i + 2),
            ]));
        }
    }
    Ok(subst)
}

/// The embedding of the p,q function field into the cluster field of the
/// reduced enriched three-cycle quiver.
pub fn iota(n: usize) -> Result<RationalMap<Rationals>> {
    let qp = build_q_tilde_prime(n, 2)?;
    let target = quiver_registry(&qp);
    let source = pq_registry(n);
    let x = |cyc: usize, p: i64| {
        Fraction::gen(
            Rationals,
            target.clone(),
            qp.index_of(Vertex::grid(cyc, wrap(n, p))).unwrap(),
        )
    };
    let frz = |from: (usize, i64), to: (usize, i64)| {
        Fraction::gen(
            Rationals,
            target.clone(),
            qp.index_of(Vertex::frozen(
                (from.0, wrap(n, from.1)),
                (to.0, wrap(n, to.1)),
            ))
            .unwrap(),
        )
    };
    let mut images = Vec::new();
    for i in 1..=n as i64 {
        // p_i -> x_i^- x_{i+1} / (x_{i+1}^- x_i) X_{(0,i+1),(1,i)}
        images.push(
            x(0, i)
                .mul(&x(1, i + 1))
                .div(&x(0, i + 1).mul(&x(1, i)))?
                .mul(&frz((0, i + 1), (1, i))),
        );
    }
    for i in 1..=n as i64 {
        // q_i -> x_i x_{i+1}^+ / (x_{i+1} x_i^+) X_{(1,i+1),(2,i)}
        images.push(
            x(1, i)
                .mul(&x(2, i + 1))
                .div(&x(1, i + 1).mul(&x(2, i)))?
                .mul(&frz((1, i + 1), (2, i))),
        );
    }
    Ok(RationalMap::new(source, target, images))
}

/// The column embedding of the network function field into the cluster field
/// of the reduced enriched quiver with m columns.
pub fn iota_m(n: usize, m: usize) -> Result<RationalMap<Rationals>> {
    let qp = build_q_tilde_prime(n, m)?;
    let target = quiver_registry(&qp);
    let source = net_registry(n, m);
    let x = |cyc: usize, p: i64| {
        Fraction::gen(
            Rationals,
            target.clone(),
            qp.index_of(Vertex::grid(cyc, wrap(n, p))).unwrap(),
        )
    };
    let mut images = Vec::new();
    for j in 1..=m {
        for i in 1..=n as i64 {
            let frozen = Fraction::gen(
                Rationals,
                target.clone(),
                qp.index_of(Vertex::frozen(
                    (j - 1, wrap(n, i + 1)),
                    (j, wrap(n, i)),
                ))
                .unwrap(),
            );
            images.push(
                x(j - 1, i)
                    .mul(&x(j, i + 1))
                    .div(&x(j - 1, i + 1).mul(&x(j, i)))?
                    .mul(&frozen),
            );
        }
    }
    Ok(RationalMap::new(source, target, images))
}

/// The embedding of the interior y-torus into the network torus:
/// y_{j,i} -> eps^{-1} q_{j,i}^{-1} q_{j+1,i-1} for j = 1..m-1.
pub fn phi_eps(
    q: &ExchangeMatrix,
    ycomm: &Arc<CommutationMatrix>,
    netcomm: &Arc<CommutationMatrix>,
    m: usize,
) -> Result<QuantumSubst> {
    let n = q.n;
    let mut images: Vec<Option<SkewExpr>> = vec![None; ycomm.len()];
    for (gi, g) in ycomm.gens().iter().enumerate() {
        let Gen::Y(Vertex::Grid { cycle, pos }) = g else {
            continue;
        };
        let j = *cycle as usize;
        let i = *pos as i64;
        if j < 1 || j > m - 1 {
            continue;
        }
        let a = netcomm.index_of(&Gen::Net {
            col: j as u8,
            row: wrap(n, i) as u8,
        })?;
        let b = netcomm.index_of(&Gen::Net {
            col: (j + 1) as u8,
            row: wrap(n, i - 1) as u8,
        })?;
        let mono = NCLaurent::from_word(netcomm.clone(), &[(a, -1), (b, 1)])
            .scale(&EpsScalar::eps_pow(-1));
        images[gi] = Some(SkewExpr::poly(mono));
    }
    Ok(QuantumSubst {
        comm: netcomm.clone(),
        images,
    })
}

/// The classical phi: y_{j,i} -> q_{j,i}^{-1} q_{j+1,i-1} as a commutative
/// substitution from y-variables of the quiver to the network field.
pub fn phi_classical(
    q: &ExchangeMatrix,
    m: usize,
) -> Result<(Arc<VarRegistry>, Arc<VarRegistry>, Vec<Option<Fraction<Rationals>>>)> {
    let n = q.n;
    let source = quiver_registry(q);
    let target = net_registry(n, m);
    let qv = |j: usize, i: i64| {
        Fraction::gen(
            Rationals,
            target.clone(),
            target
                .lookup(&format!("q[{},{}]", j, wrap(n, i)))
                .unwrap(),
        )
    };
    let mut images: Vec<Option<Fraction<Rationals>>> = vec![None; source.len()];
    for (vi, &v) in q.verts().iter().enumerate() {
        let Vertex::Grid { cycle, pos } = v else {
            continue;
        };
        let j = cycle as usize;
        let i = pos as i64;
        if j < 1 || j > m - 1 {
            continue;
        }
        images[vi] = Some(qv(j + 1, i - 1).div(&qv(j, i))?);
    }
    Ok((source, target, images))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::MultiLaurent;
    use crate::qtorus::{lambda_pq, lambda_snake};
    use crate::quiver::build_q;
    use crate::scalar::PrimeField;
    use crate::seed::{closed_tilde_r, r_word};
    use crate::skew::{Oracle, SpecConfig};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::collections::HashMap;

    #[test]
    fn geometric_r_printed_n4() {
        // R(q_1) = p_1 (q1q2q3 + p4q1q2 + p3p4q1 + p2p3p4)
        //              / (q2q3q4 + p1q2q3 + p4p1q2 + p3p4p1)
        let map = geometric_r(4).unwrap();
        let reg = map.source.clone();
        let g = |name: &str| Fraction::gen(Rationals, reg.clone(), reg.lookup(name).unwrap());
        let num = g("q1")
            .mul(&g("q2"))
            .mul(&g("q3"))
            .add(&g("p4").mul(&g("q1")).mul(&g("q2")))
            .add(&g("p3").mul(&g("p4")).mul(&g("q1")))
            .add(&g("p2").mul(&g("p3")).mul(&g("p4")));
        let den = g("q2")
            .mul(&g("q3"))
            .mul(&g("q4"))
            .add(&g("p1").mul(&g("q2")).mul(&g("q3")))
            .add(&g("p4").mul(&g("p1")).mul(&g("q2")))
            .add(&g("p3").mul(&g("p4")).mul(&g("p1")));
        let expect = g("p1").mul(&num).div(&den).unwrap();
        let got = &map.images[reg.lookup("q1").unwrap()];
        assert!(got.eq_cross(&expect));
    }

    #[test]
    fn geometric_r_product_relation() {
        for n in [3usize, 4] {
            let map = geometric_r(n).unwrap();
            let reg = map.source.clone();
            // R(p_i) R(q_i) = q_i p_i
            for i in 0..n {
                let pi = &map.images[i];
                let qi = &map.images[n + i];
                let expect = Fraction::gen(Rationals, reg.clone(), n + i)
                    .mul(&Fraction::gen(Rationals, reg.clone(), i));
                assert!(pi.mul(qi).eq_cross(&expect), "n={} i={}", n, i);
            }
        }
    }

    /// Substituting the R-images into kappa telescopes:
    /// kappa_i(p', q') = kappa_i^2 T_i / prod_l kappa_l with
    /// T_i = sum_j m_{ij} prod_{l not in {i-j, i-j-1}} kappa_l and m_{ij}
    /// the p/q-swapped monomial of kappa's j-th term. Involutivity reduces
    /// to the exact polynomial identity kappa_i T_i = kappa_{i+1} T_{i+1};
    /// the telescoping step itself is spot-checked numerically.
    #[test]
    fn geometric_r_involutive() {
        for n in [3usize, 4] {
            let reg = pq_registry(n);
            let p_idx: Vec<usize> = (0..n).collect();
            let q_idx: Vec<usize> = (n..2 * n).collect();
            let kappa_poly = |i: i64| {
                let f = kappa_fraction(&reg, n, i, &p_idx, &q_idx);
                assert!(f.den.is_one());
                f.num
            };
            let gen = |v: usize| MultiLaurent::gen(Rationals, reg.clone(), v);
            let t_hat = |i: i64| {
                let mut acc = MultiLaurent::zero(Rationals, reg.clone());
                for j in 0..n as i64 {
                    // swapped monomial: q's where kappa has p's and vice versa
                    let mut m = MultiLaurent::one(Rationals, reg.clone());
                    for l in 1..=j {
                        m = m.mul(&gen(q_idx[wrap(n, i - l) - 1]));
                    }
                    for l in j + 2..=n as i64 {
                        m = m.mul(&gen(p_idx[wrap(n, i - l) - 1]));
                    }
                    let skip1 = wrap(n, i - j);
                    let skip2 = wrap(n, i - j - 1);
                    for l in 1..=n as i64 {
                        let lw = wrap(n, l);
                        if lw != skip1 && lw != skip2 {
                            m = m.mul(&kappa_poly(l));
                        }
                    }
                    acc = acc.add(&m);
                }
                acc
            };
            for i in 1..=n as i64 {
                let lhs = kappa_poly(i).mul(&t_hat(i));
                let rhs = kappa_poly(i + 1).mul(&t_hat(i + 1));
                assert_eq!(lhs, rhs, "n={} i={}", n, i);
            }

            // numeric validation of the telescoping step and of R^2 = id
            let map = geometric_r(n).unwrap();
            let f = PrimeField::new(2147483647);
            let mut rng = StdRng::seed_from_u64(n as u64 * 101);
            let mut done = 0;
            while done < 20 {
                let pt: Vec<u64> = (0..2 * n).map(|_| rng.gen_range(1..f.p)).collect();
                let Some(imgs) = map
                    .images
                    .iter()
                    .map(|fr| eval_fp(fr, f, &pt))
                    .collect::<Option<Vec<u64>>>()
                else {
                    continue;
                };
                if imgs.iter().any(|&v| v == 0) {
                    continue;
                }
                // kappa_i(p', q') * prod kappa_l(p,q) = kappa_i(p,q)^2 T_i(p,q)
                let kv = |i: i64, at: &[u64]| {
                    kappa_poly(i)
                        .to_fp(f, reg.clone())
                        .eval(at)
                        .unwrap()
                };
                let mut all_k = 1u64;
                for l in 1..=n as i64 {
                    all_k = f.mulm(all_k, kv(l, &pt));
                }
                let mut ok = true;
                for i in 1..=n as i64 {
                    let lhs = f.mulm(kv(i, &imgs), all_k);
                    let ki = kv(i, &pt);
                    let ti = t_hat(i).to_fp(f, reg.clone()).eval(&pt).unwrap();
                    let rhs = f.mulm(f.mulm(ki, ki), ti);
                    assert_eq!(lhs, rhs, "telescoping n={} i={}", n, i);
                    if lhs == 0 {
                        ok = false;
                    }
                }
                if !ok {
                    continue;
                }
                // R(R(point)) = point
                let Some(back) = map
                    .images
                    .iter()
                    .map(|fr| eval_fp(fr, f, &imgs))
                    .collect::<Option<Vec<u64>>>()
                else {
                    continue;
                };
                assert_eq!(back, pt, "R^2 at a point, n={}", n);
                done += 1;
            }
        }
    }

    #[test]
    fn quantum_r_classical_shadow() {
        // the eps = 1 shadow of the quantum images equals the classical map
        let n = 3;
        let comm = lambda_pq(n).unwrap();
        let p: Vec<usize> = (1..=n).map(|i| comm.index_of(&Gen::P(i as u8)).unwrap()).collect();
        let q: Vec<usize> = (1..=n).map(|i| comm.index_of(&Gen::Q(i as u8)).unwrap()).collect();
        let subst = quantum_geometric_r(&comm, n, &p, &q);
        let classical = geometric_r(n).unwrap();
        let f = PrimeField::new(1_000_003);
        let mut rng = StdRng::seed_from_u64(12);
        for _ in 0..20 {
            let mut point = HashMap::new();
            // classical registry: p1..pn then q1..qn; torus registry order may
            // differ, map by name
            let vals: Vec<u64> = (0..2 * n).map(|_| rng.gen_range(1..f.p)).collect();
            for (k, g) in comm.gens().iter().enumerate() {
                let name = g.to_string();
                let reg_idx = classical.source.lookup(&name).unwrap();
                point.insert(k, vals[reg_idx]);
            }
            for i in 0..n {
                let qexpr = subst.image(q[i]).unwrap();
                let mut memo = HashMap::new();
                let quantum_val = qexpr.eval_classical(&f, &point, &mut memo);
                let classical_val = eval_fp(&classical.images[n + i], f, &vals);
                match (quantum_val, classical_val) {
                    (Ok(a), Some(b)) => assert_eq!(a, b, "i={}", i),
                    _ => continue, // unlucky point, denominator vanished
                }
            }
        }
    }

    #[test]
    fn quantum_r_involutive_n3() {
        let n = 3;
        let comm = lambda_pq(n).unwrap();
        let p: Vec<usize> = (1..=n).map(|i| comm.index_of(&Gen::P(i as u8)).unwrap()).collect();
        let q: Vec<usize> = (1..=n).map(|i| comm.index_of(&Gen::Q(i as u8)).unwrap()).collect();
        let subst = quantum_geometric_r(&comm, n, &p, &q);
        let twice = subst.compose(&subst).unwrap();
        let oracle = Oracle::new(comm.clone(), SpecConfig { trials: 3, ..Default::default() });
        for g in 0..comm.len() {
            let v = oracle
                .check_pair("r2", twice.image(g).unwrap(), &SkewExpr::gen(g))
                .unwrap();
            assert!(v.is_equal(), "generator {}", g);
        }
    }

    #[test]
    fn quantum_y_mutation_shapes() {
        // b_{ki} = 0 leaves y_i fixed; the mutated vertex inverts
        let q = build_q(3, 2).unwrap();
        let st = QuantumYState::initial(q.clone());
        let k = Vertex::grid(1, 1);
        let out = st.mutate(k).unwrap();
        let fixed = Vertex::grid(0, 3); // b(k, v) = 0 here
        assert_eq!(q.b(k, fixed), 0);
        assert_eq!(out.expr(fixed), st.expr(fixed));
        assert_eq!(out.expr(k), &SkewExpr::inv(st.expr(k).clone()));
    }

    #[test]
    fn quantum_closed_ry_route_n3() {
        // closed form equals the mutation route, via the oracle per vertex
        let q = build_q(3, 2).unwrap();
        let st = QuantumYState::initial(q.clone());
        let word = r_word(&q, 1, 1, false);
        let out = st.apply_word(&word).unwrap();
        assert_eq!(out.quiver, q);
        let closed = quantum_cluster_ry(&q, &st.comm, 1).unwrap();
        let oracle = Oracle::new(st.comm.clone(), SpecConfig { trials: 3, ..Default::default() });
        let items: Vec<(String, SkewExpr, SkewExpr)> = st
            .comm
            .gens()
            .iter()
            .enumerate()
            .map(|(gi, g)| {
                (
                    format!("{}", g),
                    out.exprs[gi].clone(),
                    closed.image(gi).unwrap().clone(),
                )
            })
            .collect();
        for (label, verdict) in oracle.check_batch(&items).unwrap() {
            assert!(verdict.is_equal(), "{}", label);
        }
    }

    #[test]
    fn iota_kappa_closed_form() {
        // iota(kappa_i) = x_i^2/(x_i^- x_i^+) *
        //   sum_j (x^-_{i-j} x^+_{i-j-1})/(x_{i-j} x_{i-j-1})
        //   prod_{l=1}^j X_{(0,i+1-l),(1,i-l)} prod_{l=j+2}^n X_{(1,i+1-l),(2,i-l)}
        for n in [3usize, 4] {
            let map = iota(n).unwrap();
            let reg = map.target.clone();
            let qp = build_q_tilde_prime(n, 2).unwrap();
            let p_idx: Vec<usize> = (0..n).collect();
            let q_idx: Vec<usize> = (n..2 * n).collect();
            let x = |cyc: usize, p: i64| {
                Fraction::gen(
                    Rationals,
                    reg.clone(),
                    qp.index_of(Vertex::grid(cyc, wrap(n, p))).unwrap(),
                )
            };
            let frz = |from: (usize, i64), to: (usize, i64)| {
                Fraction::gen(
                    Rationals,
                    reg.clone(),
                    qp.index_of(Vertex::frozen(
                        (from.0, wrap(n, from.1)),
                        (to.0, wrap(n, to.1)),
                    ))
                    .unwrap(),
                )
            };
            for i in 1..=n as i64 {
                let kappa = kappa_fraction(&map.source, n, i, &p_idx, &q_idx);
                let got = kappa.subst(&map).unwrap();
                let mut sum = Fraction::zero(Rationals, reg.clone());
                for j in 0..n as i64 {
                    let mut term = x(0, i - j)
                        .mul(&x(2, i - j - 1))
                        .div(&x(1, i - j).mul(&x(1, i - j - 1)))
                        .unwrap();
                    for l in 1..=j {
                        term = term.mul(&frz((0, i + 1 - l), (1, i - l)));
                    }
                    for l in j + 2..=n as i64 {
                        term = term.mul(&frz((1, i + 1 - l), (2, i - l)));
                    }
                    sum = sum.add(&term);
                }
                let expect = x(1, i)
                    .mul(&x(1, i))
                    .div(&x(0, i).mul(&x(2, i)))
                    .unwrap()
                    .mul(&sum);
                assert!(got.eq_cross(&expect), "n={} i={}", n, i);
            }
        }
    }

    #[test]
    fn iota_intertwines_r() {
        // iota . R = tilde_R_x . iota at random points
        for n in [3usize, 4] {
            let map = iota(n).unwrap();
            let r = geometric_r(n).unwrap();
            let qp = build_q_tilde_prime(n, 2).unwrap();
            let tr = closed_tilde_r(&qp, 1).unwrap();
            let f = PrimeField::new(2147483647);
            let mut rng = StdRng::seed_from_u64(77);
            let mut done = 0;
            while done < 20 {
                let pt: Vec<u64> = (0..map.target.len()).map(|_| rng.gen_range(1..f.p)).collect();
                // evaluate iota images at pt to get p,q values
                let mut ok = true;
                let mut pqvals = vec![0u64; 2 * n];
                for (i, img) in map.images.iter().enumerate() {
                    match eval_fp(img, f, &pt) {
                        Some(v) if v != 0 => pqvals[i] = v,
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                // lhs: iota(R(g)) evaluated at pt = R(g) evaluated at pqvals
                // rhs: tilde_R(iota(g)) evaluated at pt
                let mut trpt = vec![0u64; map.target.len()];
                for (i, img) in tr.images.iter().enumerate() {
                    match eval_fp(img, f, &pt) {
                        Some(v) => trpt[i] = v,
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                for g in 0..2 * n {
                    let lhs = match eval_fp_vals(&r.images[g], f, &pqvals) {
                        Some(v) => v,
                        None => {
                            ok = false;
                            break;
                        }
                    };
                    let rhs = match eval_fp(&map.images[g], f, &trpt) {
                        Some(v) => v,
                        None => {
                            ok = false;
                            break;
                        }
                    };
                    assert_eq!(lhs, rhs, "n={} gen {}", n, g);
                }
                if ok {
                    done += 1;
                }
            }
        }
    }

    fn eval_fp(fr: &Fraction<Rationals>, f: PrimeField, pt: &[u64]) -> Option<u64> {
        let n = fr.num.to_fp(f, fr.num.reg.clone()).eval(pt).ok()?;
        let d = fr.den.to_fp(f, fr.den.reg.clone()).eval(pt).ok()?;
        Some(f.mulm(n, f.invm(d)?))
    }

    fn eval_fp_vals(fr: &Fraction<Rationals>, f: PrimeField, pt: &[u64]) -> Option<u64> {
        eval_fp(fr, f, pt)
    }

    #[test]
    fn iota_m_restricts_to_iota() {
        let n = 3;
        let two = iota(n).unwrap();
        let full = iota_m(n, 2).unwrap();
        // q[1,i] matches p_i image, q[2,i] matches q_i image
        for i in 1..=n {
            let a = &full.images[full.source.lookup(&format!("q[1,{}]", i)).unwrap()];
            let b = &two.images[two.source.lookup(&format!("p{}", i)).unwrap()];
            assert!(a.eq_cross(b));
            let a = &full.images[full.source.lookup(&format!("q[2,{}]", i)).unwrap()];
            let b = &two.images[two.source.lookup(&format!("q{}", i)).unwrap()];
            assert!(a.eq_cross(b));
        }
    }

    #[test]
    fn phi_preserves_commutation() {
        // alpha(phi(y_a), phi(y_b)) = lambda_y(a, b) for interior rows
        let n = 3;
        let m = 3;
        let q = build_q(n, m).unwrap();
        let ycomm = lambda_y(&q);
        let netcomm = lambda_snake(n, m).unwrap();
        let phi = phi_eps(&q, &ycomm, &netcomm, m).unwrap();
        let exps_of = |e: &SkewExpr| -> Vec<i32> {
            let p = e.expand(&netcomm).unwrap();
            let (exps, _) = p.as_monomial().unwrap();
            exps.clone()
        };
        for (a, ga) in ycomm.gens().iter().enumerate() {
            for (b, gb) in ycomm.gens().iter().enumerate() {
                let (Some(ia), Some(ib)) = (&phi.images[a], &phi.images[b]) else {
                    continue;
                };
                let ea = exps_of(ia);
                let eb = exps_of(ib);
                let alpha = NCLaurent::alpha_exponent(&netcomm, &ea, &eb);
                assert_eq!(alpha, ycomm.lambda(ga, gb), "{} {}", ga, gb);
            }
        }
    }

    #[test]
    fn phi_alpha_kappa_identity() {
        // phi(alpha_{i+1}(M_j)) = (q^-_{i-1} ... q^-_{i-n+1})^{-1} kappa_i(q^-, q)
        for n in [3usize, 4] {
            let m = 2;
            let q = build_q(n, m).unwrap();
            let ycomm = lambda_y(&q);
            let netcomm = lambda_snake(n, m).unwrap();
            let phi = phi_eps(&q, &ycomm, &netcomm, m).unwrap();
            let j = 1usize;
            let cyc: Vec<usize> = (1..=n)
                .map(|i| ycomm.index_of(&Gen::Y(Vertex::grid(j, i))).unwrap())
                .collect();
            let pcol = column_gens(&netcomm, n, j);
            let qcol = column_gens(&netcomm, n, j + 1);
            for i in 1..=n as i64 {
                let a = alpha_eps(&ycomm, n, i + 1, &cyc);
                let lhs = phi.apply(&SkewExpr::poly(a)).unwrap().expand(&netcomm).unwrap();
                // rhs: inverse of the monomial q^-_{i-1}...q^-_{i-n+1} times kappa_i
                let word: Vec<(usize, i32)> = (1..=n as i64 - 1)
                    .map(|l| (pcol[wrap(n, i - l) - 1], 1))
                    .collect();
                let mono = SkewExpr::poly(NCLaurent::from_word(netcomm.clone(), &word));
                let kap = SkewExpr::poly(kappa_eps(&netcomm, n, i, &pcol, &qcol));
                let rhs = SkewExpr::mul2(SkewExpr::inv(mono), kap)
                    .expand(&netcomm)
                    .unwrap();
                assert_eq!(lhs, rhs, "n={} i={}", n, i);
            }
        }
    }

    #[test]
    fn composite_y_to_cluster() {
        // iota_m . phi sends y_{j,i} to the printed Laurent monomial, which
        // also equals prod_u x_u^{b_uv} over the reduced enriched quiver
        let n = 3;
        let m = 3;
        let q = build_q(n, m).unwrap();
        let qp = build_q_tilde_prime(n, m).unwrap();
        let (_, _, phi) = phi_classical(&q, m).unwrap();
        let im = iota_m(n, m).unwrap();
        let reg = im.target.clone();
        for (vi, &v) in q.verts().iter().enumerate() {
            let Some(phi_img) = &phi[vi] else { continue };
            let got = phi_img.subst(&im).unwrap();
            let Vertex::Grid { cycle: j, pos: i } = v else {
                unreachable!()
            };
            let (j, i) = (j as usize, i as i64);
            let x = |cyc: i64, p: i64| {
                Fraction::gen(
                    Rationals,
                    reg.clone(),
                    qp.index_of(Vertex::grid(cyc as usize, wrap(n, p))).unwrap(),
                )
            };
            let frz = |from: (i64, i64), to: (i64, i64)| {
                Fraction::gen(
                    Rationals,
                    reg.clone(),
                    qp.index_of(Vertex::frozen(
                        (from.0 as usize, wrap(n, from.1)),
                        (to.0 as usize, wrap(n, to.1)),
                    ))
                    .unwrap(),
                )
            };
            let expect = x(j as i64 - 1, i + 1)
                .mul(&x(j as i64, i - 1))
                .mul(&x(j as i64 + 1, i))
                .div(&x(j as i64 - 1, i).mul(&x(j as i64, i + 1)).mul(&x(j as i64 + 1, i - 1)))
                .unwrap()
                .mul(&frz((j as i64, i), (j as i64 + 1, i - 1)))
                .div(&frz((j as i64 - 1, i + 1), (j as i64, i)))
                .unwrap();
            assert!(got.eq_cross(&expect), "vertex {}", v);

            // eq form: prod over all vertices u of x_u^{b_{u,v}}
            let mut mono = Fraction::one(Rationals, reg.clone());
            for &u in qp.verts() {
                let b = qp.b(u, v);
                if b != 0 {
                    let xu = Fraction::gen(Rationals, reg.clone(), qp.index_of(u).unwrap());
                    mono = mono.mul(&xu.powi(b as i32).unwrap());
                }
            }
            assert!(got.eq_cross(&mono), "monomial form at {}", v);
        }
    }
}
