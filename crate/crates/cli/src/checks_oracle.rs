//! The randomized skew-field suites: Yang-Baxter and involutivity for the
//! quantum geometric R-matrix, commutation preservation, the quantum y-form
//! against the mutation route, compatibility of the two quantum R-matrices,
//! the lens-push realization, and invariance of the loop symmetric
//! functions.

use crate::report::CheckVerdict;
use crate::suite::{Check, SuiteParams};
use rmx_core::network::{cylindric_loop_schur, lens_parameter, loop_e, loop_schur, yb_move, CylShape, SkewShape};
use rmx_core::qtorus::{lambda_snake, lambda_y, CommutationMatrix, Gen, NCLaurent};
use rmx_core::quiver::{build_q, Vertex};
use rmx_core::rmatrix::{
    column_gens, phi_eps, quantum_cluster_ry, r_network, QuantumSubst, QuantumYState,
};
use rmx_core::seed::r_word;
use rmx_core::skew::{Oracle, SkewExpr, SpecConfig, Verdict};
use std::sync::Arc;

fn verdict_of(results: Result<Vec<(String, Verdict)>, rmx_core::Error>) -> CheckVerdict {
    match results {
        Err(e) => CheckVerdict::Error {
            detail: e.to_string(),
        },
        Ok(list) => {
            let mut trials = 0;
            let mut orders = Vec::new();
            for (label, v) in list {
                match v {
                    Verdict::ProbablyEqual {
                        trials: t,
                        root_orders,
                    } => {
                        trials = t;
                        if root_orders.len() > orders.len() {
                            orders = root_orders;
                        }
                    }
                    Verdict::NotEqual(w) => {
                        return CheckVerdict::Fail {
                            detail: format!("identity '{}' refuted", label),
                            witness: Some(w),
                        }
                    }
                }
            }
            orders.sort_unstable();
            orders.dedup();
            CheckVerdict::ProbablyPass {
                trials,
                root_orders: orders,
            }
        }
    }
}

fn oracle_check(
    id: &str,
    subject: &str,
    comm: Arc<CommutationMatrix>,
    cfg: SpecConfig,
    items: Vec<(String, SkewExpr, SkewExpr)>,
) -> Check {
    Check::new(id, subject, move || {
        let oracle = Oracle::new(comm.clone(), cfg.clone());
        verdict_of(oracle.check_batch(&items))
    })
}

pub fn oracle_suite(params: &SuiteParams) -> Vec<Check> {
    let n = 3usize;
    let m = 3usize;
    let cfg = params.oracle.clone();
    let capped = params.oracle.clone().capped_for_large_support();
    let mut checks = Vec::new();

    let net = lambda_snake(n, m).expect("network torus");
    let r1 = r_network(&net, n, 1);
    let r2 = r_network(&net, n, 2);

    // involutivity of each R
    for (j, r) in [(1usize, &r1), (2usize, &r2)] {
        let twice = r.compose(r).expect("compose");
        let items: Vec<(String, SkewExpr, SkewExpr)> = (0..net.len())
            .map(|g| {
                (
                    format!("{}", net.gens()[g]),
                    twice.image(g).unwrap().clone(),
                    SkewExpr::gen(g),
                )
            })
            .collect();
        checks.push(oracle_check(
            &format!("oracle.involution.j{}", j),
            "the quantum geometric R-matrix squares to the identity",
            net.clone(),
            cfg.clone(),
            items,
        ));
    }

    // braid relation
    {
        let lhs = r1.compose(&r2).expect("compose").compose(&r1).expect("compose");
        let rhs = r2.compose(&r1).expect("compose").compose(&r2).expect("compose");
        let items: Vec<(String, SkewExpr, SkewExpr)> = (0..net.len())
            .map(|g| {
                (
                    format!("{}", net.gens()[g]),
                    lhs.image(g).unwrap().clone(),
                    rhs.image(g).unwrap().clone(),
                )
            })
            .collect();
        checks.push(oracle_check(
            "oracle.braid",
            "Yang-Baxter relation of adjacent quantum geometric R-matrices",
            net.clone(),
            capped.clone(),
            items,
        ));
    }

    // commutation preservation: R_1 on columns 1,2; partners anywhere
    {
        let mut items = Vec::new();
        for a in 0..net.len() {
            for b in 0..net.len() {
                if a == b {
                    continue;
                }
                let ga = net.gens()[a].clone();
                let gb = net.gens()[b].clone();
                let (Gen::Net { col: ca, .. }, Gen::Net { col: cb, .. }) = (&ga, &gb) else {
                    continue;
                };
                // at least one generator must move under R_1
                if *ca > 2 && *cb > 2 {
                    continue;
                }
                let lam = net.lambda_at(a, b);
                let ia = r1.image(a).unwrap().clone();
                let ib = r1.image(b).unwrap().clone();
                let lhs = SkewExpr::mul2(ia.clone(), ib.clone());
                let rhs = SkewExpr::mul(vec![SkewExpr::eps(lam), ib, ia]);
                items.push((format!("{} vs {}", ga, gb), lhs, rhs));
            }
        }
        checks.push(oracle_check(
            "oracle.commutation-preservation",
            "R-images satisfy the same commutation exponents as the generators",
            net.clone(),
            cfg.clone(),
            items,
        ));
    }

    // quantum y closed form vs the mutation route, all cycles of the
    // three-cycle quiver (boundary cycles use the reduced formulas)
    {
        let q = build_q(n, 2).expect("quiver");
        let st = QuantumYState::initial(q.clone());
        for c in 0..=2usize {
            let route = st
                .apply_word(&r_word(&q, c, 1, false))
                .expect("mutation route");
            let closed = quantum_cluster_ry(&q, &st.comm, c).expect("closed form");
            let items: Vec<(String, SkewExpr, SkewExpr)> = st
                .comm
                .gens()
                .iter()
                .enumerate()
                .map(|(gi, g)| {
                    (
                        format!("{}", g),
                        route.exprs[gi].clone(),
                        closed.image(gi).unwrap().clone(),
                    )
                })
                .collect();
            checks.push(oracle_check(
                &format!("oracle.y-closed-form.c{}", c),
                "closed quantum y-images equal the quantum mutation route",
                st.comm.clone(),
                cfg.clone(),
                items,
            ));
        }
    }

    // compatibility of the quantum cluster and quantum geometric R-matrices
    {
        let q = build_q(n, m).expect("quiver");
        let ycomm = lambda_y(&q);
        let phi = phi_eps(&q, &ycomm, &net, m).expect("phi");
        for j in [1usize, 2] {
            let rj = r_network(&net, n, j);
            let rmj = quantum_cluster_ry(&q, &ycomm, j).expect("closed y-form");
            let mut items = Vec::new();
            for (gi, g) in ycomm.gens().iter().enumerate() {
                let Gen::Y(Vertex::Grid { cycle, .. }) = g else {
                    continue;
                };
                let row = *cycle as usize;
                if row < 1 || row > m - 1 {
                    continue;
                }
                // both routes must stay inside the embedded subfield
                let Ok(cluster_side) = rmj.image(gi) else { continue };
                let Ok(cl) = phi.apply(cluster_side) else {
                    continue;
                };
                let geom = rj.apply(phi.image(gi).unwrap()).expect("geometric side");
                items.push((format!("{}", g), geom, cl));
            }
            checks.push(oracle_check(
                &format!("oracle.compatibility.j{}", j),
                "the two quantum R-matrices agree through the y-embedding",
                net.clone(),
                capped.clone(),
                items,
            ));
        }
    }

    // lens push: one Yang-Baxter step sends (r_{i+1}, p_i, q_i) to
    // (R(p_i), R(q_i), r_i); the parameter is periodic
    {
        let two = lambda_snake(n, 2).expect("two-column torus");
        let pg = column_gens(&two, n, 1);
        let qg = column_gens(&two, n, 2);
        let rsub = r_network(&two, n, 1);
        let mut items = Vec::new();
        for i in 1..=n as i64 {
            let r_in = lens_parameter(&two, n, i, &pg, &qg);
            let r_out = lens_parameter(&two, n, i - 1, &pg, &qg);
            let pi = SkewExpr::gen(pg[rmx_core::quiver::wrap(n, i) - 1]);
            let qi = SkewExpr::gen(qg[rmx_core::quiver::wrap(n, i) - 1]);
            items.push((
                format!("quasi-commutation at {}", i),
                SkewExpr::mul(vec![r_in.clone(), pi.clone(), qi.clone()]),
                SkewExpr::mul(vec![qi.clone(), pi.clone(), r_in.clone()]),
            ));
            let (np, nq, nr) = yb_move(&r_in, &pi, &qi);
            items.push((
                format!("pushed p at {}", i),
                np,
                rsub.image(pg[rmx_core::quiver::wrap(n, i) - 1]).unwrap().clone(),
            ));
            items.push((
                format!("pushed q at {}", i),
                nq,
                rsub.image(qg[rmx_core::quiver::wrap(n, i) - 1]).unwrap().clone(),
            ));
            items.push((format!("pushed parameter at {}", i), nr, r_out));
        }
        items.push((
            "parameter periodicity".to_string(),
            lens_parameter(&two, n, 1, &pg, &qg),
            lens_parameter(&two, n, 1 + n as i64, &pg, &qg),
        ));
        // the full walk: n pushes produce the R-images and return the
        // created parameter, so the lens can be annihilated
        let (images, created, returned) =
            rmx_core::network::push_lens_around(&two, n, &pg, &qg, 1);
        for (g, img) in images {
            items.push((
                format!("full walk image of {}", two.gens()[g]),
                img,
                rsub.image(g).unwrap().clone(),
            ));
        }
        items.push(("full walk closes".to_string(), returned, created));
        checks.push(oracle_check(
            "oracle.lens-push",
            "the lens walk around the cylinder realizes the quantum R-matrix",
            two.clone(),
            cfg.clone(),
            items,
        ));
    }

    // invariance of the loop symmetric functions under both R's
    {
        let shape21 = SkewShape::new(vec![2, 1], vec![]).expect("shape");
        let cyl = CylShape::from_partition(n, 1, &[2, 1]).expect("cylindric shape");
        for (j, r) in [(1usize, &r1), (2usize, &r2)] {
            let mut items = Vec::new();
            for rr in 1..=n as i64 {
                for k in 1..=m as i64 {
                    let e = SkewExpr::poly(loop_e(&net, n, m, k, rr));
                    items.push((
                        format!("elementary k={} r={}", k, rr),
                        r.apply(&e).expect("substitution"),
                        e,
                    ));
                }
                let s = SkewExpr::poly(loop_schur(&net, n, m, &shape21, rr));
                items.push((
                    format!("loop Schur (2,1) r={}", rr),
                    r.apply(&s).expect("substitution"),
                    s,
                ));
                let sd = SkewExpr::poly(cylindric_loop_schur(&net, m, &cyl, rr));
                items.push((
                    format!("cylindric Schur r={}", rr),
                    r.apply(&sd).expect("substitution"),
                    sd,
                ));
            }
            checks.push(oracle_check(
                &format!("oracle.invariance.j{}", j),
                "loop symmetric functions are fixed by the quantum R-matrix",
                net.clone(),
                capped.clone(),
                items,
            ));
        }
    }

    // the y-side braid relation, per generator
    {
        let q = build_q(n, m).expect("quiver");
        let ycomm = lambda_y(&q);
        let ry1 = quantum_cluster_ry(&q, &ycomm, 1).expect("closed");
        let ry2 = quantum_cluster_ry(&q, &ycomm, 2).expect("closed");
        let total = |s: &QuantumSubst| s.clone();
        let lhs = total(&ry1)
            .compose(&ry2)
            .and_then(|t| t.compose(&ry1))
            .expect("compose");
        let rhs = total(&ry2)
            .compose(&ry1)
            .and_then(|t| t.compose(&ry2))
            .expect("compose");
        let items: Vec<(String, SkewExpr, SkewExpr)> = ycomm
            .gens()
            .iter()
            .enumerate()
            .map(|(gi, g)| {
                (
                    format!("{}", g),
                    lhs.image(gi).unwrap().clone(),
                    rhs.image(gi).unwrap().clone(),
                )
            })
            .collect();
        checks.push(oracle_check(
            "oracle.y-braid",
            "Yang-Baxter relation of adjacent quantum y-form R-matrices",
            ycomm.clone(),
            capped,
            items,
        ));
    }

    // pairwise alpha bookkeeping against the closed case analysis: the
    // conjugation exponents of kappa-support monomials with p_i q_i
    {
        let two = lambda_snake(n, 2).expect("two-column torus");
        let pg = column_gens(&two, n, 1);
        let qg = column_gens(&two, n, 2);
        checks.push(Check::exact(
            "oracle.alpha-cases",
            "commutation exponents of the kappa terms with p_i q_i",
            move || {
                use rmx_core::qtorus::kappa_eps;
                for i in 1..=n as i64 {
                    let kap = kappa_eps(&two, n, i + 1, &pg, &qg);
                    let mut piqi = vec![0i32; two.len()];
                    piqi[pg[rmx_core::quiver::wrap(n, i) - 1]] += 1;
                    piqi[qg[rmx_core::quiver::wrap(n, i) - 1]] += 1;
                    for (exps, _) in kap.terms() {
                        let a = NCLaurent::alpha_exponent(&two, &piqi, exps);
                        if a != -1 {
                            return Err(format!(
                                "term of kappa_{} has exponent {} against p q",
                                i + 1,
                                a
                            ));
                        }
                    }
                }
                Ok(())
            },
        ));
    }

    checks
}
