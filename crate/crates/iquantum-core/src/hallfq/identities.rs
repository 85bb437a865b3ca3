//! Closed-form Hall identities between simples, used to cross-check the
//! multiplication on reflected ıquivers.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::catalog::Catalog;
use super::hall::{sqrtq, Hall, HallElem};
use crate::error::CoreResult;
use crate::scalars::QuadNum;

#[derive(Clone, Debug)]
pub struct Identity {
    pub label: String,
    pub lhs: HallElem,
    pub rhs: HallElem,
    pub holds: bool,
}

fn has_arrow(c: &Catalog, s: usize, t: usize) -> bool {
    c.alg.quiver.arrows.iter().any(|&(a, b)| a == s && b == t)
}

fn q_minus_one(q: u32) -> QuadNum {
    QuadNum::from_int(q as i64 - 1, q)
}

/// For every arrow `i → j` with no arrow back:
/// `𝐯[S_i]*[S_j] − [S_j]*[S_i] = (q−1)[X_ij]`, where `X_ij` is the
/// indecomposable kQ-module of dimension `e_i + e_j`.
pub fn commutator_identities(h: &Hall) -> CoreResult<Vec<Identity>> {
    let c = h.cat;
    let q = h.q();
    let mut out = Vec::new();
    for &(i, j) in &c.alg.quiver.arrows {
        if has_arrow(c, j, i) {
            continue;
        }
        let (si, sj) = (h.simple(i)?, h.simple(j)?);
        let lhs = h.mul(&si, &sj)?.scale(&sqrtq(q, 1)).sub(&h.mul(&sj, &si)?);
        let mut root = vec![0i32; c.alg.n];
        root[i] += 1;
        root[j] += 1;
        let x = super::psi::kq_indecomposable(h, &root)?;
        let rhs = HallElem::class(q, vec![x]).scale(&q_minus_one(q));
        let label = format!("v[S{}]*[S{}] - [S{}]*[S{}] = (q-1)[X{}{}]", c.alg.label(i), c.alg.label(j), c.alg.label(j), c.alg.label(i), c.alg.label(i), c.alg.label(j));
        out.push(Identity { label, holds: lhs == rhs, lhs, rhs });
    }
    Ok(out)
}

/// For every non-fixed `i` with arrows `i → j` and `τi → j`:
/// `[S_j]*[S_i]*[S_τi] = [S_j ⊕ S_i ⊕ S_τi] + (q−1)[S_j ⊕ 𝔼_i]`.
pub fn triple_identities(h: &Hall) -> CoreResult<Vec<Identity>> {
    let c = h.cat;
    let q = h.q();
    let tau = &c.alg.tau;
    let mut out = Vec::new();
    for i in 0..c.alg.n {
        let ti = tau[i];
        if ti == i {
            continue;
        }
        for j in 0..c.alg.n {
            if j == i || j == ti || !has_arrow(c, i, j) || !has_arrow(c, ti, j) {
                continue;
            }
            let (sj, si, sti) = (h.simple(j)?, h.simple(i)?, h.simple(ti)?);
            let lhs = h.mul_all(&[sj.clone(), si.clone(), sti.clone()])?;
            let key = |x: &HallElem| x.terms.keys().next().cloned().unwrap_or_default();
            let all = Catalog::merge(&Catalog::merge(&key(&sj), &key(&si)), &key(&sti));
            let mut rhs = HallElem::class(q, all);
            rhs.add_term(Catalog::merge(&key(&sj), &[c.e_id(i)]), q_minus_one(q));
            let label = format!(
                "[S{}]*[S{}]*[S{}] = [S{}+S{}+S{}] + (q-1)[S{}+E{}]",
                c.alg.label(j), c.alg.label(i), c.alg.label(ti), c.alg.label(j), c.alg.label(i), c.alg.label(ti), c.alg.label(j), c.alg.label(i)
            );
            out.push(Identity { label, holds: lhs == rhs, lhs, rhs });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hallfq::algebra::build_bound_algebra;
    use crate::hallfq::catalog::CatalogOptions;
    use crate::rootdata::{build, DiagramKind, DiagramSpec};

    fn reflected(spec: DiagramSpec, q: u32) -> Catalog {
        let quiver = build(&spec).unwrap();
        let l = (0..quiver.n).find(|&i| quiver.is_sink(i) && quiver.is_rep(i)).unwrap();
        let a = build_bound_algebra(&quiver.reflect(l).unwrap(), 3).unwrap();
        Catalog::build(&a, q, CatalogOptions { max_dim: 6, empty_levels: 1 }).unwrap()
    }

    #[test]
    fn commutators_after_reflection() {
        for spec in [DiagramSpec::split(DiagramKind::A, 2), DiagramSpec::quasi_split(DiagramKind::A, 3)] {
            for q in [2u32, 3] {
                let c = reflected(spec.clone(), q);
                let ids = commutator_identities(&Hall::new(&c)).unwrap();
                assert!(!ids.is_empty());
                for x in ids {
                    assert!(x.holds, "q={} {}: {:?} vs {:?}", q, x.label, x.lhs, x.rhs);
                }
            }
        }
    }

    #[test]
    fn triple_after_reflection_a3() {
        for q in [2u32, 3] {
            let c = reflected(DiagramSpec::quasi_split(DiagramKind::A, 3), q);
            let ids = triple_identities(&Hall::new(&c)).unwrap();
            assert_eq!(ids.len(), 2);
            for x in ids {
                assert!(x.holds, "q={} {}: {:?} vs {:?}", q, x.label, x.lhs, x.rhs);
            }
        }
    }
}
