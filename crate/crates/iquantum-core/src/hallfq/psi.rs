//! The map from the ıquantum group to the (reduced) Hall algebra, checked
//! against the rewriting normal form and the root vectors.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;

use super::catalog::ClassKey;
use super::hall::{sqrtq, Hall, HallElem, ReducedElem};
use crate::error::{CoreError, CoreResult};
use crate::freealg::{Letter, NCPoly};
use crate::iqg::{IQuantumGroup, Level, Poly};
use crate::iseq::IAdmissibleSeq;
use crate::qgroup::distinguished_parameter;
use crate::scalars::{FieldElem, QuadNum, Rat};

fn inv_q_minus_one(q: u32) -> Rat {
    Rat::new(BigInt::from(1), BigInt::from(q as i64 - 1))
}

/// `ψ(B_j)`: `−[S_j]/(q−1)` for a representative, `𝐯[S_j]/(q−1)` otherwise.
pub fn psi_b(h: &Hall, j: usize) -> CoreResult<HallElem> {
    let q = h.q();
    let s = h.simple(j)?;
    let c = if h.cat.alg.quiver.is_rep(j) {
        QuadNum::from_rat(-inv_q_minus_one(q), q)
    } else {
        sqrtq(q, 1).scale(&inv_q_minus_one(q))
    };
    Ok(s.scale(&c))
}

/// `ψ(k̃_l)`: `−q^{-1}[𝔼_l]` if `l` is fixed, `[𝔼_l]` otherwise.
pub fn psi_kt(h: &Hall, l: usize) -> HallElem {
    let q = h.q();
    let e = h.e(l);
    if h.cat.alg.quiver.fixed(l) {
        e.scale(&sqrtq(q, -2).scale(&Rat::from_integer(BigInt::from(-1))))
    } else {
        e
    }
}

fn word_image(h: &Hall, w: &[Letter]) -> CoreResult<HallElem> {
    let imgs = w.iter().map(|&x| psi_b(h, x as usize)).collect::<CoreResult<Vec<_>>>()?;
    h.mul_all(&imgs)
}

/// Image of a universal-level element in the localized Hall algebra.
/// Only non-negative unit exponents are supported.
pub fn psi_universal(h: &Hall, ig: &IQuantumGroup, p: &Poly) -> CoreResult<HallElem> {
    if ig.level != Level::Universal {
        return Err(CoreError::InvalidParameter("expected the universal level".into()));
    }
    let q = h.q();
    let mut out = HallElem::zero(q);
    for (m, c) in p.iter() {
        let c = c.specialize(q)?;
        let mut x = word_image(h, &m.w)?;
        for (k, &node) in ig.unit_nodes.iter().enumerate() {
            let e = m.h.0[k];
            if e < 0 {
                return Err(CoreError::InvalidParameter("negative unit power has no Hall image without localizing".into()));
            }
            for _ in 0..e {
                x = h.mul(&x, &psi_kt(h, node))?;
            }
        }
        out = out.add(&h.reduce(&x)?.scale(&c));
    }
    Ok(out)
}

/// Parameters specialized at `√q`, indexed by node.
pub fn specialize_params(ig: &IQuantumGroup, q: u32) -> CoreResult<Vec<QuadNum>> {
    let vs = match &ig.level {
        Level::Parameter(vs) => vs.clone(),
        Level::Universal => distinguished_parameter(&ig.quiver),
    };
    vs.iter().map(|v| v.specialize(q)).collect()
}

/// Image of a parameter-level element in the reduced Hall algebra:
/// `k_j ↦ ς_j^{-1}[𝔼_j]`, `k_j^{-1} ↦ ς_j^{-1}[𝔼_{τj}]`.
pub fn psi_parameter(h: &Hall, ig: &IQuantumGroup, p: &Poly) -> CoreResult<ReducedElem> {
    let q = h.q();
    let sigma = specialize_params(ig, q)?;
    let mut out = ReducedElem::zero(q);
    for (m, c) in p.iter() {
        let c = c.specialize(q)?;
        let x = h.to_reduced(&word_image(h, &m.w)?, &sigma)?;
        let mut shift = vec![0i32; ig.n()];
        let mut coeff = c;
        for (k, &node) in ig.unit_nodes.iter().enumerate() {
            let e = m.h.0[k] as i32;
            shift[node] += e;
            coeff = coeff.mul(&sigma[node].pow(-e).ok_or(CoreError::DivisionByZero)?);
        }
        out = out.add(&x.shift(&shift).scale(&coeff));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct PsiCheck {
    pub label: String,
    pub lhs: HallElem,
    pub rhs: HallElem,
    /// The normal form differs from the input (the check is not a tautology).
    pub rewritten: bool,
    pub equal: bool,
}

/// `ψ(word)` computed directly in the Hall algebra against `ψ(nf(word))`.
pub fn check_word(h: &Hall, ig: &IQuantumGroup, word: &[usize]) -> CoreResult<PsiCheck> {
    let w: Vec<Letter> = word.iter().map(|&i| i as Letter).collect();
    let p: Poly = NCPoly::word(&w);
    let nf = ig.nf(&p)?;
    let lhs = h.reduce(&word_image(h, &w)?)?;
    let rhs = psi_universal(h, ig, &nf)?;
    let label = word.iter().map(|&i| ig.gen_name(crate::iqg::Gen::B(i))).collect::<Vec<_>>().join("·");
    Ok(PsiCheck { label, equal: lhs == rhs, lhs, rhs, rewritten: nf != p })
}

/// Every defining relation maps to zero.
pub fn check_relations(h: &Hall, ig: &IQuantumGroup) -> CoreResult<Vec<PsiCheck>> {
    let mut out = Vec::new();
    for r in &ig.relations {
        let img = psi_universal(h, ig, r)?;
        out.push(PsiCheck {
            label: ig.alphabet().fmt_poly(r),
            equal: img.is_zero(),
            lhs: img,
            rhs: HallElem::zero(h.q()),
            rewritten: true,
        });
    }
    Ok(out)
}

/// The kQ-module indecomposable with dimension vector `root`.
pub fn kq_indecomposable(h: &Hall, root: &[i32]) -> CoreResult<u16> {
    let want: Vec<usize> = root.iter().map(|&x| x as usize).collect();
    let hits: Vec<u16> = (0..h.cat.len() as u16)
        .filter(|&k| h.cat.is_kq(k) && h.cat.indecs[k as usize].rep.dims == want)
        .collect();
    match hits.as_slice() {
        [k] => Ok(*k),
        _ => Err(CoreError::Other(alloc::format!("no unique kQ indecomposable of dimension {:?}", root))),
    }
}

#[derive(Clone, Debug)]
pub struct RootVectorCheck {
    pub root: Vec<i32>,
    pub node: usize,
    pub image: ReducedElem,
    pub expected: ReducedElem,
    pub equal: bool,
}

/// `ψ(B_β) = −[M(β)]/(q−1)` (and `𝐯[M(τβ)]/(q−1)` for the τ-partner) in the
/// reduced Hall algebra at the distinguished parameter.
pub fn check_root_vectors(h: &Hall, ig: &IQuantumGroup, seq: &IAdmissibleSeq) -> CoreResult<Vec<RootVectorCheck>> {
    let q = h.q();
    let quiver = &ig.quiver;
    let mut out = Vec::new();
    for rv in ig.q_root_vectors(seq)? {
        let image = psi_parameter(h, ig, &rv.value)?;
        let m = kq_indecomposable(h, &rv.root)?;
        let c = if quiver.is_rep(rv.node) {
            QuadNum::from_rat(-inv_q_minus_one(q), q)
        } else {
            sqrtq(q, 1).scale(&inv_q_minus_one(q))
        };
        let mut expected = ReducedElem::zero(q);
        let key: ClassKey = vec![m];
        expected.add_term((key, vec![0; quiver.n]), c);
        out.push(RootVectorCheck { root: rv.root, node: rv.node, equal: image == expected, image, expected });
    }
    Ok(out)
}

/// Convenience: the ıquantum group at the distinguished parameter.
pub fn distinguished_level(ig_quiver: &crate::rootdata::IQuiver) -> Level {
    Level::Parameter(distinguished_parameter(ig_quiver))
}

/// `−1/(q−1)` as an element of ℚ(v) at `v = √q` (for reports).
pub fn normalization(q: u32) -> FieldElem {
    FieldElem::from_rat(-inv_q_minus_one(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hallfq::algebra::build_bound_algebra;
    use crate::hallfq::catalog::{Catalog, CatalogOptions};
    use crate::iqg::BuildOptions;
    use crate::iseq::i_admissible_complete;
    use crate::rootdata::{build, DiagramKind, DiagramSpec};

    fn setup(spec: DiagramSpec, q: u32, d: usize) -> (Catalog, crate::rootdata::IQuiver) {
        let quiver = build(&spec).unwrap();
        let a = build_bound_algebra(&quiver, 3).unwrap();
        (Catalog::build(&a, q, CatalogOptions { max_dim: d, empty_levels: 1 }).unwrap(), quiver)
    }

    #[test]
    fn a2_relations_and_words() {
        for q in [2u32, 3] {
            let (c, quiver) = setup(DiagramSpec::split(DiagramKind::A, 2), q, 4);
            let h = Hall::new(&c);
            let ig = IQuantumGroup::new(&quiver, Level::Universal, &BuildOptions::default()).unwrap();
            for r in check_relations(&h, &ig).unwrap() {
                assert!(r.equal, "q={} relation {} ↦ {:?}", q, r.label, r.lhs);
            }
            for w in [[0usize, 1, 0], [1, 0, 0], [0, 0, 1]] {
                assert!(check_word(&h, &ig, &w).unwrap().equal, "q={} word {:?}", q, w);
            }
        }
    }

    #[test]
    fn a2_root_vectors() {
        let (c, quiver) = setup(DiagramSpec::split(DiagramKind::A, 2), 3, 4);
        let h = Hall::new(&c);
        let ig = IQuantumGroup::new(&quiver, distinguished_level(&quiver), &BuildOptions::default()).unwrap();
        let seq = i_admissible_complete(&quiver).unwrap();
        for r in check_root_vectors(&h, &ig, &seq).unwrap() {
            assert!(r.equal, "root {:?}: {:?} vs {:?}", r.root, r.image, r.expected);
        }
    }

    #[test]
    fn orthogonal_generators_commute() {
        let (c, quiver) = setup(DiagramSpec::split(DiagramKind::A, 3), 2, 3);
        let h = Hall::new(&c);
        let (i, j) = (0, 2);
        assert_eq!(quiver.cartan[i][j], 0);
        let (bi, bj) = (psi_b(&h, i).unwrap(), psi_b(&h, j).unwrap());
        assert_eq!(h.mul(&bi, &bj).unwrap(), h.mul(&bj, &bi).unwrap());
    }

    #[test]
    fn twist_is_restricted_euler_form() {
        let (c, _) = setup(DiagramSpec::quasi_split(DiagramKind::A, 3), 3, 4);
        let h = Hall::new(&c);
        let xs: Vec<ClassKey> = c.classes_with_dims(&[1, 1, 0]).into_iter().chain(c.classes_with_dims(&[0, 1, 1])).collect();
        for m in &xs {
            for n in &xs {
                let (x, y) = (HallElem::class(3, m.clone()), HallElem::class(3, n.clone()));
                let scaled = h.mul_untwisted(&x, &y).unwrap().scale(&sqrtq(3, h.twist(m, n)));
                assert_eq!(h.mul(&x, &y).unwrap(), scaled);
            }
        }
    }
}
