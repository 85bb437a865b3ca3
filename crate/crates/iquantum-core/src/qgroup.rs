//! Presentations of the Drinfeld double Ũ and of its central reductions.
//!
//! Letters are `F_1..F_n` followed by `E_1..E_n`; units are `K̃_i, K̃'_i`
//! (universal) or only `K_i` (reduced, where `K̃'_i = ς_i K_i^{-1}`).
//! Normal words come out as an F-block followed by an E-block, with the
//! Cartan part on the right.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{CoreError, CoreResult};
use crate::freealg::{complete, Alphabet, Letter, Mono, NCPoly, Reducer, RewriteSystem, Units};
use crate::rootdata::IQuiver;
use crate::scalars::{FieldElem, Scalar};

pub const DEFAULT_CAP: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub enum AmbientKind {
    Universal,
    /// Central reduction `K̃_i K̃'_i = ς_i`.
    Reduced(Vec<FieldElem>),
}

#[derive(Clone, Debug)]
pub struct AmbientAlgebra {
    pub kind: AmbientKind,
    pub n: usize,
    pub cartan: Vec<Vec<i32>>,
    pub rs: RewriteSystem<FieldElem>,
}

/// 1/(v − v⁻¹).
pub fn inv_v_minus_vinv() -> FieldElem {
    FieldElem::v().div(&FieldElem::v_pow(2).sub(&FieldElem::one())).unwrap()
}

/// `Σ_r (−1)^r [1−c; r] x^r y x^{1−c−r}` for `c ∈ {0, −1}`.
fn serre<S: Scalar>(x: Letter, y: Letter, c: i32, two: S) -> NCPoly<S> {
    let mut p = NCPoly::zero();
    match c {
        0 => {
            p.add_term(Mono::word(&[x, y]), S::one());
            p.add_term(Mono::word(&[y, x]), S::one().neg());
        }
        -1 => {
            p.add_term(Mono::word(&[x, x, y]), S::one());
            p.add_term(Mono::word(&[x, y, x]), two.neg());
            p.add_term(Mono::word(&[y, x, x]), S::one());
        }
        _ => unreachable!("simply-laced only"),
    }
    p
}

fn check_parameters(q: &IQuiver, vs: &[FieldElem]) -> CoreResult<()> {
    if vs.len() != q.n {
        return Err(CoreError::InvalidParameter(format!("expected {} parameters, got {}", q.n, vs.len())));
    }
    for i in 0..q.n {
        if vs[i].as_monomial().is_none() {
            return Err(CoreError::InvalidParameter(format!("ς_{} = {} is not of the form ±v^m", q.label(i), vs[i])));
        }
        if vs[i] != vs[q.tau[i]] {
            return Err(CoreError::InvalidParameter(format!("ς_{} ≠ ς_{}", q.label(i), q.label(q.tau[i]))));
        }
    }
    Ok(())
}

/// The distinguished parameter: `−v⁻²` at τ-fixed nodes, `1` elsewhere.
pub fn distinguished_parameter(q: &IQuiver) -> Vec<FieldElem> {
    (0..q.n)
        .map(|i| if q.fixed(i) { FieldElem::v_pow(-2).neg() } else { FieldElem::one() })
        .collect()
}

impl AmbientAlgebra {
    pub fn build(q: &IQuiver, kind: AmbientKind, cap: usize) -> CoreResult<Self> {
        let n = q.n;
        if let AmbientKind::Reduced(vs) = &kind {
            check_parameters(q, vs)?;
        }
        let reduced = matches!(kind, AmbientKind::Reduced(_));
        let mut letters = Vec::new();
        let mut weights = Vec::new();
        for i in 0..n {
            letters.push(format!("F{}", q.label(i)));
            let mut w = vec![0; n];
            w[i] = -1;
            weights.push(w);
        }
        for i in 0..n {
            letters.push(format!("E{}", q.label(i)));
            let mut w = vec![0; n];
            w[i] = 1;
            weights.push(w);
        }
        let mut units = Vec::new();
        let mut table = Vec::new();
        let row = |k: usize, sign: i32| -> Vec<i32> {
            let mut r = vec![0; 2 * n];
            for j in 0..n {
                r[j] = -2 * sign * q.c(k, j);
                r[n + j] = 2 * sign * q.c(k, j);
            }
            r
        };
        for k in 0..n {
            units.push(if reduced { format!("K{}", q.label(k)) } else { format!("Kt{}", q.label(k)) });
            table.push(row(k, 1));
        }
        if !reduced {
            for k in 0..n {
                units.push(format!("Ktp{}", q.label(k)));
                table.push(row(k, -1));
            }
        }
        let unit_weights = vec![vec![0; n]; units.len()];
        let alpha = Alphabet::new(letters, weights, units, unit_weights, &table);

        let mut amb = AmbientAlgebra {
            kind,
            n,
            cartan: q.cartan.clone(),
            rs: RewriteSystem::<FieldElem>::empty(alpha.clone(), cap),
        };
        let two = FieldElem::qint(2);
        let mut rels = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let mut r = NCPoly::word(&[amb.e_letter(i), amb.f_letter(j)]);
                r.add_term(Mono::word(&[amb.f_letter(j), amb.e_letter(i)]), FieldElem::one().neg());
                if i == j {
                    let h = amb.kt(i).sub(&amb.ktp(i)).scale(&inv_v_minus_vinv());
                    r = r.sub(&h);
                }
                rels.push(r);
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let c = q.c(i, j);
                if c == 0 && i > j {
                    continue;
                }
                rels.push(serre(amb.e_letter(i), amb.e_letter(j), c, two.clone()));
                rels.push(serre(amb.f_letter(i), amb.f_letter(j), c, two.clone()));
            }
        }
        amb.rs = complete(alpha, rels, cap)?;
        Ok(amb)
    }

    pub fn universal(q: &IQuiver, cap: usize) -> CoreResult<Self> {
        Self::build(q, AmbientKind::Universal, cap)
    }

    pub fn reduced(q: &IQuiver, params: &[FieldElem], cap: usize) -> CoreResult<Self> {
        Self::build(q, AmbientKind::Reduced(params.to_vec()), cap)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.rs.alpha
    }

    pub fn is_reduced(&self) -> bool {
        matches!(self.kind, AmbientKind::Reduced(_))
    }

    pub fn cap(&self) -> usize {
        self.rs.cap
    }

    pub fn f_letter(&self, i: usize) -> Letter {
        i as Letter
    }

    pub fn e_letter(&self, i: usize) -> Letter {
        (self.n + i) as Letter
    }

    pub fn e(&self, i: usize) -> NCPoly<FieldElem> {
        NCPoly::letter(self.e_letter(i))
    }

    pub fn f(&self, i: usize) -> NCPoly<FieldElem> {
        NCPoly::letter(self.f_letter(i))
    }

    /// `K̃_i^e` (or `K_i^e` when reduced).
    pub fn kt_pow(&self, i: usize, e: i16) -> NCPoly<FieldElem> {
        NCPoly::units(Units::single(i, e))
    }

    pub fn kt(&self, i: usize) -> NCPoly<FieldElem> {
        self.kt_pow(i, 1)
    }

    /// `K̃'_i^e`; in the reduced algebra `ς_i^e K_i^{-e}`.
    pub fn ktp_pow(&self, i: usize, e: i16) -> NCPoly<FieldElem> {
        match &self.kind {
            AmbientKind::Universal => NCPoly::units(Units::single(self.n + i, e)),
            AmbientKind::Reduced(vs) => {
                NCPoly::term(Mono::units(Units::single(i, -e)), vs[i].pow(e as i32).expect("nonzero parameter"))
            }
        }
    }

    pub fn ktp(&self, i: usize) -> NCPoly<FieldElem> {
        self.ktp_pow(i, 1)
    }

    pub fn mul(&self, x: &NCPoly<FieldElem>, y: &NCPoly<FieldElem>) -> NCPoly<FieldElem> {
        self.rs.alpha.mul(x, y)
    }

    pub fn reducer(&self) -> Reducer<'_, FieldElem> {
        self.rs.reducer()
    }

    pub fn nf(&self, x: &NCPoly<FieldElem>) -> CoreResult<NCPoly<FieldElem>> {
        self.reducer().normal_form(x)
    }

    /// Equality in the algebra (sound and complete up to the cap).
    pub fn equal(&self, x: &NCPoly<FieldElem>, y: &NCPoly<FieldElem>) -> CoreResult<bool> {
        self.reducer().equal(x, y)
    }

    /// Does every normal word factor as F-block · E-block?
    pub fn is_triangular(&self, x: &NCPoly<FieldElem>) -> bool {
        let n = self.n as Letter;
        x.iter().all(|(m, _)| m.w.windows(2).all(|p| !(p[0] >= n && p[1] < n)))
    }
}

impl<S: Scalar> RewriteSystem<S> {
    /// A system with no rules (every word is normal).
    pub fn empty(alpha: Alphabet, cap: usize) -> Self {
        complete(alpha, Vec::new(), cap).expect("empty completion")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freealg::rank;
    use crate::rootdata::{build, DiagramKind, DiagramSpec};

    fn fe(s: &str) -> FieldElem {
        FieldElem::parse(s).unwrap()
    }

    fn split(n: usize) -> IQuiver {
        build(&DiagramSpec::split(DiagramKind::A, n)).unwrap()
    }

    #[test]
    fn a1_commutator() {
        let a = AmbientAlgebra::universal(&split(1), DEFAULT_CAP).unwrap();
        let lhs = a.nf(&a.mul(&a.e(0), &a.f(0))).unwrap();
        let rhs = a.mul(&a.f(0), &a.e(0)).add(&a.kt(0).sub(&a.ktp(0)).scale(&inv_v_minus_vinv()));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn a2_serre_vanishes() {
        let a = AmbientAlgebra::universal(&split(2), DEFAULT_CAP).unwrap();
        let (e1, e2) = (a.e(0), a.e(1));
        let t1 = a.mul(&a.mul(&e1, &e1), &e2);
        let t2 = a.mul(&a.mul(&e1, &e2), &e1).scale(&fe("v+v^-1"));
        let t3 = a.mul(&a.mul(&e2, &e1), &e1);
        assert!(a.nf(&t1.sub(&t2).add(&t3)).unwrap().is_zero());
        assert!(a.rs.verify_confluence().unwrap());
    }

    #[test]
    fn reduced_central_product() {
        let q = split(1);
        let a = AmbientAlgebra::reduced(&q, &distinguished_parameter(&q), DEFAULT_CAP).unwrap();
        let p = a.nf(&a.mul(&a.kt(0), &a.ktp(0))).unwrap();
        assert_eq!(p, NCPoly::constant(fe("-v^-2")));
    }

    #[test]
    fn equality_examples() {
        let q = split(2);
        let a = AmbientAlgebra::universal(&q, DEFAULT_CAP).unwrap();
        assert!(a.equal(&a.mul(&a.kt(0), &a.kt(1)), &a.mul(&a.kt(1), &a.kt(0))).unwrap());
        assert!(!a.equal(&a.mul(&a.e(0), &a.e(1)), &a.mul(&a.e(1), &a.e(0))).unwrap());
        // k̃_1 = K̃_1K̃'_1 commutes with E_2 in split type.
        let k = a.mul(&a.kt(0), &a.ktp(0));
        assert!(a.equal(&a.mul(&k, &a.e(1)), &a.mul(&a.e(1), &k)).unwrap());
    }

    #[test]
    fn weight_space_dimension() {
        let a = AmbientAlgebra::universal(&split(2), DEFAULT_CAP).unwrap();
        let words: Vec<NCPoly<FieldElem>> = [[0usize, 1], [1, 0]]
            .iter()
            .map(|w| a.nf(&a.mul(&a.e(w[0]), &a.e(w[1]))).unwrap())
            .collect();
        assert_eq!(rank(&words), 2);
    }

    #[test]
    fn normal_forms_are_triangular() {
        let a = AmbientAlgebra::universal(&split(3), DEFAULT_CAP).unwrap();
        let x = a.mul(&a.mul(&a.e(0), &a.f(1)), &a.mul(&a.e(2), &a.f(0)));
        assert!(a.is_triangular(&a.nf(&x).unwrap()));
    }

    #[test]
    fn parameters_validated() {
        let q = build(&DiagramSpec::quasi_split(DiagramKind::A, 3)).unwrap();
        let bad = vec![fe("1"), fe("v"), fe("1")];
        assert!(AmbientAlgebra::reduced(&q, &bad, DEFAULT_CAP).is_ok());
        let bad = vec![fe("1"), fe("1"), fe("v")];
        assert!(matches!(AmbientAlgebra::reduced(&q, &bad, DEFAULT_CAP), Err(CoreError::InvalidParameter(_))));
    }
}
