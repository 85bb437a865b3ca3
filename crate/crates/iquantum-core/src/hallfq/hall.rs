//! The (twisted) Hall algebra of an ıquiver algebra over F_q, its reduction
//! onto the classes `[Z ⊕ 𝔼^h]` of the localized algebra, and the reduced
//! algebra at a parameter.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use hashbrown::HashMap;
use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::algebra::{cocycle_combo, ext_data, extension, sub_quotient, submodules};
use super::catalog::{Catalog, ClassKey};
use crate::error::{CoreError, CoreResult};
use crate::scalars::{LaurentPoly, QuadNum, Rat};

/// Largest `q^{dim Ext¹}` enumerated for a single product.
pub const DEFAULT_EXT_CAP: u64 = 1 << 16;

/// Finite combination of isomorphism classes with coefficients in ℚ(√q).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HallElem {
    pub q: u32,
    pub terms: BTreeMap<ClassKey, QuadNum>,
}

impl HallElem {
    pub fn zero(q: u32) -> Self {
        HallElem { q, terms: BTreeMap::new() }
    }

    pub fn class(q: u32, key: ClassKey) -> Self {
        let mut e = Self::zero(q);
        e.terms.insert(key, QuadNum::one(q));
        e
    }

    pub fn one(q: u32) -> Self {
        Self::class(q, Vec::new())
    }

    pub fn add_term(&mut self, key: ClassKey, c: QuadNum) {
        let e = self.terms.entry(key.clone()).or_insert_with(|| QuadNum::zero(c.q));
        *e = e.add(&c);
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&QuadNum::from_int(-1, self.q)))
    }

    pub fn scale(&self, c: &QuadNum) -> Self {
        let mut out = Self::zero(self.q);
        for (k, x) in &self.terms {
            out.add_term(k.clone(), x.mul(c));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &[u16]) -> QuadNum {
        self.terms.get(key).cloned().unwrap_or_else(|| QuadNum::zero(self.q))
    }
}

fn rat_of(b: &BigInt) -> Rat {
    Rat::from_integer(b.clone())
}

/// `(√q)^k` helper.
pub fn sqrtq(q: u32, k: i32) -> QuadNum {
    QuadNum::sqrtq_pow(q, k)
}

/// How structure constants of `[M]⋄[N]` are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HallMethod {
    /// Enumerate `Ext¹(M, N)` and identify each middle term.
    Extensions,
    /// Count filtrations `N ⊆ L` and convert with automorphism orders.
    Filtrations,
}

/// Hall multiplication over a fixed catalog.
pub struct Hall<'a> {
    pub cat: &'a Catalog,
    pub ext_cap: u64,
    pub method: HallMethod,
    cache: RefCell<HashMap<(ClassKey, ClassKey), Vec<(ClassKey, Rat)>>>,
}

impl<'a> Hall<'a> {
    pub fn new(cat: &'a Catalog) -> Self {
        Self::with_method(cat, HallMethod::Extensions)
    }

    pub fn with_method(cat: &'a Catalog, method: HallMethod) -> Self {
        Hall { cat, ext_cap: DEFAULT_EXT_CAP, method, cache: RefCell::new(HashMap::new()) }
    }

    /// Structure constants of `[M]⋄[N]` by the configured method.
    pub fn structure(&self, m: &[u16], n: &[u16]) -> CoreResult<Vec<(ClassKey, Rat)>> {
        match self.method {
            HallMethod::Extensions => self.untwisted_classes(m, n),
            HallMethod::Filtrations => {
                let ck = (m.to_vec(), n.to_vec());
                if let Some(v) = self.cache.borrow().get(&ck) {
                    return Ok(v.clone());
                }
                let v = self.untwisted_by_submodules(m, n)?;
                self.cache.borrow_mut().insert(ck, v.clone());
                Ok(v)
            }
        }
    }

    pub fn q(&self) -> u32 {
        self.cat.q()
    }

    pub fn simple(&self, i: usize) -> CoreResult<HallElem> {
        let s = super::algebra::FqRep::simple(&self.cat.alg, i);
        Ok(HallElem::class(self.q(), self.cat.identify(&s)?))
    }

    pub fn e(&self, i: usize) -> HallElem {
        HallElem::class(self.q(), vec![self.cat.e_id(i)])
    }

    fn dimvec(&self, key: &[u16]) -> Vec<i32> {
        self.cat.dims_of(key).iter().map(|&d| d as i32).collect()
    }

    /// `⟨dim M, dim N⟩_Q`.
    pub fn twist(&self, m: &[u16], n: &[u16]) -> i32 {
        self.cat.alg.quiver.euler(&self.dimvec(m), &self.dimvec(n))
    }

    /// `[M]⋄[N] = Σ_L |Ext¹(M,N)_L| / |Hom(M,N)| [L]` (N is the submodule).
    pub fn untwisted_classes(&self, m: &[u16], n: &[u16]) -> CoreResult<Vec<(ClassKey, Rat)>> {
        let ck = (m.to_vec(), n.to_vec());
        let cached = self.method == HallMethod::Extensions;
        if cached {
            if let Some(v) = self.cache.borrow().get(&ck) {
                return Ok(v.clone());
            }
        }
        let cat = self.cat;
        let (f, a) = (&cat.f, &cat.alg);
        let (mr, nr) = (cat.rep_of(m), cat.rep_of(n));
        let ext = ext_data(f, a, &mr, &nr);
        let e = ext.basis.len();
        let total = (f.q as u64).checked_pow(e as u32).unwrap_or(u64::MAX);
        if total > self.ext_cap {
            return Err(CoreError::SizeCapExceeded(format!("|Ext¹| = q^{} exceeds the product cap", e)));
        }
        let mut counts: BTreeMap<ClassKey, u64> = BTreeMap::new();
        let direct = Catalog::merge(m, n);
        *counts.entry(direct).or_default() += 1;
        let mut coeffs = vec![0u8; e];
        for mut t in 1..total {
            for c in coeffs.iter_mut() {
                *c = (t % f.q as u64) as u8;
                t /= f.q as u64;
            }
            let c = cocycle_combo(f, &ext.basis, &coeffs);
            let l = extension(&mr, &nr, &c);
            *counts.entry(cat.identify(&l)?).or_default() += 1;
        }
        let hom = rat_of(&BigInt::from(f.q).pow(ext.hom_dim as u32));
        let out: Vec<(ClassKey, Rat)> =
            counts.into_iter().map(|(k, c)| (k, Rat::from_integer(BigInt::from(c)) / &hom)).collect();
        if cached {
            self.cache.borrow_mut().insert(ck, out.clone());
        }
        Ok(out)
    }

    /// Same structure constants from filtrations:
    /// `Σ_L g^L_{MN} |Aut M||Aut N| / |Aut L| [L]`.
    pub fn untwisted_by_submodules(&self, m: &[u16], n: &[u16]) -> CoreResult<Vec<(ClassKey, Rat)>> {
        let cat = self.cat;
        let (f, a) = (&cat.f, &cat.alg);
        let mut dims = cat.dims_of(m);
        for (x, y) in dims.iter_mut().zip(cat.dims_of(n)) {
            *x += y;
        }
        let nd = cat.dims_of(n);
        let am = rat_of(&cat.aut_order(m));
        let an = rat_of(&cat.aut_order(n));
        let mut out = Vec::new();
        for l in cat.classes_with_dims(&dims) {
            let lr = cat.rep_of(&l);
            let mut g = 0u64;
            for u in submodules(f, a, &lr, &nd) {
                let (s, qt) = sub_quotient(f, a, &lr, &u);
                if cat.identify(&s)? == n && cat.identify(&qt)? == m {
                    g += 1;
                }
            }
            if g > 0 {
                let al = rat_of(&cat.aut_order(&l));
                out.push((l, Rat::from_integer(BigInt::from(g)) * &am * &an / al));
            }
        }
        Ok(out)
    }

    pub fn mul_untwisted(&self, x: &HallElem, y: &HallElem) -> CoreResult<HallElem> {
        self.mul_impl(x, y, false)
    }

    /// `[M]*[N] = 𝐯^{⟨M,N⟩_Q} [M]⋄[N]`.
    pub fn mul(&self, x: &HallElem, y: &HallElem) -> CoreResult<HallElem> {
        self.mul_impl(x, y, true)
    }

    fn mul_impl(&self, x: &HallElem, y: &HallElem, twisted: bool) -> CoreResult<HallElem> {
        let q = self.q();
        let mut out = HallElem::zero(q);
        for (m, cm) in &x.terms {
            for (n, cn) in &y.terms {
                let mut c = cm.mul(cn);
                if twisted {
                    c = c.mul(&sqrtq(q, self.twist(m, n)));
                }
                for (l, r) in self.structure(m, n)? {
                    out.add_term(l, c.scale(&r));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_all(&self, xs: &[HallElem]) -> CoreResult<HallElem> {
        let mut acc = HallElem::one(self.q());
        for x in xs {
            acc = self.mul(&acc, x)?;
        }
        Ok(acc)
    }

    /// Projection onto the classes `[Z ⊕ 𝔼^h]` of the localized algebra.
    pub fn reduce(&self, x: &HallElem) -> CoreResult<HallElem> {
        let mut out = HallElem::zero(self.q());
        for (k, c) in &x.terms {
            out.add_term(self.cat.canonical(k)?, c.clone());
        }
        Ok(out)
    }

    /// Product in the localized algebra.
    pub fn mh_mul(&self, x: &HallElem, y: &HallElem) -> CoreResult<HallElem> {
        self.reduce(&self.mul(x, y)?)
    }

    /// `[A ⊕ K] = q^{⟨A,K⟩} 𝐯^{−⟨A,K⟩_Q} [A]*[K]` for `K ∈ P^{<∞}`: the factor
    /// turning `[Z ⊕ 𝔼^h]` into `[Z] * Π[𝔼_i]^{h_i}`.
    pub fn canonical_factor(&self, z: &[u16], h: &[u32]) -> QuadNum {
        let q = self.q();
        let mut a = z.to_vec();
        let mut c = QuadNum::one(q);
        for (i, &hi) in h.iter().enumerate() {
            let e = vec![self.cat.e_id(i)];
            for _ in 0..hi {
                let (hom, ext) = self.cat.hom_ext_dims(&a, &e);
                let euler = hom as i32 - ext as i32;
                c = c.mul(&sqrtq(q, 2 * euler - self.twist(&a, &e)));
                a = Catalog::merge(&a, &e);
            }
        }
        c
    }

    /// Image in the reduced algebra at parameters `sigma` (indexed by node,
    /// `σ_i = σ_{τi}`): fixed `[𝔼_i] = −qσ_i`, and `[𝔼_{τi}] = σ_i²[𝔼_i]^{-1}`
    /// for a representative `i` of a pair.
    pub fn to_reduced(&self, x: &HallElem, sigma: &[QuadNum]) -> CoreResult<ReducedElem> {
        let q = self.q();
        let quiver = &self.cat.alg.quiver;
        let red = self.reduce(x)?;
        let mut out = ReducedElem::zero(q);
        for (k, c) in &red.terms {
            let (z, h) = self.cat.split_canonical(k);
            let mut coeff = c.mul(&self.canonical_factor(&z, &h));
            let mut exps = vec![0i32; quiver.n];
            for i in 0..quiver.n {
                let hi = h[i] as i32;
                if hi == 0 {
                    continue;
                }
                if quiver.fixed(i) {
                    let val = QuadNum::from_int(-(q as i64), q).mul(&sigma[i]);
                    coeff = coeff.mul(&val.pow(hi).unwrap());
                } else if quiver.is_rep(i) {
                    exps[i] += hi;
                } else {
                    let r = quiver.tau[i];
                    exps[r] -= hi;
                    coeff = coeff.mul(&sigma[r].pow(2 * hi).unwrap());
                }
            }
            out.add_term((z, exps), coeff);
        }
        Ok(out)
    }
}

/// Element of the reduced algebra: `Σ c [Z] Π[𝔼_i]^{e_i}` over kQ classes `Z`
/// and pair representatives `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedElem {
    pub q: u32,
    pub terms: BTreeMap<(ClassKey, Vec<i32>), QuadNum>,
}

impl ReducedElem {
    pub fn zero(q: u32) -> Self {
        ReducedElem { q, terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, key: (ClassKey, Vec<i32>), c: QuadNum) {
        let e = self.terms.entry(key.clone()).or_insert_with(|| QuadNum::zero(c.q));
        *e = e.add(&c);
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &QuadNum) -> Self {
        let mut out = Self::zero(self.q);
        for (k, x) in &self.terms {
            out.add_term(k.clone(), x.mul(c));
        }
        out
    }

    /// Multiply by `Π [𝔼_i]^{e_i}` (central).
    pub fn shift(&self, e: &[i32]) -> Self {
        let mut out = Self::zero(self.q);
        for ((z, x), c) in &self.terms {
            let y: Vec<i32> = x.iter().zip(e).map(|(a, b)| a + b).collect();
            out.add_term((z.clone(), y), c.clone());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Interpolation in q

/// Recover `Σ a_k 𝐯^k` from values at several primes, assuming the value at
/// `q` is `A(q) + B(q)√q` with `A, B` Laurent polynomials in `q` supported on
/// `lo..=hi`. One sample beyond the number of unknowns is held out as a check.
pub fn interpolate(samples: &[QuadNum], lo: i32, hi: i32) -> CoreResult<LaurentPoly> {
    let k = (hi - lo + 1) as usize;
    if samples.len() < k + 1 {
        return Err(CoreError::InsufficientSamples);
    }
    let solve = |pick: &dyn Fn(&QuadNum) -> Rat| -> CoreResult<Vec<Rat>> {
        let rows: Vec<Vec<Rat>> = samples[..k]
            .iter()
            .map(|s| (lo..=hi).map(|e| rat_pow(s.q, e)).collect())
            .collect();
        let rhs: Vec<Rat> = samples[..k].iter().map(pick).collect();
        solve_rat(rows, rhs)
    };
    let a = solve(&|s: &QuadNum| s.a.clone())?;
    let b = solve(&|s: &QuadNum| s.b.clone())?;
    // v = u², 𝐯^m = q^{m/2}.
    let mut terms = Vec::new();
    for (j, e) in (lo..=hi).enumerate() {
        terms.push((4 * e, a[j].clone()));
        terms.push((4 * e + 2, b[j].clone()));
    }
    let p = LaurentPoly::from_terms(terms);
    for s in &samples[k..] {
        let mut got = QuadNum::zero(s.q);
        for (j, e) in (lo..=hi).enumerate() {
            got = got.add(&QuadNum::from_rat(a[j].clone() * rat_pow(s.q, e), s.q));
            got = got.add(&sqrtq(s.q, 1).scale(&(b[j].clone() * rat_pow(s.q, e))));
        }
        if &got != s {
            return Err(CoreError::Other("held-out sample disagrees with the interpolant".into()));
        }
    }
    Ok(p)
}

/// Coefficient of `[λ]` in `[μ]*[ν]` (or `[μ]⋄[ν]`) as a Laurent polynomial
/// in 𝐯, interpolated from one catalog per prime. Labels are catalog names.
pub fn hall_generic_coefficient(
    alg: &super::algebra::BoundAlgebra,
    mu: &str,
    nu: &str,
    lambda: &str,
    opts: &super::catalog::CatalogOptions,
    primes: &[u32],
    window: (i32, i32),
    twisted: bool,
) -> CoreResult<LaurentPoly> {
    let mut samples = Vec::new();
    let mut sig = None;
    for &q in primes {
        let cat = Catalog::build(alg, q, opts.clone())?;
        let (m, n, l) = (cat.parse_class(mu)?, cat.parse_class(nu)?, cat.parse_class(lambda)?);
        let s = (cat.class_signature(&m), cat.class_signature(&n), cat.class_signature(&l));
        match &sig {
            None => sig = Some(s),
            Some(prev) if *prev != s => {
                return Err(CoreError::Other("class labels denote different modules at different primes".into()))
            }
            _ => {}
        }
        let h = Hall::new(&cat);
        let (x, y) = (HallElem::class(q, m), HallElem::class(q, n));
        let p = if twisted { h.mul(&x, &y)? } else { h.mul_untwisted(&x, &y)? };
        samples.push(p.coeff(&l));
    }
    interpolate(&samples, window.0, window.1)
}

fn rat_pow(q: u32, e: i32) -> Rat {
    let base = Rat::from_integer(BigInt::from(q));
    if e >= 0 {
        num_traits::pow(base, e as usize)
    } else {
        num_traits::pow(base.recip(), (-e) as usize)
    }
}

fn solve_rat(mut a: Vec<Vec<Rat>>, mut b: Vec<Rat>) -> CoreResult<Vec<Rat>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero()).ok_or(CoreError::Unsolvable)?;
        a.swap(c, p);
        b.swap(c, p);
        let inv = Rat::one() / &a[c][c];
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = &a[r][c] * &inv;
                for k in c..n {
                    let t = &f * &a[c][k];
                    a[r][k] -= t;
                }
                let t = &f * &b[c];
                b[r] -= t;
            }
        }
    }
    Ok((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hallfq::algebra::build_bound_algebra;
    use crate::hallfq::catalog::CatalogOptions;
    use crate::rootdata::{build, DiagramKind, DiagramSpec};

    fn cat(spec: DiagramSpec, q: u32, d: usize) -> Catalog {
        let a = build_bound_algebra(&build(&spec).unwrap(), 3).unwrap();
        Catalog::build(&a, q, CatalogOptions { max_dim: d, empty_levels: 1 }).unwrap()
    }

    #[test]
    fn unit_and_simple_squares_a1() {
        let c = cat(DiagramSpec::split(DiagramKind::A, 1), 3, 4);
        let h = Hall::new(&c);
        let s = h.simple(0).unwrap();
        assert_eq!(h.mul(&s, &HallElem::one(3)).unwrap(), s);
        // [S]⋄[S] = [S⊕S]/q^... : Ext¹(S,S) = F_q (ε), Hom = F_q.
        let p = h.mul_untwisted(&s, &s).unwrap();
        let ss = Catalog::merge(&s.terms.keys().next().unwrap().clone(), &s.terms.keys().next().unwrap().clone());
        let third = Rat::new(BigInt::from(1), BigInt::from(3));
        assert_eq!(p.coeff(&ss), QuadNum::from_rat(third.clone(), 3));
        assert_eq!(p.coeff(&[c.e_id(0)]), QuadNum::from_rat(Rat::from_integer(BigInt::from(2)) * third, 3));
    }

    #[test]
    fn riedtmann_agrees_with_filtrations() {
        let c = cat(DiagramSpec::split(DiagramKind::A, 2), 2, 4);
        let h = Hall::new(&c);
        let classes: Vec<ClassKey> = (1..=2)
            .flat_map(|d| {
                let mut out = Vec::new();
                for a in 0..=d {
                    out.extend(c.classes_with_dims(&[a, d - a]));
                }
                out
            })
            .collect();
        for m in &classes {
            for n in &classes {
                let x = h.untwisted_classes(m, n).unwrap();
                let y = h.untwisted_by_submodules(m, n).unwrap();
                assert_eq!(x, y, "{} * {}", c.class_name(m), c.class_name(n));
            }
        }
    }

    #[test]
    fn associativity_a2() {
        let c = cat(DiagramSpec::split(DiagramKind::A, 2), 2, 4);
        let h = Hall::new(&c);
        let xs: Vec<HallElem> =
            (0..c.len() as u16).filter(|&k| c.indecs[k as usize].rep.total() <= 2).map(|k| HallElem::class(2, vec![k])).collect();
        for x in &xs {
            for y in &xs {
                let l = h.mul(&h.mul(x, y).unwrap(), &xs[0]).unwrap();
                let r = h.mul(x, &h.mul(y, &xs[0]).unwrap()).unwrap();
                assert_eq!(l, r);
            }
        }
    }

    #[test]
    fn generalized_simples_are_central_in_mh() {
        let c = cat(DiagramSpec::split(DiagramKind::A, 2), 3, 5);
        let h = Hall::new(&c);
        for i in 0..2 {
            let e = h.e(i);
            for k in 0..c.len() as u16 {
                if c.indecs[k as usize].rep.total() > 2 {
                    continue;
                }
                let x = HallElem::class(3, vec![k]);
                assert_eq!(h.mh_mul(&e, &x).unwrap(), h.mh_mul(&x, &e).unwrap());
            }
        }
    }

    #[test]
    fn interpolates_q_minus_one() {
        let samples: Vec<QuadNum> = [2u32, 3, 5, 7].iter().map(|&q| QuadNum::from_int(q as i64 - 1, q)).collect();
        let p = interpolate(&samples, -1, 1).unwrap();
        // 𝐯² − 1 with 𝐯 = u².
        let want = LaurentPoly::v_pow(2).sub(&LaurentPoly::one());
        assert_eq!(p, want);
    }

    #[test]
    fn filtration_method_matches_extensions() {
        let c = cat(DiagramSpec::split(DiagramKind::A, 2), 2, 4);
        let (he, hf) = (Hall::new(&c), Hall::with_method(&c, HallMethod::Filtrations));
        let xs: Vec<HallElem> = (0..2).map(|i| he.simple(i).unwrap()).chain((0..2).map(|i| he.e(i))).collect();
        for x in &xs {
            for y in &xs {
                assert_eq!(he.mul(x, y).unwrap(), hf.mul(x, y).unwrap());
            }
        }
    }

    #[test]
    fn generic_coefficients_a2() {
        let quiver = build(&DiagramSpec::split(DiagramKind::A, 2)).unwrap();
        let a = build_bound_algebra(&quiver, 3).unwrap();
        let (i, j) = quiver.arrows[0];
        let c = Catalog::build(&a, 2, CatalogOptions { max_dim: 4, empty_levels: 1 }).unwrap();
        let h = Hall::new(&c);
        let (si, sj) = (h.simple(i).unwrap(), h.simple(j).unwrap());
        let name = |x: &HallElem| c.class_name(x.terms.keys().next().unwrap());
        let x = h.mul_untwisted(&si, &sj).unwrap();
        let ext = x.terms.keys().find(|k| k.len() == 1).unwrap().clone();
        let opts = CatalogOptions { max_dim: 4, empty_levels: 1 };
        // [S_i]⋄[S_j] has [X_ij] with coefficient q − 1 = 𝐯² − 1.
        let p = hall_generic_coefficient(&a, &name(&si), &name(&sj), &c.class_name(&ext), &opts, &[2, 3, 5, 7], (0, 1), false)
            .unwrap();
        assert_eq!(p, LaurentPoly::v_pow(2).sub(&LaurentPoly::one()));
        // Twisting by ⟨e_i, e_j⟩_Q = −1 makes it 𝐯 − 𝐯^{-1}.
        let p = hall_generic_coefficient(&a, &name(&si), &name(&sj), &c.class_name(&ext), &opts, &[2, 3, 5, 7], (-1, 1), true)
            .unwrap();
        assert_eq!(p, LaurentPoly::v_pow(1).sub(&LaurentPoly::v_pow(-1)));
    }
}
