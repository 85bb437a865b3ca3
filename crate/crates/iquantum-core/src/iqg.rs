//! The ıquantum group: generators `B_i` and Cartan units, their embedding in
//! the ambient algebra, braid operators at universal and parameter level,
//! q-root vectors and PBW checks.
//!
//! Relations among the `B_i` are not typed in; they are recovered as the
//! kernel of the embedding on short words and then completed. Every identity
//! that matters is decided after embedding, so an incomplete relation set can
//! only cost speed, never correctness.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::error::{CoreError, CoreResult};
use crate::freealg::{
    complete, linear_solve_fast, Alphabet, Coords, Echelon, Letter, Mono, NCPoly, Reducer, RewriteSystem, Units,
    Word,
};
use crate::iseq::IAdmissibleSeq;
use crate::qgroup::{distinguished_parameter, AmbientAlgebra, AmbientKind};
use crate::rootdata::{IQuiver, Root};
use crate::freealg::Mark;
use crate::scalars::{sqrt_unit, FieldElem, Fp, FpA, Scalar};

pub type Poly = NCPoly<FieldElem>;

/// Which algebra the generators live in.
#[derive(Clone, Debug, PartialEq)]
pub enum Level {
    /// Ũ^ı with units `k̃_i` for every node.
    Universal,
    /// U^ı_ς with units `k_j` for non-fixed representatives.
    Parameter(Vec<FieldElem>),
}

impl Level {
    pub fn name(&self) -> &'static str {
        match self {
            Level::Universal => "universal",
            Level::Parameter(_) => "parameter",
        }
    }
}

/// A generator of the ıquantum group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gen {
    B(usize),
    /// Unit generator by unit index.
    Unit(usize),
}

/// Images of the generators under an algebra map.
#[derive(Clone, Debug)]
pub struct GenTable {
    pub letters: Vec<Poly>,
    /// Unit images are scalar multiples of unit monomials.
    pub units: Vec<(FieldElem, Units)>,
}

/// Homomorphism from the free algebra on the ıquantum-group alphabet,
/// memoized along word prefixes and reducing with `red` after each step.
pub struct Applier<'a, S> {
    red: Reducer<'a, S>,
    letters: Vec<NCPoly<S>>,
    units: Vec<(S, Units)>,
    memo: HashMap<Word, Rc<NCPoly<S>>>,
}

impl<'a, S: Scalar> Applier<'a, S> {
    pub fn new(rs: &'a RewriteSystem<S>, letters: Vec<NCPoly<S>>, units: Vec<(S, Units)>) -> Self {
        Applier { red: rs.reducer(), letters, units, memo: HashMap::new() }
    }

    fn word(&mut self, w: &[Letter]) -> CoreResult<Rc<NCPoly<S>>> {
        if let Some(r) = self.memo.get(w) {
            return Ok(r.clone());
        }
        let res = if w.is_empty() {
            NCPoly::one()
        } else {
            let head = self.word(&w[..w.len() - 1])?;
            let x = self.letters[w[w.len() - 1] as usize].clone();
            self.red.mul(&head, &x)?
        };
        let res = Rc::new(res);
        self.memo.insert(Word::from_slice(w), res.clone());
        Ok(res)
    }

    fn units_image(&self, h: &Units) -> (S, Units) {
        let mut c = S::one();
        let mut out = Units::zero();
        for (k, &e) in h.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let (s, u) = &self.units[k];
            let se = if e > 0 { pow(s, e as u32) } else { pow(&s.inv().expect("unit"), (-e) as u32) };
            c = c.mul(&se);
            out = out.add(&u.scale(e));
        }
        (c, out)
    }

    pub fn apply(&mut self, x: &NCPoly<S>) -> CoreResult<NCPoly<S>> {
        let mut out = NCPoly::zero();
        for (m, c) in x.iter() {
            let img = self.word(&m.w)?;
            let (s, u) = self.units_image(&m.h);
            let cc = c.mul(&s);
            for (m2, c2) in img.iter() {
                out.add_term(Mono { w: m2.w.clone(), h: m2.h.add(&u) }, c2.mul(&cc));
            }
        }
        Ok(out)
    }

    pub fn reducer(&mut self) -> &mut Reducer<'a, S> {
        &mut self.red
    }
}

fn pow<S: Scalar>(s: &S, e: u32) -> S {
    let mut r = S::one();
    for _ in 0..e {
        r = r.mul(s);
    }
    r
}

/// Report for one generator in a braid check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenCheck {
    pub gen: String,
    pub lhs_nf_hash: u64,
    pub rhs_nf_hash: u64,
    pub equal: bool,
    pub cap: usize,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BraidReport {
    pub i: usize,
    pub j: usize,
    pub m: u32,
    pub per_generator: Vec<GenCheck>,
}

impl BraidReport {
    pub fn passed(&self) -> bool {
        self.per_generator.iter().all(|g| g.equal)
    }
}

pub struct IQuantumGroup {
    pub quiver: IQuiver,
    pub level: Level,
    /// Universal ambient, or the reduced one at the level's parameter.
    pub ambient: AmbientAlgebra,
    /// Rewriting system of the ıquantum group itself (not strict).
    pub rs: RewriteSystem<FieldElem>,
    /// Relations found as the kernel of the embedding.
    pub relations: Vec<Poly>,
    /// Node of each unit generator.
    pub unit_nodes: Vec<usize>,
    /// Generator images in the ambient algebra.
    pub embedding: GenTable,
    forward: Vec<Option<GenTable>>,
    inverse: Vec<Option<GenTable>>,
    rs_fp: Option<RewriteSystem<FpA>>,
    ambient_fp: Option<RewriteSystem<FpA>>,
}

/// Options for building the ıquantum group.
#[derive(Clone, Debug)]
pub struct BuildOptions {
    pub cap: usize,
    /// Completion cap for the ıquantum-group relations.
    pub icap: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { cap: crate::qgroup::DEFAULT_CAP, icap: 8 }
    }
}

impl IQuantumGroup {
    pub fn new(q: &IQuiver, level: Level, opts: &BuildOptions) -> CoreResult<Self> {
        let ambient = match &level {
            Level::Universal => AmbientAlgebra::build(q, AmbientKind::Universal, opts.cap)?,
            Level::Parameter(vs) => AmbientAlgebra::build(q, AmbientKind::Reduced(vs.clone()), opts.cap)?,
        };
        Self::with_ambient(q, level, ambient, opts)
    }

    /// Universal generators mapped into a given ambient algebra (which may be
    /// a central reduction).
    pub fn with_ambient(q: &IQuiver, level: Level, ambient: AmbientAlgebra, opts: &BuildOptions) -> CoreResult<Self> {
        let n = q.n;
        let unit_nodes: Vec<usize> = match level {
            Level::Universal => (0..n).collect(),
            Level::Parameter(_) => q.reps.iter().copied().filter(|&j| !q.fixed(j)).collect(),
        };
        let letters: Vec<String> = (0..n).map(|i| format!("B{}", q.label(i))).collect();
        let weights: Vec<Vec<i32>> = (0..n)
            .map(|i| {
                let mut w = vec![0; n];
                w[i] = -1;
                w
            })
            .collect();
        let units: Vec<String> = unit_nodes
            .iter()
            .map(|&l| match level {
                Level::Universal => format!("kt{}", q.label(l)),
                Level::Parameter(_) => format!("k{}", q.label(l)),
            })
            .collect();
        let table: Vec<Vec<i32>> =
            unit_nodes.iter().map(|&l| (0..n).map(|j| 2 * (q.c(q.tau[l], j) - q.c(l, j))).collect()).collect();
        let alpha = Alphabet::new(letters, weights, units, vec![vec![0; n]; unit_nodes.len()], &table);

        // Embedding.
        let mut emb_letters = Vec::new();
        for i in 0..n {
            emb_letters.push(ambient.f(i).add(&ambient.mul(&ambient.e(q.tau[i]), &ambient.ktp(i))));
        }
        let mut emb_units = Vec::new();
        for &l in &unit_nodes {
            let p = match level {
                Level::Universal => ambient.mul(&ambient.kt(l), &ambient.ktp(q.tau[l])),
                Level::Parameter(_) => ambient.mul(&ambient.kt(l), &ambient.kt_pow(q.tau[l], -1)),
            };
            let (m, c) = p.iter().next().map(|(m, c)| (m.clone(), c.clone())).unwrap_or((Mono::one(), FieldElem::zero()));
            emb_units.push((c, m.h));
        }
        let embedding = GenTable { letters: emb_letters, units: emb_units };

        let relations = derive_relations(q, &alpha, &ambient, &embedding)?;
        // Relations among Cartan monomials (present after a central reduction)
        // cannot be oriented; they are kept for reporting only.
        let orientable: Vec<Poly> = relations
            .iter()
            .filter(|r| {
                let lw = &r.leading().unwrap().0.w;
                r.iter().filter(|(m, _)| &m.w == lw).count() == 1
            })
            .cloned()
            .collect();
        let mut rs = complete(alpha, orientable, opts.icap)?;
        rs.strict = false;
        let rs_fp = rs.map_coeffs(|c| c.to_fp::<{ FpA::MARK }>());
        let ambient_fp = ambient.rs.map_coeffs(|c| c.to_fp::<{ FpA::MARK }>());
        let nops = n;
        Ok(IQuantumGroup {
            quiver: q.clone(),
            level,
            ambient,
            rs,
            relations,
            unit_nodes,
            embedding,
            forward: vec![None; nops],
            inverse: vec![None; nops],
            rs_fp,
            ambient_fp,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.rs.alpha
    }

    pub fn n(&self) -> usize {
        self.quiver.n
    }

    pub fn num_units(&self) -> usize {
        self.unit_nodes.len()
    }

    pub fn gens(&self) -> Vec<Gen> {
        let mut g: Vec<Gen> = (0..self.n()).map(Gen::B).collect();
        g.extend((0..self.num_units()).map(Gen::Unit));
        g
    }

    pub fn gen_name(&self, g: Gen) -> String {
        match g {
            Gen::B(i) => self.alphabet().letters[i].clone(),
            Gen::Unit(k) => self.alphabet().units[k].clone(),
        }
    }

    pub fn gen_poly(&self, g: Gen) -> Poly {
        match g {
            Gen::B(i) => NCPoly::letter(i as Letter),
            Gen::Unit(k) => NCPoly::units(Units::single(k, 1)),
        }
    }

    pub fn b(&self, i: usize) -> Poly {
        NCPoly::letter(i as Letter)
    }

    pub fn unit_of_node(&self, l: usize) -> Option<usize> {
        self.unit_nodes.iter().position(|&x| x == l)
    }

    /// Free product in the ıquantum-group alphabet.
    pub fn mul(&self, x: &Poly, y: &Poly) -> Poly {
        self.rs.alpha.mul(x, y)
    }

    /// `[x, y]_s = xy − s·yx`.
    pub fn bracket(&self, x: &Poly, y: &Poly, s: &FieldElem) -> Poly {
        crate::freealg::v_comm(&self.rs.alpha, x, y, s)
    }

    pub fn nf(&self, x: &Poly) -> CoreResult<Poly> {
        self.rs.reducer().normal_form(x)
    }

    pub fn embedder(&self) -> Applier<'_, FieldElem> {
        Applier::new(&self.ambient.rs, self.embedding.letters.clone(), self.embedding.units.clone())
    }

    /// Embedding over a prime shadow of the ambient.
    pub fn embedder_fp<'a, const A: u64>(
        &self,
        rs: &'a RewriteSystem<Fp<A>>,
    ) -> Option<Applier<'a, Fp<A>>> {
        let letters = self.embedding.letters.iter().map(|p| p.to_fp::<A>()).collect::<Option<Vec<_>>>()?;
        let units = self
            .embedding
            .units
            .iter()
            .map(|(c, u)| Some((c.to_fp::<A>()?, *u)))
            .collect::<Option<Vec<_>>>()?;
        Some(Applier::new(rs, letters, units))
    }

    pub fn embed(&self, x: &Poly) -> CoreResult<Poly> {
        self.embedder().apply(x)
    }

    /// Equality decided in the ambient algebra.
    pub fn equal(&self, x: &Poly, y: &Poly) -> CoreResult<bool> {
        Ok(self.embed(&x.sub(y))?.is_zero())
    }

    /// Representative of the quotient weight of a raw weight vector.
    pub fn qweight(&self, raw: &[i32]) -> Vec<i32> {
        qweight(&self.quiver, raw)
    }

    pub fn mono_qweight(&self, m: &Mono) -> Vec<i32> {
        self.qweight(&self.alphabet().weight(m))
    }

    // -----------------------------------------------------------------------
    // Braid operators

    /// Parameter of node `i` at parameter level.
    fn param(&self, i: usize) -> Option<&FieldElem> {
        match &self.level {
            Level::Universal => None,
            Level::Parameter(vs) => Some(&vs[i]),
        }
    }

    /// Image of the unit monomial `k̃_α` (universal) or `k_α` (parameter).
    fn cartan_image(&self, alpha: &[i32]) -> (FieldElem, Units) {
        let q = &self.quiver;
        let mut h = Units::zero();
        match self.level {
            Level::Universal => {
                for (l, &d) in alpha.iter().enumerate() {
                    h = h.add(&Units::single(l, d as i16));
                }
                (FieldElem::one(), h)
            }
            Level::Parameter(_) => {
                for (l, &d) in alpha.iter().enumerate() {
                    if d == 0 || q.fixed(l) {
                        continue;
                    }
                    let (node, sign) = if q.is_rep(l) { (l, 1) } else { (q.tau[l], -1) };
                    let k = self.unit_of_node(node).expect("unit for non-fixed representative");
                    h = h.add(&Units::single(k, (sign * d) as i16));
                }
                (FieldElem::one(), h)
            }
        }
    }

    /// `b_α = Π b_l^{d_l}` with `b_l = −v²` at fixed nodes.
    fn b_alpha(&self, alpha: &[i32]) -> FieldElem {
        let mut r = FieldElem::one();
        for (l, &d) in alpha.iter().enumerate() {
            if self.quiver.fixed(l) && d != 0 {
                r = r.mul(&FieldElem::v_pow(2).neg().pow(d).unwrap());
            }
        }
        r
    }

    /// Generator-image table of `T_i` (i a representative).
    pub fn braid_table(&self, i: usize) -> CoreResult<GenTable> {
        let q = &self.quiver;
        if !q.is_rep(i) {
            return Err(CoreError::Other(format!("T_{} is not defined: not a representative", q.label(i))));
        }
        let ti = q.tau[i];
        let v = FieldElem::v();
        let vinv = FieldElem::v_pow(-1);
        let bi = self.b(i);
        let mut letters = Vec::new();
        for j in 0..q.n {
            let bj = self.b(j);
            let img = if ti == i {
                if j == i {
                    match self.param(i) {
                        None => {
                            // (−v² k̃_i)^{-1} B_i
                            let k = self.unit_of_node(i).unwrap();
                            NCPoly::term(Mono::units(Units::single(k, -1)), FieldElem::v_pow(-2).neg())
                                .pipe(|u| self.mul(&u, &bi))
                        }
                        Some(_) => bi.clone(),
                    }
                } else if q.c(i, j) == -1 {
                    let mut p = self.bracket(&bj, &bi, &v);
                    if let Some(s) = self.param(i) {
                        let r = sqrt_unit(&FieldElem::v_pow(2).neg().mul(s))?;
                        p = p.scale(&r.inv()?);
                    }
                    p
                } else {
                    bj
                }
            } else {
                let bti = self.b(ti);
                let (cij, ctj) = (q.c(i, j), q.c(ti, j));
                if j == i {
                    // −k̃_i^{-1} B_{τi}  /  −k_i^{-1} B_{τi}
                    let k = self.unit_of_node(i).unwrap();
                    let u = NCPoly::term(Mono::units(Units::single(k, -1)), FieldElem::one().neg());
                    self.mul(&u, &bti)
                } else if j == ti {
                    // −v² k̃_{τi}^{-1} B_i  /  −v² k_i B_i
                    let u = match self.level {
                        Level::Universal => Units::single(self.unit_of_node(ti).unwrap(), -1),
                        Level::Parameter(_) => Units::single(self.unit_of_node(i).unwrap(), 1),
                    };
                    self.mul(&NCPoly::term(Mono::units(u), FieldElem::v_pow(2).neg()), &bi)
                } else if cij == -1 && ctj == 0 {
                    let mut p = self.bracket(&bj, &bi, &v);
                    if let Some(s) = self.param(i) {
                        p = p.scale(&sqrt_unit(s)?.inv()?);
                    }
                    p
                } else if cij == 0 && ctj == -1 {
                    let mut p = self.bracket(&bti, &bj, &vinv);
                    if let Some(s) = self.param(ti) {
                        p = p.scale(&sqrt_unit(s)?.inv()?);
                    }
                    p
                } else if cij == -1 && ctj == -1 {
                    let inner = self.bracket(&self.bracket(&bj, &bi, &v), &bti, &v);
                    let coef = match self.param(i) {
                        None => vinv.neg(),
                        Some(s) => v.mul(s).inv()?.neg(),
                    };
                    let k = self.unit_of_node(i).unwrap();
                    inner.scale(&coef).add(&self.mul(&bj, &NCPoly::units(Units::single(k, 1))))
                } else {
                    bj
                }
            };
            letters.push(self.nf(&img)?);
        }
        let mut units = Vec::new();
        for &l in &self.unit_nodes {
            let a = q.simple_root(l);
            let sa = q.bs_apply(i, &a);
            let (c, h) = self.cartan_image(&sa);
            let c = match self.level {
                Level::Universal => c.mul(&self.b_alpha(&sa)).div(&self.b_alpha(&a))?,
                Level::Parameter(_) => c,
            };
            units.push((c, h));
        }
        Ok(GenTable { letters, units })
    }

    /// Build and cache `T_i` for all representatives.
    pub fn prepare_forward(&mut self) -> CoreResult<()> {
        for &i in &self.quiver.reps.clone() {
            if self.forward[i].is_none() {
                self.forward[i] = Some(self.braid_table(i)?);
            }
        }
        Ok(())
    }

    /// Build and cache `T_i` and, by ansatz, `T_i^{-1}` for all representatives.
    pub fn prepare_braid(&mut self, max_inv_degree: usize) -> CoreResult<()> {
        self.prepare_forward()?;
        for &i in &self.quiver.reps.clone() {
            if self.inverse[i].is_none() {
                self.inverse[i] = Some(self.inverse_table(i, max_inv_degree)?);
            }
        }
        Ok(())
    }

    pub fn forward_table(&self, i: usize) -> Option<&GenTable> {
        self.forward.get(i).and_then(|t| t.as_ref())
    }

    pub fn inverse_table_cached(&self, i: usize) -> Option<&GenTable> {
        self.inverse.get(i).and_then(|t| t.as_ref())
    }

    fn op(&self, i: usize, inv: bool) -> CoreResult<GenTable> {
        let cached = if inv { self.inverse_table_cached(i) } else { self.forward_table(i) };
        match cached {
            Some(t) => Ok(t.clone()),
            None if !inv => self.braid_table(i),
            None => self.inverse_table(i, 5),
        }
    }

    pub fn applier(&self, t: &GenTable) -> Applier<'_, FieldElem> {
        Applier::new(&self.rs, t.letters.clone(), t.units.clone())
    }

    /// `T_i(x)`.
    pub fn ti_apply(&self, i: usize, x: &Poly) -> CoreResult<Poly> {
        let t = self.op(i, false)?;
        self.applier(&t).apply(x)
    }

    /// `T_i^{-1}(x)`.
    pub fn ti_inverse_apply(&self, i: usize, x: &Poly) -> CoreResult<Poly> {
        let t = self.op(i, true)?;
        self.applier(&t).apply(x)
    }

    /// Apply `T_{w_1} T_{w_2} ⋯ T_{w_k}` (rightmost first).
    pub fn apply_word(&self, word: &[usize], x: &Poly, inverse: bool) -> CoreResult<Poly> {
        let mut cur = x.clone();
        for &i in word.iter().rev() {
            let t = self.op(i, inverse)?;
            cur = self.applier(&t).apply(&cur)?;
        }
        Ok(cur)
    }

    /// Normal words (w.r.t. the ıquantum-group rules) of length ≤ d and the
    /// given quotient weight.
    pub fn normal_words(&self, qw: &[i32], d: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut stack: Vec<Word> = vec![Word::new()];
        while let Some(w) = stack.pop() {
            if self.mono_qweight(&Mono { w: w.clone(), h: Units::zero() }) == qw {
                out.push(w.clone());
            }
            if w.len() == d {
                continue;
            }
            for x in 0..self.n() as Letter {
                let mut w2 = w.clone();
                w2.push(x);
                if !self.rs.is_reducible(&w2) {
                    stack.push(w2);
                }
            }
        }
        out.sort_by(|a, b| Mono { w: a.clone(), h: Units::zero() }.cmp(&Mono { w: b.clone(), h: Units::zero() }));
        out
    }

    /// `T_i^{-1}` on generators, found by solving `T_i(X) = g` over an
    /// ansatz of weight-matching words times Cartan units near `i`.
    pub fn inverse_table(&self, i: usize, max_degree: usize) -> CoreResult<GenTable> {
        let q = &self.quiver;
        let fwd = self.op(i, false)?;
        let mut letters = Vec::new();
        for j in 0..q.n {
            let g = self.b(j);
            let target_w = self.qweight(&q.bs_apply(i, &self.alphabet().weights[j]));
            let mut d = 3.min(max_degree);
            let found = loop {
                match self.solve_preimage(&fwd, i, &g, &target_w, d) {
                    Ok(x) => break x,
                    Err(CoreError::Unsolvable) if d < max_degree => d += 1,
                    Err(e) => return Err(e),
                }
            };
            letters.push(found);
        }
        // Cartan part: T_i is an involution on the Cartan lattice up to scalars.
        let mut units = Vec::new();
        for (k, &l) in self.unit_nodes.iter().enumerate() {
            let a = q.simple_root(l);
            let sa = q.bs_apply(i, &a);
            let (c, h) = self.cartan_image(&sa);
            let c = match self.level {
                Level::Universal => c.mul(&self.b_alpha(&sa)).div(&self.b_alpha(&a))?,
                Level::Parameter(_) => c,
            };
            // Round trip on the unit.
            let x = NCPoly::term(Mono::units(h), c.clone());
            let back = self.applier(&fwd).apply(&x)?;
            if back != NCPoly::units(Units::single(k, 1)) {
                return Err(CoreError::Other(format!("Cartan inverse of T_{} failed on unit {}", q.label(i), k)));
            }
            units.push((c, h));
        }
        Ok(GenTable { letters, units })
    }

    fn solve_preimage(&self, fwd: &GenTable, i: usize, g: &Poly, qw: &[i32], d: usize) -> CoreResult<Poly> {
        let q = &self.quiver;
        let mut boxes: Vec<Units> = vec![Units::zero()];
        let mut nodes: Vec<usize> = vec![i, q.tau[i]];
        nodes.dedup();
        for &l in &nodes {
            if let Some(k) = self.unit_of_node(l) {
                let mut next = Vec::new();
                for b in &boxes {
                    for e in -1..=1 {
                        next.push(b.add(&Units::single(k, e)));
                    }
                }
                boxes = next;
            }
        }
        let words = self.normal_words(qw, d);
        let mut cands = Vec::new();
        for w in &words {
            for h in &boxes {
                cands.push(Mono { w: w.clone(), h: *h });
            }
        }
        // Locate a solution support in the prime shadow, then solve exactly on it.
        if let Some(support) = self.preimage_support_fp(fwd, g, &cands)? {
            let sub: Vec<Mono> = support.iter().map(|&k| cands[k].clone()).collect();
            if let Ok(x) = self.solve_exact(fwd, g, &sub) {
                return Ok(x);
            }
        } else if self.rs_fp.is_some() {
            return Err(CoreError::Unsolvable);
        }
        self.solve_exact(fwd, g, &cands)
    }

    fn solve_exact(&self, fwd: &GenTable, g: &Poly, cands: &[Mono]) -> CoreResult<Poly> {
        let mut tap = self.applier(fwd);
        let mut emb = self.embedder();
        let mut images = Vec::new();
        for m in cands {
            let t = tap.apply(&NCPoly::term(m.clone(), FieldElem::one()))?;
            images.push(emb.apply(&t)?);
        }
        let target = emb.apply(g)?;
        let sol = linear_solve_fast(&[target], &images)?;
        let mut x = NCPoly::zero();
        for (m, c) in cands.iter().zip(&sol.coeffs[0]) {
            x.add_term(m.clone(), c.clone());
        }
        Ok(x)
    }

    /// Independent candidates spanning a mod-p solution, or `None` when the
    /// shadow has no solution (or is unavailable).
    fn preimage_support_fp(&self, fwd: &GenTable, g: &Poly, cands: &[Mono]) -> CoreResult<Option<Vec<usize>>> {
        let (Some(rs), Some(amb)) = (&self.rs_fp, &self.ambient_fp) else { return Ok(None) };
        let letters = fwd.letters.iter().map(|p| p.to_fp::<{ FpA::MARK }>()).collect::<Option<Vec<_>>>();
        let units = fwd.units.iter().map(|(c, u)| Some((c.to_fp::<{ FpA::MARK }>()?, *u))).collect::<Option<Vec<_>>>();
        let (Some(letters), Some(units), Some(mut emb)) = (letters, units, self.embedder_fp::<{ FpA::MARK }>(amb))
        else {
            return Ok(None);
        };
        let Some(gf) = g.to_fp::<{ FpA::MARK }>() else { return Ok(None) };
        let mut tap = Applier::new(rs, letters, units);
        let mut coords = Coords::new();
        let mut ech = Echelon::<FpA>::new(true);
        for (k, m) in cands.iter().enumerate() {
            let t = tap.apply(&NCPoly::term(m.clone(), FpA::one()))?;
            let v = coords.vector(&emb.apply(&t)?);
            ech.insert(v, k);
        }
        let target = coords.vector(&emb.apply(&gf)?);
        Ok(ech.solve(target).map(|sol| sol.keys().copied().collect()))
    }

    /// Check both alternating products of length `m_ij` on every generator.
    pub fn verify_braid_pair(&self, i: usize, j: usize) -> CoreResult<BraidReport> {
        let per = self.gens().into_iter().map(|g| self.verify_braid_generator(i, j, g)).collect();
        Ok(BraidReport { i, j, m: self.quiver.weyl.m(i, j), per_generator: per })
    }

    /// One generator of a braid check; errors are folded into the record.
    pub fn verify_braid_generator(&self, i: usize, j: usize, g: Gen) -> GenCheck {
        let m = self.quiver.weyl.m(i, j) as usize;
        let cap = self.ambient.cap();
        let word = |a: usize, b: usize| -> Vec<usize> { (0..m).map(|k| if k % 2 == 0 { a } else { b }).collect() };
        let run = || -> CoreResult<(Poly, Poly)> {
            let x = self.gen_poly(g);
            let l = self.apply_word(&word(i, j), &x, false)?;
            let r = self.apply_word(&word(j, i), &x, false)?;
            let mut e = self.embedder();
            Ok((e.apply(&l)?, e.apply(&r)?))
        };
        match run() {
            Ok((l, r)) => GenCheck {
                gen: self.gen_name(g),
                lhs_nf_hash: l.fingerprint(),
                rhs_nf_hash: r.fingerprint(),
                equal: l == r,
                cap,
                error: None,
            },
            Err(e) => GenCheck {
                gen: self.gen_name(g),
                lhs_nf_hash: 0,
                rhs_nf_hash: 0,
                equal: false,
                cap,
                error: Some(format!("{}", e)),
            },
        }
    }

    /// All pairs `i < j` of representatives.
    pub fn braid_pairs(&self) -> Vec<(usize, usize)> {
        let reps = &self.quiver.reps;
        let mut out = Vec::new();
        for (a, &i) in reps.iter().enumerate() {
            for &j in &reps[a + 1..] {
                out.push((i, j));
            }
        }
        out
    }

    // -----------------------------------------------------------------------
    // Parameters

    /// `a_i = √(ς_⋄,i / ς_i)` (all 1 at universal level).
    pub fn a_factors(&self) -> CoreResult<Vec<FieldElem>> {
        match &self.level {
            Level::Universal => Ok(vec![FieldElem::one(); self.n()]),
            Level::Parameter(vs) => {
                let d = distinguished_parameter(&self.quiver);
                (0..self.n()).map(|i| sqrt_unit(&d[i].div(&vs[i])?)).collect()
            }
        }
    }

    /// Rescaling `B_i ↦ a_i B_i`, units fixed (or its inverse).
    pub fn phi_param_change(&self, x: &Poly, inverse: bool) -> CoreResult<Poly> {
        let a = self.a_factors()?;
        let letters = (0..self.n())
            .map(|i| Ok(self.b(i).scale(&if inverse { a[i].inv()? } else { a[i].clone() })))
            .collect::<CoreResult<Vec<_>>>()?;
        let units = (0..self.num_units()).map(|k| (FieldElem::one(), Units::single(k, 1))).collect();
        Ok(Applier::new(&self.rs, letters, units).apply(x)?)
    }

    // -----------------------------------------------------------------------
    // Root vectors and PBW

    /// `B_{β_j}` and `B_{τβ_j}` for a complete sequence, in the ordering
    /// β_1, τβ_1, β_2, … (τ-fixed roots listed once).
    pub fn q_root_vectors(&self, seq: &IAdmissibleSeq) -> CoreResult<Vec<RootVector>> {
        let q = &self.quiver;
        let a = self.a_factors()?;
        let mut out = Vec::new();
        for (j, &ij) in seq.indices.iter().enumerate() {
            let prefix = &seq.indices[..j];
            let beta = &seq.betas[j];
            let mut targets = vec![(ij, beta.clone())];
            if q.tau[ij] != ij {
                targets.push((q.tau[ij], q.tau_root(beta)));
            }
            for (node, root) in targets {
                let x = self.apply_word(prefix, &self.b(node), true)?;
                // Prefactor from the weight of this root; the printed reading
                // uses β_j for both, which differs only when d(β) ≠ d(τβ).
                let pre = |r: &Root| -> CoreResult<FieldElem> {
                    let mut c = a[ij].clone();
                    for (l, &d) in r.iter().enumerate() {
                        c = c.mul(&a[l].pow(-d)?);
                    }
                    Ok(c)
                };
                let own = pre(&root)?;
                let printed = pre(beta)?;
                out.push(RootVector {
                    root: root.clone(),
                    index: j,
                    node,
                    value: x.scale(&own),
                    prefactor_discrepancy: own != printed,
                });
            }
        }
        Ok(out)
    }

    /// PBW monomials `B_{γ_1}^{λ_1}⋯B_{γ_N}^{λ_N}` with `Σλ ≤ d` (embedded
    /// over a prime shadow) times every Cartan monomial of `kappas`; returns
    /// (count, rank).
    pub fn pbw_rank_fp<const A: u64>(
        &self,
        roots: &[Poly],
        d: usize,
        kappas: &[Units],
    ) -> CoreResult<Option<(usize, usize)>> {
        let Some(rs) = self.ambient.rs.map_coeffs(|c| c.to_fp::<A>()) else { return Ok(None) };
        let Some(mut emb) = self.embedder_fp::<A>(&rs) else { return Ok(None) };
        let mut imgs = Vec::new();
        for r in roots {
            let Some(rf) = r.to_fp::<A>() else { return Ok(None) };
            imgs.push(emb.apply(&rf)?);
        }
        let kap: Vec<NCPoly<Fp<A>>> = kappas
            .iter()
            .map(|h| emb.apply(&NCPoly::units(*h)))
            .collect::<CoreResult<_>>()?;
        let mut monos: Vec<NCPoly<Fp<A>>> = Vec::new();
        // Depth-first over nondecreasing root indices shares prefixes.
        let mut stack: Vec<(usize, usize, NCPoly<Fp<A>>)> = vec![(0, 0, NCPoly::one())];
        while let Some((start, deg, p)) = stack.pop() {
            monos.push(p.clone());
            if deg == d {
                continue;
            }
            for k in start..imgs.len() {
                let np = emb.reducer().mul(&p, &imgs[k])?;
                stack.push((k, deg + 1, np));
            }
        }
        let mut coords = Coords::new();
        let mut ech = Echelon::<Fp<A>>::new(false);
        let mut count = 0;
        for m in &monos {
            for k in &kap {
                let v = coords.vector(&emb.reducer().mul(m, k)?);
                ech.insert(v, count);
                count += 1;
            }
        }
        Ok(Some((count, ech.rank())))
    }
}

/// Independence and spanning evidence for the PBW basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PbwReport {
    pub degree: usize,
    /// Size of the Cartan box used for the independence check.
    pub kappas: usize,
    pub count: usize,
    pub rank: usize,
    /// `(word, expressed uniquely in the PBW–Cartan span)`.
    pub spanning: Vec<(String, bool)>,
}

impl PbwReport {
    pub fn passed(&self) -> bool {
        self.count == self.rank && self.spanning.iter().all(|(_, ok)| *ok)
    }
}

impl IQuantumGroup {
    /// Unit monomials with every exponent in `0..=e`.
    pub fn unit_box(&self, e: i16) -> Vec<Units> {
        let mut out = vec![Units::zero()];
        for k in 0..self.num_units() {
            let mut next = Vec::new();
            for h in &out {
                for x in 0..=e {
                    next.push(h.add(&Units::single(k, x)));
                }
            }
            out = next;
        }
        out
    }

    /// PBW check: ordered monomials in the root vectors of degree ≤ `d`
    /// times the unit box of exponent ≤ `box_exp` are independent, and every
    /// word in the `B_i` of length ≤ `span_len` is a unique combination of
    /// PBW monomials of degree ≤ `span_len` times unit monomials.
    pub fn pbw_check(&self, seq: &IAdmissibleSeq, d: usize, box_exp: i16, span_len: usize) -> CoreResult<PbwReport> {
        let roots: Vec<Poly> = self.q_root_vectors(seq)?.into_iter().map(|r| r.value).collect();
        let kappas = self.unit_box(box_exp);
        let (count, rank) = self
            .pbw_rank_fp::<{ FpA::MARK }>(&roots, d, &kappas)?
            .ok_or_else(|| CoreError::Other("prime shadow unavailable for these coefficients".into()))?;
        let weight = |p: &Poly| p.iter().next().map(|(m, _)| self.mono_qweight(m)).unwrap_or_default();
        // Embedded PBW monomials of degree ≤ span_len, built by extending
        // embedded prefixes, keyed by weight.
        let mut emb = self.embedder();
        let root_w: Vec<Vec<i32>> = roots.iter().map(|r| weight(r)).collect();
        let root_img: Vec<Poly> = roots.iter().map(|r| emb.apply(r)).collect::<CoreResult<_>>()?;
        let add_w = |a: &[i32], b: &[i32]| -> Vec<i32> {
            let raw: Vec<i32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
            self.qweight(&raw)
        };
        let mut pbw: Vec<(Vec<i32>, Poly)> = Vec::new();
        let mut stack: Vec<(usize, usize, Vec<i32>, Poly)> = vec![(0, 0, vec![0; self.n()], NCPoly::one())];
        while let Some((start, deg, w, p)) = stack.pop() {
            pbw.push((w.clone(), p.clone()));
            if deg == span_len {
                continue;
            }
            for k in start..roots.len() {
                let np = emb.reducer().mul(&p, &root_img[k])?;
                stack.push((k, deg + 1, add_w(&w, &root_w[k]), np));
            }
        }
        let span_units: Vec<Poly> =
            self.unit_box(1).iter().map(|h| emb.apply(&NCPoly::units(*h))).collect::<CoreResult<_>>()?;
        let mut words: Vec<Vec<Letter>> = vec![vec![]];
        let mut frontier = words.clone();
        for _ in 0..span_len {
            let mut next = Vec::new();
            for w in &frontier {
                for x in 0..self.n() as Letter {
                    let mut w2 = w.clone();
                    w2.push(x);
                    next.push(w2);
                }
            }
            words.extend(next.iter().cloned());
            frontier = next;
        }
        let mut cache: BTreeMap<Vec<i32>, Vec<Poly>> = BTreeMap::new();
        let mut spanning = Vec::new();
        for w in words.iter().filter(|w| !w.is_empty()) {
            let target = NCPoly::word(w);
            let wt = weight(&target);
            if !cache.contains_key(&wt) {
                let mut cands = Vec::new();
                for (_, p) in pbw.iter().filter(|(pw, _)| *pw == wt) {
                    for u in &span_units {
                        cands.push(emb.reducer().mul(p, u)?);
                    }
                }
                cache.insert(wt.clone(), cands);
            }
            let cands = &cache[&wt];
            let t = emb.apply(&target)?;
            let ok = match linear_solve_fast(&[t], cands) {
                Ok(sol) => sol.unique,
                Err(CoreError::Unsolvable) => false,
                Err(e) => return Err(e),
            };
            let label = w.iter().map(|&x| self.gen_name(Gen::B(x as usize))).collect::<Vec<_>>().join("");
            spanning.push((label, ok));
        }
        Ok(PbwReport { degree: d, kappas: kappas.len(), count, rank, spanning })
    }
}

/// Outcome of the reduced-ideal check for one operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealReport {
    pub i: usize,
    /// (generator description, vanishes after reduction)
    pub per_generator: Vec<(String, bool)>,
}

impl IdealReport {
    pub fn passed(&self) -> bool {
        self.per_generator.iter().all(|(_, ok)| *ok)
    }
}

impl IQuantumGroup {
    /// Generators of the central ideal cut out by a parameter:
    /// `k̃_l − ς_l` (fixed l) and `k̃_l k̃_{τl} − ς_l ς_{τl}` (other representatives).
    pub fn ideal_generators(&self, params: &[FieldElem]) -> Vec<(String, Poly)> {
        let q = &self.quiver;
        let mut out = Vec::new();
        for &l in &q.reps {
            let (h, c) = if q.fixed(l) {
                (Units::single(l, 1), params[l].clone())
            } else {
                (Units::single(l, 1).add(&Units::single(q.tau[l], 1)), params[l].mul(&params[q.tau[l]]))
            };
            let p = NCPoly::units(h).sub(&NCPoly::constant(c));
            out.push((self.alphabet().fmt_poly(&p), p));
        }
        out
    }

    /// Universal `T_i` applied to every ideal generator, embedded in the
    /// ambient reduced at the distinguished parameter; each must vanish.
    pub fn reduced_ideal_stability(&self, reduced: &IQuantumGroup, i: usize) -> CoreResult<IdealReport> {
        if self.level != Level::Universal {
            return Err(CoreError::Other("ideal stability is a universal-level check".into()));
        }
        let params = distinguished_parameter(&self.quiver);
        let mut emb = reduced.embedder();
        let mut per = Vec::new();
        for (name, p) in self.ideal_generators(&params) {
            let t = self.ti_apply(i, &p)?;
            per.push((name, emb.apply(&t)?.is_zero()));
        }
        Ok(IdealReport { i, per_generator: per })
    }

    /// The universal generators embedded in the ambient reduced at `params`.
    pub fn universal_in_reduced(q: &IQuiver, params: &[FieldElem], opts: &BuildOptions) -> CoreResult<Self> {
        let amb = AmbientAlgebra::build(q, AmbientKind::Reduced(params.to_vec()), opts.cap)?;
        Self::with_ambient(q, Level::Universal, amb, opts)
    }
}

trait Pipe: Sized {
    fn pipe<T>(self, f: impl FnOnce(Self) -> T) -> T {
        f(self)
    }
}

impl<T> Pipe for T {}

#[derive(Clone, Debug)]
pub struct RootVector {
    pub root: Root,
    /// Position `j` (0-based) in the sequence.
    pub index: usize,
    /// `i_j` or `τ i_j`.
    pub node: usize,
    pub value: Poly,
    pub prefactor_discrepancy: bool,
}

/// Quotient weight modulo `⟨α_i + α_{τi}⟩`.
pub fn qweight(q: &IQuiver, raw: &[i32]) -> Vec<i32> {
    let mut w = raw.to_vec();
    for i in 0..q.n {
        let t = q.tau[i];
        if t == i {
            w[i] = w[i].rem_euclid(2);
        } else if i < t {
            w[i] -= w[t];
            w[t] = 0;
        }
    }
    w
}

/// Kernel of the embedding on words of length ≤ 3 and on single units times
/// words of length ≤ 1, weight class by weight class.
fn derive_relations(q: &IQuiver, alpha: &Alphabet, ambient: &AmbientAlgebra, emb: &GenTable) -> CoreResult<Vec<Poly>> {
    let n = q.n;
    let nu = alpha.num_units();
    let mut cands: Vec<Mono> = Vec::new();
    let mut words: Vec<Vec<Letter>> = vec![vec![]];
    for len in 1..=3 {
        let mut next = Vec::new();
        for w in words.iter().filter(|w| w.len() == len - 1) {
            for x in 0..n as Letter {
                let mut w2 = w.clone();
                w2.push(x);
                next.push(w2);
            }
        }
        words.extend(next);
    }
    for w in &words {
        cands.push(Mono::word(w));
        if w.len() <= 1 {
            for k in 0..nu {
                for e in [-1i16, 1] {
                    cands.push(Mono { w: Word::from_slice(w), h: Units::single(k, e) });
                }
            }
        }
    }
    // Group by quotient weight; within a class go by increasing monomial so
    // each relation's leading term is the dependent candidate.
    let mut classes: BTreeMap<Vec<i32>, Vec<Mono>> = BTreeMap::new();
    for m in cands {
        classes.entry(qweight(q, &alpha.weight(&m))).or_default().push(m);
    }
    let mut app = Applier::new(&ambient.rs, emb.letters.clone(), emb.units.clone());
    let mut rels = Vec::new();
    for (_, mut ms) in classes {
        ms.sort();
        let mut coords = Coords::new();
        let mut ech = Echelon::<FieldElem>::new(true);
        for (k, m) in ms.iter().enumerate() {
            let img = app.apply(&NCPoly::term(m.clone(), FieldElem::one()))?;
            let v = coords.vector(&img);
            let (res, combo) = ech.reduce(v.clone());
            if res.is_empty() {
                let mut r = NCPoly::term(m.clone(), FieldElem::one());
                for (idx, c) in combo {
                    r.add_term(ms[idx].clone(), c.neg());
                }
                rels.push(r);
            } else {
                ech.insert(v, k);
            }
        }
    }
    Ok(rels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::{build, DiagramKind, DiagramSpec};

    fn fe(s: &str) -> FieldElem {
        FieldElem::parse(s).unwrap()
    }

    fn uni(spec: DiagramSpec) -> IQuantumGroup {
        IQuantumGroup::new(&build(&spec).unwrap(), Level::Universal, &BuildOptions::default()).unwrap()
    }

    #[test]
    fn embed_split_a1() {
        let g = uni(DiagramSpec::split(DiagramKind::A, 1));
        let a = &g.ambient;
        assert_eq!(g.embed(&g.b(0)).unwrap(), a.f(0).add(&a.mul(&a.e(0), &a.ktp(0))));
        assert_eq!(g.embed(&NCPoly::one()).unwrap(), NCPoly::one());
    }

    #[test]
    fn split_a2_tables() {
        let g = uni(DiagramSpec::split(DiagramKind::A, 2));
        let t = g.braid_table(0).unwrap();
        let expect = g.nf(&g.bracket(&g.b(1), &g.b(0), &FieldElem::v())).unwrap();
        assert_eq!(t.letters[1], expect);
    }

    #[test]
    fn a3_quasi_split_fixed_node() {
        let g = uni(DiagramSpec::quasi_split(DiagramKind::A, 3));
        // Node 1 (0-based) is the fixed centre.
        let t = g.braid_table(1).unwrap();
        let k = NCPoly::term(Mono::units(Units::single(1, -1)), fe("-v^-2"));
        assert_eq!(t.letters[1], g.nf(&g.mul(&k, &g.b(1))).unwrap());
    }

    #[test]
    fn homomorphism_consistency() {
        let g = uni(DiagramSpec::quasi_split(DiagramKind::A, 3));
        let x = g.mul(&g.b(0), &g.b(1));
        let y = g.mul(&g.b(2), &g.b(1));
        let lhs = g.embed(&g.mul(&x, &y)).unwrap();
        let rhs = g.ambient.nf(&g.ambient.mul(&g.embed(&x).unwrap(), &g.embed(&y).unwrap())).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn central_units() {
        let g = uni(DiagramSpec::quasi_split(DiagramKind::A, 3));
        // k̃_0 k̃_2 is central.
        let k = NCPoly::units(Units::single(0, 1).add(&Units::single(2, 1)));
        for j in 0..3 {
            assert!(g.equal(&g.mul(&k, &g.b(j)), &g.mul(&g.b(j), &k)).unwrap());
        }
    }

    #[test]
    fn split_a2_braid_and_inverse() {
        let mut g = uni(DiagramSpec::split(DiagramKind::A, 2));
        g.prepare_braid(5).unwrap();
        assert!(g.verify_braid_pair(0, 1).unwrap().passed());
        let x = g.ti_inverse_apply(0, &g.b(1)).unwrap();
        assert!(g.equal(&g.ti_apply(0, &x).unwrap(), &g.b(1)).unwrap());
        // Cartan inverse: b_i^{-2} k̃_i^{-1}.
        let k = g.ti_inverse_apply(0, &NCPoly::units(Units::single(0, 1))).unwrap();
        assert_eq!(k, NCPoly::term(Mono::units(Units::single(0, -1)), fe("v^-4")));
    }

    #[test]
    fn parameter_level_distinguished_split() {
        let q = build(&DiagramSpec::split(DiagramKind::A, 2)).unwrap();
        let g = IQuantumGroup::new(&q, Level::Parameter(distinguished_parameter(&q)), &BuildOptions::default()).unwrap();
        let t = g.braid_table(0).unwrap();
        assert_eq!(t.letters[1], g.nf(&g.bracket(&g.b(1), &g.b(0), &FieldElem::v())).unwrap());
        assert_eq!(t.letters[0], g.b(0));
        assert_eq!(g.a_factors().unwrap(), vec![FieldElem::one(), FieldElem::one()]);
    }

    #[test]
    fn a_factor_non_distinguished() {
        let q = build(&DiagramSpec::split(DiagramKind::A, 2)).unwrap();
        let g = IQuantumGroup::new(&q, Level::Parameter(vec![fe("-v^-4"); 2]), &BuildOptions::default()).unwrap();
        assert_eq!(g.a_factors().unwrap(), vec![fe("v"), fe("v")]);
        assert_eq!(g.phi_param_change(&g.b(0), false).unwrap(), g.b(0).scale(&fe("v")));
    }

    #[test]
    fn pbw_a2_split() {
        let g = uni(DiagramSpec::split(DiagramKind::A, 2));
        let seq = crate::iseq::i_admissible_complete(&g.quiver).unwrap();
        let r = g.pbw_check(&seq, 2, 0, 2).unwrap();
        // Σλ ≤ 2 over three roots: 1 + 3 + 6.
        assert_eq!((r.count, r.rank), (10, 10));
        assert_eq!(r.spanning.len(), 6);
        assert!(r.passed(), "{:?}", r);
        let r0 = g.pbw_check(&seq, 0, 0, 0).unwrap();
        assert_eq!((r0.count, r0.rank), (1, 1));
    }
}
