//! Noncommutative polynomials with a block of commuting units, a truncated
//! completion procedure, normal forms and linear algebra on coordinates.
//!
//! A monomial is a word in ordinary letters followed by a unit monomial: units
//! are invertible, commute among themselves and skew-commute with letters,
//! `U_k · x = u^{e(k,x)} x · U_k`. Words are ordered by length, then
//! lexicographically by letter index; unit parts only break ties.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::format;
use alloc::rc::Rc;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use hashbrown::HashMap;
use smallvec::SmallVec;

use crate::error::{CoreError, CoreResult};
use crate::scalars::{FieldElem, Fp, FpA, FpB, Scalar};

pub type Letter = u8;
pub const MAX_UNITS: usize = 16;
pub type Word = SmallVec<[Letter; 24]>;

/// Exponent vector of the unit generators.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct Units(pub [i16; MAX_UNITS]);

impl Units {
    pub fn zero() -> Self {
        Units([0; MAX_UNITS])
    }

    pub fn single(k: usize, e: i16) -> Self {
        let mut u = Self::zero();
        u.0[k] = e;
        u
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, o: &Units) -> Units {
        let mut r = *self;
        for k in 0..MAX_UNITS {
            r.0[k] += o.0[k];
        }
        r
    }

    pub fn neg(&self) -> Units {
        let mut r = *self;
        for x in r.0.iter_mut() {
            *x = -*x;
        }
        r
    }

    pub fn scale(&self, n: i16) -> Units {
        let mut r = *self;
        for x in r.0.iter_mut() {
            *x *= n;
        }
        r
    }

    pub fn is_nonneg(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono {
    pub w: Word,
    pub h: Units,
}

impl Mono {
    pub fn one() -> Self {
        Mono { w: Word::new(), h: Units::zero() }
    }

    pub fn word(w: &[Letter]) -> Self {
        Mono { w: Word::from_slice(w), h: Units::zero() }
    }

    pub fn units(h: Units) -> Self {
        Mono { w: Word::new(), h }
    }
}

impl Ord for Mono {
    fn cmp(&self, o: &Self) -> Ordering {
        self.w
            .len()
            .cmp(&o.w.len())
            .then_with(|| self.w.as_slice().cmp(o.w.as_slice()))
            .then_with(|| self.h.cmp(&o.h))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Finite linear combination of monomials.
#[derive(Clone, Debug, PartialEq)]
pub struct NCPoly<S> {
    terms: HashMap<Mono, S>,
}

impl<S: Scalar> Default for NCPoly<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> NCPoly<S> {
    pub fn zero() -> Self {
        NCPoly { terms: HashMap::new() }
    }

    pub fn one() -> Self {
        Self::term(Mono::one(), S::one())
    }

    pub fn constant(c: S) -> Self {
        Self::term(Mono::one(), c)
    }

    pub fn term(m: Mono, c: S) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn letter(x: Letter) -> Self {
        Self::term(Mono::word(&[x]), S::one())
    }

    pub fn word(w: &[Letter]) -> Self {
        Self::term(Mono::word(w), S::one())
    }

    pub fn units(h: Units) -> Self {
        Self::term(Mono::units(h), S::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mono, &S)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Mono) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    pub fn add_term(&mut self, m: Mono, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            hashbrown::hash_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
            hashbrown::hash_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add_assign(&mut self, o: &Self) {
        for (m, c) in o.iter() {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// `self += c · o`.
    pub fn add_scaled(&mut self, o: &Self, c: &S) {
        if c.is_zero() {
            return;
        }
        for (m, d) in o.iter() {
            self.add_term(m.clone(), d.mul(c));
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        r.add_assign(o);
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        r.add_scaled(o, &S::one().neg());
        r
    }

    pub fn neg(&self) -> Self {
        self.scale(&S::one().neg())
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        NCPoly { terms: self.terms.iter().map(|(m, d)| (m.clone(), d.mul(c))).collect() }
    }

    /// Multiply on the right by a unit monomial (no commutation needed).
    pub fn mul_units(&self, h: &Units) -> Self {
        if h.is_zero() {
            return self.clone();
        }
        NCPoly { terms: self.terms.iter().map(|(m, c)| (Mono { w: m.w.clone(), h: m.h.add(h) }, c.clone())).collect() }
    }

    pub fn max_len(&self) -> usize {
        self.terms.keys().map(|m| m.w.len()).max().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<(&Mono, &S)> {
        self.terms.iter().max_by(|a, b| a.0.cmp(b.0))
    }

    /// Terms in descending monomial order.
    pub fn sorted(&self) -> Vec<(&Mono, &S)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| b.0.cmp(a.0));
        v
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> Option<T>) -> Option<NCPoly<T>> {
        let mut out = NCPoly::zero();
        for (m, c) in self.iter() {
            out.add_term(m.clone(), f(c)?);
        }
        Some(out)
    }

    pub fn filter(&self, keep: impl Fn(&Mono) -> bool) -> Self {
        NCPoly { terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }
}

impl NCPoly<FieldElem> {
    pub fn to_fp<const A: u64>(&self) -> Option<NCPoly<Fp<A>>> {
        self.map_coeffs(|c| c.to_fp::<A>())
    }

    /// Order-independent 64-bit fingerprint of the exact coefficients.
    pub fn fingerprint(&self) -> u64 {
        let mut acc: u64 = 0x9e37_79b9_7f4a_7c15;
        let mut v: Vec<String> = self
            .sorted()
            .into_iter()
            .map(|(m, c)| format!("{:?}|{:?}|{}", m.w.as_slice(), &m.h.0[..], c))
            .collect();
        v.sort();
        for s in v {
            for b in s.bytes() {
                acc ^= b as u64;
                acc = acc.wrapping_mul(0x0100_0000_01b3);
            }
            acc = acc.rotate_left(17) ^ 0xff;
        }
        acc
    }
}

/// Generator data for a family of algebras.
#[derive(Clone, Debug)]
pub struct Alphabet {
    pub letters: Vec<String>,
    /// Weight of each letter (root lattice or a quotient of it).
    pub weights: Vec<Vec<i32>>,
    pub units: Vec<String>,
    /// Weight of each unit.
    pub unit_weights: Vec<Vec<i32>>,
    /// `pair[x][k]`: `U_k · x = u^{pair[x][k]} x · U_k`.
    pair: Vec<[i32; MAX_UNITS]>,
}

impl Alphabet {
    /// `pair_table[k][x]` is the u-exponent picked up when unit `k` moves past letter `x`.
    pub fn new(
        letters: Vec<String>,
        weights: Vec<Vec<i32>>,
        units: Vec<String>,
        unit_weights: Vec<Vec<i32>>,
        pair_table: &[Vec<i32>],
    ) -> Self {
        assert!(units.len() <= MAX_UNITS);
        assert!(letters.len() < 255);
        let mut pair = vec![[0i32; MAX_UNITS]; letters.len()];
        for (k, row) in pair_table.iter().enumerate() {
            for (x, &e) in row.iter().enumerate() {
                pair[x][k] = e;
            }
        }
        Alphabet { letters, weights, units, unit_weights, pair }
    }

    pub fn num_letters(&self) -> usize {
        self.letters.len()
    }

    pub fn num_units(&self) -> usize {
        self.units.len()
    }

    pub fn letter_index(&self, name: &str) -> Option<Letter> {
        self.letters.iter().position(|l| l == name).map(|k| k as Letter)
    }

    /// u-exponent of moving `h` rightwards past the word `w`.
    #[inline]
    pub fn comm(&self, h: &Units, w: &[Letter]) -> i32 {
        if h.is_zero() {
            return 0;
        }
        let mut e = 0;
        for &x in w {
            let row = &self.pair[x as usize];
            for k in 0..self.units.len() {
                e += h.0[k] as i32 * row[k];
            }
        }
        e
    }

    pub fn mul_mono(&self, a: &Mono, b: &Mono) -> (i32, Mono) {
        let mut w = a.w.clone();
        w.extend_from_slice(&b.w);
        (self.comm(&a.h, &b.w), Mono { w, h: a.h.add(&b.h) })
    }

    /// Product in the free algebra (units already commuted to the right).
    pub fn mul<S: Scalar>(&self, x: &NCPoly<S>, y: &NCPoly<S>) -> NCPoly<S> {
        let mut out = NCPoly::zero();
        for (a, c) in x.iter() {
            for (b, d) in y.iter() {
                let (e, m) = self.mul_mono(a, b);
                out.add_term(m, c.mul(d).mul_upow(e));
            }
        }
        out
    }

    pub fn weight(&self, m: &Mono) -> Vec<i32> {
        let dim = self.weights.first().or(self.unit_weights.first()).map(|w| w.len()).unwrap_or(0);
        let mut acc = vec![0; dim];
        for &x in &m.w {
            for (a, b) in acc.iter_mut().zip(&self.weights[x as usize]) {
                *a += b;
            }
        }
        for (k, &e) in m.h.0.iter().enumerate().take(self.units.len()) {
            if e != 0 {
                for (a, b) in acc.iter_mut().zip(&self.unit_weights[k]) {
                    *a += e as i32 * b;
                }
            }
        }
        acc
    }

    pub fn fmt_mono(&self, m: &Mono) -> String {
        let mut parts: Vec<String> = m.w.iter().map(|&x| self.letters[x as usize].clone()).collect();
        for (k, &e) in m.h.0.iter().enumerate().take(self.units.len()) {
            if e == 1 {
                parts.push(self.units[k].clone());
            } else if e != 0 {
                parts.push(format!("{}^{}", self.units[k], e));
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    pub fn fmt_poly<S: Scalar + core::fmt::Display>(&self, p: &NCPoly<S>) -> String {
        if p.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in p.sorted().into_iter().enumerate() {
            if k > 0 {
                out.push_str(" + ");
            }
            let cs = c.to_string();
            let ms = self.fmt_mono(m);
            if ms == "1" {
                out.push_str(&format!("({})", cs));
            } else if c.is_one() {
                out.push_str(&ms);
            } else {
                out.push_str(&format!("({})*{}", cs, ms));
            }
        }
        out
    }
}

/// `x·y − s·y·x` in the free algebra.
pub fn v_comm<S: Scalar>(alpha: &Alphabet, x: &NCPoly<S>, y: &NCPoly<S>, s: &S) -> NCPoly<S> {
    let mut r = alpha.mul(x, y);
    r.add_scaled(&alpha.mul(y, x), &s.neg());
    r
}

#[derive(Clone, Debug)]
pub struct Rule<S> {
    pub lhs: Word,
    pub rhs: NCPoly<S>,
}

/// One overlap ambiguity that was resolved: suffix of rule `a` of length `k`
/// equals the prefix of rule `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Overlap {
    pub len: usize,
    pub a: usize,
    pub b: usize,
    pub k: usize,
}

/// A terminating rewriting system, confluent on words of length ≤ `cap`.
#[derive(Clone, Debug)]
pub struct RewriteSystem<S> {
    pub alpha: Alphabet,
    pub rules: Vec<Rule<S>>,
    index: HashMap<Word, usize>,
    lens: Vec<usize>,
    pub cap: usize,
    /// When set, normal forms of words longer than `cap` are refused.
    pub strict: bool,
    pub certificate: Vec<Overlap>,
}

impl<S: Scalar> RewriteSystem<S> {
    fn from_rules(alpha: Alphabet, rules: Vec<Rule<S>>, cap: usize) -> Self {
        let mut rs = RewriteSystem { alpha, rules, index: HashMap::new(), lens: Vec::new(), cap, strict: true, certificate: Vec::new() };
        rs.reindex();
        rs
    }

    fn reindex(&mut self) {
        self.index.clear();
        let mut lens: Vec<usize> = Vec::new();
        for (k, r) in self.rules.iter().enumerate() {
            self.index.insert(r.lhs.clone(), k);
            if !lens.contains(&r.lhs.len()) {
                lens.push(r.lhs.len());
            }
        }
        lens.sort();
        self.lens = lens;
    }

    pub fn num_rules(&self) -> usize {
        self.rules.len()
    }

    /// Is some rule's left side a subword of `w`?
    pub fn is_reducible(&self, w: &[Letter]) -> bool {
        for &l in &self.lens {
            if l > w.len() {
                break;
            }
            for p in 0..=w.len() - l {
                if self.index.contains_key(&w[p..p + l]) {
                    return true;
                }
            }
        }
        false
    }

    pub fn reducer(&self) -> Reducer<'_, S> {
        Reducer { rs: self, memo: HashMap::new() }
    }

    /// Transport the system to another scalar ring (same rules, same order).
    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> Option<T>) -> Option<RewriteSystem<T>> {
        let mut rules = Vec::new();
        for r in &self.rules {
            rules.push(Rule { lhs: r.lhs.clone(), rhs: r.rhs.map_coeffs(&f)? });
        }
        let mut rs = RewriteSystem::from_rules(self.alpha.clone(), rules, self.cap);
        rs.strict = self.strict;
        rs.certificate = self.certificate.clone();
        Some(rs)
    }

    fn s_poly(&self, o: &Overlap) -> NCPoly<S> {
        let (ra, rb) = (&self.rules[o.a], &self.rules[o.b]);
        let tail = &rb.lhs[o.k..];
        let head = &ra.lhs[..ra.lhs.len() - o.k];
        let mut s = NCPoly::zero();
        for (m, c) in ra.rhs.iter() {
            let mut w = m.w.clone();
            w.extend_from_slice(tail);
            s.add_term(Mono { w, h: m.h }, c.mul_upow(self.alpha.comm(&m.h, tail)));
        }
        for (m, c) in rb.rhs.iter() {
            let mut w = Word::from_slice(head);
            w.extend_from_slice(&m.w);
            s.add_term(Mono { w, h: m.h }, c.neg());
        }
        s
    }

    /// All overlaps among the current rules with combined length ≤ cap.
    pub fn overlaps(&self) -> Vec<Overlap> {
        let mut out = Vec::new();
        for a in 0..self.rules.len() {
            for b in 0..self.rules.len() {
                out.extend(overlaps_between(&self.rules[a].lhs, &self.rules[b].lhs, a, b, self.cap));
            }
        }
        out
    }

    /// Re-check every overlap ambiguity up to the cap.
    pub fn verify_confluence(&self) -> CoreResult<bool> {
        let mut red = self.reducer();
        for o in self.overlaps() {
            if !red.normal_form(&self.s_poly(&o))?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Plain-text dump of the rules.
    pub fn dump(&self) -> String
    where
        S: core::fmt::Display,
    {
        let mut out = String::new();
        for r in &self.rules {
            let lhs = self.alpha.fmt_mono(&Mono { w: r.lhs.clone(), h: Units::zero() });
            out.push_str(&format!("{} -> {}\n", lhs, self.alpha.fmt_poly(&r.rhs)));
        }
        out
    }
}

fn overlaps_between(la: &[Letter], lb: &[Letter], a: usize, b: usize, cap: usize) -> Vec<Overlap> {
    let mut out = Vec::new();
    let m = la.len().min(lb.len());
    for k in 1..m {
        let len = la.len() + lb.len() - k;
        if len <= cap && la[la.len() - k..] == lb[..k] {
            out.push(Overlap { len, a, b, k });
        }
    }
    out
}

/// Memoizing normal-form evaluator; one per worker.
pub struct Reducer<'a, S> {
    rs: &'a RewriteSystem<S>,
    memo: HashMap<Word, Rc<NCPoly<S>>>,
}

impl<'a, S: Scalar> Reducer<'a, S> {
    pub fn system(&self) -> &'a RewriteSystem<S> {
        self.rs
    }

    pub fn clear(&mut self) {
        self.memo.clear();
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    /// Normal form of `w·x` for a normal word `w`.
    fn append(&mut self, w: &[Letter], x: Letter) -> CoreResult<Rc<NCPoly<S>>> {
        let mut key = Word::from_slice(w);
        key.push(x);
        if let Some(r) = self.memo.get(&key) {
            return Ok(r.clone());
        }
        let n = key.len();
        if self.rs.strict && n > self.rs.cap {
            return Err(CoreError::CapExceeded(format!("word of length {} exceeds cap {}", n, self.rs.cap)));
        }
        let mut found = None;
        for &l in &self.rs.lens {
            if l > n {
                break;
            }
            if let Some(&id) = self.rs.index.get(&key[n - l..]) {
                found = Some((id, n - l));
                break;
            }
        }
        let res = match found {
            None => NCPoly::term(Mono { w: key.clone(), h: Units::zero() }, S::one()),
            Some((id, p)) => {
                let rs = self.rs;
                let prefix = &key[..p];
                let mut acc = NCPoly::zero();
                for (m, c) in rs.rules[id].rhs.iter() {
                    let part = self.fold(prefix, &m.w)?;
                    for (m2, c2) in part.iter() {
                        acc.add_term(Mono { w: m2.w.clone(), h: m2.h.add(&m.h) }, c2.mul(c));
                    }
                }
                acc
            }
        };
        let res = Rc::new(res);
        self.memo.insert(key, res.clone());
        Ok(res)
    }

    /// Normal form of `base·w` for a normal word `base`.
    pub fn fold(&mut self, base: &[Letter], w: &[Letter]) -> CoreResult<NCPoly<S>> {
        let mut cur = NCPoly::term(Mono::word(base), S::one());
        for &x in w {
            let mut next = NCPoly::zero();
            for (m, c) in cur.iter() {
                let e = self.rs.alpha.comm(&m.h, &[x]);
                let p = self.append(&m.w, x)?;
                let cc = c.mul_upow(e);
                for (m2, c2) in p.iter() {
                    next.add_term(Mono { w: m2.w.clone(), h: m2.h.add(&m.h) }, c2.mul(&cc));
                }
            }
            cur = next;
        }
        Ok(cur)
    }

    pub fn normal_form(&mut self, x: &NCPoly<S>) -> CoreResult<NCPoly<S>> {
        let mut out = NCPoly::zero();
        for (m, c) in x.iter() {
            let p = self.fold(&[], &m.w)?;
            for (m2, c2) in p.iter() {
                out.add_term(Mono { w: m2.w.clone(), h: m2.h.add(&m.h) }, c2.mul(c));
            }
        }
        Ok(out)
    }

    /// Product of two normal forms, reduced.
    pub fn mul(&mut self, x: &NCPoly<S>, y: &NCPoly<S>) -> CoreResult<NCPoly<S>> {
        let mut out = NCPoly::zero();
        for (b, d) in y.iter() {
            for (a, c) in x.iter() {
                let e = self.rs.alpha.comm(&a.h, &b.w);
                let h = a.h.add(&b.h);
                let cc = c.mul(d).mul_upow(e);
                let p = self.fold(&a.w, &b.w)?;
                for (m2, c2) in p.iter() {
                    out.add_term(Mono { w: m2.w.clone(), h: m2.h.add(&h) }, c2.mul(&cc));
                }
            }
        }
        Ok(out)
    }

    pub fn equal(&mut self, x: &NCPoly<S>, y: &NCPoly<S>) -> CoreResult<bool> {
        Ok(self.normal_form(&x.sub(y))?.is_zero())
    }
}

/// Statistics from a completion run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompletionStats {
    pub pairs_checked: usize,
    pub rules_added: usize,
    pub rules_removed: usize,
}

/// Complete `relations` into a rewriting system confluent up to word length `cap`.
pub fn complete<S: Scalar>(alpha: Alphabet, relations: Vec<NCPoly<S>>, cap: usize) -> CoreResult<RewriteSystem<S>> {
    complete_with_stats(alpha, relations, cap).map(|(rs, _)| rs)
}

pub fn complete_with_stats<S: Scalar>(
    alpha: Alphabet,
    relations: Vec<NCPoly<S>>,
    cap: usize,
) -> CoreResult<(RewriteSystem<S>, CompletionStats)> {
    let mut work = Completion {
        alpha,
        rules: Vec::new(),
        alive: Vec::new(),
        cap,
        pairs: BinaryHeap::new(),
        pending: relations,
        certificate: Vec::new(),
        stats: CompletionStats::default(),
    };
    work.run()?;
    Ok(work.finish())
}

struct Completion<S> {
    alpha: Alphabet,
    rules: Vec<Rule<S>>,
    alive: Vec<bool>,
    cap: usize,
    pairs: BinaryHeap<Reverse<Overlap>>,
    pending: Vec<NCPoly<S>>,
    certificate: Vec<Overlap>,
    stats: CompletionStats,
}

impl<S: Scalar> Completion<S> {
    fn live_system(&self) -> RewriteSystem<S> {
        let rules = self
            .rules
            .iter()
            .zip(&self.alive)
            .filter(|(_, &a)| a)
            .map(|(r, _)| r.clone())
            .collect();
        let mut rs = RewriteSystem::from_rules(self.alpha.clone(), rules, self.cap);
        rs.strict = false;
        rs
    }

    fn run(&mut self) -> CoreResult<()> {
        let mut sys = self.live_system();
        let mut ids: Vec<usize> = Vec::new();
        loop {
            if let Some(p) = self.pending.pop() {
                let r = sys.reducer().normal_form(&p)?;
                if !r.is_zero() {
                    self.insert(r)?;
                    sys = self.live_system();
                    ids = self.alive.iter().enumerate().filter(|(_, &a)| a).map(|(k, _)| k).collect();
                }
                continue;
            }
            let Some(Reverse(o)) = self.pairs.pop() else { break };
            if !self.alive[o.a] || !self.alive[o.b] {
                continue;
            }
            self.stats.pairs_checked += 1;
            // Overlap in terms of the live-system indices.
            let pa = ids.iter().position(|&k| k == o.a);
            let pb = ids.iter().position(|&k| k == o.b);
            let (Some(pa), Some(pb)) = (pa, pb) else {
                ids = self.alive.iter().enumerate().filter(|(_, &a)| a).map(|(k, _)| k).collect();
                self.pairs.push(Reverse(o));
                continue;
            };
            let s = sys.s_poly(&Overlap { a: pa, b: pb, ..o });
            let r = sys.reducer().normal_form(&s)?;
            self.certificate.push(o);
            if !r.is_zero() {
                self.insert(r)?;
                sys = self.live_system();
                ids = self.alive.iter().enumerate().filter(|(_, &a)| a).map(|(k, _)| k).collect();
            }
        }
        Ok(())
    }

    fn insert(&mut self, r: NCPoly<S>) -> CoreResult<()> {
        let (lm, lc) = r.leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let inv = lc.inv().ok_or(CoreError::DivisionByZero)?;
        // Shift the unit part of the leading monomial to zero, make it monic.
        let r = r.mul_units(&lm.h.neg()).scale(&inv);
        if lm.w.is_empty() {
            return Err(CoreError::Other("relations force a unit to vanish".into()));
        }
        if lm.w.len() > self.cap {
            return Err(CoreError::CapExceeded(format!("rule of length {} exceeds cap {}", lm.w.len(), self.cap)));
        }
        let lhs = lm.w.clone();
        if r.iter().filter(|(m, _)| m.w == lhs).count() > 1 {
            return Err(CoreError::Other("relation among unit monomials cannot be oriented".into()));
        }
        let mut rhs = r;
        rhs.add_term(Mono { w: lhs.clone(), h: Units::zero() }, S::one().neg());
        let rhs = rhs.neg();
        // Rules whose left side contains the new one are retired and re-queued.
        for k in 0..self.rules.len() {
            if self.alive[k] && contains(&self.rules[k].lhs, &lhs) {
                self.alive[k] = false;
                self.stats.rules_removed += 1;
                let old = &self.rules[k];
                let mut rel = old.rhs.neg();
                rel.add_term(Mono { w: old.lhs.clone(), h: Units::zero() }, S::one());
                self.pending.push(rel);
            }
        }
        let id = self.rules.len();
        self.rules.push(Rule { lhs: lhs.clone(), rhs });
        self.alive.push(true);
        self.stats.rules_added += 1;
        for k in 0..self.rules.len() {
            if !self.alive[k] {
                continue;
            }
            for o in overlaps_between(&lhs, &self.rules[k].lhs, id, k, self.cap) {
                self.pairs.push(Reverse(o));
            }
            if k != id {
                for o in overlaps_between(&self.rules[k].lhs, &lhs, k, id, self.cap) {
                    self.pairs.push(Reverse(o));
                }
            }
        }
        Ok(())
    }

    fn finish(self) -> (RewriteSystem<S>, CompletionStats) {
        let mut rs = self.live_system();
        // Inter-reduce right-hand sides.
        let mut new_rhs = Vec::new();
        {
            let mut red = rs.reducer();
            for r in &rs.rules {
                new_rhs.push(red.normal_form(&r.rhs).unwrap_or_else(|_| r.rhs.clone()));
            }
        }
        for (r, p) in rs.rules.iter_mut().zip(new_rhs) {
            r.rhs = p;
        }
        rs.certificate = rs.overlaps();
        rs.strict = true;
        (rs, self.stats)
    }
}

fn contains(hay: &[Letter], needle: &[Letter]) -> bool {
    hay.len() >= needle.len() && hay.windows(needle.len()).any(|w| w == needle)
}

// ---------------------------------------------------------------------------
// Linear algebra on coordinates

/// Sparse vector keyed by column.
pub type SparseVec<S> = BTreeMap<usize, S>;

/// Incrementally built echelon basis that remembers how each basis vector
/// was obtained from the inserted vectors.
#[derive(Clone, Debug)]
pub struct Echelon<S> {
    pivots: HashMap<usize, usize>,
    vecs: Vec<SparseVec<S>>,
    combos: Vec<SparseVec<S>>,
    track: bool,
}

impl<S: Scalar> Echelon<S> {
    pub fn new(track: bool) -> Self {
        Echelon { pivots: HashMap::new(), vecs: Vec::new(), combos: Vec::new(), track }
    }

    pub fn rank(&self) -> usize {
        self.vecs.len()
    }

    /// Reduce `v` against the basis; returns the residual and the combination
    /// `c` with `v = residual + Σ c_k · inserted_k` (when tracking).
    pub fn reduce(&self, mut v: SparseVec<S>) -> (SparseVec<S>, SparseVec<S>) {
        let mut combo: SparseVec<S> = BTreeMap::new();
        let mut cursor = 0usize;
        loop {
            let next = v.range(cursor..).find(|(c, _)| self.pivots.contains_key(*c)).map(|(c, x)| (*c, x.clone()));
            let Some((col, coef)) = next else { break };
            let b = self.pivots[&col];
            for (c, x) in &self.vecs[b] {
                let val = v.get(c).cloned().unwrap_or_else(S::zero).sub(&x.mul(&coef));
                if val.is_zero() {
                    v.remove(c);
                } else {
                    v.insert(*c, val);
                }
            }
            if self.track {
                for (k, x) in &self.combos[b] {
                    let val = combo.get(k).cloned().unwrap_or_else(S::zero).add(&x.mul(&coef));
                    if val.is_zero() {
                        combo.remove(k);
                    } else {
                        combo.insert(*k, val);
                    }
                }
            }
            cursor = col + 1;
        }
        (v, combo)
    }

    /// Insert a vector labelled `label`; returns true when it was independent.
    pub fn insert(&mut self, v: SparseVec<S>, label: usize) -> bool {
        let (r, combo) = self.reduce(v);
        let Some((&col, lead)) = r.iter().next() else { return false };
        let inv = lead.inv().expect("nonzero pivot");
        let vec: SparseVec<S> = r.iter().map(|(c, x)| (*c, x.mul(&inv))).collect();
        if self.track {
            // basis = (v − Σ combo·inserted)/lead
            let mut cb: SparseVec<S> = combo.iter().map(|(k, x)| (*k, x.neg().mul(&inv))).collect();
            cb.insert(label, inv.clone());
            self.combos.push(cb);
        }
        self.pivots.insert(col, self.vecs.len());
        self.vecs.push(vec);
        true
    }

    /// Express `v` through the inserted vectors, if it lies in their span.
    pub fn solve(&self, v: SparseVec<S>) -> Option<SparseVec<S>> {
        let (r, combo) = self.reduce(v);
        if r.is_empty() {
            Some(combo)
        } else {
            None
        }
    }
}

/// Shared coordinate system for a batch of polynomials.
#[derive(Clone, Debug, Default)]
pub struct Coords {
    index: HashMap<Mono, usize>,
}

impl Coords {
    pub fn new() -> Self {
        Coords { index: HashMap::new() }
    }

    pub fn vector<S: Scalar>(&mut self, p: &NCPoly<S>) -> SparseVec<S> {
        let mut v = BTreeMap::new();
        for (m, c) in p.sorted() {
            let n = self.index.len();
            let k = *self.index.entry(m.clone()).or_insert(n);
            v.insert(k, c.clone());
        }
        v
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }
}

/// Rank of a family of polynomials over `S`.
pub fn rank<S: Scalar>(polys: &[NCPoly<S>]) -> usize {
    let mut coords = Coords::new();
    let mut ech = Echelon::new(false);
    for (k, p) in polys.iter().enumerate() {
        let v = coords.vector(p);
        ech.insert(v, k);
    }
    ech.rank()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution<S> {
    /// One coefficient vector per target, indexed like the candidates.
    pub coeffs: Vec<Vec<S>>,
    /// Rank of the candidate family.
    pub rank: usize,
    /// The candidates are independent, so every expression is unique.
    pub unique: bool,
}

/// Express each target as a combination of candidates (all already in normal
/// form). Exact over the given scalars.
pub fn linear_solve<S: Scalar>(targets: &[NCPoly<S>], candidates: &[NCPoly<S>]) -> CoreResult<Solution<S>> {
    let mut coords = Coords::new();
    let mut ech = Echelon::new(true);
    for (k, c) in candidates.iter().enumerate() {
        let v = coords.vector(c);
        ech.insert(v, k);
    }
    let mut coeffs = Vec::new();
    for t in targets {
        let v = coords.vector(t);
        let sol = ech.solve(v).ok_or(CoreError::Unsolvable)?;
        let mut row = vec![S::zero(); candidates.len()];
        for (k, x) in sol {
            row[k] = x;
        }
        coeffs.push(row);
    }
    let rank = ech.rank();
    Ok(Solution { coeffs, rank, unique: rank == candidates.len() })
}

/// Independent subset of candidates, detected in a prime-field shadow.
fn fp_pivots<const A: u64>(candidates: &[NCPoly<FieldElem>]) -> Option<Vec<usize>> {
    let mut coords = Coords::new();
    let mut ech = Echelon::<Fp<A>>::new(false);
    let mut keep = Vec::new();
    for (k, c) in candidates.iter().enumerate() {
        let v = coords.vector(&c.to_fp::<A>()?);
        if ech.insert(v, k) {
            keep.push(k);
        }
    }
    Some(keep)
}

/// Rank certificate in a prime-field shadow; a lower bound for the exact rank
/// (exact when it equals the number of vectors).
pub fn rank_fp(polys: &[NCPoly<FieldElem>]) -> Option<usize> {
    let a = polys.iter().map(|p| p.to_fp::<{ FpA::MARK }>()).collect::<Option<Vec<_>>>();
    match a {
        Some(v) => Some(rank(&v)),
        None => Some(rank(&polys.iter().map(|p| p.to_fp::<{ FpB::MARK }>()).collect::<Option<Vec<_>>>()?)),
    }
}

/// Exact solve accelerated by choosing an independent subset mod p first;
/// the answer is always verified exactly, with a full exact fallback.
pub fn linear_solve_fast(targets: &[NCPoly<FieldElem>], candidates: &[NCPoly<FieldElem>]) -> CoreResult<Solution<FieldElem>> {
    let keep = fp_pivots::<{ FpA::MARK }>(candidates).or_else(|| fp_pivots::<{ FpB::MARK }>(candidates));
    if let Some(keep) = keep {
        let sub: Vec<NCPoly<FieldElem>> = keep.iter().map(|&k| candidates[k].clone()).collect();
        if let Ok(sol) = linear_solve(targets, &sub) {
            if sol.rank == keep.len() {
                let mut coeffs = Vec::new();
                let mut ok = true;
                for (t, row) in targets.iter().zip(&sol.coeffs) {
                    let mut full = vec![FieldElem::zero(); candidates.len()];
                    let mut acc = NCPoly::zero();
                    for (&k, x) in keep.iter().zip(row) {
                        full[k] = x.clone();
                        acc.add_scaled(&candidates[k], x);
                    }
                    ok &= acc == *t;
                    coeffs.push(full);
                }
                if ok {
                    let rank = keep.len();
                    return Ok(Solution { coeffs, rank, unique: rank == candidates.len() });
                }
            }
        }
    }
    linear_solve(targets, candidates)
}

/// Helper trait exposing the evaluation point of a prime shadow as a const.
pub trait Mark {
    const MARK: u64;
}

impl<const A: u64> Mark for Fp<A> {
    const MARK: u64 = A;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::FieldElem as F;

    fn fe(s: &str) -> F {
        F::parse(s).unwrap()
    }

    fn two_letters() -> Alphabet {
        Alphabet::new(vec!["x".into(), "y".into()], vec![vec![1, 0], vec![0, 1]], vec![], vec![], &[])
    }

    #[test]
    fn commuting_letters() {
        let a = two_letters();
        let rel = NCPoly::<F>::word(&[1, 0]).sub(&NCPoly::word(&[0, 1]));
        let rs = complete(a, vec![rel], 6).unwrap();
        assert_eq!(rs.num_rules(), 1);
        let mut red = rs.reducer();
        let nf = red.normal_form(&NCPoly::word(&[1, 0, 1, 0, 0])).unwrap();
        assert_eq!(nf, NCPoly::word(&[0, 0, 0, 1, 1]));
        assert!(rs.verify_confluence().unwrap());
    }

    #[test]
    fn v_comm_examples() {
        let a = two_letters();
        let x = NCPoly::<F>::letter(0);
        assert!(v_comm(&a, &x, &x, &F::one()).is_zero());
        let y = NCPoly::<F>::letter(1);
        let c = v_comm(&a, &x, &y, &F::v());
        assert_eq!(c.coeff(&Mono::word(&[1, 0])), fe("-v"));
        assert_eq!(c.coeff(&Mono::word(&[0, 1])), F::one());
    }

    #[test]
    fn units_commute_with_scalar() {
        // K·x = v²·x·K
        let a = Alphabet::new(vec!["x".into()], vec![vec![1]], vec!["K".into()], vec![vec![0]], &[vec![4]]);
        let k = NCPoly::<F>::units(Units::single(0, 1));
        let x = NCPoly::<F>::letter(0);
        let p = a.mul(&k, &x);
        assert_eq!(p.coeff(&Mono { w: Word::from_slice(&[0]), h: Units::single(0, 1) }), fe("v^2"));
    }

    #[test]
    fn echelon_solves() {
        let a = two_letters();
        let _ = a;
        let x = NCPoly::<F>::letter(0);
        let y = NCPoly::<F>::letter(1);
        let s = linear_solve(&[x.add(&y)], &[x.clone(), y.clone()]).unwrap();
        assert_eq!(s.coeffs[0], vec![F::one(), F::one()]);
        assert!(s.unique);
        let z = NCPoly::<F>::word(&[0, 1]);
        assert_eq!(linear_solve(&[z], &[x, y]), Err(CoreError::Unsolvable));
    }

    #[test]
    fn fast_solve_agrees() {
        let x = NCPoly::<F>::letter(0);
        let y = NCPoly::<F>::letter(1);
        let t = x.scale(&fe("v")).add(&y.scale(&fe("1/(v+1)")));
        let cands = vec![x.clone(), x.add(&y), y.scale(&fe("2")), x.scale(&fe("3"))];
        let s = linear_solve_fast(&[t.clone()], &cands).unwrap();
        let mut acc = NCPoly::zero();
        for (c, k) in cands.iter().zip(&s.coeffs[0]) {
            acc.add_scaled(c, k);
        }
        assert_eq!(acc, t);
        assert_eq!(s.rank, 2);
        assert!(!s.unique);
    }
}
