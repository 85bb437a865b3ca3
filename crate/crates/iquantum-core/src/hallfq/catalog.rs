//! Indecomposable modules of a bound ıquiver algebra over F_q, found by
//! closing under one-point extensions, plus isomorphism-class identification,
//! automorphism group orders and the reduction used in the localized Hall
//! algebra.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use hashbrown::{HashMap, HashSet};
use num_bigint::BigInt;
use num_traits::One;

use super::algebra::{
    cocycle_combo, ext_data, extension, has_finite_pd, hom_basis, hom_combo, hom_dim, hom_is_invertible,
    sub_quotient, submodules, BoundAlgebra, FqRep, Hom,
};
use super::fq::{gl_order, subspaces, Fq, Mat};
use crate::error::{CoreError, CoreResult};

/// Sorted indecomposable ids; the empty key is the zero module.
pub type ClassKey = Vec<u16>;

/// Limits on the brute-force parts of classification.
#[derive(Clone, Debug)]
pub struct CatalogOptions {
    /// Largest total dimension enumerated.
    pub max_dim: usize,
    /// Consecutive empty levels required before the list is declared complete.
    pub empty_levels: usize,
}

impl Default for CatalogOptions {
    fn default() -> Self {
        CatalogOptions { max_dim: 6, empty_levels: 1 }
    }
}

/// A q-independent description used to match indecomposables across fields.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    pub dims: Vec<usize>,
    pub top: Vec<usize>,
    pub socle: Vec<usize>,
    pub arrow_ranks: Vec<usize>,
    pub path2_ranks: Vec<usize>,
    pub dim_end: usize,
}

#[derive(Clone, Debug)]
pub struct Indec {
    pub rep: FqRep,
    pub dim_end: usize,
    /// `dim End / rad End` over F_q.
    pub d: usize,
    pub name: String,
    pub signature: Signature,
}

pub struct Catalog {
    pub alg: BoundAlgebra,
    pub f: Fq,
    pub opts: CatalogOptions,
    pub indecs: Vec<Indec>,
    /// A dimension level with no new indecomposables was reached.
    pub complete: bool,
    /// `hom[i][j] = dim Hom(X_i, X_j)`.
    hom: Vec<Vec<usize>>,
    ident: RefCell<HashMap<FqRep, ClassKey>>,
    by_dimvec: RefCell<HashMap<Vec<usize>, Vec<ClassKey>>>,
    canon: RefCell<Vec<Option<ClassKey>>>,
    e_ids: Vec<u16>,
}

/// The image of an endomorphism in `End/rad ≅ F_q` (local End assumed).
fn residue(f: &Fq, h: &Hom) -> u8 {
    match h.iter().find(|m| m.rows > 0) {
        None => 0,
        Some(m) => (0..f.q as u8)
            .find(|&l| !m.sub(f, &Mat::identity(m.rows).scale(f, l)).is_invertible(f))
            .expect("endomorphism ring is local with residue field F_q"),
    }
}

/// Multiplicity of the indecomposable `y` (with `End(y)/rad = F_q`) as a
/// direct summand of `x`: the rank of `(u, v) ↦ residue(v∘u)` on
/// `Hom(y, x) × Hom(x, y)`.
pub fn multiplicity(f: &Fq, a: &BoundAlgebra, y: &FqRep, x: &FqRep) -> usize {
    if y.dims.iter().zip(&x.dims).any(|(p, q)| p > q) {
        return 0;
    }
    let into = hom_basis(f, a, y, x);
    if into.is_empty() {
        return 0;
    }
    let back = hom_basis(f, a, x, y);
    if back.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<u8>> = into
        .iter()
        .map(|u| {
            back.iter()
                .map(|v| {
                    let comp: Hom = v.iter().zip(u).map(|(vi, ui)| vi.mul(f, ui)).collect();
                    residue(f, &comp)
                })
                .collect()
        })
        .collect();
    Mat::from_rows(&rows, back.len()).rank(f)
}

fn rank(f: &Fq, m: &Mat) -> usize {
    if m.rows == 0 || m.cols == 0 {
        0
    } else {
        m.rank(f)
    }
}

pub fn signature(f: &Fq, a: &BoundAlgebra, m: &FqRep, dim_end: usize) -> Signature {
    let top = super::algebra::top(f, a, m).iter().map(|v| v.len()).collect();
    let socle = (0..a.n)
        .map(|i| {
            let outs: Vec<usize> = (0..a.arrows.len()).filter(|&k| a.arrows[k].src == i).collect();
            if m.dims[i] == 0 {
                return 0;
            }
            let mut rows = Vec::new();
            for &k in &outs {
                for r in 0..m.maps[k].rows {
                    rows.push(m.maps[k].row(r).to_vec());
                }
            }
            if rows.is_empty() {
                m.dims[i]
            } else {
                m.dims[i] - Mat::from_rows(&rows, m.dims[i]).rank(f)
            }
        })
        .collect();
    let arrow_ranks = m.maps.iter().map(|x| rank(f, x)).collect();
    let mut path2_ranks = Vec::new();
    for (k1, a1) in a.arrows.iter().enumerate() {
        for (k2, a2) in a.arrows.iter().enumerate() {
            if a1.tgt == a2.src {
                path2_ranks.push(rank(f, &m.maps[k2].mul(f, &m.maps[k1])));
            }
        }
    }
    Signature { dims: m.dims.clone(), top, socle, arrow_ranks, path2_ranks, dim_end }
}

fn add_dims(x: &mut [usize], y: &[usize]) {
    for (a, b) in x.iter_mut().zip(y) {
        *a += b;
    }
}

/// Multisets (nondecreasing id lists) over `sizes` with total size `target`.
fn multisets_by_total(sizes: &[usize], target: usize, start: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
    if target == 0 {
        out.push(cur.clone());
        return;
    }
    for k in start..sizes.len() {
        if sizes[k] <= target {
            cur.push(k as u16);
            multisets_by_total(sizes, target - sizes[k], k, cur, out);
            cur.pop();
        }
    }
}

fn multisets_by_dimvec(dims: &[Vec<usize>], rest: &mut Vec<usize>, start: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
    if rest.iter().all(|&x| x == 0) {
        out.push(cur.clone());
        return;
    }
    for k in start..dims.len() {
        if dims[k].iter().zip(rest.iter()).all(|(a, b)| a <= b) {
            for (r, d) in rest.iter_mut().zip(&dims[k]) {
                *r -= d;
            }
            cur.push(k as u16);
            multisets_by_dimvec(dims, rest, k, cur, out);
            cur.pop();
            for (r, d) in rest.iter_mut().zip(&dims[k]) {
                *r += d;
            }
        }
    }
}

fn group(key: &[u16]) -> Vec<(u16, usize)> {
    let mut out: Vec<(u16, usize)> = Vec::new();
    for &k in key {
        match out.last_mut() {
            Some((x, m)) if *x == k => *m += 1,
            _ => out.push((k, 1)),
        }
    }
    out
}

impl Catalog {
    pub fn build(alg: &BoundAlgebra, q: u32, opts: CatalogOptions) -> CoreResult<Catalog> {
        let f = Fq::new(q)?;
        let mut cat = Catalog {
            alg: alg.clone(),
            f,
            opts,
            indecs: Vec::new(),
            complete: false,
            hom: Vec::new(),
            ident: RefCell::new(HashMap::new()),
            by_dimvec: RefCell::new(HashMap::new()),
            canon: RefCell::new(Vec::new()),
            e_ids: Vec::new(),
        };
        let simples: Vec<FqRep> = (0..alg.n).map(|i| FqRep::simple(alg, i)).collect();
        cat.push_level(simples);
        let mut empty = 0;
        for d in 2..=cat.opts.max_dim {
            let level = cat.next_level(d)?;
            if level.is_empty() {
                empty += 1;
                if empty >= cat.opts.empty_levels {
                    cat.complete = true;
                    break;
                }
                continue;
            }
            empty = 0;
            cat.push_level(level);
            if cat.indecs.iter().any(|x| x.d != 1) {
                return Err(CoreError::Other("an endomorphism ring has residue field larger than F_q".into()));
            }
        }
        cat.canon = RefCell::new(vec![None; cat.indecs.len()]);
        let mut e_ids = Vec::new();
        for i in 0..alg.n {
            let e = FqRep::e_module(alg, i);
            if e.total() > cat.opts.max_dim {
                return Err(CoreError::SizeCapExceeded("generalized simples exceed the catalog".into()));
            }
            let k = cat.identify(&e)?;
            e_ids.push(k[0]);
        }
        cat.e_ids = e_ids;
        Ok(cat)
    }

    pub fn len(&self) -> usize {
        self.indecs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indecs.is_empty()
    }

    pub fn q(&self) -> u32 {
        self.f.q
    }

    fn push_level(&mut self, reps: Vec<FqRep>) {
        let start = self.indecs.len();
        for rep in reps {
            self.indecs.push(Indec { rep, dim_end: 0, d: 0, name: String::new(), signature: Signature::default_for() });
        }
        let n = self.indecs.len();
        for row in self.hom.iter_mut() {
            row.resize(n, 0);
        }
        self.hom.resize(n, vec![0; n]);
        for i in 0..n {
            for j in 0..n {
                if i >= start || j >= start {
                    self.hom[i][j] = hom_dim(&self.f, &self.alg, &self.indecs[i].rep, &self.indecs[j].rep);
                }
            }
        }
        for k in start..n {
            let dim_end = self.hom[k][k];
            let d = self.residue_degree(k, dim_end);
            let sig = signature(&self.f, &self.alg, &self.indecs[k].rep, dim_end);
            self.indecs[k].dim_end = dim_end;
            self.indecs[k].d = d;
            self.indecs[k].signature = sig;
        }
        self.name_level(start);
    }

    /// `dim End − dim rad End`; the radical is the set of non-units.
    fn residue_degree(&self, k: usize, dim_end: usize) -> usize {
        let x = &self.indecs[k].rep;
        let basis = hom_basis(&self.f, &self.alg, x, x);
        let q = self.f.q as u64;
        let total = q.pow(dim_end as u32);
        let mut non_units = 0u64;
        let mut coeffs = vec![0u8; dim_end];
        for mut t in 0..total {
            for c in coeffs.iter_mut() {
                *c = (t % q) as u8;
                t /= q;
            }
            if !hom_is_invertible(&self.f, &hom_combo(&self.f, &basis, &coeffs)) {
                non_units += 1;
            }
        }
        let mut r = 0;
        while q.pow(r) < non_units {
            r += 1;
        }
        dim_end - r as usize
    }

    fn name_level(&mut self, start: usize) {
        let a = &self.alg;
        for k in start..self.indecs.len() {
            let rep = &self.indecs[k].rep;
            let dv = &rep.dims;
            let name = if rep.total() == 1 {
                format!("S{}", a.label(dv.iter().position(|&x| x == 1).unwrap()))
            } else if let Some(i) = (0..a.n).find(|&i| {
                let e = FqRep::e_module(a, i);
                e.dims == *dv && multiplicity(&self.f, a, rep, &e) > 0
            }) {
                format!("E{}", a.label(i))
            } else {
                let parts: Vec<String> = dv.iter().map(|d| format!("{}", d)).collect();
                format!("M({})", parts.join(","))
            };
            self.indecs[k].name = name;
        }
        // Disambiguate repeated names.
        let mut count: BTreeMap<String, usize> = BTreeMap::new();
        for x in &self.indecs {
            *count.entry(x.name.clone()).or_default() += 1;
        }
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        let mut order: Vec<usize> = (0..self.indecs.len()).collect();
        order.sort_by(|&x, &y| self.indecs[x].signature.cmp(&self.indecs[y].signature));
        for k in order {
            let base: String = self.indecs[k].name.split('#').next().unwrap().into();
            if count.get(&base).copied().unwrap_or(1) > 1 {
                let c = seen.entry(base.clone()).or_default();
                *c += 1;
                self.indecs[k].name = format!("{}#{}", base, c);
            }
        }
    }

    pub fn rep_of(&self, key: &[u16]) -> FqRep {
        let mut r = FqRep::zero(&self.alg, &vec![0; self.alg.n]);
        for &k in key {
            r = r.direct_sum(&self.indecs[k as usize].rep);
        }
        r
    }

    pub fn dims_of(&self, key: &[u16]) -> Vec<usize> {
        let mut d = vec![0; self.alg.n];
        for &k in key {
            add_dims(&mut d, &self.indecs[k as usize].rep.dims);
        }
        d
    }

    /// New indecomposables of total dimension `d`: every such module is an
    /// extension of a sum of smaller indecomposables by a simple in its socle.
    fn next_level(&self, d: usize) -> CoreResult<Vec<FqRep>> {
        let (f, a) = (&self.f, &self.alg);
        let old = self.indecs.len();
        let sizes: Vec<usize> = self.indecs.iter().map(|x| x.rep.total()).collect();
        let mut quotients = Vec::new();
        multisets_by_total(&sizes, d - 1, 0, &mut Vec::new(), &mut quotients);
        // Ext¹(X, S_i) representatives for each old indecomposable.
        let exts: Vec<Vec<Vec<Vec<Mat>>>> = (0..a.n)
            .map(|i| {
                let s = FqRep::simple(a, i);
                self.indecs.iter().map(|x| ext_data(f, a, &x.rep, &s).basis).collect()
            })
            .collect();
        let mut found: Vec<FqRep> = Vec::new();
        let mut seen: HashSet<FqRep> = HashSet::new();
        for i in 0..a.n {
            let s = FqRep::simple(a, i);
            for key in &quotients {
                let groups = group(key);
                if groups.iter().any(|&(x, m)| exts[i][x as usize].len() < m) {
                    continue;
                }
                // One m-dimensional subspace of Ext¹(X, S_i) per distinct summand.
                let choices: Vec<Vec<Mat>> =
                    groups.iter().map(|&(x, m)| subspaces(f, exts[i][x as usize].len(), m)).collect();
                let m_rep = self.rep_of(key);
                let mut idx = vec![0usize; choices.len()];
                loop {
                    let c = self.assemble(i, &groups, &choices, &idx, &exts[i], &m_rep);
                    let l = extension(&m_rep, &s, &c);
                    if seen.insert(l.clone()) {
                        self.classify(l, old, &mut found);
                    }
                    let mut k = 0;
                    loop {
                        if k == idx.len() {
                            break;
                        }
                        idx[k] += 1;
                        if idx[k] < choices[k].len() {
                            break;
                        }
                        idx[k] = 0;
                        k += 1;
                    }
                    if k == idx.len() {
                        break;
                    }
                }
            }
        }
        Ok(found)
    }

    fn assemble(
        &self,
        i: usize,
        groups: &[(u16, usize)],
        choices: &[Vec<Mat>],
        idx: &[usize],
        exts: &[Vec<Vec<Mat>>],
        m_rep: &FqRep,
    ) -> Vec<Mat> {
        let (f, a) = (&self.f, &self.alg);
        let mut blocks: Vec<Vec<Mat>> = Vec::new();
        for (g, &(x, m)) in groups.iter().enumerate() {
            let sub = &choices[g][idx[g]];
            for r in 0..m {
                blocks.push(cocycle_combo(f, &exts[x as usize], sub.row(r)));
            }
        }
        a.arrows
            .iter()
            .enumerate()
            .map(|(ai, ar)| {
                let rows = if ar.tgt == i { 1 } else { 0 };
                let mut out = Mat::zeros(rows, m_rep.dims[ar.src]);
                let mut col = 0;
                for b in &blocks {
                    let blk = &b[ai];
                    for r in 0..blk.rows {
                        for c in 0..blk.cols {
                            out.set(r, col + c, blk.get(r, c));
                        }
                    }
                    col += blk.cols;
                }
                out
            })
            .collect()
    }

    /// Keep `l` if no smaller indecomposable and no module already found at
    /// this level is a summand of it.
    fn classify(&self, l: FqRep, old: usize, found: &mut Vec<FqRep>) {
        let (f, a) = (&self.f, &self.alg);
        if (0..old).any(|y| multiplicity(f, a, &self.indecs[y].rep, &l) > 0) {
            return;
        }
        if found.iter().any(|r| r.dims == l.dims && multiplicity(f, a, r, &l) > 0) {
            return;
        }
        found.push(l);
    }

    /// All classes with dimension vector `dims`.
    pub fn classes_with_dims(&self, dims: &[usize]) -> Vec<ClassKey> {
        if let Some(v) = self.by_dimvec.borrow().get(dims) {
            return v.clone();
        }
        let all: Vec<Vec<usize>> = self.indecs.iter().map(|x| x.rep.dims.clone()).collect();
        let mut keys = Vec::new();
        multisets_by_dimvec(&all, &mut dims.to_vec(), 0, &mut Vec::new(), &mut keys);
        self.by_dimvec.borrow_mut().insert(dims.to_vec(), keys.clone());
        keys
    }

    /// The isomorphism class of `x` by Krull–Schmidt: the multiplicity of
    /// every catalogued indecomposable.
    pub fn identify(&self, x: &FqRep) -> CoreResult<ClassKey> {
        if let Some(k) = self.ident.borrow().get(x) {
            return Ok(k.clone());
        }
        let (f, a) = (&self.f, &self.alg);
        let mut key = Vec::new();
        let mut dims = vec![0usize; a.n];
        for (k, y) in self.indecs.iter().enumerate() {
            if dims == x.dims {
                break;
            }
            let m = multiplicity(f, a, &y.rep, x);
            for _ in 0..m {
                key.push(k as u16);
                add_dims(&mut dims, &y.rep.dims);
            }
        }
        if dims != x.dims {
            return Err(CoreError::SizeCapExceeded(format!("module of dimension {:?} is outside the catalog", x.dims)));
        }
        self.ident.borrow_mut().insert(x.clone(), key.clone());
        Ok(key)
    }

    /// One entry per isomorphism class with dimension vector `dims`.
    pub fn enumerate(&self, dims: &[usize]) -> Vec<ModuleClass> {
        self.classes_with_dims(dims)
            .into_iter()
            .map(|key| ModuleClass {
                rep: self.rep_of(&key),
                aut: self.aut_order(&key),
                indecomposable: key.len() == 1,
                name: self.class_name(&key),
                key,
            })
            .collect()
    }

    /// `|Aut X|` by counting invertible endomorphisms.
    pub fn aut_by_count(&self, key: &[u16]) -> CoreResult<BigInt> {
        let x = self.rep_of(key);
        let basis = hom_basis(&self.f, &self.alg, &x, &x);
        let q = self.f.q as u64;
        let total = q.checked_pow(basis.len() as u32).filter(|&t| t <= 1 << 24).ok_or_else(|| {
            CoreError::SizeCapExceeded(format!("End has dimension {}", basis.len()))
        })?;
        let mut count = 0u64;
        let mut coeffs = vec![0u8; basis.len()];
        for mut t in 0..total {
            for c in coeffs.iter_mut() {
                *c = (t % q) as u8;
                t /= q;
            }
            if hom_is_invertible(&self.f, &hom_combo(&self.f, &basis, &coeffs)) {
                count += 1;
            }
        }
        Ok(BigInt::from(count))
    }

    /// Parse `S1+M12^2+E3`-style labels.
    pub fn parse_class(&self, label: &str) -> CoreResult<ClassKey> {
        let label = label.trim();
        if label == "0" {
            return Ok(Vec::new());
        }
        let mut key = Vec::new();
        for part in label.split('+') {
            let part = part.trim();
            let (name, m) = match part.rsplit_once('^') {
                Some((n, m)) if self.indecs.iter().any(|x| x.name == n) => {
                    (n, m.parse::<usize>().map_err(|_| CoreError::Parse(format!("bad multiplicity in {}", part)))?)
                }
                _ => (part, 1),
            };
            let id = self
                .indecs
                .iter()
                .position(|x| x.name == name)
                .ok_or_else(|| CoreError::Parse(format!("unknown indecomposable {}", name)))?;
            key.extend(core::iter::repeat(id as u16).take(m));
        }
        key.sort_unstable();
        Ok(key)
    }

    /// Every endomorphism is invertible or nilpotent.
    pub fn is_local(&self, id: u16) -> bool {
        let x = &self.indecs[id as usize].rep;
        let basis = hom_basis(&self.f, &self.alg, x, x);
        let q = self.f.q as u64;
        let mut coeffs = vec![0u8; basis.len()];
        for mut t in 0..q.pow(basis.len() as u32) {
            for c in coeffs.iter_mut() {
                *c = (t % q) as u8;
                t /= q;
            }
            let h = hom_combo(&self.f, &basis, &coeffs);
            if hom_is_invertible(&self.f, &h) {
                continue;
            }
            let nilpotent = h.iter().all(|m| {
                let mut p = m.clone();
                for _ in 0..m.rows {
                    p = p.mul(&self.f, m);
                }
                p.is_zero()
            });
            if !nilpotent {
                return false;
            }
        }
        true
    }

    pub fn hom_between(&self, x: u16, y: u16) -> usize {
        self.hom[x as usize][y as usize]
    }

    pub fn dim_end(&self, key: &[u16]) -> usize {
        key.iter().map(|&x| key.iter().map(|&y| self.hom_between(x, y)).sum::<usize>()).sum()
    }

    /// `|Aut X| = q^{dim End − Σ m² d} · Π |GL_m(F_{q^d})|`.
    pub fn aut_order(&self, key: &[u16]) -> BigInt {
        let q = self.f.q as u128;
        let groups = group(key);
        let semisimple: usize = groups.iter().map(|&(x, m)| m * m * self.indecs[x as usize].d).sum();
        let mut out = BigInt::from(q).pow((self.dim_end(key) - semisimple) as u32);
        for &(x, m) in &groups {
            let d = self.indecs[x as usize].d as u32;
            out *= BigInt::from(gl_order(q.pow(d), m as u32));
        }
        out
    }

    pub fn class_name(&self, key: &[u16]) -> String {
        if key.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = group(key)
            .iter()
            .map(|&(x, m)| {
                let n = &self.indecs[x as usize].name;
                if m > 1 {
                    format!("{}^{}", n, m)
                } else {
                    n.clone()
                }
            })
            .collect();
        parts.join("+")
    }

    /// Class key as a q-independent multiset of signatures.
    pub fn class_signature(&self, key: &[u16]) -> Vec<Signature> {
        let mut v: Vec<Signature> = key.iter().map(|&k| self.indecs[k as usize].signature.clone()).collect();
        v.sort();
        v
    }

    pub fn signatures_unique(&self) -> bool {
        let s: HashSet<&Signature> = self.indecs.iter().map(|x| &x.signature).collect();
        s.len() == self.indecs.len()
    }

    pub fn e_id(&self, i: usize) -> u16 {
        self.e_ids[i]
    }

    pub fn is_e(&self, id: u16) -> Option<usize> {
        self.e_ids.iter().position(|&e| e == id)
    }

    pub fn is_kq(&self, id: u16) -> bool {
        self.indecs[id as usize].rep.is_kq(&self.alg)
    }

    pub fn merge(a: &[u16], b: &[u16]) -> ClassKey {
        let mut v: ClassKey = a.iter().chain(b).copied().collect();
        v.sort_unstable();
        v
    }

    /// Reduce a class to `Z ⊕ 𝔼^h` (Z a kQ-module) by repeatedly splitting
    /// off submodules or quotients of finite projective dimension.
    pub fn canonical(&self, key: &[u16]) -> CoreResult<ClassKey> {
        let mut out = Vec::new();
        for &x in key {
            let c = self.canonical_indec(x)?;
            out.extend(c);
        }
        out.sort_unstable();
        Ok(out)
    }

    fn canonical_indec(&self, x: u16) -> CoreResult<ClassKey> {
        if let Some(c) = &self.canon.borrow()[x as usize] {
            return Ok(c.clone());
        }
        let c = if self.is_kq(x) || self.is_e(x).is_some() {
            vec![x]
        } else {
            let (sub, quo) = self.split_finite_pd(x)?.ok_or_else(|| {
                CoreError::Other(format!("{} has no split of finite projective dimension", self.indecs[x as usize].name))
            })?;
            let ks = self.identify(&sub)?;
            let kq = self.identify(&quo)?;
            Catalog::merge(&self.canonical(&ks)?, &self.canonical(&kq)?)
        };
        self.canon.borrow_mut()[x as usize] = Some(c.clone());
        Ok(c)
    }

    /// A proper submodule `U` with `U` or `X/U` of finite projective dimension.
    fn split_finite_pd(&self, x: u16) -> CoreResult<Option<(FqRep, FqRep)>> {
        Ok(self.finite_pd_splits(x, true)?.into_iter().next())
    }

    /// All (or the first) splits `0 → U → X → X/U → 0` with an end in `P^{<∞}`.
    pub fn finite_pd_splits(&self, x: u16, first_only: bool) -> CoreResult<Vec<(FqRep, FqRep)>> {
        let (f, a) = (&self.f, &self.alg);
        let rep = &self.indecs[x as usize].rep;
        let mut out = Vec::new();
        let mut e = vec![0usize; a.n];
        loop {
            let mut k = 0;
            loop {
                if k == a.n {
                    return Ok(out);
                }
                if e[k] < rep.dims[k] {
                    e[k] += 1;
                    break;
                }
                e[k] = 0;
                k += 1;
            }
            if e == rep.dims {
                continue;
            }
            for u in submodules(f, a, rep, &e) {
                let (s, q) = sub_quotient(f, a, rep, &u);
                if has_finite_pd(f, a, &s) || has_finite_pd(f, a, &q) {
                    out.push((s, q));
                    if first_only {
                        return Ok(out);
                    }
                }
            }
        }
    }

    /// Every split gives the same canonical class.
    pub fn canonical_is_well_defined(&self, x: u16) -> CoreResult<bool> {
        let want = self.canonical_indec(x)?;
        if self.is_kq(x) || self.is_e(x).is_some() {
            return Ok(true);
        }
        for (s, q) in self.finite_pd_splits(x, false)? {
            let c = Catalog::merge(&self.canonical(&self.identify(&s)?)?, &self.canonical(&self.identify(&q)?)?);
            if c != want {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `(kQ part, 𝔼 multiplicities)` of a canonical class.
    pub fn split_canonical(&self, key: &[u16]) -> (ClassKey, Vec<u32>) {
        let mut z = Vec::new();
        let mut h = vec![0u32; self.alg.n];
        for &k in key {
            match self.is_e(k) {
                Some(i) if !self.is_kq(k) => h[i] += 1,
                _ => z.push(k),
            }
        }
        (z, h)
    }

    /// `|Hom(M, N)| ` and `|Ext¹(M, N)|` exponents for classes.
    pub fn hom_ext_dims(&self, m: &[u16], n: &[u16]) -> (usize, usize) {
        let e = ext_data(&self.f, &self.alg, &self.rep_of(m), &self.rep_of(n));
        (e.hom_dim, e.basis.len())
    }

    pub fn big_q(&self) -> BigInt {
        BigInt::from(self.f.q)
    }

    pub fn one() -> BigInt {
        BigInt::one()
    }
}

/// An isomorphism class with its representative and automorphism count.
#[derive(Clone, Debug)]
pub struct ModuleClass {
    pub key: ClassKey,
    pub name: String,
    pub rep: FqRep,
    pub aut: BigInt,
    pub indecomposable: bool,
}

/// Indecomposables of `alg` over F_q, each checked to have a local
/// endomorphism ring; also whether the enumeration reached an empty level.
pub fn count_indecomposables(alg: &BoundAlgebra, q: u32, opts: CatalogOptions) -> CoreResult<(usize, bool)> {
    let cat = Catalog::build(alg, q, opts)?;
    if let Some(x) = (0..cat.len() as u16).find(|&x| !cat.is_local(x)) {
        return Err(CoreError::Other(format!("{} has a non-local endomorphism ring", cat.indecs[x as usize].name)));
    }
    Ok((cat.len(), cat.complete))
}

impl Signature {
    fn default_for() -> Self {
        Signature {
            dims: Vec::new(),
            top: Vec::new(),
            socle: Vec::new(),
            arrow_ranks: Vec::new(),
            path2_ranks: Vec::new(),
            dim_end: 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hallfq::algebra::build_bound_algebra;
    use crate::rootdata::{build, DiagramKind, DiagramSpec};

    fn cat(kind: DiagramKind, n: usize, quasi: bool, q: u32) -> Catalog {
        let spec = if quasi { DiagramSpec::quasi_split(kind, n) } else { DiagramSpec::split(kind, n) };
        let a = build_bound_algebra(&build(&spec).unwrap(), 3).unwrap();
        Catalog::build(&a, q, CatalogOptions { max_dim: 12, empty_levels: 1 }).unwrap()
    }

    #[test]
    fn a1_split() {
        let c = cat(DiagramKind::A, 1, false, 2);
        assert!(c.complete);
        assert_eq!(c.len(), 2);
        let s = c.identify(&FqRep::simple(&c.alg, 0)).unwrap();
        assert_eq!(c.aut_order(&s), BigInt::from(1));
        // d = (2): S ⊕ S and 𝔼.
        assert_eq!(c.classes_with_dims(&[2]).len(), 2);
        let e = vec![c.e_id(0)];
        // Aut(k[ε]/ε²) = units of a local ring of dimension 2.
        assert_eq!(c.aut_order(&e), BigInt::from(2));
        assert_eq!(c.aut_order(&[s[0], s[0]]), BigInt::from(6));
    }

    #[test]
    fn a2_split_has_nine() {
        let c = cat(DiagramKind::A, 2, false, 2);
        assert!(c.complete);
        assert_eq!(c.len(), 9);
        assert!(c.signatures_unique());
    }

    #[test]
    fn a2_split_counts_agree_at_three() {
        let c = cat(DiagramKind::A, 2, false, 3);
        assert_eq!(c.len(), 9);
    }

    #[test]
    fn canonical_forms_a2() {
        let c = cat(DiagramKind::A, 2, false, 2);
        for x in 0..c.len() as u16 {
            assert!(c.canonical_is_well_defined(x).unwrap());
            let k = c.canonical(&[x]).unwrap();
            assert!(k.iter().all(|&y| c.is_kq(y) || c.is_e(y).is_some()));
        }
    }

    #[test]
    fn a3_quasi_split_has_forty_two() {
        let c = cat(DiagramKind::A, 3, true, 2);
        assert!(c.complete);
        assert_eq!(c.len(), 42);
        // No indecomposables reappear after the first empty level.
        let a = c.alg.clone();
        let wide = Catalog::build(&a, 2, CatalogOptions { max_dim: 15, empty_levels: 3 }).unwrap();
        assert_eq!(wide.len(), 42);
        assert!(c.signatures_unique());
    }

    #[test]
    fn aut_formula_matches_counting() {
        let c = cat(DiagramKind::A, 2, false, 2);
        for d in [[1usize, 1], [2, 0], [0, 2], [2, 1], [1, 2], [3, 0]] {
            for m in c.enumerate(&d) {
                assert_eq!(m.aut, c.aut_by_count(&m.key).unwrap(), "{}", m.name);
            }
        }
    }

    #[test]
    fn mass_formula_a2() {
        // Σ_classes 1/|Aut X| = |Rep(d)| / |GL(d)|, with Rep(d) enumerated by brute force.
        let c = cat(DiagramKind::A, 2, false, 2);
        let a = &c.alg;
        for d in [[1usize, 1], [2, 0], [2, 1], [1, 2], [0, 3], [2, 2]] {
            let mut orbits: BTreeMap<ClassKey, u64> = BTreeMap::new();
            let shapes: Vec<(usize, usize)> = a.arrows.iter().map(|ar| (d[ar.tgt], d[ar.src])).collect();
            let entries: usize = shapes.iter().map(|(r, k)| r * k).sum();
            let mut reps = 0u64;
            for t in 0..(1u64 << entries) {
                let mut bit = 0;
                let maps = shapes
                    .iter()
                    .map(|&(r, k)| {
                        let mut m = Mat::zeros(r, k);
                        for i in 0..r {
                            for j in 0..k {
                                m.set(i, j, ((t >> bit) & 1) as u8);
                                bit += 1;
                            }
                        }
                        m
                    })
                    .collect();
                let r = FqRep { dims: d.to_vec(), maps };
                if r.satisfies_relations(&c.f, a) {
                    reps += 1;
                    *orbits.entry(c.identify(&r).unwrap()).or_default() += 1;
                }
            }
            let gl: u128 = d.iter().map(|&k| gl_order(2, k as u32)).product();
            // Each class is one GL(d)-orbit of size |GL(d)|/|Aut X|.
            let keys: Vec<ClassKey> = orbits.keys().cloned().collect();
            let mut want = c.classes_with_dims(&d);
            want.sort();
            assert_eq!(keys, want, "d = {:?}", d);
            for (k, n) in &orbits {
                assert_eq!(BigInt::from(*n) * c.aut_order(k), BigInt::from(gl), "orbit of {}", c.class_name(k));
            }
            let mut lhs = num_rational::BigRational::from_integer(0.into());
            for m in c.enumerate(&d) {
                lhs += num_rational::BigRational::new(1.into(), m.aut);
            }
            assert_eq!(lhs, num_rational::BigRational::new(reps.into(), gl.into()), "d = {:?}", d);
        }
    }

    #[test]
    fn local_endomorphisms_and_counts() {
        let c = cat(DiagramKind::A, 2, false, 2);
        assert!((0..c.len() as u16).all(|x| c.is_local(x)));
        let a = c.alg.clone();
        assert_eq!(count_indecomposables(&a, 3, CatalogOptions { max_dim: 8, empty_levels: 1 }).unwrap(), (9, true));
    }

    #[test]
    fn class_labels_round_trip() {
        let c = cat(DiagramKind::A, 2, false, 2);
        for d in [[2usize, 1], [1, 2]] {
            for m in c.enumerate(&d) {
                assert_eq!(c.parse_class(&m.name).unwrap(), m.key);
            }
        }
    }
}
