//! Dynkin ıquivers: diagram, orientation, involution, roots and the two Weyl
//! groups acting on them by permutations.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};

use crate::error::{CoreError, CoreResult};

pub type Root = Vec<i32>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiagramKind {
    A,
    D,
    E,
}

/// How τ is chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TauChoice {
    Identity,
    /// The nontrivial diagram involution of A_{2r+1}, D_n or E6.
    Diagram,
    /// Explicit images, 0-based.
    Explicit(Vec<usize>),
}

/// Input to [`build`].
#[derive(Clone, Debug)]
pub struct DiagramSpec {
    pub kind: DiagramKind,
    pub rank: usize,
    pub tau: TauChoice,
    /// Arrows `(source, target)`, 0-based; `None` picks the default orientation.
    pub orientation: Option<Vec<(usize, usize)>>,
    /// Label the A_{2r+1} quasi-split nodes r, …, 0, …, −r instead of 1..n.
    pub symmetric_labels: bool,
}

impl DiagramSpec {
    pub fn new(kind: DiagramKind, rank: usize, tau: TauChoice) -> Self {
        DiagramSpec { kind, rank, tau, orientation: None, symmetric_labels: false }
    }

    pub fn split(kind: DiagramKind, rank: usize) -> Self {
        Self::new(kind, rank, TauChoice::Identity)
    }

    pub fn quasi_split(kind: DiagramKind, rank: usize) -> Self {
        Self::new(kind, rank, TauChoice::Diagram)
    }

    pub fn with_orientation(mut self, arrows: Vec<(usize, usize)>) -> Self {
        self.orientation = Some(arrows);
        self
    }

    pub fn name(&self) -> String {
        format!("{:?}{}", self.kind, self.rank)
    }
}

/// Unoriented diagram edges in the built-in labelings.
pub fn diagram_edges(kind: DiagramKind, n: usize) -> CoreResult<Vec<(usize, usize)>> {
    let bad = || CoreError::UnsupportedDiagram(format!("{:?}{}", kind, n));
    Ok(match kind {
        DiagramKind::A => {
            if n == 0 {
                return Err(bad());
            }
            (0..n - 1).map(|k| (k, k + 1)).collect()
        }
        DiagramKind::D => {
            if n < 4 {
                return Err(bad());
            }
            let mut e: Vec<_> = (0..n - 2).map(|k| (k, k + 1)).collect();
            e.push((n - 3, n - 1));
            e
        }
        DiagramKind::E => match n {
            // 1-2-3-5-6 with 4 hanging off 3.
            6 => vec![(0, 1), (1, 2), (2, 4), (4, 5), (2, 3)],
            // Bourbaki: 1-3-4-5-6-7(-8), 2-4.
            7 | 8 => {
                let mut e = vec![(0, 2), (1, 3), (2, 3)];
                for k in 3..n - 1 {
                    e.push((k, k + 1));
                }
                e
            }
            _ => return Err(bad()),
        },
    })
}

fn diagram_tau(kind: DiagramKind, n: usize) -> CoreResult<Vec<usize>> {
    match kind {
        DiagramKind::A if n >= 2 => Ok((0..n).map(|k| n - 1 - k).collect()),
        DiagramKind::D => {
            let mut t: Vec<usize> = (0..n).collect();
            t.swap(n - 2, n - 1);
            Ok(t)
        }
        DiagramKind::E if n == 6 => Ok(vec![5, 4, 2, 3, 1, 0]),
        _ => Err(CoreError::InvalidInvolution(format!(
            "{:?}{} has no nontrivial diagram involution",
            kind, n
        ))),
    }
}

fn default_orientation(kind: DiagramKind, n: usize, tau: &[usize], edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let quasi = tau.iter().enumerate().any(|(i, &t)| i != t);
    match kind {
        DiagramKind::A if quasi => {
            // Centre outwards: 1 ← 2 → 3 for A3.
            let r = (n - 1) / 2;
            edges
                .iter()
                .map(|&(a, b)| if b <= r { (b, a) } else { (a, b) })
                .collect()
        }
        DiagramKind::E if n == 6 => vec![(1, 0), (2, 1), (2, 4), (4, 5), (2, 3)],
        _ => edges.iter().map(|&(a, b)| (b, a)).collect(),
    }
}

/// A Weyl group element as a permutation of the root set (positives first,
/// then their negatives in the same order).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Perm(pub Vec<u32>);

impl Perm {
    pub fn identity(m: usize) -> Self {
        Perm((0..m as u32).collect())
    }

    /// `(self ∘ other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut out = vec![0u32; self.0.len()];
        for (k, &x) in self.0.iter().enumerate() {
            out[x as usize] = k as u32;
        }
        Perm(out)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(k, &x)| k as u32 == x)
    }

    pub fn order(&self) -> u32 {
        let mut p = self.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = self.compose(&p);
            k += 1;
        }
        k
    }
}

#[derive(Clone, Debug)]
pub struct RootSystem {
    pub rank: usize,
    /// Positive roots ordered by height, then lexicographically.
    pub positive: Vec<Root>,
    index: HashMap<Root, u32>,
    /// `s_i` as permutations.
    pub simple: Vec<Perm>,
}

impl RootSystem {
    pub fn from_cartan(cartan: &[Vec<i32>]) -> RootSystem {
        let n = cartan.len();
        let reflect = |i: usize, r: &Root| -> Root {
            let p: i32 = (0..n).map(|j| cartan[i][j] * r[j]).sum();
            let mut s = r.clone();
            s[i] -= p;
            s
        };
        let mut seen: BTreeSet<Root> = BTreeSet::new();
        let mut queue: VecDeque<Root> = VecDeque::new();
        for i in 0..n {
            let mut a = vec![0; n];
            a[i] = 1;
            seen.insert(a.clone());
            queue.push_back(a);
        }
        while let Some(r) = queue.pop_front() {
            for i in 0..n {
                let s = reflect(i, &r);
                if seen.insert(s.clone()) {
                    queue.push_back(s);
                }
            }
        }
        let mut positive: Vec<Root> = seen.into_iter().filter(|r| r.iter().all(|&x| x >= 0)).collect();
        positive.sort_by(|a, b| {
            let (ha, hb): (i32, i32) = (a.iter().sum(), b.iter().sum());
            ha.cmp(&hb).then_with(|| b.cmp(a))
        });
        let npos = positive.len();
        let mut index = HashMap::new();
        for (k, r) in positive.iter().enumerate() {
            index.insert(r.clone(), k as u32);
            index.insert(r.iter().map(|x| -x).collect(), (k + npos) as u32);
        }
        let mut rs = RootSystem { rank: n, positive, index, simple: Vec::new() };
        let simple = (0..n)
            .map(|i| Perm((0..2 * npos).map(|k| rs.index_of(&reflect(i, &rs.root(k))).unwrap()).collect()))
            .collect();
        rs.simple = simple;
        rs
    }

    pub fn num_positive(&self) -> usize {
        self.positive.len()
    }

    pub fn num_roots(&self) -> usize {
        2 * self.positive.len()
    }

    /// Root with index `k` (negatives at `k ≥ N`).
    pub fn root(&self, k: usize) -> Root {
        let n = self.positive.len();
        if k < n {
            self.positive[k].clone()
        } else {
            self.positive[k - n].iter().map(|x| -x).collect()
        }
    }

    pub fn index_of(&self, r: &[i32]) -> Option<u32> {
        self.index.get(r).copied()
    }

    pub fn is_positive_index(&self, k: u32) -> bool {
        (k as usize) < self.positive.len()
    }

    pub fn simple_index(&self, i: usize) -> u32 {
        let mut a = vec![0; self.rank];
        a[i] = 1;
        self.index_of(&a).unwrap()
    }

    /// Apply a permutation to a root vector.
    pub fn apply(&self, w: &Perm, r: &[i32]) -> Option<Root> {
        self.index_of(r).map(|k| self.root(w.0[k as usize] as usize))
    }

    /// Does `w` send every positive root to a negative one?
    pub fn is_longest(&self, w: &Perm) -> bool {
        (0..self.positive.len()).all(|k| !self.is_positive_index(w.0[k]))
    }
}

/// Generated Coxeter group data for the bs-reflections.
#[derive(Clone, Debug)]
pub struct RestrictedWeyl {
    pub reps: Vec<usize>,
    pub gens: Vec<Perm>,
    /// Indexed by position in `reps`.
    pub coxeter: Vec<Vec<u32>>,
    pub type_label: String,
    /// Order from the classification of the detected type.
    pub order: u64,
}

impl RestrictedWeyl {
    pub fn m(&self, i: usize, j: usize) -> u32 {
        let a = self.reps.iter().position(|&x| x == i).unwrap();
        let b = self.reps.iter().position(|&x| x == j).unwrap();
        self.coxeter[a][b]
    }

    /// Enumerate the group; `None` beyond `limit` elements.
    pub fn enumerate_order(&self, limit: usize) -> Option<u64> {
        let m = self.gens.first().map(|g| g.0.len())?;
        let id = Perm::identity(m);
        let mut seen: HashSet<Perm> = HashSet::new();
        seen.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        while let Some(w) = queue.pop_front() {
            for g in &self.gens {
                let x = g.compose(&w);
                if seen.insert(x.clone()) {
                    if seen.len() > limit {
                        return None;
                    }
                    queue.push_back(x);
                }
            }
        }
        Some(seen.len() as u64)
    }
}

/// A Dynkin ıquiver together with its root data.
#[derive(Clone, Debug)]
pub struct IQuiver {
    pub name: String,
    pub kind: DiagramKind,
    pub n: usize,
    pub labels: Vec<String>,
    pub edges: Vec<(usize, usize)>,
    /// Arrows `(source, target)`.
    pub arrows: Vec<(usize, usize)>,
    pub tau: Vec<usize>,
    /// 𝕀_τ: the smallest index of every τ-orbit, ascending.
    pub reps: Vec<usize>,
    pub cartan: Vec<Vec<i32>>,
    pub roots: RootSystem,
    pub weyl: RestrictedWeyl,
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

fn coxeter_order(label: &str) -> u64 {
    let mut total = 1u64;
    for part in label.split('x') {
        let (t, k) = part.split_at(1);
        let k: u64 = k.parse().unwrap_or(0);
        total *= match t {
            "A" => factorial(k + 1),
            "B" => (1u64 << k) * factorial(k),
            "D" => (1u64 << (k - 1)) * factorial(k),
            "E" => match k {
                6 => 51_840,
                7 => 2_903_040,
                _ => 696_729_600,
            },
            "F" => 1152,
            "G" => 12,
            _ => 0,
        };
    }
    total
}

/// Name the finite Coxeter type of a Coxeter matrix (components joined by `x`).
pub fn classify_coxeter(m: &[Vec<u32>]) -> String {
    let n = m.len();
    let mut comp = vec![usize::MAX; n];
    let mut parts: Vec<String> = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut nodes = vec![s];
        comp[s] = s;
        let mut k = 0;
        while k < nodes.len() {
            let a = nodes[k];
            for b in 0..n {
                if b != a && m[a][b] > 2 && comp[b] == usize::MAX {
                    comp[b] = s;
                    nodes.push(b);
                }
            }
            k += 1;
        }
        parts.push(classify_component(m, &nodes));
    }
    parts.sort();
    parts.join("x")
}

fn classify_component(m: &[Vec<u32>], nodes: &[usize]) -> String {
    let r = nodes.len();
    if r == 1 {
        return "A1".into();
    }
    let nb = |a: usize| nodes.iter().copied().filter(move |&b| b != a && m[a][b] > 2);
    let edges: Vec<(usize, usize, u32)> = nodes
        .iter()
        .flat_map(|&a| nb(a).filter(move |&b| b > a).map(move |b| (a, b, m[a][b])))
        .collect();
    let degs: Vec<usize> = nodes.iter().map(|&a| nb(a).count()).collect();
    let heavy: Vec<_> = edges.iter().filter(|e| e.2 > 3).collect();
    if edges.len() != r - 1 {
        return "?".into();
    }
    if let Some(&&(a, b, w)) = heavy.first() {
        if heavy.len() > 1 || degs.iter().any(|&d| d > 2) {
            return "?".into();
        }
        let end = |x: usize| nb(x).count() == 1;
        return match w {
            4 if end(a) || end(b) => format!("B{}", r),
            4 if r == 4 => "F4".into(),
            6 if r == 2 => "G2".into(),
            _ => "?".into(),
        };
    }
    let branch: Vec<usize> = nodes.iter().copied().filter(|&a| nb(a).count() == 3).collect();
    match branch.len() {
        0 => format!("A{}", r),
        1 => {
            let c = branch[0];
            let mut legs: Vec<usize> = nb(c)
                .map(|start| {
                    let (mut prev, mut cur, mut len) = (c, start, 1);
                    loop {
                        let next: Vec<usize> = nb(cur).filter(|&x| x != prev).collect();
                        if next.is_empty() {
                            break len;
                        }
                        prev = cur;
                        cur = next[0];
                        len += 1;
                    }
                })
                .collect();
            legs.sort();
            match (legs[0], legs[1], legs[2]) {
                (1, 1, _) => format!("D{}", r),
                (1, 2, 2) => "E6".into(),
                (1, 2, 3) => "E7".into(),
                (1, 2, 4) => "E8".into(),
                _ => "?".into(),
            }
        }
        _ => "?".into(),
    }
}

fn check_acyclic(n: usize, arrows: &[(usize, usize)]) -> bool {
    let mut indeg = vec![0usize; n];
    for &(_, t) in arrows {
        indeg[t] += 1;
    }
    let mut stack: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut seen = 0;
    while let Some(a) = stack.pop() {
        seen += 1;
        for &(s, t) in arrows {
            if s == a {
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    stack.push(t);
                }
            }
        }
    }
    seen == n
}

/// Build an ıquiver from one of the standard diagrams.
pub fn build(spec: &DiagramSpec) -> CoreResult<IQuiver> {
    let n = spec.rank;
    let edges = diagram_edges(spec.kind, n)?;
    let tau = match &spec.tau {
        TauChoice::Identity => (0..n).collect(),
        TauChoice::Diagram => diagram_tau(spec.kind, n)?,
        TauChoice::Explicit(t) => t.clone(),
    };
    let arrows = match &spec.orientation {
        Some(a) => a.clone(),
        None => default_orientation(spec.kind, n, &tau, &edges),
    };
    let labels = if spec.symmetric_labels && spec.kind == DiagramKind::A && n % 2 == 1 && tau[0] != 0 {
        let r = (n - 1) as i64 / 2;
        (0..n as i64).map(|k| (r - k).to_string()).collect()
    } else {
        (1..=n).map(|k| k.to_string()).collect()
    };
    build_custom(&spec.name(), spec.kind, labels, edges, arrows, tau)
}

/// Build from explicit data (0-based indices).
pub fn build_custom(
    name: &str,
    kind: DiagramKind,
    labels: Vec<String>,
    edges: Vec<(usize, usize)>,
    arrows: Vec<(usize, usize)>,
    tau: Vec<usize>,
) -> CoreResult<IQuiver> {
    let n = labels.len();
    if tau.len() != n || tau.iter().any(|&t| t >= n) || (0..n).any(|i| tau[tau[i]] != i) {
        return Err(CoreError::InvalidInvolution("τ is not an involution of the node set".into()));
    }
    let has_edge = |a: usize, b: usize| edges.iter().any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a));
    for &(a, b) in &edges {
        if !has_edge(tau[a], tau[b]) {
            return Err(CoreError::InvalidInvolution(format!(
                "τ does not preserve the edge {}-{}",
                labels[a], labels[b]
            )));
        }
    }
    for i in 0..n {
        if tau[i] != i && has_edge(i, tau[i]) {
            return Err(CoreError::InvalidInvolution(format!(
                "c(i,τi) ≠ 0 at node {}",
                labels[i]
            )));
        }
    }
    if arrows.len() != edges.len() {
        return Err(CoreError::InvalidOrientation("need exactly one arrow per edge".into()));
    }
    let mut covered = BTreeSet::new();
    for &(s, t) in &arrows {
        if s >= n || t >= n || !has_edge(s, t) || !covered.insert((s.min(t), s.max(t))) {
            return Err(CoreError::InvalidOrientation(format!("bad arrow {}->{}", s + 1, t + 1)));
        }
    }
    if !check_acyclic(n, &arrows) {
        return Err(CoreError::InvalidOrientation("orientation has a cycle".into()));
    }
    for &(s, t) in &arrows {
        if !arrows.contains(&(tau[s], tau[t])) {
            return Err(CoreError::InvalidOrientation(format!(
                "orientation is not τ-stable at {}->{}",
                labels[s], labels[t]
            )));
        }
    }
    let mut cartan = vec![vec![0i32; n]; n];
    for i in 0..n {
        cartan[i][i] = 2;
    }
    for &(a, b) in &edges {
        cartan[a][b] = -1;
        cartan[b][a] = -1;
    }
    let roots = RootSystem::from_cartan(&cartan);
    let reps: Vec<usize> = (0..n).filter(|&i| i <= tau[i]).collect();
    let gens: Vec<Perm> = reps
        .iter()
        .map(|&i| {
            if tau[i] == i {
                roots.simple[i].clone()
            } else {
                roots.simple[i].compose(&roots.simple[tau[i]])
            }
        })
        .collect();
    let coxeter: Vec<Vec<u32>> = gens
        .iter()
        .map(|a| gens.iter().map(|b| a.compose(b).order()).collect())
        .collect();
    let type_label = classify_coxeter(&coxeter);
    let order = coxeter_order(&type_label);
    let weyl = RestrictedWeyl { reps: reps.clone(), gens, coxeter, type_label, order };
    Ok(IQuiver { name: name.to_string(), kind, n, labels, edges, arrows, tau, reps, cartan, roots, weyl })
}

impl IQuiver {
    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn node(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label.trim())
    }

    pub fn is_split(&self) -> bool {
        self.tau.iter().enumerate().all(|(i, &t)| i == t)
    }

    pub fn is_rep(&self, i: usize) -> bool {
        self.reps.contains(&i)
    }

    pub fn fixed(&self, i: usize) -> bool {
        self.tau[i] == i
    }

    pub fn c(&self, i: usize, j: usize) -> i32 {
        self.cartan[i][j]
    }

    pub fn simple_root(&self, i: usize) -> Root {
        let mut a = vec![0; self.n];
        a[i] = 1;
        a
    }

    pub fn s_apply(&self, i: usize, a: &[i32]) -> Root {
        let p: i32 = (0..self.n).map(|j| self.cartan[i][j] * a[j]).sum();
        let mut s = a.to_vec();
        s[i] -= p;
        s
    }

    /// `bs_i = s_i` if `τi = i`, else `s_i s_{τi}`.
    pub fn bs_apply(&self, i: usize, a: &[i32]) -> Root {
        if self.tau[i] == i {
            self.s_apply(i, a)
        } else {
            self.s_apply(i, &self.s_apply(self.tau[i], a))
        }
    }

    pub fn bs_perm(&self, i: usize) -> &Perm {
        let k = self.reps.iter().position(|&x| x == i).expect("bs_i needs a representative");
        &self.weyl.gens[k]
    }

    pub fn tau_root(&self, a: &[i32]) -> Root {
        let mut t = vec![0; self.n];
        for i in 0..self.n {
            t[self.tau[i]] = a[i];
        }
        t
    }

    /// τ acting on the root set.
    pub fn tau_perm(&self) -> Perm {
        Perm((0..self.roots.num_roots())
            .map(|k| self.roots.index_of(&self.tau_root(&self.roots.root(k))).unwrap())
            .collect())
    }

    pub fn is_sink(&self, i: usize) -> bool {
        !self.arrows.iter().any(|&(s, _)| s == i)
    }

    pub fn sinks(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.is_sink(i)).collect()
    }

    /// Reverse every arrow into `ℓ` and `τℓ`.
    pub fn reflect(&self, l: usize) -> CoreResult<IQuiver> {
        if !self.is_sink(l) {
            return Err(CoreError::NotASink(self.labels[l].clone()));
        }
        let set = [l, self.tau[l]];
        let arrows = self
            .arrows
            .iter()
            .map(|&(s, t)| if set.contains(&t) { (t, s) } else { (s, t) })
            .collect();
        Ok(IQuiver { arrows, ..self.clone() })
    }

    /// Ordinary reflection at one sink (τ ignored); used for (+)-admissible sequences.
    pub fn reflect_plain(&self, l: usize) -> CoreResult<Vec<(usize, usize)>> {
        if !self.is_sink(l) {
            return Err(CoreError::NotASink(self.labels[l].clone()));
        }
        Ok(self.arrows.iter().map(|&(s, t)| if t == l { (t, s) } else { (s, t) }).collect())
    }

    /// `⟨α,β⟩_Q = Σ α_iβ_i − Σ_{i→j} α_iβ_j`.
    pub fn euler(&self, a: &[i32], b: &[i32]) -> i32 {
        let d: i32 = (0..self.n).map(|i| a[i] * b[i]).sum();
        d - self.arrows.iter().map(|&(s, t)| a[s] * b[t]).sum::<i32>()
    }

    pub fn sym_euler(&self, a: &[i32], b: &[i32]) -> i32 {
        self.euler(a, b) + self.euler(b, a)
    }

    /// Arrows as a readable string, e.g. `1<-2,2->3`.
    pub fn orientation_string(&self) -> String {
        let mut parts = Vec::new();
        for &(a, b) in &self.edges {
            let arrow = if self.arrows.contains(&(a, b)) { "->" } else { "<-" };
            parts.push(format!("{}{}{}", self.labels[a], arrow, self.labels[b]));
        }
        parts.join(",")
    }

    /// τ as `label->label` pairs for the nontrivial orbits.
    pub fn tau_string(&self) -> String {
        if self.is_split() {
            return "id".into();
        }
        let mut parts = Vec::new();
        for &i in &self.reps {
            if self.tau[i] != i {
                parts.push(format!("{}<->{}", self.labels[i], self.labels[self.tau[i]]));
            }
        }
        parts.join(",")
    }

    /// Parse `1<-2,2->3` (or `1->2`) into arrows over this diagram's labels.
    pub fn parse_orientation(&self, s: &str) -> CoreResult<Vec<(usize, usize)>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (a, b, fwd) = if let Some((a, b)) = part.split_once("->") {
                (a, b, true)
            } else if let Some((a, b)) = part.split_once("<-") {
                (a, b, false)
            } else {
                return Err(CoreError::InvalidOrientation(format!("cannot read '{}'", part)));
            };
            let ia = self.node(a).ok_or_else(|| CoreError::InvalidOrientation(format!("unknown node '{}'", a)))?;
            let ib = self.node(b).ok_or_else(|| CoreError::InvalidOrientation(format!("unknown node '{}'", b)))?;
            out.push(if fwd { (ia, ib) } else { (ib, ia) });
        }
        Ok(out)
    }

    /// Root written as `a1+a2` style text using labels.
    pub fn root_string(&self, r: &[i32]) -> String {
        let mut s = String::new();
        for (i, &c) in r.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !s.is_empty() || c < 0 {
                s.push_str(if c < 0 { "-" } else { "+" });
            }
            if c.abs() != 1 {
                s.push_str(&format!("{}", c.abs()));
            }
            s.push_str(&format!("a{}", self.labels[i]));
        }
        if s.is_empty() {
            "0".into()
        } else {
            s
        }
    }

    /// Euler-form values on simples: `⟨α_i, α_j⟩_Q`.
    pub fn euler_table(&self) -> BTreeMap<(usize, usize), i32> {
        let mut m = BTreeMap::new();
        for i in 0..self.n {
            for j in 0..self.n {
                m.insert((i, j), self.euler(&self.simple_root(i), &self.simple_root(j)));
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(kind: DiagramKind, n: usize, quasi: bool) -> IQuiver {
        let spec = if quasi { DiagramSpec::quasi_split(kind, n) } else { DiagramSpec::split(kind, n) };
        build(&spec).unwrap()
    }

    #[test]
    fn positive_root_counts() {
        use DiagramKind::*;
        for (k, n, c) in [(A, 1, 1), (A, 3, 6), (A, 5, 15), (D, 4, 12), (D, 5, 20), (E, 6, 36), (E, 7, 63), (E, 8, 120)] {
            assert_eq!(q(k, n, false).roots.num_positive(), c, "{:?}{}", k, n);
        }
    }

    #[test]
    fn restricted_weyl_types() {
        use DiagramKind::*;
        let a3 = q(A, 3, true);
        assert_eq!(a3.weyl.type_label, "B2");
        assert_eq!(a3.weyl.enumerate_order(100), Some(8));
        let a2 = q(A, 2, false);
        assert_eq!(a2.weyl.type_label, "A2");
        assert_eq!(a2.weyl.m(0, 1), 3);
        assert_eq!(q(A, 5, true).weyl.type_label, "B3");
        assert_eq!(q(D, 4, true).weyl.type_label, "B3");
        assert_eq!(q(D, 5, true).weyl.type_label, "B4");
        let e6 = q(E, 6, true);
        assert_eq!(e6.weyl.type_label, "F4");
        assert_eq!(e6.weyl.enumerate_order(5000), Some(1152));
        assert_eq!(q(E, 6, false).weyl.type_label, "E6");
    }

    #[test]
    fn a_even_rejects_diagram_involution() {
        let r = build(&DiagramSpec::quasi_split(DiagramKind::A, 4));
        assert!(matches!(r, Err(CoreError::InvalidInvolution(_))));
    }

    #[test]
    fn bs_examples() {
        let a3 = q(DiagramKind::A, 3, true);
        assert_eq!(a3.bs_apply(0, &[0, 1, 0]), vec![1, 1, 1]);
        for &i in &a3.reps {
            let a = a3.simple_root(i);
            assert_eq!(a3.bs_apply(i, &a), a.iter().map(|x| -x).collect::<Vec<_>>());
            for r in &a3.roots.positive {
                assert_eq!(&a3.bs_apply(i, &a3.bs_apply(i, r)), r);
            }
        }
    }

    #[test]
    fn bs_commutes_with_tau() {
        for quiver in [q(DiagramKind::A, 5, true), q(DiagramKind::D, 5, true), q(DiagramKind::E, 6, true)] {
            let t = quiver.tau_perm();
            for g in &quiver.weyl.gens {
                assert_eq!(g.compose(&t), t.compose(g));
            }
        }
    }

    #[test]
    fn centralizer_of_tau_is_generated_by_bs() {
        // Enumerate W(A3) and count elements commuting with τ.
        let a3 = q(DiagramKind::A, 3, true);
        let t = a3.tau_perm();
        let w = RestrictedWeyl {
            reps: vec![0, 1, 2],
            gens: a3.roots.simple.clone(),
            coxeter: Vec::new(),
            type_label: String::new(),
            order: 0,
        };
        let m = a3.roots.num_roots();
        let mut all: HashSet<Perm> = HashSet::new();
        let mut queue = VecDeque::from([Perm::identity(m)]);
        all.insert(Perm::identity(m));
        while let Some(x) = queue.pop_front() {
            for g in &w.gens {
                let y = g.compose(&x);
                if all.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        assert_eq!(all.len(), 24);
        let central = all.iter().filter(|x| x.compose(&t) == t.compose(x)).count();
        assert_eq!(central as u64, a3.weyl.enumerate_order(100).unwrap());
    }

    #[test]
    fn reflect_quiver_examples() {
        let a3 = q(DiagramKind::A, 3, true);
        assert_eq!(a3.orientation_string(), "1<-2,2->3");
        let r = a3.reflect(0).unwrap();
        assert_eq!(r.orientation_string(), "1->2,2<-3");
        let back = r.reflect(1).unwrap();
        assert_eq!(back.orientation_string(), "1<-2,2->3");
        assert!(matches!(a3.reflect(1), Err(CoreError::NotASink(_))));
        let twice = r.reflect(1).unwrap().reflect(0).unwrap();
        assert_eq!(twice.orientation_string(), "1->2,2<-3");
    }

    #[test]
    fn euler_form_examples() {
        let spec = DiagramSpec::split(DiagramKind::A, 2).with_orientation(vec![(0, 1)]);
        let a2 = build(&spec).unwrap();
        assert_eq!(a2.euler(&[1, 0], &[0, 1]), -1);
        assert_eq!(a2.euler(&[0, 1], &[1, 0]), 0);
        for i in 0..2 {
            for j in 0..2 {
                let (a, b) = (a2.simple_root(i), a2.simple_root(j));
                assert_eq!(a2.sym_euler(&a, &b), a2.c(i, j));
            }
        }
    }

    #[test]
    fn orientation_validation() {
        let bad = DiagramSpec::quasi_split(DiagramKind::A, 3).with_orientation(vec![(0, 1), (1, 2)]);
        assert!(matches!(build(&bad), Err(CoreError::InvalidOrientation(_))));
        let a3 = q(DiagramKind::A, 3, true);
        assert_eq!(a3.parse_orientation("1<-2,2->3").unwrap(), vec![(1, 0), (1, 2)]);
    }

    #[test]
    fn classify_handles_products() {
        let m = vec![vec![1, 2], vec![2, 1]];
        assert_eq!(classify_coxeter(&m), "A1xA1");
        assert_eq!(coxeter_order("A1xA1"), 4);
    }
}
