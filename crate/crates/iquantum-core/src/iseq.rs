//! Q-admissible orderings and complete ı-admissible sequences.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashSet;

use crate::error::{CoreError, CoreResult};
use crate::rootdata::{IQuiver, Perm, Root};

/// A (+)-admissible sink sequence and the roots it produces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QOrdering {
    pub sinks: Vec<usize>,
    pub gammas: Vec<Root>,
}

/// `s_{i_1}⋯s_{i_k}(a)` for a word `i_1..i_k`.
fn apply_word(q: &IQuiver, word: &[usize], a: &[i32]) -> Root {
    let mut r = a.to_vec();
    for &i in word.iter().rev() {
        r = q.s_apply(i, &r);
    }
    r
}

fn is_sink(arrows: &[(usize, usize)], i: usize) -> bool {
    !arrows.iter().any(|&(s, _)| s == i)
}

fn reflect_at(arrows: &[(usize, usize)], l: usize) -> Vec<(usize, usize)> {
    arrows.iter().map(|&(s, t)| if t == l { (t, s) } else { (s, t) }).collect()
}

/// Repeatedly take the smallest sink of the current quiver whose simple root
/// has a positive image, record that image, and reflect there.
pub fn q_admissible_ordering(q: &IQuiver) -> CoreResult<QOrdering> {
    let mut arrows = q.arrows.clone();
    let mut sinks = Vec::new();
    let mut gammas = Vec::new();
    for _ in 0..q.roots.num_positive() {
        // Smallest sink whose image is still positive (the word stays reduced).
        let pick = (0..q.n)
            .filter(|&i| is_sink(&arrows, i))
            .map(|i| (i, apply_word(q, &sinks, &q.simple_root(i))))
            .find(|(_, g)| g.iter().all(|&x| x >= 0));
        let (i, g) = pick.ok_or_else(|| {
            CoreError::Other(format!("no sink with a positive image at step {}", sinks.len() + 1))
        })?;
        sinks.push(i);
        gammas.push(g);
        arrows = reflect_at(&arrows, i);
    }
    Ok(QOrdering { sinks, gammas })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IAdmissibleSeq {
    /// `i_{t_1}, …` (all in 𝕀_τ).
    pub indices: Vec<usize>,
    /// `β_j = bs_{i_1}⋯bs_{i_{j−1}}(α_{i_j})`.
    pub betas: Vec<Root>,
    /// 1-based positions of the β's in `ordering`.
    pub t_indices: Vec<usize>,
    /// The Q-admissible ordering β_1, τβ_1, β_2, … actually used.
    pub ordering: Vec<Root>,
    /// The sink sequence realizing `ordering`; a reduced word for w_0.
    pub sink_sequence: Vec<usize>,
    /// The greedy ordering the construction started from.
    pub greedy: QOrdering,
}

impl IAdmissibleSeq {
    pub fn tau_betas(&self, q: &IQuiver) -> Vec<Root> {
        self.betas.iter().map(|b| q.tau_root(b)).collect()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// The constructive algorithm: extract β's from a Q-admissible ordering,
/// reorder so each τβ_j follows β_j, and realize the result by sinks.
pub fn i_admissible_complete(q: &IQuiver) -> CoreResult<IAdmissibleSeq> {
    let greedy = q_admissible_ordering(q)?;
    let mut covered: HashSet<Root> = HashSet::new();
    let mut chosen: Vec<Root> = Vec::new();
    for g in &greedy.gammas {
        if covered.contains(g) {
            continue;
        }
        covered.insert(g.clone());
        covered.insert(q.tau_root(g));
        chosen.push(g.clone());
    }
    let mut ordering = Vec::new();
    for b in &chosen {
        ordering.push(b.clone());
        let t = q.tau_root(b);
        if &t != b {
            ordering.push(t);
        }
    }
    // Realize `ordering` by a sink sequence.
    let mut arrows = q.arrows.clone();
    let mut sinks: Vec<usize> = Vec::new();
    for (k, g) in ordering.iter().enumerate() {
        let mut x = g.clone();
        for &i in &sinks {
            x = q.s_apply(i, &x);
        }
        let simple = (0..q.n).find(|&i| x == q.simple_root(i));
        let i = match simple {
            Some(i) if is_sink(&arrows, i) => i,
            _ => {
                return Err(CoreError::Other(format!(
                    "reordered sequence is not realizable by sinks at position {}",
                    k + 1
                )))
            }
        };
        sinks.push(i);
        arrows = reflect_at(&arrows, i);
    }
    let mut t_indices = Vec::new();
    let mut pos = 0;
    for b in &chosen {
        t_indices.push(pos + 1);
        pos += if q.tau_root(b) == *b { 1 } else { 2 };
    }
    let indices: Vec<usize> = t_indices.iter().map(|&t| sinks[t - 1].min(q.tau[sinks[t - 1]])).collect();
    let betas = betas_of(q, &indices);
    Ok(IAdmissibleSeq { indices, betas, t_indices, ordering, sink_sequence: sinks, greedy })
}

/// `β_j = bs_{i_1}⋯bs_{i_{j−1}}(α_{i_j})`.
pub fn betas_of(q: &IQuiver, indices: &[usize]) -> Vec<Root> {
    let mut out = Vec::new();
    for (j, &i) in indices.iter().enumerate() {
        let mut r = q.simple_root(i);
        for &k in indices[..j].iter().rev() {
            r = q.bs_apply(k, &r);
        }
        out.push(r);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeqFailure {
    /// 1-based step.
    pub step: usize,
    pub condition: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeqReport {
    pub steps_checked: usize,
    pub failure: Option<SeqFailure>,
    pub betas: Vec<Root>,
    /// {β, τβ} exhausts Φ⁺.
    pub covers_positive_roots: bool,
    /// Π bs_{i_j} maps Φ⁺ into −Φ⁺.
    pub product_is_w0: bool,
}

impl SeqReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.covers_positive_roots && self.product_is_w0
    }
}

/// Check the sink condition step by step, distinctness, coverage and the
/// longest-element property. Failures are reported, not raised.
pub fn verify_i_admissible(indices: &[usize], q: &IQuiver) -> SeqReport {
    let mut cur = q.clone();
    let mut seen: HashSet<Root> = HashSet::new();
    let mut betas = Vec::new();
    let mut failure = None;
    let mut w = Perm::identity(q.roots.num_roots());
    let mut steps = 0;
    for (k, &i) in indices.iter().enumerate() {
        let fail = |c: &str| Some(SeqFailure { step: k + 1, condition: c.into() });
        if i >= q.n || !q.is_rep(i) {
            failure = fail("index is not a τ-orbit representative");
            break;
        }
        if !cur.is_sink(i) {
            failure = fail(&format!("{} is not a sink of the reflected quiver", q.label(i)));
            break;
        }
        let b = q.roots.apply(&w, &q.simple_root(i)).unwrap();
        if b.iter().any(|&x| x < 0) {
            failure = fail("β is not a positive root");
            break;
        }
        if seen.contains(&b) {
            failure = fail("β repeats an earlier root or its τ-image");
            break;
        }
        seen.insert(b.clone());
        seen.insert(q.tau_root(&b));
        betas.push(b);
        w = w.compose(q.bs_perm(i));
        cur = cur.reflect(i).expect("sink checked above");
        steps += 1;
    }
    let covers = failure.is_none() && seen.len() == q.roots.num_positive();
    let longest = failure.is_none() && q.roots.is_longest(&w);
    SeqReport { steps_checked: steps, failure, betas, covers_positive_roots: covers, product_is_w0: longest }
}

/// Number of τ-orbits on Φ⁺.
pub fn num_tau_orbits(q: &IQuiver) -> usize {
    let mut seen: HashSet<Root> = HashSet::new();
    let mut count = 0;
    for r in &q.roots.positive {
        if seen.insert(r.clone()) {
            seen.insert(q.tau_root(r));
            count += 1;
        }
    }
    count
}

/// Expand a word over representatives into the plain reduced word of w_0.
pub fn w0_word(q: &IQuiver, indices: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    for &i in indices {
        out.push(i);
        if q.tau[i] != i {
            out.push(q.tau[i]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::rootdata::{build, DiagramKind, DiagramSpec};

    #[test]
    fn a2_greedy_ordering() {
        let a2 = build(&DiagramSpec::split(DiagramKind::A, 2)).unwrap();
        let o = q_admissible_ordering(&a2).unwrap();
        assert_eq!(o.sinks, vec![0, 1, 0]);
        assert_eq!(o.gammas, vec![vec![1, 0], vec![1, 1], vec![0, 1]]);
    }

    #[test]
    fn a1_sequence() {
        let a1 = build(&DiagramSpec::split(DiagramKind::A, 1)).unwrap();
        let s = i_admissible_complete(&a1).unwrap();
        assert_eq!(s.indices, vec![0]);
        assert_eq!(s.betas, vec![vec![1]]);
    }

    #[test]
    fn a3_greedy_starts_at_an_end() {
        let a3 = build(&DiagramSpec::quasi_split(DiagramKind::A, 3)).unwrap();
        let o = q_admissible_ordering(&a3).unwrap();
        assert_eq!(o.gammas[0], vec![1, 0, 0]);
    }

    #[test]
    fn a2_repeated_index_fails_at_step_two() {
        let a2 = build(&DiagramSpec::split(DiagramKind::A, 2)).unwrap();
        let r = verify_i_admissible(&[0, 0], &a2);
        assert_eq!(r.failure.unwrap().step, 2);
    }

    #[test]
    fn permuted_sequence_reports_first_bad_step() {
        let a2 = build(&DiagramSpec::split(DiagramKind::A, 2)).unwrap();
        let r = verify_i_admissible(&[1, 0, 1], &a2);
        assert_eq!(r.failure.unwrap().step, 1);
    }
}
