//! Commands backed by the finite-field Hall oracle.

use iquantum_core::hallfq::catalog::count_indecomposables;
use iquantum_core::hallfq::identities::{commutator_identities, triple_identities, Identity};
use iquantum_core::hallfq::psi::{check_relations, check_root_vectors, check_word, distinguished_level};
use iquantum_core::hallfq::reflect::reflect_module;
use iquantum_core::hallfq::{
    build_bound_algebra, BoundAlgebra, Catalog, CatalogOptions, Hall, HallElem, ReducedElem, DEFAULT_RANK_CAP,
};
use iquantum_core::iqg::{BuildOptions, IQuantumGroup, Level};
use iquantum_core::iseq::i_admissible_complete;
use iquantum_core::rootdata::IQuiver;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::Output;
use crate::{Check, CliError, RunConfig};

/// Largest dimension searched when a command needs the complete list.
const FULL_CLASSIFICATION_DIM: usize = 24;

fn highest_root_height(q: &IQuiver) -> usize {
    q.roots.positive.iter().map(|r| r.iter().sum::<i32>() as usize).max().unwrap_or(1)
}

fn catalog(a: &BoundAlgebra, q: u32, max_dim: usize) -> Result<Catalog, CliError> {
    Ok(Catalog::build(a, q, CatalogOptions { max_dim, empty_levels: 1 })?)
}

fn or_auto(v: usize, auto: usize) -> usize {
    if v == 0 {
        auto
    } else {
        v
    }
}

pub fn fmt_hall(cat: &Catalog, x: &HallElem) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.terms.iter().map(|(k, c)| format!("({})[{}]", c, cat.class_name(k))).collect::<Vec<_>>().join(" + ")
}

pub fn fmt_reduced(cat: &Catalog, x: &ReducedElem) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.terms
        .iter()
        .map(|((k, h), c)| {
            let mut s = format!("({})[{}]", c, cat.class_name(k));
            for (i, &e) in h.iter().enumerate() {
                if e != 0 {
                    s.push_str(&format!("[E{}]^{}", cat.alg.label(i), e));
                }
            }
            s
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn parse_factors(cat: &Catalog, product: &str) -> Result<Vec<HallElem>, CliError> {
    product
        .split('*')
        .map(|t| Ok(HallElem::class(cat.q(), cat.parse_class(t.trim())?)))
        .collect()
}

/// Hall product of labelled classes, and optionally the class inventory.
pub fn hall(cfg: &RunConfig) -> Output {
    let quiver = cfg.quiver()?;
    let a = build_bound_algebra(&quiver, DEFAULT_RANK_CAP)?;
    let q = *cfg.primes.first().ok_or_else(|| CliError::Config("no field size given".into()))?;
    let cat = catalog(&a, q, or_auto(cfg.max_dim, 6))?;
    let h = Hall::new(&cat);
    let mut checks = Vec::new();
    let mut data = serde_json::Map::new();
    data.insert("diagram".into(), json!(quiver.name));
    data.insert("tau".into(), json!(quiver.tau_string()));
    data.insert("q".into(), json!(q));
    data.insert("relations".into(), json!(a.relations.iter().map(|r| r.text.clone()).collect::<Vec<_>>()));
    if let Some(p) = &cfg.product {
        let xs = parse_factors(&cat, p)?;
        let mul = |x: &HallElem, y: &HallElem| if cfg.untwisted { h.mul_untwisted(x, y) } else { h.mul(x, y) };
        let mut acc = HallElem::one(q);
        for x in &xs {
            acc = mul(&acc, x)?;
        }
        if xs.len() >= 3 {
            // Right-nested evaluation must agree.
            let mut right = xs.last().cloned().expect("nonempty");
            for x in xs.iter().rev().skip(1) {
                right = mul(x, &right)?;
            }
            checks.push(Check::new("left and right nesting agree", right == acc, Value::Null));
        }
        let terms: Vec<Value> = acc
            .terms
            .iter()
            .map(|(k, c)| json!({"class": cat.class_name(k), "dims": cat.dims_of(k), "coeff": c.to_string()}))
            .collect();
        data.insert("product".into(), json!({"input": p, "twisted": !cfg.untwisted, "text": fmt_hall(&cat, &acc), "terms": terms}));
    }
    if cfg.inventory > 0 {
        let mut classes = Vec::new();
        for dims in dim_vectors(a.n, cfg.inventory) {
            for m in cat.enumerate(&dims) {
                classes.push(json!({"class": cat.class_name(&m.key), "dims": dims, "aut": m.aut.to_string(),
                                    "indecomposable": m.indecomposable}));
            }
        }
        data.insert("inventory".into(), json!(classes));
    }
    checks.push(Check::new("indecomposable names are unambiguous", cat.signatures_unique(), json!({"indecomposables": cat.len()})));
    Ok((checks, Value::Object(data)))
}

/// Dimension vectors with `1 ≤ Σ ≤ total`, by total then lexicographically.
fn dim_vectors(n: usize, total: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                let s: usize = v.iter().sum();
                (0..=total - s).map(move |k| {
                    let mut w = v.clone();
                    w.push(k);
                    w
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().sum::<usize>() > 0);
    out.sort_by_key(|v| (v.iter().sum::<usize>(), v.clone()));
    out
}

fn random_words(n: usize, count: usize, max_len: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=max_len.max(1));
            (0..len).map(|_| rng.gen_range(0..n)).collect()
        })
        .collect()
}

/// ψ against the symbolic layer: relations, random words, root vectors.
pub fn cross_check(cfg: &RunConfig) -> Output {
    let quiver = cfg.quiver()?;
    let words = random_words(quiver.n, cfg.words, cfg.word_len, cfg.seed);
    let max_dim = or_auto(cfg.max_dim, cfg.word_len.max(highest_root_height(&quiver)));
    let per_q: Vec<Result<Vec<Check>, CliError>> = cfg
        .primes
        .par_iter()
        .map(|&q| -> Result<Vec<Check>, CliError> {
            let a = build_bound_algebra(&quiver, DEFAULT_RANK_CAP)?;
            let cat = catalog(&a, q, max_dim)?;
            let h = Hall::new(&cat);
            let opts = BuildOptions { cap: cfg.cap, ..Default::default() };
            let ig = IQuantumGroup::new(&quiver, Level::Universal, &opts)?;
            let mut out = Vec::new();
            for r in check_relations(&h, &ig)? {
                out.push(Check::new(format!("q={} relation {} ↦ 0", q, r.label), r.equal, json!({"image": fmt_hall(&cat, &r.lhs)})));
            }
            for w in &words {
                let c = check_word(&h, &ig, w)?;
                out.push(Check::new(
                    format!("q={} word {}", q, c.label),
                    c.equal,
                    json!({"hall": fmt_hall(&cat, &c.lhs), "symbolic": fmt_hall(&cat, &c.rhs), "rewritten": c.rewritten}),
                ));
            }
            let mut igd = IQuantumGroup::new(&quiver, distinguished_level(&quiver), &opts)?;
            igd.prepare_braid(cfg.inv_cap)?;
            let seq = i_admissible_complete(&quiver)?;
            for r in check_root_vectors(&h, &igd, &seq)? {
                out.push(Check::new(
                    format!("q={} ψ(B_{{{}}})", q, quiver.root_string(&r.root)),
                    r.equal,
                    json!({"image": fmt_reduced(&cat, &r.image), "expected": fmt_reduced(&cat, &r.expected), "node": quiver.label(r.node)}),
                ));
            }
            Ok(out)
        })
        .collect();
    let mut checks = Vec::new();
    for r in per_q {
        checks.extend(r?);
    }
    let data = json!({"diagram": quiver.name, "tau": quiver.tau_string(), "orientation": quiver.orientation_string(),
                      "words": words.iter().map(|w| w.iter().map(|&i| quiver.label(i).to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                      "max_dim": max_dim});
    Ok((checks, data))
}

fn identity_check(q: u32, cat: &Catalog, x: Identity) -> Check {
    Check::new(
        format!("q={} {}", q, x.label),
        x.holds,
        json!({"lhs": fmt_hall(cat, &x.lhs), "rhs": fmt_hall(cat, &x.rhs)}),
    )
}

/// Reflection functors on kQ-indecomposables, and the Hall identities of the
/// reflected ıquiver.
pub fn reflect(cfg: &RunConfig) -> Output {
    let quiver = cfg.quiver()?;
    let l = match &cfg.sink {
        Some(s) => cfg.node(&quiver, s)?,
        None => quiver
            .sinks()
            .into_iter()
            .find(|&i| quiver.is_rep(i))
            .ok_or_else(|| CliError::Config("no sink among the representatives".into()))?,
    };
    let reflected = quiver.reflect(l)?;
    let max_dim = or_auto(cfg.max_dim, highest_root_height(&quiver).max(3));
    let per_q: Vec<Result<Vec<Check>, CliError>> = cfg
        .primes
        .par_iter()
        .map(|&q| -> Result<Vec<Check>, CliError> {
            let a = build_bound_algebra(&quiver, DEFAULT_RANK_CAP)?;
            let a2 = build_bound_algebra(&reflected, DEFAULT_RANK_CAP)?;
            let cat = catalog(&a, q, max_dim)?;
            let cat2 = catalog(&a2, q, max_dim)?;
            let mut out = Vec::new();
            for x in cat.indecs.iter().filter(|x| x.rep.is_kq(&a)) {
                let (_, y) = reflect_module(&cat.f, &a, l, &x.rep)?;
                let d: Vec<i32> = x.rep.dimvec();
                let killed = d == quiver.simple_root(l) || d == quiver.simple_root(quiver.tau[l]);
                let (ok, image) = if killed {
                    (y.total() == 0, "0".to_string())
                } else {
                    let key = cat2.identify(&y)?;
                    (y.dimvec() == quiver.bs_apply(l, &d) && key.len() == 1, cat2.class_name(&key))
                };
                out.push(Check::new(
                    format!("q={} F⁺ {} ↦ {}", q, x.name, image),
                    ok,
                    json!({"input_dims": d, "output_dims": y.dimvec(), "expected_dims": if killed { vec![0; quiver.n] } else { quiver.bs_apply(l, &d) }}),
                ));
            }
            let h = Hall::new(&cat2);
            for x in commutator_identities(&h)? {
                out.push(identity_check(q, &cat2, x));
            }
            for x in triple_identities(&h)? {
                out.push(identity_check(q, &cat2, x));
            }
            Ok(out)
        })
        .collect();
    let mut checks = Vec::new();
    for r in per_q {
        checks.extend(r?);
    }
    let data = json!({"diagram": quiver.name, "tau": quiver.tau_string(), "orientation": quiver.orientation_string(),
                      "sink": quiver.label(l), "reflected_orientation": reflected.orientation_string()});
    Ok((checks, data))
}

/// Number of indecomposable modules of the ıquiver algebra.
pub fn count_indec(cfg: &RunConfig) -> Output {
    let quiver = cfg.quiver()?;
    let max_dim = or_auto(cfg.max_dim, FULL_CLASSIFICATION_DIM);
    let per_q: Vec<Result<(u32, usize, bool), CliError>> = cfg
        .primes
        .par_iter()
        .map(|&q| {
            let a = build_bound_algebra(&quiver, DEFAULT_RANK_CAP)?;
            let (n, complete) = count_indecomposables(&a, q, CatalogOptions { max_dim, empty_levels: 1 })?;
            Ok((q, n, complete))
        })
        .collect();
    let mut checks = Vec::new();
    let mut counts = Vec::new();
    for r in per_q {
        let (q, n, complete) = r?;
        checks.push(Check::new(format!("q={} classification complete below dimension {}", q, max_dim), complete, json!({"count": n})));
        if let Some(e) = cfg.expect {
            checks.push(Check::new(format!("q={} count {} = expected {}", q, n, e), n == e, Value::Null));
        }
        counts.push(json!({"q": q, "count": n, "complete": complete}));
    }
    if counts.len() > 1 {
        let same = counts.windows(2).all(|w| w[0]["count"] == w[1]["count"]);
        checks.push(Check::new("count is independent of q", same, Value::Null));
    }
    let data = json!({"diagram": quiver.name, "tau": quiver.tau_string(), "counts": counts});
    Ok((checks, data))
}
