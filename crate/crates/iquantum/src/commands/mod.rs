//! Command implementations. Each returns its checks and a data payload.

mod hall;

pub use hall::{count_indec, cross_check, hall, reflect};

use iquantum_core::iqg::{BuildOptions, IQuantumGroup, Level};
use iquantum_core::iseq::{i_admissible_complete, verify_i_admissible, w0_word};
use iquantum_core::qgroup::distinguished_parameter;
use iquantum_core::rootdata::IQuiver;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::{Check, CliError, RunConfig};

pub type Output = Result<(Vec<Check>, Value), CliError>;

/// Diagrams of the braid suite: split A2–A4, D4; quasi-split A3, A5, D4
/// (and E6 when extended).
pub fn braid_suite(extended: bool) -> Vec<(&'static str, &'static str)> {
    let mut v = vec![
        ("A2", "identity"),
        ("A3", "identity"),
        ("A4", "identity"),
        ("D4", "identity"),
        ("A3", "diagram"),
        ("A5", "diagram"),
        ("D4", "diagram"),
    ];
    if extended {
        v.push(("E6", "diagram"));
    }
    v
}

fn build_options(cfg: &RunConfig) -> BuildOptions {
    BuildOptions { cap: cfg.cap, ..Default::default() }
}

fn params_json(q: &IQuiver, level: &Level) -> Value {
    match level {
        Level::Universal => Value::Null,
        Level::Parameter(vs) => {
            let m: serde_json::Map<String, Value> =
                vs.iter().enumerate().map(|(i, v)| (q.label(i).to_string(), json!(v.to_string()))).collect();
            Value::Object(m)
        }
    }
}

fn labels(q: &IQuiver, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| q.label(i).to_string()).collect()
}

/// Braid relations on every generator, per pair of representatives.
pub fn verify_braid(cfg: &RunConfig) -> Output {
    if cfg.diagram.eq_ignore_ascii_case("suite") {
        return verify_braid_suite(cfg);
    }
    let q = cfg.quiver()?;
    let level = cfg.level_of(&q)?;
    let mut ig = IQuantumGroup::new(&q, level.clone(), &build_options(cfg))?;
    ig.prepare_forward()?;
    let pairs = match &cfg.pair {
        Some(p) => {
            let (a, b) = p.split_once(',').ok_or_else(|| CliError::Config(format!("pair '{}' is not i,j", p)))?;
            vec![(cfg.node(&q, a)?, cfg.node(&q, b)?)]
        }
        None => ig.braid_pairs(),
    };
    let mut checks = Vec::new();
    for (i, j) in pairs {
        if !q.is_rep(i) || !q.is_rep(j) {
            return Err(CliError::Config(format!("{} and {} must be τ-orbit representatives", q.label(i), q.label(j))));
        }
        let r = ig.verify_braid_pair(i, j)?;
        let per: Vec<Value> = r
            .per_generator
            .iter()
            .map(|g| {
                json!({"gen": g.gen, "lhs_nf_hash": format!("{:016x}", g.lhs_nf_hash),
                       "rhs_nf_hash": format!("{:016x}", g.rhs_nf_hash), "equal": g.equal, "cap": g.cap, "error": g.error})
            })
            .collect();
        checks.push(Check::new(
            format!("{} τ={} {} braid ({},{}) m={}", q.name, q.tau_string(), level.name(), q.label(i), q.label(j), r.m),
            r.passed(),
            json!({"diagram": q.name, "tau": q.tau_string(), "level": level.name(), "params": params_json(&q, &level),
                   "pair": [q.label(i), q.label(j)], "m": r.m, "per_generator": per}),
        ));
    }
    if cfg.ideal {
        let uni = if level == Level::Universal { None } else { Some(IQuantumGroup::new(&q, Level::Universal, &build_options(cfg))?) };
        let uni = uni.as_ref().unwrap_or(&ig);
        let reduced = IQuantumGroup::universal_in_reduced(&q, &distinguished_parameter(&q), &build_options(cfg))?;
        for &i in &q.reps {
            let r = uni.reduced_ideal_stability(&reduced, i)?;
            let per: Vec<Value> = r.per_generator.iter().map(|(g, ok)| json!({"generator": g, "vanishes": ok})).collect();
            checks.push(Check::new(
                format!("{} τ={} ideal stability under T_{}", q.name, q.tau_string(), q.label(i)),
                r.passed(),
                json!({"i": q.label(i), "per_generator": per}),
            ));
        }
    }
    let data = json!({"diagram": q.name, "tau": q.tau_string(), "orientation": q.orientation_string(),
                      "restricted_weyl": q.weyl.type_label, "level": level.name(), "params": params_json(&q, &level)});
    Ok((checks, data))
}

fn verify_braid_suite(cfg: &RunConfig) -> Output {
    let results: Vec<Result<(Vec<Check>, Value), CliError>> = braid_suite(cfg.extended)
        .par_iter()
        .map(|(d, t)| {
            let mut c = cfg.clone();
            c.diagram = (*d).into();
            c.tau = (*t).into();
            c.orientation = None;
            c.pair = None;
            c.params.clear();
            verify_braid(&c)
        })
        .collect();
    let mut checks = Vec::new();
    let mut data = Vec::new();
    for r in results {
        let (c, d) = r?;
        checks.extend(c);
        data.push(d);
    }
    Ok((checks, json!({"suite": data})))
}

/// The ı-admissible sequence of the configured ıquiver.
pub fn iseq(cfg: &RunConfig) -> Output {
    let q = cfg.quiver()?;
    let seq = i_admissible_complete(&q)?;
    let rep = verify_i_admissible(&seq.indices, &q);
    let roots = |rs: &[Vec<i32>]| -> Vec<Value> { rs.iter().map(|r| json!({"root": r, "text": q.root_string(r)})).collect() };
    let w0 = w0_word(&q, &seq.indices);
    let checks = vec![
        Check::new(
            "sequence is ı-admissible",
            rep.failure.is_none(),
            json!({"steps_checked": rep.steps_checked, "failure": rep.failure.as_ref().map(|f| json!({"step": f.step, "condition": f.condition}))}),
        ),
        Check::new("{β, τβ} exhausts Φ⁺", rep.covers_positive_roots, Value::Null),
        Check::new("bs-product is w_0", rep.product_is_w0, json!({"w0_word": labels(&q, &w0), "length": w0.len(), "num_positive": q.roots.num_positive()})),
    ];
    let coxeter: Vec<Vec<u32>> = q.weyl.coxeter.clone();
    let data = json!({
        "diagram": q.name, "tau": q.tau_string(), "orientation": q.orientation_string(),
        "indices": labels(&q, &seq.indices),
        "betas": roots(&seq.betas),
        "ordering": roots(&seq.ordering),
        "t_indices": seq.t_indices,
        "sink_sequence": labels(&q, &seq.sink_sequence),
        "restricted_weyl": {"type": q.weyl.type_label, "order": q.weyl.order, "reps": labels(&q, &q.weyl.reps), "coxeter": coxeter},
    });
    Ok((checks, data))
}

/// q-root vectors along the ı-admissible sequence, each round-tripped through
/// the forward operators.
pub fn root_vectors(cfg: &RunConfig) -> Output {
    let q = cfg.quiver()?;
    let level = cfg.level_of(&q)?;
    let mut ig = IQuantumGroup::new(&q, level.clone(), &build_options(cfg))?;
    ig.prepare_braid(cfg.inv_cap)?;
    let seq = i_admissible_complete(&q)?;
    let a = ig.a_factors()?;
    let mut checks = Vec::new();
    let mut list = Vec::new();
    for rv in ig.q_root_vectors(&seq)? {
        let prefix: Vec<usize> = seq.indices[..rv.index].iter().rev().copied().collect();
        let back = ig.apply_word(&prefix, &rv.value, false)?;
        // The prefactor a_{i_j} Π a_l^{-d_l} is a unit; compare up to it.
        let mut pre = a[seq.indices[rv.index]].clone();
        for (l, &d) in rv.root.iter().enumerate() {
            pre = pre.mul(&a[l].pow(-d)?);
        }
        let ok = ig.equal(&back, &ig.b(rv.node).scale(&pre))?;
        let text = ig.alphabet().fmt_poly(&rv.value);
        checks.push(Check::new(
            format!("B_{{{}}} round trip", q.root_string(&rv.root)),
            ok,
            json!({"root": rv.root, "node": q.label(rv.node)}),
        ));
        list.push(json!({"root": rv.root, "text": q.root_string(&rv.root), "index": rv.index + 1,
                         "node": q.label(rv.node), "value": text, "terms": rv.value.len(),
                         "prefactor_discrepancy": rv.prefactor_discrepancy}));
    }
    let data = json!({"diagram": q.name, "tau": q.tau_string(), "level": level.name(), "params": params_json(&q, &level),
                      "indices": labels(&q, &seq.indices), "root_vectors": list});
    Ok((checks, data))
}

/// PBW independence and spanning spot check.
pub fn pbw(cfg: &RunConfig) -> Output {
    let q = cfg.quiver()?;
    let level = cfg.level_of(&q)?;
    let mut ig = IQuantumGroup::new(&q, level.clone(), &build_options(cfg))?;
    ig.prepare_braid(cfg.inv_cap)?;
    let seq = i_admissible_complete(&q)?;
    let r = ig.pbw_check(&seq, cfg.degree, cfg.box_exp, cfg.span_len)?;
    let mut checks = vec![Check::new(
        format!("PBW independence, degree ≤ {}, {} Cartan monomials", r.degree, r.kappas),
        r.count == r.rank,
        json!({"count": r.count, "rank": r.rank}),
    )];
    for (w, ok) in &r.spanning {
        checks.push(Check::new(format!("{} expands uniquely", w), *ok, Value::Null));
    }
    let data = json!({"diagram": q.name, "tau": q.tau_string(), "level": level.name(), "count": r.count, "rank": r.rank,
                      "words_checked": r.spanning.len()});
    Ok((checks, data))
}
