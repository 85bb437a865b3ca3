use iquantum_core::iseq::{i_admissible_complete, num_tau_orbits, verify_i_admissible, w0_word};
use iquantum_core::rootdata::{build, diagram_edges, DiagramKind, DiagramSpec, TauChoice};

fn all_configs() -> Vec<(DiagramKind, usize, TauChoice)> {
    let mut v = Vec::new();
    for n in 1..=6 {
        v.push((DiagramKind::A, n, TauChoice::Identity));
        if n % 2 == 1 && n >= 3 {
            v.push((DiagramKind::A, n, TauChoice::Diagram));
        }
    }
    for n in 4..=6 {
        v.push((DiagramKind::D, n, TauChoice::Identity));
        v.push((DiagramKind::D, n, TauChoice::Diagram));
    }
    v.push((DiagramKind::E, 6, TauChoice::Identity));
    v.push((DiagramKind::E, 6, TauChoice::Diagram));
    v
}

#[test]
fn every_orientation_yields_a_valid_complete_sequence() {
    let mut checked = 0;
    for (kind, n, tau) in all_configs() {
        let edges = diagram_edges(kind, n).unwrap();
        for mask in 0u32..(1 << edges.len()) {
            let arrows: Vec<_> = edges
                .iter()
                .enumerate()
                .map(|(k, &(a, b))| if mask >> k & 1 == 1 { (a, b) } else { (b, a) })
                .collect();
            let spec = DiagramSpec::new(kind, n, tau.clone()).with_orientation(arrows);
            let Ok(q) = build(&spec) else { continue };
            let seq = i_admissible_complete(&q).unwrap();
            let rep = verify_i_admissible(&seq.indices, &q);
            assert!(rep.passed(), "{} {} {:?}", q.name, q.orientation_string(), rep.failure);
            assert_eq!(rep.betas, seq.betas);
            let orbits = num_tau_orbits(&q);
            assert_eq!(seq.len(), orbits);
            let fixed = seq.betas.iter().filter(|b| q.tau_root(b) == **b).count();
            assert_eq!(2 * orbits - fixed, q.roots.num_positive());
            assert_eq!(w0_word(&q, &seq.indices).len(), q.roots.num_positive());
            if q.is_split() {
                assert_eq!(seq.indices, seq.sink_sequence);
            }
            checked += 1;
        }
    }
    assert!(checked > 100);
}

#[test]
fn a3_worked_example_orientation() {
    // 2 must be a sink for the sequence (2,1,2,1) to be admissible.
    let spec = DiagramSpec::quasi_split(DiagramKind::A, 3).with_orientation(vec![(0, 1), (2, 1)]);
    let q = build(&spec).unwrap();
    let seq = i_admissible_complete(&q).unwrap();
    assert_eq!(seq.indices, vec![1, 0, 1, 0]);
    assert_eq!(seq.betas, vec![vec![0, 1, 0], vec![1, 1, 0], vec![1, 1, 1], vec![0, 0, 1]]);
    assert_eq!(
        seq.ordering,
        vec![vec![0, 1, 0], vec![1, 1, 0], vec![0, 1, 1], vec![1, 1, 1], vec![0, 0, 1], vec![1, 0, 0]]
    );
    assert!(verify_i_admissible(&seq.indices, &q).passed());
}
