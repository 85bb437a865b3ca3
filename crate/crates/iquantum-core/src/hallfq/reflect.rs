//! Reflection functors at a sink `ℓ` (and `τℓ`) for modules annihilated by ε.

use alloc::vec;
use alloc::vec::Vec;

use super::algebra::{build_bound_algebra, BoundAlgebra, FqRep};
use super::fq::{Fq, Mat};
use crate::error::{CoreError, CoreResult};

/// `F⁺_ℓ F⁺_{τℓ}` on a kQ-module: at each sink `s`, the new space is the
/// kernel of `⊕_{i→s} L_i → L_s` and the reversed arrows are the projections.
/// Returns the module over the algebra of the reflected ıquiver.
pub fn reflect_module(f: &Fq, a: &BoundAlgebra, l: usize, m: &FqRep) -> CoreResult<(BoundAlgebra, FqRep)> {
    if !m.is_kq(a) {
        return Err(CoreError::InvalidParameter(
            "reflection is only implemented for modules on which ε acts as zero".into(),
        ));
    }
    let q2 = a.quiver.reflect(l)?;
    let a2 = build_bound_algebra(&q2, usize::MAX)?;
    let nq = a.quiver.arrows.len();
    let mut arrows = a.quiver.arrows.clone();
    let mut dims = m.dims.clone();
    let mut maps: Vec<Mat> = m.maps[..nq].to_vec();
    let mut sinks = vec![l];
    if a.tau[l] != l {
        sinks.push(a.tau[l]);
    }
    for s in sinks {
        let incoming: Vec<usize> = (0..nq).filter(|&k| arrows[k].1 == s).collect();
        let total: usize = incoming.iter().map(|&k| dims[arrows[k].0]).sum();
        // Φ = [L_{a_1} | L_{a_2} | …] : ⊕ L_i → L_s.
        let mut phi = Mat::zeros(dims[s], total);
        let mut col = 0;
        for &k in &incoming {
            let x = &maps[k];
            for r in 0..x.rows {
                for c in 0..x.cols {
                    phi.set(r, col + c, x.get(r, c));
                }
            }
            col += x.cols;
        }
        let ker: Vec<Vec<u8>> = if total == 0 {
            Vec::new()
        } else if dims[s] == 0 {
            (0..total)
                .map(|j| {
                    let mut v = vec![0u8; total];
                    v[j] = 1;
                    v
                })
                .collect()
        } else {
            phi.kernel(f)
        };
        let kd = ker.len();
        let mut col = 0;
        for &k in &incoming {
            let src = arrows[k].0;
            let mut p = Mat::zeros(dims[src], kd);
            for (j, v) in ker.iter().enumerate() {
                for r in 0..dims[src] {
                    p.set(r, j, v[col + r]);
                }
            }
            col += dims[src];
            maps[k] = p;
            arrows[k] = (s, src);
        }
        dims[s] = kd;
    }
    let mut out = FqRep::zero(&a2, &dims);
    out.maps[..nq].clone_from_slice(&maps);
    Ok((a2, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hallfq::catalog::{Catalog, CatalogOptions};
    use crate::rootdata::{build, DiagramKind, DiagramSpec};

    fn check(spec: DiagramSpec) {
        let quiver = build(&spec).unwrap();
        let a = build_bound_algebra(&quiver, 3).unwrap();
        let c = Catalog::build(&a, 2, CatalogOptions { max_dim: 14, empty_levels: 1 }).unwrap();
        let l = (0..quiver.n).find(|&i| quiver.is_sink(i) && quiver.is_rep(i)).unwrap();
        let a2 = build_bound_algebra(&quiver.reflect(l).unwrap(), 3).unwrap();
        let c2 = Catalog::build(&a2, 2, CatalogOptions { max_dim: 14, empty_levels: 1 }).unwrap();
        for x in &c.indecs {
            if !x.rep.is_kq(&a) {
                continue;
            }
            let (_, y) = reflect_module(&c.f, &a, l, &x.rep).unwrap();
            assert!(y.satisfies_relations(&c.f, &a2));
            let d = x.rep.dimvec();
            if d == quiver.simple_root(l) || d == quiver.simple_root(quiver.tau[l]) {
                assert_eq!(y.total(), 0);
                continue;
            }
            assert_eq!(y.dimvec(), quiver.bs_apply(l, &d));
            assert_eq!(c2.identify(&y).unwrap().len(), 1, "image of {} decomposes", x.name);
        }
    }

    #[test]
    fn reflection_a2() {
        check(DiagramSpec::split(DiagramKind::A, 2));
    }

    #[test]
    fn reflection_a3_quasi_split() {
        check(DiagramSpec::quasi_split(DiagramKind::A, 3));
    }

    #[test]
    fn rejects_modules_with_epsilon() {
        let quiver = build(&DiagramSpec::split(DiagramKind::A, 2)).unwrap();
        let a = build_bound_algebra(&quiver, 3).unwrap();
        let f = Fq::new(2).unwrap();
        let l = (0..2).find(|&i| quiver.is_sink(i)).unwrap();
        assert!(reflect_module(&f, &a, l, &FqRep::e_module(&a, l)).is_err());
    }

    #[test]
    fn reflection_a3_split() {
        check(DiagramSpec::split(DiagramKind::A, 3));
    }

    #[test]
    fn a2_sum_of_simples_reflects_to_other_simple() {
        let quiver = build(&DiagramSpec::split(DiagramKind::A, 2)).unwrap();
        let a = build_bound_algebra(&quiver, 3).unwrap();
        let l = (0..2).find(|&i| quiver.is_sink(i)).unwrap();
        let c = Catalog::build(&a, 2, CatalogOptions { max_dim: 4, empty_levels: 1 }).unwrap();
        let x = c.indecs.iter().find(|x| x.rep.dims == [1, 1] && x.rep.is_kq(&a)).unwrap();
        let (_, y) = reflect_module(&c.f, &a, l, &x.rep).unwrap();
        let mut want = vec![1usize, 1];
        want[l] = 0;
        assert_eq!(y.dims, want);
    }

    #[test]
    fn rejects_non_sinks() {
        let quiver = build(&DiagramSpec::split(DiagramKind::A, 2)).unwrap();
        let a = build_bound_algebra(&quiver, 3).unwrap();
        let f = Fq::new(2).unwrap();
        let l = (0..2).find(|&i| !quiver.is_sink(i)).unwrap();
        assert!(matches!(reflect_module(&f, &a, l, &FqRep::simple(&a, l)), Err(CoreError::NotASink(_))));
    }
}
