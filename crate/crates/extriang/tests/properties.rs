//! Randomized invariants: exact linear algebra contracts, subspace lattice
//! laws, and the bimodule axioms on randomly chosen classes and morphisms.

use extriang::category::{validate_triangle, BasedCategory, ExtElem, Obj, Triangle};
use extriang::linalg::{enumerate_vectors, Field, Mat, Subspace};
use extriang::quiver::build_quiver_category;
use extriang::stmod::build_stmod_category;
use proptest::prelude::*;
use std::sync::OnceLock;

/// The recovered class must agree with the carried one up to an automorphism
/// of A fixing f, which is all the realization pair determines.
fn recovered_matches(cat: &BasedCategory, t: &Triangle, recovered: &ExtElem) -> bool {
    let core = &cat.core;
    let a = t.a();
    for hc in enumerate_vectors(core.field, core.hom_dim_obj(a, a)) {
        let h = core.mor_from_coords(a, a, &hc).unwrap();
        if !core.is_iso(&h) || core.compose(&t.f, &h).unwrap() != t.f {
            continue;
        }
        if &core.act_left(&h, &t.delta).unwrap() == recovered {
            return true;
        }
    }
    false
}

fn quiver_cat() -> &'static BasedCategory {
    static CAT: OnceLock<BasedCategory> = OnceLock::new();
    CAT.get_or_init(|| build_quiver_category(3, "RR", 2).unwrap())
}

fn stmod_cat() -> &'static BasedCategory {
    static CAT: OnceLock<BasedCategory> = OnceLock::new();
    CAT.get_or_init(|| build_stmod_category(4, 2).unwrap())
}

fn both() -> [&'static BasedCategory; 2] {
    [quiver_cat(), stmod_cat()]
}

fn field_strategy() -> impl Strategy<Value = Field> {
    prop_oneof![Just(2u64), Just(3), Just(5)].prop_map(|p| Field::new(p).unwrap())
}

fn mat_strategy() -> impl Strategy<Value = Mat> {
    (field_strategy(), 0usize..=4, 0usize..=4).prop_flat_map(|(f, r, c)| {
        proptest::collection::vec(0..f.p, r * c).prop_map(move |entries| {
            let mut m = Mat::zero(f, r, c);
            for (t, &e) in entries.iter().enumerate() {
                m.set(t / c.max(1), t % c.max(1), e);
            }
            m
        })
    })
}

fn subspace_triple() -> impl Strategy<Value = (Subspace, Subspace, Subspace)> {
    (field_strategy(), 1usize..=4).prop_flat_map(|(f, n)| {
        let one = move || {
            proptest::collection::vec(proptest::collection::vec(0..f.p, n), 0..=n)
                .prop_map(move |vs| Subspace::span(f, n, vs))
        };
        (one(), one(), one())
    })
}

proptest! {
    #[test]
    fn rref_is_idempotent(m in mat_strategy()) {
        let (r1, _) = m.rref();
        let (r2, _) = r1.rref();
        prop_assert_eq!(r1, r2);
    }

    #[test]
    fn rank_nullity(m in mat_strategy()) {
        prop_assert_eq!(m.rank() + m.kernel().dim(), m.cols);
        prop_assert_eq!(m.rank(), m.transpose().rank());
        prop_assert_eq!(m.rank(), m.col_space().dim());
        prop_assert_eq!(m.rank(), m.row_space().dim());
    }

    #[test]
    fn cokernel_contract(m in mat_strategy()) {
        let (q, s) = m.cokernel();
        prop_assert!(q.mul(&m).unwrap().is_zero());
        prop_assert_eq!(q.mul(&s).unwrap(), Mat::identity(m.field, q.rows));
        prop_assert_eq!(q.rows, m.rows - m.rank());
        prop_assert_eq!(q.kernel().dim(), m.col_space().dim());
    }

    #[test]
    fn solve_finds_preimages(m in mat_strategy(), raw in proptest::collection::vec(0u64..5, 4)) {
        let x: Vec<u64> = raw.iter().take(m.cols).map(|&v| m.field.reduce(v)).collect();
        let x = if x.len() == m.cols { x } else { vec![0; m.cols] };
        let b = m.mul_vec(&x);
        let y = m.solve(&b).expect("consistent system");
        prop_assert_eq!(m.mul_vec(&y), b);
    }

    #[test]
    fn subspace_lattice_laws((u, v, w) in subspace_triple()) {
        let meet = u.intersect(&v).unwrap();
        let join = u.sum(&v).unwrap();
        prop_assert!(join.contains(&u) && join.contains(&v));
        prop_assert!(u.contains(&meet) && v.contains(&meet));
        prop_assert_eq!(u.dim() + v.dim(), meet.dim() + join.dim());
        // modularity: if W <= U then U ∩ (V + W) = (U ∩ V) + W
        let w = u.intersect(&w).unwrap();
        let lhs = u.intersect(&v.sum(&w).unwrap()).unwrap();
        let rhs = u.intersect(&v).unwrap().sum(&w).unwrap();
        prop_assert_eq!(lhs, rhs);
        // double orthogonal complement
        prop_assert_eq!(u.orthogonal().orthogonal(), u);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bimodule_laws_on_random_data(
        which in 0usize..2,
        idx in proptest::collection::vec(0usize..6, 4),
        raw in proptest::collection::vec(0u64..2, 12),
    ) {
        let cat = both()[which];
        let core = &cat.core;
        let n = core.n_indecs();
        let (cj, ai, c2, a2) = (idx[0] % n, idx[1] % n, idx[2] % n, idx[3] % n);
        let (oc, oa, oc2, oa2) =
            (Obj::single(cj), Obj::single(ai), Obj::single(c2), Obj::single(a2));
        let take = |from: usize, len: usize| -> Vec<u64> {
            (0..len).map(|t| core.field.reduce(raw[(from + t) % raw.len()])).collect()
        };
        let delta = core.ext_from_coords(&oc, &oa, take(0, core.ext_dims[cj][ai])).unwrap();
        let delta2 = core.ext_from_coords(&oc, &oa, take(4, core.ext_dims[cj][ai])).unwrap();
        let f = core.mor_from_coords(&oc2, &oc, &take(2, core.hom_dims[c2][cj])).unwrap();
        let g = core.mor_from_coords(&oa, &oa2, &take(7, core.hom_dims[ai][a2])).unwrap();
        // associativity of the two actions
        let lhs = core.act_left(&g, &core.act_right(&delta, &f).unwrap()).unwrap();
        let rhs = core.act_right(&core.act_left(&g, &delta).unwrap(), &f).unwrap();
        prop_assert_eq!(lhs.coords, rhs.coords);
        // identities act trivially
        let idc = core.identity(&oc);
        prop_assert_eq!(core.act_right(&delta, &idc).unwrap().coords, delta.coords.clone());
        // additivity in the class
        let sum = core.ext_add(&delta, &delta2).unwrap();
        let act_sum = core.act_right(&sum, &f).unwrap();
        let sum_act = core
            .ext_add(&core.act_right(&delta, &f).unwrap(), &core.act_right(&delta2, &f).unwrap())
            .unwrap();
        prop_assert_eq!(act_sum.coords, sum_act.coords);
    }

    #[test]
    fn random_classes_realize_to_valid_triangles(
        which in 0usize..2,
        idx in proptest::collection::vec(0usize..6, 2),
        raw in proptest::collection::vec(0u64..2, 4),
    ) {
        let cat = both()[which];
        let core = &cat.core;
        let n = core.n_indecs();
        let (oc, oa) = (Obj::single(idx[0] % n), Obj::single(idx[1] % n));
        let coords: Vec<u64> = (0..core.ext_dims[idx[0] % n][idx[1] % n])
            .map(|t| core.field.reduce(raw[t % raw.len()]))
            .collect();
        let delta = core.ext_from_coords(&oc, &oa, coords).unwrap();
        let t = cat.realize(&delta);
        let report = validate_triangle(core, &t);
        prop_assert!(report.is_valid(), "{:?}", report.failures);
        // the backend recovers the same class from the realization
        let back = cat.recover_class(&t.f, &t.g).unwrap();
        prop_assert!(recovered_matches(cat, &t, &back));
    }
}
