//! Brute-force enumeration and falsification, independent of the defect path.
//!
//! The enumerator lists every action-stable family of subspaces by filtering
//! the full product of subspace lattices; the falsifier hunts for a pair of
//! composable member deflations whose composite class escapes the family.
//! Tests treat this module as the arbiter against the theorem-driven path.

use crate::category::{BasedCategory, CatCore, ExtElem, Obj};
use crate::linalg::{count_subspaces, enumerate_subspaces};
use crate::relative::Subfunctor;
use crate::{Error, Result};

/// Every additive subfunctor of E: all assignments of a subspace to each
/// indecomposable pair that are stable under both actions.
pub fn enumerate_additive_subfunctors(
    cat: &BasedCategory,
    cap: u128,
) -> Result<Vec<Subfunctor>> {
    let core = &cat.core;
    let n = core.n_indecs();
    let mut lattices: Vec<Vec<crate::linalg::Subspace>> = Vec::new();
    let mut total: u128 = 1;
    for j in 0..n {
        for i in 0..n {
            let dim = core.ext_dims[j][i];
            total = total.saturating_mul(count_subspaces(core.field, dim));
            if total > cap {
                return Err(Error::EnumerationTooLarge { count: total, cap });
            }
            lattices.push(enumerate_subspaces(core.field, dim, cap)?);
        }
    }
    let mut out = Vec::new();
    let mut odometer = vec![0usize; lattices.len()];
    loop {
        let mut spaces = vec![vec![crate::linalg::Subspace::zero(core.field, 0); n]; n];
        for j in 0..n {
            for i in 0..n {
                spaces[j][i] = lattices[j * n + i][odometer[j * n + i]].clone();
            }
        }
        let f = Subfunctor::from_spaces(core, spaces)?;
        if f.violations(core).is_empty() {
            out.push(f);
        }
        // advance the odometer
        let mut pos = 0;
        loop {
            if pos == odometer.len() {
                return Ok(out);
            }
            odometer[pos] += 1;
            if odometer[pos] < lattices[pos].len() {
                break;
            }
            odometer[pos] = 0;
            pos += 1;
        }
    }
}

/// A composable pair of classes whose composite deflation has the recorded
/// kernel-extension class.
#[derive(Clone, Debug)]
pub struct CompositionEntry {
    pub outer: ExtElem,
    pub inner: ExtElem,
    pub composite: ExtElem,
}

/// All composable pairs with indecomposable ends within the object-size
/// bound, together with their composite classes. The table is independent of
/// any subfunctor, so one table serves every membership scan on a category.
pub fn composition_table(cat: &BasedCategory, bound: usize) -> Result<Vec<CompositionEntry>> {
    let core = &cat.core;
    let n = core.n_indecs();
    let mut entries = Vec::new();
    for cj in 0..n {
        let oc = Obj::single(cj);
        for ai in 0..n {
            for outer in core.ext_elements(&oc, &Obj::single(ai)) {
                if outer.is_zero() {
                    continue;
                }
                let t = cat.realize(&outer);
                let b = t.b().clone();
                if b.len() > bound {
                    continue;
                }
                for ai2 in 0..n {
                    for inner in core.ext_elements(&b, &Obj::single(ai2)) {
                        if inner.is_zero() {
                            continue;
                        }
                        let t2 = cat.realize(&inner);
                        if t2.b().len() > bound {
                            continue;
                        }
                        let gg = core.compose(&t.g, &t2.g)?;
                        let composite = cat.complete_deflation(&gg)?.delta;
                        entries.push(CompositionEntry {
                            outer: outer.clone(),
                            inner,
                            composite,
                        });
                    }
                }
            }
        }
    }
    Ok(entries)
}

/// Falsifier scan against a precomputed composition table: a witness is a
/// composable pair of members whose composite class is not a member.
pub fn composition_falsifier_with<'a>(
    core: &CatCore,
    table: &'a [CompositionEntry],
    f: &Subfunctor,
) -> Option<&'a CompositionEntry> {
    table.iter().find(|e| {
        f.contains(core, &e.outer) && f.contains(core, &e.inner) && !f.contains(core, &e.composite)
    })
}

/// One-shot falsifier for a single subfunctor.
pub fn composition_falsifier(
    cat: &BasedCategory,
    f: &Subfunctor,
    bound: usize,
) -> Result<Option<CompositionEntry>> {
    f.validate(&cat.core)?;
    let table = composition_table(cat, bound)?;
    Ok(composition_falsifier_with(&cat.core, &table, f).cloned())
}

/// The oracle's closed list: additive subfunctors with no composition
/// counterexample.
pub fn oracle_closed_list(
    cat: &BasedCategory,
    cap: u128,
    bound: usize,
) -> Result<Vec<Subfunctor>> {
    let core = &cat.core;
    let table = composition_table(cat, bound)?;
    Ok(enumerate_additive_subfunctors(cat, cap)?
        .into_iter()
        .filter(|f| composition_falsifier_with(core, &table, f).is_none())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defects::enumerate_closed;
    use crate::quiver::build_quiver_category;
    use crate::stmod::build_stmod_category;

    fn closed_sets_match(cat: &BasedCategory, additive_expected: Option<usize>) {
        let oracle = oracle_closed_list(cat, 1 << 20, 3).unwrap();
        let theorem: Vec<Subfunctor> =
            enumerate_closed(cat).unwrap().into_iter().map(|(_, f)| f).collect();
        assert_eq!(oracle.len(), theorem.len(), "closed counts differ on {}", cat.name());
        for f in &oracle {
            assert!(theorem.contains(f), "oracle-closed subfunctor missing from theorem list");
        }
        if let Some(count) = additive_expected {
            let additive = enumerate_additive_subfunctors(cat, 1 << 20).unwrap();
            assert_eq!(additive.len(), count);
        }
    }

    #[test]
    fn a2_additive_and_closed() {
        let cat = build_quiver_category(2, "R", 2).unwrap();
        closed_sets_match(&cat, Some(2));
    }

    #[test]
    fn a3_both_orientations_agree() {
        let linear = build_quiver_category(3, "RR", 2).unwrap();
        // five one-dimensional E-spaces with two covering implications
        closed_sets_match(&linear, Some(13));
        closed_sets_match(&build_quiver_category(3, "RL", 2).unwrap(), None);
    }

    #[test]
    fn stmod_n3_and_n4_agree() {
        closed_sets_match(&build_stmod_category(3, 2).unwrap(), None);
        closed_sets_match(&build_stmod_category(4, 2).unwrap(), None);
    }

    #[test]
    fn falsifier_blind_to_serre_outputs() {
        let cat = build_quiver_category(3, "RR", 2).unwrap();
        let table = composition_table(&cat, 3).unwrap();
        assert!(!table.is_empty());
        for (_, f) in enumerate_closed(&cat).unwrap() {
            assert!(composition_falsifier_with(&cat.core, &table, &f).is_none());
        }
    }

    #[test]
    fn falsifier_catches_every_nonclosed() {
        for cat in
            [build_quiver_category(3, "RR", 2).unwrap(), build_stmod_category(4, 2).unwrap()]
        {
            let table = composition_table(&cat, 3).unwrap();
            let theorem: Vec<Subfunctor> =
                enumerate_closed(&cat).unwrap().into_iter().map(|(_, f)| f).collect();
            let mut nonclosed = 0;
            for f in enumerate_additive_subfunctors(&cat, 1 << 20).unwrap() {
                let is_closed = crate::relative::is_closed(&cat, &f).unwrap();
                assert_eq!(is_closed, theorem.contains(&f));
                let witness = composition_falsifier_with(&cat.core, &table, &f);
                assert_eq!(
                    witness.is_none(),
                    is_closed,
                    "oracle and Serre criterion disagree on {}",
                    cat.name()
                );
                if !is_closed {
                    nonclosed += 1;
                }
            }
            assert!(nonclosed > 0, "no nonclosed additive subfunctor found on {}", cat.name());
        }
    }

    #[test]
    fn extreme_subfunctors_have_no_counterexample() {
        let cat = build_stmod_category(4, 2).unwrap();
        let core = &cat.core;
        assert!(composition_falsifier(&cat, &Subfunctor::zero(core), 3).unwrap().is_none());
        assert!(composition_falsifier(&cat, &Subfunctor::full(core), 3).unwrap().is_none());
    }
}
