//! On-disk formats: category specs, subfunctor files, lattice exports.

use crate::category::{BasedCategory, CatCore, Obj};
use crate::defects::enumerate_closed;
use crate::linalg::Subspace;
use crate::quiver::build_quiver_category;
use crate::relative::Subfunctor;
use crate::stmod::build_stmod_category;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// A category description as read from a TOML file.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct CategorySpec {
    pub backend: String,
    pub p: u64,
    pub n: usize,
    #[serde(default)]
    pub orientation: Option<String>,
}

pub fn category_from_spec(spec: &CategorySpec) -> Result<BasedCategory> {
    match spec.backend.as_str() {
        "quiverA" => {
            let orientation = spec.orientation.as_deref().unwrap_or("R");
            build_quiver_category(spec.n, orientation, spec.p)
        }
        "stmod" => {
            if spec.orientation.is_some() {
                return Err(Error::InvalidSpec(
                    "orientation applies only to the quiverA backend".into(),
                ));
            }
            build_stmod_category(spec.n, spec.p)
        }
        other => Err(Error::InvalidSpec(format!(
            "unknown backend {other:?}; use \"quiverA\" or \"stmod\""
        ))),
    }
}

pub fn load_category(path: &Path) -> Result<BasedCategory> {
    let text = std::fs::read_to_string(path)?;
    let spec: CategorySpec =
        toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    category_from_spec(&spec)
}

/// Subfunctor file: `[spaces]` maps `"Cname|Aname"` to a list of generator
/// coordinate vectors in the chosen basis of E(C, A). Unlisted pairs are zero.
#[derive(Deserialize, Serialize)]
struct SubfunctorFile {
    spaces: BTreeMap<String, Vec<Vec<u64>>>,
}

pub fn parse_subfunctor(core: &CatCore, text: &str) -> Result<Subfunctor> {
    let file: SubfunctorFile =
        toml::from_str(text).map_err(|e| Error::Parse(format!("subfunctor file: {e}")))?;
    let n = core.n_indecs();
    let mut spaces: Vec<Vec<Subspace>> = (0..n)
        .map(|j| (0..n).map(|i| Subspace::zero(core.field, core.ext_dims[j][i])).collect())
        .collect();
    for (key, gens) in &file.spaces {
        let (cname, aname) = key
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("space key {key:?} is not \"C|A\"")))?;
        let j = core.indec_by_name(cname.trim())?;
        let i = core.indec_by_name(aname.trim())?;
        let ambient = core.ext_dims[j][i];
        for v in gens {
            if v.len() != ambient {
                return Err(Error::Parse(format!(
                    "generator for {key:?} has length {}, ambient dimension is {ambient}",
                    v.len()
                )));
            }
        }
        spaces[j][i] = Subspace::span(core.field, ambient, gens.clone());
    }
    Subfunctor::from_spaces(core, spaces)
}

pub fn load_subfunctor(core: &CatCore, path: &Path) -> Result<Subfunctor> {
    let text = std::fs::read_to_string(path)?;
    parse_subfunctor(core, &text)
}

/// Writes a subfunctor in the same format `parse_subfunctor` reads.
pub fn subfunctor_to_toml(core: &CatCore, f: &Subfunctor) -> String {
    let n = core.n_indecs();
    let mut spaces = BTreeMap::new();
    for j in 0..n {
        for i in 0..n {
            let sp = f.space(j, i);
            if sp.dim() > 0 {
                let key = format!(
                    "{}|{}",
                    core.obj_name(&Obj::single(j)),
                    core.obj_name(&Obj::single(i))
                );
                spaces.insert(key, sp.basis().to_vec());
            }
        }
    }
    toml::to_string(&SubfunctorFile { spaces }).expect("subfunctor serializes")
}

#[derive(Serialize)]
struct LatticeNode {
    id: usize,
    serre: Vec<String>,
    total_dim: usize,
}

#[derive(Serialize)]
struct Lattice {
    category: String,
    nodes: Vec<LatticeNode>,
    edges: Vec<(usize, usize)>,
}

fn lattice_of(cat: &BasedCategory) -> Result<Lattice> {
    let core = &cat.core;
    let closed = enumerate_closed(cat)?;
    let nodes: Vec<LatticeNode> = closed
        .iter()
        .enumerate()
        .map(|(id, (s, f))| LatticeNode {
            id,
            serre: s.iter().map(|&x| core.obj_name(&Obj::single(x))).collect(),
            total_dim: f.total_dim(),
        })
        .collect();
    // covering relations of the inclusion order
    let mut edges = Vec::new();
    for (a, (_, fa)) in closed.iter().enumerate() {
        for (b, (_, fb)) in closed.iter().enumerate() {
            if a == b || !fa.le(fb) || fb.le(fa) {
                continue;
            }
            let covered = !closed.iter().enumerate().any(|(c, (_, fc))| {
                c != a && c != b && fa.le(fc) && !fc.le(fa) && fc.le(fb) && !fb.le(fc)
            });
            if covered {
                edges.push((a, b));
            }
        }
    }
    Ok(Lattice { category: core.name.clone(), nodes, edges })
}

pub fn lattice_json(cat: &BasedCategory) -> Result<String> {
    let lattice = lattice_of(cat)?;
    serde_json::to_string_pretty(&lattice).map_err(|e| Error::Parse(e.to_string()))
}

pub fn lattice_dot(cat: &BasedCategory) -> Result<String> {
    let lattice = lattice_of(cat)?;
    let mut out = String::new();
    out.push_str("digraph closed {\n  rankdir=BT;\n  node [shape=box];\n");
    for node in &lattice.nodes {
        out.push_str(&format!(
            "  n{} [label=\"{{{}}} dim {}\"];\n",
            node.id,
            node.serre.join(", "),
            node.total_dim
        ));
    }
    for (a, b) in &lattice.edges {
        out.push_str(&format!("  n{a} -> n{b};\n"));
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn category_specs_build_both_backends() {
        let q: CategorySpec =
            toml::from_str("backend = \"quiverA\"\np = 2\nn = 3\norientation = \"RR\"").unwrap();
        assert_eq!(category_from_spec(&q).unwrap().core.n_indecs(), 6);
        let s: CategorySpec = toml::from_str("backend = \"stmod\"\np = 2\nn = 4").unwrap();
        assert_eq!(category_from_spec(&s).unwrap().core.n_indecs(), 3);
        let bad: CategorySpec = toml::from_str("backend = \"abelian\"\np = 2\nn = 3").unwrap();
        assert!(category_from_spec(&bad).is_err());
    }

    #[test]
    fn subfunctor_round_trips_through_toml() {
        let cat = build_quiver_category(3, "RR", 2).unwrap();
        let core = &cat.core;
        for (_, f) in enumerate_closed(&cat).unwrap() {
            let text = subfunctor_to_toml(core, &f);
            let back = parse_subfunctor(core, &text).unwrap();
            assert_eq!(back, f);
        }
    }

    #[test]
    fn subfunctor_parse_rejects_bad_input() {
        let cat = build_quiver_category(2, "R", 2).unwrap();
        let core = &cat.core;
        assert!(parse_subfunctor(core, "[spaces]\n\"nope\" = []").is_err());
        assert!(parse_subfunctor(core, "[spaces]\n\"[9,9]|[1,1]\" = []").is_err());
        assert!(parse_subfunctor(core, "[spaces]\n\"[1,1]|[2,2]\" = [[1, 0]]").is_err());
        let ok = parse_subfunctor(core, "[spaces]\n\"[1,1]|[2,2]\" = [[1]]").unwrap();
        assert!(ok.is_full(core));
    }

    #[test]
    fn lattice_exports_are_well_formed() {
        let cat = build_quiver_category(3, "RR", 2).unwrap();
        let json = lattice_json(&cat).unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["nodes"].as_array().unwrap().len(), 8);
        // boolean lattice on three atoms has twelve covering edges
        assert_eq!(value["edges"].as_array().unwrap().len(), 12);
        let dot = lattice_dot(&cat).unwrap();
        assert!(dot.starts_with("digraph closed {"));
        assert_eq!(dot.matches("->").count(), 12);
    }
}
