//! Additive subfunctors of the extension bifunctor and exactness loci of
//! half exact functors.
//!
//! A `Subfunctor` assigns to every pair of indecomposables (C, A) a subspace
//! of E(C, A) stable under the left and right morphism actions; its value on
//! formal sums is the block sum. A `HalfExactFunctor` is a finite linear
//! functor to F_p-vector spaces sending every realized extension to a
//! sequence exact at the middle term. The locus of classes whose deflation
//! the functor makes epi (`e_r`), whose inflation it makes mono (`e_l`), the
//! vanishing loci of connecting maps against object sets (`e_d`, `e_upper_d`)
//! and the exact-structure locus (`e_exact`) are all computed as certified
//! subfunctors: membership is tested element by element against realized
//! triangles and the member set is then verified to be a linear, action
//! stable assignment.

use std::collections::BTreeSet;

use crate::category::{BasedCategory, CatCore, ExtElem, Mor, Obj, Triangle};
use crate::linalg::{Mat, Subspace};
use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Variance {
    Covariant,
    Contravariant,
}

/// An additive subfunctor of E, given by a subspace of E(C, A) for every
/// ordered pair of indecomposables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subfunctor {
    /// Name of the category the subfunctor lives on; guards against mixing.
    pub cat: String,
    /// spaces[j][i] is a subspace of E(I_j, I_i).
    pub spaces: Vec<Vec<Subspace>>,
}

impl Subfunctor {
    pub fn zero(core: &CatCore) -> Subfunctor {
        let n = core.n_indecs();
        Subfunctor {
            cat: core.name.clone(),
            spaces: (0..n)
                .map(|j| (0..n).map(|i| Subspace::zero(core.field, core.ext_dims[j][i])).collect())
                .collect(),
        }
    }

    pub fn full(core: &CatCore) -> Subfunctor {
        let n = core.n_indecs();
        Subfunctor {
            cat: core.name.clone(),
            spaces: (0..n)
                .map(|j| (0..n).map(|i| Subspace::full(core.field, core.ext_dims[j][i])).collect())
                .collect(),
        }
    }

    /// Builds a subfunctor candidate from raw spaces, checking shapes only;
    /// action stability is a separate `validate` call.
    pub fn from_spaces(core: &CatCore, spaces: Vec<Vec<Subspace>>) -> Result<Subfunctor> {
        let n = core.n_indecs();
        if spaces.len() != n || spaces.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("subfunctor space grid has wrong size".into()));
        }
        for (j, row) in spaces.iter().enumerate() {
            for (i, sp) in row.iter().enumerate() {
                if sp.ambient != core.ext_dims[j][i] {
                    return Err(Error::Shape(format!(
                        "subfunctor space at ({}, {}) has ambient {} instead of {}",
                        core.indecs[j].name, core.indecs[i].name, sp.ambient, core.ext_dims[j][i]
                    )));
                }
            }
        }
        Ok(Subfunctor { cat: core.name.clone(), spaces })
    }

    pub fn space(&self, j: usize, i: usize) -> &Subspace {
        &self.spaces[j][i]
    }

    /// Action stability violations, as human readable strings.
    pub fn violations(&self, core: &CatCore) -> Vec<String> {
        let n = core.n_indecs();
        let mut out = Vec::new();
        for j in 0..n {
            for i in 0..n {
                for v in self.spaces[j][i].basis() {
                    for i2 in 0..n {
                        for t in 0..core.hom_dims[i][i2] {
                            let w = core.left_act[i][i2][t][j].mul_vec(v);
                            if !self.spaces[j][i2].contains_vec(&w) {
                                out.push(format!(
                                    "left action by basis morphism {} of Hom({}, {}) leaves F({}, {})",
                                    t,
                                    core.indecs[i].name,
                                    core.indecs[i2].name,
                                    core.indecs[j].name,
                                    core.indecs[i].name
                                ));
                            }
                        }
                    }
                    for j2 in 0..n {
                        for t in 0..core.hom_dims[j2][j] {
                            let w = core.right_act[j2][j][t][i].mul_vec(v);
                            if !self.spaces[j2][i].contains_vec(&w) {
                                out.push(format!(
                                    "right action by basis morphism {} of Hom({}, {}) leaves F({}, {})",
                                    t,
                                    core.indecs[j2].name,
                                    core.indecs[j].name,
                                    core.indecs[j].name,
                                    core.indecs[i].name
                                ));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Checks that the assignment is stable under both actions.
    pub fn validate(&self, core: &CatCore) -> Result<()> {
        let v = self.violations(core);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(v.join("; ")))
        }
    }

    /// Value on a pair of formal objects, as a subspace of E(c, a).
    pub fn value(&self, core: &CatCore, c: &Obj, a: &Obj) -> Subspace {
        let ambient = core.ext_dim_obj(c, a);
        let mut vecs = Vec::new();
        for (j, &cj) in c.summands.iter().enumerate() {
            for (i, &ai) in a.summands.iter().enumerate() {
                let off = core.ext_offset(c, a, j, i);
                for v in self.spaces[cj][ai].basis() {
                    let mut w = vec![0u64; ambient];
                    w[off..off + v.len()].copy_from_slice(v);
                    vecs.push(w);
                }
            }
        }
        Subspace::span(core.field, ambient, vecs)
    }

    /// Whether the class lies in the subfunctor (blockwise membership).
    pub fn contains(&self, core: &CatCore, d: &ExtElem) -> bool {
        for (j, &cj) in d.c.summands.iter().enumerate() {
            for (i, &ai) in d.a.summands.iter().enumerate() {
                if !self.spaces[cj][ai].contains_vec(core.ext_block(d, j, i)) {
                    return false;
                }
            }
        }
        true
    }

    pub fn le(&self, other: &Subfunctor) -> bool {
        self.cat == other.cat
            && self
                .spaces
                .iter()
                .zip(&other.spaces)
                .all(|(r, s)| r.iter().zip(s).all(|(a, b)| b.contains(a)))
    }

    pub fn intersect(&self, other: &Subfunctor) -> Result<Subfunctor> {
        if self.cat != other.cat {
            return Err(Error::CategoryMismatch);
        }
        let mut spaces = Vec::with_capacity(self.spaces.len());
        for (r, s) in self.spaces.iter().zip(&other.spaces) {
            let mut row = Vec::with_capacity(r.len());
            for (a, b) in r.iter().zip(s) {
                row.push(a.intersect(b)?);
            }
            spaces.push(row);
        }
        Ok(Subfunctor { cat: self.cat.clone(), spaces })
    }

    pub fn sum(&self, other: &Subfunctor) -> Result<Subfunctor> {
        if self.cat != other.cat {
            return Err(Error::CategoryMismatch);
        }
        let mut spaces = Vec::with_capacity(self.spaces.len());
        for (r, s) in self.spaces.iter().zip(&other.spaces) {
            let mut row = Vec::with_capacity(r.len());
            for (a, b) in r.iter().zip(s) {
                row.push(a.sum(b)?);
            }
            spaces.push(row);
        }
        Ok(Subfunctor { cat: self.cat.clone(), spaces })
    }

    pub fn total_dim(&self) -> usize {
        self.spaces.iter().flatten().map(|s| s.dim()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn is_full(&self, core: &CatCore) -> bool {
        *self == Subfunctor::full(core)
    }

    /// The smallest action stable assignment containing the given classes.
    pub fn closure(core: &CatCore, gens: &[ExtElem]) -> Subfunctor {
        let mut f = Subfunctor::zero(core);
        for g in gens {
            for (j, &cj) in g.c.summands.iter().enumerate() {
                for (i, &ai) in g.a.summands.iter().enumerate() {
                    let block = core.ext_block(g, j, i).to_vec();
                    f.spaces[cj][ai] = f.spaces[cj][ai]
                        .sum(&Subspace::span(core.field, block.len(), vec![block]))
                        .expect("closure seed");
                }
            }
        }
        let n = core.n_indecs();
        loop {
            let mut changed = false;
            for j in 0..n {
                for i in 0..n {
                    let snapshot: Vec<Vec<u64>> = f.spaces[j][i].basis().to_vec();
                    for v in snapshot {
                        for i2 in 0..n {
                            for t in 0..core.hom_dims[i][i2] {
                                let w = core.left_act[i][i2][t][j].mul_vec(&v);
                                if !f.spaces[j][i2].contains_vec(&w) {
                                    f.spaces[j][i2] = f.spaces[j][i2]
                                        .sum(&Subspace::span(core.field, w.len(), vec![w]))
                                        .expect("closure left step");
                                    changed = true;
                                }
                            }
                        }
                        for j2 in 0..n {
                            for t in 0..core.hom_dims[j2][j] {
                                let w = core.right_act[j2][j][t][i].mul_vec(&v);
                                if !f.spaces[j2][i].contains_vec(&w) {
                                    f.spaces[j2][i] = f.spaces[j2][i]
                                        .sum(&Subspace::span(core.field, w.len(), vec![w]))
                                        .expect("closure right step");
                                    changed = true;
                                }
                            }
                        }
                    }
                }
            }
            if !changed {
                return f;
            }
        }
    }
}

/// A finite linear functor to F_p-vector spaces, half exact on realized
/// extensions. `dims[x]` is the value dimension at the x-th indecomposable;
/// `acts[i][j][t]` is the matrix of the t-th hom basis morphism I_i -> I_j
/// (value(I_i) -> value(I_j) when covariant, value(I_j) -> value(I_i) when
/// contravariant). Values and action matrices on formal sums are blockwise.
#[derive(Clone, Debug)]
pub struct HalfExactFunctor {
    pub variance: Variance,
    pub tag: String,
    pub dims: Vec<usize>,
    pub acts: Vec<Vec<Vec<Mat>>>,
}

impl HalfExactFunctor {
    /// Wraps raw functor data, validating functoriality and half exactness.
    pub fn from_parts(
        cat: &BasedCategory,
        variance: Variance,
        tag: String,
        dims: Vec<usize>,
        acts: Vec<Vec<Vec<Mat>>>,
    ) -> Result<HalfExactFunctor> {
        let h = HalfExactFunctor { variance, tag, dims, acts };
        h.validate(cat)?;
        Ok(h)
    }

    pub fn zero(cat: &BasedCategory) -> Result<HalfExactFunctor> {
        let core = &cat.core;
        let n = core.n_indecs();
        let acts = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..core.hom_dims[i][j]).map(|_| Mat::zero(core.field, 0, 0)).collect()
                    })
                    .collect()
            })
            .collect();
        HalfExactFunctor::from_parts(cat, Variance::Covariant, "0".into(), vec![0; n], acts)
    }

    /// The covariant restricted Yoneda functor Hom(D, -).
    pub fn yoneda(cat: &BasedCategory, d: &[Obj]) -> Result<HalfExactFunctor> {
        let core = &cat.core;
        let ws = flatten_ids(d);
        let n = core.n_indecs();
        let dims = (0..n).map(|x| ws.iter().map(|&w| core.hom_dims[w][x]).sum()).collect();
        let mut acts = Vec::with_capacity(n);
        for i in 0..n {
            let oi = Obj::single(i);
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let oj = Obj::single(j);
                let per_t = core
                    .mor_basis(&oi, &oj)
                    .iter()
                    .map(|u| {
                        let parts: Vec<Mat> =
                            ws.iter().map(|&w| core.post_matrix(w, u)).collect();
                        Mat::block_diag(core.field, &parts)
                    })
                    .collect();
                row.push(per_t);
            }
            acts.push(row);
        }
        let tag = format!("Hom({}, -)", obj_list_name(core, d));
        HalfExactFunctor::from_parts(cat, Variance::Covariant, tag, dims, acts)
    }

    /// The contravariant restricted Yoneda functor Hom(-, D).
    pub fn co_yoneda(cat: &BasedCategory, d: &[Obj]) -> Result<HalfExactFunctor> {
        let core = &cat.core;
        let ws = flatten_ids(d);
        let n = core.n_indecs();
        let dims = (0..n).map(|x| ws.iter().map(|&w| core.hom_dims[x][w]).sum()).collect();
        let mut acts = Vec::with_capacity(n);
        for i in 0..n {
            let oi = Obj::single(i);
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let oj = Obj::single(j);
                let per_t = core
                    .mor_basis(&oi, &oj)
                    .iter()
                    .map(|u| {
                        let parts: Vec<Mat> =
                            ws.iter().map(|&w| core.pre_matrix(u, w)).collect();
                        Mat::block_diag(core.field, &parts)
                    })
                    .collect();
                row.push(per_t);
            }
            acts.push(row);
        }
        let tag = format!("Hom(-, {})", obj_list_name(core, d));
        HalfExactFunctor::from_parts(cat, Variance::Contravariant, tag, dims, acts)
    }

    /// The covariant stable Yoneda functor stHom(D, -): hom spaces modulo
    /// morphisms factoring through a projective.
    pub fn stable_yoneda(cat: &BasedCategory, d: &[Obj]) -> Result<HalfExactFunctor> {
        let core = &cat.core;
        let tag = format!("stHom({}, -)", obj_list_name(core, d));
        HalfExactFunctor::stable_yoneda_on(cat, &flatten_ids(d), tag)
    }

    /// The projectivization functor attached to a set of (non-projective)
    /// indecomposables: the stable Yoneda functor of everything outside it.
    pub fn projectivization(
        cat: &BasedCategory,
        serre: &BTreeSet<usize>,
    ) -> Result<HalfExactFunctor> {
        let core = &cat.core;
        let ws: Vec<usize> =
            core.nonprojective_ids().into_iter().filter(|w| !serre.contains(w)).collect();
        let names: Vec<&str> =
            serre.iter().map(|&w| core.indecs[w].name.as_str()).collect();
        let tag = format!("proj({{{}}})", names.join(","));
        HalfExactFunctor::stable_yoneda_on(cat, &ws, tag)
    }

    fn stable_yoneda_on(
        cat: &BasedCategory,
        ws: &[usize],
        tag: String,
    ) -> Result<HalfExactFunctor> {
        let core = &cat.core;
        let n = core.n_indecs();
        let quots: Vec<Vec<(Mat, Mat)>> = ws
            .iter()
            .map(|&w| (0..n).map(|x| stable_quotient(core, w, x)).collect())
            .collect();
        let dims = (0..n).map(|x| quots.iter().map(|q| q[x].0.rows).sum()).collect();
        let mut acts = Vec::with_capacity(n);
        for i in 0..n {
            let oi = Obj::single(i);
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let oj = Obj::single(j);
                let mut per_t = Vec::new();
                for u in core.mor_basis(&oi, &oj) {
                    let mut parts = Vec::with_capacity(ws.len());
                    for (wi, &w) in ws.iter().enumerate() {
                        let post = core.post_matrix(w, &u);
                        // Post-composition must preserve the projective
                        // factoring span, else the quotient map is undefined.
                        let qj = &quots[wi][j].0;
                        for v in proj_span(core, w, i) {
                            let img = qj.mul_vec(&post.mul_vec(&v));
                            if img.iter().any(|&x| x != 0) {
                                return Err(Error::InternalConsistency(format!(
                                    "{}: projective span not preserved by Hom({}, -)",
                                    tag, core.indecs[w].name
                                )));
                            }
                        }
                        parts.push(qj.mul(&post)?.mul(&quots[wi][i].1)?);
                    }
                    per_t.push(Mat::block_diag(core.field, &parts));
                }
                row.push(per_t);
            }
            acts.push(row);
        }
        HalfExactFunctor::from_parts(cat, Variance::Covariant, tag, dims, acts)
    }

    /// The composite of the functor with the k-th power of the suspension.
    pub fn compose_shift(&self, cat: &BasedCategory, k: usize) -> Result<HalfExactFunctor> {
        if k == 0 {
            return Ok(self.clone());
        }
        let core = &cat.core;
        let susp = core.suspension.as_ref().ok_or(Error::NoSuspension)?;
        let n = core.n_indecs();
        let mut sig: Vec<usize> = (0..n).collect();
        for _ in 0..k {
            sig = sig.iter().map(|&x| susp.on_obj[x]).collect();
        }
        let dims = (0..n).map(|x| self.dims[sig[x]]).collect();
        let mut acts = Vec::with_capacity(n);
        for i in 0..n {
            let oi = Obj::single(i);
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let oj = Obj::single(j);
                let mut per_t = Vec::new();
                for u in core.mor_basis(&oi, &oj) {
                    let mut su = u.clone();
                    for _ in 0..k {
                        su = core.suspend_mor(&su)?;
                    }
                    per_t.push(self.apply(core, &su));
                }
                row.push(per_t);
            }
            acts.push(row);
        }
        let tag = format!("{} o Sigma^{}", self.tag, k);
        HalfExactFunctor::from_parts(cat, self.variance, tag, dims, acts)
    }

    pub fn value_dim_obj(&self, obj: &Obj) -> usize {
        obj.summands.iter().map(|&x| self.dims[x]).sum()
    }

    /// Matrix of the functor on a morphism (blockwise on formal sums).
    pub fn apply(&self, core: &CatCore, m: &Mor) -> Mat {
        apply_tables(core, self.variance, &self.dims, &self.acts, m)
    }

    /// Functoriality, identities and half exactness on every realized class
    /// over indecomposable end pairs.
    pub fn validate(&self, cat: &BasedCategory) -> Result<()> {
        let core = &cat.core;
        validate_tables(core, self.variance, &self.dims, &self.acts, &self.tag)?;
        let n = core.n_indecs();
        for cj in 0..n {
            let oc = Obj::single(cj);
            for ai in 0..n {
                let oa = Obj::single(ai);
                for delta in core.ext_elements(&oc, &oa) {
                    let t = cat.realize(&delta);
                    let (first, second) = match self.variance {
                        Variance::Covariant => {
                            (self.apply(core, &t.f), self.apply(core, &t.g))
                        }
                        Variance::Contravariant => {
                            (self.apply(core, &t.g), self.apply(core, &t.f))
                        }
                    };
                    if first.col_space() != second.kernel() {
                        return Err(Error::InternalConsistency(format!(
                            "{}: not exact at the middle on a class in E({}, {})",
                            self.tag, core.indecs[cj].name, core.indecs[ai].name
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Blockwise matrix of a linear functor given by per-indecomposable value
/// dimensions and action matrices on hom bases.
pub(crate) fn apply_tables(
    core: &CatCore,
    variance: Variance,
    dims: &[usize],
    acts: &[Vec<Vec<Mat>>],
    m: &Mor,
) -> Mat {
    let f = core.field;
    let vdim = |o: &Obj| o.summands.iter().map(|&x| dims[x]).sum::<usize>();
    let voff = |o: &Obj, k: usize| o.summands[..k].iter().map(|&x| dims[x]).sum::<usize>();
    let (rows, cols) = match variance {
        Variance::Covariant => (vdim(&m.dst), vdim(&m.src)),
        Variance::Contravariant => (vdim(&m.src), vdim(&m.dst)),
    };
    let mut out = Mat::zero(f, rows, cols);
    for (d, &jd) in m.dst.summands.iter().enumerate() {
        for (s, &is) in m.src.summands.iter().enumerate() {
            let (ro, co) = match variance {
                Variance::Covariant => (voff(&m.dst, d), voff(&m.src, s)),
                Variance::Contravariant => (voff(&m.src, s), voff(&m.dst, d)),
            };
            for (t, &coef) in m.block(d, s).iter().enumerate() {
                if coef == 0 {
                    continue;
                }
                let a = &acts[is][jd][t];
                for r in 0..a.rows {
                    for c in 0..a.cols {
                        let v = f.mul(coef, a.get(r, c));
                        if v != 0 {
                            out.set(ro + r, co + c, f.add(out.get(ro + r, co + c), v));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Shape, identity and functoriality checks for linear functor tables.
pub(crate) fn validate_tables(
    core: &CatCore,
    variance: Variance,
    dims: &[usize],
    acts: &[Vec<Vec<Mat>>],
    tag: &str,
) -> Result<()> {
    let n = core.n_indecs();
    if dims.len() != n || acts.len() != n {
        return Err(Error::Shape(format!("{}: functor data has wrong length", tag)));
    }
    for i in 0..n {
        if acts[i].len() != n {
            return Err(Error::Shape(format!("{}: functor data has wrong length", tag)));
        }
        for j in 0..n {
            if acts[i][j].len() != core.hom_dims[i][j] {
                return Err(Error::Shape(format!(
                    "{}: wrong number of action matrices at ({}, {})",
                    tag, core.indecs[i].name, core.indecs[j].name
                )));
            }
            let (er, ec) = match variance {
                Variance::Covariant => (dims[j], dims[i]),
                Variance::Contravariant => (dims[i], dims[j]),
            };
            for m in &acts[i][j] {
                if m.rows != er || m.cols != ec {
                    return Err(Error::Shape(format!(
                        "{}: action matrix at ({}, {}) is {}x{}, expected {}x{}",
                        tag, core.indecs[i].name, core.indecs[j].name, m.rows, m.cols, er, ec
                    )));
                }
            }
        }
    }
    for x in 0..n {
        let id = apply_tables(core, variance, dims, acts, &core.identity(&Obj::single(x)));
        if id != Mat::identity(core.field, dims[x]) {
            return Err(Error::InternalConsistency(format!(
                "{}: identity not sent to identity at {}",
                tag, core.indecs[x].name
            )));
        }
    }
    for i in 0..n {
        let oi = Obj::single(i);
        for j in 0..n {
            let oj = Obj::single(j);
            for k in 0..n {
                let ok = Obj::single(k);
                for u in core.mor_basis(&oi, &oj) {
                    for v in core.mor_basis(&oj, &ok) {
                        let vu = core.compose(&v, &u)?;
                        let lhs = apply_tables(core, variance, dims, acts, &vu);
                        let fu = apply_tables(core, variance, dims, acts, &u);
                        let fv = apply_tables(core, variance, dims, acts, &v);
                        let rhs = match variance {
                            Variance::Covariant => fv.mul(&fu)?,
                            Variance::Contravariant => fu.mul(&fv)?,
                        };
                        if lhs != rhs {
                            return Err(Error::InternalConsistency(format!(
                                "{}: functoriality fails on Hom({}, {}) x Hom({}, {})",
                                tag,
                                core.indecs[i].name,
                                core.indecs[j].name,
                                core.indecs[j].name,
                                core.indecs[k].name
                            )));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn flatten_ids(objs: &[Obj]) -> Vec<usize> {
    objs.iter().flat_map(|o| o.summands.iter().copied()).collect()
}

fn obj_list_name(core: &CatCore, objs: &[Obj]) -> String {
    objs.iter().map(|o| core.obj_name(o)).collect::<Vec<_>>().join(" + ")
}

/// Coordinate vectors spanning the morphisms I_w -> I_x that factor through a
/// projective.
pub(crate) fn proj_span(core: &CatCore, w: usize, x: usize) -> Vec<Vec<u64>> {
    let mut vecs = Vec::new();
    for p in core.projective_ids() {
        for a in 0..core.hom_dims[w][p] {
            let mut ua = vec![0u64; core.hom_dims[w][p]];
            ua[a] = 1;
            for b in 0..core.hom_dims[p][x] {
                let mut ub = vec![0u64; core.hom_dims[p][x]];
                ub[b] = 1;
                vecs.push(core.compose_coords(w, p, x, &ua, &ub));
            }
        }
    }
    vecs
}

/// Quotient of Hom(I_w, I_x) by the projective factoring span: (q, s) with
/// q the projection onto quotient coordinates and s a section.
pub(crate) fn stable_quotient(core: &CatCore, w: usize, x: usize) -> (Mat, Mat) {
    let span = proj_span(core, w, x);
    let m = Mat::from_cols(core.field, span, core.hom_dims[w][x]).expect("stable_quotient");
    m.cokernel()
}

#[derive(Clone, Copy)]
enum Side {
    Right,
    Left,
}

fn locus_member(core: &CatCore, h: &HalfExactFunctor, t: &Triangle, side: Side) -> bool {
    match (h.variance, side) {
        (Variance::Covariant, Side::Right) => {
            let m = h.apply(core, &t.g);
            m.rank() == h.value_dim_obj(t.c())
        }
        (Variance::Covariant, Side::Left) => {
            let m = h.apply(core, &t.f);
            m.rank() == h.value_dim_obj(t.a())
        }
        (Variance::Contravariant, Side::Right) => {
            let m = h.apply(core, &t.f);
            m.rank() == h.value_dim_obj(t.a())
        }
        (Variance::Contravariant, Side::Left) => {
            let m = h.apply(core, &t.g);
            m.rank() == h.value_dim_obj(t.c())
        }
    }
}

/// Collects, per indecomposable end pair, the classes passing the member
/// test, and certifies that they form an action stable subfunctor.
pub(crate) fn certified_locus<F>(cat: &BasedCategory, what: &str, member: F) -> Result<Subfunctor>
where
    F: Fn(&CatCore, &Triangle) -> Result<bool>,
{
    let core = &cat.core;
    let n = core.n_indecs();
    let mut spaces = Vec::with_capacity(n);
    for j in 0..n {
        let oc = Obj::single(j);
        let mut row = Vec::with_capacity(n);
        for i in 0..n {
            let oa = Obj::single(i);
            let d = core.ext_dims[j][i];
            let mut members = Vec::new();
            for delta in core.ext_elements(&oc, &oa) {
                let t = cat.realize(&delta);
                if member(core, &t)? {
                    members.push(delta.coords);
                }
            }
            let span = Subspace::span(core.field, d, members.clone());
            let p = core.field.p as u128;
            if members.len() as u128 != p.pow(span.dim() as u32) {
                return Err(Error::InternalConsistency(format!(
                    "{} is not linear at ({}, {})",
                    what, core.indecs[j].name, core.indecs[i].name
                )));
            }
            row.push(span);
        }
        spaces.push(row);
    }
    let f = Subfunctor { cat: core.name.clone(), spaces };
    f.validate(core).map_err(|e| {
        Error::InternalConsistency(format!("{} is not action stable: {}", what, e))
    })?;
    Ok(f)
}

/// Classes whose deflation the functor sends to an epimorphism.
pub fn e_r(cat: &BasedCategory, h: &HalfExactFunctor) -> Result<Subfunctor> {
    certified_locus(cat, &format!("right exactness locus of {}", h.tag), |core, t| {
        Ok(locus_member(core, h, t, Side::Right))
    })
}

/// Classes whose inflation the functor sends to a monomorphism.
pub fn e_l(cat: &BasedCategory, h: &HalfExactFunctor) -> Result<Subfunctor> {
    certified_locus(cat, &format!("left exactness locus of {}", h.tag), |core, t| {
        Ok(locus_member(core, h, t, Side::Left))
    })
}

/// Classes realized by a sequence with monic inflation and epic deflation.
pub fn e_exact(cat: &BasedCategory) -> Result<Subfunctor> {
    certified_locus(cat, "exact structure locus", |core, t| {
        Ok(core.is_mono(&t.f) && core.is_epi(&t.g))
    })
}

/// Classes killed by right action against every morphism out of the given
/// objects: the kernel of the contravariant connecting maps.
pub fn e_d(core: &CatCore, dobjs: &[Obj]) -> Subfunctor {
    let ids: BTreeSet<usize> = dobjs.iter().flat_map(|o| o.summands.iter().copied()).collect();
    let n = core.n_indecs();
    let mut spaces = Vec::with_capacity(n);
    for j in 0..n {
        let mut row = Vec::with_capacity(n);
        for i in 0..n {
            let mut sp = Subspace::full(core.field, core.ext_dims[j][i]);
            for &w in &ids {
                for t in 0..core.hom_dims[w][j] {
                    sp = sp.intersect(&core.right_act[w][j][t][i].kernel()).expect("e_d");
                }
            }
            row.push(sp);
        }
        spaces.push(row);
    }
    Subfunctor { cat: core.name.clone(), spaces }
}

/// Classes killed by left action against every morphism into the given
/// objects: the kernel of the covariant connecting maps.
pub fn e_upper_d(core: &CatCore, dobjs: &[Obj]) -> Subfunctor {
    let ids: BTreeSet<usize> = dobjs.iter().flat_map(|o| o.summands.iter().copied()).collect();
    let n = core.n_indecs();
    let mut spaces = Vec::with_capacity(n);
    for j in 0..n {
        let mut row = Vec::with_capacity(n);
        for i in 0..n {
            let mut sp = Subspace::full(core.field, core.ext_dims[j][i]);
            for &w in &ids {
                for t in 0..core.hom_dims[i][w] {
                    sp = sp.intersect(&core.left_act[i][w][t][j].kernel()).expect("e_upper_d");
                }
            }
            row.push(sp);
        }
        spaces.push(row);
    }
    Subfunctor { cat: core.name.clone(), spaces }
}

/// Intersection of the right and left loci of the functor composed with all
/// powers of the suspension, checked to stabilize after one period.
pub fn proper_class_from_homological(
    cat: &BasedCategory,
    h: &HalfExactFunctor,
) -> Result<Subfunctor> {
    let core = &cat.core;
    if core.suspension.is_none() {
        return Err(Error::NoSuspension);
    }
    let m = core.suspension_order();
    let mut f = Subfunctor::full(core);
    let mut after_period = None;
    for k in 0..2 * m {
        let hk = h.compose_shift(cat, k)?;
        f = f.intersect(&e_r(cat, &hk)?)?;
        f = f.intersect(&e_l(cat, &hk)?)?;
        if k + 1 == m {
            after_period = Some(f.clone());
        }
    }
    if after_period.as_ref() != Some(&f) {
        return Err(Error::InternalConsistency(
            "shift intersection did not stabilize after one suspension period".into(),
        ));
    }
    Ok(f)
}

/// If the functor is right exact on every member of the subfunctor, the
/// subfunctor must lie inside the right exactness locus. Returns None when
/// the premise fails (the check is then vacuous), Some(verdict) otherwise.
pub fn maximality_check(
    cat: &BasedCategory,
    f: &Subfunctor,
    h: &HalfExactFunctor,
) -> Result<Option<bool>> {
    let core = &cat.core;
    let n = core.n_indecs();
    for j in 0..n {
        let oc = Obj::single(j);
        for i in 0..n {
            let oa = Obj::single(i);
            for coords in f.spaces[j][i].elements() {
                let delta = core.ext_from_coords(&oc, &oa, coords)?;
                let t = cat.realize(&delta);
                if !locus_member(core, h, &t, Side::Right) {
                    return Ok(None);
                }
            }
        }
    }
    let er = e_r(cat, h)?;
    Ok(Some(f.le(&er)))
}

/// Whether the subfunctor is closed: equal to the subfunctor cut out by the
/// Serre set of its own defects.
pub fn is_closed(cat: &BasedCategory, f: &Subfunctor) -> Result<bool> {
    let s = crate::defects::serre_support(cat, f)?;
    Ok(*f == crate::defects::serre_to_subfunctor(cat, &s)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::build_quiver_category;
    use crate::stmod::build_stmod_category;

    fn a2() -> BasedCategory {
        build_quiver_category(2, "R", 2).unwrap()
    }

    fn a3() -> BasedCategory {
        build_quiver_category(3, "RR", 2).unwrap()
    }

    fn single_named(cat: &BasedCategory, name: &str) -> Obj {
        Obj::single(cat.core.indec_by_name(name).unwrap())
    }

    #[test]
    fn a2_yoneda_loci() {
        let cat = a2();
        let s1 = single_named(&cat, "[1,1]");
        let p1 = single_named(&cat, "[1,2]");
        let h1 = HalfExactFunctor::yoneda(&cat, &[s1.clone()]).unwrap();
        assert!(e_r(&cat, &h1).unwrap().is_zero());
        assert!(e_l(&cat, &h1).unwrap().is_full(&cat.core));
        let hp = HalfExactFunctor::yoneda(&cat, &[p1]).unwrap();
        assert!(e_r(&cat, &hp).unwrap().is_full(&cat.core));
        let k2 = HalfExactFunctor::co_yoneda(&cat, &[single_named(&cat, "[2,2]")]).unwrap();
        assert!(e_r(&cat, &k2).unwrap().is_zero());
        assert!(e_l(&cat, &k2).unwrap().is_full(&cat.core));
        let hz = HalfExactFunctor::zero(&cat).unwrap();
        assert!(e_r(&cat, &hz).unwrap().is_full(&cat.core));
    }

    #[test]
    fn yoneda_locus_is_connecting_kernel() {
        let cat = a3();
        let names = ["[1,1]", "[1,2]", "[2,2]", "[3,3]"];
        for name in names {
            let d = vec![single_named(&cat, name)];
            let h = HalfExactFunctor::yoneda(&cat, &d).unwrap();
            assert_eq!(e_r(&cat, &h).unwrap(), e_d(&cat.core, &d), "e_d mismatch at {name}");
            let k = HalfExactFunctor::co_yoneda(&cat, &d).unwrap();
            assert_eq!(
                e_r(&cat, &k).unwrap(),
                e_upper_d(&cat.core, &d),
                "e_upper_d mismatch at {name}"
            );
        }
        let pair = vec![single_named(&cat, "[1,1]"), single_named(&cat, "[2,3]")];
        let h = HalfExactFunctor::yoneda(&cat, &pair).unwrap();
        assert_eq!(e_r(&cat, &h).unwrap(), e_d(&cat.core, &pair));
    }

    #[test]
    fn e_d_extremes() {
        let cat = a3();
        let core = &cat.core;
        let projs: Vec<Obj> = core.projective_ids().into_iter().map(Obj::single).collect();
        assert!(e_d(core, &projs).is_full(core));
        let all: Vec<Obj> = (0..core.n_indecs()).map(Obj::single).collect();
        assert!(e_d(core, &all).is_zero());
        assert!(e_upper_d(core, &all).is_zero());
    }

    #[test]
    fn stable_yoneda_same_right_locus() {
        let cat = a3();
        let core = &cat.core;
        for &w in &core.nonprojective_ids() {
            let d = vec![Obj::single(w)];
            let h = HalfExactFunctor::yoneda(&cat, &d).unwrap();
            let hs = HalfExactFunctor::stable_yoneda(&cat, &d).unwrap();
            assert_eq!(e_r(&cat, &h).unwrap(), e_r(&cat, &hs).unwrap());
        }
    }

    #[test]
    fn closure_propagates_actions() {
        let cat = a3();
        let core = &cat.core;
        let c0 = core.indec_by_name("[1,1]").unwrap();
        let a23 = core.indec_by_name("[2,3]").unwrap();
        let gen = core
            .ext_from_coords(&Obj::single(c0), &Obj::single(a23), vec![1])
            .unwrap();
        let f = Subfunctor::closure(core, &[gen]);
        f.validate(core).unwrap();
        let a22 = core.indec_by_name("[2,2]").unwrap();
        let c12 = core.indec_by_name("[1,2]").unwrap();
        // the class forces its pushforward along [2,3] -> [2,2] and its
        // pullback along [1,2] -> [1,1]
        assert_eq!(f.spaces[c0][a23].dim(), 1);
        assert_eq!(f.spaces[c0][a22].dim(), 1);
        assert_eq!(f.spaces[c12][a23].dim(), 1);
        assert_eq!(f.total_dim(), 3);
        // a lone full space at a pair with a nonzero outgoing action is not
        // stable
        let mut bad = Subfunctor::zero(core);
        bad.spaces[c0][a23] = Subspace::full(core.field, 1);
        assert!(!bad.violations(core).is_empty());
    }

    #[test]
    fn quiver_triangles_are_exact() {
        let cat = a3();
        assert!(e_exact(&cat).unwrap().is_full(&cat.core));
    }

    #[test]
    fn stable_triangles_are_never_exact() {
        let cat = build_stmod_category(4, 2).unwrap();
        assert!(e_exact(&cat).unwrap().is_zero());
    }

    #[test]
    fn proper_class_of_full_yoneda_vanishes() {
        let cat = build_stmod_category(4, 2).unwrap();
        let all: Vec<Obj> = (0..cat.core.n_indecs()).map(Obj::single).collect();
        let h = HalfExactFunctor::yoneda(&cat, &all).unwrap();
        let f = proper_class_from_homological(&cat, &h).unwrap();
        assert!(f.is_zero());
        let quiver = a2();
        let hq = HalfExactFunctor::yoneda(&quiver, &[single_named(&quiver, "[1,1]")]).unwrap();
        assert!(matches!(
            proper_class_from_homological(&quiver, &hq),
            Err(Error::NoSuspension)
        ));
    }

    #[test]
    fn maximality_vacuous_and_binding() {
        let cat = a2();
        let h = HalfExactFunctor::yoneda(&cat, &[single_named(&cat, "[1,1]")]).unwrap();
        let zero = Subfunctor::zero(&cat.core);
        assert_eq!(maximality_check(&cat, &zero, &h).unwrap(), Some(true));
        let full = Subfunctor::full(&cat.core);
        assert_eq!(maximality_check(&cat, &full, &h).unwrap(), None);
        let hp = HalfExactFunctor::yoneda(&cat, &[single_named(&cat, "[1,2]")]).unwrap();
        assert_eq!(maximality_check(&cat, &full, &hp).unwrap(), Some(true));
    }

    #[test]
    fn subfunctor_value_blocks() {
        let cat = a3();
        let core = &cat.core;
        let f = Subfunctor::full(core);
        let c = single_named(&cat, "[1,1]").concat(&single_named(&cat, "[1,2]"));
        let a = single_named(&cat, "[2,3]").concat(&single_named(&cat, "[2,2]"));
        let v = f.value(core, &c, &a);
        assert_eq!(v.dim(), core.ext_dim_obj(&c, &a));
        let z = Subfunctor::zero(core);
        assert_eq!(z.value(core, &c, &a).dim(), 0);
        assert!(z.contains(core, &core.ext_zero(&c, &a)));
    }
}
