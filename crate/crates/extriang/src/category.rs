//! Finite based additive categories with an explicit extension bifunctor.
//!
//! A `CatCore` stores the whole category as finite data: a list of
//! indecomposables, hom spaces between them with fixed bases and composition
//! structure constants, extension spaces E(C, A) on indecomposable pairs with
//! fixed bases, and the matrices of the left action E(C, g) and right action
//! E(f, A) on every hom basis element. Objects are formal direct sums of
//! indecomposables; all bifunctor data extends blockwise.
//!
//! Realization of extension classes (and every construction that needs an
//! actual middle object: pushouts, pullback squares, deflation completions)
//! is supplied by a backend that remembers how the category was built.

use crate::linalg::{enumerate_vectors, vadd, vscale, vzero, Field, Mat};
use crate::{Error, Result};

/// An indecomposable object of the category.
#[derive(Clone, Debug)]
pub struct Indec {
    pub id: usize,
    pub name: String,
    pub aliases: Vec<String>,
    pub is_projective: bool,
    /// dim of End/rad End; the simple-functor dimension argument needs 1.
    pub end_residue_dim: usize,
}

/// A formal finite direct sum of indecomposables. The order of summands is
/// significant: morphism blocks and extension coordinates refer to positions.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Obj {
    pub summands: Vec<usize>,
}

impl Obj {
    pub fn new(summands: Vec<usize>) -> Obj {
        Obj { summands }
    }

    pub fn single(id: usize) -> Obj {
        Obj { summands: vec![id] }
    }

    pub fn empty() -> Obj {
        Obj { summands: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn concat(&self, other: &Obj) -> Obj {
        let mut s = self.summands.clone();
        s.extend(&other.summands);
        Obj { summands: s }
    }

    /// The same multiset of summands in sorted order (isomorphism-invariant).
    pub fn sorted(&self) -> Obj {
        let mut s = self.summands.clone();
        s.sort_unstable();
        Obj { summands: s }
    }

    pub fn iso_eq(&self, other: &Obj) -> bool {
        self.sorted() == other.sorted()
    }
}

/// A morphism between formal direct sums, stored blockwise: `block(d, s)` is
/// the coordinate vector (in the chosen hom basis) of the component
/// src[s] -> dst[d].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mor {
    pub src: Obj,
    pub dst: Obj,
    blocks: Vec<Vec<u64>>,
}

impl Mor {
    pub fn block(&self, d: usize, s: usize) -> &[u64] {
        &self.blocks[d * self.src.len() + s]
    }

    pub fn block_mut(&mut self, d: usize, s: usize) -> &mut Vec<u64> {
        let n = self.src.len();
        &mut self.blocks[d * n + s]
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|x| *x == 0))
    }
}

/// An element of E(C, A) for formal objects C, A. Coordinates are the
/// concatenation of the blocks E(C[j], A[i]) in row-major order (j outer).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExtElem {
    pub c: Obj,
    pub a: Obj,
    pub coords: Vec<u64>,
}

impl ExtElem {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|x| *x == 0)
    }
}

/// A realized extension: A --f--> B --g--> C together with its class.
#[derive(Clone, Debug)]
pub struct Triangle {
    pub f: Mor,
    pub g: Mor,
    pub delta: ExtElem,
}

impl Triangle {
    pub fn a(&self) -> &Obj {
        &self.f.src
    }

    pub fn b(&self) -> &Obj {
        &self.f.dst
    }

    pub fn c(&self) -> &Obj {
        &self.g.dst
    }
}

/// Suspension data for backends that have one (on objects an involution-like
/// permutation of indecomposables; on morphisms a change of hom coordinates).
#[derive(Clone, Debug)]
pub struct Suspension {
    pub on_obj: Vec<usize>,
    /// on_mor[i][j][t] = coordinates of the suspended t-th basis morphism of
    /// hom(i, j) inside hom(on_obj[i], on_obj[j]).
    pub on_mor: Vec<Vec<Vec<Vec<u64>>>>,
}

/// The finite data of a based category.
pub struct CatCore {
    pub name: String,
    pub field: Field,
    pub indecs: Vec<Indec>,
    /// hom_dims[i][j] = dim Hom(I_i, I_j)
    pub hom_dims: Vec<Vec<usize>>,
    /// comp[i][j][k][a][b] = coordinates of (b-th basis of hom(j,k)) composed
    /// after (a-th basis of hom(i,j)), inside hom(i,k).
    pub comp: Vec<Vec<Vec<Vec<Vec<Vec<u64>>>>>>,
    /// ids[i] = coordinates of the identity in hom(i,i).
    pub ids: Vec<Vec<u64>>,
    /// ext_dims[c][a] = dim E(I_c, I_a)
    pub ext_dims: Vec<Vec<usize>>,
    /// left_act[i][i2][t][j]: matrix of E(I_j, -) applied to the t-th basis
    /// morphism I_i -> I_i2, as a map E(I_j, I_i) -> E(I_j, I_i2).
    pub left_act: Vec<Vec<Vec<Vec<Mat>>>>,
    /// right_act[j2][j][t][i]: matrix of E(-, I_i) applied to the t-th basis
    /// morphism I_j2 -> I_j, as a map E(I_j, I_i) -> E(I_j2, I_i).
    pub right_act: Vec<Vec<Vec<Vec<Mat>>>>,
    pub suspension: Option<Suspension>,
}

impl CatCore {
    pub fn n_indecs(&self) -> usize {
        self.indecs.len()
    }

    pub fn projective_ids(&self) -> Vec<usize> {
        self.indecs.iter().filter(|i| i.is_projective).map(|i| i.id).collect()
    }

    pub fn nonprojective_ids(&self) -> Vec<usize> {
        self.indecs.iter().filter(|i| !i.is_projective).map(|i| i.id).collect()
    }

    pub fn indec_by_name(&self, name: &str) -> Result<usize> {
        let name = name.trim();
        for ind in &self.indecs {
            if ind.name == name || ind.aliases.iter().any(|a| a == name) {
                return Ok(ind.id);
            }
        }
        Err(Error::UnknownObject(name.to_string()))
    }

    pub fn obj_name(&self, obj: &Obj) -> String {
        if obj.is_empty() {
            return "0".to_string();
        }
        obj.summands.iter().map(|&i| self.indecs[i].name.clone()).collect::<Vec<_>>().join(" + ")
    }

    // ----- hom spaces of formal objects -----

    pub fn hom_dim_obj(&self, x: &Obj, y: &Obj) -> usize {
        x.summands
            .iter()
            .map(|&s| y.summands.iter().map(|&d| self.hom_dims[s][d]).sum::<usize>())
            .sum()
    }

    /// Offset of block (d, s) in the concatenated hom coordinates of
    /// Hom(x, y), blocks ordered with d outer.
    fn hom_offset(&self, x: &Obj, y: &Obj, d: usize, s: usize) -> usize {
        let mut off = 0;
        for dd in 0..d {
            for &xs in &x.summands {
                off += self.hom_dims[xs][y.summands[dd]];
            }
        }
        for ss in 0..s {
            off += self.hom_dims[x.summands[ss]][y.summands[d]];
        }
        off
    }

    pub fn zero_mor(&self, src: &Obj, dst: &Obj) -> Mor {
        let blocks = dst
            .summands
            .iter()
            .flat_map(|&d| src.summands.iter().map(move |&s| (s, d)))
            .map(|(s, d)| vzero(self.hom_dims[s][d]))
            .collect();
        Mor { src: src.clone(), dst: dst.clone(), blocks }
    }

    pub fn identity(&self, obj: &Obj) -> Mor {
        let mut m = self.zero_mor(obj, obj);
        for (pos, &i) in obj.summands.iter().enumerate() {
            *m.block_mut(pos, pos) = self.ids[i].clone();
        }
        m
    }

    /// Morphism with a single nonzero block: the t-th hom basis element of
    /// hom(src, dst) between two indecomposables.
    pub fn basis_mor(&self, src: usize, dst: usize, t: usize) -> Mor {
        let mut m = self.zero_mor(&Obj::single(src), &Obj::single(dst));
        let mut v = vzero(self.hom_dims[src][dst]);
        v[t] = 1;
        *m.block_mut(0, 0) = v;
        m
    }

    pub fn mor_from_blocks(&self, src: &Obj, dst: &Obj, blocks: Vec<Vec<u64>>) -> Result<Mor> {
        let expect: Vec<usize> = dst
            .summands
            .iter()
            .flat_map(|&d| src.summands.iter().map(move |&s| self.hom_dims[s][d]))
            .collect();
        if blocks.len() != expect.len() || blocks.iter().zip(&expect).any(|(b, e)| b.len() != *e) {
            return Err(Error::Shape("morphism block layout mismatch".into()));
        }
        let blocks = blocks
            .into_iter()
            .map(|b| b.into_iter().map(|x| self.field.reduce(x)).collect())
            .collect();
        Ok(Mor { src: src.clone(), dst: dst.clone(), blocks })
    }

    /// Inclusion of the summands of `sub` into `whole` at the given positions.
    pub fn inclusion(&self, sub: &Obj, whole: &Obj, positions: &[usize]) -> Mor {
        assert_eq!(sub.len(), positions.len());
        let mut m = self.zero_mor(sub, whole);
        for (s, &pos) in positions.iter().enumerate() {
            assert_eq!(sub.summands[s], whole.summands[pos], "inclusion summand mismatch");
            *m.block_mut(pos, s) = self.ids[sub.summands[s]].clone();
        }
        m
    }

    /// Projection of `whole` onto the summands of `sub` at the given positions.
    pub fn projection(&self, whole: &Obj, sub: &Obj, positions: &[usize]) -> Mor {
        assert_eq!(sub.len(), positions.len());
        let mut m = self.zero_mor(whole, sub);
        for (d, &pos) in positions.iter().enumerate() {
            assert_eq!(sub.summands[d], whole.summands[pos], "projection summand mismatch");
            *m.block_mut(d, pos) = self.ids[sub.summands[d]].clone();
        }
        m
    }

    pub fn compose_coords(&self, i: usize, j: usize, k: usize, fc: &[u64], gc: &[u64]) -> Vec<u64> {
        let f = self.field;
        let mut out = vzero(self.hom_dims[i][k]);
        for (a, &fa) in fc.iter().enumerate() {
            if fa == 0 {
                continue;
            }
            for (b, &gb) in gc.iter().enumerate() {
                if gb == 0 {
                    continue;
                }
                let coeff = f.mul(fa, gb);
                out = vadd(f, &out, &vscale(f, coeff, &self.comp[i][j][k][a][b]));
            }
        }
        out
    }

    /// g after f.
    pub fn compose(&self, g: &Mor, f: &Mor) -> Result<Mor> {
        if f.dst != g.src {
            return Err(Error::Shape("compose: middle objects differ".into()));
        }
        let mut out = self.zero_mor(&f.src, &g.dst);
        for d in 0..g.dst.len() {
            for s in 0..f.src.len() {
                let mut acc = vzero(self.hom_dims[f.src.summands[s]][g.dst.summands[d]]);
                for m in 0..f.dst.len() {
                    let part = self.compose_coords(
                        f.src.summands[s],
                        f.dst.summands[m],
                        g.dst.summands[d],
                        f.block(m, s),
                        g.block(d, m),
                    );
                    acc = vadd(self.field, &acc, &part);
                }
                *out.block_mut(d, s) = acc;
            }
        }
        Ok(out)
    }

    pub fn mor_add(&self, a: &Mor, b: &Mor) -> Result<Mor> {
        if a.src != b.src || a.dst != b.dst {
            return Err(Error::Shape("mor_add shape mismatch".into()));
        }
        let blocks =
            a.blocks.iter().zip(&b.blocks).map(|(x, y)| vadd(self.field, x, y)).collect();
        Ok(Mor { src: a.src.clone(), dst: a.dst.clone(), blocks })
    }

    pub fn mor_scale(&self, c: u64, a: &Mor) -> Mor {
        let blocks = a.blocks.iter().map(|x| vscale(self.field, c, x)).collect();
        Mor { src: a.src.clone(), dst: a.dst.clone(), blocks }
    }

    pub fn mor_neg(&self, a: &Mor) -> Mor {
        self.mor_scale(self.field.neg(1), a)
    }

    /// Basis morphisms of Hom(x, y), ordered like the hom coordinates.
    pub fn mor_basis(&self, x: &Obj, y: &Obj) -> Vec<Mor> {
        let mut out = Vec::new();
        for (d, &yd) in y.summands.iter().enumerate() {
            for (s, &xs) in x.summands.iter().enumerate() {
                for t in 0..self.hom_dims[xs][yd] {
                    let mut m = self.zero_mor(x, y);
                    let mut v = vzero(self.hom_dims[xs][yd]);
                    v[t] = 1;
                    *m.block_mut(d, s) = v;
                    out.push(m);
                }
            }
        }
        out
    }

    /// Concatenated block coordinates of a morphism.
    pub fn mor_coords(&self, m: &Mor) -> Vec<u64> {
        let mut out = Vec::new();
        for d in 0..m.dst.len() {
            for s in 0..m.src.len() {
                out.extend_from_slice(m.block(d, s));
            }
        }
        out
    }

    pub fn mor_from_coords(&self, x: &Obj, y: &Obj, coords: &[u64]) -> Result<Mor> {
        let mut blocks = Vec::new();
        let mut pos = 0;
        for &yd in &y.summands {
            for &xs in &x.summands {
                let len = self.hom_dims[xs][yd];
                if pos + len > coords.len() {
                    return Err(Error::Shape("morphism coordinate length mismatch".into()));
                }
                blocks.push(coords[pos..pos + len].to_vec());
                pos += len;
            }
        }
        if pos != coords.len() {
            return Err(Error::Shape("morphism coordinate length mismatch".into()));
        }
        self.mor_from_blocks(x, y, blocks)
    }

    /// Finds h with f . h = target (h: target.src -> f.src), if any.
    pub fn solve_postcompose(&self, f: &Mor, target: &Mor) -> Option<Mor> {
        if f.dst != target.dst {
            return None;
        }
        let basis = self.mor_basis(&target.src, &f.src);
        let cols: Vec<Vec<u64>> = basis
            .iter()
            .map(|b| self.mor_coords(&self.compose(f, b).expect("solve_postcompose")))
            .collect();
        let ambient = self.hom_dim_obj(&target.src, &f.dst);
        let m = Mat::from_cols(self.field, cols, ambient).ok()?;
        let x = m.solve(&self.mor_coords(target))?;
        let mut h = self.zero_mor(&target.src, &f.src);
        for (t, &c) in x.iter().enumerate() {
            if c != 0 {
                h = self.mor_add(&h, &self.mor_scale(c, &basis[t])).unwrap();
            }
        }
        Some(h)
    }

    /// Finds h with h . f = target (h: f.dst -> target.dst), if any.
    pub fn solve_precompose(&self, f: &Mor, target: &Mor) -> Option<Mor> {
        if f.src != target.src {
            return None;
        }
        let basis = self.mor_basis(&f.dst, &target.dst);
        let cols: Vec<Vec<u64>> = basis
            .iter()
            .map(|b| self.mor_coords(&self.compose(b, f).expect("solve_precompose")))
            .collect();
        let ambient = self.hom_dim_obj(&f.src, &target.dst);
        let m = Mat::from_cols(self.field, cols, ambient).ok()?;
        let x = m.solve(&self.mor_coords(target))?;
        let mut h = self.zero_mor(&f.dst, &target.dst);
        for (t, &c) in x.iter().enumerate() {
            if c != 0 {
                h = self.mor_add(&h, &self.mor_scale(c, &basis[t])).unwrap();
            }
        }
        Some(h)
    }

    /// Finds an invertible h with f . h = target, if any. Unlike
    /// solve_postcompose this scans the whole affine solution set, which is
    /// needed when f is not a monomorphism and the solution is not unique.
    pub fn solve_postcompose_iso(&self, f: &Mor, target: &Mor) -> Option<Mor> {
        if f.dst != target.dst {
            return None;
        }
        let basis = self.mor_basis(&target.src, &f.src);
        let cols: Vec<Vec<u64>> = basis
            .iter()
            .map(|b| self.mor_coords(&self.compose(f, b).expect("solve_postcompose_iso")))
            .collect();
        let ambient = self.hom_dim_obj(&target.src, &f.dst);
        let m = Mat::from_cols(self.field, cols, ambient).ok()?;
        let part = m.solve(&self.mor_coords(target))?;
        let ker = m.kernel();
        for kc in enumerate_vectors(self.field, ker.dim()) {
            let mut coords = part.clone();
            for (t, &c) in kc.iter().enumerate() {
                if c != 0 {
                    coords = vadd(self.field, &coords, &vscale(self.field, c, &ker.basis()[t]));
                }
            }
            let h = self.mor_from_coords(&target.src, &f.src, &coords).ok()?;
            if self.is_iso(&h) {
                return Some(h);
            }
        }
        None
    }

    /// Whether f is an isomorphism (has a two-sided inverse).
    pub fn is_iso(&self, f: &Mor) -> bool {
        let id_dst = self.identity(&f.dst);
        let id_src = self.identity(&f.src);
        match self.solve_postcompose(f, &id_dst) {
            Some(r) => self.compose(&r, f).map(|m| m == id_src).unwrap_or(false),
            None => false,
        }
    }

    /// Matrix of Hom(I_x, f): Hom(I_x, src) -> Hom(I_x, dst).
    pub fn post_matrix(&self, x: usize, f: &Mor) -> Mat {
        let xo = Obj::single(x);
        let rows = self.hom_dim_obj(&xo, &f.dst);
        let cols = self.hom_dim_obj(&xo, &f.src);
        let mut m = Mat::zero(self.field, rows, cols);
        for (d, &dd) in f.dst.summands.iter().enumerate() {
            for (s, &ss) in f.src.summands.iter().enumerate() {
                let ro = self.hom_offset(&xo, &f.dst, d, 0);
                let co = self.hom_offset(&xo, &f.src, s, 0);
                for a in 0..self.hom_dims[x][ss] {
                    let mut basis = vzero(self.hom_dims[x][ss]);
                    basis[a] = 1;
                    let out = self.compose_coords(x, ss, dd, &basis, f.block(d, s));
                    for (c, &v) in out.iter().enumerate() {
                        if v != 0 {
                            let prev = m.get(ro + c, co + a);
                            m.set(ro + c, co + a, self.field.add(prev, v));
                        }
                    }
                }
            }
        }
        m
    }

    /// Matrix of Hom(f, I_x): Hom(dst, I_x) -> Hom(src, I_x).
    pub fn pre_matrix(&self, f: &Mor, x: usize) -> Mat {
        let xo = Obj::single(x);
        let rows = self.hom_dim_obj(&f.src, &xo);
        let cols = self.hom_dim_obj(&f.dst, &xo);
        let mut m = Mat::zero(self.field, rows, cols);
        for (s, &ss) in f.src.summands.iter().enumerate() {
            for (d, &dd) in f.dst.summands.iter().enumerate() {
                let ro = self.hom_offset(&f.src, &xo, 0, s);
                let co = self.hom_offset(&f.dst, &xo, 0, d);
                for b in 0..self.hom_dims[dd][x] {
                    let mut basis = vzero(self.hom_dims[dd][x]);
                    basis[b] = 1;
                    let out = self.compose_coords(ss, dd, x, f.block(d, s), &basis);
                    for (c, &v) in out.iter().enumerate() {
                        if v != 0 {
                            let prev = m.get(ro + c, co + b);
                            m.set(ro + c, co + b, self.field.add(prev, v));
                        }
                    }
                }
            }
        }
        m
    }

    /// Categorical monomorphism: Hom(X, f) injective for every indecomposable.
    pub fn is_mono(&self, f: &Mor) -> bool {
        (0..self.n_indecs()).all(|x| {
            let m = self.post_matrix(x, f);
            m.rank() == m.cols
        })
    }

    /// Categorical epimorphism: Hom(f, X) injective for every indecomposable.
    pub fn is_epi(&self, f: &Mor) -> bool {
        (0..self.n_indecs()).all(|x| {
            let m = self.pre_matrix(f, x);
            m.rank() == m.cols
        })
    }

    // ----- extension spaces of formal objects -----

    pub fn ext_dim_obj(&self, c: &Obj, a: &Obj) -> usize {
        c.summands
            .iter()
            .map(|&j| a.summands.iter().map(|&i| self.ext_dims[j][i]).sum::<usize>())
            .sum()
    }

    pub(crate) fn ext_offset(&self, c: &Obj, a: &Obj, j: usize, i: usize) -> usize {
        let mut off = 0;
        for jj in 0..j {
            for &ai in &a.summands {
                off += self.ext_dims[c.summands[jj]][ai];
            }
        }
        for ii in 0..i {
            off += self.ext_dims[c.summands[j]][a.summands[ii]];
        }
        off
    }

    pub fn ext_zero(&self, c: &Obj, a: &Obj) -> ExtElem {
        ExtElem { c: c.clone(), a: a.clone(), coords: vzero(self.ext_dim_obj(c, a)) }
    }

    pub fn ext_from_coords(&self, c: &Obj, a: &Obj, coords: Vec<u64>) -> Result<ExtElem> {
        if coords.len() != self.ext_dim_obj(c, a) {
            return Err(Error::Shape("extension coordinate length mismatch".into()));
        }
        let coords = coords.into_iter().map(|x| self.field.reduce(x)).collect();
        Ok(ExtElem { c: c.clone(), a: a.clone(), coords })
    }

    pub fn ext_block<'d>(&self, d: &'d ExtElem, j: usize, i: usize) -> &'d [u64] {
        let off = self.ext_offset(&d.c, &d.a, j, i);
        let len = self.ext_dims[d.c.summands[j]][d.a.summands[i]];
        &d.coords[off..off + len]
    }

    pub fn ext_add(&self, a: &ExtElem, b: &ExtElem) -> Result<ExtElem> {
        if a.c != b.c || a.a != b.a {
            return Err(Error::Shape("ext_add shape mismatch".into()));
        }
        Ok(ExtElem { c: a.c.clone(), a: a.a.clone(), coords: vadd(self.field, &a.coords, &b.coords) })
    }

    pub fn ext_scale(&self, c: u64, a: &ExtElem) -> ExtElem {
        ExtElem { c: a.c.clone(), a: a.a.clone(), coords: vscale(self.field, c, &a.coords) }
    }

    /// Basis elements of E(c, a) as formal objects.
    pub fn ext_basis(&self, c: &Obj, a: &Obj) -> Vec<ExtElem> {
        let dim = self.ext_dim_obj(c, a);
        (0..dim)
            .map(|t| {
                let mut coords = vzero(dim);
                coords[t] = 1;
                ExtElem { c: c.clone(), a: a.clone(), coords }
            })
            .collect()
    }

    /// All elements of E(c, a) in a deterministic order.
    pub fn ext_elements(&self, c: &Obj, a: &Obj) -> Vec<ExtElem> {
        enumerate_vectors(self.field, self.ext_dim_obj(c, a))
            .into_iter()
            .map(|coords| ExtElem { c: c.clone(), a: a.clone(), coords })
            .collect()
    }

    /// The block-diagonal direct sum of two extensions.
    pub fn direct_sum_ext(&self, x: &ExtElem, y: &ExtElem) -> ExtElem {
        let c = x.c.concat(&y.c);
        let a = x.a.concat(&y.a);
        let mut out = self.ext_zero(&c, &a);
        for (j, _) in c.summands.iter().enumerate() {
            for (i, _) in a.summands.iter().enumerate() {
                let block: Vec<u64> = if j < x.c.len() && i < x.a.len() {
                    self.ext_block(x, j, i).to_vec()
                } else if j >= x.c.len() && i >= x.a.len() {
                    self.ext_block(y, j - x.c.len(), i - x.a.len()).to_vec()
                } else {
                    continue;
                };
                let off = self.ext_offset(&c, &a, j, i);
                out.coords[off..off + block.len()].copy_from_slice(&block);
            }
        }
        out
    }

    /// Left action: for a: A -> A2 and delta in E(C, A), compute a . delta in
    /// E(C, A2).
    pub fn act_left(&self, a: &Mor, delta: &ExtElem) -> Result<ExtElem> {
        if a.src != delta.a {
            return Err(Error::Shape("act_left: morphism source must be the A end".into()));
        }
        let mut out = self.ext_zero(&delta.c, &a.dst);
        let f = self.field;
        for (j, &cj) in delta.c.summands.iter().enumerate() {
            for (d, &a2d) in a.dst.summands.iter().enumerate() {
                let off = self.ext_offset(&out.c, &out.a, j, d);
                let len = self.ext_dims[cj][a2d];
                for (s, &ai) in a.src.summands.iter().enumerate() {
                    let coords = a.block(d, s);
                    let dblock = self.ext_block(delta, j, s);
                    for (t, &coef) in coords.iter().enumerate() {
                        if coef == 0 {
                            continue;
                        }
                        let acted = self.left_act[ai][a2d][t][cj].mul_vec(dblock);
                        for (k, &v) in acted.iter().enumerate() {
                            out.coords[off + k] = f.add(out.coords[off + k], f.mul(coef, v));
                        }
                        debug_assert_eq!(acted.len(), len);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Right action: for c: C2 -> C and delta in E(C, A), compute delta . c in
    /// E(C2, A).
    pub fn act_right(&self, delta: &ExtElem, c: &Mor) -> Result<ExtElem> {
        if c.dst != delta.c {
            return Err(Error::Shape("act_right: morphism target must be the C end".into()));
        }
        let mut out = self.ext_zero(&c.src, &delta.a);
        let f = self.field;
        for (s, &c2s) in c.src.summands.iter().enumerate() {
            for (i, &ai) in delta.a.summands.iter().enumerate() {
                let off = self.ext_offset(&out.c, &out.a, s, i);
                for (d, &cj) in c.dst.summands.iter().enumerate() {
                    let coords = c.block(d, s);
                    let dblock = self.ext_block(delta, d, i);
                    for (t, &coef) in coords.iter().enumerate() {
                        if coef == 0 {
                            continue;
                        }
                        let acted = self.right_act[c2s][cj][t][ai].mul_vec(dblock);
                        for (k, &v) in acted.iter().enumerate() {
                            out.coords[off + k] = f.add(out.coords[off + k], f.mul(coef, v));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix of the left action by f on E(c_obj, -): E(c_obj, f.src) ->
    /// E(c_obj, f.dst).
    pub fn left_act_matrix(&self, f: &Mor, c_obj: &Obj) -> Mat {
        let cols = self.ext_dim_obj(c_obj, &f.src);
        let rows = self.ext_dim_obj(c_obj, &f.dst);
        let mut m = Mat::zero(self.field, rows, cols);
        for (t, basis) in self.ext_basis(c_obj, &f.src).iter().enumerate() {
            let out = self.act_left(f, basis).expect("left_act_matrix");
            for (r, &v) in out.coords.iter().enumerate() {
                m.set(r, t, v);
            }
        }
        m
    }

    /// Matrix of the right action by g on E(-, a_obj): E(g.dst, a_obj) ->
    /// E(g.src, a_obj).
    pub fn right_act_matrix(&self, g: &Mor, a_obj: &Obj) -> Mat {
        let cols = self.ext_dim_obj(&g.dst, a_obj);
        let rows = self.ext_dim_obj(&g.src, a_obj);
        let mut m = Mat::zero(self.field, rows, cols);
        for (t, basis) in self.ext_basis(&g.dst, a_obj).iter().enumerate() {
            let out = self.act_right(basis, g).expect("right_act_matrix");
            for (r, &v) in out.coords.iter().enumerate() {
                m.set(r, t, v);
            }
        }
        m
    }

    /// Matrix of the connecting map Hom(I_x, C) -> E(I_x, A), phi |-> delta.phi.
    pub fn contra_connecting(&self, delta: &ExtElem, x: usize) -> Mat {
        let xo = Obj::single(x);
        let cols = self.hom_dim_obj(&xo, &delta.c);
        let rows = self.ext_dim_obj(&xo, &delta.a);
        let mut m = Mat::zero(self.field, rows, cols);
        let mut col = 0;
        for (d, &cj) in delta.c.summands.iter().enumerate() {
            for t in 0..self.hom_dims[x][cj] {
                // phi = t-th basis of hom(x, cj), included as block d of C
                let mut phi = self.zero_mor(&xo, &delta.c);
                let mut v = vzero(self.hom_dims[x][cj]);
                v[t] = 1;
                *phi.block_mut(d, 0) = v;
                let acted = self.act_right(delta, &phi).expect("contra_connecting");
                for (r, &val) in acted.coords.iter().enumerate() {
                    m.set(r, col, val);
                }
                col += 1;
            }
        }
        m
    }

    /// Matrix of the connecting map Hom(A, I_x) -> E(C, I_x), psi |-> psi.delta.
    pub fn co_connecting(&self, delta: &ExtElem, x: usize) -> Mat {
        let xo = Obj::single(x);
        let cols = self.hom_dim_obj(&delta.a, &xo);
        let rows = self.ext_dim_obj(&delta.c, &xo);
        let mut m = Mat::zero(self.field, rows, cols);
        let mut col = 0;
        for (s, &ai) in delta.a.summands.iter().enumerate() {
            for t in 0..self.hom_dims[ai][x] {
                let mut psi = self.zero_mor(&delta.a, &xo);
                let mut v = vzero(self.hom_dims[ai][x]);
                v[t] = 1;
                *psi.block_mut(0, s) = v;
                let acted = self.act_left(&psi, delta).expect("co_connecting");
                for (r, &val) in acted.coords.iter().enumerate() {
                    m.set(r, col, val);
                }
                col += 1;
            }
        }
        m
    }

    /// The split triangle A -> A + C -> C realizing the zero class.
    pub fn split_triangle(&self, a: &Obj, c: &Obj) -> Triangle {
        let b = a.concat(c);
        let f = self.inclusion(a, &b, &(0..a.len()).collect::<Vec<_>>());
        let g = self.projection(&b, c, &(a.len()..b.len()).collect::<Vec<_>>());
        Triangle { f, g, delta: self.ext_zero(c, a) }
    }

    // ----- suspension -----

    pub fn suspend_obj(&self, obj: &Obj) -> Result<Obj> {
        let susp = self.suspension.as_ref().ok_or(Error::NoSuspension)?;
        Ok(Obj::new(obj.summands.iter().map(|&i| susp.on_obj[i]).collect()))
    }

    pub fn suspend_mor(&self, f: &Mor) -> Result<Mor> {
        let susp = self.suspension.as_ref().ok_or(Error::NoSuspension)?;
        let src = self.suspend_obj(&f.src)?;
        let dst = self.suspend_obj(&f.dst)?;
        let mut out = self.zero_mor(&src, &dst);
        for d in 0..f.dst.len() {
            for s in 0..f.src.len() {
                let i = f.src.summands[s];
                let j = f.dst.summands[d];
                let mut acc = vzero(self.hom_dims[susp.on_obj[i]][susp.on_obj[j]]);
                for (t, &coef) in f.block(d, s).iter().enumerate() {
                    if coef != 0 {
                        acc = vadd(self.field, &acc, &vscale(self.field, coef, &susp.on_mor[i][j][t]));
                    }
                }
                *out.block_mut(d, s) = acc;
            }
        }
        Ok(out)
    }

    /// Order of the suspension permutation on objects (1 if none).
    pub fn suspension_order(&self) -> usize {
        let Some(susp) = &self.suspension else {
            return 1;
        };
        let n = self.n_indecs();
        let mut perm: Vec<usize> = (0..n).collect();
        for ord in 1..=n + 1 {
            perm = perm.iter().map(|&i| susp.on_obj[i]).collect();
            if perm.iter().enumerate().all(|(i, &x)| i == x) {
                return ord;
            }
        }
        panic!("suspension permutation has no small order");
    }

    // ----- structural sanity -----

    /// Checks unit laws, associativity, action functoriality and the bimodule
    /// law on all basis data. Backends call this once after building.
    pub fn check_core_invariants(&self) -> Result<()> {
        let n = self.n_indecs();
        let fail = |msg: String| Err(Error::InternalConsistency(msg));
        // unit laws
        for i in 0..n {
            for j in 0..n {
                for a in 0..self.hom_dims[i][j] {
                    let mut basis = vzero(self.hom_dims[i][j]);
                    basis[a] = 1;
                    let left = self.compose_coords(i, i, j, &self.ids[i], &basis);
                    let right = self.compose_coords(i, j, j, &basis, &self.ids[j]);
                    if left != basis || right != basis {
                        return fail(format!("unit law fails on hom({i},{j}) basis {a}"));
                    }
                }
            }
        }
        // associativity on basis triples
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        for a in 0..self.hom_dims[i][j] {
                            for b in 0..self.hom_dims[j][k] {
                                for c in 0..self.hom_dims[k][l] {
                                    let mut va = vzero(self.hom_dims[i][j]);
                                    va[a] = 1;
                                    let mut vb = vzero(self.hom_dims[j][k]);
                                    vb[b] = 1;
                                    let mut vc = vzero(self.hom_dims[k][l]);
                                    vc[c] = 1;
                                    let ba = self.compose_coords(i, j, k, &va, &vb);
                                    let lhs = self.compose_coords(i, k, l, &ba, &vc);
                                    let cb = self.compose_coords(j, k, l, &vb, &vc);
                                    let rhs = self.compose_coords(i, j, l, &va, &cb);
                                    if lhs != rhs {
                                        return fail(format!(
                                            "associativity fails on ({i},{j},{k},{l})"
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        // unit actions are identities
        for i in 0..n {
            for j in 0..n {
                let dim = self.ext_dims[j][i];
                if dim == 0 {
                    continue;
                }
                let idm = Mat::identity(self.field, dim);
                let mut l = Mat::zero(self.field, dim, dim);
                for (t, &coef) in self.ids[i].iter().enumerate() {
                    l = l.add(&self.left_act[i][i][t][j].scale(coef)).unwrap();
                }
                if l != idm {
                    return fail(format!("identity left action not id on E({j},{i})"));
                }
                let mut r = Mat::zero(self.field, dim, dim);
                for (t, &coef) in self.ids[j].iter().enumerate() {
                    r = r.add(&self.right_act[j][j][t][i].scale(coef)).unwrap();
                }
                if r != idm {
                    return fail(format!("identity right action not id on E({j},{i})"));
                }
            }
        }
        // action functoriality: act by a composite = composite of actions
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for a in 0..self.hom_dims[i][j] {
                        for b in 0..self.hom_dims[j][k] {
                            let mut va = vzero(self.hom_dims[i][j]);
                            va[a] = 1;
                            let mut vb = vzero(self.hom_dims[j][k]);
                            vb[b] = 1;
                            let ba = self.compose_coords(i, j, k, &va, &vb);
                            for x in 0..n {
                                // left: E(x, i) -> E(x, k)
                                if self.ext_dims[x][i] > 0 {
                                    let mut lhs =
                                        Mat::zero(self.field, self.ext_dims[x][k], self.ext_dims[x][i]);
                                    for (t, &coef) in ba.iter().enumerate() {
                                        lhs = lhs.add(&self.left_act[i][k][t][x].scale(coef)).unwrap();
                                    }
                                    let rhs = self.left_act[j][k][b][x]
                                        .mul(&self.left_act[i][j][a][x])
                                        .unwrap();
                                    if lhs != rhs {
                                        return fail(format!(
                                            "left action functoriality fails ({i},{j},{k}) at {x}"
                                        ));
                                    }
                                }
                                // right: E(k, x) -> E(i, x), contravariant
                                if self.ext_dims[k][x] > 0 {
                                    let mut lhs =
                                        Mat::zero(self.field, self.ext_dims[i][x], self.ext_dims[k][x]);
                                    for (t, &coef) in ba.iter().enumerate() {
                                        lhs = lhs.add(&self.right_act[i][k][t][x].scale(coef)).unwrap();
                                    }
                                    let rhs = self.right_act[i][j][a][x]
                                        .mul(&self.right_act[j][k][b][x])
                                        .unwrap();
                                    if lhs != rhs {
                                        return fail(format!(
                                            "right action functoriality fails ({i},{j},{k}) at {x}"
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        // bimodule law: the two actions commute
        for i in 0..n {
            for i2 in 0..n {
                for j in 0..n {
                    for j2 in 0..n {
                        if self.ext_dims[j][i] == 0 {
                            continue;
                        }
                        for t in 0..self.hom_dims[i][i2] {
                            for u in 0..self.hom_dims[j2][j] {
                                let lhs = self.left_act[i][i2][t][j2]
                                    .mul(&self.right_act[j2][j][u][i])
                                    .unwrap();
                                let rhs = self.right_act[j2][j][u][i2]
                                    .mul(&self.left_act[i][i2][t][j])
                                    .unwrap();
                                if lhs != rhs {
                                    return fail(format!(
                                        "bimodule law fails: hom({i},{i2}) basis {t}, hom({j2},{j}) basis {u}"
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
        // projectivity flags agree with vanishing ext rows
        for i in 0..n {
            let ext_row_zero = (0..n).all(|a| self.ext_dims[i][a] == 0);
            if self.indecs[i].is_projective != ext_row_zero {
                return fail(format!(
                    "projectivity flag of {} disagrees with ext table",
                    self.indecs[i].name
                ));
            }
        }
        // residue fields are one-dimensional
        for ind in &self.indecs {
            if ind.end_residue_dim != 1 {
                return fail(format!("end residue dim of {} is not 1", ind.name));
            }
        }
        Ok(())
    }
}

/// Report of the exactness checks on a realized triangle.
#[derive(Debug, Default)]
pub struct TriangleReport {
    pub failures: Vec<String>,
}

impl TriangleReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks, at every indecomposable X, exactness of the two five-term sequences
/// induced by the triangle, plus g.f = 0 and the shape contract.
pub fn validate_triangle(core: &CatCore, t: &Triangle) -> TriangleReport {
    let mut report = TriangleReport::default();
    if t.f.dst != t.g.src || t.delta.c != *t.c() || t.delta.a != *t.a() {
        report.failures.push("triangle shape mismatch".to_string());
        return report;
    }
    let gf = core.compose(&t.g, &t.f).expect("validate_triangle compose");
    if !gf.is_zero() {
        report.failures.push("g . f != 0".to_string());
    }
    for x in 0..core.n_indecs() {
        // covariant: C(x,A) -> C(x,B) -> C(x,C) -> E(x,A) -> E(x,B) -> E(x,C)
        let m1 = core.post_matrix(x, &t.f);
        let m2 = core.post_matrix(x, &t.g);
        let m3 = core.contra_connecting(&t.delta, x);
        let xo = Obj::single(x);
        let fx = {
            // E(x, A) -> E(x, B): left action by f
            let mut m = Mat::zero(core.field, core.ext_dim_obj(&xo, t.b()), core.ext_dim_obj(&xo, t.a()));
            for (col, basis) in core.ext_basis(&xo, t.a()).iter().enumerate() {
                let out = core.act_left(&t.f, basis).unwrap();
                for (r, &v) in out.coords.iter().enumerate() {
                    m.set(r, col, v);
                }
            }
            m
        };
        let gx = {
            let mut m = Mat::zero(core.field, core.ext_dim_obj(&xo, t.c()), core.ext_dim_obj(&xo, t.b()));
            for (col, basis) in core.ext_basis(&xo, t.b()).iter().enumerate() {
                let out = core.act_left(&t.g, basis).unwrap();
                for (r, &v) in out.coords.iter().enumerate() {
                    m.set(r, col, v);
                }
            }
            m
        };
        let chain = [&m1, &m2, &m3, &fx, &gx];
        let names = ["C(x,B)", "C(x,C)", "E(x,A)", "E(x,B)"];
        for w in 0..4 {
            let im = chain[w].col_space();
            let ker = chain[w + 1].kernel();
            if im != ker {
                report.failures.push(format!(
                    "covariant sequence at X={} not exact at {}",
                    core.indecs[x].name, names[w]
                ));
            }
        }
        // contravariant: C(C,x) -> C(B,x) -> C(A,x) -> E(C,x) -> E(B,x) -> E(A,x)
        let d1 = core.pre_matrix(&t.g, x);
        let d2 = core.pre_matrix(&t.f, x);
        let d3 = core.co_connecting(&t.delta, x);
        let gxr = core.right_act_matrix(&t.g, &xo);
        let fxr = core.right_act_matrix(&t.f, &xo);
        let chain2 = [&d1, &d2, &d3, &gxr, &fxr];
        let names2 = ["C(B,x)", "C(A,x)", "E(C,x)", "E(B,x)"];
        for w in 0..4 {
            let im = chain2[w].col_space();
            let ker = chain2[w + 1].kernel();
            if im != ker {
                report.failures.push(format!(
                    "contravariant sequence at X={} not exact at {}",
                    core.indecs[x].name, names2[w]
                ));
            }
        }
    }
    report
}

/// Result of pushing a triangle along a morphism out of its A end.
pub struct PushoutData {
    /// Triangle over the pushed-forward class a.delta, whose middle object is
    /// the honest pushout.
    pub triangle: Triangle,
    /// The comparison morphism B -> B' of the triangle morphism (a, b, id).
    pub b: Mor,
    /// The extra triangle A -> A' + B -> B' over delta . g'.
    pub extra: Triangle,
}

/// The two middle triangles of a pullback square over a common C end.
pub struct ShiftedSquare {
    pub m1: Mor,
    pub m2: Mor,
    pub e1: Mor,
    pub e2: Mor,
    /// A1 -> M -> B2 over delta1 . y2
    pub row: Triangle,
    /// A2 -> M -> B1 over delta2 . y1
    pub col: Triangle,
}

/// Backend capability: everything that needs genuine middle objects.
/// Backends are plain data, so they are shareable across threads.
pub trait Backend: Send + Sync {
    fn kind(&self) -> &'static str;

    /// A realization of the class: a triangle with that class whose middle is
    /// a formal object. Deterministic in the coordinates.
    fn realize(&self, core: &CatCore, delta: &ExtElem) -> Triangle;

    /// Pushout along a: A -> A' of a realized triangle.
    fn pushout_triangle(&self, core: &CatCore, t: &Triangle, a: &Mor) -> Result<PushoutData>;

    /// Weak pullback square of two classes over the same C end.
    fn shifted_square(&self, core: &CatCore, d1: &ExtElem, d2: &ExtElem) -> Result<ShiftedSquare>;

    /// Completes a deflation g to a triangle (errors if g is not a deflation).
    fn complete_deflation(&self, core: &CatCore, g: &Mor) -> Result<Triangle>;

    /// Recomputes the class of a realized pair (f, g) from scratch. Used as
    /// an independent oracle against the class carried by a triangle.
    fn recover_class(&self, core: &CatCore, f: &Mor, g: &Mor) -> Result<ExtElem>;

    /// Downcast hook for backend-specific inspection in tests.
    fn as_any(&self) -> &dyn std::any::Any;
}

/// A based category bundled with its realization backend.
pub struct BasedCategory {
    pub core: CatCore,
    pub backend: Box<dyn Backend>,
}

impl BasedCategory {
    pub fn realize(&self, delta: &ExtElem) -> Triangle {
        if delta.is_zero() {
            return self.core.split_triangle(&delta.a, &delta.c);
        }
        self.backend.realize(&self.core, delta)
    }

    pub fn pushout_triangle(&self, t: &Triangle, a: &Mor) -> Result<PushoutData> {
        self.backend.pushout_triangle(&self.core, t, a)
    }

    pub fn shifted_square(&self, d1: &ExtElem, d2: &ExtElem) -> Result<ShiftedSquare> {
        self.backend.shifted_square(&self.core, d1, d2)
    }

    pub fn complete_deflation(&self, g: &Mor) -> Result<Triangle> {
        self.backend.complete_deflation(&self.core, g)
    }

    pub fn recover_class(&self, f: &Mor, g: &Mor) -> Result<ExtElem> {
        self.backend.recover_class(&self.core, f, g)
    }

    pub fn name(&self) -> &str {
        &self.core.name
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A one-object toy category: End = k, E(X, X) = k with trivial actions.
    fn toy() -> CatCore {
        let field = Field::new(3).unwrap();
        CatCore {
            name: "toy".into(),
            field,
            indecs: vec![Indec {
                id: 0,
                name: "X".into(),
                aliases: vec![],
                is_projective: false,
                end_residue_dim: 1,
            }],
            hom_dims: vec![vec![1]],
            comp: vec![vec![vec![vec![vec![vec![1]]]]]],
            ids: vec![vec![1]],
            ext_dims: vec![vec![1]],
            left_act: vec![vec![vec![vec![Mat::identity(field, 1)]]]],
            right_act: vec![vec![vec![vec![Mat::identity(field, 1)]]]],
            suspension: None,
        }
    }

    #[test]
    fn toy_core_invariants() {
        toy().check_core_invariants().unwrap();
    }

    #[test]
    fn identity_composition() {
        let c = toy();
        let x = Obj::single(0);
        let id = c.identity(&x);
        assert_eq!(c.compose(&id, &id).unwrap(), id);
        assert!(c.is_mono(&id) && c.is_epi(&id));
    }

    #[test]
    fn action_unitality_and_bilinearity() {
        let c = toy();
        let x = Obj::single(0);
        let id = c.identity(&x);
        let d = c.ext_from_coords(&x, &x, vec![2]).unwrap();
        assert_eq!(c.act_left(&id, &d).unwrap(), d);
        assert_eq!(c.act_right(&d, &id).unwrap(), d);
        let two = c.mor_scale(2, &id);
        // (2 id) . delta = 2 delta
        assert_eq!(c.act_left(&two, &d).unwrap(), c.ext_scale(2, &d));
    }

    #[test]
    fn direct_sum_blocks() {
        let c = toy();
        let x = Obj::single(0);
        let d1 = c.ext_from_coords(&x, &x, vec![1]).unwrap();
        let d2 = c.ext_from_coords(&x, &x, vec![2]).unwrap();
        let s = c.direct_sum_ext(&d1, &d2);
        // blocks (0,0) and (1,1) carry the summands, cross blocks vanish
        assert_eq!(c.ext_block(&s, 0, 0), &[1]);
        assert_eq!(c.ext_block(&s, 1, 1), &[2]);
        assert_eq!(c.ext_block(&s, 0, 1), &[0]);
        assert_eq!(c.ext_block(&s, 1, 0), &[0]);
    }
}
