//! Interval-module backend: representations of a type A_n line quiver.
//!
//! The quiver has vertices 1..n and an orientation letter per edge: `R` makes
//! the arrow point right (v -> v+1), `L` left (v+1 -> v). Indecomposable
//! representations are the interval modules [a,b]; every representation is a
//! finite direct sum of intervals. Extensions are computed from minimal
//! projective presentations, and middles of realized classes are honest
//! cokernel representations decomposed back into intervals by peeling off
//! summands with split idempotents.

use crate::category::{
    Backend, BasedCategory, CatCore, ExtElem, Indec, Mor, Obj, PushoutData, ShiftedSquare,
    Triangle,
};
use crate::linalg::{Field, Mat};
use crate::{Error, Result};

/// A representation: a vector space dimension per vertex and a matrix per
/// edge, pointing the way the orientation says.
#[derive(Clone, Debug)]
pub struct Rep {
    pub dims: Vec<usize>,
    pub maps: Vec<Mat>,
}

impl Rep {
    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }
}

/// A morphism of representations: one matrix per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepMor {
    pub mats: Vec<Mat>,
}

/// The quiver shape: number of vertices and edge directions.
#[derive(Clone, Debug)]
struct Quiver {
    n: usize,
    /// right[e] = true means edge e carries the arrow e -> e+1.
    right: Vec<bool>,
    field: Field,
}

impl Quiver {
    fn edge_tail(&self, e: usize) -> usize {
        if self.right[e] {
            e
        } else {
            e + 1
        }
    }

    fn edge_head(&self, e: usize) -> usize {
        if self.right[e] {
            e + 1
        } else {
            e
        }
    }

    /// Interval module on vertices a..=b (0-based).
    fn interval(&self, a: usize, b: usize) -> Rep {
        let dims: Vec<usize> = (0..self.n).map(|v| usize::from(v >= a && v <= b)).collect();
        let maps = (0..self.n - 1)
            .map(|e| {
                let t = self.edge_tail(e);
                let h = self.edge_head(e);
                let mut m = Mat::zero(self.field, dims[h], dims[t]);
                if dims[t] == 1 && dims[h] == 1 {
                    m.set(0, 0, 1);
                }
                m
            })
            .collect();
        Rep { dims, maps }
    }

    fn dsum(&self, parts: &[&Rep]) -> Rep {
        let dims: Vec<usize> =
            (0..self.n).map(|v| parts.iter().map(|r| r.dims[v]).sum()).collect();
        let maps = (0..self.n - 1)
            .map(|e| {
                let t = self.edge_tail(e);
                let h = self.edge_head(e);
                let mut m = Mat::zero(self.field, dims[h], dims[t]);
                let mut ro = 0;
                let mut co = 0;
                for r in parts {
                    for i in 0..r.dims[h] {
                        for j in 0..r.dims[t] {
                            m.set(ro + i, co + j, r.maps[e].get(i, j));
                        }
                    }
                    ro += r.dims[h];
                    co += r.dims[t];
                }
                m
            })
            .collect();
        Rep { dims, maps }
    }

    fn id_mor(&self, r: &Rep) -> RepMor {
        RepMor { mats: r.dims.iter().map(|&d| Mat::identity(self.field, d)).collect() }
    }

    fn zero_mor(&self, src: &Rep, dst: &Rep) -> RepMor {
        RepMor {
            mats: (0..self.n).map(|v| Mat::zero(self.field, dst.dims[v], src.dims[v])).collect(),
        }
    }

    fn compose(&self, g: &RepMor, f: &RepMor) -> RepMor {
        RepMor {
            mats: g
                .mats
                .iter()
                .zip(&f.mats)
                .map(|(gm, fm)| gm.mul(fm).expect("rep morphism compose"))
                .collect(),
        }
    }

    fn add(&self, a: &RepMor, b: &RepMor) -> RepMor {
        RepMor {
            mats: a.mats.iter().zip(&b.mats).map(|(x, y)| x.add(y).expect("rep add")).collect(),
        }
    }

    fn scale(&self, c: u64, a: &RepMor) -> RepMor {
        RepMor { mats: a.mats.iter().map(|m| m.scale(c)).collect() }
    }

    fn neg(&self, a: &RepMor) -> RepMor {
        self.scale(self.field.neg(1), a)
    }

    fn is_commuting(&self, src: &Rep, dst: &Rep, phi: &RepMor) -> bool {
        (0..self.n - 1).all(|e| {
            let t = self.edge_tail(e);
            let h = self.edge_head(e);
            let lhs = phi.mats[h].mul(&src.maps[e]).unwrap();
            let rhs = dst.maps[e].mul(&phi.mats[t]).unwrap();
            lhs == rhs
        })
    }

    fn flatten(&self, phi: &RepMor) -> Vec<u64> {
        let mut out = Vec::new();
        for m in &phi.mats {
            for i in 0..m.rows {
                for j in 0..m.cols {
                    out.push(m.get(i, j));
                }
            }
        }
        out
    }

    fn unflatten(&self, src: &Rep, dst: &Rep, v: &[u64]) -> RepMor {
        let mut mats = Vec::with_capacity(self.n);
        let mut pos = 0;
        for w in 0..self.n {
            let mut m = Mat::zero(self.field, dst.dims[w], src.dims[w]);
            for i in 0..dst.dims[w] {
                for j in 0..src.dims[w] {
                    m.set(i, j, v[pos]);
                    pos += 1;
                }
            }
            mats.push(m);
        }
        assert_eq!(pos, v.len());
        RepMor { mats }
    }

    /// Basis of the space of rep morphisms src -> dst (kernel of the
    /// edge-commutation constraints), in a deterministic order.
    fn hom_basis_reps(&self, src: &Rep, dst: &Rep) -> Vec<RepMor> {
        let unknowns: usize = (0..self.n).map(|v| dst.dims[v] * src.dims[v]).sum();
        let mut offsets = vec![0usize; self.n];
        {
            let mut acc = 0;
            for v in 0..self.n {
                offsets[v] = acc;
                acc += dst.dims[v] * src.dims[v];
            }
        }
        let mut rows: Vec<Vec<u64>> = Vec::new();
        for e in 0..self.n - 1 {
            let t = self.edge_tail(e);
            let h = self.edge_head(e);
            // phi_h . src_e = dst_e . phi_t, entrywise (r, c)
            for r in 0..dst.dims[h] {
                for c in 0..src.dims[t] {
                    let mut row = vec![0u64; unknowns];
                    for k in 0..src.dims[h] {
                        let idx = offsets[h] + r * src.dims[h] + k;
                        row[idx] = self.field.add(row[idx], src.maps[e].get(k, c));
                    }
                    for k in 0..dst.dims[t] {
                        let idx = offsets[t] + k * src.dims[t] + c;
                        row[idx] = self.field.sub(row[idx], dst.maps[e].get(r, k));
                    }
                    rows.push(row);
                }
            }
        }
        let constraint = if rows.is_empty() {
            Mat::zero(self.field, 0, unknowns)
        } else {
            Mat::from_rows(self.field, rows).unwrap()
        };
        constraint
            .kernel()
            .basis()
            .iter()
            .map(|v| {
                let m = self.unflatten(src, dst, v);
                debug_assert!(self.is_commuting(src, dst, &m));
                m
            })
            .collect()
    }

    /// Kernel of a rep morphism, with its inclusion.
    fn kernel(&self, src: &Rep, dst: &Rep, phi: &RepMor) -> (Rep, RepMor) {
        debug_assert!(self.is_commuting(src, dst, phi));
        let mut dims = vec![0usize; self.n];
        let mut incl_mats = Vec::with_capacity(self.n);
        for v in 0..self.n {
            let ker = phi.mats[v].kernel();
            dims[v] = ker.dim();
            let cols: Vec<Vec<u64>> = ker.basis().to_vec();
            incl_mats.push(Mat::from_cols(self.field, cols, src.dims[v]).unwrap());
        }
        let mut maps = Vec::with_capacity(self.n - 1);
        for e in 0..self.n - 1 {
            let t = self.edge_tail(e);
            let h = self.edge_head(e);
            let rhs = src.maps[e].mul(&incl_mats[t]).unwrap();
            let m = incl_mats[h].solve_mat(&rhs).expect("kernel is a subrepresentation");
            maps.push(m);
        }
        let k = Rep { dims, maps };
        let incl = RepMor { mats: incl_mats };
        debug_assert!(self.is_commuting(&k, src, &incl));
        (k, incl)
    }

    /// Cokernel of a rep morphism, with projection and a linear section.
    fn cokernel(&self, src: &Rep, dst: &Rep, phi: &RepMor) -> (Rep, RepMor, RepMor) {
        debug_assert!(self.is_commuting(src, dst, phi));
        let mut dims = vec![0usize; self.n];
        let mut q_mats = Vec::with_capacity(self.n);
        let mut s_mats = Vec::with_capacity(self.n);
        for v in 0..self.n {
            let (q, s) = phi.mats[v].cokernel();
            dims[v] = q.rows;
            q_mats.push(q);
            s_mats.push(s);
        }
        let mut maps = Vec::with_capacity(self.n - 1);
        for e in 0..self.n - 1 {
            let t = self.edge_tail(e);
            let h = self.edge_head(e);
            let m = q_mats[h].mul(&dst.maps[e]).unwrap().mul(&s_mats[t]).unwrap();
            maps.push(m);
        }
        let q = Rep { dims, maps };
        let proj = RepMor { mats: q_mats };
        // sec is only a vertexwise linear section, not a rep morphism
        let sec = RepMor { mats: s_mats };
        debug_assert!(self.is_commuting(dst, &q, &proj));
        (q, proj, sec)
    }

    /// Solves incl . x = psi for x, where incl is vertexwise injective.
    fn factor_through_mono(&self, incl: &RepMor, psi: &RepMor) -> Option<RepMor> {
        let mats: Option<Vec<Mat>> =
            incl.mats.iter().zip(&psi.mats).map(|(a, b)| a.solve_mat(b)).collect();
        Some(RepMor { mats: mats? })
    }

    /// Finds phi: X -> Y with after . phi = target, where phi ranges over the
    /// full hom space of representations.
    fn solve_postcompose(
        &self,
        x: &Rep,
        y: &Rep,
        after: &RepMor,
        target: &RepMor,
    ) -> Option<RepMor> {
        let basis = self.hom_basis_reps(x, y);
        let cols: Vec<Vec<u64>> =
            basis.iter().map(|b| self.flatten(&self.compose(after, b))).collect();
        let rhs = self.flatten(target);
        let ambient = rhs.len();
        let m = Mat::from_cols(self.field, cols, ambient).unwrap();
        let coords = m.solve(&rhs)?;
        let mut out = self.zero_mor(x, y);
        for (t, &c) in coords.iter().enumerate() {
            if c != 0 {
                out = self.add(&out, &self.scale(c, &basis[t]));
            }
        }
        Some(out)
    }

    /// Vertical stack of two morphisms with common source.
    fn vstack_mor(&self, top: &RepMor, bottom: &RepMor) -> RepMor {
        RepMor {
            mats: top
                .mats
                .iter()
                .zip(&bottom.mats)
                .map(|(a, b)| a.vstack(b).expect("vstack_mor"))
                .collect(),
        }
    }

    /// Horizontal stack of two morphisms with common target.
    fn hstack_mor(&self, left: &RepMor, right: &RepMor) -> RepMor {
        RepMor {
            mats: left
                .mats
                .iter()
                .zip(&right.mats)
                .map(|(a, b)| a.hstack(b).expect("hstack_mor"))
                .collect(),
        }
    }

    /// Rows [r0, r0+k) of each vertex matrix.
    fn row_block(&self, phi: &RepMor, r0: &[usize], k: &[usize]) -> RepMor {
        RepMor {
            mats: phi
                .mats
                .iter()
                .enumerate()
                .map(|(v, m)| {
                    let mut out = Mat::zero(self.field, k[v], m.cols);
                    for i in 0..k[v] {
                        for j in 0..m.cols {
                            out.set(i, j, m.get(r0[v] + i, j));
                        }
                    }
                    out
                })
                .collect(),
        }
    }

    /// Columns [c0, c0+k) of each vertex matrix.
    fn col_block(&self, phi: &RepMor, c0: &[usize], k: &[usize]) -> RepMor {
        RepMor {
            mats: phi
                .mats
                .iter()
                .enumerate()
                .map(|(v, m)| {
                    let mut out = Mat::zero(self.field, m.rows, k[v]);
                    for i in 0..m.rows {
                        for j in 0..k[v] {
                            out.set(i, j, m.get(i, c0[v] + j));
                        }
                    }
                    out
                })
                .collect(),
        }
    }
}

/// A minimal projective presentation of an indecomposable: p0 -> indec with
/// kernel k, both formal sums of intervals.
#[derive(Clone)]
struct Presentation {
    p0: Obj,
    k: Obj,
    /// rep(p0) -> rep(indec)
    pi: RepMor,
    /// rep(k) -> rep(p0)
    iota: RepMor,
}

/// Per ext pair: projection from cocycle coordinates (hom coords of
/// Hom(k_c, I_a)) to class coordinates, and a section picking representative
/// cocycles.
#[derive(Clone)]
struct ExtPresentation {
    q: Mat,
    s: Mat,
}

pub struct QuiverBackend {
    q: Quiver,
    reps: Vec<Rep>,
    hom_bases: Vec<Vec<Vec<RepMor>>>,
    pres: Vec<Presentation>,
    ext: Vec<Vec<ExtPresentation>>,
}

impl QuiverBackend {
    fn rep_of_obj(&self, obj: &Obj) -> Rep {
        let parts: Vec<&Rep> = obj.summands.iter().map(|&i| &self.reps[i]).collect();
        self.q.dsum(&parts)
    }

    /// Vertexwise offset of summand s of obj, per vertex.
    fn obj_offsets(&self, obj: &Obj, s: usize) -> Vec<usize> {
        (0..self.q.n)
            .map(|v| obj.summands[..s].iter().map(|&i| self.reps[i].dims[v]).sum())
            .collect()
    }

    /// Hom basis of a formal pair, ordered (dst summand outer, src summand,
    /// basis element) to match the core's hom coordinate layout.
    fn formal_hom_basis(&self, x: &Obj, y: &Obj) -> Vec<RepMor> {
        let xr = self.rep_of_obj(x);
        let yr = self.rep_of_obj(y);
        let mut out = Vec::new();
        for (d, &yd) in y.summands.iter().enumerate() {
            let yoff = self.obj_offsets(y, d);
            for (s, &xs) in x.summands.iter().enumerate() {
                let xoff = self.obj_offsets(x, s);
                for b in &self.hom_bases[xs][yd] {
                    let mut phi = self.q.zero_mor(&xr, &yr);
                    for v in 0..self.q.n {
                        for i in 0..self.reps[yd].dims[v] {
                            for j in 0..self.reps[xs].dims[v] {
                                phi.mats[v].set(yoff[v] + i, xoff[v] + j, b.mats[v].get(i, j));
                            }
                        }
                    }
                    out.push(phi);
                }
            }
        }
        out
    }

    /// Coordinates of a rep morphism rep(x) -> rep(y) in the formal hom basis.
    fn formal_hom_coords(&self, x: &Obj, y: &Obj, phi: &RepMor) -> Vec<u64> {
        let basis = self.formal_hom_basis(x, y);
        let flat = self.q.flatten(phi);
        let cols: Vec<Vec<u64>> = basis.iter().map(|b| self.q.flatten(b)).collect();
        let m = Mat::from_cols(self.q.field, cols, flat.len()).unwrap();
        m.solve(&flat).expect("morphism lies in the hom space")
    }

    fn repmor_of_mor(&self, m: &Mor) -> RepMor {
        let xr = self.rep_of_obj(&m.src);
        let yr = self.rep_of_obj(&m.dst);
        let mut phi = self.q.zero_mor(&xr, &yr);
        for (d, &yd) in m.dst.summands.iter().enumerate() {
            let yoff = self.obj_offsets(&m.dst, d);
            for (s, &xs) in m.src.summands.iter().enumerate() {
                let xoff = self.obj_offsets(&m.src, s);
                for (t, &c) in m.block(d, s).iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    let b = &self.hom_bases[xs][yd][t];
                    for v in 0..self.q.n {
                        for i in 0..self.reps[yd].dims[v] {
                            for j in 0..self.reps[xs].dims[v] {
                                let prev = phi.mats[v].get(yoff[v] + i, xoff[v] + j);
                                phi.mats[v].set(
                                    yoff[v] + i,
                                    xoff[v] + j,
                                    self.q.field.add(prev, self.q.field.mul(c, b.mats[v].get(i, j))),
                                );
                            }
                        }
                    }
                }
            }
        }
        phi
    }

    fn mor_of_repmor(&self, core: &CatCore, x: &Obj, y: &Obj, phi: &RepMor) -> Mor {
        let coords = self.formal_hom_coords(x, y, phi);
        let mut blocks = Vec::new();
        let mut pos = 0;
        for &yd in &y.summands {
            for &xs in &x.summands {
                let len = self.hom_bases[xs][yd].len();
                blocks.push(coords[pos..pos + len].to_vec());
                pos += len;
            }
        }
        core.mor_from_blocks(x, y, blocks).expect("mor_of_repmor layout")
    }

    /// Splits off interval summands one at a time: returns summand ids plus
    /// mutually inverse morphisms u: rep(ids) -> r and v: r -> rep(ids).
    fn decompose(&self, r: &Rep) -> Result<(Vec<usize>, RepMor, RepMor)> {
        let q = &self.q;
        let mut found: Vec<(usize, RepMor)> = Vec::new();
        let mut remaining = r.clone();
        let mut ins = q.id_mor(r);
        while !remaining.is_zero() {
            let mut peeled = false;
            for cand in 0..self.reps.len() {
                let crep = &self.reps[cand];
                if (0..q.n).any(|v| crep.dims[v] > remaining.dims[v]) {
                    continue;
                }
                let into = q.hom_basis_reps(crep, &remaining);
                let from = q.hom_basis_reps(&remaining, crep);
                let support = (0..q.n).find(|&v| crep.dims[v] == 1).expect("nonzero interval");
                let mut split: Option<(RepMor, RepMor)> = None;
                'search: for v0 in &from {
                    for u0 in &into {
                        let comp = q.compose(v0, u0);
                        let c = comp.mats[support].get(0, 0);
                        if c != 0 {
                            // End(interval) = k, so the composite is c * id
                            let cid = q.scale(c, &q.id_mor(crep));
                            assert_eq!(comp, cid, "interval endomorphism is not scalar");
                            let vfix = q.scale(q.field.inv(c), v0);
                            split = Some((u0.clone(), vfix));
                            break 'search;
                        }
                    }
                }
                if let Some((u0, v0)) = split {
                    found.push((cand, q.compose(&ins, &u0)));
                    let (newrem, incl) = q.kernel(&remaining, crep, &v0);
                    ins = q.compose(&ins, &incl);
                    remaining = newrem;
                    peeled = true;
                    break;
                }
            }
            if !peeled {
                return Err(Error::InternalConsistency(
                    "representation does not peel into intervals".into(),
                ));
            }
        }
        let ids: Vec<usize> = found.iter().map(|(i, _)| *i).collect();
        let parts: Vec<&Rep> = ids.iter().map(|&i| &self.reps[i]).collect();
        let dsum = q.dsum(&parts);
        // u: dsum -> r has the found embeddings as column blocks
        let mut u = q.zero_mor(&dsum, r);
        let mut offset = vec![0usize; q.n];
        for (id, emb) in &found {
            for v in 0..q.n {
                for i in 0..r.dims[v] {
                    for j in 0..self.reps[*id].dims[v] {
                        u.mats[v].set(i, offset[v] + j, emb.mats[v].get(i, j));
                    }
                }
            }
            for v in 0..q.n {
                offset[v] += self.reps[*id].dims[v];
            }
        }
        let vmats: Vec<Mat> = u
            .mats
            .iter()
            .map(|m| m.solve_mat(&Mat::identity(q.field, m.rows)).expect("u is invertible"))
            .collect();
        let v = RepMor { mats: vmats };
        Ok((ids, u, v))
    }

    /// Blockwise presentation of a formal object: p0 -> c with kernel k.
    fn formal_presentation(&self, c: &Obj) -> (Obj, Obj, RepMor, RepMor) {
        let q = &self.q;
        let mut p0 = Obj::empty();
        let mut k = Obj::empty();
        for &cj in &c.summands {
            p0 = p0.concat(&self.pres[cj].p0);
            k = k.concat(&self.pres[cj].k);
        }
        let p0rep = self.rep_of_obj(&p0);
        let krep = self.rep_of_obj(&k);
        let crep = self.rep_of_obj(c);
        let mut pi = q.zero_mor(&p0rep, &crep);
        let mut iota = q.zero_mor(&krep, &p0rep);
        let mut coff = vec![0usize; q.n];
        let mut poff = vec![0usize; q.n];
        let mut koff = vec![0usize; q.n];
        for &cj in &c.summands {
            let pr = &self.pres[cj];
            let p0j = self.rep_of_obj(&pr.p0);
            let kj = self.rep_of_obj(&pr.k);
            let cjrep = &self.reps[cj];
            for v in 0..q.n {
                for i in 0..cjrep.dims[v] {
                    for j in 0..p0j.dims[v] {
                        pi.mats[v].set(coff[v] + i, poff[v] + j, pr.pi.mats[v].get(i, j));
                    }
                }
                for i in 0..p0j.dims[v] {
                    for j in 0..kj.dims[v] {
                        iota.mats[v].set(poff[v] + i, koff[v] + j, pr.iota.mats[v].get(i, j));
                    }
                }
                coff[v] += cjrep.dims[v];
                poff[v] += p0j.dims[v];
                koff[v] += kj.dims[v];
            }
        }
        (p0, k, pi, iota)
    }

    /// Representing cocycle of a class: a rep morphism rep(k(C)) -> rep(A).
    fn cocycle_of(&self, core: &CatCore, delta: &ExtElem) -> RepMor {
        let q = &self.q;
        let (_, k, _, _) = self.formal_presentation(&delta.c);
        let krep = self.rep_of_obj(&k);
        let arep = self.rep_of_obj(&delta.a);
        let mut h = q.zero_mor(&krep, &arep);
        let mut kgoff = vec![0usize; q.n];
        for (jpos, &cj) in delta.c.summands.iter().enumerate() {
            let kj = &self.pres[cj].k;
            let kjrep = self.rep_of_obj(kj);
            let mut aoff = vec![0usize; q.n];
            for (ipos, &ai) in delta.a.summands.iter().enumerate() {
                let block = core.ext_block(delta, jpos, ipos);
                if !block.iter().all(|&x| x == 0) {
                    let hom_coords = self.ext[cj][ai].s.mul_vec(block);
                    // assemble the block cocycle from the formal hom basis
                    let basis = self.formal_hom_basis(kj, &Obj::single(ai));
                    for (t, &cc) in hom_coords.iter().enumerate() {
                        if cc == 0 {
                            continue;
                        }
                        for v in 0..q.n {
                            let bm = &basis[t].mats[v];
                            for i in 0..bm.rows {
                                for jj in 0..bm.cols {
                                    let prev = h.mats[v].get(aoff[v] + i, kgoff[v] + jj);
                                    h.mats[v].set(
                                        aoff[v] + i,
                                        kgoff[v] + jj,
                                        q.field.add(prev, q.field.mul(cc, bm.get(i, jj))),
                                    );
                                }
                            }
                        }
                    }
                }
                for v in 0..q.n {
                    aoff[v] += self.reps[ai].dims[v];
                }
            }
            for v in 0..q.n {
                kgoff[v] += kjrep.dims[v];
            }
        }
        h
    }

    /// Class coordinates of a cocycle rep(k(C)) -> rep(A).
    fn class_of_cocycle(&self, c: &Obj, a: &Obj, h: &RepMor) -> Vec<u64> {
        let q = &self.q;
        let mut coords = Vec::new();
        let mut kgoff = vec![0usize; q.n];
        for &cj in &c.summands {
            let kj = &self.pres[cj].k;
            let kjrep = self.rep_of_obj(kj);
            let mut aoff = vec![0usize; q.n];
            for &ai in &a.summands {
                let kcols: Vec<usize> = (0..q.n).map(|v| kjrep.dims[v]).collect();
                let arows: Vec<usize> = (0..q.n).map(|v| self.reps[ai].dims[v]).collect();
                let sub = RepMor {
                    mats: (0..q.n)
                        .map(|v| {
                            let mut m = Mat::zero(q.field, arows[v], kcols[v]);
                            for i in 0..arows[v] {
                                for j in 0..kcols[v] {
                                    m.set(i, j, h.mats[v].get(aoff[v] + i, kgoff[v] + j));
                                }
                            }
                            m
                        })
                        .collect(),
                };
                let hom_coords = self.formal_hom_coords(kj, &Obj::single(ai), &sub);
                coords.extend(self.ext[cj][ai].q.mul_vec(&hom_coords));
                for v in 0..q.n {
                    aoff[v] += self.reps[ai].dims[v];
                }
            }
            for v in 0..q.n {
                kgoff[v] += kjrep.dims[v];
            }
        }
        coords
    }

    fn realize_any(&self, core: &CatCore, delta: &ExtElem) -> Triangle {
        if delta.is_zero() {
            core.split_triangle(&delta.a, &delta.c)
        } else {
            self.realize(core, delta)
        }
    }
}

impl Backend for QuiverBackend {
    fn kind(&self) -> &'static str {
        "quiverA"
    }

    fn realize(&self, core: &CatCore, delta: &ExtElem) -> Triangle {
        let q = &self.q;
        let (p0, k, pi, iota) = self.formal_presentation(&delta.c);
        let h = self.cocycle_of(core, delta);
        // B = coker( k(C) --(-h, iota)--> A + P0(C) )
        let phi = q.vstack_mor(&q.neg(&h), &iota);
        let abp0_obj = delta.a.concat(&p0);
        let abp0 = self.rep_of_obj(&abp0_obj);
        let krep = self.rep_of_obj(&k);
        let (brep, proj, sec) = q.cokernel(&krep, &abp0, &phi);
        let arep = self.rep_of_obj(&delta.a);
        let adims: Vec<usize> = (0..q.n).map(|v| arep.dims[v]).collect();
        let zeros = vec![0usize; q.n];
        let fhat = q.col_block(&proj, &zeros, &adims);
        // g = [0, pi] . sec
        let crep = self.rep_of_obj(&delta.c);
        let zero_part = RepMor {
            mats: (0..q.n).map(|v| Mat::zero(q.field, crep.dims[v], arep.dims[v])).collect(),
        };
        let zp = q.hstack_mor(&zero_part, &pi);
        let ghat = q.compose(&zp, &sec);
        let (bids, u, v) = self.decompose(&brep).expect("cokernel decomposes");
        let bobj = Obj::new(bids);
        let f = self.mor_of_repmor(core, &delta.a, &bobj, &q.compose(&v, &fhat));
        let g = self.mor_of_repmor(core, &bobj, &delta.c, &q.compose(&ghat, &u));
        Triangle { f, g, delta: delta.clone() }
    }

    fn pushout_triangle(&self, core: &CatCore, t: &Triangle, a: &Mor) -> Result<PushoutData> {
        if a.src != *t.a() {
            return Err(Error::Shape("pushout: morphism source must be the A end".into()));
        }
        let q = &self.q;
        let ahat = self.repmor_of_mor(a);
        let fhat = self.repmor_of_mor(&t.f);
        let ghat = self.repmor_of_mor(&t.g);
        // B' = coker( A --(-a, f)--> A' + B )
        let phi = q.vstack_mor(&q.neg(&ahat), &fhat);
        let apb_obj = a.dst.concat(t.b());
        let apb = self.rep_of_obj(&apb_obj);
        let arep = self.rep_of_obj(t.a());
        let (bprep, proj, sec) = q.cokernel(&arep, &apb, &phi);
        let aprep = self.rep_of_obj(&a.dst);
        let apdims: Vec<usize> = (0..q.n).map(|v| aprep.dims[v]).collect();
        let brep = self.rep_of_obj(t.b());
        let bdims: Vec<usize> = (0..q.n).map(|v| brep.dims[v]).collect();
        let zeros = vec![0usize; q.n];
        let fphat = q.col_block(&proj, &zeros, &apdims);
        let bhat = q.col_block(&proj, &apdims, &bdims);
        let crep = self.rep_of_obj(t.c());
        let zero_part = RepMor {
            mats: (0..q.n).map(|v| Mat::zero(q.field, crep.dims[v], aprep.dims[v])).collect(),
        };
        let gphat = q.compose(&q.hstack_mor(&zero_part, &ghat), &sec);
        let (ids, u, v) = self.decompose(&bprep)?;
        let bpobj = Obj::new(ids);
        let fp = self.mor_of_repmor(core, &a.dst, &bpobj, &q.compose(&v, &fphat));
        let b = self.mor_of_repmor(core, t.b(), &bpobj, &q.compose(&v, &bhat));
        let gp = self.mor_of_repmor(core, &bpobj, t.c(), &q.compose(&gphat, &u));
        let delta_p = core.act_left(a, &t.delta)?;
        let triangle = Triangle { f: fp.clone(), g: gp.clone(), delta: delta_p };
        // extra triangle A -> A' + B -> B' over delta . g'
        let mut mu_blocks = Vec::new();
        for d in 0..a.dst.len() {
            for s in 0..t.a().len() {
                mu_blocks.push(a.block(d, s).to_vec());
            }
        }
        for d in 0..t.b().len() {
            for s in 0..t.a().len() {
                mu_blocks.push(t.f.block(d, s).to_vec());
            }
        }
        let mu = core.mor_from_blocks(t.a(), &apb_obj, mu_blocks)?;
        let neg_fp = core.mor_scale(core.field.neg(1), &fp);
        let mut nu_blocks = Vec::new();
        for d in 0..bpobj.len() {
            for s in 0..apb_obj.len() {
                if s < a.dst.len() {
                    nu_blocks.push(neg_fp.block(d, s).to_vec());
                } else {
                    nu_blocks.push(b.block(d, s - a.dst.len()).to_vec());
                }
            }
        }
        let nu = core.mor_from_blocks(&apb_obj, &bpobj, nu_blocks)?;
        let extra_delta = core.act_right(&t.delta, &gp)?;
        let extra = Triangle { f: mu, g: nu, delta: extra_delta };
        Ok(PushoutData { triangle, b, extra })
    }

    fn shifted_square(&self, core: &CatCore, d1: &ExtElem, d2: &ExtElem) -> Result<ShiftedSquare> {
        if d1.c != d2.c {
            return Err(Error::Shape("shifted square needs a common C end".into()));
        }
        let q = &self.q;
        let t1 = self.realize_any(core, d1);
        let t2 = self.realize_any(core, d2);
        let g1 = self.repmor_of_mor(&t1.g);
        let g2 = self.repmor_of_mor(&t2.g);
        let f1 = self.repmor_of_mor(&t1.f);
        let f2 = self.repmor_of_mor(&t2.f);
        let b12_obj = t1.b().concat(t2.b());
        let b12 = self.rep_of_obj(&b12_obj);
        let crep = self.rep_of_obj(&d1.c);
        let psi = q.hstack_mor(&g1, &q.neg(&g2));
        debug_assert!(q.is_commuting(&b12, &crep, &psi));
        let (mrep, incl) = q.kernel(&b12, &crep, &psi);
        let b1rep = self.rep_of_obj(t1.b());
        let b2rep = self.rep_of_obj(t2.b());
        let b1dims: Vec<usize> = (0..q.n).map(|v| b1rep.dims[v]).collect();
        let b2dims: Vec<usize> = (0..q.n).map(|v| b2rep.dims[v]).collect();
        let zeros = vec![0usize; q.n];
        let e1hat = q.row_block(&incl, &zeros, &b1dims);
        let e2hat = q.row_block(&incl, &b1dims, &b2dims);
        let a1rep = self.rep_of_obj(t1.a());
        let a2rep = self.rep_of_obj(t2.a());
        let z1 = RepMor {
            mats: (0..q.n).map(|v| Mat::zero(q.field, b2rep.dims[v], a1rep.dims[v])).collect(),
        };
        let z2 = RepMor {
            mats: (0..q.n).map(|v| Mat::zero(q.field, b1rep.dims[v], a2rep.dims[v])).collect(),
        };
        let m1hat = q
            .factor_through_mono(&incl, &q.vstack_mor(&f1, &z1))
            .ok_or_else(|| Error::InternalConsistency("pullback factorization failed".into()))?;
        let m2hat = q
            .factor_through_mono(&incl, &q.vstack_mor(&z2, &f2))
            .ok_or_else(|| Error::InternalConsistency("pullback factorization failed".into()))?;
        let (ids, u, v) = self.decompose(&mrep)?;
        let mobj = Obj::new(ids);
        let m1 = self.mor_of_repmor(core, t1.a(), &mobj, &q.compose(&v, &m1hat));
        let m2 = self.mor_of_repmor(core, t2.a(), &mobj, &q.compose(&v, &m2hat));
        let e1 = self.mor_of_repmor(core, &mobj, t1.b(), &q.compose(&e1hat, &u));
        let e2 = self.mor_of_repmor(core, &mobj, t2.b(), &q.compose(&e2hat, &u));
        let row_delta = core.act_right(d1, &t2.g)?;
        let col_delta = core.act_right(d2, &t1.g)?;
        let row = Triangle { f: m1.clone(), g: e2.clone(), delta: row_delta };
        let col = Triangle { f: m2.clone(), g: e1.clone(), delta: col_delta };
        Ok(ShiftedSquare { m1, m2, e1, e2, row, col })
    }

    fn complete_deflation(&self, core: &CatCore, g: &Mor) -> Result<Triangle> {
        let q = &self.q;
        let ghat = self.repmor_of_mor(g);
        let crep = self.rep_of_obj(&g.dst);
        let brep = self.rep_of_obj(&g.src);
        let epi = (0..q.n).all(|v| ghat.mats[v].rank() == crep.dims[v]);
        if !epi {
            return Err(Error::Inapplicable("morphism is not a deflation".into()));
        }
        let (arep, incl) = q.kernel(&brep, &crep, &ghat);
        let (ids, u, _v) = self.decompose(&arep)?;
        let aobj = Obj::new(ids);
        let f = self.mor_of_repmor(core, &aobj, &g.src, &q.compose(&incl, &u));
        let delta = self.recover_class(core, &f, g)?;
        Ok(Triangle { f, g: g.clone(), delta })
    }

    fn recover_class(&self, core: &CatCore, f: &Mor, g: &Mor) -> Result<ExtElem> {
        if f.dst != g.src {
            return Err(Error::Shape("recover_class: f and g do not share B".into()));
        }
        let q = &self.q;
        let c = g.dst.clone();
        let a = f.src.clone();
        let (p0, k, pi, iota) = self.formal_presentation(&c);
        let p0rep = self.rep_of_obj(&p0);
        let brep = self.rep_of_obj(&g.src);
        let ghat = self.repmor_of_mor(g);
        let fhat = self.repmor_of_mor(f);
        let lambda = q
            .solve_postcompose(&p0rep, &brep, &ghat, &pi)
            .ok_or_else(|| Error::NotADefect("g does not admit a projective lift".into()))?;
        let krep = self.rep_of_obj(&k);
        let arep = self.rep_of_obj(&a);
        let target = q.compose(&lambda, &iota);
        let hp = q
            .solve_postcompose(&krep, &arep, &fhat, &target)
            .ok_or_else(|| Error::NotADefect("pair (f, g) is not a conflation".into()))?;
        let coords = self.class_of_cocycle(&c, &a, &hp);
        core.ext_from_coords(&c, &a, coords)
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }
}

/// Vertices reachable from v along arrows: a contiguous interval.
fn reach(right: &[bool], v: usize) -> (usize, usize) {
    let n = right.len() + 1;
    let mut r = v;
    while r + 1 < n && right[r] {
        r += 1;
    }
    let mut l = v;
    while l > 0 && !right[l - 1] {
        l -= 1;
    }
    (l, r)
}

/// Local sources of the interval [a, b]: vertices not hit by an arrow from
/// inside the interval. These index the projective cover.
fn tops(right: &[bool], a: usize, b: usize) -> Vec<usize> {
    (a..=b)
        .filter(|&v| {
            let hit_from_left = v > a && right[v - 1];
            let hit_from_right = v < b && !right[v];
            !(hit_from_left || hit_from_right)
        })
        .collect()
}

/// Builds the interval-module category of the A_n quiver with the given
/// orientation string ('R'/'L' per edge) over F_p.
pub fn build_quiver_category(n: usize, orientation: &str, p: u64) -> Result<BasedCategory> {
    if !(2..=6).contains(&n) {
        return Err(Error::InvalidSpec(format!("number of vertices must be 2..=6, got {n}")));
    }
    if orientation.len() != n - 1 {
        return Err(Error::InvalidSpec(format!(
            "orientation must have {} letters, got {:?}",
            n - 1,
            orientation
        )));
    }
    let right: Vec<bool> = orientation
        .chars()
        .map(|c| match c {
            'R' | 'r' => Ok(true),
            'L' | 'l' => Ok(false),
            _ => Err(Error::InvalidSpec(format!("orientation letter {c:?} (expected R or L)"))),
        })
        .collect::<Result<_>>()?;
    let field = Field::new(p)?;
    let q = Quiver { n, right: right.clone(), field };

    // intervals in lexicographic order
    let mut intervals: Vec<(usize, usize)> = Vec::new();
    for a in 0..n {
        for b in a..n {
            intervals.push((a, b));
        }
    }
    let lookup = |a: usize, b: usize| -> usize {
        intervals.iter().position(|&x| x == (a, b)).expect("interval id")
    };
    let reps: Vec<Rep> = intervals.iter().map(|&(a, b)| q.interval(a, b)).collect();
    let m = intervals.len();

    let mut hom_bases: Vec<Vec<Vec<RepMor>>> = vec![vec![Vec::new(); m]; m];
    for i in 0..m {
        for j in 0..m {
            hom_bases[i][j] = q.hom_basis_reps(&reps[i], &reps[j]);
        }
    }
    let hom_dims: Vec<Vec<usize>> =
        (0..m).map(|i| (0..m).map(|j| hom_bases[i][j].len()).collect()).collect();

    // projective covers and kernels
    let mut backend = QuiverBackend {
        q: q.clone(),
        reps: reps.clone(),
        hom_bases: hom_bases.clone(),
        pres: Vec::new(),
        ext: Vec::new(),
    };
    let mut pres: Vec<Presentation> = Vec::new();
    for (idx, &(a, b)) in intervals.iter().enumerate() {
        let top_vs = tops(&right, a, b);
        let p0_ids: Vec<usize> = top_vs
            .iter()
            .map(|&v| {
                let (l, r) = reach(&right, v);
                lookup(l, r)
            })
            .collect();
        let p0 = Obj::new(p0_ids);
        let p0rep = backend.rep_of_obj(&p0);
        let mut pi = q.zero_mor(&p0rep, &reps[idx]);
        for (s, &v) in top_vs.iter().enumerate() {
            let (l, r) = reach(&right, v);
            let off = backend.obj_offsets(&p0, s);
            for w in l.max(a)..=r.min(b) {
                pi.mats[w].set(0, off[w], 1);
            }
        }
        assert!(q.is_commuting(&p0rep, &reps[idx], &pi), "cover map must commute");
        for v in 0..n {
            assert_eq!(pi.mats[v].rank(), reps[idx].dims[v], "cover must be surjective");
        }
        let (krep, incl) = q.kernel(&p0rep, &reps[idx], &pi);
        let (k_ids, uk, _vk) = backend.decompose(&krep)?;
        let k = Obj::new(k_ids);
        let iota = q.compose(&incl, &uk);
        pres.push(Presentation { p0, k, pi, iota });
    }
    backend.pres = pres;

    // ext spaces: E(c, a) = coker( Hom(P0_c, a) -> Hom(K_c, a) )
    let mut ext: Vec<Vec<ExtPresentation>> = Vec::new();
    for c in 0..m {
        let mut row = Vec::new();
        let p0 = backend.pres[c].p0.clone();
        let k = backend.pres[c].k.clone();
        let iota = backend.pres[c].iota.clone();
        for a in 0..m {
            let ao = Obj::single(a);
            let basis = backend.formal_hom_basis(&p0, &ao);
            let cols: Vec<Vec<u64>> = basis
                .iter()
                .map(|b| backend.formal_hom_coords(&k, &ao, &q.compose(b, &iota)))
                .collect();
            let kdim = backend.formal_hom_basis(&k, &ao).len();
            let iota_star = Mat::from_cols(field, cols, kdim).unwrap();
            let (qm, sm) = iota_star.cokernel();
            row.push(ExtPresentation { q: qm, s: sm });
        }
        ext.push(row);
    }
    backend.ext = ext;
    let ext_dims: Vec<Vec<usize>> =
        (0..m).map(|c| (0..m).map(|a| backend.ext[c][a].q.rows).collect()).collect();

    // composition tables and identities
    let mut comp = vec![vec![vec![Vec::new(); m]; m]; m];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let mut table = vec![vec![Vec::new(); hom_dims[j][k]]; hom_dims[i][j]];
                for (a, fb) in hom_bases[i][j].iter().enumerate() {
                    for (b, gb) in hom_bases[j][k].iter().enumerate() {
                        let comp_mor = q.compose(gb, fb);
                        table[a][b] = backend.formal_hom_coords(
                            &Obj::single(i),
                            &Obj::single(k),
                            &comp_mor,
                        );
                    }
                }
                comp[i][j][k] = table;
            }
        }
    }
    let ids: Vec<Vec<u64>> = (0..m)
        .map(|i| backend.formal_hom_coords(&Obj::single(i), &Obj::single(i), &q.id_mor(&reps[i])))
        .collect();

    // action tables
    let mut left_act: Vec<Vec<Vec<Vec<Mat>>>> = vec![vec![Vec::new(); m]; m];
    for i in 0..m {
        for i2 in 0..m {
            let mut per_t = Vec::new();
            for t in 0..hom_dims[i][i2] {
                let amor = &hom_bases[i][i2][t];
                let mut per_j = Vec::new();
                for j in 0..m {
                    let mut mat = Mat::zero(field, ext_dims[j][i2], ext_dims[j][i]);
                    for u in 0..ext_dims[j][i] {
                        let mut e = vec![0u64; ext_dims[j][i]];
                        e[u] = 1;
                        let hom_coords = backend.ext[j][i].s.mul_vec(&e);
                        let kj = backend.pres[j].k.clone();
                        let basis = backend.formal_hom_basis(&kj, &Obj::single(i));
                        let mut h = q.zero_mor(
                            &backend.rep_of_obj(&kj),
                            &backend.rep_of_obj(&Obj::single(i)),
                        );
                        for (bt, &cc) in hom_coords.iter().enumerate() {
                            if cc != 0 {
                                h = q.add(&h, &q.scale(cc, &basis[bt]));
                            }
                        }
                        let ah = q.compose(amor, &h);
                        let coords =
                            backend.formal_hom_coords(&kj, &Obj::single(i2), &ah);
                        let out = backend.ext[j][i2].q.mul_vec(&coords);
                        for (r, &vv) in out.iter().enumerate() {
                            mat.set(r, u, vv);
                        }
                    }
                    per_j.push(mat);
                }
                per_t.push(per_j);
            }
            left_act[i][i2] = per_t;
        }
    }
    let mut right_act: Vec<Vec<Vec<Vec<Mat>>>> = vec![vec![Vec::new(); m]; m];
    for j2 in 0..m {
        for j in 0..m {
            let mut per_t = Vec::new();
            for t in 0..hom_dims[j2][j] {
                let cmor = &hom_bases[j2][j][t];
                // lift c through the presentations: c0 then c1
                let p0_j2 = backend.rep_of_obj(&backend.pres[j2].p0);
                let p0_j = backend.rep_of_obj(&backend.pres[j].p0);
                let target = q.compose(cmor, &backend.pres[j2].pi);
                let c0 = q
                    .solve_postcompose(&p0_j2, &p0_j, &backend.pres[j].pi, &target)
                    .expect("projective lift exists");
                let c1 = q
                    .factor_through_mono(
                        &backend.pres[j].iota,
                        &q.compose(&c0, &backend.pres[j2].iota),
                    )
                    .expect("kernel comparison exists");
                let mut per_i = Vec::new();
                for i in 0..m {
                    let mut mat = Mat::zero(field, ext_dims[j2][i], ext_dims[j][i]);
                    for u in 0..ext_dims[j][i] {
                        let mut e = vec![0u64; ext_dims[j][i]];
                        e[u] = 1;
                        let hom_coords = backend.ext[j][i].s.mul_vec(&e);
                        let kj = backend.pres[j].k.clone();
                        let basis = backend.formal_hom_basis(&kj, &Obj::single(i));
                        let mut h = q.zero_mor(
                            &backend.rep_of_obj(&kj),
                            &backend.rep_of_obj(&Obj::single(i)),
                        );
                        for (bt, &cc) in hom_coords.iter().enumerate() {
                            if cc != 0 {
                                h = q.add(&h, &q.scale(cc, &basis[bt]));
                            }
                        }
                        let hc1 = q.compose(&h, &c1);
                        let kj2 = backend.pres[j2].k.clone();
                        let coords = backend.formal_hom_coords(&kj2, &Obj::single(i), &hc1);
                        let out = backend.ext[j2][i].q.mul_vec(&coords);
                        for (r, &vv) in out.iter().enumerate() {
                            mat.set(r, u, vv);
                        }
                    }
                    per_i.push(mat);
                }
                per_t.push(per_i);
            }
            right_act[j2][j] = per_t;
        }
    }

    // names and flags
    let proj_of_vertex: Vec<usize> = (0..n)
        .map(|v| {
            let (l, r) = reach(&right, v);
            lookup(l, r)
        })
        .collect();
    let indecs: Vec<Indec> = intervals
        .iter()
        .enumerate()
        .map(|(idx, &(a, b))| {
            let mut aliases = Vec::new();
            if a == b {
                aliases.push(format!("S{}", a + 1));
                aliases.push(format!("S_{}", a + 1));
            }
            if let Some(v) = proj_of_vertex.iter().position(|&pidx| pidx == idx) {
                aliases.push(format!("P{}", v + 1));
                aliases.push(format!("P_{}", v + 1));
            }
            let is_projective = (0..m).all(|x| ext_dims[idx][x] == 0);
            assert_eq!(
                is_projective,
                proj_of_vertex.contains(&idx),
                "projectivity flag must match reachability"
            );
            assert_eq!(hom_dims[idx][idx], 1, "interval endomorphism ring is k");
            Indec {
                id: idx,
                name: format!("[{},{}]", a + 1, b + 1),
                aliases,
                is_projective,
                end_residue_dim: 1,
            }
        })
        .collect();

    let core = CatCore {
        name: format!("quiverA(n={n}, orientation={orientation}, p={p})"),
        field,
        indecs,
        hom_dims,
        comp,
        ids,
        ext_dims,
        left_act,
        right_act,
        suspension: None,
    };
    core.check_core_invariants()?;
    Ok(BasedCategory { core, backend: Box::new(backend) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::validate_triangle;

    fn names_of(cat: &BasedCategory, obj: &Obj) -> Vec<String> {
        let mut v: Vec<String> =
            obj.summands.iter().map(|&i| cat.core.indecs[i].name.clone()).collect();
        v.sort();
        v
    }

    #[test]
    fn a2_structure_frozen() {
        let cat = build_quiver_category(2, "R", 2).unwrap();
        let c = &cat.core;
        assert_eq!(c.n_indecs(), 3);
        let names: Vec<&str> = c.indecs.iter().map(|i| i.name.as_str()).collect();
        assert_eq!(names, vec!["[1,1]", "[1,2]", "[2,2]"]);
        assert_eq!(c.hom_dims, vec![vec![1, 0, 0], vec![1, 1, 0], vec![0, 1, 1]]);
        // the only extension: E([1,1], [2,2]) is one-dimensional
        let mut nonzero = Vec::new();
        for j in 0..3 {
            for i in 0..3 {
                if c.ext_dims[j][i] > 0 {
                    nonzero.push((j, i, c.ext_dims[j][i]));
                }
            }
        }
        assert_eq!(nonzero, vec![(0, 2, 1)]);
        let projs: Vec<&str> =
            c.indecs.iter().filter(|i| i.is_projective).map(|i| i.name.as_str()).collect();
        assert_eq!(projs, vec!["[1,2]", "[2,2]"]);
        assert_eq!(c.indec_by_name("S_1").unwrap(), 0);
        assert_eq!(c.indec_by_name("P1").unwrap(), 1);
        assert_eq!(c.indec_by_name("[2,2]").unwrap(), 2);
    }

    #[test]
    fn a2_realize_roundtrip() {
        let cat = build_quiver_category(2, "R", 2).unwrap();
        let c = &cat.core;
        let s1 = Obj::single(c.indec_by_name("S1").unwrap());
        let s2 = Obj::single(c.indec_by_name("S2").unwrap());
        let delta = c.ext_from_coords(&s1, &s2, vec![1]).unwrap();
        let t = cat.realize(&delta);
        assert_eq!(names_of(&cat, t.b()), vec!["[1,2]"]);
        let report = validate_triangle(c, &t);
        assert!(report.is_valid(), "{:?}", report.failures);
        let back = cat.recover_class(&t.f, &t.g).unwrap();
        assert_eq!(back, delta);
        // split triangle has literal biproduct middle
        let zero = c.ext_zero(&s1, &s2);
        let ts = cat.realize(&zero);
        assert_eq!(names_of(&cat, ts.b()), vec!["[1,1]", "[2,2]"]);
        assert!(validate_triangle(c, &ts).is_valid());
        assert_eq!(cat.recover_class(&ts.f, &ts.g).unwrap(), zero);
    }

    #[test]
    fn a3_rr_ext_pairs_frozen() {
        let cat = build_quiver_category(3, "RR", 2).unwrap();
        let c = &cat.core;
        let mut pairs = Vec::new();
        for j in 0..c.n_indecs() {
            for i in 0..c.n_indecs() {
                if c.ext_dims[j][i] > 0 {
                    assert_eq!(c.ext_dims[j][i], 1);
                    pairs.push((c.indecs[j].name.clone(), c.indecs[i].name.clone()));
                }
            }
        }
        pairs.sort();
        let expect = vec![
            ("[1,1]".to_string(), "[2,2]".to_string()),
            ("[1,1]".to_string(), "[2,3]".to_string()),
            ("[1,2]".to_string(), "[2,3]".to_string()),
            ("[1,2]".to_string(), "[3,3]".to_string()),
            ("[2,2]".to_string(), "[3,3]".to_string()),
        ];
        assert_eq!(pairs, expect);
        // hom rule spot checks
        let id = |s: &str| c.indec_by_name(s).unwrap();
        assert_eq!(c.hom_dims[id("[1,2]")][id("[1,1]")], 1);
        assert_eq!(c.hom_dims[id("[2,2]")][id("[1,2]")], 1);
        assert_eq!(c.hom_dims[id("[1,1]")][id("[2,2]")], 0);
        assert_eq!(c.hom_dims[id("[1,3]")][id("[2,3]")], 0);
        assert_eq!(c.hom_dims[id("[2,3]")][id("[1,3]")], 1);
    }

    #[test]
    fn a3_rr_realize_all_and_recover() {
        let cat = build_quiver_category(3, "RR", 2).unwrap();
        let c = &cat.core;
        for j in 0..c.n_indecs() {
            for i in 0..c.n_indecs() {
                let co = Obj::single(j);
                let ao = Obj::single(i);
                for delta in c.ext_elements(&co, &ao) {
                    let t = cat.realize(&delta);
                    let report = validate_triangle(c, &t);
                    assert!(report.is_valid(), "{:?}", report.failures);
                    assert_eq!(cat.recover_class(&t.f, &t.g).unwrap(), delta);
                }
            }
        }
    }

    #[test]
    fn a3_rl_frozen_and_pushout() {
        let cat = build_quiver_category(3, "RL", 2).unwrap();
        let c = &cat.core;
        let projs: Vec<&str> =
            c.indecs.iter().filter(|i| i.is_projective).map(|i| i.name.as_str()).collect();
        assert_eq!(projs, vec!["[1,2]", "[2,2]", "[2,3]"]);
        let mut pairs = Vec::new();
        for j in 0..c.n_indecs() {
            for i in 0..c.n_indecs() {
                if c.ext_dims[j][i] > 0 {
                    pairs.push((c.indecs[j].name.clone(), c.indecs[i].name.clone()));
                }
            }
        }
        pairs.sort();
        let expect = vec![
            ("[1,1]".to_string(), "[2,2]".to_string()),
            ("[1,1]".to_string(), "[2,3]".to_string()),
            ("[1,3]".to_string(), "[2,2]".to_string()),
            ("[3,3]".to_string(), "[1,2]".to_string()),
            ("[3,3]".to_string(), "[2,2]".to_string()),
        ];
        assert_eq!(pairs, expect);
        // push the class over ([1,1],[2,2]) along S2 -> [2,3]: middle becomes [1,3]
        let s1 = Obj::single(c.indec_by_name("S1").unwrap());
        let s2 = Obj::single(c.indec_by_name("S2").unwrap());
        let i23 = Obj::single(c.indec_by_name("[2,3]").unwrap());
        let delta = c.ext_from_coords(&s1, &s2, vec![1]).unwrap();
        let t = cat.realize(&delta);
        assert_eq!(names_of(&cat, t.b()), vec!["[1,2]"]);
        let a = {
            // the unique nonzero map S2 -> [2,3]
            let id2 = c.indec_by_name("S2").unwrap();
            let id23 = c.indec_by_name("[2,3]").unwrap();
            assert_eq!(c.hom_dims[id2][id23], 1);
            c.mor_from_blocks(&s2, &i23, vec![vec![1]]).unwrap()
        };
        let po = cat.pushout_triangle(&t, &a).unwrap();
        assert_eq!(names_of(&cat, po.triangle.b()), vec!["[1,3]"]);
        assert!(validate_triangle(c, &po.triangle).is_valid());
        assert!(validate_triangle(c, &po.extra).is_valid());
        assert_eq!(
            cat.recover_class(&po.triangle.f, &po.triangle.g).unwrap(),
            po.triangle.delta
        );
        assert_eq!(cat.recover_class(&po.extra.f, &po.extra.g).unwrap(), po.extra.delta);
        // the commuting square b . f = f' . a
        let bf = c.compose(&po.b, &t.f).unwrap();
        let fa = c.compose(&po.triangle.f, &a).unwrap();
        assert_eq!(bf, fa);
    }

    #[test]
    fn a3_rl_diamond_middle() {
        // the class over ([1,3], [2,2]) has decomposable middle [1,2] + [2,3]
        let cat = build_quiver_category(3, "RL", 2).unwrap();
        let c = &cat.core;
        let i13 = Obj::single(c.indec_by_name("[1,3]").unwrap());
        let s2 = Obj::single(c.indec_by_name("S2").unwrap());
        let delta = c.ext_from_coords(&i13, &s2, vec![1]).unwrap();
        let t = cat.realize(&delta);
        assert_eq!(names_of(&cat, t.b()), vec!["[1,2]", "[2,3]"]);
        assert!(validate_triangle(c, &t).is_valid());
        assert_eq!(cat.recover_class(&t.f, &t.g).unwrap(), delta);
    }

    #[test]
    fn presentation_of_full_interval_rl() {
        // [1,3] with orientation RL has cover P1 + P3 and kernel S2
        let cat = build_quiver_category(3, "RL", 2).unwrap();
        let c = &cat.core;
        let backend = cat.backend.as_any().downcast_ref::<QuiverBackend>().unwrap();
        let id13 = c.indec_by_name("[1,3]").unwrap();
        let p0 = &backend.pres[id13].p0;
        let k = &backend.pres[id13].k;
        let p0names: Vec<&str> = p0.summands.iter().map(|&i| c.indecs[i].name.as_str()).collect();
        assert_eq!(p0names, vec!["[1,2]", "[2,3]"]);
        let knames: Vec<&str> = k.summands.iter().map(|&i| c.indecs[i].name.as_str()).collect();
        assert_eq!(knames, vec!["[2,2]"]);
    }

    #[test]
    fn decompose_mixed_rep() {
        let cat = build_quiver_category(2, "R", 2).unwrap();
        let backend = cat.backend.as_any().downcast_ref::<QuiverBackend>().unwrap();
        let q = &backend.q;
        // dims (2,1) with edge map [1 0]: decomposes as [1,2] + [1,1]
        let rep = Rep {
            dims: vec![2, 1],
            maps: vec![Mat::from_rows(q.field, vec![vec![1, 0]]).unwrap()],
        };
        let (ids, u, v) = backend.decompose(&rep).unwrap();
        let mut names: Vec<&str> =
            ids.iter().map(|&i| cat.core.indecs[i].name.as_str()).collect();
        names.sort();
        assert_eq!(names, vec!["[1,1]", "[1,2]"]);
        let uv = q.compose(&u, &v);
        let vu = q.compose(&v, &u);
        assert_eq!(uv, q.id_mor(&rep));
        let parts: Vec<&Rep> = ids.iter().map(|&i| &backend.reps[i]).collect();
        assert_eq!(vu, q.id_mor(&q.dsum(&parts)));
    }

    #[test]
    fn shifted_square_a3() {
        let cat = build_quiver_category(3, "RR", 2).unwrap();
        let c = &cat.core;
        // two classes over C = [1,2]: E([1,2],[2,3]) and E([1,2],[3,3])
        let c12 = Obj::single(c.indec_by_name("[1,2]").unwrap());
        let a1 = Obj::single(c.indec_by_name("[2,3]").unwrap());
        let a2 = Obj::single(c.indec_by_name("[3,3]").unwrap());
        let d1 = c.ext_from_coords(&c12, &a1, vec![1]).unwrap();
        let d2 = c.ext_from_coords(&c12, &a2, vec![1]).unwrap();
        let sq = cat.shifted_square(&d1, &d2).unwrap();
        let r1 = validate_triangle(c, &sq.row);
        assert!(r1.is_valid(), "{:?}", r1.failures);
        let r2 = validate_triangle(c, &sq.col);
        assert!(r2.is_valid(), "{:?}", r2.failures);
        // class equation: m1 . d1 + m2 . d2 = 0 in E(C, M)
        let lhs = c
            .ext_add(&c.act_left(&sq.m1, &d1).unwrap(), &c.act_left(&sq.m2, &d2).unwrap())
            .unwrap();
        assert!(lhs.is_zero());
        // squares commute: e1 . m1 = f1 etc. checked via recovered classes
        assert_eq!(cat.recover_class(&sq.row.f, &sq.row.g).unwrap(), sq.row.delta);
        assert_eq!(cat.recover_class(&sq.col.f, &sq.col.g).unwrap(), sq.col.delta);
    }

    #[test]
    fn complete_deflation_a2() {
        let cat = build_quiver_category(2, "R", 2).unwrap();
        let c = &cat.core;
        let p1 = Obj::single(c.indec_by_name("P1").unwrap());
        let s1 = Obj::single(c.indec_by_name("S1").unwrap());
        // the projection [1,2] -> [1,1]
        let g = c.mor_from_blocks(&p1, &s1, vec![vec![1]]).unwrap();
        let t = cat.complete_deflation(&g).unwrap();
        assert_eq!(names_of(&cat, t.a()), vec!["[2,2]"]);
        assert!(validate_triangle(c, &t).is_valid());
        assert!(!t.delta.is_zero());
        // a non-deflation is rejected
        let s2 = Obj::single(c.indec_by_name("S2").unwrap());
        let incl = c.mor_from_blocks(&s2, &p1, vec![vec![1]]).unwrap();
        assert!(cat.complete_deflation(&incl).is_err());
    }

    #[test]
    fn bigger_orientations_build() {
        for (n, orient) in [(4, "RLR"), (5, "RRLL")] {
            let cat = build_quiver_category(n, orient, 2).unwrap();
            assert_eq!(cat.core.n_indecs(), n * (n + 1) / 2);
        }
    }
}
