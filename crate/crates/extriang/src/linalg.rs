//! Exact linear algebra over prime fields F_p.
//!
//! Everything downstream (hom spaces, extension spaces, functor values) is a
//! finite-dimensional F_p vector space, so all decisions reduce to row
//! reduction here. Subspaces are kept in reduced row echelon form, which makes
//! equality of subspaces literal equality of data.

use crate::{Error, Result};

/// A prime field F_p, with p a runtime parameter.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Field {
    pub p: u64,
}

impl Field {
    pub fn new(p: u64) -> Result<Field> {
        if p < 2 || !is_prime(p) {
            return Err(Error::InvalidSpec(format!("p = {p} is not prime")));
        }
        Ok(Field { p })
    }

    #[inline]
    pub fn reduce(&self, a: u64) -> u64 {
        a % self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b % self.p) % self.p
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        (self.p - a % self.p) % self.p
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    /// Multiplicative inverse via Fermat: a^(p-2).
    pub fn inv(&self, a: u64) -> u64 {
        assert!(a % self.p != 0, "division by zero in F_{}", self.p);
        let mut base = a % self.p;
        let mut e = self.p - 2;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn vzero(n: usize) -> Vec<u64> {
    vec![0; n]
}

pub(crate) fn vadd(f: Field, a: &[u64], b: &[u64]) -> Vec<u64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| f.add(*x, *y)).collect()
}

pub(crate) fn vsub(f: Field, a: &[u64], b: &[u64]) -> Vec<u64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| f.sub(*x, *y)).collect()
}

pub(crate) fn vscale(f: Field, c: u64, a: &[u64]) -> Vec<u64> {
    a.iter().map(|x| f.mul(c, *x)).collect()
}

pub(crate) fn vis_zero(a: &[u64]) -> bool {
    a.iter().all(|x| *x == 0)
}

/// Dense matrix over F_p, row-major. Zero-row or zero-column shapes are legal
/// and show up constantly (hom spaces of dimension zero).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat {
    pub field: Field,
    pub rows: usize,
    pub cols: usize,
    entries: Vec<u64>,
}

impl Mat {
    pub fn zero(field: Field, rows: usize, cols: usize) -> Mat {
        Mat { field, rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Mat {
        let mut m = Mat::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<u64>>) -> Result<Mat> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        let entries = rows.into_iter().flatten().map(|x| field.reduce(x)).collect();
        Ok(Mat { field, rows: r, cols: c, entries })
    }

    /// Builds the matrix whose columns are the given vectors.
    pub fn from_cols(field: Field, cols: Vec<Vec<u64>>, ambient: usize) -> Result<Mat> {
        if cols.iter().any(|x| x.len() != ambient) {
            return Err(Error::Shape("column length mismatch".into()));
        }
        let mut m = Mat::zero(field, ambient, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.entries[i * self.cols + j] = self.field.reduce(v);
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| *x == 0)
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "mul shape mismatch: {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let mut out = Mat::zero(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(self.cols, v.len(), "mul_vec shape mismatch");
        let f = self.field;
        (0..self.rows)
            .map(|i| {
                let mut acc = 0;
                for j in 0..self.cols {
                    acc = f.add(acc, f.mul(self.get(i, j), v[j]));
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape("add shape mismatch".into()));
        }
        let f = self.field;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| f.add(*a, *b)).collect();
        Ok(Mat { field: f, rows: self.rows, cols: self.cols, entries })
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat> {
        self.add(&other.scale(self.field.neg(1)))
    }

    pub fn scale(&self, c: u64) -> Mat {
        let f = self.field;
        let entries = self.entries.iter().map(|a| f.mul(c, *a)).collect();
        Mat { field: f, rows: self.rows, cols: self.cols, entries }
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zero(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.cols {
            return Err(Error::Shape("vstack shape mismatch".into()));
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(Mat { field: self.field, rows: self.rows + other.rows, cols: self.cols, entries })
    }

    /// Block-diagonal assembly of the given matrices.
    pub fn block_diag(field: Field, parts: &[Mat]) -> Mat {
        let rows = parts.iter().map(|m| m.rows).sum();
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Mat::zero(field, rows, cols);
        let (mut ro, mut co) = (0, 0);
        for m in parts {
            for i in 0..m.rows {
                for j in 0..m.cols {
                    out.set(ro + i, co + j, m.get(i, j));
                }
            }
            ro += m.rows;
            co += m.cols;
        }
        out
    }

    /// Places `self` to the left of `other`.
    pub fn hstack(&self, other: &Mat) -> Result<Mat> {
        if self.rows != other.rows {
            return Err(Error::Shape("hstack shape mismatch".into()));
        }
        let mut out = Mat::zero(self.field, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j));
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            // swap rows r and pr
            if pr != r {
                for j in 0..m.cols {
                    let a = m.get(r, j);
                    let b = m.get(pr, j);
                    m.set(r, j, b);
                    m.set(pr, j, a);
                }
            }
            let inv = f.inv(m.get(r, c));
            for j in 0..m.cols {
                let v = f.mul(inv, m.get(r, j));
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i != r && m.get(i, c) != 0 {
                    let factor = m.get(i, c);
                    for j in 0..m.cols {
                        let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Column kernel: the subspace of all x with M x = 0.
    pub fn kernel(&self) -> Subspace {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::new();
        for &fc in &free {
            let mut v = vzero(self.cols);
            v[fc] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = self.field.neg(r.get(i, fc));
            }
            basis.push(v);
        }
        Subspace::span(self.field, self.cols, basis)
    }

    /// Row space as a canonical subspace.
    pub fn row_space(&self) -> Subspace {
        let rows = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        Subspace::span(self.field, self.cols, rows)
    }

    /// Column space (image of the matrix on column vectors).
    pub fn col_space(&self) -> Subspace {
        self.transpose().row_space()
    }

    /// Cokernel of the map on column vectors: returns (q, s) with
    /// q: F^rows -> F^(rows - rank) surjective, q * self = 0, and a section s
    /// with q * s = id. The kernel of q is exactly the column space.
    pub fn cokernel(&self) -> (Mat, Mat) {
        let f = self.field;
        let im = self.col_space();
        let pivots = im.pivots();
        let nonpivots: Vec<usize> =
            (0..self.rows).filter(|c| !pivots.contains(c)).collect();
        // q(v) = the non-pivot coordinates of v reduced against the image basis.
        let mut q = Mat::zero(f, nonpivots.len(), self.rows);
        for (t, &np) in nonpivots.iter().enumerate() {
            q.set(t, np, 1);
            for (i, &pc) in pivots.iter().enumerate() {
                q.set(t, pc, f.neg(im.basis()[i][np]));
            }
        }
        let mut s = Mat::zero(f, self.rows, nonpivots.len());
        for (t, &np) in nonpivots.iter().enumerate() {
            s.set(np, t, 1);
        }
        (q, s)
    }

    /// One solution x of M x = b, if consistent.
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(b.len(), self.rows, "solve shape mismatch");
        let f = self.field;
        let bm = Mat::from_cols(f, vec![b.to_vec()], self.rows).unwrap();
        let aug = self.hstack(&bm).unwrap();
        let (r, pivots) = aug.rref();
        // inconsistent iff a pivot lands in the last column
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vzero(self.cols);
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(i, self.cols);
        }
        Some(x)
    }

    /// One solution X of M X = B, columnwise.
    pub fn solve_mat(&self, b: &Mat) -> Option<Mat> {
        assert_eq!(b.rows, self.rows, "solve_mat shape mismatch");
        let mut cols = Vec::new();
        for j in 0..b.cols {
            cols.push(self.solve(&b.col(j))?);
        }
        Mat::from_cols(self.field, cols, self.cols).ok()
    }
}

/// A subspace of F_p^ambient, stored as an RREF basis. Two subspaces are equal
/// as sets iff they are equal as data.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace {
    pub field: Field,
    pub ambient: usize,
    basis: Vec<Vec<u64>>,
}

impl Subspace {
    pub fn zero(field: Field, ambient: usize) -> Subspace {
        Subspace { field, ambient, basis: Vec::new() }
    }

    pub fn full(field: Field, ambient: usize) -> Subspace {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = vzero(ambient);
                v[i] = 1;
                v
            })
            .collect();
        Subspace { field, ambient, basis }
    }

    pub fn span(field: Field, ambient: usize, vectors: Vec<Vec<u64>>) -> Subspace {
        assert!(vectors.iter().all(|v| v.len() == ambient), "span ambient mismatch");
        if vectors.is_empty() {
            return Subspace::zero(field, ambient);
        }
        let m = Mat::from_rows(field, vectors).unwrap();
        let (r, pivots) = m.rref();
        let basis = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Subspace { field, ambient, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|row| row.iter().position(|x| *x != 0).expect("zero row in basis"))
            .collect()
    }

    /// Reduces v against the basis; returns the residual.
    fn reduce_vec(&self, v: &[u64]) -> Vec<u64> {
        let f = self.field;
        let mut v = v.to_vec();
        for (row, &pc) in self.basis.iter().zip(self.pivots().iter()) {
            if v[pc] != 0 {
                let c = v[pc];
                v = vsub(f, &v, &vscale(f, c, row));
            }
        }
        v
    }

    pub fn contains_vec(&self, v: &[u64]) -> bool {
        assert_eq!(v.len(), self.ambient, "ambient mismatch");
        vis_zero(&self.reduce_vec(v))
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains_vec(v))
    }

    /// Coordinates of v in the RREF basis, if v lies in the subspace.
    pub fn coords_of(&self, v: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(v.len(), self.ambient, "ambient mismatch");
        let coords: Vec<u64> = self.pivots().iter().map(|&pc| v[pc]).collect();
        // verify: v == sum coords[i] * basis[i]
        let f = self.field;
        let mut acc = vzero(self.ambient);
        for (c, row) in coords.iter().zip(&self.basis) {
            acc = vadd(f, &acc, &vscale(f, *c, row));
        }
        if acc == v { Some(coords) } else { None }
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        if self.ambient != other.ambient || self.field != other.field {
            return Err(Error::Shape("subspace sum ambient mismatch".into()));
        }
        let mut vs = self.basis.clone();
        vs.extend(other.basis.clone());
        Ok(Subspace::span(self.field, self.ambient, vs))
    }

    /// Orthogonal complement w.r.t. the standard bilinear form. Over F_p the
    /// form is nondegenerate, so complementing twice is the identity.
    pub fn orthogonal(&self) -> Subspace {
        if self.basis.is_empty() {
            return Subspace::full(self.field, self.ambient);
        }
        let m = Mat::from_rows(self.field, self.basis.clone()).unwrap();
        m.kernel()
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        Ok(self.orthogonal().sum(&other.orthogonal())?.orthogonal())
    }

    /// All vectors of the subspace (p^dim of them), in a deterministic order.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let f = self.field;
        let mut out = Vec::new();
        for coeffs in enumerate_vectors(f, self.dim()) {
            let mut v = vzero(self.ambient);
            for (c, row) in coeffs.iter().zip(&self.basis) {
                v = vadd(f, &v, &vscale(f, *c, row));
            }
            out.push(v);
        }
        out
    }

    /// Image of the subspace under a matrix (on column vectors).
    pub fn image_under(&self, m: &Mat) -> Subspace {
        assert_eq!(m.cols, self.ambient, "image_under ambient mismatch");
        let vs = self.basis.iter().map(|v| m.mul_vec(v)).collect();
        Subspace::span(self.field, m.rows, vs)
    }
}

/// All of F_p^dim in a deterministic (base-p counter) order.
pub fn enumerate_vectors(field: Field, dim: usize) -> Vec<Vec<u64>> {
    let p = field.p;
    let total = (p as u128).checked_pow(dim as u32).expect("vector enumeration overflow");
    assert!(total <= 1 << 24, "vector enumeration too large: p^{dim}");
    let mut out = Vec::with_capacity(total as usize);
    let mut v = vzero(dim);
    loop {
        out.push(v.clone());
        // increment base-p counter, most significant coordinate last
        let mut i = 0;
        loop {
            if i == dim {
                return out;
            }
            v[i] += 1;
            if v[i] < p {
                break;
            }
            v[i] = 0;
            i += 1;
        }
    }
}

/// Number of subspaces of F_p^n (sum of Gaussian binomials), exactly.
pub fn count_subspaces(field: Field, n: usize) -> u128 {
    let p = field.p as u128;
    let mut total: u128 = 0;
    // Sum over pivot-column subsets: each subset S contributes p^(free positions).
    for mask in 0u64..(1u64 << n) {
        let pivots: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let mut free = 0u32;
        for (i, &pc) in pivots.iter().enumerate() {
            let later_pivots = pivots.len() - i - 1;
            free += (n - pc - 1 - later_pivots) as u32;
        }
        total = total.checked_add(p.checked_pow(free).expect("count overflow")).expect("count overflow");
    }
    total
}

/// Every subspace of F_p^n, as canonical RREF bases, in a deterministic order.
/// Refuses to enumerate more than `cap` subspaces.
pub fn enumerate_subspaces(field: Field, n: usize, cap: u128) -> Result<Vec<Subspace>> {
    assert!(n < 64, "ambient too large");
    let count = count_subspaces(field, n);
    if count > cap {
        return Err(Error::EnumerationTooLarge { count, cap });
    }
    let mut out = Vec::with_capacity(count as usize);
    for k in 0..=n {
        // all pivot subsets of size k, lexicographic
        let mut masks: Vec<Vec<usize>> = Vec::new();
        collect_subsets(n, k, 0, &mut Vec::new(), &mut masks);
        for pivots in masks {
            // free positions: row i may be nonzero at columns j > pivots[i], j not a pivot
            let mut free_pos: Vec<(usize, usize)> = Vec::new();
            for (i, &pc) in pivots.iter().enumerate() {
                for j in pc + 1..n {
                    if !pivots.contains(&j) {
                        free_pos.push((i, j));
                    }
                }
            }
            for assign in enumerate_vectors(field, free_pos.len()) {
                let mut basis = vec![vzero(n); k];
                for (i, &pc) in pivots.iter().enumerate() {
                    basis[i][pc] = 1;
                }
                for ((i, j), v) in free_pos.iter().zip(&assign) {
                    basis[*i][*j] = *v;
                }
                out.push(Subspace { field, ambient: n, basis: basis.clone() });
            }
        }
    }
    debug_assert_eq!(out.len() as u128, count);
    Ok(out)
}

fn collect_subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        cur.push(i);
        collect_subsets(n, k, i + 1, cur, out);
        cur.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Field {
        Field::new(2).unwrap()
    }

    fn f3() -> Field {
        Field::new(3).unwrap()
    }

    #[test]
    fn field_rejects_composites() {
        assert!(Field::new(4).is_err());
        assert!(Field::new(1).is_err());
        assert!(Field::new(5).is_ok());
    }

    #[test]
    fn rref_kills_duplicate_rows_over_f2() {
        let m = Mat::from_rows(f2(), vec![vec![1, 1, 0], vec![1, 1, 0]]).unwrap();
        let (r, pivots) = m.rref();
        assert_eq!(pivots, vec![0]);
        assert_eq!(r.row(0), &[1, 1, 0]);
        assert_eq!(r.row(1), &[0, 0, 0]);
    }

    #[test]
    fn rref_identity_fixed() {
        let m = Mat::identity(f3(), 3);
        let (r, pivots) = m.rref();
        assert_eq!(r, Mat::identity(f3(), 3));
        assert_eq!(pivots, vec![0, 1, 2]);
    }

    #[test]
    fn rref_permutation_sorts_over_f3() {
        // permutation matrix rows get sorted into the identity
        let m = Mat::from_rows(f3(), vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]).unwrap();
        let (r, _) = m.rref();
        assert_eq!(r, Mat::identity(f3(), 3));
    }

    #[test]
    fn kernel_of_rank_one() {
        // [[1,1],[1,1]] over F_2 has kernel spanned by (1,1)
        let m = Mat::from_rows(f2(), vec![vec![1, 1], vec![1, 1]]).unwrap();
        let k = m.kernel();
        assert_eq!(k.dim(), 1);
        assert!(k.contains_vec(&[1, 1]));
        assert!(!k.contains_vec(&[1, 0]));
    }

    #[test]
    fn kernel_of_zero_map_is_full() {
        let m = Mat::zero(f3(), 2, 3);
        assert_eq!(m.kernel(), Subspace::full(f3(), 3));
    }

    #[test]
    fn cokernel_contract() {
        let m = Mat::from_rows(f2(), vec![vec![1, 0], vec![1, 0], vec![0, 0]]).unwrap();
        let (q, s) = m.cokernel();
        assert_eq!(q.rows, 2); // 3 - rank 1
        assert!(q.mul(&m).unwrap().is_zero());
        assert_eq!(q.mul(&s).unwrap(), Mat::identity(f2(), 2));
        assert_eq!(q.rank(), 2);
    }

    #[test]
    fn solve_consistent_and_not() {
        let m = Mat::from_rows(f3(), vec![vec![1, 1], vec![2, 2]]).unwrap();
        let x = m.solve(&[1, 2]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![1, 2]);
        assert!(m.solve(&[1, 1]).is_none());
    }

    #[test]
    fn subspace_canonical_equality() {
        // two different spanning sets of the same plane agree literally
        let a = Subspace::span(f3(), 3, vec![vec![1, 2, 0], vec![0, 1, 1]]);
        let b = Subspace::span(f3(), 3, vec![vec![1, 0, 1], vec![1, 1, 2]]);
        assert_eq!(a, b);
    }

    #[test]
    fn subspace_lattice_ops() {
        let f = f2();
        let x = Subspace::span(f, 3, vec![vec![1, 0, 0], vec![0, 1, 0]]);
        let y = Subspace::span(f, 3, vec![vec![0, 1, 0], vec![0, 0, 1]]);
        let meet = x.intersect(&y).unwrap();
        assert_eq!(meet, Subspace::span(f, 3, vec![vec![0, 1, 0]]));
        let join = x.sum(&y).unwrap();
        assert_eq!(join, Subspace::full(f, 3));
        assert!(join.contains(&meet));
    }

    #[test]
    fn double_orthogonal_is_identity() {
        let s = Subspace::span(f3(), 4, vec![vec![1, 2, 0, 1], vec![0, 0, 1, 1]]);
        assert_eq!(s.orthogonal().orthogonal(), s);
    }

    #[test]
    fn coords_roundtrip() {
        let f = f3();
        let s = Subspace::span(f, 3, vec![vec![1, 0, 2], vec![0, 1, 1]]);
        let v = vadd(f, &vscale(f, 2, &s.basis()[0]), &s.basis()[1]);
        assert_eq!(s.coords_of(&v), Some(vec![2, 1]));
        assert_eq!(s.coords_of(&[0, 0, 1]), None);
    }

    #[test]
    fn subspace_counts_frozen() {
        // dim 1 over F_2: zero and the line -> 2
        assert_eq!(count_subspaces(f2(), 1), 2);
        // dim 2 over F_2: 0, three lines, full -> 5
        assert_eq!(count_subspaces(f2(), 2), 5);
        // dim 2 over F_3: 0, four lines, full -> 6
        assert_eq!(count_subspaces(f3(), 2), 6);
        assert_eq!(enumerate_subspaces(f2(), 2, 1000).unwrap().len(), 5);
        assert_eq!(enumerate_subspaces(f3(), 2, 1000).unwrap().len(), 6);
    }

    #[test]
    fn enumerate_subspaces_respects_cap() {
        match enumerate_subspaces(f2(), 2, 3) {
            Err(Error::EnumerationTooLarge { count, cap }) => {
                assert_eq!((count, cap), (5, 3));
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn enumerated_subspaces_are_distinct_and_canonical() {
        let subs = enumerate_subspaces(f3(), 3, 10_000).unwrap();
        for (i, a) in subs.iter().enumerate() {
            for b in subs.iter().skip(i + 1) {
                assert_ne!(a, b);
            }
            // canonical: re-spanning the basis reproduces the same data
            assert_eq!(*a, Subspace::span(f3(), 3, a.basis().to_vec()));
        }
    }

    #[test]
    fn zero_shaped_matrices() {
        let m = Mat::zero(f2(), 0, 3);
        assert_eq!(m.rank(), 0);
        assert_eq!(m.kernel(), Subspace::full(f2(), 3));
        let n = Mat::zero(f2(), 3, 0);
        assert_eq!(n.kernel(), Subspace::zero(f2(), 0));
        let (q, _s) = n.cokernel();
        assert_eq!(q.rows, 3);
    }
}
