use std::cell::RefCell;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::linalg::field::PrimeField;

/// Sparse coordinate vector: `(column, nonzero value)` pairs with strictly increasing columns.
pub type SparseVec = Vec<(u32, u32)>;

const NO_ROW: u32 = u32::MAX;

/// Dense scratch accumulator with a touched list, reused per thread.
struct Accumulator {
    dense: Vec<u32>,
    touched: Vec<u32>,
}

impl Accumulator {
    fn ensure(&mut self, dim: usize) {
        if self.dense.len() < dim {
            self.dense.resize(dim, 0);
        }
    }

    #[inline]
    fn add(&mut self, f: &PrimeField, col: u32, val: u32) {
        let slot = &mut self.dense[col as usize];
        if *slot == 0 {
            self.touched.push(col);
        }
        *slot = f.add(*slot, val);
    }

    fn drain_sorted(&mut self) -> SparseVec {
        self.touched.sort_unstable();
        self.touched.dedup();
        let mut out = Vec::with_capacity(self.touched.len());
        for &c in &self.touched {
            let v = std::mem::take(&mut self.dense[c as usize]);
            if v != 0 {
                out.push((c, v));
            }
        }
        self.touched.clear();
        out
    }
}

thread_local! {
    static SCRATCH: RefCell<Accumulator> = const {
        RefCell::new(Accumulator { dense: Vec::new(), touched: Vec::new() })
    };
}

pub fn scale(f: &PrimeField, v: &mut SparseVec, c: u32) {
    for e in v.iter_mut() {
        e.1 = f.mul(e.1, c);
    }
}

fn normalize(f: &PrimeField, v: &mut SparseVec) {
    if let Some(&(_, lead)) = v.first() {
        if lead != 1 {
            let inv = f.inv(lead);
            scale(f, v, inv);
        }
    }
}

/// Linear combination `Σ c_i v_i` of sparse vectors.
pub fn combine<'a>(f: &PrimeField, dim: usize, terms: impl IntoIterator<Item = (u32, &'a SparseVec)>) -> SparseVec {
    SCRATCH.with(|s| {
        let mut acc = s.borrow_mut();
        acc.ensure(dim);
        for (c, v) in terms {
            if c == 0 {
                continue;
            }
            for &(col, val) in v {
                acc.add(f, col, f.mul(c, val));
            }
        }
        acc.drain_sorted()
    })
}

/// Incremental row echelon form. Each stored row starts with its pivot (value 1) and
/// rows are not back-substituted until [`Echelon::into_subspace`].
pub struct Echelon {
    field: PrimeField,
    dim: usize,
    rows: Vec<SparseVec>,
    pivot_row: Vec<u32>,
    acc: Vec<u32>,
    heap: BinaryHeap<Reverse<u32>>,
}

impl Echelon {
    pub fn new(field: PrimeField, dim: usize) -> Self {
        Echelon {
            field,
            dim,
            rows: Vec::new(),
            pivot_row: vec![NO_ROW; dim],
            acc: vec![0; dim],
            heap: BinaryHeap::new(),
        }
    }

    /// Starts from an existing reduced basis.
    pub fn from_subspace(s: &Subspace) -> Self {
        let mut e = Echelon::new(s.field, s.ambient_dim);
        for row in &s.rows {
            e.pivot_row[row[0].0 as usize] = e.rows.len() as u32;
            e.rows.push(row.clone());
        }
        e
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.rows[i]
    }

    pub fn has_pivot(&self, col: u32) -> bool {
        self.pivot_row[col as usize] != NO_ROW
    }

    /// Residue of `v` modulo the current span, in increasing column order.
    pub fn reduce(&mut self, v: &[(u32, u32)]) -> SparseVec {
        let f = self.field;
        for &(c, val) in v {
            debug_assert!((c as usize) < self.dim);
            let slot = &mut self.acc[c as usize];
            if *slot == 0 {
                self.heap.push(Reverse(c));
            }
            *slot = f.add(*slot, val);
        }
        let mut out = SparseVec::new();
        while let Some(Reverse(c)) = self.heap.pop() {
            let coef = self.acc[c as usize];
            if coef == 0 {
                continue;
            }
            let r = self.pivot_row[c as usize];
            if r == NO_ROW {
                out.push((c, coef));
                self.acc[c as usize] = 0;
                continue;
            }
            let neg = f.neg(coef);
            for &(j, val) in &self.rows[r as usize] {
                let slot = &mut self.acc[j as usize];
                if *slot == 0 {
                    self.heap.push(Reverse(j));
                }
                *slot = f.add(*slot, f.mul(neg, val));
            }
            debug_assert_eq!(self.acc[c as usize], 0);
        }
        out
    }

    /// Adds `v` to the span. Returns the new row index if the rank grew.
    pub fn insert(&mut self, v: &[(u32, u32)]) -> Option<usize> {
        let mut r = self.reduce(v);
        if r.is_empty() {
            return None;
        }
        normalize(&self.field, &mut r);
        let idx = self.rows.len();
        self.pivot_row[r[0].0 as usize] = idx as u32;
        self.rows.push(r);
        Some(idx)
    }

    pub fn contains(&mut self, v: &[(u32, u32)]) -> bool {
        self.reduce(v).is_empty()
    }

    /// Back-substitutes into the canonical reduced echelon form.
    pub fn into_subspace(self) -> Subspace {
        let f = self.field;
        let dim = self.dim;
        let mut rows = self.rows;
        rows.sort_unstable_by_key(|r| r[0].0);
        let pivots: Vec<u32> = rows.iter().map(|r| r[0].0).collect();
        let mut reduced: Vec<SparseVec> = vec![Vec::new(); rows.len()];
        for i in (0..rows.len()).rev() {
            let row = std::mem::take(&mut rows[i]);
            let needs = row[1..].iter().any(|&(c, _)| pivots.binary_search(&c).is_ok());
            if !needs {
                reduced[i] = row;
                continue;
            }
            let r = SCRATCH.with(|s| {
                let mut acc = s.borrow_mut();
                acc.ensure(dim);
                for &(c, val) in &row {
                    acc.add(&f, c, val);
                }
                for &(c, val) in &row[1..] {
                    if let Ok(j) = pivots.binary_search(&c) {
                        let neg = f.neg(val);
                        for &(cc, vv) in &reduced[j] {
                            acc.add(&f, cc, f.mul(neg, vv));
                        }
                    }
                }
                acc.drain_sorted()
            });
            reduced[i] = r;
        }
        Subspace {
            field: f,
            ambient_dim: dim,
            rows: reduced,
            pivots,
        }
    }
}

/// A subspace of F_p^n stored in canonical reduced row echelon form.
///
/// Two subspaces are equal exactly when their bases are identical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    field: PrimeField,
    ambient_dim: usize,
    rows: Vec<SparseVec>,
    pivots: Vec<u32>,
}

impl Subspace {
    pub fn zero(field: PrimeField, ambient_dim: usize) -> Self {
        Subspace {
            field,
            ambient_dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: PrimeField, ambient_dim: usize) -> Self {
        let rows = (0..ambient_dim as u32).map(|c| vec![(c, 1)]).collect();
        Subspace {
            field,
            ambient_dim,
            rows,
            pivots: (0..ambient_dim as u32).collect(),
        }
    }

    /// Canonical basis of the row span of dense coordinate vectors.
    pub fn rref(field: PrimeField, rows: &[Vec<u32>], ambient_dim: usize) -> Result<Self> {
        let mut e = Echelon::new(field, ambient_dim);
        for row in rows {
            let sv = dense_to_sparse(&field, row, ambient_dim)?;
            e.insert(&sv);
        }
        Ok(e.into_subspace())
    }

    pub fn from_sparse_rows<I>(field: PrimeField, ambient_dim: usize, rows: I) -> Self
    where
        I: IntoIterator,
        I::Item: AsRef<[(u32, u32)]>,
    {
        let mut e = Echelon::new(field, ambient_dim);
        for r in rows {
            e.insert(r.as_ref());
        }
        e.into_subspace()
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient_dim - self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[u32] {
        &self.pivots
    }

    pub fn is_pivot(&self, col: u32) -> bool {
        self.pivots.binary_search(&col).is_ok()
    }

    pub fn dense_basis(&self) -> Vec<Vec<u32>> {
        self.rows
            .iter()
            .map(|r| {
                let mut d = vec![0; self.ambient_dim];
                for &(c, v) in r {
                    d[c as usize] = v;
                }
                d
            })
            .collect()
    }

    pub fn non_pivot_columns(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.codim());
        let mut it = self.pivots.iter().peekable();
        for c in 0..self.ambient_dim as u32 {
            if it.peek() == Some(&&c) {
                it.next();
            } else {
                out.push(c);
            }
        }
        out
    }

    /// Residue of `v` after subtracting its pivot components. One pass suffices in
    /// reduced form.
    pub fn reduce(&self, v: &[(u32, u32)]) -> SparseVec {
        let f = self.field;
        SCRATCH.with(|s| {
            let mut acc = s.borrow_mut();
            acc.ensure(self.ambient_dim);
            for &(c, val) in v {
                acc.add(&f, c, val);
            }
            for &(c, val) in v {
                if let Ok(i) = self.pivots.binary_search(&c) {
                    let neg = f.neg(val);
                    for &(cc, vv) in &self.rows[i] {
                        acc.add(&f, cc, f.mul(neg, vv));
                    }
                }
            }
            acc.drain_sorted()
        })
    }

    pub fn contains_sparse(&self, v: &[(u32, u32)]) -> bool {
        self.reduce(v).is_empty()
    }

    pub fn membership(&self, v: &[u32]) -> Result<bool> {
        let sv = dense_to_sparse(&self.field, v, self.ambient_dim)?;
        Ok(self.contains_sparse(&sv))
    }

    fn check_same(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: other.ambient_dim,
            });
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_same(other)?;
        let (big, small) = if self.dim() >= other.dim() { (self, other) } else { (other, self) };
        let mut e = Echelon::from_subspace(big);
        for r in &small.rows {
            e.insert(r);
        }
        Ok(e.into_subspace())
    }

    /// Intersection through the kernel of `U → F^n / V`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_same(other)?;
        let f = self.field;
        let residues: Vec<SparseVec> = self.rows.iter().map(|r| other.reduce(r)).collect();
        let kernel = kernel_combinations(f, residues, self.ambient_dim);
        let rows: Vec<SparseVec> = kernel
            .iter()
            .map(|combo| combine(&f, self.ambient_dim, combo.iter().map(|&(i, c)| (c, &self.rows[i as usize]))))
            .collect();
        Ok(Subspace::from_sparse_rows(f, self.ambient_dim, rows))
    }

    /// Projection onto the first `dim` coordinates.
    pub fn truncate(&self, dim: usize) -> Subspace {
        if dim >= self.ambient_dim {
            return Subspace { ambient_dim: dim.max(self.ambient_dim), ..self.clone() };
        }
        // truncating a reduced basis keeps it reduced
        let mut rows = Vec::new();
        let mut pivots = Vec::new();
        for r in &self.rows {
            if (r[0].0 as usize) < dim {
                pivots.push(r[0].0);
                rows.push(r.iter().copied().filter(|&(c, _)| (c as usize) < dim).collect());
            }
        }
        Subspace {
            field: self.field,
            ambient_dim: dim,
            rows,
            pivots,
        }
    }

    /// Embeds into a larger ambient space and adjoins all coordinates `>= self.ambient_dim`.
    pub fn extend_full(&self, dim: usize) -> Subspace {
        let mut s = self.clone();
        for c in self.ambient_dim as u32..dim as u32 {
            s.rows.push(vec![(c, 1)]);
            s.pivots.push(c);
        }
        s.ambient_dim = dim.max(self.ambient_dim);
        s
    }
}

fn dense_to_sparse(f: &PrimeField, row: &[u32], dim: usize) -> Result<SparseVec> {
    if row.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: row.len(),
        });
    }
    Ok(row
        .iter()
        .enumerate()
        .filter_map(|(c, &v)| {
            let v = v % f.modulus();
            (v != 0).then_some((c as u32, v))
        })
        .collect())
}

/// Basis of `{ c : Σ c_i images[i] = 0 }`, each element a sparse vector over the
/// indices of `images`. Columns `>= image_dim` carry the combination tags.
pub fn kernel_combinations(field: PrimeField, images: Vec<SparseVec>, image_dim: usize) -> Vec<SparseVec> {
    let n = images.len();
    let mut e = Echelon::new(field, image_dim + n);
    let mut kernel = Vec::new();
    for (i, mut v) in images.into_iter().enumerate() {
        v.push(((image_dim + i) as u32, 1));
        let r = e.reduce(&v);
        if r.is_empty() {
            continue;
        }
        if (r[0].0 as usize) < image_dim {
            let mut r = r;
            normalize(&field, &mut r);
            let idx = e.rows.len();
            e.pivot_row[r[0].0 as usize] = idx as u32;
            e.rows.push(r);
        } else {
            kernel.push(r.into_iter().map(|(c, v)| (c - image_dim as u32, v)).collect());
        }
    }
    kernel
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    #[test]
    fn proportional_rows_collapse() {
        let s = Subspace::rref(f7(), &[vec![1, 2], vec![2, 4]], 2).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.dense_basis(), vec![vec![1, 2]]);
    }

    #[test]
    fn empty_span_is_zero() {
        let s = Subspace::rref(f7(), &[], 3).unwrap();
        assert_eq!(s.dim(), 0);
        assert_eq!(s, Subspace::zero(f7(), 3));
    }

    #[test]
    fn wrong_length_is_rejected() {
        let err = Subspace::rref(f7(), &[vec![1, 2, 3]], 2).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 3 });
    }

    #[test]
    fn coordinate_axes() {
        let f = f7();
        let u = Subspace::rref(f, &[vec![1, 0]], 2).unwrap();
        let v = Subspace::rref(f, &[vec![0, 1]], 2).unwrap();
        assert_eq!(u.sum(&v).unwrap().dim(), 2);
        assert_eq!(u.intersect(&v).unwrap().dim(), 0);
        assert_eq!(u.sum(&u).unwrap(), u);
        assert_eq!(u.intersect(&Subspace::full(f, 2)).unwrap(), u);
    }

    #[test]
    fn membership_basics() {
        let f = f7();
        let u = Subspace::rref(f, &[vec![1, 1, 0]], 3).unwrap();
        assert!(u.membership(&[0, 0, 0]).unwrap());
        assert!(u.membership(&[3, 3, 0]).unwrap());
        assert!(!u.membership(&[0, 1, 0]).unwrap());
        let w = u.sum(&Subspace::rref(f, &[vec![0, 1, 0]], 3).unwrap()).unwrap();
        assert!(w.membership(&[0, 1, 0]).unwrap());
    }

    #[test]
    fn truncate_and_extend() {
        let f = f7();
        let u = Subspace::rref(f, &[vec![1, 0, 3, 0], vec![0, 0, 0, 1]], 4).unwrap();
        let t = u.truncate(3);
        assert_eq!(t.dense_basis(), vec![vec![1, 0, 3]]);
        let e = t.extend_full(5);
        assert_eq!(e.dim(), 3);
        assert_eq!(e.pivots(), &[0, 3, 4]);
    }
}
