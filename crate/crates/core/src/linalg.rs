//! Dense linear algebra over F_p: reduced row echelon forms, kernels and
//! subspaces given by echelonized spanning rows.

use crate::field::PrimeField;

/// Row-reduces `rows` in place to reduced row echelon form and drops zero
/// rows. Returns the pivot column of each surviving row.
pub fn rref(f: PrimeField, rows: &mut Vec<Vec<u32>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(found) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, found);
        let inv = f.inv(rows[r][col]).expect("pivot is nonzero");
        for v in rows[r].iter_mut() {
            *v = f.mul(*v, inv);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][col] != 0 {
                let factor = f.neg(rows[i][col]);
                let (pivot_row, other) = if i < r {
                    let (a, b) = rows.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = rows.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for (o, &pv) in other.iter_mut().zip(pivot_row.iter()) {
                    *o = f.mul_add(*o, factor, pv);
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Basis (in RREF) of `{x : M x = 0}` for an `m × ncols` matrix `M`.
pub fn kernel(f: PrimeField, matrix: &[Vec<u32>], ncols: usize) -> Vec<Vec<u32>> {
    let mut rows: Vec<Vec<u32>> = matrix.to_vec();
    let pivots = rref(f, &mut rows);
    let mut is_pivot = vec![false; ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut x = vec![0u32; ncols];
        x[free] = 1;
        for (row, &pc) in rows.iter().zip(&pivots) {
            x[pc] = f.neg(row[free]);
        }
        basis.push(x);
    }
    rref(f, &mut basis);
    basis
}

/// A subspace of F_p^n stored as its reduced echelon basis, which makes the
/// representation canonical: two subspaces are equal iff their rows are.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    field: PrimeField,
    ambient_dim: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn span(field: PrimeField, ambient_dim: usize, vectors: &[Vec<u32>]) -> Self {
        let mut rows: Vec<Vec<u32>> = vectors
            .iter()
            .map(|v| {
                assert_eq!(v.len(), ambient_dim, "vector length mismatch");
                v.iter().map(|&x| x % field.p()).collect()
            })
            .collect();
        let pivots = rref(field, &mut rows);
        Self {
            field,
            ambient_dim,
            rows,
            pivots,
        }
    }

    pub fn zero(field: PrimeField, ambient_dim: usize) -> Self {
        Self::span(field, ambient_dim, &[])
    }

    pub fn full(field: PrimeField, ambient_dim: usize) -> Self {
        let rows: Vec<Vec<u32>> = (0..ambient_dim).map(|i| unit(ambient_dim, i)).collect();
        Self::span(field, ambient_dim, &rows)
    }

    /// `{x : M x = 0}`.
    pub fn kernel_of(field: PrimeField, matrix: &[Vec<u32>], ncols: usize) -> Self {
        let rows = kernel(field, matrix, ncols);
        Self::span(field, ncols, &rows)
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

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Eliminates the pivot coordinates of `v`; zero iff `v` is in the span.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let f = self.field;
        let mut out = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = out[pc];
            if c != 0 {
                let factor = f.neg(c);
                for (o, &r) in out.iter_mut().zip(row) {
                    *o = f.mul_add(*o, factor, r);
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Coefficients of `v` on the echelon rows, or `None` if `v` is outside.
    pub fn coords_of(&self, v: &[u32]) -> Option<Vec<u32>> {
        let coeffs: Vec<u32> = self.pivots.iter().map(|&pc| v[pc]).collect();
        let back = self.combination(&coeffs);
        (back == v).then_some(coeffs)
    }

    /// `Σ coeffs[k] · rows[k]`.
    pub fn combination(&self, coeffs: &[u32]) -> Vec<u32> {
        debug_assert_eq!(coeffs.len(), self.rows.len());
        let f = self.field;
        let mut out = vec![0u32; self.ambient_dim];
        for (row, &c) in self.rows.iter().zip(coeffs) {
            if c != 0 {
                for (o, &r) in out.iter_mut().zip(row) {
                    *o = f.mul_add(*o, c, r);
                }
            }
        }
        out
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut all = self.rows.clone();
        all.extend(other.rows.iter().cloned());
        Subspace::span(self.field, self.ambient_dim, &all)
    }

    pub fn with_vector(&self, v: &[u32]) -> Subspace {
        let mut all = self.rows.clone();
        all.push(v.to_vec());
        Subspace::span(self.field, self.ambient_dim, &all)
    }

    /// Echelon vectors spanning a complement of `self` inside `big`: the rows
    /// of `big` reduced modulo `self`, re-echelonized. Requires `self ⊆ big`.
    pub fn complement_in(&self, big: &Subspace) -> Vec<Vec<u32>> {
        let mut reduced: Vec<Vec<u32>> = big.rows.iter().map(|r| self.reduce(r)).collect();
        reduced.retain(|r| r.iter().any(|&x| x != 0));
        rref(self.field, &mut reduced);
        reduced
    }

    /// `{ν : ν · s = 0 for all s in self}`.
    pub fn annihilator(&self) -> Subspace {
        Subspace::kernel_of(self.field, &self.rows, self.ambient_dim)
    }
}

pub fn unit(n: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0u32; n];
    v[i] = 1;
    v
}

pub fn dot(f: PrimeField, a: &[u32], b: &[u32]) -> u32 {
    let p = f.p() as u64;
    let s = a.iter().zip(b).fold(0u64, |acc, (&x, &y)| (acc + x as u64 * y as u64) % p);
    s as u32
}

/// Base-p packing of a coordinate vector, most significant coordinate first,
/// so integer order equals lexicographic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Encoder {
    p: u64,
    dim: usize,
}

impl Encoder {
    pub fn new(p: u32, dim: usize) -> Self {
        Self { p: p as u64, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `p^dim`, or `None` on overflow.
    pub fn count(&self) -> Option<u64> {
        self.p.checked_pow(self.dim as u32)
    }

    #[inline]
    pub fn encode(&self, coords: &[u32]) -> u64 {
        coords.iter().fold(0u64, |acc, &c| acc * self.p + c as u64)
    }

    #[inline]
    pub fn decode_into(&self, mut code: u64, out: &mut [u32]) {
        for slot in out.iter_mut().rev() {
            *slot = (code % self.p) as u32;
            code /= self.p;
        }
    }

    pub fn decode(&self, code: u64) -> Vec<u32> {
        let mut v = vec![0u32; self.dim];
        self.decode_into(code, &mut v);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn rref_and_rank() {
        let mut rows = vec![vec![1, 2, 1], vec![2, 4, 0], vec![3, 6, 0]];
        let piv = rref(f(5), &mut rows);
        assert_eq!(piv, vec![0, 2]);
        assert_eq!(rows, vec![vec![1, 2, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn kernel_is_annihilated() {
        let fp = f(7);
        let m = vec![vec![1, 2, 3, 4], vec![0, 1, 5, 6]];
        let k = kernel(fp, &m, 4);
        assert_eq!(k.len(), 2);
        for x in &k {
            for row in &m {
                assert_eq!(dot(fp, row, x), 0);
            }
        }
    }

    #[test]
    fn subspace_membership_and_complement() {
        let fp = f(3);
        let s = Subspace::span(fp, 3, &[vec![0, 0, 1]]);
        let full = Subspace::full(fp, 3);
        assert!(s.contains(&[0, 0, 2]));
        assert!(!s.contains(&[1, 0, 0]));
        assert_eq!(s.coords_of(&[0, 0, 2]), Some(vec![2]));
        assert_eq!(s.coords_of(&[0, 1, 2]), None);
        assert_eq!(s.complement_in(&full), vec![vec![1, 0, 0], vec![0, 1, 0]]);
        assert_eq!(s.annihilator().dim(), 2);
        assert!(s.is_subspace_of(&full));
    }

    #[test]
    fn encoder_is_lexicographic() {
        let e = Encoder::new(3, 3);
        assert_eq!(e.encode(&[0, 0, 1]), 1);
        assert_eq!(e.encode(&[1, 0, 0]), 9);
        assert_eq!(e.decode(14), vec![1, 1, 2]);
        assert_eq!(e.count(), Some(27));
    }
}
