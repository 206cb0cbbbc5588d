use std::fmt;

use crate::error::{Error, Result};
use crate::field::PrimeField;

/// Strictly upper-triangular positions of an `n × n` matrix in the fixed
/// flattening order: by superdiagonal `j - i`, then by row.
///
/// For `n = 3` this is `E12, E23, E13`.
pub fn flat_positions(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for level in 1..n {
        for i in 0..n - level {
            out.push((i, i + level));
        }
    }
    out
}

fn matmul(f: PrimeField, n: usize, a: &[u32], b: &[u32]) -> Vec<u32> {
    let p = f.p() as u64;
    let mut out = vec![0u32; n * n];
    for i in 0..n {
        for k in i..n {
            let aik = a[i * n + k];
            if aik == 0 {
                continue;
            }
            for j in k..n {
                let bkj = b[k * n + j];
                if bkj != 0 {
                    let idx = i * n + j;
                    out[idx] = ((out[idx] as u64 + aik as u64 * bkj as u64) % p) as u32;
                }
            }
        }
    }
    out
}

/// An element of ut(N, F_p): strictly upper triangular.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NilMatrix {
    n: usize,
    field: PrimeField,
    entries: Vec<u32>,
}

impl NilMatrix {
    pub fn zero(field: PrimeField, n: usize) -> Self {
        Self {
            n,
            field,
            entries: vec![0; n * n],
        }
    }

    /// Elementary matrix `E_{ij}` with 1-based indices, as in the usual notation.
    pub fn elementary(field: PrimeField, n: usize, i: usize, j: usize) -> Result<Self> {
        if i == 0 || j == 0 || i > n || j > n {
            return Err(Error::Shape(format!("E{i},{j} outside a {n}x{n} matrix")));
        }
        if i >= j {
            return Err(Error::NotStrictlyUpper { row: i - 1, col: j - 1 });
        }
        let mut m = Self::zero(field, n);
        m.entries[(i - 1) * n + (j - 1)] = 1;
        Ok(m)
    }

    /// Builds a matrix from dense integer rows, reducing modulo p.
    pub fn from_rows(field: PrimeField, rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = vec![0u32; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Shape(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                let r = field.reduce(v);
                if r != 0 && i >= j {
                    return Err(Error::NotStrictlyUpper { row: i, col: j });
                }
                entries[i * n + j] = r;
            }
        }
        Ok(Self { n, field, entries })
    }

    /// Inverse of [`NilMatrix::flatten`].
    pub fn from_flat(field: PrimeField, n: usize, flat: &[u32]) -> Self {
        let mut m = Self::zero(field, n);
        for (&(i, j), &v) in flat_positions(n).iter().zip(flat) {
            m.entries[i * n + j] = v % field.p();
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.n + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.n.max(1)).map(<[u32]>::to_vec).take(self.n).collect()
    }

    /// Entries in the fixed flattening order.
    pub fn flatten(&self) -> Vec<u32> {
        flat_positions(self.n)
            .into_iter()
            .map(|(i, j)| self.get(i, j))
            .collect()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.field != other.field {
            return Err(Error::Shape(format!(
                "{}x{} over F_{} vs {}x{} over F_{}",
                self.n,
                self.n,
                self.field.p(),
                other.n,
                other.n,
                other.field.p()
            )));
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, op: impl Fn(u32, u32) -> u32) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            n: self.n,
            field: self.field,
            entries: self.entries.iter().zip(&other.entries).map(|(&a, &b)| op(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let f = self.field;
        self.zip_with(other, |a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let f = self.field;
        self.zip_with(other, |a, b| f.sub(a, b))
    }

    pub fn scale(&self, c: u32) -> Self {
        let f = self.field;
        Self {
            n: self.n,
            field: f,
            entries: self.entries.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    /// Associative product; stays strictly upper triangular.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            n: self.n,
            field: self.field,
            entries: matmul(self.field, self.n, &self.entries, &other.entries),
        })
    }

    /// `[x, y] = xy - yx`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    /// Truncated exponential series `Σ x^k / k!`, stopping at the first
    /// vanishing power. Fails if a nonzero power `x^k` with `k ≥ p` appears,
    /// since `k!` is then not invertible.
    pub fn exp(&self) -> Result<GroupElement> {
        let f = self.field;
        let mut result = GroupElement::identity(f, self.n).entries;
        let mut power = self.clone();
        let mut k = 1u32;
        let mut factorial = 1u32;
        while !power.is_zero() {
            if k >= f.p() {
                return Err(Error::CharacteristicTooSmall {
                    p: f.p(),
                    required: k as usize + 1,
                });
            }
            factorial = f.mul(factorial, k);
            let c = f.inv(factorial)?;
            for (r, &v) in result.iter_mut().zip(&power.entries) {
                *r = f.mul_add(*r, c, v);
            }
            power = power.matmul(self)?;
            k += 1;
        }
        Ok(GroupElement {
            n: self.n,
            field: f,
            entries: result,
        })
    }
}

impl fmt::Debug for NilMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NilMatrix(p={}, {:?})", self.field.p(), self.rows())
    }
}

/// An element of the unitriangular group UT(N, F_p).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    n: usize,
    field: PrimeField,
    entries: Vec<u32>,
}

impl GroupElement {
    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut entries = vec![0u32; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        Self { n, field, entries }
    }

    pub fn from_rows(field: PrimeField, rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = vec![0u32; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Shape(format!("row {i} has {} entries", row.len())));
            }
            for (j, &v) in row.iter().enumerate() {
                let r = field.reduce(v);
                let ok = if i == j { r == 1 } else { i < j || r == 0 };
                if !ok {
                    return Err(Error::Shape(format!("not unitriangular at ({i}, {j})")));
                }
                entries[i * n + j] = r;
            }
        }
        Ok(Self { n, field, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.n + j]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.field, self.n)
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.n.max(1)).map(<[u32]>::to_vec).take(self.n).collect()
    }

    fn check_compatible(&self, n: usize, field: PrimeField) -> Result<()> {
        if self.n != n || self.field != field {
            return Err(Error::Shape(format!(
                "group element is {}x{} over F_{}, operand is {n}x{n} over F_{}",
                self.n,
                self.n,
                self.field.p(),
                field.p()
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other.n, other.field)?;
        Ok(Self {
            n: self.n,
            field: self.field,
            entries: matmul(self.field, self.n, &self.entries, &other.entries),
        })
    }

    /// `g - I`.
    fn unipotent_part(&self) -> NilMatrix {
        let f = self.field;
        let mut entries = self.entries.clone();
        for i in 0..self.n {
            entries[i * self.n + i] = f.sub(entries[i * self.n + i], 1);
        }
        NilMatrix {
            n: self.n,
            field: f,
            entries,
        }
    }

    /// `(I + u)^{-1} = Σ (-u)^k`; needs no denominators.
    pub fn inverse(&self) -> Self {
        let f = self.field;
        let neg_u = self.unipotent_part().scale(f.neg(1));
        let mut result = Self::identity(f, self.n).entries;
        let mut power = neg_u.clone();
        while !power.is_zero() {
            for (r, &v) in result.iter_mut().zip(&power.entries) {
                *r = f.add(*r, v);
            }
            power = power.matmul(&neg_u).expect("same shape");
        }
        Self {
            n: self.n,
            field: f,
            entries: result,
        }
    }

    /// Truncated logarithm `Σ_{k≥1} (-1)^{k+1} (g - I)^k / k`.
    pub fn log(&self) -> Result<NilMatrix> {
        let f = self.field;
        let u = self.unipotent_part();
        let mut result = NilMatrix::zero(f, self.n);
        let mut power = u.clone();
        let mut k = 1u32;
        while !power.is_zero() {
            if k >= f.p() {
                return Err(Error::CharacteristicTooSmall {
                    p: f.p(),
                    required: k as usize + 1,
                });
            }
            let mut c = f.inv(k)?;
            if k.is_multiple_of(2) {
                c = f.neg(c);
            }
            for (r, &v) in result.entries.iter_mut().zip(&power.entries) {
                *r = f.mul_add(*r, c, v);
            }
            power = power.matmul(&u)?;
            k += 1;
        }
        Ok(result)
    }

    /// `Ad_g(x) = g x g^{-1}`.
    pub fn adjoint(&self, x: &NilMatrix) -> Result<NilMatrix> {
        self.check_compatible(x.n, x.field)?;
        let f = self.field;
        let gx = matmul(f, self.n, &self.entries, &x.entries);
        let inv = self.inverse();
        Ok(NilMatrix {
            n: self.n,
            field: f,
            entries: matmul(f, self.n, &gx, &inv.entries),
        })
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement(p={}, {:?})", self.field.p(), self.rows())
    }
}

/// `[x, y]`.
pub fn bracket(x: &NilMatrix, y: &NilMatrix) -> Result<NilMatrix> {
    x.bracket(y)
}

pub fn exp(x: &NilMatrix) -> Result<GroupElement> {
    x.exp()
}

pub fn log(g: &GroupElement) -> Result<NilMatrix> {
    g.log()
}

pub fn adjoint(g: &GroupElement, x: &NilMatrix) -> Result<NilMatrix> {
    g.adjoint(x)
}
