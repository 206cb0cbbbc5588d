use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use super::matrix::{flat_positions, GroupElement, NilMatrix};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::{Encoder, Subspace};

/// Fingerprint of an algebra (field, matrix size and canonical basis).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlgebraId(pub u64);

/// A bracket-closed subspace g ⊆ ut(N, F_p) with its canonical basis.
///
/// The basis is the reduced row echelon form of g in the flattened matrix
/// coordinates of [`flat_positions`], so two algebras are equal iff their
/// bases are. Coordinates of `x ∈ g` are read off the pivot positions.
#[derive(Debug, Clone)]
pub struct LieAlgebra {
    field: PrimeField,
    n: usize,
    basis: Vec<NilMatrix>,
    flat: Subspace,
    /// `structure[i][j]` = coordinates of `[b_i, b_j]`.
    structure: Vec<Vec<Vec<u32>>>,
    nil_index: usize,
    center: Subspace,
    id: AlgebraId,
}

impl PartialEq for LieAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.n == other.n && self.flat == other.flat
    }
}

impl Eq for LieAlgebra {}

/// Smallest `k` with every product of `k` elements of the span equal to zero.
fn associative_nil_index(field: PrimeField, n: usize, span: &Subspace) -> usize {
    let m = span.ambient_dim();
    let gens: Vec<NilMatrix> = span
        .rows()
        .iter()
        .map(|r| NilMatrix::from_flat(field, n, r))
        .collect();
    let mut power = span.clone();
    let mut k = 1;
    while power.dim() > 0 {
        let mut products = Vec::new();
        for r in power.rows() {
            let a = NilMatrix::from_flat(field, n, r);
            for b in &gens {
                products.push(a.matmul(b).expect("same shape").flatten());
            }
        }
        power = Subspace::span(field, m, &products);
        k += 1;
    }
    k
}

impl LieAlgebra {
    /// Smallest bracket-closed subspace of ut(N, F_p) containing `generators`.
    ///
    /// The exponential needs `k!` invertible for every nonvanishing power
    /// `x^k`, so the characteristic must reach the associative nilpotency
    /// index of the algebra (which is N for ut(N) itself).
    pub fn build(p: u32, n: usize, generators: &[NilMatrix]) -> Result<Self> {
        let field = PrimeField::new(p)?;
        let m = n * n.saturating_sub(1) / 2;
        for g in generators {
            if g.n() != n || g.field() != field {
                return Err(Error::Shape(format!(
                    "generator is {}x{} over F_{}, expected {n}x{n} over F_{p}",
                    g.n(),
                    g.n(),
                    g.field().p()
                )));
            }
        }
        let flats: Vec<Vec<u32>> = generators.iter().map(NilMatrix::flatten).collect();
        let mut span = Subspace::span(field, m, &flats);
        loop {
            let elems: Vec<NilMatrix> = span
                .rows()
                .iter()
                .map(|r| NilMatrix::from_flat(field, n, r))
                .collect();
            let mut grown = span.clone();
            for i in 0..elems.len() {
                for j in i + 1..elems.len() {
                    let br = elems[i].bracket(&elems[j])?.flatten();
                    if !grown.contains(&br) {
                        grown = grown.with_vector(&br);
                    }
                }
            }
            if grown.dim() == span.dim() {
                break;
            }
            span = grown;
        }
        Self::from_flat_span(field, n, span)
    }

    /// Wraps an already bracket-closed span. Callers guarantee closure.
    pub(crate) fn from_flat_span(field: PrimeField, n: usize, flat: Subspace) -> Result<Self> {
        let nil_index = associative_nil_index(field, n, &flat);
        if (field.p() as usize) < nil_index {
            return Err(Error::CharacteristicTooSmall {
                p: field.p(),
                required: nil_index,
            });
        }
        let basis: Vec<NilMatrix> = flat
            .rows()
            .iter()
            .map(|r| NilMatrix::from_flat(field, n, r))
            .collect();
        let d = basis.len();
        let mut structure = vec![vec![vec![0u32; d]; d]; d];
        for i in 0..d {
            for j in i + 1..d {
                let br = basis[i].bracket(&basis[j])?.flatten();
                let c = flat.coords_of(&br).ok_or(Error::NotSubalgebra)?;
                structure[j][i] = c.iter().map(|&v| field.neg(v)).collect();
                structure[i][j] = c;
            }
        }
        let mut h = DefaultHasher::new();
        (field.p(), n, flat.rows()).hash(&mut h);
        let mut algebra = Self {
            field,
            n,
            basis,
            flat,
            structure,
            nil_index,
            center: Subspace::zero(field, d),
            id: AlgebraId(h.finish()),
        };
        algebra.center = algebra.relative_center(&algebra.whole(), &algebra.zero_subspace());
        Ok(algebra)
    }

    /// The full algebra ut(N, F_p).
    pub fn ut(p: u32, n: usize) -> Result<Self> {
        let field = PrimeField::new(p)?;
        let m = n * n.saturating_sub(1) / 2;
        Self::from_flat_span(field, n, Subspace::full(field, m))
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    /// Matrix size N.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn id(&self) -> AlgebraId {
        self.id
    }

    pub fn basis(&self) -> &[NilMatrix] {
        &self.basis
    }

    pub fn structure(&self) -> &[Vec<Vec<u32>>] {
        &self.structure
    }

    pub fn nil_index(&self) -> usize {
        self.nil_index
    }

    /// Flattened-coordinate span of the basis.
    pub fn flat_span(&self) -> &Subspace {
        &self.flat
    }

    /// `q^d`, the size of both the algebra and the group.
    pub fn order(&self) -> u128 {
        (self.p() as u128).pow(self.dim() as u32)
    }

    /// Base-p encoder for coordinate vectors of length `dim`.
    pub fn encoder(&self) -> Encoder {
        Encoder::new(self.p(), self.dim())
    }

    /// Fails with [`Error::BudgetExceeded`] if `q^d` exceeds `budget`.
    pub fn check_budget(&self, budget: u64) -> Result<u64> {
        let required = self.order();
        if required > budget as u128 {
            return Err(Error::BudgetExceeded { required, budget });
        }
        Ok(required as u64)
    }

    pub fn coords(&self, x: &NilMatrix) -> Result<Vec<u32>> {
        if x.n() != self.n || x.field() != self.field {
            return Err(Error::Shape("matrix does not match the algebra".into()));
        }
        self.flat.coords_of(&x.flatten()).ok_or(Error::NotInAlgebra)
    }

    pub fn element(&self, coords: &[u32]) -> NilMatrix {
        NilMatrix::from_flat(self.field, self.n, &self.flat.combination(coords))
    }

    pub fn element_from_code(&self, code: u64) -> NilMatrix {
        self.element(&self.encoder().decode(code))
    }

    /// `exp` of the algebra element with the given coordinate code. This is
    /// also the canonical enumeration of the group.
    pub fn group_element(&self, code: u64) -> GroupElement {
        self.element_from_code(code)
            .exp()
            .expect("characteristic checked at construction")
    }

    /// Canonical code of a group element: the code of its logarithm.
    pub fn group_code(&self, g: &GroupElement) -> Result<u64> {
        let x = g.log()?;
        Ok(self.encoder().encode(&self.coords(&x)?))
    }

    /// Bracket in coordinates, through the structure constants.
    pub fn bracket_coords(&self, u: &[u32], v: &[u32]) -> Vec<u32> {
        let f = self.field;
        let d = self.dim();
        let mut out = vec![0u32; d];
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0 {
                continue;
            }
            for (j, &vj) in v.iter().enumerate() {
                if vj == 0 {
                    continue;
                }
                let c = f.mul(ui, vj);
                for (o, &s) in out.iter_mut().zip(&self.structure[i][j]) {
                    *o = f.mul_add(*o, c, s);
                }
            }
        }
        out
    }

    /// Coordinates of `Ad_g(b_i)` for each basis element, as rows.
    pub fn adjoint_matrix(&self, g: &GroupElement) -> Result<Vec<Vec<u32>>> {
        self.basis
            .iter()
            .map(|b| self.coords(&g.adjoint(b)?))
            .collect()
    }

    /// Echelon basis (in algebra coordinates) of the center.
    pub fn center(&self) -> Subspace {
        self.center.clone()
    }

    pub fn whole(&self) -> Subspace {
        Subspace::full(self.field, self.dim())
    }

    pub fn zero_subspace(&self) -> Subspace {
        Subspace::zero(self.field, self.dim())
    }

    /// `{x ∈ a : [x, a] ⊆ i}`: the preimage of the center of `a / i`.
    /// Requires `i ⊆ a` with `i` an ideal of `a`.
    pub fn relative_center(&self, a: &Subspace, i: &Subspace) -> Subspace {
        let f = self.field;
        let d = self.dim();
        let checks = i.annihilator();
        let mut rows = Vec::new();
        for aj in a.rows() {
            let brackets: Vec<Vec<u32>> = a.rows().iter().map(|ak| self.bracket_coords(ak, aj)).collect();
            for nu in checks.rows() {
                rows.push(brackets.iter().map(|b| crate::linalg::dot(f, nu, b)).collect::<Vec<u32>>());
            }
        }
        let kernel = Subspace::kernel_of(f, &rows, a.dim());
        let vectors: Vec<Vec<u32>> = kernel.rows().iter().map(|c| a.combination(c)).collect();
        Subspace::span(f, d, &vectors)
    }

    /// Is the coordinate subspace closed under the bracket?
    pub fn is_subalgebra(&self, s: &Subspace) -> bool {
        let rows = s.rows();
        (0..rows.len()).all(|i| (i + 1..rows.len()).all(|j| s.contains(&self.bracket_coords(&rows[i], &rows[j]))))
    }

    /// `[big, small] ⊆ small`.
    pub fn normalizes(&self, big: &Subspace, small: &Subspace) -> bool {
        big.rows()
            .iter()
            .all(|x| small.rows().iter().all(|y| small.contains(&self.bracket_coords(x, y))))
    }

    pub fn dump(&self) -> AlgebraDump {
        AlgebraDump {
            p: self.p(),
            n: self.n,
            dim: self.dim(),
            basis: self.basis.iter().map(NilMatrix::rows).collect(),
            structure: self.structure.clone(),
        }
    }
}

/// `build_algebra` under its conventional name.
pub fn build_algebra(p: u32, n: usize, generators: &[NilMatrix]) -> Result<LieAlgebra> {
    LieAlgebra::build(p, n, generators)
}

/// `center` as a free function.
pub fn center(a: &LieAlgebra) -> Subspace {
    a.center()
}

/// Input form of an algebra: dense generator matrices, reduced mod p on load.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct AlgebraSpec {
    pub p: u32,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default)]
    pub generators: Vec<Vec<Vec<i64>>>,
}

impl AlgebraSpec {
    pub fn build(&self) -> Result<LieAlgebra> {
        let field = PrimeField::new(self.p)?;
        let gens = self
            .generators
            .iter()
            .map(|rows| {
                if rows.len() != self.n {
                    return Err(Error::Shape(format!(
                        "generator has {} rows, expected {}",
                        rows.len(),
                        self.n
                    )));
                }
                NilMatrix::from_rows(field, rows)
            })
            .collect::<Result<Vec<_>>>()?;
        LieAlgebra::build(self.p, self.n, &gens)
    }
}

/// Canonical output form of an algebra.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct AlgebraDump {
    pub p: u32,
    #[serde(rename = "N")]
    pub n: usize,
    pub dim: usize,
    pub basis: Vec<Vec<Vec<u32>>>,
    pub structure: Vec<Vec<Vec<u32>>>,
}

/// Index of a flattened position; used by presets and elementary-matrix parsing.
pub fn flat_index(n: usize, i: usize, j: usize) -> Option<usize> {
    flat_positions(n).iter().position(|&pos| pos == (i, j))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(p: u32, n: usize, i: usize, j: usize) -> NilMatrix {
        NilMatrix::elementary(PrimeField::new(p).unwrap(), n, i, j).unwrap()
    }

    #[test]
    fn closure_of_ut3_generators() {
        let g = build_algebra(5, 3, &[e(5, 3, 1, 2), e(5, 3, 2, 3)]).unwrap();
        assert_eq!(g.dim(), 3);
        assert_eq!(g.basis(), &[e(5, 3, 1, 2), e(5, 3, 2, 3), e(5, 3, 1, 3)]);
        assert_eq!(g, LieAlgebra::ut(5, 3).unwrap());
        // [E12, E23] = E13
        assert_eq!(g.structure()[0][1], vec![0, 0, 1]);
        assert_eq!(g.structure()[1][0], vec![0, 0, 4]);
    }

    #[test]
    fn zero_algebra() {
        let g = build_algebra(5, 3, &[]).unwrap();
        assert_eq!(g.dim(), 0);
        assert_eq!(g.order(), 1);
    }

    #[test]
    fn closure_reaches_ut4() {
        let g = build_algebra(5, 4, &[e(5, 4, 1, 2), e(5, 4, 2, 3), e(5, 4, 3, 4)]).unwrap();
        assert_eq!(g.dim(), 6);
        assert_eq!(g, LieAlgebra::ut(5, 4).unwrap());
        assert_eq!(g.nil_index(), 4);
    }

    #[test]
    fn rejects_bad_characteristic() {
        assert!(matches!(LieAlgebra::ut(3, 4), Err(Error::CharacteristicTooSmall { p: 3, required: 4 })));
        assert_eq!(build_algebra(4, 3, &[]).unwrap_err(), Error::NotPrime(4));
        let wrong = e(7, 3, 1, 2);
        assert!(matches!(build_algebra(5, 3, &[wrong]), Err(Error::Shape(_))));
    }

    #[test]
    fn canonical_basis_is_order_independent() {
        let x = e(7, 4, 1, 2).add(&e(7, 4, 3, 4)).unwrap();
        let y = e(7, 4, 2, 3);
        let a = build_algebra(7, 4, &[x.clone(), y.clone()]).unwrap();
        let b = build_algebra(7, 4, &[y.scale(3), x.scale(5)]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.id(), b.id());
    }

    #[test]
    fn centers() {
        let ut3 = LieAlgebra::ut(5, 3).unwrap();
        assert_eq!(center(&ut3).rows(), &[vec![0, 0, 1]]);
        let ut4 = LieAlgebra::ut(5, 4).unwrap();
        assert_eq!(center(&ut4).rows(), &[vec![0, 0, 0, 0, 0, 1]]);
        let abelian = build_algebra(5, 4, &[e(5, 4, 1, 3), e(5, 4, 1, 4), e(5, 4, 2, 4)]).unwrap();
        assert_eq!(center(&abelian).dim(), abelian.dim());
    }

    #[test]
    fn coords_reject_outside_elements() {
        let h = build_algebra(5, 3, &[e(5, 3, 1, 3)]).unwrap();
        assert_eq!(h.coords(&e(5, 3, 1, 3).scale(2)).unwrap(), vec![2]);
        assert_eq!(h.coords(&e(5, 3, 1, 2)), Err(Error::NotInAlgebra));
    }

    #[test]
    fn spec_json_roundtrip() {
        let spec: AlgebraSpec = serde_json::from_str(
            r#"{"p": 3, "N": 3, "generators": [[[0,1,0],[0,0,0],[0,0,0]], [[0,0,0],[0,0,4],[0,0,0]]]}"#,
        )
        .unwrap();
        let g = spec.build().unwrap();
        assert_eq!(g, LieAlgebra::ut(3, 3).unwrap());
        let dump = serde_json::to_value(g.dump()).unwrap();
        assert_eq!(dump["dim"], 3);
        assert_eq!(dump["N"], 3);
    }
}
