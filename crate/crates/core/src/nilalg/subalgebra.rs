use super::algebra::LieAlgebra;
use super::matrix::NilMatrix;
use crate::error::{ensure_invariant, Error, Result};
use crate::linalg::{Encoder, Subspace};

/// A subalgebra h ⊆ g together with its inclusion in g-coordinates.
///
/// The rows of [`SubalgebraEmbedding::span`] are the images of h's basis,
/// in the same order as `sub.basis()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubalgebraEmbedding {
    ambient: LieAlgebra,
    sub: LieAlgebra,
    span: Subspace,
}

impl SubalgebraEmbedding {
    /// Embeds the coordinate subspace `span` of `ambient`, which must be
    /// bracket-closed.
    pub fn new(ambient: &LieAlgebra, span: Subspace) -> Result<Self> {
        if span.ambient_dim() != ambient.dim() || span.field() != ambient.field() {
            return Err(Error::Shape("subspace does not live in the ambient algebra".into()));
        }
        if !ambient.is_subalgebra(&span) {
            return Err(Error::NotSubalgebra);
        }
        let flats: Vec<Vec<u32>> = span
            .rows()
            .iter()
            .map(|c| ambient.element(c).flatten())
            .collect();
        let flat = Subspace::span(ambient.field(), ambient.flat_span().ambient_dim(), &flats);
        let sub = LieAlgebra::from_flat_span(ambient.field(), ambient.n(), flat)?;
        // Echelon form in g-coordinates and in matrix coordinates coincide,
        // so sub's basis maps onto the rows of `span` in order.
        for (b, row) in sub.basis().iter().zip(span.rows()) {
            ensure_invariant!(ambient.coords(b)? == *row, "subalgebra basis misaligned with its span");
        }
        Ok(Self {
            ambient: ambient.clone(),
            sub,
            span,
        })
    }

    /// The subalgebra generated by `generators` (closed under the bracket).
    pub fn generated_by(ambient: &LieAlgebra, generators: &[NilMatrix]) -> Result<Self> {
        let coords = generators
            .iter()
            .map(|g| ambient.coords(g))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ambient, close_under_bracket(ambient, Subspace::span(ambient.field(), ambient.dim(), &coords)))
    }

    pub fn whole(ambient: &LieAlgebra) -> Self {
        Self::new(ambient, ambient.whole()).expect("whole algebra is a subalgebra")
    }

    pub fn trivial(ambient: &LieAlgebra) -> Self {
        Self::new(ambient, ambient.zero_subspace()).expect("zero is a subalgebra")
    }

    pub fn ambient(&self) -> &LieAlgebra {
        &self.ambient
    }

    pub fn sub(&self) -> &LieAlgebra {
        &self.sub
    }

    pub fn span(&self) -> &Subspace {
        &self.span
    }

    /// `d_h × d_g` matrix whose rows are h's basis in g-coordinates.
    pub fn inclusion(&self) -> &[Vec<u32>] {
        self.span.rows()
    }

    pub fn codim(&self) -> usize {
        self.ambient.dim() - self.sub.dim()
    }

    /// g-coordinates of an h-element.
    pub fn to_ambient(&self, h_coords: &[u32]) -> Vec<u32> {
        self.span.combination(h_coords)
    }

    /// h-coordinates of a g-element lying in h.
    pub fn to_sub(&self, g_coords: &[u32]) -> Option<Vec<u32>> {
        self.span.coords_of(g_coords)
    }

    /// Maps an h-group code to the g-group code of the same element. Group
    /// codes are logarithm coordinates, so this is linear.
    pub fn group_code_in_ambient(&self, h_code: u64) -> u64 {
        let sub_enc = self.sub.encoder();
        self.ambient.encoder().encode(&self.to_ambient(&sub_enc.decode(h_code)))
    }
}

fn close_under_bracket(g: &LieAlgebra, mut s: Subspace) -> Subspace {
    loop {
        let rows = s.rows().to_vec();
        let mut grown = s.clone();
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                let br = g.bracket_coords(&rows[i], &rows[j]);
                if !grown.contains(&br) {
                    grown = grown.with_vector(&br);
                }
            }
        }
        if grown.dim() == s.dim() {
            return s;
        }
        s = grown;
    }
}

/// Chain `g = g_0 ⊃ g_1 ⊃ … ⊃ g_k = h` where each step has codimension
/// one and is an ideal of its predecessor.
///
/// Recursion: pick a central element z of g (modulo what has already been
/// factored out), build the chain for g/Kz down to (h + Kz)/Kz, pull it
/// back, and append h itself when z ∉ h.
pub fn ideal_chain_spaces(g: &LieAlgebra, h: &Subspace) -> Result<Vec<Subspace>> {
    if !g.is_subalgebra(h) {
        return Err(Error::NotSubalgebra);
    }
    let chain = chain_rec(g, &g.whole(), &g.zero_subspace(), h);
    for w in chain.windows(2) {
        ensure_invariant!(w[0].dim() == w[1].dim() + 1, "chain step is not codimension one");
        ensure_invariant!(w[1].is_subspace_of(&w[0]), "chain is not decreasing");
        ensure_invariant!(g.normalizes(&w[0], &w[1]), "chain step is not an ideal");
    }
    ensure_invariant!(chain.last() == Some(h), "chain does not end at h");
    Ok(chain)
}

fn chain_rec(g: &LieAlgebra, a: &Subspace, factored: &Subspace, h: &Subspace) -> Vec<Subspace> {
    if a.dim() == h.dim() {
        return vec![a.clone()];
    }
    let center = g.relative_center(a, factored);
    // Last echelon vector of the center complement: the most central
    // direction in the flattening order.
    let z = factored
        .complement_in(&center)
        .pop()
        .expect("a nonzero nilpotent quotient has a nonzero center");
    let bigger = factored.with_vector(&z);
    let lifted_h = h.with_vector(&z);
    let mut chain = chain_rec(g, a, &bigger, &lifted_h);
    if !h.contains(&z) {
        chain.push(h.clone());
    }
    chain
}

/// `ideal_chain` on an embedding, returning the chain as algebras.
pub fn ideal_chain(e: &SubalgebraEmbedding) -> Result<Vec<LieAlgebra>> {
    ideal_chain_spaces(e.ambient(), e.span())?
        .into_iter()
        .map(|s| SubalgebraEmbedding::new(e.ambient(), s).map(|emb| emb.sub().clone()))
        .collect()
}

/// Every codimension-one subalgebra of g, found by scanning all hyperplanes
/// `ker ν` with ν normalized to have leading coordinate 1.
pub fn codim_one_subalgebras(g: &LieAlgebra) -> Vec<Subspace> {
    let d = g.dim();
    let enc = Encoder::new(g.p(), d);
    let mut out = Vec::new();
    for code in 1..enc.count().expect("small dimension") {
        let nu = enc.decode(code);
        let lead = nu.iter().find(|&&c| c != 0).copied().unwrap_or(0);
        if lead != 1 {
            continue;
        }
        let hyperplane = Subspace::kernel_of(g.field(), &[nu], d);
        if g.is_subalgebra(&hyperplane) {
            out.push(hyperplane);
        }
    }
    out
}

/// Block-diagonal sum g₁ ⊕ g₂ ⊆ ut(N₁ + N₂).
#[derive(Debug, Clone)]
pub struct DirectSum {
    algebra: LieAlgebra,
    left: LieAlgebra,
    right: LieAlgebra,
    /// For each basis element of the sum: its two blocks in left/right coordinates.
    blocks: Vec<(Vec<u32>, Vec<u32>)>,
}

fn block_diag(x: &NilMatrix, y: &NilMatrix) -> NilMatrix {
    let (n1, n2) = (x.n(), y.n());
    let n = n1 + n2;
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i < n1 && j < n1 {
                        x.get(i, j) as i64
                    } else if i >= n1 && j >= n1 {
                        y.get(i - n1, j - n1) as i64
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    NilMatrix::from_rows(x.field(), &rows).expect("blocks are strictly upper")
}

fn split_blocks(m: &NilMatrix, n1: usize) -> (NilMatrix, NilMatrix) {
    let n = m.n();
    let top: Vec<Vec<i64>> = (0..n1).map(|i| (0..n1).map(|j| m.get(i, j) as i64).collect()).collect();
    let bottom: Vec<Vec<i64>> = (n1..n).map(|i| (n1..n).map(|j| m.get(i, j) as i64).collect()).collect();
    (
        NilMatrix::from_rows(m.field(), &top).expect("block of a strictly upper matrix"),
        NilMatrix::from_rows(m.field(), &bottom).expect("block of a strictly upper matrix"),
    )
}

impl DirectSum {
    pub fn new(left: &LieAlgebra, right: &LieAlgebra) -> Result<Self> {
        if left.field() != right.field() {
            return Err(Error::AlgebraMismatch);
        }
        let zl = NilMatrix::zero(left.field(), left.n());
        let zr = NilMatrix::zero(right.field(), right.n());
        let mut gens: Vec<NilMatrix> = left.basis().iter().map(|b| block_diag(b, &zr)).collect();
        gens.extend(right.basis().iter().map(|b| block_diag(&zl, b)));
        let algebra = LieAlgebra::build(left.p(), left.n() + right.n(), &gens)?;
        ensure_invariant!(algebra.dim() == left.dim() + right.dim(), "direct sum has wrong dimension");
        let blocks = algebra
            .basis()
            .iter()
            .map(|b| {
                let (x, y) = split_blocks(b, left.n());
                Ok((left.coords(&x)?, right.coords(&y)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            algebra,
            left: left.clone(),
            right: right.clone(),
            blocks,
        })
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn left(&self) -> &LieAlgebra {
        &self.left
    }

    pub fn right(&self) -> &LieAlgebra {
        &self.right
    }

    /// Left/right coordinates of each basis element of the sum.
    pub fn blocks(&self) -> &[(Vec<u32>, Vec<u32>)] {
        &self.blocks
    }

    /// Sum coordinates of `(x, y)`.
    pub fn pair_coords(&self, x: &[u32], y: &[u32]) -> Result<Vec<u32>> {
        let m = block_diag(&self.left.element(x), &self.right.element(y));
        self.algebra.coords(&m)
    }

    /// The diagonal `{(x, x)}` when both summands are the same algebra.
    pub fn diagonal(&self) -> Result<SubalgebraEmbedding> {
        if self.left != self.right {
            return Err(Error::AlgebraMismatch);
        }
        let rows = (0..self.left.dim())
            .map(|i| {
                let unit = crate::linalg::unit(self.left.dim(), i);
                self.pair_coords(&unit, &unit)
            })
            .collect::<Result<Vec<_>>>()?;
        SubalgebraEmbedding::new(&self.algebra, Subspace::span(self.algebra.field(), self.algebra.dim(), &rows))
    }
}
