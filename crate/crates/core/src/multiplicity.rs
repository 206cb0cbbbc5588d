//! Multiplicities read off orbit geometry:
//! `m(ω, Ω) = |π⁻¹(ω) ∩ Ω| / √(|ω| |Ω|)` for restriction and induction, and
//! the pair count `|{(λ1, λ2) ∈ Ω1 × Ω2 : λ1 + λ2 ∈ Ω}| / √(|Ω| |Ω1| |Ω2|)`
//! for tensor products.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::characters::label;
use crate::coadjoint::{fiber, fiber_intersection, orbit_partition, project, Coadjoint, DualVector, Orbit, OrbitPartition};
use crate::error::{ensure_invariant, Error, Result};
use crate::linalg::dot;
use crate::nilalg::{DirectSum, LieAlgebra, SubalgebraEmbedding};

fn exact_quotient(count: u64, root: u64, context: impl FnOnce() -> String) -> Result<u64> {
    if root == 0 || !count.is_multiple_of(root) {
        return Err(Error::Invariant(format!(
            "multiplicity is not an integer: {count} / {root} ({})",
            context()
        )));
    }
    Ok(count / root)
}

/// `m(ω, Ω)` for an H-orbit ω and a G-orbit Ω.
pub fn restriction_multiplicity(omega: &Orbit, big: &Orbit, e: &SubalgebraEmbedding) -> Result<u64> {
    let count = fiber_intersection(omega, big, e)?;
    let root = omega.sqrt_size(e.sub()) * big.sqrt_size(e.ambient());
    exact_quotient(count, root, || {
        format!(
            "omega rep {:?} size {}, Omega rep {:?} size {}, fiber count {count}",
            omega.rep().coords(),
            omega.size(),
            big.rep().coords(),
            big.size()
        )
    })
}

/// Rows are H-orbits, columns G-orbits, both ordered by representative.
#[derive(Debug, Clone, Serialize)]
pub struct MultiplicityTable {
    pub rows: Vec<OrbitLabel>,
    pub cols: Vec<OrbitLabel>,
    pub entries: Vec<Vec<u64>>,
    /// `[G : H]`.
    pub index: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitLabel {
    pub rep: Vec<u32>,
    pub size: u64,
    pub degree: u64,
}

impl OrbitLabel {
    fn new(g: &LieAlgebra, o: &Orbit) -> Self {
        Self {
            rep: o.rep().coords().to_vec(),
            size: o.size(),
            degree: o.sqrt_size(g),
        }
    }
}

impl MultiplicityTable {
    /// `Σ_ω m(ω, Ω) √|ω| = √|Ω|` for every column.
    pub fn column_sums_hold(&self) -> bool {
        self.cols.iter().enumerate().all(|(j, col)| {
            self.rows.iter().zip(&self.entries).map(|(r, e)| e[j] * r.degree).sum::<u64>() == col.degree
        })
    }

    /// `Σ_Ω m(ω, Ω) √|Ω| = [G:H] √|ω|` for every row.
    pub fn row_sums_hold(&self) -> bool {
        self.rows.iter().zip(&self.entries).all(|(r, e)| {
            self.cols.iter().zip(e).map(|(c, &m)| m * c.degree).sum::<u64>() == self.index * r.degree
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega");
        for c in &self.cols {
            out.push(',');
            out.push_str(&label(&c.rep));
        }
        out.push('\n');
        for (r, e) in self.rows.iter().zip(&self.entries) {
            out.push_str(&label(&r.rep));
            for m in e {
                out.push_str(&format!(",{m}"));
            }
            out.push('\n');
        }
        out
    }
}

/// All `m(ω, Ω)` for `h ⊆ g`, with both sum rules and the support pattern
/// `m > 0 ⇔ ω ⊆ π(Ω)` checked.
pub fn branching_table(e: &SubalgebraEmbedding, budget: u64) -> Result<MultiplicityTable> {
    let g = e.ambient();
    let h = e.sub();
    let big = orbit_partition(g, budget)?;
    let small = orbit_partition(h, budget)?;
    let h_enc = h.encoder();
    let mut counts = vec![vec![0u64; big.len()]; small.len()];
    let mut images: Vec<BTreeSet<u64>> = vec![BTreeSet::new(); big.len()];
    for (j, o) in big.orbits().iter().enumerate() {
        for lambda in o.iter(g) {
            let code = h_enc.encode(project(&lambda, e)?.coords());
            counts[small.orbit_index(code)][j] += 1;
            images[j].insert(code);
        }
    }
    let mut entries = vec![vec![0u64; big.len()]; small.len()];
    for (i, omega) in small.orbits().iter().enumerate() {
        for (j, o) in big.orbits().iter().enumerate() {
            let root = omega.sqrt_size(h) * o.sqrt_size(g);
            entries[i][j] = exact_quotient(counts[i][j], root, || {
                format!("omega rep {:?}, Omega rep {:?}", omega.rep().coords(), o.rep().coords())
            })?;
            let contained = omega.elements().iter().all(|c| images[j].contains(c));
            ensure_invariant!(
                (entries[i][j] > 0) == contained,
                "support mismatch at omega {:?}, Omega {:?}: m = {}, contained = {contained}",
                omega.rep().coords(),
                o.rep().coords(),
                entries[i][j]
            );
        }
    }
    let table = MultiplicityTable {
        rows: small.orbits().iter().map(|o| OrbitLabel::new(h, o)).collect(),
        cols: big.orbits().iter().map(|o| OrbitLabel::new(g, o)).collect(),
        entries,
        index: (g.p() as u64).pow(e.codim() as u32),
    };
    ensure_invariant!(table.column_sums_hold(), "restriction dimension count fails");
    ensure_invariant!(table.row_sums_hold(), "induction dimension count fails");
    Ok(table)
}

/// One constituent of an induced or tensor decomposition.
#[derive(Debug, Clone, Serialize)]
pub struct Constituent {
    #[serde(flatten)]
    pub orbit: OrbitLabel,
    pub multiplicity: u64,
}

/// G-orbits meeting `π⁻¹(ω)` with their multiplicities in `ind(t^ω, G)`,
/// ordered by representative.
pub fn induction_support(omega: &Orbit, e: &SubalgebraEmbedding) -> Result<Vec<(Orbit, u64)>> {
    let g = e.ambient();
    let h = e.sub();
    if omega.algebra() != h.id() {
        return Err(Error::AlgebraMismatch);
    }
    let action = Coadjoint::new(g);
    let mut found: Vec<Orbit> = Vec::new();
    for lambda0 in omega.iter(h) {
        for lambda in fiber(&lambda0, e)? {
            if !found.iter().any(|o| o.contains(g, &lambda)) {
                found.push(action.orbit(&lambda)?);
            }
        }
    }
    found.sort_by_key(Orbit::rep_code);
    let mut out = Vec::with_capacity(found.len());
    for o in found {
        let m = restriction_multiplicity(omega, &o, e)?;
        ensure_invariant!(m > 0, "orbit {:?} meets the fiber with zero multiplicity", o.rep().coords());
        out.push((o, m));
    }
    let index = (g.p() as u64).pow(e.codim() as u32);
    let total: u64 = out.iter().map(|(o, m)| m * o.sqrt_size(g)).sum();
    ensure_invariant!(
        total == index * omega.sqrt_size(h),
        "induced dimension {total} != [G:H] * {}",
        omega.sqrt_size(h)
    );
    Ok(out)
}

pub fn constituents(g: &LieAlgebra, terms: &[(Orbit, u64)]) -> Vec<Constituent> {
    terms
        .iter()
        .map(|(o, m)| Constituent {
            orbit: OrbitLabel::new(g, o),
            multiplicity: *m,
        })
        .collect()
}

fn pair_count(g: &LieAlgebra, big: &Orbit, a: &Orbit, b: &Orbit) -> Result<u64> {
    if big.algebra() != g.id() || a.algebra() != g.id() || b.algebra() != g.id() {
        return Err(Error::AlgebraMismatch);
    }
    let (small, large) = if a.size() <= b.size() { (a, b) } else { (b, a) };
    let enc = g.encoder();
    let f = g.field();
    let large: Vec<Vec<u32>> = large.iter(g).map(|l| l.coords().to_vec()).collect();
    let mut count = 0;
    let mut sum = vec![0u32; g.dim()];
    for l1 in small.iter(g) {
        for l2 in &large {
            for ((s, &x), &y) in sum.iter_mut().zip(l1.coords()).zip(l2) {
                *s = f.add(x, y);
            }
            if big.contains_code(enc.encode(&sum)) {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Multiplicity of `T^Ω` in `T^{Ω1} ⊗ T^{Ω2}`.
pub fn tensor_multiplicity(g: &LieAlgebra, big: &Orbit, a: &Orbit, b: &Orbit) -> Result<u64> {
    let count = pair_count(g, big, a, b)?;
    let root = big.sqrt_size(g) * a.sqrt_size(g) * b.sqrt_size(g);
    exact_quotient(count, root, || {
        format!(
            "Omega {:?}, Omega1 {:?}, Omega2 {:?}, pair count {count}",
            big.rep().coords(),
            a.rep().coords(),
            b.rep().coords()
        )
    })
}

/// Decomposition of `T^{Ω_i} ⊗ T^{Ω_j}` over a full orbit partition.
pub fn tensor_decomposition(g: &LieAlgebra, part: &OrbitPartition, i: usize, j: usize) -> Result<Vec<(Orbit, u64)>> {
    let a = &part.orbits()[i];
    let b = &part.orbits()[j];
    let enc = g.encoder();
    let f = g.field();
    let mut counts = vec![0u64; part.len()];
    let bs: Vec<Vec<u32>> = b.iter(g).map(|l| l.coords().to_vec()).collect();
    let mut sum = vec![0u32; g.dim()];
    for l1 in a.iter(g) {
        for l2 in &bs {
            for ((s, &x), &y) in sum.iter_mut().zip(l1.coords()).zip(l2) {
                *s = f.add(x, y);
            }
            counts[part.orbit_index(enc.encode(&sum))] += 1;
        }
    }
    let mut out = Vec::new();
    for (k, &count) in counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let o = &part.orbits()[k];
        let root = o.sqrt_size(g) * a.sqrt_size(g) * b.sqrt_size(g);
        let m = exact_quotient(count, root, || format!("Omega {:?}", o.rep().coords()))?;
        out.push((o.clone(), m));
    }
    let total: u64 = out.iter().map(|(o, m)| m * o.sqrt_size(g)).sum();
    ensure_invariant!(
        total == a.sqrt_size(g) * b.sqrt_size(g),
        "tensor dimension {total} != {} * {}",
        a.sqrt_size(g),
        b.sqrt_size(g)
    );
    Ok(out)
}

/// `(λ1, λ2)` as a functional on `g ⊕ g`.
pub fn pair_functional(sum: &DirectSum, a: &DualVector, b: &DualVector) -> Result<DualVector> {
    if a.algebra() != sum.left().id() || b.algebra() != sum.right().id() {
        return Err(Error::AlgebraMismatch);
    }
    let s = sum.algebra();
    let f = s.field();
    let coords = sum
        .blocks()
        .iter()
        .map(|(x, y)| f.add(dot(f, a.coords(), x), dot(f, b.coords(), y)) as i64)
        .collect::<Vec<_>>();
    DualVector::new(s, &coords)
}

/// Tensor multiplicity through restriction of `T^{Ω1} ⊠ T^{Ω2}` from
/// `G × G` to the diagonal, where ω is Ω carried over to the diagonal.
pub fn tensor_multiplicity_via_diagonal(g: &LieAlgebra, big: &Orbit, a: &Orbit, b: &Orbit) -> Result<u64> {
    let sum = DirectSum::new(g, g)?;
    let diag = sum.diagonal()?;
    // the diagonal basis is (b_k, b_k) in order, so diagonal coordinates are g-coordinates
    for (k, row) in diag.inclusion().iter().enumerate() {
        let unit = crate::linalg::unit(g.dim(), k);
        ensure_invariant!(*row == sum.pair_coords(&unit, &unit)?, "diagonal basis is not aligned with g");
    }
    let d = diag.sub();
    let omega = Coadjoint::new(d).orbit(&DualVector::new(
        d,
        &big.rep().coords().iter().map(|&c| c as i64).collect::<Vec<_>>(),
    )?)?;
    let pair = pair_functional(&sum, a.rep(), b.rep())?;
    let product = Coadjoint::new(sum.algebra()).orbit(&pair)?;
    ensure_invariant!(product.size() == a.size() * b.size(), "product orbit is not Omega1 x Omega2");
    restriction_multiplicity(&omega, &product, &diag)
}
