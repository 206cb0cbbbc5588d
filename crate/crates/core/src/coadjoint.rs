//! The dual space g*, coadjoint orbits and projections to subalgebra duals.
//!
//! Functionals are stored by their values on the canonical basis and packed
//! into base-p codes for orbit bookkeeping: orbits are sorted code vectors,
//! and the orbit representative is the smallest code, i.e. the
//! lexicographically minimal coordinate vector.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::{ensure_invariant, Error, Result};
use crate::linalg::{dot, Encoder, Subspace};
use crate::nilalg::{AlgebraDump, AlgebraId, GroupElement, LieAlgebra, SubalgebraEmbedding};

/// A functional λ ∈ g*, given by its values `λ(b_i)` on the basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DualVector {
    algebra: AlgebraId,
    coords: Vec<u32>,
}

impl DualVector {
    pub fn new(g: &LieAlgebra, coords: &[i64]) -> Result<Self> {
        if coords.len() != g.dim() {
            return Err(Error::Shape(format!(
                "functional has {} coordinates, algebra has dimension {}",
                coords.len(),
                g.dim()
            )));
        }
        Ok(Self {
            algebra: g.id(),
            coords: coords.iter().map(|&c| g.field().reduce(c)).collect(),
        })
    }

    /// Coordinates already reduced modulo p.
    pub fn from_reduced(g: &LieAlgebra, coords: Vec<u32>) -> Self {
        debug_assert_eq!(coords.len(), g.dim());
        Self {
            algebra: g.id(),
            coords,
        }
    }

    pub fn from_code(g: &LieAlgebra, code: u64) -> Self {
        Self::from_reduced(g, g.encoder().decode(code))
    }

    pub fn zero(g: &LieAlgebra) -> Self {
        Self::from_reduced(g, vec![0; g.dim()])
    }

    pub fn algebra(&self) -> AlgebraId {
        self.algebra
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn code(&self, g: &LieAlgebra) -> u64 {
        g.encoder().encode(&self.coords)
    }

    /// `λ(x)` for `x` in algebra coordinates.
    pub fn eval(&self, g: &LieAlgebra, x: &[u32]) -> u32 {
        dot(g.field(), &self.coords, x)
    }

    pub fn add(&self, g: &LieAlgebra, other: &DualVector) -> Result<DualVector> {
        check_owner(g, self)?;
        check_owner(g, other)?;
        let f = g.field();
        Ok(Self::from_reduced(
            g,
            self.coords.iter().zip(&other.coords).map(|(&a, &b)| f.add(a, b)).collect(),
        ))
    }

    /// `B_λ(u, v) = λ([u, v])`.
    pub fn skew_form(&self, g: &LieAlgebra, u: &[u32], v: &[u32]) -> u32 {
        self.eval(g, &g.bracket_coords(u, v))
    }
}

fn check_owner(g: &LieAlgebra, lambda: &DualVector) -> Result<()> {
    if lambda.algebra != g.id() {
        return Err(Error::AlgebraMismatch);
    }
    Ok(())
}

/// Row-major `d × d` matrix acting on functional coordinates.
#[derive(Debug, Clone)]
pub(crate) struct DualMatrix {
    d: usize,
    entries: Vec<u32>,
}

impl DualMatrix {
    pub(crate) fn from_entries(d: usize, entries: Vec<u32>) -> Self {
        debug_assert_eq!(entries.len(), d * d);
        Self { d, entries }
    }

    /// Matrix of `Ad*_g`: entry `(i, j)` is the j-th coordinate of `g⁻¹ b_i g`.
    fn coadjoint(g: &LieAlgebra, elem: &GroupElement) -> Result<Self> {
        let rows = g.adjoint_matrix(&elem.inverse())?;
        Ok(Self {
            d: g.dim(),
            entries: rows.concat(),
        })
    }

    #[inline]
    pub(crate) fn apply(&self, p: u64, lambda: &[u32], out: &mut [u32]) {
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.entries[i * self.d..(i + 1) * self.d];
            let mut acc = 0u64;
            for (&a, &l) in row.iter().zip(lambda) {
                acc += a as u64 * l as u64;
            }
            *o = (acc % p) as u32;
        }
    }
}

/// `Ad*_g λ`, with `Ad*_g λ(x) = λ(g⁻¹ x g)`.
pub fn coadjoint_act(g: &LieAlgebra, elem: &GroupElement, lambda: &DualVector) -> Result<DualVector> {
    check_owner(g, lambda)?;
    // membership: log(elem) must lie in the algebra
    g.group_code(elem)?;
    let m = DualMatrix::coadjoint(g, elem)?;
    let mut out = vec![0u32; g.dim()];
    m.apply(g.p() as u64, &lambda.coords, &mut out);
    Ok(DualVector::from_reduced(g, out))
}

/// Matrix `M_ij = λ([b_i, b_j])` of the skew form `B_λ`.
pub fn skew_matrix(g: &LieAlgebra, lambda: &DualVector) -> Vec<Vec<u32>> {
    let d = g.dim();
    (0..d)
        .map(|i| (0..d).map(|j| lambda.eval(g, &g.structure()[i][j])).collect())
        .collect()
}

/// The radical `g^λ = {x : λ([x, g]) = 0}` of `B_λ`, which is the Lie
/// algebra of the stabilizer of λ.
pub fn stabilizer_basis(g: &LieAlgebra, lambda: &DualVector) -> Subspace {
    Subspace::kernel_of(g.field(), &skew_matrix(g, lambda), g.dim())
}

/// A coadjoint orbit, stored as the sorted codes of its elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    algebra: AlgebraId,
    rep: DualVector,
    elements: Vec<u64>,
    stab_dim: usize,
}

impl Orbit {
    pub fn algebra(&self) -> AlgebraId {
        self.algebra
    }

    /// Lexicographically minimal element.
    pub fn rep(&self) -> &DualVector {
        &self.rep
    }

    pub fn rep_code(&self) -> u64 {
        self.elements[0]
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn size(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn stab_dim(&self) -> usize {
        self.stab_dim
    }

    /// `½ dim Ω`: the orbit has `q^{2k}` elements and its representation has
    /// degree `q^k`.
    pub fn half_dim(&self, g: &LieAlgebra) -> usize {
        (g.dim() - self.stab_dim) / 2
    }

    /// `√|Ω|`.
    pub fn sqrt_size(&self, g: &LieAlgebra) -> u64 {
        (g.p() as u64).pow(self.half_dim(g) as u32)
    }

    pub fn contains_code(&self, code: u64) -> bool {
        self.elements.binary_search(&code).is_ok()
    }

    pub fn contains(&self, g: &LieAlgebra, lambda: &DualVector) -> bool {
        lambda.algebra == self.algebra && self.contains_code(lambda.code(g))
    }

    pub fn iter<'a>(&'a self, g: &'a LieAlgebra) -> impl Iterator<Item = DualVector> + 'a {
        self.elements.iter().map(move |&c| DualVector::from_code(g, c))
    }
}

/// Breadth-first closure of `start` under the given matrices.
pub(crate) fn bfs(enc: &Encoder, p: u32, gens: &[DualMatrix], start: &[u32]) -> Vec<u64> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    let start_code = enc.encode(start);
    seen.insert(start_code);
    queue.push_back(start_code);
    let d = enc.dim();
    let mut cur = vec![0u32; d];
    let mut next = vec![0u32; d];
    while let Some(code) = queue.pop_front() {
        enc.decode_into(code, &mut cur);
        for m in gens {
            m.apply(p as u64, &cur, &mut next);
            let c = enc.encode(&next);
            if seen.insert(c) {
                queue.push_back(c);
            }
        }
    }
    seen.into_iter().collect()
}

/// Precomputed coadjoint matrices of `exp(y)` for `y` ranging over a basis
/// of a subalgebra (by default the whole algebra). Since `exp(ty) = exp(y)^t`,
/// these generate the same finite group as the full one-parameter subgroups.
#[derive(Debug, Clone)]
pub struct Coadjoint<'a> {
    g: &'a LieAlgebra,
    gens: Vec<DualMatrix>,
}

impl<'a> Coadjoint<'a> {
    pub fn new(g: &'a LieAlgebra) -> Self {
        Self::for_subgroup(g, &g.whole()).expect("basis elements lie in the algebra")
    }

    /// Action of the subgroup `exp(s)` for a subalgebra `s` (in g-coordinates).
    pub fn for_subgroup(g: &'a LieAlgebra, s: &Subspace) -> Result<Self> {
        let mut gens = Vec::new();
        for y in s.rows() {
            gens.push(DualMatrix::coadjoint(g, &g.element(y).exp()?)?);
        }
        Ok(Self { g, gens })
    }

    pub fn algebra(&self) -> &LieAlgebra {
        self.g
    }

    /// Codes of the orbit of λ under the generated subgroup.
    pub fn orbit_codes(&self, lambda: &DualVector) -> Vec<u64> {
        bfs(&self.g.encoder(), self.g.p(), &self.gens, &lambda.coords)
    }

    /// The full coadjoint orbit; its size is checked against
    /// `q^{dim g − dim g^λ}`.
    pub fn orbit(&self, lambda: &DualVector) -> Result<Orbit> {
        check_owner(self.g, lambda)?;
        let elements = self.orbit_codes(lambda);
        let stab_dim = stabilizer_basis(self.g, lambda).dim();
        let expected = (self.g.p() as u64).pow((self.g.dim() - stab_dim) as u32);
        ensure_invariant!(
            elements.len() as u64 == expected,
            "orbit of {:?} has {} elements, stabilizer predicts {}",
            lambda.coords,
            elements.len(),
            expected
        );
        Ok(Orbit {
            algebra: self.g.id(),
            rep: DualVector::from_code(self.g, elements[0]),
            elements,
            stab_dim,
        })
    }

    /// Partition of all of g* into orbits, ordered by representative.
    pub fn partition(&self, budget: u64) -> Result<OrbitPartition> {
        let g = self.g;
        let total = g.check_budget(budget)?;
        let enc = g.encoder();
        let mut index = vec![u32::MAX; total as usize];
        let mut orbits = Vec::new();
        for code in 0..total {
            if index[code as usize] != u32::MAX {
                continue;
            }
            let orbit = self.orbit(&DualVector::from_reduced(g, enc.decode(code)))?;
            ensure_invariant!(orbit.rep_code() == code, "seed is not the orbit minimum");
            let idx = orbits.len() as u32;
            for &c in &orbit.elements {
                ensure_invariant!(index[c as usize] == u32::MAX, "orbits overlap at code {c}");
                index[c as usize] = idx;
            }
            orbits.push(orbit);
        }
        let covered: u64 = orbits.iter().map(Orbit::size).sum();
        ensure_invariant!(covered == total, "orbits cover {covered} of {total} functionals");
        Ok(OrbitPartition { orbits, index })
    }
}

/// `orbit(λ)` on the whole group.
pub fn orbit(g: &LieAlgebra, lambda: &DualVector) -> Result<Orbit> {
    Coadjoint::new(g).orbit(lambda)
}

/// `orbit_partition(g)` with an explicit enumeration budget.
pub fn orbit_partition(g: &LieAlgebra, budget: u64) -> Result<OrbitPartition> {
    Coadjoint::new(g).partition(budget)
}

/// All coadjoint orbits of an algebra plus a code → orbit lookup table.
#[derive(Debug, Clone)]
pub struct OrbitPartition {
    orbits: Vec<Orbit>,
    index: Vec<u32>,
}

impl OrbitPartition {
    pub fn orbits(&self) -> &[Orbit] {
        &self.orbits
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    /// Index of the orbit containing the functional with this code.
    pub fn orbit_index(&self, code: u64) -> usize {
        self.index[code as usize] as usize
    }

    pub fn orbit_of(&self, code: u64) -> &Orbit {
        &self.orbits[self.orbit_index(code)]
    }

    pub fn inventory(&self, g: &LieAlgebra, with_elements: bool) -> OrbitInventory {
        OrbitInventory {
            algebra: g.dump(),
            orbits: self
                .orbits
                .iter()
                .map(|o| OrbitEntry {
                    rep: o.rep.coords.clone(),
                    size: o.size(),
                    stab_dim: o.stab_dim,
                    elements: with_elements.then(|| o.iter(g).map(|l| l.coords).collect()),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitInventory {
    pub algebra: AlgebraDump,
    pub orbits: Vec<OrbitEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitEntry {
    pub rep: Vec<u32>,
    pub size: u64,
    pub stab_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<Vec<u32>>>,
}

/// Restriction `λ ↦ λ|_h`.
pub fn project(lambda: &DualVector, e: &SubalgebraEmbedding) -> Result<DualVector> {
    check_owner(e.ambient(), lambda)?;
    Ok(DualVector::from_reduced(e.sub(), project_coords(e, &lambda.coords)))
}

fn project_coords(e: &SubalgebraEmbedding, coords: &[u32]) -> Vec<u32> {
    let f = e.ambient().field();
    e.inclusion().iter().map(|row| dot(f, row, coords)).collect()
}

/// A functional on g restricting to `lambda0` on h: the values of `lambda0`
/// placed on the pivot coordinates of the inclusion.
pub fn lift(lambda0: &DualVector, e: &SubalgebraEmbedding) -> Result<DualVector> {
    check_owner(e.sub(), lambda0)?;
    let mut coords = vec![0u32; e.ambient().dim()];
    for (&pc, &v) in e.span().pivots().iter().zip(&lambda0.coords) {
        coords[pc] = v;
    }
    Ok(DualVector::from_reduced(e.ambient(), coords))
}

/// `π⁻¹(λ0)`: every functional on g restricting to `lambda0`, in code order.
pub fn fiber(lambda0: &DualVector, e: &SubalgebraEmbedding) -> Result<Vec<DualVector>> {
    let g = e.ambient();
    let base = lift(lambda0, e)?;
    let ann = e.span().annihilator();
    let enc = Encoder::new(g.p(), ann.dim());
    let f = g.field();
    let mut out: Vec<DualVector> = (0..enc.count().expect("fiber fits in u64"))
        .map(|c| {
            let nu = ann.combination(&enc.decode(c));
            DualVector::from_reduced(g, base.coords.iter().zip(&nu).map(|(&a, &b)| f.add(a, b)).collect())
        })
        .collect();
    out.sort();
    Ok(out)
}

/// `|π⁻¹(ω) ∩ Ω|`, counted by projecting every element of Ω.
pub fn fiber_intersection(omega_h: &Orbit, omega_g: &Orbit, e: &SubalgebraEmbedding) -> Result<u64> {
    if omega_h.algebra != e.sub().id() || omega_g.algebra != e.ambient().id() {
        return Err(Error::AlgebraMismatch);
    }
    let g_enc = e.ambient().encoder();
    let h_enc = e.sub().encoder();
    let mut coords = vec![0u32; e.ambient().dim()];
    let mut count = 0;
    for &c in &omega_g.elements {
        g_enc.decode_into(c, &mut coords);
        if omega_h.contains_code(h_enc.encode(&project_coords(e, &coords))) {
            count += 1;
        }
    }
    Ok(count)
}

/// Which alternative of the codimension-one projection lemma applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DichotomyCase {
    /// `g^{λ0} ⊆ g_0`: the fiber lies in one orbit and `|Ω| = q²|ω|`.
    StabilizerInside,
    /// `g^{λ0} ⊄ g_0`: every orbit meeting the fiber projects bijectively onto ω.
    StabilizerOutside,
}

/// Diagnostic for the projection `g* → g_0*` over one functional `λ0`.
#[derive(Debug, Clone, Serialize)]
pub struct DichotomyReport {
    pub case: DichotomyCase,
    /// `dim {x ∈ g : λ0([x, g_0]) = 0}`.
    pub stabilizer_dim: usize,
    /// `|ω|`, the G_0-orbit of λ0.
    pub small_orbit_size: u64,
    /// Sizes of the distinct G-orbits meeting `π⁻¹(λ0)`.
    pub orbit_sizes: Vec<u64>,
    /// Case 1: the fiber lies in a single orbit. Case 2: each orbit meets the fiber once.
    pub fiber_check: bool,
    /// Case 1: `|Ω| = q²|ω|`. Case 2: `|Ω| = |ω|`.
    pub size_check: bool,
    /// Case 1: the slices `π⁻¹(Ad*_{exp(tu)} ω)` are disjoint and cover Ω.
    /// Case 2: `π` maps Ω bijectively onto ω.
    pub structure_check: bool,
}

impl DichotomyReport {
    pub fn consistent(&self) -> bool {
        self.fiber_check && self.size_check && self.structure_check
    }
}

/// Classifies `λ0 ∈ g_0*` for a codimension-one subalgebra `g_0` and checks
/// the orbit relations predicted for its case.
pub fn projection_dichotomy(lambda0: &DualVector, e: &SubalgebraEmbedding) -> Result<DichotomyReport> {
    if e.codim() != 1 {
        return Err(Error::Codimension(e.codim()));
    }
    let g = e.ambient();
    let h = e.sub();
    check_owner(h, lambda0)?;
    ensure_invariant!(g.normalizes(&g.whole(), e.span()), "codimension-one subalgebra is not an ideal");
    let f = g.field();
    let q = g.p() as u64;

    // g^{λ0} = {x ∈ g : λ0([x, y]) = 0 for all y ∈ g_0}; [x, y] ∈ g_0 since g_0 is an ideal.
    let d = g.dim();
    let rows: Vec<Vec<u32>> = e
        .inclusion()
        .iter()
        .map(|y| {
            (0..d)
                .map(|i| {
                    let br = g.bracket_coords(&crate::linalg::unit(d, i), y);
                    let in_h = e.to_sub(&br).expect("g_0 is an ideal");
                    dot(f, &lambda0.coords, &in_h)
                })
                .collect()
        })
        .collect();
    let stab = Subspace::kernel_of(f, &rows, d);
    let case = if stab.is_subspace_of(e.span()) {
        DichotomyCase::StabilizerInside
    } else {
        DichotomyCase::StabilizerOutside
    };

    let small = Coadjoint::new(h).orbit(lambda0)?;
    let big_action = Coadjoint::new(g);
    let fib = fiber(lambda0, e)?;
    let mut orbits: Vec<Orbit> = Vec::new();
    for lambda in &fib {
        if !orbits.iter().any(|o| o.contains(g, lambda)) {
            orbits.push(big_action.orbit(lambda)?);
        }
    }
    let orbit_sizes: Vec<u64> = orbits.iter().map(Orbit::size).collect();
    let projected_set = |o: &Orbit| -> BTreeSet<u64> {
        o.iter(g)
            .map(|l| h.encoder().encode(&project_coords(e, &l.coords)))
            .collect()
    };

    let (fiber_check, size_check, structure_check) = match case {
        DichotomyCase::StabilizerInside => {
            let omega = &orbits[0];
            let fiber_check = orbits.len() == 1;
            let size_check = omega.size() == q * q * small.size();
            // slices ω_t = G_0-orbit of π(Ad*_{exp(tu)} λ) for u ∉ g_0
            let u = e.span().complement_in(&g.whole()).remove(0);
            let small_action = Coadjoint::new(h);
            let mut slice_reps = BTreeSet::new();
            let mut union = BTreeSet::new();
            for t in 0..g.p() {
                let elem = g.element(&u).scale(t).exp()?;
                let moved = coadjoint_act(g, &elem, &fib[0])?;
                let slice = small_action.orbit(&project(&moved, e)?)?;
                slice_reps.insert(slice.rep_code());
                union.extend(slice.elements.iter().copied());
            }
            let image = projected_set(omega);
            let structure_check = slice_reps.len() == g.p() as usize
                && image == union
                && omega.size() == q * image.len() as u64;
            (fiber_check, size_check, structure_check)
        }
        DichotomyCase::StabilizerOutside => {
            let small_set: BTreeSet<u64> = small.elements.iter().copied().collect();
            let fiber_check = orbits.len() == fib.len()
                && orbits
                    .iter()
                    .all(|o| fib.iter().filter(|l| o.contains(g, l)).count() == 1);
            let size_check = orbits.iter().all(|o| o.size() == small.size());
            let structure_check = orbits.iter().all(|o| projected_set(o) == small_set);
            (fiber_check, size_check, structure_check)
        }
    };

    Ok(DichotomyReport {
        case,
        stabilizer_dim: stab.dim(),
        small_orbit_size: small.size(),
        orbit_sizes,
        fiber_check,
        size_check,
        structure_check,
    })
}
