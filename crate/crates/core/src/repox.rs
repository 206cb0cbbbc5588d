//! Explicit induced representations, used as an independent check on the
//! orbit side.
//!
//! Nothing here looks at coadjoint orbits: representations are built from a
//! subgroup and a linear character on it, and every character value comes
//! from a trace. Induced representations are monomial, so `ρ(u)` is stored
//! as a permutation of the coset basis plus one ζ-exponent per column.

use num_traits::{One, Signed, Zero};

use crate::characters::{inner_product, ClassFunction};
use crate::error::{ensure_invariant, Error, Result};
use crate::field::CyclotomicNumber;
use crate::linalg::{dot, Encoder};
use crate::nilalg::{AlgebraId, GroupElement, LieAlgebra, SubalgebraEmbedding};
use crate::polarization::Polarization;

/// `|G|` above which exhaustive pairwise checks are skipped.
pub const EXHAUSTIVE_PAIR_LIMIT: u64 = 729;

/// All elements of `G = exp(g)` in canonical code order.
#[derive(Debug, Clone)]
pub struct Group<'a> {
    algebra: &'a LieAlgebra,
    elements: Vec<GroupElement>,
}

impl<'a> Group<'a> {
    pub fn new(algebra: &'a LieAlgebra, budget: u64) -> Result<Self> {
        let order = algebra.check_budget(budget)?;
        let elements = (0..order).map(|c| algebra.group_element(c)).collect();
        Ok(Self { algebra, elements })
    }

    pub fn algebra(&self) -> &'a LieAlgebra {
        self.algebra
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn element(&self, code: u64) -> &GroupElement {
        &self.elements[code as usize]
    }

    pub fn code(&self, x: &GroupElement) -> Result<u64> {
        self.algebra.group_code(x)
    }

    pub fn mul_codes(&self, a: u64, b: u64) -> Result<u64> {
        self.code(&self.element(a).mul(self.element(b))?)
    }
}

/// `ξ(exp x) = ζ^{ω(x)}` on a subgroup `P = exp(p)`, where ω vanishes on `[p, p]`.
#[derive(Debug, Clone)]
pub struct LinearCharacter {
    subgroup: SubalgebraEmbedding,
    values: Vec<u32>,
}

impl LinearCharacter {
    /// `values[k] = ω(y_k)` on the basis `y_k` of the subgroup's algebra.
    pub fn new(subgroup: SubalgebraEmbedding, values: Vec<u32>) -> Result<Self> {
        let h = subgroup.sub();
        if values.len() != h.dim() {
            return Err(Error::Shape(format!(
                "linear character needs {} values, got {}",
                h.dim(),
                values.len()
            )));
        }
        let f = h.field();
        let values: Vec<u32> = values.into_iter().map(|v| v % f.p()).collect();
        for i in 0..h.dim() {
            for j in i + 1..h.dim() {
                let br = &h.structure()[i][j];
                if dot(f, br, &values) != 0 {
                    return Err(Error::Invariant(
                        "functional does not vanish on the derived algebra; not a linear character".into(),
                    ));
                }
            }
        }
        Ok(Self { subgroup, values })
    }

    pub fn subgroup(&self) -> &SubalgebraEmbedding {
        &self.subgroup
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// The same character viewed on a subgroup of a larger group, where
    /// `outer` embeds the current ambient algebra.
    pub fn pushforward(&self, outer: &SubalgebraEmbedding) -> Result<Self> {
        if outer.sub() != self.subgroup.ambient() {
            return Err(Error::AlgebraMismatch);
        }
        let rows: Vec<Vec<u32>> = self.subgroup.inclusion().iter().map(|r| outer.to_ambient(r)).collect();
        let g = outer.ambient();
        let span = crate::linalg::Subspace::span(g.field(), g.dim(), &rows);
        let e = SubalgebraEmbedding::new(g, span)?;
        // echelonizing in g may reorder the basis; recompute values through coordinates
        let values = e
            .inclusion()
            .iter()
            .map(|row| {
                let in_outer = outer.to_sub(row).ok_or(Error::NotInAlgebra)?;
                let in_self = self.subgroup.to_sub(&in_outer).ok_or(Error::NotInAlgebra)?;
                Ok(dot(g.field(), &in_self, &self.values))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(e, values)
    }

    /// Exponent `ω(log x)` for a group element of the ambient group lying in P.
    pub fn exponent(&self, x: &GroupElement) -> Result<u32> {
        let g = self.subgroup.ambient();
        let coords = g.coords(&x.log()?)?;
        let h = self.subgroup.to_sub(&coords).ok_or(Error::NotInAlgebra)?;
        Ok(dot(g.field(), &h, &self.values))
    }

    /// `ξ(uv) = ξ(u) ξ(v)` for all pairs in P.
    pub fn is_multiplicative(&self) -> Result<bool> {
        let h = self.subgroup.sub();
        let group = Group::new(h, u64::MAX)?;
        let ex: Vec<u32> = (0..group.order())
            .map(|c| dot(h.field(), &h.encoder().decode(c), &self.values))
            .collect();
        for a in 0..group.order() {
            for b in 0..group.order() {
                let ab = group.mul_codes(a, b)? as usize;
                if ex[ab] != (ex[a as usize] + ex[b as usize]) % h.p() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// ξ as a class function on P.
    pub fn as_class_function(&self) -> Result<ClassFunction> {
        let h = self.subgroup.sub();
        let p = h.p() as usize;
        let order = h.check_budget(u64::MAX)?;
        let enc = h.encoder();
        let mut counts = vec![0i64; order as usize * p];
        for c in 0..order {
            let t = dot(h.field(), &enc.decode(c), &self.values) as usize;
            counts[c as usize * p + t] = 1;
        }
        ClassFunction::from_power_counts(h, &counts, 1)
    }
}

/// `ξ_λ(exp x) = ζ^{λ(x)}` on `P = exp(p)`; multiplicativity is checked
/// exhaustively when `|P| ≤ 729`.
pub fn linear_character(g: &LieAlgebra, pol: &Polarization) -> Result<LinearCharacter> {
    let xi = LinearCharacter::new(pol.embedding(g)?, pol.functional_values(g))?;
    if xi.subgroup.sub().order() <= EXHAUSTIVE_PAIR_LIMIT as u128 {
        ensure_invariant!(xi.is_multiplicative()?, "ξ is not multiplicative on P");
    }
    Ok(xi)
}

/// A monomial representation materialized on every group element:
/// `ρ(u) e_i = ζ^{phase} e_{perm}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialRep {
    group: AlgebraId,
    p: u32,
    dim: usize,
    perm: Vec<u32>,
    phase: Vec<u32>,
}

impl MonomialRep {
    pub fn group(&self) -> AlgebraId {
        self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u64 {
        (self.perm.len() / self.dim) as u64
    }

    fn column(&self, u: u64, i: usize) -> (usize, u32) {
        let k = u as usize * self.dim + i;
        (self.perm[k] as usize, self.phase[k])
    }

    /// Dense matrix of `ρ(u)`.
    pub fn matrix(&self, u: u64) -> Vec<Vec<CyclotomicNumber>> {
        let mut m = vec![vec![CyclotomicNumber::zero(self.p); self.dim]; self.dim];
        for i in 0..self.dim {
            let (j, t) = self.column(u, i);
            m[j][i] = CyclotomicNumber::zeta(self.p, t);
        }
        m
    }

    /// `ρ(1) = I` and `ρ(ab) = ρ(a) ρ(b)` for all pairs.
    pub fn is_homomorphism(&self, group: &Group) -> Result<bool> {
        if group.algebra().id() != self.group {
            return Err(Error::AlgebraMismatch);
        }
        if (0..self.dim).any(|i| self.column(0, i) != (i, 0)) {
            return Ok(false);
        }
        for a in 0..group.order() {
            for b in 0..group.order() {
                let ab = group.mul_codes(a, b)?;
                for i in 0..self.dim {
                    let (j, s) = self.column(b, i);
                    let (k, t) = self.column(a, j);
                    if self.column(ab, i) != (k, (s + t) % self.p) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// `ρ1 ⊗ ρ2` on the basis `e_i ⊗ e_j`, ordered lexicographically.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::AlgebraMismatch);
        }
        let dim = self.dim * other.dim;
        let mut perm = Vec::with_capacity(self.perm.len() * other.dim);
        let mut phase = Vec::with_capacity(perm.capacity());
        for u in 0..self.order() {
            for i in 0..self.dim {
                let (a, s) = self.column(u, i);
                for j in 0..other.dim {
                    let (b, t) = other.column(u, j);
                    perm.push((a * other.dim + b) as u32);
                    phase.push((s + t) % self.p);
                }
            }
        }
        Ok(Self {
            group: self.group,
            p: self.p,
            dim,
            perm,
            phase,
        })
    }

    /// `res(ρ, H)` for `H = exp(h)` embedded by `e`.
    pub fn restrict(&self, e: &SubalgebraEmbedding) -> Result<Self> {
        if e.ambient().id() != self.group {
            return Err(Error::AlgebraMismatch);
        }
        let order = e.sub().check_budget(u64::MAX)?;
        let mut perm = Vec::with_capacity(order as usize * self.dim);
        let mut phase = Vec::with_capacity(perm.capacity());
        for c in 0..order {
            let u = e.group_code_in_ambient(c) as usize;
            perm.extend_from_slice(&self.perm[u * self.dim..(u + 1) * self.dim]);
            phase.extend_from_slice(&self.phase[u * self.dim..(u + 1) * self.dim]);
        }
        Ok(Self {
            group: e.sub().id(),
            p: self.p,
            dim: self.dim,
            perm,
            phase,
        })
    }
}

/// Left cosets `uP` with their lexicographically minimal representatives.
#[derive(Debug, Clone)]
pub struct Cosets {
    reps: Vec<u64>,
    coset_of: Vec<u32>,
}

impl Cosets {
    pub fn reps(&self) -> &[u64] {
        &self.reps
    }

    pub fn coset_of(&self, code: u64) -> usize {
        self.coset_of[code as usize] as usize
    }
}

/// Partition of G into left cosets of `P = exp(p)`.
pub fn left_cosets(group: &Group, subgroup: &SubalgebraEmbedding) -> Result<Cosets> {
    let g = group.algebra();
    if subgroup.ambient() != g {
        return Err(Error::AlgebraMismatch);
    }
    let h = subgroup.sub();
    let p_codes: Vec<u64> = (0..h.check_budget(u64::MAX)?)
        .map(|c| subgroup.group_code_in_ambient(c))
        .collect();
    let mut coset_of = vec![u32::MAX; group.order() as usize];
    let mut reps = Vec::new();
    for u in 0..group.order() {
        if coset_of[u as usize] != u32::MAX {
            continue;
        }
        let idx = reps.len() as u32;
        for &x in &p_codes {
            let ux = group.mul_codes(u, x)? as usize;
            ensure_invariant!(coset_of[ux] == u32::MAX, "cosets overlap");
            coset_of[ux] = idx;
        }
        reps.push(u);
    }
    Ok(Cosets { reps, coset_of })
}

/// `ind(ξ, P, G)` on the coset basis `e_i ↔ r_i P`:
/// `ρ(u) e_i = ξ(r_j⁻¹ u r_i) e_j` where `u r_i ∈ r_j P`.
pub fn induce(xi: &LinearCharacter, group: &Group) -> Result<MonomialRep> {
    let g = group.algebra();
    let cosets = left_cosets(group, xi.subgroup())?;
    let dim = cosets.reps.len();
    let rep_elems: Vec<&GroupElement> = cosets.reps.iter().map(|&r| group.element(r)).collect();
    let rep_inv: Vec<GroupElement> = rep_elems.iter().map(|r| r.inverse()).collect();
    let order = group.order() as usize;
    let mut perm = vec![0u32; order * dim];
    let mut phase = vec![0u32; order * dim];
    for u in 0..order {
        let ue = group.element(u as u64);
        for (i, r) in rep_elems.iter().enumerate() {
            let ur = ue.mul(r)?;
            let j = cosets.coset_of(group.code(&ur)?);
            let inside = rep_inv[j].mul(&ur)?;
            perm[u * dim + i] = j as u32;
            phase[u * dim + i] = xi.exponent(&inside)?;
        }
    }
    Ok(MonomialRep {
        group: g.id(),
        p: g.p(),
        dim,
        perm,
        phase,
    })
}

/// `χ(u) = Tr ρ(u)`: the sum of phases over the fixed basis vectors.
pub fn trace_character(rep: &MonomialRep, algebra: &LieAlgebra) -> Result<ClassFunction> {
    if algebra.id() != rep.group {
        return Err(Error::AlgebraMismatch);
    }
    let p = rep.p as usize;
    let mut counts = vec![0i64; rep.order() as usize * p];
    for u in 0..rep.order() {
        for i in 0..rep.dim {
            let (j, t) = rep.column(u, i);
            if j == i {
                counts[u as usize * p + t as usize] += 1;
            }
        }
    }
    ClassFunction::from_power_counts(algebra, &counts, 1)
}

/// Frobenius formula `ind f(u) = |H|⁻¹ Σ_{x ∈ G, x u x⁻¹ ∈ H} f(x u x⁻¹)`
/// for a class function `f` on `H = exp(h)`.
pub fn induce_class_function(f: &ClassFunction, e: &SubalgebraEmbedding, group: &Group) -> Result<ClassFunction> {
    let g = group.algebra();
    let h = e.sub();
    if f.algebra() != h.id() || e.ambient() != g {
        return Err(Error::AlgebraMismatch);
    }
    let p = g.p() as usize;
    let den = f.denominator();
    let order = group.order();
    let h_enc = Encoder::new(h.p(), h.dim());
    let mut counts = vec![0i64; order as usize * p];
    let inverses: Vec<GroupElement> = (0..order).map(|x| group.element(x).inverse()).collect();
    for u in 0..order {
        let ue = group.element(u);
        let slot = &mut counts[u as usize * p..(u as usize + 1) * p];
        for x in 0..order {
            let conj = group.element(x).mul(ue)?.mul(&inverses[x as usize])?;
            let coords = g.coords(&conj.log()?)?;
            if let Some(hc) = e.to_sub(&coords) {
                for (s, &n) in slot.iter_mut().zip(f.raw(h_enc.encode(&hc) as usize)) {
                    *s += n;
                }
            }
        }
    }
    let denominator = den
        .checked_mul(h.order() as i64)
        .ok_or_else(|| Error::Invariant("denominator overflow".into()))?;
    ClassFunction::from_power_counts(g, &counts, denominator)
}

/// `(f, χ)` for an irreducible χ, required to be a non-negative integer.
pub fn multiplicity_oracle(f: &ClassFunction, irreducible: &ClassFunction) -> Result<u64> {
    ensure_invariant!(
        inner_product(irreducible, irreducible)?.is_one(),
        "multiplicity oracle needs an irreducible character"
    );
    let m = inner_product(f, irreducible)?;
    ensure_invariant!(
        m.is_integer() && !m.is_negative(),
        "multiplicity {m} is not a non-negative integer; input is not a character"
    );
    Ok(if m.is_zero() {
        0
    } else {
        u64::try_from(m.to_integer()).map_err(|_| Error::Invariant("multiplicity overflows u64".into()))?
    })
}

/// `T^λ = ind(ξ_λ, P, G)` for a polarization of λ.
pub fn irreducible_rep(group: &Group, pol: &Polarization) -> Result<MonomialRep> {
    induce(&linear_character(group.algebra(), pol)?, group)
}
