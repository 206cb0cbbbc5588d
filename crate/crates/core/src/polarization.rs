//! Polarizations: subalgebras that are maximal isotropic for `B_λ(x, y) = λ([x, y])`.
//!
//! The construction runs on pairs `(A, I)` of subspaces of g, where `A` is a
//! subalgebra and `I ⊆ A` an ideal of `A` on which λ vanishes; the quotient
//! `A / I` is never materialized; every vector stays in g-coordinates.

use serde::Serialize;

use crate::coadjoint::{stabilizer_basis, Coadjoint, DualVector};
use crate::error::{ensure_invariant, Error, Result};
use crate::linalg::{dot, Encoder, Subspace};
use crate::nilalg::{AlgebraId, LieAlgebra, SubalgebraEmbedding};

/// Which vector of the second center to pick when splitting off `Ky + Kz`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WitnessChoice {
    /// First echelon vector of the complement of the center (the canonical choice).
    #[default]
    First,
    /// Last echelon vector; usually yields a different polarization.
    Last,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polarization {
    algebra: AlgebraId,
    lambda: DualVector,
    span: Subspace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PolarizationChecks {
    pub subalgebra: bool,
    pub isotropic: bool,
    pub dim_formula: bool,
    pub contains_stabilizer: bool,
}

impl PolarizationChecks {
    pub fn all(&self) -> bool {
        self.subalgebra && self.isotropic && self.dim_formula && self.contains_stabilizer
    }
}

/// Evaluates the four polarization invariants for an arbitrary subspace.
pub fn check_polarization(g: &LieAlgebra, lambda: &DualVector, span: &Subspace) -> PolarizationChecks {
    let stab = stabilizer_basis(g, lambda);
    PolarizationChecks {
        subalgebra: g.is_subalgebra(span),
        isotropic: is_isotropic(g, span, lambda),
        dim_formula: 2 * span.dim() == g.dim() + stab.dim(),
        contains_stabilizer: stab.is_subspace_of(span),
    }
}

impl Polarization {
    /// Validates `span` as a polarization for λ.
    pub fn new(g: &LieAlgebra, lambda: &DualVector, span: Subspace) -> Result<Self> {
        if lambda.algebra() != g.id() || span.ambient_dim() != g.dim() {
            return Err(Error::AlgebraMismatch);
        }
        let checks = check_polarization(g, lambda, &span);
        if !checks.all() {
            return Err(Error::Invariant(format!(
                "not a polarization for {:?}: {checks:?}",
                lambda.coords()
            )));
        }
        Ok(Self {
            algebra: g.id(),
            lambda: lambda.clone(),
            span,
        })
    }

    pub fn algebra(&self) -> AlgebraId {
        self.algebra
    }

    pub fn lambda(&self) -> &DualVector {
        &self.lambda
    }

    /// Echelon basis of p in algebra coordinates.
    pub fn span(&self) -> &Subspace {
        &self.span
    }

    pub fn dim(&self) -> usize {
        self.span.dim()
    }

    /// `codim p = ½ dim Ω(λ)`.
    pub fn codim(&self) -> usize {
        self.span.ambient_dim() - self.span.dim()
    }

    pub fn embedding(&self, g: &LieAlgebra) -> Result<SubalgebraEmbedding> {
        if g.id() != self.algebra {
            return Err(Error::AlgebraMismatch);
        }
        SubalgebraEmbedding::new(g, self.span.clone())
    }

    /// Values of λ on the basis of p.
    pub fn functional_values(&self, g: &LieAlgebra) -> Vec<u32> {
        self.span.rows().iter().map(|r| self.lambda.eval(g, r)).collect()
    }

    pub fn checks(&self, g: &LieAlgebra) -> PolarizationChecks {
        check_polarization(g, &self.lambda, &self.span)
    }
}

/// `λ([x, y]) = 0` for all pairs of basis vectors of `span`.
pub fn is_isotropic(g: &LieAlgebra, span: &Subspace, lambda: &DualVector) -> bool {
    let rows = span.rows();
    (0..rows.len()).all(|i| (i + 1..rows.len()).all(|j| lambda.skew_form(g, &rows[i], &rows[j]) == 0))
}

/// Largest algebra dimension for which [`is_maximal_isotropic`] scans all vectors.
pub const MAXIMALITY_SCAN_DIM: usize = 8;

/// Brute-force maximality: `span` is isotropic and no vector outside it
/// extends it to a larger isotropic subspace.
pub fn is_maximal_isotropic(g: &LieAlgebra, span: &Subspace, lambda: &DualVector) -> Result<bool> {
    if g.dim() > MAXIMALITY_SCAN_DIM {
        return Err(Error::Shape(format!(
            "maximality scan is limited to dimension {MAXIMALITY_SCAN_DIM}, got {}",
            g.dim()
        )));
    }
    if !is_isotropic(g, span, lambda) {
        return Ok(false);
    }
    let enc = g.encoder();
    let total = enc.count().expect("dimension at most 8");
    let extendable = (0..total).any(|code| {
        let v = enc.decode(code);
        !span.contains(&v) && span.rows().iter().all(|s| lambda.skew_form(g, &v, s) == 0)
    });
    Ok(!extendable)
}

/// `{u ∈ a : [u, y] ∈ i}`.
fn bracket_preimage(g: &LieAlgebra, a: &Subspace, y: &[u32], i: &Subspace) -> Subspace {
    let f = g.field();
    let checks = i.annihilator();
    let images: Vec<Vec<u32>> = a.rows().iter().map(|u| g.bracket_coords(u, y)).collect();
    let rows: Vec<Vec<u32>> = checks
        .rows()
        .iter()
        .map(|nu| images.iter().map(|b| dot(f, nu, b)).collect())
        .collect();
    let kernel = Subspace::kernel_of(f, &rows, a.dim());
    let vectors: Vec<Vec<u32>> = kernel.rows().iter().map(|c| a.combination(c)).collect();
    Subspace::span(f, g.dim(), &vectors)
}

fn polarize_rec(g: &LieAlgebra, lambda: &DualVector, a: Subspace, i: Subspace, choice: WitnessChoice) -> Subspace {
    if a.dim() - i.dim() <= 1 {
        return a;
    }
    let z = if i.dim() == 0 && a.dim() == g.dim() {
        g.center()
    } else {
        g.relative_center(&a, &i)
    };
    let center_dim = z.dim() - i.dim();
    let vanishing = z.rows().iter().all(|r| lambda.eval(g, r) == 0);
    if center_dim > 1 || vanishing {
        // quotient by ker(λ|_z), which is all of z when λ vanishes there
        let values: Vec<Vec<u32>> = vec![z.rows().iter().map(|r| lambda.eval(g, r)).collect()];
        let kernel = Subspace::kernel_of(g.field(), &values, z.dim());
        let vectors: Vec<Vec<u32>> = kernel.rows().iter().map(|c| z.combination(c)).collect();
        let ideal = Subspace::span(g.field(), g.dim(), &vectors);
        debug_assert!(ideal.dim() > i.dim());
        return polarize_rec(g, lambda, a, ideal, choice);
    }
    // z / i = Kz with λ(z) ≠ 0: split off the ideal Ky + Kz
    let z2 = g.relative_center(&a, &z);
    let mut candidates = z.complement_in(&z2);
    let y = match choice {
        WitnessChoice::First => candidates.remove(0),
        WitnessChoice::Last => candidates.pop().expect("second center exceeds the center"),
    };
    let g0 = bracket_preimage(g, &a, &y, &i);
    debug_assert_eq!(g0.dim() + 1, a.dim());
    polarize_rec(g, lambda, g0, i, choice)
}

/// A polarization for λ built by the constructive recursion with the
/// canonical witness choice.
pub fn polarize(g: &LieAlgebra, lambda: &DualVector) -> Result<Polarization> {
    polarize_with(g, lambda, WitnessChoice::First)
}

pub fn polarize_with(g: &LieAlgebra, lambda: &DualVector, choice: WitnessChoice) -> Result<Polarization> {
    if lambda.algebra() != g.id() {
        return Err(Error::AlgebraMismatch);
    }
    let span = polarize_rec(g, lambda, g.whole(), g.zero_subspace(), choice);
    Polarization::new(g, lambda, span)
}

/// Sizes compared by [`verify_lagrangian_fiber`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LagrangianReport {
    /// `|L^λ|` with `L^λ = π_p⁻¹(π_p(λ))`.
    pub fiber_size: u64,
    /// `|Ad*_P λ|`.
    pub p_orbit_size: u64,
    /// `|Ω(λ)| = q^{dim g − dim g^λ}`.
    pub orbit_size: u64,
    /// `L^λ = Ad*_P λ` as sets.
    pub sets_equal: bool,
}

impl LagrangianReport {
    /// `|L^λ| = √|Ω(λ)|`.
    pub fn size_matches(&self) -> bool {
        self.fiber_size.checked_mul(self.fiber_size) == Some(self.orbit_size)
    }

    pub fn ok(&self) -> bool {
        self.sets_equal && self.size_matches()
    }
}

/// How `Ad*_P λ` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum POrbitMethod {
    /// Closure under the one-parameter subgroups `exp(t y_k)`, `y_k` a basis of p.
    #[default]
    Generators,
    /// Apply every element of `P = exp(p)`.
    Enumerate,
}

/// Sorted codes of `L^λ = λ + p^⊥`, the functionals agreeing with λ on p.
fn fiber_codes(g: &LieAlgebra, pol: &Polarization) -> Vec<u64> {
    let f = g.field();
    let enc = g.encoder();
    let ann = pol.span.annihilator();
    let ann_enc = Encoder::new(g.p(), ann.dim());
    let mut shifted = vec![0u32; g.dim()];
    let mut codes: Vec<u64> = (0..ann_enc.count().expect("fiber fits the code range"))
        .map(|c| {
            let v = ann.combination(&ann_enc.decode(c));
            for ((s, &l), &x) in shifted.iter_mut().zip(pol.lambda.coords()).zip(&v) {
                *s = f.add(l, x);
            }
            enc.encode(&shifted)
        })
        .collect();
    codes.sort_unstable();
    codes
}

/// Checks `L^λ = Ad*_P λ` and `|L^λ| = √|Ω(λ)|`.
pub fn verify_lagrangian_fiber(g: &LieAlgebra, pol: &Polarization) -> Result<LagrangianReport> {
    verify_lagrangian_fiber_with(g, pol, POrbitMethod::Generators)
}

pub fn verify_lagrangian_fiber_with(
    g: &LieAlgebra,
    pol: &Polarization,
    method: POrbitMethod,
) -> Result<LagrangianReport> {
    if pol.algebra != g.id() {
        return Err(Error::AlgebraMismatch);
    }
    let fib = fiber_codes(g, pol);
    let p_orbit: Vec<u64> = match method {
        POrbitMethod::Generators => Coadjoint::for_subgroup(g, pol.span())?.orbit_codes(&pol.lambda),
        POrbitMethod::Enumerate => {
            let span_enc = Encoder::new(g.p(), pol.span.dim());
            let mut codes: Vec<u64> = (0..span_enc.count().expect("subgroup fits the code range"))
                .map(|c| {
                    let x = g.element(&pol.span.combination(&span_enc.decode(c))).exp()?;
                    crate::coadjoint::coadjoint_act(g, &x, &pol.lambda).map(|m| m.code(g))
                })
                .collect::<Result<_>>()?;
            codes.sort_unstable();
            codes.dedup();
            codes
        }
    };
    let stab_dim = stabilizer_basis(g, &pol.lambda).dim();
    let report = LagrangianReport {
        fiber_size: fib.len() as u64,
        p_orbit_size: p_orbit.len() as u64,
        orbit_size: (g.p() as u64).pow((g.dim() - stab_dim) as u32),
        sets_equal: fib == p_orbit,
    };
    ensure_invariant!(report.ok(), "Lagrangian fiber check failed: {report:?}");
    Ok(report)
}

/// JSON record printed by the `polarize` command.
#[derive(Debug, Clone, Serialize)]
pub struct PolarizationRecord {
    pub lambda: Vec<u32>,
    pub polarization_basis: Vec<Vec<u32>>,
    pub dim: usize,
    pub checks: PolarizationChecks,
}

impl PolarizationRecord {
    pub fn new(g: &LieAlgebra, pol: &Polarization) -> Self {
        Self {
            lambda: pol.lambda.coords().to_vec(),
            polarization_basis: pol.span.rows().to_vec(),
            dim: pol.dim(),
            checks: pol.checks(g),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coadjoint::{fiber, orbit_partition, project};

    fn span(g: &LieAlgebra, rows: &[Vec<u32>]) -> Subspace {
        Subspace::span(g.field(), g.dim(), rows)
    }

    #[test]
    fn fiber_matches_projection_preimage() {
        let g = LieAlgebra::ut(5, 4).unwrap();
        for code in [1u64, 7, 100, 2000, 15000] {
            let lambda = DualVector::from_code(&g, code);
            let pol = polarize(&g, &lambda).unwrap();
            let e = pol.embedding(&g).unwrap();
            let mut via_projection: Vec<u64> = fiber(&project(&lambda, &e).unwrap(), &e)
                .unwrap()
                .iter()
                .map(|l| l.code(&g))
                .collect();
            via_projection.sort_unstable();
            assert_eq!(fiber_codes(&g, &pol), via_projection);
        }
    }

    #[test]
    fn zero_functional_gives_whole_algebra() {
        let g = LieAlgebra::ut(5, 4).unwrap();
        let pol = polarize(&g, &DualVector::zero(&g)).unwrap();
        assert_eq!(pol.span(), &g.whole());
        let report = verify_lagrangian_fiber(&g, &pol).unwrap();
        assert_eq!((report.fiber_size, report.orbit_size), (1, 1));
    }

    #[test]
    fn heisenberg_polarizations() {
        let g = LieAlgebra::ut(3, 3).unwrap();
        let lambda = DualVector::new(&g, &[0, 0, 1]).unwrap();
        let first = polarize(&g, &lambda).unwrap();
        assert_eq!(first.span(), &span(&g, &[vec![1, 0, 0], vec![0, 0, 1]]));
        let last = polarize_with(&g, &lambda, WitnessChoice::Last).unwrap();
        assert_eq!(last.span(), &span(&g, &[vec![0, 1, 0], vec![0, 0, 1]]));
        for pol in [&first, &last] {
            let report = verify_lagrangian_fiber(&g, pol).unwrap();
            assert_eq!(report.fiber_size, 3);
            assert_eq!(report.orbit_size, 9);
            assert!(is_maximal_isotropic(&g, pol.span(), &lambda).unwrap());
        }
    }

    #[test]
    fn ut4_corner_functional() {
        let g = LieAlgebra::ut(5, 4).unwrap();
        // E14 is the last coordinate
        let lambda = DualVector::new(&g, &[0, 0, 0, 0, 0, 1]).unwrap();
        assert_eq!(stabilizer_basis(&g, &lambda).dim(), 2);
        let pol = polarize(&g, &lambda).unwrap();
        assert_eq!(pol.dim(), 4);
        let report = verify_lagrangian_fiber(&g, &pol).unwrap();
        assert_eq!(report.fiber_size, 25);
        assert_eq!(report.orbit_size, 625);
        assert!(is_maximal_isotropic(&g, pol.span(), &lambda).unwrap());
    }

    #[test]
    fn isotropy_examples() {
        let g = LieAlgebra::ut(3, 3).unwrap();
        let lambda = DualVector::new(&g, &[0, 0, 1]).unwrap();
        assert!(!is_isotropic(&g, &span(&g, &[vec![1, 0, 0], vec![0, 1, 0]]), &lambda));
        for code in 1..27 {
            let v = g.encoder().decode(code);
            assert!(is_isotropic(&g, &span(&g, &[v]), &lambda));
        }
        assert!(is_isotropic(&g, &stabilizer_basis(&g, &lambda), &lambda));
    }

    #[test]
    fn invalid_polarization_rejected() {
        let g = LieAlgebra::ut(3, 3).unwrap();
        let lambda = DualVector::new(&g, &[0, 0, 1]).unwrap();
        let center = span(&g, &[vec![0, 0, 1]]);
        assert!(matches!(Polarization::new(&g, &lambda, center.clone()), Err(Error::Invariant(_))));
        assert!(!is_maximal_isotropic(&g, &center, &lambda).unwrap());
    }

    #[test]
    fn sampled_functionals_on_ut5() {
        use rand::{Rng, SeedableRng};
        let g = LieAlgebra::ut(5, 5).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..40 {
            let coords: Vec<i64> = (0..g.dim()).map(|_| rng.gen_range(0..5)).collect();
            let lambda = DualVector::new(&g, &coords).unwrap();
            for choice in [WitnessChoice::First, WitnessChoice::Last] {
                let pol = polarize_with(&g, &lambda, choice).unwrap();
                assert!(verify_lagrangian_fiber(&g, &pol).unwrap().ok());
            }
        }
    }

    #[test]
    fn every_functional_on_ut3_f5_both_choices() {
        let g = LieAlgebra::ut(5, 3).unwrap();
        for code in 0..125 {
            let lambda = DualVector::from_code(&g, code);
            for choice in [WitnessChoice::First, WitnessChoice::Last] {
                let pol = polarize_with(&g, &lambda, choice).unwrap();
                assert!(pol.checks(&g).all());
                assert!(is_maximal_isotropic(&g, pol.span(), &lambda).unwrap());
                assert!(verify_lagrangian_fiber(&g, &pol).unwrap().ok());
            }
        }
    }

    #[test]
    fn generator_and_enumeration_orbits_agree() {
        let g = LieAlgebra::ut(5, 4).unwrap();
        let part = orbit_partition(&g, 100_000).unwrap();
        for o in part.orbits().iter().step_by(7) {
            for choice in [WitnessChoice::First, WitnessChoice::Last] {
                let pol = polarize_with(&g, o.rep(), choice).unwrap();
                let a = verify_lagrangian_fiber_with(&g, &pol, POrbitMethod::Generators).unwrap();
                let b = verify_lagrangian_fiber_with(&g, &pol, POrbitMethod::Enumerate).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn maximality_scan_is_bounded() {
        let g = LieAlgebra::ut(5, 5).unwrap();
        let lambda = DualVector::zero(&g);
        assert!(matches!(is_maximal_isotropic(&g, &g.whole(), &lambda), Err(Error::Shape(_))));
    }

    #[test]
    fn record_json() {
        let g = LieAlgebra::ut(3, 3).unwrap();
        let pol = polarize(&g, &DualVector::new(&g, &[0, 0, 1]).unwrap()).unwrap();
        let json = serde_json::to_string(&PolarizationRecord::new(&g, &pol)).unwrap();
        assert_eq!(
            json,
            r#"{"lambda":[0,0,1],"polarization_basis":[[1,0,0],[0,0,1]],"dim":2,"checks":{"subalgebra":true,"isotropic":true,"dim_formula":true,"contains_stabilizer":true}}"#
        );
    }
}
