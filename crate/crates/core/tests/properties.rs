use orbitkit::characters::{conjugacy_classes, kirillov_character};
use orbitkit::coadjoint::{coadjoint_act, orbit, orbit_partition, DualVector};
use orbitkit::linalg::Subspace;
use orbitkit::multiplicity::{branching_table, restriction_multiplicity, tensor_decomposition, tensor_multiplicity};
use orbitkit::nilalg::{LieAlgebra, SubalgebraEmbedding};
use orbitkit::polarization::{polarize_with, verify_lagrangian_fiber, WitnessChoice};
use proptest::prelude::*;

fn ut4() -> LieAlgebra {
    LieAlgebra::ut(5, 4).unwrap()
}

fn coords(d: usize, p: u32) -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(0..p as i64, d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coadjoint_action_composes(l in coords(6, 5), a in 0u64..15625, b in 0u64..15625) {
        let g = ut4();
        let lambda = DualVector::new(&g, &l).unwrap();
        let x = g.group_element(a);
        let y = g.group_element(b);
        let lhs = coadjoint_act(&g, &x.mul(&y).unwrap(), &lambda).unwrap();
        let rhs = coadjoint_act(&g, &x, &coadjoint_act(&g, &y, &lambda).unwrap()).unwrap();
        prop_assert_eq!(lhs.coords(), rhs.coords());
        let o = orbit(&g, &lambda).unwrap();
        prop_assert!(o.contains(&g, &lhs));
    }

    #[test]
    fn polarizations_on_random_functionals(l in coords(6, 5), last in any::<bool>()) {
        let g = ut4();
        let lambda = DualVector::new(&g, &l).unwrap();
        let choice = if last { WitnessChoice::Last } else { WitnessChoice::First };
        let pol = polarize_with(&g, &lambda, choice).unwrap();
        prop_assert!(pol.checks(&g).all());
        let report = verify_lagrangian_fiber(&g, &pol).unwrap();
        prop_assert_eq!(report.fiber_size * report.fiber_size, orbit(&g, &lambda).unwrap().size());
    }

    #[test]
    fn orbit_representative_is_canonical(l in coords(6, 5), a in 0u64..15625) {
        let g = ut4();
        let lambda = DualVector::new(&g, &l).unwrap();
        let moved = coadjoint_act(&g, &g.group_element(a), &lambda).unwrap();
        prop_assert_eq!(orbit(&g, &lambda).unwrap().rep_code(), orbit(&g, &moved).unwrap().rep_code());
    }
}

#[test]
fn characters_are_class_functions() {
    let g = LieAlgebra::ut(3, 3).unwrap();
    let classes = conjugacy_classes(&g, 1000).unwrap();
    assert_eq!(classes.len(), 11);
    for o in orbit_partition(&g, 1000).unwrap().orbits() {
        let chi = kirillov_character(&g, o).unwrap();
        assert!(chi.is_constant_on(&classes));
        assert!(chi.is_conjugation_invariant(&g).unwrap());
    }
}

#[test]
fn tensor_multiplicities_are_symmetric() {
    let g = LieAlgebra::ut(5, 3).unwrap();
    let part = orbit_partition(&g, 1000).unwrap();
    let orbits = part.orbits();
    for i in (0..orbits.len()).step_by(3) {
        for j in (0..orbits.len()).step_by(4) {
            for k in [0, 7, orbits.len() - 1] {
                assert_eq!(
                    tensor_multiplicity(&g, &orbits[k], &orbits[i], &orbits[j]).unwrap(),
                    tensor_multiplicity(&g, &orbits[k], &orbits[j], &orbits[i]).unwrap()
                );
            }
        }
    }
    // the square of the degree-5 orbit through (0,0,1) holds 5 copies of (0,0,2)
    let i = part.orbit_index(DualVector::new(&g, &[0, 0, 1]).unwrap().code(&g));
    let square = tensor_decomposition(&g, &part, i, i).unwrap();
    assert_eq!(square.len(), 1);
    assert_eq!(square[0].0.rep().coords(), &[0, 0, 2]);
    assert_eq!(square[0].1, 5);
}

/// Restriction in two steps `g ⊃ k ⊃ h` equals restriction in one.
#[test]
fn branching_composes_along_a_chain() {
    let g = LieAlgebra::ut(5, 4).unwrap();
    let span = |rows: &[Vec<u32>]| Subspace::span(g.field(), g.dim(), rows);
    // coordinates (E12, E23, E34, E13, E24, E14)
    let k_span = span(&[
        vec![0, 1, 0, 0, 0, 0],
        vec![0, 0, 1, 0, 0, 0],
        vec![0, 0, 0, 1, 0, 0],
        vec![0, 0, 0, 0, 1, 0],
        vec![0, 0, 0, 0, 0, 1],
    ]);
    let h_span = span(&[vec![0, 0, 1, 0, 0, 0], vec![0, 0, 0, 0, 1, 0], vec![0, 0, 0, 0, 0, 1]]);
    let k = SubalgebraEmbedding::new(&g, k_span).unwrap();
    let h_in_g = SubalgebraEmbedding::new(&g, h_span.clone()).unwrap();
    let h_rows: Vec<Vec<u32>> = h_span.rows().iter().map(|r| k.to_sub(r).unwrap()).collect();
    let h_in_k = SubalgebraEmbedding::new(k.sub(), Subspace::span(g.field(), k.sub().dim(), &h_rows)).unwrap();

    let direct = branching_table(&h_in_g, 1_000_000).unwrap();
    let first = branching_table(&k, 1_000_000).unwrap();
    let second = branching_table(&h_in_k, 1_000_000).unwrap();
    // both h tables list the same h-orbits in the same order
    assert_eq!(direct.rows, second.rows);
    for (a, row) in direct.entries.iter().enumerate() {
        for (c, &m) in row.iter().enumerate() {
            let composite: u64 = (0..first.rows.len()).map(|b| second.entries[a][b] * first.entries[b][c]).sum();
            assert_eq!(m, composite);
        }
    }
}

#[test]
fn restriction_to_whole_algebra_is_identity() {
    let g = LieAlgebra::ut(5, 3).unwrap();
    let whole = SubalgebraEmbedding::whole(&g);
    let part = orbit_partition(&g, 1000).unwrap();
    let sub_part = orbit_partition(whole.sub(), 1000).unwrap();
    for (i, a) in sub_part.orbits().iter().enumerate() {
        for (j, b) in part.orbits().iter().enumerate() {
            assert_eq!(restriction_multiplicity(a, b, &whole).unwrap(), u64::from(i == j));
        }
    }
}
