//! Property suite behind the `verify` command: orbit-side results compared
//! with explicit induced representations.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::characters::{inner_product, kirillov_character, label, ClassFunction};
use crate::coadjoint::{orbit_partition, projection_dichotomy, DualVector, OrbitPartition};
use crate::error::{Error, Result};
use crate::linalg::Encoder;
use crate::multiplicity::{branching_table, tensor_decomposition, tensor_multiplicity_via_diagonal};
use crate::nilalg::{codim_one_subalgebras, ideal_chain_spaces, AlgebraDump, LieAlgebra, SubalgebraEmbedding};
use crate::polarization::{check_polarization, polarize_with, verify_lagrangian_fiber, WitnessChoice};
use crate::repox::{
    induce, induce_class_function, irreducible_rep, linear_character, multiplicity_oracle, trace_character, Group,
    MonomialRep, EXHAUSTIVE_PAIR_LIMIT,
};

/// Dimension bound for the hyperplane scan over codimension-one subalgebras.
pub const HYPERPLANE_SCAN_DIM: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(flatten)]
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub algebra: AlgebraDump,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,passed,detail\n");
        for c in &self.checks {
            out.push_str(&format!("{},{},\"{}\"\n", c.name, c.outcome.passed, c.outcome.detail.replace('"', "'")));
        }
        out
    }
}

/// Invariant violations become failed checks; anything else aborts.
fn capture(result: Result<Outcome>) -> Result<Outcome> {
    match result {
        Err(Error::Invariant(msg)) => Ok(Outcome::new(false, msg)),
        other => other,
    }
}

fn size_histogram(sizes: impl Iterator<Item = u64>) -> String {
    let mut hist: BTreeMap<u64, usize> = BTreeMap::new();
    for s in sizes {
        *hist.entry(s).or_default() += 1;
    }
    hist.iter().map(|(s, n)| format!("{n}x{s}")).collect::<Vec<_>>().join(" ")
}

/// Orbit sizes against the stabilizer formula, disjointness and cover of g*.
pub fn partition_check(g: &LieAlgebra, part: &OrbitPartition) -> Outcome {
    let q = g.p() as u64;
    let total = q.pow(g.dim() as u32);
    let mut ok = true;
    let mut sum = 0u64;
    for (i, o) in part.orbits().iter().enumerate() {
        ok &= o.size() == q.pow((g.dim() - o.stab_dim()) as u32);
        ok &= o.elements().iter().all(|&c| part.orbit_index(c) == i);
        sum += o.size();
    }
    ok &= sum == total;
    Outcome::new(
        ok,
        format!("{} orbits covering {sum} of {total} functionals; sizes {}", part.len(), size_histogram(part.orbits().iter().map(|o| o.size()))),
    )
}

/// Polarization certificates and Lagrangian fibers for every functional,
/// once per witness choice.
pub fn polarization_check(g: &LieAlgebra, budget: u64, choices: &[WitnessChoice]) -> Result<Outcome> {
    let count = g.check_budget(budget)?;
    let mut failures = Vec::new();
    for code in 0..count {
        let lambda = DualVector::from_code(g, code);
        for &choice in choices {
            let pol = polarize_with(g, &lambda, choice)?;
            let certified = check_polarization(g, &lambda, pol.span()).all();
            match verify_lagrangian_fiber(g, &pol).map(|r| r.ok()) {
                Ok(true) if certified => {}
                Ok(_) | Err(Error::Invariant(_)) => failures.push(label(lambda.coords())),
                Err(e) => return Err(e),
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("{count} functionals certified under {} witness choice(s)", choices.len())
    } else {
        format!("failed at {}", failures.join(" "))
    };
    Ok(Outcome::new(failures.is_empty(), detail))
}

/// One explicit irreducible per orbit, induced from each witness choice.
pub struct OracleIrreducibles {
    pub first: Vec<MonomialRep>,
    pub last: Vec<MonomialRep>,
    pub first_chars: Vec<ClassFunction>,
    pub last_chars: Vec<ClassFunction>,
}

pub fn oracle_irreducibles(group: &Group, part: &OrbitPartition) -> Result<OracleIrreducibles> {
    let g = group.algebra();
    let mut out = OracleIrreducibles {
        first: Vec::new(),
        last: Vec::new(),
        first_chars: Vec::new(),
        last_chars: Vec::new(),
    };
    for o in part.orbits() {
        for (choice, reps, chars) in [
            (WitnessChoice::First, &mut out.first, &mut out.first_chars),
            (WitnessChoice::Last, &mut out.last, &mut out.last_chars),
        ] {
            let rep = irreducible_rep(group, &polarize_with(g, o.rep(), choice)?)?;
            chars.push(trace_character(&rep, g)?);
            reps.push(rep);
        }
    }
    Ok(out)
}

/// Orbit-sum characters against traces of induced representations, on every element.
pub fn character_formula_check(g: &LieAlgebra, part: &OrbitPartition, oracle: &OracleIrreducibles) -> Result<Outcome> {
    let mut bad = Vec::new();
    for (o, chi) in part.orbits().iter().zip(&oracle.first_chars) {
        if kirillov_character(g, o)? != *chi {
            bad.push(label(o.rep().coords()));
        }
    }
    let detail = if bad.is_empty() {
        format!("{} characters agree on all {} elements", part.len(), g.order())
    } else {
        format!("mismatch at {}", bad.join(" "))
    };
    Ok(Outcome::new(bad.is_empty(), detail))
}

pub fn degree_check(g: &LieAlgebra, part: &OrbitPartition) -> Result<Outcome> {
    let mut ok = true;
    for o in part.orbits() {
        let chi = kirillov_character(g, o)?;
        let deg = chi.degree().and_then(|d| d.to_integer().try_into().ok());
        ok &= deg == Some(o.sqrt_size(g)) && o.sqrt_size(g) * o.sqrt_size(g) == o.size();
    }
    Ok(Outcome::new(ok, "character degree equals the square root of the orbit size"))
}

pub fn polarization_independence_check(part: &OrbitPartition, oracle: &OracleIrreducibles) -> Outcome {
    let distinct = oracle
        .first
        .iter()
        .zip(&oracle.last)
        .filter(|(a, b)| a.dim() > 1 || b.dim() > 1)
        .count();
    let bad: Vec<String> = part
        .orbits()
        .iter()
        .zip(oracle.first_chars.iter().zip(&oracle.last_chars))
        .filter(|(_, (a, b))| a != b)
        .map(|(o, _)| label(o.rep().coords()))
        .collect();
    Outcome::new(
        bad.is_empty(),
        if bad.is_empty() {
            format!("both witness choices give equal characters on {} orbits ({distinct} non-linear)", part.len())
        } else {
            format!("characters differ at {}", bad.join(" "))
        },
    )
}

pub fn orthonormality_check(g: &LieAlgebra, part: &OrbitPartition) -> Result<Outcome> {
    let chars = part
        .orbits()
        .iter()
        .map(|o| kirillov_character(g, o))
        .collect::<Result<Vec<_>>>()?;
    let mut ok = true;
    for (i, a) in chars.iter().enumerate() {
        for (j, b) in chars.iter().enumerate().skip(i) {
            let ip = inner_product(a, b)?;
            ok &= if i == j { num_traits::One::is_one(&ip) } else { num_traits::Zero::is_zero(&ip) };
        }
    }
    Ok(Outcome::new(ok, format!("{}x{} Gram matrix is the identity", chars.len(), chars.len())))
}

pub fn degree_sum_check(g: &LieAlgebra, part: &OrbitPartition) -> Outcome {
    let sum: u128 = part.orbits().iter().map(|o| o.size() as u128).sum();
    Outcome::new(sum == g.order(), format!("sum of squared degrees {sum}, group order {}", g.order()))
}

pub fn homomorphism_check(group: &Group, oracle: &OracleIrreducibles) -> Result<Outcome> {
    if group.order() > EXHAUSTIVE_PAIR_LIMIT {
        return Ok(Outcome::new(true, format!("skipped: group order {} above {EXHAUSTIVE_PAIR_LIMIT}", group.order())));
    }
    let mut ok = true;
    for rep in oracle.first.iter().chain(&oracle.last) {
        ok &= rep.is_homomorphism(group)?;
    }
    Ok(Outcome::new(ok, format!("{} representations checked on all pairs", 2 * oracle.first.len())))
}

/// Summary of the multiplicity comparison for one subalgebra.
#[derive(Debug, Clone, Serialize)]
pub struct MultiplicitySummary {
    pub pairs: usize,
    pub nonzero: usize,
    pub mismatches: Vec<String>,
    pub frobenius_ok: bool,
    pub sum_rules_ok: bool,
}

/// Orbit multiplicities against the oracle computed on the restriction side
/// and on the induction side, plus the Frobenius formula for induced characters.
/// Support pattern and sum rules are asserted by [`branching_table`].
pub fn multiplicity_summary(
    group: &Group,
    part: &OrbitPartition,
    oracle: &OracleIrreducibles,
    e: &SubalgebraEmbedding,
    budget: u64,
) -> Result<MultiplicitySummary> {
    let g = group.algebra();
    let h = e.sub();
    let table = branching_table(e, budget)?;
    let h_group = Group::new(h, budget)?;
    let h_part = orbit_partition(h, budget)?;
    let restricted = oracle
        .first
        .iter()
        .map(|rep| trace_character(&rep.restrict(e)?, h))
        .collect::<Result<Vec<_>>>()?;
    let mut mismatches = Vec::new();
    let mut nonzero = 0;
    let mut frobenius_ok = true;
    for (i, omega) in h_part.orbits().iter().enumerate() {
        let xi = linear_character(h, &polarize_with(h, omega.rep(), WitnessChoice::First)?)?;
        let small = trace_character(&induce(&xi, &h_group)?, h)?;
        let induced = trace_character(&induce(&xi.pushforward(e)?, group)?, g)?;
        frobenius_ok &= induce_class_function(&small, e, group)? == induced;
        for (j, big) in part.orbits().iter().enumerate() {
            let geometric = table.entries[i][j];
            let via_restriction = multiplicity_oracle(&restricted[j], &small)?;
            let via_induction = multiplicity_oracle(&induced, &oracle.first_chars[j])?;
            if geometric > 0 {
                nonzero += 1;
            }
            if geometric != via_restriction || geometric != via_induction {
                mismatches.push(format!(
                    "omega {} Omega {}: {geometric}/{via_restriction}/{via_induction}",
                    label(omega.rep().coords()),
                    label(big.rep().coords())
                ));
            }
        }
    }
    Ok(MultiplicitySummary {
        pairs: h_part.len() * part.len(),
        nonzero,
        mismatches,
        frobenius_ok,
        sum_rules_ok: table.column_sums_hold() && table.row_sums_hold(),
    })
}

pub fn multiplicity_check(
    group: &Group,
    part: &OrbitPartition,
    oracle: &OracleIrreducibles,
    e: &SubalgebraEmbedding,
    budget: u64,
) -> Result<Outcome> {
    let s = multiplicity_summary(group, part, oracle, e, budget)?;
    let passed = s.mismatches.is_empty() && s.frobenius_ok && s.sum_rules_ok;
    let detail = if passed {
        format!("{} pairs agree three ways, {} nonzero; support and sum rules hold", s.pairs, s.nonzero)
    } else {
        format!(
            "frobenius {}, sum rules {}, mismatches: {}",
            s.frobenius_ok,
            s.sum_rules_ok,
            s.mismatches.join("; ")
        )
    };
    Ok(Outcome::new(passed, detail))
}

/// Summary of the tensor comparison over all unordered pairs of orbits.
#[derive(Debug, Clone, Serialize)]
pub struct TensorSummary {
    pub pairs: usize,
    pub mismatches: Vec<String>,
}

/// Pair counting against traces of explicit tensor products and against the
/// diagonal restriction inside `G × G`.
pub fn tensor_summary(group: &Group, part: &OrbitPartition, oracle: &OracleIrreducibles) -> Result<TensorSummary> {
    let g = group.algebra();
    let n = part.len();
    let mut mismatches = Vec::new();
    let mut pairs = 0;
    for i in 0..n {
        for j in i..n {
            pairs += 1;
            let product = trace_character(&oracle.first[i].tensor(&oracle.first[j])?, g)?;
            let mut counted = vec![0u64; n];
            for (o, m) in tensor_decomposition(g, part, i, j)? {
                counted[part.orbit_index(o.rep_code())] = m;
            }
            for k in 0..n {
                let traced = multiplicity_oracle(&product, &oracle.first_chars[k])?;
                let diagonal =
                    tensor_multiplicity_via_diagonal(g, &part.orbits()[k], &part.orbits()[i], &part.orbits()[j])?;
                if counted[k] != traced || counted[k] != diagonal {
                    mismatches.push(format!(
                        "{} x {} -> {}: {}/{traced}/{diagonal}",
                        label(part.orbits()[i].rep().coords()),
                        label(part.orbits()[j].rep().coords()),
                        label(part.orbits()[k].rep().coords()),
                        counted[k]
                    ));
                }
            }
        }
    }
    Ok(TensorSummary { pairs, mismatches })
}

pub fn tensor_check(group: &Group, part: &OrbitPartition, oracle: &OracleIrreducibles) -> Result<Outcome> {
    if group.order() > EXHAUSTIVE_PAIR_LIMIT {
        return Ok(Outcome::new(true, format!("skipped: group order {} above {EXHAUSTIVE_PAIR_LIMIT}", group.order())));
    }
    let s = tensor_summary(group, part, oracle)?;
    Ok(Outcome::new(
        s.mismatches.is_empty(),
        if s.mismatches.is_empty() {
            format!("{} pairs agree with traced tensor products and the diagonal reduction", s.pairs)
        } else {
            s.mismatches.join("; ")
        },
    ))
}

/// Every codimension-one subalgebra is an ideal.
pub fn hyperplane_check(g: &LieAlgebra) -> Outcome {
    if g.dim() > HYPERPLANE_SCAN_DIM {
        return Outcome::new(true, format!("skipped: dimension {} above {HYPERPLANE_SCAN_DIM}", g.dim()));
    }
    let subs = codim_one_subalgebras(g);
    let ok = subs.iter().all(|s| g.normalizes(&g.whole(), s));
    Outcome::new(ok, format!("{} codimension-one subalgebras, all ideals", subs.len()))
}

/// Chains of codimension-one ideals down to each subalgebra.
pub fn chain_check(g: &LieAlgebra, subs: &[SubalgebraEmbedding]) -> Result<Outcome> {
    let mut steps = 0;
    for e in subs {
        let chain = ideal_chain_spaces(g, e.span())?;
        steps += chain.len() - 1;
    }
    Ok(Outcome::new(true, format!("{} chains, {steps} steps verified", subs.len())))
}

/// Projection dichotomy for every functional on every codimension-one subalgebra.
pub fn dichotomy_check(g: &LieAlgebra, budget: u64) -> Result<Outcome> {
    if g.dim() > HYPERPLANE_SCAN_DIM {
        return Ok(Outcome::new(true, format!("skipped: dimension {} above {HYPERPLANE_SCAN_DIM}", g.dim())));
    }
    g.check_budget(budget)?;
    let mut instances = 0;
    let mut bad = 0;
    for s in codim_one_subalgebras(g) {
        let e = SubalgebraEmbedding::new(g, s)?;
        let h = e.sub();
        let enc = Encoder::new(h.p(), h.dim());
        for code in 0..enc.count().expect("within budget") {
            instances += 1;
            if !projection_dichotomy(&DualVector::from_code(h, code), &e)?.consistent() {
                bad += 1;
            }
        }
    }
    Ok(Outcome::new(bad == 0, format!("{instances} instances, {bad} inconsistent")))
}

/// Runs the whole suite on g and the given subalgebras.
pub fn run(g: &LieAlgebra, subs: &[SubalgebraEmbedding], budget: u64) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    let mut push = |name: String, outcome: Result<Outcome>| -> Result<()> {
        checks.push(Check {
            name,
            outcome: capture(outcome)?,
        });
        Ok(())
    };
    let part = orbit_partition(g, budget)?;
    let group = Group::new(g, budget)?;
    push("orbit_partition".into(), Ok(partition_check(g, &part)))?;
    push(
        "polarization".into(),
        polarization_check(g, budget, &[WitnessChoice::First, WitnessChoice::Last]),
    )?;
    let oracle = oracle_irreducibles(&group, &part)?;
    push("homomorphism".into(), homomorphism_check(&group, &oracle))?;
    push("character_formula".into(), character_formula_check(g, &part, &oracle))?;
    push("degrees".into(), degree_check(g, &part))?;
    push("polarization_independence".into(), Ok(polarization_independence_check(&part, &oracle)))?;
    push("orthonormality".into(), orthonormality_check(g, &part))?;
    push("degree_sum".into(), Ok(degree_sum_check(g, &part)))?;
    push("codim_one_ideals".into(), Ok(hyperplane_check(g)))?;
    push("projection_dichotomy".into(), dichotomy_check(g, budget))?;
    push("ideal_chains".into(), chain_check(g, subs))?;
    for e in subs {
        let names: Vec<String> = e.inclusion().iter().map(|r| label(r)).collect();
        push(
            format!("multiplicity[{}]", names.join(" ")),
            multiplicity_check(&group, &part, &oracle, e, budget),
        )?;
    }
    push("tensor".into(), tensor_check(&group, &part, &oracle))?;
    let passed = checks.iter().all(|c| c.outcome.passed);
    Ok(VerifyReport {
        algebra: g.dump(),
        checks,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_suite_on_ut3() {
        let g = LieAlgebra::ut(3, 3).unwrap();
        let h = SubalgebraEmbedding::new(
            &g,
            crate::linalg::Subspace::span(g.field(), 3, &[vec![0, 1, 0], vec![0, 0, 1]]),
        )
        .unwrap();
        let report = run(&g, &[h], 1_000_000).unwrap();
        for c in &report.checks {
            assert!(c.outcome.passed, "{}: {}", c.name, c.outcome.detail);
        }
        assert!(report.passed);
        assert_eq!(report.checks.len(), 13);
    }

    #[test]
    fn invariant_failures_are_recorded() {
        let out = capture(Err(Error::Invariant("boom".into()))).unwrap();
        assert!(!out.passed);
        assert!(capture(Err(Error::BudgetExceeded { required: 1, budget: 0 })).is_err());
    }

    #[test]
    fn partition_detail_on_ut3() {
        let g = LieAlgebra::ut(3, 3).unwrap();
        let part = orbit_partition(&g, 1000).unwrap();
        let out = partition_check(&g, &part);
        assert!(out.passed);
        assert_eq!(out.detail, "11 orbits covering 27 of 27 functionals; sizes 9x1 2x9");
    }
}
