//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Tests run one at a time behind a lock so that the pinned time limits
//! measure each criterion alone.

use std::collections::BTreeMap;
use std::io::Write;
use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use orbitkit::cli::heisenberg;
use orbitkit::cli::verify::{
    character_formula_check, degree_check, degree_sum_check, multiplicity_summary, oracle_irreducibles,
    orthonormality_check, partition_check, polarization_check, polarization_independence_check, tensor_summary,
};
use orbitkit::coadjoint::{orbit_partition, projection_dichotomy, DichotomyCase, DualVector};
use orbitkit::field::PrimeField;
use orbitkit::linalg::Subspace;
use orbitkit::polarization::{polarize_with, WitnessChoice};
use orbitkit::nilalg::{codim_one_subalgebras, ideal_chain_spaces, LieAlgebra, NilMatrix, SubalgebraEmbedding};
use orbitkit::repox::Group;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const BUDGET: u64 = 20_000_000;

const PARTITION_LIMIT: Duration = Duration::from_secs(1);
const POLARIZATION_LIMIT: Duration = Duration::from_secs(10);
const CHARACTER_LIMIT: Duration = Duration::from_secs(30);
const CHARACTER_THEORY_LIMIT: Duration = Duration::from_secs(30);
const MULTIPLICITY_LIMIT: Duration = Duration::from_secs(120);
const TENSOR_LIMIT: Duration = Duration::from_secs(120);
const LEMMA_LIMIT: Duration = Duration::from_secs(60);
const MIN_DICHOTOMY_INSTANCES: usize = 20;
const DETERMINISM_RUNS: usize = 3;

static SERIAL: Mutex<()> = Mutex::new(());

fn report(criterion: u32, name: &str, passed: bool, detail: &str) {
    let line = format!(
        "{} criterion {criterion} ({name}): {detail}\n",
        if passed { "PASS" } else { "FAIL" }
    );
    // bypasses the test harness capture so the line always shows
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    assert!(passed, "criterion {criterion} failed: {detail}");
}

fn within(elapsed: Duration, limit: Duration) -> (bool, String) {
    (elapsed <= limit, format!("{:.2}s of {:.0}s", elapsed.as_secs_f64(), limit.as_secs_f64()))
}

fn el(p: u32, n: usize, i: usize, j: usize) -> NilMatrix {
    NilMatrix::elementary(PrimeField::new(p).unwrap(), n, i, j).unwrap()
}

fn sub(g: &LieAlgebra, gens: &[NilMatrix]) -> SubalgebraEmbedding {
    SubalgebraEmbedding::generated_by(g, gens).unwrap()
}

/// `(name, algebra, expected orbit count, expected size histogram)`; the
/// counts come from a brute-force enumeration over the full group.
type CorpusEntry = (&'static str, LieAlgebra, usize, Vec<(u64, usize)>);

fn partition_corpus() -> Vec<CorpusEntry> {
    vec![
        ("ut(3,F3)", LieAlgebra::ut(3, 3).unwrap(), 11, vec![(1, 9), (9, 2)]),
        ("ut(3,F5)", LieAlgebra::ut(5, 3).unwrap(), 29, vec![(1, 25), (25, 4)]),
        ("ut(4,F5)", LieAlgebra::ut(5, 4).unwrap(), 265, vec![(1, 125), (25, 120), (625, 20)]),
        ("heisenberg(4,F5)", heisenberg(5, 4).unwrap(), 629, vec![(1, 625), (625, 4)]),
        ("heisenberg(5,F3)", heisenberg(3, 5).unwrap(), 731, vec![(1, 729), (729, 2)]),
    ]
}

#[test]
fn criterion_1_orbit_partition() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let corpus = partition_corpus();
    let start = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, g, count, hist) in &corpus {
        let part = orbit_partition(g, BUDGET).unwrap();
        let check = partition_check(g, &part);
        let mut seen: BTreeMap<u64, usize> = BTreeMap::new();
        for o in part.orbits() {
            *seen.entry(o.size()).or_default() += 1;
        }
        let expected: BTreeMap<u64, usize> = hist.iter().copied().collect();
        let sum: u64 = part.orbits().iter().map(|o| o.size()).sum();
        let good = check.passed && part.len() == *count && seen == expected && sum as u128 == g.order();
        ok &= good;
        notes.push(format!("{name} {} orbits", part.len()));
    }
    let (fast, timing) = within(start.elapsed(), PARTITION_LIMIT);
    report(1, "orbit partition", ok && fast, &format!("{}; {timing}", notes.join(", ")));
}

#[test]
fn criterion_2_polarization_certificates() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let corpus = partition_corpus();
    let start = Instant::now();
    let mut ok = true;
    let mut total = 0u64;
    for (name, g, _, _) in &corpus {
        let out = polarization_check(g, BUDGET, &[WitnessChoice::First]).unwrap();
        if !out.passed {
            eprintln!("{name}: {}", out.detail);
        }
        ok &= out.passed;
        total += g.order() as u64;
    }
    let (fast, timing) = within(start.elapsed(), POLARIZATION_LIMIT);
    report(
        2,
        "polarization certificates",
        ok && fast,
        &format!("{total} functionals; {timing}"),
    );
}

#[test]
fn criterion_3_character_formula() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for p in [3, 5] {
        let g = LieAlgebra::ut(p, 3).unwrap();
        let group = Group::new(&g, BUDGET).unwrap();
        let part = orbit_partition(&g, BUDGET).unwrap();
        let oracle = oracle_irreducibles(&group, &part).unwrap();
        let out = character_formula_check(&g, &part, &oracle).unwrap();
        ok &= out.passed;
        notes.push(format!("ut(3,F{p}) {}", out.detail));
    }
    let (fast, timing) = within(start.elapsed(), CHARACTER_LIMIT);
    report(3, "character formula", ok && fast, &format!("{}; {timing}", notes.join(", ")));
}

#[test]
fn criterion_4_character_theory() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let g = LieAlgebra::ut(5, 3).unwrap();
    let group = Group::new(&g, BUDGET).unwrap();
    let part = orbit_partition(&g, BUDGET).unwrap();
    let oracle = oracle_irreducibles(&group, &part).unwrap();
    let degrees = degree_check(&g, &part).unwrap();
    let independence = polarization_independence_check(&part, &oracle);
    // the non-linear orbits must actually exercise two different polarizations
    let two_polarizations = part
        .orbits()
        .iter()
        .filter(|o| o.size() > 1)
        .all(|o| {
            let a = polarize_with(&g, o.rep(), WitnessChoice::First).unwrap();
            let b = polarize_with(&g, o.rep(), WitnessChoice::Last).unwrap();
            a.span() != b.span()
        });
    let gram = orthonormality_check(&g, &part).unwrap();
    let sum = degree_sum_check(&g, &part);
    let ok = degrees.passed && independence.passed && two_polarizations && gram.passed && sum.passed;
    let (fast, timing) = within(start.elapsed(), CHARACTER_THEORY_LIMIT);
    report(
        4,
        "degrees, polarization independence, orthonormality, degree sum",
        ok && fast,
        &format!("ut(3,F5): {}; {}; {}; {timing}", independence.detail, gram.detail, sum.detail),
    );
}

#[test]
fn criterion_5_multiplicity_three_ways() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let p = 3;
    let g = LieAlgebra::ut(p, 3).unwrap();
    let group = Group::new(&g, BUDGET).unwrap();
    let part = orbit_partition(&g, BUDGET).unwrap();
    let oracle = oracle_irreducibles(&group, &part).unwrap();
    let diagonal_line = el(p, 3, 1, 2).add(&el(p, 3, 2, 3)).unwrap();
    let corpus: Vec<(&str, SubalgebraEmbedding)> = vec![
        ("center", SubalgebraEmbedding::new(&g, g.center()).unwrap()),
        ("span{E12,E13}", sub(&g, &[el(p, 3, 1, 2), el(p, 3, 1, 3)])),
        ("span{E23,E13}", sub(&g, &[el(p, 3, 2, 3), el(p, 3, 1, 3)])),
        ("trivial", SubalgebraEmbedding::trivial(&g)),
        ("whole", SubalgebraEmbedding::whole(&g)),
        ("span{E12}", sub(&g, &[el(p, 3, 1, 2)])),
        ("span{E12+E23}", sub(&g, &[diagonal_line])),
    ];
    assert_eq!(corpus[1].1.sub().dim(), 2);
    assert_eq!(corpus[2].1.codim(), 1);
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, e) in &corpus {
        let s = multiplicity_summary(&group, &part, &oracle, e, BUDGET).unwrap();
        let good = s.mismatches.is_empty() && s.frobenius_ok && s.sum_rules_ok;
        if !good {
            eprintln!("{name}: {:?}", s.mismatches);
        }
        ok &= good;
        notes.push(format!("{name} {}/{}", s.nonzero, s.pairs));
    }
    let (fast, timing) = within(start.elapsed(), MULTIPLICITY_LIMIT);
    report(
        5,
        "restriction = oracle restriction = oracle induction",
        ok && fast,
        &format!("nonzero/pairs: {}; {timing}", notes.join(", ")),
    );
}

#[test]
fn criterion_6_tensor_products() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let g = LieAlgebra::ut(3, 3).unwrap();
    let group = Group::new(&g, BUDGET).unwrap();
    let part = orbit_partition(&g, BUDGET).unwrap();
    let oracle = oracle_irreducibles(&group, &part).unwrap();
    let s = tensor_summary(&group, &part, &oracle).unwrap();
    let ok = s.mismatches.is_empty() && s.pairs == 66;
    let (fast, timing) = within(start.elapsed(), TENSOR_LIMIT);
    report(
        6,
        "tensor products",
        ok && fast,
        &format!("{} pairs against traced products and the diagonal reduction; {timing}", s.pairs),
    );
}

/// `span{E12, E23 + E34, E13, E14}`: the 4-dimensional filiform algebra.
fn filiform(p: u32) -> LieAlgebra {
    LieAlgebra::build(p, 4, &[el(p, 4, 1, 2), el(p, 4, 2, 3).add(&el(p, 4, 3, 4)).unwrap()]).unwrap()
}

#[test]
fn criterion_7_lemma_checks() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();

    // codimension-one subalgebras are ideals
    let small = vec![
        LieAlgebra::ut(3, 3).unwrap(),
        LieAlgebra::ut(5, 3).unwrap(),
        filiform(5),
        sub(&LieAlgebra::ut(5, 4).unwrap(), &[el(5, 4, 1, 2), el(5, 4, 2, 4)]).sub().clone(),
    ];
    let mut hyperplanes = 0;
    let mut ideals_ok = true;
    for g in &small {
        assert!(g.dim() <= 4);
        for s in codim_one_subalgebras(g) {
            hyperplanes += 1;
            ideals_ok &= g.normalizes(&g.whole(), &s);
        }
    }

    // chains of codimension-one ideals
    let ut4 = LieAlgebra::ut(5, 4).unwrap();
    let chain_targets = vec![
        SubalgebraEmbedding::trivial(&ut4),
        SubalgebraEmbedding::new(&ut4, ut4.center()).unwrap(),
        sub(&ut4, &[el(5, 4, 1, 2)]),
        sub(&ut4, &[el(5, 4, 2, 3)]),
        sub(&ut4, &[el(5, 4, 1, 2), el(5, 4, 3, 4)]),
        sub(&ut4, &[el(5, 4, 1, 4), el(5, 4, 2, 4), el(5, 4, 3, 4)]),
        sub(&ut4, &[el(5, 4, 1, 2), el(5, 4, 1, 3), el(5, 4, 1, 4)]),
        sub(&ut4, &[el(5, 4, 2, 3), el(5, 4, 1, 3), el(5, 4, 2, 4), el(5, 4, 1, 4)]),
    ];
    let mut chain_steps = 0;
    let mut chains_ok = true;
    for e in &chain_targets {
        match ideal_chain_spaces(&ut4, e.span()) {
            Ok(chain) => {
                chain_steps += chain.len() - 1;
                chains_ok &= chain.len() == e.codim() + 1;
                for w in chain.windows(2) {
                    chains_ok &= w[0].dim() == w[1].dim() + 1
                        && w[1].is_subspace_of(&w[0])
                        && ut4.normalizes(&w[0], &w[1]);
                }
            }
            Err(_) => chains_ok = false,
        }
    }

    // projection dichotomy on random codimension-one instances
    let algebras = [
        LieAlgebra::ut(3, 3).unwrap(),
        LieAlgebra::ut(5, 3).unwrap(),
        LieAlgebra::ut(5, 4).unwrap(),
        filiform(5),
        heisenberg(5, 4).unwrap(),
    ];
    let mut rng = StdRng::seed_from_u64(20);
    let mut instances = 0;
    let mut cases: BTreeMap<String, usize> = BTreeMap::new();
    let mut dichotomy_ok = true;
    for _ in 0..40 {
        let g = &algebras[rng.gen_range(0..algebras.len())];
        let hyper = codim_one_subalgebras(g);
        let s: Subspace = hyper[rng.gen_range(0..hyper.len())].clone();
        let e = SubalgebraEmbedding::new(g, s).unwrap();
        let coords: Vec<i64> = (0..e.sub().dim()).map(|_| rng.gen_range(0..g.p() as i64)).collect();
        let lambda0 = DualVector::new(e.sub(), &coords).unwrap();
        let r = projection_dichotomy(&lambda0, &e).unwrap();
        dichotomy_ok &= r.consistent();
        let key = match r.case {
            DichotomyCase::StabilizerInside => "inside",
            DichotomyCase::StabilizerOutside => "outside",
        };
        *cases.entry(key.to_string()).or_default() += 1;
        instances += 1;
    }
    let both_cases = cases.len() == 2;

    let ok = ideals_ok && chains_ok && dichotomy_ok && both_cases && instances >= MIN_DICHOTOMY_INSTANCES;
    let (fast, timing) = within(start.elapsed(), LEMMA_LIMIT);
    report(
        7,
        "ideals, chains, projection dichotomy",
        ok && fast,
        &format!(
            "{hyperplanes} hyperplane subalgebras, {chain_steps} chain steps, {instances} dichotomy instances {cases:?}; {timing}"
        ),
    );
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_orbitkit"))
        .args(args)
        .env_remove("ORBITKIT_BUDGET")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

#[test]
fn criterion_8_determinism() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let dir = tempfile::tempdir().unwrap();
    let jobs: Vec<Vec<&str>> = vec![
        vec!["--p", "3", "orbits"],
        vec!["--p", "3", "orbits", "--elements", "--format", "csv"],
        vec!["--p", "5", "--algebra", "ut4", "orbits"],
        vec!["--p", "3", "character-table"],
        vec!["--p", "3", "character-table", "--approx", "--format", "csv"],
        vec!["--p", "5", "--algebra", "ut4", "polarize", "--lambda", "0,0,0,0,0,1"],
        vec!["--p", "3", "polarize", "--lambda", "0,0,1", "--witness", "last", "--format", "csv"],
        vec!["--p", "3", "branch", "--sub", "E23,E13"],
        vec!["--p", "3", "branch", "--sub", "center", "--format", "csv"],
        vec!["--p", "3", "induce", "--sub", "E12,E13", "--lambda", "0,1"],
        vec!["--p", "3", "tensor"],
        vec!["--p", "3", "tensor", "--lambda", "0,0,1", "--lambda2", "0,0,2", "--format", "csv"],
        vec!["--p", "3", "verify", "--sub", "E23,E13"],
        vec!["--p", "3", "--threads", "1", "verify", "--sub", "center", "--format", "csv"],
    ];
    let mut ok = true;
    let mut failures = Vec::new();
    for (k, job) in jobs.iter().enumerate() {
        let mut outputs = Vec::new();
        for run in 0..DETERMINISM_RUNS {
            let (code, stdout) = run_cli(job);
            let path = dir.path().join(format!("job{k}_{run}"));
            let path_str = path.to_str().unwrap().to_string();
            let mut with_out: Vec<&str> = job.clone();
            with_out.extend(["--out", &path_str]);
            let (code_file, _) = run_cli(&with_out);
            let file = std::fs::read(&path).unwrap_or_default();
            if code != 0 || code_file != 0 || stdout.is_empty() || file != stdout {
                ok = false;
                failures.push(job.join(" "));
            }
            outputs.push(stdout);
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            ok = false;
            failures.push(job.join(" "));
        }
    }
    report(
        8,
        "determinism",
        ok,
        &if failures.is_empty() {
            format!("{} commands x {DETERMINISM_RUNS} runs byte-identical on stdout and --out", jobs.len())
        } else {
            format!("differing: {}", failures.join("; "))
        },
    );
}
