//! Command-line front end: algebra ingestion, dispatch and output.

pub mod verify;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::characters::{character_table, label};
use crate::coadjoint::{orbit, orbit_partition, DualVector};
use crate::error::Error;
use crate::field::PrimeField;
use crate::multiplicity::{
    branching_table, constituents, induction_support, tensor_decomposition, Constituent, OrbitLabel,
};
use crate::nilalg::{AlgebraSpec, LieAlgebra, NilMatrix, SubalgebraEmbedding};
use crate::polarization::{polarize_with, PolarizationRecord, WitnessChoice};

/// Default cap on enumerated dual-space points.
pub const DEFAULT_BUDGET: u64 = 20_000_000;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Engine(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("verification failed")]
    VerifyFailed,
}

impl CliError {
    /// 1 input error, 2 verification failure, 3 budget exceeded.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Engine(Error::BudgetExceeded { .. }) => 3,
            CliError::Engine(Error::Invariant(_)) | CliError::VerifyFailed => 2,
            CliError::Engine(_) | CliError::Input(_) | CliError::Io(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Witness {
    First,
    Last,
}

#[derive(Debug, Parser)]
#[command(name = "orbitkit", version, about = "Coadjoint orbits, characters and multiplicities for unipotent groups over F_p")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Field characteristic, required for presets.
    #[arg(long, global = true)]
    pub p: Option<u32>,
    /// Matrix size for the `ut` and `heisenberg` presets.
    #[arg(long = "N", global = true)]
    pub n: Option<usize>,
    /// Algebra: JSON file, inline JSON, or preset (ut3, ut4, ut5, ut, heisenberg, heisenberg:N).
    #[arg(long, global = true, default_value = "ut3")]
    pub algebra: String,
    /// Cap on the number of enumerated points (q^dim).
    #[arg(long, global = true, env = "ORBITKIT_BUDGET", default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Add floating-point renderings of cyclotomic values.
    #[arg(long, global = true)]
    pub approx: bool,
    /// Worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file (standard output when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coadjoint orbit inventory.
    Orbits {
        /// Include every orbit element.
        #[arg(long)]
        elements: bool,
    },
    /// Kirillov character table.
    CharacterTable,
    /// Polarization of a functional.
    Polarize {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, value_enum, default_value = "first")]
        witness: Witness,
    },
    /// Restriction multiplicities m(ω, Ω) for a subalgebra.
    Branch {
        /// Subalgebra: JSON file, inline JSON, E-names (E23,E13), or center/trivial/whole.
        #[arg(long)]
        sub: String,
    },
    /// Decomposition of ind(t^ω, G) for the H-orbit through a functional on h.
    Induce {
        #[arg(long)]
        sub: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Tensor product decompositions; all pairs when no functionals are given.
    Tensor {
        #[arg(long, allow_hyphen_values = true, requires = "lambda2")]
        lambda: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        lambda2: Option<String>,
    },
    /// Orbit side against explicit induced representations.
    Verify {
        /// Subalgebras for the multiplicity checks (repeatable).
        #[arg(long)]
        sub: Vec<String>,
    },
}

fn parse_json_file_or_inline(text: &str) -> CliResult<Option<serde_json::Value>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return serde_json::from_str(trimmed)
            .map(Some)
            .map_err(|e| CliError::Input(format!("bad inline JSON: {e}")));
    }
    let path = Path::new(text);
    if path.is_file() {
        let content = fs::read_to_string(path)?;
        return serde_json::from_str(&content)
            .map(Some)
            .map_err(|e| CliError::Input(format!("bad JSON in {}: {e}", path.display())));
    }
    Ok(None)
}

fn require_p(p: Option<u32>) -> CliResult<u32> {
    p.ok_or_else(|| CliError::Input("presets need --p".into()))
}

fn elementary_span(p: u32, n: usize, pairs: &[(usize, usize)]) -> CliResult<Vec<NilMatrix>> {
    let field = PrimeField::new(p)?;
    pairs
        .iter()
        .map(|&(i, j)| Ok(NilMatrix::elementary(field, n, i, j)?))
        .collect()
}

/// Heisenberg-type subalgebra of ut(N): first row and last column.
pub fn heisenberg(p: u32, n: usize) -> crate::Result<LieAlgebra> {
    if n < 3 {
        return Err(Error::Shape(format!("heisenberg preset needs N >= 3, got {n}")));
    }
    let field = PrimeField::new(p)?;
    let mut gens = Vec::new();
    for k in 2..n {
        gens.push(NilMatrix::elementary(field, n, 1, k)?);
        gens.push(NilMatrix::elementary(field, n, k, n)?);
    }
    LieAlgebra::build(p, n, &gens)
}

pub fn load_algebra(common: &Common) -> CliResult<LieAlgebra> {
    if let Some(value) = parse_json_file_or_inline(&common.algebra)? {
        let spec: AlgebraSpec =
            serde_json::from_value(value).map_err(|e| CliError::Input(format!("bad algebra spec: {e}")))?;
        if let Some(p) = common.p {
            if p != spec.p {
                return Err(CliError::Input(format!("--p {p} conflicts with the spec's p = {}", spec.p)));
            }
        }
        return Ok(spec.build()?);
    }
    let name = common.algebra.as_str();
    let (preset, arg) = match name.split_once(':') {
        Some((a, b)) => (
            a,
            Some(b.parse::<usize>().map_err(|_| CliError::Input(format!("bad size in preset {name}")))?),
        ),
        None => (name, None),
    };
    let n_from = |default: Option<usize>| -> CliResult<usize> {
        arg.or(common.n)
            .or(default)
            .ok_or_else(|| CliError::Input(format!("preset {preset} needs --N")))
    };
    let p = require_p(common.p)?;
    let g = match preset {
        "ut3" => LieAlgebra::ut(p, 3)?,
        "ut4" => LieAlgebra::ut(p, 4)?,
        "ut5" => LieAlgebra::ut(p, 5)?,
        "ut" => LieAlgebra::ut(p, n_from(None)?)?,
        "heisenberg" => heisenberg(p, n_from(None)?)?,
        other => return Err(CliError::Input(format!("unknown algebra '{other}'"))),
    };
    Ok(g)
}

fn parse_elementary(name: &str) -> Option<(usize, usize)> {
    let digits = name.trim().strip_prefix('E').or_else(|| name.trim().strip_prefix('e'))?;
    if let Some((a, b)) = digits.split_once('_') {
        return Some((a.parse().ok()?, b.parse().ok()?));
    }
    if digits.len() == 2 {
        let mut it = digits.chars();
        let i = it.next()?.to_digit(10)? as usize;
        let j = it.next()?.to_digit(10)? as usize;
        return Some((i, j));
    }
    None
}

fn generator_matrices(g: &LieAlgebra, value: serde_json::Value) -> CliResult<Vec<NilMatrix>> {
    let mats = match value {
        serde_json::Value::Object(mut obj) => obj
            .remove("generators")
            .ok_or_else(|| CliError::Input("subalgebra JSON needs a 'generators' field".into()))?,
        other => other,
    };
    let rows: Vec<Vec<Vec<i64>>> =
        serde_json::from_value(mats).map_err(|e| CliError::Input(format!("bad generator list: {e}")))?;
    rows.iter()
        .map(|m| {
            if m.len() != g.n() {
                return Err(CliError::Input(format!("generator has {} rows, expected {}", m.len(), g.n())));
            }
            Ok(NilMatrix::from_rows(g.field(), m)?)
        })
        .collect()
}

/// Subalgebra of g: JSON generators (file or inline), a list of elementary
/// matrices like `E23,E13` (also `E2_3`), or one of `center`, `trivial`, `whole`.
pub fn load_subalgebra(g: &LieAlgebra, text: &str) -> CliResult<SubalgebraEmbedding> {
    match text.trim() {
        "center" => return Ok(SubalgebraEmbedding::new(g, g.center())?),
        "trivial" => return Ok(SubalgebraEmbedding::trivial(g)),
        "whole" => return Ok(SubalgebraEmbedding::whole(g)),
        _ => {}
    }
    let gens = if let Some(value) = parse_json_file_or_inline(text)? {
        generator_matrices(g, value)?
    } else {
        let pairs = text
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| parse_elementary(s).ok_or_else(|| CliError::Input(format!("cannot parse generator '{s}'"))))
            .collect::<CliResult<Vec<_>>>()?;
        elementary_span(g.p(), g.n(), &pairs)?
    };
    Ok(SubalgebraEmbedding::generated_by(g, &gens)?)
}

pub fn parse_lambda(g: &LieAlgebra, text: &str) -> CliResult<DualVector> {
    let coords = if text.trim().is_empty() {
        Vec::new()
    } else {
        text.split(',')
            .map(|s| s.trim().parse::<i64>().map_err(|_| CliError::Input(format!("bad coordinate '{s}'"))))
            .collect::<CliResult<Vec<_>>>()?
    };
    Ok(DualVector::new(g, &coords)?)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct InductionOutput {
    omega: OrbitLabel,
    index: u64,
    constituents: Vec<Constituent>,
}

#[derive(Serialize)]
struct TensorOutput {
    left: OrbitLabel,
    right: OrbitLabel,
    constituents: Vec<Constituent>,
}

fn label_of(g: &LieAlgebra, o: &crate::coadjoint::Orbit) -> OrbitLabel {
    OrbitLabel {
        rep: o.rep().coords().to_vec(),
        size: o.size(),
        degree: o.sqrt_size(g),
    }
}

fn constituents_csv(header: &str, rows: &[(String, &[Constituent])]) -> String {
    let mut out = format!("{header}orbit_rep,size,degree,multiplicity\n");
    for (prefix, cs) in rows {
        for c in cs.iter() {
            out.push_str(&format!(
                "{prefix}{},{},{},{}\n",
                label(&c.orbit.rep),
                c.orbit.size,
                c.orbit.degree,
                c.multiplicity
            ));
        }
    }
    out
}

/// Runs one command and returns the artifact text.
pub fn execute(cli: &Cli) -> CliResult<String> {
    let common = &cli.common;
    if common.budget == 0 {
        return Err(CliError::Input("--budget must be positive".into()));
    }
    let g = load_algebra(common)?;
    let budget = common.budget;
    let text = match &cli.command {
        Command::Orbits { elements } => {
            let part = orbit_partition(&g, budget)?;
            match common.format {
                Format::Json => to_json(&part.inventory(&g, *elements)),
                Format::Csv => {
                    let mut out = String::from("rep,size,stab_dim\n");
                    for o in part.orbits() {
                        out.push_str(&format!("{},{},{}\n", label(o.rep().coords()), o.size(), o.stab_dim()));
                    }
                    out
                }
            }
        }
        Command::CharacterTable => {
            let table = character_table(&g, budget)?;
            match common.format {
                Format::Json => to_json(&table.to_json(&g, common.approx)),
                Format::Csv => table.to_csv(&g, common.approx),
            }
        }
        Command::Polarize { lambda, witness } => {
            let lambda = parse_lambda(&g, lambda)?;
            let choice = match witness {
                Witness::First => WitnessChoice::First,
                Witness::Last => WitnessChoice::Last,
            };
            let record = PolarizationRecord::new(&g, &polarize_with(&g, &lambda, choice)?);
            match common.format {
                Format::Json => to_json(&record),
                Format::Csv => {
                    let basis: Vec<String> = record.polarization_basis.iter().map(|r| label(r)).collect();
                    format!(
                        "lambda,dim,basis,isotropic,dim_formula,contains_stabilizer\n{},{},{},{},{},{}\n",
                        label(&record.lambda),
                        record.dim,
                        basis.join(" "),
                        record.checks.isotropic,
                        record.checks.dim_formula,
                        record.checks.contains_stabilizer
                    )
                }
            }
        }
        Command::Branch { sub } => {
            let e = load_subalgebra(&g, sub)?;
            let table = branching_table(&e, budget)?;
            match common.format {
                Format::Json => to_json(&json!({
                    "subalgebra_basis": e.inclusion(),
                    "table": table,
                })),
                Format::Csv => table.to_csv(),
            }
        }
        Command::Induce { sub, lambda } => {
            let e = load_subalgebra(&g, sub)?;
            g.check_budget(budget)?;
            let lambda0 = parse_lambda(e.sub(), lambda)?;
            let omega = orbit(e.sub(), &lambda0)?;
            let terms = induction_support(&omega, &e)?;
            let output = InductionOutput {
                omega: label_of(e.sub(), &omega),
                index: (g.p() as u64).pow(e.codim() as u32),
                constituents: constituents(&g, &terms),
            };
            match common.format {
                Format::Json => to_json(&output),
                Format::Csv => constituents_csv("", &[(String::new(), &output.constituents)]),
            }
        }
        Command::Tensor { lambda, lambda2 } => {
            let part = orbit_partition(&g, budget)?;
            let pairs: Vec<(usize, usize)> = match (lambda, lambda2) {
                (Some(a), Some(b)) => {
                    let a = parse_lambda(&g, a)?;
                    let b = parse_lambda(&g, b)?;
                    vec![(part.orbit_index(a.code(&g)), part.orbit_index(b.code(&g)))]
                }
                _ => (0..part.len()).flat_map(|i| (i..part.len()).map(move |j| (i, j))).collect(),
            };
            let outputs = pairs
                .iter()
                .map(|&(i, j)| {
                    Ok(TensorOutput {
                        left: label_of(&g, &part.orbits()[i]),
                        right: label_of(&g, &part.orbits()[j]),
                        constituents: constituents(&g, &tensor_decomposition(&g, &part, i, j)?),
                    })
                })
                .collect::<CliResult<Vec<_>>>()?;
            match common.format {
                Format::Json if outputs.len() == 1 => to_json(&outputs[0]),
                Format::Json => to_json(&json!({ "pairs": outputs })),
                Format::Csv => {
                    let rows: Vec<(String, &[Constituent])> = outputs
                        .iter()
                        .map(|o| (format!("{},{},", label(&o.left.rep), label(&o.right.rep)), o.constituents.as_slice()))
                        .collect();
                    constituents_csv("left,right,", &rows)
                }
            }
        }
        Command::Verify { sub } => {
            let subs = sub
                .iter()
                .map(|s| load_subalgebra(&g, s))
                .collect::<CliResult<Vec<_>>>()?;
            let report = verify::run(&g, &subs, budget)?;
            let text = match common.format {
                Format::Json => to_json(&report),
                Format::Csv => report.to_csv(),
            };
            if !report.passed {
                write_output(common, &text)?;
                return Err(CliError::VerifyFailed);
            }
            text
        }
    };
    Ok(text)
}

fn write_output(common: &Common, text: &str) -> CliResult<()> {
    match &common.out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(k) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("orbitkit: cannot configure thread pool: {e}");
        }
    }
    match execute(&cli).and_then(|text| write_output(&cli.common, &text)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("orbitkit: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> CliResult<String> {
        let cli = Cli::try_parse_from(std::iter::once("orbitkit").chain(args.iter().copied())).unwrap();
        execute(&cli)
    }

    #[test]
    fn orbits_on_ut3() {
        let out = run(&["--p", "3", "orbits"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["orbits"].as_array().unwrap().len(), 11);
    }

    #[test]
    fn polarize_zero_is_whole() {
        let out = run(&["--p", "5", "--algebra", "ut4", "polarize", "--lambda", "0,0,0,0,0,0"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["dim"], 6);
    }

    #[test]
    fn heisenberg_preset() {
        let g = heisenberg(5, 4).unwrap();
        assert_eq!(g.dim(), 5);
        assert_eq!(g.center().dim(), 1);
        let out = run(&["--p", "5", "--algebra", "heisenberg:4", "orbits", "--format", "csv"]).unwrap();
        assert_eq!(out.lines().count(), 1 + 629);
    }

    #[test]
    fn subalgebra_parsing() {
        let g = LieAlgebra::ut(3, 3).unwrap();
        let a = load_subalgebra(&g, "E23,E13").unwrap();
        let b = load_subalgebra(&g, "[[[0,0,0],[0,0,1],[0,0,0]]]").unwrap();
        let c = load_subalgebra(&g, "{\"generators\": [[[0,0,0],[0,0,1],[0,0,0]], [[0,0,1],[0,0,0],[0,0,0]]]}").unwrap();
        assert_eq!(a.span(), c.span());
        assert_eq!(b.sub().dim(), 1);
        assert_eq!(load_subalgebra(&g, "center").unwrap().sub().dim(), 1);
        assert!(matches!(load_subalgebra(&g, "E21"), Err(CliError::Engine(Error::NotStrictlyUpper { .. }))));
        assert!(matches!(load_subalgebra(&g, "F12"), Err(CliError::Input(_))));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(&["orbits"]).unwrap_err().exit_code(), 1);
        assert_eq!(run(&["--p", "4", "orbits"]).unwrap_err().exit_code(), 1);
        assert_eq!(run(&["--p", "5", "--algebra", "ut4", "--budget", "10", "orbits"]).unwrap_err().exit_code(), 3);
        assert_eq!(run(&["--p", "3", "polarize", "--lambda", "1,2"]).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn verification_failures_exit_with_two() {
        assert_eq!(CliError::VerifyFailed.exit_code(), 2);
        assert_eq!(CliError::Engine(Error::Invariant("x".into())).exit_code(), 2);
        assert_eq!(CliError::Engine(Error::NotSubalgebra).exit_code(), 1);
    }

    #[test]
    fn induce_and_tensor() {
        let out = run(&["--p", "3", "induce", "--sub", "E13", "--lambda", "1"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["constituents"][0]["multiplicity"], 3);
        let out = run(&["--p", "3", "tensor", "--lambda", "0,0,1", "--lambda2", "0,0,1"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["constituents"][0]["rep"], json!([0, 0, 2]));
        assert_eq!(v["constituents"][0]["multiplicity"], 3);
        let out = run(&["--p", "3", "tensor", "--format", "csv"]).unwrap();
        assert!(out.starts_with("left,right,orbit_rep,size,degree,multiplicity\n"));
    }

    #[test]
    fn algebra_from_inline_json() {
        let spec = r#"{"p": 5, "N": 3, "generators": [[[0,1,0],[0,0,1],[0,0,0]]]}"#;
        let out = run(&["--algebra", spec, "orbits", "--format", "csv"]).unwrap();
        // a single generator spans an abelian line: five singleton orbits
        assert_eq!(out.lines().count(), 1 + 5);
        assert_eq!(run(&["--p", "3", "--algebra", spec, "orbits"]).unwrap_err().exit_code(), 1);
    }
}
