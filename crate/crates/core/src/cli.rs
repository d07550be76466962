//! Command-line front end. [`run`] takes the argument list and two sinks so
//! it can be driven from tests; the binary only forwards `std::env`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bounds::{bounds_table, table_csv, table_json, table_text};
use crate::certify::{lemma_diag_certificate, p_matrix_certificate, t_code_certificate, MatrixCertificate};
use crate::constructions::{construct_by_name, t_lower_augmented, t_lower_even, Alphabet, PointSet, CONSTRUCTION_NAMES};
use crate::error::{Error, Result};
use crate::fqlin::VectorFile;
use crate::predicates::{Property, ScanOutcome};
use crate::reproduce::{parse_only, reproduce, Config};
use crate::search::{exact_all_right, exact_corner, exact_r, exact_s, exact_t, SearchOptions, Status};

/// Environment variable holding the number of worker threads.
pub const WORKERS_ENV: &str = "ORTHOFREE_WORKERS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "orthofree", version, about = "Orthogonality-free sets over prime fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlphabetArg {
    /// Symbols 1 and 0.
    #[value(name = "01")]
    ZeroOne,
    /// Symbols 1 and -1.
    Pm,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CertKind {
    PMatrix,
    LemmaDiag,
    TCode,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build an explicit set and write it in the vector text format.
    Construct {
        name: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: Option<u32>,
        #[arg(long)]
        k: Option<usize>,
        /// Symbols for the t-lower-* codes.
        #[arg(long, value_enum, default_value = "01")]
        alphabet: AlphabetArg,
        /// Vector file to write; provenance goes next to it as
        /// `<out>.provenance.json`. Without it the set goes to stdout and
        /// the provenance to stderr.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan a vector file for a forbidden configuration.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        property: String,
        #[arg(long)]
        k: Option<usize>,
        /// Maximum number of examined tuples.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Tabulate every bound formula for a property.
    Bounds {
        #[arg(long)]
        property: String,
        /// A value (`5`), a range (`1..10`) or a list (`2,5,8`).
        #[arg(long)]
        n: String,
        /// Comma-separated moduli.
        #[arg(long, default_value = "3")]
        q: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Build and check a polynomial-method certificate for a vector file.
    Certify {
        #[arg(value_enum)]
        kind: CertKind,
        #[arg(long)]
        input: PathBuf,
        /// Common norm, for lemma-diag.
        #[arg(long)]
        alpha: Option<u32>,
        /// Comma-separated allowed dot products, for lemma-diag.
        #[arg(long)]
        r: Option<String>,
    },
    /// Exact maximum by branch and bound.
    Search {
        /// R, S, T, all-right or corner.
        quantity: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        k: Option<usize>,
        /// Maximum number of search nodes.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        sequential: bool,
        /// Do not fix vertex 0 on symmetric instances.
        #[arg(long)]
        no_anchor: bool,
        /// Where to write the witness in the vector text format.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance grid and write a report with a manifest.
    Reproduce {
        /// Criterion ids or keys, comma-separated.
        #[arg(long)]
        only: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Let searches explore root branches in parallel.
        #[arg(long)]
        parallel: bool,
    },
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    if let Err(e) = configure_workers() {
        let _ = writeln!(err, "error: {e}");
        return EXIT_USAGE;
    }
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn configure_workers() -> Result<()> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Domain(format!("{WORKERS_ENV}={raw:?} is not a positive integer")))?;
    // a pool built earlier in this process wins; that is fine
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Construct { name, n, q, k, alphabet, out: path } => construct(&name, n, q, k, alphabet, path, out, err),
        Command::Verify { input, property, k, budget } => verify(&input, &property, k, budget, out),
        Command::Bounds { property, n, q, k, format } => bounds(&property, &n, &q, k, format, out),
        Command::Certify { kind, input, alpha, r } => certify(kind, &input, alpha, r.as_deref(), out),
        Command::Search { quantity, n, q, k, budget, sequential, no_anchor, out: path } => {
            let opts = SearchOptions { budget, sequential, anchor: !no_anchor };
            search(&quantity, n, q, k, opts, path, out)
        }
        Command::Reproduce { only, out: dir, parallel } => reproduce_cmd(only.as_deref(), dir, !parallel, out, err),
    }
}

fn print_json(out: &mut dyn Write, v: &serde_json::Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

fn read_vectors(path: &Path) -> Result<VectorFile> {
    std::fs::read_to_string(path)?.parse()
}

#[allow(clippy::too_many_arguments)]
fn construct(
    name: &str,
    n: usize,
    q: Option<u32>,
    k: Option<usize>,
    alphabet: AlphabetArg,
    path: Option<PathBuf>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let ps = match (name, alphabet) {
        (_, AlphabetArg::ZeroOne) => construct_by_name(name, n, q, k)?,
        ("t-lower-even" | "t-lower-augmented", AlphabetArg::Pm) => {
            let q = q.ok_or_else(|| Error::Domain(format!("{name} needs --q")))?;
            let pm = Alphabet::plus_minus_one(q);
            if name == "t-lower-even" {
                t_lower_even(n, q, pm)?
            } else {
                t_lower_augmented(n, q, pm)?
            }
        }
        _ if CONSTRUCTION_NAMES.contains(&name) => {
            return Err(Error::Domain(format!("--alphabet applies to t-lower-* only, not {name}")))
        }
        _ => return Err(Error::Unknown { what: "construction", name: name.to_string() }),
    };
    let provenance = serde_json::to_string_pretty(&ps.provenance_json())? + "\n";
    match path {
        Some(path) => {
            std::fs::write(&path, ps.to_vector_file().render())?;
            let mut side = path.clone().into_os_string();
            side.push(".provenance.json");
            std::fs::write(side, provenance)?;
        }
        None => {
            out.write_all(ps.to_vector_file().render().as_bytes())?;
            err.write_all(provenance.as_bytes())?;
        }
    }
    Ok(EXIT_OK)
}

fn verify(input: &Path, property: &str, k: Option<usize>, budget: Option<u64>, out: &mut dyn Write) -> Result<i32> {
    let property = Property::parse(property, k)?;
    let file = read_vectors(input)?;
    let size = file.vectors.len();
    let ps = PointSet::from_file(file, property);
    let outcome = ps.scan(budget)?;
    let (status, code, extra) = match &outcome {
        ScanOutcome::Ok => ("ok", EXIT_OK, json!(null)),
        ScanOutcome::Violation(v) => ("violation", EXIT_VIOLATION, v.to_json()),
        ScanOutcome::BudgetExceeded { examined } => ("budget-exhausted", EXIT_BUDGET, json!(examined.to_string())),
    };
    let mut body = json!({
        "schema": 1,
        "property": property.tag(),
        "k": property.k().map(|k| k.to_string()),
        "size": size.to_string(),
        "status": status,
    });
    match outcome {
        ScanOutcome::Violation(_) => body["violation"] = extra,
        ScanOutcome::BudgetExceeded { .. } => body["examined"] = extra,
        ScanOutcome::Ok => {}
    }
    print_json(out, &body)?;
    Ok(code)
}

/// `5`, `1..10`, `1..=10`, `1-10` or `2,5,8`.
fn parse_ns(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Parse(format!("bad n specification {s:?}"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let range = s.split_once("..=").or_else(|| s.split_once("..")).or_else(|| s.split_once('-'));
    if let Some((a, b)) = range {
        return Ok((num(a)?..=num(b)?).collect());
    }
    s.split(',').map(num).collect()
}

fn parse_list_u32(s: &str) -> Result<Vec<u32>> {
    s.split(',').map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad number {t:?} in {s:?}")))).collect()
}

fn bounds(property: &str, n: &str, q: &str, k: Option<usize>, format: Format, out: &mut dyn Write) -> Result<i32> {
    let property = Property::parse(property, k)?;
    let ns = parse_ns(n)?;
    let qs = parse_list_u32(q)?;
    let rows = bounds_table(property, ns, &qs)?;
    match format {
        Format::Csv => out.write_all(table_csv(&rows).as_bytes())?,
        Format::Json => print_json(out, &table_json(&rows))?,
        Format::Text => out.write_all(table_text(&rows).as_bytes())?,
    }
    Ok(EXIT_OK)
}

fn matrix_json(kind: &str, c: &MatrixCertificate) -> serde_json::Value {
    json!({
        "schema": 1,
        "certificate": kind,
        "size": c.size.to_string(),
        "rank": c.rank.to_string(),
        "matrix_digest": c.matrix.digest(),
        "clauses": c.clauses().iter().map(|c| c.to_json()).collect::<Vec<_>>(),
    })
}

fn certify(kind: CertKind, input: &Path, alpha: Option<u32>, r: Option<&str>, out: &mut dyn Write) -> Result<i32> {
    let file = read_vectors(input)?;
    let (body, passed) = match kind {
        CertKind::PMatrix => {
            let c = p_matrix_certificate(&PointSet::from_file(file, Property::SelfOrthDiff))?;
            (matrix_json("p-matrix", &c), c.is_identity() && c.full_rank())
        }
        CertKind::TCode => {
            let c = t_code_certificate(&PointSet::from_file(file, Property::DivisibleHamming))?;
            (matrix_json("t-code", &c), c.is_identity() && c.full_rank())
        }
        CertKind::LemmaDiag => {
            let alpha = alpha.ok_or_else(|| Error::Domain("lemma-diag needs --alpha".into()))?;
            let values = parse_list_u32(r.ok_or_else(|| Error::Domain("lemma-diag needs --r".into()))?)?;
            let c = lemma_diag_certificate(file.field, file.n, &file.vectors, alpha, &values)?;
            let body = json!({
                "schema": 1,
                "certificate": "lemma-diag",
                "size": c.size.to_string(),
                "bound": c.bound.to_string(),
                "rank": crate::certify::rank_gf(&c.matrix).to_string(),
                "matrix_digest": c.matrix.digest(),
                "clauses": c.clauses.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
            });
            (body, c.passed())
        }
    };
    print_json(out, &body)?;
    Ok(if passed { EXIT_OK } else { EXIT_VIOLATION })
}

fn search(
    quantity: &str,
    n: usize,
    q: u32,
    k: Option<usize>,
    opts: SearchOptions,
    path: Option<PathBuf>,
    out: &mut dyn Write,
) -> Result<i32> {
    let result = match quantity {
        "R" => exact_r(n, q, opts)?,
        "S" => exact_s(n, q, opts)?,
        "T" => exact_t(n, q, opts)?,
        "all-right" => exact_all_right(n, q, opts)?,
        "corner" => {
            let k = k.ok_or_else(|| Error::Domain("corner search needs --k".into()))?;
            exact_corner(n, q, k, opts)?
        }
        other => return Err(Error::Unknown { what: "search quantity", name: other.to_string() }),
    };
    if let Some(path) = path {
        std::fs::write(path, result.witness.to_vector_file().render())?;
    }
    print_json(out, &result.to_json())?;
    Ok(match result.status {
        Status::ProvenOptimal => EXIT_OK,
        Status::BudgetExhausted => EXIT_BUDGET,
    })
}

fn reproduce_cmd(
    only: Option<&str>,
    dir: Option<PathBuf>,
    sequential: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let only = only.map(parse_only).transpose()?;
    let rep = reproduce(&Config { only, sequential })?;
    out.write_all(rep.report_text().as_bytes())?;
    for r in &rep.reports {
        writeln!(err, "criterion {} [{}]: {:.3}s", r.criterion.id, r.criterion.key, r.elapsed.as_secs_f64())?;
    }
    if let Some(dir) = dir {
        rep.write_to(&dir)?;
    }
    Ok(if rep.all_passed() { EXIT_OK } else { EXIT_VIOLATION })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("orthofree").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn n_specs() {
        assert_eq!(parse_ns("5").unwrap(), [5]);
        assert_eq!(parse_ns("1..3").unwrap(), [1, 2, 3]);
        assert_eq!(parse_ns("2-4").unwrap(), [2, 3, 4]);
        assert_eq!(parse_ns("2,7").unwrap(), [2, 7]);
        assert!(parse_ns("x").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&[]).0, EXIT_USAGE);
        assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(call(&["construct", "s3-exact"]).0, EXIT_USAGE);
        let (code, _, err) = call(&["construct", "s3-exact", "--n", "4"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("n ≡ 2 mod 3 required"), "{err}");
        assert_eq!(call(&["reproduce", "--only", "42"]).0, EXIT_USAGE);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn construct_to_stdout() {
        let (code, out, err) = call(&["construct", "corner-free", "--n", "8", "--q", "3", "--k", "2"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 5);
        assert!(out.starts_with("q=3 n=8\n"));
        assert!(err.contains("\"construction\": \"corner-free\""));
    }
}
