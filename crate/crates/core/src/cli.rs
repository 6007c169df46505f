//! Command-line front end.
//!
//! Exit codes: 0 feasible or verified, 1 infeasible or failed checks (the
//! certificate or report is on stdout), 2 usage and I/O errors. JSON goes to
//! stdout; a one-line summary goes to stderr.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::access::PairAccessStructure;
use crate::field::PrimeField;
use crate::known::{feasibility_known, synthesize_known, threshold_rs_scheme, verify_known, KnownError, KnownVerdict};
use crate::oracle::{haar_known_scheme, nonstab_unknown_scheme, verify_scheme_numerically, Ancilla};
use crate::qss::{build_qss, validate_structure, verify_qss, SetAccessStructure};
use crate::rscode::build_rs;
use crate::scheme::{EssScheme, SchemeMode};
use crate::summon::summon_feasible;
use crate::unknown::{feasibility_unknown, synthesize_unknown, verify_unknown, UnknownError, UnknownVerdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "ess", version, about = "Entanglement sharing schemes over stabilizer states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Known,
    Unknown,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide feasibility of a pair access structure.
    Validate {
        structure: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Prime local dimension (known partner only).
        #[arg(long, default_value_t = 2)]
        field: u64,
    },
    /// Build a stabilizer scheme for a feasible structure.
    Synthesize {
        structure: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, default_value_t = 2)]
        field: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a scheme against a structure, symbolically and optionally numerically.
    Verify {
        scheme: PathBuf,
        structure: PathBuf,
        #[arg(long)]
        oracle: bool,
    },
    /// The Reed-Solomon threshold scheme where pairs of sizes p and q are authorized.
    Threshold {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the threshold structure.
        #[arg(long)]
        structure: Option<PathBuf>,
    },
    /// Quantum Reed-Solomon code parameters and distances.
    Rscode {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        field: u64,
        #[arg(long)]
        check_distance: bool,
        #[arg(long)]
        brute_force: bool,
    },
    /// Build and check a quantum secret sharing scheme for a set structure.
    Qss {
        structure: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Ring summoning reduced to unknown-partner sharing.
    Summon {
        #[arg(long)]
        ring: usize,
    },
    /// Non-stabilizer reference construction with generic local unitaries.
    Nonstab {
        structure: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Start ancillas maximally mixed instead of in |0> (known partner only).
        #[arg(long)]
        mixed: bool,
    },
}

/// A failure that maps to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

struct Outcome {
    code: i32,
    json: serde_json::Value,
    summary: String,
}

fn read(path: &Path) -> Result<String, UsageError> {
    std::fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), UsageError> {
    std::fs::write(path, text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn load_structure(path: &Path) -> Result<PairAccessStructure, UsageError> {
    PairAccessStructure::from_json_str(&read(path)?).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn known_field(p: u64) -> Result<u64, UsageError> {
    PrimeField::new(p)?;
    Ok(p)
}

fn qubits_only(mode: Mode, field: u64) -> Result<(), UsageError> {
    if mode == Mode::Unknown && field != 2 {
        return Err(UsageError("unknown-partner schemes are built over qubits; drop --field".into()));
    }
    Ok(())
}

fn verdict(code: i32) -> &'static str {
    if code == EXIT_OK {
        "feasible"
    } else {
        "infeasible"
    }
}

fn validate(path: &Path, mode: Mode, field: u64) -> Result<Outcome, UsageError> {
    let s = load_structure(path)?;
    qubits_only(mode, field)?;
    match mode {
        Mode::Known => match feasibility_known(&s, known_field(field)?)? {
            KnownVerdict::Feasible { witnesses } => Ok(Outcome {
                code: EXIT_OK,
                json: json!({
                    "verdict": "feasible",
                    "mode": "known",
                    "p": field,
                    "witnesses": witnesses.iter().map(|(pair, columns, x)| json!({
                        "pair": pair.key(), "columns": columns, "x": x,
                    })).collect::<Vec<_>>(),
                }),
                summary: format!("feasible over F_{field}: {} minimal pairs", witnesses.len()),
            }),
            KnownVerdict::Infeasible(c) => {
                Ok(Outcome { code: EXIT_REJECTED, json: c.to_json(), summary: format!("infeasible: {c}") })
            }
        },
        Mode::Unknown => match feasibility_unknown(&s) {
            UnknownVerdict::Feasible { maximality, components } => Ok(Outcome {
                code: EXIT_OK,
                json: json!({
                    "verdict": "feasible",
                    "mode": "unknown",
                    "maximality": maximality,
                    "components": components.iter().map(|c| json!({
                        "vertices": c.vertices.iter().map(|v| v.key()).collect::<Vec<_>>(),
                        "sides": c.sides,
                    })).collect::<Vec<_>>(),
                }),
                summary: format!("feasible: {} components", components.len()),
            }),
            UnknownVerdict::Infeasible(c) => {
                Ok(Outcome { code: EXIT_REJECTED, json: c.to_json(), summary: format!("infeasible: {c}") })
            }
        },
    }
}

fn synthesize(path: &Path, mode: Mode, field: u64, output: Option<&Path>) -> Result<Outcome, UsageError> {
    let s = load_structure(path)?;
    qubits_only(mode, field)?;
    let built = match mode {
        Mode::Known => match synthesize_known(&s, known_field(field)?) {
            Ok(scheme) => Ok(scheme),
            Err(KnownError::Infeasible(c)) => Err((c.to_json(), c.to_string())),
            Err(e) => return Err(e.into()),
        },
        Mode::Unknown => match synthesize_unknown(&s) {
            Ok(scheme) => Ok(scheme),
            Err(UnknownError::Infeasible(c)) => Err((c.to_json(), c.to_string())),
            Err(e) => return Err(e.into()),
        },
    };
    match built {
        Ok(scheme) => emit_scheme(&scheme, output),
        Err((json, text)) => Ok(Outcome { code: EXIT_REJECTED, json, summary: format!("infeasible: {text}") }),
    }
}

fn emit_scheme(scheme: &EssScheme, output: Option<&Path>) -> Result<Outcome, UsageError> {
    let text = scheme.to_json_string();
    let summary = format!("{} qudits of dimension {}", scheme.group.qudits(), scheme.p());
    match output {
        Some(path) => {
            write(path, &text)?;
            Ok(Outcome {
                code: EXIT_OK,
                json: json!({ "written": path.display().to_string(), "qudits": scheme.group.qudits(), "p": scheme.p() }),
                summary,
            })
        }
        None => Ok(Outcome { code: EXIT_OK, json: serde_json::from_str(&text).expect("valid JSON"), summary }),
    }
}

fn verify(scheme_path: &Path, structure_path: &Path, oracle: bool) -> Result<Outcome, UsageError> {
    let scheme =
        EssScheme::from_json_str(&read(scheme_path)?).map_err(|e| UsageError(format!("{}: {e}", scheme_path.display())))?;
    let s = load_structure(structure_path)?;
    if s.parties() != scheme.parties() {
        return Err(UsageError(format!("scheme has {} parties, structure has {}", scheme.parties(), s.parties())));
    }
    let (symbolic, mut passed) = match scheme.mode {
        SchemeMode::Known => {
            let r = verify_known(&scheme, &s);
            (serde_json::to_value(&r)?, r.passed)
        }
        SchemeMode::Unknown => {
            let r = verify_unknown(&scheme, &s);
            (serde_json::to_value(&r)?, r.passed)
        }
    };
    let mut json = json!({ "symbolic": symbolic });
    if oracle {
        let r = verify_scheme_numerically(&scheme, &s);
        passed &= r.passed;
        json["oracle"] = serde_json::to_value(&r)?;
    }
    json["passed"] = passed.into();
    let code = if passed { EXIT_OK } else { EXIT_REJECTED };
    let summary = format!("{}{}", if passed { "verified" } else { "verification failed" }, if oracle { " (with oracle)" } else { "" });
    Ok(Outcome { code, json, summary })
}

fn threshold(p: usize, q: usize, output: Option<&Path>, structure: Option<&Path>) -> Result<Outcome, UsageError> {
    let (scheme, s) = threshold_rs_scheme(p, q)?;
    if let Some(path) = structure {
        write(path, &s.to_json_string())?;
    }
    emit_scheme(&scheme, output)
}

fn rscode(n: usize, k: usize, r: usize, field: u64, check: bool, brute: bool) -> Result<Outcome, UsageError> {
    let code = build_rs(n, k, r, field, None)?;
    let formula = code.distance(false)?;
    let mut json = json!({
        "n": n, "k": k, "r": r, "p": field,
        "distances": [formula.d_z, formula.d_x, formula.d],
        "tableau": code.code_group()?.to_tableau(),
    });
    let mut ok = true;
    let mut summary = format!("({},{},{})", formula.d_z, formula.d_x, formula.d);
    if check {
        let found = code.distance(brute)?;
        ok = found == formula;
        json["checked"] = json!({ "brute_force": brute, "distances": [found.d_z, found.d_x, found.d], "match": ok });
        summary = format!("({},{},{})", found.d_z, found.d_x, found.d);
    }
    Ok(Outcome { code: if ok { EXIT_OK } else { EXIT_REJECTED }, json, summary })
}

fn qss(path: &Path, output: Option<&Path>) -> Result<Outcome, UsageError> {
    let a = SetAccessStructure::from_json_str(&read(path)?).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    let v = validate_structure(&a);
    if !v.is_ok() {
        return Ok(Outcome {
            code: EXIT_REJECTED,
            json: json!({ "verdict": "infeasible", "violations": v }),
            summary: "set structure is not monotone or violates no-cloning".into(),
        });
    }
    let q = build_qss(&a)?;
    let report = verify_qss(&q, &a);
    let tableau = q.group.to_tableau();
    if let Some(path) = output {
        write(path, &tableau)?;
    }
    let code = if report.passed { EXIT_OK } else { EXIT_REJECTED };
    Ok(Outcome {
        code,
        json: json!({
            "verdict": verdict(code),
            "qubits": q.qubits(),
            "reference": q.reference,
            "minimal_sets": q.minimal_sets.iter().map(|t| t.key()).collect::<Vec<_>>(),
            "tableau": tableau,
            "report": report,
        }),
        summary: format!("{} qubits, reference qubit {}", q.qubits(), q.reference),
    })
}

fn summon(ring: usize) -> Result<Outcome, UsageError> {
    let out = summon_feasible(ring)?;
    let code = if out.is_feasible() { EXIT_OK } else { EXIT_REJECTED };
    let summary = match out.cycle_edges() {
        Some(edges) => format!(
            "no summoning protocol on a ring of {ring}: odd cycle {}",
            edges.iter().map(|(a, b)| format!("{{T{a},T{b}}}")).collect::<Vec<_>>().join(", ")
        ),
        None if out.is_feasible() => format!("ring of {ring}: a pre-shared scheme exists"),
        None => format!("no summoning protocol on a ring of {ring}"),
    };
    Ok(Outcome { code, json: out.to_json(), summary })
}

fn nonstab(path: &Path, mode: Mode, seed: u64, mixed: bool) -> Result<Outcome, UsageError> {
    let s = load_structure(path)?;
    let report = match mode {
        Mode::Known => haar_known_scheme(&s, seed, if mixed { Ancilla::MaximallyMixed } else { Ancilla::Pure })?.1,
        Mode::Unknown => nonstab_unknown_scheme(&s, seed)?.1,
    };
    let code = if report.passed { EXIT_OK } else { EXIT_REJECTED };
    let summary = format!("seed {seed}: {} intended pairs, {} cuts checked", report.intended.len(), report.cuts.len());
    Ok(Outcome { code, json: serde_json::to_value(&report)?, summary })
}

fn dispatch(cmd: &Command) -> Result<Outcome, UsageError> {
    match cmd {
        Command::Validate { structure, mode, field } => validate(structure, *mode, *field),
        Command::Synthesize { structure, mode, field, output } => synthesize(structure, *mode, *field, output.as_deref()),
        Command::Verify { scheme, structure, oracle } => verify(scheme, structure, *oracle),
        Command::Threshold { p, q, output, structure } => threshold(*p, *q, output.as_deref(), structure.as_deref()),
        Command::Rscode { n, k, r, field, check_distance, brute_force } => {
            rscode(*n, *k, *r, *field, *check_distance, *brute_force)
        }
        Command::Qss { structure, output } => qss(structure, output.as_deref()),
        Command::Summon { ring } => summon(*ring),
        Command::Nonstab { structure, mode, seed, mixed } => nonstab(structure, *mode, *seed, *mixed),
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok(o) => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&o.json).expect("serializable"));
            let _ = writeln!(err, "{}", o.summary);
            o.code
        }
        Err(UsageError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

pub fn main() -> std::process::ExitCode {
    let code = run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::ExitCode::from(code as u8)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("ess").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn rscode_distances() {
        let (code, out, err) = call(&["rscode", "--n", "5", "--k", "1", "--r", "2", "--field", "5", "--check-distance", "--brute-force"]);
        assert_eq!(code, 0, "{err}");
        assert_eq!(err.trim(), "(3,3,3)");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["checked"]["distances"], json!([3, 3, 3]));
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&["rscode", "--n", "5"]).0, 2);
        assert_eq!(call(&["rscode", "--n", "5", "--k", "1", "--r", "2", "--field", "6"]).0, 2);
        assert_eq!(call(&["summon", "--ring", "3"]).0, 2);
        assert_eq!(call(&["validate", "/nonexistent.json", "--mode", "known"]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn malformed_json_reports_position() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(&path, "{\"parties\": 3,\n \"authorized\": [[[0], [1]]\n").unwrap();
        let (code, _, err) = call(&["validate", path.to_str().unwrap(), "--mode", "known"]);
        assert_eq!(code, 2);
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn pentagon_exit_1() {
        let (code, out, _) = call(&["summon", "--ring", "5"]);
        assert_eq!(code, 1);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["cycle"].as_array().unwrap().len(), 5);
    }
}
