//! `unitri`: factor matrices into unitriangular blocks and check the results.
//!
//! Exit codes: 0 ok, 1 verification failed, 2 bad input, 3 missing ring capability,
//! 4 prime search exhausted.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use unitri::elimination::{factor5, factor_sl, gauss};
use unitri::exactmat::{Factorisation, Matrix};
use unitri::json::{
    enumeration_to_json, factorisation_from_json, factorisation_to_json, gauss_to_json, zp_trace_to_json,
    matrix_from_json, monomial_from_json, monomial_to_json, ring_from_arg, shear_to_json, sl2_trace_to_json,
    verify_report_to_json,
};
use unitri::monomial::{factor_monomial, MonomialMatrix};
use unitri::rings::Ring;
use unitri::shears::{paeth2, toffoli_quick3, EulerAngles};
use unitri::sl2::factor_sl2_traced;
use unitri::verify::enumerate_sets;
use unitri::zp::{factor_sl2_zp, factor_sl_n_zp, DEFAULT_K_MAX};
use unitri::Error;

mod selftest;

#[derive(Parser)]
#[command(name = "unitri", version, about = "Unitriangular factorisations of SL(n, R)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Input {
    /// Ring: zmod:m, gf:p, q, z, zp:p, product:zmod:a,zmod:b
    #[arg(long)]
    ring: Option<String>,
    /// Inline JSON input
    #[arg(long, conflicts_with_all = ["file", "batch"])]
    matrix: Option<String>,
    /// Read the JSON input from a file
    #[arg(long, conflicts_with = "batch")]
    file: Option<PathBuf>,
    /// File holding a JSON array of inputs; the output is an array in the same order
    #[arg(long)]
    batch: Option<PathBuf>,
    /// Attach the step parameters of the 2 x 2 algorithms
    #[arg(long)]
    trace: bool,
}

#[derive(Subcommand)]
enum Command {
    /// At most 4 blocks U L U L (rings of stable rank 1)
    Factor(Input),
    /// At most 5 blocks U L U L U through the Gauss decomposition
    Factor5(Input),
    /// g = u t v u2
    Gauss(Input),
    /// Monomial matrices over any ring, at most 4 blocks
    Monomial(Input),
    /// SL(n, Z[1/p]): at most 5 blocks for n = 2
    Zp {
        #[command(flatten)]
        input: Input,
        /// Bound on k in the prime search
        #[arg(long, default_value_t = DEFAULT_K_MAX)]
        k_max: u64,
    },
    /// Real shear factorisations of rotations
    Shear {
        #[command(subcommand)]
        kind: Shear,
    },
    /// Check a factorisation document
    Verify(Input),
    /// Run the built-in oracle checks
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exhaustive set sizes over a small finite ring
    Enumerate {
        #[arg(long)]
        ring: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum Shear {
    /// Three shears of a plane rotation by phi
    Paeth {
        #[arg(long, allow_hyphen_values = true)]
        phi: f64,
    },
    /// U L U for the rotation with Euler angles (alpha, beta, gamma)
    Tq {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
    },
}

enum Failure {
    Lib(Error),
    Verify(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verify(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Lib(e) => match e {
                Error::Internal(_) => 1,
                Error::CapabilityMissing(_) => 3,
                Error::SearchExhausted(_) => 4,
                _ => 2,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Lib(e) => e.to_string(),
            Failure::Verify(s) => format!("verification failed: {s}"),
            Failure::Usage(s) => s.clone(),
        }
    }
}

type Outcome = Result<Value, Failure>;

fn read_source(input: &Input) -> Result<String, Failure> {
    let io = |e: std::io::Error| Failure::Usage(e.to_string());
    match (&input.matrix, &input.file) {
        (Some(m), None) => Ok(m.clone()),
        (None, Some(path)) => std::fs::read_to_string(path).map_err(io),
        (None, None) => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(io)?;
            Ok(s)
        }
        (Some(_), Some(_)) => Err(Failure::Usage("give at most one of --matrix and --file".into())),
    }
}

fn parse_json(text: &str) -> Result<Value, Failure> {
    serde_json::from_str(text)
        .map_err(|e| Failure::Lib(Error::Parse(format!("line {} column {}: {e}", e.line(), e.column()))))
}

fn ring_of(input: &Input) -> Result<Option<Ring>, Failure> {
    Ok(input.ring.as_deref().map(ring_from_arg).transpose()?)
}

/// Runs `one` on the single input, or on every element of the `--batch` array.
fn each_input(input: &Input, one: impl Fn(&Value, Option<&Ring>) -> Outcome) -> Outcome {
    let ring = ring_of(input)?;
    match &input.batch {
        None => one(&parse_json(&read_source(input)?)?, ring.as_ref()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(e.to_string()))?;
            let items = match parse_json(&text)? {
                Value::Array(items) => items,
                _ => return Err(Failure::Usage("a batch file holds a JSON array".into())),
            };
            let out = items.iter().map(|v| one(v, ring.as_ref())).collect::<Result<Vec<_>, _>>()?;
            Ok(Value::Array(out))
        }
    }
}

fn matrix_input(input: &Input, one: impl Fn(&Matrix) -> Outcome) -> Outcome {
    each_input(input, |v, ring| one(&matrix_from_json(v, ring)?))
}

/// Verifies `f`, encodes it, and checks that the encoding parses back to the same document.
fn emit(f: &Factorisation, extra: &[(&str, Value)]) -> Outcome {
    let report = f.verify();
    if !report.ok {
        return Err(Failure::Verify(report.first_violation.unwrap_or_default()));
    }
    let mut v = factorisation_to_json(f);
    let back = factorisation_from_json(&v)?;
    if !back.verify().ok || factorisation_to_json(&back) != v {
        return Err(Failure::Verify("emitted JSON does not round-trip".into()));
    }
    let o = v.as_object_mut().unwrap();
    o.insert("verify".into(), verify_report_to_json(&report));
    for (k, x) in extra {
        o.insert((*k).into(), x.clone());
    }
    Ok(v)
}

fn factor_cmd(g: &Matrix, trace: bool) -> Outcome {
    if trace && g.n() == 2 && g.ring().has_sr1() {
        let (f, tr) = factor_sl2_traced(g)?;
        return emit(&f, &[("trace", tr.as_ref().map(sl2_trace_to_json).unwrap_or(Value::Null))]);
    }
    emit(&factor_sl(g)?, &[])
}

fn zp_cmd(g: &Matrix, trace: bool, k_max: u64) -> Outcome {
    if g.n() == 2 {
        let (f, tr) = factor_sl2_zp(g, k_max)?;
        let extra = if trace { vec![("trace", zp_trace_to_json(&tr))] } else { vec![] };
        return emit(&f, &extra);
    }
    emit(&factor_sl_n_zp(g, k_max)?, &[])
}

fn gauss_cmd(g: &Matrix) -> Outcome {
    let gd = gauss(g)?;
    if &gd.product() != g {
        return Err(Failure::Verify("u t v u2 differs from the input".into()));
    }
    let mut v = gauss_to_json(&gd);
    v["verified"] = json!(true);
    Ok(v)
}

fn monomial_cmd(v: &Value, ring: Option<&Ring>) -> Outcome {
    let g = if v.get("perm").is_some() {
        let ring = ring.ok_or_else(|| Failure::Usage("--ring is required with {\"perm\", \"units\"}".into()))?;
        monomial_from_json(v, ring)?.to_matrix()?
    } else {
        matrix_from_json(v, ring)?
    };
    let m = MonomialMatrix::from_matrix(&g)?;
    emit(&factor_monomial(&g)?, &[("monomial", monomial_to_json(&m))])
}

fn verify_cmd(v: &Value) -> Outcome {
    let f = factorisation_from_json(v)?;
    let report = f.verify();
    let out = verify_report_to_json(&report);
    if !report.ok {
        println!("{out}");
        return Err(Failure::Verify(report.first_violation.unwrap_or_else(|| "product differs from target".into())));
    }
    Ok(out)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Factor(i) => matrix_input(&i, |g| factor_cmd(g, i.trace)),
        Command::Factor5(i) => matrix_input(&i, |g| emit(&factor5(g)?, &[])),
        Command::Gauss(i) => matrix_input(&i, gauss_cmd),
        Command::Monomial(i) => each_input(&i, monomial_cmd),
        Command::Zp { input, k_max } => matrix_input(&input, |g| zp_cmd(g, input.trace, k_max)),
        Command::Verify(i) => each_input(&i, |v, _| verify_cmd(v)),
        Command::Shear { kind } => {
            let d = match kind {
                Shear::Paeth { phi } => paeth2(phi)?,
                Shear::Tq { alpha, beta, gamma } => toffoli_quick3(&EulerAngles::new(alpha, beta, gamma)?)?,
            };
            Ok(shear_to_json(&d))
        }
        Command::Enumerate { ring, n } => Ok(enumeration_to_json(&enumerate_sets(&ring_from_arg(&ring)?, n)?)),
        Command::Selftest { seed } => {
            let (ok, report) = selftest::run(seed);
            if !ok {
                println!("{report}");
                return Err(Failure::Verify("selftest".into()));
            }
            Ok(report)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(v) => {
            println!("{v}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("unitri: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
