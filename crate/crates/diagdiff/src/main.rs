//! Command-line front end: load JSON diagrams, evaluate, differentiate,
//! cross-check gradients, and run one-parameter group checks.

use clap::{Args, Parser, Subcommand, ValueEnum};
use diagdiff::autodiff::{
    diagram_derivative, eval_any, gradcheck, AutodiffError, GradCheckConfig, GradientRuleSet,
};
use diagdiff::diagram::{ColourRegistry, FormalSum};
use diagdiff::json::{
    any_sum_from_value, gradcheck_report_to_value, stone_report_to_value, sum_to_value,
    tensor_to_value, to_pretty_string, JsonError,
};
use diagdiff::tensor::interp::InterpretError;
use diagdiff::tensor::Tensor;
use diagdiff::zx::stone_check;
use num_complex::Complex64;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_TYPE: u8 = 3;
const EXIT_MISSING_RULE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "diagdiff",
    about = "Evaluate and differentiate parameterised string diagrams",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the input at a parameter point and write the tensor.
    Eval(CommonArgs),
    /// Differentiate by one parameter; write the symbolic sum and its value.
    Grad(GradArgs),
    /// Compare diagrammatic, dual-number, and finite-difference gradients.
    Gradcheck(GradcheckArgs),
    /// Extract the generator of a one-parameter family and verify the
    /// exponential law, unitarity, self-adjointness, and the identity at 0.
    Stone(StoneArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Input diagram or sum (JSON file).
    #[arg(long)]
    input: PathBuf,
    /// Parameter assignments `i=v[,j=v...]`; may be repeated.
    #[arg(long, value_delimiter = ',')]
    theta: Vec<String>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct GradArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Parameter index to differentiate by.
    #[arg(long)]
    param: usize,
}

#[derive(Args)]
struct GradcheckArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-5)]
    h: f64,
    /// Tolerance against finite differences (the two exact paths are always
    /// held to 1e-10).
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args)]
struct StoneArgs {
    /// Input diagram or sum (JSON file) with at most one parameter.
    #[arg(long)]
    input: PathBuf,
    /// Pass/fail tolerance for every defect.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Output file (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Json,
    /// Flat comma-separated plot data.
    Csv,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<JsonError> for Failure {
    fn from(e: JsonError) -> Self {
        let code = match e {
            JsonError::Malformed(_) | JsonError::Syntax(_) => EXIT_PARSE,
            JsonError::Diagram(_) => EXIT_TYPE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<InterpretError> for Failure {
    fn from(e: InterpretError) -> Self {
        Failure::new(EXIT_TYPE, e.to_string())
    }
}

impl From<AutodiffError> for Failure {
    fn from(e: AutodiffError) -> Self {
        let code = match e {
            AutodiffError::MissingRule(_) | AutodiffError::NoDerivativeColour(_) => {
                EXIT_MISSING_RULE
            }
            AutodiffError::SecondOrder(_) => EXIT_TYPE,
            AutodiffError::Diagram(_) | AutodiffError::Interpret(_) | AutodiffError::Cq(_) => {
                EXIT_TYPE
            }
        };
        Failure::new(code, e.to_string())
    }
}

fn load_sum(path: &Path, registry: &ColourRegistry) -> Result<FormalSum, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    Ok(any_sum_from_value(&value, registry)?)
}

fn parse_theta(args: &[String]) -> Result<Vec<(usize, f64)>, Failure> {
    let mut out = Vec::new();
    for item in args {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let (idx, val) = item.split_once('=').ok_or_else(|| {
            Failure::new(EXIT_PARSE, format!("theta assignment {item:?} is not i=v"))
        })?;
        let idx: usize = idx.trim().parse().map_err(|_| {
            Failure::new(EXIT_PARSE, format!("theta index {idx:?} is not an integer"))
        })?;
        let val: f64 = val.trim().parse().map_err(|_| {
            Failure::new(EXIT_PARSE, format!("theta value {val:?} is not a number"))
        })?;
        out.push((idx, val));
    }
    Ok(out)
}

/// Build the θ vector, requiring every parameter of the sum to be assigned.
fn theta_vector_covering(
    assignments: &[(usize, f64)],
    sum: &FormalSum,
) -> Result<Vec<f64>, Failure> {
    let n = sum.max_param().map_or(0, |p| p + 1);
    let len = assignments
        .iter()
        .map(|&(i, _)| i + 1)
        .max()
        .unwrap_or(0)
        .max(n);
    let mut theta = vec![f64::NAN; len];
    for &(i, v) in assignments {
        theta[i] = v;
    }
    let missing: Vec<String> = (0..n)
        .filter(|&i| theta[i].is_nan())
        .map(|i| i.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Failure::new(
            EXIT_TYPE,
            format!(
                "the input uses parameter(s) {} but --theta does not assign them",
                missing.join(", ")
            ),
        ));
    }
    for v in &mut theta {
        if v.is_nan() {
            *v = 0.0;
        }
    }
    Ok(theta)
}

/// Build the θ base point, defaulting unassigned parameters to 0.
fn theta_vector_defaulted(assignments: &[(usize, f64)], sum: &FormalSum) -> Vec<f64> {
    let n = sum.max_param().map_or(0, |p| p + 1);
    let len = assignments
        .iter()
        .map(|&(i, _)| i + 1)
        .max()
        .unwrap_or(0)
        .max(n);
    let mut theta = vec![0.0; len];
    for &(i, v) in assignments {
        theta[i] = v;
    }
    theta
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn tensor_csv(t: &Tensor<Complex64>) -> String {
    let mut s = String::from("cod_index,dom_index,re,im\n");
    let dom = t.dom_size();
    for (k, z) in t.data.iter().enumerate() {
        let _ = writeln!(s, "{},{},{},{}", k / dom, k % dom, z.re, z.im);
    }
    s
}

fn cmd_eval(args: &CommonArgs, registry: &ColourRegistry) -> Result<u8, Failure> {
    let sum = load_sum(&args.input, registry)?;
    let theta = theta_vector_covering(&parse_theta(&args.theta)?, &sum)?;
    let tensor = eval_any(&sum, &theta, registry)?;
    let text = match args.format {
        Format::Json => to_pretty_string(&tensor_to_value(&tensor)),
        Format::Csv => tensor_csv(&tensor),
    };
    write_output(args.output.as_deref(), &text)?;
    Ok(0)
}

fn cmd_grad(args: &GradArgs, registry: &ColourRegistry) -> Result<u8, Failure> {
    let sum = load_sum(&args.common.input, registry)?;
    let theta = theta_vector_covering(&parse_theta(&args.common.theta)?, &sum)?;
    let rules = GradientRuleSet::standard();
    let gradient = diagram_derivative(&sum, args.param, &rules, registry)?;
    let tensor = eval_any(&gradient, &theta, registry)?;
    let text = match args.common.format {
        Format::Json => to_pretty_string(&json!({
            "sum": sum_to_value(&gradient),
            "tensor": tensor_to_value(&tensor),
        })),
        Format::Csv => tensor_csv(&tensor),
    };
    write_output(args.common.output.as_deref(), &text)?;
    Ok(0)
}

fn cmd_gradcheck(args: &GradcheckArgs, registry: &ColourRegistry) -> Result<u8, Failure> {
    let sum = load_sum(&args.common.input, registry)?;
    let base = theta_vector_defaulted(&parse_theta(&args.common.theta)?, &sum);
    let config = GradCheckConfig {
        theta: base,
        h: args.h,
        tol_fd: args.tol,
        ..GradCheckConfig::default()
    };
    let rules = GradientRuleSet::standard();
    let report = gradcheck(&sum, &config, &rules, registry)?;
    let text = match args.common.format {
        Format::Json => to_pretty_string(&gradcheck_report_to_value(&report)),
        Format::Csv => {
            let mut s =
                String::from("param,theta,exact_disagreement,fd_disagreement,pass\n");
            for p in &report.points {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    p.param, p.theta[p.param], p.exact_disagreement, p.fd_disagreement, p.pass
                );
            }
            s
        }
    };
    write_output(args.common.output.as_deref(), &text)?;
    if report.pass {
        Ok(0)
    } else {
        eprintln!(
            "gradient check failed: max exact disagreement {}, max finite-difference disagreement {}",
            report.max_exact_disagreement, report.max_fd_disagreement
        );
        Ok(EXIT_CHECK_FAILED)
    }
}

fn cmd_stone(args: &StoneArgs, registry: &ColourRegistry) -> Result<u8, Failure> {
    let sum = load_sum(&args.input, registry)?;
    if sum.max_param().is_some_and(|p| p > 0) {
        return Err(Failure::new(
            EXIT_TYPE,
            "the input must depend on parameter 0 alone",
        ));
    }
    let grid: Vec<f64> = (0..9).map(|k| -2.0 + k as f64 * 0.5).collect();
    let report = stone_check(&sum, &grid, args.tol, registry)?;
    let text = match args.format {
        Format::Json => to_pretty_string(&stone_report_to_value(&report)),
        Format::Csv => {
            let mut s = String::from("t,deviation\n");
            for &(t, d) in &report.grid {
                let _ = writeln!(s, "{t},{d}");
            }
            s
        }
    };
    write_output(args.output.as_deref(), &text)?;
    if report.pass {
        Ok(0)
    } else {
        eprintln!(
            "one-parameter group check failed: deviation {}, unitarity {}, hermiticity {}, identity {}",
            report.max_deviation,
            report.unitarity_defect,
            report.hermiticity_defect,
            report.identity_defect
        );
        Ok(EXIT_CHECK_FAILED)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let registry = ColourRegistry::standard();
    let result = match &cli.cmd {
        Cmd::Eval(args) => cmd_eval(args, &registry),
        Cmd::Grad(args) => cmd_grad(args, &registry),
        Cmd::Gradcheck(args) => cmd_gradcheck(args, &registry),
        Cmd::Stone(args) => cmd_stone(args, &registry),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
