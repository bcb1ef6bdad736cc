use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use hankel_schmidt::exec::Execution;
use hankel_schmidt::reproduce::{reproduce, Example, ReproduceOptions};
use hankel_schmidt::symbol_file::SymbolSpec;
use hankel_schmidt::symbols::MatrixSymbol;
use hankel_schmidt::verify::{Analysis, AnalysisConfig, CheckSet, Tolerances};
use hankel_schmidt::{Error, VERSION};

const EXIT_OK: u8 = 0;
const EXIT_INTERNAL: u8 = 1;
const EXIT_SPEC: u8 = 2;
const EXIT_AMBIGUOUS: u8 = 3;
const EXIT_FAILED: u8 = 4;
const EXIT_NOT_APPLICABLE: u8 = 5;

#[derive(Parser, Debug)]
#[command(name = "hankel-schmidt", version, about = "Schmidt subspaces of block Hankel operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Schmidt values and multiplicities.
    Schmidt(Common),
    /// Run the structural checks and write verify.json.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Comma-separated check groups, or `all`.
        #[arg(long, default_value = "all")]
        which: String,
    },
    /// Reproduce a named example and compare with its expected facts.
    Reproduce {
        /// 3.6A, 3.6B, 4.6 or scalar-zn.
        #[arg(value_name = "ID", required_unless_present = "example")]
        id: Option<String>,
        #[arg(long, conflicts_with = "id")]
        example: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Symbol specification (JSON). Optional for `reproduce`.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Truncation N (default: symbol degree + 4).
    #[arg(long)]
    truncation: Option<usize>,
    #[arg(long, value_parser = positive)]
    cluster_tol: Option<f64>,
    #[arg(long, value_parser = positive)]
    rank_tol: Option<f64>,
    #[arg(long, value_parser = positive)]
    subspace_tol: Option<f64>,
    /// Grid size for pointwise operations.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Run on the calling thread only.
    #[arg(long)]
    sequential: bool,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Spec(_)
            | Error::NotSymmetric { .. }
            | Error::InvalidArgument(_)
            | Error::ZeroOnCircle { .. }
            | Error::Aliasing { .. } => EXIT_SPEC,
            Error::AmbiguousClustering { .. } => EXIT_AMBIGUOUS,
            _ => EXIT_INTERNAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

impl Common {
    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn load_spec(&self) -> Result<Option<SymbolSpec>, Failure> {
        let Some(path) = &self.spec else {
            return Ok(None);
        };
        let text = fs::read_to_string(path).map_err(|e| fail(EXIT_SPEC, format!("{}: {e}", path.display())))?;
        SymbolSpec::parse(&text)
            .map(Some)
            .map_err(|e| fail(EXIT_SPEC, format!("{}: {e}", path.display())))
    }

    fn require_spec(&self) -> Result<SymbolSpec, Failure> {
        self.load_spec()?.ok_or_else(|| fail(EXIT_SPEC, "--spec is required"))
    }

    fn tolerances(&self, u: &MatrixSymbol) -> Tolerances {
        let mut t = Tolerances::for_symbol(u);
        if let Some(x) = self.cluster_tol {
            t.cluster_tol = x;
        }
        if let Some(x) = self.rank_tol {
            t.rank_tol = x;
        }
        if let Some(x) = self.subspace_tol {
            t.subspace_tol = x;
        }
        t
    }

    fn analysis_config(&self, u: &MatrixSymbol, dump_theta: bool) -> AnalysisConfig {
        AnalysisConfig {
            window: self.truncation,
            tolerances: Some(self.tolerances(u)),
            grid: self.grid,
            execution: self.execution(),
            dump_theta,
        }
    }

    /// Header shared by every report.
    fn header(&self, command: &str, a: &Analysis, extra: Value) -> Value {
        let mut config = json!({
            "command": command,
            "spec": self.spec.as_ref().map(|p| p.display().to_string()),
            "truncation": a.window(),
            "grid": a.grid(),
            "m": a.m(),
            "symbol_degree": a.symbol().degree(),
        });
        if let (Value::Object(map), Value::Object(more)) = (&mut config, extra) {
            map.extend(more);
        }
        json!({
            "version": VERSION,
            "config": config,
            "tolerances": a.tolerances(),
            "tail_bound": a.symbol().tail_bound(),
        })
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf, Failure> {
        fs::create_dir_all(&self.out).map_err(|e| fail(EXIT_INTERNAL, format!("{}: {e}", self.out.display())))?;
        let path = self.out.join(name);
        fs::write(&path, contents).map_err(|e| fail(EXIT_INTERNAL, format!("{}: {e}", path.display())))?;
        Ok(path)
    }
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(map), Value::Object(more)) = (&mut base, extra) {
        map.extend(more);
    }
    base
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn cmd_schmidt(common: &Common) -> Result<u8, Failure> {
    let u = common.require_spec()?.build()?;
    let a = Analysis::new(&u, &common.analysis_config(&u, false))?;
    let clusters: Vec<Value> = a
        .clusters()
        .iter()
        .map(|c| json!({"s": c.s, "multiplicity": c.multiplicity, "cluster_residual": c.cluster_residual}))
        .collect();
    let report = merge(
        common.header("schmidt", &a, json!({})),
        json!({"kernel_dim": a.kernel_dim(), "clusters": clusters}),
    );
    let json_path = common.write("schmidt.json", &pretty(&report))?;
    let mut csv = String::from("s,multiplicity\n");
    for c in a.clusters() {
        csv.push_str(&format!("{:?},{}\n", c.s, c.multiplicity));
    }
    let csv_path = common.write("singular_values.csv", &csv)?;
    for c in a.clusters() {
        println!("s = {:.15}  multiplicity {}", c.s, c.multiplicity);
    }
    println!("wrote {} and {}", display(&json_path), display(&csv_path));
    Ok(EXIT_OK)
}

fn cmd_verify(common: &Common, which: &str) -> Result<u8, Failure> {
    let groups = CheckSet::parse(which)?;
    let u = common.require_spec()?.build()?;
    let a = Analysis::new(&u, &common.analysis_config(&u, true))?;
    let outcome = a.verify(&groups)?;
    let report = merge(
        common.header("verify", &a, json!({"which": groups.names()})),
        json!({
            "verdict": outcome.verdict(),
            "tally": outcome.tally,
            "identities": outcome.identities,
            "clusters": outcome.clusters,
        }),
    );
    let path = common.write("verify.json", &pretty(&report))?;
    for c in &outcome.identities {
        println!("{:<48} {:>10.3e} <= {:<10.3e} {:?}", c.name, c.residual, c.tolerance, c.verdict);
    }
    for cl in &outcome.clusters {
        println!("s = {:.12} (multiplicity {}): {:?}", cl.s, cl.multiplicity, cl.verdict);
        for c in &cl.structure.checks {
            println!("  {:<46} {:>10.3e} <= {:<10.3e} {:?}", c.name, c.residual, c.tolerance, c.verdict);
        }
    }
    let t = outcome.tally;
    println!(
        "{} pass, {} fail, {} not applicable, {} inconclusive; wrote {}",
        t.pass,
        t.fail,
        t.not_applicable,
        t.inconclusive,
        display(&path)
    );
    Ok(match outcome.exit_code() {
        0 => EXIT_OK,
        4 => EXIT_FAILED,
        _ => EXIT_NOT_APPLICABLE,
    })
}

fn cmd_reproduce(common: &Common, id: &str) -> Result<u8, Failure> {
    let example: Example = id.parse()?;
    let spec = common.load_spec()?;
    let tolerances = match &spec {
        Some(s) => Some(common.tolerances(&s.build()?)),
        None => Some(common.tolerances(&example.default_spec().build()?)),
    };
    let opts = ReproduceOptions {
        spec,
        window: common.truncation,
        tolerances,
        grid: common.grid,
        execution: common.execution(),
    };
    let report = reproduce(example, &opts)?;
    print!("{}", report.table());
    let value = json!({
        "version": VERSION,
        "config": {
            "command": "reproduce",
            "example": example.id(),
            "spec": common.spec.as_ref().map(|p| p.display().to_string()),
            "truncation": report.window,
            "grid": common.grid,
        },
        "tolerances": report.tolerances,
        "tail_bound": report.tail_bound,
        "report": report,
    });
    let path = common.write("reproduce.json", &pretty(&value))?;
    println!("wrote {}", display(&path));
    Ok(if report.all_match { EXIT_OK } else { EXIT_FAILED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Schmidt(common) => cmd_schmidt(common),
        Command::Verify { common, which } => cmd_verify(common, which),
        Command::Reproduce { id, example, common } => {
            let id = id.as_deref().or(example.as_deref()).unwrap_or_default();
            cmd_reproduce(common, id)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
