use clap::{Args, Parser, Subcommand};
use dioph_cli::config::{self, ConfigError, Overrides};
use dioph_cli::tasks::{self, TaskStatus};
use dioph_cli::{run_config, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
use dioph_core::Error;
use serde_json::{json, Map, Value as Json};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dioph", version, about = "Exact number-field, elliptic-curve and witness-system tools")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Output {
    /// Write JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Indent the JSON output.
    #[arg(long)]
    pretty: bool,
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// Embedded field: Q, sqrt2, cyclic_cubic.
    #[arg(long, conflicts_with = "poly")]
    field: Option<String>,
    /// Integer coefficients of a monic polynomial, low degree first, e.g. -2,0,1.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    poly: Option<Vec<i64>>,
}

#[derive(Args, Clone)]
struct CurveArgs {
    /// Embedded curve name ("default" is y^2 + y = x^3 - x with P = (0, 0)).
    #[arg(long, conflicts_with_all = ["a", "point"])]
    curve: Option<String>,
    /// Coefficients a1,a2,a3,a4,a6 of a curve over Q.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', requires = "point")]
    a: Option<Vec<String>>,
    /// Base point x,y (rationals such as 1/4).
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', requires = "a")]
    point: Option<Vec<String>>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every task of a JSON config and write a report.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Override every task budget.
        #[arg(long)]
        budget: Option<u64>,
        /// Override every witness mode (paper_exact or relaxed:<e>).
        #[arg(long, value_parser = tasks::parse_mode)]
        mode: Option<dioph_core::dioph::Mode>,
        /// Leave timing fields out of the report.
        #[arg(long)]
        no_timings: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Field invariants.
    Field {
        #[command(subcommand)]
        cmd: FieldCmd,
    },
    /// Primes above a rational prime.
    FactorPrime {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        p: String,
        #[command(flatten)]
        output: Output,
    },
    /// Elliptic curve arithmetic.
    Ec {
        #[command(subcommand)]
        cmd: EcCmd,
    },
    /// Lemma checks on a curve: elliptic, torsion or xdifference.
    LemmaSuite {
        name: String,
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        q: Option<u64>,
        /// Multipliers for the xdifference suite.
        #[arg(long, value_delimiter = ',')]
        m: Option<Vec<u64>>,
        /// Reduction primes for the torsion suite.
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        #[command(flatten)]
        output: Output,
    },
    /// Build or check witness bundles.
    Witness {
        #[command(subcommand)]
        cmd: WitnessCmd,
    },
    /// Split types of unramified primes up to X.
    Density {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long = "X", default_value_t = 10_000)]
        x: u64,
        /// Also write the rows as CSV (p,split_type).
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Rank-one model of the integers.
    Rank1 {
        #[command(subcommand)]
        cmd: Rank1Cmd,
    },
    /// Fundamental solution of x^2 - d y^2 = 1.
    Pell {
        #[arg(long, allow_hyphen_values = true)]
        d: String,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum FieldCmd {
    Info {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum EcCmd {
    /// The multiple [n]P.
    Mul {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[command(flatten)]
        output: Output,
    },
    /// The denominator divisor of x([n]P).
    Denom {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args, Clone)]
struct WitnessArgs {
    /// setA, part2, setA_bigring, part2_bigring or deg2.
    system: String,
    /// m for the set-A systems (x = m^2).
    #[arg(long, conflicts_with = "x")]
    m: Option<u64>,
    #[arg(long)]
    x: Option<u64>,
    /// paper_exact or relaxed:<e>.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    z: Option<u64>,
    /// Rational primes allowed in denominators.
    #[arg(long, value_delimiter = ',')]
    allow: Option<Vec<u64>>,
    /// Cyclic field for the big-ring systems.
    #[arg(long)]
    aux: Option<String>,
    #[command(flatten)]
    curve: CurveArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Subcommand)]
enum WitnessCmd {
    Construct(WitnessArgs),
    Verify {
        #[command(flatten)]
        args: WitnessArgs,
        /// Bundle JSON file.
        #[arg(long)]
        bundle: PathBuf,
    },
}

#[derive(Subcommand)]
enum Rank1Cmd {
    /// ℓ-sequence and model predicates.
    Model {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        count: Option<u64>,
        #[arg(long)]
        budget: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
}

/// A one-task config assembled from flags.
struct Single {
    cfg: Map<String, Json>,
    task: Map<String, Json>,
}

impl Single {
    fn new(kind: &str) -> Single {
        let mut task = Map::new();
        task.insert("kind".into(), json!(kind));
        Single { cfg: Map::new(), task }
    }

    fn set(&mut self, key: &str, v: impl Into<Json>) -> &mut Self {
        self.task.insert(key.into(), v.into());
        self
    }

    fn opt<T: Into<Json>>(&mut self, key: &str, v: Option<T>) -> &mut Self {
        if let Some(v) = v {
            self.set(key, v);
        }
        self
    }

    fn section(&mut self, name: &str, entry: Json) {
        self.cfg.insert(name.into(), json!({ "cli": entry }));
    }

    fn field(&mut self, f: &FieldArgs) -> &mut Self {
        if let Some(p) = &f.poly {
            self.section("fields", json!({"min_poly": p}));
            self.set("field", "cli");
        }
        self.opt("field", f.field.clone())
    }

    fn curve(&mut self, c: &CurveArgs) -> &mut Self {
        if let (Some(a), Some(p)) = (&c.a, &c.point) {
            self.section("curves", json!({"field": "Q", "a": a, "P": p}));
            self.set("curve", "cli");
        }
        self.opt("curve", c.curve.clone())
    }

    fn text(&self) -> String {
        let mut cfg = self.cfg.clone();
        cfg.insert("tasks".into(), json!([self.task]));
        Json::Object(cfg).to_string()
    }
}

fn emit(v: &Json, out: &Output) -> Result<(), String> {
    let text = if out.pretty { serde_json::to_string_pretty(v) } else { serde_json::to_string(v) }.expect("json");
    match &out.out {
        None => {
            use std::io::Write;
            // a closed pipe (e.g. `| head`) is not an error
            let _ = writeln!(std::io::stdout().lock(), "{}", text);
            Ok(())
        }
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| format!("{}: {}", p.display(), e)),
    }
}

fn usage(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {}", msg);
    EXIT_USAGE
}

fn core_exit(e: &Error) -> i32 {
    eprintln!("error: {}", e);
    match e {
        Error::InvalidInput(_) | Error::PerfectSquare(_) => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

/// Runs a flag-built task and prints its details.
fn single(s: &Single, out: &Output) -> i32 {
    let (_, tasks) = match config::load(&s.text(), &Overrides::default()) {
        Ok(v) => v,
        Err(ConfigError(m)) => return usage(m),
    };
    let t = &tasks[0];
    match tasks::run_kind(&t.kind, t.seed) {
        Err(e) => core_exit(&e),
        Ok(o) => {
            if let Err(m) = emit(&o.details, out) {
                return usage(m);
            }
            if o.status == TaskStatus::Pass {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
    }
}

fn witness_task(a: &WitnessArgs, action: &str) -> Single {
    let mut s = Single::new("witness");
    s.set("system", a.system.clone()).set("action", action);
    s.opt("m", a.m).opt("x", a.x).opt("mode", a.mode.clone()).opt("budget", a.budget);
    s.opt("p", a.p).opt("z", a.z).opt("field", a.aux.clone());
    if let Some(primes) = &a.allow {
        let list: Vec<Json> = primes.iter().map(|p| json!([p])).collect();
        s.section("prime_sets", json!({"field": "Q", "rule": {"list": list}}));
        s.set("ring", "cli");
    }
    s.curve(&a.curve);
    s
}

fn dispatch(cmd: Cmd) -> i32 {
    match cmd {
        Cmd::Run { config, seed, budget, mode, no_timings, output } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => return usage(format!("{}: {}", config.display(), e)),
            };
            let ov = Overrides { seed, budget, mode };
            match run_config(&text, &ov, !no_timings) {
                Err(ConfigError(m)) => usage(m),
                Ok((report, code)) => match emit(&report, &Output { pretty: true, ..output }) {
                    Ok(()) => code,
                    Err(m) => usage(m),
                },
            }
        }
        Cmd::Field { cmd: FieldCmd::Info { field, output } } => single(Single::new("field_info").field(&field), &output),
        Cmd::FactorPrime { field, p, output } => single(Single::new("factor_prime").field(&field).set("p", p), &output),
        Cmd::Ec { cmd: EcCmd::Mul { curve, n, output } } => single(Single::new("ec_mul").curve(&curve).set("n", n), &output),
        Cmd::Ec { cmd: EcCmd::Denom { curve, n, output } } => {
            single(Single::new("ec_denom").curve(&curve).set("n", n), &output)
        }
        Cmd::LemmaSuite { name, curve, bound, p, q, m, primes, output } => {
            let mut s = Single::new("lemma_suite");
            s.set("suite", name).curve(&curve).opt("bound", bound).opt("p", p).opt("q", q);
            s.opt("m", m).opt("primes", primes);
            single(&s, &output)
        }
        Cmd::Witness { cmd: WitnessCmd::Construct(a) } => single(&witness_task(&a, "construct"), &a.output),
        Cmd::Witness { cmd: WitnessCmd::Verify { args, bundle } } => {
            let mut s = witness_task(&args, "verify");
            s.set("bundle", bundle.display().to_string());
            single(&s, &args.output)
        }
        Cmd::Density { field, x, csv, output } => {
            let mut s = Single::new("density");
            s.field(&field).set("X", x).opt("csv", csv.map(|p| p.display().to_string()));
            single(&s, &output)
        }
        Cmd::Rank1 { cmd: Rank1Cmd::Model { curve, p, q, count, budget, output } } => {
            let mut s = Single::new("rank1_model");
            s.curve(&curve).opt("p", p).opt("q", q).opt("count", count).opt("budget", budget);
            single(&s, &output)
        }
        Cmd::Pell { d, output } => single(Single::new("pell").set("d", d), &output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    ExitCode::from(dispatch(cli.cmd) as u8)
}
