//! The `tdlf` command line: every command prints one canonical JSON document.
//!
//! Exit codes: 0 success, 1 other error, 2 parse error, 3 precision or
//! window error, 4 admissibility error, 5 unknown module name.

pub mod expr;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::duality::{dual_seminorm, pairing, polar, pseudo_polar};
use crate::error::{Error, Result};
use crate::json::{to_canonical, value_to_canonical};
use crate::oracle::{brute_minplus, brute_pairing, brute_seminorm, sample_elements, SampleConfig, Window};
use crate::seminorm::SeminormSpec;
use crate::seqspec::{ExtInt, SeqSpec};
use crate::series::{FieldKind, Series};
use crate::submodule::SubmoduleSpec;

pub use expr::{parse_series, render_series};

#[derive(Parser, Debug)]
#[command(name = "tdlf", version, about = "Seminorms, lattices and duality on K((t)) and K{{t}}")]
pub struct Cli {
    #[command(flatten)]
    pub globals: Globals,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Globals {
    /// Residue characteristic p of K.
    #[arg(long, global = true)]
    pub prime: Option<u64>,
    /// Digits of p-adic precision given to literals.
    #[arg(long, global = true, env = "TDLF_PRECISION", default_value_t = crate::padic::DEFAULT_PRECISION)]
    pub precision: i64,
    /// Index window `lo,hi` for oracle enumeration and sampling.
    #[arg(long, global = true, default_value = "-20,20", value_parser = parse_window, allow_hyphen_values = true)]
    pub window: Window,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Field for series literals: `equal` (K((t))) or `mixed` (K{{t}}).
    #[arg(long, global = true)]
    pub field: Option<FieldKind>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a series and print it, optionally combined with a second one.
    Eval {
        #[arg(long)]
        series: String,
        #[arg(long, requires = "with")]
        op: Option<Op>,
        #[arg(long)]
        with: Option<String>,
    },
    /// Exponent e of ‖x‖ = q^e for an admissible seminorm.
    Norm {
        #[arg(long)]
        series: String,
        #[arg(long)]
        seminorm: String,
        /// Also test membership in the closed ball of exponent E.
        #[arg(long, allow_hyphen_values = true)]
        ball: Option<i64>,
    },
    /// Open lattice / bounded / compactoid flags of a submodule.
    Classify {
        #[arg(long)]
        module: String,
        /// Include completeness, c-compactness and closedness of named modules.
        #[arg(long)]
        known: bool,
    },
    Polar {
        #[arg(long)]
        module: String,
    },
    PseudoPolar {
        #[arg(long)]
        module: String,
    },
    /// The pairing Σ x_i y_{-i}.
    Pair {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        /// Required absolute precision (defaults to --precision).
        #[arg(long, allow_hyphen_values = true)]
        target: Option<i64>,
    },
    /// A submodule containing all products of the two.
    ProductBound {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// The seminorm n_i = -k_{-i} dual to a compactoid (or bounded) submodule.
    DualNorm {
        #[arg(long)]
        module: String,
    },
    /// Field valuation and rank-two valuation of a series.
    Valuation {
        #[arg(long)]
        series: String,
    },
    /// Brute-force reference computations.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
}

#[derive(Subcommand, Debug)]
pub enum OracleCommand {
    Seminorm {
        #[arg(long)]
        series: String,
        #[arg(long)]
        seminorm: String,
    },
    Minplus {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
    },
    Pair {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    Sample {
        #[arg(long)]
        module: String,
        #[arg(long, default_value_t = 8)]
        count: usize,
    },
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
pub enum Op {
    Add,
    Sub,
    Mul,
}

fn parse_window(s: &str) -> std::result::Result<Window, String> {
    let (a, b) = s.split_once(',').ok_or("expected `lo,hi`")?;
    let lo: i64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: i64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if lo > hi {
        return Err(format!("empty window {lo},{hi}"));
    }
    Ok((lo, hi))
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } => 2,
        Error::PrecisionExhausted(_) | Error::WindowInsufficient(_) | Error::WindowTooLarge(_) => 3,
        Error::NonAdmissibleSequence(_) | Error::NotCompactoid | Error::NotBounded | Error::NonConvergentValues(_) => 4,
        Error::UnknownName(_) => 5,
        _ => 1,
    }
}

fn json_error(e: serde_json::Error, what: &str) -> Error {
    Error::Parse { line: e.line(), column: e.column(), message: format!("invalid {what} JSON: {e}") }
}

fn is_json(s: &str) -> bool {
    s.trim_start().starts_with('{')
}

struct Ctx {
    prime: u64,
    digits: i64,
    window: Window,
    seed: u64,
    field: Option<FieldKind>,
}

impl Ctx {
    fn series(&self, s: &str) -> Result<Series> {
        if is_json(s) {
            let x: Series = serde_json::from_str(s).map_err(|e| json_error(e, "series"))?;
            if x.prime() != self.prime {
                return Err(Error::IncompatiblePrimes(self.prime, x.prime()));
            }
            if self.field.is_some_and(|f| f != x.kind()) {
                return Err(Error::KindMismatch(format!("--field {} but the series is {}", self.field.unwrap().name(), x.kind().name())));
            }
            return Ok(x);
        }
        parse_series(s, self.prime, self.digits, self.field)
    }

    fn series_for(&self, s: &str, field: FieldKind) -> Result<Series> {
        Ctx { field: Some(field), ..*self }.series(s)
    }
}

fn module(s: &str) -> Result<SubmoduleSpec> {
    if is_json(s) {
        serde_json::from_str(s).map_err(|e| json_error(e, "submodule"))
    } else {
        SubmoduleSpec::named(s)
    }
}

fn seminorm(s: &str) -> Result<SeminormSpec> {
    let n: SeminormSpec = serde_json::from_str(s).map_err(|e| json_error(e, "seminorm"))?;
    n.validate()?;
    Ok(n)
}

fn seqspec(s: &str) -> Result<SeqSpec> {
    serde_json::from_str(s).map_err(|e| json_error(e, "sequence"))
}

fn series_json(x: &Series, digits: i64) -> Value {
    json!({ "series": x, "text": render_series(x, digits) })
}

fn ext(e: ExtInt) -> Value {
    serde_json::to_value(e).expect("serializable")
}

fn execute(globals: &Globals, command: &Command) -> Result<Value> {
    let prime = globals.prime.ok_or_else(|| Error::InvalidInput("--prime is required".into()))?;
    crate::padic::check_prime(prime)?;
    let ctx = Ctx { prime, digits: globals.precision, window: globals.window, seed: globals.seed, field: globals.field };
    let to_value = |v: &dyn erased::Ser| v.value();
    Ok(match command {
        Command::Eval { series, op, with } => {
            let x = ctx.series(series)?;
            let out = match (op, with) {
                (Some(op), Some(y)) => {
                    let y = ctx.series_for(y, x.kind())?;
                    match op {
                        Op::Add => x.add(&y)?,
                        Op::Sub => x.sub(&y)?,
                        Op::Mul => x.mul(&y)?,
                    }
                }
                _ => x,
            };
            series_json(&out, ctx.digits)
        }
        Command::Norm { series, seminorm: n, ball } => {
            let n = seminorm(n)?;
            let x = ctx.series_for(series, n.field)?;
            let e = n.eval_exponent(&x)?;
            match ball {
                Some(b) => json!({ "exponent": to_value(&e), "ball": to_value(&n.closed_ball_test(&x, *b)) }),
                None => to_value(&e),
            }
        }
        Command::Classify { module: m, known } => {
            if *known {
                to_value(&SubmoduleSpec::known_classification(m)?)
            } else {
                to_value(&module(m)?.classify())
            }
        }
        Command::Polar { module: m } => to_value(&polar(&module(m)?)),
        Command::PseudoPolar { module: m } => to_value(&pseudo_polar(&module(m)?)),
        Command::Pair { x, y, target } => {
            let x = ctx.series(x)?;
            let y = ctx.series_for(y, x.kind())?;
            pairing(&x, &y, target.unwrap_or(ctx.digits))?.to_json()
        }
        Command::ProductBound { a, b } => to_value(&module(a)?.product_bound(&module(b)?)?),
        Command::DualNorm { module: m } => to_value(&dual_seminorm(&module(m)?)?),
        Command::Valuation { series } => {
            let x = ctx.series(series)?;
            let rank2 = match &x {
                Series::Equal(s) => s.rank2()?,
                Series::Mixed(s) => s.rank2()?,
            };
            let mut out = json!({ "rank2": [ext(rank2.0), ext(rank2.1)] });
            if let Series::Mixed(s) = &x {
                let v = s.field_valuation();
                out["field"] = json!({ "value": ext(v.value), "exact": v.exact });
            }
            out
        }
        Command::Oracle { command } => match command {
            OracleCommand::Seminorm { series, seminorm: n } => {
                let n = seminorm(n)?;
                let x = ctx.series_for(series, n.field)?;
                json!({ "exponent": ext(brute_seminorm(&n, &x, ctx.window)), "window": [ctx.window.0, ctx.window.1] })
            }
            OracleCommand::Minplus { a, b, k } => {
                let v = brute_minplus(&seqspec(a)?, &seqspec(b)?, *k, ctx.window)?;
                json!({ "k": k, "value": ext(v) })
            }
            OracleCommand::Pair { x, y } => {
                let x = ctx.series(x)?;
                let y = ctx.series_for(y, x.kind())?;
                brute_pairing(&x, &y, ctx.window)?.to_json()
            }
            OracleCommand::Sample { module: m, count } => {
                let m = module(m)?;
                let cfg = SampleConfig { seed: ctx.seed, count: *count, window: ctx.window, precision: ctx.digits };
                let xs = sample_elements(&m, ctx.prime, &cfg);
                Value::Array(xs.iter().map(|x| series_json(x, ctx.digits)).collect())
            }
        },
    })
}

mod erased {
    use serde::Serialize;
    use serde_json::Value;

    pub trait Ser {
        fn value(&self) -> Value;
    }

    impl<T: Serialize> Ser for T {
        fn value(&self) -> Value {
            serde_json::to_value(self).expect("serializable")
        }
    }
}

/// Outcome of one invocation: exit code, standard output, standard error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the command line given by `args` (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli.globals, &cli.command) {
        Ok(v) => Outcome { code: 0, stdout: value_to_canonical(&v) + "\n", stderr: String::new() },
        Err(e) => {
            let mut err = json!({ "error": e.to_string() });
            if let Error::Parse { line, column, .. } = &e {
                err["line"] = json!(line);
                err["column"] = json!(column);
            }
            Outcome { code: exit_code(&e), stdout: String::new(), stderr: to_canonical(&err) + "\n" }
        }
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn main() -> i32 {
    let out = run(std::env::args_os());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tdlf(args: &[&str]) -> Outcome {
        run(std::iter::once("tdlf").chain(args.iter().copied()))
    }

    #[test]
    fn norm_example() {
        let n = r#"{"window":{},"left":{"kind":"const","value":0},"right":{"kind":"const","value":"-inf"},"field":"mixed"}"#;
        let out = tdlf(&["--prime", "5", "norm", "--series", "t^-3/p", "--seminorm", n]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        assert_eq!(out.stdout, "{\"exact\":true,\"exponent\":1}\n");
    }

    #[test]
    fn module_commands() {
        let out = tdlf(&["--prime", "3", "classify", "--module", "O{{t}}"]);
        assert_eq!(out.stdout, "{\"bounded\":true,\"compactoid\":false,\"open_lattice\":false}\n");
        let out = tdlf(&["--prime", "3", "pseudo-polar", "--module", "O{{t}}"]);
        assert_eq!(out.stdout, to_canonical(&SubmoduleSpec::named("p{{t}}").unwrap()) + "\n");
        let out = tdlf(&["--prime", "3", "dual-norm", "--module", "O{{t}}"]);
        assert_eq!(out.code, 4);
        let out = tdlf(&["--prime", "3", "classify", "--module", "Q{{t}}"]);
        assert_eq!(out.code, 5);
    }

    #[test]
    fn parse_errors_exit_two() {
        let out = tdlf(&["--prime", "5", "eval", "--series", "t^^2"]);
        assert_eq!(out.code, 2);
        assert!(out.stderr.contains("\"column\":3"), "{}", out.stderr);
    }

    #[test]
    fn precision_errors_exit_three() {
        let x = "1 + tail_right(0, 0)";
        let y = "1 + tail_left(0, 1, 0)";
        let out = tdlf(&["--prime", "5", "pair", "--x", x, "--y", y, "--target", "10"]);
        assert_eq!(out.code, 3, "{out:?}");
        let out = tdlf(&["--prime", "5", "pair", "--x", x, "--y", y, "--target", "1"]);
        assert_eq!(out.code, 0, "{out:?}");
    }

    #[test]
    fn window_flag_accepts_negative_start() {
        let out = tdlf(&["--prime", "5", "--window", "-3,3", "oracle", "sample", "--module", "O{{t}}", "--count", "2"]);
        assert_eq!(out.code, 0, "{out:?}");
    }
}
