use std::collections::BTreeMap;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;

use padic_exp::frontend::document::CertificateDocument;
use padic_exp::frontend::run::{
    eval_term, exit_code, run_decide, run_lift, run_no_root, verdict_exit_code,
};
use padic_exp::frontend::{load_config, verify, Config, Verification};
use padic_exp::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "padic-exp", version, about = "Existential sentences over (Z_p, +, *, E_p)")]
struct Cli {
    #[command(flatten)]
    options: Options,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Options {
    /// Config file of `key = value` lines (default: $PADIC_EXP_CONFIG, then ./padic-exp.conf).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Prime p (default 5).
    #[arg(long, global = true)]
    prime: Option<u64>,
    /// Starting precision in p-adic digits.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Largest precision tried by Hensel checks.
    #[arg(long, global = true)]
    precision_cap: Option<u32>,
    /// Total degree of cofactor pool polynomials.
    #[arg(long, global = true)]
    budget_degree: Option<u32>,
    /// Coefficient height of pool polynomials and linear relations.
    #[arg(long, global = true)]
    budget_height: Option<u32>,
    /// Height of integer Hensel centers.
    #[arg(long, global = true)]
    budget_center_height: Option<u32>,
    /// Largest ball radius exponent.
    #[arg(long, global = true)]
    budget_radius: Option<u32>,
    /// Largest residue level in refutations.
    #[arg(long, global = true)]
    budget_level: Option<u32>,
    /// Enumeration steps per search side.
    #[arg(long, global = true)]
    budget_steps: Option<u64>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Log level (error, warn, info, debug, trace).
    #[arg(long, global = true)]
    log: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide a sentence and emit its certificate document.
    Decide {
        /// File holding the sentence (`-` for stdin).
        file: Option<PathBuf>,
        #[arg(short = 'e', long = "expr", conflicts_with = "file")]
        expr: Option<String>,
    },
    /// Re-check a certificate document.
    Verify { document: PathBuf },
    /// Evaluate a term modulo p^precision.
    Eval {
        #[arg(short = 'e', long = "expr")]
        expr: String,
        /// Assignments such as `x1=3,x2=-1`.
        #[arg(long, default_value = "")]
        at: String,
    },
    /// Refute a conjunction of equations on a ball.
    NoRoot {
        #[arg(short = 'e', long = "expr")]
        expr: String,
        /// Center coordinates followed by the radius, e.g. `1,2` or `0,4,1`.
        #[arg(long)]
        ball: String,
    },
    /// Check the Hensel condition of a square system and lift its root.
    Lift {
        #[arg(short = 'e', long = "expr")]
        expr: String,
        /// Integer center, e.g. `1` or `1,0`.
        #[arg(long)]
        center: String,
        #[arg(long, default_value_t = 0)]
        slack: u32,
        /// Digits of the lifted root.
        #[arg(long, default_value_t = 20)]
        target: u32,
    },
}

fn config(o: &Options) -> Result<Config> {
    let mut c = load_config(o.config.as_deref())?;
    let b = &mut c.budget;
    let pairs: [(&mut u32, Option<u32>); 7] = [
        (&mut b.precision, o.precision),
        (&mut b.hensel_precision_cap, o.precision_cap),
        (&mut b.max_degree, o.budget_degree),
        (&mut b.max_coeff_height, o.budget_height),
        (&mut b.max_center_height, o.budget_center_height),
        (&mut b.max_radius, o.budget_radius),
        (&mut b.max_level, o.budget_level),
    ];
    for (field, value) in pairs {
        if let Some(v) = value {
            *field = v;
        }
    }
    if let Some(s) = o.budget_steps {
        b.max_steps = s;
    }
    if let Some(p) = o.prime {
        c.prime = p;
    }
    c.validate()?;
    Ok(c)
}

fn integers(text: &str) -> Result<Vec<i64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::Usage(format!("`{s}` is not an integer")))
        })
        .collect()
}

fn assignment(text: &str) -> Result<BTreeMap<u32, BigInt>> {
    let mut out = BTreeMap::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let bad = || Error::Usage(format!("`{part}` is not of the form x<i>=<integer>"));
        let (name, value) = part.split_once('=').ok_or_else(bad)?;
        let idx = name.trim().strip_prefix('x').and_then(|d| d.parse().ok()).ok_or_else(bad)?;
        out.insert(idx, value.trim().parse().map_err(|_| bad())?);
    }
    Ok(out)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n"))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn read_sentence(file: Option<PathBuf>, expr: Option<String>) -> Result<String> {
    match (file, expr) {
        (_, Some(e)) => Ok(e),
        (Some(p), None) if p.as_os_str() != "-" => Ok(std::fs::read_to_string(p)?),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    let o = &cli.options;
    match cli.command {
        Command::Decide { file, expr } => {
            let c = config(o)?;
            let sentence = read_sentence(file, expr)?;
            let doc = run_decide(sentence.trim(), &c)?;
            emit(&o.out, &doc.to_json())?;
            eprintln!("{}", doc.verdict);
            Ok(verdict_exit_code(&doc))
        }
        Command::Verify { document } => {
            let doc = CertificateDocument::from_json(&std::fs::read_to_string(document)?)?;
            match verify(&doc)? {
                Verification::Accepted => {
                    emit(&o.out, "accepted")?;
                    Ok(0)
                }
                Verification::Rejected(reason) => {
                    emit(&o.out, &format!("rejected: {reason}"))?;
                    Ok(1)
                }
            }
        }
        Command::Eval { expr, at } => {
            let c = config(o)?;
            let v = eval_term(&expr, &assignment(&at)?, c.prime, c.budget.precision)?;
            emit(
                &o.out,
                &format!("{} (mod {}^{}), valuation {}", v.residue(), c.prime, c.budget.precision, v.valuation()),
            )?;
            Ok(0)
        }
        Command::NoRoot { expr, ball } => {
            let c = config(o)?;
            let mut nums = integers(&ball)?;
            let radius = nums
                .pop()
                .filter(|&t| t >= 0)
                .ok_or_else(|| Error::Usage("--ball needs a non-negative radius".into()))?;
            match run_no_root(&expr, &nums, radius as u32, &c)? {
                Some(cert) => {
                    emit(&o.out, &format!("no root on {} (level {})", cert.ball, cert.level))?;
                    Ok(0)
                }
                None => {
                    emit(&o.out, "not refuted within the budget")?;
                    Ok(2)
                }
            }
        }
        Command::Lift {
            expr,
            center,
            slack,
            target,
        } => {
            let c = config(o)?;
            match run_lift(&expr, &integers(&center)?, slack, target, &c)? {
                Some((cert, lift)) => {
                    let root: Vec<String> = lift.approx_root.iter().map(|b| b.residue().to_string()).collect();
                    emit(
                        &o.out,
                        &format!(
                            "v(det J) = {}, precision used {}, residuals {:?}\nroot = ({}) with residual valuation >= {}\ntrace {:?}",
                            cert.det_valuation(),
                            cert.precision_used(),
                            cert.residual_valuations().iter().map(ToString::to_string).collect::<Vec<_>>(),
                            root.join(", "),
                            lift.guaranteed_precision,
                            lift.trace
                        ),
                    )?;
                    Ok(0)
                }
                None => {
                    emit(&o.out, "Hensel condition not met")?;
                    Ok(2)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = cli.options.log.clone().unwrap_or_else(|| "warn".into());
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
