mod config;
mod report;

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use euler_rigidity::analytic::{self, EvalConfig, Region, ScanGrid, DEFAULT_PRIME_LIMIT};
use euler_rigidity::datum::{self, EulerDatum};
use euler_rigidity::family::{self, FamilySpec};
use euler_rigidity::{verify, witt, CharParam};

use config::{FileConfig, CONFIG_ENV};

/// Prime limit `eval` uses when neither `-P` nor the config file sets one.
const EVAL_PRIME_LIMIT: u64 = 1_000_000;

#[derive(Parser, Debug)]
#[command(name = "euler-rigidity", version)]
#[command(about = "Rigidity of Euler products built from virtual characters")]
struct Cli {
    /// TOML file with default settings
    #[arg(long, global = true, env = CONFIG_ENV, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output format
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the report to a file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Unitarity tests, exponent table and the rigidity verdict
    Analyze {
        #[command(flatten)]
        family: FamilyArgs,
        /// Decomposition level M (defaults to max(6, degree))
        #[arg(short = 'M', long = "level")]
        level: Option<u32>,
        /// Number of sample points for the unitarity witness search
        #[arg(long)]
        samples: Option<usize>,
        /// Distance from the unit circle that counts as a witness
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Evaluates the truncated and the continued Euler product at one point
    Eval {
        #[command(flatten)]
        family: FamilyArgs,
        /// Evaluation point, e.g. 2+0i, 0.6-1.5i, 3
        #[arg(long = "s", allow_hyphen_values = true, value_name = "RE+IMi")]
        s: String,
        #[arg(short = 'M', long = "level")]
        level: Option<u32>,
        /// Largest prime in truncated products (default 1000000 here)
        #[arg(short = 'P', long = "prime-limit")]
        prime_limit: Option<u64>,
        /// Norm list to evaluate over instead of the rational primes
        #[arg(long, value_name = "PATH")]
        datum: Option<PathBuf>,
    },
    /// Candidate poles and zeros s = (1 + iq)/m from the exponent table
    Poles {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(short = 'M', long = "level")]
        level: Option<u32>,
        /// Real-part window, MIN:MAX
        #[arg(long, allow_hyphen_values = true, value_parser = parse_range, value_name = "MIN:MAX")]
        re: Option<(f64, f64)>,
        /// Imaginary-part window, MIN:MAX
        #[arg(long, allow_hyphen_values = true, value_parser = parse_range, value_name = "MIN:MAX")]
        im: Option<(f64, f64)>,
    },
    /// Continued product over a rectangular grid
    Scan {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(short = 'M', long = "level")]
        level: Option<u32>,
        #[arg(short = 'P', long = "prime-limit")]
        prime_limit: Option<u64>,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_range, value_name = "MIN:MAX", default_value = "0.3:1.5")]
        re: (f64, f64),
        #[arg(long, allow_hyphen_values = true, value_parser = parse_range, value_name = "MIN:MAX", default_value = "-10:10")]
        im: (f64, f64),
        #[arg(long, value_parser = parse_real, default_value = "0.1")]
        step: f64,
        /// Worker threads; the output does not depend on it
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Runs the built-in acceptance checks
    Verify {
        /// Run only this check (repeatable)
        #[arg(long = "check", value_name = "ID", value_parser = clap::value_parser!(u8).range(1..=8))]
        checks: Vec<u8>,
    },
}

#[derive(Args, Debug)]
#[group(id = "family", required = true, multiple = true)]
struct FamilyArgs {
    /// Three-parameter member a b c (rationals p/q)
    #[arg(long, num_args = 1.., value_name = "Q", conflicts_with_all = ["chain", "b"])]
    abc: Option<Vec<String>>,
    /// Chain member shifts a1 .. an, n >= 2 (rationals p/q)
    #[arg(long, num_args = 1.., value_name = "Q", requires = "b")]
    chain: Option<Vec<String>>,
    /// Top shift of the chain member
    #[arg(long = "b", value_name = "Q", requires = "chain")]
    b: Option<String>,
}

/// A failure with its stable code and exit status.
#[derive(Debug)]
pub struct CliError {
    code: &'static str,
    message: String,
    status: u8,
}

impl CliError {
    pub fn domain(code: &'static str, message: impl Into<String>) -> Self {
        CliError { code, message: message.into(), status: 1 }
    }

    fn usage(message: impl Into<String>) -> Self {
        CliError { code: "usage", message: message.into(), status: 2 }
    }
}

impl From<euler_rigidity::Error> for CliError {
    fn from(e: euler_rigidity::Error) -> Self {
        CliError::domain(e.code(), e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // keep the reason on one line
        let message = self.message.replace(['\n', '\r'], " ");
        write!(f, "error: {}: {}", self.code, message.trim())
    }
}

fn main() -> ExitCode {
    match Cli::try_parse_from(normalize_args(std::env::args_os())) {
        Ok(cli) => match run(cli) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(e),
        },
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                let _ = e.print();
                ExitCode::SUCCESS
            }
            ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => fail(CliError::usage("no subcommand given; see --help")),
            _ => fail(CliError::usage(clap_reason(&e))),
        },
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("{e}");
    ExitCode::from(e.status)
}

fn clap_reason(e: &clap::Error) -> String {
    let rendered = e.render().to_string();
    let reason: Vec<&str> = rendered
        .lines()
        .map(str::trim)
        .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("tip:") && !l.starts_with("For more information"))
        .filter(|l| !l.is_empty())
        .collect();
    if reason.is_empty() {
        return "invalid command line".into();
    }
    reason.join(" ").trim_start_matches("error:").trim().to_string()
}

/// Rewrites negative rationals such as `-1/2` to use U+2212 so that the
/// argument parser does not read them as flags. The rational parser accepts
/// either sign.
fn normalize_args(args: impl IntoIterator<Item = OsString>) -> Vec<OsString> {
    args.into_iter()
        .map(|arg| match arg.to_str() {
            Some(s) if is_negative_rational(s) => OsString::from(format!("\u{2212}{}", &s[1..])),
            _ => arg,
        })
        .collect()
}

fn is_negative_rational(s: &str) -> bool {
    let Some(body) = s.strip_prefix('-') else {
        return false;
    };
    let mut parts = body.split('/');
    let numer = parts.next().unwrap_or("");
    let denom = parts.next();
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    parts.next().is_none() && digits(numer) && denom.is_none_or(digits)
}

fn parse_real(text: &str) -> Result<f64, String> {
    let v: f64 = text.trim().replace('\u{2212}', "-").parse().map_err(|_| format!("not a number: {text:?}"))?;
    if !v.is_finite() {
        return Err(format!("not a finite number: {text:?}"));
    }
    Ok(v)
}

fn parse_range(text: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = text.split_once(':').ok_or_else(|| format!("expected MIN:MAX, got {text:?}"))?;
    Ok((parse_real(lo)?, parse_real(hi)?))
}

/// `a+bi`, `a-bi`, `a`, `bi`, `i`; `j` is accepted for `i`.
fn parse_complex(text: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::domain("parse-complex", format!("cannot parse {text:?} as a complex number re+imi"));
    let t: String = text.replace('\u{2212}', "-").chars().filter(|c| !c.is_whitespace()).collect();
    let finite = |v: f64| if v.is_finite() { Ok(v) } else { Err(bad()) };
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        let re = t.parse().map_err(|_| bad())?;
        return Ok(Complex64::new(finite(re)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_text, im_text) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let re: f64 = re_text.parse().map_err(|_| bad())?;
    let im: f64 = match im_text {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse().map_err(|_| bad())?,
    };
    Ok(Complex64::new(finite(re)?, finite(im)?))
}

fn parse_param(text: &str) -> Result<CharParam, CliError> {
    text.parse::<CharParam>().map_err(CliError::from)
}

impl FamilyArgs {
    fn spec(&self) -> Result<FamilySpec, CliError> {
        if let Some(abc) = &self.abc {
            if abc.len() != 3 {
                return Err(CliError::domain("arity", format!("--abc takes 3 rationals a b c, got {}", abc.len())));
            }
            let p: Vec<CharParam> = abc.iter().map(|t| parse_param(t)).collect::<Result<_, _>>()?;
            let [a, b, c] = <[CharParam; 3]>::try_from(p).expect("length checked");
            return Ok(FamilySpec::abc(a, b, c));
        }
        let chain = self.chain.as_deref().unwrap_or_default();
        if chain.len() < 2 {
            return Err(CliError::domain("arity", format!("--chain takes at least 2 rationals, got {}", chain.len())));
        }
        let shifts = chain.iter().map(|t| parse_param(t)).collect::<Result<_, _>>()?;
        let b = parse_param(self.b.as_deref().unwrap_or_default())?;
        Ok(FamilySpec::chain(shifts, b)?)
    }
}

/// Settings after merging flags, config file and defaults.
struct Settings {
    file: FileConfig,
}

impl Settings {
    fn eval_config(&self, level: Option<u32>, prime_limit: Option<u64>, default_prime_limit: u64) -> Result<EvalConfig, CliError> {
        let mut cfg = EvalConfig::default();
        cfg.prime_limit = prime_limit.or(self.file.prime_limit).unwrap_or(default_prime_limit);
        cfg.level = level.or(self.file.level).unwrap_or(cfg.level);
        cfg.zeta_terms = self.file.zeta_terms.unwrap_or(cfg.zeta_terms);
        cfg.bernoulli_terms = self.file.bernoulli_terms.unwrap_or(cfg.bernoulli_terms);
        cfg.threads = self.file.threads.unwrap_or(cfg.threads);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let settings = Settings { file: FileConfig::load(cli.config.as_deref())? };
    let format = cli.format;
    let output = match cli.command {
        Command::Analyze { family, level, samples, tol } => {
            let spec = family.spec()?;
            let level = level.or(settings.file.level).unwrap_or(witt::DEFAULT_LEVEL.max(spec.degree() as u32));
            let samples = samples.or(settings.file.samples).unwrap_or(family::DEFAULT_SAMPLE_COUNT);
            let tol = tol.or(settings.file.tol).unwrap_or(family::DEFAULT_WITNESS_TOL);
            let r = witt::classify_rigidity_with(&spec, level, samples, tol)?;
            report::analyze(&r, samples, tol, format.unwrap_or(Format::Text))
        }
        Command::Eval { family, s, level, prime_limit, datum: datum_path } => {
            let spec = family.spec()?;
            let s = parse_complex(&s)?;
            let cfg = settings.eval_config(level, prime_limit, EVAL_PRIME_LIMIT)?;
            let datum = match datum_path {
                Some(path) => datum::load_datum(&path).map_err(|e| match e {
                    euler_rigidity::Error::Io(io) => CliError::domain("io", format!("cannot read {}: {io}", path.display())),
                    other => other.into(),
                })?,
                None => EulerDatum::rational_primes(cfg.prime_limit)?,
            };
            let h = spec.polynomial();
            let direct = datum::datum_euler_product_eval(&datum, &h, s);
            let continued = witt::decompose(&h, cfg.level)
                .and_then(|d| datum::datum_continued_eval(&datum, &h, &d, s, &cfg));
            if let (Err(_), Err(e)) = (&direct, &continued) {
                return Err(CliError::domain(
                    e.code(),
                    format!("no method can evaluate at s = {}: {e}", report::complex(s)),
                ));
            }
            let e = report::Evaluation { spec: &spec, s, cfg: &cfg, datum: &datum, direct, continued };
            report::eval(&e, format.unwrap_or(Format::Text))
        }
        Command::Poles { family, level, re, im } => {
            let spec = family.spec()?;
            let cfg = settings.eval_config(level, None, DEFAULT_PRIME_LIMIT)?;
            let d = witt::decompose(&spec.polynomial(), cfg.level)?;
            let (re_min, re_max) = re.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
            let (im_min, im_max) = im.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
            let atlas = analytic::pole_atlas(&d, &Region::new(re_min, re_max, im_min, im_max));
            report::poles(&spec, &atlas, format.unwrap_or(Format::Text))
        }
        Command::Scan { family, level, prime_limit, re, im, step, threads } => {
            let spec = family.spec()?;
            let mut cfg = settings.eval_config(level, prime_limit, DEFAULT_PRIME_LIMIT)?;
            cfg.threads = threads.unwrap_or(cfg.threads);
            cfg.validate()?;
            let h = spec.polynomial();
            let d = witt::decompose(&h, cfg.level)?;
            let grid = ScanGrid { region: Region::new(re.0, re.1, im.0, im.1), step };
            let rows = analytic::boundary_scan(&h, &d, &grid, &cfg)?;
            report::scan(&rows, format.unwrap_or(Format::Csv))
        }
        Command::Verify { checks } => {
            let outcomes: Vec<_> = if checks.is_empty() {
                verify::run_all()
            } else {
                checks.iter().filter_map(|&id| verify::run(id)).collect()
            };
            let text = report::verify(&outcomes, format.unwrap_or(Format::Text));
            emit(&text, cli.out.as_deref())?;
            let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id.to_string()).collect();
            if !failed.is_empty() {
                return Err(CliError::domain("verify-failed", format!("checks {} failed", failed.join(", "))));
            }
            return Ok(());
        }
    };
    emit(&output, cli.out.as_deref())
}

fn emit(text: &str, out: Option<&std::path::Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::domain("io", format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| CliError::domain("io", format!("cannot write to stdout: {e}")))
        }
    }
}
