//! Command-line front end. Every command prints one JSON document
//! `{manifest, report}` on stdout; diagnostics go to stderr.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 a checked bound failed.

use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::expsum::{verify_weil, VerifyConfig, DEFAULT_BUDGET};
use crate::numtheory::{goldbach_pairs, Prime};
use crate::pointsets::{
    find_equivalence_witness, intersect, intersection_profile, parameterized_pset, sets_equal, Family, PSetParams,
    PointSet, PointSetDoc, SetSpec,
};
use crate::quadrature::qmc_mean;
use crate::rng;
use crate::sensing::{coherence, coherence_gram_oracle, recovery_experiment, ExperimentConfig, DEFAULT_GRAM_BUDGET};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Debug, Parser, Serialize)]
#[command(name = "psets", version, about = "Deterministic p-sets: construction, exponential-sum checks, sparse recovery")]
pub struct Cli {
    /// Worker threads for parallel paths (output does not depend on it)
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Construct a point set and print it
    Gen(SetArgs),
    /// Check the applicable exponential-sum bound over the full frequency box
    CheckWeil {
        #[command(flatten)]
        set: SetArgs,
        /// Read the set from `gen` output instead of constructing it
        #[arg(long)]
        from_file: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Decide whether two parameterized p-sets coincide
    Equal {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',')]
        a: Vec<u64>,
        #[arg(long, value_parser = parse_bits)]
        eps: Option<Bits>,
        #[arg(long, value_delimiter = ',')]
        b: Vec<u64>,
        #[arg(long, value_parser = parse_bits)]
        eps_b: Option<Bits>,
        /// Also compare the generated sets point by point
        #[arg(long)]
        oracle: bool,
    },
    /// Mutual incoherence of the sampling matrix on [-s, s]^d
    Coherence {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        s: u64,
        /// Cross-check against the explicit Gram matrix
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = DEFAULT_GRAM_BUDGET)]
        budget: u128,
    },
    /// Recover random sparse trigonometric polynomials by OMP
    Recover {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        s: u64,
        #[arg(long = "M")]
        #[serde(rename = "M")]
        m: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        random_magnitude: bool,
    },
    /// List the prime pairs p ≤ q with p + q = m
    Goldbach {
        #[arg(long)]
        m: u64,
    },
    /// Average a seeded random sparse integrand over a set
    Integrate {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, default_value_t = 2)]
        s: u64,
        /// Number of terms in the integrand
        #[arg(long = "M", default_value_t = 4)]
        #[serde(rename = "M")]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        random_magnitude: bool,
    },
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SetArgs {
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    /// Comma-separated coefficients a_1..a_d
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub a: Vec<u64>,
    /// d-1 bits, e.g. `01` or `0,1`
    #[arg(long, value_parser = parse_bits)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<Bits>,
    /// Second coefficient vector of a (p,p)-set
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub b: Vec<u64>,
    #[arg(long, value_parser = parse_bits)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_b: Option<Bits>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Bits(pub Vec<u8>);

fn parse_bits(s: &str) -> std::result::Result<Bits, String> {
    s.chars()
        .filter(|c| *c != ',')
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(format!("expected 0/1 digits, got {c:?}")),
        })
        .collect::<std::result::Result<_, _>>()
        .map(Bits)
}

fn nonempty<T: Clone>(v: &[T]) -> Option<Vec<T>> {
    (!v.is_empty()).then(|| v.to_vec())
}

impl SetArgs {
    pub fn spec(&self) -> Result<SetSpec> {
        let missing = |flag: &str| Error::InvalidParams(format!("--{flag} is required"));
        let mut spec = SetSpec::new(
            self.family.ok_or_else(|| missing("family"))?,
            self.d.ok_or_else(|| missing("d"))?,
            self.p.ok_or_else(|| missing("p"))?,
        );
        spec.q = self.q;
        spec.a = nonempty(&self.a);
        spec.eps = self.eps.clone().map(|b| b.0);
        spec.b = nonempty(&self.b);
        spec.eps_b = self.eps_b.clone().map(|b| b.0);
        Ok(spec)
    }
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    command: &'a str,
    parameters: Value,
    version: &'static str,
    seed: Option<u64>,
    timestamp: u64,
    output_digest: String,
}

/// Strips wall-clock fields so the digest depends only on the inputs.
fn without_timing(v: &Value) -> Value {
    match v {
        Value::Object(m) => Value::Object(
            m.iter()
                .filter(|(k, _)| k.as_str() != "wall_ms")
                .map(|(k, v)| (k.clone(), without_timing(v)))
                .collect(),
        ),
        Value::Array(a) => Value::Array(a.iter().map(without_timing).collect()),
        other => other.clone(),
    }
}

pub fn digest(report: &Value) -> String {
    let bytes = serde_json::to_vec(&without_timing(report)).expect("JSON values serialize");
    format!("{:x}", Sha256::digest(bytes))
}

struct Outcome {
    report: Value,
    violation: Option<String>,
}

impl Outcome {
    fn ok(report: impl Serialize) -> Result<Self> {
        Ok(Outcome {
            report: to_value(report),
            violation: None,
        })
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn pset_params(d: usize, p: u64, a: &[u64], eps: &Option<Bits>) -> Result<PSetParams> {
    let a = if a.is_empty() { vec![1; d] } else { a.to_vec() };
    if a.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: a.len() });
    }
    let eps = eps.clone().map_or_else(|| vec![0; d.saturating_sub(1)], |b| b.0);
    PSetParams::new(Prime::new(p)?, a, eps)
}

fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Gen(args) => Outcome::ok(args.spec()?.build()?.to_doc()),
        Command::CheckWeil { set, from_file, budget } => {
            let cfg = VerifyConfig { budget: *budget };
            let (x, source) = match from_file {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
                    let mut value: Value = serde_json::from_str(&text).map_err(|e| Error::Malformed(e.to_string()))?;
                    // accept either a full `gen` document or its bare report
                    if let Some(report) = value.get_mut("report") {
                        value = report.take();
                    }
                    let doc: PointSetDoc = serde_json::from_value(value).map_err(|e| Error::Malformed(e.to_string()))?;
                    let rebuilt = doc.spec.build()?;
                    let loaded = doc.into_set()?;
                    let matches = loaded.points() == rebuilt.points();
                    if !matches {
                        return Err(Error::Malformed("stored points differ from the construction".into()));
                    }
                    (loaded, json!({ "file": path, "matches_construction": matches }))
                }
                None => (set.spec()?.build()?, Value::Null),
            };
            let report = verify_weil(&x, &cfg)?;
            let violation = (!report.passed()).then(|| {
                let ks: Vec<String> = report.violations.iter().map(|v| format!("{:?}", v.k.0)).collect();
                format!(
                    "{} frequencies exceed the bound {}: {}",
                    report.n_violations,
                    report.bound_value,
                    ks.join(" ")
                )
            });
            let mut value = to_value(&report);
            if !source.is_null() {
                value["source"] = source;
            }
            Ok(Outcome {
                report: value,
                violation,
            })
        }
        Command::Equal {
            d,
            p,
            a,
            eps,
            b,
            eps_b,
            oracle,
        } => {
            let pa = pset_params(*d, *p, a, eps)?;
            let pb = pset_params(*d, *p, b, eps_b)?;
            let verdict = find_equivalence_witness(&pa, &pb)?;
            let mut report = json!({ "a": pa, "b": pb, "equivalence": verdict });
            let profile = if pa.eps() != pb.eps() {
                Some(intersection_profile(&pa, &pb)?)
            } else {
                None
            };
            if let Some(pr) = &profile {
                report["intersection_profile"] = to_value(pr);
            }
            let mut violation = None;
            if *oracle {
                let (x, y) = (parameterized_pset(&pa), parameterized_pset(&pb));
                let equal = sets_equal(&x, &y);
                let meet = intersect(&x, &y)?.len();
                report["oracle"] = json!({ "sets_equal": equal, "intersection_size": meet });
                if equal != verdict.is_equal() {
                    violation = Some(format!("witness search says {}, enumeration says {equal}", verdict.is_equal()));
                } else if let Some(pr) = profile.as_ref().filter(|_| !equal) {
                    if pr.certified_trivial && meet != 1 {
                        violation = Some(format!("certified trivial intersection has {meet} points"));
                    } else if pr.intersection_bound.is_some_and(|bd| meet > bd) {
                        violation = Some(format!("intersection has {meet} points, bound {:?}", pr.intersection_bound));
                    }
                }
            }
            Ok(Outcome { report, violation })
        }
        Command::Coherence { set, s, oracle, budget } => {
            let x = set.spec()?.build()?;
            let rep = coherence(&x, *s)?;
            let mut violation = (!rep.within_bound())
                .then(|| format!("mu = {} exceeds {:?} at {:?}", rep.mu, rep.certified_bound, rep.argmax_pair));
            let mut report = json!({ "coherence": rep });
            if *oracle {
                let gram = coherence_gram_oracle(&x, *s, *budget)?;
                let diff = (gram.mu - rep.mu).abs();
                if diff > 1e-9 && violation.is_none() {
                    violation = Some(format!("Gram oracle disagrees: {} vs {}", gram.mu, rep.mu));
                }
                report["oracle_mu"] = json!(gram.mu);
                report["oracle_agrees"] = json!(diff <= 1e-9);
            }
            Ok(Outcome { report, violation })
        }
        Command::Recover {
            set,
            s,
            m,
            trials,
            seed,
            tol,
            random_magnitude,
        } => {
            let cfg = ExperimentConfig {
                set: set.spec()?,
                s: *s,
                sparsity: *m,
                trials: *trials,
                seed: *seed,
                tol: *tol,
                random_magnitude: *random_magnitude,
            };
            let summary = recovery_experiment(&cfg)?;
            let violation = (summary.guarantee_satisfied && summary.successes < summary.trials).then(|| {
                format!(
                    "mu = {} < 1/(2M-1) but only {}/{} recoveries were exact",
                    summary.mu, summary.successes, summary.trials
                )
            });
            Ok(Outcome {
                report: to_value(summary),
                violation,
            })
        }
        Command::Goldbach { m } => {
            let pairs = goldbach_pairs(*m)?;
            Outcome::ok(json!({ "m": m, "pairs": pairs }))
        }
        Command::Integrate {
            set,
            s,
            m,
            seed,
            random_magnitude,
        } => {
            let x: PointSet = set.spec()?.build()?;
            let f = rng::sparse_poly(&mut rng::stream(*seed, 0), x.dim(), *s, *m, *random_magnitude);
            let est = qmc_mean(&f, &x)?;
            let err = (est.mean - f.constant_term()).norm();
            let violation = est
                .error_bound
                .filter(|bd| err > *bd)
                .map(|bd| format!("|mean - c0| = {err} exceeds {bd}"));
            Ok(Outcome {
                report: json!({
                    "set": x.label(),
                    "integrand": f,
                    "exact": f.constant_term(),
                    "estimate": est,
                    "abs_error": err,
                }),
                violation,
            })
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Gen(_) => "gen",
        Command::CheckWeil { .. } => "check-weil",
        Command::Equal { .. } => "equal",
        Command::Coherence { .. } => "coherence",
        Command::Recover { .. } => "recover",
        Command::Goldbach { .. } => "goldbach",
        Command::Integrate { .. } => "integrate",
    }
}

fn command_seed(cmd: &Command) -> Option<u64> {
    match cmd {
        Command::Recover { seed, .. } | Command::Integrate { seed, .. } => Some(*seed),
        _ => None,
    }
}

/// Parses `argv` (including the program name), runs the command and writes the
/// JSON document to `out`. Returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli.command)),
            Err(e) => Err(Error::InvalidParams(e.to_string())),
        },
        None => execute(&cli.command),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let name = command_name(&cli.command);
    let mut parameters = to_value(&cli.command);
    if let Value::Object(m) = &mut parameters {
        // the externally tagged enum wraps parameters in the command name
        if let Some(inner) = m.remove(name) {
            parameters = inner;
        }
    }
    let manifest = Manifest {
        command: name,
        parameters,
        version: env!("CARGO_PKG_VERSION"),
        seed: command_seed(&cli.command),
        timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        output_digest: digest(&outcome.report),
    };
    let doc = json!({ "manifest": manifest, "report": outcome.report });
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("JSON values serialize"));
    match outcome.violation {
        Some(msg) => {
            let _ = writeln!(err, "bound violation: {msg}");
            EXIT_VIOLATION
        }
        None => EXIT_OK,
    }
}
