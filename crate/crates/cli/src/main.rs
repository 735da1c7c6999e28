use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use latexp_core::constructions::{
    spectrum_lattice, theorem4_lattice, totally_real_lattice, verify_corollary1_hypothesis, verify_spectrum_hypothesis,
    verify_theorem4_hypothesis, HypothesisReport,
};
use latexp_core::enumerate::{norm_minimum_estimate, record_points, EnumerationBudget};
use latexp_core::exact::{FieldElement, NumberField};
use latexp_core::exponents::{classical_exponent, estimate_omega, ExponentEstimate};
use latexp_core::interval::Interval;
use latexp_core::io;
use latexp_core::lattice::{complementary_dual_wedge, wedge_coeffs, Lattice};
use latexp_core::transfer::{case1_witness, case2_points, random_theorem2_trials};
use latexp_core::Error;

/// Diophantine exponents of lattices: record searches, transference checks and
/// exact constructions.
#[derive(Parser, Debug)]
#[command(name = "latexp", version)]
struct Cli {
    /// Worker threads; output does not depend on this value.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Working precision in bits (sets the decimal digits printed).
    #[arg(long, global = true, env = "LATEXP_PRECISION", default_value_t = 64, value_parser = clap::value_parser!(u32).range(8..=4096))]
    precision: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct LatticeArg {
    /// Lattice JSON file.
    #[arg(long)]
    lattice: PathBuf,
}

#[derive(Args, Debug)]
struct OutArg {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Record points and the exponent estimate. Writes the record CSV.
    Omega {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long)]
        xmax: f64,
        /// Fraction of the log-range used for the estimate.
        #[arg(long, default_value_t = 0.5)]
        tail: f64,
        #[arg(long)]
        max_points: Option<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Smallest coordinate product over nonzero points with |x| <= xmax.
    NormMin {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long)]
        xmax: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Dual lattice JSON.
    Dual {
        #[command(flatten)]
        lattice: LatticeArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Wedge coefficients of selected forms and the complementary dual identity.
    Wedge {
        #[command(flatten)]
        lattice: LatticeArg,
        /// 1-based row indices, e.g. 1,2.
        #[arg(long, value_delimiter = ',', required = true)]
        rows: Vec<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Seeded random trials of the unimodular box transference statement.
    CheckT2 {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Transference witness for a dual point with no vanishing coordinate.
    WitnessCase1 {
        #[command(flatten)]
        lattice: LatticeArg,
        /// Dual point preimage, e.g. 1,2,3.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        u: Vec<i64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Points in the hyperplane of a dual point whose last coordinate vanishes.
    WitnessCase2 {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        u: Vec<i64>,
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Build an example lattice.
    #[command(subcommand)]
    Construct(Construct),
    /// Check a hypothesis exactly on a lattice's forms.
    #[command(subcommand)]
    Verify(Verify),
    /// Classical simultaneous or multiplicative exponent of a vector θ.
    Classical {
        /// Minimal polynomial coefficients, constant term first (default: rationals).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        minpoly: Option<Vec<String>>,
        /// Isolating interval of the chosen root, e.g. 1,2.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        root_interval: Option<Vec<String>>,
        /// One θ_i as power-basis coordinates; repeat for each component.
        #[arg(long = "theta", required = true, allow_hyphen_values = true)]
        theta: Vec<String>,
        #[arg(long)]
        xmax: f64,
        #[arg(long)]
        multiplicative: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Exact values k(d-k-l)/(dl) for all admissible (d, k, l).
    SpectrumTable {
        #[arg(long)]
        dmax: usize,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand, Debug)]
enum Construct {
    /// Conjugate embeddings of Z[α] for a normal totally real field.
    TotallyReal {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        minpoly: Vec<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        root_interval: Vec<String>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Forms whose first d-1 rows have a vanishing first wedge coefficient.
    Theorem4 {
        #[arg(long)]
        dim: usize,
        /// Lattice JSON whose forms are used instead of the built-in search.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Forms realizing the spectrum value for (d, k, l).
    Spectrum {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// Every wedge of every row tuple has Q-independent coefficients.
    Corollary1 {
        #[command(flatten)]
        lattice: LatticeArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Vanishing first coefficient for rows 1..d-1, independence elsewhere.
    Theorem4 {
        #[command(flatten)]
        lattice: LatticeArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Rational closure of {l_1 = ... = l_(d-k) = 0} has dimension k + l.
    Spectrum {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[command(flatten)]
        out: OutArg,
    },
}

/// Input or usage problem; exit code 2.
#[derive(Debug)]
struct InputError(String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input(e: impl std::fmt::Display) -> anyhow::Error {
    anyhow!(InputError(e.to_string()))
}

fn emit(out: &OutArg, text: &str) -> Result<()> {
    match &out.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(out: &OutArg, v: &Value) -> Result<()> {
    emit(out, &(serde_json::to_string_pretty(v)? + "\n"))
}

fn load(path: &Path) -> Result<Lattice> {
    io::read_lattice(path).map_err(input)
}

/// Core errors caused by the caller's data map to exit code 2.
fn core<T>(r: latexp_core::Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Internal(_) | Error::BudgetExhausted(_) => anyhow!(e),
        other => input(other),
    })
}

fn real(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn interval(i: Interval) -> Value {
    json!([real(i.lo), real(i.hi)])
}

fn estimate_json(e: &ExponentEstimate) -> Value {
    json!({
        "gamma_max": real(e.gamma_max),
        "records_used": e.records_used,
        "x_max_reached": real(e.x_max_reached),
        "certificate": e.certificate,
        "complete": e.complete,
    })
}

fn field_from_args(minpoly: &[String], root: &[String]) -> Result<NumberField> {
    let mp = minpoly
        .iter()
        .map(|s| s.trim().parse::<num_bigint::BigInt>().map_err(|_| input(format!("minpoly: not an integer: {s:?}"))))
        .collect::<Result<Vec<_>>>()?;
    if root.len() != 2 {
        bail!(InputError("root-interval needs two values lo,hi".into()));
    }
    let r = |s: &str| io::parse_rational(s).ok_or_else(|| input(format!("root-interval: not a rational: {s:?}")));
    core(NumberField::new(&mp, r(&root[0])?, r(&root[1])?))
}

fn report_out(out: &OutArg, l: Option<&Lattice>, r: &HypothesisReport, field: &NumberField) -> Result<bool> {
    let v = match l {
        Some(l) => io::construction_to_json(l, r),
        None => io::report_to_json(r, field),
    };
    emit_json(out, &v)?;
    Ok(r.passed)
}

/// Runs one command; `Ok(false)` means a check failed.
fn run(cli: Cli) -> Result<bool> {
    let precision = cli.precision;
    match cli.command {
        Command::Omega { lattice, xmax, tail, max_points, out } => {
            let l = load(&lattice.lattice)?;
            let mut budget = EnumerationBudget::new(xmax);
            budget.precision = precision;
            if let Some(m) = max_points {
                budget.max_points = m;
            }
            let s = core(record_points(&l, &budget))?;
            emit(&out, &io::records_csv(l.dim(), &s, precision))?;
            if out.out.is_some() {
                let mut summary = match estimate_omega(&s, tail) {
                    Ok(e) => estimate_json(&e),
                    Err(_) => json!({ "gamma_max": Value::Null, "records_used": 0, "complete": s.complete }),
                };
                summary["records"] = json!(s.records.len());
                summary["points_examined"] = json!(s.points_examined);
                println!("{}", serde_json::to_string_pretty(&summary)?);
            }
            Ok(true)
        }
        Command::NormMin { lattice, xmax, out } => {
            let l = load(&lattice.lattice)?;
            let n = core(norm_minimum_estimate(&l, xmax))?;
            emit_json(
                &out,
                &json!({
                    "value": interval(n.value),
                    "witness": n.witness.as_ref().map(|w| &w.z),
                    "exact_zero": n.witness.as_ref().is_some_and(|w| w.has_zero_coord()),
                    "complete": n.complete,
                }),
            )?;
            Ok(true)
        }
        Command::Dual { lattice, out } => {
            let l = load(&lattice.lattice)?;
            emit_json(&out, &io::lattice_to_json(&l.dual()))?;
            Ok(true)
        }
        Command::Wedge { lattice, rows, out } => {
            let l = load(&lattice.lattice)?;
            if rows.contains(&0) {
                bail!(InputError("rows are 1-based".into()));
            }
            let rows: Vec<usize> = rows.iter().map(|r| r - 1).collect();
            let w = core(wedge_coeffs(l.forms(), &rows))?;
            let dual_identity = if rows.len() < l.dim() {
                Some(core(complementary_dual_wedge(l.forms(), &rows))?.verify())
            } else {
                None
            };
            let coords: Vec<Value> = w
                .subsets
                .iter()
                .zip(&w.coords)
                .map(|(s, c)| json!({ "columns": s.iter().map(|i| i + 1).collect::<Vec<_>>(), "value": io::element_to_json(c) }))
                .collect();
            emit_json(
                &out,
                &json!({
                    "rows": rows.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    "field": io::field_to_json(l.field()),
                    "coefficients": coords,
                    "dual_identity_holds": dual_identity,
                }),
            )?;
            Ok(dual_identity.unwrap_or(true))
        }
        Command::CheckT2 { dim, trials, seed, out } => {
            let r = core(random_theorem2_trials(dim, trials, seed))?;
            emit_json(&out, &serde_json::to_value(&r)?)?;
            Ok(r.counterexamples == 0)
        }
        Command::WitnessCase1 { lattice, u, out } => {
            let l = load(&lattice.lattice)?;
            let w = core(case1_witness(&l, &u))?;
            let mut v = serde_json::to_value(&w)?;
            v["all_passed"] = json!(w.all_passed());
            emit_json(&out, &v)?;
            Ok(w.all_passed())
        }
        Command::WitnessCase2 { lattice, u, count, out } => {
            let l = load(&lattice.lattice)?;
            let r = core(case2_points(&l, &u, count))?;
            let ok = r.points.iter().all(|p| p.passed());
            let mut v = serde_json::to_value(&r)?;
            v["all_passed"] = json!(ok);
            emit_json(&out, &v)?;
            Ok(ok)
        }
        Command::Construct(c) => match c {
            Construct::TotallyReal { minpoly, root_interval, out } => {
                let k = field_from_args(&minpoly, &root_interval)?;
                let l = core(totally_real_lattice(&k))?;
                emit_json(&out, &io::lattice_to_json(&l))?;
                Ok(true)
            }
            Construct::Theorem4 { dim, config, out } => {
                let cfg = config.map(|p| load(&p).map(|l| l.forms().clone())).transpose()?;
                let (l, r) = core(theorem4_lattice(dim, cfg))?;
                report_out(&out, Some(&l), &r, l.field())
            }
            Construct::Spectrum { dim, k, l, config, out } => {
                let cfg = config.map(|p| load(&p).map(|l| l.forms().clone())).transpose()?;
                let (lat, r) = core(spectrum_lattice(dim, k, l, cfg))?;
                report_out(&out, Some(&lat), &r, lat.field())
            }
        },
        Command::Verify(v) => match v {
            Verify::Corollary1 { lattice, out } => {
                let l = load(&lattice.lattice)?;
                let r = core(verify_corollary1_hypothesis(l.forms()))?;
                report_out(&out, None, &r, l.field())
            }
            Verify::Theorem4 { lattice, out } => {
                let l = load(&lattice.lattice)?;
                let r = core(verify_theorem4_hypothesis(l.forms()))?;
                report_out(&out, None, &r, l.field())
            }
            Verify::Spectrum { lattice, k, l: ll, out } => {
                let l = load(&lattice.lattice)?;
                let r = core(verify_spectrum_hypothesis(l.forms(), k, ll))?;
                report_out(&out, None, &r, l.field())
            }
        },
        Command::Classical { minpoly, root_interval, theta, xmax, multiplicative, out } => {
            let k = match (minpoly, root_interval) {
                (Some(m), Some(r)) => field_from_args(&m, &r)?,
                (None, None) => NumberField::rationals(),
                _ => bail!(InputError("--minpoly and --root-interval go together".into())),
            };
            let theta = theta
                .iter()
                .map(|t| {
                    let c = t
                        .split(',')
                        .map(|s| io::parse_rational(s).ok_or_else(|| input(format!("theta: not a rational: {s:?}"))))
                        .collect::<Result<Vec<_>>>()?;
                    if c.len() > k.degree() {
                        bail!(InputError(format!("theta {t:?} has more than {} coordinates", k.degree())));
                    }
                    let mut c = c;
                    c.resize(k.degree(), num_rational::BigRational::from_integer(0.into()));
                    Ok(k.element(c))
                })
                .collect::<Result<Vec<FieldElement>>>()?;
            let s = core(classical_exponent(&theta, xmax, multiplicative))?;
            let mut v = estimate_json(&s.estimate);
            v["records"] = s
                .records
                .iter()
                .map(|r| json!({ "z": r.z, "base": r.base, "value": interval(r.value), "gamma": real(r.gamma.lower()) }))
                .collect();
            emit_json(&out, &v)?;
            Ok(true)
        }
        Command::SpectrumTable { dmax, out } => {
            if dmax < 3 {
                bail!(InputError("dmax must be at least 3".into()));
            }
            emit(&out, &io::spectrum_table_csv(dmax))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads == 0 {
        eprintln!("error: --threads must be positive");
        return ExitCode::from(2);
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InputError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
