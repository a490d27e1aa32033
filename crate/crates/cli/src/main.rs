//! `chordal-tw`: exact counts, oracle checks, singularity tables and moments
//! for k-connected chordal graphs of bounded tree-width.

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use chordal_tw::gfsystem::{
    assemble_with, clique_moments, count, counts_json, AssembleOptions, LevelSystem, SystemError,
    Unrooting,
};
use chordal_tw::oracle::{census, OracleError, DEFAULT_CAP};
use chordal_tw::singularity::{
    branch_point, class_coefficients, constant_estimate, ratio_estimate, table, SolveError,
};

/// Largest `t` accepted by `table` unless `--tmax-limit` raises it.
const TABLE_LIMIT: usize = 5;
/// Smallest search precision accepted by `table`.
const MIN_PREC: f64 = 1e-12;

#[derive(Parser, Debug)]
#[command(name = "chordal-tw", version, about)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads; output never depends on this.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact counts |G_{t,k,n}| for n = 1..=N.
    Count {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        k: usize,
        #[arg(long = "N", value_name = "N")]
        n: u32,
        /// Also compute the integral unrooting and fail on any difference.
        #[arg(long)]
        check_integral_unroot: bool,
    },
    /// Series counts against exhaustive enumeration.
    Verify {
        #[arg(long, default_value_t = 3)]
        tmax: usize,
        /// Largest graph size.
        #[arg(long = "N", value_name = "N", default_value_t = 7)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        oracle_cap: usize,
        #[arg(long)]
        check_integral_unroot: bool,
        /// Adds one to the series count at `t,k,n` (test hook).
        #[arg(long, hide = true, value_parser = parse_triple)]
        corrupt: Option<(usize, usize, usize)>,
    },
    /// Radii of convergence rho_{t,k} for 1 <= k <= t <= tmax.
    Table {
        #[arg(long, default_value_t = 4)]
        tmax: usize,
        #[arg(long, default_value_t = MIN_PREC)]
        prec: f64,
        /// Include residuals and y_star (same as --format json).
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = TABLE_LIMIT)]
        tmax_limit: usize,
    },
    /// Exact mean and variance of the number of i-cliques.
    Moments {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        i: usize,
        #[arg(long = "N", value_name = "N", default_value_t = 10)]
        n: u32,
        /// Add mean/n and var/n columns.
        #[arg(long)]
        per_n: bool,
    },
    /// Ratio-method growth and exponent, branch point and constant estimate.
    Asymptotics {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        k: usize,
        #[arg(long = "N", value_name = "N", default_value_t = 40)]
        n: u32,
        #[arg(long, default_value_t = MIN_PREC)]
        prec: f64,
    },
    /// One series of the system as JSON.
    SeriesDump {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        k: usize,
        #[arg(long = "N", value_name = "N")]
        n: u32,
        #[arg(long, value_enum, default_value_t = Which::G)]
        which: Which,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Which {
    /// G_k
    G,
    /// G_k^{(k)}
    Rooted,
    /// G_{k+1}^{(k)}
    Upper,
}

fn parse_triple(s: &str) -> Result<(usize, usize, usize), String> {
    let v: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse().map_err(|e| format!("{p}: {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [a, b, c] => Ok((a, b, c)),
        _ => Err("expected t,k,n".into()),
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Mismatch(String),
    Numeric(String),
    Io(io::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Mismatch(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Numeric(_) => 3,
            Failure::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage: {m}"),
            Failure::Mismatch(m) => write!(f, "mismatch: {m}"),
            Failure::Numeric(m) => write!(f, "no convergence: {m}"),
            Failure::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.into())
    }
}

impl From<SystemError> for Failure {
    fn from(e: SystemError) -> Self {
        match e {
            SystemError::BadArgs(_)
            | SystemError::BadLevel { .. }
            | SystemError::Untracked { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Mismatch(e.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::BadArgs(_)
            | SolveError::TooFewTerms(_)
            | SolveError::ZeroCoefficient(_) => Failure::Usage(e.to_string()),
            SolveError::System(s) => s.into(),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn check_tk(t: usize, k: usize, k_max: usize) -> Outcome {
    if t == 0 {
        return Err(Failure::Usage("--t must be at least 1".into()));
    }
    if k > k_max {
        return Err(Failure::Usage(format!("--k must be at most {k_max}")));
    }
    Ok(())
}

fn unrooting(check: bool) -> Unrooting {
    if check {
        Unrooting::CrossCheck
    } else {
        Unrooting::Dissymmetry
    }
}

fn counting(t: usize, n: u32, check: bool) -> Result<LevelSystem, Failure> {
    let opts = AssembleOptions {
        unrooting: unrooting(check),
        ..AssembleOptions::counting_only()
    };
    Ok(assemble_with(t, n, &opts)?)
}

fn json_line<T: Serialize>(out: &mut impl Write, value: &T) -> Outcome {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_count(
    out: &mut impl Write,
    fmt: Format,
    t: usize,
    k: usize,
    n: u32,
    check: bool,
) -> Outcome {
    check_tk(t, k, t + 1)?;
    let sys = counting(t, n, check)?;
    let table = counts_json(&sys, k)?;
    match fmt {
        Format::Json => json_line(out, &table),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["n", "count"])?;
            for e in &table.counts {
                w.write_record([e.n.to_string(), e.count.clone()])?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct VerifyRow {
    t: usize,
    k: usize,
    n: usize,
    series_count: String,
    oracle_count: String,
    #[serde(rename = "match")]
    matches: bool,
}

fn cmd_verify(
    out: &mut impl Write,
    fmt: Format,
    tmax: usize,
    n_max: usize,
    cap: usize,
    check: bool,
    corrupt: Option<(usize, usize, usize)>,
) -> Outcome {
    if tmax == 0 || n_max == 0 {
        return Err(Failure::Usage("--tmax and --N must be positive".into()));
    }
    if n_max > cap {
        return Err(Failure::Usage(format!(
            "--N {n_max} exceeds the oracle cap {cap}"
        )));
    }
    let systems = (1..=tmax)
        .map(|t| counting(t, n_max as u32, check))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let c = census(n, cap)?;
        for (t, sys) in (1..=tmax).zip(&systems) {
            for k in 0..=t {
                let mut series = count(sys, k, n as u32)?;
                if corrupt == Some((t, k, n)) {
                    series += 1;
                }
                let oracle = c.count(t, k);
                rows.push(VerifyRow {
                    t,
                    k,
                    n,
                    matches: series == oracle.into(),
                    series_count: series.to_string(),
                    oracle_count: oracle.to_string(),
                });
            }
        }
    }
    match fmt {
        Format::Json => json_line(out, &rows)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            for r in &rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
    }
    let bad = rows.iter().filter(|r| !r.matches).count();
    if bad > 0 {
        return Err(Failure::Mismatch(format!(
            "{bad} of {} counts differ",
            rows.len()
        )));
    }
    Ok(())
}

fn cmd_table(out: &mut impl Write, fmt: Format, tmax: usize, prec: f64, limit: usize) -> Outcome {
    if tmax == 0 || tmax > limit {
        return Err(Failure::Usage(format!(
            "--tmax must be in 1..={limit} (raise with --tmax-limit)"
        )));
    }
    if !(MIN_PREC..1e-3).contains(&prec) {
        return Err(Failure::Usage(format!(
            "--prec must be in [{MIN_PREC:e}, 1e-3)"
        )));
    }
    let rows = table(tmax, prec)?;
    match fmt {
        Format::Json => json_line(out, &rows.concat()),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let mut header = vec!["t".to_string()];
            header.extend((1..=tmax).map(|k| format!("k={k}")));
            w.write_record(&header)?;
            for (t, row) in (1..=tmax).zip(&rows) {
                let mut rec = vec![t.to_string()];
                rec.extend(row.iter().map(|bp| format!("{:.5}", bp.rho)));
                rec.resize(tmax + 1, String::new());
                w.write_record(&rec)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct Fraction {
    num: String,
    den: String,
}

impl From<&BigRational> for Fraction {
    fn from(r: &BigRational) -> Self {
        Fraction {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }
}

#[derive(Serialize)]
struct MomentRow {
    n: u32,
    i: usize,
    mean: Fraction,
    var: Fraction,
}

#[derive(Serialize)]
struct MomentsJson {
    moments: Vec<MomentRow>,
}

fn cmd_moments(
    out: &mut impl Write,
    fmt: Format,
    t: usize,
    k: usize,
    i: usize,
    n_max: u32,
    per_n: bool,
) -> Outcome {
    check_tk(t, k, t + 1)?;
    if i < 2 || i > t + 1 {
        return Err(Failure::Usage(format!("--i must be in 2..={}", t + 1)));
    }
    let mut tracked = vec![false; t + 1];
    tracked[i - 1] = true;
    let opts = AssembleOptions {
        unrooting: Unrooting::Dissymmetry,
        tracked: Some(tracked),
    };
    let sys = assemble_with(t, n_max, &opts)?;
    let mut rows = Vec::new();
    for n in 1..=n_max {
        match clique_moments(&sys, k, n, i) {
            Ok(m) => rows.push((n, m)),
            Err(SystemError::EmptyClass { .. }) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    match fmt {
        Format::Json => json_line(
            out,
            &MomentsJson {
                moments: rows
                    .iter()
                    .map(|(n, m)| MomentRow {
                        n: *n,
                        i,
                        mean: (&m.mean).into(),
                        var: (&m.variance).into(),
                    })
                    .collect(),
            },
        ),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let mut header = vec!["n", "i", "mean", "var"];
            if per_n {
                header.extend(["mean_over_n", "var_over_n"]);
            }
            w.write_record(&header)?;
            for (n, m) in &rows {
                let mut rec = vec![
                    n.to_string(),
                    i.to_string(),
                    m.mean.to_string(),
                    m.variance.to_string(),
                ];
                if per_n {
                    let nn = BigRational::from_integer((*n).into());
                    for v in [&m.mean, &m.variance] {
                        let q = (v / &nn).to_f64().unwrap_or(f64::NAN);
                        rec.push(format!("{q:.12}"));
                    }
                }
                w.write_record(&rec)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct AsymptoticsJson {
    t: usize,
    k: usize,
    #[serde(rename = "N")]
    n: u32,
    rho_ratio: f64,
    exponent: f64,
    rho_branch: f64,
    constant: f64,
    /// `e^{-(k^2-1)/k} / (sqrt(2 pi) k! k^{k+2})`, the k-tree constant, when `t = k`.
    closed_form: Option<f64>,
}

fn k_tree_constant(k: usize) -> f64 {
    let kf = k as f64;
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    (-(kf * kf - 1.0) / kf).exp()
        / ((2.0 * std::f64::consts::PI).sqrt() * fact * kf.powi(k as i32 + 2))
}

fn cmd_asymptotics(
    out: &mut impl Write,
    fmt: Format,
    t: usize,
    k: usize,
    n: u32,
    prec: f64,
) -> Outcome {
    check_tk(t, k, t)?;
    if !(prec > 0.0 && prec < 1e-3) {
        return Err(Failure::Usage("--prec must be in (0, 1e-3)".into()));
    }
    let coeffs = class_coefficients(t, k, n)?;
    let est = ratio_estimate(&coeffs)?;
    let bp = branch_point(t, k, prec)?;
    let constant = constant_estimate(&coeffs, bp.rho, -2.5)?;
    let report = AsymptoticsJson {
        t,
        k,
        n,
        rho_ratio: est.rho,
        exponent: est.exponent,
        rho_branch: bp.rho,
        constant,
        closed_form: (t == k).then(|| k_tree_constant(k)),
    };
    match fmt {
        Format::Json => json_line(out, &report),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "t",
                "k",
                "N",
                "rho_ratio",
                "exponent",
                "rho_branch",
                "constant",
                "closed_form",
            ])?;
            w.write_record([
                t.to_string(),
                k.to_string(),
                n.to_string(),
                format!("{:.10}", report.rho_ratio),
                format!("{:.6}", report.exponent),
                format!("{:.10}", report.rho_branch),
                format!("{:.8}", report.constant),
                report
                    .closed_form
                    .map(|c| format!("{c:.8}"))
                    .unwrap_or_default(),
            ])?;
            w.flush()?;
            Ok(())
        }
    }
}

fn cmd_series_dump(out: &mut impl Write, t: usize, k: usize, n: u32, which: Which) -> Outcome {
    let sys = assemble_with(t, n, &AssembleOptions::default())?;
    let series = match which {
        Which::G => {
            check_tk(t, k, t + 1)?;
            sys.g(k)
        }
        Which::Rooted | Which::Upper => {
            if k == 0 || k > t {
                return Err(Failure::Usage(format!("--k must be in 1..={t}")));
            }
            let s = if which == Which::Rooted {
                sys.rooted_self(k)
            } else {
                sys.rooted_upper(k)
            };
            s.expect("levels 1..=t carry rooted series")
        }
    };
    writeln!(out, "{}", series.to_json_string())?;
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let fmt = cli.format;
    match cli.command {
        Command::Count {
            t,
            k,
            n,
            check_integral_unroot,
        } => cmd_count(&mut out, fmt, t, k, n, check_integral_unroot)?,
        Command::Verify {
            tmax,
            n,
            oracle_cap,
            check_integral_unroot,
            corrupt,
        } => cmd_verify(
            &mut out,
            fmt,
            tmax,
            n,
            oracle_cap,
            check_integral_unroot,
            corrupt,
        )?,
        Command::Table {
            tmax,
            prec,
            json,
            tmax_limit,
        } => {
            let fmt = if json { Format::Json } else { fmt };
            cmd_table(&mut out, fmt, tmax, prec, tmax_limit)?
        }
        Command::Moments { t, k, i, n, per_n } => cmd_moments(&mut out, fmt, t, k, i, n, per_n)?,
        Command::Asymptotics { t, k, n, prec } => cmd_asymptotics(&mut out, fmt, t, k, n, prec)?,
        Command::SeriesDump { t, k, n, which } => cmd_series_dump(&mut out, t, k, n, which)?,
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if w == 0 {
            eprintln!("usage: --workers must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
        {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chordal-tw: {e}");
            ExitCode::from(e.code())
        }
    }
}
