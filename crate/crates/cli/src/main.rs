mod output;

use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tower_primes::asymptotics::{self, geometric_samples, log_spaced, RatioTrace};
use tower_primes::bounds::{self, BoundReport, DiagonalOptions, DEFAULT_L_MAX};
use tower_primes::prime_engine::{DEFAULT_CEILING, DEFAULT_SEGMENT_SIZE};
use tower_primes::ratio_sets;
use tower_primes::record::fmt_f64;
use tower_primes::series;
use tower_primes::{Error, IteratedPrimes, PrimeTable, Record, Result, SetFamily, TableConfig, TailRelation};

use output::{Format, Output};

const EXIT_VERIFICATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RANGE: u8 = 3;

/// Depth used when a trace or experiment is asked for "everything computable"; the
/// ceiling truncates long before this.
const OPEN_DEPTH: u32 = 64;

#[derive(Parser, Debug)]
#[command(name = "tower-primes", version, about = "Iterated prime-index sequences and checks of their bounds")]
struct Cli {
    /// Largest value any query may touch.
    #[arg(long, global = true, default_value_t = DEFAULT_CEILING)]
    ceiling: u64,
    /// Directory for persisted sieve segments and the iteration memo.
    #[arg(long, global = true, env = "TOWER_PRIMES_CACHE")]
    cache: Option<PathBuf>,
    /// Worker threads for sieve construction (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Sieve segment length in integers.
    #[arg(long, global = true, default_value_t = DEFAULT_SEGMENT_SIZE, hide = true)]
    segment_size: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// p^(k)_n: k-fold "take the n-th prime" starting from n.
    Iterate {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u32,
    },
    /// Members of a set up to x, one per line.
    Enumerate(SetAt),
    /// Number of members of a set up to x.
    Count(SetAt),
    /// Largest k with m in the depth-k nested set.
    Level {
        #[arg(long)]
        m: u64,
    },
    /// Whether the towers over n < m intersect, and optionally their counting difference at x.
    Tails {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        x: Option<u64>,
    },
    /// Theorem-backed inequality checks.
    #[command(subcommand)]
    Verify(Verify),
    /// Search for a starting depth satisfying the side conditions of the upper bounds.
    K0 {
        /// tower:N or diagonal
        #[arg(long, value_parser = parse_family)]
        family: SetFamily,
        #[arg(long, default_value_t = DEFAULT_L_MAX)]
        l_max: u64,
    },
    /// Partial sums of a^-alpha with tail brackets.
    Series {
        #[arg(long, value_parser = parse_family)]
        family: SetFamily,
        #[arg(long)]
        alpha: f64,
        /// Cutoffs (comma-separated).
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<u64>,
        /// For nested:K, also compare against nested:K+1 at each cutoff.
        #[arg(long)]
        compare: bool,
    },
    /// Tail bound of a tower or the diagonal from its k-th member on.
    TailBound {
        #[arg(long, value_parser = parse_family)]
        family: SetFamily,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        k: u32,
    },
    /// Convergence-exponent estimate.
    Rho {
        #[arg(long, value_parser = parse_family)]
        family: SetFamily,
        /// Largest n (nested) or j (tower, diagonal) sampled.
        #[arg(long)]
        n_max: u64,
    },
    /// Ratio traces for the asymptotic claims.
    #[command(subcommand)]
    Trace(Trace),
    /// Data-only experiments.
    #[command(subcommand)]
    Experiment(Experiment),
    /// Ratio-set witnesses and isolation certificates.
    #[command(subcommand)]
    Ratio(Ratio),
}

#[derive(Args, Debug)]
struct SetAt {
    /// nested:K, tower:N or diagonal
    #[arg(long, value_parser = parse_family)]
    family: SetFamily,
    #[arg(long)]
    x: u64,
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// n log n <= p_n for n <= n_max, and p_n <= n(log n + log log n) for 6 <= n <= n_max.
    Rosser {
        #[arg(long)]
        n_max: u64,
    },
    /// Lower bounds along the tower over n from depth k (power and product forms).
    TowerLower {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u32,
        /// Default: deepest member under the ceiling.
        #[arg(long)]
        j_max: Option<u32>,
    },
    /// Upper bound on the tower count in terms of log x.
    TowerCount {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u32,
        /// Sample points (comma-separated); default: --samples points spread from p^(k)_n to the ceiling.
        #[arg(long, value_delimiter = ',')]
        x: Vec<u64>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Super-logarithmic upper bounds along a tower from a certified starting depth.
    TowerUpper {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        j_max: Option<u32>,
        #[arg(long, default_value_t = 1.5)]
        alpha: f64,
        #[arg(long, default_value_t = DEFAULT_L_MAX)]
        l_max: u64,
        /// Check from this depth when no depth can be certified.
        #[arg(long)]
        k_start: Option<u32>,
    },
    /// Lower, step, count and upper bounds along the diagonal.
    Diag {
        #[arg(long)]
        j_max: Option<u32>,
        #[arg(long, default_value_t = 1.5)]
        alpha: f64,
        #[arg(long, default_value_t = DEFAULT_L_MAX)]
        l_max: u64,
        /// Count-bound sample points (comma-separated); default: 50 points spread to the ceiling.
        #[arg(long, value_delimiter = ',')]
        x: Vec<u64>,
        /// Check the upper bounds from this depth when no depth can be certified.
        #[arg(long)]
        upper_from: Option<u32>,
    },
}

#[derive(Subcommand, Debug)]
enum Trace {
    /// p^(k)_n / (n log^k n), p^(k)_{n+1} / p^(k)_n and log p^(k)_n / log n.
    T1 {
        #[arg(long)]
        k: u32,
        /// Sample points (comma-separated); default 1, 10, ..., 10^6.
        #[arg(long, value_delimiter = ',')]
        n: Vec<u64>,
    },
    /// H_k(x) = A_k(x) log^k x / x.
    H {
        #[arg(long)]
        k: u32,
        /// Sample points (comma-separated); default 10, 100, ... up to the ceiling.
        #[arg(long, value_delimiter = ',')]
        x: Vec<u64>,
    },
    /// p^(k+1)_n / (p^(k)_n log p^(k)_n).
    T4 {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = OPEN_DEPTH)]
        k_max: u32,
    },
    /// log p^(j)_n / (j log j) along a tower.
    C7 {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = OPEN_DEPTH)]
        j_max: u32,
    },
    /// log p^(j)_j / (j log j) along the diagonal.
    C8 {
        #[arg(long, default_value_t = OPEN_DEPTH)]
        j_max: u32,
    },
    /// Tower count over diagonal count, with the pointwise comparison enforced.
    T13 {
        #[arg(long)]
        n: u64,
        /// Sample points (comma-separated); default 10, 100, ... up to the ceiling.
        #[arg(long, value_delimiter = ',')]
        x: Vec<u64>,
    },
}

#[derive(Subcommand, Debug)]
enum Experiment {
    /// p^(k)_{k+1} / p^(k)_k.
    Q1 {
        #[arg(long, default_value_t = OPEN_DEPTH)]
        k_max: u32,
    },
    /// p^(k)_n / p^(k)_k for k >= n.
    Hypothesis {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = OPEN_DEPTH)]
        k_max: u32,
    },
    /// Least-squares fit of exp(count(x)) ~ c x log^beta x.
    Expfit {
        /// tower:N or diagonal
        #[arg(long, value_parser = parse_family)]
        family: SetFamily,
        /// Sample points (comma-separated); default 10^3, ..., 10^9 capped at the ceiling.
        #[arg(long, value_delimiter = ',')]
        x: Vec<u64>,
    },
}

#[derive(Subcommand, Debug)]
enum Ratio {
    /// a/b near a target with a, b in the depth-k nested set.
    Witness {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        target: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        bound: u64,
    },
    /// Consecutive-ratio certificate for a tower or the diagonal.
    Isolate {
        #[arg(long, value_parser = parse_family)]
        family: SetFamily,
        #[arg(long)]
        j_max: u32,
    },
    /// Consecutive ratios a_{j+1} / a_j.
    Gaps {
        #[arg(long, value_parser = parse_family)]
        family: SetFamily,
        #[arg(long)]
        j_max: u32,
    },
}

fn parse_family(s: &str) -> std::result::Result<SetFamily, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A command's data plus whether a verified claim failed.
struct Outcome {
    output: Output,
    failed: bool,
    /// The command already wrote its data to stdout.
    streamed: bool,
}

impl From<Output> for Outcome {
    fn from(output: Output) -> Self {
        Outcome { output, failed: false, streamed: false }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let stdout = io::stdout();
            let mut out = BufWriter::new(stdout.lock());
            let written = if outcome.streamed { Ok(()) } else { outcome.output.write(cli.format, &mut out) };
            if let Err(e) = written.and_then(|_| out.flush()) {
                if e.kind() != io::ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_USAGE);
                }
            }
            if outcome.failed {
                eprintln!("verification failed");
                ExitCode::from(EXIT_VERIFICATION)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Verification(_) => EXIT_VERIFICATION,
        e if e.is_range() => EXIT_RANGE,
        _ => EXIT_USAGE,
    }
}

fn open(cli: &Cli) -> Result<IteratedPrimes> {
    let threads = cli.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let config = TableConfig {
        ceiling: cli.ceiling,
        segment_size: cli.segment_size,
        cache_dir: cli.cache.clone(),
        threads,
        ..TableConfig::default()
    };
    IteratedPrimes::new(PrimeTable::new(config)?)
}

fn run(cli: &Cli) -> Result<Outcome> {
    let lat = open(cli)?;
    match &cli.command {
        Command::Iterate { n, k } => {
            let cell = lat.iterated_prime(*n, *k)?;
            let mut o = Output::new();
            o.row(vec![("n", n.to_string()), ("k", k.to_string()), ("value", cell.value.to_string())], cell.value.to_string());
            Ok(o.into())
        }
        Command::Enumerate(SetAt { family, x }) => {
            // Streamed: the primes below the ceiling do not fit comfortably in memory.
            let stdout = io::stdout();
            let mut out = BufWriter::new(stdout.lock());
            let mut status = Ok(());
            if cli.format == Format::Csv {
                status = writeln!(out, "{}\nvalue", output::CSV_VERSION_LINE);
            }
            let prefix = if cli.format == Format::Rows { "value=" } else { "" };
            lat.visit_set(*family, *x, |v| {
                if status.is_ok() {
                    status = writeln!(out, "{prefix}{v}");
                }
            })?;
            if let Err(e) = status.and_then(|_| out.flush()) {
                if e.kind() != io::ErrorKind::BrokenPipe {
                    return Err(e.into());
                }
            }
            Ok(Outcome { output: Output::new(), failed: false, streamed: true })
        }
        Command::Count(SetAt { family, x }) => {
            let c = lat.count_set(*family, *x)?;
            let mut o = Output::new();
            o.row(vec![("family", family.to_string()), ("x", x.to_string()), ("count", c.count.to_string())], c.count.to_string());
            Ok(o.into())
        }
        Command::Level { m } => {
            let level = lat.tower_level(*m)?;
            let mut o = Output::new();
            o.row(vec![("m", m.to_string()), ("level", level.to_string())], level.to_string());
            Ok(o.into())
        }
        Command::Tails { n, m, x } => tails(&lat, *n, *m, *x),
        Command::Verify(v) => verify(&lat, v),
        Command::K0 { family, l_max } => {
            let search = bounds::find_k0(&lat, tower_or_diagonal(*family)?, *l_max)?;
            let mut o = Output::new();
            for a in &search.attempts {
                o.record(a);
            }
            match &search.certificate {
                Some(c) => o.record(c),
                None => {
                    eprintln!("no depth up to {} satisfies the side conditions for 2 <= l <= {l_max}", search.attempts.len());
                    o.row(
                        vec![("family", family.to_string()), ("certificate", "none".into()), ("depths_tried", search.attempts.len().to_string())],
                        "\ncertificate=none\n",
                    );
                }
            }
            Ok(o.into())
        }
        Command::Series { family, alpha, x, compare } => {
            let mut cutoffs = x.clone();
            cutoffs.sort_unstable();
            cutoffs.dedup();
            let accounts = series::partial_sums(&lat, *family, *alpha, &cutoffs)?;
            let mut o = Output::new();
            for a in &accounts {
                let (lo, hi) = a.bracket();
                o.row(a.fields(), format!("{} [{}, {}]", a.cutoff_x, fmt_f64(lo), fmt_f64(hi)));
            }
            if *compare {
                let SetFamily::Nested(k) = family else {
                    return Err(Error::Domain("--compare applies to nested families".into()));
                };
                for &c in &cutoffs {
                    let cmp = series::compare_nested(&lat, *k, *alpha, c)?;
                    o.structured(cmp.fields());
                    eprintln!(
                        "x={c}: nested:{} / nested:{k} = {} (constant {})",
                        k + 1,
                        fmt_f64(cmp.contraction_ratio),
                        fmt_f64(cmp.contraction_constant)
                    );
                }
            }
            Ok(o.into())
        }
        Command::TailBound { family, alpha, k } => {
            let value = match tower_or_diagonal(*family)? {
                SetFamily::Tower(n) => series::tower_tail_bound(&lat, n, *alpha, *k)?,
                _ => series::diagonal_tail_bound(&lat, *alpha, *k)?,
            };
            let mut o = Output::new();
            o.row(
                vec![("family", family.to_string()), ("alpha", fmt_f64(*alpha)), ("k", k.to_string()), ("tail_upper", fmt_f64(value))],
                fmt_f64(value),
            );
            Ok(o.into())
        }
        Command::Rho { family, n_max } => {
            let e = series::exponent_estimate(&lat, *family, *n_max)?;
            let mut o = Output::new();
            o.row(e.fields(), fmt_f64(e.estimate));
            Ok(o.into())
        }
        Command::Trace(t) => trace(&lat, t),
        Command::Experiment(e) => experiment(&lat, e),
        Command::Ratio(r) => ratio(&lat, r),
    }
}

fn tower_or_diagonal(family: SetFamily) -> Result<SetFamily> {
    match family {
        SetFamily::Nested(_) => Err(Error::Domain("expected tower:N or diagonal".into())),
        f => Ok(f),
    }
}

fn tails(lat: &IteratedPrimes, n: u64, m: u64, x: Option<u64>) -> Result<Outcome> {
    let relation = lat.tail_intersection(n, m)?;
    let (name, k, plain) = match relation {
        TailRelation::Disjoint => ("disjoint", "-".to_string(), "disjoint".to_string()),
        TailRelation::Contained(k) => ("contained", k.to_string(), format!("contained {k}")),
    };
    let mut o = Output::new();
    o.row(vec![("n", n.to_string()), ("m", m.to_string()), ("relation", name.into()), ("k", k)], plain);
    let mut failed = false;
    if let Some(x) = x {
        let d = lat.counting_difference(n, m, x)?;
        failed = !d.within_band;
        o.row(
            vec![
                ("n", n.to_string()),
                ("m", m.to_string()),
                ("x", x.to_string()),
                ("j0", d.j0.to_string()),
                ("difference", d.difference.to_string()),
                ("within_band", d.within_band.to_string()),
            ],
            format!("j0={} difference={} within_band={}", d.j0, d.difference, d.within_band),
        );
    }
    Ok(Outcome { output: o, failed, streamed: false })
}

fn reports(list: &[BoundReport]) -> Outcome {
    let mut o = Output::new();
    for r in list {
        o.record(r);
        if !r.skipped.is_empty() {
            eprintln!("{}: skipped {} cell(s), first: {}", r.bound_id, r.skipped.len(), r.skipped[0]);
        }
    }
    Outcome { output: o, failed: !bounds::all_passed(list), streamed: false }
}

fn verify(lat: &IteratedPrimes, v: &Verify) -> Result<Outcome> {
    match v {
        Verify::Rosser { n_max } => Ok(reports(&bounds::check_rosser(lat, *n_max)?)),
        Verify::TowerLower { n, k, j_max } => {
            let j_max = match j_max {
                Some(j) => *j,
                None => lat.depth_limit(SetFamily::Tower(*n).validate()?)?,
            };
            Ok(reports(&bounds::check_tower_lower_bounds(lat, *n, *k, j_max)?))
        }
        Verify::TowerCount { n, k, x, samples } => {
            let xs = if x.is_empty() {
                let start = lat.iterated_prime(*n, *k)?.value;
                log_spaced(start, lat.ceiling(), *samples)
            } else {
                x.clone()
            };
            Ok(reports(&[bounds::check_tower_count_upper(lat, *n, *k, &xs)?]))
        }
        Verify::TowerUpper { n, j_max, alpha, l_max, k_start } => {
            let j_max = match j_max {
                Some(j) => *j,
                None => lat.depth_limit(SetFamily::Tower(*n).validate()?)?,
            };
            let search = bounds::find_k0_tower(lat, *n, *l_max)?;
            match (search.certificate, k_start) {
                (Some(mut cert), _) => {
                    let list = bounds::check_tower_upper_main(lat, *n, &mut cert, j_max, *alpha)?;
                    let mut outcome = reports(&list);
                    outcome.output.record(&cert);
                    Ok(outcome)
                }
                (None, Some(k)) => {
                    eprintln!("no certified starting depth; checking from k = {k} as requested");
                    Ok(reports(&bounds::check_tower_upper(lat, *n, *k, j_max, *alpha)?))
                }
                (None, None) => Err(Error::Verification(format!(
                    "no depth of tower:{n} under the ceiling satisfies the side conditions for 2 <= l <= {l_max}; \
                     pass --k-start to check the bounds from a chosen depth"
                ))),
            }
        }
        Verify::Diag { j_max, alpha, l_max, x, upper_from } => {
            let j_max = match j_max {
                Some(j) => *j,
                None => lat.depth_limit(SetFamily::Diagonal)?,
            };
            let count_samples = if x.is_empty() { log_spaced(2, lat.ceiling(), 50) } else { x.clone() };
            let opts = DiagonalOptions { j_max, alpha: *alpha, l_max: *l_max, count_samples, upper_from: *upper_from };
            let report = bounds::check_diagonal_bounds(lat, &opts)?;
            let mut outcome = reports(&report.reports);
            match &report.k0.certificate {
                Some(c) => outcome.output.record(c),
                None => eprintln!("diagonal: no certified starting depth for 2 <= l <= {l_max}"),
            }
            Ok(outcome)
        }
    }
}

fn trace_output(traces: &[&RatioTrace]) -> Output {
    let mut o = Output::new();
    for t in traces {
        if traces.len() > 1 {
            o.plain.push_str(&format!("# {}\n", t.claim_id));
        }
        for &(arg, ratio) in &t.samples {
            o.row(
                vec![("claim_id", t.claim_id.clone()), ("argument", fmt_f64(arg)), ("ratio", fmt_f64(ratio))],
                format!("{} {}", fmt_f64(arg), fmt_f64(ratio)),
            );
        }
        o.structured(t.fields());
        if t.truncated {
            eprintln!("{}: truncated at the ceiling after {} samples", t.claim_id, t.samples.len());
        }
    }
    o
}

fn default_x(lat: &IteratedPrimes, x: &[u64]) -> Vec<u64> {
    if x.is_empty() {
        geometric_samples(10, lat.ceiling(), 10)
    } else {
        x.to_vec()
    }
}

fn trace(lat: &IteratedPrimes, t: &Trace) -> Result<Outcome> {
    let out = match t {
        Trace::T1 { k, n } => {
            let ns = if n.is_empty() { geometric_samples(1, 1_000_000, 10) } else { n.clone() };
            let g = asymptotics::trace_growth(lat, *k, &ns)?;
            trace_output(&[&g.asymptotic, &g.successive, &g.log_ratio])
        }
        Trace::H { k, x } => trace_output(&[&asymptotics::trace_density(lat, *k, &default_x(lat, x))?]),
        Trace::T4 { n, k_max } => trace_output(&[&asymptotics::trace_tower_step(lat, *n, *k_max)?]),
        Trace::C7 { n, j_max } => trace_output(&[&asymptotics::trace_log_growth(lat, SetFamily::Tower(*n).validate()?, *j_max)?]),
        Trace::C8 { j_max } => trace_output(&[&asymptotics::trace_log_growth(lat, SetFamily::Diagonal, *j_max)?]),
        Trace::T13 { n, x } => trace_output(&[&asymptotics::trace_tower_over_diagonal(lat, *n, &default_x(lat, x))?]),
    };
    Ok(out.into())
}

fn experiment(lat: &IteratedPrimes, e: &Experiment) -> Result<Outcome> {
    let out = match e {
        Experiment::Q1 { k_max } => trace_output(&[&asymptotics::experiment_neighbour_ratio(lat, *k_max)?]),
        Experiment::Hypothesis { n, k_max } => trace_output(&[&asymptotics::experiment_row_over_diagonal(lat, *n, *k_max)?]),
        Experiment::Expfit { family, x } => {
            let xs = if x.is_empty() { geometric_samples(1000, lat.ceiling().min(1_000_000_000), 10) } else { x.clone() };
            let fit = asymptotics::fit_exp_counting(lat, *family, &xs)?;
            let mut o = Output::new();
            o.record(&fit);
            o
        }
    };
    Ok(out.into())
}

fn ratio(lat: &IteratedPrimes, r: &Ratio) -> Result<Outcome> {
    match r {
        Ratio::Witness { k, target, epsilon, bound } => {
            let w = ratio_sets::find_ratio_witness(lat, *k, *target, *epsilon, *bound)?;
            if !w.sufficient {
                eprintln!("insufficient: best error {} exceeds epsilon {}", fmt_f64(w.achieved_error), fmt_f64(*epsilon));
            }
            let mut o = Output::new();
            o.row(w.fields(), w.to_line());
            Ok(o.into())
        }
        Ratio::Isolate { family, j_max } => {
            let c = ratio_sets::isolation_certificate(lat, *family, *j_max)?;
            let mut o = Output::new();
            for s in &c.steps {
                let mut fields = vec![
                    ("j", s.j.to_string()),
                    ("a_j", s.a_j.to_string()),
                    ("a_next", s.a_next.to_string()),
                    ("ratio", fmt_f64(s.ratio)),
                    ("log_bound", fmt_f64(s.log_bound)),
                    ("holds", s.holds.to_string()),
                ];
                if let Some((mid, ok)) = s.intermediate {
                    fields.push(("intermediate", mid.to_string()));
                    fields.push(("intermediate_holds", ok.to_string()));
                }
                o.structured(fields);
            }
            o.record(&c);
            if c.truncated {
                eprintln!("{family}: truncated at the ceiling after j = {}", c.j_max());
            }
            Ok(Outcome { failed: !c.holds(), output: o, streamed: false })
        }
        Ratio::Gaps { family, j_max } => {
            let gaps = ratio_sets::ratio_gap_scan(lat, *family, *j_max)?;
            let mut o = Output::new();
            for (j, r) in gaps {
                o.row(vec![("j", j.to_string()), ("ratio", fmt_f64(r))], format!("{j} {}", fmt_f64(r)));
            }
            Ok(o.into())
        }
    }
}
