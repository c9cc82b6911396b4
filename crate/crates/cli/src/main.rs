use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use tracedist::channel::{read_traces, simulate_profile, write_traces, TraceBatch};
use tracedist::construct::{
    analyze_pair_with, hard_pair, intro_pair, AnalysisOptions, PairFile, PairMeta,
};
use tracedist::distinguish::{
    mean_based_distinguish_with, mean_decide, potential_decide, potential_distinguish, ProfileNorm,
};
use tracedist::polynomial::{circle_supremum_with, multiplicity_at_one, SupremumOptions};
use tracedist::{BitString, CircleParams, IntPolynomial};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] tracedist::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_internal() => 3,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "tracedist",
    version,
    about = "Deletion-channel trace experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a pair file for a hard pair or an adjacent-swap pair.
    Generate(GenerateArgs),
    /// Analyze a pair: multiplicity, PTE degree, certified supremum, blocks.
    Analyze(AnalyzeArgs),
    /// Sample traces of a string through the deletion channel.
    Sample(SampleArgs),
    /// Decide which string of a pair produced a set of traces.
    Distinguish(DistinguishArgs),
    /// Analyze a family of pairs over several orders and emit CSV.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    /// `x = a·10·e`, `y = a·e·01`; `--k` is the order.
    Hard,
    /// `(01)^j 101 (01)^j` against `(01)^j 011 (01)^j`; `--k` is `j`.
    Intro,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Mean,
    Potential,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Norm {
    L1,
    Linf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Which {
    X,
    Y,
}

#[derive(Args)]
struct SupArgs {
    /// Coarse grid size for the supremum search.
    #[arg(long, default_value_t = 1 << 16)]
    grid: usize,
    /// Branch-and-bound refinement rounds.
    #[arg(long, default_value_t = 6)]
    refine: usize,
}

impl SupArgs {
    fn options(&self) -> SupremumOptions {
        SupremumOptions {
            grid: self.grid,
            refine_rounds: self.refine,
            ..SupremumOptions::default()
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum, default_value_t = Family::Hard)]
    family: Family,
    #[arg(long)]
    k: u32,
    /// Explicit prefix `a` (hard family).
    #[arg(long, conflicts_with = "prefix_random")]
    prefix: Option<String>,
    /// Random prefix of this length drawn from `--seed`.
    #[arg(long)]
    prefix_random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Deletion probability recorded in the pair file.
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long, required_unless_present = "x")]
    pair: Option<PathBuf>,
    #[arg(long, requires = "y", conflicts_with = "pair")]
    x: Option<String>,
    #[arg(long, requires = "x")]
    y: Option<String>,
    #[arg(long, default_value = "1/2")]
    p: CircleParams,
    #[command(flatten)]
    sup: SupArgs,
    /// Block budget for the decomposition (default: string length).
    #[arg(long)]
    max_blocks: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, required_unless_present = "pair")]
    string: Option<String>,
    #[arg(long, conflicts_with = "string")]
    pair: Option<PathBuf>,
    /// Which string of `--pair` to sample.
    #[arg(long, value_enum, default_value_t = Which::X)]
    which: Which,
    #[arg(long, default_value = "1/2")]
    p: CircleParams,
    #[arg(long, short = 'T', default_value_t = 1)]
    num: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DistinguishArgs {
    #[arg(long)]
    pair: PathBuf,
    /// Trace file; its header supplies `p`.
    #[arg(long, required_unless_present = "simulate")]
    traces: Option<PathBuf>,
    /// Instead of a trace file, stream `--num` traces of this string.
    #[arg(long, value_enum, conflicts_with = "traces")]
    simulate: Option<Which>,
    #[arg(long, default_value = "1/2")]
    p: CircleParams,
    #[arg(long, short = 'T', default_value_t = 100_000)]
    num: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Method::Potential)]
    method: Method,
    #[arg(long, value_enum, default_value_t = Norm::L1)]
    norm: Norm,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum, default_value_t = Family::Hard)]
    family: Family,
    /// Comma-separated orders (hard) or `j` values (intro).
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<u32>,
    /// Give hard pairs a zero prefix of length `n`.
    #[arg(long)]
    padded: bool,
    #[arg(long, default_value = "1/2")]
    p: CircleParams,
    #[command(flatten)]
    sup: SupArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_bits(s: &str) -> Result<BitString> {
    Ok(s.parse()?)
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn read_pair(path: &Path) -> Result<PairFile> {
    Ok(PairFile::from_json(&read_file(path)?)?)
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => io::stdout()
            .write_all(bytes)
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn json_line<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn generate(args: GenerateArgs) -> Result<()> {
    if let Some(p) = &args.p {
        p.parse::<CircleParams>()?;
    }
    let file = match args.family {
        Family::Hard => {
            let prefix = match (&args.prefix, args.prefix_random) {
                (Some(s), _) => parse_bits(s)?,
                (None, Some(len)) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
                    BitString::from_bools((0..len).map(|_| rng.gen::<bool>()))
                }
                (None, None) => BitString::new(),
            };
            let spec = hard_pair(args.k, &prefix)?;
            eprintln!(
                "hard pair k={} n={} |a|={} length={} predicted multiplicity={}",
                spec.k,
                spec.n,
                spec.prefix.len(),
                spec.x.len(),
                spec.predicted_multiplicity()
            );
            PairFile::from_hard_pair(&spec, args.p)
        }
        Family::Intro => {
            if args.prefix.is_some() || args.prefix_random.is_some() {
                return Err(CliError::Usage("the intro family takes no prefix".into()));
            }
            let (x, y) = intro_pair(args.k as usize);
            eprintln!(
                "intro pair j={} length={} predicted multiplicity=1",
                args.k,
                x.len()
            );
            PairFile {
                x,
                y,
                meta: PairMeta {
                    family: Some("intro".into()),
                    k: Some(args.k),
                    prefix_len: None,
                    p: args.p,
                },
            }
        }
    };
    let mut text = file.to_json();
    text.push('\n');
    emit(args.out.as_deref(), text.as_bytes())
}

fn analyze(args: AnalyzeArgs) -> Result<()> {
    let (x, y) = match (&args.pair, &args.x, &args.y) {
        (Some(path), _, _) => {
            let pair = read_pair(path)?;
            (pair.x, pair.y)
        }
        (None, Some(x), Some(y)) => (parse_bits(x)?, parse_bits(y)?),
        _ => return Err(CliError::Usage("give --pair or both --x and --y".into())),
    };
    let opts = AnalysisOptions {
        supremum: args.sup.options(),
        max_blocks: args.max_blocks,
    };
    let a = analyze_pair_with(&x, &y, &args.p, &opts)?;
    let text = match args.format {
        Format::Json => json_line(&a),
        Format::Text => format!(
            "n = {}\nhamming = {}\nedit distance = {}\nweight difference = {}\n\
             multiplicity = {}\nsign changes = {}\nPTE degree = {}\n\
             sup in [{:.6e}, {:.6e}] at theta = {:.6}\nlower bound from multiplicity = 10^{:.2}\n\
             l1 separation = {:.6e}\n",
            a.n,
            a.hamming,
            a.edit_distance,
            a.weight_difference,
            a.multiplicity,
            a.sign_changes,
            a.pte_degree,
            a.supremum.lower,
            a.supremum.upper,
            a.supremum.witness_theta,
            a.theory_lower_bound_log10,
            a.l1_separation
        ),
        Format::Csv => return Err(CliError::Usage("analyze writes json or text".into())),
    };
    emit(args.out.as_deref(), text.as_bytes())
}

fn sample(args: SampleArgs) -> Result<()> {
    let x = match (&args.string, &args.pair) {
        (Some(s), _) => parse_bits(s)?,
        (None, Some(path)) => {
            let pair = read_pair(path)?;
            if args.which == Which::X {
                pair.x
            } else {
                pair.y
            }
        }
        _ => return Err(CliError::Usage("give --string or --pair".into())),
    };
    let batch = TraceBatch::sample(&x, &args.p, args.seed, args.num);
    let bytes = match args.format {
        Format::Text => {
            let mut buf = Vec::new();
            write_traces(&batch, &mut buf).expect("writing to memory");
            buf
        }
        Format::Json => json_line(&batch.traces()).into_bytes(),
        Format::Csv => return Err(CliError::Usage("sample writes text or json".into())),
    };
    emit(args.out.as_deref(), &bytes)
}

fn distinguish(args: DistinguishArgs) -> Result<()> {
    let pair = read_pair(&args.pair)?;
    let norm = match args.norm {
        Norm::L1 => ProfileNorm::L1,
        Norm::Linf => ProfileNorm::Linf,
    };
    let decision = match (&args.traces, args.simulate) {
        (Some(path), _) => {
            let file = fs::File::open(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            let batch = read_traces(BufReader::new(file))?;
            let circle = batch.circle().clone();
            match args.method {
                Method::Potential => potential_distinguish(&batch, &pair.x, &pair.y, &circle)?,
                Method::Mean => {
                    mean_based_distinguish_with(&batch, &pair.x, &pair.y, &circle, norm)?
                }
            }
        }
        (None, Some(which)) => {
            if args.num == 0 {
                return Err(CliError::Usage("--num must be at least 1".into()));
            }
            let source = if which == Which::X { &pair.x } else { &pair.y };
            let profile = simulate_profile(source, &args.p, args.seed, args.num)?;
            match args.method {
                Method::Potential => {
                    potential_decide(&profile, args.num, &pair.x, &pair.y, &args.p)?
                }
                Method::Mean => mean_decide(&profile, args.num, &pair.x, &pair.y, &args.p, norm)?,
            }
        }
        _ => return Err(CliError::Usage("give --traces or --simulate".into())),
    };
    emit(args.out.as_deref(), json_line(&decision).as_bytes())
}

#[derive(serde::Serialize)]
struct SweepRow {
    family: &'static str,
    k: u32,
    n: usize,
    sup_lo: f64,
    sup_hi: f64,
    multiplicity: usize,
    pte_degree: i64,
    l1_separation: f64,
}

fn sweep(args: SweepArgs) -> Result<()> {
    let mut ks = args.k.clone();
    ks.sort_unstable();
    ks.dedup();
    let opts = args.sup.options();
    let mut rows = Vec::new();
    for k in ks {
        let (x, y) = match args.family {
            Family::Hard => {
                let n = tracedist::construct::order_degree(k.min(tracedist::construct::MAX_ORDER));
                let prefix = if args.padded {
                    BitString::zeros(n)
                } else {
                    BitString::new()
                };
                let spec = hard_pair(k, &prefix)?;
                (spec.x, spec.y)
            }
            Family::Intro => intro_pair(k as usize),
        };
        let f = &IntPolynomial::from_string(&x) - &IntPolynomial::from_string(&y);
        let (multiplicity, _) = multiplicity_at_one(&f)?;
        let cert = circle_supremum_with(&f, &args.p, &opts)?;
        rows.push(SweepRow {
            family: match args.family {
                Family::Hard => "hard",
                Family::Intro => "intro",
            },
            k,
            n: x.len(),
            sup_lo: cert.lower,
            sup_hi: cert.upper,
            multiplicity,
            pte_degree: multiplicity as i64 - 1,
            l1_separation: tracedist::channel::profile_l1_separation(&x, &y, &args.p)?,
        });
    }
    let text = match args.format {
        Format::Csv => {
            let mut s =
                String::from("family,k,n,sup_lo,sup_hi,multiplicity,pte_degree,l1_separation\n");
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{},{:e},{:e},{},{},{:e}\n",
                    r.family,
                    r.k,
                    r.n,
                    r.sup_lo,
                    r.sup_hi,
                    r.multiplicity,
                    r.pte_degree,
                    r.l1_separation
                ));
            }
            s
        }
        Format::Json => json_line(&rows),
        Format::Text => return Err(CliError::Usage("sweep writes csv or json".into())),
    };
    emit(args.out.as_deref(), text.as_bytes())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Analyze(a) => analyze(a),
        Command::Sample(a) => sample(a),
        Command::Distinguish(a) => distinguish(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(
            CliError::Lib(tracedist::Error::IdenticalStrings).exit_code(),
            2
        );
        assert_eq!(
            CliError::Lib(tracedist::Error::Invariant("broken".into())).exit_code(),
            3
        );
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
