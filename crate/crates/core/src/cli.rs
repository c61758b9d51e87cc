//! Command-line front end and the text file formats it reads and writes.
//!
//! Instance file:
//!
//! ```text
//! hardstrings-instance 1
//! mode=hamming k=2 d=4 count=2 encoding=compact
//! 1010
//! 0101
//! ```
//!
//! Text file (a reduced text with its gap):
//!
//! ```text
//! hardstrings-text 1
//! mode=edit d=2 blocks=2 encoding=compact
//! $$##
//! $$##01$$##11$$##
//! ```
//!
//! Gap file:
//!
//! ```text
//! hardstrings-gap 1
//! mode=mismatch d=2
//! $$#$
//! ```
//!
//! Header fields may appear in any order. CRLF line endings are accepted
//! and output always uses LF.
//!
//! Exit codes: 0 success, 1 property failure, 2 usage or parameter error,
//! 3 I/O error, 4 gap string not found.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gapstrings::{
    default_mismatch_gap, edit_gap, find_gap_violation, mismatch_gap, GapError, GapMode, GapString,
    SearchStrategy,
};
use crate::hardgen::{
    binom_bounds_check, count_queries_distinct, count_queries_formula, count_within_ball_brute,
    count_within_ball_closed_form, enumerate_base_strings, enumerate_queries, generate_dictionary,
    parse_probability, BlockParams, BlockString, DictionaryConfig, HardgenError,
};
use crate::reduction::{
    build_text, build_text_with_gap, dict_lookup_via_text, transform_instance, verify_edit_offsets,
    verify_offset_exclusion, Instance, Mode, ReductionError, TextArtifact,
};
use crate::solvers::{
    all_substring_distances, dict_lookup_brute, dict_lookup_brute_with_stats, text_search_edit,
    trie_build, trie_lookup, SearchStats, SolverError,
};
use crate::stoppers::{stoppers_transform, transformed_len, StoppersError};
use crate::strings::{edit_distance, hamming, StringsError, Symbol, SymbolString};

pub const INSTANCE_MAGIC: &str = "hardstrings-instance 1";
pub const TEXT_MAGIC: &str = "hardstrings-text 1";
pub const GAP_MAGIC: &str = "hardstrings-gap 1";
pub const BENCH_HEADER: &str = "solver,k,d,n,queries,mean_ns,median_ns,max_ns,nodes,answers";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Param(String),
    #[error("malformed file: {0}")]
    Format(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    GapNotFound(String),
    #[error("{0} propert{} failed", if *.0 == 1 { "y" } else { "ies" })]
    PropertyFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::PropertyFailed(_) => 1,
            CliError::Param(_) | CliError::Format(_) => 2,
            CliError::Io { .. } => 3,
            CliError::GapNotFound(_) => 4,
        }
    }
}

impl From<HardgenError> for CliError {
    fn from(e: HardgenError) -> Self {
        CliError::Param(e.to_string())
    }
}

impl From<GapError> for CliError {
    fn from(e: GapError) -> Self {
        match e {
            GapError::NotFound { .. } => CliError::GapNotFound(e.to_string()),
            other => CliError::Param(other.to_string()),
        }
    }
}

impl From<ReductionError> for CliError {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::Gap(g) => g.into(),
            other => CliError::Param(other.to_string()),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        CliError::Param(e.to_string())
    }
}

impl From<StoppersError> for CliError {
    fn from(e: StoppersError) -> Self {
        CliError::Param(e.to_string())
    }
}

impl From<StringsError> for CliError {
    fn from(e: StringsError) -> Self {
        CliError::Format(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Encoding {
    Compact,
    Tokens,
}

impl Encoding {
    fn as_str(self) -> &'static str {
        match self {
            Encoding::Compact => "compact",
            Encoding::Tokens => "tokens",
        }
    }

    /// Compact when every string allows it.
    pub fn for_strings<'a>(strings: impl IntoIterator<Item = &'a SymbolString>) -> Encoding {
        if strings.into_iter().all(|s| s.is_compact_encodable()) {
            Encoding::Compact
        } else {
            Encoding::Tokens
        }
    }

    fn encode(self, s: &SymbolString) -> Result<String, CliError> {
        match self {
            Encoding::Compact => s
                .to_compact()
                .ok_or_else(|| CliError::Param(format!("{s} has no compact encoding"))),
            Encoding::Tokens => Ok(s.to_tokens()),
        }
    }

    fn decode(self, line: &str) -> Result<SymbolString, CliError> {
        Ok(match self {
            Encoding::Compact => SymbolString::parse_compact(line)?,
            Encoding::Tokens => SymbolString::parse_tokens(line)?,
        })
    }
}

impl FromStr for Encoding {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "compact" => Ok(Encoding::Compact),
            "tokens" => Ok(Encoding::Tokens),
            other => Err(CliError::Format(format!("unknown encoding {other:?}"))),
        }
    }
}

fn normalize(text: &str) -> Vec<&str> {
    let mut lines: Vec<&str> = text
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .collect();
    if lines.last() == Some(&"") {
        lines.pop();
    }
    lines
}

fn parse_header(line: &str) -> Result<BTreeMap<&str, &str>, CliError> {
    line.split_whitespace()
        .map(|kv| {
            kv.split_once('=')
                .ok_or_else(|| CliError::Format(format!("header field {kv:?} is not key=value")))
        })
        .collect()
}

fn field<T: FromStr>(h: &BTreeMap<&str, &str>, key: &str) -> Result<T, CliError> {
    let raw = h
        .get(key)
        .ok_or_else(|| CliError::Format(format!("header is missing {key}")))?;
    raw.parse()
        .map_err(|_| CliError::Format(format!("bad value {raw:?} for {key}")))
}

fn expect_magic<'a>(
    lines: &[&'a str],
    magic: &str,
) -> Result<BTreeMap<&'a str, &'a str>, CliError> {
    if lines.first() != Some(&magic) {
        return Err(CliError::Format(format!("first line must be {magic:?}")));
    }
    let header = lines
        .get(1)
        .ok_or_else(|| CliError::Format("missing header line".into()))?;
    parse_header(header)
}

/// A dictionary file. `d` is the common string length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub mode: Mode,
    pub k: usize,
    pub d: usize,
    pub encoding: Encoding,
    pub strings: Vec<SymbolString>,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        InstanceFile {
            mode: inst.mode(),
            k: inst.k(),
            d: inst.d(),
            encoding: Encoding::for_strings(inst.strings()),
            strings: inst.strings().to_vec(),
        }
    }

    pub fn to_instance(&self) -> Result<Instance, CliError> {
        Ok(Instance::new(
            self.strings.clone(),
            self.d,
            self.k,
            self.mode,
        )?)
    }

    pub fn serialize(&self) -> Result<String, CliError> {
        let mut out = format!(
            "{INSTANCE_MAGIC}\nmode={} k={} d={} count={} encoding={}\n",
            self.mode,
            self.k,
            self.d,
            self.strings.len(),
            self.encoding.as_str()
        );
        for s in &self.strings {
            out.push_str(&self.encoding.encode(s)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let lines = normalize(text);
        let h = expect_magic(&lines, INSTANCE_MAGIC)?;
        let mode: Mode = field::<String>(&h, "mode")?.parse()?;
        let (k, d, count): (usize, usize, usize) =
            (field(&h, "k")?, field(&h, "d")?, field(&h, "count")?);
        let encoding: Encoding = field::<String>(&h, "encoding")?.parse()?;
        let body = &lines[2..];
        if body.len() != count {
            return Err(CliError::Format(format!(
                "header declares {count} strings, body has {}",
                body.len()
            )));
        }
        let strings = body
            .iter()
            .enumerate()
            .map(|(i, line)| {
                let s = encoding.decode(line)?;
                if s.len() != d {
                    return Err(CliError::Format(format!(
                        "line {} has length {}, expected {d}",
                        i + 3,
                        s.len()
                    )));
                }
                Ok(s)
            })
            .collect::<Result<_, _>>()?;
        Ok(InstanceFile {
            mode,
            k,
            d,
            encoding,
            strings,
        })
    }
}

fn gap_mode_name(m: GapMode) -> &'static str {
    match m {
        GapMode::Mismatch => "mismatch",
        GapMode::Edit => "edit",
    }
}

pub fn serialize_gap(g: &GapString) -> String {
    format!(
        "{GAP_MAGIC}\nmode={} d={}\n{}\n",
        gap_mode_name(g.mode()),
        g.d(),
        g.symbols()
    )
}

/// Parses a gap file. Mismatch gaps are verified unless `unverified`.
pub fn parse_gap(text: &str, unverified: bool) -> Result<GapString, CliError> {
    let lines = normalize(text);
    let h = expect_magic(&lines, GAP_MAGIC)?;
    let d: usize = field(&h, "d")?;
    let mode: String = field(&h, "mode")?;
    let body = lines
        .get(2)
        .ok_or_else(|| CliError::Format("missing gap line".into()))?;
    let symbols = SymbolString::parse_compact(body)?;
    match mode.as_str() {
        "edit" => {
            let g = edit_gap(d)?;
            if *g.symbols() != symbols {
                return Err(CliError::Format(format!(
                    "edit gap for d = {d} must be {g}"
                )));
            }
            Ok(g)
        }
        "mismatch" if unverified => Ok(GapString::unverified(symbols, d)?),
        "mismatch" => Ok(GapString::mismatch(symbols, d)?),
        other => Err(CliError::Format(format!("unknown gap mode {other:?}"))),
    }
}

pub fn serialize_text(art: &TextArtifact) -> Result<String, CliError> {
    let encoding = Encoding::for_strings([art.text()]);
    Ok(format!(
        "{TEXT_MAGIC}\nmode={} d={} blocks={} encoding={}\n{}\n{}\n",
        art.mode(),
        art.d(),
        art.block_count(),
        encoding.as_str(),
        art.gap().symbols(),
        encoding.encode(art.text())?
    ))
}

pub fn parse_text(text: &str) -> Result<TextArtifact, CliError> {
    let lines = normalize(text);
    let h = expect_magic(&lines, TEXT_MAGIC)?;
    let mode: Mode = field::<String>(&h, "mode")?.parse()?;
    let d: usize = field(&h, "d")?;
    let blocks: usize = field(&h, "blocks")?;
    let encoding: Encoding = field::<String>(&h, "encoding")?.parse()?;
    if lines.len() != 4 {
        return Err(CliError::Format(
            "text file needs a gap line and a text line".into(),
        ));
    }
    let g = SymbolString::parse_compact(lines[2])?;
    let gap = match mode {
        Mode::Hamming => GapString::unverified(g, d)?,
        Mode::Edit => {
            let e = edit_gap(d)?;
            if *e.symbols() != g {
                return Err(CliError::Format("edit-mode text must use $^d #^d".into()));
            }
            e
        }
    };
    let art = TextArtifact::from_parts(encoding.decode(lines[3])?, gap)?;
    if art.block_count() != blocks {
        return Err(CliError::Format(format!(
            "header declares {blocks} blocks, text has {}",
            art.block_count()
        )));
    }
    Ok(art)
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn emit(out: Option<&Path>, content: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => stdout
            .write_all(content.as_bytes())
            .map_err(|e| CliError::Io {
                path: "<stdout>".into(),
                message: e.to_string(),
            }),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "hardstrings",
    version,
    about = "Hard instances for approximate string indexing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate query strings, base strings or a filtered dictionary.
    Gen(GenArgs),
    /// Apply the stoppers transform to a Hamming-mode instance.
    Transform(TransformArgs),
    /// Find or construct a gap string.
    GenGap(GenGapArgs),
    /// Interleave a dictionary with a gap string.
    BuildText(BuildTextArgs),
    /// Look up a query in a reduced text.
    Query(QueryArgs),
    /// Run a property-check suite.
    Verify(VerifyArgs),
    /// Time a solver over a range of k and write CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Queries,
    Dict,
    Base,
}

#[derive(Debug, Args)]
struct GenArgs {
    kind: GenKind,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    d: usize,
    /// Keep a seeded sample of this many strings.
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, env = "HARDSTRINGS_SEED", default_value_t = 0)]
    seed: u64,
    /// Selection probability, e.g. "1/17" or "0.25". Defaults to the value
    /// derived from the prune radius.
    #[arg(long)]
    select_prob: Option<String>,
    #[arg(long)]
    prune_radius: Option<usize>,
    /// Total dictionary length used to derive alpha. Defaults to d b^k.
    #[arg(long)]
    n: Option<u128>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TransformArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GapKind {
    Mismatch,
    Edit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Exhaustive,
    Random,
    Kwise,
}

impl From<StrategyArg> for SearchStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Exhaustive => SearchStrategy::Exhaustive,
            StrategyArg::Random => SearchStrategy::RandomRetry,
            StrategyArg::Kwise => SearchStrategy::KWise,
        }
    }
}

#[derive(Debug, Args)]
struct GenGapArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, value_enum, default_value_t = GapKind::Mismatch)]
    mode: GapKind,
    /// Search strategy for mismatch gaps; exhaustive for 2d <= 24 and
    /// kwise otherwise when omitted.
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    #[arg(long, env = "HARDSTRINGS_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1 << 20)]
    budget: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BuildTextArgs {
    #[arg(long)]
    dict: PathBuf,
    /// "auto" or a gap file.
    #[arg(long, default_value = "auto")]
    gap: String,
    /// Accept a mismatch gap file that fails verification.
    #[arg(long)]
    unverified_gap: bool,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Hamming,
    Edit,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Hamming => Mode::Hamming,
            ModeArg::Edit => Mode::Edit,
        }
    }
}

#[derive(Debug, Args)]
struct QueryArgs {
    #[arg(long)]
    text: PathBuf,
    /// Query string, compact ("0110") or tokens ("0 1 c2").
    #[arg(long)]
    pattern: String,
    #[arg(long)]
    k: usize,
    /// Defaults to the mode recorded in the text file.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Stoppers,
    Gap,
    Counts,
    Reduction,
    Solvers,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// Largest d checked exhaustively by the stoppers suite.
    #[arg(long, default_value_t = 8)]
    max_d: usize,
    /// Block parameter for the gap suite, or d for the counts suite.
    /// Repeatable.
    #[arg(long)]
    d: Vec<usize>,
    /// k for the counts suite.
    #[arg(long)]
    k: Option<usize>,
    /// Forced gap string for the gap suite (compact form).
    #[arg(long)]
    gap: Option<String>,
    /// Randomized trials per property.
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, env = "HARDSTRINGS_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverKind {
    Brute,
    Trie,
}

impl SolverKind {
    fn as_str(self) -> &'static str {
        match self {
            SolverKind::Brute => "brute",
            SolverKind::Trie => "trie",
        }
    }
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    solver: SolverKind,
    #[arg(long, default_value_t = 0)]
    kmin: usize,
    #[arg(long, default_value_t = 4)]
    kmax: usize,
    #[arg(long, default_value_t = 16)]
    d: usize,
    /// Total dictionary length; must be a multiple of d.
    #[arg(long, default_value_t = 4096)]
    n: usize,
    #[arg(long, default_value_t = 200)]
    queries: usize,
    #[arg(long, env = "HARDSTRINGS_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
                2
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
                0
            };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(&a, stdout),
        Command::Transform(a) => cmd_transform(&a, stdout),
        Command::GenGap(a) => cmd_gen_gap(&a, stdout),
        Command::BuildText(a) => cmd_build_text(&a, stdout),
        Command::Query(a) => cmd_query(&a, stdout),
        Command::Verify(a) => cmd_verify(&a, stdout),
        Command::Bench(a) => cmd_bench(&a, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// Seeded sample of `count` items, kept in their original order.
fn sample<T: Clone>(items: Vec<T>, count: Option<usize>, seed: u64) -> Vec<T> {
    match count {
        Some(c) if c < items.len() => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut idx = rand::seq::index::sample(&mut rng, items.len(), c).into_vec();
            idx.sort_unstable();
            idx.into_iter().map(|i| items[i].clone()).collect()
        }
        _ => items,
    }
}

fn cmd_gen(a: &GenArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let p = BlockParams::new(a.k, a.d)?;
    let strings: Vec<BlockString> = match a.kind {
        GenKind::Queries => sample(enumerate_queries(p)?, a.count, a.seed),
        GenKind::Base => sample(enumerate_base_strings(p)?, a.count, a.seed),
        GenKind::Dict => {
            let n = match a.n {
                Some(n) => n,
                None => (p.b() as u128)
                    .checked_pow(p.k() as u32)
                    .and_then(|x| x.checked_mul(p.d() as u128))
                    .ok_or_else(|| CliError::Param("d b^k overflows; pass --n".into()))?,
            };
            let mut cfg = DictionaryConfig::from_alpha(p, n, a.seed)?;
            if let Some(r) = a.prune_radius {
                cfg.prune_radius = r;
                let q = crate::hardgen::compute_select_prob(p.k(), p.d(), r)?;
                if let (Some(num), Some(den)) = (q.numer().to_u64(), q.denom().to_u64()) {
                    cfg.select_prob = num_rational::Ratio::new(num, den);
                }
            }
            if let Some(sp) = &a.select_prob {
                cfg.select_prob = parse_probability(sp)?;
            }
            sample(generate_dictionary(&cfg)?, a.count, a.seed)
        }
    };
    let file = InstanceFile {
        mode: Mode::Hamming,
        k: a.k,
        d: a.d,
        encoding: Encoding::Compact,
        strings: strings.iter().map(|s| s.to_symbol_string()).collect(),
    };
    emit(a.out.as_deref(), &file.serialize()?, stdout)
}

fn cmd_transform(a: &TransformArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let file = InstanceFile::parse(&read_file(&a.input)?)?;
    if file.mode != Mode::Hamming {
        return Err(CliError::Param(
            "input is already an Edit-mode instance".into(),
        ));
    }
    let out = transform_instance(&file.to_instance()?)?;
    let mut file = InstanceFile::from_instance(&out);
    file.encoding = Encoding::Tokens;
    emit(a.out.as_deref(), &file.serialize()?, stdout)
}

fn cmd_gen_gap(a: &GenGapArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let g = match (a.mode, a.strategy) {
        (GapKind::Edit, _) => edit_gap(a.d)?,
        (GapKind::Mismatch, None) => default_mismatch_gap(a.d)?,
        (GapKind::Mismatch, Some(s)) => mismatch_gap(a.d, s.into(), a.seed, a.budget)?,
    };
    emit(a.out.as_deref(), &serialize_gap(&g), stdout)
}

fn cmd_build_text(a: &BuildTextArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let dict = InstanceFile::parse(&read_file(&a.dict)?)?.to_instance()?;
    let art = if a.gap == "auto" {
        if a.epsilon != 0.0 {
            let gap = match dict.mode() {
                Mode::Hamming => default_mismatch_gap(dict.d())?,
                Mode::Edit => edit_gap(dict.d())?,
            };
            build_text_with_gap(&dict, gap, a.epsilon)?
        } else {
            build_text(&dict)?
        }
    } else {
        let gap = parse_gap(&read_file(Path::new(&a.gap))?, a.unverified_gap)?;
        let expected = match dict.mode() {
            Mode::Hamming => GapMode::Mismatch,
            Mode::Edit => GapMode::Edit,
        };
        if gap.mode() != expected {
            return Err(CliError::Param(format!(
                "{} dictionary needs a {} gap",
                dict.mode(),
                gap_mode_name(expected)
            )));
        }
        build_text_with_gap(&dict, gap, a.epsilon)?
    };
    emit(a.out.as_deref(), &serialize_text(&art)?, stdout)
}

fn cmd_query(a: &QueryArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let art = parse_text(&read_file(&a.text)?)?;
    let q: SymbolString = a.pattern.parse()?;
    let mode = a.mode.map(Mode::from).unwrap_or(art.mode());
    let mut out = String::new();
    for ans in dict_lookup_via_text(&art, &q, a.k, mode)? {
        writeln!(out, "{ans}").unwrap();
    }
    emit(None, &out, stdout)
}

/// Collects PASS/FAIL lines for one verify run.
#[derive(Debug, Default)]
pub struct VerifyReport {
    lines: Vec<String>,
    failures: usize,
}

impl VerifyReport {
    fn check(&mut self, name: &str, result: Result<String, String>) {
        match result {
            Ok(detail) => self.lines.push(format!("PASS {name} ({detail})")),
            Err(cx) => {
                self.failures += 1;
                self.lines.push(format!("FAIL {name}: {cx}"));
            }
        }
    }

    pub fn failures(&self) -> usize {
        self.failures
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }
}

fn random_bits(rng: &mut ChaCha8Rng, d: usize) -> SymbolString {
    SymbolString::from_bits((0..d).map(|_| rng.gen::<bool>()))
}

fn all_bits(d: usize) -> Vec<SymbolString> {
    (0..1u64 << d)
        .map(|v| SymbolString::from_bits((0..d).map(|i| v >> (d - 1 - i) & 1 == 1)))
        .collect()
}

fn cmd_verify(a: &VerifyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut report = VerifyReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    match a.suite {
        Suite::Stoppers => verify_stoppers(&mut report, a.max_d, a.trials, &mut rng)?,
        Suite::Gap => verify_gaps(&mut report, &a.d, a.gap.as_deref())?,
        Suite::Counts => {
            let params: Vec<(usize, usize)> = match (a.k, a.d.as_slice()) {
                (None, []) => vec![(2, 8), (4, 8), (4, 16)],
                (Some(k), []) => vec![(k, 4 * k)],
                (k, ds) => ds.iter().map(|&d| (k.unwrap_or(2), d)).collect(),
            };
            for (k, d) in params {
                verify_counts(&mut report, k, d)?;
            }
        }
        Suite::Reduction => verify_reduction(&mut report, a.trials, &mut rng)?,
        Suite::Solvers => verify_solvers(&mut report, a.trials, &mut rng)?,
    }
    let mut out = report.lines.join("\n");
    writeln!(
        out,
        "\n{} passed, {} failed",
        report.lines.len() - report.failures,
        report.failures
    )
    .unwrap();
    emit(None, &out, stdout)?;
    if report.failures > 0 {
        return Err(CliError::PropertyFailed(report.failures));
    }
    Ok(())
}

fn verify_stoppers(
    report: &mut VerifyReport,
    max_d: usize,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(), CliError> {
    let check_pair = |x: &SymbolString, y: &SymbolString, tx: &SymbolString, ty: &SymbolString| {
        let (e, h) = (edit_distance(tx, ty), hamming(x, y).unwrap());
        (e == h)
            .then_some(())
            .ok_or(format!("X={x} Y={y}: ED={e} HAM={h}"))
    };
    let mut d = 1;
    while d <= max_d {
        let xs = all_bits(d);
        let ts = xs
            .iter()
            .map(|x| stoppers_transform(x))
            .collect::<Result<Vec<_>, _>>()?;
        let len = ts
            .iter()
            .find(|t| t.len() != transformed_len(d))
            .map_or(Ok(format!("{} strings", xs.len())), |t| {
                Err(format!("length {} != {}", t.len(), transformed_len(d)))
            });
        report.check(&format!("length d={d}"), len);
        let mut res = Ok(format!("{} pairs", xs.len() * xs.len()));
        'outer: for i in 0..xs.len() {
            for j in 0..xs.len() {
                if let Err(e) = check_pair(&xs[i], &xs[j], &ts[i], &ts[j]) {
                    res = Err(e);
                    break 'outer;
                }
            }
        }
        report.check(&format!("ed=ham exhaustive d={d}"), res);
        d *= 2;
    }
    for d in [16usize, 32] {
        let mut res = Ok(format!("{trials} random pairs"));
        for _ in 0..trials {
            let (x, y) = (random_bits(rng, d), random_bits(rng, d));
            let (tx, ty) = (stoppers_transform(&x)?, stoppers_transform(&y)?);
            if let Err(e) = check_pair(&x, &y, &tx, &ty) {
                res = Err(e);
                break;
            }
        }
        report.check(&format!("ed=ham random d={d}"), res);
    }
    Ok(())
}

fn verify_gaps(
    report: &mut VerifyReport,
    ds: &[usize],
    forced: Option<&str>,
) -> Result<(), CliError> {
    if let Some(g) = forced {
        let symbols = SymbolString::parse_compact(g)?;
        let d = match ds {
            [d] => *d,
            [] => symbols.len() / 2,
            _ => return Err(CliError::Param("a forced gap takes at most one --d".into())),
        };
        let res = match find_gap_violation(&symbols, d)? {
            None => Ok("all offsets".to_string()),
            Some(v) => Err(format!("{symbols} {v}")),
        };
        report.check(&format!("gap property d={d}"), res);
        return Ok(());
    }
    let ds = if ds.is_empty() { &[2, 4, 8][..] } else { ds };
    for &d in ds {
        let g = default_mismatch_gap(d)?;
        let res = match find_gap_violation(g.symbols(), d)? {
            None => Ok(g.to_string()),
            Some(v) => Err(format!("{g} {v}")),
        };
        report.check(&format!("gap property d={d}"), res);
    }
    Ok(())
}

fn verify_counts(report: &mut VerifyReport, k: usize, d: usize) -> Result<(), CliError> {
    let p = BlockParams::new(k, d)?;
    let queries = enumerate_queries(p)?;
    let tag = format!("k={k} d={d}");

    let distinct = count_queries_distinct(p);
    let formula = count_queries_formula(p);
    let scaled = BigUint::from(queries.len()) << (k / 2);
    report.check(
        &format!("query count {tag}"),
        if distinct == BigUint::from(queries.len()) && formula == scaled {
            Ok(format!(
                "{} distinct; formula {formula} = 2^{} x distinct, it counts generation orders",
                queries.len(),
                k / 2
            ))
        } else {
            Err(format!(
                "distinct {distinct}, enumerated {}, formula {formula}",
                queries.len()
            ))
        },
    );

    let mut res = Ok(format!("{} query strings", queries.len()));
    for q in &queries {
        let closed: BigUint = (0..=k)
            .map(|delta| count_within_ball_closed_form(q, delta))
            .sum::<Result<BigUint, _>>()?;
        let brute = count_within_ball_brute(q, k)?;
        if closed != BigUint::from(brute) {
            res = Err(format!("P={q}: closed form {closed}, brute {brute}"));
            break;
        }
    }
    report.check(&format!("ball count identity {tag}"), res);

    let base = enumerate_base_strings(p)?;
    let mut res = Ok(format!("{} x {} pairs", queries.len(), base.len()));
    'outer: for q in &queries {
        for s in &base {
            let h = q.hamming(s);
            if h < k / 2 || (h - k / 2) % 2 != 0 {
                res = Err(format!("P={q} S={s}: distance {h}"));
                break 'outer;
            }
        }
    }
    report.check(&format!("distance parity {tag}"), res);

    let res = (1..=d)
        .flat_map(|n| (1..n).map(move |kk| (n, kk)))
        .filter(|&(n, kk)| n <= 64 && kk <= 64)
        .find_map(|(n, kk)| match binom_bounds_check(n, kk) {
            Ok(true) => None,
            Ok(false) => Some(format!("n={n} k={kk}")),
            Err(e) => Some(e.to_string()),
        })
        .map_or(Ok(format!("all n <= {}", d.min(64))), Err);
    report.check(&format!("binomial bounds {tag}"), res);
    Ok(())
}

fn index_set(a: &[crate::reduction::MatchAnswer]) -> Vec<usize> {
    a.iter().map(|m| m.dict_index).collect()
}

/// One randomized reduction trial; returns a counterexample on failure.
pub fn reduction_trial(rng: &mut ChaCha8Rng, mode: Mode) -> Result<Option<String>, CliError> {
    let d = [2usize, 4, 8][rng.gen_range(0..3)];
    let count = rng.gen_range(1..=8);
    let k = rng.gen_range(0..d);
    let strings: Vec<SymbolString> = (0..count).map(|_| random_bits(rng, d)).collect();
    let q = if rng.gen_bool(0.5) {
        let mut base = strings[rng.gen_range(0..count)].clone().into_symbols();
        for _ in 0..rng.gen_range(0..=k + 1) {
            let i = rng.gen_range(0..d);
            base[i] = Symbol::bit(base[i] == Symbol::Zero);
        }
        SymbolString::new(base)
    } else {
        random_bits(rng, d)
    };
    let dict = Instance::new(strings, d, k, mode)?;
    let art = build_text(&dict)?;
    let held = match mode {
        Mode::Hamming => verify_offset_exclusion(&art, &q, k)?,
        Mode::Edit => verify_edit_offsets(&art, &q, k)?,
    };
    let brute = dict_lookup_brute(&dict, &q, k, mode)?;
    let describe = || {
        format!(
            "{mode} d={d} k={k} q={q} dict={:?}",
            dict.strings()
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
        )
    };
    if !held {
        return Ok(Some(format!("offset check failed: {}", describe())));
    }
    match dict_lookup_via_text(&art, &q, k, mode) {
        Ok(via)
            if index_set(&via) == index_set(&brute)
                && via
                    .iter()
                    .zip(&brute)
                    .all(|(a, b)| a.distance == b.distance) =>
        {
            Ok(None)
        }
        Ok(via) => Ok(Some(format!(
            "answers {:?} != {:?}: {}",
            index_set(&via),
            index_set(&brute),
            describe()
        ))),
        Err(e) => Ok(Some(format!("{e}: {}", describe()))),
    }
}

fn verify_reduction(
    report: &mut VerifyReport,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(), CliError> {
    for mode in [Mode::Hamming, Mode::Edit] {
        let mut res = Ok(format!("{trials} trials"));
        for _ in 0..trials {
            if let Some(cx) = reduction_trial(rng, mode)? {
                res = Err(cx);
                break;
            }
        }
        report.check(&format!("reduction round trip {mode}"), res);
    }
    Ok(())
}

fn verify_solvers(
    report: &mut VerifyReport,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(), CliError> {
    let mut res = Ok(format!("{trials} queries"));
    for _ in 0..trials {
        let d = rng.gen_range(1..=10);
        let strings = (0..rng.gen_range(0..=16))
            .map(|_| random_bits(rng, d))
            .collect();
        let inst = Instance::new(strings, d, 0, Mode::Hamming)?;
        let q = random_bits(rng, d);
        let k = rng.gen_range(0..=d.min(4));
        let brute = dict_lookup_brute(&inst, &q, k, Mode::Hamming)?;
        let (trie, _) = trie_lookup(&trie_build(&inst), &q, k)?;
        if brute != trie {
            res = Err(format!("q={q} k={k}: trie {trie:?} brute {brute:?}"));
            break;
        }
    }
    report.check("trie = brute", res);

    let mut res = Ok(format!("{trials} texts"));
    for _ in 0..trials {
        let (tl, pl) = (rng.gen_range(0..=10), rng.gen_range(0..=5));
        let (t, p) = (random_bits(rng, tl), random_bits(rng, pl));
        let k = rng.gen_range(0..=5);
        let got: Vec<(usize, usize)> = text_search_edit(&t, &p, k)
            .iter()
            .map(|h| (h.end, h.distance))
            .collect();
        let all = all_substring_distances(&t, &p);
        let expect: Vec<(usize, usize)> = (1..=t.len())
            .filter_map(|end| {
                let best = all.iter().filter(|x| x.1 == end).map(|x| x.2).min()?;
                (best <= k).then_some((end, best))
            })
            .collect();
        if got != expect {
            res = Err(format!("t={t} p={p} k={k}: {got:?} != {expect:?}"));
            break;
        }
    }
    report.check("edit search per-end minima", res);
    Ok(())
}

/// One CSV row of the benchmark.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRecord {
    pub solver: SolverKind,
    pub k: usize,
    pub d: usize,
    pub n: usize,
    /// Timed queries (warm-up excluded).
    pub queries: usize,
    pub mean_ns: u128,
    pub median_ns: u128,
    pub max_ns: u128,
    pub nodes: u64,
    pub answers: u64,
}

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.solver.as_str(),
            self.k,
            self.d,
            self.n,
            self.queries,
            self.mean_ns,
            self.median_ns,
            self.max_ns,
            self.nodes,
            self.answers
        )
    }
}

/// Runs the benchmark on a seeded random binary dictionary of `n / d`
/// strings. Queries are dictionary members with up to two flipped bits.
/// The first 10% of queries per `k` are warm-up and are not recorded.
pub fn bench(
    solver: SolverKind,
    ks: std::ops::RangeInclusive<usize>,
    d: usize,
    n: usize,
    queries: usize,
    seed: u64,
) -> Result<Vec<BenchRecord>, CliError> {
    if d == 0 || n == 0 || n % d != 0 {
        return Err(CliError::Param(format!(
            "n = {n} must be a positive multiple of d = {d}"
        )));
    }
    if queries == 0 || ks.is_empty() {
        return Err(CliError::Param("need at least one query and one k".into()));
    }
    if *ks.end() >= d {
        return Err(CliError::Param(format!("kmax must be below d = {d}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let strings: Vec<SymbolString> = (0..n / d).map(|_| random_bits(&mut rng, d)).collect();
    let qs: Vec<SymbolString> = (0..queries)
        .map(|_| {
            let mut s = strings[rng.gen_range(0..strings.len())]
                .clone()
                .into_symbols();
            for _ in 0..rng.gen_range(0..=2) {
                let i = rng.gen_range(0..d);
                s[i] = Symbol::bit(s[i] == Symbol::Zero);
            }
            SymbolString::new(s)
        })
        .collect();
    let inst = Instance::new(strings, d, 0, Mode::Hamming)?;
    let trie = (solver == SolverKind::Trie).then(|| trie_build(&inst));
    let warm = queries / 10;
    let mut out = Vec::new();
    for k in ks {
        let mut times = Vec::with_capacity(queries);
        let (mut nodes, mut answers) = (0u64, 0u64);
        for (i, q) in qs.iter().enumerate() {
            let started = Instant::now();
            let (found, stats): (Vec<_>, SearchStats) = match &trie {
                Some(t) => trie_lookup(t, q, k)?,
                None => dict_lookup_brute_with_stats(&inst, q, k, Mode::Hamming)?,
            };
            let elapsed = started.elapsed().as_nanos();
            if i >= warm {
                times.push(elapsed);
                nodes += stats.nodes_visited;
                answers += found.len() as u64;
            }
        }
        let timed = times.len();
        let mean_ns = times.iter().sum::<u128>() / timed as u128;
        let max_ns = *times.iter().max().unwrap();
        times.sort_unstable();
        out.push(BenchRecord {
            solver,
            k,
            d,
            n,
            queries: timed,
            mean_ns,
            median_ns: times[(timed - 1) / 2],
            max_ns,
            nodes,
            answers,
        });
    }
    Ok(out)
}

fn cmd_bench(a: &BenchArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if a.kmin > a.kmax {
        return Err(CliError::Param("kmin must not exceed kmax".into()));
    }
    let records = bench(a.solver, a.kmin..=a.kmax, a.d, a.n, a.queries, a.seed)?;
    let mut csv = format!("{BENCH_HEADER}\n");
    for r in &records {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    emit(a.out.as_deref(), &csv, stdout)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("hardstrings").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn instance_file_round_trip() {
        let file = InstanceFile {
            mode: Mode::Edit,
            k: 1,
            d: 3,
            encoding: Encoding::Tokens,
            strings: vec!["0 c1 1".parse().unwrap(), "1 c1 0".parse().unwrap()],
        };
        let text = file.serialize().unwrap();
        assert_eq!(InstanceFile::parse(&text).unwrap(), file);
        assert_eq!(
            InstanceFile::parse(&text.replace('\n', "\r\n")).unwrap(),
            file
        );

        let compact = InstanceFile {
            mode: Mode::Hamming,
            k: 1,
            d: 2,
            encoding: Encoding::Compact,
            strings: vec!["01".parse().unwrap()],
        };
        let text = compact.serialize().unwrap();
        assert_eq!(
            text,
            "hardstrings-instance 1\nmode=hamming k=1 d=2 count=1 encoding=compact\n01\n"
        );
        assert_eq!(InstanceFile::parse(&text).unwrap(), compact);
    }

    #[test]
    fn instance_file_rejects_bad_input() {
        let ok = "hardstrings-instance 1\nmode=hamming k=1 d=2 count=1 encoding=compact\n01\n";
        assert!(InstanceFile::parse(ok).is_ok());
        assert!(InstanceFile::parse(&ok.replace("count=1", "count=2")).is_err());
        assert!(InstanceFile::parse(&ok.replace("\n01\n", "\n011\n")).is_err());
        assert!(InstanceFile::parse(&ok.replace("hardstrings-instance", "nope")).is_err());
        assert!(InstanceFile::parse(&ok.replace(" k=1", "")).is_err());
    }

    #[test]
    fn gen_examples() {
        let (code, out, _) = run_args(&["gen", "queries", "--k", "2", "--d", "4"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 2 + 4);
        let (code, out, _) = run_args(&[
            "gen",
            "dict",
            "--k",
            "2",
            "--d",
            "4",
            "--select-prob",
            "1",
            "--prune-radius",
            "0",
        ]);
        assert_eq!(code, 0);
        assert_eq!(
            &out.lines().skip(2).collect::<Vec<_>>(),
            &["0101", "0110", "1001", "1010"]
        );
        let (code, _, err) = run_args(&["gen", "queries", "--k", "3", "--d", "6"]);
        assert_eq!(code, 2);
        assert!(err.contains("error"));
    }

    #[test]
    fn verify_gap_forced_failure() {
        let (code, out, _) = run_args(&["verify", "gap", "--d", "2", "--gap", "$$##"]);
        assert_eq!(code, 1);
        assert!(out.contains("FAIL") && out.contains("i=3"), "{out}");
        let (code, out, _) = run_args(&["verify", "gap"]);
        assert_eq!(code, 0, "{out}");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_args(&["frobnicate"]).0, 2);
        assert_eq!(run_args(&["--help"]).0, 0);
        assert_eq!(
            run_args(&[
                "query",
                "--text",
                "/nonexistent/x",
                "--pattern",
                "0",
                "--k",
                "0"
            ])
            .0,
            3
        );
    }

    #[test]
    fn bench_rows() {
        let rows = bench(SolverKind::Trie, 0..=3, 8, 8 * 32, 20, 7).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.windows(2).all(|w| w[0].nodes <= w[1].nodes));
        assert_eq!(rows[0].queries, 18);
        assert!(bench(SolverKind::Brute, 0..=8, 8, 64, 5, 0).is_err());
    }
}
