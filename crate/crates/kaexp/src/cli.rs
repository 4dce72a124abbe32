//! Command-line front end and JSON file formats.

use crate::arith::{self, ArithError, Polynomial, ResourceCap};
use crate::atm::{self, AtmBuilder, AtmConfig, AtmSpec, Label};
use crate::codec::{self, EncodingAlphabet, PathDecode};
use crate::dtm::{self, Dir, DtmBuilder, DtmSpec, Move, Verdict};
use crate::gen;
use crate::prenex::{self, Machine, PrenexError, PrenexInstance, QuantifierPrefix, SolveBounds, SolveOptions};
use crate::tiling::{self, GridSide, MultiTilingSystem, Relation, TilingError, TilingOptions};
use crate::verifier::{self, HValue, VerifierError, VerifierVerdict};
use crate::{StateId, Sym};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("format: {0}")]
    Format(String),
    #[error("resource cap: {0}")]
    Cap(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Format(_) => 2,
            CliError::Cap(_) => 3,
        }
    }
}

impl From<ArithError> for CliError {
    fn from(e: ArithError) -> Self {
        match e {
            ArithError::CapExceeded { .. } => CliError::Cap(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<PrenexError> for CliError {
    fn from(e: PrenexError) -> Self {
        match e {
            PrenexError::Arith(a) => a.into(),
            PrenexError::ResourceLimit(_) => CliError::Cap(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<TilingError> for CliError {
    fn from(e: TilingError) -> Self {
        match e {
            TilingError::Arith(a) => a.into(),
            TilingError::ResourceLimit(_) => CliError::Cap(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<VerifierError> for CliError {
    fn from(e: VerifierError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandReport {
    pub details: Vec<String>,
    pub trace: Option<Vec<String>>,
    pub verdict: String,
    pub code: i32,
}

impl CommandReport {
    fn verdict(ok: bool) -> Self {
        CommandReport {
            details: vec![],
            trace: None,
            verdict: if ok { "ACCEPT" } else { "REJECT" }.into(),
            code: if ok { 0 } else { 1 },
        }
    }

    fn info(verdict: impl Into<String>) -> Self {
        CommandReport {
            details: vec![],
            trace: None,
            verdict: verdict.into(),
            code: 0,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for l in self.details.iter().chain(self.trace.iter().flatten()) {
            out.push_str(l);
            out.push('\n');
        }
        out.push_str(&self.verdict);
        out.push('\n');
        out
    }
}

#[derive(Parser, Debug)]
#[command(name = "kaexp", about = "Bounded alternating machines, quantified tape problems and multi-tilings")]
struct Cli {
    /// bit cap for tower values
    #[arg(long, global = true, default_value_t = 1 << 20)]
    cap_bits: u64,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a table machine on tape words
    SimulateDtm {
        #[arg(long)]
        input: String,
        /// comma-separated tape words
        #[arg(long, default_value = "")]
        words: String,
        #[arg(long)]
        budget: u64,
        #[arg(long)]
        trace: bool,
    },
    /// Time-bounded acceptance of an alternating machine
    EvalAtm {
        #[arg(long)]
        input: Option<String>,
        #[arg(long)]
        word: String,
        #[arg(long)]
        budget: u64,
    },
    /// Encode a JSON list of configurations as a path word
    EncodePath {
        #[arg(long)]
        input: String,
        #[arg(long)]
        atm: Option<String>,
        #[arg(long)]
        h: usize,
    },
    /// Decode a path word (whitespace-separated tokens)
    DecodePath {
        #[arg(long)]
        input: String,
        #[arg(long)]
        atm: Option<String>,
        #[arg(long)]
        h: usize,
    },
    /// Build the path verifier and run it on tape words
    Verify {
        #[command(flatten)]
        v: VerifierArgs,
        /// one tape per line, tokens as in path files
        #[arg(long)]
        input: String,
        #[arg(long)]
        tapes: usize,
        #[arg(long)]
        trace: bool,
    },
    /// Decide a quantified table-machine instance
    SolvePrenex {
        #[arg(long)]
        input: String,
        #[command(flatten)]
        bounds: BoundArgs,
        #[arg(long)]
        oracle: bool,
    },
    /// Decide a quantified multi-tiling instance
    SolveTiling {
        #[arg(long)]
        input: String,
        #[arg(long)]
        side: Option<usize>,
        #[arg(long)]
        prefix: Option<String>,
        #[arg(long)]
        oracle: bool,
    },
    /// Reductions between the problems
    Reduce {
        #[command(subcommand)]
        which: Reduce,
    },
    /// Run the arithmetic property suites
    CheckLemmas {
        /// upper end of the klog threshold range
        #[arg(long, default_value_t = 70000)]
        range: u64,
    },
    /// Print a random table machine as JSON
    GenDtm {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        tapes: usize,
        #[arg(long, default_value = "_01")]
        alphabet: String,
        #[arg(long, default_value_t = 2)]
        extra_states: usize,
    },
}

#[derive(Subcommand, Debug)]
enum Reduce {
    AtmToPrenex {
        #[command(flatten)]
        v: VerifierArgs,
        /// runtime polynomial coefficients
        #[arg(long)]
        p: String,
        #[arg(long)]
        bounded: Option<usize>,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    PrenexToTiling {
        #[arg(long)]
        input: String,
        #[command(flatten)]
        bounds: BoundArgs,
        #[arg(long)]
        output: Option<String>,
        #[arg(long)]
        solve: bool,
    },
}

#[derive(Args, Debug)]
struct VerifierArgs {
    #[arg(long)]
    atm: Option<String>,
    #[arg(long)]
    word: String,
    /// coefficients, constant term first
    #[arg(long)]
    f: String,
    #[arg(long)]
    g: String,
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long)]
    h_override: Option<usize>,
}

#[derive(Args, Debug)]
struct BoundArgs {
    #[arg(long)]
    word_length: Option<usize>,
    #[arg(long)]
    budget: Option<u64>,
}

impl BoundArgs {
    fn bounds(&self) -> Result<Option<SolveBounds>, CliError> {
        match (self.word_length, self.budget) {
            (Some(word_length), Some(time)) => Ok(Some(SolveBounds::Override { word_length, time })),
            (None, None) => Ok(None),
            _ => Err(CliError::Usage("--word-length and --budget go together".into())),
        }
    }
}

// ---- file formats ----

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(untagged)]
pub enum NameRef {
    Index(usize),
    Name(String),
}

fn resolve(r: &NameRef, names: &[String], what: &str) -> Result<usize, CliError> {
    match r {
        NameRef::Index(i) if *i < names.len() => Ok(*i),
        NameRef::Name(s) => names.iter().position(|x| x == s).ok_or_else(|| CliError::Format(format!("unknown {what} {s:?}"))),
        NameRef::Index(i) => Err(CliError::Format(format!("{what} index {i} out of range"))),
    }
}

fn one_char(s: &str) -> Result<char, CliError> {
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(CliError::Format(format!("symbol {s:?} is not a single character"))),
    }
}

fn sym(alphabet: &[char], s: &str) -> Result<Sym, CliError> {
    let c = one_char(s)?;
    alphabet
        .iter()
        .position(|&x| x == c)
        .map(|i| i as Sym)
        .ok_or_else(|| CliError::Format(format!("symbol {s:?} not in alphabet")))
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct DtmEntry {
    pub state: NameRef,
    pub read: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub write: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jump: Option<usize>,
    pub next: NameRef,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct DtmFile {
    #[serde(rename = "type", default)]
    pub kind: Option<String>,
    pub tapes: usize,
    pub alphabet: Vec<String>,
    pub blank: String,
    pub states: Vec<String>,
    pub init: NameRef,
    pub accept: NameRef,
    pub reject: NameRef,
    #[serde(default)]
    pub delta: Vec<DtmEntry>,
}

impl DtmFile {
    pub fn to_spec(&self) -> Result<DtmSpec, CliError> {
        let alphabet: Vec<char> = self.alphabet.iter().map(|s| one_char(s)).collect::<Result<_, _>>()?;
        let blank = one_char(&self.blank)?;
        if !alphabet.contains(&blank) {
            return Err(CliError::Format("blank not in alphabet".into()));
        }
        let st = &self.states;
        let refs: Vec<&str> = st.iter().map(String::as_str).collect();
        let mut b = DtmBuilder::new(self.tapes, &alphabet, blank, &refs).roles(
            resolve(&self.init, st, "state")?,
            resolve(&self.accept, st, "state")?,
            resolve(&self.reject, st, "state")?,
        );
        for e in &self.delta {
            let q = resolve(&e.state, st, "state")?;
            let a = sym(&alphabet, &e.read)?;
            let next = resolve(&e.next, st, "state")?;
            match (&e.write, e.dir, e.jump) {
                (Some(w), Some(d), None) => {
                    let dir = Dir::from_i64(d).ok_or_else(|| CliError::Format(format!("direction {d}")))?;
                    b.ordinary(q, a, next, sym(&alphabet, w)?, dir);
                }
                (None, None, Some(j)) => {
                    b.jump(q, a, next, j);
                }
                _ => return Err(CliError::Format("entry needs write+dir or jump".into())),
            }
        }
        b.build().map_err(|e| CliError::Format(e.to_string()))
    }

    pub fn from_spec(d: &DtmSpec) -> Self {
        let k = d.alphabet.len();
        let delta = d
            .delta_table()
            .iter()
            .enumerate()
            .filter(|(i, _)| i / k != d.accept && i / k != d.reject)
            .map(|(i, mv)| {
                let (state, read) = (NameRef::Name(d.states[i / k].clone()), d.alphabet[i % k].to_string());
                match *mv {
                    Move::Ordinary { next, write, dir } => DtmEntry {
                        state,
                        read,
                        write: Some(d.alphabet[write as usize].to_string()),
                        dir: Some(dir.as_i64()),
                        jump: None,
                        next: NameRef::Name(d.states[next].clone()),
                    },
                    Move::Jump { next, tape } => DtmEntry {
                        state,
                        read,
                        write: None,
                        dir: None,
                        jump: Some(tape),
                        next: NameRef::Name(d.states[next].clone()),
                    },
                }
            })
            .collect();
        DtmFile {
            kind: Some("dtm".into()),
            tapes: d.tapes,
            alphabet: d.alphabet.iter().map(char::to_string).collect(),
            blank: d.alphabet[d.blank as usize].to_string(),
            states: d.states.clone(),
            init: NameRef::Name(d.states[d.init].clone()),
            accept: NameRef::Name(d.states[d.accept].clone()),
            reject: NameRef::Name(d.states[d.reject].clone()),
            delta,
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct PrenexFile {
    pub prefix: String,
    #[serde(default = "one")]
    pub k: u32,
    #[serde(flatten)]
    pub machine: DtmFile,
}

fn one() -> u32 {
    1
}

impl PrenexFile {
    pub fn to_instance(&self) -> Result<PrenexInstance, CliError> {
        let prefix: QuantifierPrefix = self.prefix.parse().map_err(|e: PrenexError| CliError::Format(e.to_string()))?;
        PrenexInstance::new(prefix, Machine::Table(self.machine.to_spec()?), self.k).map_err(|e| CliError::Format(e.to_string()))
    }
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct AtmEntry {
    pub state: NameRef,
    pub read: String,
    /// (next, write, dir)
    pub moves: Vec<(NameRef, String, i64)>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct AtmFile {
    #[serde(rename = "type", default)]
    pub kind: Option<String>,
    pub alphabet: Vec<String>,
    pub blank: String,
    pub states: Vec<String>,
    pub existential: Vec<NameRef>,
    pub universal: Vec<NameRef>,
    pub init: NameRef,
    pub accept: NameRef,
    pub reject: NameRef,
    #[serde(default)]
    pub delta: Vec<AtmEntry>,
}

impl AtmFile {
    pub fn to_spec(&self) -> Result<AtmSpec, CliError> {
        let alphabet: Vec<char> = self.alphabet.iter().map(|s| one_char(s)).collect::<Result<_, _>>()?;
        let blank = one_char(&self.blank)?;
        if !alphabet.contains(&blank) {
            return Err(CliError::Format("blank not in alphabet".into()));
        }
        let st = &self.states;
        let refs: Vec<&str> = st.iter().map(String::as_str).collect();
        let ids = |v: &[NameRef]| v.iter().map(|r| resolve(r, st, "state")).collect::<Result<Vec<_>, _>>();
        let mut b = AtmBuilder::new(&alphabet, blank, &refs)
            .roles(
                resolve(&self.init, st, "state")?,
                resolve(&self.accept, st, "state")?,
                resolve(&self.reject, st, "state")?,
            )
            .kinds(&ids(&self.existential)?, &ids(&self.universal)?);
        for e in &self.delta {
            let q = resolve(&e.state, st, "state")?;
            let a = sym(&alphabet, &e.read)?;
            for (next, write, d) in &e.moves {
                let dir = Dir::from_i64(*d).ok_or_else(|| CliError::Format(format!("direction {d}")))?;
                b.add(q, a, (resolve(next, st, "state")?, sym(&alphabet, write)?, dir));
            }
        }
        b.build().map_err(|e| CliError::Format(e.to_string()))
    }
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct TilingFile {
    pub tiles: Vec<String>,
    pub initial: Vec<NameRef>,
    pub accepting: Vec<NameRef>,
    #[serde(rename = "H")]
    pub h: Vec<(NameRef, NameRef)>,
    #[serde(rename = "V")]
    pub v: Vec<(NameRef, NameRef)>,
    #[serde(rename = "M")]
    pub m: Vec<(NameRef, NameRef)>,
    pub n: usize,
    pub k: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix: Option<String>,
}

impl TilingFile {
    pub fn to_system(&self) -> Result<MultiTilingSystem, CliError> {
        let names = &self.tiles;
        let mut seen = HashMap::new();
        if names.iter().any(|t| seen.insert(t, ()).is_some()) {
            return Err(CliError::Format("duplicate tile name".into()));
        }
        let ids = |v: &[NameRef]| v.iter().map(|r| resolve(r, names, "tile")).collect::<Result<Vec<_>, _>>();
        let rel = |v: &[(NameRef, NameRef)]| -> Result<Relation, CliError> {
            let pairs = v
                .iter()
                .map(|(a, b)| Ok((resolve(a, names, "tile")?, resolve(b, names, "tile")?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(Relation::from_pairs(names.len(), pairs))
        };
        MultiTilingSystem::new(names.clone(), ids(&self.initial)?, ids(&self.accepting)?, rel(&self.h)?, rel(&self.v)?, rel(&self.m)?, self.n, self.k)
            .map_err(|e| CliError::Format(e.to_string()))
    }

    pub fn from_system(sys: &MultiTilingSystem, prefix: Option<String>) -> Self {
        let name = |i: usize| NameRef::Name(sys.tiles[i].clone());
        let rel = |r: &Relation| r.pairs().map(|(a, b)| (name(a), name(b))).collect();
        TilingFile {
            tiles: sys.tiles.clone(),
            initial: sys.initial.iter().map(|&i| name(i)).collect(),
            accepting: sys.accepting.iter().map(|&i| name(i)).collect(),
            h: rel(&sys.h),
            v: rel(&sys.v),
            m: rel(&sys.m),
            n: sys.n,
            k: sys.k,
            prefix,
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct ConfigEntry {
    pub word: String,
    pub state: NameRef,
    pub head: usize,
}

fn read_file(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Format(format!("{path}: {e}")))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &str) -> Result<T, CliError> {
    serde_json::from_str(&read_file(path)?).map_err(|e| CliError::Format(format!("{path}: {e}")))
}

fn load_atm(path: &Option<String>) -> Result<AtmSpec, CliError> {
    match path {
        Some(p) => read_json::<AtmFile>(p)?.to_spec(),
        None => Ok(atm::toy_atm()),
    }
}

fn parse_word(alphabet: &[char], w: &str) -> Result<Vec<Sym>, CliError> {
    w.chars().map(|c| sym(alphabet, &c.to_string())).collect()
}

fn parse_poly(s: &str) -> Result<Polynomial, CliError> {
    let cs = s
        .split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|_| CliError::Usage(format!("bad coefficient {t:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Polynomial::new(cs)?)
}

// ---- dispatch ----

pub fn run_cli(args: &[String]) -> i32 {
    match execute(args) {
        Ok(r) => {
            print!("{}", r.render());
            r.code
        }
        Err(Ok(clap_err)) => {
            let _ = clap_err.print();
            if clap_err.use_stderr() {
                2
            } else {
                0
            }
        }
        Err(Err(e)) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

/// Parses and runs one command. The outer error is a clap usage or help
/// message, the inner one a command failure.
pub fn execute(args: &[String]) -> Result<CommandReport, Result<clap::Error, CliError>> {
    let cli = Cli::try_parse_from(args).map_err(Ok)?;
    let cap = ResourceCap::new(cli.cap_bits).map_err(|e| Err(e.into()))?;
    dispatch(cli.cmd, cap).map_err(Err)
}

fn dispatch(cmd: Command, cap: ResourceCap) -> Result<CommandReport, CliError> {
    match cmd {
        Command::SimulateDtm { input, words, budget, trace } => simulate(&input, &words, budget, trace),
        Command::EvalAtm { input, word, budget } => {
            let spec = load_atm(&input)?;
            let w = parse_word(&spec.alphabet, &word)?;
            let label = atm::atm_label(&spec, &AtmConfig::initial(&spec, &w), budget);
            let mut r = CommandReport::verdict(label == Label::Acc);
            r.details.push(format!("label={}", format!("{label:?}").to_lowercase()));
            Ok(r)
        }
        Command::EncodePath { input, atm, h } => {
            let spec = load_atm(&atm)?;
            let alph = EncodingAlphabet::for_atm(&spec).map_err(|e| CliError::Format(e.to_string()))?;
            let entries: Vec<ConfigEntry> = read_json(&input)?;
            let path = entries
                .iter()
                .map(|e| Ok(AtmConfig::new(parse_word(&spec.alphabet, &e.word)?, resolve(&e.state, &spec.states, "state")?, e.head, spec.blank)))
                .collect::<Result<Vec<_>, CliError>>()?;
            atm::is_path(&spec, &path).map_err(|e| CliError::Format(e.to_string()))?;
            let word = codec::encode_path(&alph, &path, h).map_err(|e| CliError::Format(e.to_string()))?;
            Ok(CommandReport::info(alph.render(&spec, &word)))
        }
        Command::DecodePath { input, atm, h } => {
            let spec = load_atm(&atm)?;
            let alph = EncodingAlphabet::for_atm(&spec).map_err(|e| CliError::Format(e.to_string()))?;
            let word = alph.parse(&spec, &read_file(&input)?).map_err(|e| CliError::Format(e.to_string()))?;
            Ok(match codec::decode_path(&spec, &alph, &word, h) {
                PathDecode::Path { configs, consumed } => {
                    let mut r = CommandReport::info(format!("PATH configs={} consumed={consumed}", configs.len()));
                    r.details = configs
                        .iter()
                        .map(|c| {
                            let w: String = c.word.iter().map(|&a| spec.alphabet[a as usize]).collect();
                            format!("config word={w:?} state={} head={}", spec.states[c.state], c.head)
                        })
                        .collect();
                    r
                }
                PathDecode::Malformed(reason) => CommandReport {
                    details: vec![],
                    trace: None,
                    verdict: format!("MALFORMED reason={}", reason.name()),
                    code: 1,
                },
            })
        }
        Command::Verify { v, input, tapes, trace } => {
            let (spec, vi) = build(&v, tapes, cap)?;
            let text = read_file(&input)?;
            let mut lines: Vec<&str> = text.lines().collect();
            lines.resize(tapes.max(lines.len()), "");
            if lines.len() > tapes {
                return Err(CliError::Format(format!("{} tape lines for {tapes} tapes", lines.len())));
            }
            let inputs = lines
                .iter()
                .map(|l| vi.alph.parse(&spec, l).map_err(|e| CliError::Format(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            let (verdict, tr) = verifier::run_verifier(&vi, &inputs)?;
            let mut r = CommandReport::verdict(verdict == VerifierVerdict::Accept);
            if trace {
                r.trace = Some(tr.render().lines().map(str::to_string).collect());
            }
            Ok(r)
        }
        Command::SolvePrenex { input, bounds, oracle } => {
            let inst = read_json::<PrenexFile>(&input)?.to_instance()?;
            let b = bounds.bounds()?.unwrap_or(SolveBounds::Canonical);
            let opts = SolveOptions { cap, ..SolveOptions::default() };
            let ok = if oracle {
                prenex::solve_naive(&inst.machine, inst.prefix.as_slice(), inst.k, b, &opts)?
            } else {
                prenex::solve_prenex(&inst, b, &opts)?
            };
            Ok(CommandReport::verdict(ok))
        }
        Command::SolveTiling { input, side, prefix, oracle } => {
            let file: TilingFile = read_json(&input)?;
            let sys = file.to_system()?;
            let text = prefix.or(file.prefix).unwrap_or_else(|| "E".repeat(sys.n));
            let qs: QuantifierPrefix = text.parse().map_err(|e: PrenexError| CliError::Usage(e.to_string()))?;
            let side = side.map_or(GridSide::Canonical, GridSide::Override);
            let opts = TilingOptions { cap, ..TilingOptions::default() };
            let ok = if oracle {
                let s = side.resolve(sys.k, sys.n, cap)?;
                tiling::solve_quantified_naive(&sys, qs.as_slice(), s, &opts)?
            } else {
                tiling::solve_quantified_tiling(&sys, qs.as_slice(), side, &opts)?
            };
            Ok(CommandReport::verdict(ok))
        }
        Command::Reduce { which: Reduce::AtmToPrenex { v, p, bounded, bounds } } => {
            let spec = load_atm(&v.atm)?;
            let w = parse_word(&spec.alphabet, &v.word)?;
            let (f, g) = (parse_poly(&v.f)?, parse_poly(&v.g)?);
            let p = parse_poly(&p)?.into_shaped()?;
            let red = match bounded {
                Some(j) => prenex::reduce_atm_to_prenex_bounded(&spec, &w, &f, &g, v.k, &p, j, v.h_override, cap)?,
                None => prenex::reduce_atm_to_prenex(&spec, &w, &f, &g, v.k, &p, v.h_override, cap)?,
            };
            let Machine::Verifier(vi) = &red.instance.machine else {
                unreachable!("reduction always yields a verifier");
            };
            let h = match vi.h {
                HValue::Exact(h) => h.to_string(),
                HValue::Huge => "huge".into(),
            };
            let details = vec![
                format!("tapes={} macrosteps={} bound={} h={h}", red.instance.n, vi.m, red.m),
                format!("prefix={}", red.instance.prefix),
            ];
            let mut r = match bounds.bounds()? {
                Some(b) => CommandReport::verdict(prenex::solve_prenex(&red.instance, b, &SolveOptions { cap, ..SolveOptions::default() })?),
                None => CommandReport::info("REDUCED"),
            };
            r.details = details;
            Ok(r)
        }
        Command::Reduce { which: Reduce::PrenexToTiling { input, bounds, output, solve } } => {
            let inst = read_json::<PrenexFile>(&input)?.to_instance()?;
            let b = bounds.bounds()?.unwrap_or(SolveBounds::Canonical);
            let red = tiling::reduce_prenex_to_tiling(&inst, b, cap)?;
            let sys = &red.system;
            let side = match red.side {
                GridSide::Canonical => "canonical".to_string(),
                GridSide::Override(s) => s.to_string(),
            };
            let details = vec![
                format!("tiles={} initial={} accepting={} H={} V={} M={}", sys.tile_count(), sys.initial.len(), sys.accepting.len(), sys.h.len(), sys.v.len(), sys.m.len()),
                format!("side={side} prefix={}", red.prefix),
            ];
            if let Some(out) = output {
                let file = TilingFile::from_system(sys, Some(red.prefix.to_string()));
                let text = serde_json::to_string(&file).expect("serialisable");
                std::fs::write(&out, text).map_err(|e| CliError::Format(format!("{out}: {e}")))?;
            }
            let mut r = if solve {
                let opts = TilingOptions { cap, ..TilingOptions::default() };
                CommandReport::verdict(tiling::solve_quantified_tiling(sys, red.prefix.as_slice(), red.side, &opts)?)
            } else {
                CommandReport::info("REDUCED")
            };
            r.details = details;
            Ok(r)
        }
        Command::CheckLemmas { range } => {
            let suites = arith::lemma_suite(range, cap);
            let mut details = Vec::new();
            for s in &suites {
                details.push(format!(
                    "lemma={} checked={} skipped={} failures={} {}",
                    s.name,
                    s.checked,
                    s.skipped,
                    s.failures,
                    if s.passed() { "PASS" } else { "FAIL" }
                ));
                details.extend(s.counterexamples.iter().map(|c| format!("  counterexample {c}")));
            }
            let ok = suites.iter().all(|s| s.passed());
            Ok(CommandReport {
                details,
                trace: None,
                verdict: if ok { "PASS" } else { "FAIL" }.into(),
                code: if ok { 0 } else { 1 },
            })
        }
        Command::GenDtm { seed, tapes, alphabet, extra_states } => {
            let chars: Vec<char> = alphabet.chars().collect();
            if chars.is_empty() || tapes == 0 {
                return Err(CliError::Usage("need a non-empty alphabet and at least one tape".into()));
            }
            let d = gen::random_dtm(&mut gen::rng(seed), tapes, &chars, extra_states, false);
            Ok(CommandReport::info(serde_json::to_string(&DtmFile::from_spec(&d)).expect("serialisable")))
        }
    }
}

fn build(v: &VerifierArgs, tapes: usize, cap: ResourceCap) -> Result<(AtmSpec, verifier::VerifierInstance), CliError> {
    let spec = load_atm(&v.atm)?;
    let w = parse_word(&spec.alphabet, &v.word)?;
    let vi = verifier::build_verifier(&spec, &w, &parse_poly(&v.f)?, &parse_poly(&v.g)?, v.k, tapes, v.h_override, cap)?;
    Ok((spec, vi))
}

fn simulate(input: &str, words: &str, budget: u64, trace: bool) -> Result<CommandReport, CliError> {
    let spec = read_json::<DtmFile>(input)?.to_spec()?;
    let mut tapes: Vec<Vec<Sym>> = if words.is_empty() {
        vec![]
    } else {
        words.split(',').map(|w| parse_word(&spec.alphabet, w)).collect::<Result<_, _>>()?
    };
    if tapes.len() > spec.tapes {
        return Err(CliError::Usage(format!("{} words for {} tapes", tapes.len(), spec.tapes)));
    }
    tapes.resize(spec.tapes, vec![]);
    let out = dtm::dtm_run(&spec, &tapes, budget, trace).map_err(|e| CliError::Format(e.to_string()))?;
    let state = |q: StateId| spec.states[q].clone();
    let mut r = CommandReport::verdict(out.verdict == Verdict::Accepted);
    r.verdict = match out.verdict {
        Verdict::Accepted => format!("ACCEPT steps={}", out.steps_used),
        Verdict::RejectedState => format!("REJECT steps={} reason=reject-state", out.steps_used),
        Verdict::BudgetExhausted => format!("REJECT steps={} reason=budget", out.steps_used),
    };
    r.trace = out.trace.map(|t| {
        t.iter()
            .enumerate()
            .map(|(i, &(q, tape, cell))| format!("step={i} state={} tape={tape} cell={cell}", state(q)))
            .collect()
    });
    Ok(r)
}
