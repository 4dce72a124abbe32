//! Macrostep interpreter for the verifier machine built from an ATM.
//!
//! Tape `i` (1-based, `i <= m`) is read only up to its encoded prefix; odd
//! macrosteps demand an existential hop and reject on anything else, even
//! macrosteps demand a universal hop and accept on anything else.

use crate::arith::{self, ArithError, Polynomial, ResourceCap};
use crate::atm::{atm_successors, AtmConfig, AtmSpec, StateKind};
use crate::codec::{decode_config, encode_config, fits, BarSym, EncodingAlphabet};
use crate::Sym;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use std::fmt;
use thiserror::Error;

/// Constant in the instrumented cost bound.
pub const COST_FACTOR: u64 = 8;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum VerifierError {
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("expected {expected} input words, got {got}")]
    ArityMismatch { expected: usize, got: usize },
}

/// Chunk width. `Huge` stands for a tower beyond the resource cap: no
/// stored word can reach a multiple of it, so every input is malformed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HValue {
    Exact(usize),
    Huge,
}

impl fmt::Display for HValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HValue::Exact(h) => write!(f, "{h}"),
            HValue::Huge => write!(f, "huge"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifierInstance {
    pub atm: AtmSpec,
    pub alph: EncodingAlphabet,
    pub w: Vec<Sym>,
    pub f: Polynomial,
    pub g: Polynomial,
    pub k: u32,
    pub n: usize,
    pub m: usize,
    pub h: HValue,
    pub h_overridden: bool,
    initial_chunk: Option<Vec<BarSym>>,
}

pub fn build_verifier(
    atm: &AtmSpec,
    w: &[Sym],
    f: &Polynomial,
    g: &Polynomial,
    k: u32,
    n: usize,
    h_override: Option<usize>,
    cap: ResourceCap,
) -> Result<VerifierInstance, VerifierError> {
    let bad = |m: String| Err(VerifierError::BadParameters(m));
    if w.is_empty() {
        return bad("input word must be non-empty".into());
    }
    if w.iter().any(|&a| a as usize >= atm.alphabet.len() || a == atm.blank) {
        return bad("input word must use non-blank symbols of the machine".into());
    }
    if k == 0 {
        return bad("k must be positive".into());
    }
    let len = w.len() as u64;
    let Some(fw) = f.eval_u64(len).filter(|&v| v >= 1) else {
        return bad("f(|w|) must be a positive machine-sized integer".into());
    };
    let Some(m) = g.eval_u64(len).and_then(|v| usize::try_from(v).ok()) else {
        return bad("g(|w|) too large".into());
    };
    if m == 0 {
        return bad("g(|w|) must be positive".into());
    }
    if n < m + 3 {
        return bad(format!("n = {n} violates n >= m + 3 with m = {m}"));
    }
    let h = match h_override {
        Some(0) | Some(1) => return bad("h override must be at least 2".into()),
        Some(h) => HValue::Exact(h),
        None => match arith::tetra(k, fw, cap) {
            Ok(v) => match v.to_usize().filter(|h| h.checked_mul(*h).is_some()) {
                Some(h) => HValue::Exact(h),
                None => HValue::Huge,
            },
            Err(ArithError::CapExceeded { .. }) => HValue::Huge,
            Err(e) => return bad(e.to_string()),
        },
    };
    if let (HValue::Exact(h), None) = (h, h_override) {
        // the width agrees with the klog-based threshold test
        let hh = BigUint::from(h) * BigUint::from(h);
        debug_assert!(arith::at_least_h_squared(&hh, k, f, len));
        debug_assert!(!arith::at_least_h_squared(&(hh - 1u32), k, f, len));
    }
    let alph = EncodingAlphabet::for_atm(atm).map_err(|e| VerifierError::BadParameters(e.to_string()))?;
    let initial_chunk = match h {
        HValue::Exact(h) => encode_config(&alph, &AtmConfig::initial(atm, w), h).ok(),
        HValue::Huge => None,
    };
    Ok(VerifierInstance {
        atm: atm.clone(),
        alph,
        w: w.to_vec(),
        f: f.clone(),
        g: g.clone(),
        k,
        n,
        m,
        h,
        h_overridden: h_override.is_some(),
        initial_chunk,
    })
}

impl VerifierInstance {
    pub fn h_exact(&self) -> Option<usize> {
        match self.h {
            HValue::Exact(h) => Some(h),
            HValue::Huge => None,
        }
    }

    /// Instrumented bound on total reads for the given input lengths.
    pub fn cost_bound(&self, lengths: &[usize]) -> u64 {
        let Some(h) = self.h_exact() else {
            return u64::MAX;
        };
        let (h, hh) = (h as u64, (h as u64) * (h as u64));
        let tapes: u64 = lengths
            .iter()
            .take(self.m)
            .map(|&l| (l as u64).min(hh))
            .sum();
        COST_FACTOR * self.m as u64 * (hh + h) + COST_FACTOR * tapes
    }

    /// Bound independent of the inputs: every tape read to h².
    pub fn worst_cost(&self) -> u64 {
        let Some(h) = self.h_exact() else {
            return u64::MAX;
        };
        self.cost_bound(&vec![h * h; self.m])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepReason {
    BadChunkLength,
    ChunkNotInC,
    NotInitial,
    NotASuccessor,
    WrongKindInside,
    WrongKindLast,
    AcceptState,
    RejectState,
    LastMacrostep,
}

impl StepReason {
    pub fn name(self) -> &'static str {
        match self {
            StepReason::BadChunkLength => "BadChunkLength",
            StepReason::ChunkNotInC => "ChunkNotInC",
            StepReason::NotInitial => "NotInitial",
            StepReason::NotASuccessor => "NotASuccessor",
            StepReason::WrongKindInside => "WrongKindInside",
            StepReason::WrongKindLast => "WrongKindLast",
            StepReason::AcceptState => "AcceptState",
            StepReason::RejectState => "RejectState",
            StepReason::LastMacrostep => "LastMacrostep",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StepOutcome {
    Carry(AtmConfig),
    Accept(StepReason),
    Reject(StepReason),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MacrostepRecord {
    pub index: usize,
    pub prefix_len: usize,
    pub tape_reads: u64,
    pub carried_reads: u64,
    pub outcome: StepOutcome,
}

impl MacrostepRecord {
    pub fn total_reads(&self) -> u64 {
        self.tape_reads + self.carried_reads
    }
}

impl fmt::Display for MacrostepRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (verdict, reason) = match &self.outcome {
            StepOutcome::Carry(_) => ("carry", None),
            StepOutcome::Accept(r) => ("accept", Some(r)),
            StepOutcome::Reject(r) => ("reject", Some(r)),
        };
        write!(
            f,
            "macrostep={} verdict={} reads={}",
            self.index,
            verdict,
            self.total_reads()
        )?;
        if let Some(r) = reason {
            write!(f, " reason={}", r.name())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerifierVerdict {
    Accept,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VerifierTrace {
    pub h: HValue,
    pub h_overridden: bool,
    pub records: Vec<MacrostepRecord>,
}

impl VerifierTrace {
    pub fn total_reads(&self) -> u64 {
        self.records.iter().map(|r| r.total_reads()).sum()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        if self.h_overridden {
            s.push_str(&format!("h={} (override)\n", self.h));
        }
        for r in &self.records {
            s.push_str(&r.to_string());
            s.push('\n');
        }
        s
    }
}

/// Length of the encoded prefix and the reads spent finding it. Cells past
/// the stored word hold the trail (the machine's blank).
fn scan(vi: &VerifierInstance, input: &[BarSym]) -> (usize, u64) {
    let trail = vi.alph.trail();
    let limit = match vi.h {
        HValue::Exact(h) => h * h,
        HValue::Huge => usize::MAX,
    };
    let mut i = 0;
    while i < limit {
        if input.get(i).copied().unwrap_or(trail) == trail {
            return (i, i as u64 + 1);
        }
        i += 1;
    }
    (i, i as u64)
}

/// One macrostep on tape `i` (1-based). `carried` is the configuration left
/// by macrostep `i - 1` and is ignored for `i = 1`.
pub fn macrostep(vi: &VerifierInstance, i: usize, carried: Option<&AtmConfig>, input: &[BarSym]) -> MacrostepRecord {
    let (prefix_len, scan_reads) = scan(vi, input);
    let mut rec = MacrostepRecord {
        index: i,
        prefix_len,
        tape_reads: scan_reads,
        carried_reads: 0,
        outcome: StepOutcome::Reject(StepReason::BadChunkLength),
    };
    let existential = i % 2 == 1;
    let fail = |r: StepReason| {
        if existential {
            StepOutcome::Reject(r)
        } else {
            StepOutcome::Accept(r)
        }
    };
    let h = match vi.h {
        HValue::Exact(h) if prefix_len > 0 && prefix_len % h == 0 => h,
        _ => {
            rec.outcome = fail(StepReason::BadChunkLength);
            return rec;
        }
    };
    let (inside_bad, last_bad) = if existential {
        (StateKind::Universal, StateKind::Existential)
    } else {
        (StateKind::Existential, StateKind::Universal)
    };
    let prefix = &input[..prefix_len];
    let d = prefix_len / h;
    let mut prev: Option<AtmConfig> = None;
    for j in 0..d {
        let chunk = &prefix[j * h..(j + 1) * h];
        rec.tape_reads += h as u64;
        let Ok(c) = decode_config(&vi.alph, chunk) else {
            rec.outcome = fail(StepReason::ChunkNotInC);
            return rec;
        };
        let kind = vi.atm.kind(c.state);
        if j == 0 {
            if i == 1 {
                rec.tape_reads += h as u64;
                if vi.initial_chunk.as_deref() != Some(chunk) {
                    rec.outcome = fail(StepReason::NotInitial);
                    return rec;
                }
            } else {
                rec.tape_reads += h as u64;
                rec.carried_reads += h as u64;
                let ok = carried.is_some_and(|p| atm_successors(&vi.atm, p).contains(&c));
                if !ok {
                    rec.outcome = fail(StepReason::NotASuccessor);
                    return rec;
                }
            }
        } else {
            rec.tape_reads += 2 * h as u64;
            let p = prev.as_ref().expect("previous chunk");
            if !atm_successors(&vi.atm, p).contains(&c) {
                rec.outcome = fail(StepReason::NotASuccessor);
                return rec;
            }
        }
        if j + 1 < d && kind == inside_bad {
            rec.outcome = fail(StepReason::WrongKindInside);
            return rec;
        }
        if j + 1 == d && kind == last_bad {
            rec.outcome = fail(StepReason::WrongKindLast);
            return rec;
        }
        prev = Some(c);
    }
    let last = prev.expect("at least one chunk");
    rec.outcome = match vi.atm.kind(last.state) {
        StateKind::Accept => StepOutcome::Accept(StepReason::AcceptState),
        StateKind::Reject => StepOutcome::Reject(StepReason::RejectState),
        _ if i == vi.m => StepOutcome::Reject(StepReason::LastMacrostep),
        _ => StepOutcome::Carry(last),
    };
    rec
}

pub fn run_verifier(
    vi: &VerifierInstance,
    inputs: &[Vec<BarSym>],
) -> Result<(VerifierVerdict, VerifierTrace), VerifierError> {
    if inputs.len() != vi.n {
        return Err(VerifierError::ArityMismatch {
            expected: vi.n,
            got: inputs.len(),
        });
    }
    let mut trace = VerifierTrace {
        h: vi.h,
        h_overridden: vi.h_overridden,
        records: Vec::new(),
    };
    let mut carried: Option<AtmConfig> = None;
    for i in 1..=vi.m {
        let rec = macrostep(vi, i, carried.as_ref(), &inputs[i - 1]);
        let outcome = rec.outcome.clone();
        trace.records.push(rec);
        match outcome {
            StepOutcome::Carry(c) => carried = Some(c),
            StepOutcome::Accept(_) => return Ok((VerifierVerdict::Accept, trace)),
            StepOutcome::Reject(_) => return Ok((VerifierVerdict::Reject, trace)),
        }
    }
    unreachable!("the last macrostep never carries")
}

/// Representative tape words for macrostep `i`, padded with trails to
/// `len`: the all-trail word plus encodings of every Δ-path of 1..=h
/// encodable configurations that the macrostep could accept as its hop
/// prefix. Every other word of length `len` is malformed for this
/// macrostep and behaves like the all-trail word except for its read count.
pub fn representatives(vi: &VerifierInstance, i: usize, carried: Option<&AtmConfig>, len: usize) -> Vec<Vec<BarSym>> {
    let trail = vi.alph.trail();
    let mut out = vec![vec![trail; len]];
    let Some(h) = vi.h_exact() else {
        return out;
    };
    let max_chunks = (len.min(h * h)) / h;
    let starts: Vec<AtmConfig> = if i == 1 {
        vec![AtmConfig::initial(&vi.atm, &vi.w)]
    } else {
        match carried {
            Some(c) => atm_successors(&vi.atm, c),
            None => vec![],
        }
    };
    let mut stack: Vec<(Vec<BarSym>, AtmConfig, usize)> = Vec::new();
    for s in starts {
        if let Ok(enc) = encode_config(&vi.alph, &s, h) {
            stack.push((enc, s, 1));
        }
    }
    while let Some((word, c, d)) = stack.pop() {
        let mut padded = word.clone();
        padded.resize(len, trail);
        out.push(padded);
        if d == max_chunks {
            continue;
        }
        for s in atm_successors(&vi.atm, &c) {
            if fits(&s, h) {
                let mut next = word.clone();
                next.extend(encode_config(&vi.alph, &s, h).expect("fits"));
                stack.push((next, s, d + 1));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}
