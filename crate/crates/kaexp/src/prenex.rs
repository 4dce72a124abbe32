//! Quantified multi-tape acceptance, alternation counting and the
//! reductions from alternating machines.

use crate::arith::{self, ArithError, Polynomial, ResourceCap};
use crate::atm::{AtmConfig, AtmSpec};
use crate::codec::BarSym;
use crate::dtm::{dtm_run, DtmError, DtmSpec, Verdict};
use crate::verifier::{
    build_verifier, macrostep, representatives, run_verifier, StepOutcome, VerifierError, VerifierInstance,
    VerifierVerdict,
};
use crate::Sym;
use num_bigint::BigUint;
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PrenexError {
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Dtm(#[from] DtmError),
    #[error(transparent)]
    Verifier(#[from] VerifierError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn flip(self) -> Self {
        match self {
            Quantifier::Exists => Quantifier::Forall,
            Quantifier::Forall => Quantifier::Exists,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuantifierPrefix(Vec<Quantifier>);

impl QuantifierPrefix {
    pub fn new(qs: Vec<Quantifier>) -> Result<Self, PrenexError> {
        match qs.first() {
            Some(Quantifier::Exists) => Ok(QuantifierPrefix(qs)),
            Some(_) => Err(PrenexError::BadParameters("first quantifier must be E".into())),
            None => Err(PrenexError::BadParameters("empty prefix".into())),
        }
    }

    /// (∃, ∀, ∃, …) of length `n`.
    pub fn alternating(n: usize) -> Result<Self, PrenexError> {
        QuantifierPrefix::new(
            (0..n)
                .map(|i| if i % 2 == 0 { Quantifier::Exists } else { Quantifier::Forall })
                .collect(),
        )
    }

    /// Strict alternation on the first `j` positions, then constant.
    pub fn bounded(n: usize, j: usize) -> Result<Self, PrenexError> {
        if j == 0 || j > n {
            return Err(PrenexError::BadParameters(format!("need 1 <= j <= n, got j = {j}, n = {n}")));
        }
        let last = if j % 2 == 1 { Quantifier::Exists } else { Quantifier::Forall };
        QuantifierPrefix::new(
            (0..n)
                .map(|i| match i {
                    i if i >= j => last,
                    i if i % 2 == 0 => Quantifier::Exists,
                    _ => Quantifier::Forall,
                })
                .collect(),
        )
    }

    pub fn as_slice(&self) -> &[Quantifier] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromStr for QuantifierPrefix {
    type Err = PrenexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let qs = s
            .chars()
            .map(|c| match c {
                'E' => Ok(Quantifier::Exists),
                'A' => Ok(Quantifier::Forall),
                _ => Err(PrenexError::BadParameters(format!("bad quantifier {c:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        QuantifierPrefix::new(qs)
    }
}

impl fmt::Display for QuantifierPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in &self.0 {
            f.write_str(match q {
                Quantifier::Exists => "E",
                Quantifier::Forall => "A",
            })?;
        }
        Ok(())
    }
}

pub fn altern(qs: &[Quantifier]) -> usize {
    1 + qs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// The machine of an instance: an explicit table, or the verifier
/// interpreter (time measured as its instrumented read count).
#[derive(Debug, Clone)]
pub enum Machine {
    Table(DtmSpec),
    Verifier(VerifierInstance),
}

impl Machine {
    pub fn tapes(&self) -> usize {
        match self {
            Machine::Table(d) => d.tapes,
            Machine::Verifier(v) => v.n,
        }
    }

    pub fn symbol_count(&self) -> usize {
        match self {
            Machine::Table(d) => d.symbol_count(),
            Machine::Verifier(v) => v.alph.size(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PrenexInstance {
    pub n: usize,
    pub prefix: QuantifierPrefix,
    pub machine: Machine,
    pub k: u32,
}

impl PrenexInstance {
    pub fn new(prefix: QuantifierPrefix, machine: Machine, k: u32) -> Result<Self, PrenexError> {
        let n = prefix.len();
        if machine.tapes() != n {
            return Err(PrenexError::BadParameters(format!(
                "prefix has {n} quantifiers, machine has {} tapes",
                machine.tapes()
            )));
        }
        if k == 0 {
            return Err(PrenexError::BadParameters("k must be positive".into()));
        }
        Ok(PrenexInstance { n, prefix, machine, k })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveBounds {
    Canonical,
    Override { word_length: usize, time: u64 },
}

impl SolveBounds {
    /// Word length and time budget; canonical bounds are tetra(k, n).
    pub fn resolve(&self, k: u32, n: usize, cap: ResourceCap) -> Result<(usize, u64), PrenexError> {
        match *self {
            SolveBounds::Override { word_length, time } => Ok((word_length, time)),
            SolveBounds::Canonical => {
                let v = arith::tetra_usize(k, n as u64, cap)?;
                Ok((v, v as u64))
            }
        }
    }
}

/// Word domain per tape for verifier machines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// Every word of the given length.
    Full,
    /// One word per distinct encoded prefix; exact for every budget.
    Prefixes,
    /// The trail word plus padded Δ-path encodings; exact when the time
    /// budget is at least the instrumented cost bound.
    Quotient,
    /// `Quotient` when exact, otherwise `Prefixes`.
    Auto,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub cap: ResourceCap,
    /// largest per-tape domain the solver will enumerate
    pub max_branching: u64,
    pub parallel: bool,
    pub domain: Domain,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            cap: ResourceCap::default(),
            max_branching: 1 << 24,
            parallel: true,
            domain: Domain::Auto,
        }
    }
}

pub fn all_words(alphabet: usize, len: usize, limit: u64) -> Result<Vec<Vec<u8>>, PrenexError> {
    let count = (alphabet as u64).checked_pow(len as u32).filter(|&c| c <= limit);
    let Some(count) = count else {
        return Err(PrenexError::ResourceLimit(format!(
            "{alphabet}^{len} words per tape exceeds the limit {limit}"
        )));
    };
    let mut out = Vec::with_capacity(count as usize);
    let mut w = vec![0u8; len];
    loop {
        out.push(w.clone());
        let mut i = len;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            w[i] += 1;
            if (w[i] as usize) < alphabet {
                break;
            }
            w[i] = 0;
        }
    }
}

fn quantify<I, F>(q: Quantifier, items: I, parallel: bool, f: F) -> bool
where
    I: IntoParallelIterator + IntoIterator<Item = <I as IntoParallelIterator>::Item>,
    F: Fn(<I as IntoParallelIterator>::Item) -> bool + Sync + Send,
{
    match (q, parallel) {
        (Quantifier::Exists, true) => items.into_par_iter().any(f),
        (Quantifier::Forall, true) => items.into_par_iter().all(f),
        (Quantifier::Exists, false) => items.into_iter().any(f),
        (Quantifier::Forall, false) => items.into_iter().all(f),
    }
}

pub fn solve_prenex(inst: &PrenexInstance, bounds: SolveBounds, opts: &SolveOptions) -> Result<bool, PrenexError> {
    solve_with_prefix(&inst.machine, inst.prefix.as_slice(), inst.k, bounds, opts)
}

/// Like `solve_prenex` but accepts any quantifier sequence.
pub fn solve_with_prefix(
    machine: &Machine,
    qs: &[Quantifier],
    k: u32,
    bounds: SolveBounds,
    opts: &SolveOptions,
) -> Result<bool, PrenexError> {
    if qs.len() != machine.tapes() {
        return Err(PrenexError::BadParameters("prefix length differs from tape count".into()));
    }
    let (len, t) = bounds.resolve(k, qs.len(), opts.cap)?;
    match machine {
        Machine::Table(d) => {
            let words = all_words(d.symbol_count(), len, opts.max_branching)?;
            let mut tapes = Vec::with_capacity(qs.len());
            table_eval(d, qs, &words, t, opts.parallel, &mut tapes)
        }
        Machine::Verifier(vi) => verifier_solve(vi, qs, len, t, opts),
    }
}

fn table_eval(
    d: &DtmSpec,
    qs: &[Quantifier],
    words: &[Vec<u8>],
    t: u64,
    parallel: bool,
    tapes: &mut Vec<Vec<Sym>>,
) -> Result<bool, PrenexError> {
    let i = tapes.len();
    if i == qs.len() {
        return Ok(dtm_run(d, tapes, t, false)?.verdict == Verdict::Accepted);
    }
    let branch = |w: &Vec<u8>| {
        let mut local = tapes.clone();
        local.push(w.clone());
        table_eval(d, qs, words, t, false, &mut local).expect("tape count checked")
    };
    Ok(if parallel && i == 0 {
        quantify(qs[i], words.par_iter().collect::<Vec<_>>(), true, |w| branch(w))
    } else {
        match qs[i] {
            Quantifier::Exists => words.iter().any(branch),
            Quantifier::Forall => words.iter().all(branch),
        }
    })
}

/// Words that agree on their encoded prefix drive the verifier through
/// identical steps, so one word per prefix suffices.
pub fn prefix_domain(trail: BarSym, alphabet: usize, len: usize, max_prefix: usize, limit: u64) -> Result<Vec<Vec<BarSym>>, PrenexError> {
    let count = prefix_count(alphabet, len, max_prefix);
    if count > limit {
        return Err(PrenexError::ResourceLimit(format!(
            "{count} distinct prefixes per tape exceeds the limit {limit}"
        )));
    }
    let syms: Vec<BarSym> = (0..alphabet as BarSym).filter(|&x| x != trail).collect();
    let mut out = Vec::with_capacity(count as usize);
    let mut buf = vec![trail; len];
    walk_prefixes(&mut buf, 0, len.min(max_prefix), &syms, trail, true, &mut |w| {
        out.push(w.to_vec());
        false
    });
    Ok(out)
}

fn verifier_solve(vi: &VerifierInstance, qs: &[Quantifier], len: usize, t: u64, opts: &SolveOptions) -> Result<bool, PrenexError> {
    let m = vi.m;
    let domain = match opts.domain {
        Domain::Auto if t >= vi.worst_cost() => Domain::Quotient,
        Domain::Auto => Domain::Prefixes,
        d => d,
    };
    let fixed: Option<Vec<Vec<BarSym>>> = match domain {
        Domain::Full => Some(all_words(vi.alph.size(), len, opts.max_branching)?),
        Domain::Prefixes => {
            let count = prefix_count(vi.alph.size(), len, prefix_cap(vi));
            if count > opts.max_branching {
                return Err(PrenexError::ResourceLimit(format!(
                    "{count} distinct prefixes per tape exceeds the limit {}",
                    opts.max_branching
                )));
            }
            None
        }
        _ => None,
    };
    let ctx = VCtx {
        vi,
        qs: &qs[..m],
        len,
        t,
        domain,
        fixed: fixed.as_deref(),
        parallel: opts.parallel,
    };
    Ok(ctx.eval(1, None, 0))
}

fn prefix_cap(vi: &VerifierInstance) -> usize {
    vi.h_exact().map_or(usize::MAX, |h| h * h)
}

fn prefix_count(alphabet: usize, len: usize, max_prefix: usize) -> u64 {
    let non_trail = (alphabet - 1) as u64;
    let mut count: u64 = 0;
    let mut p: u64 = 1;
    for _ in 0..=len.min(max_prefix) {
        count = count.saturating_add(p);
        p = p.saturating_mul(non_trail);
    }
    count
}

/// Depth-first walk over trail-padded words with distinct encoded
/// prefixes, stopping as soon as `f` returns `stop`. Returns whether it
/// stopped.
pub fn walk_prefixes(
    buf: &mut [BarSym],
    pos: usize,
    top: usize,
    syms: &[BarSym],
    trail: BarSym,
    stop: bool,
    f: &mut dyn FnMut(&[BarSym]) -> bool,
) -> bool {
    if f(buf) == stop {
        return true;
    }
    if pos < top {
        for &x in syms {
            buf[pos] = x;
            let hit = walk_prefixes(buf, pos + 1, top, syms, trail, stop, f);
            buf[pos] = trail;
            if hit {
                return true;
            }
        }
    }
    false
}

struct VCtx<'a> {
    vi: &'a VerifierInstance,
    qs: &'a [Quantifier],
    len: usize,
    t: u64,
    domain: Domain,
    fixed: Option<&'a [Vec<BarSym>]>,
    parallel: bool,
}

impl VCtx<'_> {
    fn branch(&self, i: usize, carried: Option<&AtmConfig>, reads: u64, w: &[BarSym]) -> bool {
        let rec = macrostep(self.vi, i, carried, w);
        let reads = reads + rec.total_reads();
        match rec.outcome {
            StepOutcome::Accept(_) => reads <= self.t,
            StepOutcome::Reject(_) => false,
            StepOutcome::Carry(c) => reads <= self.t && self.eval(i + 1, Some(&c), reads),
        }
    }

    fn eval(&self, i: usize, carried: Option<&AtmConfig>, reads: u64) -> bool {
        let q = self.qs[i - 1];
        let par = self.parallel && i == 1;
        if self.domain == Domain::Prefixes {
            return self.eval_prefixes(q, i, carried, reads, par);
        }
        let owned;
        let words: &[Vec<BarSym>] = match self.fixed {
            Some(f) => f,
            None => {
                owned = representatives(self.vi, i, carried, self.len);
                &owned
            }
        };
        let branch = |w: &Vec<BarSym>| self.branch(i, carried, reads, w);
        if par {
            quantify(q, words.par_iter().collect::<Vec<_>>(), true, |w| branch(w))
        } else {
            match q {
                Quantifier::Exists => words.iter().any(branch),
                Quantifier::Forall => words.iter().all(branch),
            }
        }
    }

    fn eval_prefixes(&self, q: Quantifier, i: usize, carried: Option<&AtmConfig>, reads: u64, par: bool) -> bool {
        let trail = self.vi.alph.trail();
        let syms: Vec<BarSym> = (0..self.vi.alph.size() as BarSym).filter(|&x| x != trail).collect();
        let top = self.len.min(prefix_cap(self.vi));
        let stop = q == Quantifier::Exists;
        let mut f = |w: &[BarSym]| self.branch(i, carried, reads, w);
        let mut buf = vec![trail; self.len];
        if !par || top == 0 {
            return walk_prefixes(&mut buf, 0, top, &syms, trail, stop, &mut f) == stop;
        }
        // the empty prefix, then one subtree per first symbol
        if f(&buf) == stop {
            return stop;
        }
        let hit = syms.par_iter().any(|&x| {
            let mut buf = vec![trail; self.len];
            buf[0] = x;
            let mut f = |w: &[BarSym]| self.branch(i, carried, reads, w);
            walk_prefixes(&mut buf, 1, top, &syms, trail, stop, &mut f)
        });
        hit == stop
    }
}

/// Exhaustive evaluation: every tuple of words on every tape, no pruning.
pub fn solve_naive(machine: &Machine, qs: &[Quantifier], k: u32, bounds: SolveBounds, opts: &SolveOptions) -> Result<bool, PrenexError> {
    if qs.len() != machine.tapes() {
        return Err(PrenexError::BadParameters("prefix length differs from tape count".into()));
    }
    let (len, t) = bounds.resolve(k, qs.len(), opts.cap)?;
    let words = all_words(machine.symbol_count(), len, opts.max_branching)?;
    let leaves = (words.len() as u64).checked_pow(qs.len() as u32);
    if leaves.map_or(true, |l| l > 1 << 26) {
        return Err(PrenexError::ResourceLimit("naive enumeration too large".into()));
    }
    let accepts = |tapes: &[Vec<u8>]| -> bool {
        match machine {
            Machine::Table(d) => dtm_run(d, tapes, t, false).map(|r| r.verdict == Verdict::Accepted).unwrap_or(false),
            Machine::Verifier(vi) => run_verifier(vi, tapes)
                .map(|(v, tr)| v == VerifierVerdict::Accept && tr.total_reads() <= t)
                .unwrap_or(false),
        }
    };
    fn rec(qs: &[Quantifier], words: &[Vec<u8>], tapes: &mut Vec<Vec<u8>>, leaf: &dyn Fn(&[Vec<u8>]) -> bool) -> bool {
        let i = tapes.len();
        if i == qs.len() {
            return leaf(tapes);
        }
        let mut vals = Vec::with_capacity(words.len());
        for w in words {
            tapes.push(w.clone());
            vals.push(rec(qs, words, tapes, leaf));
            tapes.pop();
        }
        match qs[i] {
            Quantifier::Exists => vals.iter().any(|&v| v),
            Quantifier::Forall => vals.iter().all(|&v| v),
        }
    }
    Ok(rec(qs, &words, &mut Vec::new(), &accepts))
}

#[derive(Debug, Clone)]
pub struct AtmReduction {
    pub instance: PrenexInstance,
    /// max(f(|w|), g(|w|)) + 3
    pub m: usize,
}

fn check_runtime_poly(p: &Polynomial) -> Result<(), PrenexError> {
    if !p.is_shaped() {
        return Err(PrenexError::BadParameters("runtime polynomial must have the form a*x^d + b".into()));
    }
    Ok(())
}

pub fn reduce_atm_to_prenex(
    atm: &AtmSpec,
    w: &[Sym],
    f: &Polynomial,
    g: &Polynomial,
    k: u32,
    p: &Polynomial,
    h_override: Option<usize>,
    cap: ResourceCap,
) -> Result<AtmReduction, PrenexError> {
    let (m, n) = reduction_sizes(w, f, g, p)?;
    let vi = build_verifier(atm, w, f, g, k, n, h_override, cap)?;
    let instance = PrenexInstance::new(QuantifierPrefix::alternating(n)?, Machine::Verifier(vi), k)?;
    Ok(AtmReduction { instance, m })
}

pub fn reduce_atm_to_prenex_bounded(
    atm: &AtmSpec,
    w: &[Sym],
    f: &Polynomial,
    g: &Polynomial,
    k: u32,
    p: &Polynomial,
    j: usize,
    h_override: Option<usize>,
    cap: ResourceCap,
) -> Result<AtmReduction, PrenexError> {
    let (m, n) = reduction_sizes(w, f, g, p)?;
    let vi = build_verifier(atm, w, f, g, k, n, h_override, cap)?;
    let instance = PrenexInstance::new(QuantifierPrefix::bounded(n, j)?, Machine::Verifier(vi), k)?;
    Ok(AtmReduction { instance, m })
}

fn reduction_sizes(w: &[Sym], f: &Polynomial, g: &Polynomial, p: &Polynomial) -> Result<(usize, usize), PrenexError> {
    check_runtime_poly(p)?;
    let len = w.len() as u64;
    let too_big = || PrenexError::BadParameters("parameters too large".into());
    let fw = f.eval_u64(len).ok_or_else(too_big)?;
    let gw = g.eval_u64(len).ok_or_else(too_big)?;
    if fw < len {
        return Err(PrenexError::BadParameters("f(|w|) must be at least |w|".into()));
    }
    let m = fw.max(gw).checked_add(3).ok_or_else(too_big)?;
    let n = p.eval_u64(2 * m).ok_or_else(too_big)?;
    Ok((usize::try_from(m).map_err(|_| too_big())?, usize::try_from(n).map_err(|_| too_big())?))
}

/// The four quantities tetra(k, n) ≥ p(tetra(k, 2f)) ≥ p(tetra(k, f)²)
/// ≥ p(h²) from the runtime argument, evaluated exactly.
pub fn inequality_chain(k: u32, n: u64, fw: u64, p: &Polynomial, h: &BigUint, cap: ResourceCap) -> Result<[BigUint; 4], PrenexError> {
    let lhs = arith::tetra(k, n, cap)?;
    let second = p.eval(&arith::tetra(k, 2 * fw, cap)?);
    let t = arith::tetra(k, fw, cap)?;
    let third = p.eval(&(&t * &t));
    let fourth = p.eval(&(h * h));
    Ok([lhs, second, third, fourth])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atm::toy_atm;
    use crate::dtm::{Dir, DtmBuilder};
    use proptest::prelude::*;

    // Σ = {_, 0, 1}; states q0, acc, rej, ...
    fn first_is_one() -> DtmSpec {
        let mut b = DtmBuilder::new(2, &['_', '0', '1'], '_', &["q0", "acc", "rej"]);
        b.ordinary(0, 2, 1, 2, Dir::Right);
        b.build().unwrap()
    }

    // compares cell 0 of both tapes
    fn tapes_equal() -> DtmSpec {
        let mut b = DtmBuilder::new(2, &['_', '0', '1'], '_', &["q0", "acc", "rej", "s0", "s1", "s2"]);
        for a in 0..3u8 {
            b.jump(0, a, 3 + a as usize, 2);
            for x in 0..3u8 {
                let next = if a == x { 1 } else { 2 };
                b.jump(3 + a as usize, x, next, 1);
            }
        }
        b.build().unwrap()
    }

    fn solve(d: DtmSpec, p: &str, l: usize, t: u64) -> bool {
        let inst = PrenexInstance::new(p.parse().unwrap(), Machine::Table(d), 1).unwrap();
        solve_prenex(&inst, SolveBounds::Override { word_length: l, time: t }, &SolveOptions::default()).unwrap()
    }

    fn naive(d: DtmSpec, p: &str, l: usize, t: u64) -> bool {
        let q: QuantifierPrefix = p.parse().unwrap();
        solve_naive(&Machine::Table(d), q.as_slice(), 1, SolveBounds::Override { word_length: l, time: t }, &SolveOptions::default()).unwrap()
    }

    #[test]
    fn altern_examples() {
        use Quantifier::*;
        assert_eq!(altern(&[Exists]), 1);
        assert_eq!(altern(&[Exists, Forall]), 2);
        assert_eq!(altern(&[Exists, Exists, Forall, Exists]), 3);
    }

    #[test]
    fn prefix_parsing() {
        assert_eq!("EAAE".parse::<QuantifierPrefix>().unwrap().to_string(), "EAAE");
        assert!("AE".parse::<QuantifierPrefix>().is_err());
        assert!("".parse::<QuantifierPrefix>().is_err());
        assert!("EX".parse::<QuantifierPrefix>().is_err());
    }

    #[test]
    fn bounded_prefix_examples() {
        assert_eq!(QuantifierPrefix::bounded(6, 2).unwrap().to_string(), "EAAAAA");
        assert_eq!(QuantifierPrefix::bounded(4, 1).unwrap().to_string(), "EEEE");
        for j in 1..=5 {
            for n in j + 1..=8 {
                let p = QuantifierPrefix::bounded(n, j).unwrap();
                assert_eq!(altern(p.as_slice()), j);
            }
        }
    }

    #[test]
    fn solve_examples() {
        assert!(solve(first_is_one(), "EA", 1, 2));
        assert!(naive(first_is_one(), "EA", 1, 2));
        assert!(!solve(tapes_equal(), "EA", 1, 4));
        assert!(!naive(tapes_equal(), "EA", 1, 4));
        assert!(solve(tapes_equal(), "EE", 1, 4));
        assert!(naive(tapes_equal(), "EE", 1, 4));
    }

    #[test]
    fn canonical_bounds_guarded() {
        let inst = PrenexInstance::new("EA".parse().unwrap(), Machine::Table(first_is_one()), 4).unwrap();
        let r = solve_prenex(&inst, SolveBounds::Canonical, &SolveOptions::default());
        assert!(matches!(r, Err(PrenexError::Arith(ArithError::CapExceeded { .. }))));
        let inst = PrenexInstance::new("EA".parse().unwrap(), Machine::Table(first_is_one()), 2).unwrap();
        let r = solve_prenex(&inst, SolveBounds::Canonical, &SolveOptions::default());
        assert!(matches!(r, Err(PrenexError::ResourceLimit(_))));
    }

    #[test]
    fn reduction_sizes_example() {
        let s = toy_atm();
        let r = reduce_atm_to_prenex(
            &s,
            &[0],
            &Polynomial::identity(),
            &Polynomial::constant(2),
            1,
            &Polynomial::shaped(1, 1, 1).unwrap(),
            None,
            ResourceCap::default(),
        )
        .unwrap();
        assert_eq!((r.m, r.instance.n), (5, 11));
        assert_eq!(r.instance.prefix.to_string(), "EAEAEAEAEAE");
        let chain = inequality_chain(1, 11, 1, &Polynomial::shaped(1, 1, 1).unwrap(), &BigUint::from(2u32), ResourceCap::default()).unwrap();
        assert!(chain.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(chain[0], BigUint::from(2048u32));
        assert!(reduce_atm_to_prenex(&s, &[0], &Polynomial::identity(), &Polynomial::constant(2), 1, &Polynomial::new(vec![1, 1, 1]).unwrap(), None, ResourceCap::default()).is_err());
    }

    #[test]
    fn prefix_domain_counts() {
        let d = prefix_domain(2, 3, 3, 9, 1000).unwrap();
        assert_eq!(d.len(), 1 + 2 + 4 + 8);
        assert!(d.iter().all(|w| w.len() == 3));
        let d = prefix_domain(2, 3, 3, 2, 1000).unwrap();
        assert_eq!(d.len(), 1 + 2 + 4);
    }

    #[test]
    fn verifier_domains_agree_with_naive() {
        // one word per tape of length 1 keeps the naive search small: 7^5 leaves
        let s = toy_atm();
        let vi = build_verifier(&s, &[0], &Polynomial::identity(), &Polynomial::constant(2), 1, 5, None, ResourceCap::default()).unwrap();
        let m = Machine::Verifier(vi);
        let qs = QuantifierPrefix::alternating(5).unwrap();
        for t in [0, 3, 100] {
            let b = SolveBounds::Override { word_length: 1, time: t };
            let expect = solve_naive(&m, qs.as_slice(), 1, b, &SolveOptions::default()).unwrap();
            for domain in [Domain::Full, Domain::Prefixes, Domain::Auto] {
                let o = SolveOptions { domain, ..Default::default() };
                assert_eq!(solve_with_prefix(&m, qs.as_slice(), 1, b, &o).unwrap(), expect);
            }
        }
    }

    fn random_dtm(seed: &[u8], right_only: bool) -> DtmSpec {
        let mut b = DtmBuilder::new(2, &['_', '0', '1'], '_', &["q0", "acc", "rej", "s", "u"]);
        let mut it = seed.iter().copied().cycle();
        for q in [0usize, 3, 4] {
            for a in 0..3u8 {
                let x = it.next().unwrap();
                let next = (x as usize) % 5;
                if x & 0x80 != 0 {
                    b.jump(q, a, next, 1 + (x as usize >> 3) % 2);
                } else {
                    let dir = if x & 0x40 != 0 && !right_only { Dir::Left } else { Dir::Right };
                    b.ordinary(q, a, next, (x >> 4) % 3, dir);
                }
            }
        }
        b.build().unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn pruned_matches_naive(seed in prop::collection::vec(any::<u8>(), 9), l in 0usize..3, t in 0u64..7, p in prop::sample::select(vec!["EA", "EE", "EAE", "EEA", "EAA"])) {
            let d = random_dtm(&seed, false);
            let d = if p.len() == 3 {
                let mut b = DtmBuilder::new(3, &['_', '0', '1'], '_', &["q0", "acc", "rej", "s", "u"]);
                for q in [0usize, 3, 4] {
                    for a in 0..3u8 {
                        b.set(q, a, d.delta(q, a));
                    }
                }
                b.build().unwrap()
            } else { d };
            prop_assert_eq!(solve(d.clone(), p, l, t), naive(d, p, l, t));
        }

        #[test]
        fn dual_negates(seed in prop::collection::vec(any::<u8>(), 9), l in 0usize..3) {
            // the left-edge rule rejects in both machines, so only right moves
            let d = random_dtm(&seed, true);
            let t = 40;
            let words = all_words(3, l, 100).unwrap();
            let halts = words.iter().all(|a| words.iter().all(|b| {
                dtm_run(&d, &[a.clone(), b.clone()], t, false).unwrap().verdict != Verdict::BudgetExhausted
            }));
            prop_assume!(halts);
            let qs = [Quantifier::Exists, Quantifier::Forall];
            let flipped: Vec<_> = qs.iter().map(|q| q.flip()).collect();
            let b = SolveBounds::Override { word_length: l, time: t };
            let o = SolveOptions::default();
            let x = solve_with_prefix(&Machine::Table(d.clone()), &qs, 1, b, &o).unwrap();
            let y = solve_with_prefix(&Machine::Table(d.negated()), &flipped, 1, b, &o).unwrap();
            prop_assert_eq!(x, !y);
        }

        #[test]
        fn altern_duplicate_invariant(bits in prop::collection::vec(any::<bool>(), 1..8), at in 0usize..8) {
            let mut qs: Vec<Quantifier> = bits.iter().map(|&b| if b { Quantifier::Exists } else { Quantifier::Forall }).collect();
            let before = altern(&qs);
            let i = at % qs.len();
            qs.insert(i, qs[i]);
            prop_assert_eq!(altern(&qs), before);
        }
    }
}
