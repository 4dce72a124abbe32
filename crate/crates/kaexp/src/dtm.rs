//! Deterministic n-tape machines with one shared head and jump moves.

use crate::{StateId, Sym};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum DtmError {
    #[error("malformed configuration: {0}")]
    MalformedConfig(String),
    #[error("invalid machine: {0}")]
    InvalidSpec(String),
    #[error("expected {expected} input words, got {got}")]
    Arity { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dir {
    Left,
    Right,
}

impl Dir {
    pub fn from_i64(d: i64) -> Option<Dir> {
        match d {
            -1 => Some(Dir::Left),
            1 => Some(Dir::Right),
            _ => None,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Dir::Left => -1,
            Dir::Right => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Ordinary { next: StateId, write: Sym, dir: Dir },
    /// target tape is 1-based
    Jump { next: StateId, tape: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DtmSpec {
    pub tapes: usize,
    pub alphabet: Vec<char>,
    pub blank: Sym,
    pub states: Vec<String>,
    pub init: StateId,
    pub accept: StateId,
    pub reject: StateId,
    /// indexed by state * |alphabet| + symbol
    delta: Vec<Move>,
}

impl DtmSpec {
    /// `delta` is a dense table indexed by `state * alphabet.len() + symbol`.
    pub fn new(
        tapes: usize,
        alphabet: Vec<char>,
        blank: Sym,
        states: Vec<String>,
        init: StateId,
        accept: StateId,
        reject: StateId,
        delta: Vec<Move>,
    ) -> Result<Self, DtmError> {
        let bad = |m: String| Err(DtmError::InvalidSpec(m));
        if tapes == 0 {
            return bad("at least one tape".into());
        }
        if alphabet.is_empty() || alphabet.len() > u8::MAX as usize {
            return bad(format!("alphabet size {} out of range", alphabet.len()));
        }
        if blank as usize >= alphabet.len() {
            return bad("blank not in alphabet".into());
        }
        let nq = states.len();
        for (name, q) in [("init", init), ("accept", accept), ("reject", reject)] {
            if q >= nq {
                return bad(format!("{name} state out of range"));
            }
        }
        if accept == reject {
            return bad("accept and reject states coincide".into());
        }
        if delta.len() != nq * alphabet.len() {
            return bad(format!(
                "transition table has {} entries, expected {}",
                delta.len(),
                nq * alphabet.len()
            ));
        }
        for (i, mv) in delta.iter().enumerate() {
            let (q, a) = (i / alphabet.len(), i % alphabet.len());
            match *mv {
                Move::Ordinary { next, write, .. } => {
                    if next >= nq || write as usize >= alphabet.len() {
                        return bad(format!("entry ({}, {}) out of range", states[q], alphabet[a]));
                    }
                }
                Move::Jump { next, tape } => {
                    if next >= nq || tape == 0 || tape > tapes {
                        return bad(format!("entry ({}, {}) out of range", states[q], alphabet[a]));
                    }
                }
            }
            if q == accept || q == reject {
                let want = Move::Jump { next: q, tape: 1 };
                if *mv != want {
                    return bad(format!("state {} must jump to itself on tape 1", states[q]));
                }
            }
        }
        Ok(DtmSpec {
            tapes,
            alphabet,
            blank,
            states,
            init,
            accept,
            reject,
            delta,
        })
    }

    pub fn delta(&self, q: StateId, a: Sym) -> Move {
        self.delta[q * self.alphabet.len() + a as usize]
    }

    pub fn delta_table(&self) -> &[Move] {
        &self.delta
    }

    pub fn symbol_count(&self) -> usize {
        self.alphabet.len()
    }

    pub fn sym_of(&self, c: char) -> Option<Sym> {
        self.alphabet.iter().position(|&x| x == c).map(|i| i as Sym)
    }

    /// Same machine with accept and reject swapped (and their self-loops kept).
    pub fn negated(&self) -> DtmSpec {
        let mut d = self.clone();
        std::mem::swap(&mut d.accept, &mut d.reject);
        d
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DtmConfig {
    pub tapes: Vec<Vec<Sym>>,
    pub state: StateId,
    /// 1-based tape index
    pub tape: usize,
    pub cell: usize,
}

impl DtmConfig {
    pub fn initial(spec: &DtmSpec, inputs: &[Vec<Sym>]) -> Result<Self, DtmError> {
        if inputs.len() != spec.tapes {
            return Err(DtmError::Arity {
                expected: spec.tapes,
                got: inputs.len(),
            });
        }
        Ok(DtmConfig {
            tapes: inputs.to_vec(),
            state: spec.init,
            tape: 1,
            cell: 0,
        })
    }

    pub fn read(&self, spec: &DtmSpec) -> Sym {
        self.tapes[self.tape - 1]
            .get(self.cell)
            .copied()
            .unwrap_or(spec.blank)
    }

    /// Equality up to trailing blanks on every tape.
    pub fn same_as(&self, other: &DtmConfig, blank: Sym) -> bool {
        fn trim(w: &[Sym], b: Sym) -> &[Sym] {
            let mut n = w.len();
            while n > 0 && w[n - 1] == b {
                n -= 1;
            }
            &w[..n]
        }
        self.state == other.state
            && self.tape == other.tape
            && self.cell == other.cell
            && self.tapes.len() == other.tapes.len()
            && self
                .tapes
                .iter()
                .zip(&other.tapes)
                .all(|(a, b)| trim(a, blank) == trim(b, blank))
    }

    fn check(&self, spec: &DtmSpec) -> Result<(), DtmError> {
        if self.tapes.len() != spec.tapes {
            return Err(DtmError::MalformedConfig(format!(
                "{} tapes, machine has {}",
                self.tapes.len(),
                spec.tapes
            )));
        }
        if self.tape == 0 || self.tape > spec.tapes {
            return Err(DtmError::MalformedConfig(format!("tape index {}", self.tape)));
        }
        if self.state >= spec.states.len() {
            return Err(DtmError::MalformedConfig(format!("state {}", self.state)));
        }
        Ok(())
    }
}

/// One transition applied in place.
pub fn step_in_place(spec: &DtmSpec, c: &mut DtmConfig) -> Result<(), DtmError> {
    c.check(spec)?;
    match spec.delta(c.state, c.read(spec)) {
        Move::Jump { next, tape } => {
            c.state = next;
            c.tape = tape;
        }
        Move::Ordinary { dir: Dir::Left, .. } if c.cell == 0 => {
            c.state = spec.reject;
            c.tape = 1;
            c.cell = 0;
        }
        Move::Ordinary { next, write, dir } => {
            let t = &mut c.tapes[c.tape - 1];
            if t.len() <= c.cell {
                t.resize(c.cell + 1, spec.blank);
            }
            t[c.cell] = write;
            c.state = next;
            match dir {
                Dir::Left => c.cell -= 1,
                Dir::Right => c.cell += 1,
            }
        }
    }
    Ok(())
}

pub fn dtm_step(spec: &DtmSpec, c: &DtmConfig) -> Result<DtmConfig, DtmError> {
    let mut next = c.clone();
    step_in_place(spec, &mut next)?;
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Accepted,
    RejectedState,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub verdict: Verdict,
    pub steps_used: u64,
    /// positional states (q, tape, cell), starting with the initial one
    pub trace: Option<Vec<(StateId, usize, usize)>>,
}

pub fn dtm_run(
    spec: &DtmSpec,
    inputs: &[Vec<Sym>],
    budget: u64,
    trace: bool,
) -> Result<RunOutcome, DtmError> {
    let mut c = DtmConfig::initial(spec, inputs)?;
    let mut tr = trace.then(Vec::new);
    let mut steps = 0u64;
    loop {
        if let Some(t) = tr.as_mut() {
            t.push((c.state, c.tape, c.cell));
        }
        if c.state == spec.accept {
            return Ok(RunOutcome {
                verdict: Verdict::Accepted,
                steps_used: steps,
                trace: tr,
            });
        }
        if c.state == spec.reject {
            return Ok(RunOutcome {
                verdict: Verdict::RejectedState,
                steps_used: steps,
                trace: tr,
            });
        }
        if steps == budget {
            return Ok(RunOutcome {
                verdict: Verdict::BudgetExhausted,
                steps_used: steps,
                trace: tr,
            });
        }
        step_in_place(spec, &mut c)?;
        steps += 1;
    }
}

/// Convenience: does the machine accept within `budget` steps?
pub fn accepts_within(spec: &DtmSpec, inputs: &[Vec<Sym>], budget: u64) -> Result<bool, DtmError> {
    Ok(dtm_run(spec, inputs, budget, false)?.verdict == Verdict::Accepted)
}

/// Builder that fills in the absorbing rows for accept/reject and defaults
/// every unspecified entry to a jump into the reject state.
pub struct DtmBuilder {
    tapes: usize,
    alphabet: Vec<char>,
    blank: Sym,
    states: Vec<String>,
    init: StateId,
    accept: StateId,
    reject: StateId,
    delta: Vec<Option<Move>>,
}

impl DtmBuilder {
    pub fn new(tapes: usize, alphabet: &[char], blank: char, states: &[&str]) -> Self {
        let blank = alphabet.iter().position(|&c| c == blank).unwrap_or(0) as Sym;
        let n = states.len() * alphabet.len();
        DtmBuilder {
            tapes,
            alphabet: alphabet.to_vec(),
            blank,
            states: states.iter().map(|s| s.to_string()).collect(),
            init: 0,
            accept: 1.min(states.len().saturating_sub(1)),
            reject: 2.min(states.len().saturating_sub(1)),
            delta: vec![None; n],
        }
    }

    pub fn roles(mut self, init: StateId, accept: StateId, reject: StateId) -> Self {
        self.init = init;
        self.accept = accept;
        self.reject = reject;
        self
    }

    pub fn set(&mut self, q: StateId, a: Sym, mv: Move) -> &mut Self {
        let k = self.alphabet.len();
        self.delta[q * k + a as usize] = Some(mv);
        self
    }

    pub fn ordinary(&mut self, q: StateId, a: Sym, next: StateId, write: Sym, dir: Dir) -> &mut Self {
        self.set(q, a, Move::Ordinary { next, write, dir })
    }

    pub fn jump(&mut self, q: StateId, a: Sym, next: StateId, tape: usize) -> &mut Self {
        self.set(q, a, Move::Jump { next, tape })
    }

    pub fn build(&self) -> Result<DtmSpec, DtmError> {
        let k = self.alphabet.len();
        let delta = (0..self.states.len() * k)
            .map(|i| {
                let q = i / k;
                if q == self.accept || q == self.reject {
                    Move::Jump { next: q, tape: 1 }
                } else {
                    self.delta[i].unwrap_or(Move::Jump {
                        next: self.reject,
                        tape: 1,
                    })
                }
            })
            .collect();
        DtmSpec::new(
            self.tapes,
            self.alphabet.clone(),
            self.blank,
            self.states.clone(),
            self.init,
            self.accept,
            self.reject,
            delta,
        )
    }
}
