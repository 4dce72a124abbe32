//! Single-tape alternating machines: successors, bounded labelling, hops.

use crate::dtm::Dir;
use crate::{StateId, Sym};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum AtmError {
    #[error("invalid machine: {0}")]
    InvalidSpec(String),
    #[error("not a computation path (break after position {0})")]
    NotAPath(usize),
    #[error("empty path")]
    EmptyPath,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateKind {
    Existential,
    Universal,
    Accept,
    Reject,
}

pub type Triple = (StateId, Sym, Dir);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtmSpec {
    pub alphabet: Vec<char>,
    pub blank: Sym,
    pub states: Vec<String>,
    pub kinds: Vec<StateKind>,
    pub init: StateId,
    pub accept: StateId,
    pub reject: StateId,
    /// indexed by state * |alphabet| + symbol
    delta: Vec<Vec<Triple>>,
}

impl AtmSpec {
    /// `delta` is dense, indexed by `state * alphabet.len() + symbol`.
    pub fn new(
        alphabet: Vec<char>,
        blank: Sym,
        states: Vec<String>,
        existential: &[StateId],
        universal: &[StateId],
        init: StateId,
        accept: StateId,
        reject: StateId,
        delta: Vec<Vec<Triple>>,
    ) -> Result<Self, AtmError> {
        let bad = |m: String| Err(AtmError::InvalidSpec(m));
        let nq = states.len();
        let k = alphabet.len();
        if k < 2 || k > u8::MAX as usize {
            return bad(format!("alphabet size {k} out of range"));
        }
        if blank as usize >= k {
            return bad("blank not in alphabet".into());
        }
        if [init, accept, reject].iter().any(|&q| q >= nq) || accept == reject {
            return bad("init/accept/reject out of range or coinciding".into());
        }
        let mut kinds: Vec<Option<StateKind>> = vec![None; nq];
        kinds[accept] = Some(StateKind::Accept);
        kinds[reject] = Some(StateKind::Reject);
        for (set, kind) in [(existential, StateKind::Existential), (universal, StateKind::Universal)] {
            for &q in set {
                if q >= nq {
                    return bad(format!("state {q} out of range"));
                }
                if kinds[q].is_some() {
                    return bad(format!("state {} has two kinds", states[q]));
                }
                kinds[q] = Some(kind);
            }
        }
        let Some(kinds) = kinds.into_iter().collect::<Option<Vec<_>>>() else {
            return bad("every state must be existential, universal, accept or reject".into());
        };
        if kinds[init] != StateKind::Existential {
            return bad("initial state must be existential".into());
        }
        if delta.len() != nq * k {
            return bad(format!("transition table has {} rows, expected {}", delta.len(), nq * k));
        }
        for (i, row) in delta.iter().enumerate() {
            let (q, a) = (i / k, i % k);
            if row.is_empty() {
                return bad(format!("no transition for ({}, {})", states[q], alphabet[a]));
            }
            if row.iter().any(|&(p, b, _)| p >= nq || b as usize >= k) {
                return bad(format!("entry ({}, {}) out of range", states[q], alphabet[a]));
            }
            let want = match kinds[q] {
                StateKind::Accept => Some((q, a as Sym, Dir::Right)),
                StateKind::Reject => Some((q, a as Sym, Dir::Left)),
                _ => None,
            };
            if let Some(t) = want {
                if row.as_slice() != [t] {
                    return bad(format!("terminal state {} has a non-standard row", states[q]));
                }
            }
        }
        Ok(AtmSpec {
            alphabet,
            blank,
            states,
            kinds,
            init,
            accept,
            reject,
            delta,
        })
    }

    pub fn delta(&self, q: StateId, a: Sym) -> &[Triple] {
        &self.delta[q * self.alphabet.len() + a as usize]
    }

    pub fn kind(&self, q: StateId) -> StateKind {
        self.kinds[q]
    }

    pub fn existential(&self) -> Vec<StateId> {
        self.states_of(StateKind::Existential)
    }

    pub fn universal(&self) -> Vec<StateId> {
        self.states_of(StateKind::Universal)
    }

    fn states_of(&self, k: StateKind) -> Vec<StateId> {
        (0..self.states.len()).filter(|&q| self.kinds[q] == k).collect()
    }

    pub fn sym_of(&self, c: char) -> Option<Sym> {
        self.alphabet.iter().position(|&x| x == c).map(|i| i as Sym)
    }

    fn dual_rows(&self) -> Vec<Vec<Triple>> {
        let k = self.alphabet.len();
        (0..self.delta.len())
            .map(|i| {
                let (q, a) = (i / k, (i % k) as Sym);
                if q == self.accept {
                    vec![(q, a, Dir::Left)]
                } else if q == self.reject {
                    vec![(q, a, Dir::Right)]
                } else {
                    self.delta[i].clone()
                }
            })
            .collect()
    }

    /// Dual machine: quantifier kinds and verdicts swapped. A fresh
    /// existential start state copies the old init row (with a single
    /// choice per symbol it behaves like either quantifier), so duality is
    /// exact when every row of `init` is a singleton.
    pub fn dual(&self) -> Result<AtmSpec, AtmError> {
        let k = self.alphabet.len();
        let nq = self.states.len();
        let mut rows = self.dual_rows();
        let mut states = self.states.clone();
        states.push(format!("{}'", self.states[self.init]));
        for a in 0..k {
            rows.push(self.delta[self.init * k + a].clone());
        }
        let mut ex = self.universal();
        ex.push(nq);
        let un = self.existential();
        AtmSpec::new(
            self.alphabet.clone(),
            self.blank,
            states,
            &ex,
            &un,
            nq,
            self.reject,
            self.accept,
            rows,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtmConfig {
    pub word: Vec<Sym>,
    pub state: StateId,
    pub head: usize,
}

impl AtmConfig {
    /// Builds a configuration, stripping trailing blanks from `word`.
    pub fn new(mut word: Vec<Sym>, state: StateId, head: usize, blank: Sym) -> Self {
        strip_blanks(&mut word, blank);
        AtmConfig { word, state, head }
    }

    pub fn initial(spec: &AtmSpec, w: &[Sym]) -> Self {
        AtmConfig::new(w.to_vec(), spec.init, 0, spec.blank)
    }

    pub fn read(&self, blank: Sym) -> Sym {
        self.word.get(self.head).copied().unwrap_or(blank)
    }

    pub fn is_canonical(&self, blank: Sym) -> bool {
        self.word.last() != Some(&blank)
    }
}

pub fn strip_blanks(w: &mut Vec<Sym>, blank: Sym) {
    while w.last() == Some(&blank) {
        w.pop();
    }
}

pub fn apply_triple(spec: &AtmSpec, c: &AtmConfig, (q, b, dir): Triple) -> AtmConfig {
    if c.head == 0 && dir == Dir::Left {
        return AtmConfig {
            word: c.word.clone(),
            state: spec.reject,
            head: 0,
        };
    }
    let mut w = c.word.clone();
    if w.len() <= c.head {
        w.resize(c.head + 1, spec.blank);
    }
    w[c.head] = b;
    let head = match dir {
        Dir::Left => c.head - 1,
        Dir::Right => c.head + 1,
    };
    AtmConfig::new(w, q, head, spec.blank)
}

/// Δ(c), deduplicated, in the order of the transition row.
pub fn atm_successors(spec: &AtmSpec, c: &AtmConfig) -> Vec<AtmConfig> {
    let mut out: Vec<AtmConfig> = Vec::new();
    for &t in spec.delta(c.state, c.read(spec.blank)) {
        let s = apply_triple(spec, c, t);
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Acc,
    Rej,
    Undetermined,
}

/// Depth-bounded labelling with a memo keyed on (configuration, budget).
pub struct Labeller<'a> {
    spec: &'a AtmSpec,
    memo: HashMap<(AtmConfig, u64), Label>,
}

impl<'a> Labeller<'a> {
    pub fn new(spec: &'a AtmSpec) -> Self {
        Labeller {
            spec,
            memo: HashMap::new(),
        }
    }

    pub fn label(&mut self, c: &AtmConfig, t: u64) -> Label {
        match self.spec.kind(c.state) {
            StateKind::Accept => return Label::Acc,
            StateKind::Reject => return Label::Rej,
            _ if t == 0 => return Label::Undetermined,
            _ => {}
        }
        if let Some(&l) = self.memo.get(&(c.clone(), t)) {
            return l;
        }
        let existential = self.spec.kind(c.state) == StateKind::Existential;
        let (win, lose) = if existential {
            (Label::Acc, Label::Rej)
        } else {
            (Label::Rej, Label::Acc)
        };
        let mut all_lose = true;
        let mut res = None;
        for s in atm_successors(self.spec, c) {
            let l = self.label(&s, t - 1);
            if l == win {
                res = Some(win);
                break;
            }
            if l != lose {
                all_lose = false;
            }
        }
        let l = res.unwrap_or(if all_lose { lose } else { Label::Undetermined });
        self.memo.insert((c.clone(), t), l);
        l
    }
}

pub fn atm_label(spec: &AtmSpec, c: &AtmConfig, t: u64) -> Label {
    Labeller::new(spec).label(c, t)
}

pub fn atm_accepts(spec: &AtmSpec, w: &[Sym], t: u64) -> bool {
    atm_label(spec, &AtmConfig::initial(spec, w), t) == Label::Acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HopKind {
    ExistentialHop,
    UniversalHop,
    NotAHop,
}

pub fn is_path(spec: &AtmSpec, path: &[AtmConfig]) -> Result<(), AtmError> {
    if path.is_empty() {
        return Err(AtmError::EmptyPath);
    }
    for (i, w) in path.windows(2).enumerate() {
        if !atm_successors(spec, &w[0]).contains(&w[1]) {
            return Err(AtmError::NotAPath(i));
        }
    }
    Ok(())
}

/// Kind of hop the path forms. A single terminal configuration satisfies both
/// definitions vacuously; existential is reported first.
pub fn classify_hop(spec: &AtmSpec, path: &[AtmConfig]) -> Result<HopKind, AtmError> {
    is_path(spec, path)?;
    let (last, body) = path.split_last().expect("non-empty");
    let body_all = |k: StateKind| body.iter().all(|c| spec.kind(c.state) == k);
    let terminal = matches!(spec.kind(last.state), StateKind::Accept | StateKind::Reject);
    let last_kind = spec.kind(last.state);
    if body_all(StateKind::Existential) && (terminal || last_kind == StateKind::Universal) {
        return Ok(HopKind::ExistentialHop);
    }
    if body_all(StateKind::Universal) && (terminal || last_kind == StateKind::Existential) {
        return Ok(HopKind::UniversalHop);
    }
    Ok(HopKind::NotAHop)
}

/// Builder that fills the terminal rows and defaults missing rows of
/// non-terminal states to a single left move into reject.
pub struct AtmBuilder {
    alphabet: Vec<char>,
    blank: Sym,
    states: Vec<String>,
    existential: Vec<StateId>,
    universal: Vec<StateId>,
    init: StateId,
    accept: StateId,
    reject: StateId,
    delta: Vec<Vec<Triple>>,
}

impl AtmBuilder {
    pub fn new(alphabet: &[char], blank: char, states: &[&str]) -> Self {
        let blank = alphabet.iter().position(|&c| c == blank).unwrap_or(0) as Sym;
        AtmBuilder {
            alphabet: alphabet.to_vec(),
            blank,
            states: states.iter().map(|s| s.to_string()).collect(),
            existential: vec![],
            universal: vec![],
            init: 0,
            accept: 1,
            reject: 2,
            delta: vec![vec![]; states.len() * alphabet.len()],
        }
    }

    pub fn roles(mut self, init: StateId, accept: StateId, reject: StateId) -> Self {
        self.init = init;
        self.accept = accept;
        self.reject = reject;
        self
    }

    pub fn kinds(mut self, existential: &[StateId], universal: &[StateId]) -> Self {
        self.existential = existential.to_vec();
        self.universal = universal.to_vec();
        self
    }

    pub fn add(&mut self, q: StateId, a: Sym, t: Triple) -> &mut Self {
        let k = self.alphabet.len();
        let row = &mut self.delta[q * k + a as usize];
        if !row.contains(&t) {
            row.push(t);
        }
        self
    }

    pub fn build(&self) -> Result<AtmSpec, AtmError> {
        let k = self.alphabet.len();
        let delta = (0..self.delta.len())
            .map(|i| {
                let (q, a) = (i / k, (i % k) as Sym);
                if q == self.accept {
                    vec![(q, a, Dir::Right)]
                } else if q == self.reject {
                    vec![(q, a, Dir::Left)]
                } else if self.delta[i].is_empty() {
                    vec![(self.reject, a, Dir::Left)]
                } else {
                    self.delta[i].clone()
                }
            })
            .collect();
        AtmSpec::new(
            self.alphabet.clone(),
            self.blank,
            self.states.clone(),
            &self.existential,
            &self.universal,
            self.init,
            self.accept,
            self.reject,
            delta,
        )
    }
}

/// The two-alternation toy machine over {a, □}: states qinit (∃), q1 (∀),
/// qacc, qrej. It accepts "a" in two steps and every configuration it
/// reaches from "a" within two steps fits in three cells.
pub fn toy_atm() -> AtmSpec {
    const A: Sym = 0;
    const B: Sym = 1;
    let mut b = AtmBuilder::new(&['a', '_'], '_', &["qinit", "qacc", "qrej", "q1"])
        .roles(0, 1, 2)
        .kinds(&[0], &[3]);
    b.add(0, A, (3, A, Dir::Right))
        .add(0, A, (2, A, Dir::Right))
        .add(0, B, (2, B, Dir::Right))
        .add(3, B, (1, A, Dir::Left))
        .add(3, B, (1, B, Dir::Left))
        .add(3, A, (2, A, Dir::Left));
    b.build().expect("toy machine is well-formed")
}
