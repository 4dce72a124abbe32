//! Fixed-width configuration words and trail-delimited path encodings.
//!
//! Extended symbols are laid out as: base symbols `0..|Σ|`, then one symbol
//! per state, then the trail.

use crate::atm::{atm_successors, AtmConfig, AtmSpec};
use crate::{StateId, Sym};
use thiserror::Error;

pub type BarSym = u8;

pub const TRAIL_TEXT: &str = ">";

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("configuration does not fit in {h} cells")]
    DoesNotFit { h: usize },
    #[error("word is not a configuration word")]
    NotInC,
    #[error("extended alphabet too large ({0} symbols)")]
    AlphabetTooLarge(usize),
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodingAlphabet {
    pub sigma: usize,
    pub states: usize,
    pub blank: Sym,
}

impl EncodingAlphabet {
    pub fn for_atm(spec: &AtmSpec) -> Result<Self, CodecError> {
        let n = spec.alphabet.len() + spec.states.len() + 1;
        if n > BarSym::MAX as usize + 1 {
            return Err(CodecError::AlphabetTooLarge(n));
        }
        Ok(EncodingAlphabet {
            sigma: spec.alphabet.len(),
            states: spec.states.len(),
            blank: spec.blank,
        })
    }

    pub fn size(&self) -> usize {
        self.sigma + self.states + 1
    }

    pub fn trail(&self) -> BarSym {
        (self.sigma + self.states) as BarSym
    }

    pub fn state_sym(&self, q: StateId) -> BarSym {
        (self.sigma + q) as BarSym
    }

    pub fn as_state(&self, x: BarSym) -> Option<StateId> {
        let x = x as usize;
        (x >= self.sigma && x < self.sigma + self.states).then(|| x - self.sigma)
    }

    pub fn is_base(&self, x: BarSym) -> bool {
        (x as usize) < self.sigma
    }

    pub fn render(&self, spec: &AtmSpec, word: &[BarSym]) -> String {
        word.iter()
            .map(|&x| {
                if x == self.trail() {
                    TRAIL_TEXT.to_string()
                } else if let Some(q) = self.as_state(x) {
                    spec.states[q].clone()
                } else {
                    spec.alphabet[x as usize].to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Whitespace-separated tokens: a base symbol, a state name or `>`.
    pub fn parse(&self, spec: &AtmSpec, text: &str) -> Result<Vec<BarSym>, CodecError> {
        text.split_whitespace()
            .map(|tok| {
                if tok == TRAIL_TEXT {
                    return Ok(self.trail());
                }
                if let Some(q) = spec.states.iter().position(|s| s == tok) {
                    return Ok(self.state_sym(q));
                }
                let mut cs = tok.chars();
                match (cs.next(), cs.next()) {
                    (Some(c), None) => spec
                        .sym_of(c)
                        .ok_or_else(|| CodecError::UnknownSymbol(tok.into())),
                    _ => Err(CodecError::UnknownSymbol(tok.into())),
                }
            })
            .collect()
    }
}

pub fn fits(c: &AtmConfig, h: usize) -> bool {
    h >= c.head + 2 && h > c.word.len()
}

pub fn encode_config(alph: &EncodingAlphabet, c: &AtmConfig, h: usize) -> Result<Vec<BarSym>, CodecError> {
    if !fits(c, h) {
        return Err(CodecError::DoesNotFit { h });
    }
    let mut padded: Vec<BarSym> = c.word.clone();
    padded.resize(h - 1, alph.blank);
    let mut out = Vec::with_capacity(h);
    out.extend_from_slice(&padded[..c.head]);
    out.push(alph.state_sym(c.state));
    out.extend_from_slice(&padded[c.head..]);
    Ok(out)
}

pub fn is_config_word(alph: &EncodingAlphabet, word: &[BarSym], h: usize) -> bool {
    if word.len() != h || h == 0 {
        return false;
    }
    let mut states = 0;
    for (i, &x) in word.iter().enumerate() {
        if alph.as_state(x).is_some() {
            states += 1;
            if i + 1 == word.len() {
                return false;
            }
        } else if !alph.is_base(x) {
            return false;
        }
    }
    states == 1
}

/// Inverse of `encode_config`; the length is taken from the word.
pub fn decode_config(alph: &EncodingAlphabet, word: &[BarSym]) -> Result<AtmConfig, CodecError> {
    if !is_config_word(alph, word, word.len()) {
        return Err(CodecError::NotInC);
    }
    let head = word
        .iter()
        .position(|&x| alph.as_state(x).is_some())
        .expect("one state symbol");
    let state = alph.as_state(word[head]).expect("state");
    let w: Vec<Sym> = word[..head].iter().chain(&word[head + 1..]).copied().collect();
    Ok(AtmConfig::new(w, state, head, alph.blank))
}

/// Symbols before the first trail, cut at `h²`.
pub fn take_encoded_prefix<'a>(alph: &EncodingAlphabet, word: &'a [BarSym], h: usize) -> &'a [BarSym] {
    let limit = h.saturating_mul(h).min(word.len());
    let end = word[..limit]
        .iter()
        .position(|&x| x == alph.trail())
        .unwrap_or(limit);
    &word[..end]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MalformedReason {
    BadChunkLength,
    ChunkNotInC,
    NotASuccessor,
    /// Kept for completeness; an empty prefix is reported as `BadChunkLength`.
    Empty,
}

impl MalformedReason {
    pub fn name(self) -> &'static str {
        match self {
            MalformedReason::BadChunkLength => "BadChunkLength",
            MalformedReason::ChunkNotInC => "ChunkNotInC",
            MalformedReason::NotASuccessor => "NotASuccessor",
            MalformedReason::Empty => "Empty",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathDecode {
    Path { configs: Vec<AtmConfig>, consumed: usize },
    Malformed(MalformedReason),
}

pub fn decode_path(spec: &AtmSpec, alph: &EncodingAlphabet, word: &[BarSym], h: usize) -> PathDecode {
    let prefix = take_encoded_prefix(alph, word, h);
    if h == 0 || prefix.is_empty() || prefix.len() % h != 0 {
        return PathDecode::Malformed(MalformedReason::BadChunkLength);
    }
    let mut configs = Vec::with_capacity(prefix.len() / h);
    for chunk in prefix.chunks(h) {
        match decode_config(alph, chunk) {
            Ok(c) => configs.push(c),
            Err(_) => return PathDecode::Malformed(MalformedReason::ChunkNotInC),
        }
    }
    for w in configs.windows(2) {
        if !atm_successors(spec, &w[0]).contains(&w[1]) {
            return PathDecode::Malformed(MalformedReason::NotASuccessor);
        }
    }
    PathDecode::Path {
        configs,
        consumed: prefix.len(),
    }
}

/// Concatenated chunks; a trail is appended when shorter than `h²`.
pub fn encode_path(alph: &EncodingAlphabet, path: &[AtmConfig], h: usize) -> Result<Vec<BarSym>, CodecError> {
    let mut out = Vec::with_capacity(path.len() * h + 1);
    for c in path {
        out.extend(encode_config(alph, c, h)?);
    }
    if out.len() < h.saturating_mul(h) {
        out.push(alph.trail());
    }
    Ok(out)
}
