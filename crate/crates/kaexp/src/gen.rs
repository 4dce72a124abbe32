//! Seeded random instances for differential runs.

use crate::atm::{AtmBuilder, AtmSpec};
use crate::dtm::{Dir, DtmBuilder, DtmSpec};
use crate::tiling::{MultiTilingSystem, Relation};
use crate::{StateId, Sym};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn names(count: usize, terminal: &[&str]) -> Vec<String> {
    let mut v: Vec<String> = terminal.iter().map(|s| s.to_string()).collect();
    for i in v.len()..count {
        v.push(format!("q{i}"));
    }
    v
}

/// States 0 (init), 1 (accept), 2 (reject) and `extra` working states.
/// With `right_only` every ordinary move goes right.
pub fn random_dtm(rng: &mut impl Rng, tapes: usize, alphabet: &[char], extra: usize, right_only: bool) -> DtmSpec {
    let states = names(3 + extra, &["q0", "acc", "rej"]);
    let refs: Vec<&str> = states.iter().map(String::as_str).collect();
    let mut b = DtmBuilder::new(tapes, alphabet, alphabet[0], &refs);
    let nq = states.len();
    for q in (0..nq).filter(|&q| q != 1 && q != 2) {
        for a in 0..alphabet.len() as Sym {
            let next = rng.gen_range(0..nq);
            if rng.gen_bool(0.6) {
                let write = rng.gen_range(0..alphabet.len()) as Sym;
                let dir = if right_only || rng.gen_bool(0.7) { Dir::Right } else { Dir::Left };
                b.ordinary(q, a, next, write, dir);
            } else {
                b.jump(q, a, next, rng.gen_range(1..=tapes));
            }
        }
    }
    b.build().expect("generated machine is valid")
}

/// States qinit (∃), qacc, qrej, then `existential` more ∃ states and
/// `universal` ∀ states. Rows hold one to three random triples.
pub fn random_atm(rng: &mut impl Rng, alphabet: &[char], blank: char, existential: usize, universal: usize) -> AtmSpec {
    let nq = 3 + existential + universal;
    let states = names(nq, &["qinit", "qacc", "qrej"]);
    let refs: Vec<&str> = states.iter().map(String::as_str).collect();
    let ex: Vec<StateId> = std::iter::once(0).chain(3..3 + existential).collect();
    let un: Vec<StateId> = (3 + existential..nq).collect();
    let mut b = AtmBuilder::new(alphabet, blank, &refs).kinds(&ex, &un);
    for q in (0..nq).filter(|&q| q != 1 && q != 2) {
        for a in 0..alphabet.len() as Sym {
            for _ in 0..rng.gen_range(1..=3) {
                let next = rng.gen_range(0..nq);
                let write = rng.gen_range(0..alphabet.len()) as Sym;
                let dir = if rng.gen_bool(0.5) { Dir::Right } else { Dir::Left };
                b.add(q, a, (next, write, dir));
            }
        }
    }
    b.build().expect("generated machine is valid")
}

/// Tiles 0..t0 are initial; each relation pair is kept with probability `density`.
pub fn random_tiling_system(rng: &mut impl Rng, tiles: usize, t0: usize, n: usize, density: f64) -> MultiTilingSystem {
    let rel = |rng: &mut dyn rand::RngCore| {
        let pairs: Vec<(usize, usize)> = (0..tiles)
            .flat_map(|a| (0..tiles).map(move |b| (a, b)))
            .filter(|_| rng.gen_bool(density))
            .collect();
        Relation::from_pairs(tiles, pairs)
    };
    let (h, v, m) = (rel(rng), rel(rng), rel(rng));
    let accepting: Vec<usize> = (0..tiles).filter(|_| rng.gen_bool(0.5)).collect();
    MultiTilingSystem::new(
        (0..tiles).map(|i| format!("t{i}")).collect(),
        (0..t0.min(tiles)).collect(),
        accepting,
        h,
        v,
        m,
        n,
        1,
    )
    .expect("generated system is valid")
}
