//! Acceptance suite: one line per criterion. Runs as a plain binary so the
//! lines are always shown; exits non-zero on any unexpected failure.

use kaexp::arith::{self, Polynomial, ResourceCap};
use kaexp::atm::{self, atm_successors, toy_atm, AtmConfig, AtmSpec, Label, StateKind};
use kaexp::codec::{self, BarSym, EncodingAlphabet, PathDecode};
use kaexp::dtm::{self, Dir, DtmBuilder, DtmConfig, DtmSpec, Move};
use kaexp::gen;
use kaexp::prenex::{self, Machine, PrenexInstance, Quantifier, QuantifierPrefix, SolveBounds, SolveOptions};
use kaexp::tiling::{self, GridSide, TilingOptions};
use kaexp::verifier::{self, StepOutcome, VerifierInstance, VerifierVerdict};
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

enum Status {
    Pass,
    Fail,
    Known(&'static str),
}

struct Outcome {
    status: Status,
    detail: String,
}

fn outcome(ok: bool, detail: String) -> Outcome {
    Outcome {
        status: if ok { Status::Pass } else { Status::Fail },
        detail,
    }
}

/// A failure that is expected: `still_fails` confirms the defect reproduces
/// and `rest_ok` that everything around it holds.
fn known(still_fails: bool, rest_ok: bool, why: &'static str, detail: String) -> Outcome {
    match (still_fails, rest_ok) {
        (true, true) => Outcome { status: Status::Known(why), detail },
        (false, true) => Outcome { status: Status::Pass, detail: format!("{detail}; known defect no longer reproduces") },
        _ => Outcome { status: Status::Fail, detail },
    }
}

#[derive(Default)]
struct CostLog {
    runs: AtomicU64,
    violations: AtomicU64,
}

impl CostLog {
    fn run(&self, vi: &VerifierInstance, inputs: &[Vec<BarSym>]) -> (VerifierVerdict, verifier::VerifierTrace) {
        let (v, tr) = verifier::run_verifier(vi, inputs).expect("arity");
        let lengths: Vec<usize> = inputs.iter().map(Vec::len).collect();
        self.runs.fetch_add(1, Ordering::Relaxed);
        if tr.total_reads() > vi.cost_bound(&lengths) {
            self.violations.fetch_add(1, Ordering::Relaxed);
        }
        (v, tr)
    }
}

fn cap() -> ResourceCap {
    ResourceCap::default()
}

fn toy_verifier(atm: &AtmSpec, h_override: Option<usize>) -> VerifierInstance {
    verifier::build_verifier(atm, &[0], &Polynomial::identity(), &Polynomial::constant(2), 1, 5, h_override, cap()).expect("valid")
}

// ---- 1 ----

fn c1() -> Outcome {
    let start = Instant::now();
    let suites = arith::lemma_suite(70000, cap());
    let secs = start.elapsed().as_secs_f64();
    let expected = ["k=1 n=1 p=1x^2 + 1", "k=1 n=1 p=2x^2 + 1", "k=2 n=1 p=1x^2 + 1"];
    let poly = &suites[0];
    let summary: Vec<String> = suites.iter().map(|s| format!("{} {}/{}", s.name, s.checked - s.failures, s.checked)).collect();
    let rest_ok = suites[1..].iter().all(|s| s.passed()) && poly.counterexamples == expected && poly.checked > 0 && secs < 15.0;
    known(
        poly.failures > 0,
        rest_ok,
        "p(tetra(k,n)) <= tetra(k,p(n)) is false for n=1 with p = x^2+1 (k=1,2) and 2x^2+1 (k=1)",
        format!("{}; {secs:.2}s", summary.join(", ")),
    )
}

// ---- 2 ----

fn step_oracle(d: &DtmSpec, c: &DtmConfig) -> DtmConfig {
    let mut tapes = c.tapes.clone();
    let read = tapes[c.tape - 1].get(c.cell).copied().unwrap_or(d.blank);
    let k = d.alphabet.len();
    match d.delta_table()[c.state * k + read as usize] {
        Move::Jump { next, tape } => DtmConfig { tapes, state: next, tape, cell: c.cell },
        Move::Ordinary { dir: Dir::Left, .. } if c.cell == 0 => DtmConfig { tapes, state: d.reject, tape: 1, cell: 0 },
        Move::Ordinary { next, write, dir } => {
            let t = &mut tapes[c.tape - 1];
            while t.len() <= c.cell {
                t.push(d.blank);
            }
            t[c.cell] = write;
            let cell = if dir == Dir::Right { c.cell + 1 } else { c.cell - 1 };
            DtmConfig { tapes, state: next, tape: c.tape, cell }
        }
    }
}

fn c2() -> Outcome {
    // q0 rows range over every move for alphabet {_, 0} and two tapes
    let mut moves = Vec::new();
    for next in 0..3 {
        for write in 0..2 {
            for dir in [Dir::Left, Dir::Right] {
                moves.push(Move::Ordinary { next, write, dir });
            }
        }
        for tape in 1..=2 {
            moves.push(Move::Jump { next, tape });
        }
    }
    let words: Vec<Vec<u8>> = vec![vec![], vec![0], vec![1], vec![1, 0], vec![0, 1], vec![1, 1], vec![0, 0]];
    let (mut checked, mut bad, mut edge, mut jumps, mut absorbed) = (0u64, 0u64, 0u64, 0u64, 0u64);
    for &m0 in &moves {
        for &m1 in &moves {
            let mut b = DtmBuilder::new(2, &['_', '0'], '_', &["q0", "acc", "rej"]);
            b.set(0, 0, m0).set(0, 1, m1);
            let d = b.build().expect("valid");
            for w1 in &words {
                for w2 in &words {
                    for state in 0..3 {
                        for tape in 1..=2 {
                            for cell in 0..3 {
                                let c = DtmConfig { tapes: vec![w1.clone(), w2.clone()], state, tape, cell };
                                let got = dtm::dtm_step(&d, &c).expect("well-formed");
                                let want = step_oracle(&d, &c);
                                checked += 1;
                                let mut ok = got.same_as(&want, d.blank);
                                let mv = d.delta(state, c.read(&d));
                                if state == d.accept || state == d.reject {
                                    absorbed += 1;
                                    ok &= got.state == state && got.cell == cell && got.same_as(&DtmConfig { state, tape: 1, ..c.clone() }, d.blank);
                                } else if matches!(mv, Move::Ordinary { dir: Dir::Left, .. }) && cell == 0 {
                                    edge += 1;
                                    ok &= (got.state, got.tape, got.cell) == (d.reject, 1, 0) && got.tapes == c.tapes;
                                } else if matches!(mv, Move::Jump { .. }) {
                                    jumps += 1;
                                    ok &= got.cell == cell && got.tapes == c.tapes;
                                }
                                if !ok {
                                    bad += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    outcome(
        bad == 0 && edge > 0 && jumps > 0 && absorbed > 0,
        format!("{} machines, {checked} steps ({edge} left-edge, {jumps} jump, {absorbed} absorbing), {bad} mismatches", moves.len() * moves.len()),
    )
}

// ---- 3 ----

fn random_config(rng: &mut impl Rng, spec: &AtmSpec, h: usize) -> AtmConfig {
    let len = rng.gen_range(0..h);
    let word: Vec<u8> = (0..len).map(|_| rng.gen_range(0..spec.alphabet.len()) as u8).collect();
    let head = rng.gen_range(0..=h - 2);
    AtmConfig::new(word, rng.gen_range(0..spec.states.len()), head, spec.blank)
}

fn random_path(rng: &mut impl Rng, spec: &AtmSpec, h: usize) -> Vec<AtmConfig> {
    let mut path = vec![random_config(rng, spec, h)];
    let want = rng.gen_range(1..=h);
    while path.len() < want {
        let next: Vec<AtmConfig> = atm_successors(spec, path.last().unwrap()).into_iter().filter(|c| codec::fits(c, h)).collect();
        match next.choose(rng) {
            Some(c) => path.push(c.clone()),
            None => break,
        }
    }
    path
}

fn random_atms(seed: u64, count: usize) -> Vec<AtmSpec> {
    let mut rng = gen::rng(seed);
    (0..count)
        .map(|i| match i % 3 {
            0 => toy_atm(),
            1 => gen::random_atm(&mut rng, &['a', '_'], '_', 0, 1),
            _ => gen::random_atm(&mut rng, &['a', 'b', '_'], '_', 1, 1),
        })
        .collect()
}

fn c3(log: &CostLog) -> Outcome {
    let mut rng = gen::rng(3);
    let atms = random_atms(30, 6);
    let mut bad = Vec::new();
    for i in 0..1000 {
        let spec = &atms[i % atms.len()];
        let alph = EncodingAlphabet::for_atm(spec).unwrap();
        let h = rng.gen_range(2..=6);
        let c = random_config(&mut rng, spec, h);
        let enc = codec::encode_config(&alph, &c, h).unwrap();
        if !codec::is_config_word(&alph, &enc, h) || codec::decode_config(&alph, &enc).ok() != Some(c) {
            bad.push("config");
        }
    }
    let toy = toy_atm();
    let toy_vi = toy_verifier(&toy, Some(3));
    for i in 0..500 {
        let spec = &atms[i % atms.len()];
        let alph = EncodingAlphabet::for_atm(spec).unwrap();
        let h = rng.gen_range(2..=5);
        let path = random_path(&mut rng, spec, h);
        let word = codec::encode_path(&alph, &path, h).unwrap();
        match codec::decode_path(spec, &alph, &word, h) {
            PathDecode::Path { configs, consumed } if configs == path && consumed == path.len() * h => {}
            _ => bad.push("path"),
        }
        if i % atms.len() == 0 && h == 3 {
            log.run(&toy_vi, &[word, vec![], vec![], vec![], vec![]]);
        }
    }
    for i in 0..200 {
        let spec = &atms[i % atms.len()];
        let alph = EncodingAlphabet::for_atm(spec).unwrap();
        let h = rng.gen_range(2..=4);
        let mut word = if rng.gen_bool(0.5) {
            codec::encode_path(&alph, &random_path(&mut rng, spec, h), h).unwrap()
        } else {
            vec![]
        };
        let target = h * h + rng.gen_range(0..4);
        while word.len() < target {
            word.push(rng.gen_range(0..alph.size()) as BarSym);
        }
        let mut padded = word[..h * h].to_vec();
        padded.extend((0..rng.gen_range(0..6)).map(|_| rng.gen_range(0..alph.size()) as BarSym));
        let a = codec::decode_path(spec, &alph, &word, h);
        let b = codec::decode_path(spec, &alph, &padded, h);
        if a != b || codec::take_encoded_prefix(&alph, &word, h) != codec::take_encoded_prefix(&alph, &padded, h) {
            bad.push("padding");
        }
    }
    outcome(bad.is_empty(), format!("1000 configs, 500 paths, 200 padded words; {} mismatches", bad.len()))
}

// ---- 4 ----

fn random_tape(rng: &mut impl Rng, vi: &VerifierInstance, i: usize, carried: Option<&AtmConfig>, long: bool) -> Vec<BarSym> {
    let hh = vi.h_exact().unwrap().pow(2);
    let size = vi.alph.size();
    let reps = verifier::representatives(vi, i, carried, hh);
    let mut w = match rng.gen_range(0..10) {
        0..=5 => reps.choose(rng).unwrap().clone(),
        6..=7 => {
            let mut w = reps.choose(rng).unwrap().clone();
            let at = rng.gen_range(0..w.len());
            w[at] = rng.gen_range(0..size) as BarSym;
            w
        }
        _ => (0..rng.gen_range(0..hh + 2)).map(|_| rng.gen_range(0..size) as BarSym).collect(),
    };
    if long {
        while w.len() < hh {
            w.push(rng.gen_range(0..size) as BarSym);
        }
    } else if rng.gen_bool(0.3) {
        w.truncate(rng.gen_range(0..=w.len()));
    }
    w
}

fn random_tuple(rng: &mut impl Rng, vi: &VerifierInstance, long: bool) -> Vec<Vec<BarSym>> {
    let mut tapes = Vec::new();
    let mut carried: Option<AtmConfig> = None;
    for i in 1..=vi.m {
        let w = random_tape(rng, vi, i, carried.as_ref(), long);
        carried = match verifier::macrostep(vi, i, carried.as_ref(), &w).outcome {
            StepOutcome::Carry(c) => Some(c),
            _ => None,
        };
        tapes.push(w);
    }
    for _ in vi.m..vi.n {
        tapes.push((0..rng.gen_range(0..12)).map(|_| rng.gen_range(0..vi.alph.size()) as BarSym).collect());
    }
    tapes
}

fn c4(log: &CostLog) -> Outcome {
    let mut rng = gen::rng(4);
    let mut instances = vec![toy_verifier(&toy_atm(), None), toy_verifier(&toy_atm(), Some(3))];
    for spec in random_atms(40, 6).iter().skip(1) {
        instances.push(toy_verifier(spec, Some(3)));
    }
    let (mut pad_bad, mut tail_bad, mut accepts) = (0, 0, 0);
    for k in 0..200 {
        let vi = &instances[k % instances.len()];
        let hh = vi.h_exact().unwrap().pow(2);
        let tapes = random_tuple(&mut rng, vi, true);
        let base = log.run(vi, &tapes);
        accepts += usize::from(base.0 == VerifierVerdict::Accept);
        let mut padded = tapes.clone();
        for w in padded.iter_mut().take(vi.m) {
            assert!(w.len() >= hh);
            w.extend((0..rng.gen_range(1..6)).map(|_| rng.gen_range(0..vi.alph.size()) as BarSym));
        }
        let p = log.run(vi, &padded);
        if p.0 != base.0 || p.1.render() != base.1.render() {
            pad_bad += 1;
        }
    }
    for k in 0..200 {
        let vi = &instances[k % instances.len()];
        let tapes = random_tuple(&mut rng, vi, false);
        let base = log.run(vi, &tapes);
        let mut other = tapes.clone();
        for w in other.iter_mut().skip(vi.m) {
            *w = (0..rng.gen_range(0..20)).map(|_| rng.gen_range(0..vi.alph.size()) as BarSym).collect();
        }
        let t = log.run(vi, &other);
        if t.0 != base.0 || t.1.render() != base.1.render() {
            tail_bad += 1;
        }
    }
    outcome(
        pad_bad == 0 && tail_bad == 0 && accepts > 0,
        format!("padding mismatches {pad_bad}/200, tail-tape mismatches {tail_bad}/200 ({accepts} accepting padded runs)"),
    )
}

// ---- 6 ----

/// Largest number of alternation blocks over paths of at most `steps`
/// transitions, whether every such path halts, and whether every visited
/// configuration fits in `h` cells.
fn path_profile(spec: &AtmSpec, w: &[u8], steps: usize, h: usize) -> (usize, bool, bool) {
    fn rec(spec: &AtmSpec, c: &AtmConfig, left: usize, h: usize, blocks: usize, last: Option<StateKind>, out: &mut (usize, bool, bool)) {
        out.2 &= codec::fits(c, h);
        let kind = spec.kind(c.state);
        if matches!(kind, StateKind::Accept | StateKind::Reject) {
            out.0 = out.0.max(blocks);
            return;
        }
        let blocks = if last == Some(kind) { blocks } else { blocks + 1 };
        out.0 = out.0.max(blocks);
        if left == 0 {
            out.1 = false;
            return;
        }
        for s in atm_successors(spec, c) {
            rec(spec, &s, left - 1, h, blocks, Some(kind), out);
        }
    }
    let mut out = (0, true, true);
    rec(spec, &AtmConfig::initial(spec, w), steps, h, 0, None, &mut out);
    out
}

fn words(size: usize, len: usize) -> Vec<Vec<BarSym>> {
    prenex::all_words(size, len, u64::MAX).unwrap()
}

/// ∃u₁ ∀u₂ over every word of length h² on the first two tapes.
fn brute_force(vi: &VerifierInstance, log: &CostLog) -> bool {
    let h = vi.h_exact().unwrap();
    let all = words(vi.alph.size(), h * h);
    let rest = vec![vec![]; vi.n - 2];
    all.par_iter().any(|u1| {
        all.iter().all(|u2| {
            let mut tapes = vec![u1.clone(), u2.clone()];
            tapes.extend(rest.iter().cloned());
            log.run(vi, &tapes).0 == VerifierVerdict::Accept
        })
    })
}

fn solver(vi: &VerifierInstance) -> bool {
    let h = vi.h_exact().unwrap();
    let qs = QuantifierPrefix::alternating(vi.n).unwrap();
    let b = SolveBounds::Override { word_length: h * h, time: u64::MAX };
    prenex::solve_with_prefix(&Machine::Verifier(vi.clone()), qs.as_slice(), 1, b, &SolveOptions::default()).unwrap()
}

fn c6(log: &CostLog) -> Outcome {
    let start = Instant::now();
    let toy = toy_atm();
    let vi = toy_verifier(&toy, None);
    let literal = brute_force(&vi, log);
    let direct = atm::atm_accepts(&toy, &[0], 2);
    let solver_agrees = solver(&vi) == literal;

    let mut rng = gen::rng(6);
    let mut literal_random = (0, 0);
    let mut random = Vec::new();
    while random.len() < 5 {
        let spec = gen::random_atm(&mut rng, &['a', '_'], '_', 0, 1);
        if path_profile(&spec, &[0], 2, 2).0 <= 2 {
            random.push(spec);
        }
    }
    let mut brute_vs_solver = solver_agrees;
    for spec in &random {
        let vi = toy_verifier(spec, None);
        let b = brute_force(&vi, log);
        brute_vs_solver &= solver(&vi) == b;
        literal_random.0 += usize::from(b == atm::atm_accepts(spec, &[0], 2));
        literal_random.1 += 1;
    }

    // premise: all paths halt within h - 1 steps, stay encodable and use at most two blocks
    let mut extended = vec![toy.clone()];
    let mut accepting = usize::from(atm::atm_accepts(&toy, &[0], 3));
    let mut tries = 0;
    while extended.len() < 6 || (accepting < 2 && tries < 5000) {
        tries += 1;
        let spec = gen::random_atm(&mut rng, &['a', '_'], '_', 0, 1);
        let (blocks, halts, fit) = path_profile(&spec, &[0], 2, 3);
        if blocks <= 2 && halts && fit && (extended.len() < 6 || atm::atm_accepts(&spec, &[0], 3)) {
            accepting += usize::from(atm::atm_accepts(&spec, &[0], 3));
            extended.push(spec);
        }
    }
    let ext_ok = extended.iter().filter(|s| solver(&toy_verifier(s, Some(3))) == atm::atm_accepts(s, &[0], 3)).count();
    let secs = start.elapsed().as_secs_f64();
    known(
        literal != direct,
        brute_vs_solver && ext_ok == extended.len() && secs < 60.0,
        "at h=2 the only encodable configurations have head 0 and |w|<=1, so no accepting hop of the toy machine can be written down",
        format!(
            "h=2 toy: brute force {literal}, atm_accepts {direct}; h=2 random: {}/{} agree; h=3 override: {ext_ok}/{} agree ({accepting} accepting); brute force = solver: {brute_vs_solver}; {secs:.2}s",
            literal_random.0,
            literal_random.1,
            extended.len()
        ),
    )
}

// ---- 7 ----

fn c7(log: &CostLog) -> Outcome {
    let toy = toy_atm();
    let vi = toy_verifier(&toy, Some(3));
    let h = 3;
    let trail = vi.alph.trail();
    let syms: Vec<BarSym> = (0..vi.alph.size() as BarSym).filter(|&x| x != trail).collect();
    let mut checked = 0;
    let mut bad = 0;
    let mut evaluated = 0u64;
    for u1 in verifier::representatives(&vi, 1, None, h * h) {
        let rec = verifier::macrostep(&vi, 1, None, &u1);
        let reason_ok = match &rec.outcome {
            StepOutcome::Carry(_) => true,
            StepOutcome::Accept(r) | StepOutcome::Reject(r) => matches!(r, verifier::StepReason::AcceptState | verifier::StepReason::RejectState),
        };
        if !reason_ok {
            continue;
        }
        let PathDecode::Path { configs, .. } = codec::decode_path(&toy, &vi.alph, &u1, h) else {
            continue;
        };
        let last = configs.last().unwrap();
        let budget = (h - (configs.len() - 1)) as u64;
        let label = atm::atm_label(&toy, last, budget);
        // ∀u₂: only the cells before the first trail are ever read
        let count = AtomicU64::new(0);
        let all = std::iter::once(None).chain(syms.iter().copied().map(Some)).collect::<Vec<_>>().par_iter().all(|first| {
            let mut buf = vec![trail; h * h];
            let mut f = |u2: &[BarSym]| {
                count.fetch_add(1, Ordering::Relaxed);
                let tapes = vec![u1.clone(), u2.to_vec(), vec![], vec![], vec![]];
                log.run(&vi, &tapes).0 == VerifierVerdict::Accept
            };
            match first {
                None => f(&buf),
                Some(x) => {
                    buf[0] = *x;
                    !prenex::walk_prefixes(&mut buf, 1, h * h, &syms, trail, false, &mut f)
                }
            }
        });
        evaluated += count.load(Ordering::Relaxed);
        checked += 1;
        if all != (label == Label::Acc) {
            bad += 1;
        }
    }
    outcome(checked > 0 && bad == 0, format!("{checked} one-hop prefixes, {evaluated} residual words, {bad} mismatches"))
}

// ---- 8 ----

fn c8() -> Outcome {
    let mut checked = 0;
    let mut bad = 0;
    for len in 1..=6 {
        for bits in 0..1u32 << (len - 1) {
            let qs: Vec<Quantifier> = std::iter::once(Quantifier::Exists)
                .chain((0..len - 1).map(|i| if bits >> i & 1 == 1 { Quantifier::Forall } else { Quantifier::Exists }))
                .collect();
            let mut changes = 0;
            for i in 1..qs.len() {
                if qs[i] != qs[i - 1] {
                    changes += 1;
                }
            }
            checked += 1;
            if prenex::altern(&qs) != 1 + changes || QuantifierPrefix::new(qs).is_err() {
                bad += 1;
            }
        }
    }
    outcome(bad == 0 && checked == 63, format!("{checked} prefixes, {bad} mismatches"))
}

// ---- 9 ----

fn c9() -> Outcome {
    let mut rng = gen::rng(9);
    let prefixes = ["EA", "EE", "EAE", "EAA", "EEA"];
    let mut bad = 0;
    let mut trues = 0;
    for i in 0..50 {
        let p: QuantifierPrefix = prefixes[i % prefixes.len()].parse().unwrap();
        let extra = rng.gen_range(1..3);
        let d = gen::random_dtm(&mut rng, p.len(), &['_', '0', '1'], extra, false);
        let l = rng.gen_range(0..=2);
        let t = rng.gen_range(0..=6);
        let b = SolveBounds::Override { word_length: l, time: t };
        let m = Machine::Table(d);
        let fast = prenex::solve_with_prefix(&m, p.as_slice(), 1, b, &SolveOptions::default()).unwrap();
        let slow = prenex::solve_naive(&m, p.as_slice(), 1, b, &SolveOptions::default()).unwrap();
        trues += usize::from(slow);
        bad += usize::from(fast != slow);
    }
    outcome(bad == 0, format!("50 machines ({trues} true), {bad} mismatches"))
}

// ---- 10 ----

fn c10() -> Outcome {
    let mut rng = gen::rng(10);
    let opts = TilingOptions::default();
    let (mut calls, mut bad, mut found) = (0, 0, 0);
    for _ in 0..100 {
        let tiles = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=2);
        let density = rng.gen_range(0.4..0.9);
        let t0 = rng.gen_range(1..=tiles);
        let sys = gen::random_tiling_system(&mut rng, tiles, t0, n, density);
        let rows: Vec<Vec<usize>> = words(sys.initial.len(), 2).into_iter().map(|w| w.iter().map(|&x| sys.initial[x as usize]).collect()).collect();
        let tuples: Vec<Vec<Vec<usize>>> = if n == 1 {
            rows.iter().map(|r| vec![r.clone()]).collect()
        } else {
            rows.iter().flat_map(|a| rows.iter().map(move |b| vec![a.clone(), b.clone()])).collect()
        };
        for t in &tuples {
            let fast = tiling::exists_tiling(&sys, 2, t).unwrap();
            let slow = tiling::exists_tiling_naive(&sys, 2, t, &opts).unwrap();
            calls += 1;
            found += usize::from(slow);
            bad += usize::from(fast != slow);
        }
    }
    let mut qbad = 0;
    let mut qtrue = 0;
    for _ in 0..100 {
        let tiles = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=2);
        let t0 = rng.gen_range(1..=tiles.min(2));
        let density = rng.gen_range(0.5..0.95);
        let sys = gen::random_tiling_system(&mut rng, tiles, t0, n, density);
        let prefix: Vec<Quantifier> = std::iter::once(Quantifier::Exists)
            .chain((1..n).map(|_| if rng.gen_bool(0.5) { Quantifier::Forall } else { Quantifier::Exists }))
            .collect();
        let fast = tiling::solve_quantified_tiling(&sys, &prefix, GridSide::Override(2), &opts).unwrap();
        let slow = tiling::solve_quantified_naive(&sys, &prefix, 2, &opts).unwrap();
        qtrue += usize::from(slow);
        qbad += usize::from(fast != slow);
    }
    outcome(
        bad == 0 && qbad == 0,
        format!("exists: {calls} row tuples over 100 systems ({found} tileable), {bad} mismatches; quantified: 100 systems ({qtrue} true), {qbad} mismatches"),
    )
}

// ---- 11 ----

fn c11() -> Outcome {
    let mut rng = gen::rng(11);
    let (mut bad, mut trues) = (0, 0);
    for i in 0..20 {
        let s = if i < 12 { 2 } else { 3 };
        let alphabet: &[char] = if i % 2 == 0 { &['_', '0', '1'] } else { &['_', '1'] };
        let extra = rng.gen_range(1..3);
        let d = gen::random_dtm(&mut rng, 2, alphabet, extra, false);
        let p = if rng.gen_bool(0.5) { "EA" } else { "EE" };
        let inst = PrenexInstance::new(p.parse().unwrap(), Machine::Table(d), 1).unwrap();
        let b = SolveBounds::Override { word_length: s, time: s as u64 };
        let direct = prenex::solve_prenex(&inst, b, &SolveOptions::default()).unwrap();
        let red = tiling::reduce_prenex_to_tiling(&inst, b, cap()).unwrap();
        let tiled = tiling::solve_quantified_tiling(&red.system, red.prefix.as_slice(), red.side, &TilingOptions::default()).unwrap();
        trues += usize::from(direct);
        bad += usize::from(direct != tiled);
    }

    let toy = toy_atm();
    let one = Polynomial::shaped(1, 1, 1).unwrap();
    let agree = |spec: &AtmSpec, h_override: Option<usize>| {
        let red = prenex::reduce_atm_to_prenex(spec, &[0], &Polynomial::identity(), &Polynomial::constant(2), 1, &one, h_override, cap()).unwrap();
        let Machine::Verifier(vi) = &red.instance.machine else { unreachable!() };
        let h = vi.h_exact().unwrap();
        let b = SolveBounds::Override { word_length: h * h, time: vi.worst_cost() };
        let got = prenex::solve_prenex(&red.instance, b, &SolveOptions::default()).unwrap();
        (got, atm::atm_accepts(spec, &[0], h as u64))
    };
    let literal = agree(&toy, None);
    let extended = agree(&toy, Some(3));

    let chain = prenex::inequality_chain(1, 11, 1, &one, &BigUint::from(2u32), cap()).unwrap();
    let chain_ok = chain.windows(2).all(|w| w[0] >= w[1]) && chain[0] >= chain[3];
    known(
        literal.0 != literal.1,
        bad == 0 && extended.0 == extended.1 && chain_ok,
        "same h=2 encoding limit as criterion 6",
        format!(
            "tiling: 20 instances ({trues} true), {bad} mismatches; toy at h=2: prenex {} vs atm {}; toy at h=3 override: prenex {} vs atm {}; chain {}",
            literal.0,
            literal.1,
            extended.0,
            extended.1,
            chain.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" >= ")
        ),
    )
}

fn main() {
    let started = Instant::now();
    let log = CostLog::default();
    let mut results: Vec<(usize, Outcome)> = Vec::new();
    let mut record = |n: usize, o: Outcome| {
        let line = match &o.status {
            Status::Pass => format!("criterion {n:>2}: PASS ({})", o.detail),
            Status::Fail => format!("criterion {n:>2}: FAIL ({})", o.detail),
            Status::Known(why) => format!("criterion {n:>2}: FAIL (known: {why}) ({})", o.detail),
        };
        println!("{line}");
        results.push((n, o));
    };
    record(1, c1());
    record(2, c2());
    record(3, c3(&log));
    record(4, c4(&log));
    let c6_out = c6(&log);
    let c7_out = c7(&log);
    let runs = log.runs.load(Ordering::Relaxed);
    let viol = log.violations.load(Ordering::Relaxed);
    record(5, outcome(viol == 0 && runs > 0, format!("{runs} verifier runs from criteria 3, 4, 6 and 7, {viol} over the bound")));
    record(6, c6_out);
    record(7, c7_out);
    record(8, c8());
    record(9, c9());
    record(10, c10());
    record(11, c11());
    println!("total {:.1}s", started.elapsed().as_secs_f64());
    let unexpected: Vec<usize> = results.iter().filter(|(_, o)| matches!(o.status, Status::Fail)).map(|(n, _)| *n).collect();
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
