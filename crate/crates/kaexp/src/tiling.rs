//! Multi-tiling systems: validation, existential and quantified solvers, and
//! a reduction from table-machine prenex instances.
//!
//! Grid positions are `(i, j)` with `i` the first coordinate. The initial
//! row is `f(0, ·)`, H relates `(i, j)` to `(i + 1, j)`, V relates `(i, j)`
//! to `(i, j + 1)`, and acceptance looks at `f_n(s - 1, ·)`.

use crate::arith::{self, ArithError, ResourceCap};
use crate::dtm::{Dir, DtmSpec, Move};
use crate::prenex::{Machine, PrenexInstance, Quantifier, QuantifierPrefix, SolveBounds};
use crate::{StateId, Sym};
use rayon::prelude::*;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TilingError {
    #[error("tiling shape does not match the system and side")]
    ShapeMismatch,
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Successor lists, sorted, one per tile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    succ: Vec<Vec<u32>>,
}

impl Relation {
    pub fn from_pairs(tiles: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut succ = vec![Vec::new(); tiles];
        for (a, b) in pairs {
            succ[a].push(b as u32);
        }
        for s in &mut succ {
            s.sort_unstable();
            s.dedup();
        }
        Relation { succ }
    }

    pub fn full(tiles: usize) -> Self {
        Relation::from_pairs(tiles, (0..tiles).flat_map(|a| (0..tiles).map(move |b| (a, b))))
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.succ[a].binary_search(&(b as u32)).is_ok()
    }

    pub fn successors(&self, a: usize) -> &[u32] {
        &self.succ[a]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(a, s)| s.iter().map(move |&b| (a, b as usize)))
    }

    pub fn len(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiTilingSystem {
    pub tiles: Vec<String>,
    pub initial: Vec<usize>,
    pub accepting: Vec<usize>,
    pub h: Relation,
    pub v: Relation,
    pub m: Relation,
    pub n: usize,
    pub k: u32,
    is_init: Vec<bool>,
    is_acc: Vec<bool>,
}

impl MultiTilingSystem {
    pub fn new(
        tiles: Vec<String>,
        mut initial: Vec<usize>,
        mut accepting: Vec<usize>,
        h: Relation,
        v: Relation,
        m: Relation,
        n: usize,
        k: u32,
    ) -> Result<Self, TilingError> {
        let t = tiles.len();
        if n == 0 {
            return Err(TilingError::BadParameters("dimension must be positive".into()));
        }
        if initial.iter().chain(&accepting).any(|&x| x >= t) {
            return Err(TilingError::BadParameters("tile index out of range".into()));
        }
        for r in [&h, &v, &m] {
            if r.succ.len() != t || r.pairs().any(|(_, b)| b >= t) {
                return Err(TilingError::BadParameters("relation over a different tile set".into()));
            }
        }
        initial.sort_unstable();
        initial.dedup();
        accepting.sort_unstable();
        accepting.dedup();
        let mut is_init = vec![false; t];
        initial.iter().for_each(|&x| is_init[x] = true);
        let mut is_acc = vec![false; t];
        accepting.iter().for_each(|&x| is_acc[x] = true);
        Ok(MultiTilingSystem {
            tiles,
            initial,
            accepting,
            h,
            v,
            m,
            n,
            k,
            is_init,
            is_acc,
        })
    }

    pub fn tile_count(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_initial(&self, x: usize) -> bool {
        self.is_init[x]
    }

    pub fn is_accepting(&self, x: usize) -> bool {
        self.is_acc[x]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridSide {
    Canonical,
    Override(usize),
}

impl GridSide {
    pub fn resolve(&self, k: u32, n: usize, cap: ResourceCap) -> Result<usize, TilingError> {
        match *self {
            GridSide::Override(s) if s >= 1 => Ok(s),
            GridSide::Override(_) => Err(TilingError::BadParameters("side must be positive".into())),
            GridSide::Canonical => Ok(arith::tetra_usize(k, n as u64, cap)?),
        }
    }
}

/// `layers[l][i][j]` is the tile of layer `l + 1` at `(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tiling {
    pub layers: Vec<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    Maps,
    Init,
    Acc,
    Hori,
    Vert,
    Multi,
}

/// Position as (layer, i, j), layer 1-based.
pub type Position = (usize, usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub failures: Vec<(Condition, Option<Position>)>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failed(&self, c: Condition) -> bool {
        self.failures.iter().any(|(x, _)| *x == c)
    }
}

pub fn validate_tiling(sys: &MultiTilingSystem, s: usize, t: &Tiling) -> Result<ValidationReport, TilingError> {
    if t.layers.len() != sys.n || t.layers.iter().any(|l| l.len() != s || l.iter().any(|r| r.len() != s)) {
        return Err(TilingError::ShapeMismatch);
    }
    let mut rep = ValidationReport::default();
    let nt = sys.tile_count();
    let f = |l: usize, i: usize, j: usize| t.layers[l][i][j];
    let cells = || (0..sys.n).flat_map(move |l| (0..s).flat_map(move |i| (0..s).map(move |j| (l, i, j))));
    if let Some((l, i, j)) = cells().find(|&(l, i, j)| f(l, i, j) >= nt) {
        rep.failures.push((Condition::Maps, Some((l + 1, i, j))));
        return Ok(rep);
    }
    let first = |c: Condition, it: &mut dyn Iterator<Item = (usize, usize, usize)>, rep: &mut ValidationReport| {
        if let Some((l, i, j)) = it.next() {
            rep.failures.push((c, Some((l + 1, i, j))));
        }
    };
    first(
        Condition::Init,
        &mut (0..sys.n).flat_map(|l| (0..s).map(move |j| (l, 0, j))).filter(|&(l, i, j)| !sys.is_initial(f(l, i, j))),
        &mut rep,
    );
    if !(0..s).any(|j| sys.is_accepting(f(sys.n - 1, s - 1, j))) {
        rep.failures.push((Condition::Acc, None));
    }
    first(
        Condition::Hori,
        &mut cells().filter(|&(l, i, j)| i + 1 < s && !sys.h.contains(f(l, i, j), f(l, i + 1, j))),
        &mut rep,
    );
    first(
        Condition::Vert,
        &mut cells().filter(|&(l, i, j)| j + 1 < s && !sys.v.contains(f(l, i, j), f(l, i, j + 1))),
        &mut rep,
    );
    first(
        Condition::Multi,
        &mut cells().filter(|&(l, i, j)| l + 1 < sys.n && !sys.m.contains(f(l, i, j), f(l + 1, i, j))),
        &mut rep,
    );
    Ok(rep)
}

#[derive(Debug, Clone, Copy)]
pub struct TilingOptions {
    pub cap: ResourceCap,
    /// largest |T0|^s the quantified solver will enumerate per layer
    pub max_branching: u64,
    /// largest assignment count the naive oracle will enumerate
    pub max_naive: u64,
    pub parallel: bool,
}

impl Default for TilingOptions {
    fn default() -> Self {
        TilingOptions {
            cap: ResourceCap::default(),
            max_branching: 1 << 20,
            max_naive: 1 << 24,
            parallel: true,
        }
    }
}

fn check_rows(sys: &MultiTilingSystem, s: usize, rows: &[Vec<usize>]) -> Result<bool, TilingError> {
    if rows.len() != sys.n || rows.iter().any(|r| r.len() != s) {
        return Err(TilingError::ShapeMismatch);
    }
    Ok(rows.iter().flatten().all(|&x| x < sys.tile_count() && sys.is_initial(x)))
}

/// Backtracking search, cells in row-major order with layers innermost.
pub fn exists_tiling(sys: &MultiTilingSystem, s: usize, rows: &[Vec<usize>]) -> Result<bool, TilingError> {
    if !check_rows(sys, s, rows)? {
        return Ok(false);
    }
    let n = sys.n;
    let mut grid = vec![vec![vec![usize::MAX; s]; s]; n];
    for l in 0..n {
        grid[l][0].clone_from(&rows[l]);
        for j in 0..s {
            if j + 1 < s && !sys.v.contains(rows[l][j], rows[l][j + 1]) {
                return Ok(false);
            }
            if l + 1 < n && !sys.m.contains(rows[l][j], rows[l + 1][j]) {
                return Ok(false);
            }
        }
    }
    if s == 1 {
        return Ok(sys.is_accepting(grid[n - 1][0][0]));
    }
    Ok(search(sys, s, &mut grid, s * n))
}

fn search(sys: &MultiTilingSystem, s: usize, grid: &mut [Vec<Vec<usize>>], idx: usize) -> bool {
    let n = sys.n;
    if idx == s * s * n {
        return (0..s).any(|j| sys.is_accepting(grid[n - 1][s - 1][j]));
    }
    let l = idx % n;
    let j = (idx / n) % s;
    let i = idx / (n * s);
    let above = grid[l][i - 1][j];
    let cands: &[u32] = if l > 0 {
        sys.m.successors(grid[l - 1][i][j])
    } else {
        sys.h.successors(above)
    };
    for &y in cands {
        let y = y as usize;
        if l > 0 && !sys.h.contains(above, y) {
            continue;
        }
        if j > 0 && !sys.v.contains(grid[l][i][j - 1], y) {
            continue;
        }
        grid[l][i][j] = y;
        if search(sys, s, grid, idx + 1) {
            return true;
        }
    }
    grid[l][i][j] = usize::MAX;
    false
}

/// Every assignment of the whole grid, filtered by the initial rows.
pub fn exists_tiling_naive(sys: &MultiTilingSystem, s: usize, rows: &[Vec<usize>], opts: &TilingOptions) -> Result<bool, TilingError> {
    if rows.len() != sys.n || rows.iter().any(|r| r.len() != s) {
        return Err(TilingError::ShapeMismatch);
    }
    let cells = sys.n * s * s;
    let t = sys.tile_count() as u64;
    if t.checked_pow(cells as u32).map_or(true, |c| c > opts.max_naive) {
        return Err(TilingError::ResourceLimit(format!("{t}^{cells} assignments")));
    }
    if t == 0 {
        return Ok(false);
    }
    let mut flat = vec![0usize; cells];
    loop {
        let tiling = Tiling {
            layers: (0..sys.n)
                .map(|l| (0..s).map(|i| flat[(l * s + i) * s..(l * s + i + 1) * s].to_vec()).collect())
                .collect(),
        };
        let init_matches = (0..sys.n).all(|l| tiling.layers[l][0] == rows[l]);
        if init_matches && validate_tiling(sys, s, &tiling)?.is_valid() {
            return Ok(true);
        }
        let mut k = cells;
        loop {
            if k == 0 {
                return Ok(false);
            }
            k -= 1;
            flat[k] += 1;
            if (flat[k] as u64) < t {
                break;
            }
            flat[k] = 0;
        }
    }
}

fn row_choices(sys: &MultiTilingSystem, s: usize, limit: u64) -> Result<Vec<Vec<usize>>, TilingError> {
    let t0 = &sys.initial;
    let count = (t0.len() as u64).checked_pow(s as u32).filter(|&c| c <= limit);
    if count.is_none() {
        return Err(TilingError::ResourceLimit(format!("{}^{s} initial rows", t0.len())));
    }
    let mut out = vec![vec![]];
    for _ in 0..s {
        out = out
            .into_iter()
            .flat_map(|r: Vec<usize>| {
                t0.iter().map(move |&x| {
                    let mut r = r.clone();
                    r.push(x);
                    r
                })
            })
            .collect();
    }
    Ok(out)
}

pub fn solve_quantified_tiling(sys: &MultiTilingSystem, prefix: &[Quantifier], side: GridSide, opts: &TilingOptions) -> Result<bool, TilingError> {
    if prefix.len() != sys.n {
        return Err(TilingError::BadParameters("prefix length differs from dimension".into()));
    }
    let s = side.resolve(sys.k, sys.n, opts.cap)?;
    let choices = row_choices(sys, s, opts.max_branching)?;
    let mut rows = Vec::with_capacity(sys.n);
    quantified(sys, prefix, s, &choices, &mut rows, opts.parallel)
}

fn quantified(
    sys: &MultiTilingSystem,
    prefix: &[Quantifier],
    s: usize,
    choices: &[Vec<usize>],
    rows: &mut Vec<Vec<usize>>,
    parallel: bool,
) -> Result<bool, TilingError> {
    let l = rows.len();
    if l == sys.n {
        return exists_tiling(sys, s, rows);
    }
    let branch = |r: &Vec<usize>| {
        let mut local = rows.clone();
        local.push(r.clone());
        quantified(sys, prefix, s, choices, &mut local, false).expect("shapes checked")
    };
    Ok(match (prefix[l], parallel && l == 0) {
        (Quantifier::Exists, true) => choices.par_iter().any(branch),
        (Quantifier::Forall, true) => choices.par_iter().all(branch),
        (Quantifier::Exists, false) => choices.iter().any(branch),
        (Quantifier::Forall, false) => choices.iter().all(branch),
    })
}

/// Exhaustive evaluation of every row tuple with the naive existential oracle.
pub fn solve_quantified_naive(sys: &MultiTilingSystem, prefix: &[Quantifier], s: usize, opts: &TilingOptions) -> Result<bool, TilingError> {
    if prefix.len() != sys.n {
        return Err(TilingError::BadParameters("prefix length differs from dimension".into()));
    }
    let choices = row_choices(sys, s, opts.max_branching)?;
    fn rec(sys: &MultiTilingSystem, prefix: &[Quantifier], s: usize, choices: &[Vec<usize>], rows: &mut Vec<Vec<usize>>, opts: &TilingOptions) -> Result<bool, TilingError> {
        let l = rows.len();
        if l == sys.n {
            return exists_tiling_naive(sys, s, rows, opts);
        }
        let mut vals = Vec::with_capacity(choices.len());
        for r in choices {
            rows.push(r.clone());
            vals.push(rec(sys, prefix, s, choices, rows, opts)?);
            rows.pop();
        }
        Ok(match prefix[l] {
            Quantifier::Exists => vals.iter().any(|&v| v),
            Quantifier::Forall => vals.iter().all(|&v| v),
        })
    }
    rec(sys, prefix, s, &choices, &mut Vec::new(), opts)
}

// ---------------------------------------------------------------------------
// Reduction from table machines.
//
// Row 0 of every layer holds plain tiles, one per tape symbol. Row i >= 1 of
// layer l describes tape l at time i. Shared annotations (synchronised by M)
// track the head, the diagonal zone and acceptance:
//
//   zone: In* D OD OP* per row, with D at column i - 1 in row i. The only
//         accepting tile is a rightmost OD tile on the last row, which pins
//         D to the diagonal and hence the origin tile to (1, 0).
//   edge: column 0 of rows >= 1 (the origin is an edge tile and H copies the
//         flag down); used for the left-edge rule.
//   rightmost: last column, copied down by H.
//   head/out: the head at this cell, or the head that left it during the
//         previous step; V links `out` with the neighbour's arrival.
//   acc_here/acc_seen: whether the head here is (or is about to be) in the
//         accepting state, OR-ed left to right on the last layer.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Zone {
    In,
    D,
    OD,
    OP,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Arr {
    Stay,
    FromLeft,
    FromRight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Head {
    q: StateId,
    tape: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Out {
    Right(Head),
    Left(Head),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Cell {
    layer: usize,
    sym: Sym,
    zone: Zone,
    edge: bool,
    rightmost: bool,
    head: Option<(Head, Arr)>,
    out: Option<Out>,
    init: Option<Sym>,
    acc_here: bool,
    acc_seen: bool,
}

impl Cell {
    fn shared(&self) -> (Zone, bool, bool, Option<(Head, Arr)>, Option<Out>, Option<Sym>, bool) {
        (self.zone, self.edge, self.rightmost, self.head, self.out, self.init, self.acc_here)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum RTile {
    Plain(Sym),
    Cell(Cell),
}

enum Effect {
    Stay(Head),
    Move(Dir, Head, Sym),
}

fn effect(d: &DtmSpec, q: StateId, tape: usize, a: Sym, edge: bool) -> Effect {
    match d.delta(q, a) {
        Move::Jump { next, tape } => Effect::Stay(Head { q: next, tape }),
        Move::Ordinary { dir: Dir::Left, .. } if edge => Effect::Stay(Head { q: d.reject, tape: 1 }),
        Move::Ordinary { next, write, dir } => Effect::Move(dir, Head { q: next, tape }, write),
    }
}

fn accepting_soon(d: &DtmSpec, q: StateId, tape: usize, a: Sym, edge: bool) -> bool {
    q == d.accept
        || match effect(d, q, tape, a, edge) {
            Effect::Stay(h) | Effect::Move(_, h, _) => h.q == d.accept,
        }
}

struct Gadget<'a> {
    d: &'a DtmSpec,
    n: usize,
}

impl Gadget<'_> {
    fn cell_ok(&self, c: &Cell) -> bool {
        if c.edge && c.rightmost {
            return false;
        }
        if c.edge && !matches!(c.zone, Zone::D | Zone::In) {
            return false;
        }
        if c.rightmost && !matches!(c.zone, Zone::OD | Zone::OP) {
            return false;
        }
        if c.init.is_some() && !(c.zone == Zone::D && c.edge) {
            return false;
        }
        if c.head.is_some() && c.out.is_some() {
            return false;
        }
        if c.edge && (matches!(c.head, Some((_, Arr::FromLeft))) || matches!(c.out, Some(Out::Left(_)))) {
            return false;
        }
        if c.rightmost && (matches!(c.head, Some((_, Arr::FromRight))) || matches!(c.out, Some(Out::Right(_)))) {
            return false;
        }
        match c.head {
            None if c.acc_here => return false,
            Some((h, _)) if h.tape == c.layer => {
                if c.acc_here != accepting_soon(self.d, h.q, h.tape, c.sym, c.edge) {
                    return false;
                }
            }
            _ => {}
        }
        if c.layer < self.n && c.acc_seen {
            return false;
        }
        if c.layer == self.n && c.edge && c.acc_seen != c.acc_here {
            return false;
        }
        true
    }

    fn tiles(&self) -> Vec<RTile> {
        let d = self.d;
        let syms: Vec<Sym> = (0..d.symbol_count() as Sym).collect();
        let mut heads = Vec::new();
        for q in 0..d.states.len() {
            for tape in 1..=self.n {
                heads.push(Head { q, tape });
            }
        }
        let mut motion: Vec<(Option<(Head, Arr)>, Option<Out>)> = vec![(None, None)];
        for &h in &heads {
            for arr in [Arr::Stay, Arr::FromLeft, Arr::FromRight] {
                motion.push((Some((h, arr)), None));
            }
            motion.push((None, Some(Out::Right(h))));
            motion.push((None, Some(Out::Left(h))));
        }
        let mut frames: Vec<(Zone, bool, bool, Option<Sym>)> = Vec::new();
        for zone in [Zone::In, Zone::D, Zone::OD, Zone::OP] {
            for (edge, rightmost) in [(false, false), (true, false), (false, true)] {
                frames.push((zone, edge, rightmost, None));
                if zone == Zone::D && edge {
                    for &a in &syms {
                        frames.push((zone, edge, rightmost, Some(a)));
                    }
                }
            }
        }
        let mut out: Vec<RTile> = syms.iter().map(|&a| RTile::Plain(a)).collect();
        for layer in 1..=self.n {
            for &sym in &syms {
                for &(zone, edge, rightmost, init) in &frames {
                    for &(head, o) in &motion {
                        for acc_here in [false, true] {
                            for acc_seen in [false, true] {
                                let c = Cell {
                                    layer,
                                    sym,
                                    zone,
                                    edge,
                                    rightmost,
                                    head,
                                    out: o,
                                    init,
                                    acc_here,
                                    acc_seen,
                                };
                                if self.cell_ok(&c) {
                                    out.push(RTile::Cell(c));
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn expect(&self, y: &Cell, x_sym: Sym, eff: Effect) -> bool {
        match eff {
            Effect::Stay(h) => y.sym == x_sym && y.head == Some((h, Arr::Stay)) && y.out.is_none(),
            Effect::Move(dir, h, b) => {
                let sym = if y.layer == h.tape { b } else { x_sym };
                let o = match dir {
                    Dir::Right => Out::Right(h),
                    Dir::Left => Out::Left(h),
                };
                y.sym == sym && y.head.is_none() && y.out == Some(o)
            }
        }
    }

    fn h_ok(&self, x: &RTile, y: &RTile) -> bool {
        let RTile::Cell(y) = y else {
            return false;
        };
        match x {
            RTile::Plain(a) => {
                if y.edge != (y.zone == Zone::D) || !matches!(y.zone, Zone::D | Zone::OD | Zone::OP) {
                    return false;
                }
                match y.init {
                    Some(c1) => {
                        if y.layer == 1 && *a != c1 {
                            return false;
                        }
                        // tape 1 is the only tape written by the first step
                        self.expect(y, *a, effect(self.d, self.d.init, 1, c1, true))
                    }
                    None => {
                        y.zone != Zone::D
                            && y.sym == *a
                            && y.out.is_none()
                            && !matches!(y.head, Some((_, Arr::Stay)))
                    }
                }
            }
            RTile::Cell(x) => {
                let zone_ok = matches!(
                    (x.zone, y.zone),
                    (Zone::In, Zone::In) | (Zone::D, Zone::In) | (Zone::OD, Zone::D) | (Zone::OP, Zone::OD) | (Zone::OP, Zone::OP)
                );
                if !zone_ok || x.layer != y.layer || x.edge != y.edge || x.rightmost != y.rightmost || y.init.is_some() {
                    return false;
                }
                match x.head {
                    Some((h, _)) if h.tape == x.layer => self.expect(y, x.sym, effect(self.d, h.q, h.tape, x.sym, x.edge)),
                    Some(_) => y.sym == x.sym && !matches!(y.head, Some((_, Arr::FromLeft | Arr::FromRight))),
                    None => y.sym == x.sym && y.out.is_none() && !matches!(y.head, Some((_, Arr::Stay))),
                }
            }
        }
    }

    fn v_ok(&self, x: &RTile, y: &RTile) -> bool {
        match (x, y) {
            (RTile::Plain(_), RTile::Plain(_)) => true,
            (RTile::Cell(x), RTile::Cell(y)) => {
                let zone_ok = matches!(
                    (x.zone, y.zone),
                    (Zone::In, Zone::In) | (Zone::In, Zone::D) | (Zone::D, Zone::OD) | (Zone::OD, Zone::OP) | (Zone::OP, Zone::OP)
                );
                if !zone_ok || x.layer != y.layer || x.rightmost || y.edge {
                    return false;
                }
                let rightward = match x.out {
                    Some(Out::Right(p)) => y.head == Some((p, Arr::FromLeft)),
                    _ => !matches!(y.head, Some((_, Arr::FromLeft))),
                };
                let leftward = match y.out {
                    Some(Out::Left(p)) => x.head == Some((p, Arr::FromRight)),
                    _ => !matches!(x.head, Some((_, Arr::FromRight))),
                };
                let acc = y.layer < self.n || y.acc_seen == (y.acc_here || x.acc_seen);
                rightward && leftward && acc
            }
            _ => false,
        }
    }

    fn m_ok(&self, x: &RTile, y: &RTile) -> bool {
        match (x, y) {
            (RTile::Plain(_), RTile::Plain(_)) => true,
            (RTile::Cell(x), RTile::Cell(y)) => y.layer == x.layer + 1 && x.shared() == y.shared(),
            _ => false,
        }
    }

    fn accepting(&self, t: &RTile) -> bool {
        matches!(t, RTile::Cell(c) if c.layer == self.n && c.rightmost && c.zone == Zone::OD && c.acc_seen)
    }
}

fn tile_name(d: &DtmSpec, t: &RTile) -> String {
    let head = |h: &Head| format!("{}@{}", d.states[h.q], h.tape);
    match t {
        RTile::Plain(a) => format!("P:{}", d.alphabet[*a as usize]),
        RTile::Cell(c) => {
            let mut s = format!("L{}:{}:{:?}", c.layer, d.alphabet[c.sym as usize], c.zone);
            if c.edge {
                s.push_str(":edge");
            }
            if c.rightmost {
                s.push_str(":right");
            }
            if let Some((h, a)) = &c.head {
                s.push_str(&format!(":head={}/{:?}", head(h), a));
            }
            match &c.out {
                Some(Out::Right(h)) => s.push_str(&format!(":out>{}", head(h))),
                Some(Out::Left(h)) => s.push_str(&format!(":out<{}", head(h))),
                None => {}
            }
            if let Some(a) = c.init {
                s.push_str(&format!(":init={}", d.alphabet[a as usize]));
            }
            if c.acc_here {
                s.push_str(":acc");
            }
            if c.acc_seen {
                s.push_str(":seen");
            }
            s
        }
    }
}

/// Tile system for a table machine; depends only on the machine and `k`.
pub fn machine_tiling_system(d: &DtmSpec, k: u32) -> MultiTilingSystem {
    let g = Gadget { d, n: d.tapes };
    let tiles = g.tiles();
    let nt = tiles.len();
    let layer_of = |t: &RTile| match t {
        RTile::Plain(_) => 0,
        RTile::Cell(c) => c.layer,
    };
    let mut by_layer: Vec<Vec<usize>> = vec![Vec::new(); d.tapes + 1];
    for (i, t) in tiles.iter().enumerate() {
        by_layer[layer_of(t)].push(i);
    }
    let mut by_shared: HashMap<(usize, _), Vec<usize>> = HashMap::new();
    for (i, t) in tiles.iter().enumerate() {
        if let RTile::Cell(c) = t {
            by_shared.entry((c.layer, c.shared())).or_default().push(i);
        }
    }
    let pairs_in = |x: usize, cands: &[usize], ok: &dyn Fn(&RTile, &RTile) -> bool| -> Vec<(usize, usize)> {
        cands.iter().filter(|&&y| ok(&tiles[x], &tiles[y])).map(|&y| (x, y)).collect()
    };
    let h_pairs: Vec<(usize, usize)> = (0..nt)
        .into_par_iter()
        .flat_map_iter(|x| {
            let cands: Vec<usize> = match &tiles[x] {
                RTile::Plain(_) => by_layer[1..].concat(),
                RTile::Cell(c) => by_layer[c.layer].clone(),
            };
            pairs_in(x, &cands, &|a, b| g.h_ok(a, b))
        })
        .collect();
    let v_pairs: Vec<(usize, usize)> = (0..nt)
        .into_par_iter()
        .flat_map_iter(|x| pairs_in(x, &by_layer[layer_of(&tiles[x])], &|a, b| g.v_ok(a, b)))
        .collect();
    let m_pairs: Vec<(usize, usize)> = (0..nt)
        .into_par_iter()
        .flat_map_iter(|x| {
            let cands: &[usize] = match &tiles[x] {
                RTile::Plain(_) => &by_layer[0],
                RTile::Cell(c) => by_shared.get(&(c.layer + 1, c.shared())).map_or(&[], |v| v.as_slice()),
            };
            pairs_in(x, cands, &|a, b| g.m_ok(a, b))
        })
        .collect();
    let initial: Vec<usize> = (0..nt).filter(|&i| matches!(tiles[i], RTile::Plain(_))).collect();
    let accepting: Vec<usize> = (0..nt).filter(|&i| g.accepting(&tiles[i])).collect();
    MultiTilingSystem::new(
        tiles.iter().map(|t| tile_name(d, t)).collect(),
        initial,
        accepting,
        Relation::from_pairs(nt, h_pairs),
        Relation::from_pairs(nt, v_pairs),
        Relation::from_pairs(nt, m_pairs),
        d.tapes,
        k,
    )
    .expect("generated system is well-formed")
}

#[derive(Debug, Clone)]
pub struct TilingReduction {
    pub system: MultiTilingSystem,
    pub prefix: QuantifierPrefix,
    pub side: GridSide,
}

/// Needs word length = time budget = side, at least 2. Initial tiles are
/// listed in alphabet order, so row words map symbol-for-symbol.
pub fn reduce_prenex_to_tiling(inst: &PrenexInstance, bounds: SolveBounds, cap: ResourceCap) -> Result<TilingReduction, TilingError> {
    let Machine::Table(d) = &inst.machine else {
        return Err(TilingError::BadParameters("only table machines can be reduced".into()));
    };
    let side = match bounds {
        SolveBounds::Canonical => {
            let s = arith::tetra_usize(inst.k, inst.n as u64, cap)?;
            if s < 2 {
                return Err(TilingError::BadParameters("side must be at least 2".into()));
            }
            GridSide::Canonical
        }
        SolveBounds::Override { word_length, time } => {
            if word_length as u64 != time || word_length < 2 {
                return Err(TilingError::BadParameters(
                    "the reduction needs word length = time budget >= 2".into(),
                ));
            }
            GridSide::Override(word_length)
        }
    };
    Ok(TilingReduction {
        system: machine_tiling_system(d, inst.k),
        prefix: inst.prefix.clone(),
        side,
    })
}
