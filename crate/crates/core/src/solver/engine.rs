//! Trail-based QDPLL search.
//!
//! Literals are coded as `2 * var + negated`. Every clause keeps counters
//! of true literals and of unassigned existential and universal literals,
//! so unit and conflict detection only rescans a clause once it has at most
//! one unassigned existential left.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::partition::DisjointSets;
use super::{Outcome, SolverConfig, SolverResult, SolverStats};
use crate::logic::{Lit, QbfProblem, Quantifier, VarId};

const NO_BLOCK: u32 = u32::MAX;
const MAX_KILLERS: usize = 8;

type Code = u32;

#[inline]
fn code(l: Lit) -> Code {
    (l.var().0 << 1) | u32::from(!l.is_positive())
}

#[inline]
fn var_of(c: Code) -> usize {
    (c >> 1) as usize
}

#[inline]
fn positive(c: Code) -> bool {
    c & 1 == 0
}

#[inline]
fn make(v: usize, pos: bool) -> Code {
    ((v as u32) << 1) | u32::from(!pos)
}

/// A node or time cap was reached.
struct Limit;

type Res<T> = Result<T, Limit>;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// QBF unit propagation with universal reduction.
    Qbf,
    /// Plain unit resolution treating every variable alike.
    Propositional,
}

enum Simplified {
    Conflict,
    Changed,
    Unchanged,
}

pub(crate) struct Engine<'a> {
    cfg: &'a SolverConfig,
    block: Vec<u32>,
    univ: Vec<bool>,
    outer_exists: bool,
    lits: Vec<Code>,
    start: Vec<usize>,
    occ: Vec<Vec<u32>>,
    val: Vec<i8>,
    num_true: Vec<u32>,
    free_e: Vec<u32>,
    free_u: Vec<u32>,
    trail: Vec<Code>,
    queue: Vec<Code>,
    conflict: bool,
    mode: Mode,
    witness: Vec<bool>,
    killers: Vec<Vec<Code>>,
    rng: ChaCha8Rng,
    stamp: Vec<u32>,
    epoch: u32,
    began: Instant,
    stats: SolverStats,
    tests_since_clock: u32,
}

impl<'a> Engine<'a> {
    pub(crate) fn new(q: &QbfProblem, cfg: &'a SolverConfig) -> Self {
        let n = q.num_vars() as usize + 1;
        let mut block = vec![NO_BLOCK; n];
        let mut univ = vec![false; n];
        for (i, b) in q.prefix().iter().enumerate() {
            for v in &b.vars {
                block[v.index()] = i as u32;
                univ[v.index()] = b.quantifier == Quantifier::Forall;
            }
        }
        let mut lits = Vec::with_capacity(q.num_literals());
        let mut start = Vec::with_capacity(q.num_clauses() + 1);
        let mut occ = vec![Vec::new(); 2 * n];
        for (ci, c) in q.matrix().iter().enumerate() {
            start.push(lits.len());
            for &l in c.lits() {
                lits.push(code(l));
                occ[code(l) as usize].push(ci as u32);
            }
        }
        start.push(lits.len());
        let m = q.num_clauses();
        let mut free_e = vec![0; m];
        let mut free_u = vec![0; m];
        for ci in 0..m {
            for &l in &lits[start[ci]..start[ci + 1]] {
                if univ[var_of(l)] {
                    free_u[ci] += 1;
                } else {
                    free_e[ci] += 1;
                }
            }
        }
        Engine {
            cfg,
            block,
            univ,
            outer_exists: q.prefix().first().map_or(false, |b| b.quantifier == Quantifier::Exists),
            lits,
            start,
            occ,
            val: vec![0; n],
            num_true: vec![0; m],
            free_e,
            free_u,
            trail: Vec::new(),
            queue: Vec::new(),
            conflict: false,
            mode: Mode::Qbf,
            witness: vec![false; n],
            killers: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            stamp: vec![0; n],
            epoch: 0,
            began: Instant::now(),
            stats: SolverStats::default(),
            tests_since_clock: 0,
        }
    }

    pub(crate) fn run(mut self, q: &QbfProblem) -> SolverResult {
        self.began = Instant::now();
        let m = self.num_true.len();
        let mut ok = true;
        for ci in 0..m {
            self.check(ci);
        }
        if self.conflict {
            ok = false;
        }
        ok = ok && self.propagate();
        let outcome = if !ok {
            Outcome::False
        } else {
            let scope: Vec<u32> = (0..m as u32).collect();
            match self.search(&scope) {
                Ok(true) => Outcome::True,
                Ok(false) => Outcome::False,
                Err(Limit) => Outcome::Unknown,
            }
        };
        self.stats.duration = self.began.elapsed();
        let witness = (outcome == Outcome::True && self.outer_exists).then(|| {
            q.prefix()[0].vars.iter().map(|v| v.lit(self.witness[v.index()])).collect()
        });
        SolverResult { outcome, witness, stats: self.stats }
    }

    fn clause(&self, ci: usize) -> &[Code] {
        &self.lits[self.start[ci]..self.start[ci + 1]]
    }

    #[inline]
    fn value(&self, c: Code) -> i8 {
        let v = self.val[var_of(c)];
        if positive(c) {
            v
        } else {
            -v
        }
    }

    /// Unit/conflict test for an unsatisfied clause.
    fn check(&mut self, ci: usize) {
        if self.num_true[ci] > 0 {
            return;
        }
        match self.mode {
            Mode::Qbf => {
                if self.free_e[ci] == 0 {
                    self.conflict = true;
                } else if self.free_e[ci] == 1 {
                    let (s, e) = (self.start[ci], self.start[ci + 1]);
                    let mut unit = None;
                    for &l in &self.lits[s..e] {
                        if self.val[var_of(l)] == 0 && !self.univ[var_of(l)] {
                            unit = Some(l);
                            break;
                        }
                    }
                    let unit = unit.expect("counter says one free existential");
                    let level = self.block[var_of(unit)];
                    let blocked = self.free_u[ci] > 0
                        && self.lits[s..e].iter().any(|&l| {
                            self.val[var_of(l)] == 0
                                && self.univ[var_of(l)]
                                && self.block[var_of(l)] < level
                        });
                    if !blocked {
                        self.queue.push(unit);
                    }
                }
            }
            Mode::Propositional => {
                let free = self.free_e[ci] + self.free_u[ci];
                if free == 0 {
                    self.conflict = true;
                } else if free == 1 {
                    let (s, e) = (self.start[ci], self.start[ci + 1]);
                    if let Some(&l) = self.lits[s..e].iter().find(|&&l| self.val[var_of(l)] == 0) {
                        self.queue.push(l);
                    }
                }
            }
        }
    }

    fn assign(&mut self, c: Code) {
        let v = var_of(c);
        self.val[v] = if positive(c) { 1 } else { -1 };
        self.trail.push(c);
        self.stats.propagations += 1;
        let is_univ = self.univ[v];
        for k in 0..self.occ[c as usize].len() {
            let ci = self.occ[c as usize][k] as usize;
            self.num_true[ci] += 1;
        }
        let neg = (c ^ 1) as usize;
        for k in 0..self.occ[neg].len() {
            let ci = self.occ[neg][k] as usize;
            if is_univ {
                self.free_u[ci] -= 1;
            } else {
                self.free_e[ci] -= 1;
            }
            if self.num_true[ci] == 0 {
                self.check(ci);
            }
        }
    }

    /// Assigns queued literals to a fixpoint. On conflict the queue is
    /// cleared and `false` returned; the trail keeps what was assigned.
    fn propagate(&mut self) -> bool {
        while let Some(c) = self.queue.pop() {
            if self.conflict {
                break;
            }
            match self.value(c) {
                1 => continue,
                -1 => {
                    self.conflict = true;
                    break;
                }
                _ => self.assign(c),
            }
        }
        if self.conflict {
            self.queue.clear();
            self.conflict = false;
            return false;
        }
        true
    }

    fn backtrack(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let c = self.trail.pop().unwrap();
            let v = var_of(c);
            self.val[v] = 0;
            let is_univ = self.univ[v];
            for k in 0..self.occ[c as usize].len() {
                let ci = self.occ[c as usize][k] as usize;
                self.num_true[ci] -= 1;
            }
            let neg = (c ^ 1) as usize;
            for k in 0..self.occ[neg].len() {
                let ci = self.occ[neg][k] as usize;
                if is_univ {
                    self.free_u[ci] += 1;
                } else {
                    self.free_e[ci] += 1;
                }
            }
        }
        self.queue.clear();
        self.conflict = false;
    }

    /// Asserts `lits` and propagates; on failure the trail is restored.
    fn try_assert(&mut self, lits: &[Code]) -> bool {
        let mark = self.trail.len();
        self.queue.extend_from_slice(lits);
        if self.propagate() {
            true
        } else {
            self.backtrack(mark);
            false
        }
    }

    /// Whether asserting `c` leads to a conflict; leaves no trace.
    fn fails(&mut self, c: Code, mode: Mode) -> Res<bool> {
        self.tick()?;
        let mark = self.trail.len();
        self.mode = mode;
        self.queue.push(c);
        let ok = self.propagate();
        self.backtrack(mark);
        self.mode = Mode::Qbf;
        Ok(!ok)
    }

    fn tick(&mut self) -> Res<()> {
        self.tests_since_clock += 1;
        if self.tests_since_clock >= 64 {
            self.tests_since_clock = 0;
            if let Some(cap) = self.cfg.time_cap {
                if self.began.elapsed() > cap {
                    return Err(Limit);
                }
            }
        }
        Ok(())
    }

    fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.epoch
    }

    /// Unsatisfied clauses of `scope`.
    fn live(&self, scope: &[u32]) -> Vec<u32> {
        scope.iter().copied().filter(|&ci| self.num_true[ci as usize] == 0).collect()
    }

    /// Unassigned variables of `live`, in ascending order.
    fn free_vars(&mut self, live: &[u32]) -> Vec<usize> {
        let e = self.next_epoch();
        let mut out = Vec::new();
        for &ci in live {
            let (s, t) = (self.start[ci as usize], self.start[ci as usize + 1]);
            for k in s..t {
                let v = var_of(self.lits[k]);
                if self.val[v] == 0 && self.stamp[v] != e {
                    self.stamp[v] = e;
                    out.push(v);
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn record_witness(&mut self) {
        if !self.outer_exists {
            return;
        }
        for &c in &self.trail {
            let v = var_of(c);
            if self.block[v] == 0 {
                self.witness[v] = positive(c);
            }
        }
    }

    fn record_killer(&mut self) {
        if !self.cfg.enable_universal_probing {
            return;
        }
        let k: Vec<Code> = self.trail.iter().copied().filter(|&c| self.univ[var_of(c)]).collect();
        if k.is_empty() || self.killers.contains(&k) {
            return;
        }
        if self.killers.len() == MAX_KILLERS {
            self.killers.remove(0);
        }
        self.killers.push(k);
    }

    fn search(&mut self, scope: &[u32]) -> Res<bool> {
        let mut live = self.live(scope);
        loop {
            if live.is_empty() {
                self.record_witness();
                return Ok(true);
            }
            match self.simplify(&live)? {
                Simplified::Conflict => {
                    self.record_killer();
                    return Ok(false);
                }
                Simplified::Changed => live = self.live(&live),
                Simplified::Unchanged => break,
            }
        }

        if self.cfg.enable_partitioning {
            let mut parts = self.components(&live);
            if parts.len() > 1 {
                parts.sort_by_key(|p| p.len());
                for part in parts {
                    let mark = self.trail.len();
                    let r = self.search(&part);
                    self.backtrack(mark);
                    if !r? {
                        return Ok(false);
                    }
                }
                return Ok(true);
            }
        }

        let (v, first) = self.choose(&live);
        self.stats.nodes += 1;
        if let Some(cap) = self.cfg.node_cap {
            if self.stats.nodes > cap {
                return Err(Limit);
            }
        }
        if let Some(cap) = self.cfg.time_cap {
            if self.began.elapsed() > cap {
                return Err(Limit);
            }
        }
        let is_univ = self.univ[v];
        let mark = self.trail.len();
        for pol in [first, !first] {
            self.queue.push(make(v, pol));
            let r = if self.propagate() {
                self.search(&live)
            } else {
                self.record_killer();
                Ok(false)
            };
            self.backtrack(mark);
            let r = r?;
            if is_univ && !r {
                return Ok(false);
            }
            if !is_univ && r {
                return Ok(true);
            }
        }
        Ok(is_univ)
    }

    /// Variable-disjoint groups of `live` clauses (over unassigned variables).
    fn components(&mut self, live: &[u32]) -> Vec<Vec<u32>> {
        let mut ds = DisjointSets::new(live.len());
        let mut owner: std::collections::HashMap<usize, u32> = std::collections::HashMap::new();
        for (i, &ci) in live.iter().enumerate() {
            let (s, t) = (self.start[ci as usize], self.start[ci as usize + 1]);
            for k in s..t {
                let v = var_of(self.lits[k]);
                if self.val[v] != 0 {
                    continue;
                }
                match owner.get(&v) {
                    Some(&j) => ds.union(i as u32, j),
                    None => {
                        owner.insert(v, i as u32);
                    }
                }
            }
        }
        let mut index = std::collections::HashMap::new();
        let mut out: Vec<Vec<u32>> = Vec::new();
        for (i, &ci) in live.iter().enumerate() {
            let root = ds.find(i as u32);
            let k = *index.entry(root).or_insert_with(|| {
                out.push(Vec::new());
                out.len() - 1
            });
            out[k].push(ci);
        }
        out
    }

    /// Outermost block with an unassigned variable in `live`.
    fn active_block(&self, vars: &[usize]) -> u32 {
        vars.iter().map(|&v| self.block[v]).min().unwrap_or(NO_BLOCK)
    }

    /// Branching variable: most live occurrences in the active block, ties
    /// to the lowest index (perturbed by the seed). Existentials first try
    /// the polarity with more occurrences, universals the one with fewer.
    fn choose(&mut self, live: &[u32]) -> (usize, bool) {
        let vars = self.free_vars(live);
        let active = self.active_block(&vars);
        let mut pos = std::collections::HashMap::<usize, (u32, u32)>::new();
        for &ci in live {
            for &l in self.clause(ci as usize) {
                let v = var_of(l);
                if self.val[v] == 0 && self.block[v] == active {
                    let e = pos.entry(v).or_default();
                    if positive(l) {
                        e.0 += 1;
                    } else {
                        e.1 += 1;
                    }
                }
            }
        }
        let seed = self.cfg.seed;
        let key = |v: usize| (v as u64) ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) & 0xffff;
        let (&v, &(p, n)) = pos
            .iter()
            .max_by(|a, b| {
                let (sa, sb) = (a.1 .0 + a.1 .1, b.1 .0 + b.1 .1);
                sa.cmp(&sb).then_with(|| key(*b.0).cmp(&key(*a.0)))
            })
            .expect("live clauses have an unassigned variable");
        let first = if self.univ[v] { p <= n } else { p >= n };
        (v, first)
    }

    /// Failed literals and universal probing to a fixpoint for this node.
    fn simplify(&mut self, live: &[u32]) -> Res<Simplified> {
        let cfg = self.cfg;
        if !(cfg.enable_failed_literal
            || cfg.enable_inner_failed_literal
            || cfg.enable_universal_probing)
        {
            return Ok(Simplified::Unchanged);
        }
        let vars = self.free_vars(live);
        let active = self.active_block(&vars);
        let active_exists = vars.iter().any(|&v| self.block[v] == active && !self.univ[v]);
        let mut changed = false;

        if cfg.enable_failed_literal {
            for &v in &vars {
                let outer = self.block[v] == active;
                if !(outer || self.univ[v]) {
                    continue;
                }
                for pol in [true, false] {
                    if self.val[v] != 0 {
                        break;
                    }
                    let c = make(v, pol);
                    if self.fails(c, Mode::Qbf)? {
                        if self.univ[v] {
                            // the universal player picks this value
                            return Ok(Simplified::Conflict);
                        }
                        if !self.try_assert(&[c ^ 1]) {
                            return Ok(Simplified::Conflict);
                        }
                        changed = true;
                    }
                }
            }
        }

        if cfg.enable_inner_failed_literal {
            for &v in &vars {
                if self.univ[v] || self.block[v] == active {
                    continue;
                }
                for pol in [true, false] {
                    if self.val[v] != 0 {
                        break;
                    }
                    let c = make(v, pol);
                    if self.fails(c, Mode::Propositional)? {
                        if !self.try_assert(&[c ^ 1]) {
                            return Ok(Simplified::Conflict);
                        }
                        changed = true;
                    }
                }
            }
        }

        if cfg.enable_universal_probing && active_exists {
            let probed: Vec<usize> = vars
                .iter()
                .copied()
                .filter(|&v| self.block[v] == active + 1 && self.univ[v] && self.val[v] == 0)
                .collect();
            if !probed.is_empty() {
                for probe in self.probes(&probed) {
                    match self.run_probe(&probe, active)? {
                        None => return Ok(Simplified::Conflict),
                        Some(forced) => {
                            for c in forced {
                                if self.value(c) == 1 {
                                    continue;
                                }
                                if !self.try_assert(&[c]) {
                                    return Ok(Simplified::Conflict);
                                }
                                changed = true;
                            }
                        }
                    }
                }
            }
        }
        Ok(if changed { Simplified::Changed } else { Simplified::Unchanged })
    }

    /// Probe patterns over the unassigned variables `probed` of the first
    /// universal block: all of them when there are few, otherwise recent
    /// counterexamples first, then a random pattern and its complement.
    fn probes(&mut self, probed: &[usize]) -> Vec<Vec<Code>> {
        if probed.len() <= self.cfg.full_probe_bits {
            return (0..1usize << probed.len())
                .map(|p| probed.iter().enumerate().map(|(k, &v)| make(v, p >> k & 1 == 0)).collect())
                .collect();
        }
        let budget = self.cfg.probe_budget;
        let e = self.next_epoch();
        for &v in probed {
            self.stamp[v] = e;
        }
        let mut out: Vec<Vec<Code>> = Vec::new();
        for k in self.killers.iter().rev() {
            if out.len() == budget {
                break;
            }
            let p: Vec<Code> =
                k.iter().copied().filter(|&c| self.stamp[var_of(c)] == e).collect();
            if !p.is_empty() && !out.contains(&p) {
                out.push(p);
            }
        }
        while out.len() < budget {
            let p: Vec<Code> = if out.len() % 2 == 1 && out.last().unwrap().len() == probed.len() {
                out.last().unwrap().iter().map(|c| c ^ 1).collect()
            } else {
                probed.iter().map(|&v| make(v, self.rng.gen_bool(0.5))).collect()
            };
            out.push(p);
        }
        out
    }

    /// Runs one probe. `None` means the probe itself is contradictory, so
    /// the node is false. Otherwise returns active-block literals that every
    /// winning assignment must satisfy.
    fn run_probe(&mut self, probe: &[Code], active: u32) -> Res<Option<Vec<Code>>> {
        self.tick()?;
        let mark = self.trail.len();
        self.queue.extend_from_slice(probe);
        if !self.propagate() {
            self.backtrack(mark);
            return Ok(None);
        }
        let mut forced: Vec<Code> = self.trail[mark..]
            .iter()
            .copied()
            .filter(|&c| self.block[var_of(c)] == active)
            .collect();
        if self.cfg.enable_failed_literal {
            let live: Vec<u32> = (0..self.num_true.len() as u32)
                .filter(|&ci| self.num_true[ci as usize] == 0)
                .collect();
            let vars = self.free_vars(&live);
            for v in vars {
                if self.block[v] != active || self.univ[v] {
                    continue;
                }
                for pol in [true, false] {
                    if self.val[v] != 0 {
                        break;
                    }
                    let c = make(v, pol);
                    if self.fails(c, Mode::Qbf)? {
                        forced.push(c ^ 1);
                        self.queue.push(c ^ 1);
                        if !self.propagate() {
                            self.backtrack(mark);
                            return Ok(None);
                        }
                    }
                }
            }
            forced = self.trail[mark..]
                .iter()
                .copied()
                .filter(|&c| self.block[var_of(c)] == active)
                .collect();
        }
        self.backtrack(mark);
        Ok(Some(forced))
    }
}

#[allow(dead_code)]
fn lit_of(c: Code) -> Lit {
    VarId(c >> 1).lit(positive(c))
}
