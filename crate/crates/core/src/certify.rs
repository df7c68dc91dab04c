//! Certification of simulated subshifts: for each target `S_i` and operator
//! `n`, find a depth `j` at which every locally admissible window of `X` maps
//! to an output window avoiding the first `b_i` forbidden patterns of `S_i`.
//!
//! Block-subsample operators whose code exposes a [`WindowReader`] are checked
//! exactly by a satisfiability search for a dirty admissible window; other
//! operators by explicit enumeration of admissible words.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::sync::Arc;
use alloc::vec::Vec;

use varisat::{ExtendFormula, Lit, Solver};

use crate::codec::{z_coords, z_index};
use crate::error::{Error, Result};
use crate::lang::{admissible_words_capped, BlockCode, Pat1, WindowReader};
use crate::oracle::{modulus_of_continuity, run_with, ModulusCaps, OperatorRegistry, OracleMachine};
use crate::pattern::{Letter, SubshiftSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClaimRecord {
    pub target: usize,
    pub operator: usize,
    pub b: usize,
    pub j: usize,
}

/// Precision per target: the largest span among its forbidden patterns, at
/// least 1.
pub fn build_b(g: &[SubshiftSpec]) -> Result<Vec<(usize, usize)>> {
    g.iter()
        .enumerate()
        .map(|(i, s)| {
            let bound = s.sft_bound.ok_or(Error::NotSft)?;
            let b = s.first(bound).iter().map(|p| p.span()).max().unwrap_or(1).max(1);
            Ok((i, b))
        })
        .collect()
}

/// Last operator input needed to read the output window `[-b, b]^d`.
pub fn r_b(b: usize, d: usize) -> u64 {
    let b = b as i64;
    let mut v = alloc::vec![-b; d];
    let mut best = 0;
    loop {
        best = best.max(z_index(&v));
        let mut k = 0;
        while k < d && v[k] == b {
            v[k] = -b;
            k += 1;
        }
        if k == d {
            return 2 + best;
        }
        v[k] += 1;
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Budgets {
    /// Largest `i + n + b + j` scheduled.
    pub max_sum: usize,
    /// Initial cap on explicitly enumerated windows; doubled on each retry.
    pub enum_cap: u64,
    pub step_budget: u64,
    pub modulus: ModulusCaps,
    /// Attempts of a parked tuple before it is dropped.
    pub max_attempts: u32,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_sum: 64,
            enum_cap: 1 << 20,
            step_budget: 1 << 16,
            modulus: ModulusCaps::default(),
            max_attempts: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Inner {
    Pass,
    /// Some admissible window has a dirty image; the window (cells `-j..=j`)
    /// when one was built.
    Fail { witness: Option<Vec<Letter>> },
    Exhausted,
}

/// Whether outputs on `[-b, b]` (index 0 is cell `-b`) leave `S`.
pub fn dirty(out: &[Letter], target: &SubshiftSpec, b: usize) -> bool {
    let s = target.alphabet.size();
    out.iter().any(|&l| l >= s) || target_patterns(target, b).iter().any(|p| p.occurs(out))
}

fn target_patterns(target: &SubshiftSpec, b: usize) -> Vec<Pat1> {
    target.first(b).iter().filter(|p| p.dimension() == 1).map(Pat1::from_pattern).collect()
}

/// Requirements `(output cell, letter)` on `[-b, b]` (index 0 is cell `-b`),
/// one of which holds exactly when the output is dirty.
fn dirt_goals(target: &SubshiftSpec, b: usize, out_size: u32) -> BTreeSet<Vec<(usize, Letter)>> {
    let cells = 2 * b + 1;
    let mut goals = BTreeSet::new();
    for q in target_patterns(target, b) {
        if q.span() > cells {
            continue;
        }
        for a in 0..=cells - q.span() {
            goals.insert(q.offs.iter().zip(&q.letters).map(|(&o, &l)| (a + o as usize, l)).collect());
        }
    }
    for c in 0..cells {
        for v in target.alphabet.size()..out_size {
            goals.insert(alloc::vec![(c, v)]);
        }
    }
    goals
}

/// Decodable class words of one decoder window, with the cells read.
struct Entries {
    list: Vec<(Vec<u8>, Vec<usize>)>,
}

const ENTRY_CAP: usize = 1 << 20;

fn entries(code: &BlockCode, reader: &dyn WindowReader) -> Result<Entries> {
    let width = 2 * code.radius + 1;
    let mut classes: Vec<u8> = (0..code.input.size()).map(|l| reader.class_of(l)).collect();
    classes.sort();
    classes.dedup();
    let mut list = Vec::new();
    let mut stack: Vec<Vec<u8>> = alloc::vec![Vec::new()];
    while let Some(pre) = stack.pop() {
        if pre.len() == width {
            if let Some(r) = reader.reads(&pre) {
                list.push((pre, r));
                if list.len() > ENTRY_CAP {
                    return Err(Error::CapExceeded { cap: ENTRY_CAP });
                }
            }
            continue;
        }
        for &c in classes.iter().rev() {
            let mut next = pre.clone();
            next.push(c);
            if reader.viable(&next) {
                stack.push(next);
            }
        }
    }
    list.sort();
    Ok(Entries { list })
}

/// Incremental formula for "a word on `[-J, J]` avoiding the first `J`
/// patterns of `X`". The clause for pattern `p` placed on cells `a..a+span`
/// is guarded by the literal of depth `max(p + 1, |a|, |a + span - 1|)`, so
/// assuming the guards of depths `1..=j` gives exactly the depth-`j` problem.
struct Formula {
    solver: Solver<'static>,
    s: u32,
    /// One-hot letter literals: `pos[x]` for cell `x >= 0`, `neg[x]` for `-1 - x`.
    pos: Vec<Vec<Lit>>,
    neg: Vec<Vec<Lit>>,
    guards: Vec<Lit>,
    pats: Vec<Option<Pat1>>,
    depth: usize,
    /// Window literals by (code, first cell, value).
    windows: BTreeMap<(usize, i64, Letter), Lit>,
}

impl Formula {
    fn new(s: u32) -> Self {
        Formula {
            solver: Solver::new(),
            s,
            pos: Vec::new(),
            neg: Vec::new(),
            guards: Vec::new(),
            pats: Vec::new(),
            depth: 0,
            windows: BTreeMap::new(),
        }
    }

    fn cell(&self, x: i64) -> &[Lit] {
        if x >= 0 {
            &self.pos[x as usize]
        } else {
            &self.neg[(-1 - x) as usize]
        }
    }

    fn new_cell(&mut self) -> Vec<Lit> {
        let v: Vec<Lit> = (0..self.s).map(|_| self.solver.new_lit()).collect();
        self.solver.add_clause(&v);
        for a in 0..v.len() {
            for b in a + 1..v.len() {
                self.solver.add_clause(&[!v[a], !v[b]]);
            }
        }
        v
    }

    fn extend(&mut self, x: &SubshiftSpec, j: usize) -> Result<()> {
        if j <= self.depth && !self.pos.is_empty() {
            return Ok(());
        }
        let old = self.depth;
        if self.pos.is_empty() {
            let c = self.new_cell();
            self.pos.push(c);
            let g = self.solver.new_lit();
            self.guards.push(g);
        }
        while self.pos.len() <= j {
            let c = self.new_cell();
            self.pos.push(c);
            let c = self.new_cell();
            self.neg.push(c);
            let g = self.solver.new_lit();
            self.guards.push(g);
        }
        for p in x.first(j).iter().skip(self.pats.len()) {
            if p.dimension() != 1 {
                return Err(Error::DimensionMismatch { expected: 1, found: p.dimension() });
            }
            let q = Pat1::from_pattern(p);
            self.pats.push(q.letters.iter().all(|&l| l < self.s).then_some(q));
        }
        let (jj, oo) = (j as i64, old as i64);
        let mut clause = Vec::new();
        for p in 0..self.pats.len().min(j) {
            let Some(q) = self.pats[p].clone() else { continue };
            let sp = q.span() as i64;
            if sp > 2 * jj + 1 {
                continue;
            }
            for a in -jj..=jj - sp + 1 {
                let d = ((p + 1) as i64).max(a.abs()).max((a + sp - 1).abs());
                if d <= oo {
                    continue;
                }
                clause.clear();
                clause.push(!self.guards[d as usize]);
                for (&o, &l) in q.offs.iter().zip(&q.letters) {
                    clause.push(!self.cell(a + o as i64)[l as usize]);
                }
                self.solver.add_clause(&clause);
            }
        }
        self.depth = j;
        Ok(())
    }

    /// A literal forcing the window on `lo..=lo+2r` to evaluate to `v`.
    fn window(&mut self, key: usize, ent: &Entries, reader: &dyn WindowReader, lo: i64, v: Letter) -> Lit {
        if let Some(&l) = self.windows.get(&(key, lo, v)) {
            return l;
        }
        let w = self.solver.new_lit();
        let mut any = alloc::vec![!w];
        let class_lits = |f: &Formula, x: i64, c: u8| -> Vec<Lit> {
            (0..f.s).filter(|&l| reader.class_of(l) == c).map(|l| f.cell(x)[l as usize]).collect()
        };
        for (cls, reads) in &ent.list {
            let n = reads.len();
            if n < 32 && (v as u64) >= 1u64 << n {
                continue;
            }
            let sel = self.solver.new_lit();
            any.push(sel);
            for (k, &c) in cls.iter().enumerate() {
                let x = lo + k as i64;
                let mut cl = alloc::vec![!sel];
                match reads.iter().position(|&r| r == k) {
                    Some(t) => {
                        let sh = n - 1 - t;
                        let bit = sh < 32 && (v >> sh) & 1 == 1;
                        // A class without letters for this bit leaves `!sel` alone.
                        cl.extend(reader.bit_letter(c, bit).map(|l| self.cell(x)[l as usize]));
                    }
                    None => cl.extend(class_lits(self, x, c)),
                }
                self.solver.add_clause(&cl);
            }
        }
        if v == 0 {
            // A window whose classes decode nowhere also evaluates to 0:
            // trie nodes are forced true along the window's class word.
            let undecodable = self.solver.new_lit();
            any.push(undecodable);
            let mut nodes: BTreeMap<&[u8], Lit> = BTreeMap::new();
            for (cls, _) in &ent.list {
                for k in 1..=cls.len() {
                    if nodes.contains_key(&cls[..k]) {
                        continue;
                    }
                    let node = self.solver.new_lit();
                    let parent = if k == 1 { None } else { Some(nodes[&cls[..k - 1]]) };
                    for lit in class_lits(self, lo + k as i64 - 1, cls[k - 1]) {
                        let mut cl = alloc::vec![!lit, node];
                        cl.extend(parent.map(|p| !p));
                        self.solver.add_clause(&cl);
                    }
                    nodes.insert(&cls[..k], node);
                }
                self.solver.add_clause(&[!undecodable, !nodes[cls.as_slice()]]);
            }
        }
        self.solver.add_clause(&any);
        self.windows.insert((key, lo, v), w);
        w
    }

    /// Satisfying word on `-j..=j` under the depth-`j` guards and `extra`.
    fn solve(&mut self, j: usize, extra: &[Lit]) -> Result<Option<Vec<Letter>>> {
        let mut assume: Vec<Lit> = self.guards[1..=j].to_vec();
        assume.extend_from_slice(extra);
        self.solver.assume(&assume);
        let sat = self.solver.solve().map_err(|_| Error::InvalidParams("solver failure"))?;
        if !sat {
            return Ok(None);
        }
        let model: BTreeSet<Lit> = self.solver.model().unwrap_or_default().into_iter().collect();
        let jj = j as i64;
        Ok(Some(
            (-jj..=jj)
                .map(|x| self.cell(x).iter().position(|l| model.contains(l)).unwrap_or(0) as Letter)
                .collect(),
        ))
    }
}

/// Search state for one `X`: the modulus cache, decoder tables and the
/// incremental formula.
pub struct Certifier {
    x: SubshiftSpec,
    entries: BTreeMap<usize, Arc<Entries>>,
    moduli: BTreeMap<(usize, u64), usize>,
    formula: Option<Formula>,
}

impl Certifier {
    pub fn new(x: SubshiftSpec) -> Self {
        Certifier { x, entries: BTreeMap::new(), moduli: BTreeMap::new(), formula: None }
    }

    pub fn x(&self) -> &SubshiftSpec {
        &self.x
    }

    /// Output header `input` of `op` on a one-dimensional input over `s` letters.
    fn header(op: &dyn OracleMachine, s: u32, input: u64, budget: u64) -> Result<u64> {
        run_with(op, input, budget, |q| match q {
            0 => Ok(s as u64),
            1 => Ok(1),
            _ => Err(Error::OutOfWindow),
        })
    }

    /// Modulus for operator `n` at precision `b`, cached.
    pub fn modulus(&mut self, registry: &OperatorRegistry, n: usize, b: usize, d: usize, caps: ModulusCaps) -> Result<usize> {
        let r = r_b(b, d);
        if let Some(&l) = self.moduli.get(&(n, r)) {
            return Ok(l);
        }
        let op = registry.get(n)?;
        let l = modulus_of_continuity(op.as_ref(), r, &self.x, caps)?.ell;
        self.moduli.insert((n, r), l);
        Ok(l)
    }

    /// The inner check at depth `j`: every word of length `2j+1` avoiding the
    /// first `j` patterns of `X` maps to a window on `[-b, b]` clean for
    /// `target`. `enum_cap` bounds explicit enumeration only.
    pub fn inner_check(
        &mut self,
        op: &dyn OracleMachine,
        target: &SubshiftSpec,
        b: usize,
        j: usize,
        budgets: &Budgets,
        enum_cap: u64,
    ) -> Result<Inner> {
        if self.x.dimension != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: self.x.dimension });
        }
        let out_dim = match Self::header(op, self.x.alphabet.size(), 1, budgets.step_budget) {
            Ok(d) => d,
            Err(Error::OutOfWindow) | Err(Error::BudgetExhausted { .. }) => return Ok(Inner::Fail { witness: None }),
            Err(e) => return Err(e),
        };
        if out_dim != target.dimension as u64 || target.dimension != 1 {
            return Ok(Inner::Fail { witness: None });
        }
        if let Some((code, stride)) = op.block_subsample() {
            if let Some(reader) = code.reader.clone() {
                return self.block_check(code, reader.as_ref(), stride, target, b, j);
            }
        }
        self.generic_check(op, target, b, j, budgets, enum_cap)
    }

    fn block_check(
        &mut self,
        code: &BlockCode,
        reader: &dyn WindowReader,
        stride: usize,
        target: &SubshiftSpec,
        b: usize,
        j: usize,
    ) -> Result<Inner> {
        let r = code.radius as i64;
        let (bi, jj) = (b as i64, j as i64);
        let lo_of = |c: i64| stride as i64 * c - r;
        if (-bi..=bi).any(|c| lo_of(c) < -jj || lo_of(c) + 2 * r > jj) {
            return Ok(Inner::Fail { witness: None });
        }
        let goals = dirt_goals(target, b, code.output.size());
        if goals.is_empty() {
            return Ok(Inner::Pass);
        }
        let key = Arc::as_ptr(code.reader.as_ref().expect("reader present")) as *const () as usize;
        let ent = match self.entries.get(&key) {
            Some(e) => e.clone(),
            None => {
                let e = Arc::new(entries(code, reader)?);
                self.entries.insert(key, e.clone());
                e
            }
        };
        let s = self.x.alphabet.size();
        let f = self.formula.get_or_insert_with(|| Formula::new(s));
        f.extend(&self.x, j)?;
        for goal in &goals {
            let lits: Vec<Lit> = goal.iter().map(|&(c, v)| f.window(key, &ent, reader, lo_of(c as i64 - bi), v)).collect();
            if let Some(w) = f.solve(j, &lits)? {
                let clean_input = f.pats.iter().take(j).flatten().all(|p| !p.occurs(&w));
                let out: Vec<Letter> =
                    (-bi..=bi).map(|c| code.eval(&w[(lo_of(c) + jj) as usize..][..2 * r as usize + 1])).collect();
                if !clean_input || !dirty(&out, target, b) {
                    return Err(Error::InvalidParams("solver witness failed re-verification"));
                }
                return Ok(Inner::Fail { witness: Some(w) });
            }
        }
        Ok(Inner::Pass)
    }

    fn generic_check(
        &mut self,
        op: &dyn OracleMachine,
        target: &SubshiftSpec,
        b: usize,
        j: usize,
        budgets: &Budgets,
        enum_cap: u64,
    ) -> Result<Inner> {
        let width = 2 * j + 1;
        let words = match admissible_words_capped(&self.x, width, j, enum_cap) {
            Ok(w) => w,
            Err(Error::BudgetExceeded { .. }) => return Ok(Inner::Exhausted),
            Err(e) => return Err(e),
        };
        let s = self.x.alphabet.size() as u64;
        let cells = 2 * b + 1;
        let last = r_b(b, 1);
        for w in words {
            let w = w.into_cells();
            let mut out = alloc::vec![0 as Letter; cells];
            for input in 2..=last {
                let cell = z_coords(input - 2, 1)[0];
                if cell.unsigned_abs() as usize > b {
                    continue;
                }
                let res = run_with(op, input, budgets.step_budget, |q| match q {
                    0 => Ok(s),
                    1 => Ok(1),
                    q => {
                        let c = z_coords(q - 2, 1)[0];
                        if c.unsigned_abs() as usize > j {
                            Err(Error::OutOfWindow)
                        } else {
                            Ok(w[(c + j as i64) as usize] as u64)
                        }
                    }
                });
                match res {
                    Ok(v) => out[(cell + b as i64) as usize] = v.min(u32::MAX as u64) as Letter,
                    Err(Error::OutOfWindow) => return Ok(Inner::Fail { witness: None }),
                    Err(Error::BudgetExhausted { .. }) => return Ok(Inner::Exhausted),
                    Err(e) => return Err(e),
                }
            }
            if dirty(&out, target, b) {
                return Ok(Inner::Fail { witness: Some(w) });
            }
        }
        Ok(Inner::Pass)
    }
}

/// Outcome of a bounded certification run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub claims: Vec<ClaimRecord>,
    /// Inner checks run, including retries.
    pub checked: usize,
    /// Tuples still parked, with their last enumeration cap.
    pub parked: Vec<(ClaimRecord, u64)>,
    /// Tuples dropped after exhausting their retries.
    pub dropped: Vec<ClaimRecord>,
}

impl Report {
    /// Claimed targets, once each, in order of first claim.
    pub fn claimed_targets(&self) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        self.claims.iter().filter(|c| seen.insert(c.target)).map(|c| c.target).collect()
    }
}

/// Dovetails over `(i, n, b, j)` by increasing `i + n + b + j`, then
/// lexicographically, emitting a claim on the first clean `j > l`.
pub fn enumerate_simulated(
    x: &SubshiftSpec,
    registry: &OperatorRegistry,
    g: &[SubshiftSpec],
    bs: &[(usize, usize)],
    budgets: &Budgets,
    on_claim: &mut dyn FnMut(&ClaimRecord),
) -> Result<Report> {
    let mut cert = Certifier::new(x.clone());
    let mut report = Report::default();
    let mut claimed: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
    let mut parked: Vec<(ClaimRecord, u64, u32)> = Vec::new();
    for sum in 0..=budgets.max_sum {
        let mut todo: Vec<(ClaimRecord, u64, u32)> = Vec::new();
        for &(i, b) in bs {
            for n in 0..registry.len() {
                let Some(j) = sum.checked_sub(i + n + b) else { continue };
                todo.push((ClaimRecord { target: i, operator: n, b, j }, budgets.enum_cap, 0));
            }
        }
        todo.sort();
        // Parked tuples come back once per level, after the fresh ones.
        todo.append(&mut parked);
        for (t, cap, attempts) in todo {
            if claimed.contains(&(t.target, t.operator, t.b)) {
                continue;
            }
            let target = g.get(t.target).ok_or(Error::InvalidClaim("target index out of range"))?;
            let ell = match cert.modulus(registry, t.operator, t.b, target.dimension, budgets.modulus) {
                Ok(l) => l,
                Err(Error::CapExceeded { .. }) => continue,
                Err(e) => return Err(e),
            };
            if t.j <= ell {
                continue;
            }
            let op = registry.get(t.operator)?.clone();
            report.checked += 1;
            match cert.inner_check(op.as_ref(), target, t.b, t.j, budgets, cap)? {
                Inner::Pass => {
                    claimed.insert((t.target, t.operator, t.b));
                    on_claim(&t);
                    report.claims.push(t);
                }
                Inner::Fail { .. } => {}
                Inner::Exhausted => {
                    if attempts + 1 < budgets.max_attempts {
                        parked.push((t, cap.saturating_mul(2), attempts + 1));
                    } else {
                        report.dropped.push(t);
                    }
                }
            }
        }
    }
    report.parked = parked.into_iter().map(|(t, cap, _)| (t, cap)).collect();
    Ok(report)
}

/// Re-runs the inner check of a claim from scratch.
pub fn verify_claim(
    claim: &ClaimRecord,
    x: &SubshiftSpec,
    registry: &OperatorRegistry,
    g: &[SubshiftSpec],
    budgets: &Budgets,
) -> Result<bool> {
    let target = g.get(claim.target).ok_or(Error::InvalidClaim("target index out of range"))?;
    let mut cert = Certifier::new(x.clone());
    let ell = cert.modulus(registry, claim.operator, claim.b, target.dimension, budgets.modulus)?;
    if claim.j <= ell {
        return Err(Error::InvalidClaim("witness depth must exceed the modulus"));
    }
    let op = registry.get(claim.operator)?.clone();
    let mut cap = budgets.enum_cap;
    for _ in 0..budgets.max_attempts.max(1) {
        match cert.inner_check(op.as_ref(), target, claim.b, claim.j, budgets, cap)? {
            Inner::Pass => return Ok(true),
            Inner::Fail { .. } => return Ok(false),
            Inner::Exhausted => cap = cap.saturating_mul(2),
        }
    }
    Err(Error::BudgetExceeded { what: "enumerated windows", limit: cap })
}
