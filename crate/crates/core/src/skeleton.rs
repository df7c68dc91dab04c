//! The layered Toeplitz skeleton over `{LB, RB, C0, C1}`.
//!
//! Layer 1 repeats `LB C^k RB` followed by a slot of `k+2` cells. Each slot
//! collapses to a single unit of the next layer, which obeys the same rule on
//! units. A cell belongs to the first layer at which it is not in a slot.
//! Coding cells carry one bit each (`C0`/`C1`); all cells of one slot share
//! their structural type, not their bits.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lang::{BlockCode, WindowReader};
use crate::oracle::{block_subsample_operator, BlockSubsample};
use crate::pattern::{Alphabet, Letter, PartialPattern, PatternStream, Word};

pub const LB: Letter = 0;
pub const RB: Letter = 1;
pub const C0: Letter = 2;
pub const C1: Letter = 3;

pub fn alphabet() -> Alphabet {
    Alphabet::new(4).expect("static")
}

/// Structural type of a letter; bits are forgotten.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ty {
    L,
    R,
    C,
}

pub fn ty_of(letter: Letter) -> Ty {
    match letter {
        LB => Ty::L,
        RB => Ty::R,
        _ => Ty::C,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Geometry {
    /// Period of layer `n`.
    pub m: u64,
    /// Real coding cells in one layer-`n` meta coding cell.
    pub kappa: u64,
    /// Half period, the decoder radius as first stated; too small for some phases.
    pub rho: u64,
    /// Radius actually used by the decoder: one full period, so every
    /// window of a valid configuration holds a complete meta coding cell.
    pub radius: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SkeletonParams {
    k: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Left,
    Right,
    Coding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellClass {
    /// `group` is the index of the layer period the cell belongs to.
    Structural { layer: usize, role: Role, group: i64 },
    /// Inside a unit of a layer deeper than the parse depth.
    Deep { unit: i64 },
    Unresolved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// A bracket was required here.
    Bracket,
    /// A coding cell was required here.
    Coding,
    /// The cell disagrees in type with the rest of its slot.
    Slot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Violation { layer: usize, position: usize, rule: Rule },
}

/// Per-cell outcome of a parse; a class is reported only when every
/// consistent phase agrees on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerParse {
    pub cells: Vec<CellClass>,
    /// Consistent phase vectors, one entry per layer.
    pub phases: Vec<Vec<u32>>,
    pub truncated: bool,
}

/// Cap on phase vectors collected by [`SkeletonParams::parse`].
pub const PHASE_CAP: usize = 4096;

enum Event {
    Success(Vec<u32>),
    Fail { pos: usize, rule: Rule },
}

impl SkeletonParams {
    pub fn new(k: u32) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidParams("k must be at least 3"));
        }
        Ok(SkeletonParams { k })
    }

    pub fn k(self) -> u32 {
        self.k
    }

    /// Units per layer period: `2(k+2)`.
    pub fn period(self) -> i64 {
        2 * (self.k as i64 + 2)
    }

    pub fn geometry(self, n: usize) -> Result<Geometry> {
        if n == 0 {
            return Err(Error::InvalidParams("layers start at 1"));
        }
        let base = 2 * (self.k as u64 + 2);
        let mut m: u64 = 1;
        let mut slot: u64 = 1;
        for i in 0..n {
            m = m.checked_mul(base).ok_or(Error::Overflow)?;
            if i + 1 < n {
                slot = slot.checked_mul(self.k as u64 + 2).ok_or(Error::Overflow)?;
            }
        }
        let kappa = (self.k as u64).checked_mul(slot).ok_or(Error::Overflow)?;
        Ok(Geometry { m, kappa, rho: m / 2, radius: m })
    }

    /// Depth needed to judge a word of length `len`: `ceil(log_{2(k+2)} len) + 1`.
    pub fn depth_for_len(self, len: usize) -> usize {
        let base = self.period() as u128;
        let mut d = 0usize;
        let mut p: u128 = 1;
        while p < len as u128 {
            p *= base;
            d += 1;
        }
        d + 1
    }

    /// Class of real position `q` under per-layer phases; phases past the
    /// end of `phases` are taken as 0.
    pub fn class_at(self, q: i64, phases: &[u32], depth: usize) -> CellClass {
        let per = self.period();
        let k = self.k as i64;
        let mut i = q;
        for layer in 1..=depth {
            let p = phases.get(layer - 1).copied().unwrap_or(0) as i64;
            let r = (i + p).rem_euclid(per);
            let u = (i + p).div_euclid(per);
            let role = if r == 0 {
                Some(Role::Left)
            } else if r <= k {
                Some(Role::Coding)
            } else if r == k + 1 {
                Some(Role::Right)
            } else {
                None
            };
            match role {
                Some(role) => return CellClass::Structural { layer, role, group: u },
                None => i = u,
            }
        }
        CellClass::Deep { unit: i }
    }

    fn walk(
        self,
        tys: &[Ty],
        pos: &[usize],
        index0: i64,
        depth: usize,
        prefix: &mut Vec<u32>,
        f: &mut dyn FnMut(Event) -> bool,
    ) -> bool {
        if depth == 0 || tys.is_empty() {
            return f(Event::Success(prefix.clone()));
        }
        let per = self.period();
        let k = self.k as i64;
        let mut next_tys: Vec<Ty> = Vec::new();
        let mut next_pos: Vec<usize> = Vec::new();
        for p in 0..per {
            next_tys.clear();
            next_pos.clear();
            let mut next_index0 = 0i64;
            let mut last_slot: Option<i64> = None;
            let mut failed = None;
            for (t, &ty) in tys.iter().enumerate() {
                let i = index0 + t as i64;
                let r = (i + p).rem_euclid(per);
                let want = if r == 0 {
                    Some(Ty::L)
                } else if r <= k {
                    Some(Ty::C)
                } else if r == k + 1 {
                    Some(Ty::R)
                } else {
                    None
                };
                match want {
                    Some(w) if w != ty => {
                        let rule = if w == Ty::C { Rule::Coding } else { Rule::Bracket };
                        failed = Some((pos[t], rule));
                        break;
                    }
                    Some(_) => {}
                    None => {
                        let u = (i + p).div_euclid(per);
                        if last_slot == Some(u) {
                            if *next_tys.last().expect("slot opened") != ty {
                                failed = Some((pos[t], Rule::Slot));
                                break;
                            }
                        } else {
                            if last_slot.is_none() {
                                next_index0 = u;
                            }
                            last_slot = Some(u);
                            next_tys.push(ty);
                            next_pos.push(pos[t]);
                        }
                    }
                }
            }
            if let Some((pos, rule)) = failed {
                if !f(Event::Fail { pos, rule }) {
                    return false;
                }
                continue;
            }
            prefix.push(p as u32);
            let nt = core::mem::take(&mut next_tys);
            let np = core::mem::take(&mut next_pos);
            let go_on = self.walk(&nt, &np, next_index0, depth - 1, prefix, f);
            next_tys = nt;
            next_pos = np;
            prefix.pop();
            if !go_on {
                return false;
            }
        }
        true
    }

    /// Whether the type sequence extends to a configuration obeying layers `1..=depth`.
    pub fn valid_types(self, tys: &[Ty], depth: usize) -> bool {
        let pos: Vec<usize> = (0..tys.len()).collect();
        let mut found = false;
        self.walk(tys, &pos, 0, depth, &mut Vec::new(), &mut |e| match e {
            Event::Success(_) => {
                found = true;
                false
            }
            Event::Fail { .. } => true,
        });
        found
    }

    pub fn check(self, w: &[Letter], depth: usize) -> Result<Verdict> {
        if depth == 0 {
            return Err(Error::InvalidParams("depth must be positive"));
        }
        for &l in w {
            alphabet().check(l)?;
        }
        let tys: Vec<Ty> = w.iter().map(|&l| ty_of(l)).collect();
        if self.valid_types(&tys, depth) {
            return Ok(Verdict::Valid);
        }
        let pos: Vec<usize> = (0..tys.len()).collect();
        for d in 1..=depth {
            let mut found = false;
            let mut best: Option<(usize, Rule)> = None;
            self.walk(&tys, &pos, 0, d, &mut Vec::new(), &mut |e| match e {
                Event::Success(_) => {
                    found = true;
                    false
                }
                Event::Fail { pos, rule } => {
                    if best.map_or(true, |(b, _)| pos > b) {
                        best = Some((pos, rule));
                    }
                    true
                }
            });
            if !found {
                let (position, rule) = best.expect("a failing parse records a failure");
                return Ok(Verdict::Violation { layer: d, position, rule });
            }
        }
        unreachable!("invalid at full depth implies invalid at some depth")
    }

    /// All consistent phase vectors and the per-cell classes they agree on.
    pub fn parse(self, w: &[Letter], depth: usize) -> Result<LayerParse> {
        for &l in w {
            alphabet().check(l)?;
        }
        let tys: Vec<Ty> = w.iter().map(|&l| ty_of(l)).collect();
        let pos: Vec<usize> = (0..tys.len()).collect();
        let mut phases: Vec<Vec<u32>> = Vec::new();
        let mut truncated = false;
        self.walk(&tys, &pos, 0, depth, &mut Vec::new(), &mut |e| match e {
            Event::Success(p) => {
                if phases.len() >= PHASE_CAP {
                    truncated = true;
                    return false;
                }
                phases.push(p);
                true
            }
            Event::Fail { .. } => true,
        });
        let cells = if phases.is_empty() || truncated {
            alloc::vec![CellClass::Unresolved; w.len()]
        } else {
            (0..w.len())
                .map(|x| {
                    let first = self.class_at(x as i64, &phases[0], depth);
                    if phases[1..].iter().all(|p| self.class_at(x as i64, p, depth) == first) {
                        first
                    } else {
                        CellClass::Unresolved
                    }
                })
                .collect()
        };
        Ok(LayerParse { cells, phases, truncated })
    }

    /// Number of coding bits per layer for one depth-`depth` period.
    pub fn bits_per_layer(self, depth: usize) -> Result<Vec<usize>> {
        let top = self.geometry(depth)?.m;
        (1..=depth)
            .map(|n| {
                let g = self.geometry(n)?;
                Ok(((top / g.m) * g.kappa) as usize)
            })
            .collect()
    }

    /// One period of the depth-`depth` skeleton with layer-1 left bracket at
    /// position 0. `bits[n-1]` lists layer-`n` bits group by group, each group
    /// in position order. Cells of deeper layers are `C0`.
    pub fn generate(self, depth: usize, bits: &[Vec<bool>]) -> Result<Vec<Letter>> {
        let need = self.bits_per_layer(depth)?;
        if bits.len() != depth {
            return Err(Error::SizeMismatch { expected: depth, found: bits.len() });
        }
        for (b, &n) in bits.iter().zip(&need) {
            if b.len() != n {
                return Err(Error::SizeMismatch { expected: n, found: b.len() });
            }
        }
        let m = self.geometry(depth)?.m as usize;
        let mut cursor = alloc::vec![0usize; depth];
        let mut out = Vec::with_capacity(m);
        for q in 0..m {
            let letter = match self.class_at(q as i64, &[], depth) {
                CellClass::Structural { role: Role::Left, .. } => LB,
                CellClass::Structural { role: Role::Right, .. } => RB,
                CellClass::Structural { layer, role: Role::Coding, .. } => {
                    let b = bits[layer - 1][cursor[layer - 1]];
                    cursor[layer - 1] += 1;
                    if b {
                        C1
                    } else {
                        C0
                    }
                }
                _ => C0,
            };
            out.push(letter);
        }
        Ok(out)
    }

    /// Decoder of layer `n` on a window of length `2 m_n + 1`: the first `n`
    /// bits of the leftmost complete layer-`n` meta coding cell, first bit
    /// most significant.
    pub fn phi(self, n: usize, window: &[Letter]) -> Result<Letter> {
        let g = self.geometry(n)?;
        if window.len() as u64 != 2 * g.radius + 1 {
            return Err(Error::SizeMismatch { expected: (2 * g.radius + 1) as usize, found: window.len() });
        }
        self.phi_any(n, window)
    }

    /// As [`phi`](Self::phi) on a window of any length.
    pub fn phi_any(self, n: usize, window: &[Letter]) -> Result<Letter> {
        let cells = self.phi_cells(n, window)?;
        Ok(cells.iter().fold(0, |v, &x| (v << 1) | u32::from(window[x] == C1)))
    }

    /// Positions of the cells [`phi_any`](Self::phi_any) reads, most
    /// significant first.
    pub fn phi_cells(self, n: usize, window: &[Letter]) -> Result<Vec<usize>> {
        let g = self.geometry(n)?;
        let tys: Vec<Ty> = window.iter().map(|&l| ty_of(l)).collect();
        let pos: Vec<usize> = (0..tys.len()).collect();
        let mut first: Option<Vec<u32>> = None;
        self.walk(&tys, &pos, 0, n, &mut Vec::new(), &mut |e| match e {
            Event::Success(p) => {
                first = Some(p);
                false
            }
            Event::Fail { .. } => true,
        });
        let phases = first.ok_or(Error::InvalidWindow)?;
        let mut groups: BTreeMap<i64, (usize, Vec<usize>)> = BTreeMap::new();
        for x in 0..window.len() {
            if let CellClass::Structural { layer, role: Role::Coding, group } = self.class_at(x as i64, &phases, n) {
                if layer == n {
                    let e = groups.entry(group).or_insert((x, Vec::new()));
                    e.1.push(x);
                }
            }
        }
        let cell = groups
            .into_values()
            .filter(|(_, xs)| xs.len() as u64 == g.kappa)
            .min_by_key(|(start, _)| *start)
            .ok_or(Error::NoCompleteCell)?;
        Ok(cell.1.into_iter().take(n).collect())
    }

    /// `phi_n` as a total block code; windows it cannot decode map to 0.
    pub fn phi_code(self, n: usize) -> Result<BlockCode> {
        let g = self.geometry(n)?;
        if n > 31 {
            return Err(Error::Overflow);
        }
        let out = Alphabet::new(1u32 << n)?;
        let cache: spin::Mutex<hashbrown::HashMap<Vec<u8>, Letter>> = spin::Mutex::new(hashbrown::HashMap::new());
        let mut code = BlockCode::from_fn(alphabet(), out, g.radius as usize, move |w| {
            let key: Vec<u8> = w.iter().map(|&l| l as u8).collect();
            if let Some(&v) = cache.lock().get(&key) {
                return v;
            }
            let v = self.phi_any(n, w).unwrap_or(0);
            cache.lock().insert(key, v);
            v
        });
        code.reader = Some(Arc::new(LayerReader { params: self, n }));
        Ok(code)
    }

    /// The layer-`n` decoding operator: `phi_n` sampled at stride `m_n`.
    pub fn layer_operator(self, n: usize) -> Result<BlockSubsample> {
        let g = self.geometry(n)?;
        let mut op = block_subsample_operator(self.phi_code(n)?, g.m as usize)?;
        op.label = alloc::format!("L{n}");
        Ok(op)
    }
}

/// The layer decoder seen as a [`WindowReader`]: classes are structural types.
struct LayerReader {
    params: SkeletonParams,
    n: usize,
}

const TY_ORDER: [Ty; 3] = [Ty::L, Ty::R, Ty::C];

impl WindowReader for LayerReader {
    fn class_of(&self, l: Letter) -> u8 {
        TY_ORDER.iter().position(|&t| t == ty_of(l)).expect("three types") as u8
    }

    fn bit_of(&self, l: Letter) -> Option<bool> {
        match l {
            C0 => Some(false),
            C1 => Some(true),
            _ => None,
        }
    }

    fn bit_letter(&self, c: u8, b: bool) -> Option<Letter> {
        (TY_ORDER[c as usize] == Ty::C).then_some(if b { C1 } else { C0 })
    }

    fn viable(&self, prefix: &[u8]) -> bool {
        let tys: Vec<Ty> = prefix.iter().map(|&c| TY_ORDER[c as usize]).collect();
        self.params.valid_types(&tys, self.n)
    }

    fn reads(&self, classes: &[u8]) -> Option<Vec<usize>> {
        let w: Vec<Letter> = classes
            .iter()
            .map(|&c| match TY_ORDER[c as usize] {
                Ty::L => LB,
                Ty::R => RB,
                Ty::C => C0,
            })
            .collect();
        self.params.phi_cells(self.n, &w).ok()
    }
}

/// Minimal forbidden words of the skeleton, by increasing length; within one
/// length by type word, then by coding bits read as a binary counter.
pub struct SkeletonForbidden {
    params: SkeletonParams,
    state: spin::Mutex<ForbiddenState>,
}

struct Batch {
    /// Cumulative pattern count before this batch.
    start: u128,
    /// Type words with cumulative counts before each.
    words: Vec<(u128, Vec<Ty>)>,
    end: u128,
}

struct ForbiddenState {
    len: usize,
    valid: Vec<Vec<Ty>>,
    batches: Vec<Batch>,
    total: u128,
}

impl SkeletonForbidden {
    pub fn new(params: SkeletonParams) -> Self {
        SkeletonForbidden {
            params,
            state: spin::Mutex::new(ForbiddenState { len: 0, valid: alloc::vec![Vec::new()], batches: Vec::new(), total: 0 }),
        }
    }

    pub fn params(&self) -> SkeletonParams {
        self.params
    }

    fn grow(&self, st: &mut ForbiddenState) {
        let len = st.len + 1;
        let depth = self.params.depth_for_len(len);
        let prev: hashbrown::HashSet<&[Ty]> = st.valid.iter().map(|v| v.as_slice()).collect();
        let mut next_valid = Vec::new();
        let mut minimal = Vec::new();
        for w in &st.valid {
            for t in [Ty::L, Ty::R, Ty::C] {
                let mut x = w.clone();
                x.push(t);
                if len > 1 && !prev.contains(&x[1..]) {
                    continue;
                }
                if self.params.valid_types(&x, depth) {
                    next_valid.push(x);
                } else {
                    minimal.push(x);
                }
            }
        }
        drop(prev);
        minimal.sort();
        next_valid.sort();
        let start = st.total;
        let mut acc = start;
        let mut words = Vec::with_capacity(minimal.len());
        for w in minimal {
            let c = w.iter().filter(|&&t| t == Ty::C).count() as u32;
            let before = acc;
            acc = acc.saturating_add(1u128 << c.min(127));
            words.push((before, w));
        }
        if !words.is_empty() {
            st.batches.push(Batch { start, words, end: acc });
        }
        st.total = acc;
        st.valid = next_valid;
        st.len = len;
    }

    /// Ensures at least `count` patterns are known; returns the length reached.
    pub fn prepare(&self, count: u128) -> usize {
        let mut st = self.state.lock();
        while st.total < count {
            self.grow(&mut st);
        }
        st.len
    }

    /// Type words and bit-variant counts of the minimal words of one length.
    pub fn minimal_types_of_len(&self, len: usize) -> Vec<Vec<Ty>> {
        let mut st = self.state.lock();
        while st.len < len {
            self.grow(&mut st);
        }
        st.batches
            .iter()
            .filter(|b| b.words.first().map(|w| w.1.len()) == Some(len))
            .flat_map(|b| b.words.iter().map(|w| w.1.clone()))
            .collect()
    }

    pub fn word(&self, index: u128) -> Vec<Letter> {
        self.prepare(index + 1);
        let st = self.state.lock();
        let bi = st.batches.partition_point(|b| b.end <= index);
        let b = &st.batches[bi];
        debug_assert!(b.start <= index);
        let wi = b.words.partition_point(|w| w.0 <= index) - 1;
        let (before, tys) = &b.words[wi];
        let variant = index - before;
        let ncod = tys.iter().filter(|&&t| t == Ty::C).count();
        let mut bit = ncod;
        tys.iter()
            .map(|t| match t {
                Ty::L => LB,
                Ty::R => RB,
                Ty::C => {
                    bit -= 1;
                    if (variant >> bit) & 1 == 1 {
                        C1
                    } else {
                        C0
                    }
                }
            })
            .collect()
    }
}

impl PatternStream for SkeletonForbidden {
    fn pattern(&self, index: usize) -> PartialPattern {
        let w = Word::new(alphabet(), self.word(index as u128)).expect("skeleton letters");
        PartialPattern::from_word(&w)
    }

    fn describe(&self) -> alloc::string::String {
        alloc::format!("skeleton(k={})", self.params.k)
    }
}

pub fn skeleton_forbidden_stream(params: SkeletonParams) -> Arc<SkeletonForbidden> {
    Arc::new(SkeletonForbidden::new(params))
}

/// Renders skeleton letters as `L`, `R`, `0`, `1`.
pub fn render(w: &[Letter]) -> alloc::string::String {
    w.iter()
        .map(|&l| match l {
            LB => 'L',
            RB => 'R',
            C0 => '0',
            C1 => '1',
            _ => '?',
        })
        .collect()
}

pub fn parse_letters(s: &str) -> Result<Vec<Letter>> {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            'L' => Ok(LB),
            'R' => Ok(RB),
            '0' => Ok(C0),
            '1' => Ok(C1),
            other => Err(Error::Parse(alloc::format!("unknown skeleton letter {other:?}"))),
        })
        .collect()
}
