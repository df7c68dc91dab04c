//! Local and exact languages of one-dimensional subshifts, sliding block
//! codes and subsampling.

use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::pattern::{Alphabet, Letter, PartialPattern, SubshiftSpec, Word};

/// Default bound on `s^len` for explicit enumeration.
pub const DEFAULT_ENUM_CAP: u64 = 1 << 24;

/// A one-dimensional pattern shifted to start at offset 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pat1 {
    pub offs: Vec<u32>,
    pub letters: Vec<Letter>,
}

impl Pat1 {
    pub fn from_pattern(p: &PartialPattern) -> Pat1 {
        let n = p.normalized();
        let (offs, letters) = n.cells_1d().map(|(o, l)| (o as u32, l)).unzip();
        Pat1 { offs, letters }
    }

    pub fn span(&self) -> usize {
        *self.offs.last().unwrap_or(&0) as usize + 1
    }

    /// Occurrence with the pattern's first cell at `at`.
    #[inline]
    pub fn hits(&self, w: &[Letter], at: usize) -> bool {
        self.offs.iter().zip(&self.letters).all(|(&o, &l)| w[at + o as usize] == l)
    }

    pub fn occurs(&self, w: &[Letter]) -> bool {
        let sp = self.span();
        w.len() >= sp && (0..=w.len() - sp).any(|a| self.hits(w, a))
    }
}

/// Incremental occurrence test: after appending cell `pos`, only patterns
/// whose last cell lands on `pos` need checking.
#[derive(Debug, Clone)]
pub struct Avoider {
    pats: Vec<Pat1>,
    max_span: usize,
}

impl Avoider {
    pub fn new(patterns: &[PartialPattern]) -> Avoider {
        let mut pats: Vec<Pat1> = patterns.iter().map(Pat1::from_pattern).collect();
        pats.sort();
        pats.dedup();
        let max_span = pats.iter().map(Pat1::span).max().unwrap_or(0);
        Avoider { pats, max_span }
    }

    pub fn from_pat1(mut pats: Vec<Pat1>) -> Avoider {
        pats.sort();
        pats.dedup();
        let max_span = pats.iter().map(Pat1::span).max().unwrap_or(0);
        Avoider { pats, max_span }
    }

    pub fn max_span(&self) -> usize {
        self.max_span
    }

    pub fn patterns(&self) -> &[Pat1] {
        &self.pats
    }

    /// No pattern ends at the last cell of `w`.
    pub fn ok_last(&self, w: &[Letter]) -> bool {
        let n = w.len();
        self.pats.iter().all(|p| {
            let sp = p.span();
            sp > n || !p.hits(w, n - sp)
        })
    }

    pub fn avoids(&self, w: &[Letter]) -> bool {
        self.pats.iter().all(|p| !p.occurs(w))
    }
}

fn check_1d(spec: &SubshiftSpec) -> Result<()> {
    if spec.dimension != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: spec.dimension });
    }
    Ok(())
}

fn enum_cap_check(s: u32, len: usize, cap: u64) -> Result<()> {
    let mut total: u64 = 1;
    for _ in 0..len {
        total = total.saturating_mul(s as u64);
        if total > cap {
            return Err(Error::BudgetExceeded { what: "window enumeration", limit: cap });
        }
    }
    Ok(())
}

/// Depth-first enumeration of all length-`len` words avoiding `av`, in
/// lexicographic order.
pub fn avoiding_words(s: u32, len: usize, av: &Avoider) -> Vec<Vec<Letter>> {
    let mut out = Vec::new();
    let mut w: Vec<Letter> = Vec::with_capacity(len);
    if len == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut next: Vec<Letter> = Vec::with_capacity(len);
    w.push(0);
    next.push(0);
    loop {
        let depth = w.len();
        let letter = next[depth - 1];
        if letter >= s {
            w.pop();
            next.pop();
            if w.is_empty() {
                return out;
            }
            continue;
        }
        w[depth - 1] = letter;
        next[depth - 1] = letter + 1;
        if av.ok_last(&w) {
            if depth == len {
                out.push(w.clone());
            } else {
                w.push(0);
                next.push(0);
            }
        }
    }
}

/// Words of length `len` containing none of the first `t` forbidden patterns
/// (locally admissible; not necessarily extendable).
pub fn admissible_words(spec: &SubshiftSpec, len: usize, t: usize) -> Result<Vec<Word>> {
    admissible_words_capped(spec, len, t, DEFAULT_ENUM_CAP)
}

pub fn admissible_words_capped(spec: &SubshiftSpec, len: usize, t: usize, cap: u64) -> Result<Vec<Word>> {
    check_1d(spec)?;
    if len == 0 {
        return Err(Error::InvalidParams("length must be positive"));
    }
    enum_cap_check(spec.alphabet.size(), len, cap)?;
    let av = Avoider::new(&spec.first(t));
    Ok(avoiding_words(spec.alphabet.size(), len, &av)
        .into_iter()
        .map(|c| Word::new(spec.alphabet, c).expect("letters in range"))
        .collect())
}

/// Exact length-`len` language of a one-dimensional SFT: words of the
/// de Bruijn graph on admissible blocks of the maximal forbidden length,
/// trimmed to vertices lying on bi-infinite paths.
pub fn sft_language(spec: &SubshiftSpec, len: usize) -> Result<Vec<Word>> {
    check_1d(spec)?;
    let bound = spec.sft_bound.ok_or(Error::NotSft)?;
    let av = Avoider::new(&spec.first(bound));
    let s = spec.alphabet.size();
    let k = av.max_span().max(1);
    enum_cap_check(s, k, DEFAULT_ENUM_CAP)?;
    let verts = avoiding_words(s, k, &av);
    let index: hashbrown::HashMap<&[Letter], usize> =
        verts.iter().enumerate().map(|(i, v)| (v.as_slice(), i)).collect();
    // succ[v] = vertices reached by appending one letter.
    let mut succ: Vec<Vec<usize>> = alloc::vec![Vec::new(); verts.len()];
    let mut buf: Vec<Letter> = Vec::with_capacity(k);
    for (i, v) in verts.iter().enumerate() {
        for a in 0..s {
            buf.clear();
            buf.extend_from_slice(&v[1..]);
            buf.push(a);
            if let Some(&j) = index.get(buf.as_slice()) {
                succ[i].push(j);
            }
        }
    }
    let mut alive = alloc::vec![true; verts.len()];
    loop {
        let mut indeg = alloc::vec![0usize; verts.len()];
        let mut outdeg = alloc::vec![0usize; verts.len()];
        for i in 0..verts.len() {
            if !alive[i] {
                continue;
            }
            for &j in &succ[i] {
                if alive[j] {
                    outdeg[i] += 1;
                    indeg[j] += 1;
                }
            }
        }
        let mut changed = false;
        for i in 0..verts.len() {
            if alive[i] && (indeg[i] == 0 || outdeg[i] == 0) {
                alive[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut out: BTreeSet<Vec<Letter>> = BTreeSet::new();
    if len <= k {
        for (i, v) in verts.iter().enumerate() {
            if alive[i] {
                for st in 0..=k - len {
                    out.insert(v[st..st + len].to_vec());
                }
            }
        }
    } else {
        // Walk paths of len - k + 1 vertices.
        let mut stack: Vec<(usize, Vec<Letter>)> =
            (0..verts.len()).filter(|&i| alive[i]).map(|i| (i, verts[i].clone())).collect();
        while let Some((v, w)) = stack.pop() {
            if w.len() == len {
                out.insert(w);
                continue;
            }
            for &j in &succ[v] {
                if alive[j] {
                    let mut w2 = w.clone();
                    w2.push(*verts[j].last().expect("k >= 1"));
                    stack.push((j, w2));
                }
            }
        }
    }
    Ok(out.into_iter().map(|c| Word::new(spec.alphabet, c).expect("in range")).collect())
}

/// Local rule of a sliding block code: the `(2r+1)^d` window, read in
/// lexicographic coordinate order, to an output letter.
#[derive(Clone)]
pub enum BlockRule {
    /// Indexed by the base-`s` value of the window, first cell most significant.
    Table(Vec<Letter>),
    Func(Arc<dyn Fn(&[Letter]) -> Letter + Send + Sync>),
}

/// Structure of a one-dimensional block code that locates the cells it reads
/// from coarse letter classes alone, then reads one bit from each.
///
/// Contract: `eval(w)` equals the bits at `reads(classes(w))` read most
/// significant first, or 0 when `reads` is `None`.
pub trait WindowReader: Send + Sync {
    fn class_of(&self, l: Letter) -> u8;
    fn bit_of(&self, l: Letter) -> Option<bool>;
    /// The letter of class `c` carrying bit `b`, if that class carries bits.
    fn bit_letter(&self, c: u8, b: bool) -> Option<Letter>;
    /// Whether some completion of the class prefix has `reads` defined.
    fn viable(&self, prefix: &[u8]) -> bool;
    fn reads(&self, classes: &[u8]) -> Option<Vec<usize>>;
}

#[derive(Clone)]
pub struct BlockCode {
    pub input: Alphabet,
    pub output: Alphabet,
    pub dimension: usize,
    pub radius: usize,
    pub rule: BlockRule,
    pub reader: Option<Arc<dyn WindowReader>>,
}

impl core::fmt::Debug for BlockCode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("BlockCode")
            .field("input", &self.input.size())
            .field("output", &self.output.size())
            .field("radius", &self.radius)
            .finish()
    }
}

impl BlockCode {
    pub fn from_table(input: Alphabet, output: Alphabet, radius: usize, table: Vec<Letter>) -> Result<Self> {
        let mut need: u64 = 1;
        for _ in 0..2 * radius + 1 {
            need = need.checked_mul(input.size() as u64).ok_or(Error::Overflow)?;
        }
        if table.len() as u64 != need {
            return Err(Error::SizeMismatch { expected: need as usize, found: table.len() });
        }
        for &l in &table {
            output.check(l)?;
        }
        Ok(BlockCode { input, output, dimension: 1, radius, rule: BlockRule::Table(table), reader: None })
    }

    pub fn from_fn<F>(input: Alphabet, output: Alphabet, radius: usize, f: F) -> Self
    where
        F: Fn(&[Letter]) -> Letter + Send + Sync + 'static,
    {
        BlockCode { input, output, dimension: 1, radius, rule: BlockRule::Func(Arc::new(f)), reader: None }
    }

    pub fn identity(alphabet: Alphabet) -> Self {
        BlockCode::from_fn(alphabet, alphabet, 0, |w| w[0])
    }

    /// Output letter for one window; results outside the output alphabet
    /// collapse to 0 so the rule stays total.
    pub fn eval(&self, window: &[Letter]) -> Letter {
        let v = match &self.rule {
            BlockRule::Table(t) => {
                let s = self.input.size() as usize;
                let idx = window.iter().fold(0usize, |acc, &l| acc * s + l as usize);
                t[idx]
            }
            BlockRule::Func(f) => f(window),
        };
        if v < self.output.size() {
            v
        } else {
            0
        }
    }
}

/// Image of a finite word; output cell `i` reads input cells `i..=i+2r`.
pub fn apply_block_code(code: &BlockCode, w: &Word) -> Result<Word> {
    let width = 2 * code.radius + 1;
    if w.len() < width {
        return Err(Error::WindowTooSmall { need: width, have: w.len() });
    }
    let cells = w.cells().windows(width).map(|win| code.eval(win)).collect();
    Word::new(code.output, cells)
}

/// Cells `p, p+m, p+2m, ...` of `w`.
pub fn subsample(w: &Word, m: usize, phase: usize) -> Result<Word> {
    if m == 0 || phase >= m {
        return Err(Error::InvalidParams("subsample needs m >= 1 and phase < m"));
    }
    let cells = w.cells().iter().skip(phase).step_by(m).copied().collect();
    Word::new(w.alphabet(), cells)
}

/// Whether some length-`len` word avoids `av`. Dead prefixes are memoised by
/// `(position, last max_span-1 letters)`, which determines every future check.
pub fn exists_avoiding(s: u32, len: usize, av: &Avoider) -> bool {
    let keep = av.max_span().saturating_sub(1);
    let mut dead: hashbrown::HashSet<(usize, Vec<Letter>)> = hashbrown::HashSet::new();
    let mut w: Vec<Letter> = Vec::with_capacity(len);
    fn go(
        s: u32,
        len: usize,
        keep: usize,
        av: &Avoider,
        w: &mut Vec<Letter>,
        dead: &mut hashbrown::HashSet<(usize, Vec<Letter>)>,
    ) -> bool {
        if w.len() == len {
            return true;
        }
        let key = (w.len(), w[w.len().saturating_sub(keep)..].to_vec());
        if dead.contains(&key) {
            return false;
        }
        for a in 0..s {
            w.push(a);
            if av.ok_last(w) && go(s, len, keep, av, w, dead) {
                return true;
            }
            w.pop();
        }
        dead.insert(key);
        false
    }
    go(s, len, keep, av, &mut w, &mut dead)
}
