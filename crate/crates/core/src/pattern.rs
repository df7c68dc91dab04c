use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

pub type Letter = u32;

/// The letters `0..size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alphabet(u32);

impl Alphabet {
    pub fn new(size: u32) -> Result<Self> {
        if size == 0 {
            return Err(Error::ZeroAlphabet);
        }
        Ok(Alphabet(size))
    }

    pub fn size(self) -> u32 {
        self.0
    }

    pub fn check(self, letter: Letter) -> Result<()> {
        if letter < self.0 {
            Ok(())
        } else {
            Err(Error::LetterOutOfRange { letter, size: self.0 })
        }
    }
}

/// A one-dimensional full pattern anchored at offsets `0..len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    alphabet: Alphabet,
    cells: Vec<Letter>,
}

impl Word {
    pub fn new(alphabet: Alphabet, cells: Vec<Letter>) -> Result<Self> {
        for &c in &cells {
            alphabet.check(c)?;
        }
        Ok(Word { alphabet, cells })
    }

    /// Parses a string of decimal digits, one letter per character.
    pub fn from_digits(alphabet: Alphabet, s: &str) -> Result<Self> {
        let mut cells = Vec::with_capacity(s.len());
        for ch in s.chars() {
            let d = ch
                .to_digit(10)
                .ok_or_else(|| Error::Parse(alloc::format!("not a digit: {ch:?}")))?;
            cells.push(d);
        }
        Word::new(alphabet, cells)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn cells(&self) -> &[Letter] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn into_cells(self) -> Vec<Letter> {
        self.cells
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.alphabet.size() <= 10 {
            for c in &self.cells {
                write!(f, "{c}")?;
            }
            Ok(())
        } else {
            for (i, c) in self.cells.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{c}")?;
            }
            Ok(())
        }
    }
}

/// Anything a pattern can be matched against.
pub trait Window {
    fn dimension(&self) -> usize;
    /// `None` outside the window's domain.
    fn cell(&self, coord: &[i64]) -> Option<Letter>;
}

impl Window for Word {
    fn dimension(&self) -> usize {
        1
    }

    fn cell(&self, coord: &[i64]) -> Option<Letter> {
        let i = coord[0];
        if i < 0 {
            None
        } else {
            self.cells.get(i as usize).copied()
        }
    }
}

/// A finite rectangular two-dimensional window; `rows[y][x]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    pub rows: Vec<Vec<Letter>>,
}

impl Window for Grid {
    fn dimension(&self) -> usize {
        2
    }

    fn cell(&self, coord: &[i64]) -> Option<Letter> {
        let (x, y) = (coord[0], coord[1]);
        if x < 0 || y < 0 {
            return None;
        }
        self.rows.get(y as usize)?.get(x as usize).copied()
    }
}

/// A finite map from `Z^d` to letters; unmapped coordinates are wildcards.
/// Cells are kept sorted by coordinate, so equal patterns compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialPattern {
    alphabet: Alphabet,
    dim: usize,
    cells: Vec<(Vec<i64>, Letter)>,
}

impl PartialPattern {
    pub fn new(alphabet: Alphabet, dim: usize, mut cells: Vec<(Vec<i64>, Letter)>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidParams("pattern has no mapped cell"));
        }
        if dim == 0 {
            return Err(Error::InvalidParams("dimension must be positive"));
        }
        for (c, l) in &cells {
            if c.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: c.len() });
            }
            alphabet.check(*l)?;
        }
        cells.sort();
        for w in cells.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidParams("pattern maps a coordinate twice"));
            }
        }
        Ok(PartialPattern { alphabet, dim, cells })
    }

    /// One-dimensional pattern from `(offset, letter)` pairs.
    pub fn from_cells_1d(alphabet: Alphabet, cells: &[(i64, Letter)]) -> Result<Self> {
        PartialPattern::new(alphabet, 1, cells.iter().map(|&(o, l)| (alloc::vec![o], l)).collect())
    }

    /// The full pattern spelling `w` at offsets `0..|w|`.
    pub fn from_word(w: &Word) -> Self {
        let cells = w.cells().iter().enumerate().map(|(i, &l)| (alloc::vec![i as i64], l)).collect();
        PartialPattern { alphabet: w.alphabet(), dim: 1, cells }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> &[(Vec<i64>, Letter)] {
        &self.cells
    }

    /// `(offset, letter)` pairs of a one-dimensional pattern.
    pub fn cells_1d(&self) -> impl Iterator<Item = (i64, Letter)> + '_ {
        self.cells.iter().map(|(c, l)| (c[0], *l))
    }

    /// Per-axis `(min, max)` of mapped coordinates.
    pub fn bounds(&self) -> Vec<(i64, i64)> {
        let mut b: Vec<(i64, i64)> = self.cells[0].0.iter().map(|&x| (x, x)).collect();
        for (c, _) in &self.cells {
            for (k, &x) in c.iter().enumerate() {
                b[k].0 = b[k].0.min(x);
                b[k].1 = b[k].1.max(x);
            }
        }
        b
    }

    /// Side length of the smallest axis-parallel box holding every mapped cell.
    pub fn span(&self) -> usize {
        self.bounds().iter().map(|(lo, hi)| (hi - lo + 1) as usize).max().unwrap_or(1)
    }

    /// The same pattern translated so that every axis starts at 0.
    pub fn normalized(&self) -> PartialPattern {
        let b = self.bounds();
        let cells = self
            .cells
            .iter()
            .map(|(c, l)| (c.iter().zip(&b).map(|(x, (lo, _))| x - lo).collect(), *l))
            .collect();
        PartialPattern { alphabet: self.alphabet, dim: self.dim, cells }
    }

    /// True when every mapped cell equals `w` at `offset + cell`.
    pub fn matches<W: Window + ?Sized>(&self, w: &W, offset: &[i64]) -> Result<bool> {
        if w.dimension() != self.dim || offset.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: w.dimension() });
        }
        let mut at = alloc::vec![0i64; self.dim];
        let mut all = true;
        for (c, l) in &self.cells {
            for k in 0..self.dim {
                at[k] = c[k] + offset[k];
            }
            match w.cell(&at) {
                None => return Err(Error::OutOfWindow),
                Some(x) if x != *l => all = false,
                Some(_) => {}
            }
        }
        Ok(all)
    }

    /// True when the pattern occurs in `w` at some offset where it fits.
    pub fn occurs_in_word(&self, w: &Word) -> bool {
        if self.dim != 1 {
            return false;
        }
        let (lo, hi) = self.bounds()[0];
        let n = w.len() as i64;
        let cells = w.cells();
        let mut off = -lo;
        while off + hi < n {
            if self.cells.iter().all(|(c, l)| cells[(c[0] + off) as usize] == *l) {
                return true;
            }
            off += 1;
        }
        false
    }
}

/// A total, idempotent, indexable stream of forbidden patterns.
pub trait PatternStream: Send + Sync {
    fn pattern(&self, index: usize) -> PartialPattern;

    /// Short description used in diagnostics.
    fn describe(&self) -> alloc::string::String {
        alloc::string::String::from("stream")
    }
}

#[derive(Clone)]
pub enum Forbidden {
    /// A finite list; indices past the end repeat the last pattern.
    List(Vec<PartialPattern>),
    Stream(Arc<dyn PatternStream>),
}

/// A subshift given by forbidden patterns. With `sft_bound = Some(b)` only the
/// first `b` patterns carry information.
#[derive(Clone)]
pub struct SubshiftSpec {
    pub alphabet: Alphabet,
    pub dimension: usize,
    pub forbidden: Forbidden,
    pub sft_bound: Option<usize>,
}

impl fmt::Debug for SubshiftSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubshiftSpec")
            .field("alphabet", &self.alphabet.size())
            .field("dimension", &self.dimension)
            .field("sft_bound", &self.sft_bound)
            .finish()
    }
}

impl SubshiftSpec {
    /// A subshift of finite type from an explicit list.
    pub fn sft(alphabet: Alphabet, dimension: usize, patterns: Vec<PartialPattern>) -> Result<Self> {
        for p in &patterns {
            if p.alphabet() != alphabet {
                return Err(Error::LetterOutOfRange { letter: p.alphabet().size(), size: alphabet.size() });
            }
            if p.dimension() != dimension {
                return Err(Error::DimensionMismatch { expected: dimension, found: p.dimension() });
            }
        }
        let bound = patterns.len();
        Ok(SubshiftSpec { alphabet, dimension, forbidden: Forbidden::List(patterns), sft_bound: Some(bound) })
    }

    /// One-dimensional SFT forbidding the given words.
    pub fn forbid_words(alphabet: Alphabet, words: &[&str]) -> Result<Self> {
        let pats = words
            .iter()
            .map(|w| Word::from_digits(alphabet, w).map(|w| PartialPattern::from_word(&w)))
            .collect::<Result<Vec<_>>>()?;
        SubshiftSpec::sft(alphabet, 1, pats)
    }

    pub fn stream(alphabet: Alphabet, dimension: usize, stream: Arc<dyn PatternStream>) -> Self {
        SubshiftSpec { alphabet, dimension, forbidden: Forbidden::Stream(stream), sft_bound: None }
    }

    pub fn golden_mean() -> Self {
        SubshiftSpec::forbid_words(Alphabet(2), &["11"]).expect("static")
    }

    pub fn no00no11() -> Self {
        SubshiftSpec::forbid_words(Alphabet(2), &["00", "11"]).expect("static")
    }

    pub fn fullshift(size: u32) -> Result<Self> {
        SubshiftSpec::sft(Alphabet::new(size)?, 1, Vec::new())
    }

    /// Pattern at `index`; `None` only for an empty list.
    pub fn pattern(&self, index: usize) -> Option<PartialPattern> {
        match &self.forbidden {
            Forbidden::List(v) => v.get(index.min(v.len().saturating_sub(1))).cloned(),
            Forbidden::Stream(s) => Some(s.pattern(index)),
        }
    }

    /// The first `t` patterns, with repeats past `sft_bound` dropped.
    pub fn first(&self, t: usize) -> Vec<PartialPattern> {
        let t = match self.sft_bound {
            Some(b) => t.min(b),
            None => t,
        };
        match &self.forbidden {
            Forbidden::List(v) => v[..t.min(v.len())].to_vec(),
            Forbidden::Stream(s) => (0..t).map(|i| s.pattern(i)).collect(),
        }
    }

    pub fn is_sft(&self) -> bool {
        self.sft_bound.is_some()
    }
}
