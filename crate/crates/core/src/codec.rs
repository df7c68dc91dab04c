//! Codings into `N^N`: the integer lattice, pattern codes, configurations,
//! lattice operations on streams and subshift codes.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::pattern::{Alphabet, Forbidden, Letter, PartialPattern, PatternStream, SubshiftSpec};

/// A total function `N -> N` with stable indexed access.
#[derive(Clone)]
pub struct NatStream(Arc<dyn Fn(u64) -> u64 + Send + Sync>);

impl core::fmt::Debug for NatStream {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "NatStream{:?}..", self.prefix(6))
    }
}

impl NatStream {
    pub fn from_fn<F: Fn(u64) -> u64 + Send + Sync + 'static>(f: F) -> Self {
        NatStream(Arc::new(f))
    }

    /// Caches every computed value; for generators that are costly per index.
    pub fn memoized<F: Fn(u64) -> u64 + Send + Sync + 'static>(f: F) -> Self {
        let cache: spin::Mutex<BTreeMap<u64, u64>> = spin::Mutex::new(BTreeMap::new());
        NatStream(Arc::new(move |i| {
            if let Some(&v) = cache.lock().get(&i) {
                return v;
            }
            let v = f(i);
            cache.lock().insert(i, v);
            v
        }))
    }

    pub fn constant(v: u64) -> Self {
        NatStream::from_fn(move |_| v)
    }

    /// `prefix` followed by `tail(i)` for indices past the prefix.
    pub fn with_prefix(prefix: Vec<u64>, tail: NatStream) -> Self {
        NatStream::from_fn(move |i| match prefix.get(i as usize) {
            Some(&v) => v,
            None => tail.get(i),
        })
    }

    #[inline]
    pub fn get(&self, i: u64) -> u64 {
        (self.0)(i)
    }

    pub fn prefix(&self, n: usize) -> Vec<u64> {
        (0..n as u64).map(|i| self.get(i)).collect()
    }
}

/// `0, 1, -1, 2, -2, ...`
pub fn beta1(n: u64) -> i64 {
    if n == 0 {
        0
    } else if n % 2 == 1 {
        n.div_ceil(2) as i64
    } else {
        -((n / 2) as i64)
    }
}

pub fn beta1_inv(z: i64) -> u64 {
    if z > 0 {
        2 * z as u64 - 1
    } else {
        2 * z.unsigned_abs()
    }
}

/// `(a+b)(a+b+1)/2 + b`
pub fn cantor_pair(a: u64, b: u64) -> u64 {
    let s = a as u128 + b as u128;
    let v = s * (s + 1) / 2 + b as u128;
    u64::try_from(v).expect("Cantor pairing overflows u64")
}

pub fn cantor_unpair(n: u64) -> (u64, u64) {
    // Largest w with w(w+1)/2 <= n.
    let mut w = ((((8 * n as u128 + 1) as f64).sqrt() as u128).saturating_sub(1) / 2) as u64;
    while (w as u128 + 1) * (w as u128 + 2) / 2 <= n as u128 {
        w += 1;
    }
    while (w as u128) * (w as u128 + 1) / 2 > n as u128 {
        w -= 1;
    }
    let t = (w as u128 * (w as u128 + 1) / 2) as u64;
    let b = n - t;
    (w - b, b)
}

/// Bijection `Z^d -> N`: right-nested Cantor pairing of the per-axis
/// `beta1` indices.
pub fn z_index(v: &[i64]) -> u64 {
    let mut it = v.iter().rev();
    let mut acc = beta1_inv(*it.next().expect("dimension >= 1"));
    for &z in it {
        acc = cantor_pair(beta1_inv(z), acc);
    }
    acc
}

pub fn z_coords(n: u64, d: usize) -> Vec<i64> {
    assert!(d >= 1, "dimension must be positive");
    let mut out = Vec::with_capacity(d);
    let mut rest = n;
    for _ in 0..d - 1 {
        let (a, b) = cantor_unpair(rest);
        out.push(beta1(a));
        rest = b;
    }
    out.push(beta1(rest));
    out
}

fn pow_checked(s: u64, e: u64) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(s)?;
    }
    Some(acc)
}

fn cube(r: u64, d: usize) -> Option<u64> {
    pow_checked(2 * r + 1, d as u64)
}

/// Coordinates of `[-r, r]^d` in lexicographic order.
fn square_coords(r: i64, d: usize) -> Vec<Vec<i64>> {
    let mut out = alloc::vec![Vec::new()];
    for _ in 0..d {
        let mut next = Vec::with_capacity(out.len() * (2 * r + 1) as usize);
        for c in &out {
            for x in -r..=r {
                let mut c2 = c.clone();
                c2.push(x);
                next.push(c2);
            }
        }
        out = next;
    }
    out
}

/// Code of a full pattern on `[-r, r]^d`: the number of codes for smaller
/// radii plus the base-`s` value of the letters, first cell most significant.
pub fn encode_pattern(p: &PartialPattern) -> Result<u64> {
    let d = p.dimension();
    let b = p.bounds();
    let r = b[0].1;
    let full = b.iter().all(|&(lo, hi)| lo == -r && hi == r)
        && Some(p.cells().len() as u64) == cube(r as u64, d);
    if r < 0 || !full {
        return Err(Error::InvalidParams("pattern is not a full square pattern centred at 0"));
    }
    let s = p.alphabet().size() as u64;
    let mut base: u64 = 0;
    for rr in 0..r as u64 {
        let block = pow_checked(s, cube(rr, d).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
        base = base.checked_add(block).ok_or(Error::Overflow)?;
    }
    let mut v: u64 = 0;
    for (_, l) in p.cells() {
        v = v.checked_mul(s).and_then(|v| v.checked_add(*l as u64)).ok_or(Error::Overflow)?;
    }
    base.checked_add(v).ok_or(Error::Overflow)
}

pub fn decode_pattern(code: u64, s: Alphabet, d: usize) -> Result<PartialPattern> {
    let sz = s.size() as u64;
    let mut rest = code;
    let mut r: u64 = 0;
    loop {
        let cells = cube(r, d).ok_or(Error::Overflow)?;
        match pow_checked(sz, cells) {
            Some(block) if rest >= block => {
                rest -= block;
                r += 1;
            }
            _ => break,
        }
    }
    let coords = square_coords(r as i64, d);
    let mut letters = alloc::vec![0 as Letter; coords.len()];
    for slot in letters.iter_mut().rev() {
        *slot = (rest % sz) as Letter;
        rest /= sz;
    }
    PartialPattern::new(s, d, coords.into_iter().zip(letters).collect())
}

/// A total configuration `Z^d -> letters`.
pub trait Configuration: Send + Sync {
    fn alphabet(&self) -> Alphabet;
    fn dimension(&self) -> usize;
    fn cell(&self, v: &[i64]) -> Letter;
}

/// One-dimensional configuration with `c(i) = period[i mod p]`.
#[derive(Debug, Clone)]
pub struct Periodic1d {
    pub alphabet: Alphabet,
    pub period: Vec<Letter>,
}

impl Configuration for Periodic1d {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn dimension(&self) -> usize {
        1
    }

    fn cell(&self, v: &[i64]) -> Letter {
        self.period[v[0].rem_euclid(self.period.len() as i64) as usize]
    }
}

/// Configuration read back from a stream.
#[derive(Clone)]
pub struct StreamConfig {
    stream: NatStream,
    alphabet: Alphabet,
    dim: usize,
}

impl Configuration for StreamConfig {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn dimension(&self) -> usize {
        self.dim
    }

    fn cell(&self, v: &[i64]) -> Letter {
        (self.stream.get(z_index(v) + 2) % self.alphabet.size() as u64) as Letter
    }
}

/// `(s, d, c(beta(0)), c(beta(1)), ...)`
pub fn encode_config(c: Arc<dyn Configuration>) -> NatStream {
    let s = c.alphabet().size() as u64;
    let d = c.dimension();
    NatStream::from_fn(move |i| match i {
        0 => s,
        1 => d as u64,
        n => c.cell(&z_coords(n - 2, d)) as u64,
    })
}

/// Inverse of [`encode_config`]; cell values are reduced mod `w(0)`.
pub fn decode_stream(w: &NatStream) -> Result<StreamConfig> {
    let s = w.get(0);
    if s == 0 {
        return Err(Error::ZeroAlphabet);
    }
    let d = w.get(1);
    if d == 0 {
        return Err(Error::HeaderMismatch);
    }
    let alphabet = Alphabet::new(u32::try_from(s).map_err(|_| Error::Overflow)?)?;
    Ok(StreamConfig { stream: w.clone(), alphabet, dim: d as usize })
}

/// `x(2n) = a(n), x(2n+1) = b(n)`
pub fn m_join(a: &NatStream, b: &NatStream) -> NatStream {
    let (a, b) = (a.clone(), b.clone());
    NatStream::from_fn(move |i| if i % 2 == 0 { a.get(i / 2) } else { b.get(i / 2) })
}

/// `(i, a(0), a(1), ...)`
pub fn m_prepend(i: u64, a: &NatStream) -> NatStream {
    let a = a.clone();
    NatStream::from_fn(move |n| if n == 0 { i } else { a.get(n - 1) })
}

/// Member of the disjoint union `0 + A ∪ 1 + B` built from the chosen side.
pub fn m_meet(a: &NatStream, b: &NatStream, side: u8) -> Result<NatStream> {
    match side {
        0 => Ok(m_prepend(0, a)),
        1 => Ok(m_prepend(1, b)),
        _ => Err(Error::InvalidParams("meet side must be 0 or 1")),
    }
}

/// Element source for [`set_enumerator`].
pub enum SetSource {
    Finite(Vec<u64>),
    /// A total enumeration; its value set is the set.
    Generator(NatStream),
}

/// A stream whose value set is the given set.
pub fn set_enumerator(src: SetSource) -> Result<NatStream> {
    match src {
        SetSource::Finite(v) if v.is_empty() => Err(Error::EmptySet),
        SetSource::Finite(v) => Ok(NatStream::from_fn(move |i| v[(i % v.len() as u64) as usize])),
        SetSource::Generator(g) => Ok(g),
    }
}

/// A Gödel-coded subshift: `stream(0) = s`, `stream(1) = d`, then pattern codes.
#[derive(Clone, Debug)]
pub struct SubshiftCode {
    pub stream: NatStream,
    /// Number of leading codes that carry information; later ones repeat.
    pub distinct: Option<usize>,
}

/// Square completions of `p`: every translate of its bounding box inside the
/// smallest centred square that holds it, with wildcards filled in every way.
pub struct Completions {
    p: PartialPattern,
    r: i64,
    placements: Vec<Vec<i64>>,
    free: usize,
    per_placement: Option<u64>,
}

impl Completions {
    pub fn new(p: &PartialPattern) -> Completions {
        let b = p.bounds();
        let d = p.dimension();
        let r = b.iter().map(|(lo, hi)| (hi - lo + 1) / 2).max().unwrap_or(0);
        let mut placements = alloc::vec![Vec::new()];
        for &(lo, hi) in &b {
            let mut next = Vec::new();
            for pl in &placements {
                for t in (-r - lo)..=(r - hi) {
                    let mut pl2: Vec<i64> = pl.clone();
                    pl2.push(t);
                    next.push(pl2);
                }
            }
            placements = next;
        }
        let total = cube(r as u64, d).expect("pattern square fits") as usize;
        let free = total - p.cells().len();
        let per_placement = pow_checked(p.alphabet().size() as u64, free as u64);
        Completions { p: p.clone(), r, placements, free, per_placement }
    }

    /// `None` when the count overflows `u64`.
    pub fn count(&self) -> Option<u64> {
        self.per_placement?.checked_mul(self.placements.len() as u64)
    }

    pub fn nth(&self, k: u64) -> PartialPattern {
        let s = self.p.alphabet().size() as u64;
        let per = self.per_placement.unwrap_or(u64::MAX);
        let pl = &self.placements[((k / per) % self.placements.len() as u64) as usize];
        let mut fill = k % per;
        let d = self.p.dimension();
        let mut mapped: BTreeMap<Vec<i64>, Letter> = BTreeMap::new();
        for (c, l) in self.p.cells() {
            mapped.insert(c.iter().zip(pl).map(|(x, t)| x + t).collect(), *l);
        }
        let coords = square_coords(self.r, d);
        let mut free_letters = alloc::vec![0 as Letter; self.free];
        for slot in free_letters.iter_mut().rev() {
            *slot = (fill % s) as Letter;
            fill /= s;
        }
        let mut fl = free_letters.into_iter();
        let cells = coords
            .into_iter()
            .map(|c| {
                let l = match mapped.get(&c) {
                    Some(&l) => l,
                    None => fl.next().expect("free cell count"),
                };
                (c, l)
            })
            .collect();
        PartialPattern::new(self.p.alphabet(), d, cells).expect("completion is well formed")
    }
}

/// Cap on the number of completions materialised for a finite list.
pub const COMPLETION_CAP: u64 = 1 << 20;

pub fn spec_to_code(spec: &SubshiftSpec) -> Result<SubshiftCode> {
    let s = spec.alphabet.size() as u64;
    let d = spec.dimension as u64;
    match (&spec.forbidden, spec.sft_bound) {
        (Forbidden::List(v), _) if v.is_empty() => Err(Error::NoPatterns),
        (Forbidden::Stream(_), None) => {
            let spec = spec.clone();
            Ok(SubshiftCode {
                stream: NatStream::from_fn(move |i| match i {
                    0 => s,
                    1 => d,
                    n => {
                        let (pi, k) = cantor_unpair(n - 2);
                        let p = spec.pattern(pi as usize).expect("stream is total");
                        let comp = Completions::new(&p);
                        let k = match comp.count() {
                            Some(c) => k % c,
                            None => k,
                        };
                        encode_pattern(&comp.nth(k)).expect("completion code fits u64")
                    }
                }),
                distinct: None,
            })
        }
        _ => {
            let pats = spec.first(spec.sft_bound.unwrap_or(0));
            if pats.is_empty() {
                return Err(Error::NoPatterns);
            }
            let mut codes: Vec<u64> = Vec::new();
            for p in &pats {
                let comp = Completions::new(p);
                let n = comp.count().filter(|&c| c <= COMPLETION_CAP).ok_or(Error::BudgetExceeded {
                    what: "square completions",
                    limit: COMPLETION_CAP,
                })?;
                if codes.len() as u64 + n > COMPLETION_CAP {
                    return Err(Error::BudgetExceeded { what: "square completions", limit: COMPLETION_CAP });
                }
                for k in 0..n {
                    codes.push(encode_pattern(&comp.nth(k))?);
                }
            }
            let distinct = codes.len();
            let last = *codes.last().expect("nonempty");
            let mut prefix = alloc::vec![s, d];
            prefix.extend(codes);
            Ok(SubshiftCode { stream: NatStream::with_prefix(prefix, NatStream::constant(last)), distinct: Some(distinct) })
        }
    }
}

struct DecodedStream {
    stream: NatStream,
    alphabet: Alphabet,
    dim: usize,
}

impl PatternStream for DecodedStream {
    fn pattern(&self, index: usize) -> PartialPattern {
        decode_pattern(self.stream.get(index as u64 + 2), self.alphabet, self.dim).expect("decode is total")
    }
}

pub fn code_to_spec(code: &SubshiftCode) -> Result<SubshiftSpec> {
    let s = code.stream.get(0);
    let d = code.stream.get(1);
    if s == 0 || d == 0 || s > u32::MAX as u64 {
        return Err(Error::HeaderMismatch);
    }
    let alphabet = Alphabet::new(s as u32)?;
    let dim = d as usize;
    match code.distinct {
        Some(n) => {
            let pats = (0..n)
                .map(|i| decode_pattern(code.stream.get(i as u64 + 2), alphabet, dim))
                .collect::<Result<Vec<_>>>()?;
            SubshiftSpec::sft(alphabet, dim, pats)
        }
        None => Ok(SubshiftSpec::stream(
            alphabet,
            dim,
            Arc::new(DecodedStream { stream: code.stream.clone(), alphabet, dim }),
        )),
    }
}
