//! Transport of a forbidden-pattern family onto one layer of the skeleton.
//!
//! A letter `a` at output position `i` of the layer-`n` decoder is carried by
//! the first `n` coding cells of one layer-`n` meta coding cell. A decoded
//! pattern is forbidden by pinning those cells, at stride `m_n`, together with
//! the bracket cells that make the position recognisable.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::pattern::{Letter, PartialPattern, PatternStream, SubshiftSpec};
use crate::skeleton::{self, CellClass, Role, SkeletonParams, C0, C1, LB, RB};

/// Relative offsets that locate one layer-`n` meta coding cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Anchor {
    /// Bracket cells, relative to the last cell of the layer-`n` left bracket unit.
    pub context: Vec<(i64, Letter)>,
    /// The first `n` coding cells of the meta coding cell, in order.
    pub bits: Vec<i64>,
}

/// Anchor for layer `n`, read off the canonical period: the last cell of the
/// layer-`n` left bracket unit, every lower-layer bracket up to the `n`-th
/// coding cell of the next unit, and those coding cells. Lower-layer coding
/// cells stay wildcards.
pub fn anchor(params: SkeletonParams, n: usize) -> Result<Anchor> {
    let g = params.geometry(n)?;
    let mut last_left: Option<i64> = None;
    let mut bits: Vec<i64> = Vec::new();
    let mut brackets: Vec<(i64, Letter)> = Vec::new();
    for q in 0..g.m as i64 {
        match params.class_at(q, &[], n) {
            CellClass::Structural { layer, role: Role::Left, group: 0 } if layer == n => last_left = Some(q),
            CellClass::Structural { layer, role: Role::Coding, group: 0 } if layer == n => {
                bits.push(q);
                if bits.len() == n {
                    break;
                }
            }
            CellClass::Structural { layer, role, .. } if layer < n && last_left.is_some() => match role {
                Role::Left => brackets.push((q, LB)),
                Role::Right => brackets.push((q, RB)),
                Role::Coding => {}
            },
            _ => {}
        }
    }
    let base = last_left.ok_or(Error::InvalidParams("layer has no left bracket"))?;
    let mut context = alloc::vec![(0, LB)];
    context.extend(brackets.into_iter().filter(|&(q, _)| q > base).map(|(q, l)| (q - base, l)));
    Ok(Anchor { context, bits: bits.into_iter().map(|q| q - base).collect() })
}

/// Bits of `a`, most significant first, as coding letters.
fn bit_letters(a: Letter, n: usize) -> impl Iterator<Item = Letter> {
    (0..n).rev().map(move |j| if (a >> j) & 1 == 1 { C1 } else { C0 })
}

/// The layer-`n` image of a family of one-dimensional forbidden patterns
/// over at most `2^n` letters. Decoded letters `>= s` are forbidden first,
/// then each pattern of the family in order.
pub struct Transformed {
    params: SkeletonParams,
    layer: usize,
    stride: i64,
    anchor: Anchor,
    source: SubshiftSpec,
    extra: u32,
}

impl Transformed {
    pub fn layer(&self) -> usize {
        self.layer
    }

    pub fn source(&self) -> &SubshiftSpec {
        &self.source
    }

    /// Pattern count when finite: range guards plus the source's patterns.
    pub fn finite_len(&self) -> Option<usize> {
        self.source.sft_bound.map(|b| self.extra as usize + b)
    }

    fn place(&self, cells: &[(i64, Letter)]) -> PartialPattern {
        let mut out: Vec<(i64, Letter)> = Vec::new();
        for &(o, a) in cells {
            let shift = o * self.stride;
            out.extend(self.anchor.context.iter().map(|&(q, l)| (q + shift, l)));
            out.extend(self.anchor.bits.iter().zip(bit_letters(a, self.layer)).map(|(&q, l)| (q + shift, l)));
        }
        out.sort();
        out.dedup();
        PartialPattern::from_cells_1d(skeleton::alphabet(), &out).expect("anchored cells are distinct")
    }

    /// `None` past the end of a finite family.
    pub fn get(&self, i: usize) -> Option<PartialPattern> {
        if i < self.extra as usize {
            let v = self.source.alphabet.size() + i as u32;
            return Some(self.place(&[(0, v)]));
        }
        let j = i - self.extra as usize;
        if let Some(b) = self.source.sft_bound {
            if j >= b {
                return None;
            }
        }
        let p = self.source.pattern(j)?.normalized();
        let cells: Vec<(i64, Letter)> = p.cells_1d().collect();
        Some(self.place(&cells))
    }

    pub fn params(&self) -> SkeletonParams {
        self.params
    }
}

impl PatternStream for Transformed {
    /// Finite families repeat their last pattern.
    fn pattern(&self, index: usize) -> PartialPattern {
        match self.get(index) {
            Some(p) => p,
            None => {
                let n = self.finite_len().expect("only finite families end");
                self.get(n.saturating_sub(1)).expect("nonempty family")
            }
        }
    }

    fn describe(&self) -> alloc::string::String {
        alloc::format!("layer{}", self.layer)
    }
}

pub fn transform_forbidden(params: SkeletonParams, n: usize, f: &SubshiftSpec) -> Result<Arc<Transformed>> {
    if f.dimension != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: f.dimension });
    }
    let s = f.alphabet.size();
    if n >= 32 || (s as u64) > (1u64 << n) {
        return Err(Error::AlphabetTooLarge { size: s, layer: n });
    }
    let g = params.geometry(n)?;
    Ok(Arc::new(Transformed {
        params,
        layer: n,
        stride: g.m as i64,
        anchor: anchor(params, n)?,
        source: f.clone(),
        extra: ((1u64 << n) - s as u64) as u32,
    }))
}
