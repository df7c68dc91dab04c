//! Locally admissible decoded languages of skeleton-based subshifts.
//!
//! A word over the skeleton alphabet avoids every minimal skeleton violation
//! that fits inside it exactly when it is a window of a valid configuration
//! at the depth its length requires. Such windows are enumerated by their
//! phase vector and the types of the deeper units they touch; coding bits
//! stay free and the remaining forbidden patterns become clauses over them.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::pattern::{Letter, PartialPattern};
use crate::skeleton::{self, CellClass, SkeletonParams, Ty, C0, C1, LB, RB};
use crate::universal::UniversalBundle;

/// Cap on windows (phase vectors times deep type choices) examined.
pub const WINDOW_CAP: usize = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Cell {
    Bracket(Letter),
    Bit(usize),
}

/// Non-skeleton patterns of a bundle that fit in a window of `len` cells.
/// Layers are scanned upward until one's shortest pattern no longer fits.
pub fn fitting_layer_patterns(bundle: &UniversalBundle, len: usize) -> Vec<PartialPattern> {
    let mut out = Vec::new();
    for n in 1..=bundle.stream.max_layer() {
        let Ok(g) = bundle.params.geometry(n) else { break };
        if g.m / bundle.params.period() as u64 > len as u64 {
            break;
        }
        let Some(t) = bundle.stream.layer_stream(n) else { continue };
        let end = t.finite_len().unwrap_or(4096);
        for i in 0..end {
            match t.get(i) {
                Some(p) if p.span() <= len => out.push(p),
                Some(_) => {}
                None => break,
            }
        }
    }
    out
}

/// Decoded words of length `ell` read from the middle of admissible windows
/// with one period of margin beyond the decoder windows on each side, so that
/// every pattern tying adjacent outputs together fits.
pub fn decoded_language(params: SkeletonParams, n: usize, ell: usize, extra: &[PartialPattern]) -> Result<BTreeSet<Vec<Letter>>> {
    decoded_language_window(params, n, ell, 1, extra)
}

/// Words `L_n(w)` of length `ell` over windows `w` of `m_n (ell + 1 + 2 margin) + 1`
/// cells that avoid the skeleton's violations and every pattern in `extra`;
/// output `i` is decoded from the window of radius `m_n` around `m_n (i + 1 + margin)`.
pub fn decoded_language_window(
    params: SkeletonParams,
    n: usize,
    ell: usize,
    margin: usize,
    extra: &[PartialPattern],
) -> Result<BTreeSet<Vec<Letter>>> {
    let g = params.geometry(n)?;
    let width = g.m as usize * (ell + 1 + 2 * margin) + 1;
    let depth = params.depth_for_len(width);
    let per = params.period() as u64;
    let offsets = per.checked_pow(depth as u32).ok_or(Error::Overflow)?;
    if offsets > WINDOW_CAP as u64 {
        return Err(Error::CapExceeded { cap: WINDOW_CAP });
    }
    let pats: Vec<Vec<(usize, Letter)>> = extra
        .iter()
        .filter(|p| p.span() <= width)
        .map(|p| {
            let lo = p.bounds()[0].0;
            p.cells_1d().map(|(o, l)| ((o - lo) as usize, l)).collect()
        })
        .collect();
    let mut lang = BTreeSet::new();
    let mut phases = alloc::vec![0u32; depth];
    for o in 0..offsets {
        let mut r = o;
        for p in phases.iter_mut() {
            *p = (r % per) as u32;
            r /= per;
        }
        let classes: Vec<CellClass> = (0..width as i64).map(|q| params.class_at(q, &phases, depth)).collect();
        let mut deep_units: Vec<i64> = classes
            .iter()
            .filter_map(|c| match c {
                CellClass::Deep { unit } => Some(*unit),
                _ => None,
            })
            .collect();
        deep_units.dedup();
        let choices = 3u64.pow(deep_units.len() as u32);
        for choice in 0..choices {
            let mut c = choice;
            let deep_ty: Vec<Ty> = deep_units
                .iter()
                .map(|_| {
                    let t = [Ty::L, Ty::R, Ty::C][(c % 3) as usize];
                    c /= 3;
                    t
                })
                .collect();
            let mut vars = 0usize;
            let cells: Vec<Cell> = classes
                .iter()
                .map(|cl| {
                    let ty = match cl {
                        CellClass::Structural { role: skeleton::Role::Left, .. } => Ty::L,
                        CellClass::Structural { role: skeleton::Role::Right, .. } => Ty::R,
                        CellClass::Structural { .. } => Ty::C,
                        CellClass::Deep { unit } => deep_ty[deep_units.iter().position(|u| u == unit).expect("listed")],
                        CellClass::Unresolved => Ty::C,
                    };
                    match ty {
                        Ty::L => Cell::Bracket(LB),
                        Ty::R => Cell::Bracket(RB),
                        Ty::C => {
                            vars += 1;
                            Cell::Bit(vars - 1)
                        }
                    }
                })
                .collect();
            window_language(params, n, ell, margin, &cells, vars, &pats, &mut lang)?;
        }
    }
    Ok(lang)
}

/// Adds the outputs realisable on one typed window to `lang`.
fn window_language(
    params: SkeletonParams,
    n: usize,
    ell: usize,
    margin: usize,
    cells: &[Cell],
    vars: usize,
    pats: &[Vec<(usize, Letter)>],
    lang: &mut BTreeSet<Vec<Letter>>,
) -> Result<()> {
    let mut clauses: Vec<Vec<(usize, bool)>> = Vec::new();
    for p in pats {
        let span = p.last().map_or(0, |c| c.0 + 1);
        'place: for a in 0..=cells.len() - span {
            let mut clause = Vec::new();
            for &(o, l) in p {
                match (cells[a + o], l) {
                    (Cell::Bracket(x), y) if x == y => {}
                    (Cell::Bit(v), y) if y == C0 || y == C1 => clause.push((v, y == C1)),
                    _ => continue 'place,
                }
            }
            if clause.is_empty() {
                return Ok(());
            }
            clause.sort();
            clause.dedup();
            clauses.push(clause);
        }
    }
    let g = params.geometry(n)?;
    let tys: Vec<Letter> = cells.iter().map(|c| match c {
        Cell::Bracket(l) => *l,
        Cell::Bit(_) => C0,
    })
    .collect();
    // Per output, the bit variables read (most significant first); `None` if
    // the decoder falls back to 0.
    let mut reads: Vec<Option<Vec<usize>>> = Vec::with_capacity(ell);
    for i in 0..ell {
        let lo = (i + margin) * g.m as usize;
        let win = &tys[lo..lo + 2 * g.m as usize + 1];
        reads.push(phi_positions(params, n, win)?.map(|ps| {
            ps.into_iter()
                .map(|x| match cells[lo + x] {
                    Cell::Bit(v) => v,
                    Cell::Bracket(_) => unreachable!("decoder reads coding cells"),
                })
                .collect()
        }));
    }
    let mut free: Vec<usize> = reads.iter().flatten().flatten().copied().collect();
    free.sort();
    free.dedup();
    let mut assign: Vec<Option<bool>> = alloc::vec![None; vars];
    for mask in 0u64..(1u64 << free.len()) {
        for (j, &v) in free.iter().enumerate() {
            assign[v] = Some((mask >> j) & 1 == 1);
        }
        let word: Vec<Letter> = reads
            .iter()
            .map(|r| match r {
                None => 0,
                Some(vs) => vs.iter().fold(0, |acc, &v| (acc << 1) | u32::from(assign[v] == Some(true))),
            })
            .collect();
        if !lang.contains(&word) && satisfiable(&clauses, &mut assign) {
            lang.insert(word);
        }
        for &v in &free {
            assign[v] = None;
        }
    }
    Ok(())
}

/// Window positions whose bits the layer-`n` decoder reads, or `None` when
/// the window does not decode.
pub fn phi_positions(params: SkeletonParams, n: usize, window: &[Letter]) -> Result<Option<Vec<usize>>> {
    match params.phi_cells(n, window) {
        Ok(ps) => Ok(Some(ps)),
        Err(Error::InvalidWindow | Error::NoCompleteCell) => Ok(None),
        Err(e) => Err(e),
    }
}

/// DPLL over clauses that must not be fully satisfied.
fn satisfiable(clauses: &[Vec<(usize, bool)>], assign: &mut [Option<bool>]) -> bool {
    // A clause is violated when every literal holds; it is safe once one fails.
    let mut pick = None;
    for c in clauses {
        let mut all_hold = true;
        let mut open = None;
        let mut open_count = 0;
        for &(v, b) in c {
            match assign[v] {
                Some(x) if x != b => {
                    all_hold = false;
                    open_count = usize::MAX;
                    break;
                }
                Some(_) => {}
                None => {
                    all_hold = false;
                    open_count += 1;
                    open = Some((v, b));
                }
            }
        }
        if all_hold {
            return false;
        }
        if open_count == 1 {
            // Forced: the open literal must fail.
            let (v, b) = open.expect("one open literal");
            assign[v] = Some(!b);
            let ok = satisfiable(clauses, assign);
            assign[v] = None;
            return ok;
        }
        if open_count != usize::MAX && pick.is_none() {
            pick = open;
        }
    }
    match pick {
        None => true,
        Some((v, b)) => {
            for val in [!b, b] {
                assign[v] = Some(val);
                let ok = satisfiable(clauses, assign);
                assign[v] = None;
                if ok {
                    return true;
                }
            }
            false
        }
    }
}
