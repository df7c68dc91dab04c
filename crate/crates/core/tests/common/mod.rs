#![allow(dead_code)]

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use subshift_core::lang::Avoider;
use subshift_core::oracle::{run_with, OracleMachine};
use subshift_core::skeleton::{self, skeleton_forbidden_stream, SkeletonParams};
use subshift_core::{Error, Letter, SubshiftSpec};

pub fn p4() -> SkeletonParams {
    SkeletonParams::new(4).unwrap()
}

pub fn skeleton_spec(params: SkeletonParams) -> SubshiftSpec {
    SubshiftSpec::stream(skeleton::alphabet(), 1, skeleton_forbidden_stream(params))
}

pub fn cyclic(period: &[Letter], copies: usize) -> Vec<Letter> {
    period.iter().copied().cycle().take(period.len() * copies).collect()
}

/// A random word avoiding `av` that carries `fixed[i]` at every `Some` cell,
/// by randomised depth-first search. `None` if no such word exists.
pub fn random_fill<R: Rng>(rng: &mut R, fixed: &[Option<Letter>], s: u32, av: &Avoider) -> Option<Vec<Letter>> {
    fn go<R: Rng>(rng: &mut R, fixed: &[Option<Letter>], s: u32, av: &Avoider, w: &mut Vec<Letter>) -> bool {
        if w.len() == fixed.len() {
            return true;
        }
        let mut choices: Vec<Letter> = match fixed[w.len()] {
            Some(l) => vec![l],
            None => (0..s).collect(),
        };
        choices.shuffle(rng);
        for l in choices {
            w.push(l);
            if av.ok_last(w) && go(rng, fixed, s, av, w) {
                return true;
            }
            w.pop();
        }
        false
    }
    let mut w = Vec::with_capacity(fixed.len());
    go(rng, fixed, s, av, &mut w).then_some(w)
}

/// Runs `m` on inputs `0..=r` against the word `w` centred at 0, answering
/// headers with `(s, 1)`. A query outside `w` is an error.
pub fn outputs_on(m: &dyn OracleMachine, r: u64, w: &[Letter], s: u32) -> Result<Vec<u64>, Error> {
    let half = (w.len() / 2) as i64;
    (0..=r)
        .map(|n| {
            run_with(m, n, 1 << 16, |q| match q {
                0 => Ok(s as u64),
                1 => Ok(1),
                q => {
                    let c = subshift_core::codec::z_coords(q - 2, 1)[0];
                    if c.abs() > half {
                        Err(Error::OutOfWindow)
                    } else {
                        Ok(w[(c + half) as usize] as u64)
                    }
                }
            })
        })
        .collect()
}

/// Outcome of the modulus contract check.
#[derive(Debug, Default)]
pub struct Contract {
    pub pairs: usize,
    pub mutations: usize,
    pub violations: usize,
}

/// Checks, over `pairs` random pairs of words of radius `ell + pad` that avoid
/// the first `ell` patterns of `spec` and agree on `[-ell, ell]`, that outputs
/// on `0..=r` coincide; then that mutating any one cell outside `[-ell, ell]`
/// of the first word leaves them unchanged.
pub fn modulus_contract<R: Rng>(
    rng: &mut R,
    m: &dyn OracleMachine,
    r: u64,
    spec: &SubshiftSpec,
    ell: usize,
    pad: usize,
    pairs: usize,
) -> Contract {
    let s = spec.alphabet.size();
    let av = Avoider::new(&spec.first(ell));
    let len = 2 * (ell + pad) + 1;
    let mut out = Contract::default();
    for _ in 0..pairs {
        let a = random_fill(rng, &vec![None; len], s, &av).expect("admissible word");
        let fixed: Vec<Option<Letter>> =
            (0..len).map(|i| if i >= pad && i < pad + 2 * ell + 1 { Some(a[i]) } else { None }).collect();
        let b = random_fill(rng, &fixed, s, &av).expect("extension of an admissible centre");
        out.pairs += 1;
        let oa = outputs_on(m, r, &a, s);
        let ob = outputs_on(m, r, &b, s);
        if oa.is_err() || oa != ob {
            out.violations += 1;
            continue;
        }
        let oa = oa.unwrap();
        let outside = rng.gen_range(0..2 * pad);
        let at = if outside < pad { outside } else { outside + 2 * ell + 1 };
        for l in 0..s {
            let mut c = a.clone();
            c[at] = l;
            out.mutations += 1;
            if outputs_on(m, r, &c, s).as_ref() != Ok(&oa) {
                out.violations += 1;
            }
        }
    }
    out
}

pub fn arc<M: OracleMachine + 'static>(m: M) -> Arc<dyn OracleMachine> {
    Arc::new(m)
}

/// Exhaustive search for a word of `3 m_1 + 1 + 2 margin` cells avoiding
/// `pats` whose two layer-1 decoder windows (cells `margin..=margin + 2m` and
/// `margin + m..=margin + 3m`) both decode to 1.
///
/// Structural types are enumerated first, pruned only by type words all of
/// whose bit fillings are forbidden outright; then the coding bits touched by
/// a type-compatible pattern placement or read by a decoder are searched by
/// backtracking, every other coding cell staying `C0`. Any word avoiding
/// `pats` restricts to such a window, so `None` proves that no admissible
/// window of any width has two adjacent layer-1 outputs equal to 1.
pub fn ones_pair_window(params: SkeletonParams, pats: &[subshift_core::PartialPattern], margin: usize) -> Option<Vec<Letter>> {
    use std::collections::{BTreeMap, BTreeSet};
    use subshift_core::skeleton::{ty_of, Ty, C0, C1};

    let m = params.geometry(1).unwrap().m as usize;
    let width = 3 * m + 1 + 2 * margin;
    let norm: Vec<Vec<(usize, Letter)>> = pats
        .iter()
        .filter(|p| p.span() <= width)
        .map(|p| {
            let lo = p.bounds()[0].0;
            p.cells_1d().map(|(o, l)| ((o - lo) as usize, l)).collect()
        })
        .collect();
    // Full words grouped by type word: fillings forbidden per type.
    let mut by_type: BTreeMap<Vec<Ty>, BTreeSet<Vec<Letter>>> = BTreeMap::new();
    for p in &norm {
        let contiguous = p.iter().enumerate().all(|(i, &(o, _))| i == o);
        if contiguous {
            let tys: Vec<Ty> = p.iter().map(|&(_, l)| ty_of(l)).collect();
            by_type.entry(tys).or_default().insert(p.iter().map(|&(_, l)| l).collect());
        }
    }
    let dead: BTreeSet<Vec<Ty>> = by_type
        .into_iter()
        .filter(|(t, f)| f.len() == 1usize << t.iter().filter(|&&x| x == Ty::C).count())
        .map(|(t, _)| t)
        .collect();
    let max_dead = dead.iter().map(Vec::len).max().unwrap_or(0);

    let mut stack: Vec<Vec<Ty>> = vec![Vec::new()];
    while let Some(t) = stack.pop() {
        if t.len() < width {
            for ty in [Ty::L, Ty::R, Ty::C] {
                let mut u = t.clone();
                u.push(ty);
                let n = u.len();
                if (1..=max_dead.min(n)).all(|s| !dead.contains(&u[n - s..])) {
                    stack.push(u);
                }
            }
            continue;
        }
        let base: Vec<Letter> = t.iter().map(|ty| match ty {
            Ty::L => subshift_core::skeleton::LB,
            Ty::R => subshift_core::skeleton::RB,
            Ty::C => C0,
        }).collect();
        let (Ok(a), Ok(b)) = (params.phi_cells(1, &base[margin..margin + 2 * m + 1]), params.phi_cells(1, &base[margin + m..margin + 3 * m + 1])) else {
            continue;
        };
        let reads = [a[0] + margin, b[0] + margin + m];
        // Clauses: each type-compatible placement forbids one filling of its coding cells.
        let mut clauses: Vec<Vec<(usize, bool)>> = Vec::new();
        let mut dead_type = false;
        for p in &norm {
            let span = p.last().unwrap().0 + 1;
            for at in 0..=width - span {
                let fits = p.iter().all(|&(o, l)| match ty_of(l) {
                    Ty::C => t[at + o] == Ty::C,
                    _ => base[at + o] == l,
                });
                if fits {
                    let c: Vec<(usize, bool)> =
                        p.iter().filter(|&&(_, l)| ty_of(l) == Ty::C).map(|&(o, l)| (at + o, l == C1)).collect();
                    if c.is_empty() {
                        dead_type = true;
                    }
                    clauses.push(c);
                }
            }
        }
        if dead_type {
            continue;
        }
        let mut vars: BTreeSet<usize> = clauses.iter().flatten().map(|&(x, _)| x).collect();
        vars.extend(reads);
        let vars: Vec<usize> = vars.into_iter().collect();
        let mut val: BTreeMap<usize, bool> = BTreeMap::new();
        for &r in &reads {
            val.insert(r, true);
        }
        let free: Vec<usize> = vars.into_iter().filter(|x| !val.contains_key(x)).collect();
        if let Some(v) = backtrack(&clauses, &free, &mut val) {
            let mut w = base.clone();
            for (x, bit) in v {
                if bit {
                    w[x] = C1;
                }
            }
            return Some(w);
        }
    }
    None
}

/// Some extension of `val` over `free` violating no clause (a clause is
/// violated when every literal in it holds).
fn backtrack(
    clauses: &[Vec<(usize, bool)>],
    free: &[usize],
    val: &mut std::collections::BTreeMap<usize, bool>,
) -> Option<std::collections::BTreeMap<usize, bool>> {
    let violated = clauses.iter().any(|c| c.iter().all(|(x, b)| val.get(x) == Some(b)));
    if violated {
        return None;
    }
    let Some((&x, rest)) = free.split_first() else {
        return Some(val.clone());
    };
    for b in [false, true] {
        val.insert(x, b);
        if let Some(v) = backtrack(clauses, rest, val) {
            return Some(v);
        }
    }
    val.remove(&x);
    None
}
