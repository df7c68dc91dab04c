//! Oracle machines as answer-driven continuations, the block-code/subsample
//! operators, composition, and the uniform-continuity modulus.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::codec::{beta1, z_coords, z_index, NatStream};
use crate::error::{Error, Result};
use crate::lang::{avoiding_words, exists_avoiding, Avoider, BlockCode, DEFAULT_ENUM_CAP};
use crate::pattern::{Letter, SubshiftSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Query(u64),
    Halt(u64),
    /// An internal sub-run ran out of budget.
    Stuck,
}

/// A deterministic machine: the next action depends only on the input and
/// the oracle answers received so far.
pub trait OracleMachine: Send + Sync {
    fn name(&self) -> String;

    fn step(&self, input: u64, answers: &[u64]) -> Action;

    /// The full query sequence for `input` when it does not depend on answers.
    fn oblivious_queries(&self, _input: u64) -> Option<Vec<u64>> {
        None
    }

    /// `(code, stride)` when the machine is a block code followed by subsampling.
    fn block_subsample(&self) -> Option<(&BlockCode, usize)> {
        None
    }
}

pub type Machine = Arc<dyn OracleMachine>;

/// Runs `m` on `input`, answering queries with `answer`.
pub fn run_with<F>(m: &dyn OracleMachine, input: u64, budget: u64, mut answer: F) -> Result<u64>
where
    F: FnMut(u64) -> Result<u64>,
{
    if budget == 0 {
        return Err(Error::InvalidParams("step budget must be positive"));
    }
    let mut answers: Vec<u64> = Vec::new();
    for _ in 0..budget {
        match m.step(input, &answers) {
            Action::Halt(v) => return Ok(v),
            Action::Query(q) => answers.push(answer(q)?),
            Action::Stuck => return Err(Error::BudgetExhausted { steps: budget }),
        }
    }
    Err(Error::BudgetExhausted { steps: budget })
}

pub fn run_operator(m: &dyn OracleMachine, oracle: &NatStream, input: u64, budget: u64) -> Result<u64> {
    run_with(m, input, budget, |q| Ok(oracle.get(q)))
}

/// Queries `n`, then halts with the answer.
pub struct IdentityMachine;

impl OracleMachine for IdentityMachine {
    fn name(&self) -> String {
        String::from("identity")
    }

    fn step(&self, input: u64, answers: &[u64]) -> Action {
        match answers.first() {
            None => Action::Query(input),
            Some(&v) => Action::Halt(v),
        }
    }

    fn oblivious_queries(&self, input: u64) -> Option<Vec<u64>> {
        Some(alloc::vec![input])
    }
}

/// Halts with its input without consulting the oracle.
pub struct HeaderMachine;

impl OracleMachine for HeaderMachine {
    fn name(&self) -> String {
        String::from("header")
    }

    fn step(&self, input: u64, _answers: &[u64]) -> Action {
        Action::Halt(input)
    }

    fn oblivious_queries(&self, _input: u64) -> Option<Vec<u64>> {
        Some(Vec::new())
    }
}

/// `masstrad ∘ subsample_m ∘ φ ∘ massdetrad` for a one-dimensional block code.
pub struct BlockSubsample {
    pub code: BlockCode,
    pub stride: usize,
    pub label: String,
}

impl BlockSubsample {
    /// Stream indices read for output cell `beta1(j)`.
    pub fn footprint(&self, j: u64) -> Vec<u64> {
        let centre = self.stride as i64 * beta1(j);
        let r = self.code.radius as i64;
        (-r..=r).map(|t| z_index(&[centre + t]) + 2).collect()
    }
}

pub fn block_subsample_operator(code: BlockCode, stride: usize) -> Result<BlockSubsample> {
    if stride == 0 {
        return Err(Error::InvalidParams("stride must be positive"));
    }
    if code.dimension != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: code.dimension });
    }
    let label = alloc::format!("block(r={},m={})", code.radius, stride);
    Ok(BlockSubsample { code, stride, label })
}

impl OracleMachine for BlockSubsample {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn step(&self, input: u64, answers: &[u64]) -> Action {
        match input {
            0 => Action::Halt(self.code.output.size() as u64),
            1 => Action::Halt(1),
            n => {
                let fp = self.footprint(n - 2);
                if answers.len() < fp.len() {
                    return Action::Query(fp[answers.len()]);
                }
                let s = self.code.input.size() as u64;
                let window: Vec<Letter> = answers[..fp.len()].iter().map(|&a| (a % s) as Letter).collect();
                Action::Halt(self.code.eval(&window) as u64)
            }
        }
    }

    fn oblivious_queries(&self, input: u64) -> Option<Vec<u64>> {
        Some(if input < 2 { Vec::new() } else { self.footprint(input - 2) })
    }

    fn block_subsample(&self) -> Option<(&BlockCode, usize)> {
        Some((&self.code, self.stride))
    }
}

/// `f ∘ g`: each query of `f` is answered by running `g` on the shared oracle.
pub struct Compose {
    pub f: Machine,
    pub g: Machine,
    pub inner_budget: u64,
}

pub fn compose(f: Machine, g: Machine) -> Compose {
    Compose { f, g, inner_budget: 1 << 20 }
}

impl OracleMachine for Compose {
    fn name(&self) -> String {
        alloc::format!("({})∘({})", self.f.name(), self.g.name())
    }

    fn step(&self, input: u64, answers: &[u64]) -> Action {
        let mut f_answers: Vec<u64> = Vec::new();
        let mut cursor = 0usize;
        let mut spent = 0u64;
        loop {
            spent += 1;
            if spent > self.inner_budget {
                return Action::Stuck;
            }
            match self.f.step(input, &f_answers) {
                Action::Halt(v) => return Action::Halt(v),
                Action::Stuck => return Action::Stuck,
                Action::Query(q) => {
                    let mut g_answers: Vec<u64> = Vec::new();
                    loop {
                        spent += 1;
                        if spent > self.inner_budget {
                            return Action::Stuck;
                        }
                        match self.g.step(q, &g_answers) {
                            Action::Halt(v) => {
                                f_answers.push(v);
                                break;
                            }
                            Action::Stuck => return Action::Stuck,
                            Action::Query(x) => {
                                if cursor < answers.len() {
                                    g_answers.push(answers[cursor]);
                                    cursor += 1;
                                } else {
                                    return Action::Query(x);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    fn oblivious_queries(&self, input: u64) -> Option<Vec<u64>> {
        let outer = self.f.oblivious_queries(input)?;
        let mut out = Vec::new();
        for q in outer {
            out.extend(self.g.oblivious_queries(q)?);
        }
        Some(out)
    }
}

/// Indexed family of machines standing in for an enumeration of operators.
#[derive(Clone, Default)]
pub struct OperatorRegistry {
    entries: Vec<(String, Machine)>,
}

impl OperatorRegistry {
    pub fn new() -> Self {
        OperatorRegistry { entries: Vec::new() }
    }

    pub fn push(&mut self, name: impl Into<String>, m: Machine) -> usize {
        self.entries.push((name.into(), m));
        self.entries.len() - 1
    }

    pub fn get(&self, i: usize) -> Result<&Machine> {
        self.entries.get(i).map(|(_, m)| m).ok_or(Error::UnknownOperator(i))
    }

    pub fn name(&self, i: usize) -> Result<&str> {
        self.entries.get(i).map(|(n, _)| n.as_str()).ok_or(Error::UnknownOperator(i))
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|(n, _)| n == name)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ModulusCaps {
    pub max_i: usize,
    pub enum_cap: u64,
    pub step_budget: u64,
}

impl Default for ModulusCaps {
    fn default() -> Self {
        ModulusCaps { max_i: 64, enum_cap: DEFAULT_ENUM_CAP, step_budget: 1 << 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModulusReport {
    pub ell: usize,
    /// No admissible word existed at the returned level.
    pub vacuous: bool,
    /// Words simulated at the returned level; 0 on the oblivious path.
    pub words_tested: u64,
    /// Largest `|cell|` queried at the returned level.
    pub max_queried: i64,
}

fn cell_of(q: u64) -> Option<i64> {
    if q < 2 {
        None
    } else {
        Some(z_coords(q - 2, 1)[0])
    }
}

/// First `i` such that on every word of length `2i+1` avoiding the first `i`
/// forbidden patterns, inputs `0..=r` only query cells inside `[-i, i]`.
pub fn modulus_of_continuity(m: &dyn OracleMachine, r: u64, spec: &SubshiftSpec, caps: ModulusCaps) -> Result<ModulusReport> {
    if spec.dimension != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: spec.dimension });
    }
    let s = spec.alphabet.size();
    let oblivious: Option<Vec<u64>> = (0..=r)
        .map(|n| m.oblivious_queries(n))
        .collect::<Option<Vec<_>>>()
        .map(|v| v.into_iter().flatten().collect());
    for i in 0..=caps.max_i {
        let len = 2 * i + 1;
        let av = Avoider::new(&spec.first(i));
        if let Some(qs) = &oblivious {
            let reach = qs.iter().filter_map(|&q| cell_of(q)).map(i64::abs).max().unwrap_or(0);
            if reach <= i as i64 {
                let vacuous = !exists_avoiding(s, len, &av);
                return Ok(ModulusReport { ell: i, vacuous, words_tested: 0, max_queried: reach });
            }
            if !exists_avoiding(s, len, &av) {
                return Ok(ModulusReport { ell: i, vacuous: true, words_tested: 0, max_queried: 0 });
            }
            continue;
        }
        let mut total: u64 = 1;
        for _ in 0..len {
            total = total.saturating_mul(s as u64);
        }
        if total > caps.enum_cap {
            return Err(Error::CapExceeded { cap: i });
        }
        let words = avoiding_words(s, len, &av);
        if words.is_empty() {
            return Ok(ModulusReport { ell: i, vacuous: true, words_tested: 0, max_queried: 0 });
        }
        let mut ok = true;
        let mut reach = 0i64;
        'words: for w in &words {
            for n in 0..=r {
                let res = run_with(m, n, caps.step_budget, |q| match q {
                    0 => Ok(s as u64),
                    1 => Ok(1),
                    q => {
                        let c = cell_of(q).expect("cell index");
                        reach = reach.max(c.abs());
                        if c.abs() > i as i64 {
                            Err(Error::OutOfWindow)
                        } else {
                            Ok(w[(c + i as i64) as usize] as u64)
                        }
                    }
                });
                match res {
                    Ok(_) => {}
                    Err(Error::OutOfWindow) => {
                        ok = false;
                        break 'words;
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        if ok {
            return Ok(ModulusReport { ell: i, vacuous: false, words_tested: words.len() as u64, max_queried: reach });
        }
    }
    Err(Error::CapExceeded { cap: caps.max_i })
}
