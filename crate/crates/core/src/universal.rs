//! Universal subshifts: layer assignment, the dovetailed one-dimensional
//! universal forbidden stream, binary packing with its unpacking operator, and
//! the axis-constant two-dimensional lift.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::codec::{encode_config, z_coords, z_index, Configuration, NatStream};
use crate::error::{Error, Result};
use crate::oracle::{compose, Action, Compose, Machine, OperatorRegistry, OracleMachine};
use crate::pattern::{Alphabet, Letter, PartialPattern, PatternStream, SubshiftSpec};
use crate::skeleton::{self, CellClass, Role, SkeletonForbidden, SkeletonParams, Ty, C0, C1, LB, RB};
use crate::transform::{transform_forbidden, Transformed};

/// Layer-to-target map: a pointer walks the targets, and a layer whose
/// `2^n` letters cannot hold the current target re-codes the previous one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    sizes: Vec<u32>,
}

impl Assignment {
    pub fn new(sizes: Vec<u32>) -> Self {
        Assignment { sizes }
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    /// Target index (0-based) carried by layer `n`, or `None` when unassigned.
    pub fn target(&self, n: usize) -> Option<usize> {
        let mut i = 0usize;
        let mut last = None;
        for layer in 1..=n {
            let fits = i < self.sizes.len() && (layer >= 32 || (self.sizes[i] as u64) <= 1u64 << layer);
            last = if fits {
                i += 1;
                Some(i - 1)
            } else if i > 0 {
                Some(i - 1)
            } else {
                None
            };
        }
        last
    }

    /// First layer carrying target `t`.
    pub fn first_layer(&self, t: usize) -> Option<usize> {
        if t >= self.sizes.len() {
            return None;
        }
        (1..=64 + self.sizes.len()).find(|&n| self.target(n) == Some(t))
    }

    /// Smallest layer by which every target has been placed.
    pub fn covering_layer(&self) -> Option<usize> {
        (0..self.sizes.len()).map(|t| self.first_layer(t)).collect::<Option<Vec<_>>>().map(|v| v.into_iter().max().unwrap_or(1))
    }
}

pub fn assign_layers(targets: &[SubshiftSpec]) -> Assignment {
    Assignment::new(targets.iter().map(|t| t.alphabet.size()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Source {
    Skeleton(usize),
    Layer { layer: usize, index: usize },
}

/// Round-robin union of the skeleton stream and every assigned layer's
/// transformed stream. Layer `n` joins at round `(2(k+2))^(n-1) - 1`, the
/// first round at which its shortest patterns can fit the windows in play;
/// finite layer streams drop out once exhausted.
pub struct UniversalStream {
    params: SkeletonParams,
    assignment: Assignment,
    targets: Vec<SubshiftSpec>,
    skeleton: Arc<SkeletonForbidden>,
    layers: spin::Mutex<BTreeMap<usize, Option<Arc<Transformed>>>>,
    order: spin::Mutex<(usize, Vec<Source>)>,
    /// Layers above this never contribute patterns.
    max_layer: usize,
}

impl UniversalStream {
    pub fn activation_round(&self, n: usize) -> Option<usize> {
        let base = self.params.period() as u128;
        let mut v: u128 = 1;
        for _ in 1..n {
            v = v.checked_mul(base)?;
            if v > usize::MAX as u128 {
                return None;
            }
        }
        Some(v as usize - 1)
    }

    pub fn layer_stream(&self, n: usize) -> Option<Arc<Transformed>> {
        let mut l = self.layers.lock();
        l.entry(n)
            .or_insert_with(|| {
                let t = self.assignment.target(n)?;
                transform_forbidden(self.params, n, &self.targets[t]).ok()
            })
            .clone()
    }

    fn extend_round(&self, order: &mut (usize, Vec<Source>)) {
        let r = order.0;
        order.1.push(Source::Skeleton(r));
        for n in 1..=self.max_layer {
            let Some(t) = self.activation_round(n) else { break };
            if t > r {
                break;
            }
            let Some(ts) = self.layer_stream(n) else { continue };
            let idx = r - t;
            if ts.finite_len().is_some_and(|len| idx >= len) {
                continue;
            }
            order.1.push(Source::Layer { layer: n, index: idx });
        }
        order.0 += 1;
    }

    pub fn source(&self, i: usize) -> Source {
        let mut o = self.order.lock();
        while o.1.len() <= i {
            self.extend_round(&mut o);
        }
        o.1[i]
    }

    pub fn max_layer(&self) -> usize {
        self.max_layer
    }

    pub fn skeleton(&self) -> &Arc<SkeletonForbidden> {
        &self.skeleton
    }
}

impl PatternStream for UniversalStream {
    fn pattern(&self, index: usize) -> PartialPattern {
        match self.source(index) {
            Source::Skeleton(i) => self.skeleton.pattern(i),
            Source::Layer { layer, index } => self
                .layer_stream(layer)
                .and_then(|t| t.get(index))
                .expect("scheduled layer entries exist"),
        }
    }

    fn describe(&self) -> String {
        alloc::format!("universal(k={},targets={})", self.params.k(), self.targets.len())
    }
}

/// The universal subshift with its decoding operators.
pub struct UniversalBundle {
    pub params: SkeletonParams,
    pub targets: Vec<SubshiftSpec>,
    pub assignment: Assignment,
    pub stream: Arc<UniversalStream>,
    pub spec: SubshiftSpec,
    pub registry: OperatorRegistry,
    /// Layer decoded by each registry entry.
    pub registry_layers: Vec<usize>,
}

/// Default cap on layers contributing patterns.
pub const DEFAULT_MAX_LAYER: usize = 12;

pub fn build_universal_1d(targets: Vec<SubshiftSpec>, params: SkeletonParams) -> Result<UniversalBundle> {
    build_universal_1d_with(targets, params, DEFAULT_MAX_LAYER)
}

pub fn build_universal_1d_with(targets: Vec<SubshiftSpec>, params: SkeletonParams, max_layer: usize) -> Result<UniversalBundle> {
    if targets.is_empty() {
        return Err(Error::EmptySet);
    }
    for t in &targets {
        if t.dimension != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: t.dimension });
        }
    }
    let assignment = assign_layers(&targets);
    let covering = assignment.covering_layer().ok_or(Error::InvalidParams("a target never fits a layer"))?;
    if covering > max_layer {
        return Err(Error::InvalidParams("targets need more layers than allowed"));
    }
    let stream = Arc::new(UniversalStream {
        params,
        assignment: assignment.clone(),
        targets: targets.clone(),
        skeleton: skeleton::skeleton_forbidden_stream(params),
        layers: spin::Mutex::new(BTreeMap::new()),
        order: spin::Mutex::new((0, Vec::new())),
        max_layer,
    });
    let spec = SubshiftSpec::stream(skeleton::alphabet(), 1, stream.clone());
    let mut registry = OperatorRegistry::new();
    let mut registry_layers = Vec::new();
    for n in 1..=covering {
        if assignment.target(n).is_some() {
            let op = params.layer_operator(n)?;
            registry.push(alloc::format!("L{n}"), Arc::new(op));
            registry_layers.push(n);
        }
    }
    Ok(UniversalBundle { params, targets, assignment, stream, spec, registry, registry_layers })
}

/// The layer-`n` image stream of `f` alone on top of the skeleton; used to
/// compare a bundle against single-layer constraints.
pub fn single_layer_spec(params: SkeletonParams, layers: &[(usize, SubshiftSpec)]) -> Result<UniversalBundle> {
    // Layers not listed stay unconstrained: give them no target.
    let mut by_layer: BTreeMap<usize, SubshiftSpec> = BTreeMap::new();
    for (n, f) in layers {
        by_layer.insert(*n, f.clone());
    }
    let max_layer = by_layer.keys().copied().max().unwrap_or(1);
    let stream = Arc::new(UniversalStream {
        params,
        assignment: Assignment::new(Vec::new()),
        targets: Vec::new(),
        skeleton: skeleton::skeleton_forbidden_stream(params),
        layers: spin::Mutex::new(BTreeMap::new()),
        order: spin::Mutex::new((0, Vec::new())),
        max_layer,
    });
    {
        let mut l = stream.layers.lock();
        for n in 1..=max_layer {
            let t = match by_layer.get(&n) {
                Some(f) => Some(transform_forbidden(params, n, f)?),
                None => None,
            };
            l.insert(n, t);
        }
    }
    let spec = SubshiftSpec::stream(skeleton::alphabet(), 1, stream.clone());
    let mut registry = OperatorRegistry::new();
    let mut registry_layers = Vec::new();
    for n in 1..=max_layer {
        registry.push(alloc::format!("L{n}"), Arc::new(params.layer_operator(n)?));
        registry_layers.push(n);
    }
    let targets: Vec<SubshiftSpec> = by_layer.values().cloned().collect();
    Ok(UniversalBundle { params, targets, assignment: Assignment::new(Vec::new()), stream, spec, registry, registry_layers })
}

/// Skeleton configuration whose layer-`i` coding cells all carry `x(i-1)`.
/// The single cell belonging to no layer is `C0`.
pub struct Packed {
    params: SkeletonParams,
    bits: NatStream,
}

impl Packed {
    pub fn letter_at(&self, q: i64) -> Letter {
        let per = self.params.period();
        let k = self.params.k() as i64;
        let mut i = q;
        let mut layer = 1u64;
        loop {
            let r = i.rem_euclid(per);
            let u = i.div_euclid(per);
            if r == 0 {
                return LB;
            } else if r <= k {
                return if self.bits.get(layer - 1) == 1 { C1 } else { C0 };
            } else if r == k + 1 {
                return RB;
            }
            if u == i {
                return C0;
            }
            i = u;
            layer += 1;
        }
    }
}

impl Configuration for Packed {
    fn alphabet(&self) -> Alphabet {
        skeleton::alphabet()
    }

    fn dimension(&self) -> usize {
        1
    }

    fn cell(&self, v: &[i64]) -> Letter {
        self.letter_at(v[0])
    }
}

pub fn pack_binary(params: SkeletonParams, x: &NatStream) -> Packed {
    Packed { params, bits: x.clone() }
}

/// Checked variant of [`pack_binary`] over a finite prefix, zero-padded.
pub fn pack_prefix(params: SkeletonParams, prefix: &[u64]) -> Result<Packed> {
    if let Some(&v) = prefix.iter().find(|&&v| v > 1) {
        return Err(Error::NotBit { value: v });
    }
    let p: Vec<u64> = prefix.to_vec();
    Ok(pack_binary(params, &NatStream::from_fn(move |i| p.get(i as usize).copied().unwrap_or(0))))
}

/// Reads the first bit of a layer-`(i+1)` meta coding cell near the origin.
/// Each level is parsed from one queried cell per unit over `4(k+2)+1`
/// consecutive units; the phase found fixes where the next level's units lie.
pub struct Unpack {
    params: SkeletonParams,
}

pub fn unpack_operator(params: SkeletonParams) -> Unpack {
    Unpack { params }
}

impl Unpack {
    /// Real position of the first cell of unit `u` at `level` (1-based),
    /// given the phases of levels below.
    fn unit_position(&self, level: usize, u: i64, phases: &[i64]) -> i64 {
        let per = self.params.period();
        let first_slot = self.params.k() as i64 + 2;
        let mut i = u;
        for l in (1..level).rev() {
            i = i * per + first_slot - phases[l - 1];
        }
        i
    }

    fn letter_of(answer: u64) -> Letter {
        (answer % 4) as Letter
    }
}

impl OracleMachine for Unpack {
    fn name(&self) -> String {
        String::from("unpack")
    }

    fn step(&self, input: u64, answers: &[u64]) -> Action {
        let target = input as usize + 1;
        let per = self.params.period();
        let span = 2 * per;
        let mut cursor = 0usize;
        let mut phases: Vec<i64> = Vec::new();
        for level in 1..=target {
            let units: Vec<i64> = (-span..=span).collect();
            let mut tys: Vec<Ty> = Vec::with_capacity(units.len());
            for &u in &units {
                let q = self.unit_position(level, u, &phases);
                if cursor < answers.len() {
                    tys.push(skeleton::ty_of(Self::letter_of(answers[cursor])));
                    cursor += 1;
                } else {
                    return Action::Query(z_index(&[q]) + 2);
                }
            }
            // Phase of this level: the offset aligning the type sequence with one period.
            let Some(p) = (0..per).find(|&p| {
                units.iter().zip(&tys).all(|(&u, &t)| {
                    let r = (u + p).rem_euclid(per);
                    let want = if r == 0 {
                        Some(Ty::L)
                    } else if r <= self.params.k() as i64 {
                        Some(Ty::C)
                    } else if r == self.params.k() as i64 + 1 {
                        Some(Ty::R)
                    } else {
                        None
                    };
                    want.is_none_or(|w| w == t)
                })
            }) else {
                return Action::Halt(0);
            };
            phases.push(p);
        }
        // First coding unit of the group starting at or after unit 0.
        let p = phases[target - 1];
        let u = (1 - p).rem_euclid(per);
        let q = self.unit_position(target, u, &phases[..target - 1]);
        match answers.get(cursor) {
            Some(&a) => Action::Halt(u64::from(Self::letter_of(a) == C1)),
            None => Action::Query(z_index(&[q]) + 2),
        }
    }
}

/// Uniformity of layer-`n` coding cells: neighbouring real coding cells of one
/// meta coding cell agree, and first cells of consecutive meta coding cells agree.
pub fn uniformity_patterns(params: SkeletonParams, n: usize) -> Result<Vec<PartialPattern>> {
    let g = params.geometry(n)?;
    let mut base: Option<i64> = None;
    let mut coding: Vec<i64> = Vec::new();
    let mut brackets: Vec<(i64, Letter)> = Vec::new();
    for q in 0..g.m as i64 {
        match params.class_at(q, &[], n) {
            CellClass::Structural { layer, role: Role::Left, group: 0 } if layer == n => base = Some(q),
            CellClass::Structural { layer, role: Role::Coding, group: 0 } if layer == n => coding.push(q),
            CellClass::Structural { layer, role, .. } if layer < n && base.is_some() => match role {
                Role::Left => brackets.push((q, LB)),
                Role::Right => brackets.push((q, RB)),
                Role::Coding => {}
            },
            _ => {}
        }
    }
    let base = base.ok_or(Error::InvalidParams("layer has no left bracket"))?;
    let mut out = Vec::new();
    let context = |upto: i64| -> Vec<(i64, Letter)> {
        let mut c = alloc::vec![(0i64, LB)];
        c.extend(brackets.iter().filter(|&&(q, _)| q > base && q <= upto).map(|&(q, l)| (q - base, l)));
        c
    };
    for w in coding.windows(2) {
        for (a, b) in [(C0, C1), (C1, C0)] {
            let mut cells = context(w[1]);
            cells.push((w[0] - base, a));
            cells.push((w[1] - base, b));
            cells.sort();
            out.push(PartialPattern::from_cells_1d(skeleton::alphabet(), &cells)?);
        }
    }
    let m = g.m as i64;
    for (a, b) in [(C0, C1), (C1, C0)] {
        let mut cells = context(coding[0]);
        let shifted: Vec<(i64, Letter)> = cells.iter().map(|&(q, l)| (q + m, l)).collect();
        cells.extend(shifted);
        cells.push((coding[0] - base, a));
        cells.push((coding[0] - base + m, b));
        cells.sort();
        cells.dedup();
        out.push(PartialPattern::from_cells_1d(skeleton::alphabet(), &cells)?);
    }
    Ok(out)
}

/// Skeleton patterns dovetailed with per-layer uniformity patterns.
pub struct PackedStream {
    params: SkeletonParams,
    skeleton: Arc<SkeletonForbidden>,
    extra: Arc<dyn Fn(usize) -> Option<Vec<PartialPattern>> + Send + Sync>,
    cache: spin::Mutex<(usize, Vec<PartialPattern>)>,
}

impl PackedStream {
    fn grow(&self, st: &mut (usize, Vec<PartialPattern>)) {
        let r = st.0;
        st.1.push(self.skeleton.pattern(r));
        // Layer n joins at round P^(n-1) - 1, as in the universal stream.
        if let Some(n) = activated_layer(self.params, r) {
            if let Ok(u) = uniformity_patterns(self.params, n) {
                st.1.extend(u);
            }
        }
        if let Some(more) = (self.extra)(r) {
            st.1.extend(more);
        }
        st.0 += 1;
    }
}

/// The layer whose activation round `P^(n-1) - 1` is `r`, if any.
fn activated_layer(params: SkeletonParams, r: usize) -> Option<usize> {
    let per = params.period() as usize;
    let mut v = 1usize;
    let mut n = 1;
    while v - 1 < r {
        v = v.checked_mul(per)?;
        n += 1;
    }
    (v - 1 == r).then_some(n)
}

impl PatternStream for PackedStream {
    fn pattern(&self, index: usize) -> PartialPattern {
        let mut st = self.cache.lock();
        while st.1.len() <= index {
            self.grow(&mut st);
        }
        st.1[index].clone()
    }
}

/// The packed subshift `X_K`: skeleton configurations whose layers are
/// individually uniform.
pub fn packed_spec(params: SkeletonParams) -> SubshiftSpec {
    SubshiftSpec::stream(
        skeleton::alphabet(),
        1,
        Arc::new(PackedStream {
            params,
            skeleton: skeleton::skeleton_forbidden_stream(params),
            extra: Arc::new(|_| None),
            cache: spin::Mutex::new((0, Vec::new())),
        }),
    )
}

/// Elias-gamma code of `v + 1`.
pub fn gamma_encode(v: u64, out: &mut Vec<u64>) {
    let n = v as u128 + 1;
    let len = 127 - n.leading_zeros() as usize;
    out.extend(core::iter::repeat_n(0, len));
    for j in (0..=len).rev() {
        out.push(((n >> j) & 1) as u64);
    }
}

/// Decodes gamma codes from a bit source; `None` if `next` runs dry.
pub fn gamma_decode<F: FnMut() -> Option<u64>>(mut next: F) -> Option<u64> {
    let mut zeros = 0usize;
    loop {
        match next()? {
            0 => zeros += 1,
            _ => break,
        }
        if zeros > 127 {
            return None;
        }
    }
    let mut n: u128 = 1;
    for _ in 0..zeros {
        n = (n << 1) | next()? as u128;
    }
    Some((n - 1) as u64)
}

/// Bit serialisation of a stream: gamma codes of `w(0), w(1), ...`.
pub fn serialize_stream(w: &NatStream) -> NatStream {
    let w = w.clone();
    NatStream::memoized(move |i| {
        let mut bits = Vec::new();
        let mut n = 0u64;
        while bits.len() as u64 <= i {
            gamma_encode(w.get(n), &mut bits);
            n += 1;
        }
        bits[i as usize]
    })
}

/// On input `n`, reads gamma codes from the oracle (a bit stream) and halts
/// with the `n`-th decoded natural.
pub struct GammaReader;

impl OracleMachine for GammaReader {
    fn name(&self) -> String {
        String::from("gamma")
    }

    fn step(&self, input: u64, answers: &[u64]) -> Action {
        let mut pos = 0usize;
        let mut value = 0;
        for _ in 0..=input {
            let mut it = answers[pos..].iter();
            let mut used = 0usize;
            match gamma_decode(|| {
                used += 1;
                it.next().copied()
            }) {
                Some(v) => {
                    value = v;
                    pos += used;
                }
                None => return Action::Query(answers.len() as u64),
            }
        }
        Action::Halt(value)
    }
}

/// `K_S` with `Psi_S`: packed encodings of the serialised configurations of
/// `S`, and the operator reading them back as configuration streams.
pub struct KsBundle {
    pub spec: SubshiftSpec,
    pub psi: Compose,
    pub params: SkeletonParams,
}

/// Packed encoding of a configuration of `S`.
pub fn ks_encode(params: SkeletonParams, c: Arc<dyn Configuration>) -> Packed {
    pack_binary(params, &serialize_stream(&encode_config(c)))
}

pub fn build_ks(source: &SubshiftSpec, params: SkeletonParams) -> Result<KsBundle> {
    let s = source.alphabet.size() as u64;
    let d = source.dimension;
    let src = source.clone();
    // When layer t activates, forbid every bit prefix of length t that is a
    // complete serialisation of a bad header, a cell value >= s, or a
    // forbidden pattern among decoded cells; prefixes are pinned via each
    // layer's first cell at every relative phase of one period of depth t.
    let extra = move |r: usize| -> Option<Vec<PartialPattern>> {
        let t = activated_layer(params, r)?;
        let mut out = Vec::new();
        for u in 0..(1u64 << t) {
            let bits: Vec<u64> = (0..t).rev().map(|j| (u >> j) & 1).collect();
            if !ks_prefix_bad(&bits, s, d, &src) {
                continue;
            }
            let parent_bad = t > 1 && ks_prefix_bad(&bits[..t - 1], s, d, &src);
            if parent_bad {
                continue;
            }
            out.extend(pin_prefix(params, &bits).ok()?);
        }
        Some(out)
    };
    let stream = PackedStream {
        params,
        skeleton: skeleton::skeleton_forbidden_stream(params),
        extra: Arc::new(extra),
        cache: spin::Mutex::new((0, Vec::new())),
    };
    let spec = SubshiftSpec::stream(skeleton::alphabet(), 1, Arc::new(stream));
    let psi = compose(Arc::new(GammaReader) as Machine, Arc::new(unpack_operator(params)) as Machine);
    Ok(KsBundle { spec, psi, params })
}

/// Whether the decoded prefix already rules out every configuration of `S`.
fn ks_prefix_bad(bits: &[u64], s: u64, d: usize, spec: &SubshiftSpec) -> bool {
    let mut it = bits.iter().copied();
    let mut vals = Vec::new();
    while let Some(v) = gamma_decode(|| it.next()) {
        vals.push(v);
    }
    if vals.first().is_some_and(|&v| v != s) || vals.get(1).is_some_and(|&v| v != d as u64) {
        return true;
    }
    if vals.iter().skip(2).any(|&v| v >= s) {
        return true;
    }
    if d == 1 && vals.len() > 2 {
        let cells: BTreeMap<i64, Letter> =
            vals[2..].iter().enumerate().map(|(n, &v)| (z_coords(n as u64, 1)[0], v as Letter)).collect();
        for p in spec.first(vals.len()) {
            let (lo, hi) = p.bounds()[0];
            for c in cells.keys() {
                let off = c - lo;
                let fits = (lo..=hi).all(|x| cells.contains_key(&(x + off)));
                if fits && p.cells_1d().all(|(o, l)| cells.get(&(o + off)) == Some(&l)) {
                    return true;
                }
            }
        }
    }
    false
}

/// Patterns pinning the first coding cell of layers `1..=t` to `bits`, one
/// pattern per phase of a depth-`t` period, with every bracket of that period.
fn pin_prefix(params: SkeletonParams, bits: &[u64]) -> Result<Vec<PartialPattern>> {
    let t = bits.len();
    let m = params.geometry(t)?.m as i64;
    let mut out = Vec::new();
    for o in 0..m {
        let mut cells: Vec<(i64, Letter)> = Vec::new();
        let mut seen = alloc::vec![false; t];
        for q in 0..m {
            match params.class_at(q + o, &[], t) {
                CellClass::Structural { role: Role::Left, .. } => cells.push((q, LB)),
                CellClass::Structural { role: Role::Right, .. } => cells.push((q, RB)),
                CellClass::Structural { layer, role: Role::Coding, .. } if !seen[layer - 1] => {
                    seen[layer - 1] = true;
                    cells.push((q, if bits[layer - 1] == 1 { C1 } else { C0 }));
                }
                _ => {}
            }
        }
        if seen.iter().all(|&s| s) {
            out.push(PartialPattern::from_cells_1d(skeleton::alphabet(), &cells)?);
        }
    }
    Ok(out)
}

/// Two-dimensional lift: rows obey the one-dimensional spec, and the
/// structural type of a cell is constant along its column.
pub struct LiftedStream {
    rows: SubshiftSpec,
    vertical: Vec<PartialPattern>,
}

impl PatternStream for LiftedStream {
    fn pattern(&self, index: usize) -> PartialPattern {
        if index < self.vertical.len() {
            return self.vertical[index].clone();
        }
        let p = self.rows.pattern(index - self.vertical.len()).expect("row stream is total");
        let cells = p.cells_1d().map(|(x, l)| (alloc::vec![x, 0], l)).collect();
        PartialPattern::new(p.alphabet(), 2, cells).expect("embedded row pattern")
    }
}

/// Vertical pairs `(below, above)` with different structural types.
pub fn vertical_type_patterns() -> Vec<PartialPattern> {
    let mut out = Vec::new();
    for a in [LB, RB, C0, C1] {
        for b in [LB, RB, C0, C1] {
            if skeleton::ty_of(a) != skeleton::ty_of(b) {
                let cells = alloc::vec![(alloc::vec![0, 0], a), (alloc::vec![0, 1], b)];
                out.push(PartialPattern::new(skeleton::alphabet(), 2, cells).expect("static"));
            }
        }
    }
    out
}

pub fn axis_constant_lift(spec_1d: &SubshiftSpec) -> Result<SubshiftSpec> {
    if spec_1d.dimension != 1 || spec_1d.alphabet != skeleton::alphabet() {
        return Err(Error::InvalidParams("lift expects a one-dimensional skeleton spec"));
    }
    let vertical = vertical_type_patterns();
    let sft_bound = spec_1d.sft_bound.map(|b| b + vertical.len());
    Ok(SubshiftSpec {
        alphabet: spec_1d.alphabet,
        dimension: 2,
        forbidden: crate::pattern::Forbidden::Stream(Arc::new(LiftedStream { rows: spec_1d.clone(), vertical })),
        sft_bound,
    })
}

/// Layer-`n` letters of one row: the decoder on each window of `2 m_n + 1`
/// cells at stride `m_n`. A row shorter than one window yields the decoder on
/// the whole row, when that holds a complete meta coding cell.
pub fn decode_row(params: SkeletonParams, n: usize, row: &[Letter]) -> Vec<Letter> {
    let g = match params.geometry(n) {
        Ok(g) => g,
        Err(_) => return Vec::new(),
    };
    let width = (2 * g.radius + 1) as usize;
    if row.len() < width {
        return params.phi_any(n, row).map(|v| alloc::vec![v]).unwrap_or_default();
    }
    let mut out = Vec::new();
    let mut start = 0usize;
    while start + width <= row.len() {
        out.push(params.phi_any(n, &row[start..start + width]).unwrap_or(0));
        start += g.m as usize;
    }
    out
}
