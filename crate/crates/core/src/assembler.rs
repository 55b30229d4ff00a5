//! Reconstruction from the merged fragments of two cuttings.
//!
//! The search keeps one *residual*: the part of the reconstructed prefix
//! covered by only one of the two cuttings so far. It is always a suffix of
//! the fragment that was placed last on the leading side. Each step places
//! one fragment on the trailing side, at the point where that side stops:
//!
//! * `Init(p, q)`: start with two fragments where `p` is a proper prefix of
//!   `q`. The residual is `q` with `p` removed.
//! * `ExtendBy(f)`: the residual is a proper prefix of `f`. The sides swap,
//!   and the rest of `f` becomes the new residual.
//! * `Absorb(f)`: `f` is a proper prefix of the residual, which shrinks.
//! * `Finish(f)`: `f` equals the residual and is the last unused fragment.
//!
//! The search is depth first, with backtracking on dead ends. Candidate
//! order is fixed, so results and traces are reproducible.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::parallel::Executor;
use crate::seqmodel::{FragmentId, FragmentSet, Residual, Sequence};
use crate::suffixarray::{prefix_related_naive, FragmentIndex, PrefixRelations, SaError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Init(FragmentId, FragmentId),
    ExtendBy(FragmentId),
    Absorb(FragmentId),
    Finish(FragmentId),
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Move::Init(p, q) => write!(f, "INIT {p} {q}"),
            Move::ExtendBy(x) => write!(f, "EXT {x}"),
            Move::Absorb(x) => write!(f, "ABS {x}"),
            Move::Finish(x) => write!(f, "FIN {x}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad trace line {line:?}")]
pub struct TraceParseError {
    pub line: String,
}

impl FromStr for Move {
    type Err = TraceParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || TraceParseError { line: s.to_string() };
        let mut parts = s.split_whitespace();
        let tag = parts.next().ok_or_else(err)?;
        let mut id =
            || -> Result<FragmentId, TraceParseError> { parts.next().ok_or_else(err)?.parse().map_err(|_| err()) };
        let mv = match tag {
            "INIT" => {
                let p = id()?;
                Move::Init(p, id()?)
            }
            "EXT" => Move::ExtendBy(id()?),
            "ABS" => Move::Absorb(id()?),
            "FIN" => Move::Finish(id()?),
            _ => return Err(err()),
        };
        if parts.next().is_some() {
            return Err(err());
        }
        Ok(mv)
    }
}

/// One move per line.
pub fn format_trace(trace: &[Move]) -> String {
    trace.iter().map(|m| format!("{m}\n")).collect()
}

/// Inverse of [`format_trace`]. Blank lines are skipped.
pub fn parse_trace(text: &str) -> Result<Vec<Move>, TraceParseError> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.trim().parse())
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes_expanded: u64,
    /// Dead ends: states with no usable candidate.
    pub backtracks: u64,
    pub max_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssemblyError {
    #[error("no reconstruction exists")]
    Unsolvable,
    #[error("search limit reached after {} nodes", .0.nodes_expanded)]
    LimitExceeded(SearchStats),
    #[error("illegal move {mv}: {reason}")]
    IllegalMove { mv: Move, reason: &'static str },
    #[error(transparent)]
    Index(#[from] SaError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_nodes: u64,
    /// Longest move sequence explored; `None` means fragment count + 1.
    pub max_depth: Option<usize>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_nodes: 10_000_000,
            max_depth: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconstructionResult {
    pub sequence: Sequence,
    pub trace: Vec<Move>,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchState {
    remaining: Vec<bool>,
    remaining_count: usize,
    pub residual: Option<Residual>,
    /// Length of the reconstructed prefix, residual included.
    pub rs_len: usize,
    pub trace: Vec<Move>,
}

// What a move changed, for undo.
#[derive(Debug, Clone, Copy)]
struct Undo {
    residual: Option<Residual>,
    rs_len: usize,
}

impl SearchState {
    pub fn new(set: &FragmentSet) -> Self {
        SearchState {
            remaining: vec![true; set.len()],
            remaining_count: set.len(),
            residual: None,
            rs_len: 0,
            trace: Vec::new(),
        }
    }

    pub fn is_remaining(&self, id: FragmentId) -> bool {
        self.remaining.get(id).copied().unwrap_or(false)
    }

    pub fn remaining_mask(&self) -> &[bool] {
        &self.remaining
    }

    pub fn remaining_count(&self) -> usize {
        self.remaining_count
    }

    pub fn remaining_ids(&self) -> impl Iterator<Item = FragmentId> + '_ {
        self.remaining.iter().enumerate().filter(|(_, &r)| r).map(|(i, _)| i)
    }

    pub fn is_solved(&self) -> bool {
        self.remaining_count == 0 && self.residual.is_none() && !self.trace.is_empty()
    }

    fn take(&mut self, id: FragmentId) {
        self.remaining[id] = false;
        self.remaining_count -= 1;
    }

    fn give_back(&mut self, id: FragmentId) {
        self.remaining[id] = true;
        self.remaining_count += 1;
    }

    fn apply(&mut self, set: &FragmentSet, mv: Move) -> Result<Undo, AssemblyError> {
        let illegal = |reason| AssemblyError::IllegalMove { mv, reason };
        let undo = Undo {
            residual: self.residual,
            rs_len: self.rs_len,
        };
        let check_remaining = |s: &Self, id: FragmentId| {
            if s.is_remaining(id) {
                Ok(())
            } else {
                Err(illegal("fragment not available"))
            }
        };
        match mv {
            Move::Init(p, q) => {
                if self.residual.is_some() || !self.trace.is_empty() {
                    return Err(illegal("search already started"));
                }
                check_remaining(self, p)?;
                check_remaining(self, q)?;
                let (pb, qb) = (set.fragment(p), set.fragment(q));
                if p == q || pb.len() >= qb.len() || !qb.starts_with(pb) {
                    return Err(illegal("first fragment is not a proper prefix of the second"));
                }
                self.take(p);
                self.take(q);
                self.residual = Some(Residual::new(q, pb.len()));
                self.rs_len = qb.len();
            }
            Move::ExtendBy(f) | Move::Absorb(f) | Move::Finish(f) => {
                let r = self.residual.ok_or_else(|| illegal("no residual"))?;
                check_remaining(self, f)?;
                let view = set.residual_view(r).map_err(|_| illegal("residual out of range"))?;
                let fb = set.fragment(f);
                match mv {
                    Move::ExtendBy(_) => {
                        if fb.len() <= view.len() || !fb.starts_with(view) {
                            return Err(illegal("residual is not a proper prefix of the fragment"));
                        }
                        self.rs_len += fb.len() - view.len();
                        self.residual = Some(Residual::new(f, view.len()));
                    }
                    Move::Absorb(_) => {
                        if fb.len() >= view.len() || !view.starts_with(fb) {
                            return Err(illegal("fragment is not a proper prefix of the residual"));
                        }
                        self.residual = Some(Residual::new(r.frag, r.offset + fb.len()));
                    }
                    _ => {
                        if fb != view {
                            return Err(illegal("fragment differs from the residual"));
                        }
                        self.residual = None;
                    }
                }
                self.take(f);
            }
        }
        if let Some(r) = self.residual {
            debug_assert!(
                r.offset < set.fragment_len(r.frag),
                "residual must stay a non-empty suffix"
            );
        }
        self.trace.push(mv);
        Ok(undo)
    }

    fn undo(&mut self, undo: Undo) {
        match self.trace.pop().expect("undo without a move") {
            Move::Init(p, q) => {
                self.give_back(p);
                self.give_back(q);
            }
            Move::ExtendBy(f) | Move::Absorb(f) | Move::Finish(f) => self.give_back(f),
        }
        self.residual = undo.residual;
        self.rs_len = undo.rs_len;
    }
}

/// Returns the state after `mv`, or why `mv` is not allowed.
///
/// A `Finish` that leaves fragments unused is allowed here; the result is a
/// dead state (no residual, nothing left to do, not solved).
pub fn apply_move(set: &FragmentSet, state: &SearchState, mv: Move) -> Result<SearchState, AssemblyError> {
    let mut next = state.clone();
    next.apply(set, mv)?;
    Ok(next)
}

/// Answers "which unused fragments are prefix-related to this residual".
pub trait QueryEngine {
    fn set(&self) -> &FragmentSet;

    /// Relations restricted to fragments still marked in `remaining`.
    fn relations(&self, r: Residual, remaining: &[bool]) -> PrefixRelations;
}

/// Scans every fragment on each query.
#[derive(Debug, Clone, Copy)]
pub struct NaiveEngine<'a> {
    set: &'a FragmentSet,
}

impl<'a> NaiveEngine<'a> {
    pub fn new(set: &'a FragmentSet) -> Self {
        NaiveEngine { set }
    }
}

impl QueryEngine for NaiveEngine<'_> {
    fn set(&self) -> &FragmentSet {
        self.set
    }

    fn relations(&self, r: Residual, remaining: &[bool]) -> PrefixRelations {
        let mut rel = prefix_related_naive(self.set, r).expect("residual produced by the search");
        retain_remaining(&mut rel, remaining);
        rel
    }
}

/// Binary searches over a suffix array of the fragment concatenation.
#[derive(Debug, Clone, Copy)]
pub struct IndexedEngine<'a> {
    index: &'a FragmentIndex,
}

impl<'a> IndexedEngine<'a> {
    pub fn new(index: &'a FragmentIndex) -> Self {
        IndexedEngine { index }
    }
}

impl QueryEngine for IndexedEngine<'_> {
    fn set(&self) -> &FragmentSet {
        self.index.set()
    }

    fn relations(&self, r: Residual, remaining: &[bool]) -> PrefixRelations {
        let mut rel = self
            .index
            .prefix_related_fragments(r)
            .expect("residual produced by the search");
        retain_remaining(&mut rel, remaining);
        rel
    }
}

fn retain_remaining(rel: &mut PrefixRelations, remaining: &[bool]) {
    rel.prefixes.retain(|&id| remaining[id]);
    rel.extensions.retain(|&id| remaining[id]);
    rel.exact.retain(|&id| remaining[id]);
}

/// Every pair `(p, q)` of unused fragments with `p` a proper prefix of `q`,
/// ordered by `|p|`, then the bytes of `p`, then the bytes of `q`, then ids.
///
/// ```
/// use dualcut::assembler::{find_fir_pairs, NaiveEngine, SearchState};
/// use dualcut::{AlphabetMode, FragmentSet};
///
/// let set = FragmentSet::new(["a", "ab", "aa", "b"], AlphabetMode::GenericByte).unwrap();
/// let pairs = find_fir_pairs(&NaiveEngine::new(&set), &SearchState::new(&set));
/// assert_eq!(pairs, vec![(0, 2), (0, 1)]); // (a, aa), (a, ab)
/// ```
pub fn find_fir_pairs<E: QueryEngine>(engine: &E, state: &SearchState) -> Vec<(FragmentId, FragmentId)> {
    let set = engine.set();
    let mut pairs = Vec::new();
    for p in state.remaining_ids() {
        let rel = engine.relations(Residual::new(p, 0), state.remaining_mask());
        pairs.extend(rel.extensions.into_iter().map(|q| (p, q)));
    }
    pairs.sort_by(|&(p1, q1), &(p2, q2)| {
        let (a, b) = (set.fragment(p1), set.fragment(p2));
        a.len()
            .cmp(&b.len())
            .then_with(|| a.cmp(b))
            .then_with(|| set.fragment(q1).cmp(set.fragment(q2)))
            .then((p1, q1).cmp(&(p2, q2)))
    });
    pairs
}

/// Order in which the search tries starting pairs: shorter fragments first,
/// ids breaking ties.
fn init_order(set: &FragmentSet, mut pairs: Vec<(FragmentId, FragmentId)>) -> Vec<Move> {
    pairs.sort_by_key(|&(p, q)| (set.fragment_len(p), set.fragment_len(q), p, q));
    pairs.into_iter().map(|(p, q)| Move::Init(p, q)).collect()
}

/// Legal moves from a started state: `Finish` (only when the matching
/// fragment is the last one left), then `Absorb`, then `ExtendBy`; each group
/// ordered by fragment length, then id.
///
/// ```
/// use dualcut::assembler::{apply_move, step_candidates, Move, NaiveEngine, SearchState};
/// use dualcut::{AlphabetMode, FragmentSet};
///
/// let set = FragmentSet::new(["GATT", "ACA", "GGT", "GA", "TTAC", "AGGT"], AlphabetMode::Dna).unwrap();
/// let s = apply_move(&set, &SearchState::new(&set), Move::Init(3, 0)).unwrap();
/// assert_eq!(step_candidates(&NaiveEngine::new(&set), &s), vec![Move::ExtendBy(4)]);
/// ```
pub fn step_candidates<E: QueryEngine>(engine: &E, state: &SearchState) -> Vec<Move> {
    let Some(r) = state.residual else {
        return Vec::new();
    };
    let set = engine.set();
    let rel = engine.relations(r, state.remaining_mask());
    let by_len = |ids: Vec<FragmentId>| {
        let mut ids = ids;
        ids.sort_by_key(|&id| (set.fragment_len(id), id));
        ids
    };
    let mut out = Vec::new();
    if state.remaining_count() == 1 {
        out.extend(rel.exact.iter().map(|&f| Move::Finish(f)));
    }
    out.extend(by_len(rel.prefixes).into_iter().map(Move::Absorb));
    out.extend(by_len(rel.extensions).into_iter().map(Move::ExtendBy));
    out
}

/// Replays a trace from the empty state and returns the reconstructed
/// bytes: the `Init` fragment `q`, then each `ExtendBy` fragment minus the
/// residual it consumed.
pub fn replay_trace(set: &FragmentSet, trace: &[Move]) -> Result<Vec<u8>, AssemblyError> {
    let mut state = SearchState::new(set);
    let mut out = Vec::new();
    for &mv in trace {
        let before = state.residual;
        state.apply(set, mv)?;
        match mv {
            Move::Init(_, q) => out.extend_from_slice(set.fragment(q)),
            Move::ExtendBy(f) => {
                let consumed = before.map_or(0, |r| r.len_in(set));
                out.extend_from_slice(&set.fragment(f)[consumed..]);
            }
            _ => {}
        }
    }
    Ok(out)
}

/// [`reconstruct_with`] using plain scans for every query.
pub fn reconstruct(set: &FragmentSet, limits: SearchLimits) -> Result<ReconstructionResult, AssemblyError> {
    reconstruct_with(&NaiveEngine::new(set), limits)
}

/// Builds a [`FragmentIndex`] and runs [`reconstruct_with`] on it.
pub fn reconstruct_indexed(
    set: &FragmentSet,
    limits: SearchLimits,
    exec: &Executor,
) -> Result<ReconstructionResult, AssemblyError> {
    let index = FragmentIndex::build(set.clone(), exec)?;
    reconstruct_with(&IndexedEngine::new(&index), limits)
}

struct Frame {
    moves: Vec<Move>,
    next: usize,
    // undo record for the move that led into this frame
    entered_by: Option<Undo>,
}

/// Depth-first search for the first reconstruction in candidate order.
///
/// ```
/// use dualcut::assembler::{reconstruct, SearchLimits};
/// use dualcut::{AlphabetMode, FragmentSet};
///
/// let set = FragmentSet::new(["a", "ab", "aa", "b"], AlphabetMode::GenericByte).unwrap();
/// let res = reconstruct(&set, SearchLimits::default()).unwrap();
/// assert_eq!(res.sequence.as_bytes(), b"aab");
/// assert_eq!(res.stats.backtracks, 1);
/// ```
pub fn reconstruct_with<E: QueryEngine>(
    engine: &E,
    limits: SearchLimits,
) -> Result<ReconstructionResult, AssemblyError> {
    let set = engine.set();
    let total = set.total_len();
    if set.is_empty() || total % 2 == 1 {
        return Err(AssemblyError::Unsolvable);
    }
    let target = total / 2;
    let max_depth = limits.max_depth.unwrap_or(set.len() + 1);

    let mut stats = SearchStats::default();
    let mut state = SearchState::new(set);
    let mut depth_cut = false;

    stats.nodes_expanded = 1;
    let roots: Vec<Move> = init_order(set, find_fir_pairs(engine, &state))
        .into_iter()
        .filter(|m| matches!(*m, Move::Init(_, q) if set.fragment_len(q) <= target))
        .collect();
    if roots.is_empty() {
        stats.backtracks = 1;
    }
    let mut stack = vec![Frame {
        moves: roots,
        next: 0,
        entered_by: None,
    }];

    while let Some(top) = stack.last_mut() {
        if top.next == top.moves.len() {
            let frame = stack.pop().expect("non-empty");
            if let Some(undo) = frame.entered_by {
                state.undo(undo);
            }
            continue;
        }
        let mv = top.moves[top.next];
        top.next += 1;
        let undo = state.apply(set, mv)?;
        let depth = state.trace.len();
        stats.max_depth = stats.max_depth.max(depth);

        if state.is_solved() {
            let bytes = replay_trace(set, &state.trace)?;
            debug_assert_eq!(bytes.len(), target);
            let sequence = Sequence::new(bytes, set.mode()).expect("fragments share the set's alphabet");
            return Ok(ReconstructionResult {
                sequence,
                trace: state.trace,
                stats,
            });
        }
        if stats.nodes_expanded >= limits.max_nodes {
            return Err(AssemblyError::LimitExceeded(stats));
        }
        stats.nodes_expanded += 1;

        let moves = if depth >= max_depth {
            depth_cut = true;
            Vec::new()
        } else {
            let rs_len = state.rs_len;
            let r_len = state.residual.map_or(0, |r| r.len_in(set));
            step_candidates(engine, &state)
                .into_iter()
                .filter(|m| match *m {
                    Move::ExtendBy(f) => rs_len + set.fragment_len(f) - r_len <= target,
                    Move::Finish(_) => rs_len == target,
                    _ => true,
                })
                .collect()
        };
        if moves.is_empty() {
            stats.backtracks += 1;
        }
        stack.push(Frame {
            moves,
            next: 0,
            entered_by: Some(undo),
        });
    }

    if depth_cut {
        Err(AssemblyError::LimitExceeded(stats))
    } else {
        Err(AssemblyError::Unsolvable)
    }
}

/// True when the fragments split into two groups that each spell out
/// `candidate` in some order, with no interior cut position shared between
/// the two groups.
///
/// ```
/// use dualcut::assembler::verify_tiling;
/// use dualcut::{AlphabetMode, FragmentSet};
///
/// let set = FragmentSet::new(["a", "ab", "aa", "b"], AlphabetMode::GenericByte).unwrap();
/// assert!(verify_tiling(b"aab", &set));
/// assert!(!verify_tiling(b"aba", &set));
/// ```
pub fn verify_tiling(candidate: &[u8], set: &FragmentSet) -> bool {
    let len = candidate.len();
    if set.is_empty() || len == 0 || set.total_len() != 2 * len {
        return false;
    }
    // distinct fragment strings with multiplicities
    let mut groups: HashMap<&[u8], usize> = HashMap::new();
    for f in set.fragments() {
        *groups.entry(&f.bytes[..]).or_default() += 1;
    }
    let mut lengths: Vec<usize> = groups.keys().map(|b| b.len()).collect();
    lengths.sort_unstable();
    lengths.dedup();

    // frontier[0], frontier[1]: where each tiling currently stops
    struct Node {
        options: Vec<usize>,
        next: usize,
        side: usize,
        placed: Option<usize>,
    }
    let options_at = |frontier: [usize; 2], side: usize, groups: &HashMap<&[u8], usize>| -> Vec<usize> {
        let pos = frontier[side];
        let other = frontier[1 - side];
        lengths
            .iter()
            .copied()
            .filter(|&l| {
                let end = pos + l;
                end <= len && (end == len || end != other) && groups.get(&candidate[pos..end]).is_some_and(|&c| c > 0)
            })
            .collect()
    };
    let pick_side = |frontier: [usize; 2]| if frontier[0] <= frontier[1] { 0 } else { 1 };

    let mut frontier = [0usize, 0];
    let mut stack = vec![Node {
        options: options_at(frontier, 0, &groups),
        next: 0,
        side: 0,
        placed: None,
    }];
    while let Some(top) = stack.last_mut() {
        if top.next == top.options.len() {
            let node = stack.pop().expect("non-empty");
            if let (Some(l), Some(parent)) = (node.placed, stack.last()) {
                let side = parent.side;
                frontier[side] -= l;
                *groups
                    .get_mut(&candidate[frontier[side]..frontier[side] + l])
                    .expect("placed") += 1;
            }
            continue;
        }
        let l = top.options[top.next];
        top.next += 1;
        let side = top.side;
        let pos = frontier[side];
        *groups.get_mut(&candidate[pos..pos + l]).expect("option") -= 1;
        frontier[side] += l;
        if frontier == [len, len] {
            return true;
        }
        let next_side = pick_side(frontier);
        let options = if frontier[next_side] == len {
            Vec::new()
        } else {
            options_at(frontier, next_side, &groups)
        };
        stack.push(Node {
            options,
            next: 0,
            side: next_side,
            placed: Some(l),
        });
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqmodel::AlphabetMode;
    use crate::shotgun::random_instance;
    use proptest::prelude::*;

    fn gattaca() -> FragmentSet {
        FragmentSet::new(["GATT", "ACA", "GGT", "GA", "TTAC", "AGGT"], AlphabetMode::Dna).unwrap()
    }

    fn generic(frags: &[&str]) -> FragmentSet {
        FragmentSet::new(frags, AlphabetMode::GenericByte).unwrap()
    }

    // all pairs, straight from the definition
    fn fir_oracle(set: &FragmentSet) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for p in set.fragments() {
            for q in set.fragments() {
                if p.id != q.id && q.bytes.len() > p.bytes.len() && q.bytes.starts_with(&p.bytes) {
                    out.push((p.id, q.id));
                }
            }
        }
        out
    }

    #[test]
    fn fir_pair_examples() {
        let set = gattaca();
        let s = SearchState::new(&set);
        assert_eq!(find_fir_pairs(&NaiveEngine::new(&set), &s), vec![(3, 0)]);
        let ab = generic(&["a", "ab", "aa", "b"]);
        let s = SearchState::new(&ab);
        assert_eq!(find_fir_pairs(&NaiveEngine::new(&ab), &s), vec![(0, 2), (0, 1)]);
        let xy = generic(&["x", "y"]);
        assert!(find_fir_pairs(&NaiveEngine::new(&xy), &SearchState::new(&xy)).is_empty());
    }

    #[test]
    fn fir_pairs_match_pairwise_oracle() {
        for seed in 0..30 {
            let inst = random_instance(60, 5, 7, AlphabetMode::Dna, seed).unwrap();
            let set = &inst.fragments;
            let mut got = find_fir_pairs(&NaiveEngine::new(set), &SearchState::new(set));
            got.sort_unstable();
            let mut want = fir_oracle(set);
            want.sort_unstable();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn step_examples() {
        let set = gattaca();
        let eng = NaiveEngine::new(&set);
        let s = apply_move(&set, &SearchState::new(&set), Move::Init(3, 0)).unwrap();
        assert_eq!(set.residual_view(s.residual.unwrap()).unwrap(), b"TT");
        assert_eq!(s.rs_len, 4);
        assert_eq!(step_candidates(&eng, &s), vec![Move::ExtendBy(4)]);

        // S = abcdefgh, cuts {2,4} and {6}: ab|cd|efgh and abcdef|gh
        let set = generic(&["ab", "cd", "efgh", "abcdef", "gh"]);
        let eng = NaiveEngine::new(&set);
        let s = apply_move(&set, &SearchState::new(&set), Move::Init(0, 3)).unwrap();
        assert_eq!(set.residual_view(s.residual.unwrap()).unwrap(), b"cdef");
        assert_eq!(step_candidates(&eng, &s), vec![Move::Absorb(1)]);
        let s2 = apply_move(&set, &s, Move::Absorb(1)).unwrap();
        assert_eq!(set.residual_view(s2.residual.unwrap()).unwrap(), b"ef");
        assert_eq!(s2.rs_len, s.rs_len);

        let set = gattaca();
        let eng = NaiveEngine::new(&set);
        let res = reconstruct(&set, SearchLimits::default()).unwrap();
        let mut s = SearchState::new(&set);
        for &mv in &res.trace[..res.trace.len() - 1] {
            s = apply_move(&set, &s, mv).unwrap();
        }
        assert_eq!(set.residual_view(s.residual.unwrap()).unwrap(), b"GGT");
        assert_eq!(step_candidates(&eng, &s), vec![Move::Finish(2)]);
    }

    #[test]
    fn finish_that_strands_fragments_is_dead() {
        let set = generic(&["a", "ab", "aa", "b"]);
        let s = apply_move(&set, &SearchState::new(&set), Move::Init(0, 1)).unwrap();
        assert!(step_candidates(&NaiveEngine::new(&set), &s).is_empty());
        let dead = apply_move(&set, &s, Move::Finish(3)).unwrap();
        assert!(dead.residual.is_none());
        assert!(!dead.is_solved());
        assert_eq!(dead.remaining_ids().collect::<Vec<_>>(), vec![2]);
        assert!(step_candidates(&NaiveEngine::new(&set), &dead).is_empty());
    }

    #[test]
    fn illegal_moves_are_rejected() {
        let set = gattaca();
        let s0 = SearchState::new(&set);
        for mv in [Move::Init(0, 3), Move::Init(3, 3), Move::ExtendBy(4), Move::Init(1, 2)] {
            assert!(
                matches!(apply_move(&set, &s0, mv), Err(AssemblyError::IllegalMove { .. })),
                "{mv}"
            );
        }
        let s = apply_move(&set, &s0, Move::Init(3, 0)).unwrap();
        for mv in [
            Move::Init(3, 0),
            Move::ExtendBy(1),
            Move::Absorb(4),
            Move::Finish(4),
            Move::ExtendBy(0),
        ] {
            assert!(
                matches!(apply_move(&set, &s, mv), Err(AssemblyError::IllegalMove { .. })),
                "{mv}"
            );
        }
    }

    #[test]
    fn reconstruct_examples() {
        let res = reconstruct(&generic(&["a", "ab", "aa", "b"]), SearchLimits::default()).unwrap();
        assert_eq!(res.sequence.as_bytes(), b"aab");
        assert_eq!(res.stats.backtracks, 1);
        assert_eq!(res.trace, vec![Move::Init(0, 2), Move::ExtendBy(1), Move::Finish(3)]);

        let res = reconstruct(&gattaca(), SearchLimits::default()).unwrap();
        assert_eq!(res.sequence.as_bytes(), b"GATTACAGGT");
        assert_eq!(res.stats.backtracks, 0);

        assert_eq!(
            reconstruct(&generic(&["XY", "ZW"]), SearchLimits::default()),
            Err(AssemblyError::Unsolvable)
        );
        assert_eq!(
            reconstruct(&generic(&["ab", "a"]), SearchLimits::default()),
            Err(AssemblyError::Unsolvable)
        );
    }

    #[test]
    fn odd_total_is_unsolvable_without_search() {
        // every fragment would pair up, but 7 bytes cannot be split evenly
        let set = generic(&["a", "ab", "aab", "b"]);
        assert_eq!(
            reconstruct(
                &set,
                SearchLimits {
                    max_nodes: 0,
                    max_depth: None
                }
            ),
            Err(AssemblyError::Unsolvable)
        );
    }

    #[test]
    fn limits_are_enforced() {
        let set = gattaca();
        let tight = SearchLimits {
            max_nodes: 2,
            max_depth: None,
        };
        assert!(matches!(reconstruct(&set, tight), Err(AssemblyError::LimitExceeded(s)) if s.nodes_expanded == 2));
        let shallow = SearchLimits {
            max_nodes: 100,
            max_depth: Some(2),
        };
        assert!(matches!(
            reconstruct(&set, shallow),
            Err(AssemblyError::LimitExceeded(_))
        ));
    }

    #[test]
    fn verify_examples() {
        assert!(verify_tiling(b"GATTACAGGT", &gattaca()));
        assert!(verify_tiling(b"aab", &generic(&["a", "ab", "aa", "b"])));
        let bad = FragmentSet::new(["GATT", "ACA", "GGT", "GA", "TTAC", "AGGA"], AlphabetMode::Dna).unwrap();
        assert!(!verify_tiling(b"GATTACAGGT", &bad));
        // "ab" twice: a shared breakpoint would be needed
        assert!(!verify_tiling(b"ab", &generic(&["a", "b", "a", "b"])));
        assert!(verify_tiling(b"ab", &generic(&["a", "b", "ab"])));
        assert!(!verify_tiling(b"abc", &generic(&["a", "b", "ab"])));
    }

    #[test]
    fn trace_round_trip() {
        let trace = vec![Move::Init(3, 0), Move::ExtendBy(4), Move::Absorb(7), Move::Finish(2)];
        let text = format_trace(&trace);
        assert_eq!(text, "INIT 3 0\nEXT 4\nABS 7\nFIN 2\n");
        assert_eq!(parse_trace(&text).unwrap(), trace);
        assert!(parse_trace("INIT 3\n").is_err());
        assert!(parse_trace("EXT 1 2\n").is_err());
        assert!(parse_trace("JUMP 1\n").is_err());
    }

    #[test]
    fn naive_and_indexed_agree() {
        for seed in 0..40 {
            let mode = if seed % 2 == 0 {
                AlphabetMode::Dna
            } else {
                AlphabetMode::GenericByte
            };
            let inst = random_instance(200, 1 + seed as usize % 9, 1 + seed as usize % 6, mode, seed).unwrap();
            let a = reconstruct(&inst.fragments, SearchLimits::default());
            let b = reconstruct_indexed(&inst.fragments, SearchLimits::default(), &Executor::serial());
            assert_eq!(a, b);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn shotgun_instances_round_trip(len in 2usize..80, seed in any::<u64>(), dna in any::<bool>()) {
            let mode = if dna { AlphabetMode::Dna } else { AlphabetMode::GenericByte };
            let max_cuts = (len - 1).min(8);
            let m = (seed % (max_cuts as u64 + 1)) as usize;
            let n = ((seed >> 8) % ((max_cuts - m) as u64 + 1)) as usize;
            prop_assume!(m + n >= 1);
            let inst = random_instance(len, m, n, mode, seed).unwrap();
            let res = reconstruct(&inst.fragments, SearchLimits::default()).unwrap();
            prop_assert_eq!(res.sequence.len(), len);
            prop_assert!(verify_tiling(res.sequence.as_bytes(), &inst.fragments));
            prop_assert!(verify_tiling(inst.original.as_bytes(), &inst.fragments));
            prop_assert_eq!(replay_trace(&inst.fragments, &res.trace).unwrap(), res.sequence.as_bytes().to_vec());
        }
    }
}
