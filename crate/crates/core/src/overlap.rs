//! Overlap graph and superstring baselines.
//!
//! These merge fragments by maximal suffix/prefix overlap. The shortest
//! common superstring they aim for is not, in general, the sequence the
//! fragments were cut from; the assembler answers that question instead.

use std::fmt::Write as _;

use thiserror::Error;

use crate::seqmodel::{FragmentId, FragmentSet, Sequence};

/// Largest `k` the exhaustive search accepts after absorption.
pub const EXACT_LIMIT: usize = 10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OverlapError {
    #[error("fragment set is empty")]
    Empty,
    #[error("{0} fragments after absorption, exhaustive search is limited to {EXACT_LIMIT}")]
    TooLarge(usize),
}

/// Length of the longest suffix of `a` that is also a prefix of `b`.
///
/// Runs the Knuth-Morris-Pratt automaton of `b` over `a`, so the cost is
/// `O(|a| + |b|)`.
///
/// ```
/// use dualcut::overlap::overlap_weight;
///
/// assert_eq!(overlap_weight(b"hatbpaab", b"paabtabh"), 4);
/// assert_eq!(overlap_weight(b"AAA", b"TTT"), 0);
/// ```
pub fn overlap_weight(a: &[u8], b: &[u8]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let fail = failure(b);
    // only the last |b| bytes of a can take part
    let tail = &a[a.len().saturating_sub(b.len())..];
    let mut state = 0;
    for &c in tail {
        if state == b.len() {
            state = fail[state - 1];
        }
        while state > 0 && b[state] != c {
            state = fail[state - 1];
        }
        if b[state] == c {
            state += 1;
        }
    }
    state
}

/// `fail[i]`: length of the longest proper border of `p[..=i]`.
fn failure(p: &[u8]) -> Vec<usize> {
    let mut fail = vec![0; p.len()];
    let mut k = 0;
    for i in 1..p.len() {
        while k > 0 && p[i] != p[k] {
            k = fail[k - 1];
        }
        if p[i] == p[k] {
            k += 1;
        }
        fail[i] = k;
    }
    fail
}

/// Weighted directed graph on fragments: `weight[i][j]` is the overlap of
/// fragment `i` onto fragment `j`, with a zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapGraph {
    pub k: usize,
    pub weight: Vec<Vec<usize>>,
}

impl OverlapGraph {
    pub fn build(set: &FragmentSet) -> Self {
        let k = set.len();
        let weight = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        if i == j {
                            0
                        } else {
                            overlap_weight(set.fragment(i), set.fragment(j))
                        }
                    })
                    .collect()
            })
            .collect();
        OverlapGraph { k, weight }
    }

    /// The matrix as CSV: a header row `from,0,1,…` then one row per source.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("from");
        for j in 0..self.k {
            let _ = write!(out, ",{j}");
        }
        out.push('\n');
        for (i, row) in self.weight.iter().enumerate() {
            let _ = write!(out, "{i}");
            for w in row {
                let _ = write!(out, ",{w}");
            }
            out.push('\n');
        }
        out
    }
}

fn contains(hay: &[u8], needle: &[u8]) -> bool {
    needle.len() <= hay.len() && hay.windows(needle.len()).any(|w| w == needle)
}

/// Ids of the fragments that survive containment absorption, ascending.
///
/// A fragment is dropped when it occurs inside another fragment. Of several
/// identical fragments only the lowest id is kept.
pub fn absorb_contained(set: &FragmentSet) -> Vec<FragmentId> {
    let k = set.len();
    (0..k)
        .filter(|&i| {
            let fi = set.fragment(i);
            !(0..k).any(|j| {
                let fj = set.fragment(j);
                j != i && (fj.len() > fi.len() || (fj == fi && j < i)) && contains(fj, fi)
            })
        })
        .collect()
}

/// Superstring built by greedy merging, together with the fragment order it
/// spells out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Superstring {
    pub sequence: Sequence,
    /// Surviving fragment ids, in the order they appear in `sequence`.
    pub order: Vec<FragmentId>,
}

struct Cluster {
    ids: Vec<FragmentId>,
    bytes: Vec<u8>,
}

/// Greedy merge along maximal overlaps, returning the path it builds.
///
/// Contained fragments are absorbed first. Then, until one string remains,
/// the pair of paths whose junction has the largest overlap is joined; ties
/// go to the lowest `(tail id, head id)` pair.
pub fn greedy_path(set: &FragmentSet) -> Result<Superstring, OverlapError> {
    let kept = absorb_contained(set);
    if kept.is_empty() {
        return Err(OverlapError::Empty);
    }
    let graph = OverlapGraph::build(set);
    let mut clusters: Vec<Cluster> = kept
        .iter()
        .map(|&id| Cluster {
            ids: vec![id],
            bytes: set.fragment(id).to_vec(),
        })
        .collect();
    while clusters.len() > 1 {
        let mut best: Option<(usize, FragmentId, FragmentId, usize, usize)> = None;
        for (a, ca) in clusters.iter().enumerate() {
            let tail = *ca.ids.last().expect("clusters are never empty");
            for (b, cb) in clusters.iter().enumerate() {
                if a == b {
                    continue;
                }
                let head = cb.ids[0];
                let w = graph.weight[tail][head];
                let better = match best {
                    None => true,
                    Some((bw, bt, bh, _, _)) => w > bw || (w == bw && (tail, head) < (bt, bh)),
                };
                if better {
                    best = Some((w, tail, head, a, b));
                }
            }
        }
        let (w, _, _, a, b) = best.expect("at least two clusters");
        let right = clusters.remove(b);
        let left = &mut clusters[if b < a { a - 1 } else { a }];
        left.bytes.extend_from_slice(&right.bytes[w..]);
        left.ids.extend(right.ids);
    }
    let Cluster { ids, bytes } = clusters.pop().expect("one cluster left");
    let sequence = Sequence::new(bytes, set.mode()).expect("merged fragments stay in the alphabet");
    Ok(Superstring { sequence, order: ids })
}

/// Greedy superstring of all fragments.
///
/// ```
/// use dualcut::overlap::greedy_superstring;
/// use dualcut::{AlphabetMode, FragmentSet};
///
/// let set = FragmentSet::new(
///     ["abthatb", "hatbpaab", "tbabhhatbpaa", "paabtabh", "bhaabtpb"],
///     AlphabetMode::GenericByte,
/// )
/// .unwrap();
/// let s = greedy_superstring(&set).unwrap();
/// assert_eq!(s.as_bytes(), b"abthatbabhhatbpaabtabhaabtpb");
/// ```
pub fn greedy_superstring(set: &FragmentSet) -> Result<Sequence, OverlapError> {
    greedy_path(set).map(|s| s.sequence)
}

/// Shortest common superstring by trying every ordering of the fragments
/// left after absorption. Among equally short answers the byte-wise
/// smallest wins.
pub fn exact_superstring_small(set: &FragmentSet) -> Result<Sequence, OverlapError> {
    let kept = absorb_contained(set);
    if kept.is_empty() {
        return Err(OverlapError::Empty);
    }
    if kept.len() > EXACT_LIMIT {
        return Err(OverlapError::TooLarge(kept.len()));
    }
    let graph = OverlapGraph::build(set);
    let mut search = Exhaustive {
        set,
        graph: &graph,
        kept: &kept,
        used: vec![false; kept.len()],
        path: Vec::with_capacity(kept.len()),
        best: None,
    };
    search.run(0);
    let (_, order) = search.best.expect("at least one ordering");
    let bytes = spell(set, &graph, &order);
    Ok(Sequence::new(bytes, set.mode()).expect("merged fragments stay in the alphabet"))
}

fn spell(set: &FragmentSet, graph: &OverlapGraph, order: &[FragmentId]) -> Vec<u8> {
    let mut out = set.fragment(order[0]).to_vec();
    for w in order.windows(2) {
        out.extend_from_slice(&set.fragment(w[1])[graph.weight[w[0]][w[1]]..]);
    }
    out
}

struct Exhaustive<'a> {
    set: &'a FragmentSet,
    graph: &'a OverlapGraph,
    kept: &'a [FragmentId],
    used: Vec<bool>,
    path: Vec<FragmentId>,
    best: Option<(usize, Vec<FragmentId>)>,
}

impl Exhaustive<'_> {
    fn run(&mut self, gained: usize) {
        if self.path.len() == self.kept.len() {
            let replace = match &self.best {
                None => true,
                Some((w, order)) => {
                    gained > *w
                        || (gained == *w
                            && spell(self.set, self.graph, &self.path) < spell(self.set, self.graph, order))
                }
            };
            if replace {
                self.best = Some((gained, self.path.clone()));
            }
            return;
        }
        for slot in 0..self.kept.len() {
            if self.used[slot] {
                continue;
            }
            let id = self.kept[slot];
            let step = self.path.last().map_or(0, |&prev| self.graph.weight[prev][id]);
            self.used[slot] = true;
            self.path.push(id);
            self.run(gained + step);
            self.path.pop();
            self.used[slot] = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqmodel::AlphabetMode;
    use proptest::prelude::*;

    const FIVE: [&str; 5] = ["abthatb", "hatbpaab", "tbabhhatbpaa", "paabtabh", "bhaabtpb"];

    fn generic(frags: &[&str]) -> FragmentSet {
        FragmentSet::new(frags, AlphabetMode::GenericByte).unwrap()
    }

    fn scan_overlap(a: &[u8], b: &[u8]) -> usize {
        (0..=a.len().min(b.len()))
            .rev()
            .find(|&l| a[a.len() - l..] == b[..l])
            .unwrap_or(0)
    }

    #[test]
    fn weight_examples() {
        assert_eq!(overlap_weight(b"abthatb", b"tbabhhatbpaa"), 2);
        assert_eq!(overlap_weight(b"hatbpaab", b"paabtabh"), 4);
        assert_eq!(overlap_weight(b"AAA", b"TTT"), 0);
        assert_eq!(overlap_weight(b"ab", b"ab"), 2);
        assert_eq!(overlap_weight(b"xaaa", b"aab"), 2);
    }

    #[test]
    fn graph_and_csv() {
        let g = OverlapGraph::build(&generic(&["ab", "bc", "ca"]));
        assert_eq!(g.weight, vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]);
        assert_eq!(g.to_csv(), "from,0,1,2\n0,0,1,0\n1,0,0,1\n2,1,0,0\n");
        let set = generic(&FIVE);
        let g = OverlapGraph::build(&set);
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j {
                    0
                } else {
                    scan_overlap(set.fragment(i), set.fragment(j))
                };
                assert_eq!(g.weight[i][j], want);
            }
        }
    }

    #[test]
    fn five_fragment_example() {
        let set = generic(&FIVE);
        let path = greedy_path(&set).unwrap();
        assert_eq!(path.sequence.as_bytes(), b"abthatbabhhatbpaabtabhaabtpb");
        assert_eq!(path.sequence.len(), 28);
        let names: Vec<&str> = path.order.iter().map(|&i| FIVE[i]).collect();
        assert_eq!(names, ["abthatb", "tbabhhatbpaa", "hatbpaab", "paabtabh", "bhaabtpb"]);
        let exact = exact_superstring_small(&set).unwrap();
        assert_eq!(exact.len(), 28);
        for f in FIVE {
            assert!(contains(exact.as_bytes(), f.as_bytes()));
        }
    }

    #[test]
    fn small_cases() {
        assert_eq!(greedy_superstring(&generic(&["AB"])).unwrap().as_bytes(), b"AB");
        assert_eq!(
            exact_superstring_small(&generic(&["a", "ab"])).unwrap().as_bytes(),
            b"ab"
        );
        assert_eq!(greedy_superstring(&generic(&["a", "ab"])).unwrap().as_bytes(), b"ab");
        assert_eq!(absorb_contained(&generic(&["ab", "ab", "b"])), vec![0]);
        assert_eq!(greedy_superstring(&generic(&[])), Err(OverlapError::Empty));
        let eleven: Vec<String> = (0..11)
            .map(|i| format!("{}{}", (b'A' + i) as char, (b'a' + i) as char))
            .collect();
        let set = FragmentSet::new(&eleven, AlphabetMode::GenericByte).unwrap();
        assert_eq!(exact_superstring_small(&set), Err(OverlapError::TooLarge(11)));
        // equal overlap totals resolve to the smallest bytes
        assert_eq!(
            exact_superstring_small(&generic(&["b", "a"])).unwrap().as_bytes(),
            b"ab"
        );
    }

    #[test]
    fn superstring_baselines() {
        let set = FragmentSet::new(["GATT", "ACA", "GGT", "GA", "TTAC", "AGGT"], AlphabetMode::Dna).unwrap();
        let greedy = greedy_superstring(&set).unwrap();
        assert!(greedy.len() <= 43);
        for f in set.fragments() {
            assert!(contains(greedy.as_bytes(), &f.bytes));
        }
        let exact = exact_superstring_small(&set).unwrap();
        assert!(exact.len() <= greedy.len());
        assert_eq!(exact.as_bytes(), b"GATTACAGGT");
        // cut "ACGTACGT" at {4} and {2, 6}: the shortest superstring skips the repeat
        let set = FragmentSet::new(["ACGT", "ACGT", "AC", "GTAC", "GT"], AlphabetMode::Dna).unwrap();
        assert_eq!(exact_superstring_small(&set).unwrap().as_bytes(), b"ACGTAC");
    }

    proptest! {
        #[test]
        fn kmp_matches_scan(a in "[ab]{1,12}", b in "[ab]{1,12}") {
            prop_assert_eq!(overlap_weight(a.as_bytes(), b.as_bytes()), scan_overlap(a.as_bytes(), b.as_bytes()));
        }

        #[test]
        fn exact_never_longer_than_greedy(frags in prop::collection::vec("[ACGT]{1,6}", 1..7)) {
            let set = FragmentSet::new(&frags, AlphabetMode::Dna).unwrap();
            let greedy = greedy_superstring(&set).unwrap();
            let exact = exact_superstring_small(&set).unwrap();
            for f in &frags {
                prop_assert!(contains(greedy.as_bytes(), f.as_bytes()));
                prop_assert!(contains(exact.as_bytes(), f.as_bytes()));
            }
            prop_assert!(exact.len() <= greedy.len());
        }
    }
}
