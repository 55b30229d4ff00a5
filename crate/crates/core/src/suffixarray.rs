//! Suffix arrays over fragment concatenations and the prefix queries the
//! assembler runs against them.
//!
//! Suffix order is byte order with the separator (byte 0) lowest and the end
//! of the text lower still. Two suffixes that reach separators at the same
//! offset are ordered by position, as if every separator were a distinct
//! symbol numbered left to right. That makes the order total, and every set
//! of suffixes sharing a separator-free prefix is one contiguous interval.

use std::cmp::Ordering;
use std::ops::Range;

use thiserror::Error;

use crate::parallel::{digit_sort, exclusive_scan, Executor, Rec};
use crate::seqmodel::{FragmentId, FragmentSet, Residual, SEP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SaError {
    #[error("text of {len} bytes exceeds the 2^31-1 byte limit")]
    TextTooLarge { len: usize },
}

/// Largest supported text length.
pub const MAX_TEXT_LEN: usize = i32::MAX as usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixArray {
    pub text_len: usize,
    /// Suffix start positions in sorted order.
    pub sa: Vec<u32>,
    /// Inverse of `sa`: `rank[sa[i]] == i`.
    pub rank: Vec<u32>,
}

impl SuffixArray {
    fn from_sa(sa: Vec<u32>) -> Self {
        let mut rank = vec![0u32; sa.len()];
        for (i, &p) in sa.iter().enumerate() {
            rank[p as usize] = i as u32;
        }
        SuffixArray {
            text_len: sa.len(),
            sa,
            rank,
        }
    }

    pub fn len(&self) -> usize {
        self.text_len
    }

    pub fn is_empty(&self) -> bool {
        self.text_len == 0
    }
}

/// Full suffix comparison under the order described in the module docs.
pub fn compare_suffixes(text: &[u8], a: usize, b: usize) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let (mut i, mut j) = (a, b);
    loop {
        match (text.get(i), text.get(j)) {
            (None, None) => unreachable!("distinct suffixes cannot end together"),
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(&x), Some(&y)) => {
                if x == SEP && y == SEP {
                    return i.cmp(&j);
                }
                match x.cmp(&y) {
                    Ordering::Equal => {}
                    other => return other,
                }
            }
        }
        i += 1;
        j += 1;
    }
}

/// Comparison sort of all suffixes. Quadratic in the worst case; the
/// reference the fast builder is checked against.
///
/// ```
/// let sa = dualcut::suffixarray::build_naive(b"banana");
/// assert_eq!(sa.sa, vec![5, 3, 1, 0, 4, 2]);
/// ```
pub fn build_naive(text: &[u8]) -> SuffixArray {
    let mut sa: Vec<u32> = (0..text.len() as u32).collect();
    sa.sort_unstable_by(|&a, &b| compare_suffixes(text, a as usize, b as usize));
    SuffixArray::from_sa(sa)
}

/// Prefix-doubling construction on the parallel radix sort.
///
/// Initial ranks come from sorting single symbols (separators get distinct
/// ranks in position order). Each round then sorts the pairs
/// `(rank[i], rank[i+h])` with two stable passes, second component first,
/// and re-ranks with an adjacent-difference phase plus a scan. Rank 0 stands
/// for "past the end". The loop stops as soon as every rank is distinct.
///
/// ```
/// use dualcut::parallel::Executor;
/// use dualcut::suffixarray::{build_naive, build_parallel};
///
/// let text = b"mississippi";
/// assert_eq!(build_parallel(text, &Executor::serial()).unwrap(), build_naive(text));
/// ```
pub fn build_parallel(text: &[u8], exec: &Executor) -> Result<SuffixArray, SaError> {
    let n = text.len();
    if n > MAX_TEXT_LEN {
        return Err(SaError::TextTooLarge { len: n });
    }
    if n == 0 {
        return Ok(SuffixArray::from_sa(Vec::new()));
    }

    // separator i (in text order) gets symbol 1 + i, byte b > 0 gets seps + b
    let is_sep: Vec<u32> = text.iter().map(|&b| (b == SEP) as u32).collect();
    let sep_index = exclusive_scan(&is_sep, exec).expect("n < 2^31");
    let seps = sep_index[n - 1] + is_sep[n - 1];
    let mut recs = vec![Rec::default(); n];
    exec.phase(&mut recs, |i, r| {
        let key = if text[i] == SEP {
            1 + sep_index[i]
        } else {
            seps + text[i] as u32
        };
        *r = Rec { key, val: i as u32 };
    });
    let mut order = digit_sort(recs, exec);

    let mut rank = vec![0u32; n];
    let mut distinct = assign_ranks(&order, &mut rank, exec, |a, b| a.key != b.key);

    let mut h = 1usize;
    while distinct < n {
        let second = |p: usize| if p + h < n { rank[p + h] } else { 0 };
        let mut by_second = vec![Rec::default(); n];
        exec.phase(&mut by_second, |i, r| {
            *r = Rec {
                key: second(i),
                val: i as u32,
            }
        });
        let by_second = digit_sort(by_second, exec);
        let mut by_first = vec![Rec::default(); n];
        exec.phase(&mut by_first, |i, r| {
            let p = by_second[i].val;
            *r = Rec {
                key: rank[p as usize],
                val: p,
            }
        });
        order = digit_sort(by_first, exec);

        // pair keys must be captured before ranks are overwritten
        let mut pairs = vec![(0u32, 0u32); n];
        exec.phase(&mut pairs, |i, x| {
            let p = order[i].val as usize;
            *x = (rank[p], second(p));
        });
        distinct = assign_ranks_by(&order, &pairs, &mut rank, exec);
        h *= 2;
    }

    let sa: Vec<u32> = order.iter().map(|r| r.val).collect();
    Ok(SuffixArray::from_sa(sa))
}

// Ranks from "differs from predecessor" flags: rank = inclusive scan, so the
// first group gets 1. Returns the number of distinct groups.
fn assign_ranks<F>(order: &[Rec], rank: &mut [u32], exec: &Executor, differs: F) -> usize
where
    F: Fn(&Rec, &Rec) -> bool + Sync + Send,
{
    let n = order.len();
    let mut flags = vec![0u32; n];
    exec.phase(&mut flags, |i, f| {
        *f = (i == 0 || differs(&order[i - 1], &order[i])) as u32
    });
    scatter_ranks(order, &flags, rank, exec)
}

fn assign_ranks_by(order: &[Rec], pairs: &[(u32, u32)], rank: &mut [u32], exec: &Executor) -> usize {
    let n = order.len();
    let mut flags = vec![0u32; n];
    exec.phase(&mut flags, |i, f| *f = (i == 0 || pairs[i - 1] != pairs[i]) as u32);
    scatter_ranks(order, &flags, rank, exec)
}

fn scatter_ranks(order: &[Rec], flags: &[u32], rank: &mut [u32], exec: &Executor) -> usize {
    let n = order.len();
    let before = exclusive_scan(flags, exec).expect("n < 2^31");
    let mut by_pos = vec![0u32; n];
    // inverse permutation of order, so the rank write is a gather
    let mut slot = vec![0u32; n];
    for (i, r) in order.iter().enumerate() {
        slot[r.val as usize] = i as u32;
    }
    exec.phase(&mut by_pos, |p, x| {
        let i = slot[p] as usize;
        *x = before[i] + flags[i];
    });
    rank.copy_from_slice(&by_pos);
    (before[n - 1] + flags[n - 1]) as usize
}

/// Fragments related to a residual by the prefix relation. Each list is
/// sorted by id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixRelations {
    /// Fragments that are proper prefixes of the residual.
    pub prefixes: Vec<FragmentId>,
    /// Fragments the residual is a proper prefix of.
    pub extensions: Vec<FragmentId>,
    /// Fragments byte-equal to the residual.
    pub exact: Vec<FragmentId>,
}

/// Suffix array over a fragment set's concatenation, with the fragment
/// starts picked out for prefix queries.
///
/// ```
/// use dualcut::parallel::Executor;
/// use dualcut::suffixarray::FragmentIndex;
/// use dualcut::{AlphabetMode, FragmentSet, Residual};
///
/// let set = FragmentSet::new(["GATT", "ACA", "GGT", "GA", "TTAC", "AGGT"], AlphabetMode::Dna).unwrap();
/// let ix = FragmentIndex::build(set, &Executor::serial()).unwrap();
/// let rel = ix.prefix_related_fragments(Residual::new(0, 2)).unwrap(); // "TT"
/// assert_eq!(rel.extensions, vec![4]); // TTAC
/// assert!(rel.prefixes.is_empty());
/// ```
#[derive(Debug, Clone)]
pub struct FragmentIndex {
    set: FragmentSet,
    sa: SuffixArray,
    start_marks: Vec<bool>,
    /// (rank, fragment id) for every fragment start, ascending by rank.
    start_rank_list: Vec<(u32, FragmentId)>,
    /// Distinct fragment lengths, ascending.
    lengths: Vec<usize>,
}

impl FragmentIndex {
    pub fn build(set: FragmentSet, exec: &Executor) -> Result<Self, SaError> {
        let sa = build_parallel(set.concat(), exec)?;
        let mut start_marks = vec![false; sa.len()];
        let mut start_rank_list: Vec<(u32, FragmentId)> = set
            .starts()
            .iter()
            .enumerate()
            .map(|(id, &p)| {
                start_marks[p] = true;
                (sa.rank[p], id)
            })
            .collect();
        start_rank_list.sort_unstable();
        let mut lengths: Vec<usize> = set.fragments().iter().map(|f| f.bytes.len()).collect();
        lengths.sort_unstable();
        lengths.dedup();
        Ok(FragmentIndex {
            set,
            sa,
            start_marks,
            start_rank_list,
            lengths,
        })
    }

    pub fn set(&self) -> &FragmentSet {
        &self.set
    }

    pub fn suffix_array(&self) -> &SuffixArray {
        &self.sa
    }

    pub fn is_fragment_start(&self, pos: usize) -> bool {
        self.start_marks.get(pos).copied().unwrap_or(false)
    }

    pub fn start_rank_list(&self) -> &[(u32, FragmentId)] {
        &self.start_rank_list
    }

    /// Half-open interval of suffix-array slots whose suffixes start with
    /// `pattern`. Empty (`lo == hi`) when nothing matches.
    ///
    /// `pattern` must be non-empty and separator-free.
    pub fn locate_prefix_range(&self, pattern: &[u8]) -> (usize, usize) {
        debug_assert!(!pattern.is_empty() && !pattern.contains(&SEP));
        let r = self.narrow(0..self.sa.len(), pattern);
        (r.start, r.end)
    }

    // Interval for `pattern` searched only inside `within`, which must
    // already contain it (any interval for a prefix of `pattern` does).
    fn narrow(&self, within: Range<usize>, pattern: &[u8]) -> Range<usize> {
        let text = self.set.concat();
        let head = |p: u32| {
            let p = p as usize;
            &text[p..(p + pattern.len()).min(text.len())]
        };
        let slots = &self.sa.sa[within.clone()];
        let lo = slots.partition_point(|&p| head(p) < pattern);
        let hi = lo + slots[lo..].partition_point(|&p| head(p) == pattern);
        within.start + lo..within.start + hi
    }

    // Fragment starts whose rank falls in `slots`, as a sub-slice of the
    // rank-ordered start list.
    fn starts_in(&self, slots: Range<usize>) -> &[(u32, FragmentId)] {
        let list = &self.start_rank_list;
        let lo = list.partition_point(|&(r, _)| (r as usize) < slots.start);
        let hi = list.partition_point(|&(r, _)| (r as usize) < slots.end);
        &list[lo..hi]
    }

    /// Every fragment in the set (used or not) that is a proper prefix of,
    /// a proper extension of, or equal to the residual's bytes.
    pub fn prefix_related_fragments(&self, r: Residual) -> Result<PrefixRelations, crate::SeqError> {
        let view = self.set.residual_view(r)?;
        let mut out = PrefixRelations::default();

        let full = self.narrow(0..self.sa.len(), view);
        for &(_, id) in self.starts_in(full) {
            if self.set.fragment_len(id) > view.len() {
                out.extensions.push(id);
            } else {
                out.exact.push(id);
            }
        }

        // fragments equal to view[..len] are the suffixes "view[..len]\0…"
        // at fragment starts; intervals shrink as len grows
        let mut within = 0..self.sa.len();
        let mut probe = Vec::with_capacity(view.len() + 1);
        for &len in self.lengths.iter().take_while(|&&l| l < view.len()) {
            within = self.narrow(within, &view[..len]);
            if within.is_empty() {
                break;
            }
            probe.clear();
            probe.extend_from_slice(&view[..len]);
            probe.push(SEP);
            let exact = self.narrow(within.clone(), &probe);
            out.prefixes.extend(self.starts_in(exact).iter().map(|&(_, id)| id));
        }

        out.prefixes.sort_unstable();
        out.extensions.sort_unstable();
        out.exact.sort_unstable();
        Ok(out)
    }
}

/// Direct scan over all fragments; the reference for
/// [`FragmentIndex::prefix_related_fragments`].
pub fn prefix_related_naive(set: &FragmentSet, r: Residual) -> Result<PrefixRelations, crate::SeqError> {
    let view = set.residual_view(r)?;
    let mut out = PrefixRelations::default();
    for f in set.fragments() {
        let b = &f.bytes[..];
        match b.len().cmp(&view.len()) {
            Ordering::Less if view.starts_with(b) => out.prefixes.push(f.id),
            Ordering::Greater if b.starts_with(view) => out.extensions.push(f.id),
            Ordering::Equal if b == view => out.exact.push(f.id),
            _ => {}
        }
    }
    Ok(out)
}
