//! Instance generation: two complete cuttings of one sequence whose interior
//! breakpoints never coincide, merged into a single shuffled fragment set.
//!
//! All randomness comes from [`ChaCha8Rng`] seeded with a caller-supplied
//! 64-bit seed, so instances are reproducible bit-for-bit.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::seqmodel::{AlphabetMode, FragmentSet, SeqError, Sequence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShotgunError {
    #[error("breakpoint {0} appears in both cuttings")]
    SharedBreakpoint(usize),
    #[error("cut position {position} is outside (0, {len})")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("cut positions must be strictly increasing")]
    NotIncreasing,
    #[error("{requested} cuts do not fit into a sequence of length {len}")]
    TooManyCuts { requested: usize, len: usize },
    #[error(transparent)]
    Seq(#[from] SeqError),
}

/// Strictly increasing interior breakpoints of one cutting.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CutSpec {
    positions: Vec<usize>,
}

impl CutSpec {
    pub fn new(positions: Vec<usize>) -> Result<Self, ShotgunError> {
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ShotgunError::NotIncreasing);
        }
        Ok(CutSpec { positions })
    }

    pub fn empty() -> Self {
        CutSpec::default()
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn is_trivial(&self) -> bool {
        self.positions.is_empty()
    }

    fn check_range(&self, len: usize) -> Result<(), ShotgunError> {
        for &position in &self.positions {
            if position == 0 || position >= len {
                return Err(ShotgunError::PositionOutOfRange { position, len });
            }
        }
        Ok(())
    }

    /// Slices `bytes` at this spec's breakpoints, in positional order.
    pub fn pieces<'a>(&self, bytes: &'a [u8]) -> Vec<&'a [u8]> {
        let mut out = Vec::with_capacity(self.positions.len() + 1);
        let mut prev = 0;
        for &p in self.positions.iter().chain(std::iter::once(&bytes.len())) {
            out.push(&bytes[prev..p]);
            prev = p;
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub original: Sequence,
    pub cuts_a: CutSpec,
    pub cuts_b: CutSpec,
    pub fragments: FragmentSet,
    pub shuffle_seed: u64,
}

impl Instance {
    /// True when at least one cutting leaves the sequence whole.
    pub fn has_trivial_cutting(&self) -> bool {
        self.cuts_a.is_trivial() || self.cuts_b.is_trivial()
    }

    /// Text dump: original length, cuts A, cuts B, then fragments in stored
    /// (shuffled) order, one per line.
    pub fn dump(&self) -> String {
        let join = |c: &CutSpec| {
            c.positions()
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.original.len());
        let _ = writeln!(s, "{}", join(&self.cuts_a));
        let _ = writeln!(s, "{}", join(&self.cuts_b));
        for f in self.fragments.fragments() {
            s.push_str(&String::from_utf8_lossy(&f.bytes));
            s.push('\n');
        }
        s
    }
}

/// Cuts `seq` twice and merges the pieces into one shuffled fragment set.
///
/// ```
/// use dualcut::shotgun::{double_cut, CutSpec};
/// use dualcut::{AlphabetMode, Sequence};
///
/// let seq = Sequence::new("GATTACAGGT", AlphabetMode::Dna).unwrap();
/// let a = CutSpec::new(vec![4, 7]).unwrap();
/// let b = CutSpec::new(vec![2, 6]).unwrap();
/// let inst = double_cut(&seq, &a, &b, 1).unwrap();
/// assert_eq!(inst.fragments.len(), 6);
/// assert_eq!(inst.fragments.total_len(), 20);
/// ```
pub fn double_cut(
    seq: &Sequence,
    cuts_a: &CutSpec,
    cuts_b: &CutSpec,
    shuffle_seed: u64,
) -> Result<Instance, ShotgunError> {
    cuts_a.check_range(seq.len())?;
    cuts_b.check_range(seq.len())?;
    let a: BTreeSet<usize> = cuts_a.positions().iter().copied().collect();
    if let Some(&shared) = cuts_b.positions().iter().find(|p| a.contains(p)) {
        return Err(ShotgunError::SharedBreakpoint(shared));
    }
    let bytes = seq.as_bytes();
    let mut pieces: Vec<&[u8]> = cuts_a.pieces(bytes);
    pieces.extend(cuts_b.pieces(bytes));
    let mut rng = ChaCha8Rng::seed_from_u64(shuffle_seed);
    pieces.shuffle(&mut rng);
    let fragments = FragmentSet::new(pieces, seq.mode())?;
    Ok(Instance {
        original: seq.clone(),
        cuts_a: cuts_a.clone(),
        cuts_b: cuts_b.clone(),
        fragments,
        shuffle_seed,
    })
}

/// Draws `m + n` distinct breakpoints uniformly from `1..len` and splits
/// them into a cutting of size `m` and one of size `n`.
pub fn random_cut_pair(len: usize, m: usize, n: usize, rng_seed: u64) -> Result<(CutSpec, CutSpec), ShotgunError> {
    let interior = len.saturating_sub(1);
    if m + n > interior {
        return Err(ShotgunError::TooManyCuts { requested: m + n, len });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let drawn = index::sample(&mut rng, interior, m + n).into_vec();
    let mut a: Vec<usize> = drawn[..m].iter().map(|i| i + 1).collect();
    let mut b: Vec<usize> = drawn[m..].iter().map(|i| i + 1).collect();
    a.sort_unstable();
    b.sort_unstable();
    Ok((CutSpec { positions: a }, CutSpec { positions: b }))
}

/// Like [`random_cut_pair`], but every two neighbouring positions in
/// `0, breakpoints…, len` are at least `min_gap` apart, so every fragment and
/// every overhang between the two cuttings is at least that long.
///
/// The breakpoints are uniform among all spaced configurations: sorted
/// offsets are drawn from the slack `len - (m + n + 1) * min_gap` and spread
/// out by `min_gap`. Which of them go to the first cutting is a uniform
/// choice of `m`.
pub fn spaced_cut_pair(
    len: usize,
    m: usize,
    n: usize,
    min_gap: usize,
    rng_seed: u64,
) -> Result<(CutSpec, CutSpec), ShotgunError> {
    let total = m + n;
    let min_gap = min_gap.max(1);
    let needed = (total + 1).checked_mul(min_gap);
    let Some(slack) = needed.and_then(|need| len.checked_sub(need)) else {
        return Err(ShotgunError::TooManyCuts { requested: total, len });
    };
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut offsets: Vec<usize> = (0..total).map(|_| rng.gen_range(0..=slack)).collect();
    offsets.sort_unstable();
    let positions: Vec<usize> = offsets.iter().enumerate().map(|(i, u)| u + (i + 1) * min_gap).collect();
    let mut to_a = vec![false; total];
    for i in index::sample(&mut rng, total.max(1), m.min(total)) {
        to_a[i] = true;
    }
    let (mut a, mut b) = (Vec::with_capacity(m), Vec::with_capacity(n));
    for (p, first) in positions.into_iter().zip(to_a) {
        if first {
            a.push(p)
        } else {
            b.push(p)
        }
    }
    Ok((CutSpec { positions: a }, CutSpec { positions: b }))
}

/// Uniform random sequence over the symbols of `mode`.
pub fn random_sequence(len: usize, mode: AlphabetMode, seed: u64) -> Sequence {
    let symbols = mode.symbols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bytes: Vec<u8> = (0..len).map(|_| symbols[rng.gen_range(0..symbols.len())]).collect();
    Sequence::new(bytes, mode).expect("symbols come from the alphabet")
}

/// Convenience wrapper: random sequence, random cut pair, shuffled set. The
/// three random streams are derived from `seed`.
pub fn random_instance(
    len: usize,
    m: usize,
    n: usize,
    mode: AlphabetMode,
    seed: u64,
) -> Result<Instance, ShotgunError> {
    let seq = random_sequence(len, mode, seed);
    let (a, b) = random_cut_pair(len, m, n, seed.wrapping_add(0x9E37_79B9_7F4A_7C15))?;
    double_cut(&seq, &a, &b, seed.rotate_left(17) ^ 0xD1B5_4A32_D192_ED03)
}

/// [`random_instance`] with [`spaced_cut_pair`] breakpoints.
pub fn random_spaced_instance(
    len: usize,
    m: usize,
    n: usize,
    min_gap: usize,
    mode: AlphabetMode,
    seed: u64,
) -> Result<Instance, ShotgunError> {
    let seq = random_sequence(len, mode, seed);
    let (a, b) = spaced_cut_pair(len, m, n, min_gap, seed.wrapping_add(0x9E37_79B9_7F4A_7C15))?;
    double_cut(&seq, &a, &b, seed.rotate_left(17) ^ 0xD1B5_4A32_D192_ED03)
}
