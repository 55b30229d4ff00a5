//! Value types shared by the whole toolkit.
//!
//! A [`FragmentSet`] keeps every fragment twice: once as its own byte string
//! and once inside a single concatenated text where fragments are joined (and
//! terminated) by the sentinel byte [`SEP`]. The concatenation is what the
//! suffix array in [`crate::suffixarray`] indexes, and `starts` maps fragment
//! ids to their offsets inside it.

use std::fmt;

use thiserror::Error;

/// Separator written between (and after) fragments in [`FragmentSet::concat`].
pub const SEP: u8 = 0;

/// Dense fragment identifier: the fragment's position in input order.
pub type FragmentId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqError {
    #[error("fragment {index} is empty")]
    EmptyFragment { index: usize },
    #[error("invalid byte 0x{value:02x} at position {position}")]
    InvalidByte { position: usize, value: u8 },
    #[error("offset {offset} out of range for fragment {frag} of length {len}")]
    OffsetOutOfRange {
        frag: FragmentId,
        offset: usize,
        len: usize,
    },
    #[error("fragment id {0} does not exist")]
    UnknownFragment(FragmentId),
}

/// Which byte values a sequence may contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum AlphabetMode {
    /// `A`, `C`, `G` and `T` only.
    #[default]
    Dna,
    /// Any printable, non-space ASCII byte (33..=126). Bytes 0..=32 stay
    /// reserved so that sentinels can never collide with sequence content.
    GenericByte,
}

impl AlphabetMode {
    pub fn accepts(self, byte: u8) -> bool {
        match self {
            AlphabetMode::Dna => matches!(byte, b'A' | b'C' | b'G' | b'T'),
            AlphabetMode::GenericByte => (33..=126).contains(&byte),
        }
    }

    /// Returns the first offending byte, if any.
    pub fn validate(self, bytes: &[u8]) -> Result<(), SeqError> {
        match bytes.iter().position(|&b| !self.accepts(b)) {
            Some(position) => Err(SeqError::InvalidByte {
                position,
                value: bytes[position],
            }),
            None => Ok(()),
        }
    }

    /// The symbols of this alphabet in ascending byte order.
    pub fn symbols(self) -> Vec<u8> {
        (0u8..=255).filter(|&b| self.accepts(b)).collect()
    }
}

/// An immutable, alphabet-validated byte string.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Sequence {
    bytes: Vec<u8>,
    mode: AlphabetMode,
}

impl Sequence {
    pub fn new(bytes: impl Into<Vec<u8>>, mode: AlphabetMode) -> Result<Self, SeqError> {
        let bytes = bytes.into();
        mode.validate(&bytes)?;
        Ok(Sequence { bytes, mode })
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn mode(&self) -> AlphabetMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }
}

impl fmt::Debug for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sequence({:?})", String::from_utf8_lossy(&self.bytes))
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&String::from_utf8_lossy(&self.bytes))
    }
}

impl AsRef<[u8]> for Sequence {
    fn as_ref(&self) -> &[u8] {
        &self.bytes
    }
}

/// One input piece. Fragments are only ever created by [`FragmentSet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    pub id: FragmentId,
    pub bytes: Vec<u8>,
}

impl Fragment {
    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }
}

/// An indexed multiset of fragments together with their sentinel-joined
/// concatenation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentSet {
    fragments: Vec<Fragment>,
    concat: Vec<u8>,
    starts: Vec<usize>,
    total_len: usize,
    mode: AlphabetMode,
}

impl FragmentSet {
    /// Builds a set from fragments in input order; ids follow that order.
    ///
    /// ```
    /// use dualcut::{AlphabetMode, FragmentSet};
    ///
    /// let set = FragmentSet::new(["GA", "TT"], AlphabetMode::Dna).unwrap();
    /// assert_eq!(set.concat(), b"GA\0TT\0");
    /// assert_eq!(set.starts(), &[0, 3]);
    /// ```
    pub fn new<I, B>(fragments: I, mode: AlphabetMode) -> Result<Self, SeqError>
    where
        I: IntoIterator<Item = B>,
        B: AsRef<[u8]>,
    {
        let mut out = Vec::new();
        let mut concat = Vec::new();
        let mut starts = Vec::new();
        let mut total_len = 0;
        for (index, raw) in fragments.into_iter().enumerate() {
            let bytes = raw.as_ref();
            if bytes.is_empty() {
                return Err(SeqError::EmptyFragment { index });
            }
            if let Err(SeqError::InvalidByte { position, value }) = mode.validate(bytes) {
                return Err(SeqError::InvalidByte {
                    position: concat.len() + position,
                    value,
                });
            }
            starts.push(concat.len());
            concat.extend_from_slice(bytes);
            concat.push(SEP);
            total_len += bytes.len();
            out.push(Fragment {
                id: index,
                bytes: bytes.to_vec(),
            });
        }
        Ok(FragmentSet {
            fragments: out,
            concat,
            starts,
            total_len,
            mode,
        })
    }

    pub fn len(&self) -> usize {
        self.fragments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fragments.is_empty()
    }

    pub fn fragments(&self) -> &[Fragment] {
        &self.fragments
    }

    pub fn fragment(&self, id: FragmentId) -> &[u8] {
        &self.fragments[id].bytes
    }

    pub fn get(&self, id: FragmentId) -> Option<&[u8]> {
        self.fragments.get(id).map(|f| f.bytes.as_slice())
    }

    pub fn fragment_len(&self, id: FragmentId) -> usize {
        self.fragments[id].bytes.len()
    }

    pub fn concat(&self) -> &[u8] {
        &self.concat
    }

    pub fn starts(&self) -> &[usize] {
        &self.starts
    }

    /// Sum of fragment lengths, excluding separators.
    pub fn total_len(&self) -> usize {
        self.total_len
    }

    pub fn mode(&self) -> AlphabetMode {
        self.mode
    }

    /// Byte view of a residual. Borrowed straight out of the fragment, no
    /// copy is made.
    pub fn residual_view(&self, r: Residual) -> Result<&[u8], SeqError> {
        let frag = self.get(r.frag).ok_or(SeqError::UnknownFragment(r.frag))?;
        if r.offset >= frag.len() {
            return Err(SeqError::OffsetOutOfRange {
                frag: r.frag,
                offset: r.offset,
                len: frag.len(),
            });
        }
        Ok(&frag[r.offset..])
    }
}

/// A non-empty suffix of an original fragment, identified by fragment id and
/// byte offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residual {
    pub frag: FragmentId,
    pub offset: usize,
}

impl Residual {
    pub fn new(frag: FragmentId, offset: usize) -> Self {
        Residual { frag, offset }
    }

    /// Length of the residual's byte view within `set`.
    pub fn len_in(&self, set: &FragmentSet) -> usize {
        set.fragment_len(self.frag) - self.offset
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const FIVE_FRAGMENTS: [&str; 5] = ["abthatb", "hatbpaab", "tbabhhatbpaa", "paabtabh", "bhaabtpb"];

    #[test]
    fn concat_layout() {
        let set = FragmentSet::new(["GA", "TT"], AlphabetMode::Dna).unwrap();
        assert_eq!(set.concat(), b"GA\0TT\0");
        assert_eq!(set.starts(), &[0, 3]);
        assert_eq!(set.total_len(), 4);
    }

    #[test]
    fn generic_example_set() {
        let set = FragmentSet::new(FIVE_FRAGMENTS, AlphabetMode::GenericByte).unwrap();
        assert_eq!(set.len(), 5);
        assert_eq!(set.total_len(), 43);
    }

    #[test]
    fn rejects_empty_and_bad_bytes() {
        assert_eq!(
            FragmentSet::new([""], AlphabetMode::Dna),
            Err(SeqError::EmptyFragment { index: 0 })
        );
        assert_eq!(
            FragmentSet::new(["GA", "TxT"], AlphabetMode::Dna),
            Err(SeqError::InvalidByte {
                position: 4,
                value: b'x'
            })
        );
        // lowercase is not folded at this layer
        assert!(FragmentSet::new(["ga"], AlphabetMode::Dna).is_err());
        assert!(FragmentSet::new(["a b"], AlphabetMode::GenericByte).is_err());
    }

    #[test]
    fn residual_views() {
        let set = FragmentSet::new(["GATT"], AlphabetMode::Dna).unwrap();
        assert_eq!(set.residual_view(Residual::new(0, 2)).unwrap(), b"TT");
        assert_eq!(set.residual_view(Residual::new(0, 0)).unwrap(), b"GATT");
        assert_eq!(
            set.residual_view(Residual::new(0, 4)),
            Err(SeqError::OffsetOutOfRange {
                frag: 0,
                offset: 4,
                len: 4
            })
        );
        assert_eq!(
            set.residual_view(Residual::new(3, 0)),
            Err(SeqError::UnknownFragment(3))
        );
    }

    #[test]
    fn residual_view_borrows_fragment_storage() {
        let set = FragmentSet::new(["GATT"], AlphabetMode::Dna).unwrap();
        let view = set.residual_view(Residual::new(0, 1)).unwrap();
        assert!(std::ptr::eq(view.as_ptr(), set.fragment(0)[1..].as_ptr()));
    }

    proptest! {
        #[test]
        fn split_on_separator_round_trips(frags in prop::collection::vec("[ACGT]{1,12}", 1..20)) {
            let set = FragmentSet::new(&frags, AlphabetMode::Dna).unwrap();
            let pieces: Vec<&[u8]> = set.concat().split(|&b| b == SEP).collect();
            // trailing separator yields one empty tail piece
            prop_assert_eq!(pieces.len(), frags.len() + 1);
            prop_assert!(pieces.last().unwrap().is_empty());
            for (piece, frag) in pieces.iter().zip(&frags) {
                prop_assert_eq!(*piece, frag.as_bytes());
            }
            let sum: usize = frags.iter().map(|f| f.len()).sum();
            prop_assert_eq!(set.total_len(), sum);
            prop_assert_eq!(set.concat().len() - set.len(), sum);
            for i in 0..set.len() {
                let s = set.starts()[i];
                prop_assert_eq!(&set.concat()[s..s + set.fragment_len(i)], set.fragment(i));
                if i + 1 < set.len() {
                    prop_assert_eq!(set.starts()[i + 1], s + set.fragment_len(i) + 1);
                }
            }
        }
    }
}
