//! Text formats: fragment files (one fragment per LF-terminated line) and
//! sequence files (FASTA or raw).

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::seqmodel::{AlphabetMode, FragmentSet, SeqError, Sequence};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: blank lines are not allowed in a fragment file")]
    BlankLine { line: usize },
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: SeqError },
    #[error("input contains no sequence data")]
    Empty,
    #[error(transparent)]
    Seq(#[from] SeqError),
}

/// Reads a fragment file. A missing final newline is tolerated; blank lines
/// are not. A trailing `\r` is stripped so CRLF files are accepted too.
pub fn read_fragments<R: BufRead>(reader: R, mode: AlphabetMode) -> Result<FragmentSet, FormatError> {
    let mut frags = Vec::new();
    for (i, line) in reader.split(b'\n').enumerate() {
        let mut line = line?;
        if line.last() == Some(&b'\r') {
            line.pop();
        }
        if line.is_empty() {
            return Err(FormatError::BlankLine { line: i + 1 });
        }
        if let Err(source) = mode.validate(&line) {
            return Err(FormatError::Invalid { line: i + 1, source });
        }
        frags.push(line);
    }
    if frags.is_empty() {
        return Err(FormatError::Empty);
    }
    Ok(FragmentSet::new(frags, mode)?)
}

pub fn write_fragments<W: Write>(mut out: W, set: &FragmentSet) -> io::Result<()> {
    for f in set.fragments() {
        out.write_all(&f.bytes)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Parses a sequence from FASTA (when the first non-blank byte is `>`) or
/// raw text. Header lines are dropped, sequence lines concatenated and all
/// ASCII whitespace removed. In DNA mode lowercase bases are folded to
/// uppercase before validation.
///
/// Multi-record FASTA files are concatenated into one sequence.
pub fn parse_sequence(data: &[u8], mode: AlphabetMode) -> Result<Sequence, FormatError> {
    let is_fasta = data
        .iter()
        .find(|b| !b.is_ascii_whitespace())
        .is_some_and(|&b| b == b'>');
    let mut bytes = Vec::with_capacity(data.len());
    for line in data.split(|&b| b == b'\n') {
        if is_fasta && line.first() == Some(&b'>') {
            continue;
        }
        bytes.extend(line.iter().copied().filter(|b| !b.is_ascii_whitespace()));
    }
    if mode == AlphabetMode::Dna {
        bytes.make_ascii_uppercase();
    }
    if bytes.is_empty() {
        return Err(FormatError::Empty);
    }
    Ok(Sequence::new(bytes, mode)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fragment_file_round_trip() {
        let set = read_fragments(&b"GATT\nACA\nGGT\n"[..], AlphabetMode::Dna).unwrap();
        assert_eq!(set.len(), 3);
        let mut out = Vec::new();
        write_fragments(&mut out, &set).unwrap();
        assert_eq!(out, b"GATT\nACA\nGGT\n");
    }

    #[test]
    fn fragment_file_edge_cases() {
        let set = read_fragments(&b"GA\r\nTT"[..], AlphabetMode::Dna).unwrap();
        assert_eq!(set.fragment(1), b"TT");
        assert!(matches!(
            read_fragments(&b"GA\n\nTT\n"[..], AlphabetMode::Dna),
            Err(FormatError::BlankLine { line: 2 })
        ));
        assert!(matches!(
            read_fragments(&b"GA\nTN\n"[..], AlphabetMode::Dna),
            Err(FormatError::Invalid { line: 2, .. })
        ));
        assert!(matches!(
            read_fragments(&b""[..], AlphabetMode::Dna),
            Err(FormatError::Empty)
        ));
    }

    #[test]
    fn fasta_and_raw() {
        let fasta = b">chr1 test\nacgt\nGG TT\n>second\nA\n";
        let s = parse_sequence(fasta, AlphabetMode::Dna).unwrap();
        assert_eq!(s.as_bytes(), b"ACGTGGTTA");

        let raw = b"GATTACA\nGGT\n";
        assert_eq!(
            parse_sequence(raw, AlphabetMode::Dna).unwrap().as_bytes(),
            b"GATTACAGGT"
        );

        // no case folding outside DNA mode
        let g = parse_sequence(b"abThat\n", AlphabetMode::GenericByte).unwrap();
        assert_eq!(g.as_bytes(), b"abThat");

        assert!(matches!(
            parse_sequence(b"\n\n", AlphabetMode::Dna),
            Err(FormatError::Empty)
        ));
        assert!(matches!(
            parse_sequence(b">only header\n", AlphabetMode::Dna),
            Err(FormatError::Empty)
        ));
        assert!(parse_sequence(b"ACGN", AlphabetMode::Dna).is_err());
    }
}
