use std::io::{self, Read};

use crate::grammar::{Grammar, GrammarError};

/// Outcome of comparing a grammar's expansion with a text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyReport {
    Match { len: u64 },
    /// First differing byte; `expected` is `None` past the end of the text
    /// and `found` is `None` past the end of the expansion.
    Mismatch { offset: u64, expected: Option<u8>, found: Option<u8> },
}

impl VerifyReport {
    pub fn is_match(&self) -> bool {
        matches!(self, VerifyReport::Match { .. })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

enum Stop {
    Err(VerifyError),
    Mismatch(VerifyReport),
}

impl From<GrammarError> for Stop {
    fn from(e: GrammarError) -> Self {
        Stop::Err(e.into())
    }
}

/// Streams the expansion of `g` against `text` and reports the first
/// mismatch. Extra memory is one chunk plus a stack of grammar depth.
pub fn verify_stream(g: &Grammar, text: &mut impl Read) -> Result<VerifyReport, VerifyError> {
    g.validate().map_err(GrammarError::from)?;
    let start = g.start().ok_or(GrammarError::Empty)?;
    let mut offset = 0u64;
    let mut buf = vec![0u8; 1 << 16];
    let result = g.expand_each(start, |chunk: &[u8]| -> Result<(), Stop> {
        let mut rest = chunk;
        while !rest.is_empty() {
            let want = rest.len().min(buf.len());
            let got = read_full(text, &mut buf[..want]).map_err(|e| Stop::Err(e.into()))?;
            if let Some(i) = (0..got).find(|&i| buf[i] != rest[i]) {
                return Err(Stop::Mismatch(VerifyReport::Mismatch {
                    offset: offset + i as u64,
                    expected: Some(buf[i]),
                    found: Some(rest[i]),
                }));
            }
            if got < want {
                return Err(Stop::Mismatch(VerifyReport::Mismatch {
                    offset: offset + got as u64,
                    expected: None,
                    found: Some(rest[got]),
                }));
            }
            offset += got as u64;
            rest = &rest[got..];
        }
        Ok(())
    });
    match result {
        Ok(()) => {}
        Err(Stop::Mismatch(r)) => return Ok(r),
        Err(Stop::Err(e)) => return Err(e),
    }
    let mut one = [0u8; 1];
    Ok(match read_full(text, &mut one)? {
        0 => VerifyReport::Match { len: offset },
        _ => VerifyReport::Mismatch { offset, expected: Some(one[0]), found: None },
    })
}

fn read_full(r: &mut impl Read, buf: &mut [u8]) -> io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(k) => filled += k,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(filled)
}
