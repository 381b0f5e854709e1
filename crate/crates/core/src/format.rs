//! Binary file formats: "SLGF" grammars and "LZPF" parses.
//!
//! All integers are little-endian, 64-bit, without padding.
//!
//! ```text
//! SLGF: "SLGF" 0x01 sigma:u64 R:u64 record*R
//!   sequence record: 0x00 L:u64 sym:i64*L
//!   run record:      0x01 base:i64 exponent:u64
//! LZPF: "LZPF" 0x01 n:u64 f:u64 (p:u64 len:u64)*f
//! ```

use std::io::{self, Read, Write};

use thiserror::Error;

use crate::grammar::{Grammar, Rule, SymbolId, Violation};
use crate::lz::{LzError, LzFactorization, Phrase};

pub const GRAMMAR_MAGIC: &[u8; 4] = b"SLGF";
pub const LZ_MAGIC: &[u8; 4] = b"LZPF";
pub const VERSION: u8 = 0x01;

const SEQUENCE: u8 = 0x00;
const RUN: u8 = 0x01;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic {found:?}, expected {expected:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },
    #[error("unsupported version {0}")]
    BadVersion(u8),
    #[error("unknown rule kind {0:#04x}")]
    BadKind(u8),
    #[error("stream truncated")]
    Truncated,
    #[error("trailing bytes after last record")]
    Trailing,
    #[error("decoded grammar is invalid: {0}")]
    Invalid(#[from] Violation),
    #[error("decoded factorization is invalid: {0}")]
    InvalidParse(#[from] LzError),
    #[error("literal value {0} is not a byte")]
    BadLiteral(u64),
    #[error(transparent)]
    Io(io::Error),
}

impl From<io::Error> for FormatError {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::UnexpectedEof {
            FormatError::Truncated
        } else {
            FormatError::Io(e)
        }
    }
}

fn read_u8(r: &mut impl Read) -> Result<u8, FormatError> {
    let mut b = [0u8; 1];
    r.read_exact(&mut b)?;
    Ok(b[0])
}

fn read_u64(r: &mut impl Read) -> Result<u64, FormatError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_header(r: &mut impl Read, expected: &[u8; 4]) -> Result<(), FormatError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != expected {
        return Err(FormatError::BadMagic { expected: *expected, found: magic });
    }
    match read_u8(r)? {
        VERSION => Ok(()),
        v => Err(FormatError::BadVersion(v)),
    }
}

fn expect_eof(r: &mut impl Read) -> Result<(), FormatError> {
    let mut b = [0u8; 1];
    match r.read(&mut b)? {
        0 => Ok(()),
        _ => Err(FormatError::Trailing),
    }
}

pub fn write_grammar(g: &Grammar, w: &mut impl Write) -> io::Result<()> {
    w.write_all(GRAMMAR_MAGIC)?;
    w.write_all(&[VERSION])?;
    w.write_all(&g.alphabet_size.to_le_bytes())?;
    w.write_all(&(g.rules.len() as u64).to_le_bytes())?;
    for rule in &g.rules {
        match rule {
            Rule::Sequence(rhs) => {
                w.write_all(&[SEQUENCE])?;
                w.write_all(&(rhs.len() as u64).to_le_bytes())?;
                for s in rhs {
                    w.write_all(&s.0.to_le_bytes())?;
                }
            }
            Rule::Run { base, exponent } => {
                w.write_all(&[RUN])?;
                w.write_all(&base.0.to_le_bytes())?;
                w.write_all(&exponent.to_le_bytes())?;
            }
        }
    }
    Ok(())
}

pub fn encode_grammar(g: &Grammar) -> Vec<u8> {
    let mut out = Vec::new();
    write_grammar(g, &mut out).expect("writing to a Vec cannot fail");
    out
}

/// Reads a grammar and validates it.
pub fn read_grammar(r: &mut impl Read) -> Result<Grammar, FormatError> {
    read_header(r, GRAMMAR_MAGIC)?;
    let alphabet_size = read_u64(r)?;
    let count = read_u64(r)?;
    let mut rules = Vec::with_capacity(count.min(1 << 20) as usize);
    for _ in 0..count {
        let rule = match read_u8(r)? {
            SEQUENCE => {
                let len = read_u64(r)?;
                let mut rhs = Vec::with_capacity(len.min(1 << 20) as usize);
                for _ in 0..len {
                    rhs.push(SymbolId(read_u64(r)? as i64));
                }
                Rule::Sequence(rhs)
            }
            RUN => Rule::Run { base: SymbolId(read_u64(r)? as i64), exponent: read_u64(r)? },
            k => return Err(FormatError::BadKind(k)),
        };
        rules.push(rule);
    }
    expect_eof(r)?;
    let g = Grammar { alphabet_size, rules };
    g.validate()?;
    Ok(g)
}

pub fn decode_grammar(mut bytes: &[u8]) -> Result<Grammar, FormatError> {
    read_grammar(&mut bytes)
}

pub fn write_factorization(fz: &LzFactorization, w: &mut impl Write) -> io::Result<()> {
    w.write_all(LZ_MAGIC)?;
    w.write_all(&[VERSION])?;
    w.write_all(&fz.original_length.to_le_bytes())?;
    w.write_all(&(fz.phrases.len() as u64).to_le_bytes())?;
    for ph in &fz.phrases {
        let (p, l) = ph.as_pair();
        w.write_all(&p.to_le_bytes())?;
        w.write_all(&l.to_le_bytes())?;
    }
    Ok(())
}

pub fn encode_factorization(fz: &LzFactorization) -> Vec<u8> {
    let mut out = Vec::new();
    write_factorization(fz, &mut out).expect("writing to a Vec cannot fail");
    out
}

pub fn read_factorization(r: &mut impl Read) -> Result<LzFactorization, FormatError> {
    read_header(r, LZ_MAGIC)?;
    let n = read_u64(r)?;
    let f = read_u64(r)?;
    let mut phrases = Vec::with_capacity(f.min(1 << 24) as usize);
    for _ in 0..f {
        let p = read_u64(r)?;
        let l = read_u64(r)?;
        phrases.push(if l == 0 {
            Phrase::Literal(u8::try_from(p).map_err(|_| FormatError::BadLiteral(p))?)
        } else {
            Phrase::Copy { source: p, len: l }
        });
    }
    expect_eof(r)?;
    let fz = LzFactorization::new(phrases, n);
    fz.check()?;
    Ok(fz)
}

pub fn decode_factorization(mut bytes: &[u8]) -> Result<LzFactorization, FormatError> {
    read_factorization(&mut bytes)
}
