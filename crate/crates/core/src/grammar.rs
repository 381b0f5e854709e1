//! Grammar value types shared by every stage: straight-line grammars (SLG),
//! their binary restriction (SLP) and run-length SLPs (RLSLP).
//!
//! Symbols are signed 64-bit integers. A negative value `-(c + 1)` is the
//! terminal byte `c`; a positive value `k` names the nonterminal defined by
//! rule `k` (1-based). Rules may only reference rules with a smaller index,
//! and the start symbol is always the last rule.

use std::fmt;

use thiserror::Error;

/// A grammar symbol: terminal (negative) or 1-based rule reference (positive).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolId(pub i64);

impl SymbolId {
    pub const fn terminal(byte: u8) -> Self {
        SymbolId(-(byte as i64) - 1)
    }

    /// Reference to the rule at 0-based position `index`.
    pub const fn rule(index: usize) -> Self {
        SymbolId(index as i64 + 1)
    }

    pub fn is_terminal(self) -> bool {
        self.0 < 0
    }

    /// Terminal code `c` for a terminal symbol.
    pub fn terminal_code(self) -> Option<u64> {
        (self.0 < 0).then(|| (-(self.0 + 1)) as u64)
    }

    /// 0-based rule index for a nonterminal symbol.
    pub fn rule_index(self) -> Option<usize> {
        (self.0 > 0).then(|| (self.0 - 1) as usize)
    }

    /// Injective ordering key: terminals first by code, then rules by index.
    ///
    /// Plays the role of `|x|` when normalizing adjacent pairs, without the
    /// clash between terminal `-k` and rule `k`.
    pub fn order_key(self) -> u64 {
        if self.0 < 0 {
            (-(self.0 + 1)) as u64
        } else {
            (1u64 << 63) | self.0 as u64
        }
    }
}

impl fmt::Debug for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.terminal_code() {
            Some(c) if (0x21..0x7f).contains(&c) => write!(f, "'{}'", c as u8 as char),
            Some(c) => write!(f, "t{c}"),
            None => write!(f, "N{}", self.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Sequence(Vec<SymbolId>),
    Run { base: SymbolId, exponent: u64 },
}

impl Rule {
    pub fn pair(a: SymbolId, b: SymbolId) -> Self {
        Rule::Sequence(vec![a, b])
    }

    /// Size contribution: rhs length for sequences, 2 for runs.
    pub fn size(&self) -> u64 {
        match self {
            Rule::Sequence(rhs) => rhs.len() as u64,
            Rule::Run { .. } => 2,
        }
    }

    /// Symbols referenced on the right-hand side, without repetition counts.
    pub fn symbols(&self) -> &[SymbolId] {
        match self {
            Rule::Sequence(rhs) => rhs,
            Rule::Run { base, .. } => std::slice::from_ref(base),
        }
    }
}

/// An ordered rule list; the last rule is the start symbol.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Grammar {
    pub alphabet_size: u64,
    pub rules: Vec<Rule>,
}

/// First invariant violation found by [`Grammar::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("rule {rule} has an empty right-hand side")]
    EmptyRhs { rule: usize },
    #[error("rule {rule} is a run with exponent {exponent} < 2")]
    DegenerateRun { rule: usize, exponent: u64 },
    #[error("rule {rule} references rule {target} which is not defined before it")]
    ForwardReference { rule: usize, target: i64 },
    #[error("rule {rule} uses terminal {code} outside alphabet of size {alphabet_size}")]
    TerminalOutOfRange { rule: usize, code: u64, alphabet_size: u64 },
    #[error("symbol id 0 in rule {rule}")]
    ZeroSymbol { rule: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("invalid grammar: {0}")]
    Invalid(#[from] Violation),
    #[error("grammar has no rules")]
    Empty,
    #[error("rule index {0} out of range")]
    NoSuchRule(usize),
    #[error("expansion length exceeds 2^63 - 1")]
    LengthOverflow,
    #[error("terminal {0} is not a byte")]
    NonByteTerminal(u64),
}

/// Total grammar size and number of productions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrammarSize {
    pub size: u64,
    pub productions: u64,
}

impl Grammar {
    pub fn new(alphabet_size: u64, rules: Vec<Rule>) -> Self {
        Grammar { alphabet_size, rules }
    }

    /// A grammar over the byte alphabet.
    pub fn bytes(rules: Vec<Rule>) -> Self {
        Grammar::new(256, rules)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn start(&self) -> Option<SymbolId> {
        (!self.rules.is_empty()).then(|| SymbolId::rule(self.rules.len() - 1))
    }

    pub fn validate(&self) -> Result<(), Violation> {
        for (i, rule) in self.rules.iter().enumerate() {
            let rule_no = i + 1;
            match rule {
                Rule::Sequence(rhs) if rhs.is_empty() => {
                    return Err(Violation::EmptyRhs { rule: rule_no })
                }
                Rule::Run { exponent, .. } if *exponent < 2 => {
                    return Err(Violation::DegenerateRun { rule: rule_no, exponent: *exponent })
                }
                _ => {}
            }
            for &sym in rule.symbols() {
                if sym.0 == 0 {
                    return Err(Violation::ZeroSymbol { rule: rule_no });
                }
                if let Some(code) = sym.terminal_code() {
                    if code >= self.alphabet_size {
                        return Err(Violation::TerminalOutOfRange {
                            rule: rule_no,
                            code,
                            alphabet_size: self.alphabet_size,
                        });
                    }
                } else if sym.0 as usize >= rule_no {
                    return Err(Violation::ForwardReference { rule: rule_no, target: sym.0 });
                }
            }
        }
        Ok(())
    }

    /// |exp(A_i)| for every rule, bottom-up.
    pub fn expansion_lengths(&self) -> Result<Vec<u64>, GrammarError> {
        self.validate()?;
        let mut lengths: Vec<u64> = Vec::with_capacity(self.rules.len());
        let sym_len = |lengths: &[u64], s: SymbolId| match s.rule_index() {
            Some(i) => lengths[i],
            None => 1,
        };
        for rule in &self.rules {
            let len = match rule {
                Rule::Sequence(rhs) => rhs.iter().try_fold(0u64, |acc, &s| {
                    acc.checked_add(sym_len(&lengths, s))
                }),
                Rule::Run { base, exponent } => sym_len(&lengths, *base).checked_mul(*exponent),
            };
            match len {
                Some(l) if l <= i64::MAX as u64 => lengths.push(l),
                _ => return Err(GrammarError::LengthOverflow),
            }
        }
        Ok(lengths)
    }

    pub fn grammar_size(&self) -> GrammarSize {
        GrammarSize {
            size: self.rules.iter().map(Rule::size).sum(),
            productions: self.rules.len() as u64,
        }
    }

    /// Expansion of the start symbol.
    pub fn expand(&self) -> Result<Vec<u8>, GrammarError> {
        let last = self.rules.len().checked_sub(1).ok_or(GrammarError::Empty)?;
        self.expand_rule(last)
    }

    /// Expansion of the rule at 0-based `index`.
    pub fn expand_rule(&self, index: usize) -> Result<Vec<u8>, GrammarError> {
        if index >= self.rules.len() {
            return Err(GrammarError::NoSuchRule(index));
        }
        let lengths = self.expansion_lengths()?;
        let mut out = Vec::with_capacity(lengths[index] as usize);
        self.expand_each(SymbolId::rule(index), |chunk| {
            out.extend_from_slice(chunk);
            Ok::<(), GrammarError>(())
        })?;
        Ok(out)
    }

    /// Streams the expansion of `sym` through `sink` in bounded chunks,
    /// using a stack proportional to the grammar depth. The grammar must
    /// already be valid.
    pub fn expand_each<E, F>(&self, sym: SymbolId, mut sink: F) -> Result<(), E>
    where
        F: FnMut(&[u8]) -> Result<(), E>,
        E: From<GrammarError>,
    {
        const CHUNK: usize = 1 << 16;
        // (rule index, next rhs position or remaining repetitions)
        let mut stack: Vec<(usize, u64)> = Vec::new();
        let mut buf: Vec<u8> = Vec::with_capacity(CHUNK);
        let mut emit = |s: SymbolId,
                        stack: &mut Vec<(usize, u64)>,
                        buf: &mut Vec<u8>|
         -> Result<(), E> {
            match s.terminal_code() {
                Some(c) => {
                    let byte = u8::try_from(c).map_err(|_| GrammarError::NonByteTerminal(c))?;
                    buf.push(byte);
                    if buf.len() >= CHUNK {
                        sink(buf)?;
                        buf.clear();
                    }
                }
                None => stack.push((s.rule_index().unwrap(), 0)),
            }
            Ok(())
        };
        emit(sym, &mut stack, &mut buf)?;
        while let Some(top) = stack.last_mut() {
            let (rule, pos) = *top;
            let next = match &self.rules[rule] {
                Rule::Sequence(rhs) => rhs.get(pos as usize).copied(),
                Rule::Run { base, exponent } => (pos < *exponent).then_some(*base),
            };
            match next {
                Some(s) => {
                    top.1 += 1;
                    emit(s, &mut stack, &mut buf)?;
                }
                None => {
                    stack.pop();
                }
            }
        }
        if !buf.is_empty() {
            sink(&buf)?;
        }
        Ok(())
    }
}
