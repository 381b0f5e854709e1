use crate::grammar::SymbolId;

/// Count value marking an entry whose true count lives in the overflow list.
pub const OVERFLOW: u8 = u8::MAX;

#[derive(Clone, Copy, Debug)]
#[repr(C, packed)]
struct Packed {
    symbol: i64,
    count: u8,
}

/// Per-rule maximal run (`X`, count) with one byte per count.
///
/// Counts below 255 are stored inline. Larger ones are stored in a sorted
/// side list, so the table costs nine bytes per rule plus twelve bytes per
/// long run.
#[derive(Clone, Debug, Default)]
pub struct RunTable {
    entries: Vec<Packed>,
    overflow: Vec<(u32, u64)>,
}

impl RunTable {
    pub fn with_capacity(n: usize) -> Self {
        RunTable { entries: Vec::with_capacity(n), overflow: Vec::new() }
    }

    /// Appends the entry of the next rule.
    pub fn push(&mut self, symbol: SymbolId, count: u64) {
        debug_assert!(count >= 1);
        let rule = self.entries.len() as u32;
        let packed = if count >= OVERFLOW as u64 {
            self.overflow.push((rule, count));
            OVERFLOW
        } else {
            count as u8
        };
        self.entries.push(Packed { symbol: symbol.0, count: packed });
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, rule: usize) -> (SymbolId, u64) {
        let e = self.entries[rule];
        let count = if e.count == OVERFLOW {
            let k = self
                .overflow
                .binary_search_by_key(&(rule as u32), |&(r, _)| r)
                .expect("overflowed count recorded");
            self.overflow[k].1
        } else {
            e.count as u64
        };
        (SymbolId(e.symbol), count)
    }

    /// Stored byte for `rule`; [`OVERFLOW`] means the count is at least 255.
    pub fn packed_count(&self, rule: usize) -> u8 {
        self.entries[rule].count
    }

    pub fn overflow(&self) -> &[(u32, u64)] {
        &self.overflow
    }
}

/// Leftmost and rightmost maximal runs of every level-grammar rule.
#[derive(Clone, Debug, Default)]
pub struct RunTables {
    pub left: RunTable,
    pub right: RunTable,
    /// Rule expands to a single run.
    pub full: Vec<bool>,
}
