//! Polynomial rolling fingerprints modulo the Mersenne prime 2^61 - 1.

pub const MODULUS: u64 = (1 << 61) - 1;
pub const DEFAULT_BASE: u64 = 0x1f3d_5b79_a2c4_e681 % MODULUS;

#[inline]
fn mul_mod(a: u64, b: u64) -> u64 {
    let p = a as u128 * b as u128;
    let lo = (p as u64) & MODULUS;
    let hi = (p >> 61) as u64;
    let s = lo + hi;
    if s >= MODULUS {
        s - MODULUS
    } else {
        s
    }
}

#[inline]
fn add_mod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= MODULUS {
        s - MODULUS
    } else {
        s
    }
}

/// Fingerprint of fixed-width windows: `Σ w[i]·base^(width-1-i) mod p`.
#[derive(Clone, Debug)]
pub struct RollingHash {
    base: u64,
    width: usize,
    /// base^(width-1), the weight of the byte leaving the window.
    top: u64,
    /// base^2, base^3, base^4 for four-byte Horner steps.
    pow: [u64; 3],
}

impl RollingHash {
    pub fn new(base: u64, width: usize) -> Self {
        assert!(width >= 1);
        let base = base % MODULUS;
        let top = (1..width).fold(1, |acc, _| mul_mod(acc, base));
        let b2 = mul_mod(base, base);
        let b3 = mul_mod(b2, base);
        RollingHash { base, width, top, pow: [b2, b3, mul_mod(b3, base)] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn hash(&self, window: &[u8]) -> u64 {
        debug_assert_eq!(window.len(), self.width);
        let [b2, b3, b4] = self.pow;
        let mut chunks = window.chunks_exact(4);
        // Horner over four bytes at a time keeps the dependency chain short.
        let h = chunks.by_ref().fold(0, |h, c| {
            let t = add_mod(
                add_mod(mul_mod(c[0] as u64 + 1, b3), mul_mod(c[1] as u64 + 1, b2)),
                add_mod(mul_mod(c[2] as u64 + 1, self.base), c[3] as u64 + 1),
            );
            add_mod(mul_mod(h, b4), t)
        });
        chunks
            .remainder()
            .iter()
            .fold(h, |h, &b| add_mod(mul_mod(h, self.base), b as u64 + 1))
    }

    /// Slides the window one byte: drops `out`, appends `inc`.
    #[inline]
    pub fn roll(&self, h: u64, out: u8, inc: u8) -> u64 {
        let dropped = mul_mod(out as u64 + 1, self.top);
        let h = add_mod(h, MODULUS - dropped);
        add_mod(mul_mod(h, self.base), inc as u64 + 1)
    }
}
