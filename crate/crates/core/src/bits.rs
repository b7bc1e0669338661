//! Fixed-length GF(2) vectors and matrices.
//!
//! `BitVec` is the universal carrier for sources, seeds, slices and codeword
//! halves. Bits are indexed from 0 (the low-order end); slices always count
//! from bit 0 of the parent. Words store bit `i` at `words[i/64]` bit `i%64`.

use std::fmt;

use rand::Rng;

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// Low `len` bits of `value`, little-endian (bit i of `value` = bit i).
    pub fn from_u64(value: u64, len: usize) -> Self {
        let mut v = BitVec::zeros(len);
        if len > 0 {
            let masked = if len >= 64 { value } else { value & ((1u64 << len) - 1) };
            v.words[0] = masked;
        }
        v
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = BitVec::zeros(len);
        for w in v.words.iter_mut() {
            *w = rng.gen();
        }
        v.mask_top();
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if b {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    /// Bits `[a, b)`, counted from the low-order end.
    pub fn slice(&self, a: usize, b: usize) -> BitVec {
        assert!(a <= b && b <= self.len, "slice {a}..{b} out of range 0..{}", self.len);
        let mut out = BitVec::zeros(b - a);
        for (j, w) in out.words.iter_mut().enumerate() {
            *w = word_at(&self.words, a + j * 64);
        }
        out.mask_top();
        out
    }

    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        out.words[..self.words.len()].copy_from_slice(&self.words);
        let sh = self.len % 64;
        let base = self.len / 64;
        if sh == 0 {
            out.words[base..base + other.words.len()].copy_from_slice(&other.words);
        } else {
            for (i, &w) in other.words.iter().enumerate() {
                out.words[base + i] |= w << sh;
                if base + i + 1 < out.words.len() {
                    out.words[base + i + 1] |= w >> (64 - sh);
                }
            }
        }
        out.mask_top();
        out
    }

    pub fn concat_all<'a, I: IntoIterator<Item = &'a BitVec>>(parts: I) -> BitVec {
        let mut out = BitVec::zeros(0);
        for p in parts {
            out = out.concat(p);
        }
        out
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        assert_eq!(self.len, other.len, "xor length mismatch");
        let mut out = self.clone();
        for (w, o) in out.words.iter_mut().zip(&other.words) {
            *w ^= o;
        }
        out
    }

    /// Bit-reversal: bit i of the result is bit len-1-i of the input.
    pub fn reversed(&self) -> BitVec {
        if self.len == 0 {
            return self.clone();
        }
        // reverse bits within words and word order, then shift out the pad
        let rev: Vec<u64> = self.words.iter().rev().map(|w| w.reverse_bits()).collect();
        let pad = self.words.len() * 64 - self.len;
        let mut out = vec![0u64; self.words.len()];
        for (i, w) in out.iter_mut().enumerate() {
            *w = word_at(&rev, pad + i * 64);
        }
        BitVec::from_words(out, self.len)
    }

    /// Interpret the low min(len,64) bits as an integer.
    pub fn low_u64(&self) -> u64 {
        if self.len == 0 {
            0
        } else {
            self.words[0] & mask64(self.len.min(64))
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The 64-bit window starting at bit `start` (reads zeros past the end).
    pub(crate) fn window(&self, start: usize) -> u64 {
        word_at(&self.words, start)
    }

    pub(crate) fn from_words(words: Vec<u64>, len: usize) -> Self {
        let mut v = BitVec { len, words };
        v.words.resize(len.div_ceil(64), 0);
        v.mask_top();
        v
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Pack into bytes, bit i at byte i/8 bit i%8; the tail is zero-padded.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for (i, w) in self.words.iter().enumerate() {
            for j in 0..8 {
                let bi = i * 8 + j;
                if bi < out.len() {
                    out[bi] = (w >> (8 * j)) as u8;
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], len: usize) -> crate::Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(crate::Error::InvalidInput(format!(
                "expected {} bytes for {len} bits, got {}",
                len.div_ceil(8),
                bytes.len()
            )));
        }
        let mut v = BitVec::zeros(len);
        for (bi, &b) in bytes.iter().enumerate() {
            v.words[bi / 8] |= (b as u64) << (8 * (bi % 8));
        }
        v.mask_top();
        for i in len..bytes.len() * 8 {
            if (bytes[i / 8] >> (i % 8)) & 1 == 1 {
                return Err(crate::Error::InvalidInput("nonzero padding bits".into()));
            }
        }
        Ok(v)
    }

    /// Hex dump, low-order nibble first (so prefixes of the string are
    /// prefixes of the bit string).
    pub fn to_hex(&self) -> String {
        let nibbles = self.len.div_ceil(4);
        let mut s = String::with_capacity(nibbles);
        for i in 0..nibbles {
            let mut nib = 0u8;
            for j in 0..4 {
                let bit = i * 4 + j;
                if bit < self.len && self.get(bit) {
                    nib |= 1 << j;
                }
            }
            s.push(char::from_digit(nib as u32, 16).unwrap());
        }
        s
    }

    pub fn from_hex(s: &str, len: usize) -> crate::Result<Self> {
        let mut v = BitVec::zeros(len);
        for (i, c) in s.chars().enumerate() {
            let nib = c
                .to_digit(16)
                .ok_or_else(|| crate::Error::InvalidInput(format!("bad hex char {c:?}")))?;
            for j in 0..4 {
                let bit = i * 4 + j;
                if nib >> j & 1 == 1 {
                    if bit >= len {
                        return Err(crate::Error::InvalidInput(format!(
                            "hex string longer than {len} bits"
                        )));
                    }
                    v.set(bit, true);
                }
            }
        }
        Ok(v)
    }

    fn mask_top(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= mask64(rem);
            }
        }
    }
}

#[inline]
fn mask64(bits: usize) -> u64 {
    debug_assert!(bits >= 1 && bits <= 64);
    if bits == 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// The 64-bit window of `words` starting at bit offset `start`.
#[inline]
fn word_at(words: &[u64], start: usize) -> u64 {
    let wi = start / 64;
    let sh = start % 64;
    if wi >= words.len() {
        return 0;
    }
    let lo = words[wi] >> sh;
    if sh == 0 || wi + 1 >= words.len() {
        lo
    } else {
        lo | (words[wi + 1] << (64 - sh))
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec[{}; {}]", self.len, self.to_hex())
    }
}

/// A rows x cols matrix over GF(2), rows packed as `BitVec`s.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows,
            cols,
            data: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: Vec<BitVec>) -> Self {
        assert!(!rows.is_empty());
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        BitMatrix {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        BitMatrix {
            rows,
            cols,
            data: (0..rows).map(|_| BitVec::random(cols, rng)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, b: bool) {
        self.data[r].set(c, b);
    }

    pub fn row(&self, r: usize) -> &BitVec {
        &self.data[r]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut BitVec {
        &mut self.data[r]
    }

    pub fn column(&self, c: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    /// Row-vector times matrix: out[c] = sum_r v[r]*M[r][c].
    pub fn mul_left(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.rows, "mul_left dimension mismatch");
        let mut out = BitVec::zeros(self.cols);
        for r in 0..self.rows {
            if v.get(r) {
                out = out.xor(&self.data[r]);
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut rows: Vec<BitVec> = self.data.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            if let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(c)) {
                rows.swap(rank, p);
                let pivot = rows[rank].clone();
                for (r, row) in rows.iter_mut().enumerate() {
                    if r != rank && row.get(c) {
                        *row = row.xor(&pivot);
                    }
                }
                rank += 1;
            }
        }
        rank
    }
}
