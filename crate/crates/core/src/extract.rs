//! Extractor primitives: the multiplication-hash strong seeded extractor,
//! the inner-product two-source extractor, the invertible linear seeded
//! extractor and the distinct-sample index stream.
//!
//! The hash extractor works in GF(2^n) with seed length d = n: the output is
//! the low m bits of seed * x. Compositions routinely hand it a seed of a
//! different width; the width adapter below makes that total (cyclic repeat
//! when the seed is shorter, XOR-fold when longer). The adapter is the
//! identity at d = n, is injective for d < n, and maps zero to zero, so the
//! all-zero seed stays the documented degenerate case.

use rand::Rng;

use crate::bits::BitVec;
use crate::fields::ctx_for;
use crate::{Error, Result};

/// Declared parameters of one extractor instance.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct ExtParams {
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub claimed_eps: f64,
}

impl ExtParams {
    pub fn validate(&self) -> Result<()> {
        if self.m > self.n {
            return Err(Error::InvalidInput(format!(
                "output width {} exceeds source width {}",
                self.m, self.n
            )));
        }
        if self.m > self.d {
            return Err(Error::InvalidInput(format!(
                "output width {} exceeds seed width {} (hash instantiation)",
                self.m, self.d
            )));
        }
        if !(self.claimed_eps > 0.0 && self.claimed_eps <= 1.0) {
            return Err(Error::InvalidInput("claimed_eps outside (0, 1]".into()));
        }
        Ok(())
    }
}

/// Fit a seed to width n: identity at equal widths, cyclic repetition when
/// shorter, XOR-fold by n-bit periods when longer.
pub(crate) fn adapt_seed(seed: &BitVec, n: usize) -> BitVec {
    let d = seed.len();
    if d == n {
        return seed.clone();
    }
    if d < n {
        // double the pattern until a 64-bit window never wraps, then gather
        let mut base = seed.clone();
        while base.len() < d + 64 {
            base = base.concat(&base);
        }
        let mut words = vec![0u64; n.div_ceil(64)];
        for (i, w) in words.iter_mut().enumerate() {
            *w = base.window((i * 64) % d);
        }
        BitVec::from_words(words, n)
    } else {
        let mut out = seed.slice(0, n);
        let mut off = n;
        while off < d {
            let hi = (off + n).min(d);
            let mut chunk = seed.slice(off, hi);
            if chunk.len() < n {
                chunk = chunk.concat(&BitVec::zeros(n - chunk.len()));
            }
            out = out.xor(&chunk);
            off = hi;
        }
        out
    }
}

/// Strong seeded extractor: low m bits of seed * x in GF(2^n). The all-zero
/// seed maps everything to zero (degenerate but defined).
pub fn strong_ext(x: &BitVec, seed: &BitVec, m: usize) -> Result<BitVec> {
    let n = x.len();
    if m == 0 || m > n {
        return Err(Error::WidthMismatch(format!(
            "strong_ext output {m} out of range for source width {n}"
        )));
    }
    if seed.is_empty() {
        return Err(Error::WidthMismatch("strong_ext: empty seed".into()));
    }
    if n <= 63 {
        let ctx = ctx_for(n)?;
        let mut ad = adapt_seed_u64(seed, n);
        if seed.len() != n {
            ad = ctx.spread_u64(ad);
        }
        let prod = ctx.mul_u64(x.words()[0], ad);
        let mask = if m == 63 { (1u64 << 63) - 1 } else { (1u64 << m) - 1 };
        return Ok(BitVec::from_u64(prod & mask, m));
    }
    let ctx = ctx_for(n)?;
    let adapted = adapt_seed(seed, n);
    let spread = if seed.len() != n {
        ctx.spread(adapted.words())
    } else {
        adapted.words().to_vec()
    };
    let prod = ctx.mul(x.words(), &spread);
    Ok(BitVec::from_words(prod, n).slice(0, m))
}

/// Single-word seed adaptation for n <= 63.
#[inline]
fn adapt_seed_u64(seed: &BitVec, n: usize) -> u64 {
    debug_assert!(n <= 63);
    let d = seed.len();
    let mask_n = (1u64 << n) - 1;
    if d == n {
        return seed.words()[0];
    }
    if d < n {
        let mut v = seed.words()[0];
        let mut len = d;
        while len < n {
            v |= v << len;
            len *= 2;
        }
        v & mask_n
    } else {
        let mut v = 0u64;
        let mut off = 0;
        while off < d {
            v ^= seed.window(off) & if d - off >= n { mask_n } else { (1u64 << (d - off)) - 1 };
            off += n;
        }
        v & mask_n
    }
}

/// Inner-product two-source extractor: split x and y into n/m blocks of
/// width m and sum the blockwise products in GF(2^m).
pub fn ip_ext(x: &BitVec, y: &BitVec, m: usize) -> Result<BitVec> {
    let n = x.len();
    if y.len() != n {
        return Err(Error::WidthMismatch(format!(
            "ip_ext source widths {} vs {}",
            n,
            y.len()
        )));
    }
    if m == 0 || n % m != 0 {
        return Err(Error::BlockMismatch { n, m });
    }
    let ctx = ctx_for(m)?;
    let blocks = n / m;
    if m <= 63 {
        let mut acc: u64 = 0;
        for i in 0..blocks {
            let xb = x.slice(i * m, (i + 1) * m).low_u64();
            let yb = y.slice(i * m, (i + 1) * m).low_u64();
            if xb != 0 && yb != 0 {
                acc ^= ctx.mul(&[xb], &[yb])[0];
            }
        }
        Ok(BitVec::from_u64(acc, m))
    } else {
        let mut acc = vec![0u64; m.div_ceil(64)];
        for i in 0..blocks {
            let xb = x.slice(i * m, (i + 1) * m);
            let yb = y.slice(i * m, (i + 1) * m);
            let prod = ctx.mul(xb.words(), yb.words());
            for (a, p) in acc.iter_mut().zip(prod.iter()) {
                *a ^= p;
            }
        }
        Ok(BitVec::from_words(acc, m))
    }
}

/// Zero-extend the shorter of two vectors so both have the longer length.
/// Inner product treats the extension blocks as zero, so this matches
/// truncating the longer one.
pub fn equalize(a: &BitVec, b: &BitVec) -> (BitVec, BitVec) {
    use std::cmp::Ordering;
    match a.len().cmp(&b.len()) {
        Ordering::Equal => (a.clone(), b.clone()),
        Ordering::Less => {
            let mut ax = a.clone();
            ax = ax.concat(&BitVec::zeros(b.len() - a.len()));
            (ax, b.clone())
        }
        Ordering::Greater => {
            let mut bx = b.clone();
            bx = bx.concat(&BitVec::zeros(a.len() - b.len()));
            (a.clone(), bx)
        }
    }
}

/// Invertible linear seeded extractor: low m bits of adapt(r) * x. Linear in
/// x for every fixed r; for r != 0 every output has exactly 2^(n-m)
/// preimages. The zero seed is rejected; callers resample.
pub fn iext(x: &BitVec, r: &BitVec, m: usize) -> Result<BitVec> {
    let n = x.len();
    if m > n || m == 0 {
        return Err(Error::WidthMismatch(format!(
            "iext output {m} out of range for source width {n}"
        )));
    }
    let ctx = ctx_for(n)?;
    let mult = iext_multiplier(r, n)?;
    let prod = ctx.mul(x.words(), &mult);
    Ok(BitVec::from_words(prod, n).slice(0, m))
}

/// The field element the linear extractor multiplies by: the width-adapted
/// (and, when widths differ, spread) seed. Zero is rejected.
fn iext_multiplier(r: &BitVec, n: usize) -> Result<Vec<u64>> {
    if r.is_zero() {
        return Err(Error::ZeroSeed);
    }
    let ctx = ctx_for(n)?;
    let adapted = adapt_seed(r, n);
    let mult = if r.len() != n {
        ctx.spread(adapted.words())
    } else {
        adapted.words().to_vec()
    };
    if crate::gf2x_is_zero(&mult) {
        return Err(Error::ZeroSeed);
    }
    Ok(mult)
}

/// Uniform sample from the iext preimage of s under seed r: draw the free
/// high bits uniformly and multiply by the seed's field inverse.
pub fn iext_invert_sample<R: Rng + ?Sized>(
    s: &BitVec,
    r: &BitVec,
    n: usize,
    rng: &mut R,
) -> Result<BitVec> {
    let m = s.len();
    if m > n {
        return Err(Error::WidthMismatch(format!(
            "iext_invert_sample output width {m} exceeds source width {n}"
        )));
    }
    let ctx = ctx_for(n)?;
    let mult = iext_multiplier(r, n)?;
    let free = BitVec::random(n - m, rng);
    let t = s.concat(&free);
    let inv = ctx.inv(&mult).expect("nonzero element inverts");
    let x = ctx.mul(t.words(), &inv);
    Ok(BitVec::from_words(x, n))
}

/// t distinct indices in [n], deterministic in the seed: an extractor-driven
/// index stream with linear-probe collision skipping.
pub fn sample_distinct(seed: &BitVec, n: usize, t: usize) -> Result<Vec<usize>> {
    if t > n {
        return Err(Error::UniverseTooSmall { n, t });
    }
    if seed.is_empty() {
        return Err(Error::InvalidInput("sample_distinct: empty seed".into()));
    }
    let w = seed.len().min(63);
    let mut chosen = vec![false; n];
    let mut out = Vec::with_capacity(t);
    for c in 1..=t as u64 {
        let ctr = BitVec::from_u64(c, 64);
        let raw = strong_ext(seed, &ctr, w)?.low_u64() as usize % n;
        let mut idx = raw;
        while chosen[idx] {
            idx = (idx + 1) % n;
        }
        chosen[idx] = true;
        out.push(idx);
    }
    Ok(out)
}
