//! Carry-less polynomial arithmetic over GF(2), on little-endian u64 words.
//!
//! Bit `i` of the word vector is the coefficient of `x^i`. This backs the
//! binary extension fields in [`crate::fields`]; the only consumers are
//! in-crate, so the interface stays minimal.

/// Degree of the polynomial, or None for the zero polynomial.
pub fn degree(p: &[u64]) -> Option<usize> {
    for (i, &w) in p.iter().enumerate().rev() {
        if w != 0 {
            return Some(i * 64 + 63 - w.leading_zeros() as usize);
        }
    }
    None
}

pub fn is_zero(p: &[u64]) -> bool {
    p.iter().all(|&w| w == 0)
}

#[inline]
pub fn get_bit(p: &[u64], i: usize) -> bool {
    let wi = i / 64;
    wi < p.len() && (p[wi] >> (i % 64)) & 1 == 1
}

#[inline]
pub fn set_bit(p: &mut Vec<u64>, i: usize) {
    let wi = i / 64;
    if wi >= p.len() {
        p.resize(wi + 1, 0);
    }
    p[wi] ^= 1u64 << (i % 64);
}

fn trim(p: &mut Vec<u64>) {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
}

/// 64x64 -> 128 carry-less multiply: PCLMULQDQ when the CPU has it,
/// 4-bit windowed shift-xor otherwise.
#[inline]
pub(crate) fn clmul64(a: u64, b: u64) -> (u64, u64) {
    #[cfg(target_arch = "x86_64")]
    {
        use std::sync::OnceLock;
        static HAS: OnceLock<bool> = OnceLock::new();
        if *HAS.get_or_init(|| std::arch::is_x86_feature_detected!("pclmulqdq")) {
            // feature presence checked above
            unsafe {
                use std::arch::x86_64::*;
                let va = _mm_set_epi64x(0, a as i64);
                let vb = _mm_set_epi64x(0, b as i64);
                let prod = _mm_clmulepi64_si128(va, vb, 0);
                let lo = _mm_cvtsi128_si64(prod) as u64;
                let hi = _mm_extract_epi64(prod, 1) as u64;
                return (lo, hi);
            }
        }
    }
    clmul64_soft(a, b)
}

#[inline]
fn clmul64_soft(a: u64, b: u64) -> (u64, u64) {
    if a == 0 || b == 0 {
        return (0, 0);
    }
    // Table of a * nibble for nibble in 0..16.
    let mut table = [0u128; 16];
    let a128 = a as u128;
    table[1] = a128;
    table[2] = a128 << 1;
    table[4] = a128 << 2;
    table[8] = a128 << 3;
    for i in [3usize, 5, 6, 7, 9, 10, 11, 12, 13, 14, 15] {
        let low = i & (i.wrapping_neg());
        table[i] = table[low] ^ table[i ^ low];
    }
    let mut acc: u128 = 0;
    let mut shift = 0;
    let mut bb = b;
    while bb != 0 {
        let nib = (bb & 0xf) as usize;
        if nib != 0 {
            acc ^= table[nib] << shift;
        }
        bb >>= 4;
        shift += 4;
    }
    (acc as u64, (acc >> 64) as u64)
}

/// Full product of two word polynomials (schoolbook over words).
pub fn mul(a: &[u64], b: &[u64]) -> Vec<u64> {
    if is_zero(a) || is_zero(b) {
        return vec![0];
    }
    let mut out = vec![0u64; a.len() + b.len()];
    for (i, &aw) in a.iter().enumerate() {
        if aw == 0 {
            continue;
        }
        for (j, &bw) in b.iter().enumerate() {
            if bw == 0 {
                continue;
            }
            let (lo, hi) = clmul64(aw, bw);
            out[i + j] ^= lo;
            out[i + j + 1] ^= hi;
        }
    }
    trim(&mut out);
    out
}

/// Square by bit interleaving.
pub fn square(a: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len() * 2];
    for (i, &w) in a.iter().enumerate() {
        let (lo, hi) = spread(w);
        out[2 * i] = lo;
        out[2 * i + 1] = hi;
    }
    trim(&mut out);
    out
}

/// Insert a zero bit between every bit of w.
#[inline]
fn spread(w: u64) -> (u64, u64) {
    fn part(mut x: u64) -> u64 {
        x = (x | (x << 16)) & 0x0000_ffff_0000_ffff;
        x = (x | (x << 8)) & 0x00ff_00ff_00ff_00ff;
        x = (x | (x << 4)) & 0x0f0f_0f0f_0f0f_0f0f;
        x = (x | (x << 2)) & 0x3333_3333_3333_3333;
        x = (x | (x << 1)) & 0x5555_5555_5555_5555;
        x
    }
    (part(w & 0xffff_ffff), part(w >> 32))
}

/// Shift left by `n` bits (multiply by x^n).
pub fn shl(p: &[u64], n: usize) -> Vec<u64> {
    if is_zero(p) {
        return vec![0];
    }
    let wshift = n / 64;
    let bshift = n % 64;
    let mut out = vec![0u64; p.len() + wshift + 1];
    for (i, &w) in p.iter().enumerate() {
        out[i + wshift] ^= w << bshift;
        if bshift != 0 {
            out[i + wshift + 1] ^= w >> (64 - bshift);
        }
    }
    trim(&mut out);
    out
}

pub fn xor_in(dst: &mut Vec<u64>, src: &[u64]) {
    if src.len() > dst.len() {
        dst.resize(src.len(), 0);
    }
    for (d, &s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
    trim(dst);
}

/// Remainder of p modulo f (f nonzero). Folds the high part against the
/// modulus tail; converges fast for the sparse moduli we register.
pub fn rem(p: &[u64], f: &[u64]) -> Vec<u64> {
    let df = degree(f).expect("modulus must be nonzero");
    let mut cur = p.to_vec();
    trim(&mut cur);
    if df == 0 {
        return vec![0];
    }
    // tail = f - x^df
    let mut tail = f.to_vec();
    let wi = df / 64;
    tail[wi] ^= 1u64 << (df % 64);
    trim(&mut tail);
    loop {
        let dp = match degree(&cur) {
            Some(d) if d >= df => d,
            _ => break,
        };
        // hi = cur div x^df ; cur = (cur mod x^df) + hi * tail
        let hi = shr(&cur, df);
        truncate_bits(&mut cur, df);
        let prod = if is_zero(&tail) { vec![0] } else { mul(&hi, &tail) };
        xor_in(&mut cur, &prod);
        // each round drops the degree by at least df - deg(tail) >= 1
        debug_assert!(degree(&cur).map_or(true, |d| d < dp));
    }
    trim(&mut cur);
    cur
}

/// p div x^n.
fn shr(p: &[u64], n: usize) -> Vec<u64> {
    let wshift = n / 64;
    let bshift = n % 64;
    if wshift >= p.len() {
        return vec![0];
    }
    let mut out = vec![0u64; p.len() - wshift];
    for i in 0..out.len() {
        let mut w = p[i + wshift] >> bshift;
        if bshift != 0 && i + wshift + 1 < p.len() {
            w |= p[i + wshift + 1] << (64 - bshift);
        }
        out[i] = w;
    }
    trim(&mut out);
    out
}

/// Zero out all bits at positions >= n.
fn truncate_bits(p: &mut Vec<u64>, n: usize) {
    let keep_words = n.div_ceil(64);
    p.truncate(keep_words.max(1));
    let rem = n % 64;
    if rem != 0 && p.len() == keep_words {
        let last = p.len() - 1;
        p[last] &= (1u64 << rem) - 1;
    } else if n == 0 {
        p.clear();
        p.push(0);
    }
    trim(p);
}

pub fn gcd(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !is_zero(&b) {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

/// Extended Euclid: returns (g, u) with u*a = g mod f. Used for inversion.
pub fn inv_mod(a: &[u64], f: &[u64]) -> Option<Vec<u64>> {
    let mut r0 = f.to_vec();
    let mut r1 = rem(a, f);
    let mut t0: Vec<u64> = vec![0];
    let mut t1: Vec<u64> = vec![1];
    while !is_zero(&r1) {
        let (q, r) = divrem(&r0, &r1);
        let t2 = {
            let mut t = mul(&q, &t1);
            xor_in(&mut t, &t0);
            t
        };
        r0 = r1;
        r1 = r;
        t0 = t1;
        t1 = t2;
    }
    if degree(&r0) == Some(0) {
        Some(rem(&t0, f))
    } else {
        None
    }
}

/// Quotient and remainder of a / b.
pub fn divrem(a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>) {
    let db = degree(b).expect("division by zero polynomial");
    let mut r = a.to_vec();
    trim(&mut r);
    let mut q: Vec<u64> = vec![0];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let sh = dr - db;
        set_bit(&mut q, sh);
        let sub = shl(b, sh);
        xor_in(&mut r, &sub);
    }
    (q, r)
}

/// x^(2^e) mod f by repeated squaring.
fn frobenius_pow(e: usize, f: &[u64]) -> Vec<u64> {
    let mut cur = rem(&[2], f); // the polynomial x
    for _ in 0..e {
        cur = rem(&square(&cur), f);
    }
    cur
}

/// Rabin irreducibility test over GF(2), deterministic.
pub fn is_irreducible(f: &[u64]) -> bool {
    let n = match degree(f) {
        Some(0) | None => return false,
        Some(d) => d,
    };
    if n == 1 {
        return true;
    }
    // x^(2^n) == x mod f
    let xq = frobenius_pow(n, f);
    let x = rem(&[2], f);
    let mut diff = xq.clone();
    xor_in(&mut diff, &x);
    if !is_zero(&diff) {
        return false;
    }
    // gcd(x^(2^(n/p)) - x, f) == 1 for each prime p | n
    for p in prime_factors(n) {
        let mut g = frobenius_pow(n / p, f);
        xor_in(&mut g, &x);
        let g = gcd(&g, f);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Deterministic lowest-weight irreducible of degree w: first the trinomial
/// x^w + x^k + 1 with smallest k, else the pentanomial with lexicographically
/// smallest (c, b, a). Every degree up to the search cap has one of the two.
pub fn find_irreducible(w: usize) -> Option<Vec<u64>> {
    assert!(w >= 1);
    if w == 1 {
        let mut f = vec![0u64];
        set_bit(&mut f, 0);
        set_bit(&mut f, 1);
        return Some(f); // x + 1
    }
    for k in 1..w {
        let mut f = vec![0u64; w / 64 + 1];
        set_bit(&mut f, 0);
        set_bit(&mut f, k);
        set_bit(&mut f, w);
        if is_irreducible(&f) {
            return Some(f);
        }
    }
    for c in 3..w {
        for b in 2..c {
            for a in 1..b {
                let mut f = vec![0u64; w / 64 + 1];
                set_bit(&mut f, 0);
                set_bit(&mut f, a);
                set_bit(&mut f, b);
                set_bit(&mut f, c);
                set_bit(&mut f, w);
                if is_irreducible(&f) {
                    return Some(f);
                }
            }
        }
    }
    None
}
