//! GF(2) linear algebra, binary extension fields GF(2^w), Reed-Solomon
//! encoding and the "good generating matrix" preprocessing search.
//!
//! Moduli are fixed per width: a compiled table for w = 1..=16 (w=8 is the
//! usual x^8+x^4+x^3+x+1) and a deterministic lowest-weight search above
//! that, cached per width. One convention everywhere: little-endian
//! coefficient order, bit i = coefficient of x^i.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bits::{BitMatrix, BitVec};
use crate::{gf2x, Error, Result};

/// Compiled irreducible moduli for w = 1..=16, as little-endian bit masks.
const MODULI_TABLE: [u64; 16] = [
    0x3,     // w=1:  x + 1
    0x7,     // w=2:  x^2 + x + 1
    0xb,     // w=3:  x^3 + x + 1
    0x13,    // w=4:  x^4 + x + 1
    0x25,    // w=5:  x^5 + x^2 + 1
    0x43,    // w=6:  x^6 + x + 1
    0x83,    // w=7:  x^7 + x + 1
    0x11b,   // w=8:  x^8 + x^4 + x^3 + x + 1
    0x211,   // w=9:  x^9 + x^4 + 1
    0x409,   // w=10: x^10 + x^3 + 1
    0x805,   // w=11: x^11 + x^2 + 1
    0x1053,  // w=12: x^12 + x^6 + x^4 + x + 1
    0x201b,  // w=13: x^13 + x^4 + x^3 + x + 1
    0x4443,  // w=14: x^14 + x^10 + x^6 + x + 1
    0x8003,  // w=15: x^15 + x + 1
    0x1100b, // w=16: x^16 + x^12 + x^3 + x + 1
];

/// Widths above this are rejected with `UnsupportedWidth` (the deterministic
/// modulus search gets slow, and nothing at desk scale needs more).
pub const MAX_WIDTH: usize = 16384;

/// Log/antilog tables for small fields; mul and inv become lookups.
struct SmallTables {
    log: Vec<u32>,
    exp: Vec<u32>, // doubled so exp[la + lb] needs no reduction
}

pub(crate) struct FieldCtx {
    pub w: usize,
    pub modulus: Vec<u64>,
    small: Option<SmallTables>,
    /// Exponents of the modulus below the leading term, for the single-word
    /// reduction path (w <= 63).
    tail_bits: Vec<u32>,
    /// Fixed spreader constants for seed adaptation: a width-fitted seed u
    /// becomes u*G + u^2*H, so short seeds do not sit in one low-degree
    /// multiplicative coset.
    spread_g: Vec<u64>,
    spread_h: Vec<u64>,
}

impl FieldCtx {
    fn build(w: usize) -> Result<Arc<FieldCtx>> {
        if w == 0 || w > MAX_WIDTH {
            return Err(Error::UnsupportedWidth(w));
        }
        let modulus = if w <= 16 {
            vec![MODULI_TABLE[w - 1]]
        } else {
            gf2x::find_irreducible(w).ok_or(Error::UnsupportedWidth(w))?
        };
        let small = if w <= 16 && w >= 2 {
            Some(SmallTables::build(w, modulus[0]))
        } else {
            None
        };
        let tail_bits = if w <= 63 {
            let tail = modulus[0] ^ (1u64 << w);
            (0..64).filter(|&b| (tail >> b) & 1 == 1).collect()
        } else {
            Vec::new()
        };
        let pattern = |mut seed: u64| -> Vec<u64> {
            let words = w.div_ceil(64);
            let mut v = Vec::with_capacity(words);
            for _ in 0..words {
                // splitmix64 step
                seed = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
                let mut z = seed;
                z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
                z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
                v.push(z ^ (z >> 31));
            }
            let rem = w % 64;
            if rem != 0 {
                let last = v.len() - 1;
                v[last] &= (1u64 << rem) - 1;
            }
            if v.iter().all(|&x| x == 0) {
                v[0] = 1;
            }
            v
        };
        Ok(Arc::new(FieldCtx {
            w,
            modulus,
            small,
            tail_bits,
            spread_g: pattern(0x5851_f42d_4c95_7f2d),
            spread_h: pattern(0x1405_7b7e_f767_814f),
        }))
    }

    /// Seed spreading for width-adapted seeds: u -> u*G + u^2*H. Fixes zero
    /// and is injective except when two inputs differ by G/H.
    pub(crate) fn spread(&self, u: &[u64]) -> Vec<u64> {
        if gf2x::is_zero(u) {
            return vec![0];
        }
        let mut a = self.mul(u, &self.spread_g);
        let sq = gf2x::rem(&gf2x::square(u), &self.modulus);
        let b = self.mul(&sq, &self.spread_h);
        gf2x::xor_in(&mut a, &b);
        a
    }

    /// Single-word spreading for w <= 63.
    #[inline]
    pub(crate) fn spread_u64(&self, u: u64) -> u64 {
        if u == 0 {
            return 0;
        }
        let sq = self.mul_u64(u, u);
        self.mul_u64(u, self.spread_g[0]) ^ self.mul_u64(sq, self.spread_h[0])
    }

    /// Single-word multiply for w <= 63.
    #[inline]
    pub fn mul_u64(&self, a: u64, b: u64) -> u64 {
        debug_assert!(self.w <= 63);
        if let Some(t) = &self.small {
            if a == 0 || b == 0 {
                return 0;
            }
            return t.exp[(t.log[a as usize] + t.log[b as usize]) as usize] as u64;
        }
        if a == 0 || b == 0 {
            return 0;
        }
        let (lo, hi) = gf2x::clmul64(a, b);
        let mut v: u128 = (hi as u128) << 64 | lo as u128;
        // fold the high part against the sparse modulus tail
        let w = self.w;
        loop {
            let hi = v >> w;
            if hi == 0 {
                break;
            }
            v &= (1u128 << w) - 1;
            for &b in &self.tail_bits {
                v ^= hi << b;
            }
        }
        v as u64
    }

    /// Multiply two width-w elements given as word slices.
    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        if self.w <= 63 {
            let av = a.first().copied().unwrap_or(0);
            let bv = b.first().copied().unwrap_or(0);
            return vec![self.mul_u64(av, bv)];
        }
        gf2x::rem(&gf2x::mul(a, b), &self.modulus)
    }

    pub fn inv(&self, a: &[u64]) -> Option<Vec<u64>> {
        if let Some(t) = &self.small {
            let av = (a.first().copied().unwrap_or(0)) as usize;
            if av == 0 {
                return None;
            }
            let order = (1u32 << self.w) - 1;
            let e = (order - t.log[av]) % order;
            return Some(vec![t.exp[e as usize] as u64]);
        }
        gf2x::inv_mod(a, &self.modulus)
    }
}

impl SmallTables {
    fn build(w: usize, modulus: u64) -> SmallTables {
        let size = 1usize << w;
        let order = size - 1;
        // x need not be primitive (it is not for the w=8 modulus), so search
        // for a generator; the group is cyclic, so one exists.
        'gen: for g in 2..size as u64 {
            let mut log = vec![0u32; size];
            let mut exp = vec![0u32; 2 * order];
            let mut cur: u64 = 1;
            for i in 0..order {
                if i > 0 && cur == 1 {
                    continue 'gen; // g has small order
                }
                exp[i] = cur as u32;
                log[cur as usize] = i as u32;
                cur = gf2x::rem(&gf2x::mul(&[cur], &[g]), &[modulus])
                    .first()
                    .copied()
                    .unwrap_or(0);
            }
            if cur == 1 {
                for i in 0..order {
                    exp[order + i] = exp[i];
                }
                return SmallTables { log, exp };
            }
        }
        unreachable!("no generator found for w={w}; modulus is not irreducible");
    }
}

// small widths get a flat array for lock-free lookups; the rest a map
const FAST_WIDTHS: usize = 2048;

fn fast_registry() -> &'static [OnceLock<Arc<FieldCtx>>] {
    static REG: OnceLock<Vec<OnceLock<Arc<FieldCtx>>>> = OnceLock::new();
    REG.get_or_init(|| (0..=FAST_WIDTHS).map(|_| OnceLock::new()).collect())
}

fn slow_registry() -> &'static RwLock<HashMap<usize, Arc<FieldCtx>>> {
    static REG: OnceLock<RwLock<HashMap<usize, Arc<FieldCtx>>>> = OnceLock::new();
    REG.get_or_init(|| RwLock::new(HashMap::new()))
}

pub(crate) fn ctx_for(w: usize) -> Result<Arc<FieldCtx>> {
    if w <= FAST_WIDTHS {
        if w == 0 {
            return Err(Error::UnsupportedWidth(0));
        }
        let slot = &fast_registry()[w];
        if let Some(ctx) = slot.get() {
            return Ok(ctx.clone());
        }
        let ctx = FieldCtx::build(w)?;
        Ok(slot.get_or_init(|| ctx).clone())
    } else {
        if let Some(ctx) = slow_registry().read().unwrap().get(&w) {
            return Ok(ctx.clone());
        }
        let ctx = FieldCtx::build(w)?;
        slow_registry().write().unwrap().entry(w).or_insert_with(|| ctx.clone());
        Ok(ctx)
    }
}

/// The registered modulus for width w, as a bit vector of length w+1.
pub fn modulus_for(w: usize) -> Result<BitVec> {
    let ctx = ctx_for(w)?;
    Ok(BitVec::from_words(ctx.modulus.clone(), w + 1))
}

/// An element of GF(2^w); bit i of `bits` is the coefficient of x^i.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FieldElem {
    w: usize,
    bits: BitVec,
}

impl FieldElem {
    pub fn new(bits: BitVec) -> Self {
        let w = bits.len();
        FieldElem { w, bits }
    }

    pub fn from_u64(value: u64, w: usize) -> Self {
        FieldElem {
            w,
            bits: BitVec::from_u64(value, w),
        }
    }

    pub fn zero(w: usize) -> Self {
        FieldElem::from_u64(0, w)
    }

    pub fn one(w: usize) -> Self {
        FieldElem::from_u64(1, w)
    }

    pub fn width(&self) -> usize {
        self.w
    }

    pub fn bits(&self) -> &BitVec {
        &self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_zero()
    }

    pub fn to_u64(&self) -> u64 {
        self.bits.low_u64()
    }

    /// Addition in GF(2^w) is XOR.
    pub fn add(&self, other: &FieldElem) -> FieldElem {
        assert_eq!(self.w, other.w);
        FieldElem {
            w: self.w,
            bits: self.bits.xor(&other.bits),
        }
    }
}

/// Product in GF(2^w), reduced by the registered modulus.
pub fn gf_mul(a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
    if a.w != b.w {
        return Err(Error::WidthMismatch(format!(
            "gf_mul operand widths {} vs {}",
            a.w, b.w
        )));
    }
    let ctx = ctx_for(a.w)?;
    let words = ctx.mul(a.bits.words(), b.bits.words());
    Ok(FieldElem {
        w: a.w,
        bits: BitVec::from_words(words, a.w),
    })
}

/// Multiplicative inverse; None for zero.
pub fn gf_inv(a: &FieldElem) -> Result<Option<FieldElem>> {
    let ctx = ctx_for(a.w)?;
    Ok(ctx.inv(a.bits.words()).map(|words| FieldElem {
        w: a.w,
        bits: BitVec::from_words(words, a.w),
    }))
}

/// Reed-Solomon encoding: evaluate the polynomial with coefficient vector
/// `msg` at each point. Points must be distinct and fit in the field.
pub fn rs_encode(msg: &[FieldElem], eval_points: &[FieldElem]) -> Result<Vec<FieldElem>> {
    assert!(!msg.is_empty(), "empty message");
    let w = msg[0].w;
    let n = eval_points.len();
    if n > (1usize << w.min(63)) {
        return Err(Error::TooManyPoints { n, w });
    }
    if msg.len() > n {
        return Err(Error::InvalidInput(format!(
            "message length {} exceeds code length {n}",
            msg.len()
        )));
    }
    for p in eval_points {
        if p.w != w {
            return Err(Error::WidthMismatch("eval point width".into()));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if eval_points[i] == eval_points[j] {
                return Err(Error::InvalidInput("eval points not distinct".into()));
            }
        }
    }
    let ctx = ctx_for(w)?;
    let coeffs: Vec<&[u64]> = msg.iter().map(|c| c.bits.words()).collect();
    let mut out = Vec::with_capacity(n);
    for p in eval_points {
        let v = horner(&ctx, &coeffs, p.bits.words());
        out.push(FieldElem {
            w,
            bits: BitVec::from_words(v, w),
        });
    }
    Ok(out)
}

/// The first n field elements in value order, the default evaluation points.
pub fn default_eval_points(n: usize, w: usize) -> Result<Vec<FieldElem>> {
    if n > (1usize << w.min(63)) {
        return Err(Error::TooManyPoints { n, w });
    }
    Ok((0..n as u64).map(|v| FieldElem::from_u64(v, w)).collect())
}

fn horner(ctx: &FieldCtx, coeffs: &[&[u64]], x: &[u64]) -> Vec<u64> {
    let mut acc: Vec<u64> = vec![0];
    for c in coeffs.iter().rev() {
        acc = ctx.mul(&acc, x);
        gf2x::xor_in(&mut acc, c);
    }
    acc
}

/// Fast path on u32 symbols for w <= 16 (the advice generators hammer this).
pub(crate) fn rs_encode_u32(ctx: &FieldCtx, msg: &[u32], points: &[u32]) -> Vec<u32> {
    points
        .iter()
        .map(|&p| {
            let mut acc: u64 = 0;
            let pw = [p as u64];
            for &c in msg.iter().rev() {
                acc = ctx.mul(&[acc], &pw)[0] ^ c as u64;
            }
            acc as u32
        })
        .collect()
}

/// Solution set of A x = b over GF(2): one particular solution plus a basis
/// of ker(A); the full set is particular + span(kernel).
#[derive(Clone, Debug)]
pub struct SolutionSet {
    pub particular: BitVec,
    pub kernel_basis: Vec<BitVec>,
    pub rank: usize,
}

impl SolutionSet {
    pub fn kernel_dim(&self) -> usize {
        self.kernel_basis.len()
    }

    /// Uniform sample: particular + random kernel combination.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitVec {
        let mut x = self.particular.clone();
        for k in &self.kernel_basis {
            if rng.gen::<bool>() {
                x = x.xor(k);
            }
        }
        x
    }

    pub fn count(&self) -> u128 {
        1u128 << self.kernel_basis.len()
    }
}

/// Gaussian elimination over GF(2). `A.rows == b.len` is required.
pub fn solve_gf2(a: &BitMatrix, b: &BitVec) -> Result<SolutionSet> {
    assert_eq!(a.rows(), b.len(), "solve_gf2: A.rows must equal b.len");
    let rows = a.rows();
    let cols = a.cols();
    // augmented rows: coefficient part + rhs bit
    let mut aug: Vec<(BitVec, bool)> = (0..rows).map(|r| (a.row(r).clone(), b.get(r))).collect();
    let mut pivot_col_of_row: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for c in 0..cols {
        if let Some(p) = (rank..rows).find(|&r| aug[r].0.get(c)) {
            aug.swap(rank, p);
            let (prow, pb) = aug[rank].clone();
            for (r, row) in aug.iter_mut().enumerate() {
                if r != rank && row.0.get(c) {
                    row.0 = row.0.xor(&prow);
                    row.1 ^= pb;
                }
            }
            pivot_col_of_row.push(c);
            rank += 1;
        }
    }
    for row in aug.iter().skip(rank) {
        if row.1 {
            return Err(Error::Infeasible);
        }
    }
    let mut particular = BitVec::zeros(cols);
    for (r, &c) in pivot_col_of_row.iter().enumerate() {
        if aug[r].1 {
            particular.set(c, true);
        }
    }
    let is_pivot = {
        let mut v = vec![false; cols];
        for &c in &pivot_col_of_row {
            v[c] = true;
        }
        v
    };
    let mut kernel_basis = Vec::with_capacity(cols - rank);
    for free in 0..cols {
        if is_pivot[free] {
            continue;
        }
        let mut k = BitVec::zeros(cols);
        k.set(free, true);
        for (r, &c) in pivot_col_of_row.iter().enumerate() {
            if aug[r].0.get(free) {
                k.set(c, true);
            }
        }
        kernel_basis.push(k);
    }
    Ok(SolutionSet {
        particular,
        kernel_basis,
        rank,
    })
}

/// Row-reduced GF(2) system kept in word form, for repeated uniform
/// sampling without materializing a kernel basis.
pub(crate) struct ReducedSystem {
    rows: Vec<Vec<u64>>,
    rhs: Vec<bool>,
    /// (pivot column, row index) pairs.
    pivots: Vec<(usize, usize)>,
    cols: usize,
}

pub(crate) fn reduce_system(
    mut rows: Vec<Vec<u64>>,
    mut rhs: Vec<bool>,
    cols: usize,
) -> Result<ReducedSystem> {
    assert_eq!(rows.len(), rhs.len());
    let words = cols.div_ceil(64);
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for i in 0..rows.len() {
        debug_assert_eq!(rows[i].len(), words);
        let lead = match leading_bit(&rows[i]) {
            Some(l) => l,
            None => {
                if rhs[i] {
                    return Err(Error::Infeasible);
                }
                continue;
            }
        };
        for j in 0..rows.len() {
            if j != i && (rows[j][lead / 64] >> (lead % 64)) & 1 == 1 {
                let (pi, pj) = if i < j {
                    let (a, b) = rows.split_at_mut(j);
                    (&a[i], &mut b[0])
                } else {
                    let (a, b) = rows.split_at_mut(i);
                    (&b[0], &mut a[j])
                };
                for (x, y) in pj.iter_mut().zip(pi.iter()) {
                    *x ^= y;
                }
                let flip = rhs[i];
                rhs[j] ^= flip;
            }
        }
        pivots.push((lead, i));
    }
    Ok(ReducedSystem {
        rows,
        rhs,
        pivots,
        cols,
    })
}

fn leading_bit(row: &[u64]) -> Option<usize> {
    for (i, &w) in row.iter().enumerate() {
        if w != 0 {
            return Some(i * 64 + w.trailing_zeros() as usize);
        }
    }
    None
}

impl ReducedSystem {
    /// Uniform solution: free variables random, pivots by back-substitution.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitVec {
        let mut x = BitVec::random(self.cols, rng);
        for &(lead, _) in &self.pivots {
            x.set(lead, false);
        }
        for &(lead, i) in &self.pivots {
            let mut parity = self.rhs[i];
            for (xw, rw) in x.words().iter().zip(self.rows[i].iter()) {
                parity ^= ((xw & rw).count_ones() & 1) == 1;
            }
            x.set(lead, parity);
        }
        x
    }
}

/// Tuning knobs for the generating-matrix search.
#[derive(Clone, Debug)]
pub struct GoodMatrixConfig {
    /// Required minimum codeword weight; None picks max(1, m/10).
    pub weight_floor: Option<usize>,
    /// Retry budget before SearchExhausted.
    pub retries: usize,
    /// Random codewords sampled per distance check when n > 16.
    pub distance_samples: usize,
    /// Random column subsets tested per rank check when exhaustion is too big.
    pub rank_samples: usize,
}

impl Default for GoodMatrixConfig {
    fn default() -> Self {
        GoodMatrixConfig {
            weight_floor: None,
            retries: 64,
            distance_samples: 2000,
            rank_samples: 200,
        }
    }
}

/// What the search actually verified about the returned matrix.
#[derive(Clone, Debug)]
pub struct MatrixCertificate {
    pub weight_floor: usize,
    pub distance_exhaustive: bool,
    pub distance_samples: usize,
    pub alpha_cols: usize,
    pub rank_exhaustive: bool,
    pub rank_checks: usize,
    pub attempts: usize,
}

/// Search for an n x m generating matrix whose code has minimum weight at
/// least the floor, and whose alpha*n-column submatrices (restricted to the
/// last n/2 rows) have full column rank. Deterministic given the seed.
pub fn find_good_genmatrix(
    n: usize,
    m: usize,
    alpha: f64,
    rng_seed: u64,
    config: &GoodMatrixConfig,
) -> Result<(BitMatrix, MatrixCertificate)> {
    if n > m {
        return Err(Error::InvalidInput(format!("need n <= m, got n={n} m={m}")));
    }
    let alpha_cols = ((alpha * n as f64).floor() as usize).max(1);
    if 2 * alpha_cols > n {
        return Err(Error::InvalidInput(format!(
            "alpha*n = {alpha_cols} exceeds n/2 = {}",
            n / 2
        )));
    }
    let weight_floor = config.weight_floor.unwrap_or_else(|| (m / 10).max(1));
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for attempt in 1..=config.retries {
        let mat = BitMatrix::random(n, m, &mut rng);
        let distance_exhaustive = n <= 16;
        if !check_distance(&mat, weight_floor, distance_exhaustive, config.distance_samples, &mut rng) {
            continue;
        }
        let bottom_rows = n / 2;
        let (rank_exhaustive, rank_checks) = if bottom_rows == 0 {
            (true, 0)
        } else {
            rank_check_plan(m, alpha_cols, config.rank_samples)
        };
        if rank_checks > 0
            && !check_submatrix_ranks(
                &mat,
                alpha_cols,
                bottom_rows,
                rank_exhaustive,
                rank_checks,
                &mut rng,
            )
        {
            continue;
        }
        let cert = MatrixCertificate {
            weight_floor,
            distance_exhaustive,
            distance_samples: if distance_exhaustive { 0 } else { config.distance_samples },
            alpha_cols,
            rank_exhaustive,
            rank_checks,
            attempts: attempt,
        };
        return Ok((mat, cert));
    }
    Err(Error::SearchExhausted(config.retries))
}

fn check_distance<R: Rng + ?Sized>(
    mat: &BitMatrix,
    floor: usize,
    exhaustive: bool,
    samples: usize,
    rng: &mut R,
) -> bool {
    let n = mat.rows();
    if exhaustive {
        // Gray-code walk over all nonzero messages.
        let mut cw = BitVec::zeros(mat.cols());
        let mut prev = 0u64;
        for i in 1u64..(1u64 << n) {
            let gray = i ^ (i >> 1);
            let flipped = (gray ^ prev).trailing_zeros() as usize;
            prev = gray;
            cw = cw.xor(mat.row(flipped));
            if cw.count_ones() < floor {
                return false;
            }
        }
        true
    } else {
        for _ in 0..samples {
            let mut msg = BitVec::random(n, rng);
            if msg.is_zero() {
                msg.set(0, true);
            }
            if mat.mul_left(&msg).count_ones() < floor {
                return false;
            }
        }
        // Single rows and adjacent-row sums are the usual low-weight
        // suspects; check them outright.
        for r in 0..n {
            if mat.row(r).count_ones() < floor {
                return false;
            }
            if r + 1 < n && mat.row(r).xor(mat.row(r + 1)).count_ones() < floor {
                return false;
            }
        }
        true
    }
}

fn rank_check_plan(m: usize, alpha_cols: usize, samples: usize) -> (bool, usize) {
    // Exhaustive iff C(m, alpha_cols) is small.
    let mut combos: u128 = 1;
    for i in 0..alpha_cols {
        combos = combos.saturating_mul((m - i) as u128) / (i as u128 + 1);
        if combos > 4096 {
            return (false, samples);
        }
    }
    (true, combos as usize)
}

fn check_submatrix_ranks<R: Rng + ?Sized>(
    mat: &BitMatrix,
    alpha_cols: usize,
    bottom_rows: usize,
    exhaustive: bool,
    samples: usize,
    rng: &mut R,
) -> bool {
    let n = mat.rows();
    let m = mat.cols();
    if bottom_rows == 0 {
        return false;
    }
    let check = |cols: &[usize]| -> bool {
        let mut sub = BitMatrix::zeros(bottom_rows, cols.len());
        for (j, &c) in cols.iter().enumerate() {
            for r in 0..bottom_rows {
                if mat.get(n - bottom_rows + r, c) {
                    sub.set(r, j, true);
                }
            }
        }
        sub.rank() == cols.len()
    };
    if exhaustive {
        let mut cols: Vec<usize> = (0..alpha_cols).collect();
        loop {
            if !check(&cols) {
                return false;
            }
            // next combination
            let mut i = alpha_cols;
            loop {
                if i == 0 {
                    return true;
                }
                i -= 1;
                if cols[i] != i + m - alpha_cols {
                    break;
                }
            }
            if cols[i] == i + m - alpha_cols {
                return true;
            }
            cols[i] += 1;
            for j in i + 1..alpha_cols {
                cols[j] = cols[j - 1] + 1;
            }
        }
    } else {
        for _ in 0..samples {
            let mut cols = Vec::with_capacity(alpha_cols);
            while cols.len() < alpha_cols {
                let c = rng.gen_range(0..m);
                if !cols.contains(&c) {
                    cols.push(c);
                }
            }
            if !check(&cols) {
                return false;
            }
        }
        true
    }
}

/// Versioned text fixture for matrices: header then one hex row per line.
pub fn write_matrix_fixture(mat: &BitMatrix, w: usize) -> Result<String> {
    let modulus = modulus_for(w)?;
    let mut s = String::new();
    s.push_str("nmext-matrix v1\n");
    s.push_str(&format!(
        "n={} m={} w={} modulus={}\n",
        mat.rows(),
        mat.cols(),
        w,
        modulus.to_hex()
    ));
    for r in 0..mat.rows() {
        s.push_str(&mat.row(r).to_hex());
        s.push('\n');
    }
    Ok(s)
}

pub fn read_matrix_fixture(text: &str) -> Result<(BitMatrix, usize)> {
    let mut lines = text.lines();
    let magic = lines.next().unwrap_or("");
    if magic != "nmext-matrix v1" {
        return Err(Error::InvalidInput(format!("bad fixture magic {magic:?}")));
    }
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidInput("missing fixture header".into()))?;
    let mut n = 0usize;
    let mut m = 0usize;
    let mut w = 0usize;
    for field in header.split_whitespace() {
        let (key, val) = field
            .split_once('=')
            .ok_or_else(|| Error::InvalidInput(format!("bad header field {field:?}")))?;
        match key {
            "n" => n = val.parse().map_err(|_| Error::InvalidInput("bad n".into()))?,
            "m" => m = val.parse().map_err(|_| Error::InvalidInput("bad m".into()))?,
            "w" => w = val.parse().map_err(|_| Error::InvalidInput("bad w".into()))?,
            "modulus" => {}
            _ => return Err(Error::InvalidInput(format!("unknown header key {key:?}"))),
        }
    }
    let mut rows = Vec::with_capacity(n);
    for line in lines.take(n) {
        rows.push(BitVec::from_hex(line.trim(), m)?);
    }
    if rows.len() != n {
        return Err(Error::InvalidInput("fixture truncated".into()));
    }
    Ok((BitMatrix::from_rows(rows), w))
}
