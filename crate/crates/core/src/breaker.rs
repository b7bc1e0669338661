//! The flip-flop primitive and the two correlation breakers with advice.
//!
//! flip-flop is a one-bit-advice breaker built from two 2-round alternating
//! extractions: the advice bit selects which transcript round seeds the
//! bridge between the phases, so sides holding different bits extract along
//! different rounds and the look-ahead property decouples them. Its breaking
//! property is certified empirically by the oracle suite.

use serde::{Deserialize, Serialize};

use crate::altext::la_ext_pair;
use crate::bits::BitVec;
use crate::extract::{ip_ext, strong_ext};
use crate::merge::{nipm_asym, Ledger, NipmAsymParams, RowMatrix};
use crate::{Error, Result};

/// An advice string; one flip-flop row per bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Advice {
    bits: BitVec,
}

impl Advice {
    pub fn new(bits: BitVec) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidInput("advice must have at least one bit".into()));
        }
        Ok(Advice { bits })
    }

    pub fn from_u64(value: u64, len: usize) -> Result<Self> {
        Advice::new(BitVec::from_u64(value, len))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits.get(i)
    }

    pub fn bits(&self) -> &BitVec {
        &self.bits
    }
}

/// Resolved widths for flip-flop: internal round width and output width.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FlipFlopParams {
    pub w: usize,
    pub m: usize,
}

impl FlipFlopParams {
    pub fn validate(&self, x_len: usize, y_len: usize) -> Result<()> {
        if self.w == 0 || self.m == 0 {
            return Err(Error::PlannerReject("flip_flop: zero width".into()));
        }
        if self.w > x_len || self.w > y_len || self.m > x_len {
            return Err(Error::PlannerReject(format!(
                "flip_flop: widths (w = {}, m = {}) exceed inputs (|x| = {x_len}, |y| = {y_len})",
                self.w, self.m
            )));
        }
        Ok(())
    }
}

/// Basic one-bit correlation breaker. Phase 1 runs a 2-round alternating
/// extraction of x against y giving R_1, R_2; the bridge A extracts from y
/// with R_{1+b}; phase 2 re-runs the extraction of x against A giving R'_1,
/// R'_2; the output extracts from x with R'_{2-b}.
pub fn flip_flop(
    x: &BitVec,
    y: &BitVec,
    b: bool,
    p: &FlipFlopParams,
    mut ledger: Option<&mut Ledger>,
) -> Result<BitVec> {
    p.validate(x.len(), y.len())?;
    let phase1 = la_ext_pair(x, y, 2, p.w, p.w)?;
    if let Some(l) = ledger.as_deref_mut() {
        l.push("phase1.la_ext", phase1.r_list[0].len());
    }
    let pick1 = if b { 1 } else { 0 };
    let a = strong_ext(y, &phase1.r_list[pick1], p.w)?;
    if let Some(l) = ledger.as_deref_mut() {
        l.push("bridge", a.len());
    }
    let phase2 = la_ext_pair(x, &a, 2, p.w, p.w)?;
    if let Some(l) = ledger.as_deref_mut() {
        l.push("phase2.la_ext", phase2.r_list[0].len());
    }
    let pick2 = if b { 0 } else { 1 };
    let out = strong_ext(x, &phase2.r_list[pick2], p.m)?;
    if let Some(l) = ledger.as_deref_mut() {
        l.push("out", out.len());
    }
    Ok(out)
}

/// Resolved widths for the asymmetric correlation breaker.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct AdvcbAsymParams {
    /// |x|.
    pub n: usize,
    /// |y|.
    pub s: usize,
    /// Entropy deficiency of the sources (from the composer's leak ledger).
    pub ell: usize,
    /// Resolved ceil(log2(1/eps)).
    pub log1eps: usize,
    /// Output width; also the merger row width.
    pub m: usize,
    /// Base seed chunk d'.
    pub dprime: usize,
    /// Width of Z = IP(X^0, Y^0); the paper proportion is 8*d'.
    pub d_ip: usize,
    /// flip-flop internal width.
    pub ff_w: usize,
    /// Advice length L.
    pub advice_len: usize,
    /// Final merger schedule: d1 = n/2, d2 = s/2, output m.
    pub inner: NipmAsymParams,
}

impl AdvcbAsymParams {
    /// The inner-product output width.
    pub fn d(&self) -> usize {
        self.d_ip
    }

    /// The paper's proportion for d_ip.
    pub fn paper_d_ip(dprime: usize) -> usize {
        8 * dprime
    }

    /// Slice length for X^0 and Y^0: d + 2*ell + 2*log(1/eps), rounded up to
    /// a multiple of d so the inner product splits into blocks.
    pub fn slice_len(&self) -> usize {
        let d = self.d();
        let raw = d + 2 * self.ell + 2 * self.log1eps;
        raw.div_ceil(d) * d
    }

    pub fn validate(&self) -> Result<()> {
        if self.dprime == 0 || self.m == 0 || self.advice_len == 0 || self.d_ip == 0 {
            return Err(Error::PlannerReject("advcb_asym: zero width".into()));
        }
        let d = self.d();
        if self.slice_len() > self.n || self.slice_len() > self.s {
            return Err(Error::PlannerReject(format!(
                "advcb_asym: slice {} exceeds n = {} or s = {}",
                self.slice_len(),
                self.n,
                self.s
            )));
        }
        if 3 * self.m > self.n {
            return Err(Error::PlannerReject("advcb_asym: 3m exceeds n".into()));
        }
        if 3 * d > self.s {
            return Err(Error::PlannerReject("advcb_asym: 3d exceeds s".into()));
        }
        if self.inner.d1 != self.n / 2 || self.inner.d2 != self.s / 2 {
            return Err(Error::PlannerReject(
                "advcb_asym: inner merger widths must be n/2 and s/2".into(),
            ));
        }
        if self.inner.m != self.m {
            return Err(Error::PlannerReject("advcb_asym: inner merger output width".into()));
        }
        self.inner.validate()?;
        FlipFlopParams { w: self.ff_w, m: self.m }.validate(3 * self.m, 3 * d)
    }
}

/// Asymmetric correlation breaker with advice.
pub fn advcb_asym(
    x: &BitVec,
    y: &BitVec,
    alpha: &Advice,
    p: &AdvcbAsymParams,
    mut ledger: Option<&mut Ledger>,
) -> Result<BitVec> {
    p.validate()?;
    if x.len() != p.n || y.len() != p.s {
        return Err(Error::WidthMismatch(format!(
            "advcb_asym: |x| = {} / |y| = {} must match schedule ({} / {})",
            x.len(),
            y.len(),
            p.n,
            p.s
        )));
    }
    if alpha.len() != p.advice_len {
        return Err(Error::WidthMismatch(format!(
            "advcb_asym: advice length {} must match schedule L = {}",
            alpha.len(),
            p.advice_len
        )));
    }
    let d = p.d();

    // steps 1-2: slices and the inner-product seed
    let slice = p.slice_len();
    let x0 = x.slice(0, slice);
    let y0 = y.slice(0, slice);
    let z = ip_ext(&x0, &y0, d)?;
    if let Some(l) = ledger.as_deref_mut() {
        l.push("x0", slice);
        l.push("y0", slice);
        l.push("z", z.len());
    }

    // steps 3-4: two look-ahead chains seeded by Z
    let tx = la_ext_pair(x, &z, 2, 3 * p.m, p.dprime)?;
    let (x_0, x_1) = (&tx.r_list[0], &tx.r_list[1]);
    let ty = la_ext_pair(y, &z, 2, 3 * d, p.dprime)?;
    let (y_0, y_1) = (&ty.r_list[0], &ty.r_list[1]);
    if let Some(l) = ledger.as_deref_mut() {
        l.push("x_i", x_0.len());
        l.push("y_i", y_0.len());
    }

    // step 5: the advice-indexed flip-flop matrix
    let ff = FlipFlopParams { w: p.ff_w, m: p.m };
    let mut rows = Vec::with_capacity(alpha.len());
    for i in 0..alpha.len() {
        rows.push(flip_flop(x_1, y_1, alpha.bit(i), &ff, None)?);
    }
    let v = RowMatrix::new(rows)?;

    // step 6: refreshed halves
    let x_hat = strong_ext(x, y_0, p.n / 2)?;
    let y_hat = strong_ext(y, x_0, p.s / 2)?;
    if let Some(l) = ledger.as_deref_mut() {
        l.push("x_hat", x_hat.len());
        l.push("y_hat", y_hat.len());
    }

    // step 7: merge; the X-strong output is the breaker output
    let (wx, _wy) = nipm_asym(&v, &x_hat, &y_hat, &p.inner, ledger.as_deref_mut())?;
    if let Some(l) = ledger.as_deref_mut() {
        l.push("out", wx.len());
    }
    Ok(wx)
}

/// Resolved widths for the recycling correlation breaker.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct AdvcbRecycledParams {
    /// |x| = |y|.
    pub n: usize,
    /// Entropy deficiency.
    pub ell: usize,
    /// Resolved ceil(log2(1/eps)).
    pub log1eps: usize,
    /// Advice length L.
    pub advice_len: usize,
    /// Merge arity t, 2 <= t <= L.
    pub t: usize,
    /// Row width and output width.
    pub m: usize,
    /// NIPM_y output width d'.
    pub dprime: usize,
    /// Width of Z = IP(X^0, Y^0); the paper proportion is
    /// 8 * iterations * d'.
    pub d_ip: usize,
    /// X_i width.
    pub d1: usize,
    /// Y_i width.
    pub d2: usize,
    /// flip-flop internal width.
    pub ff_w: usize,
    /// Group merger: l = t, output d' via the Y-strong side.
    pub inner: NipmAsymParams,
}

impl AdvcbRecycledParams {
    /// Merge iterations: ceil(log_t L).
    pub fn iterations(&self) -> usize {
        let mut rows = self.advice_len;
        let mut it = 0;
        while rows > 1 {
            rows = rows.div_ceil(self.t);
            it += 1;
        }
        it
    }

    /// The X chain consumes 3 * iterations + 1 look-ahead values.
    pub fn x_chain_len(&self) -> usize {
        3 * self.iterations() + 1
    }

    /// The paper's proportion for d_ip.
    pub fn paper_d_ip(iterations: usize, dprime: usize) -> usize {
        8 * iterations.max(1) * dprime
    }

    pub fn d(&self) -> usize {
        self.d_ip
    }

    pub fn slice_len(&self) -> usize {
        let d = self.d();
        let raw = d + 2 * self.ell + 2 * self.log1eps;
        raw.div_ceil(d) * d
    }

    pub fn validate(&self) -> Result<()> {
        if self.advice_len == 0 || self.d_ip == 0 || self.dprime == 0 {
            return Err(Error::PlannerReject("advcb_recycled: zero width".into()));
        }
        if self.advice_len > 1 && (self.t < 2 || self.t > self.advice_len) {
            return Err(Error::PlannerReject(format!(
                "advcb_recycled: need 2 <= t <= L, got t = {} and L = {}",
                self.t, self.advice_len
            )));
        }
        if self.slice_len() > self.n {
            return Err(Error::PlannerReject(format!(
                "advcb_recycled: slice {} exceeds n = {}",
                self.slice_len(),
                self.n
            )));
        }
        if self.d1 > self.n || self.d2 > self.n || self.m > self.d1 {
            return Err(Error::PlannerReject(
                "advcb_recycled: chain widths exceed the sources".into(),
            ));
        }
        if self.iterations() > 0 {
            if self.inner.l != self.t || self.inner.d != self.dprime {
                return Err(Error::PlannerReject(
                    "advcb_recycled: inner merger must have l = t and d = d'".into(),
                ));
            }
            if self.inner.d1 != self.d1 || self.inner.d2 != self.d2 || self.inner.m != self.m {
                return Err(Error::PlannerReject(
                    "advcb_recycled: inner merger widths must be (d1, d2, m)".into(),
                ));
            }
            self.inner.validate()?;
        }
        FlipFlopParams { w: self.ff_w, m: self.m }.validate(self.d1, self.d2)
    }
}

/// Recycling correlation breaker with advice: merges every t rows per
/// iteration, consuming three fresh X values per iteration and refreshing Y
/// between iterations.
pub fn advcb_recycled(
    x: &BitVec,
    y: &BitVec,
    alpha: &Advice,
    p: &AdvcbRecycledParams,
    mut ledger: Option<&mut Ledger>,
) -> Result<BitVec> {
    p.validate()?;
    if x.len() != p.n || y.len() != p.n {
        return Err(Error::WidthMismatch(format!(
            "advcb_recycled: |x| = {} / |y| = {} must both be n = {}",
            x.len(),
            y.len(),
            p.n
        )));
    }
    if alpha.len() != p.advice_len {
        return Err(Error::WidthMismatch(format!(
            "advcb_recycled: advice length {} must match schedule L = {}",
            alpha.len(),
            p.advice_len
        )));
    }
    let iters = p.iterations();
    let d = p.d();

    // steps 1-2: slices and the inner-product seed
    let slice = p.slice_len();
    let z = ip_ext(&x.slice(0, slice), &y.slice(0, slice), d)?;
    if let Some(l) = ledger.as_deref_mut() {
        l.push("x0", slice);
        l.push("y0", slice);
        l.push("z", z.len());
    }

    // step 3: X look-ahead chain, 3*iters + 1 values of d1 bits
    let tx = la_ext_pair(x, &z, p.x_chain_len(), p.d1, p.dprime)?;
    let xs = tx.r_list;
    if let Some(l) = ledger.as_deref_mut() {
        l.push("x_chain_len", xs.len());
        l.push("x_i", p.d1);
    }

    // step 4: Y chain, two values of d2 bits
    let ty = la_ext_pair(y, &z, 2, p.d2, p.dprime)?;
    let mut y_cur = ty.r_list[1].clone();
    if let Some(l) = ledger.as_deref_mut() {
        l.push("y_i", p.d2);
    }

    // step 5: initial matrix from flip-flop rows
    let ff = FlipFlopParams { w: p.ff_w, m: p.m };
    let mut rows = Vec::with_capacity(alpha.len());
    for i in 0..alpha.len() {
        rows.push(flip_flop(&xs[0], &ty.r_list[0], alpha.bit(i), &ff, None)?);
    }

    // step 6: merge every t rows, recycling y between iterations
    for i in 1..=iters {
        let mut merged = Vec::with_capacity(rows.len().div_ceil(p.t));
        for group in rows.chunks(p.t) {
            let gm = RowMatrix::new(group.to_vec())?;
            let (_wx, wy) = nipm_asym(&gm, &xs[3 * i - 2], &y_cur, &p.inner, None)?;
            let restored = strong_ext(&xs[3 * i], &wy, p.m)?;
            merged.push(restored);
        }
        if let Some(l) = ledger.as_deref_mut() {
            l.push(format!("iter{i}.rows"), merged.len());
        }
        y_cur = strong_ext(y, &xs[3 * i - 1], p.d2)?;
        rows = merged;
    }
    debug_assert_eq!(rows.len(), 1);
    if let Some(l) = ledger.as_deref_mut() {
        l.push("out", rows[0].len());
    }
    Ok(rows.pop().unwrap())
}
