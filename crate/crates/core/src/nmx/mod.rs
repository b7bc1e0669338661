//! Seeded and two-source non-malleable extractors: advice generation
//! composed with a correlation breaker, plus the parameter planner.
//!
//! Execution runs off fully resolved schedules ([`SnmSchedule`],
//! [`TnmSchedule`]); the strict planner in [`plan`] evaluates the
//! width/entropy inequalities for a named construction and either returns a
//! planning report or the first violated inequality. Desk-scale schedules
//! are built by the `desk_*` constructors: they keep every structural
//! requirement but fit the proportions to small n, where the asymptotic
//! inequalities cannot bind.

mod planner;

pub use planner::{plan, ledger_total, PlanOptions, Schedule};

use serde::{Deserialize, Serialize};

use crate::advice::{
    advgen_iterated, advgen_seeded_from_z, advgen_twosource, AdvgenIteratedParams,
    AdvgenSeededParams, AdvgenTwosourceParams, GSampleParams, SourceEncoding,
};
use crate::bits::BitVec;
use crate::breaker::{advcb_asym, advcb_recycled, Advice, AdvcbAsymParams, AdvcbRecycledParams};
use crate::extract::{iext, strong_ext};
use crate::merge::{log2_ceil, NipmAsymParams};
use crate::{Error, Result};

/// Execution schedule for the seeded non-malleable extractor.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SnmSchedule {
    /// Source length.
    pub n: usize,
    /// Seed length.
    pub d: usize,
    /// Width of Z_1 = Ext(x, Y_1), the breaker's X side.
    pub k_z: usize,
    pub advgen: AdvgenSeededParams,
    pub breaker: AdvcbAsymParams,
    pub m_out: usize,
    /// Boost stage width (0 disables): W_y = Ext(y, cb, boost_y), then the
    /// output re-extracts from Z_1.
    pub boost_y: usize,
}

impl SnmSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.advgen.n != self.n || self.advgen.d != self.d {
            return Err(Error::PlannerReject("snm: advice generator widths".into()));
        }
        if self.k_z == 0 || self.k_z > self.n {
            return Err(Error::PlannerReject("snm: k_z out of range".into()));
        }
        if self.advgen.z_bits > self.k_z {
            return Err(Error::PlannerReject("snm: advice Z slice exceeds Z_1".into()));
        }
        if self.breaker.n != self.k_z || self.breaker.s != self.d {
            return Err(Error::PlannerReject("snm: breaker widths must be (k_z, d)".into()));
        }
        if self.breaker.advice_len != self.advgen.advice_len() {
            return Err(Error::PlannerReject("snm: advice length mismatch".into()));
        }
        if self.boost_y == 0 {
            if self.m_out > self.breaker.m {
                return Err(Error::PlannerReject(
                    "snm: m_out exceeds breaker output and boost is disabled".into(),
                ));
            }
        } else {
            if self.boost_y > self.d || self.m_out > self.k_z {
                return Err(Error::PlannerReject("snm: boost widths out of range".into()));
            }
        }
        self.breaker.validate()
    }

    /// A total-20-enumerable-bits schedule for exhaustive oracle tests:
    /// prefix-only advice (L = 1) and the smallest structurally valid
    /// breaker.
    pub fn desk_tiny(n: usize, d: usize, m_out: usize) -> Result<SnmSchedule> {
        if n < 12 || d < 8 {
            return Err(Error::PlannerReject(format!(
                "snm desk_tiny: need n >= 12 and d >= 8, got n = {n}, d = {d}"
            )));
        }
        let k_z = 8;
        let advgen = AdvgenSeededParams {
            n,
            d,
            y1_len: 1,
            z_bits: 1,
            g: GSampleParams {
                encoding: SourceEncoding::Rs,
                w_sym: 2,
                n_cw: 4,
                s_cnt: 0,
            },
        };
        let inner = NipmAsymParams {
            l: 1,
            m: 2,
            d1: k_z / 2,
            d2: d / 2,
            d: 1,
            a: 1,
        };
        let breaker = AdvcbAsymParams {
            n: k_z,
            s: d,
            ell: 0,
            log1eps: 1,
            m: 2,
            dprime: 1,
            d_ip: 2,
            ff_w: 2,
            advice_len: 1,
            inner,
        };
        let sched = SnmSchedule {
            n,
            d,
            k_z,
            advgen,
            breaker,
            m_out: m_out.min(2),
            boost_y: 0,
        };
        sched.validate()?;
        Ok(sched)
    }

    /// A schedule for moderate widths (privacy amplification uses this).
    /// Requires n >= 384 and d >= 672; the output is capped at 24 bits
    /// unless the boost stage is enabled afterwards.
    pub fn desk_moderate(n: usize, d: usize, m_out: usize) -> Result<SnmSchedule> {
        if n < 384 || d < 672 {
            return Err(Error::PlannerReject(format!(
                "snm desk_moderate: need n >= 384 and d >= 672, got n = {n}, d = {d}"
            )));
        }
        let k_z = 128;
        // advice: 1 prefix bit + one sampled 7-bit symbol of the seed's
        // encoding = 8 bits
        let advgen = AdvgenSeededParams {
            n,
            d,
            y1_len: 1,
            z_bits: 16,
            g: GSampleParams {
                encoding: SourceEncoding::Rs,
                w_sym: 7,
                n_cw: 128,
                s_cnt: 1,
            },
        };
        let advice_len = advgen.advice_len();
        let m_cb = 24;
        // the merger slices each conv seed into thirds, so the chunk width
        // follows the row width: floor(24/5) = 4 <= 12/3
        let inner = NipmAsymParams {
            l: advice_len,
            m: m_cb,
            d1: k_z / 2,
            d2: d / 2,
            d: 12,
            a: 1,
        };
        let breaker = AdvcbAsymParams {
            n: k_z,
            s: d,
            ell: 8,
            log1eps: 8,
            m: m_cb,
            dprime: 4,
            d_ip: AdvcbAsymParams::paper_d_ip(4),
            ff_w: 8,
            advice_len,
            inner,
        };
        let sched = SnmSchedule {
            n,
            d,
            k_z,
            advgen,
            breaker,
            m_out: m_out.min(m_cb),
            boost_y: 0,
        };
        sched.validate()?;
        Ok(sched)
    }
}

/// Strong seeded non-malleable extraction under a schedule.
pub fn snm_ext(x: &BitVec, y: &BitVec, sched: &SnmSchedule) -> Result<BitVec> {
    if x.len() != sched.n || y.len() != sched.d {
        return Err(Error::WidthMismatch(format!(
            "snm_ext: |x| = {} / |y| = {} must match schedule ({} / {})",
            x.len(),
            y.len(),
            sched.n,
            sched.d
        )));
    }
    let y1 = y.slice(0, sched.advgen.y1_len);
    let z1 = strong_ext(x, &y1, sched.k_z)?;
    let z = z1.slice(0, sched.advgen.z_bits);
    let adv = advgen_seeded_from_z(y, &y1, &z, &sched.advgen)?;
    let cb = advcb_asym(&z1, y, &Advice::new(adv.advice)?, &sched.breaker, None)?;
    if sched.boost_y == 0 {
        Ok(cb.slice(0, sched.m_out))
    } else {
        let wy = strong_ext(y, &cb, sched.boost_y)?;
        strong_ext(&z1, &wy, sched.m_out)
    }
}

/// How the two-source extractor obtains its advice.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "mode")]
pub enum AdviceMode {
    /// Degenerate desk advice for exhaustively enumerable schedules:
    /// advice = X_1 xor Y_1 over the first n1 bits.
    PrefixXor { n1: usize },
    /// The iterated log*-round generator (the default).
    Iterated(AdvgenIteratedParams),
    /// The slice-and-sample two-source generator.
    TwoSource(AdvgenTwosourceParams),
}

impl AdviceMode {
    pub fn advice_len(&self) -> usize {
        match self {
            AdviceMode::PrefixXor { n1 } => *n1,
            AdviceMode::Iterated(p) => p.advice_len,
            AdviceMode::TwoSource(p) => p.advice_len(),
        }
    }

    /// Bits of the X side consumed before the breaker slice begins.
    fn x_head(&self) -> usize {
        match self {
            AdviceMode::PrefixXor { n1 } => *n1,
            AdviceMode::Iterated(p) => p.n1 + p.x4_len,
            AdviceMode::TwoSource(p) => p.slice_len,
        }
    }

    fn y_head(&self) -> usize {
        match self {
            AdviceMode::PrefixXor { n1 } => *n1,
            AdviceMode::Iterated(p) => p.n1 + p.y3_len,
            AdviceMode::TwoSource(p) => p.slice_len,
        }
    }
}

/// Execution schedule for the two-source non-malleable extractor. Each
/// source is laid out as advice head, breaker slice (X_5/Y_5), reserved
/// block (X_6/Y_6; the linear extractor consumes Y_6), free tail (X_7/Y_7).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TnmSchedule {
    pub n: usize,
    pub m_out: usize,
    pub advice: AdviceMode,
    /// |X_5| = |Y_5|.
    pub cb_len: usize,
    /// |X_6| = |Y_6|.
    pub res_len: usize,
    pub breaker: AdvcbRecycledParams,
}

impl TnmSchedule {
    pub fn x5_range(&self) -> (usize, usize) {
        let off = self.advice.x_head();
        (off, off + self.cb_len)
    }

    pub fn y5_range(&self) -> (usize, usize) {
        let off = self.advice.y_head();
        (off, off + self.cb_len)
    }

    pub fn x6_range(&self) -> (usize, usize) {
        let (_, e) = self.x5_range();
        (e, e + self.res_len)
    }

    pub fn y6_range(&self) -> (usize, usize) {
        let (_, e) = self.y5_range();
        (e, e + self.res_len)
    }

    /// The breaker output width (the seed of the linear extractor).
    pub fn d_v(&self) -> usize {
        self.breaker.m
    }

    pub fn validate(&self) -> Result<()> {
        if self.breaker.n != self.cb_len {
            return Err(Error::PlannerReject("tnm: breaker length must be cb_len".into()));
        }
        if self.breaker.advice_len != self.advice.advice_len() {
            return Err(Error::PlannerReject("tnm: advice length mismatch".into()));
        }
        if self.m_out == 0 || self.m_out > self.res_len {
            return Err(Error::PlannerReject(format!(
                "tnm: m_out = {} outside reserved block {}",
                self.m_out, self.res_len
            )));
        }
        let (_, x_end) = self.x6_range();
        let (_, y_end) = self.y6_range();
        if x_end > self.n || y_end > self.n {
            return Err(Error::PlannerReject(format!(
                "tnm: layout overruns n = {} (x end {}, y end {})",
                self.n, x_end, y_end
            )));
        }
        match &self.advice {
            AdviceMode::PrefixXor { n1 } => {
                if *n1 == 0 || *n1 > self.n {
                    return Err(Error::PlannerReject("tnm: bad prefix advice width".into()));
                }
            }
            AdviceMode::Iterated(p) => {
                if p.n != self.n {
                    return Err(Error::PlannerReject("tnm: advice generator n mismatch".into()));
                }
                p.validate()?;
            }
            AdviceMode::TwoSource(p) => {
                if p.n != self.n {
                    return Err(Error::PlannerReject("tnm: advice generator n mismatch".into()));
                }
                p.validate()?;
            }
        }
        self.breaker.validate()
    }

    /// Smallest runnable schedule: prefix advice, one flip-flop row, and a
    /// direct linear extraction. Exhaustively enumerable from n = 7.
    pub fn desk_tiny(n: usize, m_out: usize) -> Result<TnmSchedule> {
        if n < 7 {
            return Err(Error::PlannerReject(format!("tnm desk_tiny: need n >= 7, got {n}")));
        }
        let n1 = 1;
        let cb_len = 3;
        let res_len = n - n1 - cb_len;
        let inner = NipmAsymParams {
            l: 2,
            m: 1,
            d1: 2,
            d2: 2,
            d: 1,
            a: 1,
        };
        let breaker = AdvcbRecycledParams {
            n: cb_len,
            ell: 0,
            log1eps: 0,
            advice_len: n1,
            t: 2,
            m: 1,
            dprime: 1,
            d_ip: 1,
            d1: 2,
            d2: 2,
            ff_w: 1,
            inner,
        };
        let sched = TnmSchedule {
            n,
            m_out: m_out.min(res_len),
            advice: AdviceMode::PrefixXor { n1 },
            cb_len,
            res_len,
            breaker,
        };
        sched.validate()?;
        Ok(sched)
    }

    /// Full pipeline at moderate widths: iterated advice, recycled breaker,
    /// sampled source encodings. Requires n >= 1024 (a power of two keeps
    /// the symbol arithmetic simple).
    pub fn desk_moderate(n: usize, m_out: usize, advice_len: usize) -> Result<TnmSchedule> {
        if n < 1024 {
            return Err(Error::PlannerReject(format!(
                "tnm desk_moderate: need n >= 1024, got {n}"
            )));
        }
        let lgn = log2_ceil(n);
        // slices proportioned at tau = 1/128 so the breaker and the free
        // tail both fit
        let tau_n = n / 128;
        let z_bits = 24;
        let n1 = (3 * tau_n).div_ceil(z_bits) * z_bits;
        let w_sym = lgn.min(16);
        let g = GSampleParams {
            encoding: SourceEncoding::Rs,
            w_sym,
            n_cw: (1usize << w_sym).min(2 * n),
            s_cnt: 4,
        };
        let x3_len = (15 * tau_n).div_ceil(8) * 8;
        let y3_len = (10 * tau_n).div_ceil(8) * 8;
        let x4_len = 40 * tau_n;
        let advgen = AdvgenIteratedParams {
            n,
            advice_len,
            c_lo: 8,
            mu_num: 1,
            mu_den: 4,
            n1,
            z_bits,
            g,
            x3_len,
            y3_len,
            w_bits: 8,
            x4_len,
            chain_rounds: 4,
            chain_w: 8,
            loop_c: 4,
        };
        advgen.validate()?;
        // breaker: t = 4 keeps two merge iterations at L = 16. Widths are
        // chosen so every intermediate value on the output path has at
        // least ~9 bits: the hash extractor zeroes out whenever any seed
        // in the chain is zero, so narrow slices would absorb the rows
        // (and the advice dependence with them) into a constant.
        let t = 4;
        let m_v = 60; // merge slice floor(m/5) = 12 bits
        let dprime = 36; // recycled slices d/3 = 12, d/4 = 9
        let d1 = 144;
        let d2 = 432;
        let inner = NipmAsymParams {
            l: t,
            m: m_v,
            d1,
            d2,
            d: dprime,
            a: 1,
        };
        let mut breaker = AdvcbRecycledParams {
            n: 0, // patched below once cb_len is fixed
            ell: 48,
            log1eps: 8,
            advice_len,
            t,
            m: m_v,
            dprime,
            d_ip: 72,
            d1,
            d2,
            ff_w: 12,
            inner,
        };
        breaker.n = 1; // placeholder so slice_len is well-defined
        let cb_len = breaker.slice_len().max(d2).max(d1).div_ceil(32) * 32;
        breaker.n = cb_len;
        let res_len = 40.max(m_out);
        let sched = TnmSchedule {
            n,
            m_out,
            advice: AdviceMode::Iterated(advgen),
            cb_len,
            res_len,
            breaker,
        };
        sched.validate()?;
        // both tails must leave room for the sampled-symbol back-solve
        let solve_bits = sched.solve_bits();
        let (_, x_end) = sched.x6_range();
        let (_, y_end) = sched.y6_range();
        if sched.n - x_end < solve_bits + 8 || sched.n - y_end < solve_bits + 8 {
            return Err(Error::PlannerReject(format!(
                "tnm desk_moderate: free tails ({}, {}) too small for {solve_bits} constraint bits",
                sched.n - x_end,
                sched.n - y_end
            )));
        }
        Ok(sched)
    }

    /// The moderate schedule with the binary generating-matrix source
    /// encoding in place of Reed-Solomon (the improved-error variant).
    pub fn desk_moderate_binary(n: usize, m_out: usize, advice_len: usize) -> Result<TnmSchedule> {
        let mut sched = TnmSchedule::desk_moderate(n, m_out, advice_len)?;
        if let AdviceMode::Iterated(p) = &mut sched.advice {
            let n2 = n - p.n1;
            p.g = GSampleParams {
                encoding: SourceEncoding::Binary {
                    matrix_seed: 0x6e6d_6578_7462_696e,
                },
                w_sym: 1,
                n_cw: 2 * n2,
                s_cnt: 40,
            };
            p.validate()?;
        }
        sched.validate()?;
        Ok(sched)
    }

    /// Bits of linear constraints the encoder must back-solve per side.
    pub fn solve_bits(&self) -> usize {
        match &self.advice {
            AdviceMode::PrefixXor { .. } => 0,
            AdviceMode::Iterated(p) => p.g.out_bits(),
            AdviceMode::TwoSource(p) => p.g.out_bits(),
        }
    }
}

/// Replace an all-zero breaker output with the field identity so the linear
/// extractor stays total. Encoding counts preimages through the same patch,
/// so decode(encode(s)) = s is unaffected.
pub(crate) fn nonzero_or_one(v: BitVec) -> BitVec {
    if v.is_zero() {
        let mut one = BitVec::zeros(v.len());
        one.set(0, true);
        one
    } else {
        v
    }
}

/// Compute the advice string for a schedule.
pub fn tnm_advice(x: &BitVec, y: &BitVec, sched: &TnmSchedule) -> Result<BitVec> {
    Ok(match &sched.advice {
        AdviceMode::PrefixXor { n1 } => x.slice(0, *n1).xor(&y.slice(0, *n1)),
        AdviceMode::Iterated(p) => advgen_iterated(x, y, p)?.advice,
        AdviceMode::TwoSource(p) => advgen_twosource(x, y, p)?.advice,
    })
}

/// The breaker value V and its nonzero patch V*.
pub fn tnm_seed(x: &BitVec, y: &BitVec, sched: &TnmSchedule) -> Result<BitVec> {
    let advice = tnm_advice(x, y, sched)?;
    let (x5a, x5b) = sched.x5_range();
    let (y5a, y5b) = sched.y5_range();
    let v = advcb_recycled(
        &x.slice(x5a, x5b),
        &y.slice(y5a, y5b),
        &Advice::new(advice)?,
        &sched.breaker,
        None,
    )?;
    Ok(nonzero_or_one(v))
}

/// Two-source non-malleable extraction under a schedule: advice, breaker,
/// then an invertible linear extraction from Y_6.
pub fn tnm_ext(x: &BitVec, y: &BitVec, sched: &TnmSchedule) -> Result<BitVec> {
    if x.len() != sched.n || y.len() != sched.n {
        return Err(Error::WidthMismatch(format!(
            "tnm_ext: source lengths {} / {} must both be {}",
            x.len(),
            y.len(),
            sched.n
        )));
    }
    let v = tnm_seed(x, y, sched)?;
    let (y6a, y6b) = sched.y6_range();
    iext(&y.slice(y6a, y6b), &v, sched.m_out)
}

/// Stable hash of a schedule's JSON form, used by the codeword wire format.
pub fn schedule_hash(sched: &TnmSchedule) -> u64 {
    let json = serde_json::to_string(sched).expect("schedule serializes");
    // FNV-1a
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in json.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    h
}
