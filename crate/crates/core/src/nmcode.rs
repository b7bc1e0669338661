//! 2-split-state non-malleable code: encoding by uniform preimage sampling
//! of the two-source non-malleable extractor, decoding by evaluating it, and
//! the tampering-experiment harness with an exact LP certifier.
//!
//! The encoder samples everything except Y_6 and the two free tails
//! forward, inverts the linear extractor for Y_6, and back-solves the tails
//! against the sampled symbol values. For every fixing of the forward part,
//! Y_6 -> output is exactly 2^(|Y_6| - m)-to-one, so preimage counts agree
//! across messages and the sampler is uniform on each class.

mod lp;

use std::collections::HashMap;

use rand::Rng;

use crate::advice::{iterated_tail, GSampleParams, SourceEncoding};
use crate::bits::BitVec;
use crate::extract::{iext_invert_sample, sample_distinct};
use crate::fields::{ctx_for, reduce_system, rs_encode_u32};
use crate::nmx::{tnm_ext, tnm_seed, AdviceMode, TnmSchedule};
use crate::oracle::hoeffding_ci;
use crate::{Error, Result};

/// A codeword: two equal-length states tampered independently.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codeword {
    pub left: BitVec,
    pub right: BitVec,
}

/// Simulator outcome: a concrete message or the same-star marker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NMOutcome {
    Message(BitVec),
    SameStar,
}

/// copy(x, y): x unless x = same-star, else y.
pub fn copy_outcome(x: &NMOutcome, y: &BitVec) -> BitVec {
    match x {
        NMOutcome::Message(m) => m.clone(),
        NMOutcome::SameStar => y.clone(),
    }
}

/// One split-state tampering function in closed form.
#[derive(Clone, Debug)]
pub enum TamperFn {
    Identity,
    Constant(BitVec),
    XorMask(BitVec),
    /// y -> mul * y + add in GF(2^n). For mul not in {0, 1} this has exactly
    /// one fixed point, which sampling will essentially never find.
    Affine { mul: BitVec, add: BitVec },
    /// Explicit table, for exhaustive tiny instances.
    Table(Vec<u64>),
}

impl TamperFn {
    pub fn apply(&self, v: &BitVec) -> BitVec {
        match self {
            TamperFn::Identity => v.clone(),
            TamperFn::Constant(c) => c.clone(),
            TamperFn::XorMask(m) => v.xor(m),
            TamperFn::Affine { mul, add } => {
                let ctx = ctx_for(v.len()).expect("width registered");
                let prod = ctx.mul(v.words(), mul.words());
                BitVec::from_words(prod, v.len()).xor(add)
            }
            TamperFn::Table(t) => BitVec::from_u64(t[v.low_u64() as usize], v.len()),
        }
    }
}

/// A pair of split-state tampering functions with declared fixed-point
/// metadata. The flags are verified exhaustively for n <= 16 and by
/// sampling otherwise.
#[derive(Clone, Debug)]
pub struct TamperPair {
    pub name: String,
    pub f: TamperFn,
    pub g: TamperFn,
    pub fixed_point_free_f: bool,
    pub fixed_point_free_g: bool,
}

impl TamperPair {
    /// Check the declared flags; exhaustive when n <= 16, otherwise by
    /// `samples` random probes (which cannot prove freedom, only falsify).
    pub fn verify_flags<R: Rng + ?Sized>(&self, n: usize, samples: usize, rng: &mut R) -> bool {
        let mut check = |f: &TamperFn, declared_free: bool| -> bool {
            if n <= 16 {
                let mut has_fixed = false;
                for v in 0u64..(1 << n) {
                    let bv = BitVec::from_u64(v, n);
                    if f.apply(&bv) == bv {
                        has_fixed = true;
                        break;
                    }
                }
                declared_free == !has_fixed
            } else {
                if declared_free {
                    for _ in 0..samples {
                        let bv = BitVec::random(n, rng);
                        if f.apply(&bv) == bv {
                            return false;
                        }
                    }
                }
                true
            }
        };
        check(&self.f, self.fixed_point_free_f) && check(&self.g, self.fixed_point_free_g)
    }
}

/// The standard certification family: constant pairs, bit-flip pairs, and
/// affine pairs with multiplier outside {0, 1}.
pub fn standard_family<R: Rng + ?Sized>(
    n: usize,
    constants: usize,
    bitflips: usize,
    affines: usize,
    rng: &mut R,
) -> Vec<TamperPair> {
    let mut out = Vec::new();
    for i in 0..constants {
        out.push(TamperPair {
            name: format!("const{i}"),
            f: TamperFn::Constant(BitVec::random(n, rng)),
            g: TamperFn::Constant(BitVec::random(n, rng)),
            fixed_point_free_f: false,
            fixed_point_free_g: false,
        });
    }
    for i in 0..bitflips {
        let mut m1 = BitVec::random(n, rng);
        if m1.is_zero() {
            m1.set(0, true);
        }
        let mut m2 = BitVec::random(n, rng);
        if m2.is_zero() {
            m2.set(1 % n, true);
        }
        out.push(TamperPair {
            name: format!("bitflip{i}"),
            f: TamperFn::XorMask(m1),
            g: TamperFn::XorMask(m2),
            fixed_point_free_f: true,
            fixed_point_free_g: true,
        });
    }
    for i in 0..affines {
        let mut mk = || {
            let mut mul = BitVec::random(n, rng);
            while mul.is_zero() || mul == BitVec::from_u64(1, n) {
                mul = BitVec::random(n, rng);
            }
            TamperFn::Affine {
                mul,
                add: BitVec::random(n, rng),
            }
        };
        out.push(TamperPair {
            name: format!("affine{i}"),
            f: mk(),
            g: mk(),
            fixed_point_free_f: true,
            fixed_point_free_g: true,
        });
    }
    out
}

const ENCODE_RETRIES: usize = 64;

/// Encode a message as a uniform sample of the extractor preimage.
pub fn encode<R: Rng + ?Sized>(s: &BitVec, sched: &TnmSchedule, rng: &mut R) -> Result<Codeword> {
    if s.len() != sched.m_out {
        return Err(Error::WidthMismatch(format!(
            "encode: message width {} must be m_out = {}",
            s.len(),
            sched.m_out
        )));
    }
    match &sched.advice {
        AdviceMode::PrefixXor { .. } => encode_prefix(s, sched, rng),
        AdviceMode::Iterated(_) => encode_iterated(s, sched, rng),
        AdviceMode::TwoSource(_) => Err(Error::InvalidInput(
            "encode: the two-source advice mode has no preimage sampler".into(),
        )),
    }
}

fn encode_prefix<R: Rng + ?Sized>(s: &BitVec, sched: &TnmSchedule, rng: &mut R) -> Result<Codeword> {
    let n = sched.n;
    let left = BitVec::random(n, rng);
    let mut right = BitVec::random(n, rng);
    let v = tnm_seed(&left, &right, sched)?;
    let y6 = iext_invert_sample(s, &v, sched.res_len, rng)?;
    let (a, b) = sched.y6_range();
    for (i, pos) in (a..b).enumerate() {
        right.set(pos, y6.get(i));
    }
    Ok(Codeword { left, right })
}

fn encode_iterated<R: Rng + ?Sized>(
    s: &BitVec,
    sched: &TnmSchedule,
    rng: &mut R,
) -> Result<Codeword> {
    let p = match &sched.advice {
        AdviceMode::Iterated(p) => p,
        _ => unreachable!(),
    };
    let n = sched.n;
    for _ in 0..ENCODE_RETRIES {
        // forward sampling: slices and the symbol values
        let x1 = BitVec::random(p.n1, rng);
        let y1 = BitVec::random(p.n1, rng);
        let xt2 = BitVec::random(p.g.out_bits(), rng);
        let yt2 = BitVec::random(p.g.out_bits(), rng);
        let x4 = BitVec::random(p.x4_len, rng);
        let y3 = BitVec::random(p.y3_len, rng);
        let x5 = BitVec::random(sched.cb_len, rng);
        let y5 = BitVec::random(sched.cb_len, rng);
        let x6 = BitVec::random(sched.res_len, rng);

        let z = crate::extract::ip_ext(&x1, &y1, p.z_bits)?;
        let idxs = sample_distinct(&z, p.g.n_cw, p.g.s_cnt)?;

        // advice and the breaker seed
        let x3 = x4.slice(0, p.x3_len);
        let advice = iterated_tail(&x1, &y1, &xt2, &yt2, &x3, &y3, &x4, p)?;
        let v = crate::breaker::advcb_recycled(
            &x5,
            &y5,
            &crate::breaker::Advice::new(advice)?,
            &sched.breaker,
            None,
        )?;
        let v = crate::nmx::nonzero_or_one(v);
        let y6 = iext_invert_sample(s, &v, sched.res_len, rng)?;

        // back-solve the free tails against the sampled symbol values
        let n2 = n - p.n1;
        let x_tail_off = p.x4_len + sched.cb_len + sched.res_len;
        let x2_known = BitVec::concat_all([&x4, &x5, &x6, &BitVec::zeros(n2 - x_tail_off)]);
        let x7 = match solve_tail(&x2_known, x_tail_off, &idxs, &xt2, &p.g, rng) {
            Ok(t) => t,
            Err(Error::Infeasible) => continue,
            Err(e) => return Err(e),
        };
        let y_tail_off = p.y3_len + sched.cb_len + sched.res_len;
        let y2_known = BitVec::concat_all([&y3, &y5, &y6, &BitVec::zeros(n2 - y_tail_off)]);
        let y7 = match solve_tail(&y2_known, y_tail_off, &idxs, &yt2, &p.g, rng) {
            Ok(t) => t,
            Err(Error::Infeasible) => continue,
            Err(e) => return Err(e),
        };
        let left = BitVec::concat_all([&x1, &x4, &x5, &x6, &x7]);
        let right = BitVec::concat_all([&y1, &y3, &y5, &y6, &y7]);
        debug_assert_eq!(left.len(), n);
        debug_assert_eq!(right.len(), n);
        return Ok(Codeword { left, right });
    }
    Err(Error::SearchExhausted(ENCODE_RETRIES))
}

/// Solve for the free tail of one side so that the sampled coordinates of
/// the reversed-side encoding match the drawn values. The tail sits at the
/// high end of side_2, i.e. at the low end of the reversed message.
fn solve_tail<R: Rng + ?Sized>(
    side2_known: &BitVec,
    tail_off: usize,
    idxs: &[usize],
    vals: &BitVec,
    g: &GSampleParams,
    rng: &mut R,
) -> Result<BitVec> {
    let n2 = side2_known.len();
    let tail_len = n2 - tail_off;
    let rev = side2_known.reversed();

    match &g.encoding {
        SourceEncoding::Rs => {
            let w = g.w_sym;
            let ctx = ctx_for(w)?;
            // base: sampled symbols with the tail zeroed
            let n0 = n2.div_ceil(w);
            let mut symbols = Vec::with_capacity(n0);
            for i in 0..n0 {
                let hi = ((i + 1) * w).min(n2);
                symbols.push(rev.slice(i * w, hi).low_u64() as u32);
            }
            let points: Vec<u32> = idxs.iter().map(|&i| i as u32).collect();
            let base = rs_encode_u32(&ctx, &symbols, &points);

            let n_rows = idxs.len() * w;
            let mut rhs = vec![false; n_rows];
            for (j, &bs) in base.iter().enumerate() {
                let want = vals.slice(j * w, (j + 1) * w).low_u64() as u32;
                let diff = (bs ^ want) as u64;
                for t in 0..w {
                    rhs[j * w + t] = (diff >> t) & 1 == 1;
                }
            }

            // column p: flipping tail bit p flips reversed coefficient bit
            // (n2-1-tail_off-p), i.e. x^(bq) * alpha^(iq) on each sample
            let max_sym = (n2 - 1 - tail_off) / w;
            let mut pows: Vec<Vec<u64>> = Vec::with_capacity(points.len());
            for &pt in &points {
                let mut row = Vec::with_capacity(max_sym + 1);
                let mut cur: u64 = 1;
                for _ in 0..=max_sym {
                    row.push(cur);
                    cur = ctx.mul_u64(cur, pt as u64);
                }
                pows.push(row);
            }
            let words = tail_len.div_ceil(64);
            let mut rows = vec![vec![0u64; words]; n_rows];
            for pcol in 0..tail_len {
                let q = n2 - 1 - (tail_off + pcol);
                let iq = q / w;
                let bq = q % w;
                for (j, pow_row) in pows.iter().enumerate() {
                    let delta = ctx.mul_u64(1u64 << bq, pow_row[iq]);
                    for t in 0..w {
                        if (delta >> t) & 1 == 1 {
                            rows[j * w + t][pcol / 64] ^= 1u64 << (pcol % 64);
                        }
                    }
                }
            }
            let sys = reduce_system(rows, rhs, tail_len)?;
            Ok(sys.sample(rng))
        }
        SourceEncoding::Binary { matrix_seed } => {
            let mat = crate::advice::binary_source_matrix(n2, g.n_cw, g.s_cnt, *matrix_seed)?;
            let base = mat.mul_left(&rev);
            let n_rows = idxs.len();
            let mut rhs = vec![false; n_rows];
            let words = tail_len.div_ceil(64);
            let mut rows = vec![vec![0u64; words]; n_rows];
            for (j, &i) in idxs.iter().enumerate() {
                rhs[j] = base.get(i) ^ vals.get(j);
                // coordinate i depends on reversed-message bit q = matrix row
                for pcol in 0..tail_len {
                    let q = n2 - 1 - (tail_off + pcol);
                    if mat.get(q, i) {
                        rows[j][pcol / 64] ^= 1u64 << (pcol % 64);
                    }
                }
            }
            let sys = reduce_system(rows, rhs, tail_len)?;
            Ok(sys.sample(rng))
        }
    }
}

/// Decode: evaluate the extractor. Total on well-formed codewords.
pub fn decode(c: &Codeword, sched: &TnmSchedule) -> BitVec {
    tnm_ext(&c.left, &c.right, sched).expect("validated schedule decodes totally")
}

/// Empirical law of decode(f(left), g(right)) over fresh encodings of s.
pub fn tamper_experiment<R: Rng + ?Sized>(
    s: &BitVec,
    tp: &TamperPair,
    sched: &TnmSchedule,
    trials: usize,
    rng: &mut R,
) -> Result<HashMap<u64, u64>> {
    if trials == 0 {
        return Err(Error::InvalidInput("tamper_experiment: trials >= 1".into()));
    }
    let mut counts = HashMap::new();
    for _ in 0..trials {
        let c = encode(s, sched, rng)?;
        let tampered = Codeword {
            left: tp.f.apply(&c.left),
            right: tp.g.apply(&c.right),
        };
        let m = decode(&tampered, sched);
        *counts.entry(m.low_u64()).or_insert(0u64) += 1;
    }
    Ok(counts)
}

/// Certification settings: messages tested per pair, trials per message, and
/// the outcome coarsening for the LP statistic.
#[derive(Clone, Debug)]
pub struct CertifyConfig {
    pub messages: Vec<BitVec>,
    pub trials_per_message: usize,
    pub confidence: f64,
    pub buckets: usize,
}

/// Per-pair certification result.
#[derive(Clone, Debug)]
pub struct PairReport {
    pub tamper_id: String,
    /// (message, residual distance at the shared optimum).
    pub per_message: Vec<(BitVec, f64)>,
    pub max_distance: f64,
    pub ci: f64,
    /// LP weight on the identity component.
    pub id_weight: f64,
}

/// Distance of the observed tampered-decode laws to the nearest shared
/// NM mixture (identity + constants), on a coarsened outcome space:
/// category 0 is "equals the test message", the rest hash the output into
/// buckets. Coarsening only shrinks distances, so the statistic is a sound
/// necessary check at these sample sizes.
pub fn nearest_nm_mixture(
    messages: &[BitVec],
    laws: &[HashMap<u64, u64>],
    m_out: usize,
    buckets: usize,
) -> (f64, Vec<f64>, f64) {
    let b = buckets.min(1usize << m_out.min(20)).max(1);
    let m = messages.len();
    let cats = 1 + b;
    let msg_vals: Vec<u64> = messages.iter().map(|s| s.low_u64()).collect();
    // empirical laws over categories
    let mut dhat = vec![vec![0.0f64; cats]; m];
    for (x, law) in laws.iter().enumerate() {
        let total: u64 = law.values().sum();
        for (&u, &cnt) in law {
            let cat = if u == msg_vals[x] { 0 } else { 1 + (u as usize % b) };
            dhat[x][cat] += cnt as f64 / total as f64;
        }
    }
    // variables: w_id, w_msg[0..m], w_bucket[0..b], t[x][cat], z
    let nw = 1 + m + b;
    let nt = m * cats;
    let nv = nw + nt + 1;
    let zi = nv - 1;
    let g_coeff = |x: usize, cat: usize| -> Vec<(usize, f64)> {
        let mut v = Vec::new();
        if cat == 0 {
            v.push((0, 1.0)); // w_id
            v.push((1 + x, 1.0)); // w_msg[x]
        } else {
            let beta = cat - 1;
            v.push((1 + m + beta, 1.0));
            for (j, &mv) in msg_vals.iter().enumerate() {
                if j != x && (mv as usize % b) == beta {
                    v.push((1 + j, 1.0));
                }
            }
        }
        v
    };
    let mut a_ub: Vec<Vec<f64>> = Vec::new();
    let mut b_ub: Vec<f64> = Vec::new();
    // t >= dhat - G: -G - t <= -dhat
    for x in 0..m {
        for cat in 0..cats {
            let mut row = vec![0.0; nv];
            for (vi, co) in g_coeff(x, cat) {
                row[vi] = -co;
            }
            row[nw + x * cats + cat] = -1.0;
            a_ub.push(row);
            b_ub.push(-dhat[x][cat]);
        }
        // sum_cat t <= z
        let mut row = vec![0.0; nv];
        for cat in 0..cats {
            row[nw + x * cats + cat] = 1.0;
        }
        row[zi] = -1.0;
        a_ub.push(row);
        b_ub.push(0.0);
    }
    // sum of weights = 1
    let mut eq = vec![0.0; nv];
    for v in eq.iter_mut().take(nw) {
        *v = 1.0;
    }
    let mut c = vec![0.0; nv];
    c[zi] = 1.0;
    let (_, sol) = lp::solve_min(&c, &a_ub, &b_ub, &[eq], &[1.0])
        .expect("the NM mixture LP is always feasible");
    // recompute per-message residuals from the optimal weights
    let mut per_msg = vec![0.0f64; m];
    for x in 0..m {
        let mut resid = 0.0;
        for cat in 0..cats {
            let g: f64 = g_coeff(x, cat).iter().map(|(vi, co)| co * sol[*vi]).sum();
            resid += (dhat[x][cat] - g).max(0.0);
        }
        per_msg[x] = resid;
    }
    let max = per_msg.iter().copied().fold(0.0, f64::max);
    (max, per_msg, sol[0])
}

/// Run the full certification: per tamper pair, per message, estimate the
/// tampered-decode law and report the LP distance to the nearest mixture.
pub fn nm_error_certify<R: Rng + ?Sized>(
    family: &[TamperPair],
    sched: &TnmSchedule,
    cfg: &CertifyConfig,
    rng: &mut R,
) -> Result<Vec<PairReport>> {
    let mut out = Vec::with_capacity(family.len());
    for tp in family {
        let mut laws = Vec::with_capacity(cfg.messages.len());
        for s in &cfg.messages {
            laws.push(tamper_experiment(s, tp, sched, cfg.trials_per_message, rng)?);
        }
        let (max, per, id_w) = nearest_nm_mixture(&cfg.messages, &laws, sched.m_out, cfg.buckets);
        out.push(PairReport {
            tamper_id: tp.name.clone(),
            per_message: cfg.messages.iter().cloned().zip(per).collect(),
            max_distance: max,
            ci: hoeffding_ci(cfg.trials_per_message, cfg.confidence),
            id_weight: id_w,
        });
    }
    Ok(out)
}

const WIRE_MAGIC: &[u8; 6] = b"NMXC1\n";

/// Codeword wire format: magic, schedule hash, n, then left and right
/// packed to bytes.
pub fn write_codeword(c: &Codeword, sched: &TnmSchedule) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(WIRE_MAGIC);
    out.extend_from_slice(&crate::nmx::schedule_hash(sched).to_le_bytes());
    out.extend_from_slice(&(sched.n as u32).to_le_bytes());
    out.extend_from_slice(&c.left.to_bytes());
    out.extend_from_slice(&c.right.to_bytes());
    out
}

pub fn read_codeword(bytes: &[u8], sched: &TnmSchedule) -> Result<Codeword> {
    if bytes.len() < 18 || &bytes[..6] != WIRE_MAGIC {
        return Err(Error::InvalidInput("bad codeword magic".into()));
    }
    let hash = u64::from_le_bytes(bytes[6..14].try_into().unwrap());
    if hash != crate::nmx::schedule_hash(sched) {
        return Err(Error::InvalidInput("codeword schedule hash mismatch".into()));
    }
    let n = u32::from_le_bytes(bytes[14..18].try_into().unwrap()) as usize;
    if n != sched.n {
        return Err(Error::InvalidInput("codeword length mismatch".into()));
    }
    let side = n.div_ceil(8);
    if bytes.len() != 18 + 2 * side {
        return Err(Error::InvalidInput("truncated codeword".into()));
    }
    Ok(Codeword {
        left: BitVec::from_bytes(&bytes[18..18 + side], n)?,
        right: BitVec::from_bytes(&bytes[18 + side..], n)?,
    })
}
