//! Two-round privacy amplification over an adversarial channel.
//!
//! Round 1: Bob sends a fresh seed Y; both sides compute the MAC key
//! K = snmExt(X, Y). Round 2: Alice sends a fresh extractor seed W with tag
//! T = MAC_K(W); Bob verifies and both output Ext(X, W). The adversary may
//! pass, replace or drop each message; non-malleability of K makes a forged
//! round-2 message detectable except with the MAC's forgery probability.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::extract::strong_ext;
use crate::fields::ctx_for;
use crate::nmcode::TamperFn;
use crate::nmx::{snm_ext, SnmSchedule};
use crate::{Error, Result};

/// Resolved protocol parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProtocolConfig {
    /// Shared-source length.
    pub n: usize,
    /// Declared min-entropy of the shared source (reporting only).
    pub k: usize,
    /// Security parameter (reporting only).
    pub s_sec: usize,
    /// Round-1 non-malleable extractor; its output is the MAC key.
    pub snm: SnmSchedule,
    /// MAC tag bits; the key is 2v bits.
    pub v: usize,
    /// Round-2 extractor seed length |W|.
    pub d_w: usize,
    /// Final key length.
    pub m_key: usize,
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.snm.n != self.n {
            return Err(Error::PlannerReject("pa: snm source length mismatch".into()));
        }
        if self.snm.m_out != 2 * self.v {
            return Err(Error::PlannerReject(format!(
                "pa: MAC needs a 2v = {} bit key but the extractor outputs {}",
                2 * self.v,
                self.snm.m_out
            )));
        }
        if self.v == 0 || self.d_w == 0 || self.m_key == 0 || self.m_key > self.n {
            return Err(Error::PlannerReject("pa: zero or oversized widths".into()));
        }
        self.snm.validate()
    }

    /// Entropy loss of the final key versus the declared source entropy.
    pub fn entropy_loss(&self) -> isize {
        self.k as isize - self.m_key as isize
    }

    /// MAC forgery bound ceil(d/v) * 2^-v.
    pub fn mac_bound(&self) -> f64 {
        self.d_w.div_ceil(self.v) as f64 * 2f64.powi(-(self.v as i32))
    }

    /// Exhaustive tiny parameters; the whole input space stays enumerable.
    pub fn desk_tiny(n: usize) -> Result<ProtocolConfig> {
        let snm = SnmSchedule::desk_tiny(n, 8, 2)?;
        let cfg = ProtocolConfig {
            n,
            k: n,
            s_sec: 2,
            snm,
            v: 1,
            d_w: 4,
            m_key: 2,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Desk parameters for the attack corpus: 24-bit MAC key (v = 12),
    /// forgery bound 4 * 2^-12.
    pub fn desk_moderate(n: usize, s_sec: usize) -> Result<ProtocolConfig> {
        let snm = SnmSchedule::desk_moderate(n, 672, 24)?;
        let cfg = ProtocolConfig {
            n,
            k: n,
            s_sec,
            snm,
            v: 12,
            d_w: 48,
            m_key: 64,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Polynomial-evaluation one-time MAC: key = (r1, r2), each v bits;
/// tag = sum_i m_i * r1^i + r2 over GF(2^v), message chunked into v-bit
/// field elements.
pub fn mac(key: &BitVec, msg: &BitVec) -> Result<BitVec> {
    if key.len() % 2 != 0 || key.is_empty() {
        return Err(Error::WidthMismatch(format!(
            "mac: key length {} must be 2v",
            key.len()
        )));
    }
    let v = key.len() / 2;
    let r1 = key.slice(0, v);
    let r2 = key.slice(v, 2 * v);
    let ctx = ctx_for(v)?;
    let chunks = msg.len().div_ceil(v).max(1);
    let mut acc = vec![0u64; v.div_ceil(64)];
    let mut r1_pow = vec![1u64]; // r1^0, multiplied up per chunk
    for i in 0..chunks {
        r1_pow = ctx.mul(&r1_pow, r1.words());
        let lo = i * v;
        let hi = ((i + 1) * v).min(msg.len());
        let m_i = if lo < msg.len() {
            msg.slice(lo, hi)
        } else {
            BitVec::zeros(0)
        };
        let mut m_words = m_i.words().to_vec();
        m_words.resize(v.div_ceil(64), 0);
        let term = ctx.mul(&m_words, &r1_pow);
        for (a, t) in acc.iter_mut().zip(term.iter()) {
            *a ^= t;
        }
    }
    for (a, r) in acc.iter_mut().zip(r2.words().iter()) {
        *a ^= r;
    }
    Ok(BitVec::from_words(acc, v))
}

/// Exhaustive one-time forgery game: the adversary sees (w, MAC(key, w))
/// for its best choice of w and plays its best (w', t') with w' != w.
/// Returns the maximum success probability over everything.
pub fn mac_forgery_exhaustive(v: usize, d: usize) -> f64 {
    assert!(2 * v <= 16 && d <= 10, "game too large to enumerate");
    let keys = 1u64 << (2 * v);
    let msgs = 1u64 << d;
    // tag table
    let mut tags = vec![vec![0u64; msgs as usize]; keys as usize];
    for key in 0..keys {
        let kb = BitVec::from_u64(key, 2 * v);
        for w in 0..msgs {
            tags[key as usize][w as usize] =
                mac(&kb, &BitVec::from_u64(w, d)).unwrap().low_u64();
        }
    }
    let mut worst = 0.0f64;
    for w in 0..msgs as usize {
        // group keys by observed tag
        let mut groups: std::collections::HashMap<u64, Vec<usize>> = Default::default();
        for key in 0..keys as usize {
            groups.entry(tags[key][w]).or_default().push(key);
        }
        let mut success = 0.0;
        for group in groups.values() {
            // best forgery given this observation
            let mut best = 0usize;
            for w2 in 0..msgs as usize {
                if w2 == w {
                    continue;
                }
                let mut counts: std::collections::HashMap<u64, usize> = Default::default();
                for &key in group {
                    *counts.entry(tags[key][w2]).or_default() += 1;
                }
                if let Some(&c) = counts.values().max() {
                    best = best.max(c);
                }
            }
            success += best as f64 / keys as f64;
        }
        worst = worst.max(success);
    }
    worst
}

/// What the adversary does to one message.
#[derive(Clone, Debug)]
pub enum Action {
    Pass,
    Replace(TamperFn),
    Drop,
}

impl Action {
    fn apply(&self, payload: &BitVec) -> Option<BitVec> {
        match self {
            Action::Pass => Some(payload.clone()),
            Action::Replace(f) => Some(f.apply(payload)),
            Action::Drop => None,
        }
    }
}

/// A full adversary: one action per protocol message.
#[derive(Clone, Debug)]
pub struct Adversary {
    pub name: String,
    pub on_y: Action,
    pub on_w: Action,
    pub on_t: Action,
}

impl Adversary {
    pub fn passive() -> Adversary {
        Adversary {
            name: "passive".into(),
            on_y: Action::Pass,
            on_w: Action::Pass,
            on_t: Action::Pass,
        }
    }
}

/// One observed channel message.
#[derive(Clone, Debug)]
pub struct ChannelEvent {
    pub direction: &'static str,
    pub sent: BitVec,
    pub delivered: Option<BitVec>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Accept { key_a: BitVec, key_b: BitVec },
    Abort,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub outcome: Outcome,
    pub transcript: Vec<ChannelEvent>,
}

impl RunResult {
    pub fn accepted(&self) -> bool {
        matches!(self.outcome, Outcome::Accept { .. })
    }

    pub fn keys_equal(&self) -> Option<bool> {
        match &self.outcome {
            Outcome::Accept { key_a, key_b } => Some(key_a == key_b),
            Outcome::Abort => None,
        }
    }

    /// An undetected mismatch: both accept but with different keys.
    pub fn undetected_mismatch(&self) -> bool {
        self.keys_equal() == Some(false)
    }
}

/// Run one protocol instance. The abort on a failed MAC check is the
/// protocol's detection event, not an error.
pub fn run_protocol<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    source: &BitVec,
    alice_rng: &mut R1,
    bob_rng: &mut R2,
    adversary: &Adversary,
    cfg: &ProtocolConfig,
) -> Result<RunResult> {
    if source.len() != cfg.n {
        return Err(Error::WidthMismatch(format!(
            "run_protocol: source length {} must be {}",
            source.len(),
            cfg.n
        )));
    }
    let mut transcript = Vec::with_capacity(3);

    // round 1: Bob -> Alice
    let y = BitVec::random(cfg.snm.d, bob_rng);
    let y_recv = adversary.on_y.apply(&y);
    transcript.push(ChannelEvent {
        direction: "bob->alice",
        sent: y.clone(),
        delivered: y_recv.clone(),
    });
    let y_recv = match y_recv {
        Some(v) => v,
        None => {
            return Ok(RunResult {
                outcome: Outcome::Abort,
                transcript,
            })
        }
    };
    let k_alice = snm_ext(source, &y_recv, &cfg.snm)?;
    let k_bob = snm_ext(source, &y, &cfg.snm)?;

    // round 2: Alice -> Bob
    let w = BitVec::random(cfg.d_w, alice_rng);
    let t = mac(&k_alice, &w)?;
    let w_recv = adversary.on_w.apply(&w);
    transcript.push(ChannelEvent {
        direction: "alice->bob (w)",
        sent: w.clone(),
        delivered: w_recv.clone(),
    });
    let t_recv = adversary.on_t.apply(&t);
    transcript.push(ChannelEvent {
        direction: "alice->bob (t)",
        sent: t.clone(),
        delivered: t_recv.clone(),
    });
    let (w_recv, t_recv) = match (w_recv, t_recv) {
        (Some(w2), Some(t2)) => (w2, t2),
        _ => {
            return Ok(RunResult {
                outcome: Outcome::Abort,
                transcript,
            })
        }
    };

    // Bob verifies, then both extract
    if mac(&k_bob, &w_recv)? != t_recv {
        return Ok(RunResult {
            outcome: Outcome::Abort,
            transcript,
        });
    }
    let key_a = strong_ext(source, &w, cfg.m_key)?;
    let key_b = strong_ext(source, &w_recv, cfg.m_key)?;
    Ok(RunResult {
        outcome: Outcome::Accept { key_a, key_b },
        transcript,
    })
}

/// The 4-attack corpus used for robustness certification.
pub fn attack_corpus(cfg: &ProtocolConfig) -> Vec<Adversary> {
    let flip = |len: usize| TamperFn::XorMask(BitVec::from_u64(1, len));
    vec![
        Adversary {
            name: "replace-y".into(),
            on_y: Action::Replace(flip(cfg.snm.d)),
            on_w: Action::Pass,
            on_t: Action::Pass,
        },
        Adversary {
            name: "replace-w".into(),
            on_y: Action::Pass,
            on_w: Action::Replace(flip(cfg.d_w)),
            on_t: Action::Pass,
        },
        Adversary {
            name: "replace-t".into(),
            on_y: Action::Pass,
            on_w: Action::Pass,
            on_t: Action::Replace(flip(cfg.v)),
        },
        Adversary {
            name: "replace-y-and-w".into(),
            on_y: Action::Replace(flip(cfg.snm.d)),
            on_w: Action::Replace(flip(cfg.d_w)),
            on_t: Action::Pass,
        },
    ]
}
