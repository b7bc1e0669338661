//! Ground-truth machinery: exact distributions over short bit strings,
//! statistical distance, (conditional) min-entropy, flat sources, and
//! Monte-Carlo estimation with confidence bounds.
//!
//! Probabilities are exact counts over enumerated spaces; every enumeration
//! here has a power-of-two denominator, so the f64 values handed back are
//! exact. Enumeration is parallelized by input-prefix partitioning and the
//! merge is exact addition, so results do not depend on the partitioning.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;

use crate::bits::BitVec;
use crate::{Error, Result};

/// Default cap on enumerable input bits for [`pushforward`].
pub const DEFAULT_ENUM_CAP: usize = 24;

/// A finite probability distribution over fixed-width bit strings,
/// represented as exact counts over a common denominator.
#[derive(Clone, Debug)]
pub struct ExactDist {
    width: usize,
    denom: u128,
    counts: HashMap<u64, u128>,
}

impl ExactDist {
    pub fn from_counts(width: usize, counts: HashMap<u64, u128>) -> Self {
        assert!(width <= 63, "outcome width {width} too large for exact oracle");
        let denom = counts.values().sum();
        assert!(denom > 0, "empty distribution");
        ExactDist { width, denom, counts }
    }

    pub fn point_mass(width: usize, outcome: u64) -> Self {
        ExactDist::from_counts(width, HashMap::from([(outcome, 1)]))
    }

    pub fn uniform(width: usize) -> Self {
        assert!(width <= 24, "uniform({width}) would enumerate too much");
        let counts = (0u64..1 << width).map(|o| (o, 1u128)).collect();
        ExactDist::from_counts(width, counts)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn prob(&self, outcome: u64) -> f64 {
        *self.counts.get(&outcome).unwrap_or(&0) as f64 / self.denom as f64
    }

    pub fn support_len(&self) -> usize {
        self.counts.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        let d = self.denom as f64;
        self.counts.iter().map(move |(&o, &c)| (o, c as f64 / d))
    }

    /// Push the distribution through a function on outcomes.
    pub fn map(&self, out_width: usize, f: impl Fn(u64) -> u64) -> ExactDist {
        let mut counts: HashMap<u64, u128> = HashMap::new();
        for (&o, &c) in &self.counts {
            *counts.entry(f(o)).or_insert(0) += c;
        }
        let mut d = ExactDist::from_counts(out_width, counts);
        d.denom = self.denom;
        d
    }

    /// Condition on a predicate over outcomes. Returns None if the event has
    /// probability zero.
    pub fn condition(&self, pred: impl Fn(u64) -> bool) -> Option<ExactDist> {
        let counts: HashMap<u64, u128> = self
            .counts
            .iter()
            .filter(|(&o, _)| pred(o))
            .map(|(&o, &c)| (o, c))
            .collect();
        if counts.is_empty() {
            None
        } else {
            Some(ExactDist::from_counts(self.width, counts))
        }
    }

    /// Probability of an event.
    pub fn event(&self, pred: impl Fn(u64) -> bool) -> f64 {
        let num: u128 = self
            .counts
            .iter()
            .filter(|(&o, _)| pred(o))
            .map(|(_, &c)| c)
            .sum();
        num as f64 / self.denom as f64
    }

    /// Product with an independent uniform on `extra` bits, appended high.
    pub fn extend_uniform(&self, extra: usize) -> ExactDist {
        let mut counts = HashMap::with_capacity(self.counts.len() << extra);
        for (&o, &c) in &self.counts {
            for u in 0u64..1 << extra {
                counts.insert(o | (u << self.width), c);
            }
        }
        ExactDist {
            width: self.width + extra,
            denom: self.denom << extra,
            counts,
        }
    }
}

/// Exact statistical distance (half L1). The two distributions must have the
/// same outcome width.
pub fn sd(p: &ExactDist, q: &ExactDist) -> f64 {
    assert_eq!(p.width, q.width, "sd: width mismatch");
    // |p_i/dp - q_i/dq| = |p_i*dq - q_i*dp| / (dp*dq), all exact in u128
    let mut num: u128 = 0;
    for (&o, &pc) in &p.counts {
        let qc = *q.counts.get(&o).unwrap_or(&0);
        let a = pc * q.denom;
        let b = qc * p.denom;
        num += a.abs_diff(b);
    }
    for (&o, &qc) in &q.counts {
        if !p.counts.contains_key(&o) {
            num += qc * p.denom;
        }
    }
    num as f64 / 2.0 / (p.denom as f64 * q.denom as f64)
}

/// Worst-case entropy: min over the support of log2(1/p).
pub fn min_entropy(p: &ExactDist) -> f64 {
    let max = p.counts.values().copied().max().unwrap_or(0);
    -( max as f64 / p.denom as f64).log2()
}

/// Average conditional min-entropy of X given W, where each outcome packs
/// x in the low `x_bits` and w above. Equals -log2(sum_w max_x P[x,w]).
pub fn avg_cond_min_entropy(joint: &ExactDist, x_bits: usize) -> f64 {
    let mut best: HashMap<u64, u128> = HashMap::new();
    for (&o, &c) in &joint.counts {
        let w = o >> x_bits;
        let e = best.entry(w).or_insert(0);
        if c > *e {
            *e = c;
        }
    }
    let num: u128 = best.values().sum();
    -(num as f64 / joint.denom as f64).log2()
}

/// A flat (n, k)-source: uniform over a support of exactly 2^k strings.
#[derive(Clone, Debug)]
pub struct FlatSource {
    n: usize,
    support: SupportSet,
}

#[derive(Clone, Debug)]
enum SupportSet {
    Full,
    Explicit(Vec<u64>),
}

impl FlatSource {
    /// Uniform on all of {0,1}^n.
    pub fn uniform(n: usize) -> Self {
        FlatSource {
            n,
            support: SupportSet::Full,
        }
    }

    /// Uniform on an explicit support; |support| must be a power of two and
    /// elements distinct.
    pub fn explicit(n: usize, mut support: Vec<u64>) -> Self {
        support.sort_unstable();
        support.dedup();
        assert!(
            support.len().is_power_of_two(),
            "flat source support size {} is not a power of two",
            support.len()
        );
        assert!(n >= 64 || support.iter().all(|&s| s < (1u64 << n)));
        FlatSource {
            n,
            support: SupportSet::Explicit(support),
        }
    }

    /// A seeded random flat (n, k)-source (n <= 64 so items fit one word).
    pub fn random(n: usize, k: usize, rng: &mut (impl Rng + ?Sized)) -> Self {
        assert!(k <= n && n <= 64 && k < 28);
        let target = 1usize << k;
        let mut set = std::collections::BTreeSet::new();
        while set.len() < target {
            let v: u64 = if n == 64 {
                rng.gen()
            } else {
                rng.gen_range(0..(1u64 << n))
            };
            set.insert(v);
        }
        FlatSource {
            n,
            support: SupportSet::Explicit(set.into_iter().collect()),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.support_len().trailing_zeros()
    }

    pub fn support_len(&self) -> usize {
        match &self.support {
            SupportSet::Full => 1usize << self.n,
            SupportSet::Explicit(v) => v.len(),
        }
    }

    pub fn item(&self, idx: usize) -> u64 {
        match &self.support {
            SupportSet::Full => idx as u64,
            SupportSet::Explicit(v) => v[idx],
        }
    }

    pub fn sample(&self, rng: &mut (impl Rng + ?Sized)) -> BitVec {
        let idx = rng.gen_range(0..self.support_len());
        BitVec::from_u64(self.item(idx), self.n)
    }
}

/// Exact output law of `f` over independent flat sources, by exhaustive
/// enumeration. `f` maps one assignment (one BitVec per source) to an
/// outcome. Errors with `TooLarge` past the cap.
pub fn pushforward<F>(f: F, sources: &[FlatSource], cap_bits: usize) -> Result<ExactDist>
where
    F: Fn(&[BitVec]) -> BitVec + Sync,
{
    let log_total: usize = sources.iter().map(|s| s.k() as usize).sum();
    if log_total > cap_bits {
        return Err(Error::TooLarge {
            bits: log_total,
            cap: cap_bits,
        });
    }
    let sizes: Vec<usize> = sources.iter().map(|s| s.support_len()).collect();
    let total: usize = sizes.iter().product();
    let first = sizes.first().copied().unwrap_or(1);
    let per_first: usize = total / first.max(1);

    let merge = |mut a: HashMap<u64, u128>, b: HashMap<u64, u128>| {
        for (o, c) in b {
            *a.entry(o).or_insert(0) += c;
        }
        a
    };
    let counts: HashMap<u64, u128> = (0..first.max(1))
        .into_par_iter()
        .map(|i0| {
            let mut counts: HashMap<u64, u128> = HashMap::new();
            let mut assignment: Vec<BitVec> =
                sources.iter().map(|s| BitVec::zeros(s.n())).collect();
            for rest in 0..per_first.max(1) {
                let mut r = rest;
                if !sources.is_empty() {
                    assignment[0] = BitVec::from_u64(sources[0].item(i0), sources[0].n());
                    for (j, s) in sources.iter().enumerate().skip(1) {
                        let idx = r % sizes[j];
                        r /= sizes[j];
                        assignment[j] = BitVec::from_u64(s.item(idx), s.n());
                    }
                }
                let out = f(&assignment);
                assert!(out.len() <= 63, "pushforward outcome too wide");
                *counts.entry(out.low_u64()).or_insert(0) += 1;
            }
            counts
        })
        .reduce(HashMap::new, merge);
    Ok(ExactDist::from_counts(
        {
            // outcome width probe
            let assignment: Vec<BitVec> = sources.iter().map(|s| BitVec::from_u64(s.item(0), s.n())).collect();
            f(&assignment).len()
        },
        counts,
    ))
}

/// Monte-Carlo estimate of the statistical distance of `f`'s output law from
/// uniform on `m` bits, with a confidence interval: the plug-in estimate is
/// within `ci` of the exact value with the stated confidence. The interval
/// combines the expected plug-in bias bound sqrt((2^m - 1)/N)/2 with a
/// McDiarmid deviation term sqrt(ln(2/delta)/(2N)).
pub fn mc_estimate_sd<F, R>(
    f: F,
    sources: &[FlatSource],
    m: usize,
    trials: usize,
    confidence: f64,
    rng: &mut R,
) -> Result<(f64, f64)>
where
    F: Fn(&[BitVec]) -> BitVec,
    R: Rng + ?Sized,
{
    if trials == 0 {
        return Err(Error::InvalidInput("mc_estimate_sd: trials must be >= 1".into()));
    }
    assert!(m <= 24, "uniform reference too wide");
    let mut counts: HashMap<u64, u64> = HashMap::new();
    let mut assignment: Vec<BitVec> = Vec::with_capacity(sources.len());
    for _ in 0..trials {
        assignment.clear();
        for s in sources {
            assignment.push(s.sample(rng));
        }
        let out = f(&assignment);
        *counts.entry(out.low_u64()).or_insert(0) += 1;
    }
    let n = trials as f64;
    let u = 1.0 / (1u64 << m) as f64;
    let mut l1 = 0.0;
    for o in 0u64..(1 << m) {
        let emp = *counts.get(&o).unwrap_or(&0) as f64 / n;
        l1 += (emp - u).abs();
    }
    let estimate = l1 / 2.0;
    let bias = 0.5 * ((((1u64 << m) - 1) as f64) / n).sqrt();
    let delta = 1.0 - confidence;
    let dev = ((2.0 / delta).ln() / (2.0 * n)).sqrt();
    Ok((estimate, bias + dev))
}

/// Two-sided Hoeffding interval half-width for an event-probability estimate.
pub fn hoeffding_ci(trials: usize, confidence: f64) -> f64 {
    let delta = 1.0 - confidence;
    ((2.0 / delta).ln() / (2.0 * trials as f64)).sqrt()
}

/// Pearson chi-square p-value for observed counts against expected counts.
pub fn chi_square_p(observed: &[u64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    assert!(observed.len() >= 2);
    let mut stat = 0.0;
    for (&o, &e) in observed.iter().zip(expected) {
        assert!(e > 0.0);
        let d = o as f64 - e;
        stat += d * d / e;
    }
    let dof = (observed.len() - 1) as f64;
    let dist = statrs::distribution::ChiSquared::new(dof).unwrap();
    1.0 - statrs::distribution::ContinuousCDF::cdf(&dist, stat)
}
