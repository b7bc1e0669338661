//! Exact statistical-distance oracle on flat sources.
//!
//! Enumerates the full input space of two extractors and compares the exact
//! joint distance against the theorem bounds:
//!
//! ```bash
//! cargo run --release --example exact_oracle
//! ```

use nmext::bits::BitVec;
use nmext::extract::{ip_ext, strong_ext};
use nmext::oracle::{self, ExactDist, FlatSource};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    // inner product at n = 6, m = 1 over flat (6, 5)-sources: the two-source
    // bound is 2^-((k1 + k2 - n - m - 1)/2) = 0.5
    let sx = FlatSource::random(6, 5, &mut rng);
    let sy = FlatSource::random(6, 5, &mut rng);
    let joint = oracle::pushforward(
        |a| ip_ext(&a[0], &a[1], 1).unwrap().concat(&a[1]),
        &[sx, sy.clone()],
        24,
    )
    .unwrap();
    let cond = oracle::pushforward(|a| a[0].clone(), &[sy], 24).unwrap();
    let ideal = {
        let mut counts = std::collections::HashMap::new();
        for (o, p) in cond.iter() {
            let c = (p * (1u128 << 40) as f64).round() as u128;
            counts.insert(o << 1, c);
            counts.insert((o << 1) | 1, c);
        }
        ExactDist::from_counts(7, counts)
    };
    println!(
        "ip_ext (6,5)x(6,5) -> 1 bit: exact SD {:.5}  (bound 0.5)",
        oracle::sd(&joint, &ideal)
    );

    // leftover-hash strongness at n = 8, m = 2, flat (8, 4)-source: exact
    // SD of (output, seed) from (uniform, seed) against the 2^-(k-m)/2 shape
    let src = FlatSource::random(8, 4, &mut rng);
    let joint = oracle::pushforward(
        |a| strong_ext(&a[0], &a[1], 2).unwrap().concat(&a[1]),
        &[src, FlatSource::uniform(8)],
        24,
    )
    .unwrap();
    let ideal = ExactDist::uniform(2).extend_uniform(8);
    println!(
        "strong_ext (8,4) -> 2 bits over all 256 seeds: exact SD {:.5}  (lhl shape {:.5})",
        oracle::sd(&joint, &ideal),
        2f64.powf(-1.0)
    );

    // a Monte-Carlo estimate with its confidence interval, cross-checked
    // against the exact value
    let srcs = [FlatSource::uniform(6), FlatSource::uniform(6)];
    let f = |a: &[BitVec]| ip_ext(&a[0], &a[1], 2).unwrap();
    let exact_law = oracle::pushforward(f, &srcs, 24).unwrap();
    let exact = oracle::sd(&exact_law, &ExactDist::uniform(2));
    let (est, ci) = oracle::mc_estimate_sd(f, &srcs, 2, 20_000, 0.99, &mut rng).unwrap();
    println!("mc calibration: exact {exact:.5} vs estimate {est:.5} +/- {ci:.5}");
}
