//! Two-round privacy amplification over an adversarial channel.
//!
//! Runs the protocol passively, then under each attack in the corpus, and
//! reports acceptance and undetected-mismatch rates:
//!
//! ```bash
//! cargo run --release --example privacy_amplification
//! ```

use nmext::bits::BitVec;
use nmext::pamp::{attack_corpus, run_protocol, Adversary, ProtocolConfig};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let cfg = ProtocolConfig::desk_moderate(512, 8).unwrap();
    println!(
        "shared source {} bits, nm seed {} bits, MAC tag {} bits (forgery bound {:.2e}), key {} bits",
        cfg.n,
        cfg.snm.d,
        cfg.v,
        cfg.mac_bound(),
        cfg.m_key
    );
    println!("entropy loss at declared k = {}: {} bits\n", cfg.k, cfg.entropy_loss());

    let trials = 3000;
    let mut adversaries = vec![Adversary::passive()];
    adversaries.extend(attack_corpus(&cfg));
    for adv in &adversaries {
        let mut a = ChaCha8Rng::seed_from_u64(1);
        let mut b = ChaCha8Rng::seed_from_u64(2);
        let mut s = ChaCha8Rng::seed_from_u64(3);
        let (mut accepts, mut mismatches) = (0u32, 0u32);
        for _ in 0..trials {
            let x = BitVec::random(cfg.n, &mut s);
            let r = run_protocol(&x, &mut a, &mut b, adv, &cfg).unwrap();
            if r.accepted() {
                accepts += 1;
            }
            if r.undetected_mismatch() {
                mismatches += 1;
            }
        }
        println!(
            "{:18} accept rate {:.4}, undetected mismatches {}/{trials}",
            adv.name,
            accepts as f64 / trials as f64,
            mismatches
        );
    }
}
