//! Tampering experiments against the split-state code.
//!
//! Decodes tampered fresh encodings under a small family and reports each
//! pair's LP distance to the nearest mixture of identity and constants:
//!
//! ```bash
//! cargo run --release --example tamper_experiment
//! ```

use nmext::bits::BitVec;
use nmext::nmcode::{nm_error_certify, standard_family, CertifyConfig};
use nmext::nmx::TnmSchedule;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let sched = TnmSchedule::desk_moderate(1024, 8, 16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let family = standard_family(1024, 2, 2, 2, &mut rng);
    let cfg = CertifyConfig {
        messages: vec![
            BitVec::from_u64(0x00, 8),
            BitVec::from_u64(0x9d, 8),
        ],
        trials_per_message: 2000,
        confidence: 0.99,
        buckets: 16,
    };
    println!("certifying {} tamper pairs, {} trials per message:", family.len(), cfg.trials_per_message);
    let reports = nm_error_certify(&family, &sched, &cfg, &mut rng).unwrap();
    for r in reports {
        println!(
            "  {:10} max LP distance {:.4} (ci {:.4}), identity weight {:.3}",
            r.tamper_id, r.max_distance, r.ci, r.id_weight
        );
    }
}
