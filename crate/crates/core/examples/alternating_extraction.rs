//! Alternating extraction transcript.
//!
//! Runs the look-ahead extractor for a few rounds and dumps the S/R
//! sequence, then shows the single-call strongness the look-ahead lemma
//! composes:
//!
//! ```bash
//! cargo run --release --example alternating_extraction
//! ```

use nmext::altext::{la_ext, la_ext_pair};
use nmext::bits::BitVec;
use nmext::oracle::{self, ExactDist, FlatSource};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let w = BitVec::random(16, &mut rng);
    let q = BitVec::random(16, &mut rng);
    let s1 = BitVec::random(4, &mut rng);
    let t = la_ext(&w, &q, &s1, 4, 4, 4).unwrap();
    println!("four rounds between a 16-bit Wendy and a 16-bit Quentin:");
    print!("{}", t.dump());
    println!("protocol output (r-chain): {}", t.output().to_hex());

    // look-ahead quality at enumerable widths: the first-round output is
    // close to uniform jointly with the whole seed side
    let src_w = FlatSource::uniform(12);
    let src_y = FlatSource::uniform(8);
    let joint = oracle::pushforward(
        |a| {
            let tr = la_ext_pair(&a[0], &a[1], 2, 3, 4).unwrap();
            tr.r_list[0].concat(&a[1])
        },
        &[src_w, src_y],
        24,
    )
    .unwrap();
    let sd = oracle::sd(&joint, &ExactDist::uniform(3).extend_uniform(8));
    println!("round-1 strongness, exact: SD((R1, Y), (U, Y)) = {sd:.5}");
}
