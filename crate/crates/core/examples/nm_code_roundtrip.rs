//! Encode and decode through the split-state non-malleable code.
//!
//! Shows both desk schedules (the exhaustively enumerable tiny one and the
//! full-pipeline moderate one) plus the wire format:
//!
//! ```bash
//! cargo run --release --example nm_code_roundtrip
//! ```

use nmext::bits::BitVec;
use nmext::nmcode::{decode, encode, read_codeword, write_codeword};
use nmext::nmx::TnmSchedule;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    let tiny = TnmSchedule::desk_tiny(7, 2).unwrap();
    let msg = BitVec::from_u64(0b10, 2);
    let cw = encode(&msg, &tiny, &mut rng).unwrap();
    println!(
        "tiny schedule (2 x 7 bits): message {} -> codeword ({}, {}) -> {}",
        msg.to_hex(),
        cw.left.to_hex(),
        cw.right.to_hex(),
        decode(&cw, &tiny).to_hex()
    );

    let moderate = TnmSchedule::desk_moderate(1024, 8, 16).unwrap();
    let msg = BitVec::from_u64(0xa7, 8);
    let cw = encode(&msg, &moderate, &mut rng).unwrap();
    let decoded = decode(&cw, &moderate);
    println!(
        "moderate schedule (2 x 1024 bits, rate {:.4}): message {} -> {}",
        moderate.m_out as f64 / (2 * moderate.n) as f64,
        msg.to_hex(),
        decoded.to_hex()
    );
    assert_eq!(decoded, msg);

    let bytes = write_codeword(&cw, &moderate);
    println!("wire format: {} bytes, magic {:?}", bytes.len(), &bytes[..6]);
    let back = read_codeword(&bytes, &moderate).unwrap();
    assert_eq!(back, cw);
    println!("wire round-trip ok");
}
