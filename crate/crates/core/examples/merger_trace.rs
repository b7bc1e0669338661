//! Width ledgers for the independence-preserving mergers.
//!
//! Runs the asymmetric and doubling mergers on seeded inputs and prints the
//! intermediate widths the schedule planner predicts, for audit:
//!
//! ```bash
//! cargo run --release --example merger_trace
//! ```

use nmext::bits::BitVec;
use nmext::merge::{
    nipm_asym, nipm_doubling, Ledger, NipmAsymParams, NipmDoublingParams, RowMatrix,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    let p = NipmAsymParams {
        l: 4,
        m: 8,
        d1: 80,
        d2: 96,
        d: 4,
        a: 2,
    };
    let v = RowMatrix::new((0..p.l).map(|_| BitVec::random(p.m, &mut rng)).collect()).unwrap();
    let x = BitVec::random(p.d1, &mut rng);
    let y = BitVec::random(p.d2, &mut rng);
    let mut ledger = Ledger::default();
    let (wx, wy) = nipm_asym(&v, &x, &y, &p, Some(&mut ledger)).unwrap();
    println!("asymmetric merger, L = {}:", p.l);
    for e in &ledger.entries {
        println!("  {:24} {:4} bits", e.label, e.bits);
    }
    println!("  -> wx {} bits, wy {} bits\n", wx.len(), wy.len());

    let p = NipmDoublingParams {
        l: 16,
        m: 8,
        n: 400,
        n_prime: 800,
        d1: 4,
        d2: 8,
        a: 2,
    };
    println!(
        "doubling merger, L = {}: branch widths per level {:?}",
        p.l,
        p.branch_ledger()
    );
    let v = RowMatrix::new((0..p.l).map(|_| BitVec::random(p.m, &mut rng)).collect()).unwrap();
    let x = BitVec::random(p.n, &mut rng);
    let y = BitVec::random(p.n_prime, &mut rng);
    let mut ledger = Ledger::default();
    let (wx, wy) = nipm_doubling(&v, &x, &y, &p, Some(&mut ledger)).unwrap();
    for e in &ledger.entries {
        println!("  {:24} {:4} bits", e.label, e.bits);
    }
    println!("  -> wx {} bits, wy {} bits", wx.len(), wy.len());
}
