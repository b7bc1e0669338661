//! The strict parameter planner.
//!
//! Resolves a schedule for a construction with generous widths, then shows
//! a rejection naming the violated inequality:
//!
//! ```bash
//! cargo run --release --example plan_schedule
//! ```

use nmext::nmx::{plan, PlanOptions};

fn main() {
    // accepted: the basic merger at large n with two rows
    let opts = PlanOptions {
        l: Some(2),
        ..Default::default()
    };
    let sched = plan("nipm-basic", 1 << 20, 1 << 19, 0.25, &opts).unwrap();
    println!("accepted schedule:\n{}\n", serde_json::to_string_pretty(&sched).unwrap());

    // rejected: m far below 4c L log(d/eps)
    let opts = PlanOptions {
        l: Some(4),
        m: Some(8),
        ..Default::default()
    };
    match plan("nipm-basic", 64, 60, 0.01, &opts) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }

    // the desk-size recycled-breaker fixture rejects by ledger arithmetic
    let opts = PlanOptions {
        l: Some(16),
        t: Some(4),
        ..Default::default()
    };
    match plan("advcb-recycled", 1 << 12, (1 << 12) - 32, 2f64.powi(-8), &opts) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
}
