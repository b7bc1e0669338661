//! Command-line surface: planning, tracing, encoding/decoding, tampering
//! experiments, protocol runs and exact-oracle reports.
//!
//! All randomness flows from the named --seed; identical invocations
//! produce identical bytes. Exit codes: 0 success, 2 planner rejection,
//! 1 usage or IO error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::extract::{ip_ext, strong_ext};
use crate::merge::Ledger;
use crate::nmcode;
use crate::nmx::{self, PlanOptions, TnmSchedule};
use crate::oracle::{self, ExactDist, FlatSource};
use crate::pamp;
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "nmext", version, about = "non-malleable extractor and code toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: RunConfig,
}

/// One fully parsed invocation; round-trips through JSON.
#[derive(Subcommand, Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum RunConfig {
    /// Resolve a strict schedule for a named construction.
    Plan {
        #[arg(long)]
        construction: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        l: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        a: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 4)]
        c_plan: u32,
        #[arg(long, default_value_t = 2)]
        entropy_margin: u32,
    },
    /// Emit a width ledger (mergers, breakers) or a transcript dump
    /// (la-ext) on seeded random inputs.
    Trace {
        #[arg(long)]
        construction: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        rounds: usize,
    },
    /// Encode a message into the codeword wire format.
    Encode {
        #[arg(long, default_value = "tiny")]
        schedule: String,
        #[arg(long, default_value_t = 7)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m_out: usize,
        /// Message as hex (low nibble first), m_out bits.
        #[arg(long)]
        message: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decode a codeword file and print the message as hex.
    Decode {
        #[arg(long, default_value = "tiny")]
        schedule: String,
        #[arg(long, default_value_t = 7)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m_out: usize,
        #[arg(long)]
        input: PathBuf,
    },
    /// Tampering-experiment CSV over a pair family.
    TamperBench {
        #[arg(long, default_value = "standard")]
        family: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value = "tiny")]
        schedule: String,
        #[arg(long, default_value_t = 7)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m_out: usize,
        #[arg(long, default_value_t = 2)]
        messages: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Privacy-amplification runs with an adversary; CSV output.
    PaRun {
        #[arg(long, default_value_t = 512)]
        n: usize,
        #[arg(long, default_value_t = 512)]
        k: usize,
        #[arg(long, default_value_t = 8)]
        s: usize,
        #[arg(long, default_value = "passive")]
        adversary: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact statistical distance of a named construction at tiny widths.
    OracleSd {
        #[arg(long)]
        construction: String,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

/// Entry point used by the binary; returns the process exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli.cmd) {
        Ok(()) => 0,
        Err(
            e @ (Error::InsufficientEntropy { .. }
            | Error::PlannerReject(..)
            | Error::AdviceRangeError { .. }),
        ) => {
            println!("{e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn schedule_by_name(name: &str, n: usize, m_out: usize) -> Result<TnmSchedule> {
    match name {
        "tiny" => TnmSchedule::desk_tiny(n, m_out),
        "moderate" => TnmSchedule::desk_moderate(n.max(1024), m_out, 16),
        other => Err(Error::InvalidInput(format!(
            "unknown schedule {other:?} (expected tiny or moderate)"
        ))),
    }
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(())
        }
        None => {
            print!("{text}");
            std::io::stdout().flush()?;
            Ok(())
        }
    }
}

pub fn dispatch(cfg: &RunConfig) -> Result<()> {
    match cfg {
        RunConfig::Plan {
            construction,
            n,
            k,
            eps,
            l,
            t,
            a,
            m,
            d,
            c_plan,
            entropy_margin,
        } => {
            let opts = PlanOptions {
                c_plan: *c_plan,
                l: *l,
                t: *t,
                a: *a,
                m: *m,
                d: *d,
                entropy_margin: *entropy_margin,
            };
            let sched = nmx::plan(construction, *n, *k, *eps, &opts)?;
            println!("{}", serde_json::to_string_pretty(&sched).expect("schedule json"));
            Ok(())
        }
        RunConfig::Trace {
            construction,
            seed,
            rounds,
        } => trace_cmd(construction, *seed, *rounds),
        RunConfig::Encode {
            schedule,
            n,
            m_out,
            message,
            seed,
            out,
        } => {
            let sched = schedule_by_name(schedule, *n, *m_out)?;
            let msg = BitVec::from_hex(message, sched.m_out)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let cw = nmcode::encode(&msg, &sched, &mut rng)?;
            std::fs::write(out, nmcode::write_codeword(&cw, &sched))?;
            Ok(())
        }
        RunConfig::Decode {
            schedule,
            n,
            m_out,
            input,
        } => {
            let sched = schedule_by_name(schedule, *n, *m_out)?;
            let bytes = std::fs::read(input)?;
            let cw = nmcode::read_codeword(&bytes, &sched)?;
            println!("{}", nmcode::decode(&cw, &sched).to_hex());
            Ok(())
        }
        RunConfig::TamperBench {
            family,
            trials,
            seed,
            schedule,
            n,
            m_out,
            messages,
            out,
        } => {
            let sched = schedule_by_name(schedule, *n, *m_out)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let fam = match family.as_str() {
                "standard" => nmcode::standard_family(sched.n, 8, 8, 4, &mut rng),
                "standard-large" => nmcode::standard_family(sched.n, 64, 64, 16, &mut rng),
                other => {
                    return Err(Error::InvalidInput(format!("unknown family {other:?}")))
                }
            };
            let msgs: Vec<BitVec> = (0..*messages)
                .map(|_| BitVec::random(sched.m_out, &mut rng))
                .collect();
            let cfg = nmcode::CertifyConfig {
                messages: msgs,
                trials_per_message: *trials,
                confidence: 0.99,
                buckets: 16,
            };
            let reports = nmcode::nm_error_certify(&fam, &sched, &cfg, &mut rng)?;
            let mut csv = String::from("tamper_id,message,distance,ci_low,ci_high\n");
            for r in &reports {
                for (msg, dist) in &r.per_message {
                    csv.push_str(&format!(
                        "{},{},{:.6},{:.6},{:.6}\n",
                        r.tamper_id,
                        msg.to_hex(),
                        dist,
                        (dist - r.ci).max(0.0),
                        dist + r.ci
                    ));
                }
            }
            write_or_print(out, &csv)
        }
        RunConfig::PaRun {
            n,
            k,
            s,
            adversary,
            trials,
            seed,
            out,
        } => {
            let cfg = if *n < 384 {
                pamp::ProtocolConfig::desk_tiny(*n)?
            } else {
                pamp::ProtocolConfig::desk_moderate(*n, *s)?
            };
            let adv = if adversary == "passive" {
                pamp::Adversary::passive()
            } else {
                pamp::attack_corpus(&cfg)
                    .into_iter()
                    .find(|a| a.name == *adversary)
                    .ok_or_else(|| {
                        Error::InvalidInput(format!("unknown adversary {adversary:?}"))
                    })?
            };
            let mut src_rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut a_rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
            let mut b_rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
            let mut csv = String::from("trial,outcome,keys_equal,detected\n");
            let k_used = (*k).min(*n);
            for trial in 0..*trials {
                // a flat source of the declared entropy: uniform low bits
                let x = if k_used >= *n {
                    BitVec::random(*n, &mut src_rng)
                } else {
                    let mut x = BitVec::zeros(*n);
                    let lo = BitVec::random(k_used, &mut src_rng);
                    for i in 0..k_used {
                        x.set(i, lo.get(i));
                    }
                    x
                };
                let r = pamp::run_protocol(&x, &mut a_rng, &mut b_rng, &adv, &cfg)?;
                let (outcome, keys_equal, detected) = match r.keys_equal() {
                    Some(eq) => ("accept", if eq { "true" } else { "false" }, "false"),
                    None => ("abort", "", "true"),
                };
                csv.push_str(&format!("{trial},{outcome},{keys_equal},{detected}\n"));
            }
            write_or_print(out, &csv)
        }
        RunConfig::OracleSd {
            construction,
            n,
            m,
            k,
            seed,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            match construction.as_str() {
                "ip-ext" => {
                    let m = *m;
                    let sx = FlatSource::random(*n, *k, &mut rng);
                    let sy = FlatSource::random(*n, *k, &mut rng);
                    let joint = oracle::pushforward(
                        |a| ip_ext(&a[0], &a[1], m).unwrap().concat(&a[1]),
                        &[sx, sy],
                        24,
                    )?;
                    let ideal = ExactDist::uniform(m).extend_uniform(*n);
                    let sd = oracle::sd(&joint, &ideal);
                    let bound = 2f64.powf(-((2 * k) as f64 - *n as f64 - m as f64 - 1.0) / 2.0);
                    println!(
                        "construction=ip-ext n={n} m={m} k1=k2={k} exact_sd={sd:.6} bound={bound:.6}"
                    );
                }
                "strong-ext" => {
                    let m = *m;
                    let src = FlatSource::random(*n, *k, &mut rng);
                    let seeds = FlatSource::uniform(*n);
                    let joint = oracle::pushforward(
                        |a| strong_ext(&a[0], &a[1], m).unwrap().concat(&a[1]),
                        &[src, seeds],
                        24,
                    )?;
                    let ideal = ExactDist::uniform(m).extend_uniform(*n);
                    let sd = oracle::sd(&joint, &ideal);
                    let bound = 2f64.powf(-((k - m) as f64) / 2.0);
                    println!(
                        "construction=strong-ext n={n} m={m} k={k} exact_sd={sd:.6} lhl_bound={bound:.6}"
                    );
                }
                other => {
                    return Err(Error::InvalidInput(format!(
                        "unknown oracle-sd construction {other:?}"
                    )))
                }
            }
            Ok(())
        }
    }
}

fn trace_cmd(construction: &str, seed: u64, rounds: usize) -> Result<()> {
    use crate::breaker::{advcb_asym, advcb_recycled, flip_flop, Advice};
    use crate::merge::{nipm_asym, nipm_doubling, NipmAsymParams, NipmDoublingParams, RowMatrix};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ledger = Ledger::default();
    match construction {
        "la-ext" => {
            let w = BitVec::random(16, &mut rng);
            let q = BitVec::random(16, &mut rng);
            let s1 = BitVec::random(4, &mut rng);
            let t = crate::altext::la_ext(&w, &q, &s1, rounds.max(1), 4, 4)?;
            print!("{}", t.dump());
            return Ok(());
        }
        "flip-flop" => {
            let x = BitVec::random(24, &mut rng);
            let y = BitVec::random(24, &mut rng);
            let p = crate::breaker::FlipFlopParams { w: 4, m: 3 };
            flip_flop(&x, &y, false, &p, Some(&mut ledger))?;
        }
        "nipm-asym" => {
            let p = NipmAsymParams {
                l: 4,
                m: 8,
                d1: 80,
                d2: 96,
                d: 4,
                a: 2,
            };
            let v = RowMatrix::new((0..p.l).map(|_| BitVec::random(p.m, &mut rng)).collect())?;
            let x = BitVec::random(p.d1, &mut rng);
            let y = BitVec::random(p.d2, &mut rng);
            nipm_asym(&v, &x, &y, &p, Some(&mut ledger))?;
        }
        "nipm-doubling" => {
            let p = NipmDoublingParams {
                l: 4,
                m: 6,
                n: 120,
                n_prime: 160,
                d1: 4,
                d2: 6,
                a: 2,
            };
            let v = RowMatrix::new((0..p.l).map(|_| BitVec::random(p.m, &mut rng)).collect())?;
            let x = BitVec::random(p.n, &mut rng);
            let y = BitVec::random(p.n_prime, &mut rng);
            nipm_doubling(&v, &x, &y, &p, Some(&mut ledger))?;
        }
        "advcb-asym" => {
            let sched = crate::nmx::SnmSchedule::desk_moderate(512, 672, 24)?;
            let x = BitVec::random(sched.breaker.n, &mut rng);
            let y = BitVec::random(sched.breaker.s, &mut rng);
            let alpha = Advice::new(BitVec::random(sched.breaker.advice_len, &mut rng))?;
            advcb_asym(&x, &y, &alpha, &sched.breaker, Some(&mut ledger))?;
        }
        "advcb-recycled" => {
            let sched = TnmSchedule::desk_moderate(1024, 8, 16)?;
            let x = BitVec::random(sched.breaker.n, &mut rng);
            let y = BitVec::random(sched.breaker.n, &mut rng);
            let alpha = Advice::new(BitVec::random(sched.breaker.advice_len, &mut rng))?;
            advcb_recycled(&x, &y, &alpha, &sched.breaker, Some(&mut ledger))?;
        }
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown trace construction {other:?}"
            )))
        }
    }
    println!("{}", serde_json::to_string_pretty(&ledger).expect("ledger json"));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_config_round_trips_through_json() {
        let cfg = RunConfig::Plan {
            construction: "nipm-basic".into(),
            n: 64,
            k: 32,
            eps: 0.01,
            l: Some(4),
            t: None,
            a: None,
            m: None,
            d: None,
            c_plan: 4,
            entropy_margin: 2,
        };
        let json = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn plan_cli_accepts_and_rejects() {
        assert_eq!(
            run(vec![
                "nmext".into(),
                "plan".into(),
                "--construction".into(),
                "nipm-basic".into(),
                "--n".into(),
                "1048576".into(),
                "--k".into(),
                "524288".into(),
                "--eps".into(),
                "0.25".into(),
                "--l".into(),
                "2".into(),
            ]),
            0
        );
        // m far below the inequality: planner rejection is exit 2
        assert_eq!(
            run(vec![
                "nmext".into(),
                "plan".into(),
                "--construction".into(),
                "nipm-basic".into(),
                "--n".into(),
                "64".into(),
                "--k".into(),
                "60".into(),
                "--eps".into(),
                "0.01".into(),
                "--l".into(),
                "4".into(),
                "--m".into(),
                "8".into(),
            ]),
            2
        );
        // usage error is exit 1
        assert_eq!(run(vec!["nmext".into(), "plan".into()]), 1);
    }

    #[test]
    fn encode_decode_roundtrip_via_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cw.bin");
        let code = run(vec![
            "nmext".into(),
            "encode".into(),
            "--message".into(),
            "2".into(),
            "--out".into(),
            path.to_string_lossy().into_owned(),
        ]);
        assert_eq!(code, 0);
        let sched = TnmSchedule::desk_tiny(7, 2).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let cw = nmcode::read_codeword(&bytes, &sched).unwrap();
        assert_eq!(nmcode::decode(&cw, &sched), BitVec::from_hex("2", 2).unwrap());
    }

    #[test]
    fn tamper_bench_deterministic_csv() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.csv");
        let p2 = dir.path().join("b.csv");
        for p in [&p1, &p2] {
            let code = run(vec![
                "nmext".into(),
                "tamper-bench".into(),
                "--family".into(),
                "standard".into(),
                "--trials".into(),
                "50".into(),
                "--seed".into(),
                "7".into(),
                "--out".into(),
                p.to_string_lossy().into_owned(),
            ]);
            assert_eq!(code, 0);
        }
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }

    #[test]
    fn pa_run_csv_shape() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("pa.csv");
        let code = run(vec![
            "nmext".into(),
            "pa-run".into(),
            "--n".into(),
            "12".into(),
            "--trials".into(),
            "5".into(),
            "--out".into(),
            p.to_string_lossy().into_owned(),
        ]);
        assert_eq!(code, 0);
        let text = std::fs::read_to_string(&p).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "trial,outcome,keys_equal,detected");
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("0,accept,true,false"));
    }
}
