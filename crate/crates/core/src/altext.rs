//! Alternating extraction and the look-ahead extractor.
//!
//! Quentin holds (Q, S_1), Wendy holds W. Round i computes
//! R_i = Ext_w(W, S_i) and S_{i+1} = Ext_q(Q, R_i); the look-ahead extractor
//! laExt(W, (Q, S_1)) outputs R_1..R_l. Both extractors are the hash
//! extractor from [`crate::extract`]; the round widths come from the
//! schedule.

use crate::bits::BitVec;
use crate::extract::strong_ext;
use crate::{Error, Result};

/// Full record of one alternating-extraction run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub s_list: Vec<BitVec>,
    pub r_list: Vec<BitVec>,
}

impl Transcript {
    pub fn rounds(&self) -> usize {
        self.r_list.len()
    }

    /// Protocol output: the concatenated R sequence.
    pub fn output(&self) -> BitVec {
        BitVec::concat_all(&self.r_list)
    }

    /// Hex dump, one round per line, for the CLI trace command.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for i in 0..self.rounds() {
            s.push_str(&format!(
                "round {}: S={} R={}\n",
                i + 1,
                self.s_list[i].to_hex(),
                self.r_list[i].to_hex()
            ));
        }
        s
    }
}

/// Alternating extraction for `rounds` rounds:
/// R_i = Ext(w, S_i, r_bits), S_{i+1} = Ext(q, R_i, s_bits).
pub fn la_ext(
    w: &BitVec,
    q: &BitVec,
    s1: &BitVec,
    rounds: usize,
    r_bits: usize,
    s_bits: usize,
) -> Result<Transcript> {
    if rounds == 0 {
        return Err(Error::InvalidInput("la_ext: need at least one round".into()));
    }
    if r_bits == 0 || r_bits > w.len() {
        return Err(Error::WidthMismatch(format!(
            "la_ext: r_bits {} out of range for |w| = {}",
            r_bits,
            w.len()
        )));
    }
    if s_bits == 0 || s_bits > q.len() {
        return Err(Error::WidthMismatch(format!(
            "la_ext: s_bits {} out of range for |q| = {}",
            s_bits,
            q.len()
        )));
    }
    if s1.is_empty() {
        return Err(Error::WidthMismatch("la_ext: empty s1".into()));
    }
    let mut s_list = Vec::with_capacity(rounds);
    let mut r_list = Vec::with_capacity(rounds);
    let mut s_cur = s1.clone();
    for i in 0..rounds {
        let r = strong_ext(w, &s_cur, r_bits)?;
        s_list.push(s_cur.clone());
        r_list.push(r.clone());
        if i + 1 < rounds {
            s_cur = strong_ext(q, &r, s_bits)?;
        }
    }
    Ok(Transcript { s_list, r_list })
}

/// laExt with the seed side given as one string y = (Q, S_1): S_1 is the low
/// `s_bits` slice of y and Q is all of y (the paper allows S_1 to be
/// correlated with Q).
pub fn la_ext_pair(
    w: &BitVec,
    y: &BitVec,
    rounds: usize,
    r_bits: usize,
    s_bits: usize,
) -> Result<Transcript> {
    if s_bits > y.len() {
        return Err(Error::WidthMismatch(format!(
            "la_ext_pair: s_bits {} exceeds |y| = {}",
            s_bits,
            y.len()
        )));
    }
    let s1 = y.slice(0, s_bits);
    la_ext(w, y, &s1, rounds, r_bits, s_bits)
}

/// L-alternating extraction: Quentin holds L sources; round i >= 2 computes
/// S_i = Ext(q_i, R_{i-1}). Returns S_L (for L = 1, the input seed slice).
pub fn l_alt_ext(
    w: &BitVec,
    q_list: &[BitVec],
    s1: &BitVec,
    r_bits: usize,
    s_bits: usize,
) -> Result<BitVec> {
    if q_list.is_empty() {
        return Err(Error::InvalidInput("l_alt_ext: need at least one source".into()));
    }
    let first_len = q_list[0].len();
    if q_list.iter().any(|q| q.len() != first_len) {
        return Err(Error::WidthMismatch("l_alt_ext: ragged q_list".into()));
    }
    let mut s_cur = s1.clone();
    for q in q_list.iter().skip(1) {
        let r = strong_ext(w, &s_cur, r_bits)?;
        s_cur = strong_ext(q, &r, s_bits)?;
    }
    Ok(s_cur)
}
