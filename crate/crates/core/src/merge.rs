//! Independence-preserving mergers.
//!
//! Four constructions: the basic L-alternating merger, the entropy-recycling
//! pairwise merger, the Conv_a look-ahead converter, and the two composed
//! mergers (asymmetric and doubling) that output both an X-strong and a
//! Y-strong value. Widths come fully resolved from the schedule; every
//! function records its intermediate widths in an optional ledger so traces
//! can be audited against the planner.

use serde::{Deserialize, Serialize};

use crate::altext::{la_ext, la_ext_pair};
use crate::bits::BitVec;
use crate::extract::strong_ext;
use crate::{Error, Result};

/// An L x m matrix of merger rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowMatrix {
    rows: Vec<BitVec>,
}

impl RowMatrix {
    pub fn new(rows: Vec<BitVec>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput("RowMatrix needs at least one row".into()));
        }
        let w = rows[0].len();
        if rows.iter().any(|r| r.len() != w) {
            return Err(Error::WidthMismatch("RowMatrix rows must have equal width".into()));
        }
        Ok(RowMatrix { rows })
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn as_slice(&self) -> &[BitVec] {
        &self.rows
    }

    /// Pad to a power-of-two row count by duplicating the last row.
    pub fn padded_pow2(&self) -> RowMatrix {
        let mut rows = self.rows.clone();
        while !rows.len().is_power_of_two() {
            rows.push(rows.last().unwrap().clone());
        }
        RowMatrix { rows }
    }
}

/// Recorded intermediate widths, for schedule audits.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct Ledger {
    pub entries: Vec<LedgerEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct LedgerEntry {
    pub label: String,
    pub bits: usize,
}

impl Ledger {
    pub fn push(&mut self, label: impl Into<String>, bits: usize) {
        self.entries.push(LedgerEntry {
            label: label.into(),
            bits,
        });
    }

    pub fn get(&self, label: &str) -> Option<usize> {
        self.entries.iter().find(|e| e.label == label).map(|e| e.bits)
    }
}

fn note(ledger: &mut Option<&mut Ledger>, label: &str, bits: usize) {
    if let Some(l) = ledger.as_deref_mut() {
        l.push(label, bits);
    }
}

fn check_seeds(seeds: &[BitVec]) -> Result<usize> {
    if seeds.is_empty() {
        return Ok(0);
    }
    let d = seeds[0].len();
    if seeds.iter().any(|s| s.len() != d) {
        return Err(Error::WidthMismatch("look-ahead seeds must have equal width".into()));
    }
    Ok(d)
}

/// Basic NIPM: L-alternating extraction with the rows as Quentin's sources
/// and y as Wendy's. S_1 is the low m1 slice of row 1; the output is S_L.
pub fn nipm_basic(v: &RowMatrix, y: &BitVec, m1: usize) -> Result<BitVec> {
    if m1 == 0 || m1 > v.width() {
        return Err(Error::PlannerReject(format!(
            "nipm_basic: output width {m1} out of range for row width {}",
            v.width()
        )));
    }
    if m1 > y.len() {
        return Err(Error::PlannerReject(format!(
            "nipm_basic: output width {m1} exceeds |y| = {}",
            y.len()
        )));
    }
    let s1 = v.row(0).slice(0, m1);
    let mut s_cur = s1;
    for i in 1..v.rows() {
        let r = strong_ext(y, &s_cur, m1)?;
        s_cur = strong_ext(v.row(i), &r, m1)?;
    }
    Ok(s_cur)
}

/// Entropy-recycling NIPM: log L iterations, each merging adjacent row pairs
/// with a slice of the iteration seed, refreshing the merged row from the
/// rest of the seed, then re-extracting to full width from x.
pub fn nipm_recycled(
    v: &RowMatrix,
    x: &BitVec,
    seeds: &[BitVec],
    m: usize,
    mut ledger: Option<&mut Ledger>,
) -> Result<BitVec> {
    if m == 0 || m != v.width() {
        return Err(Error::PlannerReject(format!(
            "nipm_recycled: target width {m} must equal row width {}",
            v.width()
        )));
    }
    let padded = v.padded_pow2();
    let ell = padded.rows().trailing_zeros() as usize;
    if seeds.len() < ell {
        return Err(Error::PlannerReject(format!(
            "nipm_recycled: need {ell} seeds, got {}",
            seeds.len()
        )));
    }
    let d = check_seeds(seeds)?;
    if ell > 0 {
        if d / 3 == 0 || d / 4 == 0 {
            return Err(Error::PlannerReject(format!(
                "nipm_recycled: seed width {d} leaves empty d/3 or d/4 slices"
            )));
        }
        if m > x.len() {
            return Err(Error::PlannerReject(format!(
                "nipm_recycled: row width {m} exceeds |x| = {}",
                x.len()
            )));
        }
    }
    let mut cur: Vec<BitVec> = padded.as_slice().to_vec();
    for (i, seed) in seeds.iter().take(ell).enumerate() {
        let y_slice = seed.slice(0, d / 3);
        note(&mut ledger, &format!("iter{}.y_slice", i + 1), d / 3);
        let mut next = Vec::with_capacity(cur.len() / 2);
        let m1 = ((m as f64 * 0.2).floor() as usize).max(1);
        for j in 0..cur.len() / 2 {
            let pair = RowMatrix::new(vec![cur[2 * j].clone(), cur[2 * j + 1].clone()])?;
            let merged = nipm_basic(&pair, &y_slice, m1)?;
            let refreshed = strong_ext(seed, &merged, d / 4)?;
            let restored = strong_ext(x, &refreshed, m)?;
            if j == 0 {
                note(&mut ledger, &format!("iter{}.merged", i + 1), merged.len());
                note(&mut ledger, &format!("iter{}.refreshed", i + 1), d / 4);
                note(&mut ledger, &format!("iter{}.restored", i + 1), m);
            }
            next.push(restored);
        }
        cur = next;
    }
    debug_assert_eq!(cur.len(), 1);
    Ok(cur.pop().unwrap())
}

/// Bits of y that Conv_a needs for `ell` outputs of s bits with `a` parts.
pub fn conv_required_len(a: usize, ell: usize, s: usize) -> Result<usize> {
    assert!(a >= 1);
    if ell == 0 {
        return Ok(0);
    }
    if a == 1 {
        if ell > 40 {
            return Err(Error::PlannerReject(format!(
                "conv_a: 2^{ell} slice would overflow"
            )));
        }
        return Ok(((1usize << ell) - 1) * 2 * s);
    }
    let t = conv_group_size(a, ell);
    let groups = ell.div_ceil(t);
    if groups > 40 {
        return Err(Error::PlannerReject(format!(
            "conv_a: 2^{groups} slice would overflow"
        )));
    }
    let inner = conv_required_len(a - 1, t, s)?;
    Ok(((1usize << groups) - 1) * 2 * inner)
}

/// t = ell^((a-1)/a), rounded to the nearest integer >= 1.
fn conv_group_size(a: usize, ell: usize) -> usize {
    let t = (ell as f64).powf((a as f64 - 1.0) / a as f64).round() as usize;
    t.clamp(1, ell)
}

/// Conv_a: turn one long uniform string y plus `a` look-ahead parts into
/// `ell` strings of s bits satisfying the look-ahead condition. The base
/// case slices y into nested windows of length (2^j - 1) * 2s and extracts
/// each with the single part; the recursion splits into groups first.
pub fn conv_a(y: &BitVec, x_parts: &[BitVec], ell: usize, s: usize) -> Result<Vec<BitVec>> {
    let a = x_parts.len();
    if a == 0 {
        return Err(Error::InvalidInput("conv_a: need at least one part".into()));
    }
    if ell == 0 {
        return Ok(Vec::new());
    }
    let need = conv_required_len(a, ell, s)?;
    if y.len() < need {
        return Err(Error::PlannerReject(format!(
            "conv_a: |y| = {} below required {need} (a={a}, ell={ell}, s={s})",
            y.len()
        )));
    }
    if a == 1 {
        let mut out = Vec::with_capacity(ell);
        for j in 1..=ell {
            let y_j = y.slice(0, ((1usize << j) - 1) * 2 * s);
            out.push(strong_ext(&y_j, &x_parts[0], s)?);
        }
        return Ok(out);
    }
    let t = conv_group_size(a, ell);
    let groups = ell.div_ceil(t);
    let m_req = conv_required_len(a - 1, t, s)?;
    let mut out = Vec::with_capacity(groups * t);
    for j in 1..=groups {
        let y_j = y.slice(0, ((1usize << j) - 1) * 2 * m_req);
        let w_hat = strong_ext(&y_j, &x_parts[0], m_req)?;
        out.extend(conv_a(&w_hat, &x_parts[1..], t, s)?);
    }
    out.truncate(ell);
    Ok(out)
}

/// Resolved widths for the asymmetric merger.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct NipmAsymParams {
    /// Row count the schedule was resolved for.
    pub l: usize,
    /// Row width; also the width of the X-strong output.
    pub m: usize,
    /// |x|.
    pub d1: usize,
    /// |y|.
    pub d2: usize,
    /// Chunk width d; also the width of the Y-strong output.
    pub d: usize,
    /// Look-ahead parts used by Conv_a.
    pub a: usize,
}

impl NipmAsymParams {
    pub fn validate(&self) -> Result<()> {
        let slice = 4 * self.a * self.d;
        if self.d == 0 || self.m == 0 || self.a == 0 {
            return Err(Error::PlannerReject("nipm_asym: zero width in schedule".into()));
        }
        if slice > self.d1 || slice > self.d2 {
            return Err(Error::PlannerReject(format!(
                "nipm_asym: slice 4a*d = {slice} exceeds d1 = {} or d2 = {}",
                self.d1, self.d2
            )));
        }
        if self.d2 / 2 == 0 {
            return Err(Error::PlannerReject("nipm_asym: d2/2 is empty".into()));
        }
        if self.m > self.d1 {
            return Err(Error::PlannerReject(format!(
                "nipm_asym: row width {} exceeds d1 = {}",
                self.m, self.d1
            )));
        }
        if self.l > 1 {
            // the recycled stage slices each seed into d/3 and d/4 pieces
            if self.d < 4 {
                return Err(Error::PlannerReject(format!(
                    "nipm_asym: chunk width d = {} below 4, recycled slices vanish",
                    self.d
                )));
            }
            // pairwise merging extracts floor(m/5) bits from the d/3 slice
            let m1 = ((self.m as f64 * 0.2).floor() as usize).max(1);
            if m1 > self.d / 3 {
                return Err(Error::PlannerReject(format!(
                    "nipm_asym: basic-merge width {m1} exceeds the d/3 = {} seed slice",
                    self.d / 3
                )));
            }
            let ell = log2_ceil(self.l);
            let need = conv_required_len(self.a, ell, self.d)?;
            if need > self.d2 / 2 {
                return Err(Error::PlannerReject(format!(
                    "nipm_asym: conv_a needs {need} bits but |Z| = d2/2 = {}",
                    self.d2 / 2
                )));
            }
        }
        Ok(())
    }
}

/// Asymmetric NIPM. Returns (wx, wy): wx is strong in Y with m bits, wy is
/// strong in X with d bits.
pub fn nipm_asym(
    v: &RowMatrix,
    x: &BitVec,
    y: &BitVec,
    p: &NipmAsymParams,
    mut ledger: Option<&mut Ledger>,
) -> Result<(BitVec, BitVec)> {
    p.validate()?;
    if x.len() != p.d1 || y.len() != p.d2 {
        return Err(Error::WidthMismatch(format!(
            "nipm_asym: |x| = {} and |y| = {} must match schedule (d1 = {}, d2 = {})",
            x.len(),
            y.len(),
            p.d1,
            p.d2
        )));
    }
    if v.width() != p.m {
        return Err(Error::WidthMismatch(format!(
            "nipm_asym: row width {} must match schedule m = {}",
            v.width(),
            p.m
        )));
    }
    let padded = v.padded_pow2();
    let ell = padded.rows().trailing_zeros() as usize;

    // step 1: slices and the initial alternating extraction
    let slice = 4 * p.a * p.d;
    let x0 = x.slice(0, slice);
    let y0 = y.slice(0, slice);
    note(&mut ledger, "x0", slice);
    note(&mut ledger, "y0", slice);
    let t = la_ext_pair(&x0, &y0, p.a + 1, p.d, p.d)?;
    let r_chain = t.r_list;
    for (i, r) in r_chain.iter().enumerate() {
        note(&mut ledger, &format!("r{i}"), r.len());
    }

    // step 2: Z from the whole of y, seeded by R_0
    let z = strong_ext(y, &r_chain[0], p.d2 / 2)?;
    note(&mut ledger, "z", z.len());

    // step 3: re-randomize each row through Y_0, then x
    let mut hat_rows = Vec::with_capacity(padded.rows());
    for i in 0..padded.rows() {
        let bar = strong_ext(&y0, padded.row(i), p.d)?;
        let hat = strong_ext(x, &bar, p.m)?;
        if i == 0 {
            note(&mut ledger, "v_bar", bar.len());
            note(&mut ledger, "v_hat", hat.len());
        }
        hat_rows.push(hat);
    }
    let hat = RowMatrix::new(hat_rows)?;

    // step 4: look-ahead seeds from Z and R_1..R_a
    let seeds = conv_a(&z, &r_chain[1..], ell, p.d)?;
    for (i, s) in seeds.iter().enumerate() {
        note(&mut ledger, &format!("z{}", i + 1), s.len());
    }

    // step 5: recycled merge, then the Y-strong output
    let wx = nipm_recycled(&hat, x, &seeds, p.m, ledger.as_deref_mut())?;
    note(&mut ledger, "wx", wx.len());
    let wy = strong_ext(y, &wx, p.d)?;
    note(&mut ledger, "wy", wy.len());
    Ok((wx, wy))
}

/// Resolved widths for the doubling merger.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct NipmDoublingParams {
    pub l: usize,
    /// Row width and wx width.
    pub m: usize,
    /// |x|.
    pub n: usize,
    /// |y|.
    pub n_prime: usize,
    /// Chain widths: R_i have 4*d1 bits, branch protocol seeds d1 bits.
    pub d1: usize,
    /// Step-2 S width and wy width.
    pub d2: usize,
    /// Branch-width shrink base.
    pub a: usize,
}

impl NipmDoublingParams {
    /// loglog L: the number of doubling levels minus one.
    pub fn t(&self) -> usize {
        let lg = log2_ceil(self.l).max(1);
        log2_ceil(lg)
    }

    /// Branch output width at level j, following
    /// (log^(log a) L / a^(j-1) - 1) * d2.
    pub fn branch_width(&self, j: usize) -> usize {
        let lg = log2_ceil(self.l).max(2) as f64;
        let la = (self.a as f64).log2();
        let q = lg.powf(la) / (self.a as f64).powi(j as i32 - 1);
        let w = ((q - 1.0) * self.d2 as f64).round();
        (w as isize).max(1) as usize
    }

    /// Planner-facing ledger of (level, branch width).
    pub fn branch_ledger(&self) -> Vec<(usize, usize)> {
        (0..=self.t()).map(|j| (j, self.branch_width(j))).collect()
    }

    pub fn x0_len(&self) -> usize {
        10 * self.t().max(1) * self.d1
    }

    pub fn y0_len(&self) -> usize {
        10 * self.t().max(1) * self.d2
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.d1 == 0 || self.d2 == 0 || self.a < 2 {
            return Err(Error::PlannerReject("nipm_doubling: zero width or a < 2".into()));
        }
        if self.x0_len() > self.n || self.y0_len() > self.n_prime {
            return Err(Error::PlannerReject(format!(
                "nipm_doubling: slices x0 = {} / y0 = {} exceed n = {} / n' = {}",
                self.x0_len(),
                self.y0_len(),
                self.n,
                self.n_prime
            )));
        }
        if 4 * self.d1 > self.x0_len() {
            return Err(Error::PlannerReject("nipm_doubling: R width exceeds x0".into()));
        }
        let mut prev = self.n_prime;
        for j in 0..=self.t() {
            let w = self.branch_width(j);
            if w > prev {
                return Err(Error::PlannerReject(format!(
                    "nipm_doubling: branch width {w} at level {j} exceeds parent {prev}"
                )));
            }
            prev = w;
        }
        if self.m > self.n {
            return Err(Error::PlannerReject("nipm_doubling: m exceeds n".into()));
        }
        Ok(())
    }
}

pub(crate) fn log2_ceil(v: usize) -> usize {
    assert!(v >= 1);
    (usize::BITS - (v - 1).leading_zeros()) as usize
}

/// Doubling NIPM. Returns (wx, wy): wx strong in Y with m bits, wy strong in
/// X with d2 bits.
pub fn nipm_doubling(
    v: &RowMatrix,
    x: &BitVec,
    y: &BitVec,
    p: &NipmDoublingParams,
    mut ledger: Option<&mut Ledger>,
) -> Result<(BitVec, BitVec)> {
    p.validate()?;
    if x.len() != p.n || y.len() != p.n_prime {
        return Err(Error::WidthMismatch(format!(
            "nipm_doubling: |x| = {} / |y| = {} must match schedule ({} / {})",
            x.len(),
            y.len(),
            p.n,
            p.n_prime
        )));
    }
    if v.width() != p.m {
        return Err(Error::WidthMismatch("nipm_doubling: row width mismatch".into()));
    }
    let padded = v.padded_pow2();
    let ell = padded.rows().trailing_zeros() as usize;
    let t = p.t();

    // steps 1-2: slices and the R chain
    let x0 = x.slice(0, p.x0_len());
    let y0 = y.slice(0, p.y0_len());
    note(&mut ledger, "x0", x0.len());
    note(&mut ledger, "y0", y0.len());
    let chain = la_ext_pair(&x0, &y0, t + 1, 4 * p.d1, p.d2)?;
    let r_chain = chain.r_list;
    for (i, r) in r_chain.iter().enumerate() {
        note(&mut ledger, &format!("r{i}"), r.len());
    }

    // step 3: re-randomize rows
    let mut bar_rows = Vec::with_capacity(padded.rows());
    for i in 0..padded.rows() {
        let ybar = strong_ext(&y0, padded.row(i), p.d2)?;
        let vbar = strong_ext(x, &ybar, p.m)?;
        if i == 0 {
            note(&mut ledger, "y_bar", ybar.len());
            note(&mut ledger, "v_bar", vbar.len());
        }
        bar_rows.push(vbar);
    }
    let vbar = RowMatrix::new(bar_rows)?;

    // step 4: the doubling loop; each branch runs a 2-round alternating
    // extraction against R_j with shrinking output widths
    let mut branches = vec![y.clone()];
    for (j, r_j) in r_chain.iter().enumerate() {
        let w_j = p.branch_width(j);
        note(&mut ledger, &format!("branch_width_level{j}"), w_j);
        let mut next = Vec::with_capacity(branches.len() * 2);
        for b in &branches {
            let s1 = r_j.slice(0, p.d1.min(r_j.len()));
            let tr = la_ext(b, r_j, &s1, 2, w_j.min(b.len()), p.d1)?;
            next.push(tr.r_list[0].clone());
            next.push(tr.r_list[1].clone());
        }
        branches = next;
    }
    note(&mut ledger, "branches", branches.len());

    // step 5: merge with the first log L branch outputs as seeds
    let seeds: Vec<BitVec> = branches.into_iter().take(ell.max(1)).collect();
    let wx = nipm_recycled(&vbar, x, &seeds[..ell], p.m, ledger.as_deref_mut())?;
    note(&mut ledger, "wx", wx.len());
    let wy = strong_ext(y, &wx, p.d2)?;
    note(&mut ledger, "wy", wy.len());
    Ok((wx, wy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rand_rows(l: usize, m: usize, rng: &mut ChaCha8Rng) -> RowMatrix {
        RowMatrix::new((0..l).map(|_| BitVec::random(m, rng)).collect()).unwrap()
    }

    #[test]
    fn nipm_basic_single_row_is_slice() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let v = rand_rows(1, 10, &mut rng);
        let y = BitVec::random(8, &mut rng);
        assert_eq!(nipm_basic(&v, &y, 2).unwrap(), v.row(0).slice(0, 2));
    }

    #[test]
    fn nipm_basic_output_width() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for l in 1..=4 {
            let m = 10;
            let v = rand_rows(l, m, &mut rng);
            let y = BitVec::random(12, &mut rng);
            let m1 = (m as f64 * 0.2).floor() as usize;
            assert_eq!(nipm_basic(&v, &y, m1).unwrap().len(), 2);
        }
    }

    #[test]
    fn nipm_recycled_degenerate_single_row() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v = rand_rows(1, 6, &mut rng);
        let x = BitVec::random(12, &mut rng);
        let got = nipm_recycled(&v, &x, &[], 6, None).unwrap();
        assert_eq!(got, *v.row(0));
    }

    #[test]
    fn nipm_recycled_two_rows_ledger() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = rand_rows(2, 8, &mut rng);
        let x = BitVec::random(48, &mut rng);
        let seeds = vec![BitVec::random(12, &mut rng)];
        let mut ledger = Ledger::default();
        let out = nipm_recycled(&v, &x, &seeds, 8, Some(&mut ledger)).unwrap();
        assert_eq!(out.len(), 8);
        // one iteration with slice widths d/3, d/4, then m
        assert_eq!(ledger.get("iter1.y_slice"), Some(4));
        assert_eq!(ledger.get("iter1.merged"), Some(1));
        assert_eq!(ledger.get("iter1.refreshed"), Some(3));
        assert_eq!(ledger.get("iter1.restored"), Some(8));
    }

    #[test]
    fn nipm_recycled_pads_odd_row_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = rand_rows(3, 8, &mut rng);
        let x = BitVec::random(48, &mut rng);
        let seeds: Vec<BitVec> = (0..2).map(|_| BitVec::random(12, &mut rng)).collect();
        let out = nipm_recycled(&v, &x, &seeds, 8, None).unwrap();
        assert_eq!(out.len(), 8);
        // explicit padding with a duplicated last row gives the same output
        let vp = v.padded_pow2();
        assert_eq!(vp.rows(), 4);
        assert_eq!(nipm_recycled(&vp, &x, &seeds, 8, None).unwrap(), out);
    }

    #[test]
    fn conv_a_single_output_is_one_extraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let y = BitVec::random(16, &mut rng);
        let part = BitVec::random(6, &mut rng);
        let s = 4;
        let got = conv_a(&y, std::slice::from_ref(&part), 1, s).unwrap();
        let want = strong_ext(&y.slice(0, 2 * s), &part, s).unwrap();
        assert_eq!(got, vec![want]);
    }

    #[test]
    fn conv_a_slice_ledger() {
        // a=1, ell=3, s=4: slice lengths (2^j - 1)*2s = 8, 24, 56
        assert_eq!(conv_required_len(1, 1, 4).unwrap(), 8);
        assert_eq!(conv_required_len(1, 2, 4).unwrap(), 24);
        assert_eq!(conv_required_len(1, 3, 4).unwrap(), 56);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let y = BitVec::random(56, &mut rng);
        let part = BitVec::random(8, &mut rng);
        let got = conv_a(&y, std::slice::from_ref(&part), 3, 4).unwrap();
        assert_eq!(got.len(), 3);
        for (j, w) in got.iter().enumerate() {
            assert_eq!(w.len(), 4);
            let y_j = y.slice(0, ((1usize << (j + 1)) - 1) * 8);
            assert_eq!(*w, strong_ext(&y_j, &part, 4).unwrap());
        }
    }

    #[test]
    fn conv_a_rejects_short_y() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let y = BitVec::random(20, &mut rng);
        let part = BitVec::random(8, &mut rng);
        assert!(matches!(
            conv_a(&y, std::slice::from_ref(&part), 3, 4),
            Err(Error::PlannerReject(_))
        ));
    }

    #[test]
    fn conv_a_recursive_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let s = 3;
        let ell = 4;
        let parts: Vec<BitVec> = (0..2).map(|_| BitVec::random(6, &mut rng)).collect();
        let need = conv_required_len(2, ell, s).unwrap();
        let y = BitVec::random(need, &mut rng);
        let got = conv_a(&y, &parts, ell, s).unwrap();
        assert_eq!(got.len(), ell);
        assert!(got.iter().all(|w| w.len() == s));
    }

    fn asym_params() -> NipmAsymParams {
        NipmAsymParams {
            l: 4,
            m: 8,
            d1: 80,
            d2: 96,
            d: 4,
            a: 2,
        }
    }

    #[test]
    fn nipm_asym_structural() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = asym_params();
        let v = rand_rows(p.l, p.m, &mut rng);
        let x = BitVec::random(p.d1, &mut rng);
        let y = BitVec::random(p.d2, &mut rng);
        let mut ledger = Ledger::default();
        let (wx, wy) = nipm_asym(&v, &x, &y, &p, Some(&mut ledger)).unwrap();
        assert_eq!(wx.len(), p.m);
        assert_eq!(wy.len(), p.d);
        // |R_i| = d for i = 0..a, |Z| = d2/2
        for i in 0..=p.a {
            assert_eq!(ledger.get(&format!("r{i}")), Some(p.d));
        }
        assert_eq!(ledger.get("z"), Some(p.d2 / 2));
        assert_eq!(ledger.get("x0"), Some(4 * p.a * p.d));
    }

    #[test]
    fn nipm_asym_single_row_degenerates() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let p = NipmAsymParams { l: 1, ..asym_params() };
        let v = rand_rows(1, p.m, &mut rng);
        let x = BitVec::random(p.d1, &mut rng);
        let y = BitVec::random(p.d2, &mut rng);
        let (wx, _) = nipm_asym(&v, &x, &y, &p, None).unwrap();
        assert_eq!(wx.len(), p.m);
        // the single row is re-extracted through y0 then x
        let y0 = y.slice(0, 4 * p.a * p.d);
        let bar = strong_ext(&y0, v.row(0), p.d).unwrap();
        let hat = strong_ext(&x, &bar, p.m).unwrap();
        assert_eq!(wx, hat);
    }

    #[test]
    fn doubling_branch_ledger_l16() {
        // L=16, a=2, d2=8: widths (4/2^(j-1) - 1)*8 = 56, 24, 8
        let p = NipmDoublingParams {
            l: 16,
            m: 8,
            n: 200,
            n_prime: 400,
            d1: 4,
            d2: 8,
            a: 2,
        };
        assert_eq!(p.t(), 2);
        assert_eq!(p.branch_ledger(), vec![(0, 56), (1, 24), (2, 8)]);
    }

    #[test]
    fn doubling_runs_and_counts_branches() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = NipmDoublingParams {
            l: 4,
            m: 6,
            n: 120,
            n_prime: 160,
            d1: 4,
            d2: 6,
            a: 2,
        };
        // L=4: log L = 2, loglog L = 1, loop runs twice (j = 0, 1),
        // producing 4 = 2 log L branches
        assert_eq!(p.t(), 1);
        let v = rand_rows(p.l, p.m, &mut rng);
        let x = BitVec::random(p.n, &mut rng);
        let y = BitVec::random(p.n_prime, &mut rng);
        let mut ledger = Ledger::default();
        let (wx, wy) = nipm_doubling(&v, &x, &y, &p, Some(&mut ledger)).unwrap();
        assert_eq!(wx.len(), p.m);
        assert_eq!(wy.len(), p.d2);
        assert_eq!(ledger.get("branches"), Some(4));
    }

    #[test]
    fn doubling_l2_single_level() {
        // L=2: loglog L = 0, the loop runs once
        let p = NipmDoublingParams {
            l: 2,
            m: 6,
            n: 80,
            n_prime: 120,
            d1: 4,
            d2: 6,
            a: 2,
        };
        assert_eq!(p.t(), 0);
        assert_eq!(p.branch_ledger().len(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let v = rand_rows(2, 6, &mut rng);
        let x = BitVec::random(p.n, &mut rng);
        let y = BitVec::random(p.n_prime, &mut rng);
        let (wx, _) = nipm_doubling(&v, &x, &y, &p, None).unwrap();
        assert_eq!(wx.len(), 6);
    }
}
