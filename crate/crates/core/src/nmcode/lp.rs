//! A small dense two-phase simplex solver, enough for the NM-mixture LPs
//! (tens of variables). Bland's rule, so no cycling.

const EPS: f64 = 1e-9;
const MAX_PIVOTS: usize = 100_000;

/// Minimize c.x subject to a_ub x <= b_ub, a_eq x = b_eq, x >= 0.
/// Returns (objective, x) or None if infeasible.
pub fn solve_min(
    c: &[f64],
    a_ub: &[Vec<f64>],
    b_ub: &[f64],
    a_eq: &[Vec<f64>],
    b_eq: &[f64],
) -> Option<(f64, Vec<f64>)> {
    let n = c.len();
    let m_ub = a_ub.len();
    let m_eq = a_eq.len();
    let m = m_ub + m_eq;
    // columns: n structural + m_ub slacks + up to m artificials
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut rhs: Vec<f64> = Vec::with_capacity(m);
    for (i, row) in a_ub.iter().enumerate() {
        assert_eq!(row.len(), n);
        let mut r = vec![0.0; n + m_ub];
        r[..n].copy_from_slice(row);
        r[n + i] = 1.0;
        let mut b = b_ub[i];
        if b < 0.0 {
            for v in r.iter_mut() {
                *v = -*v;
            }
            b = -b;
        }
        rows.push(r);
        rhs.push(b);
    }
    for (i, row) in a_eq.iter().enumerate() {
        assert_eq!(row.len(), n);
        let mut r = vec![0.0; n + m_ub];
        r[..n].copy_from_slice(row);
        let mut b = b_eq[i];
        if b < 0.0 {
            for v in r.iter_mut() {
                *v = -*v;
            }
            b = -b;
        }
        rows.push(r);
        rhs.push(b);
    }
    // add one artificial per row without an obvious basic slack
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let mut art_cols: Vec<usize> = Vec::new();
    let mut ncols = n + m_ub;
    for i in 0..m {
        let slack = if i < m_ub { Some(n + i) } else { None };
        if let Some(sc) = slack {
            if rows[i][sc] > 0.5 {
                basis.push(sc);
                continue;
            }
        }
        for r in rows.iter_mut() {
            r.push(0.0);
        }
        rows[i][ncols] = 1.0;
        basis.push(ncols);
        art_cols.push(ncols);
        ncols += 1;
    }

    // phase 1: minimize the artificial sum
    if !art_cols.is_empty() {
        let mut obj = vec![0.0; ncols];
        for &acol in &art_cols {
            obj[acol] = 1.0;
        }
        let val = run_simplex(&mut rows, &mut rhs, &mut basis, &obj);
        if val > EPS {
            return None;
        }
        // drive any artificial still in the basis out (degenerate rows)
        for i in 0..m {
            if art_cols.contains(&basis[i]) {
                if let Some(c2) = (0..n + m_ub).find(|&c2| rows[i][c2].abs() > EPS) {
                    pivot(&mut rows, &mut rhs, &mut basis, i, c2);
                }
            }
        }
        for r in rows.iter_mut() {
            r.truncate(n + m_ub);
        }
        ncols = n + m_ub;
    }

    // phase 2
    let mut obj = vec![0.0; ncols];
    obj[..n].copy_from_slice(c);
    let val = run_simplex(&mut rows, &mut rhs, &mut basis, &obj);
    let mut x = vec![0.0; n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = rhs[i];
        }
    }
    Some((val, x))
}

fn run_simplex(
    rows: &mut [Vec<f64>],
    rhs: &mut [f64],
    basis: &mut [usize],
    obj: &[f64],
) -> f64 {
    let ncols = rows[0].len();
    for _ in 0..MAX_PIVOTS {
        // reduced costs: obj - obj_basis * rows
        let mut reduced = obj.to_vec();
        let mut z = 0.0;
        for (i, &bv) in basis.iter().enumerate() {
            let cb = obj[bv];
            if cb != 0.0 {
                z += cb * rhs[i];
                for (rj, r) in reduced.iter_mut().zip(rows[i].iter()) {
                    *rj -= cb * r;
                }
            }
        }
        // Bland: smallest index with negative reduced cost
        let enter = match (0..ncols).find(|&j| reduced[j] < -EPS) {
            Some(j) => j,
            None => return z,
        };
        // ratio test, Bland tie-break on basis index
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..rows.len() {
            let a = rows[i][enter];
            if a > EPS {
                let ratio = rhs[i] / a;
                if ratio < best - EPS
                    || (ratio < best + EPS
                        && leave.map_or(true, |l| basis[i] < basis[l]))
                {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let leave = leave.expect("objective unbounded; the mixture LP is bounded");
        pivot_full(rows, rhs, basis, leave, enter);
    }
    panic!("simplex did not converge");
}

fn pivot(rows: &mut [Vec<f64>], rhs: &mut [f64], basis: &mut [usize], r: usize, c: usize) {
    pivot_full(rows, rhs, basis, r, c);
}

fn pivot_full(rows: &mut [Vec<f64>], rhs: &mut [f64], basis: &mut [usize], r: usize, c: usize) {
    let p = rows[r][c];
    debug_assert!(p.abs() > EPS);
    let inv = 1.0 / p;
    for v in rows[r].iter_mut() {
        *v *= inv;
    }
    rhs[r] *= inv;
    for i in 0..rows.len() {
        if i != r {
            let f = rows[i][c];
            if f.abs() > EPS {
                let (pr, cur) = if i < r {
                    let (a, b) = rows.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = rows.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for (cv, pv) in cur.iter_mut().zip(pr.iter()) {
                    *cv -= f * pv;
                }
                rhs[i] -= f * rhs[r];
            }
        }
    }
    basis[r] = c;
}
