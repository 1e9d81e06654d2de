//! Integral symplectic bases for skew forms.

use nalgebra::DMatrix;

use super::PeriodError;

fn pair(e: &DMatrix<i64>, u: &[i64], v: &[i64]) -> i64 {
    let mut s = 0;
    for i in 0..u.len() {
        if u[i] == 0 {
            continue;
        }
        for j in 0..v.len() {
            s += u[i] * e[(i, j)] * v[j];
        }
    }
    s
}

/// Rows `A_1..A_g, B_1..B_g` of an integral basis with `<A_i, B_j> = delta_ij`
/// and all other pairings zero, for a unimodular skew form `e`.
pub fn symplectic_basis(e: &DMatrix<i64>) -> Result<DMatrix<i64>, PeriodError> {
    let n = e.nrows();
    if e.ncols() != n || *e != -e.transpose() {
        return Err(PeriodError::InconsistentIntersections);
    }
    let mut pool: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut v = vec![0; n];
            v[i] = 1;
            v
        })
        .collect();
    let mut a_rows = Vec::new();
    let mut b_rows = Vec::new();
    while !pool.is_empty() {
        let Some(ai) = (0..pool.len()).find(|&i| (0..pool.len()).any(|j| pair(e, &pool[i], &pool[j]) != 0)) else {
            return Err(PeriodError::RankDeficientCycles(format!("{} null vectors", pool.len())));
        };
        let a = pool.remove(ai);
        // Euclid on the pairings with `a` until a single vector pairs non-trivially.
        loop {
            let mut nz: Vec<(usize, i64)> = pool
                .iter()
                .enumerate()
                .map(|(i, v)| (i, pair(e, &a, v)))
                .filter(|(_, c)| *c != 0)
                .collect();
            if nz.len() <= 1 {
                break;
            }
            nz.sort_by_key(|(_, c)| c.abs());
            let (small, cs) = nz[0];
            for &(i, c) in &nz[1..] {
                let q = c / cs;
                let (src, dst) = (pool[small].clone(), &mut pool[i]);
                for k in 0..n {
                    dst[k] -= q * src[k];
                }
            }
        }
        let (bi, c) = pool
            .iter()
            .enumerate()
            .map(|(i, v)| (i, pair(e, &a, v)))
            .find(|(_, c)| *c != 0)
            .expect("a pairs with some vector");
        if c.abs() != 1 {
            return Err(PeriodError::RankDeficientCycles(format!("pairing {c} is not a unit")));
        }
        let mut b = pool.remove(bi);
        if c == -1 {
            b.iter_mut().for_each(|x| *x = -*x);
        }
        for v in pool.iter_mut() {
            let (vb, va) = (pair(e, v, &b), pair(e, v, &a));
            for k in 0..n {
                v[k] += -vb * a[k] + va * b[k];
            }
        }
        a_rows.push(a);
        b_rows.push(b);
    }
    let rows: Vec<i64> = a_rows.into_iter().chain(b_rows).flatten().collect();
    Ok(DMatrix::from_row_slice(n, n, &rows))
}
