//! Smith normal form of small integer matrices, tracking the column
//! transformation and its inverse.

pub(crate) struct Smith {
    pub diag: Vec<i128>,
    /// Column transform `V` with `U·A·V = D`.
    pub v: Vec<Vec<i128>>,
    /// `V⁻¹`.
    pub v_inv: Vec<Vec<i128>>,
}

fn identity(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

/// Smith form of an `m × n` matrix given by rows.
pub(crate) fn smith(mut a: Vec<Vec<i128>>, n: usize) -> Smith {
    let m = a.len();
    let mut v = identity(n);
    let mut v_inv = identity(n);
    let mut diag = Vec::new();
    let swap_cols = |a: &mut Vec<Vec<i128>>, v: &mut Vec<Vec<i128>>, v_inv: &mut Vec<Vec<i128>>, i: usize, j: usize| {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
        v_inv.swap(i, j);
    };
    for t in 0..n.min(m) {
        loop {
            // Smallest nonzero entry of the remaining block becomes the pivot.
            let mut best: Option<(usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                for (j, &x) in row.iter().enumerate().skip(t) {
                    if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Smith { diag, v, v_inv };
            };
            a.swap(t, pi);
            if pj != t {
                swap_cols(&mut a, &mut v, &mut v_inv, t, pj);
            }
            let p = a[t][t];
            let mut dirty = false;
            for i in t + 1..m {
                let q = a[i][t] / p;
                if q != 0 {
                    for j in t..n {
                        a[i][j] -= q * a[t][j];
                    }
                }
                dirty |= a[i][t] != 0;
            }
            for j in t + 1..n {
                let q = a[t][j] / p;
                if q != 0 {
                    for row in a.iter_mut() {
                        row[j] -= q * row[t];
                    }
                    for row in v.iter_mut() {
                        row[j] -= q * row[t];
                    }
                    for k in 0..n {
                        v_inv[t][k] += q * v_inv[j][k];
                    }
                }
                dirty |= a[t][j] != 0;
            }
            if dirty {
                continue;
            }
            // Enforce divisibility of the rest of the block by the pivot.
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| a[i][j] % p != 0));
            if let Some(i) = bad {
                for j in t..n {
                    a[t][j] += a[i][j];
                }
                continue;
            }
            break;
        }
        diag.push(a[t][t].abs());
    }
    Smith { diag, v, v_inv }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matmul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
        let n = b[0].len();
        a.iter()
            .map(|row| (0..n).map(|j| row.iter().zip(b).map(|(x, r)| x * r[j]).sum()).collect())
            .collect()
    }

    #[test]
    fn z6_from_z2_times_z3() {
        let s = smith(vec![vec![2, 0], vec![0, 3]], 2);
        assert_eq!(s.diag, vec![1, 6]);
        assert_eq!(matmul(&s.v, &s.v_inv), identity(2));
    }

    #[test]
    fn relation_matrix_with_redundant_rows() {
        let a = vec![vec![4, 6, 0], vec![6, 4, 0], vec![0, 0, 5], vec![2, 2, 5]];
        let s = smith(a.clone(), 3);
        let mut prod: i128 = s.diag.iter().product();
        prod = prod.abs();
        // The row lattice has basis (2,2,0), (0,2,0), (0,0,5): index 20.
        assert_eq!(prod, 20);
        assert!(s.diag.windows(2).all(|w| w[1] % w[0] == 0));
        assert_eq!(matmul(&s.v, &s.v_inv), identity(3));
    }
}
