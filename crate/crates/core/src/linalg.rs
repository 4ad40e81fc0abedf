//! Exact linear algebra over a multiquadratic coefficient field, with
//! vectors stored as rows.

use crate::arithmetic::{CoeffElement, CoeffFieldRef};
use crate::error::{Error, Result};
use crate::exec::{for_each_mut, Exec};

pub type Vector = Vec<CoeffElement>;

/// Reduced row echelon form of a list of rows.
#[derive(Clone, Debug)]
pub struct Echelon {
    /// Nonzero reduced rows, one per pivot.
    pub rows: Vec<Vector>,
    /// Pivot column of each row, increasing.
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Gauss-Jordan elimination. The pivot in each column is the first
/// available row, so the output is independent of the execution policy.
pub fn rref(rows: &[Vector], ncols: usize, exec: Exec) -> Echelon {
    let mut m: Vec<Vector> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(i) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, i);
        let inv = m[r][col].inv().expect("nonzero pivot");
        let pivot_row: Vector = m[r].iter().map(|x| x * &inv).collect();
        for_each_mut(exec, &mut m, |i, row| {
            if i == r {
                *row = pivot_row.clone();
                return;
            }
            let c = row[col].clone();
            if c.is_zero() {
                return;
            }
            for (j, x) in row.iter_mut().enumerate().skip(col) {
                let p = &pivot_row[j];
                if !p.is_zero() {
                    *x = &*x - &(&c * p);
                }
            }
        });
        pivots.push(col);
        r += 1;
    }
    m.truncate(r);
    Echelon { rows: m, pivots, ncols }
}

pub fn rank(rows: &[Vector], ncols: usize, exec: Exec) -> usize {
    rref(rows, ncols, exec).rank()
}

/// Basis of `{x : row·x = 0 for every row}`.
pub fn nullspace(rows: &[Vector], ncols: usize, field: &CoeffFieldRef, exec: Exec) -> Vec<Vector> {
    let e = rref(rows, ncols, exec);
    let mut out = Vec::new();
    let mut is_pivot = vec![false; ncols];
    for &p in &e.pivots {
        is_pivot[p] = true;
    }
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut x = vec![field.zero(); ncols];
        x[free] = field.one();
        for (row, &p) in e.rows.iter().zip(&e.pivots) {
            x[p] = -&row[free];
        }
        out.push(x);
    }
    out
}

/// Columns-as-vectors to rows: `result[i][j] = vectors[j][i]`.
pub fn transpose(vectors: &[Vector], len: usize) -> Vec<Vector> {
    (0..len).map(|i| vectors.iter().map(|v| v[i].clone()).collect()).collect()
}

/// Linear relations `x` with `Σ x_j v_j = 0`.
pub fn relations(vectors: &[Vector], len: usize, field: &CoeffFieldRef, exec: Exec) -> Vec<Vector> {
    nullspace(&transpose(vectors, len), vectors.len(), field, exec)
}

/// A basis (reduced rows) of the span of the vectors.
pub fn span_basis(vectors: &[Vector], len: usize, exec: Exec) -> Vec<Vector> {
    rref(vectors, len, exec).rows
}

/// Coefficients `x` with `Σ x_j v_j = target`, if any.
pub fn solve(vectors: &[Vector], target: &Vector, field: &CoeffFieldRef, exec: Exec) -> Option<Vector> {
    let len = target.len();
    let mut cols = vectors.to_vec();
    cols.push(target.clone());
    let e = rref(&transpose(&cols, len), cols.len(), exec);
    let last = vectors.len();
    if e.pivots.contains(&last) {
        return None;
    }
    let mut x = vec![field.zero(); vectors.len()];
    for (row, &p) in e.rows.iter().zip(&e.pivots) {
        x[p] = row[last].clone();
    }
    Some(x)
}

/// `Σ x_j v_j`.
pub fn combine(coeffs: &[CoeffElement], vectors: &[Vector], len: usize, field: &CoeffFieldRef) -> Vector {
    let mut out = vec![field.zero(); len];
    for (c, v) in coeffs.iter().zip(vectors) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v) {
            if !x.is_zero() {
                *o = &*o + &(c * x);
            }
        }
    }
    out
}

/// The intersection of two spans, as pairs of coefficient vectors
/// `(x, y)` with `Σ x_i a_i = Σ y_j b_j`, one pair per basis vector of
/// the intersection.
pub fn intersection_coefficients(
    a: &[Vector],
    b: &[Vector],
    len: usize,
    field: &CoeffFieldRef,
    exec: Exec,
) -> Result<Vec<(Vector, Vector)>> {
    if a.iter().chain(b).any(|v| v.len() != len) {
        return Err(Error::Validation { invariant: "vector length".into(), msg: format!("expected {len}") });
    }
    let mut cols: Vec<Vector> = a.to_vec();
    cols.extend(b.iter().map(|v| v.iter().map(|x| -x).collect::<Vector>()));
    let kernel = relations(&cols, len, field, exec);
    // Drop kernel vectors that only encode dependencies inside `a`.
    let p = a.len();
    let mut images: Vec<Vector> = Vec::new();
    let mut out = Vec::new();
    for k in kernel {
        let x = k[..p].to_vec();
        let y = k[p..].to_vec();
        let v = combine(&x, a, len, field);
        let mut trial = images.clone();
        trial.push(v.clone());
        if rank(&trial, len, exec) > images.len() {
            images.push(v);
            out.push((x, y));
        }
    }
    Ok(out)
}

/// Basis of `span(a) ∩ span(b)`.
pub fn intersect(a: &[Vector], b: &[Vector], len: usize, field: &CoeffFieldRef, exec: Exec) -> Result<Vec<Vector>> {
    Ok(intersection_coefficients(a, b, len, field, exec)?
        .into_iter()
        .map(|(x, _)| combine(&x, a, len, field))
        .collect())
}

/// Characteristic polynomial of a square matrix (Faddeev-LeVerrier),
/// coefficients from the constant term up, monic.
pub fn charpoly(m: &[Vector], field: &CoeffFieldRef) -> Vec<CoeffElement> {
    let n = m.len();
    let matmul = |a: &[Vector], b: &[Vector]| -> Vec<Vector> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut acc = field.zero();
                        for k in 0..n {
                            acc = &acc + &(&a[i][k] * &b[k][j]);
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    };
    let mut coeffs = vec![field.zero(); n + 1];
    coeffs[n] = field.one();
    let mut mk: Vec<Vector> = (0..n).map(|_| vec![field.zero(); n]).collect();
    for k in 1..=n {
        // M_k = A·M_{k-1} + c_{n-k+1}·I, c_{n-k} = -tr(A·M_k)/k.
        let mut next = matmul(m, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] = &row[i] + &coeffs[n - k + 1];
        }
        mk = next;
        let am = matmul(m, &mk);
        let mut tr = field.zero();
        for (i, row) in am.iter().enumerate() {
            tr = &tr + &row[i];
        }
        coeffs[n - k] = -&tr.scale(&crate::Rational::new(1.into(), (k as i64).into()));
    }
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::CoeffField;
    use crate::Rational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rnd(rng: &mut ChaCha8Rng, k: &CoeffFieldRef) -> CoeffElement {
        let coords = (0..k.degree()).map(|_| Rational::from_integer(rng.gen_range(-3i64..=3).into())).collect();
        k.element(coords).unwrap()
    }

    #[test]
    fn nullspace_is_annihilated() {
        let k = CoeffField::new(vec![-3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rows: Vec<Vector> = (0..3).map(|_| (0..6).map(|_| rnd(&mut rng, &k)).collect()).collect();
        let ns = nullspace(&rows, 6, &k, Exec::Sequential);
        assert_eq!(ns.len(), 6 - rank(&rows, 6, Exec::Sequential));
        for x in &ns {
            for r in &rows {
                let dot = r.iter().zip(x).fold(k.zero(), |acc, (a, b)| &acc + &(a * b));
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn solve_recovers_combination() {
        let k = CoeffField::new(vec![5, -3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let vs: Vec<Vector> = (0..3).map(|_| (0..5).map(|_| rnd(&mut rng, &k)).collect()).collect();
        let x: Vector = (0..3).map(|_| rnd(&mut rng, &k)).collect();
        let t = combine(&x, &vs, 5, &k);
        let sol = solve(&vs, &t, &k, Exec::Parallel).unwrap();
        assert_eq!(combine(&sol, &vs, 5, &k), t);
        let off: Vector = (0..5).map(|i| if i == 0 { k.one() } else { k.zero() }).collect();
        let mut ws = vs.clone();
        ws.truncate(1);
        if rank(&[ws[0].clone(), off.clone()], 5, Exec::Sequential) == 2 {
            assert!(solve(&ws, &off, &k, Exec::Sequential).is_none());
        }
    }

    #[test]
    fn intersection_of_planes() {
        let k = CoeffField::rationals();
        let v = |xs: [i64; 3]| xs.iter().map(|&x| k.from_int(x)).collect::<Vector>();
        let a = vec![v([1, 0, 0]), v([0, 1, 0])];
        let b = vec![v([0, 1, 0]), v([0, 0, 1])];
        let i = intersect(&a, &b, 3, &k, Exec::Sequential).unwrap();
        assert_eq!(i.len(), 1);
        assert_eq!(span_basis(&i, 3, Exec::Sequential), vec![v([0, 1, 0])]);
        assert!(intersect(&[], &b, 3, &k, Exec::Sequential).unwrap().is_empty());
    }

    #[test]
    fn charpoly_of_companion() {
        let k = CoeffField::rationals();
        // Companion matrix of x² - 3x + 2.
        let m = vec![vec![k.from_int(0), k.from_int(-2)], vec![k.from_int(1), k.from_int(3)]];
        let p = charpoly(&m, &k);
        assert_eq!(p, vec![k.from_int(2), k.from_int(-3), k.one()]);
    }
}
