//! Smith normal form and integer kernels.

use crate::IMat;

/// Result of `smith_normal_form`: `u * m * v == s`.
#[derive(Clone, Debug, PartialEq)]
pub struct Smith {
    pub u: IMat,
    pub s: IMat,
    pub v: IMat,
    pub u_inv: IMat,
    pub v_inv: IMat,
}

impl Smith {
    /// Diagonal entries of `s` (length min(rows, cols)).
    pub fn diag(&self) -> Vec<i64> {
        let k = self.s.len().min(self.s.first().map_or(0, |r| r.len()));
        (0..k).map(|i| self.s[i][i]).collect()
    }
}

fn ident(n: usize) -> Vec<Vec<i128>> {
    (0..n)
        .map(|i| (0..n).map(|j| (i == j) as i128).collect())
        .collect()
}

fn narrow(m: Vec<Vec<i128>>) -> IMat {
    m.into_iter()
        .map(|r| {
            r.into_iter()
                .map(|x| i64::try_from(x).expect("smith form entry overflow"))
                .collect()
        })
        .collect()
}

struct Work {
    a: Vec<Vec<i128>>,
    u: Vec<Vec<i128>>,
    ui: Vec<Vec<i128>>,
    v: Vec<Vec<i128>>,
    vi: Vec<Vec<i128>>,
}

impl Work {
    // row_i += k * row_j
    fn add_row(&mut self, i: usize, j: usize, k: i128) {
        if k == 0 {
            return;
        }
        for c in 0..self.a[0].len() {
            self.a[i][c] += k * self.a[j][c];
        }
        for c in 0..self.u.len() {
            self.u[i][c] += k * self.u[j][c];
        }
        for r in 0..self.ui.len() {
            self.ui[r][j] -= k * self.ui[r][i];
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        self.u.swap(i, j);
        for r in self.ui.iter_mut() {
            r.swap(i, j);
        }
    }

    fn neg_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -*x;
        }
        for x in self.u[i].iter_mut() {
            *x = -*x;
        }
        for r in self.ui.iter_mut() {
            r[i] = -r[i];
        }
    }

    // col_i += k * col_j
    fn add_col(&mut self, i: usize, j: usize, k: i128) {
        if k == 0 {
            return;
        }
        for r in self.a.iter_mut() {
            r[i] += k * r[j];
        }
        for r in self.v.iter_mut() {
            r[i] += k * r[j];
        }
        for c in 0..self.vi[0].len() {
            self.vi[j][c] -= k * self.vi[i][c];
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in self.a.iter_mut() {
            r.swap(i, j);
        }
        for r in self.v.iter_mut() {
            r.swap(i, j);
        }
        self.vi.swap(i, j);
    }
}

/// Smith normal form of an integer matrix: unimodular `u`, `v` with `u*m*v = s`
/// diagonal, nonnegative, and each diagonal entry dividing the next.
pub fn smith_normal_form(m: &IMat) -> Smith {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut w = Work {
        a: m.iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect(),
        u: ident(rows),
        ui: ident(rows),
        v: ident(cols),
        vi: ident(cols),
    };
    if rows == 0 || cols == 0 {
        return Smith {
            u: narrow(w.u),
            s: narrow(w.a),
            v: narrow(w.v),
            u_inv: narrow(w.ui),
            v_inv: narrow(w.vi),
        };
    }
    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = w.a[i][j];
                    if x != 0 && best.map_or(true, |(bi, bj)| x.abs() < w.a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            w.swap_rows(t, pi);
            w.swap_cols(t, pj);
            let p = w.a[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let q = w.a[i][t].div_euclid(p);
                w.add_row(i, t, -q);
                if w.a[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                let q = w.a[t][j].div_euclid(p);
                w.add_col(j, t, -q);
                if w.a[t][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| w.a[i][j] % p != 0));
            if let Some(i) = bad {
                w.add_row(t, i, 1);
                continue;
            }
            if p < 0 {
                w.neg_row(t);
            }
            break;
        }
    }
    Smith {
        u: narrow(w.u),
        s: narrow(w.a),
        v: narrow(w.v),
        u_inv: narrow(w.ui),
        v_inv: narrow(w.vi),
    }
}

/// Generators (as columns of the returned matrix, one per entry) of the
/// integer kernel {x : m x = 0}.
pub fn integer_kernel(m: &IMat, cols: usize) -> Vec<Vec<i64>> {
    if m.is_empty() {
        return (0..cols)
            .map(|j| (0..cols).map(|i| (i == j) as i64).collect())
            .collect();
    }
    let sm = smith_normal_form(m);
    let rank = sm.diag().iter().filter(|&&d| d != 0).count();
    (rank..cols)
        .map(|j| (0..cols).map(|i| sm.v[i][j]).collect())
        .collect()
}

pub fn mat_mul(a: &IMat, b: &IMat) -> IMat {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| row.iter().zip(b).map(|(x, br)| x * br[j]).sum())
                .collect()
        })
        .collect()
}

pub fn transpose(a: &IMat, rows_if_empty: usize) -> IMat {
    let cols = a.first().map_or(rows_if_empty, |r| r.len());
    (0..cols).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det2(m: &IMat) -> i64 {
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    #[test]
    fn identity_case() {
        let i = vec![vec![1, 0], vec![0, 1]];
        let sm = smith_normal_form(&i);
        assert_eq!(sm.s, i);
        assert_eq!(sm.u, i);
        assert_eq!(sm.v, i);
    }

    #[test]
    fn two_by_two_example() {
        let m = vec![vec![2, 4], vec![6, 8]];
        let sm = smith_normal_form(&m);
        // invariant factors: d1 = gcd of entries, d1*d2 = |det|
        let g = 2;
        assert_eq!(sm.diag(), vec![g, det2(&m).abs() / g]);
        assert_eq!(mat_mul(&mat_mul(&sm.u, &m), &sm.v), sm.s);
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(smith_normal_form(&vec![vec![0]]).s, vec![vec![0]]);
    }

    #[test]
    fn inverses_are_inverses() {
        let m = vec![vec![3, 5, 7], vec![0, 6, 9], vec![4, 4, 10], vec![1, 0, 2]];
        let sm = smith_normal_form(&m);
        let i4: IMat = (0..4).map(|i| (0..4).map(|j| (i == j) as i64).collect()).collect();
        let i3: IMat = (0..3).map(|i| (0..3).map(|j| (i == j) as i64).collect()).collect();
        assert_eq!(mat_mul(&sm.u, &sm.u_inv), i4);
        assert_eq!(mat_mul(&sm.v, &sm.v_inv), i3);
        assert_eq!(mat_mul(&mat_mul(&sm.u, &m), &sm.v), sm.s);
    }

    #[test]
    fn kernel_is_kernel() {
        let m = vec![vec![2, 4, 6], vec![1, 2, 3]];
        let k = integer_kernel(&m, 3);
        assert_eq!(k.len(), 2);
        for x in k {
            for r in &m {
                assert_eq!(r.iter().zip(&x).map(|(a, b)| a * b).sum::<i64>(), 0);
            }
        }
    }
}
