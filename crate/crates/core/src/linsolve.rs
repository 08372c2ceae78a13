//! Dense Gaussian elimination over any [`Coefficient`] field.
//!
//! Exact fields pivot on any non-zero entry; floating fields use partial
//! pivoting and treat entries below `1e-12` of the column scale as zero.

use crate::scalar::Coefficient;

fn negligible<T: Coefficient>(v: &T, scale: f64) -> bool {
    if T::EXACT {
        v.is_zero()
    } else {
        v.magnitude() <= 1e-12 * scale.max(f64::MIN_POSITIVE)
    }
}

fn pivot_row<T: Coefficient>(m: &[Vec<T>], col: usize, from: usize, scale: f64) -> Option<usize> {
    let candidates = (from..m.len()).filter(|&r| !negligible(&m[r][col], scale));
    if T::EXACT {
        candidates.min_by_key(|&r| r)
    } else {
        candidates.max_by(|&a, &b| m[a][col].magnitude().total_cmp(&m[b][col].magnitude()))
    }
}

fn scale_of<T: Coefficient>(m: &[Vec<T>]) -> f64 {
    m.iter()
        .flat_map(|row| row.iter().map(|v| v.magnitude()))
        .fold(0.0, f64::max)
}

/// Row-reduces `m` in place and returns the pivot columns.
pub fn row_reduce<T: Coefficient>(m: &mut [Vec<T>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let scale = scale_of(m);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = pivot_row(m, c, r, scale) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inverse().expect("pivot is non-zero");
        for v in m[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for i in 0..rows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let factor = m[i][c].clone();
            for j in 0..cols {
                let delta = factor.clone() * m[r][j].clone();
                m[i][j] = m[i][j].clone() - delta;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<T: Coefficient>(mut m: Vec<Vec<T>>) -> usize {
    row_reduce(&mut m).len()
}

/// Solves the square system `a·x = b`; `None` when `a` is singular.
pub fn solve<T: Coefficient>(a: Vec<Vec<T>>, b: Vec<T>) -> Option<Vec<T>> {
    let n = a.len();
    let mut aug: Vec<Vec<T>> = a
        .into_iter()
        .zip(b)
        .map(|(mut row, rhs)| {
            row.push(rhs);
            row
        })
        .collect();
    let pivots = row_reduce(&mut aug);
    if pivots.len() != n || pivots.last().is_some_and(|&c| c == n) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n].clone()).collect())
}

pub fn determinant<T: Coefficient>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    let scale = scale_of(&m);
    let mut det = T::one();
    for c in 0..n {
        let Some(p) = pivot_row(&m, c, c, scale) else {
            return T::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det = det * m[c][c].clone();
        let inv = m[c][c].inverse().expect("pivot is non-zero");
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let factor = m[i][c].clone() * inv.clone();
            for j in c..n {
                let delta = factor.clone() * m[c][j].clone();
                m[i][j] = m[i][j].clone() - delta;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter()
            .map(|r| r.iter().map(|v| Scalar::int(*v)).collect())
            .collect()
    }

    #[test]
    fn exact_solve_and_det() {
        let a = mat(&[&[2, 1], &[1, 3]]);
        let x = solve(a.clone(), vec![Scalar::int(3), Scalar::int(5)]).unwrap();
        assert_eq!(x, vec![Scalar::ratio(4, 5), Scalar::ratio(7, 5)]);
        assert_eq!(determinant(a), Scalar::int(5));
    }

    #[test]
    fn singular_systems() {
        let a = mat(&[&[1, 2], &[2, 4]]);
        assert!(solve(a.clone(), vec![Scalar::int(1), Scalar::int(1)]).is_none());
        assert_eq!(determinant(a.clone()), Scalar::int(0));
        assert_eq!(rank(a), 1);
    }

    #[test]
    fn float_determinant() {
        let a = vec![vec![0.0, 2.0], vec![3.0, 1.0]];
        assert!((determinant(a) + 6.0).abs() < 1e-12);
    }
}
