//! Dense rational matrices: inversion and definiteness tests.

use super::Rational;

pub type Matrix = Vec<Vec<Rational>>;

/// Gauss-Jordan inverse; `None` for singular input.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip()?;
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= &(&factor * p);
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn determinant(m: &Matrix) -> Rational {
    let n = m.len();
    let mut a = m.clone();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= &a[col][col];
        for r in col + 1..n {
            let factor = &a[r][col] / &a[col][col];
            let pivot_row = a[col].clone();
            for (x, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                *x -= &(&factor * p);
            }
        }
    }
    det
}

/// Sylvester's criterion applied to `-m`. The empty matrix counts as definite.
pub fn is_negative_definite(m: &Matrix) -> bool {
    let n = m.len();
    (1..=n).all(|k| {
        let minor: Matrix = m[..k].iter().map(|row| row[..k].iter().map(|x| -x).collect()).collect();
        determinant(&minor).is_positive()
    })
}

pub fn mat_vec(m: &Matrix, x: &[Rational]) -> Vec<Rational> {
    m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::r;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| Rational::from_int(x)).collect()).collect()
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m(&[&[-1, 1, 1], &[1, -1, 1], &[1, 1, -1]]);
        let inv = inverse(&a).unwrap();
        let x = vec![r!(1), r!(2), r!(3)];
        assert_eq!(mat_vec(&a, &mat_vec(&inv, &x)), x);
        assert_eq!(determinant(&a), r!(4));
    }

    #[test]
    fn singular_and_definiteness() {
        let fiber = m(&[&[-1, 1], &[1, -1]]);
        assert!(inverse(&fiber).is_none());
        assert!(!is_negative_definite(&fiber));
        assert!(is_negative_definite(&m(&[&[-1, 0], &[0, -2]])));
        assert!(is_negative_definite(&Vec::new()));
    }
}
