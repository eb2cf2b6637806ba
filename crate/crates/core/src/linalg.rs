//! Gaussian elimination over the rational-function field of the parameters.
//!
//! Pivots must be nonzero constants or products of factors the caller has
//! declared non-vanishing; anything else raises a genericity error instead of
//! silently assuming a generic point.

use crate::error::{Error, Result};
use crate::poly::{Coeff, Field};
use crate::ratexpr::{Locus, RatExpr};

pub type Mat = Vec<Vec<RatExpr>>;

fn pivot_rank(x: &RatExpr, locus: &Locus) -> Option<u8> {
    if x.is_zero() {
        None
    } else if x.as_rational().is_some() {
        Some(0)
    } else if locus.is_safe(x) {
        Some(1)
    } else {
        Some(2)
    }
}

fn genericity(x: &RatExpr) -> Error {
    Error::Genericity {
        pivot: x.to_string(),
    }
}

fn eliminate(rows: &mut Mat, pr: usize, pc: usize, from_all: bool) {
    let inv = rows[pr][pc].inverse().expect("nonzero pivot");
    let prow: Vec<RatExpr> = rows[pr].iter().map(|x| x.times(&inv)).collect();
    rows[pr] = prow.clone();
    for r in 0..rows.len() {
        if r == pr || (!from_all && r < pr) {
            continue;
        }
        let f = rows[r][pc].clone();
        if f.is_zero() {
            continue;
        }
        for c in 0..prow.len() {
            if !prow[c].is_zero() {
                rows[r][c] = rows[r][c].minus(&f.times(&prow[c]));
            }
        }
    }
}

/// Gauss-Jordan with complete pivoting. Returns the reduced rows and the
/// pivot column of each reduced row.
fn full_reduce(m: &Mat, locus: &Locus) -> Result<(Mat, Vec<usize>)> {
    let mut rows = m.clone();
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut done = 0;
    loop {
        let mut best: Option<(u8, usize, usize)> = None;
        let mut unsafe_seen: Option<RatExpr> = None;
        for r in done..rows.len() {
            for c in 0..ncols {
                if pivots.contains(&c) {
                    continue;
                }
                match pivot_rank(&rows[r][c], locus) {
                    Some(2) => {
                        unsafe_seen.get_or_insert_with(|| rows[r][c].clone());
                    }
                    Some(k) if best.is_none_or(|b| k < b.0) => best = Some((k, r, c)),
                    _ => {}
                }
            }
        }
        match best {
            Some((_, r, c)) => {
                rows.swap(done, r);
                eliminate(&mut rows, done, c, true);
                pivots.push(c);
                done += 1;
            }
            None => {
                if let Some(x) = unsafe_seen {
                    return Err(genericity(&x));
                }
                break;
            }
        }
    }
    rows.truncate(done);
    Ok((rows, pivots))
}

pub fn rank(m: &Mat, locus: &Locus) -> Result<usize> {
    Ok(full_reduce(m, locus)?.1.len())
}

/// Basis of `{x : m·x = 0}`.
pub fn kernel(m: &Mat, ncols: usize, locus: &Locus) -> Result<Mat> {
    if m.is_empty() {
        return Ok(identity(ncols));
    }
    let (rows, pivots) = full_reduce(m, locus)?;
    let mut out = Vec::new();
    for f in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![RatExpr::zero(); ncols];
        v[f] = RatExpr::one();
        for (row, &pc) in rows.iter().zip(&pivots) {
            v[pc] = row[f].negated();
        }
        out.push(v);
    }
    Ok(out)
}

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        RatExpr::one()
                    } else {
                        RatExpr::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Canonical reduced row-echelon basis of the row span.
pub fn rref(vectors: &Mat, locus: &Locus) -> Result<Mat> {
    echelon(vectors, locus, false)
}

/// Like [`rref`], but a column whose only candidate pivots need an undeclared
/// assumption is skipped instead of rejected. Agrees with [`rref`] whenever
/// that succeeds; fails only if some row is left without a safe pivot.
pub fn safe_echelon(vectors: &Mat, locus: &Locus) -> Result<Mat> {
    echelon(vectors, locus, true)
}

fn echelon(vectors: &Mat, locus: &Locus, skip_unsafe: bool) -> Result<Mat> {
    let mut rows: Mat = vectors
        .iter()
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut done = 0;
    for c in 0..ncols {
        if done == rows.len() {
            break;
        }
        let mut best: Option<(u8, usize)> = None;
        let mut unsafe_seen = None;
        for (r, row) in rows.iter().enumerate().skip(done) {
            match pivot_rank(&row[c], locus) {
                Some(2) => {
                    unsafe_seen.get_or_insert(r);
                }
                Some(k) if best.is_none_or(|b| k < b.0) => best = Some((k, r)),
                _ => {}
            }
        }
        let r = match (best, unsafe_seen) {
            (Some((_, r)), _) => r,
            (None, Some(_)) if skip_unsafe => continue,
            (None, Some(r)) => return Err(genericity(&rows[r][c])),
            (None, None) => continue,
        };
        rows.swap(done, r);
        eliminate(&mut rows, done, c, true);
        done += 1;
    }
    if let Some(x) = rows[done..].iter().flatten().find(|x| !x.is_zero()) {
        return Err(genericity(x));
    }
    rows.truncate(done);
    Ok(rows)
}

pub fn invert(m: &Mat, locus: &Locus) -> Result<Mat> {
    let n = m.len();
    let mut aug: Mat = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    RatExpr::one()
                } else {
                    RatExpr::zero()
                }
            }));
            r
        })
        .collect();
    for c in 0..n {
        let mut best: Option<(u8, usize)> = None;
        let mut unsafe_seen = None;
        for (r, row) in aug.iter().enumerate().skip(c) {
            match pivot_rank(&row[c], locus) {
                Some(2) => {
                    unsafe_seen.get_or_insert(r);
                }
                Some(k) if best.is_none_or(|b| k < b.0) => best = Some((k, r)),
                _ => {}
            }
        }
        let r = match (best, unsafe_seen) {
            (Some((_, r)), _) => r,
            (None, Some(r)) => return Err(genericity(&aug[r][c])),
            (None, None) => return Err(Error::Domain("singular matrix".into())),
        };
        aug.swap(c, r);
        eliminate(&mut aug, c, c, true);
    }
    Ok(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec(m: &Mat, v: &[RatExpr]) -> Vec<RatExpr> {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn dot(a: &[RatExpr], b: &[RatExpr]) -> RatExpr {
    a.iter().zip(b).fold(RatExpr::zero(), |acc, (x, y)| {
        if x.is_zero() || y.is_zero() {
            acc
        } else {
            acc.plus(&x.times(y))
        }
    })
}

pub fn transpose(m: &Mat) -> Mat {
    let n = m.first().map(|r| r.len()).unwrap_or(0);
    (0..n)
        .map(|j| m.iter().map(|r| r[j].clone()).collect())
        .collect()
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let bt = transpose(b);
    a.iter()
        .map(|r| bt.iter().map(|c| dot(r, c)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> RatExpr {
        RatExpr::int(n)
    }

    #[test]
    fn rational_kernel() {
        let m = vec![vec![r(1), r(2), r(3)], vec![r(2), r(4), r(6)]];
        let k = kernel(&m, 3, &Locus::new()).unwrap();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(mat_vec(&m, v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn undeclared_pivot_is_reported() {
        let a = RatExpr::param("a");
        let m = vec![vec![a.clone(), r(0)], vec![r(0), a.clone()]];
        assert!(matches!(
            rank(&m, &Locus::new()),
            Err(Error::Genericity { .. })
        ));
        assert_eq!(rank(&m, &Locus::new().declare_param("a")).unwrap(), 2);
    }

    #[test]
    fn complete_pivoting_avoids_unsafe_entries() {
        let a = RatExpr::param("a");
        let m = vec![vec![a.clone(), r(1)], vec![a.times(&r(2)), r(2)]];
        assert_eq!(rank(&m, &Locus::new()).unwrap(), 1);
    }

    #[test]
    fn inverse_roundtrip() {
        let z = RatExpr::param("z");
        let m = vec![vec![r(1), z.clone()], vec![r(0), z.clone()]];
        let loc = Locus::new().declare_param("z");
        let inv = invert(&m, &loc).unwrap();
        assert_eq!(mat_mul(&m, &inv), identity(2));
    }

    #[test]
    fn safe_echelon_skips_unsafe_columns() {
        let a = RatExpr::param("a");
        let m = vec![vec![r(1), a.clone(), r(0)], vec![r(0), a.clone(), r(1)]];
        assert!(matches!(
            rref(&[m[1].clone(), m[0].clone()].to_vec(), &Locus::new()),
            Err(Error::Genericity { .. })
        ));
        let e = safe_echelon(&m, &Locus::new()).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e[1], vec![r(0), a.clone(), r(1)]);
        let stuck = vec![vec![r(0), a.clone()]];
        assert!(matches!(
            safe_echelon(&stuck, &Locus::new()),
            Err(Error::Genericity { .. })
        ));
        let ok = vec![vec![r(1), r(2)], vec![r(2), r(5)]];
        assert_eq!(
            safe_echelon(&ok, &Locus::new()).unwrap(),
            rref(&ok, &Locus::new()).unwrap()
        );
    }

    #[test]
    fn rref_is_canonical() {
        let a = vec![vec![r(1), r(1), r(0)], vec![r(0), r(1), r(1)]];
        let b = vec![vec![r(1), r(2), r(1)], vec![r(1), r(0), r(-1)]];
        assert_eq!(
            rref(&a, &Locus::new()).unwrap(),
            rref(&b, &Locus::new()).unwrap()
        );
    }
}
