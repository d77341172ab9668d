//! Exact rational helpers: parsing, conversion, elimination.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::RatMat;
use super::NumericsError;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // fall back to a scaled division for huge numerator/denominator pairs
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Parse "3/7", "-2", "0.125", "1e-3", "-4.5E2" into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, NumericsError> {
    let s = s.trim();
    let bad = || NumericsError::Parse(format!("not a rational number: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(NumericsError::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().map_err(|_| bad())? };
    if neg {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Canonical text form: "p" for integers, "p/q" otherwise.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(a: &mut RatMat) -> Vec<usize> {
    let (m, n) = a.shape();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row >= m {
            break;
        }
        let Some(p) = (row..m).find(|&i| !a[(i, col)].is_zero()) else {
            continue;
        };
        if p != row {
            for j in 0..n {
                let tmp = a[(p, j)].clone();
                a[(p, j)] = a[(row, j)].clone();
                a[(row, j)] = tmp;
            }
        }
        let inv = BigRational::one() / a[(row, col)].clone();
        for j in col..n {
            a[(row, j)] = a[(row, j)].clone() * inv.clone();
        }
        for i in 0..m {
            if i == row || a[(i, col)].is_zero() {
                continue;
            }
            let f = a[(i, col)].clone();
            for j in col..n {
                let delta = f.clone() * a[(row, j)].clone();
                a[(i, j)] = a[(i, j)].clone() - delta;
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn exact_rank(a: &RatMat) -> usize {
    let mut w = a.clone();
    rref(&mut w).len()
}

/// Exact kernel basis: columns spanning {x : Ax = 0}, one per free column of the echelon form.
pub fn rational_nullspace(a: &RatMat) -> RatMat {
    let n = a.cols();
    let mut w = a.clone();
    let pivots = rref(&mut w);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut basis = RatMat::zeros(n, free.len());
    for (k, &f) in free.iter().enumerate() {
        basis[(f, k)] = BigRational::one();
        for (r, &p) in pivots.iter().enumerate() {
            basis[(p, k)] = -w[(r, f)].clone();
        }
    }
    basis
}

/// Solve Ax = b exactly; `None` when inconsistent. Returns one particular solution.
pub fn rational_solve(a: &RatMat, b: &[BigRational]) -> Option<Vec<BigRational>> {
    let (m, n) = a.shape();
    assert_eq!(b.len(), m);
    let aug = RatMat::from_fn(m, n + 1, |i, j| if j < n { a[(i, j)].clone() } else { b[i].clone() });
    let mut w = aug;
    let pivots = rref(&mut w);
    if pivots.contains(&n) {
        return None;
    }
    let mut x = vec![BigRational::zero(); n];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = w[(r, n)].clone();
    }
    Some(x)
}

pub fn abs_max(v: &[BigRational]) -> BigRational {
    v.iter().fold(BigRational::zero(), |m, x| if x.abs() > m { x.abs() } else { m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_fraction_and_decimal_forms() {
        assert_eq!(parse_rational("3/7").unwrap(), rat(3, 7));
        assert_eq!(parse_rational("-0.125").unwrap(), rat(-1, 8));
        assert_eq!(parse_rational("1e-3").unwrap(), rat(1, 1000));
        assert_eq!(parse_rational("4.5E2").unwrap(), int(450));
        assert_eq!(parse_rational("12").unwrap(), int(12));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn format_is_canonical() {
        assert_eq!(format_rational(&rat(6, -4)), "-3/2");
        assert_eq!(format_rational(&int(5)), "5");
        assert_eq!(parse_rational(&format_rational(&rat(-22, 7))).unwrap(), rat(-22, 7));
    }

    #[test]
    fn nullspace_examples() {
        let id = RatMat::identity(2);
        assert_eq!(rational_nullspace(&id).cols(), 0);
        let row = RatMat::from_rows(&[vec![int(1), int(1)]]);
        let k = rational_nullspace(&row);
        assert_eq!(k.cols(), 1);
        assert_eq!(k.col(0), vec![int(-1), int(1)]);
        assert_eq!(rational_nullspace(&RatMat::zeros(2, 3)).cols(), 3);
    }

    #[test]
    fn solve_detects_inconsistency() {
        let a = RatMat::from_rows(&[vec![int(1), int(1)], vec![int(2), int(2)]]);
        assert!(rational_solve(&a, &[int(1), int(3)]).is_none());
        let x = rational_solve(&a, &[int(1), int(2)]).unwrap();
        assert_eq!(x[0].clone() + x[1].clone(), int(1));
    }

    proptest! {
        #[test]
        fn rank_nullity(rows in 1usize..=8, cols in 1usize..=8, entries in proptest::collection::vec(-3i64..=3, 64)) {
            let a = RatMat::from_fn(rows, cols, |i, j| int(entries[i * 8 + j]));
            let k = rational_nullspace(&a);
            prop_assert_eq!(k.cols() + exact_rank(&a), cols);
            let prod = &a * &k;
            prop_assert!(prod.data().iter().all(|v| v.is_zero()));
        }
    }
}
