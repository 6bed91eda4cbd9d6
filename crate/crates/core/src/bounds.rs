//! Upper bounds on the systematic length `k` of linear systematic-repair MSR
//! codes, and lower bounds on the dimension of sums of repair subspaces.
//!
//! Floors of logarithms are computed by comparing exact integer powers, never
//! by floating logs. Real-valued bounds are reported un-floored alongside the
//! integer floor that actually constrains `k`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Estimate of the standard-partition size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum LambdaEstimate {
    /// `λ = r`, reached when `t = r`.
    Exact(u64),
    /// `λ ≤ t + 1 + ⌊log_{r/(r-1)}((r - t) l / r)⌋` for `t < r`.
    UpperBound(u64),
}

impl LambdaEstimate {
    pub fn value(self) -> u64 {
        match self {
            LambdaEstimate::Exact(v) | LambdaEstimate::UpperBound(v) => v,
        }
    }
}

fn as_string<T: std::fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub l: u64,
    pub r: u64,
    /// `t = ⌈r² / l⌉`.
    pub t: u64,
    pub lambda: LambdaEstimate,
    /// The partition-size estimate with the logarithm left un-floored.
    pub lambda_real: f64,
    /// `(l² - 1) / (r - 1)`.
    #[serde(serialize_with = "as_string")]
    pub quadratic: BigRational,
    pub quadratic_floor: u64,
    /// `2 λ log_r l` with the un-floored `λ`.
    pub rlog_real: f64,
    /// `⌊2 λ log_r l⌋` with the integer `λ`; strict (`k <`) when `λ` does not divide `k`.
    pub rlog_floor: u64,
    /// `l · C(l, l/r)`.
    #[serde(serialize_with = "as_string")]
    pub prior_tamo: BigUint,
    /// `l²`.
    pub prior_goparaju_quadratic: u64,
    /// `⌊log_{r/(r-1)} l⌋ + 1`.
    pub prior_goparaju_lambda: u64,
    /// `2 λ₂ log₂ l` with the un-floored `λ₂ = log_{r/(r-1)} l + 1`.
    pub prior_goparaju_log_real: f64,
    /// `⌊2 λ₂ log₂ l⌋` with the integer `λ₂`.
    pub prior_goparaju_log_floor: u64,
}

/// Exact lower bounds on `dim ⊎_{i ∈ F} S_i` for `|F| = m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimBounds {
    #[serde(serialize_with = "as_string")]
    pub thm3: BigRational,
    #[serde(serialize_with = "as_string")]
    pub eq29: BigRational,
}

fn check_lr(l: u64, r: u64) -> Result<()> {
    if r < 2 {
        return Err(Error::Param(format!("r = {r} must be at least 2")));
    }
    if l == 0 || !l.is_multiple_of(r) {
        return Err(Error::Param(format!("r = {r} does not divide l = {l}")));
    }
    Ok(())
}

/// `t = ⌈r² / l⌉`.
pub fn t_param(l: u64, r: u64) -> Result<u64> {
    check_lr(l, r)?;
    Ok((r * r).div_ceil(l))
}

/// Largest integer `i` with `(num/den)^i ≤ x_num/x_den`, for a base `> 1`.
pub fn floor_log_ratio(num: u64, den: u64, x_num: &BigUint, x_den: &BigUint) -> i64 {
    assert!(num > den && den > 0, "base must exceed 1");
    assert!(!x_num.is_zero() && !x_den.is_zero(), "argument must be positive");
    // invariant: (num/den)^i = pn / pd
    let (num, den) = (BigUint::from(num), BigUint::from(den));
    let le = |pn: &BigUint, pd: &BigUint| pn * x_den <= x_num * pd;
    let (mut pn, mut pd) = (BigUint::one(), BigUint::one());
    let mut i = 0i64;
    if le(&pn, &pd) {
        loop {
            let (nn, nd) = (&pn * &num, &pd * &den);
            if !le(&nn, &nd) {
                return i;
            }
            pn = nn;
            pd = nd;
            i += 1;
        }
    } else {
        loop {
            pn *= &den;
            pd *= &num;
            i -= 1;
            if le(&pn, &pd) {
                return i;
            }
        }
    }
}

/// `⌊log_{r/(r-1)} x⌋` for a rational `x ≥ 1`.
fn floor_log_shrink(r: u64, x_num: u64, x_den: u64) -> u64 {
    let v = floor_log_ratio(r, r - 1, &BigUint::from(x_num), &BigUint::from(x_den));
    u64::try_from(v).expect("argument is at least 1")
}

/// Largest `K` with `base^K ≤ x`.
fn floor_log_int(base: u64, x: &BigUint) -> u64 {
    let b = BigUint::from(base);
    let mut p = b.clone();
    let mut k = 0;
    while &p <= x {
        p *= &b;
        k += 1;
    }
    k
}

/// `log_base x` in floating point, exact when `x` is a power of `base`.
fn log_exact(base: u64, x: u64) -> f64 {
    let mut p = 1u64;
    let mut e = 0;
    while p < x {
        match p.checked_mul(base) {
            Some(next) => p = next,
            None => break,
        }
        e += 1;
    }
    if p == x {
        f64::from(e)
    } else {
        (x as f64).ln() / (base as f64).ln()
    }
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn evaluate_bounds(l: u64, r: u64) -> Result<BoundReport> {
    check_lr(l, r)?;
    let t = (r * r).div_ceil(l);
    let shrink_ln = (r as f64 / (r - 1) as f64).ln();
    let ln_l = (l as f64).ln();

    let goparaju_lambda = floor_log_shrink(r, l, 1) + 1;
    let goparaju_lambda_real = 1.0 + ln_l / shrink_ln;

    let (lambda, lambda_real) = if t == r {
        (LambdaEstimate::Exact(r), r as f64)
    } else if t == 1 {
        // t + 1 + ⌊log((r-1) l / r)⌋ collapses to 1 + ⌊log l⌋
        (LambdaEstimate::UpperBound(goparaju_lambda), goparaju_lambda_real)
    } else {
        let x_num = (r - t) * l;
        let (x_num, x_den) = (x_num / x_num.gcd(&r), r / x_num.gcd(&r));
        let v = t + 1 + floor_log_shrink(r, x_num, x_den);
        let real = (t + 1) as f64 + ((r - t) as f64 * l as f64 / r as f64).ln() / shrink_ln;
        (LambdaEstimate::UpperBound(v), real)
    };

    let log_r_l = log_exact(r, l);
    let log_2_l = log_exact(2, l);
    let lam = lambda.value();
    let l_big = BigUint::from(l);

    let quadratic = BigRational::new((l * l - 1).into(), (r - 1).into());
    let quadratic_floor = (l * l - 1) / (r - 1);

    Ok(BoundReport {
        l,
        r,
        t,
        lambda,
        lambda_real,
        quadratic,
        quadratic_floor,
        rlog_real: 2.0 * lambda_real * log_r_l,
        rlog_floor: floor_log_int(r, &l_big.pow(2 * lam as u32)),
        prior_tamo: &l_big * binomial(l, l / r),
        prior_goparaju_quadratic: l * l,
        prior_goparaju_lambda: goparaju_lambda,
        prior_goparaju_log_real: 2.0 * goparaju_lambda_real * log_2_l,
        prior_goparaju_log_floor: floor_log_int(2, &l_big.pow(2 * goparaju_lambda as u32)),
    })
}

fn ratio(n: u64, d: u64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Dimension lower bounds for a set of `m` repair subspaces.
///
/// `thm3 = m l / r` when `m ≤ t`, else `l - (l/r)(r - t)((r-1)/r)^(m-t)`;
/// `eq29 = (1 - ((r-1)/r)^m) l`.
pub fn dim_lower_bound(m: u64, l: u64, r: u64) -> Result<DimBounds> {
    check_lr(l, r)?;
    if m == 0 {
        return Err(Error::Param("m must be at least 1".into()));
    }
    let t = (r * r).div_ceil(l);
    let shrink = ratio(r - 1, r);
    let lr = ratio(l, r);
    let thm3 = if m <= t {
        ratio(m * l, r)
    } else {
        let e = i32::try_from(m - t).map_err(|_| Error::Param("m too large".into()))?;
        ratio(l, 1) - lr * ratio(r - t, 1) * num_traits::pow::Pow::pow(&shrink, e)
    };
    let mi = i32::try_from(m).map_err(|_| Error::Param("m too large".into()))?;
    let eq29 = (BigRational::one() - num_traits::pow::Pow::pow(&shrink, mi)) * ratio(l, 1);
    Ok(DimBounds { thm3, eq29 })
}

/// Ceiling of a non-negative rational as an integer.
pub fn ceil_u64(x: &BigRational) -> u64 {
    x.ceil().to_integer().to_u64().expect("non-negative bound")
}

/// Every valid `(l, r)` cell with `l` ascending, then `r` ascending.
pub fn table(
    ls: impl IntoIterator<Item = u64>,
    rs: impl IntoIterator<Item = u64> + Clone,
) -> Vec<BoundReport> {
    use rayon::prelude::*;
    let cells: Vec<(u64, u64)> = ls
        .into_iter()
        .flat_map(|l| rs.clone().into_iter().map(move |r| (l, r)))
        .filter(|&(l, r)| r >= 2 && l > 0 && l % r == 0)
        .collect();
    cells
        .par_iter()
        .map(|&(l, r)| evaluate_bounds(l, r).expect("cell filtered to valid parameters"))
        .collect()
}
