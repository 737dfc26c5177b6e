//! Gaussian expectations under the product measure `μ_{K,M}`.
//!
//! The variables are independent standard normals, so a monomial factors
//! into one-dimensional moments `E[x^{2m}] = (2m-1)!!` and `E[x^{2m+1}] = 0`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::polynomial::{LatticePolynomial, Monomial};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest monomial degree accepted by [`gaussian_expectation`].
pub const DEFAULT_DEGREE_CAP: u32 = 12;

/// `E[x^e]` for a standard normal `x`.
pub fn gaussian_moment(e: u32) -> BigInt {
    if e % 2 == 1 {
        return BigInt::zero();
    }
    (1..e).step_by(2).fold(BigInt::one(), |acc, f| acc * BigInt::from(f))
}

fn monomial_expectation(m: &Monomial) -> BigInt {
    m.powers().iter().fold(BigInt::one(), |acc, &(_, e)| {
        if acc.is_zero() {
            acc
        } else {
            acc * gaussian_moment(e)
        }
    })
}

pub fn gaussian_expectation(f: &LatticePolynomial) -> Result<Rational> {
    gaussian_expectation_with_cap(f, DEFAULT_DEGREE_CAP)
}

pub fn gaussian_expectation_with_cap(f: &LatticePolynomial, cap: u32) -> Result<Rational> {
    let mut total = Rational::zero();
    for (m, c) in f.terms() {
        let degree = m.degree();
        if degree > cap {
            return Err(Error::DegreeCapExceeded { degree, cap });
        }
        let moment = monomial_expectation(m);
        if !moment.is_zero() {
            total += c * Rational::from_integer(moment);
        }
    }
    Ok(total)
}
