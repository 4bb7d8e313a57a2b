//! p-adic valuations and the p-adic distance `p^(-v_p(x - y))`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A p-adic valuation; zero has infinite valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

/// Deterministic trial division. Fine for the word-sized primes used here.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PAdicParams {
    p: u64,
}

impl PAdicParams {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(PAdicParams { p })
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn valuation(&self, q: &Rational) -> Valuation {
        valuation_unchecked(q, &BigInt::from(self.p))
    }

    pub fn dist(&self, x: &Rational, y: &Rational) -> Rational {
        match self.valuation(&(x - y)) {
            Valuation::Infinite => Rational::zero(),
            Valuation::Finite(v) => Rational::pow_int(&BigInt::from(self.p), -v)
                .expect("p is non-zero"),
        }
    }
}

fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (quot, rem) = n.div_rem(p);
        if !rem.is_zero() {
            return v;
        }
        n = quot;
        v += 1;
    }
}

fn valuation_unchecked(q: &Rational, p: &BigInt) -> Valuation {
    if q.is_zero() {
        return Valuation::Infinite;
    }
    Valuation::Finite(int_valuation(q.numer(), p) - int_valuation(q.denom(), p))
}

/// `v_p(q) = v_p(num) - v_p(den)` by repeated exact division.
pub fn padic_valuation(q: &Rational, p: u64) -> Result<Valuation> {
    Ok(PAdicParams::new(p)?.valuation(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn valuations() {
        assert_eq!(padic_valuation(&q("12"), 2).unwrap(), Valuation::Finite(2));
        assert_eq!(padic_valuation(&q("0"), 5).unwrap(), Valuation::Infinite);
        assert_eq!(padic_valuation(&q("2/3"), 3).unwrap(), Valuation::Finite(-1));
        assert_eq!(padic_valuation(&q("-7/40"), 2).unwrap(), Valuation::Finite(-3));
        assert_eq!(padic_valuation(&q("7"), 2).unwrap(), Valuation::Finite(0));
    }

    #[test]
    fn non_primes_rejected() {
        for p in [0, 1, 4, 9, 91, 1_000_000] {
            assert_eq!(padic_valuation(&q("1"), p), Err(Error::NotPrime(p)));
        }
        for p in [2, 3, 5, 7, 97, 7919] {
            assert!(is_prime(p));
        }
    }

    #[test]
    fn distances() {
        let two = PAdicParams::new(2).unwrap();
        assert_eq!(two.dist(&q("0"), &q("12")), q("1/4"));
        assert_eq!(two.dist(&q("5"), &q("5")), q("0"));
        assert_eq!(two.dist(&q("0"), &q("1/8")), q("8"));
        let three = PAdicParams::new(3).unwrap();
        assert_eq!(three.dist(&q("0"), &q("2/3")), q("3"));
    }
}
