//! Primality and factorization of arbitrary-size integers.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

const SMALL_PRIMES: [u32; 25] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];

/// Miller-Rabin with the first 25 prime bases; deterministic below 3.3e24
/// and a probable-prime test above.
pub fn is_prime(n: &BigUint) -> bool {
    let n_u = n.to_u64();
    if let Some(v) = n_u {
        if v < 2 {
            return false;
        }
    }
    for &p in &SMALL_PRIMES {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'bases: for &a in &SMALL_PRIMES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// A nontrivial divisor of the odd composite `n` by Pollard's rho with
/// Brent's cycle detection.
fn pollard_rho(n: &BigUint) -> BigUint {
    let one = BigUint::one();
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r: u64 = 1;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..core::cmp::min(128, r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += 128;
            }
            r *= 2;
        }
        if g == *n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g != one {
                    break;
                }
            }
        }
        if g != *n {
            return g;
        }
        c += 1u32;
    }
}

/// Prime factorization as prime to exponent. Zero and one have none.
pub fn factorize(n: &BigUint) -> BTreeMap<BigUint, u32> {
    let mut out = BTreeMap::new();
    if n.is_zero() {
        return out;
    }
    let mut n = n.clone();
    let mut p: u32 = 2;
    while p < 10_000 {
        let bp = BigUint::from(p);
        if &bp * &bp > n {
            break;
        }
        while (&n % &bp).is_zero() {
            n /= &bp;
            *out.entry(bp.clone()).or_insert(0) += 1;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut stack: Vec<BigUint> = Vec::new();
    if n > BigUint::one() {
        stack.push(n);
    }
    while let Some(m) = stack.pop() {
        if is_prime(&m) {
            *out.entry(m).or_insert(0) += 1;
        } else {
            let d = pollard_rho(&m);
            stack.push(&m / &d);
            stack.push(d);
        }
    }
    out
}

/// Distinct prime divisors in increasing order.
pub fn prime_divisors(n: &BigUint) -> Vec<BigUint> {
    factorize(n).into_keys().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::str::FromStr;

    fn b(s: &str) -> BigUint {
        BigUint::from_str(s).unwrap()
    }

    #[test]
    fn small_primality_matches_trial_division() {
        for n in 0u32..3000 {
            let naive = n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(is_prime(&BigUint::from(n)), naive, "{n}");
        }
    }

    #[test]
    fn carmichael_and_strong_pseudoprimes_rejected() {
        for s in ["561", "3215031751", "3825123056546413051", "318665857834031151167461"] {
            assert!(!is_prime(&b(s)), "{s}");
        }
        assert!(is_prime(&b("170141183460469231731687303715884105727")));
    }

    #[test]
    fn factorization_round_trips() {
        let cases = ["360", "1000000007", "600851475143", "18446744073709551617", "1000000016000000063"];
        for s in cases {
            let n = b(s);
            let f = factorize(&n);
            let back = f.iter().fold(BigUint::one(), |acc, (p, &e)| acc * p.pow(e));
            assert_eq!(back, n);
            assert!(f.keys().all(is_prime));
        }
        let f = factorize(&b("18446744073709551617"));
        assert_eq!(f.keys().cloned().collect::<Vec<_>>(), [b("274177"), b("67280421310721")]);
    }

    #[test]
    fn semiprime_of_two_large_primes() {
        let p = b("1000000000039");
        let q = b("1000000000061");
        assert_eq!(prime_divisors(&(&p * &q)), [p, q]);
    }
}
