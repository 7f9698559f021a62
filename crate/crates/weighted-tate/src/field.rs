//! Arithmetic in a prime field `F_p` for word-sized `p`.
//!
//! Elements are canonical residues in `[0, p)` stored as bare `u64`; all
//! operations go through a [`PrimeField`] handle carrying the modulus, so the
//! characteristic stays a runtime parameter.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("division by zero in F_{0}")]
    DivisionByZero(u64),
}

/// The prime field `F_p`. Construction checks primality of `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if is_prime(p) {
            Ok(PrimeField { p })
        } else {
            Err(FieldError::NotPrime(p))
        }
    }

    pub fn modulus(self) -> u64 {
        self.p
    }

    /// Canonical residue of a signed integer.
    pub fn normalize(self, n: i64) -> u64 {
        (n as i128).rem_euclid(self.p as i128) as u64
    }

    pub fn normalize_u64(self, n: u64) -> u64 {
        n % self.p
    }

    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(self, a: u64) -> Result<u64, FieldError> {
        if a == 0 {
            return Err(FieldError::DivisionByZero(self.p));
        }
        // Invariants: r0 = t0*a (mod p), r1 = t1*a (mod p).
        let (mut r0, mut r1) = (self.p as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1, "a is a unit mod a prime");
        Ok(t0.rem_euclid(self.p as i128) as u64)
    }

    pub fn pow(self, a: u64, mut e: u64) -> u64 {
        let mut base = a % self.p;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for `u64` inputs.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // This witness set decides primality for every u64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
