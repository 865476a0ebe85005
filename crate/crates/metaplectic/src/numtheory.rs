//! Jacobi symbols, the folding map `g`, square orbits in the half unit group,
//! class counting and quadratic Gauss sums.
//!
//! Everything here is a pure function of small integers.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};

/// An odd modulus `n >= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OddModulus(i64);

impl OddModulus {
    pub fn new(n: i64) -> Result<Self> {
        if n <= 0 || n % 2 == 0 {
            return Err(Error::EvenModulus(n));
        }
        if n < 3 {
            return Err(Error::SmallModulus(n));
        }
        Ok(OddModulus(n))
    }

    /// The modulus `2p + 1` for rank `p`.
    pub fn from_rank(p: usize) -> Result<Self> {
        Self::new(2 * p as i64 + 1)
    }

    pub fn get(self) -> i64 {
        self.0
    }

    /// `(n - 1) / 2`.
    pub fn half(self) -> i64 {
        (self.0 - 1) / 2
    }

    fn check_coprime(self, a: i64) -> Result<()> {
        if a.gcd(&self.0) != 1 {
            return Err(Error::NotCoprime { value: a, modulus: self.0 });
        }
        Ok(())
    }
}

/// The Jacobi symbol `(j | n)` for odd positive `n`.
pub fn jacobi(j: i64, n: i64) -> Result<i8> {
    if n <= 0 || n % 2 == 0 {
        return Err(Error::EvenModulus(n));
    }
    let mut a = j.rem_euclid(n);
    let mut n = n;
    let mut t = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    Ok(if n == 1 { t } else { 0 })
}

/// `|a'|` where `a'` is the representative of `a` in `[-(n-1)/2, (n-1)/2]`.
pub fn g_reduce(a: i64, n: OddModulus) -> i64 {
    let m = a.rem_euclid(n.0);
    m.min(n.0 - m)
}

/// `Z_n^x / {+1, -1}`, with elements represented by `1 <= a <= (n-1)/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfUnitGroup {
    n: OddModulus,
    reps: Vec<i64>,
}

impl HalfUnitGroup {
    pub fn new(n: OddModulus) -> Self {
        let reps = (1..=n.half()).filter(|a| a.gcd(&n.0) == 1).collect();
        HalfUnitGroup { n, reps }
    }

    pub fn modulus(&self) -> OddModulus {
        self.n
    }

    pub fn reps(&self) -> &[i64] {
        &self.reps
    }

    pub fn order(&self) -> usize {
        self.reps.len()
    }

    pub fn mul(&self, a: i64, b: i64) -> i64 {
        g_reduce((a % self.n.0) * (b % self.n.0), self.n)
    }

    pub fn contains(&self, a: i64) -> bool {
        self.reps.binary_search(&a).is_ok()
    }
}

/// `{ g(r z^2) : z in G }`.
pub fn square_orbit(r: i64, n: OddModulus) -> Result<BTreeSet<i64>> {
    n.check_coprime(r)?;
    let group = HalfUnitGroup::new(n);
    let r = r.rem_euclid(n.0);
    Ok(group.reps().iter().map(|&z| g_reduce(r * (z * z % n.0), n)).collect())
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut m = n;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            let mut e = 0;
            while m.is_multiple_of(d) {
                m /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

/// True iff some `b` satisfies `b^2 = -1 (mod n)`.
///
/// For odd `n` this holds iff every prime factor is `1 mod 4`.
pub fn minus_one_is_square(n: OddModulus) -> bool {
    factorize(n.0 as u64).iter().all(|&(q, _)| q % 4 == 1)
}

/// Number of monoidal classes: `2^(l+1)` if `-1` is a square mod `n`, else `2^l`,
/// with `l` the number of distinct primes dividing `n`.
pub fn count_classes(n: OddModulus) -> u64 {
    let l = factorize(n.0 as u64).len() as u32;
    if minus_one_is_square(n) {
        1 << (l + 1)
    } else {
        1 << l
    }
}

/// `sum_{l=0}^{n-1} exp(-2 pi i r l^2 / n)` by direct summation.
pub fn quadratic_gauss_sum(r: i64, n: OddModulus) -> Result<Complex64> {
    n.check_coprime(r)?;
    let nn = n.0;
    let r = r.rem_euclid(nn);
    // l^2 r is reduced mod n before scaling so the phase stays in [0, 2 pi).
    Ok((0..nn)
        .map(|l| {
            let k = (l * l % nn) * r % nn;
            Complex64::from_polar(1.0, -2.0 * PI * k as f64 / nn as f64)
        })
        .sum())
}

/// `eps_n sqrt(n) (-r | n)` with `eps_n = 1` for `n = 1 mod 4` and `i` for `n = 3 mod 4`.
pub fn gauss_sum_closed_form(r: i64, n: OddModulus) -> Result<Complex64> {
    n.check_coprime(r)?;
    let eps = if n.0 % 4 == 1 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 1.0) };
    let sym = jacobi(-r, n.0)? as f64;
    Ok(eps * (n.0 as f64).sqrt() * sym)
}

/// `prod_{m=1}^{(n-1)/2} sin(2 pi q m / n) / sin(2 pi m / n)`.
pub fn eisenstein_jacobi(q: i64, n: OddModulus) -> Result<f64> {
    n.check_coprime(q)?;
    let nn = n.0;
    let q = q.rem_euclid(nn);
    Ok((1..=n.half())
        .map(|m| {
            let num = (2.0 * PI * (q * m % nn) as f64 / nn as f64).sin();
            let den = (2.0 * PI * m as f64 / nn as f64).sin();
            num / den
        })
        .product())
}

/// `-(-1)^(p(p+1)/2)`.
pub fn s_p_power(p: u64) -> i8 {
    if (p * (p + 1) / 2).is_multiple_of(2) {
        -1
    } else {
        1
    }
}

/// `-(2 | 2p+1)`.
pub fn s_p_jacobi(p: u64) -> i8 {
    -jacobi(2, 2 * p as i64 + 1).expect("2p+1 is odd")
}

/// The common value of [`s_p_power`] and [`s_p_jacobi`].
pub fn s_p(p: u64) -> i8 {
    let v = s_p_power(p);
    debug_assert_eq!(v, s_p_jacobi(p));
    v
}
