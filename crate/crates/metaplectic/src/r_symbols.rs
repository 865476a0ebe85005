//! R-symbols `R_{ab}^c = sigma1 sigma2 exp(i pi (h_a + h_b - h_c))` and their inverse braiding.
//!
//! Scaling dimensions are exact rationals. Sign tables are built from a few base
//! entries and closed under cyclic rotation `(a, b, c) -> (b, c, a)`; entries not
//! reached are `+1`.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::fusion_ring::{key_string, FusionRing, Label, RingAutomorphism};
use crate::numtheory::{g_reduce, jacobi, s_p};
use crate::params::{Params, Sign};

/// `h_a` as an exact rational.
pub fn scaling_dim(a: Label, params: &Params) -> Ratio<i64> {
    let (p, r, n) = (params.p as i64, params.r, params.n());
    match a {
        Label::One => Ratio::from_integer(0),
        Label::Eps => Ratio::from_integer(1),
        Label::Phi(i) => {
            let i = i as i64;
            Ratio::new(r * i * (n - i), 2 * n)
        }
        Label::PsiPlus | Label::PsiMinus => {
            let sym = jacobi(n, r).expect("r is odd and positive") as i64;
            let base = p + params.kappa_i() * s_p(p as u64) as i64 - sym + 2;
            let shift = if a == Label::PsiMinus { 4 } else { 0 };
            Ratio::new(r * (base + shift), 8)
        }
    }
}

fn sigma1_base(a: Label, b: Label, c: Label, params: &Params) -> Option<i8> {
    let p = params.p;
    match (a, b, c) {
        (Label::Phi(i), x, y) if x.is_psi() && y.is_psi() => {
            let negative = if p % 2 == 1 { matches!(i % 4, 1 | 2) } else { matches!(i % 4, 2 | 3) };
            Some(if negative { -1 } else { 1 })
        }
        (Label::Phi(i), Label::Phi(j), Label::Phi(k)) if k as i64 == g_reduce((i + j) as i64, params.modulus()) => {
            Some(if (i * j) % 2 == 0 { 1 } else { -1 })
        }
        _ => None,
    }
}

fn sigma2_base(a: Label, b: Label, c: Label, params: &Params) -> Option<i8> {
    let lhs = matches!(a, Label::Eps | Label::Phi(_));
    if lhs && b.is_psi() && c.is_psi() && b != c {
        Some(if ((params.r - 1) / 2) % 2 == 0 { 1 } else { -1 })
    } else {
        None
    }
}

fn cyclic_close(base: fn(Label, Label, Label, &Params) -> Option<i8>, a: Label, b: Label, c: Label, params: &Params) -> Result<i8> {
    let mut found: Option<i8> = None;
    for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
        if let Some(v) = base(x, y, z, params) {
            match found {
                Some(w) if w != v => return Err(Error::SignConflict(key_string(&[a, b, c]))),
                _ => found = Some(v),
            }
        }
    }
    Ok(found.unwrap_or(1))
}

/// `(sigma1, sigma2)` for an admissible triple.
pub fn sigma_signs(a: Label, b: Label, c: Label, params: &Params) -> Result<(i8, i8)> {
    let ring = FusionRing::new(params.p)?;
    sigma_signs_in(&ring, a, b, c, params)
}

fn sigma_signs_in(ring: &FusionRing, a: Label, b: Label, c: Label, params: &Params) -> Result<(i8, i8)> {
    if ring.multiplicity(a, b, c) == 0 {
        return Err(Error::InadmissibleChannel(format!("R_{{{},{}}}^{{{}}}", a, b, c)));
    }
    Ok((cyclic_close(sigma1_base, a, b, c, params)?, cyclic_close(sigma2_base, a, b, c, params)?))
}

/// `exp(i pi x)` with `x` reduced into `[0, 2)` exactly first.
fn phase(x: Ratio<i64>) -> Complex64 {
    let two = Ratio::from_integer(2);
    let red = x - (x / two).floor() * two;
    Complex64::from_polar(1.0, PI * (*red.numer() as f64) / (*red.denom() as f64))
}

/// All R-symbols of one braided solution `(p, r, kappa, lambda)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RStore {
    params: Params,
    lambda: Sign,
    ring: FusionRing,
    h: Vec<Ratio<i64>>,
    table: Vec<Complex64>,
}

impl RStore {
    pub fn build(params: Params, lambda: Sign) -> Result<RStore> {
        let ring = FusionRing::new(params.p)?;
        let size = ring.size();
        let h: Vec<Ratio<i64>> = ring.labels().iter().map(|&l| scaling_dim(l, &params)).collect();
        let mut cache: HashMap<Ratio<i64>, Complex64> = HashMap::new();
        let mut table = vec![Complex64::new(0.0, 0.0); size * size * size];
        for a in 0..size {
            for b in 0..size {
                for &c in ring.channels(a, b) {
                    let (s1, s2) = sigma_signs_in(&ring, ring.label(a), ring.label(b), ring.label(c), &params)?;
                    let ex = h[a] + h[b] - h[c];
                    let ph = *cache.entry(ex).or_insert_with(|| phase(ex));
                    let v = ph * f64::from(s1 * s2);
                    table[(a * size + b) * size + c] = if lambda == Sign::Plus { v } else { v.inv() };
                }
            }
        }
        Ok(RStore { params, lambda, ring, h, table })
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn lambda(&self) -> Sign {
        self.lambda
    }

    pub fn ring(&self) -> &FusionRing {
        &self.ring
    }

    pub fn h(&self, a: Label) -> Ratio<i64> {
        self.h[self.ring.index(a)]
    }

    /// `R_{ab}^c` by index; the triple must be admissible.
    #[inline]
    pub fn r_idx(&self, a: usize, b: usize, c: usize) -> Complex64 {
        let s = self.ring.size();
        self.table[(a * s + b) * s + c]
    }

    pub fn r_symbol(&self, a: Label, b: Label, c: Label) -> Result<Complex64> {
        if self.ring.multiplicity(a, b, c) == 0 {
            return Err(Error::InadmissibleChannel(format!("R_{{{},{}}}^{{{}}}", a, b, c)));
        }
        Ok(self.r_idx(self.ring.index(a), self.ring.index(b), self.ring.index(c)))
    }

    /// `(a, b, c, R_{ab}^c)` over admissible triples in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (Label, Label, Label, Complex64)> + '_ {
        self.ring.gamma().into_iter().map(move |(a, b, c)| {
            let r = &self.ring;
            (a, b, c, self.r_idx(r.index(a), r.index(b), r.index(c)))
        })
    }

    /// Applies `f` to every admissible entry.
    pub fn mapped(&self, f: impl Fn(Label, Label, Label, Complex64) -> Complex64) -> RStore {
        let mut out = self.clone();
        let s = self.ring.size();
        for (a, b, c, v) in self.iter() {
            let (ai, bi, ci) = (self.ring.index(a), self.ring.index(b), self.ring.index(c));
            out.table[(ai * s + bi) * s + ci] = f(a, b, c, v);
        }
        out
    }

    /// The opposite braiding: every entry inverted, `lambda` flipped.
    pub fn inverse(&self) -> RStore {
        let mut out = self.mapped(|_, _, _, v| v.inv());
        out.lambda = self.lambda.flip();
        out
    }

    /// `R'_{ab}^c = R_{nu(a) nu(b)}^{nu(c)}`.
    pub fn permuted(&self, nu: &RingAutomorphism) -> RStore {
        let r = &self.ring;
        self.mapped(|a, b, c, _| self.r_idx(r.index(nu.apply(a)), r.index(nu.apply(b)), r.index(nu.apply(c))))
    }

    /// Negates `R_{ab}^c` whenever both `a` and `b` are `psi+` or `psi-`.
    pub fn with_psi_pair_negated(&self) -> RStore {
        self.mapped(|a, b, _, v| if a.is_psi() && b.is_psi() { -v } else { v })
    }

    pub fn with_entry_negated(&self, a: Label, b: Label, c: Label) -> Result<RStore> {
        self.r_symbol(a, b, c)?;
        Ok(self.mapped(|x, y, z, v| if (x, y, z) == (a, b, c) { -v } else { v }))
    }
}
