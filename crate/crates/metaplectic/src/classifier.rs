//! Monoidal-equivalence classification.
//!
//! Decisions use the exact criterion only: `(r, kappa) ~ (r', kappa')` iff
//! `kappa = kappa'` and `g(r')` lies in the square orbit of `r`. X-tuples and
//! closed-loop F-monomials are diagnostics and cross-checks.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::Result;
use crate::f_symbols::{channels, FStore};
use crate::fusion_ring::{FusionRing, Label, RingAutomorphism};
use crate::gf2::Gf2System;
use crate::numtheory::{count_classes, factorize, g_reduce, square_orbit, HalfUnitGroup, OddModulus};
use crate::params::{Params, Sign};
use crate::r_symbols::RStore;

/// `X(r, i) = (-1)^{i^2} cos(i^2 r pi / n)` for `i = 0..=p`. Depends on `r mod 2n`.
pub fn x_tuple(p: usize, r: i64) -> Vec<f64> {
    let n2 = 2 * (2 * p as i64 + 1);
    (0..=p as i64)
        .map(|i| {
            let k = (i * i % n2) * r.rem_euclid(n2) % n2;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * (PI * k as f64 / (n2 / 2) as f64).cos()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantProfile {
    pub kappa: Sign,
    pub x_tuple: Vec<f64>,
    pub orbit: BTreeSet<i64>,
}

pub fn invariant_profile(params: &Params) -> InvariantProfile {
    let orbit = square_orbit(params.r, params.modulus()).expect("valid params have r coprime to n");
    InvariantProfile { kappa: params.kappa, x_tuple: x_tuple(params.p, params.r), orbit }
}

/// Exact equivalence criterion. Both pairs must be valid at rank `p`.
pub fn equivalent(p: usize, first: (i64, Sign), second: (i64, Sign)) -> Result<bool> {
    let a = Params::new(p, first.0, first.1)?;
    let b = Params::new(p, second.0, second.1)?;
    if a.kappa != b.kappa {
        return Ok(false);
    }
    let n = a.modulus();
    Ok(square_orbit(a.r, n)?.contains(&g_reduce(b.r, n)))
}

/// Orbits of `G / G^2` acting on `g(r)`, ordered by least element.
pub fn orbits(n: OddModulus) -> Vec<BTreeSet<i64>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &x in HalfUnitGroup::new(n).reps() {
        if seen.contains(&x) {
            continue;
        }
        let o = square_orbit(x, n).expect("unit");
        seen.extend(o.iter().copied());
        out.push(o);
    }
    out
}

/// The unique odd `r` in `[1, n)` with `g(r) = x`.
fn odd_rep(x: i64, n: i64) -> i64 {
    if x % 2 == 1 {
        x
    } else {
        n - x
    }
}

/// One representative per class: least valid r per orbit, all `kappa = +1` classes first.
pub fn enumerate_classes(p: usize) -> Result<Vec<Params>> {
    let n = OddModulus::from_rank(p)?;
    let mut reps: Vec<i64> = orbits(n).iter().map(|o| o.iter().map(|&x| odd_rep(x, n.get())).min().expect("nonempty")).collect();
    reps.sort_unstable();
    let mut out = Vec::with_capacity(2 * reps.len());
    for kappa in Sign::BOTH {
        for &r in &reps {
            out.push(Params::new(p, r, kappa)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassRepresentative {
    pub r: i64,
    pub kappa: i64,
    pub x_tuple: Vec<f64>,
}

/// Everything `classify` prints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub p: usize,
    pub n: i64,
    pub factorization: Vec<(u64, u32)>,
    pub orbits: Vec<Vec<i64>>,
    pub representatives: Vec<ClassRepresentative>,
    pub count: usize,
    pub count_formula: u64,
}

pub fn class_report(p: usize) -> Result<ClassReport> {
    let n = OddModulus::from_rank(p)?;
    let reps = enumerate_classes(p)?;
    Ok(ClassReport {
        p,
        n: n.get(),
        factorization: factorize(n.get() as u64),
        orbits: orbits(n).into_iter().map(|o| o.into_iter().collect()).collect(),
        representatives: reps
            .iter()
            .map(|prm| ClassRepresentative { r: prm.r, kappa: prm.kappa.value(), x_tuple: x_tuple(p, prm.r) })
            .collect(),
        count: reps.len(),
        count_formula: count_classes(n),
    })
}

/// The class representative equivalent to `params`.
pub fn representative_of(params: &Params) -> Result<Params> {
    let reps = enumerate_classes(params.p)?;
    for rep in reps {
        if equivalent(params.p, (rep.r, rep.kappa), (params.r, params.kappa))? {
            return Ok(rep);
        }
    }
    unreachable!("classes partition the parameter set")
}

/// `m[x][i] = F_{xxx}^{x; phi_i phi_i} F_{x phi_i x}^{phi_i; x x}` for `x = psi+, psi-`,
/// with `phi_0` read as the unit. Gauge invariant.
pub fn closed_loop_monomials(fs: &FStore) -> Result<[Vec<f64>; 2]> {
    let p = fs.params().p;
    let phi = |i: usize| if i == 0 { Label::One } else { Label::Phi(i) };
    let row = |x: Label| -> Result<Vec<f64>> {
        (0..=p).map(|i| Ok(fs.f_symbol(x, x, x, x, phi(i), phi(i))?.re * fs.f_symbol(x, phi(i), x, phi(i), x, x)?.re)).collect()
    };
    Ok([row(Label::PsiPlus)?, row(Label::PsiMinus)?])
}

/// True iff some ring automorphism carries the closed-loop monomials of `a` onto those of `b`.
pub fn f_data_equivalent(a: &FStore, b: &FStore, tol: f64) -> Result<bool> {
    if a.params().p != b.params().p {
        return Ok(false);
    }
    let (ma, mb) = (closed_loop_monomials(a)?, closed_loop_monomials(b)?);
    let ring = a.ring();
    let p = ring.p();
    Ok(ring.automorphisms().iter().any(|nu| {
        (0..2).all(|x| {
            let nx = if nu.apply(Label::PsiPlus) == Label::PsiPlus { x } else { 1 - x };
            (0..=p).all(|i| {
                let ni = if i == 0 { 0 } else { nu.apply(Label::Phi(i)).phi_index().expect("phi maps to phi") };
                (mb[x][i] - ma[nx][ni]).abs() <= tol
            })
        })
    }))
}

/// A `+-1` gauge `u` on admissible triples with
/// `F2 = F1 * u_ab^e u_ec^d u_bc^f u_af^d` and `R2 = R1 * u_ab^c u_ba^c`,
/// returned as `(a, b, c, u)` in canonical triple order.
pub fn sign_gauge_between(f1: &FStore, r1: &RStore, f2: &FStore, r2: &RStore, tol: f64) -> Option<Vec<(Label, Label, Label, i8)>> {
    let ring: &FusionRing = f1.ring();
    let s = ring.size();
    if f2.ring().size() != s {
        return None;
    }
    let mut var = vec![usize::MAX; s * s * s];
    let mut triples = Vec::new();
    for (a, b, c) in ring.gamma() {
        let (a, b, c) = (ring.index(a), ring.index(b), ring.index(c));
        var[(a * s + b) * s + c] = triples.len();
        triples.push((a, b, c));
    }
    let v = |a: usize, b: usize, c: usize| var[(a * s + b) * s + c];
    let ratio_bit = |x: f64, y: f64| -> Option<Option<bool>> {
        if x.abs() <= tol {
            return if y.abs() <= tol { Some(None) } else { None };
        }
        let q = y / x;
        if (q - 1.0).abs() <= tol {
            Some(Some(false))
        } else if (q + 1.0).abs() <= tol {
            Some(Some(true))
        } else {
            None
        }
    };
    let mut sys = Gf2System::new(triples.len());
    for (key, m) in f1.iter() {
        let [a, b, c, d] = key.map(|l| ring.index(l));
        let (rows, cols) = channels(ring, a, b, c, d);
        for &e in &rows {
            for &f in &cols {
                let x = m.entry_idx(e, f)?;
                let y = f2.f(a, b, c, d, e, f)?;
                if let Some(bit) = ratio_bit(x, y)? {
                    sys.add(&[v(a, b, e), v(e, c, d), v(b, c, f), v(a, f, d)], bit);
                }
            }
        }
    }
    for &(a, b, c) in &triples {
        let (x, y) = (r1.r_idx(a, b, c), r2.r_idx(a, b, c));
        let q = y / x;
        if q.im.abs() > tol {
            return None;
        }
        let bit = ratio_bit(1.0, q.re)??;
        sys.add(&[v(a, b, c), v(b, a, c)], bit);
    }
    let sol = sys.solve()?;
    Some(
        triples
            .iter()
            .zip(&sol.particular)
            .map(|(&(a, b, c), &bit)| (ring.label(a), ring.label(b), ring.label(c), if bit { -1 } else { 1 }))
            .collect(),
    )
}

/// `(F^nu, R'^nu)` for the psi-swap `nu`, where `R'` negates `R_ab^c` for `a, b` both psi.
pub fn psi_swapped_model(fs: &FStore, rs: &RStore, negate_psi_pair: bool) -> (FStore, RStore) {
    let nu = RingAutomorphism::new(fs.ring(), 1, true);
    let r = if negate_psi_pair { rs.with_psi_pair_negated() } else { rs.clone() };
    (fs.permuted(&nu), r.permuted(&nu))
}
