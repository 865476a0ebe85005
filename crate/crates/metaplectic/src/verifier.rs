//! Exhaustive pentagon and hexagon checks, orthogonality, the Jacobi determinant
//! identity and the four Gauss-sum identity classes.
//!
//! Equations are enumerated over admissible tuples only. Work fans out over the
//! outer `(a, b, c, d)` tuples on a dedicated pool; partial reports merge by an
//! associative, commutative reduction and violations are sorted at the end, so the
//! report does not depend on the number of workers.
//!
//! Pentagon form (sum over the `b (x) c` channel `g`):
//! `F_{fcd}^{e;hj} F_{abj}^{e;fi} = sum_g F_{abc}^{h;fg} F_{agd}^{e;hi} F_{bcd}^{i;gj}`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::f_symbols::{build_g, build_h, orthogonality_residual, FStore};
use crate::fusion_ring::{key_string, FusionRing};
use crate::numtheory::jacobi;
use crate::params::{Params, Sign};
use crate::r_symbols::RStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum EquationId {
    Pentagon,
    HexagonR1,
    HexagonR2,
    Orthogonality,
    GaussClass1,
    GaussClass2,
    GaussClass3,
    GaussClass4,
}

impl fmt::Display for EquationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EquationId::Pentagon => "pentagon",
            EquationId::HexagonR1 => "hexagon-R1",
            EquationId::HexagonR2 => "hexagon-R2",
            EquationId::Orthogonality => "orthogonality",
            EquationId::GaussClass1 => "gauss-class-1",
            EquationId::GaussClass2 => "gauss-class-2",
            EquationId::GaussClass3 => "gauss-class-3",
            EquationId::GaussClass4 => "gauss-class-4",
        };
        f.write_str(s)
    }
}

/// One failed equation. `key` orders violations canonically (label indices or
/// integer parameters); `labels` is the human-readable form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub equation: EquationId,
    #[serde(skip)]
    pub key: Vec<i64>,
    pub labels: Vec<String>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub equations_checked: u64,
    pub max_residual: f64,
    pub tolerance: f64,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn new(tolerance: f64) -> Self {
        VerificationReport { equations_checked: 0, max_residual: 0.0, tolerance, violations: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Records one equation; NaN residuals count as violations.
    pub fn record(&mut self, equation: EquationId, key: &[i64], labels: impl FnOnce() -> Vec<String>, residual: f64) {
        self.equations_checked += 1;
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        self.max_residual = self.max_residual.max(residual);
        if residual > self.tolerance {
            self.violations.push(Violation { equation, key: key.to_vec(), labels: labels(), residual });
        }
    }

    pub fn merge(mut self, other: VerificationReport) -> Self {
        self.equations_checked += other.equations_checked;
        self.max_residual = self.max_residual.max(other.max_residual);
        self.violations.extend(other.violations);
        self
    }

    fn finish(mut self) -> Self {
        self.violations.sort_by(|a, b| (a.equation, &a.key).cmp(&(b.equation, &b.key)));
        self
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| Error::InvalidParams(format!("cannot build thread pool: {e}")))
}

/// Runs `work` over all `(a, b, c, d)` on `jobs` workers (`0` = rayon default).
fn fan_out<F>(ring: &FusionRing, tol: f64, jobs: usize, work: F) -> Result<VerificationReport>
where
    F: Fn([usize; 4], &mut VerificationReport) -> Result<()> + Sync,
{
    let s = ring.size();
    let outer: Vec<[usize; 4]> = (0..s.pow(4)).map(|x| [x / (s * s * s), x / (s * s) % s, x / s % s, x % s]).collect();
    let run = || {
        outer
            .par_iter()
            .try_fold(
                || VerificationReport::new(tol),
                |mut rep, &t| {
                    work(t, &mut rep)?;
                    Ok::<_, Error>(rep)
                },
            )
            .try_reduce(|| VerificationReport::new(tol), |a, b| Ok(a.merge(b)))
    };
    Ok(pool(jobs)?.install(run)?.finish())
}

#[inline]
fn fget(fs: &FStore, a: usize, b: usize, c: usize, d: usize, e: usize, f: usize) -> Result<f64> {
    fs.f(a, b, c, d, e, f).ok_or_else(|| {
        let r = fs.ring();
        Error::MissingF(format!("{} (channels {},{})", key_string(&[a, b, c, d].map(|i| r.label(i))), r.label(e), r.label(f)))
    })
}

fn names(ring: &FusionRing, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| ring.label(i).to_string()).collect()
}

/// Every pentagon instance. Missing F-matrices are a hard error.
pub fn check_pentagon(fs: &FStore, tol: f64, jobs: usize) -> Result<VerificationReport> {
    let ring = fs.ring();
    fan_out(ring, tol, jobs, |[a, b, c, d], rep| {
        for e in 0..ring.size() {
            for &f in ring.channels(a, b) {
                for &h in ring.channels(f, c).iter().filter(|&&h| ring.adm(h, d, e)) {
                    for &i in ring.channels(a, e) {
                        for &j in ring.channels(c, d).iter().filter(|&&j| ring.adm(f, j, e) && ring.adm(b, j, i)) {
                            let rhs = fget(fs, f, c, d, e, h, j)? * fget(fs, a, b, j, e, f, i)?;
                            let mut lhs = 0.0;
                            for &g in ring.channels(b, c).iter().filter(|&&g| ring.adm(a, g, h) && ring.adm(g, d, i)) {
                                lhs += fget(fs, a, b, c, h, f, g)? * fget(fs, a, g, d, e, h, i)? * fget(fs, b, c, d, i, g, j)?;
                            }
                            let tuple = [a, b, c, d, e, f, h, i, j];
                            let key: Vec<i64> = tuple.iter().map(|&x| x as i64).collect();
                            rep.record(EquationId::Pentagon, &key, || names(ring, &tuple), (lhs - rhs).abs());
                        }
                    }
                }
            }
        }
        Ok(())
    })
}

/// Both hexagon families: R1 with `R`, R2 with the entrywise inverse of `R`.
pub fn check_hexagon(fs: &FStore, rs: &RStore, tol: f64, jobs: usize) -> Result<VerificationReport> {
    if fs.params() != rs.params() {
        return Err(Error::InvalidParams("F and R stores have different parameters".into()));
    }
    let ring = fs.ring();
    fan_out(ring, tol, jobs, |[a, b, c, d], rep| {
        for (id, inv) in [(EquationId::HexagonR1, false), (EquationId::HexagonR2, true)] {
            let r = |x, y, z| {
                let v = rs.r_idx(x, y, z);
                if inv {
                    v.inv()
                } else {
                    v
                }
            };
            for &g in ring.channels(a, c).iter().filter(|&&g| ring.adm(g, b, d)) {
                for &f in ring.channels(c, b).iter().filter(|&&f| ring.adm(a, f, d)) {
                    let lhs = r(a, c, g) * fget(fs, a, c, b, d, g, f)? * r(b, c, f);
                    let mut rhs = Complex64::new(0.0, 0.0);
                    for &e in ring.channels(a, b).iter().filter(|&&e| ring.adm(e, c, d)) {
                        rhs += fget(fs, c, a, b, d, g, e)? * r(e, c, d) * fget(fs, a, b, c, d, e, f)?;
                    }
                    let tuple = [a, b, c, d, g, f];
                    let key: Vec<i64> = tuple.iter().map(|&x| x as i64).collect();
                    rep.record(id, &key, || names(ring, &tuple), (lhs - rhs).norm());
                }
            }
        }
        Ok(())
    })
}

/// `max |M^T M - I| <= tol` for every stored matrix.
pub fn check_orthogonality(fs: &FStore, tol: f64) -> VerificationReport {
    let ring = fs.ring();
    let mut rep = VerificationReport::new(tol);
    for (key, m) in fs.iter() {
        let k: Vec<i64> = key.iter().map(|&l| ring.index(l) as i64).collect();
        rep.record(EquationId::Orthogonality, &k, || key.iter().map(|l| l.to_string()).collect(), orthogonality_residual(&m.entries));
    }
    rep.finish()
}

/// `det H(2r + n) * det G(2r + n)` at `kappa = 1`.
pub fn jacobi_det_value(p: usize, r: i64) -> f64 {
    let rr = 2 * r + 2 * p as i64 + 1;
    let (h, _) = build_h(p, rr, 1);
    h.determinant() * build_g(p, rr, 1).determinant()
}

/// `(r | 2p+1) = det H(2r + 2p + 1) det G(2r + 2p + 1)` within `tol`.
pub fn check_jacobi_det(p: usize, r: i64, tol: f64) -> Result<bool> {
    let want = f64::from(jacobi(r, 2 * p as i64 + 1)?);
    Ok((jacobi_det_value(p, r) - want).abs() <= tol)
}

/// Both sides of the four Gauss-sum identity classes.
pub mod gauss_classes {
    use super::*;

    fn n_of(p: usize) -> f64 {
        (2 * p + 1) as f64
    }

    fn pow_i(k: i64) -> Complex64 {
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)][k.rem_euclid(4) as usize]
    }

    fn m1(k: i64) -> f64 {
        if k.rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// `r (2 - kappa i^{p(p+1)} + p - (2p+1 | r))`.
    fn common(p: usize, r: i64, kappa: i64) -> Complex64 {
        let sym = jacobi(2 * p as i64 + 1, r).expect("r odd positive") as f64;
        (Complex64::new(2.0 + p as f64 - sym, 0.0) - pow_i((p * (p + 1)) as i64) * kappa as f64) * r as f64
    }

    /// `i (i - (-1)^p) - r i + r i^2 / n`.
    fn part(p: usize, r: i64, i: i64) -> f64 {
        let n = n_of(p);
        (i * (i - m1(p as i64) as i64)) as f64 - (r * i) as f64 + (r * i * i) as f64 / n
    }

    fn w(p: usize, r: i64, j: i64) -> Complex64 {
        let n = n_of(p);
        let arg = (j - m1(p as i64) as i64 + r) as f64 - (j * r) as f64 / n;
        (Complex64::i() * (j as f64 * PI / 2.0 * arg)).exp()
    }

    fn lhs_phase(x: Complex64) -> Complex64 {
        (Complex64::i() * PI / 2.0 * x).exp()
    }

    fn trig(f: fn(f64) -> f64, p: usize, r: i64, a: i64, b: i64) -> f64 {
        let k = (r * a * b).rem_euclid(2 * (2 * p as i64 + 1));
        f(PI * k as f64 / n_of(p))
    }

    pub fn class1(p: usize, r: i64, kappa: i64) -> (Complex64, Complex64) {
        let (n, k) = (n_of(p), kappa as f64);
        let lhs = lhs_phase(common(p, r, kappa)) * (k / n.sqrt());
        let sum: Complex64 = (1..=p as i64).map(|j| w(p, r, j)).sum();
        (lhs, Complex64::new(k * k / n, 0.0) + sum * (2.0 * k * k / n))
    }

    pub fn class2(p: usize, r: i64, kappa: i64, i1: i64) -> (Complex64, Complex64) {
        let (n, k, s2) = (n_of(p), kappa as f64, 2f64.sqrt());
        let lhs = lhs_phase(common(p, r, kappa) + part(p, r, i1)) * (s2 * k / n.sqrt());
        let sum: Complex64 = (1..=p as i64).map(|j| w(p, r, j) * (m1(j * i1) * trig(f64::cos, p, r, i1, j))).sum();
        (lhs, Complex64::new(s2 * k * k / n, 0.0) + sum * (2.0 * s2 * k * k / n))
    }

    pub fn class3(p: usize, r: i64, kappa: i64, i1: i64, i2: i64) -> (Complex64, Complex64) {
        let (n, k) = (n_of(p), kappa as f64);
        let pre = 2.0 * k * m1(i1 * i2) * trig(f64::cos, p, r, i1, i2) / n.sqrt();
        let lhs = lhs_phase(common(p, r, kappa) + part(p, r, i1) + part(p, r, i2)) * pre;
        let sum: Complex64 =
            (1..=p as i64).map(|j| w(p, r, j) * (m1(j * (i1 + i2)) * trig(f64::cos, p, r, i1, j) * trig(f64::cos, p, r, i2, j))).sum();
        (lhs, Complex64::new(2.0 * k * k / n, 0.0) + sum * (4.0 * k * k / n))
    }

    pub fn class4(p: usize, r: i64, kappa: i64, i1: i64, i2: i64) -> (Complex64, Complex64) {
        let (n, k) = (n_of(p), kappa as f64);
        let pre = 2.0 * k * m1((i1 - 1) * (i2 - 1)) * trig(f64::sin, p, r, i1, i2) / n.sqrt();
        let lhs = lhs_phase(common(p, r, kappa) + part(p, r, i1) + part(p, r, i2)) * pre;
        let sum: Complex64 =
            (1..=p as i64).map(|j| w(p, r, j) * (m1(j * (i1 + i2 - 2)) * trig(f64::sin, p, r, i1, j) * trig(f64::sin, p, r, i2, j))).sum();
        let rhs_pre = Complex64::new(0.0, -4.0 * k * k * m1(-i1 - i2) / n);
        (lhs, rhs_pre * sum)
    }
}

/// All four classes at one `(i1, i2)`: class 1 at `i1 = i2 = 0`, class 2 at `i2 = 0`.
pub fn check_appendix_identities(p: usize, r: i64, kappa: Sign, i1: i64, i2: i64, tol: f64) -> VerificationReport {
    use gauss_classes::*;
    let k = kappa.value();
    let mut rep = VerificationReport::new(tol);
    let ctx = |i1: i64, i2: i64| vec![format!("p={p}"), format!("r={r}"), format!("kappa={k}"), format!("i1={i1}"), format!("i2={i2}")];
    let key = |i1: i64, i2: i64| vec![p as i64, r, k, i1, i2];
    let cases = [
        (EquationId::GaussClass1, 0, 0, class1(p, r, k)),
        (EquationId::GaussClass2, i1, 0, class2(p, r, k, i1)),
        (EquationId::GaussClass3, i1, i2, class3(p, r, k, i1, i2)),
        (EquationId::GaussClass4, i1, i2, class4(p, r, k, i1, i2)),
    ];
    for (id, a, b, (l, rr)) in cases {
        rep.record(id, &key(a, b), || ctx(a, b), (l - rr).norm());
    }
    rep.finish()
}

/// Every valid `(r, kappa)` and `1 <= i1, i2 <= p` at rank `p`.
pub fn gauss_identity_sweep(p: usize, tol: f64) -> VerificationReport {
    let mut rep = VerificationReport::new(tol);
    for prm in Params::all(p) {
        for i1 in 1..=p as i64 {
            for i2 in 1..=p as i64 {
                rep = rep.merge(check_appendix_identities(p, prm.r, prm.kappa, i1, i2, tol));
            }
        }
    }
    rep.finish()
}
