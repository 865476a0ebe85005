//! Pivotal coefficients, quantum dimensions, `S` and `T`.
//!
//! `compute_modular` works from the stores; `closed_form_modular` evaluates the
//! closed-form table so the two can be compared entrywise.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::f_symbols::FStore;
use crate::fusion_ring::{FusionRing, Label};
use crate::gf2::Gf2System;
use crate::numtheory::jacobi;
use crate::params::{Params, Sign};
use crate::r_symbols::RStore;

/// Pivotal coefficients `eps_a` in `{-1, +1}`, by label index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PivotalSolution {
    pub eps: Vec<i8>,
}

impl PivotalSolution {
    /// All `+1` except `eps_{psi+} = eps_{psi-} = psi_sign`.
    pub fn with_psi_sign(p: usize, psi_sign: Sign) -> Self {
        let mut eps = vec![1i8; p + 4];
        eps[p + 2] = psi_sign.value() as i8;
        eps[p + 3] = psi_sign.value() as i8;
        PivotalSolution { eps }
    }

    /// The pivot with positive quantum dimensions: `eps_psi = kappa`.
    pub fn positive(params: &Params) -> Self {
        Self::with_psi_sign(params.p, params.kappa)
    }

    pub fn eps(&self, ring: &FusionRing, a: Label) -> i8 {
        self.eps[ring.index(a)]
    }

    pub fn psi_sign(&self) -> Sign {
        if self.eps[self.eps.len() - 1] > 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// The right-hand side `F_{abc}^{1;ca} F_{bca}^{1;ab} F_{cab}^{1;bc}` of the pivotal
/// equation for an admissible triple (all labels self-dual).
pub fn pivotal_rhs(fs: &FStore, a: usize, b: usize, c: usize) -> Result<f64> {
    let look = |x, y, z, e, f| {
        fs.f(x, y, z, 0, e, f).ok_or_else(|| {
            let r = fs.ring();
            Error::MissingF(crate::fusion_ring::key_string(&[r.label(x), r.label(y), r.label(z), Label::One]))
        })
    };
    Ok(look(a, b, c, c, a)? * look(b, c, a, a, b)? * look(c, a, b, b, c)?)
}

/// Every `+-1` solution of `eps_a eps_b eps_c = rhs(a, b, c)`. Exactly two are expected,
/// returned with `eps_psi = +1` first.
pub fn solve_pivotal(fs: &FStore) -> Result<Vec<PivotalSolution>> {
    let ring = fs.ring();
    let size = ring.size();
    let mut sys = Gf2System::new(size);
    for a in 0..size {
        for b in 0..size {
            for &c in ring.channels(a, b) {
                let v = pivotal_rhs(fs, a, b, c)?;
                if (v.abs() - 1.0).abs() > 1e-9 {
                    return Err(Error::PivotalCount(0));
                }
                sys.add(&[a, b, c], v < 0.0);
            }
        }
    }
    let sols = sys.solve().ok_or(Error::PivotalCount(0))?;
    if sols.kernel.len() > 10 {
        return Err(Error::PivotalCount(1 << sols.kernel.len()));
    }
    let mut out: Vec<PivotalSolution> =
        sols.enumerate().into_iter().map(|x| PivotalSolution { eps: x.iter().map(|&b| if b { -1 } else { 1 }).collect() }).collect();
    if out.len() != 2 {
        return Err(Error::PivotalCount(out.len()));
    }
    out.sort_by_key(|s| std::cmp::Reverse(s.eps[size - 1]));
    Ok(out)
}

/// `q_a = eps_a / F_{aaa}^{a;11}`, checked against `1 / (eps_a F_{aaa}^{a;11})`.
pub fn quantum_dims(fs: &FStore, piv: &PivotalSolution) -> Result<Vec<f64>> {
    let ring = fs.ring();
    (0..ring.size())
        .map(|a| {
            let f = fs.f(a, a, a, a, 0, 0).ok_or_else(|| Error::MissingF(ring.label(a).to_string()))?;
            let e = f64::from(piv.eps[a]);
            let (ql, qr) = (e / f, 1.0 / (e * f));
            if (ql - qr).abs() > 1e-12 * ql.abs().max(1.0) {
                return Err(Error::NonSpherical(ring.label(a).to_string()));
            }
            Ok(ql)
        })
        .collect()
}

/// Modular data of one `(p, r, kappa, lambda)` solution under one pivot.
#[derive(Debug, Clone)]
pub struct ModularData {
    pub params: Params,
    pub lambda: Sign,
    pub labels: Vec<Label>,
    pub pivotal: PivotalSolution,
    pub qdims: Vec<f64>,
    pub s_hat: DMatrix<Complex64>,
    pub s: DMatrix<Complex64>,
    pub t: Vec<Complex64>,
    pub total_dim: f64,
}

fn diag_scale(m: &DMatrix<Complex64>, q: &[f64], power: i32) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * (q[i] * q[j]).powi(power))
}

/// `S-hat`, `S = D S-hat D` and the twists from the stores.
pub fn compute_modular(fs: &FStore, rs: &RStore, piv: &PivotalSolution) -> Result<ModularData> {
    let params = fs.params();
    if rs.params() != params {
        return Err(Error::InvalidParams("F and R stores have different parameters".into()));
    }
    let ring = fs.ring();
    let size = ring.size();
    let q = quantum_dims(fs, piv)?;
    let mut s_hat = DMatrix::from_element(size, size, Complex64::new(0.0, 0.0));
    for a in 0..size {
        for b in 0..size {
            let m = fs
                .matrix_idx(a, b, b, a)
                .ok_or_else(|| Error::MissingF(format!("{},{},{},{}", ring.label(a), ring.label(b), ring.label(b), ring.label(a))))?;
            let inv = m.entries.clone().try_inverse().ok_or(Error::DegenerateS(0.0))?;
            // rows of m are channels c of a (x) b; its columns are channels of b (x) b, starting with 1
            debug_assert_eq!(m.cols[0], Label::One);
            let mut acc = Complex64::new(0.0, 0.0);
            for (ci, &c) in ring.channels(a, b).iter().enumerate() {
                debug_assert_eq!(ring.index(m.rows[ci]), c);
                acc += m.entries[(ci, 0)] * rs.r_idx(a, b, c) * rs.r_idx(b, a, c) * inv[(0, ci)];
            }
            s_hat[(a, b)] = acc;
        }
    }
    let s = diag_scale(&s_hat, &q, 1);
    let det = s.determinant().norm();
    if det < 1e-9 {
        return Err(Error::DegenerateS(det));
    }
    let t = (0..size).map(|a| ring.channels(a, a).iter().map(|&c| rs.r_idx(a, a, c) * q[c]).sum::<Complex64>() / q[a]).collect();
    Ok(ModularData {
        params,
        lambda: rs.lambda(),
        labels: ring.labels(),
        pivotal: piv.clone(),
        total_dim: q.iter().map(|x| x * x).sum(),
        qdims: q,
        s_hat,
        s,
        t,
    })
}

/// The closed-form table evaluated for pivot `eps_psi = psi_sign`.
///
/// `(-1)^{kappa lambda r / 2}` is read as `exp(i pi kappa lambda r / 2)`. The psi-psi
/// block of `S` is taken as printed for positive dimensions; it is quadratic in `q_psi`
/// and so does not depend on the pivot.
pub fn closed_form_modular(params: Params, lambda: Sign, psi_sign: Sign) -> ModularData {
    let p = params.p;
    let n = params.n();
    let size = p + 4;
    let (k, lam, r) = (params.kappa.as_f64(), lambda.as_f64(), params.r as f64);
    let nf = n as f64;
    let j2 = f64::from(jacobi(2, n).expect("n odd"));
    let jnr = f64::from(jacobi(n, params.r).expect("r odd"));
    let pivot_rel = psi_sign.times(params.kappa).as_f64();
    let q_psi = pivot_rel * nf.sqrt();
    let (pp, pm) = (p + 2, p + 3);

    let mut q = vec![1.0, 1.0];
    q.extend(std::iter::repeat_n(2.0, p));
    q.extend([q_psi, q_psi]);

    let mut s = DMatrix::<f64>::zeros(size, size);
    let mut set = |i: usize, j: usize, v: f64| {
        s[(i, j)] = v;
        s[(j, i)] = v;
    };
    set(0, 0, 1.0);
    set(1, 1, 1.0);
    set(0, 1, 1.0);
    for i in 1..=p {
        set(0, 1 + i, 2.0);
        set(1, 1 + i, 2.0);
        for j in 1..=p {
            let phase = (2 * i * j) as i64 * params.r % (2 * n);
            set(1 + i, 1 + j, 4.0 * (PI * phase as f64 / nf).cos());
        }
    }
    let q_pos = nf.sqrt();
    for x in [pp, pm] {
        set(0, x, q_psi);
        set(1, x, -q_psi);
        for y in [pp, pm] {
            set(x, y, if x == y { -k * j2 * q_pos } else { k * j2 * q_pos });
        }
    }
    let s: DMatrix<Complex64> = s.map(|v| Complex64::new(v, 0.0));

    let mut t = vec![Complex64::new(1.0, 0.0); 2];
    for i in 1..=p as i64 {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let ph = (lambda.value() * params.r * i * i).rem_euclid(2 * n);
        t.push(Complex64::from_polar(sign, PI * ph as f64 / nf));
    }
    let common =
        Complex64::from_polar(1.0, PI * k * lam * r / 2.0) * Complex64::from_polar(1.0, PI * lam * r / 4.0 * (jnr + k * j2 - p as f64));
    t.push(-common * pivot_rel);
    t.push(common * pivot_rel);

    let s_hat = diag_scale(&s, &q, -1);
    ModularData {
        params,
        lambda,
        labels: (0..size).map(|i| Label::from_index(i, p)).collect(),
        pivotal: PivotalSolution::with_psi_sign(p, psi_sign),
        total_dim: q.iter().map(|x| x * x).sum(),
        qdims: q,
        s_hat,
        s,
        t,
    }
}

/// Largest entrywise gaps between two modular data sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModularDiff {
    pub qdims: f64,
    pub s: f64,
    pub t: f64,
}

impl ModularDiff {
    pub fn max(&self) -> f64 {
        self.qdims.max(self.s).max(self.t)
    }
}

pub fn compare(a: &ModularData, b: &ModularData) -> ModularDiff {
    let qd = a.qdims.iter().zip(&b.qdims).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let sd = (&a.s - &b.s).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let td = a.t.iter().zip(&b.t).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    ModularDiff { qdims: qd, s: sd, t: td }
}

/// Entries `(row, col)` of `S` where the two data sets differ by more than `tol`.
pub fn s_mismatches(a: &ModularData, b: &ModularData, tol: f64) -> Vec<(Label, Label)> {
    let mut out = Vec::new();
    for i in 0..a.labels.len() {
        for j in 0..a.labels.len() {
            if (a.s[(i, j)] - b.s[(i, j)]).norm() > tol {
                out.push((a.labels[i], a.labels[j]));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::*;

    fn stores(p: usize, r: i64, k: Sign, lam: Sign) -> (FStore, RStore) {
        let prm = Params::new(p, r, k).unwrap();
        (FStore::build(prm).unwrap(), RStore::build(prm, lam).unwrap())
    }

    #[test]
    fn two_pivots_matching_brute_force() {
        for p in 1..=4 {
            for prm in Params::all(p) {
                let fs = FStore::build(prm).unwrap();
                let sols = solve_pivotal(&fs).unwrap();
                assert_eq!(sols.len(), 2);
                for s in &sols {
                    assert!(s.eps[..p + 2].iter().all(|&e| e == 1));
                    assert_eq!(s.eps[p + 2], s.eps[p + 3]);
                }
                let size = p + 4;
                let ring = fs.ring();
                let brute: Vec<Vec<i8>> = (0u32..1 << size)
                    .map(|m| (0..size).map(|i| if m >> i & 1 == 1 { -1 } else { 1 }).collect::<Vec<i8>>())
                    .filter(|eps| {
                        (0..size).all(|a| {
                            (0..size).all(|b| {
                                ring.channels(a, b).iter().all(|&c| {
                                    let lhs = f64::from(eps[a] * eps[b] * eps[c]);
                                    (lhs - pivotal_rhs(&fs, a, b, c).unwrap()).abs() < 1e-9
                                })
                            })
                        })
                    })
                    .collect();
                let mut got: Vec<Vec<i8>> = sols.into_iter().map(|s| s.eps).collect();
                got.sort();
                let mut brute = brute;
                brute.sort();
                assert_eq!(got, brute);
            }
        }
    }

    #[test]
    fn quantum_dimensions() {
        for p in 1..=4 {
            for prm in Params::all(p) {
                let fs = FStore::build(prm).unwrap();
                let n = (2 * p + 1) as f64;
                let q = quantum_dims(&fs, &PivotalSolution::positive(&prm)).unwrap();
                assert_eq!(q[0], 1.0);
                assert!((q[1] - 1.0).abs() < 1e-12);
                for i in 1..=p {
                    assert!((q[1 + i] - 2.0).abs() < 1e-12);
                }
                assert!((q[p + 2] - n.sqrt()).abs() < 1e-12);
                let other = PivotalSolution::with_psi_sign(p, prm.kappa.flip());
                let q = quantum_dims(&fs, &other).unwrap();
                assert!((q[p + 3] + n.sqrt()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn twist_examples() {
        let (fs, rs) = stores(1, 1, Sign::Plus, Sign::Plus);
        let md = compute_modular(&fs, &rs, &PivotalSolution::positive(&fs.params())).unwrap();
        assert!((md.t[1] - 1.0).norm() < 1e-12);
        assert!((md.t[2] + Complex64::from_polar(1.0, PI / 3.0)).norm() < 1e-12);
        let cf = closed_form_modular(fs.params(), Sign::Plus, Sign::Plus);
        assert!((cf.t[3] + Complex64::from_polar(1.0, PI / 4.0)).norm() < 1e-12);
        assert!((cf.s[(0, 3)].re - 3f64.sqrt()).abs() < 1e-12);
        let cf = closed_form_modular(Params::new(2, 1, Sign::Plus).unwrap(), Sign::Plus, Sign::Plus);
        assert!((cf.s[(4, 4)].re - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn structural_properties() {
        for p in 1..=4 {
            for prm in Params::all(p) {
                let fs = FStore::build(prm).unwrap();
                let n = (2 * p + 1) as f64;
                for lam in Sign::BOTH {
                    let rs = RStore::build(prm, lam).unwrap();
                    for piv in solve_pivotal(&fs).unwrap() {
                        let md = compute_modular(&fs, &rs, &piv).unwrap();
                        assert!((&md.s - md.s.transpose()).iter().all(|z| z.norm() < 1e-10));
                        for i in 1..=p {
                            assert!(md.s[(1 + i, p + 2)].norm() < 1e-10);
                            assert!(md.s[(1 + i, p + 3)].norm() < 1e-10);
                        }
                        for a in 0..p + 4 {
                            assert!((md.t[a].norm() - 1.0).abs() < 1e-12);
                            let pow = md.t[a].powu((8 * (2 * p + 1)) as u32);
                            assert!((pow - 1.0).norm() < 1e-8);
                            assert!((md.s[(0, a)].re - md.qdims[a]).abs() < 1e-10);
                        }
                        assert!((md.total_dim - 4.0 * n).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn s_from_twists_agrees() {
        // S_ab = sum_c N_ab^c q_c theta_c / (theta_a theta_b)
        for p in 1..=4 {
            for prm in Params::all(p) {
                let fs = FStore::build(prm).unwrap();
                let ring = fs.ring();
                for lam in Sign::BOTH {
                    let rs = RStore::build(prm, lam).unwrap();
                    for piv in solve_pivotal(&fs).unwrap() {
                        let md = compute_modular(&fs, &rs, &piv).unwrap();
                        for a in 0..ring.size() {
                            for b in 0..ring.size() {
                                let sum: Complex64 = ring.channels(a, b).iter().map(|&c| md.t[c] * md.qdims[c]).sum();
                                let v = sum / (md.t[a] * md.t[b]);
                                assert!((v - md.s[(a, b)]).norm() < 1e-9);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn closed_form_matches_outside_psi_block() {
        for p in 1..=4 {
            for prm in Params::all(p) {
                let fs = FStore::build(prm).unwrap();
                for lam in Sign::BOTH {
                    let rs = RStore::build(prm, lam).unwrap();
                    for piv in solve_pivotal(&fs).unwrap() {
                        let md = compute_modular(&fs, &rs, &piv).unwrap();
                        let cf = closed_form_modular(prm, lam, piv.psi_sign());
                        let d = compare(&md, &cf);
                        assert!(d.qdims < 1e-9 && d.t < 1e-9, "{prm} {lam}: {d:?}");
                        let bad = s_mismatches(&md, &cf, 1e-9);
                        let psi = [PsiPlus, PsiMinus];
                        assert!(bad.iter().all(|(a, b)| psi.contains(a) && psi.contains(b)));
                        for &(a, b) in &bad {
                            let (i, j) = (a.index(p), b.index(p));
                            assert!((md.s[(i, j)] + cf.s[(i, j)]).norm() < 1e-9);
                        }
                    }
                }
            }
        }
    }
}
