//! Closed-form building blocks: `J`, `H`, `H'`, `G` and the small matrices `A`..`E`.
//!
//! These take raw `(p, r, kappa)` rather than [`Params`](crate::params::Params) so that
//! out-of-range `r` can be evaluated (the determinant identity uses `2r + 2p + 1`, and
//! even `r` serves as a negative control for orthogonality).

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// `exp(i pi k / n)` with `k` reduced mod `2n` first.
pub(crate) fn root_of_unity(k: i64, n: i64) -> Complex64 {
    let k = k.rem_euclid(2 * n);
    Complex64::from_polar(1.0, PI * k as f64 / n as f64)
}

fn parity_sign(x: i64) -> f64 {
    if x.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `J(i, j) = 2^zeta kappa / sqrt(n) * exp(i pi r i j / n)`, `zeta = (2 - [i=0] - [j=0]) / 2`.
pub fn j_entry(i: usize, j: usize, p: usize, r: i64, kappa: i64) -> Complex64 {
    let n = 2 * p as i64 + 1;
    let zeta = (2.0 - (i == 0) as u8 as f64 - (j == 0) as u8 as f64) / 2.0;
    let scale = 2f64.powf(zeta) * kappa as f64 / (n as f64).sqrt();
    root_of_unity(r * (i * j) as i64, n) * scale
}

/// `(H, H')`, indices `0..=p`.
pub fn build_h(p: usize, r: i64, kappa: i64) -> (DMatrix<f64>, DMatrix<f64>) {
    let h = DMatrix::from_fn(p + 1, p + 1, |i, j| parity_sign((i * j) as i64) * j_entry(i, j, p, r, kappa).re);
    let hp = DMatrix::from_fn(p + 1, p + 1, |i, j| {
        let e = (i == 0) as i64 + (j == 0) as i64 + 1;
        parity_sign(e) * h[(i, j)]
    });
    (h, hp)
}

/// `G`, indices `1..=p` stored at `0..p`.
pub fn build_g(p: usize, r: i64, kappa: i64) -> DMatrix<f64> {
    DMatrix::from_fn(p, p, |a, b| {
        let (i, j) = (a + 1, b + 1);
        parity_sign(((i - 1) * (j - 1)) as i64) * j_entry(i, j, p, r, kappa).im
    })
}

/// A small block matrix. Sign quadruples of `A`, `D`, `E` must multiply to `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    A([i8; 4]),
    B,
    C,
    D { t: i64, s: [i8; 4] },
    E { t: i64, s: [i8; 4] },
}

fn check_signs(s: [i8; 4]) -> Result<[f64; 4]> {
    if s.iter().any(|&x| x != 1 && x != -1) {
        return Err(Error::SignProduct(s, 0));
    }
    let prod = s.iter().product::<i8>();
    if prod != -1 {
        return Err(Error::SignProduct(s, prod));
    }
    Ok(s.map(f64::from))
}

/// Evaluates a block at rank `p` and twist `r` (only `D` and `E` depend on them).
pub fn build_block(block: Block, p: usize, r: i64) -> Result<DMatrix<f64>> {
    let n = 2 * p as i64 + 1;
    Ok(match block {
        Block::A(s) => {
            let s = check_signs(s)?;
            DMatrix::from_row_slice(2, 2, &s) * FRAC_1_SQRT_2
        }
        Block::B => DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
        Block::C => DMatrix::from_row_slice(3, 3, &[1.0, -1.0, SQRT_2, -1.0, 1.0, SQRT_2, SQRT_2, SQRT_2, 0.0]) * 0.5,
        Block::D { t, s } => {
            let s = check_signs(s)?;
            let q = root_of_unity(r * t, n);
            DMatrix::from_row_slice(2, 2, &[s[0] * q.re, s[1] * q.im, s[2] * q.im, s[3] * q.re])
        }
        Block::E { t, s } => {
            let s = check_signs(s)?;
            let q = root_of_unity(r * t, n);
            DMatrix::from_row_slice(2, 2, &[s[0] * q.im, s[1] * q.re, s[2] * q.re, s[3] * q.im])
        }
    })
}

/// `max |M^T M - I|`.
pub fn orthogonality_residual(m: &DMatrix<f64>) -> f64 {
    let prod = m.transpose() * m;
    let id = DMatrix::<f64>::identity(m.ncols(), m.ncols());
    (prod - id).amax()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Params;
    use approx::assert_abs_diff_eq;

    #[test]
    fn j_examples() {
        let s3 = 3f64.sqrt();
        for p in 1..5 {
            let n = (2 * p + 1) as f64;
            assert_abs_diff_eq!(j_entry(0, 0, p, 1, -1).re, -1.0 / n.sqrt(), epsilon = 1e-15);
        }
        let j = j_entry(1, 1, 1, 1, 1);
        let want = Complex64::from_polar(2.0 / s3, PI / 3.0);
        assert!((j - want).norm() < 1e-15);
        assert_abs_diff_eq!(j_entry(0, 1, 1, 1, 1).re, 2f64.sqrt() / s3, epsilon = 1e-15);
    }

    #[test]
    fn h_example_p1() {
        let s = 3f64.sqrt();
        let r2 = 2f64.sqrt();
        let (h, hp) = build_h(1, 1, 1);
        let want = DMatrix::from_row_slice(2, 2, &[1.0, r2, r2, -1.0]) / s;
        assert!((h - want).amax() < 1e-15);
        let want = DMatrix::from_row_slice(2, 2, &[-1.0, r2, r2, 1.0]) / s;
        assert!((hp - want).amax() < 1e-15);
    }

    #[test]
    fn g_examples_p1() {
        assert_abs_diff_eq!(build_g(1, 1, 1)[(0, 0)], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(build_g(1, 5, 1)[(0, 0)], -1.0, epsilon = 1e-15);
    }

    #[test]
    fn h_and_g_orthogonal_for_valid_params() {
        for p in 1..=12 {
            for prm in Params::all(p) {
                let (h, hp) = build_h(p, prm.r, prm.kappa_i());
                let g = build_g(p, prm.r, prm.kappa_i());
                assert!(orthogonality_residual(&h) < 1e-12);
                assert!(orthogonality_residual(&hp) < 1e-12);
                assert!(orthogonality_residual(&g) < 1e-12);
            }
        }
    }

    #[test]
    fn even_r_breaks_orthogonality() {
        for p in 1..=6 {
            let (h, _) = build_h(p, 2, 1);
            assert!(orthogonality_residual(&h) > 1e-3, "p = {p}");
        }
    }

    #[test]
    fn block_examples() {
        let a = build_block(Block::A([1, 1, 1, -1]), 1, 1).unwrap();
        let want = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0]) / 2f64.sqrt();
        assert!((a - want).amax() < 1e-15);
        let c = build_block(Block::C, 1, 1).unwrap();
        assert_abs_diff_eq!(c[(2, 0)], FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(c[(2, 2)], 0.0);
        let d = build_block(Block::D { t: 1, s: [-1, 1, 1, 1] }, 2, 1).unwrap();
        let (c5, s5) = ((PI / 5.0).cos(), (PI / 5.0).sin());
        let want = DMatrix::from_row_slice(2, 2, &[-c5, s5, s5, c5]);
        assert!((d - want).amax() < 1e-15);
    }

    #[test]
    fn blocks_reject_bad_sign_products() {
        assert!(matches!(build_block(Block::A([1, 1, 1, 1]), 1, 1), Err(Error::SignProduct(_, 1))));
        assert!(build_block(Block::D { t: 1, s: [1, 1, -1, -1] }, 2, 1).is_err());
        assert!(build_block(Block::E { t: 1, s: [1, 2, 1, -1] }, 2, 1).is_err());
    }

    #[test]
    fn blocks_orthogonal() {
        for p in 1..6 {
            for r in Params::valid_r(p) {
                for t in 0..20 {
                    for s in [[1, 1, 1, -1], [-1, 1, 1, 1], [1, -1, -1, -1], [1, -1, 1, 1]] {
                        for b in [Block::A(s), Block::D { t, s }, Block::E { t, s }] {
                            assert!(orthogonality_residual(&build_block(b, p, r).unwrap()) < 1e-14);
                        }
                    }
                }
            }
        }
        assert!(orthogonality_residual(&build_block(Block::B, 1, 1).unwrap()) < 1e-15);
        assert!(orthogonality_residual(&build_block(Block::C, 1, 1).unwrap()) < 1e-15);
    }
}
