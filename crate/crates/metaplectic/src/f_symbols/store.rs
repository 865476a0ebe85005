use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::blocks::{build_block, build_g, build_h, Block};
use crate::error::{Error, Result};
use crate::fusion_ring::{key_string, FusionRing, Label, RingAutomorphism};
use crate::numtheory::g_reduce;
use crate::params::Params;

/// Derivations of the same quadruple must agree to this tolerance.
pub const BUILD_TOLERANCE: f64 = 1e-12;

const NONE: u32 = u32::MAX;

/// `F_{abc}^d` with rows `e` (`N_{ab}^e N_{ec}^d = 1`) and columns `f` (`N_{bc}^f N_{af}^d = 1`),
/// both in canonical order. Entries are real in this family.
#[derive(Debug, Clone, PartialEq)]
pub struct FMatrix {
    pub rows: Vec<Label>,
    pub cols: Vec<Label>,
    pub entries: DMatrix<f64>,
    row_idx: Vec<usize>,
    col_idx: Vec<usize>,
}

impl FMatrix {
    fn new(ring: &FusionRing, rows: Vec<usize>, cols: Vec<usize>, entries: DMatrix<f64>) -> Self {
        FMatrix {
            rows: rows.iter().map(|&i| ring.label(i)).collect(),
            cols: cols.iter().map(|&i| ring.label(i)).collect(),
            entries,
            row_idx: rows,
            col_idx: cols,
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Entry at channel labels `(e, f)`, `None` if either is not a channel.
    pub fn entry(&self, e: Label, f: Label) -> Option<f64> {
        let i = self.rows.iter().position(|&x| x == e)?;
        let j = self.cols.iter().position(|&x| x == f)?;
        Some(self.entries[(i, j)])
    }

    #[inline]
    pub fn entry_idx(&self, e: usize, f: usize) -> Option<f64> {
        let i = self.row_idx.iter().position(|&x| x == e)?;
        let j = self.col_idx.iter().position(|&x| x == f)?;
        Some(self.entries[(i, j)])
    }

    /// The same matrix with entries viewed as complex numbers.
    pub fn complex_entries(&self) -> DMatrix<Complex64> {
        self.entries.map(|x| Complex64::new(x, 0.0))
    }
}

/// Row and column channel indices of `F_{abc}^d`.
pub fn channels(ring: &FusionRing, a: usize, b: usize, c: usize, d: usize) -> (Vec<usize>, Vec<usize>) {
    let rows = ring.channels(a, b).iter().copied().filter(|&e| ring.adm(e, c, d)).collect();
    let cols = ring.channels(b, c).iter().copied().filter(|&f| ring.adm(a, f, d)).collect();
    (rows, cols)
}

/// Every F-matrix of one solution `(p, r, kappa)`, indexed densely by `(a, b, c, d)`.
#[derive(Debug, Clone)]
pub struct FStore {
    params: Params,
    ring: FusionRing,
    slots: Vec<u32>,
    keys: Vec<[usize; 4]>,
    mats: Vec<FMatrix>,
}

struct Builder<'a> {
    ring: &'a FusionRing,
    table: BTreeMap<[usize; 4], DMatrix<f64>>,
}

impl Builder<'_> {
    fn describe(&self, key: [usize; 4]) -> String {
        key_string(&key.map(|i| self.ring.label(i)))
    }

    fn put(&mut self, key: [usize; 4], m: DMatrix<f64>) -> Result<()> {
        let [a, b, c, d] = key;
        let (rows, cols) = channels(self.ring, a, b, c, d);
        if rows.is_empty() {
            return Err(Error::InadmissibleChannel(self.describe(key)));
        }
        if m.shape() != (rows.len(), cols.len()) {
            return Err(Error::Shape { key: self.describe(key), got: m.shape(), expected: (rows.len(), cols.len()) });
        }
        if let Some(old) = self.table.get(&key) {
            if (old - &m).amax() > BUILD_TOLERANCE {
                return Err(Error::Conflict(self.describe(key)));
            }
        } else {
            self.table.insert(key, m);
        }
        Ok(())
    }

    fn scalar(&mut self, key: [usize; 4], v: f64) -> Result<()> {
        self.put(key, DMatrix::from_element(1, 1, v))
    }

    /// Adds `F_{bcd}^a = (F_{abc}^d)^T` until nothing changes.
    fn close_under_rotation(&mut self) -> Result<()> {
        loop {
            let mut changed = false;
            let snapshot: Vec<([usize; 4], DMatrix<f64>)> = self.table.iter().map(|(k, m)| (*k, m.clone())).collect();
            for ([a, b, c, d], m) in snapshot {
                let nk = [b, c, d, a];
                let t = m.transpose();
                match self.table.get(&nk) {
                    Some(old) if (old - &t).amax() > BUILD_TOLERANCE => {
                        return Err(Error::Conflict(self.describe(nk)));
                    }
                    Some(_) => {}
                    None => {
                        self.table.insert(nk, t);
                        changed = true;
                    }
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }
}

fn sg(x: i64) -> f64 {
    if x.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn sgi(x: i64) -> i8 {
    sg(x) as i8
}

impl FStore {
    /// Builds every F-matrix from the closed forms and the rotation rule.
    ///
    /// Fails if two derivations disagree or an admissible quadruple stays uncovered.
    pub fn build(params: Params) -> Result<FStore> {
        let ring = FusionRing::new(params.p)?;
        let p = params.p;
        let pi = p as i64;
        let (r, kappa) = (params.r, params.kappa_i());
        let nm = params.modulus();
        let size = ring.size();
        let mut bd = Builder { ring: &ring, table: BTreeMap::new() };

        let eps = 1;
        let ph = |i: i64| (1 + i) as usize;
        let (pp, pm) = (p + 2, p + 3);
        let psi_pairs = [(pp, pm, 1.0), (pm, pp, -1.0)];
        let a_block = |s: [i8; 4]| build_block(Block::A(s), p, r);

        for a in 0..size {
            for b in 0..size {
                for c in 0..size {
                    for d in 0..size {
                        if [a, b, c, d].contains(&0) && ring.channels(a, b).iter().any(|&e| ring.adm(e, c, d)) {
                            bd.scalar([a, b, c, d], 1.0)?;
                        }
                    }
                }
            }
        }

        // eps and phi only
        bd.scalar([eps; 4], 1.0)?;
        for i in 1..=pi {
            bd.scalar([eps, ph(i), eps, ph(i)], 1.0)?;
            bd.scalar([eps, eps, ph(i), ph(i)], -1.0)?;
            for j in 1..=pi {
                for k in 1..=pi {
                    if !ring.channels(eps, ph(i)).iter().any(|&e| ring.adm(e, ph(j), ph(k))) {
                        continue;
                    }
                    let v = if j <= i || k == g_reduce(i + j, nm) {
                        sg(j)
                    } else if k == g_reduce(i - j, nm) {
                        sg(j - 1)
                    } else {
                        return Err(Error::Uncovered(key_string(&[
                            Label::Eps,
                            Label::Phi(i as usize),
                            Label::Phi(j as usize),
                            Label::Phi(k as usize),
                        ])));
                    };
                    bd.scalar([eps, ph(i), ph(j), ph(k)], v)?;
                }
            }
        }
        let c_block = build_block(Block::C, p, r)?;
        let b_block = build_block(Block::B, p, r)?;
        for i in 1..=pi {
            bd.put([ph(i); 4], c_block.clone())?;
            for j in (1..=pi).filter(|&j| j != i) {
                bd.put([ph(i), ph(j), ph(i), ph(j)], b_block.clone())?;
                bd.put([ph(i), ph(i), ph(j), ph(j)], a_block([1, 1, sgi(j - i + 1), sgi(j - i)])?)?;
            }
        }
        for i in 1..=pi {
            for j in 1..=pi {
                for k in 1..=pi {
                    for l in 1..=pi {
                        let key = [ph(i), ph(j), ph(k), ph(l)];
                        let patterned = (i == k && j == l) || (i == j && k == l) || (i == l && j == k);
                        if patterned || bd.table.contains_key(&key) {
                            continue;
                        }
                        if ring.channels(key[0], key[1]).iter().any(|&e| ring.adm(e, key[2], key[3])) {
                            bd.scalar(key, 1.0)?;
                        }
                    }
                }
            }
        }

        // four psi
        let (h, hp) = build_h(p, r, kappa);
        let g = build_g(p, r, kappa);
        for &(x, y, pmv) in &psi_pairs {
            bd.put([x, x, x, x], h.clone())?;
            bd.put([x, y, x, y], -&h)?;
            bd.put([x, x, y, y], hp.clone())?;
            bd.put([x, x, x, y], &g * pmv)?;
        }

        // phi psi phi psi
        for i in 1..=pi {
            for j in 1..=pi {
                let ij = i * j;
                for &(x, y, pmv) in &psi_pairs {
                    let d = build_block(Block::D { t: ij, s: [-1, sgi(i + j), sgi(i + j), 1] }, p, r)?;
                    bd.put([ph(i), x, ph(j), x], d * (-pmv * sg(ij)))?;
                    let e = build_block(Block::E { t: ij, s: [sgi(i + j), 1, 1, sgi(i + j + 1)] }, p, r)?;
                    bd.put([ph(i), x, ph(j), y], e * -sg(ij))?;
                }
            }
        }

        // phi phi psi psi
        for i in 1..=pi {
            for &(x, y, pmv) in &psi_pairs {
                let pmi = pmv as i8;
                bd.put([ph(i), ph(i), x, x], a_block([1, 1, 1, -1])?)?;
                bd.put([ph(i), ph(i), x, y], a_block([-1, -1, sgi(i), sgi(i + 1)])?)?;
                for j in (1..=pi).filter(|&j| j != i) {
                    let s = if (i - j) % 2 == 0 { [pmi, pmi, 1, -1] } else { [1, -1, pmi, pmi] };
                    bd.put([ph(i), ph(j), x, x], a_block(s)?)?;
                }
            }
            for j in 1..=pi {
                if i < j {
                    bd.put([ph(i), ph(j), pp, pm], a_block([sgi(j + 1), sgi(i + 1), sgi(j), sgi(i + 1)])?)?;
                    bd.put([ph(i), ph(j), pm, pp], a_block([sgi(i), sgi(j), sgi(i), sgi(j + 1)])?)?;
                } else if i > j {
                    bd.put([ph(i), ph(j), pp, pm], a_block([sgi(j), sgi(i), sgi(j), sgi(i + 1)])?)?;
                    bd.put([ph(i), ph(j), pm, pp], a_block([sgi(i + 1), sgi(j + 1), sgi(i), sgi(j + 1)])?)?;
                }
            }
            // eps with psi
            for &(x, y, _) in &psi_pairs {
                for key in [[eps, ph(i), x, x], [eps, ph(i), x, y], [eps, x, ph(i), x], [eps, x, x, ph(i)], [eps, x, y, ph(i)]] {
                    bd.scalar(key, 1.0)?;
                }
                bd.scalar([eps, x, ph(i), y], -1.0)?;
            }
        }
        for &(x, _, _) in &psi_pairs {
            bd.scalar([eps, eps, x, x], -1.0)?;
            bd.scalar([eps, x, eps, x], -1.0)?;
        }

        bd.close_under_rotation()?;

        let mut missing = Vec::new();
        for a in 0..size {
            for b in 0..size {
                for c in 0..size {
                    for d in 0..size {
                        let key = [a, b, c, d];
                        let admissible = ring.channels(a, b).iter().any(|&e| ring.adm(e, c, d));
                        if admissible && !bd.table.contains_key(&key) {
                            missing.push(bd.describe(key));
                        }
                    }
                }
            }
        }
        if !missing.is_empty() {
            return Err(Error::Uncovered(missing.join("; ")));
        }
        let table = std::mem::take(&mut bd.table);
        Ok(Self::assemble(params, ring, table))
    }

    fn assemble(params: Params, ring: FusionRing, table: BTreeMap<[usize; 4], DMatrix<f64>>) -> FStore {
        let size = ring.size();
        let mut slots = vec![NONE; size.pow(4)];
        let mut keys = Vec::with_capacity(table.len());
        let mut mats = Vec::with_capacity(table.len());
        for (key, m) in table {
            let [a, b, c, d] = key;
            let (rows, cols) = channels(&ring, a, b, c, d);
            slots[((a * size + b) * size + c) * size + d] = mats.len() as u32;
            keys.push(key);
            mats.push(FMatrix::new(&ring, rows, cols, m));
        }
        FStore { params, ring, slots, keys, mats }
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn ring(&self) -> &FusionRing {
        &self.ring
    }

    /// Number of stored F-matrices.
    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    /// `(key, matrix)` pairs in canonical key order.
    pub fn iter(&self) -> impl Iterator<Item = ([Label; 4], &FMatrix)> + '_ {
        self.keys.iter().zip(&self.mats).map(|(k, m)| (k.map(|i| self.ring.label(i)), m))
    }

    #[inline]
    pub fn matrix_idx(&self, a: usize, b: usize, c: usize, d: usize) -> Option<&FMatrix> {
        let s = self.ring.size();
        match self.slots[((a * s + b) * s + c) * s + d] {
            NONE => None,
            i => Some(&self.mats[i as usize]),
        }
    }

    pub fn get(&self, a: Label, b: Label, c: Label, d: Label) -> Option<&FMatrix> {
        let r = &self.ring;
        self.matrix_idx(r.index(a), r.index(b), r.index(c), r.index(d))
    }

    /// `F_{abc}^{d;ef}` by index, `None` if not stored.
    #[inline]
    pub fn f(&self, a: usize, b: usize, c: usize, d: usize, e: usize, f: usize) -> Option<f64> {
        self.matrix_idx(a, b, c, d)?.entry_idx(e, f)
    }

    /// `F_{abc}^{d;ef}`. Inadmissible channels are an error, never a silent zero.
    pub fn f_symbol(&self, a: Label, b: Label, c: Label, d: Label, e: Label, f: Label) -> Result<Complex64> {
        let r = &self.ring;
        let ok =
            r.multiplicity(a, b, e) == 1 && r.multiplicity(e, c, d) == 1 && r.multiplicity(b, c, f) == 1 && r.multiplicity(a, f, d) == 1;
        if !ok {
            return Err(Error::InadmissibleChannel(format!("F_{{{}}}^{{{};{},{}}}", key_string(&[a, b, c]), d, e, f)));
        }
        let m = self.get(a, b, c, d).ok_or_else(|| Error::MissingF(key_string(&[a, b, c, d])))?;
        let v = m.entry(e, f).expect("channels checked above");
        Ok(Complex64::new(v, 0.0))
    }

    /// The store transported along a ring automorphism `nu`:
    /// `F'_{abc}^{d;ef} = F_{nu(a) nu(b) nu(c)}^{nu(d); nu(e) nu(f)}`.
    pub fn permuted(&self, nu: &RingAutomorphism) -> FStore {
        let mut table = BTreeMap::new();
        for (key, m) in self.keys.iter().zip(&self.mats) {
            let [a, b, c, d] = *key;
            let img = self
                .matrix_idx(nu.apply_idx(a), nu.apply_idx(b), nu.apply_idx(c), nu.apply_idx(d))
                .expect("automorphism preserves admissibility");
            let entries = DMatrix::from_fn(m.dim(), m.dim(), |i, j| {
                img.entry_idx(nu.apply_idx(m.row_idx[i]), nu.apply_idx(m.col_idx[j])).expect("channel image")
            });
            table.insert(*key, entries);
        }
        Self::assemble(self.params, self.ring.clone(), table)
    }

    /// A copy with the `(row, col)` entry of `F_{abc}^d` negated.
    pub fn with_entry_negated(&self, key: [Label; 4], row: usize, col: usize) -> Result<FStore> {
        let mut out = self.clone();
        let [a, b, c, d] = key.map(|l| self.ring.index(l));
        let s = self.ring.size();
        let slot = out.slots[((a * s + b) * s + c) * s + d];
        if slot == NONE {
            return Err(Error::MissingF(key_string(&key)));
        }
        let m = &mut out.mats[slot as usize];
        if row >= m.dim() || col >= m.dim() {
            return Err(Error::EntryOutOfRange { key: key_string(&key), row, col });
        }
        m.entries[(row, col)] = -m.entries[(row, col)];
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Sign;
    use Label::*;

    fn store(p: usize, r: i64, k: Sign) -> FStore {
        FStore::build(Params::new(p, r, k).unwrap()).unwrap()
    }

    #[test]
    fn builds_for_all_params_up_to_8() {
        for p in 1..=8 {
            for prm in Params::all(p) {
                let fs = FStore::build(prm).unwrap();
                let ring = fs.ring();
                let ls = ring.labels();
                let mut admissible = 0;
                for &a in &ls {
                    for &b in &ls {
                        for &c in &ls {
                            for &d in &ls {
                                let n = ring.n_ext(&[a, b, c], d) as usize;
                                if n > 0 {
                                    admissible += 1;
                                    assert_eq!(fs.get(a, b, c, d).unwrap().dim(), n);
                                }
                            }
                        }
                    }
                }
                assert_eq!(admissible, fs.len());
            }
        }
    }

    #[test]
    fn examples() {
        let fs = store(2, 1, Sign::Plus);
        for i in 1..=2 {
            assert_eq!(fs.get(Eps, Eps, Phi(i), Phi(i)).unwrap().entries[(0, 0)], -1.0);
        }
        let fs = store(1, 1, Sign::Plus);
        let m = fs.get(PsiPlus, PsiPlus, PsiPlus, PsiPlus).unwrap();
        assert_eq!(m.rows, vec![One, Phi(1)]);
        assert_eq!(m.cols, vec![One, Phi(1)]);
        let (h, _) = build_h(1, 1, 1);
        assert!((&m.entries - h).amax() < 1e-15);
        let fs = store(3, 1, Sign::Plus);
        assert_eq!(fs.get(Phi(1), Phi(2), Phi(3), Phi(1)).unwrap().entries, DMatrix::from_element(1, 1, 1.0));
    }

    #[test]
    fn f_symbol_lookup() {
        for p in 1..=4 {
            let n = (2 * p + 1) as f64;
            let plus = store(p, 1, Sign::Plus);
            let minus = store(p, 1, Sign::Minus);
            let v = plus.f_symbol(PsiPlus, PsiPlus, PsiPlus, PsiPlus, One, One).unwrap();
            assert!((v.re - 1.0 / n.sqrt()).abs() < 1e-15 && v.im == 0.0);
            let v = minus.f_symbol(PsiPlus, PsiPlus, PsiPlus, PsiPlus, One, One).unwrap();
            assert!((v.re + 1.0 / n.sqrt()).abs() < 1e-15);
            let e = plus.f_symbol(PsiPlus, PsiPlus, PsiPlus, PsiPlus, Eps, One).unwrap_err();
            assert!(matches!(e, Error::InadmissibleChannel(_)));
        }
    }

    #[test]
    fn unit_normalization_and_nondegeneracy() {
        for p in 1..=5 {
            for prm in Params::all(p) {
                let fs = FStore::build(prm).unwrap();
                let ring = fs.ring();
                for a in ring.labels() {
                    for b in ring.labels() {
                        for c in ring.fuse(a, b) {
                            assert_eq!(fs.f_symbol(a, One, b, c, a, b).unwrap().re, 1.0);
                        }
                    }
                    assert!(fs.f_symbol(a, a, a, a, One, One).unwrap().norm() > 1e-6);
                }
            }
        }
    }

    #[test]
    fn rotation_rule_and_involution() {
        for p in 1..=5 {
            for prm in Params::all(p) {
                let fs = FStore::build(prm).unwrap();
                for ([a, b, c, d], m) in fs.iter() {
                    let rot = fs.get(b, c, d, a).unwrap();
                    assert_eq!(rot.rows, m.cols);
                    assert!((&rot.entries - m.entries.transpose()).amax() < 1e-12);
                    let mut cur = [a, b, c, d];
                    let mut mat = m.entries.clone();
                    for _ in 0..4 {
                        cur = [cur[1], cur[2], cur[3], cur[0]];
                        mat = mat.transpose();
                        assert!((fs.get(cur[0], cur[1], cur[2], cur[3]).unwrap().entries.clone() - &mat).amax() < 1e-12);
                    }
                    assert!((&mat - &m.entries).amax() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn every_matrix_orthogonal() {
        for p in 1..=6 {
            for prm in Params::all(p) {
                let fs = FStore::build(prm).unwrap();
                for (_, m) in fs.iter() {
                    assert!(super::super::orthogonality_residual(&m.entries) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn h_diagonal_separates_params() {
        for p in 1..=12 {
            let all = Params::all(p);
            for x in &all {
                for y in &all {
                    let (hx, _) = build_h(p, x.r, x.kappa_i());
                    let (hy, _) = build_h(p, y.r, y.kappa_i());
                    let same = (hx.diagonal() - hy.diagonal()).amax() < 1e-9;
                    assert_eq!(same, x == y);
                }
            }
        }
    }

    #[test]
    fn put_rejects_shape_and_conflict() {
        let ring = FusionRing::new(1).unwrap();
        let mut bd = Builder { ring: &ring, table: BTreeMap::new() };
        let psi = ring.index(PsiPlus);
        let e = bd.put([psi; 4], DMatrix::from_element(1, 1, 1.0)).unwrap_err();
        assert!(matches!(e, Error::Shape { .. }));
        bd.scalar([1, 1, 1, 1], 1.0).unwrap();
        assert!(matches!(bd.scalar([1, 1, 1, 1], -1.0), Err(Error::Conflict(_))));
        assert!(matches!(bd.scalar([1, 1, 1, 0], 1.0), Err(Error::InadmissibleChannel(_))));
    }

    #[test]
    fn rotation_closure_detects_conflict() {
        let ring = FusionRing::new(1).unwrap();
        let mut bd = Builder { ring: &ring, table: BTreeMap::new() };
        let (e, phi) = (1, 2);
        bd.scalar([e, e, phi, phi], -1.0).unwrap();
        bd.scalar([e, phi, phi, e], 1.0).unwrap();
        assert!(matches!(bd.close_under_rotation(), Err(Error::Conflict(_))));
    }

    #[test]
    fn identity_permutation_and_negation() {
        let fs = store(2, 3, Sign::Minus);
        let id = RingAutomorphism::identity(fs.ring());
        let same = fs.permuted(&id);
        for ((k1, m1), (k2, m2)) in fs.iter().zip(same.iter()) {
            assert_eq!(k1, k2);
            assert_eq!(m1, m2);
        }
        let key = [PsiPlus; 4];
        let neg = fs.with_entry_negated(key, 0, 1).unwrap();
        let a = fs.get(PsiPlus, PsiPlus, PsiPlus, PsiPlus).unwrap().entries[(0, 1)];
        assert_eq!(neg.get(PsiPlus, PsiPlus, PsiPlus, PsiPlus).unwrap().entries[(0, 1)], -a);
        assert!(fs.with_entry_negated(key, 0, 9).is_err());
        assert!(fs.with_entry_negated([One, One, One, Eps], 0, 0).is_err());
    }
}
