//! Labels, fusion rules, Frobenius-Perron dimensions and ring automorphisms.
//!
//! Labels are indexed `0 = 1`, `1 = eps`, `1 + i = phi_i`, `p + 2 = psi+`, `p + 3 = psi-`.
//! Every label is self-dual and the ring is commutative and multiplicity free.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numtheory::{g_reduce, HalfUnitGroup, OddModulus};

/// A simple object. The derived order is the canonical basis order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    One,
    Eps,
    Phi(usize),
    PsiPlus,
    PsiMinus,
}

impl Label {
    pub fn index(self, p: usize) -> usize {
        match self {
            Label::One => 0,
            Label::Eps => 1,
            Label::Phi(i) => 1 + i,
            Label::PsiPlus => p + 2,
            Label::PsiMinus => p + 3,
        }
    }

    pub fn from_index(idx: usize, p: usize) -> Label {
        match idx {
            0 => Label::One,
            1 => Label::Eps,
            i if i <= p + 1 => Label::Phi(i - 1),
            i if i == p + 2 => Label::PsiPlus,
            i if i == p + 3 => Label::PsiMinus,
            _ => panic!("label index {idx} out of range for p = {p}"),
        }
    }

    pub fn is_psi(self) -> bool {
        matches!(self, Label::PsiPlus | Label::PsiMinus)
    }

    pub fn phi_index(self) -> Option<usize> {
        match self {
            Label::Phi(i) => Some(i),
            _ => None,
        }
    }

    /// `psi+ <-> psi-`, identity elsewhere.
    pub fn psi_swapped(self) -> Label {
        match self {
            Label::PsiPlus => Label::PsiMinus,
            Label::PsiMinus => Label::PsiPlus,
            x => x,
        }
    }

    /// Parses a label name and checks it against rank `p`.
    pub fn parse(s: &str, p: usize) -> Result<Label> {
        let l: Label = s.parse()?;
        match l {
            Label::Phi(i) if i == 0 || i > p => Err(Error::UnknownLabel(s.to_string())),
            l => Ok(l),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::One => write!(f, "1"),
            Label::Eps => write!(f, "eps"),
            Label::Phi(i) => write!(f, "phi{i}"),
            Label::PsiPlus => write!(f, "psi+"),
            Label::PsiMinus => write!(f, "psi-"),
        }
    }
}

impl FromStr for Label {
    type Err = Error;
    fn from_str(s: &str) -> Result<Label> {
        match s.trim() {
            "1" => Ok(Label::One),
            "eps" => Ok(Label::Eps),
            "psi+" => Ok(Label::PsiPlus),
            "psi-" => Ok(Label::PsiMinus),
            t => t
                .strip_prefix("phi")
                .and_then(|d| d.parse::<usize>().ok())
                .filter(|&i| i >= 1)
                .map(Label::Phi)
                .ok_or_else(|| Error::UnknownLabel(s.to_string())),
        }
    }
}

/// Comma-joined label names, used as map keys.
pub fn key_string(labels: &[Label]) -> String {
    labels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
}

/// The fusion ring at rank `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionRing {
    p: usize,
    n: OddModulus,
    size: usize,
    adm: Vec<bool>,
    channels: Vec<Vec<usize>>,
    fp: Vec<f64>,
}

impl FusionRing {
    pub fn new(p: usize) -> Result<Self> {
        if p < 1 {
            return Err(Error::InvalidParams("p must be at least 1".into()));
        }
        let n = OddModulus::from_rank(p)?;
        let size = p + 4;
        let mut adm = vec![false; size * size * size];
        let eps = 1;
        let phi = |i: i64| (1 + g_reduce(i, n)) as usize;
        let (pp, pm) = (p + 2, p + 3);
        let all_phi: Vec<usize> = (1..=p).map(|i| 1 + i).collect();
        let mut add = |a: usize, b: usize, cs: &[usize]| {
            for &c in cs {
                adm[(a * size + b) * size + c] = true;
                adm[(b * size + a) * size + c] = true;
            }
        };
        for a in 0..size {
            add(0, a, &[a]);
        }
        add(eps, eps, &[0]);
        add(eps, pp, &[pm]);
        add(eps, pm, &[pp]);
        for i in 1..=p as i64 {
            let fi = phi(i);
            add(eps, fi, &[fi]);
            add(fi, fi, &[0, eps, phi(2 * i)]);
            for j in (1..=p as i64).filter(|&j| j != i) {
                add(fi, phi(j), &[phi(i - j), phi(i + j)]);
            }
            add(fi, pp, &[pp, pm]);
            add(fi, pm, &[pp, pm]);
        }
        let mut unit_phis = vec![0];
        unit_phis.extend(&all_phi);
        let mut eps_phis = vec![eps];
        eps_phis.extend(&all_phi);
        add(pp, pp, &unit_phis);
        add(pm, pm, &unit_phis);
        add(pp, pm, &eps_phis);

        let channels = (0..size * size).map(|ab| (0..size).filter(|&c| adm[ab * size + c]).collect()).collect();
        let root = (n.get() as f64).sqrt();
        let fp = (0..size)
            .map(|a| match Label::from_index(a, p) {
                Label::One | Label::Eps => 1.0,
                Label::Phi(_) => 2.0,
                _ => root,
            })
            .collect();
        Ok(FusionRing { p, n, size, adm, channels, fp })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn modulus(&self) -> OddModulus {
        self.n
    }

    /// Number of labels, `p + 4`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Vec<Label> {
        (0..self.size).map(|i| self.label(i)).collect()
    }

    pub fn label(&self, idx: usize) -> Label {
        Label::from_index(idx, self.p)
    }

    pub fn index(&self, l: Label) -> usize {
        l.index(self.p)
    }

    /// `N_{ab}^c = 1`, by index.
    #[inline]
    pub fn adm(&self, a: usize, b: usize, c: usize) -> bool {
        self.adm[(a * self.size + b) * self.size + c]
    }

    /// Channels `c` of `a (x) b` in canonical order, by index.
    #[inline]
    pub fn channels(&self, a: usize, b: usize) -> &[usize] {
        &self.channels[a * self.size + b]
    }

    pub fn multiplicity(&self, a: Label, b: Label, c: Label) -> u32 {
        self.adm(self.index(a), self.index(b), self.index(c)) as u32
    }

    pub fn fuse(&self, a: Label, b: Label) -> Vec<Label> {
        self.channels(self.index(a), self.index(b)).iter().map(|&c| self.label(c)).collect()
    }

    /// Every label is self-dual.
    pub fn dual(&self, a: Label) -> Label {
        a
    }

    /// All admissible triples in lexicographic canonical order.
    pub fn gamma(&self) -> Vec<(Label, Label, Label)> {
        let mut out = Vec::new();
        for a in 0..self.size {
            for b in 0..self.size {
                for &c in self.channels(a, b) {
                    out.push((self.label(a), self.label(b), self.label(c)));
                }
            }
        }
        out
    }

    pub fn fp_dim(&self, a: Label) -> f64 {
        self.fp[self.index(a)]
    }

    pub fn fp_dims(&self) -> &[f64] {
        &self.fp
    }

    /// `N_{x1 ... xn}^y`, extended recursively from the left.
    pub fn n_ext(&self, chain: &[Label], total: Label) -> u64 {
        match chain {
            [] => 0,
            [x] => (*x == total) as u64,
            _ => {
                let mut counts = vec![0u64; self.size];
                counts[self.index(chain[0])] = 1;
                for &x in &chain[1..] {
                    let xi = self.index(x);
                    let mut next = vec![0u64; self.size];
                    for (z, &cz) in counts.iter().enumerate().filter(|(_, &c)| c > 0) {
                        for &y in self.channels(z, xi) {
                            next[y] += cz;
                        }
                    }
                    counts = next;
                }
                counts[self.index(total)]
            }
        }
    }

    /// The group `G x Z_2`: `phi_i -> phi_{g(z i)}` for `z` in the half unit group,
    /// optionally combined with `psi+ <-> psi-`.
    pub fn automorphisms(&self) -> Vec<RingAutomorphism> {
        let group = HalfUnitGroup::new(self.n);
        let mut out = Vec::new();
        for &z in group.reps() {
            for swap in [false, true] {
                out.push(RingAutomorphism::new(self, z, swap));
            }
        }
        out
    }
}

/// A label permutation preserving the fusion rules.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingAutomorphism {
    pub z: i64,
    pub swap_psi: bool,
    perm: Vec<usize>,
    p: usize,
}

impl RingAutomorphism {
    pub fn new(ring: &FusionRing, z: i64, swap_psi: bool) -> Self {
        let p = ring.p();
        let perm = (0..ring.size())
            .map(|i| {
                let l = match ring.label(i) {
                    Label::Phi(k) => Label::Phi(g_reduce(z * k as i64, ring.modulus()) as usize),
                    x if swap_psi => x.psi_swapped(),
                    x => x,
                };
                l.index(p)
            })
            .collect();
        RingAutomorphism { z, swap_psi, perm, p }
    }

    pub fn identity(ring: &FusionRing) -> Self {
        Self::new(ring, 1, false)
    }

    #[inline]
    pub fn apply_idx(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn apply(&self, l: Label) -> Label {
        Label::from_index(self.perm[l.index(self.p)], self.p)
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn preserves(&self, ring: &FusionRing) -> bool {
        let s = ring.size();
        (0..s).all(|a| (0..s).all(|b| (0..s).all(|c| ring.adm(a, b, c) == ring.adm(self.perm[a], self.perm[b], self.perm[c]))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::*;

    #[test]
    fn label_order_and_names() {
        let ring = FusionRing::new(3).unwrap();
        let labels = ring.labels();
        assert!(labels.windows(2).all(|w| w[0] < w[1]));
        let names: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
        assert_eq!(names, ["1", "eps", "phi1", "phi2", "phi3", "psi+", "psi-"]);
        for (i, l) in labels.iter().enumerate() {
            assert_eq!(l.index(3), i);
            assert_eq!(Label::parse(&l.to_string(), 3).unwrap(), *l);
        }
        assert!(Label::parse("phi4", 3).is_err());
        assert!(Label::parse("phi0", 3).is_err());
        assert!(Label::parse("psi", 3).is_err());
    }

    #[test]
    fn fusion_examples() {
        let ring = FusionRing::new(2).unwrap();
        assert_eq!(ring.fuse(Phi(1), Phi(1)), vec![One, Eps, Phi(2)]);
        assert_eq!(ring.fuse(Phi(2), Phi(2)), vec![One, Eps, Phi(1)]);
        assert_eq!(ring.fuse(Phi(1), Phi(2)), vec![Phi(1), Phi(2)]);
        assert_eq!(ring.fuse(PsiPlus, PsiMinus), vec![Eps, Phi(1), Phi(2)]);
        assert_eq!(ring.fuse(Eps, PsiPlus), vec![PsiMinus]);
        for x in ring.labels() {
            assert_eq!(ring.fuse(One, x), vec![x]);
        }
    }

    #[test]
    fn n_ext_examples() {
        let r1 = FusionRing::new(1).unwrap();
        assert_eq!(r1.n_ext(&[PsiPlus; 3], PsiPlus), 2);
        assert_eq!(r1.n_ext(&[One; 3], One), 1);
        let r2 = FusionRing::new(2).unwrap();
        // 1, eps and phi2 all fuse with phi1 back to phi1
        assert_eq!(r2.n_ext(&[Phi(1); 3], Phi(1)), 3);
    }

    #[test]
    fn n_ext_matches_brute_force() {
        let ring = FusionRing::new(3).unwrap();
        let ls = ring.labels();
        for &a in &ls {
            for &b in &ls {
                for &c in &ls {
                    for &d in &ls {
                        let brute =
                            ls.iter().filter(|&&e| ring.multiplicity(a, b, e) == 1 && ring.multiplicity(e, c, d) == 1).count() as u64;
                        assert_eq!(ring.n_ext(&[a, b, c], d), brute);
                    }
                }
            }
        }
    }

    #[test]
    fn unit_commutative_self_dual() {
        for p in 1..=12 {
            let ring = FusionRing::new(p).unwrap();
            let s = ring.size();
            for a in 0..s {
                assert!(ring.adm(a, a, 0));
                for b in 0..s {
                    assert_eq!(ring.adm(a, 0, b), a == b);
                    assert_eq!(ring.adm(0, a, b), a == b);
                    assert_eq!(ring.adm(a, b, 0), a == b);
                    for c in 0..s {
                        assert_eq!(ring.adm(a, b, c), ring.adm(b, a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn associativity_exhaustive_to_30() {
        for p in 1..=30 {
            let ring = FusionRing::new(p).unwrap();
            let s = ring.size();
            for a in 0..s {
                for b in 0..s {
                    for c in 0..s {
                        for d in 0..s {
                            let left = ring.channels(a, b).iter().filter(|&&e| ring.adm(e, c, d)).count();
                            let right = ring.channels(b, c).iter().filter(|&&f| ring.adm(a, f, d)).count();
                            assert_eq!(left, right, "p={p} ({a},{b},{c},{d})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn fp_dims_are_a_character() {
        for p in 1..=20 {
            let ring = FusionRing::new(p).unwrap();
            let fp = ring.fp_dims();
            let total: f64 = fp.iter().map(|d| d * d).sum();
            assert!((total - 4.0 * (2 * p + 1) as f64).abs() < 1e-9);
            let s = ring.size();
            for a in 0..s {
                for b in 0..s {
                    let sum: f64 = ring.channels(a, b).iter().map(|&c| fp[c]).sum();
                    assert!((fp[a] * fp[b] - sum).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(FusionRing::new(4).unwrap().automorphisms().len(), 6);
        assert_eq!(FusionRing::new(1).unwrap().automorphisms().len(), 2);
    }

    #[test]
    fn automorphisms_form_a_group() {
        for p in 1..=15 {
            let ring = FusionRing::new(p).unwrap();
            let auts = ring.automorphisms();
            let perms: Vec<&[usize]> = auts.iter().map(|a| a.perm()).collect();
            for a in &auts {
                assert!(a.preserves(&ring));
                assert_eq!(a.apply(One), One);
                assert_eq!(a.apply(Eps), Eps);
                for b in &auts {
                    let comp: Vec<usize> = (0..ring.size()).map(|i| a.apply_idx(b.apply_idx(i))).collect();
                    assert!(perms.contains(&comp.as_slice()));
                }
            }
            assert!(perms.contains(&RingAutomorphism::identity(&ring).perm()));
        }
    }
}
