//! On-disk model format (JSON), CSV export of `S`/`T`, and fault-injection specs.
//!
//! Complex numbers are `[re, im]` pairs. Map keys are comma-joined label strings in
//! a `BTreeMap`, so serialization order is fixed.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f_symbols::FStore;
use crate::fusion_ring::{key_string, Label};
use crate::params::Sign;
use crate::r_symbols::RStore;
use crate::spherical_modular::ModularData;

pub const SCHEMA_VERSION: &str = "1";

pub type Pair = [f64; 2];

fn pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub p: usize,
    pub r: i64,
    pub kappa: i64,
    pub lambda: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FEntry {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub entries: Vec<Vec<Pair>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModularBlock {
    /// `eps_a` in canonical label order.
    pub pivotal: Vec<i8>,
    pub qdims: Vec<f64>,
    pub total_dim: f64,
    #[serde(rename = "S")]
    pub s: Vec<Vec<Pair>>,
    #[serde(rename = "T")]
    pub t: Vec<Pair>,
}

impl ModularBlock {
    pub fn from_data(md: &ModularData) -> Self {
        let n = md.labels.len();
        ModularBlock {
            pivotal: md.pivotal.eps.clone(),
            qdims: md.qdims.clone(),
            total_dim: md.total_dim,
            s: (0..n).map(|i| (0..n).map(|j| pair(md.s[(i, j)])).collect()).collect(),
            t: md.t.iter().map(|&z| pair(z)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub schema_version: String,
    pub params: ModelParams,
    pub labels: Vec<String>,
    pub fusion: Vec<[String; 3]>,
    #[serde(rename = "F")]
    pub f: BTreeMap<String, FEntry>,
    #[serde(rename = "R")]
    pub r: BTreeMap<String, Pair>,
    /// Scaling dimensions `h_a` as `"num/den"`.
    pub h: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub modular: Option<ModularBlock>,
}

impl ModelFile {
    pub fn from_stores(fs: &FStore, rs: &RStore, modular: Option<&ModularData>) -> Result<Self> {
        if fs.params() != rs.params() {
            return Err(Error::InvalidParams("F and R stores have different parameters".into()));
        }
        let prm = fs.params();
        let ring = fs.ring();
        let names = |v: &[Label]| v.iter().map(|l| l.to_string()).collect::<Vec<_>>();
        let f = fs
            .iter()
            .map(|(key, m)| {
                let entries = (0..m.rows.len()).map(|i| (0..m.cols.len()).map(|j| [m.entries[(i, j)], 0.0]).collect()).collect();
                (key_string(&key), FEntry { rows: names(&m.rows), cols: names(&m.cols), entries })
            })
            .collect();
        let r = rs.iter().map(|(a, b, c, v)| (key_string(&[a, b, c]), pair(v))).collect();
        let h = ring
            .labels()
            .into_iter()
            .map(|l| {
                let x = rs.h(l);
                (l.to_string(), format!("{}/{}", x.numer(), x.denom()))
            })
            .collect();
        Ok(ModelFile {
            schema_version: SCHEMA_VERSION.into(),
            params: ModelParams { p: prm.p, r: prm.r, kappa: prm.kappa.value(), lambda: rs.lambda().value() },
            labels: names(&ring.labels()),
            fusion: ring.gamma().into_iter().map(|(a, b, c)| [a.to_string(), b.to_string(), c.to_string()]).collect(),
            f,
            r,
            h,
            modular: modular.map(ModularBlock::from_data),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: ModelFile = serde_json::from_str(s)?;
        if m.schema_version != SCHEMA_VERSION {
            return Err(Error::Json(format!("unsupported schema_version {:?}", m.schema_version)));
        }
        Ok(m)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// `S` as a labelled CSV grid of `re+imi` cells.
pub fn s_csv(md: &ModularData) -> String {
    let mut out = String::from("label");
    for l in &md.labels {
        write!(out, ",{l}").unwrap();
    }
    out.push('\n');
    for (i, l) in md.labels.iter().enumerate() {
        out.push_str(&l.to_string());
        for j in 0..md.labels.len() {
            write!(out, ",{}", complex_cell(md.s[(i, j)])).unwrap();
        }
        out.push('\n');
    }
    out
}

/// `T` diagonal as `label,re,im` rows.
pub fn t_csv(md: &ModularData) -> String {
    let mut out = String::from("label,re,im\n");
    for (l, z) in md.labels.iter().zip(&md.t) {
        writeln!(out, "{l},{:?},{:?}", z.re, z.im).unwrap();
    }
    out
}

fn complex_cell(z: Complex64) -> String {
    format!("{:?}{}{:?}i", z.re, if z.im.is_sign_negative() { "" } else { "+" }, z.im)
}

/// A single injected fault: negate one F entry or one R-symbol.
#[derive(Debug, Clone, PartialEq)]
pub enum MutationSpec {
    F { key: [String; 4], row: usize, col: usize },
    R { key: [String; 3] },
}

impl FromStr for MutationSpec {
    type Err = Error;

    /// `F:a,b,c,d:row,col` or `R:a,b,c`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadMutation(format!("expected F:a,b,c,d:row,col or R:a,b,c, got {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        let labels = |x: &str| x.split(',').map(|t| t.trim().to_string()).collect::<Vec<_>>();
        match parts.as_slice() {
            ["F", key, pos] => {
                let key: [String; 4] = labels(key).try_into().map_err(|_| bad())?;
                let rc: Vec<usize> = pos.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
                let [row, col] = rc.as_slice() else { return Err(bad()) };
                Ok(MutationSpec::F { key, row: *row, col: *col })
            }
            ["R", key] => Ok(MutationSpec::R { key: labels(key).try_into().map_err(|_| bad())? }),
            _ => Err(bad()),
        }
    }
}

impl MutationSpec {
    /// Applies F mutations to `fs`; R mutations leave it unchanged.
    pub fn apply_f(&self, fs: &FStore) -> Result<Option<FStore>> {
        match self {
            MutationSpec::F { key, row, col } => {
                let p = fs.params().p;
                let k = parse_labels::<4>(key, p)?;
                fs.with_entry_negated(k, *row, *col).map(Some)
            }
            MutationSpec::R { .. } => Ok(None),
        }
    }

    pub fn apply_r(&self, rs: &RStore) -> Result<Option<RStore>> {
        match self {
            MutationSpec::R { key } => {
                let [a, b, c] = parse_labels::<3>(key, rs.params().p)?;
                rs.with_entry_negated(a, b, c).map(Some)
            }
            MutationSpec::F { .. } => Ok(None),
        }
    }
}

fn parse_labels<const N: usize>(key: &[String; N], p: usize) -> Result<[Label; N]> {
    let mut out = [Label::One; N];
    for (o, s) in out.iter_mut().zip(key) {
        *o = Label::parse(s, p)?;
    }
    Ok(out)
}

/// Parses `1`, `+1`, `-1`.
pub fn parse_sign(s: &str) -> std::result::Result<Sign, String> {
    let v: i64 = s.trim().trim_start_matches('+').parse().map_err(|_| format!("expected 1 or -1, got {s:?}"))?;
    Sign::from_i64(v).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Params;
    use crate::spherical_modular::{compute_modular, PivotalSolution};

    fn model(p: usize, r: i64, k: Sign, lam: Sign) -> (FStore, RStore, ModelFile) {
        let prm = Params::new(p, r, k).unwrap();
        let fs = FStore::build(prm).unwrap();
        let rs = RStore::build(prm, lam).unwrap();
        let md = compute_modular(&fs, &rs, &PivotalSolution::positive(&prm)).unwrap();
        let mf = ModelFile::from_stores(&fs, &rs, Some(&md)).unwrap();
        (fs, rs, mf)
    }

    #[test]
    fn json_round_trip_preserves_values() {
        let (fs, rs, mf) = model(2, 3, Sign::Minus, Sign::Plus);
        let back = ModelFile::from_json(&mf.to_json().unwrap()).unwrap();
        assert_eq!(back, mf);
        for (key, m) in fs.iter() {
            let e = &back.f[&key_string(&key)];
            for i in 0..m.rows.len() {
                for j in 0..m.cols.len() {
                    assert_eq!(e.entries[i][j][0].to_bits(), m.entries[(i, j)].to_bits());
                }
            }
        }
        for (a, b, c, v) in rs.iter() {
            assert_eq!(back.r[&key_string(&[a, b, c])], [v.re, v.im]);
        }
    }

    #[test]
    fn model_shape_p1() {
        let (fs, _, mf) = model(1, 1, Sign::Plus, Sign::Plus);
        assert_eq!(mf.labels, ["1", "eps", "phi1", "psi+", "psi-"]);
        assert_eq!(mf.f.len(), fs.len());
        assert_eq!(mf.h["psi+"], "3/8");
        assert_eq!(mf.h["1"], "0/1");
        let t = &mf.modular.as_ref().unwrap().t;
        assert_eq!(t.len(), 5);
    }

    #[test]
    fn serialization_is_deterministic() {
        let a = model(2, 1, Sign::Plus, Sign::Minus).2.to_json().unwrap();
        let b = model(2, 1, Sign::Plus, Sign::Minus).2.to_json().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_shapes() {
        let prm = Params::new(1, 1, Sign::Plus).unwrap();
        let fs = FStore::build(prm).unwrap();
        let rs = RStore::build(prm, Sign::Plus).unwrap();
        let md = compute_modular(&fs, &rs, &PivotalSolution::positive(&prm)).unwrap();
        let s = s_csv(&md);
        assert_eq!(s.lines().count(), 6);
        assert!(s.starts_with("label,1,eps,phi1,psi+,psi-\n1,1.0+0.0i,"));
        assert_eq!(t_csv(&md).lines().count(), 6);
    }

    #[test]
    fn mutation_specs() {
        let m: MutationSpec = "F:psi+,psi+,psi+,psi+:0,0".parse().unwrap();
        assert_eq!(m, MutationSpec::F { key: ["psi+", "psi+", "psi+", "psi+"].map(String::from), row: 0, col: 0 });
        assert!(matches!("R:psi+,psi+,1".parse::<MutationSpec>(), Ok(MutationSpec::R { .. })));
        for bad in ["F:psi+,psi+:0,0", "F:1,1,1,1:0", "X:1", "R:1,1"] {
            assert!(bad.parse::<MutationSpec>().is_err(), "{bad}");
        }
        let (fs, rs, _) = model(1, 1, Sign::Plus, Sign::Plus);
        assert!(m.apply_f(&fs).unwrap().is_some());
        assert!(m.apply_r(&rs).unwrap().is_none());
        let out_of_range: MutationSpec = "F:psi+,psi+,psi+,psi+:5,0".parse().unwrap();
        assert!(out_of_range.apply_f(&fs).is_err());
    }

    #[test]
    fn signs() {
        assert_eq!(parse_sign("1"), Ok(Sign::Plus));
        assert_eq!(parse_sign("+1"), Ok(Sign::Plus));
        assert_eq!(parse_sign("-1"), Ok(Sign::Minus));
        assert!(parse_sign("0").is_err());
        assert!(parse_sign("x").is_err());
    }
}
