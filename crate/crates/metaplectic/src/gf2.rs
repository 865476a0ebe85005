//! Linear systems over GF(2), used for sign problems (pivotal coefficients, sign gauges).

/// Equations `sum_{v in vars} x_v = rhs (mod 2)`.
#[derive(Debug, Clone)]
pub struct Gf2System {
    nvars: usize,
    words: usize,
    rows: Vec<(Vec<u64>, bool)>,
}

/// General solution: `particular + span(kernel)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2Solution {
    pub particular: Vec<bool>,
    pub kernel: Vec<Vec<bool>>,
}

impl Gf2Solution {
    /// Every solution, in the order of the binary counter over kernel vectors.
    /// Panics if the kernel has more than 20 dimensions.
    pub fn enumerate(&self) -> Vec<Vec<bool>> {
        assert!(self.kernel.len() <= 20, "solution space too large to enumerate");
        (0u32..1 << self.kernel.len())
            .map(|mask| {
                let mut x = self.particular.clone();
                for (k, v) in self.kernel.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        x.iter_mut().zip(v).for_each(|(a, &b)| *a ^= b);
                    }
                }
                x
            })
            .collect()
    }
}

impl Gf2System {
    pub fn new(nvars: usize) -> Self {
        Gf2System { nvars, words: nvars.div_ceil(64).max(1), rows: Vec::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Adds one equation; a variable listed twice cancels.
    pub fn add(&mut self, vars: &[usize], rhs: bool) {
        let mut row = vec![0u64; self.words];
        for &v in vars {
            assert!(v < self.nvars, "variable {v} out of range");
            row[v / 64] ^= 1 << (v % 64);
        }
        self.rows.push((row, rhs));
    }

    /// Gauss-Jordan elimination; `None` if inconsistent.
    pub fn solve(&self) -> Option<Gf2Solution> {
        let mut rows = self.rows.clone();
        let mut pivots: Vec<usize> = Vec::new();
        let mut rank = 0;
        for col in 0..self.nvars {
            let (w, bit) = (col / 64, 1u64 << (col % 64));
            let Some(src) = (rank..rows.len()).find(|&i| rows[i].0[w] & bit != 0) else {
                continue;
            };
            rows.swap(rank, src);
            let (pr, pb) = rows[rank].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != rank && row.0[w] & bit != 0 {
                    row.0.iter_mut().zip(&pr).for_each(|(a, b)| *a ^= b);
                    row.1 ^= pb;
                }
            }
            pivots.push(col);
            rank += 1;
        }
        if rows[rank..].iter().any(|(_, b)| *b) {
            return None;
        }
        let get = |row: &[u64], c: usize| row[c / 64] >> (c % 64) & 1 == 1;
        let mut particular = vec![false; self.nvars];
        for (i, &pc) in pivots.iter().enumerate() {
            particular[pc] = rows[i].1;
        }
        let free: Vec<usize> = (0..self.nvars).filter(|c| !pivots.contains(c)).collect();
        let kernel = free
            .iter()
            .map(|&fc| {
                let mut v = vec![false; self.nvars];
                v[fc] = true;
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = get(&rows[i].0, fc);
                }
                v
            })
            .collect();
        Some(Gf2Solution { particular, kernel })
    }
}
