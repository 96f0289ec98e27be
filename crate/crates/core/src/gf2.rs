//! Dense bit-packed matrices over GF(2).

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseGf2 {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl DenseGf2 {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        DenseGf2 {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DenseGf2::zeros(n, n);
        for i in 0..n {
            m.set(i, i);
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.words + c / 64] >> (c % 64)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize) {
        self.data[r * self.words + c / 64] |= 1 << (c % 64);
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.words {
            self.data.swap(a * self.words + w, b * self.words + w);
        }
    }

    /// `row[dst] ^= row[src]`
    fn xor_row(&mut self, dst: usize, src: usize) {
        let w = self.words;
        let (d, s) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * w);
            (&mut lo[dst * w..(dst + 1) * w], &hi[..w])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * w);
            (&mut hi[..w], &lo[src * w..(src + 1) * w])
        };
        for (x, y) in d.iter_mut().zip(s) {
            *x ^= *y;
        }
    }

    /// Gauss-Jordan inverse of a square matrix; on failure returns the rank.
    pub fn inverse(&self) -> Result<DenseGf2, usize> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = DenseGf2::identity(n);
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| a.get(r, col)) else {
                return Err(a.rank_lower_bound(col));
            };
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            for r in 0..n {
                if r != col && a.get(r, col) {
                    a.xor_row(r, col);
                    inv.xor_row(r, col);
                }
            }
        }
        Ok(inv)
    }

    fn rank_lower_bound(&self, done: usize) -> usize {
        // columns before `done` are already pivoted; finish elimination on a copy
        let mut a = self.clone();
        let mut rank = done;
        for col in done..self.cols {
            if let Some(p) = (rank..self.rows).find(|&r| a.get(r, col)) {
                a.swap_rows(rank, p);
                for r in rank + 1..self.rows {
                    if a.get(r, col) {
                        a.xor_row(r, rank);
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    /// `self * v` with `v` packed into words.
    pub fn mul_packed(&self, v: &[u64]) -> Vec<u8> {
        (0..self.rows)
            .map(|r| {
                let ones: u32 = self
                    .row_words(r)
                    .iter()
                    .zip(v)
                    .map(|(a, b)| (a & b).count_ones())
                    .sum();
                (ones & 1) as u8
            })
            .collect()
    }
}

pub fn pack_bits(bits: &[u8]) -> Vec<u64> {
    let mut out = vec![0u64; bits.len().div_ceil(64)];
    for (i, &b) in bits.iter().enumerate() {
        if b & 1 == 1 {
            out[i / 64] |= 1 << (i % 64);
        }
    }
    out
}
