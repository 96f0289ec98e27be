//! Base matrices (protographs) of quasi-cyclic LDPC codes.
//!
//! A base matrix is an `m x n` array of shift values. An entry of `-1` is a
//! `Z x Z` all-zero block; an entry `h >= 0` is the identity right-shifted `h`
//! times. Column indices in every external format are 1-based.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Marker for a zero block.
pub const ZERO_BLOCK: i32 = -1;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BaseMatrix {
    rows: usize,
    cols: usize,
    lift: usize,
    entries: Vec<i32>,
}

impl BaseMatrix {
    /// Builds a base matrix from row-major entries, checking every invariant.
    pub fn new(rows: usize, cols: usize, lift: usize, entries: Vec<i32>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix("empty matrix".into()));
        }
        if cols <= rows {
            return Err(Error::InvalidMatrix(format!(
                "need at least one information column (n={cols}, m={rows})"
            )));
        }
        if lift == 0 {
            return Err(Error::InvalidMatrix(
                "lifting factor must be positive".into(),
            ));
        }
        if entries.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        if let Some(&h) = entries
            .iter()
            .find(|&&h| h < ZERO_BLOCK || h >= lift as i32)
        {
            return Err(Error::InvalidMatrix(format!(
                "entry {h} outside [-1, {}]",
                lift - 1
            )));
        }
        let bm = BaseMatrix {
            rows,
            cols,
            lift,
            entries,
        };
        if let Some(i) = (0..rows).find(|&i| bm.row_degree(i) == 0) {
            return Err(Error::InvalidMatrix(format!("row {} has no edges", i + 1)));
        }
        if let Some(j) = (0..cols).find(|&j| bm.column_degree(j) == 0) {
            return Err(Error::InvalidMatrix(format!(
                "column {} has no edges",
                j + 1
            )));
        }
        Ok(bm)
    }

    /// Number of check rows `m`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of variable columns `n`.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Lifting factor `Z`.
    pub fn lift_factor(&self) -> usize {
        self.lift
    }

    /// Number of information columns `k = n - m`.
    pub fn info_cols(&self) -> usize {
        self.cols - self.rows
    }

    pub fn rate(&self) -> Ratio<usize> {
        Ratio::new(self.info_cols(), self.cols)
    }

    /// Entry at zero-based `(row, col)`.
    pub fn entry(&self, row: usize, col: usize) -> i32 {
        self.entries[row * self.cols + col]
    }

    pub fn is_edge(&self, row: usize, col: usize) -> bool {
        self.entry(row, col) != ZERO_BLOCK
    }

    pub fn row_degree(&self, row: usize) -> usize {
        (0..self.cols).filter(|&j| self.is_edge(row, j)).count()
    }

    pub fn column_degree(&self, col: usize) -> usize {
        (0..self.rows).filter(|&i| self.is_edge(i, col)).count()
    }

    /// Count of non-negative entries, i.e. protograph edges.
    pub fn edge_count(&self) -> usize {
        self.entries.iter().filter(|&&h| h != ZERO_BLOCK).count()
    }

    /// Same support with every shift rescaled to a new lifting factor as
    /// `floor(h * z / Z)`. This is the 802.16e rule for deriving per-`Z`
    /// shifts from the `Z = 96` master matrix.
    pub fn with_lift(&self, z: usize) -> Result<Self> {
        if z == self.lift {
            return Ok(self.clone());
        }
        let entries = self
            .entries
            .iter()
            .map(|&h| {
                if h == ZERO_BLOCK {
                    h
                } else {
                    (h as usize * z / self.lift) as i32
                }
            })
            .collect();
        BaseMatrix::new(self.rows, self.cols, z, entries)
    }

    /// Removes the listed 1-based columns; surviving columns keep their order.
    pub fn erase_columns(&self, cols: &[usize]) -> Result<Self> {
        let mut erased = vec![false; self.cols];
        for &c in cols {
            if c == 0 || c > self.cols {
                return Err(Error::ColumnOutOfRange {
                    index: c,
                    n: self.cols,
                });
            }
            erased[c - 1] = true;
        }
        let keep: Vec<usize> = (0..self.cols).filter(|&j| !erased[j]).collect();
        for i in 0..self.rows {
            if keep.iter().all(|&j| !self.is_edge(i, j)) {
                return Err(Error::DegenerateCheck { row: i + 1 });
            }
        }
        if keep.len() <= self.rows {
            return Err(Error::InvalidMatrix(format!(
                "erasing {} columns leaves no information column",
                self.cols - keep.len()
            )));
        }
        let entries = (0..self.rows)
            .flat_map(|i| keep.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.entry(i, j))
            .collect();
        Ok(BaseMatrix {
            rows: self.rows,
            cols: keep.len(),
            lift: self.lift,
            entries,
        })
    }

    /// Expands every entry into its `Z x Z` block.
    pub fn lift(&self) -> BinaryMatrix {
        let z = self.lift;
        let mut row_adj = vec![Vec::new(); self.rows * z];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let h = self.entry(i, j);
                if h == ZERO_BLOCK {
                    continue;
                }
                for r in 0..z {
                    row_adj[i * z + r].push((j * z + (r + h as usize) % z) as u32);
                }
            }
        }
        BinaryMatrix::from_rows(self.cols * z, row_adj)
    }

    /// Column-degree histogram as `(degree, count)` pairs, ascending by degree.
    pub fn degree_profile(&self) -> Vec<(usize, usize)> {
        let mut counts = std::collections::BTreeMap::new();
        for j in 0..self.cols {
            *counts.entry(self.column_degree(j)).or_insert(0) += 1;
        }
        counts.into_iter().collect()
    }
}

impl FromStr for BaseMatrix {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: "missing header".into(),
        })?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line: hline,
                msg: format!("bad header: {e}"),
            })?;
        let [n, m, z] = dims[..] else {
            return Err(Error::Parse {
                line: hline,
                msg: format!("header needs \"n m Z\", got {} fields", dims.len()),
            });
        };

        let mut entries = Vec::with_capacity(n * m);
        for r in 0..m {
            let (lineno, line) = lines.next().ok_or(Error::Parse {
                line: hline,
                msg: format!("expected {m} rows, found {r}"),
            })?;
            let row: Vec<i32> = line
                .split_whitespace()
                .map(|t| t.parse::<i32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse {
                    line: lineno,
                    msg: e.to_string(),
                })?;
            if row.len() != n {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected {n} entries, found {}", row.len()),
                });
            }
            entries.extend(row);
        }
        if let Some((lineno, _)) = lines.next() {
            return Err(Error::Parse {
                line: lineno,
                msg: "trailing data after last row".into(),
            });
        }
        BaseMatrix::new(m, n, z, entries)
    }
}

impl fmt::Display for BaseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.cols, self.rows, self.lift)?;
        let width = (self.lift.saturating_sub(1)).to_string().len().max(2);
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| format!("{:>width$}", self.entry(i, j)))
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Sparse binary parity-check matrix with row and column adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    cols: usize,
    row_adj: Vec<Vec<u32>>,
    col_adj: Vec<Vec<u32>>,
}

impl BinaryMatrix {
    /// Builds from per-row column lists (zero-based, sorted internally).
    pub fn from_rows(cols: usize, mut row_adj: Vec<Vec<u32>>) -> Self {
        let mut col_adj = vec![Vec::new(); cols];
        for (i, row) in row_adj.iter_mut().enumerate() {
            row.sort_unstable();
            for &c in row.iter() {
                col_adj[c as usize].push(i as u32);
            }
        }
        BinaryMatrix {
            cols,
            row_adj,
            col_adj,
        }
    }

    pub fn rows(&self) -> usize {
        self.row_adj.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.row_adj[i]
    }

    pub fn col(&self, j: usize) -> &[u32] {
        &self.col_adj[j]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.row_adj[i].binary_search(&(j as u32)).is_ok()
    }

    pub fn ones(&self) -> usize {
        self.row_adj.iter().map(Vec::len).sum()
    }

    /// `H * x` over GF(2).
    pub fn syndrome(&self, bits: &[u8]) -> Vec<u8> {
        self.row_adj
            .iter()
            .map(|row| row.iter().fold(0u8, |acc, &c| acc ^ bits[c as usize]))
            .collect()
    }

    pub fn is_codeword(&self, bits: &[u8]) -> bool {
        self.row_adj
            .iter()
            .all(|row| row.iter().fold(0u8, |acc, &c| acc ^ bits[c as usize]) == 0)
    }

    /// MacKay alist text: `N M`, max column/row weights, the weight lists,
    /// then 1-based neighbour lists zero-padded to the maximum weight.
    pub fn to_alist(&self) -> String {
        let max_col = self.col_adj.iter().map(Vec::len).max().unwrap_or(0);
        let max_row = self.row_adj.iter().map(Vec::len).max().unwrap_or(0);
        let mut out = String::new();
        let join = |v: &mut dyn Iterator<Item = usize>| {
            v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        };
        out.push_str(&format!("{} {}\n", self.cols, self.rows()));
        out.push_str(&format!("{max_col} {max_row}\n"));
        out.push_str(&join(&mut self.col_adj.iter().map(Vec::len)));
        out.push('\n');
        out.push_str(&join(&mut self.row_adj.iter().map(Vec::len)));
        out.push('\n');
        for (adj, width) in [(&self.col_adj, max_col), (&self.row_adj, max_row)] {
            for list in adj.iter() {
                let padded = list
                    .iter()
                    .map(|&x| x as usize + 1)
                    .chain(std::iter::repeat(0))
                    .take(width);
                out.push_str(&join(&mut padded.into_iter()));
                out.push('\n');
            }
        }
        out
    }
}
