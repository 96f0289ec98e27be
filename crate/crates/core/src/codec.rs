//! Systematic encoding and sum-product decoding of lifted QC-LDPC codes.
//!
//! Codewords are laid out column block by column block, so the first `k*Z`
//! bits are the information bits and the last `m*Z` are parity.

use crate::error::{Error, Result};
use crate::gf2::{pack_bits, DenseGf2};
use crate::protograph::{BaseMatrix, BinaryMatrix};

/// LLR assigned to bits whose value is known to the decoder.
pub const LLR_SAT: f64 = 1e3;
/// Clip for every message passed along an edge.
pub const MSG_CLIP: f64 = 30.0;
pub const DEFAULT_MAX_ITERATIONS: usize = 100;

/// Encoder holding the lifted parity-check matrix and the inverse of its
/// square parity part.
#[derive(Debug, Clone)]
pub struct Encoder {
    h: BinaryMatrix,
    info_bits: usize,
    parity_inv: DenseGf2,
}

impl Encoder {
    pub fn new(base: &BaseMatrix) -> Result<Self> {
        let h = base.lift();
        let z = base.lift_factor();
        let info_bits = base.info_cols() * z;
        let size = base.rows() * z;
        let mut hp = DenseGf2::zeros(size, size);
        for r in 0..size {
            for &c in h.row(r) {
                let c = c as usize;
                if c >= info_bits {
                    hp.set(r, c - info_bits);
                }
            }
        }
        let parity_inv = hp
            .inverse()
            .map_err(|rank| Error::SingularParity { rank, size })?;
        Ok(Encoder {
            h,
            info_bits,
            parity_inv,
        })
    }

    pub fn parity_check(&self) -> &BinaryMatrix {
        &self.h
    }

    pub fn info_len(&self) -> usize {
        self.info_bits
    }

    pub fn code_len(&self) -> usize {
        self.h.cols()
    }

    /// Returns `[info | parity]` with `H * c^T = 0`.
    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.info_bits {
            return Err(Error::LengthMismatch {
                expected: self.info_bits,
                got: info.len(),
            });
        }
        let partial: Vec<u8> = (0..self.h.rows())
            .map(|r| {
                self.h
                    .row(r)
                    .iter()
                    .take_while(|&&c| (c as usize) < self.info_bits)
                    .fold(0u8, |acc, &c| acc ^ (info[c as usize] & 1))
            })
            .collect();
        let parity = self.parity_inv.mul_packed(&pack_bits(&partial));
        let mut cw = Vec::with_capacity(self.code_len());
        cw.extend(info.iter().map(|b| b & 1));
        cw.extend(parity);
        Ok(cw)
    }
}

/// Channel LLRs for one frame, `log P(0)/P(1)` per code bit.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrFrame(pub Vec<f64>);

impl LlrFrame {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    pub bits: Vec<u8>,
    pub converged: bool,
    /// Check-node updates performed before the syndrome was satisfied.
    pub iterations: usize,
}

/// Flooding sum-product decoder with reusable message buffers.
#[derive(Debug, Clone)]
pub struct BpDecoder<'a> {
    h: &'a BinaryMatrix,
    /// Check-to-variable messages, row-major edge order.
    c2v: Vec<f64>,
    /// For each variable, the edge indices touching it.
    var_edges: Vec<Vec<u32>>,
    posterior: Vec<f64>,
    scratch: Vec<f64>,
}

impl<'a> BpDecoder<'a> {
    pub fn new(h: &'a BinaryMatrix) -> Self {
        let mut var_edges = vec![Vec::new(); h.cols()];
        let mut e = 0u32;
        for r in 0..h.rows() {
            for &c in h.row(r) {
                var_edges[c as usize].push(e);
                e += 1;
            }
        }
        let max_row = (0..h.rows()).map(|r| h.row(r).len()).max().unwrap_or(0);
        BpDecoder {
            h,
            c2v: vec![0.0; e as usize],
            var_edges,
            posterior: vec![0.0; h.cols()],
            scratch: vec![0.0; max_row + 1],
        }
    }

    pub fn decode(&mut self, llr: &LlrFrame, max_iterations: usize) -> Result<DecodeResult> {
        let n = self.h.cols();
        if llr.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: llr.len(),
            });
        }
        self.c2v.iter_mut().for_each(|m| *m = 0.0);
        let mut bits = vec![0u8; n];
        let mut it = 0;
        loop {
            for v in 0..n {
                let total: f64 = llr.0[v]
                    + self.var_edges[v]
                        .iter()
                        .map(|&e| self.c2v[e as usize])
                        .sum::<f64>();
                self.posterior[v] = total;
                bits[v] = (total < 0.0) as u8;
            }
            if self.h.is_codeword(&bits) {
                return Ok(DecodeResult {
                    bits,
                    converged: true,
                    iterations: it,
                });
            }
            if it == max_iterations {
                return Ok(DecodeResult {
                    bits,
                    converged: false,
                    iterations: it,
                });
            }
            self.check_update();
            it += 1;
        }
    }

    fn check_update(&mut self) {
        let mut e0 = 0;
        for r in 0..self.h.rows() {
            let row = self.h.row(r);
            let d = row.len();
            // scratch[i] = tanh(v2c_i / 2); product excluding self via prefix/suffix
            for (i, &c) in row.iter().enumerate() {
                let v2c =
                    (self.posterior[c as usize] - self.c2v[e0 + i]).clamp(-MSG_CLIP, MSG_CLIP);
                self.scratch[i] = (0.5 * v2c).tanh();
            }
            let mut prefix = 1.0;
            for i in 0..d {
                let t = self.scratch[i];
                self.c2v[e0 + i] = prefix;
                prefix *= t;
            }
            let mut suffix = 1.0;
            for i in (0..d).rev() {
                let p = self.c2v[e0 + i] * suffix;
                suffix *= self.scratch[i];
                self.c2v[e0 + i] = (2.0 * p.atanh()).clamp(-MSG_CLIP, MSG_CLIP);
            }
            e0 += d;
        }
    }
}

/// One-shot decode with a fresh decoder.
pub fn decode_bp(h: &BinaryMatrix, llr: &LlrFrame, max_iterations: usize) -> Result<DecodeResult> {
    BpDecoder::new(h).decode(llr, max_iterations)
}
