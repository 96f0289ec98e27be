//! Monte Carlo BER/FER estimation over BPSK and AWGN.
//!
//! Every frame draws its bits and noise from a ChaCha8 stream keyed by
//! `(seed, snr index, frame index)`, and frames are tallied in index order.
//! Results therefore do not depend on the number of worker threads.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::codec::{BpDecoder, Encoder, LlrFrame, DEFAULT_MAX_ITERATIONS, LLR_SAT};
use crate::error::{Error, Result};
use crate::protograph::BaseMatrix;
use crate::pruning::{BitSchedule, PruningPattern};

pub const DEFAULT_MIN_FRAME_ERRORS: u64 = 100;
pub const DEFAULT_MAX_FRAMES: u64 = 1_000_000;
const BATCH: u64 = 64;

#[derive(Debug, Clone)]
pub struct SimPlan {
    /// Base matrix at the lifting factor to simulate.
    pub base: BaseMatrix,
    pub pattern: PruningPattern,
    pub shortened_bits: usize,
    pub punctured_bits: usize,
    pub ebno_db: Vec<f64>,
    pub min_frame_errors: u64,
    pub max_frames: u64,
    pub seed: u64,
    pub max_iterations: usize,
    /// Skip the noise draw; the decoder still sees finite LLRs at the
    /// configured SNR.
    pub noiseless: bool,
}

impl SimPlan {
    /// Plan pruning whole columns of the pattern, `N_s = alpha Z` and
    /// `N_p = beta Z`.
    pub fn whole_columns(base: BaseMatrix, pattern: PruningPattern, ebno_db: Vec<f64>) -> Self {
        let z = base.lift_factor();
        SimPlan {
            shortened_bits: pattern.alpha() * z,
            punctured_bits: pattern.beta() * z,
            base,
            pattern,
            ebno_db,
            min_frame_errors: DEFAULT_MIN_FRAME_ERRORS,
            max_frames: DEFAULT_MAX_FRAMES,
            seed: 0,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            noiseless: false,
        }
    }

    pub fn schedule(&self) -> Result<BitSchedule> {
        self.pattern.validate(&self.base)?;
        BitSchedule::new(
            &self.pattern,
            self.base.cols(),
            self.base.info_cols(),
            self.base.lift_factor(),
            self.shortened_bits,
            self.punctured_bits,
        )
    }

    fn validate(&self) -> Result<()> {
        if self.ebno_db.is_empty() {
            return Err(Error::InvalidPlan("no SNR points".into()));
        }
        if let Some(x) = self.ebno_db.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidPlan(format!("SNR {x} is not finite")));
        }
        if self.max_frames == 0 {
            return Err(Error::InvalidPlan("max_frames must be positive".into()));
        }
        if self.min_frame_errors == 0 {
            return Err(Error::InvalidPlan(
                "min_frame_errors must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimPoint {
    pub ebno_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    pub seconds: f64,
}

/// Noise variance per real dimension for unit-energy BPSK at rate `rate`.
pub fn noise_variance(ebno_db: f64, rate: f64) -> f64 {
    1.0 / (2.0 * rate * 10f64.powf(ebno_db / 10.0))
}

/// Parses `start:step:stop` (inclusive) or a single value.
pub fn parse_sweep(text: &str) -> Result<Vec<f64>> {
    let bad = |msg: &str| Error::InvalidPlan(format!("sweep \"{text}\": {msg}"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| bad(&e.to_string()))?;
    match parts[..] {
        [x] => Ok(vec![x]),
        [start, step, stop] => {
            if !(step > 0.0) || stop < start {
                return Err(bad("need step > 0 and stop >= start"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=count).map(|i| start + i as f64 * step).collect())
        }
        _ => Err(bad("expected start:step:stop")),
    }
}

fn frame_rng(seed: u64, snr_idx: usize, frame: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(snr_idx as u64).to_le_bytes());
    key[16..24].copy_from_slice(&frame.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum BitRole {
    Sent,
    Shortened,
    Punctured,
}

struct Link {
    encoder: Encoder,
    roles: Vec<BitRole>,
    info_positions: Vec<usize>,
    rate: f64,
}

impl Link {
    fn new(plan: &SimPlan) -> Result<Self> {
        let sched = plan.schedule()?;
        let encoder = Encoder::new(&plan.base)?;
        let mut roles = vec![BitRole::Sent; encoder.code_len()];
        for p in sched.shortened_positions() {
            roles[p] = BitRole::Shortened;
        }
        for p in sched.punctured_positions() {
            roles[p] = BitRole::Punctured;
        }
        let info_positions = (0..encoder.info_len())
            .filter(|&i| roles[i] != BitRole::Shortened)
            .collect();
        let rate = sched.info_bits as f64 / sched.transmitted as f64;
        Ok(Link {
            encoder,
            roles,
            info_positions,
            rate,
        })
    }

    fn frame(&self, rng: &mut ChaCha8Rng, sigma2: f64, noiseless: bool) -> (Vec<u8>, LlrFrame) {
        let mut info = vec![0u8; self.encoder.info_len()];
        for &i in &self.info_positions {
            info[i] = rng.random::<bool>() as u8;
        }
        let cw = self.encoder.encode(&info).expect("info length is fixed");
        let sigma = sigma2.sqrt();
        let llr = cw
            .iter()
            .zip(&self.roles)
            .map(|(&b, role)| match role {
                BitRole::Shortened => LLR_SAT,
                BitRole::Punctured => 0.0,
                BitRole::Sent => {
                    let noise: f64 = if noiseless {
                        0.0
                    } else {
                        rng.sample(StandardNormal)
                    };
                    2.0 * (1.0 - 2.0 * b as f64 + sigma * noise) / sigma2
                }
            })
            .collect();
        (info, LlrFrame(llr))
    }
}

/// Runs every SNR point of the plan on the current rayon pool.
pub fn run_sim(plan: &SimPlan) -> Result<Vec<SimPoint>> {
    plan.validate()?;
    let link = Link::new(plan)?;
    let h = link.encoder.parity_check();
    let mut out = Vec::with_capacity(plan.ebno_db.len());
    for (snr_idx, &ebno) in plan.ebno_db.iter().enumerate() {
        let start = Instant::now();
        let sigma2 = noise_variance(ebno, link.rate);
        let (mut frames, mut bit_errors, mut frame_errors) = (0u64, 0u64, 0u64);
        'batches: while frames < plan.max_frames {
            let end = (frames + BATCH).min(plan.max_frames);
            let results: Vec<u64> = (frames..end)
                .into_par_iter()
                .map_init(
                    || BpDecoder::new(h),
                    |dec, f| {
                        let mut rng = frame_rng(plan.seed, snr_idx, f);
                        let (info, llr) = link.frame(&mut rng, sigma2, plan.noiseless);
                        let res = dec
                            .decode(&llr, plan.max_iterations)
                            .expect("frame length matches H");
                        link.info_positions
                            .iter()
                            .filter(|&&i| res.bits[i] != info[i])
                            .count() as u64
                    },
                )
                .collect();
            for errs in results {
                frames += 1;
                bit_errors += errs;
                frame_errors += (errs > 0) as u64;
                if frame_errors >= plan.min_frame_errors {
                    break 'batches;
                }
            }
        }
        let info_bits = link.info_positions.len() as f64;
        out.push(SimPoint {
            ebno_db: ebno,
            frames,
            bit_errors,
            frame_errors,
            ber: bit_errors as f64 / (frames as f64 * info_bits),
            fer: frame_errors as f64 / frames as f64,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(out)
}

pub const CSV_HEADER: &str = "ebno_db,frames,bit_errors,frame_errors,ber,fer,seconds";

pub fn to_csv(points: &[SimPoint]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for p in points {
        s.push_str(&format!(
            "{},{},{},{},{:e},{:e},{:.3}\n",
            p.ebno_db, p.frames, p.bit_errors, p.frame_errors, p.ber, p.fer, p.seconds
        ));
    }
    s
}
