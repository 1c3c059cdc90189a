//! Synthetic unconfirmed-transaction feed, used to build the bundled capture
//! fixture and to drive the loopback feed in tests.
//!
//! Arrival density decays as `1/(t + tau)`, so cumulative transaction, node
//! and edge counts all follow a logarithmic growth curve. Addresses are
//! reused preferentially (weighted by past activity), which produces the
//! hub-and-star structure and heavy-tailed degrees of a real snapshot, plus
//! occasional change outputs back to the sender and re-announced duplicates.

use std::io::{self, Write};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ingest::write_log_record;

/// Parameters of a synthetic feed. Equal specs yield byte-identical frames.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeedSpec {
    pub n_tx: u64,
    pub duration_ms: u64,
    /// Epoch milliseconds of the first frame.
    pub start_ms: u64,
    /// Arrival-density scale: transaction k arrives at
    /// `start + tau (exp(k/c) - 1)` with `c = n_tx / ln(1 + duration/tau)`.
    pub tau_ms: u64,
    /// Probability that a participant address is fresh.
    pub new_address_prob: f64,
    /// Probability of a second input / second output.
    pub two_input_prob: f64,
    pub two_output_prob: f64,
    /// Probability that a two-output transaction sends change back to its
    /// first input address (a self-pair, dropped at extraction).
    pub change_prob: f64,
    /// Probability that a frame is a re-announcement of the previous one.
    pub duplicate_prob: f64,
    pub seed: u64,
}

impl Default for FeedSpec {
    /// The bundled six-hour fixture: 3600 transactions over six hours,
    /// seed 20170704.
    fn default() -> FeedSpec {
        FeedSpec {
            n_tx: 3600,
            duration_ms: 6 * 3600 * 1000,
            start_ms: 1_500_000_000_000,
            tau_ms: 60_000,
            new_address_prob: 0.78,
            two_input_prob: 0.15,
            two_output_prob: 0.65,
            change_prob: 0.10,
            duplicate_prob: 0.001,
            seed: 20_170_704,
        }
    }
}

#[derive(Serialize)]
struct PrevOut<'a> {
    prev_out: Slot<'a>,
}

#[derive(Serialize)]
struct Slot<'a> {
    addr: &'a str,
    value: u64,
}

#[derive(Serialize)]
struct Payload<'a> {
    hash: &'a str,
    time: u64,
    inputs: Vec<PrevOut<'a>>,
    out: Vec<Slot<'a>>,
}

#[derive(Serialize)]
struct Frame<'a> {
    op: &'a str,
    x: Payload<'a>,
}

const BASE58: &[u8] = b"123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

struct AddressPool {
    addresses: Vec<String>,
    /// One entry per past use; uniform draws give activity-weighted reuse.
    uses: Vec<u32>,
}

impl AddressPool {
    fn fresh(&mut self, rng: &mut ChaCha8Rng) -> usize {
        let len = rng.random_range(26..=34);
        let mut s = String::with_capacity(len);
        s.push('1');
        for _ in 1..len {
            s.push(BASE58[rng.random_range(0..BASE58.len())] as char);
        }
        self.addresses.push(s);
        self.addresses.len() - 1
    }

    fn pick(&mut self, rng: &mut ChaCha8Rng, new_prob: f64, exclude: &[usize]) -> usize {
        for _ in 0..16 {
            let idx = if self.uses.is_empty() || rng.random::<f64>() < new_prob {
                self.fresh(rng)
            } else {
                self.uses[rng.random_range(0..self.uses.len())] as usize
            };
            if !exclude.contains(&idx) {
                return idx;
            }
        }
        self.fresh(rng)
    }
}

/// Generates the frame stream: `(received_at_ms, frame_json)` pairs with
/// non-decreasing timestamps.
pub fn generate_frames(spec: &FeedSpec) -> Vec<(u64, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut pool = AddressPool {
        addresses: Vec::new(),
        uses: Vec::new(),
    };
    let c = spec.n_tx as f64 / (1.0 + spec.duration_ms as f64 / spec.tau_ms as f64).ln();
    let mut frames = Vec::with_capacity(spec.n_tx as usize);
    let mut last: Option<String> = None;
    for k in 0..spec.n_tx {
        let offset = (spec.tau_ms as f64 * ((k as f64 / c).exp() - 1.0)) as u64;
        let t = spec.start_ms + offset.min(spec.duration_ms - 1);

        if let Some(prev) = &last {
            if rng.random::<f64>() < spec.duplicate_prob {
                frames.push((t, prev.clone()));
                continue;
            }
        }

        let n_in = if rng.random::<f64>() < spec.two_input_prob { 2 } else { 1 };
        let n_out = if rng.random::<f64>() < spec.two_output_prob { 2 } else { 1 };

        let mut input_idx: Vec<usize> = Vec::with_capacity(n_in);
        for _ in 0..n_in {
            let idx = pool.pick(&mut rng, spec.new_address_prob, &input_idx);
            input_idx.push(idx);
        }
        let mut output_idx: Vec<usize> = Vec::with_capacity(n_out);
        for o in 0..n_out {
            if o == 1 && rng.random::<f64>() < spec.change_prob {
                output_idx.push(input_idx[0]); // change back to the sender
                continue;
            }
            let idx = pool.pick(&mut rng, spec.new_address_prob, &output_idx);
            output_idx.push(idx);
        }

        // log-uniform total between 10^5 and 10^10 satoshi, ~0.1-1% fee
        let total_in = (1e5 * (rng.random::<f64>() * 5.0_f64 * std::f64::consts::LN_10).exp())
            .round() as u64;
        let fee = total_in / rng.random_range(100..1000);
        let total_out = total_in - fee;
        let input_values = split_value(&mut rng, total_in, n_in);
        let output_values = split_value(&mut rng, total_out, n_out);

        let mut hash = String::with_capacity(64);
        for _ in 0..32 {
            hash.push_str(&format!("{:02x}", rng.random::<u8>()));
        }

        let frame = Frame {
            op: "utx",
            x: Payload {
                hash: &hash,
                time: t / 1000,
                inputs: input_idx
                    .iter()
                    .zip(&input_values)
                    .map(|(&i, &value)| PrevOut {
                        prev_out: Slot {
                            addr: &pool.addresses[i],
                            value,
                        },
                    })
                    .collect(),
                out: output_idx
                    .iter()
                    .zip(&output_values)
                    .map(|(&i, &value)| Slot {
                        addr: &pool.addresses[i],
                        value,
                    })
                    .collect(),
            },
        };
        let json = serde_json::to_string(&frame).expect("frame serializes");
        for idx in input_idx.into_iter().chain(output_idx) {
            pool.uses.push(idx as u32);
        }
        frames.push((t, json.clone()));
        last = Some(json);
    }
    frames
}

fn split_value(rng: &mut ChaCha8Rng, total: u64, parts: usize) -> Vec<u64> {
    if parts == 1 {
        return vec![total];
    }
    let first = (total as f64 * (0.2 + 0.6 * rng.random::<f64>())) as u64;
    vec![first, total - first]
}

/// Writes the spec's frames as a capture log; returns the record count.
pub fn write_capture_log<W: Write>(spec: &FeedSpec, w: &mut W) -> io::Result<u64> {
    let frames = generate_frames(spec);
    let n = frames.len() as u64;
    for (t, frame) in frames {
        write_log_record(w, t, &frame)?;
    }
    Ok(n)
}
