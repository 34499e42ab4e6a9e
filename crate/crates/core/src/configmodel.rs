//! Configuration-model sampling for degree sequences in {3, 4}.

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, usage, Error, Result};
use crate::multigraph::MultiGraph;

/// Default rejection budget for [`sample_no_loops`].
pub const DEFAULT_MAX_RETRIES: usize = 1000;

/// Per-vertex degree list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSequence(Vec<u32>);

impl DegreeSequence {
    /// Wraps a raw sequence without checking the {3, 4} restriction; see [`validate`](Self::validate).
    pub fn new(degrees: Vec<u32>) -> Self {
        DegreeSequence(degrees)
    }

    pub fn cubic(n: usize) -> Self {
        DegreeSequence(vec![3; n])
    }

    /// `n` vertices, `floor(p * n)` of them of degree 4 and the rest of degree 3.
    ///
    /// When the degree sum comes out odd, one vertex is flipped (a 3 becomes a 4,
    /// or a 4 becomes a 3 if every vertex is already 4) and `true` is returned
    /// alongside the sequence.
    pub fn with_deg4_fraction(n: usize, p: f64) -> Result<(Self, bool)> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("degree-4 fraction {p} outside [0, 1]")));
        }
        let mut fours = ((p * n as f64).floor() as usize).min(n);
        let mut adjusted = false;
        if (3 * (n - fours) + 4 * fours) % 2 == 1 {
            adjusted = true;
            if fours < n {
                fours += 1;
            } else {
                fours -= 1;
            }
        }
        let mut d = vec![4; fours];
        d.resize(n, 3);
        Ok((DegreeSequence(d), adjusted))
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Σ d(i) = 2ν.
    pub fn degree_sum(&self) -> u64 {
        self.0.iter().map(|&d| d as u64).sum()
    }

    /// Accepts iff every degree is 3 or 4 and the sum is even.
    pub fn validate(&self) -> Result<()> {
        if let Some((i, d)) = self.0.iter().enumerate().find(|(_, &d)| d != 3 && d != 4) {
            return Err(invalid(format!("vertex {i} has degree {d}, expected 3 or 4")));
        }
        self.check_parity()
    }

    fn check_parity(&self) -> Result<()> {
        let sum = self.degree_sum();
        if sum % 2 == 1 {
            return Err(invalid(format!("degree sum {sum} is odd")));
        }
        Ok(())
    }
}

/// One sampled configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingSample {
    /// Endpoint pairs, in configuration order.
    pub pairs: Vec<(usize, usize)>,
    /// Rejected draws before this one was accepted.
    pub retries: usize,
}

impl PairingSample {
    pub fn into_graph(self, n: usize) -> Result<MultiGraph> {
        MultiGraph::build(n, &self.pairs)
    }
}

/// Uniform perfect pairing of the points `0..points`: shuffle, then pair
/// consecutive items.
pub fn random_pairing<R: Rng + ?Sized>(points: usize, rng: &mut R) -> Result<Vec<(usize, usize)>> {
    if points % 2 == 1 {
        return Err(usage(format!("cannot pair an odd number ({points}) of points")));
    }
    let mut w: Vec<usize> = (0..points).collect();
    w.shuffle(rng);
    Ok(w.chunks_exact(2).map(|c| (c[0], c[1])).collect())
}

/// Options for [`sample_with`].
#[derive(Clone, Copy, Debug)]
pub struct SampleOptions {
    pub max_retries: usize,
    /// Also reject configurations with parallel edges. No distributional
    /// guarantees are attached to this mode.
    pub strict_simple: bool,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions { max_retries: DEFAULT_MAX_RETRIES, strict_simple: false }
    }
}

/// Uniform loop-free configuration multigraph with degree sequence `d`.
pub fn sample_no_loops<R: Rng + ?Sized>(
    d: &DegreeSequence,
    rng: &mut R,
    max_retries: usize,
) -> Result<PairingSample> {
    sample_with(d, rng, SampleOptions { max_retries, strict_simple: false })
}

pub fn sample_with<R: Rng + ?Sized>(
    d: &DegreeSequence,
    rng: &mut R,
    opts: SampleOptions,
) -> Result<PairingSample> {
    d.check_parity()?;
    let mut points: Vec<usize> = Vec::with_capacity(d.degree_sum() as usize);
    for (v, &deg) in d.as_slice().iter().enumerate() {
        points.extend(std::iter::repeat_n(v, deg as usize));
    }
    let mut seen = std::collections::HashSet::new();
    for attempt in 0..=opts.max_retries {
        points.shuffle(rng);
        let pairs: Vec<(usize, usize)> = points.chunks_exact(2).map(|c| (c[0], c[1])).collect();
        if pairs.iter().any(|&(a, b)| a == b) {
            continue;
        }
        if opts.strict_simple {
            seen.clear();
            if !pairs.iter().all(|&(a, b)| seen.insert((a.min(b), a.max(b)))) {
                continue;
            }
        }
        return Ok(PairingSample { pairs, retries: attempt });
    }
    Err(Error::RetriesExhausted { attempts: opts.max_retries + 1 })
}

/// φ(2r) = (2r)! / (2^r r!) = (2r − 1)!!, the number of perfect pairings of 2r items.
pub fn count_pairings(r: u32) -> BigUint {
    (1..=r).fold(BigUint::from(1u32), |acc, k| acc * BigUint::from(2 * k - 1))
}
