use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::OutcomeDistribution;

/// Outcome counts from `n_total` shots. `seed` is `None` for exact (RNG-free) tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotTable {
    pub labels: Vec<String>,
    pub counts: Vec<u64>,
    pub n_total: u64,
    pub seed: Option<u64>,
}

impl ShotTable {
    pub fn new(labels: Vec<String>, counts: Vec<u64>, seed: Option<u64>) -> Result<Self> {
        if labels.len() != counts.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                got: counts.len(),
            });
        }
        let n_total = counts.iter().sum();
        Ok(Self {
            labels,
            counts,
            n_total,
            seed,
        })
    }

    /// Checks `Σ counts = n_total` (tables may come from JSON).
    pub fn validate(&self) -> Result<()> {
        if self.labels.len() != self.counts.len() {
            return Err(Error::DimensionMismatch {
                expected: self.labels.len(),
                got: self.counts.len(),
            });
        }
        let sum: u64 = self.counts.iter().sum();
        if sum != self.n_total {
            return Err(Error::InvalidArgument(format!(
                "counts sum to {sum}, n_total is {}",
                self.n_total
            )));
        }
        Ok(())
    }

    pub fn frequencies(&self) -> Result<OutcomeDistribution> {
        if self.n_total == 0 {
            return Err(Error::ZeroObserved);
        }
        let n = self.n_total as f64;
        OutcomeDistribution::new(
            self.labels.clone(),
            self.counts.iter().map(|&k| k as f64 / n).collect(),
        )
    }

    pub fn count_of(&self, label: &str) -> Option<u64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.counts[i])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let t: ShotTable =
            serde_json::from_str(s).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        t.validate()?;
        Ok(t)
    }
}

/// Independent stream `replica` of the generator seeded by `seed`.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// Multinomial draw of `n` shots with a ChaCha20 generator seeded by `seed`.
pub fn sample_shots(d: &OutcomeDistribution, n: u64, seed: u64) -> Result<ShotTable> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut t = sample_shots_with_rng(d, n, &mut rng)?;
    t.seed = Some(seed);
    Ok(t)
}

/// Multinomial draw as a chain of conditional binomials, in label order.
pub fn sample_shots_with_rng<R: Rng + ?Sized>(
    d: &OutcomeDistribution,
    n: u64,
    rng: &mut R,
) -> Result<ShotTable> {
    if n == 0 {
        return Err(Error::InvalidArgument("shot count must be at least 1".into()));
    }
    let probs = d.probs();
    let mut counts = vec![0u64; probs.len()];
    let mut left = n;
    let mut mass = 1.0;
    for (k, &p) in probs.iter().enumerate() {
        if left == 0 {
            break;
        }
        if k + 1 == probs.len() {
            counts[k] = left;
            break;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let draw = Binomial::new(left, q)
            .map_err(|e| Error::InvalidDistribution(e.to_string()))?
            .sample(rng);
        counts[k] = draw;
        left -= draw;
        mass -= p;
    }
    Ok(ShotTable {
        labels: d.labels().to_vec(),
        counts,
        n_total: n,
        seed: None,
    })
}

/// Deterministic counts `round(p n)`, corrected by largest remainder so they sum to `n`.
pub fn exact_counts(d: &OutcomeDistribution, n: u64) -> Result<ShotTable> {
    if n == 0 {
        return Err(Error::InvalidArgument("shot count must be at least 1".into()));
    }
    let nf = n as f64;
    let scaled: Vec<f64> = d.probs().iter().map(|p| p * nf).collect();
    let mut counts: Vec<u64> = scaled.iter().map(|x| x.floor() as u64).collect();
    let assigned: u64 = counts.iter().sum();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = scaled[a] - scaled[a].floor();
        let rb = scaled[b] - scaled[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let missing = n.saturating_sub(assigned) as usize;
    for &i in order.iter().take(missing) {
        counts[i] += 1;
    }
    Ok(ShotTable {
        labels: d.labels().to_vec(),
        counts,
        n_total: n,
        seed: None,
    })
}
