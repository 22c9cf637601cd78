//! Shape statistics on top of optimal matching: distances, distance
//! matrices, Karcher means and agglomerative clustering.

mod cluster;
mod karcher;

pub use cluster::{cluster, Clustering, Cut, Dendrogram, Linkage, Merge};
pub use karcher::{karcher_mean, KarcherOptions, KarcherResult};

use crate::curve::DiscreteCurve;
use crate::error::{GeomError, Result};
use crate::matching::{optimal_match, MatchOptions};
use crate::scalar::Real;

/// Length of the horizontal geodesic from `α0` to the optimally
/// reparameterized `α1`.
pub fn shape_distance<T: Real>(
    alpha0: &DiscreteCurve<T>,
    alpha1: &DiscreteCurve<T>,
    opts: &MatchOptions,
) -> Result<f64> {
    let (_, m) = optimal_match(alpha0, alpha1, opts)?;
    Ok(m.final_length().max(0.0))
}

/// Symmetric matrix of pairwise shape distances with a zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    pub labels: Vec<String>,
    /// Row-major `N × N` values.
    pub values: Vec<f64>,
}

impl DistanceMatrix {
    /// Symmetrizes `raw` by averaging `d(i,j)` and `d(j,i)` and zeroes the
    /// diagonal.
    pub fn from_raw(labels: Vec<String>, raw: &[f64]) -> Result<Self> {
        let n = labels.len();
        if raw.len() != n * n {
            return Err(GeomError::DimensionMismatch {
                expected: n * n,
                found: raw.len(),
            });
        }
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    values[i * n + j] = 0.5 * (raw[i * n + j] + raw[j * n + i]);
                }
            }
        }
        Ok(Self { labels, values })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }
}

/// Shape distances between every ordered pair, symmetrized.
pub fn distance_matrix<T: Real>(
    curves: &[DiscreteCurve<T>],
    labels: Vec<String>,
    opts: &MatchOptions,
) -> Result<DistanceMatrix> {
    let n = curves.len();
    if n < 2 {
        return Err(GeomError::TooFewSamples { needed: 2, found: n });
    }
    if labels.len() != n {
        return Err(GeomError::DimensionMismatch {
            expected: n,
            found: labels.len(),
        });
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let workers = std::thread::available_parallelism()
        .map_or(1, |w| w.get())
        .min(pairs.len());
    // worker `w` takes pairs w, w + workers, …; results land by index
    let parts: Vec<Vec<Result<f64>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let pairs = &pairs;
                scope.spawn(move || {
                    pairs
                        .iter()
                        .skip(w)
                        .step_by(workers)
                        .map(|&(i, j)| shape_distance(&curves[i], &curves[j], opts))
                        .collect()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("distance worker panicked"))
            .collect()
    });
    let mut raw = vec![0.0; n * n];
    let mut iters: Vec<_> = parts.into_iter().map(|p| p.into_iter()).collect();
    for (idx, &(i, j)) in pairs.iter().enumerate() {
        raw[i * n + j] = iters[idx % workers].next().expect("one result per pair")?;
    }
    DistanceMatrix::from_raw(labels, &raw)
}
