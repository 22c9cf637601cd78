use super::DistanceMatrix;
use crate::error::{GeomError, Result};

/// Distance between clusters in agglomerative clustering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Linkage {
    Single,
    Complete,
    #[default]
    Average,
}

impl Linkage {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Single => "single",
            Self::Complete => "complete",
            Self::Average => "average",
        }
    }
}

impl std::str::FromStr for Linkage {
    type Err = GeomError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(Self::Single),
            "complete" => Ok(Self::Complete),
            "average" => Ok(Self::Average),
            other => Err(GeomError::InvalidArgument(format!("unknown linkage '{other}'"))),
        }
    }
}

/// Where to cut the dendrogram.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cut {
    Clusters(usize),
    Height(f64),
}

/// One merge. Leaves are numbered `0..N`; the cluster formed by merge `i`
/// gets id `N + i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dendrogram {
    pub linkage: Linkage,
    pub leaves: usize,
    pub merges: Vec<Merge>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    /// Cluster index of each curve; clusters are numbered by their
    /// smallest member.
    pub assignment: Vec<usize>,
    pub dendrogram: Dendrogram,
}

impl Dendrogram {
    /// Flat partition after applying the merges allowed by `cut`.
    pub fn partition(&self, cut: Cut) -> Vec<usize> {
        let n = self.leaves;
        let count = match cut {
            Cut::Clusters(k) => n.saturating_sub(k.max(1)),
            Cut::Height(h) => self.merges.iter().take_while(|m| m.height <= h).count(),
        };
        let mut parent: Vec<usize> = (0..n + self.merges.len()).collect();
        for (i, m) in self.merges.iter().take(count).enumerate() {
            parent[m.a] = n + i;
            parent[m.b] = n + i;
        }
        let root = |mut x: usize| {
            while parent[x] != x {
                x = parent[x];
            }
            x
        };
        let roots: Vec<usize> = (0..n).map(root).collect();
        let mut ids: Vec<usize> = Vec::new();
        roots
            .iter()
            .map(|r| match ids.iter().position(|x| x == r) {
                Some(p) => p,
                None => {
                    ids.push(*r);
                    ids.len() - 1
                }
            })
            .collect()
    }
}

/// Agglomerative hierarchical clustering. Ties merge the pair with the
/// lexicographically smallest cluster ids.
pub fn cluster(matrix: &DistanceMatrix, linkage: Linkage, cut: Cut) -> Result<Clustering> {
    let n = matrix.len();
    if n < 2 {
        return Err(GeomError::TooFewSamples { needed: 2, found: n });
    }
    let total = 2 * n - 1;
    let mut dist = vec![f64::INFINITY; total * total];
    for i in 0..n {
        for j in 0..n {
            dist[i * total + j] = matrix.get(i, j);
        }
    }
    let mut size = vec![1usize; total];
    let mut active: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n - 1);
    for step in 0..n - 1 {
        let mut best = (f64::INFINITY, 0, 0);
        for (x, &i) in active.iter().enumerate() {
            for &j in &active[x + 1..] {
                let d = dist[i * total + j];
                if d < best.0 || (best.0.is_infinite() && best.1 == best.2) {
                    best = (d, i, j);
                }
            }
        }
        let (height, a, b) = best;
        let id = n + step;
        size[id] = size[a] + size[b];
        active.retain(|&c| c != a && c != b);
        for &c in &active {
            let (da, db) = (dist[a * total + c], dist[b * total + c]);
            let d = match linkage {
                Linkage::Single => da.min(db),
                Linkage::Complete => da.max(db),
                Linkage::Average => (size[a] as f64 * da + size[b] as f64 * db) / size[id] as f64,
            };
            dist[id * total + c] = d;
            dist[c * total + id] = d;
        }
        active.push(id);
        merges.push(Merge {
            a,
            b,
            height,
            size: size[id],
        });
    }
    let dendrogram = Dendrogram {
        linkage,
        leaves: n,
        merges,
    };
    Ok(Clustering {
        assignment: dendrogram.partition(cut),
        dendrogram,
    })
}
