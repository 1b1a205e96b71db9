//! Distance matrices and force-directed embedding.

use alloc::vec::Vec;

use libm::sqrt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ted::{tree_edit_distance, CostModel};
use super::tree::SyntaxNode;
use super::DiversityError;

/// Symmetric, zero-diagonal, row-major `n x n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds from the strict upper triangle in row order:
    /// `(0,1), (0,2), .., (1,2), ..`.
    pub fn from_upper(n: usize, upper: &[f64]) -> Result<DistanceMatrix, DiversityError> {
        if upper.len() != n * n.saturating_sub(1) / 2 {
            return Err(DiversityError::Shape(n, upper.len()));
        }
        if let Some(v) = upper.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(DiversityError::Entry(*v));
        }
        let mut data = alloc::vec![0.0; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                data[i * n + j] = upper[k];
                data[j * n + i] = upper[k];
                k += 1;
            }
        }
        Ok(DistanceMatrix { n, data })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Mean of the off-diagonal entries; zero below two points.
    pub fn mean_distance(&self) -> f64 {
        let pairs = self.n * self.n.saturating_sub(1);
        if pairs == 0 {
            return 0.0;
        }
        self.data.iter().sum::<f64>() / pairs as f64
    }
}

/// Index pairs `(i, j)`, `i < j`, in the order [`DistanceMatrix::from_upper`] expects.
pub fn upper_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// All pairwise edit distances, computed serially.
pub fn pairwise_matrix(trees: &[SyntaxNode], cm: &CostModel) -> Result<DistanceMatrix, DiversityError> {
    if trees.len() < 2 {
        return Err(DiversityError::TooFew(trees.len()));
    }
    let upper: Vec<f64> =
        upper_pairs(trees.len()).into_iter().map(|(i, j)| tree_edit_distance(&trees[i], &trees[j], cm)).collect();
    DistanceMatrix::from_upper(trees.len(), &upper)
}

/// Points of a 2D embedding, in matrix order.
#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    pub points: Vec<[f64; 2]>,
}

impl Layout {
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.points[i], self.points[j]);
        sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]))
    }
}

/// Default iteration count of [`fr_layout`].
pub const DEFAULT_ITERATIONS: usize = 500;

/// Fruchterman–Reingold layout on the complete graph.
///
/// Each pair has ideal length `l = d_ij / s`, where `s` is the mean matrix
/// distance, with attraction `d^2 / l` and repulsion `l^2 / d`, which balance
/// at `d = l`. Moves are capped by a temperature that starts at a tenth of the
/// initial box side and cools linearly to zero. Output is rescaled by `s`
/// and centered on the origin.
pub fn fr_layout(m: &DistanceMatrix, seed: u64, iterations: usize) -> Layout {
    let n = m.len();
    let mut s = m.mean_distance();
    if s.is_nan() || s <= 0.0 {
        s = 1.0;
    }
    let floor = 1e-3;
    let ideal = |i: usize, j: usize| (m.get(i, j) / s).max(floor);
    let side = sqrt(n as f64).max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<[f64; 2]> = (0..n).map(|_| [rng.random_range(0.0..side), rng.random_range(0.0..side)]).collect();
    let t0 = 0.1 * side;
    for it in 0..iterations {
        let t = t0 * (1.0 - it as f64 / iterations as f64);
        let mut disp = alloc::vec![[0.0f64; 2]; n];
        for i in 0..n {
            for j in i + 1..n {
                let dx = pos[i][0] - pos[j][0];
                let dy = pos[i][1] - pos[j][1];
                let d = sqrt(dx * dx + dy * dy).max(1e-9);
                let l = ideal(i, j);
                // Positive pushes apart.
                let f = l * l / d - d * d / l;
                let (ux, uy) = if d > 1e-9 { (dx / d, dy / d) } else { (1.0, 0.0) };
                disp[i][0] += ux * f;
                disp[i][1] += uy * f;
                disp[j][0] -= ux * f;
                disp[j][1] -= uy * f;
            }
        }
        for (p, dv) in pos.iter_mut().zip(&disp) {
            let len = sqrt(dv[0] * dv[0] + dv[1] * dv[1]);
            if len > 0.0 {
                let step = len.min(t) / len;
                p[0] += dv[0] * step;
                p[1] += dv[1] * step;
            }
        }
    }
    let (mut cx, mut cy) = (0.0, 0.0);
    for p in &pos {
        cx += p[0] / n as f64;
        cy += p[1] / n as f64;
    }
    Layout { points: pos.into_iter().map(|p| [(p[0] - cx) * s, (p[1] - cy) * s]).collect() }
}
