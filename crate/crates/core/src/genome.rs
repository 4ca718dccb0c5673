//! Bounded integer genotypes and the operators shared by every algorithm.
//!
//! A genotype is a fixed-length vector of integers, each constrained to its
//! own inclusive range. Tasks interpret the integers however they like
//! (gate opcodes, connection indices, quantised weights); the operators here
//! know nothing about that interpretation.

use std::sync::Arc;

use rand::Rng as _;

use crate::rng::Rng;

/// Per-gene inclusive ranges. Shared by all genotypes of a task via `Arc`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneBounds {
    ranges: Vec<(i32, i32)>,
}

impl GeneBounds {
    /// Builds bounds from explicit per-gene `(lo, hi)` pairs.
    ///
    /// Panics if any range has `lo > hi`.
    pub fn new(ranges: Vec<(i32, i32)>) -> Self {
        for (k, &(lo, hi)) in ranges.iter().enumerate() {
            assert!(lo <= hi, "gene {k}: empty range [{lo}, {hi}]");
        }
        GeneBounds { ranges }
    }

    /// Bounds with the same range for every gene.
    pub fn uniform(lo: i32, hi: i32, len: usize) -> Self {
        Self::new(vec![(lo, hi); len])
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    /// The inclusive range of gene `k`.
    pub fn range(&self, k: usize) -> (i32, i32) {
        self.ranges[k]
    }

    /// Whether every value lies inside its gene's range.
    pub fn contains(&self, genes: &[i32]) -> bool {
        genes.len() == self.ranges.len()
            && genes
                .iter()
                .zip(&self.ranges)
                .all(|(&g, &(lo, hi))| lo <= g && g <= hi)
    }
}

/// A bounded integer genotype. Cloning is cheap apart from the gene vector;
/// the bounds are shared.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntGenotype {
    genes: Vec<i32>,
    bounds: Arc<GeneBounds>,
}

impl IntGenotype {
    /// Samples every gene uniformly from its range.
    pub fn random(bounds: &Arc<GeneBounds>, rng: &mut Rng) -> Self {
        let genes = (0..bounds.len())
            .map(|k| {
                let (lo, hi) = bounds.range(k);
                rng.gen_range(lo..=hi)
            })
            .collect();
        IntGenotype {
            genes,
            bounds: Arc::clone(bounds),
        }
    }

    /// Wraps explicit genes, which must respect the bounds.
    pub fn from_genes(bounds: &Arc<GeneBounds>, genes: Vec<i32>) -> Self {
        assert!(
            bounds.contains(&genes),
            "genes violate bounds (len {} vs {})",
            genes.len(),
            bounds.len()
        );
        IntGenotype {
            genes,
            bounds: Arc::clone(bounds),
        }
    }

    pub fn genes(&self) -> &[i32] {
        &self.genes
    }

    pub fn bounds(&self) -> &Arc<GeneBounds> {
        &self.bounds
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    /// Returns a copy where each gene, independently with probability
    /// `mut_rate`, is resampled uniformly from its full range. The fresh draw
    /// may repeat the current value, so the observed per-gene change rate is
    /// slightly below `mut_rate`.
    ///
    /// Genes are visited in index order and the Bernoulli draw precedes the
    /// replacement draw, which fixes the RNG consumption pattern.
    pub fn mutated(&self, mut_rate: f64, rng: &mut Rng) -> Self {
        assert!(
            (0.0..=1.0).contains(&mut_rate),
            "mutation rate {mut_rate} outside [0, 1]"
        );
        let mut child = self.clone();
        for (k, gene) in child.genes.iter_mut().enumerate() {
            if rng.gen::<f64>() < mut_rate {
                let (lo, hi) = self.bounds.range(k);
                *gene = rng.gen_range(lo..=hi);
            }
        }
        child
    }
}

/// Maps a gene in [0, 255] onto a connection weight in [-8, 8].
///
/// The mapping is exact at both endpoints and exactly odd around the
/// (non-integer) midpoint: `decode_weight(g) == -decode_weight(255 - g)`.
pub fn decode_weight(gene: i32) -> f64 {
    assert!((0..=255).contains(&gene), "weight gene {gene} outside [0, 255]");
    (16.0 * gene as f64 - 2040.0) / 255.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn arc(bounds: GeneBounds) -> Arc<GeneBounds> {
        Arc::new(bounds)
    }

    #[test]
    fn random_genotypes_reach_every_value() {
        let bounds = arc(GeneBounds::uniform(1, 4, 8));
        let mut rng = rng::from_seed(1);
        let mut seen = [0u32; 5];
        for _ in 0..500 {
            let g = IntGenotype::random(&bounds, &mut rng);
            assert!(bounds.contains(g.genes()));
            for &v in g.genes() {
                seen[v as usize] += 1;
            }
        }
        assert_eq!(seen[0], 0);
        assert!(seen[1..].iter().all(|&c| c > 0), "counts {seen:?}");
    }

    #[test]
    fn init_is_reproducible() {
        let bounds = arc(GeneBounds::uniform(0, 255, 161));
        let a = IntGenotype::random(&bounds, &mut rng::from_seed(9));
        let b = IntGenotype::random(&bounds, &mut rng::from_seed(9));
        assert_eq!(a, b);
    }

    #[test]
    fn zero_rate_mutation_is_identity() {
        let bounds = arc(GeneBounds::uniform(0, 255, 100));
        let mut rng = rng::from_seed(2);
        let parent = IntGenotype::random(&bounds, &mut rng);
        let child = parent.mutated(0.0, &mut rng);
        assert_eq!(parent, child);
    }

    #[test]
    fn mutation_respects_per_gene_ranges() {
        let bounds = arc(GeneBounds::new(vec![(1, 4), (6, 25), (0, 0), (-3, 3)]));
        let mut rng = rng::from_seed(3);
        let parent = IntGenotype::random(&bounds, &mut rng);
        for _ in 0..200 {
            let child = parent.mutated(1.0, &mut rng);
            assert!(bounds.contains(child.genes()));
        }
    }

    #[test]
    fn mutation_change_count_tracks_rate() {
        // With resampling, a firing gene keeps its value with probability
        // 1/256, so visible changes ~ Binomial(n, rate * 255/256).
        let n = 20_000;
        let rate = 0.05;
        let bounds = arc(GeneBounds::uniform(0, 255, n));
        let mut rng = rng::from_seed(4);
        let parent = IntGenotype::random(&bounds, &mut rng);
        let child = parent.mutated(rate, &mut rng);
        let changed = parent
            .genes()
            .iter()
            .zip(child.genes())
            .filter(|(a, b)| a != b)
            .count() as f64;
        let p = rate * 255.0 / 256.0;
        let mean = n as f64 * p;
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        assert!(
            (changed - mean).abs() < 5.0 * sd,
            "changed {changed}, expected {mean} +/- {:.1}",
            5.0 * sd
        );
    }

    #[test]
    fn decode_weight_hits_exact_anchors() {
        assert_eq!(decode_weight(0), -8.0);
        assert_eq!(decode_weight(255), 8.0);
        assert_eq!(decode_weight(51), -4.8);
    }

    #[test]
    fn decode_weight_is_odd_and_monotonic() {
        for g in 0..=255 {
            assert_eq!(decode_weight(g), -decode_weight(255 - g));
            if g > 0 {
                assert!(decode_weight(g) > decode_weight(g - 1));
            }
        }
    }

    #[test]
    #[should_panic(expected = "outside [0, 255]")]
    fn decode_weight_rejects_out_of_range() {
        decode_weight(256);
    }

    #[test]
    #[should_panic(expected = "empty range")]
    fn bounds_reject_inverted_range() {
        GeneBounds::new(vec![(2, 1)]);
    }
}
