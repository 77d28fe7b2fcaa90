//! Score distribution over [0, 1].

use crate::error::ScoreError;

/// Default bin count: odd so that 0, 0.5, and 1 land in the centers of the
/// first, middle, and last bins.
pub const DEFAULT_BINS: usize = 21;

/// Equal-width histogram of scores over [0, 1]; the last bin includes its
/// right edge so a score of exactly 1 is counted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub counts: Vec<usize>,
    pub total: usize,
}

impl Histogram {
    pub fn nbins(&self) -> usize {
        self.counts.len()
    }

    /// Center of a bin in score space.
    pub fn center(&self, bin: usize) -> f64 {
        (bin as f64 + 0.5) / self.counts.len() as f64
    }

    /// Fraction of all scores in a bin (0 when the histogram is empty).
    pub fn fraction(&self, bin: usize) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.counts[bin] as f64 / self.total as f64
        }
    }

    /// The bin a score falls into.
    pub fn bin_of(&self, score: f64) -> usize {
        bin_index(score, self.counts.len())
    }
}

fn bin_index(score: f64, nbins: usize) -> usize {
    ((score * nbins as f64) as usize).min(nbins - 1)
}

/// Bins scores into `nbins` equal-width buckets over [0, 1].
///
/// Needs at least two bins (one bin cannot show a distribution) and rejects
/// scores outside [0, 1].
pub fn score_histogram(
    scores: impl IntoIterator<Item = f64>,
    nbins: usize,
) -> Result<Histogram, ScoreError> {
    if nbins < 2 {
        return Err(ScoreError::InvalidParameter(format!(
            "histogram needs at least 2 bins, got {nbins}"
        )));
    }
    let mut counts = vec![0usize; nbins];
    let mut total = 0usize;
    for score in scores {
        if !(0.0..=1.0).contains(&score) {
            return Err(ScoreError::InvalidScore(score));
        }
        counts[bin_index(score, nbins)] += 1;
        total += 1;
    }
    Ok(Histogram { counts, total })
}
