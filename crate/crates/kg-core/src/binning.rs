//! Aggregating per-entity scores into property bins (degree-vs-score curves).

use crate::error::CoreError;

/// Bin axis transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinScale {
    Linear,
    /// Natural-log axis; entities with non-positive property values are
    /// excluded and counted in [`BinnedCurve::excluded_nonpositive`].
    Log,
}

/// One bin of a property-vs-score curve.
#[derive(Debug, Clone, PartialEq)]
pub struct BinRow {
    /// Bin center in the original (untransformed) property domain.
    pub center: f64,
    /// Mean score of members, absent for empty bins.
    pub mean: Option<f64>,
    /// Population standard deviation of member scores, absent for empty bins.
    pub std: Option<f64>,
    pub count: usize,
}

/// A binned property-vs-score curve plus exclusion counters.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedCurve {
    pub scale: BinScale,
    pub rows: Vec<BinRow>,
    /// Entities dropped because the log axis cannot place them.
    pub excluded_nonpositive: usize,
    /// Entities dropped because they have no score.
    pub excluded_unscored: usize,
}

/// Bins entities by a per-entity property (degree, centrality) and averages
/// their scores within each bin.
///
/// `values[i]` and `scores[i]` describe the same entity; a `None` score drops
/// the entity from the curve. Bins are equal-width over the (possibly
/// log-transformed) property range of included entities; the final bin is
/// closed on the right. A degenerate range (all values equal) collapses into
/// bin 0.
pub fn bin_by_property(
    values: &[f64],
    scores: &[Option<f64>],
    nbins: usize,
    scale: BinScale,
) -> Result<BinnedCurve, CoreError> {
    if nbins == 0 {
        return Err(CoreError::InvalidParameter(
            "bin count must be positive".to_string(),
        ));
    }
    if values.len() != scores.len() {
        return Err(CoreError::InvalidParameter(format!(
            "property and score lists differ in length ({} vs {})",
            values.len(),
            scores.len()
        )));
    }
    let mut excluded_nonpositive = 0;
    let mut excluded_unscored = 0;
    let mut included: Vec<(f64, f64)> = Vec::new();
    for (&v, s) in values.iter().zip(scores) {
        let Some(score) = s else {
            excluded_unscored += 1;
            continue;
        };
        if !v.is_finite() {
            return Err(CoreError::InvalidParameter(format!(
                "non-finite property value {v}"
            )));
        }
        let axis = match scale {
            BinScale::Linear => v,
            BinScale::Log => {
                if v <= 0.0 {
                    excluded_nonpositive += 1;
                    continue;
                }
                v.ln()
            }
        };
        included.push((axis, *score));
    }

    if included.is_empty() {
        return Ok(BinnedCurve {
            scale,
            rows: Vec::new(),
            excluded_nonpositive,
            excluded_unscored,
        });
    }

    let lo = included.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = included
        .iter()
        .map(|p| p.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / nbins as f64;

    let mut sums = vec![0.0f64; nbins];
    let mut sq_sums = vec![0.0f64; nbins];
    let mut counts = vec![0usize; nbins];
    for (axis, score) in included {
        let b = if width == 0.0 {
            0
        } else {
            // Right edge of the last bin is inclusive.
            (((axis - lo) / width) as usize).min(nbins - 1)
        };
        sums[b] += score;
        sq_sums[b] += score * score;
        counts[b] += 1;
    }

    let rows = (0..nbins)
        .map(|b| {
            let center_axis = lo + width * (b as f64 + 0.5);
            let center = match scale {
                BinScale::Linear => center_axis,
                BinScale::Log => center_axis.exp(),
            };
            if counts[b] == 0 {
                BinRow {
                    center,
                    mean: None,
                    std: None,
                    count: 0,
                }
            } else {
                let nf = counts[b] as f64;
                let mean = sums[b] / nf;
                let var = (sq_sums[b] / nf - mean * mean).max(0.0);
                BinRow {
                    center,
                    mean: Some(mean),
                    std: Some(var.sqrt()),
                    count: counts[b],
                }
            }
        })
        .collect();

    Ok(BinnedCurve {
        scale,
        rows,
        excluded_nonpositive,
        excluded_unscored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_bins_cover_range() {
        let values = [0.0, 1.0, 2.0, 3.0];
        let scores = [Some(0.0), Some(1.0), Some(0.0), Some(1.0)];
        let curve = bin_by_property(&values, &scores, 2, BinScale::Linear).unwrap();
        assert_eq!(curve.rows.len(), 2);
        assert_eq!(curve.rows[0].count, 2);
        assert_eq!(curve.rows[1].count, 2);
        assert_eq!(curve.rows[0].mean, Some(0.5));
        // Right edge (3.0) lands in the last bin.
        assert_eq!(curve.rows[1].mean, Some(0.5));
    }

    #[test]
    fn log_scale_excludes_nonpositive() {
        let values = [0.0, 1.0, 10.0, 100.0];
        let scores = [Some(0.3), Some(0.5), Some(0.5), Some(0.5)];
        let curve = bin_by_property(&values, &scores, 2, BinScale::Log).unwrap();
        assert_eq!(curve.excluded_nonpositive, 1);
        let total: usize = curve.rows.iter().map(|r| r.count).sum();
        assert_eq!(total, 3);
        // Centers come back in the original domain.
        assert!(curve.rows[0].center > 0.0);
    }

    #[test]
    fn unscored_entities_are_dropped() {
        let values = [1.0, 2.0, 3.0];
        let scores = [Some(1.0), None, Some(0.0)];
        let curve = bin_by_property(&values, &scores, 1, BinScale::Linear).unwrap();
        assert_eq!(curve.excluded_unscored, 1);
        assert_eq!(curve.rows[0].count, 2);
        assert_eq!(curve.rows[0].mean, Some(0.5));
    }

    #[test]
    fn degenerate_range_collapses_to_first_bin() {
        let values = [5.0, 5.0, 5.0];
        let scores = [Some(1.0), Some(0.0), Some(0.5)];
        let curve = bin_by_property(&values, &scores, 4, BinScale::Linear).unwrap();
        assert_eq!(curve.rows[0].count, 3);
        assert!(curve.rows[1..].iter().all(|r| r.count == 0));
    }

    #[test]
    fn population_std() {
        let values = [0.0, 0.0];
        let scores = [Some(0.0), Some(1.0)];
        let curve = bin_by_property(&values, &scores, 1, BinScale::Linear).unwrap();
        assert!((curve.rows[0].std.unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_bins_is_an_error() {
        assert!(bin_by_property(&[1.0], &[Some(1.0)], 0, BinScale::Linear).is_err());
    }

    #[test]
    fn empty_curve_when_nothing_included() {
        let curve = bin_by_property(&[1.0], &[None], 3, BinScale::Linear).unwrap();
        assert!(curve.rows.is_empty());
        assert_eq!(curve.excluded_unscored, 1);
    }

    #[test]
    fn mismatched_lengths_error() {
        assert!(bin_by_property(&[1.0, 2.0], &[Some(1.0)], 2, BinScale::Linear).is_err());
    }
}
