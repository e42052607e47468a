//! Data ingestion and the synthetic substitutes for external datasets:
//! value CSVs binned into histograms, a heavy-tailed histogram
//! generator, and labeled Gaussian blobs for prototype selection.

use crate::error::{CliError, Result};
use sdist::rng::{standard_normal, uniform_index, ChaCha12Rng};
use std::io::BufRead;

/// Parses one numeric value per line (the first comma-separated field).
/// Blank lines are skipped; anything non-numeric or non-finite is an
/// error carrying its line number.
pub fn parse_value_rows<R: BufRead>(reader: R) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (number, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let field = trimmed.split(',').next().unwrap_or(trimmed);
        let value: f64 = field.parse().map_err(|e| CliError::Parse {
            line: number + 1,
            message: format!("expected a number, found {field:?}: {e}"),
        })?;
        if !value.is_finite() {
            return Err(CliError::Parse {
                line: number + 1,
                message: format!("non-finite value {value}"),
            });
        }
        values.push(value);
    }
    Ok(values)
}

/// Bins values into `[i·bin_width, (i+1)·bin_width)` for `i < bins`,
/// clamping overflow into the last bin (and negatives into the first),
/// then normalizes the counts to a probability vector.
pub fn ingest_histogram(values: &[f64], bins: usize, bin_width: f64) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(CliError::Invalid("no values to bin".into()));
    }
    if bins == 0 {
        return Err(CliError::Invalid("need at least one bin".into()));
    }
    if !bin_width.is_finite() || bin_width <= 0.0 {
        return Err(CliError::Invalid("bin width must be positive".into()));
    }
    let mut counts = vec![0u64; bins];
    for &v in values {
        let raw = (v / bin_width).floor();
        let index = if raw < 0.0 {
            0
        } else {
            (raw as usize).min(bins - 1)
        };
        counts[index] += 1;
    }
    let total = values.len() as f64;
    Ok(counts.iter().map(|&c| c as f64 / total).collect())
}

/// Log-normal draws `scale · exp(sigma·z)`: a heavy-tailed stand-in for
/// skewed magnitude data such as billing totals.
pub fn heavy_tailed_values(
    count: usize,
    scale: f64,
    sigma: f64,
    rng: &mut ChaCha12Rng,
) -> Vec<f64> {
    (0..count)
        .map(|_| scale * (sigma * standard_normal(rng)).exp())
        .collect()
}

/// Labeled points from isotropic Gaussian blobs, one blob per center,
/// interleaved deterministically.
pub fn gaussian_blobs(
    per_class: usize,
    centers: &[(f64, f64)],
    spread: f64,
    rng: &mut ChaCha12Rng,
) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut points = Vec::with_capacity(per_class * centers.len());
    let mut labels = Vec::with_capacity(per_class * centers.len());
    for _ in 0..per_class {
        for (label, &(cx, cy)) in centers.iter().enumerate() {
            points.push(vec![
                cx + spread * standard_normal(rng),
                cy + spread * standard_normal(rng),
            ]);
            labels.push(label);
        }
    }
    (points, labels)
}

/// Parses points as comma-separated float rows; all rows must share one
/// width.
pub fn parse_points_csv<R: BufRead>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut points: Vec<Vec<f64>> = Vec::new();
    for (number, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let row = trimmed
            .split(',')
            .map(|field| {
                field.trim().parse::<f64>().map_err(|e| CliError::Parse {
                    line: number + 1,
                    message: format!("expected a number, found {field:?}: {e}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = points.first()
            && row.len() != first.len()
        {
            return Err(CliError::Parse {
                line: number + 1,
                message: format!("expected {} columns, found {}", first.len(), row.len()),
            });
        }
        points.push(row);
    }
    if points.is_empty() {
        return Err(CliError::Invalid("no points".into()));
    }
    Ok(points)
}

/// Parses one integer label per line.
pub fn parse_labels_csv<R: BufRead>(reader: R) -> Result<Vec<usize>> {
    let mut labels = Vec::new();
    for (number, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        labels.push(trimmed.parse::<usize>().map_err(|e| CliError::Parse {
            line: number + 1,
            message: format!("expected a label, found {trimmed:?}: {e}"),
        })?);
    }
    Ok(labels)
}

/// Deterministic train/test split: a seeded shuffle of indices.
pub fn split_indices(
    count: usize,
    train_fraction: f64,
    rng: &mut ChaCha12Rng,
) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..count).collect();
    for i in (1..count).rev() {
        let j = uniform_index(rng, i + 1);
        order.swap(i, j);
    }
    let cut = ((count as f64 * train_fraction).round() as usize).clamp(1, count.saturating_sub(1).max(1));
    let train = order[..cut].to_vec();
    let test = order[cut..].to_vec();
    (train, test)
}

/// Median of pairwise squared distances, the default kernel bandwidth
/// heuristic `γ = 1/(2·median)`.
pub fn median_pairwise_sq_distance(points: &[Vec<f64>]) -> f64 {
    let mut distances = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            distances.push(d);
        }
    }
    if distances.is_empty() {
        return 1.0;
    }
    distances.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    distances[distances.len() / 2]
}

pub fn rbf_kernel(points: &[Vec<f64>], gamma: f64) -> Vec<f64> {
    let n = points.len();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let d: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            data[i * n + j] = (-gamma * d).exp();
        }
    }
    data
}

/// 0/1 error of 1-nearest-neighbor classification of `test` points
/// against the given reference set.
pub fn one_nn_error(
    reference: &[(&Vec<f64>, usize)],
    test_points: &[Vec<f64>],
    test_labels: &[usize],
) -> f64 {
    let mut wrong = 0usize;
    for (point, &label) in test_points.iter().zip(test_labels) {
        let mut best = f64::INFINITY;
        let mut prediction = 0usize;
        for &(candidate, candidate_label) in reference {
            let d: f64 = point
                .iter()
                .zip(candidate)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if d < best {
                best = d;
                prediction = candidate_label;
            }
        }
        if prediction != label {
            wrong += 1;
        }
    }
    wrong as f64 / test_points.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use sdist::rng::seeded;

    #[test]
    fn histogram_examples() {
        // A single value is a point mass.
        assert_eq!(ingest_histogram(&[3.2], 8, 1.0).unwrap()[3], 1.0);

        let h = ingest_histogram(&[0.5, 1.5, 1.6], 2, 1.0).unwrap();
        assert!((h[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((h[1] - 2.0 / 3.0).abs() < 1e-15);

        // Overflow clamps into the last bin.
        let h = ingest_histogram(&[99.0], 4, 1.0).unwrap();
        assert_eq!(h[3], 1.0);

        assert!(ingest_histogram(&[], 4, 1.0).is_err());
        assert!(ingest_histogram(&[1.0], 0, 1.0).is_err());
        assert!(ingest_histogram(&[1.0], 4, 0.0).is_err());
    }

    #[test]
    fn value_rows_report_line_numbers() {
        let good = "1.5\n2.5,extra\n\n3.5\n";
        assert_eq!(
            parse_value_rows(good.as_bytes()).unwrap(),
            vec![1.5, 2.5, 3.5]
        );

        let bad = "1.0\nnot-a-number\n";
        match parse_value_rows(bad.as_bytes()) {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn blobs_are_labeled_and_seeded() {
        let centers = [(0.0, 0.0), (10.0, 10.0)];
        let (pa, la) = gaussian_blobs(5, &centers, 0.5, &mut seeded(4));
        let (pb, lb) = gaussian_blobs(5, &centers, 0.5, &mut seeded(4));
        assert_eq!(pa, pb);
        assert_eq!(la, lb);
        assert_eq!(pa.len(), 10);
        assert_eq!(la.iter().filter(|&&l| l == 0).count(), 5);
    }

    #[test]
    fn split_is_deterministic_and_partitions() {
        let (train, test) = split_indices(10, 0.7, &mut seeded(8));
        let (train2, _) = split_indices(10, 0.7, &mut seeded(8));
        assert_eq!(train, train2);
        assert_eq!(train.len(), 7);
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn one_nn_on_separated_blobs_is_perfect() {
        let mut rng = seeded(6);
        let centers = [(0.0, 0.0), (20.0, 20.0)];
        let (points, labels) = gaussian_blobs(20, &centers, 0.3, &mut rng);
        let reference: Vec<(&Vec<f64>, usize)> =
            points.iter().zip(labels.iter().copied()).collect();
        let err = one_nn_error(&reference, &points, &labels);
        assert_eq!(err, 0.0);
    }
}
