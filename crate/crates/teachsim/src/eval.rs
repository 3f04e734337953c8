//! Trajectory calibration and similarity scoring.
//!
//! Trajectories are first calibrated with Procrustes analysis (translation,
//! uniform scale and rotation removed; reflections deliberately excluded so
//! mirror-written shapes score poorly), then compared with the discrete
//! Fréchet distance. Both curves leave calibration centered with unit
//! root-mean-square norm, at which scale matching curves sit within a few
//! hundredths of each other while unrelated shapes end up roughly a
//! diameter (2) apart, so `1 - d_F / 2`, clipped to `[0, 1]`, serves as the
//! similarity where 1 is a perfect shape match.

use crate::geom::Point2;
use crate::trajectory::{resample, Trajectory};
use crate::{Error, Result};

/// Outcome of Procrustes alignment of two equal-length trajectories.
#[derive(Debug, Clone)]
pub struct AlignmentResult {
    /// First curve, standardized (zero centroid, unit RMS norm).
    pub aligned_a: Vec<Point2>,
    /// Second curve, standardized and rotated onto the first.
    pub aligned_b: Vec<Point2>,
    /// Minimized sum of squared point distances.
    pub disparity: f64,
    /// Rotation applied to `b`, in radians.
    pub rotation: f64,
    /// Optimal least-squares scale between the standardized curves
    /// (1 for congruent shapes).
    pub scale: f64,
}

/// Similarity of a produced trajectory to a target, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityScore {
    pub value: f64,
    /// Set when the produced trajectory was degenerate (the agent never
    /// moved); the value is then 0 by definition.
    pub degenerate: bool,
}

/// Center points on their centroid and scale to unit root-mean-square
/// norm. Errors on degenerate input (zero variance).
fn standardize(points: &[Point2], label: &str) -> Result<Vec<Point2>> {
    let n = points.len() as f64;
    let mut centroid = Point2::ZERO;
    for p in points {
        centroid += *p;
    }
    centroid = centroid * (1.0 / n);
    let mut centered: Vec<Point2> = points.iter().map(|p| *p - centroid).collect();
    let norm = (centered.iter().map(|p| p.dot(*p)).sum::<f64>() / n).sqrt();
    if norm == 0.0 {
        return Err(Error::Degenerate(format!(
            "{label} trajectory has zero variance"
        )));
    }
    for p in centered.iter_mut() {
        *p = *p * (1.0 / norm);
    }
    Ok(centered)
}

/// Align `b` onto `a` under translation, uniform scaling and rotation.
///
/// Both trajectories must have the same length (callers resample first) and
/// neither may be degenerate.
pub fn procrustes_align(a: &Trajectory, b: &Trajectory) -> Result<AlignmentResult> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "procrustes needs equal lengths, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::InvalidArgument(
            "procrustes needs at least 2 points".into(),
        ));
    }
    let sa = standardize(a.points(), "first")?;
    let sb = standardize(b.points(), "second")?;

    // Optimal rotation of b onto a maximizes cos(t)*C + sin(t)*S.
    let mut c = 0.0;
    let mut s = 0.0;
    for (pa, pb) in sa.iter().zip(&sb) {
        c += pa.dot(*pb);
        s += pb.cross(*pa);
    }
    let rotation = s.atan2(c);
    let (sin_t, cos_t) = rotation.sin_cos();
    let rotated: Vec<Point2> = sb
        .iter()
        .map(|p| Point2::new(p.x * cos_t - p.y * sin_t, p.x * sin_t + p.y * cos_t))
        .collect();
    let disparity: f64 = sa
        .iter()
        .zip(&rotated)
        .map(|(pa, pb)| (*pa - *pb).dot(*pa - *pb))
        .sum();
    Ok(AlignmentResult {
        aligned_a: sa,
        aligned_b: rotated,
        disparity,
        rotation,
        // Least-squares scale between unit-RMS curves.
        scale: c.hypot(s) / a.len() as f64,
    })
}

/// Discrete Fréchet distance between two point sequences, computed by
/// dynamic programming over the coupling lattice in O(|a|·|b|).
pub fn frechet_distance(a: &Trajectory, b: &Trajectory) -> f64 {
    frechet_points(a.points(), b.points())
}

pub(crate) fn frechet_points(a: &[Point2], b: &[Point2]) -> f64 {
    let (n, m) = (a.len(), b.len());
    let mut prev = vec![0.0f64; m];
    let mut row = vec![0.0f64; m];
    for i in 0..n {
        for j in 0..m {
            let d = a[i].distance(b[j]);
            let reach = match (i, j) {
                (0, 0) => d,
                (0, _) => row[j - 1].max(d),
                (_, 0) => prev[0].max(d),
                _ => prev[j].min(prev[j - 1]).min(row[j - 1]).max(d),
            };
            row[j] = reach;
        }
        std::mem::swap(&mut prev, &mut row);
    }
    prev[m - 1]
}

/// Minimum number of points the similarity pipeline resamples to.
pub const MIN_SIMILARITY_POINTS: usize = 32;

/// Two-stage shape similarity: resample both curves to the shorter length
/// (at least [`MIN_SIMILARITY_POINTS`]), calibrate with Procrustes, then map
/// the discrete Fréchet distance of the aligned unit-norm curves onto
/// `[0, 1]`.
pub fn similarity(target: &Trajectory, produced: &Trajectory) -> Result<SimilarityScore> {
    if produced.is_degenerate() {
        return Ok(SimilarityScore {
            value: 0.0,
            degenerate: true,
        });
    }
    if target.len() < 2 || produced.len() < 2 {
        return Err(Error::InvalidArgument(
            "similarity needs trajectories with at least 2 points".into(),
        ));
    }
    let n = target.len().min(produced.len()).max(MIN_SIMILARITY_POINTS);
    let rt = resample(target, n)?;
    let rp = resample(produced, n)?;
    let aligned = procrustes_align(&rt, &rp)?;
    let d = frechet_points(&aligned.aligned_a, &aligned.aligned_b);
    Ok(SimilarityScore {
        value: (1.0 - d / 2.0).clamp(0.0, 1.0),
        degenerate: false,
    })
}
