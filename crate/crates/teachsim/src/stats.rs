//! Hypothesis tests over game-unit similarity results.
//!
//! The four hypotheses compare learners that trained connected to a teacher
//! against learners that trained alone:
//!
//! - H1: per-game-unit superiority (one t-test per unit),
//! - H2: overall superiority (t-test on per-repetition AUC),
//! - H3: faster time to a similarity threshold,
//! - H4: lower post-convergence variance.
//!
//! The t-test is Welch's (unequal variances), two-sided, with the p-value
//! evaluated through the regularized incomplete beta function.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::{Error, Result};

/// Significance level used for verdicts.
pub const ALPHA: f64 = 0.05;

/// One similarity measurement: the atom of all statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameUnitResult {
    pub repetition: usize,
    /// 1-based game unit index.
    pub unit: usize,
    pub connected: bool,
    pub similarity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisId {
    H1,
    H2,
    H3,
    H4,
}

impl std::fmt::Display for HypothesisId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            HypothesisId::H1 => "H1",
            HypothesisId::H2 => "H2",
            HypothesisId::H3 => "H3",
            HypothesisId::H4 => "H4",
        })
    }
}

/// A single two-group comparison inside a hypothesis report.
#[derive(Debug, Clone)]
pub struct Comparison {
    /// What is being compared ("unit 3", "auc", ...).
    pub label: String,
    pub t: f64,
    pub p: f64,
    pub mean_connected: f64,
    pub mean_not_connected: f64,
    pub median_connected: f64,
    pub median_not_connected: f64,
}

/// Result of one hypothesis test.
#[derive(Debug, Clone)]
pub struct HypothesisReport {
    pub id: HypothesisId,
    pub comparisons: Vec<Comparison>,
    /// Significant at [`ALPHA`] (for H1: at every unit from 2 on).
    pub verdict: bool,
}

/// Welch t statistic, two-sided p-value and degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTest {
    pub t: f64,
    pub p: f64,
    pub df: f64,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Population standard deviation.
pub fn population_sd(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Median with linear interpolation.
pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

/// Linearly interpolated quantile (the common "R-7" rule).
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    assert!(!xs.is_empty(), "quantile of empty sample");
    assert!((0.0..=1.0).contains(&q));
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-NaN sample"));
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

/// Five-number summary (min, Q1, median, Q3, max).
pub fn five_number_summary(xs: &[f64]) -> (f64, f64, f64, f64, f64) {
    (
        quantile(xs, 0.0),
        quantile(xs, 0.25),
        quantile(xs, 0.5),
        quantile(xs, 0.75),
        quantile(xs, 1.0),
    )
}

/// ln Γ(z) for z > 0 (Lanczos approximation).
pub fn ln_gamma(z: f64) -> f64 {
    const COEFFS: [f64; 6] = [
        76.18009172947146,
        -86.50532032941677,
        24.01409824083091,
        -1.231739572450155,
        0.1208650973866179e-2,
        -0.5395239384953e-5,
    ];
    debug_assert!(z > 0.0);
    let mut series = 1.000000000190015;
    for (i, c) in COEFFS.iter().enumerate() {
        series += c / (z + i as f64 + 1.0);
    }
    let tmp = z + 5.5;
    (z + 0.5) * tmp.ln() - tmp + (2.5066282746310005 * series / z).ln()
}

/// Regularized incomplete beta function I_x(a, b) via Lentz's continued
/// fraction.
pub fn incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) || a <= 0.0 || b <= 0.0 {
        return f64::NAN;
    }
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    // Use the symmetry relation where the fraction converges fastest.
    if x > (a + 1.0) / (a + b + 2.0) {
        return 1.0 - incomplete_beta(1.0 - x, b, a);
    }
    let ln_front =
        a * x.ln() + b * (1.0 - x).ln() - (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b));
    let front = ln_front.exp();

    const TINY: f64 = 1e-30;
    const EPS: f64 = 1e-15;
    let mut c = 1.0f64;
    let mut d = 0.0f64;
    let mut f = 1.0f64;
    for m in 0..200 {
        let m_f = m as f64;
        // Odd continued-fraction coefficient.
        let num = -(a + m_f) * (a + b + m_f) * x / ((a + 2.0 * m_f) * (a + 2.0 * m_f + 1.0));
        d = 1.0 + num * d;
        if d.abs() < TINY {
            d = TINY;
        }
        d = 1.0 / d;
        c = 1.0 + num / c;
        if c.abs() < TINY {
            c = TINY;
        }
        f *= c * d;
        // Even coefficient.
        let num = (m_f + 1.0) * (b - m_f - 1.0) * x / ((a + 2.0 * m_f + 1.0) * (a + 2.0 * m_f + 2.0));
        d = 1.0 + num * d;
        if d.abs() < TINY {
            d = TINY;
        }
        d = 1.0 / d;
        c = 1.0 + num / c;
        if c.abs() < TINY {
            c = TINY;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    front / (a * f)
}

/// Welch's two-sample t-test, two-sided.
///
/// Degenerate samples follow fixed rules: when both variances vanish the
/// p-value is 1 for equal means and 0 otherwise.
pub fn welch_t_test(sample_a: &[f64], sample_b: &[f64]) -> Result<TTest> {
    if sample_a.len() < 2 || sample_b.len() < 2 {
        return Err(Error::InvalidArgument(
            "t-test needs at least 2 observations per sample".into(),
        ));
    }
    let (na, nb) = (sample_a.len() as f64, sample_b.len() as f64);
    let (ma, mb) = (mean(sample_a), mean(sample_b));
    let (va, vb) = (sample_variance(sample_a), sample_variance(sample_b));

    if va + vb == 0.0 {
        return Ok(if ma == mb {
            TTest {
                t: 0.0,
                p: 1.0,
                df: na + nb - 2.0,
            }
        } else {
            TTest {
                t: (ma - mb).signum() * f64::INFINITY,
                p: 0.0,
                df: na + nb - 2.0,
            }
        });
    }

    let sea = va / na;
    let seb = vb / nb;
    let se = (sea + seb).sqrt();
    let t = (ma - mb) / se;
    let df = (sea + seb) * (sea + seb)
        / (sea * sea / (na - 1.0) + seb * seb / (nb - 1.0));
    // Two-sided p through the t CDF identity with the incomplete beta.
    let p = incomplete_beta(df / (df + t * t), df / 2.0, 0.5);
    Ok(TTest { t, p, df })
}

fn units_of(results: &[GameUnitResult]) -> Vec<usize> {
    let units: BTreeSet<usize> = results.iter().map(|r| r.unit).collect();
    units.into_iter().collect()
}

fn arm_values(results: &[GameUnitResult], unit: usize, connected: bool) -> Vec<f64> {
    let mut rows: Vec<&GameUnitResult> = results
        .iter()
        .filter(|r| r.unit == unit && r.connected == connected)
        .collect();
    rows.sort_by_key(|r| r.repetition);
    rows.iter().map(|r| r.similarity).collect()
}

fn repetitions_of(results: &[GameUnitResult], connected: bool) -> Vec<usize> {
    let reps: BTreeSet<usize> = results
        .iter()
        .filter(|r| r.connected == connected)
        .map(|r| r.repetition)
        .collect();
    reps.into_iter().collect()
}

fn compare(label: String, connected: &[f64], not_connected: &[f64]) -> Result<Comparison> {
    let tt = welch_t_test(connected, not_connected)?;
    Ok(Comparison {
        label,
        t: tt.t,
        p: tt.p,
        mean_connected: mean(connected),
        mean_not_connected: mean(not_connected),
        median_connected: median(connected),
        median_not_connected: median(not_connected),
    })
}

/// H1: one t-test per game unit, connected vs not-connected across
/// repetitions. The verdict requires significance at every unit from 2 on
/// (the first unit is exempt).
pub fn h1_per_unit(results: &[GameUnitResult]) -> Result<HypothesisReport> {
    let units = units_of(results);
    if units.is_empty() {
        return Err(Error::IncompleteData("no game-unit results".into()));
    }
    let mut comparisons = Vec::with_capacity(units.len());
    for &unit in &units {
        let conn = arm_values(results, unit, true);
        let not_conn = arm_values(results, unit, false);
        if conn.len() < 2 || not_conn.len() < 2 {
            return Err(Error::IncompleteData(format!(
                "unit {unit} is missing an arm (connected: {}, not connected: {})",
                conn.len(),
                not_conn.len()
            )));
        }
        comparisons.push(compare(format!("unit {unit}"), &conn, &not_conn)?);
    }
    let verdict = comparisons
        .iter()
        .zip(&units)
        .filter(|(_, &u)| u >= 2)
        .all(|(c, _)| c.p < ALPHA);
    Ok(HypothesisReport {
        id: HypothesisId::H1,
        comparisons,
        verdict,
    })
}

/// Trapezoidal area under a per-unit curve with unit spacing.
pub fn trapezoid_auc(values: &[f64]) -> f64 {
    values
        .windows(2)
        .map(|w| 0.5 * (w[0] + w[1]))
        .sum()
}

fn per_repetition_series(
    results: &[GameUnitResult],
    connected: bool,
    units: &[usize],
) -> Result<Vec<Vec<f64>>> {
    let reps = repetitions_of(results, connected);
    let mut series = Vec::with_capacity(reps.len());
    for &rep in &reps {
        let mut values = Vec::with_capacity(units.len());
        for &unit in units {
            let v = results
                .iter()
                .find(|r| r.connected == connected && r.repetition == rep && r.unit == unit)
                .ok_or_else(|| {
                    Error::IncompleteData(format!(
                        "repetition {rep} ({}connected) is missing unit {unit}",
                        if connected { "" } else { "not " }
                    ))
                })?;
            values.push(v.similarity);
        }
        series.push(values);
    }
    Ok(series)
}

/// H2: per-repetition AUC of the similarity curve, then a t-test between
/// the arms' AUC samples.
pub fn h2_auc(results: &[GameUnitResult]) -> Result<HypothesisReport> {
    let units = units_of(results);
    if units.len() < 2 {
        return Err(Error::IncompleteData(
            "AUC needs at least 2 game units".into(),
        ));
    }
    let conn: Vec<f64> = per_repetition_series(results, true, &units)?
        .iter()
        .map(|s| trapezoid_auc(s))
        .collect();
    let not_conn: Vec<f64> = per_repetition_series(results, false, &units)?
        .iter()
        .map(|s| trapezoid_auc(s))
        .collect();
    let comparison = compare("auc".into(), &conn, &not_conn)?;
    let verdict = comparison.p < ALPHA;
    Ok(HypothesisReport {
        id: HypothesisId::H2,
        comparisons: vec![comparison],
        verdict,
    })
}

/// H3: per repetition, the first game unit whose similarity exceeds
/// `theta`; repetitions that never cross are assigned `last unit + 1`.
pub fn h3_time_to_threshold(results: &[GameUnitResult], theta: f64) -> Result<HypothesisReport> {
    let units = units_of(results);
    if units.is_empty() {
        return Err(Error::IncompleteData("no game-unit results".into()));
    }
    let censor = units.last().expect("non-empty") + 1;
    let first_crossing = |series: &[f64]| -> f64 {
        series
            .iter()
            .zip(&units)
            .find(|(v, _)| **v > theta)
            .map_or(censor as f64, |(_, &u)| u as f64)
    };
    let conn: Vec<f64> = per_repetition_series(results, true, &units)?
        .iter()
        .map(|s| first_crossing(s))
        .collect();
    let not_conn: Vec<f64> = per_repetition_series(results, false, &units)?
        .iter()
        .map(|s| first_crossing(s))
        .collect();
    let comparison = compare(format!("first unit above {theta}"), &conn, &not_conn)?;
    let verdict = comparison.p < ALPHA;
    Ok(HypothesisReport {
        id: HypothesisId::H3,
        comparisons: vec![comparison],
        verdict,
    })
}

/// H4: from the convergence unit on, the cross-repetition standard
/// deviation per unit forms each arm's sample; a t-test compares the two.
pub fn h4_variance(results: &[GameUnitResult], convergence_unit: usize) -> Result<HypothesisReport> {
    let units: Vec<usize> = units_of(results)
        .into_iter()
        .filter(|&u| u >= convergence_unit)
        .collect();
    if units.len() < 2 {
        return Err(Error::IncompleteData(format!(
            "H4 needs at least 2 units at or after convergence unit {convergence_unit}"
        )));
    }
    let mut conn_sd = Vec::with_capacity(units.len());
    let mut not_conn_sd = Vec::with_capacity(units.len());
    for &unit in &units {
        let conn = arm_values(results, unit, true);
        let not_conn = arm_values(results, unit, false);
        if conn.is_empty() || not_conn.is_empty() {
            return Err(Error::IncompleteData(format!(
                "unit {unit} is missing an arm"
            )));
        }
        conn_sd.push(population_sd(&conn));
        not_conn_sd.push(population_sd(&not_conn));
    }
    let comparison = compare(
        format!("per-unit sd from unit {convergence_unit}"),
        &conn_sd,
        &not_conn_sd,
    )?;
    let verdict = comparison.p < ALPHA;
    Ok(HypothesisReport {
        id: HypothesisId::H4,
        comparisons: vec![comparison],
        verdict,
    })
}

/// Filter a sample with the median-absolute-deviation rule: values whose
/// scaled deviation from the median exceeds `threshold` are dropped.
pub fn mad_filter(values: &[f64], threshold: f64) -> Vec<f64> {
    if values.len() < 3 {
        return values.to_vec();
    }
    let med = median(values);
    let deviations: Vec<f64> = values.iter().map(|v| (v - med).abs()).collect();
    let mad = median(&deviations);
    if mad == 0.0 {
        return values.to_vec();
    }
    // 1.4826 makes the MAD consistent with the normal-distribution sigma.
    let scale = 1.4826 * mad;
    values
        .iter()
        .copied()
        .filter(|v| ((v - med) / scale).abs() <= threshold)
        .collect()
}

fn fmt_p(p: f64) -> String {
    if p < 1e-4 {
        format!("{p:.2e}")
    } else {
        format!("{p:.4}")
    }
}

/// Render a report as a text table (game unit, mean not-connected, mean
/// connected, p-value).
pub fn format_report(report: &HypothesisReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{}: {}",
        report.id,
        if report.verdict {
            "significant"
        } else {
            "not significant"
        }
    );
    let _ = writeln!(
        out,
        "{:<24} {:>18} {:>14} {:>10} {:>10}",
        "comparison", "mean not-connected", "mean connected", "t", "p-value"
    );
    for c in &report.comparisons {
        let _ = writeln!(
            out,
            "{:<24} {:>18.3} {:>14.3} {:>10.2} {:>10}",
            c.label,
            c.mean_not_connected,
            c.mean_connected,
            c.t,
            fmt_p(c.p)
        );
    }
    out
}
