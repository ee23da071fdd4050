//! Small statistical helpers shared by the classifier and the scoring code.

use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {need} observations, got {got}")]
    DegenerateLength { need: usize, got: usize },
    #[error("zero variance in both samples")]
    ZeroVariance,
}

/// 1-based ranks, ties sharing their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Pearson correlation; `None` when either side has zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Two-tailed p-value of a correlation coefficient via the t approximation.
pub fn correlation_p_value(rho: f64, m: usize) -> f64 {
    if m < 3 {
        return 1.0;
    }
    let df = (m - 2) as f64;
    if rho.abs() >= 1.0 {
        return 0.0;
    }
    let t = rho * (df / (1.0 - rho * rho)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    2.0 * dist.sf(t.abs())
}

/// Spearman's ρ over two rank lists with distinct ranks, and its two-tailed
/// p-value.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<(f64, f64), StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch(xs.len(), ys.len()));
    }
    let m = xs.len();
    if m < 2 {
        return Err(StatsError::DegenerateLength { need: 2, got: m });
    }
    let d2: f64 = xs.iter().zip(ys).map(|(x, y)| (x - y) * (x - y)).sum();
    let mf = m as f64;
    let rho = 1.0 - 6.0 * d2 / (mf * (mf * mf - 1.0));
    Ok((rho, correlation_p_value(rho, m)))
}

/// Yates-corrected χ² for the 2×2 table `[[a, b], [c, d]]`, with its
/// survival p-value at one degree of freedom.
pub fn chi_squared_yates(table: [[u64; 2]; 2]) -> (f64, f64) {
    chi_squared_2x2(table, true)
}

/// 2×2 chi-squared test of independence at one degree of freedom, with or
/// without the continuity correction.
pub fn chi_squared_2x2(table: [[u64; 2]; 2], yates: bool) -> (f64, f64) {
    let [[a, b], [c, d]] = table.map(|r| r.map(|v| v as f64));
    let n = a + b + c + d;
    let denom = (a + b) * (c + d) * (a + c) * (b + d);
    if denom == 0.0 {
        return (0.0, 1.0);
    }
    let correction = if yates { n / 2.0 } else { 0.0 };
    let diff = ((a * d - b * c).abs() - correction).max(0.0);
    let stat = n * diff * diff / denom;
    let p = ChiSquared::new(1.0).expect("1 dof").sf(stat);
    (stat, p)
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, v)
}

/// Welch's unequal-variance t test: `(t, df, two-tailed p)`.
pub fn welch_t_test(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64), StatsError> {
    for s in [xs, ys] {
        if s.len() < 2 {
            return Err(StatsError::DegenerateLength { need: 2, got: s.len() });
        }
    }
    let (mx, vx) = mean_var(xs);
    let (my, vy) = mean_var(ys);
    let (sx, sy) = (vx / xs.len() as f64, vy / ys.len() as f64);
    let se2 = sx + sy;
    if se2 == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let t = (mx - my) / se2.sqrt();
    let df = se2 * se2 / (sx * sx / (xs.len() as f64 - 1.0) + sy * sy / (ys.len() as f64 - 1.0));
    let p = 2.0 * StudentsT::new(0.0, 1.0, df).expect("df > 0").sf(t.abs());
    Ok((t, df, p))
}
