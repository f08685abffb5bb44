//! Pearson's chi-square test of independence and Holm-Bonferroni
//! step-down correction.
//!
//! Tail probabilities come from the regularized upper incomplete gamma
//! function: a power series below `x < a + 1`, a modified Lentz continued
//! fraction above.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 100_000;
const TINY: f64 = 1e-300;

/// Lanczos approximation (g = 7, n = 9).
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection: Γ(x)Γ(1-x) = π / sin(πx).
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn prefactor(a: f64, x: f64) -> f64 {
    (a * x.ln() - x - ln_gamma(a)).exp()
}

/// Lower regularized gamma P(a, x) by its power series.
fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * prefactor(a, x)
}

/// Upper regularized gamma Q(a, x) by continued fraction.
fn gamma_q_fraction(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    prefactor(a, x) * h
}

/// Regularized upper incomplete gamma Q(a, x) = Γ(a, x) / Γ(a).
pub fn gamma_q(a: f64, x: f64) -> f64 {
    assert!(a > 0.0, "gamma_q needs a > 0");
    if x <= 0.0 {
        return 1.0;
    }
    let q = if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_fraction(a, x)
    };
    q.clamp(0.0, 1.0)
}

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
pub fn chi_square_sf(stat: f64, dof: usize) -> f64 {
    if dof == 0 || stat <= 0.0 {
        return 1.0;
    }
    gamma_q(dof as f64 / 2.0, stat / 2.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub stat: f64,
    pub dof: usize,
    pub p: f64,
}

/// Pearson chi-square test of independence on a contingency table, without
/// continuity correction.
pub fn chi_square_independence(table: &[Vec<u64>]) -> Result<ChiSquare> {
    let rows = table.len();
    let cols = table.first().map_or(0, Vec::len);
    if rows < 2 || cols < 2 {
        return Err(Error::Shape(format!(
            "contingency table must be at least 2x2, got {rows}x{cols}"
        )));
    }
    if table.iter().any(|r| r.len() != cols) {
        return Err(Error::Shape(
            "contingency table rows differ in length".into(),
        ));
    }
    let row_sums: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let col_sums: Vec<f64> = (0..cols)
        .map(|j| table.iter().map(|r| r[j]).sum::<u64>() as f64)
        .collect();
    if row_sums.iter().chain(&col_sums).any(|&s| s == 0.0) {
        return Err(Error::Degenerate(
            "contingency table has an empty row or column".into(),
        ));
    }
    let total: f64 = row_sums.iter().sum();
    let mut stat = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &observed) in row.iter().enumerate() {
            let expected = row_sums[i] * col_sums[j] / total;
            let diff = observed as f64 - expected;
            stat += diff * diff / expected;
        }
    }
    let dof = (rows - 1) * (cols - 1);
    let stat = stat.max(0.0);
    Ok(ChiSquare {
        stat,
        dof,
        p: chi_square_sf(stat, dof),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolmResult {
    pub adjusted: Vec<f64>,
    pub reject: Vec<bool>,
}

/// Holm-Bonferroni step-down adjustment. Results are in input order.
pub fn holm_bonferroni(p_raw: &[f64], alpha: f64) -> Result<HolmResult> {
    if let Some(p) = p_raw.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Range(format!("p-value {p} outside [0, 1]")));
    }
    let m = p_raw.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_raw[a].total_cmp(&p_raw[b]).then(a.cmp(&b)));

    let mut adjusted = vec![0.0; m];
    let mut reject = vec![false; m];
    let mut running = 0.0f64;
    let mut still_rejecting = true;
    for (rank, &idx) in order.iter().enumerate() {
        let scaled = ((m - rank) as f64 * p_raw[idx]).min(1.0);
        running = running.max(scaled);
        adjusted[idx] = running;
        still_rejecting &= running < alpha;
        reject[idx] = still_rejecting;
    }
    Ok(HolmResult { adjusted, reject })
}
