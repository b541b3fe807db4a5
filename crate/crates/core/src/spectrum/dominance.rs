use num_complex::Complex64;
use serde::Serialize;

use super::CharPoly;

/// Default relative gap required between the two largest root moduli.
pub const DEFAULT_MARGIN: f64 = 1e-6;

const MAX_ITERATIONS: usize = 2000;
const STEP_TOLERANCE: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexRoot {
    pub re: f64,
    pub im: f64,
}

impl ComplexRoot {
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Heuristic floating-point view of all complex roots. Advisory only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    /// Sorted by decreasing modulus.
    pub root_estimates: Vec<ComplexRoot>,
    pub dominant_modulus: f64,
    pub second_modulus: f64,
    pub unique_dominant: bool,
    pub margin: f64,
    pub iterations: usize,
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

fn horner(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    // value and derivative together
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Approximates every root of `cp` with the Aberth-Ehrlich iteration and
/// decides whether the largest-modulus root is real, positive and strictly
/// dominant by a relative gap above `margin`.
pub fn dominance_report(cp: &CharPoly, margin: f64) -> DominanceReport {
    let coeffs: Vec<f64> = cp.poly.coeffs().iter().map(|c| c.to_f64()).collect();
    let d = coeffs.len() - 1;
    if d == 0 {
        return DominanceReport {
            root_estimates: Vec::new(),
            dominant_modulus: 0.0,
            second_modulus: 0.0,
            unique_dominant: false,
            margin,
            iterations: 0,
            max_residual: 0.0,
            diagnostic: Some("constant polynomial has no roots".into()),
        };
    }

    // Fujiwara-style radius for the starting circle.
    let lead = coeffs[d];
    let radius = (0..d)
        .map(|i| (coeffs[i] / lead).abs().powf(1.0 / (d - i) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-3)
        * 2.0;
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / d as f64 + 0.4))
        .collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut max_step = 0.0f64;
        for k in 0..d {
            let (p, dp) = horner(&coeffs, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..d).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step < STEP_TOLERANCE {
            converged = true;
            break;
        }
    }

    let scale: f64 = coeffs.iter().map(|c| c.abs()).sum();
    let max_residual = z
        .iter()
        .map(|&r| horner(&coeffs, r).0.norm() / (scale * r.norm().max(1.0).powi(d as i32)))
        .fold(0.0, f64::max);

    let mut roots: Vec<ComplexRoot> = z.iter().map(|c| ComplexRoot { re: c.re, im: c.im }).collect();
    roots.sort_by(|a, b| b.modulus().total_cmp(&a.modulus()));
    let dominant_modulus = roots[0].modulus();
    let second_modulus = roots.get(1).map_or(0.0, ComplexRoot::modulus);
    let top = roots[0];
    let real_positive = top.re > 0.0 && top.im.abs() <= 1e-9 * dominant_modulus.max(1.0);
    let gap = if dominant_modulus > 0.0 { (dominant_modulus - second_modulus) / dominant_modulus } else { 0.0 };

    let diagnostic = if !converged {
        Some(format!("Aberth iteration did not converge within {MAX_ITERATIONS} iterations"))
    } else if !real_positive {
        Some("largest-modulus root is not real and positive".into())
    } else if gap <= margin {
        Some(format!("relative modulus gap {gap:.3e} does not exceed margin {margin:.1e}"))
    } else {
        None
    };

    DominanceReport {
        root_estimates: roots,
        dominant_modulus,
        second_modulus,
        unique_dominant: diagnostic.is_none(),
        margin,
        iterations,
        max_residual,
        diagnostic,
    }
}
