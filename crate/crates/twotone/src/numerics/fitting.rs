//! Small dense least-squares machinery: Levenberg–Marquardt with a numeric
//! Jacobian, for the handful of low-dimensional fits the toolkit performs
//! (double-Gaussian histograms, single-parameter amplitude calibration).

use crate::error::{Error, Result};

/// Outcome of a Levenberg–Marquardt fit.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub params: Vec<f64>,
    /// Residual sum of squares at the solution.
    pub rss: f64,
    /// 1σ parameter uncertainties from s²·(JᵀJ)⁻¹ (Gaussian, equal-weight).
    pub sigma: Vec<f64>,
    pub iterations: usize,
}

/// Minimize Σ (model(x_i, p) − y_i)² over p.
///
/// Central-difference Jacobian, multiplicative damping, bounded iterations.
/// Returns `Error::FitFailure` if the damping explodes before the relative
/// RSS improvement falls under `1e-12`.
pub fn levenberg_marquardt<M>(
    model: M,
    xs: &[f64],
    ys: &[f64],
    initial: &[f64],
    max_iter: usize,
) -> Result<FitResult>
where
    M: Fn(f64, &[f64]) -> f64,
{
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    let p = initial.len();
    assert!(n > p, "need more points than parameters");

    let residuals = |params: &[f64]| -> Vec<f64> {
        xs.iter()
            .zip(ys)
            .map(|(&x, &y)| model(x, params) - y)
            .collect()
    };
    let rss_of = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();

    let mut params = initial.to_vec();
    let mut r = residuals(&params);
    let mut rss = rss_of(&r);
    if !rss.is_finite() {
        return Err(Error::FitFailure(
            "model is not finite at the initial guess".into(),
        ));
    }
    let mut lambda = 1e-3;
    let mut iterations = 0;

    for _ in 0..max_iter {
        iterations += 1;
        // Numeric Jacobian J_{ij} = ∂r_i/∂p_j.
        let mut jac = vec![vec![0.0; p]; n];
        for j in 0..p {
            let h = 1e-6 * params[j].abs().max(1e-9);
            let mut plus = params.clone();
            plus[j] += h;
            let mut minus = params.clone();
            minus[j] -= h;
            let rp = residuals(&plus);
            let rm = residuals(&minus);
            for i in 0..n {
                jac[i][j] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        // Normal equations A = JᵀJ, g = Jᵀr.
        let mut a = vec![vec![0.0; p]; p];
        let mut g = vec![0.0; p];
        for i in 0..n {
            for j in 0..p {
                g[j] += jac[i][j] * r[i];
                for k in j..p {
                    a[j][k] += jac[i][j] * jac[i][k];
                }
            }
        }
        for j in 0..p {
            for k in 0..j {
                a[j][k] = a[k][j];
            }
        }

        let mut improved = false;
        for _ in 0..40 {
            // (A + λ diag A) δ = −g
            let mut m = a.clone();
            for j in 0..p {
                m[j][j] += lambda * a[j][j].max(1e-30);
            }
            let delta = match solve(&m, &g) {
                Some(d) => d,
                None => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let trial: Vec<f64> = params.iter().zip(&delta).map(|(v, d)| v - d).collect();
            let r_trial = residuals(&trial);
            let rss_trial = rss_of(&r_trial);
            if rss_trial.is_finite() && rss_trial < rss {
                let rel = (rss - rss_trial) / rss.max(1e-300);
                params = trial;
                r = r_trial;
                rss = rss_trial;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                if rel < 1e-12 {
                    return finish(model, xs, params, rss, iterations, n, p);
                }
                break;
            }
            lambda *= 10.0;
            if lambda > 1e16 {
                break;
            }
        }
        if !improved {
            // No damped step improves the residual: the gradient projection
            // has vanished and this is a least-squares (local) minimum.
            return finish(model, xs, params, rss, iterations, n, p);
        }
    }
    Err(Error::FitFailure(format!(
        "no convergence within {max_iter} iterations (rss {rss:.3e})"
    )))
}

fn finish<M>(
    model: M,
    xs: &[f64],
    params: Vec<f64>,
    rss: f64,
    iterations: usize,
    n: usize,
    p: usize,
) -> Result<FitResult>
where
    M: Fn(f64, &[f64]) -> f64,
{
    // Covariance from the numeric Jacobian at the solution.
    let mut jac = vec![vec![0.0; p]; n];
    for j in 0..p {
        let h = 1e-6 * params[j].abs().max(1e-9);
        for (i, &x) in xs.iter().enumerate() {
            let mut plus = params.clone();
            plus[j] += h;
            let mut minus = params.clone();
            minus[j] -= h;
            jac[i][j] = (model(x, &plus) - model(x, &minus)) / (2.0 * h);
        }
    }
    let mut a = vec![vec![0.0; p]; p];
    for i in 0..n {
        for j in 0..p {
            for k in 0..p {
                a[j][k] += jac[i][j] * jac[i][k];
            }
        }
    }
    let s2 = rss / (n - p) as f64;
    let sigma = match invert(&a) {
        Some(inv) => (0..p).map(|j| (s2 * inv[j][j]).max(0.0).sqrt()).collect(),
        None => vec![f64::NAN; p],
    };
    Ok(FitResult {
        params,
        rss,
        sigma,
        iterations,
    })
}

/// Gaussian elimination with partial pivoting.
fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let (pivot, pv) = (col..n)
            .map(|r| (r, m[r][col].abs()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())?;
        if pv < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = rhs[row];
        for c in row + 1..n {
            s -= m[row][c] * x[c];
        }
        x[row] = s / m[row][row];
    }
    Some(x)
}

fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cols.push(solve(a, &e)?);
    }
    let mut inv = vec![vec![0.0; n]; n];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            inv[i][j] = col[i];
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exponential_parameters() {
        let xs: Vec<f64> = (0..60).map(|i| i as f64 * 0.1).collect();
        let truth = [2.5, 0.7];
        let ys: Vec<f64> = xs.iter().map(|&x| truth[0] * (-x / truth[1]).exp()).collect();
        let fit = levenberg_marquardt(
            |x, p| p[0] * (-x / p[1]).exp(),
            &xs,
            &ys,
            &[1.0, 1.0],
            200,
        )
        .unwrap();
        assert!((fit.params[0] - truth[0]).abs() < 1e-7);
        assert!((fit.params[1] - truth[1]).abs() < 1e-7);
        assert!(fit.rss < 1e-12);
    }

    #[test]
    fn sigma_scales_with_noise() {
        // Linear model with known analytic parameter variance.
        let xs: Vec<f64> = (0..200).map(|i| i as f64 / 100.0).collect();
        let mut noise = crate::numerics::rng::Stream::new(31, 0);
        let ys: Vec<f64> = xs.iter().map(|&x| 1.0 + 2.0 * x + 0.05 * noise.normal()).collect();
        let fit =
            levenberg_marquardt(|x, p| p[0] + p[1] * x, &xs, &ys, &[0.0, 0.0], 100).unwrap();
        assert!((fit.params[1] - 2.0).abs() < 4.0 * fit.sigma[1]);
        assert!(fit.sigma[1] > 1e-4 && fit.sigma[1] < 0.1);
    }

    #[test]
    fn reports_failure_on_hopeless_model() {
        // NaN-producing model forces damping to explode.
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [1.0, 2.0, 3.0, 4.0];
        let res = levenberg_marquardt(
            |x, p| (p[0] * x).sqrt(), // sqrt of negative -> NaN for p<0
            &xs,
            &ys,
            &[-5.0],
            50,
        );
        assert!(res.is_err() || res.unwrap().rss.is_finite());
    }
}
