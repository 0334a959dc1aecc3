//! Means of order statistics of i.i.d. edge weights.
//!
//! For a vertex of degree k whose incoming weights are sorted increasingly,
//! the vaccination analytics need E[W_(j)] for single ranks and, far more
//! often, the partial sums over the lowest ranks. Everything here requires
//! a continuous weight law: with atoms the ranking is not almost surely
//! unique and the strategy built on it is ill-defined.
//!
//! Two integral routes are implemented. The defining one integrates
//! x f_(k,j)(x) against the order-statistic density. The workhorse for
//! partial sums integrates survival functions instead: summing
//! P(W_(j) > x) over j <= m and swapping sum and integral gives
//!
//!   sum_{j<=m} E[W_(j)] = int_0^1 sum_{i<m} (m - i) Bin(k, F(x))(i) dx,
//!
//! so a single binomial-pmf evaluation at F(x) yields the integrand for
//! every m at once, and only the CDF is needed (no density, hence no
//! trouble from Beta shapes below one). Results are memoized per model
//! label, which is canonical for the model's parameters.

use crate::error::{Error, Result};
use crate::quad;
use crate::weight::WeightModel;
use statrs::function::gamma::ln_gamma;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Internal quadrature targets, well inside the 1e-9 headline accuracy.
const SCALAR_TOL: f64 = 1e-12;
const VECTOR_TOL: f64 = 1e-10;

fn means_memo() -> &'static Mutex<HashMap<(String, u32, u32), f64>> {
    static MEMO: OnceLock<Mutex<HashMap<(String, u32, u32), f64>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

fn prefix_memo() -> &'static Mutex<HashMap<(String, u32), Arc<Vec<f64>>>> {
    static MEMO: OnceLock<Mutex<HashMap<(String, u32), Arc<Vec<f64>>>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

fn require_continuous(m: &WeightModel, what: &'static str) -> Result<()> {
    if m.is_continuous() {
        Ok(())
    } else {
        Err(Error::Unsupported {
            kind: m.kind_name(),
            what,
        })
    }
}

/// E[W_(j)]: mean of the j-th smallest of k i.i.d. weights, 1 <= j <= k.
///
/// Uniform weights short-circuit to j/(k+1). Everything else integrates
/// the order-statistic density adaptively; values are memoized.
pub fn order_stat_mean(m: &WeightModel, k: usize, j: usize) -> Result<f64> {
    require_continuous(m, "order statistics (continuous weights only)")?;
    if j < 1 || j > k {
        return Err(Error::parameter(format!(
            "order-statistic rank must satisfy 1 <= j <= k, got j={j}, k={k}"
        )));
    }
    if matches!(m, WeightModel::Uniform) {
        return Ok(j as f64 / (k + 1) as f64);
    }

    let key = (m.label(), k as u32, j as u32);
    if let Some(&v) = means_memo().lock().unwrap().get(&key) {
        return Ok(v);
    }
    let v = order_stat_mean_by_density(m, k, j)?;
    means_memo().lock().unwrap().insert(key, v);
    Ok(v)
}

/// The defining integral: int x Gamma(k+1)/(Gamma(j)Gamma(k+1-j))
/// F^(j-1) (1-F)^(k-j) f dx, evaluated with every factor in log space so
/// ranks far into three-digit k neither overflow nor underflow.
pub fn order_stat_mean_by_density(m: &WeightModel, k: usize, j: usize) -> Result<f64> {
    require_continuous(m, "order statistics (continuous weights only)")?;
    if j < 1 || j > k {
        return Err(Error::parameter(format!(
            "order-statistic rank must satisfy 1 <= j <= k, got j={j}, k={k}"
        )));
    }
    let ln_coeff =
        ln_gamma((k + 1) as f64) - ln_gamma(j as f64) - ln_gamma((k + 1 - j) as f64);
    let model = m.clone();
    let integrand = move |x: f64| -> f64 {
        // Densities with a shape parameter below one blow up at an
        // endpoint; the singularity is integrable, so skipping the
        // endpoint itself changes nothing. Interior nodes stay finite.
        if x <= 0.0 || x >= 1.0 {
            return 0.0;
        }
        let f = model.density(x).expect("continuity checked above");
        if f <= 0.0 || !f.is_finite() {
            return 0.0;
        }
        let cdf = model.cdf(x).expect("continuity checked above");
        let lo = if j > 1 {
            if cdf <= 0.0 {
                return 0.0;
            }
            (j - 1) as f64 * cdf.ln()
        } else {
            0.0
        };
        let hi = if j < k {
            if cdf >= 1.0 {
                return 0.0;
            }
            (k - j) as f64 * (-cdf).ln_1p()
        } else {
            0.0
        };
        (ln_coeff + lo + hi + f.ln() + x.ln()).exp()
    };
    let r = quad::integrate(integrand, 0.0, 1.0, SCALAR_TOL);
    Ok(r.value)
}

/// Same mean through the survival function: int_0^1 P(W_(j) > x) dx with
/// P(W_(j) > x) a binomial lower tail at F(x). Exists as an independent
/// cross-check on the density route.
pub fn order_stat_mean_by_survival(m: &WeightModel, k: usize, j: usize) -> Result<f64> {
    require_continuous(m, "order statistics (continuous weights only)")?;
    if j < 1 || j > k {
        return Err(Error::parameter(format!(
            "order-statistic rank must satisfy 1 <= j <= k, got j={j}, k={k}"
        )));
    }
    let model = m.clone();
    let mut pmf = vec![0.0; k + 1];
    let r = quad::integrate(
        move |x| {
            let q = model.cdf(x).expect("continuity checked above");
            binom_pmf_into(k, q, &mut pmf);
            pmf[..j].iter().sum()
        },
        0.0,
        1.0,
        SCALAR_TOL,
    );
    Ok(r.value)
}

/// sum_{j=1}^{upto} E[W_(j)] for 0 <= upto <= k, from the memoized prefix
/// table. Uniform weights short-circuit to upto (upto+1) / (2(k+1)).
pub fn partial_sum_order_means(m: &WeightModel, k: usize, upto: usize) -> Result<f64> {
    require_continuous(m, "order statistics (continuous weights only)")?;
    if upto > k {
        return Err(Error::parameter(format!(
            "partial sum upper rank {upto} exceeds sample size {k}"
        )));
    }
    if matches!(m, WeightModel::Uniform) {
        return Ok((upto * (upto + 1)) as f64 / (2 * (k + 1)) as f64);
    }
    if upto == 0 {
        return Ok(0.0);
    }
    Ok(prefix_table(m, k)?[upto])
}

/// All prefix sums for one (model, k) in a single vector quadrature:
/// entry m holds sum_{j<=m} E[W_(j)]. Memoized; the coverage sweeps hit
/// the same k thousands of times.
pub(crate) fn prefix_table(m: &WeightModel, k: usize) -> Result<Arc<Vec<f64>>> {
    require_continuous(m, "order statistics (continuous weights only)")?;
    let key = (m.label(), k as u32);
    if let Some(t) = prefix_memo().lock().unwrap().get(&key) {
        return Ok(Arc::clone(t));
    }

    let model = m.clone();
    let mut pmf = vec![0.0; k + 1];
    let mut a_cum = vec![0.0; k + 1];
    let mut b_cum = vec![0.0; k + 1];
    let integrand = move |x: f64, out: &mut [f64]| {
        let q = model.cdf(x).expect("continuity checked above");
        binom_pmf_into(k, q, &mut pmf);
        let mut a = 0.0;
        let mut b = 0.0;
        for i in 0..=k {
            a += pmf[i];
            b += i as f64 * pmf[i];
            a_cum[i] = a;
            b_cum[i] = b;
        }
        out[0] = 0.0;
        for mm in 1..=k {
            out[mm] = mm as f64 * a_cum[mm - 1] - b_cum[mm - 1];
        }
    };
    let (table, _err) = quad::integrate_vec(integrand, k + 1, 0.0, 1.0, VECTOR_TOL);

    let arc = Arc::new(table);
    prefix_memo()
        .lock()
        .unwrap()
        .insert(key, Arc::clone(&arc));
    Ok(arc)
}

/// Binomial(k, q) pmf written into `out[0..=k]`, computed outward from the
/// mode with the term ratio recurrence. The mode's log-mass anchors the
/// scale, so entries underflow cleanly to zero instead of poisoning the
/// rest.
fn binom_pmf_into(k: usize, q: f64, out: &mut [f64]) {
    debug_assert_eq!(out.len(), k + 1);
    if q <= 0.0 {
        out.fill(0.0);
        out[0] = 1.0;
        return;
    }
    if q >= 1.0 {
        out.fill(0.0);
        out[k] = 1.0;
        return;
    }
    let mode = (((k + 1) as f64 * q) as usize).min(k);
    let ln_mode = ln_gamma((k + 1) as f64)
        - ln_gamma((mode + 1) as f64)
        - ln_gamma((k - mode + 1) as f64)
        + mode as f64 * q.ln()
        + (k - mode) as f64 * (-q).ln_1p();
    out[mode] = ln_mode.exp();
    let ratio = q / (1.0 - q);
    for i in mode..k {
        out[i + 1] = out[i] * ((k - i) as f64 / (i + 1) as f64) * ratio;
    }
    for i in (1..=mode).rev() {
        out[i - 1] = out[i] * (i as f64 / (k - i + 1) as f64) / ratio;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn beta_model() -> WeightModel {
        WeightModel::beta(0.5, 2.5).unwrap()
    }

    #[test]
    fn binomial_pmf_sums_to_one() {
        let mut out = vec![0.0; 101];
        for q in [0.0, 1e-9, 0.2, 0.5, 0.83, 1.0 - 1e-9, 1.0] {
            binom_pmf_into(100, q, &mut out);
            let s: f64 = out.iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "q={q}: sum={s}");
            assert!(out.iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn uniform_short_circuit() {
        let u = WeightModel::Uniform;
        assert_eq!(order_stat_mean(&u, 4, 2).unwrap(), 0.4);
        assert_eq!(partial_sum_order_means(&u, 4, 2).unwrap(), 0.6);
    }

    #[test]
    fn rank_validation() {
        let u = WeightModel::Uniform;
        assert!(order_stat_mean(&u, 4, 0).is_err());
        assert!(order_stat_mean(&u, 4, 5).is_err());
        assert!(partial_sum_order_means(&u, 4, 5).is_err());
    }

    #[test]
    fn discrete_models_rejected() {
        let m = WeightModel::two_point(0.1, 1.0, 0.9).unwrap();
        assert!(order_stat_mean(&m, 3, 1).is_err());
        assert!(partial_sum_order_means(&m, 3, 1).is_err());
    }

    #[test]
    fn single_draw_is_the_mean() {
        let m = beta_model();
        let got = order_stat_mean(&m, 1, 1).unwrap();
        assert!((got - m.mean_weight().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn density_and_survival_routes_agree() {
        let m = beta_model();
        for (k, j) in [(2, 1), (5, 3), (40, 1), (40, 40), (120, 60)] {
            let d = order_stat_mean_by_density(&m, k, j).unwrap();
            let s = order_stat_mean_by_survival(&m, k, j).unwrap();
            assert!((d - s).abs() < 1e-9, "k={k} j={j}: {d} vs {s}");
        }
    }

    #[test]
    fn prefix_table_matches_scalar_means() {
        let m = beta_model();
        let k = 12;
        let mut running = 0.0;
        for j in 1..=k {
            running += order_stat_mean(&m, k, j).unwrap();
            let table = partial_sum_order_means(&m, k, j).unwrap();
            assert!(
                (running - table).abs() < 1e-8,
                "k={k} upto={j}: {running} vs {table}"
            );
        }
    }
}
