//! Ordinary least squares of joint load on gait parameters, with two-sided t-tests.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::archive::ParetoArchive;
use super::special::t_two_sided_p;

pub const SIGNIFICANCE_LEVEL: f64 = 0.05;
/// Columns pushing the scaled design's condition number past this are treated as aliased.
pub const CONDITION_LIMIT: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariableGroup {
    Intercept,
    /// Duty factor and swing height.
    DutyHeight,
    Strides,
    Speeds,
}

impl VariableGroup {
    pub const EXPLANATORY: [VariableGroup; 3] = [VariableGroup::DutyHeight, VariableGroup::Strides, VariableGroup::Speeds];

    pub fn label(self) -> &'static str {
        match self {
            VariableGroup::Intercept => "intercept",
            VariableGroup::DutyHeight => "duty/height",
            VariableGroup::Strides => "strides",
            VariableGroup::Speeds => "speeds",
        }
    }
}

impl std::str::FromStr for VariableGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "duty-height" | "duty_height" => Ok(VariableGroup::DutyHeight),
            "strides" => Ok(VariableGroup::Strides),
            "speeds" => Ok(VariableGroup::Speeds),
            other => Err(Error::Parameter(format!(
                "unknown variable group `{other}` (expected duty-height, strides or speeds)"
            ))),
        }
    }
}

/// One row of the coefficient table. Aliased variables have no estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub group: VariableGroup,
    pub estimate: Option<f64>,
    /// Estimate scaled by sd(x)/sd(y).
    pub standardized: Option<f64>,
    pub std_error: Option<f64>,
    pub t_statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub significant: bool,
    pub aliased: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionReport {
    pub response: String,
    pub n_observations: usize,
    pub n_variables: usize,
    pub degrees_of_freedom: usize,
    pub r_squared: f64,
    pub adjusted_r_squared: f64,
    pub residual_std_error: f64,
    /// Of the column-normalized full design; `None` when singular.
    pub condition_number: Option<f64>,
    pub significance_level: f64,
    /// Intercept first, then the explanatory variables in design order.
    pub coefficients: Vec<Coefficient>,
    pub flags: Vec<String>,
}

impl RegressionReport {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let opt = |v: Option<f64>, prec: usize| v.map_or("undefined".to_string(), |x| format!("{x:.prec$}"));
        let mut out = format!(
            "response {}  n = {}  df = {}  R^2 = {:.4}  adj R^2 = {:.4}  sigma = {:.6}\n",
            self.response,
            self.n_observations,
            self.degrees_of_freedom,
            self.r_squared,
            self.adjusted_r_squared,
            self.residual_std_error
        );
        out.push_str(&format!(
            "{:<22} {:<12} {:>12} {:>12} {:>12} {:>10} {:>10}  sig\n",
            "variable", "group", "B", "std B", "SE", "t", "p"
        ));
        for c in &self.coefficients {
            out.push_str(&format!(
                "{:<22} {:<12} {:>12} {:>12} {:>12} {:>10} {:>10}  {}\n",
                c.name,
                c.group.label(),
                opt(c.estimate, 6),
                opt(c.standardized, 4),
                opt(c.std_error, 6),
                opt(c.t_statistic, 3),
                opt(c.p_value, 4),
                if c.aliased {
                    "aliased"
                } else if c.significant {
                    "*"
                } else {
                    ""
                }
            ));
        }
        for f in &self.flags {
            out.push_str(&format!("note: {f}\n"));
        }
        out
    }
}

/// Regression inputs: one named, grouped column per explanatory variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub names: Vec<String>,
    pub groups: Vec<VariableGroup>,
    pub rows: Vec<Vec<f64>>,
    pub response: Vec<f64>,
}

impl Design {
    /// f_load on `[beta, H, L_1..L_k, V_1..V_k]` over the feasible entries, limited to the
    /// requested groups.
    pub fn load_on_gait(archives: &[&ParetoArchive], groups: &[VariableGroup]) -> Result<Self> {
        let k = archives.first().map_or(0, |a| a.metadata.leg_count);
        if let Some(a) = archives.iter().find(|a| a.metadata.leg_count != k) {
            return Err(Error::Comparison(format!(
                "cannot pool {k}-legged and {}-legged archives",
                a.metadata.leg_count
            )));
        }
        let mut names = Vec::new();
        let mut all_groups = Vec::new();
        let mut pick = Vec::new();
        let mut add = |name: String, group, col: Box<dyn Fn(&[f64]) -> f64>| {
            if groups.contains(&group) {
                names.push(name);
                all_groups.push(group);
                pick.push(col);
            }
        };
        add("duty_factor".into(), VariableGroup::DutyHeight, Box::new(move |g| g[2 * k + 1]));
        add("swing_height_m".into(), VariableGroup::DutyHeight, Box::new(move |g| g[2 * k]));
        for i in 0..k {
            add(format!("strides_m[{i}]"), VariableGroup::Strides, Box::new(move |g| g[i]));
        }
        for i in 0..k {
            add(format!("swing_speeds_mps[{i}]"), VariableGroup::Speeds, Box::new(move |g| g[k + i]));
        }
        let mut rows = Vec::new();
        let mut response = Vec::new();
        for e in archives.iter().flat_map(|a| a.feasible()) {
            rows.push(pick.iter().map(|f| f(&e.genome)).collect());
            response.push(e.objectives.f_load);
        }
        Ok(Design {
            names,
            groups: all_groups,
            rows,
            response,
        })
    }
}

/// Per-archive load regression over all three variable groups.
pub fn regress_load(archive: &ParetoArchive) -> Result<RegressionReport> {
    ols(&Design::load_on_gait(&[archive], &VariableGroup::EXPLANATORY)?, "f_load")
}

fn lexicographic(a: &(Vec<f64>, f64), b: &(Vec<f64>, f64)) -> Ordering {
    a.0.iter()
        .zip(&b.0)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
        .then(a.1.total_cmp(&b.1))
}

fn condition(x: &DMatrix<f64>) -> f64 {
    let sv = x.clone().svd(false, false).singular_values;
    let max = sv.max();
    let min = sv.min();
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

fn column_normalized(x: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    let mut m = x.select_columns(cols);
    for mut c in m.column_iter_mut() {
        let n = c.norm();
        if n > 0.0 {
            c /= n;
        }
    }
    m
}

fn sample_sd(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = v.clone().count() as f64;
    let mean = v.clone().sum::<f64>() / n;
    (v.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// OLS with intercept. Rows are sorted canonically first, so the result does not depend
/// on observation order.
pub fn ols(design: &Design, response: &str) -> Result<RegressionReport> {
    let p = design.names.len();
    let n = design.rows.len();
    if design.groups.len() != p || design.response.len() != n || design.rows.iter().any(|r| r.len() != p) {
        return Err(Error::Structural("design columns, groups and response disagree in size".into()));
    }
    if n <= p + 1 {
        return Err(Error::InsufficientData(format!(
            "regression on {p} variables needs at least {} observations, got {n}",
            p + 2
        )));
    }
    let mut obs: Vec<(Vec<f64>, f64)> = design.rows.iter().cloned().zip(design.response.iter().cloned()).collect();
    obs.sort_by(lexicographic);

    let x = DMatrix::from_fn(n, p + 1, |i, j| if j == 0 { 1.0 } else { obs[i].0[j - 1] });
    let y = DVector::from_iterator(n, obs.iter().map(|o| o.1));
    let all: Vec<usize> = (0..=p).collect();
    let full_condition = condition(&column_normalized(&x, &all));

    let mut kept = vec![0usize];
    let mut aliased = vec![false; p + 1];
    for j in 1..=p {
        let mut trial = kept.clone();
        trial.push(j);
        let norm = x.column(j).norm();
        if norm == 0.0 || condition(&column_normalized(&x, &trial)) > CONDITION_LIMIT {
            aliased[j] = true;
        } else {
            kept = trial;
        }
    }

    let xk = x.select_columns(&kept);
    let qr = xk.clone().qr();
    let r = qr.r();
    let qty = qr.q().transpose() * &y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Parameter("design matrix is singular".into()))?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(kept.len(), kept.len()))
        .ok_or_else(|| Error::Parameter("design matrix is singular".into()))?;

    let residuals = &y - &xk * &beta;
    let rss = residuals.norm_squared();
    let y_mean = y.mean();
    let tss = y.iter().map(|v| (v - y_mean).powi(2)).sum::<f64>();
    let dof = n - kept.len();
    let sigma2 = rss / dof as f64;

    let mut flags = Vec::new();
    let r_squared = if tss > 0.0 {
        (1.0 - rss / tss).clamp(0.0, 1.0)
    } else {
        flags.push("response is constant; R^2 is reported as 0".to_string());
        0.0
    };
    if aliased.iter().skip(1).all(|&a| a) && p > 0 {
        flags.push("every explanatory variable is aliased (degenerate archive)".to_string());
    } else if aliased.iter().any(|&a| a) {
        let names: Vec<&str> = (1..=p).filter(|&j| aliased[j]).map(|j| design.names[j - 1].as_str()).collect();
        flags.push(format!("aliased variables dropped from the fit: {}", names.join(", ")));
    }
    let sd_y = sample_sd(y.iter().cloned());

    let mut coefficients = Vec::with_capacity(p + 1);
    for j in 0..=p {
        let (name, group) = if j == 0 {
            ("intercept".to_string(), VariableGroup::Intercept)
        } else {
            (design.names[j - 1].clone(), design.groups[j - 1])
        };
        let Some(pos) = kept.iter().position(|&c| c == j) else {
            coefficients.push(Coefficient {
                name,
                group,
                estimate: None,
                standardized: None,
                std_error: None,
                t_statistic: None,
                p_value: None,
                significant: false,
                aliased: true,
            });
            continue;
        };
        let b = beta[pos];
        let se = (sigma2 * r_inv.row(pos).norm_squared()).sqrt();
        let t = if se > 0.0 {
            b / se
        } else if b == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(b)
        };
        let p_value = t_two_sided_p(t, dof as f64);
        let standardized = if j > 0 && sd_y > 0.0 {
            Some(b * sample_sd(x.column(j).iter().cloned()) / sd_y)
        } else {
            None
        };
        coefficients.push(Coefficient {
            name,
            group,
            estimate: Some(b),
            standardized,
            std_error: Some(se),
            t_statistic: t.is_finite().then_some(t),
            p_value: Some(p_value),
            significant: p_value < SIGNIFICANCE_LEVEL,
            aliased: false,
        });
    }

    Ok(RegressionReport {
        response: response.to_string(),
        n_observations: n,
        n_variables: p,
        degrees_of_freedom: dof,
        r_squared,
        adjusted_r_squared: 1.0 - (1.0 - r_squared) * (n - 1) as f64 / dof as f64,
        residual_std_error: sigma2.sqrt(),
        condition_number: full_condition.is_finite().then_some(full_condition),
        significance_level: SIGNIFICANCE_LEVEL,
        coefficients,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn design(rows: Vec<Vec<f64>>, response: Vec<f64>) -> Design {
        let p = rows[0].len();
        Design {
            names: (0..p).map(|i| format!("x{i}")).collect(),
            groups: vec![VariableGroup::Strides; p],
            rows,
            response,
        }
    }

    fn random_rows(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Vec<Vec<f64>> {
        (0..n).map(|_| (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()
    }

    #[test]
    fn exact_linear_response_is_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rows = random_rows(&mut rng, 40, 4);
        let y = rows.iter().map(|r| 2.0 * r[1] + 1.0).collect();
        let rep = ols(&design(rows, y), "y").unwrap();
        assert!((rep.coefficient("x1").unwrap().estimate.unwrap() - 2.0).abs() < 1e-10);
        assert!((rep.coefficients[0].estimate.unwrap() - 1.0).abs() < 1e-10);
        assert!(rep.coefficient("x1").unwrap().p_value.unwrap() < 1e-12);
        for name in ["x0", "x2", "x3"] {
            assert!(rep.coefficient(name).unwrap().estimate.unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn matches_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rows = random_rows(&mut rng, 60, 6);
        let y: Vec<f64> = rows.iter().map(|r| r.iter().sum::<f64>() + rng.gen_range(-0.5..0.5)).collect();
        let rep = ols(&design(rows.clone(), y.clone()), "y").unwrap();
        // oracle uses the original row order
        let x = DMatrix::from_fn(60, 7, |i, j| if j == 0 { 1.0 } else { rows[i][j - 1] });
        let xtx = x.transpose() * &x;
        let b = xtx.clone().try_inverse().unwrap() * x.transpose() * DVector::from_vec(y);
        for j in 0..7 {
            assert!((rep.coefficients[j].estimate.unwrap() - b[j]).abs() < 1e-8);
        }
        assert!(rep.r_squared > 0.0 && rep.r_squared <= 1.0);
    }

    #[test]
    fn collinear_column_is_flagged() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut rows = random_rows(&mut rng, 30, 3);
        for r in &mut rows {
            r.push(2.0 * r[0] - r[2]);
        }
        let y = rows.iter().map(|r| r[0] + rng.gen_range(0.0..0.1)).collect();
        let rep = ols(&design(rows, y), "y").unwrap();
        assert!(rep.coefficient("x3").unwrap().aliased);
        assert!(rep.coefficient("x3").unwrap().estimate.is_none());
        assert!(rep.condition_number.map_or(true, |c| c > CONDITION_LIMIT));
        assert!(!rep.flags.is_empty());
        assert_eq!(rep.degrees_of_freedom, 30 - 4);
    }

    #[test]
    fn identical_genomes_give_flagged_report() {
        let rows = vec![vec![0.1, 0.2, 0.3]; 10];
        let y = (0..10).map(|i| i as f64).collect();
        let rep = ols(&design(rows, y), "y").unwrap();
        assert!(rep.coefficients[1..].iter().all(|c| c.aliased));
        assert!(rep.flags.iter().any(|f| f.contains("degenerate")));
        let json = rep.to_json();
        assert!(!json.contains("NaN"));
        let back: RegressionReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rep);
    }

    #[test]
    fn too_few_observations() {
        let rows = vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]];
        let err = ols(&design(rows, vec![1.0, 2.0, 3.0]), "y").unwrap_err();
        assert!(matches!(err, Error::InsufficientData(ref m) if m.contains("at least 4")), "{err}");
    }

    #[test]
    fn order_invariant_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rows = random_rows(&mut rng, 50, 5);
        let y: Vec<f64> = (0..50).map(|_| rng.gen_range(0.0..1.0)).collect();
        let a = ols(&design(rows.clone(), y.clone()), "y").unwrap();
        let mut idx: Vec<usize> = (0..50).collect();
        idx.reverse();
        idx.swap(3, 17);
        let b = ols(
            &design(idx.iter().map(|&i| rows[i].clone()).collect(), idx.iter().map(|&i| y[i]).collect()),
            "y",
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn noise_rejection_rate_near_nominal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (mut hits, mut tests) = (0usize, 0usize);
        for _ in 0..300 {
            let rows = random_rows(&mut rng, 91, 14);
            let y = (0..91).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let rep = ols(&design(rows, y), "y").unwrap();
            for c in &rep.coefficients[1..] {
                tests += 1;
                hits += c.significant as usize;
            }
        }
        let rate = hits as f64 / tests as f64;
        assert!((rate - 0.05).abs() < 0.01, "rejection rate {rate}");
    }
}
