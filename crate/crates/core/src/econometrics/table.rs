//! Regression tables: long-format CSV and a fixed-width text layout with one
//! column per model, coefficient over bracketed standard error.

use std::fmt::Write as _;

use super::{stars, RegressionResult};

/// Header of the long-format coefficient CSV.
pub const COEFFICIENT_CSV_HEADER: &str = "model,term,estimate,std_error,t_stat,p_value,stars";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Coefficient rows followed by model statistics rows (`n_observations`,
/// `n_dropped`, `r_squared`, `adj_r_squared`, `residual_std_error`,
/// `f_statistic`, `f_p_value`, `df_resid`, `hac_lag`) in the `estimate` column.
pub fn coefficient_csv_rows(model: &str, result: &RegressionResult) -> Vec<String> {
    let mut rows: Vec<String> = result
        .coefficients
        .iter()
        .map(|c| {
            format!(
                "{model},{},{},{},{},{},{}",
                c.name,
                c.estimate,
                c.std_error,
                c.t_stat,
                c.p_value,
                stars(c.p_value)
            )
        })
        .collect();
    let stats: [(&str, String); 9] = [
        ("n_observations", result.n_observations.to_string()),
        ("n_dropped", result.n_dropped.to_string()),
        ("r_squared", result.r_squared.to_string()),
        ("adj_r_squared", result.adj_r_squared.to_string()),
        ("residual_std_error", result.residual_std_error.to_string()),
        ("f_statistic", opt(result.f_statistic)),
        ("f_p_value", opt(result.f_p_value)),
        ("df_resid", result.df_resid.to_string()),
        ("hac_lag", result.hac_lag.to_string()),
    ];
    rows.extend(stats.into_iter().map(|(k, v)| format!("{model},{k},{v},,,,")));
    rows
}

fn fmt3(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:.3}")
    }
}

/// Renders models side by side. `terms` fixes the row order; terms missing
/// from a model leave its cell blank. Intercept rows go last, as `intercept_label`.
pub fn render_text_table(
    title: &str,
    dependent: &str,
    models: &[(String, &RegressionResult)],
    terms: &[String],
    intercept_label: &str,
) -> String {
    let label_width = terms.iter().map(String::len).chain([20, intercept_label.len()]).max().unwrap_or(20) + 2;
    let col_width = 22;
    let mut out = String::new();
    let total = label_width + col_width * models.len();
    let _ = writeln!(out, "{title}");
    let _ = writeln!(out, "{}", "=".repeat(total));
    let _ = writeln!(out, "{:label_width$}Dependent variable: {dependent}", "");
    let _ = write!(out, "{:label_width$}", "");
    for (label, _) in models {
        let _ = write!(out, "{label:>col_width$}");
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "{}", "-".repeat(total));

    let mut term_rows: Vec<(&str, &str)> = terms.iter().map(|t| (t.as_str(), t.as_str())).collect();
    term_rows.push(("const", intercept_label));
    for (term, label) in term_rows {
        let _ = write!(out, "{label:<label_width$}");
        let mut se_line = format!("{:label_width$}", "");
        for (_, res) in models {
            match res.coefficient(term) {
                Some(c) => {
                    let est = format!("{}{}", fmt3(c.estimate), stars(c.p_value));
                    let _ = write!(out, "{est:>col_width$}");
                    let se = format!("({})", fmt3(c.std_error));
                    let _ = write!(se_line, "{se:>col_width$}");
                }
                None => {
                    let _ = write!(out, "{:col_width$}", "");
                    let _ = write!(se_line, "{:col_width$}", "");
                }
            }
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "{}", se_line.trim_end());
    }
    let _ = writeln!(out, "{}", "-".repeat(total));

    let stat_rows: [(&str, fn(&RegressionResult) -> String); 5] = [
        ("Observations", |r| r.n_observations.to_string()),
        ("R^2", |r| fmt3(r.r_squared)),
        ("Adjusted R^2", |r| fmt3(r.adj_r_squared)),
        ("Residual Std. Error", |r| fmt3(r.residual_std_error)),
        ("F Statistic", |r| match (r.f_statistic, r.f_p_value) {
            (Some(f), Some(p)) => format!("{}{}", fmt3(f), stars(p)),
            (Some(f), None) => fmt3(f),
            _ => "-".into(),
        }),
    ];
    for (label, get) in stat_rows {
        let _ = write!(out, "{label:<label_width$}");
        for (_, res) in models {
            let _ = write!(out, "{:>col_width$}", get(res));
        }
        let _ = writeln!(out);
    }
    let _ = writeln!(out, "{}", "=".repeat(total));
    let _ = writeln!(out, "Note: *p<0.1; **p<0.05; ***p<0.01. Newey-West standard errors in parentheses.");
    out
}

/// One single-regressor model per cell: rows are features, columns are
/// series. Each cell shows the feature's slope over its standard error; the
/// intercept is omitted. `None` cells stay blank.
pub fn render_feature_table(
    title: &str,
    dependent: &str,
    features: &[String],
    columns: &[(String, Vec<Option<&RegressionResult>>)],
) -> String {
    let label_width = features.iter().map(String::len).chain([20]).max().unwrap_or(20) + 2;
    let col_width = 22;
    let total = label_width + col_width * columns.len();
    let mut out = String::new();
    let _ = writeln!(out, "{title}");
    let _ = writeln!(out, "{}", "=".repeat(total));
    let _ = writeln!(out, "{:label_width$}Dependent variable: {dependent}", "");
    let _ = write!(out, "{:label_width$}", "");
    for (label, _) in columns {
        let _ = write!(out, "{label:>col_width$}");
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "{}", "-".repeat(total));
    for (i, feature) in features.iter().enumerate() {
        let _ = write!(out, "{feature:<label_width$}");
        let mut se_line = format!("{:label_width$}", "");
        for (_, models) in columns {
            match models.get(i).copied().flatten().and_then(|m| m.coefficient(feature)) {
                Some(c) => {
                    let _ = write!(out, "{:>col_width$}", format!("{}{}", fmt3(c.estimate), stars(c.p_value)));
                    let _ = write!(se_line, "{:>col_width$}", format!("({})", fmt3(c.std_error)));
                }
                None => {
                    let _ = write!(out, "{:col_width$}", "");
                    let _ = write!(se_line, "{:col_width$}", "");
                }
            }
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "{}", se_line.trim_end());
    }
    let _ = writeln!(out, "{}", "-".repeat(total));
    let _ = write!(out, "{:<label_width$}", "Observations");
    for (_, models) in columns {
        let ns: Vec<usize> = models.iter().flatten().map(|m| m.n_observations).collect();
        let cell = match (ns.iter().min(), ns.iter().max()) {
            (Some(lo), Some(hi)) if lo == hi => lo.to_string(),
            (Some(lo), Some(hi)) => format!("{lo}-{hi}"),
            _ => "-".into(),
        };
        let _ = write!(out, "{cell:>col_width$}");
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "{}", "=".repeat(total));
    let _ = writeln!(out, "Note: *p<0.1; **p<0.05; ***p<0.01. One regression per cell; Newey-West standard errors in parentheses.");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econometrics::{ols_newey_west, DesignMatrix};
    use nalgebra::{DMatrix, DVector};

    fn fit() -> RegressionResult {
        let n = 30;
        let x = DMatrix::from_fn(n, 2, |t, j| if j == 0 { 1.0 } else { (t as f64 * 0.3).sin() });
        let y = DVector::from_fn(n, |t, _| 2.0 + 5.0 * (t as f64 * 0.3).sin() + ((t * 7) % 3) as f64);
        let d = DesignMatrix::from_parts(vec!["const".into(), "ETH_Ret".into()], x, y, true).unwrap();
        ols_newey_west(&d, 1).unwrap()
    }

    #[test]
    fn csv_rows_cover_terms_and_stats() {
        let rows = coefficient_csv_rows("m1", &fit());
        assert_eq!(rows.len(), 2 + 9);
        assert!(rows[0].starts_with("m1,const,"));
        assert!(rows.iter().any(|r| r.starts_with("m1,n_observations,30,")));
        assert!(rows.iter().all(|r| r.split(',').count() == COEFFICIENT_CSV_HEADER.split(',').count()));
    }

    #[test]
    fn text_table_layout() {
        let r = fit();
        let text = render_text_table("T", "val", &[("(1)".into(), &r)], &["ETH_Ret".into(), "ETH_Ret7".into()], "Intercept");
        assert!(text.contains("ETH_Ret"));
        assert!(text.contains("Intercept"));
        assert!(text.contains("Observations"));
        assert!(text.lines().any(|l| l.trim_start().starts_with('(')));
    }

    #[test]
    fn feature_table_layout() {
        let r = fit();
        let features = vec!["ETH_Ret".to_string(), "ETH_Ret7".to_string()];
        let text = render_feature_table("T3", "val", &features, &[("dai".into(), vec![Some(&r), None])]);
        let row = text.lines().find(|l| l.starts_with("ETH_Ret ")).unwrap();
        assert!(row.contains(&fmt3(r.coefficient("ETH_Ret").unwrap().estimate)));
        assert!(text.lines().any(|l| l.starts_with("Observations") && l.trim_end().ends_with("30")));
    }
}
