//! Ordinal grading error: weighted macro-averaged mean absolute error.
//!
//! Grades are small ordered integers (clinical grades 1 to 4 by default).
//! MA-MAE averages the per-class mean absolute grade error over the classes
//! present in the truth set, so rare grades weigh as much as common ones.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdinalItem {
    pub case_id: String,
    pub true_grade: i64,
    pub predicted_grade: i64,
}

/// Paired true/predicted grades over a case set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdinalPredictionSet {
    items: Vec<OrdinalItem>,
    grade_domain: Vec<i64>,
}

impl OrdinalPredictionSet {
    /// Validates that case ids are unique and every grade lies in the
    /// domain. The domain is deduplicated and sorted.
    pub fn new(items: Vec<OrdinalItem>, grade_domain: Vec<i64>) -> Result<OrdinalPredictionSet> {
        let mut domain = grade_domain;
        domain.sort_unstable();
        domain.dedup();
        if domain.is_empty() {
            return Err(Error::InvalidInput("grade domain is empty".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for item in &items {
            if !seen.insert(&item.case_id) {
                return Err(Error::DuplicateCase(item.case_id.clone()));
            }
            for grade in [item.true_grade, item.predicted_grade] {
                if !domain.contains(&grade) {
                    return Err(Error::GradeOutsideDomain {
                        case: item.case_id.clone(),
                        grade,
                    });
                }
            }
        }
        Ok(OrdinalPredictionSet {
            items,
            grade_domain: domain,
        })
    }

    /// Join a truth file and a prediction file, each a two-column CSV with
    /// header `case_id,grade`. The two files must cover the same case set.
    pub fn from_files(
        truth: &Path,
        predictions: &Path,
        grade_domain: Vec<i64>,
    ) -> Result<OrdinalPredictionSet> {
        let truths = read_grades_csv(truth)?;
        let mut preds: BTreeMap<String, i64> = BTreeMap::new();
        for (case, grade) in read_grades_csv(predictions)? {
            if preds.insert(case.clone(), grade).is_some() {
                return Err(Error::DuplicateCase(case));
            }
        }
        let mut items = Vec::with_capacity(truths.len());
        let mut truth_cases = std::collections::BTreeSet::new();
        for (case_id, true_grade) in truths {
            if !truth_cases.insert(case_id.clone()) {
                return Err(Error::DuplicateCase(case_id));
            }
            let predicted_grade = *preds
                .get(&case_id)
                .ok_or_else(|| Error::CaseSetMismatch(case_id.clone()))?;
            items.push(OrdinalItem {
                case_id,
                true_grade,
                predicted_grade,
            });
        }
        if let Some(extra) = preds.keys().find(|c| !truth_cases.contains(*c)) {
            return Err(Error::CaseSetMismatch(extra.clone()));
        }
        OrdinalPredictionSet::new(items, grade_domain)
    }

    pub fn items(&self) -> &[OrdinalItem] {
        &self.items
    }

    pub fn grade_domain(&self) -> &[i64] {
        &self.grade_domain
    }

    /// Per-class truth counts n_c over the grade domain.
    pub fn class_counts(&self) -> Vec<usize> {
        self.grade_domain
            .iter()
            .map(|&g| self.items.iter().filter(|i| i.true_grade == g).count())
            .collect()
    }
}

/// Default clinical grade domain.
pub fn default_grade_domain() -> Vec<i64> {
    vec![1, 2, 3, 4]
}

/// Weighted macro-averaged mean absolute error:
/// (1/C)·Σ_c (1/n_c)·Σ_{i∈class c} |true_i − predicted_i|,
/// where C counts the grades with at least one true sample.
pub fn ma_mae(preds: &OrdinalPredictionSet) -> Result<f64> {
    ma_mae_impl(preds, None)
}

/// MA-MAE with the class count fixed at `class_count` instead of the
/// number of classes present; absent classes contribute zero error but
/// still divide. `class_count` must cover every present class.
pub fn ma_mae_fixed(preds: &OrdinalPredictionSet, class_count: usize) -> Result<f64> {
    ma_mae_impl(preds, Some(class_count))
}

fn ma_mae_impl(preds: &OrdinalPredictionSet, fixed_class_count: Option<usize>) -> Result<f64> {
    if preds.items.is_empty() {
        return Err(Error::EmptyPredictionSet);
    }
    let counts = preds.class_counts();
    let present = counts.iter().filter(|&&n| n > 0).count();
    let class_count = match fixed_class_count {
        None => present,
        Some(c) => {
            if c < present {
                return Err(Error::InvalidInput(format!(
                    "fixed class count {c} is smaller than the {present} classes present"
                )));
            }
            c
        }
    };
    let mut total = 0.0;
    for (&grade, &n) in preds.grade_domain.iter().zip(counts.iter()) {
        if n == 0 {
            continue;
        }
        let class_error: i64 = preds
            .items
            .iter()
            .filter(|i| i.true_grade == grade)
            .map(|i| (i.true_grade - i.predicted_grade).abs())
            .sum();
        total += class_error as f64 / n as f64;
    }
    Ok(total / class_count as f64)
}

/// Confusion counts over the grade domain: rows are true grades, columns
/// predicted grades. With `normalized`, each row is divided by its count;
/// rows with no samples stay all-zero.
pub fn confusion_matrix(preds: &OrdinalPredictionSet, normalized: bool) -> Vec<Vec<f64>> {
    let domain = &preds.grade_domain;
    let pos: BTreeMap<i64, usize> = domain.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let mut m = vec![vec![0.0; domain.len()]; domain.len()];
    for item in &preds.items {
        m[pos[&item.true_grade]][pos[&item.predicted_grade]] += 1.0;
    }
    if normalized {
        for row in &mut m {
            let total: f64 = row.iter().sum();
            if total > 0.0 {
                for v in row {
                    *v /= total;
                }
            }
        }
    }
    m
}

/// Two-column CSV with header `case_id,grade`, rows in file order.
pub fn read_grades_csv(path: &Path) -> Result<Vec<(String, i64)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::csv(path, e))?.clone();
    if headers.len() != 2 || &headers[0] != "case_id" || &headers[1] != "grade" {
        return Err(Error::record(
            path,
            format!("expected header \"case_id,grade\", found {headers:?}"),
        ));
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let grade: i64 = record[1]
            .trim()
            .parse()
            .map_err(|_| Error::record(path, format!("grade {:?} is not an integer", &record[1])))?;
        out.push((record[0].to_string(), grade));
    }
    Ok(out)
}
