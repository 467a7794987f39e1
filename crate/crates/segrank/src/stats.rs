//! Order statistics shared by reporting and stability summaries.
//!
//! Percentiles use linear interpolation between order statistics: the
//! p-quantile of n sorted values sits at fractional position h = (n-1)·p.

/// Quantile of already-sorted values, 0 ≤ p ≤ 1, linear interpolation.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty set");
    assert!((0.0..=1.0).contains(&p), "p must be in [0, 1]");
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

fn sorted_copy(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn median(values: &[f64]) -> f64 {
    quantile_sorted(&sorted_copy(values), 0.5)
}

/// (Q1, median, Q3).
pub fn quartiles(values: &[f64]) -> (f64, f64, f64) {
    let s = sorted_copy(values);
    (
        quantile_sorted(&s, 0.25),
        quantile_sorted(&s, 0.5),
        quantile_sorted(&s, 0.75),
    )
}

pub fn mean(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "mean of an empty set");
    values.iter().sum::<f64>() / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn quartiles_of_one_to_four() {
        let (q1, med, q3) = quartiles(&[1.0, 2.0, 3.0, 4.0]);
        assert_relative_eq!(q1, 1.75);
        assert_relative_eq!(med, 2.5);
        assert_relative_eq!(q3, 3.25);
    }

    #[test]
    fn quartiles_ignore_input_order() {
        let (q1, med, q3) = quartiles(&[4.0, 1.0, 3.0, 2.0]);
        assert_relative_eq!(q1, 1.75);
        assert_relative_eq!(med, 2.5);
        assert_relative_eq!(q3, 3.25);
    }

    #[test]
    fn single_value_is_every_quantile() {
        let (q1, med, q3) = quartiles(&[7.5]);
        assert_eq!((q1, med, q3), (7.5, 7.5, 7.5));
    }

    #[test]
    fn median_of_odd_count_is_the_middle_value() {
        assert_eq!(median(&[9.0, 1.0, 5.0]), 5.0);
    }

    #[test]
    fn quantile_endpoints_are_min_and_max() {
        let s = [1.0, 2.0, 10.0];
        assert_eq!(quantile_sorted(&s, 0.0), 1.0);
        assert_eq!(quantile_sorted(&s, 1.0), 10.0);
    }

    #[test]
    fn mean_is_the_arithmetic_average() {
        assert_relative_eq!(mean(&[1.0, 2.0, 6.0]), 3.0);
    }
}
