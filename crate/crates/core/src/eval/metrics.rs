//! Scoring functions: RMSE for regression, ROC AUC and Cohen's kappa for
//! classification.

use super::EvalError;

/// Root mean squared error.
pub fn rmse(y_true: &[f64], y_pred: &[f64]) -> Result<f64, EvalError> {
    if y_true.len() != y_pred.len() {
        return Err(EvalError::LengthMismatch(y_true.len(), y_pred.len()));
    }
    if y_true.is_empty() {
        return Err(EvalError::Empty);
    }
    let sse: f64 = y_true.iter().zip(y_pred).map(|(t, p)| (t - p).powi(2)).sum();
    Ok((sse / y_true.len() as f64).sqrt())
}

/// Area under the ROC curve via the rank-sum formulation: the probability
/// that a random positive scores above a random negative, ties counting ½.
pub fn auc(labels: &[bool], scores: &[f64]) -> Result<f64, EvalError> {
    if labels.len() != scores.len() {
        return Err(EvalError::LengthMismatch(labels.len(), scores.len()));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(EvalError::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Sum of (1-based, tie-averaged) ranks of the positives.
    let mut pos_rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let mid_rank = (i + j) as f64 / 2.0 + 1.0;
        let positives = order[i..=j].iter().filter(|&&k| labels[k]).count();
        pos_rank_sum += mid_rank * positives as f64;
        i = j + 1;
    }
    let (p, n) = (n_pos as f64, n_neg as f64);
    Ok((pos_rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

/// Cohen's kappa, `(p_o - p_e) / (1 - p_e)`; 0 when `p_e = 1`.
pub fn cohen_kappa<T: PartialEq + Clone>(y_true: &[T], y_pred: &[T]) -> Result<f64, EvalError> {
    if y_true.len() != y_pred.len() {
        return Err(EvalError::LengthMismatch(y_true.len(), y_pred.len()));
    }
    if y_true.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut labels: Vec<T> = Vec::new();
    for l in y_true.iter().chain(y_pred) {
        if !labels.contains(l) {
            labels.push(l.clone());
        }
    }
    let n = y_true.len();
    let agree = y_true.iter().zip(y_pred).filter(|(t, p)| t == p).count();
    // Integer products keep p_e exact for moderate n.
    let chance: u128 = labels
        .iter()
        .map(|l| {
            let t = y_true.iter().filter(|x| *x == l).count() as u128;
            let p = y_pred.iter().filter(|x| *x == l).count() as u128;
            t * p
        })
        .sum();
    let nn = (n as u128) * (n as u128);
    if chance == nn {
        return Ok(0.0);
    }
    let p_o = agree as f64 / n as f64;
    let p_e = chance as f64 / nn as f64;
    Ok((p_o - p_e) / (1.0 - p_e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rmse_values() {
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!((rmse(&[0.0, 0.0], &[3.0, 4.0]).unwrap() - 3.535_533_905_932_737_6).abs() < 1e-12);
        assert_eq!(rmse(&[1.0], &[1.0, 2.0]), Err(EvalError::LengthMismatch(1, 2)));
        assert_eq!(rmse(&[], &[]), Err(EvalError::Empty));
    }

    #[test]
    fn auc_values() {
        assert_eq!(auc(&[false, false, true, true], &[0.1, 0.2, 0.3, 0.4]).unwrap(), 1.0);
        assert_eq!(auc(&[true, false, true, false], &[0.5; 4]).unwrap(), 0.5);
        assert_eq!(auc(&[true, false, true, false], &[0.9, 0.8, 0.7, 0.1]).unwrap(), 0.75);
        assert_eq!(auc(&[true, true], &[0.1, 0.2]), Err(EvalError::SingleClass));
    }

    #[test]
    fn kappa_values() {
        assert_eq!(cohen_kappa(&[0, 1, 1, 0, 2], &[0, 1, 1, 0, 2]).unwrap(), 1.0);
        assert_eq!(cohen_kappa(&[1, 0], &[0, 1]).unwrap(), -1.0);
        assert_eq!(cohen_kappa(&[0, 0, 1, 1], &[0, 0, 1, 0]).unwrap(), 0.5);
        assert_eq!(cohen_kappa(&[1, 1], &[1, 1]).unwrap(), 0.0);
        assert!(cohen_kappa(&[1], &[1, 2]).is_err());
    }

    /// Pairwise definition of AUC, used as an oracle.
    fn auc_pairs(labels: &[bool], scores: &[f64]) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..labels.len() {
            for j in 0..labels.len() {
                if labels[i] && !labels[j] {
                    den += 1.0;
                    if scores[i] > scores[j] {
                        num += 1.0;
                    } else if scores[i] == scores[j] {
                        num += 0.5;
                    }
                }
            }
        }
        num / den
    }

    proptest! {
        #[test]
        fn auc_matches_pairwise(data in prop::collection::vec((any::<bool>(), 0u8..6), 2..40)) {
            let labels: Vec<bool> = data.iter().map(|d| d.0).collect();
            prop_assume!(labels.iter().any(|&l| l) && labels.iter().any(|&l| !l));
            let scores: Vec<f64> = data.iter().map(|d| d.1 as f64).collect();
            let a = auc(&labels, &scores).unwrap();
            prop_assert!((a - auc_pairs(&labels, &scores)).abs() < 1e-12);
        }

        #[test]
        fn auc_invariant_under_monotone_transform(data in prop::collection::vec((any::<bool>(), -5.0f64..5.0), 2..40)) {
            let labels: Vec<bool> = data.iter().map(|d| d.0).collect();
            prop_assume!(labels.iter().any(|&l| l) && labels.iter().any(|&l| !l));
            let scores: Vec<f64> = data.iter().map(|d| d.1).collect();
            let squashed: Vec<f64> = scores.iter().map(|s| 3.0 * s.exp() + 1.0).collect();
            prop_assert_eq!(auc(&labels, &scores).unwrap(), auc(&labels, &squashed).unwrap());
        }

        #[test]
        fn kappa_invariant_under_relabeling(pairs in prop::collection::vec((0usize..3, 0usize..3), 1..50)) {
            let perm = [2usize, 0, 1];
            let t: Vec<usize> = pairs.iter().map(|p| p.0).collect();
            let p: Vec<usize> = pairs.iter().map(|p| p.1).collect();
            let t2: Vec<usize> = t.iter().map(|&x| perm[x]).collect();
            let p2: Vec<usize> = p.iter().map(|&x| perm[x]).collect();
            prop_assert_eq!(cohen_kappa(&t, &p).unwrap(), cohen_kappa(&t2, &p2).unwrap());
        }

        #[test]
        fn rmse_is_homogeneous(v in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..30), c in -5.0f64..5.0) {
            let t: Vec<f64> = v.iter().map(|x| x.0).collect();
            let p: Vec<f64> = v.iter().map(|x| x.1).collect();
            let ts: Vec<f64> = t.iter().map(|x| x * c).collect();
            let ps: Vec<f64> = p.iter().map(|x| x * c).collect();
            let lhs = rmse(&ts, &ps).unwrap();
            let rhs = c.abs() * rmse(&t, &p).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs));
        }
    }
}
