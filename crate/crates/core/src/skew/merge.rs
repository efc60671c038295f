use super::check_beta;
use crate::error::{Error, Result};

/// Tolerance for the antisymmetry check on a BGC ladder.
const ANTISYMMETRY_TOLERANCE: f64 = 1e-12;

fn check_list(betas: &[f64]) -> Result<()> {
    if betas.is_empty() {
        return Err(Error::argument("cannot merge an empty list of barriers"));
    }
    for b in betas {
        check_beta(*b)?;
    }
    // Π(1+β) + Π(1-β) vanishes exactly when both -1 and +1 are present
    if betas.contains(&1.0) && betas.contains(&-1.0) {
        return Err(Error::SingularMerge(
            "opposing fully reflective barriers (β = 1 and β = -1) have no merged skewness".into(),
        ));
    }
    Ok(())
}

/// Skewness of the single barrier obtained by merging two adjacent ones.
pub fn merge_beta_pair(b1: f64, b2: f64) -> Result<f64> {
    check_beta(b1)?;
    check_beta(b2)?;
    let denominator = 1.0 + b1 * b2;
    if denominator == 0.0 {
        return Err(Error::SingularMerge(format!("pair ({b1}, {b2}) has β₁β₂ = -1")));
    }
    Ok(((b1 + b2) / denominator).clamp(-1.0, 1.0))
}

/// `[Π(1+β) - Π(1-β)] / [Π(1+β) + Π(1-β)]`
pub fn merge_beta_product(betas: &[f64]) -> Result<f64> {
    check_list(betas)?;
    if let [only] = betas {
        return Ok(*only);
    }
    let plus: f64 = betas.iter().map(|b| 1.0 + b).product();
    let minus: f64 = betas.iter().map(|b| 1.0 - b).product();
    let denominator = plus + minus;
    if denominator == 0.0 {
        return Err(Error::SingularMerge("zero denominator".into()));
    }
    Ok(((plus - minus) / denominator).clamp(-1.0, 1.0))
}

/// Elementary symmetric polynomials `e_0 ..= e_n` of `values`.
pub(crate) fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (i, v) in values.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] += v * e[k - 1];
        }
    }
    e
}

/// The same merge expanded in elementary symmetric polynomials:
/// `(e_1 + e_3 + ...) / (1 + e_2 + e_4 + ...)`. For even `n` the top term
/// `e_n` sits in the denominator, for odd `n` in the numerator.
pub fn merge_beta_symmetric(betas: &[f64]) -> Result<f64> {
    check_list(betas)?;
    let e = elementary_symmetric(betas);
    let odd: f64 = e.iter().skip(1).step_by(2).sum();
    let even: f64 = e.iter().step_by(2).sum();
    if even == 0.0 {
        return Err(Error::SingularMerge("zero denominator".into()));
    }
    Ok((odd / even).clamp(-1.0, 1.0))
}

/// Merged skewness of a symmetric BGC ladder `(β₋ₙ, …, β₋₁, β₁, …, βₙ)`:
/// the limit skewness of the upper half plus that of the lower half. For an
/// antisymmetric ladder the two cancel.
pub fn bgcsp_merged_beta(ladder: &[f64]) -> Result<f64> {
    if ladder.is_empty() || !ladder.len().is_multiple_of(2) {
        return Err(Error::argument(format!(
            "a symmetric ladder needs an even, non-zero number of barriers, got {}",
            ladder.len()
        )));
    }
    let n = ladder.len() / 2;
    for i in 0..n {
        let (neg, pos) = (ladder[n - 1 - i], ladder[n + i]);
        if (neg + pos).abs() > ANTISYMMETRY_TOLERANCE {
            return Err(Error::argument(format!(
                "ladder is not antisymmetric: β₋{k} = {neg}, β{k} = {pos}; use merge_beta_product",
                k = i + 1
            )));
        }
    }
    let lower = merge_beta_product(&ladder[..n])?;
    let upper = merge_beta_product(&ladder[n..])?;
    Ok(upper + lower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn pair_examples() {
        assert_eq!(merge_beta_pair(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(merge_beta_pair(1.0, 0.3).unwrap(), 1.0);
        assert!((merge_beta_pair(0.5, 0.5).unwrap() - 0.8).abs() < 1e-15);
        assert!(matches!(merge_beta_pair(1.0, -1.0), Err(Error::SingularMerge(_))));
        assert!(merge_beta_pair(1.2, 0.0).is_err());
    }

    #[test]
    fn product_examples() {
        assert_eq!(merge_beta_product(&[0.37]).unwrap(), 0.37);
        assert!((merge_beta_product(&[0.5, 0.5]).unwrap() - 0.8).abs() < 1e-15);
        for b in [-0.9, -0.3, 0.0, 0.45, 0.99] {
            assert_eq!(merge_beta_product(&[-b, b]).unwrap(), 0.0);
        }
        assert!(matches!(merge_beta_product(&[0.2, 1.0, -1.0]), Err(Error::SingularMerge(_))));
        assert!(merge_beta_product(&[]).is_err());
    }

    #[test]
    fn symmetric_examples() {
        assert!((merge_beta_symmetric(&[0.5, 0.5]).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(merge_beta_symmetric(&[0.0; 4]).unwrap(), 0.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let betas: Vec<f64> = (0..3).map(|_| rng.random_range(-0.999..0.999)).collect();
            let a = merge_beta_product(&betas).unwrap();
            let b = merge_beta_symmetric(&betas).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn elementary_symmetric_small_case() {
        let e = elementary_symmetric(&[1.0, 2.0, 3.0]);
        assert_eq!(e, vec![1.0, 6.0, 11.0, 6.0]);
    }

    #[test]
    fn bgcsp_ladders_cancel() {
        assert!(bgcsp_merged_beta(&[-0.9, -0.5, 0.5, 0.9]).unwrap().abs() < 1e-12);
        assert_eq!(bgcsp_merged_beta(&[-0.3, 0.3]).unwrap(), 0.0);
        assert_eq!(bgcsp_merged_beta(&[-1.0, -0.25, 0.25, 1.0]).unwrap(), 0.0);
        assert!(matches!(bgcsp_merged_beta(&[0.1, 0.5]), Err(Error::Argument(_))));
        assert!(bgcsp_merged_beta(&[0.1, 0.5, 0.2]).is_err());
    }

    proptest! {
        #[test]
        fn merge_is_associative(betas in prop::collection::vec(-0.99f64..0.99, 1..8), split in 0usize..8) {
            let product = merge_beta_product(&betas).unwrap();
            let left = betas.iter().skip(1).try_fold(betas[0], |acc, b| merge_beta_pair(acc, *b)).unwrap();
            let right = betas.iter().rev().skip(1).try_fold(betas[betas.len() - 1], |acc, b| merge_beta_pair(*b, acc)).unwrap();
            prop_assert!((product - left).abs() < 1e-12);
            prop_assert!((product - right).abs() < 1e-12);
            let k = split % betas.len();
            if k > 0 {
                let grouped = merge_beta_pair(merge_beta_product(&betas[..k]).unwrap(), merge_beta_product(&betas[k..]).unwrap()).unwrap();
                prop_assert!((product - grouped).abs() < 1e-12);
            }
        }

        #[test]
        fn merged_value_is_a_skewness(betas in prop::collection::vec(-1.0f64..=1.0, 1..8)) {
            if let Ok(b) = merge_beta_product(&betas) {
                prop_assert!((-1.0..=1.0).contains(&b));
            }
        }
    }
}
