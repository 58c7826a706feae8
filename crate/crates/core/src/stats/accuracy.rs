use rand::seq::SliceRandom;

use crate::classifiers::ProbabilityModel;
use crate::error::{Error, Result};
use crate::matrix::LabeledDataset;
use crate::rng::RngStream;

/// Stratified fold assignment: each class is shuffled and dealt round-robin.
///
/// Returns the rows of each fold. Fails unless every fold holds both classes
/// and every training complement keeps both classes too.
pub fn stratified_folds(data: &LabeledDataset, folds: usize, rng: RngStream) -> Result<Vec<Vec<usize>>> {
    let (n, m) = (data.n(), data.m());
    if folds < 2 || n < folds || m < folds {
        return Err(Error::FoldTooSmall { folds, n, m });
    }
    // the largest fold takes ceil(count / folds) rows of a class
    if n - n.div_ceil(folds) < 1 || m - m.div_ceil(folds) < 1 {
        return Err(Error::FoldTooSmall { folds, n, m });
    }
    let mut gen = rng.rng();
    let mut out = vec![Vec::new(); folds];
    for label in [1u8, 0u8] {
        let mut rows: Vec<usize> = (0..data.len()).filter(|&i| data.labels()[i] == label).collect();
        rows.shuffle(&mut gen);
        for (k, row) in rows.into_iter().enumerate() {
            out[k % folds].push(row);
        }
    }
    out.iter_mut().for_each(|f| f.sort_unstable());
    Ok(out)
}

/// Mean held-out accuracy over stratified folds, predicting label 1 when `p̂ ≥ 1/2`.
pub fn statistic_acc(model: &dyn ProbabilityModel, data: &LabeledDataset, folds: usize, rng: RngStream) -> Result<f64> {
    let assignment = stratified_folds(data, folds, rng)?;
    let mut in_fold = vec![usize::MAX; data.len()];
    for (k, rows) in assignment.iter().enumerate() {
        for &i in rows {
            in_fold[i] = k;
        }
    }
    let mut total = 0.0;
    for (k, held_out) in assignment.iter().enumerate() {
        let train_rows: Vec<usize> = (0..data.len()).filter(|&i| in_fold[i] != k).collect();
        let train = data.subset(&train_rows)?;
        let eval = data.features().select_rows(held_out)?;
        let probs = model.fit_predict_proba(&train, &eval)?;
        let correct = held_out
            .iter()
            .zip(probs.values())
            .filter(|&(&i, &p)| u8::from(p >= 0.5) == data.labels()[i])
            .count();
        total += correct as f64 / held_out.len() as f64;
    }
    Ok(total / folds as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{ClassifierSpec, ProbEstimate};
    use crate::matrix::SampleMatrix;
    use rand::Rng;

    struct Constant(f64);

    impl ProbabilityModel for Constant {
        fn fit_predict_proba(&self, _: &LabeledDataset, eval: &SampleMatrix) -> Result<ProbEstimate> {
            Ok(ProbEstimate::clipped(vec![self.0; eval.rows()], 0.0))
        }

        fn name(&self) -> String {
            "constant".into()
        }
    }

    fn line_data(labels: Vec<u8>, offset: impl Fn(u8) -> f64) -> LabeledDataset {
        let rows: Vec<[f64; 1]> = labels
            .iter()
            .enumerate()
            .map(|(i, &y)| [i as f64 * 1e-3 + offset(y)])
            .collect();
        LabeledDataset::new(SampleMatrix::from_rows(&rows).unwrap(), labels).unwrap()
    }

    #[test]
    fn constant_minority_prediction_scores_majority_share() {
        let labels: Vec<u8> = (0..20).map(|i| u8::from(i < 8)).collect();
        let data = line_data(labels, |_| 0.0);
        let acc = statistic_acc(&Constant(8.0 / 20.0), &data, 2, RngStream::new(1, 0)).unwrap();
        assert!((acc - 12.0 / 20.0).abs() < 1e-12);
    }

    #[test]
    fn half_is_predicted_as_class_one() {
        let labels: Vec<u8> = (0..8).map(|i| u8::from(i < 4)).collect();
        let data = line_data(labels, |_| 0.0);
        let acc = statistic_acc(&Constant(0.5), &data, 2, RngStream::new(1, 0)).unwrap();
        assert!((acc - 0.5).abs() < 1e-12);
    }

    #[test]
    fn separated_classes_are_memorized_by_one_neighbour() {
        let labels: Vec<u8> = (0..40).map(|i| (i % 2) as u8).collect();
        let data = line_data(labels, |y| if y == 1 { 100.0 } else { 0.0 });
        let acc = statistic_acc(&ClassifierSpec::knn(1), &data, 2, RngStream::new(3, 0)).unwrap();
        assert_eq!(acc, 1.0);
    }

    #[test]
    fn random_labels_score_near_the_majority_share() {
        // Average over independent datasets whose labels ignore the features.
        let reps = 200;
        let mut rng = RngStream::new(77, 0).rng();
        let mut sum = 0.0;
        for r in 0..reps {
            let rows: Vec<[f64; 2]> = (0..40).map(|_| [rng.random(), rng.random()]).collect();
            let labels: Vec<u8> = (0..40).map(|i| u8::from(i < 20)).collect();
            let data = LabeledDataset::new(SampleMatrix::from_rows(&rows).unwrap(), labels).unwrap();
            sum += statistic_acc(&ClassifierSpec::knn(5), &data, 2, RngStream::new(r, 1)).unwrap();
        }
        let mean = sum / reps as f64;
        // per-dataset accuracy sd is about sqrt(0.25/40) ≈ 0.08
        assert!(
            (mean - 0.5).abs() < 4.0 * 0.08 / (reps as f64).sqrt() + 0.01,
            "mean {mean}"
        );
    }

    #[test]
    fn folds_are_stratified_and_too_small_folds_fail() {
        let labels: Vec<u8> = (0..10).map(|i| u8::from(i < 4)).collect();
        let data = line_data(labels, |_| 0.0);
        let folds = stratified_folds(&data, 2, RngStream::new(0, 0)).unwrap();
        for f in &folds {
            let ones = f.iter().filter(|&&i| data.labels()[i] == 1).count();
            assert_eq!((ones, f.len() - ones), (2, 3));
        }
        assert!(matches!(
            stratified_folds(&data, 5, RngStream::new(0, 0)),
            Err(Error::FoldTooSmall { .. })
        ));
    }
}
