use crate::classifiers::{check_inputs, default_epsilon, ProbEstimate};
use crate::error::{Error, Result};
use crate::matrix::{LabeledDataset, SampleMatrix};

/// Share of label-1 rows among the `k` nearest training rows (Euclidean).
///
/// Distance ties go to the lower row index. An evaluation point that
/// coincides with a training row counts that row as its own neighbour.
pub fn knn_proba(k: usize, train: &LabeledDataset, eval: &SampleMatrix) -> Result<ProbEstimate> {
    check_inputs(train, eval)?;
    let rows = train.len();
    if k == 0 || k >= rows {
        return Err(Error::KTooLarge { k, rows });
    }
    let x = train.features();
    let labels = train.labels();
    let mut dist: Vec<(f64, usize)> = Vec::with_capacity(rows);
    let values = eval
        .iter_rows()
        .map(|q| {
            dist.clear();
            dist.extend(x.iter_rows().enumerate().map(|(i, r)| {
                let d2: f64 = r.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2, i)
            }));
            let by_distance = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            if k < rows {
                dist.select_nth_unstable_by(k - 1, by_distance);
            }
            let votes = dist[..k].iter().filter(|&&(_, i)| labels[i] == 1).count();
            votes as f64 / k as f64
        })
        .collect();
    Ok(ProbEstimate::clipped(values, default_epsilon(rows)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(labels: &[u8]) -> LabeledDataset {
        let x: Vec<[f64; 1]> = (0..labels.len()).map(|i| [i as f64]).collect();
        LabeledDataset::new_training(SampleMatrix::from_rows(&x).unwrap(), labels.to_vec()).unwrap()
    }

    #[test]
    fn own_point_with_k_one() {
        let train = line(&[0, 1, 0, 0, 1]);
        let eval = SampleMatrix::from_rows(&[[1.0]]).unwrap();
        let p = knn_proba(1, &train, &eval).unwrap();
        assert_eq!(p.values(), &[1.0 - 0.1]);
    }

    #[test]
    fn nearest_of_two() {
        let x = SampleMatrix::from_rows(&[[0.0], [10.0]]).unwrap();
        let train = LabeledDataset::new_training(x, vec![1, 0]).unwrap();
        let eval = SampleMatrix::from_rows(&[[1.0]]).unwrap();
        let p = knn_proba(1, &train, &eval).unwrap();
        assert_eq!(p.values(), &[1.0 - 0.25]);
    }

    #[test]
    fn three_nearest_on_a_line() {
        // Neighbours of x = 1 are rows 1 (d=0), 0 and 2 (d=1): labels 1, 1, 0.
        let train = line(&[1, 1, 0, 0, 0]);
        let eval = SampleMatrix::from_rows(&[[1.0]]).unwrap();
        let p = knn_proba(3, &train, &eval).unwrap();
        assert!((p.values()[0] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn distance_ties_prefer_lower_index() {
        // x = 1.5 is equidistant from rows 1 and 2.
        let train = line(&[0, 1, 0, 0]);
        let eval = SampleMatrix::from_rows(&[[1.5]]).unwrap();
        assert_eq!(knn_proba(1, &train, &eval).unwrap().values(), &[1.0 - 0.125]);
        let train = line(&[0, 0, 1, 0]);
        assert_eq!(knn_proba(1, &train, &eval).unwrap().values(), &[0.125]);
    }

    #[test]
    fn all_but_one_neighbour_votes_class_frequency() {
        let labels: Vec<u8> = (0..20).map(|i| (i % 2) as u8).collect();
        let train = line(&labels);
        let eval = SampleMatrix::from_rows(&[[1e6]]).unwrap();
        let p = knn_proba(19, &train, &eval).unwrap().values()[0];
        assert!((p - 0.5).abs() <= 1.0 / 19.0 + 1e-12);
    }

    #[test]
    fn k_out_of_range() {
        let train = line(&[0, 1, 0, 1]);
        let eval = SampleMatrix::from_rows(&[[0.0]]).unwrap();
        assert!(matches!(
            knn_proba(4, &train, &eval),
            Err(Error::KTooLarge { k: 4, rows: 4 })
        ));
        assert!(matches!(knn_proba(0, &train, &eval), Err(Error::KTooLarge { .. })));
    }
}
