use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::SeverityError;

/// Index sets of a train/test partition, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Stratified split: each class contributes `round(n_class * (1 - train_fraction))`
/// records to the test set, drawn by a seeded shuffle.
pub fn stratified_split(labels: &[bool], train_fraction: f64, seed: u64) -> Result<Split, SeverityError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(SeverityError::InvalidConfig(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in [true, false] {
        let mut idx: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == class)
            .map(|(i, _)| i)
            .collect();
        if idx.len() < 2 {
            return Err(SeverityError::Stratification {
                class: if class { "severe" } else { "non-severe" },
                count: idx.len(),
            });
        }
        idx.shuffle(&mut rng);
        let n_test = ((idx.len() as f64) * (1.0 - train_fraction)).round() as usize;
        let n_test = n_test.clamp(1, idx.len() - 1);
        test.extend_from_slice(&idx[..n_test]);
        train.extend_from_slice(&idx[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, test })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hundred_records_quarter_severe() {
        let labels: Vec<bool> = (0..100).map(|i| i % 4 == 0).collect();
        let s = stratified_split(&labels, 0.8, 7).unwrap();
        assert_eq!(s.test.len(), 20);
        assert_eq!(s.test.iter().filter(|&&i| labels[i]).count(), 5);
        assert_eq!(s.train.len(), 80);
    }

    #[test]
    fn national_test_size() {
        // 131,340 severe and 394,020 non-severe records
        let n_test = (131_340f64 * 0.2).round() as usize + (394_020f64 * 0.2).round() as usize;
        assert_eq!(n_test, 105_072);
        let labels: Vec<bool> = (0..525_360).map(|i| i < 131_340).collect();
        let s = stratified_split(&labels, 0.8, 1).unwrap();
        assert_eq!(s.test.len(), 105_072);
        assert_eq!(s.test.iter().filter(|&&i| labels[i]).count(), 26_268);
    }

    #[test]
    fn deterministic_per_seed() {
        let labels: Vec<bool> = (0..50).map(|i| i % 3 == 0).collect();
        assert_eq!(stratified_split(&labels, 0.8, 3).unwrap(), stratified_split(&labels, 0.8, 3).unwrap());
        assert_ne!(stratified_split(&labels, 0.8, 3).unwrap(), stratified_split(&labels, 0.8, 4).unwrap());
    }

    #[test]
    fn tiny_class_rejected() {
        let labels = [true, false, false, false];
        assert!(matches!(
            stratified_split(&labels, 0.8, 0),
            Err(SeverityError::Stratification { class: "severe", count: 1 })
        ));
    }
}
