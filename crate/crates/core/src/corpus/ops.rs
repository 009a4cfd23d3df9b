use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::sample::{Dataset, DatasetName};
use super::CorpusError;

/// Concatenates datasets, keeping each sample's source. A single dataset is
/// returned unchanged; two or more yield a `combined` dataset.
pub fn combine(datasets: &[Dataset]) -> Result<Dataset, CorpusError> {
    match datasets {
        [] => Err(CorpusError::EmptyDataset("combine input".into())),
        [only] => Ok(only.clone()),
        many => Ok(Dataset::new(
            DatasetName::Combined,
            many.iter().flat_map(|d| d.samples().iter().cloned()).collect(),
        )),
    }
}

/// Size of the training side: `ratio * n` rounded half-up, clamped so that
/// neither side is empty.
pub fn train_size(n: usize, ratio: f64) -> usize {
    let raw = (ratio * n as f64 + 0.5).floor() as usize;
    raw.clamp(1, n.saturating_sub(1).max(1))
}

/// Seeded random partition into `(train, eval)`.
pub fn split(dataset: &Dataset, ratio: f64, seed: u64) -> Result<(Dataset, Dataset), CorpusError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(CorpusError::InvalidRatio(ratio));
    }
    if dataset.len() < 2 {
        return Err(CorpusError::TooSmallToSplit(dataset.len()));
    }
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let cut = train_size(dataset.len(), ratio);
    let pick = |idx: &[usize]| idx.iter().map(|&i| dataset.samples()[i].clone()).collect();
    Ok((
        Dataset::new(dataset.name, pick(&order[..cut])),
        Dataset::new(dataset.name, pick(&order[cut..])),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Source, TextSample};
    use crate::label::Label;

    fn synthetic(name: DatasetName, burnout: usize, control: usize, source: Source) -> Dataset {
        let mut samples = Vec::new();
        for i in 0..burnout {
            samples.push(TextSample::new(format!("b{i} {name}"), Label::Burnout, source));
        }
        for i in 0..control {
            samples.push(TextSample::new(format!("c{i} {name}"), Label::NoBurnout, source));
        }
        Dataset::new(name, samples)
    }

    #[test]
    fn combined_counts_add_up() {
        let online = synthetic(DatasetName::Online, 387, 310, Source::Online);
        let v2 = synthetic(DatasetName::V2, 2026, 1895, Source::Generated);
        let combined = combine(&[online, v2]).unwrap();
        assert_eq!(combined.name, DatasetName::Combined);
        assert_eq!(combined.counts().burnout, 2413);
        assert_eq!(combined.counts().control, 2205);
        let sources = combined.source_counts();
        assert_eq!(sources[&Source::Online], 697);
        assert_eq!(sources[&Source::Generated], 3921);
    }

    #[test]
    fn combine_identity_and_empty() {
        let d = synthetic(DatasetName::V1, 3, 3, Source::Curated);
        assert_eq!(combine(std::slice::from_ref(&d)).unwrap(), d);
        assert!(combine(&[]).is_err());
    }

    #[test]
    fn split_sizes_round_half_up() {
        assert_eq!(train_size(1016, 0.8), 813);
        assert_eq!(train_size(10, 0.85), 9);
        assert_eq!(train_size(2, 0.9), 1);
        let d = synthetic(DatasetName::V1, 508, 508, Source::Curated);
        let (train, eval) = split(&d, 0.8, 7).unwrap();
        assert_eq!((train.len(), eval.len()), (813, 203));
    }

    #[test]
    fn split_is_deterministic_exact_partition() {
        let d = synthetic(DatasetName::V1, 40, 35, Source::Curated);
        let (a_train, a_eval) = split(&d, 0.8, 42).unwrap();
        let (b_train, b_eval) = split(&d, 0.8, 42).unwrap();
        assert_eq!(a_train, b_train);
        assert_eq!(a_eval, b_eval);
        let mut all: Vec<_> = a_train
            .samples()
            .iter()
            .chain(a_eval.samples())
            .map(|s| s.text.clone())
            .collect();
        all.sort();
        let mut expected: Vec<_> = d.samples().iter().map(|s| s.text.clone()).collect();
        expected.sort();
        assert_eq!(all, expected);
    }

    #[test]
    fn split_errors() {
        let tiny = synthetic(DatasetName::V1, 1, 0, Source::Curated);
        assert!(matches!(split(&tiny, 0.8, 1), Err(CorpusError::TooSmallToSplit(1))));
        let d = synthetic(DatasetName::V1, 2, 2, Source::Curated);
        assert!(split(&d, 1.0, 1).is_err());
        assert!(split(&d, 0.0, 1).is_err());
    }
}
