use rand::seq::SliceRandom;

use super::GaError;
use crate::rng;
use crate::scalar::Scalar;
use crate::scores::MultiScoreSet;

/// Random half/half split of the intra tuples and of the inter tuples.
/// With an odd count the learning part gets the extra tuple. Both parts keep
/// the original tuple order.
pub fn split_learning_validation<T: Scalar>(
    tuples: &MultiScoreSet<T>,
    seed: u64,
) -> Result<(MultiScoreSet<T>, MultiScoreSet<T>), GaError> {
    let (n_intra, n_inter) = (tuples.intra().len(), tuples.inter().len());
    if n_intra < 2 || n_inter < 2 {
        return Err(GaError::TooFewTuples { intra: n_intra, inter: n_inter });
    }
    let mut rng = rng::seeded(seed);
    let mut halves = |n: usize| {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        let (a, b) = idx.split_at(n.div_ceil(2));
        let (mut a, mut b) = (a.to_vec(), b.to_vec());
        a.sort_unstable();
        b.sort_unstable();
        (a, b)
    };
    let (intra_learn, intra_valid) = halves(n_intra);
    let (inter_learn, inter_valid) = halves(n_inter);
    Ok((
        tuples.select(&intra_learn, &inter_learn)?,
        tuples.select(&intra_valid, &inter_valid)?,
    ))
}
