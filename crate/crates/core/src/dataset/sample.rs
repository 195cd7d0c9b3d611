use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::classes::ClassMap;
use super::{AnnotatedIcon, Split};

pub const DEFAULT_CLASS_CAP: usize = 15;

/// Keep one seeded-random label per train/valid icon; test icons keep all.
pub fn sample_r1(icons: &[AnnotatedIcon], seed: u64) -> Vec<AnnotatedIcon> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    icons
        .iter()
        .map(|icon| {
            let mut out = icon.clone();
            if icon.split != Split::Test && icon.labels.len() > 1 {
                let pick = rng.gen_range(0..icon.labels.len());
                out.labels = vec![icon.labels[pick].clone()];
            }
            out
        })
        .collect()
}

/// Up to `cap` seeded-random training icons per class, in input order.
pub fn sample_finetune_subset(icons: &[AnnotatedIcon], classes: &ClassMap, cap: usize, seed: u64) -> Vec<AnnotatedIcon> {
    let mut buckets: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, icon) in icons.iter().enumerate().filter(|(_, i)| i.split == Split::Train) {
        buckets
            .entry(classes.assign(icon.context.ui_element_info.resource_id()))
            .or_default()
            .push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep: Vec<usize> = Vec::new();
    for members in buckets.values_mut() {
        members.shuffle(&mut rng);
        keep.extend(members.iter().take(cap));
    }
    keep.sort_unstable();
    log::info!("fine-tune subset: {} of {} training icons", keep.len(), icons.iter().filter(|i| i.split == Split::Train).count());
    keep.into_iter().map(|i| icons[i].clone()).collect()
}
