//! Exhaustive ranking and random knowledge bases.

use figforge_core::kb::KbRecord;
use rand::Rng;

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for i in 0..a.len() {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        (dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0)
    }
}

/// Scores every entry and fully sorts: score descending, id ascending.
pub fn exhaustive(entries: &[(String, Vec<f64>)], q: &[f64], k: usize) -> Vec<(String, f64)> {
    let mut all: Vec<(String, f64)> = entries.iter().map(|(id, v)| (id.clone(), cosine(q, v))).collect();
    all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

const VOCAB: &[&str] = &[
    "encoder", "decoder", "attention", "graph", "pipeline", "token", "diffusion", "retrieval", "agent", "loss",
    "module", "fusion",
];

pub fn phrase<R: Rng>(rng: &mut R, max_words: usize) -> String {
    let n = rng.gen_range(1..=max_words);
    (0..n).map(|_| VOCAB[rng.gen_range(0..VOCAB.len())]).collect::<Vec<_>>().join(" ")
}

/// Records with a small vocabulary, so identical captions (exact score ties)
/// are common. Ids are shuffled so id order differs from insertion order.
pub fn random_records<R: Rng>(rng: &mut R, n: usize) -> Vec<KbRecord> {
    let mut ids: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        ids.swap(i, rng.gen_range(0..=i));
    }
    ids.into_iter()
        .map(|i| KbRecord {
            id: format!("rec{i:04}"),
            figure_ref: format!("figs/{i}.png"),
            caption: phrase(rng, 3),
            description: if rng.gen_bool(0.3) { String::new() } else { phrase(rng, 20) },
            venue: String::new(),
        })
        .collect()
}
