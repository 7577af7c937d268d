//! Word-embedding models: utterance averages with a nearest-centroid intent
//! classifier, and a token-level nearest-centroid slot tagger.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::dataset::{tag_slot, Instance, OUTSIDE};
use super::NluError;
use crate::scalar::{cosine, Scalar};

/// Neighbors on each side averaged into a token's context vector.
pub const WINDOW_RADIUS: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable<T: Scalar> {
    dim: usize,
    vectors: HashMap<String, Vec<T>>,
}

impl<T: Scalar> EmbeddingTable<T> {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable {
            dim,
            vectors: HashMap::new(),
        }
    }

    pub fn insert(&mut self, word: &str, vector: Vec<T>) -> Result<(), NluError> {
        if vector.len() != self.dim {
            return Err(NluError::Dimension {
                expected: self.dim,
                found: vector.len(),
            });
        }
        self.vectors.insert(word.to_string(), vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[T]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    /// Parses the whitespace text format `word v1 ... vd`, one word per line.
    /// The dimension is taken from the first line.
    pub fn from_text(text: &str) -> Result<Self, NluError> {
        let mut table: Option<Self> = None;
        for (idx, line) in text.lines().enumerate() {
            let mut parts = line.split_whitespace();
            let Some(word) = parts.next() else { continue };
            let vector = parts
                .map(|p| p.parse::<f64>().map(T::of))
                .collect::<Result<Vec<T>, _>>()
                .map_err(|e| NluError::Parse(format!("embedding line {}: {e}", idx + 1)))?;
            let t = table.get_or_insert_with(|| Self::new(vector.len()));
            t.insert(word, vector).map_err(|e| {
                NluError::Parse(format!("embedding line {}: {e}", idx + 1))
            })?;
        }
        table.ok_or_else(|| NluError::Parse("embedding file is empty".into()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, NluError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| NluError::Io(format!("{}: {e}", path.display())))?;
        let table = Self::from_text(&text)?;
        log::debug!("loaded {} vectors of dim {} from {}", table.len(), table.dim, path.display());
        Ok(table)
    }

    /// The word's vector, or zeros when it is not in the table.
    pub fn lookup(&self, word: &str) -> Vec<T> {
        self.get(word)
            .map(<[T]>::to_vec)
            .unwrap_or_else(|| vec![T::zero(); self.dim])
    }

    /// Mean of the token vectors (zero for unknown words, zero for no tokens).
    pub fn embed_average(&self, tokens: &[String]) -> Vec<T> {
        let mut sum = vec![T::zero(); self.dim];
        if tokens.is_empty() {
            return sum;
        }
        for tok in tokens {
            if let Some(v) = self.get(tok) {
                add_into(&mut sum, v);
            }
        }
        scale(&mut sum, T::one() / T::of_usize(tokens.len()));
        sum
    }

    /// Token vector followed by the mean of the neighbors within
    /// [`WINDOW_RADIUS`] (the token itself excluded).
    pub fn token_features(&self, tokens: &[String]) -> Vec<Vec<T>> {
        let vecs: Vec<Vec<T>> = tokens.iter().map(|t| self.lookup(t)).collect();
        (0..tokens.len())
            .map(|i| {
                let lo = i.saturating_sub(WINDOW_RADIUS);
                let hi = (i + WINDOW_RADIUS + 1).min(tokens.len());
                let mut ctx = vec![T::zero(); self.dim];
                let mut n = 0;
                for (j, v) in vecs.iter().enumerate().take(hi).skip(lo) {
                    if j != i {
                        add_into(&mut ctx, v);
                        n += 1;
                    }
                }
                if n > 0 {
                    scale(&mut ctx, T::one() / T::of_usize(n));
                }
                let mut f = vecs[i].clone();
                f.extend(ctx);
                f
            })
            .collect()
    }
}

fn add_into<T: Scalar>(acc: &mut [T], v: &[T]) {
    for (a, &x) in acc.iter_mut().zip(v) {
        *a = *a + x;
    }
}

fn scale<T: Scalar>(v: &mut [T], k: T) {
    v.iter_mut().for_each(|x| *x = *x * k);
}

/// Index of the most similar centroid; ties go to the lower index.
fn nearest<T: Scalar>(centroids: &[Vec<T>], x: &[T]) -> (usize, T) {
    let mut best = 0;
    let mut best_sim = cosine(&centroids[0], x);
    for (i, c) in centroids.iter().enumerate().skip(1) {
        let s = cosine(c, x);
        if s > best_sim {
            best = i;
            best_sim = s;
        }
    }
    (best, best_sim)
}

fn mean_by_label<T: Scalar>(
    items: impl Iterator<Item = (String, Vec<T>)>,
    dim: usize,
) -> BTreeMap<String, Vec<T>> {
    let mut sums: BTreeMap<String, (Vec<T>, usize)> = BTreeMap::new();
    for (label, v) in items {
        let e = sums.entry(label).or_insert_with(|| (vec![T::zero(); dim], 0));
        add_into(&mut e.0, &v);
        e.1 += 1;
    }
    sums.into_iter()
        .map(|(l, (mut s, n))| {
            scale(&mut s, T::one() / T::of_usize(n));
            (l, s)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CentroidClassifier<T: Scalar> {
    /// Sorted class names.
    pub classes: Vec<String>,
    pub centroids: Vec<Vec<T>>,
}

impl<T: Scalar> CentroidClassifier<T> {
    pub fn train(instances: &[Instance], table: &EmbeddingTable<T>) -> Result<Self, NluError> {
        if instances.is_empty() {
            return Err(NluError::EmptyDataset);
        }
        let means = mean_by_label(
            instances
                .iter()
                .map(|i| (i.intent.clone(), table.embed_average(&i.tokens))),
            table.dim(),
        );
        let (classes, centroids) = means.into_iter().unzip();
        Ok(CentroidClassifier { classes, centroids })
    }

    /// Cosine-nearest class and its similarity.
    pub fn predict(&self, table: &EmbeddingTable<T>, tokens: &[String]) -> (&str, T) {
        let (i, sim) = nearest(&self.centroids, &table.embed_average(tokens));
        (&self.classes[i], sim)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EmbeddingSlotTagger<T: Scalar> {
    /// `O` first, then the remaining tags sorted.
    pub tags: Vec<String>,
    pub centroids: Vec<Vec<T>>,
}

impl<T: Scalar> EmbeddingSlotTagger<T> {
    pub fn train(instances: &[Instance], table: &EmbeddingTable<T>) -> Result<Self, NluError> {
        if instances.is_empty() {
            return Err(NluError::EmptyDataset);
        }
        let feats = instances.iter().flat_map(|inst| {
            inst.tags
                .iter()
                .cloned()
                .zip(table.token_features(&inst.tokens))
        });
        let mut means = mean_by_label(feats, 2 * table.dim());
        let mut tags = Vec::new();
        let mut centroids = Vec::new();
        if let Some(o) = means.remove(OUTSIDE) {
            tags.push(OUTSIDE.to_string());
            centroids.push(o);
        }
        for (t, c) in means {
            tags.push(t);
            centroids.push(c);
        }
        Ok(EmbeddingSlotTagger { tags, centroids })
    }

    /// Nearest tag centroid per token, before any BIO repair.
    pub fn raw_tags(&self, table: &EmbeddingTable<T>, tokens: &[String]) -> Vec<String> {
        table
            .token_features(tokens)
            .iter()
            .map(|f| self.tags[nearest(&self.centroids, f).0].clone())
            .collect()
    }

    /// Nearest-centroid tags followed by [`repair_runs`].
    pub fn predict(&self, table: &EmbeddingTable<T>, tokens: &[String]) -> Vec<String> {
        let mut tags = self.raw_tags(table, tokens);
        repair_runs(&mut tags);
        tags
    }
}

/// Each maximal run of non-`O` tags takes the slot type most of its tokens
/// voted for (ties to the smaller name), then gets `B` on its first token
/// and `I` on the rest.
pub fn repair_runs(tags: &mut [String]) {
    let mut i = 0;
    while i < tags.len() {
        if tags[i] == OUTSIDE {
            i += 1;
            continue;
        }
        let start = i;
        while i < tags.len() && tags[i] != OUTSIDE {
            i += 1;
        }
        let mut votes: BTreeMap<String, usize> = BTreeMap::new();
        for t in &tags[start..i] {
            *votes.entry(tag_slot(t).unwrap_or(t).to_string()).or_default() += 1;
        }
        let mut slot = String::new();
        let mut best = 0;
        for (s, n) in votes {
            if n > best {
                best = n;
                slot = s;
            }
        }
        for (k, t) in tags[start..i].iter_mut().enumerate() {
            *t = if k == 0 {
                format!("B-{slot}")
            } else {
                format!("I-{slot}")
            };
        }
    }
}
