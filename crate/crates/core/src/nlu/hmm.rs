//! First-order HMM over BIO tags with add-one smoothing and Viterbi decoding.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::dataset::{repair_bio, tag_slot, Instance, OUTSIDE};
use super::NluError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct HmmSlotTagger<T: Scalar> {
    /// `O` first, then `B-X`, `I-X` for each slot type in sorted order.
    pub states: Vec<String>,
    pub vocabulary: BTreeMap<String, usize>,
    pub start: Vec<T>,
    /// `transition[i][j] = P(state j | state i)`.
    pub transition: Vec<Vec<T>>,
    /// `emission[i][w]`; the last column is the unknown-token mass.
    pub emission: Vec<Vec<T>>,
}

impl<T: Scalar> HmmSlotTagger<T> {
    pub fn train(instances: &[Instance]) -> Result<Self, NluError> {
        if instances.is_empty() {
            return Err(NluError::EmptyDataset);
        }
        let mut slots: Vec<&str> = instances
            .iter()
            .flat_map(|i| i.tags.iter().filter_map(|t| tag_slot(t)))
            .collect();
        slots.sort_unstable();
        slots.dedup();
        let mut states = vec![OUTSIDE.to_string()];
        for s in slots {
            states.push(format!("B-{s}"));
            states.push(format!("I-{s}"));
        }
        let index: BTreeMap<&str, usize> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();

        let mut vocabulary = BTreeMap::new();
        for inst in instances {
            for tok in &inst.tokens {
                let next = vocabulary.len();
                vocabulary.entry(tok.clone()).or_insert(next);
            }
        }
        // Re-number in sorted order so the model does not depend on data order.
        for (i, v) in vocabulary.values_mut().enumerate() {
            *v = i;
        }

        let k = states.len();
        let w = vocabulary.len() + 1;
        let mut start_c = vec![0usize; k];
        let mut trans_c = vec![vec![0usize; k]; k];
        let mut emit_c = vec![vec![0usize; w]; k];
        for inst in instances {
            let mut prev: Option<usize> = None;
            for (tok, tag) in inst.tokens.iter().zip(&inst.tags) {
                let s = *index.get(tag.as_str()).ok_or_else(|| NluError::UnknownTag(tag.clone()))?;
                match prev {
                    None => start_c[s] += 1,
                    Some(p) => trans_c[p][s] += 1,
                }
                emit_c[s][vocabulary[tok]] += 1;
                prev = Some(s);
            }
        }

        let smooth = |counts: &[usize]| -> Vec<T> {
            let total = T::of_usize(counts.iter().sum::<usize>() + counts.len());
            counts.iter().map(|&c| T::of_usize(c + 1) / total).collect()
        };
        Ok(HmmSlotTagger {
            start: smooth(&start_c),
            transition: trans_c.iter().map(|r| smooth(r)).collect(),
            emission: emit_c.iter().map(|r| smooth(r)).collect(),
            states,
            vocabulary,
        })
    }

    fn column(&self, token: &str) -> usize {
        self.vocabulary
            .get(token)
            .copied()
            .unwrap_or(self.vocabulary.len())
    }

    /// Most probable state path; among equally probable paths the one whose
    /// reversed state-index sequence is lexicographically smallest.
    pub fn decode_indices(&self, tokens: &[String]) -> Vec<usize> {
        if tokens.is_empty() {
            return Vec::new();
        }
        let k = self.states.len();
        let ln_trans: Vec<Vec<T>> = self
            .transition
            .iter()
            .map(|r| r.iter().map(|p| p.ln()).collect())
            .collect();
        let cols: Vec<usize> = tokens.iter().map(|t| self.column(t)).collect();

        let mut delta: Vec<T> = (0..k)
            .map(|j| self.start[j].ln() + self.emission[j][cols[0]].ln())
            .collect();
        let mut back: Vec<Vec<usize>> = Vec::with_capacity(tokens.len());
        for &col in &cols[1..] {
            let mut next = vec![T::zero(); k];
            let mut bp = vec![0usize; k];
            for j in 0..k {
                let mut best = 0;
                let mut best_score = delta[0] + ln_trans[0][j];
                for (i, &d) in delta.iter().enumerate().skip(1) {
                    let s = d + ln_trans[i][j];
                    if s > best_score {
                        best = i;
                        best_score = s;
                    }
                }
                next[j] = best_score + self.emission[j][col].ln();
                bp[j] = best;
            }
            back.push(bp);
            delta = next;
        }

        let mut last = 0;
        for (j, &d) in delta.iter().enumerate() {
            if d > delta[last] {
                last = j;
            }
        }
        let mut path = vec![last];
        for bp in back.iter().rev() {
            last = bp[last];
            path.push(last);
        }
        path.reverse();
        path
    }

    /// Log-probability of a state path, summed in the same order as decoding.
    pub fn path_log_prob(&self, tokens: &[String], path: &[usize]) -> T {
        let mut s = self.start[path[0]].ln() + self.emission[path[0]][self.column(&tokens[0])].ln();
        for t in 1..tokens.len() {
            s = s + self.transition[path[t - 1]][path[t]].ln();
            s = s + self.emission[path[t]][self.column(&tokens[t])].ln();
        }
        s
    }

    /// Viterbi path mapped to tags, then BIO-repaired.
    pub fn viterbi_decode(&self, tokens: &[String]) -> Vec<String> {
        let mut tags: Vec<String> = self
            .decode_indices(tokens)
            .into_iter()
            .map(|i| self.states[i].clone())
            .collect();
        repair_bio(&mut tags);
        tags
    }
}
