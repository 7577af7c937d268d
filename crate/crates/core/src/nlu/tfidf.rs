use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::NluError;
use crate::scalar::Scalar;

/// Sparse vector as `(index, value)` pairs sorted by index.
pub type SparseVec<T> = Vec<(usize, T)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TfidfVectorizer<T: Scalar> {
    pub vocabulary: BTreeMap<String, usize>,
    pub idf: Vec<T>,
}

impl<T: Scalar> TfidfVectorizer<T> {
    /// `idf = ln(N / df)` over the training documents.
    pub fn fit<S: AsRef<[String]>>(docs: &[S]) -> Result<Self, NluError> {
        if docs.is_empty() {
            return Err(NluError::EmptyDataset);
        }
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for doc in docs {
            let mut seen: Vec<&str> = doc.as_ref().iter().map(String::as_str).collect();
            seen.sort_unstable();
            seen.dedup();
            for tok in seen {
                *df.entry(tok).or_default() += 1;
            }
        }
        let n = T::of_usize(docs.len());
        let mut vocabulary = BTreeMap::new();
        let mut idf = Vec::with_capacity(df.len());
        for (i, (tok, count)) in df.into_iter().enumerate() {
            vocabulary.insert(tok.to_string(), i);
            idf.push((n / T::of_usize(count)).ln());
        }
        Ok(TfidfVectorizer { vocabulary, idf })
    }

    pub fn dim(&self) -> usize {
        self.idf.len()
    }

    /// `tf = count / length`, weighted by idf and L2-normalized. Unknown
    /// tokens contribute nothing; an all-zero vector stays zero.
    pub fn transform(&self, tokens: &[String]) -> SparseVec<T> {
        if tokens.is_empty() {
            return Vec::new();
        }
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for tok in tokens {
            if let Some(&i) = self.vocabulary.get(tok) {
                *counts.entry(i).or_default() += 1;
            }
        }
        let len = T::of_usize(tokens.len());
        let mut v: SparseVec<T> = counts
            .into_iter()
            .map(|(i, c)| (i, T::of_usize(c) / len * self.idf[i]))
            .filter(|&(_, x)| x != T::zero())
            .collect();
        let norm = v.iter().map(|&(_, x)| x * x).sum::<T>().sqrt();
        if norm > T::zero() {
            for (_, x) in &mut v {
                *x = *x / norm;
            }
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn docs(raw: &[&str]) -> Vec<Vec<String>> {
        raw.iter()
            .map(|d| d.split_whitespace().map(str::to_string).collect())
            .collect()
    }

    #[test]
    fn idf_by_hand() {
        let v = TfidfVectorizer::<f64>::fit(&docs(&["a b", "a c"])).unwrap();
        assert_eq!(v.idf[v.vocabulary["a"]], 0.0);
        assert!((v.idf[v.vocabulary["b"]] - 2f64.ln()).abs() < 1e-15);
        assert!((v.idf[v.vocabulary["c"]] - 2f64.ln()).abs() < 1e-15);
        // "a b": a has weight 0, so the normalized vector is the unit b axis.
        assert_eq!(v.transform(&docs(&["a b"])[0]), vec![(v.vocabulary["b"], 1.0)]);
    }

    #[test]
    fn single_document_gives_zero_vectors() {
        let v = TfidfVectorizer::<f32>::fit(&docs(&["x y y"])).unwrap();
        assert!(v.idf.iter().all(|&x| x == 0.0));
        assert!(v.transform(&docs(&["x y"])[0]).is_empty());
    }

    #[test]
    fn unknown_tokens_ignored() {
        let v = TfidfVectorizer::<f64>::fit(&docs(&["a b", "a c"])).unwrap();
        assert!(v.transform(&docs(&["zzz qqq"])[0]).is_empty());
        assert!(TfidfVectorizer::<f64>::fit::<Vec<String>>(&[]).is_err());
    }

    proptest! {
        #[test]
        fn vectors_are_unit_or_zero(train in proptest::collection::vec("[a-e]( [a-e]){0,5}", 1..8),
                                    query in "[a-g]( [a-g]){0,6}") {
            let v = TfidfVectorizer::<f64>::fit(&docs(&train.iter().map(String::as_str).collect::<Vec<_>>())).unwrap();
            prop_assert!(v.idf.iter().all(|&x| x >= 0.0));
            let x = v.transform(&docs(&[query.as_str()])[0]);
            let norm: f64 = x.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt();
            prop_assert!(x.is_empty() || (norm - 1.0).abs() < 1e-9);
        }
    }
}
