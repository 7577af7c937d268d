//! One-vs-rest linear max-margin intent classifier.
//!
//! Each class is trained with Pegasos-style subgradient steps on the
//! L2-regularized hinge loss, `eta_t = 1 / (lambda * t)`. The bias is the
//! weight of a constant feature and is regularized with the rest.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tfidf::SparseVec;
use super::NluError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            lambda: 1e-4,
            epochs: 50,
            seed: 13,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LinearIntentClassifier<T: Scalar> {
    /// Sorted class names.
    pub classes: Vec<String>,
    /// One weight vector per class, length = vocabulary size.
    pub weights: Vec<Vec<T>>,
    pub bias: Vec<T>,
}

/// Weight vector kept as `scale * v` so the shrink step is O(1).
struct Scaled<T> {
    scale: T,
    v: Vec<T>,
}

impl<T: Scalar> Scaled<T> {
    fn dot(&self, x: &SparseVec<T>, bias_idx: usize) -> T {
        let s: T = x.iter().map(|&(i, xi)| self.v[i] * xi).sum();
        self.scale * (s + self.v[bias_idx])
    }

    fn shrink(&mut self, factor: T) {
        if factor == T::zero() {
            self.v.iter_mut().for_each(|w| *w = T::zero());
            self.scale = T::one();
        } else {
            self.scale = self.scale * factor;
        }
    }

    fn add(&mut self, x: &SparseVec<T>, bias_idx: usize, step: T) {
        let k = step / self.scale;
        for &(i, xi) in x {
            self.v[i] = self.v[i] + k * xi;
        }
        self.v[bias_idx] = self.v[bias_idx] + k;
    }

    fn renormalize(&mut self) {
        let s = self.scale;
        self.v.iter_mut().for_each(|w| *w = *w * s);
        self.scale = T::one();
    }
}

impl<T: Scalar> LinearIntentClassifier<T> {
    pub fn train(
        xs: &[SparseVec<T>],
        labels: &[String],
        dim: usize,
        params: &SvmParams,
    ) -> Result<Self, NluError> {
        if xs.is_empty() {
            return Err(NluError::EmptyDataset);
        }
        assert_eq!(xs.len(), labels.len(), "one label per feature vector");
        let mut classes: Vec<String> = labels.to_vec();
        classes.sort();
        classes.dedup();
        if classes.len() < 2 {
            return Err(NluError::SingleClass(classes.pop().unwrap_or_default()));
        }
        let y: Vec<usize> = labels
            .iter()
            .map(|l| classes.binary_search(l).expect("label is a class"))
            .collect();

        let lambda = T::of(params.lambda);
        let mut models: Vec<Scaled<T>> = classes
            .iter()
            .map(|_| Scaled {
                scale: T::one(),
                v: vec![T::zero(); dim + 1],
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut order: Vec<usize> = (0..xs.len()).collect();
        let mut t = 0usize;
        for _ in 0..params.epochs {
            order.shuffle(&mut rng);
            for &n in &order {
                t += 1;
                let eta = T::one() / (lambda * T::of_usize(t));
                let factor = T::one() - T::one() / T::of_usize(t);
                for (c, model) in models.iter_mut().enumerate() {
                    let sign = if y[n] == c { T::one() } else { -T::one() };
                    let margin = sign * model.dot(&xs[n], dim);
                    model.shrink(factor);
                    if margin < T::one() {
                        model.add(&xs[n], dim, eta * sign);
                    }
                }
            }
            models.iter_mut().for_each(Scaled::renormalize);
        }

        let mut weights = Vec::with_capacity(classes.len());
        let mut bias = Vec::with_capacity(classes.len());
        for mut m in models {
            m.renormalize();
            bias.push(m.v[dim]);
            m.v.truncate(dim);
            weights.push(m.v);
        }
        Ok(LinearIntentClassifier {
            classes,
            weights,
            bias,
        })
    }

    pub fn margins(&self, x: &SparseVec<T>) -> Vec<T> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(w, &b)| x.iter().map(|&(i, xi)| w[i] * xi).sum::<T>() + b)
            .collect()
    }

    /// Class with the largest margin (ties go to the smaller class name) and
    /// the margin squashed through the logistic function.
    pub fn predict(&self, x: &SparseVec<T>) -> (&str, T) {
        let margins = self.margins(x);
        let mut best = 0;
        for (c, &m) in margins.iter().enumerate() {
            if m > margins[best] {
                best = c;
            }
        }
        let score = T::one() / (T::one() + (-margins[best]).exp());
        (&self.classes[best], score)
    }
}
