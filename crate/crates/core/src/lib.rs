//! Task-oriented dialogue agent for questions about papers, conferences,
//! people and NLP news.

pub mod agent;
pub mod augment;
pub mod dm;
pub mod eval;
pub mod kb;
pub mod nlg;
pub mod nlu;
pub mod scalar;
pub mod schema;
pub mod skills;
pub mod state;
pub mod template;
pub mod text;

pub use scalar::Scalar;
pub use schema::SchemaRegistry;
pub use state::{DialogueState, SlotValue, StateKind};
pub use template::{Template, TemplateLabels};
pub use text::{normalize_utterance, Utterance};

/// Double-precision instantiations of the generic NLU models.
pub type EmbeddingTable = nlu::embedding::EmbeddingTable<f64>;
pub type CentroidClassifier = nlu::embedding::CentroidClassifier<f64>;
pub type EmbeddingSlotTagger = nlu::embedding::EmbeddingSlotTagger<f64>;
pub type TfidfVectorizer = nlu::tfidf::TfidfVectorizer<f64>;
pub type LinearIntentClassifier = nlu::svm::LinearIntentClassifier<f64>;
pub type HmmSlotTagger = nlu::hmm::HmmSlotTagger<f64>;
pub type MlModels = nlu::MlModels<f64>;
pub type NluPipeline = nlu::NluPipeline<f64>;
