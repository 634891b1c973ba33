//! Downstream uses of learned representations: grade paraphrase and
//! prediction, opinion descriptors, projections, legislator-embedding export
//! and document-type ablations.

mod ablation;
mod descriptors;
mod export;
mod grades;
mod predict;
mod projection;
mod stance;

pub use ablation::{ablation_configurations, ablation_filter};
pub use descriptors::{opinion_descriptors, rank_descriptors, Descriptor};
pub use export::{export_legislator_embeddings, legislator_embedding, ExportReport};
pub use grades::{
    lcv_bin, load_grades, parse_grades, GradeRecord, GradeSource, LetterGrade, RawGrade,
    NRA_CLASSES,
};
pub use predict::{
    assign_folds, grade_predict, GradeExample, GradePredictConfig, GradePrediction, SeedScore,
};
pub use projection::{project_embeddings, projection_text};
pub use stance::{
    author_issue_graph, classify_stance, grade_paraphrase, stance_embedding, tokenize,
    ParaphraseResult, StanceEmbedding, StanceSource,
};
