//! scenecount: a self-contained toolchain for building synthetic
//! object-counting VQA datasets.
//!
//! The pipeline samples tabletop scenes of geometric primitives from a JSON
//! configuration space, renders them with a small analytic ray tracer that
//! also emits per-pixel instance segmentation maps, validates object/background
//! contrast in CIELAB, attaches templated counting questions with three
//! ground-truth styles, and assembles balanced train/test manifests. An
//! evaluation harness scores free-text model answers with counting metrics.
//!
//! Stages are plain functions over immutable values and are deterministic for
//! a fixed seed, independent of thread count. See the `book/` guide for a
//! chapter per stage.

pub mod config;
pub mod contrast;
pub mod dataset;
pub mod eval;
pub mod qa;
pub mod render;
pub mod scene;

mod util;

pub use config::{GenerationConfig, SceneSpec, Shape, Zone};
pub use contrast::{ContrastReport, LabColor};
pub use dataset::{BalanceProfile, DatasetManifest, Split};
pub use eval::{EvalReport, PredictionRecord};
pub use qa::{Filter, QAItem, QuestionType, TemplateSet};
pub use render::RenderOutput;
pub use scene::{SceneGraph, SceneMetadata, SceneObject};

// The book chapters double as doc-tests so their code snippets cannot rot.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/configuration.md")]
    mod configuration {}
    #[doc = include_str!("../../../book/src/scene-generation.md")]
    mod scene_generation {}
    #[doc = include_str!("../../../book/src/rendering.md")]
    mod rendering {}
    #[doc = include_str!("../../../book/src/contrast-validation.md")]
    mod contrast_validation {}
    #[doc = include_str!("../../../book/src/question-generation.md")]
    mod question_generation {}
    #[doc = include_str!("../../../book/src/dataset-assembly.md")]
    mod dataset_assembly {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
}
