//! Counting-question generation.
//!
//! Six question types are drawn per image: color, shape, location, object
//! (everything), composite (two or three conjoined attributes), and
//! adversarial (a near-miss attribute pair absent from the scene, answer 0).
//! Every question carries three ground-truth styles: the bare number, a
//! one-sentence answer, and a verbose per-location breakdown whose zone
//! counts always sum to the total. All counts come straight from
//! [`SceneMetadata`], never from the question text.
//!
//! Question phrasings live in a JSON template file (see `templates/
//! questions.json`) so the inventory can grow without touching code.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{PaletteColor, Shape, Zone};
use crate::scene::{SceneGraph, SceneMetadata};
use crate::util;

/// The six question classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestionType {
    Color,
    Shape,
    Location,
    Object,
    Composite,
    Adversarial,
}

impl QuestionType {
    pub const ALL: [QuestionType; 6] = [
        QuestionType::Color,
        QuestionType::Shape,
        QuestionType::Location,
        QuestionType::Object,
        QuestionType::Composite,
        QuestionType::Adversarial,
    ];

    fn tag(&self) -> &'static str {
        match self {
            QuestionType::Color => "color",
            QuestionType::Shape => "shape",
            QuestionType::Location => "location",
            QuestionType::Object => "object",
            QuestionType::Composite => "composite",
            QuestionType::Adversarial => "adversarial",
        }
    }
}

impl std::fmt::Display for QuestionType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Which objects a question asks about. `None` fields are wildcards.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Filter {
    pub shape: Option<Shape>,
    pub color: Option<String>,
    pub zone: Option<Zone>,
}

impl Filter {
    pub fn matches(&self, obj: &crate::scene::SceneObject) -> bool {
        self.shape.map_or(true, |s| obj.shape == s)
            && self.color.as_deref().map_or(true, |c| obj.color.name == c)
            && self.zone.map_or(true, |z| obj.zone == z)
    }

    fn count_in(&self, metadata: &SceneMetadata) -> u32 {
        metadata.count_matching(self.shape, self.color.as_deref(), self.zone)
    }

    /// Slot names this filter can fill in a template.
    fn slots(&self) -> Vec<&'static str> {
        let mut slots = Vec::new();
        if self.shape.is_some() {
            slots.push("shape");
        }
        if self.color.is_some() {
            slots.push("color");
        }
        if self.zone.is_some() {
            slots.push("zone");
        }
        slots
    }
}

/// One image/question/ground-truth triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QAItem {
    pub item_id: String,
    pub image_ref: String,
    pub question_type: QuestionType,
    pub question: String,
    pub numeric_gt: u32,
    pub short_gt: String,
    pub verbose_gt: String,
    pub filter: Filter,
}

/// The three ground-truth styles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroundTruthStyle {
    Numeric,
    Short,
    Verbose,
}

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("template parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("template set invalid: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuestionPatterns {
    pub object: Vec<String>,
    pub shape: Vec<String>,
    pub color: Vec<String>,
    pub location: Vec<String>,
    pub composite: Vec<String>,
    pub adversarial: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerboseFormat {
    pub preamble: String,
    pub zone_sentence: String,
    pub total_sentence: String,
}

/// Question phrasings plus the short/verbose ground-truth formats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateSet {
    pub questions: QuestionPatterns,
    pub short_gt: String,
    pub verbose_gt: VerboseFormat,
}

const BUILTIN_TEMPLATES: &str = include_str!("../templates/questions.json");

fn pattern_slots(pattern: &str) -> Vec<&'static str> {
    let mut slots = Vec::new();
    for slot in ["shape", "color", "zone"] {
        if pattern.contains(&format!("{{{slot}}}")) {
            slots.push(slot);
        }
    }
    slots
}

impl TemplateSet {
    /// The template inventory shipped with the crate.
    pub fn builtin() -> TemplateSet {
        Self::from_json(BUILTIN_TEMPLATES).expect("embedded templates are valid")
    }

    /// Parses and validates a template document.
    pub fn from_json(text: &str) -> Result<TemplateSet, TemplateError> {
        let set: TemplateSet = serde_json::from_str(text)?;
        set.validate()?;
        Ok(set)
    }

    pub fn patterns_for(&self, qtype: QuestionType) -> &[String] {
        match qtype {
            QuestionType::Object => &self.questions.object,
            QuestionType::Shape => &self.questions.shape,
            QuestionType::Color => &self.questions.color,
            QuestionType::Location => &self.questions.location,
            QuestionType::Composite => &self.questions.composite,
            QuestionType::Adversarial => &self.questions.adversarial,
        }
    }

    fn validate(&self) -> Result<(), TemplateError> {
        let expect = |qtype: QuestionType, required: &[&str]| -> Result<(), TemplateError> {
            let patterns = self.patterns_for(qtype);
            if patterns.is_empty() {
                return Err(TemplateError::Invalid(format!("no patterns for type {qtype}")));
            }
            for p in patterns {
                if pattern_slots(p) != required {
                    return Err(TemplateError::Invalid(format!(
                        "pattern `{p}` for type {qtype} must use exactly slots {required:?}"
                    )));
                }
            }
            Ok(())
        };
        expect(QuestionType::Object, &[])?;
        expect(QuestionType::Shape, &["shape"])?;
        expect(QuestionType::Color, &["color"])?;
        expect(QuestionType::Location, &["zone"])?;
        expect(QuestionType::Adversarial, &["shape", "color"])?;

        let composite = self.patterns_for(QuestionType::Composite);
        if composite.is_empty() {
            return Err(TemplateError::Invalid("no patterns for type composite".into()));
        }
        let allowed: [&[&str]; 4] = [
            &["shape", "color"],
            &["shape", "zone"],
            &["color", "zone"],
            &["shape", "color", "zone"],
        ];
        for combo in allowed {
            if !composite.iter().any(|p| pattern_slots(p) == combo) {
                return Err(TemplateError::Invalid(format!(
                    "composite patterns must cover slot combination {combo:?}"
                )));
            }
        }
        for p in composite {
            let slots = pattern_slots(p);
            if !allowed.contains(&slots.as_slice()) {
                return Err(TemplateError::Invalid(format!(
                    "composite pattern `{p}` uses unsupported slots {slots:?}"
                )));
            }
        }
        Ok(())
    }
}

fn instantiate(pattern: &str, filter: &Filter) -> String {
    let mut text = pattern.to_string();
    if let Some(shape) = filter.shape {
        text = text.replace("{shape}", shape.noun());
    }
    if let Some(color) = &filter.color {
        text = text.replace("{color}", color);
    }
    if let Some(zone) = filter.zone {
        text = text.replace("{zone}", zone.question_phrase());
    }
    text
}

/// Noun phrase for a filter and count: "cone(s)", "red object(s)", ...
fn noun_phrase(filter: &Filter, count: u32) -> String {
    let base = filter.shape.map_or("object", |s| s.noun());
    let plural = if count == 1 { "" } else { "s" };
    match &filter.color {
        Some(color) => format!("{color} {base}{plural}"),
        None => format!("{base}{plural}"),
    }
}

fn be_verb(count: u32) -> &'static str {
    if count == 1 {
        "is"
    } else {
        "are"
    }
}

fn scope_phrase(filter: &Filter) -> String {
    match filter.zone {
        None => " in the image".to_string(),
        Some(zone) => format!(" {}", zone.question_phrase()),
    }
}

fn fill_gt(pattern: &str, filter: &Filter, count: u32) -> String {
    pattern
        .replace("{be}", be_verb(count))
        .replace("{count}", &count.to_string())
        .replace("{noun}", &noun_phrase(filter, count))
        .replace("{scope}", &scope_phrase(filter))
}

/// Renders a ground truth for the filter against the metadata.
///
/// Verbose style: fixed preamble, one sentence per zone with a nonzero count
/// (canonical zone order), and a closing total whose zone numbers always sum
/// to it.
pub fn render_ground_truths(
    filter: &Filter,
    metadata: &SceneMetadata,
    style: GroundTruthStyle,
    templates: &TemplateSet,
) -> String {
    let count = filter.count_in(metadata);
    match style {
        GroundTruthStyle::Numeric => count.to_string(),
        GroundTruthStyle::Short => fill_gt(&templates.short_gt, filter, count),
        GroundTruthStyle::Verbose => {
            let mut sentences = vec![templates.verbose_gt.preamble.clone()];
            for zone in Zone::ALL {
                if let Some(f) = filter.zone {
                    if f != zone {
                        continue;
                    }
                }
                let zone_count =
                    metadata.count_matching(filter.shape, filter.color.as_deref(), Some(zone));
                if zone_count == 0 {
                    continue;
                }
                let noun = noun_phrase(
                    &Filter { zone: None, ..filter.clone() },
                    zone_count,
                );
                sentences.push(
                    templates
                        .verbose_gt
                        .zone_sentence
                        .replace("{zone_phrase}", zone.verbose_phrase())
                        .replace("{count}", &zone_count.to_string())
                        .replace("{noun}", &noun),
                );
            }
            sentences.push(fill_gt(&templates.verbose_gt.total_sentence, filter, count));
            sentences.join(" ")
        }
    }
}

/// Picks a near-miss `(shape, color)` filter with zero matches.
///
/// Preferred: a pair where the shape exists in another color and the color
/// exists on another shape. Fallback: an existing shape in a palette color
/// absent from the scene, or an absent shape in an existing color. `None`
/// when no near-miss is constructible.
pub fn make_adversarial(
    metadata: &SceneMetadata,
    palette: &[PaletteColor],
    rng: &mut ChaCha8Rng,
) -> Option<Filter> {
    let shapes = metadata.shapes_present();
    let colors = metadata.colors_present();

    let mut cross: Vec<(Shape, String)> = Vec::new();
    for &shape in &shapes {
        for color in &colors {
            if metadata.count_matching(Some(shape), Some(color), None) == 0 {
                cross.push((shape, color.clone()));
            }
        }
    }
    if let Some((shape, color)) = cross.choose(rng) {
        return Some(Filter { shape: Some(*shape), color: Some(color.clone()), zone: None });
    }

    let mut fallback: Vec<(Shape, String)> = Vec::new();
    for &shape in &shapes {
        for pc in palette {
            if !colors.iter().any(|c| *c == pc.name) {
                fallback.push((shape, pc.name.clone()));
            }
        }
    }
    for shape in Shape::ALL {
        if !shapes.contains(&shape) {
            for color in &colors {
                fallback.push((shape, color.clone()));
            }
        }
    }
    fallback.choose(rng).map(|(shape, color)| Filter {
        shape: Some(*shape),
        color: Some(color.clone()),
        zone: None,
    })
}

/// A question type that could not be generated for an image, and why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedQuestion {
    pub image_ref: String,
    pub question_type: QuestionType,
    pub reason: String,
}

/// Generated items plus the per-type skip log for one image.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QaOutcome {
    pub items: Vec<QAItem>,
    pub skipped: Vec<SkippedQuestion>,
}

/// The deterministic RNG stream for question generation on one view.
pub fn qa_rng(scene: &SceneGraph, view_index: usize) -> ChaCha8Rng {
    util::stream_rng(scene.rng_stream, util::SALT_QA.wrapping_add(view_index as u64))
}

/// Generates one question of each applicable type for a rendered image.
///
/// Filters are sampled from attribute combinations actually present in the
/// scene (adversarial excepted); phrasing is sampled uniformly from the
/// type's templates. Inapplicable types land in the skip log.
pub fn generate_questions(
    metadata: &SceneMetadata,
    scene: &SceneGraph,
    image_ref: &str,
    view_index: usize,
    templates: &TemplateSet,
    palette: &[PaletteColor],
    rng: &mut ChaCha8Rng,
) -> QaOutcome {
    let mut outcome = QaOutcome::default();
    let skip = |outcome: &mut QaOutcome, qtype: QuestionType, reason: &str| {
        outcome.skipped.push(SkippedQuestion {
            image_ref: image_ref.to_string(),
            question_type: qtype,
            reason: reason.to_string(),
        });
    };

    for qtype in QuestionType::ALL {
        let filter = match qtype {
            QuestionType::Color => {
                let colors = metadata.colors_present();
                match colors.choose(rng) {
                    Some(color) => Filter { color: Some(color.clone()), ..Filter::default() },
                    None => {
                        skip(&mut outcome, qtype, "no colors present");
                        continue;
                    }
                }
            }
            QuestionType::Shape => {
                let shapes = metadata.shapes_present();
                match shapes.choose(rng) {
                    Some(&shape) => Filter { shape: Some(shape), ..Filter::default() },
                    None => {
                        skip(&mut outcome, qtype, "no shapes present");
                        continue;
                    }
                }
            }
            QuestionType::Location => {
                let zones = metadata.zones_present();
                match zones.choose(rng) {
                    Some(&zone) => Filter { zone: Some(zone), ..Filter::default() },
                    None => {
                        skip(&mut outcome, qtype, "no occupied zones");
                        continue;
                    }
                }
            }
            QuestionType::Object => Filter::default(),
            QuestionType::Composite => {
                let candidates = composite_candidates(metadata);
                match candidates.choose(rng) {
                    Some(filter) => filter.clone(),
                    None => {
                        skip(&mut outcome, qtype, "no proper attribute conjunction present");
                        continue;
                    }
                }
            }
            QuestionType::Adversarial => match make_adversarial(metadata, palette, rng) {
                Some(filter) => filter,
                None => {
                    skip(&mut outcome, qtype, "no near-miss constructible");
                    continue;
                }
            },
        };

        let eligible: Vec<&String> = templates
            .patterns_for(qtype)
            .iter()
            .filter(|p| pattern_slots(p) == filter.slots())
            .collect();
        let Some(pattern) = eligible.choose(rng) else {
            skip(&mut outcome, qtype, "no template matches the filter slots");
            continue;
        };

        outcome.items.push(QAItem {
            item_id: format!("{}_v{}_{}", scene.scene_id, view_index, qtype.tag()),
            image_ref: image_ref.to_string(),
            question_type: qtype,
            question: instantiate(pattern, &filter),
            numeric_gt: filter.count_in(metadata),
            short_gt: render_ground_truths(&filter, metadata, GroundTruthStyle::Short, templates),
            verbose_gt: render_ground_truths(&filter, metadata, GroundTruthStyle::Verbose, templates),
            filter,
        });
    }
    outcome
}

/// Conjunctions of 2-3 attributes that are present and proper (count strictly
/// below the scene total, so the question is not just the object question in
/// disguise).
fn composite_candidates(metadata: &SceneMetadata) -> Vec<Filter> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for ((shape, color, zone), &n) in &metadata.by_combo {
        if n == 0 {
            continue;
        }
        let variants = [
            Filter { shape: Some(*shape), color: Some(color.clone()), zone: None },
            Filter { shape: Some(*shape), color: None, zone: Some(*zone) },
            Filter { shape: None, color: Some(color.clone()), zone: Some(*zone) },
            Filter { shape: Some(*shape), color: Some(color.clone()), zone: Some(*zone) },
        ];
        for filter in variants {
            let key = format!("{:?}|{:?}|{:?}", filter.shape, filter.color, filter.zone);
            if seen.insert(key) && filter.count_in(metadata) < metadata.total {
                out.push(filter);
            }
        }
    }
    out
}
