//! Dataset assembly: per-image question budgets, answer-class balancing,
//! scene-disjoint test splits, JSONL manifests, and statistics.
//!
//! Manifests are line-delimited JSON, one [`QAItem`] per line, with a
//! `<name>.meta.json` sidecar carrying the split label and provenance
//! (config hash, seed, tool version). Balancing only ever subsamples;
//! shortfalls are reported, never padded by duplication.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Shape;
use crate::qa::{QAItem, QuestionType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
}

/// Where a manifest came from, for reproducibility audits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub tool_version: String,
}

impl Provenance {
    pub fn new(config_hash: impl Into<String>, seed: u64) -> Provenance {
        Provenance {
            config_hash: config_hash.into(),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn unknown() -> Provenance {
        Provenance::new("unknown", 0)
    }
}

/// An ordered collection of QA items with split label and provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub items: Vec<QAItem>,
    pub split: Split,
    pub provenance: Provenance,
}

impl DatasetManifest {
    pub fn new(items: Vec<QAItem>, split: Split, provenance: Provenance) -> DatasetManifest {
        DatasetManifest { items, split, provenance }
    }

    /// Histogram of `numeric_gt` over the items.
    pub fn histogram(&self) -> BTreeMap<u32, u32> {
        let mut hist = BTreeMap::new();
        for item in &self.items {
            *hist.entry(item.numeric_gt).or_insert(0) += 1;
        }
        hist
    }

    /// Exact recount statistics, printable as an aligned table.
    pub fn stats(&self) -> DatasetStats {
        let mut per_type = BTreeMap::new();
        let mut per_shape = BTreeMap::new();
        for item in &self.items {
            *per_type.entry(item.question_type).or_insert(0) += 1;
            if let Some(shape) = item.filter.shape {
                *per_shape.entry(shape).or_insert(0) += 1;
            }
        }
        DatasetStats {
            total: self.items.len() as u32,
            histogram: self.histogram(),
            per_type,
            per_shape,
        }
    }
}

/// Recounted manifest statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub total: u32,
    pub histogram: BTreeMap<u32, u32>,
    pub per_type: BTreeMap<QuestionType, u32>,
    pub per_shape: BTreeMap<Shape, u32>,
}

impl std::fmt::Display for DatasetStats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "items: {}", self.total)?;
        writeln!(f, "answer histogram:")?;
        writeln!(f, "  {:>6}  {:>8}", "answer", "items")?;
        for (gt, n) in &self.histogram {
            writeln!(f, "  {gt:>6}  {n:>8}")?;
        }
        writeln!(f, "question types:")?;
        for (qtype, n) in &self.per_type {
            writeln!(f, "  {qtype:>12}  {n:>8}")?;
        }
        if !self.per_shape.is_empty() {
            writeln!(f, "shape filters:")?;
            for (shape, n) in &self.per_shape {
                writeln!(f, "  {shape:>12}  {n:>8}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("I/O error on `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest schema error at {path}:{line}: {message}")]
    Schema { path: PathBuf, line: usize, message: String },
    #[error("test split needs {need} items of answer class {class}, found only {have}")]
    SplitShortfall { class: u32, have: u32, need: u32 },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io { path: path.to_path_buf(), source }
}

/// Options for [`assemble`].
#[derive(Debug, Clone)]
pub struct AssembleOptions {
    /// Maximum questions kept per image.
    pub per_image_budget: usize,
    /// Probability of keeping an adversarial item before budgeting.
    pub adversarial_keep_probability: f64,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        AssembleOptions { per_image_budget: 4, adversarial_keep_probability: 1.0 }
    }
}

/// Budgets raw QA items into a manifest.
///
/// Per image: duplicates (same question text) are dropped, adversarial items
/// survive with the configured probability, and at most `per_image_budget`
/// items remain, chosen to keep question-type diversity first.
pub fn assemble(
    items: Vec<QAItem>,
    opts: &AssembleOptions,
    rng: &mut ChaCha8Rng,
    provenance: Provenance,
) -> DatasetManifest {
    let mut by_image: BTreeMap<String, Vec<QAItem>> = BTreeMap::new();
    for item in items {
        by_image.entry(item.image_ref.clone()).or_default().push(item);
    }

    let mut kept = Vec::new();
    for (_, image_items) in by_image {
        let mut seen_questions = BTreeSet::new();
        let mut seen_ids = BTreeSet::new();
        let mut candidates = Vec::new();
        for item in image_items {
            if !seen_questions.insert(item.question.clone()) || !seen_ids.insert(item.item_id.clone()) {
                continue;
            }
            if item.question_type == QuestionType::Adversarial
                && opts.adversarial_keep_probability < 1.0
                && !rng.gen_bool(opts.adversarial_keep_probability.clamp(0.0, 1.0))
            {
                continue;
            }
            candidates.push(item);
        }

        if candidates.len() <= opts.per_image_budget {
            kept.extend(candidates);
            continue;
        }

        let mut order: Vec<usize> = (0..candidates.len()).collect();
        order.shuffle(rng);
        let mut selected: Vec<usize> = Vec::with_capacity(opts.per_image_budget);
        let mut seen_types = BTreeSet::new();
        for &i in &order {
            if selected.len() == opts.per_image_budget {
                break;
            }
            if seen_types.insert(candidates[i].question_type) {
                selected.push(i);
            }
        }
        for &i in &order {
            if selected.len() == opts.per_image_budget {
                break;
            }
            if !selected.contains(&i) {
                selected.push(i);
            }
        }
        let mut chosen: Vec<QAItem> = selected.into_iter().map(|i| candidates[i].clone()).collect();
        chosen.sort_by(|a, b| a.item_id.cmp(&b.item_id));
        kept.extend(chosen);
    }

    kept.sort_by(|a, b| a.item_id.cmp(&b.item_id));
    DatasetManifest::new(kept, Split::Train, provenance)
}

/// Target item count per answer class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalanceProfile {
    pub targets: BTreeMap<u32, u32>,
}

impl BalanceProfile {
    /// The shipped training-distribution targets: classes 0-5 at 3,100 each,
    /// then a decaying tail out to class 15.
    pub fn default_training() -> BalanceProfile {
        let mut targets = BTreeMap::new();
        for class in 0..=5 {
            targets.insert(class, 3_100);
        }
        for (class, n) in [
            (6u32, 2_277u32),
            (7, 1_358),
            (8, 842),
            (9, 545),
            (10, 479),
            (11, 470),
            (12, 441),
            (13, 442),
            (14, 453),
            (15, 445),
        ] {
            targets.insert(class, n);
        }
        BalanceProfile { targets }
    }

    pub fn target_for(&self, class: u32) -> Option<u32> {
        self.targets.get(&class).copied()
    }
}

/// Classes that could not reach their balance target.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BalanceReport {
    /// class -> missing item count.
    pub shortfalls: BTreeMap<u32, u32>,
}

/// Subsamples each over-supplied answer class down to its target.
///
/// Under-supplied classes keep everything and report the shortfall; classes
/// without a target are untouched. Output is always a subset of the input.
pub fn balance(
    manifest: &DatasetManifest,
    profile: &BalanceProfile,
    rng: &mut ChaCha8Rng,
) -> (DatasetManifest, BalanceReport) {
    let mut by_class: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, item) in manifest.items.iter().enumerate() {
        by_class.entry(item.numeric_gt).or_default().push(i);
    }

    let mut report = BalanceReport::default();
    let mut retained: Vec<usize> = Vec::new();
    for (class, indices) in by_class {
        match profile.target_for(class) {
            Some(target) if indices.len() as u32 > target => {
                let mut pool = indices;
                pool.shuffle(rng);
                pool.truncate(target as usize);
                retained.extend(pool);
            }
            Some(target) => {
                if (indices.len() as u32) < target {
                    report.shortfalls.insert(class, target - indices.len() as u32);
                }
                retained.extend(indices);
            }
            None => retained.extend(indices),
        }
    }

    retained.sort_unstable();
    let items: Vec<QAItem> = retained.into_iter().map(|i| manifest.items[i].clone()).collect();
    (
        DatasetManifest::new(items, manifest.split, manifest.provenance.clone()),
        report,
    )
}

/// The scene an image belongs to, from its relative path
/// (`scene_00012/view3.png` -> `scene_00012`).
pub fn scene_key(image_ref: &str) -> String {
    Path::new(image_ref)
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(|p| p.to_string_lossy().into_owned())
        .unwrap_or_else(|| image_ref.to_string())
}

/// Draws a test split with exactly `per_class` items for every answer class
/// in `classes`, disjoint from the remaining pool at scene granularity.
///
/// Scenes are visited in random order; a scene that contributes any test
/// item has its remaining items discarded so no scene straddles the split.
pub fn build_test_split(
    pool: &DatasetManifest,
    classes: RangeInclusive<u32>,
    per_class: u32,
    rng: &mut ChaCha8Rng,
) -> Result<(DatasetManifest, DatasetManifest), DatasetError> {
    let mut scenes: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, item) in pool.items.iter().enumerate() {
        scenes.entry(scene_key(&item.image_ref)).or_default().push(i);
    }
    let mut scene_order: Vec<String> = scenes.keys().cloned().collect();
    scene_order.shuffle(rng);

    let mut needed: BTreeMap<u32, u32> = classes.clone().map(|c| (c, per_class)).collect();
    let mut test_indices = Vec::new();
    let mut remaining_indices = Vec::new();
    for scene in scene_order {
        let members = &scenes[&scene];
        let mut picked = Vec::new();
        for &i in members {
            let class = pool.items[i].numeric_gt;
            if let Some(n) = needed.get_mut(&class) {
                if *n > 0 {
                    *n -= 1;
                    picked.push(i);
                }
            }
        }
        if picked.is_empty() {
            remaining_indices.extend(members.iter().copied());
        } else {
            // Scene joins the test side; its unpicked items are dropped to
            // keep the split scene-disjoint.
            test_indices.extend(picked);
        }
    }

    if let Some((&class, &missing)) = needed.iter().find(|(_, &m)| m > 0) {
        return Err(DatasetError::SplitShortfall {
            class,
            have: per_class - missing,
            need: per_class,
        });
    }

    test_indices.sort_unstable();
    remaining_indices.sort_unstable();
    let test_items: Vec<QAItem> = test_indices.into_iter().map(|i| pool.items[i].clone()).collect();
    let remaining_items: Vec<QAItem> =
        remaining_indices.into_iter().map(|i| pool.items[i].clone()).collect();
    Ok((
        DatasetManifest::new(test_items, Split::Test, pool.provenance.clone()),
        DatasetManifest::new(remaining_items, pool.split, pool.provenance.clone()),
    ))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ManifestMeta {
    split: Split,
    provenance: Provenance,
}

/// The `<name>.meta.json` sidecar path for a manifest path.
pub fn meta_path_for(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

/// Writes the manifest as JSONL (one item per line) plus its meta sidecar.
pub fn write_manifest(manifest: &DatasetManifest, path: &Path) -> Result<(), DatasetError> {
    let file = std::fs::File::create(path).map_err(io_err(path))?;
    let mut writer = BufWriter::new(file);
    for item in &manifest.items {
        let line = serde_json::to_string(item).expect("QAItem serializes");
        writeln!(writer, "{line}").map_err(io_err(path))?;
    }
    writer.flush().map_err(io_err(path))?;

    let meta = ManifestMeta { split: manifest.split, provenance: manifest.provenance.clone() };
    let meta_path = meta_path_for(path);
    std::fs::write(
        &meta_path,
        serde_json::to_string_pretty(&meta).expect("meta serializes"),
    )
    .map_err(io_err(&meta_path))?;
    Ok(())
}

/// Reads a JSONL manifest, with schema errors tagged by line number. A
/// missing meta sidecar yields train/unknown provenance.
pub fn read_manifest(path: &Path) -> Result<DatasetManifest, DatasetError> {
    let file = std::fs::File::open(path).map_err(io_err(path))?;
    let reader = BufReader::new(file);
    let mut items = Vec::new();
    let mut ids = BTreeSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let item: QAItem = serde_json::from_str(&line).map_err(|e| DatasetError::Schema {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        if !ids.insert(item.item_id.clone()) {
            return Err(DatasetError::Schema {
                path: path.to_path_buf(),
                line: i + 1,
                message: format!("duplicate item_id `{}`", item.item_id),
            });
        }
        items.push(item);
    }

    let meta_path = meta_path_for(path);
    let meta = match std::fs::read_to_string(&meta_path) {
        Ok(text) => serde_json::from_str::<ManifestMeta>(&text).map_err(|e| DatasetError::Schema {
            path: meta_path.clone(),
            line: 1,
            message: e.to_string(),
        })?,
        Err(_) => ManifestMeta { split: Split::Train, provenance: Provenance::unknown() },
    };
    Ok(DatasetManifest::new(items, meta.split, meta.provenance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qa::Filter;
    use rand_chacha::rand_core::SeedableRng;

    fn test_item(id: &str, image: &str, gt: u32, qtype: QuestionType) -> QAItem {
        QAItem {
            item_id: id.to_string(),
            image_ref: image.to_string(),
            question_type: qtype,
            question: format!("How many things ({id})?"),
            numeric_gt: gt,
            short_gt: format!("There are {gt} things in the image."),
            verbose_gt: format!("Let's analyze the scene! In total there are {gt} things in the image!"),
            filter: Filter::default(),
        }
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(99)
    }

    #[test]
    fn budget_keeps_type_diversity() {
        let types = QuestionType::ALL;
        let items: Vec<QAItem> = (0..6)
            .map(|i| test_item(&format!("img0_{i}"), "s/view0.png", i, types[i as usize % 6]))
            .collect();
        let manifest = assemble(items, &AssembleOptions::default(), &mut rng(), Provenance::unknown());
        assert_eq!(manifest.items.len(), 4);
        let distinct: BTreeSet<QuestionType> =
            manifest.items.iter().map(|i| i.question_type).collect();
        assert!(distinct.len() >= 3, "only {} distinct types", distinct.len());
    }

    #[test]
    fn empty_input_gives_empty_manifest() {
        let manifest = assemble(vec![], &AssembleOptions::default(), &mut rng(), Provenance::unknown());
        assert!(manifest.items.is_empty());
        assert!(manifest.histogram().is_empty());
    }

    #[test]
    fn duplicate_questions_are_dropped() {
        let mut a = test_item("a", "s/view0.png", 1, QuestionType::Shape);
        let mut b = test_item("b", "s/view0.png", 1, QuestionType::Shape);
        a.question = "How many cones?".to_string();
        b.question = "How many cones?".to_string();
        let manifest = assemble(vec![a, b], &AssembleOptions::default(), &mut rng(), Provenance::unknown());
        assert_eq!(manifest.items.len(), 1);
    }

    #[test]
    fn budget_bound_holds_per_image() {
        let mut items = Vec::new();
        for img in 0..10 {
            for t in 0..6 {
                items.push(test_item(
                    &format!("i{img}_{t}"),
                    &format!("scene_{img}/view0.png"),
                    t,
                    QuestionType::ALL[t as usize],
                ));
            }
        }
        let manifest = assemble(items, &AssembleOptions::default(), &mut rng(), Provenance::unknown());
        assert_eq!(manifest.items.len(), 40);
    }

    #[test]
    fn default_profile_matches_training_distribution() {
        let profile = BalanceProfile::default_training();
        for class in 0..=5 {
            assert_eq!(profile.target_for(class), Some(3_100));
        }
        assert_eq!(profile.target_for(6), Some(2_277));
        assert_eq!(profile.target_for(7), Some(1_358));
        assert_eq!(profile.target_for(8), Some(842));
        assert_eq!(profile.target_for(9), Some(545));
        assert_eq!(profile.target_for(10), Some(479));
        assert_eq!(profile.target_for(11), Some(470));
        assert_eq!(profile.target_for(12), Some(441));
        assert_eq!(profile.target_for(13), Some(442));
        assert_eq!(profile.target_for(14), Some(453));
        assert_eq!(profile.target_for(15), Some(445));
        assert_eq!(profile.target_for(16), None);
    }

    #[test]
    fn oversupply_is_truncated_exactly() {
        let items: Vec<QAItem> = (0..5000)
            .map(|i| test_item(&format!("x{i}"), &format!("s{i}/v.png"), 5, QuestionType::Object))
            .collect();
        let manifest = DatasetManifest::new(items, Split::Train, Provenance::unknown());
        let (balanced, report) = balance(&manifest, &BalanceProfile::default_training(), &mut rng());
        assert_eq!(balanced.items.len(), 3_100);
        assert!(report.shortfalls.is_empty());
    }

    #[test]
    fn undersupply_keeps_all_and_reports_shortfall() {
        let items: Vec<QAItem> = (0..200)
            .map(|i| test_item(&format!("x{i}"), &format!("s{i}/v.png"), 15, QuestionType::Object))
            .collect();
        let manifest = DatasetManifest::new(items, Split::Train, Provenance::unknown());
        let (balanced, report) = balance(&manifest, &BalanceProfile::default_training(), &mut rng());
        assert_eq!(balanced.items.len(), 200);
        assert_eq!(report.shortfalls.get(&15), Some(&245));
    }

    #[test]
    fn balanced_histogram_is_class_wise_min_of_supply_and_target() {
        let mut items = Vec::new();
        let mut k = 0;
        for (class, supply) in [(0u32, 10u32), (6, 3000), (9, 100)] {
            for _ in 0..supply {
                items.push(test_item(&format!("i{k}"), &format!("s{k}/v.png"), class, QuestionType::Object));
                k += 1;
            }
        }
        let manifest = DatasetManifest::new(items, Split::Train, Provenance::unknown());
        let profile = BalanceProfile::default_training();
        let (balanced, _) = balance(&manifest, &profile, &mut rng());
        let hist = balanced.histogram();
        assert_eq!(hist.get(&0), Some(&10));
        assert_eq!(hist.get(&6), Some(&2_277));
        assert_eq!(hist.get(&9), Some(&100));
        // Subsampling only: every retained item existed in the input.
        for item in &balanced.items {
            assert!(manifest.items.contains(item));
        }
    }

    fn pool_with(classes: RangeInclusive<u32>, per_class: u32, scenes_per_class: u32) -> DatasetManifest {
        let mut items = Vec::new();
        for class in classes {
            for j in 0..per_class {
                let scene = format!("scene_{class}_{}", j % scenes_per_class);
                items.push(test_item(
                    &format!("c{class}_{j}"),
                    &format!("{scene}/view0.png"),
                    class,
                    QuestionType::Object,
                ));
            }
        }
        DatasetManifest::new(items, Split::Train, Provenance::unknown())
    }

    #[test]
    fn split_yields_exact_class_counts() {
        let pool = pool_with(0..=15, 50, 25);
        let (test, train) = build_test_split(&pool, 0..=15, 31, &mut rng()).unwrap();
        assert_eq!(test.items.len(), 496);
        let hist = test.histogram();
        for class in 0..=15 {
            assert_eq!(hist.get(&class), Some(&31), "class {class}");
        }
        assert_eq!(test.split, Split::Test);

        // Scene-disjointness.
        let test_scenes: BTreeSet<String> =
            test.items.iter().map(|i| scene_key(&i.image_ref)).collect();
        for item in &train.items {
            assert!(
                !test_scenes.contains(&scene_key(&item.image_ref)),
                "scene leaked across the split"
            );
        }
    }

    #[test]
    fn zero_per_class_gives_empty_test_set() {
        let pool = pool_with(0..=3, 5, 5);
        let (test, train) = build_test_split(&pool, 0..=3, 0, &mut rng()).unwrap();
        assert!(test.items.is_empty());
        assert_eq!(train.items.len(), pool.items.len());
    }

    #[test]
    fn insufficient_class_population_names_the_class() {
        let mut pool = pool_with(0..=14, 40, 10);
        for j in 0..10 {
            pool.items.push(test_item(
                &format!("c15_{j}"),
                &format!("scene_15_{j}/view0.png"),
                15,
                QuestionType::Object,
            ));
        }
        let err = build_test_split(&pool, 0..=15, 31, &mut rng()).unwrap_err();
        match err {
            DatasetError::SplitShortfall { class, need, .. } => {
                assert_eq!(class, 15);
                assert_eq!(need, 31);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("items.jsonl");
        let manifest = DatasetManifest::new(
            vec![
                test_item("a", "s0/view0.png", 3, QuestionType::Shape),
                test_item("b", "s1/view1.png", 0, QuestionType::Adversarial),
            ],
            Split::Test,
            Provenance::new("deadbeef", 42),
        );
        write_manifest(&manifest, &path).unwrap();
        let back = read_manifest(&path).unwrap();
        assert_eq!(manifest, back);
    }

    #[test]
    fn schema_error_carries_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("broken.jsonl");
        let good = serde_json::to_string(&test_item("a", "s/v.png", 1, QuestionType::Object)).unwrap();
        std::fs::write(&path, format!("{good}\n{{\"item_id\": \"b\"}}\n")).unwrap();
        match read_manifest(&path).unwrap_err() {
            DatasetError::Schema { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn empty_file_reads_as_empty_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.jsonl");
        std::fs::write(&path, "").unwrap();
        let manifest = read_manifest(&path).unwrap();
        assert!(manifest.items.is_empty());
    }

    #[test]
    fn stats_recount() {
        let manifest = DatasetManifest::new(
            vec![
                test_item("a", "s/v.png", 0, QuestionType::Object),
                test_item("b", "s/v.png", 0, QuestionType::Shape),
                test_item("c", "s/v.png", 7, QuestionType::Color),
            ],
            Split::Train,
            Provenance::unknown(),
        );
        let stats = manifest.stats();
        assert_eq!(stats.histogram.get(&0), Some(&2));
        assert_eq!(stats.histogram.get(&7), Some(&1));
        let type_sum: u32 = stats.per_type.values().sum();
        assert_eq!(type_sum, stats.total);
        let table = stats.to_string();
        assert!(table.contains("items: 3"));
    }
}
