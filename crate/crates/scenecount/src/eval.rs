//! Scoring model predictions against a manifest.
//!
//! Free-text answers are reduced to a count by precedence: the final
//! "In total there are N" phrase if present, otherwise the last standalone
//! integer, otherwise the last English number word zero through twenty.
//! Unparseable answers count as wrong for accuracy but are excluded from
//! RMSE and relative error (both exclusion tallies are reported).

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::DatasetManifest;

/// One model answer for one manifest item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub item_id: String,
    pub raw_answer: String,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("prediction references unknown item_id `{item_id}`")]
    UnknownItem { item_id: String },
    #[error("duplicate prediction for item_id `{item_id}`")]
    DuplicatePrediction { item_id: String },
    #[error("I/O error on `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("predictions schema error at {path}:{line}: {message}")]
    Schema { path: PathBuf, line: usize, message: String },
}

static TOTAL_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\bin total there (?:are|is)\s+(\d+)\b").unwrap());
static INT_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\b\d+\b").unwrap());
static WORD_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?i)\b(zero|one|two|three|four|five|six|seven|eight|nine|ten|eleven|twelve|thirteen|fourteen|fifteen|sixteen|seventeen|eighteen|nineteen|twenty)\b",
    )
    .unwrap()
});

fn word_value(word: &str) -> u32 {
    const WORDS: [&str; 21] = [
        "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
        "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
        "nineteen", "twenty",
    ];
    WORDS
        .iter()
        .position(|w| w.eq_ignore_ascii_case(word))
        .expect("regex only matches known words") as u32
}

/// Extracts a count from free text, or `None` if nothing parses.
pub fn extract_count(raw_answer: &str) -> Option<u32> {
    if let Some(cap) = TOTAL_RE.captures_iter(raw_answer).last() {
        if let Ok(n) = cap[1].parse::<u32>() {
            return Some(n);
        }
    }
    if let Some(n) = INT_RE
        .find_iter(raw_answer)
        .filter_map(|m| m.as_str().parse::<u32>().ok())
        .last()
    {
        return Some(n);
    }
    WORD_RE
        .find_iter(raw_answer)
        .last()
        .map(|m| word_value(m.as_str()))
}

/// `(extracted, ground truth)` pairs for a prediction set, one per record.
fn join<'a>(
    preds: &'a [PredictionRecord],
    manifest: &DatasetManifest,
) -> Result<Vec<(Option<u32>, u32)>, EvalError> {
    let gt_by_id: BTreeMap<&str, u32> = manifest
        .items
        .iter()
        .map(|item| (item.item_id.as_str(), item.numeric_gt))
        .collect();
    let mut seen = std::collections::BTreeSet::new();
    let mut pairs = Vec::with_capacity(preds.len());
    for pred in preds {
        if !seen.insert(pred.item_id.as_str()) {
            return Err(EvalError::DuplicatePrediction { item_id: pred.item_id.clone() });
        }
        let gt = *gt_by_id
            .get(pred.item_id.as_str())
            .ok_or_else(|| EvalError::UnknownItem { item_id: pred.item_id.clone() })?;
        pairs.push((extract_count(&pred.raw_answer), gt));
    }
    Ok(pairs)
}

/// Exact-match fraction; unparseable answers count as wrong. Zero on an
/// empty prediction set.
pub fn accuracy(preds: &[PredictionRecord], manifest: &DatasetManifest) -> Result<f64, EvalError> {
    let pairs = join(preds, manifest)?;
    if pairs.is_empty() {
        return Ok(0.0);
    }
    let correct = pairs.iter().filter(|(p, gt)| *p == Some(*gt)).count();
    Ok(correct as f64 / pairs.len() as f64)
}

/// Root mean squared error over parsed answers; `None` when nothing parsed.
pub fn rmse(preds: &[PredictionRecord], manifest: &DatasetManifest) -> Result<Option<f64>, EvalError> {
    let pairs = join(preds, manifest)?;
    let parsed: Vec<(u32, u32)> = pairs.iter().filter_map(|(p, gt)| p.map(|p| (p, *gt))).collect();
    if parsed.is_empty() {
        return Ok(None);
    }
    let sum_sq: f64 = parsed
        .iter()
        .map(|&(p, gt)| {
            let d = f64::from(p) - f64::from(gt);
            d * d
        })
        .sum();
    Ok(Some((sum_sq / parsed.len() as f64).sqrt()))
}

/// Mean of `|pred - gt| / gt` over parsed answers with `gt > 0`; `None` when
/// no item qualifies. Zero-truth items are excluded and tallied separately.
pub fn relative_error(
    preds: &[PredictionRecord],
    manifest: &DatasetManifest,
) -> Result<(Option<f64>, usize), EvalError> {
    let pairs = join(preds, manifest)?;
    let mut sum = 0.0;
    let mut n = 0usize;
    let mut excluded_zero_gt = 0usize;
    for (p, gt) in pairs {
        let Some(p) = p else { continue };
        if gt == 0 {
            excluded_zero_gt += 1;
            continue;
        }
        sum += (f64::from(p) - f64::from(gt)).abs() / f64::from(gt);
        n += 1;
    }
    Ok((if n > 0 { Some(sum / n as f64) } else { None }, excluded_zero_gt))
}

/// Counts of (true class, predicted class) with one overflow row/column for
/// out-of-range values; unparsed answers land in the overflow column too.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub max_class: u32,
    /// `(max_class + 2) x (max_class + 2)` counts; the last row/column is
    /// overflow (and, for columns, unparsed).
    pub cells: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(max_class: u32) -> ConfusionMatrix {
        let dim = max_class as usize + 2;
        ConfusionMatrix { max_class, cells: vec![vec![0; dim]; dim] }
    }

    fn bucket(&self, value: u32) -> usize {
        if value <= self.max_class {
            value as usize
        } else {
            self.max_class as usize + 1
        }
    }

    pub fn record(&mut self, gt: u32, pred: Option<u32>) {
        let row = self.bucket(gt);
        let col = pred.map_or(self.max_class as usize + 1, |p| self.bucket(p));
        self.cells[row][col] += 1;
    }

    pub fn total_mass(&self) -> u64 {
        self.cells.iter().flatten().sum()
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.cells.iter().map(|row| row.iter().sum()).collect()
    }

    /// Aligned text rendering, rows = ground truth, columns = prediction.
    pub fn to_text_table(&self) -> String {
        let dim = self.max_class as usize + 2;
        let label = |i: usize| {
            if i <= self.max_class as usize {
                i.to_string()
            } else {
                "other".to_string()
            }
        };
        let mut out = String::new();
        out.push_str(&format!("{:>7}", "gt\\pred"));
        for c in 0..dim {
            out.push_str(&format!("{:>7}", label(c)));
        }
        out.push('\n');
        for r in 0..dim {
            out.push_str(&format!("{:>7}", label(r)));
            for c in 0..dim {
                out.push_str(&format!("{:>7}", self.cells[r][c]));
            }
            out.push('\n');
        }
        out
    }
}

/// Builds the confusion matrix for a prediction set.
pub fn confusion_matrix(
    preds: &[PredictionRecord],
    manifest: &DatasetManifest,
    max_class: u32,
) -> Result<ConfusionMatrix, EvalError> {
    let pairs = join(preds, manifest)?;
    let mut matrix = ConfusionMatrix::new(max_class);
    for (p, gt) in pairs {
        matrix.record(gt, p);
    }
    Ok(matrix)
}

/// The full scoring report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n: usize,
    pub accuracy: f64,
    pub rmse: Option<f64>,
    pub mean_relative_error: Option<f64>,
    /// Parsed items skipped by relative error because their truth is zero.
    pub relative_error_excluded_zero_gt: usize,
    pub unparsed_count: usize,
    pub per_class_accuracy: BTreeMap<u32, f64>,
    pub confusion: ConfusionMatrix,
}

impl EvalReport {
    /// Human-readable rendering of the report.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("items scored:        {}\n", self.n));
        out.push_str(&format!("accuracy:            {:.4}\n", self.accuracy));
        match self.rmse {
            Some(v) => out.push_str(&format!("rmse:                {v:.4}\n")),
            None => out.push_str("rmse:                n/a (no parsed answers)\n"),
        }
        match self.mean_relative_error {
            Some(v) => out.push_str(&format!("mean relative error: {v:.4}\n")),
            None => out.push_str("mean relative error: n/a\n"),
        }
        out.push_str(&format!(
            "excluded from relative error (gt = 0): {}\n",
            self.relative_error_excluded_zero_gt
        ));
        out.push_str(&format!("unparsed answers:    {}\n", self.unparsed_count));
        out.push_str("per-class accuracy:\n");
        for (class, acc) in &self.per_class_accuracy {
            out.push_str(&format!("  {class:>4}: {acc:.4}\n"));
        }
        out.push_str("confusion matrix:\n");
        out.push_str(&self.confusion.to_text_table());
        out
    }
}

/// Scores a prediction set: accuracy, RMSE, relative error, per-class
/// accuracy, and the confusion matrix.
pub fn evaluate(
    preds: &[PredictionRecord],
    manifest: &DatasetManifest,
    max_class: u32,
) -> Result<EvalReport, EvalError> {
    let pairs = join(preds, manifest)?;
    let n = pairs.len();
    let correct = pairs.iter().filter(|(p, gt)| *p == Some(*gt)).count();
    let unparsed_count = pairs.iter().filter(|(p, _)| p.is_none()).count();

    let mut per_class_total: BTreeMap<u32, u32> = BTreeMap::new();
    let mut per_class_correct: BTreeMap<u32, u32> = BTreeMap::new();
    let mut matrix = ConfusionMatrix::new(max_class);
    for (p, gt) in &pairs {
        *per_class_total.entry(*gt).or_insert(0) += 1;
        if *p == Some(*gt) {
            *per_class_correct.entry(*gt).or_insert(0) += 1;
        }
        matrix.record(*gt, *p);
    }
    let per_class_accuracy = per_class_total
        .iter()
        .map(|(&class, &total)| {
            let correct = per_class_correct.get(&class).copied().unwrap_or(0);
            (class, f64::from(correct) / f64::from(total))
        })
        .collect();

    let (mean_relative_error, relative_error_excluded_zero_gt) = relative_error(preds, manifest)?;
    Ok(EvalReport {
        n,
        accuracy: if n == 0 { 0.0 } else { correct as f64 / n as f64 },
        rmse: rmse(preds, manifest)?,
        mean_relative_error,
        relative_error_excluded_zero_gt,
        unparsed_count,
        per_class_accuracy,
        confusion: matrix,
    })
}

/// Reads a predictions file: line-delimited JSON `{item_id, raw_answer}`.
pub fn read_predictions(path: &Path) -> Result<Vec<PredictionRecord>, EvalError> {
    let file = std::fs::File::open(path)
        .map_err(|source| EvalError::Io { path: path.to_path_buf(), source })?;
    let reader = BufReader::new(file);
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| EvalError::Io { path: path.to_path_buf(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: PredictionRecord =
            serde_json::from_str(&line).map_err(|e| EvalError::Schema {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })?;
        records.push(record);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{DatasetManifest, Provenance, Split};
    use crate::qa::{Filter, QAItem, QuestionType};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn manifest_of(gts: &[u32]) -> DatasetManifest {
        let items = gts
            .iter()
            .enumerate()
            .map(|(i, &gt)| QAItem {
                item_id: format!("item{i}"),
                image_ref: format!("scene_{i}/view0.png"),
                question_type: QuestionType::Object,
                question: "How many objects are there in the image?".into(),
                numeric_gt: gt,
                short_gt: format!("There are {gt} objects in the image."),
                verbose_gt: format!(
                    "Let's analyze the scene! In total there are {gt} objects in the image!"
                ),
                filter: Filter::default(),
            })
            .collect();
        DatasetManifest::new(items, Split::Test, Provenance::unknown())
    }

    fn preds_of(answers: &[&str]) -> Vec<PredictionRecord> {
        answers
            .iter()
            .enumerate()
            .map(|(i, a)| PredictionRecord { item_id: format!("item{i}"), raw_answer: a.to_string() })
            .collect()
    }

    #[test]
    fn extraction_short_style() {
        assert_eq!(extract_count("There are 6 cones in the image."), Some(6));
    }

    #[test]
    fn extraction_prefers_final_total_phrase() {
        let verbose = "Let's analyze the scene! On top of the table, I can see 2 cones. \
                       On the ground to the right of the table, I can see 3 cones. \
                       On the ground in front of the table, I can see 1 cone. \
                       In total there are 6 cones in the image!";
        assert_eq!(extract_count(verbose), Some(6));
        assert_eq!(extract_count("In total there is 1 cube in the image!"), Some(1));
    }

    #[test]
    fn extraction_falls_back_to_last_integer_then_words() {
        assert_eq!(extract_count("Maybe 4, no wait, 7."), Some(7));
        assert_eq!(extract_count("I count three spheres"), Some(3));
        assert_eq!(extract_count("I see twenty of them"), Some(20));
        assert_eq!(extract_count("I cannot tell."), None);
        // "one" inside a word does not count.
        assert_eq!(extract_count("cones and stones"), None);
    }

    #[test]
    fn rmse_golden() {
        let manifest = manifest_of(&[3, 7]);
        let preds = preds_of(&["5", "5"]);
        assert_eq!(rmse(&preds, &manifest).unwrap(), Some(2.0));
        let perfect = preds_of(&["3", "7"]);
        assert_eq!(rmse(&perfect, &manifest).unwrap(), Some(0.0));
        let single = manifest_of(&[4]);
        assert_eq!(rmse(&preds_of(&["7"]), &single).unwrap(), Some(3.0));
    }

    #[test]
    fn accuracy_goldens() {
        let manifest = manifest_of(&[1, 2, 3, 4]);
        assert_eq!(accuracy(&preds_of(&["1", "2", "3", "4"]), &manifest).unwrap(), 1.0);
        assert_eq!(accuracy(&preds_of(&["2", "3", "4", "5"]), &manifest).unwrap(), 0.0);
        assert_eq!(accuracy(&preds_of(&["1", "2", "0", "0"]), &manifest).unwrap(), 0.5);
    }

    #[test]
    fn relative_error_goldens() {
        let manifest = manifest_of(&[4]);
        let (err, excluded) = relative_error(&preds_of(&["5"]), &manifest).unwrap();
        assert_eq!(err, Some(0.25));
        assert_eq!(excluded, 0);

        let zeros = manifest_of(&[0, 0]);
        let (err, excluded) = relative_error(&preds_of(&["0", "1"]), &zeros).unwrap();
        assert_eq!(err, None);
        assert_eq!(excluded, 2);
    }

    #[test]
    fn unparsed_scores_wrong_but_skips_error_metrics() {
        let manifest = manifest_of(&[2, 2]);
        let preds = preds_of(&["2", "no idea"]);
        let report = evaluate(&preds, &manifest, 15).unwrap();
        assert_eq!(report.accuracy, 0.5);
        assert_eq!(report.unparsed_count, 1);
        assert_eq!(report.rmse, Some(0.0));
    }

    #[test]
    fn confusion_diagonal_for_perfect_predictions() {
        let manifest = manifest_of(&[0, 1, 2, 3]);
        let matrix = confusion_matrix(&preds_of(&["0", "1", "2", "3"]), &manifest, 3).unwrap();
        for r in 0..4 {
            for c in 0..5 {
                let expect = u64::from(r == c);
                assert_eq!(matrix.cells[r][c], expect);
            }
        }
    }

    #[test]
    fn confusion_unparsed_column() {
        let manifest = manifest_of(&[1, 2]);
        let matrix = confusion_matrix(&preds_of(&["nope", "nothing"]), &manifest, 3).unwrap();
        assert_eq!(matrix.cells[1][4], 1);
        assert_eq!(matrix.cells[2][4], 1);
        assert_eq!(matrix.total_mass(), 2);
    }

    #[test]
    fn confusion_row_sums_match_class_counts_on_random_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let gts: Vec<u32> = (0..100).map(|_| rng.gen_range(0..=15)).collect();
        let manifest = manifest_of(&gts);
        let answers: Vec<String> = (0..100)
            .map(|_| {
                if rng.gen_bool(0.1) {
                    "unparseable".to_string()
                } else {
                    rng.gen_range(0..=20u32).to_string()
                }
            })
            .collect();
        let preds: Vec<PredictionRecord> = answers
            .iter()
            .enumerate()
            .map(|(i, a)| PredictionRecord { item_id: format!("item{i}"), raw_answer: a.clone() })
            .collect();
        let matrix = confusion_matrix(&preds, &manifest, 15).unwrap();
        assert_eq!(matrix.total_mass(), 100);
        let sums = matrix.row_sums();
        for class in 0..=15u32 {
            let expected = gts.iter().filter(|&&g| g == class).count() as u64;
            assert_eq!(sums[class as usize], expected, "class {class}");
        }
    }

    #[test]
    fn closed_loop_extraction_recovers_ground_truths() {
        let manifest = manifest_of(&[0, 1, 6, 15]);
        for item in &manifest.items {
            assert_eq!(extract_count(&item.short_gt), Some(item.numeric_gt));
            assert_eq!(extract_count(&item.verbose_gt), Some(item.numeric_gt));
        }
    }

    #[test]
    fn unknown_item_id_is_an_error() {
        let manifest = manifest_of(&[1]);
        let preds = vec![PredictionRecord { item_id: "missing".into(), raw_answer: "1".into() }];
        assert!(matches!(
            accuracy(&preds, &manifest),
            Err(EvalError::UnknownItem { .. })
        ));
    }

    #[test]
    fn predictions_file_round_trip_and_schema_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("preds.jsonl");
        std::fs::write(
            &path,
            "{\"item_id\": \"a\", \"raw_answer\": \"3\"}\n{\"item_id\": \"b\"}\n",
        )
        .unwrap();
        match read_predictions(&path).unwrap_err() {
            EvalError::Schema { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
    }
}
