//! Evaluation metrics (detection, counting, pixel- and instance-level
//! segmentation) and the training-loss functions, all as standalone
//! oracle-testable routines.

use std::collections::BTreeMap;

use crate::probmap::{Channel, ClassMap, PixelClass, ProbabilityMap};
use crate::raster::{BinaryMask, LabelMap, Point};

/// Probabilities are clamped to `[PROB_CLAMP, 1]` before logarithms.
pub const PROB_CLAMP: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("raster dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
    #[error("relative count error is undefined without annotated centroids")]
    UndefinedRce,
    #[error("aggregated Jaccard index needs at least one ground-truth object")]
    EmptyGroundTruth,
}

fn check_dims(
    (w1, h1): (u32, u32),
    (w2, h2): (u32, u32),
) -> Result<(), MetricError> {
    if (w1, h1) == (w2, h2) {
        Ok(())
    } else {
        Err(MetricError::DimensionMismatch(w1, h1, w2, h2))
    }
}

/// Object-level detection tally. `tp + false_negatives` always equals the
/// number of annotated centroids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectionCounts {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

/// Matches predicted objects against centroid annotations.
///
/// A predicted object superimposed with exactly one centroid is a true
/// positive. An object with no centroid is a false positive. A centroid on
/// background counts one false negative, as does every centroid inside an
/// object covering two or more centroids.
pub fn match_detections(pred: &LabelMap, centroids: &[Point]) -> DetectionCounts {
    let mut per_object: BTreeMap<u32, usize> = BTreeMap::new();
    for label in pred.distinct_labels() {
        per_object.insert(label, 0);
    }
    let mut on_background = 0usize;
    for p in centroids {
        let label = pred.get(p.x, p.y);
        if label == 0 {
            on_background += 1;
        } else {
            *per_object.get_mut(&label).expect("label exists") += 1;
        }
    }
    let mut tp = 0;
    let mut fp = 0;
    let mut fn_ = on_background;
    for &hits in per_object.values() {
        match hits {
            0 => fp += 1,
            1 => tp += 1,
            n => fn_ += n,
        }
    }
    DetectionCounts {
        true_positives: tp,
        false_positives: fp,
        false_negatives: fn_,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionRecall {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// P = TP/(TP+FP), R = TP/(TP+FN), F1 = 2PR/(P+R); ratios with a zero
/// denominator are defined as 0.
pub fn precision_recall_f1(counts: &DetectionCounts) -> PrecisionRecall {
    let tp = counts.true_positives as f64;
    let precision = if counts.true_positives + counts.false_positives == 0 {
        0.0
    } else {
        tp / (counts.true_positives + counts.false_positives) as f64
    };
    let recall = if counts.true_positives + counts.false_negatives == 0 {
        0.0
    } else {
        tp / (counts.true_positives + counts.false_negatives) as f64
    };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    PrecisionRecall { precision, recall, f1 }
}

/// Relative count error |FP − FN| / (TP + FN).
pub fn rce(counts: &DetectionCounts) -> Result<f64, MetricError> {
    let annotated = counts.true_positives + counts.false_negatives;
    if annotated == 0 {
        return Err(MetricError::UndefinedRce);
    }
    let diff = counts.false_positives.abs_diff(counts.false_negatives);
    Ok(diff as f64 / annotated as f64)
}

/// Dice coefficient 2|A∩B| / (|A|+|B|); 1 when both masks are empty.
pub fn dice(pred: &BinaryMask, gt: &BinaryMask) -> Result<f64, MetricError> {
    check_dims((pred.width(), pred.height()), (gt.width(), gt.height()))?;
    let mut inter = 0usize;
    let mut a = 0usize;
    let mut b = 0usize;
    for (pa, pb) in pred.bits().iter().zip(gt.bits()) {
        a += usize::from(*pa);
        b += usize::from(*pb);
        inter += usize::from(*pa && *pb);
    }
    if a + b == 0 {
        return Ok(1.0);
    }
    Ok(2.0 * inter as f64 / (a + b) as f64)
}

struct ObjectTables {
    gt_labels: Vec<u32>,
    pred_labels: Vec<u32>,
    gt_area: BTreeMap<u32, u64>,
    pred_area: BTreeMap<u32, u64>,
    inter: BTreeMap<(u32, u32), u64>,
}

fn object_tables(pred: &LabelMap, gt: &LabelMap) -> ObjectTables {
    let mut gt_area = BTreeMap::new();
    let mut pred_area = BTreeMap::new();
    let mut inter = BTreeMap::new();
    for (&g, &p) in gt.labels().iter().zip(pred.labels()) {
        if g != 0 {
            *gt_area.entry(g).or_insert(0u64) += 1;
        }
        if p != 0 {
            *pred_area.entry(p).or_insert(0u64) += 1;
        }
        if g != 0 && p != 0 {
            *inter.entry((g, p)).or_insert(0u64) += 1;
        }
    }
    ObjectTables {
        gt_labels: gt_area.keys().copied().collect(),
        pred_labels: pred_area.keys().copied().collect(),
        gt_area,
        pred_area,
        inter,
    }
}

// IoU comparison without floating point: a1/b1 > a2/b2 as a1*b2 > a2*b1.
fn iou_greater((a1, b1): (u64, u64), (a2, b2): (u64, u64)) -> bool {
    (a1 as u128) * (b2 as u128) > (a2 as u128) * (b1 as u128)
}

/// Instance-level F1: each ground-truth object is matched to the prediction
/// maximizing IoU (ties to the lower label); a pair counts as a true
/// positive iff its IoU exceeds the threshold and the prediction is still
/// unconsumed. Unmatched predictions are false positives, unmatched ground
/// truths false negatives.
pub fn f1_seg(
    pred: &LabelMap,
    gt: &LabelMap,
    iou_threshold: f64,
) -> Result<PrecisionRecall, MetricError> {
    check_dims((pred.width(), pred.height()), (gt.width(), gt.height()))?;
    let tables = object_tables(pred, gt);
    let mut consumed: std::collections::HashSet<u32> = Default::default();
    let mut tp = 0usize;
    for &g in &tables.gt_labels {
        let g_area = tables.gt_area[&g];
        let mut best: Option<(u32, (u64, u64))> = None;
        for &p in &tables.pred_labels {
            let inter = tables.inter.get(&(g, p)).copied().unwrap_or(0);
            let union = g_area + tables.pred_area[&p] - inter;
            match best {
                None => best = Some((p, (inter, union))),
                Some((_, cur)) => {
                    if iou_greater((inter, union), cur) {
                        best = Some((p, (inter, union)));
                    }
                }
            }
        }
        if let Some((p, (inter, union))) = best {
            if inter as f64 > iou_threshold * union as f64 && !consumed.contains(&p) {
                consumed.insert(p);
                tp += 1;
            }
        }
    }
    let counts = DetectionCounts {
        true_positives: tp,
        false_positives: tables.pred_labels.len() - tp,
        false_negatives: tables.gt_labels.len() - tp,
    };
    Ok(precision_recall_f1(&counts))
}

/// Aggregated Jaccard Index.
///
/// Ground-truth objects claim predictions in label order; each takes the
/// unassigned overlapping prediction maximizing IoU (ties to the lower
/// label). A ground truth left without an overlapping unassigned prediction
/// contributes an empty intersection and its own area to the union.
/// Predictions never assigned are added to the denominator.
pub fn aji(pred: &LabelMap, gt: &LabelMap) -> Result<f64, MetricError> {
    check_dims((pred.width(), pred.height()), (gt.width(), gt.height()))?;
    let tables = object_tables(pred, gt);
    if tables.gt_labels.is_empty() {
        return Err(MetricError::EmptyGroundTruth);
    }
    let mut unassigned: Vec<u32> = tables.pred_labels.clone();
    let mut numerator = 0u64;
    let mut denominator = 0u64;
    for &g in &tables.gt_labels {
        let g_area = tables.gt_area[&g];
        let mut best: Option<(usize, (u64, u64))> = None;
        for (i, &p) in unassigned.iter().enumerate() {
            let inter = tables.inter.get(&(g, p)).copied().unwrap_or(0);
            if inter == 0 {
                continue;
            }
            let union = g_area + tables.pred_area[&p] - inter;
            match best {
                None => best = Some((i, (inter, union))),
                Some((_, cur)) => {
                    if iou_greater((inter, union), cur) {
                        best = Some((i, (inter, union)));
                    }
                }
            }
        }
        match best {
            Some((i, (inter, union))) => {
                numerator += inter;
                denominator += union;
                unassigned.remove(i);
            }
            None => {
                denominator += g_area;
            }
        }
    }
    for &p in &unassigned {
        denominator += tables.pred_area[&p];
    }
    Ok(numerator as f64 / denominator as f64)
}

/// Weights of the compound training loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub cross_entropy: f64,
    pub dice_neuron: f64,
    pub dice_contour: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self { cross_entropy: 0.5, dice_neuron: 0.3, dice_contour: 0.2 }
    }
}

/// Categorical cross-entropy −(1/nc) Σ t·log p over c = 3 classes, with the
/// probability of the true class clamped before the logarithm.
pub fn cross_entropy(pred: &ProbabilityMap, gt: &ClassMap) -> Result<f64, MetricError> {
    check_dims((pred.width(), pred.height()), (gt.width(), gt.height()))?;
    let n = gt.classes().len();
    let mut total = 0.0f64;
    for (i, class) in gt.classes().iter().enumerate() {
        let p = pred.channel(match class {
            PixelClass::Background => Channel::Background,
            PixelClass::Contour => Channel::Contour,
            PixelClass::Neuron => Channel::Neuron,
        })[i];
        total -= p.clamp(PROB_CLAMP, 1.0).ln();
    }
    Ok(total / (n as f64 * 3.0))
}

/// Soft dice loss 1 − (2Σt·p + 1)/(Σt + Σp + 1) of one predicted channel
/// against a binary target; the +1 smoothing keeps it defined on empty
/// inputs.
pub fn soft_dice(
    pred: &ProbabilityMap,
    channel: Channel,
    gt: &BinaryMask,
) -> Result<f64, MetricError> {
    check_dims((pred.width(), pred.height()), (gt.width(), gt.height()))?;
    let plane = pred.channel(channel);
    let mut tp_sum = 0.0f64;
    let mut t_sum = 0.0f64;
    let mut p_sum = 0.0f64;
    for (i, &t) in gt.bits().iter().enumerate() {
        let p = plane[i];
        if t {
            t_sum += 1.0;
            tp_sum += p;
        }
        p_sum += p;
    }
    Ok(1.0 - (2.0 * tp_sum + 1.0) / (t_sum + p_sum + 1.0))
}

/// Compound loss w_ce·CE + w_n·D_neuron + w_c·D_contour.
pub fn compound_loss(
    pred: &ProbabilityMap,
    gt: &ClassMap,
    weights: &LossWeights,
) -> Result<f64, MetricError> {
    let sum = weights.cross_entropy + weights.dice_neuron + weights.dice_contour;
    assert!((sum - 1.0).abs() <= 1e-9, "loss weights must sum to 1");
    let ce = cross_entropy(pred, gt)?;
    let d_neuron = soft_dice(pred, Channel::Neuron, &gt.class_mask(PixelClass::Neuron))?;
    let d_contour = soft_dice(pred, Channel::Contour, &gt.class_mask(PixelClass::Contour))?;
    Ok(weights.cross_entropy * ce + weights.dice_neuron * d_neuron + weights.dice_contour * d_contour)
}

/// Full per-image metric row as reported by the evaluation driver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageMetrics {
    pub f1_det: f64,
    pub precision: f64,
    pub recall: f64,
    pub rce: f64,
    pub dice: f64,
    pub f1_seg: f64,
    pub aji: f64,
}

pub fn evaluate_instances(
    pred: &LabelMap,
    gt: &LabelMap,
    centroids: &[Point],
) -> Result<ImageMetrics, MetricError> {
    let counts = match_detections(pred, centroids);
    let det = precision_recall_f1(&counts);
    let rce = rce(&counts)?;
    let dice = dice(&pred.foreground(), &gt.foreground())?;
    let seg = f1_seg(pred, gt, 0.5)?;
    let aji = aji(pred, gt)?;
    Ok(ImageMetrics {
        f1_det: det.f1,
        precision: det.precision,
        recall: det.recall,
        rce,
        dice,
        f1_seg: seg.f1,
        aji,
    })
}
