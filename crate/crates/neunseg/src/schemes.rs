//! Post-processing pipelines turning a probability map into labeled
//! instances: the ultimate-erosion scheme plus three classical comparators.

use std::str::FromStr;

use crate::morph::{
    competitive_expansion, distance_transform, dynamic_reconstruction, local_maxima,
    seeded_watershed, ultimate_erosion, ExpansionSeed, Topography,
};
use crate::probmap::{argmax_class, merged_mask, Channel, PixelClass, ProbabilityMap};
use crate::raster::{connected_components, BinaryMask, Connectivity, LabelMap, Point, StructuringElement};

/// Labeled regions smaller than this are dropped as noise at the end of
/// every pipeline; well below any plausible cell area at the default
/// structuring-element radius.
pub const MIN_OBJECT_AREA: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    /// radius of the disk used for ultimate erosion and reconstruction,
    /// matching the radius of the smallest expected cell
    pub se_radius: u32,
    /// threshold applied to the raw neuron channel by the comparators
    pub ws_threshold: f64,
    /// minimum peak spacing for the distance-transform comparator,
    /// matching the minimum expected cell diameter
    pub min_distance: u32,
    pub connectivity: Connectivity,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            se_radius: 10,
            ws_threshold: 0.5,
            min_distance: 20,
            connectivity: Connectivity::Eight,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.se_radius < 1 {
            return Err("se-radius must be at least 1".into());
        }
        if !(self.ws_threshold > 0.0 && self.ws_threshold < 1.0) {
            return Err("threshold must lie strictly between 0 and 1".into());
        }
        if self.min_distance < 1 {
            return Err("min-distance must be at least 1".into());
        }
        Ok(())
    }
}

/// The four post-processing schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Proposed,
    Baseline,
    Distance,
    ContourStrip,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::Proposed,
        Scheme::Baseline,
        Scheme::Distance,
        Scheme::ContourStrip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::Baseline => "baseline",
            Scheme::Distance => "distance",
            Scheme::ContourStrip => "contour-strip",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "proposed" => Ok(Scheme::Proposed),
            "baseline" => Ok(Scheme::Baseline),
            "distance" => Ok(Scheme::Distance),
            "contour-strip" => Ok(Scheme::ContourStrip),
            other => Err(format!(
                "unknown scheme `{other}` (expected proposed, baseline, distance or contour-strip)"
            )),
        }
    }
}

pub fn run_scheme(pm: &ProbabilityMap, scheme: Scheme, cfg: &PipelineConfig) -> LabelMap {
    match scheme {
        Scheme::Proposed => run_proposed(pm, cfg),
        Scheme::Baseline => run_baseline(pm, cfg),
        Scheme::Distance => run_distance_ws(pm, cfg),
        Scheme::ContourStrip => run_contour_strip(pm, cfg),
    }
}

fn neuron_argmax_mask(pm: &ProbabilityMap) -> BinaryMask {
    let classes = argmax_class(pm);
    let mut i = 0;
    BinaryMask::from_fn(pm.width(), pm.height(), |_, _| {
        let hit = classes.classes()[i] == PixelClass::Neuron;
        i += 1;
        hit
    })
}

fn negated_channel(pm: &ProbabilityMap, channel: Channel) -> Topography {
    let values = pm.channel(channel).iter().map(|&v| -v).collect();
    Topography::new(pm.width(), pm.height(), values)
}

fn remove_small_objects(mut lm: LabelMap, min_area: usize) -> LabelMap {
    let sizes = crate::raster::component_sizes(&lm);
    let (w, h) = (lm.width(), lm.height());
    for y in 0..h {
        for x in 0..w {
            let label = lm.get(x, y);
            if label != 0 && sizes[&label] < min_area {
                lm.set(x, y, 0);
            }
        }
    }
    lm
}

fn clip_to_mask(lm: &LabelMap, mask: &BinaryMask) -> LabelMap {
    let mut out = lm.clone();
    for y in 0..lm.height() {
        for x in 0..lm.width() {
            if !mask.get(x, y) {
                out.set(x, y, 0);
            }
        }
    }
    out
}

/// The ultimate-erosion scheme.
///
/// The argmax neuron mask is ultimately eroded with the configured disk,
/// the residues are re-dilated as many times as they were eroded, and the
/// reconstructed residues seed a watershed over the merged neuron+contour
/// mask with the negated neuron probability as elevation. The merge hands
/// the artificial inter-cell band back to the instances it separates.
pub fn run_proposed(pm: &ProbabilityMap, cfg: &PipelineConfig) -> LabelMap {
    let se = StructuringElement::disk(cfg.se_radius);
    let neuron = neuron_argmax_mask(pm);
    let residues = ultimate_erosion(&neuron, &se, cfg.connectivity);
    let reconstructed = dynamic_reconstruction(&residues, &se, pm.width(), pm.height());
    let mask = merged_mask(pm);
    // reconstruction may overshoot the mask; the residue cores never do
    let markers = clip_to_mask(&reconstructed, &mask);
    let topo = negated_channel(pm, Channel::Neuron);
    let labeled = seeded_watershed(&topo, &markers, &mask, cfg.connectivity)
        .expect("markers are clipped to the mask");
    remove_small_objects(labeled, MIN_OBJECT_AREA)
}

/// Threshold-and-watershed baseline: one basin per connected component of
/// the thresholded neuron channel.
pub fn run_baseline(pm: &ProbabilityMap, cfg: &PipelineConfig) -> LabelMap {
    let neuron = pm.channel(Channel::Neuron);
    let mut i = 0;
    let mask = BinaryMask::from_fn(pm.width(), pm.height(), |_, _| {
        let hit = neuron[i] >= cfg.ws_threshold;
        i += 1;
        hit
    });
    let markers = connected_components(&mask, cfg.connectivity);
    let topo = negated_channel(pm, Channel::Neuron);
    let labeled = seeded_watershed(&topo, &markers, &mask, cfg.connectivity)
        .expect("markers are the mask components");
    remove_small_objects(labeled, MIN_OBJECT_AREA)
}

/// Distance-transform comparator: peaks of the neuron-mask distance map
/// seed a watershed over the merged mask, with the negated distance map as
/// elevation.
pub fn run_distance_ws(pm: &ProbabilityMap, cfg: &PipelineConfig) -> LabelMap {
    let neuron = neuron_argmax_mask(pm);
    let dm = distance_transform(&neuron);
    let peaks = local_maxima(&dm, cfg.min_distance);
    let mut markers = LabelMap::new(pm.width(), pm.height());
    for (i, p) in peaks.iter().enumerate() {
        markers.set(p.x, p.y, i as u32 + 1);
    }
    let mask = merged_mask(pm);
    let mut elevation = Vec::with_capacity(dm.values().len());
    elevation.extend(dm.values().iter().map(|&v| -v));
    let topo = Topography::new(pm.width(), pm.height(), elevation);
    let labeled = seeded_watershed(&topo, &markers, &mask, cfg.connectivity)
        .expect("peaks lie on the neuron mask");
    remove_small_objects(labeled, MIN_OBJECT_AREA)
}

/// Contour-stripping comparator: drops pixels more likely to be contour
/// than neuron, labels what remains and recovers the original extent with
/// one competitive dilation step.
pub fn run_contour_strip(pm: &ProbabilityMap, cfg: &PipelineConfig) -> LabelMap {
    let neuron = pm.channel(Channel::Neuron);
    let contour = pm.channel(Channel::Contour);
    let mut i = 0;
    let mask = BinaryMask::from_fn(pm.width(), pm.height(), |_, _| {
        let hit = neuron[i] > contour[i] && neuron[i] >= cfg.ws_threshold;
        i += 1;
        hit
    });
    let components = connected_components(&mask, cfg.connectivity);
    let se = StructuringElement::disk(cfg.se_radius);
    let mut pixels: Vec<Vec<Point>> = vec![Vec::new(); components.max_label() as usize + 1];
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            let label = components.get(x, y);
            if label != 0 {
                pixels[label as usize].push(Point::new(x, y));
            }
        }
    }
    let seeds: Vec<ExpansionSeed> = pixels
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(label, pixels)| ExpansionSeed { label: label as u32, pixels, steps: 1 })
        .collect();
    let labeled = competitive_expansion(pm.width(), pm.height(), &seeds, se.offsets(), None);
    remove_small_objects(labeled, MIN_OBJECT_AREA)
}
