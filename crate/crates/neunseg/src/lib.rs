//! Instance segmentation of NeuN-stained neurons from three-class
//! probability maps, with no neural network in the loop.
//!
//! The crate covers the full batch path around a segmentation predictor:
//!
//! * [`synthesis`] builds pixel-level training masks from point annotations
//!   and a binary foreground segmentation (competitive region growing plus
//!   an inter-cell contour class of constant thickness);
//! * [`morph`] provides the binary-morphology kernels: erosion, dilation,
//!   ultimate erosion with residue lineage, dynamic reconstruction, exact
//!   Euclidean distance transform, peak picking and marker-controlled
//!   watershed;
//! * [`schemes`] turns probability maps into labeled instances via the
//!   ultimate-erosion pipeline and three classical comparators;
//! * [`metrics`] scores results (detection F1, relative count error, Dice,
//!   instance F1, aggregated Jaccard index) and verifies the training-loss
//!   arithmetic;
//! * [`tiling`] splits large images into overlapping patches and reassembles
//!   per-patch probability maps with border down-weighting;
//! * [`io`] pins the file formats and [`batch`] drives directories of images;
//! * [`scene`] generates deterministic synthetic fixtures standing in for a
//!   trained predictor.
//!
//! The `examples/` directory holds one runnable walkthrough per capability;
//! the `neunseg` binary exposes the same functionality as subcommands.

pub mod batch;
pub mod io;
pub mod metrics;
pub mod morph;
pub mod probmap;
pub mod raster;
pub mod scene;
pub mod schemes;
pub mod synthesis;
pub mod tiling;

pub use probmap::{ClassMap, PixelClass, ProbabilityMap};
pub use raster::{BinaryMask, Connectivity, LabelMap, Point, StructuringElement};
pub use schemes::{PipelineConfig, Scheme};
