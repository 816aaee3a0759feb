//! Runs the four post-processing schemes on a pair of touching cells whose
//! inter-cell ridge only partially separates them, the configuration where
//! threshold-based post-processing under-segments.
//!
//!     cargo run --example separate_touching_cells

use neunseg::schemes::{run_scheme, PipelineConfig, Scheme};
use neunseg::{io, scene};

fn main() {
    let fixture = scene::touching_pair(18, 28);
    println!(
        "two radius-18 cells, centers 28 px apart, ground truth {} instances",
        fixture.instances.distinct_labels().len()
    );

    let out = std::path::Path::new("neunseg-example-out");
    std::fs::create_dir_all(out).unwrap();
    io::write_probability_map(&out.join("touching_probmap.png"), &fixture.probability).unwrap();

    let cfg = PipelineConfig::default();
    for scheme in Scheme::ALL {
        let labels = run_scheme(&fixture.probability, scheme, &cfg);
        let path = out.join(format!("touching_{scheme}.png"));
        io::write_label_map(&path, &labels).unwrap();
        println!(
            "{scheme:>13}: {} instance(s) -> {}",
            labels.distinct_labels().len(),
            path.display()
        );
    }
}
