//! Generates a synthetic scene with touching cell pairs and writes the four
//! fixture files: probability map, instance labels, class mask and centroid
//! annotations.
//!
//!     cargo run --example generate_scene

use neunseg::io;
use neunseg::scene::{generate, SceneParams};

fn main() {
    let params = SceneParams {
        width: 384,
        height: 384,
        cells: 14,
        touching_fraction: 0.4,
        ..Default::default()
    };
    let scene = generate(&params, 7);
    println!(
        "{} cells placed, {} centroids, {} contour px in the class mask",
        scene.instances.distinct_labels().len(),
        scene.centroids.len(),
        scene.classes.count(neunseg::PixelClass::Contour)
    );

    let out = std::path::Path::new("neunseg-example-out");
    std::fs::create_dir_all(out).unwrap();
    io::write_probability_map(&out.join("scene_probmap.png"), &scene.probability).unwrap();
    io::write_label_map(&out.join("scene_instances.png"), &scene.instances).unwrap();
    io::write_class_map(&out.join("scene_classes.png"), &scene.classes).unwrap();
    io::write_points(&out.join("scene_points.txt"), &scene.centroids).unwrap();
    println!("fixture files in {}", out.display());
}
