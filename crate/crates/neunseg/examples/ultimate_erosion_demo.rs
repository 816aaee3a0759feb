//! Ultimate erosion on a dumbbell shape: the neck erodes away first, each
//! lobe leaves its own residue, and dynamic reconstruction re-dilates every
//! residue as many times as it was eroded.
//!
//!     cargo run --example ultimate_erosion_demo

use neunseg::morph::{dynamic_reconstruction, ultimate_erosion};
use neunseg::raster::{BinaryMask, Connectivity, StructuringElement};

fn main() {
    let (w, h) = (80u32, 40u32);
    let dumbbell = BinaryMask::from_fn(w, h, |x, y| {
        let (x, y) = (x as i64, y as i64);
        let lobe = |cx: i64| (x - cx).pow(2) + (y - 20).pow(2) <= 14 * 14;
        lobe(22) || lobe(56) || ((22..=56).contains(&x) && (y - 20).abs() <= 2)
    });
    println!("dumbbell: {} foreground px, one connected shape", dumbbell.count());

    let se = StructuringElement::disk(10);
    let residues = ultimate_erosion(&dumbbell, &se, Connectivity::Eight);
    for r in &residues {
        let cx: i64 = r.pixels.iter().map(|p| p.x as i64).sum::<i64>() / r.pixels.len() as i64;
        println!(
            "residue {}: {} px near x={cx}, survived {} erosion(s)",
            r.label,
            r.pixels.len(),
            r.erosion_count
        );
    }

    let reconstructed = dynamic_reconstruction(&residues, &se, w, h);
    for label in reconstructed.distinct_labels() {
        let area = reconstructed.labels().iter().filter(|&&l| l == label).count();
        println!("reconstructed instance {label}: {area} px");
    }
}
