//! Plans an overlapping tile grid, shows the border down-weighting, and
//! demonstrates the stitching round-trip: when every tile agrees with a
//! per-pixel predictor, reassembly reproduces the whole-image prediction
//! exactly.
//!
//!     cargo run --example tile_and_stitch

use neunseg::probmap::{renormalize_trio, ProbabilityMap};
use neunseg::tiling::{plan_tiles, stitch, weight_map, WeightMap};

fn main() {
    // the production layout: 5000x5000 images, 1344-px patches, 120-px overlap
    let grid = plan_tiles(5000, 5000, 1344, 120);
    println!(
        "5000x5000 at patch 1344 / overlap 120: {} tiles ({} x {})",
        grid.tiles.len(),
        grid.cols,
        grid.rows
    );
    let weights = weight_map(1344, 120);
    println!(
        "weights: corner {:.2e}, overlap edge {:.4}, interior {}",
        weights.get(0, 0),
        weights.get(119, 672),
        weights.get(672, 672)
    );

    // round trip on a small canvas with a deterministic per-pixel predictor
    let predictor = |x: u32, y: u32| -> [f64; 3] {
        let v = ((x * 37 + y * 11) % 256) as f64 / 255.0;
        renormalize_trio([1.0 - v, v / 3.0, 2.0 * v / 3.0])
    };
    let (w, h) = (600u32, 400u32);
    let whole = ProbabilityMap::from_fn(w, h, predictor).unwrap();
    let grid = plan_tiles(w, h, 256, 32);
    let weights = WeightMap::rect(grid.tile_width, grid.tile_height, grid.overlap);
    let tiles: Vec<_> = grid
        .tiles
        .iter()
        .map(|&rect| {
            let tile = ProbabilityMap::from_fn(rect.width, rect.height, |tx, ty| {
                predictor(rect.x0 + tx, rect.y0 + ty)
            })
            .unwrap();
            (rect, tile)
        })
        .collect();
    let stitched = stitch(&tiles, &weights, w, h).unwrap();
    println!(
        "round trip on {w}x{h} with {} tiles: bit-exact = {}",
        tiles.len(),
        stitched == whole
    );
}
