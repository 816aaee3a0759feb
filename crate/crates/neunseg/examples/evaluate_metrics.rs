//! Scores a deliberately imperfect prediction with the full metric suite:
//! detection F1, precision/recall, relative count error, Dice, instance F1
//! and the aggregated Jaccard index.
//!
//!     cargo run --example evaluate_metrics

use neunseg::metrics::evaluate_instances;
use neunseg::raster::LabelMap;

fn block(lm: &mut LabelMap, x0: u32, y0: u32, x1: u32, y1: u32, label: u32) {
    for y in y0..y1 {
        for x in x0..x1 {
            lm.set(x, y, label);
        }
    }
}

fn main() {
    use neunseg::raster::Point;

    // ground truth: three cells
    let mut gt = LabelMap::new(48, 24);
    block(&mut gt, 2, 2, 14, 14, 1);
    block(&mut gt, 18, 2, 30, 14, 2);
    block(&mut gt, 34, 2, 46, 14, 3);
    let centroids = [Point::new(8, 8), Point::new(24, 8), Point::new(40, 8)];

    // prediction: merges the first two cells, matches the third,
    // and hallucinates a fourth
    let mut pred = LabelMap::new(48, 24);
    block(&mut pred, 2, 2, 30, 14, 7);
    block(&mut pred, 34, 2, 46, 14, 8);
    block(&mut pred, 10, 18, 20, 23, 9);

    let m = evaluate_instances(&pred, &gt, &centroids).unwrap();
    println!("f1_det    {:.4}", m.f1_det);
    println!("precision {:.4}", m.precision);
    println!("recall    {:.4}", m.recall);
    println!("rce       {:.4}", m.rce);
    println!("dice      {:.4}", m.dice);
    println!("f1_seg    {:.4}", m.f1_seg);
    println!("aji       {:.4}", m.aji);
}
