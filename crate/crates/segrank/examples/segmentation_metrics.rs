//! Score one prediction against a ground truth: DSC, ASSD, the
//! empty-prediction penalty, and the split-boundary ASSD between two
//! touching sub-regions.

use segrank::metrics::{assd, boundary_points, dice, interface_points, split_boundary_assd};
use segrank::volume::{BinaryMask, Grid};

fn ball(grid: Grid, center: [f64; 3], radius: f64) -> BinaryMask {
    let mut mask = BinaryMask::empty(grid);
    for z in 0..grid.dims[2] {
        for y in 0..grid.dims[1] {
            for x in 0..grid.dims[0] {
                let d2 = (x as f64 - center[0]).powi(2)
                    + (y as f64 - center[1]).powi(2)
                    + (z as f64 - center[2]).powi(2);
                if d2 <= radius * radius {
                    mask.set(x, y, z, true);
                }
            }
        }
    }
    mask
}

fn main() -> segrank::Result<()> {
    let grid = Grid::new([32, 32, 32], [1.0, 1.0, 1.0]);
    let gt = ball(grid, [16.0, 16.0, 16.0], 8.0);
    let pred = ball(grid, [17.0, 16.0, 16.0], 7.5);

    let d = dice(&pred, &gt)?;
    let a = assd(&pred, &gt, 350.0)?;
    println!("overlap:  DSC  = {:.4}", d.value);
    println!("surface:  ASSD = {:.4} mm", a.value);
    println!(
        "boundaries: {} prediction points vs {} ground-truth points",
        boundary_points(&pred).count(),
        boundary_points(&gt).count()
    );

    // an empty prediction is scored with the fixed worst-case distance
    let empty = BinaryMask::empty(grid);
    let penalized = assd(&empty, &gt, 350.0)?;
    println!(
        "empty prediction: ASSD = {} mm (penalized = {})",
        penalized.value, penalized.penalized
    );

    // split the ground-truth ball into left/right halves and measure how
    // well the prediction places the interface between them
    let split_at = |mask: &BinaryMask, x_split: usize, left: bool| {
        let mut half = BinaryMask::empty(grid);
        for idx in 0..mask.bits.len() {
            let [x, y, z] = grid.coords(idx);
            if mask.bits[idx] && ((x < x_split) == left) {
                half.set(x, y, z, true);
            }
        }
        half
    };
    let (gt_l, gt_r) = (split_at(&gt, 16, true), split_at(&gt, 16, false));
    let (pred_l, pred_r) = (split_at(&pred, 17, true), split_at(&pred, 17, false));
    println!(
        "gt interface has {} points",
        interface_points(&gt_l, &gt_r)?.count()
    );
    let sb = split_boundary_assd(&pred_l, &pred_r, &gt_l, &gt_r, 350.0)?;
    println!("split-boundary ASSD = {:.4} mm", sb.value);
    Ok(())
}
