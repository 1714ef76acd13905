use crate::raster::GradientField;

/// Equal-count bins over gradient magnitudes.
///
/// Pixels are ranked by magnitude, ties broken by raster index, and the
/// pixel of rank `k` goes to bin `k * n_bins / n`. Bin sizes differ by at
/// most one and every magnitude in bin `b` is at most every magnitude in bin
/// `b + 1`.
pub fn assign_bins(field: &GradientField, n_bins: usize) -> Vec<usize> {
    assert!(n_bins >= 1, "at least one bin is required");
    let mag = field.mag();
    let n = mag.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| mag[a].total_cmp(&mag[b]).then(a.cmp(&b)));
    let mut bins = vec![0; n];
    for (rank, &i) in order.iter().enumerate() {
        bins[i] = rank * n_bins / n;
    }
    bins
}
