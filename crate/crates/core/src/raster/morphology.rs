use super::PixelMask;

/// Binary erosion with a Euclidean disk of the given radius.
///
/// A pixel survives iff every in-bounds pixel within distance `radius` is
/// set. Out-of-bounds positions are ignored, so a full mask stays full.
pub fn erode(mask: &PixelMask, radius: usize) -> PixelMask {
    if radius == 0 {
        return mask.clone();
    }
    let r = radius as isize;
    let offsets: Vec<(isize, isize)> = (-r..=r)
        .flat_map(|dy| (-r..=r).map(move |dx| (dx, dy)))
        .filter(|(dx, dy)| dx * dx + dy * dy <= r * r)
        .collect();
    let (w, h) = (mask.width() as isize, mask.height() as isize);
    PixelMask::from_fn(mask.width(), mask.height(), |x, y| {
        if !mask.get(x, y) {
            return false;
        }
        offsets.iter().all(|&(dx, dy)| {
            let (nx, ny) = (x as isize + dx, y as isize + dy);
            nx < 0 || ny < 0 || nx >= w || ny >= h || mask.get(nx as usize, ny as usize)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_zero_is_identity() {
        let m = PixelMask::from_fn(6, 4, |x, y| (x + y) % 3 != 0);
        assert_eq!(erode(&m, 0), m);
    }

    #[test]
    fn full_mask_stays_full() {
        let m = PixelMask::full(9, 7);
        assert_eq!(erode(&m, 5), m);
    }

    #[test]
    fn hole_grows_to_disk() {
        let m = PixelMask::from_fn(11, 11, |x, y| !(x == 5 && y == 5));
        let e = erode(&m, 5);
        for y in 0..11usize {
            for x in 0..11usize {
                let d2 = (x as i64 - 5).pow(2) + (y as i64 - 5).pow(2);
                assert_eq!(e.get(x, y), d2 > 25, "({x},{y})");
            }
        }
    }
}
