//! Zhang-Suen two-subiteration thinning.
//!
//! Each subiteration flags candidates against a snapshot of the image and
//! deletes them together. Parallel deletion can erase a whole component
//! (a 2x2 block, a two-pixel diagonal); such a component keeps its first
//! pixel in raster order, which is then isolated and never flagged again.
//! The loop stops on a pass that deletes nothing.

use super::BinaryMask;
use crate::error::{Error, Result};

/// Neighbors P2..P9, clockwise from north.
const RING: [(i64, i64); 8] = [
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
];

fn ring(m: &BinaryMask, x: i64, y: i64) -> [bool; 8] {
    let mut p = [false; 8];
    for (k, (dx, dy)) in RING.iter().enumerate() {
        p[k] = m.get(x + dx, y + dy);
    }
    p
}

/// Neighbor count and number of 0->1 transitions around the ring.
fn counts(p: &[bool; 8]) -> (usize, usize) {
    let b = p.iter().filter(|&&v| v).count();
    let a = (0..8).filter(|&k| !p[k] && p[(k + 1) % 8]).count();
    (b, a)
}

fn deletable(p: &[bool; 8], first: bool) -> bool {
    let (b, a) = counts(p);
    if !(2..=6).contains(&b) || a != 1 {
        return false;
    }
    // p[0]=P2 (N), p[2]=P4 (E), p[4]=P6 (S), p[6]=P8 (W)
    let (n, e, s, w) = (p[0], p[2], p[4], p[6]);
    if first {
        !(n && e && s) && !(e && s && w)
    } else {
        !(n && e && w) && !(n && s && w)
    }
}

/// Reduce the foreground to a one-pixel-wide skeleton.
pub fn thin(mask: &BinaryMask) -> Result<BinaryMask> {
    if mask.count() == 0 {
        return Err(Error::EmptyInput("mask has no foreground pixels".into()));
    }
    let mut img = mask.clone();
    let w = img.width();
    let mut candidates = Vec::new();
    loop {
        let mut changed = false;
        for first in [true, false] {
            candidates.clear();
            for (x, y) in img.foreground() {
                if deletable(&ring(&img, x as i64, y as i64), first) {
                    candidates.push(y * w + x);
                }
            }
            if candidates.is_empty() {
                continue;
            }
            changed = true;
            let (labels, n) = img.component_labels();
            for &i in &candidates {
                img.set(i % w, i / w, false);
            }
            let mut alive = vec![false; n + 1];
            for (x, y) in img.foreground() {
                alive[labels[y * w + x] as usize] = true;
            }
            for (i, &l) in labels.iter().enumerate() {
                if l != 0 && !alive[l as usize] {
                    alive[l as usize] = true;
                    img.set(i % w, i / w, true);
                }
            }
        }
        if !changed {
            return Ok(img);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(w: usize, h: usize, x0: usize, y0: usize, rw: usize, rh: usize) -> BinaryMask {
        let mut m = BinaryMask::empty(w, h, 1.0).unwrap();
        for y in y0..y0 + rh {
            for x in x0..x0 + rw {
                m.set(x, y, true);
            }
        }
        m
    }

    #[test]
    fn empty_mask_is_an_error() {
        let m = BinaryMask::empty(5, 5, 1.0).unwrap();
        assert!(matches!(thin(&m), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn thin_line_is_unchanged() {
        let m = BinaryMask::from_ascii(
            &[
                "..........",
                ".#........",
                "..#.......",
                "...####...",
                ".......#..",
                "........#.",
                "..........",
            ],
            1.0,
        )
        .unwrap();
        assert_eq!(thin(&m).unwrap(), m);
    }

    #[test]
    fn rectangle_thins_to_middle_row_path() {
        let m = rect(25, 9, 2, 2, 21, 5);
        let s = thin(&m).unwrap();
        // golden result, checked by hand against a textbook Zhang-Suen pass:
        // the middle row y = 4 from x = 4 to 19
        let expected: Vec<(usize, usize)> = (4..=19).map(|x| (x, 4)).collect();
        let got: Vec<(usize, usize)> = s.foreground().collect();
        assert_eq!(got, expected, "\n{}", s.to_ascii().join("\n"));
        assert!(got.len() >= 15);
    }

    #[test]
    fn disk_thins_to_near_point() {
        let mut m = BinaryMask::empty(13, 13, 1.0).unwrap();
        for y in 0..13i64 {
            for x in 0..13i64 {
                if (x - 6).pow(2) + (y - 6).pow(2) <= 36 {
                    m.set(x as usize, y as usize, true);
                }
            }
        }
        let s = thin(&m).unwrap();
        assert!(s.count() <= 5, "\n{}", s.to_ascii().join("\n"));
        assert_eq!(s.component_count(), 1);
    }

    #[test]
    fn two_by_two_block_survives() {
        let m = rect(6, 6, 2, 2, 2, 2);
        let s = thin(&m).unwrap();
        assert_eq!(s.foreground().collect::<Vec<_>>(), vec![(2, 2)]);
        assert_eq!(thin(&s).unwrap(), s);
    }

    #[test]
    fn skeleton_is_thin_subset_and_fixed_point() {
        let m = rect(30, 20, 3, 3, 22, 12);
        let s = thin(&m).unwrap();
        for (x, y) in s.foreground() {
            assert!(m.get(x as i64, y as i64));
        }
        assert_eq!(thin(&s).unwrap(), s);
        assert_eq!(s.component_count(), 1);
        // no 2x2 foreground blocks remain
        for y in 0..19i64 {
            for x in 0..29i64 {
                assert!(!(s.get(x, y) && s.get(x + 1, y) && s.get(x, y + 1) && s.get(x + 1, y + 1)));
            }
        }
    }
}
