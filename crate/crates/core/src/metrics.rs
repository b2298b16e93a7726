//! Pixel-level comparison of two renders: set subtraction with the surviving
//! non-white ratio, negative difference images, and per-pixel MSE.

use serde::{Deserialize, Serialize};

use crate::colormap::Rgb8;
use crate::error::{Error, Result};
use crate::raster::RasterImage;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffStats {
    /// Non-white pixels of A before subtraction.
    pub nonwhite_before: u64,
    /// Non-white pixels remaining after matching pixels are whitened.
    pub nonwhite_after: u64,
    /// nonwhite_after / nonwhite_before, or 0 for a blank A.
    pub mismatch_ratio: f64,
}

fn check_dims(a: &RasterImage, b: &RasterImage) -> Result<()> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::SizeMismatch {
            aw: a.width as usize,
            ah: a.height as usize,
            bw: b.width as usize,
            bh: b.height as usize,
        });
    }
    Ok(())
}

/// A \ B: pixels of A that exactly match B become white; the rest keep A's
/// value. The ratio of surviving non-white pixels measures divergence.
pub fn pixel_setminus(a: &RasterImage, b: &RasterImage, white: Rgb8) -> Result<(RasterImage, DiffStats)> {
    check_dims(a, b)?;
    let mut out = a.clone();
    let mut nonwhite_before = 0u64;
    let mut nonwhite_after = 0u64;
    for (pa, (pb, po)) in a.pixels.iter().zip(b.pixels.iter().zip(out.pixels.iter_mut())) {
        if *pa != white {
            nonwhite_before += 1;
        }
        if pa == pb {
            *po = white;
        } else if *pa != white {
            nonwhite_after += 1;
        }
    }
    let mismatch_ratio = if nonwhite_before == 0 {
        0.0
    } else {
        nonwhite_after as f64 / nonwhite_before as f64
    };
    Ok((
        out,
        DiffStats {
            nonwhite_before,
            nonwhite_after,
            mismatch_ratio,
        },
    ))
}

/// Per channel 255 - |A - B|: equal regions white, divergent regions dark.
pub fn negative_subtraction(a: &RasterImage, b: &RasterImage) -> Result<RasterImage> {
    check_dims(a, b)?;
    let pixels = a
        .pixels
        .iter()
        .zip(&b.pixels)
        .map(|(pa, pb)| {
            let mut c = [0u8; 3];
            for k in 0..3 {
                c[k] = 255 - pa.0[k].abs_diff(pb.0[k]);
            }
            Rgb8(c)
        })
        .collect();
    Ok(RasterImage {
        width: a.width,
        height: a.height,
        pixels,
    })
}

/// Mean over all pixels and all 3 channels of the squared 0-255 difference.
pub fn mse(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    check_dims(a, b)?;
    // u64 cannot overflow: 255^2 * 3 per pixel times far fewer than 2^47 pixels
    let mut sum = 0u64;
    for (pa, pb) in a.pixels.iter().zip(&b.pixels) {
        for k in 0..3 {
            let d = pa.0[k].abs_diff(pb.0[k]) as u64;
            sum += d * d;
        }
    }
    Ok(sum as f64 / (a.pixels.len() as f64 * 3.0))
}

/// Removes rows from the bottom of the image, e.g. the legend strip.
pub fn crop_bottom(img: &RasterImage, rows: u32) -> Result<RasterImage> {
    if rows >= img.height {
        return Err(Error::CropTooLarge {
            rows: rows as usize,
            height: img.height as usize,
        });
    }
    let height = img.height - rows;
    Ok(RasterImage {
        width: img.width,
        height,
        pixels: img.pixels[..(img.width as usize * height as usize)].to_vec(),
    })
}
