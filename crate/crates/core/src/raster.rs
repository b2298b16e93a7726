//! In-memory RGB images with binary PPM (P6) and PNG codecs.
//!
//! PPM is the bit-exact golden format: the encoder writes one canonical byte
//! sequence per pixel grid, so determinism tests can compare files directly.

use std::io::Cursor;
use std::path::Path;

use image::ImageFormat;
use serde::{Deserialize, Serialize};

use crate::colormap::Rgb8;
use crate::error::{Error, Result};

/// Output encodings the toolkit can write.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileFormat {
    #[default]
    Ppm,
    Png,
}

impl FileFormat {
    pub fn extension(self) -> &'static str {
        match self {
            FileFormat::Ppm => "ppm",
            FileFormat::Png => "png",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RasterImage {
    pub width: u32,
    pub height: u32,
    /// Row-major, top row first.
    pub pixels: Vec<Rgb8>,
}

impl RasterImage {
    pub fn new(width: u32, height: u32, fill: Rgb8) -> Self {
        RasterImage {
            width,
            height,
            pixels: vec![fill; width as usize * height as usize],
        }
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> Rgb8 {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, color: Rgb8) {
        self.pixels[y as usize * self.width as usize + x as usize] = color;
    }

    fn to_raw(&self) -> Vec<u8> {
        let mut raw = Vec::with_capacity(self.pixels.len() * 3);
        for p in &self.pixels {
            raw.extend_from_slice(&p.0);
        }
        raw
    }

    fn from_raw(width: u32, height: u32, raw: &[u8]) -> Result<Self> {
        let want = width as usize * height as usize * 3;
        if raw.len() != want {
            return Err(Error::PpmFormat(format!(
                "raster byte count {} does not match {}x{}",
                raw.len(),
                width,
                height
            )));
        }
        let pixels = raw.chunks_exact(3).map(|c| Rgb8([c[0], c[1], c[2]])).collect();
        Ok(RasterImage { width, height, pixels })
    }

    /// Writes PPM or PNG depending on the file extension.
    pub fn save(&self, path: &Path) -> Result<()> {
        match extension(path)? {
            "ppm" => std::fs::write(path, encode_ppm(self))?,
            "png" => std::fs::write(path, encode_png(self)?)?,
            _ => unreachable!(),
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        match extension(path)? {
            "ppm" => decode_ppm(&bytes),
            "png" => decode_png(&bytes),
            _ => unreachable!(),
        }
    }
}

fn extension(path: &Path) -> Result<&'static str> {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("ppm") => Ok("ppm"),
        Some(e) if e.eq_ignore_ascii_case("png") => Ok("png"),
        other => Err(Error::PpmFormat(format!(
            "unsupported image extension {:?} (use .ppm or .png)",
            other.unwrap_or("<none>")
        ))),
    }
}

/// Binary P6: "P6\n{w} {h}\n255\n" followed by row-major RGB bytes.
pub fn encode_ppm(img: &RasterImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend(img.to_raw());
    out
}

/// Accepts any standards-conforming P6 header (comments, flexible whitespace)
/// with maxval 255.
pub fn decode_ppm(bytes: &[u8]) -> Result<RasterImage> {
    let mut pos = 0usize;

    // header token reader: skips whitespace and '#' comments
    let mut next_token = |bytes: &[u8]| -> Result<String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::PpmFormat("truncated header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };

    if next_token(bytes)? != "P6" {
        return Err(Error::PpmFormat("missing P6 magic".into()));
    }
    let parse = |tok: String, what: &str| -> Result<u32> {
        tok.parse::<u32>()
            .map_err(|_| Error::PpmFormat(format!("bad {what} field: {tok:?}")))
    };
    let width = parse(next_token(bytes)?, "width")?;
    let height = parse(next_token(bytes)?, "height")?;
    let maxval = parse(next_token(bytes)?, "maxval")?;
    if maxval != 255 {
        return Err(Error::PpmFormat(format!("unsupported maxval {maxval}")));
    }
    // exactly one whitespace byte separates the header from the raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::PpmFormat("missing separator before raster".into()));
    }
    pos += 1;
    RasterImage::from_raw(width, height, &bytes[pos..])
}

pub fn encode_png(img: &RasterImage) -> Result<Vec<u8>> {
    let buf: image::RgbImage =
        image::ImageBuffer::from_raw(img.width, img.height, img.to_raw())
            .expect("raw buffer length matches dimensions");
    let mut out = Cursor::new(Vec::new());
    image::DynamicImage::ImageRgb8(buf).write_to(&mut out, ImageFormat::Png)?;
    Ok(out.into_inner())
}

pub fn decode_png(bytes: &[u8]) -> Result<RasterImage> {
    let img = image::load_from_memory_with_format(bytes, ImageFormat::Png)?.into_rgb8();
    RasterImage::from_raw(img.width(), img.height(), img.as_raw())
}
