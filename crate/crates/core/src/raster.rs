//! Floating-point RGB rasters, resampling, and 8-bit PNG I/O.
//!
//! Pixel `(x, y)` covers the unit square `[x, x+1) × [y, y+1)` and its
//! center sits at `(x + 0.5, y + 0.5)`. Every module uses this convention.

use std::path::Path;

use crate::error::{Error, Result};
use crate::fsutil;

pub type Rgb = [f64; 3];

#[derive(Clone, Debug, PartialEq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<Rgb>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<Rgb>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "pixel buffer has {} entries, expected {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: Rgb) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> Rgb) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: Rgb) {
        self.data[y * self.width + x] = value;
    }

    /// Copies the `size × size` window whose top-left corner is `(x0, y0)`.
    pub fn crop_square(&self, x0: usize, y0: usize, size: usize) -> Result<RgbImage> {
        if x0 + size > self.width || y0 + size > self.height {
            return Err(Error::InvalidGeometry(format!(
                "window {size}x{size} at ({x0}, {y0}) exceeds {}x{} image",
                self.width, self.height
            )));
        }
        Ok(RgbImage::from_fn(size, size, |x, y| self.get(x0 + x, y0 + y)))
    }

    /// Bilinear resampling with pixel-center alignment and edge clamping.
    pub fn resize_bilinear(&self, width: usize, height: usize) -> Result<RgbImage> {
        if self.width == 0 || self.height == 0 || width == 0 || height == 0 {
            return Err(Error::InvalidGeometry(format!(
                "cannot resize {}x{} to {width}x{height}",
                self.width, self.height
            )));
        }
        if width == self.width && height == self.height {
            return Ok(self.clone());
        }
        let sx = self.width as f64 / width as f64;
        let sy = self.height as f64 / height as f64;
        let axis = |dst: usize, scale: f64, extent: usize| {
            let src = ((dst as f64 + 0.5) * scale - 0.5).clamp(0.0, (extent - 1) as f64);
            let lo = src.floor() as usize;
            let hi = (lo + 1).min(extent - 1);
            (lo, hi, src - lo as f64)
        };
        Ok(RgbImage::from_fn(width, height, |x, y| {
            let (x0, x1, tx) = axis(x, sx, self.width);
            let (y0, y1, ty) = axis(y, sy, self.height);
            let (a, b, c, d) = (
                self.get(x0, y0),
                self.get(x1, y0),
                self.get(x0, y1),
                self.get(x1, y1),
            );
            std::array::from_fn(|ch| {
                // lerp form keeps flat regions exact
                let top = a[ch] + tx * (b[ch] - a[ch]);
                let bottom = c[ch] + tx * (d[ch] - c[ch]);
                top + ty * (bottom - top)
            })
        }))
    }

    /// Quantizes to 8 bits per channel (round to nearest, clamped).
    pub fn to_rgb8(&self) -> image::RgbImage {
        let mut out = image::RgbImage::new(self.width as u32, self.height as u32);
        for (dst, src) in out.pixels_mut().zip(&self.data) {
            dst.0 = src.map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8);
        }
        out
    }

    pub fn from_rgb8(img: &image::RgbImage) -> Self {
        let data = img
            .pixels()
            .map(|p| p.0.map(|v| f64::from(v) / 255.0))
            .collect();
        Self {
            width: img.width() as usize,
            height: img.height() as usize,
            data,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let img = image::open(path).map_err(|source| match source {
            image::ImageError::IoError(e) => Error::io(path, e),
            source => Error::Image {
                path: path.to_path_buf(),
                source,
            },
        })?;
        Ok(Self::from_rgb8(&img.to_rgb8()))
    }

    /// Writes an 8-bit RGB PNG.
    pub fn save_png(&self, path: &Path) -> Result<()> {
        let mut bytes = Vec::new();
        self.to_rgb8()
            .write_to(&mut std::io::Cursor::new(&mut bytes), image::ImageFormat::Png)
            .map_err(|source| Error::Image {
                path: path.to_path_buf(),
                source,
            })?;
        fsutil::write_atomic(path, &bytes)
    }
}

/// Nearest-neighbour resampling of a row-major grid, pixel-center aligned.
pub(crate) fn resize_nearest<T: Copy>(
    src: &[T],
    width: usize,
    height: usize,
    new_width: usize,
    new_height: usize,
) -> Vec<T> {
    let pick = |dst: usize, src_extent: usize, dst_extent: usize| {
        let s = ((dst as f64 + 0.5) * src_extent as f64 / dst_extent as f64).floor() as usize;
        s.min(src_extent - 1)
    };
    let mut out = Vec::with_capacity(new_width * new_height);
    for y in 0..new_height {
        let sy = pick(y, height, new_height);
        for x in 0..new_width {
            out.push(src[sy * width + pick(x, width, new_width)]);
        }
    }
    out
}
