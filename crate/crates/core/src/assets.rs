//! Post-processing for model-generated icon composites: grid slicing,
//! near-white background removal and transparent-border trimming.

use std::io::Cursor;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    pub width: u32,
    pub height: u32,
    /// RGBA, row-major, 4 bytes per pixel.
    pub pixels: Vec<u8>,
}

#[derive(Debug, thiserror::Error)]
pub enum AssetError {
    #[error("grid {m}x{n} does not fit a {width}x{height} image")]
    GridTooLarge { m: u32, n: u32, width: u32, height: u32 },
    #[error("grid dimensions must be at least 1")]
    EmptyGrid,
    #[error("PNG decode failed: {0}")]
    Decode(String),
    #[error("PNG encode failed: {0}")]
    Encode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BackgroundConfig {
    /// Minimum channel value for a pixel to count as background.
    pub threshold: u8,
    /// Largest max-min channel spread still considered colorless.
    pub spread: u8,
}

impl Default for BackgroundConfig {
    fn default() -> Self {
        BackgroundConfig {
            threshold: 245,
            spread: 10,
        }
    }
}

impl RasterImage {
    pub fn new(width: u32, height: u32, fill: [u8; 4]) -> RasterImage {
        RasterImage {
            width,
            height,
            pixels: fill.repeat(width as usize * height as usize),
        }
    }

    fn offset(&self, x: u32, y: u32) -> usize {
        (y as usize * self.width as usize + x as usize) * 4
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 4] {
        let o = self.offset(x, y);
        self.pixels[o..o + 4].try_into().expect("4 channels")
    }

    pub fn set_pixel(&mut self, x: u32, y: u32, px: [u8; 4]) {
        let o = self.offset(x, y);
        self.pixels[o..o + 4].copy_from_slice(&px);
    }

    /// Copy of the `w`x`h` region at (`x`, `y`); the region must fit.
    pub fn crop(&self, x: u32, y: u32, w: u32, h: u32) -> RasterImage {
        let mut pixels = Vec::with_capacity(w as usize * h as usize * 4);
        for row in y..y + h {
            let start = self.offset(x, row);
            pixels.extend_from_slice(&self.pixels[start..start + w as usize * 4]);
        }
        RasterImage { width: w, height: h, pixels }
    }

    pub fn decode_png(bytes: &[u8]) -> Result<RasterImage, AssetError> {
        let mut decoder = png::Decoder::new(Cursor::new(bytes));
        decoder.set_transformations(png::Transformations::EXPAND | png::Transformations::STRIP_16);
        let mut reader = decoder.read_info().map_err(|e| AssetError::Decode(e.to_string()))?;
        let mut buf = vec![0; reader.output_buffer_size()];
        let info = reader.next_frame(&mut buf).map_err(|e| AssetError::Decode(e.to_string()))?;
        buf.truncate(info.buffer_size());
        let pixels = match info.color_type {
            png::ColorType::Rgba => buf,
            png::ColorType::Rgb => buf.chunks_exact(3).flat_map(|c| [c[0], c[1], c[2], 255]).collect(),
            png::ColorType::GrayscaleAlpha => buf.chunks_exact(2).flat_map(|c| [c[0], c[0], c[0], c[1]]).collect(),
            png::ColorType::Grayscale => buf.iter().flat_map(|&g| [g, g, g, 255]).collect(),
            png::ColorType::Indexed => return Err(AssetError::Decode("palette was not expanded".into())),
        };
        Ok(RasterImage {
            width: info.width,
            height: info.height,
            pixels,
        })
    }

    pub fn encode_png(&self) -> Result<Vec<u8>, AssetError> {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, self.width, self.height);
            enc.set_color(png::ColorType::Rgba);
            enc.set_depth(png::BitDepth::Eight);
            let mut w = enc.write_header().map_err(|e| AssetError::Encode(e.to_string()))?;
            w.write_image_data(&self.pixels).map_err(|e| AssetError::Encode(e.to_string()))?;
        }
        Ok(out)
    }
}

/// Splits into `m` rows by `n` columns, row-major. Tile (r, c) covers rows
/// floor(r*H/m)..floor((r+1)*H/m) and the analogous columns.
pub fn slice_grid(image: &RasterImage, m: u32, n: u32) -> Result<Vec<RasterImage>, AssetError> {
    if m == 0 || n == 0 {
        return Err(AssetError::EmptyGrid);
    }
    if m > image.height || n > image.width {
        return Err(AssetError::GridTooLarge {
            m,
            n,
            width: image.width,
            height: image.height,
        });
    }
    let bound = |i: u32, parts: u32, len: u32| (i as u64 * len as u64 / parts as u64) as u32;
    let mut tiles = Vec::with_capacity((m * n) as usize);
    for r in 0..m {
        let (y0, y1) = (bound(r, m, image.height), bound(r + 1, m, image.height));
        for c in 0..n {
            let (x0, x1) = (bound(c, n, image.width), bound(c + 1, n, image.width));
            tiles.push(image.crop(x0, y0, x1 - x0, y1 - y0));
        }
    }
    Ok(tiles)
}

pub fn is_background(px: [u8; 4], cfg: &BackgroundConfig) -> bool {
    let [r, g, b, _] = px;
    let lo = r.min(g).min(b);
    let hi = r.max(g).max(b);
    lo >= cfg.threshold && hi - lo <= cfg.spread
}

/// Near-white, colorless pixels become fully transparent; the rest are kept.
pub fn remove_background(image: &RasterImage) -> RasterImage {
    remove_background_with(image, &BackgroundConfig::default())
}

pub fn remove_background_with(image: &RasterImage, cfg: &BackgroundConfig) -> RasterImage {
    let mut out = image.clone();
    for px in out.pixels.chunks_exact_mut(4) {
        if is_background([px[0], px[1], px[2], px[3]], cfg) {
            px[3] = 0;
        }
    }
    out
}

/// Smallest crop holding every pixel with alpha > 0; a fully transparent
/// image becomes a single transparent pixel.
pub fn trim_transparent(image: &RasterImage) -> RasterImage {
    let (mut x0, mut y0, mut x1, mut y1) = (u32::MAX, u32::MAX, 0, 0);
    for y in 0..image.height {
        for x in 0..image.width {
            if image.pixel(x, y)[3] > 0 {
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x + 1);
                y1 = y1.max(y + 1);
            }
        }
    }
    if x0 == u32::MAX {
        return RasterImage::new(1, 1, [0, 0, 0, 0]);
    }
    image.crop(x0, y0, x1 - x0, y1 - y0)
}

/// Offline stand-in for a generated composite: `m`x`n` solid tiles of
/// `tile` pixels, each a distinct muted color inset on a white margin.
pub fn placeholder_composite(m: u32, n: u32, tile: u32) -> RasterImage {
    let mut img = RasterImage::new(n * tile, m * tile, [255, 255, 255, 255]);
    let margin = tile / 8;
    for r in 0..m {
        for c in 0..n {
            let k = r * n + c;
            let color = [
                (60 + 37 * k % 140) as u8,
                (90 + 53 * k % 120) as u8,
                (120 + 71 * k % 110) as u8,
                255,
            ];
            for y in margin..tile - margin {
                for x in margin..tile - margin {
                    img.set_pixel(c * tile + x, r * tile + y, color);
                }
            }
        }
    }
    img
}
