//! Lossless single-channel PNG label maps, plus a colour render for viewing.

use std::io::Cursor;

use png::{BitDepth, ColorType, Transformations};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::types::{Label, LabelMap, BACKGROUND};

/// Raster sample width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelDepth {
    Eight,
    Sixteen,
}

impl LabelDepth {
    /// Smallest depth that can hold every label of `map`.
    pub fn fitting(map: &LabelMap) -> Result<Self> {
        match map.labels().iter().copied().max().unwrap_or(0) {
            m if m <= u8::MAX as Label => Ok(LabelDepth::Eight),
            m if m <= u16::MAX as Label => Ok(LabelDepth::Sixteen),
            m => Err(Error::LabelTooLargeFor16Bit(m)),
        }
    }
}

fn png_err(e: impl std::fmt::Display) -> Error {
    Error::Png(e.to_string())
}

/// Encodes `map` as a grayscale PNG where the pixel value is the label.
pub fn write_label_image(map: &LabelMap, depth: LabelDepth) -> Result<Vec<u8>> {
    let data: Vec<u8> = match depth {
        LabelDepth::Eight => map
            .labels()
            .iter()
            .map(|&l| u8::try_from(l).map_err(|_| Error::LabelTooLargeFor8Bit(l)))
            .collect::<Result<_>>()?,
        LabelDepth::Sixteen => {
            let mut out = Vec::with_capacity(map.len() * 2);
            for &l in map.labels() {
                let v = u16::try_from(l).map_err(|_| Error::LabelTooLargeFor16Bit(l))?;
                out.extend_from_slice(&v.to_be_bytes());
            }
            out
        }
    };
    let mut buf = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut buf, map.width() as u32, map.height() as u32);
        enc.set_color(ColorType::Grayscale);
        enc.set_depth(match depth {
            LabelDepth::Eight => BitDepth::Eight,
            LabelDepth::Sixteen => BitDepth::Sixteen,
        });
        let mut writer = enc.write_header().map_err(png_err)?;
        writer.write_image_data(&data).map_err(png_err)?;
        writer.finish().map_err(png_err)?;
    }
    Ok(buf)
}

/// Decodes an 8- or 16-bit grayscale PNG into labels. Colour, palette,
/// alpha and sub-byte rasters are rejected.
pub fn read_label_image(bytes: &[u8]) -> Result<LabelMap> {
    let mut dec = png::Decoder::new(Cursor::new(bytes));
    dec.set_transformations(Transformations::IDENTITY);
    let mut reader = dec.read_info().map_err(png_err)?;
    let (color, depth) = (reader.info().color_type, reader.info().bit_depth);
    if color != ColorType::Grayscale {
        return Err(Error::UnsupportedRaster(format!("{color:?} is not a single-channel label raster")));
    }
    if !matches!(depth, BitDepth::Eight | BitDepth::Sixteen) {
        return Err(Error::UnsupportedRaster(format!("{depth:?} bit depth; expected 8 or 16")));
    }
    let size = reader.output_buffer_size().ok_or_else(|| Error::UnsupportedRaster("image too large".into()))?;
    let mut buf = vec![0u8; size];
    let info = reader.next_frame(&mut buf).map_err(png_err)?;
    let (w, h) = (info.width as usize, info.height as usize);
    let mut labels = Vec::with_capacity(w * h);
    for y in 0..h {
        let line = &buf[y * info.line_size..(y + 1) * info.line_size];
        match depth {
            BitDepth::Eight => labels.extend(line[..w].iter().map(|&v| v as Label)),
            _ => labels.extend(line[..2 * w].chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]]) as Label)),
        }
    }
    LabelMap::new(w, h, labels)
}

/// Colour render: every label gets a palette colour from a generator seeded
/// with `seed`; background is black.
pub fn render_rgb(map: &LabelMap, seed: u64) -> Vec<u8> {
    let max = map.labels().iter().copied().max().unwrap_or(0) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let palette: Vec<[u8; 3]> = (0..=max)
        .map(|i| {
            if i == BACKGROUND as usize {
                [0, 0, 0]
            } else {
                [rng.random_range(40..=255), rng.random_range(40..=255), rng.random_range(40..=255)]
            }
        })
        .collect();
    map.labels().iter().flat_map(|&l| palette[l as usize]).collect()
}

/// [`render_rgb`] encoded as an RGB PNG.
pub fn write_color_image(map: &LabelMap, seed: u64) -> Result<Vec<u8>> {
    let rgb = render_rgb(map, seed);
    let mut buf = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut buf, map.width() as u32, map.height() as u32);
        enc.set_color(ColorType::Rgb);
        enc.set_depth(BitDepth::Eight);
        let mut writer = enc.write_header().map_err(png_err)?;
        writer.write_image_data(&rgb).map_err(png_err)?;
        writer.finish().map_err(png_err)?;
    }
    Ok(buf)
}
