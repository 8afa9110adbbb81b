//! PNG encoding with pinned settings.

use std::io::Cursor;

use shredforge_core::Raster;

use crate::error::{Error, Result};

fn img_err(e: impl std::fmt::Display) -> Error {
    Error::Image(e.to_string())
}

/// 8-bit RGB, no interlacing, fixed compression level and filter, so equal
/// pixels always give equal bytes. Alpha is dropped.
pub fn encode_png_rgb(r: &Raster) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, r.width, r.height);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        enc.set_compression(png::Compression::Fast);
        enc.set_filter(png::Filter::Up);
        let mut w = enc.write_header().map_err(img_err)?;
        let mut data = Vec::with_capacity(r.pixels.len() * 3);
        for p in &r.pixels {
            data.extend_from_slice(&p[..3]);
        }
        w.write_image_data(&data).map_err(img_err)?;
        w.finish().map_err(img_err)?;
    }
    Ok(out)
}

/// Decode an 8-bit RGB or RGBA PNG.
pub fn decode_png(bytes: &[u8]) -> Result<Raster> {
    let dec = png::Decoder::new(Cursor::new(bytes));
    let mut reader = dec.read_info().map_err(img_err)?;
    let size = reader.output_buffer_size().ok_or_else(|| img_err("image too large"))?;
    let mut buf = vec![0u8; size];
    let info = reader.next_frame(&mut buf).map_err(img_err)?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(img_err("only 8-bit images are supported"));
    }
    let channels = match info.color_type {
        png::ColorType::Rgb => 3,
        png::ColorType::Rgba => 4,
        other => return Err(img_err(format!("unsupported colour type {other:?}"))),
    };
    let mut pixels = Vec::with_capacity(info.width as usize * info.height as usize);
    for row in buf[..info.buffer_size()].chunks(info.line_size) {
        for px in row[..info.width as usize * channels].chunks(channels) {
            pixels.push([px[0], px[1], px[2], if channels == 4 { px[3] } else { 255 }]);
        }
    }
    Ok(Raster {
        width: info.width,
        height: info.height,
        pixels,
    })
}
