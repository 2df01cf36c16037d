//! Mask file formats, detected from the leading magic:
//!
//! * `P1`/`P4` portable bitmap, 1 = foreground
//! * `P2`/`P5` portable graymap, values above `maxval / 2` are foreground
//! * `RLE <width> <height>` followed by one line per row of alternating
//!   background/foreground run lengths, starting with background

use std::path::Path;

use super::BinaryMask;
use crate::error::{Error, Result};

struct Header<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.data.len() {
            match self.data[self.pos] {
                b'#' => {
                    while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn token(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.data.len() && !self.data[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse("unexpected end of mask header".into()));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .map_err(|_| Error::Parse("non-ASCII mask header".into()))
    }

    fn number(&mut self) -> Result<usize> {
        let t = self.token()?;
        t.parse()
            .map_err(|_| Error::Parse(format!("expected a number in mask header, got `{t}`")))
    }
}

pub fn read_mask(path: &Path, pitch: f64) -> Result<BinaryMask> {
    let data = std::fs::read(path)?;
    parse_mask(&data, pitch).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse_mask(data: &[u8], pitch: f64) -> Result<BinaryMask> {
    let mut h = Header { data, pos: 0 };
    let magic = h.token()?;
    match magic {
        "P1" | "P4" | "P2" | "P5" => {
            let width = h.number()?;
            let height = h.number()?;
            let maxval = if magic == "P2" || magic == "P5" { h.number()? } else { 1 };
            let n = width * height;
            let bits = match magic {
                "P1" => {
                    let mut bits = Vec::with_capacity(n);
                    while bits.len() < n {
                        h.skip_ws();
                        match data.get(h.pos) {
                            Some(b'0') => bits.push(false),
                            Some(b'1') => bits.push(true),
                            Some(&c) => {
                                return Err(Error::Parse(format!("bad P1 pixel `{}`", c as char)))
                            }
                            None => return Err(Error::Parse("truncated P1 data".into())),
                        }
                        h.pos += 1;
                    }
                    bits
                }
                "P2" => (0..n)
                    .map(|_| h.number().map(|v| 2 * v > maxval))
                    .collect::<Result<_>>()?,
                _ => {
                    // single whitespace byte separates header and raster
                    let body = data.get(h.pos + 1..).unwrap_or_default();
                    if magic == "P4" {
                        let stride = width.div_ceil(8);
                        if body.len() < stride * height {
                            return Err(Error::Parse("truncated P4 data".into()));
                        }
                        (0..n)
                            .map(|i| {
                                let (x, y) = (i % width, i / width);
                                body[y * stride + x / 8] & (0x80 >> (x % 8)) != 0
                            })
                            .collect()
                    } else {
                        if maxval > 255 {
                            return Err(Error::Parse("16-bit P5 masks are not supported".into()));
                        }
                        if body.len() < n {
                            return Err(Error::Parse("truncated P5 data".into()));
                        }
                        body[..n].iter().map(|&v| 2 * v as usize > maxval).collect()
                    }
                }
            };
            BinaryMask::new(width, height, bits, pitch)
        }
        "RLE" => {
            let width = h.number()?;
            let height = h.number()?;
            let text = std::str::from_utf8(&data[h.pos..])
                .map_err(|_| Error::Parse("RLE body is not UTF-8".into()))?;
            let rows: Vec<&str> = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .collect();
            if rows.len() != height {
                return Err(Error::Parse(format!(
                    "RLE has {} rows, header says {height}",
                    rows.len()
                )));
            }
            let mut bits = Vec::with_capacity(width * height);
            for (y, row) in rows.iter().enumerate() {
                let before = bits.len();
                for (k, run) in row.split_whitespace().enumerate() {
                    let run: usize = run
                        .parse()
                        .map_err(|_| Error::Parse(format!("RLE row {y}: bad run `{run}`")))?;
                    bits.extend(std::iter::repeat_n(k % 2 == 1, run));
                }
                if bits.len() - before != width {
                    return Err(Error::Parse(format!(
                        "RLE row {y} covers {} pixels, expected {width}",
                        bits.len() - before
                    )));
                }
            }
            BinaryMask::new(width, height, bits, pitch)
        }
        other => Err(Error::Parse(format!("unrecognized mask magic `{other}`"))),
    }
}

/// Plain (ASCII) PBM, 1 = foreground, at most 70 characters per line.
pub fn write_pbm(mask: &BinaryMask) -> Vec<u8> {
    let mut out = format!("P1\n{} {}\n", mask.width(), mask.height()).into_bytes();
    for row in mask.bits().chunks(mask.width()) {
        for (k, chunk) in row.chunks(35).enumerate() {
            if k > 0 {
                out.push(b'\n');
            }
            let line: Vec<&str> = chunk.iter().map(|&b| if b { "1" } else { "0" }).collect();
            out.extend_from_slice(line.join(" ").as_bytes());
        }
        out.push(b'\n');
    }
    out
}

pub fn write_rle(mask: &BinaryMask) -> String {
    let mut out = format!("RLE {} {}\n", mask.width(), mask.height());
    for row in mask.bits().chunks(mask.width()) {
        let mut runs = Vec::new();
        let mut cur = false;
        let mut len = 0usize;
        for &b in row {
            if b == cur {
                len += 1;
            } else {
                runs.push(len);
                cur = b;
                len = 1;
            }
        }
        runs.push(len);
        let line: Vec<String> = runs.iter().map(|r| r.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}
