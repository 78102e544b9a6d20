//! Embedded 8x12 monospaced bitmap font (digits and Latin capitals).
//!
//! Each glyph is drawn in a 6x9 box placed at column 1, row 1 of the cell,
//! leaving one blank column on either side and a blank descender band.

use crate::image::GrayImage;
use crate::scalar::Scalar;

pub const CELL_WIDTH: usize = 8;
pub const CELL_HEIGHT: usize = 12;
const INK_WIDTH: usize = 6;
const INK_HEIGHT: usize = 9;

/// Every character the font can draw.
pub const FONT_ALPHABET: &str = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
/// Digits only.
pub const DIGITS: &str = "0123456789";
/// Latin capitals that double as Cyrillic plate letters (O excluded: it collides with 0).
pub const PLATE_LETTERS: &str = "ABCEHKMPTXY";

#[rustfmt::skip]
const GLYPHS: [(char, [&str; INK_HEIGHT]); 36] = [
    ('0', [".####.", "#....#", "#...##", "#..#.#", "#.#..#", "##...#", "#....#", "#....#", ".####."]),
    ('1', ["...#..", "..##..", ".#.#..", "...#..", "...#..", "...#..", "...#..", "...#..", ".#####"]),
    ('2', [".####.", "#....#", ".....#", "....#.", "...#..", "..#...", ".#....", "#.....", "######"]),
    ('3', [".####.", "#....#", ".....#", ".....#", "..###.", ".....#", ".....#", "#....#", ".####."]),
    ('4', ["....#.", "...##.", "..#.#.", ".#..#.", "#...#.", "######", "....#.", "....#.", "....#."]),
    ('5', ["######", "#.....", "#.....", "#####.", ".....#", ".....#", ".....#", "#....#", ".####."]),
    ('6', ["..###.", ".#....", "#.....", "#.....", "#####.", "#....#", "#....#", "#....#", ".####."]),
    ('7', ["######", ".....#", "....#.", "....#.", "...#..", "...#..", "..#...", "..#...", "..#..."]),
    ('8', [".####.", "#....#", "#....#", "#....#", ".####.", "#....#", "#....#", "#....#", ".####."]),
    ('9', [".####.", "#....#", "#....#", "#....#", ".#####", ".....#", ".....#", "....#.", ".###.."]),
    ('A', ["..##..", ".#..#.", "#....#", "#....#", "#....#", "######", "#....#", "#....#", "#....#"]),
    ('B', ["#####.", "#....#", "#....#", "#....#", "#####.", "#....#", "#....#", "#....#", "#####."]),
    ('C', [".####.", "#....#", "#.....", "#.....", "#.....", "#.....", "#.....", "#....#", ".####."]),
    ('D', ["####..", "#...#.", "#....#", "#....#", "#....#", "#....#", "#....#", "#...#.", "####.."]),
    ('E', ["######", "#.....", "#.....", "#.....", "#####.", "#.....", "#.....", "#.....", "######"]),
    ('F', ["######", "#.....", "#.....", "#.....", "#####.", "#.....", "#.....", "#.....", "#....."]),
    ('G', [".####.", "#....#", "#.....", "#.....", "#..###", "#....#", "#....#", "#....#", ".####."]),
    ('H', ["#....#", "#....#", "#....#", "#....#", "######", "#....#", "#....#", "#....#", "#....#"]),
    ('I', [".####.", "...#..", "...#..", "...#..", "...#..", "...#..", "...#..", "...#..", ".####."]),
    ('J', ["..####", "....#.", "....#.", "....#.", "....#.", "....#.", "#...#.", "#...#.", ".###.."]),
    ('K', ["#....#", "#...#.", "#..#..", "#.#...", "##....", "#.#...", "#..#..", "#...#.", "#....#"]),
    ('L', ["#.....", "#.....", "#.....", "#.....", "#.....", "#.....", "#.....", "#.....", "######"]),
    ('M', ["#....#", "##..##", "#.##.#", "#.##.#", "#....#", "#....#", "#....#", "#....#", "#....#"]),
    ('N', ["#....#", "##...#", "##...#", "#.#..#", "#.#..#", "#..#.#", "#...##", "#...##", "#....#"]),
    ('O', [".####.", "#....#", "#....#", "#....#", "#....#", "#....#", "#....#", "#....#", ".####."]),
    ('P', ["#####.", "#....#", "#....#", "#....#", "#####.", "#.....", "#.....", "#.....", "#....."]),
    ('Q', [".####.", "#....#", "#....#", "#....#", "#....#", "#..#.#", "#...#.", "#...##", ".###.#"]),
    ('R', ["#####.", "#....#", "#....#", "#....#", "#####.", "#..#..", "#...#.", "#....#", "#....#"]),
    ('S', [".####.", "#....#", "#.....", "#.....", ".####.", ".....#", ".....#", "#....#", ".####."]),
    ('T', ["######", "..##..", "..##..", "..##..", "..##..", "..##..", "..##..", "..##..", "..##.."]),
    ('U', ["#....#", "#....#", "#....#", "#....#", "#....#", "#....#", "#....#", "#....#", ".####."]),
    ('V', ["#....#", "#....#", "#....#", "#....#", ".#..#.", ".#..#.", ".#..#.", "..##..", "..##.."]),
    ('W', ["#....#", "#....#", "#....#", "#....#", "#.##.#", "#.##.#", "#.##.#", "##..##", "#....#"]),
    ('X', ["#....#", "#....#", ".#..#.", ".#..#.", "..##..", ".#..#.", ".#..#.", "#....#", "#....#"]),
    ('Y', ["#....#", "#....#", ".#..#.", ".#..#.", "..##..", "..##..", "..##..", "..##..", "..##.."]),
    ('Z', ["######", ".....#", "....#.", "...#..", "..#...", ".#....", "#.....", "#.....", "######"]),
];

/// Ink mask of one character cell, row-major `CELL_WIDTH x CELL_HEIGHT`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FontGlyph {
    pub ch: char,
    bits: [[bool; CELL_WIDTH]; CELL_HEIGHT],
}

impl FontGlyph {
    #[inline]
    pub fn ink(&self, x: usize, y: usize) -> bool {
        self.bits[y][x]
    }

    /// Ink coverage of the unit cell square at `(x, y)`; outside the cell is blank.
    #[inline]
    pub fn ink_at(&self, x: isize, y: isize) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < CELL_WIDTH
            && (y as usize) < CELL_HEIGHT
            && self.bits[y as usize][x as usize]
    }

    /// The raw cell as an image: ink 0, background 1.
    pub fn to_image<T: Scalar>(&self) -> GrayImage<T> {
        GrayImage::from_fn(CELL_WIDTH, CELL_HEIGHT, |x, y| {
            if self.ink(x, y) {
                T::zero()
            } else {
                T::one()
            }
        })
    }
}

pub fn glyph(ch: char) -> Option<FontGlyph> {
    let (_, rows) = GLYPHS.iter().find(|(c, _)| *c == ch)?;
    let mut bits = [[false; CELL_WIDTH]; CELL_HEIGHT];
    for (r, row) in rows.iter().enumerate() {
        for (c, b) in row.bytes().enumerate() {
            bits[r + 1][c + 1] = b == b'#';
        }
    }
    debug_assert!(rows.iter().all(|r| r.len() == INK_WIDTH));
    Some(FontGlyph { ch, bits })
}

pub fn is_supported(ch: char) -> bool {
    FONT_ALPHABET.contains(ch)
}
