//! Published 5x5 ground states on either side of the first crossing, as
//! `(p, q, re, im)`. Only moduli are compared: the overall phase convention
//! of the source is unknown.

#![allow(dead_code)]

pub const PHI_0333: [(usize, usize, f64, f64); 25] = [
    (1, 1, 0.0, 0.0),
    (1, 2, 0.0003, -0.0002),
    (1, 3, 0.144, -0.0009),
    (1, 4, 0.0003, 0.0002),
    (1, 5, 0.0, 0.0),
    (2, 1, 0.0003, 0.0002),
    (2, 2, 0.1448, 0.0),
    (2, 3, 0.3536, -0.0011),
    (2, 4, 0.1448, -0.0009),
    (2, 5, 0.0003, -0.0002),
    (3, 1, 0.1440, 0.0009),
    (3, 2, 0.3536, 0.0011),
    (3, 3, 0.5772, 0.0),
    (3, 4, 0.3536, -0.0011),
    (3, 5, 0.144, 0.0009),
    (4, 1, 0.0003, -0.0002),
    (4, 2, 0.1448, 0.0009),
    (4, 3, 0.3536, 0.0011),
    (4, 4, 0.1448, 0.0),
    (4, 5, 0.0003, 0.0002),
    (5, 1, 0.0, 0.0),
    (5, 2, 0.0003, 0.0002),
    (5, 3, 0.1440, 0.0009),
    (5, 4, 0.0003, -0.0002),
    (5, 5, 0.0, 0.0),
];

/// Three imaginary parts appear in print with a dropped zero
/// (`0.00713`, `0.00745`, `0.00729`). Their mirror partners read `0.0713`,
/// `0.0745`, `0.0729`, and only the corrected values give a unit norm.
pub const PHI_0334: [(usize, usize, f64, f64); 25] = [
    (1, 1, -0.0004, 0.0),
    (1, 2, 0.1251, -0.0713),
    (1, 3, 0.0022, -0.1763),
    (1, 4, -0.1232, 0.0745),
    (1, 5, 0.0004, 0.0),
    (2, 1, 0.1251, 0.0713),
    (2, 2, 0.3065, 0.0),
    (2, 3, 0.0018, -0.2890),
    (2, 4, 0.3064, -0.0039),
    (2, 5, 0.1260, -0.0698),
    (3, 1, 0.0022, 0.1763),
    (3, 2, 0.0018, 0.2890),
    (3, 3, 0.0, 0.0),
    (3, 4, -0.0018, 0.2890),
    (3, 5, -0.0022, 0.1763),
    (4, 1, -0.1232, 0.0745),
    (4, 2, -0.3064, 0.0039),
    (4, 3, -0.0018, -0.2890),
    (4, 4, 0.3065, 0.0),
    (4, 5, 0.1242, 0.0729),
    (5, 1, 0.0004, 0.0),
    (5, 2, -0.1260, 0.0698),
    (5, 3, -0.0022, 0.1763),
    (5, 4, 0.1242, -0.0729),
    (5, 5, -0.0004, 0.0),
];

/// Entries of `PHI_0334` as printed, before the correction above.
pub const PHI_0334_AS_PRINTED: [(usize, usize, f64, f64); 3] = [
    (1, 2, 0.1251, -0.00713),
    (1, 4, -0.1232, 0.00745),
    (4, 5, 0.1242, 0.00729),
];

pub fn modulus(re: f64, im: f64) -> f64 {
    re.hypot(im)
}

pub fn norm_sqr(table: &[(usize, usize, f64, f64)]) -> f64 {
    table.iter().map(|&(_, _, re, im)| re * re + im * im).sum()
}

pub const PUBLISHED_OVERLAP: f64 = 1.58e-5;
