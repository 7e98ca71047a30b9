//! Damm check digit over decimal strings.
//!
//! The table is a totally anti-symmetric quasigroup of order 10 with a zero
//! diagonal, so every single-digit substitution and every adjacent
//! transposition changes the final interim digit.

const TABLE: [[u8; 10]; 10] = [
    [0, 3, 1, 7, 5, 9, 8, 6, 4, 2],
    [7, 0, 9, 2, 1, 5, 4, 8, 6, 3],
    [4, 2, 0, 6, 8, 7, 1, 3, 5, 9],
    [1, 7, 5, 0, 9, 8, 3, 4, 2, 6],
    [6, 1, 2, 3, 0, 4, 5, 9, 7, 8],
    [3, 6, 7, 4, 2, 0, 9, 5, 8, 1],
    [5, 8, 6, 9, 7, 2, 0, 1, 3, 4],
    [8, 9, 4, 5, 3, 6, 2, 0, 1, 7],
    [9, 4, 3, 8, 6, 1, 7, 2, 0, 5],
    [2, 5, 8, 1, 4, 3, 6, 7, 9, 0],
];

fn interim(digits: &[u8]) -> u8 {
    digits.iter().fold(0u8, |acc, &d| TABLE[acc as usize][d as usize])
}

/// Check digit for a sequence of ASCII decimal digits.
///
/// Panics if a byte is not `b'0'..=b'9'`; callers validate first.
pub fn check_digit(ascii_digits: &[u8]) -> u8 {
    let values: Vec<u8> = ascii_digits
        .iter()
        .map(|&b| {
            assert!(b.is_ascii_digit(), "non-digit byte {b:#x}");
            b - b'0'
        })
        .collect();
    interim(&values)
}

/// True when the last digit is the Damm check digit of the rest.
pub fn verify(ascii_digits: &[u8]) -> bool {
    !ascii_digits.is_empty() && ascii_digits.iter().all(u8::is_ascii_digit) && check_digit(ascii_digits) == 0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_value() {
        assert_eq!(check_digit(b"572"), 4);
        assert!(verify(b"5724"));
        assert!(!verify(b"5723"));
    }

    #[test]
    fn zeros_check_to_zero() {
        assert_eq!(check_digit(b"0000000000000"), 0);
    }

    #[test]
    fn table_is_weakly_totally_antisymmetric() {
        for c in 0..10 {
            for x in 0..10 {
                for y in 0..10 {
                    if x != y {
                        assert_ne!(TABLE[TABLE[c][x] as usize][y], TABLE[TABLE[c][y] as usize][x]);
                    }
                }
            }
        }
        for (i, row) in TABLE.iter().enumerate() {
            assert_eq!(row[i], 0);
            let mut seen = [false; 10];
            row.iter().for_each(|&d| seen[d as usize] = true);
            assert!(seen.iter().all(|&s| s));
        }
    }
}
