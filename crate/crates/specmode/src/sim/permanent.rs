//! Matrix permanents by Ryser's inclusion-exclusion formula.

use ndarray::ArrayView2;
use num_complex::Complex64;

use super::SimError;
use crate::numeric::NeumaierSum;

/// Ryser visits 2^k subsets; 16 keeps a single permanent under ~a million
/// complex multiply-adds.
pub const MAX_PERMANENT_SIZE: usize = 16;

/// Per(M) for a square complex matrix, O(2^k · k) via Gray-code updates of
/// the column-subset row sums:
/// Per(M) = (-1)^k Σ_{S≠∅} (-1)^{|S|} Π_i Σ_{j∈S} M_{ij}.
pub fn permanent(matrix: &ArrayView2<Complex64>) -> Result<Complex64, SimError> {
    let (rows, cols) = matrix.dim();
    if rows != cols {
        return Err(SimError::NotSquare { rows, cols });
    }
    let k = rows;
    if k > MAX_PERMANENT_SIZE {
        return Err(SimError::PermanentTooLarge {
            size: k,
            max: MAX_PERMANENT_SIZE,
        });
    }
    if k == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut row_sums = vec![Complex64::ZERO; k];
    let mut re = NeumaierSum::new();
    let mut im = NeumaierSum::new();
    let mut prev_gray: u64 = 0;
    for index in 1u64..(1 << k) {
        let gray = index ^ (index >> 1);
        let flipped = (gray ^ prev_gray).trailing_zeros() as usize;
        if gray & (1 << flipped) != 0 {
            for (i, sum) in row_sums.iter_mut().enumerate() {
                *sum += matrix[[i, flipped]];
            }
        } else {
            for (i, sum) in row_sums.iter_mut().enumerate() {
                *sum -= matrix[[i, flipped]];
            }
        }
        prev_gray = gray;
        let mut product = Complex64::new(1.0, 0.0);
        for sum in &row_sums {
            product *= sum;
        }
        // (-1)^{|S|}
        if gray.count_ones() % 2 == 0 {
            re.add(product.re);
            im.add(product.im);
        } else {
            re.add(-product.re);
            im.add(-product.im);
        }
    }
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * Complex64::new(re.total(), im.total()))
}

#[cfg(test)]
pub(crate) fn naive_permanent(matrix: &ArrayView2<Complex64>) -> Complex64 {
    // Direct sum over permutations; exponential, test oracle only.
    let k = matrix.nrows();
    assert_eq!(k, matrix.ncols());
    let mut cols: Vec<usize> = (0..k).collect();
    let mut total = Complex64::ZERO;
    permute(&mut cols, 0, &mut |perm| {
        let mut product = Complex64::new(1.0, 0.0);
        for (row, &col) in perm.iter().enumerate() {
            product *= matrix[[row, col]];
        }
        total += product;
    });
    total
}

#[cfg(test)]
fn permute(items: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute(items, start + 1, visit);
        items.swap(start, i);
    }
}
