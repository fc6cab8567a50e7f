//! Small dense helpers over nalgebra.

use nalgebra::DMatrix;

use crate::C64;

pub type CMatrix = DMatrix<C64>;

pub fn det(m: &CMatrix) -> C64 {
    if m.nrows() == 0 {
        return C64::new(1.0, 0.0);
    }
    m.clone().lu().determinant()
}

/// Singular values in descending order and the right singular vector of the
/// smallest one.
pub fn smallest_right_singular(m: &CMatrix) -> (Vec<f64>, Vec<C64>) {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let last = *order.last().unwrap();
    // rows of V^H are conjugated right singular vectors
    let v: Vec<C64> = (0..n).map(|j| v_t[(last, j)].conj()).collect();
    (sv, v)
}

/// All singular values in descending order with the matching right
/// singular vectors.
pub fn right_singular_vectors(m: &CMatrix) -> (Vec<f64>, Vec<Vec<C64>>) {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv = order.iter().map(|&i| svd.singular_values[i]).collect();
    let vs = order.iter().map(|&i| (0..n).map(|j| v_t[(i, j)].conj()).collect()).collect();
    (sv, vs)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    #[test]
    fn null_vector_of_rank_deficient_matrix() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 1.0), c(2.0, 2.0), c(0.5, 0.0), c(1.0, 0.0)]);
        assert!(det(&m).norm() < 1e-14);
        let (sv, v) = smallest_right_singular(&m);
        assert!(sv[1] < 1e-14 && sv[0] > 1.0);
        let r = &m * nalgebra::DVector::from_vec(v);
        assert!(r.norm() < 1e-14);
    }
}
