//! Index bookkeeping for operators on tensor-product spaces.
//!
//! Operators live on `H_1 ⊗ … ⊗ H_K` with row-major multi-indices: the flat
//! index of `(i_1, …, i_K)` is `Σ_k i_k · stride_k` with
//! `stride_k = Π_{j>k} dim_j`. All helpers are entrywise permutations or
//! contractions and cost `O(N²)` for total dimension `N`.

use crate::{CMatrix, C64};

/// Row-major strides for the given factor dimensions.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Total dimension `Π_k dims[k]`.
pub fn total_dim(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Decodes `flat` into a multi-index for `dims`.
fn decode(flat: usize, dims: &[usize], out: &mut [usize]) {
    let mut rem = flat;
    for k in (0..dims.len()).rev() {
        out[k] = rem % dims[k];
        rem /= dims[k];
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Transposes the factors flagged in `swap`, leaving the others untouched.
///
/// `mat` must be square of size `total_dim(dims)`.
pub fn partial_transpose_factors(mat: &CMatrix, dims: &[usize], swap: &[bool]) -> CMatrix {
    let n = total_dim(dims);
    assert_eq!(mat.nrows(), n, "matrix size must match factor dims");
    assert_eq!(dims.len(), swap.len());
    let st = strides(dims);
    let k = dims.len();
    let mut out = CMatrix::zeros(n, n);
    let mut ri = vec![0usize; k];
    let mut ci = vec![0usize; k];
    for r in 0..n {
        decode(r, dims, &mut ri);
        for c in 0..n {
            decode(c, dims, &mut ci);
            let mut rr = 0usize;
            let mut cc = 0usize;
            for (kk, &sw) in swap.iter().enumerate() {
                let (a, b) = if sw { (ci[kk], ri[kk]) } else { (ri[kk], ci[kk]) };
                rr += a * st[kk];
                cc += b * st[kk];
            }
            out[(rr, cc)] = mat[(r, c)];
        }
    }
    out
}

/// Reorders tensor factors: new factor `i` is old factor `perm[i]`.
///
/// Returns the permuted matrix together with the permuted dimension list.
pub fn permute_factors(mat: &CMatrix, dims: &[usize], perm: &[usize]) -> (CMatrix, Vec<usize>) {
    let n = total_dim(dims);
    assert_eq!(mat.nrows(), n, "matrix size must match factor dims");
    assert_eq!(dims.len(), perm.len());
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let st_new = strides(&new_dims);
    let k = dims.len();
    let mut out = CMatrix::zeros(n, n);
    let mut ri = vec![0usize; k];
    let mut ci = vec![0usize; k];
    for r in 0..n {
        decode(r, dims, &mut ri);
        for c in 0..n {
            decode(c, dims, &mut ci);
            let mut rr = 0usize;
            let mut cc = 0usize;
            for i in 0..k {
                rr += ri[perm[i]] * st_new[i];
                cc += ci[perm[i]] * st_new[i];
            }
            out[(rr, cc)] = mat[(r, c)];
        }
    }
    (out, new_dims)
}

/// Traces out the factors with `keep[k] == false`.
///
/// Returns the reduced matrix together with the kept dimension list.
pub fn partial_trace(mat: &CMatrix, dims: &[usize], keep: &[bool]) -> (CMatrix, Vec<usize>) {
    let n = total_dim(dims);
    assert_eq!(mat.nrows(), n, "matrix size must match factor dims");
    assert_eq!(dims.len(), keep.len());
    let kept_dims: Vec<usize> = dims
        .iter()
        .zip(keep)
        .filter(|(_, &k)| k)
        .map(|(&d, _)| d)
        .collect();
    let m = total_dim(&kept_dims);
    let st_kept = strides(&kept_dims);
    let k = dims.len();
    let mut out = CMatrix::zeros(m, m);
    let mut ri = vec![0usize; k];
    let mut ci = vec![0usize; k];
    for r in 0..n {
        decode(r, dims, &mut ri);
        for c in 0..n {
            decode(c, dims, &mut ci);
            // Off-diagonal in any traced factor contributes nothing.
            let mut diagonal = true;
            for kk in 0..k {
                if !keep[kk] && ri[kk] != ci[kk] {
                    diagonal = false;
                    break;
                }
            }
            if !diagonal {
                continue;
            }
            let mut rr = 0usize;
            let mut cc = 0usize;
            let mut pos = 0usize;
            for kk in 0..k {
                if keep[kk] {
                    rr += ri[kk] * st_kept[pos];
                    cc += ci[kk] * st_kept[pos];
                    pos += 1;
                }
            }
            out[(rr, cc)] += mat[(r, c)];
        }
    }
    (out, kept_dims)
}

/// Fast path: partial transpose of the second factor of a bipartite operator.
pub fn partial_transpose_b(mat: &CMatrix, d_a: usize, d_b: usize) -> CMatrix {
    let n = d_a * d_b;
    assert_eq!(mat.nrows(), n, "matrix size must match d_a*d_b");
    let mut out = CMatrix::zeros(n, n);
    for a in 0..d_a {
        for ap in 0..d_a {
            for b in 0..d_b {
                for bp in 0..d_b {
                    out[(a * d_b + bp, ap * d_b + b)] = mat[(a * d_b + b, ap * d_b + bp)];
                }
            }
        }
    }
    out
}

/// Hilbert–Schmidt inner product `Tr[A† B]`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    debug_assert_eq!(a.shape(), b.shape());
    let mut acc = C64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x.conj() * y;
    }
    acc
}

/// Real part of the Hilbert–Schmidt inner product (exact for Hermitian pairs).
pub fn hs_inner_re(a: &CMatrix, b: &CMatrix) -> f64 {
    hs_inner(a, b).re
}

/// Frobenius norm.
pub fn fro_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Maximum entry modulus.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
