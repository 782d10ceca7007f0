use num_complex::Complex64 as C64;

use super::{solve, CMatrix};
use crate::error::LinalgError;

// 1-norm bound below which the unscaled [13/13] Padé approximant is accurate to unit roundoff
// (Higham, 2005).
const THETA_13: f64 = 5.371920351148152;

// Coefficients b_0..b_13 of the [13/13] Padé approximant to exp.
const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Default cap on the number of squarings.
pub const DEFAULT_MAX_SQUARINGS: u32 = 64;

/// Matrix exponential by [13/13] Padé scaling and squaring with the default squaring cap.
pub fn expm(a: &CMatrix) -> Result<CMatrix, LinalgError> {
    expm_with_cap(a, DEFAULT_MAX_SQUARINGS)
}

/// Matrix exponential by [13/13] Padé scaling and squaring.
///
/// The matrix is scaled by `2^-s` with `s = max(0, ceil(log2(|a|_1 / theta_13)))`; if `s`
/// exceeds `max_squarings` the call fails with [`LinalgError::Overflow`].
pub fn expm_with_cap(a: &CMatrix, max_squarings: u32) -> Result<CMatrix, LinalgError> {
    let n = a.ensure_square()?;
    if !a.is_finite() {
        return Err(LinalgError::NonFinite("expm input"));
    }
    let norm = a.norm_one();
    if norm == 0.0 {
        return Ok(CMatrix::identity(n));
    }
    let s = if norm > THETA_13 { (norm / THETA_13).log2().ceil() as i64 } else { 0 };
    if s > max_squarings as i64 {
        return Err(LinalgError::Overflow { exponent: s as u32, cap: max_squarings });
    }
    let s = s.max(0) as u32;
    let scaled = a.scale_real(0.5f64.powi(s as i32));

    let ident = CMatrix::identity(n);
    let a2 = scaled.matmul(&scaled);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let b = &PADE_13;
    let lin = |terms: &[(&CMatrix, f64)]| -> CMatrix {
        let mut out = CMatrix::zeros(n, n);
        for (m, coeff) in terms {
            let c = C64::new(*coeff, 0.0);
            for (o, x) in out.as_mut_slice().iter_mut().zip(m.as_slice()) {
                *o += x * c;
            }
        }
        out
    };
    let u_inner = a6.matmul(&lin(&[(&a6, b[13]), (&a4, b[11]), (&a2, b[9])]));
    let u_tail = lin(&[(&a6, b[7]), (&a4, b[5]), (&a2, b[3]), (&ident, b[1])]);
    let u = scaled.matmul(&(&u_inner + &u_tail));
    let v_inner = a6.matmul(&lin(&[(&a6, b[12]), (&a4, b[10]), (&a2, b[8])]));
    let v_tail = lin(&[(&a6, b[6]), (&a4, b[4]), (&a2, b[2]), (&ident, b[0])]);
    let v = &v_inner + &v_tail;

    let p = &v + &u;
    let q = &v - &u;
    let mut r = solve(&q, &p)?;
    for _ in 0..s {
        r = r.matmul(&r);
    }
    if !r.is_finite() {
        return Err(LinalgError::NonFinite("expm"));
    }
    Ok(r)
}
