//! Matrix exponential of real square matrices by scaling and squaring with a
//! degree-13 Padé approximant.

use nalgebra::DMatrix;

const THETA_13: f64 = 5.371920351148152;

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

fn norm_1(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    let id = DMatrix::<f64>::identity(n, n);
    let nrm = norm_1(a);
    if nrm == 0.0 {
        return id;
    }
    let s = if nrm > THETA_13 {
        (nrm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let a = a.scale(2f64.powi(-s));
    let b = &PADE_13;

    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * (a6.scale(b[13]) + a4.scale(b[11]) + a2.scale(b[9]))
        + a6.scale(b[7])
        + a4.scale(b[5])
        + a2.scale(b[3])
        + id.scale(b[1]);
    let u = &a * u_inner;
    let v = &a6 * (a6.scale(b[12]) + a4.scale(b[10]) + a2.scale(b[8]))
        + a6.scale(b[6])
        + a4.scale(b[4])
        + a2.scale(b[2])
        + id.scale(b[0]);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).expect("Padé denominator is singular");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}
