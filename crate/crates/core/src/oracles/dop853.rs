//! Dormand–Prince 8(5,3) explicit Runge–Kutta stepper with adaptive step control.

use crate::{Error, Result};

const C: [f64; 12] = [
    0.0,
    0.05260015195876773,
    0.0789002279381516,
    0.1183503419072274,
    0.2816496580927726,
    0.3333333333333333,
    0.25,
    0.3076923076923077,
    0.6512820512820513,
    0.6,
    0.8571428571428571,
    1.0,
];

const A: [&[f64]; 12] = [
    &[],
    &[0.05260015195876773],
    &[0.0197250569845379, 0.0591751709536137],
    &[0.02958758547680685, 0.0, 0.08876275643042054],
    &[0.2413651341592667, 0.0, -0.8845494793282861, 0.924834003261792],
    &[0.037037037037037035, 0.0, 0.0, 0.17082860872947386, 0.12546768756682242],
    &[0.037109375, 0.0, 0.0, 0.17025221101954405, 0.06021653898045596, -0.017578125],
    &[
        0.03709200011850479,
        0.0,
        0.0,
        0.17038392571223998,
        0.10726203044637328,
        -0.015319437748624402,
        0.008273789163814023,
    ],
    &[
        0.6241109587160757,
        0.0,
        0.0,
        -3.3608926294469414,
        -0.868219346841726,
        27.59209969944671,
        20.154067550477894,
        -43.48988418106996,
    ],
    &[
        0.47766253643826434,
        0.0,
        0.0,
        -2.4881146199716677,
        -0.590290826836843,
        21.230051448181193,
        15.279233632882423,
        -33.28821096898486,
        -0.020331201708508627,
    ],
    &[
        -0.9371424300859873,
        0.0,
        0.0,
        5.186372428844064,
        1.0914373489967295,
        -8.149787010746927,
        -18.52006565999696,
        22.739487099350505,
        2.4936055526796523,
        -3.0467644718982196,
    ],
    &[
        2.273310147516538,
        0.0,
        0.0,
        -10.53449546673725,
        -2.0008720582248625,
        -17.9589318631188,
        27.94888452941996,
        -2.8589982771350235,
        -8.87285693353063,
        12.360567175794303,
        0.6433927460157636,
    ],
];

const B: [f64; 12] = [
    0.054293734116568765,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450312892752409,
    1.8915178993145003,
    -5.801203960010585,
    0.3111643669578199,
    -0.1521609496625161,
    0.20136540080403034,
    0.04471061572777259,
];

const E3: [f64; 13] = [
    -0.18980075407240762,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450312892752409,
    1.8915178993145003,
    -5.801203960010585,
    -0.4226823213237919,
    -0.1521609496625161,
    0.20136540080403034,
    0.02265179219836082,
    0.0,
];

const E5: [f64; 13] = [
    0.01312004499419488,
    0.0,
    0.0,
    0.0,
    0.0,
    -1.2251564463762044,
    -0.4957589496572502,
    1.6643771824549864,
    -0.35032884874997366,
    0.3341791187130175,
    0.08192320648511571,
    -0.022355307863886294,
    0.0,
];

const MAX_STEPS: usize = 1_000_000;

/// How an integration ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Reached,
    /// The stop predicate fired after the step ending at this abscissa.
    Stopped(f64),
}

/// Integrates y′ = f(x, y) from x0 to x_end, calling `observe` after every accepted step.
///
/// `stop` is checked on each accepted state; when it returns true the run ends early.
#[allow(clippy::too_many_arguments)]
pub fn integrate<F, O, S>(
    f: F,
    x0: f64,
    y0: &[f64],
    x_end: f64,
    rtol: f64,
    atol: f64,
    mut observe: O,
    stop: S,
) -> Result<Outcome>
where
    F: Fn(f64, &[f64], &mut [f64]),
    O: FnMut(f64, &[f64]),
    S: Fn(&[f64]) -> bool,
{
    let n = y0.len();
    let dir = if x_end >= x0 { 1.0 } else { -1.0 };
    let mut x = x0;
    let mut y = y0.to_vec();
    let mut k = vec![vec![0.0; n]; 13];
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    f(x, &y, &mut k[0]);
    let mut h = dir * (1e-3f64).min((x_end - x0).abs());
    observe(x, &y);

    let mut steps = 0;
    while (x_end - x) * dir > 0.0 {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::NonConvergence("too many integration steps".into()));
        }
        if (x + h - x_end) * dir > 0.0 {
            h = x_end - x;
        }
        let mut rejected = false;
        loop {
            if h.abs() < 1e-14 * x.abs().max(1.0) {
                return Err(Error::NonConvergence(format!("step size underflow at x = {x}")));
            }
            for s in 1..12 {
                for i in 0..n {
                    let mut acc = 0.0;
                    for (j, a) in A[s].iter().enumerate() {
                        acc += a * k[j][i];
                    }
                    tmp[i] = y[i] + h * acc;
                }
                f(x + C[s] * h, &tmp, &mut k[s]);
            }
            for i in 0..n {
                let mut acc = 0.0;
                for (s, b) in B.iter().enumerate() {
                    acc += b * k[s][i];
                }
                y_new[i] = y[i] + h * acc;
            }
            let x_new = if (x + h - x_end) * dir >= 0.0 { x_end } else { x + h };
            f(x_new, &y_new, &mut k[12]);
            let mut e5 = 0.0;
            let mut e3 = 0.0;
            for i in 0..n {
                let sc = atol + rtol * y[i].abs().max(y_new[i].abs());
                let mut d5 = 0.0;
                let mut d3 = 0.0;
                for s in 0..13 {
                    d5 += E5[s] * k[s][i];
                    d3 += E3[s] * k[s][i];
                }
                e5 += (d5 / sc).powi(2);
                e3 += (d3 / sc).powi(2);
            }
            let denom = e5 + 0.01 * e3;
            let err = if denom > 0.0 { h.abs() * e5 / (denom * n as f64).sqrt() } else { 0.0 };
            if err < 1.0 {
                let mut factor = if err == 0.0 { 10.0 } else { (0.9 * err.powf(-0.125)).min(10.0) };
                if rejected {
                    factor = factor.min(1.0);
                }
                x = x_new;
                std::mem::swap(&mut y, &mut y_new);
                k.swap(0, 12);
                h *= factor;
                break;
            }
            h *= (0.9 * err.powf(-0.125)).max(0.2);
            rejected = true;
        }
        observe(x, &y);
        if stop(&y) {
            return Ok(Outcome::Stopped(x));
        }
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::NonConvergence(format!("non-finite state at x = {x}")));
        }
    }
    Ok(Outcome::Reached)
}
