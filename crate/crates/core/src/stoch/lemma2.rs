//! The damped integral of the corrected constant and the undamped witness.

use crate::quad::tanh_sinh_split;
use crate::scalar::Real;

fn inner_tol<T: Real>() -> T {
    (T::epsilon() * T::lit(1e3)).max(T::lit(1e-13))
}

// inner values carry round-off, so the outer rule asks for less
fn outer_tol<T: Real>() -> T {
    (T::epsilon() * T::lit(1e5)).max(T::lit(1e-10))
}

/// Break points `0, 1, 2, 4, …` below `x`, then `x − 4, x − 2, x − 1`, then `x`.
fn breaks<T: Real>(x: T) -> Vec<T> {
    let mut b = vec![T::zero()];
    let mut p = T::one();
    while p < x {
        b.push(p);
        p = p + p;
    }
    let mut d = T::lit(4.0);
    while d >= T::one() {
        if x - d > *b.last().expect("nonempty") {
            b.push(x - d);
        }
        d = d * T::lit(0.5);
    }
    b.push(x);
    b.dedup();
    b
}

/// `∫₀^x (e^y − 1) y^{h−3/2} dy`.
pub fn inner_integral<T: Real>(h: T, x: T) -> T {
    let q = h - T::lit(0.5);
    // (e^y − 1)/y · y^{h−½} keeps tiny nodes finite
    tanh_sinh_split(|_, y, _| y.exp_m1() / y * y.powf(q), &breaks(x), inner_tol())
}

/// `e^{−x} ∫₀^x (e^y − 1) y^{h−3/2} dy`, without forming `e^x`.
fn damped_inner<T: Real>(h: T, x: T) -> T {
    let q = h - T::lit(0.5);
    let ex = (-x).exp();
    tanh_sinh_split(
        |_, y, dx| {
            if y < T::one() {
                ex * (y.exp_m1() / y) * y.powf(q)
            } else {
                ((-dx).exp() - ex) * y.powf(q - T::one())
            }
        },
        &breaks(x),
        inner_tol(),
    )
}

/// The by-parts evaluation of `∫₀¹ (e^y − 1) y^{h−3/2} dy`:
/// `(e−1)/(h−½) − (e − ∫₀¹ e^y y^{h+½} dy)/((h−½)(h+½))`, with the remaining
/// integral summed as `Σ 1/(k!(k+h+3/2))`.
pub fn inner_integral_by_parts<T: Real>(h: T) -> T {
    let half = T::lit(0.5);
    let e = T::one().exp();
    let mut rest = T::zero();
    let mut fact = T::one();
    for k in 0..40 {
        if k > 0 {
            fact = fact * T::of(k);
        }
        rest = rest + T::one() / (fact * (T::of(k) + h + T::lit(1.5)));
    }
    (e - T::one()) / (h - half) - (e - rest) / ((h - half) * (h + half))
}

/// `∫₀^λ e^{−2x} (∫₀^x (e^y − 1) y^{h−3/2} dy)² dx`.
pub fn lemma2_integral<T: Real>(h: T, lambda_upper: T) -> T {
    lemma2_piece(h, T::zero(), lambda_upper)
}

fn lemma2_piece<T: Real>(h: T, a: T, b: T) -> T {
    if !(b > a) {
        return T::zero();
    }
    let mut br: Vec<T> = breaks(b).into_iter().filter(|x| *x > a).collect();
    br.insert(0, a);
    tanh_sinh_split(
        |x, _, _| {
            let g = damped_inner(h, x);
            g * g
        },
        &br,
        outer_tol(),
    )
}

/// [`lemma2_integral`] at each upper limit, accumulated over the sorted limits
/// so the returned values are exactly nondecreasing in `λ`.
pub fn lemma2_scan<T: Real>(h: T, lambdas: &[T]) -> Vec<T> {
    cumulative(lambdas, |a, b| lemma2_piece(h, a, b))
}

/// `∫₀^λ (∫₀^x (e^y − 1) y^{a−1} dy)² dx` at each `λ`; this undamped quantity
/// grows like `e^{2λ}`.
pub fn ttv_divergence_witness<T: Real>(a: T, lambdas: &[T]) -> Vec<T> {
    let h = a + T::lit(0.5);
    cumulative(lambdas, |lo, hi| {
        let mut br: Vec<T> = breaks(hi).into_iter().filter(|x| *x > lo).collect();
        br.insert(0, lo);
        tanh_sinh_split(
            |x, _, _| {
                let f = inner_integral(h, x);
                f * f
            },
            &br,
            outer_tol(),
        )
    })
}

fn cumulative<T: Real>(lambdas: &[T], piece: impl Fn(T, T) -> T) -> Vec<T> {
    let mut order: Vec<usize> = (0..lambdas.len()).collect();
    order.sort_by(|&i, &j| lambdas[i].partial_cmp(&lambdas[j]).expect("finite limits"));
    let mut out = vec![T::zero(); lambdas.len()];
    let mut acc = T::zero();
    let mut prev = T::zero();
    for i in order {
        let l = lambdas[i].max(T::zero());
        acc = acc + piece(prev, l);
        prev = l;
        out[i] = acc;
    }
    out
}
