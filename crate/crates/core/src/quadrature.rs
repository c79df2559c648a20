//! Gauss–Legendre rules on reference and physical intervals.

use crate::scalar::Real;

/// Four-point Gauss–Legendre nodes on [-1, 1].
pub const GAUSS4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];

/// Matching weights for [`GAUSS4_NODES`].
pub const GAUSS4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

/// Integrate `f` over `[a, b]` with `panels` equal panels of the 4-point rule.
pub fn composite_gauss4<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, panels: usize) -> T {
    let panels = panels.max(1);
    let h = (b - a) / T::from_usize_lossy(panels);
    let half = h * T::lit(0.5);
    let mut acc = T::zero();
    for p in 0..panels {
        let mid = a + h * (T::from_usize_lossy(p) + T::lit(0.5));
        for (x, w) in GAUSS4_NODES.iter().zip(GAUSS4_WEIGHTS.iter()) {
            acc = acc + T::lit(*w) * f(mid + half * T::lit(*x));
        }
    }
    acc * half
}

/// Map the 4-point rule onto `[a, b]`: physical points and weights.
pub fn gauss4_on<T: Real>(a: T, b: T) -> [(T, T); 4] {
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let mut out = [(T::zero(), T::zero()); 4];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = (mid + half * T::lit(GAUSS4_NODES[k]), half * T::lit(GAUSS4_WEIGHTS[k]));
    }
    out
}
