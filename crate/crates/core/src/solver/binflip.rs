use crate::kernel::RngStream;
use crate::scalar::Real;

use super::iterate::MiBox;

/// Why binaries are being flipped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FlipMode {
    /// Cycle escape: each binary flips with probability equal to its fractionality.
    Perturb,
    /// Stall escape: a binary flips when its fractionality plus `max(rand(−0.3, 0.7), 0)` exceeds ½.
    Restart,
}

/// Flips binary entries of `zeta` to the opposite box endpoint according
/// to `mode`. Returns the new vector and the number of flips.
pub fn binflip<T: Real>(xi: &[T], zeta: &[T], mibox: &MiBox, mode: FlipMode, rng: &mut RngStream) -> (Vec<T>, usize) {
    assert_eq!(xi.len(), zeta.len(), "factor vector lengths");
    assert_eq!(zeta.len(), mibox.len(), "factor vector length");
    let (lo, hi) = (mibox.form.lower::<T>(), mibox.form.upper::<T>());
    let width = hi - lo;
    let half = T::lit(0.5);
    let mut out = zeta.to_vec();
    let mut flips = 0;
    for j in mibox.n_gc..mibox.len() {
        let f = (xi[j] - zeta[j]).abs() / width;
        let flip = match mode {
            FlipMode::Perturb => rng.unit() < f.as_f64(),
            FlipMode::Restart => {
                let r = rng.uniform(T::lit(-0.3), T::lit(0.7)).expect("valid interval");
                f + r.max(T::zero()) > half
            }
        };
        if flip {
            out[j] = if zeta[j] >= (lo + hi) * half { lo } else { hi };
            flips += 1;
        }
    }
    (out, flips)
}
