//! Euclidean projection onto scaled simplices and their product.

use crate::error::{Error, Result};
use crate::network::{BlockVector, FlowProfile, Network};

/// Nearest point of `{x >= 0, sum x = r}` to `v`.
///
/// Sort-then-threshold: with `v` sorted descending, the active count is the
/// largest `j` for which `v_j - (sum_{k<=j} v_k - r) / j > 0`.
pub fn project_simplex(v: &[f64], r: f64) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot project an empty vector".into(),
        ));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "simplex radius must be positive, got {r}"
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(
            "non-finite input to projection".into(),
        ));
    }
    let mut out = vec![0.0; v.len()];
    project_simplex_into(v, r, &mut out);
    Ok(out)
}

pub(crate) fn project_simplex_into(v: &[f64], r: f64, out: &mut [f64]) {
    let tau = simplex_threshold(v, r);
    for (o, &x) in out.iter_mut().zip(v) {
        *o = (x - tau).max(0.0);
    }
}

fn simplex_threshold(v: &[f64], r: f64) -> f64 {
    if v.len() == 1 {
        return v[0] - r;
    }
    let mut sorted = v.to_vec();
    // stable, descending
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = sorted[0] - r;
    for (j, &x) in sorted.iter().enumerate() {
        cumsum += x;
        let t = (cumsum - r) / (j + 1) as f64;
        if x - t > 0.0 {
            tau = t;
        } else {
            break;
        }
    }
    tau
}

/// Block-wise projection onto the joint strategy set.
pub fn project_profile(net: &Network, y: &BlockVector) -> Result<FlowProfile> {
    net.check_dims(y)?;
    if y.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(
            "non-finite input to projection".into(),
        ));
    }
    let mut out = net.zeros();
    project_profile_raw(net, y.as_slice(), out.as_mut_slice());
    Ok(out)
}

pub(crate) fn project_profile_raw(net: &Network, y: &[f64], out: &mut [f64]) {
    let offs = net.offsets();
    for i in 0..net.num_sources() {
        let (lo, hi) = (offs[i], offs[i + 1]);
        project_simplex_into(&y[lo..hi], net.demand(i), &mut out[lo..hi]);
    }
}
