//! Line integrals of functions of the continued roots along straight legs.
//!
//! The root triple is continued from a regular point of the leg; the far end
//! may be a branch point, whose algebraic singularity is absorbed by the
//! incomplete-beta node map.

use crate::curve::{continue_segment, CurveParams};
use crate::error::{Error, Result};
use crate::quad::{integrate_mapped_err, Node};
use num_complex::Complex64 as C;

/// Point of the segment `a -> b` at a mapped node, exact near both ends.
pub fn point_at(a: C, b: C, nd: &Node) -> C {
    if nd.tau <= 0.5 {
        a + (b - a) * nd.tau
    } else {
        b - (b - a) * nd.tau_c
    }
}

/// Root triples at the nodes of `a -> b`, continued from `xi_a` at `a`.
pub fn track_nodes(
    params: &CurveParams,
    a: C,
    b: C,
    xi_a: [C; 3],
    nodes: &[Node],
) -> Result<Vec<[C; 3]>> {
    let mut prev = a;
    let mut cur = xi_a;
    let mut out = Vec::with_capacity(nodes.len());
    for nd in nodes {
        let z = point_at(a, b, nd);
        cur = continue_segment(params, prev, z, cur)?;
        prev = z;
        out.push(cur);
    }
    Ok(out)
}

/// `int_a^b f(z, xi(z)) dz` with the triple known at the regular point `a`.
/// `mb` is the endpoint class at `b`: 1 regular, 2 square root, 3 cube root.
/// Legs that do not converge (a branch point close to the leg) are bisected.
/// Returns the value and an error estimate.
pub fn integrate_from<F>(
    params: &CurveParams,
    a: C,
    b: C,
    xi_a: [C; 3],
    mb: u32,
    tol: f64,
    f: F,
) -> Result<(C, f64)>
where
    F: Fn(C, &[C; 3]) -> C,
{
    integrate_split(params, a, b, xi_a, mb, tol, &f, 0)
}

#[allow(clippy::too_many_arguments)]
fn integrate_split<F>(
    params: &CurveParams,
    a: C,
    b: C,
    xi_a: [C; 3],
    mb: u32,
    tol: f64,
    f: &F,
    depth: u32,
) -> Result<(C, f64)>
where
    F: Fn(C, &[C; 3]) -> C,
{
    if a == b {
        return Ok((C::new(0.0, 0.0), 0.0));
    }
    let res = integrate_mapped_err(1, mb, tol, |nodes| {
        let xs = track_nodes(params, a, b, xi_a, nodes)?;
        Ok(nodes
            .iter()
            .zip(&xs)
            .map(|(nd, x)| f(point_at(a, b, nd), x))
            .collect())
    });
    match res {
        Ok((v, e)) => Ok((v * (b - a), e * (b - a).norm())),
        Err(Error::QuadratureNotConverged { .. }) if depth < 16 => {
            let m = 0.5 * (a + b);
            let (v1, e1) = integrate_split(params, a, m, xi_a, 1, tol, f, depth + 1)?;
            let xi_m = continue_segment(params, a, m, xi_a)?;
            let (v2, e2) = integrate_split(params, m, b, xi_m, mb, tol, f, depth + 1)?;
            Ok((v1 + v2, e1 + e2))
        }
        Err(e) => Err(e),
    }
}

/// Integral along a polyline of regular points, returning the value, an
/// error estimate and the continued triple at the last vertex.
pub fn integrate_polyline<F>(
    params: &CurveParams,
    pts: &[C],
    xi0: [C; 3],
    tol: f64,
    f: F,
) -> Result<(C, f64, [C; 3])>
where
    F: Fn(C, &[C; 3]) -> C,
{
    let mut total = C::new(0.0, 0.0);
    let mut err = 0.0;
    let mut xi = xi0;
    for w in pts.windows(2) {
        let (v, e) = integrate_from(params, w[0], w[1], xi, 1, tol, &f)?;
        total += v;
        err += e;
        xi = continue_segment(params, w[0], w[1], xi)?;
    }
    Ok((total, err, xi))
}

/// Polyline approximation of the arc of radius `r` from angle `from` to `to`
/// (excluding the starting point), with steps of at most `max_step` radians.
pub fn arc_points(r: f64, from: f64, to: f64, max_step: f64) -> Vec<C> {
    let n = ((to - from).abs() / max_step).ceil().max(1.0) as usize;
    (1..=n)
        .map(|k| C::from_polar(r, from + (to - from) * k as f64 / n as f64))
        .collect()
}
