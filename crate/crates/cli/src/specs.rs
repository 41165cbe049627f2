//! Parsers for the `name[:params]` arguments.

use inflap::euclid::{Domain, Profile};

fn numbers(name: &str, params: Option<&str>, want: usize) -> Result<Vec<f64>, String> {
    let Some(p) = params else { return Ok(Vec::new()) };
    let vals: Vec<f64> = p
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| format!("bad number `{s}` in `{name}:{p}`")))
        .collect::<Result<_, _>>()?;
    if vals.len() != want {
        return Err(format!("`{name}` takes {want} parameters, got {}", vals.len()));
    }
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(format!("non-finite parameter in `{name}:{p}`"));
    }
    Ok(vals)
}

fn split(spec: &str) -> (&str, Option<&str>) {
    match spec.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (spec, None),
    }
}

pub fn list_f64(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| {
            let v: f64 = x.trim().parse().map_err(|_| format!("bad number `{x}`"))?;
            if v.is_finite() { Ok(v) } else { Err(format!("non-finite value `{x}`")) }
        })
        .collect()
}

pub fn list_usize(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| format!("bad integer `{x}`")))
        .collect()
}

/// `square[:x0,y0,x1,y1]`, `annulus[:r_in,r_out]`, `lshape`, `exterior-disk[:radius,window]`.
pub fn domain(spec: &str) -> Result<Domain, String> {
    let (name, params) = split(spec);
    match name {
        "square" => match numbers(name, params, 4)?.as_slice() {
            [] => Ok(Domain::unit_square()),
            &[x0, y0, x1, y1] => Ok(Domain::Rect { x0, y0, x1, y1 }),
            _ => unreachable!(),
        },
        "annulus" => match numbers(name, params, 2)?.as_slice() {
            [] => Ok(Domain::Annulus { r_in: 1.0, r_out: 2.0 }),
            &[r_in, r_out] => Ok(Domain::Annulus { r_in, r_out }),
            _ => unreachable!(),
        },
        "lshape" if params.is_none() => Ok(Domain::LShape),
        "exterior-disk" => match numbers(name, params, 2)?.as_slice() {
            [] => Ok(Domain::ExteriorDisk { radius: 0.5, window: 2.0 }),
            &[radius, window] => Ok(Domain::ExteriorDisk { radius, window }),
            _ => unreachable!(),
        },
        _ => Err(format!("unknown domain `{spec}`; known: square, annulus, lshape, exterior-disk")),
    }
}

/// `const:c`, `affine:a,b,c`, `cone[:cx,cy]`, `aronsson`.
pub fn profile(spec: &str) -> Result<Profile, String> {
    let (name, params) = split(spec);
    match name {
        "const" => match numbers(name, params, 1)?.as_slice() {
            [] => Ok(Profile::Constant { c: 0.0 }),
            &[c] => Ok(Profile::Constant { c }),
            _ => unreachable!(),
        },
        "affine" => match numbers(name, params, 3)?.as_slice() {
            [] => Err("`affine` needs a,b,c".into()),
            &[a, b, c] => Ok(Profile::Affine { a, b, c }),
            _ => unreachable!(),
        },
        "cone" => match numbers(name, params, 2)?.as_slice() {
            [] => Ok(Profile::Cone { center: [0.0, 0.0] }),
            &[cx, cy] => Ok(Profile::Cone { center: [cx, cy] }),
            _ => unreachable!(),
        },
        "aronsson" if params.is_none() => Ok(Profile::Aronsson),
        _ => Err(format!("unknown profile `{spec}`; known: const, affine, cone, aronsson")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleSpec {
    HalfLine,
    HalfPlane { period: usize },
    BinaryTree,
    Fig3 { k_max: usize },
}

pub fn oracle(spec: &str) -> Result<OracleSpec, String> {
    let (name, params) = split(spec);
    let int = |default: usize| -> Result<usize, String> {
        match params {
            None => Ok(default),
            Some(p) => p.parse().map_err(|_| format!("bad parameter `{p}` for `{name}`")),
        }
    };
    match name {
        "half-line" if params.is_none() => Ok(OracleSpec::HalfLine),
        "half-plane" => Ok(OracleSpec::HalfPlane { period: int(8)? }),
        "binary-tree" if params.is_none() => Ok(OracleSpec::BinaryTree),
        "fig3" => Ok(OracleSpec::Fig3 { k_max: int(8)? }),
        _ => Err(format!("unknown oracle `{spec}`; known: half-line, half-plane[:p], binary-tree, fig3[:k]")),
    }
}

/// Boundary data for `exhaust`: `alternating` (half-plane only) or `const:c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryData {
    Alternating,
    Constant(f64),
}

pub fn boundary_data(spec: &str) -> Result<BoundaryData, String> {
    let (name, params) = split(spec);
    match name {
        "alternating" if params.is_none() => Ok(BoundaryData::Alternating),
        "const" => Ok(BoundaryData::Constant(numbers(name, params, 1)?.first().copied().unwrap_or(0.0))),
        _ => Err(format!("unknown boundary data `{spec}`; known: alternating, const:c")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_names_and_parameters() {
        assert_eq!(domain("annulus:1,3"), Ok(Domain::Annulus { r_in: 1.0, r_out: 3.0 }));
        assert_eq!(domain("square"), Ok(Domain::unit_square()));
        assert!(domain("square:1,2").is_err());
        assert!(domain("lshape:2").is_err());
        assert_eq!(profile("cone:-0.5,-0.5"), Ok(Profile::Cone { center: [-0.5, -0.5] }));
        assert_eq!(profile("const:2"), Ok(Profile::Constant { c: 2.0 }));
        assert!(profile("affine").is_err());
        assert_eq!(oracle("half-plane:6"), Ok(OracleSpec::HalfPlane { period: 6 }));
        assert!(oracle("moon").is_err());
        assert_eq!(list_f64("0.4, 0.2"), Ok(vec![0.4, 0.2]));
        assert!(list_usize("4,x").is_err());
        assert_eq!(boundary_data("const:-1"), Ok(BoundaryData::Constant(-1.0)));
    }
}
