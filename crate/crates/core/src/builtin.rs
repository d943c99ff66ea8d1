//! Registry of the reference channels.
//!
//! Names accepted by [`builtin_channel`]: `example1`, `example2(eps)`,
//! `example3(eps)`, `example4(eps,delta)`, `example5`, `example6` and
//! `appendix`. Parameters may be omitted, in which case `eps = 0.1` and
//! `delta = 0.25`.

use crate::capacity::Y2Map;
use crate::channel::Dmic;
use crate::error::{Error, Result};

pub const DEFAULT_EPS: f64 = 0.1;
pub const DEFAULT_DELTA: f64 = 0.25;

/// Base names, in registry order.
pub const NAMES: [&str; 7] = [
    "example1", "example2", "example3", "example4", "example5", "example6", "appendix",
];

fn check_unit(name: &'static str, v: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(Error::OutOfRange {
            name,
            value: v,
            range: "[0, 1]",
        })
    }
}

fn bit(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// `y2 = x2 xor Z`, `Z ~ Bern(eps)`.
fn bsc(eps: f64, x: usize, y: usize) -> f64 {
    if x == y {
        1.0 - eps
    } else {
        eps
    }
}

/// Binary multiplier: `y1 = x1 * x2`, `y2 = x2`.
pub fn example1() -> Dmic {
    Dmic::from_fn(2, 2, 2, 2, |x1, x2, y1, y2| {
        bit(y1 == x1 * x2) * bit(y2 == x2)
    })
    .expect("valid tensor")
}

/// `y1 = x1 xor y2`, `y2 = x2 xor Z`.
pub fn example2(eps: f64) -> Result<Dmic> {
    let eps = check_unit("eps", eps)?;
    Dmic::from_fn(2, 2, 2, 2, |x1, x2, y1, y2| {
        bsc(eps, x2, y2) * bit(y1 == x1 ^ y2)
    })
}

/// `y1 = x1 * y2`, `y2 = x2 xor Z`.
pub fn example3(eps: f64) -> Result<Dmic> {
    let eps = check_unit("eps", eps)?;
    Dmic::from_fn(2, 2, 2, 2, |x1, x2, y1, y2| {
        bsc(eps, x2, y2) * bit(y1 == x1 * y2)
    })
}

/// `y1` is `x1 xor y2` erased (symbol 2) with probability `delta`;
/// `y2 = x2 xor V`, `V ~ Bern(eps)`.
pub fn example4(eps: f64, delta: f64) -> Result<Dmic> {
    let eps = check_unit("eps", eps)?;
    let delta = check_unit("delta", delta)?;
    Dmic::from_fn(2, 2, 3, 2, |x1, x2, y1, y2| {
        let erasure = match y1 {
            2 => delta,
            v if v == x1 ^ y2 => 1.0 - delta,
            _ => 0.0,
        };
        bsc(eps, x2, y2) * erasure
    })
}

/// `p(y2|x2)` rows `(.1, .9)`, `(.9, .1)`; `p'(y1|x1,y2)` is `(.75, .25)`
/// when `x1 = y2` and `(0, 1)` otherwise.
pub fn example5() -> Dmic {
    let py2 = [[0.1, 0.9], [0.9, 0.1]];
    Dmic::from_fn(2, 2, 2, 2, |x1, x2, y1, y2| {
        let p1 = if x1 == y2 { [0.75, 0.25] } else { [0.0, 1.0] };
        py2[x2][y2] * p1[y1]
    })
    .expect("valid tensor")
}

/// `y1 = x1 * x2`, `y2 = x1 xor x2`.
pub fn example6() -> Dmic {
    Dmic::from_fn(2, 2, 2, 2, |x1, x2, y1, y2| {
        bit(y1 == x1 * x2) * bit(y2 == x1 ^ x2)
    })
    .expect("valid tensor")
}

/// `p(y1 = 1 | x1 = i, x2 = j)`.
pub const APPENDIX_F: [[f64; 2]; 2] = [[0.1, 0.3], [0.5, 0.25]];
/// `p(y2 = 1 | x2 = j)`.
pub const APPENDIX_G: [f64; 2] = [0.1, 0.5];

/// One-sided channel with marginals `f_ij`, `g_j` and outputs conditionally
/// independent given the inputs.
pub fn appendix() -> Dmic {
    Dmic::from_fn(2, 2, 2, 2, |x1, x2, y1, y2| {
        let f = APPENDIX_F[x1][x2];
        let g = APPENDIX_G[x2];
        let p1 = if y1 == 1 { f } else { 1.0 - f };
        let p2 = if y2 == 1 { g } else { 1.0 - g };
        p1 * p2
    })
    .expect("valid tensor")
}

/// `y2' = 0` iff `x1 y2` is `00` or `11`.
pub fn example5_y2_map() -> Y2Map {
    Y2Map::new(2, 2, 2, vec![0, 1, 1, 0]).expect("valid map")
}

/// Parses `name`, `name(p)` or `name(p,q)` (also `name:p,q`).
pub fn builtin_channel(name: &str) -> Result<Dmic> {
    let name = name.trim();
    let (base, params) = match name.find(['(', ':']) {
        Some(i) => {
            let rest = name[i + 1..].trim_end_matches(')');
            let params = rest
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::UnknownChannel(name.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            (&name[..i], params)
        }
        None => (name, Vec::new()),
    };
    let arity = |n: usize| -> Result<()> {
        if params.len() > n {
            Err(Error::UnknownChannel(name.to_string()))
        } else {
            Ok(())
        }
    };
    let eps = params.first().copied().unwrap_or(DEFAULT_EPS);
    match base {
        "example1" => arity(0).map(|_| example1()),
        "example2" => arity(1).and_then(|_| example2(eps)),
        "example3" => arity(1).and_then(|_| example3(eps)),
        "example4" => {
            arity(2)?;
            example4(eps, params.get(1).copied().unwrap_or(DEFAULT_DELTA))
        }
        "example5" => arity(0).map(|_| example5()),
        "example6" => arity(0).map(|_| example6()),
        "appendix" => arity(0).map(|_| appendix()),
        _ => Err(Error::UnknownChannel(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::marginal_channels;

    #[test]
    fn parses_names_and_params() {
        assert_eq!(
            builtin_channel("example2(0.25)").unwrap(),
            example2(0.25).unwrap()
        );
        assert_eq!(
            builtin_channel("example2:0.25").unwrap(),
            example2(0.25).unwrap()
        );
        assert_eq!(builtin_channel("example2").unwrap(), example2(0.1).unwrap());
        assert_eq!(
            builtin_channel("example4(0.1, 0.5)").unwrap(),
            example4(0.1, 0.5).unwrap()
        );
        assert_eq!(builtin_channel("example4").unwrap().dims(), (2, 2, 3, 2));
        for n in NAMES {
            assert!(builtin_channel(n).is_ok(), "{n}");
        }
    }

    #[test]
    fn rejects_bad_names_and_params() {
        assert!(matches!(
            builtin_channel("example7"),
            Err(Error::UnknownChannel(_))
        ));
        assert!(matches!(
            builtin_channel("example5(0.1)"),
            Err(Error::UnknownChannel(_))
        ));
        assert!(matches!(
            builtin_channel("example2(x)"),
            Err(Error::UnknownChannel(_))
        ));
        assert!(matches!(
            builtin_channel("example2(1.5)"),
            Err(Error::OutOfRange { name: "eps", .. })
        ));
        assert!(example4(0.1, -0.1).is_err());
    }

    #[test]
    fn appendix_marginals() {
        let (py1, py2) = marginal_channels(&appendix());
        for i in 0..2 {
            for j in 0..2 {
                assert!((py1.get(i * 2 + j, 1) - APPENDIX_F[i][j]).abs() < 1e-15);
                assert!((py2.get(i * 2 + j, 1) - APPENDIX_G[j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn noiseless_example2_is_deterministic() {
        let c = example2(0.0).unwrap();
        for x1 in 0..2 {
            for x2 in 0..2 {
                assert_eq!(c.get(x1, x2, x1 ^ x2, x2), 1.0);
            }
        }
    }
}
