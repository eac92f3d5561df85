use super::SimpConfig;
use crate::error::{Error, Result};

const LAMBDA_LO: f64 = 1e-10;
const LAMBDA_HI: f64 = 1e10;
const VOLUME_TOL: f64 = 1e-6;
const MAX_BISECTION: usize = 200;

/// Optimality-criteria update with move limit and damping.
///
/// `x_e <- clamp(x_e (-dc_e / (lambda v_e))^eta, x_e - move, x_e + move)`
/// within `[x_min, 1]`, with `lambda` found by bisection so that the active
/// volume fraction equals `config.volfrac`. Passive elements are set to
/// `x_min` and excluded from the volume.
pub fn oc_update(x: &[f64], dc: &[f64], volumes: &[f64], passive: &[bool], config: &SimpConfig) -> Result<Vec<f64>> {
    let n = x.len();
    for len in [dc.len(), volumes.len(), passive.len()] {
        if len != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: len,
            });
        }
    }
    let v0: f64 = volumes.iter().zip(passive).filter(|p| !*p.1).map(|p| p.0).sum();
    if !(v0 > 0.0) {
        return Err(Error::Config("no active elements".into()));
    }
    let target = config.volfrac * v0;
    let mut x_new = vec![0.0; n];
    let update = |lambda: f64, out: &mut [f64]| -> f64 {
        let mut vol = 0.0;
        for e in 0..n {
            if passive[e] {
                out[e] = config.x_min;
                continue;
            }
            let lo = config.x_min.max(x[e] - config.move_limit);
            let hi = 1.0f64.min(x[e] + config.move_limit);
            let b = (-dc[e]).max(0.0) / (lambda * volumes[e]);
            let v = (x[e] * b.powf(config.damping)).clamp(lo, hi);
            out[e] = v;
            vol += v * volumes[e];
        }
        vol
    };

    // volume decreases with lambda
    let (mut lo, mut hi) = (LAMBDA_LO, LAMBDA_HI);
    for _ in 0..30 {
        if update(lo, &mut x_new) >= target - VOLUME_TOL * v0 {
            break;
        }
        lo *= 1e-10;
    }
    for _ in 0..30 {
        if update(hi, &mut x_new) <= target + VOLUME_TOL * v0 {
            break;
        }
        hi *= 1e10;
    }
    for _ in 0..MAX_BISECTION {
        let mid = (lo * hi).sqrt();
        let vol = update(mid, &mut x_new);
        if ((vol - target) / v0).abs() <= VOLUME_TOL {
            return Ok(x_new);
        }
        if vol > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Bisection {
        iterations: MAX_BISECTION,
        lo,
        hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> SimpConfig {
        SimpConfig {
            volfrac: 0.4,
            ..SimpConfig::default()
        }
    }

    fn volume(x: &[f64], v: &[f64], passive: &[bool]) -> f64 {
        let num: f64 = x.iter().zip(v).zip(passive).filter(|p| !*p.1).map(|p| p.0 .0 * p.0 .1).sum();
        let den: f64 = v.iter().zip(passive).filter(|p| !*p.1).map(|p| p.0).sum();
        num / den
    }

    #[test]
    fn uniform_input_is_a_fixed_point() {
        let x = vec![0.4; 10];
        let out = oc_update(&x, &[-2.0; 10], &[0.5; 10], &[false; 10], &config()).unwrap();
        for v in out {
            assert!((v - 0.4).abs() < 1e-6);
        }
    }

    #[test]
    fn volume_and_move_limit() {
        let n = 50;
        let x = vec![0.4; n];
        let dc: Vec<f64> = (0..n).map(|i| -((i * 7 % 13) as f64 + 0.1)).collect();
        let v: Vec<f64> = (0..n).map(|i| 1.0 + (i % 3) as f64 * 0.25).collect();
        let mut passive = vec![false; n];
        passive[3] = true;
        let mut x = x;
        x[3] = 1e-3;
        let out = oc_update(&x, &dc, &v, &passive, &config()).unwrap();
        assert!((volume(&out, &v, &passive) - 0.4).abs() <= 1e-4);
        assert_eq!(out[3], 1e-3);
        for (a, b) in out.iter().zip(&x) {
            assert!((a - b).abs() <= 0.2 + 1e-12);
            assert!(*a >= 1e-3 && *a <= 1.0);
        }
    }

    #[test]
    fn infeasible_target_reports_bracket() {
        // every element already at its upper move bound cannot reach volfrac 0.9
        let cfg = SimpConfig {
            volfrac: 0.9,
            ..SimpConfig::default()
        };
        let err = oc_update(&[0.1; 4], &[-1.0; 4], &[1.0; 4], &[false; 4], &cfg).unwrap_err();
        assert!(matches!(err, Error::Bisection { .. }));
    }
}
