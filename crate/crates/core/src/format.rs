//! Flat key-value problem files.
//!
//! ```text
//! # H = H0 + f(t) V, J = Tr(U rho0 U† A)
//! H0   = 0 0 0 1          # c0 hx hy hz  for  c0·I + h·σ
//! V    = 0 1 0 0
//! rho0 = 0.5 0 -0.5 0
//! A    = 0.5 0.5 0 0
//! T    = pi/12
//! ```
//!
//! Every number accepts the `p*pi/q` forms of [`crate::expr::parse_real`].
//! `#` starts a comment; keys are case-sensitive and each appears once.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::expr::parse_real;
use crate::problem::ControlProblem;
use crate::su2::{Bloch3, Hermitian2};

const MATRIX_KEYS: [&str; 4] = ["H0", "V", "rho0", "A"];

pub fn problem_to_text(p: &ControlProblem) -> String {
    let mut s = String::from("# H = H0 + f(t) V; matrices as c0 hx hy hz for c0*I + h.sigma\n");
    for (key, m) in MATRIX_KEYS.iter().zip([&p.h0, &p.v, &p.rho0, &p.a]) {
        let _ = writeln!(
            s,
            "{key} = {:.16e} {:.16e} {:.16e} {:.16e}",
            m.c0 + 0.0,
            m.h.x + 0.0,
            m.h.y + 0.0,
            m.h.z + 0.0
        );
    }
    let _ = writeln!(s, "T = {:.16e}", p.horizon);
    s
}

pub fn problem_from_text(text: &str) -> Result<ControlProblem> {
    let mut mats: [Option<Hermitian2>; 4] = [None; 4];
    let mut horizon = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(line_no, "expected `key = values`"))?;
        let key = key.trim();
        let values = value
            .split_whitespace()
            .map(|tok| parse_real(tok).map_err(|m| Error::parse(line_no, m)))
            .collect::<Result<Vec<f64>>>()?;
        if key == "T" {
            if horizon.is_some() {
                return Err(Error::parse(line_no, "duplicate key `T`"));
            }
            match values[..] {
                [t] => horizon = Some(t),
                _ => return Err(Error::parse(line_no, "`T` takes one value")),
            }
            continue;
        }
        let idx = MATRIX_KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| Error::parse(line_no, format!("unknown key `{key}`")))?;
        if mats[idx].is_some() {
            return Err(Error::parse(line_no, format!("duplicate key `{key}`")));
        }
        match values[..] {
            [c0, x, y, z] => mats[idx] = Some(Hermitian2::new(c0, Bloch3::new(x, y, z))),
            _ => {
                return Err(Error::parse(
                    line_no,
                    format!("`{key}` takes four values: c0 hx hy hz"),
                ))
            }
        }
    }
    let missing = |k: &str| Error::parse(0, format!("missing key `{k}`"));
    let [h0, v, rho0, a] = mats;
    ControlProblem::new(
        h0.ok_or_else(|| missing("H0"))?,
        v.ok_or_else(|| missing("V"))?,
        rho0.ok_or_else(|| missing("rho0"))?,
        a.ok_or_else(|| missing("A"))?,
        horizon.ok_or_else(|| missing("T"))?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Preset;

    #[test]
    fn round_trip_is_exact() {
        let p = Preset::SpinRotation { vx: 0.6, vy: -0.8 }
            .problem(std::f64::consts::PI / 7.0)
            .unwrap();
        assert_eq!(problem_from_text(&problem_to_text(&p)).unwrap(), p);
    }

    #[test]
    fn accepts_pi_expressions() {
        let text = "H0 = 0 0 0 1\nV = 0 1 0 0 # coupling\nrho0 = 1/2 0 -1/2 0\nA = 0.5 0.5 0 0\nT = pi/12\n";
        let p = problem_from_text(text).unwrap();
        assert_eq!(p.horizon, std::f64::consts::PI / 12.0);
        assert_eq!(p.rho0.h.y, -0.5);
    }

    #[test]
    fn rejects_malformed_files() {
        let ok = "H0 = 0 0 0 1\nV = 0 1 0 0\nrho0 = 0.5 0 0 0.5\nA = 0.5 0 0 0.5\nT = 1\n";
        assert!(problem_from_text(ok).is_ok());
        for bad in [
            ok.replace("T = 1", "T = 1 2"),
            ok.replace("V = 0 1 0 0", "V = 0 1 0"),
            ok.replace("T = 1\n", ""),
            format!("{ok}A = 1 0 0 0\n"),
            format!("{ok}B = 1 0 0 0\n"),
            ok.replace("T = 1", "T = x"),
            ok.replace("rho0 = 0.5 0 0 0.5", "rho0 = 1 0 0 1"),
        ] {
            assert!(problem_from_text(&bad).is_err(), "{bad}");
        }
    }
}
