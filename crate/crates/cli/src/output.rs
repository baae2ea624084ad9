//! CSV and JSON emitters. Numbers are written in Rust's shortest
//! round-trip form, so identical runs give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use fibwalk::observables::SpreadEntry;
use fibwalk::{density, SpinorField};
use serde::Serialize;

use crate::error::CliError;

pub const DENSITY_HEADER: &str = "m,x,rho,re_u,im_u,re_d,im_d";
pub const SPREAD_HEADER: &str = "j,norm,mean,sigma";
pub const CONVERGENCE_HEADER: &str = "n,L1_distance";

/// Plain decimal in a readable range, exponent form elsewhere.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 {
        "0".to_string()
    } else if (1e-4..1e7).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn density_csv(field: &SpinorField) -> String {
    let rho = density(field);
    let mut out = String::with_capacity(field.len() * 80);
    out.push_str(DENSITY_HEADER);
    out.push('\n');
    for (m, r) in rho.iter().enumerate() {
        let (u, d) = (field.u[m], field.d[m]);
        writeln!(
            out,
            "{m},{},{},{},{},{},{}",
            num(m as f64 * field.dx()),
            num(*r),
            num(u.re),
            num(u.im),
            num(d.re),
            num(d.im)
        )
        .unwrap();
    }
    out
}

pub fn spread_csv(entries: &[SpreadEntry]) -> String {
    let mut out = String::from(SPREAD_HEADER);
    out.push('\n');
    for e in entries {
        writeln!(
            out,
            "{},{},{},{}",
            e.j,
            num(e.norm),
            num(e.mean),
            num(e.sigma)
        )
        .unwrap();
    }
    out
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), text)?;
    Ok(())
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(dir, name, &text)
}
