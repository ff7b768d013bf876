//! Built-in example fluxes with their expected nonlinearity index.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{parse_flux, FluxExpr, Smoothness};
use crate::error::{invalid, Result};
use crate::nonlinearity::NonlinIndex;

/// A catalog flux with the index and exponent it is expected to have.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub key: String,
    pub flux: FluxExpr,
    pub expected_index: NonlinIndex,
    pub note: &'static str,
}

impl CatalogEntry {
    /// `(numerator, denominator)` of `α_sup = 1/d_F`, or `(0, 1)`.
    pub fn expected_alpha(&self) -> (u32, u32) {
        match self.expected_index {
            NonlinIndex::Finite(k) => (1, k),
            NonlinIndex::Infinite => (0, 1),
        }
    }
}

fn entry(key: String, spec: &str, idx: NonlinIndex, s: Smoothness, note: &'static str) -> CatalogEntry {
    let flux = parse_flux(spec).expect("catalog spec parses").with_name(key.clone()).with_smoothness(s);
    CatalogEntry { key, flux, expected_index: idx, note }
}

fn build(family: &str, d: usize) -> Result<CatalogEntry> {
    use NonlinIndex::*;
    Ok(match family {
        "burgers1d" => entry(family.into(), "[u^2/2]", Finite(1), Smoothness::Analytic, "convex 1-D flux"),
        "trig2d" => entry(family.into(), "[cos(u), sin(u)]", Finite(2), Smoothness::Analytic, "det(F'', F''') = 1"),
        "power-chain" => {
            let comps: Vec<String> = (1..=d).map(|i| format!("u^{}/{}", i + 1, i + 1)).collect();
            let spec = format!("[{}]", comps.join(", "));
            entry(format!("power-chain-{d}"), &spec, Finite(d as u32), Smoothness::Analytic, "a = (u, u², …, u^d)")
        }
        "multid-burgers" => {
            let comps: Vec<&str> = (0..d).map(|_| "u^2").collect();
            let spec = format!("[{}]", comps.join(", "));
            entry(format!("multid-burgers-{d}"), &spec, Infinite, Smoothness::Analytic, "a'' ≡ 0")
        }
        "flatbump" => {
            let comps: Vec<String> = (1..=d).map(|i| format!("flat(u)*u^{}", i + 1)).collect();
            let spec = format!("[{}]", comps.join(", "));
            entry(format!("flatbump-{d}"), &spec, Infinite, Smoothness::Smooth, "all derivatives vanish at u = 0")
        }
        _ => return Err(invalid!("unknown catalog flux `{family}`")),
    })
}

/// Every catalog family, with `d = 2` and `d = 3` where the dimension is free.
pub fn catalog() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    out.push(build("burgers1d", 1).unwrap());
    out.push(build("trig2d", 2).unwrap());
    for fam in ["power-chain", "multid-burgers", "flatbump"] {
        for d in [2, 3] {
            out.push(build(fam, d).unwrap());
        }
    }
    out
}

/// Look up a catalog key. Accepted forms: `burgers1d`, `trig2d`,
/// `power-chain-3`, `power-chain-d(d=3)`, `multid-burgers(d=2)`, `flatbump-2`.
/// A family given without a dimension defaults to `d = 2`.
pub fn catalog_flux(key: &str) -> Result<CatalogEntry> {
    let key = key.trim();
    let (head, d) = if let Some(open) = key.find('(') {
        let inner = key[open + 1..].strip_suffix(')').ok_or_else(|| invalid!("malformed catalog key `{key}`"))?;
        let val = inner.trim().strip_prefix("d=").unwrap_or(inner.trim());
        let d: usize = val.trim().parse().map_err(|_| invalid!("bad dimension in `{key}`"))?;
        (&key[..open], Some(d))
    } else {
        (key, None)
    };
    let head = head.trim().trim_end_matches("-d");
    for fam in ["power-chain", "multid-burgers", "flatbump"] {
        if head == fam {
            return build_dim(fam, d.unwrap_or(2));
        }
        if let Some(rest) = head.strip_prefix(fam).and_then(|r| r.strip_prefix('-')) {
            let d: usize = rest.parse().map_err(|_| invalid!("bad dimension in `{key}`"))?;
            return build_dim(fam, d);
        }
    }
    build(head, 1)
}

fn build_dim(fam: &str, d: usize) -> Result<CatalogEntry> {
    if d == 0 {
        return Err(invalid!("dimension must be positive"));
    }
    build(fam, d)
}
