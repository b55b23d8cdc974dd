//! Browser bindings: Cartan data, a bracket on the vacuum, and a filtered suite run.

use wasm_bindgen::prelude::*;

use toroidal_core::field::{bracket_apply, vacuum};
use toroidal_core::parse::parse_expr;
use toroidal_core::report::{render_report, Format};
use toroidal_core::roots::RootSystem;
use toroidal_core::suite::{run_suite, SuiteConfig};
use toroidal_core::table::{generator_table, Variant};

/// Cartan matrix rows, one per line.
pub fn cartan_text(m: i64, n: i64) -> Result<String, String> {
    let sys = RootSystem::build(m, n).map_err(|e| e.to_string())?;
    let rows: Vec<String> = sys
        .cartan
        .iter()
        .map(|row| row.iter().map(|a| format!("{a:>3}")).collect::<Vec<_>>().join(""))
        .collect();
    Ok(rows.join("\n"))
}

/// `[a(p), b(q)]` on the vacuum for two expressions in the table syntax.
pub fn bracket_text(m: i64, n: i64, a: &str, p: i64, b: &str, q: i64) -> Result<String, String> {
    let sys = RootSystem::build(m, n).map_err(|e| e.to_string())?;
    let rank = sys.rank();
    let ea = parse_expr(a, rank).map_err(|e| format!("first field: {e}"))?;
    let eb = parse_expr(b, rank).map_err(|e| format!("second field: {e}"))?;
    let kappa = toroidal_core::scalar::GaussRational::from_int(-1);
    let s = bracket_apply(rank, &kappa, &ea, p, &eb, q, &vacuum(rank));
    Ok(toroidal_core::report::render_state(&s, rank))
}

/// Text report of the suite restricted to the given relations.
#[allow(clippy::too_many_arguments)]
pub fn suite_text(
    m: i64,
    n: i64,
    variant: &str,
    relations: &str,
    modes: i64,
    energy_cap: u32,
    charge_cap: i64,
    word_depth: u32,
) -> Result<String, String> {
    if modes < 0 || charge_cap < 0 {
        return Err("bounds must be non-negative".into());
    }
    let sys = RootSystem::build(m, n).map_err(|e| e.to_string())?;
    let variant: Variant = variant.parse().map_err(|e: toroidal_core::table::TableError| e.to_string())?;
    if matches!(variant, Variant::UserFile(_)) {
        return Err("table files are not available in the browser".into());
    }
    let table = generator_table(&sys, &variant).map_err(|e| e.to_string())?;
    let config = SuiteConfig {
        m,
        n,
        mode_range: modes,
        energy_cap,
        charge_cap,
        word_depth,
        variant,
        relations: relations.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect(),
        ..SuiteConfig::default()
    };
    let outcome = run_suite(&sys, &table, &config);
    Ok(render_report(&config, &outcome, Format::Text))
}

#[wasm_bindgen]
pub fn cartan_matrix(m: i32, n: i32) -> Result<String, JsValue> {
    cartan_text(m as i64, n as i64).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn bracket_on_vacuum(m: i32, n: i32, a: &str, p: i32, b: &str, q: i32) -> Result<String, JsValue> {
    bracket_text(m as i64, n as i64, a, p as i64, b, q as i64).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn run_relations(
    m: i32,
    n: i32,
    variant: &str,
    relations: &str,
    modes: i32,
    energy_cap: u32,
    charge_cap: i32,
    word_depth: u32,
) -> Result<String, JsValue> {
    suite_text(m as i64, n as i64, variant, relations, modes as i64, energy_cap, charge_cap as i64, word_depth)
        .map_err(|e| JsValue::from_str(&e))
}
