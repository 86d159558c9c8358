//! Browser bindings: barcode pictures, growth formulas and unordered Betti
//! tables. The plain functions are usable natively; the exported wrappers
//! only convert errors.

use strip_homology::formula::{betti_growth_formula, dominant_term};
use strip_homology::persistence::count_barcode;
use strip_homology::unordered::betti_unordered;
use wasm_bindgen::prelude::*;

// Counting stays fast well past this, but the picture gets unreadable.
pub const MAX_BARCODE_N: usize = 16;
pub const MAX_UNORDERED_N: u32 = 60;

/// SVG of the width barcode of `cell(n, *)`.
pub fn barcode_svg_text(n: usize) -> Result<String, String> {
    if n == 0 || n > MAX_BARCODE_N {
        return Err(format!("n must be between 1 and {MAX_BARCODE_N}"));
    }
    Ok(count_barcode(n).to_svg(n))
}

/// The closed formula for `beta_j(cell(n, w))` and its fastest-growing term.
pub fn formula_text(j: u32, w: u32) -> Result<String, String> {
    if j > 8 {
        return Err("j must be at most 8".into());
    }
    let f = betti_growth_formula(j, w).map_err(|e| e.to_string())?;
    let growth = match dominant_term(&f) {
        Some((0, b)) => format!("grows like {b}^n"),
        Some((a, b)) => format!("grows like C(n,{a})*{b}^(n-{a})"),
        None => "eventually zero".into(),
    };
    Ok(format!("{f}\n{growth}"))
}

/// `beta_j(cell(n, w))` from the formula, as a decimal string.
pub fn formula_value(j: u32, w: u32, n: u32) -> Result<String, String> {
    if j > 8 {
        return Err("j must be at most 8".into());
    }
    let f = betti_growth_formula(j, w).map_err(|e| e.to_string())?;
    Ok(f.evaluate(n).to_string())
}

/// Betti numbers of the unordered complex for every `m <= n`, one row per
/// `m`, as CSV `n,b0,b1,...`.
pub fn unordered_csv(n: u32, w: u32, p: u32) -> Result<String, String> {
    if n == 0 || n > MAX_UNORDERED_N {
        return Err(format!("n must be between 1 and {MAX_UNORDERED_N}"));
    }
    if w == 0 {
        return Err("w must be positive".into());
    }
    if p != 0 && !is_prime(p) {
        return Err(format!("{p} is not a prime"));
    }
    let rows: Vec<Vec<u128>> = (1..=n).map(|m| betti_unordered(m, w, p)).collect();
    let top = rows.iter().map(|r| r.iter().rposition(|&x| x != 0).unwrap_or(0)).max().unwrap_or(0);
    let mut out = String::from("n");
    for d in 0..=top {
        out.push_str(&format!(",b{d}"));
    }
    out.push('\n');
    for (m, r) in rows.iter().enumerate() {
        out.push_str(&(m + 1).to_string());
        for d in 0..=top {
            out.push_str(&format!(",{}", r.get(d).copied().unwrap_or(0)));
        }
        out.push('\n');
    }
    Ok(out)
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

#[wasm_bindgen]
pub fn barcode_svg(n: usize) -> Result<String, JsError> {
    barcode_svg_text(n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn growth_formula(j: u32, w: u32) -> Result<String, JsError> {
    formula_text(j, w).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn growth_value(j: u32, w: u32, n: u32) -> Result<String, JsError> {
    formula_value(j, w, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn unordered_table(n: u32, w: u32, p: u32) -> Result<String, JsError> {
    unordered_csv(n, w, p).map_err(|e| JsError::new(&e))
}
