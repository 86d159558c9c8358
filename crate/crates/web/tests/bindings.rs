use strip_homology_web::{barcode_svg_text, formula_text, formula_value, unordered_csv};

#[test]
fn barcode_picture() {
    let svg = barcode_svg_text(3).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(barcode_svg_text(0).is_err());
    assert!(barcode_svg_text(40).is_err());
}

#[test]
fn formulas() {
    assert_eq!(formula_value(1, 2, 3).unwrap(), "7");
    assert_eq!(formula_value(1, 2, 12).unwrap(), "114687");
    let text = formula_text(2, 2).unwrap();
    assert!(text.ends_with("grows like C(n,4)*3^(n-4)"), "{text}");
    assert!(text.contains(" + 3^n - 2*2^n + 1\n"), "{text}");
    assert!(formula_text(1, 1).is_err());
}

#[test]
fn unordered_rows() {
    let csv = unordered_csv(3, 2, 2).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines, vec!["n,b0,b1", "1,1,0", "2,1,1", "3,1,2"]);
    assert!(unordered_csv(3, 2, 4).is_err());
    assert!(unordered_csv(3, 2, 1).is_err());
    assert!(unordered_csv(3, 0, 2).is_err());
}
