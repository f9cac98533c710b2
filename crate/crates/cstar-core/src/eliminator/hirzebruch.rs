/// 2 + (an+b)(2a−2) + a(n−2−an): zero exactly when E₀ ~ (an+b)T₁ + aT₂ on
/// the Hirzebruch surface with T₁² = 0, T₂² = −n is rational.
pub fn hirzebruch_genus_defect(a: i64, b: i64, n: i64) -> i64 {
    2 + (a * n + b) * (2 * a - 2) + a * (n - 2 - a * n)
}

/// E₀² = a(an+2b).
pub fn hirzebruch_e0_squared(a: i64, b: i64, n: i64) -> i64 {
    a * (a * n + 2 * b)
}
