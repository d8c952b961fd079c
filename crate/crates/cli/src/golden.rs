//! Published six-decimal values used by `verify`.

/// Upper triangle, row ℓ holds `d(A_{ℓ,m})` for `m = ℓ..=5`.
const K2: [&[f64]; 6] = [
    &[0.049227, 0.107920, 0.079380, 0.030530, 0.007444, 0.001278],
    &[0.158761, 0.091591, 0.029777, 0.006393, 0.000991],
    &[0.044666, 0.012786, 0.002478, 0.000352],
    &[0.003304, 0.000588, 0.000077],
    &[0.000097, 0.000012],
    &[0.000001],
];

const K3: [&[f64]; 6] = [
    &[0.000146, 0.000898, 0.002413, 0.003899, 0.004360, 0.003654],
    &[0.004826, 0.011698, 0.017443, 0.018274, 0.014504],
    &[0.026165, 0.036549, 0.036261, 0.027472],
    &[0.048348, 0.045787, 0.033318],
    &[0.041647, 0.029247],
    &[0.019896],
];

pub const TABLE_TOLERANCE: f64 = 5e-6;

/// `(ℓ, m, value)` with `ℓ ≤ m ≤ 5`, when a table exists for `k`.
pub fn table(k: u32) -> Option<Vec<(usize, usize, f64)>> {
    let rows = match k {
        2 => &K2,
        3 => &K3,
        _ => return None,
    };
    Some(
        rows.iter()
            .enumerate()
            .flat_map(|(l, row)| row.iter().enumerate().map(move |(i, &v)| (l, l + i, v)))
            .collect(),
    )
}

/// `d_{2,ℓ}` for ℓ = 0, 1, 2, quoted to three decimals.
pub const SHIU_K2: [f64; 3] = [0.275, 0.395, 0.231];
pub const C2_RATIO: f64 = 2.173;
