//! CHSH facets, outcome-conditioned CHSH values, and an optimizer
//! calibration target.
//!
//! A CHSH facet is a ±1 sign pattern over the four correlators
//! ⟨A⁰B⁰⟩, ⟨A⁰B¹⟩, ⟨A¹B⁰⟩, ⟨A¹B¹⟩ with an odd number of minus signs
//! (exactly one or three); every such pattern bounds local models by 2
//! and quantum models by 2√2.  [`conditioned_chsh`] evaluates a facet on
//! the A/B marginal of a four-party settings behavior conditioned on the
//! ±1 product of C's and D's outcomes at their second settings (index 1),
//! using exact conditional probabilities.

use super::optimize::{multi_start_ascent, MultiStartOptions};
use crate::quantum::{
    bell_phi_plus, enumerate_mixed_radix, obs_xz, projector_onto, CMat, SettingsBehavior,
};

/// Branch probabilities below this are treated as zero (conditioning
/// would be meaningless).
pub const ZERO_BRANCH_TOL: f64 = 1e-12;

/// A CHSH sign pattern with an odd number of negative signs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CHSHVariant {
    signs: [i8; 4],
}

impl CHSHVariant {
    /// Build from signs over (⟨A⁰B⁰⟩, ⟨A⁰B¹⟩, ⟨A¹B⁰⟩, ⟨A¹B¹⟩); each must
    /// be ±1 and exactly one or three must be −1.
    pub fn new(signs: [i8; 4]) -> Result<Self, String> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(format!("signs must be ±1, got {signs:?}"));
        }
        let negatives = signs.iter().filter(|&&s| s == -1).count();
        if negatives != 1 && negatives != 3 {
            return Err(format!(
                "a CHSH facet has exactly one or three minus signs, got {negatives}"
            ));
        }
        Ok(Self { signs })
    }

    /// Parse a compact form like `"++-+"` (commas optional: `"+,+,-,+"`).
    pub fn parse(text: &str) -> Result<Self, String> {
        let chars: Vec<char> = text.chars().filter(|c| *c != ',').collect();
        if chars.len() != 4 {
            return Err(format!("expected 4 signs, got {:?}", text));
        }
        let mut signs = [0i8; 4];
        for (k, c) in chars.iter().enumerate() {
            signs[k] = match c {
                '+' => 1,
                '-' => -1,
                other => return Err(format!("expected '+' or '-', got {other:?}")),
            };
        }
        Self::new(signs)
    }

    pub fn signs(&self) -> [f64; 4] {
        self.signs.map(f64::from)
    }

    /// Default facet for the branch where C¹·D¹ = +1 (the A/B pair left
    /// in the even-parity Bell state).
    pub fn default_plus_branch() -> Self {
        Self { signs: [1, 1, 1, -1] }
    }

    /// Default facet for the branch where C¹·D¹ = −1 (the odd-parity
    /// Bell state, whose ⟨A¹B⁰⟩ correlator flips sign).
    pub fn default_minus_branch() -> Self {
        Self { signs: [1, 1, -1, 1] }
    }

    /// All eight facets.
    pub fn all_facets() -> Vec<Self> {
        let mut out = Vec::new();
        for bits in 0..16u8 {
            let signs = [0, 1, 2, 3].map(|k| if bits >> k & 1 == 1 { -1 } else { 1 });
            if let Ok(v) = Self::new(signs) {
                out.push(v);
            }
        }
        out
    }
}

impl std::fmt::Display for CHSHVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for s in self.signs {
            write!(f, "{}", if s == 1 { '+' } else { '-' })?;
        }
        Ok(())
    }
}

/// Probability that C's and D's outcomes at settings (1, 1) multiply to
/// `branch` (outcomes mapped o ↦ (−1)^o), with A and B measured at
/// `(x, y)`.
fn branch_probability(sb: &SettingsBehavior, x: u32, y: u32, branch: i8) -> f64 {
    let mut p = 0.0;
    for o in enumerate_mixed_radix(&[2, 2, 2, 2]) {
        let parity = if (o[2] + o[3]) % 2 == 0 { 1 } else { -1 };
        if parity == branch as i32 {
            p += sb.prob(&[x, y, 1, 1], &o);
        }
    }
    p
}

fn check_chsh_shape(sb: &SettingsBehavior) -> Result<(), String> {
    if sb.setting_arities().len() != 4 {
        return Err(format!(
            "conditioned CHSH needs 4 parties, behavior has {}",
            sb.setting_arities().len()
        ));
    }
    if let Some(k) = sb.outcome_arities().iter().position(|&a| a != 2) {
        return Err(format!("party {k} outcomes must be binary"));
    }
    let s = sb.setting_arities();
    if s[0] < 2 || s[1] < 2 || s[2] < 2 || s[3] < 2 {
        return Err(format!(
            "need at least 2 settings per party (A,B for the facet; C,D for conditioning), got {s:?}"
        ));
    }
    Ok(())
}

/// Evaluate a CHSH facet on the A/B pair conditioned on C¹·D¹ = `branch`
/// (`branch` is +1 or −1).  Conditional correlators are exact; a branch
/// of zero probability at any required setting pair is an error.
pub fn conditioned_chsh(
    sb: &SettingsBehavior,
    branch: i8,
    variant: &CHSHVariant,
) -> Result<f64, String> {
    if branch != 1 && branch != -1 {
        return Err(format!("branch must be +1 or -1, got {branch}"));
    }
    check_chsh_shape(sb)?;
    let signs = variant.signs();
    let mut value = 0.0;
    for (k, (x, y)) in [(0u32, 0u32), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
        let pb = branch_probability(sb, x, y, branch);
        if pb <= ZERO_BRANCH_TOL {
            return Err(format!(
                "branch {branch:+} has probability {pb:.3e} at settings ({x},{y},1,1); cannot condition"
            ));
        }
        let mut num = 0.0;
        for o in enumerate_mixed_radix(&[2, 2, 2, 2]) {
            let parity = if (o[2] + o[3]) % 2 == 0 { 1 } else { -1 };
            if parity != branch as i32 {
                continue;
            }
            let ab = if (o[0] + o[1]) % 2 == 0 { 1.0 } else { -1.0 };
            num += ab * sb.prob(&[x, y, 1, 1], &o);
        }
        value += signs[k] * num / pb;
    }
    Ok(value)
}

/// Branch probabilities (p₊, p₋) of C¹·D¹ = ±1 at A/B settings (0, 0).
pub fn branch_probabilities(sb: &SettingsBehavior) -> Result<(f64, f64), String> {
    check_chsh_shape(sb)?;
    Ok((
        branch_probability(sb, 0, 0, 1),
        branch_probability(sb, 0, 0, -1),
    ))
}

/// Exact maximum of a facet over deterministic ±1 assignments — always 2.
pub fn classical_chsh_maximum(variant: &CHSHVariant) -> f64 {
    let signs = variant.signs();
    let mut best = f64::NEG_INFINITY;
    for bits in 0..16u8 {
        let a = [1.0 - 2.0 * f64::from(bits & 1), 1.0 - 2.0 * f64::from(bits >> 1 & 1)];
        let b = [1.0 - 2.0 * f64::from(bits >> 2 & 1), 1.0 - 2.0 * f64::from(bits >> 3 & 1)];
        let v = signs[0] * a[0] * b[0]
            + signs[1] * a[0] * b[1]
            + signs[2] * a[1] * b[0]
            + signs[3] * a[1] * b[1];
        best = best.max(v);
    }
    best
}

/// Optimizer calibration: maximize the default facet over measurement
/// angles on an explicit two-qubit Bell pair.  Correlators come from the
/// 4×4 density matrix; the known optimum is 2√2.
pub fn chsh_tsirelson_calibration(o: &MultiStartOptions) -> f64 {
    let rho = projector_onto(&bell_phi_plus());
    let signs = CHSHVariant::default_plus_branch().signs();
    let correlator = move |ta: f64, tb: f64| -> f64 {
        let op = kron2(&obs_xz(ta), &obs_xz(tb));
        trace_product(&rho, &op)
    };
    let f = move |th: &[f64]| -> f64 {
        signs[0] * correlator(th[0], th[2])
            + signs[1] * correlator(th[0], th[3])
            + signs[2] * correlator(th[1], th[2])
            + signs[3] * correlator(th[1], th[3])
    };
    let sample = |rng: &mut rand_chacha::ChaCha8Rng, dim: usize| -> Vec<f64> {
        use rand::Rng;
        (0..dim)
            .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect()
    };
    multi_start_ascent(f, 4, sample, o).value
}

fn kron2(a: &CMat, b: &CMat) -> CMat {
    crate::quantum::linalg::kron(a, b)
}

fn trace_product(a: &CMat, b: &CMat) -> f64 {
    let mut t = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            t += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    t
}

/// A settings behavior where every party deterministically outputs 0.
#[cfg(test)]
fn all_zeros_behavior(setting_arities: Vec<u32>) -> SettingsBehavior {
    let combos = enumerate_mixed_radix(&setting_arities);
    let block = 16;
    let mut probs = Vec::with_capacity(combos.len() * block);
    for _ in combos {
        let mut blk = vec![0.0; block];
        blk[0] = 1.0;
        probs.extend(blk);
    }
    SettingsBehavior::new(setting_arities, vec![2, 2, 2, 2], probs).unwrap()
}
