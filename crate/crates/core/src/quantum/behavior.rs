//! Outcome distributions (behaviors) and their derived statistics.

use crate::io::{fmt12, json_escape};

/// Joint outcome distribution of the parties, stored row-major with party 0
/// as the most significant digit.
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior {
    arities: Vec<u32>,
    probs: Vec<f64>,
}

/// Tolerances used when validating a distribution.
pub const PROB_NEG_TOL: f64 = 1e-12;
pub const PROB_SUM_TOL: f64 = 1e-10;

impl Behavior {
    /// Validates shape (product of arities), near-nonnegativity of every
    /// entry (>= -1e-12) and normalisation (sum within 1e-10 of one).
    pub fn new(arities: Vec<u32>, probs: Vec<f64>) -> Result<Self, String> {
        let expect: usize = arities.iter().map(|&a| a as usize).product();
        if probs.len() != expect {
            return Err(format!(
                "behavior has {} entries but arities {:?} require {}",
                probs.len(),
                arities,
                expect
            ));
        }
        if let Some((k, &p)) = probs
            .iter()
            .enumerate()
            .find(|(_, &p)| p < -PROB_NEG_TOL || !p.is_finite())
        {
            return Err(format!("entry {k} is {p}, below -{PROB_NEG_TOL:e}"));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(format!("entries sum to {sum}, not 1"));
        }
        Ok(Behavior { arities, probs })
    }

    pub fn arities(&self) -> &[u32] {
        &self.arities
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn index(&self, outcomes: &[u32]) -> usize {
        debug_assert_eq!(outcomes.len(), self.arities.len());
        let mut idx = 0usize;
        for (o, a) in outcomes.iter().zip(&self.arities) {
            debug_assert!(o < a);
            idx = idx * (*a as usize) + *o as usize;
        }
        idx
    }

    pub fn prob(&self, outcomes: &[u32]) -> f64 {
        self.probs[self.index(outcomes)]
    }

    /// Expectation of the product of `(-1)^outcome` over the given parties
    /// (all of which must be binary).
    pub fn correlator(&self, parties: &[usize]) -> f64 {
        for &p in parties {
            assert_eq!(self.arities[p], 2, "correlators need binary outcomes");
        }
        let mut acc = 0.0;
        let mut outcomes = vec![0u32; self.arities.len()];
        for (k, &p) in self.probs.iter().enumerate() {
            self.decompose(k, &mut outcomes);
            let sign: i32 = parties
                .iter()
                .map(|&i| if outcomes[i] % 2 == 0 { 1 } else { -1 })
                .product();
            acc += sign as f64 * p;
        }
        acc
    }

    fn decompose(&self, mut idx: usize, out: &mut [u32]) {
        for k in (0..self.arities.len()).rev() {
            let a = self.arities[k] as usize;
            out[k] = (idx % a) as u32;
            idx /= a;
        }
    }

    /// Half the l1 distance to the perfectly coordinated distribution
    /// (uniform over all-equal outcome tuples), subtracted from one.  A
    /// score of 1 means exact coordination.
    pub fn coordination_score(&self) -> f64 {
        let n = self.arities.len();
        assert!(self.arities.iter().all(|&a| a == 2));
        let all0 = vec![0u32; n];
        let all1 = vec![1u32; n];
        let (i0, i1) = (self.index(&all0), self.index(&all1));
        let mut l1 = 0.0;
        for (k, &p) in self.probs.iter().enumerate() {
            let target = if k == i0 || k == i1 { 0.5 } else { 0.0 };
            l1 += (p - target).abs();
        }
        1.0 - l1 / 2.0
    }

    /// True when the behavior is the coordinated coin within `tol` (half-l1
    /// distance at most `tol`).
    pub fn is_perfect_coordination(&self, tol: f64) -> bool {
        1.0 - self.coordination_score() <= tol
    }

    /// Serialise to a deterministic JSON document.
    pub fn to_json(&self) -> String {
        let arities: Vec<String> = self.arities.iter().map(|a| a.to_string()).collect();
        let probs: Vec<String> = self.probs.iter().map(|p| fmt12(*p)).collect();
        format!(
            "{{\n  \"arities\": [{}],\n  \"probs\": [{}]\n}}\n",
            arities.join(", "),
            probs.join(", ")
        )
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| format!("behavior file: {e}"))?;
        let arities = read_u32_array(&v, "arities")?;
        let probs = read_f64_array(&v, "probs")?;
        Behavior::new(arities, probs)
    }
}

/// Conditional outcome distributions indexed by measurement settings.
/// Entry layout: the setting tuple is the major index (row-major over
/// `setting_arities`), the outcome tuple the minor one.
#[derive(Debug, Clone, PartialEq)]
pub struct SettingsBehavior {
    setting_arities: Vec<u32>,
    outcome_arities: Vec<u32>,
    probs: Vec<f64>,
}

impl SettingsBehavior {
    /// Validates that every conditional distribution normalises.
    pub fn new(
        setting_arities: Vec<u32>,
        outcome_arities: Vec<u32>,
        probs: Vec<f64>,
    ) -> Result<Self, String> {
        if setting_arities.len() != outcome_arities.len() {
            return Err("setting and outcome arity lists differ in length".into());
        }
        let ns: usize = setting_arities.iter().map(|&a| a as usize).product();
        let no: usize = outcome_arities.iter().map(|&a| a as usize).product();
        if probs.len() != ns * no {
            return Err(format!(
                "expected {} entries ({} settings x {} outcomes), got {}",
                ns * no,
                ns,
                no,
                probs.len()
            ));
        }
        for s in 0..ns {
            let block = &probs[s * no..(s + 1) * no];
            if let Some((k, &p)) = block
                .iter()
                .enumerate()
                .find(|(_, &p)| p < -PROB_NEG_TOL || !p.is_finite())
            {
                return Err(format!("setting block {s}, entry {k} is {p}"));
            }
            let sum: f64 = block.iter().sum();
            if (sum - 1.0).abs() > PROB_SUM_TOL {
                return Err(format!("setting block {s} sums to {sum}, not 1"));
            }
        }
        Ok(SettingsBehavior {
            setting_arities,
            outcome_arities,
            probs,
        })
    }

    pub fn setting_arities(&self) -> &[u32] {
        &self.setting_arities
    }

    pub fn outcome_arities(&self) -> &[u32] {
        &self.outcome_arities
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    fn setting_index(&self, settings: &[u32]) -> usize {
        let mut idx = 0usize;
        for (s, a) in settings.iter().zip(&self.setting_arities) {
            debug_assert!(s < a, "setting {s} out of range {a}");
            idx = idx * (*a as usize) + *s as usize;
        }
        idx
    }

    /// Conditional probability p(outcomes | settings).
    pub fn prob(&self, settings: &[u32], outcomes: &[u32]) -> f64 {
        let no: usize = self.outcome_arities.iter().map(|&a| a as usize).product();
        let mut o_idx = 0usize;
        for (o, a) in outcomes.iter().zip(&self.outcome_arities) {
            debug_assert!(o < a);
            o_idx = o_idx * (*a as usize) + *o as usize;
        }
        self.probs[self.setting_index(settings) * no + o_idx]
    }

    /// The conditional distribution at a fixed setting tuple.
    pub fn behavior_for(&self, settings: &[u32]) -> Behavior {
        let no: usize = self.outcome_arities.iter().map(|&a| a as usize).product();
        let s = self.setting_index(settings);
        Behavior::new(
            self.outcome_arities.clone(),
            self.probs[s * no..(s + 1) * no].to_vec(),
        )
        .expect("stored blocks are valid by construction")
    }

    /// Full correlator of the listed parties at the given setting tuple.
    pub fn correlator(&self, settings: &[u32], parties: &[usize]) -> f64 {
        self.behavior_for(settings).correlator(parties)
    }

    /// Largest signalling violation: how much the marginal on all parties
    /// but one can depend on the excluded party's setting.
    pub fn no_signaling_defect(&self) -> f64 {
        let n = self.setting_arities.len();
        let mut worst = 0.0f64;
        let all_settings = enumerate_mixed_radix(&self.setting_arities);
        let outcomes = enumerate_mixed_radix(&self.outcome_arities);
        for excl in 0..n {
            // Group setting tuples by the settings of everyone else.
            for base in &all_settings {
                if base[excl] != 0 {
                    continue;
                }
                for alt in 1..self.setting_arities[excl] {
                    let mut other = base.clone();
                    other[excl] = alt;
                    // Compare marginals over the excluded party's outcome.
                    for o in &outcomes {
                        if o[excl] != 0 {
                            continue;
                        }
                        let mut m0 = 0.0;
                        let mut m1 = 0.0;
                        for k in 0..self.outcome_arities[excl] {
                            let mut oo = o.clone();
                            oo[excl] = k;
                            m0 += self.prob(base, &oo);
                            m1 += self.prob(&other, &oo);
                        }
                        worst = worst.max((m0 - m1).abs());
                    }
                }
            }
        }
        worst
    }

    /// Serialise to a deterministic JSON document.
    pub fn to_json(&self) -> String {
        let sa: Vec<String> = self.setting_arities.iter().map(|a| a.to_string()).collect();
        let oa: Vec<String> = self.outcome_arities.iter().map(|a| a.to_string()).collect();
        let probs: Vec<String> = self.probs.iter().map(|p| fmt12(*p)).collect();
        format!(
            "{{\n  \"setting_arities\": [{}],\n  \"outcome_arities\": [{}],\n  \"probs\": [{}]\n}}\n",
            sa.join(", "),
            oa.join(", "),
            probs.join(", ")
        )
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| format!("settings-behavior file: {e}"))?;
        let sa = read_u32_array(&v, "setting_arities")?;
        let oa = read_u32_array(&v, "outcome_arities")?;
        let probs = read_f64_array(&v, "probs")?;
        SettingsBehavior::new(sa, oa, probs)
    }
}

/// All tuples over the given arities, in row-major order.
pub fn enumerate_mixed_radix(arities: &[u32]) -> Vec<Vec<u32>> {
    let total: usize = arities.iter().map(|&a| a as usize).product();
    let mut out = Vec::with_capacity(total);
    for mut idx in 0..total {
        let mut tuple = vec![0u32; arities.len()];
        for k in (0..arities.len()).rev() {
            let a = arities[k] as usize;
            tuple[k] = (idx % a) as u32;
            idx /= a;
        }
        out.push(tuple);
    }
    out
}

fn read_u32_array(v: &serde_json::Value, key: &str) -> Result<Vec<u32>, String> {
    v.get(key)
        .and_then(|x| x.as_array())
        .ok_or_else(|| format!("missing array field {:?}", json_escape(key)))?
        .iter()
        .map(|x| {
            x.as_u64()
                .map(|u| u as u32)
                .ok_or_else(|| format!("field {key} holds a non-integer"))
        })
        .collect()
}

fn read_f64_array(v: &serde_json::Value, key: &str) -> Result<Vec<f64>, String> {
    v.get(key)
        .and_then(|x| x.as_array())
        .ok_or_else(|| format!("missing array field {:?}", json_escape(key)))?
        .iter()
        .map(|x| {
            x.as_f64()
                .ok_or_else(|| format!("field {key} holds a non-number"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coordinated_coin() -> Behavior {
        let mut probs = vec![0.0; 16];
        probs[0] = 0.5;
        probs[15] = 0.5;
        Behavior::new(vec![2, 2, 2, 2], probs).unwrap()
    }

    #[test]
    fn coordination_score_extremes() {
        let coin = coordinated_coin();
        assert!((coin.coordination_score() - 1.0).abs() < 1e-15);
        assert!(coin.is_perfect_coordination(1e-9));
        let uniform = Behavior::new(vec![2, 2, 2, 2], vec![1.0 / 16.0; 16]).unwrap();
        // l1 distance: |1/16-1/2|*2 + 14/16 = 14/16 + 14/16; score = 1 - 7/8.
        assert!((uniform.coordination_score() - 0.125).abs() < 1e-12);
        assert!(!uniform.is_perfect_coordination(1e-9));
    }

    #[test]
    fn correlators_on_product_distribution() {
        // Independent biased coins: p(a=0) = 0.8, p(b=0) = 0.3.
        let probs = vec![0.8 * 0.3, 0.8 * 0.7, 0.2 * 0.3, 0.2 * 0.7];
        let b = Behavior::new(vec![2, 2], probs).unwrap();
        let ea = b.correlator(&[0]);
        let eb = b.correlator(&[1]);
        let eab = b.correlator(&[0, 1]);
        assert!((ea - 0.6).abs() < 1e-15);
        assert!((eb - (-0.4)).abs() < 1e-15);
        assert!((eab - ea * eb).abs() < 1e-15, "independent factorises");
    }

    #[test]
    fn malformed_behaviors_are_rejected() {
        assert!(Behavior::new(vec![2, 2], vec![0.5, 0.5]).is_err());
        assert!(Behavior::new(vec![2], vec![1.5, -0.5]).is_err());
        assert!(Behavior::new(vec![2], vec![0.6, 0.6]).is_err());
    }

    #[test]
    fn behavior_json_round_trip() {
        let coin = coordinated_coin();
        let text = coin.to_json();
        let back = Behavior::from_json(&text).unwrap();
        assert_eq!(coin, back);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn settings_behavior_blocks_and_signaling() {
        // Two parties, two settings each, outputs perfectly correlated and
        // setting-independent: no signalling.
        let mut probs = Vec::new();
        for _s in 0..4 {
            probs.extend_from_slice(&[0.5, 0.0, 0.0, 0.5]);
        }
        let sb = SettingsBehavior::new(vec![2, 2], vec![2, 2], probs).unwrap();
        assert_eq!(sb.no_signaling_defect(), 0.0);
        assert!((sb.correlator(&[0, 1], &[0, 1]) - 1.0).abs() < 1e-15);
        let text = sb.to_json();
        assert_eq!(SettingsBehavior::from_json(&text).unwrap().to_json(), text);

        // Signalling box: party 0's marginal flips with party 1's setting.
        let probs2 = vec![
            1.0, 0.0, 0.0, 0.0, // settings (0,0): always (0,0)
            0.0, 0.0, 1.0, 0.0, // settings (0,1): always (1,0)
            1.0, 0.0, 0.0, 0.0, // settings (1,0)
            1.0, 0.0, 0.0, 0.0, // settings (1,1)
        ];
        let sb2 = SettingsBehavior::new(vec![2, 2], vec![2, 2], probs2).unwrap();
        assert!((sb2.no_signaling_defect() - 1.0).abs() < 1e-15);
    }
}
