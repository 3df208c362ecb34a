//! Moment-matrix relaxation over the inflated commutation structure.
//!
//! The moment matrix is indexed by canonical outcome-0 projector words of
//! length at most `level` ordered by (length, lexicographic).  Cell
//! (i, j) carries the moment of `canonical(reverse(w_i) · w_j)`.  Words
//! that are reversals of each other carry conjugate moments, so every
//! cell is identified (up to conjugation) with its class leader — the
//! (length, lex)-least canonical word of the pair {u, reverse(u)} — and
//! the first cell of each class (row-major over the upper triangle) acts
//! as the anchor all later cells equate to.
//!
//! The complex Hermitian matrix M = S + iK is modeled by the real
//! symmetric doubling Y = [[S, -K], [K, S]] of twice the size: Y ⪰ 0 iff
//! M ⪰ 0.  Structural constraints tie the two S copies together, make K
//! enter antisymmetrically, and zero the imaginary part of every
//! self-conjugate class.  On top of that sit the problem fixings: the
//! normalization ⟨1⟩ = 1, prescribed marginals for the chain ends A and
//! D, the exact factorization ⟨AD⟩ = ⟨A⟩⟨D⟩ (their inflated measurements
//! commute and share no source copy), and optionally the
//! perfect-coordination equations.
//!
//! The objective encodes the three-term chain expression
//! ⟨AB⟩ + ⟨BC⟩ + ⟨CD⟩ - ⟨A⟩⟨D⟩/2 in projector moments: correlators of
//! ±1-valued outcomes expand as ⟨XY⟩ = 4 y_XY - 2 y_X - 2 y_Y + 1, which
//! leaves a linear part on the moment matrix plus the constant
//! 3 - αδ/2 restored after solving.

use std::collections::BTreeMap;

use coordcert_sdp::SdpProblem;
use nalgebra::DMatrix;

use super::word::{
    canonical_reversed, canonical_word, word_key, word_to_string, Canonical, Letter,
};
use crate::quantum::{CMat, CVec, C};

/// Options for [`build_moment_problem`].
#[derive(Debug, Clone)]
pub struct MomentOptions {
    /// Relaxation level: maximum index-word length (1 or 2 in practice).
    pub level: usize,
    /// Fixed value of ⟨A⟩'s ±1 expectation α, in [-1, 1].
    pub alpha: f64,
    /// Fixed value of ⟨D⟩'s ±1 expectation δ, in [-1, 1].
    pub delta: f64,
    /// Add the perfect-coordination equations (all pair agreements hold
    /// with certainty and every marginal is unbiased).  Requires
    /// α = δ = 0.
    pub perfect_coordination: bool,
}

impl Default for MomentOptions {
    fn default() -> Self {
        MomentOptions {
            level: 2,
            alpha: 0.0,
            delta: 0.0,
            perfect_coordination: false,
        }
    }
}

/// A built relaxation: the SDP over the doubled real matrix plus the
/// bookkeeping needed to interpret solutions and witness points.
#[derive(Debug, Clone)]
pub struct MomentProblem {
    /// Canonical index words, rendered (first entry is "" for identity).
    pub index: Vec<String>,
    /// Index words as letter sequences.
    pub index_words: Vec<Vec<Letter>>,
    /// Moment-matrix side length (the SDP variable is 2m × 2m when
    /// `doubled`, m × m otherwise).
    pub m: usize,
    /// Anchor cell (upper triangle of M) of each conjugation-class leader.
    pub anchors: BTreeMap<String, (usize, usize)>,
    /// The relaxation as a real SDP (maximize orientation).
    pub sdp: SdpProblem,
    /// Constant to add to the SDP optimum to obtain the chain bound.
    pub offset: f64,
    /// Whether the variable is the Hermitian doubling or the real slice.
    pub doubled: bool,
}

/// Canonical index words of length ≤ `level`, sorted by (length, lex).
pub fn index_words(level: usize) -> Vec<Vec<Letter>> {
    let mut found: Vec<Vec<Letter>> = Vec::new();
    let mut frontier: Vec<Vec<Letter>> = vec![vec![]];
    found.push(vec![]);
    for _ in 0..level {
        let mut next = Vec::new();
        for w in &frontier {
            for p in 0..4u8 {
                let mut v = w.clone();
                v.push(Letter::new(p, 0));
                if let Canonical::Word(c) = canonical_word(&v) {
                    if !found.contains(&c) {
                        found.push(c.clone());
                        next.push(c);
                    }
                }
            }
        }
        frontier = next;
    }
    found.sort_by_key(|w| word_key(w));
    found
}

/// Conjugation-class leader of a canonical word and the sign relating the
/// word's moment to the leader's: `+1` when the word is the leader (same
/// moment), `-1` when it is the leader's reversal (conjugate moment).
fn class_leader(u: &[Letter]) -> (Vec<Letter>, i32) {
    let Canonical::Word(rev) = canonical_reversed(u) else {
        unreachable!("reversal of a nonzero word is nonzero")
    };
    if word_key(&rev) < word_key(u) {
        (rev, -1)
    } else {
        (u.to_vec(), 1)
    }
}

/// The canonical word of cell (i, j): `canonical(reverse(w_i) · w_j)`.
fn cell_word(index: &[Vec<Letter>], i: usize, j: usize) -> Vec<Letter> {
    let mut w: Vec<Letter> = index[i].iter().rev().copied().collect();
    w.extend_from_slice(&index[j]);
    match canonical_word(&w) {
        Canonical::Word(c) => c,
        Canonical::Zero => unreachable!("outcome-0 words never annihilate"),
    }
}

struct CellInfo {
    /// Anchor cell and the cell's sign relative to the leader's moment.
    anchor: (usize, usize),
    sign: i32,
    anchor_sign: i32,
    self_conjugate: bool,
    is_anchor: bool,
}

/// Classify every upper-triangle cell by conjugation class.
fn classify_cells(
    index: &[Vec<Letter>],
) -> (
    BTreeMap<String, (usize, usize)>,
    BTreeMap<(usize, usize), CellInfo>,
) {
    let m = index.len();
    let mut anchors: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let mut anchor_signs: BTreeMap<String, i32> = BTreeMap::new();
    let mut cells: BTreeMap<(usize, usize), CellInfo> = BTreeMap::new();
    for i in 0..m {
        for j in i..m {
            let u = cell_word(index, i, j);
            let (leader, sign) = class_leader(&u);
            let leader_s = word_to_string(&leader);
            let self_conjugate = {
                let Canonical::Word(rev) = canonical_reversed(&leader) else {
                    unreachable!()
                };
                rev == leader
            };
            let is_anchor = !anchors.contains_key(&leader_s);
            if is_anchor {
                anchors.insert(leader_s.clone(), (i, j));
                anchor_signs.insert(leader_s.clone(), sign);
            }
            cells.insert(
                (i, j),
                CellInfo {
                    anchor: anchors[&leader_s],
                    sign,
                    anchor_sign: anchor_signs[&leader_s],
                    self_conjugate,
                    is_anchor,
                },
            );
        }
    }
    (anchors, cells)
}

fn check_options(opts: &MomentOptions) -> Result<(), String> {
    if opts.level < 1 {
        return Err("level must be at least 1".into());
    }
    if !(opts.alpha.is_finite() && opts.alpha.abs() <= 1.0) {
        return Err(format!("alpha = {} is outside [-1, 1]", opts.alpha));
    }
    if !(opts.delta.is_finite() && opts.delta.abs() <= 1.0) {
        return Err(format!("delta = {} is outside [-1, 1]", opts.delta));
    }
    if opts.perfect_coordination && (opts.alpha != 0.0 || opts.delta != 0.0) {
        return Err(format!(
            "perfect coordination forces unbiased marginals, but alpha = {}, delta = {}",
            opts.alpha, opts.delta
        ));
    }
    Ok(())
}

/// Emit the fixings and the objective on real-part anchor entries.
fn add_fixings_and_objective(
    sdp: &mut SdpProblem,
    anchors: &BTreeMap<String, (usize, usize)>,
    opts: &MomentOptions,
) -> Result<(), String> {
    let anchor_re = |w: &str| -> Result<(usize, usize), String> {
        anchors
            .get(w)
            .copied()
            .ok_or_else(|| format!("word {w} does not appear at this level"))
    };

    // Normalization.
    sdp.add_constraint(&[(anchor_re("")?, 1.0)], 1.0);
    // Chain-end marginals and their exact factorization.
    sdp.add_constraint(&[(anchor_re("A")?, 1.0)], (1.0 + opts.alpha) / 2.0);
    sdp.add_constraint(&[(anchor_re("D")?, 1.0)], (1.0 + opts.delta) / 2.0);
    sdp.add_constraint(
        &[(anchor_re("AD")?, 1.0)],
        (1.0 + opts.alpha) * (1.0 + opts.delta) / 4.0,
    );

    if opts.perfect_coordination {
        // Unbiased marginals for the middle parties too.
        sdp.add_constraint(&[(anchor_re("B")?, 1.0)], 0.5);
        sdp.add_constraint(&[(anchor_re("C")?, 1.0)], 0.5);
        // Every pair agrees with certainty:
        // p(x = y) = 1  ⟺  2 y_XY = y_X + y_Y (real parts).
        for (x, y, xy) in [
            ("A", "B", "AB"),
            ("A", "C", "AC"),
            ("A", "D", "AD"),
            ("B", "C", "BC"),
            ("B", "D", "BD"),
            ("C", "D", "CD"),
        ] {
            sdp.add_constraint(
                &[
                    (anchor_re(xy)?, 4.0),
                    (anchor_re(x)?, -2.0),
                    (anchor_re(y)?, -2.0),
                ],
                0.0,
            );
        }
    }

    // Objective: ⟨AB⟩ + ⟨BC⟩ + ⟨CD⟩ - αδ/2 expanded in moments, constant
    // part carried in the problem offset.
    let objective: Vec<((usize, usize), f64)> = vec![
        (anchor_re("AB")?, 4.0),
        (anchor_re("BC")?, 4.0),
        (anchor_re("CD")?, 4.0),
        (anchor_re("A")?, -2.0),
        (anchor_re("B")?, -4.0),
        (anchor_re("C")?, -4.0),
        (anchor_re("D")?, -2.0),
    ];
    sdp.set_objective(&objective);
    Ok(())
}

/// Build the relaxation over the doubled variable Y = [[S, -K], [K, S]].
pub fn build_moment_problem(opts: &MomentOptions) -> Result<MomentProblem, String> {
    check_options(opts)?;
    let index = index_words(opts.level);
    let m = index.len();
    let mut sdp = SdpProblem::new(2 * m);

    // Entry helpers: the real part of cell (i, j), i <= j, lives at
    // Y[i][j]; the imaginary part K[i][j] equals Y[j][m + i] (upper
    // triangle, since j < m + i always holds).
    let re = |i: usize, j: usize| -> (usize, usize) { (i, j) };
    let im = |i: usize, j: usize| -> (usize, usize) { (j, m + i) };

    // Doubling structure.
    for i in 0..m {
        for j in i..m {
            // Both S copies agree.
            sdp.add_constraint(&[((i, j), 1.0), ((m + i, m + j), -1.0)], 0.0);
        }
        // Diagonal of K vanishes.
        sdp.add_constraint(&[((i, m + i), 1.0)], 0.0);
    }
    for i in 0..m {
        for j in (i + 1)..m {
            // K enters antisymmetrically: Y[i][m+j] = -Y[j][m+i].
            sdp.add_constraint(&[((i, m + j), 1.0), ((j, m + i), 1.0)], 0.0);
        }
    }

    let (anchors, cells) = classify_cells(&index);
    for (&(i, j), info) in &cells {
        if info.is_anchor {
            if info.self_conjugate && i < j {
                // Self-conjugate moments are real.
                sdp.add_constraint(&[(im(i, j), 1.0)], 0.0);
            }
            continue;
        }
        let (ai, aj) = info.anchor;
        sdp.add_constraint(&[(re(i, j), 1.0), (re(ai, aj), -1.0)], 0.0);
        if i < j {
            let rel = (info.sign * info.anchor_sign) as f64;
            if ai < aj {
                sdp.add_constraint(&[(im(i, j), 1.0), (im(ai, aj), -rel)], 0.0);
            } else {
                // The anchor sits on the diagonal, where the imaginary
                // part is structurally zero.
                sdp.add_constraint(&[(im(i, j), 1.0)], 0.0);
            }
        }
    }

    add_fixings_and_objective(&mut sdp, &anchors, opts)?;
    let offset = 3.0 - opts.alpha * opts.delta / 2.0;
    sdp.validate().map_err(|e| e.to_string())?;
    Ok(MomentProblem {
        index: index.iter().map(|w| word_to_string(w)).collect(),
        index_words: index,
        m,
        anchors,
        sdp,
        offset,
        doubled: true,
    })
}

/// Build the relaxation over the real slice K = 0 — an m × m variable.
///
/// Every constraint of the relaxation has real coefficients and relates
/// real parts to real parts and imaginary parts to imaginary parts, so
/// conjugating a feasible Hermitian moment matrix (negating K) preserves
/// feasibility and the objective, and the midpoint of the two — the real
/// part S alone — is feasible with the same value.  The optimum over
/// Hermitian matrices is therefore always attained at K = 0, and this
/// smaller real problem has exactly the same optimal value as the
/// doubled one.  Grid sweeps use it; certification artifacts use the
/// doubled form.
pub fn build_real_moment_problem(opts: &MomentOptions) -> Result<MomentProblem, String> {
    check_options(opts)?;
    let index = index_words(opts.level);
    let m = index.len();
    let mut sdp = SdpProblem::new(m);

    let (anchors, cells) = classify_cells(&index);
    for (&(i, j), info) in &cells {
        if info.is_anchor {
            continue;
        }
        let (ai, aj) = info.anchor;
        sdp.add_constraint(&[((i, j), 1.0), ((ai, aj), -1.0)], 0.0);
    }

    add_fixings_and_objective(&mut sdp, &anchors, opts)?;
    let offset = 3.0 - opts.alpha * opts.delta / 2.0;
    sdp.validate().map_err(|e| e.to_string())?;
    Ok(MomentProblem {
        index: index.iter().map(|w| word_to_string(w)).collect(),
        index_words: index,
        m,
        anchors,
        sdp,
        offset,
        doubled: false,
    })
}

/// The perfect-coordination feasibility problem at a given level.
pub fn perfect_coordination_problem(level: usize) -> Result<MomentProblem, String> {
    build_moment_problem(&MomentOptions {
        level,
        alpha: 0.0,
        delta: 0.0,
        perfect_coordination: true,
    })
}

/// Evaluate the moment of a word under concrete operators and a state:
/// ⟨φ| Π_{w_1} ... Π_{w_k} |φ⟩ (outcome-0 projectors only).
pub fn word_moment(ops: &[CMat; 4], state: &CVec, w: &[Letter]) -> C {
    let mut v = state.clone();
    for l in w.iter().rev() {
        v = &ops[l.party as usize] * v;
    }
    state.dotc(&v)
}

/// The doubled real moment matrix of a concrete operator assignment —
/// a candidate feasible point for [`MomentProblem::sdp`].
///
/// `ops[k]` is the outcome-0 projector of party k (A, B, C, D), all
/// embedded in one common space; `state` is the global state.  For the
/// point to be feasible the operators must commute according to the
/// inflated structure (all pairs except (A, C) and (B, D)) and the
/// moments must satisfy the fixings the problem was built with.
pub fn moment_matrix_point(problem: &MomentProblem, ops: &[CMat; 4], state: &CVec) -> DMatrix<f64> {
    let m = problem.m;
    if !problem.doubled {
        // Real-slice problem: the point is the real part alone.
        let mut s = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let u = cell_word(&problem.index_words, i, j);
                let v = word_moment(ops, state, &u).re;
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        return s;
    }
    let mut y = DMatrix::<f64>::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in i..m {
            let u = cell_word(&problem.index_words, i, j);
            let val = word_moment(ops, state, &u);
            let (s, k) = (val.re, val.im);
            y[(i, j)] = s;
            y[(j, i)] = s;
            y[(m + i, m + j)] = s;
            y[(m + j, m + i)] = s;
            // Top-right block is -K, bottom-left is K; K[j][i] = -K[i][j].
            y[(i, m + j)] = -k;
            y[(m + j, i)] = -k;
            y[(j, m + i)] = k;
            y[(m + i, j)] = k;
        }
    }
    y
}

/// The two-qubit chain witness: a maximally entangled pair, with A and C
/// measuring the first qubit at angles 0 and π/3 and B and D measuring
/// the second at π/6 and π/2.  Neighbouring angles differ by π/6, making
/// each chain correlator cos(π/6) = √3/2, while A and D are π/2 apart and
/// uncorrelated — the configuration that saturates the chain bound
/// 3√3/2 with ⟨A⟩ = ⟨D⟩ = 0.
pub fn chain_witness() -> ([CMat; 4], CVec) {
    use crate::quantum::{bell_phi_plus, projectors_xz};
    let eye = CMat::identity(2, 2);
    let on_first = |theta: f64| -> CMat {
        let p = projectors_xz(theta);
        p[0].kronecker(&eye)
    };
    let on_second = |theta: f64| -> CMat {
        let p = projectors_xz(theta);
        eye.kronecker(&p[0])
    };
    let a = on_first(0.0);
    let b = on_second(std::f64::consts::PI / 6.0);
    let c = on_first(std::f64::consts::PI / 3.0);
    let d = on_second(std::f64::consts::PI / 2.0);
    (
        [a, b, c, d],
        bell_phi_plus(),
    )
}
