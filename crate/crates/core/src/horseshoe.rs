//! Symbolic Markov horseshoes: local products of a stable and an unstable
//! regular Cantor set over a common subshift.
//!
//! A horseshoe is represented purely symbolically. Geometry enters through
//! per-symbol rational contraction data: `stable[a]` contracts along the
//! stable direction, `unstable[a]` is the contraction of the inverse map
//! along the unstable direction (so the forward unstable derivative is its
//! reciprocal). The conservative case is exact equality of the two, which
//! makes the product of the stable contraction and the unstable expansion
//! equal to one.

use num_rational::BigRational;
use num_traits::Signed;
use serde::Deserialize;

use crate::arith::{parse_rational, rat_int};
use crate::cantor::RegularCantorSet;
use crate::enclosure::Enclosure;
use crate::error::{Error, Result};
use crate::symbolic::{
    dyn_markov_value, spectrum_sample, CfSumPotential, PeriodicPoint, Potential, Sft,
    SpectrumSample, Sym,
};

/// Orbit functionals on horseshoes share the window shape of subshift
/// potentials: a locality and a value rule on two-sided windows.
pub use crate::symbolic::Potential as OrbitFunctional;

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovHorseshoe {
    sft: Sft,
    stable: Vec<BigRational>,
    unstable: Vec<BigRational>,
    digits: Option<Vec<u64>>,
}

impl MarkovHorseshoe {
    /// Per-symbol stable and unstable contraction ratios over a subshift.
    /// Both families must lie in (0, 1) and sum to at most 1, so each side
    /// realizes an affine regular Cantor set. An optional digit map assigns
    /// a continued fraction digit to each symbol.
    pub fn new(
        sft: Sft,
        stable: Vec<BigRational>,
        unstable: Vec<BigRational>,
        digits: Option<Vec<u64>>,
    ) -> Result<Self> {
        let n = sft.alphabet_size();
        for (side, ratios) in [("stable", &stable), ("unstable", &unstable)] {
            if ratios.len() != n {
                return Err(Error::InvalidHorseshoe(format!(
                    "{side} ratio count {} does not match alphabet size {n}",
                    ratios.len()
                )));
            }
            let mut total = BigRational::from_integer(0.into());
            for r in ratios.iter() {
                if !r.is_positive() || r >= &rat_int(1) {
                    return Err(Error::InvalidHorseshoe(format!(
                        "{side} ratio {r} is outside (0, 1)"
                    )));
                }
                total += r;
            }
            if total > rat_int(1) {
                return Err(Error::InvalidHorseshoe(format!(
                    "{side} ratios sum to {total} > 1"
                )));
            }
        }
        if let Some(d) = &digits {
            if d.len() != n {
                return Err(Error::InvalidHorseshoe(format!(
                    "digit map length {} does not match alphabet size {n}",
                    d.len()
                )));
            }
            if d.contains(&0) {
                return Err(Error::InvalidDigit(0));
            }
        }
        Ok(Self { sft, stable, unstable, digits })
    }

    /// Linear horseshoe: full shift on n symbols, all ratios equal on both
    /// sides (n = 2, ratio 1/3 is the Smale model).
    pub fn linear(n: usize, ratio: BigRational) -> Result<Self> {
        Self::new(
            Sft::full(n)?,
            vec![ratio.clone(); n],
            vec![ratio; n],
            None,
        )
    }

    pub fn sft(&self) -> &Sft {
        &self.sft
    }

    pub fn stable_ratios(&self) -> &[BigRational] {
        &self.stable
    }

    pub fn unstable_ratios(&self) -> &[BigRational] {
        &self.unstable
    }

    pub fn digits(&self) -> Option<&[u64]> {
        self.digits.as_deref()
    }

    /// Exact conservativity: every symbol's stable contraction equals its
    /// unstable contraction, so stable contraction times unstable expansion
    /// is exactly one.
    pub fn conservative(&self) -> bool {
        self.stable == self.unstable
    }

    /// Time reversal: transposed transitions with the two foliations
    /// swapped. The unstable set of the reversal is the stable set of the
    /// original.
    pub fn inverse(&self) -> Self {
        Self {
            sft: self.sft.transpose(),
            stable: self.unstable.clone(),
            unstable: self.stable.clone(),
            digits: self.digits.clone(),
        }
    }

    /// The stable Cantor set: stable ratios indexed by transposed words.
    pub fn stable_cantor(&self) -> Result<RegularCantorSet> {
        RegularCantorSet::affine_family(&self.stable)?.with_sft(self.sft.transpose())
    }

    /// The unstable Cantor set over the forward subshift.
    pub fn unstable_cantor(&self) -> Result<RegularCantorSet> {
        RegularCantorSet::affine_family(&self.unstable)?.with_sft(self.sft.clone())
    }

    /// Dimension estimate of the horseshoe: the componentwise sum of the
    /// stable and unstable dimension brackets at the given level.
    pub fn hd_estimate(&self, level: usize, tol: &BigRational) -> Result<Enclosure> {
        let s = self.stable_cantor()?.dim_bounds(level, tol)?;
        let u = self.unstable_cantor()?.dim_bounds(level, tol)?;
        Ok(s.add(&u))
    }

    /// Restrict to the sub-horseshoe spanned by equal-length admissible
    /// words. The word alphabet keeps the given order; a transition between
    /// two words is allowed exactly when their concatenation is admissible.
    /// Ratios compose multiplicatively along words; digit maps do not
    /// descend to word symbols.
    pub fn sub_horseshoe(&self, words: &[Vec<Sym>]) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let len = words[0].len();
        for w in words {
            if w.is_empty() {
                return Err(Error::EmptyWord);
            }
            if w.len() != len {
                return Err(Error::InvalidHorseshoe(
                    "sub-horseshoe words must share one length".into(),
                ));
            }
            if !self.sft.is_admissible(w) {
                return Err(Error::NotAdmissible(w.clone()));
            }
        }
        for (i, w) in words.iter().enumerate() {
            if words[..i].contains(w) {
                return Err(Error::InvalidHorseshoe(format!(
                    "duplicate sub-horseshoe word {w:?}"
                )));
            }
        }
        let k = words.len();
        let pairs: Vec<(Sym, Sym)> = (0..k)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .filter(|&(i, j)| self.sft.allows(words[i][len - 1], words[j][0]))
            .collect();
        let product = |ratios: &[BigRational], w: &[Sym]| -> BigRational {
            w.iter().map(|&a| &ratios[a]).product()
        };
        Self::new(
            Sft::new(k, &pairs)?,
            words.iter().map(|w| product(&self.stable, w)).collect(),
            words.iter().map(|w| product(&self.unstable, w)).collect(),
            None,
        )
    }

    /// Max of the functional over one period of the orbit (the discrete
    /// max-along-orbit value). Rotation-invariant.
    pub fn max_along_word(
        &self,
        f: &dyn Potential,
        p: &PeriodicPoint,
        tol: &BigRational,
    ) -> Result<Enclosure> {
        dyn_markov_value(&self.sft, p, f, tol)
    }

    /// Periodic-orbit spectrum of the functional over the horseshoe.
    pub fn spectrum(
        &self,
        f: &dyn Potential,
        max_period: usize,
        tol: &BigRational,
    ) -> Result<SpectrumSample> {
        spectrum_sample(&self.sft, f, max_period, tol)
    }

    /// The two-sided continued fraction functional over this horseshoe's
    /// digit map, truncated at locality m.
    pub fn cf_potential(&self, m: usize) -> Result<CfSumPotential> {
        match &self.digits {
            Some(d) => CfSumPotential::new(m, d.clone()),
            None => Err(Error::InvalidHorseshoe(
                "horseshoe carries no digit map".into(),
            )),
        }
    }

    /// Load a horseshoe from its TOML description. Fields:
    /// `symbols` (alphabet size), `transitions` ("full", "golden_mean", or a
    /// list of allowed pairs), `stable` and `unstable` (rational strings per
    /// symbol), optional `digits`, and an optional declared `conservative`
    /// flag that must match the ratio data exactly.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let doc: HorseshoeDoc =
            toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let sft = match &doc.transitions {
            TransitionSpec::Named(name) => match name.as_str() {
                "full" => Sft::full(doc.symbols)?,
                "golden_mean" => {
                    if doc.symbols != 2 {
                        return Err(Error::Parse(
                            "golden_mean transitions need exactly 2 symbols".into(),
                        ));
                    }
                    Sft::golden_mean()
                }
                other => {
                    return Err(Error::Parse(format!(
                        "unknown transition structure {other:?}"
                    )))
                }
            },
            TransitionSpec::Pairs(pairs) => Sft::new(doc.symbols, pairs)?,
        };
        let parse_side = |side: &[String]| -> Result<Vec<BigRational>> {
            side.iter().map(|s| parse_rational(s)).collect()
        };
        let h = Self::new(
            sft,
            parse_side(&doc.stable)?,
            parse_side(&doc.unstable)?,
            doc.digits,
        )?;
        if let Some(declared) = doc.conservative {
            if declared != h.conservative() {
                return Err(Error::InvalidHorseshoe(format!(
                    "declared conservative = {declared} but ratio data says {}",
                    h.conservative()
                )));
            }
        }
        Ok(h)
    }

    pub fn from_toml_file(path: &std::path::Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HorseshoeDoc {
    symbols: usize,
    transitions: TransitionSpec,
    stable: Vec<String>,
    unstable: Vec<String>,
    #[serde(default)]
    digits: Option<Vec<u64>>,
    #[serde(default)]
    conservative: Option<bool>,
    #[serde(default)]
    #[allow(dead_code)]
    name: Option<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TransitionSpec {
    Named(String),
    Pairs(Vec<(usize, usize)>),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{pow10, rat};
    use crate::symbolic::TablePotential;

    fn third_horseshoe() -> MarkovHorseshoe {
        MarkovHorseshoe::linear(2, rat(1, 3)).unwrap()
    }

    #[test]
    fn linear_third_factors_are_middle_third() {
        let h = third_horseshoe();
        assert!(h.conservative());
        assert_eq!(h.stable_cantor().unwrap(), RegularCantorSet::middle_third());
        assert_eq!(h.unstable_cantor().unwrap(), RegularCantorSet::middle_third());
    }

    #[test]
    fn inverse_swaps_the_foliations() {
        let sft = Sft::new(2, &[(0, 0), (0, 1), (1, 0)]).unwrap();
        let h = MarkovHorseshoe::new(
            sft,
            vec![rat(1, 2), rat(1, 3)],
            vec![rat(1, 3), rat(1, 2)],
            None,
        )
        .unwrap();
        assert!(!h.conservative());
        assert_eq!(h.inverse().unstable_cantor().unwrap(), h.stable_cantor().unwrap());
        assert_eq!(h.inverse().inverse(), h);
    }

    #[test]
    fn hd_estimates_match_analytic_roots() {
        let tol = pow10(7);
        let slack = pow10(9);
        // 2 log 2 / log 3 = 1.2618595071...
        let hd = third_horseshoe().hd_estimate(1, &tol).unwrap();
        assert!(hd.widen(&slack).contains(&rat(12_618_595_071, 10_000_000_000)));
        assert!(hd.width() <= rat(4, 10_000_000));
        // 2 log 4 / log 5 = 1.7227062322...
        let h5 = MarkovHorseshoe::linear(4, rat(1, 5)).unwrap();
        let hd5 = h5.hd_estimate(1, &tol).unwrap();
        assert!(hd5.widen(&slack).contains(&rat(17_227_062_322, 10_000_000_000)));
        // degenerate single symbol
        let h1 = MarkovHorseshoe::linear(1, rat(1, 2)).unwrap();
        let hd1 = h1.hd_estimate(1, &tol).unwrap();
        assert!(hd1.is_point());
        assert_eq!(hd1.lo(), &rat(0, 1));
    }

    #[test]
    fn hd_is_exactly_the_sum_of_factor_bounds() {
        let sft = Sft::golden_mean();
        let h = MarkovHorseshoe::new(
            sft,
            vec![rat(1, 3), rat(1, 4)],
            vec![rat(1, 5), rat(1, 3)],
            None,
        )
        .unwrap();
        let tol = pow10(4);
        let hd = h.hd_estimate(3, &tol).unwrap();
        let s = h.stable_cantor().unwrap().dim_bounds(3, &tol).unwrap();
        let u = h.unstable_cantor().unwrap().dim_bounds(3, &tol).unwrap();
        assert_eq!(hd.lo(), &(s.lo() + u.lo()));
        assert_eq!(hd.hi(), &(s.hi() + u.hi()));
    }

    #[test]
    fn sub_horseshoe_on_two_blocks() {
        let h = third_horseshoe();
        let sub = h.sub_horseshoe(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(sub.stable_ratios(), &[rat(1, 9), rat(1, 9)]);
        let tol = pow10(7);
        // per factor: root of 2 * 9^(-d) = 1 is log 2 / log 9 = 0.3154648767...
        let d = sub.unstable_cantor().unwrap().dim_bounds(1, &tol).unwrap();
        assert!(d.widen(&pow10(9)).contains(&rat(3_154_648_767, 10_000_000_000)));
        // dimension never exceeds the parent's at the same level
        let parent = h.hd_estimate(2, &tol).unwrap();
        let sub_hd = sub.hd_estimate(2, &tol).unwrap();
        assert!(sub_hd.hi() <= parent.hi());
        // single word: one periodic orbit, zero-dimensional
        let single = h.sub_horseshoe(&[vec![0, 1]]).unwrap();
        let hd = single.hd_estimate(2, &pow10(4)).unwrap();
        assert!(hd.is_point());
        assert_eq!(hd.lo(), &rat(0, 1));
    }

    #[test]
    fn sub_horseshoe_on_full_length_one_words_is_identity() {
        let h = third_horseshoe();
        let sub = h.sub_horseshoe(&[vec![0], vec![1]]).unwrap();
        assert_eq!(sub, h);
        assert!(h.sub_horseshoe(&[]).is_err());
        assert!(h.sub_horseshoe(&[vec![0], vec![0]]).is_err());
        assert!(h.sub_horseshoe(&[vec![0], vec![1, 1]]).is_err());
    }

    #[test]
    fn max_along_word_takes_the_symbol_maximum() {
        let h = third_horseshoe();
        let f = TablePotential::from_rule(h.sft(), 0, |w| rat(w[0] as i64, 1)).unwrap();
        let tol = pow10(6);
        let p = PeriodicPoint::new(h.sft(), vec![0, 1]).unwrap();
        let v = h.max_along_word(&f, &p, &tol).unwrap();
        assert_eq!(v, Enclosure::point(rat(1, 1)));
        // rotation invariance
        let q = PeriodicPoint::new(h.sft(), vec![1, 0]).unwrap();
        assert_eq!(h.max_along_word(&f, &q, &tol).unwrap(), v);
        // constant functional
        let c = TablePotential::constant(rat(7, 2));
        let vc = h.max_along_word(&c, &p, &tol).unwrap();
        assert_eq!(vc, Enclosure::point(rat(7, 2)));
    }

    #[test]
    fn spectrum_over_digit_horseshoe_has_sqrt5_minimum() {
        let h = MarkovHorseshoe::new(
            Sft::full(2).unwrap(),
            vec![rat(1, 3), rat(1, 3)],
            vec![rat(1, 3), rat(1, 3)],
            Some(vec![1, 2]),
        )
        .unwrap();
        let f = h.cf_potential(8).unwrap();
        let sample = h.spectrum(&f, 3, &pow10(6)).unwrap();
        // minimum witnessed by the fixed word (1): value encloses sqrt 5
        let (min_val, min_word) = &sample.entries[0];
        assert_eq!(min_word.word(), &[0]);
        assert!(min_val.lo() * min_val.lo() <= rat(5, 1));
        assert!(min_val.hi() * min_val.hi() >= rat(5, 1));
    }

    #[test]
    fn toml_descriptor_round_trip() {
        let text = r#"
            name = "third"
            symbols = 2
            transitions = "full"
            stable = ["1/3", "1/3"]
            unstable = ["1/3", "1/3"]
            digits = [1, 2]
            conservative = true
        "#;
        let h = MarkovHorseshoe::from_toml_str(text).unwrap();
        assert!(h.conservative());
        assert_eq!(h.digits(), Some(&[1u64, 2][..]));
        let pairs = r#"
            symbols = 2
            transitions = [[0, 0], [0, 1], [1, 0]]
            stable = ["0.25", "1/4"]
            unstable = ["1/4", "1/4"]
        "#;
        let h2 = MarkovHorseshoe::from_toml_str(pairs).unwrap();
        assert!(!h2.sft().allows(1, 1));
        let mismatch = r#"
            symbols = 2
            transitions = "full"
            stable = ["1/3", "1/3"]
            unstable = ["1/3", "1/4"]
            conservative = true
        "#;
        assert!(MarkovHorseshoe::from_toml_str(mismatch).is_err());
        assert!(MarkovHorseshoe::from_toml_str("symbols = 2").is_err());
    }
}
