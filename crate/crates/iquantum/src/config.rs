//! Run configuration: a TOML file mirroring [`RunConfig`], overridden by flags.

use std::collections::BTreeMap;
use std::path::Path;

use iquantum_core::iqg::Level;
use iquantum_core::qgroup::distinguished_parameter;
use iquantum_core::rootdata::{build, DiagramKind, DiagramSpec, IQuiver, TauChoice};
use iquantum_core::scalars::FieldElem;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Everything a command needs; serialized verbatim into every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// `A3`, `D4`, `E6`, …
    pub diagram: String,
    /// `identity`, `diagram`, or explicit 1-based images such as `3,2,1`.
    pub tau: String,
    /// Arrows over node labels, e.g. `1<-2,2->3`; default orientation if absent.
    pub orientation: Option<String>,
    /// Label A_{2r+1} quasi-split nodes r, …, 0, …, −r.
    pub symmetric_labels: bool,
    /// `universal`, `distinguished`, `non-distinguished`, or `parameter`
    /// (distinguished values overridden by `params`).
    pub level: String,
    /// Parameter ς by node label; unlisted nodes take the distinguished value.
    pub params: BTreeMap<String, String>,
    /// Completion cap D of the ambient rewriting system.
    pub cap: usize,
    /// Largest ansatz degree D_inv for inverse braid operators.
    pub inv_cap: usize,
    /// Field sizes for the Hall-algebra oracle.
    pub primes: Vec<u32>,
    /// Largest module dimension classified; 0 picks a per-command default.
    pub max_dim: usize,
    /// Include E6 in suites.
    pub extended: bool,
    /// Braid pair `i,j` (labels); all pairs if absent.
    pub pair: Option<String>,
    /// Also run the reduced-ideal stability check.
    pub ideal: bool,
    /// PBW: independence degree, Cartan box exponent, spanning word length.
    pub degree: usize,
    pub box_exp: i16,
    pub span_len: usize,
    /// ψ cross-check: number and maximal length of random words, and the seed.
    pub words: usize,
    pub word_len: usize,
    pub seed: u64,
    /// Hall product of class labels separated by `*`.
    pub product: Option<String>,
    /// Untwisted Hall product.
    pub untwisted: bool,
    /// Dump every class up to this total dimension (0: none).
    pub inventory: usize,
    /// Sink label for reflection; first admissible sink if absent.
    pub sink: Option<String>,
    /// Expected indecomposable count (count-indec).
    pub expect: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            diagram: "A2".into(),
            tau: "identity".into(),
            orientation: None,
            symmetric_labels: false,
            level: "universal".into(),
            params: BTreeMap::new(),
            cap: iquantum_core::qgroup::DEFAULT_CAP,
            inv_cap: 5,
            primes: vec![2, 3],
            max_dim: 0,
            extended: false,
            pair: None,
            ideal: false,
            degree: 3,
            box_exp: 0,
            span_len: 3,
            words: 10,
            word_len: 3,
            seed: 1,
            product: None,
            untwisted: false,
            inventory: 0,
            sink: None,
            expect: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {}", path.display(), e)))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {}", path.display(), e)))
    }

    pub fn with_diagram(diagram: &str, tau: &str) -> Self {
        RunConfig { diagram: diagram.into(), tau: tau.into(), ..Default::default() }
    }

    fn kind_rank(&self) -> Result<(DiagramKind, usize), CliError> {
        let d = self.diagram.trim();
        let (k, r) = d.split_at(d.find(|c: char| c.is_ascii_digit()).unwrap_or(d.len()));
        let kind = match k.to_ascii_uppercase().as_str() {
            "A" => DiagramKind::A,
            "D" => DiagramKind::D,
            "E" => DiagramKind::E,
            _ => return Err(CliError::Config(format!("unknown diagram '{}'", d))),
        };
        let rank = r.parse().map_err(|_| CliError::Config(format!("missing rank in '{}'", d)))?;
        Ok((kind, rank))
    }

    fn tau_choice(&self, n: usize) -> Result<TauChoice, CliError> {
        match self.tau.trim().to_ascii_lowercase().as_str() {
            "identity" | "id" | "split" => Ok(TauChoice::Identity),
            "diagram" | "quasi-split" => Ok(TauChoice::Diagram),
            s => {
                let t: Vec<usize> = s
                    .split(',')
                    .map(|x| x.trim().parse::<usize>().ok().filter(|&k| k >= 1 && k <= n).map(|k| k - 1))
                    .collect::<Option<_>>()
                    .ok_or_else(|| CliError::Config(format!("cannot read τ '{}'", self.tau)))?;
                Ok(TauChoice::Explicit(t))
            }
        }
    }

    /// Validate against the root-data builder.
    pub fn quiver(&self) -> Result<IQuiver, CliError> {
        let (kind, rank) = self.kind_rank()?;
        let mut spec = DiagramSpec::new(kind, rank, self.tau_choice(rank)?);
        spec.symmetric_labels = self.symmetric_labels;
        let q = build(&spec)?;
        match &self.orientation {
            None => Ok(q),
            Some(o) => {
                let arrows = q.parse_orientation(o)?;
                Ok(build(&spec.with_orientation(arrows))?)
            }
        }
    }

    pub fn node(&self, q: &IQuiver, label: &str) -> Result<usize, CliError> {
        q.node(label.trim()).ok_or_else(|| CliError::Config(format!("unknown node '{}'", label)))
    }

    /// Parameter vector for the configured level (`None` at universal level).
    pub fn param_values(&self, q: &IQuiver) -> Result<Option<Vec<FieldElem>>, CliError> {
        match self.level.as_str() {
            "universal" => Ok(None),
            "distinguished" => Ok(Some(distinguished_parameter(q))),
            // A fixed admissible choice away from ς_⋄: −v⁻⁴ at fixed nodes, v² elsewhere.
            "non-distinguished" => Ok(Some(
                (0..q.n)
                    .map(|i| FieldElem::parse(if q.fixed(i) { "-v^-4" } else { "v^2" }))
                    .collect::<Result<_, _>>()?,
            )),
            "parameter" => {
                let mut vs = distinguished_parameter(q);
                for (label, text) in &self.params {
                    vs[self.node(q, label)?] = FieldElem::parse(text)?;
                }
                Ok(Some(vs))
            }
            other => Err(CliError::Config(format!("unknown level '{}'", other))),
        }
    }

    pub fn level_of(&self, q: &IQuiver) -> Result<Level, CliError> {
        Ok(match self.param_values(q)? {
            None => Level::Universal,
            Some(vs) => Level::Parameter(vs),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let mut c = RunConfig::with_diagram("A3", "diagram");
        c.params.insert("1".into(), "-v^-4".into());
        let text = toml::to_string(&c).unwrap();
        assert_eq!(toml::from_str::<RunConfig>(&text).unwrap(), c);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(toml::from_str::<RunConfig>("diagramm = \"A2\"").is_err());
    }

    #[test]
    fn explicit_tau_and_orientation() {
        let mut c = RunConfig::with_diagram("A3", "3,2,1");
        c.orientation = Some("1->2,3->2".into());
        let q = c.quiver().unwrap();
        assert_eq!(q.tau, vec![2, 1, 0]);
        assert!(q.is_sink(1));
    }

    #[test]
    fn invalid_tau_on_a4() {
        let e = RunConfig::with_diagram("A4", "diagram").quiver().unwrap_err();
        assert_eq!(e.kind(), "InvalidInvolution");
    }

    #[test]
    fn parameter_table_overrides_distinguished() {
        let mut c = RunConfig::with_diagram("A2", "identity");
        c.level = "parameter".into();
        c.params.insert("2".into(), "-v^-4".into());
        let q = c.quiver().unwrap();
        let vs = c.param_values(&q).unwrap().unwrap();
        assert_eq!(vs[0], FieldElem::parse("-v^-2").unwrap());
        assert_eq!(vs[1], FieldElem::parse("-v^-4").unwrap());
    }
}
