//! The model file format:
//! `{"worlds":n,"edges":[[i,j],...],"valuation":{"p":[...],...}}`.
//!
//! Output is compact with edges, variables and world lists sorted, so
//! printing a parsed canonical file reproduces it byte for byte.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Frame, KripkeError, Model};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub worlds: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<usize>>,
}

impl ModelFile {
    pub fn from_model(m: &Model) -> ModelFile {
        ModelFile {
            worlds: m.world_count(),
            edges: m.frame.edges().into_iter().map(|(a, b)| [a, b]).collect(),
            valuation: m
                .valuation()
                .map(|(k, mask)| (k.to_string(), (0..m.world_count()).filter(|w| mask >> w & 1 == 1).collect()))
                .collect(),
        }
    }

    pub fn to_model(&self) -> Result<Model, KripkeError> {
        let frame = Frame::new(self.worlds, self.edges.iter().map(|&[a, b]| (a, b)))?;
        let mut model = Model::new(frame);
        for (name, worlds) in &self.valuation {
            model = model.with_var(name, worlds.iter().copied())?;
        }
        Ok(model)
    }
}

impl Model {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ModelFile::from_model(self)).expect("model files always serialize")
    }

    pub fn from_json(text: &str) -> Result<Model, KripkeError> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| KripkeError::Malformed(e.to_string()))?;
        file.to_model()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_text() {
        let m = Model::new(Frame::new(2, [(1, 0), (0, 1)]).unwrap())
            .with_var("q", [])
            .unwrap()
            .with_var("p", [1, 0])
            .unwrap();
        let text = m.to_json();
        assert_eq!(text, r#"{"worlds":2,"edges":[[0,1],[1,0]],"valuation":{"p":[0,1],"q":[]}}"#);
        assert_eq!(Model::from_json(&text).unwrap(), m);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(Model::from_json("{"), Err(KripkeError::Malformed(_))));
        assert!(matches!(
            Model::from_json(r#"{"worlds":1,"edges":[[0,1]],"valuation":{}}"#),
            Err(KripkeError::WorldOutOfRange { .. })
        ));
        assert!(matches!(
            Model::from_json(r#"{"worlds":1,"edges":[],"valuation":{"p":[3]}}"#),
            Err(KripkeError::WorldOutOfRange { .. })
        ));
        assert!(matches!(
            Model::from_json(r#"{"worlds":1,"edges":[],"valuation":{"un":[0]}}"#),
            Err(KripkeError::InvalidVariable(_))
        ));
        assert_eq!(Model::from_json(r#"{"worlds":0,"edges":[],"valuation":{}}"#), Err(KripkeError::NoWorlds));
    }

    proptest! {
        #[test]
        fn round_trip(n in 1usize..6, edges in proptest::collection::vec((0usize..6, 0usize..6), 0..12),
                      p in 0u64..64, q in 0u64..64) {
            let edges: Vec<_> = edges.into_iter().map(|(a, b)| (a % n, b % n)).collect();
            let m = Model::new(Frame::new(n, edges).unwrap())
                .with_var("p", (0..n).filter(|w| p >> w & 1 == 1)).unwrap()
                .with_var("q", (0..n).filter(|w| q >> w & 1 == 1)).unwrap();
            let text = m.to_json();
            let back = Model::from_json(&text).unwrap();
            prop_assert_eq!(&back, &m);
            prop_assert_eq!(back.to_json(), text);
        }
    }
}
