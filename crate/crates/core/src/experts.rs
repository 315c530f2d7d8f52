//! The four specialist description sources, prompt retrieval, and
//! aggregation of expert texts into the initial description the editing
//! agent starts from.
//!
//! Experts are interfaces, not models: the canned backend reads per-expert
//! texts shipped inside scene records, and the companion crate provides an
//! HTTP backend for live experts behind the same trait.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::embed::{cosine, EmbeddingProvider, EmbeddingVector};
use crate::gate::AlphaVector;
use crate::rng::{hash_bytes, Rng};
use crate::scene::SceneRecord;
use crate::textkit::{tokenize, TokenSeq};

/// The four scene aspects. Declaration order is the tie-break order used
/// throughout aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExpertKind {
    Traffic,
    Signs,
    Pedestrian,
    Environment,
}

pub const EXPERT_COUNT: usize = 4;

impl ExpertKind {
    pub const ALL: [ExpertKind; EXPERT_COUNT] = [
        ExpertKind::Traffic,
        ExpertKind::Signs,
        ExpertKind::Pedestrian,
        ExpertKind::Environment,
    ];

    pub fn index(&self) -> usize {
        *self as usize
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ExpertKind::Traffic => "traffic",
            ExpertKind::Signs => "signs",
            ExpertKind::Pedestrian => "pedestrian",
            ExpertKind::Environment => "environment",
        }
    }

    pub fn parse(s: &str) -> Option<ExpertKind> {
        match s {
            "traffic" => Some(ExpertKind::Traffic),
            "signs" => Some(ExpertKind::Signs),
            "pedestrian" => Some(ExpertKind::Pedestrian),
            "environment" => Some(ExpertKind::Environment),
            _ => None,
        }
    }
}

impl fmt::Display for ExpertKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExpertError {
    MissingExpertText(ExpertKind),
    EmptyPromptStore(ExpertKind),
    AlphaNotNormalized(f64),
    RemoteExpertUnavailable(String),
    MalformedRemoteResponse(String),
}

impl fmt::Display for ExpertError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpertError::MissingExpertText(k) => write!(f, "scene carries no canned text for expert {k}"),
            ExpertError::EmptyPromptStore(k) => write!(f, "prompt store has no prompts for expert {k}"),
            ExpertError::AlphaNotNormalized(s) => write!(f, "expert weights sum to {s}, expected 1"),
            ExpertError::RemoteExpertUnavailable(msg) => write!(f, "remote expert unavailable: {msg}"),
            ExpertError::MalformedRemoteResponse(msg) => write!(f, "malformed remote response: {msg}"),
        }
    }
}

/// One stored prompt with its cached embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct PromptEntry {
    pub expert: ExpertKind,
    pub id: String,
    pub text: String,
    pub embedding: EmbeddingVector,
}

/// Read-only prompt collection.
#[derive(Debug, Clone, Default)]
pub struct PromptStore {
    entries: Vec<PromptEntry>,
}

impl PromptStore {
    /// Build from raw (expert, id, text) triples, caching prompt embeddings
    /// through the provider.
    pub fn build(
        triples: impl IntoIterator<Item = (ExpertKind, String, String)>,
        provider: &dyn EmbeddingProvider,
    ) -> Result<PromptStore, crate::embed::EmbedError> {
        let mut entries = Vec::new();
        for (expert, id, text) in triples {
            let embedding = provider.embed_seq(&tokenize(&text))?;
            entries.push(PromptEntry { expert, id, text, embedding });
        }
        Ok(PromptStore { entries })
    }

    pub fn entries(&self) -> &[PromptEntry] {
        &self.entries
    }

    pub fn for_expert(&self, expert: ExpertKind) -> impl Iterator<Item = &PromptEntry> {
        self.entries.iter().filter(move |e| e.expert == expert)
    }
}

/// Project a scene feature vector into embedding space: multiply by a
/// seeded random Gaussian matrix, then L2-normalize. Deterministic in
/// (seed, feature length, target dim).
pub fn project_features(features: &[f64], seed: u64, dim: usize) -> EmbeddingVector {
    let mut rng = Rng::seed_from_u64(hash_bytes(seed, b"feature-projection"));
    let mut out = EmbeddingVector::zeros(dim);
    // row-major (dim x n) matrix drawn in a fixed order
    for o in out.0.iter_mut() {
        let mut acc = 0.0;
        for &x in features {
            acc += rng.next_gaussian() * x;
        }
        *o = acc;
    }
    out.normalize();
    out
}

/// Top-k prompts for an expert, ranked by cosine between the projected
/// scene features and each prompt's cached embedding. Ties break by
/// ascending prompt id; fewer than k are returned when the store is small.
pub fn select_prompts<'a>(
    scene_features: &[f64],
    store: &'a PromptStore,
    expert: ExpertKind,
    k: usize,
    projection_seed: u64,
    dim: usize,
) -> Result<Vec<&'a PromptEntry>, ExpertError> {
    assert!(k >= 1, "k must be >= 1");
    let mut candidates: Vec<&PromptEntry> = store.for_expert(expert).collect();
    if candidates.is_empty() {
        return Err(ExpertError::EmptyPromptStore(expert));
    }
    let query = project_features(scene_features, projection_seed, dim);
    let mut scored: Vec<(f64, &PromptEntry)> = candidates
        .drain(..)
        .map(|e| {
            let sim = cosine(&query, &e.embedding).unwrap_or(0.0);
            (sim, e)
        })
        .collect();
    scored.sort_by(|(sa, ea), (sb, eb)| {
        sb.partial_cmp(sa).unwrap_or(core::cmp::Ordering::Equal).then_with(|| ea.id.cmp(&eb.id))
    });
    Ok(scored.into_iter().take(k).map(|(_, e)| e).collect())
}

/// Source of expert descriptions.
pub trait ExpertBackend {
    fn describe(
        &self,
        expert: ExpertKind,
        scene: &SceneRecord,
        prompts: &[&PromptEntry],
    ) -> Result<String, ExpertError>;
}

/// Backend that returns the per-expert text stored in the scene record.
#[derive(Debug, Clone, Copy, Default)]
pub struct CannedBackend;

impl ExpertBackend for CannedBackend {
    fn describe(
        &self,
        expert: ExpertKind,
        scene: &SceneRecord,
        _prompts: &[&PromptEntry],
    ) -> Result<String, ExpertError> {
        scene
            .expert_texts
            .get(&expert)
            .cloned()
            .ok_or(ExpertError::MissingExpertText(expert))
    }
}

/// The four expert texts, the gate's weights, and their aggregation.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpertBundle {
    pub scene_id: String,
    pub texts: BTreeMap<ExpertKind, TokenSeq>,
    pub alpha: AlphaVector,
    pub aggregated: TokenSeq,
}

impl ExpertBundle {
    pub fn text(&self, expert: ExpertKind) -> &TokenSeq {
        &self.texts[&expert]
    }

    pub fn texts_in_declaration_order(&self) -> [&TokenSeq; EXPERT_COUNT] {
        [
            &self.texts[&ExpertKind::Traffic],
            &self.texts[&ExpertKind::Signs],
            &self.texts[&ExpertKind::Pedestrian],
            &self.texts[&ExpertKind::Environment],
        ]
    }
}

/// Query one expert through a backend and tokenize its answer.
pub fn query_expert(
    expert: ExpertKind,
    scene: &SceneRecord,
    prompts: &[&PromptEntry],
    backend: &dyn ExpertBackend,
) -> Result<TokenSeq, ExpertError> {
    let raw = backend.describe(expert, scene, prompts)?;
    Ok(tokenize(&raw))
}

/// Concatenate the four expert sequences in descending alpha order, ties by
/// declaration order, with no separator tokens.
pub fn aggregate(texts: &BTreeMap<ExpertKind, TokenSeq>, alpha: &AlphaVector) -> TokenSeq {
    let mut order: Vec<ExpertKind> = ExpertKind::ALL.into();
    order.sort_by(|a, b| {
        alpha.0[b.index()]
            .partial_cmp(&alpha.0[a.index()])
            .unwrap_or(core::cmp::Ordering::Equal)
            .then_with(|| a.index().cmp(&b.index()))
    });
    let mut out = TokenSeq::new();
    for kind in order {
        if let Some(seq) = texts.get(&kind) {
            out.extend(seq.iter().cloned());
        }
    }
    out
}

/// Query all four experts and assemble the bundle. Fails whole (no partial
/// bundles) if any expert fails.
pub fn gather_bundle(
    scene: &SceneRecord,
    alpha: &AlphaVector,
    backend: &dyn ExpertBackend,
) -> Result<ExpertBundle, ExpertError> {
    alpha.check().map_err(ExpertError::AlphaNotNormalized)?;
    let mut texts = BTreeMap::new();
    for kind in ExpertKind::ALL {
        let seq = query_expert(kind, scene, &[], backend)?;
        texts.insert(kind, seq);
    }
    let aggregated = aggregate(&texts, alpha);
    Ok(ExpertBundle {
        scene_id: scene.scene_id.clone(),
        texts,
        alpha: alpha.clone(),
        aggregated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::HashedProjection;
    use crate::scene::Split;
    use alloc::string::ToString;
    use alloc::vec;

    pub(crate) fn canned_scene(texts: [&str; 4]) -> SceneRecord {
        let mut expert_texts = BTreeMap::new();
        for (kind, text) in ExpertKind::ALL.iter().zip(texts.iter()) {
            expert_texts.insert(*kind, text.to_string());
        }
        SceneRecord {
            scene_id: "s1".to_string(),
            identity_id: "id1".to_string(),
            split: Split::Train,
            features: vec![0.5, -0.25, 1.0, 0.0],
            expert_texts,
            reference_text: "a quiet crossing".to_string(),
            image_path: None,
        }
    }

    #[test]
    fn canned_backend_returns_stored_text() {
        let scene = canned_scene(["heavy congestion northbound", "stop sign", "two pedestrians", "light rain"]);
        let seq = query_expert(ExpertKind::Traffic, &scene, &[], &CannedBackend).unwrap();
        assert_eq!(crate::textkit::detokenize(&seq), "heavy congestion northbound");
    }

    #[test]
    fn missing_canned_text_fails() {
        let mut scene = canned_scene(["a", "b", "c", "d"]);
        scene.expert_texts.remove(&ExpertKind::Pedestrian);
        let err = query_expert(ExpertKind::Pedestrian, &scene, &[], &CannedBackend).unwrap_err();
        assert_eq!(err, ExpertError::MissingExpertText(ExpertKind::Pedestrian));
    }

    #[test]
    fn gather_fails_whole_on_missing_expert() {
        let mut scene = canned_scene(["a", "b", "c", "d"]);
        scene.expert_texts.remove(&ExpertKind::Signs);
        assert!(gather_bundle(&scene, &AlphaVector::uniform(), &CannedBackend).is_err());
    }

    #[test]
    fn aggregate_orders_by_descending_alpha() {
        let scene = canned_scene(["cars", "signs here", "people", "rain"]);
        let alpha = AlphaVector([0.7, 0.1, 0.1, 0.1]);
        let bundle = gather_bundle(&scene, &alpha, &CannedBackend).unwrap();
        assert_eq!(crate::textkit::detokenize(&bundle.aggregated), "cars signs here people rain");
    }

    #[test]
    fn aggregate_uniform_uses_declaration_order() {
        let scene = canned_scene(["t", "s", "p", "e"]);
        let bundle = gather_bundle(&scene, &AlphaVector::uniform(), &CannedBackend).unwrap();
        assert_eq!(crate::textkit::detokenize(&bundle.aggregated), "t s p e");
    }

    #[test]
    fn aggregate_length_is_sum_of_parts() {
        let scene = canned_scene(["one two", "three", "four five six", "seven"]);
        let bundle = gather_bundle(&scene, &AlphaVector([0.4, 0.3, 0.2, 0.1]), &CannedBackend).unwrap();
        let total: usize = bundle.texts.values().map(|t| t.len()).sum();
        assert_eq!(bundle.aggregated.len(), total);
    }

    #[test]
    fn gather_is_deterministic() {
        let scene = canned_scene(["cars move", "yield sign", "one walker", "clear sky"]);
        let alpha = AlphaVector([0.3, 0.3, 0.2, 0.2]);
        let a = gather_bundle(&scene, &alpha, &CannedBackend).unwrap();
        let b = gather_bundle(&scene, &alpha, &CannedBackend).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unnormalized_alpha_rejected() {
        let scene = canned_scene(["a", "b", "c", "d"]);
        let err = gather_bundle(&scene, &AlphaVector([0.5, 0.5, 0.5, 0.5]), &CannedBackend).unwrap_err();
        assert!(matches!(err, ExpertError::AlphaNotNormalized(_)));
    }

    fn store_with(prompts: &[(&str, &str)]) -> PromptStore {
        let provider = HashedProjection::default();
        PromptStore::build(
            prompts
                .iter()
                .map(|(id, text)| (ExpertKind::Traffic, id.to_string(), text.to_string())),
            &provider,
        )
        .unwrap()
    }

    #[test]
    fn select_prompts_saturates_at_store_size() {
        let store = store_with(&[("p1", "describe congestion"), ("p2", "count vehicles")]);
        let got = select_prompts(&[1.0, 2.0], &store, ExpertKind::Traffic, 10, 0, 64).unwrap();
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn select_prompts_breaks_ties_by_id() {
        // identical prompt text -> identical embeddings -> tie
        let store = store_with(&[("b", "same text"), ("a", "same text")]);
        let got = select_prompts(&[1.0, 2.0], &store, ExpertKind::Traffic, 2, 0, 64).unwrap();
        assert_eq!(got[0].id, "a");
        assert_eq!(got[1].id, "b");
    }

    #[test]
    fn select_prompts_matches_brute_force_ranking() {
        let store = store_with(&[
            ("p1", "vehicle density on the ramp"),
            ("p2", "pedestrian crossing volume"),
            ("p3", "northbound congestion report"),
            ("p4", "signal timing summary"),
            ("p5", "lane closure impact"),
        ]);
        let features = [0.3, -1.2, 0.8];
        let query = project_features(&features, 0, 64);
        // independent oracle: score every prompt, sort by (-sim, id)
        let mut oracle: Vec<(f64, &str)> = store
            .entries()
            .iter()
            .map(|e| (cosine(&query, &e.embedding).unwrap(), e.id.as_str()))
            .collect();
        oracle.sort_by(|(sa, ia), (sb, ib)| sb.partial_cmp(sa).unwrap().then(ia.cmp(ib)));
        let got = select_prompts(&features, &store, ExpertKind::Traffic, 2, 0, 64).unwrap();
        assert_eq!(got[0].id, oracle[0].1);
        assert_eq!(got[1].id, oracle[1].1);
    }

    #[test]
    fn select_prompts_prefix_stable_under_k_growth() {
        let store = store_with(&[
            ("p1", "one"),
            ("p2", "two words"),
            ("p3", "three little words"),
            ("p4", "yet another prompt"),
        ]);
        let features = [1.0, 0.5];
        let k2: Vec<_> = select_prompts(&features, &store, ExpertKind::Traffic, 2, 0, 64)
            .unwrap()
            .iter()
            .map(|e| e.id.clone())
            .collect();
        let k4: Vec<_> = select_prompts(&features, &store, ExpertKind::Traffic, 4, 0, 64)
            .unwrap()
            .iter()
            .map(|e| e.id.clone())
            .collect();
        assert_eq!(k2[..], k4[..2]);
    }

    #[test]
    fn empty_store_for_expert_fails() {
        let store = store_with(&[("p1", "traffic only")]);
        assert!(matches!(
            select_prompts(&[1.0], &store, ExpertKind::Signs, 1, 0, 64),
            Err(ExpertError::EmptyPromptStore(ExpertKind::Signs))
        ));
    }
}
