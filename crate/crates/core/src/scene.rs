//! Scene records: the structured observations the pipeline consumes.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::experts::ExpertKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Eval,
    Member,
    NonMember,
}

impl Split {
    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Eval => "eval",
            Split::Member => "member",
            Split::NonMember => "nonmember",
        }
    }

    pub fn parse(s: &str) -> Option<Split> {
        match s {
            "train" => Some(Split::Train),
            "eval" => Some(Split::Eval),
            "member" => Some(Split::Member),
            "nonmember" => Some(Split::NonMember),
            _ => None,
        }
    }
}

/// One observation: the image surrogate (feature vector), canned per-expert
/// texts, and the reference description.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneRecord {
    pub scene_id: String,
    pub identity_id: String,
    pub split: Split,
    pub features: Vec<f64>,
    pub expert_texts: BTreeMap<ExpertKind, String>,
    pub reference_text: String,
    pub image_path: Option<String>,
}
