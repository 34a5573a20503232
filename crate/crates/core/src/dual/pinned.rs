// Generated by `contact-assoc verify duality --emit-constants`. Do not edit by hand.
use super::{ArcChoice, Convention, Crossing, Reading, Verdict};

pub const PINNED_CONVENTION: Convention = Convention {
    crossing: Crossing::LeftToRight,
    reading: Reading::Clockwise,
    arc: ArcChoice::SourceArc,
};
pub const PINNED_VERDICT: Verdict = Verdict::Complemented;
