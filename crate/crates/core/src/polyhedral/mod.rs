//! Rational polyhedral cones and fans.

mod cone;
mod fan;
mod membership;

pub use cone::RationalCone;
pub use fan::{
    chamber_arrangement, minimal_supports, Chamber, ChamberArrangement, Fan, Hyperplane, Wall,
};
pub use membership::{cone_membership, Membership};
