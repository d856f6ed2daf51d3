pub mod mapping;
pub mod routing;
pub mod scheduling;

pub use mapping::{InitialMapping, InitialMappingEnv};
pub use routing::{Routing, RoutingEnv};
pub use scheduling::{Scheduling, SchedulingEnv};
