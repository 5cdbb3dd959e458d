pub mod asymptotics;
pub mod criteria;
pub mod error;
pub mod gamma;
pub mod lambertw;
pub mod moments;
pub mod quadrature;
pub mod signed_log;
