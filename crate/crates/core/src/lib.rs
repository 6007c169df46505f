pub mod access;
pub mod field;
pub mod pauli;
pub mod oracle;
pub mod rscode;
pub mod scheme;
pub mod known;
pub mod qss;
pub mod unknown;
pub mod summon;
pub mod cli;
