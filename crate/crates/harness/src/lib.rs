pub mod generate;
pub mod instance;
pub mod learn;
pub mod run;
pub mod sweep;
