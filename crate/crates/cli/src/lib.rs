//! IO companion to `fsoqkd-core`: scenario config files, trace/frame/
//! calibration file formats, CSV/JSON reports and the parallel block runner.

pub mod calfile;
pub mod config;
pub mod framefile;
pub mod output;
pub mod runner;
pub mod tracefile;
