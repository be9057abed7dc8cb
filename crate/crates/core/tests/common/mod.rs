#![allow(dead_code)]

pub mod fd;
pub mod rf_identity;
pub mod ssim_ref;
