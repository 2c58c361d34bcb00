// SPDX-License-Identifier: Apache-2.0

//! RT-level design assembly: datapath plus FSM controller.

mod build;
mod types;

pub use build::{audit_design, build_controller, build_datapath, build_design, Datapath};
pub use types::{
    rtl_stats, select_width, ControlWord, ControllerFsm, DataRegister, Fu, Mux, OutputRegister,
    PortFeed, RtlDesign, RtlStats,
};
