#![no_main]

use libfuzzer_sys::fuzz_target;
use rainbow_core::workbench::{emit_instance, parse_instance};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(inst) = parse_instance(text) {
        // accepted input must survive a round trip through the canonical form
        let canonical = emit_instance(&inst);
        let back = parse_instance(&canonical).expect("canonical text parses");
        assert_eq!(emit_instance(&back), canonical);
        let _ = inst.validate();
    }
});
