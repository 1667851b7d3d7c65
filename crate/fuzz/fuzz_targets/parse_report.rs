#![no_main]

use libfuzzer_sys::fuzz_target;
use rainbow_core::workbench::parse_report;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(report) = parse_report(text) {
        let back = parse_report(&report.to_json()).expect("emitted report parses");
        assert_eq!(back, report);
    }
});
