#![no_main]

use libfuzzer_sys::fuzz_target;
use rainbow_core::cascade::movelog::MoveLog;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(log) = MoveLog::parse(text) {
        let back = MoveLog::parse(&log.to_string()).expect("emitted log parses");
        assert_eq!(back, log);
    }
});
