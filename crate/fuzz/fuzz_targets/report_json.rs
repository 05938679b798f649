#![no_main]
use libfuzzer_sys::fuzz_target;
use zbw_core::io::{parse_report_json, write_report_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(report) = parse_report_json(text) {
        assert_eq!(report.cells.len(), 4);
        let mut buf = Vec::new();
        write_report_json(&report, &mut buf).unwrap();
        let again = parse_report_json(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(again.cells.len(), 4);
        assert_eq!(again.approach, report.approach);
    }
});
