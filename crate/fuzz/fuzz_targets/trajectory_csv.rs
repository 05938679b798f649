#![no_main]
use libfuzzer_sys::fuzz_target;
use zbw_core::io::{read_trajectory_csv, write_trajectory_csv};

fuzz_target!(|data: &[u8]| {
    if let Ok(table) = read_trajectory_csv(data) {
        assert_eq!(table.times.len(), table.positions.len());
        assert!(table.times.windows(2).all(|w| w[0] < w[1]));
        let mut buf = Vec::new();
        write_trajectory_csv(&table, &mut buf).unwrap();
        assert_eq!(read_trajectory_csv(buf.as_slice()).unwrap(), table);
    }
});
