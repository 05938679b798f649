#![no_main]
use libfuzzer_sys::fuzz_target;
use zbw_core::io::{read_classical_csv, write_classical_csv};

fuzz_target!(|data: &[u8]| {
    if let Ok(samples) = read_classical_csv(data) {
        assert!(samples.windows(2).all(|w| w[0].tau < w[1].tau));
        let mut buf = Vec::new();
        write_classical_csv(&samples, &mut buf).unwrap();
        assert_eq!(read_classical_csv(buf.as_slice()).unwrap(), samples);
    }
});
