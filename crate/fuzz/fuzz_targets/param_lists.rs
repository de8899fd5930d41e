#![no_main]
use fsdim::params::{parse_checkpoints, parse_int_list};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_int_list::<i64>(text);
        let _ = parse_int_list::<usize>(text);
        if let Ok(cps) = parse_checkpoints(text, 1 << 20) {
            assert!(cps.windows(2).all(|w| w[0] < w[1]));
            assert!(*cps.last().unwrap() <= 1 << 20);
        }
    }
});
