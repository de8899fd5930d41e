#![no_main]
use fsdim::measures::MeasureSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(spec) = MeasureSpec::parse(text) {
            if let Ok(mu) = spec.build() {
                let _ = mu.cylinder_prob(&[0, 1]);
            }
        }
    }
});
