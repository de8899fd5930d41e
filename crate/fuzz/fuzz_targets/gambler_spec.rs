#![no_main]
use fsdim::gambler::Gambler;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(g) = Gambler::from_json(text) {
            let _ = g.log2_capital(0.5, &[0, 1, 1, 0]);
        }
    }
});
