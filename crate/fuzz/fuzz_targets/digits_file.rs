#![no_main]
use fsdim::sequences::{format_digits, parse_digits};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(file) = parse_digits(text) {
            let again = parse_digits(&format_digits(file.base, &file.digits)).expect("formatted output parses");
            assert_eq!(again, file);
        }
    }
});
