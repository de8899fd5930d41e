#![no_main]
use fsdim::sequences::DilutionPattern;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(p) = DilutionPattern::parse(text) {
            let again = DilutionPattern::parse(&p.to_string()).expect("display output parses");
            assert_eq!(again, p);
            let d = p.dimension();
            assert!((0.0..=1.0).contains(&d));
        }
    }
});
