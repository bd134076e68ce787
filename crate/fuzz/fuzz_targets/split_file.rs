#![no_main]

use libfuzzer_sys::fuzz_target;
use vcframe::comm::parse_split;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(split) = parse_split(text) {
        assert_eq!(parse_split(&split.to_text()).unwrap(), split);
    }
});
