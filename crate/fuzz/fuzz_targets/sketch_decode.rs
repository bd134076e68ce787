#![no_main]

use libfuzzer_sys::fuzz_target;
use vcframe::sketch::LinearSketch;

fuzz_target!(|data: &[u8]| {
    if let Ok(sk) = LinearSketch::from_bytes(data) {
        assert_eq!(sk.to_bytes(), data);
        let _ = sk.recover();
    }
});
