#![no_main]
use fermat_forge::harness::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(c) = ExperimentConfig::parse(s) {
        let _ = c.validate();
        let _ = c.hash();
    }
});
