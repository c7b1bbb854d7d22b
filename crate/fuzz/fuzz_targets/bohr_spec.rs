#![no_main]
use fermat_forge::bohr::BohrSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(b) = BohrSpec::from_json(s) {
        let again = BohrSpec::from_json(&b.to_json()).expect("re-encoded spec parses");
        assert_eq!(b.constraints(), again.constraints());
    }
});
