#![no_main]
use fermat_forge::bohr::WrapperSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(w) = WrapperSpec::from_json(s) {
        let again = WrapperSpec::from_json(&w.to_json()).expect("re-encoded wrapper parses");
        assert_eq!(w.cells(), again.cells());
        assert_eq!(w.shift(), again.shift());
    }
});
