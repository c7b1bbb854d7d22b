#![no_main]
use fermat_forge::GroupSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(g) = GroupSpec::parse(s) {
        let again = GroupSpec::from_json(&g.to_json()).unwrap();
        assert_eq!(g, again);
    }
    let _ = GroupSpec::from_json(s);
});
