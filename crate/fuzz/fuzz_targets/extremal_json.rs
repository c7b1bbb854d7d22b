#![no_main]
use fermat_forge::counting::ExtremalSpec;
use fermat_forge::GroupSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let g = GroupSpec::parse("F_101").unwrap();
    let _ = ExtremalSpec::from_json(&g, s);
});
