#![no_main]
use fermat_forge::charsums::PolySpec;
use fermat_forge::GroupSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let g = GroupSpec::parse("F_3^2").unwrap();
    for line in s.lines() {
        let _ = PolySpec::parse(&g, line);
    }
});
