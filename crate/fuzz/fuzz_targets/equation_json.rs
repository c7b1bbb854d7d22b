#![no_main]
use fermat_forge::counting::EquationSpec;
use fermat_forge::GroupSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let g = GroupSpec::parse("F_13").unwrap();
    let _ = EquationSpec::from_json(&g, s);
});
