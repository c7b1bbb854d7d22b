#![no_main]
use fermat_forge::sets::SetGenerator;
use fermat_forge::GroupSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(gen) = SetGenerator::parse(s) {
        for g in ["F_97", "Z/105"] {
            let _ = gen.generate(&GroupSpec::parse(g).unwrap());
        }
    }
});
