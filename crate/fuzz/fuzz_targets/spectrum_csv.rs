#![no_main]
use fermat_forge::{GroupSpec, Spectrum};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let g = GroupSpec::parse("Z/8").unwrap();
    if let Ok(s) = Spectrum::read_csv(&g, data) {
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let again = Spectrum::read_csv(&g, buf.as_slice()).unwrap();
        assert_eq!(s.values(), again.values());
    }
});
