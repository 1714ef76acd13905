#![no_main]

use epf_core::filters::RegistryFile;
use epf_core::Registry;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(file) = RegistryFile::parse(text) {
        // Building may reject entries but must not panic.
        let _ = Registry::builtin().extended(&file, None);
    }
});
