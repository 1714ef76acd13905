#![no_main]

use epf_core::raster::{decode_image, encode_png};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // Anything that decodes must survive a PNG round trip with its shape.
    if let Ok(img) = decode_image(data) {
        assert!(img.data().iter().all(|v| (0.0..=1.0).contains(v)));
        let png = encode_png(&img).expect("decoded images encode");
        let back = decode_image(&png).expect("own PNG decodes");
        assert_eq!(back.dims(), img.dims());
    }
});
