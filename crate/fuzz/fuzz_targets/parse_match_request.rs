#![no_main]

use epf_service::MatchRequest;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(req) = serde_json::from_slice::<MatchRequest>(data) {
        let text = serde_json::to_string(&req).unwrap();
        let again: MatchRequest = serde_json::from_str(&text).unwrap();
        assert_eq!(again.session_id, req.session_id);
        assert_eq!(again.filter_id, req.filter_id);
        assert_eq!(again.level, req.level);
    }
});
