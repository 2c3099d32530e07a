#![no_main]
use libfuzzer_sys::fuzz_target;
use specmode::{instance_probability, HardnessQuery, InstanceVector};

fuzz_target!(|data: &[u8]| {
    if let Ok(query) = serde_json::from_slice::<HardnessQuery>(data) {
        // A query that survived validation supports the cheap operations
        // without panicking, including out-of-range labels.
        let b = query.basis_size() as u32;
        let labels: Vec<u32> = (0..query.n() as u32)
            .map(|j| (j * 7 + b) % (b + 2))
            .collect();
        let v = InstanceVector::new(labels).unwrap();
        let p = instance_probability(&query, &v).unwrap();
        assert!(p >= 0.0 && p.is_finite());
        let _ = v.max_repetition();
    }
});
