use holant_core::io::{
    basis_digest, instance_digest, load_basis, load_instance, load_instance_document, save_basis, save_instance,
    save_instance_document, InstanceDocument, IoError,
};
use holant_core::{random_basis, random_instance, InstanceSpec};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn save_load_is_digest_stable(seed in any::<u64>(), k in 1usize..4, n in 1usize..6, p in 1usize..6, r in 1usize..6) {
        prop_assume!(p <= n && r <= n);
        let spec = InstanceSpec { alphabet_size: k, edge_count: n, generator_parts: p, recognizer_parts: r, magnitude: 3.0 };
        let inst = random_instance(seed, spec).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.json");
        save_instance(&inst, &path).unwrap();
        let back = load_instance(&path).unwrap();
        prop_assert_eq!(instance_digest(&back), instance_digest(&inst));
        prop_assert_eq!(&back, &inst);

        // writing the loaded instance again gives the same bytes
        let again = dir.path().join("again.json");
        save_instance(&back, &again).unwrap();
        prop_assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
    }

    #[test]
    fn basis_roundtrip(seed in any::<u64>(), k in 1usize..5) {
        let basis = random_basis(seed, k, 1e3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("basis.json");
        save_basis(&basis, &path).unwrap();
        let back = load_basis(&path).unwrap();
        prop_assert_eq!(basis_digest(&back), basis_digest(&basis));
        prop_assert_eq!(back.matrix(), basis.matrix());
    }
}

#[test]
fn document_metadata_survives() {
    let inst = random_instance(3, InstanceSpec {
        alphabet_size: 2,
        edge_count: 2,
        generator_parts: 1,
        recognizer_parts: 2,
        magnitude: 1.0,
    })
    .unwrap();
    let mut doc = InstanceDocument::from_instance(&inst);
    doc.seed = Some(3);
    doc.basis = Some("b.json".into());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("i.json");
    save_instance_document(&doc, &path).unwrap();
    assert_eq!(load_instance_document(&path).unwrap(), doc);
}

#[test]
fn missing_file_is_io_error() {
    let err = load_instance(std::path::Path::new("/nonexistent/instance.json")).unwrap_err();
    assert!(matches!(err, IoError::Io { .. }));
}
