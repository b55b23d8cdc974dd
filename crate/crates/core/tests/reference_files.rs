//! The shipped tables and manifests agree with the built-in variants.

use std::collections::BTreeSet;

use toroidal_core::parse::{parse_table, render_expr, Role};
use toroidal_core::roots::RootSystem;
use toroidal_core::table::{differing_entries, generator_table, GeneratorTable, Manifest, Variant};

const GRID: [(i64, i64); 3] = [(2, 1), (2, 2), (3, 1)];

fn read(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tables/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn same(a: &GeneratorTable, b: &GeneratorTable) -> bool {
    (0..a.nodes()).all(|i| Role::ALL.iter().all(|&r| a.entry(i, r) == b.entry(i, r)))
}

#[test]
fn table_files_load_to_the_builtin_tables() {
    for (m, n) in GRID {
        let sys = RootSystem::build(m, n).unwrap();
        for (name, v) in [("as-printed", Variant::AsPrinted), ("corrected", Variant::Corrected)] {
            let builtin = generator_table(&sys, &v).unwrap();
            let text = read(&format!("{name}-m{m}-n{n}.txt"));
            assert_eq!(builtin.render(), text);
            let file = parse_table(&text).unwrap();
            let loaded = GeneratorTable::from_file(&file, &sys).unwrap();
            assert!(same(&loaded, &builtin), "{name} {m},{n}");
            assert_eq!(loaded.literal, builtin.literal);
        }
    }
}

#[test]
fn manifests_list_the_differing_entries() {
    for (m, n) in GRID {
        let sys = RootSystem::build(m, n).unwrap();
        let printed = generator_table(&sys, &Variant::AsPrinted).unwrap();
        let corrected = generator_table(&sys, &Variant::Corrected).unwrap();
        let manifest: Manifest = serde_json::from_str(&read(&format!("manifest-m{m}-n{n}.json"))).unwrap();
        assert_eq!((manifest.m, manifest.n), (sys.m, sys.n));
        let listed: BTreeSet<(usize, String)> = manifest.entries.iter().map(|e| (e.index, e.role.clone())).collect();
        let differing: BTreeSet<(usize, String)> =
            differing_entries(&printed, &corrected).into_iter().map(|(i, r)| (i, r.name().to_string())).collect();
        assert_eq!(listed, differing);
        for e in &manifest.entries {
            let role = Role::ALL.into_iter().find(|r| r.name() == e.role).unwrap();
            assert_eq!(render_expr(printed.entry(e.index, role)), e.as_printed);
            assert_eq!(render_expr(corrected.entry(e.index, role)), e.corrected);
            assert!(e.forcing.i == e.index || e.forcing.j == e.index);
        }
    }
}
