use std::path::PathBuf;
use std::sync::Arc;

use planlab::domains::{
    fig3_instance, fig3_plan, flipflop_instance, flipflop_plan, golden_cases, lights_out_conditional, Board, Variant,
};
use planlab::dsl::{parse_domain, parse_instance, parse_plan, serialize_domain, serialize_instance, serialize_plan};
use planlab::strips::verdict;
use planlab::Instance;

fn assets() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../assets/domains")
}

/// Instance file shared by each golden case.
fn instance_file(case: &str) -> &'static str {
    match case {
        c if c.starts_with("grippers-") => "grippers-fig9",
        c if c.starts_with("colors-pi1") => "colors-fig11-wf",
        _ => "colors-fig11-strips",
    }
}

fn expected_files() -> Vec<(String, String)> {
    let mut files = Vec::new();
    for v in Variant::ALL {
        files.push((format!("{v}.pdom"), serialize_domain(&v.domain())));
    }
    for c in golden_cases() {
        files.push((format!("{}.pinst", instance_file(c.name)), serialize_instance(&c.instance)));
        files.push((format!("{}.pplan", c.name), serialize_plan(&c.plan, &c.instance)));
    }
    let fig3 = fig3_instance();
    files.push(("grippers-fig3.pdom".into(), serialize_domain(fig3.domain())));
    files.push(("grippers-fig3.pinst".into(), serialize_instance(&fig3)));
    files.push(("grippers-fig3.pplan".into(), serialize_plan(&fig3_plan(&fig3), &fig3)));
    let ff = flipflop_instance();
    files.push(("flipflop.pdom".into(), serialize_domain(ff.domain())));
    files.push(("flipflop.pinst".into(), serialize_instance(&ff)));
    files.push(("flipflop-abbe.pplan".into(), serialize_plan(&flipflop_plan(&ff, "abbe").unwrap(), &ff)));
    let lo = lights_out_conditional(Board::new(5, 5));
    let lit: Vec<bool> = (0..25).map(|v| v % 7 == 0).collect();
    files.push(("lightsout-5x5.pinst".into(), serialize_instance(&lo.instance(&lit))));
    files.sort();
    files.dedup();
    files
}

#[test]
fn assets_match_constructors() {
    let dir = assets();
    let bless = std::env::var_os("PLANLAB_BLESS").is_some();
    if bless {
        std::fs::create_dir_all(&dir).unwrap();
    }
    let mut stale = Vec::new();
    for (name, text) in expected_files() {
        let path = dir.join(&name);
        if bless {
            std::fs::write(&path, &text).unwrap();
        } else if std::fs::read_to_string(&path).ok().as_deref() != Some(text.as_str()) {
            stale.push(name);
        }
    }
    assert!(stale.is_empty(), "stale or missing assets (rerun with PLANLAB_BLESS=1): {stale:?}");
}

fn load_instance(domain: &str, inst: &str) -> Instance {
    let d = parse_domain(&std::fs::read_to_string(assets().join(domain)).unwrap()).unwrap();
    parse_instance(&std::fs::read_to_string(assets().join(inst)).unwrap(), Arc::new(d)).unwrap()
}

#[test]
fn golden_records_parse_and_keep_their_verdicts() {
    for c in golden_cases() {
        let inst_file = format!("{}.pinst", instance_file(c.name));
        let inst = load_instance(&format!("{}.pdom", c.variant), &inst_file);
        let plan_text = std::fs::read_to_string(assets().join(format!("{}.pplan", c.name))).unwrap();
        let plan = parse_plan(&plan_text, &inst).unwrap();
        assert_eq!(verdict(&inst, &plan).unwrap().status(), c.expected, "{}", c.name);
        let sibling = c.variant.sibling();
        let d = parse_domain(&std::fs::read_to_string(assets().join(format!("{sibling}.pdom"))).unwrap()).unwrap();
        let other = inst.with_domain(Arc::new(d)).unwrap();
        assert_eq!(verdict(&other, &plan).unwrap().status(), c.expected_sibling, "{} under {sibling}", c.name);
    }
    let fig3 = load_instance("grippers-fig3.pdom", "grippers-fig3.pinst");
    let plan = parse_plan(&std::fs::read_to_string(assets().join("grippers-fig3.pplan")).unwrap(), &fig3).unwrap();
    assert!(verdict(&fig3, &plan).unwrap().is_valid());
    let ff = load_instance("flipflop.pdom", "flipflop.pinst");
    let plan = parse_plan(&std::fs::read_to_string(assets().join("flipflop-abbe.pplan")).unwrap(), &ff).unwrap();
    assert!(verdict(&ff, &plan).unwrap().is_valid());
    let lo = load_instance("lightsout-ce.pdom", "lightsout-5x5.pinst");
    assert_eq!(lo.objects().len(), 25);
}
