//! Regenerate the fixture files under `fixtures/` from the built-in
//! example data. Run with `cargo run -p arborkt --example gen_fixtures`.

use std::path::Path;

use arborkt::fixtures;
use arborkt::ktcore::PsiTable;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir).unwrap();
    let write = |name: &str, content: String| {
        let path = dir.join(name);
        std::fs::write(&path, content).unwrap();
        println!("wrote {}", path.display());
    };

    let quadratic = fixtures::quadratic_resolution().unwrap();
    write("quadratic.res.json", quadratic.to_json_string());
    let table = PsiTable::from_json(&quadratic, &fixtures::quadratic_psi_reference()).unwrap();
    write("quadratic.psi.json", table.to_json_string(&quadratic));

    let cube = fixtures::cube_corner_resolution().unwrap();
    write("cube_corner.res.json", cube.to_json_string());
    let table = PsiTable::from_json(&cube, &fixtures::cube_corner_psi_reference()).unwrap();
    write("cube_corner.psi.json", table.to_json_string(&cube));

    let katthan = fixtures::katthan_resolution().unwrap();
    write("katthan.res.json", katthan.to_json_string());
    let completed = fixtures::katthan_psi_completed(6).unwrap();
    write("katthan.psi.json", completed.to_json_string(&katthan));
}
