//! Writing an instance to JSON, editing it by hand and loading it back.

use rmab::instances::{self, InstanceFile};

fn main() -> rmab::Result<()> {
    let dir = std::env::temp_dir().join("rmab_instance_file_example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("circulant3.json");

    let inst = instances::circulant(3, 1, 7);
    instances::save(&inst, &path)?;
    assert_eq!(instances::load(&path)?, inst);
    println!("round trip ok: {}", path.display());

    let mut file = InstanceFile::from_instance(&inst);
    file.arms[2].transitions[1][0] = vec![0.6, 0.6, 0.0, 0.0];
    let bad = dir.join("broken.json");
    std::fs::write(&bad, serde_json::to_string_pretty(&file)?)?;
    match instances::load(&bad) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => println!("unexpectedly accepted"),
    }
    Ok(())
}
