#![no_main]

use libfuzzer_sys::fuzz_target;
use rulebridge::catalog::{clean_and_split, parse_recipes, RecipeFormat, RecipeFormatConfig};

fuzz_target!(|data: &[u8]| {
    let cfg = RecipeFormatConfig::default();
    if let Ok(raw) = parse_recipes(data, RecipeFormat::JsonLines, &cfg, "fuzz") {
        if let Ok((catalog, _)) = clean_and_split(&raw) {
            catalog.validate().expect("cleaned catalog must validate");
        }
    }
});
