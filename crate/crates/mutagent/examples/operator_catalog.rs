//! Prints the full mutation-operator catalog.
//!
//! ```text
//! cargo run -p mutagent --example operator_catalog
//! ```

use mutagent::operators::operator_catalog;

fn main() {
    let catalog = operator_catalog();
    println!("{} operators\n", catalog.len());
    println!("{:<30} {:<10} {:<16} description", "id", "category", "targets");
    for spec in catalog {
        println!(
            "{:<30} {:<10} {:<16} {}",
            spec.id.as_str(),
            spec.category.heading(),
            spec.target_category,
            spec.description
        );
    }
}
