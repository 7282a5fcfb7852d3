#[path = "../examples/exact_matching.rs"]
mod exact_matching;
#[path = "../examples/dual_simulation.rs"]
mod dual_simulation;
#[path = "../examples/hgin_embeddings.rs"]
mod hgin_embeddings;
#[path = "../examples/order_embedding_limits.rs"]
mod order_embedding_limits;
#[path = "../examples/synthetic_dataset.rs"]
mod synthetic_dataset;
#[path = "../examples/accelerated_matching.rs"]
mod accelerated_matching;

#[test]
fn exact_matching_example_runs() {
    exact_matching::run().expect("exact_matching example should run");
}

#[test]
fn dual_simulation_example_runs() {
    dual_simulation::run().expect("dual_simulation example should run");
}

#[test]
fn hgin_embeddings_example_runs() {
    hgin_embeddings::run().expect("hgin_embeddings example should run");
}

#[test]
fn order_embedding_limits_example_runs() {
    order_embedding_limits::run().expect("order_embedding_limits example should run");
}

#[test]
fn synthetic_dataset_example_runs() {
    synthetic_dataset::run().expect("synthetic_dataset example should run");
}

#[test]
fn accelerated_matching_example_runs() {
    accelerated_matching::run().expect("accelerated_matching example should run");
}
