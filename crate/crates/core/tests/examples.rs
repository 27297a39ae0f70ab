macro_rules! example {
    ($name:ident) => {
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));
        }
    };
}

example!(exponents_map);
example!(hankel_kernel);
example!(resolvent_point_source);
example!(nehari_projection);
example!(band_split_bounds);
example!(field_dump);

#[test]
fn examples_run() {
    exponents_map::main().unwrap();
    hankel_kernel::main().unwrap();
    resolvent_point_source::main().unwrap();
    nehari_projection::main().unwrap();
    band_split_bounds::main().unwrap();
    field_dump::main().unwrap();
}
