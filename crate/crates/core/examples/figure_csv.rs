//! Drives the command-line front end in-process to write a figure preset
//! as CSV, then prints it.

fn main() {
    let path = std::env::temp_dir().join("harq_outage_figure5.csv");
    let status = harq_outage::cli::run([
        "harq-outage",
        "figure",
        "5",
        "--snr",
        "0:40:5",
        "--out",
        path.to_str().expect("utf-8 temp path"),
    ]);
    assert_eq!(status, 0, "figure run failed");
    print!("{}", std::fs::read_to_string(&path).expect("figure output"));
}
