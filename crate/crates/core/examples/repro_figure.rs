//! Regenerates one figure's data into a directory, as `levsim repro` does.
//!
//!     cargo run --release --example repro_figure -- fig4 out/

fn main() {
    let mut args = std::env::args().skip(1);
    let fig = args.next().unwrap_or_else(|| "fig2".into());
    let dir = args.next().unwrap_or_else(|| std::env::temp_dir().join("levsim-repro").display().to_string());
    std::fs::create_dir_all(&dir).expect("create output dir");
    let code = levsim::cli::run(["levsim", "repro", &fig, "--out-dir", &dir]);
    if code == 0 {
        println!("wrote {fig} into {dir}");
    }
    std::process::exit(code);
}
