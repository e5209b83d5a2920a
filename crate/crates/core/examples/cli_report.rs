use obtuse::cli::{emit_report, parse_space_spec, run_command, Command, Format, RunConfig};

fn main() -> obtuse::Result<()> {
    let spec = parse_space_spec(r#"{"type":"hyperboloid","a":1.0}"#)?;
    let mut cfg = RunConfig::new(Command::Growth);
    cfg.convention_notes = false;
    let rows = run_command(&cfg, Some(&spec))?;
    print!("{}", String::from_utf8_lossy(&emit_report(&rows, Format::Json, false)));
    print!("{}", String::from_utf8_lossy(&emit_report(&rows, Format::Csv, false)));

    if let Err(e) = parse_space_spec(r#"{"type":"flat_cone","length":7.0}"#) {
        println!("rejected: {e}");
    }
    Ok(())
}
