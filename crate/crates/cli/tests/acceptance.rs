//! Binary-level acceptance check: the `reproduce` report must come out
//! byte-identical across runs. Prints an `ACCEPTANCE <n> <name>: PASS` line
//! (visible with `--nocapture`).

use std::process::Command;

#[test]
fn criterion_9_reproduce_determinism() {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_cmstoch"))
            .args(["reproduce", "--all"])
            .output()
            .expect("spawn cmstoch")
    };
    let first = run();
    let second = run();
    assert!(first.status.success(), "first run failed: {:?}", first);
    assert!(second.status.success(), "second run failed: {:?}", second);
    assert!(!first.stdout.is_empty());
    assert_eq!(first.stdout, second.stdout, "reproduce stdout differed between runs");
    println!("ACCEPTANCE 9 reproduce-determinism: PASS");
}
