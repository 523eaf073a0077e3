//! Reads and writes the libsvm and CSV formats.

use samplescreen::io::{parse_csv, parse_libsvm, to_csv, to_libsvm};
use samplescreen::Task;

fn main() -> samplescreen::Result<()> {
    let text = "# label idx:val ...\n+1 1:0.5 3:2\n-1 2:1.25\n+1 1:-1 2:0.5 3:0.25\n";
    let ds = parse_libsvm(text, Task::Classification, None)?;
    println!("n = {}, p = {}, sparse = {}", ds.n(), ds.p(), ds.is_sparse());
    print!("{}", to_libsvm(&ds));

    let csv = to_csv(&ds);
    print!("{csv}");
    let back = parse_csv(&csv, Task::Classification)?;
    assert_eq!(back.to_dense_rows(), ds.to_dense_rows());

    match parse_libsvm("+1 2:1 1:3\n", Task::Classification, None) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
