use irksn::datagen::gen_example1;
use irksn::io::{format_instance, parse_instance, read_instance, write_instance, write_metric_csv};
use irksn::metrics::{MetricRow, CSV_HEADER};

#[test]
fn instances_round_trip_through_text() {
    let (inst, truth) = gen_example1::<f64>(1).unwrap();
    let file = parse_instance::<f64>(&format_instance(&inst, Some(&truth), Some(1))).unwrap();
    assert_eq!(file.instance, inst);
    assert_eq!(file.truth.as_ref(), Some(&truth));
    assert_eq!(file.seed, Some(1));

    let file = parse_instance::<f64>(&format_instance(&inst, None, None)).unwrap();
    assert_eq!(file.truth, None);
    assert_eq!(file.seed, None);
}

#[test]
fn instances_round_trip_through_disk() {
    let dir = std::env::temp_dir().join(format!("irksn-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("inst.txt");
    let (inst, truth) = gen_example1::<f64>(4).unwrap();
    write_instance(&path, &inst, Some(&truth), Some(4)).unwrap();
    assert_eq!(read_instance::<f64>(&path).unwrap().instance, inst);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn malformed_text_reports_the_line() {
    let (inst, _) = gen_example1::<f64>(1).unwrap();
    let text = format_instance(&inst, None, None);
    let broken: String = text.lines().enumerate().map(|(i, l)| if i == 3 { "1 2 x\n".to_string() } else { format!("{l}\n") }).collect();
    let err = parse_instance::<f64>(&broken).unwrap_err().to_string();
    assert!(err.contains("line"), "{err}");
    assert!(parse_instance::<f64>("").is_err());
}

#[test]
fn metric_csv_has_one_line_per_row() {
    let dir = std::env::temp_dir().join(format!("irksn-csv-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let row = MetricRow {
        algorithm: "irksn".into(),
        params: vec![("k".into(), 3.0)],
        seed: 0,
        at: 5.0,
        f1: 1.0,
        precision: 1.0,
        recall: 1.0,
        err2: 0.0,
        sparsity: 3,
    };
    let path = dir.join("m.csv");
    write_metric_csv(&path, &[row.clone(), row]).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], CSV_HEADER);
    std::fs::remove_dir_all(dir).unwrap();
}
