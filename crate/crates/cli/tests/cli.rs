use fermat_cli::{run, Outcome};

fn fermat(args: &[&str]) -> Outcome {
    run(std::iter::once("fermat").chain(args.iter().copied()))
}

#[test]
fn nilpotent_matrix_is_reported() {
    let out = fermat(&[
        "--ring",
        "n=3;m=2,2,2;field=4",
        "lnd",
        "--matrix",
        "0,0,-1;0,0,-i;1,i,0",
    ]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.lines().any(|l| l == "LND=true"));
    assert!(out.stdout.contains("INDEX=3"));
}

#[test]
fn non_derivation_is_a_domain_error() {
    let out = fermat(&[
        "--ring",
        "n=3;m=3,3,3;field=1",
        "classify",
        "--matrix",
        "0,1,0;0,0,0;0,0,0",
    ]);
    assert_eq!(out.code, 3);
    assert!(out.stderr.contains("3*x1^2*x2"), "{}", out.stderr);
}

#[test]
fn reduce_prints_normal_form() {
    let out = fermat(&["reduce", "x3^3"]);
    assert_eq!((out.code, out.stdout.as_str()), (0, "-x1^2*x3 - x2^2*x3\n"));
    assert_eq!(fermat(&["reduce", "x1^2 + x2^2 + x3^2"]).stdout, "0\n");
}

#[test]
fn exit_codes_by_error_class() {
    assert_eq!(fermat(&["reduce"]).code, 1);
    assert_eq!(fermat(&["no-such-verb"]).code, 1);
    assert_eq!(fermat(&["verify", "--max-degree", "0"]).code, 1);
    assert_eq!(fermat(&["lnd", "--matrix", "1,0;0,1"]).code, 2);
    assert_eq!(fermat(&["reduce", "x1 +"]).code, 2);
    assert_eq!(fermat(&["--ring", "n=3;m=2,2", "reduce", "x1"]).code, 2);
    assert_eq!(
        fermat(&[
            "decompose",
            "--ring",
            "n=3;m=3,3,3",
            "--matrix",
            "1,0,0;0,1,0;0,0,1"
        ])
        .code,
        3
    );
    let help = fermat(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("Usage"));
}

#[test]
fn linspace_and_gens() {
    let out = fermat(&["linspace"]);
    assert!(out.stdout.ends_with("DIM=4\n"));
    let out = fermat(&["--ring", "n=3;m=3,4,5", "linspace"]);
    assert!(out.stdout.ends_with("DIM=1\n"));
    let out = fermat(&["--ring", "n=3;m=3,4,5", "gens"]);
    assert!(
        out.stdout
            .contains("d23: d(x1)=0; d(x2)=-5*x3^4; d(x3)=4*x2^3"),
        "{}",
        out.stdout
    );
}

#[test]
fn kernel_and_alpha_search() {
    let skew = "0,0,0;0,0,-1;0,1,0";
    let out = fermat(&["kernel", "--matrix", skew, "--max-degree", "2"]);
    assert!(out.stdout.contains("k=1 dim=1 basis=[x1]"));
    assert!(out.stdout.ends_with("NONTRIVIAL at k=1\n"));
    let out = fermat(&[
        "kernel",
        "--matrix",
        "1,0,0;0,1,-1;0,1,1",
        "--max-degree",
        "4",
    ]);
    assert!(out.stdout.ends_with("TRIVIAL_UP_TO=4\n"));
    let out = fermat(&["find-alpha", "--matrix", skew, "--candidates", "i,1/2"]);
    assert!(out.stdout.contains("rejected at k=1"));
    assert!(out.stdout.ends_with("ALPHA=1/2\n"));
}

#[test]
fn even_family_raises_the_conductor() {
    let out = fermat(&["family", "--even", "6", "--max-degree", "3"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.starts_with("FIELD=20\n"));
    assert!(out.stdout.contains("CUBE_ZERO=true") && out.stdout.ends_with("TRIVIAL_UP_TO=3\n"));
}

#[test]
fn apply_with_images_and_matrix_agree() {
    let a = fermat(&[
        "apply",
        "x1*x2 + x3",
        "--images",
        "d(x1)=-2*x2; d(x2)=2*x1",
        "--times",
        "3",
    ]);
    let b = fermat(&[
        "apply",
        "x1*x2 + x3",
        "--matrix",
        "0,-2,0;2,0,0;0,0,0",
        "--times",
        "3",
    ]);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
    let bad = fermat(&["apply", "x1", "--images", "d(x1)=x2"]);
    assert_eq!(bad.code, 3);
}

#[test]
fn darboux_verb() {
    let out = fermat(&[
        "--ring",
        "n=3;m=3,4,5",
        "darboux",
        "x1*x2^2",
        "--alpha",
        "2",
    ]);
    assert!(out.stdout.contains("EIGENVALUE=5/3") && out.stdout.contains("VERIFIED=true"));
    let out = fermat(&["--ring", "n=3;m=3,3,3", "darboux", "x1*x2 + x2*x3"]);
    assert!(out.stdout.contains("EIGENVALUE=2/3"));
    assert_eq!(fermat(&["--ring", "n=3;m=3,3,3", "darboux", "1"]).code, 3);
}

#[test]
fn verify_is_deterministic_and_passes() {
    let a = fermat(&["verify", "--max-degree", "3"]);
    let b = fermat(&["verify", "--max-degree", "3"]);
    assert_eq!(a, b);
    assert_eq!(a.code, 0, "{}", a.stdout);
    assert!(a.stdout.ends_with("SUMMARY pass=15 fail=0 skip=0\n"));
    let sub = fermat(&["verify", "--max-degree", "3", "--grid", "n=3;m=2,2,2"]);
    assert_eq!(sub.code, 0);
    assert!(sub.stdout.contains("SKIP") && !sub.stdout.contains("FAIL"));
}
