use dlct_cipher::imageio::{load_pgm, read_cipher_file, read_key_file, save_pgm, write_cipher_file, write_key_file};
use dlct_cipher::KeyBundle;
use num_complex::Complex64;

const PGM: &[u8] = include_bytes!("data/golden.pgm");
const DLC: &[u8] = include_bytes!("data/golden.dlc");
const KEY: &str = include_str!("data/golden.key");

#[test]
fn pgm_fixture() {
    let img = load_pgm(PGM).unwrap();
    assert_eq!((img.rows(), img.cols()), (4, 3));
    assert_eq!(img.pixels(), &[0, 17, 34, 51, 68, 85, 102, 119, 136, 153, 170, 255]);
    assert_eq!(img.get(3, 2), 255);
    assert_eq!(save_pgm(&img), PGM);
}

#[test]
fn cipher_fixture() {
    let c = read_cipher_file(DLC).unwrap();
    assert_eq!((c.rows(), c.cols()), (2, 3));
    let m = c.matrix();
    assert_eq!(m.get(0, 0), Complex64::new(1.5, -2.25));
    assert_eq!(m.get(0, 1), Complex64::new(0.0, 1e-300));
    assert!(m.get(0, 2).re.is_sign_negative());
    assert_eq!(m.get(0, 2).im, std::f64::consts::PI);
    assert_eq!(m.get(1, 0), Complex64::new(1e308, -7.0));
    assert_eq!(m.get(1, 2), Complex64::new(-1.0, 2.0));
    assert_eq!(write_cipher_file(&c), DLC);
}

#[test]
fn key_fixture() {
    let k = read_key_file(KEY).unwrap();
    assert_eq!(k, KeyBundle::reference(7051, 4675));
    assert_eq!(write_key_file(&k), KEY);
}

#[test]
fn key_fixture_matches_test_image_discards() {
    let img = load_pgm(include_bytes!("data/cameraman256.pgm")).unwrap();
    assert_eq!(read_key_file(KEY).unwrap(), KeyBundle::reference_for(&img));
}
