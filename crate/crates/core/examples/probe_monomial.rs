use resurgia_core::bernoulli::BetaChoice;
use resurgia_core::nir::{nir_slices, needed_f_length};
use resurgia_core::rat::{rat_to_string, Rat};
use resurgia_core::sp::DrivingFunction;
use resurgia_core::unipoly::UniPoly;
use resurgia_core::rat::rat_int;

fn main() {
    let one_minus_x = DrivingFunction::rational_f(
        UniPoly::new("x", vec![rat_int(1), rat_int(-1)]),
        UniPoly::one("x"),
    )
    .unwrap();
    let n_slices = 25;
    let f = one_minus_x.f_coefficients(needed_f_length(1, n_slices)).unwrap();
    let out = nir_slices::<Rat>(&f, &BetaChoice::Trivial, n_slices, &|r| Some(r.clone())).unwrap();
    for cs in &out.classes {
        println!("class {} base {:?}:", cs.class, cs.base_exponent);
        for (l, c) in cs.h.iter().enumerate().take(10) {
            println!("  l={l}: {}", rat_to_string(c));
        }
    }
}
