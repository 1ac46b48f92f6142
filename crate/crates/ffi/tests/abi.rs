use std::ffi::CStr;
use std::ptr;

use negbudget_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    let n = unsafe { nb_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn states_and_negativity() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(nb_state_fock(1, 4, &mut s), NbStatus::Ok);
        assert_eq!(nb_state_dim(s), 4);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(nb_state_amplitude(s, 1, &mut re, &mut im), NbStatus::Ok);
        assert_eq!((re, im), (1.0, 0.0));
        assert_eq!(nb_state_amplitude(s, 9, &mut re, &mut im), NbStatus::OutOfRange);
        let mut rho = ptr::null_mut();
        assert_eq!(nb_state_density(s, &mut rho), NbStatus::Ok);
        let mut n = 0.0;
        assert_eq!(nb_density_negativity(rho, 5.0, 201, &mut n), NbStatus::Ok);
        assert!((n - nb_single_photon_negativity()).abs() < 1e-4);
        nb_density_free(rho);
        nb_state_free(s);

        let mut mix = ptr::null_mut();
        assert_eq!(nb_density_excitation_mixture(0.75, 2, &mut mix), NbStatus::Ok);
        let (mut quad, mut exact) = (0.0, 0.0);
        assert_eq!(nb_density_negativity(mix, 5.0, 201, &mut quad), NbStatus::Ok);
        assert_eq!(nb_mixture_negativity_closed_form(0.75, &mut exact), NbStatus::Ok);
        assert!((quad - exact).abs() < 1e-4);
        nb_density_free(mix);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(nb_state_fock(5, 3, &mut s), NbStatus::OutOfRange);
        assert!(s.is_null());
        assert!(last_error().contains("out of range"));
        assert_eq!(nb_state_odd_cat(0.0, 0.0, 10, &mut s), NbStatus::DegenerateState);
        assert_eq!(nb_state_coherent(4.0, 0.0, 5, &mut s), NbStatus::Truncation);
        assert_eq!(nb_state_fock(1, 4, ptr::null_mut()), NbStatus::NullPointer);
        let mut x = 0.0;
        assert_eq!(nb_density_purity(ptr::null(), &mut x), NbStatus::NullPointer);
        assert_eq!(nb_mixture_negativity_closed_form(1.5, &mut x), NbStatus::InvalidArgument);
        assert_eq!(nb_concurrence_closed_form(-1.0, 0.1, &mut x), NbStatus::InvalidArgument);
        let mut needed = nb_last_error(ptr::null_mut(), 0);
        assert!(needed > 1);
        let mut tiny = [0 as std::ffi::c_char; 4];
        needed = nb_last_error(tiny.as_mut_ptr(), tiny.len());
        assert!(needed > 4);
        assert_eq!(tiny[3], 0);
        assert_eq!(nb_state_dim(ptr::null()), 0);
        nb_state_free(ptr::null_mut());
    }
}

#[test]
fn seed_evolution_and_concurrence() {
    unsafe {
        let mut seed = ptr::null_mut();
        assert_eq!(nb_state_squeezed_fock(0.35, 1, 20, &mut seed), NbStatus::Ok);
        let (mut a, mut b, mut leak) = (ptr::null_mut(), ptr::null_mut(), -1.0);
        let quarter = std::f64::consts::PI / 4.0;
        assert_eq!(nb_evolve_seed(seed, 1.0, quarter, &mut a, &mut b, &mut leak), NbStatus::Ok);
        assert!((0.0..1e-6).contains(&leak));
        let (mut pa, mut pb) = (0.0, 0.0);
        nb_density_purity(a, &mut pa);
        nb_density_purity(b, &mut pb);
        assert!((pa - pb).abs() < 1e-12);
        nb_density_free(a);
        nb_density_free(b);
        nb_state_free(seed);

        // cos|01⟩ − i sin|10⟩ at gt = π/8 reduces to diag(cos², sin²) on either qubit
        let (c, s) = ((std::f64::consts::PI / 8.0).cos(), (std::f64::consts::PI / 8.0).sin());
        let mut mixed = ptr::null_mut();
        assert_eq!(nb_density_excitation_mixture(s * s, 2, &mut mixed), NbStatus::Ok);
        let mut conc = 0.0;
        assert_eq!(nb_density_concurrence(mixed, &mut conc), NbStatus::Ok);
        assert!((conc - 2.0 * s * c).abs() < 1e-12);
        let mut law = 0.0;
        nb_concurrence_closed_form(1.0, std::f64::consts::PI / 8.0, &mut law);
        assert!((conc - law).abs() < 1e-12);
        nb_density_free(mixed);
    }
}

#[test]
fn reduced_state_and_discrete() {
    unsafe {
        let mut qutrit = ptr::null_mut();
        assert_eq!(nb_state_fock(1, 3, &mut qutrit), NbStatus::Ok);
        let keep = [0usize];
        let mut rho = ptr::null_mut();
        assert_eq!(nb_state_reduced(qutrit, keep.as_ptr(), 1, &mut rho), NbStatus::Ok);
        let mut sn = 1.0;
        assert_eq!(nb_density_discrete_sum_negativity(rho, &mut sn), NbStatus::Ok);
        assert!(sn.abs() < 1e-12);
        nb_density_free(rho);
        nb_state_free(qutrit);

        let mut qubit = ptr::null_mut();
        vacuum_qubit(&mut qubit);
        assert_eq!(nb_density_discrete_sum_negativity(qubit, &mut sn), NbStatus::InvalidArgument);
        nb_density_free(qubit);
    }
}

unsafe fn vacuum_qubit(out: *mut *mut NbDensity) {
    let mut s = ptr::null_mut();
    assert_eq!(nb_state_fock(0, 2, &mut s), NbStatus::Ok);
    assert_eq!(nb_state_density(s, out), NbStatus::Ok);
    nb_state_free(s);
}

#[test]
fn trajectories() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(nb_two_body_trajectory(1.0, 5.0, 101, 5, &mut t), NbStatus::Ok);
        assert_eq!(nb_trajectory_len(t), 5);
        assert_eq!(nb_trajectory_sites(t), 2);
        let budget = nb_trajectory_budget(t);
        let (mut time, mut total) = (0.0, 0.0);
        assert_eq!(nb_trajectory_sample(t, 1, &mut time, &mut total), NbStatus::Ok);
        assert!((time - std::f64::consts::PI / 4.0).abs() < 1e-12);
        assert!(total.abs() < 1e-6);
        let mut nb = 0.0;
        assert_eq!(nb_trajectory_site_negativity(t, 0, 1, &mut nb), NbStatus::Ok);
        assert!((nb - budget).abs() < 1e-12);
        assert_eq!(nb_trajectory_site_negativity(t, 0, 2, &mut nb), NbStatus::OutOfRange);
        assert_eq!(nb_trajectory_sample(t, 5, &mut time, &mut total), NbStatus::OutOfRange);
        nb_trajectory_free(t);

        let mut chain = ptr::null_mut();
        assert_eq!(nb_chain_trajectory(4, 1.0, 5.0, 101, 9, &mut chain), NbStatus::Ok);
        assert_eq!(nb_trajectory_sites(chain), 4);
        let mut last = 0.0;
        assert_eq!(nb_trajectory_site_negativity(chain, 8, 3, &mut last), NbStatus::Ok);
        assert!((last - nb_single_photon_negativity()).abs() < 1e-9);
        nb_trajectory_free(chain);
        assert_eq!(nb_chain_trajectory(1, 1.0, 5.0, 101, 9, &mut chain), NbStatus::InvalidArgument);
    }
}

#[test]
fn header_is_generated_and_compiles() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/negbudget.h");
    let text = std::fs::read_to_string(&header).expect("header written by build script");
    for name in ["nb_state_fock", "nb_evolve_seed", "nb_trajectory_free", "NB_STATUS_OK", "typedef struct NbState NbState"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(status) = std::process::Command::new("cc").args(["-fsyntax-only", "-x", "c"]).arg(&header).status() else {
        return;
    };
    assert!(status.success());
}
