//! Figure presets. Each curve is a config snippet applied on top of the
//! defaults; command-line overrides then apply to every curve.
//!
//! Continuous axes use 61-point grids; integer axes (M, n) step by one.

pub struct Preset {
    pub name: &'static str,
    pub about: &'static str,
    pub curves: &'static [(&'static str, &'static str)],
}

macro_rules! pj {
    ($($s:expr),*) => { concat!("axis = P_J\ngrid = lin(-10, 60, 61)\n", $($s),*) };
}

macro_rules! us {
    ($($s:expr),*) => {
        concat!("P_T = 50\nP_J = off\nR_s = 1\nrho_U = 0.5\nrho_E = 0.1\neps = 1e-5\nn = 1\n", $($s),*)
    };
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig2",
        about: "TAS vs TAB (eps = 0), non-colluding, SOP vs P_J for rho in {0.1, 0.01}",
        curves: &[
            ("tas-rho0.1", pj!("scheme = tas\nrho = 0.1\neps = 0\n")),
            ("tas-rho0.01", pj!("scheme = tas\nrho = 0.01\neps = 0\n")),
            ("tab-rho0.1", pj!("scheme = tab\nrho = 0.1\neps = 0\n")),
            ("tab-rho0.01", pj!("scheme = tab\nrho = 0.01\neps = 0\n")),
        ],
    },
    Preset {
        name: "fig3",
        about: "TAB (eps = 0), analytic vs simulation, rho_E = 10, R = 5",
        curves: &[
            ("tab-tr", pj!("scheme = tab\neps = 0\nrho_E = 10\nmethod = analytic\n")),
            ("tab-mc", pj!("scheme = tab\neps = 0\nrho_E = 10\nmethod = mc\n")),
        ],
    },
    Preset {
        name: "fig4",
        about: "TAB with artificial noise, SOP vs P_J for several eps, analytic and simulation",
        curves: &[
            ("tab-eps0.01-tr", pj!("scheme = tab\neps = 0.01\nmethod = analytic\n")),
            ("tab-eps0.01-mc", pj!("scheme = tab\neps = 0.01\nmethod = mc\n")),
            ("tab-eps0.1-tr", pj!("scheme = tab\neps = 0.1\nmethod = analytic\n")),
            ("tab-eps0.1-mc", pj!("scheme = tab\neps = 0.1\nmethod = mc\n")),
            ("tab-eps0.3-tr", pj!("scheme = tab\neps = 0.3\nmethod = analytic\n")),
            ("tab-eps0.3-mc", pj!("scheme = tab\neps = 0.3\nmethod = mc\n")),
        ],
    },
    Preset {
        name: "fig5",
        about: "nearest user: TAB-US and TAS-US vs number of antennas",
        curves: &[
            ("tab-us-eps1e-5", us!("scheme = tab-us\naxis = M\ngrid = 2,3,4,5,6,7,8\nmethod = analytic\n")),
            ("tab-us-eps0", us!("scheme = tab-us\neps = 0\naxis = M\ngrid = 2,3,4,5,6,7,8\nmethod = analytic\n")),
            ("tab-us-eps1e-5-mc", us!("scheme = tab-us\naxis = M\ngrid = 2,3,4,5,6,7,8\nmethod = mc\n")),
            ("tas-us-mc", us!("scheme = tas-us\naxis = M\ngrid = 2,3,4,5,6,7,8\nmethod = mc\n")),
        ],
    },
    Preset {
        name: "fig6",
        about: "TAB-US and TAS-US vs eavesdropper density for ordered users",
        curves: &[
            ("tab-us-n1", us!("scheme = tab-us\naxis = rho_E\ngrid = log(0.01, 1, 61)\nmethod = analytic\n")),
            ("tab-us-n2", us!("scheme = tab-us\nn = 2\naxis = rho_E\ngrid = log(0.01, 1, 61)\nmethod = analytic\n")),
            ("tab-us-n3", us!("scheme = tab-us\nn = 3\naxis = rho_E\ngrid = log(0.01, 1, 61)\nmethod = analytic\n")),
            ("tas-us-n1-mc", us!("scheme = tas-us\naxis = rho_E\ngrid = log(0.01, 1, 61)\nmethod = mc\n")),
        ],
    },
    Preset {
        name: "fig7",
        about: "TAB-US and TAS-US vs user density, nearest user",
        curves: &[
            ("tab-us", us!("scheme = tab-us\naxis = rho_U\ngrid = log(0.1, 10, 61)\nmethod = analytic\n")),
            ("tas-us-mc", us!("scheme = tas-us\naxis = rho_U\ngrid = log(0.1, 10, 61)\nmethod = mc\n")),
        ],
    },
    Preset {
        name: "fig8",
        about: "TAB-US and TAS-US vs user order n",
        curves: &[
            ("tab-us", us!("scheme = tab-us\naxis = n\ngrid = 1,2,3,4,5,6,7,8,9,10\nmethod = analytic\n")),
            ("tas-us-mc", us!("scheme = tas-us\naxis = n\ngrid = 1,2,3,4,5,6,7,8,9,10\nmethod = mc\n")),
        ],
    },
    Preset {
        name: "fig9",
        about: "colluding eavesdroppers in [0.1, 5]: TAS and TAB (eps = 0) vs P_J for rho in {0.1, 0.01}",
        curves: &[
            ("tas-rho0.1", pj!("colluding = true\nR_g = 0.1\nscheme = tas\nrho = 0.1\neps = 0\n")),
            ("tas-rho0.01", pj!("colluding = true\nR_g = 0.1\nscheme = tas\nrho = 0.01\neps = 0\n")),
            ("tab-rho0.1", pj!("colluding = true\nR_g = 0.1\nscheme = tab\nrho = 0.1\neps = 0\n")),
            ("tab-rho0.01", pj!("colluding = true\nR_g = 0.1\nscheme = tab\nrho = 0.01\neps = 0\n")),
        ],
    },
    Preset {
        name: "fig10",
        about: "colluding vs non-colluding eavesdroppers in [0.1, 5], TAS and TAB (eps = 0)",
        curves: &[
            ("tas-colluding", pj!("colluding = true\nR_g = 0.1\nscheme = tas\neps = 0\n")),
            ("tab-colluding", pj!("colluding = true\nR_g = 0.1\nscheme = tab\neps = 0\n")),
            ("tas-noncolluding", pj!("R_g = 0.1\nscheme = tas\neps = 0\n")),
            ("tab-noncolluding", pj!("R_g = 0.1\nscheme = tab\neps = 0\n")),
        ],
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
