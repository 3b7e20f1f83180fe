#include "fluxladder/lattice.hpp"

#include <cmath>
#include <numeric>

#include "fluxladder/errors.hpp"

namespace fluxladder {

double LatticeSpec::mean_rung() const {
    if (j_rung.empty()) return 0.0;
    return std::accumulate(j_rung.begin(), j_rung.end(), 0.0) / static_cast<double>(j_rung.size());
}

void LatticeSpec::validate() const {
    if (n_sites < 2) throw_invalid("lattice: n_sites must be >= 2");
    if (n_max < 1) throw_invalid("lattice: n_max must be >= 1");
    const auto n = static_cast<std::size_t>(n_sites);
    if (omega.size() != n) throw_invalid("lattice: omega must have n_sites entries");
    if (u.size() != n) throw_invalid("lattice: u must have n_sites entries");
    if (j_rung.size() != n - 1) throw_invalid("lattice: j_rung must have n_sites-1 entries");
    if (j_leg.size() != n - 2) throw_invalid("lattice: j_leg must have n_sites-2 entries");
    for (double j : j_rung)
        if (!(j > 0.0)) throw_invalid("lattice: rung couplings must be > 0 (signs live in flux)");
    for (double j : j_leg)
        if (!(j > 0.0)) throw_invalid("lattice: leg couplings must be > 0 (signs live in flux)");
    for (double w : omega)
        if (!std::isfinite(w)) throw_invalid("lattice: omega must be finite");
    for (double v : u)
        if (!std::isfinite(v)) throw_invalid("lattice: u must be finite");
    if (!std::isfinite(flux)) throw_invalid("lattice: flux must be finite");
}

double leg_phase_for_plaquette_flux(double plaquette_flux) {
    double r = std::fmod(plaquette_flux + M_PI, 2.0 * M_PI);
    if (r < 0.0) r += 2.0 * M_PI;
    return r;
}

double plaquette_flux_for_leg_phase(double leg_phase) {
    return leg_phase_for_plaquette_flux(leg_phase);  // shifting by pi is an involution mod 2pi
}

LatticeSpec uniform_spec(int n_sites, double j, double leg_ratio, int n_max) {
    if (n_sites < 2) throw_invalid("uniform_spec: n_sites must be >= 2");
    if (!(j > 0.0)) throw_invalid("uniform_spec: j must be > 0");
    if (leg_ratio == 0.0) throw_invalid("uniform_spec: leg_ratio must be nonzero");
    LatticeSpec spec;
    spec.n_sites = n_sites;
    spec.omega.assign(static_cast<std::size_t>(n_sites), 0.0);
    spec.u.assign(static_cast<std::size_t>(n_sites), 0.0);
    spec.j_rung.assign(static_cast<std::size_t>(n_sites - 1), j);
    spec.j_leg.assign(static_cast<std::size_t>(n_sites - 2), std::abs(leg_ratio) * j);
    spec.flux = leg_phase_for_plaquette_flux(leg_ratio < 0.0 ? M_PI : 0.0);
    spec.n_max = n_max;
    spec.validate();
    return spec;
}

}  // namespace fluxladder
