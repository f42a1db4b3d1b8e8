#include "skdv/io.hpp"

#include <ostream>

namespace skdv {

namespace {

nlohmann::json complex_pair(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

Complex pair_value(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected [re, im] pair");
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

nlohmann::json to_json(const SpectralField& u) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (int n = 0; n <= u.n_max(); ++n) coeffs.push_back(complex_pair(u.half()(n)));
    return {{"n_max", u.n_max()}, {"mean_zero", u.mean_zero()}, {"coeffs", coeffs}};
}

SpectralField spectral_field_from_json(const nlohmann::json& j) {
    const TorusGrid grid(j.at("n_max").get<int>());
    const auto& coeffs = j.at("coeffs");
    if (!coeffs.is_array() || static_cast<int>(coeffs.size()) != grid.n_max() + 1)
        throw std::invalid_argument("coeffs: expected n_max + 1 entries");
    VectorXc half(grid.n_max() + 1);
    for (int n = 0; n <= grid.n_max(); ++n) half(n) = pair_value(coeffs.at(n));
    const bool mean_zero = j.value("mean_zero", false);
    if (mean_zero && half(0) != Complex(0)) throw std::invalid_argument("mean_zero field with nonzero mean");
    return SpectralField(grid, std::move(half), mean_zero);
}

nlohmann::json to_json(const SpaceTimeField& u) {
    nlohmann::json values = nlohmann::json::array();
    for (int k = 0; k < u.samples(); ++k) {
        nlohmann::json column = nlohmann::json::array();
        for (int n = -u.n_max(); n <= u.n_max(); ++n) column.push_back(complex_pair(u(n, k)));
        values.push_back(std::move(column));
    }
    return {{"n_max", u.n_max()}, {"t0", u.t0()}, {"dt", u.dt()}, {"samples", u.samples()}, {"values", values}};
}

SpaceTimeField space_time_field_from_json(const nlohmann::json& j) {
    const TorusGrid grid(j.at("n_max").get<int>());
    const int samples = j.at("samples").get<int>();
    SpaceTimeField u(grid, j.at("t0").get<double>(), j.at("dt").get<double>(), samples);
    const auto& values = j.at("values");
    if (!values.is_array() || static_cast<int>(values.size()) != samples)
        throw std::invalid_argument("values: expected one column per sample");
    for (int k = 0; k < samples; ++k) {
        const auto& column = values.at(k);
        if (!column.is_array() || static_cast<int>(column.size()) != grid.modes())
            throw std::invalid_argument("values: expected 2 n_max + 1 entries per sample");
        for (int n = -grid.n_max(); n <= grid.n_max(); ++n) u(n, k) = pair_value(column.at(n + grid.n_max()));
    }
    return u;
}

void write_csv(std::ostream& os, const SpaceTimeField& u) {
    os.precision(17);
    os << "t,n,re,im\n";
    for (int k = 0; k < u.samples(); ++k)
        for (int n = 0; n <= u.n_max(); ++n) {
            const Complex z = u(n, k);
            os << u.time(k) << ',' << n << ',' << z.real() << ',' << z.imag() << '\n';
        }
}

}  // namespace skdv
