#include "skdv/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace skdv {

const char* to_string(Region region) {
    switch (region) {
        case Region::All: return "all";
        case Region::A0: return "A0";
        case Region::A1: return "A1";
        case Region::A2: return "A2";
    }
    return "unknown";
}

int dominant_modulation(double s0, double s1, double s2) {
    if (s0 >= s1 && s0 >= s2) return 0;
    return s1 >= s2 ? 1 : 2;
}

int lattice_factor(const SpaceTimeField& u) {
    const double ratio = u.window_length() / (2 * kPi);
    const long k = std::lround(ratio);
    if (k < 1 || std::abs(ratio - double(k)) > 1e-9 * std::max(1.0, ratio))
        throw std::invalid_argument("interaction: window length must be 2 pi k for an integer k");
    return static_cast<int>(k);
}

namespace {

struct Pair {
    std::int64_t shift;  // n1^3 + n2^3 - n^3 = -3 n n1 n2
    int n1;
};

}  // namespace

double product_norm(const SpaceTimeField& u, const SpaceTimeField& v, const ProductOptions& options) {
    u.require_compatible(v);
    const int k = lattice_factor(u);
    const int N = u.n_max();
    const int K = u.samples();
    const double L = u.window_length();
    const double dtau = 2 * kPi / L;
    const auto tu = u.tau_view();
    const auto tv = v.tau_view();
    // Offsets of the tau-view columns from the free frequency, in lattice units.
    std::vector<int> offset(K);
    std::vector<double> sigma(K);
    for (int c = 0; c < K; ++c) {
        offset[c] = c - K / 2;
        sigma[c] = japanese(double(offset[c]) / k);
    }
    const bool filtered = options.region != Region::All;
    const int wanted = filtered ? static_cast<int>(options.region) - 1 : -1;

    std::vector<int> live_u, live_v;  // nonzero rows
    for (int n = -N; n <= N; ++n) {
        if (tu.row(n + N).cwiseAbs().maxCoeff() > 0) live_u.push_back(n);
        if (tv.row(n + N).cwiseAbs().maxCoeff() > 0) live_v.push_back(n);
    }
    std::vector<char> has_v(2 * N + 1, 0);
    for (int n : live_v) has_v[n + N] = 1;

    double total = 0;
    std::vector<Pair> pairs;
    std::vector<Complex> dense;
    std::vector<double> out_sigma;  // sigma_0 at each dense position, filtered runs only
    // The product carries output modes up to 2 N.
    for (int n = -2 * N; n <= 2 * N; ++n) {
        if (options.skip_zero_modes && n == 0) continue;
        const double factor = std::pow(japanese(double(n)), 2 * options.s) *
                              (options.derivative ? double(n) * double(n) : 1.0);
        if (factor == 0) continue;
        pairs.clear();
        for (int n1 : live_u) {
            const int n2 = n - n1;
            if (n2 < -N || n2 > N || !has_v[n2 + N]) continue;
            if (options.skip_zero_modes && (n1 == 0 || n2 == 0)) continue;
            pairs.push_back({-3 * std::int64_t(n) * n1 * n2, n1});
        }
        std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
            return a.shift != b.shift ? a.shift < b.shift : a.n1 < b.n1;
        });
        // Pairs whose lattice ranges overlap are accumulated into one dense buffer.
        std::size_t first = 0;
        while (first < pairs.size()) {
            std::size_t last = first;
            while (last + 1 < pairs.size() && (pairs[last + 1].shift - pairs[last].shift) * k < 2 * K) ++last;
            const std::int64_t base = pairs[first].shift * k - K;
            const std::int64_t span = (pairs[last].shift - pairs[first].shift) * k + 2 * K;
            dense.assign(static_cast<std::size_t>(span), Complex(0));
            if (filtered) {
                out_sigma.resize(static_cast<std::size_t>(span));
                for (std::int64_t pos = 0; pos < span; ++pos)
                    out_sigma[static_cast<std::size_t>(pos)] = japanese(double(pos + base) / k);
            }
            for (std::size_t i = first; i <= last; ++i) {
                const int n1 = pairs[i].n1;
                const int n2 = n - n1;
                const std::int64_t origin = pairs[i].shift * k - base;
                for (int c1 = 0; c1 < K; ++c1) {
                    const Complex a = tu(n1 + N, c1);
                    if (a == Complex(0)) continue;
                    for (int c2 = 0; c2 < K; ++c2) {
                        const Complex b = tv(n2 + N, c2);
                        if (b == Complex(0)) continue;
                        const std::int64_t pos = origin + offset[c1] + offset[c2];
                        if (filtered &&
                            dominant_modulation(out_sigma[static_cast<std::size_t>(pos)], sigma[c1], sigma[c2]) != wanted)
                            continue;
                        dense[static_cast<std::size_t>(pos)] += a * b;
                    }
                }
            }
            const double bw = 2 * options.b;
            for (std::int64_t pos = 0; pos < span; ++pos) {
                const double mag = std::norm(dense[static_cast<std::size_t>(pos)]);
                if (mag == 0) continue;
                const double w = bw == 0 ? 1.0 : std::pow(japanese(double(pos + base) / k), bw);
                total += factor * w * mag;
            }
            first = last + 1;
        }
    }
    // Product tau-view is (1/L) times the lattice convolution of the factors' tau-views.
    return std::sqrt(total * dtau) / L;
}

double l4_norm(const SpaceTimeField& u) {
    return std::sqrt(product_norm(u, u, ProductOptions{}));
}

}  // namespace skdv
