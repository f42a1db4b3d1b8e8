#pragma once

#include "skdv/spectral.hpp"

#include <cstdint>
#include <optional>

namespace skdv {

// Which modulation dominates a product term: sigma_0 = <tau - n^3>, sigma_1, sigma_2 for the factors.
// Ties go to the smaller index.
enum class Region { All, A0, A1, A2 };

const char* to_string(Region region);
int dominant_modulation(double s0, double s1, double s2);

// Weighted L^2 of the product u v (or d/dx of it) in tau-view normalisation:
//   ( sum_n int <n>^{2s} <tau - n^3>^{2b} |n^d (uv)^(n, tau)|^2 dtau )^{1/2}.
// Both fields must share one window whose length is 2 pi k for an integer k; then every product
// frequency n1^3 + n2^3 + tau'_1 + tau'_2 lies on the lattice of spacing 1/k and the sum is exact
// for the trigonometric interpolants of the samples (no aliasing in t or x).
struct ProductOptions {
    bool derivative = false;
    double s = 0;
    double b = 0;
    Region region = Region::All;
    bool skip_zero_modes = false;  // drop n = 0, n1 = 0, n2 = 0
};

double product_norm(const SpaceTimeField& u, const SpaceTimeField& v, const ProductOptions& options);

// Integer k with window_length = 2 pi k; throws otherwise.
int lattice_factor(const SpaceTimeField& u);

// ||u||_{L^4_{x,t}} over the torus times one period of the window.
double l4_norm(const SpaceTimeField& u);

}  // namespace skdv
