#include "skdv/cutoff.hpp"

#include "skdv/spectral.hpp"

#include <cmath>

namespace skdv {

namespace {

// Rises from 0 at x = 0 to 1 at x = 1 with vanishing first and second derivatives at both ends.
double taper(double x) { return x - std::sin(2 * kPi * x) / (2 * kPi); }

}  // namespace

double time_cutoff(double t) {
    if (t <= -1 || t >= 2) return 0;
    if (t < 0) return taper(t + 1);
    if (t <= 1) return 1;
    return taper(2 - t);
}

}  // namespace skdv
