#pragma once

namespace skdv {

// Smooth time cutoff: 1 on [0, 1], 0 outside (-1, 2), C^2 monotone tapers on [-1, 0] and [1, 2].
double time_cutoff(double t);

// eta(t / T).
inline double time_cutoff(double t, double T) { return time_cutoff(t / T); }

inline constexpr const char* kCutoffDescription =
    "eta = 1 on [0,1], 0 outside [-1,2], taper h(x) = x - sin(2 pi x)/(2 pi) on [-1,0] and mirrored on [1,2]";

}  // namespace skdv
