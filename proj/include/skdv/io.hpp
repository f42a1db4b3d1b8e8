#pragma once

#include "skdv/spectral.hpp"

#include <json.hpp>

#include <iosfwd>

namespace skdv {

// {"n_max": N, "mean_zero": bool, "coeffs": [[re, im], ...]} for n = 0..N.
nlohmann::json to_json(const SpectralField& u);
SpectralField spectral_field_from_json(const nlohmann::json& j);

// {"n_max", "t0", "dt", "samples", "values": [[[re, im] for n = -N..N] for each k]}.
nlohmann::json to_json(const SpaceTimeField& u);
SpaceTimeField space_time_field_from_json(const nlohmann::json& j);

// CSV rows "t,n,re,im" for n = 0..N (negative modes implied).
void write_csv(std::ostream& os, const SpaceTimeField& u);

}  // namespace skdv
