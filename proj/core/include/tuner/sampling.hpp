#pragma once

#include "tuner/common.hpp"
#include "tuner/rng.hpp"

namespace tuner {

/// n x D design in [0,1)^D with exactly one sample per axis stratum
/// [j/n, (j+1)/n) in every dimension; uniform jitter inside strata and
/// independent stratum permutations per dimension.
Matrix latin_hypercube(int n, int dims, const RngStream& rng);

/// n_uniform points uniform in the unit box followed by n_local Gaussian
/// perturbations of center (per-coordinate std local_sigma), clipped to [0,1].
Matrix candidate_batch(const Eigen::Ref<const Vector>& center, int n_uniform, int n_local,
                       double local_sigma, const RngStream& rng);

}  // namespace tuner
