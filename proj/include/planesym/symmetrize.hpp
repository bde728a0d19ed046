#pragma once

#include "planesym/groups.hpp"
#include "planesym/lattice_fourier.hpp"

namespace planesym {

struct OriginShift {
  Vec2 shift;                   // fractional; apply with shift_origin()
  double phase_residual = 0.0;  // amplitude-weighted RMS phase error, radians
};

// Origin that maximises the power kept by the group projection, i.e. the
// one minimising the complex residual. Grid search on a 64 x 64 (or finer)
// grid, then Newton refinement. Among equivalent optima the lexicographically
// smallest grid point wins, so the result is deterministic.
OriginShift refine_origin(const CoefficientSet& set, const GroupSetting& group);

// Orbit average C(h) <- (1/k) sum_g C(hR_g) exp(-2 pi i h.t_g) about the
// current origin. Equals averaging the k symmetry-related copies of the
// pattern in direct space. Orbits weaker than the set threshold are dropped,
// which removes systematic absences; whole orbits are kept otherwise.
CoefficientSet symmetrize_plane_group(const CoefficientSet& set, const GroupSetting& group);

// Amplitudes averaged over the orbits of the point class; phases untouched.
CoefficientSet symmetrize_point_class(const CoefficientSet& set, const PointClass& cls);

}  // namespace planesym
