#pragma once

#include "chase/request.hpp"

namespace chase {

// Independent dynamic-programming oracle for W_n(x) on a grid (d <= 2 only):
// path-cost layers are propagated with exact first/last hops and a wide-
// stencil chamfer distance transform between layers.  Accuracy is
// O(L * grid_step * n) with L the instance Lipschitz scale; intended for
// tests only.  Throws DimensionTooLarge above two dimensions.
double brute_force_work(const Instance& inst, Index n, const Vector& x, double grid_step);

}  // namespace chase
