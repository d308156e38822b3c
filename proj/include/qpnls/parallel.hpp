#pragma once

namespace qpnls {

// Caps the OpenMP worker pool. Results do not depend on the count: every
// parallel loop writes disjoint slots and reduces in a fixed order.
void set_threads(int n);
int max_threads();

}  // namespace qpnls
