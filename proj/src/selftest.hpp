#pragma once

#include <cstdio>
#include <vector>

namespace ubw1 {

// Runs the full acceptance suite, printing one pass/fail line per criterion.
// Returns the number of failed criteria.
int run_acceptance(std::FILE* out);

// Symmetric grid with roughly constant relative spacing away from zero,
// used to sample reconstructed profiles accurately near their fixed points.
std::vector<double> relative_grid(double lo, double hi, int n, double core = 0.05);

}  // namespace ubw1
