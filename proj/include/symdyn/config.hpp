#pragma once

#include <cstddef>

namespace symdyn::config {

// Numerical defaults. Every routine that iterates or compares takes its
// tolerance as a parameter; these are the values used when none is given.

inline constexpr double kPerronTol = 1e-12;
inline constexpr std::size_t kPerronMaxIter = 100000;

inline constexpr double kNormalizedTol = 1e-10;

inline constexpr double kEigenfunctionTol = 1e-12;
inline constexpr std::size_t kEigenfunctionMaxSteps = 10000;

// Spread between residue-class limits.
inline constexpr double kSpreadConverged = 1e-8;
inline constexpr double kSpreadDiverged = 1e-6;

// Upper bound on the number of words an exhaustive enumeration may visit.
inline constexpr double kEnumerationBudget = 1e7;

}  // namespace symdyn::config
