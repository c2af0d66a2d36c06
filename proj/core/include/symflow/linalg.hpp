#pragma once

#include <symflow/rational.hpp>

#include <cstddef>
#include <optional>
#include <vector>

namespace symflow {

using RationalVector = std::vector<Rational>;
using RationalMatrix = std::vector<RationalVector>;

struct EchelonForm {
  RationalMatrix rref;               // reduced row echelon form, zero rows dropped
  std::vector<std::size_t> pivots;   // pivot column per row
};

// Fraction-free (Bareiss) elimination over integers, then normalized to RREF.
EchelonForm row_reduce(const RationalMatrix& m, std::size_t cols);

// Basis of {v : m v = 0}; one vector per free column, with 1 in that column.
std::vector<RationalVector> nullspace(const RationalMatrix& m, std::size_t cols);

// Unique solution of a square or overdetermined system, nullopt if inconsistent or singular.
std::optional<RationalVector> solve_unique(const RationalMatrix& a, const RationalVector& b);

std::size_t rank(const RationalMatrix& m, std::size_t cols);

}  // namespace symflow
