#pragma once

#include <random>
#include <vector>

#include "thetagreen/siegel.hpp"

namespace testgen {

using thetagreen::IMatrix;
using thetagreen::SymplecticMatrix;

/// Generators of Igusa's group used throughout the invariance tests.
inline std::vector<SymplecticMatrix> gamma12_generators(int g) {
  std::vector<SymplecticMatrix> out;
  out.push_back(SymplecticMatrix::inversion(g));
  for (int i = 0; i < g; ++i) {
    IMatrix b = IMatrix::Zero(g, g);
    b(i, i) = 2;
    out.push_back(SymplecticMatrix::translation(b));
    IMatrix c = IMatrix::Zero(g, g);
    c(i, i) = 2;
    out.emplace_back(IMatrix::Identity(g, g), IMatrix::Zero(g, g), c, IMatrix::Identity(g, g));
  }
  for (int i = 0; i < g; ++i)
    for (int j = i + 1; j < g; ++j) {
      IMatrix b = IMatrix::Zero(g, g);
      b(i, j) = b(j, i) = 1;
      out.push_back(SymplecticMatrix::translation(b));
      IMatrix u = IMatrix::Identity(g, g);
      u(i, j) = 1;
      out.push_back(SymplecticMatrix::basis_change(u));
      IMatrix p = IMatrix::Identity(g, g);
      p(i, i) = p(j, j) = 0;
      p(i, j) = p(j, i) = 1;
      out.push_back(SymplecticMatrix::basis_change(p));
    }
  return out;
}

/// Generators of the full symplectic group (partial inversions and odd shifts).
inline std::vector<SymplecticMatrix> sp_generators(int g) {
  std::vector<SymplecticMatrix> out = gamma12_generators(g);
  for (int k = 0; k < g; ++k) out.push_back(SymplecticMatrix::partial_inversion(g, k));
  for (int i = 0; i < g; ++i) {
    IMatrix b = IMatrix::Zero(g, g);
    b(i, i) = 1;
    out.push_back(SymplecticMatrix::translation(b));
  }
  return out;
}

inline SymplecticMatrix random_word(std::mt19937_64& rng, const std::vector<SymplecticMatrix>& gens, int length) {
  std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
  SymplecticMatrix m = SymplecticMatrix::identity(gens.front().genus());
  for (int i = 0; i < length; ++i) m = m * gens[pick(rng)];
  return m;
}

}  // namespace testgen
