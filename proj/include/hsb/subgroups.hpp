#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "hsb/group_algebra.hpp"

namespace hsb {

/** @brief Representation data of a manifest subgroup together with its irrep labels. */
struct Subgroup {
  std::string name;
  std::vector<std::string> labels;
  RepTheory ring;
};

/** @brief Z3 with irreps labelled by charge 0,1,2 and classes {1},{X},{X^2}. */
inline Subgroup z3_subgroup() {
  const cplx w = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  Subgroup s{"Z3", {"0", "1", "2"}, {}};
  s.ring.dims = {1, 1, 1};
  s.ring.fusion = abelian_fusion({{0, 1, 2}, {1, 2, 0}, {2, 0, 1}});
  CharacterTable t;
  t.entries.resize(3, 3);
  for (int l = 0; l < 3; ++l)
    for (int q = 0; q < 3; ++q) t.entries(l, q) = std::pow(w, l * q);
  t.class_sizes = {1, 1, 1};
  s.ring.characters = t;
  s.ring.group_order = 3;
  return s;
}

/**
 * @brief Klein four-group with irrep index a + 2b for charges (a,b).
 *
 * Classes are ordered (1, g1, g2, g1 g2); irrep (a,b) takes value (-1)^a on g1 and (-1)^b on g2.
 */
inline Subgroup v4_subgroup(const std::vector<std::string>& labels) {
  Subgroup s{"V4", labels, {}};
  s.ring.dims = {1, 1, 1, 1};
  s.ring.fusion = abelian_fusion({{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}});
  CharacterTable t;
  t.entries.resize(4, 4);
  const int gx[4] = {0, 1, 0, 1};
  const int gy[4] = {0, 0, 1, 1};
  for (int l = 0; l < 4; ++l)
    for (int c = 0; c < 4; ++c) {
      const int a = l % 2, b = l / 2;
      t.entries(l, c) = ((a * gx[c] + b * gy[c]) % 2 == 0) ? 1.0 : -1.0;
    }
  t.class_sizes = {1, 1, 1, 1};
  s.ring.characters = t;
  s.ring.group_order = 4;
  return s;
}

/**
 * @brief Z3^2 x| Z2 generated by clock Z, shift X and conjugation R.
 *
 * Irreps: (0,+), (0,-), [0,1], [1,0], [1,1], [1,2] where [QZ,QX] is the two-dimensional irrep in which Z
 * carries w^{QZ} and X carries w^{QX}. Classes: {1}, {Z^a}, {X^b}, {XZ, X^2Z^2}, {XZ^2, X^2Z}, R-coset.
 */
inline Subgroup torus_subgroup() {
  Subgroup s{"Z3^2xZ2", {"(0,+)", "(0,-)", "[0,1]", "[1,0]", "[1,1]", "[1,2]"}, {}};
  s.ring.dims = {1, 1, 2, 2, 2, 2};
  CharacterTable t;
  t.entries.resize(6, 6);
  const int za[5] = {0, 1, 0, 1, 2};
  const int xb[5] = {0, 0, 1, 1, 1};
  const int qz[4] = {0, 1, 1, 1};
  const int qx[4] = {1, 0, 1, 2};
  for (int c = 0; c < 5; ++c) {
    t.entries(0, c) = 1.0;
    t.entries(1, c) = 1.0;
    for (int l = 0; l < 4; ++l)
      t.entries(l + 2, c) = 2.0 * std::cos(2.0 * std::numbers::pi * (za[c] * qz[l] + xb[c] * qx[l]) / 3.0);
  }
  t.entries(0, 5) = 1.0;
  t.entries(1, 5) = -1.0;
  for (int l = 2; l < 6; ++l) t.entries(l, 5) = 0.0;
  t.class_sizes = {1, 2, 2, 2, 2, 9};
  s.ring.fusion = verlinde_fusion(t);
  s.ring.characters = t;
  s.ring.group_order = 18;
  return s;
}

}  // namespace hsb
