#pragma once

// Shared structures for the unit tests and the acceptance binary.

#include <vector>

#include "thresholdlab/structures.hpp"

namespace fixture {

using namespace thresholdlab;

inline StructureExpr parallel_series(int m, int r) {
  return product(StructureExpr::parallel(m), StructureExpr::series(r));
}

// Fixtures small enough for exhaustive oracles (n <= 16).
inline std::vector<StructureExpr> small() {
  return {
      StructureExpr::k_out_of_n(1, 1),
      StructureExpr::k_out_of_n(2, 3),
      StructureExpr::k_out_of_n(5, 11),
      StructureExpr::series(4),
      StructureExpr::parallel(5),
      StructureExpr::consecutive(2, 4),
      StructureExpr::consecutive(3, 12),
      StructureExpr::consecutive(3, 10, Topology::linear),
      StructureExpr::consecutive(1, 5),
      StructureExpr::consecutive(6, 6),
      parallel_series(2, 3),
      product(StructureExpr::k_out_of_n(2, 3), StructureExpr::consecutive(2, 5)),
      product(StructureExpr::consecutive(2, 4, Topology::linear), StructureExpr::k_out_of_n(2, 4)),
      StructureExpr::explicit_set(3, {Configuration::from_bitstring("110"),
                                      Configuration::from_bitstring("111"),
                                      Configuration::from_bitstring("011")}),
  };
}

}  // namespace fixture
