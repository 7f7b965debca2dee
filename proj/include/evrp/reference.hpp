#pragma once

#include <string>
#include <vector>

#include "evrp/io.hpp"
#include "evrp/model.hpp"

namespace evrp {

/// The bundled 8-node, 3-vehicle example instance. Costs are symmetric while
/// energies are not, so reversing a tour keeps its cost but changes its
/// battery draw; that gives the alpha sweep its characteristic shape: a wide
/// DoD spread at alpha 0, a strictly smaller spread at unchanged cost for a
/// small alpha, and a spread under 5 percentage points at strictly higher
/// cost for a large alpha. The numbers were found by search over randomly
/// generated candidates and are fixed here.
inline InstanceDocument reference_document() {
  InstanceDocument doc;
  doc.format_version = 1;
  doc.depot = "D";
  doc.nodes = {{"D", {}, {}}, {"N1", {}, {}}, {"N2", {}, {}}, {"N3", {}, {}},
               {"N4", {}, {}}, {"N5", {}, {}}, {"N6", {}, {}}, {"N7", {}, {}}};
  doc.cost_matrix = {
      {0, 22, 17, 26, 17, 14, 17, 25},
      {22, 0, 28, 11, 30, 11, 19, 19},
      {17, 28, 0, 13, 16, 16, 9, 9},
      {26, 11, 13, 0, 18, 7, 13, 20},
      {17, 30, 16, 18, 0, 12, 7, 8},
      {14, 11, 16, 7, 12, 0, 18, 29},
      {17, 19, 9, 13, 7, 18, 0, 6},
      {25, 19, 9, 20, 8, 29, 6, 0},
  };
  doc.energy_matrix = {
      {0, 4, 10, 5, 13, 9, 12, 7},
      {4, 0, 16, 16, 6, 11, 5, 9},
      {15, 10, 0, 5, 6, 11, 16, 13},
      {11, 8, 9, 0, 13, 15, 14, 16},
      {11, 13, 7, 9, 0, 13, 5, 14},
      {8, 13, 8, 6, 6, 0, 4, 9},
      {14, 15, 5, 9, 10, 10, 0, 8},
      {10, 10, 7, 15, 7, 5, 16, 0},
  };
  doc.vehicles = {{"V1", 100.0}, {"V2", 100.0}, {"V3", 100.0}};
  return doc;
}

inline Instance reference_instance() { return reference_document().to_instance(); }

}  // namespace evrp
