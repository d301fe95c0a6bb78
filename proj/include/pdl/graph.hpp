#pragma once

#include <utility>
#include <vector>

#include "pdl/chain.hpp"
#include "pdl/rational.hpp"

namespace pdl {

// Communication classes of the positive-entry digraph of a sparse matrix.
// A class is recurrent iff no positive-probability edge leaves it.
struct ClassPartition {
  std::vector<int> component;             // state -> class id
  std::vector<std::vector<int>> members;  // class id -> states
  std::vector<bool> recurrent;

  int class_count() const { return static_cast<int>(members.size()); }
};
ClassPartition recurrence_classes(const std::vector<std::vector<std::pair<int, double>>>& rows);

// Aggregated resistance graph: nodes are the recurrent classes of the
// unperturbed limit plus the class of the all-discontent state (flagged when
// transient, in which case its outward resistance is zero by construction).
// Edge resistance = minimal path resistance through the full chain.
struct ResistanceGraph {
  std::vector<std::vector<int>> nodes;        // node -> member states
  std::vector<int> node_of_state;             // -1 for states outside all nodes
  std::vector<std::vector<Resistance>> edge;  // dense; edge[i][i] is +inf
  int d_node = -1;
  bool d_recurrent = true;

  int node_count() const { return static_cast<int>(nodes.size()); }
  Resistance outward(int node) const;             // r*(node)
  std::vector<int> easy_targets(int node) const;  // arg min_z r(node -> z)
};

ResistanceGraph build_resistance_graph(const PMPChain& chain);

// Minimal path resistance from any state in `from` to any state in `to`,
// where per-transition resistance is the minimal exponent of its polynomial.
Resistance class_resistance(const PMPChain& chain, const std::vector<int>& from,
                            const std::vector<int>& to);

// Minimum-resistance spanning in-tree: each non-root node keeps exactly one
// outgoing edge and every tree path leads to the root.
struct Arborescence {
  Resistance total = Resistance::infinite();
  std::vector<std::pair<int, int>> edges;  // (from, to); empty when infeasible
  int blocked_node = -1;                   // a node that cannot reach the root
};

Arborescence min_arborescence(const std::vector<std::vector<Resistance>>& edge, int root);
Arborescence min_arborescence(const ResistanceGraph& graph, int root);

// Independent strategies, cross-checked in tests; the dispatcher uses the
// exhaustive scan on small graphs and edge contraction beyond that.
Arborescence min_arborescence_exhaustive(const std::vector<std::vector<Resistance>>& edge,
                                         int root);
Arborescence min_arborescence_by_contraction(const std::vector<std::vector<Resistance>>& edge,
                                             int root);

}  // namespace pdl
