#include "pdl/graph.hpp"

#include <algorithm>
#include <queue>

#include "pdl/errors.hpp"

namespace pdl {

ClassPartition recurrence_classes(const std::vector<std::vector<std::pair<int, double>>>& rows) {
  const int n = static_cast<int>(rows.size());
  ClassPartition part;
  part.component.assign(n, -1);

  // Iterative Tarjan on the positive-entry digraph.
  std::vector<int> idx(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  int next_index = 0, ncomp = 0;
  struct Frame {
    int v;
    std::size_t ei;
  };
  std::vector<Frame> call;
  for (int s = 0; s < n; ++s) {
    if (idx[s] >= 0) continue;
    idx[s] = low[s] = next_index++;
    stack.push_back(s);
    on_stack[s] = true;
    call.push_back({s, 0});
    while (!call.empty()) {
      Frame& f = call.back();
      bool descended = false;
      while (f.ei < rows[f.v].size()) {
        const auto& [w, p] = rows[f.v][f.ei];
        ++f.ei;
        if (p <= 0) continue;
        if (idx[w] < 0) {
          idx[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[w]) low[f.v] = std::min(low[f.v], idx[w]);
      }
      if (descended) continue;
      const int v = f.v;
      if (low[v] == idx[v]) {
        while (true) {
          const int w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          part.component[w] = ncomp;
          if (w == v) break;
        }
        ++ncomp;
      }
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
    }
  }

  part.members.assign(ncomp, {});
  for (int v = 0; v < n; ++v) part.members[part.component[v]].push_back(v);
  part.recurrent.assign(ncomp, true);
  for (int v = 0; v < n; ++v)
    for (const auto& [w, p] : rows[v])
      if (p > 0 && part.component[w] != part.component[v])
        part.recurrent[part.component[v]] = false;
  return part;
}

namespace {

using StateAdjacency = std::vector<std::vector<std::pair<int, Rational>>>;

StateAdjacency resistance_adjacency(const PMPChain& chain) {
  StateAdjacency adj(chain.rows.size());
  for (std::size_t i = 0; i < chain.rows.size(); ++i) {
    for (const auto& [j, p] : chain.rows[i]) {
      if (static_cast<std::size_t>(j) == i) continue;
      const Resistance r = p.resistance();
      if (!r.is_finite()) throw ConsistencyError("zero polynomial stored as transition");
      adj[i].push_back({j, r.value});
    }
  }
  return adj;
}

std::vector<Resistance> min_resistance_from(const StateAdjacency& adj,
                                            const std::vector<int>& sources) {
  std::vector<Resistance> dist(adj.size(), Resistance::infinite());
  using Item = std::pair<Rational, int>;
  const auto cmp = [](const Item& a, const Item& b) { return b.first < a.first; };
  std::priority_queue<Item, std::vector<Item>, decltype(cmp)> pq(cmp);
  for (int s : sources) {
    dist[s] = Resistance::finite(Rational(0));
    pq.push({Rational(0), s});
  }
  while (!pq.empty()) {
    const auto [d, v] = pq.top();
    pq.pop();
    if (dist[v].inf || dist[v].value != d) continue;
    for (const auto& [w, r] : adj[v]) {
      const Rational nd = d + r;
      if (dist[w].inf || nd < dist[w].value) {
        dist[w] = Resistance::finite(nd);
        pq.push({nd, w});
      }
    }
  }
  return dist;
}

}  // namespace

Resistance ResistanceGraph::outward(int node) const {
  Resistance best = Resistance::infinite();
  for (int j = 0; j < node_count(); ++j)
    if (j != node) best = min(best, edge[node][j]);
  return best;
}

std::vector<int> ResistanceGraph::easy_targets(int node) const {
  const Resistance r = outward(node);
  std::vector<int> out;
  if (!r.is_finite()) return out;
  for (int j = 0; j < node_count(); ++j)
    if (j != node && edge[node][j] == r) out.push_back(j);
  return out;
}

ResistanceGraph build_resistance_graph(const PMPChain& chain) {
  const auto p0 = unperturbed_limit(chain);
  const auto part = recurrence_classes(p0);

  ResistanceGraph g;
  g.node_of_state.assign(chain.states.size(), -1);
  const int d_class = part.component[chain.d_index];
  for (int c = 0; c < part.class_count(); ++c) {
    if (!part.recurrent[c] && c != d_class) continue;
    const int node = g.node_count();
    if (c == d_class) {
      g.d_node = node;
      g.d_recurrent = part.recurrent[c];
    }
    g.nodes.push_back(part.members[c]);
    for (int s : part.members[c]) g.node_of_state[s] = node;
  }

  const StateAdjacency adj = resistance_adjacency(chain);
  g.edge.assign(g.node_count(), std::vector<Resistance>(g.node_count(), Resistance::infinite()));
  for (int i = 0; i < g.node_count(); ++i) {
    const auto dist = min_resistance_from(adj, g.nodes[i]);
    for (int j = 0; j < g.node_count(); ++j) {
      if (j == i) continue;
      for (int s : g.nodes[j]) g.edge[i][j] = min(g.edge[i][j], dist[s]);
    }
  }
  return g;
}

Resistance class_resistance(const PMPChain& chain, const std::vector<int>& from,
                            const std::vector<int>& to) {
  const auto dist = min_resistance_from(resistance_adjacency(chain), from);
  Resistance best = Resistance::infinite();
  for (int s : to) best = min(best, dist[s]);
  return best;
}

namespace {

// Nodes that cannot reach the root over finite edges; first one certifies
// infeasibility.
int unreachable_node(const std::vector<std::vector<Resistance>>& edge, int root) {
  const int n = static_cast<int>(edge.size());
  std::vector<bool> reaches(n, false);
  reaches[root] = true;
  std::queue<int> q;
  q.push(root);
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int u = 0; u < n; ++u) {
      if (u != v && !reaches[u] && edge[u][v].is_finite()) {
        reaches[u] = true;
        q.push(u);
      }
    }
  }
  for (int v = 0; v < n; ++v)
    if (!reaches[v]) return v;
  return -1;
}

Arborescence finish(const std::vector<std::vector<Resistance>>& edge, int root,
                    std::vector<int> successor) {
  Arborescence a;
  a.total = Resistance::finite(Rational(0));
  const int n = static_cast<int>(edge.size());
  for (int v = 0; v < n; ++v) {
    if (v == root) continue;
    a.total = a.total + edge[v][successor[v]];
    a.edges.push_back({v, successor[v]});
  }
  return a;
}

}  // namespace

Arborescence min_arborescence_exhaustive(const std::vector<std::vector<Resistance>>& edge,
                                         int root) {
  const int n = static_cast<int>(edge.size());
  if (n > 9) throw ConsistencyError("exhaustive arborescence scan limited to 9 nodes");
  Arborescence best;
  if (n == 1) {
    best.total = Resistance::finite(Rational(0));
    return best;
  }
  const int bad = unreachable_node(edge, root);
  if (bad >= 0) {
    best.blocked_node = bad;
    return best;
  }

  std::vector<std::vector<int>> options(n);
  std::vector<int> nodes;
  for (int v = 0; v < n; ++v) {
    if (v == root) continue;
    for (int u = 0; u < n; ++u)
      if (u != v && edge[v][u].is_finite()) options[v].push_back(u);
    nodes.push_back(v);
  }

  std::vector<std::size_t> pick(n, 0);
  std::vector<int> succ(n, -1), seen(n, -1);
  int stamp = 0;
  while (true) {
    for (int v : nodes) succ[v] = options[v][pick[v]];
    // Valid iff every walk along successors reaches the root (no cycle).
    bool ok = true;
    for (int v : nodes) {
      int x = v;
      ++stamp;
      while (x != root && ok) {
        if (seen[x] == stamp) ok = false;
        seen[x] = stamp;
        x = succ[x];
      }
      if (!ok) break;
    }
    if (ok) {
      Resistance total = Resistance::finite(Rational(0));
      for (int v : nodes) total = total + edge[v][succ[v]];
      if (total < best.total) best = finish(edge, root, succ);
    }
    int j = static_cast<int>(nodes.size()) - 1;
    while (j >= 0 && ++pick[nodes[j]] == options[nodes[j]].size()) pick[nodes[j--]] = 0;
    if (j < 0) break;
  }
  if (!best.total.is_finite()) best.blocked_node = nodes.empty() ? -1 : nodes.front();
  return best;
}

namespace {

struct WorkEdge {
  int u, v;
  Rational w;
  int below;  // edge index at the finer level (top level: original list)
};

// Chu-Liu/Edmonds out-arborescence from the root: returns indices into
// `edges` of the chosen incoming edge per non-root node.
bool contract_level(int n, int root, const std::vector<WorkEdge>& edges, std::vector<int>& chosen,
                    int& blocked) {
  std::vector<int> best(n, -1);
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    const WorkEdge& ed = edges[e];
    if (ed.v == root || ed.u == ed.v) continue;
    if (best[ed.v] < 0 || ed.w < edges[best[ed.v]].w) best[ed.v] = e;
  }
  for (int v = 0; v < n; ++v) {
    if (v != root && best[v] < 0) {
      blocked = v;
      return false;
    }
  }

  // Cycle detection on the chosen-parent functional graph.
  std::vector<int> id(n, -1), vis(n, -1);
  int cycles = 0;
  for (int v = 0; v < n; ++v) {
    if (v == root) continue;
    int x = v;
    while (x != root && id[x] < 0 && vis[x] < 0) {
      vis[x] = v;
      x = edges[best[x]].u;
    }
    if (x != root && id[x] < 0 && vis[x] == v) {
      int y = x;
      do {
        id[y] = cycles;
        y = edges[best[y]].u;
      } while (y != x);
      ++cycles;
    }
    // Reset marks along the walked path so the next start is clean.
    x = v;
    while (x != root && vis[x] == v) {
      vis[x] = -2;
      x = edges[best[x]].u;
    }
  }

  if (cycles == 0) {
    for (int v = 0; v < n; ++v)
      if (v != root) chosen.push_back(best[v]);
    return true;
  }

  int nn = cycles;
  for (int v = 0; v < n; ++v)
    if (id[v] < 0) id[v] = nn++;

  std::vector<WorkEdge> next;
  next.reserve(edges.size());
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    const WorkEdge& ed = edges[e];
    const int nu = id[ed.u], nv = id[ed.v];
    if (nu == nv) continue;
    Rational w = ed.w;
    if (id[ed.v] < cycles) w = w - edges[best[ed.v]].w;
    next.push_back({nu, nv, w, e});
  }

  std::vector<int> sub;
  if (!contract_level(nn, id[root], next, sub, blocked)) {
    // Map the blocked contracted node back to a concrete state for reporting.
    for (int v = 0; v < n; ++v)
      if (id[v] == blocked) {
        blocked = v;
        break;
      }
    return false;
  }

  // Expand: a chosen edge entering a contracted cycle displaces the cycle's
  // own edge into its concrete target; all other cycle edges stay.
  std::vector<bool> entered(n, false);
  for (int se : sub) {
    const WorkEdge& ne = next[se];
    const WorkEdge& ed = edges[ne.below];
    chosen.push_back(ne.below);
    if (id[ed.v] < cycles) entered[ed.v] = true;
  }
  for (int v = 0; v < n; ++v) {
    if (v == root || id[v] >= cycles) continue;
    if (!entered[v]) chosen.push_back(best[v]);
  }
  return true;
}

}  // namespace

Arborescence min_arborescence_by_contraction(const std::vector<std::vector<Resistance>>& edge,
                                             int root) {
  const int n = static_cast<int>(edge.size());
  Arborescence a;
  if (n == 1) {
    a.total = Resistance::finite(Rational(0));
    return a;
  }
  // Reverse the graph: an in-tree of `edge` is an out-arborescence of the
  // reversed graph, where every non-root node has one incoming edge.
  std::vector<WorkEdge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && edge[i][j].is_finite())
        edges.push_back({j, i, edge[i][j].value, static_cast<int>(edges.size())});

  std::vector<int> chosen;
  int blocked = -1;
  if (!contract_level(n, root, edges, chosen, blocked)) {
    a.blocked_node = blocked;
    return a;
  }

  std::vector<int> succ(n, -1);
  a.total = Resistance::finite(Rational(0));
  for (int e : chosen) {
    const WorkEdge& ed = edges[e];
    if (succ[ed.v] != -1) throw ConsistencyError("arborescence picked two edges at one node");
    succ[ed.v] = ed.u;  // original edge ed.v -> ed.u
    a.total = a.total + edge[ed.v][ed.u];
    a.edges.push_back({ed.v, ed.u});
  }
  for (int v = 0; v < n; ++v)
    if (v != root && succ[v] < 0)
      throw ConsistencyError("arborescence left a node without an outgoing edge");
  // Acyclicity: every walk must reach the root.
  for (int v = 0; v < n; ++v) {
    int x = v, hops = 0;
    while (x != root) {
      x = succ[x];
      if (++hops > n) throw ConsistencyError("arborescence contains a cycle");
    }
  }
  std::sort(a.edges.begin(), a.edges.end());
  return a;
}

Arborescence min_arborescence(const std::vector<std::vector<Resistance>>& edge, int root) {
  if (edge.size() <= 6) return min_arborescence_exhaustive(edge, root);
  return min_arborescence_by_contraction(edge, root);
}

Arborescence min_arborescence(const ResistanceGraph& graph, int root) {
  return min_arborescence(graph.edge, root);
}

}  // namespace pdl
